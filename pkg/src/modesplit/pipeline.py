"""End-to-end runs behind the CLI commands: sweep, analyse, write files."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .cavity import CavityParams, fsr, linewidth
from .config import RunConfig
from .fitting import FitProblem, fit_parameters, model_values
from .io_files import (PeakReport, SCHEMA_VERSION, ingest_spectrum,
                       params_snapshot, write_json, write_peak_report,
                       write_spectrum_csv)
from .medium import MediumParams, collective_coupling_estimate
from .report import save_crossing_svg, save_spectrum_svg
from .spectrum import (SplittingResult, avoided_crossing_map, find_peaks,
                       measure_splitting, solve_phase_resonances, sweep)

__all__ = ["PipelineError", "RunResult", "run_point", "run_simulate",
           "run_ladder", "run_fit", "split_mode_count", "dispersion_linewidth"]

log = logging.getLogger(__name__)


class PipelineError(RuntimeError):
    """A run failed after configuration was accepted."""


@dataclass(frozen=True)
class RunResult:
    spectrum: object
    peaks: list
    roots: list
    branches: dict
    splitting: SplittingResult
    report: PeakReport


def dispersion_linewidth(medium: MediumParams):
    """Linewidth governing the dispersion wing, for coupling estimates."""
    if medium.mode == "approx_doppler":
        return medium.doppler_width
    return medium.gamma


def split_mode_count(branches):
    """Number of mode indices carrying at least two matched branches."""
    return sum(1 for entries in branches.values() if len(entries) >= 2)


def run_point(medium: MediumParams | None, cavity: CavityParams,
              window_hz, step_hz, threshold):
    """Sweep one parameter set and run the full peak/root analysis."""
    spectrum = sweep(window_hz, step_hz, cavity, medium)
    peaks = find_peaks(spectrum, threshold)
    half = max(abs(window_hz[0]), abs(window_hz[1]))
    m_max = int(math.ceil(half / fsr(cavity))) + 1
    roots = solve_phase_resonances((-m_max, m_max), cavity, medium, window_hz,
                                   threshold=threshold)
    kappa = linewidth(cavity)
    peaks, branches = avoided_crossing_map(peaks, roots, kappa)
    splitting = measure_splitting(peaks, fsr(cavity), kappa)
    report = PeakReport(
        schema_version=SCHEMA_VERSION,
        params=params_snapshot(medium, cavity),
        peaks=tuple(peaks),
        split=splitting.split,
        g_sqrt_n_hz=splitting.g_sqrt_n_hz,
        superstrong=splitting.superstrong,
    )
    return RunResult(spectrum=spectrum, peaks=peaks, roots=roots,
                     branches=branches, splitting=splitting, report=report)


def _ensure_dir(out_dir):
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def run_simulate(config: RunConfig, out_dir):
    """Sweep + analysis; writes spectrum.csv, peaks.json and plot.svg."""
    out = _ensure_dir(out_dir)
    result = run_point(config.medium, config.cavity, config.window_hz,
                       config.step_hz, config.threshold)
    write_spectrum_csv(out / "spectrum.csv", result.spectrum)
    write_peak_report(out / "peaks.json", result.report)
    save_spectrum_svg(out / "plot.svg", result.spectrum, result.peaks)
    log.info("simulate: %d peaks, split=%s, superstrong=%s",
             len(result.peaks), result.splitting.split, result.splitting.superstrong)
    return result


def run_ladder(config: RunConfig, out_dir):
    """Run every ladder point; writes ladder.json, crossing.svg and per-point
    peak reports.  Failing points are recorded and reported after the
    survivors are written out."""
    if not config.ladder:
        raise PipelineError("config has no [ladder] section")
    out = _ensure_dir(out_dir)
    entries = []
    crossing_points = []
    failures = []
    for i, point in enumerate(config.ladder):
        try:
            result = run_point(point.medium, config.cavity, config.window_hz,
                               config.step_hz, config.threshold)
        except Exception as exc:  # noqa: BLE001  (per-point isolation)
            log.error("ladder point %s failed: %s", point.label, exc)
            failures.append(f"{point.label}: {exc}")
            entries.append({"label": point.label, "error": str(exc)})
            continue
        write_peak_report(out / f"peaks_{i:02d}.json", result.report)
        crossing_points.append((point.label, result.branches))
        estimate = collective_coupling_estimate(
            point.a0_La, dispersion_linewidth(point.medium), config.cavity.length)
        entries.append({
            "label": point.label,
            "a0_La": point.a0_La,
            "temperature_c": point.temperature_c,
            "doppler_width_hz": point.medium.doppler_width / (2 * np.pi),
            "peak_count": len(result.peaks),
            "split_mode_count": split_mode_count(result.branches),
            "split": result.splitting.split,
            "g_sqrt_n_hz": result.splitting.g_sqrt_n_hz,
            "superstrong": result.splitting.superstrong,
            "coupling_estimate_hz": estimate / (2 * np.pi),
        })
    payload = {
        "schema_version": SCHEMA_VERSION,
        "cavity": params_snapshot(None, config.cavity)["cavity"],
        "window_hz": list(config.window_hz),
        "points": entries,
    }
    write_json(out / "ladder.json", payload)
    save_crossing_svg(out / "crossing.svg", crossing_points, config.cavity)
    if failures:
        raise PipelineError(f"{len(failures)} ladder point(s) failed: "
                            + "; ".join(failures))
    return entries


def run_fit(config: RunConfig, data_path, out_dir):
    """Fit the configured free parameters to an ingested spectrum; writes
    fit.json alongside the residual curve.  Returns the FitResult."""
    if config.fit is None:
        raise PipelineError("config has no [fit] section")
    out = _ensure_dir(out_dir)
    settings = config.fit
    observed = ingest_spectrum(data_path, normalize_to=settings.normalize_to)
    problem = FitProblem(observed=observed, medium=config.medium,
                         cavity=config.cavity, free=settings.free,
                         bounds=settings.bounds, guess=settings.guess)
    result = fit_parameters(problem, multi_start=settings.multi_start,
                            max_iterations=settings.max_iterations)
    curve = model_values(problem, result.best_fit) - observed.values
    best_hz = dict(result.best_fit)
    if "doppler_width" in best_hz:
        best_hz["doppler_width_hz"] = best_hz.pop("doppler_width") / (2 * np.pi)
    payload = {
        "schema_version": SCHEMA_VERSION,
        "data": str(data_path),
        "free_params": list(settings.free),
        "best_fit": best_hz,
        "residual": result.residual,
        "iterations": result.iterations,
        "converged": result.converged,
        "residual_curve": [float(v) for v in curve],
    }
    write_json(out / "fit.json", payload)
    return result

"""Serialization of spectra, peak reports, ladder summaries and fit results.

Spectra travel as two-column CSV with a ``detuning_hz,transmission`` header;
floats are written with ``repr`` so a write/read cycle reproduces the exact
values.  Structured results travel as schema-versioned JSON with sorted keys,
which keeps repeated runs byte-identical.
"""

from __future__ import annotations

import csv
import json
import logging
from dataclasses import dataclass

import numpy as np

from .cavity import CavityParams
from .medium import MediumParams
from .spectrum import Peak, Spectrum

__all__ = [
    "IngestError",
    "PeakReport",
    "SCHEMA_VERSION",
    "write_spectrum_csv",
    "ingest_spectrum",
    "write_peak_report",
    "read_peak_report",
    "write_json",
    "params_snapshot",
    "MIN_SAMPLES",
]

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1
MIN_SAMPLES = 10

_HZ_HEADERS = {"detuning_hz", "freq_hz", "frequency_hz"}
_MHZ_HEADERS = {"detuning_mhz", "freq_mhz", "frequency_mhz"}


class IngestError(ValueError):
    """Unusable measured-spectrum file."""


@dataclass(frozen=True)
class PeakReport:
    """Schema-versioned peak summary of one spectrum."""

    schema_version: int
    params: dict
    peaks: tuple[Peak, ...]
    split: bool
    g_sqrt_n_hz: float | None
    superstrong: bool

    def to_dict(self):
        return {
            "schema_version": self.schema_version,
            "params": self.params,
            "peaks": [_peak_to_dict(p) for p in self.peaks],
            "split": self.split,
            "g_sqrt_n_hz": self.g_sqrt_n_hz,
            "superstrong": self.superstrong,
        }


def _peak_to_dict(p: Peak):
    return {
        "position_hz": p.position_hz,
        "height": p.height,
        "fwhm_hz": None if not np.isfinite(p.fwhm_hz) else p.fwhm_hz,
        "mode_index": p.mode_index,
        "branch": p.branch,
        "ambiguous": p.ambiguous,
    }


def _peak_from_dict(d):
    return Peak(position_hz=d["position_hz"], height=d["height"],
                fwhm_hz=float("nan") if d["fwhm_hz"] is None else d["fwhm_hz"],
                mode_index=d["mode_index"], branch=d["branch"],
                ambiguous=d.get("ambiguous", False))


def params_snapshot(medium: MediumParams | None, cavity: CavityParams | None):
    """Hz-boundary dictionary of the model parameters behind a spectrum."""
    snap = {}
    if medium is not None:
        snap["medium"] = {
            "mode": medium.mode,
            "lambda_nm": medium.wavelength * 1e9,
            "gamma_hz": medium.gamma / (2 * np.pi),
            "doppler_width_hz": medium.doppler_width / (2 * np.pi),
            "a0_La": medium.a0_La,
            "La_m": medium.length,
        }
    if cavity is not None:
        snap["cavity"] = {
            "Lc_m": cavity.length,
            "R1": cavity.R1,
            "R2": cavity.R2,
            "excess_loss": cavity.excess_loss,
            "finesse": cavity.finesse,
        }
    return snap


def write_spectrum_csv(path, spectrum: Spectrum):
    """Write ``detuning_hz,transmission`` rows with repr-exact floats."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["detuning_hz", "transmission"])
        for x, y in zip(spectrum.grid_hz, spectrum.values):
            writer.writerow([repr(float(x)), repr(float(y))])


def ingest_spectrum(path, normalize_to=None, min_samples=MIN_SAMPLES):
    """Read a two-column spectrum CSV.

    The first column header declares the frequency unit (``*_hz`` or
    ``*_mhz``); the second column is transmitted intensity in any unit.
    Non-uniform grids are resampled onto a uniform one by linear
    interpolation with a logged notice.  When ``normalize_to`` is given, the
    values are rescaled so their maximum equals it; by default they are kept
    as read so that a file written by :func:`write_spectrum_csv` round-trips
    unchanged.
    """
    try:
        fh = open(path, "r", encoding="utf-8", newline="")
    except OSError as exc:
        raise IngestError(f"cannot read spectrum {path}: {exc}") from exc
    with fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise IngestError(f"{path}: empty file") from None
        if len(header) != 2:
            raise IngestError(f"{path}: expected 2 columns, got {len(header)}")
        unit_key = header[0].strip().lower()
        if unit_key in _HZ_HEADERS:
            scale = 1.0
        elif unit_key in _MHZ_HEADERS:
            scale = 1e6
        else:
            raise IngestError(
                f"{path}: first column header {header[0]!r} must declare the "
                f"frequency unit, e.g. one of {sorted(_HZ_HEADERS | _MHZ_HEADERS)}")
        freqs, values = [], []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 2:
                raise IngestError(f"{path}:{lineno}: expected 2 fields, got {len(row)}")
            try:
                freqs.append(float(row[0]) * scale)
                values.append(float(row[1]))
            except ValueError as exc:
                raise IngestError(f"{path}:{lineno}: {exc}") from None
    if len(freqs) < min_samples:
        raise IngestError(
            f"{path}: {len(freqs)} samples, need at least {min_samples}")
    freqs = np.asarray(freqs)
    values = np.asarray(values)
    order = np.argsort(freqs, kind="stable")
    if not np.array_equal(order, np.arange(len(freqs))):
        log.info("%s: frequency column not sorted; sorting", path)
        freqs, values = freqs[order], values[order]
    steps = np.diff(freqs)
    if np.any(steps <= 0):
        raise IngestError(f"{path}: duplicate frequency samples")
    if not np.allclose(steps, steps[0], rtol=1e-6, atol=0.0):
        log.info("%s: non-uniform grid; resampling %d points onto a uniform grid",
                 path, len(freqs))
        uniform = np.linspace(freqs[0], freqs[-1], len(freqs))
        values = np.interp(uniform, freqs, values)
        freqs = uniform
    if normalize_to is not None:
        peak = float(np.max(values))
        if peak <= 0:
            raise IngestError(f"{path}: cannot normalize, maximum value is {peak}")
        values = values * (normalize_to / peak)
    return Spectrum(grid_hz=freqs, values=values)


def write_json(path, payload):
    """Dump a JSON document with sorted keys and a trailing newline."""
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True, allow_nan=False)
        fh.write("\n")


def write_peak_report(path, report: PeakReport):
    write_json(path, report.to_dict())


def read_peak_report(path) -> PeakReport:
    with open(path, "r", encoding="utf-8") as fh:
        d = json.load(fh)
    return PeakReport(
        schema_version=d["schema_version"],
        params=d["params"],
        peaks=tuple(_peak_from_dict(p) for p in d["peaks"]),
        split=d["split"],
        g_sqrt_n_hz=d["g_sqrt_n_hz"],
        superstrong=d["superstrong"],
    )

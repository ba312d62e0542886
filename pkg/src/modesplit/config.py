"""Run configuration: INI-style .cfg files with strict key checking.

Every key has a physically sensible default (the bundled configs only state
what they change), unknown keys are rejected outright to catch misspellings,
and defaulted keys are reported through the module logger.  Frequencies in
files are plain Hz, lengths are metres, temperatures carry the unit in the
key name (``temperature_c`` or ``temperature_k``).
"""

from __future__ import annotations

import configparser
import logging
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np
from scipy.constants import atomic_mass

from .cavity import CavityParams, calibrate_excess_loss, fsr
from .medium import (MODES, RB87_FRACTION, RB87_MASS, SIGMA_EFF_DEFAULT,
                     MediumParams, a0La_from_column_density,
                     column_density_from_temperature, doppler_width,
                     sigma_eff_analytic)
from .spectrum import DEFAULT_THRESHOLD

__all__ = ["ConfigError", "RunConfig", "FitSettings", "LadderPoint",
           "load_config", "bundled_config_path", "bundled_config_names"]

log = logging.getLogger(__name__)


class ConfigError(ValueError):
    """Invalid or inconsistent run configuration."""


_KNOWN_KEYS = {
    "medium": {
        "mode", "lambda_nm", "gamma_hz", "doppler_width_hz", "temperature_c",
        "temperature_k", "mass_amu", "a0_la", "nd_la_per_m2", "sigma_eff_m2",
        "density_model", "abundance", "la_m",
    },
    "cavity": {"lc_m", "r1", "r2", "excess_loss", "finesse"},
    "sweep": {"window_fsr", "window_hz", "step_hz", "threshold"},
    "ladder": {"a0_la_list", "temperature_c_list"},
    "fit": {
        "free", "multi_start", "max_iterations", "normalize_to_max",
        "a0_la_bounds", "a0_la_guess",
        "doppler_width_bounds_hz", "doppler_width_guess_hz",
        "excess_loss_bounds", "excess_loss_guess",
        "freq_offset_bounds_hz", "freq_offset_guess_hz",
    },
    "output": {"dir"},
}


@dataclass(frozen=True)
class FitSettings:
    free: tuple[str, ...]
    bounds: dict[str, tuple[float, float]]
    guess: dict[str, float]
    multi_start: bool
    max_iterations: int
    normalize_to: float | None


@dataclass(frozen=True)
class LadderPoint:
    label: str
    medium: MediumParams
    a0_La: float
    temperature_c: float | None = None


@dataclass(frozen=True)
class RunConfig:
    medium: MediumParams
    cavity: CavityParams
    window_hz: tuple[float, float]
    step_hz: float
    threshold: float
    finesse_target: float | None
    ladder: tuple[LadderPoint, ...] | None
    fit: FitSettings | None
    output_dir: str | None


class _Section:
    """One config section with typed getters and defaulted-key tracking."""

    def __init__(self, name, raw, defaulted):
        self.name = name
        self.raw = dict(raw)
        self.defaulted = defaulted

    def has(self, key):
        return key in self.raw

    def _fetch(self, key, default, convert, kind):
        if key not in self.raw:
            if default is not None:
                self.defaulted.append(f"[{self.name}] {key} = {default}")
            return default
        text = self.raw[key]
        try:
            return convert(text)
        except (TypeError, ValueError) as exc:
            raise ConfigError(
                f"key '{key}' in section [{self.name}]: expected {kind}, "
                f"got {text!r}") from exc

    def get_float(self, key, default=None):
        return self._fetch(key, default, float, "a number")

    def get_int(self, key, default=None):
        return self._fetch(key, default, int, "an integer")

    def get_str(self, key, default=None):
        return self._fetch(key, default, str, "a string")

    def get_bool(self, key, default=None):
        def conv(text):
            t = text.strip().lower()
            if t in ("true", "yes", "on", "1"):
                return True
            if t in ("false", "no", "off", "0"):
                return False
            raise ValueError(text)
        return self._fetch(key, default, conv, "a boolean")

    def get_float_list(self, key):
        def conv(text):
            items = [t for t in text.replace(",", " ").split() if t]
            if not items:
                raise ValueError(text)
            return tuple(float(t) for t in items)
        return self._fetch(key, None, conv, "a list of numbers")

    def get_pair(self, key, default=None):
        def conv(text):
            values = tuple(float(t) for t in text.replace(",", " ").split() if t)
            if len(values) != 2:
                raise ValueError(text)
            return values
        return self._fetch(key, default, conv, "a pair of numbers")


def _read_ini(path):
    parser = configparser.ConfigParser(
        inline_comment_prefixes=("#", ";"), interpolation=None, strict=True)
    try:
        with open(path, "r", encoding="utf-8") as fh:
            parser.read_file(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except configparser.Error as exc:
        raise ConfigError(f"malformed config {path}: {exc}") from exc
    for section in parser.sections():
        if section not in _KNOWN_KEYS:
            raise ConfigError(f"unknown section [{section}] in {path}")
        for key in parser[section]:
            if key not in _KNOWN_KEYS[section]:
                raise ConfigError(
                    f"unknown key '{key}' in section [{section}] of {path}")
    return parser


def _exclusive(section, *keys):
    present = [k for k in keys if section.has(k)]
    if len(present) > 1:
        raise ConfigError(
            f"keys {present} in section [{section.name}] are mutually exclusive")
    return present[0] if present else None


def _resolve_temperature(section):
    which = _exclusive(section, "temperature_c", "temperature_k")
    if which is None:
        return None
    if which == "temperature_c":
        return section.get_float("temperature_c") + 273.15
    return section.get_float("temperature_k")


def _medium_sigma(section, gamma, dw, wavelength):
    model = section.get_str("density_model", "calibrated").lower()
    if model == "calibrated":
        return section.get_float("sigma_eff_m2", SIGMA_EFF_DEFAULT)
    if model == "analytic":
        if section.has("sigma_eff_m2"):
            raise ConfigError("sigma_eff_m2 conflicts with density_model = analytic")
        if dw <= 0:
            raise ConfigError("density_model = analytic requires a Doppler width")
        return sigma_eff_analytic(gamma, dw, wavelength)
    raise ConfigError(f"density_model must be 'calibrated' or 'analytic', got {model!r}")


def _a0la_for(section, temperature, sigma, length):
    which = _exclusive(section, "a0_la", "nd_la_per_m2")
    if which == "a0_la":
        return section.get_float("a0_la")
    if which == "nd_la_per_m2":
        return a0La_from_column_density(section.get_float("nd_la_per_m2"), sigma)
    if temperature is not None:
        abundance = section.get_float("abundance", RB87_FRACTION)
        nd = column_density_from_temperature(temperature, length, abundance)
        return a0La_from_column_density(nd, sigma)
    return None


def _build_medium(section):
    mode = section.get_str("mode", "approx_doppler")
    if mode not in MODES:
        raise ConfigError(f"mode must be one of {MODES}, got {mode!r}")
    wavelength = section.get_float("lambda_nm", 780.0) * 1e-9
    gamma = 2 * np.pi * section.get_float("gamma_hz", 6.0e6)
    length = section.get_float("la_m", 0.05)
    mass = section.get_float("mass_amu", RB87_MASS / atomic_mass) * atomic_mass
    temperature = _resolve_temperature(section)

    if section.has("doppler_width_hz") and temperature is not None:
        raise ConfigError("doppler_width_hz and a temperature key are mutually "
                          "exclusive in [medium]")
    if section.has("doppler_width_hz"):
        dw = 2 * np.pi * section.get_float("doppler_width_hz")
    elif temperature is not None:
        dw = doppler_width(temperature, mass, wavelength)
    elif mode == "homogeneous":
        dw = 0.0
    else:
        dw = 2 * np.pi * section.get_float("doppler_width_hz", 343.0e6)

    sigma = _medium_sigma(section, gamma, dw, wavelength)
    a0_La = _a0la_for(section, temperature, sigma, length)
    if a0_La is None:
        a0_La = section.get_float("a0_la", 12.0)

    medium = MediumParams(wavelength=wavelength, gamma=gamma, a0_La=a0_La,
                          length=length, doppler_width=dw, mode=mode)
    return medium, temperature, sigma


def _build_cavity(section, medium):
    length = section.get_float("lc_m", 0.177)
    R1 = section.get_float("r1", 0.90)
    R2 = section.get_float("r2", 0.995)
    if medium.length > length:
        raise ConfigError(f"la_m = {medium.length} exceeds lc_m = {length}")
    which = _exclusive(section, "excess_loss", "finesse")
    finesse_target = None
    if which == "excess_loss":
        excess = section.get_float("excess_loss")
    else:
        finesse_target = section.get_float("finesse", 20.0)
        try:
            excess = calibrate_excess_loss(finesse_target, R1, R2)
        except ValueError as exc:
            raise ConfigError(f"key 'finesse' in section [cavity]: {exc}") from exc
    try:
        cavity = CavityParams(length=length, R1=R1, R2=R2, excess_loss=excess,
                              wavelength=medium.wavelength)
    except ValueError as exc:
        raise ConfigError(f"section [cavity]: {exc}") from exc
    return cavity, finesse_target


def _build_sweep(section, cavity):
    which = _exclusive(section, "window_fsr", "window_hz")
    if which == "window_hz":
        half = section.get_float("window_hz")
    else:
        half = section.get_float("window_fsr", 3.3) * fsr(cavity)
    if half <= 0:
        raise ConfigError("sweep window must be positive")
    step = section.get_float("step_hz", 1.0e6)
    if step <= 0:
        raise ConfigError(f"step_hz must be positive, got {step}")
    threshold = section.get_float("threshold", DEFAULT_THRESHOLD)
    if not 0.0 < threshold < 1.0:
        raise ConfigError(f"threshold must lie in (0, 1), got {threshold}")
    return (-half, half), step, threshold


def _build_ladder(section, medium_section, medium, sigma):
    which = _exclusive(section, "a0_la_list", "temperature_c_list")
    if which is None:
        raise ConfigError("section [ladder] needs a0_la_list or temperature_c_list")
    points = []
    if which == "a0_la_list":
        for value in section.get_float_list("a0_la_list"):
            med = MediumParams(wavelength=medium.wavelength, gamma=medium.gamma,
                               a0_La=value, length=medium.length,
                               doppler_width=medium.doppler_width, mode=medium.mode)
            points.append(LadderPoint(label=f"a0_La={value:g}", medium=med,
                                      a0_La=value))
    else:
        mass = medium_section.get_float("mass_amu", RB87_MASS / atomic_mass) * atomic_mass
        abundance = medium_section.get_float("abundance", RB87_FRACTION)
        for t_c in section.get_float_list("temperature_c_list"):
            t_k = t_c + 273.15
            dw = doppler_width(t_k, mass, medium.wavelength)
            nd = column_density_from_temperature(t_k, medium.length, abundance)
            a0_La = a0La_from_column_density(nd, sigma)
            med = MediumParams(wavelength=medium.wavelength, gamma=medium.gamma,
                               a0_La=a0_La, length=medium.length,
                               doppler_width=dw, mode=medium.mode)
            points.append(LadderPoint(label=f"T={t_c:g}C", medium=med,
                                      a0_La=a0_La, temperature_c=t_c))
    return tuple(points)


def _build_fit(section, cavity):
    free_text = section.get_str("free", "a0_la")
    free = tuple(t.strip().lower() for t in free_text.replace(",", " ").split() if t)
    canonical = {"a0_la": "a0_La", "doppler_width": "doppler_width",
                 "excess_loss": "excess_loss", "freq_offset": "freq_offset"}
    try:
        free = tuple(canonical[f] for f in free)
    except KeyError as exc:
        raise ConfigError(f"unknown fit parameter {exc.args[0]!r}; choose from "
                          f"{sorted(canonical)}") from None
    half_fsr = fsr(cavity) / 2.0
    bounds = {
        "a0_La": section.get_pair("a0_la_bounds", (1.0, 500.0)),
        "doppler_width": tuple(2 * np.pi * b for b in section.get_pair(
            "doppler_width_bounds_hz", (100.0e6, 1000.0e6))),
        "excess_loss": section.get_pair("excess_loss_bounds", (0.0, 0.8)),
        "freq_offset": section.get_pair("freq_offset_bounds_hz",
                                        (-half_fsr, half_fsr)),
    }
    guess = {
        "a0_La": section.get_float("a0_la_guess", 50.0),
        "doppler_width": 2 * np.pi * section.get_float("doppler_width_guess_hz", 343.0e6),
        "excess_loss": section.get_float("excess_loss_guess", 0.2),
        "freq_offset": section.get_float("freq_offset_guess_hz", 0.0),
    }
    normalize_text = section.get_str("normalize_to_max", "none").lower()
    normalize_to = None if normalize_text == "none" else float(normalize_text)
    return FitSettings(
        free=free,
        bounds={k: bounds[k] for k in free},
        guess={k: guess[k] for k in free},
        multi_start=section.get_bool("multi_start", False),
        max_iterations=section.get_int("max_iterations", 2000),
        normalize_to=normalize_to,
    )


def load_config(path) -> RunConfig:
    """Parse and validate a .cfg file into a RunConfig."""
    parser = _read_ini(path)
    defaulted: list[str] = []

    def section(name):
        raw = parser[name] if parser.has_section(name) else {}
        return _Section(name, raw, defaulted)

    medium_section = section("medium")
    try:
        medium, _temperature, sigma = _build_medium(medium_section)
        cavity, finesse_target = _build_cavity(section("cavity"), medium)
        window_hz, step_hz, threshold = _build_sweep(section("sweep"), cavity)
        ladder = None
        if parser.has_section("ladder"):
            ladder = _build_ladder(section("ladder"), medium_section, medium, sigma)
        fit = _build_fit(section("fit"), cavity) if parser.has_section("fit") else None
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(f"invalid configuration {path}: {exc}") from exc
    output_dir = section("output").get_str("dir") if parser.has_section("output") else None

    if defaulted:
        log.info("config %s: defaulted %s", path, "; ".join(defaulted))
    return RunConfig(medium=medium, cavity=cavity, window_hz=window_hz,
                     step_hz=step_hz, threshold=threshold,
                     finesse_target=finesse_target, ladder=ladder, fit=fit,
                     output_dir=output_dir)


def bundled_config_names():
    """Names of the .cfg files shipped with the package."""
    root = resources.files("modesplit") / "configs"
    return sorted(p.name[:-4] for p in root.iterdir() if p.name.endswith(".cfg"))


def bundled_config_path(name):
    """Filesystem path of a bundled config, by bare name or file name."""
    stem = name[:-4] if name.endswith(".cfg") else name
    root = resources.files("modesplit") / "configs"
    candidate = root / f"{stem}.cfg"
    if not candidate.is_file():
        raise ConfigError(
            f"no bundled config named {name!r}; available: {bundled_config_names()}")
    return Path(str(candidate))

"""Round-trip model and Airy transmission of the atom-filled standing-wave cavity.

The cavity is a plane two-mirror resonator of length Lc with the vapor column
somewhere inside it; in this 1-D model only the total round-trip phase and
loss matter, not where the cell sits.  The probe-atom detuning is the only
frequency variable: the empty cavity is taken exactly resonant with the
atomic line (the round-trip phase is anchored to a multiple of 2*pi at zero
detuning), so the reference mode index never appears explicitly and the
returned phase is relative to that anchored resonance.

Transmission is normalized to the peak transmission of the empty cavity,
which keeps every constant mirror/loss prefactor out of the result.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.constants import c

from .medium import MediumParams

__all__ = [
    "CavityParams",
    "RoundTrip",
    "round_trip",
    "transmission",
    "fsr",
    "linewidth",
    "mirror_finesse",
    "calibrate_excess_loss",
]


@dataclass(frozen=True)
class CavityParams:
    """Cavity geometry and mirrors.

    ``excess_loss`` is the extra round-trip intensity loss fraction beyond the
    mirrors (cell faces etc.); ``wavelength`` is the operating wavelength,
    recorded for reporting only since the anchored phase removes it from the
    transmission.
    """

    length: float
    R1: float
    R2: float
    excess_loss: float = 0.0
    wavelength: float = 780e-9

    def __post_init__(self):
        if self.length <= 0:
            raise ValueError(f"cavity length must be positive, got {self.length}")
        for name, R in (("R1", self.R1), ("R2", self.R2)):
            if not 0.0 < R < 1.0:
                raise ValueError(f"{name} must lie in (0, 1), got {R}")
        if not 0.0 <= self.excess_loss < 1.0:
            raise ValueError(f"excess_loss must lie in [0, 1), got {self.excess_loss}")
        if self.wavelength <= 0:
            raise ValueError(f"wavelength must be positive, got {self.wavelength}")

    @property
    def rho(self):
        """Round-trip field amplitude factor sqrt(R1*R2*(1 - excess_loss))."""
        return math.sqrt(self.R1 * self.R2 * (1.0 - self.excess_loss))

    @property
    def finesse(self):
        """pi*sqrt(rho)/(1 - rho)."""
        rho = self.rho
        return math.pi * math.sqrt(rho) / (1.0 - rho)


@dataclass(frozen=True)
class RoundTrip:
    """Unwrapped round-trip phase (rad, relative to the anchored resonance)
    and round-trip field amplitude factor."""

    phase: float | np.ndarray
    amplitude: float | np.ndarray


def _check_lengths(cavity: CavityParams, medium: MediumParams | None):
    if medium is not None and medium.length > cavity.length:
        raise ValueError(
            f"medium length {medium.length} m exceeds cavity length {cavity.length} m")


def round_trip(delta, cavity: CavityParams, medium: MediumParams | None = None):
    """Round-trip phase and amplitude at detuning ``delta`` (rad/s).

    phase = (2/c) * (delta*Lc + omega_a*(n(delta) - 1)*La)
    amplitude = rho * exp(-alpha(delta)*La)

    The field crosses the vapor twice per round trip, each pass attenuating
    the field by alpha/2, hence the single alpha*La in the exponent.  The
    dispersion prefactor uses the line-center frequency; the relative error
    against using the local probe frequency is below 1e-5 over any sweep a
    few FSR wide, and keeping it constant preserves the exact evenness of the
    transmission in the detuning.
    """
    phase, amplitude, _ = _round_trip_parts(delta, cavity, medium)
    if np.ndim(delta) == 0:
        return RoundTrip(float(phase), float(amplitude))
    return RoundTrip(phase, amplitude)


def _round_trip_parts(delta, cavity, medium):
    """(phase, amplitude, one-way attenuation) arrays for ``delta`` in rad/s."""
    _check_lengths(cavity, medium)
    delta = np.asarray(delta, dtype=float)
    if medium is None or medium.a0_La == 0.0:
        phase = (2.0 / c) * delta * cavity.length
        return phase, np.full_like(delta, cavity.rho), np.ones_like(delta)
    resp = medium.response(delta)
    attenuation = np.exp(-resp.alpha * medium.length)
    phase = (2.0 / c) * (delta * cavity.length
                         + medium.omega * resp.n_minus_1 * medium.length)
    return phase, cavity.rho * attenuation, attenuation


def transmission(delta, cavity: CavityParams, medium: MediumParams | None = None):
    """Intensity transmission at detuning ``delta`` (rad/s), normalized so the
    empty cavity peaks at exactly 1.

    T(delta) = exp(-alpha*La) * (1 - rho)^2 / |1 - amplitude*e^{i phase}|^2
    """
    phase, amplitude, attenuation = _round_trip_parts(delta, cavity, medium)
    den = (1.0 - amplitude) ** 2 + 4.0 * amplitude * np.sin(0.5 * phase) ** 2
    out = attenuation * (1.0 - cavity.rho) ** 2 / den
    return float(out) if np.ndim(delta) == 0 else out


def fsr(cavity: CavityParams):
    """Free spectral range c/(2*Lc) in Hz."""
    return c / (2.0 * cavity.length)


def linewidth(cavity: CavityParams):
    """Cavity linewidth FSR/finesse in Hz."""
    return fsr(cavity) / cavity.finesse


def mirror_finesse(R1, R2):
    """Finesse of the bare mirror pair, no excess loss."""
    rho = math.sqrt(R1 * R2)
    return math.pi * math.sqrt(rho) / (1.0 - rho)


def calibrate_excess_loss(target_finesse, R1, R2):
    """Excess round-trip intensity loss that brings the finesse down to target.

    Solves F = pi*sqrt(rho)/(1 - rho) for the round-trip amplitude rho, then
    returns 1 - rho^2/(R1*R2).  Raises when the target exceeds what the
    mirrors alone allow.
    """
    if target_finesse <= 0:
        raise ValueError(f"target finesse must be positive, got {target_finesse}")
    achievable = mirror_finesse(R1, R2)
    if target_finesse > achievable * (1.0 + 1e-12):
        raise ValueError(
            f"target finesse {target_finesse} exceeds the mirrors-only value "
            f"{achievable:.3f}")
    # F*(1 - s^2) = pi*s with s = sqrt(rho)
    s = (-math.pi + math.sqrt(math.pi ** 2 + 4.0 * target_finesse ** 2)) / (2.0 * target_finesse)
    rho = s * s
    return max(0.0, 1.0 - rho * rho / (R1 * R2))

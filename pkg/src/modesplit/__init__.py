"""Transmission spectra of a standing-wave cavity filled with hot two-level atoms.

The package models the normalized transmission of a two-mirror cavity whose
intracavity vapor adds Lorentzian, Doppler-rescaled or Voigt absorption and
dispersion to the round trip, locates the resulting multi-mode resonances,
and recovers model parameters from measured spectra.
"""

from .cavity import (CavityParams, RoundTrip, calibrate_excess_loss, fsr,
                     linewidth, mirror_finesse, round_trip, transmission)
from .fitting import FitProblem, FitResult, fit_parameters, model_values, residual
from .medium import (CALIBRATION_PAIRS, ComplexResponse, MediumParams,
                     RB87_FRACTION, RB87_MASS, SIGMA_EFF_DEFAULT,
                     a0La_from_column_density, collective_coupling_estimate,
                     column_density_from_temperature, doppler_response,
                     doppler_width, fit_sigma_eff, lorentzian_response,
                     rb_number_density, sigma_eff_analytic, voigt_response)
from .spectrum import (Branch, Peak, ResonanceRoot, Spectrum, SplittingResult,
                       avoided_crossing_map, find_peaks, measure_splitting,
                       solve_phase_resonances, sweep)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "MediumParams", "ComplexResponse", "lorentzian_response", "voigt_response",
    "doppler_response", "doppler_width", "rb_number_density",
    "column_density_from_temperature", "a0La_from_column_density",
    "sigma_eff_analytic", "fit_sigma_eff", "collective_coupling_estimate",
    "RB87_MASS", "RB87_FRACTION", "SIGMA_EFF_DEFAULT", "CALIBRATION_PAIRS",
    "CavityParams", "RoundTrip", "round_trip", "transmission", "fsr",
    "linewidth", "mirror_finesse", "calibrate_excess_loss",
    "Spectrum", "Peak", "ResonanceRoot", "Branch", "SplittingResult",
    "sweep", "find_peaks", "solve_phase_resonances", "avoided_crossing_map",
    "measure_splitting",
    "FitProblem", "FitResult", "residual", "model_values", "fit_parameters",
]

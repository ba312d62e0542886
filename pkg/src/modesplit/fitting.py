"""Recovering model parameters from an observed transmission spectrum.

The free parameters are the handful of quantities that drift with cell
temperature and alignment in practice: the optical depth, the Doppler width,
the excess round-trip loss and a rigid frequency offset of the measured scan
axis.  The residual is a plain sum of squared differences between the
forward model and the observation on the observed grid.

Sharp Airy peaks make finite-difference gradients useless, so minimization
is a bounded Nelder-Mead simplex run in coordinates normalized to the
parameter bounds.  Everything here is deterministic: the same problem always
produces the same result.

Units follow the rest of the package: ``doppler_width`` is angular (rad/s),
``freq_offset`` is in Hz because it shifts the measured grid, ``a0_La`` and
``excess_loss`` are dimensionless.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from scipy.optimize import minimize

from .cavity import CavityParams, transmission
from .medium import MediumParams
from .spectrum import TWO_PI, Spectrum

__all__ = ["FREE_PARAMS", "FitProblem", "FitResult", "model_values",
           "residual", "fit_parameters"]

FREE_PARAMS = ("a0_La", "doppler_width", "excess_loss", "freq_offset")

MAX_ITERATIONS = 2000
SIMPLEX_TOL = 1e-6  # relative to the bound span of each parameter


@dataclass(frozen=True)
class FitProblem:
    """Observed spectrum plus the parameter space to search.

    ``medium`` and ``cavity`` hold the fixed values of everything that is not
    being fitted.  ``free`` lists the fitted parameter names; ``bounds`` and
    ``guess`` map each free name to its finite [lo, hi] interval and starting
    value.
    """

    observed: Spectrum
    medium: MediumParams
    cavity: CavityParams
    free: tuple[str, ...]
    bounds: dict[str, tuple[float, float]]
    guess: dict[str, float]

    def __post_init__(self):
        if not self.free:
            raise ValueError("at least one free parameter is required")
        for name in self.free:
            if name not in FREE_PARAMS:
                raise ValueError(f"unknown fit parameter {name!r}; "
                                 f"choose from {FREE_PARAMS}")
            if name not in self.bounds:
                raise ValueError(f"missing bounds for free parameter {name!r}")
            lo, hi = self.bounds[name]
            if not (np.isfinite(lo) and np.isfinite(hi) and lo < hi):
                raise ValueError(f"bounds for {name!r} must be finite with lo < hi, "
                                 f"got ({lo}, {hi})")
            g = self.guess.get(name)
            if g is None:
                raise ValueError(f"missing initial guess for free parameter {name!r}")
            if not lo <= g <= hi:
                raise ValueError(f"guess {g} for {name!r} outside bounds ({lo}, {hi})")


@dataclass(frozen=True)
class FitResult:
    best_fit: dict[str, float]
    residual: float
    iterations: int
    converged: bool


def _apply(problem: FitProblem, params: dict):
    medium, cavity = problem.medium, problem.cavity
    med_updates = {k: params[k] for k in ("a0_La", "doppler_width") if k in params}
    if med_updates:
        medium = replace(medium, **med_updates)
    if "excess_loss" in params:
        cavity = replace(cavity, excess_loss=params["excess_loss"])
    offset = params.get("freq_offset", 0.0)
    return medium, cavity, offset


def model_values(problem: FitProblem, params: dict):
    """Forward-model transmission on the observed grid for ``params``.

    ``freq_offset`` shifts the recorded axis: the true detuning of sample i
    is grid[i] + freq_offset.
    """
    medium, cavity, offset = _apply(problem, params)
    return transmission(TWO_PI * (problem.observed.grid_hz + offset), cavity, medium)


def residual(params: dict, problem: FitProblem):
    """Sum of squared differences between model and observation."""
    diff = model_values(problem, params) - problem.observed.values
    return float(np.dot(diff, diff))


def _to_unit(problem, values):
    return np.array([(values[k] - problem.bounds[k][0])
                     / (problem.bounds[k][1] - problem.bounds[k][0])
                     for k in problem.free])


def _from_unit(problem, x):
    return {k: problem.bounds[k][0] + xi * (problem.bounds[k][1] - problem.bounds[k][0])
            for k, xi in zip(problem.free, x)}


def _minimize_from(problem: FitProblem, guess: dict, max_iterations: int):
    x0 = _to_unit(problem, guess)
    res = minimize(
        lambda x: residual(_from_unit(problem, x), problem),
        x0,
        method="Nelder-Mead",
        bounds=[(0.0, 1.0)] * len(problem.free),
        options={"xatol": SIMPLEX_TOL, "fatol": 1e-12,
                 "maxiter": max_iterations, "maxfev": 10 * max_iterations},
    )
    return res


def fit_parameters(problem: FitProblem, multi_start=False,
                   max_iterations=MAX_ITERATIONS):
    """Bounded derivative-free minimization of the fit residual.

    The simplex runs in unit coordinates, so convergence means the simplex
    diameter fell below 1e-6 of each parameter's bound span (or the
    iteration cap was hit, reported as converged=False with the best point
    found so far).  ``multi_start`` additionally seeds a0_La, when free, from
    five values spread over its bounds and keeps the best outcome; this
    guards against latching onto the wrong peak of a split spectrum.
    """
    starts = [dict(problem.guess)]
    if multi_start and "a0_La" in problem.free:
        lo, hi = problem.bounds["a0_La"]
        span = hi - lo
        for frac in (0.05, 0.275, 0.5, 0.725, 0.95):
            start = dict(problem.guess)
            start["a0_La"] = lo + frac * span
            starts.append(start)
    best = None
    for start in starts:
        res = _minimize_from(problem, start, max_iterations)
        if best is None or res.fun < best.fun:
            best = res
    params = _from_unit(problem, np.clip(best.x, 0.0, 1.0))
    return FitResult(best_fit={k: float(v) for k, v in params.items()},
                     residual=float(best.fun),
                     iterations=int(best.nit),
                     converged=bool(best.success))

import numpy as np
import pytest
from dataclasses import replace

import modesplit as ms

from conftest import medium_of_depth

# Pinned regression: depth-70 spectrum scored against depth-130 parameters.
RESIDUAL_70_VS_130 = 1.166423719301487


def synthetic(cavity, depth=70.0, step=4e6, noise=0.0, rng=None):
    fsr = ms.fsr(cavity)
    spectrum = ms.sweep((-3.3 * fsr, 3.3 * fsr), step, cavity, medium_of_depth(depth))
    values = spectrum.values
    if noise:
        values = values + rng.normal(0.0, noise, size=values.shape)
    return ms.Spectrum(grid_hz=spectrum.grid_hz, values=values)


def problem_for(cavity, observed, free=("a0_La",), guess=None, bounds=None):
    bounds = dict(bounds or {})
    guess = dict(guess or {})
    defaults = {
        "a0_La": ((1.0, 500.0), 50.0),
        "excess_loss": ((0.0, 0.8), 0.2),
        "doppler_width": ((2 * np.pi * 1e8, 2 * np.pi * 1e9), 2 * np.pi * 3e8),
        "freq_offset": ((-4e8, 4e8), 0.0),
    }
    for name in free:
        bounds.setdefault(name, defaults[name][0])
        guess.setdefault(name, defaults[name][1])
    return ms.FitProblem(observed=observed, medium=medium_of_depth(50.0),
                         cavity=cavity, free=tuple(free), bounds=bounds, guess=guess)


class TestResidual:
    def test_self_residual_is_zero(self, cavity20):
        observed = synthetic(cavity20)
        problem = problem_for(cavity20, observed)
        assert ms.residual({"a0_La": 70.0}, problem) <= 1e-20

    def test_perturbed_depth_increases_residual(self, cavity20):
        observed = synthetic(cavity20)
        problem = problem_for(cavity20, observed)
        assert ms.residual({"a0_La": 77.0}, problem) > 0.0

    def test_cross_parameter_regression(self, cavity20, window):
        observed = ms.sweep(window, 1e6, cavity20, medium_of_depth(70.0))
        problem = problem_for(cavity20, observed, guess={"a0_La": 130.0})
        assert ms.residual({"a0_La": 130.0}, problem) == pytest.approx(
            RESIDUAL_70_VS_130, rel=1e-9)


class TestFitParameters:
    def test_noiseless_single_parameter_recovery(self, cavity20):
        observed = synthetic(cavity20)
        result = ms.fit_parameters(problem_for(cavity20, observed))
        assert result.converged
        assert result.best_fit["a0_La"] == pytest.approx(70.0, rel=0.01)

    def test_noisy_two_parameter_recovery(self, cavity20):
        rng = np.random.default_rng(20260810)
        errors = []
        for _ in range(20):
            observed = synthetic(cavity20, noise=0.01, rng=rng)
            result = ms.fit_parameters(
                problem_for(cavity20, observed, free=("a0_La", "excess_loss"),
                            guess={"a0_La": 50.0, "excess_loss": 0.25}))
            errors.append(abs(result.best_fit["a0_La"] - 70.0) / 70.0)
        assert np.median(errors) <= 0.05

    def test_start_at_truth_converges_immediately(self, cavity20):
        observed = synthetic(cavity20)
        result = ms.fit_parameters(problem_for(cavity20, observed,
                                               guess={"a0_La": 70.0}))
        assert result.converged
        assert result.residual <= 1e-16
        assert result.best_fit["a0_La"] == pytest.approx(70.0, rel=1e-4)

    def test_local_optimality(self, cavity20):
        observed = synthetic(cavity20)
        problem = problem_for(cavity20, observed)
        result = ms.fit_parameters(problem)
        best = result.best_fit
        for name in problem.free:
            for sign in (-1.0, 1.0):
                nudged = dict(best)
                nudged[name] = best[name] * (1.0 + sign * 0.01)
                assert result.residual <= ms.residual(nudged, problem) + 1e-18

    def test_bounds_respected(self, cavity20):
        observed = synthetic(cavity20)
        problem = problem_for(cavity20, observed,
                              bounds={"a0_La": (1.0, 40.0)},
                              guess={"a0_La": 20.0})
        result = ms.fit_parameters(problem)
        assert 1.0 <= result.best_fit["a0_La"] <= 40.0

    def test_iteration_cap_reports_non_convergence(self, cavity20):
        observed = synthetic(cavity20)
        result = ms.fit_parameters(problem_for(cavity20, observed), max_iterations=3)
        assert not result.converged
        assert result.iterations <= 3
        assert "a0_La" in result.best_fit

    def test_reproducible(self, cavity20):
        observed = synthetic(cavity20)
        r1 = ms.fit_parameters(problem_for(cavity20, observed))
        r2 = ms.fit_parameters(problem_for(cavity20, observed))
        assert r1 == r2

    def test_multi_start_escapes_local_minimum(self, cavity20):
        observed = synthetic(cavity20)
        # From a guess on the wrong side of the local minima near 115 and 156
        # a single simplex run latches onto one of them; one of the five
        # multi-start seeds lands inside the attraction basin of the true
        # depth and wins.
        problem = problem_for(cavity20, observed,
                              bounds={"a0_La": (1.0, 200.0)},
                              guess={"a0_La": 190.0})
        single = ms.fit_parameters(problem)
        multi = ms.fit_parameters(problem, multi_start=True)
        assert multi.residual <= single.residual
        assert multi.best_fit["a0_La"] == pytest.approx(70.0, rel=0.01)

    def test_scale_robustness(self, cavity20):
        observed = synthetic(cavity20)
        problem = problem_for(cavity20, observed)
        scale = 3.7
        scaled = replace(problem,
                         observed=ms.Spectrum(grid_hz=observed.grid_hz,
                                              values=observed.values * scale))
        for depth in (50.0, 65.0, 70.0, 90.0):
            r = ms.residual({"a0_La": depth}, problem)
            model = ms.model_values(problem, {"a0_La": depth})
            r_scaled = float(np.sum((scale * model - scaled.observed.values) ** 2))
            assert r_scaled == pytest.approx(scale ** 2 * r, rel=1e-12, abs=1e-25)

    def test_freq_offset_recovery(self, cavity20):
        base = synthetic(cavity20, depth=12.0)
        shifted = ms.Spectrum(grid_hz=base.grid_hz - 37e6, values=base.values)
        problem = ms.FitProblem(observed=shifted, medium=medium_of_depth(12.0),
                                cavity=cavity20, free=("freq_offset",),
                                bounds={"freq_offset": (-2e8, 2e8)},
                                guess={"freq_offset": 0.0})
        result = ms.fit_parameters(problem)
        assert result.best_fit["freq_offset"] == pytest.approx(37e6, abs=1e5)


class TestProblemValidation:
    def test_infinite_bounds_rejected(self, cavity20):
        observed = synthetic(cavity20)
        with pytest.raises(ValueError):
            problem_for(cavity20, observed, bounds={"a0_La": (1.0, np.inf)})

    def test_guess_outside_bounds_rejected(self, cavity20):
        observed = synthetic(cavity20)
        with pytest.raises(ValueError):
            problem_for(cavity20, observed, bounds={"a0_La": (1.0, 40.0)},
                        guess={"a0_La": 100.0})

    def test_unknown_parameter_rejected(self, cavity20):
        observed = synthetic(cavity20)
        with pytest.raises(ValueError):
            ms.FitProblem(observed=observed, medium=medium_of_depth(50.0),
                          cavity=cavity20, free=("finesse",),
                          bounds={"finesse": (1.0, 2.0)}, guess={"finesse": 1.5})

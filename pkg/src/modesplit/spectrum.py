"""Sweeps, peak detection, phase-resonance roots and mode bookkeeping.

A sweep samples the normalized transmission on a uniform detuning grid.
Resonances are located twice, by independent routes: as local maxima of the
sampled transmission (what an experiment sees) and as roots of the round-trip
phase condition phase(delta) = 2*pi*m (what the model predicts).  Matching
the two gives each peak a longitudinal mode index m and a branch label, the
raw material of an avoided-crossing plot.

Detunings at this interface are plain frequencies in Hz; conversion to
angular units happens internally.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, replace

import numpy as np
from scipy.optimize import brentq
from scipy.signal import find_peaks as _local_maxima

from .cavity import CavityParams, linewidth, round_trip, transmission
from .medium import MediumParams

__all__ = [
    "Spectrum",
    "Peak",
    "ResonanceRoot",
    "Branch",
    "SplittingResult",
    "sweep",
    "find_peaks",
    "solve_phase_resonances",
    "assign_mode_indices",
    "avoided_crossing_map",
    "measure_splitting",
    "DEFAULT_THRESHOLD",
]

TWO_PI = 2.0 * np.pi

DEFAULT_THRESHOLD = 1e-3

# Mode-assignment ties closer than this are broken toward lower |m|.
TIE_HZ = 1e3


@dataclass(frozen=True)
class Spectrum:
    """Normalized transmission sampled on a uniform detuning grid (Hz)."""

    grid_hz: np.ndarray
    values: np.ndarray
    medium: MediumParams | None = None
    cavity: CavityParams | None = None

    def __post_init__(self):
        grid = np.asarray(self.grid_hz, dtype=float)
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "grid_hz", grid)
        object.__setattr__(self, "values", values)
        if grid.ndim != 1 or grid.size < 2:
            raise ValueError("grid must be a 1-D array with at least two samples")
        if grid.shape != values.shape:
            raise ValueError("grid and values must have matching shapes")
        steps = np.diff(grid)
        if np.any(steps <= 0):
            raise ValueError("grid must be strictly increasing")
        if not np.allclose(steps, steps[0], rtol=1e-6, atol=0.0):
            raise ValueError("grid must be uniform")
        if not np.all(np.isfinite(values)):
            raise ValueError("values must be finite")

    @property
    def step_hz(self):
        return float(self.grid_hz[1] - self.grid_hz[0])


@dataclass(frozen=True)
class Peak:
    """Detected transmission peak.

    ``fwhm_hz`` is NaN when a half-height crossing is not reachable on a
    monotone flank inside the sweep window.  ``mode_index`` stays None until
    the peak is matched to a phase root; ``ambiguous`` marks peaks with more
    than one root inside the matching radius.
    """

    position_hz: float
    height: float
    fwhm_hz: float
    mode_index: int | None = None
    branch: str = "unsplit"
    ambiguous: bool = False


@dataclass(frozen=True)
class ResonanceRoot:
    """Solution of phase(delta) = 2*pi*m, with the local transmission.

    ``buried`` flags roots whose transmission falls below the detection
    threshold; they are kept because the mode bookkeeping needs them near
    line center where absorption swallows the peak.
    """

    m: int
    position_hz: float
    transmission: float
    buried: bool


@dataclass(frozen=True)
class Branch:
    """One branch of mode m in the avoided-crossing map.

    ``position_hz`` is the phase-root position (the model resonance);
    ``peak_position_hz`` and ``height`` come from the matched detected peak.
    """

    m: int
    position_hz: float
    peak_position_hz: float
    height: float
    label: str


@dataclass(frozen=True)
class SplittingResult:
    split: bool
    g_sqrt_n_hz: float | None
    superstrong: bool


def sweep(window_hz, step_hz, cavity: CavityParams, medium: MediumParams | None = None):
    """Evaluate transmission on a uniform grid over ``window_hz`` = (lo, hi).

    A step above one tenth of the cavity linewidth under-resolves the peaks
    and triggers a warning.
    """
    lo, hi = (float(window_hz[0]), float(window_hz[1]))
    if not hi > lo:
        raise ValueError(f"empty sweep window ({lo}, {hi})")
    if step_hz <= 0:
        raise ValueError(f"sweep step must be positive, got {step_hz}")
    kappa = linewidth(cavity)
    if step_hz > kappa / 10.0:
        warnings.warn(
            f"sweep step {step_hz:.3g} Hz exceeds kappa/10 = {kappa / 10:.3g} Hz; "
            "peaks may be under-resolved", stacklevel=2)
    n = int(round((hi - lo) / step_hz)) + 1
    grid = lo + step_hz * np.arange(n)
    values = transmission(TWO_PI * grid, cavity, medium)
    return Spectrum(grid_hz=grid, values=values, medium=medium, cavity=cavity)


def _parabolic_vertex(y_left, y_mid, y_right):
    """Vertex offset (in grid steps, relative to the middle sample) and value."""
    curv = y_left - 2.0 * y_mid + y_right
    if curv >= 0.0:
        return 0.0, y_mid
    offset = 0.5 * (y_left - y_right) / curv
    value = y_mid - 0.25 * (y_left - y_right) * offset
    return offset, value


def _half_crossing(grid, values, i_peak, half, direction):
    """Interpolated detuning where the flank of peak ``i_peak`` crosses ``half``.

    Walks outward while the samples keep descending; returns NaN when the
    flank starts rising again (overlap with a neighbour) or the window ends
    before the crossing.
    """
    i = i_peak
    while True:
        j = i + direction
        if j < 0 or j >= len(values):
            return np.nan
        if values[j] >= values[i] and values[j] > half:
            return np.nan
        if values[j] <= half:
            frac = (values[i] - half) / (values[i] - values[j])
            return grid[i] + frac * (grid[j] - grid[i])
        i = j


def find_peaks(spectrum: Spectrum, threshold=DEFAULT_THRESHOLD):
    """Local maxima above ``threshold``, refined and measured.

    Positions and heights are refined by a three-point parabola; the FWHM is
    read off the half-height crossings of the sampled curve.  Peaks come back
    sorted by position.
    """
    if not 0.0 < threshold < 1.0:
        raise ValueError(f"threshold must lie in (0, 1), got {threshold}")
    grid, values = spectrum.grid_hz, spectrum.values
    idx, _ = _local_maxima(values, height=threshold)
    peaks = []
    step = spectrum.step_hz
    for i in idx:
        if i == 0 or i == len(values) - 1:
            continue
        offset, height = _parabolic_vertex(values[i - 1], values[i], values[i + 1])
        position = grid[i] + offset * step
        half = height / 2.0
        left = _half_crossing(grid, values, i, half, -1)
        right = _half_crossing(grid, values, i, half, +1)
        fwhm = right - left if np.isfinite(left) and np.isfinite(right) else np.nan
        peaks.append(Peak(position_hz=float(position), height=float(height),
                          fwhm_hz=float(fwhm)))
    peaks.sort(key=lambda p: p.position_hz)
    return peaks


def _phase_relative(delta, cavity, medium, m):
    return round_trip(delta, cavity, medium).phase - TWO_PI * m


def solve_phase_resonances(m_range, cavity: CavityParams, medium: MediumParams | None,
                           window_hz, scan_step_hz=0.25e6,
                           threshold=DEFAULT_THRESHOLD):
    """All roots of phase(delta) = 2*pi*m inside ``window_hz``, for each m in
    the inclusive range ``m_range`` = (m_lo, m_hi).

    Roots are bracketed by sign changes of the phase residual on a scan grid
    of ``scan_step_hz`` and polished by Brent's method well past the 1 kHz
    contract, so the phase residual at the returned position is far below
    1e-9 rad.  Each root carries the local transmission; roots below
    ``threshold`` are flagged buried rather than dropped.
    """
    m_lo, m_hi = int(m_range[0]), int(m_range[1])
    if m_hi < m_lo:
        raise ValueError(f"empty mode range {m_range}")
    lo, hi = float(window_hz[0]), float(window_hz[1])
    n = int(round((hi - lo) / scan_step_hz)) + 1
    grid = lo + scan_step_hz * np.arange(n)
    phase = round_trip(TWO_PI * grid, cavity, medium).phase
    roots = []
    for m in range(m_lo, m_hi + 1):
        f = phase - TWO_PI * m
        positions = []
        exact = np.flatnonzero(f == 0.0)
        positions.extend(grid[exact])
        sign = np.sign(f)
        crossings = np.flatnonzero((sign[:-1] * sign[1:]) < 0)
        for i in crossings:
            root = brentq(
                lambda d: _phase_relative(TWO_PI * d, cavity, medium, m),
                grid[i], grid[i + 1], xtol=1e-6, rtol=8.9e-16)
            positions.append(root)
        positions.sort()
        deduped = []
        for p in positions:
            if not deduped or p - deduped[-1] > 1.0:
                deduped.append(p)
        for p in deduped:
            t = transmission(TWO_PI * p, cavity, medium)
            roots.append(ResonanceRoot(m=m, position_hz=float(p), transmission=float(t),
                                       buried=bool(t < threshold)))
    roots.sort(key=lambda r: (r.m, r.position_hz))
    return roots


def assign_mode_indices(peaks, roots, kappa_hz):
    """Match each peak to the nearest phase root within ``kappa_hz``.

    Exact distance ties (within 1 kHz) go to the lower |m|; peaks with more
    than one candidate root inside the radius are flagged ambiguous.  Returns
    annotated copies of the peaks.
    """
    if not roots:
        return [replace(p) for p in peaks]
    out = []
    for p in peaks:
        dists = [(abs(p.position_hz - r.position_hz), r) for r in roots]
        d_min = min(d for d, _ in dists)
        if d_min >= kappa_hz:
            out.append(replace(p, mode_index=None, branch="unsplit"))
            continue
        candidates = [r for d, r in dists if d - d_min <= TIE_HZ]
        best = min(candidates, key=lambda r: (abs(r.m), r.m))
        in_radius = sum(1 for d, _ in dists if d < kappa_hz)
        out.append(replace(p, mode_index=best.m, ambiguous=in_radius > 1))
    return out


def avoided_crossing_map(peaks, roots, kappa_hz):
    """Branch positions per longitudinal mode index, for crossing plots.

    Each detected peak is assigned to the m of its nearest phase root
    (within ``kappa_hz``); for every m the matched root positions are listed
    with the peak heights, labelled lower/upper when the mode carries two or
    more branches.  Returns (annotated peaks, {m: [Branch, ...]}).
    """
    assigned = assign_mode_indices(peaks, roots, kappa_hz)
    root_lookup = {}
    for r in roots:
        root_lookup.setdefault(r.m, []).append(r)
    branches: dict[int, list[Branch]] = {}
    by_mode: dict[int, list[Peak]] = {}
    for p in assigned:
        if p.mode_index is not None:
            by_mode.setdefault(p.mode_index, []).append(p)
    relabeled = {id(p): p for p in assigned}
    for m, plist in sorted(by_mode.items()):
        plist.sort(key=lambda p: p.position_hz)
        labels = ["unsplit"] * len(plist)
        if len(plist) >= 2:
            labels[0] = "lower"
            labels[-1] = "upper"
        entries = []
        for p, label in zip(plist, labels):
            nearest = min(root_lookup.get(m, []),
                          key=lambda r: abs(r.position_hz - p.position_hz),
                          default=None)
            root_pos = nearest.position_hz if nearest is not None else p.position_hz
            entries.append(Branch(m=m, position_hz=root_pos,
                                  peak_position_hz=p.position_hz,
                                  height=p.height, label=label))
            relabeled[id(p)] = replace(p, branch=label)
        branches[m] = entries
    return [relabeled[id(p)] for p in assigned], branches


_NOT_SPLIT = SplittingResult(split=False, g_sqrt_n_hz=None, superstrong=False)


def measure_splitting(peaks, fsr_hz, kappa_hz):
    """Half the splitting of the central mode pair; the collective coupling.

    When the peaks carry mode assignments, only the m = 0 branches count:
    weak inner structure matched to neighbouring modes must not masquerade as
    the central pair.  Unassigned peak lists fall back to the innermost pair
    straddling zero detuning.  A peak sitting within kappa/2 of zero means
    the central mode never split; a one-sided or empty pool likewise returns
    the not-split result.  The superstrong flag compares the half-splitting
    against the free spectral range.
    """
    central = [p for p in peaks if p.mode_index == 0]
    if central:
        pool = central
    elif any(p.mode_index is not None for p in peaks):
        return _NOT_SPLIT
    else:
        pool = list(peaks)
    for p in pool:
        if abs(p.position_hz) < kappa_hz / 2.0:
            return _NOT_SPLIT
    below = [p.position_hz for p in pool if p.position_hz < 0]
    above = [p.position_hz for p in pool if p.position_hz > 0]
    if not below or not above:
        return _NOT_SPLIT
    g = 0.5 * (min(above) - max(below))
    return SplittingResult(split=True, g_sqrt_n_hz=float(g),
                           superstrong=bool(g >= fsr_hz))

"""Figure rendering for the report files.

Everything is drawn with the Agg backend and saved as SVG next to the
delimited output.  Plots are presentation only; the files must merely be
valid, self-contained vector documents with no embedded timestamp, so saving
strips the date metadata and pins the SVG id hash salt.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)
import numpy as np  # noqa: E402

from .cavity import fsr  # noqa: E402
from .spectrum import sweep  # noqa: E402

__all__ = ["save_spectrum_svg", "save_crossing_svg"]

plt.rcParams["svg.hashsalt"] = "modesplit"

_SAVE_KWARGS = {"format": "svg", "metadata": {"Date": None}}


def _finish(fig, path):
    fig.tight_layout()
    fig.savefig(path, **_SAVE_KWARGS)
    plt.close(fig)


def save_spectrum_svg(path, spectrum, peaks, show_empty=True):
    """Transmission vs detuning with detected peaks marked.

    The empty-cavity comb is drawn dashed for comparison when the spectrum
    carries its cavity parameters.
    """
    fig, ax = plt.subplots(figsize=(8.0, 4.5))
    x = spectrum.grid_hz / 1e6
    with_atoms = spectrum.medium is not None and spectrum.medium.a0_La > 0
    if show_empty and spectrum.cavity is not None and with_atoms:
        empty = sweep((spectrum.grid_hz[0], spectrum.grid_hz[-1]),
                      spectrum.step_hz, spectrum.cavity, None)
        ax.plot(empty.grid_hz / 1e6, empty.values, "--", color="tab:blue",
                linewidth=0.8, alpha=0.7, label="empty cavity")
    ax.plot(x, spectrum.values, color="tab:red", linewidth=1.0,
            label="with atoms" if with_atoms else "empty cavity")
    if peaks:
        ax.plot([p.position_hz / 1e6 for p in peaks], [p.height for p in peaks],
                "k.", markersize=5, label="peaks")
        for p in peaks:
            if p.mode_index is not None:
                ax.annotate(str(p.mode_index), (p.position_hz / 1e6, p.height),
                            textcoords="offset points", xytext=(0, 4),
                            ha="center", fontsize=7)
    ax.set_xlabel("detuning (MHz)")
    ax.set_ylabel("normalized transmission")
    ax.set_ylim(bottom=0.0)
    ax.legend(loc="upper right", fontsize=8)
    _finish(fig, path)


def save_crossing_svg(path, points, cavity):
    """Branch position vs mode index, one panel per ladder point.

    ``points`` is a list of (label, {m: [Branch, ...]}) pairs; the diagonal of
    bare cavity resonances is drawn for reference.
    """
    n = max(len(points), 1)
    fig, axes = plt.subplots(n, 1, figsize=(6.0, 2.6 * n), sharex=True, squeeze=False)
    fsr_mhz = fsr(cavity) / 1e6
    for ax, (label, branches) in zip(axes[:, 0], points):
        ms = sorted(branches)
        if ms:
            span = np.arange(min(ms) - 1, max(ms) + 2)
            ax.plot(span, span * fsr_mhz, ":", color="gray", linewidth=0.8,
                    label="bare cavity")
        for m in ms:
            for b in branches[m]:
                marker = {"lower": "v", "upper": "^"}.get(b.label, "o")
                ax.plot([m], [b.position_hz / 1e6], marker, color="tab:red",
                        markersize=5)
        ax.set_ylabel("position (MHz)")
        ax.set_title(label, fontsize=9)
        ax.legend(loc="upper left", fontsize=7)
    axes[-1, 0].set_xlabel("mode index m")
    _finish(fig, path)

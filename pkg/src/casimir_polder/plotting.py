"""Figures for sweep and crossover output.

matplotlib is an optional dependency and is imported only when a figure is
requested; the numerical package does not need it.
"""
from __future__ import annotations

import math
from itertools import groupby

import numpy as np

from .constants import BOLTZMANN

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0

STYLE = {
    "font.size": 9,
    "axes.labelsize": 9,
    "legend.fontsize": 7,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "lines.linewidth": 1.2,
    "savefig.dpi": 150,
}


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def new_figure(width=5.0, nrows=1):
    plt = _pyplot()
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(nrows, 1, figsize=(width, width * GOLDEN * nrows), squeeze=False)
    return fig, ax[:, 0]


def _symlog_threshold(values):
    finite = np.abs(np.asarray(values, dtype=float))
    finite = finite[np.isfinite(finite) & (finite > 0)]
    return float(finite.min()) if finite.size else 1.0


def _symlog_axis(ax, values):
    thresh = _symlog_threshold(values)
    ax.set_yscale("symlog", linthresh=thresh, linscale=0.5)
    limits = ax.get_ylim()
    ax.set_yticks([t for t in ax.get_yticks() if t == 0 or abs(t) >= 100 * thresh])
    ax.set_ylim(limits)
    ax.axhline(0.0, color="0.6", lw=0.6)


def plot_energy_curves(rows, path):
    """One panel per regime; F(z) on a symmetric-log axis so both signs show.

    ``rows`` are the typed records of a sweep CSV (see ``cli.read_sweep_csv``).
    """
    plt = _pyplot()
    key = lambda r: r["regime"]
    regimes = [(k, list(g)) for k, g in groupby(sorted(rows, key=key), key=key)]
    with plt.rc_context(STYLE):
        fig, axes = new_figure(nrows=max(len(regimes), 1))
        for ax, (regime, group) in zip(axes, regimes):
            series = {}
            for r in group:
                series.setdefault((r["atom"], r["material"]), []).append((r["z"], r["F"]))
            for (atom, material), pts in series.items():
                z, F = np.array(sorted(pts)).T
                ax.plot(z * 1e9, F, label=f"{atom} / {material}")
            ax.set_xscale("log")
            _symlog_axis(ax, [r["F"] for r in group])
            ax.set_xlabel("z (nm)")
            ax.set_ylabel(f"F ({group[0]['unit']})")
            ax.set_title(regime)
            ax.legend(frameon=False)
        fig.tight_layout()
        fig.savefig(path)
    plt.close(fig)


def plot_crossover(scans, T, path):
    """Scan curves in units of k_B T with refined roots marked."""
    plt = _pyplot()
    with plt.rc_context(STYLE):
        fig, (ax,) = new_figure()
        kT = BOLTZMANN * T
        for entry, curve in scans:
            (line,) = ax.plot(curve.z * 1e9, curve.energy / kT, label=f"{entry['atom']} / {entry['medium']}")
            for root in entry["roots_m"]:
                ax.axvline(root * 1e9, color=line.get_color(), ls="--", lw=0.8)
        ax.set_xscale("log")
        values = np.concatenate([c.energy / kT for _, c in scans]) if scans else np.ones(1)
        _symlog_axis(ax, values)
        ax.set_xlabel("z (nm)")
        ax.set_ylabel("F / k_B T (retarded)")
        ax.legend(frameon=False)
        fig.tight_layout()
        fig.savefig(path)
    plt.close(fig)


def plot_spectra(models, xi, path):
    """eps(i xi) of several dielectric models on a log frequency axis."""
    from .materials import evaluate

    plt = _pyplot()
    with plt.rc_context(STYLE):
        fig, (ax,) = new_figure()
        for m in models:
            ax.plot(xi, evaluate(m, xi), label=m.name)
        ax.set_xscale("log")
        ax.set_yscale("log")
        ax.set_xlabel("xi (rad/s)")
        ax.set_ylabel("eps(i xi)")
        ax.legend(frameon=False)
        fig.tight_layout()
        fig.savefig(path)
    plt.close(fig)

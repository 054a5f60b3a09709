"""Optional PNG figures for the ``--figures`` report path (needs matplotlib)."""

from __future__ import annotations

import json

import numpy as np

from .errors import CMCFluxError


def _pyplot():
    try:
        import matplotlib
    except ImportError as exc:
        raise CMCFluxError("figures need matplotlib: pip install 'artifact[plot]'") from exc
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def _stamp(fig, config):
    if config:
        fig.text(0.01, 0.005, json.dumps(config, sort_keys=True)[:180], fontsize=5, color="0.4")


def plot_curve(curve, path, config=None):
    plt = _pyplot()
    fig, (a, b) = plt.subplots(1, 2, figsize=(9, 4))
    a.plot(curve.gamma.real, curve.gamma.imag, lw=1.2)
    a.plot([0], [0], "k+")
    a.set_aspect("equal")
    a.set_title("generating curve")
    b.semilogy(curve.s, np.maximum(curve.residuals, 1e-18), lw=0.8)
    b.set_xlabel("s")
    b.set_title("first-integral residual")
    _stamp(fig, config)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def plot_flux(report, path, config=None):
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(6, 4))
    f = report.fluxes
    ax.plot(np.arange(len(f)), f, "o-", ms=3, label="flux")
    cf = [s.closed_form for s in report.samples]
    if all(c is not None for c in cf):
        ax.plot(np.arange(len(cf)), cf, "x", label="closed form")
    ax.set_xlabel("cap index")
    ax.set_title(f"flux, spread {report.max_spread:.2e}")
    ax.legend()
    _stamp(fig, config)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def plot_phase(portrait, path, config=None, trajectory=None):
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(5, 5))
    ax.contour(portrait.x, portrait.y, portrait.F, levels=20, linewidths=0.4, colors="0.6")
    for level, segs in sorted(portrait.levels.items()):
        for k, seg in enumerate(segs):
            ax.plot(seg[:, 0], seg[:, 1], lw=1.2, label=f"F = {level:g}" if k == 0 else None)
    if trajectory is not None:
        ax.plot(trajectory.k, trajectory.kd, "k--", lw=0.8, label="trajectory")
    ax.axhline(0, color="0.3", lw=0.4)
    ax.set_xlabel("k")
    ax.set_ylabel("dk/dt")
    if portrait.levels or trajectory is not None:
        ax.legend(fontsize=7)
    _stamp(fig, config)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)

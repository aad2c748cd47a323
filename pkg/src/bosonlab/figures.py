"""Figure rendering for the report stage.

Everything is drawn from the same arrays that land in plotdata/*.csv, so
the figures are a convenience view, not an independent computation.  The
Agg backend is forced and PNG metadata is stripped so that rerunning an
identical configuration reproduces the files byte for byte.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

_SAVE = dict(dpi=100, metadata={"Software": None})


def _finish(fig, path):
    fig.tight_layout()
    fig.savefig(path, **_SAVE)
    plt.close(fig)


def q_profile_figure(r, q, path):
    fig, ax = plt.subplots(figsize=(5, 3.4))
    ax.plot(r, q, lw=1.2)
    ax.set_xlabel("r")
    ax.set_ylabel("Q(r)")
    ax.set_xlim(0, min(40.0, r[-1]))
    _finish(fig, path)


def q_loglog_figure(r, q, slope, intercept, window, path):
    fig, ax = plt.subplots(figsize=(5, 3.4))
    pos = q > 0
    ax.loglog(r[pos], q[pos], lw=1.2, label="Q")
    xs = np.array(window)
    ax.loglog(xs, np.exp(intercept) * xs**slope, "--", lw=1.0,
              label=f"slope {slope:.2f}")
    ax.set_xlabel("r")
    ax.set_ylabel("Q(r)")
    ax.legend(frameon=False)
    _finish(fig, path)


def q_fourier_figure(rho, qhat, slope, intercept, path):
    fig, ax = plt.subplots(figsize=(5, 3.4))
    pos = qhat > 0
    ax.semilogy(rho[pos], qhat[pos], lw=1.2, label="Q hat")
    xs = np.linspace(rho[0], rho[-1], 64)
    ax.semilogy(xs, np.exp(intercept + slope * xs), "--", lw=1.0,
                label=f"slope {slope:.3f}")
    ax.set_xlabel("rho")
    ax.set_ylabel("Q hat")
    ax.set_ylim(bottom=max(1e-18, float(np.min(qhat[pos])) * 0.5))
    ax.legend(frameon=False)
    _finish(fig, path)


def potentials_figure(r, V, Phi, path):
    fig, ax = plt.subplots(figsize=(5, 3.4))
    ax.plot(r, V, lw=1.2, label="V")
    ax.plot(r, Phi, lw=1.2, label="Phi")
    ax.set_xlabel("r")
    ax.set_xlim(0, min(60.0, r[-1]))
    ax.legend(frameon=False)
    _finish(fig, path)


def spectrum_figure(ladders, path):
    """ladders: dict l -> eigenvalue array."""
    fig, ax = plt.subplots(figsize=(5, 3.4))
    for ell in sorted(ladders):
        vals = ladders[ell]
        ax.plot([ell] * len(vals), vals, "_", ms=18, mew=2)
    ax.axhline(0.0, color="0.6", lw=0.8)
    ax.set_xticks(sorted(ladders))
    ax.set_xlabel("sector l")
    ax.set_ylabel("eigenvalue")
    _finish(fig, path)


def extension_figure(quotients, path):
    fig, ax = plt.subplots(figsize=(5, 3.4))
    ax.hist(quotients, bins=12)
    ax.set_xlabel("Rayleigh quotient")
    ax.set_ylabel("count")
    _finish(fig, path)

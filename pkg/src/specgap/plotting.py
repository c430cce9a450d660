"""Figures rendered next to the CSV outputs. PNG bytes are returned, not written."""

from __future__ import annotations

import io

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .trigpoly import circle_zeros, evaluate  # noqa: E402

RC = {"font.size": 10, "axes.grid": True, "grid.alpha": 0.3, "figure.dpi": 100,
      "svg.hashsalt": "specgap"}


def _png(fig) -> bytes:
    buf = io.BytesIO()
    fig.savefig(buf, format="png", metadata={"Software": None}, bbox_inches="tight")
    plt.close(fig)
    return buf.getvalue()


def plot_extremal(e, poly, n: int = 2000) -> bytes:
    """The construction over one period with its zero grid and the window [0, a]."""
    with plt.rc_context(RC):
        fig, ax = plt.subplots(figsize=(7, 3.2))
        t = np.arange(n) / n
        ax.plot(t, evaluate(poly, t), lw=1.2, color="C0")
        a = float(e.a)
        ax.axvspan(0.0, a, color="C2", alpha=0.12, label=f"[0, a], a = {e.a}")
        zs = circle_zeros(poly).angles
        ax.plot(zs, np.zeros(len(zs)), "o", ms=4, color="C3", label="zeros")
        ax.axhline(0.0, color="k", lw=0.6)
        p = e.params
        ax.set_title(f"N={p.N}, K={p.K}, b={p.b}")
        ax.set_xlabel("t")
        ax.set_xlim(0.0, 1.0)
        ax.legend(loc="upper right", fontsize=8)
        return _png(fig)


def plot_experiment(rows) -> bytes:
    """Estimated supremal gap against the ball bound, one marker per spectrum."""
    with plt.rc_context(RC):
        fig, ax = plt.subplots(figsize=(6, 3.6))
        x = np.arange(len(rows))
        D = [r["D"] for r in rows]
        est = [r.get("M_estimate") if r.get("M_estimate") is not None else np.nan for r in rows]
        ax.plot(x, D, "s-", label="D(S)")
        ax.plot(x, est, "o-", label="search estimate")
        closed = [r.get("M_closed_float") if r.get("M_closed_float") is not None else np.nan
                  for r in rows]
        if not np.all(np.isnan(closed)):
            ax.plot(x, closed, "x", ms=8, label="closed form")
        ax.set_xticks(x)
        ax.set_xticklabels([r["spectrum"] for r in rows], rotation=45, ha="right", fontsize=7)
        ax.set_ylabel("arc length")
        ax.legend(fontsize=8)
        return _png(fig)

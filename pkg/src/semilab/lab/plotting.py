"""SVG figures for reports (matplotlib, Agg backend, byte-stable output)."""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .io import atomic_write_text  # noqa: E402

_STYLE = {"svg.hashsalt": "semilab", "svg.fonttype": "path", "figure.figsize": (5.5, 4.0), "font.size": 9}


def _save(fig, path) -> Path:
    import io

    buf = io.StringIO()
    fig.savefig(buf, format="svg", metadata={"Date": None, "Creator": None})
    plt.close(fig)
    return atomic_write_text(path, buf.getvalue())


def _positive(x, y):
    x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
    ok = np.isfinite(x) & np.isfinite(y) & (x > 0) & (y > 0)
    return x[ok], y[ok]


def error_vs_lambda(path, lambdas: Sequence[float], series: dict, title: str = "", ylabel: str = "error") -> Path:
    """Log-log plot of error series against -λ."""
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots()
        for label, err in series.items():
            x, y = _positive(-np.asarray(lambdas, dtype=float), err)
            if x.size:
                ax.loglog(x, y, "o-", label=label)
        ax.set_xlabel("-λ")
        ax.set_ylabel(ylabel)
        ax.set_title(title)
        ax.grid(True, which="both", lw=0.3)
        if series:
            ax.legend()
        return _save(fig, path)


def branch_diagram(path, lambdas: Sequence[float], min_u: Sequence[float], title: str = "",
                   t0: float | None = None) -> Path:
    """min u against -λ on a logarithmic λ axis."""
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots()
        ax.semilogx(-np.asarray(lambdas, dtype=float), min_u, "o-")
        if t0 is not None and np.isfinite(t0):
            ax.axhline(t0, color="k", lw=0.6, ls="--", label="t0")
            ax.legend()
        ax.set_xlabel("-λ")
        ax.set_ylabel("min u")
        ax.set_title(title)
        ax.grid(True, which="both", lw=0.3)
        return _save(fig, path)


def series_plot(path, x, series: dict, title: str = "", xlabel: str = "x", ylabel: str = "",
                logx: bool = False, logy: bool = False) -> Path:
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots()
        for label, y in series.items():
            ax.plot(x, y, label=label)
        if logx:
            ax.set_xscale("log")
        if logy:
            ax.set_yscale("log")
        ax.set_xlabel(xlabel)
        ax.set_ylabel(ylabel)
        ax.set_title(title)
        ax.grid(True, which="both", lw=0.3)
        if series:
            ax.legend()
        return _save(fig, path)

"""Figure rendering for sweep output: heatmaps for surfaces, lines for curves.

Backend is forced to Agg so rendering works headless; figures land next
to the delimited output as PNG files.
"""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .sweep import SweepRow, SweepSpec, value_columns

__all__ = ["render_sweep_figure"]

_GOLDEN = (1.0 + math.sqrt(5.0)) / 2.0


def _axis_label(group: str) -> str:
    return {
        "e_over_m": "E / m",
        "e_over_omega": "E / Ω",
        "m_over_omega": "m / Ω",
        "r_omega": "R Ω",
        "r_over_compton": "R / λ_C",
        "lam_omega": "λ Ω",
        "lam_over_compton": "λ / λ_C",
        "beta_omega": "β Ω",
    }.get(group, group)


def render_sweep_figure(spec: SweepSpec, rows: list[SweepRow], path: str) -> None:
    """Render a sweep result to ``path``; NaN cells (failed points) stay blank."""
    columns = value_columns(spec.quantity)
    width = 6.0
    fig, axes = plt.subplots(
        1, len(columns), figsize=(width * len(columns), width / _GOLDEN), squeeze=False
    )
    values = {
        column: np.array(
            [row.values[column] if row.values is not None else math.nan for row in rows]
        )
        for column in columns
    }
    if len(spec.axes) == 1:
        xs = spec.axes[0].values()
        for ax, column in zip(axes[0], columns):
            ax.plot(xs, values[column], lw=1.5)
            if spec.axes[0].scale == "log":
                ax.set_xscale("log")
            ax.set_xlabel(_axis_label(spec.axes[0].group))
            ax.set_ylabel(column)
            ax.grid(alpha=0.3)
    else:
        xs = spec.axes[0].values()
        ys = spec.axes[1].values()
        for ax, column in zip(axes[0], columns):
            grid = values[column].reshape(len(xs), len(ys))
            mesh = ax.pcolormesh(xs, ys, grid.T, shading="nearest", cmap="viridis")
            if spec.axes[0].scale == "log":
                ax.set_xscale("log")
            if spec.axes[1].scale == "log":
                ax.set_yscale("log")
            ax.set_xlabel(_axis_label(spec.axes[0].group))
            ax.set_ylabel(_axis_label(spec.axes[1].group))
            fig.colorbar(mesh, ax=ax, label=column)
    fig.suptitle(spec.quantity)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)

"""Figure rendering: bifurcation heatmaps and distribution line plots."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .io import FormatError, read_bifurcation_csv, read_distribution_csv

# Fixed style so identical inputs give identical bytes.
_DPI = 150
_PNG_METADATA = {"Software": "deffuant-plots"}


@dataclass
class FigureSpec:
    """What to render and where to put it."""

    inputs: list[str]
    output: str
    x_label: str = ""
    y_label: str = ""
    grid: tuple[int, int] | None = None  # (rows, cols) panel layout
    dpi: int = _DPI
    labels: list[str] = field(default_factory=list)  # per-input legend labels


def _save(fig, output: str, dpi: int) -> None:
    Path(output).parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(output, dpi=dpi, metadata=_PNG_METADATA)
    plt.close(fig)


def plot_bifurcation(spec: FigureSpec) -> None:
    """Heatmap of a bifurcation CSV: tolerance on x, opinion on y.

    The color scale is linear over the full density range of the figure.
    """
    if len(spec.inputs) != 1:
        raise FormatError("bifurcation plot takes exactly one CSV")
    centers, d_values, densities = read_bifurcation_csv(spec.inputs[0])

    # cell edges for pcolormesh; a single column gets a nominal width
    if len(d_values) > 1:
        steps = np.diff(d_values)
        d_edges = np.concatenate((
            [d_values[0] - steps[0] / 2],
            d_values[:-1] + steps / 2,
            [d_values[-1] + steps[-1] / 2],
        ))
    else:
        d_edges = np.array([d_values[0] - 0.0025, d_values[0] + 0.0025])
    half_bin = (centers[1] - centers[0]) / 2 if len(centers) > 1 else 0.5
    opinion_edges = np.concatenate((centers - half_bin, [centers[-1] + half_bin]))

    fig, ax = plt.subplots(figsize=(7.0, 4.5))
    mesh = ax.pcolormesh(d_edges, opinion_edges, densities, cmap="jet",
                         vmin=0.0, vmax=float(densities.max()) or 1.0)
    ax.set_xlabel(spec.x_label or "opinion tolerance d")
    ax.set_ylabel(spec.y_label or "opinion")
    fig.colorbar(mesh, ax=ax, label="density")
    fig.tight_layout()
    _save(fig, spec.output, spec.dpi)


def plot_distribution(spec: FigureSpec) -> None:
    """Line plots of one or more distribution CSVs.

    Without a grid the curves are overlaid on one axes; with ``grid=(R, C)``
    each CSV gets its own panel.  All inputs must share the bin grid, and
    panels share the y scale so heights stay comparable.
    """
    if not spec.inputs:
        raise FormatError("distribution plot needs at least one CSV")
    curves = []
    reference = None
    for path in spec.inputs:
        centers, density = read_distribution_csv(path)
        if reference is None:
            reference = centers
        elif len(centers) != len(reference) or not np.allclose(
            centers, reference, atol=1e-12
        ):
            raise FormatError(
                f"{path}: bin grid differs from {spec.inputs[0]}"
            )
        curves.append(density)
    labels = spec.labels or [Path(p).stem for p in spec.inputs]
    y_max = 1.05 * max(float(c.max()) for c in curves) or 1.0

    if spec.grid is None:
        fig, ax = plt.subplots(figsize=(7.0, 4.5))
        for density, label in zip(curves, labels):
            ax.plot(reference, density, linewidth=1.2, label=label)
        ax.set_xlim(0.0, 1.0)
        ax.set_ylim(0.0, y_max)
        ax.set_xlabel(spec.x_label or "opinion")
        ax.set_ylabel(spec.y_label or "density")
        if len(curves) > 1:
            ax.legend(fontsize=8)
        fig.tight_layout()
        _save(fig, spec.output, spec.dpi)
        return

    rows, cols = spec.grid
    if rows * cols < len(curves):
        raise FormatError(
            f"grid {rows}x{cols} too small for {len(curves)} inputs"
        )
    fig, axes = plt.subplots(rows, cols, figsize=(3.0 * cols, 2.2 * rows),
                             squeeze=False, sharex=True, sharey=True)
    for index, (density, label) in enumerate(zip(curves, labels)):
        ax = axes[index // cols][index % cols]
        ax.plot(reference, density, linewidth=1.0)
        ax.set_xlim(0.0, 1.0)
        ax.set_ylim(0.0, y_max)
        ax.set_title(label, fontsize=8)
    for index in range(len(curves), rows * cols):
        axes[index // cols][index % cols].set_axis_off()
    for ax in axes[-1]:
        ax.set_xlabel(spec.x_label or "opinion", fontsize=8)
    for row in axes:
        row[0].set_ylabel(spec.y_label or "density", fontsize=8)
    fig.tight_layout()
    _save(fig, spec.output, spec.dpi)

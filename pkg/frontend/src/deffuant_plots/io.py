"""Readers for the engine's CSV contracts."""

from __future__ import annotations

from pathlib import Path

import numpy as np


class FormatError(ValueError):
    """Input file does not match the documented CSV headers."""


def read_distribution_csv(path: str | Path) -> tuple[np.ndarray, np.ndarray]:
    """Read a `bin_center,density` CSV into (bin_centers, density)."""
    lines = Path(path).read_text().splitlines()
    if not lines or lines[0].strip() != "bin_center,density":
        head = lines[0].strip() if lines else "<empty>"
        raise FormatError(
            f"{path}: expected header 'bin_center,density', got {head!r}"
        )
    centers = []
    density = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) != 2:
            raise FormatError(f"{path}:{lineno}: expected 2 columns")
        try:
            centers.append(float(parts[0]))
            density.append(float(parts[1]))
        except ValueError:
            raise FormatError(f"{path}:{lineno}: non-numeric value") from None
    if not centers:
        raise FormatError(f"{path}: no data rows")
    return np.array(centers), np.array(density)


def read_bifurcation_csv(path: str | Path) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Read a `bin_center,d=...` CSV into (bin_centers, d_values, densities).

    ``densities[i, j]`` is the density in opinion bin i at tolerance j.
    """
    lines = Path(path).read_text().splitlines()
    if not lines:
        raise FormatError(f"{path}: empty file")
    columns = lines[0].strip().split(",")
    if len(columns) < 2 or columns[0] != "bin_center" or not all(
        c.startswith("d=") for c in columns[1:]
    ):
        raise FormatError(
            f"{path}: expected header 'bin_center,d=...', got {lines[0].strip()!r}"
        )
    try:
        d_values = np.array([float(c[2:]) for c in columns[1:]])
    except ValueError:
        raise FormatError(f"{path}: malformed d value in header") from None
    centers = []
    rows = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) != len(columns):
            raise FormatError(
                f"{path}:{lineno}: expected {len(columns)} columns, got {len(parts)}"
            )
        try:
            centers.append(float(parts[0]))
            rows.append([float(x) for x in parts[1:]])
        except ValueError:
            raise FormatError(f"{path}:{lineno}: non-numeric value") from None
    if not rows:
        raise FormatError(f"{path}: no data rows")
    return np.array(centers), d_values, np.array(rows)

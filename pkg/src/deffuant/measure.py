"""Steady-state opinion densities: histograms, peaks, and distance metrics.

Histograms hold exact integer counts over equal-width bins spanning [0, 1];
densities are derived views normalized so that sum(density) / bins = 1.
Counts merge exactly across replicates before normalization, which is how
replicate-averaged densities are formed.

Peak detection is intentionally simple and fully deterministic: smooth with
a centered moving average, take strict interior local maxima, drop maxima
below a fraction of the global maximum, and resolve near-coincident maxima
in favor of the higher one.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import IO

import numpy as np

from .errors import ParamError, ParseError, ShapeError

FLOAT_FORMAT = "{:.9g}"  # >= 9 significant digits in all emitted CSVs


@dataclass
class Histogram:
    """Integer tallies over ``bins`` equal-width bins covering [0, 1]."""

    bins: int
    counts: np.ndarray  # int64[bins]
    samples: int = 0

    @classmethod
    def empty(cls, bins: int) -> "Histogram":
        if bins < 1:
            raise ParamError(f"bin count {bins} must be positive")
        return cls(bins=bins, counts=np.zeros(bins, dtype=np.int64), samples=0)

    def bin_centers(self) -> np.ndarray:
        return (np.arange(self.bins) + 0.5) / self.bins

    def density(self) -> np.ndarray:
        """Normalized density: sum(density) / bins == 1 when non-empty."""
        if self.samples == 0:
            return np.zeros(self.bins, dtype=np.float64)
        return self.counts / self.samples * self.bins


def accumulate(h: Histogram, opinions: np.ndarray) -> Histogram:
    """Tally opinions into bins floor(x * B), clamping x = 1.0 into the last."""
    idx = np.minimum((np.asarray(opinions) * h.bins).astype(np.int64), h.bins - 1)
    h.counts += np.bincount(idx, minlength=h.bins)
    h.samples += len(idx)
    return h


def merge(h1: Histogram, h2: Histogram) -> Histogram:
    """Element-wise count sum (exact integer arithmetic)."""
    if h1.bins != h2.bins:
        raise ShapeError(f"bin counts differ: {h1.bins} vs {h2.bins}")
    return Histogram(
        bins=h1.bins,
        counts=h1.counts + h2.counts,
        samples=h1.samples + h2.samples,
    )


@dataclass(frozen=True)
class Peak:
    location: float  # bin-center opinion
    height: float  # smoothed density at the peak bin


@dataclass(frozen=True)
class PeakSet:
    peaks: tuple[Peak, ...]

    @property
    def count(self) -> int:
        return len(self.peaks)

    def locations(self) -> list[float]:
        return [p.location for p in self.peaks]


def _moving_average(density: np.ndarray, width: int) -> np.ndarray:
    # Centered, truncated at the boundaries (average over available bins).
    kernel = np.ones(width)
    sums = np.convolve(density, kernel, mode="same")
    norms = np.convolve(np.ones_like(density), kernel, mode="same")
    return sums / norms


def detect_peaks(
    density: np.ndarray,
    min_height_frac: float = 0.2,
    min_separation: int = 9,
) -> PeakSet:
    """Find opinion-density peaks.

    Smooths with a centered moving average of width ``min_separation``
    (forced odd), takes strict interior local maxima of the smoothed
    signal, drops maxima below ``min_height_frac`` times its global
    maximum, and when two maxima sit closer than ``min_separation`` bins
    keeps the higher (ties favor the lower bin index).  Locations are bin
    centers; heights are smoothed density values.  Invariant under uniform
    rescaling of the input.
    """
    if not 0.0 < min_height_frac <= 1.0:
        raise ParamError(f"min_height_frac {min_height_frac} must be in (0, 1]")
    if min_separation < 1:
        raise ParamError(f"min_separation {min_separation} must be positive")
    density = np.asarray(density, dtype=np.float64)
    b = len(density)
    if b < 3:
        return PeakSet(peaks=())
    width = min_separation if min_separation % 2 == 1 else min_separation + 1
    smoothed = _moving_average(density, width)

    interior = np.arange(1, b - 1)
    is_max = (smoothed[interior] > smoothed[interior - 1]) & (
        smoothed[interior] > smoothed[interior + 1]
    )
    candidates = interior[is_max]
    if len(candidates) == 0:
        return PeakSet(peaks=())
    threshold = min_height_frac * smoothed.max()
    candidates = candidates[smoothed[candidates] >= threshold]

    accepted: list[int] = []
    for idx in sorted(candidates, key=lambda i: (-smoothed[i], i)):
        if all(abs(idx - kept) >= min_separation for kept in accepted):
            accepted.append(idx)
    accepted.sort()
    peaks = tuple(
        Peak(location=(i + 0.5) / b, height=float(smoothed[i])) for i in accepted
    )
    return PeakSet(peaks=peaks)


def symmetry_l1(density: np.ndarray) -> float:
    """L1 distance between a density and its mirror about opinion 0.5."""
    density = np.asarray(density, dtype=np.float64)
    return float(np.mean(np.abs(density - density[::-1])))


def l1_distance(d1: np.ndarray, d2: np.ndarray) -> float:
    """Mean absolute difference of two equal-grid densities; in [0, 2]."""
    d1 = np.asarray(d1, dtype=np.float64)
    d2 = np.asarray(d2, dtype=np.float64)
    if d1.shape != d2.shape:
        raise ShapeError(f"density shapes differ: {d1.shape} vs {d2.shape}")
    return float(np.mean(np.abs(d1 - d2)))


def write_distribution_csv(density: np.ndarray, sink: IO[str]) -> None:
    """Emit `bin_center,density` rows covering [0, 1]."""
    density = np.asarray(density, dtype=np.float64)
    b = len(density)
    sink.write("bin_center,density\n")
    for i in range(b):
        center = FLOAT_FORMAT.format((i + 0.5) / b)
        sink.write(f"{center},{FLOAT_FORMAT.format(density[i])}\n")


def read_distribution_csv(source: IO[str]) -> tuple[np.ndarray, np.ndarray]:
    """Parse a distribution CSV back into (bin_centers, density).

    Raises ``ParseError`` with the offending line number on malformed input.
    """
    header = source.readline()
    if header.strip() != "bin_center,density":
        raise ParseError(f"expected header 'bin_center,density', got {header.strip()!r}", 1)
    centers: list[float] = []
    values: list[float] = []
    for lineno, raw in enumerate(source, start=2):
        line = raw.strip()
        if not line:
            continue
        parts = line.split(",")
        if len(parts) != 2:
            raise ParseError(f"expected 2 columns, got {len(parts)}", lineno)
        try:
            centers.append(float(parts[0]))
            values.append(float(parts[1]))
        except ValueError:
            raise ParseError(f"non-numeric value in {line!r}", lineno) from None
    if not centers:
        raise ParseError("no data rows", 2)
    return np.array(centers), np.array(values)

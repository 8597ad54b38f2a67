"""Opinion-dependent mutation probability functions.

Three families over opinions x in [0, 1]:

* ``Uniform``          -- constant ``base_rate``.
* ``AsymmetricLinear`` -- ``slope * (x - 0.5) + base_rate``, a linear ramp
  pivoting at the central opinion.
* ``SymmetricTent``    -- ``slope * (x - 0.25) + base_rate`` on [0, 0.5] and
  ``-slope * (x - 0.75) + base_rate`` on (0.5, 1], a tent mirror-symmetric
  about 0.5.

All three have mean exactly ``base_rate`` over [0, 1], so changing the
slope redistributes mutation pressure across opinions without changing the
total amount of noise in the system.  Profiles are immutable and validated
at construction: the probability must stay inside [0, 1] everywhere, which
for these piecewise-linear shapes only needs checking at the segment
endpoints.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DomainError, ParamError, RangeError


class ProfileKind(Enum):
    UNIFORM = "uniform"
    ASYMMETRIC_LINEAR = "asym"
    SYMMETRIC_TENT = "sym"


@dataclass(frozen=True)
class MutationProfile:
    """Per-event mutation probability as a function of the held opinion.

    ``base_rate`` is the mean probability; ``slope`` is the probability
    change per unit opinion (must be 0 for the uniform family).
    """

    kind: ProfileKind
    base_rate: float
    slope: float = 0.0

    def __post_init__(self):
        validate(self)

    def __call__(self, x):
        return evaluate(self, x)


def _eval_unchecked(profile: MutationProfile, x):
    kind = profile.kind
    p = profile.base_rate
    alpha = profile.slope
    if kind is ProfileKind.UNIFORM:
        return p if np.isscalar(x) else np.full_like(np.asarray(x, dtype=float), p)
    if kind is ProfileKind.ASYMMETRIC_LINEAR:
        return alpha * (x - 0.5) + p
    # Tent: x exactly 0.5 belongs to the first branch; both branches agree
    # there, so the assignment is observationally irrelevant.
    if np.isscalar(x):
        return alpha * (x - 0.25) + p if x <= 0.5 else -alpha * (x - 0.75) + p
    x = np.asarray(x, dtype=float)
    return np.where(x <= 0.5, alpha * (x - 0.25) + p, -alpha * (x - 0.75) + p)


def validate(profile: MutationProfile) -> None:
    """Raise unless the profile is a valid probability function on [0, 1].

    Piecewise-linear shapes attain their extrema at segment endpoints, so
    checking x in {0, 1} (plus the breakpoint 0.5 for the tent) is exact.
    Raises ``ParamError`` for a uniform profile with nonzero slope and
    ``RangeError`` (naming the offending x and value) when the probability
    leaves [0, 1].
    """
    if profile.kind is ProfileKind.UNIFORM and profile.slope != 0.0:
        raise ParamError("uniform profile requires slope = 0")
    checkpoints = [0.0, 1.0]
    if profile.kind is ProfileKind.SYMMETRIC_TENT:
        checkpoints.append(0.5)
    for x in checkpoints:
        value = _eval_unchecked(profile, x)
        if not 0.0 <= value <= 1.0:
            raise RangeError(f"P({x}) = {value} outside [0, 1]")


def evaluate(profile: MutationProfile, x):
    """Mutation probability at opinion ``x`` (scalar or array) in [0, 1]."""
    arr = np.asarray(x, dtype=float)
    if np.any(arr < 0.0) or np.any(arr > 1.0):
        raise DomainError(f"opinion {x} outside [0, 1]")
    return _eval_unchecked(profile, x)


def mean_rate(profile: MutationProfile) -> float:
    """Exact analytic mean of the profile over [0, 1].

    Each family is linear between breakpoints, so the mean is the
    length-weighted trapezoid over segment endpoints.  Equals ``base_rate``
    for all three families.
    """
    if profile.kind is ProfileKind.UNIFORM:
        return profile.base_rate
    if profile.kind is ProfileKind.ASYMMETRIC_LINEAR:
        return 0.5 * (_eval_unchecked(profile, 0.0) + _eval_unchecked(profile, 1.0))
    left = 0.5 * (_eval_unchecked(profile, 0.0) + _eval_unchecked(profile, 0.5))
    right = 0.5 * (_eval_unchecked(profile, 0.5) + _eval_unchecked(profile, 1.0))
    return 0.5 * (left + right)


def parse_kind(label: str) -> ProfileKind:
    """Map a config label (uniform|asym|sym) to its profile kind."""
    for kind in ProfileKind:
        if kind.value == label:
            return kind
    raise ParamError(f"unknown profile kind {label!r} (choose uniform, asym, sym)")

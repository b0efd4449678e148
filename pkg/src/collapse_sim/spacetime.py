"""1+1 dimensional Minkowski kinematics.

Every coordinate is a length in meters: time enters as ``ct``. Boosts are
affine (a velocity plus a translation applied after the rotation), and the
Lorentz factor is always derived from ``beta`` in a cancellation-free way so
that the realistic regime (beta ~ 3e-7) keeps full double precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

C = 299_792_458.0
"""Speed of light in vacuum, m/s (exact SI value)."""

LIGHTLIKE_TOLERANCE = 1e-6
"""Intervals with ``|s2|`` at or below this (m^2) are classified lightlike."""


def _check_finite(*values: float) -> None:
    for v in values:
        if not math.isfinite(v):
            raise ValueError(f"non-finite coordinate: {v!r}")


@dataclass(frozen=True)
class Event:
    """A spacetime point ``(ct, x)``, both in meters."""

    ct: float
    x: float

    def __post_init__(self) -> None:
        _check_finite(self.ct, self.x)

    @property
    def t(self) -> float:
        """Coordinate time in seconds."""
        return self.ct / C

    @classmethod
    def from_time(cls, t: float, x: float) -> Event:
        return cls(C * t, x)


def stable_gamma_quantities(beta: float) -> tuple[float, float, float]:
    """Return ``(gamma, gamma - 1, gamma**2 - 1)`` without cancellation.

    ``gamma**2 - 1`` is formed as ``beta**2 / ((1 - beta)(1 + beta))`` and
    ``gamma - 1`` from the factorization ``gamma**2 - 1 = (gamma - 1)(gamma + 1)``,
    so neither ever subtracts two numbers close to one.
    """
    if not math.isfinite(beta) or abs(beta) >= 1.0:
        raise ValueError(f"|beta| must be < 1, got {beta!r}")
    one_minus_b2 = (1.0 - beta) * (1.0 + beta)
    gamma2_m1 = beta * beta / one_minus_b2
    gamma = 1.0 / math.sqrt(one_minus_b2)
    gamma_m1 = gamma2_m1 / (gamma + 1.0)
    return gamma, gamma_m1, gamma2_m1


@dataclass(frozen=True)
class Boost:
    """Affine Lorentz frame change ``S -> S'``.

    ``beta`` is the velocity of ``S'`` measured in ``S`` (units of c). The
    forward map is::

        ct' = gamma (ct - beta x) + ct_offset
        x'  = gamma (x - beta ct) + x_offset
    """

    beta: float
    ct_offset: float = 0.0
    x_offset: float = 0.0

    def __post_init__(self) -> None:
        _check_finite(self.ct_offset, self.x_offset)
        # validates beta
        stable_gamma_quantities(self.beta)

    @property
    def gamma(self) -> float:
        return stable_gamma_quantities(self.beta)[0]

    @property
    def gamma_m1(self) -> float:
        return stable_gamma_quantities(self.beta)[1]

    @property
    def gamma2_m1(self) -> float:
        return stable_gamma_quantities(self.beta)[2]

    @property
    def inverse_offsets(self) -> tuple[float, float]:
        """Offsets ``(ct_0, x_0)`` of the inverse map written in the same affine form."""
        g = self.gamma
        return (-g * (self.ct_offset + self.beta * self.x_offset),
                -g * (self.x_offset + self.beta * self.ct_offset))

    def inverse(self) -> Boost:
        ct0, x0 = self.inverse_offsets
        return Boost(-self.beta, ct0, x0)


def _rotate(ct: float, x: float, beta: float, gamma_m1: float) -> tuple[float, float]:
    # gamma * a == a + (gamma - 1) * a keeps the O(1) part exact for tiny beta
    a = ct - beta * x
    b = x - beta * ct
    return a + gamma_m1 * a, b + gamma_m1 * b


def boost_event(e: Event, b: Boost) -> Event:
    """Express ``e`` (given in ``S``) in the boosted frame ``S'``."""
    _, gm1, _ = stable_gamma_quantities(b.beta)
    ct, x = _rotate(e.ct, e.x, b.beta, gm1)
    return Event(ct + b.ct_offset, x + b.x_offset)


def inverse_boost(e: Event, b: Boost) -> Event:
    """Map an event given in ``S'`` back to ``S``; the exact inverse of :func:`boost_event`."""
    _, gm1, _ = stable_gamma_quantities(b.beta)
    ct, x = _rotate(e.ct - b.ct_offset, e.x - b.x_offset, -b.beta, gm1)
    return Event(ct, x)


@dataclass(frozen=True)
class Interval:
    """Squared interval ``s2 = (d ct)^2 - (d x)^2`` in m^2 (signature +-)."""

    s2: float

    @property
    def kind(self) -> str:
        if abs(self.s2) <= LIGHTLIKE_TOLERANCE:
            return "lightlike"
        return "timelike" if self.s2 > 0 else "spacelike"

    @property
    def is_timelike(self) -> bool:
        return self.kind == "timelike"

    @property
    def is_spacelike(self) -> bool:
        return self.kind == "spacelike"

    @property
    def is_lightlike(self) -> bool:
        return self.kind == "lightlike"


def interval(e1: Event, e2: Event) -> Interval:
    dct = e2.ct - e1.ct
    dx = e2.x - e1.x
    # factored form: no cancellation between two large squares
    return Interval((dct - dx) * (dct + dx))

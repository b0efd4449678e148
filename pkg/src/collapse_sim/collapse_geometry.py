"""Where a measured state is collapsed, under three collapse models.

All geometry lives in one *working frame*. A measurement carries the event at
which it happened and ``beta``, the velocity of the working frame measured
in the detector's rest frame. With this convention the collapse line of a
detector at rest in ``S``, drawn in a frame ``S'`` that moves at ``+beta``
relative to ``S``, is::

    ct'(x') = -beta * x' + cT1' + beta * X1'

so the slope is ``-beta`` and the detector itself moves at ``-beta`` in the
working frame. A detector at rest in the working frame has ``beta == 0``.

Points exactly on a collapse surface count as collapsed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

import numpy as np

from .spacetime import C, Boost, Event, boost_event, stable_gamma_quantities

OBSERVABLES = ("polarization", "frequency", "none")


class UnsupportedScopeError(ValueError):
    """More measurements than the two-detector geometry covers."""


@dataclass(frozen=True)
class MeasurementSpec:
    event: Event
    beta: float = 0.0
    detector_id: str = "D1"
    observable: str = "polarization"

    def __post_init__(self) -> None:
        stable_gamma_quantities(self.beta)
        if self.observable not in OBSERVABLES:
            raise ValueError(f"unknown observable {self.observable!r}")

    @property
    def detector_velocity(self) -> float:
        """Velocity of the detector in the working frame, units of c."""
        return -self.beta


def compose_velocity(beta_a: float, beta_b: float) -> float:
    """Relativistic sum of two collinear velocities (units of c)."""
    return (beta_a + beta_b) / (1.0 + beta_a * beta_b)


def boost_measurement(m: MeasurementSpec, b: Boost) -> MeasurementSpec:
    """Re-express a measurement in the frame reached by boost ``b``."""
    return MeasurementSpec(boost_event(m.event, b), compose_velocity(m.beta, b.beta),
                           m.detector_id, m.observable)


# -- collapse models -------------------------------------------------------

@dataclass(frozen=True)
class PreferredFrame:
    """Collapse on ``t = const`` in the measuring detector's rest frame."""

    name = "preferred_frame"


@dataclass(frozen=True)
class BackwardLightCone:
    """Collapse everywhere except strictly inside the past light cone."""

    name = "backward_light_cone"


@dataclass(frozen=True)
class ObserverFrame:
    """Collapse on ``t = const`` in one observer's frame, for every measurement.

    ``observer_beta`` follows the measurement convention: velocity of the
    working frame as seen by the observer.
    """

    observer_beta: float = 0.0
    name = "observer_frame"

    def __post_init__(self) -> None:
        stable_gamma_quantities(self.observer_beta)


CollapseModel = PreferredFrame | BackwardLightCone | ObserverFrame


def model_from_name(name: str, observer_beta: float = 0.0) -> CollapseModel:
    if name == PreferredFrame.name:
        return PreferredFrame()
    if name == BackwardLightCone.name:
        return BackwardLightCone()
    if name == ObserverFrame.name:
        return ObserverFrame(observer_beta)
    raise ValueError(f"unknown collapse model {name!r}")


# -- collapse lines --------------------------------------------------------

@dataclass(frozen=True)
class CollapseLine:
    slope: float
    anchor: Event
    model: CollapseModel = field(default_factory=PreferredFrame)

    def ct_at(self, x):
        """Collapse time ``ct`` (m) at position ``x``; accepts arrays."""
        return self.anchor.ct + self.slope * (x - self.anchor.x)


def collapse_line(m: MeasurementSpec, model: CollapseModel | None = None) -> CollapseLine:
    model = PreferredFrame() if model is None else model
    if isinstance(model, BackwardLightCone):
        raise ValueError("the backward light cone model has no collapse line")
    beta = model.observer_beta if isinstance(model, ObserverFrame) else m.beta
    return CollapseLine(-beta, m.event, model)


def collapse_speed(line: CollapseLine) -> float:
    """Signed propagation speed of the collapse along ``x`` in m/s.

    A horizontal line is instantaneous and reported as ``math.inf``.
    """
    if line.slope == 0.0:
        return math.inf
    return C / line.slope


def window_duration(x_query, m: MeasurementSpec):
    """Height ``c dt`` (m) of the uncollapsed-measurement window at ``x_query``.

    The window opens at the measurement time of the working frame and closes on
    the collapse line; it is empty (zero) on the far side of the measurement.
    """
    h = m.beta * (m.event.x - np.asarray(x_query, dtype=float))
    h = np.maximum(h, 0.0)
    return float(h) if np.ndim(h) == 0 else h


def second_measurement_allowed(candidate: Event, first: MeasurementSpec) -> bool:
    """True iff ``candidate`` lies strictly inside the window left open by ``first``.

    ``candidate`` is expressed in the working frame, which is the rest frame of
    the second detector.
    """
    upper = collapse_line(first).ct_at(candidate.x)
    return first.event.ct < candidate.ct < upper


# -- region classification -------------------------------------------------

class RegionKind(Enum):
    UNCOLLAPSED = "uncollapsed"
    COLLAPSED_BY = "collapsed_by"
    COLLAPSED_BY_BOTH = "collapsed_by_both"


@dataclass(frozen=True)
class Region:
    kind: RegionKind
    detector_id: str | None = None

    @property
    def label(self) -> str:
        if self.kind is RegionKind.COLLAPSED_BY:
            return f"collapsed:{self.detector_id}"
        if self.kind is RegionKind.COLLAPSED_BY_BOTH:
            return "collapsed:both"
        return "uncollapsed"


UNCOLLAPSED = Region(RegionKind.UNCOLLAPSED)
COLLAPSED_BY_BOTH = Region(RegionKind.COLLAPSED_BY_BOTH)


def _collapsed_mask(ct, x, m: MeasurementSpec, model: CollapseModel):
    dct = np.asarray(ct, dtype=float) - m.event.ct
    dx = np.asarray(x, dtype=float) - m.event.x
    if isinstance(model, BackwardLightCone):
        strictly_past = -dct > np.abs(dx)
        return ~strictly_past
    beta = model.observer_beta if isinstance(model, ObserverFrame) else m.beta
    # sign of the time difference in the collapse frame
    return dct + beta * dx >= 0.0


def _check_scope(measurements: Sequence[MeasurementSpec]) -> None:
    if len(measurements) > 2:
        raise UnsupportedScopeError(
            f"at most two measurements are supported, got {len(measurements)}")


def _region_from_flags(flags: Sequence[bool], measurements) -> Region:
    hit = [m.detector_id for m, f in zip(measurements, flags) if f]
    if not hit:
        return UNCOLLAPSED
    if len(hit) == 2:
        return COLLAPSED_BY_BOTH
    return Region(RegionKind.COLLAPSED_BY, hit[0])


def is_collapsed(p: Event, m: MeasurementSpec, model: CollapseModel | None = None) -> bool:
    model = PreferredFrame() if model is None else model
    return bool(_collapsed_mask(p.ct, p.x, m, model))


def classify_point(p: Event, measurements: Sequence[MeasurementSpec],
                   model: CollapseModel | None = None) -> Region:
    model = PreferredFrame() if model is None else model
    _check_scope(measurements)
    flags = [bool(_collapsed_mask(p.ct, p.x, m, model)) for m in measurements]
    return _region_from_flags(flags, measurements)


@dataclass(frozen=True)
class Bounds:
    ct_min: float
    ct_max: float
    x_min: float
    x_max: float

    def __post_init__(self) -> None:
        vals = (self.ct_min, self.ct_max, self.x_min, self.x_max)
        if not all(math.isfinite(v) for v in vals):
            raise ValueError("bounds must be finite")
        if not (self.ct_max > self.ct_min and self.x_max > self.x_min):
            raise ValueError("degenerate bounds")


@dataclass(frozen=True)
class RegionMap:
    """Rasterized classification; ``codes[i, j]`` is row ``i`` (ct) and column ``j`` (x).

    Codes: 0 uncollapsed, 1 collapsed by the first measurement only, 2 by the
    second only, 3 by both.
    """

    ct: np.ndarray
    x: np.ndarray
    codes: np.ndarray
    measurements: tuple[MeasurementSpec, ...]

    def region(self, i: int, j: int) -> Region:
        code = int(self.codes[i, j])
        if code == 0:
            return UNCOLLAPSED
        if code == 3:
            return COLLAPSED_BY_BOTH
        return Region(RegionKind.COLLAPSED_BY, self.measurements[code - 1].detector_id)

    def labels(self) -> np.ndarray:
        out = np.empty(self.codes.shape, dtype=object)
        for code in np.unique(self.codes):
            i, j = np.argwhere(self.codes == code)[0]
            out[self.codes == code] = self.region(i, j).label
        return out


def region_map(bounds: Bounds, resolution: tuple[int, int],
               measurements: Sequence[MeasurementSpec],
               model: CollapseModel | None = None) -> RegionMap:
    """Classify the center of every cell of an ``n_ct x n_x`` grid.

    ``resolution`` is ``(n_ct, n_x)``.
    """
    model = PreferredFrame() if model is None else model
    _check_scope(measurements)
    n_ct, n_x = resolution
    if n_ct < 1 or n_x < 1:
        raise ValueError("resolution must be positive")
    dct = (bounds.ct_max - bounds.ct_min) / n_ct
    dx = (bounds.x_max - bounds.x_min) / n_x
    ct = bounds.ct_min + dct * (np.arange(n_ct) + 0.5)
    x = bounds.x_min + dx * (np.arange(n_x) + 0.5)
    CT, X = np.meshgrid(ct, x, indexing="ij")
    codes = np.zeros(CT.shape, dtype=np.int8)
    for k, m in enumerate(measurements):
        codes += (_collapsed_mask(CT, X, m, model) * (1 << k)).astype(np.int8)
    return RegionMap(ct, x, codes, tuple(measurements))

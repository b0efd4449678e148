"""Placement of source and detectors for a double measurement on one uncollapsed pair.

Detector ``D1`` rests at ``x = 0`` of the lab frame ``S`` and detects at
``(T1, 0)``. Detector ``D2`` rests at the origin of ``S'`` and moves along
``x = v t + x0``. Clocks of both origins read zero together, so the inverse
transform ``S' -> S`` has offsets ``(ct_0, x_0) = (0, x0)``.

Durations are returned in seconds, events as ``(ct, x)`` in meters. The
window width is computed from the detector separation directly
(``c dt_c = gamma^2 beta dX12``) instead of differencing two nearly equal
times, which keeps full precision at ``beta ~ 1e-7``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .spacetime import C, Boost, Event, boost_event, stable_gamma_quantities

DEFAULT_STORAGE_LATENCY = 1e-10

REASON_ORDERING = "detector-ordering"
REASON_WINDOW = "window-too-short"
REASON_OUTSIDE = "detection-outside-window"
REASON_EMISSION = "emission-geometry"


@dataclass(frozen=True)
class ExperimentParams:
    v: float
    x0: float
    T1: float
    epsilon: float = 0.0
    storage_latency: float = DEFAULT_STORAGE_LATENCY

    def __post_init__(self) -> None:
        for name in ("v", "x0", "T1", "epsilon", "storage_latency"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if not 0.0 <= self.v < C:
            raise ValueError("require 0 <= v < c")
        if self.epsilon < 0.0:
            raise ValueError("epsilon must be >= 0")
        if self.storage_latency <= 0.0:
            raise ValueError("storage_latency must be > 0")

    @classmethod
    def from_ct_units(cls, beta: float, x0: float, cT1: float, c_epsilon: float = 0.0,
                      storage_latency: float = DEFAULT_STORAGE_LATENCY) -> ExperimentParams:
        return cls(beta * C, x0, cT1 / C, c_epsilon / C, storage_latency)

    @property
    def beta(self) -> float:
        return self.v / C

    @property
    def cT1(self) -> float:
        return C * self.T1

    @property
    def c_epsilon(self) -> float:
        return C * self.epsilon


def detector2_worldline(t, params: ExperimentParams):
    """Position of ``D2`` (m) at lab time ``t`` (s)."""
    return params.v * t + params.x0


def separation(params: ExperimentParams) -> float:
    """Distance ``dX12`` between the detectors at the lab time ``T1``."""
    return -params.x0 - params.v * params.T1


def window_rest(params: ExperimentParams) -> float:
    """Exact window ``dt_c`` in lab time (s)."""
    _, _, g2m1 = stable_gamma_quantities(params.beta)
    first = params.beta * separation(params) / C
    return first + g2m1 * first


def window_rest_first_order(params: ExperimentParams) -> float:
    """Window to first order in beta, ``(v / c^2) dX12`` (s)."""
    return params.beta * separation(params) / C


def frame_boost(params: ExperimentParams) -> Boost:
    """Boost ``S -> S'`` under the clock synchronization of the setup."""
    g = stable_gamma_quantities(params.beta)[0]
    return Boost(params.beta, g * params.beta * params.x0, -g * params.x0)


def point_A(params: ExperimentParams) -> Event:
    """Earliest event on ``D2``'s worldline still inside the window."""
    c_dtc = C * window_rest(params)
    ct = params.cT1 - c_dtc
    return Event(ct, params.beta * ct + params.x0)


def point_A_closed_form(params: ExperimentParams) -> Event:
    """Point A straight from ``gamma^2 (cT1 + beta x0)`` and ``gamma^2 (v T1 + x0)``."""
    g2 = 1.0 + stable_gamma_quantities(params.beta)[2]
    b = params.beta
    return Event(g2 * (params.cT1 + b * params.x0), g2 * (b * params.cT1 + params.x0))


def detection2_event(params: ExperimentParams) -> Event:
    a = point_A(params)
    ct = a.ct + params.c_epsilon
    return Event(ct, a.x + params.beta * params.c_epsilon)


def source_placement(T1: float, detection2: Event) -> Event:
    """Emission event whose two photons reach ``(T1, 0)`` and ``detection2``."""
    cT1 = C * T1
    return Event((detection2.x + detection2.ct + cT1) / 2.0,
                 (detection2.x + detection2.ct - cT1) / 2.0)


def photon_position(ct, source: Event, direction: int):
    """Position of the right (``+1``) or left (``-1``) moving photon at ``ct``."""
    return direction * (np.asarray(ct, dtype=float) - source.ct) + source.x


@dataclass(frozen=True)
class Feasibility:
    feasible: bool
    reasons: tuple[str, ...]
    required_product: float
    required_separation: float
    epsilon_budget: float


def feasibility(params: ExperimentParams) -> Feasibility:
    """Check whether ``D2`` can resolve and store its result inside the window.

    ``required_product`` is the ``v dX12`` (m^2/s) for which the moving-frame
    window equals the storage latency, to first order in beta;
    ``required_separation`` divides it by ``v`` (``inf`` when at rest).
    """
    reasons = []
    dtc = window_rest(params)
    if not separation(params) > 0.0:
        reasons.append(REASON_ORDERING)
    if not params.epsilon < dtc:
        reasons.append(REASON_OUTSIDE)
    if not dtc - params.epsilon >= params.storage_latency:
        reasons.append(REASON_WINDOW)
    d2 = detection2_event(params)
    src = source_placement(params.T1, d2)
    if not (src.ct < params.cT1 and src.ct < d2.ct):
        reasons.append(REASON_EMISSION)
    product = C * C * params.storage_latency
    req = product / params.v if params.v > 0 else math.inf
    return Feasibility(not reasons, tuple(reasons), product, req, dtc - params.storage_latency)


@dataclass(frozen=True)
class ExperimentPlan:
    params: ExperimentParams
    A: Event
    detection1: Event
    detection2: Event
    source: Event
    window_rest: float
    window_moving: float
    window_rest_first_order: float
    first_order_discrepancy: float
    T1_prime: float
    X1_prime: float
    epsilon_prime: float
    dX12: float
    feasible: bool
    infeasibility_reasons: tuple[str, ...]
    required_product: float
    required_separation: float
    epsilon_budget: float
    residuals: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        p = self.params
        ev = lambda e: {"ct_m": e.ct, "x_m": e.x, "t_s": e.t}  # noqa: E731
        return {
            "params": {"v_m_per_s": p.v, "x0_m": p.x0, "T1_s": p.T1,
                       "epsilon_s": p.epsilon, "storage_latency_s": p.storage_latency,
                       "beta": p.beta},
            "A": ev(self.A),
            "detection1": ev(self.detection1),
            "detection2": ev(self.detection2),
            "source": ev(self.source),
            "window_rest_s": self.window_rest,
            "window_moving_s": self.window_moving,
            "window_rest_first_order_s": self.window_rest_first_order,
            "first_order_relative_discrepancy": self.first_order_discrepancy,
            "T1_prime_s": self.T1_prime,
            "X1_prime_m": self.X1_prime,
            "epsilon_prime_s": self.epsilon_prime,
            "dX12_m": self.dX12,
            "feasible": self.feasible,
            "infeasibility_reasons": list(self.infeasibility_reasons),
            "required_product_m2_per_s": self.required_product,
            "required_separation_m": self.required_separation,
            "epsilon_budget_s": self.epsilon_budget,
            "residuals": dict(self.residuals),
        }


def _residuals(params: ExperimentParams, A: Event, d2: Event, src: Event,
               d1_prime: Event, dtc: float) -> dict:
    b = params.beta
    closed = point_A_closed_form(params)
    g = stable_gamma_quantities(b)[0]
    return {
        # D2 worldline through A and detection2
        "A_on_worldline_m": A.x - (b * A.ct + params.x0),
        "detection2_on_worldline_m": d2.x - (b * d2.ct + params.x0),
        # window from separation vs closed-form point A
        "A_closed_form_ct_m": A.ct - closed.ct,
        "A_closed_form_x_m": A.x - closed.x,
        # photon worldlines hitting both detectors
        "right_photon_at_D1_m": (src.x - src.ct) + params.cT1,
        "left_photon_at_D2_m": (src.x + src.ct) - (d2.x + d2.ct),
        # D1's detection in S' sits at gamma dX12
        "X1_prime_m": d1_prime.x - g * separation(params),
        # D1's detection in S' sits on D2's clock time of point A
        "A_prime_simultaneous_m": boost_event(A, frame_boost(params)).ct - d1_prime.ct,
    }


def plan(params: ExperimentParams) -> ExperimentPlan:
    g = stable_gamma_quantities(params.beta)[0]
    A = point_A(params)
    d1 = Event(params.cT1, 0.0)
    d2 = detection2_event(params)
    src = source_placement(params.T1, d2)
    dtc = window_rest(params)
    first = window_rest_first_order(params)
    g2m1 = stable_gamma_quantities(params.beta)[2]
    d1_prime = boost_event(d1, frame_boost(params))
    feas = feasibility(params)
    return ExperimentPlan(
        params=params, A=A, detection1=d1, detection2=d2, source=src,
        window_rest=dtc,
        window_moving=dtc / g,
        window_rest_first_order=first,
        # (exact - first) / exact == (gamma^2 - 1) / gamma^2 == beta^2
        first_order_discrepancy=g2m1 / (1.0 + g2m1),
        T1_prime=d1_prime.t,
        X1_prime=d1_prime.x,
        epsilon_prime=params.epsilon / g,
        dX12=separation(params),
        feasible=feas.feasible,
        infeasibility_reasons=feas.reasons,
        required_product=feas.required_product,
        required_separation=feas.required_separation,
        epsilon_budget=feas.epsilon_budget,
        residuals=_residuals(params, A, d2, src, d1_prime, dtc),
    )


def sweep(params: ExperimentParams, ranges: dict[str, tuple[float, float, int]]) -> list[ExperimentPlan]:
    """Plan every point of the Cartesian product of inclusive ``(start, stop, count)`` ranges.

    Keys are :class:`ExperimentParams` field names; the last key varies fastest.
    """
    names = list(ranges)
    axes = [np.linspace(a, b, int(n)) for a, b, n in (ranges[k] for k in names)]
    plans = []
    for combo in itertools.product(*axes):
        plans.append(plan(replace(params, **{k: float(v) for k, v in zip(names, combo)})))
    return plans

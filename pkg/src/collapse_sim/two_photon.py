"""Polarization-entangled, energy-correlated photon pair.

Polarization is a finite superposition of ``|p1>_1 |p2>_2`` product terms.
The spectral part is a double Gaussian in the rotated coordinates
``u = ws + wi - wp`` and ``w = ws - wi - delta``::

    p(ws, wi) = exp(-u^2 / (2 s_sum^2)) exp(-w^2 / (2 s_diff^2)) / (pi s_sum s_diff)

``u`` and ``w`` are independent normals under ``p``, so every marginal,
mean and variance below is closed form. The common phase factor of the
state is dropped since it cancels in every probability computed here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np


class Polarization(str, Enum):
    H = "H"
    V = "V"

    @property
    def orthogonal(self) -> Polarization:
        return Polarization.V if self is Polarization.H else Polarization.H


NORM_TOLERANCE = 1e-12


class OrthogonalProjectionError(ValueError):
    """The projector annihilates the state: the outcome has probability zero."""


@dataclass(frozen=True)
class PolarizationState:
    """``terms`` holds ``(coeff, pol_mode1, pol_mode2)``; duplicate kets are merged."""

    terms: tuple[tuple[complex, Polarization, Polarization], ...]

    def __post_init__(self) -> None:
        merged: dict[tuple[Polarization, Polarization], complex] = {}
        for coeff, p1, p2 in self.terms:
            key = (Polarization(p1), Polarization(p2))
            merged[key] = merged.get(key, 0j) + complex(coeff)
        terms = tuple((c, p1, p2) for (p1, p2), c in sorted(merged.items()) if c != 0)
        object.__setattr__(self, "terms", terms)

    @property
    def norm2(self) -> float:
        return math.fsum(abs(c) ** 2 for c, _, _ in self.terms)

    @property
    def normalized(self) -> bool:
        return abs(self.norm2 - 1.0) <= NORM_TOLERANCE

    def normalize(self) -> PolarizationState:
        n = math.sqrt(self.norm2)
        if n == 0.0:
            raise ValueError("cannot normalize the zero vector")
        return PolarizationState(tuple((c / n, p1, p2) for c, p1, p2 in self.terms))

    def amplitude(self, p1: Polarization, p2: Polarization) -> complex:
        for c, a, b in self.terms:
            if a == p1 and b == p2:
                return c
        return 0j

    @property
    def label(self) -> str:
        parts = []
        for c, p1, p2 in self.terms:
            parts.append(f"({c.real:+.6g}{c.imag:+.6g}j)|{p1.value}>1|{p2.value}>2")
        return " ".join(parts)

    @classmethod
    def product(cls, p1: Polarization, p2: Polarization) -> PolarizationState:
        return cls(((1.0 + 0j, p1, p2),))


def entangled_pair_state() -> PolarizationState:
    """``(|V>1|H>2 + |H>1|V>2) / sqrt 2``."""
    a = 1.0 / math.sqrt(2.0)
    return PolarizationState(((a, Polarization.V, Polarization.H),
                              (a, Polarization.H, Polarization.V)))


@dataclass(frozen=True)
class ProjectionOutcome:
    measured_polarization: Polarization
    measured_mode: int
    post_state: PolarizationState
    probability: float


def project_polarization(state: PolarizationState, mode: int, pol: Polarization) -> ProjectionOutcome:
    """Project one photon of the pair on ``pol`` and renormalize."""
    if mode not in (1, 2):
        raise ValueError("mode must be 1 or 2")
    pol = Polarization(pol)
    kept = tuple(t for t in state.terms if t[mode] == pol)
    kept_state = PolarizationState(kept)
    prob = kept_state.norm2 / state.norm2
    if prob == 0.0:
        raise OrthogonalProjectionError(f"state has no component with mode {mode} = {pol.value}")
    return ProjectionOutcome(pol, mode, kept_state.normalize(), prob)


def outcome_probability(state: PolarizationState, mode: int, pol: Polarization) -> float:
    try:
        return project_polarization(state, mode, pol).probability
    except OrthogonalProjectionError:
        return 0.0


class FinalStateRule(str, Enum):
    """How the state after two measurements on one uncollapsed state is assigned.

    No unique assignment exists; the rule is a modeling choice and is always
    reported alongside any final state.
    """

    OUTCOMES = "outcomes"
    D1_PRIORITY = "d1-priority"
    D2_PRIORITY = "d2-priority"


@dataclass(frozen=True)
class FinalState:
    state: PolarizationState
    rule: FinalStateRule


def final_state(pol1: Polarization, pol2: Polarization, rule: FinalStateRule | str,
                state: PolarizationState | None = None) -> FinalState:
    """Final state after ``D1`` read ``pol1`` on mode 1 and ``D2`` read ``pol2`` on mode 2."""
    rule = FinalStateRule(rule)
    state = entangled_pair_state() if state is None else state
    if rule is FinalStateRule.OUTCOMES:
        return FinalState(PolarizationState.product(Polarization(pol1), Polarization(pol2)), rule)
    mode, pol = (1, pol1) if rule is FinalStateRule.D1_PRIORITY else (2, pol2)
    return FinalState(project_polarization(state, mode, pol).post_state, rule)


# -- spectral model --------------------------------------------------------

@dataclass(frozen=True)
class TwoPhotonAmplitude:
    """Gaussian joint spectral amplitude; all fields in rad/s."""

    omega_p: float = 2.4e15
    sigma_sum: float = 1e12
    sigma_diff: float = 2e13
    delta: float = 0.0

    def __post_init__(self) -> None:
        for name in ("omega_p", "sigma_sum", "sigma_diff", "delta"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if self.sigma_sum <= 0 or self.sigma_diff <= 0 or self.omega_p <= 0:
            raise ValueError("omega_p, sigma_sum and sigma_diff must be positive")
        if self.omega_p < 10.0 * (self.sigma_sum + self.sigma_diff):
            raise ValueError("omega_p must be at least 10x sigma_sum + sigma_diff")

    @property
    def normalizer(self) -> float:
        return 1.0 / (math.pi * self.sigma_sum * self.sigma_diff)

    @property
    def marginal_sd(self) -> float:
        """Standard deviation of either single-photon frequency."""
        return 0.5 * math.hypot(self.sigma_sum, self.sigma_diff)

    @property
    def mean_signal(self) -> float:
        return 0.5 * (self.omega_p + self.delta)

    @property
    def mean_idler(self) -> float:
        return 0.5 * (self.omega_p - self.delta)

    def positivity_truncation_bound(self) -> float:
        """Probability mass the Gaussian puts on negative frequencies (union bound)."""
        s = self.marginal_sd * math.sqrt(2.0)
        return 0.5 * (math.erfc(self.mean_signal / s) + math.erfc(self.mean_idler / s))


def _gauss(z, mean: float, sd: float):
    return np.exp(-0.5 * ((z - mean) / sd) ** 2) / (sd * math.sqrt(2.0 * math.pi))


def density_correlated(a: TwoPhotonAmplitude, ws, wi):
    """Joint frequency density of a pair whose measurements share one collapse."""
    ws = np.asarray(ws, dtype=float)
    wi = np.asarray(wi, dtype=float)
    u = (ws + wi - a.omega_p) / a.sigma_sum
    w = (ws - wi - a.delta) / a.sigma_diff
    return a.normalizer * np.exp(-0.5 * (u * u + w * w))


def marginal_signal(a: TwoPhotonAmplitude, ws):
    return _gauss(np.asarray(ws, dtype=float), a.mean_signal, a.marginal_sd)


def marginal_idler(a: TwoPhotonAmplitude, wi):
    return _gauss(np.asarray(wi, dtype=float), a.mean_idler, a.marginal_sd)


def density_factorized(a: TwoPhotonAmplitude, ws, wi):
    """Product of the marginals of :func:`density_correlated`."""
    return marginal_signal(a, ws) * marginal_idler(a, wi)


class DensityKind(str, Enum):
    CORRELATED = "correlated"
    FACTORIZED = "factorized"


@dataclass(frozen=True)
class JointDensity:
    kind: DensityKind
    amplitude: TwoPhotonAmplitude

    def __call__(self, ws, wi):
        if DensityKind(self.kind) is DensityKind.CORRELATED:
            return density_correlated(self.amplitude, ws, wi)
        return density_factorized(self.amplitude, ws, wi)

    @property
    def sum_sd(self) -> float:
        """Standard deviation of ``ws + wi`` (rad/s)."""
        return energy_residual_sd(self.amplitude, self.kind)


def mean_energy(d: JointDensity) -> tuple[float, float, float]:
    """``(<ws>, <wi>, <E>/hbar)``; the same for both density kinds."""
    a = d.amplitude
    return a.mean_signal, a.mean_idler, a.mean_signal + a.mean_idler


def energy_sum_residual(ws, wi, a: TwoPhotonAmplitude):
    """Per-event violation of ``ws + wi == wp`` (rad/s)."""
    r = np.asarray(ws, dtype=float) + np.asarray(wi, dtype=float) - a.omega_p
    return float(r) if r.ndim == 0 else r


def energy_residual_sd(a: TwoPhotonAmplitude, kind: DensityKind | str) -> float:
    if DensityKind(kind) is DensityKind.CORRELATED:
        return a.sigma_sum
    return math.sqrt(0.5 * (a.sigma_sum ** 2 + a.sigma_diff ** 2))


def density_grid(a: TwoPhotonAmplitude, n: int = 41, half_width: float = 4.0):
    """Both densities on an ``n x n`` grid spanning ``half_width`` marginal sds.

    Returns ``(ws, wi, p, p_N)`` with the density arrays indexed ``[i_s, i_i]``.
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    sd = a.marginal_sd
    ws = np.linspace(a.mean_signal - half_width * sd, a.mean_signal + half_width * sd, n)
    wi = np.linspace(a.mean_idler - half_width * sd, a.mean_idler + half_width * sd, n)
    S, I = np.meshgrid(ws, wi, indexing="ij")
    return ws, wi, density_correlated(a, S, I), density_factorized(a, S, I)

"""Seeded Monte Carlo of the two measurement models.

Events are generated in fixed-size chunks. Chunk ``k`` draws from its own
Philox stream keyed by ``SeedSequence(seed, spawn_key=(k,))``, so results do
not depend on how many threads produce the chunks. Statistics are reduced
with ``math.fsum``, which is exactly rounded and therefore independent of
summation order.
"""

from __future__ import annotations

import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from . import __version__
from .two_photon import (DensityKind, FinalStateRule, Polarization, PolarizationState,
                         TwoPhotonAmplitude, energy_residual_sd, entangled_pair_state,
                         final_state, outcome_probability, project_polarization)

CHUNK_SIZE = 1 << 16
RNG_ALGORITHM = "numpy-Philox4x64/SeedSequence(seed,spawn_key=(chunk,))/chunk=65536/v1"
HIST_BINS = 24
HIST_HALF_WIDTH = 6.0  # in units of the larger residual sd
THREADS_ENV = "COLLAPSE_SIM_THREADS"

OBSERVABLES = ("polarization", "frequency")
CELLS = ("HH", "HV", "VH", "VV")


class MeasurementModel(str, Enum):
    COLLAPSED_SEQUENTIAL = "collapsed_sequential"
    UNCOLLAPSED_DOUBLE = "uncollapsed_double"


@dataclass(frozen=True)
class SimulationConfig:
    model: MeasurementModel = MeasurementModel.UNCOLLAPSED_DOUBLE
    n_events: int = 100_000
    seed: int = 0
    amplitude: TwoPhotonAmplitude = field(default_factory=TwoPhotonAmplitude)
    observables: tuple[str, ...] = OBSERVABLES
    final_state_rule: FinalStateRule = FinalStateRule.OUTCOMES

    def __post_init__(self) -> None:
        object.__setattr__(self, "model", MeasurementModel(self.model))
        object.__setattr__(self, "final_state_rule", FinalStateRule(self.final_state_rule))
        if int(self.n_events) != self.n_events or self.n_events < 1:
            raise ValueError("n_events must be a positive integer")
        if not 0 <= self.seed < 2 ** 64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        obs = tuple(o for o in OBSERVABLES if o in self.observables)
        if not obs or set(self.observables) - set(OBSERVABLES):
            raise ValueError(f"observables must be a non-empty subset of {OBSERVABLES}")
        object.__setattr__(self, "observables", obs)


def chunk_rng(seed: int, chunk: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(chunk,))))


def sample_polarizations(model: MeasurementModel, rng: np.random.Generator, n: int,
                         state: PolarizationState | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Boolean arrays ``(pol1_is_V, pol2_is_V)`` for ``n`` pairs.

    Collapsed: mode 1 is projected first and mode 2 is read from the
    post-measurement state. Uncollapsed: each detector projects the original
    state on its own.
    """
    state = entangled_pair_state() if state is None else state
    p1v = outcome_probability(state, 1, Polarization.V)
    u = rng.random((2, n))
    pol1 = u[0] < p1v
    if MeasurementModel(model) is MeasurementModel.UNCOLLAPSED_DOUBLE:
        pol2 = u[1] < outcome_probability(state, 2, Polarization.V)
        return pol1, pol2
    cond = {}
    for first in Polarization:
        try:
            post = project_polarization(state, 1, first).post_state
            cond[first] = outcome_probability(post, 2, Polarization.V)
        except ValueError:
            cond[first] = 0.0
    pol2 = u[1] < np.where(pol1, cond[Polarization.V], cond[Polarization.H])
    return pol1, pol2


def sample_frequencies(model: MeasurementModel, a: TwoPhotonAmplitude, rng: np.random.Generator,
                       n: int) -> tuple[np.ndarray, np.ndarray]:
    """Draw ``(ws, wi)`` in rad/s.

    Collapsed pairs come from the joint Gaussian, sampled in the rotated
    (sum, difference) coordinates and rotated back; uncollapsed pairs take
    independent draws from the two marginals.
    """
    z = rng.standard_normal((2, n))
    if MeasurementModel(model) is MeasurementModel.COLLAPSED_SEQUENTIAL:
        u = a.sigma_sum * z[0]
        w = a.sigma_diff * z[1]
        return (a.omega_p + a.delta + u + w) / 2.0, (a.omega_p - a.delta + u - w) / 2.0
    sd = a.marginal_sd
    return a.mean_signal + sd * z[0], a.mean_idler + sd * z[1]


def _worker_count() -> int:
    raw = os.environ.get(THREADS_ENV)
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            pass
    return min(8, os.cpu_count() or 1)


@dataclass(frozen=True)
class EventBatch:
    pol1_v: np.ndarray | None
    pol2_v: np.ndarray | None
    omega_s: np.ndarray | None
    omega_i: np.ndarray | None


def _generate_chunk(config: SimulationConfig, chunk: int, size: int) -> EventBatch:
    rng = chunk_rng(config.seed, chunk)
    pols = (None, None)
    freqs = (None, None)
    # fixed draw order inside a chunk: polarization first, then frequency
    if "polarization" in config.observables:
        pols = sample_polarizations(config.model, rng, size)
    if "frequency" in config.observables:
        freqs = sample_frequencies(config.model, config.amplitude, rng, size)
    return EventBatch(pols[0], pols[1], freqs[0], freqs[1])


def generate_events(config: SimulationConfig, workers: int | None = None) -> EventBatch:
    n = int(config.n_events)
    sizes = [min(CHUNK_SIZE, n - k * CHUNK_SIZE) for k in range(-(-n // CHUNK_SIZE))]
    workers = _worker_count() if workers is None else max(1, int(workers))
    if workers == 1 or len(sizes) == 1:
        batches = [_generate_chunk(config, k, s) for k, s in enumerate(sizes)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            batches = list(pool.map(lambda ks: _generate_chunk(config, *ks), enumerate(sizes)))

    def cat(name):
        parts = [getattr(b, name) for b in batches]
        return None if parts[0] is None else np.concatenate(parts)

    return EventBatch(cat("pol1_v"), cat("pol2_v"), cat("omega_s"), cat("omega_i"))


@dataclass(frozen=True)
class Estimate:
    value: float | None
    se: float | None

    def to_dict(self) -> dict:
        return {"value": self.value, "se": self.se}

    def within(self, target: float, k: float = 5.0) -> bool:
        return abs(self.value - target) <= k * self.se


def _mean_estimate(x: np.ndarray) -> Estimate:
    n = x.size
    mean = math.fsum(x.tolist()) / n
    if n < 2:
        return Estimate(mean, None)
    d = x - mean
    var = math.fsum((d * d).tolist()) / (n - 1)
    return Estimate(mean, math.sqrt(var / n))


def _sd_estimate(x: np.ndarray) -> Estimate:
    n = x.size
    if n < 2:
        return Estimate(None, None)
    mean = math.fsum(x.tolist()) / n
    d = x - mean
    sd = math.sqrt(math.fsum((d * d).tolist()) / (n - 1))
    # normal-theory standard error of a sample standard deviation
    return Estimate(sd, sd / math.sqrt(2.0 * (n - 1)))


@dataclass(frozen=True)
class SimulationReport:
    model: MeasurementModel
    seed: int
    n_events: int
    rng_algorithm: str
    version: str
    final_state_rule: FinalStateRule
    amplitude: TwoPhotonAmplitude
    p_same_polarization: Estimate | None = None
    outcome_counts: dict | None = None
    final_state_counts: dict | None = None
    mean_omega_s: Estimate | None = None
    mean_omega_i: Estimate | None = None
    mean_sum: Estimate | None = None
    sd_sum: Estimate | None = None
    mean_residual: Estimate | None = None
    fraction_beyond_3_sigma_sum: Estimate | None = None
    residual_histogram: dict | None = None

    def to_dict(self) -> dict:
        est = lambda e: None if e is None else e.to_dict()  # noqa: E731
        a = self.amplitude
        return {
            "model": self.model.value,
            "seed": self.seed,
            "n_events": self.n_events,
            "rng_algorithm": self.rng_algorithm,
            "version": self.version,
            "final_state_rule": self.final_state_rule.value,
            "amplitude": {"omega_p_rad_per_s": a.omega_p, "sigma_sum_rad_per_s": a.sigma_sum,
                          "sigma_diff_rad_per_s": a.sigma_diff, "delta_rad_per_s": a.delta},
            "p_same_polarization": est(self.p_same_polarization),
            "outcome_counts": self.outcome_counts,
            "final_state_counts": self.final_state_counts,
            "mean_omega_s_rad_per_s": est(self.mean_omega_s),
            "mean_omega_i_rad_per_s": est(self.mean_omega_i),
            "mean_sum_rad_per_s": est(self.mean_sum),
            "sd_sum_rad_per_s": est(self.sd_sum),
            "mean_residual_rad_per_s": est(self.mean_residual),
            "fraction_beyond_3_sigma_sum": est(self.fraction_beyond_3_sigma_sum),
            "residual_histogram": self.residual_histogram,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)


def residual_histogram_edges(a: TwoPhotonAmplitude) -> np.ndarray:
    scale = energy_residual_sd(a, DensityKind.FACTORIZED)
    return np.linspace(-HIST_HALF_WIDTH * scale, HIST_HALF_WIDTH * scale, HIST_BINS + 1)


def summarize(config: SimulationConfig, events: EventBatch) -> SimulationReport:
    a = config.amplitude
    fields = {}
    if events.pol1_v is not None:
        p1, p2 = events.pol1_v, events.pol2_v
        counts = {
            "HH": int(np.count_nonzero(~p1 & ~p2)),
            "HV": int(np.count_nonzero(~p1 & p2)),
            "VH": int(np.count_nonzero(p1 & ~p2)),
            "VV": int(np.count_nonzero(p1 & p2)),
        }
        fields["outcome_counts"] = counts
        fields["p_same_polarization"] = _mean_estimate((p1 == p2).astype(float))
        finals: dict[str, int] = {}
        for cell, k in counts.items():
            if k == 0:
                continue
            fs = final_state(Polarization(cell[0]), Polarization(cell[1]),
                             config.final_state_rule)
            finals[fs.state.label] = finals.get(fs.state.label, 0) + k
        fields["final_state_counts"] = dict(sorted(finals.items()))
    if events.omega_s is not None:
        ws, wi = events.omega_s, events.omega_i
        total = ws + wi
        resid = total - a.omega_p
        fields["mean_omega_s"] = _mean_estimate(ws)
        fields["mean_omega_i"] = _mean_estimate(wi)
        fields["mean_sum"] = _mean_estimate(total)
        fields["sd_sum"] = _sd_estimate(total)
        fields["mean_residual"] = _mean_estimate(resid)
        fields["fraction_beyond_3_sigma_sum"] = _mean_estimate(
            (np.abs(resid) > 3.0 * a.sigma_sum).astype(float))
        edges = residual_histogram_edges(a)
        hist, _ = np.histogram(resid, bins=edges)
        fields["residual_histogram"] = {
            "edges_rad_per_s": edges.tolist(),
            "counts": hist.tolist(),
            "underflow": int(np.count_nonzero(resid < edges[0])),
            "overflow": int(np.count_nonzero(resid >= edges[-1])),
        }
    return SimulationReport(config.model, config.seed, int(config.n_events), RNG_ALGORITHM,
                            __version__, config.final_state_rule, a, **fields)


def run(config: SimulationConfig, workers: int | None = None) -> SimulationReport:
    return summarize(config, generate_events(config, workers))


def beyond_3_sigma_sum_expected(a: TwoPhotonAmplitude, model: MeasurementModel) -> float:
    """Probability that ``|ws + wi - wp| > 3 sigma_sum`` under ``model``."""
    kind = (DensityKind.CORRELATED if MeasurementModel(model) is MeasurementModel.COLLAPSED_SEQUENTIAL
            else DensityKind.FACTORIZED)
    s = energy_residual_sd(a, kind)
    return math.erfc(3.0 * a.sigma_sum / (s * math.sqrt(2.0)))


@dataclass(frozen=True)
class Comparison:
    collapsed: SimulationReport
    uncollapsed: SimulationReport
    variance_ratio: float | None
    variance_ratio_expected: float

    def to_dict(self) -> dict:
        return {
            "collapsed_sequential": self.collapsed.to_dict(),
            "uncollapsed_double": self.uncollapsed.to_dict(),
            "variance_ratio": self.variance_ratio,
            "variance_ratio_expected": self.variance_ratio_expected,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)


def compare(config: SimulationConfig, workers: int | None = None) -> Comparison:
    """Run both models on the same seed and report ``var_uncollapsed / var_collapsed``."""
    reports = {}
    for model in MeasurementModel:
        cfg = SimulationConfig(model, config.n_events, config.seed, config.amplitude,
                               config.observables, config.final_state_rule)
        reports[model] = run(cfg, workers)
    c = reports[MeasurementModel.COLLAPSED_SEQUENTIAL]
    u = reports[MeasurementModel.UNCOLLAPSED_DOUBLE]
    a = config.amplitude
    expected = (energy_residual_sd(a, DensityKind.FACTORIZED) / a.sigma_sum) ** 2
    ratio = None
    if c.sd_sum is not None and c.sd_sum.value and u.sd_sum.value is not None:
        ratio = (u.sd_sum.value / c.sd_sum.value) ** 2
    return Comparison(c, u, ratio, expected)

"""Discrete-event simulation of the three designs with batch-means intervals.

The run length is counted in arrivals, so runs where overflowed customers never
finish (``gamma == 0``) still terminate. Randomness comes from four independent
Philox streams spawned from one seed: type-1 interarrivals, type-2
interarrivals, server-1 service and server-2 service.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from . import kernels
from .core import FlexibilityDesign, SystemParams
from .ctmc import design_code, throughput
from .errors import ConfigError

__all__ = [
    "SimConfig",
    "ThroughputEstimate",
    "ValidationReport",
    "simulate",
    "validate_against_analytic",
    "pool_estimates",
]

CHUNK = 1 << 16
MIN_BATCHES = 10
SEED_MAX = 2**64 - 1


@dataclass(frozen=True)
class SimConfig:
    params: SystemParams
    design: FlexibilityDesign
    horizon_events: int
    warmup_events: int | None = None  # default: 5% of the horizon
    seed: int = 0
    batches: int = 20

    def __post_init__(self):
        object.__setattr__(self, "design", FlexibilityDesign.parse(self.design))
        if not isinstance(self.params, SystemParams):
            raise ConfigError("params must be a SystemParams")
        if isinstance(self.horizon_events, bool) or int(self.horizon_events) != self.horizon_events:
            raise ConfigError("horizon_events must be an integer")
        if self.horizon_events <= 0:
            raise ConfigError("horizon_events must be positive")
        if self.warmup_events is None:
            object.__setattr__(self, "warmup_events", self.horizon_events // 20)
        if int(self.warmup_events) != self.warmup_events or self.warmup_events < 0:
            raise ConfigError("warmup_events must be a non-negative integer")
        if self.warmup_events >= self.horizon_events:
            raise ConfigError("warmup_events must be smaller than horizon_events")
        if int(self.batches) != self.batches or self.batches < MIN_BATCHES:
            raise ConfigError(f"batches must be an integer >= {MIN_BATCHES}")
        if int(self.seed) != self.seed or not 0 <= self.seed <= SEED_MAX:
            raise ConfigError("seed must be an unsigned 64-bit integer")
        if self.batch_size < 1:
            raise ConfigError("fewer post-warmup arrivals than batches")

    @property
    def batch_size(self) -> int:
        return (self.horizon_events - self.warmup_events) // self.batches


@dataclass(frozen=True)
class ThroughputEstimate:
    mean: float
    half_width_95: float
    std_error: float
    accepted: int
    offered: int
    by_type: tuple[float | None, float | None]  # per-type acceptance fractions
    accepted_by_type: tuple[int, int]
    offered_by_type: tuple[int, int]
    batch_accepted: tuple[int, ...] = field(repr=False)
    batch_time: tuple[float, ...] = field(repr=False)
    occupancy_time: np.ndarray = field(repr=False, compare=False)
    illegal_states: int = 0

    @property
    def lost(self) -> int:
        return self.offered - self.accepted

    @property
    def batch_rates(self) -> np.ndarray:
        return np.asarray(self.batch_accepted, dtype=float) / np.asarray(self.batch_time)

    def occupancy_fractions(self) -> np.ndarray:
        """Time-average fraction spent in each (server1, server2) pair, as a 3x3 array."""
        total = self.occupancy_time.sum()
        return self.occupancy_time / total if total > 0 else self.occupancy_time


def _summarise(batch_accepted, batch_time):
    acc = np.asarray(batch_accepted, dtype=float)
    t = np.asarray(batch_time, dtype=float)
    mean = float(acc.sum() / t.sum())
    rates = acc / t
    b = len(rates)
    se = float(rates.std(ddof=1) / math.sqrt(b))
    half = float(stats.t.ppf(0.975, b - 1) * se)
    return mean, se, half


def _streams(seed: int) -> list[np.random.Generator]:
    children = np.random.SeedSequence(int(seed)).spawn(kernels.N_STREAMS)
    return [np.random.Generator(np.random.Philox(child)) for child in children]


def simulate(config: SimConfig, accelerated: bool | None = None) -> ThroughputEstimate:
    """Run one replication and estimate throughput after warm-up.

    ``accelerated`` forces the compiled (True) or interpreted (False) event
    loop; by default the package-wide backend is used. Both consume the random
    streams identically, so they agree on every count for a given seed.
    """
    if accelerated is None:
        advance = kernels.sim_advance
    else:
        advance = kernels.sim_advance_nb if accelerated else kernels.sim_advance_py
    p = config.params
    code = design_code(config.design)
    gens = _streams(config.seed)
    buffers = np.empty((kernels.N_STREAMS, CHUNK))
    for s, g in enumerate(gens):
        buffers[s] = g.standard_exponential(CHUNK)
    ptrs = np.zeros(kernels.N_STREAMS, dtype=np.int64)

    fstate = np.full(5, np.inf)
    fstate[kernels.T_NOW] = 0.0
    fstate[kernels.T_ARR1] = buffers[0, 0] / p.rho
    ptrs[0] = 1
    if p.k > 0.0:
        fstate[kernels.T_ARR2] = buffers[1, 0] / (p.k * p.rho)
        ptrs[1] = 1
    istate = np.zeros(4, dtype=np.int64)

    nb = config.batches
    batch_accepted = np.zeros(nb, dtype=np.int64)
    batch_time = np.zeros(nb)
    offered = np.zeros(2, dtype=np.int64)
    accepted = np.zeros(2, dtype=np.int64)
    occupancy = np.zeros((3, 3))

    while True:
        status = advance(code, p.rho, p.k, p.gamma, config.warmup_events, config.batch_size, nb,
                         fstate, istate, buffers, ptrs,
                         batch_accepted, batch_time, offered, accepted, occupancy)
        if status == 0:
            break
        s = status - 1
        buffers[s] = gens[s].standard_exponential(CHUNK)
        ptrs[s] = 0

    illegal = int(istate[kernels.S_ILLEGAL])
    if illegal:
        raise AssertionError(f"partial simulation placed a type-2 customer at server 1 ({illegal} events)")
    mean, se, half = _summarise(batch_accepted, batch_time)
    by_type = tuple(
        (int(accepted[i]) / int(offered[i])) if offered[i] else None for i in range(2)
    )
    return ThroughputEstimate(
        mean=mean,
        half_width_95=half,
        std_error=se,
        accepted=int(accepted.sum()),
        offered=int(offered.sum()),
        by_type=by_type,
        accepted_by_type=(int(accepted[0]), int(accepted[1])),
        offered_by_type=(int(offered[0]), int(offered[1])),
        batch_accepted=tuple(int(a) for a in batch_accepted),
        batch_time=tuple(float(t) for t in batch_time),
        occupancy_time=occupancy,
        illegal_states=illegal,
    )


def pool_estimates(estimates) -> ThroughputEstimate:
    """Merge independent replications by pooling their batches.

    Batches are sorted before summarising, so the result does not depend on the
    order (or grouping) in which replications are merged.
    """
    estimates = list(estimates)
    if not estimates:
        raise ValueError("nothing to pool")
    batches = sorted(
        (a, t) for e in estimates for a, t in zip(e.batch_accepted, e.batch_time)
    )
    acc = tuple(a for a, _ in batches)
    times = tuple(t for _, t in batches)
    mean, se, half = _summarise(acc, times)
    off = tuple(sum(e.offered_by_type[i] for e in estimates) for i in range(2))
    accd = tuple(sum(e.accepted_by_type[i] for e in estimates) for i in range(2))
    return ThroughputEstimate(
        mean=mean,
        half_width_95=half,
        std_error=se,
        accepted=sum(accd),
        offered=sum(off),
        by_type=tuple((accd[i] / off[i]) if off[i] else None for i in range(2)),
        accepted_by_type=accd,
        offered_by_type=off,
        batch_accepted=acc,
        batch_time=times,
        occupancy_time=sum((e.occupancy_time for e in estimates), np.zeros((3, 3))),
        illegal_states=sum(e.illegal_states for e in estimates),
    )


@dataclass(frozen=True)
class ValidationReport:
    passed: bool
    analytic: float
    estimate: ThroughputEstimate
    z_score: float
    tolerance: float

    @property
    def abs_error(self) -> float:
        return abs(self.estimate.mean - self.analytic)


def validate_against_analytic(config: SimConfig, estimate: ThroughputEstimate | None = None,
                              abs_floor: float = 1e-3) -> ValidationReport:
    """Compare a simulation estimate with the analytic throughput.

    Passes when the error is within three standard errors, or within
    ``abs_floor`` when the batches carry no spread (e.g. a frozen system).
    """
    est = estimate if estimate is not None else simulate(config)
    analytic = throughput(config.design, config.params)
    diff = est.mean - analytic
    tol = max(3.0 * est.std_error, abs_floor)
    if est.std_error > 0:
        z = diff / est.std_error
    else:
        z = 0.0 if diff == 0 else math.copysign(math.inf, diff)
    return ValidationReport(abs(diff) <= tol, analytic, est, z, tol)

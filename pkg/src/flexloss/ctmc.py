"""Generator construction and stationary solve for the full and partial chains."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .core import (
    FlexibilityDesign,
    StationaryDistribution,
    SystemParams,
    SystemState,
    state_index,
    state_space,
)
from .errors import SingularChain, UnsupportedDesign

__all__ = [
    "GeneratorMatrix",
    "RATE_KINDS",
    "transitions",
    "build_generator",
    "stationary_distribution",
    "balance_residual",
    "throughput",
    "design_code",
]

RATE_KINDS = ("rho", "k*rho", "1", "gamma")
LU_NEGATIVE_TOL = 1e-12
_ARRIVAL1, _ARRIVAL2, _DEDICATED, _NON_DEDICATED = range(4)

_CODES = {
    FlexibilityDesign.INDEPENDENT: kernels.INDEPENDENT,
    FlexibilityDesign.PARTIAL: kernels.PARTIAL,
    FlexibilityDesign.FULL: kernels.FULL,
}


def design_code(design: FlexibilityDesign) -> int:
    return _CODES[FlexibilityDesign.parse(design)]


def _route(design: FlexibilityDesign, state: SystemState, ctype: int) -> SystemState | None:
    """Where an arriving customer of ``ctype`` goes, or None when it is lost."""
    s1, s2 = state
    own, other = (0, 1) if ctype == 1 else (1, 0)
    occ = [s1, s2]
    if occ[own] == 0:
        occ[own] = ctype
    elif occ[other] == 0 and (design is FlexibilityDesign.FULL or ctype == 1):
        occ[other] = ctype
    else:
        return None
    return SystemState(*occ)


def transitions(design: FlexibilityDesign) -> list[tuple[SystemState, SystemState, str]]:
    """Every positive-rate transition as ``(source, target, rate kind)``.

    A server holding a customer of its own type completes at rate 1, otherwise at
    rate gamma. Arrivals take their dedicated server if idle, may overflow to the
    other server if the design allows it, and are lost otherwise.
    """
    design = FlexibilityDesign.parse(design)
    out = []
    for state in state_space(design):
        for ctype, kind in ((1, _ARRIVAL1), (2, _ARRIVAL2)):
            target = _route(design, state, ctype)
            if target is not None:
                out.append((state, target, RATE_KINDS[kind]))
        for server in (0, 1):
            occupant = state[server]
            if occupant == 0:
                continue
            occ = list(state)
            occ[server] = 0
            kind = _DEDICATED if occupant == server + 1 else _NON_DEDICATED
            out.append((state, SystemState(*occ), RATE_KINDS[kind]))
    return out


def _table(design: FlexibilityDesign) -> np.ndarray:
    rows = [
        (state_index(design, src), state_index(design, dst), RATE_KINDS.index(kind))
        for src, dst, kind in transitions(design)
    ]
    return np.array(rows, dtype=np.int64)


FULL_TABLE = _table(FlexibilityDesign.FULL)
PARTIAL_TABLE = _table(FlexibilityDesign.PARTIAL)
_TABLES = {FlexibilityDesign.FULL: FULL_TABLE, FlexibilityDesign.PARTIAL: PARTIAL_TABLE}


@dataclass(frozen=True, eq=False)
class GeneratorMatrix:
    """Dense CTMC generator indexed by the design's canonical state order."""

    design: FlexibilityDesign
    params: SystemParams
    rates: np.ndarray

    def __post_init__(self):
        n = len(state_space(self.design))
        q = np.array(self.rates, dtype=float)
        if q.shape != (n, n):
            raise ValueError(f"{self.design.value} generator must be {n}x{n}, got {q.shape}")
        off = q - np.diag(np.diag(q))
        if np.any(off < 0.0):
            raise ValueError("off-diagonal generator entries must be non-negative")
        scale = max(1.0, float(np.abs(q).max()))
        if np.abs(q.sum(axis=1)).max() > 1e-12 * scale:
            raise ValueError("generator rows must sum to zero")
        q.setflags(write=False)
        object.__setattr__(self, "rates", q)

    @property
    def dimension(self) -> int:
        return self.rates.shape[0]

    def rate(self, source, target) -> float:
        return float(self.rates[state_index(self.design, source), state_index(self.design, target)])

    def out_rate(self, state) -> float:
        i = state_index(self.design, state)
        return float(-self.rates[i, i])


def build_generator(design: FlexibilityDesign, params: SystemParams) -> GeneratorMatrix:
    design = FlexibilityDesign.parse(design)
    if design is FlexibilityDesign.INDEPENDENT:
        raise UnsupportedDesign("independent has product form; use throughput")
    n = len(state_space(design))
    q = kernels.fill_generator(_TABLES[design], n, params.rho, params.k, params.gamma)
    return GeneratorMatrix(design, params, q)


def _solve_lu(q: np.ndarray) -> np.ndarray:
    # last balance equation replaced by the normalisation row; LAPACK gesv pivots partially
    a = q.T.copy()
    a[-1, :] = 1.0
    b = np.zeros(q.shape[0])
    b[-1] = 1.0
    try:
        x = np.linalg.solve(a, b)
    except np.linalg.LinAlgError as exc:
        raise SingularChain(str(exc)) from None
    # structural zeros (unreachable states at k=0) come back as +-1e-14 round-off
    if x.min() < -LU_NEGATIVE_TOL:
        raise SingularChain(f"LU solve produced a probability of {x.min()!r}")
    x = np.where(x < 0.0, 0.0, x)
    return x / x.sum()


def stationary_distribution(gen: GeneratorMatrix, method: str = "gth") -> StationaryDistribution:
    """Solve ``pi Q = 0, sum(pi) = 1``.

    ``method="gth"`` (default) runs subtraction-free state reduction, which keeps
    every entry accurate to a few ulps relative even when it is tiny.
    ``method="lu"`` swaps the last balance equation for the normalisation row and
    solves with partial pivoting. Both are exact in the sense of ``pi Q = 0``
    for ``gamma`` down to about 1e-300; below that the reduction overflows and
    :class:`SingularChain` is raised.

    At ``gamma == 0`` the full chain is absorbed in (2,1) and the solve raises
    :class:`SingularChain`; the partial chain gets its closed form.
    """
    design, params = gen.design, gen.params
    if params.gamma == 0.0:
        if design is FlexibilityDesign.FULL:
            raise SingularChain(
                "full design with gamma=0 is absorbing; use closed_form.stationary_gamma_zero"
            )
        from .closed_form import stationary_gamma_zero

        return stationary_gamma_zero(design, params)
    q = np.asarray(gen.rates)
    if method == "gth":
        p = kernels.gth(q)
        if not np.isfinite(p).all():
            raise SingularChain(
                f"state reduction overflowed at gamma={params.gamma!r}: rates this close to zero "
                "are not representable; use gamma=0 for the limiting distribution"
            )
    elif method == "lu":
        p = _solve_lu(q)
    else:
        raise ValueError(f"unknown method {method!r}")
    return StationaryDistribution(design, p)


def balance_residual(gen: GeneratorMatrix, dist: StationaryDistribution) -> float:
    """Infinity norm of ``pi Q``."""
    return float(np.abs(dist.probabilities @ gen.rates).max())


def throughput_from_distribution(dist: StationaryDistribution, params: SystemParams) -> float:
    """Accepted customers per unit time from blocking probabilities (PASTA)."""
    # summed over accepting states rather than 1 - P(blocking): no cancellation under heavy load
    p = dist
    rho, k = params.rho, params.k
    if dist.design is FlexibilityDesign.FULL:
        return (k + 1) * rho * (p[0, 0] + p[0, 1] + p[0, 2] + p[1, 0] + p[2, 0])
    return rho * (p[0, 0] + p[0, 1] + p[0, 2] + p[1, 0]) + k * rho * (p[0, 0] + p[1, 0])


def throughput(design: FlexibilityDesign, params: SystemParams, method: str = "gth") -> float:
    """Long-run throughput of ``design``.

    Independent uses the two-Erlang-loss closed form; the joint chains use the
    stationary solve, or the absorbing-class distribution when ``gamma == 0``.
    """
    design = FlexibilityDesign.parse(design)
    rho, k = params.rho, params.k
    if design is FlexibilityDesign.INDEPENDENT:
        return rho / (rho + 1) + k * rho / (k * rho + 1)
    if params.gamma == 0.0:
        from .closed_form import stationary_gamma_zero

        dist = stationary_gamma_zero(design, params)
    else:
        dist = stationary_distribution(build_generator(design, params), method=method)
    return float(throughput_from_distribution(dist, params))


def fast_throughput(design: FlexibilityDesign, rho: float, k: float, gamma: float) -> float:
    """Kernel-only throughput with no validation or wrapping; for inner loops."""
    return float(kernels.design_throughput(design_code(design), float(rho), float(k), float(gamma),
                                           FULL_TABLE, PARTIAL_TABLE))

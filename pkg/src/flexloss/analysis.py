"""Flexibility thresholds, throughput-ordering regimes and optimal designs.

For fixed ``(rho, k)`` with ``0 < k < 1`` three prolonged coefficients split
``gamma`` into four ordering regimes::

    gamma_g = k*rho/(k*rho + 1)   T_partial == T_independent  (closed form)
    gamma_b                       T_full    == T_independent  (bisection)
    gamma_r                       T_full    == T_partial      (bisection)

with ``0 < gamma_g < gamma_b < gamma_r < rho/(rho + 1)``. Each throughput gap
is negative at gamma -> 0 and positive at gamma = 1 and crosses zero once, so
plain bisection on the gap is guaranteed to converge.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

from . import kernels
from .core import FlexibilityDesign, SystemParams, validate_params
from .ctmc import FULL_TABLE, PARTIAL_TABLE
from .errors import (
    BracketError,
    DomainError,
    InconsistentOrdering,
    OrderingViolation,
    TieBreakUnresolved,
)

__all__ = [
    "ThresholdSet",
    "RegimeOrdering",
    "LevelSetCurve",
    "LevelSets",
    "gamma_g",
    "gamma_r",
    "gamma_b",
    "gamma_r_limit_k0",
    "thresholds",
    "design_throughputs",
    "classify_regime",
    "optimal_design",
    "critical_rho_symmetric",
    "trace_level_sets",
    "DEFAULT_TOL",
    "TIE_TOL",
]

DEFAULT_TOL = 1e-10
TIE_TOL = 1e-9
BRACKET_EPS = 1e-12
MAX_BISECTIONS = 200

IS, PS, FS = FlexibilityDesign.INDEPENDENT, FlexibilityDesign.PARTIAL, FlexibilityDesign.FULL

# ordering regimes, each listed from smallest to largest throughput
REGIMES = {
    1: (FS, PS, IS),
    2: (FS, IS, PS),
    3: (IS, FS, PS),
    4: (IS, PS, FS),
}


@dataclass(frozen=True)
class ThresholdSet:
    rho: float
    k: float
    gamma_g: float
    gamma_b: float
    gamma_r: float
    degenerate: bool = False
    # one-sided limit of gamma_r as k -> 0+, filled only for the degenerate k = 0 report
    gamma_r_limit: float | None = None

    @property
    def upper_bound(self) -> float:
        return self.rho / (self.rho + 1)

    def as_tuple(self) -> tuple[float, float, float]:
        return self.gamma_g, self.gamma_b, self.gamma_r


@dataclass(frozen=True)
class RegimeOrdering:
    ordering: tuple[FlexibilityDesign, FlexibilityDesign, FlexibilityDesign]
    regime_index: int
    throughputs: dict = field(default_factory=dict, compare=False)

    @property
    def optimal(self) -> FlexibilityDesign:
        return self.ordering[-1]

    def __str__(self) -> str:
        return " < ".join(f"T_{d.short}" for d in self.ordering)


@dataclass(frozen=True)
class LevelSetCurve:
    rho: float
    which: str  # "A_r", "A_b" or "A_g"
    points: tuple[tuple[float, float], ...]

    @property
    def ks(self) -> list[float]:
        return [p[0] for p in self.points]

    @property
    def gammas(self) -> list[float]:
        return [p[1] for p in self.points]


class LevelSets(NamedTuple):
    green: LevelSetCurve  # A_g
    blue: LevelSetCurve  # A_b
    red: LevelSetCurve  # A_r


def _check_rho(rho) -> float:
    return validate_params(rho, 0.0, 0.0).rho


def _check_k(k, allow_zero: bool = False, allow_one: bool = True) -> float:
    k = validate_params(1.0, k, 0.0).k
    if k == 0.0 and not allow_zero:
        raise DomainError("k", "k = 0 is degenerate: the level set collapses (every gamma ties)")
    if k == 1.0 and not allow_one:
        raise DomainError("k", "k must lie in (0, 1)")
    return k


def _check_tol(tol) -> float:
    tol = float(tol)
    if not (tol > 0.0 and math.isfinite(tol)):
        raise DomainError("tol", f"tol must be a positive real, got {tol!r}")
    return tol


def gamma_g(rho: float, k: float) -> float:
    """Partial/independent crossover, ``k*rho/(k*rho + 1)``."""
    rho = _check_rho(rho)
    k = _check_k(k)
    return k * rho / (k * rho + 1)


def _bisect(pair: int, name: str, rho: float, k: float, tol: float) -> float:
    root, f_lo, f_hi, _ = kernels.bisect_gap(
        pair, rho, k, BRACKET_EPS, 1.0 - BRACKET_EPS, tol, MAX_BISECTIONS, FULL_TABLE, PARTIAL_TABLE
    )
    if math.isnan(root):
        raise BracketError(
            f"{name}: no sign change on [{BRACKET_EPS}, 1-{BRACKET_EPS}] for rho={rho}, k={k} "
            f"(f_lo={f_lo!r}, f_hi={f_hi!r})"
        )
    if not root < rho / (rho + 1):
        raise OrderingViolation(f"{name}={root!r} is not below rho/(rho+1) for rho={rho}, k={k}")
    return float(root)


def gamma_r(rho: float, k: float, tol: float = DEFAULT_TOL) -> float:
    """Full/partial crossover. ``k = 0`` raises: the two designs coincide there."""
    rho = _check_rho(rho)
    k = _check_k(k)
    tol = _check_tol(tol)
    if k == 1.0:
        return rho / (rho + 1)
    return _bisect(kernels.PAIR_R, "gamma_r", rho, k, tol)


def gamma_b(rho: float, k: float, tol: float = DEFAULT_TOL) -> float:
    """Full/independent crossover; 0 at ``k = 0`` (degenerate)."""
    rho = _check_rho(rho)
    k = _check_k(k, allow_zero=True)
    tol = _check_tol(tol)
    if k == 0.0:
        return 0.0
    if k == 1.0:
        return rho / (rho + 1)
    return _bisect(kernels.PAIR_B, "gamma_b", rho, k, tol)


def gamma_r_limit_k0(rho: float, tol: float = DEFAULT_TOL) -> float:
    """One-sided limit of ``gamma_r`` as ``k -> 0+``.

    ``gamma_r`` is smooth in ``k`` near 0, so a first-order Richardson step from
    two tiny ``k`` values removes the linear term.
    """
    rho = _check_rho(rho)
    k1 = 1e-6
    r1 = _bisect(kernels.PAIR_R, "gamma_r", rho, k1, tol)
    r2 = _bisect(kernels.PAIR_R, "gamma_r", rho, 2 * k1, tol)
    return 2 * r1 - r2


def thresholds(rho: float, k: float, tol: float = DEFAULT_TOL) -> ThresholdSet:
    """All three crossovers for ``(rho, k)``, checked for strict ordering.

    ``k = 1`` returns the common value ``rho/(rho+1)``; ``k = 0`` returns the
    degenerate all-zero report together with the one-sided ``gamma_r`` limit.
    """
    rho = _check_rho(rho)
    k = _check_k(k, allow_zero=True)
    tol = _check_tol(tol)
    top = rho / (rho + 1)
    if k == 1.0:
        return ThresholdSet(rho, k, top, top, top, degenerate=True)
    if k == 0.0:
        return ThresholdSet(rho, k, 0.0, 0.0, 0.0, degenerate=True,
                            gamma_r_limit=gamma_r_limit_k0(rho, tol))
    g = k * rho / (k * rho + 1)
    b = _bisect(kernels.PAIR_B, "gamma_b", rho, k, tol)
    r = _bisect(kernels.PAIR_R, "gamma_r", rho, k, tol)
    if not (0.0 < g < b - tol and b < r - tol and r < top):
        raise OrderingViolation(
            f"expected 0 < gamma_g < gamma_b < gamma_r < rho/(rho+1), got {g!r}, {b!r}, {r!r}, {top!r}"
        )
    return ThresholdSet(rho, k, g, b, r)


def design_throughputs(params: SystemParams) -> dict[FlexibilityDesign, float]:
    """Throughputs of all three designs via the fast kernels."""
    out = {}
    for design, code in ((IS, kernels.INDEPENDENT), (PS, kernels.PARTIAL), (FS, kernels.FULL)):
        out[design] = float(kernels.design_throughput(
            code, params.rho, params.k, params.gamma, FULL_TABLE, PARTIAL_TABLE))
    return out


def _regime_from_thresholds(params: SystemParams, tie_tol: float) -> int:
    rho, k, gamma = params.rho, params.k, params.gamma
    if k == 0.0:
        raise TieBreakUnresolved("k = 0: full and partial designs have identical throughput",
                                 tied=(PS, FS))
    if gamma == 0.0:
        return 1
    if gamma == 1.0:
        return 4
    if k == 1.0:
        top = rho / (rho + 1)
        if abs(gamma - top) <= tie_tol:
            raise TieBreakUnresolved("gamma = rho/(rho+1): all three designs tie", tied=(IS, PS, FS))
        return 4 if gamma > top else 1
    ts = thresholds(rho, k)
    for value, tied in ((ts.gamma_g, (PS, IS)), (ts.gamma_b, (FS, IS)), (ts.gamma_r, (FS, PS))):
        if abs(gamma - value) <= tie_tol:
            raise TieBreakUnresolved(
                f"gamma={gamma!r} is within {tie_tol:g} of a threshold ({value!r})", tied=tied)
    if gamma < ts.gamma_g:
        return 1
    if gamma < ts.gamma_b:
        return 2
    if gamma < ts.gamma_r:
        return 3
    return 4


def classify_regime(params: SystemParams, tie_tol: float = TIE_TOL) -> RegimeOrdering:
    """Ordering of the three throughputs predicted from the thresholds.

    The prediction is cross-checked against the directly computed throughputs;
    disagreement raises :class:`InconsistentOrdering`. A gamma within
    ``tie_tol`` of a threshold raises :class:`TieBreakUnresolved`.
    """
    index = _regime_from_thresholds(params, tie_tol)
    ordering = REGIMES[index]
    values = design_throughputs(params)
    observed = tuple(sorted(values, key=values.__getitem__))
    if observed != ordering:
        raise InconsistentOrdering(
            f"thresholds predict {ordering} but throughputs give {observed} at {params}: {values}")
    return RegimeOrdering(ordering, index, values)


def optimal_design(params: SystemParams, tie_tol: float = TIE_TOL) -> FlexibilityDesign:
    """Throughput-maximising design: independent below gamma_g, partial up to gamma_r, then full."""
    return classify_regime(params, tie_tol).optimal


def critical_rho_symmetric(gamma: float) -> float:
    """Workload ``gamma/(1-gamma)`` where the symmetric ordering flips.

    Below it full flexibility is best; above it independent servers are best.
    """
    g = validate_params(1.0, 1.0, gamma).gamma
    if g == 1.0:
        raise DomainError("gamma", "Unbounded: at gamma=1 full flexibility wins for every rho")
    if g == 0.0:
        raise DomainError("gamma", "gamma must lie in (0, 1)")
    return g / (1 - g)


def trace_level_sets(rho: float, k_grid: Sequence[float], tol: float = DEFAULT_TOL) -> LevelSets:
    """Trace the three crossover curves over ``k_grid`` (strictly increasing, inside (0, 1))."""
    rho = _check_rho(rho)
    tol = _check_tol(tol)
    ks = [float(k) for k in k_grid]
    if not ks:
        raise DomainError("k_grid", "k_grid must not be empty")
    for k in ks:
        if not 0.0 < k < 1.0:
            raise DomainError("k_grid", f"grid values must lie in (0, 1), got {k!r}")
    if any(b <= a for a, b in zip(ks, ks[1:])):
        raise DomainError("k_grid", "k_grid must be strictly increasing")
    rows = [thresholds(rho, k, tol) for k in ks]
    return LevelSets(
        green=LevelSetCurve(rho, "A_g", tuple((t.k, t.gamma_g) for t in rows)),
        blue=LevelSetCurve(rho, "A_b", tuple((t.k, t.gamma_b) for t in rows)),
        red=LevelSetCurve(rho, "A_r", tuple((t.k, t.gamma_r) for t in rows)),
    )

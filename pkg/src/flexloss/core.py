"""Domain types for the two-server, two-type loss system.

Parameters are rescaled so that the type-1 arrival rate is ``rho``, the type-2
arrival rate is ``k * rho``, a dedicated server completes service at rate 1 and
a non-dedicated server at rate ``gamma``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum, IntEnum
from typing import Iterator, NamedTuple

import numpy as np

from .errors import DomainError, UnsupportedDesign

__all__ = [
    "SystemParams",
    "FlexibilityDesign",
    "ServerOccupancy",
    "SystemState",
    "StationaryDistribution",
    "validate_params",
    "state_space",
    "state_index",
]

NORMALIZATION_TOL = 1e-12
NEGATIVE_CLAMP_TOL = 1e-14


@dataclass(frozen=True)
class SystemParams:
    rho: float
    k: float
    gamma: float

    def __post_init__(self):
        checked = validate_params(self.rho, self.k, self.gamma)
        for name in ("rho", "k", "gamma"):
            object.__setattr__(self, name, getattr(checked, name))

    @property
    def arrival_rates(self) -> tuple[float, float]:
        return self.rho, self.k * self.rho

    def replace(self, **changes) -> "SystemParams":
        values = {"rho": self.rho, "k": self.k, "gamma": self.gamma}
        values.update(changes)
        return SystemParams(**values)


class FlexibilityDesign(Enum):
    INDEPENDENT = "independent"
    PARTIAL = "partial"
    FULL = "full"

    @classmethod
    def parse(cls, value: "str | FlexibilityDesign") -> "FlexibilityDesign":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).strip().lower())
        except ValueError:
            raise DomainError("design", f"unknown design {value!r}; expected one of "
                              + ", ".join(d.value for d in cls)) from None

    @property
    def short(self) -> str:
        return {"independent": "is", "partial": "ps", "full": "fs"}[self.value]


class ServerOccupancy(IntEnum):
    IDLE = 0
    TYPE1 = 1
    TYPE2 = 2


class SystemState(NamedTuple):
    """Occupancy of (server 1, server 2). Compares and hashes like ``(i, j)``."""

    server1: ServerOccupancy
    server2: ServerOccupancy

    def __str__(self) -> str:
        return f"({int(self.server1)},{int(self.server2)})"


def _finite_real(field: str, value) -> float:
    if isinstance(value, bool):
        raise DomainError(field, f"{field} must be a real number, got {value!r}")
    try:
        x = float(value)
    except (TypeError, ValueError):
        raise DomainError(field, f"{field} must be a real number, got {value!r}") from None
    if not math.isfinite(x):
        raise DomainError(field, f"{field} must be finite, got {value!r}")
    return x


def validate_params(rho, k, gamma) -> SystemParams:
    """Check a ``(rho, k, gamma)`` triple and return it as :class:`SystemParams`.

    Fields are checked in the order rho, k, gamma; the first violation raises
    :class:`DomainError` naming that field. The unit-interval boundaries of
    ``k`` and ``gamma`` are accepted.
    """
    rho_f = _finite_real("rho", rho)
    if rho_f <= 0.0:
        raise DomainError("rho", f"rho must be strictly positive, got {rho!r}")
    k_f = _finite_real("k", k)
    if not 0.0 <= k_f <= 1.0:
        raise DomainError("k", f"k must lie in [0, 1], got {k!r}")
    gamma_f = _finite_real("gamma", gamma)
    if not 0.0 <= gamma_f <= 1.0:
        raise DomainError("gamma", f"gamma must lie in [0, 1], got {gamma!r}")
    params = object.__new__(SystemParams)
    object.__setattr__(params, "rho", rho_f)
    object.__setattr__(params, "k", k_f)
    object.__setattr__(params, "gamma", gamma_f)
    return params


_SPACES = {
    FlexibilityDesign.FULL: tuple(
        SystemState(ServerOccupancy(i), ServerOccupancy(j)) for i in range(3) for j in range(3)
    ),
    FlexibilityDesign.PARTIAL: tuple(
        SystemState(ServerOccupancy(i), ServerOccupancy(j)) for i in range(2) for j in range(3)
    ),
}
_INDEX = {design: {s: n for n, s in enumerate(states)} for design, states in _SPACES.items()}


def state_space(design: FlexibilityDesign) -> list[SystemState]:
    """Legal states of the joint chain, row-major in (server1, server2).

    The independent design has product form and no joint chain, so it raises
    :class:`UnsupportedDesign`.
    """
    design = FlexibilityDesign.parse(design)
    if design is FlexibilityDesign.INDEPENDENT:
        raise UnsupportedDesign("independent has product form; use throughput")
    return list(_SPACES[design])


def state_index(design: FlexibilityDesign, state) -> int:
    design = FlexibilityDesign.parse(design)
    if design is FlexibilityDesign.INDEPENDENT:
        raise UnsupportedDesign("independent has product form; use throughput")
    try:
        return _INDEX[design][tuple(state)]
    except KeyError:
        raise KeyError(f"state {tuple(state)} is not legal for the {design.value} design") from None


@dataclass(frozen=True, eq=False)
class StationaryDistribution:
    """Stationary probabilities over a design's state space, in canonical order."""

    design: FlexibilityDesign
    probabilities: np.ndarray

    def __post_init__(self):
        states = state_space(self.design)
        p = np.array(self.probabilities, dtype=float)
        if p.shape != (len(states),):
            raise ValueError(f"expected {len(states)} probabilities, got shape {p.shape}")
        if np.any(p < -NEGATIVE_CLAMP_TOL) or not np.all(np.isfinite(p)):
            raise ValueError("stationary probabilities must be finite and non-negative")
        if np.any(p < 0.0):
            p = np.maximum(p, 0.0)
            p /= p.sum()
        if abs(p.sum() - 1.0) > NORMALIZATION_TOL:
            raise ValueError(f"probabilities sum to {p.sum()!r}, not 1")
        p.setflags(write=False)
        object.__setattr__(self, "probabilities", p)

    @property
    def states(self) -> list[SystemState]:
        return state_space(self.design)

    def __getitem__(self, state) -> float:
        return float(self.probabilities[state_index(self.design, state)])

    def __iter__(self) -> Iterator[tuple[SystemState, float]]:
        return iter(zip(self.states, self.probabilities.tolist()))

    def __len__(self) -> int:
        return len(self.probabilities)

    def as_dict(self) -> dict[SystemState, float]:
        return dict(self)

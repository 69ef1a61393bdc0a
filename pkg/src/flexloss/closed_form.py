"""Closed-form stationary distributions and throughputs for gamma=1, k=1 and gamma=0.

The expressions are kept in factored numerator/denominator form and serve
both as fast paths and as oracles for the linear solve in :mod:`flexloss.ctmc`.
"""

from __future__ import annotations

from enum import Enum

import numpy as np

from .core import FlexibilityDesign, StationaryDistribution, SystemParams
from .errors import CaseMismatch, UnsupportedDesign

__all__ = [
    "ClosedFormCase",
    "stationary_full_identical",
    "stationary_partial_identical",
    "stationary_full_symmetric",
    "stationary_partial_symmetric",
    "stationary_gamma_zero",
    "throughput_closed",
    "applicable_cases",
]


class ClosedFormCase(Enum):
    IDENTICAL_SERVICE = "identical"  # gamma == 1
    SYMMETRIC = "symmetric"  # k == 1
    GAMMA_ZERO = "gamma0"  # gamma == 0
    INDEPENDENT_ANY = "independent"


def applicable_cases(params: SystemParams) -> list[ClosedFormCase]:
    cases = [ClosedFormCase.INDEPENDENT_ANY]
    if params.gamma == 1.0:
        cases.append(ClosedFormCase.IDENTICAL_SERVICE)
    if params.k == 1.0 and params.gamma > 0.0:
        cases.append(ClosedFormCase.SYMMETRIC)
    if params.gamma == 0.0:
        cases.append(ClosedFormCase.GAMMA_ZERO)
    return cases


def _require(params: SystemParams, case: ClosedFormCase) -> None:
    if case is ClosedFormCase.IDENTICAL_SERVICE and params.gamma != 1.0:
        raise CaseMismatch("gamma", f"identical-service forms need gamma=1, got {params.gamma}")
    if case is ClosedFormCase.SYMMETRIC:
        if params.k != 1.0:
            raise CaseMismatch("k", f"symmetric forms need k=1, got {params.k}")
        if params.gamma == 0.0:
            raise CaseMismatch("gamma", "symmetric forms divide by gamma; use the gamma=0 case")
    if case is ClosedFormCase.GAMMA_ZERO and params.gamma != 0.0:
        raise CaseMismatch("gamma", f"gamma=0 forms need gamma=0, got {params.gamma}")


def _full(values: dict) -> StationaryDistribution:
    order = [(0, 0), (0, 1), (0, 2), (1, 0), (1, 1), (1, 2), (2, 0), (2, 1), (2, 2)]
    return StationaryDistribution(FlexibilityDesign.FULL, np.array([values[s] for s in order]))


def _partial(values: dict) -> StationaryDistribution:
    order = [(0, 0), (0, 1), (0, 2), (1, 0), (1, 1), (1, 2)]
    return StationaryDistribution(FlexibilityDesign.PARTIAL, np.array([values[s] for s in order]))


def stationary_full_identical(params: SystemParams) -> StationaryDistribution:
    _require(params, ClosedFormCase.IDENTICAL_SERVICE)
    r, k = params.rho, params.k
    p00 = 2 / (k**2 * r**2 + 2 * k * r**2 + 2 * k * r + r**2 + 2 * r + 2)
    d = 2 * k**2 * r**2 + 4 * k * r**2 + 6 * k * r + 2 * r**2 + 6 * r + 4
    e = 2 * r + 2 * k * r + 4
    return _full({
        (0, 0): p00,
        (1, 0): r * (k**2 * r**2 + 2 * k * r**2 + 6 * k * r + r**2 + 4 * r + 4) / d * p00,
        (0, 1): r**2 * (r * k**2 + 2 * r * k + r + 2) / d * p00,
        (0, 2): k * r * (k**2 * r**2 + 2 * k * r**2 + 4 * k * r + r**2 + 6 * r + 4) / d * p00,
        (2, 0): k * r**2 * (2 * k + r + 2 * k * r + k**2 * r) / d * p00,
        (1, 1): r**2 / 2 * p00,
        (1, 2): k * r**2 * (r + k * r + 4) / e * p00,
        (2, 1): k * r**3 * (k + 1) / e * p00,
        (2, 2): k**2 * r**2 / 2 * p00,
    })


def stationary_partial_identical(params: SystemParams) -> StationaryDistribution:
    _require(params, ClosedFormCase.IDENTICAL_SERVICE)
    r, k = params.rho, params.k
    p00 = (2 * r + k * r + 2) / ((r + 1) * (k**2 * r**2 + 2 * k * r**2 + 3 * k * r + r**2 + 2 * r + 2))
    e = 2 * r + k * r + 2
    return _partial({
        (0, 0): p00,
        (1, 0): r * (r + k * r + 2) / e * p00,
        (0, 1): r**2 * (r + k * r + 2) / ((r + 2) * e) * p00,
        (0, 2): k * r * (6 * r + 2 * k * r + k * r**2 + r**2 + 4) / ((r + 2) * e) * p00,
        (1, 1): r**2 * (r + 1) * (r + k * r + 2) / ((r + 2) * e) * p00,
        (1, 2): k * r**2 * (5 * r + 2 * k * r + k * r**2 + r**2 + 4) / ((r + 2) * e) * p00,
    })


def stationary_full_symmetric(params: SystemParams) -> StationaryDistribution:
    _require(params, ClosedFormCase.SYMMETRIC)
    r, g = params.rho, params.gamma
    p00 = (g**3 + g**2 + 2 * g**2 * r) / (
        g**2 * (r + 1) ** 3 + g**3 * (r + 1) ** 2 + r * (r + g) ** 2 + 2 * g * r**2 * (r + g)
    )
    a = g**2 + g + 2 * g * r
    b = g + 2 * r + 1
    return _full({
        (0, 0): p00,
        (0, 1): r**2 / a * p00,
        (0, 2): (r**2 + (g + 1) * r) / b * p00,
        (1, 0): (r**2 + (g + 1) * r) / b * p00,
        (1, 1): (r**3 + g * r**2) / a * p00,
        (1, 2): (r**3 + (g + 1) * r**2) / b * p00,
        (2, 0): r**2 / a * p00,
        (2, 1): r**3 / (g**3 + g**2 + 2 * g**2 * r) * p00,
        (2, 2): (r**3 + g * r**2) / a * p00,
    })


def stationary_partial_symmetric(params: SystemParams) -> StationaryDistribution:
    _require(params, ClosedFormCase.SYMMETRIC)
    r, g = params.rho, params.gamma
    p00 = (2 * g**2 * r + 2 * g**2 + 3 * g * r**2 + 6 * g * r + 2 * g) / (
        (r + 1) * (2 * g**2 * (r + 1) ** 2 + g * (2 * r**3 + 9 * r**2 + 8 * r + 2) + 2 * r**2 * (r + 1))
    )
    c = 2 * g + 6 * r + 2 * g * r + 3 * r**2 + 2
    return _partial({
        (0, 0): p00,
        (1, 0): 2 * r * (r + 1) * (g + r + 1) / c * p00,
        (0, 1): 2 * r**2 * (r + 1) / (g * c) * p00,
        (0, 2): 2 * r * (g + 3 * r + g * r + r**2 + 1) / c * p00,
        (1, 1): 2 * r**2 * (g + r) * (r + 1) / (g * c) * p00,
        (1, 2): r**2 * (2 * g + 5 * r + 2 * g * r + 2 * r**2 + 2) / c * p00,
    })


def stationary_gamma_zero(design: FlexibilityDesign, params: SystemParams) -> StationaryDistribution:
    """Limit distribution when overflowed customers never finish.

    Full with k > 0 ends in (2,1) with certainty. Otherwise server 2 ends up
    frozen by a type-1 overflow while server 1 behaves as an M/M/1/1 loss
    system, giving mass 1/(rho+1) on (0,1) and rho/(rho+1) on (1,1). For the
    full design this also covers k = 0, where type-2 customers never arrive.
    """
    _require(params, ClosedFormCase.GAMMA_ZERO)
    design = FlexibilityDesign.parse(design)
    r = params.rho
    if design is FlexibilityDesign.INDEPENDENT:
        raise UnsupportedDesign("independent has product form; use throughput")
    if design is FlexibilityDesign.FULL:
        values = dict.fromkeys([(i, j) for i in range(3) for j in range(3)], 0.0)
        if params.k > 0.0:
            values[2, 1] = 1.0
        else:
            values[0, 1] = 1 / (r + 1)
            values[1, 1] = r / (r + 1)
        return _full(values)
    values = dict.fromkeys([(i, j) for i in range(2) for j in range(3)], 0.0)
    values[0, 1] = 1 / (r + 1)
    values[1, 1] = r / (r + 1)
    return _partial(values)


def throughput_closed(design: FlexibilityDesign, case: ClosedFormCase, params: SystemParams) -> float:
    """Evaluate the closed-form throughput for ``case``."""
    design = FlexibilityDesign.parse(design)
    case = ClosedFormCase(case)
    r, k, g = params.rho, params.k, params.gamma
    if design is FlexibilityDesign.INDEPENDENT and case is not ClosedFormCase.SYMMETRIC:
        _require(params, case)
        if case is ClosedFormCase.IDENTICAL_SERVICE:
            return (2 * k * r**2 + (k + 1) * r) / ((r + 1) * (k * r + 1))
        return r / (r + 1) + k * r / (k * r + 1)
    if case is ClosedFormCase.INDEPENDENT_ANY:
        raise CaseMismatch("design", "the product-form case only covers the independent design")
    if design is FlexibilityDesign.INDEPENDENT:
        if k != 1.0:
            raise CaseMismatch("k", f"symmetric forms need k=1, got {k}")
        return 2 * r / (r + 1)
    _require(params, case)
    if case is ClosedFormCase.IDENTICAL_SERVICE:
        if design is FlexibilityDesign.FULL:
            return 2 * r * (k + 1) * (r + k * r + 1) / (
                k**2 * r**2 + 2 * k * r**2 + 2 * k * r + r**2 + 2 * r + 2)
        return r * (2 * k**2 * r**2 + k**2 * r + 4 * k * r**2 + 7 * k * r + 2 * k + 2 * r**2 + 4 * r + 2) / (
            (r + 1) * (k**2 * r**2 + 2 * k * r**2 + 3 * k * r + r**2 + 2 * r + 2))
    if case is ClosedFormCase.SYMMETRIC:
        if design is FlexibilityDesign.FULL:
            return 2 * g * r * (2 * g**2 * r + g**2 + 2 * g * r**2 + 4 * g * r + g + 2 * r**2) / (
                g**3 * (r + 1) ** 2 + g**2 * (r**3 + 5 * r**2 + 4 * r + 1) + 2 * g * r**2 * (r + 1) + r**3)
        return 2 * r * (3 * g**2 * r + 2 * g**2 + 3 * g * r**2 + 7 * g * r + 2 * g + r**2) / (
            2 * g**2 * (r + 1) ** 2 + g * (2 * r**3 + 9 * r**2 + 8 * r + 2) + 2 * r**2 * (r + 1))
    # gamma == 0
    if design is FlexibilityDesign.FULL:
        return 0.0 if k > 0.0 else r / (r + 1)
    return r / (r + 1)

import math

import numpy as np
import pytest

from flexloss import (
    DomainError,
    FlexibilityDesign,
    StationaryDistribution,
    SystemParams,
    SystemState,
    UnsupportedDesign,
    state_space,
    validate_params,
)
from flexloss.core import state_index


def test_validate_accepts_in_range():
    p = validate_params(1.0, 0.5, 0.45)
    assert (p.rho, p.k, p.gamma) == (1.0, 0.5, 0.45)


@pytest.mark.parametrize("args,field", [
    ((0.0, 0.5, 0.5), "rho"),
    ((-1.0, 0.5, 0.5), "rho"),
    ((1.0, 1.3, 0.5), "k"),
    ((1.0, -0.1, 0.5), "k"),
    ((1.0, 0.5, 1.01), "gamma"),
    ((1.0, 0.5, -1e-9), "gamma"),
    ((math.nan, 0.5, 0.5), "rho"),
    ((math.inf, 0.5, 0.5), "rho"),
    ((1.0, math.nan, 0.5), "k"),
    ((1.0, 0.5, math.inf), "gamma"),
    ((True, 0.5, 0.5), "rho"),
])
def test_validate_rejects(args, field):
    with pytest.raises(DomainError) as exc:
        validate_params(*args)
    assert exc.value.field == field


def test_params_coerced_to_float():
    p = SystemParams(2, 1, 0)
    assert isinstance(p.rho, float) and isinstance(p.gamma, float)
    assert p.arrival_rates == (2.0, 2.0)
    assert p.replace(gamma=0.5).gamma == 0.5


def test_boundaries_accepted():
    for k in (0.0, 1.0):
        for g in (0.0, 1.0):
            validate_params(1e-9, k, g)


def test_state_space_full():
    expected = [(0, 0), (0, 1), (0, 2), (1, 0), (1, 1), (1, 2), (2, 0), (2, 1), (2, 2)]
    assert [tuple(s) for s in state_space(FlexibilityDesign.FULL)] == expected


def test_state_space_partial():
    expected = [(0, 0), (0, 1), (0, 2), (1, 0), (1, 1), (1, 2)]
    assert [tuple(s) for s in state_space("partial")] == expected


def test_state_space_independent_unsupported():
    with pytest.raises(UnsupportedDesign):
        state_space(FlexibilityDesign.INDEPENDENT)


def test_state_index_roundtrip():
    for design in ("full", "partial"):
        for i, s in enumerate(state_space(design)):
            assert state_index(design, s) == i


def test_state_str():
    assert str(SystemState(2, 1)) == "(2,1)"


def test_design_parse():
    assert FlexibilityDesign.parse("FULL") is FlexibilityDesign.FULL
    assert FlexibilityDesign.parse(FlexibilityDesign.PARTIAL) is FlexibilityDesign.PARTIAL
    assert FlexibilityDesign.INDEPENDENT.short == "is"
    with pytest.raises(ValueError):
        FlexibilityDesign.parse("chained")


def test_distribution_clamps_and_normalises():
    p = np.array([0.5, 0.5, -1e-15, 0, 0, 0])
    d = StationaryDistribution(FlexibilityDesign.PARTIAL, p)
    assert d[(0, 2)] == 0.0
    assert d[0, 0] == 0.5
    assert set(d.as_dict()) == set(state_space("partial"))
    with pytest.raises(ValueError):
        d.probabilities[0] = 1.0


def test_distribution_rejects_bad_input():
    with pytest.raises(ValueError):
        StationaryDistribution(FlexibilityDesign.PARTIAL, np.array([0.5, 0.6, 0, 0, 0, 0]))
    with pytest.raises(ValueError):
        StationaryDistribution(FlexibilityDesign.PARTIAL, np.array([1.1, -0.1, 0, 0, 0, 0]))
    with pytest.raises(ValueError):
        StationaryDistribution(FlexibilityDesign.FULL, np.ones(6) / 6)

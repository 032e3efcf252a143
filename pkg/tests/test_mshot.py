import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from twosource.discrimination import (
    DENSE_DIM_CAP,
    direct_guess,
    helstrom_m_shot,
    helstrom_one_shot,
    minimal_m,
)
from twosource.model import ScenarioKind, ScenarioParams

ASYM, SYM = ScenarioKind.ASYMMETRIC, ScenarioKind.SYMMETRIC


def _spread(report):
    return np.repeat(report.spectrum, report.multiplicity.astype(int))


@pytest.mark.parametrize("kind, m", [(ASYM, 2), (ASYM, 5), (ASYM, 9), (SYM, 2), (SYM, 4), (SYM, 6)])
@pytest.mark.parametrize("k, q, p1", [(0.5, 0.5, 0.5), (1.0, 0.2, 0.3), (2.0, 0.8, 0.6), (0.1, 0.5, 0.45)])
def test_fast_matches_dense(kind, m, k, q, p1):
    params = ScenarioParams(kind, k, q, p1)
    fast = helstrom_m_shot(params, m, method="fast")
    dense = helstrom_m_shot(params, m, method="dense")
    assert fast.e_min == pytest.approx(dense.e_min, abs=1e-12)
    assert fast.forbidden == dense.forbidden
    assert fast.trace_norm == pytest.approx(dense.trace_norm, abs=1e-11)
    full = np.sort(_spread(fast))
    assert full.size == dense.spectrum.size
    np.testing.assert_allclose(full, np.sort(dense.spectrum), atol=1e-12)


@settings(max_examples=40, deadline=None)
@given(
    st.sampled_from([ASYM, SYM]),
    st.floats(0.0, 4.0),
    st.floats(0.0, 1.0),
    st.floats(0.0, 1.0),
    st.integers(1, 4),
)
def test_fast_matches_dense_random(kind, k, q, p1, m):
    params = ScenarioParams(kind, k, q, p1)
    fast = helstrom_m_shot(params, m, method="fast")
    dense = helstrom_m_shot(params, m, method="dense")
    assert fast.e_min == pytest.approx(dense.e_min, abs=1e-11)
    assert fast.multiplicity.sum() == pytest.approx(params_dim(kind) ** m)


def params_dim(kind):
    return 2 if kind is ASYM else 3


@pytest.mark.parametrize("kind", [ASYM, SYM])
def test_single_shot_agrees(kind):
    params = ScenarioParams(kind, 0.8, 0.4, 0.55)
    assert helstrom_m_shot(params, 1).e_min == pytest.approx(helstrom_one_shot(params).e_min, abs=1e-14)


@pytest.mark.parametrize("kind", [ASYM, SYM])
def test_error_is_non_increasing_in_m(kind):
    params = ScenarioParams(kind, 0.7, 0.5, 0.5)
    errs = [helstrom_m_shot(params, m).e_min for m in range(1, 40)]
    assert all(b <= a + 1e-15 for a, b in zip(errs, errs[1:]))


def test_symmetric_large_m_decay_rate():
    # the bound decays as exp(-M k^2 / 16) at equal priors and equal brightness
    params = ScenarioParams(SYM, 1.0)
    ms = np.array([50, 100, 200, 350, 500])
    errs = np.array([helstrom_m_shot(params, int(m)).e_min for m in ms])
    slope = -np.polyfit(ms, np.log(errs), 1)[0]
    assert slope == pytest.approx(1 / 16, rel=1e-3)
    assert errs[-1] == pytest.approx(0.5 * math.exp(-500 / 16), rel=1e-9)


def test_asymmetric_large_m_is_finite_and_small():
    rep = helstrom_m_shot(ScenarioParams(ASYM, 1.0), 500)
    assert 0 < rep.e_min < 1e-20
    assert not rep.forbidden


def test_dense_cap():
    params = ScenarioParams(SYM, 1.0)
    m = int(math.floor(math.log(DENSE_DIM_CAP) / math.log(3))) + 1
    with pytest.raises(ValueError, match="fast path"):
        helstrom_m_shot(params, m, method="dense")


def test_bad_arguments():
    params = ScenarioParams(ASYM, 1.0)
    with pytest.raises(ValueError):
        helstrom_m_shot(params, 0)
    with pytest.raises(ValueError):
        helstrom_m_shot(params, 2, method="lanczos")


def test_forbidden_region_shrinks_with_m():
    # p1 = 0.25 < 1/3 is forbidden after one shot but not after two
    params = ScenarioParams(ASYM, 2.0, 0.5, 0.25)
    assert helstrom_m_shot(params, 1).forbidden
    assert not helstrom_m_shot(params, 2).forbidden


def test_coincident_sources_stay_forbidden():
    params = ScenarioParams(SYM, 0.0, 0.5, 0.3)
    rep = helstrom_m_shot(params, 30)
    assert rep.forbidden and rep.e_min == direct_guess(0.3)


@pytest.mark.parametrize(
    "q, k, p1, expected",
    [
        (0.5, 2.0, 0.25, 2),
        (0.5, 2.0, 0.15, 3),
        (0.5, 2.0, 0.1, 4),
        (0.5, 2.0, 0.05, 5),
        (0.1, 1.0, 0.05, 2),
        (0.9, 1.0, 0.3, 9),
        (0.5, 0.5, 0.2, 3),
    ],
)
def test_minimal_m_regression(q, k, p1, expected):
    params = ScenarioParams(ASYM, k, q, p1)
    rep = minimal_m(params, 50)
    assert rep.m_min == expected and not rep.exceeded
    # the answer is minimal: one shot fewer still loses to guessing
    assert rep.e_min_at_m < direct_guess(p1)
    if expected > 1:
        prev = helstrom_m_shot(params, expected - 1, method="dense")
        assert prev.forbidden


def test_minimal_m_outside_forbidden_region_is_one():
    assert minimal_m(ScenarioParams(ASYM, 1.0, 0.5, 0.5), 10).m_min == 1


def test_minimal_m_cap():
    rep = minimal_m(ScenarioParams(ASYM, 0.05, 0.5, 0.01), 5)
    assert rep.exceeded and rep.m_cap == 5
    with pytest.raises(ValueError):
        minimal_m(ScenarioParams(ASYM, 1.0), 0)

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from twosource.asymptotics import (
    asymptotic_error,
    chernoff_analytic,
    chernoff_numeric,
    psd_power,
    s_overlap,
)
from twosource.discrimination import helstrom_m_shot
from twosource.model import ScenarioKind, ScenarioParams, build_states

ASYM, SYM = ScenarioKind.ASYMMETRIC, ScenarioKind.SYMMETRIC


def test_psd_power_conventions():
    x = np.diag([0.7, 0.3, 0.0])
    np.testing.assert_allclose(psd_power(x, 0.0), np.diag([1.0, 1.0, 0.0]))
    np.testing.assert_allclose(psd_power(x, 1.0), x, atol=1e-15)
    np.testing.assert_allclose(psd_power(x, 0.5) @ psd_power(x, 0.5), x, atol=1e-15)


def test_s_overlap_matches_matrix_powers():
    pair = build_states(ScenarioParams(SYM, 1.2, 0.3))
    for s in (0.0, 0.25, 0.5, 0.9, 1.0):
        direct = np.trace(psd_power(pair.rho1, s) @ psd_power(pair.rho2, 1 - s))
        assert s_overlap(pair, s) == pytest.approx(direct, abs=1e-14)
    with pytest.raises(ValueError):
        s_overlap(pair, 1.5)


@pytest.mark.parametrize("kind", [ASYM, SYM])
@pytest.mark.parametrize("k", [0.1, 0.5, 1.0, 2.0, 3.0])
def test_numeric_matches_closed_form(kind, k):
    rep = chernoff_numeric(build_states(ScenarioParams(kind, k)))
    assert rep.xi == pytest.approx(chernoff_analytic(kind, k), abs=1e-12)
    assert rep.min_at_zero and rep.s_star == 0.0


@settings(max_examples=30, deadline=None)
@given(st.floats(0.05, 3.0), st.floats(0.0, 0.95))
def test_asymmetric_exponent_for_unequal_brightness(k, q):
    rep = chernoff_numeric(build_states(ScenarioParams(ASYM, k, q)))
    assert rep.xi == pytest.approx(chernoff_analytic(ASYM, k, q), abs=1e-11)


def test_closed_forms():
    assert chernoff_analytic(SYM, 2.0) == pytest.approx(0.25)
    assert chernoff_analytic(ASYM, 2.0) == pytest.approx(-math.log(0.5 + 0.5 * math.exp(-1)))
    # small-k expansion k^2/8 of the equal-brightness asymmetric exponent
    assert chernoff_analytic(ASYM, 1e-4) == pytest.approx(1e-8 / 8, rel=1e-6)
    assert chernoff_analytic(ASYM, 0.0) == 0.0
    with pytest.raises(ValueError):
        chernoff_analytic(ASYM, 1.0, q=2.0)


def test_coincident_exponent_is_zero():
    rep = chernoff_numeric(build_states(ScenarioParams(SYM, 0.0)))
    assert rep.xi == 0.0 and math.copysign(1.0, rep.xi) == 1.0


def test_asymptotic_error():
    assert asymptotic_error(0.0625, 50) == pytest.approx(0.02196846681170371, rel=1e-14)
    with pytest.raises(ValueError):
        asymptotic_error(-0.1, 3)
    with pytest.raises(ValueError):
        asymptotic_error(0.1, 0)


def test_exponent_governs_helstrom_decay():
    k = 1.5
    xi = chernoff_analytic(SYM, k)
    params = ScenarioParams(SYM, k)
    e100 = helstrom_m_shot(params, 100).e_min
    e200 = helstrom_m_shot(params, 200).e_min
    assert -math.log(e200 / e100) / 100 == pytest.approx(xi, rel=1e-6)

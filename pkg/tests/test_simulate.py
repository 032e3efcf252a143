import numpy as np
import pytest

from twosource.model import ScenarioKind
from twosource.simulate import (
    BLOCK_TRIALS,
    SimConfig,
    run_experiment,
    sample_shot,
    sample_shots,
    substream,
)
from twosource.sliver import H1, H2

ASYM, SYM = ScenarioKind.ASYMMETRIC, ScenarioKind.SYMMETRIC


def test_config_validation():
    with pytest.raises(ValueError):
        SimConfig(ASYM, 1.0, m=0)
    with pytest.raises(ValueError):
        SimConfig(ASYM, 1.0, trials=0)
    with pytest.raises(ValueError):
        SimConfig(ASYM, -1.0)
    with pytest.raises(ValueError):
        SimConfig(ASYM, 1.0, seed=-1)
    with pytest.raises(ValueError):
        SimConfig(ASYM, 1.0, seed=2**64)
    assert SimConfig("symmetric", 1.0).kind is SYM


def test_substreams_are_reproducible_and_distinct():
    a = substream(7, H1, 0).random(5)
    np.testing.assert_array_equal(a, substream(7, H1, 0).random(5))
    assert not np.array_equal(a, substream(7, H2, 0).random(5))
    assert not np.array_equal(a, substream(7, H1, 1).random(5))
    assert not np.array_equal(a, substream(8, H1, 0).random(5))


def test_single_source_never_lights_odd_detector():
    rng = substream(1, H1, 0)
    assert not sample_shots(H1, SYM, 3.0, rng, 10_000).any()
    assert sample_shot(H1, ASYM, 3.0, rng) is False
    with pytest.raises(ValueError):
        sample_shot(3, ASYM, 1.0, rng)


def test_run_is_deterministic_and_worker_independent():
    cfg = SimConfig(SYM, 1.0, m=3, trials=3 * BLOCK_TRIALS + 17, seed=99)
    a = run_experiment(cfg)
    assert a == run_experiment(cfg)
    assert a == run_experiment(cfg, workers=3)
    assert a.wrong_h1 == 0


def test_estimate_agrees_with_theory():
    for kind, k, m in ((ASYM, 1.0, 1), (SYM, 1.0, 5), (SYM, 2.0, 20)):
        rep = run_experiment(SimConfig(kind, k, m=m, trials=40_000, seed=3))
        assert abs(rep.p_hat - rep.p_theory) < 4 * rep.stderr + 1e-12


def test_stderr_formula():
    rep = run_experiment(SimConfig(SYM, 1.0, trials=1000, seed=5))
    r2 = rep.wrong_h2 / 1000
    assert rep.stderr == pytest.approx(0.5 * np.sqrt(r2 * (1 - r2) / 1000))
    assert rep.p_hat == pytest.approx(rep.wrong_h2 / 2000)


def test_coincident_sources_always_fool_the_protocol():
    rep = run_experiment(SimConfig(ASYM, 0.0, m=4, trials=500))
    assert rep.wrong_h2 == 500 and rep.p_hat == 0.5 == rep.p_theory


def test_symmetric_odd_fraction_over_a_million_draws():
    p = -np.expm1(-0.5) / 2
    hits = sample_shots(H2, SYM, 2.0, substream(11, H2, 0), 1_000_000).mean()
    assert abs(hits - p) < 4 * np.sqrt(p * (1 - p) / 1_000_000)


def test_coincident_two_sources_stay_even():
    assert not sample_shots(H2, ASYM, 0.0, substream(2, H2, 0), 1000).any()


@pytest.mark.parametrize(
    "m, k, expected",
    [(1, 1.0, (1 + np.exp(-1 / 8)) / 4), (50, 2.0, 0.5 * ((1 + np.exp(-0.5)) / 2) ** 50)],
)
def test_worked_examples(m, k, expected):
    rep = run_experiment(SimConfig(SYM, k, m=m, trials=1000, seed=2024))
    assert rep.p_theory == pytest.approx(expected, rel=1e-12)
    assert abs(rep.p_hat - expected) < 3 * rep.stderr + 1e-12 or rep.stderr == 0 and rep.p_hat == 0


def test_convergence_across_trial_counts():
    # |z| < 4 on at least 95% of a 20-point (k, m) grid at each trial count
    grid = [(kind, k, m) for kind in (ASYM, SYM) for k in (0.5, 1.0, 2.0, 3.0, 4.0) for m in (1, 10)]
    for trials in (10**3, 10**4, 10**5):
        good = 0
        for kind, k, m in grid:
            rep = run_experiment(SimConfig(kind, k, m=m, trials=trials, seed=trials))
            z = abs(rep.p_hat - rep.p_theory) / rep.stderr if rep.stderr else abs(rep.p_hat - rep.p_theory) * 1e12
            good += z < 4
        assert good >= 19

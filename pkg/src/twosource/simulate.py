"""Monte Carlo runs of the parity protocol.

Randomness comes from counter-based Philox streams. Every block of
``BLOCK_TRIALS`` decisions under one hypothesis owns a substream keyed by
(master seed, hypothesis, block index), so a run is reproducible no matter
how blocks are scheduled across workers.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .model import ScenarioKind, _check_k
from .sliver import H1, H2, decide, mode_probabilities, protocol_error

__all__ = [
    "SimConfig",
    "SimReport",
    "BLOCK_TRIALS",
    "substream",
    "sample_shot",
    "sample_shots",
    "run_experiment",
]

BLOCK_TRIALS = 4096
_SEED_LIMIT = 2**64


@dataclass(frozen=True)
class SimConfig:
    """One experiment: ``trials`` decisions of ``m`` shots under each hypothesis."""

    kind: ScenarioKind
    k: float
    m: int = 1
    trials: int = 1000
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "kind", ScenarioKind.parse(self.kind))
        object.__setattr__(self, "k", _check_k(self.k))
        if int(self.m) < 1:
            raise ValueError("m must be ≥ 1")
        if int(self.trials) < 1:
            raise ValueError("trials must be ≥ 1")
        if not (0 <= int(self.seed) < _SEED_LIMIT):
            raise ValueError("seed must be a 64-bit unsigned integer")
        object.__setattr__(self, "m", int(self.m))
        object.__setattr__(self, "trials", int(self.trials))
        object.__setattr__(self, "seed", int(self.seed))


@dataclass(frozen=True)
class SimReport:
    config: SimConfig
    wrong_h1: int
    wrong_h2: int
    p_hat: float
    stderr: float
    p_theory: float


def substream(seed: int, hypothesis: int, block: int) -> np.random.Generator:
    """Independent generator for one (hypothesis, block) cell of a run."""
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=(int(hypothesis), int(block)))
    return np.random.Generator(np.random.Philox(ss))


def _odd_probability(hypothesis: int, kind, k: float) -> float:
    probs = mode_probabilities(kind, k)
    if hypothesis == H1:
        return probs.pr_odd_h1
    if hypothesis == H2:
        return probs.pr_odd_h2
    raise ValueError(f"hypothesis must be {H1} or {H2}")


def sample_shots(hypothesis: int, kind, k: float, rng: np.random.Generator, size) -> np.ndarray:
    """Boolean array of odd-detector clicks."""
    p_odd = _odd_probability(hypothesis, kind, k)
    return rng.random(size) < p_odd


def sample_shot(hypothesis: int, kind, k: float, rng: np.random.Generator) -> bool:
    """True when the photon lands in the odd detector."""
    return bool(sample_shots(hypothesis, kind, k, rng, None))


def _block_errors(config: SimConfig, hypothesis: int, block: int) -> int:
    start = block * BLOCK_TRIALS
    n = min(BLOCK_TRIALS, config.trials - start)
    rng = substream(config.seed, hypothesis, block)
    record = sample_shots(hypothesis, config.kind, config.k, rng, (n, config.m))
    decisions = decide(record, config.m)
    return int(np.count_nonzero(decisions != hypothesis))


def run_experiment(config: SimConfig, workers: int = 1) -> SimReport:
    """Count wrong decisions under both hypotheses at equal priors."""
    n_blocks = math.ceil(config.trials / BLOCK_TRIALS)
    tasks = [(h, b) for h in (H1, H2) for b in range(n_blocks)]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            counts = list(pool.map(lambda t: _block_errors(config, *t), tasks))
    else:
        counts = [_block_errors(config, h, b) for h, b in tasks]
    wrong = {H1: 0, H2: 0}
    for (h, _), c in zip(tasks, counts):
        wrong[h] += c

    t = config.trials
    rate1, rate2 = wrong[H1] / t, wrong[H2] / t
    p_hat = (wrong[H1] + wrong[H2]) / (2 * t)
    # stratified binomial error: each hypothesis gets exactly t decisions
    stderr = 0.5 * math.sqrt((rate1 * (1 - rate1) + rate2 * (1 - rate2)) / t)
    p_theory = protocol_error(config.kind, config.k, config.m).p_err
    return SimReport(config, wrong[H1], wrong[H2], p_hat, stderr, p_theory)

"""Instance generators: adversarial family, knapsack reduction, random, proxy.

The random scheme is fixed and versioned for fixture stability: the true
location is drawn uniformly, an N x M standard-normal matrix gets
`concentration` added on the true column, and rows are log-softmaxed.
Changing any of this is a breaking change to every stored fixture.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .model import Instance, ScoreKind, make_instance


def _log_softmax(rows: np.ndarray) -> np.ndarray:
    shifted = rows - rows.max(axis=1, keepdims=True)
    return shifted - np.log(np.exp(shifted).sum(axis=1, keepdims=True))


def obs1_low_true_mass(epsilon: float) -> float:
    """Mass `a` placed on the first rival by the adversarial construction."""
    third = 1.0 / 3.0
    return ((third - epsilon) ** 2 * (third - 2.0 * epsilon)) / (
        2.0 * (third + epsilon) ** 2)


def gen_observation1(n_uniform: int, epsilon: float) -> Instance:
    """Adversarial 3-location family where greedy deletion is arbitrarily bad.

    n_uniform + 3 photos: the uniform block carries the highest
    true-location scores (so greedy deletes it first, to no effect) while
    the two photos that matter sit at the end.
    """
    if n_uniform < 1:
        raise ValueError("need at least one uniform photo")
    if not 0.0 < epsilon < 1.0 / 6.0:
        raise ValueError(f"epsilon must be in (0, 1/6), got {epsilon}")
    third = 1.0 / 3.0
    a = obs1_low_true_mass(epsilon)
    rows = [[third, third, third]] * n_uniform
    rows.append([a, 2 * third + epsilon - a, third - epsilon])
    rows.append([2 * third + epsilon - a, a, third - epsilon])
    rows.append([third + epsilon, third + epsilon, third - 2 * epsilon])
    return make_instance(np.log(np.asarray(rows)), true_location=2,
                         score_kind=ScoreKind.LOG_PROBABILITY)


@dataclass(frozen=True)
class KnapsackReduction:
    """Raw-score instance encoding a knapsack decision, plus its parameters."""

    instance: Instance
    values: tuple[int, ...]
    weights: tuple[int, ...]
    value_bound: int
    capacity: int

    TRUE = 0
    LOC_P = 1
    LOC_Q = 2


def gen_knapsack_reduction(values: Sequence[int], weights: Sequence[int],
                           value_bound: int, capacity: int) -> KnapsackReduction:
    """Instance with one photo per object plus an anchor photo; a deletion
    set lifting both alternates over the true location exists iff the
    knapsack answer is yes."""
    values = tuple(int(v) for v in values)
    weights = tuple(int(w) for w in weights)
    if len(values) != len(weights):
        raise ValueError("values and weights differ in length")
    if any(v <= 0 for v in values) or any(w <= 0 for w in weights):
        raise ValueError("values and weights must be positive")
    if value_bound <= 0 or capacity <= 0:
        raise ValueError("value bound and capacity must be positive")
    rows = [[0.0, float(v), -float(w)] for v, w in zip(values, weights)]
    rows.append([0.0, -float(value_bound), float(capacity)])
    instance = make_instance(np.asarray(rows), true_location=0,
                             score_kind=ScoreKind.RAW)
    return KnapsackReduction(instance, values, weights,
                             int(value_bound), int(capacity))


def knapsack_decision(values: Sequence[int], weights: Sequence[int],
                      value_bound: int, capacity: int) -> bool:
    """Classic 0/1 knapsack decision by dynamic programming over weights."""
    values = [int(v) for v in values]
    weights = [int(w) for w in weights]
    if any(w <= 0 for w in weights) or any(v <= 0 for v in values):
        raise ValueError("values and weights must be positive")
    best = [0] * (capacity + 1)
    for v, w in zip(values, weights):
        for cap in range(capacity, w - 1, -1):
            cand = best[cap - w] + v
            if cand > best[cap]:
                best[cap] = cand
    return max(best) >= value_bound


def gen_random(n: int, m: int, concentration: float, seed: int) -> Instance:
    """Seeded random log-probability instance biased toward the true location."""
    if n < 1 or m < 2:
        raise ValueError(f"need n >= 1 and m >= 2, got n={n}, m={m}")
    if concentration <= 0:
        raise ValueError("concentration must be positive")
    rng = np.random.default_rng(seed)
    t = int(rng.integers(0, m))
    g = rng.standard_normal((n, m))
    g[:, t] += concentration
    return make_instance(_log_softmax(g), true_location=t,
                         score_kind=ScoreKind.LOG_PROBABILITY)


def gen_proxy(base: Instance, noise_scale: float, seed: int) -> Instance:
    """Perturbed twin of a log-probability instance, renormalized per row."""
    if noise_scale < 0:
        raise ValueError("noise_scale must be >= 0")
    if base.score_kind is not ScoreKind.LOG_PROBABILITY:
        raise ValueError("proxy perturbation requires log-probability scores")
    if noise_scale == 0:
        return base
    rng = np.random.default_rng(seed)
    pert = base.scores + noise_scale * rng.standard_normal(base.scores.shape)
    return make_instance(_log_softmax(pert), true_location=base.true_location,
                         photo_ids=base.photo_ids,
                         score_kind=ScoreKind.LOG_PROBABILITY)


def generate(kind: str, **params) -> Instance:
    """Single entry point used by the command line."""
    if kind == "obs1":
        return gen_observation1(params["n"], params["epsilon"])
    if kind == "knapsack":
        return gen_knapsack_reduction(
            params["values"], params["weights"],
            params["value_bound"], params["capacity"]).instance
    if kind == "random":
        return gen_random(params["n"], params["m"],
                          params["concentration"], params["seed"])
    if kind == "proxy":
        return gen_proxy(params["base"], params["noise_scale"], params["seed"])
    raise ValueError(f"unknown generator kind {kind!r}")

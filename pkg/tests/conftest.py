import itertools

import numpy as np
import pytest

from geocensor import ProblemSpec, ScoreKind, Variant, make_instance, protected_k


@pytest.fixture
def inst_a():
    """Three photos, three locations, true location 2; column sums [-3,-3,2]."""
    return make_instance(
        [[0.0, -5.0, 1.0], [-5.0, 0.0, 1.0], [2.0, 2.0, 0.0]],
        true_location=2, score_kind=ScoreKind.RAW)


def random_small(rng, n_max=10, m_max=6):
    """Seeded random instance drawn from the fixed generator family."""
    from geocensor import gen_random

    n = int(rng.integers(2, n_max + 1))
    m = int(rng.integers(2, m_max + 1))
    conc = float(rng.uniform(0.3, 2.0))
    return gen_random(n, m, conc, seed=int(rng.integers(1 << 30)))


def random_spec(rng, instance, trial):
    """Alternating variant spec with occasional keep sets and margins."""
    keep_size = int(rng.integers(0, max(instance.num_photos // 3, 1)))
    keep = set(int(i) for i in
               rng.choice(instance.num_photos, size=keep_size, replace=False))
    margin = 0.5 if trial % 4 in (2, 3) else 0.0
    if trial % 2 == 0:
        k = int(rng.integers(1, instance.num_locations))
        return ProblemSpec.topk(k, keep_set=keep, margin=margin)
    d = int(rng.integers(0, instance.num_photos))
    return ProblemSpec.budget(d, keep_set=keep, margin=margin)


def exhaustive_best(instance, spec):
    """Tiny independent enumeration used to double-check the brute oracle.

    Walks every deletion subset with plain itertools; returns (deletions,
    protected_k) of the optimum, or None when topk is infeasible.
    """
    from geocensor import apply_margin

    eff = apply_margin(instance, spec.margin) if spec.margin > 0 else instance
    n = eff.num_photos
    pool = [i for i in range(n) if i not in spec.keep_set]
    limit = len(pool) if spec.keep_set else len(pool) - 1
    if spec.variant is Variant.BUDGET:
        limit = min(limit, spec.d)
    best = None
    for size in range(limit + 1):
        for combo in itertools.combinations(pool, size):
            kept = set(range(n)) - set(combo)
            pk = protected_k(eff, kept)
            if spec.variant is Variant.TOPK:
                if pk >= spec.k:
                    return size, pk
            elif best is None or pk > best[1]:
                best = (size, pk)
    return best

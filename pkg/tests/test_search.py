import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from ufpmaze import search


def naive(weights, demands, rows, caps, crows, ccap):
    n = len(weights)
    best = None
    for size in range(n + 1):
        for combo in itertools.combinations(range(n), size):
            mask = sum(1 << i for i in combo)
            if any(sum(demands[i] for i in combo if r >> i & 1) > u for r, u in zip(rows, caps)):
                continue
            if any(bin(r & mask).count("1") > ccap for r in crows):
                continue
            w = sum(weights[i] for i in combo)
            if best is None or w > best[0]:
                best = (w, mask)
    return best


def case(seed):
    rng = random.Random(seed)
    n = rng.randint(0, 8)
    weights = [rng.randint(0, 9) for _ in range(n)]
    demands = [rng.randint(1, 6) for _ in range(n)]
    rows = [rng.randrange(1 << n) if n else 0 for _ in range(rng.randint(0, 4))]
    caps = [rng.randint(0, 12) for _ in rows]
    crows = [rng.randrange(1 << n) if n else 0 for _ in range(rng.randint(0, 2))]
    return weights, demands, rows, caps, crows, rng.randint(0, 3)


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10**9))
def test_python_backend_matches_naive(seed):
    w, d, rows, caps, crows, ccap = case(seed)
    mask = search.best_subset(w, d, rows, caps, crows, ccap, backend="python")
    want = naive(w, d, rows, caps, crows, ccap)
    got_w = sum(w[i] for i in range(len(w)) if mask >> i & 1)
    assert got_w == (want[0] if want else 0)


@pytest.mark.skipif(search.BACKEND != "compiled", reason="compiled kernel not built")
@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10**9))
def test_backends_agree(seed):
    args = case(seed)
    assert search.best_subset(*args, backend="python") == search.best_subset(*args, backend="compiled")


def test_rational_inputs_are_scaled():
    from fractions import Fraction as F

    mask = search.best_subset([F(1, 2), F(1, 3)], [F(1, 2), F(1, 2)], [0b11], [F(3, 4)])
    assert mask == 0b01


def test_ties_prefer_lexicographically_smaller_set():
    assert search.best_subset([1, 1], [1, 1], [0b11], [1]) == 0b01


def test_empty():
    assert search.best_subset([], [], [], []) == 0

import random
from fractions import Fraction

import pytest

from ufpmaze.model import Instance, Task, load_instance, path_bottleneck, preprocess

I1_DOC = {
    "capacities": [4, 6, 5, 2],
    "tasks": [
        {"id": 1, "s": 1, "t": 3, "d": 2, "w": 3},
        {"id": 2, "s": 2, "t": 4, "d": 3, "w": 4},
        {"id": 3, "s": 3, "t": 5, "d": 2, "w": 2},
    ],
}


@pytest.fixture
def i1():
    return load_instance(I1_DOC)


def random_instance(rng, n, m, delta, max_cap=12, max_w=6, span=None):
    """delta-large random instance; demands on a quarter grid of [delta b, b]."""
    caps = [Fraction(rng.randint(1, max_cap)) for _ in range(m)]
    tasks = []
    for i in range(1, n + 1):
        s = rng.randint(1, m)
        hi = m + 1 if span is None else min(m + 1, s + span)
        t = rng.randint(s + 1, hi)
        b = path_bottleneck(caps, s, t).b
        lo = delta * b
        d = lo + (b - lo) * Fraction(rng.randint(0, 4), 4)
        tasks.append(Task(i, s, t, d, Fraction(rng.randint(1, max_w))))
    return Instance(tuple(caps), tuple(tasks))


def random_preprocessed(rng, n, m, delta, **kw):
    return preprocess(random_instance(rng, n, m, delta, **kw))[0]


@pytest.fixture
def rng():
    return random.Random(12345)


def random_anchored_segments(rng, n, extra_vertices=3):
    """Left-anchored segments with distinct right ends and distinct levels."""
    from ufpmaze.construct import Segment

    ends = rng.sample(range(2, n + 2 + extra_vertices), n)
    levels = rng.sample(range(1, 10 * n + 10), n)
    return [Segment(j + 1, 1, x1, Fraction(y, 3), Fraction(rng.randint(1, 9)), "transformed")
            for j, (x1, y) in enumerate(zip(ends, levels))]

"""Seeded random instance families."""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from .model import Instance, Task, path_bottleneck, to_fraction

FAMILIES = ("random-delta-large", "staircase", "shared-bottleneck", "adversarial-lp-gap")


@dataclass(frozen=True)
class GeneratorSpec:
    family: str = "random-delta-large"
    n: int = 5  # tasks
    m: int = 6  # edges
    delta: Fraction = Fraction(1, 2)
    seed: int = 0
    max_capacity: int = 12
    max_weight: int = 6

    def __post_init__(self):
        object.__setattr__(self, "delta", to_fraction(self.delta))
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}; choose from {', '.join(FAMILIES)}")
        if not 0 < self.delta <= 1:
            raise ValueError(f"delta must lie in (0, 1], got {self.delta}")
        if self.n < 0 or self.m < 1 or self.max_capacity < 1 or self.max_weight < 1:
            raise ValueError("sizes must be positive")


def _demand(rng: random.Random, b: Fraction, delta: Fraction) -> Fraction:
    """Random demand in ``[delta b, b]`` on a grid of quarter steps."""
    lo = delta * b
    return lo + (b - lo) * Fraction(rng.randint(0, 4), 4)


def _random_tasks(rng, caps, n, delta, max_weight):
    m = len(caps)
    tasks = []
    for i in range(1, n + 1):
        s = rng.randint(1, m)
        t = rng.randint(s + 1, m + 1)
        b = path_bottleneck(caps, s, t).b
        tasks.append(Task(i, s, t, _demand(rng, b, delta), Fraction(rng.randint(1, max_weight))))
    return tasks


def generate(spec: GeneratorSpec) -> Instance:
    rng = random.Random(spec.seed)
    if spec.family == "random-delta-large":
        caps = [Fraction(rng.randint(1, spec.max_capacity)) for _ in range(spec.m)]
        tasks = _random_tasks(rng, caps, spec.n, spec.delta, spec.max_weight)
    elif spec.family == "staircase":
        step = max(1, spec.max_capacity // spec.m)
        caps = [Fraction(step * (j + 1)) for j in range(spec.m)]
        tasks = _random_tasks(rng, caps, spec.n, spec.delta, spec.max_weight)
    elif spec.family == "shared-bottleneck":
        # one narrow edge in the middle crossed by every task
        m = max(spec.m, 3)
        mid = (m + 1) // 2
        caps = [Fraction(rng.randint(spec.max_capacity // 2 + 1, spec.max_capacity) if spec.max_capacity > 1 else 1)
                for _ in range(m)]
        caps[mid - 1] = Fraction(max(1, spec.max_capacity // 2))
        tasks = []
        for i in range(1, spec.n + 1):
            s = rng.randint(1, mid)
            t = rng.randint(mid + 1, m + 1)
            b = path_bottleneck(caps, s, t).b
            tasks.append(Task(i, s, t, _demand(rng, b, spec.delta), Fraction(rng.randint(1, spec.max_weight))))
    else:
        # capacities 2^j; task i uses edges i..m with demand 2^i, unit weight
        m = spec.m
        caps = [Fraction(2 ** j) for j in range(1, m + 1)]
        tasks = [Task(i, i, m + 1, Fraction(2 ** i), Fraction(1)) for i in range(1, min(spec.n, m) + 1)]
    return Instance(tuple(caps), tuple(tasks))

from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from ufpmaze.generators import FAMILIES, GeneratorSpec, generate
from ufpmaze.model import dump_instance, is_delta_large, load_instance


def test_random_delta_large_example():
    inst = generate(GeneratorSpec("random-delta-large", n=5, delta=Fraction(1, 2), seed=7))
    assert len(inst.tasks) == 5
    assert all(t.d >= inst.bneck(t.id).b / 2 for t in inst.tasks)


def test_staircase_strictly_increasing():
    caps = generate(GeneratorSpec("staircase", m=6, seed=1)).capacities
    assert len(caps) == 6 and all(a < b for a, b in zip(caps, caps[1:]))


def test_adversarial_family_shape():
    inst = generate(GeneratorSpec("adversarial-lp-gap", n=4, m=4))
    assert inst.capacities == tuple(Fraction(2 ** j) for j in range(1, 5))
    assert [(t.s, t.t, t.d, t.w) for t in inst.tasks] == [(i, 5, 2 ** i, 1) for i in range(1, 5)]


def test_shared_bottleneck_tasks_cross_the_middle():
    inst = generate(GeneratorSpec("shared-bottleneck", n=6, m=6, seed=3))
    mid = 3
    assert all(t.uses(mid) for t in inst.tasks)


def test_determinism():
    spec = GeneratorSpec(seed=11, n=6)
    assert generate(spec) == generate(spec)
    assert generate(spec) != generate(GeneratorSpec(seed=12, n=6))


@pytest.mark.parametrize("kw", [{"delta": 2}, {"delta": 0}, {"family": "nope"}, {"m": 0}])
def test_impossible_specs(kw):
    with pytest.raises(ValueError):
        GeneratorSpec(**kw)


@settings(max_examples=80, deadline=None)
@given(st.sampled_from(FAMILIES), st.integers(0, 8), st.integers(1, 8), st.sampled_from(["1/4", "1/2", "1"]),
       st.integers(0, 10**6))
def test_generated_instances_are_valid(family, n, m, delta, seed):
    spec = GeneratorSpec(family, n=n, m=m, delta=delta, seed=seed)
    inst = generate(spec)
    assert all(u > 0 for u in inst.capacities)
    assert all(is_delta_large(inst, t, spec.delta) for t in inst.tasks)
    assert load_instance(dump_instance(inst)) == inst

import json
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from ufpmaze.model import (GuardExceeded, Instance, InstanceError, Task, bottleneck, check_feasible,
                           dump_instance, exact_opt, is_delta_large, is_preprocessed, load_instance,
                           preprocess, to_fraction)

from conftest import I1_DOC, random_instance


def test_i1_bottlenecks(i1):
    assert [(i1.bneck(i).b, i1.bneck(i).e) for i in (1, 2, 3)] == [(4, 1), (5, 3), (2, 4)]


def test_overdemanding_task_dropped():
    doc = json.loads(json.dumps(I1_DOC))
    doc["tasks"].append({"id": 4, "s": 4, "t": 5, "d": 9, "w": 1})
    assert sorted(load_instance(doc).ids) == [1, 2, 3]


def test_empty_task_list():
    inst = load_instance({"capacities": [3, 1], "tasks": []})
    assert inst.tasks == () and inst.num_edges == 2


@pytest.mark.parametrize("doc", [
    "not json",
    {"tasks": []},
    {"capacities": [], "tasks": []},
    {"capacities": [1], "tasks": [{"id": 1, "s": 2, "t": 1, "d": 1, "w": 1}]},
    {"capacities": [1], "tasks": [{"id": 1, "s": 1}]},
])
def test_bad_documents(doc):
    with pytest.raises(InstanceError):
        load_instance(doc)


def test_bottleneck_tie_goes_to_smallest_edge():
    inst = Instance((Fraction(3), Fraction(3), Fraction(5)), (Task(1, 1, 4, Fraction(1), Fraction(1)),))
    assert bottleneck(inst, 1).e == 1
    single = Instance((Fraction(3), Fraction(2)), (Task(1, 2, 3, Fraction(1), Fraction(1)),))
    assert (single.bneck(1).b, single.bneck(1).e) == (2, 2)


def test_delta_large(i1):
    assert is_delta_large(i1, 1, Fraction(1, 2))
    assert not is_delta_large(i1, 1, Fraction(3, 4))
    assert is_delta_large(i1, 1, Fraction(2, 4))  # boundary equality


def test_check_feasible_loads(i1):
    rep = check_feasible(i1, [1, 2, 3])
    assert rep.feasible
    assert {e: load for e, (load, _) in rep.loads.items()} == {1: 2, 2: 5, 3: 5, 4: 2}
    assert check_feasible(i1, []).feasible


def test_check_feasible_clone_overloads_e3(i1):
    clone = Instance(i1.capacities, i1.tasks + (Task(9, 2, 4, Fraction(3), Fraction(1)),))
    rep = check_feasible(clone, [2, 9])
    assert not rep.feasible and rep.violations == (3,)


def test_exact_opt(i1):
    assert exact_opt(i1) == (frozenset({1, 2, 3}), 9)
    tight = Instance((Fraction(4), Fraction(6), Fraction(4), Fraction(2)), i1.tasks)
    assert exact_opt(tight) == (frozenset({1, 2}), 7)
    assert exact_opt(Instance((Fraction(1),), ())) == (frozenset(), 0)


def test_exact_opt_guard(i1):
    with pytest.raises(GuardExceeded):
        exact_opt(i1, limit=2)


def test_preprocess_i1_splits_vertex_3(i1):
    work, pmap = preprocess(i1)
    assert is_preprocessed(work)
    assert pmap.vertex_map[3] == (3, 4)
    assert work.capacity(3) == 13 and 3 in pmap.inserted
    assert work.task(1).t == 3 and work.task(3).s == 4
    assert exact_opt(work)[1] == exact_opt(i1)[1]


def test_preprocess_identity():
    inst = Instance((Fraction(2), Fraction(3), Fraction(4)),
                    (Task(1, 1, 3, Fraction(1), Fraction(1)), Task(2, 2, 4, Fraction(1), Fraction(1))))
    work, pmap = preprocess(inst)
    assert work == inst and pmap.is_identity()


def test_preprocess_chain_of_copies():
    caps = tuple(Fraction(5) for _ in range(4))
    tasks = (Task(1, 1, 3, Fraction(1), Fraction(1)), Task(2, 2, 3, Fraction(1), Fraction(1)),
             Task(3, 3, 4, Fraction(1), Fraction(1)), Task(4, 3, 5, Fraction(1), Fraction(1)))
    work, pmap = preprocess(Instance(caps, tasks))
    assert len(pmap.vertex_map[3]) == 4
    assert is_preprocessed(work)


def test_to_fraction_parses_strings():
    assert to_fraction("3/4") == Fraction(3, 4)
    assert to_fraction(2) == 2


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6), st.integers(0, 7), st.integers(1, 6))
def test_roundtrip_and_preprocess_preserves_opt(seed, n, m):
    import random

    inst = random_instance(random.Random(seed), n, m, Fraction(1, 2))
    assert load_instance(dump_instance(inst)) == inst
    work, _ = preprocess(inst)
    assert is_preprocessed(work) or not inst.tasks
    assert exact_opt(work)[1] == exact_opt(inst)[1]

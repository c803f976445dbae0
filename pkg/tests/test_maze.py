from fractions import Fraction

import pytest

from ufpmaze.maze import (MUTATIONS, REFERENCE, MazePair, bin_groups, bottom, bound_tasks, crit,
                          edge_is_thin, gen_mtasks, is_k_thin, is_weakly_feasible, make_mtask,
                          ncrit, partition, thinness, top, union_feasible, weak_load)
from ufpmaze.model import Instance, Task


def with_t4(i1):
    return Instance(i1.capacities, i1.tasks + (Task(4, 1, 2, Fraction(2), Fraction(1)),))


def test_gen_mtasks_dedups_paths_on_e1(i1):
    mts = [m for m in gen_mtasks(with_t4(i1), Fraction(1, 2)) if not m.is_dummy and m.e == 1]
    assert sorted((m.s, m.t) for m in mts) == [(1, 2), (1, 3)]
    assert all(m.d == 2 for m in mts)


def test_gen_mtasks_lists_dummies_first(i1):
    single = i1.restrict([2])
    mts = gen_mtasks(single, Fraction(1, 2))
    assert [m.kind for m in mts] == ["bottom", "top", "regular"]
    assert (mts[2].s, mts[2].t, mts[2].e) == (2, 4, 3)


def test_partition_thresholds():
    caps = (Fraction(4), Fraction(10), Fraction(3), Fraction(1, 2))
    inst = Instance(caps, (
        Task(1, 2, 3, Fraction(5), Fraction(1)),   # b = 10
        Task(2, 3, 4, Fraction(3), Fraction(1)),   # b = 3
        Task(3, 4, 5, Fraction(1, 2), Fraction(1)),  # b = 1/2
    ))
    m = make_mtask(inst, 1, 5, 1, Fraction(1, 2))  # b = 4
    part = partition(inst, m, [1, 2, 3], Fraction(1, 2))
    assert (part.abv, part.crit, part.subc) == ({1}, {2}, {3})


def test_partition_dummies(i1):
    part_top = partition(i1, top(i1), i1.ids, Fraction(1, 2))
    assert not part_top.abv and not part_top.crit
    part_bot = partition(i1, bottom(i1), i1.ids, Fraction(1, 2), edge=2)
    assert part_bot.abv == {1, 2} and not part_bot.crit


def test_bound_tasks(i1):
    assert bound_tasks(i1, 2, bottom(i1), top(i1), i1.ids) == {1, 2}
    m1 = make_mtask(i1, 1, 3, 1, Fraction(1, 2))
    m1b = make_mtask(i1, 1, 3, 1, Fraction(1, 2))
    with pytest.raises(ValueError):
        bound_tasks(i1, 2, m1, m1b, i1.ids)


def test_band_is_open_below_closed_above(i1):
    m1 = make_mtask(i1, 1, 3, 1, Fraction(1, 2))  # level of task 1
    assert 1 in bound_tasks(i1, 1, bottom(i1), m1, i1.ids)
    assert 1 not in bound_tasks(i1, 1, m1, top(i1), i1.ids)
    strict = MUTATIONS["strict-band"]
    assert 1 not in bound_tasks(i1, 1, bottom(i1), m1, i1.ids, strict)


def test_weak_feasibility_example(i1):
    m = make_mtask(i1, 1, 3, 1, Fraction(1, 2))
    pair = MazePair({2}, {m})
    assert weak_load(i1, pair, 2, Fraction(1, 2)) == 5
    assert is_weakly_feasible(i1, pair, Fraction(1, 2))
    tight = Instance((Fraction(4), Fraction(4), Fraction(5), Fraction(2)), i1.tasks)
    res = is_weakly_feasible(tight, pair, Fraction(1, 2))
    assert not res and res.edge == 2 and res.load == 5


def test_feasible_pair_without_mtasks_is_weakly_feasible(i1):
    assert is_weakly_feasible(i1, MazePair(i1.ids, ()), Fraction(1, 2))


def test_thinness_counts_bins(i1):
    pair = MazePair(i1.ids, ())
    assert is_k_thin(i1, pair, 2)
    res = is_k_thin(i1, pair, 1)
    assert not res and res.edge == 2 and res.tasks == {1, 2}
    m1 = make_mtask(i1, 1, 3, 1, Fraction(1, 2))
    assert not is_k_thin(i1, MazePair(i1.ids, {m1}), 1)  # e3 still holds tasks 2 and 3
    m3 = make_mtask(i1, 3, 5, 4, Fraction(1, 2))
    assert is_k_thin(i1, MazePair(i1.ids, {m1, m3}), 1)
    assert thinness(i1, pair) == 2


def test_equal_keys_never_split():
    inst = Instance((Fraction(4),), (Task(1, 1, 2, Fraction(2), Fraction(1)), Task(2, 1, 2, Fraction(2), Fraction(1))))
    for m in gen_mtasks(inst, Fraction(1, 2)):
        if not m.is_dummy:
            assert not is_k_thin(inst, MazePair({1, 2}, {m}), 1)


def test_bin_groups_and_edge_predicate():
    keys = [(1, 1, 1), (1, 2, 1), (1, 2, 1), (1, 3, 1)]
    assert bin_groups(keys, [(1, 2, 1)]) == [[0, 1, 2], [3]]
    assert edge_is_thin(keys, [(1, 1, 1), (1, 2, 1)], 2)
    assert not edge_is_thin(keys, [], 3)


def test_ncrit_values():
    assert (ncrit(Fraction(1, 2)), ncrit(1), ncrit(Fraction(1, 4))) == (18, 5, 68)
    assert ncrit(1, MUTATIONS["no-ncrit-cap"]) > 10**6
    with pytest.raises(ValueError):
        ncrit(0)


def test_pair_rejects_shared_bottleneck(i1):
    a = make_mtask(i1, 1, 3, 1, Fraction(1, 2))
    b = make_mtask(i1, 1, 2, 1, Fraction(1, 2))
    with pytest.raises(ValueError):
        MazePair((), {a, b})


def test_crit_and_union(i1):
    m = make_mtask(i1, 2, 4, 3, Fraction(1, 2))  # b = 5
    assert crit(i1, m, i1.ids, Fraction(1, 2)) == {1, 2, 3}
    assert crit(i1, m, i1.ids, Fraction(1, 2), edge=2) == {1, 2}
    assert union_feasible(i1, MazePair({1}, ()))
    assert not union_feasible(i1, MazePair({1, 2, 3}, {m}))


def test_reference_rules_are_default():
    assert REFERENCE.charge_mtask and REFERENCE.inclusive_band and REFERENCE.cap_critical
    assert set(MUTATIONS) == {"drop-mtask-demand", "strict-band", "no-ncrit-cap"}

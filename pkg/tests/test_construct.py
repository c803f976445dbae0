import random
from fractions import Fraction

import numpy as np
import pytest
from scipy.optimize import linprog

from ufpmaze.construct import (Segment, build_segments, build_tree, construct_thin_pair, is_segment_cover,
                               k_of, k_prime, lift_cover, maze_pair_from_cover, min_segment_cover, mirror,
                               split_lr, transform_left, transform_right)
from ufpmaze.maze import is_k_thin, union_feasible
from ufpmaze.model import Instance, Task, exact_opt
from ufpmaze.oracles import exhaustive_min_cover, stab_thinness_oracle

from conftest import random_anchored_segments, random_instance


def test_split_pieces_share_the_bottleneck_edge(i1):
    left, right = split_lr(i1, build_segments(i1, i1.ids))
    l2, r2 = left[1], right[1]
    assert (l2.x0, l2.x1) == (2, 4) and (r2.x0, r2.x1) == (3, 4)
    assert l2.contains(3) and r2.contains(3) and not r2.contains(2)
    l1 = left[0]
    assert (l1.x0, l1.x1) == (1, 2)  # bottleneck on the leftmost edge


def test_transform_right_example(i1):
    _, right = split_lr(i1, build_segments(i1, i1.ids))
    out = transform_right(i1, right)
    assert out[1].x0 == 1 and out[1].x1 == 4 and out[1].y == Fraction(53, 2)
    assert len({s.y for s in out}) == 3


def test_transform_separates_equal_levels():
    inst = Instance((Fraction(3), Fraction(3)), (Task(1, 1, 3, Fraction(1), Fraction(1)),
                                                 Task(2, 1, 2, Fraction(1), Fraction(1))))
    _, right = split_lr(inst, build_segments(inst, inst.ids))
    out = transform_right(inst, right)
    assert out[0].y != out[1].y and abs(out[0].y - out[1].y) == Fraction(1, 3)


def test_transform_left_is_mirrored_right(i1):
    left, _ = split_lr(i1, build_segments(i1, i1.ids))
    out = transform_left(i1, left)
    assert all(s.x0 == 1 for s in out)
    back = mirror(i1, mirror(i1, left))
    assert back == left


def test_nested_segments_tree():
    segs = [Segment(1, 1, 4, Fraction(10), Fraction(1)), Segment(2, 1, 3, Fraction(20), Fraction(1)),
            Segment(3, 1, 2, Fraction(30), Fraction(1))]
    tree = build_tree(segs, 2)
    assert tree.nodes[tree.root].edge == 3
    assert all(len(n.reps) == 1 for n in tree.nodes)
    assert len(tree.nodes) == 6
    cover = min_segment_cover(tree)
    assert cover.selected == {0, 1, 2}


def test_single_segment_path_tree():
    tree = build_tree([Segment(1, 1, 4, Fraction(1), Fraction(2))], 2)
    assert [n.reps for n in tree.nodes] == [(0,), (0,), (0,)]
    assert min_segment_cover(tree).weight == 2


def test_cover_prefers_cheaper_path():
    segs = [Segment(1, 1, 4, Fraction(1), Fraction(5)), Segment(2, 1, 3, Fraction(2), Fraction(3)),
            Segment(3, 1, 2, Fraction(3), Fraction(4))]
    tree = build_tree(segs, 4)
    assert len(tree.nodes) == 1
    cover = min_segment_cover(tree)
    assert cover.selected == {1} and cover.weight == 3


def test_degenerate_tree_gives_empty_cover():
    tree = build_tree([Segment(1, 1, 3, Fraction(1), Fraction(1))], 4)
    assert tree.degenerate and min_segment_cover(tree).weight == 0


def test_tree_input_validation():
    with pytest.raises(ValueError):
        build_tree([], 3)
    with pytest.raises(ValueError):
        build_tree([Segment(1, 2, 3, Fraction(1), Fraction(1))], 2)
    with pytest.raises(ValueError):
        build_tree([Segment(1, 1, 3, Fraction(1), Fraction(1)), Segment(2, 1, 3, Fraction(2), Fraction(1))], 2)


def node_lp(tree):
    n = len(tree.segments)
    a = np.zeros((len(tree.nodes), n))
    for r, node in enumerate(tree.nodes):
        a[r, list(node.reps)] = -1
    c = np.array([float(s.w) for s in tree.segments])
    return linprog(c, A_ub=a, b_ub=-np.ones(len(tree.nodes)), bounds=[(0, 1)] * n, method="highs")


def test_random_trees_against_exhaustion_and_lp():
    rng = random.Random(7)
    checked = 0
    for _ in range(150):
        segs = random_anchored_segments(rng, rng.randint(1, 10))
        k = rng.choice([2, 4, 6])
        tree = build_tree(segs, k)
        cover = min_segment_cover(tree)
        assert is_segment_cover(tree, cover.selected)
        assert exhaustive_min_cover(tree)[1] == cover.weight
        if tree.degenerate:
            continue
        checked += 1
        for node in tree.nodes:
            assert k // 2 <= len(node.reps) <= k - 1 or node.id == tree.root
        total = sum(s.w for s in segs)
        assert cover.weight <= Fraction(2, k) * total
        assert stab_thinness_oracle(segs, cover.selected, 2 * k)
        lp = node_lp(tree)
        assert lp.status == 0 and abs(lp.fun - float(cover.weight)) < 1e-7
    assert checked > 50


def test_k_prime_and_k_of():
    assert k_prime(1) == 8 and k_of(1, Fraction(1, 2)) == 34
    assert k_prime(4) == 6 and k_of(4, 1) == 25
    assert k_prime(10**6) == 6  # the formula approaches 4 only in the limit
    with pytest.raises(ValueError):
        k_prime(0)


def test_lift_and_glue(i1):
    assert lift_cover([], []) == frozenset()
    assert lift_cover([2], [2, 3]) == {2, 3}
    pair = maze_pair_from_cover(i1, i1.ids, {1}, Fraction(1, 2))
    (m,) = pair.regular_mtasks()
    assert pair.tasks == {2, 3} and (m.s, m.t, m.e, m.d) == (1, 3, 1, 2)
    assert maze_pair_from_cover(i1, i1.ids, (), Fraction(1, 2)).tasks == set(i1.ids)


def test_glue_spans_union_of_paths():
    caps = (Fraction(6), Fraction(2), Fraction(6))
    inst = Instance(caps, (Task(1, 1, 3, Fraction(1), Fraction(1)), Task(2, 2, 4, Fraction(1), Fraction(1))))
    pair = maze_pair_from_cover(inst, inst.ids, {1, 2}, Fraction(1, 2))
    (m,) = pair.regular_mtasks()
    assert (m.s, m.t, m.e) == (1, 4, 2)


def test_i1_pipeline(i1):
    c = construct_thin_pair(i1, i1.ids, 2, Fraction(1, 2))
    assert c.union_feasible and c.achieved <= 10
    assert is_k_thin(i1, c.pair, 10) and union_feasible(i1, c.pair)
    assert c.loss <= 2 * c.total
    cert = c.certificate()
    assert cert["thinness_bound"] == 10 and cert["union_feasible"] is True


def test_empty_solution():
    inst = Instance((Fraction(2),), ())
    c = construct_thin_pair(inst, (), 2, 1)
    assert c.pair.tasks == frozenset() and not c.pair.mtasks


def test_construction_rejects_bad_input(i1):
    with pytest.raises(ValueError):
        construct_thin_pair(i1, i1.ids, 3, Fraction(1, 2))
    with pytest.raises(ValueError):
        construct_thin_pair(i1, i1.ids, 2, Fraction(3, 4))  # task 1 is not 3/4-large


def test_random_constructions():
    rng = random.Random(3)
    for _ in range(60):
        delta = rng.choice([Fraction(1, 2), Fraction(1)])
        inst = random_instance(rng, rng.randint(1, 9), rng.randint(2, 7), delta)
        star, _ = exact_opt(inst)
        for kp in (2, 4):
            c = construct_thin_pair(inst, star, kp, delta)
            assert is_k_thin(inst, c.pair, 4 * kp + (2 if delta == Fraction(1, 2) else 1))
            assert union_feasible(inst, c.pair)
            assert 4 * c.total >= kp * c.loss
            assert c.pair.tasks | c.cover == star

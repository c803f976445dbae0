"""Thin maze pairs from a feasible solution.

The pipeline maps each task of a feasible set to a horizontal segment, cuts
it at its bottleneck edge into a left and a right piece, stretches every
piece so that it starts at the first vertex, and then selects a cheap set of
pieces that meets every node of a decomposition tree.  Selected tasks are
glued into m-tasks, one per bottleneck edge.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Optional, Sequence

from .maze import MazePair, make_mtask, map_pair_back, thinness
from .model import Instance, Number, check_feasible, is_delta_large, preprocess, to_fraction


@dataclass(frozen=True)
class Segment:
    """Open segment ``(x0, x1) x {y}`` owned by task ``task``.

    It contains edge ``j`` (joining vertices ``j`` and ``j+1``) when
    ``x0 <= j`` and ``j + 1 <= x1``.
    """

    task: int
    x0: int
    x1: int
    y: Fraction
    w: Fraction
    side: str = "full"

    def contains(self, edge: int) -> bool:
        return self.x0 <= edge and edge + 1 <= self.x1

    @property
    def first_edge(self) -> int:
        return self.x0

    @property
    def last_edge(self) -> int:
        return self.x1 - 1


def build_segments(inst: Instance, tasks: Iterable[int]) -> list:
    out = []
    for i in sorted(tasks):
        t = inst.task(i)
        out.append(Segment(i, t.s, t.t, inst.bneck(i).b, t.w, "full"))
    return out


def split_lr(inst: Instance, segments: Sequence[Segment]) -> tuple:
    """Cut every full segment at its bottleneck edge; both halves keep it."""
    left, right = [], []
    for seg in segments:
        e = inst.bneck(seg.task).e
        left.append(Segment(seg.task, seg.x0, e + 1, seg.y, seg.w, "left"))
        right.append(Segment(seg.task, e, seg.x1, seg.y, seg.w, "right"))
    return left, right


def _labels(segments: Sequence[Segment]) -> dict:
    return {task: rank for rank, task in enumerate(sorted(s.task for s in segments), start=1)}


def transform_right(inst: Instance, segments: Sequence[Segment]) -> list:
    """Stretch right pieces to start at vertex 1 and lift them to distinct levels.

    Piece ``(v, x1) x {b}`` of the task with label ``i`` becomes
    ``(1, x1) x {b + M v + eps i}`` with ``M = 1 + max capacity`` and
    ``eps = 1/(n+1)``.  Since ``b < M`` and ``eps i < 1`` the new levels order
    the pieces by start vertex and then by label.
    """
    if not segments:
        return []
    big = 1 + max(inst.capacities)
    labels = _labels(segments)
    eps = Fraction(1, len(segments) + 1)
    return [
        Segment(s.task, 1, s.x1, s.y + big * s.x0 + eps * labels[s.task], s.w, "transformed")
        for s in segments
    ]


def mirror(inst: Instance, segments: Sequence[Segment]) -> list:
    """Reflect segments left to right: vertex ``x`` goes to ``N + 1 - x``."""
    top = inst.num_vertices + 1
    return [Segment(s.task, top - s.x1, top - s.x0, s.y, s.w, s.side) for s in segments]


def mirror_instance(inst: Instance) -> Instance:
    from .model import Task

    top = inst.num_vertices + 1
    tasks = tuple(Task(t.id, top - t.t, top - t.s, t.d, t.w) for t in inst.tasks)
    return Instance(tuple(reversed(inst.capacities)), tasks)


def transform_left(inst: Instance, segments: Sequence[Segment]) -> list:
    """Left pieces, handled as right pieces of the mirrored path."""
    return transform_right(inst, mirror(inst, segments))


# -- decomposition tree ------------------------------------------------------


@dataclass
class TreeNode:
    id: int
    edge: int
    lo: Fraction
    hi: Optional[Fraction]  # None stands for +infinity
    reps: tuple  # indices into the tree's segment list, sorted by level
    parent: Optional[int] = None
    children: list = field(default_factory=list)


@dataclass
class DecompTree:
    segments: list
    k: int
    nodes: list
    root: Optional[int]

    @property
    def degenerate(self) -> bool:
        return self.root is None

    def path(self, seg: int) -> list:
        """Nodes whose representative set holds segment ``seg``, root side first."""
        return [n.id for n in self.nodes if seg in n.reps]

    def paths(self) -> dict:
        out = {j: [] for j in range(len(self.segments))}
        for n in self.nodes:
            for j in n.reps:
                out[j].append(n.id)
        return out

    def node_arcs(self) -> list:
        """Covering constraints as arcs: node ``w`` split into ``w_in -> w_out``.

        The segment paths through such an arc are exactly ``R_w``.
        """
        return [(("in", n.id), ("out", n.id), frozenset(n.reps)) for n in self.nodes]

    def tree_arcs(self) -> list:
        """Parent-child arcs plus one pendant arc per leaf, with their path sets."""
        arcs = []
        for n in self.nodes:
            for c in n.children:
                arcs.append((n.id, c, frozenset(n.reps) & frozenset(self.nodes[c].reps)))
            if not n.children:
                arcs.append((n.id, ("leaf", n.id), frozenset(n.reps)))
        return arcs

    def leaves(self) -> list:
        return [n.id for n in self.nodes if not n.children]


def build_tree(segments: Sequence[Segment], k: int) -> DecompTree:
    """Decomposition tree over left-anchored segments with distinct levels.

    Requires ``k`` even, every segment starting at vertex 1, and distinct
    right ends (so each edge gains at most one segment when walking left).
    """
    if k < 2 or k % 2:
        raise ValueError(f"k must be even and at least 2, got {k}")
    segs = list(segments)
    if any(s.x0 != 1 for s in segs):
        raise ValueError("segments must start at vertex 1")
    if len({s.y for s in segs}) != len(segs):
        raise ValueError("segment levels must be distinct")
    ends = [s.last_edge for s in segs]
    if len(set(ends)) != len(ends):
        raise ValueError("segments must have distinct right ends")
    tree = DecompTree(segs, k, [], None)
    if not segs:
        return tree
    top_edge = max(ends)
    root_edge = None
    for e in range(top_edge, 0, -1):
        if sum(1 for s in segs if s.contains(e)) >= k - 1:
            root_edge = e
            break
    if root_edge is None:
        return tree

    def level_sorted(idx):
        return tuple(sorted(idx, key=lambda j: segs[j].y))

    def inside(j, lo, hi):
        return lo <= segs[j].y and (hi is None or segs[j].y < hi)

    def add(edge, lo, hi, reps, parent):
        node = TreeNode(len(tree.nodes), edge, lo, hi, level_sorted(reps), parent)
        tree.nodes.append(node)
        if parent is not None:
            tree.nodes[parent].children.append(node.id)
        return node.id

    root = add(root_edge, Fraction(0), None, [j for j in range(len(segs)) if segs[j].contains(root_edge)], None)
    tree.root = root
    queue = [root]
    while queue:
        w = tree.nodes[queue.pop(0)]
        if w.edge == 1:
            continue
        nxt = w.edge - 1
        reps = [j for j in range(len(segs)) if segs[j].contains(nxt) and inside(j, w.lo, w.hi)]
        if len(reps) < k:
            queue.append(add(nxt, w.lo, w.hi, reps, w.id))
            continue
        if len(reps) > k:
            raise AssertionError("representative set grew by more than one segment")
        reps = level_sorted(reps)
        half = k // 2
        y0 = segs[reps[half]].y
        queue.append(add(nxt, w.lo, y0, reps[:half], w.id))
        queue.append(add(nxt, y0, w.hi, reps[half:], w.id))
    return tree


@dataclass(frozen=True)
class SegmentCover:
    selected: frozenset  # segment indices
    weight: Fraction

    def tasks(self, tree: DecompTree) -> frozenset:
        return frozenset(tree.segments[j].task for j in self.selected)


def is_segment_cover(tree: DecompTree, selected: Iterable[int]) -> bool:
    chosen = set(selected)
    return all(chosen & set(n.reps) for n in tree.nodes)


def min_segment_cover(tree: DecompTree) -> SegmentCover:
    """Cheapest set of segments meeting every node's representative set.

    Each segment's nodes form a downward path, so the problem is solved
    exactly by a root-to-leaf DP whose state is the set of already selected
    segments that continue into the current node.  Below the root, a node
    holds at most one segment its parent does not, so only the root
    branches widely.
    """
    if tree.degenerate:
        return SegmentCover(frozenset(), Fraction(0))
    segs = tree.segments
    memo = {}

    def best(wid, inherited):
        key = (wid, inherited)
        if key in memo:
            return memo[key]
        node = tree.nodes[wid]
        reps = frozenset(node.reps)
        parent = frozenset(tree.nodes[node.parent].reps) if node.parent is not None else frozenset()
        fresh = sorted(reps - parent, key=lambda j: segs[j].y)
        result = None
        for size in range(len(fresh) + 1):
            for extra in combinations(fresh, size):
                chosen = inherited | frozenset(extra)
                if not chosen:
                    continue
                cost = sum((segs[j].w for j in extra), Fraction(0))
                picked = set(extra)
                for c in node.children:
                    sub = best(c, chosen & frozenset(tree.nodes[c].reps))
                    if sub is None:  # that child is left with nothing to pick
                        break
                    cost += sub[0]
                    picked |= sub[1]
                else:
                    if result is None or cost < result[0]:
                        result = (cost, frozenset(picked))
        memo[key] = result
        return result

    limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(limit, 10 * len(tree.nodes) + 1000))
    try:
        cost, picked = best(tree.root, frozenset())
    finally:
        sys.setrecursionlimit(limit)
    return SegmentCover(picked, cost)


# -- assembling the pair -----------------------------------------------------


def lift_cover(left_tasks: Iterable[int], right_tasks: Iterable[int]) -> frozenset:
    """A task's full segment is kept in the cover when either half was chosen."""
    return frozenset(left_tasks) | frozenset(right_tasks)


def maze_pair_from_cover(inst: Instance, tasks: Iterable[int], cover: Iterable[int], delta: Number) -> MazePair:
    """Replace covered tasks by one m-task per bottleneck edge.

    The m-task on edge ``e`` runs from the leftmost start to the rightmost end
    among covered tasks with bottleneck ``e``.
    """
    tasks = frozenset(tasks)
    cover = frozenset(cover)
    if not cover <= tasks:
        raise ValueError("cover must be a subset of the task set")
    groups = {}
    for i in cover:
        groups.setdefault(inst.bneck(i).e, []).append(inst.task(i))
    mts = []
    for e, group in sorted(groups.items()):
        s = min(t.s for t in group)
        t = max(t.t for t in group)
        mts.append(make_mtask(inst, s, t, e, delta))
    return MazePair(tasks - cover, frozenset(mts))


def k_prime(eps: Number) -> int:
    """Smallest even ``k`` with ``k >= 4 (1 + eps) / eps``."""
    eps = to_fraction(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    k = math.ceil(4 * (1 + eps) / eps)
    return k + (k % 2)


def k_of(eps: Number, delta: Number) -> int:
    """Thinness ``4 k' + ceil(1/delta)`` reached by the construction."""
    delta = to_fraction(delta)
    if not 0 < delta <= 1:
        raise ValueError(f"delta must lie in (0, 1], got {delta}")
    return 4 * k_prime(eps) + math.ceil(1 / delta)


@dataclass
class Side:
    """One half of the pipeline (left or right pieces)."""

    pieces: list
    transformed: list
    tree: DecompTree
    cover: SegmentCover

    @property
    def tasks(self) -> frozenset:
        return self.cover.tasks(self.tree)


@dataclass
class Construction:
    pair: MazePair
    tasks: frozenset
    cover: frozenset
    left: Optional[Side]
    right: Optional[Side]
    k: int
    delta: Fraction
    bound: int
    achieved: int
    loss: Fraction
    total: Fraction
    union_feasible: bool
    work: Optional[Instance] = None  # preprocessed instance the halves live in

    def certificate(self) -> dict:
        from .model import format_fraction

        ratio = self.loss / self.total if self.total else Fraction(0)
        return {
            "k_prime": self.k,
            "thinness_bound": self.bound,
            "thinness_achieved": self.achieved,
            "weight_total": format_fraction(self.total),
            "weight_lost": format_fraction(self.loss),
            "loss_ratio": format_fraction(ratio),
            "loss_bound": format_fraction(Fraction(4, self.k)),
            "union_feasible": self.union_feasible,
        }


def _side(work: Instance, pieces: list, transformed: list, k: int) -> Side:
    tree = build_tree(transformed, k)
    return Side(pieces, transformed, tree, min_segment_cover(tree))


def construct_thin_pair(inst: Instance, tasks: Iterable[int], k: int, delta: Number) -> Construction:
    """Thin maze pair from a feasible set of delta-large tasks.

    The result is ``(4k + ceil(1/delta))``-thin, tasks plus m-tasks are
    feasible together, and at most ``4/k`` of the weight is lost.
    """
    delta = to_fraction(delta)
    tasks = frozenset(tasks)
    if k < 2 or k % 2:
        raise ValueError(f"k must be even and at least 2, got {k}")
    if not check_feasible(inst, tasks):
        raise ValueError("task set is not feasible")
    for i in tasks:
        if not is_delta_large(inst, i, delta):
            raise ValueError(f"task {i} is not {delta}-large")
    total = inst.weight(tasks)
    bound = 4 * k + math.ceil(1 / delta)
    if not tasks:
        empty = MazePair(frozenset(), frozenset())
        return Construction(empty, tasks, frozenset(), None, None, k, delta, bound, 1,
                            Fraction(0), total, True)

    work, pmap = preprocess(inst.restrict(tasks))
    full = build_segments(work, tasks)
    lpieces, rpieces = split_lr(work, full)
    right = _side(work, rpieces, transform_right(work, rpieces), k)
    left = _side(work, lpieces, transform_left(work, lpieces), k)
    cover = lift_cover(left.tasks, right.tasks)
    pair = maze_pair_from_cover(work, tasks, cover, delta)
    if not pmap.is_identity():
        pair = map_pair_back(inst, pmap, pair, delta)
    extra = [(m.s, m.t, m.d) for m in pair.regular_mtasks()]
    feasible = check_feasible(inst, pair.tasks, extra).feasible
    return Construction(pair, tasks, cover, left, right, k, delta, bound, thinness(inst, pair),
                        inst.weight(cover), total, feasible, work)

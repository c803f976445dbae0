"""Maze tasks, maze pairs and the predicates defined over them."""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations_with_replacement
from typing import Iterable, Optional, Sequence

from .model import Instance, Number, to_fraction

BOTTOM_KEY = (0,)
TOP_KEY = (2,)


@dataclass(frozen=True)
class Rules:
    """Semantic switches for the predicates.

    The defaults are the correct definitions.  Each ``False`` flag is one of
    the deliberate mutations the lemma suite must detect.
    """

    charge_mtask: bool = True  # add d(m_e) in the weak feasibility test
    inclusive_band: bool = True  # bound_e uses b(m') < b(i) <= b(m'')
    cap_critical: bool = True  # ncrit(delta) caps critical sets


REFERENCE = Rules()
MUTATIONS = {
    "drop-mtask-demand": Rules(charge_mtask=False),
    "strict-band": Rules(inclusive_band=False),
    "no-ncrit-cap": Rules(cap_critical=False),
}


@dataclass(frozen=True)
class MTask:
    """A maze task on path ``(s, t)`` with bottleneck edge ``e``.

    Dummies span the whole path; the bottom dummy has bottleneck edge equal
    to the rightmost edge and the top dummy has none.
    """

    s: int
    t: int
    e: Optional[int]
    b: Optional[Fraction]
    d: Fraction
    kind: str = "regular"

    @property
    def key(self) -> tuple:
        if self.kind == "bottom":
            return BOTTOM_KEY
        if self.kind == "top":
            return TOP_KEY
        return (1, self.b, self.e)

    @property
    def id(self) -> str:
        if self.kind == "bottom":
            return "bottom"
        if self.kind == "top":
            return "top"
        return f"m{self.e}:{self.s}-{self.t}"

    @property
    def is_dummy(self) -> bool:
        return self.kind != "regular"

    def uses(self, edge: int) -> bool:
        return self.s <= edge < self.t

    def to_dict(self) -> dict:
        from .model import format_fraction

        return {
            "id": self.id,
            "s": self.s,
            "t": self.t,
            "e": self.e,
            "d": format_fraction(self.d),
        }


def bottom(inst: Instance) -> MTask:
    return MTask(1, inst.num_vertices, inst.num_edges, Fraction(0), Fraction(0), "bottom")


def top(inst: Instance) -> MTask:
    return MTask(1, inst.num_vertices, None, None, Fraction(0), "top")


def make_mtask(inst: Instance, s: int, t: int, e: int, delta: Number) -> MTask:
    u = inst.capacity(e)
    return MTask(s, t, e, u, to_fraction(delta) * u)


@dataclass(frozen=True)
class MazePair:
    tasks: frozenset
    mtasks: frozenset

    def __post_init__(self):
        object.__setattr__(self, "tasks", frozenset(self.tasks))
        object.__setattr__(self, "mtasks", frozenset(self.mtasks))
        keys = [m.key for m in self.mtasks if not m.is_dummy]
        if len(keys) != len(set(keys)):
            raise ValueError("m-tasks of a maze pair need distinct bottleneck capacities")

    def regular_mtasks(self) -> list:
        return sorted((m for m in self.mtasks if not m.is_dummy), key=lambda m: m.key)

    def weight(self, inst: Instance) -> Fraction:
        return inst.weight(self.tasks)

    def to_dict(self, inst: Instance) -> dict:
        from .model import format_fraction

        return {
            "tasks": sorted(self.tasks),
            "mtasks": [m.to_dict() for m in self.regular_mtasks()],
            "weight": format_fraction(self.weight(inst)),
        }


def gen_mtasks(inst: Instance, delta: Number) -> list:
    """All m-tasks of ``inst``: one per pair of tasks sharing a bottleneck edge.

    Identical ``(path, bottleneck)`` combinations are kept once.  The list
    starts with the two dummies, followed by regular m-tasks in key order.
    """
    by_edge = {}
    for t in inst.tasks:
        by_edge.setdefault(inst.bneck(t.id).e, []).append(t)
    seen = set()
    regular = []
    for e, group in by_edge.items():
        for a, b in combinations_with_replacement(group, 2):
            s, t = min(a.s, b.s), max(a.t, b.t)
            if (s, t, e) not in seen:
                seen.add((s, t, e))
                regular.append(make_mtask(inst, s, t, e, delta))
    regular.sort(key=lambda m: (m.key, m.s, m.t))
    return [bottom(inst), top(inst)] + regular


@dataclass(frozen=True)
class Partition3:
    abv: frozenset
    crit: frozenset
    subc: frozenset


def _task_key(inst: Instance, i: int) -> tuple:
    return inst.bneck(i).key


def overlaps(inst: Instance, m: MTask, i: int) -> bool:
    t = inst.task(i)
    return t.s < m.t and m.s < t.t


def partition(inst: Instance, m: MTask, subset: Iterable[int], delta: Number,
              edge: Optional[int] = None) -> Partition3:
    """Split the tasks of ``subset`` sharing an edge with ``m`` into above,
    critical and subcritical tasks (restricted to ``edge`` when given)."""
    delta = to_fraction(delta)
    abv, crit, subc = set(), set(), set()
    for i in subset:
        if not overlaps(inst, m, i):
            continue
        if edge is not None and not inst.task(i).uses(edge):
            continue
        if m.kind == "top":
            subc.add(i)
        elif m.kind == "bottom":
            abv.add(i)
        elif _task_key(inst, i) > m.key:
            abv.add(i)
        elif inst.bneck(i).b >= delta / 2 * m.b:
            crit.add(i)
        else:
            subc.add(i)
    return Partition3(frozenset(abv), frozenset(crit), frozenset(subc))


def crit(inst: Instance, m: MTask, subset: Iterable[int], delta: Number,
         edge: Optional[int] = None) -> frozenset:
    return partition(inst, m, subset, delta, edge).crit


def in_band(lo_key: tuple, hi_key: tuple, key: tuple, rules: Rules = REFERENCE) -> bool:
    if rules.inclusive_band:
        return lo_key < key <= hi_key
    return lo_key < key < hi_key


def bound_tasks(inst: Instance, e: int, m_lo: MTask, m_hi: MTask, subset: Iterable[int],
                rules: Rules = REFERENCE) -> frozenset:
    """Tasks of ``subset`` on edge ``e`` sandwiched between two m-tasks."""
    if not m_lo.key < m_hi.key:
        raise ValueError("bound_tasks needs b(m_lo) < b(m_hi)")
    return frozenset(
        i for i in subset
        if inst.task(i).uses(e) and in_band(m_lo.key, m_hi.key, _task_key(inst, i), rules)
    )


@dataclass(frozen=True)
class ThinResult:
    ok: bool
    edge: Optional[int] = None
    tasks: frozenset = frozenset()

    def __bool__(self) -> bool:
        return self.ok


def bin_groups(task_keys: Sequence, level_keys: Iterable, rules: Rules = REFERENCE) -> list:
    """Indices of ``task_keys`` grouped into the bins cut by ``level_keys``.

    The bins are ``(-inf, mu_1], (mu_1, mu_2], ..., (mu_p, inf)`` for the
    sorted distinct levels ``mu``.
    """
    levels = [BOTTOM_KEY] + sorted(set(level_keys)) + [TOP_KEY]
    bins = [[] for _ in range(len(levels) - 1)]
    for idx, key in enumerate(task_keys):
        for j in range(len(levels) - 1):
            if in_band(levels[j], levels[j + 1], key, rules):
                bins[j].append(idx)
                break
        else:
            # only reachable under the strict-band mutation
            bins[-1].append(idx)
    return bins


def edge_is_thin(task_keys: Sequence, level_keys: Iterable, k: int, rules: Rules = REFERENCE) -> bool:
    return all(len(g) <= k for g in bin_groups(task_keys, level_keys, rules))


def thin_bins(inst: Instance, pair: MazePair, e: int, rules: Rules = REFERENCE) -> list:
    """Tasks of the pair on ``e`` grouped into the bins cut by the m-task levels."""
    on_e = sorted(i for i in pair.tasks if inst.task(i).uses(e))
    levels = [m.key for m in pair.mtasks if not m.is_dummy and m.uses(e)]
    groups = bin_groups([_task_key(inst, i) for i in on_e], levels, rules)
    return [[on_e[j] for j in g] for g in groups]


def is_k_thin(inst: Instance, pair: MazePair, k: int, rules: Rules = REFERENCE) -> ThinResult:
    if k < 1:
        raise ValueError("k must be at least 1")
    for e in range(1, inst.num_edges + 1):
        for group in thin_bins(inst, pair, e, rules):
            if len(group) > k:
                return ThinResult(False, e, frozenset(group))
    return ThinResult(True)


def thinness(inst: Instance, pair: MazePair) -> int:
    """Smallest ``k`` for which the pair is k-thin (at least 1)."""
    worst = 1
    for e in range(1, inst.num_edges + 1):
        for group in thin_bins(inst, pair, e):
            worst = max(worst, len(group))
    return worst


@dataclass(frozen=True)
class WeakResult:
    ok: bool
    edge: Optional[int] = None
    load: Optional[Fraction] = None

    def __bool__(self) -> bool:
        return self.ok


def top_mtask(pair: MazePair, e: int) -> Optional[MTask]:
    """Regular m-task of the pair on ``e`` with the largest bottleneck."""
    best = None
    for m in pair.mtasks:
        if not m.is_dummy and m.uses(e) and (best is None or m.key > best.key):
            best = m
    return best


def weak_load(inst: Instance, pair: MazePair, e: int, delta: Number, rules: Rules = REFERENCE) -> Fraction:
    m = top_mtask(pair, e)
    if m is None:
        return inst.demand(inst.tasks_on(e, pair.tasks))
    part = partition(inst, m, pair.tasks, delta, e)
    load = inst.demand(part.abv) + inst.demand(part.crit)
    if rules.charge_mtask:
        load += m.d
    return load


def is_weakly_feasible(inst: Instance, pair: MazePair, delta: Number, rules: Rules = REFERENCE) -> WeakResult:
    for e in range(1, inst.num_edges + 1):
        load = weak_load(inst, pair, e, delta, rules)
        if load > inst.capacity(e):
            return WeakResult(False, e, load)
    return WeakResult(True)


def ncrit(delta: Number, rules: Rules = REFERENCE) -> int:
    """Cap on the critical tasks of one m-task: floor(4/delta^2 + 1/delta)."""
    delta = to_fraction(delta)
    if not 0 < delta <= 1:
        raise ValueError(f"delta must lie in (0, 1], got {delta}")
    if not rules.cap_critical:
        return sys.maxsize
    return math.floor(4 / delta**2 + 1 / delta)


def union_feasible(inst: Instance, pair: MazePair) -> bool:
    """Feasibility of tasks and regular m-tasks together."""
    from .model import check_feasible

    extra = [(m.s, m.t, m.d) for m in pair.regular_mtasks()]
    return check_feasible(inst, pair.tasks, extra).feasible


def map_pair_back(inst: Instance, pmap, pair: MazePair, delta: Number) -> MazePair:
    """Express a pair found on a preprocessed copy in the original vertices."""
    mts = []
    for m in pair.regular_mtasks():
        s, t = pmap.original_vertex(m.s), pmap.original_vertex(m.t)
        mts.append(make_mtask(inst, s, t, pmap.edge_origin[m.e], delta))
    return MazePair(pair.tasks, frozenset(mts))

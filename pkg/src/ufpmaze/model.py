"""Instances of unsplittable flow on a path.

Vertices are numbered ``1..m+1`` and edge ``j`` joins vertices ``j`` and
``j+1``.  A task ``(s, t)`` uses the edges ``s, s+1, ..., t-1``.  All numbers
are kept as :class:`fractions.Fraction` so that every capacity comparison is
exact.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence, Union

from . import search

Number = Union[int, float, str, Fraction]

DEFAULT_EXACT_LIMIT = 20


class InstanceError(ValueError):
    """Raised for malformed instance documents."""


class GuardExceeded(RuntimeError):
    """Raised when an exact routine is asked to run beyond its size guard."""


def to_fraction(value: Number) -> Fraction:
    """Parse an int, float, ``"p/q"`` string or Fraction into a Fraction."""
    if isinstance(value, bool):
        raise InstanceError(f"not a number: {value!r}")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        # str() keeps 0.1 as 1/10 instead of the binary expansion
        return Fraction(str(value))
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise InstanceError(f"not a rational: {value!r}") from exc
    raise InstanceError(f"not a number: {value!r}")


def format_fraction(value: Fraction) -> Union[int, str]:
    """JSON form of a rational: an int when integral, else ``"p/q"``."""
    if value.denominator == 1:
        return value.numerator
    return f"{value.numerator}/{value.denominator}"


@dataclass(frozen=True)
class Task:
    id: int
    s: int
    t: int
    d: Fraction
    w: Fraction

    def edges(self) -> range:
        return range(self.s, self.t)

    def uses(self, edge: int) -> bool:
        return self.s <= edge < self.t


@dataclass(frozen=True, order=True)
class BottleneckInfo:
    """Bottleneck capacity ``b`` attained at edge ``e``.

    ``key`` is the strict comparison key ``(1, b, e)``; the leading 1 leaves
    room for the dummy m-tasks, which use 0 (bottom) and 2 (top).
    """

    key: tuple
    b: Fraction = field(compare=False)
    e: int = field(compare=False)


def path_bottleneck(capacities: Sequence[Fraction], s: int, t: int) -> BottleneckInfo:
    if not s < t:
        raise ValueError(f"empty path ({s}, {t})")
    best = s
    for j in range(s + 1, t):
        if capacities[j - 1] < capacities[best - 1]:
            best = j
    b = capacities[best - 1]
    return BottleneckInfo((1, b, best), b, best)


@dataclass(frozen=True)
class Instance:
    capacities: tuple
    tasks: tuple
    _by_id: dict = field(default_factory=dict, init=False, repr=False, compare=False)
    _bneck: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "capacities", tuple(to_fraction(u) for u in self.capacities))
        object.__setattr__(self, "tasks", tuple(self.tasks))
        m = len(self.capacities)
        for u in self.capacities:
            if u <= 0:
                raise InstanceError(f"non-positive capacity {u}")
        for task in self.tasks:
            if task.id in self._by_id:
                raise InstanceError(f"duplicate task id {task.id}")
            if not 1 <= task.s < task.t <= m + 1:
                raise InstanceError(f"task {task.id}: bad path ({task.s}, {task.t})")
            if task.d <= 0 or task.w < 0:
                raise InstanceError(f"task {task.id}: demand must be > 0 and weight >= 0")
            self._by_id[task.id] = task
            self._bneck[task.id] = path_bottleneck(self.capacities, task.s, task.t)

    @property
    def num_edges(self) -> int:
        return len(self.capacities)

    @property
    def num_vertices(self) -> int:
        return len(self.capacities) + 1

    @property
    def ids(self) -> tuple:
        return tuple(t.id for t in self.tasks)

    def task(self, task_id: int) -> Task:
        return self._by_id[task_id]

    def capacity(self, edge: int) -> Fraction:
        return self.capacities[edge - 1]

    def bneck(self, task_id: int) -> BottleneckInfo:
        return self._bneck[task_id]

    def tasks_on(self, edge: int, subset: Iterable[int] | None = None) -> list:
        ids = self.ids if subset is None else subset
        return [i for i in ids if self._by_id[i].uses(edge)]

    def weight(self, ids: Iterable[int]) -> Fraction:
        return sum((self._by_id[i].w for i in ids), Fraction(0))

    def demand(self, ids: Iterable[int]) -> Fraction:
        return sum((self._by_id[i].d for i in ids), Fraction(0))

    def restrict(self, ids: Iterable[int]) -> "Instance":
        keep = set(ids)
        return Instance(self.capacities, tuple(t for t in self.tasks if t.id in keep))

    def to_dict(self) -> dict:
        return {
            "capacities": [format_fraction(u) for u in self.capacities],
            "tasks": [
                {"id": t.id, "s": t.s, "t": t.t, "d": format_fraction(t.d), "w": format_fraction(t.w)}
                for t in self.tasks
            ],
        }


def bottleneck(inst: Instance, what) -> BottleneckInfo:
    """Bottleneck of a task, task id, or ``(s, t)`` vertex pair in ``inst``."""
    if isinstance(what, Task):
        return path_bottleneck(inst.capacities, what.s, what.t)
    if isinstance(what, int):
        return inst.bneck(what)
    s, t = what
    return path_bottleneck(inst.capacities, s, t)


def is_delta_large(inst: Instance, task, delta: Number) -> bool:
    delta = to_fraction(delta)
    if not 0 < delta <= 1:
        raise ValueError(f"delta must lie in (0, 1], got {delta}")
    if isinstance(task, int):
        task = inst.task(task)
    return task.d >= delta * bottleneck(inst, task).b


def load_instance(raw: Union[str, Mapping]) -> Instance:
    """Build an instance from a JSON string or an already decoded mapping.

    Tasks whose demand exceeds their bottleneck capacity can never be routed
    and are dropped.
    """
    if isinstance(raw, str):
        try:
            raw = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise InstanceError(f"invalid JSON: {exc}") from exc
    if not isinstance(raw, Mapping) or "capacities" not in raw or "tasks" not in raw:
        raise InstanceError("document needs 'capacities' and 'tasks'")
    caps = raw["capacities"]
    if not isinstance(caps, list) or not caps:
        raise InstanceError("'capacities' must be a non-empty list")
    capacities = tuple(to_fraction(u) for u in caps)
    tasks = []
    for entry in raw["tasks"]:
        try:
            tid, s, t = entry["id"], entry["s"], entry["t"]
            d, w = to_fraction(entry["d"]), to_fraction(entry["w"])
        except (KeyError, TypeError) as exc:
            raise InstanceError(f"malformed task entry {entry!r}") from exc
        if not all(isinstance(x, int) and not isinstance(x, bool) for x in (tid, s, t)):
            raise InstanceError(f"task fields id/s/t must be integers: {entry!r}")
        if s >= t:
            raise InstanceError(f"task {tid}: s >= t")
        tasks.append(Task(tid, s, t, d, w))
    inst = Instance(capacities, tuple(tasks))
    kept = [t for t in inst.tasks if t.d <= inst.bneck(t.id).b]
    if len(kept) != len(inst.tasks):
        inst = Instance(capacities, tuple(kept))
    return inst


def dump_instance(inst: Instance) -> str:
    return json.dumps(inst.to_dict())


@dataclass(frozen=True)
class FeasibilityReport:
    loads: dict
    violations: tuple

    @property
    def feasible(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.feasible


def check_feasible(inst: Instance, subset: Iterable[int], extra=()) -> FeasibilityReport:
    """Per-edge load of ``subset``.

    ``extra`` holds additional ``(s, t, demand)`` paths (m-tasks) charged on
    top of the tasks.
    """
    subset = list(subset)
    loads = {}
    violations = []
    for e in range(1, inst.num_edges + 1):
        load = inst.demand(inst.tasks_on(e, subset))
        for s, t, d in extra:
            if s <= e < t:
                load += d
        loads[e] = (load, inst.capacity(e))
        if load > inst.capacity(e):
            violations.append(e)
    return FeasibilityReport(loads, tuple(violations))


def exact_limit() -> int:
    return int(os.environ.get("UFPMAZE_EXACT_MAX_TASKS", DEFAULT_EXACT_LIMIT))


def exact_opt(inst: Instance, limit: int | None = None) -> tuple:
    """Maximum-weight feasible subset by pruned enumeration.

    Ties go to the lexicographically smallest sorted id tuple.
    """
    limit = exact_limit() if limit is None else limit
    n = len(inst.tasks)
    if n > limit:
        raise GuardExceeded(f"exact oracle limited to {limit} tasks, got {n}")
    if n == 0:
        return frozenset(), Fraction(0)
    ids = sorted(inst.ids)
    rows = []
    caps = []
    for e in range(1, inst.num_edges + 1):
        mask = 0
        for bit, i in enumerate(ids):
            if inst.task(i).uses(e):
                mask |= 1 << bit
        if mask:
            rows.append(mask)
            caps.append(inst.capacity(e))
    demands = [inst.task(i).d for i in ids]
    weights = [inst.task(i).w for i in ids]
    best = search.best_subset(weights, demands, rows, caps)
    chosen = frozenset(ids[b] for b in range(n) if best >> b & 1)
    return chosen, inst.weight(chosen)


@dataclass(frozen=True)
class PreprocessMap:
    """Correspondence between an instance and its preprocessed form.

    ``vertex_map[v]`` lists the new vertices that replace original vertex
    ``v`` (empty when ``v`` hosted no endpoint and was contracted).
    ``edge_origin[j]`` is the original edge attaining the capacity of new
    edge ``j``, or ``None`` for inserted edges.
    """

    vertex_map: dict
    edge_origin: dict
    inserted: frozenset
    sentinel_capacity: Fraction

    def original_vertex(self, v: int) -> int:
        for orig, copies in self.vertex_map.items():
            if v in copies:
                return orig
        raise KeyError(v)

    def is_identity(self) -> bool:
        return not self.inserted and all(
            copies == (v,) for v, copies in self.vertex_map.items()
        ) and all(j == o for j, o in self.edge_origin.items())


def is_preprocessed(inst: Instance) -> bool:
    """True when every vertex is the endpoint of exactly one task."""
    count = [0] * (inst.num_vertices + 1)
    for t in inst.tasks:
        count[t.s] += 1
        count[t.t] += 1
    return all(c == 1 for c in count[1:])


def preprocess(inst: Instance) -> tuple:
    """Split shared endpoints and contract endpoint-free vertices.

    At a vertex hosting several endpoints, tasks ending there receive the
    left copies and tasks starting there the right copies, each group in id
    order.  Copies are joined by edges of capacity
    ``max capacity + total demand``, which no task can saturate.  A vertex
    hosting no endpoint is contracted: its two edges merge into one edge with
    the smaller capacity.
    """
    if is_preprocessed(inst):
        ident_v = {v: (v,) for v in range(1, inst.num_vertices + 1)}
        ident_e = {j: j for j in range(1, inst.num_edges + 1)}
        return inst, PreprocessMap(ident_v, ident_e, frozenset(), Fraction(0))

    sentinel = max(inst.capacities) + inst.demand(inst.ids)
    ends = {v: [] for v in range(1, inst.num_vertices + 1)}
    starts = {v: [] for v in range(1, inst.num_vertices + 1)}
    for t in sorted(inst.tasks, key=lambda t: t.id):
        ends[t.t].append(t.id)
        starts[t.s].append(t.id)

    new_s, new_t = {}, {}
    vertex_map = {}
    capacities = []
    edge_origin = {}
    inserted = set()
    nxt = 1
    prev_orig = None
    for v in range(1, inst.num_vertices + 1):
        slots = [("t", i) for i in ends[v]] + [("s", i) for i in starts[v]]
        if not slots:
            vertex_map[v] = ()
            continue
        if prev_orig is not None:
            # merged run of original edges prev_orig .. v-1
            run = range(prev_orig, v)
            origin = min(run, key=lambda j: (inst.capacity(j), j))
            capacities.append(inst.capacity(origin))
            edge_origin[nxt - 1] = origin
        copies = []
        for pos, (kind, tid) in enumerate(slots):
            if pos > 0:
                capacities.append(sentinel)
                edge_origin[nxt - 1] = None
                inserted.add(nxt - 1)
            copies.append(nxt)
            (new_t if kind == "t" else new_s)[tid] = nxt
            nxt += 1
        vertex_map[v] = tuple(copies)
        prev_orig = v

    tasks = tuple(Task(t.id, new_s[t.id], new_t[t.id], t.d, t.w) for t in inst.tasks)
    if not tasks:
        out = Instance((), ())
    else:
        out = Instance(tuple(capacities), tasks)
    return out, PreprocessMap(vertex_map, edge_origin, frozenset(inserted), sentinel)

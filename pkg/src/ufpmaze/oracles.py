"""Independent exhaustive oracles and the lemma suite built on them.

Nothing here calls the DP or the construction internals to obtain a value;
the oracles recompute every quantity directly from the definitions.
"""

from __future__ import annotations

import hashlib
import itertools
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterator, Optional, Sequence

import numpy as np

from . import search
from .maze import MazePair, MTask, make_mtask
from .model import GuardExceeded, Instance, Number, to_fraction

BRUTE_MAX_TASKS = 7
BRUTE_MAX_CHOICES = 1 << 14


def mtask_choices(inst: Instance, delta: Number) -> list:
    """Per bottleneck edge, the m-tasks available there (regular only)."""
    by_edge = {}
    for t in inst.tasks:
        by_edge.setdefault(inst.bneck(t.id).e, []).append(t)
    out = []
    for e in sorted(by_edge):
        group = by_edge[e]
        paths = sorted({(min(a.s, b.s), max(a.t, b.t)) for a in group for b in group})
        out.append([make_mtask(inst, s, t, e, delta) for s, t in paths])
    return out


def count_mtask_sets(inst: Instance, delta: Number) -> int:
    total = 1
    for group in mtask_choices(inst, delta):
        total *= len(group) + 1
    return total


def _best_for(inst: Instance, ids: list, mts: tuple, k: int, delta: Fraction) -> int:
    """Best task mask for a fixed m-task set, via the subset kernel."""
    sum_rows, sum_caps, count_rows = [], [], []
    for f in range(1, inst.num_edges + 1):
        here = [b for b, i in enumerate(ids) if inst.task(i).uses(f)]
        if not here:
            continue
        on_f = [m for m in mts if m.uses(f)]
        top = max(on_f, key=lambda m: m.key) if on_f else None
        if top is None:
            mask = sum(1 << b for b in here)
            cap = inst.capacity(f)
        else:
            mask = 0
            for b in here:
                bi = inst.bneck(ids[b])
                if bi.key > top.key or bi.b >= delta / 2 * top.b:
                    mask |= 1 << b
            cap = inst.capacity(f) - top.d
        if mask:
            sum_rows.append(mask)
            sum_caps.append(cap)
        elif cap < 0:
            return -1
        # tasks between consecutive m-task levels on f
        levels = [(0,)] + sorted(m.key for m in on_f) + [(2,)]
        for lo, hi in zip(levels, levels[1:]):
            mask = 0
            for b in here:
                key = inst.bneck(ids[b]).key
                if lo < key <= hi:
                    mask |= 1 << b
            if _bits(mask) > k:
                count_rows.append(mask)
    weights = [inst.task(i).w for i in ids]
    demands = [inst.task(i).d for i in ids]
    return search.best_subset(weights, demands, sum_rows, sum_caps, count_rows, k)


def _bits(x: int) -> int:
    return bin(x).count("1")


def best_maze_pair_bruteforce(inst: Instance, k: int, delta: Number,
                              max_tasks: int = BRUTE_MAX_TASKS,
                              max_choices: int = BRUTE_MAX_CHOICES) -> tuple:
    """Heaviest weakly feasible k-thin maze pair by exhaustion.

    Every m-task set with at most one m-task per bottleneck edge is tried;
    for each, the best task subset comes from the exact subset kernel.  Ties
    keep the first set found in enumeration order.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    delta = to_fraction(delta)
    ids = sorted(inst.ids)
    if len(ids) > max_tasks:
        raise GuardExceeded(f"brute force limited to {max_tasks} tasks, got {len(ids)}")
    if not ids:
        return MazePair(frozenset(), frozenset()), Fraction(0)
    groups = mtask_choices(inst, delta)
    if count_mtask_sets(inst, delta) > max_choices:
        raise GuardExceeded(f"brute force limited to {max_choices} m-task sets")
    best_w, best_pair = None, None
    for combo in itertools.product(*[[None] + g for g in groups]):
        mts = tuple(m for m in combo if m is not None)
        mask = _best_for(inst, ids, mts, k, delta)
        if mask < 0:
            continue
        chosen = frozenset(ids[b] for b in range(len(ids)) if mask >> b & 1)
        w = inst.weight(chosen)
        if best_w is None or w > best_w:
            best_w, best_pair = w, MazePair(chosen, frozenset(mts))
    return best_pair, best_w


# -- thinness by the quantifier definition -----------------------------------

QUANTIFIER_MAX_TASKS = 16


@lru_cache(maxsize=None)
def _mask_tables(n: int) -> tuple:
    """Popcount, lowest and highest set bit of every mask below ``2**n``."""
    masks = np.arange(1 << n, dtype=np.int64)
    pop = np.zeros(1 << n, dtype=np.int64)
    low = np.full(1 << n, n, dtype=np.int64)
    high = np.full(1 << n, -1, dtype=np.int64)
    for b in range(n):
        bit = ((masks >> b) & 1).astype(bool)
        pop += bit
        low = np.where(bit & (low == n), b, low)
        high = np.where(bit, b, high)
    return pop, np.minimum(low, max(n - 1, 0)), np.maximum(high, 0)


def quantifier_edge_violation(task_keys: Sequence, level_keys: Sequence, k: int) -> Optional[tuple]:
    """A set of more than ``k`` tasks that no level separates, or ``None``.

    A set ``S`` is separated when some level ``mu`` has
    ``min key(S) <= mu < max key(S)``.  Every subset is examined; the
    returned witness is one of smallest size (indices into ``task_keys``).
    """
    n = len(task_keys)
    if n > QUANTIFIER_MAX_TASKS:
        raise GuardExceeded(f"quantifier oracle limited to {QUANTIFIER_MAX_TASKS} tasks per edge")
    if n <= k:
        return None
    order = sorted(range(n), key=lambda i: task_keys[i])
    keys = [task_keys[i] for i in order]
    levels = list(level_keys)
    sep = np.array([[any(keys[a] <= mu < keys[b] for mu in levels) for b in range(n)]
                    for a in range(n)], dtype=bool)
    pop, low, high = _mask_tables(n)
    bad = (pop > k) & ~sep[low, high]
    if not bad.any():
        return None
    cand = np.flatnonzero(bad)
    mask = int(cand[np.argmin(pop[cand])])
    return tuple(sorted(order[b] for b in range(n) if mask >> b & 1))


def quantifier_is_k_thin(inst: Instance, pair: MazePair, k: int):
    """k-thinness of ``pair`` checked edge by edge with the quantifier oracle."""
    from .maze import ThinResult

    for e in range(1, inst.num_edges + 1):
        on_e = sorted(i for i in pair.tasks if inst.task(i).uses(e))
        levels = [m.key for m in pair.mtasks if not m.is_dummy and m.uses(e)]
        bad = quantifier_edge_violation([inst.bneck(i).key for i in on_e], levels, k)
        if bad is not None:
            return ThinResult(False, e, frozenset(on_e[j] for j in bad))
    return ThinResult(True)


# -- segment stabbing ----------------------------------------------------------

STAB_MAX_SEGMENTS = 20


@dataclass(frozen=True)
class StabResult:
    ok: bool
    edge: Optional[int] = None
    segments: tuple = ()

    def __bool__(self) -> bool:
        return self.ok


def stab_thinness_oracle(segments: Sequence, selected, k: int,
                         max_segments: int = STAB_MAX_SEGMENTS) -> StabResult:
    """Does every vertical stab through more than ``k`` segments hit a selected one?

    Stabs are taken at every edge midpoint; over an edge, the distinct
    stabbed sets are the runs of consecutive distinct levels.
    """
    segments = list(segments)
    if len(segments) > max_segments:
        raise GuardExceeded(f"stab oracle limited to {max_segments} segments")
    chosen = set(selected)
    if not segments:
        return StabResult(True)
    first = min(s.x0 for s in segments)
    last = max(s.x1 for s in segments)
    for j in range(first, last):
        here = [idx for idx, s in enumerate(segments) if s.contains(j)]
        values = sorted({segments[idx].y for idx in here})
        for a in range(len(values)):
            for b in range(a, len(values)):
                hit = [idx for idx in here if values[a] <= segments[idx].y <= values[b]]
                if len(hit) > k and not chosen.intersection(hit):
                    return StabResult(False, j, tuple(hit))
    return StabResult(True)


# -- segment covers ------------------------------------------------------------


def exhaustive_min_cover(tree, max_segments: int = STAB_MAX_SEGMENTS) -> tuple:
    """Minimum weight segment set meeting every node, over all subsets.

    Returns ``(selected indices, weight)``; the first minimum in mask order
    wins ties.
    """
    n = len(tree.segments)
    if tree.degenerate:
        return frozenset(), Fraction(0)
    if n > max_segments:
        raise GuardExceeded(f"exhaustive cover limited to {max_segments} segments")
    node_masks = sorted({sum(1 << j for j in node.reps) for node in tree.nodes})
    # a constraint implied by a smaller one adds nothing
    node_masks = [a for a in node_masks if not any(b != a and b & a == b for b in node_masks)]
    masks = np.arange(1 << n, dtype=np.int64)
    ok = np.ones(1 << n, dtype=bool)
    for nm in node_masks:
        ok &= (masks & nm) != 0
    ws = [to_fraction(s.w) for s in tree.segments]
    scale = math.lcm(*(w.denominator for w in ws))
    ints = [int(w * scale) for w in ws]
    if sum(abs(v) for v in ints) >= 1 << 62:
        raise GuardExceeded("segment weights too large for the exhaustive cover")
    total = np.zeros(1 << n, dtype=np.int64)
    for j, v in enumerate(ints):
        total += ((masks >> j) & 1) * v
    cand = np.flatnonzero(ok)
    if cand.size == 0:
        raise ValueError("no segment set meets every node")
    best = int(cand[np.argmin(total[cand])])
    chosen = frozenset(j for j in range(n) if best >> j & 1)
    return chosen, sum((ws[j] for j in chosen), Fraction(0))


# -- random maze pairs ---------------------------------------------------------


def random_pair(inst: Instance, delta: Number, rng: random.Random) -> MazePair:
    """Random task subset with at most one random m-task per bottleneck edge."""
    tasks = frozenset(i for i in inst.ids if rng.random() < 0.6)
    mts = []
    for group in mtask_choices(inst, delta):
        if rng.random() < 0.5:
            mts.append(rng.choice(group))
    return MazePair(tasks, frozenset(mts))


def random_edge_config(rng: random.Random, max_tasks: int = 12, max_levels: int = 4) -> tuple:
    """Random keys for the tasks and m-task levels of one edge.

    Keys share few values so that ties with levels are frequent.
    """
    n = rng.randint(0, max_tasks)
    pool = [(1, Fraction(rng.randint(1, 8)), rng.randint(1, 3)) for _ in range(rng.randint(1, 8))]
    tasks = [rng.choice(pool) for _ in range(n)]
    levels = set()
    for _ in range(rng.randint(0, max_levels)):
        if tasks and rng.random() < 0.6:
            levels.add(rng.choice(tasks))
        else:
            levels.add((1, Fraction(rng.randint(1, 16), 2), rng.randint(1, 3)))
    return tasks, sorted(levels)


# -- the lemma suite -----------------------------------------------------------


@dataclass
class OracleReport:
    """Outcome of one check on one instance.

    ``count`` is the number of comparisons folded into the report; a failed
    report carries the first witness found.
    """

    check: str
    seed: int
    digest: str
    ok: bool
    oracle: object = None
    algo: object = None
    witness: object = None
    count: int = 1

    def to_dict(self) -> dict:
        return {
            "check": self.check,
            "seed": self.seed,
            "digest": self.digest,
            "ok": self.ok,
            "oracle": _plain(self.oracle),
            "algo": _plain(self.algo),
            "witness": _plain(self.witness),
            "count": self.count,
        }


def _plain(x):
    from .model import format_fraction

    if isinstance(x, Fraction):
        return format_fraction(x)
    if isinstance(x, (set, frozenset)):
        return sorted((_plain(v) for v in x), key=repr)
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, MTask):
        return x.id
    if isinstance(x, MazePair):
        return {"tasks": sorted(x.tasks), "mtasks": [m.id for m in x.regular_mtasks()]}
    if isinstance(x, (np.integer, np.bool_)):
        return x.item()
    return x


def digest(inst: Instance) -> str:
    from .model import dump_instance

    return hashlib.sha256(dump_instance(inst).encode()).hexdigest()[:16]


class _Tally:
    """Folds many comparisons of one check into a single report."""

    def __init__(self, check, seed, dig):
        self.report = OracleReport(check, seed, dig, True, count=0)

    def add(self, ok: bool, oracle=None, algo=None, witness=None) -> None:
        r = self.report
        r.count += 1
        if not ok and r.ok:
            r.ok, r.oracle, r.algo, r.witness = False, oracle, algo, witness


SUITE_FAMILIES = ("random-delta-large", "staircase", "shared-bottleneck", "adversarial-lp-gap")


def suite_instance(seed: int, index: int) -> tuple:
    """The ``index``-th instance of the suite for ``seed``: ``(inst, delta, k)``."""
    from .generators import GeneratorSpec, generate

    rng = random.Random(f"ufpmaze-suite/{seed}/{index}")
    family = SUITE_FAMILIES[0] if index % 5 < 2 else SUITE_FAMILIES[index % 5 - 1]
    delta = rng.choice([Fraction(1, 2), Fraction(1)])
    spec = GeneratorSpec(family, n=rng.randint(1, 6), m=rng.randint(2, 6), delta=delta,
                         seed=rng.randrange(1 << 30), max_capacity=rng.choice([6, 12, 24]))
    return generate(spec), delta, rng.randint(1, 3)


def ncrit_reports(seed: int, rules) -> list:
    from .maze import ncrit

    out = []
    for delta, want in ((Fraction(1, 2), 18), (Fraction(1), 5), (Fraction(1, 4), 68)):
        got = ncrit(delta, rules)
        out.append(OracleReport("ncrit-values", seed, "-", got == want, want, got,
                                None if got == want else {"delta": delta}))
    return out


def instance_reports(inst: Instance, delta: Fraction, k: int, seed: int, rules,
                     pairs: int = 12, edge_configs: int = 20) -> list:
    """Every check of the suite on one instance."""
    from .construct import build_segments, construct_thin_pair
    from .dp import solve
    from .maze import crit, edge_is_thin, is_k_thin, is_weakly_feasible, ncrit
    from .model import check_feasible, exact_opt, preprocess

    rng = random.Random(f"ufpmaze-pairs/{seed}/{digest(inst)}")
    work = preprocess(inst)[0]
    dig = digest(work)
    reports = []

    # optimality of the DP against exhaustion, then its output predicates
    tally = _Tally("dp-optimality", seed, dig)
    bpair, bvalue = best_maze_pair_bruteforce(work, k, delta)
    try:
        pair, value = solve(work, k, delta, rules)
    except AssertionError as exc:
        # an internal invariant of the DP broke
        pair, value = None, None
        tally.add(False, bvalue, None, {"k": k, "delta": delta, "error": str(exc)})
    else:
        tally.add(value == bvalue, bvalue, value, {"k": k, "delta": delta, "dp": pair, "brute": bpair})
    reports.append(tally.report)

    tally = _Tally("dp-output", seed, dig)
    for who, p in (("dp", pair), ("brute", bpair)):
        if p is None:
            continue
        thin = is_k_thin(work, p, k)
        weak = is_weakly_feasible(work, p, delta)
        feas = check_feasible(work, p.tasks)
        ok = bool(thin) and bool(weak) and feas.feasible
        tally.add(ok, None, p, {"source": who, "k": k, "thin_edge": thin.edge, "weak_edge": weak.edge,
                                "overloaded": list(feas.violations)})
    reports.append(tally.report)

    # random pairs: weak feasibility implies feasibility, critical sets stay small,
    # bin thinness agrees with the quantifier
    t_feas = _Tally("weak-implies-feasible", seed, dig)
    t_crit = _Tally("critical-bound", seed, dig)
    t_thin = _Tally("thinness-quantifier", seed, dig)
    reference_cap = ncrit(delta)
    for _ in range(pairs):
        p = random_pair(work, delta, rng)
        for kk in (1, 2, 3):
            got = bool(is_k_thin(work, p, kk, rules))
            want = quantifier_is_k_thin(work, p, kk)
            t_thin.add(got == bool(want), bool(want), got, {"k": kk, "pair": p, "edge": want.edge})
        if not is_weakly_feasible(work, p, delta, rules):
            continue
        feas = check_feasible(work, p.tasks)
        t_feas.add(feas.feasible, True, False, {"pair": p, "overloaded": list(feas.violations)})
        for m in p.regular_mtasks():
            c = crit(work, m, p.tasks, delta)
            t_crit.add(len(c) <= reference_cap, reference_cap, len(c), {"mtask": m, "crit": c})
    reports += [t_feas.report, t_crit.report, t_thin.report]

    tally = _Tally("thinness-edge", seed, dig)
    for _ in range(edge_configs):
        keys, levels = random_edge_config(rng)
        for kk in (1, 2, 3):
            got = edge_is_thin(keys, levels, kk, rules)
            bad = quantifier_edge_violation(keys, levels, kk)
            tally.add(got == (bad is None), bad is None, got,
                      {"k": kk, "keys": keys, "levels": levels, "set": bad})
    reports.append(tally.report)

    # the construction from an optimal solution
    star, _ = exact_opt(inst)
    names = ("construction-thin", "construction-feasible", "construction-loss",
             "cover-optimal", "cover-bound", "cover-stab", "lift-stab", "full-stab")
    tallies = {name: _Tally(name, seed, digest(inst)) for name in names}
    for kp in (2, 4):
        c = construct_thin_pair(inst, star, kp, delta)
        bound = 4 * kp + math.ceil(1 / delta)
        thin = quantifier_is_k_thin(inst, c.pair, bound)
        tallies["construction-thin"].add(bool(thin), bound, c.achieved,
                                         {"k_prime": kp, "edge": thin.edge, "tasks": thin.tasks})
        extra = [(m.s, m.t, m.d) for m in c.pair.regular_mtasks()]
        feas = check_feasible(inst, c.pair.tasks, extra)
        tallies["construction-feasible"].add(feas.feasible, True, c.union_feasible,
                                             {"k_prime": kp, "overloaded": list(feas.violations)})
        total = inst.weight(star)
        lost = total - inst.weight(c.pair.tasks)
        tallies["construction-loss"].add(lost <= Fraction(4, kp) * total, Fraction(4, kp) * total, lost,
                                         {"k_prime": kp})
        if c.work is None:
            continue
        full = build_segments(c.work, star)
        pos = {s.task: j for j, s in enumerate(full)}
        cover_idx = [pos[i] for i in c.cover]
        st = stab_thinness_oracle(full, cover_idx, 2 * 2 * kp)
        tallies["full-stab"].add(bool(st), None, None, {"k_prime": kp, "edge": st.edge, "segments": st.segments})
        for side in (c.left, c.right):
            tree = side.tree
            ex_sel, ex_w = exhaustive_min_cover(tree)
            tallies["cover-optimal"].add(ex_w == side.cover.weight, ex_w, side.cover.weight,
                                         {"k_prime": kp, "exhaustive": ex_sel, "dp": side.cover.selected})
            mass = sum((s.w for s in side.transformed), Fraction(0))
            tallies["cover-bound"].add(side.cover.weight <= Fraction(2, kp) * mass,
                                       Fraction(2, kp) * mass, side.cover.weight, {"k_prime": kp})
            st = stab_thinness_oracle(side.transformed, side.cover.selected, 2 * kp)
            tallies["cover-stab"].add(bool(st), None, None, {"k_prime": kp, "edge": st.edge, "segments": st.segments})
            st = stab_thinness_oracle(side.pieces, side.cover.selected, 2 * kp)
            tallies["lift-stab"].add(bool(st), None, None, {"k_prime": kp, "edge": st.edge, "segments": st.segments})
    reports += [t.report for t in tallies.values()]
    return reports


def run_lemma_suite(seed: int, count: int, rules=None) -> Iterator[OracleReport]:
    """Reports for ``count`` seeded instances, preceded by the ncrit spot checks.

    ``rules`` switches the implementation side to a mutated semantics; the
    oracles always use the reference definitions.
    """
    from .maze import REFERENCE

    rules = REFERENCE if rules is None else rules
    if count <= 0:
        return
    yield from ncrit_reports(seed, rules)
    for index in range(count):
        inst, delta, k = suite_instance(seed, index)
        yield from instance_reports(inst, delta, k, seed, rules)


def summarize(reports) -> dict:
    by_check = {}
    failed = []
    for r in reports:
        entry = by_check.setdefault(r.check, {"reports": 0, "comparisons": 0, "failed": 0})
        entry["reports"] += 1
        entry["comparisons"] += r.count
        if not r.ok:
            entry["failed"] += 1
            failed.append(r)
    return {"ok": not failed, "checks": by_check, "failures": [r.to_dict() for r in failed]}

"""Dynamic program for the heaviest weakly feasible k-thin maze pair.

Cells are tuples ``(e, md, Cd, mu, Cu, B)`` where ``md``/``mu`` index the
m-task table and ``Cd``, ``Cu``, ``B`` are bitmasks over the tasks in id
order.  The path is augmented with one capacity-0 edge on each side: edge 0
is the root edge and edge ``m+1`` is the bottleneck edge of the bottom dummy,
so the base case ``e = e(md)`` is only reachable with the top dummy above.
"""

from __future__ import annotations

import os
import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .maze import REFERENCE, MazePair, MTask, Rules, gen_mtasks, in_band, map_pair_back, ncrit
from .model import GuardExceeded, Instance, Number, is_delta_large, is_preprocessed, preprocess, to_fraction

BOT, TOP = 0, 1
SINGLE, TOP_BOTTOM, LEFT_RIGHT = "single", "top-bottom", "left-right"

DEFAULT_MAX_TASKS = 10
DEFAULT_MAX_CELLS = 2_000_000


def _env_int(name: str, default: int) -> int:
    return int(os.environ.get(name, default))


@dataclass(frozen=True)
class Guard:
    max_tasks: int = DEFAULT_MAX_TASKS
    max_cells: int = DEFAULT_MAX_CELLS

    @classmethod
    def from_env(cls) -> "Guard":
        return cls(
            _env_int("UFPMAZE_DP_MAX_TASKS", DEFAULT_MAX_TASKS),
            _env_int("UFPMAZE_DP_MAX_CELLS", DEFAULT_MAX_CELLS),
        )


@dataclass
class _MT:
    first: int  # leftmost edge
    last: int  # rightmost edge
    e: Optional[int]
    key: tuple
    b: Fraction
    d: Fraction
    src: MTask

    def uses(self, edge: int) -> bool:
        return self.first <= edge <= self.last


@dataclass(frozen=True)
class Choice:
    kind: str
    children: tuple
    new: int  # tasks added at this cell
    mtask: Optional[int]  # m-task index added, if any


def _popcount(x: int) -> int:
    return bin(x).count("1")


def _subsets(pool: int):
    """All submasks of ``pool`` in increasing numeric order."""
    bits = [1 << b for b in range(pool.bit_length()) if pool >> b & 1]
    out = [0]
    for bit in bits:
        out += [s | bit for s in out]
    out.sort()
    return out


class MazeDP:
    """One solve invocation; holds the memo table for a fixed ``(k, delta)``."""

    def __init__(self, inst: Instance, k: int, delta: Number, rules: Rules = REFERENCE,
                 guard: Guard | None = None, check: bool = False):
        if not is_preprocessed(inst) and inst.tasks:
            raise ValueError("the DP needs a preprocessed instance")
        if k < 1:
            raise ValueError("k must be at least 1")
        self.inst = inst
        self.delta = to_fraction(delta)
        self.rules = rules
        self.guard = guard or Guard.from_env()
        self.check = check
        for t in inst.tasks:
            if not is_delta_large(inst, t, self.delta):
                raise ValueError(f"task {t.id} is not {self.delta}-large")
        n = len(inst.tasks)
        if n > self.guard.max_tasks:
            raise GuardExceeded(f"DP limited to {self.guard.max_tasks} tasks, got {n}")
        self.k = min(k, max(n, 1))
        self.ncrit = min(ncrit(self.delta, rules), max(n, 1))

        m = inst.num_edges
        self.m = m
        self.right = m + 1
        self.ids = sorted(inst.ids)
        self.n = n
        tasks = [inst.task(i) for i in self.ids]
        self.w = [t.w for t in tasks]
        self.d = [t.d for t in tasks]
        self.key = [inst.bneck(i).key for i in self.ids]
        self.b = [inst.bneck(i).b for i in self.ids]
        self.u = [Fraction(0)] + list(inst.capacities) + [Fraction(0)]
        self.on = [0] * (m + 2)
        for bit, t in enumerate(tasks):
            for e in t.edges():
                self.on[e] |= 1 << bit

        self.mt = []
        for src in gen_mtasks(inst, self.delta):
            if src.kind == "bottom":
                self.mt.append(_MT(0, self.right, self.right, src.key, Fraction(0), Fraction(0), src))
            elif src.kind == "top":
                self.mt.append(_MT(0, self.right, None, src.key, Fraction(0), Fraction(0), src))
            else:
                self.mt.append(_MT(src.s, src.t - 1, src.e, src.key, src.b, src.d, src))
        self.crit = [self._crit_mask(j) for j in range(len(self.mt))]
        self._band = {}
        self._weak = {}
        self.memo = {}
        self.cells = 0

    # -- tables -------------------------------------------------------------

    def _crit_mask(self, j: int) -> int:
        mt = self.mt[j]
        if j in (BOT, TOP):
            return 0
        mask = 0
        for bit in range(self.n):
            t = self.inst.task(self.ids[bit])
            if t.s <= mt.last and mt.first < t.t and self.key[bit] <= mt.key \
                    and self.b[bit] >= self.delta / 2 * mt.b:
                mask |= 1 << bit
        return mask

    def band(self, lo: int, hi: int) -> int:
        got = self._band.get((lo, hi))
        if got is None:
            klo, khi = self.mt[lo].key, self.mt[hi].key
            got = 0
            for bit in range(self.n):
                if in_band(klo, khi, self.key[bit], self.rules):
                    got |= 1 << bit
            self._band[(lo, hi)] = got
        return got

    def weight(self, mask: int) -> Fraction:
        return sum((self.w[b] for b in range(self.n) if mask >> b & 1), Fraction(0))

    def weakly_feasible(self, tasks: int, mts) -> bool:
        """Weak feasibility of ``(tasks, mts)`` on the real edges; dummies ignored."""
        regular = tuple(sorted(j for j in mts if j not in (BOT, TOP)))
        cache_key = (tasks, regular)
        got = self._weak.get(cache_key)
        if got is not None:
            return got
        ok = True
        for f in range(1, self.m + 1):
            here = tasks & self.on[f]
            top = None
            for j in regular:
                if self.mt[j].uses(f) and (top is None or self.mt[j].key > self.mt[top].key):
                    top = j
            if top is None:
                load = sum((self.d[b] for b in range(self.n) if here >> b & 1), Fraction(0))
            else:
                mt = self.mt[top]
                load = mt.d if self.rules.charge_mtask else Fraction(0)
                for b in range(self.n):
                    if here >> b & 1 and (self.key[b] > mt.key or self.b[b] >= self.delta / 2 * mt.b):
                        load += self.d[b]
            if load > self.u[f]:
                ok = False
                break
        self._weak[cache_key] = ok
        return ok

    # -- cells --------------------------------------------------------------

    def e_down(self, md: int) -> int:
        return self.mt[md].e

    def e_up(self, cell) -> int:
        e, _, _, mu, _, _ = cell
        return e if mu == TOP else self.mt[mu].e

    def measure(self, cell) -> tuple:
        e = cell[0]
        ed = self.e_down(cell[1])
        eu = self.e_up(cell)
        return (abs(eu - ed) + 1, abs(e - ed) + 1)

    def cell_valid(self, cell) -> bool:
        e, md, cd, mu, cu, bset = cell
        lo, hi = self.mt[md], self.mt[mu]
        if not (lo.uses(e) and hi.uses(e) and lo.key < hi.key):
            return False
        if cd & ~self.crit[md] or cu & ~self.crit[mu]:
            return False
        if _popcount(cd) > self.ncrit or _popcount(cu) > self.ncrit:
            return False
        if bset & ~(self.on[e] & self.band(md, mu)) or _popcount(bset) > self.k:
            return False
        union = bset | cd | cu
        if union & self.crit[md] != cd or union & self.crit[mu] != cu:
            return False
        if union & self.on[e] & self.band(md, mu) != bset:
            return False
        return self.weakly_feasible(union, (md, mu))

    # -- recursion ----------------------------------------------------------

    def value(self, cell):
        """Best weight for ``cell`` or ``None`` when no feasible completion exists."""
        got = self.memo.get(cell, False)
        if got is not False:
            return got[0]
        self.cells += 1
        if self.cells > self.guard.max_cells:
            raise GuardExceeded(f"DP cell budget {self.guard.max_cells} exhausted")
        if not self.cell_valid(cell):
            self.memo[cell] = (None, None)
            return None
        e, md, cd, mu, cu, bset = cell
        ed = self.e_down(md)
        if e == ed:
            self.memo[cell] = (Fraction(0), None)
            return Fraction(0)
        step = 1 if ed > e else -1
        er = e + step
        best, best_choice = None, None
        for val, choice in self._branches(cell, er, step):
            if best is None or val > best:
                best, best_choice = val, choice
        self.memo[cell] = (best, best_choice)
        return best

    def _child(self, parent, child):
        if self.measure(child) >= self.measure(parent):
            raise AssertionError(f"child {child} is not smaller than {parent}")
        return self.value(child)

    def _starts_at(self, j: int, edge: int, step: int) -> bool:
        mt = self.mt[j]
        return (mt.first if step > 0 else mt.last) == edge

    def _branches(self, cell, er: int, step: int):
        e, md, cd, mu, cu, bset = cell
        hi = self.mt[mu]
        base = cd | cu | bset
        # tasks whose presence would break crit(md)=Cd, crit(mu)=Cu or bound_e=B
        forbid = base | self.crit[md] | self.crit[mu] | (self.on[e] & self.band(md, mu))
        if hi.uses(er):
            yield from self._single(cell, er, base, forbid)
            yield from self._top_bottom(cell, er, step, base, forbid)
        elif mu != TOP:
            yield from self._left_right(cell, er, base, forbid)

    def _single(self, cell, er, base, forbid):
        e, md, cd, mu, cu, bset = cell
        band_r = self.on[er] & self.band(md, mu)
        for x in _subsets(band_r & ~forbid):
            tp = base | x
            bs = tp & band_r
            if _popcount(bs) > self.k:
                continue
            child = (er, md, cd, mu, cu, bs)
            v = self._child(cell, child)
            if v is None:
                continue
            new = bs & ~bset
            yield v + self.weight(new), Choice(SINGLE, (child,), new, None)

    def _top_bottom(self, cell, er, step, base, forbid):
        e, md, cd, mu, cu, bset = cell
        klo, khi = self.mt[md].key, self.mt[mu].key
        for mm in range(2, len(self.mt)):
            mid = self.mt[mm]
            if not (klo < mid.key < khi and self._starts_at(mm, er, step)):
                continue
            band_b = self.on[er] & self.band(md, mm)
            band_t = self.on[er] & self.band(mm, mu)
            pool = (self.crit[mm] | band_b | band_t) & ~forbid
            for x in _subsets(pool):
                tp = base | x
                cmid = tp & self.crit[mm]
                bb, bt = tp & band_b, tp & band_t
                if _popcount(cmid) > self.ncrit or _popcount(bb) > self.k or _popcount(bt) > self.k:
                    continue
                if tp != cd | cu | cmid | bset | bb | bt:
                    continue
                cb = (er, md, cd, mm, cmid, bb)
                ct = (er, mm, cmid, mu, cu, bt)
                vb = self._child(cell, cb)
                if vb is None:
                    continue
                vt = self._child(cell, ct)
                if vt is None:
                    continue
                new = (bb | bt) & ~bset
                yield vb + vt + self.weight(new), Choice(TOP_BOTTOM, (cb, ct), new, mm)

    def _left_right(self, cell, er, base, forbid):
        e, md, cd, mu, cu, bset = cell
        khi = self.mt[mu].key
        for ma in [TOP] + list(range(2, len(self.mt))):
            abv = self.mt[ma]
            if not (abv.key > khi and abv.uses(e) and abv.uses(er)):
                continue
            band_r = self.on[er] & self.band(md, ma)
            band_l = self.on[e] & self.band(mu, ma)
            pool = (self.crit[ma] | band_r | band_l) & ~forbid
            for x in _subsets(pool):
                tp = base | x
                cabv = tp & self.crit[ma]
                br, bl = tp & band_r, tp & band_l
                if _popcount(cabv) > self.ncrit or _popcount(br) > self.k or _popcount(bl) > self.k:
                    continue
                if tp != cd | cu | cabv | bset | bl | br:
                    continue
                cl = (e, mu, cu, ma, cabv, bl)
                cr = (er, md, cd, ma, cabv, br)
                vl = self._child(cell, cl)
                if vl is None:
                    continue
                vr = self._child(cell, cr)
                if vr is None:
                    continue
                new = (bl | br) & ~bset
                yield vl + vr + self.weight(new), Choice(LEFT_RIGHT, (cl, cr), new, None if ma == TOP else ma)

    # -- solutions ----------------------------------------------------------

    def solution(self, cell) -> tuple:
        """``(task mask, m-task indices)`` attaining the memoized value of ``cell``."""
        val, choice = self.memo[cell]
        if val is None:
            raise ValueError(f"cell {cell} has no feasible completion")
        tasks, mts = 0, set()
        stack = [cell]
        while stack:
            c = stack.pop()
            _, ch = self.memo[c]
            if ch is None:
                continue
            if tasks & ch.new:
                raise AssertionError(f"task counted twice at cell {c}")
            tasks |= ch.new
            if ch.mtask is not None:
                mts.add(ch.mtask)
            stack.extend(ch.children)
        return tasks, mts

    def root(self):
        return (0, BOT, 0, TOP, 0, 0)

    def run(self) -> tuple:
        limit = sys.getrecursionlimit()
        sys.setrecursionlimit(max(limit, 20000))
        try:
            val = self.value(self.root())
        finally:
            sys.setrecursionlimit(limit)
        tasks, mts = self.solution(self.root())
        if self.weight(tasks) != val:
            raise AssertionError("DP value differs from the weight of its solution")
        if self.check:
            self.self_check()
        ids = frozenset(self.ids[b] for b in range(self.n) if tasks >> b & 1)
        pair = MazePair(ids, frozenset(self.mt[j].src for j in mts))
        return pair, val

    def self_check(self) -> None:
        """Re-validate every memoized cell solution against the cell properties."""
        from .maze import is_k_thin

        for cell, (val, choice) in list(self.memo.items()):
            if val is None:
                continue
            e, md, cd, mu, cu, bset = cell
            tasks, mts = self.solution(cell)
            if self.weight(tasks) != val:
                raise AssertionError(f"cell {cell}: value mismatch")
            if not self.weakly_feasible(tasks | bset | cd | cu, set(mts) | {md, mu}):
                raise AssertionError(f"cell {cell}: solution not weakly feasible")
            if tasks & self.crit[mu] & ~cu:
                raise AssertionError(f"cell {cell}: inclusion property violated")
            ids = frozenset(self.ids[b] for b in range(self.n) if (tasks | bset) >> b & 1)
            regular = frozenset(self.mt[j].src for j in set(mts) | {md, mu} if j not in (BOT, TOP))
            if not is_k_thin(self.inst, MazePair(ids, regular), self.k, self.rules):
                raise AssertionError(f"cell {cell}: solution not {self.k}-thin")


def solve(inst: Instance, k: int, delta: Number, rules: Rules = REFERENCE,
          guard: Guard | None = None, check: bool = False) -> tuple:
    """Heaviest weakly feasible k-thin maze pair ``(pair, weight)``.

    Unpreprocessed instances are preprocessed first; the returned pair then
    refers to the original vertices.
    """
    if not inst.tasks:
        return MazePair(frozenset(), frozenset()), Fraction(0)
    work, pmap = preprocess(inst)
    pair, val = MazeDP(work, k, delta, rules, guard, check).run()
    if not pmap.is_identity():
        pair = map_pair_back(inst, pmap, pair, delta)
    return pair, val

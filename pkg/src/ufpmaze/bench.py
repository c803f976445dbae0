"""Benchmark harness: algorithms against generated instances."""

from __future__ import annotations

import json
import time
from concurrent.futures import FIRST_COMPLETED, ProcessPoolExecutor, wait
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .generators import GeneratorSpec, generate
from .model import GuardExceeded, Instance, exact_limit, exact_opt, format_fraction

UNAVAILABLE = "unavailable"


def parse_algo(name: str) -> tuple:
    """``dp:K``, ``brute:K`` or ``exact``."""
    kind, _, arg = name.partition(":")
    if kind == "exact" and not arg:
        return kind, None
    if kind in ("dp", "brute") and arg.isdigit() and int(arg) >= 1:
        return kind, int(arg)
    raise ValueError(f"unknown algorithm {name!r} (use dp:K, brute:K or exact)")


def run_algo(name: str, inst: Instance, delta: Fraction) -> Fraction:
    kind, k = parse_algo(name)
    if kind == "exact":
        return exact_opt(inst)[1]
    if kind == "dp":
        from .dp import solve

        return solve(inst, k, delta)[1]
    from .oracles import best_maze_pair_bruteforce
    from .model import preprocess

    return best_maze_pair_bruteforce(preprocess(inst)[0], k, delta)[1]


def _job(algos: Sequence[str], spec: GeneratorSpec) -> list:
    from .oracles import digest

    inst = generate(spec)
    dig = digest(inst)
    opt = None
    if len(inst.tasks) <= exact_limit():
        opt = exact_opt(inst)[1]
    rows = []
    for name in algos:
        start = time.perf_counter()
        try:
            weight = run_algo(name, inst, spec.delta)
            status = "ok"
        except GuardExceeded:
            weight, status = None, "guard"
        elapsed = time.perf_counter() - start
        if weight is None or opt is None:
            ratio = UNAVAILABLE
        else:
            ratio = Fraction(1) if opt == 0 else weight / opt
        rows.append({
            "digest": dig,
            "family": spec.family,
            "seed": spec.seed,
            "algo": name,
            "status": status,
            "weight": None if weight is None else format_fraction(weight),
            "opt": UNAVAILABLE if opt is None else format_fraction(opt),
            "ratio": ratio if ratio == UNAVAILABLE else format_fraction(ratio),
            "ratio_float": None if ratio == UNAVAILABLE else float(ratio),
            "seconds": round(elapsed, 6),
        })
    return rows


@dataclass
class BenchTable:
    rows: list = field(default_factory=list)
    partial: bool = False
    skipped: int = 0

    def to_dict(self) -> dict:
        return {"partial": self.partial, "skipped": self.skipped, "rows": self.rows}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def to_text(self) -> str:
        cols = ["digest", "family", "seed", "algo", "status", "weight", "opt", "ratio", "seconds"]
        cells = [[str(r[c]) for c in cols] for r in self.rows]
        widths = [max([len(c)] + [len(row[j]) for row in cells]) for j, c in enumerate(cols)]
        lines = ["  ".join(c.ljust(w) for c, w in zip(cols, widths)).rstrip()]
        lines += ["  ".join(v.ljust(w) for v, w in zip(row, widths)).rstrip() for row in cells]
        if self.partial:
            lines.append(f"PARTIAL: budget exhausted, {self.skipped} instance(s) not run")
        return "\n".join(lines) + "\n"


def bench(algos: Sequence[str], specs: Sequence[GeneratorSpec], budget: Optional[float] = None,
          workers: int = 0) -> BenchTable:
    """Run every algorithm on every generated instance.

    ``budget`` is a wall-clock limit in seconds; instances not finished by
    then are dropped and the table is flagged partial.  ``workers = 0`` runs
    in process.  Rows are sorted by instance digest, then algorithm.
    """
    algos = list(algos)
    for name in algos:
        parse_algo(name)
    table = BenchTable()
    if not algos or not specs:
        return table
    deadline = None if budget is None else time.monotonic() + budget
    if workers <= 0:
        for idx, spec in enumerate(specs):
            if deadline is not None and time.monotonic() >= deadline:
                table.partial, table.skipped = True, len(specs) - idx
                break
            table.rows += _job(algos, spec)
    else:
        pool = ProcessPoolExecutor(max_workers=workers)
        try:
            pending = {pool.submit(_job, algos, spec) for spec in specs}
            while pending:
                timeout = None if deadline is None else max(0.0, deadline - time.monotonic())
                done, pending = wait(pending, timeout=timeout, return_when=FIRST_COMPLETED)
                for fut in done:
                    table.rows += fut.result()
                if not done and pending:
                    table.partial, table.skipped = True, len(pending)
                    break
        finally:
            pool.shutdown(wait=not table.partial, cancel_futures=True)
    table.rows.sort(key=lambda r: (r["digest"], r["algo"]))
    return table

"""Command line entry point: ``ufpmaze gen|solve|construct|check|render|bench``.

Exit codes: 0 ok, 1 a check failed, 2 usage or input error, 3 a size guard
was exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from .model import GuardExceeded, InstanceError, load_instance, to_fraction

EXIT_OK, EXIT_CHECK, EXIT_USAGE, EXIT_GUARD = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _fraction(text: str) -> Fraction:
    try:
        return to_fraction(text)
    except (ValueError, ZeroDivisionError, TypeError) as exc:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from exc


def _read_instance(path: str):
    try:
        raw = sys.stdin.read() if path == "-" else open(path, encoding="utf-8").read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc
    return load_instance(raw)


def _emit(args, payload: dict, text: str) -> None:
    if args.format == "json":
        print(json.dumps(payload, indent=2))
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _pair_payload(inst, pair, k, delta) -> dict:
    from .maze import is_k_thin, is_weakly_feasible
    from .model import check_feasible

    out = pair.to_dict(inst)
    out["certificates"] = {
        "k_thin": bool(is_k_thin(inst, pair, k)),
        "weakly_feasible": bool(is_weakly_feasible(inst, pair, delta)),
        "feasible": check_feasible(inst, pair.tasks).feasible,
    }
    return out


def _pair_text(payload: dict) -> str:
    lines = [f"weight  {payload['weight']}", f"tasks   {' '.join(map(str, payload['tasks'])) or '-'}"]
    mts = [f"{m['id']}(d={m['d']})" for m in payload["mtasks"]]
    lines.append(f"mtasks  {' '.join(mts) or '-'}")
    for name, ok in payload.get("certificates", {}).items():
        lines.append(f"{name:<16}{'yes' if ok else 'NO'}")
    return "\n".join(lines)


def cmd_gen(args) -> int:
    from .generators import GeneratorSpec, generate

    try:
        spec = GeneratorSpec(args.family, n=args.n, m=args.m, delta=args.delta, seed=args.seed,
                             max_capacity=args.max_capacity, max_weight=args.max_weight)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    inst = generate(spec)
    doc = json.dumps(inst.to_dict(), indent=2)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(doc + "\n")
    else:
        print(doc)
    return EXIT_OK


def cmd_solve(args) -> int:
    from .dp import solve

    inst = _read_instance(args.instance)
    pair, _ = solve(inst, args.k, args.delta, check=args.self_check)
    payload = _pair_payload(inst, pair, args.k, args.delta)
    _emit(args, payload, _pair_text(payload))
    return EXIT_OK if all(payload["certificates"].values()) else EXIT_CHECK


def cmd_construct(args) -> int:
    from .construct import construct_thin_pair
    from .model import exact_opt

    inst = _read_instance(args.instance)
    if args.tasks is None:
        tasks = exact_opt(inst)[0]
    else:
        tasks = frozenset(int(x) for x in args.tasks.split(",") if x.strip())
        unknown = tasks - set(inst.ids)
        if unknown:
            raise UsageError(f"unknown task ids: {sorted(unknown)}")
    try:
        c = construct_thin_pair(inst, tasks, args.k_prime, args.delta)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    payload = c.pair.to_dict(inst)
    payload["input_tasks"] = sorted(tasks)
    payload["certificate"] = c.certificate()
    cert = payload["certificate"]
    text = _pair_text(payload) + "\n" + "\n".join(f"{k:<18}{v}" for k, v in cert.items())
    _emit(args, payload, text)
    ok = cert["union_feasible"] and c.achieved <= c.bound and c.loss * c.k <= 4 * c.total
    return EXIT_OK if ok else EXIT_CHECK


def cmd_check(args) -> int:
    from .maze import MUTATIONS
    from .oracles import run_lemma_suite, summarize

    rules = MUTATIONS[args.mutation] if args.mutation else None
    summary = summarize(run_lemma_suite(args.seed, args.count, rules))
    summary.update({"suite": args.suite, "seed": args.seed, "count": args.count, "mutation": args.mutation})
    lines = []
    for name, entry in summary["checks"].items():
        status = "PASS" if not entry["failed"] else "FAIL"
        lines.append(f"{status}  {name:<24}{entry['comparisons']:>8} comparisons  {entry['failed']} failed")
    lines.append("suite " + ("passed" if summary["ok"] else "FAILED"))
    for f in summary["failures"][:5]:
        lines.append(f"  {f['check']} on {f['digest']}: {json.dumps(f['witness'])}")
    _emit(args, summary, "\n".join(lines))
    return EXIT_OK if summary["ok"] else EXIT_CHECK


def cmd_render(args) -> int:
    from .maze import MazePair, make_mtask
    from .render import RenderSpec, render

    inst = _read_instance(args.instance)
    solution = None
    if args.solution:
        try:
            doc = json.loads(open(args.solution, encoding="utf-8").read())
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read solution: {exc}") from exc
        mts = [make_mtask(inst, m["s"], m["t"], m["e"], args.delta) for m in doc.get("mtasks", [])]
        solution = MazePair(doc.get("tasks", []), mts)
    show = args.show.split(",") if args.show else None
    try:
        spec = RenderSpec(args.output) if show is None else RenderSpec(args.output, frozenset(show))
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    doc = render(inst, solution, spec)
    if args.format == "json":
        print(json.dumps({"output": args.output, "document": doc}))
    else:
        sys.stdout.write(doc)
    return EXIT_OK


def cmd_bench(args) -> int:
    from .bench import bench
    from .generators import GeneratorSpec

    algos = [a for a in args.algos.split(",") if a]
    try:
        specs = [GeneratorSpec(args.family, n=args.n, m=args.m, delta=args.delta, seed=args.seed + i)
                 for i in range(args.count)]
        table = bench(algos, specs, budget=args.budget, workers=args.workers)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    if args.format == "json":
        print(table.to_json())
    else:
        sys.stdout.write(table.to_text())
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    from .generators import FAMILIES
    from .maze import MUTATIONS

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "text"), default="text")

    p = argparse.ArgumentParser(prog="ufpmaze", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", parents=[common], help="generate a random instance")
    g.add_argument("--family", choices=FAMILIES, default="random-delta-large")
    g.add_argument("--n", type=int, default=5, help="number of tasks")
    g.add_argument("--m", type=int, default=6, help="number of edges")
    g.add_argument("--delta", type=_fraction, default=Fraction(1, 2))
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--max-capacity", type=int, default=12)
    g.add_argument("--max-weight", type=int, default=6)
    g.add_argument("-o", "--output")
    g.set_defaults(func=cmd_gen)

    s = sub.add_parser("solve", parents=[common], help="heaviest weakly feasible k-thin maze pair")
    s.add_argument("instance", help="instance JSON file, or - for stdin")
    s.add_argument("--algo", choices=("maze-dp",), default="maze-dp")
    s.add_argument("--k", type=int, default=3)
    s.add_argument("--delta", type=_fraction, default=Fraction(1, 2))
    s.add_argument("--self-check", action="store_true", help="re-verify every DP cell")
    s.set_defaults(func=cmd_solve)

    c = sub.add_parser("construct", parents=[common], help="thin maze pair from a feasible task set")
    c.add_argument("instance")
    c.add_argument("--k-prime", type=int, default=2)
    c.add_argument("--delta", type=_fraction, default=Fraction(1, 2))
    c.add_argument("--tasks", help="comma separated task ids (default: an optimal solution)")
    c.set_defaults(func=cmd_construct)

    k = sub.add_parser("check", parents=[common], help="run the property suite")
    k.add_argument("--suite", choices=("lemmas",), default="lemmas")
    k.add_argument("--seed", type=int, default=1)
    k.add_argument("--count", type=int, default=100)
    k.add_argument("--mutation", choices=sorted(MUTATIONS))
    k.set_defaults(func=cmd_check)

    r = sub.add_parser("render", parents=[common], help="draw an instance and a solution")
    r.add_argument("instance")
    r.add_argument("--solution", help="JSON with 'tasks' and optional 'mtasks' (s, t, e)")
    r.add_argument("--output", choices=("ascii", "svg"), default="ascii")
    r.add_argument("--show", help="comma separated subset of capacity-curve,task-segments,"
                                  "mtask-segments,dp-cell-area")
    r.add_argument("--delta", type=_fraction, default=Fraction(1, 2))
    r.set_defaults(func=cmd_render)

    b = sub.add_parser("bench", parents=[common], help="compare algorithms on generated instances")
    b.add_argument("--algos", default="dp:1,dp:3,exact", help="comma separated: dp:K, brute:K, exact")
    b.add_argument("--family", choices=FAMILIES, default="random-delta-large")
    b.add_argument("--count", type=int, default=10)
    b.add_argument("--n", type=int, default=5)
    b.add_argument("--m", type=int, default=6)
    b.add_argument("--delta", type=_fraction, default=Fraction(1, 2))
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--budget", type=float, help="wall-clock seconds")
    b.add_argument("--workers", type=int, default=0)
    b.set_defaults(func=cmd_bench)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except GuardExceeded as exc:
        print(f"ufpmaze: guard exceeded: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except (UsageError, InstanceError, ValueError) as exc:
        print(f"ufpmaze: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

import json
from fractions import Fraction

import pytest

from ufpmaze.bench import UNAVAILABLE, bench, parse_algo
from ufpmaze.generators import GeneratorSpec, generate
from ufpmaze.model import preprocess
from ufpmaze.oracles import best_maze_pair_bruteforce, digest


def specs(count):
    return [GeneratorSpec(n=5, m=5, seed=s) for s in range(count)]


def test_large_k_reaches_optimum():
    table = bench(["dp:6"], specs(50))
    assert not table.partial and len(table.rows) == 50
    assert all(r["ratio"] == 1 for r in table.rows)


def test_k1_never_below_brute_force_bound():
    sp = specs(30)
    table = bench(["dp:1"], sp)
    by_digest = {r["digest"]: r for r in table.rows}
    below = 0
    for s in sp:
        inst = generate(s)
        row = by_digest[digest(inst)]
        bw = best_maze_pair_bruteforce(preprocess(inst)[0], 1, s.delta)[1]
        assert Fraction(row["weight"]) == bw
        below += Fraction(str(row["ratio"])) < 1
    assert below > 0


def test_rows_sorted_and_json():
    table = bench(["exact", "dp:2"], specs(6))
    keys = [(r["digest"], r["algo"]) for r in table.rows]
    assert keys == sorted(keys)
    doc = json.loads(table.to_json())
    assert len(doc["rows"]) == 12 and doc["partial"] is False
    assert "ratio" in table.to_text().splitlines()[0]


def test_empty_algo_list():
    table = bench([], specs(3))
    assert table.rows == [] and not table.partial


def test_budget_exhausted_flags_partial():
    table = bench(["dp:2"], specs(5), budget=0)
    assert table.partial and table.skipped == 5 and "PARTIAL" in table.to_text()


def test_guarded_sizes_are_marked(monkeypatch):
    monkeypatch.setenv("UFPMAZE_EXACT_MAX_TASKS", "2")
    monkeypatch.setenv("UFPMAZE_DP_MAX_TASKS", "2")
    table = bench(["dp:1"], specs(2))
    assert all(r["ratio"] == UNAVAILABLE and r["status"] == "guard" for r in table.rows)


def test_worker_pool_matches_inline():
    inline = bench(["dp:2", "exact"], specs(4))
    pooled = bench(["dp:2", "exact"], specs(4), workers=2)
    strip = lambda t: [{k: v for k, v in r.items() if k != "seconds"} for r in t.rows]
    assert strip(inline) == strip(pooled)


@pytest.mark.parametrize("name", ["dp", "dp:0", "brute:x", "exact:1", "lp"])
def test_bad_algo_names(name):
    with pytest.raises(ValueError):
        parse_algo(name)

"""Pure-Python subset search; the reference for the compiled kernel."""

from __future__ import annotations


def lex_smaller(a: int, b: int) -> bool:
    """Whether the sorted bit tuple of ``a`` precedes that of ``b``."""
    if a == b:
        return False
    x = (a ^ b) & -(a ^ b)
    if a & x:
        return (b & ~(x - 1)) != 0
    return (a & ~(x - 1)) == 0


def best_subset(weights, demands, sum_rows, sum_caps, count_rows, count_cap):
    """Maximum-weight bitmask satisfying every packing row.

    Row ``r`` of ``sum_rows`` requires ``sum(demands[i] for i in row) <=
    sum_caps[r]``; each row of ``count_rows`` admits at most ``count_cap``
    members.  All numbers are integers.  Ties go to the lexicographically
    smallest sorted index tuple.
    """
    n = len(weights)
    member_sum = [[r for r, row in enumerate(sum_rows) if row >> i & 1] for i in range(n)]
    member_cnt = [[r for r, row in enumerate(count_rows) if row >> i & 1] for i in range(n)]
    suffix = [0] * (n + 1)
    for i in range(n - 1, -1, -1):
        suffix[i] = suffix[i + 1] + weights[i]
    sums = [0] * len(sum_rows)
    cnts = [0] * len(count_rows)
    best_w = -1
    best_m = 0

    def dfs(i, mask, w):
        nonlocal best_w, best_m
        if w + suffix[i] < best_w:
            return
        if i == n:
            if w > best_w or (w == best_w and lex_smaller(mask, best_m)):
                best_w, best_m = w, mask
            return
        d = demands[i]
        ok = True
        for r in member_sum[i]:
            if sums[r] + d > sum_caps[r]:
                ok = False
                break
        if ok:
            for r in member_cnt[i]:
                if cnts[r] + 1 > count_cap:
                    ok = False
                    break
        if ok:
            for r in member_sum[i]:
                sums[r] += d
            for r in member_cnt[i]:
                cnts[r] += 1
            dfs(i + 1, mask | (1 << i), w + weights[i])
            for r in member_sum[i]:
                sums[r] -= d
            for r in member_cnt[i]:
                cnts[r] -= 1
        dfs(i + 1, mask, w)

    dfs(0, 0, 0)
    return best_m

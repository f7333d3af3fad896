"""Partition and tuple combinatorics.

Partitions are plain tuples of weakly decreasing positive ints; () is the
empty partition.  Compositions (weights) are tuples of nonnegative ints of a
fixed length.  All enumerations are in a fixed documented order so downstream
results are reproducible.
"""

from __future__ import annotations

from functools import lru_cache

from .errors import PolyrepError


def check_partition(lam) -> tuple:
    lam = tuple(int(x) for x in lam)
    if any(x <= 0 for x in lam):
        raise PolyrepError("partition parts must be positive: %r" % (lam,))
    if any(lam[i] < lam[i + 1] for i in range(len(lam) - 1)):
        raise PolyrepError("parts must weakly decrease: %r" % (lam,))
    return lam


def size(lam) -> int:
    return sum(lam)


def conjugate(lam) -> tuple:
    lam = check_partition(lam)
    if not lam:
        return ()
    return tuple(sum(1 for x in lam if x > j) for j in range(lam[0]))


@lru_cache(maxsize=None)
def partitions_of(d: int, max_part=None, max_len=None) -> tuple:
    """All partitions of d, reverse lexicographic (largest first part first)."""
    if d < 0:
        return ()
    if max_part is None:
        max_part = d
    if max_len is None:
        max_len = d
    if d == 0:
        return ((),)
    if max_len == 0 or max_part == 0:
        return ()
    out = []
    for first in range(min(d, max_part), 0, -1):
        for rest in partitions_of(d - first, first, max_len - 1):
            out.append((first,) + rest)
    return tuple(out)


def compositions_of(d: int, length: int) -> list:
    """All length-tuples of nonnegative ints summing to d, lexicographic."""
    if length == 0:
        return [()] if d == 0 else []
    out = []

    def rec(prefix, rem, slots):
        if slots == 1:
            out.append(prefix + (rem,))
            return
        for x in range(rem + 1):
            rec(prefix + (x,), rem - x, slots - 1)

    rec((), d, length)
    return out


def dominates(lam, mu) -> bool:
    """Dominance order: lam >= mu (partial sums of lam dominate)."""
    la, mu = list(lam), list(mu)
    if sum(la) != sum(mu):
        return False
    n = max(len(la), len(mu))
    la += [0] * (n - len(la))
    mu += [0] * (n - len(mu))
    s1 = s2 = 0
    for a, b in zip(la, mu):
        s1 += a
        s2 += b
        if s1 < s2:
            return False
    return True


def is_restricted(lam, p: int, r: int = 1) -> bool:
    """p^r-restricted: last part < p^r and consecutive differences < p^r.

    The empty partition is restricted by convention.
    """
    lam = check_partition(lam)
    q = p**r
    if not lam:
        return True
    if lam[-1] >= q:
        return False
    return all(lam[i] - lam[i + 1] < q for i in range(len(lam) - 1))


def is_bounded(tup, p: int, r: int) -> bool:
    """Every entry < p^r.  For r = 0 only all-zero tuples qualify."""
    q = p**r
    return all(0 <= int(x) < q for x in tup)


def padic_levels(lam, p: int) -> list:
    """Levels (lam^0, lam^1, ...) with lam = sum_i p^i lam^i, each level
    p-restricted.  Trailing empty levels are trimmed; [()] for the empty one.
    """
    lam = check_partition(lam)
    levels = []
    cur = lam
    while cur:
        diffs = [cur[i] - (cur[i + 1] if i + 1 < len(cur) else 0) for i in range(len(cur))]
        low = [d % p for d in diffs]
        lev = []
        acc = 0
        for i in range(len(cur) - 1, -1, -1):
            acc += low[i]
            lev.append(acc)
        lev.reverse()
        level = tuple(x for x in lev if x > 0)
        rest = tuple(a - b for a, b in zip(cur, lev + [0] * (len(cur) - len(lev))))
        nxt = tuple(x // p for x in rest if x > 0)
        levels.append(level)
        cur = check_partition(nxt)
    if not levels:
        levels = [()]
    return levels


def padic_compose(levels, p: int) -> tuple:
    """Inverse of padic_levels."""
    n = max((len(l) for l in levels), default=0)
    out = [0] * n
    for i, lev in enumerate(levels):
        for j, x in enumerate(lev):
            out[j] += p**i * x
    return tuple(x for x in out if x > 0)


def twisted_tuples(d: int, p: int, r: int) -> list:
    """Tuples (d_0, d_1, ...) with sum p^i d_i = d and sum_{i<r} p^i d_i < d.

    Trailing zeros are trimmed.  Empty exactly when d < p^r.  Sorted.
    """
    if d < 0:
        return []
    found = []

    def rec(prefix, rem, level):
        if rem == 0:
            tup = list(prefix)
            while tup and tup[-1] == 0:
                tup.pop()
            low = sum(p**i * x for i, x in enumerate(tup[:r]))
            if low < d:
                found.append(tuple(tup))
            return
        q = p**level
        if q > rem:
            return
        for x in range(rem // q + 1):
            rec(prefix + (x,), rem - q * x, level + 1)

    if d > 0:
        rec((), d, 0)
    elif d == 0 and 0 < p**r:
        pass  # degree zero: no twisted tuples below itself
    return sorted(found)


def format_partition(lam) -> str:
    return ",".join(str(x) for x in lam)


def parse_partition(text: str) -> tuple:
    text = text.strip()
    if not text:
        return ()
    try:
        parts = tuple(int(tok) for tok in text.split(","))
    except ValueError:
        raise PolyrepError("bad partition text %r" % text)
    return check_partition(parts)

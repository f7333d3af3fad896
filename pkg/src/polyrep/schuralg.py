"""Structure constants and hyperalgebra generators for the degree-d
coefficient algebra in n letters.

The dual basis is indexed by n x n nonnegative integer matrices with entry
sum d ("exponent matrices", stored flattened row-major).  Products of two
dual basis elements are computed by enumerating three-dimensional
contingency arrays; the middle index decouples, so the enumeration runs
column-by-column of the left factor.  The divided-power raising and
lowering elements together with the diagonal idempotents generate the
algebra; a test pins that the spin of the identity under left
multiplication by them fills the whole algebra at small sizes.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np


def multinomial(parts) -> int:
    total = 0
    out = 1
    for x in parts:
        total += x
        out *= math.comb(total, x)
    return out


def contingency_tables(rowsums, colsums):
    """All nonnegative integer matrices with the given margins."""
    rows = len(rowsums)
    if sum(rowsums) != sum(colsums):
        return
    if rows == 0:
        if not any(colsums):
            yield ()
        return

    def rec(i, remaining_cols, acc):
        if i == rows - 1:
            last = tuple(remaining_cols)
            if sum(last) == rowsums[i]:
                yield acc + (last,)
            return
        for row in _compositions(rowsums[i], len(remaining_cols), remaining_cols):
            rest = tuple(a - b for a, b in zip(remaining_cols, row))
            yield from rec(i + 1, rest, acc + (row,))

    yield from rec(0, tuple(colsums), ())


def _compositions(total, length, caps):
    if length == 0:
        if total == 0:
            yield ()
        return
    lo = max(0, total - sum(caps[1:]))
    hi = min(total, caps[0])
    for x in range(lo, hi + 1):
        for rest in _compositions(total - x, length - 1, caps[1:]):
            yield (x,) + rest


def exp_rowsums(flat, n):
    return tuple(sum(flat[i * n : (i + 1) * n]) for i in range(n))


def exp_colsums(flat, n):
    return tuple(sum(flat[j::n]) for j in range(n))


def xi_product(e1, e2, n: int):
    """Expansion of xi_{e1} * xi_{e2} in the dual basis.

    Returns a dict {flat exponent matrix: integer coefficient}; coefficients
    are exact integers, not yet reduced mod p.  The product is zero unless
    the column sums of e1 match the row sums of e2.
    """
    if exp_colsums(e1, n) != exp_rowsums(e2, n):
        return {}
    per_k = []
    for k in range(n):
        rows = tuple(e1[i * n + k] for i in range(n))
        cols = tuple(e2[k * n + j] for j in range(n))
        tabs = list(contingency_tables(rows, cols))
        if not tabs:
            return {}
        per_k.append(tabs)
    out = {}

    def rec(k, chosen):
        if k == n:
            e = [0] * (n * n)
            for tab in chosen:
                for i in range(n):
                    for j in range(n):
                        e[i * n + j] += tab[i][j]
            coeff = 1
            for i in range(n):
                for j in range(n):
                    fibers = [chosen[k2][i][j] for k2 in range(n)]
                    coeff *= multinomial(fibers)
            key = tuple(e)
            out[key] = out.get(key, 0) + coeff
            return
        for tab in per_k[k]:
            rec(k + 1, chosen + [tab])

    rec(0, [])
    return out


@lru_cache(maxsize=None)
def exponent_basis(n: int, d: int) -> tuple:
    """All flattened exponent matrices with entry sum d, lexicographic."""

    out = []

    def rec(prefix, rem, slots):
        if slots == 1:
            out.append(prefix + (rem,))
            return
        for x in range(rem + 1):
            rec(prefix + (x,), rem - x, slots - 1)

    rec((), d, n * n)
    return tuple(out)


def diag_flat(wt, n) -> tuple:
    e = [0] * (n * n)
    for i, x in enumerate(wt):
        e[i * n + i] = x
    return tuple(e)


def root_element_keys(n: int, d: int, i: int, j: int, m: int):
    """Keys of a divided-power root element: diagonals plus m at cell (i, j)."""
    from .partitions import compositions_of

    keys = []
    for diag in compositions_of(d - m, n):
        e = list(diag_flat(diag, n))
        e[i * n + j] += m
        keys.append(tuple(e))
    return keys


def generator_key_lists(n: int, d: int, all_roots: bool = False):
    """Labelled key lists for the hyperalgebra generators at degree d."""
    if all_roots:
        pairs = [(i, j) for i in range(n) for j in range(n) if i != j]
    else:
        pairs = [(i, i + 1) for i in range(n - 1)] + [(i + 1, i) for i in range(n - 1)]
    gens = []
    for (i, j) in pairs:
        for m in range(1, d + 1):
            if j == i + 1:
                label = ("E", i, m)
            elif i == j + 1:
                label = ("F", j, m)
            else:
                label = ("R", i, j, m)
            gens.append((label, root_element_keys(n, d, i, j, m)))
    return gens


def left_multiplication_matrix(keys, n: int, d: int, p: int) -> np.ndarray:
    """Dense matrix of left multiplication by sum(xi_e1 for e1 in keys) on
    the dual basis of the degree-d algebra.  Intended for small n, d."""
    basis = exponent_basis(n, d)
    index = {e: k for k, e in enumerate(basis)}
    dim = len(basis)
    mat = np.zeros((dim, dim), dtype=np.int64)
    for c, f in enumerate(basis):
        for e1 in keys:
            for e, coeff in xi_product(e1, f, n).items():
                mat[index[e], c] += coeff
    return mat % p


def unit_element(n: int, d: int) -> np.ndarray:
    """Coordinates of the identity: the sum of all diagonal basis elements."""
    from .partitions import compositions_of

    basis = exponent_basis(n, d)
    index = {e: k for k, e in enumerate(basis)}
    v = np.zeros(len(basis), dtype=np.int64)
    for wt in compositions_of(d, n):
        v[index[diag_flat(wt, n)]] = 1
    return v

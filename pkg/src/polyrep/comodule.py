"""Finite-dimensional comodules over the matrix-coefficient coalgebra.

A representation of the n x n matrix monoid that is homogeneous polynomial
of degree d is stored by its coefficient expansion: a map from exponent
matrices E (n x n, entries summing to d) to dim x dim matrices, with
rho(g) = sum_E coeff[E] * g^E.  Multi-variable versions (several matrix
arguments, one degree each) use tuples of exponent matrices as keys; all
of the structural machinery (weights, generator actions, tensor, dual,
twist, subquotients) is written once against that shape.

Storage is a single flat COO block: parallel arrays (kid, row, col, val)
plus a key table, kept sorted by (kid, row, col).  Tensor products and
twists are then plain vectorized array operations, which is what makes
degree-6 contexts tractable.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from . import gf, schuralg
from .errors import (
    BudgetExceeded,
    ContextMismatch,
    DegreeMismatch,
    DimensionMismatch,
    FormatError,
    NotStable,
    PolyrepError,
)


@dataclass(frozen=True)
class Ctx:
    """Prime and matrix sizes, one size per variable."""

    p: int
    dims: tuple

    def __post_init__(self):
        if not gf.is_prime(self.p):
            raise PolyrepError("characteristic must be prime, got %r" % (self.p,))
        if not self.dims or any(int(n) < 1 for n in self.dims):
            raise PolyrepError("matrix sizes must be positive, got %r" % (self.dims,))
        object.__setattr__(self, "dims", tuple(int(n) for n in self.dims))

    @property
    def nvars(self) -> int:
        return len(self.dims)

    @property
    def n(self) -> int:
        if len(self.dims) != 1:
            raise ContextMismatch("single-variable context required")
        return self.dims[0]

    def keylen(self) -> int:
        return sum(n * n for n in self.dims)

    def wtlen(self) -> int:
        return sum(self.dims)


def ctx1(p: int, n: int) -> Ctx:
    return Ctx(p, (n,))


def _check_same_ctx(a, b):
    if a.ctx != b.ctx:
        raise ContextMismatch("contexts differ: %r vs %r" % (a.ctx, b.ctx))


class PolyRep:
    """A homogeneous polynomial representation given by coefficient data.

    Entries live in four parallel arrays sorted by (kid, row, col); ktab
    holds the distinct keys (rows = flattened exponent matrices of all
    variables, concatenated), sorted lexicographically.  wt assigns each
    basis vector its weight: concatenated column-sum compositions.
    """

    def __init__(self, ctx, degs, dim, wt, ktab, kid, krow, kcol, kval,
                 name="", keys_complete=True):
        self.ctx = ctx
        self.degs = tuple(int(x) for x in degs)
        if len(self.degs) != ctx.nvars:
            raise DegreeMismatch("expected %d degrees, got %r" % (ctx.nvars, degs))
        self.dim = int(dim)
        self.wt = np.asarray(wt, dtype=np.int16).reshape(self.dim, ctx.wtlen())
        self.ktab = np.asarray(ktab, dtype=np.int16).reshape(-1, ctx.keylen())
        self.kid = np.asarray(kid, dtype=np.int64)
        self.krow = np.asarray(krow, dtype=np.int64)
        self.kcol = np.asarray(kcol, dtype=np.int64)
        self.kval = np.asarray(kval, dtype=np.int64) % ctx.p
        self.name = name
        self.keys_complete = keys_complete
        self._canonicalize()
        self._gens = None
        self._wt_index = None
        self._kid_slices = None
        self._key_lookup = None

    # -- construction helpers -------------------------------------------

    def _canonicalize(self):
        keep = self.kval != 0
        if not keep.all():
            self.kid = self.kid[keep]
            self.krow = self.krow[keep]
            self.kcol = self.kcol[keep]
            self.kval = self.kval[keep]
        # sort/dedupe the key table
        if self.ktab.shape[0]:
            order = np.lexsort(self.ktab.T[::-1])
            tab = self.ktab[order]
            dup = np.ones(tab.shape[0], dtype=bool)
            dup[1:] = np.any(tab[1:] != tab[:-1], axis=1)
            newtab = tab[dup]
            remap = np.empty(self.ktab.shape[0], dtype=np.int64)
            remap[order] = np.cumsum(dup) - 1
            self.ktab = newtab
            self.kid = remap[self.kid]
        # sort entries, merge duplicates
        order = np.lexsort((self.kcol, self.krow, self.kid))
        kid, krow, kcol = self.kid[order], self.krow[order], self.kcol[order]
        kval = self.kval[order]
        if kid.size:
            new = np.ones(kid.size, dtype=bool)
            new[1:] = (kid[1:] != kid[:-1]) | (krow[1:] != krow[:-1]) | (kcol[1:] != kcol[:-1])
            grp = np.cumsum(new) - 1
            sums = np.zeros(int(grp[-1]) + 1, dtype=np.int64)
            np.add.at(sums, grp, kval)
            sums %= self.ctx.p
            starts = np.flatnonzero(new)
            kid, krow, kcol, kval = kid[starts], krow[starts], kcol[starts], sums
            keep = kval != 0
            kid, krow, kcol, kval = kid[keep], krow[keep], kcol[keep], kval[keep]
        self.kid, self.krow, self.kcol, self.kval = kid, krow, kcol, kval
        # drop unreferenced keys
        if self.ktab.shape[0]:
            used = np.zeros(self.ktab.shape[0], dtype=bool)
            used[self.kid] = True
            if not used.all():
                remap = np.cumsum(used) - 1
                self.ktab = self.ktab[used]
                self.kid = remap[self.kid]

    @property
    def nkeys(self) -> int:
        return self.ktab.shape[0]

    @property
    def nnz(self) -> int:
        return self.kval.size

    def __repr__(self):
        label = self.name or "PolyRep"
        return "<%s p=%d dims=%s degs=%s dim=%d keys=%d>" % (
            label, self.ctx.p, self.ctx.dims, self.degs, self.dim, self.nkeys)

    # -- key access ------------------------------------------------------

    def _slices(self):
        if self._kid_slices is None:
            bounds = np.searchsorted(self.kid, np.arange(self.nkeys + 1))
            self._kid_slices = bounds
        return self._kid_slices

    def key_tuple(self, k: int) -> tuple:
        return tuple(int(x) for x in self.ktab[k])

    def key_id(self, key) -> int:
        """Index of a key (flat concatenated tuple); -1 if absent."""
        if self._key_lookup is None:
            self._key_lookup = {bytes(self.ktab[k].astype(np.int16).tobytes()): k
                                for k in range(self.nkeys)}
        probe = np.asarray(key, dtype=np.int16).tobytes()
        return self._key_lookup.get(probe, -1)

    def key_matrix(self, k: int) -> sp.csr_matrix:
        b = self._slices()
        s, e = b[k], b[k + 1]
        return sp.csr_matrix(
            (self.kval[s:e].astype(np.int64), (self.krow[s:e], self.kcol[s:e])),
            shape=(self.dim, self.dim))

    def key_matrix_for(self, key) -> sp.csr_matrix:
        k = self.key_id(key)
        if k < 0:
            return sp.csr_matrix((self.dim, self.dim), dtype=np.int64)
        return self.key_matrix(k)

    def var_slice(self, t: int) -> slice:
        off = sum(n * n for n in self.ctx.dims[:t])
        return slice(off, off + self.ctx.dims[t] ** 2)

    def wt_var_slice(self, t: int) -> slice:
        off = sum(self.ctx.dims[:t])
        return slice(off, off + self.ctx.dims[t])

    def key_rowsums(self) -> np.ndarray:
        """Per-key row sums of every variable, concatenated (nkeys x wtlen)."""
        out = np.zeros((self.nkeys, self.ctx.wtlen()), dtype=np.int16)
        for t, n in enumerate(self.ctx.dims):
            blk = self.ktab[:, self.var_slice(t)].reshape(self.nkeys, n, n)
            out[:, self.wt_var_slice(t)] = blk.sum(axis=2)
        return out

    def key_colsums(self) -> np.ndarray:
        out = np.zeros((self.nkeys, self.ctx.wtlen()), dtype=np.int16)
        for t, n in enumerate(self.ctx.dims):
            blk = self.ktab[:, self.var_slice(t)].reshape(self.nkeys, n, n)
            out[:, self.wt_var_slice(t)] = blk.sum(axis=1)
        return out

    # -- weights ---------------------------------------------------------

    def weight_index(self) -> dict:
        """Map weight tuple -> array of basis indices, cached."""
        if self._wt_index is None:
            idx = {}
            if self.dim:
                order = np.lexsort(self.wt.T[::-1])
                wts = self.wt[order]
                new = np.ones(self.dim, dtype=bool)
                new[1:] = np.any(wts[1:] != wts[:-1], axis=1)
                starts = np.flatnonzero(new).tolist() + [self.dim]
                for a, b in zip(starts[:-1], starts[1:]):
                    idx[tuple(int(x) for x in wts[a])] = np.sort(order[a:b])
            self._wt_index = idx
        return self._wt_index

    def weight_space(self, wtup) -> np.ndarray:
        return self.weight_index().get(tuple(wtup), np.zeros(0, dtype=np.int64))

    def weight_of(self, i: int) -> tuple:
        return tuple(int(x) for x in self.wt[i])

    # -- generator actions -----------------------------------------------

    def gens(self) -> dict:
        """Hyperalgebra generator actions, label -> csr matrix.

        Labels are (var, 'E', i, m) and (var, 'F', i, m): the divided-power
        raising/lowering elements at adjacent rows (i, i+1) of variable var.
        The matrix of such an element is the sum of coeff[K] over the keys K
        that are diagonal in every variable except an m at the single
        off-diagonal cell.
        """
        if self._gens is not None:
            return self._gens
        if not self.keys_complete:
            raise PolyrepError(
                "generator actions unavailable: %r has partial key data" % self)
        offdiag_count = np.zeros(self.nkeys, dtype=np.int64)
        cell_var = np.full(self.nkeys, -1, dtype=np.int64)
        cell_i = np.zeros(self.nkeys, dtype=np.int64)
        cell_j = np.zeros(self.nkeys, dtype=np.int64)
        cell_m = np.zeros(self.nkeys, dtype=np.int64)
        for t, n in enumerate(self.ctx.dims):
            if n < 2:
                continue  # no off-diagonal cells in a 1x1 variable
            blk = self.ktab[:, self.var_slice(t)].reshape(self.nkeys, n, n)
            mask = ~np.eye(n, dtype=bool)
            off = blk[:, mask]
            nz = off != 0
            cnt = nz.sum(axis=1)
            first = np.argmax(nz, axis=1)
            ii, jj = np.nonzero(mask)
            single = (cnt == 1) & (offdiag_count == 0)
            cell_var[single] = t
            cell_i[single] = ii[first[single]]
            cell_j[single] = jj[first[single]]
            cell_m[single] = off[np.arange(self.nkeys), first][single]
            offdiag_count += cnt
        gens = {}
        bounds = self._slices()
        for k in range(self.nkeys):
            if offdiag_count[k] != 1 or cell_var[k] < 0:
                continue
            t, i, j, m = int(cell_var[k]), int(cell_i[k]), int(cell_j[k]), int(cell_m[k])
            if abs(i - j) != 1:
                continue
            label = (t, "E", i, m) if j == i + 1 else (t, "F", j, m)
            s, e = bounds[k], bounds[k + 1]
            mat = sp.csr_matrix(
                (self.kval[s:e].astype(np.int64), (self.krow[s:e], self.kcol[s:e])),
                shape=(self.dim, self.dim))
            if label in gens:
                gens[label] = gens[label] + mat
            else:
                gens[label] = mat
        for label in gens:
            gens[label].data %= self.ctx.p
            gens[label].eliminate_zeros()
        self._gens = gens
        return gens

    def gen_labels(self) -> list:
        """All generator labels this context/degree admits, sorted."""
        out = []
        for t, n in enumerate(self.ctx.dims):
            for i in range(n - 1):
                for m in range(1, self.degs[t] + 1):
                    out.append((t, "E", i, m))
                    out.append((t, "F", i, m))
        return sorted(out)

    @staticmethod
    def gen_shift(label, ctx) -> np.ndarray:
        """Weight displacement of a generator, in concatenated coordinates."""
        t, kind, i, m = label
        s = np.zeros(ctx.wtlen(), dtype=np.int16)
        off = sum(ctx.dims[:t])
        if kind == "E":
            s[off + i] = m
            s[off + i + 1] = -m
        else:
            s[off + i] = -m
            s[off + i + 1] = m
        return s

    # -- vector coaction ---------------------------------------------------

    def coaction_on_vector(self, v: np.ndarray):
        """All entries of the coaction of v: arrays (kid, row, val).

        Column j of coeff[K] weighted by v[j], accumulated; only nonzero
        results are returned.
        """
        v = np.asarray(v, dtype=np.int64) % self.ctx.p
        contrib = (self.kval * v[self.kcol]) % self.ctx.p
        keep = contrib != 0
        kid, krow, val = self.kid[keep], self.krow[keep], contrib[keep]
        if kid.size == 0:
            return kid, krow, val
        order = np.lexsort((krow, kid))
        kid, krow, val = kid[order], krow[order], val[order]
        new = np.ones(kid.size, dtype=bool)
        new[1:] = (kid[1:] != kid[:-1]) | (krow[1:] != krow[:-1])
        grp = np.cumsum(new) - 1
        sums = np.zeros(int(grp[-1]) + 1, dtype=np.int64)
        np.add.at(sums, grp, val)
        sums %= self.ctx.p
        starts = np.flatnonzero(new)
        kid, krow, val = kid[starts], krow[starts], sums
        keep = val != 0
        return kid[keep], krow[keep], val[keep]

    # -- validation --------------------------------------------------------

    def check_counit(self):
        rs = self.key_rowsums()
        cs = self.key_colsums()
        diag = np.all(rs == cs, axis=1)
        total = sp.csr_matrix((self.dim, self.dim), dtype=np.int64)
        for k in np.flatnonzero(diag):
            # diagonal row/col sums do not imply a diagonal key; filter
            if self._key_is_diagonal(k):
                total = total + self.key_matrix(k)
        total = total.toarray() % self.ctx.p
        if not np.array_equal(total, np.eye(self.dim, dtype=np.int64)):
            raise NotStable("counit law fails: diagonal keys do not sum to the identity")

    def _key_is_diagonal(self, k: int) -> bool:
        for t, n in enumerate(self.ctx.dims):
            blk = self.ktab[k, self.var_slice(t)].reshape(n, n)
            if np.any(blk != np.diag(np.diag(blk))):
                return False
        return True

    def check_weights(self):
        if self.kid.size == 0:
            return
        rs = self.key_rowsums()
        cs = self.key_colsums()
        if not np.array_equal(self.wt[self.krow], rs[self.kid]):
            raise NotStable("row weights disagree with key row sums")
        if not np.array_equal(self.wt[self.kcol], cs[self.kid]):
            raise NotStable("column weights disagree with key column sums")
        degs = np.zeros(self.ctx.wtlen(), dtype=np.int64)
        for t in range(self.ctx.nvars):
            degs[self.wt_var_slice(t)] = self.degs[t]
        sums = np.zeros((self.dim, self.ctx.nvars), dtype=np.int64)
        for t in range(self.ctx.nvars):
            sums[:, t] = self.wt[:, self.wt_var_slice(t)].sum(axis=1)
        want = np.array(self.degs, dtype=np.int64)
        if self.dim and not np.all(sums == want[None, :]):
            raise NotStable("weights do not sum to the declared degrees")

    def check_coalgebra(self, full: bool | None = None):
        """Counit, weight grading, and the multiplicativity criterion.

        The coefficient map extends to an algebra map iff theta(x * xi_F)
        = theta(x) theta(xi_F) for x running over the generators; by
        induction over words it suffices to test generator times basis
        element, which is what the full check does.  Cost grows with the
        number of keys, so by default it runs only on small contexts.
        """
        if not self.keys_complete:
            raise PolyrepError("cannot validate %r: partial key data" % self)
        self.check_counit()
        self.check_weights()
        budget = sum(n * d for n, d in zip(self.ctx.dims, self.degs))
        if full is None:
            full = budget <= 8 and self.nkeys <= 600
        if not full:
            return
        for t, n in enumerate(self.ctx.dims):
            d = self.degs[t]
            for (label, keys) in schuralg.generator_key_lists(n, d):
                theta_g = sp.csr_matrix((self.dim, self.dim), dtype=np.int64)
                for e1 in keys:
                    theta_g = theta_g + self._theta_single(t, e1)
                theta_g.data %= self.ctx.p
                for k in range(self.nkeys):
                    fkey = self.ktab[k]
                    f_t = tuple(int(x) for x in fkey[self.var_slice(t)])
                    lhs = sp.csr_matrix((self.dim, self.dim), dtype=np.int64)
                    for e1 in keys:
                        for e_t, coeff in schuralg.xi_product(e1, f_t, n).items():
                            coeff %= self.ctx.p
                            if not coeff:
                                continue
                            probe = np.array(fkey, dtype=np.int16).copy()
                            probe[self.var_slice(t)] = e_t
                            lhs = lhs + coeff * self.key_matrix_for(tuple(probe))
                    # on the right, theta(xi_F) for the full multi-key
                    # requires the other variables' components untouched:
                    # theta(xi_(F_1,..)) = coeff[F]; multiply whole matrices
                    rhs = theta_g @ self.key_matrix(k)
                    diff = (lhs - rhs).toarray() % self.ctx.p
                    if np.any(diff):
                        raise NotStable(
                            "coefficient map is not multiplicative at %r, key %d" % (label, k))

    def _theta_single(self, t: int, e1) -> sp.csr_matrix:
        """Sum of coeff[K] over keys whose variable-t part is e1 and the
        rest diagonal, matching the image of xi_{e1} in the multi algebra."""
        acc = sp.csr_matrix((self.dim, self.dim), dtype=np.int64)
        e1 = np.asarray(e1, dtype=np.int16)
        for k in range(self.nkeys):
            if not np.array_equal(self.ktab[k, self.var_slice(t)], e1):
                continue
            ok = True
            for s, n in enumerate(self.ctx.dims):
                if s == t:
                    continue
                blk = self.ktab[k, self.var_slice(s)].reshape(n, n)
                if np.any(blk != np.diag(np.diag(blk))):
                    ok = False
                    break
            if ok:
                acc = acc + self.key_matrix(k)
        return acc


# -- basis enumeration ----------------------------------------------------


def _words(n, d):
    return list(itertools.product(range(n), repeat=d))


def _multisets(n, d):
    return list(itertools.combinations_with_replacement(range(n), d))


def _subsets(n, d):
    return list(itertools.combinations(range(n), d))


def _content(word, n):
    c = [0] * n
    for x in word:
        c[x] += 1
    return tuple(c)


def _pair_key(v, w, n):
    e = [0] * (n * n)
    for a, b in zip(v, w):
        e[a * n + b] += 1
    return tuple(e)


# -- constructors (single variable) ----------------------------------------


def constant(ctx: Ctx, degs=None) -> PolyRep:
    degs = tuple([0] * ctx.nvars) if degs is None else tuple(degs)
    if any(degs):
        raise DegreeMismatch("constant representation has degree zero")
    key = np.zeros((1, ctx.keylen()), dtype=np.int16)
    return PolyRep(ctx, degs, 1, np.zeros((1, ctx.wtlen())), key,
                   [0], [0], [0], [1], name="1")


def natural(ctx: Ctx) -> PolyRep:
    n = ctx.n
    ktab, kid, krow, kcol = [], [], [], []
    for i in range(n):
        for j in range(n):
            e = [0] * (n * n)
            e[i * n + j] = 1
            kid.append(len(ktab))
            ktab.append(e)
            krow.append(i)
            kcol.append(j)
    wt = np.eye(n, dtype=np.int16)
    return PolyRep(ctx, (1,), n, wt, ktab, kid, krow, kcol, [1] * len(kid),
                   name="Nat")


def tensor_power(ctx: Ctx, a: int) -> PolyRep:
    """Words of length a; coeff[E] has entry 1 at (v, w) iff the pair
    content matrix of (v, w) equals E."""
    n = ctx.n
    if a == 0:
        return constant(ctx)
    words = np.array(_words(n, a), dtype=np.int16)
    nb = words.shape[0]
    rows = np.repeat(np.arange(nb, dtype=np.int64), nb)
    cols = np.tile(np.arange(nb, dtype=np.int64), nb)
    # key of the pair (v, w): multiset of cell indices v_t*n + w_t
    cells = words[rows] * np.int16(n) + words[cols]
    cells.sort(axis=1)
    order = np.lexsort(cells.T[::-1])
    cells_s = cells[order]
    new = np.ones(cells_s.shape[0], dtype=bool)
    new[1:] = np.any(cells_s[1:] != cells_s[:-1], axis=1)
    grp = np.cumsum(new) - 1
    reps = cells_s[new]
    ktab = np.zeros((reps.shape[0], n * n), dtype=np.int16)
    for t in range(a):
        np.add.at(ktab, (np.arange(reps.shape[0]), reps[:, t].astype(np.int64)), 1)
    kid = np.empty(nb * nb, dtype=np.int64)
    kid[order] = grp
    wt = np.zeros((nb, n), dtype=np.int16)
    for t in range(a):
        np.add.at(wt, (np.arange(nb), words[:, t].astype(np.int64)), 1)
    return PolyRep(ctx, (a,), nb, wt, ktab, kid, rows, cols,
                   np.ones(nb * nb, dtype=np.int64), name="Pow[%d]" % a)


def sym_power(ctx: Ctx, a: int) -> PolyRep:
    """Multisets, lexicographic; coeff[E] at (beta-row, alpha-col) is the
    product over i of multinomial(alpha_i; column i of E)."""
    n = ctx.n
    if a == 0:
        return constant(ctx)
    basis = _multisets(n, a)
    contents = [_content(b, n) for b in basis]
    cindex = {}
    for idx, c in enumerate(contents):
        cindex.setdefault(c, []).append(idx)
    ktab, kid, krow, kcol, kval = [], [], [], [], []
    for e in schuralg.exponent_basis(n, a):
        beta = schuralg.exp_rowsums(e, n)
        alpha = schuralg.exp_colsums(e, n)
        if beta not in cindex or alpha not in cindex:
            continue
        val = 1
        for i in range(n):
            val *= schuralg.multinomial([e[j * n + i] for j in range(n)])
        val %= ctx.p
        if not val:
            continue
        kid.append(len(ktab))
        ktab.append(e)
        krow.append(cindex[beta][0])
        kcol.append(cindex[alpha][0])
        kval.append(val)
    wt = np.array(contents, dtype=np.int16)
    return PolyRep(ctx, (a,), len(basis), wt, ktab, kid, krow, kcol, kval,
                   name="Sym[%d]" % a)


def div_power(ctx: Ctx, a: int) -> PolyRep:
    """Divided powers: multiset basis; coeff[E] is the product over i of
    multinomial(beta_i; row i of E).  This matches the orbit-sum basis of
    the symmetric invariants in the a-th tensor power."""
    n = ctx.n
    if a == 0:
        return constant(ctx)
    basis = _multisets(n, a)
    contents = [_content(b, n) for b in basis]
    cindex = {c: i for i, c in enumerate(contents)}
    ktab, kid, krow, kcol, kval = [], [], [], [], []
    for e in schuralg.exponent_basis(n, a):
        beta = schuralg.exp_rowsums(e, n)
        alpha = schuralg.exp_colsums(e, n)
        if beta not in cindex or alpha not in cindex:
            continue
        val = 1
        for i in range(n):
            val *= schuralg.multinomial(e[i * n : (i + 1) * n])
        val %= ctx.p
        if not val:
            continue
        kid.append(len(ktab))
        ktab.append(e)
        krow.append(cindex[beta])
        kcol.append(cindex[alpha])
        kval.append(val)
    wt = np.array(contents, dtype=np.int16)
    return PolyRep(ctx, (a,), len(basis), wt, ktab, kid, krow, kcol, kval,
                   name="Div[%d]" % a)


def wedge_power(ctx: Ctx, a: int) -> PolyRep:
    """Strictly increasing subsets; coeff[E] at (T, S) is the sign of the
    unique bijection S -> T compatible with E, when E is a 0/1 matrix
    supported on T x S rows/columns; zero otherwise."""
    n = ctx.n
    if a == 0:
        return constant(ctx)
    if a > n:
        raise DimensionMismatch(
            "wedge degree %d exceeds matrix size %d (zero module)" % (a, n))
    basis = _subsets(n, a)
    index = {b: i for i, b in enumerate(basis)}
    ktab, kid, krow, kcol, kval = [], [], [], [], []
    for ci, (scol) in enumerate(basis):
        # E ranges over permutation-like matchings T -> S
        for tperm in itertools.permutations(range(n), a):
            tset = tuple(sorted(tperm))
            if len(set(tperm)) < a:
                continue
            # matching sends column s_k to row tperm[k]
            e = [0] * (n * n)
            for k, s_ in enumerate(scol):
                e[tperm[k] * n + s_] = 1
            sign = _perm_sign_to_sorted(tperm)
            kid.append(len(ktab))
            ktab.append(tuple(e))
            krow.append(index[tset])
            kcol.append(ci)
            kval.append(sign % ctx.p)
    wt = np.zeros((len(basis), n), dtype=np.int16)
    for i, b in enumerate(basis):
        for x in b:
            wt[i, x] = 1
    return PolyRep(ctx, (a,), len(basis), wt, ktab, kid, krow, kcol, kval,
                   name="Wedge[%d]" % a)


def _perm_sign_to_sorted(seq) -> int:
    inv = 0
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                inv += 1
    return -1 if inv % 2 else 1


# -- operations -------------------------------------------------------------


TENSOR_ENTRY_CAP = 30_000_000


def _leibniz_gens(a: PolyRep, b: PolyRep, degs) -> dict:
    """Generator actions on a tensor product from the factor actions:
    the divided power of order m acts as the sum over splittings m = x + y
    of (order-x action) kron (order-y action), order zero acting as the
    identity."""
    p = a.ctx.p
    ga, gb = a.gens(), b.gens()
    eye_a = sp.identity(a.dim, dtype=np.int64, format="csr")
    eye_b = sp.identity(b.dim, dtype=np.int64, format="csr")
    out = {}
    for t, n in enumerate(a.ctx.dims):
        for kind in ("E", "F"):
            for i in range(n - 1):
                for m in range(1, degs[t] + 1):
                    acc = None
                    for x in range(0, m + 1):
                        y = m - x
                        left = eye_a if x == 0 else ga.get((t, kind, i, x))
                        right = eye_b if y == 0 else gb.get((t, kind, i, y))
                        if left is None or right is None:
                            continue
                        term = sp.kron(left, right, format="csr")
                        acc = term if acc is None else acc + term
                    if acc is not None:
                        acc = acc.tocsr()
                        acc.data %= p
                        acc.eliminate_zeros()
                        if acc.nnz:
                            out[(t, kind, i, m)] = acc
    return out


def tensor(a: PolyRep, b: PolyRep, name="", keys="auto") -> PolyRep:
    """Tensor product.  keys='full' materializes the coefficient data
    (raising BudgetExceeded over the entry cap), 'none' keeps only weights
    and generator actions, 'auto' picks by size."""
    _check_same_ctx(a, b)
    ctx = a.ctx
    degs = tuple(x + y for x, y in zip(a.degs, b.degs))
    dim = a.dim * b.dim
    na, nb_ = a.nnz, b.nnz
    nm = name or ("(%s*%s)" % (a.name or "?", b.name or "?"))
    wt = (a.wt[:, None, :] + b.wt[None, :, :]).reshape(dim, ctx.wtlen())
    if keys == "auto":
        keys = "full" if (a.keys_complete and b.keys_complete
                          and na * nb_ <= TENSOR_ENTRY_CAP) else "none"
    if keys == "none":
        gens = _leibniz_gens(a, b, degs)
        e = np.zeros(0, dtype=np.int64)
        out = PolyRep(ctx, degs, dim, wt, np.zeros((0, ctx.keylen())),
                      e, e, e, e, name=nm, keys_complete=False)
        out._gens = gens
        return out
    if not (a.keys_complete and b.keys_complete):
        raise PolyrepError("cannot materialize a tensor of partial-key data")
    if na * nb_ > TENSOR_ENTRY_CAP:
        raise BudgetExceeded(
            "tensor product needs %d entry products (cap %d)"
            % (na * nb_, TENSOR_ENTRY_CAP))
    ia = np.repeat(np.arange(na, dtype=np.int64), nb_)
    ib = np.tile(np.arange(nb_, dtype=np.int64), na)
    ktab = a.ktab[a.kid[ia]].astype(np.int16) + b.ktab[b.kid[ib]]
    krow = a.krow[ia] * b.dim + b.krow[ib]
    kcol = a.kcol[ia] * b.dim + b.kcol[ib]
    kval = (a.kval[ia] * b.kval[ib]) % ctx.p
    kid = np.arange(ktab.shape[0], dtype=np.int64)
    return PolyRep(ctx, degs, dim, wt, ktab, kid, krow, kcol, kval, name=nm)


def dual(m: PolyRep) -> PolyRep:
    """Contravariant dual: transpose matrices, transpose keys."""
    ctx = m.ctx
    ktab = m.ktab.copy()
    for t, n in enumerate(ctx.dims):
        blk = ktab[:, m.var_slice(t)].reshape(-1, n, n)
        ktab[:, m.var_slice(t)] = np.transpose(blk, (0, 2, 1)).reshape(-1, n * n)
    out = PolyRep(ctx, m.degs, m.dim, m.wt, ktab, m.kid, m.kcol, m.krow,
                  m.kval, name="Dual(%s)" % (m.name or "?"),
                  keys_complete=m.keys_complete)
    if m._gens is not None:
        flipped = {}
        for (t, kind, i, mm), mat in m._gens.items():
            other = "F" if kind == "E" else "E"
            flipped[(t, other, i, mm)] = mat.T.tocsr()
        out._gens = flipped
    return out


def twist(m: PolyRep, r: int, var: int = 0) -> PolyRep:
    """Precompose variable var with the p^r-power map."""
    if r < 0:
        raise PolyrepError("twist exponent must be nonnegative")
    if r == 0:
        return m
    q = m.ctx.p ** r
    ktab = m.ktab.astype(np.int64, copy=True)
    ktab[:, m.var_slice(var)] *= q
    if ktab.max(initial=0) > np.iinfo(np.int16).max:
        raise PolyrepError("twisted exponents overflow storage")
    wt = m.wt.astype(np.int64, copy=True)
    wt[:, m.wt_var_slice(var)] *= q
    degs = list(m.degs)
    degs[var] *= q
    out = PolyRep(m.ctx, degs, m.dim, wt, ktab.astype(np.int16), m.kid,
                  m.krow, m.kcol, m.kval,
                  name="Tw(%s,%d)" % (m.name or "?", r),
                  keys_complete=m.keys_complete)
    if m._gens is not None:
        tg = {}
        for (t, kind, i, mm), mat in m._gens.items():
            newm = mm * q if t == var else mm
            tg[(t, kind, i, newm)] = mat
        out._gens = tg
    return out


def direct_sum(a: PolyRep, b: PolyRep, name="") -> PolyRep:
    _check_same_ctx(a, b)
    if a.degs != b.degs:
        raise DegreeMismatch("cannot sum degrees %r and %r" % (a.degs, b.degs))
    ctx = a.ctx
    dim = a.dim + b.dim
    ktab = np.concatenate([a.ktab, b.ktab], axis=0)
    kid = np.concatenate([a.kid, b.kid + a.nkeys])
    krow = np.concatenate([a.krow, b.krow + a.dim])
    kcol = np.concatenate([a.kcol, b.kcol + a.dim])
    kval = np.concatenate([a.kval, b.kval])
    wt = np.concatenate([a.wt, b.wt], axis=0)
    nm = name or ("(%s+%s)" % (a.name or "?", b.name or "?"))
    out = PolyRep(ctx, a.degs, dim, wt, ktab, kid, krow, kcol, kval, name=nm,
                  keys_complete=a.keys_complete and b.keys_complete)
    if not out.keys_complete and a.ctx is ctx:
        ga = a.gens() if a.keys_complete or a._gens is not None else {}
        gb = b.gens() if b.keys_complete or b._gens is not None else {}
        gens = {}
        for lab in set(ga) | set(gb):
            blocks = sp.block_diag(
                (ga.get(lab, sp.csr_matrix((a.dim, a.dim), dtype=np.int64)),
                 gb.get(lab, sp.csr_matrix((b.dim, b.dim), dtype=np.int64))),
                format="csr")
            gens[lab] = blocks
        out._gens = gens
    return out


def zero_rep(ctx: Ctx, degs) -> PolyRep:
    e = np.zeros((0,), dtype=np.int64)
    return PolyRep(ctx, degs, 0, np.zeros((0, ctx.wtlen())),
                   np.zeros((0, ctx.keylen())), e, e, e, e, name="0")


# -- subquotients -----------------------------------------------------------


def _weight_homogeneous(m: PolyRep, basis: np.ndarray):
    """Weight of each column of a basis matrix; error if mixed."""
    out = []
    for j in range(basis.shape[1]):
        nz = np.flatnonzero(basis[:, j] % m.ctx.p)
        if nz.size == 0:
            raise DimensionMismatch("zero column in subspace basis")
        w = m.wt[nz[0]]
        if not np.all(m.wt[nz] == w):
            raise NotStable("subspace basis column %d mixes weights" % j)
        out.append(w)
    return np.array(out, dtype=np.int16).reshape(len(out), m.ctx.wtlen())


def _collect_induced(m, mats_iter, ktab_rows, keylen):
    """Shared assembly loop for induced coefficient data."""
    ktab, kid, krow, kcol, kval = [], [], [], [], []
    for key_row, x in zip(ktab_rows, mats_iter):
        rr, cc = np.nonzero(x)
        if rr.size:
            ktab.append(key_row)
            kk = len(ktab) - 1
            for r_, c_ in zip(rr, cc):
                kid.append(kk)
                krow.append(r_)
                kcol.append(c_)
                kval.append(int(x[r_, c_]))
    ktab = np.array(ktab, dtype=np.int16).reshape(-1, keylen)
    return ktab, kid, krow, kcol, kval


def sub_rep(m: PolyRep, basis: np.ndarray, name="", key_mask=None) -> PolyRep:
    """Subrepresentation on the span of the given columns.

    Stability is verified against the generator actions (together with
    weight homogeneity of the basis this covers the whole algebra).  The
    induced coefficient data is computed for every key, or for the keys
    selected by the boolean array key_mask; a masked result carries
    keys_complete=False.
    """
    p = m.ctx.p
    basis = np.asarray(basis, dtype=np.int64) % p
    if basis.ndim != 2 or basis.shape[0] != m.dim:
        raise DimensionMismatch("basis rows %r != dim %d" % (basis.shape, m.dim))
    ech = gf.Echelon(basis, p)
    if ech.dim != basis.shape[1]:
        raise DimensionMismatch("subspace basis is not independent")
    _weight_homogeneous(m, basis)
    # work in the canonical basis of the span: coords below are relative
    # to it, so the stored embedding must be the same basis
    basis = ech.basis
    wt = _weight_homogeneous(m, basis)
    induced_gens = {}
    for lab, theta in m.gens().items():
        x = ech.coords((theta @ basis) % p)
        if x is None:
            raise NotStable("subspace not stable under generator %r" % (lab,))
        xm = np.asarray(x) % p
        if xm.any():
            induced_gens[lab] = sp.csr_matrix(xm)
    if key_mask is None:
        which = range(m.nkeys)
        complete = m.keys_complete
    else:
        which = np.flatnonzero(np.asarray(key_mask, dtype=bool))
        complete = False

    def induce():
        for k in which:
            a = (m.key_matrix(int(k)) @ basis) % p
            x = ech.coords(a)
            if x is None:
                raise NotStable("subspace not stable under key %d" % k)
            yield np.asarray(x) % p

    ktab, kid, krow, kcol, kval = _collect_induced(
        m, induce(), (m.ktab[int(k)] for k in which), m.ctx.keylen())
    out = PolyRep(m.ctx, m.degs, basis.shape[1], wt, ktab, kid, krow, kcol,
                  kval, name=name or ("sub(%s)" % (m.name or "?")),
                  keys_complete=complete)
    out._gens = induced_gens
    out._embedding = basis
    return out


def quotient_rep(m: PolyRep, basis: np.ndarray, name="", key_mask=None) -> PolyRep:
    """Quotient by the span of the given columns (must be stable).

    Representatives are the ambient basis vectors away from the pivot
    positions of the subspace.
    """
    p = m.ctx.p
    basis = np.asarray(basis, dtype=np.int64).reshape(m.dim, -1) % p
    ech = gf.Echelon(basis, p)
    if ech.dim:
        _weight_homogeneous(m, ech.basis)
    piv = list(ech.pivots)
    free = [i for i in range(m.dim) if i not in set(piv)]
    qdim = len(free)
    u = ech.basis  # dim x r, unit at pivot rows

    def project(colblock):
        red = (colblock - u @ colblock[piv, :]) % p
        return red[free, :]

    wt = m.wt[free]
    sel = np.zeros((m.dim, qdim), dtype=np.int64)
    for j, f in enumerate(free):
        sel[f, j] = 1
    induced_gens = {}
    for lab, theta in m.gens().items():
        resid = (theta @ u) % p
        if ech.coords(resid) is None:
            raise NotStable("subspace not stable under generator %r" % (lab,))
        x = project((theta @ sel) % p)
        if x.any():
            induced_gens[lab] = sp.csr_matrix(x)
    if key_mask is None:
        which = range(m.nkeys)
        complete = m.keys_complete
    else:
        which = np.flatnonzero(np.asarray(key_mask, dtype=bool))
        complete = False

    def induce():
        for k in which:
            yield project((m.key_matrix(int(k)) @ sel) % p)

    ktab, kid, krow, kcol, kval = _collect_induced(
        m, induce(), (m.ktab[int(k)] for k in which), m.ctx.keylen())
    out = PolyRep(m.ctx, m.degs, qdim, wt, ktab, kid, krow, kcol, kval,
                  name=name or ("quo(%s)" % (m.name or "?")),
                  keys_complete=complete)
    out._gens = induced_gens
    out._section = sel
    out._project = project
    return out


# -- serialization -----------------------------------------------------------


MAGIC = "POLYREP"


def serialize(m: PolyRep) -> str:
    if m.ctx.nvars != 1:
        raise FormatError("serialization covers single-variable data only")
    n = m.ctx.n
    lines = ["%s v1 p=%d n=%d d=%d dim=%d" % (MAGIC, m.ctx.p, n, m.degs[0], m.dim)]
    for i in range(m.dim):
        lines.append("w %d %s" % (i, ",".join(str(int(x)) for x in m.wt[i])))
    recs = []
    for t in range(m.nnz):
        key = m.ktab[m.kid[t]]
        recs.append((tuple(int(x) for x in key), int(m.krow[t]), int(m.kcol[t]),
                     int(m.kval[t])))
    recs.sort()
    for key, r, c, v in recs:
        lines.append("E=%s r=%d c=%d v=%d" % (",".join(map(str, key)), r, c, v))
    return "\n".join(lines) + "\n"


def deserialize(text: str) -> PolyRep:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise FormatError("empty input")
    head = lines[0].split()
    if len(head) != 6 or head[0] != MAGIC or head[1] != "v1":
        raise FormatError("bad header: %r" % lines[0])
    try:
        fields = dict(part.split("=") for part in head[2:])
        p, n, d, dim = (int(fields[k]) for k in ("p", "n", "d", "dim"))
    except (ValueError, KeyError):
        raise FormatError("bad header fields: %r" % lines[0])
    ctx = ctx1(p, n)
    wt = np.zeros((dim, n), dtype=np.int16)
    seen_w = np.zeros(dim, dtype=bool)
    ktab, kid, krow, kcol, kval = [], [], [], [], []
    kindex = {}
    for ln in lines[1:]:
        if ln.startswith("w "):
            parts = ln.split()
            try:
                i = int(parts[1])
                vals = [int(x) for x in parts[2].split(",")]
            except (IndexError, ValueError):
                raise FormatError("bad weight line: %r" % ln)
            if not (0 <= i < dim) or len(vals) != n:
                raise FormatError("weight line out of range: %r" % ln)
            wt[i] = vals
            seen_w[i] = True
        elif ln.startswith("E="):
            try:
                fields = dict(part.split("=") for part in ln.split())
                key = tuple(int(x) for x in fields["E"].split(","))
                r, c, v = int(fields["r"]), int(fields["c"]), int(fields["v"])
            except (ValueError, KeyError):
                raise FormatError("bad entry line: %r" % ln)
            if len(key) != n * n or sum(key) != d:
                raise FormatError("exponent matrix does not match context: %r" % ln)
            if not (0 <= r < dim and 0 <= c < dim):
                raise FormatError("entry indices out of range: %r" % ln)
            if key not in kindex:
                kindex[key] = len(ktab)
                ktab.append(key)
            kid.append(kindex[key])
            krow.append(r)
            kcol.append(c)
            kval.append(v)
        else:
            raise FormatError("unrecognized line: %r" % ln)
    if dim and not seen_w.all():
        raise FormatError("missing weight lines")
    ktab = np.array(ktab, dtype=np.int16).reshape(-1, n * n)
    m = PolyRep(ctx, (d,), dim, wt, ktab, kid, krow, kcol, kval)
    m.check_weights()
    return m

"""Module-level linear algebra: intertwiners, submodule closures, socle and
radical filtrations, and the standard/costandard/simple family.

Intertwiner computation is weight-blocked: a map commuting with the weight
idempotents decomposes over common weights, and the remaining conditions
come one generator at a time.  The solution space is narrowed incrementally
(kernel of each generator's constraint restricted to the current basis), so
no large stacked system is ever assembled.

Simple modules are built from the standard family: the standard module is
realized combinatorially inside a product of exterior powers, the
costandard one inside a product of symmetric powers, and the simple head is
the image of the (one-dimensional) space of maps between them.
"""

from __future__ import annotations

import itertools
from functools import lru_cache

import numpy as np
import scipy.sparse as sp

from . import comodule, gf, partitions
from .comodule import PolyRep, ctx1, quotient_rep, sub_rep
from .errors import (
    ContextTooSmall, DimensionMismatch, NotStable, PolyrepError,
)


# -- intertwiners ------------------------------------------------------------


def hom_basis(m: PolyRep, n_: PolyRep) -> list:
    """Basis of the space of equivariant maps m -> n_, as dense matrices.

    Weight blocking handles the diagonal idempotents; each divided-power
    generator then contributes linear conditions, applied incrementally to
    the current solution basis.
    """
    if m.ctx != n_.ctx:
        return []
    if m.degs != n_.degs:
        return []
    p = m.ctx.p
    wm = m.weight_index()
    wn = n_.weight_index()
    common = sorted(set(wm) & set(wn))
    if not common:
        return []
    offs = {}
    total = 0
    for w in common:
        size = len(wn[w]) * len(wm[w])
        offs[w] = (total, len(wn[w]), len(wm[w]))
        total += size
    basis = np.eye(total, dtype=np.int64)
    gm, gn = m.gens(), n_.gens()
    labels = sorted(set(gm) | set(gn) | set(m.gen_labels()))
    for lab in labels:
        if basis.shape[1] == 0:
            break
        shift = PolyRep.gen_shift(lab, m.ctx)
        tm = gm.get(lab)
        tn = gn.get(lab)
        rows = []
        for w in sorted(wm):
            wdst = tuple(int(x) for x in (np.array(w, dtype=np.int64) + shift))
            dstn = wn.get(wdst)
            if dstn is None or len(dstn) == 0:
                continue  # equations land in N_{w+s}
            ndst, msrc = len(dstn), len(wm[w])
            seg = np.zeros((ndst * msrc, basis.shape[1]), dtype=np.int64)
            # X_{w+s} theta_M term (X_{w+s} exists only at common weights)
            if wdst in offs and tm is not None:
                a = _block(tm, wm.get(wdst), wm[w], p)  # M_w -> M_{w+s}
                if a is not None:
                    off, nn, mm = offs[wdst]
                    xw = basis[off : off + nn * mm, :].reshape(nn, mm, -1)
                    seg += np.einsum("nms,mk->nks", xw, a).reshape(ndst * msrc, -1)
            # minus theta_N X_w term
            if w in offs and tn is not None:
                b = _block(tn, dstn, wn.get(w), p)      # N_w -> N_{w+s}
                if b is not None:
                    off, nn, mm = offs[w]
                    xw = basis[off : off + nn * mm, :].reshape(nn, mm, -1)
                    seg -= np.einsum("dn,nms->dms", b, xw).reshape(ndst * msrc, -1)
            seg %= p
            if seg.size and seg.any():
                rows.append(seg)
        if not rows:
            continue
        cons = np.concatenate(rows, axis=0) % p
        k = gf.kernel_basis(cons, p)
        basis = gf.matmul(basis, k, p)
    sols = []
    for j in range(basis.shape[1]):
        phi = np.zeros((n_.dim, m.dim), dtype=np.int64)
        for w in common:
            off, nn, mm = offs[w]
            blockv = basis[off : off + nn * mm, j].reshape(nn, mm)
            phi[np.ix_(wn[w], wm[w])] = blockv
        sols.append(phi % p)
    return sols


def _block(theta, rows, cols, p):
    if theta is None or rows is None or cols is None or len(rows) == 0 or len(cols) == 0:
        return None
    sub = theta[rows, :][:, cols]
    arr = np.asarray(sub.todense(), dtype=np.int64) % p
    return arr


def hom_dim(m: PolyRep, n_: PolyRep) -> int:
    return len(hom_basis(m, n_))


def is_intertwiner(phi, m: PolyRep, n_: PolyRep) -> bool:
    p = m.ctx.p
    gm, gn = m.gens(), n_.gens()
    for lab in set(gm) | set(gn):
        a = gm.get(lab, sp.csr_matrix((m.dim, m.dim), dtype=np.int64))
        b = gn.get(lab, sp.csr_matrix((n_.dim, n_.dim), dtype=np.int64))
        lhs = (phi @ a.toarray()) % p
        rhs = (b.toarray() @ phi) % p
        if not np.array_equal(lhs, rhs):
            return False
    # weight preservation
    for j in range(m.dim):
        nz = np.flatnonzero(phi[:, j] % p)
        if nz.size and not np.all(n_.wt[nz] == m.wt[j]):
            return False
    return True


# -- submodule closure --------------------------------------------------------


def weight_split(m: PolyRep, vecs: np.ndarray) -> np.ndarray:
    """Split columns into weight-homogeneous components (as a submodule
    closure step: any stable subspace contains the components)."""
    p = m.ctx.p
    vecs = np.asarray(vecs, dtype=np.int64).reshape(m.dim, -1) % p
    cols = []
    for j in range(vecs.shape[1]):
        v = vecs[:, j]
        nz = np.flatnonzero(v)
        if nz.size == 0:
            continue
        for w, idx in m.weight_index().items():
            comp = np.zeros(m.dim, dtype=np.int64)
            comp[idx] = v[idx]
            if comp.any():
                cols.append(comp)
    if not cols:
        return np.zeros((m.dim, 0), dtype=np.int64)
    return gf.column_space(np.stack(cols, axis=1), p)


def spin(m: PolyRep, vecs: np.ndarray) -> np.ndarray:
    """Canonical basis of the submodule generated by the given columns."""
    p = m.ctx.p
    cur = weight_split(m, vecs)
    gens = list(m.gens().values())
    while cur.shape[1]:
        imgs = [cur]
        for g in gens:
            imgs.append(np.asarray((g @ cur) % p))
        nxt = gf.column_space(np.concatenate(imgs, axis=1), p)
        if nxt.shape[1] == cur.shape[1]:
            return nxt
        cur = nxt
    return cur


def submodule(m: PolyRep, vecs, name="", key_mask=None) -> PolyRep:
    return sub_rep(m, spin(m, vecs), name=name, key_mask=key_mask)


def image_basis(phi, p: int) -> np.ndarray:
    return gf.column_space(np.asarray(phi, dtype=np.int64) % p, p)


def kernel_of_map(phi, p: int) -> np.ndarray:
    return gf.kernel_basis(np.asarray(phi, dtype=np.int64) % p, p)


# -- standard and costandard modules -------------------------------------------


@lru_cache(maxsize=None)
def ssyt_count(lam: tuple, n: int) -> int:
    """Number of semistandard fillings with entries in 1..n (dimension of
    the costandard and standard modules)."""
    lam = tuple(lam)
    if not lam:
        return 1
    cols = len(lam)

    def rec(row, prev):
        if row == len(lam):
            return 1
        total = 0
        width = lam[row]
        for filling in itertools.combinations_with_replacement(range(n), width):
            ok = True
            for c in range(width):
                if prev is not None and c < len(prev) and filling[c] <= prev[c]:
                    ok = False
                    break
            if ok:
                total += rec(row + 1, filling)
        return total

    del cols
    return rec(0, None)


def _row_filling(lam):
    """Positions of the diagram in reading order: (row, col) pairs."""
    out = []
    for i, li in enumerate(lam):
        for c in range(li):
            out.append((i, c))
    return out


def standard_map(p: int, n: int, lam: tuple):
    """Matrix of the defining map from the divided-power product into the
    exterior-power product; its image is the standard module."""
    lam = tuple(lam)
    lamc = partitions.conjugate(lam)
    div_bases = [list(itertools.combinations_with_replacement(range(n), a))
                 for a in lam]
    wedge_bases = [list(itertools.combinations(range(n), a)) for a in lamc]
    wedge_index = [{b: i for i, b in enumerate(bb)} for bb in wedge_bases]
    src_dim = int(np.prod([len(b) for b in div_bases])) if lam else 1
    dst_dim = int(np.prod([len(b) for b in wedge_bases])) if lamc else 1
    mat = np.zeros((dst_dim, src_dim), dtype=np.int64)
    for src_idx, combo in enumerate(itertools.product(*div_bases)):
        # expand each multiset into all distinct arrangements
        arrangements = [sorted(set(itertools.permutations(word)))
                        for word in combo]
        for arr in itertools.product(*arrangements):
            # column c of the diagram reads letters arr[i][c] down rows i
            sign = 1
            didx = []
            ok = True
            for c, colsize in enumerate(lamc):
                letters = [arr[i][c] for i in range(len(lam)) if lam[i] > c]
                if len(set(letters)) < len(letters):
                    ok = False
                    break
                sign *= _sort_sign(letters)
                didx.append(wedge_index[c][tuple(sorted(letters))])
            if not ok:
                continue
            flat = 0
            for c, bb in enumerate(wedge_bases):
                flat = flat * len(bb) + didx[c]
            mat[flat, src_idx] += sign
    return mat % p


def costandard_map(p: int, n: int, lam: tuple):
    """Matrix of the defining map from the exterior-power product into the
    symmetric-power product; its image is the costandard module."""
    lam = tuple(lam)
    lamc = partitions.conjugate(lam)
    wedge_bases = [list(itertools.combinations(range(n), a)) for a in lamc]
    sym_bases = [list(itertools.combinations_with_replacement(range(n), a))
                 for a in lam]
    sym_index = [{b: i for i, b in enumerate(bb)} for bb in sym_bases]
    src_dim = int(np.prod([len(b) for b in wedge_bases])) if lamc else 1
    dst_dim = int(np.prod([len(b) for b in sym_bases])) if lam else 1
    mat = np.zeros((dst_dim, src_dim), dtype=np.int64)
    rows = len(lam)
    for src_idx, combo in enumerate(itertools.product(*wedge_bases)):
        # per column, sum over all orders of the subset with sign
        perms = [list(itertools.permutations(subset)) for subset in combo]
        for arr in itertools.product(*perms):
            sign = 1
            words = [[] for _ in range(rows)]
            for c, order in enumerate(arr):
                sign *= _sort_sign(list(order))
                for i, letter in enumerate(order):
                    # order fills rows 0.. of column c top down
                    words[_row_of(lam, lamc, c, i)].append(letter)
            flat = 0
            for i, bb in enumerate(sym_bases):
                flat = flat * len(bb) + sym_index[i][tuple(sorted(words[i]))]
            mat[flat, src_idx] += sign
    return mat % p


def _row_of(lam, lamc, c, i):
    # i-th cell down column c belongs to the i-th row with lam[row] > c,
    # which is simply row i since parts are weakly decreasing
    return i


def _sort_sign(letters):
    inv = 0
    for a in range(len(letters)):
        for b in range(a + 1, len(letters)):
            if letters[a] > letters[b]:
                inv += 1
    return -1 if inv % 2 else 1


def _wedge_product_rep(p, n, lamc, keys="full"):
    c = ctx1(p, n)
    if not lamc:
        return comodule.constant(c)
    out = comodule.wedge_power(c, lamc[0])
    for a in lamc[1:]:
        out = comodule.tensor(out, comodule.wedge_power(c, a), keys=keys)
    return out


def _sym_product_rep(p, n, lam, keys="full"):
    c = ctx1(p, n)
    if not lam:
        return comodule.constant(c)
    out = comodule.sym_power(c, lam[0])
    for a in lam[1:]:
        out = comodule.tensor(out, comodule.sym_power(c, a), keys=keys)
    return out


def _div_product_rep(p, n, lam, keys="full"):
    c = ctx1(p, n)
    if not lam:
        return comodule.constant(c)
    out = comodule.div_power(c, lam[0])
    for a in lam[1:]:
        out = comodule.tensor(out, comodule.div_power(c, a), keys=keys)
    return out


# -- the per-context workspace -------------------------------------------------


_WORKSPACES = {}


def workspace(p: int, n: int, d: int) -> "Workspace":
    key = (p, n, d)
    if key not in _WORKSPACES:
        _WORKSPACES[key] = Workspace(p, n, d)
    return _WORKSPACES[key]


class Workspace:
    """Caches the standard family and filtration machinery at one context."""

    def __init__(self, p: int, n: int, d: int):
        self.p, self.n, self.d = p, n, d
        self.ctx = ctx1(p, n)
        self._delta = {}
        self._nabla = {}
        self._simple = {}
        self._weyl_filling_checked = False

    def labels(self):
        """Partitions of d with at most n parts (simple labels here)."""
        return partitions.partitions_of(self.d, max_len=self.n)

    def standard(self, lam) -> PolyRep:
        lam = tuple(lam)
        self._check_label(lam)
        if lam not in self._delta:
            amb = _wedge_product_rep(self.p, self.n, partitions.conjugate(lam))
            mat = standard_map(self.p, self.n, lam)
            basis = gf.column_space(mat, self.p)
            out = sub_rep(amb, basis, name="W[%s]" % partitions.format_partition(lam))
            want = ssyt_count(lam, self.n)
            if out.dim != want:
                raise PolyrepError(
                    "standard module dimension %d != tableau count %d" % (out.dim, want))
            self._delta[lam] = out
        return self._delta[lam]

    def costandard(self, lam, with_keys=True) -> PolyRep:
        lam = tuple(lam)
        self._check_label(lam)
        have = self._nabla.get(lam)
        if have is not None and (have.keys_complete or not with_keys):
            return have
        amb = _sym_product_rep(self.p, self.n, lam)
        mat = costandard_map(self.p, self.n, lam)
        basis = gf.column_space(mat, self.p)
        mask = None if with_keys else np.zeros(amb.nkeys, dtype=bool)
        out = sub_rep(amb, basis, name="C[%s]" % partitions.format_partition(lam),
                      key_mask=mask)
        want = ssyt_count(lam, self.n)
        if out.dim != want:
            raise PolyrepError(
                "costandard module dimension %d != tableau count %d" % (out.dim, want))
        self._nabla[lam] = out
        return out

    def simple(self, lam) -> PolyRep:
        """Simple head of the standard module: image of the unique map to
        the costandard module, realized as a quotient of the standard one."""
        lam = tuple(lam)
        self._check_label(lam)
        if lam not in self._simple:
            delta = self.standard(lam)
            nabla = self.costandard(lam, with_keys=False)
            maps = hom_basis(delta, nabla)
            if len(maps) != 1:
                raise PolyrepError(
                    "expected a one-dimensional map space between the standard "
                    "and costandard module at %r, got %d" % (lam, len(maps)))
            ker = kernel_of_map(maps[0], self.p)
            out = quotient_rep(delta, ker,
                               name="L[%s]" % partitions.format_partition(lam))
            hw = out.weight_space(self._pad(lam))
            if len(hw) != 1:
                raise PolyrepError("highest weight space of %r is not a line" % (lam,))
            self._simple[lam] = out
        return self._simple[lam]

    def simples(self):
        return {lam: self.simple(lam) for lam in self.labels()}

    def _pad(self, lam):
        return tuple(list(lam) + [0] * (self.n - len(lam)))

    def _check_label(self, lam):
        partitions.check_partition(lam)
        if partitions.size(lam) != self.d:
            raise DimensionMismatch("partition %r has size != %d" % (lam, self.d))
        if len(lam) > self.n:
            raise ContextTooSmall(
                "partition %r needs %d rows, context has %d" % (lam, len(lam), self.n))

    # -- filtrations ----------------------------------------------------------

    def head_mults(self, m: PolyRep) -> dict:
        out = {}
        for lam in self.labels():
            h = hom_dim(m, self.simple(lam))
            if h:
                out[lam] = h
        return out

    def socle_mults(self, m: PolyRep) -> dict:
        out = {}
        for lam in self.labels():
            h = hom_dim(self.simple(lam), m)
            if h:
                out[lam] = h
        return out

    def radical_basis(self, m: PolyRep) -> np.ndarray:
        """Common kernel of all maps onto simples."""
        stack = []
        for lam in self.labels():
            for phi in hom_basis(m, self.simple(lam)):
                stack.append(phi)
        if not stack:
            return np.eye(m.dim, dtype=np.int64)
        return gf.kernel_basis(np.concatenate(stack, axis=0) % self.p, self.p)

    def socle_basis(self, m: PolyRep) -> np.ndarray:
        cols = [np.zeros((m.dim, 0), dtype=np.int64)]
        for lam in self.labels():
            for phi in hom_basis(self.simple(lam), m):
                cols.append(phi % self.p)
        return gf.column_space(np.concatenate(cols, axis=1), self.p)

    def socle_series(self, m: PolyRep) -> list:
        """Ascending filtration; entry k is the multiset of simple labels
        in the k-th socle layer, as a dict."""
        p = self.p
        layers = []
        cur_sub = np.zeros((m.dim, 0), dtype=np.int64)
        while cur_sub.shape[1] < m.dim:
            quo = quotient_rep(m, cur_sub, key_mask=_nokeys(m))
            soc = self.socle_basis(quo)
            if soc.shape[1] == 0:
                raise PolyrepError("socle vanished before exhausting the module")
            layers.append(self.socle_mults(sub_rep(
                quo, soc, key_mask=_nokeys(quo))))
            lift = quo._section @ soc
            cur_sub = gf.column_space(
                np.concatenate([cur_sub, lift], axis=1), p)
        return layers

    def radical_series(self, m: PolyRep) -> list:
        """Descending filtration; entry k lists the simple factors of
        rad^k(m)/rad^{k+1}(m), as a dict."""
        layers = []
        cur = m
        while cur.dim:
            rad = self.radical_basis(cur)
            head = quotient_rep(cur, rad, key_mask=_nokeys(cur))
            layers.append(self.head_mults(head))
            if rad.shape[1] == 0:
                break
            cur = sub_rep(cur, rad, key_mask=_nokeys(cur))
        return layers

    def composition_factors(self, m: PolyRep) -> dict:
        """Multiplicities via the character: the simple characters are
        unitriangular with respect to dominance, so subtracting from the
        top weight down determines everything."""
        mults = {}
        labs = sorted(self.labels(), reverse=True)  # lex refines dominance
        wi = m.weight_index()
        for lam in labs:
            padded = self._pad(lam)
            have = len(wi.get(padded, ()))
            for mu, k in mults.items():
                have -= k * len(self.simple(mu).weight_space(padded))
            if have < 0:
                raise PolyrepError("negative multiplicity at %r" % (lam,))
            if have:
                mults[lam] = have
        total = sum(k * self.simple(lam).dim for lam, k in mults.items())
        if total != m.dim:
            raise PolyrepError(
                "composition factors cover %d of %d dimensions" % (total, m.dim))
        return mults

    def q_top(self) -> PolyRep:
        """Head of the degree-d symmetric power."""
        s = comodule.sym_power(self.ctx, self.d)
        rad = self.radical_basis(s)
        return quotient_rep(s, rad, name="Q[%d]" % self.d)


def _nokeys(m: PolyRep) -> np.ndarray:
    return np.zeros(m.nkeys, dtype=bool)


# -- isomorphism testing ---------------------------------------------------------


def iso_test(m: PolyRep, n_: PolyRep, seed: int = 0, tries: int = 200):
    """Equivariant isomorphism test.

    Returns (verdict, witness): verdict True with an invertible intertwiner,
    False when provably not isomorphic, None when the random search over a
    large map space was exhausted without a certificate.
    """
    if m.ctx != n_.ctx or m.degs != n_.degs or m.dim != n_.dim:
        return False, None
    if m.dim == 0:
        return True, np.zeros((0, 0), dtype=np.int64)
    wm, wn = m.weight_index(), n_.weight_index()
    if set(wm) != set(wn):
        return False, None
    for w in wm:
        if len(wm[w]) != len(wn[w]):
            return False, None
    basis = hom_basis(m, n_)
    if not basis:
        return False, None
    p = m.ctx.p
    for phi in basis:
        if gf.rank(phi, p) == m.dim:
            return True, phi
    h = len(basis)
    if p ** h <= 1 << 16:
        for coeffs in itertools.product(range(p), repeat=h):
            phi = sum(c * b for c, b in zip(coeffs, basis)) % p
            if gf.rank(phi, p) == m.dim:
                return True, phi
        return False, None
    rng = np.random.default_rng(seed)
    for _ in range(tries):
        coeffs = rng.integers(0, p, size=h)
        phi = np.zeros_like(basis[0])
        for c, b in zip(coeffs, basis):
            phi += int(c) * b
        phi %= p
        if gf.rank(phi, p) == m.dim:
            return True, phi
    return None, None

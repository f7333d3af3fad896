"""Projective covers by divided-power products, resolutions, Ext groups,
and the connectedness invariants.

The cover machinery rests on one identification: the product of divided
powers with column-content exponent matrix E is the algebra element xi_E
applied to the canonical generator, so the equivariant map determined by a
weight vector v sends that basis element to theta[E] @ v.  Covers,
differentials and Ext cochain maps are therefore assembled directly from
coefficient matrices; no linear solving happens past the head computation.
"""

from __future__ import annotations

import hashlib
import itertools
import os
import tempfile

import numpy as np

from . import comodule, gf, modkit, partitions
from .comodule import (
    PolyRep, direct_sum, dual, serialize, tensor, tensor_power, twist,
    zero_rep,
)
from .errors import (
    BudgetExceeded, ContextTooSmall, CoverFailure, PolyrepError,
)

MAX_STAGE_DIM = 60_000


# -- invariant values ---------------------------------------------------------


class InvariantValue:
    """Nonnegative integer, infinite, or a lower bound when the search cap
    was hit before a nonzero Ext group appeared."""

    __slots__ = ("kind", "k")

    def __init__(self, kind, k=None):
        if kind not in ("finite", "infinite", "at_least"):
            raise PolyrepError("bad invariant kind %r" % (kind,))
        self.kind = kind
        self.k = k

    @property
    def finite(self):
        return self.kind == "finite"

    def __eq__(self, other):
        if isinstance(other, InvariantValue):
            return self.kind == other.kind and self.k == other.k
        if isinstance(other, int) and not isinstance(other, bool):
            return self.kind == "finite" and self.k == other
        return NotImplemented

    def __hash__(self):
        return hash((self.kind, self.k))

    def __repr__(self):
        if self.kind == "finite":
            return str(self.k)
        if self.kind == "infinite":
            return "infinite"
        return ">=%d" % self.k

    def to_json(self):
        if self.kind == "finite":
            return {"kind": "finite", "value": self.k}
        if self.kind == "infinite":
            return {"kind": "infinite"}
        return {"kind": "at_least", "value": self.k}


INFINITE = InvariantValue("infinite")


def finite(k):
    return InvariantValue("finite", int(k))


def at_least(k):
    return InvariantValue("at_least", int(k))


# -- divided power products and their canonical bases -------------------------


def _pad(lam, n):
    return tuple(lam) + (0,) * (n - len(lam))


def _strip_trailing(lam):
    lam = tuple(int(x) for x in lam)
    while lam and lam[-1] == 0:
        lam = lam[:-1]
    return lam


def gamma_basis_keys(n: int, lam) -> list:
    """Exponent matrices (flat, row major) indexing the product basis of
    the divided-power product for lam: column i holds the content of the
    i-th factor's multiset, in the factor's own basis order."""
    factors = []
    for a in lam:
        factors.append([comodule._content(b, n)
                        for b in comodule._multisets(n, a)])
    out = []
    for combo in itertools.product(*factors):
        e = [0] * (n * n)
        for col, content in enumerate(combo):
            for row in range(n):
                e[row * n + col] = content[row]
        out.append(tuple(e))
    return out


def gamma_rep(ctx, lam) -> PolyRep:
    """Divided-power product for a composition.  Interior zeros are kept:
    the basis-key identification assigns letter i to factor i, so factor
    positions matter."""
    lam = tuple(int(x) for x in lam)
    while lam and lam[-1] == 0:
        lam = lam[:-1]
    key = (ctx.p, ctx.n, lam)
    rep = _GAMMA_CACHE.get(key)
    if rep is None:
        if not lam:
            rep = comodule.constant(ctx)
        else:
            rep = modkit._div_product_rep(ctx.p, ctx.n, lam)
        rep.name = "Gamma[%s]" % ",".join(str(x) for x in lam)
        _GAMMA_CACHE[key] = rep
    return rep


_GAMMA_CACHE = {}


class GammaProjective:
    """Direct sum of divided-power products, multiplicities expanded."""

    def __init__(self, ctx, shapes):
        self.ctx = ctx
        self.shapes = [_strip_trailing(s) for s in shapes]
        reps = [gamma_rep(ctx, s) for s in self.shapes]
        self.offsets = []
        pos = 0
        for r in reps:
            self.offsets.append(pos)
            pos += r.dim
        self.dim = pos
        self.block_dims = [r.dim for r in reps]
        self.basis_keys = [gamma_basis_keys(ctx.n, s) for s in self.shapes]
        if self.shapes:
            rep = reps[0]
            for r in reps[1:]:
                rep = direct_sum(rep, r)
        else:
            rep = None
        self.rep = rep  # None encodes the zero module

    def summand_mults(self) -> dict:
        out = {}
        for s in self.shapes:
            out[s] = out.get(s, 0) + 1
        return out

    def realized_dim(self) -> int:
        return self.dim


def _orbit_columns(amb: PolyRep, vec, keys):
    """Columns theta[E] @ vec for E in keys, via one coaction sweep.

    vec must be a weight vector whose weight matches the column sums of
    the keys: then every key acting nonzero on vec occurs in the list.
    """
    kid, krow, val = amb.coaction_on_vector(np.asarray(vec, dtype=np.int64))
    cols = np.zeros((amb.dim, len(keys)), dtype=np.int64)
    if kid.size == 0:
        return cols
    key_to_col = {e: j for j, e in enumerate(keys)}
    bounds = np.flatnonzero(np.r_[True, kid[1:] != kid[:-1], True])
    for a, b in zip(bounds[:-1], bounds[1:]):
        j = key_to_col.get(amb.key_tuple(int(kid[a])))
        if j is None:
            raise CoverFailure(
                "coaction key outside the product basis: weight mismatch")
        cols[krow[a:b], j] = val[a:b]
    return cols


def _cover_choice(module: PolyRep, ws, mode: str):
    """Pick cover shapes and generating vectors (unit indices in module
    coordinates).  Head mode: one divided-power product per head factor,
    aimed at a weight vector mapping onto that factor's highest-weight
    line.  All mode: one summand per basis vector."""
    p = module.ctx.p
    chosen = []  # (shape, module-coordinate vector)
    if mode == "all":
        for i in range(module.dim):
            # composition, not sorted: letter j goes with factor j
            shape = _strip_trailing(module.wt[i])
            v = np.zeros(module.dim, dtype=np.int64)
            v[i] = 1
            chosen.append((shape, v))
        return chosen
    if mode != "head":
        raise PolyrepError("unknown cover mode %r" % (mode,))
    for lam in ws.labels():
        simple = ws.simple(lam)
        homs = modkit.hom_basis(module, simple)
        if not homs:
            continue
        widx = module.weight_space(_pad(lam, module.ctx.n))
        hw = simple.weight_space(_pad(lam, module.ctx.n))
        if len(hw) != 1:
            raise CoverFailure("highest weight space of %r not a line" % (lam,))
        a = np.zeros((len(homs), len(widx)), dtype=np.int64)
        for i, phi in enumerate(homs):
            a[i] = phi[hw[0], widx]
        _, piv = gf.rref(a % p, p)
        if len(piv) != len(homs):
            raise CoverFailure(
                "head factors of %r not separated on the weight space" % (lam,))
        for j in piv:
            v = np.zeros(module.dim, dtype=np.int64)
            v[widx[j]] = 1
            chosen.append((tuple(lam), v))
    return chosen


def gamma_cover(m: PolyRep, ws=None, mode: str = "head"):
    """Projective cover by divided-power products: (P, surjection P -> m).

    The cover summands are indexed by the head of m (one per factor), and
    the surjection columns are coefficient-matrix orbits of the chosen
    weight vectors.  Surjectivity is asserted by rank.
    """
    ws = ws or _workspace_of(m)
    chosen = _cover_choice(m, ws, mode)
    proj = GammaProjective(m.ctx, [s for s, _ in chosen])
    cols = []
    for (shape, v), keys in zip(chosen, proj.basis_keys):
        cols.append(_orbit_columns(m, v, keys))
    mat = (np.concatenate(cols, axis=1) if cols
           else np.zeros((m.dim, 0), dtype=np.int64)) % m.ctx.p
    if gf.rank(mat, m.ctx.p) != m.dim:
        raise CoverFailure("cover does not surject (rank deficiency)")
    return proj, mat


def _workspace_of(m: PolyRep):
    if m.ctx.nvars != 1:
        raise PolyrepError("resolutions require a single-variable context")
    d = m.degs[0]
    if m.ctx.n < d:
        raise ContextTooSmall(
            "n=%d < degree %d: functor-level answers need n >= d"
            % (m.ctx.n, d))
    return modkit.workspace(m.ctx.p, m.ctx.n, d)


# -- resolutions ---------------------------------------------------------------


class Resolution:
    """Exact complex ... -> P_1 -> P_0 -> M -> 0 by divided-power products.

    Stage k holds the projective, the chosen syzygy vectors (coordinates in
    the previous term), and the differential matrix.  Exactness at each
    computed stage is certified by rank bookkeeping during construction.
    """

    def __init__(self, target: PolyRep, ws=None, mode: str = "head",
                 max_dim: int = MAX_STAGE_DIM):
        self.target = target
        self.ws = ws or _workspace_of(target)
        self.mode = mode
        self.max_dim = max_dim
        self.terms = []      # GammaProjective per stage
        self.diffs = []      # diffs[0]: P_0 -> M; diffs[k]: P_k -> P_{k-1}
        self._kernels = []   # kernel basis of diffs[k] in P_k coordinates

    def __len__(self):
        return len(self.terms)

    def extend(self, length: int):
        """Ensure stages 0..length exist."""
        while len(self.terms) <= length:
            self._step()
        return self

    def _step(self):
        p = self.target.ctx.p
        if not self.terms:
            proj, mat = gamma_cover(self.target, self.ws, self.mode)
            prev_rep = self.target
        else:
            prev = self.terms[-1]
            ker = self._kernels[-1]
            prev_rep = prev.rep
            if prev_rep is None or ker.shape[1] == 0:
                proj = GammaProjective(self.target.ctx, [])
                dim_prev = prev.dim
                mat = np.zeros((dim_prev, 0), dtype=np.int64)
                self.terms.append(proj)
                self.diffs.append(mat)
                self._kernels.append(np.zeros((0, 0), dtype=np.int64))
                return
            syz = comodule.sub_rep(prev_rep, ker,
                                   key_mask=np.zeros(prev_rep.nkeys, bool))
            chosen = _cover_choice(syz, self.ws, self.mode)
            proj = GammaProjective(self.target.ctx, [s for s, _ in chosen])
            if proj.dim > self.max_dim:
                raise BudgetExceeded(
                    "resolution stage dimension %d exceeds cap %d"
                    % (proj.dim, self.max_dim))
            emb = syz._embedding
            cols = []
            for (shape, v), keys in zip(chosen, proj.basis_keys):
                ambient = (emb @ v) % p
                cols.append(_orbit_columns(prev_rep, ambient, keys))
            mat = (np.concatenate(cols, axis=1) if cols
                   else np.zeros((prev_rep.dim, 0), dtype=np.int64)) % p
            if gf.rank(mat, p) != ker.shape[1]:
                raise CoverFailure("syzygy cover not surjective")
        self.terms.append(proj)
        self.diffs.append(mat)
        self._kernels.append(gf.kernel_basis(mat, p) if mat.size
                             else np.zeros((mat.shape[1], 0), dtype=np.int64))

    def term(self, k: int) -> GammaProjective:
        self.extend(k)
        return self.terms[k]

    def diff(self, k: int) -> np.ndarray:
        self.extend(k)
        return self.diffs[k]

    def exactness_report(self) -> list:
        """(stage, rank of incoming, kernel dim) triples; equal by
        construction, recomputed here as an independent check."""
        p = self.target.ctx.p
        out = []
        for k in range(1, len(self.terms)):
            kerdim = self.diffs[k - 1].shape[1] - gf.rank(self.diffs[k - 1], p)
            out.append((k, gf.rank(self.diffs[k], p), kerdim))
        return out


def resolution(m: PolyRep, length: int, ws=None, mode: str = "head",
               cache_dir=None, max_dim: int = MAX_STAGE_DIM) -> Resolution:
    """Resolution of m through stage `length`, disk-cached when a cache
    directory is supplied or POLYREP_CACHE is set."""
    cache_dir = cache_dir or os.environ.get("POLYREP_CACHE")
    if not cache_dir:
        return Resolution(m, ws=ws, mode=mode, max_dim=max_dim).extend(length)
    path = _cache_path(cache_dir, m, mode)
    res = Resolution(m, ws=ws, mode=mode, max_dim=max_dim)
    _load_stages(res, path)
    res.extend(length)
    _save_stages(res, path)
    return res


def _cache_path(cache_dir, m, mode):
    digest = hashlib.sha256(
        (serialize(m) + "|" + mode).encode()).hexdigest()[:20]
    return os.path.join(cache_dir, "res_%s.npz" % digest)


def _save_stages(res: Resolution, path):
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    arrays = {"nstages": np.array([len(res.terms)])}
    n = res.target.ctx.n
    for k, proj in enumerate(res.terms):
        shp = np.zeros((len(proj.shapes), n), dtype=np.int16)
        for i, s in enumerate(proj.shapes):
            shp[i, :len(s)] = s
        arrays["shapes_%d" % k] = shp
        arrays["diff_%d" % k] = res.diffs[k].astype(np.int64)
    fd, tmp = tempfile.mkstemp(dir=os.path.dirname(path) or ".",
                               suffix=".npz")
    os.close(fd)
    try:
        with open(tmp, "wb") as fh:
            np.savez_compressed(fh, **arrays)
        os.replace(tmp, path)
    finally:
        if os.path.exists(tmp):
            os.unlink(tmp)


def _load_stages(res: Resolution, path):
    if not os.path.exists(path):
        return
    p = res.target.ctx.p
    with np.load(path) as data:
        nst = int(data["nstages"][0])
        for k in range(nst):
            shapes = [tuple(int(x) for x in row if x)
                      for row in data["shapes_%d" % k]]
            proj = GammaProjective(res.target.ctx, shapes)
            mat = data["diff_%d" % k].astype(np.int64)
            res.terms.append(proj)
            res.diffs.append(mat)
            res._kernels.append(
                gf.kernel_basis(mat, p) if mat.size
                else np.zeros((mat.shape[1], 0), dtype=np.int64))


# -- Ext groups ----------------------------------------------------------------


def _cochain_index(proj: GammaProjective, n_: PolyRep):
    """Per-summand weight-space row indices of N and offsets into the
    cochain coordinate space Hom(P, N) = direct sum of N_lambda."""
    rows = []
    offsets = []
    pos = 0
    nn = n_.ctx.n
    for s in proj.shapes:
        widx = n_.weight_space(_pad(s, nn))
        rows.append(widx)
        offsets.append(pos)
        pos += len(widx)
    return rows, offsets, pos


def _cochain_map(res: Resolution, n_: PolyRep, k: int) -> np.ndarray:
    """Matrix of Hom(P_k, N) -> Hom(P_{k+1}, N), f -> f o d_{k+1}."""
    p = n_.ctx.p
    pk, pk1 = res.term(k), res.term(k + 1)
    rows_k, offs_k, dim_k = _cochain_index(pk, n_)
    rows_k1, offs_k1, dim_k1 = _cochain_index(pk1, n_)
    d = res.diff(k + 1)
    out = np.zeros((dim_k1, dim_k), dtype=np.int64)
    for t, keys_t in enumerate(pk1.basis_keys):
        # the canonical generator of summand t maps to column gen_col
        gen_col = _generator_column(pk1, t)
        v = d[:, gen_col]
        rt = rows_k1[t]
        if len(rt) == 0:
            continue
        for s in range(len(pk.shapes)):
            cs = rows_k[s]
            if len(cs) == 0:
                continue
            off = pk.offsets[s]
            coords = v[off:off + pk.block_dims[s]]
            nz = np.flatnonzero(coords % p)
            if len(nz) == 0:
                continue
            block = np.zeros((len(rt), len(cs)), dtype=np.int64)
            for i in nz:
                theta = n_.key_matrix_for(pk.basis_keys[s][int(i)])
                sub = theta[rt, :][:, cs].toarray()
                block += int(coords[i]) * sub.astype(np.int64)
            out[np.ix_(range(offs_k1[t], offs_k1[t] + len(rt)),
                       range(offs_k[s], offs_k[s] + len(cs)))] += block
    return out % p


def _generator_column(proj: GammaProjective, t: int) -> int:
    """Column index (inside the whole projective) of the canonical
    generator of summand t: letter i filling factor i."""
    n = proj.rep.ctx.n if proj.rep is not None else 0
    shape = proj.shapes[t]
    idx = 0
    for fi, a in enumerate(shape):
        basis = comodule._multisets(n, a)
        want = tuple([fi] * a)
        idx = idx * len(basis) + basis.index(want)
    return proj.offsets[t] + idx


def ext_dims(m: PolyRep, n_: PolyRep, kmax: int, res: Resolution = None,
             ws=None, mode: str = "head", cache_dir=None,
             max_dim: int = MAX_STAGE_DIM) -> list:
    """dim Ext^k(m, n_) for k = 0..kmax via a divided-power-product
    resolution of m."""
    p = m.ctx.p
    if m.ctx != n_.ctx:
        raise PolyrepError("context mismatch")
    if m.degs != n_.degs:
        return [0] * (kmax + 1)
    if res is None:
        res = resolution(m, kmax + 1, ws=ws, mode=mode, cache_dir=cache_dir,
                         max_dim=max_dim)
    else:
        res.extend(kmax + 1)
    dims = []
    maps = [_cochain_map(res, n_, k) for k in range(kmax + 1)]
    for k in range(kmax + 1):
        ck = maps[k].shape[1]
        rk = gf.rank(maps[k], p) if maps[k].size else 0
        rk_prev = (gf.rank(maps[k - 1], p) if k and maps[k - 1].size else 0)
        dims.append(ck - rk - rk_prev)
    return dims


def ext(m: PolyRep, n_: PolyRep, k: int, **kw) -> int:
    return ext_dims(m, n_, k, **kw)[k]


# -- detection objects and the invariants ---------------------------------------


def twisted_word(ctx, tup) -> PolyRep:
    """Tensor product over i of the d_i-th tensor power twisted i times."""
    out = None
    for i, di in enumerate(tup):
        if not di:
            continue
        factor = twist(tensor_power(ctx, di), i)
        out = factor if out is None else tensor(out, factor)
    if out is None:
        out = comodule.constant(ctx)
    out.name = "T^(%s)" % ",".join(str(x) for x in tup)
    return out


def big_t(ctx, d: int, r: int) -> PolyRep:
    """Direct sum of twisted tensor powers detecting non-bounded functors."""
    tups = partitions.twisted_tuples(d, ctx.p, r)
    if not tups:
        return zero_rep(ctx, (d,))
    out = twisted_word(ctx, tups[0])
    for tup in tups[1:]:
        out = direct_sum(out, twisted_word(ctx, tup))
    out.name = "T(%d,%d)" % (d, r)
    return out


def big_l(ctx, d: int, r: int, ws=None) -> PolyRep:
    """Direct sum of the non p^r-restricted simples of degree d."""
    ws = ws or modkit.workspace(ctx.p, ctx.n, d)
    labs = [lam for lam in ws.labels()
            if not partitions.is_restricted(lam, ctx.p, r)]
    if not labs:
        return zero_rep(ctx, (d,))
    out = ws.simple(labs[0])
    for lam in labs[1:]:
        out = direct_sum(out, ws.simple(lam))
    out.name = "L(%d,%d)" % (d, r)
    return out


def default_cap(d: int, p: int, r: int) -> int:
    return 2 * (p ** r - 1) + d


def _ext_search(src: PolyRep, tgt: PolyRep, cap: int, ws, mode, cache_dir,
                max_dim, res: Resolution = None) -> InvariantValue:
    """Least k <= cap with Ext^k(src, tgt) nonzero, resolving src only as
    far as the search needs.  A budget overrun reports the degree reached;
    a terminating resolution with nothing found reports infinite."""
    p = src.ctx.p
    cache_dir = cache_dir or os.environ.get("POLYREP_CACHE")
    path = None
    if res is None:
        res = Resolution(src, ws=ws, mode=mode, max_dim=max_dim)
        if cache_dir:
            path = _cache_path(cache_dir, src, mode)
            _load_stages(res, path)
    prev_rank = 0
    try:
        for k in range(cap + 1):
            try:
                res.extend(k + 1)
            except BudgetExceeded:
                return at_least(k)
            mk = _cochain_map(res, tgt, k)
            rk = gf.rank(mk, p) if mk.size else 0
            dim_k = mk.shape[1] - rk - prev_rank
            if dim_k:
                return finite(k)
            if res.terms[k + 1].dim == 0:
                # complex terminated with every group so far zero
                return INFINITE
            prev_rank = rk
        return at_least(cap + 1)
    finally:
        if path and res.terms:
            _save_stages(res, path)


def invariant_i(f: PolyRep, r: int, cap=None, target: str = "T", ws=None,
                mode: str = "head", cache_dir=None,
                max_dim: int = MAX_STAGE_DIM, res: Resolution = None
                ) -> InvariantValue:
    """Lowest k with Ext^k(T(d,r), F) nonzero; infinite when deg F < p^r.

    Pass `res`, a resolution of the matching detection module, to share
    work across several calls at one (d, r)."""
    if f.ctx.nvars != 1:
        raise PolyrepError("invariants require a single-variable context")
    p = f.ctx.p
    d = f.degs[0]
    if d < p ** r or f.dim == 0:
        return INFINITE
    ws = ws or _workspace_of(f)
    g = (res.target if res is not None
         else big_t(f.ctx, d, r) if target == "T"
         else big_l(f.ctx, d, r, ws))
    if g.dim == 0:
        return INFINITE
    if cap is None:
        cap = default_cap(d, p, r)
    return _ext_search(g, f, cap, ws, mode, cache_dir, max_dim, res=res)


def invariant_p(f: PolyRep, r: int, cap=None, target: str = "T", ws=None,
                mode: str = "head", cache_dir=None,
                max_dim: int = MAX_STAGE_DIM, res: Resolution = None
                ) -> InvariantValue:
    """Lowest k with Ext^k(F, T(d,r)) nonzero, computed through duality:
    the detection object is self-dual, so this equals invariant_i of the
    transpose dual."""
    return invariant_i(dual(f), r, cap=cap, target=target, ws=ws, mode=mode,
                       cache_dir=cache_dir, max_dim=max_dim, res=res)


def invariant_p_direct(f: PolyRep, r: int, cap=None, target: str = "T",
                       ws=None, mode: str = "head",
                       max_dim: int = MAX_STAGE_DIM) -> InvariantValue:
    """invariant_p from its definition (resolve F itself); cross-check."""
    if f.ctx.nvars != 1:
        raise PolyrepError("invariants require a single-variable context")
    p = f.ctx.p
    d = f.degs[0]
    if d < p ** r or f.dim == 0:
        return INFINITE
    ws = ws or _workspace_of(f)
    g = big_t(f.ctx, d, r) if target == "T" else big_l(f.ctx, d, r, ws)
    if g.dim == 0:
        return INFINITE
    if cap is None:
        cap = default_cap(d, p, r)
    return _ext_search(f, g, cap, ws, mode, None, max_dim)


def _dominance_key(lam):
    c, run = [], 0
    for x in lam:
        run += x
        c.append(run)
    return tuple(c)


def invariant_table(p: int, n: int, d: int, rs=(1, 2), cap=None,
                    cache_dir=None, max_dim: int = MAX_STAGE_DIM) -> dict:
    """Rows of the lowest-nonvanishing-Ext invariant over the standard and
    costandard modules of one degree: all standards in descending dominance
    order (the divided power first, the exterior power last), then the
    costandards back up (the symmetric power last).  One detection-module
    resolution is shared per row.
    """
    ws = modkit.workspace(p, n, d)
    labels = sorted(ws.labels(), key=_dominance_key, reverse=True)
    cols = []
    for lam in labels:
        name = "Div[%d]" % d if lam == (d,) else (
            "Wedge[%d]" % d if lam == (1,) * d else
            "W[%s]" % partitions.format_partition(lam))
        cols.append((name, ws.standard(lam)))
    for lam in reversed(labels):
        if lam == (1,) * d:
            continue
        name = "Sym[%d]" % d if lam == (d,) else (
            "C[%s]" % partitions.format_partition(lam))
        cols.append((name, ws.costandard(lam)))
    ctx = ws.ctx
    rows = {}
    for r in rs:
        t = big_t(ctx, d, r)
        res = Resolution(t, ws=ws, max_dim=max_dim)
        if cache_dir or os.environ.get("POLYREP_CACHE"):
            path = _cache_path(cache_dir or os.environ["POLYREP_CACHE"],
                               t, "head")
            _load_stages(res, path)
        rows[r] = [invariant_i(m, r, cap=cap, ws=ws, res=res)
                   for _, m in cols]
        if cache_dir or os.environ.get("POLYREP_CACHE"):
            _save_stages(res, path)
    return {"columns": [name for name, _ in cols], "rows": rows}


# -- multiplication / comultiplication maps ------------------------------------


def sym_merge(ctx, a: int, b: int) -> np.ndarray:
    """Multiplication S^a tensor S^b -> S^{a+b} in the monomial bases."""
    n = ctx.n
    mon_a = [comodule._content(x, n) for x in comodule._multisets(n, a)]
    mon_b = [comodule._content(x, n) for x in comodule._multisets(n, b)]
    mon_c = {comodule._content(x, n): i
             for i, x in enumerate(comodule._multisets(n, a + b))}
    out = np.zeros((len(mon_c), len(mon_a) * len(mon_b)), dtype=np.int64)
    for i, al in enumerate(mon_a):
        for j, be in enumerate(mon_b):
            tgt = tuple(x + y for x, y in zip(al, be))
            out[mon_c[tgt], i * len(mon_b) + j] = 1
    return out


def sym_split(ctx, a: int, b: int) -> np.ndarray:
    """Comultiplication S^{a+b} -> S^a tensor S^b (binomial coefficients)."""
    import math
    n = ctx.n
    mon_a = {comodule._content(x, n): i
             for i, x in enumerate(comodule._multisets(n, a))}
    mon_b = {comodule._content(x, n): i
             for i, x in enumerate(comodule._multisets(n, b))}
    mon_c = [comodule._content(x, n) for x in comodule._multisets(n, a + b)]
    nb = len(mon_b)
    out = np.zeros((len(mon_a) * nb, len(mon_c)), dtype=np.int64)
    for j, ga in enumerate(mon_c):
        for al, ia in mon_a.items():
            be = tuple(g - x for g, x in zip(ga, al))
            if any(x < 0 for x in be):
                continue
            coef = 1
            for g, x in zip(ga, al):
                coef *= math.comb(g, x)
            out[ia * nb + mon_b[be], j] = coef % ctx.p
    return out % ctx.p


def wedge_split(ctx, a: int, b: int) -> np.ndarray:
    """Comultiplication of the exterior algebra, degree (a, b) component."""
    n = ctx.n
    sub_a = {s: i for i, s in enumerate(itertools.combinations(range(n), a))}
    sub_b = {s: i for i, s in enumerate(itertools.combinations(range(n), b))}
    sub_c = list(itertools.combinations(range(n), a + b))
    nb = len(sub_b)
    out = np.zeros((len(sub_a) * nb, len(sub_c)), dtype=np.int64)
    for j, s in enumerate(sub_c):
        for left in itertools.combinations(s, a):
            right = tuple(x for x in s if x not in left)
            sign = modkit._sort_sign(list(left) + list(right))
            out[sub_a[left] * nb + sub_b[right], j] = sign % ctx.p
    return out


# -- verification suites --------------------------------------------------------


def _restricted_head(m: PolyRep, r: int, ws=None) -> bool:
    ws = ws or _workspace_of(m)
    return all(partitions.is_restricted(lam, m.ctx.p, r)
               for lam in ws.head_mults(m))


def _restricted_socle(m: PolyRep, r: int, ws=None) -> bool:
    ws = ws or _workspace_of(m)
    return all(partitions.is_restricted(lam, m.ctx.p, r)
               for lam in ws.socle_mults(m))


def verify_cup_deg01(f: PolyRep, g: PolyRep, x: PolyRep, y: PolyRep, r: int,
                     with_ext1: bool = False, **kw) -> dict:
    """Degree 0 (and optionally 1) cup-product connectedness check.

    Builds the degree-0 map explicitly as f,g -> kron(f,g) (twisting does
    not change the matrix of g), verifies injectivity by rank, and checks
    the dimension identity expected under conditions C1/C2.
    """
    p = f.ctx.p
    hom_fg = modkit.hom_basis(f, g)
    hom_xy = modkit.hom_basis(x, y)
    fx = tensor(f, twist(x, r))
    gy = tensor(g, twist(y, r))
    big = modkit.hom_dim(fx, gy)
    vecs = []
    for a in hom_fg:
        for b in hom_xy:
            prod = np.kron(a, b) % p
            if not modkit.is_intertwiner(prod, fx, gy):
                raise PolyrepError("cup image is not equivariant")
            vecs.append(prod.reshape(-1))
    injective = True
    if vecs:
        injective = gf.rank(np.array(vecs).T % p, p) == len(vecs)
    # C1 says the target-side invariant is positive (socle of G all
    # restricted), C2 the source-side one (head of F all restricted)
    c1 = f.degs[0] <= g.degs[0] and _restricted_socle(g, r)
    c2 = f.degs[0] >= g.degs[0] and _restricted_head(f, r)
    product = len(hom_fg) * len(hom_xy)
    report = {
        "hom_fg": len(hom_fg), "hom_xy": len(hom_xy), "hom_big": big,
        "C1": c1, "C2": c2, "injective": injective,
        "equality_expected": c1 or c2, "equality": big == product,
        "passed": injective and big >= product and
                  (big == product or not (c1 or c2)),
    }
    if with_ext1:
        e_fg = ext(f, g, 1, **kw)
        e_xy = ext(x, y, 1, **kw)
        e_big = ext(fx, gy, 1, **kw)
        lower = len(hom_fg) * e_xy + e_fg * len(hom_xy)
        report.update({
            "ext1_fg": e_fg, "ext1_xy": e_xy, "ext1_big": e_big,
            "ext1_expected_equality": c1 and c2,
            "ext1_equality": e_big == lower,
            "ext1_lower_ok": e_big >= lower,
        })
        report["passed"] = (report["passed"] and report["ext1_lower_ok"] and
                            (report["ext1_equality"] or not (c1 and c2)))
    return report


def verify_connectedness(f, g, x, y, r: int, kmax: int, caps=None,
                         **kw) -> dict:
    """Graded cup-product check: Kunneth equality below the theorem's
    bound, inequality elsewhere."""
    df, dg = f.degs[0], g.degs[0]
    if df < dg:
        bound = invariant_i(g, r, cap=caps, **kw)
    elif df > dg:
        bound = invariant_p(f, r, cap=caps, **kw)
    else:
        bi = invariant_i(g, r, cap=caps, **kw)
        bp = invariant_p(f, r, cap=caps, **kw)
        if bi.kind == "infinite" or bp.kind == "infinite":
            bound = INFINITE
        elif bi.kind == "finite" and bp.kind == "finite":
            bound = finite(bi.k + bp.k)
        else:
            bound = at_least((bi.k or 0) + (bp.k or 0))
    ext_fg = ext_dims(f, g, kmax, **kw)
    # the twist changes Ext from degree 2 up, so the Kunneth factor must
    # be computed on the twisted pair
    ext_xy = ext_dims(twist(x, r), twist(y, r), kmax, **kw)
    fx = tensor(f, twist(x, r))
    gy = tensor(g, twist(y, r))
    ext_big = ext_dims(fx, gy, kmax, **kw)
    rows = []
    ok = True
    for k in range(kmax + 1):
        rhs = sum(ext_fg[a] * ext_xy[k - a] for a in range(k + 1))
        if bound.kind == "infinite":
            inside = True
        elif bound.kind == "finite":
            inside = k < bound.k
        else:
            inside = k < bound.k  # conservative: only known lower bound
        good = ext_big[k] == rhs if inside else ext_big[k] >= rhs
        ok = ok and good
        rows.append({"k": k, "lhs": ext_big[k], "rhs": rhs,
                     "inside_bound": inside, "ok": good})
    return {"bound": bound, "rows": rows, "passed": ok}


def verify_shift(lam, tup, ctx, window: int = 2, **kw) -> dict:
    """Graded shift between Ext into the costandard module and Ext into
    the standard module of the conjugate, against a twisted word."""
    p = ctx.p
    s = sum(d * (p ** i - 1) for i, d in enumerate(tup))
    d_total = sum(d * p ** i for i, d in enumerate(tup))
    ws = modkit.workspace(p, ctx.n, d_total)
    t = twisted_word(ctx, tup)
    nab = ws.costandard(tuple(lam))
    delta = ws.standard(partitions.conjugate(tuple(lam)))
    kmax = window + s
    res = resolution(t, kmax + 2, ws=ws, **kw)
    lhs = ext_dims(t, nab, window, res=res)
    rhs = ext_dims(t, delta, kmax, res=res)
    rows = []
    ok = True
    for k in range(window + 1):
        good = lhs[k] == rhs[k + s]
        ok = ok and good
        rows.append({"k": k, "ext_costd": lhs[k], "ext_std_shifted": rhs[k + s],
                     "ok": good})
    for j in range(min(s, kmax + 1)):
        good = rhs[j] == 0
        ok = ok and good
    return {"shift": s, "rows": rows, "low_degrees_vanish":
            all(rhs[j] == 0 for j in range(min(s, kmax + 1))), "passed": ok}


def verify_ses(ctx) -> dict:
    """The three degree-4 exact sequences at p=2, built from the stated
    multiplication/comultiplication composites and checked by ranks."""
    p = ctx.p
    n = ctx.n
    if p != 2 or n < 4:
        raise PolyrepError("sequence check needs p=2 and n >= 4")
    ws = modkit.workspace(p, n, 4)
    report = {}

    # 1: wedge-4 -> wedge-3 x wedge-1 -> costandard (2,1,1), exact
    nab211 = ws.costandard((2, 1, 1))
    split = wedge_split(ctx, 3, 1)           # Lambda^4 -> Lambda^3 (x) Lambda^1
    cmap = modkit.costandard_map(p, n, (2, 1, 1))
    ker = gf.kernel_basis(cmap, p)
    img = gf.column_space(split, p)
    report["seq1"] = (gf.rank(split, p) == comodule.wedge_power(ctx, 4).dim
                      and gf.spaces_equal(ker, img, p)
                      and gf.rank(cmap, p) == nab211.dim)

    # 2: costandard (3,1) = kernel of the multiplication S^3 (x) S^1 -> S^4
    nab31 = ws.costandard((3, 1))
    mult31 = sym_merge(ctx, 3, 1)
    ker = gf.kernel_basis(mult31, p)
    report["seq2"] = (gf.rank(mult31, p) == comodule.sym_power(ctx, 4).dim
                      and gf.spaces_equal(ker, nab31._embedding, p))

    # 3: costandard (2,2) = kernel of (phi, mult): S^2 (x) S^2 ->
    #    costandard(3,1) + S^4, with phi = (merge (x) 1) o (1 (x) split)
    nab22 = ws.costandard((2, 2))
    s2 = comodule.sym_power(ctx, 2)
    split11 = sym_split(ctx, 1, 1)
    one_split = np.kron(np.eye(s2.dim, dtype=np.int64), split11)
    merge21 = sym_merge(ctx, 2, 1)
    nvars = ctx.n
    merge_one = np.kron(merge21, np.eye(nvars, dtype=np.int64))
    phi = (merge_one @ one_split) % p
    mult22 = sym_merge(ctx, 2, 2)
    into_31 = gf.matmul(sym_merge(ctx, 3, 1), phi, p)
    stacked = np.concatenate([phi, mult22], axis=0) % p
    ker = gf.kernel_basis(stacked, p)
    phi_in_nab31 = gf.Echelon(nab31._embedding, p).coords(phi) is not None
    report["seq3"] = (not into_31.any()
                      and phi_in_nab31
                      and gf.spaces_equal(ker, nab22._embedding, p)
                      and gf.rank(stacked, p) == nab31.dim +
                      comodule.sym_power(ctx, 4).dim)
    report["passed"] = all(report[k] for k in ("seq1", "seq2", "seq3"))
    return report

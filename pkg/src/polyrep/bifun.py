"""Two-variable comodules: exterior products, sum and diagonal
substitution, and the twist-collapse construction.

The structural checks here compare socle filtrations, submodule
lattices, and layer diagrams of a tensor product with a twisted factor
against the predictions transported from the two-variable side.
"""

from __future__ import annotations

import itertools

import numpy as np

from . import comodule, gf, homology, modkit, partitions
from .comodule import Ctx, PolyRep, ctx1, dual, twist
from .errors import (
    BudgetExceeded, ContextMismatch, NotRestricted, PolyrepError,
)

BOX_ENTRY_CAP = 30_000_000
LATTICE_VECTOR_CAP = 2 ** 12


def bi_ctx(p: int, n: int, m: int) -> Ctx:
    return Ctx(p, (n, m))


def _nokeys(m: PolyRep) -> np.ndarray:
    return np.zeros(m.nkeys, dtype=bool)


def _ws_of(m: PolyRep):
    return modkit.workspace(m.ctx.p, m.ctx.n, m.degs[0])


# -- constructions -----------------------------------------------------------


def boxtimes(a: PolyRep, b: PolyRep, name="") -> PolyRep:
    """Exterior product: a two-variable comodule on the product basis,
    with coefficient matrices the pairwise tensor products."""
    if a.ctx.nvars != 1 or b.ctx.nvars != 1:
        raise ContextMismatch("exterior products take single-variable factors")
    if a.ctx.p != b.ctx.p:
        raise ContextMismatch("characteristics differ")
    if not (a.keys_complete and b.keys_complete):
        raise PolyrepError("exterior product needs complete key data")
    ctx = bi_ctx(a.ctx.p, a.ctx.n, b.ctx.n)
    dim = a.dim * b.dim
    wt = np.concatenate(
        [np.repeat(a.wt, b.dim, axis=0), np.tile(b.wt, (a.dim, 1))], axis=1)
    na, nb = a.nnz, b.nnz
    if na * nb > BOX_ENTRY_CAP:
        raise BudgetExceeded("exterior product needs %d entry products"
                             % (na * nb))
    ia = np.repeat(np.arange(na, dtype=np.int64), nb)
    ib = np.tile(np.arange(nb, dtype=np.int64), na)
    ktab = np.concatenate([a.ktab[a.kid[ia]], b.ktab[b.kid[ib]]], axis=1)
    krow = a.krow[ia] * b.dim + b.krow[ib]
    kcol = a.kcol[ia] * b.dim + b.kcol[ib]
    kval = (a.kval[ia] * b.kval[ib]) % ctx.p
    kid = np.arange(ktab.shape[0], dtype=np.int64)
    nm = name or "%s[x]%s" % (a.name or "?", b.name or "?")
    return PolyRep(ctx, (a.degs[0], b.degs[0]), dim, wt, ktab,
                   kid, krow, kcol, kval, name=nm)


def phi(b: PolyRep, r: int) -> PolyRep:
    """Collapse the second variable onto a twist of the first: the value
    of the bifunctor on the pair (V, V-twisted)."""
    if b.ctx.nvars != 2:
        raise ContextMismatch("collapse takes a two-variable comodule")
    n, m = b.ctx.dims
    if n != m:
        raise ContextMismatch("variable sizes differ: %d vs %d" % (n, m))
    p = b.ctx.p
    q = p ** r
    e1 = b.ktab[:, : n * n].astype(np.int64)
    e2 = b.ktab[:, n * n:].astype(np.int64)
    ktab = e1 + q * e2
    if ktab.size and ktab.max() > np.iinfo(np.int16).max:
        raise PolyrepError("collapsed exponents overflow storage")
    wt = b.wt[:, :n].astype(np.int64) + q * b.wt[:, n:]
    deg = b.degs[0] + q * b.degs[1]
    out = PolyRep(ctx1(p, n), (deg,), b.dim, wt, ktab,
                  b.kid, b.krow, b.kcol, b.kval,
                  name="Phi%d(%s)" % (r, b.name or "?"),
                  keys_complete=b.keys_complete)
    return out


def delta(b: PolyRep) -> PolyRep:
    """Diagonal evaluation: both variables on the same space."""
    return phi(b, 0)


def boxplus(f: PolyRep, n: int, m: int, bidegree=None):
    """Substitute a block-diagonal pair into a functor on a space of
    dimension n+m.  Returns the dict of bidegree components, or a single
    component when a bidegree is requested."""
    if f.ctx.nvars != 1 or f.ctx.n != n + m:
        raise ContextMismatch("source must live on dimension %d" % (n + m))
    if not f.keys_complete:
        raise PolyrepError("block substitution needs complete key data")
    p = f.ctx.p
    big = n + m
    ctx = bi_ctx(p, n, m)
    # rows sort into components by how their weight splits across blocks
    rsplit = [(int(f.wt[i, :n].sum()), int(f.wt[i, n:].sum()))
              for i in range(f.dim)]
    comps = {}
    for i, s in enumerate(rsplit):
        comps.setdefault(s, []).append(i)
    # keys survive when supported on the two diagonal blocks
    keymat = f.ktab.reshape(f.nkeys, big, big)
    top = keymat[:, :n, :n].reshape(f.nkeys, -1)
    bot = keymat[:, n:, n:].reshape(f.nkeys, -1)
    deg1 = top.sum(axis=1)
    mixed = keymat.sum(axis=(1, 2)) - deg1 - bot.sum(axis=1)
    keep = mixed == 0
    out = {}
    for (d1, d2), rows in sorted(comps.items()):
        rowmap = np.full(f.dim, -1, dtype=np.int64)
        rowmap[rows] = np.arange(len(rows))
        kkeep = keep & (deg1 == d1)
        sel = kkeep[f.kid] & (rowmap[f.krow] >= 0) & (rowmap[f.kcol] >= 0)
        wt = np.concatenate([f.wt[rows, :n], f.wt[rows, n:]], axis=1)
        ktab = np.concatenate([top, bot], axis=1)
        out[(d1, d2)] = PolyRep(
            ctx, (d1, d2), len(rows), wt, ktab[kkeep],
            np.cumsum(kkeep)[f.kid[sel]] - 1, rowmap[f.krow[sel]],
            rowmap[f.kcol[sel]], f.kval[sel],
            name="%s[+](%d,%d)" % (f.name or "?", d1, d2))
    if bidegree is None:
        return out
    bidegree = tuple(int(x) for x in bidegree)
    got = out.get(bidegree)
    if got is None:
        return comodule.zero_rep(ctx, bidegree)
    return got


# -- simple pairs, socles, radicals ------------------------------------------


_PAIR_CACHE = {}


def simple_pairs(b: PolyRep) -> list:
    """All simple two-variable comodules at b's context and bidegree,
    as (label pair, comodule)."""
    p = b.ctx.p
    n, m = b.ctx.dims
    d, e = b.degs
    tag = (p, n, m, d, e)
    got = _PAIR_CACHE.get(tag)
    if got is None:
        wsa = modkit.workspace(p, n, d)
        wsb = modkit.workspace(p, m, e)
        got = []
        for lam in wsa.labels():
            la = wsa.simple(lam)
            if la.dim == 0:
                continue
            for mu in wsb.labels():
                lb = wsb.simple(mu)
                if lb.dim == 0:
                    continue
                got.append(((lam, mu), boxtimes(la, lb)))
        _PAIR_CACHE[tag] = got
    return got


def socle_basis_bi(b: PolyRep) -> np.ndarray:
    """Largest semisimple part: the sum of the images of every map from
    a simple pair."""
    cols = [np.zeros((b.dim, 0), dtype=np.int64)]
    for _, lrep in simple_pairs(b):
        for f in modkit.hom_basis(lrep, b):
            cols.append(f % b.ctx.p)
    return gf.column_space(np.concatenate(cols, axis=1), b.ctx.p)


def radical_basis_bi(b: PolyRep) -> np.ndarray:
    """Common kernel of every map onto a simple pair."""
    stack = []
    for _, lrep in simple_pairs(b):
        stack.extend(modkit.hom_basis(b, lrep))
    if not stack:
        return np.eye(b.dim, dtype=np.int64)
    return gf.kernel_basis(np.concatenate(stack, axis=0) % b.ctx.p, b.ctx.p)


def head_bi(b: PolyRep) -> PolyRep:
    return comodule.quotient_rep(b, radical_basis_bi(b), key_mask=_nokeys(b))


def socle_mults_bi(b: PolyRep) -> dict:
    out = {}
    for pair, lrep in simple_pairs(b):
        h = len(modkit.hom_basis(lrep, b))
        if h:
            out[pair] = h
    return out


def is_simple_bi(b: PolyRep) -> bool:
    if b.dim == 0:
        return False
    if socle_basis_bi(b).shape[1] != b.dim:
        return False
    return sum(socle_mults_bi(b).values()) == 1


def socle_flag_bi(b: PolyRep) -> list:
    """Ascending socle filtration as echelon bases in ambient coordinates."""
    return _socle_flag_generic(b, socle_basis_bi)


def socle_flag(m: PolyRep, ws=None) -> list:
    """One-variable version of the ascending socle filtration."""
    ws = ws or _ws_of(m)
    return _socle_flag_generic(m, ws.socle_basis)


def _socle_flag_generic(m: PolyRep, soc_of) -> list:
    p = m.ctx.p
    cur = np.zeros((m.dim, 0), dtype=np.int64)
    flags = []
    while cur.shape[1] < m.dim:
        quo = comodule.quotient_rep(m, cur, key_mask=_nokeys(m))
        soc = soc_of(quo)
        if soc.shape[1] == 0:
            raise PolyrepError("socle vanished before exhausting the module")
        lift = (quo._section @ soc) % p
        cur = gf.column_space(np.concatenate([cur, lift], axis=1), p)
        flags.append(cur)
    return flags


# -- submodule enumeration ----------------------------------------------------


def module_closure(m: PolyRep, cols) -> np.ndarray:
    """Smallest stable subspace containing the given columns."""
    p = m.ctx.p
    basis = gf.column_space(np.asarray(cols, dtype=np.int64) % p, p)
    gens = [g.toarray() % p for g in m.gens().values()]
    while True:
        block = [basis] + [(g @ basis) % p for g in gens]
        new = gf.column_space(np.concatenate(block, axis=1), p)
        if new.shape[1] == basis.shape[1]:
            return new
        basis = new


def submodule_lattice(m: PolyRep, cap: int = LATTICE_VECTOR_CAP) -> list:
    """Every submodule, as echelon bases sorted by dimension: cyclic
    closures of all vectors, then closure under sums."""
    p = m.ctx.p
    if m.dim == 0:
        return [np.zeros((0, 0), dtype=np.int64)]
    if p ** m.dim > cap:
        raise BudgetExceeded(
            "lattice scan over %d^%d vectors exceeds the cap" % (p, m.dim))
    seen = {}

    def _note(basis):
        tag = (tuple(gf.Echelon(basis, p).pivots), basis.tobytes())
        if tag not in seen:
            seen[tag] = basis
            return True
        return False

    _note(np.zeros((m.dim, 0), dtype=np.int64))
    for vec in itertools.product(range(p), repeat=m.dim):
        v = np.array(vec, dtype=np.int64)
        nz = np.flatnonzero(v)
        if nz.size == 0 or v[nz[0]] != 1:
            continue  # one representative per scalar line
        _note(module_closure(m, v[:, None]))
    while True:
        fresh = []
        items = list(seen.values())
        for a, b in itertools.combinations(items, 2):
            s = gf.column_space(np.concatenate([a, b], axis=1), p)
            tag = (tuple(gf.Echelon(s, p).pivots), s.tobytes())
            if tag not in seen:
                fresh.append((tag, s))
        if not fresh:
            break
        for tag, s in fresh:
            seen.setdefault(tag, s)
    return sorted(seen.values(), key=lambda x: (x.shape[1], x.tobytes()))


# -- layer diagrams -----------------------------------------------------------


def _radical_flag(m: PolyRep, ws) -> list:
    """Descending chain of subspace bases, ambient coordinates, ending
    with the zero space."""
    p = m.ctx.p
    chain = [np.eye(m.dim, dtype=np.int64)]
    cur = m
    emb = chain[0]
    while cur.dim:
        rad = ws.radical_basis(cur)
        if rad.shape[1] == 0:
            chain.append(np.zeros((m.dim, 0), dtype=np.int64))
            return chain
        sub = comodule.sub_rep(cur, rad, key_mask=_nokeys(cur))
        emb = (emb @ sub._embedding) % p
        chain.append(emb)
        cur = sub
    return chain


def alperin_diagram(m: PolyRep, ws=None) -> dict:
    """Layer diagram of a multiplicity-free module: vertices are the
    composition factors placed at their radical layer, edges go from a
    factor to the factors directly under it."""
    ws = ws or _ws_of(m)
    p = m.ctx.p
    mults = ws.composition_factors(m)
    if any(v > 1 for v in mults.values()):
        raise PolyrepError("layer diagram needs a multiplicity-free module")
    flag = _radical_flag(m, ws)
    nlay = len(flag) - 1
    layers = []
    edges = set()
    for k in range(nlay):
        ech = gf.Echelon(flag[k], p)
        subk = comodule.sub_rep(m, flag[k], key_mask=_nokeys(m)) \
            if flag[k].shape[1] < m.dim else m
        nxt = ech.coords(flag[k + 1])
        one = comodule.quotient_rep(subk, np.asarray(nxt) % p,
                                    key_mask=_nokeys(subk))
        layers.append(sorted(ws.composition_factors(one)))
    for k in range(nlay - 1):
        ech = gf.Echelon(flag[k], p)
        subk = comodule.sub_rep(m, flag[k], key_mask=_nokeys(m)) \
            if flag[k].shape[1] < m.dim else m
        below = np.asarray(ech.coords(flag[k + 2])) % p
        two = comodule.quotient_rep(subk, below, key_mask=_nokeys(subk))
        radu = ws.radical_basis(two)
        hq = comodule.quotient_rep(two, radu, key_mask=_nokeys(two))
        for lab in layers[k]:
            cols = [np.zeros((hq.dim, 0), dtype=np.int64)]
            for f in modkit.hom_basis(ws.simple(lab), hq):
                cols.append(f % p)
            part = gf.column_space(np.concatenate(cols, axis=1), p)
            lift = (hq._section @ part) % p
            w = module_closure(two, lift)
            wfac = ws.composition_factors(
                comodule.sub_rep(two, w, key_mask=_nokeys(two)))
            for tgt in wfac:
                if tgt != lab:
                    edges.add(((k, lab), (k + 1, tgt)))
    return {"layers": layers, "edges": edges}


def _merge_label(lam, mu, r: int, p: int) -> tuple:
    q = p ** r
    k = max(len(lam), len(mu))
    lam = tuple(lam) + (0,) * (k - len(lam))
    mu = tuple(mu) + (0,) * (k - len(mu))
    return tuple(a + q * b for a, b in zip(lam, mu) if a + q * b)


def product_diagram(da: dict, db: dict, r: int, p: int) -> dict:
    """Diagram predicted for a tensor product with a twisted factor:
    vertices are label pairs at added layers, edges move in one factor."""
    spots = {}
    for i, labs in enumerate(da["layers"]):
        for a in labs:
            for j, labs2 in enumerate(db["layers"]):
                for b in labs2:
                    spots[(a, b)] = i + j
    nlay = 1 + max(spots.values(), default=-1)
    layers = [[] for _ in range(nlay)]
    merged = [[] for _ in range(nlay)]
    for (a, b), k in sorted(spots.items()):
        layers[k].append((a, b))
        merged[k].append(_merge_label(a, b, r, p))
    edges = set()
    medges = set()
    for ((i, a), (i2, a2)) in da["edges"]:
        for (b, b2) in [(b, b) for labs in db["layers"] for b in labs]:
            k = spots[(a, b)]
            edges.add(((k, (a, b)), (k + 1, (a2, b2))))
            medges.add(((k, _merge_label(a, b, r, p)),
                        (k + 1, _merge_label(a2, b2, r, p))))
    for ((j, b), (j2, b2)) in db["edges"]:
        for a in (x for labs in da["layers"] for x in labs):
            k = spots[(a, b)]
            edges.add(((k, (a, b)), (k + 1, (a, b2))))
            medges.add(((k, _merge_label(a, b, r, p)),
                        (k + 1, _merge_label(a, b2, r, p))))
    return {"layers": [sorted(x) for x in merged],
            "pair_layers": [sorted(x) for x in layers],
            "edges": medges, "pair_edges": edges}


def diagram_dot(diag: dict, r: int) -> list:
    """DOT-style edge lines with product labels."""
    def _vx(pair):
        a, b = pair
        return "L(%s)⊗L(%s)^(%d)" % (",".join(map(str, a)),
                                          ",".join(map(str, b)), r)
    lines = []
    for (k1, u), (k2, v) in sorted(diag["pair_edges"]):
        lines.append("%s -> %s" % (_vx(u), _vx(v)))
    return lines


# -- degree-one bifunctor cohomology ------------------------------------------


def ext1_bi(m: PolyRep, x: PolyRep, n_: PolyRep, y: PolyRep,
            ws_m=None, ws_x=None) -> int:
    """dim of the degree-1 extension space between two exterior products,
    through a projective exterior cover and dimension shifting."""
    p = m.ctx.p
    a = boxtimes(m, x)
    b = boxtimes(n_, y)
    if a.degs != b.degs:
        return 0
    pm, am = homology.gamma_cover(m, ws_m or _ws_of(m), "head")
    px, ax = homology.gamma_cover(x, ws_x or _ws_of(x), "head")
    p0 = boxtimes(pm.rep, px.rep)
    aug = np.kron(am, ax) % p
    ker = gf.kernel_basis(aug, p)
    kmod = comodule.sub_rep(p0, ker, key_mask=_nokeys(p0))
    h_k = len(modkit.hom_basis(kmod, b))
    h_p = len(modkit.hom_basis(p0, b))
    h_a = len(modkit.hom_basis(a, b))
    return h_k - h_p + h_a


# -- structure verification ---------------------------------------------------


def verify_steinberg_type(f: PolyRep, g: PolyRep, r: int, ws=None,
                          hom_samples=None,
                          lattice_cap: int = LATTICE_VECTOR_CAP) -> dict:
    """Check that tensoring with a twisted factor transports structure
    from the two-variable side: hom dimensions, socle filtration,
    submodule lattice (on multiplicity-free instances within the cap),
    and the layer diagram."""
    comodule._check_same_ctx(f, g)
    p = f.ctx.p
    wsf = modkit.workspace(p, f.ctx.n, f.degs[0])
    wsg = modkit.workspace(p, g.ctx.n, g.degs[0])
    for lam in wsf.composition_factors(f):
        if not partitions.is_restricted(lam, p, r):
            raise NotRestricted("factor %r is not restricted" % (lam,))
    t = comodule.tensor(f, twist(g, r), keys="full")
    wst = modkit.workspace(p, t.ctx.n, t.degs[0])
    report = {"dim": t.dim}

    # (a) hom dimensions match across the correspondence
    pairs = hom_samples or [(f, g), (g, f), (f, f), (g, g)]
    homs = []
    for x, y in pairs:
        lhs = len(modkit.hom_basis(boxtimes(f, x), boxtimes(g, y)))
        rhs = len(modkit.hom_basis(comodule.tensor(f, twist(x, r)),
                                   comodule.tensor(g, twist(y, r))))
        homs.append({"bi": lhs, "tensor": rhs, "ok": lhs == rhs})
    report["hom_samples"] = homs

    # (b) socle filtration is the product filtration, layer by layer
    flag_f = socle_flag(f, wsf)
    flag_g = socle_flag(g, wsg)
    flag_t = socle_flag(t, wst)
    a_, b_ = len(flag_f), len(flag_g)
    soc_rows = []
    depth_ok = len(flag_t) == a_ + b_ - 1
    for k in range(1, a_ + b_):
        parts = []
        for i in range(1, k + 1):
            j = k + 1 - i
            if j < 1:
                continue
            parts.append(np.kron(flag_f[min(i, a_) - 1],
                                 flag_g[min(j, b_) - 1]))
        pred = gf.column_space(np.concatenate(parts, axis=1), p)
        have = flag_t[k - 1] if k - 1 < len(flag_t) else flag_t[-1]
        span_ok = gf.spaces_equal(pred, have, p)
        layer_ok = _socle_layer_iso(t, flag_t, k, flag_f, flag_g, f, g, r)
        soc_rows.append({"level": k, "span": span_ok, "layer": layer_ok})
    report["socle"] = {"depth": depth_ok, "levels": soc_rows}

    # (c) submodule lattice in the multiplicity-free range
    mults = wst.composition_factors(t)
    multfree = all(v == 1 for v in mults.values())
    if multfree and p ** t.dim <= lattice_cap and p ** g.dim <= lattice_cap:
        latt_t = submodule_lattice(t, cap=lattice_cap)
        latt_f = submodule_lattice(f, cap=lattice_cap)
        latt_g = submodule_lattice(g, cap=lattice_cap)
        prods = [np.kron(u, v) for u in latt_f for v in latt_g]
        decompose_ok = True
        for s in latt_t:
            inside = [q for q in prods
                      if q.shape[1] <= s.shape[1] and
                      gf.rank(np.concatenate([s, q], axis=1), p)
                      == s.shape[1]]
            got = gf.column_space(np.concatenate(
                [np.zeros((t.dim, 0), dtype=np.int64)] + inside, axis=1), p)
            if not gf.spaces_equal(got, s, p):
                decompose_ok = False
                break
        lat = {"count": len(latt_t), "sum_of_products": decompose_ok}
        fmults = wsf.composition_factors(f)
        if len(fmults) == 1 and all(v == 1 for v in fmults.values()):
            # simple left factor: submodules correspond to those of the
            # right factor, so the lattices are in bijection
            lat["left_simple_bijection"] = len(latt_t) == len(latt_g)
        report["lattice"] = lat
    else:
        report["lattice"] = {"skipped": "needs multiplicity-free within cap"}

    # (d) the layer diagram is the product diagram
    try:
        dt = alperin_diagram(t, wst)
        df = alperin_diagram(f, wsf)
        dg = alperin_diagram(g, wsg)
        pred = product_diagram(df, dg, r, p)
        diag_ok = (dt["layers"] == pred["layers"]
                   and dt["edges"] == pred["edges"])
        report["diagram"] = {"ok": diag_ok, "dot": diagram_dot(pred, r)}
    except PolyrepError as ex:
        report["diagram"] = {"skipped": str(ex)}

    report["passed"] = (all(h["ok"] for h in homs) and depth_ok
                        and all(x["span"] and x["layer"] for x in soc_rows)
                        and report["lattice"].get("sum_of_products", True)
                        and report["diagram"].get("ok", True))
    return report


def _socle_layer_iso(t, flag_t, k, flag_f, flag_g, f, g, r):
    p = t.ctx.p
    prev = flag_t[k - 2] if k >= 2 else np.zeros((t.dim, 0), dtype=np.int64)
    if k - 1 >= len(flag_t):
        return False
    quo = comodule.quotient_rep(t, prev, key_mask=_nokeys(t))
    above = np.asarray(quo._project(flag_t[k - 1])) % p
    actual = comodule.sub_rep(quo, gf.column_space(above, p),
                              key_mask=_nokeys(quo))
    pieces = []
    for i in range(1, k + 1):
        j = k + 1 - i
        if j < 1 or i > len(flag_f) or j > len(flag_g):
            continue
        lf = _flag_layer(f, flag_f, i)
        lg = _flag_layer(g, flag_g, j)
        if lf.dim and lg.dim:
            pieces.append(comodule.tensor(lf, twist(lg, r)))
    if not pieces:
        return actual.dim == 0
    pred = pieces[0]
    for extra in pieces[1:]:
        pred = comodule.direct_sum(pred, extra)
    if actual.dim != pred.dim:
        return False
    ok, _ = modkit.iso_test(actual, pred)
    return bool(ok)


def _flag_layer(m, flags, k):
    p = m.ctx.p
    prev = flags[k - 2] if k >= 2 else np.zeros((m.dim, 0), dtype=np.int64)
    quo = comodule.quotient_rep(m, prev, key_mask=_nokeys(m))
    above = np.asarray(quo._project(flags[k - 1])) % p
    return comodule.sub_rep(quo, gf.column_space(above, p),
                            key_mask=_nokeys(quo))


def verify_appendixA(samples) -> dict:
    """Product structure of exterior products: socle and head identities,
    the product socle filtration, and hom/degree-1 counts multiplying."""
    rows = []
    for m, x, n_, y in samples:
        p = m.ctx.p
        bi_a = boxtimes(m, x)
        bi_b = boxtimes(n_, y)
        wsm, wsx = _ws_of(m), _ws_of(x)
        wsn, wsy = _ws_of(n_), _ws_of(y)
        row = {"pair": (bi_a.name, bi_b.name)}
        # socle product identity
        soc = socle_basis_bi(bi_a)
        pred = np.kron(wsm.socle_basis(m), wsx.socle_basis(x))
        row["socle"] = gf.spaces_equal(soc, pred, p)
        # head product identity; the factor heads keep full key data so
        # they can enter another exterior product
        hb = head_bi(bi_a)
        hm = comodule.quotient_rep(m, wsm.radical_basis(m))
        hx = comodule.quotient_rep(x, wsx.radical_basis(x))
        ok, _ = modkit.iso_test(hb, boxtimes(hm, hx))
        row["head"] = bool(ok)
        # full socle filtration is the product filtration
        ff, fx = socle_flag(m, wsm), socle_flag(x, wsx)
        fbi = socle_flag_bi(bi_a)
        a_, b_ = len(ff), len(fx)
        lv = len(fbi) == a_ + b_ - 1
        for k in range(1, a_ + b_):
            parts = [np.kron(ff[min(i, a_) - 1], fx[min(k + 1 - i, b_) - 1])
                     for i in range(1, k + 1) if k + 1 - i >= 1]
            predk = gf.column_space(np.concatenate(parts, axis=1), p)
            havek = fbi[min(k, len(fbi)) - 1]
            lv = lv and gf.spaces_equal(predk, havek, p)
        row["socle_series"] = lv
        # hom and degree-1 counts multiply
        h_bi = len(modkit.hom_basis(bi_a, bi_b))
        h_mn = len(modkit.hom_basis(m, n_))
        h_xy = len(modkit.hom_basis(x, y))
        row["hom"] = h_bi == h_mn * h_xy
        e_bi = ext1_bi(m, x, n_, y, ws_m=wsm, ws_x=wsx)
        e_mn = homology.ext_dims(m, n_, 1, ws=wsm)[1]
        e_xy = homology.ext_dims(x, y, 1, ws=wsx)[1]
        row["kunneth1"] = e_bi == e_mn * h_xy + h_mn * e_xy
        row["counts"] = {"hom_bi": h_bi, "ext1_bi": e_bi,
                         "hom": (h_mn, h_xy), "ext1": (e_mn, e_xy)}
        rows.append(row)
    passed = all(r["socle"] and r["head"] and r["socle_series"]
                 and r["hom"] and r["kunneth1"] for r in rows)
    return {"rows": rows, "passed": passed}

"""Constructor and operation checks against classical matrix actions.

Every constructor is compared with an independently computed group action:
words act by Kronecker powers, exterior powers by minors, symmetric powers
by polynomial substitution, divided powers by orbit sums inside the word
module.  Evaluation rho(g) = sum coeff[E] g^E is computed straight from
the definition.
"""

import itertools
import math

import numpy as np
import pytest

from polyrep import comodule, gf
from polyrep.comodule import (
    Ctx, ctx1, constant, natural, tensor_power, sym_power, div_power,
    wedge_power, tensor, dual, twist, direct_sum, sub_rep, quotient_rep,
    serialize, deserialize,
)
from polyrep.errors import (
    BudgetExceeded, DimensionMismatch, FormatError, NotStable, PolyrepError,
)


def rho(m, g):
    """Evaluate the representation at a matrix, straight from the keys."""
    p = m.ctx.p
    g = np.asarray(g, dtype=np.int64) % p
    out = np.zeros((m.dim, m.dim), dtype=np.int64)
    for k in range(m.nkeys):
        key = m.ktab[k]
        val = 1
        pos = 0
        for t, n in enumerate(m.ctx.dims):
            for i in range(n):
                for j in range(n):
                    e = int(key[pos])
                    pos += 1
                    if e:
                        val = (val * pow(int(g[i, j]), e, p)) % p
        if val:
            out = out + val * m.key_matrix(k).toarray()
    return out % p


def random_matrix(rng, n, p):
    return rng.integers(0, p, size=(n, n))


# -- dimensions and validation ------------------------------------------


@pytest.mark.parametrize("p", [2, 3, 5])
@pytest.mark.parametrize("n", [1, 2, 3])
@pytest.mark.parametrize("a", [1, 2, 3])
def test_dims(p, n, a):
    c = ctx1(p, n)
    assert sym_power(c, a).dim == math.comb(n + a - 1, a)
    assert div_power(c, a).dim == math.comb(n + a - 1, a)
    assert tensor_power(c, a).dim == n ** a
    if a <= n:
        assert wedge_power(c, a).dim == math.comb(n, a)


@pytest.mark.parametrize("p", [2, 3])
def test_validation_full(p):
    c3 = ctx1(p, 3)
    c2 = ctx1(p, 2)
    for m in [natural(c3), sym_power(c3, 2), div_power(c3, 2),
              wedge_power(c3, 2), tensor_power(c3, 2), sym_power(c2, 3),
              div_power(c2, 3), wedge_power(c2, 2), tensor_power(c2, 3),
              constant(c2)]:
        m.check_coalgebra(full=True)


def test_validation_catches_bad_data():
    c = ctx1(2, 2)
    m = natural(c)
    bad = comodule.PolyRep(c, (1,), 2, m.wt, m.ktab, m.kid, m.krow, m.kcol,
                           np.zeros_like(m.kval))
    with pytest.raises(NotStable):
        bad.check_counit()
    # entry at the wrong weight
    bad2 = comodule.PolyRep(c, (1,), 2, m.wt, m.ktab, m.kid,
                            1 - m.krow, m.kcol, m.kval)
    with pytest.raises(NotStable):
        bad2.check_weights()


def test_wedge_too_big():
    with pytest.raises(DimensionMismatch):
        wedge_power(ctx1(2, 2), 3)


def test_ctx_checks():
    with pytest.raises(PolyrepError):
        Ctx(4, (2,))
    with pytest.raises(PolyrepError):
        Ctx(2, (0,))


# -- constructor oracles --------------------------------------------------


@pytest.mark.parametrize("p,n,a", [(2, 2, 2), (3, 2, 3), (5, 3, 2), (2, 3, 3)])
def test_tensor_power_is_kron(p, n, a):
    rng = np.random.default_rng(3)
    m = tensor_power(ctx1(p, n), a)
    for _ in range(4):
        g = random_matrix(rng, n, p)
        want = np.ones((1, 1), dtype=np.int64)
        for _i in range(a):
            want = np.kron(want, g)
        assert np.array_equal(rho(m, g), want % p)


@pytest.mark.parametrize("p,n,a", [(3, 2, 2), (5, 3, 2), (2, 4, 3), (7, 3, 3)])
def test_wedge_is_minors(p, n, a):
    rng = np.random.default_rng(4)
    m = wedge_power(ctx1(p, n), a)
    subsets = list(itertools.combinations(range(n), a))
    for _ in range(4):
        g = random_matrix(rng, n, p)
        want = np.zeros((len(subsets), len(subsets)), dtype=np.int64)
        for bi, rows in enumerate(subsets):
            for bj, cols in enumerate(subsets):
                sub = g[np.ix_(rows, cols)].astype(np.int64)
                want[bi, bj] = round(np.linalg.det(sub)) % p
        got = rho(m, g)
        assert np.array_equal(got, want)


def _poly_mul(f1, f2, p):
    out = {}
    for e1, c1 in f1.items():
        for e2, c2 in f2.items():
            e = tuple(x + y for x, y in zip(e1, e2))
            out[e] = (out.get(e, 0) + c1 * c2) % p
    return {e: c for e, c in out.items() if c}


@pytest.mark.parametrize("p,n,a", [(2, 2, 2), (3, 2, 3), (5, 3, 2), (2, 3, 4)])
def test_sym_is_substitution(p, n, a):
    """Substitute x_i -> sum_j g_ji x_j into each monomial and expand."""
    rng = np.random.default_rng(5)
    m = sym_power(ctx1(p, n), a)
    basis = list(itertools.combinations_with_replacement(range(n), a))

    def content(word):
        c = [0] * n
        for x in word:
            c[x] += 1
        return tuple(c)

    index = {content(b): i for i, b in enumerate(basis)}
    for _ in range(3):
        g = random_matrix(rng, n, p)
        want = np.zeros((len(basis), len(basis)), dtype=np.int64)
        for bj, word in enumerate(basis):
            expand = {tuple([0] * n): 1}
            for letter in word:
                lin = {}
                for j in range(n):
                    if g[j, letter] % p:
                        e = [0] * n
                        e[j] = 1
                        lin[tuple(e)] = int(g[j, letter]) % p
                expand = _poly_mul(expand, lin, p)
            for e, cval in expand.items():
                want[index[e], bj] = cval
        assert np.array_equal(rho(m, g), want)


@pytest.mark.parametrize("p,n,a", [(2, 2, 2), (3, 2, 3), (2, 3, 3), (5, 2, 4)])
def test_div_is_orbit_sums(p, n, a):
    """Divided powers match the orbit-sum invariants of the word module:
    iota . rho_div(g) == rho_words(g) . iota for the 0/1 content matrix."""
    rng = np.random.default_rng(6)
    dv = div_power(ctx1(p, n), a)
    tp = tensor_power(ctx1(p, n), a)
    basis = list(itertools.combinations_with_replacement(range(n), a))
    words = list(itertools.product(range(n), repeat=a))

    def content(word):
        c = [0] * n
        for x in word:
            c[x] += 1
        return tuple(c)

    iota = np.zeros((len(words), len(basis)), dtype=np.int64)
    for wi, w in enumerate(words):
        for bi, b in enumerate(basis):
            if content(w) == content(b):
                iota[wi, bi] = 1
    for _ in range(3):
        g = random_matrix(rng, n, p)
        lhs = (iota @ rho(dv, g)) % p
        rhs = (rho(tp, g) @ iota) % p
        assert np.array_equal(lhs, rhs)


def test_div_is_dual_of_sym():
    for p, n, a in [(2, 2, 2), (3, 3, 2), (2, 2, 4)]:
        dv = div_power(ctx1(p, n), a)
        ds = dual(sym_power(ctx1(p, n), a))
        assert np.array_equal(dv.ktab, ds.ktab)
        assert np.array_equal(dv.kid, ds.kid)
        assert np.array_equal(dv.krow, ds.krow)
        assert np.array_equal(dv.kcol, ds.kcol)
        assert np.array_equal(dv.kval, ds.kval)


def test_natural_is_identity_action():
    rng = np.random.default_rng(8)
    m = natural(ctx1(5, 3))
    for _ in range(3):
        g = random_matrix(rng, 3, 5)
        assert np.array_equal(rho(m, g), g % 5)


# -- operations ------------------------------------------------------------


def test_tensor_is_kron():
    rng = np.random.default_rng(9)
    c = ctx1(3, 3)
    a = sym_power(c, 2)
    b = wedge_power(c, 2)
    t = tensor(a, b)
    assert t.degs == (4,)
    t.check_coalgebra(full=False)
    for _ in range(3):
        g = random_matrix(rng, 3, 3)
        assert np.array_equal(rho(t, g), np.kron(rho(a, g), rho(b, g)) % 3)


def test_dual_transposes_inverse_like():
    # over the monoid: rho_dual(g) = rho(g transpose) transposed
    rng = np.random.default_rng(10)
    c = ctx1(5, 2)
    m = sym_power(c, 3)
    dm = dual(m)
    for _ in range(4):
        g = random_matrix(rng, 2, 5)
        assert np.array_equal(rho(dm, g), rho(m, g.T).T % 5)


def test_twist_is_frobenius():
    rng = np.random.default_rng(11)
    for p, r in [(2, 1), (3, 1), (2, 2)]:
        c = ctx1(p, 2)
        m = sym_power(c, 2)
        tw = twist(m, r)
        assert tw.degs == (2 * p ** r,)
        q = p ** r
        for _ in range(3):
            g = random_matrix(rng, 2, p)
            gfrob = np.vectorize(lambda x: pow(int(x), q, p))(g)
            assert np.array_equal(rho(tw, g), rho(m, gfrob))
        tw.check_coalgebra(full=False)


def test_twist_zero_and_negative():
    m = natural(ctx1(2, 2))
    assert twist(m, 0) is m
    with pytest.raises(PolyrepError):
        twist(m, -1)


def test_direct_sum_blocks():
    rng = np.random.default_rng(12)
    c = ctx1(3, 2)
    a = sym_power(c, 2)
    b = tensor_power(c, 2)
    s = direct_sum(a, b)
    assert s.dim == a.dim + b.dim
    g = random_matrix(rng, 2, 3)
    got = rho(s, g)
    assert np.array_equal(got[: a.dim, : a.dim], rho(a, g))
    assert np.array_equal(got[a.dim :, a.dim :], rho(b, g))
    assert not got[: a.dim, a.dim :].any()


def test_weight_index():
    m = sym_power(ctx1(2, 2), 3)
    wi = m.weight_index()
    assert set(wi) == {(3, 0), (2, 1), (1, 2), (0, 3)}
    assert all(len(v) == 1 for v in wi.values())
    tp = tensor_power(ctx1(2, 2), 2)
    assert len(tp.weight_space((1, 1))) == 2
    assert len(tp.weight_space((5, 0))) == 0


# -- generator extraction ----------------------------------------------------


@pytest.mark.parametrize("p,n,a,kind", [
    (7, 2, 3, "sym"), (7, 3, 2, "wedge"), (5, 2, 4, "div"), (7, 2, 2, "pow"),
])
def test_gens_match_unipotent_action(p, n, a, kind):
    """rho(I + t E_{i,i+1}) must equal sum_m t^m X_{i,m}; with p > a the
    powers of t separate the divided powers."""
    make = {"sym": sym_power, "wedge": wedge_power, "div": div_power,
            "pow": tensor_power}[kind]
    m = make(ctx1(p, n), a)
    gens = m.gens()
    for i in range(n - 1):
        for (cell, kindlab) in [((i, i + 1), "E"), ((i + 1, i), "F")]:
            for t in range(p):
                g = np.eye(n, dtype=np.int64)
                g[cell] = t
                want = np.eye(m.dim, dtype=np.int64)
                for mm in range(1, a + 1):
                    lab = (0, kindlab, i, mm)
                    if lab in gens:
                        want = want + pow(t, mm, p) * gens[lab].toarray()
                assert np.array_equal(rho(m, g), want % p)


def test_gen_labels_cover():
    m = sym_power(ctx1(2, 3), 2)
    labels = m.gen_labels()
    assert (0, "E", 0, 1) in labels and (0, "F", 1, 2) in labels
    assert len(labels) == 2 * 2 * 2  # two rows pairs? n=3 -> 2 simple roots


def test_gen_shift():
    c = ctx1(2, 3)
    s = comodule.PolyRep.gen_shift((0, "E", 0, 2), c)
    assert list(s) == [2, -2, 0]
    s = comodule.PolyRep.gen_shift((0, "F", 1, 1), c)
    assert list(s) == [0, -1, 1]


# -- coaction on vectors ------------------------------------------------------


def test_coaction_on_vector():
    m = sym_power(ctx1(3, 2), 2)
    v = np.zeros(m.dim, dtype=np.int64)
    v[0] = 1  # x_0^2
    kid, krow, val = m.coaction_on_vector(v)
    # every key with column at index 0 shows up once
    want = {(m.key_tuple(int(k)), int(r)): int(x) for k, r, x in zip(kid, krow, val)}
    for k in range(m.nkeys):
        mat = m.key_matrix(k).toarray()
        col = mat[:, 0] % 3
        for r in np.flatnonzero(col):
            assert want[(m.key_tuple(k), int(r))] == col[r]


# -- subquotients --------------------------------------------------------------


def test_sub_quotient_frobenius_kernel():
    # inside Sym^2 over F_2 the squares span a stable line pair
    c = ctx1(2, 2)
    m = sym_power(c, 2)
    wi = m.weight_index()
    i20 = wi[(2, 0)][0]
    i02 = wi[(0, 2)][0]
    basis = np.zeros((3, 2), dtype=np.int64)
    basis[i20, 0] = 1
    basis[i02, 1] = 1
    sub = sub_rep(m, basis)
    sub.check_coalgebra(full=True)
    tw = twist(natural(c), 1)
    assert np.array_equal(sub.ktab, tw.ktab)
    assert np.array_equal(sub.kval, tw.kval)
    quo = quotient_rep(m, basis)
    assert quo.dim == 1
    quo.check_coalgebra(full=True)
    # the quotient is the weight (1,1) line: a twisted determinant-like line
    assert quo.weight_of(0) == (1, 1)


def test_sub_rejects_unstable():
    m = sym_power(ctx1(3, 2), 2)
    basis = np.zeros((3, 1), dtype=np.int64)
    basis[m.weight_index()[(2, 0)][0], 0] = 1  # x^2 alone is not stable at p=3
    with pytest.raises(NotStable):
        sub_rep(m, basis)


def test_sub_rejects_mixed_weights():
    m = sym_power(ctx1(2, 2), 2)
    basis = np.ones((3, 1), dtype=np.int64)
    with pytest.raises(NotStable):
        sub_rep(m, basis)


# -- serialization --------------------------------------------------------------


def test_serialize_roundtrip():
    for m in [sym_power(ctx1(2, 2), 2), wedge_power(ctx1(3, 3), 2),
              tensor(sym_power(ctx1(3, 2), 1), wedge_power(ctx1(3, 2), 2)),
              comodule.zero_rep(ctx1(2, 2), (3,))]:
        text = serialize(m)
        m2 = deserialize(text)
        assert m2.dim == m.dim and m2.degs == m.degs
        assert np.array_equal(m2.ktab, m.ktab)
        assert np.array_equal(m2.kid, m.kid)
        assert np.array_equal(m2.krow, m.krow)
        assert np.array_equal(m2.kcol, m.kcol)
        assert np.array_equal(m2.kval, m.kval)
        assert np.array_equal(m2.wt, m.wt)
        assert serialize(m2) == text


def test_serialize_sorted_lines():
    m = tensor_power(ctx1(2, 2), 2)
    lines = serialize(m).splitlines()
    erecs = [ln for ln in lines if ln.startswith("E=")]
    assert erecs == sorted(erecs, key=lambda ln: (
        [int(x) for x in ln.split()[0][2:].split(",")],
        int(ln.split()[1][2:]), int(ln.split()[2][2:])))


def test_deserialize_errors():
    with pytest.raises(FormatError):
        deserialize("")
    with pytest.raises(FormatError):
        deserialize("NOPE v1 p=2 n=2 d=1 dim=2")
    good = serialize(natural(ctx1(2, 2)))
    with pytest.raises(FormatError):
        deserialize(good.replace("E=0,1,0,0", "E=0,1,0"))
    with pytest.raises(FormatError):
        deserialize(good + "E=9,0,0,0 r=0 c=0 v=1\n")
    with pytest.raises(FormatError):
        deserialize(good + "junk\n")
    # missing weight line
    lines = [ln for ln in good.splitlines() if not ln.startswith("w 1")]
    with pytest.raises(FormatError):
        deserialize("\n".join(lines))


def test_tensor_budget_guard():
    c = ctx1(2, 2)
    a = tensor_power(c, 2)
    old = comodule.TENSOR_ENTRY_CAP
    comodule.TENSOR_ENTRY_CAP = 10
    try:
        with pytest.raises(BudgetExceeded):
            tensor(a, a, keys="full")
        lazy = tensor(a, a)  # auto falls back to generators only
        assert not lazy.keys_complete
    finally:
        comodule.TENSOR_ENTRY_CAP = old

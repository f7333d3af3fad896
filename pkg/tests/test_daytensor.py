import numpy as np
import pytest

from polyrep import comodule, daytensor, gf, homology, modkit, symbridge
from polyrep.comodule import ctx1, dual, twist
from polyrep.errors import (
    BudgetExceeded, DegreeMismatch, HeadNotRestricted, OddCharRequired,
)


def _iso(a, b):
    ok, _ = modkit.iso_test(a, b)
    return ok


# -- presentations -----------------------------------------------------------


def test_presentation_bookkeeping():
    for p, n, d, build in [
        (2, 2, 2, lambda c: comodule.sym_power(c, 2)),
        (2, 2, 2, lambda c: comodule.wedge_power(c, 2)),
        (3, 3, 3, lambda c: comodule.sym_power(c, 3)),
    ]:
        ctx = ctx1(p, n)
        pres = daytensor.present(build(ctx), ws=modkit.workspace(p, n, d))
        assert pres.module.dim == pres.p0.dim - gf.rank(pres.d1, p)


def test_presentation_reevaluation_small():
    # re-evaluating at the original rank, then at a larger one, matches
    # the known dimensions of the symmetric and exterior squares
    ctx = ctx1(2, 2)
    ws = modkit.workspace(2, 2, 2)
    for build, dim4 in [(comodule.sym_power, 10), (comodule.wedge_power, 6)]:
        pres = daytensor.present(build(ctx, 2), ws=ws)
        assert pres.evaluate(2).dim == pres.module.dim
        big = pres.evaluate(4)
        assert big.dim == dim4
        big.check_coalgebra()


def test_presentation_projective_case():
    # a projective module presents itself with no relations
    ctx = ctx1(2, 2)
    pres = daytensor.present(homology.gamma_rep(ctx, (2,)),
                             ws=modkit.workspace(2, 2, 2))
    assert pres.p1.shapes == []
    assert pres.evaluate(4).dim == homology.gamma_rep(ctx1(2, 4), (2,)).dim


# -- closed formulas ---------------------------------------------------------


def test_tensorpower_wedge_multiplicity_one():
    ctx = ctx1(2, 2)
    r = daytensor.internal_with_tensorpower(comodule.wedge_power(ctx, 2))
    assert r.dim == 4  # n^2 times a one-dimensional multiplicity space


def test_tensorpower_regular_multiplicity():
    ctx = ctx1(2, 2)
    r = daytensor.internal_with_tensorpower(comodule.tensor_power(ctx, 2))
    assert r.dim == 8  # n^d * d!


def test_tensorpower_kills_twists():
    ctx = ctx1(2, 2)
    r = daytensor.internal_with_tensorpower(twist(comodule.natural(ctx), 1))
    assert r.dim == 0


def test_tensorpower_degree_three():
    ctx = ctx1(3, 3)
    r = daytensor.internal_with_tensorpower(comodule.sym_power(ctx, 3))
    assert r.dim == 27


def test_wedge_formula_needs_odd_characteristic():
    ctx = ctx1(2, 2)
    with pytest.raises(OddCharRequired):
        daytensor.internal_with_wedge(comodule.wedge_power(ctx, 2))


def test_q_formula_needs_restricted_head():
    ctx = ctx1(2, 2)
    with pytest.raises(HeadNotRestricted):
        daytensor.internal_with_Q(twist(comodule.natural(ctx), 1))


def test_wedge_squared_is_symmetric_power():
    ctx = ctx1(3, 3)
    w3 = comodule.wedge_power(ctx, 3)
    assert _iso(daytensor.internal_with_wedge(w3), comodule.sym_power(ctx, 3))


def test_q_with_wedge_is_wedge():
    ctx = ctx1(3, 3)
    ws = modkit.workspace(3, 3, 3)
    w3 = comodule.wedge_power(ctx, 3)
    assert _iso(daytensor.internal_with_Q(w3, ws=ws), w3)


def test_wedge_and_q_swap_through_mullineux():
    # product with the exterior power matches the product of the
    # partner simple with the truncated symmetric power
    p, d = 3, 3
    ws = modkit.workspace(p, d, d)
    for mu in [(1, 1, 1), (2, 1)]:
        lhs = daytensor.internal_with_wedge(ws.simple(mu))
        rhs = daytensor.internal_with_Q(ws.simple(symbridge.mullineux(mu, p)),
                                        ws=ws)
        assert _iso(lhs, rhs), mu


# -- the general evaluator ---------------------------------------------------


def test_general_unit_degree_two():
    ctx = ctx1(2, 2)
    ws = modkit.workspace(2, 2, 2)
    gam2 = homology.gamma_rep(ctx, (2,))
    for other in [comodule.sym_power(ctx, 2), comodule.wedge_power(ctx, 2)]:
        r = daytensor.internal_general(gam2, other, ws=ws)
        assert _iso(r, other)
    # the unit is not absorbed into the wrong side
    s2 = comodule.sym_power(ctx, 2)
    assert not _iso(daytensor.internal_general(gam2, s2, ws=ws), gam2)


def test_general_unit_degree_three():
    ctx = ctx1(3, 3)
    ws = modkit.workspace(3, 3, 3)
    r = daytensor.internal_general(homology.gamma_rep(ctx, (3,)),
                                   comodule.sym_power(ctx, 3), ws=ws)
    assert _iso(r, comodule.sym_power(ctx, 3))


def test_general_simple_times_twist_vanishes():
    # mismatched p-adic levels force the zero module
    ws = modkit.workspace(2, 2, 2)
    r = daytensor.internal_general(ws.simple((1, 1)), ws.simple((2,)), ws=ws)
    assert r.dim == 0


def test_general_restricted_simples_nonzero():
    ws = modkit.workspace(2, 2, 2)
    r = daytensor.internal_general(ws.simple((1, 1)), ws.simple((1, 1)), ws=ws)
    assert r.dim > 0


def test_general_degree_mismatch_is_zero():
    ctx = ctx1(2, 3)
    r = daytensor.internal_general(comodule.wedge_power(ctx, 2),
                                   comodule.sym_power(ctx, 3))
    assert r.dim == 0 and r.degs == (2,)


def test_general_zero_argument():
    ctx = ctx1(2, 2)
    z = comodule.zero_rep(ctx, (2,))
    assert daytensor.internal_general(z, comodule.sym_power(ctx, 2)).dim == 0


def test_general_degree_cap():
    ctx = ctx1(2, 5)
    w5 = comodule.wedge_power(ctx, 5)
    with pytest.raises(BudgetExceeded):
        daytensor.internal_general(w5, w5)


def test_general_key_budget_blocks_degree_four():
    # rank-16 re-evaluation would need a hundred-million-key table
    ctx = ctx1(2, 4)
    s4 = comodule.sym_power(ctx, 4)
    with pytest.raises(BudgetExceeded):
        daytensor.internal_general(s4, s4)


def test_general_agrees_with_tensorpower_formula():
    ctx = ctx1(2, 2)
    ws = modkit.workspace(2, 2, 2)
    w2 = comodule.wedge_power(ctx, 2)
    t2 = comodule.tensor_power(ctx, 2)
    assert _iso(daytensor.internal_general(w2, t2, ws=ws),
                daytensor.internal_with_tensorpower(w2))


def test_general_agrees_with_wedge_formula():
    ctx = ctx1(3, 3)
    ws = modkit.workspace(3, 3, 3)
    w3 = comodule.wedge_power(ctx, 3)
    s3 = comodule.sym_power(ctx, 3)
    got = daytensor.internal_general(w3, w3, ws=ws)
    assert _iso(got, daytensor.internal_with_wedge(w3))
    assert _iso(got, s3)


def test_general_agrees_with_q_formula():
    ws = modkit.workspace(3, 3, 3)
    ctx = ws.ctx
    w3 = comodule.wedge_power(ctx, 3)
    got = daytensor.internal_general(w3, ws.q_top(), ws=ws)
    assert _iso(got, daytensor.internal_with_Q(w3, ws=ws))
    assert _iso(got, w3)


def test_general_symmetric():
    ctx = ctx1(2, 2)
    ws = modkit.workspace(2, 2, 2)
    w2, s2 = comodule.wedge_power(ctx, 2), comodule.sym_power(ctx, 2)
    assert _iso(daytensor.internal_general(w2, s2, ws=ws),
                daytensor.internal_general(s2, w2, ws=ws))


def test_general_kronecker_image():
    # the bridge functor turns the internal product into the pointwise one
    cases = [
        (2, 2, lambda c: comodule.wedge_power(c, 2),
         lambda c: comodule.sym_power(c, 2)),
        (3, 3, lambda c: comodule.sym_power(c, 3),
         lambda c: comodule.wedge_power(c, 3)),
    ]
    for p, d, fa, fb in cases:
        ctx = ctx1(p, d)
        ws = modkit.workspace(p, d, d)
        a, b = fa(ctx), fb(ctx)
        got = symbridge.schur_functor(
            daytensor.internal_general(a, b, ws=ws))
        want = symbridge.kronecker(symbridge.schur_functor(a),
                                   symbridge.schur_functor(b))
        ok, _ = symbridge.sym_iso_test(got, want)
        assert ok


def test_general_twisted_pair_splits():
    # equal-degree twisted arguments factor into plain and twisted parts
    ctx = ctx1(2, 3)
    ws = modkit.workspace(2, 3, 3)
    nat = comodule.natural(ctx)
    ft = comodule.tensor(nat, twist(nat, 1), keys="full")
    got = daytensor.internal_general(ft, ft, ws=ws)
    assert _iso(got, ft)


def test_general_twisted_degree_mismatch_vanishes():
    # same total degree, different underlying degrees, bounded right side
    ctx = ctx1(2, 3)
    ws = modkit.workspace(2, 3, 3)
    ft = comodule.tensor(comodule.natural(ctx), twist(comodule.natural(ctx), 1),
                         keys="full")
    assert daytensor.internal_general(ft, comodule.sym_power(ctx, 3),
                                      ws=ws).dim == 0


def test_general_result_is_valid_comodule():
    ws = modkit.workspace(3, 3, 3)
    r = daytensor.internal_general(ws.simple((2, 1)), ws.simple((2, 1)), ws=ws)
    assert r.dim == 10
    r.check_coalgebra()
    fu = symbridge.schur_functor(r)
    ok, _ = symbridge.sym_iso_test(fu, symbridge.trivial_rep(3, 3))
    assert ok


# -- level splitting ---------------------------------------------------------


def test_stein_internal_square_of_column():
    rep = daytensor.verify_stein_internal((2,), (2,), 2)
    assert rep["match"] and rep["passed"]
    assert rep["direct_dim"] == 2 and rep["predicted_dim"] == 2
    # the product is the twisted identity functor
    ws = modkit.workspace(2, 2, 2)
    got = daytensor.internal_general(ws.simple((2,)), ws.simple((2,)), ws=ws)
    assert _iso(got, twist(comodule.natural(ctx1(2, 2)), 1))


def test_stein_internal_mismatch_vanishes():
    rep = daytensor.verify_stein_internal((1, 1), (2,), 2)
    assert not rep["match"]
    assert rep["direct_dim"] == 0 and rep["passed"]


def test_stein_internal_restricted_pair():
    rep = daytensor.verify_stein_internal((2, 1), (2, 1), 3)
    assert rep["match"] and rep["passed"] and rep["direct_dim"] > 0


def test_stein_internal_rejects_unequal_sizes():
    with pytest.raises(DegreeMismatch):
        daytensor.verify_stein_internal((2,), (1,), 2)

"""Resolutions by divided-power products, Ext groups, invariants.

Anchor values: the Frobenius-twist Ext computations of Friedlander-Suslin
type (a single class in degree p^r - 1 for the top exterior power case),
the closed forms for the three power families, and the nine-column
invariant table at p=2, degree 4.
"""

import numpy as np
import pytest

from polyrep import comodule, gf, homology, modkit
from polyrep.comodule import ctx1, dual, tensor, tensor_power, twist
from polyrep.errors import BudgetExceeded, ContextTooSmall


def _euler(res):
    total = 0
    for k, t in enumerate(res.terms):
        total += t.dim if k % 2 == 0 else -t.dim
    return total


# -- product basis and covers ---------------------------------------------------


def test_gamma_basis_keys_are_content_matrices():
    n = 3
    lam = (2, 1)
    keys = homology.gamma_basis_keys(n, lam)
    rep = homology.gamma_rep(ctx1(2, n), lam)
    assert len(keys) == rep.dim
    assert len(set(keys)) == len(keys)
    for e in keys:
        mat = np.array(e).reshape(n, n)
        assert tuple(mat.sum(axis=0)) == (2, 1, 0)


def test_gamma_basis_count():
    # number of 3x3 matrices with column sums (1, 1, 1) is 27
    assert len(homology.gamma_basis_keys(3, (1, 1, 1))) == 27


def test_gamma_cover_surjects_and_intertwines():
    for p, n, build in [(2, 2, lambda c: comodule.sym_power(c, 2)),
                        (3, 3, lambda c: comodule.sym_power(c, 3)),
                        (2, 3, lambda c: tensor_power(c, 2)),
                        (2, 2, lambda c: comodule.wedge_power(c, 2))]:
        m = build(ctx1(p, n))
        proj, mat = homology.gamma_cover(m)
        assert gf.rank(mat, p) == m.dim
        assert modkit.is_intertwiner(mat, proj.rep, m)


def test_gamma_cover_all_mode_intertwines():
    m = comodule.sym_power(ctx1(2, 3), 2)
    proj, mat = homology.gamma_cover(m, mode="all")
    assert proj.dim == sum(homology.gamma_rep(m.ctx, s).dim
                           for s in proj.shapes)
    assert gf.rank(mat, 2) == m.dim
    assert modkit.is_intertwiner(mat, proj.rep, m)


def test_cover_of_projective_word_is_iso():
    # the tensor square at p=2 has simple head, so its cover is itself
    c = ctx1(2, 2)
    t2 = tensor_power(c, 2)
    proj, mat = homology.gamma_cover(t2)
    assert proj.shapes == [(1, 1)]
    assert proj.dim == t2.dim
    assert gf.rank(mat, 2) == t2.dim


# -- resolutions ----------------------------------------------------------------


def test_resolution_sym_square_p2():
    res = homology.Resolution(comodule.sym_power(ctx1(2, 2), 2)).extend(4)
    assert [t.dim for t in res.terms] == [4, 4, 3, 0, 0]
    assert res.terms[0].shapes == [(1, 1)]
    assert res.terms[2].shapes == [(2,)]
    assert _euler(res) == 3
    for _, rank_in, ker_dim in res.exactness_report():
        assert rank_in == ker_dim


def test_resolution_standard_p3():
    ws = modkit.workspace(3, 3, 3)
    res = homology.Resolution(ws.standard((2, 1)), ws=ws).extend(4)
    for _, rank_in, ker_dim in res.exactness_report():
        assert rank_in == ker_dim
    assert _euler(res) == ws.standard((2, 1)).dim


def test_resolution_of_twisted_natural_terminates():
    # I^(2) over the degree-4 context at p=2: projective dimension 6
    c = ctx1(2, 4)
    res = homology.Resolution(twist(comodule.natural(c), 2)).extend(7)
    assert [t.dim for t in res.terms] == [35, 100, 195, 336, 515, 340, 35, 0]
    assert _euler(res) == 4


def test_resolution_cache_roundtrip(tmp_path):
    c = ctx1(2, 2)
    m = comodule.sym_power(c, 2)
    res = homology.resolution(m, 3, cache_dir=str(tmp_path))
    files = list(tmp_path.iterdir())
    assert len(files) == 1
    res2 = homology.resolution(m, 3, cache_dir=str(tmp_path))
    assert [t.dim for t in res2.terms] == [t.dim for t in res.terms]
    for a, b in zip(res.diffs, res2.diffs):
        assert np.array_equal(a, b)
    # extending past the cached length keeps working
    res3 = homology.resolution(m, 5, cache_dir=str(tmp_path))
    assert len(res3.terms) == 6


def test_resolution_budget():
    c = ctx1(2, 4)
    with pytest.raises(BudgetExceeded):
        homology.Resolution(twist(comodule.natural(c), 2),
                            max_dim=200).extend(7)


def test_workspace_guard_small_n():
    with pytest.raises(ContextTooSmall):
        homology.Resolution(comodule.sym_power(ctx1(2, 2), 3))


# -- Ext groups -----------------------------------------------------------------


def test_ext_frobenius_kernel_anchor():
    # one class in degree 1: the extension of the twist by the exterior
    # square inside the symmetric square
    c = ctx1(2, 2)
    i1 = twist(comodule.natural(c), 1)
    assert homology.ext_dims(i1, comodule.wedge_power(c, 2), 3) == [0, 1, 0, 0]


def test_ext_twist_self():
    c = ctx1(2, 2)
    i1 = twist(comodule.natural(c), 1)
    assert homology.ext_dims(i1, i1, 4) == [1, 0, 1, 0, 0]


def test_ext0_matches_hom_dim():
    c = ctx1(2, 3)
    objs = [comodule.sym_power(c, 2), comodule.wedge_power(c, 2),
            comodule.div_power(c, 2), tensor_power(c, 2)]
    for m in objs:
        for n_ in objs:
            assert homology.ext(m, n_, 0) == modkit.hom_dim(m, n_)


def test_ext_mode_all_agrees():
    c = ctx1(2, 2)
    i1 = twist(comodule.natural(c), 1)
    w2 = comodule.wedge_power(c, 2)
    assert (homology.ext_dims(i1, w2, 3, mode="all")
            == homology.ext_dims(i1, w2, 3))


def test_simples_have_no_self_extensions():
    for p, n, d in [(2, 3, 3), (3, 3, 3)]:
        ws = modkit.workspace(p, n, d)
        for lam in ws.labels():
            simple = ws.simple(lam)
            assert homology.ext(simple, simple, 1, ws=ws) == 0


def test_ext_degree_mismatch_is_zero():
    c = ctx1(2, 3)
    assert homology.ext_dims(comodule.sym_power(c, 2),
                             comodule.sym_power(c, 3), 2) == [0, 0, 0]


# -- detection modules ----------------------------------------------------------


def test_big_t_components():
    c = ctx1(2, 4)
    t41 = homology.big_t(c, 4, 1)
    assert t41.dim == 4 ** 3 + 4 ** 2 + 4
    t42 = homology.big_t(c, 4, 2)
    assert t42.dim == 4
    verdict, _ = modkit.iso_test(t42, twist(comodule.natural(c), 2))
    assert verdict


def test_big_l_top_twist():
    # at p=2, degree 4, r=2 the only non-restricted simple is the twisted
    # natural module
    c = ctx1(2, 4)
    l42 = homology.big_l(c, 4, 2)
    verdict, _ = modkit.iso_test(l42, twist(comodule.natural(c), 2))
    assert verdict


def test_invariant_targets_agree():
    c = ctx1(2, 4)
    for m in [comodule.wedge_power(c, 4), comodule.sym_power(c, 4)]:
        assert (homology.invariant_i(m, 1, target="T")
                == homology.invariant_i(m, 1, target="L"))


# -- the invariants -------------------------------------------------------------


def test_closed_forms_fast_contexts():
    for p, d, r in [(2, 2, 1), (3, 3, 1), (2, 4, 1)]:
        c = ctx1(p, d)
        assert homology.invariant_i(comodule.sym_power(c, d), r) == 0
        assert homology.invariant_i(comodule.wedge_power(c, d), r) == p ** r - 1
        assert (homology.invariant_i(comodule.div_power(c, d), r)
                == 2 * (p ** r - 1))


def test_closed_forms_r2():
    # the slow context: forces the degree-7 resolution of the double twist
    c = ctx1(2, 4)
    assert homology.invariant_i(comodule.sym_power(c, 4), 2) == 0
    assert homology.invariant_i(comodule.wedge_power(c, 4), 2) == 3
    assert homology.invariant_i(comodule.div_power(c, 4), 2) == 6


def test_invariant_infinite_below_twist_degree():
    c = ctx1(2, 3)
    assert homology.invariant_i(comodule.natural(c), 1) == homology.INFINITE
    assert homology.invariant_i(comodule.sym_power(c, 2), 2).kind == "infinite"


def test_invariant_p_duality():
    c = ctx1(2, 4)
    ws = modkit.workspace(2, 4, 4)
    for m in [comodule.sym_power(c, 4), comodule.div_power(c, 4),
              ws.standard((3, 1)), ws.costandard((2, 2))]:
        direct = homology.invariant_p_direct(m, 1, ws=ws)
        assert direct == homology.invariant_p(m, 1, ws=ws)
        assert direct == homology.invariant_i(dual(m), 1, ws=ws)


def test_invariant_budget_reports_progress():
    c = ctx1(2, 4)
    v = homology.invariant_i(comodule.div_power(c, 4), 2, max_dim=150)
    assert v.kind == "at_least"
    assert v.k >= 1


def test_positivity_tracks_socle_and_head():
    # positive invariant exactly when the relevant extreme layer is
    # restricted: socle for the source-side invariant, head for the
    # target-side one
    from polyrep import partitions
    for p, n, d, r in [(2, 2, 2, 1), (2, 4, 4, 1), (3, 3, 3, 1)]:
        c = ctx1(p, n)
        ws = modkit.workspace(p, n, d)
        mods = [comodule.sym_power(c, d), comodule.wedge_power(c, d),
                comodule.div_power(c, d)]
        if d == 4:
            mods += [ws.standard((3, 1)), ws.costandard((3, 1))]
        for m in mods:
            soc_ok = all(partitions.is_restricted(l, p, r)
                         for l in ws.socle_mults(m))
            head_ok = all(partitions.is_restricted(l, p, r)
                          for l in ws.head_mults(m))
            i_val = homology.invariant_i(m, r, ws=ws)
            p_val = homology.invariant_p(m, r, ws=ws)
            assert (i_val == 0) == (not soc_ok)
            assert (p_val == 0) == (not head_ok)


def test_invariant_value_semantics():
    assert homology.finite(2) == 2
    assert homology.finite(2) != 3
    assert homology.finite(2) != homology.INFINITE
    assert homology.at_least(5).kind == "at_least"
    assert repr(homology.at_least(5)) == ">=5"
    assert repr(homology.INFINITE) == "infinite"
    assert homology.finite(1).to_json() == {"kind": "finite", "value": 1}


def test_invariant_table_degree_4():
    table = homology.invariant_table(2, 4, 4)
    assert table["columns"] == [
        "Div[4]", "W[3,1]", "W[2,2]", "W[2,1,1]", "Wedge[4]",
        "C[2,1,1]", "C[2,2]", "C[3,1]", "Sym[4]"]
    assert [v.k for v in table["rows"][1]] == [2, 2, 2, 1, 1, 1, 0, 0, 0]
    # the exterior-power entry is 3 = the closed form; the source table
    # prints 2 there, inconsistently with its own closed forms
    assert [v.k for v in table["rows"][2]] == [6, 5, 4, 4, 3, 2, 1, 1, 0]


# -- multiplication maps ---------------------------------------------------------


def test_merge_split_are_intertwiners():
    c = ctx1(2, 4)
    s2 = comodule.sym_power(c, 2)
    s3 = comodule.sym_power(c, 3)
    s4 = comodule.sym_power(c, 4)
    nat = comodule.natural(c)
    assert modkit.is_intertwiner(homology.sym_merge(c, 3, 1),
                                 tensor(s3, nat), s4)
    assert modkit.is_intertwiner(homology.sym_split(c, 1, 1),
                                 s2, tensor(nat, nat))
    assert modkit.is_intertwiner(
        homology.wedge_split(c, 3, 1),
        comodule.wedge_power(c, 4),
        tensor(comodule.wedge_power(c, 3), nat))


def test_sym_split_binomials_p3():
    c = ctx1(3, 2)
    mat = homology.sym_split(c, 1, 2)
    s3 = comodule.sym_power(c, 3)
    s1 = comodule.natural(c)
    s2 = comodule.sym_power(c, 2)
    assert modkit.is_intertwiner(mat, s3, tensor(s1, s2))
    # x^2 y -> 2 x (x) xy + 1 y (x) x^2 among the degree-1 (x) degree-2 terms
    dom = [comodule._content(w, 2) for w in comodule._multisets(2, 3)]
    j = dom.index((2, 1))
    col = mat[:, j]
    assert sorted(col[col != 0].tolist()) == [1, 2]


# -- verifier suites --------------------------------------------------------------


def test_verify_ses_p2():
    rep = homology.verify_ses(ctx1(2, 4))
    assert rep["passed"] and rep["seq1"] and rep["seq2"] and rep["seq3"]


def test_verify_ses_larger_n():
    rep = homology.verify_ses(ctx1(2, 5))
    assert rep["passed"]


def test_verify_shift_top_row():
    rep = homology.verify_shift((4,), (0, 0, 1), ctx1(2, 4))
    assert rep["shift"] == 3
    assert rep["passed"]
    assert rep["rows"][0]["ext_costd"] == 1
    assert rep["low_degrees_vanish"]


def test_verify_shift_square():
    rep = homology.verify_shift((2, 2), (2, 1), ctx1(2, 4))
    assert rep["shift"] == 1
    assert rep["passed"]


def test_verify_cup_deg0_conditions():
    c = ctx1(2, 3)
    k0 = comodule.constant(c)
    nat = comodule.natural(c)
    s2 = comodule.sym_power(c, 2)
    w2 = comodule.wedge_power(c, 2)
    g2 = comodule.div_power(c, 2)

    # violator of both conditions with a strict jump: the twist embeds in
    # the symmetric square although no product map exists
    rep = homology.verify_cup_deg01(k0, s2, nat, k0, 1)
    assert not rep["C1"] and not rep["C2"]
    assert rep["hom_big"] == 1 and rep["hom_fg"] * rep["hom_xy"] == 0
    assert rep["passed"]

    rep = homology.verify_cup_deg01(k0, w2, nat, k0, 1)
    assert rep["C1"] and rep["equality"] and rep["passed"]

    rep = homology.verify_cup_deg01(s2, g2, s2, g2, 1)
    assert rep["C1"] and rep["C2"] and rep["equality"] and rep["passed"]


def test_verify_cup_ext1():
    c = ctx1(2, 4)
    nat = comodule.natural(c)
    w2 = comodule.wedge_power(c, 2)
    s2 = comodule.sym_power(c, 2)
    rep = homology.verify_cup_deg01(w2, w2, nat, nat, 1, with_ext1=True)
    assert rep["C1"] and rep["C2"] and rep["ext1_equality"] and rep["passed"]
    # only one condition: degree-0 equality but a strictly bigger Ext^1
    rep = homology.verify_cup_deg01(w2, s2, nat, nat, 1, with_ext1=True)
    assert rep["C2"] and not rep["C1"]
    assert rep["equality"]
    assert rep["ext1_big"] == 1 and rep["ext1_fg"] == rep["ext1_xy"] == 0
    assert rep["ext1_lower_ok"] and rep["passed"]


def test_verify_connectedness_sharp_bounds():
    c = ctx1(2, 4)
    nat = comodule.natural(c)
    s2 = comodule.sym_power(c, 2)
    w2 = comodule.wedge_power(c, 2)
    g2 = comodule.div_power(c, 2)
    for f, g, bound, strict_at in [(w2, w2, 2, 2), (s2, w2, 3, 3),
                                   (w2, s2, 1, 1), (g2, g2, 2, 2)]:
        rep = homology.verify_connectedness(f, g, nat, nat, 1, 3)
        assert rep["passed"]
        assert rep["bound"] == bound
        row = rep["rows"][strict_at]
        assert row["lhs"] > row["rhs"]

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import seeds
from nilcurv import attributes as at
from nilcurv import families as fam
from nilcurv import liealg as la
from nilcurv import randgen as rg
from nilcurv.curvature import einstein_check, ricci
from nilcurv.pseudolinalg import MetricTensor, max_abs

F = Fraction


def decomposable_instances():
    yield "l6_19", fam.make_l6_19(F(1, 2), exact=True)
    yield "dim7_147e", fam.make_dim7_147e(F(1, 3), 2, exact=True)
    yield "three_step_dim6", fam.make_three_step_dim6(2, "b", -1, exact=True)
    yield "three_step_dim7", fam.make_three_step_dim7(3, 4, 1, 1, exact=True)
    yield "conti8", fam.make_conti8()
    yield "example7", fam.make_example7()
    yield "example10", fam.make_example10(1, 1)


INSTANCES = list(decomposable_instances())


def _extension(seed, exact=False):
    """Random rigid extension ``h`` of a random Lorentzian ``g`` (or None)."""
    rng = np.random.default_rng(seed)
    m = int(rng.integers(3, 6))
    g = rg.random_metric_lie_algebra(rng, m, 1, exact=exact, mix=False)
    p = int(rng.integers(1, 3))
    om = rg.random_rigid_extension(rng, g, p)
    if om is None:
        return None
    return g, om, la.central_extension(g, om, rg.euclidean_center_metric(p, exact))


@pytest.mark.parametrize("name,h", INSTANCES, ids=[n for n, _ in INSTANCES])
def test_attribute_ricci_matches_direct(name, h):
    t = at.decompose(h)
    direct = ricci(h).ric
    via = at.ricci_via_attributes(t).ric
    d = max_abs(direct - via)
    assert d == 0 if h.exact else float(d) <= 1e-9


@pytest.mark.parametrize("name,h", INSTANCES, ids=[n for n, _ in INSTANCES])
def test_decompose_reconstruct_is_the_embedding_basis_change(name, h):
    t = at.decompose(h)
    moved = la.change_basis(h, t.embedding)
    back = t.reconstruct()
    tol = 0 if h.exact else 1e-10
    assert float(max_abs(moved.lie.c - back.lie.c)) <= tol
    assert float(max_abs(moved.metric.g - back.metric.g)) <= tol
    assert t.rigid


@given(seeds)
def test_random_extension_round_trip(seed):
    made = _extension(seed)
    if made is None:
        return
    g, om, h = made
    t = at.decompose(h)
    assert t.m == g.n and t.p == om.p
    assert float(max_abs(at.ricci_via_attributes(t).ric - ricci(h).ric)) <= 1e-9
    moved = la.change_basis(h, t.embedding)
    assert float(max_abs(moved.lie.c - t.reconstruct().lie.c)) <= 1e-9


@given(seeds)
def test_random_extension_round_trip_exact(seed):
    made = _extension(seed, exact=True)
    if made is None:
        return
    g, om, h = made
    t = at.decompose(h)
    assert max_abs(at.ricci_via_attributes(t).ric - ricci(h).ric) == 0


@given(seeds)
def test_explicit_attributes_give_direct_ricci(seed):
    made = _extension(seed)
    if made is None:
        return
    g, om, h = made
    t = at.attributes_from(g, om)
    assert float(max_abs(at.ricci_via_attributes(t).ric - ricci(h).ric)) <= 1e-9


def test_both_d_formulas_agree():
    g, om = fam.make_qe_dim6(3, 4, -1, 1, exact=True)
    t = at.attributes_from(g, om)
    assert max_abs(at.d_operator(t) - at.d_operator_traces(t)) == 0


@given(seeds)
def test_both_d_formulas_agree_random(seed):
    made = _extension(seed)
    if made is None:
        return
    t = at.attributes_from(*made[:2])
    assert float(max_abs(at.d_operator(t) - at.d_operator_traces(t))) <= 1e-10


def test_lorentzian_center_refused():
    lie = la.LiePresentation.from_brackets(3, [(0, 1, 2, 1)], True)
    h = la.MetricLieAlgebra(lie, MetricTensor.diag([1, 1, -1], True))
    with pytest.raises(at.NonEuclideanCenter):
        at.decompose(h)


def test_degenerate_center_refused():
    # heis3 + R e4, center span(e3, e4); e4 is null and pairs only with e1
    lie = la.LiePresentation.from_brackets(4, [(0, 1, 2, 1)], True)
    g = np.array([[0, 0, 0, 1], [0, 1, 0, 0], [0, 0, 1, 0], [1, 0, 0, 0]])
    h = la.MetricLieAlgebra(lie, MetricTensor(np.vectorize(F, otypes=[object])(g)))
    with pytest.raises(at.DegenerateCenter, match="degenerate"):
        at.decompose(h)
    aff = la.MetricLieAlgebra(la.LiePresentation.from_brackets(2, [(0, 1, 1, 1)], True), MetricTensor.diag([1, 1], True))
    with pytest.raises(at.DegenerateCenter, match="trivial"):
        at.decompose(aff)


def test_zero_cocycle_is_not_rigid():
    lie = la.LiePresentation.from_brackets(3, [(0, 1, 2, 1)], True)
    g = la.MetricLieAlgebra(lie, MetricTensor.diag([1, 1, 1], True))
    t = at.attributes_from(g, la.CocycleData.zero(3, 1, True))
    assert not t.rigid


def _es_agrees_with_direct(h, tol=1e-9):
    t = at.decompose(h)
    v = einstein_check(h, "einstein", tol=tol)
    lam = v.lam
    es_ok = all(float(r) <= tol for r in at.einstein_conditions_es(t, lam))
    return es_ok, v.passed and float(v.residual) <= tol


@pytest.mark.parametrize("name,h", INSTANCES, ids=[n for n, _ in INSTANCES])
def test_es_equivalence_on_families(name, h):
    es_ok, direct_ok = _es_agrees_with_direct(h)
    assert es_ok == direct_ok
    assert direct_ok


@given(seeds, st.integers(0, 2))
def test_es_equivalence_on_perturbed(seed, which):
    base = INSTANCES[which][1].to_float()
    rng = np.random.default_rng(seed)
    t = at.decompose(base)
    S = np.array(t.omega.S, dtype=float)
    i, a, b = rng.integers(0, S.shape[0]), *rng.choice(t.m, size=2, replace=False)
    forms = np.array(t.omega.forms(t.g.metric), dtype=float)
    forms[i, a, b] += 0.1
    forms[i, b, a] -= 0.1
    om = la.CocycleData.from_forms(forms, t.g.metric)
    if float(la.cocycle_residual(t.g, om)) > 1e-9:
        # not an extension any more; nothing to compare
        return
    h = la.central_extension(t.g, om, t.z_metric)
    es_ok, direct_ok = _es_agrees_with_direct(h)
    assert es_ok == direct_ok


def test_es_equivalence_detects_non_einstein():
    g, om = fam.make_qe_dim5(1, 1, 1)
    h = la.central_extension(g, om.scaled(2.0), MetricTensor.diag([1.0]))
    es_ok, direct_ok = _es_agrees_with_direct(h)
    assert not es_ok and not direct_ok


def test_es_matrices_shapes():
    t = at.decompose(fam.make_example10(1, 2))
    r1, r2, r3 = at.es_system_matrices(t, 0.0)
    assert r1.shape == (6, 6) and r2.shape == (6, 4) and r3.shape == (4, 4)


QE5 = [(1, 1, 1), (2, -1, -1), (F(1, 2), 1, -1), (3, -1, 1), (F(-2, 3), 1, 1)]
QE6 = [(3, 4, 1, 1), (8, 15, -1, 1), (5, 12, 1, -1), (F(3, 2), 2, -1, -1), (-7, 24, 1, 1)]


@pytest.mark.parametrize("maker,pt", [(fam.make_qe_dim5, p) for p in QE5] + [(fam.make_qe_dim6, p) for p in QE6])
def test_quasi_einstein_only_at_lambda_zero_and_fragile(maker, pt):
    g, om = maker(*pt, exact=True)
    v = at.quasi_einstein_check(g, om, 0)
    assert v.passed and v.rigid and v.ricci_residual == 0 and v.trace_residual == 0
    assert not at.quasi_einstein_check(g, om, F(1, 10)).passed
    W = om.forms(g.metric)
    for i in range(om.p):
        for a in range(g.n):
            for b in range(a + 1, g.n):
                w = W.copy()
                w[i, a, b] += F(1, 10)
                w[i, b, a] -= F(1, 10)
                assert not at.quasi_einstein_check(g, la.CocycleData.from_forms(w, g.metric), 0).passed


def test_coboundary_primitive_found_for_exact_cocycle():
    # omega(e1, e2) = -1 is the coboundary of alpha = e3^* on heis3
    lie = la.LiePresentation.from_brackets(3, [(0, 1, 2, 1)], False)
    g = la.MetricLieAlgebra(lie, MetricTensor.diag([1.0, 1.0, 1.0]))
    w = np.zeros((3, 3))
    w[0, 1], w[1, 0] = -1.0, 1.0
    t = at.attributes_from(g, la.CocycleData.from_forms(w, g.metric))
    out = at.coboundary_primitive(t)
    assert out["exact"]
    assert np.allclose(out["alpha"], [[0, 0, 1]])


def test_coboundary_primitive_absent_for_qe_cocycle():
    g, om = fam.make_qe_dim5(1, 1, 1)
    out = at.coboundary_primitive(at.attributes_from(g, om))
    assert not out["exact"] and out["residual"] > 0.1


def test_three_step_blocks_on_qe_families():
    for g, om in (fam.make_qe_dim5(1, 1, 1), fam.make_qe_dim6(3, 4, 1, -1)):
        b = at.three_step_blocks(at.attributes_from(g, om), 0.0)
        r = b.residuals
        assert r["eq1"] <= 1e-10 and r["eq2"] <= 1e-10 and r["eq3"] <= 1e-10
        assert abs(r["trace_identity_gap"]) <= 1e-10
        assert r["derived_lorentzian"] and r["center_equals_derived"]
        assert r["s_gg_block"] <= 1e-12 and r["s_skew_block"] <= 1e-10
        one = b.type_one()
        assert np.allclose(one["L"], -one["L"].T) or one["L"].size == 0


def test_three_step_blocks_needs_two_step():
    h = fam.make_l6_19(1)
    lie = h.lie
    t = at.attributes_from(h, la.CocycleData.zero(6, 1))
    with pytest.raises(at.WrongNilpotencyClass):
        at.three_step_blocks(t)
    assert la.nilpotency_class(lie) == 3


def test_soliton_verdict_heisenberg_from_plane():
    # R^2 with the area form: omega is ad^*-invariant and g is a soliton with D/2 = Id/2
    g = la.MetricLieAlgebra(la.LiePresentation.abelian(2), MetricTensor.diag([1.0, 1.0]))
    w = np.array([[0.0, 1.0], [-1.0, 0.0]])
    out = at.soliton_verdict(at.attributes_from(g, la.CocycleData.from_forms(w, g.metric)))
    assert out["applies"] and out["soliton"].passed
    assert abs(float(out["soliton"].lam) + 0.5) <= 1e-12


def test_soliton_verdict_not_applicable_on_qe_family():
    g, om = fam.make_qe_dim5(1, 1, 1)
    out = at.soliton_verdict(at.attributes_from(g, om))
    assert not out["applies"] and "soliton" not in out


@given(seeds, st.floats(-2, 2))
def test_block_trace_identity_is_the_traced_combination(seed, lam):
    # -4 tr(E1) + 2 tr(E2) + 3 tr(E3) = sum tr(D_i^2) + 4 (2s + m + 3p) lambda
    # for any data, so the identity gap must equal that combination exactly
    rng = np.random.default_rng(seed)
    g, _ = (fam.make_qe_dim5(1, 1, 1), fam.make_qe_dim6(1, 2, 1, -1))[seed % 2]
    p = int(rng.integers(1, 3))
    forms = np.stack([rg.random_cocycle(rng, g.lie) for _ in range(p)])
    t = at.attributes_from(g, la.CocycleData.from_forms(forms, g.metric))
    r = at.three_step_blocks(t, lam).residuals
    assert abs(r["trace_identity_gap"] - r["trace_identity_combo"]) <= 1e-9 * max(1.0, abs(r["sum_tr_D2"]))

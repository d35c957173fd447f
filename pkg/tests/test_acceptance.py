"""Acceptance criteria 1-11, each at its stated tolerance.

Every test records one ``PASS``/``FAIL`` line that is printed in the
"acceptance criteria" section at the end of the pytest run.  Run alone with
``pytest tests/test_acceptance.py -m acceptance``.
"""
from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

from conftest import ACCEPTANCE
from nilcurv import attributes as at
from nilcurv import families as fam
from nilcurv import liealg as la
from nilcurv import matlemmas as ml
from nilcurv import randgen as rg
from nilcurv.curvature import einstein_check, ricci, ricci_general, ricci_nilpotent
from nilcurv.pseudolinalg import MetricTensor, Subspace, inv, max_abs
from nilcurv.search import scan_lambda_sign

pytestmark = pytest.mark.acceptance

F = Fraction
BASELINES = json.loads((Path(__file__).with_name("baselines.json")).read_text())


def record(k: int, title: str, ok: bool, detail: str) -> None:
    ACCEPTANCE[k] = f"[{'PASS' if ok else 'FAIL'}] {k:>2}. {title}: {detail}"
    assert ok, ACCEPTANCE[k]


# ---------------------------------------------------------------------------


def test_criterion_01_ricci_flat_families():
    worst = 0.0
    for alpha in (F(1, 2), 1, 2):
        worst = max(worst, float(max_abs(ricci(fam.make_l6_19(alpha)).ric)))
    for r, a in ((F(1, 4), 1), (F(1, 2), 1), (F(3, 4), 2)):
        worst = max(worst, float(max_abs(ricci(fam.make_dim7_147e(r, a)).ric)))
    record(1, "classified families are Ricci-flat", worst <= 1e-10, f"6 checks, max |ric| = {worst:.2e} (<= 1e-10)")


def _random_samples(count=100, seed=2024):
    rng = np.random.default_rng(seed)
    return [rg.random_metric_lie_algebra(rng, int(rng.integers(3, 9)), int(rng.integers(0, 3))) for _ in range(count)]


SAMPLES = None


def samples():
    global SAMPLES
    if SAMPLES is None:
        SAMPLES = _random_samples()
    return SAMPLES


def test_criterion_02_dual_route_ricci():
    worst = 0.0
    for a in samples():
        g, n = ricci_general(a).ric, ricci_nilpotent(a).ric
        worst = max(worst, float(max_abs(g - n)) / max(1.0, float(max_abs(g))))
    rng = np.random.default_rng(77)
    exact_equal = 0
    for _ in range(20):
        a = rg.random_metric_lie_algebra(rng, int(rng.integers(3, 6)), int(rng.integers(0, 2)), exact=True)
        exact_equal += max_abs(ricci_general(a).ric - ricci_nilpotent(a).ric) == 0
    ok = worst <= 1e-8 and exact_equal == 20
    record(2, "general and nilpotent Ricci routes agree", ok,
           f"100 float samples (dims 3-8) max rel err {worst:.2e} (<= 1e-8); exact equality {exact_equal}/20")


def test_criterion_03_trace_identity():
    worst = 0.0
    for a in samples():
        rep = ricci_nilpotent(a)
        worst = max(worst, abs(float(np.trace(rep.J1) - np.trace(rep.J2))))
    record(3, "tr J1 = tr J2", worst <= 1e-10, f"100 samples, max gap {worst:.2e} (<= 1e-10)")


def _family_instances():
    return [
        fam.make_l6_19(F(1, 2)),
        fam.make_l6_19(2),
        fam.make_dim7_147e(F(1, 4), 1),
        fam.make_dim7_147e(F(3, 4), 2),
        fam.make_three_step_dim6(1, "a", 1),
        fam.make_three_step_dim6(F(3, 2), "b", -1),
        fam.make_three_step_dim7(1, 1, 1, 1),
        fam.make_three_step_dim7(3, 4, -1, 1),
        fam.make_conti8(),
        fam.make_example7(),
        fam.make_example10(1, 1),
        fam.make_example10(1, 2),
    ]


def test_criterion_04_attributes_oracle_and_round_trip():
    worst = 0.0
    trip = 0.0
    cases = list(_family_instances())
    rng = np.random.default_rng(404)
    extensions = 0
    while extensions < 50:
        g = rg.random_metric_lie_algebra(rng, int(rng.integers(3, 6)), 1, mix=False)
        p = int(rng.integers(1, 3))
        om = rg.random_rigid_extension(rng, g, p)
        if om is None:
            continue
        h = la.central_extension(g, om, rg.euclidean_center_metric(p))
        # mix coordinates so that decompose has real work to do
        cases.append(la.change_basis(h, rg.random_transform(rng, h.n)))
        extensions += 1
    for h in cases:
        t = at.decompose(h)
        direct = ricci(h).ric
        worst = max(worst, float(max_abs(at.ricci_via_attributes(t).ric - direct)))
        # decompose then extend, mapped back to the original coordinates
        back = la.change_basis(t.reconstruct(), inv(t.embedding))
        trip = max(trip, float(max_abs(back.lie.c - h.lie.c)), float(max_abs(back.metric.g - h.metric.g)))
    ok = worst <= 1e-9 and trip <= 1e-9
    record(4, "attribute Ricci assembly and round trip", ok,
           f"{len(cases) - 50} family + 50 random extensions, max diff {worst:.2e}, round trip {trip:.2e} (<= 1e-9)")


def _perturbed_negatives():
    """Family instances whose metric is stretched along one non-central direction."""
    out = []
    for h in _family_instances():
        z = la.center(h.lie)
        for i in range(h.n):
            if len(out) >= 20:
                return out
            e = np.zeros(h.n)
            e[i] = 1.0
            if z.contains(e, 1e-9):
                continue
            T = np.eye(h.n)
            T[i, i] = 1.1
            g = T @ np.asarray(h.metric.g, float) @ T
            cand = la.MetricLieAlgebra(h.lie, MetricTensor(g))
            out.append(cand)
            if len(out) % 2 == 0:
                break
    return out


def test_criterion_05_einstein_system_equivalence():
    tol = 1e-9
    agree = 0
    positives = negatives = 0
    lam_gap = 0.0
    fams = _family_instances()
    negs = _perturbed_negatives()
    for h in fams + negs:
        t = at.decompose(h)
        v = einstein_check(h, "einstein", tol=tol)
        lam = ricci(h).lambda_star
        es_ok = all(float(r) <= tol for r in at.einstein_conditions_es(t, lam))
        direct_ok = v.passed and float(v.residual) <= tol
        agree += es_ok == direct_ok
        positives += direct_ok
        negatives += not direct_ok
        lam_gap = max(lam_gap, abs(float(v.lam) - float(lam)))
    total = len(fams) + len(negs)
    ok = agree == total and len(negs) == 20 and positives == len(fams) and negatives == 20 and lam_gap <= 1e-12
    record(5, "Einstein system <=> Einstein", ok,
           f"{agree}/{total} agree ({positives} Einstein families, {negatives} perturbed negatives), lambda gap {lam_gap:.1e}")


QE5 = [(1, 1, 1), (2, -1, -1), (F(1, 2), 1, -1), (3, -1, 1), (F(-2, 3), 1, 1)]
QE6 = [(3, 4, 1, 1), (8, 15, -1, 1), (5, 12, 1, -1), (F(3, 2), 2, -1, -1), (-7, 24, 1, 1)]


def test_criterion_06_quasi_einstein_verdicts():
    passes = 0
    only_zero = 0
    perturbed = broken = 0
    for maker, pts in ((fam.make_qe_dim5, QE5), (fam.make_qe_dim6, QE6)):
        for pt in pts:
            g, om = maker(*pt, exact=True)
            passes += at.quasi_einstein_check(g, om, 0).passed
            only_zero += not any(at.quasi_einstein_check(g, om, lam).passed for lam in (F(1, 10), F(-1, 10), 1))
            W = om.forms(g.metric)
            for i in range(om.p):
                for a in range(g.n):
                    for b in range(a + 1, g.n):
                        w = W.copy()
                        w[i, a, b] += F(1, 10)
                        w[i, b, a] -= F(1, 10)
                        perturbed += 1
                        broken += not at.quasi_einstein_check(g, la.CocycleData.from_forms(w, g.metric), 0).passed
    n = len(QE5) + len(QE6)
    ok = passes == n and only_zero == n and broken == perturbed
    record(6, "omega-quasi-Einstein verdicts", ok,
           f"{passes}/{n} pass at lambda=0, {only_zero}/{n} fail at lambda!=0, {broken}/{perturbed} skew-pair perturbations fail")


def test_criterion_07_examples():
    c8 = einstein_check(fam.make_conti8(), "einstein")
    lam = float(c8.lam)
    ok8 = c8.passed and float(c8.residual) <= 1e-9 and abs(lam) > 0
    ok8 = ok8 and abs(lam - BASELINES["conti8_lambda"]) <= 1e-12
    e7 = fam.make_example7()
    res7 = float(max_abs(ricci(e7).ric))
    e = np.eye(7)
    z7 = la.center(e7.lie).equals(Subspace.span(np.stack([e[6], e[4] - e[5]]), 7, False), 1e-8)
    res10 = 0.0
    z10 = True
    for p, r in ((1, 1), (1, 2)):
        a = fam.make_example10(p, r)
        res10 = max(res10, float(max_abs(ricci(a).ric)))
        z10 &= la.center(a.lie).equals(Subspace.span(np.eye(10)[6:], 10, False), 1e-8)
    ok = ok8 and res7 <= 1e-10 and z7 and res10 <= 1e-10 and z10
    record(7, "example reproductions", ok,
           f"8-dim Einstein residual {float(c8.residual):.1e}, lambda {lam:.12g} (baseline {BASELINES['conti8_lambda']}); "
           f"7-dim |ric| {res7:.1e} center ok={z7}; 10-dim |ric| {res10:.1e} center ok={z10}")


def test_criterion_08_weyl_fuzz():
    r = ml.weyl_fuzz(1000, seed=8, max_dim=8)
    record(8, "Weyl inequalities", r.passed(1e-10),
           f"{r.trials} pairs, {r.checks} index checks, worst violation {r.worst_violation:.1e} (<= 1e-10)")


@pytest.fixture(scope="module")
def k2_search():
    return ml.lemmaimp_search(2, 200, 7)


def test_criterion_09_lemmaimp(k2_search):
    exact = ml.lemmaimp_residual(ml.explicit_solution(3, 4, exact=True))
    flt = max(float(ml.lemmaimp_residual(ml.explicit_solution(3, 4, e, s))) for e in (1, -1) for s in (1, -1))
    k1 = ml.lemmaimp_search(1, 50, 7)
    floor = k2_search.residual
    ok = exact == 0 and flt <= 1e-12 and k1.residual <= 1e-8 and floor > 1e-3
    record(9, "K, A, P system", ok,
           f"explicit exact residual {exact}, float {flt:.1e}; k=1 search {k1.residual:.1e} (<= 1e-8); "
           f"k=2 floor {floor:.5f} over 200 restarts seed 7 (> 1e-3, empirical evidence)")


def test_lemmaimp_k2_floor_matches_recorded_baseline(k2_search):
    # regression guard on the recorded floor; the criterion itself only needs > 1e-3
    assert k2_search.residual == pytest.approx(BASELINES["lemmaimp_k2_floor"], rel=1e-3)


def test_criterion_10_lambda_sign_probe():
    # 50 trials split evenly over the two 3-step templates
    reps = [scan_lambda_sign(t, 25, seed=1) for t in ("three_step_dim6", "three_step_dim7")]
    lams = [x for r in reps for x in r.lambdas]
    near = sum(r.near_solutions for r in reps)
    ok = near >= 1 and all(x >= -1e-6 for x in lams)
    lo = min(lams) if lams else float("nan")
    record(10, "Einstein constant sign probe", ok,
           f"50 trials, {near} near-solutions (residual <= 1e-6), min lambda {lo:.2e} (>= -1e-6)")


def _l6_19_table(alpha):
    """L6,19(-1) bracket table and metric, typed in entry by entry."""
    c = np.zeros((6, 6, 6))
    for i, j, k, v in ((1, 2, 4, 1), (1, 3, 5, 1), (2, 4, 6, 1), (3, 5, 6, -1)):
        c[i - 1, j - 1, k - 1], c[j - 1, i - 1, k - 1] = v, -v
    a = float(alpha)
    g = np.diag([1.0, 2.0, 2.0, 0.0, 0.0, 4 * a**4])
    g[3, 4] = g[4, 3] = -2 * a**2
    return c, g


def _147e_table(r, a):
    c = np.zeros((7, 7, 7))
    for i, j, k, v in ((1, 2, 5, 1), (1, 3, 6, 1), (2, 3, 4, 1), (6, 2, 7, 1 - r), (5, 3, 7, -r), (4, 1, 7, 1)):
        c[i - 1, j - 1, k - 1], c[j - 1, i - 1, k - 1] = v, -v
    g = np.diag([1.0, 1.0, 1.0, -a, a * r, a * (1 - r), a * a])
    return c, g


def test_criterion_11_basis_change_tables():
    worst6 = 0.0
    for alpha, sign in ((1, 1), (2, -1), (F(1, 2), 1), (F(3, 2), -1)):
        h = la.change_basis(fam.make_three_step_dim6(alpha, "a", sign), fam.l6_19_substitution(alpha, sign))
        c, g = _l6_19_table(alpha)
        worst6 = max(worst6, float(np.max(np.abs(h.lie.c - c))), float(np.max(np.abs(h.metric.g - g))))
    worst7 = 0.0
    for a2, a3, e, s in ((1, 1, 1, 1), (3, 4, -1, 1), (1, 2, 1, -1), (2, 0.5, -1, -1)):
        h = la.change_basis(fam.make_three_step_dim7(a2, a3, e, s), fam.dim7_substitution(a2, a3, e, s))
        r = a2**2 / (a2**2 + a3**2)
        c, g = _147e_table(r, a2**2 + a3**2)
        worst7 = max(worst7, float(np.max(np.abs(h.lie.c - c))), float(np.max(np.abs(h.metric.g - g))))
    ok = worst6 <= 1e-12 and worst7 <= 1e-12
    record(11, "basis change to the reference tables", ok,
           f"6-dim max entry diff {worst6:.1e}, 7-dim {worst7:.1e} (<= 1e-12)")

"""Catalogue of checkable statements about the classified families.

Each :class:`Claim` has a descriptive key, a one-line statement and a check
function returning a :class:`ClaimResult`.  ``run_claims`` evaluates them in a
fixed order; exceptions become failed results rather than crashes.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from . import attributes as at
from . import families as fam
from . import liealg as la
from . import matlemmas as ml
from . import search as se
from .curvature import einstein_check, j_operators, ricci_general, ricci_nilpotent
from .pseudolinalg import MetricTensor, Subspace, inertia, is_nondegenerate, max_abs


@dataclass(frozen=True)
class ClaimResult:
    name: str
    passed: bool
    residual: float | None = None
    lam: float | None = None
    details: dict = field(default_factory=dict)


@dataclass(frozen=True)
class Claim:
    name: str
    statement: str
    check: Callable[[float], ClaimResult]
    expensive: bool = False


def _f(x) -> float:
    return float(x)


def _ok(res, tol) -> bool:
    return _f(res) <= tol


# ---------------------------------------------------------------------------


def _six_dim_ricci_flat(tol):
    worst = 0.0
    for alpha in (Fraction(1, 2), 1, 2):
        worst = max(worst, _f(ricci_nilpotent(fam.make_l6_19(alpha)).ricci_flat_residual))
    return ClaimResult("six_dim_family_ricci_flat", worst <= tol, worst, 0.0)


def _seven_dim_ricci_flat(tol):
    worst = 0.0
    for r, a in ((Fraction(1, 4), 1), (Fraction(1, 2), 1), (Fraction(3, 4), 2)):
        worst = max(worst, _f(ricci_nilpotent(fam.make_dim7_147e(r, a)).ricci_flat_residual))
    return ClaimResult("seven_dim_family_ricci_flat", worst <= tol, worst, 0.0)


def _six_dim_structure(tol):
    h = fam.make_l6_19(1)
    e = np.eye(6)
    br = h.lie.bracket(e[1], e[3])
    res = float(np.max(np.abs(br - e[5])))
    z = la.center(h.lie, tol)
    sig = inertia(h.metric.g, tol)
    cls = la.nilpotency_class(h.lie, tol)
    ok = res <= tol and z.dim == 1 and z.contains(e[5], tol) and tuple(sig) == (1, 5) and cls == 3
    return ClaimResult("six_dim_family_structure", ok, res, None, {"center_dim": z.dim, "signature": list(sig), "class": cls})


def _seven_dim_structure(tol):
    h = fam.make_dim7_147e(Fraction(1, 2), 1, exact=True)
    jac = _f(la.jacobi_residual(h.lie))
    chain = la.lower_central_series(h.lie)
    dims = [s.dim for s in chain]
    sig = inertia(h.metric.g)
    ok = jac == 0 and len(chain) - 1 == 3 and dims[1:3] == [4, 1] and la.center(h.lie).dim == 1 and tuple(sig) == (1, 6)
    return ClaimResult("seven_dim_family_structure", ok, jac, None, {"series_dims": dims, "signature": list(sig)})


def _seven_dim_three_step_derived(tol):
    h = fam.make_three_step_dim7(1, 1, 1, 1)
    d = la.derived_ideal(h.lie, tol)
    n = h.n
    e = np.eye(n)
    want = Subspace.span(np.stack([e[0], e[1], e[2], e[n - 1]]), n, False, tol)
    ok = d.dim == 4 and d.equals(want, 1e-8)
    return ClaimResult("seven_dim_three_step_derived_ideal", ok, None, None, {"dim": d.dim})


def _quasi_einstein(tol):
    worst = 0.0
    ok = True
    for args in ((1, 1, 1), (2, -1, -1)):
        g, om = fam.make_qe_dim5(*args)
        v = at.quasi_einstein_check(g, om, 0, tol=tol)
        ok &= v.passed
        worst = max(worst, _f(v.ricci_residual), _f(v.trace_residual))
    for args in ((1, 1, 1, 1), (3, 4, -1, 1)):
        g, om = fam.make_qe_dim6(*args)
        v = at.quasi_einstein_check(g, om, 0, tol=tol)
        ok &= v.passed
        worst = max(worst, _f(v.ricci_residual), _f(v.trace_residual))
    return ClaimResult("two_step_families_quasi_einstein_lambda_zero", ok, worst, 0.0)


def _extension_round_trip(tol):
    worst = 0.0
    pairs = [
        (fam.make_qe_dim5(1, 1, 1), fam.make_three_step_dim6(1, "a")),
        (fam.make_qe_dim6(1, 1, 1, 1), fam.make_three_step_dim7(1, 1, 1, 1)),
    ]
    for (g, om), h in pairs:
        ext = la.central_extension(g, om, MetricTensor(np.eye(1)))
        worst = max(worst, _f(max_abs(ext.lie.c - h.lie.c)), _f(max_abs(ext.metric.g - h.metric.g)))
        t = at.decompose(h)
        worst = max(worst, _f(max_abs(t.g.lie.c - g.lie.c)), _f(max_abs(t.omega.S - om.S)))
    return ClaimResult("three_step_families_are_extensions_of_two_step", worst <= tol, worst)


def _basis_change_six(tol):
    worst = 0.0
    for alpha, sign in ((1, 1), (2, -1), (Fraction(1, 2), 1)):
        h = fam.make_three_step_dim6(alpha, "a", sign)
        hh = la.change_basis(h, fam.l6_19_substitution(alpha, sign))
        target = fam.make_l6_19(alpha)
        worst = max(worst, _f(max_abs(hh.lie.c - target.lie.c)), _f(max_abs(hh.metric.g - target.metric.g)))
    return ClaimResult("six_dim_three_step_is_l6_19", worst <= max(tol, 1e-12), worst)


def _basis_change_seven(tol):
    worst = 0.0
    for a2, a3, e, s in ((1, 1, 1, 1), (3, 4, -1, 1), (1, 2, 1, -1)):
        h = fam.make_three_step_dim7(a2, a3, e, s)
        hh = la.change_basis(h, fam.dim7_substitution(a2, a3, e, s))
        target = fam.make_dim7_147e(fam.r_of(a2, a3), a2 * a2 + a3 * a3)
        worst = max(worst, _f(max_abs(hh.lie.c - target.lie.c)), _f(max_abs(hh.metric.g - target.metric.g)))
    return ClaimResult("seven_dim_three_step_is_147e", worst <= max(tol, 1e-12), worst)


def _variant_sign(tol):
    # u3 -> -u3 also flips the sign of [u2,u3], so variant a with sign s
    # corresponds to variant b with sign -s.
    a = fam.make_three_step_dim6(1, "a", sign=1)
    b = fam.make_three_step_dim6(1, "b", sign=-1)
    T = np.eye(a.n)
    T[4, 4] = -1.0  # u_3 -> -u_3
    bb = la.change_basis(b, T)
    res = max(_f(max_abs(bb.lie.c - a.lie.c)), _f(max_abs(bb.metric.g - a.metric.g)))
    return ClaimResult("six_dim_variants_related_by_sign", res <= tol, res)


def _trace_identity(tol):
    worst = 0.0
    algs = [fam.make_l6_19(1), fam.make_dim7_147e(0.5, 1), fam.make_conti8(), fam.make_example7(), fam.make_example10(1, 2)]
    for a in algs:
        rep = ricci_nilpotent(a)
        worst = max(worst, abs(float(np.trace(rep.J1)) - float(np.trace(rep.J2))))
    return ClaimResult("trace_of_j1_equals_trace_of_j2", worst <= tol, worst)


def _conti8(tol):
    a = fam.make_conti8()
    v = einstein_check(a, "einstein", tol=tol)
    z = la.center(a.lie, tol)
    e = np.eye(8)
    ok = v.passed and abs(float(v.lam)) > 0.1 and z.dim == 2 and z.contains(e[6], tol) and z.contains(e[7], tol)
    t = at.decompose(a)
    es = at.einstein_conditions_es(t, v.lam)
    ok = ok and all(_f(r) <= max(tol, 1e-9) for r in es)
    return ClaimResult("eight_dim_example_einstein_nonzero", ok, _f(v.residual), float(v.lam), {"es": [_f(r) for r in es]})


def _example7(tol):
    a = fam.make_example7()
    rf = _f(ricci_nilpotent(a).ricci_flat_residual)
    z = la.center(a.lie, tol)
    e = np.eye(7)
    want = Subspace.span(np.stack([e[6], e[4] - e[5]]), 7, False, tol)
    nondeg = is_nondegenerate(z, a.metric)
    ok = rf <= tol and z.equals(want, 1e-8) and nondeg and la.nilpotency_class(a.lie, tol) == 3
    return ClaimResult("seven_dim_example_ricci_flat", ok, rf, 0.0, {"center_dim": z.dim})


def _example10(tol):
    worst = 0.0
    ok = True
    e = np.eye(10)
    want = Subspace.span(e[6:10], 10, False, tol)
    for p, r in ((1, 1), (1, 2)):
        a = fam.make_example10(p, r)
        worst = max(worst, _f(ricci_nilpotent(a).ricci_flat_residual))
        ok &= la.center(a.lie, tol).equals(want, 1e-8) and la.nilpotency_class(a.lie, tol) == 3
    return ClaimResult("ten_dim_example_ricci_flat", ok and worst <= tol, worst, 0.0)


def _es_at_zero(tol):
    worst = 0.0
    for h in (fam.make_three_step_dim6(1, "a"), fam.make_three_step_dim7(1, 1, 1, 1), fam.make_three_step_dim7(3, 4, -1, 1)):
        worst = max(worst, *(_f(r) for r in at.einstein_conditions_es(at.decompose(h), 0.0)))
    return ClaimResult("three_step_families_satisfy_einstein_system_at_zero", worst <= tol, worst, 0.0)


def _blocks(tol):
    h = fam.make_three_step_dim7(1, 1, 1, 1)
    b = at.three_step_blocks(at.decompose(h), 0.0, tol)
    r = b.residuals
    worst = max(r["eq1"], r["eq2"], r["eq3"], float(np.max(np.abs(b.D))))
    ok = worst <= tol and r["derived_lorentzian"] and r["center_equals_derived"]
    return ClaimResult("seven_dim_block_system_vanishes_with_zero_skew_part", ok, worst, 0.0)


def _lemmaimp_explicit(tol):
    exact = ml.lemmaimp_residual(ml.explicit_solution(3, 4, exact=True))
    worst = 0.0
    for eps in (1, -1):
        for s in (1, -1):
            worst = max(worst, _f(ml.lemmaimp_residual(ml.explicit_solution(1, 1, eps, s))))
    ok = exact == 0 and worst <= max(tol, 1e-12)
    return ClaimResult("two_by_two_system_explicit_solution", ok, worst, None, {"exact_residual": str(exact)})


def _genlem0(tol):
    worst = 0.0
    ok = True
    for g, om in (fam.make_qe_dim5(1, 1, 1), fam.make_qe_dim6(1, 1, 1, 1), fam.make_qe_dim6(3, 4, -1, 1)):
        t = at.attributes_from(g.to_float(), la.CocycleData(np.asarray(om.S, float)))
        fam_, v = ml.genlem0_family_from_blocks(at.three_step_blocks(t, 0.0, tol))
        rep = ml.genlem0_verify(fam_, v, tol)
        ok &= rep.hypothesis_holds and bool(rep.conclusions_hold)
        worst = max(worst, rep.hypothesis_residual)
    return ClaimResult("skew_family_diagonal_identity_consequences", ok, worst)


def _genlem1(tol):
    g, om = fam.make_qe_dim6(1, 1, 1, 1)
    t = at.attributes_from(g.to_float(), la.CocycleData(np.asarray(om.S, float)))
    fam_, _ = ml.genlem0_family_from_blocks(at.three_step_blocks(t, 0.0, tol))
    b = ml.genlem1_basis(fam_.M[1:], tol)
    worst = max(b.gram_residual, b.action_residual)
    return ClaimResult("rank_two_family_adapted_basis", worst <= max(tol, 1e-10), worst)


def _lemmaimp_k1(tol):
    r = ml.lemmaimp_search(1, 50, 7)
    return ClaimResult("two_by_two_system_found_numerically", r.residual <= 1e-8, r.residual, None, {"branch": r.per_branch})


def _lemmaimp_k2(tol):
    r = ml.lemmaimp_search(2, 200, 7)
    return ClaimResult(
        "four_by_four_system_has_no_solution_evidence", r.residual > 1e-3, r.residual, None, {"evidence": r.evidence}
    )


def _lambda_sign(tol):
    rep = [se.scan_lambda_sign(t, 25, 1) for t in ("three_step_dim6", "three_step_dim7")]
    lo = min((r.min_lambda for r in rep if r.min_lambda is not None), default=None)
    ok = all(r.supports_nonnegative for r in rep)
    return ClaimResult(
        "three_step_einstein_constant_nonnegative_probe",
        ok,
        min(r.best_residual for r in rep),
        lo,
        {"near_solutions": sum(r.near_solutions for r in rep)},
    )


CLAIMS: tuple[Claim, ...] = (
    Claim("six_dim_family_ricci_flat", "the 6-dim 3-step family is Ricci-flat", _six_dim_ricci_flat),
    Claim("seven_dim_family_ricci_flat", "the 7-dim family 147E is Ricci-flat", _seven_dim_ricci_flat),
    Claim("six_dim_family_structure", "[f2,f4]=f6, 1-dim center, signature (1,5), 3-step", _six_dim_structure),
    Claim("seven_dim_family_structure", "147E is a 3-step Lie algebra with dims C^2=4, C^3=1", _seven_dim_structure),
    Claim("seven_dim_three_step_derived_ideal", "[h,h]=span{e1,e2,e3,x}", _seven_dim_three_step_derived),
    Claim("two_step_families_quasi_einstein_lambda_zero", "5- and 6-dim 2-step families are omega-quasi Einstein with lambda=0", _quasi_einstein),
    Claim("three_step_families_are_extensions_of_two_step", "extension/decomposition relate the 2-step and 3-step families", _extension_round_trip),
    Claim("six_dim_three_step_is_l6_19", "the explicit basis change yields the L6,19(-1) table and metric", _basis_change_six),
    Claim("seven_dim_three_step_is_147e", "the explicit basis change yields 147E with r = a2^2/(a2^2+a3^2)", _basis_change_seven),
    Claim("six_dim_variants_related_by_sign", "the two 6-dim variants differ by u3 -> -u3", _variant_sign),
    Claim("trace_of_j1_equals_trace_of_j2", "tr J1 = tr J2 for nilpotent metric algebras", _trace_identity),
    Claim("eight_dim_example_einstein_nonzero", "the 8-dim example is Einstein with nonzero constant", _conti8),
    Claim("seven_dim_example_ricci_flat", "the 7-dim example is Ricci-flat with center span{e7, e5-e6}", _example7),
    Claim("ten_dim_example_ricci_flat", "the 10-dim example is Ricci-flat, 3-step, center span{e7..e10}", _example10),
    Claim("three_step_families_satisfy_einstein_system_at_zero", "attribute conditions hold with lambda=0", _es_at_zero),
    Claim("seven_dim_block_system_vanishes_with_zero_skew_part", "block equations hold with D_i=0", _blocks),
    Claim("two_by_two_system_explicit_solution", "explicit 2x2 solution of the K, A, P system", _lemmaimp_explicit),
    Claim("skew_family_diagonal_identity_consequences", "diagonal identity implies zero tail, rank <= 2, additivity", _genlem0),
    Claim("rank_two_family_adapted_basis", "rank-2 family admits the adapted orthonormal basis", _genlem1),
    Claim("two_by_two_system_found_numerically", "the k=1 system is solved by search", _lemmaimp_k1, expensive=True),
    Claim("four_by_four_system_has_no_solution_evidence", "k=2 search floor stays above 1e-3", _lemmaimp_k2, expensive=True),
    Claim("three_step_einstein_constant_nonnegative_probe", "near-Einstein 3-step templates have lambda >= 0", _lambda_sign, expensive=True),
)


def run_claims(tol: float = 1e-9, include_expensive: bool = True) -> list[ClaimResult]:
    out = []
    for c in CLAIMS:
        if c.expensive and not include_expensive:
            continue
        try:
            out.append(c.check(tol))
        except Exception as exc:  # a crashing check is a failed claim
            out.append(ClaimResult(c.name, False, None, None, {"error": f"{type(exc).__name__}: {exc}"}))
    return out

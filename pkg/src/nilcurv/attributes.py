"""Splitting ``h = g ⊕ Z(h)`` of a metric Lie algebra with Euclidean center.

A nilpotent metric Lie algebra whose center is nondegenerate and positive
definite is a central extension of ``g = Z(h)^perp`` by a 2-cocycle with values
in the center.  This module extracts that data (``g``, the center metric and
the cocycle endomorphisms ``S_i``) and evaluates the Ricci and Einstein
conditions of ``h`` in terms of it.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .curvature import (
    CurvatureReport,
    EinsteinVerdict,
    derivation_residual,
    einstein_check,
    j_tensor,
    ricci,
    structure_endos,
)
from .liealg import (
    CocycleData,
    LiePresentation,
    MetricLieAlgebra,
    Subspace,
    center,
    central_extension,
    change_basis,
    cocycle_residual,
    derived_ideal,
    nilpotency_class,
    rigid_intersection,
)
from .pseudolinalg import (
    IrrationalNorm,
    MetricTensor,
    eye,
    inertia,
    inv,
    is_nondegenerate,
    is_zero,
    max_abs,
    orthogonal_complement,
    pseudo_orthonormalize,
    zeros,
)

__all__ = [
    "AttributeTriple",
    "CocycleData",
    "DegenerateCenter",
    "NonEuclideanCenter",
    "ThreeStepBlocks",
    "decompose",
    "d_operator",
    "d_operator_traces",
    "check_om_and_derivation",
    "ricci_via_attributes",
    "einstein_conditions_es",
    "es_system_matrices",
    "quasi_einstein_check",
    "three_step_blocks",
]


class DegenerateCenter(ValueError):
    pass


class NonEuclideanCenter(ValueError):
    pass


class WrongNilpotencyClass(ValueError):
    pass


class DegenerateDerived(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class AttributeTriple:
    """Attributes of ``h``: ``g`` with its metric and bracket, the center metric,
    and the cocycle.

    ``embedding`` has as columns the chosen basis of ``g`` followed by the
    chosen basis ``z_1..z_p`` of the center, in coordinates of ``source``.
    """

    g: MetricLieAlgebra
    z_metric: MetricTensor
    omega: CocycleData
    embedding: np.ndarray
    source: MetricLieAlgebra | None = None
    rigid: bool = True

    @property
    def p(self) -> int:
        return self.omega.p

    @property
    def m(self) -> int:
        return self.g.n

    def reconstruct(self) -> MetricLieAlgebra:
        """``h`` rebuilt from its attributes, in the embedding basis."""
        return central_extension(self.g, self.omega, self.z_metric)


def attributes_from(g: MetricLieAlgebra, omega: CocycleData, z_metric: MetricTensor | None = None) -> AttributeTriple:
    """Triple for an explicitly given extension (no source algebra)."""
    if z_metric is None:
        z_metric = MetricTensor(eye(omega.p, g.exact))
    n = g.n + omega.p
    return AttributeTriple(
        g, z_metric, omega, eye(n, g.exact), None, rigid_intersection(g, omega).dim == 0
    )


def decompose(h: MetricLieAlgebra) -> AttributeTriple:
    z = center(h.lie, h.tol)
    if z.dim == 0:
        raise DegenerateCenter("algebra has trivial center")
    if not is_nondegenerate(z, h.metric):
        raise DegenerateCenter("center is degenerate for the metric")
    neg, _ = inertia(h.metric.restrict(z.basis), h.tol)
    if neg:
        raise NonEuclideanCenter("center must be non degenerate Euclidean")
    try:
        zb, _ = pseudo_orthonormalize(z, h.metric)
    except IrrationalNorm:
        zb, _ = pseudo_orthonormalize(z, h.metric, normalize=False)
    comp = orthogonal_complement(Subspace(zb, h.n), h.metric)
    T = np.concatenate([comp.basis, zb], axis=0).T
    hb = change_basis(h, T)
    m = comp.dim
    c = hb.lie.c
    g = MetricLieAlgebra(
        LiePresentation(c[:m, :m, :m].copy()), MetricTensor(hb.metric.g[:m, :m].copy(), h.tol)
    )
    forms = c[:m, :m, m:].transpose(2, 0, 1)
    omega = CocycleData.from_forms(forms, g.metric)
    z_metric = MetricTensor(hb.metric.g[m:, m:].copy(), h.tol)
    res = cocycle_residual(g, omega)
    if not is_zero(res, h.tol, float(max_abs(c)) if c.size else 1.0):
        raise ValueError(f"extracted omega fails the cocycle identity ({float(res):.2e})")
    rigid = rigid_intersection(g, omega, h.tol).dim == 0
    return AttributeTriple(g, z_metric, omega, T, h, rigid)


# ---------------------------------------------------------------------------
# operators built from omega


def omega_maps(t: AttributeTriple) -> np.ndarray:
    """``W[u]`` is the ``p x m`` matrix of ``omega_u: v -> omega(u, v)``."""
    forms = t.omega.forms(t.g.metric)  # (p, m, m)
    return forms.transpose(1, 0, 2)


def s_of_center_basis(t: AttributeTriple) -> np.ndarray:
    """``S_{z_j} = sum_i <z_i, z_j> S_i`` (the map ``u -> omega_u^*(z_j)``)."""
    return np.einsum("ij,iab->jab", t.z_metric.g, t.omega.S)


def d_operator(t: AttributeTriple) -> np.ndarray:
    """``D = -sum_ij <z_i, z_j> S_i S_j``."""
    S = t.omega.S
    if t.p == 0:
        return zeros((t.m, t.m), t.g.exact)
    return -np.einsum("ij,iab,jbc->ac", t.z_metric.g, S, S)


def d_operator_traces(t: AttributeTriple) -> np.ndarray:
    """``D`` from ``<D u, v> = tr(omega_u^* omega_v)``."""
    if t.p == 0:
        return zeros((t.m, t.m), t.g.exact)
    W = omega_maps(t)
    gi = t.g.metric.inverse
    zg = t.z_metric.g
    # omega_u^* = g^{-1} W_u^T zg ; tr(omega_u^* omega_v)
    star = np.einsum("ab,ucb,cd->uad", gi, W, zg)
    form = np.einsum("uad,vda->uv", star, W)
    return gi @ form


def check_om_and_derivation(t: AttributeTriple) -> tuple[object, object]:
    """Residual of ``omega(ad_u^* v, w) + omega(v, ad_u^* w) = 0`` and the
    derivation residual of ``D``."""
    g = t.g
    D = d_operator(t)
    dres = derivation_residual(g, D)
    if t.p == 0:
        return max_abs(zeros((1,), g.exact)), dres
    gm, gi = g.metric.g, g.metric.inverse
    ad_star = np.einsum("ab,icb,cd->iad", gi, g.lie.ad, gm)
    forms = t.omega.forms(g.metric)
    t1 = np.einsum("uav,kaw->kuvw", ad_star, forms)
    t2 = np.einsum("kvb,ubw->kuvw", forms, ad_star)
    return max_abs(t1 + t2), dres


def soliton_verdict(t: AttributeTriple, tol: float | None = None) -> dict:
    """When ``omega`` satisfies the ad^*-invariance condition, test whether ``g``
    is a Ricci soliton with derivation ``D/2``."""
    tol = t.g.tol if tol is None else tol
    om, dres = check_om_and_derivation(t)
    out = {"om_residual": om, "derivation_residual": dres, "applies": is_zero(om, tol)}
    if out["applies"]:
        out["soliton"] = einstein_check(t.g, "soliton", D=d_operator(t) / 2, tol=tol)
    return out


# ---------------------------------------------------------------------------
# Ricci in terms of the attributes


def ricci_via_attributes(t: AttributeTriple) -> CurvatureReport:
    """Ricci form of ``h`` assembled blockwise from ``ric_g`` and omega."""
    g = t.g
    m, p = t.m, t.p
    exact = g.exact
    ric_g = ricci(g).ric
    gm = g.metric.g
    d_form = gm @ d_operator_traces(t)
    Sx = s_of_center_basis(t)
    J = j_tensor(g)
    R = zeros((m + p, m + p), exact)
    R[:m, :m] = ric_g - d_form / 2
    if p:
        R[m:, m:] = -np.einsum("aij,bji->ab", Sx, Sx) / 4
        ux = -np.einsum("uij,bji->ub", J, Sx) / 4
        R[:m, m:] = ux
        R[m:, :m] = ux.T
    T = t.embedding
    Ti = inv(T)
    if t.source is None:
        return CurvatureReport.from_ric(R, t.reconstruct().metric.inverse)
    ric = Ti.T @ R @ Ti
    return CurvatureReport.from_ric(ric, t.source.metric.inverse)


def es_system_matrices(t: AttributeTriple, lam) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Residual matrices of the three conditions equivalent to ``h`` being
    ``lam``-Einstein:

    ``Ric_g - lam Id - D/2``, ``tr(J_u S_x)`` and ``tr(S_x S_y) + 4 lam <x,y>_z``.
    """
    g = t.g
    m = t.m
    r1 = ricci(g).Ric - lam * eye(m, g.exact) - d_operator(t) / 2
    if t.p == 0:
        return r1, zeros((m, 0), g.exact), zeros((0, 0), g.exact)
    Sx = s_of_center_basis(t)
    J = j_tensor(g)
    r2 = np.einsum("uij,bji->ub", J, Sx)
    r3 = np.einsum("aij,bji->ab", Sx, Sx) + 4 * lam * t.z_metric.g
    return r1, r2, r3


def einstein_conditions_es(t: AttributeTriple, lam) -> tuple[object, object, object]:
    """Max-abs residuals of :func:`es_system_matrices` (zero for empty blocks)."""
    zero = Fraction(0) if t.g.exact else 0.0
    return tuple(max_abs(r) if r.size else zero for r in es_system_matrices(t, lam))


@dataclass(frozen=True)
class QuasiEinsteinVerdict:
    passed: bool
    ricci_residual: object
    trace_residual: object
    rigid: bool
    lam: object


def quasi_einstein_check(
    g: MetricLieAlgebra,
    omega: CocycleData,
    lam=0,
    z_metric: MetricTensor | None = None,
    tol: float | None = None,
) -> QuasiEinsteinVerdict:
    """``Ric_g = lam Id + D/2``, ``tr(S_x S_y) = -4 lam <x,y>`` and
    ``ker omega ∩ Z(g) = 0``."""
    tol = g.tol if tol is None else tol
    t = attributes_from(g, omega, z_metric)
    r1, _, r3 = einstein_conditions_es(t, lam)
    rigid = rigid_intersection(g, omega, tol).dim == 0
    ok = is_zero(r1, tol) and is_zero(r3, tol) and rigid
    return QuasiEinsteinVerdict(ok, r1, r3, rigid, lam)


def coboundary_primitive(t: AttributeTriple, tol: float | None = None) -> dict:
    """Least-squares ``alpha: g -> Z`` with ``omega = -alpha o [,]_g``.

    Reports whether the fit is exact; for an exact fit with an Einstein ``h``
    the Einstein constant must vanish.
    """
    tol = t.g.tol if tol is None else tol
    g = t.g.to_float()
    m = g.n
    C = g.lie.c.reshape(m * m, m)
    forms = np.asarray(t.omega.forms(t.g.metric), dtype=float)
    alpha = np.zeros((t.p, m))
    worst = 0.0
    for i in range(t.p):
        rhs = -forms[i].reshape(-1)
        sol, *_ = np.linalg.lstsq(C, rhs, rcond=None)
        alpha[i] = sol
        worst = max(worst, float(np.max(np.abs(C @ sol - rhs))) if rhs.size else 0.0)
    return {"alpha": alpha, "residual": worst, "exact": worst <= tol}


# ---------------------------------------------------------------------------
# 3-step block structure


@dataclass(frozen=True, eq=False)
class ThreeStepBlocks:
    """Blocks of the attributes relative to ``g = [g,g] ⊕ [g,g]^perp``.

    All matrices are in orthonormal bases: ``e_1..e_s`` of ``[g,g]`` (timelike
    first, signs ``eps``) and ``f_1..f_m`` of its complement (signs ``eta``).
    ``J[i]`` acts on the complement, ``B[i]: [g,g] -> complement`` and ``D[i]``
    is the skew part of ``S_i`` on the complement.
    """

    J: np.ndarray
    B: np.ndarray
    D: np.ndarray
    eps: np.ndarray
    eta: np.ndarray
    lam: float
    residuals: dict = field(default_factory=dict)

    @property
    def s(self) -> int:
        return len(self.eps)

    @property
    def m(self) -> int:
        return len(self.eta)

    @property
    def p(self) -> int:
        return self.B.shape[0]

    def b_star(self, i: int) -> np.ndarray:
        return np.diag(self.eps) @ self.B[i].T @ np.diag(self.eta)

    def type_one(self) -> dict:
        """Single-cocycle data: ``A = B^*B``, ``L`` and its rotation speeds ``mu``,
        ``w_i = B e_i`` and ``f_i = w_i / |w_i|``."""
        if self.p != 1:
            raise ValueError("type-one data needs exactly one cocycle component")
        B, L = self.B[0], self.D[0]
        w = B.T
        norms = np.linalg.norm(w, axis=1)
        f = np.divide(w, norms[:, None], out=np.zeros_like(w), where=norms[:, None] > 0)
        ev = np.linalg.eigvals(L)
        mu = np.sort(np.abs(ev.imag[ev.imag > 1e-12]))
        return {"A": self.b_star(0) @ B, "L": L, "mu": mu, "w": w, "f": f, "LB": L @ B}


def three_step_blocks(t: AttributeTriple, lam: float = 0.0, tol: float | None = None) -> ThreeStepBlocks:
    tol = t.g.tol if tol is None else tol
    g = t.g.to_float()
    cls = nilpotency_class(g.lie, tol)
    if cls > 2:
        raise WrongNilpotencyClass(f"g must be at most 2-step nilpotent, got class {cls}")
    dg = derived_ideal(g.lie, tol)
    if not is_nondegenerate(dg, g.metric):
        raise DegenerateDerived("[g,g] is degenerate")
    b0, eps = pseudo_orthonormalize(dg, g.metric) if dg.dim else (np.zeros((0, g.n)), [])
    perp = orthogonal_complement(dg, g.metric)
    fb, eta = pseudo_orthonormalize(perp, g.metric)
    s, m = len(eps), len(eta)
    P = np.concatenate([b0, fb], axis=0).T
    Pi = np.linalg.inv(P)

    se = structure_endos(g, b0) if s else None
    Jn = np.stack([Pi @ j @ P for j in se.J]) if s else np.zeros((0, g.n, g.n))
    J = Jn[:, s:, s:]

    # orthonormalise the center basis
    zg = np.asarray(t.z_metric.g, dtype=float)
    if t.p:
        zr, _ = pseudo_orthonormalize(Subspace(np.eye(t.p), t.p), MetricTensor(zg, tol))
        Sz = np.einsum("ij,aj,ikl->akl", zg, zr, np.asarray(t.omega.S, dtype=float))
        Sn = np.stack([Pi @ x @ P for x in Sz])
    else:
        Sn = np.zeros((0, g.n, g.n))
    B = Sn[:, s:, :s]
    D = Sn[:, s:, s:]
    p = Sn.shape[0]
    E, H = np.diag(eps), np.diag(eta)

    blocks = ThreeStepBlocks(J, B, D, np.asarray(eps, float), np.asarray(eta, float), lam)
    bstar = [blocks.b_star(i) for i in range(p)]
    eq1 = sum((e / 2) * (j @ j) for e, j in zip(eps, J)) if s else np.zeros((m, m))
    eq1 = eq1 + sum(0.5 * (D[i] @ D[i] - B[i] @ bstar[i]) for i in range(p)) - lam * np.eye(m)
    trJJ = np.einsum("iab,jba->ij", J, J) if s else np.zeros((0, 0))
    # u -> sum_ij <e_i, u> tr(J_i J_j) e_j ; column k (u = e_k): eps_k tr(J_k J_j) e_j
    eq2 = (trJJ * np.asarray(eps)[None, :]).T if s else np.zeros((0, 0))
    eq2 = eq2 + sum(2 * bstar[i] @ B[i] for i in range(p)) + 4 * lam * np.eye(s)
    eq3 = np.zeros((p, p))
    for i in range(p):
        for j in range(p):
            eq3[i, j] = np.trace(D[i] @ D[j]) - 2 * np.trace(bstar[i] @ B[j]) + 4 * lam * (i == j)
    sum_trD2 = float(sum(np.trace(d @ d) for d in D))
    predicted = -4 * (2 * s + m + 3 * p) * lam
    combo = -4 * np.trace(eq1) + 2 * np.trace(eq2) + 3 * np.trace(eq3)
    res = {
        "eq1": float(np.max(np.abs(eq1))) if eq1.size else 0.0,
        "eq2": float(np.max(np.abs(eq2))) if eq2.size else 0.0,
        "eq3": float(np.max(np.abs(eq3))) if eq3.size else 0.0,
        "sum_tr_D2": sum_trD2,
        "trace_identity_rhs": predicted,
        "trace_identity_gap": sum_trD2 - predicted,
        "trace_identity_combo": float(combo),
        "s_gg_block": float(np.max(np.abs(Sn[:, :s, :s]))) if p and s else 0.0,
        "s_skew_block": float(max((np.max(np.abs(Sn[i, :s, s:] + bstar[i])) for i in range(p)), default=0.0))
        if s
        else 0.0,
        "derived_lorentzian": sum(1 for e in eps if e < 0) == 1,
        "center_equals_derived": center(g.lie, tol).equals(dg, 1e-8),
        "d_skew": [float(np.trace(d @ d)) for d in D],
    }
    object.__setattr__(blocks, "residuals", res)
    return blocks

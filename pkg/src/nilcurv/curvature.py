"""Levi-Civita product, curvature and Ricci tensors of metric Lie algebras."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .liealg import MetricLieAlgebra, NotNilpotent, Subspace, derived_ideal, is_nilpotent
from .pseudolinalg import adjoint, eye, inv, is_exact, is_zero, max_abs, rank, zeros


class BasisDoesNotSpanDerived(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class CurvatureReport:
    """Ricci data of a metric Lie algebra.

    ``ric`` is the bilinear form, ``Ric`` the operator ``g^{-1} ric``.
    """

    ric: np.ndarray
    Ric: np.ndarray
    scalar: object
    lambda_star: object
    einstein_residual: object
    J1: np.ndarray | None = None
    J2: np.ndarray | None = None

    @classmethod
    def from_ric(cls, ric: np.ndarray, g_inv: np.ndarray, **extra) -> "CurvatureReport":
        Ric = g_inv @ ric
        n = ric.shape[0]
        scalar = np.trace(Ric)
        lam = scalar / n if n else scalar
        resid = max_abs(Ric - lam * eye(n, is_exact(ric)))
        return cls(ric, Ric, scalar, lam, resid, **extra)

    @property
    def ricci_flat_residual(self):
        return max_abs(self.ric)


@dataclass(frozen=True, eq=False)
class StructureEndos:
    """``[u, v] = sum_i <J_i u, v> e_i`` for a basis ``e_i`` (rows) of ``[g, g]``."""

    basis: np.ndarray
    J: np.ndarray


def koszul_tensor(a: MetricLieAlgebra) -> np.ndarray:
    """``L[i]`` is the matrix of ``L_{e_i}``; column j is ``L_{e_i} e_j``."""
    g = a.metric.g
    cg = np.einsum("ijk,kl->ijl", a.lie.c, g)  # <[e_i,e_j], e_l>
    low = (cg + np.einsum("lij->ijl", cg) + np.einsum("lji->ijl", cg)) / 2
    # <L_i e_j, e_l> = low[i,j,l]  =>  L_i e_j = g^{-1} low[i,j,:]
    return np.einsum("ml,ijl->imj", a.metric.inverse, low)


def levi_civita(a: MetricLieAlgebra, u, v) -> np.ndarray:
    L = koszul_tensor(a)
    return np.einsum("i,imj,j->m", np.asarray(u), L, np.asarray(v))


def _op(tensor: np.ndarray, u) -> np.ndarray:
    return np.einsum("i,imj->mj", np.asarray(u), tensor)


def curvature_op(a: MetricLieAlgebra, u, v, L: np.ndarray | None = None) -> np.ndarray:
    """``K(u, v) = L_{[u,v]} - [L_u, L_v]``."""
    L = koszul_tensor(a) if L is None else L
    Lu, Lv = _op(L, u), _op(L, v)
    return _op(L, a.lie.bracket(np.asarray(u), np.asarray(v))) - (Lu @ Lv - Lv @ Lu)


def curvature_tensor(a: MetricLieAlgebra) -> np.ndarray:
    """``K[i, k]`` is the matrix of ``K(e_i, e_k)``."""
    L = koszul_tensor(a)
    Lbr = np.einsum("ikm,mab->ikab", a.lie.c, L)
    comm = np.einsum("iab,kbc->ikac", L, L)
    return Lbr - (comm - comm.transpose(1, 0, 2, 3))


def is_flat(a: MetricLieAlgebra) -> bool:
    return is_zero(max_abs(curvature_tensor(a)), a.tol)


def ricci_general(a: MetricLieAlgebra) -> CurvatureReport:
    """Ricci form by tracing the curvature: ``ric(u, v) = tr(w -> K(u, w) v)``."""
    K = curvature_tensor(a)
    ric = np.einsum("ikkj->ij", K)
    return CurvatureReport.from_ric(ric, a.metric.inverse)


def j_operators(a: MetricLieAlgebra) -> tuple[np.ndarray, np.ndarray]:
    """Bilinear forms ``j1(u,v) = tr(ad_u ad_v^*)`` and ``j2(u,v) = -tr(J_u J_v)``."""
    ad = a.lie.ad
    g, gi = a.metric.g, a.metric.inverse
    ad_star = np.einsum("ab,icb,cd->iad", gi, ad, g)  # g^{-1} ad_i^T g
    j1 = np.einsum("iab,jba->ij", ad, ad_star)
    Jt = j_tensor(a, ad_star)
    j2 = -np.einsum("iab,jba->ij", Jt, Jt)
    return j1, j2


def j_tensor(a: MetricLieAlgebra, ad_star: np.ndarray | None = None) -> np.ndarray:
    """``J[i]`` is the matrix of ``J_{e_i}: v -> ad_v^* e_i``."""
    if ad_star is None:
        g, gi = a.metric.g, a.metric.inverse
        ad_star = np.einsum("ab,icb,cd->iad", gi, a.lie.ad, g)
    # column j of J_i is ad_j^* e_i = ad_star[j][:, i]
    return np.einsum("jai->iaj", ad_star)


def ricci_nilpotent(a: MetricLieAlgebra, check: bool = True) -> CurvatureReport:
    """``Ric = -1/2 J1 + 1/4 J2`` for nilpotent algebras."""
    if check and not is_nilpotent(a.lie, a.tol):
        raise NotNilpotent("ricci_nilpotent requires a nilpotent algebra")
    j1, j2 = j_operators(a)
    gi = a.metric.inverse
    ric = -j1 / 2 + j2 / 4
    return CurvatureReport.from_ric(ric, gi, J1=gi @ j1, J2=gi @ j2)


def ricci(a: MetricLieAlgebra) -> CurvatureReport:
    if is_nilpotent(a.lie, a.tol):
        return ricci_nilpotent(a, check=False)
    return ricci_general(a)


def structure_endos(a: MetricLieAlgebra, basis=None) -> StructureEndos:
    """Skew family reconstructing the bracket against a basis of ``[g, g]``."""
    n = a.n
    exact = a.exact
    if basis is None:
        basis = derived_ideal(a.lie, a.tol).basis
    basis = np.asarray(basis) if not isinstance(basis, np.ndarray) else basis
    s = basis.shape[0]
    if s == 0:
        if derived_ideal(a.lie, a.tol).dim:
            raise BasisDoesNotSpanDerived("empty basis for a non-abelian algebra")
        return StructureEndos(basis.reshape(0, n), zeros((0, n, n), exact))
    if rank(basis, a.tol) < s:
        raise BasisDoesNotSpanDerived("basis vectors are dependent")
    # solve c[a,b,:] = coef[a,b,:] @ basis  in least squares / exactly
    E = basis.T
    gram = basis @ basis.T
    coef = np.einsum("abk,kr,rs->abs", a.lie.c, E, inv(gram))
    recon = np.einsum("abs,sk->abk", coef, basis)
    if not is_zero(max_abs(recon - a.lie.c), a.tol, float(max_abs(a.lie.c))):
        raise BasisDoesNotSpanDerived("bracket values leave the span of the basis")
    if not derived_ideal(a.lie, a.tol).issubset(Subspace(basis, n), a.tol) or s != derived_ideal(
        a.lie, a.tol
    ).dim:
        raise BasisDoesNotSpanDerived("basis does not span [g,g]")
    # coef[a,b,i] = <J_i e_a, e_b> = (g J_i)[b, a]
    J = np.stack([a.metric.inverse @ coef[:, :, i].T for i in range(s)])
    return StructureEndos(basis, J)


def j1_from_endos(a: MetricLieAlgebra, se: StructureEndos) -> np.ndarray:
    """``J1 = -sum_ij <e_i, e_j> J_i J_j``."""
    gram = a.metric.restrict(se.basis)
    return -np.einsum("ij,iab,jbc->ac", gram, se.J, se.J)


def j2_from_endos(a: MetricLieAlgebra, se: StructureEndos) -> np.ndarray:
    """``J2 u = -sum_ij <e_i, u> tr(J_i J_j) e_j``."""
    tr = np.einsum("iab,jba->ij", se.J, se.J)
    # matrix: column u -> sum_ij (basis_i . g)_u tr_ij basis_j
    bg = se.basis @ a.metric.g
    return -np.einsum("iu,ij,jk->ku", bg, tr, se.basis)


@dataclass(frozen=True)
class EinsteinVerdict:
    mode: str
    passed: bool
    residual: object
    lam: object
    derivation_residual: object = None
    details: dict = field(default_factory=dict)


def derivation_residual(a: MetricLieAlgebra, D: np.ndarray):
    """Max of ``|D[u,v] - [Du,v] - [u,Dv]|`` over basis pairs."""
    c = a.lie.c
    lhs = np.einsum("ijk,mk->ijm", c, D)
    r1 = np.einsum("ai,ajm->ijm", D, c)
    r2 = np.einsum("bj,ibm->ijm", D, c)
    return max_abs(lhs - r1 - r2)


def einstein_check(
    a: MetricLieAlgebra,
    mode: str = "einstein",
    D: np.ndarray | None = None,
    tol: float | None = None,
    report: CurvatureReport | None = None,
) -> EinsteinVerdict:
    """Einstein / Ricci-flat / soliton verdict with residuals.

    ``mode="soliton"`` needs ``D``; lambda is the Frobenius minimiser of
    ``Ric - lambda Id - D`` and the derivation property of ``D`` is reported
    separately.
    """
    tol = a.tol if tol is None else tol
    rep = ricci(a) if report is None else report
    n = a.n
    if mode == "einstein":
        res = rep.einstein_residual
        return EinsteinVerdict(mode, is_zero(res, tol), res, rep.lambda_star)
    if mode == "ricci_flat":
        res = rep.ricci_flat_residual
        return EinsteinVerdict(mode, is_zero(res, tol), res, Fraction(0) if a.exact else 0.0)
    if mode == "soliton":
        if D is None:
            raise ValueError("soliton mode needs a candidate derivation D")
        diff = rep.Ric - D
        lam = np.trace(diff) / n
        res = max_abs(diff - lam * eye(n, a.exact))
        dres = derivation_residual(a, D)
        ok = is_zero(res, tol) and is_zero(dres, tol)
        return EinsteinVerdict(mode, ok, res, lam, derivation_residual=dres)
    raise ValueError(f"unknown mode {mode!r}")


def metric_skew_residual(a: MetricLieAlgebra, F: np.ndarray):
    return max_abs(adjoint(F, a.metric) + F)

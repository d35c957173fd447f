"""Lie algebras given by structure constants, and metric Lie algebras."""
from __future__ import annotations

import functools
import logging
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .pseudolinalg import (
    MetricTensor,
    Subspace,
    as_array,
    default_tol,
    eye,
    inv,
    is_exact,
    is_zero,
    max_abs,
    nullspace,
    rank,
    zeros,
)

log = logging.getLogger(__name__)


class DimensionMismatch(ValueError):
    pass


class NotNilpotent(ValueError):
    pass


class NotACocycle(ValueError):
    pass


class SingularTransform(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class LiePresentation:
    """Structure constants ``c[i, j, k]`` with ``[e_i, e_j] = sum_k c[i, j, k] e_k``.

    Indices are 0-based.  The tensor is stored densely and always
    antisymmetric in ``(i, j)``.
    """

    c: np.ndarray

    def __post_init__(self):
        c = self.c
        if c.ndim != 3 or not (c.shape[0] == c.shape[1] == c.shape[2]):
            raise DimensionMismatch(f"structure constants must be n x n x n, got {c.shape}")
        if c.dtype != object:
            object.__setattr__(self, "c", np.asarray(c, dtype=float))
        if max_abs(self.c + self.c.transpose(1, 0, 2)) != 0:
            raise ValueError("structure constants are not antisymmetric")
        # presentations are values: freeze the tensor so memoised subspaces stay valid
        if self.c.base is not None or self.c.flags.writeable:
            frozen = self.c.copy()
            frozen.flags.writeable = False
            object.__setattr__(self, "c", frozen)
        object.__setattr__(self, "_memo", {})

    @classmethod
    def from_brackets(
        cls,
        n: int,
        brackets: Mapping[tuple[int, int], Mapping[int, object]] | Iterable[tuple[int, int, int, object]],
        exact: bool = False,
    ) -> "LiePresentation":
        """Build from ``{(i, j): {k: coeff}}`` or ``(i, j, k, coeff)`` records (0-based).

        Pairs with ``i > j`` are stored as ``-[e_j, e_i]``; repeated records add up.
        """
        c = zeros((n, n, n), exact)
        if isinstance(brackets, Mapping):
            records = [(i, j, k, v) for (i, j), row in brackets.items() for k, v in row.items()]
        else:
            records = list(brackets)
        for i, j, k, v in records:
            if i == j:
                raise ValueError(f"[e_{i}, e_{i}] must vanish")
            val = as_array([v], exact)[0]
            c[i, j, k] = c[i, j, k] + val
            c[j, i, k] = c[j, i, k] - val
        return cls(c)

    @classmethod
    def abelian(cls, n: int, exact: bool = False) -> "LiePresentation":
        return cls(zeros((n, n, n), exact))

    @property
    def n(self) -> int:
        return self.c.shape[0]

    @property
    def exact(self) -> bool:
        return is_exact(self.c)

    def bracket(self, u, v) -> np.ndarray:
        u, v = np.asarray(u), np.asarray(v)
        if u.shape != (self.n,) or v.shape != (self.n,):
            raise DimensionMismatch(f"expected vectors of length {self.n}")
        return np.einsum("ijk,i,j->k", self.c, u, v)

    @property
    def ad(self) -> np.ndarray:
        """``ad[i]`` is the matrix of ``ad_{e_i}`` (column j is ``[e_i, e_j]``)."""
        return self.c.transpose(0, 2, 1)

    def ad_of(self, u) -> np.ndarray:
        return np.einsum("i,ikj->kj", np.asarray(u), self.ad.transpose(0, 1, 2))

    def to_float(self) -> "LiePresentation":
        return LiePresentation(np.asarray(self.c, dtype=float))

    def nonzero_brackets(self, tol: float = 0.0) -> list[tuple[int, int, int, object]]:
        out = []
        for i in range(self.n):
            for j in range(i + 1, self.n):
                for k in range(self.n):
                    v = self.c[i, j, k]
                    if (v != 0) if self.exact else abs(v) > tol:
                        out.append((i, j, k, v))
        return out


def bracket(a: LiePresentation, u, v) -> np.ndarray:
    return a.bracket(u, v)


def jacobi_tensor(a: LiePresentation) -> np.ndarray:
    """``J[i, j, l] = [[e_i,e_j],e_l] + [[e_j,e_l],e_i] + [[e_l,e_i],e_j]``."""
    t = np.einsum("ijk,klm->ijlm", a.c, a.c)
    return t + np.einsum("jlim->ijlm", t) + np.einsum("lijm->ijlm", t)


def jacobi_residual(a: LiePresentation):
    return max_abs(jacobi_tensor(a))


def _memoised(fn):
    """Cache a ``fn(a, tol)`` bracket-only computation on the presentation."""

    @functools.wraps(fn)
    def wrapper(a: LiePresentation, tol: float | None = None):
        key = (fn.__name__, default_tol() if tol is None else tol)
        memo = a._memo
        if key not in memo:
            try:
                memo[key] = (True, fn(a, tol))
            except NotNilpotent as exc:
                memo[key] = (False, exc)
        ok, val = memo[key]
        if not ok:
            raise val
        return list(val) if isinstance(val, list) else val

    return wrapper


@_memoised
def derived_ideal(a: LiePresentation, tol: float | None = None) -> Subspace:
    return Subspace.span(a.c.reshape(a.n * a.n, a.n), a.n, a.exact, tol)


def bracket_span(a: LiePresentation, s: Subspace, t: Subspace, tol: float | None = None) -> Subspace:
    """Span of ``[s, t]``."""
    if s.dim == 0 or t.dim == 0:
        return Subspace.zero(a.n, a.exact)
    if a.exact:
        vecs = np.einsum("ijk,ai,bj->abk", a.c, s.basis, t.basis).reshape(-1, a.n)
        return Subspace.span(vecs, a.n, True, tol)
    # float: bracket orthonormal bases so that rounding is measured against
    # the size of the structure constants, not against RREF row entries
    tol = default_tol() if tol is None else tol
    qs = np.linalg.qr(np.asarray(s.basis, dtype=float).T)[0].T
    qt = np.linalg.qr(np.asarray(t.basis, dtype=float).T)[0].T
    vecs = np.einsum("ijk,ai,bj->abk", a.c, qs, qt).reshape(-1, a.n)
    _, sv, vt = np.linalg.svd(vecs, full_matrices=False)
    r = int(np.sum(sv > tol * max(1.0, float(np.max(np.abs(a.c)))))) if sv.size else 0
    return Subspace.span(vt[:r], a.n, False, tol)


@_memoised
def lower_central_series(a: LiePresentation, tol: float | None = None) -> list[Subspace]:
    """``[C^1 = h, C^2 = [h,h], ..., C^{k+1} = 0]``; the class is ``len - 1``.

    Raises NotNilpotent when the chain stabilises at a nonzero term.
    """
    n = a.n
    whole = Subspace(eye(n, a.exact), n)
    chain = [whole]
    for _ in range(n + 1):
        last = chain[-1]
        if last.dim == 0:
            return chain
        nxt = bracket_span(a, last, whole, tol)
        if nxt.dim == last.dim:
            raise NotNilpotent(f"lower central series stabilises at dimension {nxt.dim}")
        chain.append(nxt)
    raise NotNilpotent("lower central series did not terminate")


def nilpotency_class(a: LiePresentation, tol: float | None = None) -> int:
    if a.n == 0:
        return 0
    return len(lower_central_series(a, tol)) - 1


def is_nilpotent(a: LiePresentation, tol: float | None = None) -> bool:
    try:
        lower_central_series(a, tol)
    except NotNilpotent:
        return False
    return True


@_memoised
def center(a: LiePresentation, tol: float | None = None) -> Subspace:
    """Kernel of ``u -> ad_u``."""
    n = a.n
    # row (j, k), column i: coefficient of e_k in [e_i, e_j]
    m = a.c.transpose(1, 2, 0).reshape(n * n, n)
    ker = nullspace(m, tol)
    return Subspace(ker, n)


# ---------------------------------------------------------------------------
# metric Lie algebras and cocycles


@dataclass(frozen=True, eq=False)
class MetricLieAlgebra:
    lie: LiePresentation
    metric: MetricTensor

    def __post_init__(self):
        if self.lie.n != self.metric.n:
            raise DimensionMismatch(
                f"structure constants have dimension {self.lie.n}, metric {self.metric.n}"
            )
        if self.lie.exact != self.metric.exact:
            raise ValueError("exact and float data cannot be mixed")

    @property
    def n(self) -> int:
        return self.lie.n

    @property
    def exact(self) -> bool:
        return self.lie.exact

    @property
    def tol(self) -> float:
        return self.metric.tol

    def to_float(self) -> "MetricLieAlgebra":
        if not self.exact:
            return self
        return MetricLieAlgebra(self.lie.to_float(), self.metric.to_float())


@dataclass(frozen=True, eq=False)
class CocycleData:
    """Cocycle endomorphisms ``S_1..S_p`` on ``g``.

    ``omega(u, v) = sum_i <S_i u, v>_g z_i`` for a fixed basis ``z_i`` of the
    value space.  ``S`` has shape ``(p, m, m)``.
    """

    S: np.ndarray

    @classmethod
    def from_forms(cls, forms, metric: MetricTensor) -> "CocycleData":
        """From skew bilinear forms ``W_i[u, v] = <S_i u, v>``."""
        forms = np.asarray(forms)
        if forms.ndim == 2:
            forms = forms[None]
        if forms.shape[0] == 0:
            return cls(zeros((0, metric.n, metric.n), metric.exact))
        # W = S^T g  =>  S = g^{-1} W^T
        return cls(np.stack([metric.inverse @ w.T for w in forms]))

    @classmethod
    def zero(cls, m: int, p: int, exact: bool = False) -> "CocycleData":
        return cls(zeros((p, m, m), exact))

    @property
    def p(self) -> int:
        return self.S.shape[0]

    @property
    def g_dim(self) -> int:
        return self.S.shape[1]

    def forms(self, metric: MetricTensor) -> np.ndarray:
        """``W[i, u, v] = <S_i u, v>_g``."""
        if self.p == 0:
            return zeros((0, metric.n, metric.n), metric.exact)
        return np.stack([s.T @ metric.g for s in self.S])

    def omega(self, metric: MetricTensor, u, v) -> np.ndarray:
        return np.einsum("iab,a,b->i", self.forms(metric), np.asarray(u), np.asarray(v))

    def scaled(self, factor) -> "CocycleData":
        return CocycleData(self.S * factor)


def cocycle_residual(g: MetricLieAlgebra, omega: CocycleData):
    """Max of ``|omega([u,v],w) + omega([v,w],u) + omega([w,u],v)|`` over basis triples."""
    if omega.p == 0:
        return max_abs(zeros((1,), g.exact))
    w = omega.forms(g.metric)
    c = g.lie.c
    t = np.einsum("abk,ikd->iabd", c, w)
    cyc = t + np.einsum("ibda->iabd", t) + np.einsum("idab->iabd", t)
    return max_abs(cyc)


def skew_residual(g: MetricLieAlgebra, omega: CocycleData):
    if omega.p == 0:
        return max_abs(zeros((1,), g.exact))
    return max(max_abs(g.metric.g @ s + (g.metric.g @ s).T) for s in omega.S)


def kernel_of_omega(g: MetricLieAlgebra, omega: CocycleData, tol: float | None = None) -> Subspace:
    n = g.n
    if omega.p == 0:
        return Subspace(eye(n, g.exact), n)
    return Subspace(nullspace(np.concatenate(list(omega.S), axis=0), tol), n)


def rigid_intersection(g: MetricLieAlgebra, omega: CocycleData, tol: float | None = None) -> Subspace:
    """``Z(g) ∩ ker omega`` (zero exactly when the extension is rigid)."""
    return center(g.lie, tol).intersect(kernel_of_omega(g, omega, tol), tol)


def central_extension(
    g: MetricLieAlgebra, omega: CocycleData, z_metric: MetricTensor, tol: float | None = None
) -> MetricLieAlgebra:
    """``h = g ⊕ V`` with ``[u, v] = [u, v]_g + omega(u, v)`` and block metric.

    Extension coordinates are appended after those of ``g``.
    """
    tol = g.tol if tol is None else tol
    m, p = g.n, omega.p
    if omega.g_dim != m and p:
        raise DimensionMismatch("cocycle and algebra dimensions differ")
    if z_metric.n != p:
        raise DimensionMismatch("z_metric must match the number of cocycle components")
    res = cocycle_residual(g, omega)
    if not is_zero(res, tol):
        raise NotACocycle(f"cocycle identity residual {float(res):.3e}")
    skew = skew_residual(g, omega)
    if not is_zero(skew, tol, float(max_abs(omega.S)) if p else 1.0):
        raise ValueError(f"cocycle forms are not skew ({float(skew):.3e})")
    if rigid_intersection(g, omega, tol).dim:
        log.info("extension is not rigid: Z(g) meets ker(omega)")
    n = m + p
    exact = g.exact
    c = zeros((n, n, n), exact)
    c[:m, :m, :m] = g.lie.c
    if p:
        w = omega.forms(g.metric)
        # float round trips through g^{-1} leave O(eps) asymmetry; keep the skew part
        w = (w - w.transpose(0, 2, 1)) / 2
        c[:m, :m, m:] = w.transpose(1, 2, 0)
    metric = zeros((n, n), exact)
    metric[:m, :m] = g.metric.g
    metric[m:, m:] = z_metric.g
    return MetricLieAlgebra(LiePresentation(c), MetricTensor(metric, g.tol))


def change_basis(a: MetricLieAlgebra, t) -> MetricLieAlgebra:
    """Express ``a`` in the basis ``f_j = sum_i t[i, j] e_i`` (columns of ``t``)."""
    t = as_array(t, a.exact) if not isinstance(t, np.ndarray) else t
    if t.shape != (a.n, a.n):
        raise DimensionMismatch("transform has wrong shape")
    if rank(t, a.tol) < a.n:
        raise SingularTransform("basis change is not invertible")
    tinv = inv(t)
    c = _transport(a.lie.c, t, tinv)
    g = t.T @ a.metric.g @ t
    g = (g + g.T) / 2
    return MetricLieAlgebra(LiePresentation(_antisym(c)), MetricTensor(g, a.tol))


def _transport(c: np.ndarray, t: np.ndarray, tinv: np.ndarray) -> np.ndarray:
    """``c'[a,b,c] = sum t[i,a] t[j,b] c[i,j,k] tinv[c,k]``, one index at a time."""
    out = np.tensordot(t, c, axes=([0], [0]))  # a j k
    out = np.tensordot(out, t, axes=([1], [0]))  # a k b
    out = np.tensordot(out, tinv, axes=([1], [1]))  # a b c
    return out


def _antisym(c: np.ndarray) -> np.ndarray:
    return (c - c.transpose(1, 0, 2)) / 2


def transport_presentation(lie: LiePresentation, t: np.ndarray) -> LiePresentation:
    tinv = inv(t)
    return LiePresentation(_antisym(_transport(lie.c, t, tinv)))


def random_cocycle_space(g: LiePresentation, tol: float | None = None) -> np.ndarray:
    """Basis of the space of 2-cocycles as skew ``n x n`` matrices ``W``.

    Unknowns are ``W[a, b]`` for ``a < b``; constraints are the cyclic
    identity on all basis triples.
    """
    n = g.n
    pairs = [(a, b) for a in range(n) for b in range(a + 1, n)]
    idx = {p: i for i, p in enumerate(pairs)}
    exact = g.exact
    rows = []

    def coeff(row, k, d, val):
        if k == d:
            return
        if k < d:
            row[idx[(k, d)]] += val
        else:
            row[idx[(d, k)]] -= val

    for a in range(n):
        for b in range(a + 1, n):
            for d in range(b + 1, n):
                row = zeros(len(pairs), exact)
                for k in range(n):
                    coeff(row, k, d, g.c[a, b, k])
                    coeff(row, k, a, g.c[b, d, k])
                    coeff(row, k, b, g.c[d, a, k])
                rows.append(row)
    if not pairs:
        return zeros((0, n, n), exact)
    if rows:
        ker = nullspace(np.vstack(rows), tol)
    else:
        ker = eye(len(pairs), exact)
    out = zeros((ker.shape[0], n, n), exact)
    for r in range(ker.shape[0]):
        for (a, b), i in idx.items():
            out[r, a, b] = ker[r, i]
            out[r, b, a] = -ker[r, i]
    return out


def is_zero_matrix(x, tol: float | None = None) -> bool:
    return is_zero(max_abs(x), default_tol() if tol is None else tol)

"""Pseudo-Euclidean linear algebra over exact rationals or float64.

Exact mode is represented by numpy arrays of ``dtype=object`` holding
:class:`fractions.Fraction` entries; float mode by ordinary ``float64`` arrays.
The two are never mixed inside one computation.
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from numbers import Rational
from typing import Sequence

import numpy as np

DEFAULT_TOL = 1e-9


class DegenerateMetric(ValueError):
    pass


class DegenerateSubspace(ValueError):
    pass


class IrrationalNorm(ValueError):
    """Raised when exact normalisation would need an irrational square root."""


def default_tol() -> float:
    env = os.environ.get("NILCURV_TOL")
    return float(env) if env else DEFAULT_TOL


# ---------------------------------------------------------------------------
# scalars and arrays


def _to_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (bool, np.bool_)):
        raise TypeError("booleans are not scalars")
    if isinstance(x, (int, np.integer, Rational)):
        return Fraction(int(x)) if isinstance(x, (int, np.integer)) else Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"exact mode admits only rational inputs, got {type(x).__name__}")


def exact_array(data) -> np.ndarray:
    """Object array of Fractions; floats are rejected."""
    arr = np.asarray(data, dtype=object)
    out = np.empty(arr.shape, dtype=object)
    for idx in np.ndindex(arr.shape):
        out[idx] = _to_fraction(arr[idx])
    return out


def float_array(data) -> np.ndarray:
    arr = np.asarray(data, dtype=object) if _has_fraction(data) else np.asarray(data)
    return np.asarray(arr, dtype=float)


def _has_fraction(data) -> bool:
    return isinstance(data, np.ndarray) and data.dtype == object


def as_array(data, exact: bool) -> np.ndarray:
    return exact_array(data) if exact else float_array(data)


def is_exact(a: np.ndarray) -> bool:
    return a.dtype == object


def zeros(shape, exact: bool) -> np.ndarray:
    if exact:
        out = np.empty(shape, dtype=object)
        out.fill(Fraction(0))
        return out
    return np.zeros(shape)


def eye(n: int, exact: bool) -> np.ndarray:
    out = zeros((n, n), exact)
    for i in range(n):
        out[i, i] = Fraction(1) if exact else 1.0
    return out


def max_abs(a) -> Fraction | float:
    a = np.asarray(a)
    if a.size == 0:
        return Fraction(0) if a.dtype == object else 0.0
    if a.dtype == object:
        return max(abs(x) for x in a.flat)
    return float(np.max(np.abs(a)))


def is_zero(x, tol: float, scale: float = 1.0) -> bool:
    if isinstance(x, Fraction):
        return x == 0
    return abs(x) <= tol * max(scale, 1.0)


def exact_sqrt(x: Fraction) -> Fraction | None:
    """Rational square root of ``x`` if it exists."""
    if x < 0:
        return None
    n, d = x.numerator, x.denominator
    rn, rd = math.isqrt(n), math.isqrt(d)
    if rn * rn == n and rd * rd == d:
        return Fraction(rn, rd)
    return None


# ---------------------------------------------------------------------------
# elimination


def rref(m: np.ndarray, tol: float | None = None) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form and pivot columns.

    Float mode uses partial pivoting and treats entries below
    ``tol * max|m|`` as zero.
    """
    exact = is_exact(m)
    a = m.copy() if exact else np.array(m, dtype=float)
    rows, cols = a.shape
    tol = default_tol() if tol is None else tol
    thresh = 0.0 if exact else tol * max(1.0, float(np.max(np.abs(a))) if a.size else 1.0)
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r >= rows:
            break
        if exact:
            piv = next((i for i in range(r, rows) if a[i, c] != 0), None)
        else:
            i = r + int(np.argmax(np.abs(a[r:, c])))
            piv = i if abs(a[i, c]) > thresh else None
        if piv is None:
            continue
        if piv != r:
            a[[r, piv]] = a[[piv, r]]
        a[r] = a[r] / a[r, c]
        for i in range(rows):
            if i != r and (a[i, c] != 0):
                a[i] = a[i] - a[i, c] * a[r]
        if not exact:
            a[np.abs(a) <= thresh] = 0.0
        pivots.append(c)
        r += 1
    return a, pivots


def rank(m: np.ndarray, tol: float | None = None) -> int:
    if m.size == 0:
        return 0
    if is_exact(m):
        return len(rref(m)[1])
    tol = default_tol() if tol is None else tol
    s = np.linalg.svd(np.asarray(m, dtype=float), compute_uv=False)
    return int(np.sum(s > tol * max(s[0], 1e-300))) if s.size and s[0] > 0 else 0


def nullspace(m: np.ndarray, tol: float | None = None) -> np.ndarray:
    """Rows spanning ``{x : m x = 0}``.

    Exact mode reads the kernel off the RREF; float mode takes right singular
    vectors whose singular value is at most ``tol * sigma_max`` and then puts
    them in canonical (RREF) form.
    """
    exact = is_exact(m)
    n = m.shape[1]
    if m.shape[0] == 0:
        return eye(n, exact)
    tol = default_tol() if tol is None else tol
    if exact:
        r, pivots = rref(m)
        free = [c for c in range(n) if c not in pivots]
        basis = zeros((len(free), n), True)
        for row, f in enumerate(free):
            basis[row, f] = Fraction(1)
            for pr, pc in enumerate(pivots):
                basis[row, pc] = -r[pr, f]
        return basis
    mf = np.asarray(m, dtype=float)
    _, s, vt = np.linalg.svd(mf)
    smax = s[0] if s.size else 0.0
    if smax == 0.0:
        return np.eye(n)
    r = int(np.sum(s > tol * smax))
    return canonical_basis(vt[r:], tol)


def canonical_basis(rows: np.ndarray, tol: float | None = None) -> np.ndarray:
    """Canonical (RREF) basis of the row span, zero rows dropped."""
    if rows.shape[0] == 0:
        return rows
    if not is_exact(rows):
        # rank and an orthonormal row basis from the SVD first; eliminating on
        # the raw, possibly nearly dependent, rows amplifies rounding errors
        tol = default_tol() if tol is None else tol
        _, s, vt = np.linalg.svd(np.asarray(rows, dtype=float), full_matrices=False)
        r = int(np.sum(s > tol * max(1.0, s[0]))) if s.size else 0
        if r == 0:
            return np.zeros((0, rows.shape[1]))
        rows = vt[:r]
    r, piv = rref(rows, tol)
    return r[: len(piv)]


def inv(m: np.ndarray) -> np.ndarray:
    n = m.shape[0]
    if not is_exact(m):
        return np.linalg.inv(m)
    aug = np.concatenate([m, eye(n, True)], axis=1)
    r, piv = rref(aug)
    if piv[:n] != list(range(n)):
        raise np.linalg.LinAlgError("singular matrix")
    return r[:, n:]


def det(m: np.ndarray):
    if not is_exact(m):
        return float(np.linalg.det(m))
    a = m.copy()
    n = a.shape[0]
    d = Fraction(1)
    for c in range(n):
        piv = next((i for i in range(c, n) if a[i, c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            a[[c, piv]] = a[[piv, c]]
            d = -d
        d *= a[c, c]
        for i in range(c + 1, n):
            if a[i, c] != 0:
                a[i] = a[i] - (a[i, c] / a[c, c]) * a[c]
    return d


def solve(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if not is_exact(a):
        return np.linalg.solve(a, b)
    return inv(a) @ b


# ---------------------------------------------------------------------------
# metric tensors


def _degenerate(g: np.ndarray, tol: float) -> bool:
    """Exact: zero determinant.  Float: ``sigma_min <= tol * sigma_max``."""
    if is_exact(g):
        return det(g) == 0
    s = np.linalg.svd(np.asarray(g, dtype=float), compute_uv=False)
    return s.size == 0 or s[-1] <= tol * s[0]


@dataclass(frozen=True, eq=False)
class MetricTensor:
    """Symmetric nondegenerate bilinear form in a fixed basis."""

    g: np.ndarray
    tol: float = field(default_factory=default_tol)

    def __post_init__(self):
        g = self.g if isinstance(self.g, np.ndarray) else np.asarray(self.g)
        if g.dtype != object:
            g = np.asarray(g, dtype=float)
        object.__setattr__(self, "g", g)
        if g.ndim != 2 or g.shape[0] != g.shape[1]:
            raise ValueError(f"metric must be square, got shape {g.shape}")
        asym = max_abs(g - g.T)
        if not is_zero(asym, self.tol, float(max_abs(g))):
            i, j = np.unravel_index(np.argmax(np.abs(np.asarray(g - g.T, dtype=float))), g.shape)
            raise ValueError(f"metric not symmetric at entries ({i + 1},{j + 1})/({j + 1},{i + 1})")
        if g.shape[0] and _degenerate(g, self.tol):
            raise DegenerateMetric("metric is degenerate")

    @classmethod
    def diag(cls, entries: Sequence, exact: bool = False) -> "MetricTensor":
        d = as_array(entries, exact)
        g = zeros((len(d), len(d)), exact)
        for i, x in enumerate(d):
            g[i, i] = x
        return cls(g)

    @property
    def n(self) -> int:
        return self.g.shape[0]

    @property
    def exact(self) -> bool:
        return is_exact(self.g)

    @cached_property
    def inverse(self) -> np.ndarray:
        return inv(self.g)

    def inner(self, u, v):
        return u @ self.g @ v

    def restrict(self, basis: np.ndarray) -> np.ndarray:
        """Gram matrix of the rows of ``basis``."""
        return basis @ self.g @ basis.T

    def to_float(self) -> "MetricTensor":
        return MetricTensor(float_array(self.g), self.tol)

    def __eq__(self, other):
        return isinstance(other, MetricTensor) and self.g.shape == other.g.shape and bool(
            np.all(self.g == other.g)
        )


def signature(m: MetricTensor) -> tuple[int, int]:
    """(negative, positive) inertia counts of the metric."""
    return inertia(m.g, m.tol)


def inertia(g: np.ndarray, tol: float | None = None) -> tuple[int, int]:
    tol = default_tol() if tol is None else tol
    n = g.shape[0]
    if n == 0:
        return (0, 0)
    if is_exact(g):
        d = _congruence_diagonal(g)
        if any(x == 0 for x in d):
            raise DegenerateMetric("zero eigenvalue")
        neg = sum(1 for x in d if x < 0)
        return neg, n - neg
    w = np.linalg.eigvalsh(np.asarray(g, dtype=float))
    scale = max(float(np.max(np.abs(w))), 1e-300)
    if np.any(np.abs(w) <= tol * scale):
        raise DegenerateMetric("zero eigenvalue within tolerance")
    neg = int(np.sum(w < 0))
    return neg, n - neg


def _congruence_diagonal(g: np.ndarray) -> list[Fraction]:
    """Diagonal of a congruent diagonal form (symmetric Gaussian elimination)."""
    a = g.copy()
    n = a.shape[0]
    diag: list[Fraction] = []
    k = 0
    while k < n:
        sub = a[k:, k:]
        m = sub.shape[0]
        piv = next((i for i in range(m) if sub[i, i] != 0), None)
        if piv is None:
            off = next(((i, j) for i in range(m) for j in range(i + 1, m) if sub[i, j] != 0), None)
            if off is None:
                diag.extend([Fraction(0)] * m)
                break
            i, j = off
            # e_i <- e_i + e_j makes the (i,i) entry 2 g_ij != 0
            a[k + i, :] = a[k + i, :] + a[k + j, :]
            a[:, k + i] = a[:, k + i] + a[:, k + j]
            piv = i
        p = k + piv
        if p != k:
            a[[k, p]] = a[[p, k]]
            a[:, [k, p]] = a[:, [p, k]]
        d = a[k, k]
        for i in range(k + 1, n):
            if a[i, k] != 0:
                f = a[i, k] / d
                a[i, :] = a[i, :] - f * a[k, :]
                a[:, i] = a[:, i] - f * a[:, k]
        diag.append(d)
        k += 1
    return diag


def adjoint(f: np.ndarray, m: MetricTensor) -> np.ndarray:
    """Metric adjoint F* = g^{-1} F^T g."""
    if f.shape != m.g.shape:
        raise ValueError("endomorphism and metric sizes differ")
    return m.inverse @ f.T @ m.g


# ---------------------------------------------------------------------------
# subspaces


@dataclass(frozen=True, eq=False)
class Subspace:
    """Row-basis of a linear subspace of R^n, kept in canonical RREF form."""

    basis: np.ndarray
    n: int
    degenerate: bool = False

    @classmethod
    def span(cls, vectors, n: int, exact: bool, tol: float | None = None) -> "Subspace":
        vecs = as_array(vectors, exact) if not isinstance(vectors, np.ndarray) else vectors
        vecs = vecs.reshape(-1, n) if vecs.size else zeros((0, n), exact)
        return cls(canonical_basis(vecs, tol), n)

    @classmethod
    def zero(cls, n: int, exact: bool) -> "Subspace":
        return cls(zeros((0, n), exact), n)

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    @property
    def exact(self) -> bool:
        return is_exact(self.basis)

    def contains(self, v, tol: float | None = None) -> bool:
        stacked = np.vstack([self.basis, np.asarray(v).reshape(1, -1)])
        return rank(stacked, tol) == self.dim

    def issubset(self, other: "Subspace", tol: float | None = None) -> bool:
        if self.dim == 0:
            return True
        return rank(np.vstack([other.basis, self.basis]), tol) == other.dim

    def equals(self, other: "Subspace", tol: float | None = None) -> bool:
        return self.dim == other.dim and self.issubset(other, tol)

    def intersect(self, other: "Subspace", tol: float | None = None) -> "Subspace":
        exact = self.exact
        if self.dim == 0 or other.dim == 0:
            return Subspace.zero(self.n, exact)
        # a^T x = b^T y  <=>  [A^T | -B^T] (x, y) = 0
        m = np.concatenate([self.basis.T, -other.basis.T], axis=1)
        ker = nullspace(m, tol)
        if ker.shape[0] == 0:
            return Subspace.zero(self.n, exact)
        vecs = ker[:, : self.dim] @ self.basis
        return Subspace.span(vecs, self.n, exact, tol)


def restricted_metric(s: Subspace, m: MetricTensor) -> np.ndarray:
    return m.restrict(s.basis)


def is_nondegenerate(s: Subspace, m: MetricTensor) -> bool:
    if s.dim == 0:
        return True
    return not _degenerate(restricted_metric(s, m), m.tol)


def orthogonal_complement(s: Subspace, m: MetricTensor) -> Subspace:
    """Metric-orthogonal complement.

    For a nondegenerate ``s`` the basis is built by projecting the standard
    basis vectors, in order, onto the complement and keeping the independent
    ones; coordinate vectors already orthogonal to ``s`` therefore survive
    unchanged.  A degenerate ``s`` returns the plain kernel flagged
    ``degenerate=True``.
    """
    exact = m.exact
    n = m.n
    if s.dim == 0:
        return Subspace(eye(n, exact), n)
    if not is_nondegenerate(s, m):
        ker = nullspace(s.basis @ m.g, m.tol)
        return Subspace(ker, n, degenerate=True)
    b = s.basis
    gram_inv = inv(restricted_metric(s, m))
    # projector onto s along s^perp, acting on column vectors
    proj = b.T @ gram_inv @ b @ m.g
    comp = eye(n, exact) - proj
    chosen = []
    for k in range(n):
        cand = comp[:, k]
        trial = np.vstack(chosen + [cand]) if chosen else cand.reshape(1, -1)
        if rank(trial, m.tol) == len(chosen) + 1:
            chosen.append(cand)
        if len(chosen) == n - s.dim:
            break
    basis = np.vstack(chosen) if chosen else zeros((0, n), exact)
    return Subspace(basis, n)


def pseudo_orthonormalize(
    s: Subspace, m: MetricTensor, normalize: bool = True
) -> tuple[np.ndarray, list[int]]:
    """Orthonormal basis (rows) of ``s`` with sign list, timelike vectors first.

    Each step pivots on the remaining vector of largest ``|<v,v>|``; if every
    remaining vector is null, a combination ``v_i + v_j`` with nonzero norm is
    used instead.  With ``normalize=False`` the basis is only orthogonal (useful
    in exact mode where square roots may be irrational).
    """
    exact = m.exact
    vecs = [row.copy() for row in s.basis]
    out: list[np.ndarray] = []
    norms: list = []
    scale = float(max_abs(m.g)) if m.n else 1.0
    while vecs:
        q = [m.inner(v, v) for v in vecs]
        k = max(range(len(vecs)), key=lambda i: abs(q[i]))
        if is_zero(q[k], m.tol, scale):
            pair = _nonnull_pair(vecs, m, scale)
            if pair is None:
                raise DegenerateSubspace("restricted metric is degenerate")
            i, j = pair
            vecs[i] = vecs[i] + vecs[j]
            continue
        v = vecs.pop(k)
        qv = q[k]
        vecs = [w - (m.inner(w, v) / qv) * v for w in vecs]
        out.append(v)
        norms.append(qv)
    signs = [-1 if q < 0 else 1 for q in norms]
    order = sorted(range(len(out)), key=lambda i: signs[i])  # stable: timelike first
    out = [out[i] for i in order]
    norms = [norms[i] for i in order]
    signs = [signs[i] for i in order]
    if normalize:
        scaled = []
        for v, q in zip(out, norms):
            if exact:
                r = exact_sqrt(abs(q))
                if r is None:
                    raise IrrationalNorm(f"norm^2 {q} has no rational square root")
                scaled.append(v / r)
            else:
                scaled.append(v / math.sqrt(abs(q)))
        out = scaled
    basis = np.vstack(out) if out else zeros((0, m.n), exact)
    return basis, signs


def _nonnull_pair(vecs, m: MetricTensor, scale: float):
    for i in range(len(vecs)):
        for j in range(len(vecs)):
            if i != j and not is_zero(m.inner(vecs[i], vecs[j]), m.tol, scale):
                return i, j
    return None

"""Eigenvalue inequalities and small matrix systems behind the classification.

* :func:`weyl_bounds` — Weyl's inequalities for sums of symmetric matrices.
* :func:`genlem0_verify` — checks a family of skew matrices against the
  diagonal identity ``M_1^2 - sum_{l>=2} M_l^2 = Diag(...)`` and, when it holds,
  against its consequences (vanishing tail, rank <= 2, additivity of the
  smallest eigenvalue).
* :func:`genlem1_basis` — the adapted orthonormal basis for rank-2,
  trace-orthogonal skew families with additive smallest eigenvalue.
* :class:`LemmaimpTriple` / :func:`lemmaimp_residual` /
  :func:`lemmaimp_search` — the system ``K^2 = P^{-1} A P + A``,
  ``alpha K = A P - P^{-1} A`` on ``R^{2k}``: explicit ``k = 1`` solutions and a
  seeded numerical probe for larger ``k``.

Eigenvalues are always in ascending order ``lambda_1 <= ... <= lambda_m`` and
indices ``k`` are 1-based, as in the usual statement of Weyl's inequalities.
"""
from __future__ import annotations

import functools
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.linalg import expm, null_space

from .pseudolinalg import IrrationalNorm, exact_sqrt, is_exact, max_abs, zeros
from .search import SearchConfig, SearchProblem, minimize

RANK_TOL = 1e-8


class SizeMismatch(ValueError):
    pass


class HypothesisViolated(ValueError):
    """A precondition of :func:`genlem1_basis` fails; the message names it."""


def eigs(a) -> np.ndarray:
    """Ascending eigenvalues of a symmetric matrix."""
    return np.linalg.eigvalsh(np.asarray(a, dtype=float))


def numerical_rank(a, rel: float = RANK_TOL) -> int:
    """Number of singular values above ``rel * sigma_max``."""
    s = np.linalg.svd(np.asarray(a, dtype=float), compute_uv=False)
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.sum(s > rel * s[0]))


# ---------------------------------------------------------------------------
# Weyl


def weyl_bounds(A, B, k: int) -> tuple[float, float, float]:
    """``(lambda_k(A) + lambda_1(B), lambda_k(A+B), lambda_k(A) + lambda_m(B))``."""
    A, B = np.asarray(A, float), np.asarray(B, float)
    if A.shape != B.shape or A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise SizeMismatch(f"need square matrices of equal size, got {A.shape} and {B.shape}")
    m = A.shape[0]
    if not 1 <= k <= m:
        raise ValueError(f"k must lie in 1..{m}")
    la, lb, ls = eigs(A), eigs(B), eigs(A + B)
    return float(la[k - 1] + lb[0]), float(ls[k - 1]), float(la[k - 1] + lb[-1])


@dataclass(frozen=True)
class WeylFuzzReport:
    trials: int
    checks: int
    worst_violation: float
    seed: int

    def passed(self, tol: float = 1e-10) -> bool:
        return self.worst_violation <= tol


def weyl_fuzz(trials: int = 1000, seed: int = 0, max_dim: int = 8) -> WeylFuzzReport:
    """Random symmetric pairs of sizes 1..max_dim; every index ``k`` checked."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    checks = 0
    for _ in range(trials):
        m = int(rng.integers(1, max_dim + 1))
        A = rng.normal(size=(m, m))
        B = rng.normal(size=(m, m)) * rng.choice([0.01, 1.0, 100.0])
        A, B = (A + A.T) / 2, (B + B.T) / 2
        la, lb, ls = eigs(A), eigs(B), eigs(A + B)
        for k in range(m):
            worst = max(worst, la[k] + lb[0] - ls[k], ls[k] - la[k] - lb[-1])
            checks += 1
    return WeylFuzzReport(trials, checks, float(max(worst, 0.0)), seed)


# ---------------------------------------------------------------------------
# diagonal identity for skew families


@dataclass(frozen=True, eq=False)
class SkewFamily:
    """Skew-symmetric ``m x m`` matrices ``M_1..M_n`` (Euclidean sense)."""

    M: np.ndarray

    def __post_init__(self):
        M = np.asarray(self.M, dtype=float)
        if M.ndim != 3 or M.shape[1] != M.shape[2]:
            raise SizeMismatch("a skew family is an array of square matrices")
        if M.size and np.max(np.abs(M + M.transpose(0, 2, 1))) > 1e-12 * max(1.0, np.max(np.abs(M))):
            raise ValueError("family members must be skew-symmetric")
        object.__setattr__(self, "M", M)

    @property
    def n(self) -> int:
        return self.M.shape[0]

    @property
    def m(self) -> int:
        return self.M.shape[1]


@dataclass(frozen=True)
class Genlem0Report:
    hypothesis_residual: float
    hypothesis_holds: bool
    tail_zero: bool | None = None
    ranks: tuple[int, ...] = ()
    lambda1_gap: float | None = None
    conclusions_hold: bool | None = None
    counterexample: bool = False


def genlem0_lhs_rhs(f: SkewFamily, v) -> tuple[np.ndarray, np.ndarray]:
    """Both sides of ``M_1^2 - sum_{l>=2} M_l^2 = Diag(-tr(M_1^2)/2, tr(M_2^2)/2, ..., v)``."""
    M = f.M
    sq = np.einsum("iab,ibc->iac", M, M)
    lhs = sq[0] - sq[1:].sum(axis=0)
    tr = np.trace(sq, axis1=1, axis2=2)
    v = np.asarray(v, dtype=float).reshape(-1)
    if f.n + v.size != f.m:
        raise SizeMismatch(f"need m - n = {f.m - f.n} tail values, got {v.size}")
    diag = np.concatenate([[-tr[0] / 2], tr[1:] / 2, v])
    return lhs, np.diag(diag)


def genlem0_verify(f: SkewFamily, v, tol: float = 1e-9) -> Genlem0Report:
    """Evaluate the hypothesis; when it holds, evaluate each conclusion.

    A failed conclusion under a satisfied hypothesis is flagged as a
    counterexample candidate (which would point at a numerical problem).
    """
    if not 2 <= f.n <= f.m:
        raise SizeMismatch("need 2 <= n <= m")
    v = np.asarray(v, dtype=float).reshape(-1)
    if np.any(v > tol):
        raise ValueError("tail values must be nonpositive")
    lhs, rhs = genlem0_lhs_rhs(f, v)
    scale = max(1.0, float(np.max(np.abs(f.M))) ** 2)
    res = float(np.max(np.abs(lhs - rhs))) if lhs.size else 0.0
    holds = res <= tol * scale
    if not holds:
        return Genlem0Report(res, False)
    tail_zero = bool(np.all(np.abs(v) <= tol * scale))
    ranks = tuple(numerical_rank(m) for m in f.M[1:])
    sq = np.einsum("iab,ibc->iac", f.M[1:], f.M[1:])
    gap = float(eigs(sq.sum(axis=0))[0] - sum(eigs(s)[0] for s in sq))
    ok = tail_zero and all(r <= 2 for r in ranks) and abs(gap) <= tol * scale
    return Genlem0Report(res, True, tail_zero, ranks, gap, ok, not ok)


def genlem0_family_from_blocks(blocks, tol: float = 1e-9) -> tuple[SkewFamily, np.ndarray]:
    """Skew family and tail values of a type-one 2-step block decomposition.

    ``blocks`` is a :class:`~nilcurv.attributes.ThreeStepBlocks` with one
    cocycle component.  The basis of ``[g,g]`` is rotated to diagonalise
    ``A = B^* B`` (timelike vector first); the complement is spanned by
    ``f_i = B e_i / |B e_i|`` followed by an eigenbasis of ``-L^2`` on
    ``Im(B)^perp``.  Returns the matrices of ``J_i`` in that basis and the
    tail values ``-(2 lambda + mu^2)``.
    """
    data = blocks.type_one()
    eps = np.asarray(blocks.eps, float)
    s, m = blocks.s, blocks.m
    A = data["A"]
    Q = _lorentz_eigenbasis(A, eps, tol)
    # J for the new basis e'_i = sum_j Q[j, i] e_j:  J_j = sum_i Q[j, i] J'_i
    Jp = np.einsum("ij,jab->iab", np.linalg.inv(Q), blocks.J)
    B = blocks.B[0]
    w = B @ Q  # columns B e'_i
    norms = np.linalg.norm(w, axis=0)
    if np.any(norms <= tol):
        raise ValueError("B is not injective")
    F = w / norms
    L = data["L"]
    rest = null_space(F.T) if s < m else np.zeros((m, 0))
    if rest.shape[1]:
        L2 = rest.T @ (-L @ L) @ rest
        _, ev = np.linalg.eigh((L2 + L2.T) / 2)
        rest = rest @ ev
    basis = np.concatenate([F, rest], axis=1)
    Mi = np.einsum("ab,ibc,cd->iad", basis.T, Jp, basis)
    L2r = np.diag(rest.T @ (L @ L) @ rest) if rest.shape[1] else np.zeros(0)
    v = -2 * blocks.lam + L2r
    return SkewFamily(Mi), v


def _lorentz_eigenbasis(A: np.ndarray, eps: np.ndarray, tol: float) -> np.ndarray:
    """Orthonormal eigenbasis (columns) of an eta-symmetric positive ``A``, timelike first."""
    s = A.shape[0]
    off = A - np.diag(np.diag(A))
    if s == 0 or np.max(np.abs(off)) <= tol * max(1.0, np.max(np.abs(A))):
        return np.eye(s)
    E = np.diag(eps)
    vals, vecs = np.linalg.eig(A)
    vecs = np.real(vecs)
    order = np.argsort(np.real(vals))
    vecs = vecs[:, order]
    cols, signs = [], []
    for v in vecs.T:
        for u, sg in zip(cols, signs):
            v = v - sg * (u @ E @ v) * u
        nn = v @ E @ v
        cols.append(v / np.sqrt(abs(nn)))
        signs.append(np.sign(nn))
    Q = np.stack(cols, axis=1)
    return Q[:, np.argsort(signs, kind="stable")]


# ---------------------------------------------------------------------------
# adapted basis for rank-2 families


@dataclass(frozen=True)
class Genlem1Basis:
    u0: np.ndarray
    U: np.ndarray  # rows u_1..u_n
    V: np.ndarray  # rows v_1..v_{m-n-1}
    alpha: np.ndarray
    gram_residual: float
    action_residual: float

    @property
    def basis(self) -> np.ndarray:
        return np.concatenate([self.u0[None, :], self.U, self.V], axis=0)


def genlem1_basis(K, tol: float = 1e-9) -> Genlem1Basis:
    """Orthonormal ``(u_0, u_1..u_n, v_1..)`` with ``K_i u_0 = alpha_i u_i``,
    ``K_i u_j = -delta_ij alpha_i u_0`` and ``K_i v_l = 0``."""
    K = np.asarray(K, dtype=float)
    if K.ndim != 3 or K.shape[1] != K.shape[2]:
        raise SizeMismatch("need an array of square matrices")
    n, m = K.shape[0], K.shape[1]
    if not n < m:
        raise HypothesisViolated("need fewer matrices than the dimension")
    scale = max(1.0, float(np.max(np.abs(K))) ** 2)
    if np.max(np.abs(K + K.transpose(0, 2, 1))) > tol * scale:
        raise HypothesisViolated("matrices are not skew-symmetric")
    for i, k in enumerate(K):
        if numerical_rank(k) != 2:
            raise HypothesisViolated(f"rank(K_{i + 1}) = {numerical_rank(k)}, expected 2")
    tr = np.einsum("iab,jba->ij", K, K)
    off = tr - np.diag(np.diag(tr))
    if n and np.max(np.abs(off)) > tol * scale:
        raise HypothesisViolated("tr(K_i K_j) != 0 for some i != j")
    sq = np.einsum("iab,ibc->iac", K, K)
    total = sq.sum(axis=0)
    vals, vecs = np.linalg.eigh(total)
    gap = vals[0] - sum(eigs(s)[0] for s in sq)
    if abs(gap) > tol * scale:
        raise HypothesisViolated(f"smallest eigenvalue is not additive (gap {gap:.3e})")
    u0 = vecs[:, 0]
    ku = K @ u0  # (n, m)
    alpha = np.linalg.norm(ku, axis=1)
    U = ku / alpha[:, None]
    V = null_space(np.concatenate([u0[None, :], U], axis=0)).T
    basis = np.concatenate([u0[None, :], U, V], axis=0)
    gram = float(np.max(np.abs(basis @ basis.T - np.eye(m))))
    act = 0.0
    for i in range(n):
        act = max(act, float(np.max(np.abs(K[i] @ u0 - alpha[i] * U[i]))))
        for j in range(n):
            act = max(act, float(np.max(np.abs(K[i] @ U[j] + (i == j) * alpha[i] * u0))))
        if V.size:
            act = max(act, float(np.max(np.abs(K[i] @ V.T))))
    return Genlem1Basis(u0, U, V, alpha, gram, act)


# ---------------------------------------------------------------------------
# the K, A, P system


@dataclass(frozen=True, eq=False)
class LemmaimpTriple:
    """``K`` skew, ``A = diag(-alpha_i^2)``, ``P`` orthogonal, scalar ``alpha``."""

    K: np.ndarray
    A: np.ndarray
    P: np.ndarray
    alpha: object

    @property
    def k(self) -> int:
        return self.K.shape[0] // 2

    def invariant_residuals(self) -> dict:
        """Skewness of ``K``, diagonality/negativity of ``A``, ``P^T P - Id``,
        ``alpha^2 - tr(-A)``."""
        K, A, P = self.K, self.A, self.P
        d = K.shape[0]
        exact = is_exact(K)
        eye = np.array([[Fraction(int(i == j)) for j in range(d)] for i in range(d)], dtype=object) if exact else np.eye(d)
        offA = A - np.diag(np.diag(A)) if not exact else A - _diag_obj(A)
        return {
            "K_skew": max_abs(K + K.T),
            "A_offdiag": max_abs(offA),
            "A_negative": all(x < 0 for x in np.diag(A)),
            "P_orthogonal": max_abs(P.T @ P - eye),
            "alpha_sq": abs(self.alpha * self.alpha + np.trace(A)),
        }


def _diag_obj(A: np.ndarray) -> np.ndarray:
    out = zeros(A.shape, True)
    for i in range(A.shape[0]):
        out[i, i] = A[i, i]
    return out


def lemmaimp_equations(t: LemmaimpTriple) -> tuple[np.ndarray, np.ndarray]:
    """``K^2 - P^T A P - A`` and ``alpha K - A P + P^T A`` (``P^{-1} = P^T``)."""
    K, A, P = t.K, t.A, t.P
    Pi = P.T
    return K @ K - Pi @ A @ P - A, t.alpha * K - A @ P + Pi @ A


def lemmaimp_residual(t: LemmaimpTriple):
    e1, e2 = lemmaimp_equations(t)
    return max(max_abs(e1), max_abs(e2))


def explicit_solution(a1, a2, eps: int = 1, alpha_sign: int = 1, exact: bool = False) -> LemmaimpTriple:
    """The ``k = 1`` solution: ``K = eps*beta*[[0,1],[-1,0]]``,
    ``P = [[0,-t],[t,0]]`` with ``t = eps*sign(alpha)`` and ``beta = sqrt(a1^2 + a2^2)``."""
    if eps not in (1, -1) or alpha_sign not in (1, -1):
        raise ValueError("signs must be +1 or -1")
    if exact:
        a1, a2 = Fraction(a1), Fraction(a2)
        beta = exact_sqrt(a1 * a1 + a2 * a2)
        if beta is None:
            raise IrrationalNorm("a1^2 + a2^2 is not a rational square")
        one, zero = Fraction(1), Fraction(0)
        mk = lambda rows: np.array(rows, dtype=object)  # noqa: E731
    else:
        a1, a2 = float(a1), float(a2)
        beta = float(np.hypot(a1, a2))
        one, zero = 1.0, 0.0
        mk = lambda rows: np.array(rows, dtype=float)  # noqa: E731
    if a1 == 0 or a2 == 0:
        raise ValueError("alpha_i must be nonzero")
    t = eps * alpha_sign
    K = mk([[zero, eps * beta], [-eps * beta, zero]])
    A = mk([[-a1 * a1, zero], [zero, -a2 * a2]])
    P = mk([[zero, -t * one], [t * one, zero]])
    return LemmaimpTriple(K, A, P, alpha_sign * beta)


# --- numerical probe ----------------------------------------------------------


@functools.lru_cache(maxsize=None)
def _upper(d: int) -> tuple[np.ndarray, np.ndarray]:
    return np.triu_indices(d, 1)


def _skew_from(vec: np.ndarray, d: int) -> np.ndarray:
    S = np.zeros((d, d))
    S[_upper(d)] = vec
    return S - S.T


@dataclass(frozen=True)
class LemmaimpBranch:
    """``P = expm(W) R`` with ``R`` the identity (``det = 1``) or a reflection,
    and the sign of ``alpha``."""

    reflect: bool
    alpha_sign: int


BRANCHES = tuple(LemmaimpBranch(r, s) for r in (False, True) for s in (1, -1))


def lemmaimp_layout(k: int) -> tuple[str, ...]:
    d = 2 * k
    iu = list(zip(*np.triu_indices(d, 1)))
    return (
        tuple(f"K[{i + 1},{j + 1}]" for i, j in iu)
        + tuple(f"alpha_{i + 1}" for i in range(d))
        + tuple(f"W[{i + 1},{j + 1}]" for i, j in iu)
    )


def lemmaimp_triple_from(x, k: int, branch: LemmaimpBranch) -> LemmaimpTriple:
    d = 2 * k
    q = d * (d - 1) // 2
    x = np.asarray(x, float)
    K = _skew_from(x[:q], d)
    a = x[q : q + d]
    W = _skew_from(x[q + d :], d)
    R = np.eye(d)
    if branch.reflect:
        R[0, 0] = -1.0
    P = expm(W) @ R
    A = np.diag(-(a * a))
    return LemmaimpTriple(K, A, P, branch.alpha_sign * float(np.linalg.norm(a)))


@dataclass(frozen=True)
class LemmaimpSearchResult:
    k: int
    restarts: int
    seed: int
    residual: float
    triple: LemmaimpTriple
    branch: LemmaimpBranch
    restart: int
    per_branch: dict = field(default_factory=dict)
    evidence: str = "empirical evidence, not a proof"


#: ``alpha_i`` range; the system is homogeneous (``K, alpha`` of degree 1 and
#: ``A`` of degree 2 in a common scale), so a normalised box loses nothing while
#: keeping every ``alpha_i`` away from 0.
ALPHA_BOUNDS = (0.25, 1.0)
K_BOUND = 2.5


def lemmaimp_problem(k: int, branch: LemmaimpBranch) -> SearchProblem:
    if k < 1:
        raise ValueError("k must be >= 1")
    d = 2 * k
    q = d * (d - 1) // 2
    names = lemmaimp_layout(k)
    lo = np.concatenate([np.full(q, -K_BOUND), np.full(d, ALPHA_BOUNDS[0]), np.full(q, -np.pi)])
    hi = np.concatenate([np.full(q, K_BOUND), np.full(d, ALPHA_BOUNDS[1]), np.full(q, np.pi)])

    def objective(x):
        e1, e2 = lemmaimp_equations(lemmaimp_triple_from(x, k, branch))
        return float(np.sum(e1 * e1) + np.sum(e2 * e2))

    def measure(x):
        return {"residual": float(lemmaimp_residual(lemmaimp_triple_from(x, k, branch)))}

    return SearchProblem(names, lo, hi, objective, "lemmaimp", measure, meta={"k": k, "branch": branch})


def lemmaimp_search(
    k: int,
    restarts: int = 50,
    seed: int = 7,
    config: SearchConfig | None = None,
) -> LemmaimpSearchResult:
    """Minimise the max-abs residual of the ``K, A, P`` system on ``R^{2k}``.

    Restart ``r`` runs in branch ``BRANCHES[r % 4]`` (rotation or reflection
    component for ``P``, either sign of ``alpha``).  For ``k >= 2`` the value
    returned is an empirical floor.
    """
    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    config = SearchConfig(max_evals=20_000 if k == 1 else 6_000, polish_rounds=2) if config is None else config
    best = None
    per_branch: dict = {}
    for b_idx, branch in enumerate(BRANCHES):
        count = len(range(b_idx, restarts, len(BRANCHES)))
        if count == 0:
            continue
        prob = lemmaimp_problem(k, branch)
        # independent streams per branch: restart index r = b_idx + 4 * j
        res = minimize(prob, count, seed * 4 + b_idx, config)
        key = f"{'reflect' if branch.reflect else 'rotate'}/{'+' if branch.alpha_sign > 0 else '-'}"
        per_branch[key] = res.residual
        restart = b_idx + len(BRANCHES) * res.restart
        if best is None or (res.residual, restart) < (best[0], best[3]):
            best = (res.residual, lemmaimp_triple_from(res.params, k, branch), branch, restart)
    residual, triple, branch, restart = best
    return LemmaimpSearchResult(k, restarts, seed, residual, triple, branch, restart, per_branch)

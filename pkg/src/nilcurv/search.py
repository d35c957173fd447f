"""Seeded derivative-free residual minimisation.

Problems are described by a :class:`SearchProblem` (a named parameter layout,
box bounds and an objective returning a sum of squares).  :func:`minimize`
runs bounded Nelder-Mead from uniformly drawn starts; start ``r`` of seed ``s``
is drawn from ``numpy.random.Generator(Philox(key=(s, r)))`` so any restart can
be reproduced in isolation and results do not depend on execution order.

The module also builds Einstein-type problems over metric entries, structure
constants and the Einstein constant, and the sign scan of the Einstein
constant over 3-step templates.
"""
from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import minimize as _scipy_minimize

from .attributes import DegenerateCenter, NonEuclideanCenter, decompose, es_system_matrices
from .curvature import ricci, ricci_general
from .liealg import LiePresentation, MetricLieAlgebra, jacobi_tensor
from .pseudolinalg import DegenerateMetric, MetricTensor

log = logging.getLogger(__name__)

#: Feasible objective values are clipped here ...
CAP = 1e10
#: ... and infeasible points (degenerate metric, wrong center) score this.
PENALTY = 1e12

RESIDUAL_KINDS = ("einstein", "es_system", "quasi_einstein", "lemmaimp")


class Infeasible(ValueError):
    """Raised by problem builders when a parameter vector has no valid algebra."""


def start_generator(seed: int, restart: int) -> np.random.Generator:
    """Counter-based generator for restart ``restart`` of run ``seed``."""
    return np.random.Generator(np.random.Philox(key=np.array([seed, restart], dtype=np.uint64)))


# ---------------------------------------------------------------------------
# problem description


@dataclass(frozen=True)
class SearchConfig:
    max_evals: int = 100_000
    xatol: float = 1e-10
    polish_rounds: int = 2
    workers: int = 1


@dataclass(frozen=True, eq=False)
class SearchProblem:
    """Named parameters in a box and a nonnegative objective.

    ``objective`` returns the sum of squares that is minimised; ``measure``
    (optional) maps parameters to a dict of reported quantities, at least
    ``"residual"`` (max-abs form) and, where meaningful, ``"lambda"``.
    ``sampler`` optionally replaces the uniform start distribution.
    """

    names: tuple[str, ...]
    lower: np.ndarray
    upper: np.ndarray
    objective: Callable[[np.ndarray], float]
    kind: str = "einstein"
    measure: Callable[[np.ndarray], dict] | None = None
    sampler: Callable[[np.random.Generator, int], np.ndarray] | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in RESIDUAL_KINDS:
            raise ValueError(f"unknown residual kind {self.kind!r}")
        lo, hi = np.asarray(self.lower, float), np.asarray(self.upper, float)
        if lo.shape != (len(self.names),) or hi.shape != lo.shape or np.any(lo > hi):
            raise ValueError("bounds do not match the parameter layout")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @property
    def dim(self) -> int:
        return len(self.names)

    def unpack(self, x) -> dict[str, float]:
        return {k: float(v) for k, v in zip(self.names, np.asarray(x, float))}

    def pack(self, values: dict[str, float]) -> np.ndarray:
        return np.array([values[k] for k in self.names], dtype=float)

    def start(self, seed: int, restart: int) -> np.ndarray:
        rng = start_generator(seed, restart)
        if self.sampler is not None:
            return np.clip(np.asarray(self.sampler(rng, restart), float), self.lower, self.upper)
        return rng.uniform(self.lower, self.upper)

    def evaluate(self, x) -> float:
        """Objective with infeasibility and overflow handling."""
        try:
            val = float(self.objective(np.asarray(x, float)))
        except (Infeasible, DegenerateMetric, DegenerateCenter, NonEuclideanCenter, np.linalg.LinAlgError):
            return PENALTY
        if not np.isfinite(val):
            return PENALTY
        return min(val, CAP)

    def report(self, x) -> dict:
        if self.measure is None:
            return {"residual": self.evaluate(x)}
        try:
            return self.measure(np.asarray(x, float))
        except (Infeasible, DegenerateMetric, DegenerateCenter, NonEuclideanCenter, np.linalg.LinAlgError):
            return {"residual": float("inf"), "infeasible": True}


@dataclass(frozen=True)
class SearchResult:
    objective: float
    residual: float
    params: tuple[float, ...]
    named: dict
    lam: float | None
    restart: int
    evaluations: int
    seed: int
    per_restart: tuple[float, ...] = ()
    details: dict = field(default_factory=dict)


# ---------------------------------------------------------------------------
# optimiser


def _one_restart(problem: SearchProblem, seed: int, restart: int, config: SearchConfig):
    x = problem.start(seed, restart)
    bounds = list(zip(problem.lower, problem.upper))
    fixed = problem.lower == problem.upper
    evals = 0
    best_f = problem.evaluate(x)
    for _ in range(1 + max(0, config.polish_rounds)):
        budget = config.max_evals - evals
        if budget <= 0:
            break
        res = _scipy_minimize(
            problem.evaluate,
            x,
            method="Nelder-Mead",
            bounds=None if fixed.all() else bounds,
            options={
                "maxfev": budget,
                "xatol": config.xatol,
                # only the simplex size decides convergence
                "fatol": np.inf,
                "adaptive": problem.dim > 4,
            },
        )
        evals += int(res.nfev)
        improved = float(res.fun) < best_f
        if improved or float(res.fun) == best_f:
            x, best_f = np.clip(res.x, problem.lower, problem.upper), float(res.fun)
        if not improved:
            break
    return best_f, x, evals


def minimize(
    problem: SearchProblem,
    restarts: int = 1,
    seed: int = 0,
    config: SearchConfig | None = None,
) -> SearchResult:
    """Best of ``restarts`` bounded Nelder-Mead runs.

    Runs may execute on a thread pool; results are merged by
    ``(objective, restart index)`` so the outcome does not depend on scheduling.
    """
    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    config = SearchConfig() if config is None else config
    idx = range(restarts)
    if config.workers > 1:
        with ThreadPoolExecutor(config.workers) as ex:
            runs = list(ex.map(lambda r: _one_restart(problem, seed, r, config), idx))
    else:
        runs = [_one_restart(problem, seed, r, config) for r in idx]
    order = sorted(range(restarts), key=lambda r: (runs[r][0], r))
    best = order[0]
    f, x, _ = runs[best]
    rep = problem.report(x)
    return SearchResult(
        objective=problem.evaluate(x),
        residual=float(rep.get("residual", f)),
        params=tuple(float(v) for v in x),
        named=problem.unpack(x),
        lam=rep.get("lambda"),
        restart=best,
        evaluations=int(sum(r[2] for r in runs)),
        seed=seed,
        per_restart=tuple(float(r[0]) for r in runs),
        details={k: v for k, v in rep.items() if k not in ("residual", "lambda")},
    )


def fd_gradient(f: Callable[[np.ndarray], float], x, h: float = 1e-6) -> np.ndarray:
    """Central finite-difference gradient."""
    x = np.asarray(x, float)
    g = np.zeros_like(x)
    for i in range(x.size):
        e = np.zeros_like(x)
        e[i] = h
        g[i] = (f(x + e) - f(x - e)) / (2 * h)
    return g


def gradient_check(f: Callable[[np.ndarray], float], grad: Callable[[np.ndarray], np.ndarray], x, h: float = 1e-6) -> float:
    """Relative disagreement between ``grad`` and the finite-difference gradient."""
    a, b = np.asarray(grad(np.asarray(x, float)), float), fd_gradient(f, x, h)
    return float(np.linalg.norm(a - b) / max(np.linalg.norm(a), np.linalg.norm(b), 1e-300))


# ---------------------------------------------------------------------------
# Einstein-type problems over metric entries / brackets / lambda


@dataclass(frozen=True)
class AlgebraLayout:
    """Which entries of a base algebra are free.

    ``metric`` lists pairs ``(i, j)`` with ``i <= j`` (0-based); ``brackets``
    lists triples ``(i, j, k)`` with ``i < j`` for ``c[i][j][k]``;
    ``scalings`` lists basis indices whose vector is multiplied by
    ``exp(x)``; ``lam`` appends a free Einstein constant.
    """

    metric: tuple[tuple[int, int], ...] = ()
    brackets: tuple[tuple[int, int, int], ...] = ()
    scalings: tuple[int, ...] = ()
    lam: bool = False

    def names(self) -> tuple[str, ...]:
        out = [f"g[{i + 1},{j + 1}]" for i, j in self.metric]
        out += [f"c[{i + 1},{j + 1}][{k + 1}]" for i, j, k in self.brackets]
        out += [f"log s[{i + 1}]" for i in self.scalings]
        if self.lam:
            out.append("lambda")
        return tuple(out)

    def base_values(self, base: MetricLieAlgebra) -> np.ndarray:
        g = np.asarray(base.metric.g, float)
        c = np.asarray(base.lie.c, float)
        vals = [g[i, j] for i, j in self.metric] + [c[i, j, k] for i, j, k in self.brackets]
        vals += [0.0] * len(self.scalings)
        if self.lam:
            vals.append(0.0)
        return np.array(vals, dtype=float)

    def instantiate(self, base: MetricLieAlgebra, x) -> tuple[MetricLieAlgebra, float | None]:
        x = np.asarray(x, float)
        g = np.array(base.metric.g, dtype=float)
        c = np.array(base.lie.c, dtype=float)
        pos = 0
        for i, j in self.metric:
            g[i, j] = g[j, i] = x[pos]
            pos += 1
        for i, j, k in self.brackets:
            c[i, j, k], c[j, i, k] = x[pos], -x[pos]
            pos += 1
        if self.scalings:
            s = np.ones(g.shape[0])
            s[list(self.scalings)] = np.exp(x[pos : pos + len(self.scalings)])
            g = g * np.outer(s, s)
            pos += len(self.scalings)
        lam = float(x[pos]) if self.lam else None
        metric = MetricTensor(g, base.tol)
        # untouched brackets keep the base presentation (and its cached subspaces)
        lie = LiePresentation(c) if self.brackets else base.lie
        return MetricLieAlgebra(lie, metric), lam


def _jacobi_sq(a: MetricLieAlgebra) -> float:
    return float(np.sum(jacobi_tensor(a.lie) ** 2))


def einstein_residual(x, problem: SearchProblem) -> float:
    """``||Ric - lambda Id||_F^2`` (+ squared Jacobi defect when brackets are free),
    with ``lambda`` free in ``x`` or ``tr(Ric)/n``; penalties for infeasible
    points."""
    return problem.evaluate(x)


def _einstein_parts(a: MetricLieAlgebra, lam, general: bool):
    # free brackets need not stay nilpotent, so the trace route is used then
    rep = ricci_general(a) if general else ricci(a)
    lam = float(rep.lambda_star) if lam is None else lam
    return np.asarray(rep.Ric, float) - lam * np.eye(a.n), lam


def _es_parts(a: MetricLieAlgebra, lam):
    t = decompose(a)
    if lam is None:
        lam = float(ricci(a).lambda_star)
    return [np.asarray(r, float) for r in es_system_matrices(t, lam)], lam


def algebra_problem(
    base: MetricLieAlgebra,
    layout: AlgebraLayout,
    kind: str = "einstein",
    width: float = 0.5,
    lam_bounds: tuple[float, float] = (-1.0, 1.0),
    lower: Sequence[float] | None = None,
    upper: Sequence[float] | None = None,
    meta: dict | None = None,
) -> SearchProblem:
    """Residual problem around ``base`` with box ``base ± width`` (λ in ``lam_bounds``)."""
    if kind not in ("einstein", "es_system"):
        raise ValueError("algebra problems support the einstein and es_system kinds")
    base = base.to_float()
    centre = layout.base_values(base)
    lo = centre - width
    hi = centre + width
    if layout.lam:
        lo[-1], hi[-1] = lam_bounds
    if lower is not None:
        lo = np.asarray(lower, float)
    if upper is not None:
        hi = np.asarray(upper, float)
    free_brackets = bool(layout.brackets)

    def parts(x):
        a, lam = layout.instantiate(base, x)
        if kind == "einstein":
            R, lam = _einstein_parts(a, lam, free_brackets)
            mats = [R]
        else:
            mats, lam = _es_parts(a, lam)
        jac = _jacobi_sq(a) if free_brackets else 0.0
        return a, mats, lam, jac

    def objective(x):
        _, mats, _, jac = parts(x)
        return float(sum(np.sum(m * m) for m in mats)) + jac

    def measure(x):
        a, mats, lam, jac = parts(x)
        res = max((float(np.max(np.abs(m))) for m in mats if m.size), default=0.0)
        return {"residual": max(res, float(np.sqrt(jac))), "lambda": lam, "jacobi_sq": jac}

    return SearchProblem(layout.names(), lo, hi, objective, kind, measure, meta=dict(meta or {}))


# ---------------------------------------------------------------------------
# sign of the Einstein constant over 3-step templates


def _template(name: str) -> tuple[MetricLieAlgebra, AlgebraLayout, dict]:
    from . import families as fam
    from .liealg import LiePresentation as LP

    if name == "three_step_dim6":
        h = fam.make_three_step_dim6(1, "a")
        # rescale three basis vectors and perturb one off-diagonal entry
        return h, AlgebraLayout(metric=((0, 1),), scalings=(0, 2, 4), lam=True), {"width": 0.3}
    if name == "three_step_dim7":
        h = fam.make_three_step_dim7(1, 1, 1, 1)
        return h, AlgebraLayout(metric=((1, 2),), scalings=(0, 3, 5), lam=True), {"width": 0.3}
    if name == "l6_19":
        h = fam.make_l6_19(1)
        return h, AlgebraLayout(metric=((3, 4),), scalings=(0, 1, 2), lam=True), {"width": 0.3}
    if name == "dim7_147e":
        h = fam.make_dim7_147e(0.5, 1.0)
        return h, AlgebraLayout(scalings=(0, 3, 4, 6), lam=True), {"width": 0.3}
    if name == "conti8":
        h = fam.make_conti8()
        # a single overall scale of the metric
        return h, AlgebraLayout(scalings=tuple(range(h.n)), lam=True), {"width": 0.5, "uniform": True}
    if name == "abelian":
        n = 4
        g = np.diag([-1.0, 1.0, 1.0, 1.0])
        h = MetricLieAlgebra(LP(np.zeros((n, n, n))), MetricTensor(g))
        return h, AlgebraLayout(scalings=tuple(range(n)), lam=True), {"width": 0.5, "kind": "einstein"}
    raise ValueError(f"unknown template {name!r}")


TEMPLATES = ("three_step_dim6", "three_step_dim7", "l6_19", "dim7_147e", "conti8", "abelian")


def template_problem(name: str, kind: str = "es_system") -> SearchProblem:
    base, layout, opts = _template(name)
    # an abelian algebra has no Euclidean center to split off
    kind = opts.get("kind", kind)
    prob = algebra_problem(base, layout, kind=kind, width=opts["width"], meta={"template": name})
    if not opts.get("uniform"):
        return prob

    # tie all scalings to one parameter: x = (log s, lambda)
    full = prob
    n_s = len(layout.scalings)

    def expand(y):
        y = np.asarray(y, float)
        return np.concatenate([np.full(n_s, y[0]), y[1:]])

    return SearchProblem(
        ("log s", "lambda"),
        np.array([full.lower[0], full.lower[-1]]),
        np.array([full.upper[0], full.upper[-1]]),
        lambda y: full.objective(expand(y)),
        kind,
        lambda y: full.measure(expand(y)),
        meta=dict(full.meta),
    )


#: Near-solutions are declared at residual 1e-6, so the scan stops each simplex
#: at diameter 1e-8 instead of the general 1e-10.
SCAN_CONFIG = SearchConfig(max_evals=2000, xatol=1e-8, polish_rounds=0)


@dataclass(frozen=True)
class LambdaScanReport:
    template: str
    trials: int
    seed: int
    near_solutions: int
    lambdas: tuple[float, ...]
    min_lambda: float | None
    max_lambda: float | None
    best_residual: float
    supports_nonnegative: bool


def scan_lambda_sign(
    template: str = "three_step_dim6",
    trials: int = 50,
    seed: int = 0,
    threshold: float = 1e-6,
    config: SearchConfig | None = None,
) -> LambdaScanReport:
    """Minimise the Einstein-system residual with λ free from ``trials`` seeded
    starts and record λ at every near-solution (residual ≤ ``threshold``)."""
    config = SCAN_CONFIG if config is None else config
    prob = template_problem(template)
    lams: list[float] = []
    best = np.inf
    for r in range(trials):
        res = minimize_single(prob, seed, r, config)
        rep = prob.report(res)
        resid = float(rep["residual"])
        best = min(best, resid)
        if resid <= threshold:
            lams.append(float(rep["lambda"]))
    lo = min(lams) if lams else None
    hi = max(lams) if lams else None
    return LambdaScanReport(
        template, trials, seed, len(lams), tuple(lams), lo, hi, float(best), lo is None or lo >= -threshold
    )


def minimize_single(problem: SearchProblem, seed: int, restart: int, config: SearchConfig) -> np.ndarray:
    """Parameters reached by one restart."""
    return _one_restart(problem, seed, restart, config)[1]

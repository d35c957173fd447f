"""Seeded random nilpotent metric Lie algebras.

Algebras are grown by iterated one-dimensional central extensions: starting
from an abelian algebra, each step picks a random element of the 2-cocycle
space of the current algebra and adjoins a central vector carrying it.  Every
result is nilpotent by construction.  A random metric of the requested
signature is then attached and, optionally, a random basis change mixes the
coordinates so that neither the bracket nor the metric is in adapted form.
"""
from __future__ import annotations

from fractions import Fraction

import numpy as np

from .liealg import CocycleData, LiePresentation, MetricLieAlgebra, change_basis, random_cocycle_space, rigid_intersection
from .pseudolinalg import MetricTensor, as_array, max_abs, zeros

SMALL_RATIONALS = (Fraction(1, 2), Fraction(1), Fraction(2), Fraction(3), Fraction(3, 2))


def _coefficients(rng: np.random.Generator, k: int, exact: bool):
    if exact:
        return [Fraction(int(x)) for x in rng.integers(-2, 3, size=k)]
    return list(rng.normal(size=k))


def random_cocycle(rng: np.random.Generator, lie: LiePresentation) -> np.ndarray:
    """Random 2-cocycle of ``lie`` as a skew ``n x n`` array ``W[a, b] = omega(e_a, e_b)``."""
    space = random_cocycle_space(lie)
    n = lie.n
    if space.shape[0] == 0:
        return zeros((n, n), lie.exact)
    coeffs = _coefficients(rng, space.shape[0], lie.exact)
    w = zeros((n, n), lie.exact)
    for c, b in zip(coeffs, space):
        w = w + c * b
    # normalise so that constants stay of order one along long extension chains
    scale = max_abs(w)
    return w / scale if scale != 0 else w


def random_nilpotent_lie(rng: np.random.Generator, n: int, exact: bool = False, start: int | None = None) -> LiePresentation:
    """``n``-dimensional nilpotent presentation built by central extensions.

    The bracket is always built in rational arithmetic from small-integer
    combinations of cocycle-space basis elements and converted afterwards,
    which keeps float-mode samples away from nearly-degenerate filtrations
    whose numerical rank would be ambiguous.
    """
    if n < 1:
        raise ValueError("dimension must be positive")
    k = start if start is not None else int(rng.integers(2, 4))
    k = max(1, min(k, n))
    lie = LiePresentation.abelian(k, True)
    while lie.n < n:
        m = lie.n
        w = random_cocycle(rng, lie)
        c = zeros((m + 1, m + 1, m + 1), True)
        c[:m, :m, :m] = lie.c
        c[:m, :m, m] = w
        lie = LiePresentation(c)
    return lie if exact else lie.to_float()


def random_metric(rng: np.random.Generator, n: int, negative: int = 1, exact: bool = False) -> MetricTensor:
    """Diagonal metric with ``negative`` timelike directions at random positions."""
    negative = min(negative, n)
    signs = [-1] * negative + [1] * (n - negative)
    rng.shuffle(signs)
    if exact:
        mags = [SMALL_RATIONALS[int(i)] for i in rng.integers(0, len(SMALL_RATIONALS), size=n)]
    else:
        mags = list(rng.uniform(0.5, 2.0, size=n))
    return MetricTensor.diag([s * m for s, m in zip(signs, mags)], exact)


def random_transform(rng: np.random.Generator, n: int, exact: bool = False) -> np.ndarray:
    """Well-conditioned invertible matrix: unit upper-triangular (exact) or
    identity plus a small Gaussian perturbation (float)."""
    if exact:
        t = zeros((n, n), True)
        for i in range(n):
            t[i, i] = Fraction(1)
            for j in range(i + 1, n):
                t[i, j] = Fraction(int(rng.integers(-1, 2)))
        return t
    return np.eye(n) + 0.3 * rng.normal(size=(n, n)) / np.sqrt(n)


def random_metric_lie_algebra(
    rng: np.random.Generator,
    n: int,
    negative: int = 1,
    exact: bool = False,
    mix: bool = True,
) -> MetricLieAlgebra:
    """Random nilpotent metric Lie algebra of signature ``(negative, n - negative)``."""
    lie = random_nilpotent_lie(rng, n, exact)
    a = MetricLieAlgebra(lie, random_metric(rng, n, negative, exact))
    if mix:
        a = change_basis(a, random_transform(rng, n, exact))
    return a


def random_rigid_extension(
    rng: np.random.Generator, g: MetricLieAlgebra, p: int, tries: int = 20
) -> CocycleData | None:
    """Random ``p``-component cocycle on ``g`` with ``Z(g) ∩ ker omega = 0``,
    or ``None`` if none is found in ``tries`` attempts."""
    for _ in range(tries):
        forms = np.stack([random_cocycle(rng, g.lie) for _ in range(p)]) if p else zeros((0, g.n, g.n), g.exact)
        om = CocycleData.from_forms(forms, g.metric)
        if rigid_intersection(g, om).dim == 0:
            return om
    return None


def euclidean_center_metric(p: int, exact: bool = False) -> MetricTensor:
    return MetricTensor(as_array(np.eye(p, dtype=int), exact))

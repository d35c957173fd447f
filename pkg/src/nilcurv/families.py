"""Explicit metric Lie algebras: the classified Einstein families, the
quasi-Einstein building blocks they extend, and three worked examples.

Constructors take ``exact=True`` when every entry they produce is rational;
entries involving square roots force float mode and raise otherwise.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .liealg import CocycleData, LiePresentation, MetricLieAlgebra
from .pseudolinalg import MetricTensor, as_array, exact_sqrt, zeros


class ZeroParameter(ValueError):
    pass


class ParameterOutOfRange(ValueError):
    pass


FAMILIES = (
    "l6_19",
    "dim7_147e",
    "qe_dim5",
    "qe_dim6",
    "three_step_dim6_a",
    "three_step_dim6_b",
    "three_step_dim7",
    "conti8",
    "example7",
    "example10",
)


@dataclass(frozen=True)
class FamilySpec:
    name: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.name not in FAMILIES:
            raise ValueError(f"unknown family {self.name!r}")

    def build(self, exact: bool = False):
        return make_family(self.name, exact=exact, **self.params)


def _num(x, exact: bool):
    if exact:
        return as_array([x], True)[0]
    return float(x)


def _sqrt(x, exact: bool):
    if exact:
        r = exact_sqrt(Fraction(x))
        if r is None:
            raise ValueError(f"sqrt({x}) is irrational; use float mode")
        return r
    return math.sqrt(float(x))


def _sign(s) -> int:
    s = int(s)
    if s not in (1, -1):
        raise ValueError(f"sign parameters must be +1 or -1, got {s}")
    return s


def _nonzero(**kw):
    for k, v in kw.items():
        if v == 0:
            raise ZeroParameter(f"{k} must be nonzero")


def _algebra(n, brackets, diag=None, metric=None, exact=False) -> MetricLieAlgebra:
    lie = LiePresentation.from_brackets(n, brackets, exact)
    if metric is None:
        m = MetricTensor.diag(diag, exact)
    else:
        m = MetricTensor(as_array(metric, exact))
    return MetricLieAlgebra(lie, m)


def make_l6_19(alpha=1, exact: bool = False) -> MetricLieAlgebra:
    """Basis f1..f6, ``[f1,f2]=f4, [f1,f3]=f5, [f2,f4]=f6, [f3,f5]=-f6``.

    Metric ``f1*^2 + 2 f2*^2 + 2 f3*^2 + 4 a^4 f6*^2 - 2 a^2 (f4* f5* + f5* f4*)``.
    """
    _nonzero(alpha=alpha)
    a = _num(alpha, exact)
    one = _num(1, exact)
    br = [(0, 1, 3, one), (0, 2, 4, one), (1, 3, 5, one), (2, 4, 5, -one)]
    g = zeros((6, 6), exact)
    g[0, 0], g[1, 1], g[2, 2] = one, 2 * one, 2 * one
    g[5, 5] = 4 * a**4
    g[3, 4] = g[4, 3] = -2 * a**2
    return _algebra(6, br, metric=g, exact=exact)


def make_dim7_147e(r=Fraction(1, 2), a=1, exact: bool = False) -> MetricLieAlgebra:
    """Basis f1..f7 with ``[f1,f2]=f5, [f1,f3]=f6, [f2,f3]=f4, [f6,f2]=(1-r)f7,
    [f5,f3]=-r f7, [f4,f1]=f7`` and metric
    ``diag(1, 1, 1, -a, a r, a (1-r), a^2)``."""
    if not 0 < r < 1:
        raise ParameterOutOfRange("need 0 < r < 1")
    if not a > 0:
        raise ParameterOutOfRange("need a > 0")
    r, a = _num(r, exact), _num(a, exact)
    one = _num(1, exact)
    br = [
        (0, 1, 4, one),
        (0, 2, 5, one),
        (1, 2, 3, one),
        (5, 1, 6, one - r),
        (4, 2, 6, -r),
        (3, 0, 6, one),
    ]
    return _algebra(7, br, diag=[one, one, one, -a, a * r, a * (one - r), a * a], exact=exact)


# index names for the quasi-Einstein bases (e's first, then u's)
def make_qe_dim5(alpha=1, eps=1, sign=1, exact: bool = False) -> tuple[MetricLieAlgebra, CocycleData]:
    """Orthonormal basis (e1, e2, u1, u2, u3), ``<e1,e1> = -1``:
    ``[u1,u2] = a e2, [u2,u3] = ±a e1``, ``omega(e2,u3) = eps a``,
    ``omega(e1,u1) = ∓eps a``."""
    _nonzero(alpha=alpha)
    eps, sign = _sign(eps), _sign(sign)
    a = _num(alpha, exact)
    E1, E2, U1, U2, U3 = range(5)
    br = [(U1, U2, E2, a), (U2, U3, E1, sign * a)]
    g = _algebra(5, br, diag=[-1, 1, 1, 1, 1], exact=exact)
    w = zeros((5, 5), exact)
    _set_form(w, E2, U3, eps * a)
    _set_form(w, E1, U1, -sign * eps * a)
    return g, CocycleData.from_forms(w, g.metric)


def make_qe_dim6(alpha2=1, alpha3=1, eps=1, sign=1, exact: bool = False) -> tuple[MetricLieAlgebra, CocycleData]:
    """Orthonormal basis (e1, e2, e3, u1, u2, u3), ``<e1,e1> = -1``, with
    ``a = sqrt(a2^2 + a3^2)``:
    ``[u1,u2] = a2 e2, [u1,u3] = a3 e3, [u2,u3] = eps a e1``;
    ``omega(e2,u3) = ∓eps a2, omega(e3,u2) = ±eps a3, omega(e1,u1) = ±a``."""
    _nonzero(alpha2=alpha2, alpha3=alpha3)
    eps, sign = _sign(eps), _sign(sign)
    a2, a3 = _num(alpha2, exact), _num(alpha3, exact)
    a = _sqrt(a2 * a2 + a3 * a3, exact)
    E1, E2, E3, U1, U2, U3 = range(6)
    br = [(U1, U2, E2, a2), (U1, U3, E3, a3), (U2, U3, E1, eps * a)]
    g = _algebra(6, br, diag=[-1, 1, 1, 1, 1, 1], exact=exact)
    w = zeros((6, 6), exact)
    _set_form(w, E2, U3, -sign * eps * a2)
    _set_form(w, E3, U2, sign * eps * a3)
    _set_form(w, E1, U1, sign * a)
    return g, CocycleData.from_forms(w, g.metric)


def _set_form(w, i, j, v):
    w[i, j] = w[i, j] + v
    w[j, i] = w[j, i] - v


def make_three_step_dim6(alpha=1, variant: str = "a", sign=1, exact: bool = False) -> MetricLieAlgebra:
    """Orthonormal basis (e1, e2, u1, u2, u3, x), ``<e1,e1> = -1``:
    ``[u1,u2] = a e2, [u2,u3] = ±a e1`` and, for variant ``a``,
    ``[e2,u3] = a x, [e1,u1] = ∓a x``; variant ``b`` flips both ``x`` brackets."""
    _nonzero(alpha=alpha)
    if variant not in ("a", "b"):
        raise ValueError("variant must be 'a' or 'b'")
    sign = _sign(sign)
    v = 1 if variant == "a" else -1
    a = _num(alpha, exact)
    E1, E2, U1, U2, U3, X = range(6)
    br = [
        (U1, U2, E2, a),
        (U2, U3, E1, sign * a),
        (E2, U3, X, v * a),
        (E1, U1, X, -v * sign * a),
    ]
    return _algebra(6, br, diag=[-1, 1, 1, 1, 1, 1], exact=exact)


def make_three_step_dim7(alpha2=1, alpha3=1, eps=1, sign=1, exact: bool = False) -> MetricLieAlgebra:
    """Orthonormal basis (e1, e2, e3, u1, u2, u3, x), ``<e1,e1> = -1``:
    brackets of :func:`make_qe_dim6` plus ``[e2,u3] = ∓eps a2 x,
    [e3,u2] = ±eps a3 x, [e1,u1] = ±a x``."""
    _nonzero(alpha2=alpha2, alpha3=alpha3)
    eps, sign = _sign(eps), _sign(sign)
    a2, a3 = _num(alpha2, exact), _num(alpha3, exact)
    a = _sqrt(a2 * a2 + a3 * a3, exact)
    E1, E2, E3, U1, U2, U3, X = range(7)
    br = [
        (U1, U2, E2, a2),
        (U1, U3, E3, a3),
        (U2, U3, E1, eps * a),
        (E2, U3, X, -sign * eps * a2),
        (E3, U2, X, sign * eps * a3),
        (E1, U1, X, sign * a),
    ]
    return _algebra(7, br, diag=[-1, 1, 1, 1, 1, 1, 1], exact=exact)


def make_conti8() -> MetricLieAlgebra:
    """8-dimensional Einstein example with nonzero scalar curvature; orthonormal
    basis with ``e6`` timelike.  Float mode only."""
    s3, s2 = math.sqrt(3), math.sqrt(2)
    s52, s72, s21 = math.sqrt(5 / 2), math.sqrt(7 / 2), math.sqrt(21)
    b = {
        (1, 2): {3: -4 * s3},
        (1, 3): {4: s52},
        (1, 4): {8: -2 * s3},
        (1, 5): {6: 3 * s72},
        (1, 6): {7: -4 * s2},
        (2, 3): {5: -s52},
        (2, 4): {6: -3 * s72},
        (2, 5): {7: -2 * s3},
        (2, 6): {8: -4 * s2},
        (3, 4): {7: -s21},
        (3, 5): {8: -s21},
    }
    diag = [1.0] * 8
    diag[5] = -1.0
    return _algebra(8, _shift(b), diag=diag)


def make_example7() -> MetricLieAlgebra:
    """7-dimensional Ricci-flat 3-step example, ``e1`` timelike, center
    ``span{e7, e5 - e6}``.  Float mode only."""
    s2 = math.sqrt(2)
    b = {
        (1, 3): {7: s2},
        (2, 4): {7: s2},
        (4, 5): {1: -1.0},
        (4, 6): {1: -1.0},
        (3, 5): {2: -1.0},
        (3, 6): {2: -1.0},
    }
    return _algebra(7, _shift(b), diag=[-1.0] + [1.0] * 6)


def make_example10(p=1, r=1) -> MetricLieAlgebra:
    """10-dimensional Ricci-flat 3-step example, ``e5`` timelike, center
    ``span{e7..e10}``.  Float mode only."""
    _nonzero(p=p, r=r)
    p, r = float(p), float(r)
    q = math.sqrt(p * p + r * r)
    b = {
        (1, 3): {5: -q},
        (1, 4): {6: -q},
        (2, 4): {5: -q},
        (2, 3): {6: -q},
        (5, 1): {7: p},
        (5, 2): {8: p},
        (5, 3): {9: r},
        (5, 4): {10: r},
        (6, 1): {8: p},
        (6, 2): {7: p},
        (6, 3): {10: r},
        (6, 4): {9: r},
    }
    diag = [1.0] * 10
    diag[4] = -1.0
    return _algebra(10, _shift(b), diag=diag)


def _shift(b: dict) -> dict:
    """1-based labels as written for the examples -> 0-based indices."""
    return {(i - 1, j - 1): {k - 1: v for k, v in row.items()} for (i, j), row in b.items()}


# ---------------------------------------------------------------------------
# basis changes relating the families


def l6_19_substitution(alpha=1, sign=1, exact: bool = False) -> np.ndarray:
    """Columns express f1..f6 in the basis (e1, e2, u1, u2, u3, x) of
    :func:`make_three_step_dim6`:
    ``f1 = u2, f2 = u3 + u1, f3 = u3 - u1, f4 = ±a e1 - a e2,
    f5 = ±a e1 + a e2, f6 = 2 a^2 x``."""
    a = _num(alpha, exact)
    sign = _sign(sign)
    E1, E2, U1, U2, U3, X = range(6)
    T = zeros((6, 6), exact)
    T[U2, 0] = 1
    T[U3, 1], T[U1, 1] = 1, 1
    T[U3, 2], T[U1, 2] = 1, -1
    T[E1, 3], T[E2, 3] = sign * a, -a
    T[E1, 4], T[E2, 4] = sign * a, a
    T[X, 5] = 2 * a * a
    return _fix(T, exact)


def dim7_substitution(alpha2=1, alpha3=1, eps=1, sign=1, exact: bool = False) -> np.ndarray:
    """Columns express f1..f7 in the basis of :func:`make_three_step_dim7`:
    ``f1..f3 = u1..u3, f4 = eps a e1, f5 = a2 e2, f6 = a3 e3,
    f7 = ±eps (a2^2 + a3^2) x``."""
    eps, sign = _sign(eps), _sign(sign)
    a2, a3 = _num(alpha2, exact), _num(alpha3, exact)
    a = _sqrt(a2 * a2 + a3 * a3, exact)
    E1, E2, E3, U1, U2, U3, X = range(7)
    T = zeros((7, 7), exact)
    T[U1, 0], T[U2, 1], T[U3, 2] = 1, 1, 1
    T[E1, 3] = eps * a
    T[E2, 4] = a2
    T[E3, 5] = a3
    T[X, 6] = sign * eps * (a2 * a2 + a3 * a3)
    return _fix(T, exact)


def _fix(T, exact):
    return as_array(T, exact) if exact else np.asarray(T, dtype=float)


def r_of(alpha2, alpha3):
    return alpha2 * alpha2 / (alpha2 * alpha2 + alpha3 * alpha3)


def make_family(name: str, exact: bool = False, **params):
    """Dispatch by family name; returns a MetricLieAlgebra or (algebra, cocycle)."""
    if name == "l6_19":
        return make_l6_19(params.get("alpha", 1), exact)
    if name == "dim7_147e":
        return make_dim7_147e(params.get("r", Fraction(1, 2)), params.get("a", 1), exact)
    if name == "qe_dim5":
        return make_qe_dim5(params.get("alpha", 1), params.get("eps", 1), params.get("sign", 1), exact)
    if name == "qe_dim6":
        return make_qe_dim6(
            params.get("alpha2", 1), params.get("alpha3", 1), params.get("eps", 1), params.get("sign", 1), exact
        )
    if name in ("three_step_dim6_a", "three_step_dim6_b"):
        return make_three_step_dim6(params.get("alpha", 1), name[-1], params.get("sign", 1), exact)
    if name == "three_step_dim7":
        return make_three_step_dim7(
            params.get("alpha2", 1), params.get("alpha3", 1), params.get("eps", 1), params.get("sign", 1), exact
        )
    if exact:
        raise ValueError(f"{name} has irrational entries; float mode only")
    if name == "conti8":
        return make_conti8()
    if name == "example7":
        return make_example7()
    if name == "example10":
        return make_example10(params.get("p", 1), params.get("r", 1))
    raise ValueError(f"unknown family {name!r}")

"""JSON interchange format for metric Lie algebras.

Layout (UTF-8 JSON object, no other keys allowed)::

    {
      "dim": 3,
      "mode": "rational" | "float",
      "metric": [[...], ...],                  # dim x dim, symmetric
      "brackets": [{"i": 1, "j": 2, "k": 3, "c": "1"}, ...],
      "cocycle": {"p": 1, "z_metric": [[...]], "S": [[[...]]]},   # optional
      "tolerance": 1e-9                                             # optional
    }

Bracket records use 1-based indices with ``i < j`` and mean
``[e_i, e_j] += c e_k``.  In rational mode every scalar is a string ``"p/q"``
(or an integer); in float mode scalars are JSON numbers written with the
shortest round-trip representation.  ``cocycle.S`` lists the skew arrays
``S_l[a][b] = <S_l e_a, e_b>`` (the bilinear forms of the cocycle
endomorphisms), which are antisymmetric whatever the metric.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from .liealg import CocycleData, LiePresentation, MetricLieAlgebra
from .pseudolinalg import DegenerateMetric, MetricTensor, as_array, is_exact

TOP_KEYS = {"dim", "mode", "metric", "brackets", "cocycle", "tolerance"}
REQUIRED = ("dim", "mode", "metric", "brackets")
BRACKET_KEYS = {"i", "j", "k", "c"}
COCYCLE_KEYS = {"p", "z_metric", "S"}


class ParseError(ValueError):
    """Malformed file; the message names the offending field."""


class ValidationError(ValueError):
    """Well-formed file violating an invariant; the message names it."""


@dataclass(frozen=True, eq=False)
class AlgebraFile:
    algebra: MetricLieAlgebra
    cocycle: CocycleData | None = None
    z_metric: MetricTensor | None = None
    tolerance: float | None = None

    @property
    def exact(self) -> bool:
        return self.algebra.exact


# ---------------------------------------------------------------------------
# scalars


def _scalar(x, exact: bool, where: str):
    if exact:
        if isinstance(x, bool) or isinstance(x, float):
            raise ParseError(f"{where}: rational mode needs \"p/q\" strings or integers, got {x!r}")
        if isinstance(x, int):
            return Fraction(x)
        if isinstance(x, str):
            try:
                return Fraction(x.strip())
            except (ValueError, ZeroDivisionError) as exc:
                raise ParseError(f"{where}: not a rational number: {x!r}") from exc
        raise ParseError(f"{where}: not a rational number: {x!r}")
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise ParseError(f"{where}: float mode needs JSON numbers, got {x!r}")
    return float(x)


def format_scalar(x):
    """``"p/q"`` for rationals (``"p"`` for integers), shortest repr for floats."""
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    return float(x)


def _matrix(rows, n: int, exact: bool, where: str) -> np.ndarray:
    if not isinstance(rows, list) or len(rows) != n:
        raise ParseError(f"{where}: expected a list of {n} rows")
    out = []
    for a, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != n:
            raise ParseError(f"{where}[{a}]: expected {n} entries")
        out.append([_scalar(x, exact, f"{where}[{a}][{b}]") for b, x in enumerate(row)])
    return np.array(out, dtype=object if exact else float).reshape(n, n)


def _check_symmetric(g: np.ndarray, tol: float, where: str) -> None:
    n = g.shape[0]
    for a in range(n):
        for b in range(a + 1, n):
            d = g[a, b] - g[b, a]
            bad = d != 0 if is_exact(g) else abs(d) > tol * max(1.0, abs(g[a, b]), abs(g[b, a]))
            if bad:
                raise ValidationError(f"{where} is not symmetric: entries ({a + 1},{b + 1}) and ({b + 1},{a + 1}) differ")


# ---------------------------------------------------------------------------
# parse / emit


def parse(data: dict, default_tol: float | None = None) -> AlgebraFile:
    if not isinstance(data, dict):
        raise ParseError("top level must be a JSON object")
    unknown = set(data) - TOP_KEYS
    if unknown:
        raise ParseError(f"unknown field(s): {', '.join(sorted(unknown))}")
    for key in REQUIRED:
        if key not in data:
            raise ParseError(f"missing field: {key}")
    n = data["dim"]
    if isinstance(n, bool) or not isinstance(n, int) or n < 0:
        raise ParseError("dim: expected a nonnegative integer")
    mode = data["mode"]
    if mode not in ("rational", "float"):
        raise ParseError("mode: expected \"rational\" or \"float\"")
    exact = mode == "rational"
    tol = data.get("tolerance")
    if tol is not None and (isinstance(tol, bool) or not isinstance(tol, (int, float)) or tol <= 0):
        raise ParseError("tolerance: expected a positive number")
    eff_tol = float(tol) if tol is not None else default_tol
    g = _matrix(data["metric"], n, exact, "metric")
    _check_symmetric(g, eff_tol or 1e-9, "metric")
    try:
        metric = MetricTensor(g, eff_tol) if eff_tol is not None else MetricTensor(g)
    except DegenerateMetric as exc:
        raise ValidationError(f"metric: {exc}") from exc

    brackets = data["brackets"]
    if not isinstance(brackets, list):
        raise ParseError("brackets: expected a list of records")
    c = np.zeros((n, n, n), dtype=object if exact else float)
    if exact:
        c.fill(Fraction(0))
    for r, rec in enumerate(brackets):
        where = f"brackets[{r}]"
        if not isinstance(rec, dict):
            raise ParseError(f"{where}: expected an object")
        if set(rec) != BRACKET_KEYS:
            raise ParseError(f"{where}: expected exactly the fields i, j, k, c")
        i, j, k = rec["i"], rec["j"], rec["k"]
        for name, v in (("i", i), ("j", j), ("k", k)):
            if isinstance(v, bool) or not isinstance(v, int) or not 1 <= v <= n:
                raise ParseError(f"{where}.{name}: expected an index in 1..{n}")
        if not i < j:
            raise ValidationError(f"{where}: need i < j, got i={i}, j={j}")
        val = _scalar(rec["c"], exact, f"{where}.c")
        c[i - 1, j - 1, k - 1] += val
        c[j - 1, i - 1, k - 1] -= val
    alg = MetricLieAlgebra(LiePresentation(c), metric)

    cocycle = zmet = None
    if "cocycle" in data:
        co = data["cocycle"]
        if not isinstance(co, dict):
            raise ParseError("cocycle: expected an object")
        unknown = set(co) - COCYCLE_KEYS
        if unknown:
            raise ParseError(f"cocycle: unknown field(s): {', '.join(sorted(unknown))}")
        for key in COCYCLE_KEYS:
            if key not in co:
                raise ParseError(f"cocycle: missing field {key}")
        p = co["p"]
        if isinstance(p, bool) or not isinstance(p, int) or p < 0:
            raise ParseError("cocycle.p: expected a nonnegative integer")
        zg = _matrix(co["z_metric"], p, exact, "cocycle.z_metric")
        _check_symmetric(zg, eff_tol or 1e-9, "cocycle.z_metric")
        try:
            zmet = MetricTensor(zg, eff_tol) if eff_tol is not None else MetricTensor(zg)
        except DegenerateMetric as exc:
            raise ValidationError(f"cocycle.z_metric: {exc}") from exc
        S = co["S"]
        if not isinstance(S, list) or len(S) != p:
            raise ParseError(f"cocycle.S: expected {p} arrays")
        forms = [_matrix(s, n, exact, f"cocycle.S[{l}]") for l, s in enumerate(S)]
        for l, w in enumerate(forms):
            skew = w + w.T
            bad = any(x != 0 for x in skew.flat) if exact else np.max(np.abs(skew), initial=0.0) > (eff_tol or 1e-9)
            if bad:
                raise ValidationError(f"cocycle.S[{l}] is not antisymmetric")
        stack = np.array(forms, dtype=object if exact else float).reshape(p, n, n)
        cocycle = CocycleData.from_forms(stack, metric)
    return AlgebraFile(alg, cocycle, zmet, float(tol) if tol is not None else None)


def emit(a: MetricLieAlgebra, cocycle: CocycleData | None = None, z_metric: MetricTensor | None = None, tolerance: float | None = None) -> dict:
    """Canonical dict for ``a`` (brackets sorted by ``(i, j, k)``, zeros omitted)."""
    n = a.n
    exact = a.exact
    out: dict = {
        "dim": n,
        "mode": "rational" if exact else "float",
        "metric": [[format_scalar(x) for x in row] for row in a.metric.g],
        "brackets": [],
    }
    c = a.lie.c
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(n):
                if c[i, j, k] != 0:
                    out["brackets"].append({"i": i + 1, "j": j + 1, "k": k + 1, "c": format_scalar(c[i, j, k])})
    if cocycle is not None:
        p = cocycle.p
        if z_metric is None:
            z_metric = MetricTensor(as_array(np.eye(p, dtype=int), exact))
        forms = cocycle.forms(a.metric)
        out["cocycle"] = {
            "p": p,
            "z_metric": [[format_scalar(x) for x in row] for row in z_metric.g],
            "S": [[[format_scalar(x) for x in row] for row in w] for w in forms],
        }
    if tolerance is not None:
        out["tolerance"] = float(tolerance)
    return out


def dumps(obj: dict) -> str:
    return json.dumps(obj, indent=1, ensure_ascii=False) + "\n"


def load(path: str | Path, default_tol: float | None = None) -> tuple[AlgebraFile, str]:
    """Parse a file; returns the algebra file and the SHA-256 of its bytes."""
    raw = Path(path).read_bytes()
    digest = hashlib.sha256(raw).hexdigest()
    try:
        data = json.loads(raw.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        line = getattr(exc, "lineno", None)
        where = f" (line {line})" if line else ""
        raise ParseError(f"not valid UTF-8 JSON{where}: {exc}") from exc
    return parse(data, default_tol), digest

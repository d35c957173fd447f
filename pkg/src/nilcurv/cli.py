"""Command-line interface: ``check``, ``family``, ``search``, ``lemma`` and
``verify-paper``.

Every command builds a :class:`Report` (a list of per-check records plus the
tool version and a SHA-256 of the input), prints a text table or the JSON
form, and exits with status 0 iff no record has verdict ``fail``.  Malformed
input and invalid flags exit with status 2 and a one-line message on stderr.

Tolerance precedence: ``--tol`` flag > file ``tolerance`` field >
``NILCURV_TOL`` environment variable > built-in default.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from . import attributes as at
from . import claims as cl
from . import families as fam
from . import fileformat as ff
from . import liealg as la
from . import matlemmas as ml
from . import search as se
from .curvature import einstein_check, ricci_general, ricci_nilpotent
from .pseudolinalg import default_tol, inertia, is_nondegenerate, is_zero, max_abs

PASS, FAIL, INFO = "pass", "fail", "info"


class UsageError(ValueError):
    """Invalid flag combination; reported with exit status 2."""


# ---------------------------------------------------------------------------
# reports


def jsonable(x):
    """Plain-JSON view: Fractions as ``"p/q"``, arrays as nested lists."""
    if x is None or isinstance(x, (bool, str)):
        return x
    if isinstance(x, np.bool_):
        return bool(x)
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        v = float(x)
        return v if math.isfinite(v) else repr(v)
    if isinstance(x, np.ndarray):
        return [jsonable(v) for v in x.tolist()] if x.dtype != object else [jsonable(v) for v in x]
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if hasattr(x, "__dataclass_fields__"):
        return {k: jsonable(getattr(x, k)) for k in x.__dataclass_fields__}
    return str(x)


@dataclass
class Record:
    name: str
    verdict: str
    residual: object = None
    lam: object = None
    details: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "verdict": self.verdict,
            "residual": jsonable(self.residual),
            "lambda": jsonable(self.lam),
            "details": jsonable(self.details),
        }


@dataclass
class Report:
    command: str
    input_sha256: str
    args: dict = field(default_factory=dict)
    records: list[Record] = field(default_factory=list)
    summary: dict = field(default_factory=dict)

    def add(self, name, ok, residual=None, lam=None, **details) -> Record:
        verdict = ok if isinstance(ok, str) else (PASS if ok else FAIL)
        r = Record(name, verdict, residual, lam, details)
        self.records.append(r)
        return r

    @property
    def failures(self) -> int:
        return sum(r.verdict == FAIL for r in self.records)

    def to_json(self) -> dict:
        return {
            "tool": "nilcurv",
            "version": __version__,
            "command": self.command,
            "input_sha256": self.input_sha256,
            "args": jsonable(self.args),
            "summary": jsonable(self.summary),
            "checks": [r.to_json() for r in self.records],
            "failed": self.failures,
        }

    def to_text(self) -> str:
        def fmt(v):
            if v is None:
                return "-"
            if isinstance(v, Fraction):
                return str(v)
            if isinstance(v, (float, np.floating)):
                return f"{float(v):.3e}"
            return str(v)

        rows = [(r.name, r.verdict, fmt(r.residual), fmt(r.lam)) for r in self.records]
        head = ("check", "verdict", "residual", "lambda")
        w = [max(len(h), *(len(row[i]) for row in rows)) if rows else len(h) for i, h in enumerate(head)]
        lines = [f"nilcurv {__version__} {self.command}  input sha256 {self.input_sha256[:16]}"]
        for k, v in self.summary.items():
            lines.append(f"  {k}: {fmt(v) if not isinstance(v, (list, dict)) else json.dumps(jsonable(v))}")
        lines.append("  ".join(h.ljust(w[i]) for i, h in enumerate(head)))
        lines.append("  ".join("-" * x for x in w))
        for row in rows:
            lines.append("  ".join(c.ljust(w[i]) for i, c in enumerate(row)))
        lines.append(f"{len(self.records) - self.failures}/{len(self.records)} checks without failure")
        return "\n".join(lines) + "\n"


def args_digest(args: dict) -> str:
    return hashlib.sha256(json.dumps(jsonable(args), sort_keys=True).encode()).hexdigest()


def resolve_tol(flag: float | None, file_tol: float | None = None) -> float:
    if flag is not None:
        return float(flag)
    if file_tol is not None:
        return float(file_tol)
    return default_tol()


# ---------------------------------------------------------------------------
# check


def _load_matrix(path: str, n: int, exact: bool) -> np.ndarray:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ff.ParseError(f"{path}: {exc}") from exc
    if isinstance(data, dict):
        data = data.get("D")
    return ff._matrix(data, n, exact, "D")


def cmd_check(args) -> Report:
    afile, digest = ff.load(args.file)
    tol = resolve_tol(args.tol, afile.tolerance)
    a = afile.algebra
    rep = Report("check", digest, {"file": Path(args.file).name, "tol": tol, "mode": args.mode, "decompose": args.decompose})
    n = a.n
    rep.summary.update(dim=n, number_mode="rational" if a.exact else "float", signature=list(inertia(a.metric.g, tol)))

    jac = la.jacobi_residual(a.lie)
    rep.add("jacobi", is_zero(jac, tol), jac)
    nilpotent = la.is_nilpotent(a.lie, tol)
    details = {}
    if nilpotent:
        details = {
            "class": la.nilpotency_class(a.lie, tol),
            "series_dims": [s.dim for s in la.lower_central_series(a.lie, tol)],
        }
    rep.add("nilpotent", INFO, None, None, nilpotent=nilpotent, **details)
    z = la.center(a.lie, tol)
    rep.add("center", INFO, None, None, dim=z.dim, nondegenerate=is_nondegenerate(z, a.metric) if z.dim else True)

    general = ricci_general(a)
    if nilpotent:
        nil = ricci_nilpotent(a, check=False)
        scale = max(1.0, float(max_abs(general.ric)))
        diff = max_abs(general.ric - nil.ric)
        rep.add("ricci_routes_agree", is_zero(diff, tol, scale), diff)
        tr = np.trace(nil.J1) - np.trace(nil.J2)
        rep.add("trace_j1_equals_trace_j2", is_zero(abs(tr), tol, scale), abs(tr))

    ef = einstein_check(a, "einstein", tol=tol, report=general)
    rf = einstein_check(a, "ricci_flat", tol=tol, report=general)
    verdict = "ricci_flat" if rf.passed else ("einstein" if ef.passed else "not_einstein")
    rep.summary["verdict"] = verdict
    rep.summary["scalar_curvature"] = general.scalar
    if args.mode == "auto":
        rep.add("einstein_class", INFO, ef.residual, ef.lam, verdict=verdict)
    elif args.mode == "einstein":
        rep.add("einstein", ef.passed, ef.residual, ef.lam)
    elif args.mode == "ricci_flat":
        rep.add("ricci_flat", rf.passed, rf.residual, rf.lam)
    if args.soliton:
        D = _load_matrix(args.soliton, n, a.exact)
        sv = einstein_check(a, "soliton", D=D, tol=tol, report=general)
        rep.add("soliton", sv.passed, sv.residual, sv.lam, derivation_residual=sv.derivation_residual)
    elif args.mode == "soliton":
        raise UsageError("--mode soliton needs --soliton FILE holding the candidate derivation D")

    if afile.cocycle is not None:
        qe = at.quasi_einstein_check(a, afile.cocycle, 0, afile.z_metric, tol)
        rep.add("quasi_einstein_lambda_zero", qe.passed, max(qe.ricci_residual, qe.trace_residual), qe.lam, rigid=qe.rigid)
        cres = la.cocycle_residual(a, afile.cocycle)
        rep.add("cocycle_identity", is_zero(cres, tol), cres)

    if args.decompose:
        t = at.decompose(a)
        via = max_abs(at.ricci_via_attributes(t).ric - general.ric)
        rep.add("attributes_ricci_oracle", is_zero(via, tol, max(1.0, float(max_abs(general.ric)))), via)
        es = at.einstein_conditions_es(t, general.lambda_star)
        es_ok = all(is_zero(r, tol) for r in es)
        rep.add(
            "einstein_system",
            INFO if args.mode == "auto" and not ef.passed else es_ok,
            max(es),
            general.lambda_star,
            residuals=list(es),
            rigid=t.rigid,
            p=t.p,
        )
        rep.add("einstein_system_matches_direct_check", es_ok == ef.passed, None, general.lambda_star)
        sv = at.soliton_verdict(t, tol)
        soliton = sv.get("soliton")
        rep.add(
            "attributes_soliton",
            INFO,
            None if soliton is None else soliton.residual,
            None if soliton is None else soliton.lam,
            applies=sv["applies"],
            om_residual=sv["om_residual"],
            is_soliton=None if soliton is None else soliton.passed,
        )
    return rep


# ---------------------------------------------------------------------------
# family


FAMILY_PARAMS = {
    "l6_19": ("alpha",),
    "dim7_147e": ("r", "a"),
    "qe_dim5": ("alpha", "eps", "sign"),
    "qe_dim6": ("alpha2", "alpha3", "eps", "sign"),
    "three_step_dim6_a": ("alpha", "sign"),
    "three_step_dim6_b": ("alpha", "sign"),
    "three_step_dim7": ("alpha2", "alpha3", "eps", "sign"),
    "conti8": (),
    "example7": (),
    "example10": ("p", "r"),
}
INTEGER_PARAMS = ("eps", "sign", "p")


def _number(text: str, exact: bool):
    try:
        return Fraction(text) if exact else float(Fraction(text))
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"not a number: {text!r}") from exc


def family_params(args) -> dict:
    allowed = FAMILY_PARAMS[args.name]
    params = {}
    for key in ("alpha", "r", "a", "alpha2", "alpha3", "eps", "sign", "p"):
        val = getattr(args, key)
        if val is None:
            continue
        if key not in allowed:
            raise UsageError(f"family {args.name} takes no --{key} parameter (allowed: {', '.join(allowed) or 'none'})")
        if key in INTEGER_PARAMS or (args.name == "example10" and key == "r"):
            try:
                params[key] = int(val)
            except ValueError as exc:
                raise UsageError(f"--{key} needs an integer, got {val!r}") from exc
        else:
            params[key] = _number(val, args.exact)
    return params


def cmd_family(args) -> tuple[Report, str]:
    params = family_params(args)
    built = fam.make_family(args.name, exact=args.exact, **params)
    a, cocycle = built if isinstance(built, tuple) else (built, None)
    text = ff.dumps(ff.emit(a, cocycle))
    digest = hashlib.sha256(text.encode()).hexdigest()
    rep = Report("family", digest, {"name": args.name, "params": params, "exact": args.exact})
    rep.summary.update(dim=a.n, cocycle=cocycle is not None)
    rep.add("constructed", PASS, la.jacobi_residual(a.lie), None, family=args.name)
    return rep, text


# ---------------------------------------------------------------------------
# search


def cmd_search(args) -> Report:
    base = {"problem": args.problem, "template": args.template, "trials": args.trials, "seed": args.seed}
    rep = Report("search", args_digest(base), base)
    if args.trials < 1:
        raise UsageError("--trials must be positive")
    if args.problem == "lambda-sign":
        templates = [args.template] if args.template else ["three_step_dim6", "three_step_dim7"]
        share = [args.trials // len(templates) + (i < args.trials % len(templates)) for i in range(len(templates))]
        lows = []
        for name, trials in zip(templates, share):
            if trials == 0:
                continue
            r = se.scan_lambda_sign(name, trials, args.seed, args.threshold)
            rep.add(
                f"lambda_sign[{name}]",
                r.supports_nonnegative,
                r.best_residual,
                r.min_lambda,
                trials=r.trials,
                near_solutions=r.near_solutions,
                max_lambda=r.max_lambda,
            )
            if r.min_lambda is not None:
                lows.append(r.min_lambda)
        rep.summary["min_lambda"] = min(lows) if lows else None
        return rep
    name = args.template or "three_step_dim6"
    problem = se.template_problem(name, kind="einstein")
    res = se.minimize(problem, args.trials, args.seed, se.SCAN_CONFIG)
    rep.add(f"einstein[{name}]", INFO, res.residual, res.lam, restart=res.restart, params=res.named)
    return rep


# ---------------------------------------------------------------------------
# lemma


def _qe_families():
    pts = [fam.make_qe_dim5(1, 1, 1), fam.make_qe_dim5(2, -1, -1), fam.make_qe_dim6(1, 1, 1, 1), fam.make_qe_dim6(3, 4, -1, 1)]
    for g, om in pts:
        yield g.to_float(), la.CocycleData(np.asarray(om.S, float))


def cmd_lemma(args) -> Report:
    base = {k: v for k, v in vars(args).items() if k not in ("func", "json", "report")}
    rep = Report(f"lemma {args.which}", args_digest(base), base)
    tol = resolve_tol(args.tol)
    if args.which == "weyl-fuzz":
        r = ml.weyl_fuzz(args.trials, args.seed, args.max_dim)
        rep.add("weyl_inequalities", r.worst_violation <= 1e-10, r.worst_violation, None, trials=r.trials, checks=r.checks)
    elif args.which == "genlem0":
        for i, (g, om) in enumerate(_qe_families()):
            t = at.attributes_from(g, om)
            f, v = ml.genlem0_family_from_blocks(at.three_step_blocks(t, 0.0, tol), tol)
            r = ml.genlem0_verify(f, v, tol)
            rep.add(
                f"skew_family[{i}]",
                r.hypothesis_holds and bool(r.conclusions_hold) and not r.counterexample,
                r.hypothesis_residual,
                None,
                ranks=list(r.ranks),
                tail_zero=r.tail_zero,
            )
    elif args.which == "genlem1":
        for i, (g, om) in enumerate(_qe_families()):
            t = at.attributes_from(g, om)
            f, _ = ml.genlem0_family_from_blocks(at.three_step_blocks(t, 0.0, tol), tol)
            b = ml.genlem1_basis(f.M[1:], tol)
            worst = max(b.gram_residual, b.action_residual)
            rep.add(f"adapted_basis[{i}]", worst <= max(tol, 1e-10), worst, None, alpha=b.alpha)
    elif args.which == "imp-check":
        a1, a2 = Fraction(args.a1), Fraction(args.a2)
        if a1 == 0 or a2 == 0:
            raise UsageError("--a1 and --a2 must be nonzero")
        exact_ok = True
        try:
            ex = ml.lemmaimp_residual(ml.explicit_solution(a1, a2, exact=True))
        except ValueError as exc:  # irrational alpha: exact mode unavailable
            ex, exact_ok = None, False
            rep.add("explicit_solution_exact", INFO, None, None, skipped=str(exc))
        if exact_ok:
            rep.add("explicit_solution_exact", ex == 0, ex)
        worst = 0.0
        for eps in (1, -1):
            for s in (1, -1):
                worst = max(worst, float(ml.lemmaimp_residual(ml.explicit_solution(float(a1), float(a2), eps, s))))
        rep.add("explicit_solution_float", worst <= 1e-12, worst)
    elif args.which == "imp-search":
        if args.k < 1 or args.restarts < 1:
            raise UsageError("--k and --restarts must be positive")
        r = ml.lemmaimp_search(args.k, args.restarts, args.seed)
        if args.k == 1:
            ok = r.residual <= 1e-8
        else:
            ok = r.residual > 1e-3
        rep.add(
            f"lemmaimp_search[k={args.k}]",
            ok,
            r.residual,
            None,
            evidence=r.evidence,
            branch={"reflect": r.branch.reflect, "alpha_sign": r.branch.alpha_sign},
            restart=r.restart,
            per_branch=r.per_branch,
        )
        rep.summary["floor"] = r.residual
    return rep


# ---------------------------------------------------------------------------
# verify-paper


def cmd_verify(args) -> Report:
    tol = resolve_tol(args.tol)
    base = {"tol": tol, "fast": args.fast}
    rep = Report("verify-paper", args_digest(base), base)
    statements = {c.name: c.statement for c in cl.CLAIMS}
    for r in cl.run_claims(tol, include_expensive=not args.fast):
        rep.add(r.name, r.passed, r.residual, r.lam, statement=statements[r.name], **r.details)
    return rep


# ---------------------------------------------------------------------------
# entry point


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="print the JSON report instead of the table")
    common.add_argument("--report", metavar="PATH", help="also write the JSON report to PATH")

    p = argparse.ArgumentParser(prog="nilcurv", description="Curvature of metric nilpotent Lie algebras.")
    p.add_argument("--version", action="version", version=f"nilcurv {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", parents=[common], help="verify an algebra file")
    c.add_argument("file")
    c.add_argument("--tol", type=float)
    c.add_argument("--mode", choices=("auto", "einstein", "ricci_flat", "soliton"), default="auto")
    c.add_argument("--decompose", action="store_true", help="run the center-orthogonal decomposition checks")
    c.add_argument("--soliton", metavar="DFILE", help="JSON n x n matrix (or {\"D\": ...}) of a candidate derivation")
    c.set_defaults(func=cmd_check)

    f = sub.add_parser("family", help="emit a family member as an algebra file")
    f.add_argument("name", choices=fam.FAMILIES)
    for key in ("alpha", "r", "a", "eps", "sign", "p"):
        f.add_argument(f"--{key}")
    f.add_argument("--a2", "--alpha2", dest="alpha2")
    f.add_argument("--a3", "--alpha3", dest="alpha3")
    f.add_argument("--exact", action="store_true", help="rational mode")
    f.add_argument("--emit", metavar="PATH", help="write the file here instead of stdout")
    f.set_defaults(func=None)

    s = sub.add_parser("search", parents=[common], help="residual-minimisation probes")
    s.add_argument("--problem", choices=("lambda-sign", "einstein"), default="lambda-sign")
    s.add_argument("--template", choices=se.TEMPLATES)
    s.add_argument("--trials", type=int, default=50)
    s.add_argument("--seed", type=int, default=1)
    s.add_argument("--threshold", type=float, default=1e-6)
    s.set_defaults(func=cmd_search)

    m = sub.add_parser("lemma", parents=[common], help="matrix-lemma checks")
    m.add_argument("which", choices=("weyl-fuzz", "genlem0", "genlem1", "imp-check", "imp-search"))
    m.add_argument("--tol", type=float)
    m.add_argument("--trials", type=int, default=1000)
    m.add_argument("--max-dim", type=int, default=8)
    m.add_argument("--seed", type=int, default=7)
    m.add_argument("--k", type=int, default=1)
    m.add_argument("--restarts", type=int, default=50)
    m.add_argument("--a1", default="3")
    m.add_argument("--a2", default="4")
    m.set_defaults(func=cmd_lemma)

    v = sub.add_parser("verify-paper", parents=[common], help="run every checkable claim")
    v.add_argument("--tol", type=float)
    v.add_argument("--fast", action="store_true", help="skip the search-based claims")
    v.set_defaults(func=cmd_verify)
    return p


INPUT_ERRORS = (
    ff.ParseError,
    ff.ValidationError,
    UsageError,
    at.DegenerateCenter,
    at.NonEuclideanCenter,
    fam.ParameterOutOfRange,
    fam.ZeroParameter,
    OSError,
)


def _emit_report(rep: Report, args) -> None:
    js = json.dumps(rep.to_json(), indent=1, sort_keys=False) + "\n"
    if getattr(args, "report", None):
        Path(args.report).write_text(js, encoding="utf-8")
    sys.stdout.write(js if getattr(args, "json", False) else rep.to_text())


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "family":
            rep, text = cmd_family(args)
            if args.emit:
                Path(args.emit).write_text(text, encoding="utf-8")
                sys.stderr.write(f"wrote {args.emit} ({rep.summary['dim']}-dim)\n")
            else:
                sys.stdout.write(text)
            return 0
        rep = args.func(args)
    except INPUT_ERRORS as exc:
        sys.stderr.write(f"nilcurv: error: {type(exc).__name__}: {exc}\n")
        return 2
    except ValueError as exc:
        sys.stderr.write(f"nilcurv: error: {exc}\n")
        return 2
    _emit_report(rep, args)
    return 0 if rep.failures == 0 else 1


if __name__ == "__main__":
    sys.exit(main())

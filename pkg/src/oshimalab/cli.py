"""Command-line interface: ``oshimalab <command> [options]``.

Every command prints one JSON document on standard output.  Exit codes:
0 success, 1 failed check or domain error, 2 usage error.
"""

from __future__ import annotations

import argparse
import ast
import csv
import dataclasses
import json
import operator
import sys

import numpy as np

from . import bgroupoid as bg
from . import degeneration as dg
from . import fell
from . import groupoid as gp
from . import oshima as osh
from .errors import OshimaLabError, UnknownRoot, UnsupportedGroup, WrongGroup
from .lie import Tolerances, build_group
from .parabolic import normalize_subset, parabolic_datum, subset_label
from .verify import CHECKS_BY_ID, DEFAULT_GROUPS, SCHEMA, verify_suite

USAGE_ERRORS = (UnknownRoot, UnsupportedGroup, WrongGroup)
CONFIG_KEYS = ("group", "seed", "tol_alg", "tol_fact", "json_indent", "fault_inject")


class UsageError(Exception):
    pass


# -- JSON helpers ---------------------------------------------------------------


def to_json(x):
    if isinstance(x, dict):
        return {str(k): to_json(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [to_json(v) for v in x]
    if isinstance(x, np.ndarray):
        return to_json(x.tolist())
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (complex, np.complexfloating)):
        if np.isinf(abs(x)):
            return "inf"
        return {"re": to_json(x.real), "im": to_json(x.imag)}
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if np.isnan(x):
            return "nan"
        if np.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x + 0.0
    return x


# -- argument parsing -----------------------------------------------------------


def parse_vector(text, length=None, what="t"):
    try:
        v = np.array([float(p) for p in str(text).replace(" ", "").split(",") if p != ""])
    except ValueError:
        raise UsageError(f"cannot parse {what} from {text!r}; expected comma separated numbers") from None
    if v.size == 0 or not np.all(np.isfinite(v)):
        raise UsageError(f"cannot parse {what} from {text!r}")
    if length is not None and v.size != length:
        raise UsageError(f"{what} needs {length} entries, got {v.size}")
    return v


def parse_matrix(text, n=None, what="g"):
    """Rows separated by ';', entries by ','."""
    try:
        rows = [[float(p) for p in row.split(",")] for row in str(text).replace(" ", "").split(";")]
        m = np.array(rows, dtype=float)
    except ValueError:
        raise UsageError(f"cannot parse matrix {what} from {text!r}; expected e.g. '1,1;0,1'") from None
    if m.ndim != 2 or m.shape[0] != m.shape[1] or (n is not None and m.shape[0] != n):
        raise UsageError(f"matrix {what} must be square" + (f" of size {n}" if n else ""))
    return m


def parse_root(G, text):
    try:
        I = normalize_subset(G, text)
    except OshimaLabError as exc:
        raise UsageError(str(exc)) from None
    if len(I) != 1:
        raise UsageError(f"expected one simple root, got {text!r}")
    return I[0]


_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul, ast.Div: operator.truediv, ast.Pow: operator.pow}
_UNOPS = {ast.USub: operator.neg, ast.UAdd: operator.pos}


def _eval_expr(node, n):
    if isinstance(node, ast.Expression):
        return _eval_expr(node.body, n)
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
        return float(node.value)
    if isinstance(node, ast.Name) and node.id == "n":
        return float(n)
    if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
        return _BINOPS[type(node.op)](_eval_expr(node.left, n), _eval_expr(node.right, n))
    if isinstance(node, ast.UnaryOp) and type(node.op) in _UNOPS:
        return _UNOPS[type(node.op)](_eval_expr(node.operand, n))
    raise UsageError("path expressions may only use numbers, n, + - * / and ^")


def parse_path(text, rank):
    """'t=2^-n' or 't=(2^-n,1)' -> (list of component trees, limit vector).

    Components that mention n are taken to vanish in the limit.
    """
    s = str(text).replace(" ", "")
    if s.startswith("t="):
        s = s[2:]
    if s.startswith("(") and s.endswith(")"):
        s = s[1:-1]
    parts = s.split(",")
    if len(parts) != rank:
        raise UsageError(f"path needs {rank} components, got {len(parts)}")
    trees = []
    for p in parts:
        try:
            trees.append(ast.parse(p.replace("^", "**"), mode="eval"))
        except SyntaxError:
            raise UsageError(f"cannot parse path component {p!r}") from None
    limit = []
    for tree in trees:
        try:
            _eval_expr(tree, 1)
        except (ZeroDivisionError, OverflowError):
            raise UsageError("path expression cannot be evaluated at n = 1") from None
        uses_n = any(isinstance(x, ast.Name) for x in ast.walk(tree))
        limit.append(0.0 if uses_n else _eval_expr(tree, 0))
    return trees, np.array(limit)


def parse_json_arg(text, what):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{what} is not valid JSON: {exc}") from None


def parse_arrow(G, text, what):
    """{"gamma": matrix, "g": matrix, "t": vector} or with "base": {"g", "t"}."""
    d = parse_json_arg(text, what)
    if not isinstance(d, dict) or "gamma" not in d:
        raise UsageError(f"{what} must be an object with 'gamma', 'g' and 't'")
    base = d.get("base", d)
    try:
        gamma = np.array(d["gamma"], dtype=float)
        g = np.array(base.get("g", np.eye(G.n)), dtype=float)
        t = np.atleast_1d(np.array(base["t"], dtype=float))
    except (KeyError, TypeError, ValueError):
        raise UsageError(f"{what} must give numeric 'gamma', 'g' and 't'") from None
    if gamma.shape != (G.n, G.n) or g.shape != (G.n, G.n) or t.shape != (G.roots.rank,):
        raise UsageError(f"{what} has the wrong shape for {G.name}")
    return gp.Arrow(gamma, osh.OshimaPoint(g, t))


def parse_model_arrow(text, what):
    d = parse_json_arg(text, what)
    try:
        return bg.model_arrow(d["m2"], d["a"], d["m1"])
    except (KeyError, TypeError) as exc:
        raise UsageError(f"{what} must be an object with 'm2', 'a' and 'm1'") from exc
    except ValueError as exc:
        raise UsageError(f"{what}: {exc}") from None


def parse_word(G, text, t0):
    """'e', 'diag:2,0.5' (an A-element) or JSON {"coeffs": [[...]], "m": 0} (an H-word)."""
    s = str(text).strip()
    if s in ("e", "identity", "1"):
        return np.eye(G.n), "identity"
    if s.startswith("diag:"):
        d = parse_vector(s[5:], G.n, what="diag")
        a = np.diag(d)
        if np.any(d <= 0) or abs(np.prod(d) - 1.0) > 1e-9:
            raise UsageError("an A-element needs positive diagonal entries with product 1")
        return a, "a"
    d = parse_json_arg(s, "--word")
    if isinstance(d, list):
        d = {"coeffs": d}
    try:
        coeffs = np.atleast_2d(np.array(d["coeffs"], dtype=float))
        m = int(d.get("m", 0))
    except (KeyError, TypeError, ValueError):
        raise UsageError("--word must be 'e', 'diag:...' or JSON {\"coeffs\": [[...]], \"m\": k}") from None
    k = dg.normalized_generators(G, t0).shape[0]
    if coeffs.shape[1] != k:
        raise UsageError(f"each word letter needs {k} coefficients (one per h_t generator)")
    return dg.h_word(G, t0, coeffs, m_index=m), "h_word"


# -- commands -------------------------------------------------------------------


def cmd_roots(G, args):
    R = G.roots
    roots = [
        {"coeffs": list(r.coeffs), "values": r.vector, "multiplicity": r.mult, "space": r.space}
        for r in R.positive
    ]
    return {"rank": R.rank, "simple": [list(r.coeffs) for r in R.simple], "positive": roots, "count_positive": len(roots)}, 0


def cmd_parabolic(G, args):
    try:
        I = normalize_subset(G, args.subset)
    except OshimaLabError as exc:
        raise UsageError(str(exc)) from None
    P = parabolic_datum(G, I)
    parts = ("a_I", "m_I", "n_I", "nbar_I", "k_I", "h_I", "p_I")
    return {"subset": subset_label(I), "I": list(I), "dims": P.dims(), "bases": {p: getattr(P, p).basis for p in parts}}, 0


def cmd_deform(G, args):
    t = parse_vector(args.t, G.roots.rank)
    out = {"t": t, "support": list(dg.support(t)), "emit": args.emit}
    if args.emit == "basis":
        h = dg.h_t_basis(G, t)
        out.update(dim=h.dim, basis=h.basis)
    else:
        X = fell.sample_h_t(G, t, R=args.R, eps=args.eps, seed=args.seed)
        pts = X.window()
        out.update(R=args.R, eps=args.eps, count=len(pts), points=pts)
    return out, 0


def cmd_fell_limit(G, args):
    trees, limit = parse_path(args.path, G.roots.rank)
    if args.limit is not None:
        limit = parse_vector(args.limit, G.roots.rank, what="--limit")
    if args.steps < 1:
        raise UsageError("--steps must be positive")
    path = [np.array([_eval_expr(tr, k) for tr in trees]) for k in range(1, args.steps + 1)]
    rows = fell.distance_table(G, path, limit, R=args.R, eps=args.eps, seed=args.seed)
    for k, r in enumerate(rows, start=1):
        r["step"] = k
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["step", *[f"t{i + 1}" for i in range(G.roots.rank)], "window_distance"])
            for r in rows:
                w.writerow([r["step"], *r["t"], r["window_distance"]])
    return {"path": args.path, "limit": limit, "R": args.R, "eps": args.eps, "rows": rows, "label": "window distance"}, 0


def cmd_orbit(G, args):
    t = parse_vector(args.t, G.roots.rank)
    g = np.eye(G.n) if args.g is None else parse_matrix(args.g, G.n)
    p = osh.OshimaPoint.make(G, g, t)
    cls = osh.orbit_class(p)
    h = gp.isotropy_subalgebra(G, p)
    out = {
        "t": t,
        "orbit_class": cls.label(),
        "signs": list(cls.s),
        "I": list(cls.I),
        "satake": osh.satake_member(p),
        "isotropy_dim": h.dim,
        "orbit_dim": G.dim_g - h.dim - (G.dim_a - len(cls.I)),
        "closure": [c.label() for c in osh.orbit_closure_classes(cls)],
        "orbit_count": len(osh.all_orbit_classes(G.roots.rank)),
    }
    try:
        c = osh.canonicalize(G, p)
        out["chart"] = {"index": c.chart, "n": c.n, "t": c.t}
    except OshimaLabError as exc:
        out["chart"] = {"error": str(exc)}
    return out, 0


def cmd_sphere(G, args):
    if not (G.is_sl and G.n == 2):
        raise WrongGroup("the sphere model is only defined for SL(2,R)")
    g = parse_matrix(args.g, 2)
    t = parse_vector(args.t, 1)
    z = osh.sl2_sphere(G, osh.OshimaPoint.make(G, g, t))
    return {"g": g, "t": t, "z": z, "region": osh.sphere_region(z)}, 0


def _arrow_json(G, A):
    out = {"gamma": A.gamma, "base": {"g": A.base.g, "t": A.base.t}}
    for key, p in (("source", gp.source(A)), ("target", gp.target(A))):
        try:
            c = osh.canonicalize(G, p)
            out[key] = {"chart": c.chart, "n": c.n, "t": c.t}
        except OshimaLabError as exc:
            out[key] = {"error": str(exc)}
    return out


def cmd_compose(G, args):
    A1 = parse_arrow(G, args.arrow1, "--arrow1")
    A2 = parse_arrow(G, args.arrow2, "--arrow2")
    C = gp.compose(G, A2, A1)
    return {"composite": _arrow_json(G, C)}, 0


def cmd_reduce(G, args):
    try:
        I = normalize_subset(G, args.orbit)
    except OshimaLabError as exc:
        raise UsageError(str(exc)) from None
    if args.arrow is not None:
        A = parse_arrow(G, args.arrow, "--arrow")
    else:
        rng = np.random.default_rng(args.seed)
        t = osh.t_I(G, I)
        A = gp.Arrow(gp.random_integer_sl(G.n, rng), osh.OshimaPoint(gp.random_integer_sl(G.n, rng), t))
    r = gp.orbit_reduction(G, A, I)
    label = lambda L: {"chart": L.chart, "n": L.n, "log_a": L.log_a}  # noqa: E731
    return {
        "orbit": subset_label(r.I),
        "I": list(r.I),
        "arrow": _arrow_json(G, A),
        "target_label": label(r.target_label),
        "source_label": label(r.source_label),
        "isotropy": r.isotropy,
    }, 0


def cmd_bmodel(G, args):
    if args.compose:
        if args.arrow1 is None or args.arrow2 is None:
            raise UsageError("bmodel --compose needs --arrow1 and --arrow2")
        B1 = parse_model_arrow(args.arrow1, "--arrow1")
        B2 = parse_model_arrow(args.arrow2, "--arrow2")
        C = bg.model_compose(B2, B1)
        return {"composite": {"m2": C.m2, "a": C.a, "m1": C.m1}}, 0
    if args.normal_derivative:
        if args.t0 is None or args.alpha is None:
            raise UsageError("bmodel --normal-derivative needs --t0 and --alpha")
        t0 = parse_vector(args.t0, G.roots.rank, what="--t0")
        alpha = parse_root(G, args.alpha)
        if t0[alpha] != 0.0:
            raise UsageError("t0 must vanish at the chosen simple root")
        x, kind = parse_word(G, args.word, t0)
        d = bg.normal_derivative(G, x, t0, alpha)
        out = {"t0": t0, "alpha": alpha, "word_kind": kind, "element": x, "derivative": d}
        if kind == "a":
            out["expected"] = float(bg.sl_weights(x)[alpha])
        else:
            out["expected"] = 1.0
        return out, 0
    raise UsageError("bmodel needs --compose or --normal-derivative")


def cmd_verify(args, tol):
    groups = tuple(args.group_list) if args.group_list else DEFAULT_GROUPS
    checks = None
    if args.checks:
        checks = [c.strip() for c in args.checks.split(",") if c.strip()]
        bad = [c for c in checks if c not in CHECKS_BY_ID]
        if bad:
            raise UsageError(f"unknown check ids: {', '.join(bad)}")
    report = verify_suite(groups, seed=args.seed, tol=tol, fault_inject=args.fault_inject, check_ids=checks)
    return report, 0 if report["pass"] else 1


COMMANDS = {
    "roots": cmd_roots,
    "parabolic": cmd_parabolic,
    "deform": cmd_deform,
    "fell-limit": cmd_fell_limit,
    "orbit": cmd_orbit,
    "sphere": cmd_sphere,
    "compose": cmd_compose,
    "reduce": cmd_reduce,
    "bmodel": cmd_bmodel,
}


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--group", dest="group_list", action="append", help="group name such as sl2r or sl3r")
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--tol-alg", type=float, default=None)
    common.add_argument("--tol-fact", type=float, default=None)
    common.add_argument("--json-indent", type=int, default=None)
    common.add_argument("--fault-inject", default=None, metavar="CHECK_ID")
    common.add_argument("--config", default=None, help="JSON file with the same keys (group, seed, tol_alg, ...)")

    parser = argparse.ArgumentParser(prog="oshimalab", description="Oshima space and groupoid experiments")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("roots", parents=[common], help="restricted roots")
    p = sub.add_parser("parabolic", parents=[common], help="standard parabolic data for a subset I")
    p.add_argument("--subset", default="", help="e.g. a1 or a1,a2; empty for I = {}")
    p = sub.add_parser("deform", parents=[common], help="h_t basis or a sampled net of H_t")
    p.add_argument("--t", required=True)
    p.add_argument("--emit", choices=("basis", "sample"), default="basis")
    p.add_argument("--R", type=float, default=fell.DEFAULT_R)
    p.add_argument("--eps", type=float, default=fell.DEFAULT_EPS)
    p = sub.add_parser("fell-limit", parents=[common], help="window distances along a path of parameters")
    p.add_argument("--path", required=True, help="e.g. 't=2^-n' or 't=(2^-n,1)'")
    p.add_argument("--steps", type=int, default=10)
    p.add_argument("--limit", default=None, help="limit parameter (default: components using n vanish)")
    p.add_argument("--R", type=float, default=fell.DEFAULT_R)
    p.add_argument("--eps", type=float, default=fell.DEFAULT_EPS)
    p.add_argument("--csv", default=None, help="also write the table as CSV")
    p = sub.add_parser("orbit", parents=[common], help="orbit data of [[g, t]]")
    p.add_argument("--t", required=True)
    p.add_argument("--g", default=None, help="matrix rows separated by ';'")
    p = sub.add_parser("sphere", parents=[common], help="SL(2,R) sphere model g.(it)")
    p.add_argument("--g", required=True)
    p.add_argument("--t", required=True)
    p = sub.add_parser("compose", parents=[common], help="compose two arrows given as JSON")
    p.add_argument("--arrow1", required=True)
    p.add_argument("--arrow2", required=True)
    p = sub.add_parser("reduce", parents=[common], help="orbit reduction of an arrow")
    p.add_argument("--orbit", required=True, help="subset I, e.g. a1 or {}")
    p.add_argument("--arrow", default=None, help="JSON arrow; a seeded random arrow over [[g, t_I]] if omitted")
    p = sub.add_parser("bmodel", parents=[common], help="model b-groupoid computations")
    mode = p.add_mutually_exclusive_group(required=True)
    mode.add_argument("--compose", action="store_true")
    mode.add_argument("--normal-derivative", action="store_true")
    p.add_argument("--arrow1", default=None)
    p.add_argument("--arrow2", default=None)
    p.add_argument("--word", default="e")
    p.add_argument("--t0", default=None)
    p.add_argument("--alpha", default=None, help="simple root, e.g. a1")
    p = sub.add_parser("verify", parents=[common], help="run the property-check suite")
    p.add_argument("--checks", default=None, help="comma separated check ids (default: all)")
    return parser


def _apply_config(args):
    cfg = {}
    if args.config:
        try:
            with open(args.config) as fh:
                cfg = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}") from None
        if not isinstance(cfg, dict):
            raise UsageError("config file must hold a JSON object")
        unknown = set(cfg) - set(CONFIG_KEYS)
        if unknown:
            raise UsageError(f"unknown config keys: {', '.join(sorted(unknown))}")
    if args.group_list is None and "group" in cfg:
        g = cfg["group"]
        args.group_list = [g] if isinstance(g, str) else list(g)
    defaults = {"seed": 42, "tol_alg": None, "tol_fact": None, "json_indent": 2, "fault_inject": None}
    for key, default in defaults.items():
        if getattr(args, key) is None:
            setattr(args, key, cfg.get(key, default))
    if args.fault_inject is not None:
        check = CHECKS_BY_ID.get(args.fault_inject)
        if check is None:
            raise UsageError(f"unknown check id {args.fault_inject!r}")
        if not check.fault_capable:
            raise UsageError(f"fault injection is not available for {args.fault_inject}")
    tol = Tolerances()
    if args.tol_alg is not None:
        tol = dataclasses.replace(tol, alg=float(args.tol_alg))
    if args.tol_fact is not None:
        tol = dataclasses.replace(tol, fact=float(args.tol_fact))
    return tol


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        tol = _apply_config(args)
        if args.command == "verify":
            for name in args.group_list or ():
                build_group(name, tol=tol)
            payload, code = cmd_verify(args, tol)
        else:
            groups = args.group_list or ["sl2r"]
            if len(groups) != 1:
                raise UsageError(f"{args.command} takes a single --group")
            G = build_group(groups[0], tol=tol)
            body, code = COMMANDS[args.command](G, args)
            payload = {"schema": SCHEMA, "command": args.command, "group": G.name, "seed": args.seed, **body}
    except (UsageError, ValueError) as exc:
        print(f"oshimalab {args.command}: {exc}", file=stderr)
        return 2
    except OshimaLabError as exc:
        if isinstance(exc, USAGE_ERRORS):
            print(f"oshimalab {args.command}: {exc}", file=stderr)
            return 2
        payload = {"schema": SCHEMA, "command": args.command, "ok": False, "error": f"{type(exc).__name__}: {exc}"}
        if getattr(exc, "distance", None) is not None:
            payload["distance"] = exc.distance
        code = 1
    indent = args.json_indent if args.json_indent is not None and args.json_indent >= 0 else None
    json.dump(to_json(payload), stdout, indent=indent)
    stdout.write("\n")
    return code


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()

"""Command-line front end.

Exit codes: 0 pass, 1 verification/property failure, 2 usage or input
error, 3 resource cap exceeded.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from importlib.metadata import PackageNotFoundError, version

from . import constructions as cons
from .cube import CapacityError, read_boolset
from .matrices import (
    eis_matrix,
    ene_decompose_bipartite,
    ene_decompose_general,
    ene_matrix,
    format_decomposition,
    format_matrix,
    parse_decomposition,
    verify_decomposition,
)
from .polytope import ParseError, read_ef, read_hpoly, write_ef, write_hpoly
from .project import DEFAULT_CAP, ef_image, is_contained, project_onto
from .suite import PROPERTIES, SuiteConfig, run_suite

SCHEMA = 1
EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_CAP = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _tool_version() -> str:
    try:
        return version("artifact")
    except PackageNotFoundError:
        return "0+unknown"


def _sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 16), b""):
            h.update(block)
    return h.hexdigest()


class Run:
    """Collects one RunReport."""

    def __init__(self, args):
        self.args = args
        self.inputs = {}
        self.parameters = {}
        self.metrics = {}
        self.result = None
        self.started = time.perf_counter()

    def input(self, path):
        if path is not None:
            self.inputs[str(path)] = _sha256(path)
        return path

    def report(self, outcome: str, error: str = None) -> dict:
        rep = {
            "schema": SCHEMA,
            "command": self.args.command,
            "inputs": self.inputs,
            "parameters": self.parameters,
            "outcome": outcome,
            "metrics": dict(self.metrics),
            "version": _tool_version(),
        }
        if self.result is not None:
            rep["result"] = self.result
        if error is not None:
            rep["error"] = error
        if getattr(self.args, "timing", False):
            rep["metrics"]["wall_time_s"] = round(time.perf_counter() - self.started, 6)
        return rep


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True)


def _counts(P) -> dict:
    return {"inequalities": P.n_inequalities, "equalities": P.n_equalities, "dimension": P.dim}


def cmd_construct(args, run: Run) -> int:
    kind = args.kind
    run.parameters["kind"] = kind
    needs_set = kind in ("hamming", "halfsquare")
    if needs_set and args.set is None:
        raise UsageError(f"--kind {kind} needs --set")
    if kind in ("qg", "rpg") and args.graph is None:
        raise UsageError(f"--kind {kind} needs --graph")
    if kind == "hamming":
        P = cons.hamming_separator(read_boolset(run.input(args.set)))
        write_hpoly(args.out, P)
        run.metrics.update(_counts(P))
    elif kind == "edge":
        if args.graph is not None:
            P = cons.edge_polytope_of_graph(cons.read_graph(run.input(args.graph)))
        elif args.set is not None:
            P = cons.edge_polytope(read_boolset(run.input(args.set)))
        else:
            raise UsageError("--kind edge needs --set or --graph")
        write_hpoly(args.out, P)
        run.metrics.update(_counts(P))
    elif kind == "halfsquare":
        ef = cons.halfsquare_separator(read_boolset(run.input(args.set)))
        write_ef(args.out, ef)
        run.metrics.update(_counts(ef.Q))
        run.metrics["lifted_dimension"] = ef.Q.dim
    elif kind == "qg":
        P = cons.pairwise_polytope(cons.read_graph(run.input(args.graph)))
        write_hpoly(args.out, P)
        run.metrics.update(_counts(P))
    else:
        P = cons.edge_hull_relaxation(cons.read_graph(run.input(args.graph)))
        write_hpoly(args.out, P)
        run.metrics.update(_counts(P))
    return EXIT_OK


def cmd_verify(args, run: Run) -> int:
    A = read_boolset(run.input(args.set))
    run.parameters.update(method=args.method, cross_check=args.cross_check, cap=args.cap)
    if args.ef is not None:
        ef = read_ef(run.input(args.ef))
        if args.method == "direct":
            raise UsageError("--method direct needs --poly")
        method = cons.Method.FM_ORACLE if args.method == "oracle" else None
        rep = cons.verify_separation_ef(ef, A, method, cap=args.cap, threads=args.threads)
        reports = [rep]
        if args.cross_check:
            other = cons.Method.FM_ORACLE if rep.method is cons.Method.CANONICAL_LIFT else cons.Method.CANONICAL_LIFT
            if other is cons.Method.CANONICAL_LIFT and ef.part is None:
                raise UsageError("--cross-check needs a formulation with a PART line")
            reports.append(cons.verify_separation_ef(ef, A, other, cap=args.cap, threads=args.threads))
    elif args.poly is not None:
        P = read_hpoly(run.input(args.poly))
        if args.method not in ("direct", None):
            raise UsageError(f"--method {args.method} needs --ef")
        reports = [cons.verify_separation_direct(P, A, threads=args.threads)]
    else:
        raise UsageError("verify needs --ef or --poly")
    agree = all(r.computed == reports[0].computed for r in reports)
    passed = agree and all(r.passed for r in reports)
    result = reports[0].to_json()
    if len(reports) > 1:
        result["cross_check"] = {"methods": [r.method.value for r in reports], "agree": agree}
    run.result = result
    run.metrics["mismatches"] = len(reports[0].mismatches)
    if not args.json:
        text = _dump(result)
        if args.report:
            with open(args.report, "w") as fh:
                fh.write(text + "\n")
        else:
            print(text)
    return EXIT_OK if passed else EXIT_FAIL


def cmd_project(args, run: Run) -> int:
    run.parameters["cap"] = args.cap
    if args.ef is not None:
        P = ef_image(read_ef(run.input(args.ef)), cap=args.cap)
    elif args.poly is not None:
        src = read_hpoly(run.input(args.poly))
        if args.coords is None:
            raise UsageError("--poly needs --coords")
        coords = [int(t) - 1 for t in args.coords.split(",") if t.strip()]
        run.parameters["coords"] = [c + 1 for c in coords]
        P = project_onto(src, coords, cap=args.cap)
    else:
        raise UsageError("project needs --poly or --ef")
    write_hpoly(args.out, P)
    run.metrics.update(_counts(P))
    return EXIT_OK


def cmd_check_contain(args, run: Run) -> int:
    P = read_hpoly(run.input(args.inner))
    Q = read_hpoly(run.input(args.outer))
    run.parameters["cap"] = args.cap
    contained = is_contained(P, Q, cap=args.cap)
    run.result = {"contained": contained}
    if not args.json:
        print(_dump(run.result))
    return EXIT_OK if contained else EXIT_FAIL


def cmd_matrix(args, run: Run) -> int:
    G = cons.read_graph(run.input(args.graph))
    run.parameters.update(kind=args.kind, format=args.format)
    M = ene_matrix(G) if args.kind == "ene" else eis_matrix(G, args.max_vertices)
    with open(args.out, "w") as fh:
        fh.write(format_matrix(M, args.format))
    run.metrics.update(rows=M.shape[0], cols=M.shape[1], ones=M.ones())
    return EXIT_OK


def _decompose(G, method: str):
    if method == "bipartite" or (method == "auto" and G.bipartition is not None):
        return ene_decompose_bipartite(G)
    return ene_decompose_general(G)


def cmd_decompose(args, run: Run) -> int:
    G = cons.read_graph(run.input(args.graph))
    run.parameters["method"] = args.method
    D = _decompose(G, args.method)
    with open(args.out, "w") as fh:
        fh.write(format_decomposition(D))
    run.metrics.update(rectangles=len(D), vertices=G.nv)
    return EXIT_OK


def cmd_verify_decomp(args, run: Run) -> int:
    G = cons.read_graph(run.input(args.graph))
    M = ene_matrix(G)
    with open(run.input(args.decomp)) as fh:
        D = parse_decomposition(fh.read(), M.shape)
    verdict = verify_decomposition(M, D)
    run.result = verdict.to_json()
    run.metrics["rectangles"] = len(D)
    if not args.json:
        print(_dump(run.result))
    return EXIT_OK if verdict.passed else EXIT_FAIL


def cmd_suite(args, run: Run) -> int:
    cfg = SuiteConfig(seed=args.seed, max_n=args.max_n, trials=args.trials, n=args.n, exhaustive=args.exhaustive)
    run.parameters.update(seed=cfg.seed, max_n=cfg.max_n, trials=cfg.trials, n=cfg.n,
                          exhaustive=cfg.exhaustive, only=args.only)
    try:
        results = run_suite(cfg, args.only)
    except KeyError as exc:
        raise UsageError(str(exc.args[0])) from None
    run.result = {"properties": [r.to_json() for r in results]}
    for r in results:
        run.metrics[f"{r.name}.checked"] = r.checked
    if not args.json:
        for r in results:
            print(f"{'PASS' if r.passed else 'FAIL'} {r.name} ({r.checked} checked)")
            for f in r.failures:
                print(f"    {f}")
    return EXIT_OK if all(r.passed for r in results) else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="print the run report as JSON on stdout")
    common.add_argument("--timing", action="store_true", help="add wall time to the run report")
    common.add_argument("--threads", type=int, default=1, help="verification threads (default 1)")

    capped = argparse.ArgumentParser(add_help=False)
    capped.add_argument("--cap", type=int, default=DEFAULT_CAP,
                        help=f"Fourier-Motzkin constraint cap (default {DEFAULT_CAP})")

    parser = argparse.ArgumentParser(prog="sepcube", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("construct", parents=[common], help="build a separating polytope or relaxation")
    p.add_argument("--kind", required=True, choices=["hamming", "edge", "halfsquare", "qg", "rpg"])
    p.add_argument("--set")
    p.add_argument("--graph")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("verify", parents=[common, capped], help="check P meets the cube exactly in A")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--ef")
    src.add_argument("--poly")
    p.add_argument("--set", required=True)
    p.add_argument("--method", choices=["lift", "oracle", "direct"])
    p.add_argument("--cross-check", action="store_true")
    p.add_argument("--report", help="write the separation report here instead of stdout")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("project", parents=[common, capped], help="Fourier-Motzkin projection")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--poly")
    src.add_argument("--ef", help="output the H-representation of the formulation's image")
    p.add_argument("--coords", help="comma-separated 1-based coordinates to keep")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_project)

    p = sub.add_parser("check-contain", parents=[common, capped], help="is INNER a subset of OUTER")
    p.add_argument("--inner", required=True)
    p.add_argument("--outer", required=True)
    p.set_defaults(func=cmd_check_contain)

    p = sub.add_parser("matrix", parents=[common], help="export ENE or EIS matrix")
    p.add_argument("--graph", required=True)
    p.add_argument("--kind", choices=["ene", "eis"], default="ene")
    p.add_argument("--format", choices=["dense", "sparse"], default="dense")
    p.add_argument("--max-vertices", type=int, default=20)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_matrix)

    p = sub.add_parser("decompose", parents=[common], help="rectangle partition of the ENE matrix")
    p.add_argument("--graph", required=True)
    p.add_argument("--method", choices=["auto", "bipartite", "general"], default="auto")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("verify-decomp", parents=[common], help="check a rectangle partition")
    p.add_argument("--graph", required=True)
    p.add_argument("--decomp", required=True)
    p.set_defaults(func=cmd_verify_decomp)

    p = sub.add_parser("suite", parents=[common], help="run the seeded property suite")
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--max-n", type=int, default=8)
    p.add_argument("--trials", type=int, default=20, help="random cases per dimension")
    p.add_argument("--n", type=int, help="restrict to a single dimension")
    p.add_argument("--only", action="append", metavar="NAME",
                   help=f"run only this property (repeatable): {', '.join(PROPERTIES)}")
    p.add_argument("--exhaustive", action="store_true",
                   help="odd-halfspace: only the exhaustive integer grid")
    p.set_defaults(func=cmd_suite)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    run = Run(args)
    code, error = EXIT_OK, None
    try:
        code = args.func(args, run)
    except CapacityError as exc:
        code, error = EXIT_CAP, str(exc)
    except (UsageError, ParseError, ValueError, KeyError, OSError) as exc:
        code, error = EXIT_USAGE, str(exc)
    outcome = {EXIT_OK: "pass", EXIT_FAIL: "fail"}.get(code, "error")
    if args.json:
        print(_dump(run.report(outcome, error)))
    elif error is not None:
        print(f"sepcube {args.command}: error: {error}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())

"""Command-line entry point.

Subcommands cover the graph codec (parse-graph), Perron-Frobenius data (pf),
Jones-Wenzl projections (jw), the 2D2 relation suite (2d2 generator, 2d2
verify, 2d2 lambda-independence, 2d2 automorphism), and the 4442 connection
solve (4442 solve-connection).  Every run writes one JSON report; identical
(command, seed, precision) inputs produce byte-identical reports.  Exit codes:
0 all checks pass, 1 a check failed, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys as _sys
from dataclasses import dataclass

import gmpy2

from . import bigraph, conn4442, scalars
from .report import Report


@dataclass
class RunConfig:
    """Validated global options of one CLI invocation."""

    precision: int
    tol: gmpy2.mpfr
    seed: int
    lam: gmpy2.mpc
    starts: int
    jobs: int
    out: str | None

    def echo(self) -> dict:
        return {
            "precision": self.precision,
            "tol": scalars.decimal_str(self.tol, 3),
            "seed": self.seed,
            "lambda": {
                "re": scalars.decimal_str(scalars.re_part(self.lam), 20),
                "im": scalars.decimal_str(scalars.im_part(self.lam), 20),
            },
            "starts": self.starts,
            "jobs": self.jobs,
        }


class UsageError(ValueError):
    """Bad flag combination; maps to exit code 2."""


def _parse_lambda(text: str) -> tuple[float, float]:
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError("--lambda expects 're,im'")
    try:
        return float(parts[0]), float(parts[1])
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gpalab",
        description="planar algebra verification workbench",
    )
    parser.add_argument("--precision", type=int, default=None,
                        help="working precision in decimal digits (>= 30)")
    parser.add_argument("--tol", type=float, default=None,
                        help="check tolerance override")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--lambda", dest="lam", type=_parse_lambda,
                        default=(1.0, 0.0), metavar="RE,IM",
                        help="unit-circle generator parameter")
    parser.add_argument("--starts", type=int, default=500)
    parser.add_argument("--jobs", type=int, default=1,
                        help="worker count hint (computations run serially)")
    parser.add_argument("--out", default=None,
                        help="report path (default: stdout)")

    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("parse-graph", help="round-trip the graph codec")
    p.add_argument("code")

    p = sub.add_parser("pf", help="Perron-Frobenius norm and weights")
    p.add_argument("code", nargs="?", default=bigraph.TWOD2_CODE)

    p = sub.add_parser("jw", help="Jones-Wenzl projection checks")
    p.add_argument("code", nargs="?", default=bigraph.TWOD2_CODE)
    p.add_argument("--n", type=int, default=4)

    p = sub.add_parser("2d2", help="the 2D2 relation suite")
    p.add_argument("action", choices=[
        "generator", "verify", "lambda-independence", "automorphism",
    ])

    p = sub.add_parser("4442", help="the 4442 connection solve")
    p.add_argument("action", choices=["solve-connection"])
    return parser


def make_config(args: argparse.Namespace) -> RunConfig:
    precision = args.precision
    if precision is None:
        precision = scalars.default_precision_from_env()
    if precision < 30:
        raise UsageError("--precision must be at least 30 digits")
    scalars.set_precision(precision)
    floor = gmpy2.mpfr(10) ** (-precision + 10)
    tol = gmpy2.mpfr(repr(args.tol)) if args.tol is not None else floor
    if tol < floor:
        raise UsageError("--tol must be at least 10^(-precision+10)")
    lam = scalars.comp(gmpy2.mpfr(repr(args.lam[0])), gmpy2.mpfr(repr(args.lam[1])))
    if abs(scalars.modulus(lam) - 1) > gmpy2.mpfr("1e-12"):
        raise UsageError("--lambda must lie on the unit circle")
    if args.starts < 1:
        raise UsageError("--starts must be positive")
    return RunConfig(
        precision=precision,
        tol=tol,
        seed=args.seed,
        lam=lam,
        starts=args.starts,
        jobs=max(1, args.jobs),
        out=args.out,
    )


def _cmd_parse_graph(args, config: RunConfig) -> Report:
    rep = Report("parse-graph")
    graph = bigraph.parse_bigraph(args.code)
    rep.expect_true(
        "round-trip",
        "parse then encode reproduces the input code byte for byte",
        bigraph.encode_bigraph(graph) == args.code,
    )
    rep.note_correction(
        "structure",
        "vertex count, edge count, and depth sizes of the parsed graph",
        f"{graph.num_vertices} vertices, {len(graph.edges)} edges, "
        f"depths {list(graph.depth_sizes)}",
    )
    return rep


def _cmd_pf(args, config: RunConfig) -> Report:
    rep = Report("pf")
    graph = bigraph.parse_bigraph(args.code)
    pf = bigraph.perron_frobenius(graph)
    rep.expect_true(
        "positive-weights",
        "the eigenvector weights are strictly positive with weight 1 at "
        "the root",
        all(pf.weight(v) > 0 for v in range(graph.num_vertices))
        and abs(pf.weight(0) - 1) < config.tol,
    )
    residual = max(
        abs(sum(pf.weight(u) for u in graph.neighbors[v]) - pf.norm * pf.weight(v))
        for v in range(graph.num_vertices)
    )
    rep.check(
        "eigen-equation",
        "the weights satisfy the adjacency eigenvalue equation at the norm",
        residual,
        config.tol,
    )
    rep.note_correction(
        "norm-squared",
        "squared graph norm",
        scalars.decimal_str(pf.norm ** 2, 30),
    )
    return rep


def _cmd_jw(args, config: RunConfig) -> Report:
    from . import gpa

    rep = Report("jw")
    graph = bigraph.parse_bigraph(args.code)
    n = args.n
    if n < 1:
        raise UsageError("--n must be at least 1")
    f = gpa.jones_wenzl(n, graph, 0)
    rep.check(
        "idempotent", "the projection squares to itself",
        (f * f - f).norm(), config.tol,
    )
    rep.check(
        "self-adjoint", "the projection is self-adjoint",
        (f.adjoint() - f).norm(), config.tol,
    )
    same_side = [pos for pos in range(1, 2 * n + 1) if pos not in (n, 2 * n)]
    cap_norm = max(
        (gpa.cap(f, pos).norm() for pos in same_side), default=gmpy2.mpfr(0)
    )
    rep.check(
        "uncappable",
        "every capping of two adjacent same-side strings vanishes",
        cap_norm, config.tol,
    )
    ctx = scalars.default_quantum_context()
    rep.check(
        "trace", "the trace equals the quantum integer of n + 1",
        abs(f.trace() - ctx.quantum_integer(n + 1)), config.tol,
    )
    return rep


def _cmd_2d2(args, config: RunConfig) -> Report:
    from . import generator as gen_mod
    from . import twod2

    if args.action == "generator":
        rep = Report("2d2-generator")
        gen = gen_mod.generator_element(config.lam)
        residuals = gen_mod.check_generator(gen)
        tight = gmpy2.mpfr(10) ** -40
        loose = gmpy2.mpfr(10) ** -30
        tols = {"table": loose}
        statements = {
            "self_adjoint": "the generator is self-adjoint",
            "rotation": "the two-click rotation fixes the generator",
            "cappings": "every single-string capping vanishes",
            "square": "the generator squares to the 3-box Jones-Wenzl",
            "rotated_square": "the one-click rotation squares to the odd "
                              "3-box Jones-Wenzl",
            "check_self_adjoint": "the one-click rotation is self-adjoint",
            "table": "the diamond coefficient table reproduces all 24 values",
            "tl_overlap": "the generator is orthogonal to Temperley-Lieb",
        }
        for key, value in residuals.items():
            rep.check(key, statements.get(key, key), value,
                      tols.get(key, tight))
        return rep
    if args.action == "verify":
        sys_ = twod2.build_relation_system(lam=config.lam)
        return twod2.run_full_suite(sys_)
    if args.action == "lambda-independence":
        return twod2.verify_lambda_independence()
    if args.action == "automorphism":
        sys_ = twod2.build_relation_system(lam=config.lam)
        return twod2.verify_automorphism(sys_)
    raise UsageError(f"unknown 2d2 action {args.action!r}")


def _cmd_4442(args, config: RunConfig) -> tuple[Report, dict]:
    result = conn4442.solve_phases(seed=config.seed, num_starts=config.starts)
    try:
        rep = conn4442.verify_solutions(result)
    except conn4442.ClassificationError:
        rep = Report("conn4442")
        rep.expect_true(
            "classification",
            "the solution set matches the two-cluster classification",
            False,
        )
    solutions = []
    for sol, resid in zip(result.solutions, result.residuals):
        phases = {}
        for name, value in zip(conn4442.PHASE_NAMES, sol.as_tuple()):
            phases[name] = {
                "re": scalars.decimal_str(scalars.re_part(value), 30),
                "im": scalars.decimal_str(scalars.im_part(value), 30),
            }
        solutions.append({
            "phases": phases,
            "residual": scalars.decimal_str(resid, 3),
        })
    return rep, {"solutions": solutions}


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        config = make_config(args)
    except UsageError as exc:
        print(f"gpalab: {exc}", file=_sys.stderr)
        return 2

    extra: dict = {}
    try:
        if args.command == "parse-graph":
            rep = _cmd_parse_graph(args, config)
        elif args.command == "pf":
            rep = _cmd_pf(args, config)
        elif args.command == "jw":
            rep = _cmd_jw(args, config)
        elif args.command == "2d2":
            rep = _cmd_2d2(args, config)
        elif args.command == "4442":
            rep, extra = _cmd_4442(args, config)
        else:
            print(f"gpalab: unknown command {args.command!r}", file=_sys.stderr)
            return 2
    except UsageError as exc:
        print(f"gpalab: {exc}", file=_sys.stderr)
        return 2
    except (bigraph.CodecError, bigraph.DualsError, ValueError) as exc:
        print(f"gpalab: {exc}", file=_sys.stderr)
        return 2
    except conn4442.SearchFailure as exc:
        print(f"gpalab: {exc}", file=_sys.stderr)
        return 1

    doc = {
        "tool": "gpalab",
        "version": __import__("gpalab").__version__,
        "command": args.command,
        "config": config.echo(),
        "report": rep.to_json_dict(),
    }
    doc.update(extra)
    text = json.dumps(doc, sort_keys=True, indent=2) + "\n"
    if config.out:
        with open(config.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        _sys.stdout.write(text)
    return 0 if rep.passed else 1


def main() -> None:
    raise SystemExit(run())


if __name__ == "__main__":
    main()

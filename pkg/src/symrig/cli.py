"""Command-line interface.

Commands: validate, analyze, flex-detect, trace, example.  Exit codes:
0 success, 1 usage or parse error, 2 validation failure, 3 inconclusive
verdict (flex-detect) or an unverified trace request.  ``--json`` switches
any command to a canonical machine-readable report that contains every
number shown in the text output.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import __version__
from .blocks import (
    BrokenSymmetryError,
    block_diagonalize,
    fully_symmetric_flexes,
    fully_symmetric_self_stresses,
    maxwell_counts,
    restricted_rank,
)
from .catalog import builtin_example, example_names
from .certify import (
    VERDICT_FINITE_FLEX,
    VERDICT_INCONCLUSIVE,
    DecisionPolicy,
    finite_flex_decision,
    subrep_flex_decision,
)
from .documents import (
    DocumentError,
    build_framework,
    canonical_json,
    load_document,
    render_document,
    save_document,
    validate_document,
)
from .frameworks import FrameworkError, infinitesimal_rigidity_test
from .groups import GroupError
from .irreps import character_table
from .tracing import TraceError, path_validate, trace_flex

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INVALID = 2
EXIT_INCONCLUSIVE = 3


def _num(x) -> str:
    """Uniform number rendering: the same token appears in JSON reports."""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage errors exit 1, not argparse's 2
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="symrig", description=__doc__)
    parser.add_argument("--version", action="version", version=f"symrig {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_validate = sub.add_parser("validate", help="check a framework document")
    p_validate.add_argument("file")
    p_validate.add_argument("--json", action="store_true")

    p_analyze = sub.add_parser("analyze", help="ranks, block sizes, Maxwell table")
    p_analyze.add_argument("file")
    p_analyze.add_argument("--json", action="store_true")

    p_detect = sub.add_parser("flex-detect", help="finite-flex certificate")
    p_detect.add_argument("file")
    p_detect.add_argument("--irrep", default=None, help="character name, e.g. A2 (default: trivial)")
    p_detect.add_argument("--trials", type=int, default=None)
    p_detect.add_argument("--radius", type=float, default=None)
    p_detect.add_argument("--seed", type=int, default=None)
    p_detect.add_argument("--json", action="store_true")

    p_trace = sub.add_parser("trace", help="trace the symmetry-preserving flex")
    p_trace.add_argument("file")
    p_trace.add_argument("--steps", type=int, required=True)
    p_trace.add_argument("--step-size", type=float, required=True)
    p_trace.add_argument("--out", default=None, help="frames file (.json or .csv)")
    p_trace.add_argument("--allow-unverified", action="store_true")
    p_trace.add_argument("--seed", type=int, default=None)
    p_trace.add_argument("--json", action="store_true")

    p_example = sub.add_parser("example", help="emit a built-in example document")
    p_example.add_argument("name", help=f"one of: {', '.join(example_names())}")
    p_example.add_argument("--seed", type=int, default=None)
    p_example.add_argument("--n", type=int, default=None, help="size for double-suspension")
    p_example.add_argument("--out", default=None)

    return parser


def _policy_from(options, args) -> DecisionPolicy:
    return DecisionPolicy(
        trials=args_get(args, "trials") or options.trials or 32,
        radius=args_get(args, "radius") if args_get(args, "radius") is not None else options.radius,
        seed=args_get(args, "seed") if args_get(args, "seed") is not None else (options.seed or 0),
        rank_tol=options.tolerance,
        assume_generic=options.assume_generic,
    )


def args_get(args, name):
    return getattr(args, name, None)


# ---------------------------------------------------------------------------
# report assembly
# ---------------------------------------------------------------------------


def _emit(report: dict, lines: list[str], as_json: bool) -> None:
    if as_json:
        print(canonical_json(report))
    else:
        for line in lines:
            print(line)


def _cmd_validate(args) -> int:
    doc = load_document(args.file)
    report = validate_document(doc)
    lines = [
        f"file: {args.file}",
        f"dimension: {_num(report['dimension'])}  vertices: {_num(report['vertex_count'])}"
        f"  edges: {_num(report['edge_count'])}",
        f"group: {report['group_kind']} of order {_num(report['group_order'])}",
        f"max symmetry residual: {_num(report['max_residual'])}"
        f" (tolerance {_num(report['tolerance'])})",
        f"valid: {_num(report['valid'])}",
    ]
    for item in report["automorphism_failures"]:
        lines.append(f"  not an automorphism under {item['element']}: edge {item['edge']}")
    if report["coincident_edges"]:
        lines.append(f"  coincident bars at edges {report['coincident_edges']}")
    _emit(report, lines, args.json)
    return EXIT_OK if report["valid"] else EXIT_INVALID


def _cmd_analyze(args) -> int:
    doc = load_document(args.file)
    validation = validate_document(doc)
    if not validation["valid"]:
        print("document failed validation; run `symrig validate` for details", file=sys.stderr)
        return EXIT_INVALID
    built = build_framework(doc)
    fw, phi = built.framework, built.phi
    tol = built.options.tolerance

    rigidity = infinitesimal_rigidity_test(fw, tol)
    dec = block_diagonalize(fw, phi)
    counts = maxwell_counts(fw, phi)
    block_ranks = dec.block_ranks(tol)
    flexes = fully_symmetric_flexes(fw, phi, tol)
    stresses = fully_symmetric_self_stresses(fw, phi, tol)
    r_graph = restricted_rank(fw, phi, "graph", tol)
    r_complete = restricted_rank(fw, phi, "complete", tol)

    irreps = []
    for row, shape, rank in zip(counts.rows, dec.block_shapes, block_ranks):
        irreps.append(
            {
                **row.to_dict(),
                "block_shape": list(shape),
                "block_rank": rank.rank,
                "block_nullity": rank.nullity,
            }
        )
    report = {
        "file": args.file,
        "dimension": doc.dimension,
        "vertex_count": doc.vertex_count,
        "edge_count": len(doc.edges),
        "group": {"kind": doc.group_kind, "order": built.group.order},
        "validation": {
            "max_residual": validation["max_residual"],
            "tolerance": validation["tolerance"],
        },
        "rigidity": rigidity.to_dict(),
        "off_block_residual": dec.off_block_residual,
        "block_shapes": [list(s) for s in dec.block_shapes],
        "irreps": irreps,
        "full_span": counts.full_span,
        "fully_symmetric": {
            "flex_count": int(flexes.shape[1]),
            "self_stress_count": int(stresses.shape[1]),
        },
        "restricted_rank": {"graph": r_graph.rank, "complete": r_complete.rank},
    }
    verdict = "infinitesimally rigid" if rigidity.rigid else "infinitesimally flexible"
    lines = [
        f"file: {args.file}",
        f"dimension: {_num(doc.dimension)}  vertices: {_num(doc.vertex_count)}"
        f"  edges: {_num(len(doc.edges))}",
        f"group: {doc.group_kind} of order {_num(built.group.order)}",
        f"rigidity rank: {_num(rigidity.report.rank)} of {_num(rigidity.required_rank)}"
        f" required, nullity {_num(rigidity.report.nullity)} ({verdict})",
        f"off-block residual: {_num(dec.off_block_residual)}",
        "irrep  bars  joints  rigid  slack  block  rank",
    ]
    for item in irreps:
        shape = f"{item['block_shape'][0]}x{item['block_shape'][1]}"
        lines.append(
            f"{item['irrep']:>5}  {_num(item['dim_internal']):>4}  {_num(item['dim_external']):>6}"
            f"  {_num(item['dim_rigid']):>5}  {_num(item['slack']):>5}  {shape:>5}"
            f"  {_num(item['block_rank']):>4}"
        )
    lines += [
        f"fully symmetric flexes: {_num(report['fully_symmetric']['flex_count'])}"
        f"  self-stresses: {_num(report['fully_symmetric']['self_stress_count'])}",
        f"restricted rank: graph {_num(r_graph.rank)}  complete {_num(r_complete.rank)}",
    ]
    _emit(report, lines, args.json)
    return EXIT_OK


def _cmd_flex_detect(args) -> int:
    doc = load_document(args.file)
    validation = validate_document(doc)
    if not validation["valid"]:
        print("document failed validation; run `symrig validate` for details", file=sys.stderr)
        return EXIT_INVALID
    built = build_framework(doc)
    policy = _policy_from(built.options, args)
    irrep_index = 0
    if args.irrep is not None:
        table = character_table(built.group)
        names = list(table.names)
        if args.irrep not in names:
            print(
                f"unknown irrep {args.irrep!r} for {built.group.kind}; choices: {names}",
                file=sys.stderr,
            )
            return EXIT_USAGE
        irrep_index = names.index(args.irrep)
    cert = subrep_flex_decision(built.framework, built.phi, irrep_index, policy)
    report = cert.to_dict()
    report["file"] = args.file
    lines = [
        f"file: {args.file}",
        f"irrep: {cert.irrep_name}",
        f"verdict: {cert.verdict}",
        f"rule: {cert.rule or 'none'}",
        f"restricted rank: graph {_num(cert.rank_graph)}  complete {_num(cert.rank_complete)}",
        f"regularity: graph {cert.regularity_graph.route}"
        f" (passed {_num(cert.regularity_graph.passed)},"
        f" max sampled rank {_num(cert.regularity_graph.max_sampled_rank)},"
        f" trials {_num(cert.regularity_graph.trials)}),"
        f" complete {cert.regularity_complete.route}"
        f" (passed {_num(cert.regularity_complete.passed)})",
        f"fully symmetric flexes: {_num(cert.flex_count)}"
        f"  self-stresses: {_num(cert.self_stress_count)}",
        f"spanning: {_num(cert.spanning)}  seed: {_num(cert.seed)}",
    ]
    _emit(report, lines, args.json)
    return EXIT_INCONCLUSIVE if cert.verdict == VERDICT_INCONCLUSIVE else EXIT_OK


def _write_frames(path: str, frames) -> None:
    if path.endswith(".json"):
        payload = {"frames": [[list(map(float, row)) for row in f.coords] for f in frames]}
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(canonical_json(payload) + "\n")
    elif path.endswith(".csv"):
        n, d = frames[0].coords.shape
        header = ["frame"] + [f"v{i + 1}_{ax}" for i in range(n) for ax in "xyz"[:d]]
        rows = [",".join(header)]
        for k, f in enumerate(frames):
            rows.append(",".join([str(k)] + [format(x, ".17g") for x in f.flatten()]))
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("\n".join(rows) + "\n")
    else:
        raise DocumentError(f"frame file must end in .json or .csv: {path!r}")


def _cmd_trace(args) -> int:
    doc = load_document(args.file)
    validation = validate_document(doc)
    if not validation["valid"]:
        print("document failed validation; run `symrig validate` for details", file=sys.stderr)
        return EXIT_INVALID
    built = build_framework(doc)
    policy = _policy_from(built.options, args)
    cert = finite_flex_decision(built.framework, built.phi, policy)
    if cert.verdict != VERDICT_FINITE_FLEX and not args.allow_unverified:
        print(
            f"not tracing: finite-flex verdict is {cert.verdict!r}"
            " (use --allow-unverified to trace anyway)",
            file=sys.stderr,
        )
        return EXIT_INCONCLUSIVE
    path = trace_flex(
        built.framework,
        built.phi,
        args.steps,
        args.step_size,
        certificate=cert,
        allow_unverified=args.allow_unverified,
        rank_tol=built.options.tolerance,
    )
    check = path_validate(path, built.framework, built.phi)
    report = {
        "file": args.file,
        "steps": args.steps,
        "step_size": args.step_size,
        "frames": len(path.frames),
        "certificate": cert.to_dict(),
        "path": check.to_dict(),
        "singular_frames": list(path.singular_frames),
        "flags": list(path.flags),
    }
    lines = [
        f"file: {args.file}",
        f"frames: {_num(len(path.frames))} (steps {_num(args.steps)},"
        f" step size {_num(args.step_size)})",
        f"max edge drift: {_num(check.max_edge_drift)}"
        f" (squared {_num(check.max_edge_drift_sq)})",
        f"max symmetry residual: {_num(check.max_symmetry_residual)}",
        f"witness: {check.witness or 'none'} change {_num(check.witness_change)}",
        f"singular frames: {list(path.singular_frames)}",
        f"flags: {list(path.flags) or 'none'}",
    ]
    if args.out:
        _write_frames(args.out, path.frames)
        report["out"] = args.out
        lines.append(f"frames written to {args.out}")
    _emit(report, lines, args.json)
    return EXIT_OK


def _cmd_example(args) -> int:
    doc = builtin_example(args.name, seed=args.seed, n=args.n)
    text = render_document(doc)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
        print(f"example {args.name} written to {args.out}")
    else:
        sys.stdout.write(text)
    return EXIT_OK


_COMMANDS = {
    "validate": _cmd_validate,
    "analyze": _cmd_analyze,
    "flex-detect": _cmd_flex_detect,
    "trace": _cmd_trace,
    "example": _cmd_example,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _COMMANDS[args.command](args)
    except FileNotFoundError as exc:
        print(f"cannot read file: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DocumentError as exc:
        print(f"document error: {exc}", file=sys.stderr)
        return EXIT_USAGE if exc.syntactic else EXIT_INVALID
    except BrokenSymmetryError as exc:
        print(f"symmetry error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (GroupError, FrameworkError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except TraceError as exc:
        print(f"trace error: {exc}", file=sys.stderr)
        return EXIT_INCONCLUSIVE


def entrypoint() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    entrypoint()

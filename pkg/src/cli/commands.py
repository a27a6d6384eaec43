"""
Subcommands: analyze, simulate, worst-case, matroid, verify and config.

Each command takes the parsed arguments and the effective configuration,
writes its result to stdout or to a file, and returns an exit code. Library
errors propagate to the caller, which maps them to exit codes.
"""

import argparse
import json
import logging
import sys
from dataclasses import asdict
from pathlib import Path
from typing import Any

from core.config import AppConfig, parse_seed
from core.exceptions import SizeGuardError, UsageError
from core.instance_io import (
    dump_instance,
    dump_matroid_instance,
    load_instance,
    load_matroid_instance,
)
from core.matroid import MatroidInstance
from core.report import analyze, analyze_matroid, simulate
from core.tight import sweep, tight_rate_vector, write_sweep_csv
from core.verification import SUITES, VerifyOptions, run_suites
from utils.helpers import counterexample_filename, parse_float_list

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VERIFICATION_FAILED = 1
EXIT_USAGE = 2
EXIT_INVALID_INSTANCE = 3
EXIT_SIZE_GUARD = 4


class JsonErrorParser(argparse.ArgumentParser):
    """ArgumentParser that raises instead of printing usage and exiting."""

    def error(self, message: str):
        raise UsageError(f"{self.prog}: {message}")


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return value


def _seed(text: str) -> int:
    try:
        return parse_seed(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e)) from None


def _scale_list(text: str) -> list[float]:
    try:
        values = parse_float_list(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e)) from None
    if any(value <= 1 for value in values):
        raise argparse.ArgumentTypeError("every scale must exceed 1")
    return values


# ============================================================================
# Output
# ============================================================================


def _json_text(data: Any) -> str:
    return json.dumps(data, indent=2) + "\n"


def _emit(text: str, output: Path | None) -> None:
    if output is None:
        sys.stdout.write(text)
        sys.stdout.flush()
    else:
        output.write_text(text, encoding="utf-8")
        logger.info(f"Wrote {output}")


def resolve_seed(args: argparse.Namespace, config: AppConfig) -> int:
    """Seed flag, then BONDSPAN_SEED, then the configured seed."""
    if getattr(args, "seed", None) is not None:
        return args.seed
    try:
        return config.from_environment().seed
    except ValueError as e:
        raise UsageError(str(e)) from e


def _workers(args: argparse.Namespace, config: AppConfig) -> int:
    return args.workers if getattr(args, "workers", None) else config.workers


# ============================================================================
# Commands
# ============================================================================


def cmd_analyze(args: argparse.Namespace, config: AppConfig) -> int:
    """b, E[OPT], exact and/or Monte Carlo E[SAM], alpha and per-instance checks."""
    inst = load_instance(args.input)
    exact = args.exact or args.mc_samples is None
    report = analyze(
        inst,
        exact=exact,
        mc_samples=args.mc_samples,
        seed=resolve_seed(args, config),
        edge_limit=config.exact_edge_limit,
        vertex_limit=config.bond_vertex_limit,
        atom_limit=config.joint_atom_limit,
        chunk_size=config.mc_chunk_size,
        workers=_workers(args, config),
    )
    _emit(_json_text(report.to_dict()), args.output)
    return EXIT_OK


def cmd_simulate(args: argparse.Namespace, config: AppConfig) -> int:
    """Monte Carlo E[SAM] with exact companions where they exist."""
    inst = load_instance(args.input)
    report = simulate(
        inst,
        mc_samples=args.mc_samples or config.mc_samples,
        seed=resolve_seed(args, config),
        edge_limit=config.exact_edge_limit,
        atom_limit=config.joint_atom_limit,
        chunk_size=config.mc_chunk_size,
        workers=_workers(args, config),
    )
    _emit(_json_text(report.to_dict()), args.output)
    return EXIT_OK


def cmd_worst_case(args: argparse.Namespace, config: AppConfig) -> int:
    """Sweep the tight construction over the given scales."""
    inst = load_instance(args.input)
    graph = inst.graph.with_name(inst.name or args.input.stem)
    rows = sweep(
        graph,
        args.scale_list,
        edge_limit=config.exact_edge_limit,
        vertex_limit=config.bond_vertex_limit,
    )
    construction = tight_rate_vector(graph, rows[-1].scale, config.bond_vertex_limit)
    summary = {
        "graph": graph.name,
        "b": rows[0].b,
        "bond_witness": sorted(construction.bond_witness),
        "peak_edge": construction.peak_edge,
        "contraction_order": list(construction.contraction_order),
        "rows": [{"M": row.scale, "alpha": row.alpha} for row in rows],
    }
    # stdout carries only the CSV in this mode
    logger.info(
        f"Worst case {graph.name}: b={summary['b']} witness={summary['bond_witness']} "
        f"peak={summary['peak_edge']} order={summary['contraction_order']}"
    )

    if args.csv == "-":
        write_sweep_csv(rows, sys.stdout)
        return EXIT_OK
    if args.csv is not None:
        with open(args.csv, "w", encoding="utf-8", newline="") as f:
            write_sweep_csv(rows, f)
        logger.info(f"Wrote {args.csv}")
    _emit(_json_text(summary), None)
    return EXIT_OK


def cmd_matroid(args: argparse.Namespace, config: AppConfig) -> int:
    """Exact analysis of a matroid instance file."""
    inst = load_matroid_instance(args.input)
    report = analyze_matroid(inst)
    _emit(_json_text(report.to_dict()), args.output)
    return EXIT_OK


def cmd_verify(args: argparse.Namespace, config: AppConfig) -> int:
    """Run verification suites; on failure write the first counterexample."""
    if args.max_edges > config.enumeration_edge_limit:
        raise SizeGuardError(
            f"--max-edges {args.max_edges} exceeds the enumeration limit of "
            f"{config.enumeration_edge_limit}"
        )
    options = VerifyOptions(
        max_edges=args.max_edges,
        max_vertices=args.max_vertices,
        trials=args.trials,
        seed=resolve_seed(args, config),
        mc_samples=args.mc_samples,
    )
    results = run_suites([args.suite], options)
    summary: dict[str, Any] = {
        "passed": all(result.passed for result in results),
        "suites": [result.to_dict() for result in results],
    }

    failing = next((result for result in results if not result.passed), None)
    if failing is not None:
        check = failing.first_failure()
        path = args.counterexample or Path(counterexample_filename(failing.suite))
        if isinstance(check.counterexample, MatroidInstance):
            dump_matroid_instance(check.counterexample, path)
        else:
            dump_instance(check.counterexample, path)
        summary["counterexample"] = {
            "suite": failing.suite,
            "check": check.name,
            "detail": check.detail,
            "path": str(path),
        }
        logger.error(f"Check {failing.suite}/{check.name} failed; counterexample in {path}")

    _emit(_json_text(summary), None)
    return EXIT_OK if summary["passed"] else EXIT_VERIFICATION_FAILED


def cmd_config(args: argparse.Namespace, config: AppConfig) -> int:
    """Print the effective configuration; with --write also save it."""
    effective = config.from_environment()
    if args.write:
        path = args.config or AppConfig.get_default_config_path()
        if not effective.save(path):
            raise UsageError(f"could not write configuration to {path}")
        logger.info(f"Saved configuration to {path}")
    _emit(_json_text(asdict(effective)), None)
    return EXIT_OK


# ============================================================================
# Parser
# ============================================================================


def build_parser() -> argparse.ArgumentParser:
    parser = JsonErrorParser(
        prog="bondspan",
        description="Single-sample stochastic spanning trees: analysis, sweeps and checks.",
    )
    parser.add_argument("--verbose", action="store_true", help="Also log to stderr")
    parser.add_argument("--config", type=Path, default=None, help="Configuration file")
    commands = parser.add_subparsers(dest="command", required=True)

    analyze_parser = commands.add_parser("analyze", help="Analyze a graph instance")
    analyze_parser.add_argument("input", type=Path)
    analyze_parser.add_argument("--exact", action="store_true", help="Exact E[SAM]")
    analyze_parser.add_argument("--mc-samples", type=_positive_int, default=None)
    analyze_parser.add_argument("--seed", type=_seed, default=None)
    analyze_parser.add_argument("--workers", type=_positive_int, default=None)
    analyze_parser.add_argument("--output", type=Path, default=None)
    analyze_parser.set_defaults(handler=cmd_analyze)

    simulate_parser = commands.add_parser("simulate", help="Monte Carlo E[SAM] of an instance")
    simulate_parser.add_argument("input", type=Path)
    simulate_parser.add_argument("--mc-samples", type=_positive_int, default=None)
    simulate_parser.add_argument("--seed", type=_seed, default=None)
    simulate_parser.add_argument("--workers", type=_positive_int, default=None)
    simulate_parser.add_argument("--output", type=Path, default=None)
    simulate_parser.set_defaults(handler=cmd_simulate)

    worst_parser = commands.add_parser("worst-case", help="Sweep the tight rate construction")
    worst_parser.add_argument("input", type=Path)
    worst_parser.add_argument("--scale-list", type=_scale_list, required=True)
    worst_parser.add_argument("--csv", default=None, help="CSV path, or '-' for stdout")
    worst_parser.set_defaults(handler=cmd_worst_case)

    matroid_parser = commands.add_parser("matroid", help="Analyze a matroid instance")
    matroid_parser.add_argument("input", type=Path)
    matroid_parser.add_argument("--output", type=Path, default=None)
    matroid_parser.set_defaults(handler=cmd_matroid)

    verify_parser = commands.add_parser("verify", help="Run verification suites")
    verify_parser.add_argument("--suite", choices=[*SUITES, "all"], default="all")
    verify_parser.add_argument("--max-edges", type=_positive_int, default=6)
    verify_parser.add_argument("--max-vertices", type=_positive_int, default=5)
    verify_parser.add_argument("--trials", type=_positive_int, default=100)
    verify_parser.add_argument("--mc-samples", type=_positive_int, default=2000)
    verify_parser.add_argument("--seed", type=_seed, default=None)
    verify_parser.add_argument("--counterexample", type=Path, default=None)
    verify_parser.set_defaults(handler=cmd_verify)

    config_parser = commands.add_parser("config", help="Show or save the configuration")
    config_parser.add_argument(
        "--write", action="store_true", help="Save to --config or the default path"
    )
    config_parser.set_defaults(handler=cmd_config)

    return parser

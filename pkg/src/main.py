#!/usr/bin/env python3
"""
BoSSL Main Entry Point / BoSSL 主入口

Synthesizes programs from .bossl specs, runs benchmark sweeps and the
brute-force oracle suites.
从 .bossl 规约合成程序，运行基准扫描和暴力枚举测试。
"""
from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace
from pathlib import Path

from . import __version__
from .bench import (
    ERROR,
    VARIANTS,
    BenchRecord,
    format_summary,
    load_corpus,
    plan_jobs,
    run_sweep,
    summarize,
    write_csv,
)
from .config import MODES, PERTURBATIONS, BosslConfig, configure_logging, load_config
from .engine import (
    Outcome,
    SynthesisResult,
    check_trace,
    file_config,
    synthesize,
    synthesize_all,
)
from .engine.synthesis import prepare
from .interpreter import check_ro_preservation
from .solver import run_oracle_suite
from .specparser import load_spec, print_program
from .unifier import run_unifier_suite

logger = logging.getLogger(__name__)


def parse_perturbations(text: str) -> list[int]:
    """``"0,3"``, ``"0-41"`` or a mix of both."""
    ids: set[int] = set()
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        low, _, high = part.partition("-")
        try:
            first = int(low)
            last = int(high) if high else first
        except ValueError:
            raise ValueError(f"Bad perturbation list entry: {part!r}") from None
        if not 0 <= first <= last < PERTURBATIONS:
            raise ValueError(f"Perturbations must lie in 0..{PERTURBATIONS - 1}, got {part!r}")
        ids.update(range(first, last + 1))
    if not ids:
        raise ValueError("Empty perturbation list")
    return sorted(ids)


def parse_modes(text: str) -> list[str]:
    modes = [m.strip() for m in text.split(",") if m.strip()]
    unknown = [m for m in modes if m not in MODES]
    if unknown or not modes:
        raise ValueError(f"Modes must be drawn from {', '.join(MODES)}, got {text!r}")
    return modes


def cmd_synth(args: argparse.Namespace, config: BosslConfig) -> int:
    """Synthesize the goal function of one spec file"""
    search = config.search.with_mode(args.mode or config.search.mode)
    if args.perturbation is not None:
        search = search.with_perturbation(args.perturbation)
    if args.timeout_ms is not None:
        search = replace(search, timeout_ms=args.timeout_ms)

    try:
        spec = load_spec(args.file)
    except FileNotFoundError as exc:
        print(f"Error: no goal: {exc}")
        return 1
    except ValueError as exc:
        print(f"Error: {exc}")
        return 1

    print("=" * 60)
    print("BoSSL Synthesis / BoSSL 程序合成")
    print("=" * 60)
    print(f"Spec: {args.file}")
    print(f"Goal: {spec.goal_spec.name}")
    print(f"Mode: {search.mode}")
    print(
        f"Perturbation: {search.perturbation}"
        f" (unif {search.unif_order}, rules {search.rule_order})"
    )
    print(f"Timeout: {search.timeout_ms} ms")
    if spec.budgets:
        budgets = file_config(spec, search)
        print(
            f"Budgets: unfold {budgets.max_unfold_depth}, close {budgets.max_close_depth},"
            f" calls {budgets.max_calls_per_path}"
        )
    print("=" * 60)

    try:
        library: list[SynthesisResult] = []
        if args.library or args.validate:
            library, result = synthesize_all(spec, search, config.solver)
        else:
            result = synthesize(spec, search, config.solver)
    except ValueError as exc:
        print(f"Error: {exc}")
        return 1

    if args.library:
        for item in library:
            print(f"\n// {item.spec.name}: {item.stats.outcome.value}")
            if item.procedure is not None:
                print(print_program(item.procedure))

    stats = result.stats
    print(f"\nOutcome / 结果: {stats.outcome.value}")
    if result.procedure is not None:
        print()
        print(print_program(result.procedure))
    print("\nStatistics / 统计:")
    for key, value in stats.as_dict().items():
        print(f"  {key}: {value}")

    if args.stats:
        name = Path(args.file).stem
        record = BenchRecord(
            name=name,
            variant=args.variant,
            mode=search.mode,
            perturbation=search.perturbation,
            time_ms=stats.wall_time_ms,
            ast_size=stats.ast_size,
            rules=None if stats.outcome == Outcome.TIMEOUT else stats.rules_fired,
            backtracks=None if stats.outcome == Outcome.TIMEOUT else stats.backtracks,
            outcome=stats.outcome.value,
        )
        write_csv([record], args.stats)
        print(f"\nStats written to {args.stats}")

    if result.procedure is None:
        print("=" * 60)
        return 1

    if result.derivation is not None:
        violations = check_trace(result.derivation)
        if violations:
            print("\nBorrow discipline violations / 借用规则违例:")
            for violation in violations:
                print(f"  - {violation}")
            return 1

    if args.emit_c:
        programs = [item.procedure for item in library if item.procedure is not None]
        programs.append(result.procedure)
        output = Path(args.emit_c)
        output.parent.mkdir(parents=True, exist_ok=True)
        output.write_text("\n\n".join(print_program(p) for p in programs) + "\n", encoding="utf-8")
        print(f"Program written to {output}")

    if args.validate:
        prepared = prepare(spec, search)
        procedures = {item.spec.name: item.procedure for item in library if item.procedure}
        procedures[result.procedure.name] = result.procedure
        report = check_ro_preservation(
            procedures,
            prepared.goal_spec,
            prepared.predicates,
            config.interpreter,
            args.validate,
            config.validation.seed,
        )
        print("\nValidation / 验证:")
        print(report.render())
        if not report.passed:
            print("=" * 60)
            return 1

    print("=" * 60)
    return 0


def cmd_bench(args: argparse.Namespace, config: BosslConfig) -> int:
    """Run the benchmark corpus, optionally over all perturbations"""
    corpus_dir = args.corpus or config.bench.corpus_dir
    search = config.search
    if args.timeout_ms is not None:
        search = replace(search, timeout_ms=args.timeout_ms)
    try:
        benchmarks = load_corpus(corpus_dir)
        modes = parse_modes(args.modes) if args.modes else list(MODES)
        if args.perturbations:
            perturbations = parse_perturbations(args.perturbations)
        elif args.sweep:
            perturbations = list(range(PERTURBATIONS))
        else:
            perturbations = [search.perturbation]
    except (FileNotFoundError, ValueError) as exc:
        print(f"Error: {exc}")
        return 1

    if args.only:
        wanted = {name.strip() for name in args.only.split(",")}
        unknown = wanted - {b.name for b in benchmarks}
        if unknown:
            print(f"Error: unknown benchmarks: {', '.join(sorted(unknown))}")
            return 1
        benchmarks = [b for b in benchmarks if b.name in wanted]
    elif args.sweep:
        benchmarks = [b for b in benchmarks if b.sweep]

    jobs = plan_jobs(benchmarks, search, config.solver, perturbations, modes)
    logger.debug("Planned %d runs over %d benchmarks", len(jobs), len(benchmarks))
    workers = args.jobs or config.bench.jobs
    output = args.output or config.bench.output_csv

    print("=" * 60)
    print("BoSSL Benchmarks / BoSSL 基准测试")
    print("=" * 60)
    print(f"Corpus: {corpus_dir}")
    print(f"Benchmarks: {', '.join(f'{b.name} ({b.variant})' for b in benchmarks)}")
    print(f"Modes: {', '.join(modes)}")
    print(f"Perturbations: {len(perturbations)}")
    print(f"Runs: {len(jobs)} on {workers} workers")
    print(f"Output: {output}")
    print("=" * 60)

    records = run_sweep(jobs, workers)
    write_csv(records, output)

    if config.bench.summary:
        print()
        print(format_summary(summarize(records)))
    errors = sum(1 for r in records if r.outcome == ERROR)
    print("=" * 60)
    print(f"{len(records)} rows written to {output} ({errors} errors)")
    return 0


def cmd_oracle(args: argparse.Namespace, config: BosslConfig) -> int:
    """Run the unifier and pure-solver oracle suites"""
    print("=" * 60)
    print("BoSSL Oracle Suites / BoSSL 枚举测试")
    print("=" * 60)
    unifier = run_unifier_suite(args.samples, args.seed)
    print(f"Unifier / 合一: {unifier.summary()}")
    solver = run_oracle_suite(config.solver, args.samples, args.seed)
    print(f"Pure solver / 纯逻辑求解器: {solver.summary()}")
    print("=" * 60)
    return 0 if unifier.passed and solver.passed else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bossl",
        description="BoSSL - separation-logic program synthesis with read-only borrows",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument(
        "--config",
        type=str,
        default="config.yml",
        help="Path to configuration file",
    )

    subparsers = parser.add_subparsers(dest="command", help="Command to execute")

    # synth
    synth_parser = subparsers.add_parser("synth", help="Synthesize a program from a .bossl spec")
    synth_parser.add_argument("file", type=str, help="Spec file")
    synth_parser.add_argument(
        "--mode",
        choices=MODES,
        default=None,
        help="imm keeps borrows, mut rewrites them to Mut (default: search.mode)",
    )
    synth_parser.add_argument(
        "--perturbation",
        type=int,
        default=None,
        help=f"Search perturbation 0..{PERTURBATIONS - 1} (default: from config.yml)",
    )
    synth_parser.add_argument(
        "--timeout-ms",
        type=int,
        default=None,
        help="Search timeout in milliseconds (default: search.timeout_ms)",
    )
    synth_parser.add_argument(
        "--validate",
        type=int,
        default=0,
        metavar="N",
        help="Run the program on N random models of the precondition",
    )
    synth_parser.add_argument(
        "--emit-c",
        type=str,
        default=None,
        metavar="PATH",
        help="Write the synthesized program text to PATH",
    )
    synth_parser.add_argument(
        "--stats",
        type=str,
        default=None,
        metavar="CSV",
        help="Write the run as a one-row benchmark CSV",
    )
    synth_parser.add_argument(
        "--variant",
        choices=VARIANTS,
        default="shape",
        help="Variant tag for --stats (default: shape)",
    )
    synth_parser.add_argument(
        "--library",
        action="store_true",
        help="Also synthesize and print the library functions",
    )

    # bench
    bench_parser = subparsers.add_parser("bench", help="Run the benchmark corpus")
    bench_parser.add_argument(
        "corpus",
        type=str,
        nargs="?",
        default=None,
        help="Corpus directory (default: bench.corpus_dir)",
    )
    bench_parser.add_argument(
        "--sweep",
        action="store_true",
        help=f"All {PERTURBATIONS} perturbations on the benchmarks marked for sweeps",
    )
    bench_parser.add_argument(
        "--only",
        type=str,
        default=None,
        help="Comma-separated benchmark names (overrides the sweep selection)",
    )
    bench_parser.add_argument(
        "--jobs",
        type=int,
        default=None,
        help="Parallel jobs (default: bench.jobs)",
    )
    bench_parser.add_argument(
        "--output",
        type=str,
        default=None,
        help="Output CSV (default: bench.output_csv)",
    )
    bench_parser.add_argument(
        "--timeout-ms",
        type=int,
        default=None,
        help="Per-run timeout in milliseconds (default: search.timeout_ms)",
    )
    bench_parser.add_argument(
        "--perturbations",
        type=str,
        default=None,
        help='Perturbation ids, e.g. "0,3" or "0-41"',
    )
    bench_parser.add_argument(
        "--modes",
        type=str,
        default=None,
        help="Comma-separated modes (default: imm,mut)",
    )

    # oracle
    oracle_parser = subparsers.add_parser("oracle", help="Run the brute-force oracle suites")
    oracle_parser.add_argument(
        "--samples",
        type=int,
        default=1000,
        help="Random tasks per suite (default: 1000)",
    )
    oracle_parser.add_argument(
        "--seed",
        type=int,
        default=0,
        help="Random seed (default: 0)",
    )

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    if not args.command:
        parser.print_help()
        return 1

    try:
        config = load_config(args.config)
    except (FileNotFoundError, KeyError, TypeError, ValueError) as exc:
        print(f"Configuration error: {exc}")
        return 1
    configure_logging(config.logging)

    commands = {
        "synth": cmd_synth,
        "bench": cmd_bench,
        "oracle": cmd_oracle,
    }
    try:
        return commands[args.command](args, config)
    except ValueError as exc:
        print(f"Error: {exc}")
        return 1


if __name__ == "__main__":
    sys.exit(main())

"""
KNOWLEDGE SHARE - command line
==============================
Pipeline: ingest → overlap → graph → simulate → export

Subcommands:
- ingest      incidence CSV/JSON → knowledge base JSON
- overlap     knowledge base → overlap CSV
- graph       knowledge base → actor graph JSON
- stats       graph → order, size, degrees, components
- simulate    graph → spread trace (+ Monte Carlo estimates with --trials)
- trace-root  graph + observed infected set → ranked origin candidates
- export      graph → edge-json | dot | csv
- mass        one actor's mass distribution
- models      mod(Σ) over a situation universe
- shared      generators two actors share

Exit codes: 0 success, 1 usage error, 2 data error.
Diagnostics go to stderr; data goes to files or stdout.
"""

import argparse
import logging
import sys
from typing import List, Optional

from config import (
    DEFAULT_LAMBDA,
    DEFAULT_LOG_LEVEL,
    DEFAULT_MAX_ROUNDS,
    DEFAULT_THRESHOLD,
    DEFAULT_TRIALS,
    DEFAULT_WORKERS,
    MAX_RNG_SEED,
    configure_logging,
)
from core_model import actor_models, mass_distribution, mod_of
from diffusion import SpreadConfig, SpreadModel, Transmission, monte_carlo, simulate, trace_root
from errors import KnowledgeShareError
from formats import (
    GraphFormat,
    InputFormat,
    TraceFormat,
    export_graph,
    export_overlap,
    export_trace,
    ingest,
    load_graph,
    load_knowledge_base,
    load_universe,
    save_graph,
    save_knowledge_base,
)
from formats.artifacts import dump_document, to_json_bytes
from graph_builder import WeightMode, build_graph, graph_stats
from overlap import OverlapMode, overlap_matrix, shared_generators

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2


class UsageError(Exception):
    pass


class CliParser(argparse.ArgumentParser):
    """argparse exits 2 on bad usage; this surface reserves 2 for data errors."""

    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


# ============================================
# ARGUMENT TYPES
# ============================================

def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def _u64(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if not 0 <= value <= MAX_RNG_SEED:
        raise argparse.ArgumentTypeError(f"must be an unsigned 64-bit integer, got {value}")
    return value


def _nonnegative_float(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not value >= 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {text}")
    return value


def _positive_float(text: str) -> float:
    value = _nonnegative_float(text)
    if value == 0:
        raise argparse.ArgumentTypeError("must be > 0")
    return value


def _id_list(text: str) -> List[str]:
    ids = [token for token in text.split(",") if token]
    if not ids:
        raise argparse.ArgumentTypeError("expected ID[,ID...]")
    return ids


def _choices(enum_cls) -> List[str]:
    return [member.value for member in enum_cls]


# ============================================
# PARSER
# ============================================

def _add_spread_flags(sub: argparse.ArgumentParser, trials_default: Optional[int]) -> None:
    sub.add_argument("--model", choices=_choices(SpreadModel), default=SpreadModel.SI.value)
    sub.add_argument("--transmission", choices=_choices(Transmission), default=Transmission.UNIT.value)
    sub.add_argument("--lambda", dest="lambda_", type=_positive_float, default=DEFAULT_LAMBDA)
    sub.add_argument("--rounds", type=_positive_int, default=DEFAULT_MAX_ROUNDS)
    sub.add_argument("--trials", type=_positive_int, default=trials_default)
    sub.add_argument("--rng-seed", type=_u64, default=0)
    sub.add_argument("--workers", type=_positive_int, default=DEFAULT_WORKERS)


def build_parser() -> CliParser:
    parser = CliParser(prog="knowledge-share", description="Knowledge-overlap networks and spread simulation")
    parser.add_argument("--log-level", default=DEFAULT_LOG_LEVEL,
                        choices=["DEBUG", "INFO", "WARNING", "ERROR"])
    commands = parser.add_subparsers(dest="command", metavar="COMMAND")
    commands.required = True

    sub = commands.add_parser("ingest", help="incidence file → knowledge base JSON")
    sub.add_argument("--input", required=True)
    sub.add_argument("--format", choices=_choices(InputFormat), default=InputFormat.CSV.value)
    sub.add_argument("--out", required=True)

    sub = commands.add_parser("overlap", help="knowledge base → overlap CSV")
    sub.add_argument("--kb", required=True)
    sub.add_argument("--mode", choices=_choices(OverlapMode), default=OverlapMode.COUNT.value)
    sub.add_argument("--workers", type=_positive_int, default=DEFAULT_WORKERS)
    sub.add_argument("--out")

    sub = commands.add_parser("graph", help="knowledge base → graph JSON")
    sub.add_argument("--kb", required=True)
    sub.add_argument("--mode", choices=_choices(WeightMode), default=WeightMode.INTERSECTION.value)
    sub.add_argument("--threshold", type=_nonnegative_float, default=DEFAULT_THRESHOLD)
    sub.add_argument("--overlap-mode", choices=_choices(OverlapMode), default=OverlapMode.COUNT.value)
    sub.add_argument("--project", choices=["actors", "generators"], default="actors")
    sub.add_argument("--workers", type=_positive_int, default=DEFAULT_WORKERS)
    sub.add_argument("--out", required=True)

    sub = commands.add_parser("stats", help="graph statistics as JSON")
    sub.add_argument("--graph", required=True)

    sub = commands.add_parser("simulate", help="spread a trait over the graph")
    sub.add_argument("--graph", required=True)
    sub.add_argument("--seeds", type=_id_list, required=True)
    _add_spread_flags(sub, trials_default=None)
    sub.add_argument("--trace-format", choices=_choices(TraceFormat), default=TraceFormat.JSON.value)
    sub.add_argument("--out")

    sub = commands.add_parser("trace-root", help="rank likely origins of an infected set")
    sub.add_argument("--graph", required=True)
    sub.add_argument("--infected", type=_id_list, required=True)
    _add_spread_flags(sub, trials_default=DEFAULT_TRIALS)

    sub = commands.add_parser("export", help="render a graph")
    sub.add_argument("--graph", required=True)
    sub.add_argument("--format", choices=_choices(GraphFormat), default=GraphFormat.EDGE_JSON.value)
    sub.add_argument("--out")

    sub = commands.add_parser("mass", help="mass distribution of one actor")
    sub.add_argument("--kb", required=True)
    sub.add_argument("--actor", required=True)
    sub.add_argument("--normalized", action="store_true")

    sub = commands.add_parser("models", help="mod(Σ) over a situation universe")
    sub.add_argument("--universe", required=True)
    group = sub.add_mutually_exclusive_group(required=True)
    group.add_argument("--sigma", type=_id_list)
    group.add_argument("--actor")
    sub.add_argument("--kb")

    sub = commands.add_parser("shared", help="generators two actors share")
    sub.add_argument("--kb", required=True)
    sub.add_argument("--a", required=True)
    sub.add_argument("--b", required=True)

    return parser


# ============================================
# COMMANDS
# ============================================

def _emit(data: bytes, out: Optional[str] = None) -> None:
    if out:
        with open(out, "wb") as handle:
            handle.write(data)
        return
    sys.stdout.flush()
    sys.stdout.buffer.write(data)
    sys.stdout.buffer.flush()


def _spread_config(args, seeds: List[str]) -> SpreadConfig:
    return SpreadConfig(
        model=args.model,
        seeds=seeds,
        max_rounds=args.rounds,
        transmission=args.transmission,
        lambda_=args.lambda_,
        rng_seed=args.rng_seed,
    )


def cmd_ingest(args) -> None:
    kb = ingest(args.input, InputFormat(args.format))
    save_knowledge_base(kb, args.out)


def cmd_overlap(args) -> None:
    kb = load_knowledge_base(args.kb)
    matrix = overlap_matrix(kb, OverlapMode(args.mode), workers=args.workers)
    _emit(export_overlap(matrix), args.out)


def cmd_graph(args) -> None:
    kb = load_knowledge_base(args.kb)
    if args.project == "generators":
        kb = kb.transpose()
    matrix = overlap_matrix(kb, OverlapMode(args.overlap_mode), workers=args.workers)
    graph = build_graph(kb, matrix, WeightMode(args.mode), args.threshold)
    save_graph(graph, args.out)


def cmd_stats(args) -> None:
    _emit(dump_document(graph_stats(load_graph(args.graph))))


def cmd_simulate(args) -> None:
    if args.trials and not args.out:
        raise UsageError("simulate: --trials requires --out, stdout carries the estimates")
    graph = load_graph(args.graph)
    cfg = _spread_config(args, args.seeds)
    trace = simulate(graph, cfg)
    _emit(export_trace(trace, TraceFormat(args.trace_format)), args.out)
    if args.trials:
        estimates = monte_carlo(graph, cfg, args.trials, workers=args.workers)
        _emit(to_json_bytes({"trials": args.trials, "estimates": estimates}))


def cmd_trace_root(args) -> None:
    graph = load_graph(args.graph)
    cfg = _spread_config(args, args.infected)
    ranking = trace_root(graph, args.infected, cfg, args.trials, workers=args.workers)
    _emit(to_json_bytes([{"actor": actor, "score": score} for actor, score in ranking]))


def cmd_export(args) -> None:
    _emit(export_graph(load_graph(args.graph), GraphFormat(args.format)), args.out)


def cmd_mass(args) -> None:
    kb = load_knowledge_base(args.kb)
    _emit(to_json_bytes(mass_distribution(kb, args.actor, normalized=args.normalized)))


def cmd_models(args) -> None:
    universe = load_universe(args.universe)
    if args.actor is not None:
        if not args.kb:
            raise UsageError("models: --actor requires --kb")
        models = actor_models(universe, load_knowledge_base(args.kb), args.actor)
    else:
        models = mod_of(universe, args.sigma)
    _emit(to_json_bytes({"situations": sorted(models), "size": len(models)}))


def cmd_shared(args) -> None:
    kb = load_knowledge_base(args.kb)
    shared = shared_generators(kb, args.a, args.b)
    _emit(to_json_bytes([{"generator": g, "weight": w} for g, w in shared]))


COMMANDS = {
    "ingest": cmd_ingest,
    "overlap": cmd_overlap,
    "graph": cmd_graph,
    "stats": cmd_stats,
    "simulate": cmd_simulate,
    "trace-root": cmd_trace_root,
    "export": cmd_export,
    "mass": cmd_mass,
    "models": cmd_models,
    "shared": cmd_shared,
}


def run_cli(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_USAGE

    configure_logging(args.log_level)
    try:
        COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"ERROR: {exc}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    except (KnowledgeShareError, OSError) as exc:
        logger.error(f"[CLI] {args.command} failed: {exc}")
        return EXIT_DATA
    logger.info(f"[CLI] {args.command} done")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(run_cli())

"""
Command-line front door for the truth-discovery benchmark.

Commands:
    run              run a method on a claim file and write a results directory
    eval             score one or more methods (or a predictions file) against ground truth
    synth            generate a synthetic dataset with planted ground truth
    dump-popularity  object popularity, most popular first
    dump-dependence  final per-object dependence scores of a discovery run

Exit status: 0 on success, 2 on bad input, 3 when the engine does not converge.

Usage:
    mtd-bench run --claims data/claims.tsv --out results/
    python -m src.cli eval --claims data/claims.tsv --gold data/gold.tsv --method all
"""

import argparse
import logging
import sys
import time
from pathlib import Path
from typing import Dict, List, Optional, TextIO, Tuple

from pydantic import ValidationError
from tqdm import tqdm

from src import __version__
from src.baselines.link_analysis import avg_log, sums
from src.baselines.voting import voting
from src.claims.models import ClaimTable, TruthAssignment
from src.claims.popularity import compute_popularity
from src.claims.view import derive_view
from src.config.constants import LOG_LEVEL
from src.discovery.confidence import extract_truths
from src.discovery.engine import VARIANT_SWITCHES, EngineConfig, RunResult, run
from src.discovery.supportive import build_supportive_graphs
from src.evaluation.metrics import (
    MetricsReport,
    evaluate,
    top_popular_errors,
    trace_metrics,
)
from src.evaluation.reporting import (
    RunManifest,
    format_metrics_table,
    metrics_key_values,
    write_dependence_tsv,
    write_key_values,
    write_popularity_tsv,
    write_profile_tsv,
    write_trace_tsv,
    write_truths_tsv,
)
from src.graphs.endorsement import WalkConvergenceError, write_graph_tsv
from src.ingestion.parsers.claim_parser import (
    ClaimFileFormat,
    load_claims,
    load_ground_truth,
    read_comment_fields,
)
from src.synth.generator import SynthSpec, generate, load_spec, source_roles, write_dataset

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NOT_CONVERGED = 3

METHODS = ("smartmtd", "voting", "sums", "avglog")
BASELINES = {"voting": voting, "sums": sums, "avglog": avg_log}

# EngineConfig field -> command-line flag
ENGINE_FLAGS = {
    "beta": ("--beta", float),
    "delta": ("--delta", float),
    "pp_max": ("--pp-max", float),
    "np_max": ("--np-max", float),
    "pc_max": ("--pc-max", float),
    "nc_max": ("--nc-max", float),
    "max_outer_iters": ("--max-iters", int),
    "threads": ("--threads", int),
}

SYNTH_FLAGS = {
    name: "--seed" if name == "rng_seed" else "--" + name.replace("_", "-")
    for name in SynthSpec.model_fields
}


# ---------------------------------------------------------------------------
# Argument helpers
# ---------------------------------------------------------------------------


def _unescape(delimiter: str) -> str:
    return {"\\t": "\t", "tab": "\t"}.get(delimiter, delimiter)


def _file_format(args) -> ClaimFileFormat:
    return ClaimFileFormat(delimiter=_unescape(args.delimiter), has_header=args.header)


def engine_config(args, variant: Optional[str] = None, record_trace: bool = False) -> EngineConfig:
    """EngineConfig from command-line overrides; unset flags keep the environment defaults."""
    overrides = {
        field: getattr(args, field)
        for field in ENGINE_FLAGS
        if getattr(args, field, None) is not None
    }
    return EngineConfig.for_variant(
        variant or args.variant, record_trace=record_trace, **overrides
    )


def _describe_validation(error: ValidationError) -> str:
    flags = {field: flag for field, (flag, _) in ENGINE_FLAGS.items()}
    flags.update(SYNTH_FLAGS)
    lines = []
    for detail in error.errors():
        field = str(detail["loc"][0]) if detail["loc"] else ""
        flag = flags.get(field, field)
        lines.append(f"{flag}: {detail['msg']} (got {detail.get('input')!r})")
    return "Invalid parameter value:\n  " + "\n  ".join(lines)


def _open_output(path: Optional[str]) -> TextIO:
    if path is None:
        return sys.stdout
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    return open(path, "w", encoding="utf-8")


def solve(
    method: str, claims: ClaimTable, config: Optional[EngineConfig] = None
) -> Tuple[TruthAssignment, Optional[RunResult], float]:
    """Run one method; returns truths, the engine result (smartmtd only) and seconds taken."""
    if method == "smartmtd":
        result = run(claims, config)
        return result.truths, result, result.wall_time

    started = time.perf_counter()
    truths = BASELINES[method](derive_view(claims))
    return truths, None, time.perf_counter() - started


def _method_plan(method: str, variant: str) -> List[Tuple[str, str, Optional[str]]]:
    """(label, method, variant) triples to evaluate."""
    if method != "all":
        label = method if method != "smartmtd" or variant == "full" else f"smartmtd-{variant}"
        return [(label, method, variant if method == "smartmtd" else None)]
    plan = [
        ("smartmtd" if v == "full" else f"smartmtd-{v}", "smartmtd", v) for v in VARIANT_SWITCHES
    ]
    plan.extend((name, name, None) for name in BASELINES)
    return plan


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def cmd_run(args) -> int:
    """Run one method and write truths, profile, report and manifest into --out."""
    if args.manifest:
        manifest = RunManifest.load(Path(args.manifest))
        method = manifest.method
        fmt = ClaimFileFormat(delimiter=manifest.delimiter, has_header=manifest.has_header)
        config = EngineConfig(**manifest.config) if method == "smartmtd" else None
        if config is not None and args.threads is not None:
            config = config.model_copy(update={"threads": args.threads})
        claims_path = manifest.claims_path
        gold_path = manifest.gold_path
        seed = manifest.seed
        out = Path(args.out or manifest.output_dir)
        logger.info(f"Replaying manifest {args.manifest} ({manifest.digest()})")
    else:
        if not args.claims or not args.out:
            raise ValueError("run needs --claims and --out (or --manifest)")
        method = args.method
        fmt = _file_format(args)
        config = engine_config(args, record_trace=args.trace) if method == "smartmtd" else None
        claims_path = args.claims
        gold_path = args.gold
        out = Path(args.out)
        seed = _dataset_seed(Path(claims_path), fmt)

    claims = load_claims(Path(claims_path), fmt)
    truths, result, elapsed = solve(method, claims, config)

    manifest = RunManifest(
        method=method,
        variant=config.variant if config else None,
        config=config.model_dump() if config else {},
        claims_path=str(claims_path),
        gold_path=str(gold_path) if gold_path else None,
        delimiter=fmt.delimiter,
        has_header=fmt.has_header,
        seed=seed,
        output_dir=str(out),
    )
    header = manifest.header_lines()
    out.mkdir(parents=True, exist_ok=True)

    write_truths_tsv(truths, out / "truths.tsv", header)
    report = {
        "method": method,
        "objects": len(truths.objects),
        "empty_objects": len(truths.empty_objects()),
        "wall_time": elapsed,
    }

    if result is not None:
        write_profile_tsv(result.profile, out / "profile.tsv", header)
        report.update(
            variant=config.variant,
            iterations=result.iterations,
            converged=result.converged,
            final_difference=result.final_difference,
        )
        if result.trace:
            gold = load_ground_truth(Path(gold_path), fmt) if gold_path else None
            write_trace_tsv(_trace_rows(result, gold), out / "trace.tsv", header)
        if args.dump_graphs:
            _dump_graphs(claims, result, config, out / "graphs")

    with open(out / "report.txt", "w", encoding="utf-8") as f:
        write_key_values(report, f)
    manifest.write(out / "manifest.json")

    print(f"✅ {method}: {len(truths.objects)} objects resolved in {elapsed:.2f}s -> {out}")
    return _exit_for(result)


def _dataset_seed(path: Path, fmt: ClaimFileFormat) -> Optional[int]:
    """Generator seed recorded in a synthetic claim file, if any."""
    if not path.exists():
        return None
    raw = read_comment_fields(path, fmt).get("seed")
    return int(raw) if raw and raw.lstrip("-").isdigit() else None


def _trace_rows(result: RunResult, gold: Optional[TruthAssignment]) -> List[Dict]:
    rows = [
        {
            "iteration": record.iteration,
            "difference": record.difference if record.difference is not None else "",
        }
        for record in result.trace
    ]
    if gold is not None:
        per_iteration = [extract_truths(record.confidence) for record in result.trace]
        for row, scores in zip(rows, trace_metrics(per_iteration, gold, restrict_to_gold=True)):
            row.update(precision=scores["precision"], recall=scores["recall"], f1=scores["f1"])
    return rows


def _dump_graphs(claims: ClaimTable, result: RunResult, config: EngineConfig, directory: Path):
    """Supportive graphs rebuilt from the final confidence and dependence state."""
    positive, negative = build_supportive_graphs(
        derive_view(claims),
        result.confidence,
        result.popularity,
        result.dependence,
        config.beta,
        config.threads,
    )
    write_graph_tsv(positive, directory / "supportive_positive.tsv", "positive supportive graph")
    write_graph_tsv(negative, directory / "supportive_negative.tsv", "negative supportive graph")


def _exit_for(result: Optional[RunResult]) -> int:
    if result is not None and not result.converged:
        logger.error(
            f"Engine did not converge within {result.iterations} iterations "
            f"(last cosine difference {result.final_difference})"
        )
        return EXIT_NOT_CONVERGED
    return EXIT_OK


def cmd_eval(args) -> int:
    """Score predictions, or K runs of each requested method, against ground truth."""
    fmt = _file_format(args)
    gold = load_ground_truth(Path(args.gold), fmt)

    claims = load_claims(Path(args.claims), fmt) if args.claims else None
    if claims is not None:
        view = derive_view(claims)
        weights = dict(compute_popularity(view).normalized)
        objects = view.object_order
    elif args.predictions:
        objects = sorted(gold.objects)
        weights = {o: 1.0 / len(objects) for o in objects}
    else:
        raise ValueError("eval needs --claims (to run methods) or --predictions")

    reports: List[MetricsReport] = []
    first_predictions: Dict[str, TruthAssignment] = {}

    if args.predictions:
        predicted = load_ground_truth(Path(args.predictions), fmt)
        reports.append(
            evaluate([predicted], gold, weights, None, objects, args.gold_subset, "predictions")
        )
        first_predictions["predictions"] = predicted
    else:
        quiet = not logger.isEnabledFor(logging.INFO)
        for label, method, variant in _method_plan(args.method, args.variant):
            config = engine_config(args, variant=variant) if method == "smartmtd" else None
            preds, durations = [], []
            progress = tqdm(
                range(args.runs), desc=label, leave=False, disable=quiet or args.runs == 1
            )
            for _ in progress:
                truths, result, elapsed = solve(method, claims, config)
                preds.append(truths)
                durations.append(elapsed)
            reports.append(
                evaluate(preds, gold, weights, durations, objects, args.gold_subset, label)
            )
            first_predictions[label] = preds[0]

    print(format_metrics_table(reports))

    if args.top_popular:
        for label, predicted in first_predictions.items():
            errors = top_popular_errors(predicted, gold, weights, args.top_popular)
            print(
                f"\n{label}: {len(errors)} errors among the {args.top_popular} most popular objects"
            )
            for obj in errors:
                print(
                    f"  {obj}: predicted {sorted(predicted.get(obj))}, "
                    f"gold {sorted(gold.get(obj))}"
                )

    if args.out:
        values = {}
        for report in reports:
            values.update(metrics_key_values(report))
        with _open_output(args.out) as f:
            write_key_values(values, f)
    return EXIT_OK


def cmd_synth(args) -> int:
    """Generate a synthetic dataset into --out (claims.tsv, gold.tsv, spec.env, roles.tsv)."""
    overrides = {
        name: getattr(args, name) for name in SYNTH_FLAGS if getattr(args, name) is not None
    }
    spec = load_spec(Path(args.spec), **overrides) if args.spec else SynthSpec(**overrides)
    claims, gold = generate(spec)

    out = Path(args.out)
    comments = [f"produced-by: mtd-bench {__version__}", f"seed: {spec.rng_seed}"]
    write_dataset(claims, gold, out, comments)
    with open(out / "spec.env", "w", encoding="utf-8") as f:
        write_key_values(spec.model_dump(), f)
    with open(out / "roles.tsv", "w", encoding="utf-8") as f:
        f.write("# source_id\trole\n")
        for source, role in source_roles(spec).items():
            f.write(f"{source}\t{role}\n")

    print(
        f"✅ {len(claims)} claims over {len(claims.objects)} objects "
        f"from {len(claims.sources)} sources -> {out}"
    )
    return EXIT_OK


def cmd_dump_popularity(args) -> int:
    claims = load_claims(Path(args.claims), _file_format(args))
    popularity = compute_popularity(derive_view(claims))
    writer = _open_output(args.out)
    try:
        write_popularity_tsv(popularity, writer, [f"produced-by: mtd-bench {__version__}"])
    finally:
        if writer is not sys.stdout:
            writer.close()
    return EXIT_OK


def cmd_dump_dependence(args) -> int:
    claims = load_claims(Path(args.claims), _file_format(args))
    result = run(claims, engine_config(args))
    writer = _open_output(args.out)
    try:
        write_dependence_tsv(
            result.dependence,
            writer,
            [f"produced-by: mtd-bench {__version__}", f"iterations: {result.iterations}"],
        )
    finally:
        if writer is not sys.stdout:
            writer.close()
    return _exit_for(result)


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def _add_format_args(parser: argparse.ArgumentParser):
    parser.add_argument("--delimiter", default="\t", help="Column delimiter (default: tab)")
    parser.add_argument("--header", action="store_true", help="Input files have a header row")


def _add_engine_args(parser: argparse.ArgumentParser):
    group = parser.add_argument_group("engine")
    for field, (flag, kind) in ENGINE_FLAGS.items():
        group.add_argument(flag, dest=field, type=kind, default=None)
    group.add_argument("--variant", choices=list(VARIANT_SWITCHES), default="full")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mtd-bench", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--log-level", default=LOG_LEVEL, help="DEBUG, INFO, WARNING or ERROR")
    commands = parser.add_subparsers(dest="command", required=True)

    run_parser = commands.add_parser("run", help="Run a method and write a results directory")
    run_parser.add_argument("--method", choices=METHODS, default="smartmtd")
    run_parser.add_argument("--claims", help="Claim file")
    run_parser.add_argument("--gold", help="Ground truth, used for the per-iteration trace")
    run_parser.add_argument("--out", help="Results directory")
    run_parser.add_argument("--manifest", help="Re-run from a manifest.json")
    run_parser.add_argument("--trace", action="store_true", help="Write trace.tsv")
    run_parser.add_argument(
        "--dump-graphs", action="store_true", help="Write the final supportive graphs"
    )
    _add_format_args(run_parser)
    _add_engine_args(run_parser)
    run_parser.set_defaults(handler=cmd_run)

    eval_parser = commands.add_parser("eval", help="Score methods against ground truth")
    eval_parser.add_argument("--method", choices=METHODS + ("all",), default="smartmtd")
    eval_parser.add_argument("--claims", help="Claim file")
    eval_parser.add_argument("--gold", required=True, help="Ground-truth file")
    eval_parser.add_argument("--predictions", help="Score this truths file instead of running")
    eval_parser.add_argument("--runs", type=int, default=1, help="Repetitions for timing (K)")
    eval_parser.add_argument(
        "--gold-subset",
        action="store_true",
        help="Evaluate only objects present in the ground truth",
    )
    eval_parser.add_argument(
        "--top-popular", type=int, default=0, help="List errors among the K most popular objects"
    )
    eval_parser.add_argument("--out", help="Write key=value metrics here")
    _add_format_args(eval_parser)
    _add_engine_args(eval_parser)
    eval_parser.set_defaults(handler=cmd_eval)

    synth_parser = commands.add_parser("synth", help="Generate a synthetic dataset")
    synth_parser.add_argument("--spec", help="key=value spec file")
    synth_parser.add_argument("--out", required=True, help="Output directory")
    for name, flag in SYNTH_FLAGS.items():
        synth_parser.add_argument(
            flag, dest=name, type=SynthSpec.model_fields[name].annotation, default=None
        )
    synth_parser.set_defaults(handler=cmd_synth)

    popularity_parser = commands.add_parser("dump-popularity", help="Object popularity table")
    popularity_parser.add_argument("--claims", required=True)
    popularity_parser.add_argument("--out", help="Output file (default: stdout)")
    _add_format_args(popularity_parser)
    popularity_parser.set_defaults(handler=cmd_dump_popularity)

    dependence_parser = commands.add_parser("dump-dependence", help="Final dependence scores")
    dependence_parser.add_argument("--claims", required=True)
    dependence_parser.add_argument("--out", help="Output file (default: stdout)")
    _add_format_args(dependence_parser)
    _add_engine_args(dependence_parser)
    dependence_parser.set_defaults(handler=cmd_dump_dependence)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    logging.basicConfig(
        level=getattr(logging, str(args.log_level).upper(), logging.INFO),
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
    )

    try:
        return args.handler(args)
    except ValidationError as e:
        print(_describe_validation(e), file=sys.stderr)
        return EXIT_INPUT
    except WalkConvergenceError as e:
        logger.error(f"Random walk did not converge: {e}")
        print(f"❌ {e}", file=sys.stderr)
        return EXIT_NOT_CONVERGED
    except (OSError, ValueError) as e:
        print(f"❌ {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())

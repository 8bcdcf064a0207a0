"""
Command line interface

    ais-activity run --config run.env --out out/
    ais-activity validate --input records.jsonl --out out/
    ais-activity rerun-rejected --out out/
    ais-activity gen-synthetic --out corpus/ --seed 7

Exit status: 0 on success, 1 when a pipeline stage fails, 2 for any other
pipeline error (configuration, unreadable input).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Sequence

from app.core.config import Settings, load_settings
from app.core.exceptions import AisActivityError, StageError
from app.core.logging import configure_logging, get_logger
from app.output import writers
from app.services.pipeline_service import ActivityPipeline
from app.services.synthetic import SyntheticSpec, write_corpus
from app.services.uncertainty import rerun_rejected

logger = get_logger(__name__)

EXIT_OK = 0
EXIT_STAGE_FAILED = 1
EXIT_ERROR = 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ais-activity",
        description="Vessel journeys and maritime activity metrics from AIS records",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="key=value settings file")
    common.add_argument("--out", type=Path, help="output directory")
    common.add_argument("--threads", type=int, help="worker threads")

    run = sub.add_parser("run", parents=[common], help="full analysis")
    run.add_argument("--input", type=Path, help="line-JSON or CSV record file")
    run.add_argument("--case", choices=["low", "df", "hi", "all"], help="transit-rule case")

    validate = sub.add_parser("validate", parents=[common], help="trajectory model accuracy")
    validate.add_argument("--input", type=Path, help="line-JSON or CSV record file")

    sub.add_parser(
        "rerun-rejected", parents=[common], help="travel time recoverable from rejected records"
    )

    synthetic = sub.add_parser("gen-synthetic", help="synthetic corpus with ground truth")
    synthetic.add_argument("--out", type=Path, required=True, help="output directory")
    synthetic.add_argument("--seed", type=int, default=0)
    synthetic.add_argument("--vessels", type=int, default=10)
    synthetic.add_argument("--days", type=float, default=2.0)
    synthetic.add_argument("--jitter", type=float, default=0.0, help="position noise in meters")
    synthetic.add_argument("--no-skagerrak", action="store_true")
    synthetic.add_argument("--collision", action="store_true", help="add two vessels sharing one MMSI")
    return parser


def _settings(args: argparse.Namespace) -> Settings:
    return load_settings(
        args.config,
        input_path=getattr(args, "input", None),
        output_dir=args.out,
        case=getattr(args, "case", None),
        threads=args.threads,
    )


def cmd_run(args: argparse.Namespace) -> int:
    config = _settings(args)
    configure_logging(config)
    result = ActivityPipeline(config).run(config.output_dir)
    logger.info("run_completed", out_dir=str(result.out_dir), outputs=len(result.outputs))
    return EXIT_OK


def cmd_validate(args: argparse.Namespace) -> int:
    config = _settings(args)
    configure_logging(config)
    result = ActivityPipeline(config).validate(config.output_dir)
    if result.accuracy is not None:
        logger.info(
            "validation_completed",
            records=result.accuracy.records,
            median_position_error_m=result.accuracy.median_position_error_m,
            median_route_distance_m=result.accuracy.median_route_distance_m,
            median_time_offset_s=result.accuracy.median_time_offset_s,
        )
    return EXIT_OK


def cmd_rerun_rejected(args: argparse.Namespace) -> int:
    config = _settings(args)
    configure_logging(config)
    out = config.output_dir
    report = rerun_rejected(out / writers.REJECTED_FILE, out / writers.TRAVEL_TIME_FILE, config)
    writers.write_json(out / writers.REJECTED_REPORT_FILE, report)
    return EXIT_OK


def cmd_gen_synthetic(args: argparse.Namespace) -> int:
    configure_logging()
    spec = SyntheticSpec(
        n_vessels=args.vessels,
        days=args.days,
        seed=args.seed,
        jitter_m=args.jitter,
        skagerrak=not args.no_skagerrak,
        collision=args.collision,
    )
    paths = write_corpus(args.out, spec)
    print(paths.config)
    return EXIT_OK


COMMANDS = {
    "run": cmd_run,
    "validate": cmd_validate,
    "rerun-rejected": cmd_rerun_rejected,
    "gen-synthetic": cmd_gen_synthetic,
}


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except StageError as exc:
        print(f"error: {exc.message}", file=sys.stderr)
        return EXIT_STAGE_FAILED
    except AisActivityError as exc:
        print(f"error: {exc.code}: {exc.message}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())

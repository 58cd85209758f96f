"""Command line entry point: ``coalgen generate | validate | stats``."""

from __future__ import annotations

import argparse
import json
import logging
import sys

from . import __version__
from .config import FORMATS, load_config
from .errors import CoalgenError, ConfigurationError
from .pipeline import build_world, format_stats, run_generate, run_stats
from .rules import load_rules

log = logging.getLogger("coalgen")


def _report(exc: CoalgenError) -> int:
    record = {"level": "error", "type": type(exc).__name__, "message": str(exc)}
    field = getattr(exc, "field", None) or getattr(exc, "location", None)
    if field:
        record["field"] = field
    print(json.dumps(record), file=sys.stderr)
    return 2 if isinstance(exc, ConfigurationError) else 1


def cmd_generate(args) -> int:
    config = load_config(args.config).with_overrides(
        seed=args.seed, output_dir=args.out, rules_path=args.rules, format=args.format, lenient=args.lenient
    )
    manifest = run_generate(config)
    counts = manifest["counts"]
    log.info(
        "condition instances %d, ALFUS scores %d, mission instances %d, requests %d (approve %d / reject %d)",
        counts["condition_instances"],
        counts["alfus_scores"],
        counts["mission_instances"],
        counts["requests"],
        manifest["decisions"]["approve"],
        manifest["decisions"]["reject"],
    )
    return 0


def cmd_validate(args) -> int:
    config = load_config(args.config)
    if args.generate:
        build_world(config)
    else:
        load_rules(config.effective_rules_path)
    print(f"{args.config}: ok (config digest {config.digest()})")
    return 0


def cmd_stats(args) -> int:
    summary = run_stats(args.out)
    print(format_stats(summary))
    return 1 if summary["mismatches"] else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="coalgen", description=__doc__)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-q", "--quiet", action="store_true", help="suppress progress messages")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="generate and annotate a dataset")
    gen.add_argument("--config", required=True, help="JSON configuration file")
    gen.add_argument("--seed", type=int, help="override the configured seed")
    gen.add_argument("--out", help="output directory")
    gen.add_argument("--rules", help="rule document deciding approve/reject")
    gen.add_argument("--format", choices=FORMATS, help="which exports to write")
    gen.add_argument("--lenient", action="store_true", help="treat missing rule attributes as failed predicates")
    gen.set_defaults(func=cmd_generate)

    val = sub.add_parser("validate", help="check a configuration without writing anything")
    val.add_argument("--config", required=True)
    val.add_argument("--generate", action="store_true", help="also build the world in memory (referential checks)")
    val.set_defaults(func=cmd_validate)

    stats = sub.add_parser("stats", help="summarise a generated dataset")
    stats.add_argument("--out", required=True, help="output directory of a previous generate run")
    stats.set_defaults(func=cmd_stats)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.WARNING if args.quiet else logging.INFO,
        format="%(asctime)s %(levelname)s %(message)s",
        stream=sys.stderr,
    )
    try:
        return args.func(args)
    except CoalgenError as exc:
        return _report(exc)

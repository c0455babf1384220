"""``ghost-duality`` command line: pattern, eraser, sweep and validate subcommands.

Exit codes: 0 success, 1 usage/parse/I-O error, 2 domain error, 3 validation failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

from ..errors import ConfigError, GhostDualityError
from .commands import cmd_eraser, cmd_pattern, cmd_sweep, cmd_validate
from .config import parse_config

EXIT_OK, EXIT_PARSE, EXIT_DOMAIN, EXIT_VALIDATION = 0, 1, 2, 3

log = logging.getLogger("ghost_duality")


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on usage errors; 2 is reserved for domain errors here
    def error(self, message):
        raise _UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True, help="path to a key = value config file")
    common.add_argument("--out", help="output directory (overrides 'out' in the config)")
    common.add_argument("--workers", type=int, help="parallel sweep workers")
    common.add_argument("--seed", type=int, help="recorded in run.json; no stochastic step uses it yet")
    common.add_argument(
        "--set",
        action="append",
        default=[],
        metavar="KEY=VALUE",
        help="override a config value (repeatable)",
    )
    common.add_argument("-v", "--verbose", action="store_true")

    parser = _Parser(prog="ghost-duality", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("pattern", parents=[common], help="coincidence pattern and summary")
    eraser = sub.add_parser("eraser", parents=[common], help="eraser-projected patterns")
    eraser.add_argument("--basis", choices=("plus", "minus", "both"), default="both")
    sweep = sub.add_parser("sweep", parents=[common], help="summary row per parameter value")
    sweep.add_argument("--parameter", help="config key to sweep (overrides sweep_parameter)")
    sweep.add_argument("--values", help="comma-separated values (overrides sweep_values)")
    sub.add_parser("validate", parents=[common], help="oracle comparison suite")
    return parser


def _overrides(args) -> dict:
    out = {}
    for item in args.set:
        if "=" not in item:
            raise _UsageError(f"--set expects KEY=VALUE, got {item!r}")
        key, value = item.split("=", 1)
        out[key.strip()] = value.strip()
    for key in ("out", "workers", "seed"):
        value = getattr(args, key)
        if value is not None:
            out[key] = str(value)
    if getattr(args, "parameter", None):
        out["sweep_parameter"] = args.parameter
    if getattr(args, "values", None):
        out["sweep_values"] = args.values
    return out


def run(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        with open(args.config, encoding="utf-8") as fh:
            text = fh.read()
        cfg = parse_config(text, _overrides(args))
        if args.command == "pattern":
            res = cmd_pattern(cfg)
        elif args.command == "eraser":
            bases = ("plus", "minus") if args.basis == "both" else (args.basis,)
            res = cmd_eraser(cfg, bases)
        elif args.command == "sweep":
            res = cmd_sweep(cfg)
        else:
            res = cmd_validate(cfg)
    except (_UsageError, ConfigError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except GhostDualityError as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    for path in res.files:
        log.info("wrote %s", path)
    if args.command == "validate":
        for r in res.report:
            status = "PASS" if r["pass"] else "FAIL"
            bound = "<=" if r["kind"] == "max" else ">="
            print(f"{status} {r['check']}: {r['value']:.3e} {bound} {r['limit']:.1e}")
        return EXIT_OK if res.ok else EXIT_VALIDATION
    if args.command in ("pattern", "eraser"):
        print(json.dumps(res.summary, indent=2))
    return EXIT_OK


def main(argv=None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()

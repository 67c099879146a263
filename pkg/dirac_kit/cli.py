"""
dirac-kit command line.

    dirac-kit analyze --system NAME --action NAME [--params k=v ...] --out report.json
    dirac-kit verify --paper [--only CHECK]
    dirac-kit list-systems
    dirac-kit custom --file system.json --out report.json
    dirac-kit dump --system NAME --out system.json

Exit codes: 0 all checks pass, 1 a check failed, 2 input error, 3 rank abort.
"""

import argparse
import json
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

from loguru import logger

from . import systems_catalog
from .analysis import SCHEMA, AnalysisRunner, dump_report, report_failed
from .errors import DiracKitError, InputError
from .log_setup import setup_logging
from .settings import load_settings
from .system_config import SystemSetup, build_from_file, dump_document
from .verification import AcceptanceVerifier


def parse_params(items: Optional[Sequence[str]]) -> Dict[str, float]:
    """k=v pairs from the command line"""
    params = {}
    for item in items or []:
        key, sep, value = item.partition("=")
        if not sep or not key:
            raise InputError(f"parameter {item!r} is not of the form k=v")
        try:
            params[key.strip()] = float(value)
        except ValueError:
            raise InputError(f"parameter {key!r} needs a number, got {value!r}") from None
    return params


def _write(text: str, out: Optional[str]):
    if out is None:
        sys.stdout.write(text)
        return
    path = Path(out)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
    logger.info(f"Report written to {path}")


def _settings(args: argparse.Namespace) -> Dict[str, Any]:
    return load_settings(args.config, {"samples": args.samples, "seed": args.seed, "tol": args.tol,
                                       "n_jobs": args.jobs})


def _analyze_actions(setup: SystemSetup, actions: List[str], settings: Dict[str, Any]) -> Dict[str, Any]:
    reports = [AnalysisRunner(setup, name, settings).run() for name in actions]
    if len(reports) == 1:
        return reports[0]
    return {"schema": SCHEMA, "system": setup.name, "reports": reports}


def _failed(document: Dict[str, Any]) -> bool:
    return any(report_failed(r) for r in document.get("reports", [document]))


def cmd_analyze(args: argparse.Namespace) -> int:
    settings = _settings(args)
    setup = systems_catalog.load(args.system, parse_params(args.params),
                                 momentum_box=settings["momentum_box"], tol=settings["tol"])
    actions = [args.action] if args.action else list(setup.actions)
    document = _analyze_actions(setup, actions, settings)
    _write(dump_report(document), args.out)
    return 1 if _failed(document) else 0


def cmd_custom(args: argparse.Namespace) -> int:
    settings = _settings(args)
    setup = build_from_file(args.file, parse_params(args.params), settings["momentum_box"], settings["tol"])
    actions = [args.action] if args.action else list(setup.actions)
    document = _analyze_actions(setup, actions, settings)
    _write(dump_report(document), args.out)
    return 1 if _failed(document) else 0


def cmd_verify(args: argparse.Namespace) -> int:
    if not args.paper:
        raise InputError("verify needs --paper")
    verifier = AcceptanceVerifier(_settings(args))
    summary = verifier.run_all(args.only)
    _write(json.dumps(summary, indent=2, sort_keys=True, ensure_ascii=False) + "\n", args.out)
    logger.info(f"Acceptance: {summary['summary']['passed']}/{summary['summary']['total']} passed")
    return 1 if summary["summary"]["failed"] else 0


def cmd_list_systems(args: argparse.Namespace) -> int:
    for entry in systems_catalog.entries():
        params = ", ".join(f"{k}={v:g}" for k, v in entry["params"].items()) or "-"
        print(f"{entry['name']:<22} actions: {', '.join(entry['actions']):<26} params: {params}")
        print(f"{'':<22} {entry['description']}")
    return 0


def cmd_dump(args: argparse.Namespace) -> int:
    document = systems_catalog.document(args.system)
    if args.out is None:
        sys.stdout.write(json.dumps(document, indent=2) + "\n")
    else:
        logger.info(f"Wrote {dump_document(document, args.out)}")
    return 0


def _run_options(parser: argparse.ArgumentParser):
    parser.add_argument("--params", nargs="*", metavar="K=V", help="Physical parameters")
    parser.add_argument("--samples", type=int, help="Sample points per check")
    parser.add_argument("--seed", type=int, help="Random seed")
    parser.add_argument("--tol", type=float, help="Linear algebra tolerance")
    parser.add_argument("--jobs", type=int, help="Worker threads for per-sample work")
    parser.add_argument("--out", help="Report file (stdout when omitted)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dirac-kit", description="Dirac structure reduction toolkit")
    parser.add_argument("--config", help="Settings file (default config/dirac_kit.yaml)")
    parser.add_argument("--log-dir", help="Directory for the run log")
    parser.add_argument("--verbose", "-v", action="store_true", help="Verbose output")
    sub = parser.add_subparsers(dest="command", required=True)

    analyze = sub.add_parser("analyze", help="Analyze a catalog system")
    analyze.add_argument("--system", required=True, choices=systems_catalog.names())
    analyze.add_argument("--action", help="Action name (all actions when omitted)")
    _run_options(analyze)
    analyze.set_defaults(handler=cmd_analyze)

    custom = sub.add_parser("custom", help="Analyze a system description file")
    custom.add_argument("--file", required=True, help="JSON system description")
    custom.add_argument("--action", help="Action name (all actions when omitted)")
    _run_options(custom)
    custom.set_defaults(handler=cmd_custom)

    verify = sub.add_parser("verify", help="Run the acceptance suite")
    verify.add_argument("--paper", action="store_true", help="Catalog acceptance criteria")
    verify.add_argument("--only", choices=AcceptanceVerifier.verification_steps, help="Run a single criterion")
    _run_options(verify)
    verify.set_defaults(handler=cmd_verify)

    listing = sub.add_parser("list-systems", help="List catalog systems")
    listing.set_defaults(handler=cmd_list_systems)

    dump = sub.add_parser("dump", help="Write a catalog system as a description file")
    dump.add_argument("--system", required=True, choices=systems_catalog.names())
    dump.add_argument("--out", help="Output file (stdout when omitted)")
    dump.set_defaults(handler=cmd_dump)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    """主函数"""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return InputError.exit_code if exc.code else 0
    setup_logging(args.log_dir, args.verbose)
    try:
        return args.handler(args)
    except DiracKitError as exc:
        logger.error(f"{type(exc).__name__}: {exc}")
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())

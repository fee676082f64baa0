"""Batch command-line interface.

    pollcast forecast --votes votes.jsonl --official official.csv --registry registry.json
    pollcast validate --registry registry.json [--votes ...] [--official ...]
    pollcast export --store store.jsonl --out export.jsonl --salt SECRET
    pollcast serve --config service.json

Exit codes: 0 success, 1 parse/validation/storage errors, 2 insufficient
prior data for the requested method.
"""

from __future__ import annotations

import argparse
import json
import secrets
import signal
import socket
import sys

from .bias import DEFAULT_SMALL_CLASS_FLOOR, InsufficientPriorDataError
from .ingest import load_official_results, load_vote_log
from .pipeline import ForecastRun, MethodSpec, default_method_suite, run_forecast
from .registry import decimal_fraction, load_registry, validate_registry
from .store import CorruptLogError, ExportConfig, VoteStore, export_to_path

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_INSUFFICIENT_PRIOR = 2


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pollcast",
        description="Poll forecasting with prior-vote bias correction and seat apportionment.",
        epilog="Exit codes: 0 ok, 1 input/storage errors, 2 insufficient prior data.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    fc = sub.add_parser("forecast", help="run forecast variants over a vote log")
    fc.add_argument("--votes", required=True, help="vote log (JSON Lines)")
    fc.add_argument("--official", help="official prior-election results (CSV)")
    fc.add_argument("--registry", required=True, help="party registry (JSON)")
    fc.add_argument(
        "--method",
        action="append",
        help="raw | standardized | fixed[:G1,G2] (repeatable; default: the full suite)",
    )
    fc.add_argument("--groups", help="group ids for a bare 'fixed' method, e.g. AY,YH,AU,S")
    fc.add_argument("--seats", type=int, help="house size override")
    fc.add_argument("--threshold", help="threshold fraction override, e.g. 0.0325")
    fc.add_argument("--floor", type=int, default=DEFAULT_SMALL_CLASS_FLOOR,
                    help="small weight-class warning floor (default 30)")
    fc.add_argument("--format", choices=("table", "json"), default="table")

    va = sub.add_parser("validate", help="validate registry and data files")
    va.add_argument("--registry", required=True)
    va.add_argument("--votes")
    va.add_argument("--official")

    ex = sub.add_parser("export", help="write an obfuscated dataset from a store")
    ex.add_argument("--store", required=True, help="store file written by the service")
    ex.add_argument("--out", required=True, help="output path (JSON Lines)")
    ex.add_argument("--granularity", choices=("minute", "hour", "day", "month"), default="day")
    ex.add_argument("--regions", choices=("keep", "drop"), default="keep")
    ex.add_argument("--salt", help="pseudonym salt (random when omitted)")

    sv = sub.add_parser("serve", help="run the HTTP service")
    sv.add_argument("--config", required=True, help="service config (JSON)")

    return parser


def _parse_methods(args) -> list[MethodSpec] | None:
    if not args.method:
        return None
    return [MethodSpec.parse(text, args.groups) for text in args.method]


def _format_table(runs: list[ForecastRun], registry) -> str:
    parties = registry.parties_of(registry.current_election)
    # Parties as rows sorted by the first column's seats, methods as columns.
    order = sorted(
        parties,
        key=lambda p: (-runs[0].seats.get(p.code, 0), parties.index(p)),
    )
    name_width = max(len("Party"), max(len(p.display_name) for p in order)) if order else 5
    labels = [run.method.label for run in runs]
    widths = [max(len(label), 7) for label in labels]

    lines = []
    header = "Party".ljust(name_width) + "".join(
        f"  {label:>{w}}" for label, w in zip(labels, widths)
    )
    lines.append(header)
    lines.append("-" * len(header))
    for party in order:
        row = party.display_name.ljust(name_width)
        for run, w in zip(runs, widths):
            row += f"  {run.seats.get(party.code, 0):>{w}}"
        lines.append(row)
    lines.append("-" * len(header))
    total_row = "TOTAL".ljust(name_width)
    sample_row = "sample (devices)".ljust(name_width)
    for run, w in zip(runs, widths):
        total_row += f"  {sum(run.seats.values()):>{w}}"
        usable = run.total_devices if run.method.kind == "raw" else run.prior_devices
        sample_row += f"  {usable:>{w},}"
    lines.append(total_row)
    lines.append(sample_row)
    return "\n".join(lines)


def _runs_as_json(runs: list[ForecastRun]) -> str:
    return json.dumps(
        {
            "methods": [
                {
                    "method": {"kind": run.method.kind, "groups": list(run.method.groups)},
                    "house_size": run.house_size,
                    "votes": run.votes,
                    "seats": run.seats,
                    "vote_share": run.vote_share,
                    "sample": {
                        "total_devices": run.total_devices,
                        "prior_devices": run.prior_devices,
                    },
                }
                for run in runs
            ]
        },
        indent=2,
        sort_keys=False,
    )


def cmd_forecast(args) -> int:
    registry = load_registry(args.registry)
    violations = validate_registry(registry)
    if violations:
        for violation in violations:
            print(f"registry: {violation}", file=sys.stderr)
        return EXIT_ERROR

    records, errors = load_vote_log(args.votes, registry)
    if errors:
        for error in errors:
            print(f"{args.votes}: {error}", file=sys.stderr)
        return EXIT_ERROR

    official = None
    if args.official:
        official, off_errors = load_official_results(args.official, registry.prior_election)
        if off_errors:
            for error in off_errors:
                print(f"{args.official}: {error}", file=sys.stderr)
            return EXIT_ERROR

    methods = _parse_methods(args) or default_method_suite(registry)
    if official is None:
        methods = [m for m in methods if m.kind == "raw"]
        if not methods:
            print("standardized methods need --official", file=sys.stderr)
            return EXIT_ERROR

    threshold = decimal_fraction(args.threshold) if args.threshold is not None else None
    runs = []
    try:
        for method in methods:
            runs.append(
                run_forecast(
                    records,
                    registry,
                    official,
                    method,
                    house_size=args.seats,
                    threshold=threshold,
                    floor=args.floor,
                )
            )
    except InsufficientPriorDataError as exc:
        print(f"insufficient prior data: {exc}", file=sys.stderr)
        return EXIT_INSUFFICIENT_PRIOR
    except (KeyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR

    if args.format == "json":
        print(_runs_as_json(runs))
    else:
        print(_format_table(runs, registry))
    return EXIT_OK


def cmd_validate(args) -> int:
    clean = True
    registry = load_registry(args.registry)
    for violation in validate_registry(registry):
        print(f"{args.registry}: {violation}")
        clean = False

    if args.votes:
        _, errors = load_vote_log(args.votes, registry)
        for error in errors:
            print(f"{args.votes}: {error}")
            clean = False

    if args.official:
        _, errors = load_official_results(args.official, registry.prior_election)
        for error in errors:
            print(f"{args.official}: {error}")
            clean = False

    print("ok" if clean else "invalid")
    return EXIT_OK if clean else EXIT_ERROR


def cmd_export(args) -> int:
    salt = args.salt or secrets.token_hex(16)
    config = ExportConfig(salt=salt, granularity=args.granularity, region_mode=args.regions)
    try:
        store = VoteStore(args.store)
    except CorruptLogError as exc:
        print(f"{args.store}: {exc}", file=sys.stderr)
        return EXIT_ERROR
    try:
        records, _ = store.snapshot()
        count = export_to_path(records, config, args.out)
    finally:
        store.close()
    print(f"exported {count} records to {args.out}")
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    from .service import ServiceConfig, create_app

    with open(args.config, encoding="utf-8") as fh:
        cfg = json.load(fh)

    registry = load_registry(cfg["registry"])
    violations = validate_registry(registry)
    if violations:
        for violation in violations:
            print(f"registry: {violation}", file=sys.stderr)
        return EXIT_ERROR

    official = None
    if cfg.get("official"):
        official, errors = load_official_results(cfg["official"], registry.prior_election)
        if errors:
            for error in errors:
                print(f"{cfg['official']}: {error}", file=sys.stderr)
            return EXIT_ERROR

    rate = cfg.get("rate_limit", {})
    service_config = ServiceConfig(
        small_class_floor=cfg.get("floor", DEFAULT_SMALL_CLASS_FLOOR),
        rate_limit_enabled=rate.get("enabled", True),
        submits_per_minute=rate.get("submits_per_minute", 30),
    )
    host = cfg.get("host", "127.0.0.1")
    port = int(cfg.get("port", 8080))

    # Check the bind up front so a taken port is a clean exit 1.
    try:
        probe = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
        probe.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        probe.bind((host, port))
        probe.close()
    except OSError as exc:
        print(f"cannot bind {host}:{port}: {exc}", file=sys.stderr)
        return EXIT_ERROR

    store = VoteStore(cfg["store"])
    app = create_app(registry, store, official, service_config, static_dir=cfg.get("static_dir"))
    # uvicorn re-raises the terminating signal after its graceful shutdown;
    # turn that into the documented clean exit instead of dying by signal.
    signal.signal(signal.SIGTERM, lambda *_: sys.exit(EXIT_OK))
    try:
        uvicorn.run(app, host=host, port=port, log_level=cfg.get("log_level", "info"))
    except KeyboardInterrupt:
        pass
    finally:
        store.close()
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    handlers = {
        "forecast": cmd_forecast,
        "validate": cmd_validate,
        "export": cmd_export,
        "serve": cmd_serve,
    }
    try:
        return handlers[args.command](args)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except CorruptLogError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())

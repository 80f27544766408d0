"""Command line entry point.

Subcommands: validate, run, analyze, serve. Exit codes: 0 success,
1 validation errors (including unparseable documents), 2 runtime error,
3 bad invocation. ``--format doc`` emits the same structured documents the
session service serves, so tooling can consume either surface.

Trace files are text: one event per line, ``tick<TAB>method<TAB>params``
with JSON params, e.g. ``5\tgesture\t{"kind": "touch", "target": "campfire",
"position": [0, 0, 0]}``. Blank lines and ``#`` comments are skipped.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from typing import Any

from . import __version__
from .analysis import AnalysisError, analyze
from .engine import EngineError, InvalidScenario, run_trace
from .format import FormatError, load_scenario, validate_scenario
from .inputs import RawInputEvent
from .model import ModelError, Position
from .service.app import DEFAULT_HOST, DEFAULT_PORT

LOG_ENV = "CAUSALDECK_LOG"

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_RUNTIME = 2
EXIT_USAGE = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # exit 3 on bad invocation
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def parse_trace_line(line: str, lineno: int) -> RawInputEvent:
    parts = line.split("\t")
    if len(parts) != 3:
        raise ValueError(f"trace line {lineno}: expected tick<TAB>method<TAB>params")
    tick = int(parts[0])
    method = parts[1]
    params = json.loads(parts[2])
    if method == "device":
        return RawInputEvent.device(tick, params["symbol"])
    if method == "language":
        return RawInputEvent.language(tick, params["utterance"])
    if method == "gesture":
        return RawInputEvent.body(
            tick, params["kind"],
            Position(*params.get("position", (0.0, 0.0, 0.0))),
            target=params.get("target"),
            gaze=tuple(params["gaze"]) if "gaze" in params else None,
        )
    raise ValueError(f"trace line {lineno}: unknown method {method!r}")


def load_trace(path: str) -> list[RawInputEvent]:
    events: list[RawInputEvent] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            events.append(parse_trace_line(line, lineno))
    return events


def _num(v: float) -> str:
    return str(int(v)) if float(v).is_integer() else str(v)


def _print_doc(doc: dict[str, Any]) -> None:
    print(json.dumps(doc, ensure_ascii=False, sort_keys=True, indent=2))


def cmd_validate(args: argparse.Namespace) -> int:
    scenario = load_scenario(args.file)
    diagnostics = validate_scenario(scenario)
    errors = sum(1 for d in diagnostics if d.severity == "error")
    warnings = len(diagnostics) - errors
    if args.format == "doc":
        _print_doc({
            "kind": "validate",
            "ok": errors == 0,
            "errors": errors,
            "warnings": warnings,
            "diagnostics": [vars(d) for d in diagnostics],
        })
    else:
        for d in diagnostics:
            print(d)
        print(f"{errors} errors, {warnings} warnings")
    return EXIT_VALIDATION if errors else EXIT_OK


def cmd_run(args: argparse.Namespace) -> int:
    scenario = load_scenario(args.file)
    trace = load_trace(args.trace) if args.trace else []
    log = run_trace(scenario, trace, args.horizon, args.seed)
    text = log.export()
    if args.log:
        with open(args.log, "w", encoding="utf-8") as fh:
            fh.write(text)
        if args.format == "doc":
            _print_doc({"kind": "run", "records": len(log.records), "path": args.log})
        else:
            print(f"wrote {len(log.records)} records to {args.log}")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_analyze(args: argparse.Namespace) -> int:
    scenario = load_scenario(args.file)
    doc = analyze(scenario, args.kind, args.cell)
    if args.format == "doc":
        _print_doc(doc)
        return EXIT_OK
    if args.kind == "chains":
        print(f"chains: count={doc['count']} M={_num(doc['median'])} "
              f"MAD={_num(doc['mad'])} max={doc['max']}"
              + (" (truncated)" if doc["truncated"] else ""))
        for chain in doc["chains"]:
            print("  " + " -> ".join(chain["actions"]) + f" (length {chain['length']})")
    elif args.kind == "cycles":
        print(f"cycles: {doc['count']}")
        for cyc in doc["cycles"]:
            print("  " + " -> ".join(cyc["links"]))
    elif args.kind == "reach":
        total = len(doc["reachable"]) + len(doc["unreachable"])
        print(f"reachable: {len(doc['reachable'])} of {total}")
        for aid in doc["reachable"]:
            print(f"  + {aid}")
        for aid in doc["unreachable"]:
            print(f"  - {aid}")
    else:
        print(doc["text"])
        for disc in doc["discs"]:
            print(f"legend: {disc['agent']}/{disc['action']} r={_num(disc['radius'])}")
        for warning in doc["warnings"]:
            print(f"warning: {warning}")
    return EXIT_OK


def cmd_serve(args: argparse.Namespace) -> int:
    from .service.app import run_server

    run_server(host=args.host, port=args.port, studio_dir=args.studio_dir)
    return EXIT_OK


def build_parser() -> _Parser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=["text", "doc"], default="text",
                        help="human text or structured document output")

    parser = _Parser(
        prog="causaldeck",
        description="Deterministic trigger-action narrative engine.",
        epilog="exit codes: 0 ok, 1 validation errors, 2 runtime error, 3 bad invocation",
    )
    parser.add_argument("--version", action="version", version=f"causaldeck {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("validate", parents=[common], help="check a scenario document")
    p.add_argument("file")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("run", parents=[common], help="run a trace headlessly")
    p.add_argument("file")
    p.add_argument("--trace", help="trace file (tick<TAB>method<TAB>json-params per line)")
    p.add_argument("--horizon", type=int, required=True, help="ticks to simulate")
    p.add_argument("--seed", type=int, default=None, help="RNG seed (default: scenario's)")
    p.add_argument("--log", help="write the event log here instead of stdout")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("analyze", parents=[common], help="static analyses over a scenario")
    p.add_argument("file")
    p.add_argument("--kind", choices=["chains", "cycles", "reach", "spatialmap"], required=True)
    p.add_argument("--cell", type=float, default=1.0, help="spatial map cell size")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("serve", parents=[common], help="start the session service")
    p.add_argument("--host", default=DEFAULT_HOST)
    p.add_argument("--port", type=int, default=DEFAULT_PORT)
    p.add_argument("--studio-dir", default=None, help="serve a built studio UI from this dir")
    p.set_defaults(func=cmd_serve)
    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(
        level=getattr(logging, os.environ.get(LOG_ENV, "WARNING").upper(), logging.WARNING))
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InvalidScenario as exc:
        for d in exc.diagnostics:
            print(d, file=sys.stderr)
        return EXIT_VALIDATION
    except FormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (EngineError, AnalysisError, ModelError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()

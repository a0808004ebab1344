"""Command-line interface: check, simulate, cluster, serve.

Exit codes: 0 success, 1 usage/configuration error, 2 model or input-file
validation error, 3 I/O error. Diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from . import __version__
from .analysis import ClusterConfig, cluster
from .export import ExportFormatError, build_document, load_document, windows_from_document, write_document
from .parser import ParseError, format_pattern, parse_model
from .server import parse_mode, serve
from .simulate import ConfigError, SimConfig, run

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INVALID = 2
EXIT_IO = 3

DEFAULT_PORT_ENV = "DINSIM_PORT"


class _UsageError(Exception):
    pass


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message):  # noqa: D102 - argparse hook
        raise _UsageError(message)


def _build_parser() -> _ArgumentParser:
    parser = _ArgumentParser(prog="dinsim", description=__doc__)
    parser.add_argument("--version", action="version", version=f"dinsim {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_check = sub.add_parser("check", help="parse and validate a model file")
    p_check.add_argument("model", help="model file (.ka)")

    p_sim = sub.add_parser("simulate", help="run a simulation and write an export file")
    p_sim.add_argument("model", help="model file (.ka)")
    p_sim.add_argument("--t-end", type=float, required=True, help="simulated time horizon")
    p_sim.add_argument("--tau", type=float, required=True, help="influence window length")
    p_sim.add_argument("--din", choices=("activity", "probability"), default="activity",
                       help="which influence kind the export carries")
    p_sim.add_argument("--seed", type=int, default=0, help="random stream seed")
    p_sim.add_argument("--obs-sample", type=float, default=None, help="observable sampling period (default: tau)")
    p_sim.add_argument("--max-events", type=int, default=None, help="hard cap on event count")
    p_sim.add_argument("--trace", default=None, help="write a line-delimited event trace here")
    p_sim.add_argument("--out", required=True, help="export file to write")

    p_cl = sub.add_parser("cluster", help="print a clustering of an exported run")
    p_cl.add_argument("file", help="export file")
    p_cl.add_argument("--threshold", type=float, required=True, help="cluster threshold on |influence|")
    p_cl.add_argument("--mode", default="step", help="step | window:N | global")
    p_cl.add_argument("--at", type=int, default=0, help="window index")
    p_cl.add_argument("--pinned", default="", help="comma-separated rule ids excluded from clustering")
    p_cl.add_argument("--json", action="store_true", help="structured output")

    p_srv = sub.add_parser("serve", help="serve an exported run over HTTP")
    p_srv.add_argument("file", help="export file")
    p_srv.add_argument("--port", type=int, default=None,
                       help=f"listen port (default: ${DEFAULT_PORT_ENV} or 8000)")
    p_srv.add_argument("--host", default="127.0.0.1")
    p_srv.add_argument("--ui", default=None, help="static UI bundle directory")
    return parser


def _load_model(path: str):
    return parse_model(Path(path).read_text(encoding="utf-8"))


def _cmd_check(args) -> int:
    model = _load_model(args.model)
    print(f"{args.model}: ok")
    print(f"agents ({len(model.signatures)}):")
    for sig in model.signatures:
        sites = ", ".join(
            s.name + ("{" + " ".join(s.states) + "}" if s.states else "") for s in sig.sites
        )
        print(f"  {sig.name}({sites})")
    print(f"rules ({len(model.rules)}):")
    for i, rule in enumerate(model.rules):
        print(
            f"  [{i}] '{rule.name}' {format_pattern(rule.lhs)} -> "
            f"{format_pattern(rule.rhs)} @ {rule.rate!r}"
        )
    print(f"init declarations: {len(model.init)}")
    print(f"observables: {len(model.observables)}")
    return EXIT_OK


def _cmd_simulate(args) -> int:
    model = _load_model(args.model)
    config = SimConfig(
        t_end=args.t_end,
        tau=args.tau,
        din_kind=args.din,
        seed=args.seed,
        obs_sample=args.obs_sample,
        max_events=args.max_events,
        trace_path=args.trace,
    )
    config.validate()
    result = run(model, config)
    doc = build_document(model, result, Path(args.model).stem)
    write_document(doc, args.out)
    stats = result.event_stats
    print(
        f"{args.out}: {stats['events']} events ({stats['null_events']} null), "
        f"status {stats['status']}, {len(doc['windows'])} windows",
        file=sys.stderr,
    )
    return EXIT_OK


def _cmd_cluster(args) -> int:
    doc = load_document(args.file)
    windows = windows_from_document(doc)
    if not 0 <= args.at < len(windows):
        raise _UsageError(f"--at {args.at} out of range (0..{len(windows) - 1})")
    mode_name, half_width = parse_mode(args.mode)
    pinned = frozenset(int(p) for p in args.pinned.split(",") if p)
    config = ClusterConfig(args.threshold, mode_name, half_width, pinned)
    config.validate()
    clustering = cluster(windows, args.at, config)
    names = {r["id"]: r["name"] for r in doc["meta"]["rules"]}
    clustered = set(clustering.assignment)
    unclustered = sorted(set(names) - clustered)
    if args.json:
        import json

        print(
            json.dumps(
                {
                    "window": args.at,
                    "threshold": args.threshold,
                    "mode": args.mode,
                    "clusters": [list(c) for c in clustering.clusters],
                    "unclustered": unclustered,
                },
                indent=2,
            )
        )
    else:
        print(f"window {args.at} [{windows[args.at].t_start}, {windows[args.at].t_end}]"
              f" threshold {args.threshold} mode {args.mode}")
        if not clustering.clusters:
            print("no clusters")
        for c in clustering.clusters:
            print(f"  cluster {c[0]}: " + ", ".join(f"'{names[r]}'" for r in c))
        if unclustered:
            print("  unclustered: " + ", ".join(f"'{names[r]}'" for r in unclustered))
    return EXIT_OK


def _cmd_serve(args) -> int:
    doc = load_document(args.file)
    port = args.port
    if port is None:
        port = int(os.environ.get(DEFAULT_PORT_ENV, "8000"))
    ui_dir = args.ui
    if ui_dir is None:
        packaged = Path(__file__).parent / "static"
        if packaged.is_dir():
            ui_dir = packaged
    print(f"serving {args.file} on http://{args.host}:{port}/", file=sys.stderr)
    serve(doc, port, host=args.host, ui_dir=ui_dir)
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "check":
            return _cmd_check(args)
        if args.command == "simulate":
            return _cmd_simulate(args)
        if args.command == "cluster":
            return _cmd_cluster(args)
        if args.command == "serve":
            return _cmd_serve(args)
        raise _UsageError(f"unknown command {args.command!r}")
    except _UsageError as e:
        print(f"dinsim: usage error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except ParseError as e:
        print(f"dinsim: {e} [{e.category}]", file=sys.stderr)
        return EXIT_INVALID
    except ExportFormatError as e:
        print(f"dinsim: {e}", file=sys.stderr)
        return EXIT_INVALID
    except (ConfigError, ValueError) as e:
        print(f"dinsim: usage error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as e:
        print(f"dinsim: i/o error: {e}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())

"""Command line entry point: ``ernchain build|reason|bench|validate``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .bench import run_bench, synthetic_ern
from .builder import build_from_files, load_catalog, load_ern, load_topology, validate_document
from .ern import DEFAULT_QUEUE_CAPACITY, ErnError, ValidationError
from .export import RenderOptions, report_json, to_dot
from .ingest import DEFAULT_MERGE_WINDOW, IngestStats, SignatureMap, preprocess, read_alerts
from .reasoner import Mode, ReasonerSession, merge_chains

log = logging.getLogger("ernchain")


def _fail(message: str, code: int = 2) -> int:
    print(f"error: {message}", file=sys.stderr)
    return code


def _write(text: str, path: str | None) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def cmd_build(topology_path, catalog_path, out_path=None,
              k: int = DEFAULT_QUEUE_CAPACITY) -> int:
    ern = build_from_files(topology_path, catalog_path, k)
    _write(ern.dumps(), out_path)
    print(f"{len(ern.vertices)} vertices, {len(ern.links)} links", file=sys.stderr)
    return 0


def run_pipeline(ern_path, alerts_path, sigmap_path, mode: str = "untimed",
                 merge_window: float = DEFAULT_MERGE_WINDOW):
    """Build a session from files and feed it. Returns (session, stats)."""
    ern = load_ern(ern_path)
    sigmap = SignatureMap.load(sigmap_path)
    sigmap.validate_against(ern)
    stats = IngestStats()
    if alerts_path in (None, "-"):
        raws = read_alerts(sys.stdin, stats)
    else:
        with open(alerts_path) as fh:
            raws = read_alerts(fh, stats)
    evidences, stats = preprocess(raws, ern, sigmap, merge_window, stats)
    session = ReasonerSession(ern, Mode(mode))
    session.feed_all(evidences)
    return session, stats


def session_stats(session: ReasonerSession) -> dict:
    return {
        "mode": session.mode.value,
        "processed": session.processed_count,
        "skipped": session.skipped_count,
        "virtual": session.virtual_count,
        "promoted": session.promoted_count,
    }


def cmd_reason(ern_path, alerts_path, sigmap_path, mode="untimed", out_json=None,
               out_dot=None, merge_window=DEFAULT_MERGE_WINDOW, merge=False) -> int:
    session, stats = run_pipeline(ern_path, alerts_path, sigmap_path, mode, merge_window)
    chains = session.chains()
    if merge:
        chains = merge_chains(chains)
    _write(report_json(chains, stats, session_stats(session)), out_json)
    if out_dot:
        _write(to_dot(chains, RenderOptions(include_weights=True)), out_dot)
    print(f"ingest: {json.dumps(stats.to_dict(), sort_keys=True)}", file=sys.stderr)
    print(f"{len(chains)} chain(s)", file=sys.stderr)
    return 0


def cmd_bench(ern_path, n_events: int, seed: int = 0, vertices: int = 100) -> int:
    if n_events <= 0:
        raise ValidationError(f"--events must be positive, got {n_events}")
    ern = load_ern(ern_path) if ern_path else synthetic_ern(vertices, seed)
    stats = run_bench(ern, n_events, seed)
    print(json.dumps(stats.to_dict(), indent=2, sort_keys=True))
    return 0


def cmd_validate(args) -> int:
    problems: list[str] = []
    checked = 0

    def check(label, fn):
        nonlocal checked
        checked += 1
        try:
            fn()
        except (ValidationError, OSError, json.JSONDecodeError) as exc:
            items = exc.problems if isinstance(exc, ValidationError) else [str(exc)]
            problems.extend(f"{label}: {p}" for p in items)

    if args.topology:
        check(args.topology, lambda: load_topology(args.topology))
    if args.catalog:
        check(args.catalog, lambda: load_catalog(args.catalog))
    if args.topology and args.catalog and not problems:
        check("build", lambda: build_from_files(args.topology, args.catalog))
    if args.ern:
        check(args.ern, lambda: load_ern(args.ern))
    if args.sigmap:
        check(args.sigmap, lambda: SignatureMap.load(args.sigmap))
    if args.alerts:
        def alerts():
            with open(args.alerts) as fh:
                for n, line in enumerate(fh, 1):
                    if line.strip():
                        try:
                            validate_document(json.loads(line), "alert")
                        except json.JSONDecodeError as exc:
                            raise ValidationError(f"line {n}: {exc}") from None
                        except ValidationError as exc:
                            raise ValidationError([f"line {n}: {p}" for p in exc.problems]) from None
        check(args.alerts, alerts)
    if not checked:
        return _fail("nothing to validate")
    for p in problems:
        print(p, file=sys.stderr)
    if problems:
        return 1
    print("ok", file=sys.stderr)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ernchain", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="build an ERN from topology and catalog files")
    p.add_argument("--topology", required=True)
    p.add_argument("--catalog", required=True)
    p.add_argument("--out", default=None, help="output path (default stdout)")
    p.add_argument("--queue-capacity", type=int, default=DEFAULT_QUEUE_CAPACITY)

    p = sub.add_parser("reason", help="correlate alerts into evidence chains")
    p.add_argument("--ern", required=True)
    p.add_argument("--alerts", default="-", help="NDJSON alert file, '-' for stdin")
    p.add_argument("--sigmap", required=True)
    p.add_argument("--mode", choices=[m.value for m in Mode], default=Mode.UNTIMED.value)
    p.add_argument("--merge-window", type=float, default=DEFAULT_MERGE_WINDOW,
                   help="duplicate merge window in seconds")
    p.add_argument("--merge", action="store_true", help="merge chains sharing records")
    p.add_argument("--out", default=None, help="JSON report path (default stdout)")
    p.add_argument("--dot", default=None, help="write a DOT graph here")

    p = sub.add_parser("bench", help="replay seeded synthetic evidence and time it")
    p.add_argument("--ern", default=None, help="ERN file (default: synthetic DAG)")
    p.add_argument("--vertices", type=int, default=100,
                   help="size of the synthetic ERN when --ern is absent")
    p.add_argument("--events", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("validate", help="schema-check input files")
    for flag in ("--topology", "--catalog", "--ern", "--sigmap", "--alerts"):
        p.add_argument(flag, default=None)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        if args.command == "build":
            return cmd_build(args.topology, args.catalog, args.out, args.queue_capacity)
        if args.command == "reason":
            return cmd_reason(args.ern, args.alerts, args.sigmap, args.mode, args.out,
                              args.dot, args.merge_window, args.merge)
        if args.command == "bench":
            return cmd_bench(args.ern, args.events, args.seed, args.vertices)
        return cmd_validate(args)
    except ValidationError as exc:
        for p in exc.problems:
            print(f"error: {p}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        return _fail(f"file not found: {exc.filename}", 1)
    except (ErnError, json.JSONDecodeError) as exc:
        return _fail(str(exc), 1)


if __name__ == "__main__":
    sys.exit(main())

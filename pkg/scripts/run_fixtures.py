"""Reason over every scenario fixture in both modes and print a summary.

    python3 scripts/run_fixtures.py [--show-chains]
"""
import argparse
import logging
from pathlib import Path

from ernchain.cli import run_pipeline
from ernchain.ingest import format_ts
from ernchain.reasoner import merge_chains

FIXTURES = Path(__file__).resolve().parents[1] / "fixtures"
RUNS = [
    ("lldos1", "alerts.jsonl"),
    ("lldos1", "alerts-missing-ftp.jsonl"),
    ("lldos2", "alerts.jsonl"),
    ("treasure/alpha", "alerts.jsonl"),
    ("treasure/omega", "alerts.jsonl"),
]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--show-chains", action="store_true")
    args = ap.parse_args()
    logging.basicConfig(level=logging.ERROR)

    header = f"{'fixture':<40} {'mode':<8} {'chains':>6} {'merged':>6} {'virtual':>7} {'confidence':>10}"
    print(header)
    print("-" * len(header))
    for name, alerts in RUNS:
        d = FIXTURES / name
        for mode in ("timed", "untimed"):
            session, _ = run_pipeline(d / "ern.json", d / alerts, d / "sigmap.json", mode)
            chains = session.chains()
            merged = merge_chains(chains)
            conf = ", ".join(f"{c.confidence:.4f}" for c in merged)
            label = f"{name}/{alerts}"
            print(f"{label:<40} {mode:<8} {len(chains):>6} {len(merged):>6} "
                  f"{session.virtual_count:>7} {conf:>10}")
            if args.show_chains:
                for c in merged:
                    for r in c.records:
                        mark = " (virtual)" if r.is_virtual else ""
                        print(f"    {format_ts(r.ts)}  {r.vertex_id}{mark}")


if __name__ == "__main__":
    main()

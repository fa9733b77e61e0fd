"""Throughput and per-event cost as the ERN grows.

    python3 scripts/bench_scaling.py [--sizes 100 1000 10000] [--events 10000]
"""
import argparse

from ernchain.bench import run_bench, synthetic_ern
from ernchain.reasoner import Mode


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sizes", type=int, nargs="+", default=[100, 1000, 10_000])
    ap.add_argument("--events", type=int, default=10_000)
    ap.add_argument("--repeats", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    header = (f"{'vertices':>8} {'links':>7} {'mode':<8} {'events/s':>10} "
              f"{'us/event':>9} {'chains':>7}")
    print(header)
    print("-" * len(header))
    for n in args.sizes:
        ern = synthetic_ern(n, args.seed)
        for mode in Mode:
            runs = [run_bench(ern, args.events, args.seed + r, mode) for r in range(args.repeats)]
            best = max(runs, key=lambda s: s.events_per_second)
            print(f"{best.vertices:>8} {best.links:>7} {mode.value:<8} "
                  f"{best.events_per_second:>10.0f} {1e6 / best.events_per_second:>9.1f} "
                  f"{best.chains:>7}")


if __name__ == "__main__":
    main()

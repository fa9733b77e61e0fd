"""Acceptance criteria 1-10. Each test records one PASS/FAIL line, printed
in the terminal summary (see conftest.py).

Run alone with ``pytest tests/test_acceptance.py`` or
``python3 tests/test_acceptance.py``.
"""

import itertools
import json
import os
import random
import subprocess
import sys
import time

import pytest

from ernchain.bench import run_bench, synthetic_ern
from ernchain.builder import IMPACT_WEIGHTS, build_from_files, impact_category_weight
from ernchain.cli import main, run_pipeline
from ernchain.ern import And, Leaf, evaluate_logic
from ernchain.reasoner import Mode, ReasonerSession, chain_violations, merge_chains
from ernchain.synth import complete_walk, random_dag_ern, random_events, random_logic

from conftest import FIXTURES, ROOT, SCENARIOS, record_criterion


def check(number, title, ok, detail=""):
    record_criterion(number, title, bool(ok), detail)
    assert ok, detail


def fixture_session(name, mode="untimed", alerts="alerts.jsonl"):
    d = FIXTURES / name
    session, _ = run_pipeline(d / "ern.json", d / alerts, d / "sigmap.json", mode)
    return session


def test_01_fig5_build(capsys):
    d = FIXTURES / "fig5"
    t0 = time.perf_counter()
    code = main(["build", "--topology", str(d / "topology.json"),
                 "--catalog", str(d / "catalog.json")])
    elapsed = time.perf_counter() - t0
    out, err = capsys.readouterr()
    doc = json.loads(out)
    n, e = len(doc["vertices"]), len(doc["links"])
    check(1, "fig5 build: 10 vertices, 11 links, < 1 s",
          code == 0 and (n, e) == (10, 11) and elapsed < 1.0,
          f"{n} vertices, {e} links in {elapsed:.3f}s")


def test_02_impact_weights():
    expected = [1.0, 0.8, 0.6, 0.5, 0.4, 0.2, 0.1, 0.0]
    got = [impact_category_weight(c) for c in range(1, 9)]
    check(2, "impact category weights exact", got == expected and len(IMPACT_WEIGHTS) == 8,
          f"got {got}")


def test_03_complete_trace_confidence():
    session = fixture_session("lldos1")
    merged = merge_chains(session.chains())
    conf = [c.confidence for c in merged]
    check(3, "complete trace: one merged chain, confidence 1.0",
          len(merged) == 1 and conf[0] == 1.0 and merged[0].virtual_count == 0,
          f"{len(merged)} chain(s), confidences {conf}")


def test_04_virtual_degradation():
    session = fixture_session("lldos2")
    merged = merge_chains(session.chains())
    c = merged[0]
    ok = (len(merged) == 1 and c.virtual_count == 1
          and abs(c.real_weight - 4.3) < 1e-9 and abs(c.virtual_weight - 0.7) < 1e-9
          and abs(c.confidence - 0.86) <= 1e-9)
    check(4, "withheld step: one virtual record, confidence 0.86 +- 1e-9", ok,
          f"{len(merged)} chain(s), virtual={c.virtual_count}, w={c.real_weight:.12g}, "
          f"w'={c.virtual_weight:.12g}, confidence={c.confidence:.12g}")


def test_05_timed_untimed_equivalence():
    rng = random.Random(20240501)
    t0 = time.perf_counter()
    trials, failures = 1000, []
    for i in range(trials):
        ern = random_dag_ern(rng.randint(1, 30), rng)
        walk = complete_walk(ern, rng, rng.randint(1, 60))
        keys, confs = [], []
        for mode in Mode:
            ern.reset_queues()
            s = ReasonerSession(ern, mode)
            s.feed_all(walk)
            chains = s.chains()
            keys.append([c.key() for c in chains])
            confs += [c.confidence for c in chains]
        if keys[0] != keys[1] or any(c != 1.0 for c in confs):
            failures.append(i)
    elapsed = time.perf_counter() - t0
    check(5, "timed/untimed equivalence on 1000 complete walks, < 60 s",
          not failures and elapsed < 60,
          f"{len(failures)} counterexample(s) {failures[:5]}, {elapsed:.1f}s")


def _oracle(expr, truth):
    if isinstance(expr, Leaf):
        return truth[expr.link_id]
    results = [_oracle(c, truth) for c in expr.children]
    return all(results) if isinstance(expr, And) else any(results)


def test_06_logic_oracle():
    rng = random.Random(6)
    mismatches = checked = 0
    for _ in range(500):
        leaves = [f"l{i}" for i in range(rng.randint(1, 10))]
        expr = random_logic(leaves, rng)
        for bits in itertools.product((False, True), repeat=len(leaves)):
            truth = dict(zip(leaves, bits))
            checked += 1
            mismatches += evaluate_logic(expr, truth) != _oracle(expr, truth)
    check(6, "logic evaluation vs truth tables (500 expressions)", mismatches == 0,
          f"{mismatches} mismatches over {checked} assignments")


def test_07_throughput_floor(capsys):
    t0 = time.perf_counter()
    code = main(["bench", "--vertices", "100", "--events", "10000", "--seed", "0"])
    elapsed = time.perf_counter() - t0
    stats = json.loads(capsys.readouterr().out)
    eps = stats["events_per_second"]
    check(7, "throughput >= 100 events/s (100 vertices, 10000 events)",
          code == 0 and stats["events_processed"] == 10_000 and eps >= 100 and elapsed < 100,
          f"{eps:.0f} events/s, {elapsed:.2f}s total")


@pytest.mark.slow
def test_08_linear_scaling():
    sizes = [100, 1000, 10_000]
    xs, ys = [], []
    for n in sizes:
        ern = synthetic_ern(n, seed=8)
        best = min((lambda s: (s.per_stage["reason"] + s.per_stage["chains"])
                    / s.events_processed)(run_bench(ern, 10_000, seed=r)) for r in range(3))
        xs.append(len(ern.vertices) + len(ern.links))
        ys.append(best)
    # least-squares line y = a + b x
    mx, my = sum(xs) / len(xs), sum(ys) / len(ys)
    b = sum((x - mx) * (y - my) for x, y in zip(xs, ys)) / sum((x - mx) ** 2 for x in xs)
    a = my - b * mx
    fit = [a + b * x for x in xs]
    within = all(f > 0 and y <= 2 * f for y, f in zip(ys, fit))
    # growth no faster than the size itself
    sublinear = ys[-1] / ys[0] <= 2 * xs[-1] / xs[0]
    detail = ", ".join(f"N+E={x}: {y * 1e6:.1f}us (fit {f * 1e6:.1f}us)"
                       for x, y, f in zip(xs, ys, fit))
    check(8, "per-event time within 2x of a linear fit over N+E", within and sublinear, detail)


def _random_runs(count=200):
    rng = random.Random(9)
    for _ in range(count):
        ern = random_dag_ern(rng.randint(1, 30), rng, k=rng.randint(1, 8))
        for mode in Mode:
            ern.reset_queues()
            s = ReasonerSession(ern, mode)
            s.feed_all(random_events(ern, rng, rng.randint(1, 90)))
            yield s


def test_09_chain_validity():
    sessions = [fixture_session(n, m) for n in SCENARIOS for m in ("timed", "untimed")]
    sessions.append(fixture_session("lldos1", alerts="alerts-missing-ftp.jsonl"))
    violations, chains = [], 0
    for s in itertools.chain(sessions, _random_runs()):
        found = s.chains()
        for c in found + merge_chains(found):
            chains += 1
            violations += chain_violations(s.ern, c)
    check(9, "chain validity invariants on fixtures and random runs", not violations,
          f"{len(violations)} violation(s) over {chains} chains {violations[:3]}")


def _cli_outputs(name, seed):
    d = FIXTURES / name
    env = dict(os.environ, PYTHONHASHSEED=str(seed))
    cmd = [sys.executable, "-m", "ernchain.cli", "reason", "--ern", d / "ern.json",
           "--alerts", d / "alerts.jsonl", "--sigmap", d / "sigmap.json",
           "--dot", "/dev/stdout"]
    out = subprocess.run([str(c) for c in cmd], capture_output=True, env=env, cwd=ROOT,
                         check=True).stdout
    return out


def test_10_determinism():
    differing = []
    for name in SCENARIOS:
        runs = {_cli_outputs(name, seed) for seed in (0, 1, 12345)}
        if len(runs) != 1:
            differing.append(name)
    ern_bytes = {build_from_files(FIXTURES / "fig5/topology.json",
                                  FIXTURES / "fig5/catalog.json").dumps() for _ in range(3)}
    if len(ern_bytes) != 1:
        differing.append("fig5 build")
    check(10, "byte-identical reports and DOT across repeated runs", not differing,
          f"differing: {differing}" if differing else f"{len(SCENARIOS)} scenarios x 3 runs")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))

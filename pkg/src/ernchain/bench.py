"""Replay synthetic evidence through an untimed session and time it."""

from __future__ import annotations

import random
import time
from dataclasses import asdict, dataclass, field

from .ern import Ern, ValidationError
from .reasoner import Mode, ReasonerSession
from .synth import random_dag_ern, random_events


@dataclass
class ThroughputStats:
    events_processed: int
    wall_time: float
    events_per_second: float
    per_stage: dict[str, float] = field(default_factory=dict)
    vertices: int = 0
    links: int = 0
    chains: int = 0

    def to_dict(self) -> dict:
        return asdict(self)


def run_bench(ern: Ern, n_events: int, seed: int = 0,
              mode: Mode = Mode.UNTIMED) -> ThroughputStats:
    """Generate ``n_events`` seeded random events, reason over them and
    generate chains. Wall time covers reasoning plus chain generation."""
    if n_events <= 0:
        raise ValidationError(f"n_events must be positive, got {n_events}")
    ern.reset_queues()
    t0 = time.perf_counter()
    events = random_events(ern, random.Random(seed), n_events)
    t1 = time.perf_counter()
    session = ReasonerSession(ern, mode)
    for e in events:
        session.feed(e)
    t2 = time.perf_counter()
    chains = session.chains()
    t3 = time.perf_counter()
    wall = t3 - t1
    return ThroughputStats(
        events_processed=session.processed_count,
        wall_time=wall,
        events_per_second=session.processed_count / wall if wall > 0 else float("inf"),
        per_stage={"generate": t1 - t0, "reason": t2 - t1, "chains": t3 - t2},
        vertices=len(ern.vertices),
        links=len(ern.links),
        chains=len(chains),
    )


def synthetic_ern(n_vertices: int, seed: int = 0, **kw) -> Ern:
    return random_dag_ern(n_vertices, random.Random(seed), **kw)

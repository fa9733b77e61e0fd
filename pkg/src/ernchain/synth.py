"""Random ERNs and attack walks for property tests and benchmarks."""

from __future__ import annotations

import random

from .builder import impact_category_weight
from .ern import (
    DEFAULT_QUEUE_CAPACITY, And, DirectedLink, Ern, ErnVertex, EvidenceQueue,
    Leaf, LogicExpr, Or, Vulnerability, compute_weight, evaluate_logic,
    link_id_for,
)
from .ingest import Evidence


def random_logic(leaves: list[str], rng: random.Random) -> LogicExpr:
    """Random AND/OR tree using every leaf exactly once."""
    if not leaves:
        return None
    if len(leaves) == 1:
        return Leaf(leaves[0])
    leaves = list(leaves)
    rng.shuffle(leaves)
    n_groups = rng.randint(2, len(leaves))
    cuts = sorted(rng.sample(range(1, len(leaves)), n_groups - 1))
    groups = [leaves[a:b] for a, b in zip([0, *cuts], [*cuts, len(leaves)])]
    children = tuple(random_logic(g, rng) for g in groups)
    return And(children) if rng.random() < 0.5 else Or(children)


def random_dag_ern(n_vertices: int, rng: random.Random, *, max_parents: int = 3,
                   edge_density: float = 0.5, k: int = DEFAULT_QUEUE_CAPACITY,
                   min_weight: float = 0.05) -> Ern:
    """Vertices ``v0000``.. in topological order; links only go forward.

    Each vertex draws up to ``max_parents`` parents among earlier vertices,
    so the link count grows in proportion to the vertex count.
    """
    width = max(4, len(str(n_vertices)))
    ids = [f"v{i:0{width}d}" for i in range(n_vertices)]
    vertices, links, logic = [], [], {}
    for i, vid in enumerate(ids):
        f = rng.uniform(min_weight, 1.0)
        p = rng.uniform(min_weight, 1.0)
        vuln = Vulnerability(id=f"x{i}", impact_category=rng.randint(1, 8), p=p)
        w = compute_weight(f, p, impact_category_weight(vuln.impact_category))
        vertices.append(ErnVertex(vid, f"n{i}", vuln, f, w, EvidenceQueue(k)))
        if i == 0 or rng.random() >= edge_density:
            continue
        picks = rng.sample(range(i), min(i, rng.randint(1, max_parents)))
        lids = []
        for parent in sorted(ids[j] for j in picks):
            lid = link_id_for(parent, vid)
            links.append(DirectedLink(lid, parent, vid))
            lids.append(lid)
        logic[vid] = random_logic(lids, rng)
    return Ern(vertices, links, logic, k)


def complete_walk(ern: Ern, rng: random.Random, length: int, *,
                  start_ts: int = 1_000_000, allow_repeats: bool = True) -> list[Evidence]:
    """Causally ordered evidence in which every step is observed: each
    evidence lands on a root vertex or on a vertex whose logic is already
    satisfied by vertices seen earlier."""
    seen: set[str] = set()
    out: list[Evidence] = []
    ts = start_ts
    for n in range(length):
        ready = []
        for vid in ern.vertices:
            if vid in seen and not allow_repeats:
                continue
            incoming = ern.in_links(vid)
            if not incoming:
                ready.append(vid)
                continue
            truth = {lid: ern.links[lid].parent in seen for lid in incoming}
            if evaluate_logic(ern.logic[vid], truth):
                ready.append(vid)
        if not ready:
            break
        vid = rng.choice(ready)
        seen.add(vid)
        ts += rng.randint(0, 2000)
        out.append(Evidence(evidence_id=n, ts=ts, signature=f"sig-{vid}",
                            merged_from=("synthetic",), mapped_vertex=vid))
    return out


def random_events(ern: Ern, rng: random.Random, n: int, *,
                  start_ts: int = 1_000_000) -> list[Evidence]:
    """Uniformly random mapped evidence, no causal structure."""
    ids = list(ern.vertices)
    out = []
    ts = start_ts
    for i in range(n):
        ts += rng.randint(0, 1000)
        vid = rng.choice(ids)
        out.append(Evidence(evidence_id=i, ts=ts, signature=f"sig-{vid}",
                            merged_from=("synthetic",), mapped_vertex=vid))
    return out

"""Evidence chain reasoning over an ERN.

Two ways to feed evidence into a session:

* timed: evidence must arrive in timestamp order; an evidence whose
  vertex logic is not satisfied by earlier evidence starts a new chain.
* untimed: order is not trusted. When exactly one missing parent would
  satisfy the vertex logic, a virtual record is placed on that parent and
  later promoted if the real evidence shows up.

Chains are read off afterwards by breadth-first search from every start
record along the child references.
"""

from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass, field
from enum import Enum

from .ern import (
    Ern, ErnError, EvidenceRecord, RecordRef, State, ValidationError,
    evaluate_logic, push_record, satisfying_leaves,
)
from .ingest import Evidence

log = logging.getLogger(__name__)


class Mode(str, Enum):
    TIMED = "timed"
    UNTIMED = "untimed"


class OrderingError(ErnError):
    """Timed session received evidence older than what it already saw."""


@dataclass(frozen=True)
class ChainRecord:
    """Snapshot of one record as it stood when the chain was generated."""

    vertex_id: str
    seq: int
    ts: int
    state: State
    weight: float

    @property
    def is_virtual(self) -> bool:
        return self.state.is_virtual

    @property
    def ref(self) -> RecordRef:
        return RecordRef(self.vertex_id, self.seq)


@dataclass(frozen=True)
class EvidenceChain:
    records: tuple[ChainRecord, ...]
    # (parent index, child index) into ``records``
    edges: tuple[tuple[int, int], ...] = ()

    @property
    def real_weight(self) -> float:
        return sum(r.weight for r in self.records if not r.is_virtual)

    @property
    def virtual_weight(self) -> float:
        return sum(r.weight for r in self.records if r.is_virtual)

    @property
    def confidence(self) -> float:
        return chain_confidence(self)

    @property
    def virtual_count(self) -> int:
        return sum(r.is_virtual for r in self.records)

    @property
    def earliest_ts(self) -> int:
        return min(r.ts for r in self.records)

    def key(self) -> tuple:
        """Structural identity, used to compare chain sets."""
        return (tuple((r.vertex_id, r.seq, r.ts, int(r.state)) for r in self.records),
                self.edges)


def chain_confidence(chain: EvidenceChain) -> float:
    if not chain.records:
        raise ValidationError("confidence of an empty chain is undefined")
    w = chain.real_weight
    w_virtual = chain.virtual_weight
    if w_virtual == 0:
        return 1.0
    return w / (w + w_virtual)


@dataclass
class ReasonerSession:
    ern: Ern
    mode: Mode = Mode.UNTIMED
    processed_count: int = 0
    virtual_count: int = 0
    promoted_count: int = 0
    skipped_count: int = 0
    _last_ts: int | None = field(default=None, repr=False)

    def __post_init__(self) -> None:
        self.mode = Mode(self.mode)

    def feed(self, e: Evidence) -> RecordRef | None:
        if self.mode is Mode.TIMED:
            return reason_timed(self, e)
        return reason_untimed(self, e)

    def feed_all(self, evidences) -> None:
        for e in evidences:
            self.feed(e)

    def chains(self) -> list[EvidenceChain]:
        return generate_chains(self)


# ---------------------------------------------------------------------------
# association analysis


def _truth(ern: Ern, vertex_id: str) -> dict[str, bool]:
    """Incoming links whose parent queue holds a record."""
    return {lid: bool(ern.vertices[ern.links[lid].parent].queue)
            for lid in ern.in_links(vertex_id)}


def _link_parents(ern: Ern, link_ids, child: RecordRef) -> None:
    """Give the latest record of each link's parent a reference to ``child``."""
    for lid in sorted(link_ids):
        latest = ern.vertices[ern.links[lid].parent].queue.latest()
        if latest is not None:
            latest[1].child_refs.add(child)


def _push(ern: Ern, vertex_id: str, ts: int, state: State,
          evidence_id: int | None = None) -> RecordRef:
    v = ern.vertices[vertex_id]
    rec = EvidenceRecord(ts=ts, state=state, wt=v.risk_weight, evidence_id=evidence_id)
    return push_record(v, rec)


def _check(session: ReasonerSession, e: Evidence) -> str | None:
    if e.mapped_vertex is None:
        session.skipped_count += 1
        return None
    session.ern.vertex(e.mapped_vertex)
    return e.mapped_vertex


def reason_timed(session: ReasonerSession, e: Evidence) -> RecordRef | None:
    if session.mode is not Mode.TIMED:
        raise ErnError("reason_timed needs a timed session")
    vid = _check(session, e)
    if vid is None:
        return None
    if session._last_ts is not None and e.ts < session._last_ts:
        raise OrderingError(
            f"evidence {e.evidence_id} at {e.ts} precedes already processed ts {session._last_ts}")
    session._last_ts = e.ts
    session.processed_count += 1
    ern = session.ern
    if not ern.in_links(vid):
        return _push(ern, vid, e.ts, State.START, e.evidence_id)
    truth = _truth(ern, vid)
    if evaluate_logic(ern.logic[vid], truth):
        ref = _push(ern, vid, e.ts, State.INTERMEDIATE, e.evidence_id)
        _link_parents(ern, satisfying_leaves(ern.logic[vid], truth), ref)
        return ref
    return _push(ern, vid, e.ts, State.START, e.evidence_id)


def reason_untimed(session: ReasonerSession, e: Evidence) -> RecordRef | None:
    if session.mode is not Mode.UNTIMED:
        raise ErnError("reason_untimed needs an untimed session")
    vid = _check(session, e)
    if vid is None:
        return None
    session.processed_count += 1
    ern = session.ern
    vertex = ern.vertices[vid]

    # vertex checking: real evidence for a virtual record promotes it
    latest = vertex.queue.latest()
    if latest is not None and latest[1].is_virtual:
        seq, rec = latest
        rec.state = State(rec.state - 1)
        rec.wt = vertex.risk_weight
        rec.ts = e.ts
        rec.evidence_id = e.evidence_id
        session.promoted_count += 1
        return RecordRef(vid, seq)

    # case A
    if not ern.in_links(vid):
        return _push(ern, vid, e.ts, State.START, e.evidence_id)

    # case B
    expr = ern.logic[vid]
    truth = _truth(ern, vid)
    if evaluate_logic(expr, truth):
        ref = _push(ern, vid, e.ts, State.INTERMEDIATE, e.evidence_id)
        _link_parents(ern, satisfying_leaves(expr, truth), ref)
        return ref

    # case C: one virtual parent record, one hop deep
    for lid in ern.in_links_sorted_by_parent(vid):
        if truth[lid]:
            continue
        trial = dict(truth)
        trial[lid] = True
        if not evaluate_logic(expr, trial):
            continue
        parent = ern.links[lid].parent
        if not ern.in_links(parent):
            state = State.START_VIRTUAL
            parent_truth: dict[str, bool] = {}
        else:
            parent_truth = _truth(ern, parent)
            if not evaluate_logic(ern.logic[parent], parent_truth):
                continue
            state = State.INTERMEDIATE_VIRTUAL
        vref = _push(ern, parent, e.ts, state)
        if parent_truth:
            _link_parents(ern, satisfying_leaves(ern.logic[parent], parent_truth), vref)
        session.virtual_count += 1
        ref = _push(ern, vid, e.ts, State.INTERMEDIATE, e.evidence_id)
        _link_parents(ern, satisfying_leaves(expr, trial), ref)
        return ref

    return _push(ern, vid, e.ts, State.START, e.evidence_id)


# ---------------------------------------------------------------------------
# chain generation


def _snapshot(ref: RecordRef, rec: EvidenceRecord) -> ChainRecord:
    return ChainRecord(ref.vertex_id, ref.seq, rec.ts, rec.state, rec.wt)


def _bfs(ern: Ern, start: RecordRef) -> EvidenceChain:
    index: dict[RecordRef, int] = {start: 0}
    order = [start]
    edges: list[tuple[int, int]] = []
    todo = deque([start])
    while todo:
        ref = todo.popleft()
        rec = ern.resolve(ref)
        for child in sorted(rec.child_refs):
            if ern.resolve(child) is None:
                continue  # evicted
            if child not in index:
                index[child] = len(order)
                order.append(child)
                todo.append(child)
            edges.append((index[ref], index[child]))
    records = tuple(_snapshot(r, ern.resolve(r)) for r in order)
    return EvidenceChain(records, tuple(edges))


def generate_chains(session: ReasonerSession) -> list[EvidenceChain]:
    """One chain per live start record, best confidence first."""
    ern = session.ern
    chains = []
    for vid, vertex in ern.vertices.items():
        for seq, rec in vertex.queue:
            if rec.state.is_start:
                chains.append(_bfs(ern, RecordRef(vid, seq)))
    chains.sort(key=_chain_order)
    return chains


def _chain_order(c: EvidenceChain):
    first = c.records[0]
    return (-c.confidence, c.earliest_ts, first.vertex_id, first.seq)


def merge_chains(chains: list[EvidenceChain]) -> list[EvidenceChain]:
    """Union chains that share any record into one graph each."""
    parent: dict[int, int] = {i: i for i in range(len(chains))}

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    owner: dict[RecordRef, int] = {}
    for i, c in enumerate(chains):
        for r in c.records:
            j = owner.setdefault(r.ref, i)
            if j != i:
                parent[find(i)] = find(j)
    groups: dict[int, list[EvidenceChain]] = {}
    for i, c in enumerate(chains):
        groups.setdefault(find(i), []).append(c)

    merged = []
    for members in groups.values():
        records: list[ChainRecord] = []
        index: dict[RecordRef, int] = {}
        edges: set[tuple[int, int]] = set()
        for c in members:
            for r in c.records:
                if r.ref not in index:
                    index[r.ref] = len(records)
                    records.append(r)
            for a, b in c.edges:
                edges.add((index[c.records[a].ref], index[c.records[b].ref]))
        merged.append(EvidenceChain(tuple(records), tuple(sorted(edges))))
    merged.sort(key=_chain_order)
    return merged


def chain_violations(ern: Ern, chain: EvidenceChain) -> list[str]:
    """Structural checks every generated chain must pass; empty when valid."""
    problems = []
    if not chain.records:
        return ["empty chain"]
    if not chain.records[0].state.is_start:
        problems.append(f"first record has state {int(chain.records[0].state)}")
    targets = set()
    for a, b in chain.edges:
        pa, pb = chain.records[a], chain.records[b]
        if ern.link_between(pa.vertex_id, pb.vertex_id) is None:
            problems.append(f"no link {pa.vertex_id} -> {pb.vertex_id}")
        targets.add(b)
    for i, r in enumerate(chain.records[1:], 1):
        if i not in targets and not r.state.is_start:
            problems.append(f"record {r.vertex_id}#{r.seq} has no incoming chain edge")
    conf = chain.confidence
    if not 0.0 < conf <= 1.0:
        problems.append(f"confidence {conf} outside (0, 1]")
    if (conf == 1.0) != (chain.virtual_count == 0):
        problems.append(f"confidence {conf} with {chain.virtual_count} virtual records")
    return problems

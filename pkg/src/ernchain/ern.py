"""Evidence reasoning network: vertices, links, logic expressions and queues."""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from enum import IntEnum
from typing import Iterable, Iterator, NamedTuple, Union

DEFAULT_QUEUE_CAPACITY = 8


class ErnError(Exception):
    """Base class for errors raised by this package."""


class ValidationError(ErnError, ValueError):
    """Input violated a documented invariant.

    ``problems`` lists every violation found, not just the first.
    """

    def __init__(self, problems: str | list[str]):
        if isinstance(problems, str):
            problems = [problems]
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


class NotFoundError(ErnError, KeyError):
    def __str__(self) -> str:
        return str(self.args[0]) if self.args else "not found"


def _check_ratio(name: str, value: float) -> float:
    value = float(value)
    if not 0.0 <= value <= 1.0:
        raise ValidationError(f"{name} must be in [0, 1], got {value!r}")
    return value


def compute_weight(f: float, p: float, r: float) -> float:
    """Risk weight of a vertex: mean of functional value, exploit
    probability and impact weight."""
    f = _check_ratio("f", f)
    p = _check_ratio("p", p)
    r = _check_ratio("r", r)
    return (f + p + r) / 3.0


# ---------------------------------------------------------------------------
# records and queues


class State(IntEnum):
    START = 0
    START_VIRTUAL = 1
    INTERMEDIATE = 2
    INTERMEDIATE_VIRTUAL = 3

    @property
    def is_virtual(self) -> bool:
        return self in (State.START_VIRTUAL, State.INTERMEDIATE_VIRTUAL)

    @property
    def is_start(self) -> bool:
        return self in (State.START, State.START_VIRTUAL)


class RecordRef(NamedTuple):
    """Reference to one queue slot. ``seq`` is the per-vertex push counter,
    so a reference to an overwritten slot can be told apart from the
    record that replaced it."""

    vertex_id: str
    seq: int


@dataclass
class EvidenceRecord:
    ts: int
    state: State
    wt: float
    child_refs: set[RecordRef] = field(default_factory=set)
    evidence_id: int | None = None

    def __post_init__(self) -> None:
        self.state = State(self.state)

    @property
    def is_virtual(self) -> bool:
        return self.state.is_virtual


class EvidenceQueue:
    """Fixed-capacity circular queue; pushing onto a full queue overwrites
    the oldest record."""

    def __init__(self, capacity: int = DEFAULT_QUEUE_CAPACITY):
        if capacity < 1:
            raise ValidationError(f"queue capacity must be positive, got {capacity}")
        self.capacity = capacity
        self._items: deque[EvidenceRecord] = deque(maxlen=capacity)
        self._next_seq = 0

    def __len__(self) -> int:
        return len(self._items)

    def __bool__(self) -> bool:
        return bool(self._items)

    def __iter__(self) -> Iterator[tuple[int, EvidenceRecord]]:
        base = self._next_seq - len(self._items)
        for i, rec in enumerate(self._items):
            yield base + i, rec

    def push(self, record: EvidenceRecord) -> int:
        self._items.append(record)
        seq = self._next_seq
        self._next_seq += 1
        return seq

    def slot(self, seq: int) -> int:
        return seq % self.capacity

    def get(self, seq: int) -> EvidenceRecord | None:
        """Record pushed as ``seq``, or None once it has been evicted."""
        base = self._next_seq - len(self._items)
        if base <= seq < self._next_seq:
            return self._items[seq - base]
        return None

    def latest(self) -> tuple[int, EvidenceRecord] | None:
        if not self._items:
            return None
        return self._next_seq - 1, self._items[-1]

    def clear(self) -> None:
        self._items.clear()
        self._next_seq = 0


# ---------------------------------------------------------------------------
# logic expressions


@dataclass(frozen=True)
class Leaf:
    link_id: str


@dataclass(frozen=True)
class And:
    children: tuple[LogicExpr, ...]


@dataclass(frozen=True)
class Or:
    children: tuple[LogicExpr, ...]


LogicExpr = Union[Leaf, And, Or, None]


def evaluate_logic(expr: LogicExpr, truth: dict[str, bool]) -> bool:
    """Evaluate an AND/OR tree. Missing leaves are false, and the empty
    expression (None) is false."""
    if expr is None:
        return False
    if isinstance(expr, Leaf):
        return bool(truth.get(expr.link_id, False))
    if isinstance(expr, And):
        return all(evaluate_logic(c, truth) for c in expr.children)
    return any(evaluate_logic(c, truth) for c in expr.children)


def satisfying_leaves(expr: LogicExpr, truth: dict[str, bool]) -> set[str]:
    """Links that make a satisfied expression true.

    For AND every child contributes; for OR every satisfied child does.
    Returns an empty set when the expression is false.
    """
    if not evaluate_logic(expr, truth):
        return set()
    if isinstance(expr, Leaf):
        return {expr.link_id}
    out: set[str] = set()
    for child in expr.children:
        out |= satisfying_leaves(child, truth)
    return out


def expr_leaves(expr: LogicExpr) -> list[str]:
    if expr is None:
        return []
    if isinstance(expr, Leaf):
        return [expr.link_id]
    out: list[str] = []
    for child in expr.children:
        out.extend(expr_leaves(child))
    return out


def expr_to_json(expr: LogicExpr):
    if expr is None:
        return None
    if isinstance(expr, Leaf):
        return {"link": expr.link_id}
    key = "and" if isinstance(expr, And) else "or"
    return {key: [expr_to_json(c) for c in expr.children]}


def expr_from_json(obj) -> LogicExpr:
    if obj is None:
        return None
    if not isinstance(obj, dict) or len(obj) != 1:
        raise ValidationError(f"bad logic expression: {obj!r}")
    (key, value), = obj.items()
    if key == "link":
        return Leaf(str(value))
    if key in ("and", "or"):
        if not isinstance(value, list) or not value:
            raise ValidationError(f"'{key}' needs a non-empty list")
        children = tuple(expr_from_json(c) for c in value)
        return And(children) if key == "and" else Or(children)
    raise ValidationError(f"unknown logic operator {key!r}")


def expr_to_str(expr: LogicExpr) -> str:
    if expr is None:
        return "false"
    if isinstance(expr, Leaf):
        return expr.link_id
    op = " & " if isinstance(expr, And) else " | "
    return "(" + op.join(expr_to_str(c) for c in expr.children) + ")"


# ---------------------------------------------------------------------------
# graph


@dataclass(frozen=True)
class Vulnerability:
    id: str
    description: str = ""
    impact_category: int = 8
    p: float = 0.0
    privilege: str | None = None

    def __post_init__(self) -> None:
        if not self.id:
            raise ValidationError("vulnerability id must be non-empty")
        if self.impact_category not in range(1, 9):
            raise ValidationError(
                f"vulnerability {self.id!r}: impact_category must be 1..8, "
                f"got {self.impact_category!r}")
        _check_ratio(f"vulnerability {self.id!r} p", self.p)


@dataclass
class ErnVertex:
    vertex_id: str
    node_id: str
    vulnerability: Vulnerability
    function_value: float
    risk_weight: float
    queue: EvidenceQueue
    parent_index: list[str] = field(default_factory=list)


@dataclass(frozen=True)
class DirectedLink:
    link_id: str
    parent: str
    child: str


def link_id_for(parent: str, child: str) -> str:
    return f"{parent}->{child}"


class Ern:
    """Directed graph of (node, vulnerability) vertices.

    Structure is fixed after construction; only the per-vertex queues
    mutate, and only from one reasoning session at a time.
    """

    def __init__(self, vertices: Iterable[ErnVertex], links: Iterable[DirectedLink],
                 logic: dict[str, LogicExpr], queue_capacity: int = DEFAULT_QUEUE_CAPACITY):
        self.queue_capacity = queue_capacity
        self.vertices: dict[str, ErnVertex] = {}
        for v in sorted(vertices, key=lambda v: v.vertex_id):
            if v.vertex_id in self.vertices:
                raise ValidationError(f"duplicate vertex {v.vertex_id!r}")
            self.vertices[v.vertex_id] = v
        self.links: dict[str, DirectedLink] = {
            l.link_id: l for l in sorted(links, key=lambda l: l.link_id)}
        self.logic: dict[str, LogicExpr] = {vid: logic.get(vid) for vid in self.vertices}
        self._in: dict[str, list[str]] = {vid: [] for vid in self.vertices}
        self._out: dict[str, list[str]] = {vid: [] for vid in self.vertices}
        self._link_by_pair: dict[tuple[str, str], str] = {}
        for l in self.links.values():
            if l.parent in self._out:
                self._out[l.parent].append(l.link_id)
            if l.child in self._in:
                self._in[l.child].append(l.link_id)
            self._link_by_pair[(l.parent, l.child)] = l.link_id
        for vid, v in self.vertices.items():
            self._in[vid].sort(key=lambda lid: self.links[lid].parent)
            v.parent_index = [self.links[lid].parent for lid in self._in[vid]]
        self.validate()

    # -- structural queries

    def vertex(self, vertex_id: str) -> ErnVertex:
        try:
            return self.vertices[vertex_id]
        except KeyError:
            raise NotFoundError(f"unknown vertex {vertex_id!r}") from None

    def in_links(self, vertex_id: str) -> list[str]:
        self.vertex(vertex_id)
        return self._in[vertex_id]

    def out_links(self, vertex_id: str) -> list[str]:
        self.vertex(vertex_id)
        return self._out[vertex_id]

    def in_links_sorted_by_parent(self, vertex_id: str) -> list[str]:
        """Incoming links, ordered by ascending parent vertex id."""
        return self.in_links(vertex_id)

    def link_between(self, parent: str, child: str) -> str | None:
        return self._link_by_pair.get((parent, child))

    def resolve(self, ref: RecordRef) -> EvidenceRecord | None:
        v = self.vertices.get(ref.vertex_id)
        return None if v is None else v.queue.get(ref.seq)

    def reset_queues(self) -> None:
        for v in self.vertices.values():
            v.queue.clear()

    def validate(self) -> None:
        problems: list[str] = []
        if self.queue_capacity < 1:
            problems.append(f"queue_capacity must be positive, got {self.queue_capacity}")
        seen_pairs: set[tuple[str, str]] = set()
        for l in self.links.values():
            if l.parent not in self.vertices:
                problems.append(f"link {l.link_id!r}: unknown parent {l.parent!r}")
            if l.child not in self.vertices:
                problems.append(f"link {l.link_id!r}: unknown child {l.child!r}")
            if l.parent == l.child:
                problems.append(f"link {l.link_id!r}: self-link on {l.parent!r}")
            if (l.parent, l.child) in seen_pairs:
                problems.append(f"duplicate link {l.parent!r} -> {l.child!r}")
            seen_pairs.add((l.parent, l.child))
        for vid, v in self.vertices.items():
            _ratio_problem(problems, f"vertex {vid!r} function_value", v.function_value)
            _ratio_problem(problems, f"vertex {vid!r} risk_weight", v.risk_weight)
            incoming = set(self._in[vid])
            leaves = expr_leaves(self.logic[vid])
            if len(leaves) != len(set(leaves)):
                problems.append(f"vertex {vid!r}: a link appears in more than one leaf")
            if set(leaves) != incoming:
                problems.append(
                    f"vertex {vid!r}: logic leaves {sorted(set(leaves))} "
                    f"do not match incoming links {sorted(incoming)}")
        if problems:
            raise ValidationError(problems)

    # -- serialization

    def to_dict(self) -> dict:
        vertices = {}
        for vid, v in self.vertices.items():
            vuln = v.vulnerability
            vertices[vid] = {
                "node_id": v.node_id,
                "vulnerability": {
                    "id": vuln.id,
                    "description": vuln.description,
                    "impact_category": vuln.impact_category,
                    "p": vuln.p,
                    "privilege": vuln.privilege,
                },
                "function_value": v.function_value,
                "risk_weight": v.risk_weight,
            }
        return {
            "vertices": vertices,
            "links": {lid: {"parent": l.parent, "child": l.child}
                      for lid, l in self.links.items()},
            "logic": {vid: expr_to_json(e) for vid, e in self.logic.items()},
            "queue_capacity": self.queue_capacity,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> Ern:
        try:
            k = int(doc.get("queue_capacity", DEFAULT_QUEUE_CAPACITY))
            vertices = []
            for vid, v in doc["vertices"].items():
                vuln = v["vulnerability"]
                vertices.append(ErnVertex(
                    vertex_id=vid,
                    node_id=v["node_id"],
                    vulnerability=Vulnerability(
                        id=vuln["id"],
                        description=vuln.get("description", ""),
                        impact_category=int(vuln["impact_category"]),
                        p=float(vuln["p"]),
                        privilege=vuln.get("privilege"),
                    ),
                    function_value=float(v["function_value"]),
                    risk_weight=float(v["risk_weight"]),
                    queue=EvidenceQueue(k),
                ))
            links = [DirectedLink(lid, l["parent"], l["child"])
                     for lid, l in doc["links"].items()]
            logic = {vid: expr_from_json(e) for vid, e in doc.get("logic", {}).items()}
        except (KeyError, TypeError, AttributeError) as exc:
            raise ValidationError(f"malformed ERN document: {exc!r}") from exc
        unknown = sorted(set(logic) - {v.vertex_id for v in vertices})
        if unknown:
            raise ValidationError([f"logic for unknown vertex {u!r}" for u in unknown])
        return cls(vertices, links, logic, k)

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def loads(cls, text: str) -> Ern:
        return cls.from_dict(json.loads(text))


def _ratio_problem(problems: list[str], name: str, value: float) -> None:
    if not 0.0 <= value <= 1.0:
        problems.append(f"{name} must be in [0, 1], got {value!r}")


def in_links(ern: Ern, vertex_id: str) -> set[str]:
    return set(ern.in_links(vertex_id))


def out_links(ern: Ern, vertex_id: str) -> set[str]:
    return set(ern.out_links(vertex_id))


def push_record(vertex: ErnVertex, record: EvidenceRecord) -> RecordRef:
    """Append ``record`` to the vertex queue. References to an evicted
    record stop resolving; nothing else is touched."""
    return RecordRef(vertex.vertex_id, vertex.queue.push(record))

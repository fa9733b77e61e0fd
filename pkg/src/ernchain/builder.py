"""Build an ERN from a topology declaration and a vulnerability catalog.

Vertices are (node, vulnerability) pairs, plus one vertex per
trust-granting service endpoint. Links come from correlation rules and
trust relations, filtered by network reachability. A node always reaches
itself.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import jsonschema

from .ern import (
    DEFAULT_QUEUE_CAPACITY, And, DirectedLink, Ern, ErnVertex, EvidenceQueue,
    Leaf, LogicExpr, Or, ValidationError, Vulnerability, compute_weight,
    link_id_for,
)

log = logging.getLogger(__name__)

# Impact category -> weight.
IMPACT_WEIGHTS: dict[int, float] = {
    1: 1.0,  # system administrator, full control
    2: 0.8,  # administrator with partial permissions
    3: 0.6,  # any number of ordinary users
    4: 0.5,  # one ordinary user plus partial rights of others
    5: 0.4,  # one ordinary user with its own private resources
    6: 0.2,  # partial permission of an ordinary user
    7: 0.1,  # trusted remote visitor of network services
    8: 0.0,  # untrusted remote visitor
}

# Impact category of a synthetic service vulnerability, by granted privilege.
SERVICE_CATEGORY = {"root": 1, "user": 5}


def impact_category_weight(category: int) -> float:
    try:
        return IMPACT_WEIGHTS[category]
    except (KeyError, TypeError):
        raise ValidationError(f"impact category must be 1..8, got {category!r}") from None


def vertex_id_for(node_id: str, vuln_id: str) -> str:
    return f"{node_id}:{vuln_id}"


@dataclass(frozen=True)
class NodeDecl:
    node_id: str
    role: str = "server"
    function_value: float = 0.5


@dataclass(frozen=True)
class TrustRelation:
    from_node: str
    from_privilege: str
    to_node: str
    service: str
    granted_privilege: str = "root"
    impact_category: int | None = None
    p: float = 1.0


@dataclass
class TopologyDecl:
    nodes: list[NodeDecl] = field(default_factory=list)
    reachability: list[tuple[str, str]] = field(default_factory=list)
    trust_relations: list[TrustRelation] = field(default_factory=list)

    @classmethod
    def from_dict(cls, doc: dict) -> TopologyDecl:
        validate_document(doc, "topology")
        return cls(
            nodes=[NodeDecl(n["node_id"], n.get("role", "server"),
                            float(n.get("function_value", 0.5)))
                   for n in doc.get("nodes", [])],
            reachability=[(a, b) for a, b in doc.get("reachability", [])],
            trust_relations=[TrustRelation(**t) for t in doc.get("trust_relations", [])],
        )


@dataclass(frozen=True)
class CatalogEntry:
    node_id: str
    vulnerability: Vulnerability


@dataclass(frozen=True)
class CorrelationRule:
    premise: tuple[tuple[str, str], ...]
    consequence: tuple[str, str]
    combinator: str = "or"


@dataclass
class VulnCatalog:
    entries: list[CatalogEntry] = field(default_factory=list)
    rules: list[CorrelationRule] = field(default_factory=list)

    @classmethod
    def from_dict(cls, doc: dict) -> VulnCatalog:
        validate_document(doc, "catalog")
        entries = []
        for e in doc.get("entries", []):
            v = e["vulnerability"]
            entries.append(CatalogEntry(e["node_id"], Vulnerability(
                id=v["id"], description=v.get("description", ""),
                impact_category=v["impact_category"], p=v["p"],
                privilege=v.get("privilege"))))
        rules = [CorrelationRule(
            premise=tuple((a, b) for a, b in r["premise"]),
            consequence=tuple(r["consequence"]),
            combinator=r.get("combinator", "or"))
            for r in doc.get("rules", [])]
        return cls(entries, rules)


def _schema(name: str) -> dict:
    text = resources.files("ernchain").joinpath(f"schemas/{name}.schema.json").read_text()
    return json.loads(text)


def validate_document(doc: dict, kind: str) -> None:
    """Check ``doc`` against a bundled JSON schema
    (``topology``, ``catalog``, ``sigmap`` or ``ern``)."""
    validator = jsonschema.Draft202012Validator(_schema(kind))
    errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.path))
    if errors:
        raise ValidationError([
            f"{kind}: {'/'.join(map(str, e.path)) or '<root>'}: {e.message}"
            for e in errors])


def load_topology(path: str | Path) -> TopologyDecl:
    return TopologyDecl.from_dict(json.loads(Path(path).read_text()))


def load_catalog(path: str | Path) -> VulnCatalog:
    return VulnCatalog.from_dict(json.loads(Path(path).read_text()))


def _check_references(topology: TopologyDecl, catalog: VulnCatalog) -> None:
    problems = []
    nodes = {}
    for n in topology.nodes:
        if n.node_id in nodes:
            problems.append(f"duplicate node {n.node_id!r}")
        nodes[n.node_id] = n
        if not 0.0 <= n.function_value <= 1.0:
            problems.append(f"node {n.node_id!r}: function_value out of [0, 1]")
    for a, b in topology.reachability:
        for x in (a, b):
            if x not in nodes:
                problems.append(f"reachability references undeclared node {x!r}")
    for t in topology.trust_relations:
        for x in (t.from_node, t.to_node):
            if x not in nodes:
                problems.append(f"trust relation references undeclared node {x!r}")
        if t.from_node == t.to_node:
            problems.append(f"trust relation {t.service!r} on {t.to_node!r} targets its own node")
    pairs = set()
    for e in catalog.entries:
        if e.node_id not in nodes:
            problems.append(f"catalog entry {e.vulnerability.id!r} references "
                            f"undeclared node {e.node_id!r}")
        key = (e.node_id, e.vulnerability.id)
        if key in pairs:
            problems.append(f"duplicate catalog entry {vertex_id_for(*key)!r}")
        pairs.add(key)
    for r in catalog.rules:
        for ref in (*r.premise, r.consequence):
            if tuple(ref) not in pairs:
                problems.append(f"rule references undeclared entry {vertex_id_for(*ref)!r}")
        if tuple(r.consequence) in {tuple(p) for p in r.premise}:
            problems.append(f"rule makes {vertex_id_for(*r.consequence)!r} its own premise")
        if r.combinator not in ("and", "or"):
            problems.append(f"rule combinator must be 'and' or 'or', got {r.combinator!r}")
    if problems:
        raise ValidationError(problems)


def build_ern(topology: TopologyDecl, catalog: VulnCatalog,
              k: int = DEFAULT_QUEUE_CAPACITY) -> Ern:
    _check_references(topology, catalog)
    if k < 1:
        raise ValidationError(f"queue capacity must be positive, got {k}")
    f_of = {n.node_id: n.function_value for n in topology.nodes}
    reach = set(map(tuple, topology.reachability))

    def reachable(a: str, b: str) -> bool:
        return a == b or (a, b) in reach

    # step 3: vertex set
    vulns: dict[str, tuple[str, Vulnerability]] = {}
    for e in catalog.entries:
        vulns[vertex_id_for(e.node_id, e.vulnerability.id)] = (e.node_id, e.vulnerability)
    for t in sorted(topology.trust_relations, key=_trust_key):
        vid = vertex_id_for(t.to_node, t.service)
        if vid in vulns:
            continue
        category = t.impact_category or SERVICE_CATEGORY.get(t.granted_privilege, 5)
        vulns[vid] = (t.to_node, Vulnerability(
            id=t.service, description=f"{t.service} grants {t.granted_privilege} access",
            impact_category=category, p=t.p, privilege=t.granted_privilege))

    # step 4: links and logic. Each target collects OR-alternatives (single
    # parents) and AND-groups (tuples of parents).
    alternatives: dict[str, set[str]] = {}
    and_groups: dict[str, list[tuple[str, ...]]] = {}

    def privileged(node: str, privilege: str) -> list[str]:
        return sorted(vid for vid, (n, v) in vulns.items()
                      if n == node and v.privilege == privilege)

    for t in topology.trust_relations:
        child = vertex_id_for(t.to_node, t.service)
        if not reachable(t.from_node, t.to_node):
            continue
        for parent in privileged(t.from_node, t.from_privilege):
            if parent != child:
                alternatives.setdefault(child, set()).add(parent)

    for r in catalog.rules:
        child = vertex_id_for(*r.consequence)
        parents = [vertex_id_for(*p) for p in r.premise]
        live = [p for p in parents if reachable(vulns[p][0], vulns[child][0])]
        if r.combinator == "or" or len(parents) == 1:
            alternatives.setdefault(child, set()).update(live)
        elif len(live) == len(parents):
            and_groups.setdefault(child, []).append(tuple(sorted(set(live))))
        else:
            log.warning("dropping AND rule for %s: premise not reachable", child)

    links: dict[str, DirectedLink] = {}
    logic: dict[str, LogicExpr] = {}
    problems = []
    for child in sorted(set(alternatives) | set(and_groups)):
        alts = alternatives.get(child, set())
        groups = sorted(set(and_groups.get(child, [])))
        used = [p for g in groups for p in g]
        clash = sorted({p for p in used if used.count(p) > 1 or p in alts})
        if clash:
            problems.append(f"vertex {child!r}: premise(s) {clash} appear in more than "
                            f"one rule with an AND combinator")
            continue
        terms: list[LogicExpr] = []
        for parent in sorted(alts):
            lid = link_id_for(parent, child)
            links[lid] = DirectedLink(lid, parent, child)
            terms.append(Leaf(lid))
        for g in groups:
            leaves = []
            for parent in g:
                lid = link_id_for(parent, child)
                links[lid] = DirectedLink(lid, parent, child)
                leaves.append(Leaf(lid))
            terms.append(And(tuple(leaves)))
        if terms:
            logic[child] = terms[0] if len(terms) == 1 else Or(tuple(terms))
    if problems:
        raise ValidationError(problems)

    # step 5: weights and empty data structures
    vertices = []
    for vid, (node, vuln) in vulns.items():
        r = impact_category_weight(vuln.impact_category)
        vertices.append(ErnVertex(
            vertex_id=vid, node_id=node, vulnerability=vuln,
            function_value=f_of[node],
            risk_weight=compute_weight(f_of[node], vuln.p, r),
            queue=EvidenceQueue(k)))
    return Ern(vertices, links.values(), logic, k)


def _trust_key(t: TrustRelation):
    return (t.to_node, t.service, t.from_node, t.from_privilege)


def build_from_files(topology_path: str | Path, catalog_path: str | Path,
                     k: int = DEFAULT_QUEUE_CAPACITY) -> Ern:
    return build_ern(load_topology(topology_path), load_catalog(catalog_path), k)


def load_ern(path: str | Path) -> Ern:
    doc = json.loads(Path(path).read_text())
    validate_document(doc, "ern")
    return Ern.from_dict(doc)

from pathlib import Path

import pytest

from ernchain.ern import (
    And, DirectedLink, Ern, ErnVertex, EvidenceQueue, Leaf, Or, Vulnerability,
    link_id_for,
)
from ernchain.ingest import Evidence

ROOT = Path(__file__).resolve().parents[1]
FIXTURES = ROOT / "fixtures"
SCENARIOS = ["lldos1", "lldos2", "treasure/alpha", "treasure/omega"]


def small_ern(edges, logic=None, weights=None, k=8):
    """ERN over vertex names appearing in ``edges``; default logic is OR."""
    names = sorted({v for e in edges for v in e} | set(weights or {}) | set(logic or {}))
    weights = weights or {}
    vertices = [ErnVertex(n, n, Vulnerability(id=n, impact_category=1, p=0.5), 0.5,
                          weights.get(n, 0.5), EvidenceQueue(k)) for n in names]
    links = [DirectedLink(link_id_for(a, b), a, b) for a, b in edges]
    expr = {}
    for n in names:
        inc = [link_id_for(a, b) for a, b in edges if b == n]
        if logic and n in logic:
            expr[n] = logic[n]
        elif inc:
            expr[n] = _or(inc)
    return Ern(vertices, links, expr, k)


def _or(lids):
    return Leaf(lids[0]) if len(lids) == 1 else Or(tuple(Leaf(i) for i in lids))


def ev(vertex, ts, eid=0, sig=None):
    return Evidence(evidence_id=eid, ts=ts, signature=sig or f"sig-{vertex}",
                    merged_from=("t",), mapped_vertex=vertex)


@pytest.fixture
def and3():
    """n1 -> n3 <- n2 with n3 = e1 AND e2."""
    e1, e2 = link_id_for("n1", "n3"), link_id_for("n2", "n3")
    return small_ern([("n1", "n3"), ("n2", "n3")], {"n3": And((Leaf(e1), Leaf(e2)))})


# -- acceptance summary

_CRITERIA: dict[int, tuple[str, bool, str]] = {}


def record_criterion(number, title, ok, detail=""):
    _CRITERIA[number] = (title, ok, detail)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        title, ok, detail = _CRITERIA[n]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {n:2d}. {title}: {detail}")

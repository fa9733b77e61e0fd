import json

import pydot
import pytest

from ernchain.export import RenderOptions, chain_to_dict, report_dict, report_json, to_dot
from ernchain.ingest import IngestStats, RawAlert, SignatureMap, preprocess
from ernchain.reasoner import Mode, ReasonerSession, generate_chains

from conftest import ev, small_ern


def _parse(dot):
    graph, = pydot.graph_from_dot_data(dot)
    return graph


def _all_nodes(graph):
    nodes = [n for n in graph.get_nodes() if n.get_name() not in ("node", "edge", "graph")]
    for sub in graph.get_subgraphs():
        nodes += _all_nodes(sub)
    return nodes


def _all_edges(graph):
    edges = list(graph.get_edges())
    for sub in graph.get_subgraphs():
        edges += _all_edges(sub)
    return edges


def _session(mode=Mode.TIMED):
    ern = small_ern([("a", "b")], weights={"a": 0.5, "b": 0.5})
    return ReasonerSession(ern, mode)


def test_empty_dot_parses():
    graph = _parse(to_dot([]))
    assert graph.get_name() == "evidence_chains"
    assert _all_nodes(graph) == []


def test_two_record_chain():
    s = _session()
    s.feed(ev("a", 1))
    s.feed(ev("b", 2))
    chains = generate_chains(s)
    for opts in (RenderOptions(), RenderOptions(merge_chains=True)):
        graph = _parse(to_dot(chains, opts))
        assert len(_all_nodes(graph)) == 2
        assert len(_all_edges(graph)) == 1


def test_virtual_nodes_are_styled():
    s = _session(Mode.UNTIMED)
    s.feed(ev("b", 2))
    dot = to_dot(generate_chains(s))
    styled = [n for n in _all_nodes(_parse(dot)) if n.get("style") == "filled"]
    assert [n.get_name() for n in styled] == ['"c0:a#0"']
    plain = to_dot(generate_chains(s), RenderOptions(show_virtual=False))
    assert "filled" not in plain


def test_labels_are_escaped():
    ern = small_ern([], weights={'we"ird\\': 0.5})
    s = ReasonerSession(ern)
    s.feed(ev('we"ird\\', 1))
    graph = _parse(to_dot(generate_chains(s)))
    assert len(_all_nodes(graph)) == 1


def test_report_round_trip():
    s = _session(Mode.UNTIMED)
    s.feed(ev("b", 2))
    s.feed(ev("a", 3))
    s.feed(ev("b", 4))
    chains = generate_chains(s)
    doc = json.loads(report_json(chains))
    assert doc["chain_count"] == len(chains)
    for c, d in zip(chains, doc["chains"]):
        assert d["confidence"] == pytest.approx(c.confidence, abs=1e-9)
        assert d == chain_to_dict(c)
        assert [r["virtual"] for r in d["records"]] == [r.is_virtual for r in c.records]


def test_evidence_histogram():
    ern = small_ern([], weights={"a": 0.5})
    raws = [RawAlert("x", t, sig, src_addr="10.0.0.1")
            for t, sig in [(1000, "sigA"), (90000, "sigA"), (5000, "sigB")]]
    _, stats = preprocess(raws, ern, SignatureMap([]))
    assert report_dict([], stats)["evidence_counts"] == {"sigA": 2, "sigB": 1}


def test_report_is_deterministic():
    def once():
        s = _session(Mode.UNTIMED)
        s.feed(ev("b", 2))
        chains = generate_chains(s)
        return report_json(chains, IngestStats(), {"mode": "untimed"}), to_dot(chains)

    assert once() == once()

import itertools
import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ernchain.ern import (
    And, Ern, EvidenceQueue, EvidenceRecord, Leaf, NotFoundError, Or, RecordRef, State,
    ValidationError, compute_weight, evaluate_logic, expr_from_json, expr_leaves,
    expr_to_json, in_links, out_links, push_record,
)
from ernchain.synth import random_dag_ern, random_logic

from conftest import small_ern

ratio = st.floats(min_value=0.0, max_value=1.0, allow_nan=False)


# -- compute_weight

def test_weight_examples():
    assert compute_weight(1.0, 1.0, 1.0) == 1.0
    assert compute_weight(0.0, 0.0, 0.0) == 0.0
    assert compute_weight(0.5, 0.5, 1.0) == pytest.approx(2 / 3, abs=1e-9)


@pytest.mark.parametrize("args,field", [((1.5, 0, 0), "f"), ((0, -0.1, 0), "p"),
                                        ((0, 0, 2), "r")])
def test_weight_rejects_out_of_range(args, field):
    with pytest.raises(ValidationError, match=f"^{field} "):
        compute_weight(*args)


@given(ratio, ratio, ratio, ratio)
def test_weight_bounded_and_monotone(f, p, r, bump):
    w = compute_weight(f, p, r)
    assert 0.0 <= w <= 1.0
    assert compute_weight(max(f, bump), p, r) >= w
    assert compute_weight(f, max(p, bump), r) >= w
    assert compute_weight(f, p, max(r, bump)) >= w


# -- evaluate_logic

SAMPLE = Or((And((Leaf("e1"), Leaf("e2"))), Leaf("e3")))


def test_logic_examples():
    assert evaluate_logic(SAMPLE, {"e1": True, "e2": False, "e3": True})
    assert not evaluate_logic(SAMPLE, {"e1": True, "e2": False, "e3": False})
    assert evaluate_logic(And((Leaf("e1"), Leaf("e2"))), {"e1": True, "e2": True})


def test_empty_expression_is_false():
    assert evaluate_logic(None, {}) is False


def test_missing_leaf_counts_as_false():
    assert not evaluate_logic(And((Leaf("e1"), Leaf("e2"))), {"e1": True})


def _python_source(expr):
    """Independent oracle: render the tree as a Python boolean expression."""
    if isinstance(expr, Leaf):
        return f"T[{expr.link_id!r}]"
    op = " and " if isinstance(expr, And) else " or "
    return "(" + op.join(_python_source(c) for c in expr.children) + ")"


def truth_table_mismatches(expr, leaves):
    code = compile(_python_source(expr), "<oracle>", "eval")
    bad = 0
    for bits in itertools.product((False, True), repeat=len(leaves)):
        truth = dict(zip(leaves, bits))
        if evaluate_logic(expr, truth) != eval(code, {"T": truth}):
            bad += 1
    return bad


def test_and_matches_truth_table():
    assert truth_table_mismatches(And((Leaf("e1"), Leaf("e2"))), ["e1", "e2"]) == 0


@settings(max_examples=150, deadline=None)
@given(st.integers(1, 10), st.integers(0, 2**32 - 1))
def test_logic_matches_truth_table_oracle(n_leaves, seed):
    leaves = [f"l{i}" for i in range(n_leaves)]
    expr = random_logic(leaves, random.Random(seed))
    assert sorted(expr_leaves(expr)) == sorted(leaves)
    assert truth_table_mismatches(expr, leaves) == 0


@given(st.integers(1, 8), st.integers(0, 2**32 - 1))
def test_logic_json_round_trip(n, seed):
    expr = random_logic([f"l{i}" for i in range(n)], random.Random(seed))
    assert expr_from_json(json.loads(json.dumps(expr_to_json(expr)))) == expr


def test_logic_json_rejects_unknown_operator():
    with pytest.raises(ValidationError):
        expr_from_json({"xor": [{"link": "a"}]})


# -- structure

def test_in_links_examples():
    ern = small_ern([("a", "b"), ("b", "c")], weights={"z": 0.5})
    assert in_links(ern, "z") == set()
    assert in_links(ern, "b") == {"a->b"}
    assert out_links(ern, "b") == {"b->c"}
    with pytest.raises(NotFoundError):
        in_links(ern, "nope")


def test_logic_must_cover_incoming_links():
    with pytest.raises(ValidationError, match="do not match incoming"):
        small_ern([("a", "c"), ("b", "c")], {"c": Leaf("a->c")})


def test_self_link_rejected():
    with pytest.raises(ValidationError, match="self-link"):
        small_ern([("a", "a")])


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 30), st.integers(0, 2**32 - 1))
def test_adjacency_partitions_links(n, seed):
    ern = random_dag_ern(n, random.Random(seed))
    assert len(ern.logic) == len(ern.vertices)
    for vid, v in ern.vertices.items():
        ins, outs = in_links(ern, vid), out_links(ern, vid)
        mentioning = {lid for lid, l in ern.links.items() if vid in (l.parent, l.child)}
        assert ins | outs == mentioning and not ins & outs
        assert v.parent_index == sorted(ern.links[l].parent for l in ins)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 30), st.integers(0, 2**32 - 1))
def test_serialization_round_trip(n, seed):
    ern = random_dag_ern(n, random.Random(seed), k=5)
    again = Ern.loads(ern.dumps())
    assert again.to_dict() == ern.to_dict()
    assert again.dumps() == ern.dumps()
    assert again.queue_capacity == 5


# -- queues

def _rec(ts, state=State.START):
    return EvidenceRecord(ts=ts, state=state, wt=0.5)


def test_push_onto_empty_queue():
    ern = small_ern([], weights={"a": 0.5})
    v = ern.vertices["a"]
    ref = push_record(v, _rec(1))
    assert ref == RecordRef("a", 0)
    assert v.queue.slot(ref.seq) == 0
    assert len(v.queue) == 1


def test_push_past_capacity_evicts_oldest():
    q = EvidenceQueue(8)
    seqs = [q.push(_rec(t)) for t in range(9)]
    assert len(q) == 8
    assert q.get(seqs[0]) is None
    assert q.get(seqs[1]).ts == 1
    assert q.latest()[1].ts == 8
    assert q.slot(seqs[8]) == 0  # wrapped onto the evicted slot


def test_evicted_child_ref_dangles():
    ern = small_ern([("a", "b")], k=2)
    parent = push_record(ern.vertices["a"], _rec(0))
    child = push_record(ern.vertices["b"], _rec(1, State.INTERMEDIATE))
    ern.resolve(parent).child_refs.add(child)
    assert ern.resolve(child) is not None
    push_record(ern.vertices["b"], _rec(2))
    push_record(ern.vertices["b"], _rec(3))
    assert ern.resolve(child) is None
    assert child in ern.resolve(parent).child_refs


@given(st.integers(1, 16), st.integers(0, 60))
def test_queue_length_is_min_n_k(k, n):
    q = EvidenceQueue(k)
    for t in range(n):
        q.push(_rec(t))
        assert len(q) <= k
    assert len(q) == min(n, k)
    assert [r.ts for _, r in q] == list(range(max(0, n - k), n))


def test_queue_capacity_must_be_positive():
    with pytest.raises(ValidationError):
        EvidenceQueue(0)

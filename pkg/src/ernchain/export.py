"""DOT and JSON renderings of evidence chains."""

from __future__ import annotations

import json
from dataclasses import dataclass

from .ingest import IngestStats, format_ts
from .reasoner import EvidenceChain, merge_chains

REPORT_VERSION = 1


@dataclass(frozen=True)
class RenderOptions:
    merge_chains: bool = False
    show_virtual: bool = True
    include_weights: bool = False


def _quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _label(rec, opts: RenderOptions) -> str:
    parts = [rec.vertex_id, format_ts(rec.ts)]
    if opts.include_weights:
        parts.append(f"w={rec.weight:.3f}")
    if rec.is_virtual and opts.show_virtual:
        parts.append("(virtual)")
    return "\\n".join(p.replace("\\", "\\\\").replace('"', '\\"') for p in parts)


def to_dot(chains: list[EvidenceChain], opts: RenderOptions | None = None) -> str:
    opts = opts or RenderOptions()
    if opts.merge_chains:
        chains = merge_chains(chains)
    lines = ["digraph evidence_chains {", "  rankdir=LR;",
             '  node [shape=box, fontname="Helvetica"];']
    for ci, chain in enumerate(chains):
        indent = "  "
        if not opts.merge_chains:
            lines.append(f"  subgraph cluster_{ci} {{")
            lines.append(f'    label="chain {ci} confidence={chain.confidence:.4f}";')
            indent = "    "
        prefix = "" if opts.merge_chains else f"c{ci}:"
        for rec in chain.records:
            attrs = [f'label="{_label(rec, opts)}"']
            if rec.is_virtual and opts.show_virtual:
                attrs += ["style=filled", 'fillcolor="gray80"']
            node = _quote(f"{prefix}{rec.vertex_id}#{rec.seq}")
            lines.append(f"{indent}{node} [{', '.join(attrs)}];")
        for a, b in chain.edges:
            src = _quote(f"{prefix}{chain.records[a].vertex_id}#{chain.records[a].seq}")
            dst = _quote(f"{prefix}{chain.records[b].vertex_id}#{chain.records[b].seq}")
            lines.append(f"{indent}{src} -> {dst};")
        if not opts.merge_chains:
            lines.append("  }")
    lines.append("}")
    return "\n".join(lines) + "\n"


def chain_to_dict(chain: EvidenceChain) -> dict:
    return {
        "records": [{
            "vertex_id": r.vertex_id,
            "seq": r.seq,
            "ts": r.ts,
            "time": format_ts(r.ts),
            "state": int(r.state),
            "weight": r.weight,
            "virtual": r.is_virtual,
        } for r in chain.records],
        "edges": [list(e) for e in chain.edges],
        "w": chain.real_weight,
        "w_virtual": chain.virtual_weight,
        "confidence": chain.confidence,
    }


def report_dict(chains: list[EvidenceChain], ingest_stats: IngestStats | None = None,
                session_stats: dict | None = None) -> dict:
    ingest_stats = ingest_stats or IngestStats()
    return {
        "version": REPORT_VERSION,
        "chain_count": len(chains),
        "chains": [chain_to_dict(c) for c in chains],
        "evidence_counts": dict(sorted(ingest_stats.signature_counts.items())),
        "stats": {"ingest": ingest_stats.to_dict(), "session": dict(session_stats or {})},
    }


def report_json(chains: list[EvidenceChain], ingest_stats: IngestStats | None = None,
                session_stats: dict | None = None) -> str:
    return json.dumps(report_dict(chains, ingest_stats, session_stats),
                      indent=2, sort_keys=True) + "\n"

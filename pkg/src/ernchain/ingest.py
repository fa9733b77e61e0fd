"""Alert preprocessing: normalize, merge duplicates, order, map to vertices."""

from __future__ import annotations

import ipaddress
import json
import logging
from collections import Counter
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from fnmatch import fnmatchcase
from pathlib import Path
from typing import IO, Iterable

from .builder import validate_document, vertex_id_for
from .ern import Ern, ValidationError

log = logging.getLogger(__name__)

DEFAULT_MERGE_WINDOW = 2.0  # seconds


@dataclass(frozen=True)
class RawAlert:
    sensor_id: str
    ts: str | int
    signature: str
    src_addr: str | None = None
    dst_addr: str | None = None
    target_node: str | None = None
    vuln_hint: str | None = None
    payload_ref: str | None = None

    @classmethod
    def from_dict(cls, doc: dict) -> RawAlert:
        known = {k: doc.get(k) for k in cls.__dataclass_fields__ if k in doc}
        return cls(**known)


@dataclass(frozen=True)
class Evidence:
    evidence_id: int
    ts: int  # UTC epoch milliseconds
    signature: str
    merged_from: tuple[str, ...]
    mapped_vertex: str | None = None
    attributes: dict = field(default_factory=dict, hash=False, compare=True)

    @property
    def src(self) -> str | None:
        return self.attributes.get("src_addr")

    @property
    def dst(self) -> str | None:
        return self.attributes.get("dst_addr")


@dataclass
class IngestStats:
    received: int = 0
    rejected: int = 0
    merged: int = 0
    unmapped: int = 0
    mapped: int = 0
    diagnostics: list[str] = field(default_factory=list)
    signature_counts: dict[str, int] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "received": self.received,
            "rejected": self.rejected,
            "merged": self.merged,
            "unmapped": self.unmapped,
            "mapped": self.mapped,
        }


def parse_ts(value: str | int) -> int:
    """Timestamp -> UTC epoch milliseconds. Integers are taken as epoch
    milliseconds already; naive ISO strings are read as UTC."""
    if isinstance(value, bool):
        raise ValueError(f"bad timestamp {value!r}")
    if isinstance(value, int):
        return value
    if isinstance(value, float):
        return int(round(value))
    if not isinstance(value, str) or not value.strip():
        raise ValueError(f"bad timestamp {value!r}")
    text = value.strip()
    if text.endswith("Z"):
        text = text[:-1] + "+00:00"
    dt = datetime.fromisoformat(text)
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    delta = dt - datetime(1970, 1, 1, tzinfo=timezone.utc)
    return delta.days * 86_400_000 + delta.seconds * 1000 + delta.microseconds // 1000


def format_ts(ms: int) -> str:
    dt = datetime.fromtimestamp(ms / 1000, tz=timezone.utc)
    return dt.isoformat(timespec="milliseconds").replace("+00:00", "Z")


def normalize_alert(raw: RawAlert, evidence_id: int = 0) -> Evidence:
    """Raises ValidationError for an empty signature or unparseable ts."""
    if not raw.signature or not str(raw.signature).strip():
        raise ValidationError(f"alert from {raw.sensor_id!r}: empty signature")
    try:
        ts = parse_ts(raw.ts)
    except (ValueError, TypeError) as exc:
        raise ValidationError(f"alert from {raw.sensor_id!r}: unparseable timestamp "
                              f"{raw.ts!r} ({exc})") from None
    attrs = {k: getattr(raw, k) for k in
             ("src_addr", "dst_addr", "target_node", "vuln_hint", "payload_ref")
             if getattr(raw, k) is not None}
    return Evidence(evidence_id=evidence_id, ts=ts, signature=str(raw.signature).strip(),
                    merged_from=(raw.sensor_id,), attributes=attrs)


def merge_duplicates(evidences: list[Evidence], window: float = DEFAULT_MERGE_WINDOW
                     ) -> list[Evidence]:
    """Collapse evidences sharing (signature, src, dst) whose ts lies
    within ``window`` seconds of the first one kept. Input must be
    sorted by ts; output stays sorted."""
    window_ms = window * 1000.0
    out: list[Evidence] = []
    anchor: dict[tuple, int] = {}  # key -> index into out
    for e in evidences:
        key = (e.signature, e.src, e.dst)
        i = anchor.get(key)
        if i is not None and e.ts - out[i].ts <= window_ms:
            kept = out[i]
            sensors = kept.merged_from + tuple(s for s in e.merged_from
                                               if s not in kept.merged_from)
            out[i] = replace(kept, merged_from=sensors)
            continue
        anchor[key] = len(out)
        out.append(e)
    return out


@dataclass(frozen=True)
class SignatureRule:
    signature: str
    vertex: str
    dst: str | None = None

    def matches(self, e: Evidence) -> bool:
        if not fnmatchcase(e.signature, self.signature):
            return False
        if self.dst is None:
            return True
        if e.dst is None:
            return False
        try:
            return ipaddress.ip_address(e.dst) in ipaddress.ip_network(self.dst, strict=False)
        except ValueError:
            return e.dst == self.dst


@dataclass
class SignatureMap:
    rules: list[SignatureRule] = field(default_factory=list)

    @classmethod
    def from_dict(cls, doc: dict) -> SignatureMap:
        validate_document(doc, "sigmap")
        return cls([SignatureRule(r["signature"], r["vertex"], r.get("dst"))
                    for r in doc["rules"]])

    @classmethod
    def load(cls, path: str | Path) -> SignatureMap:
        return cls.from_dict(json.loads(Path(path).read_text()))

    def validate_against(self, ern: Ern) -> None:
        missing = [f"signature rule {r.signature!r} maps to unknown vertex {r.vertex!r}"
                   for r in self.rules if r.vertex not in ern.vertices]
        if missing:
            raise ValidationError(missing)


def map_evidence(ern: Ern, sigmap: SignatureMap, e: Evidence) -> Evidence:
    """First matching rule wins. With no match, a (target_node, vuln_hint)
    pair naming an existing vertex is used; otherwise the vertex stays
    unset."""
    for rule in sigmap.rules:
        if rule.matches(e):
            return replace(e, mapped_vertex=rule.vertex)
    node, vuln = e.attributes.get("target_node"), e.attributes.get("vuln_hint")
    if node and vuln and vertex_id_for(node, vuln) in ern.vertices:
        return replace(e, mapped_vertex=vertex_id_for(node, vuln))
    return replace(e, mapped_vertex=None)


def read_alerts(stream: IO[str] | Iterable[str], stats: IngestStats | None = None
                ) -> list[RawAlert]:
    """Parse newline-delimited JSON. Bad lines are counted as rejected."""
    out = []
    for lineno, line in enumerate(stream, 1):
        line = line.strip()
        if not line:
            continue
        try:
            doc = json.loads(line)
            validate_document(doc, "alert")
            out.append(RawAlert.from_dict(doc))
        except (json.JSONDecodeError, ValidationError) as exc:
            if stats is None:
                raise ValidationError(f"line {lineno}: {exc}") from None
            stats.received += 1
            stats.rejected += 1
            stats.diagnostics.append(f"line {lineno}: {exc}")
    return out


def preprocess(raws: Iterable[RawAlert], ern: Ern, sigmap: SignatureMap,
               window: float = DEFAULT_MERGE_WINDOW,
               stats: IngestStats | None = None) -> tuple[list[Evidence], IngestStats]:
    """normalize -> stable sort by ts -> merge -> renumber -> map."""
    stats = stats or IngestStats()
    normalized = []
    for i, raw in enumerate(raws):
        stats.received += 1
        try:
            normalized.append(normalize_alert(raw, i))
        except ValidationError as exc:
            stats.rejected += 1
            stats.diagnostics.append(str(exc))
    normalized.sort(key=lambda e: e.ts)
    merged = merge_duplicates(normalized, window)
    stats.merged += len(normalized) - len(merged)
    out = []
    for n, e in enumerate(merged):
        e = map_evidence(ern, sigmap, replace(e, evidence_id=n))
        if e.mapped_vertex is None:
            stats.unmapped += 1
        else:
            stats.mapped += 1
        out.append(e)
    stats.signature_counts = dict(sorted(Counter(e.signature for e in out).items()))
    for d in stats.diagnostics:
        log.warning("rejected alert: %s", d)
    log.info("ingest: %d received, %d rejected, %d merged, %d unmapped, %d mapped",
             stats.received, stats.rejected, stats.merged, stats.unmapped, stats.mapped)
    return out, stats

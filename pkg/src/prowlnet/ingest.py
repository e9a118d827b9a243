"""Timestamped edge-list loading with the warm-up / cadence protocol.

File format: one event per line, ``u v [weight] [timestamp]`` separated by
whitespace; lines starting with ``%`` or ``#`` are comments. Line order is the
timeline: each data line is one stamp. Explicit timestamps are kept for
reporting only.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from prowlnet.graph import GraphEvent, NetworkInstance, apply_event


class IngestError(ValueError):
    pass


@dataclass
class DatasetSpec:
    path: str
    initial_stamp: int = 0
    cadence: int = 1
    directed: bool = False
    comment_prefixes: tuple[str, ...] = ("%", "#")

    @classmethod
    def from_config(cls, section: dict) -> "DatasetSpec":
        unknown = set(section) - {"path", "initial_stamp", "cadence", "directed", "comment_prefixes"}
        if unknown:
            raise IngestError(f"unknown dataset keys: {sorted(unknown)}")
        if "path" not in section:
            raise IngestError("dataset section needs a 'path'")
        kw = dict(section)
        if "comment_prefixes" in kw:
            kw["comment_prefixes"] = tuple(kw["comment_prefixes"])
        return cls(**kw)


# Published protocol for the four real-world datasets (files are not shipped).
PAPER_DATASETS = {
    "facebook": {"initial_stamp": 400_000, "cadence": 13, "warmup_nodes": 21_059, "warmup_edges": 81_473},
    "wikitalk": {"initial_stamp": 27_000, "cadence": 1, "warmup_nodes": 15_807, "warmup_edges": 17_765},
    "citation": {"initial_stamp": 375, "cadence": 1, "warmup_nodes": 14_526, "warmup_edges": 30_815},
    "enron": {"initial_stamp": 100_000, "cadence": 2, "warmup_nodes": 45_596, "warmup_edges": 156_596},
}


@dataclass
class ParsedLine:
    lineno: int
    u: int
    v: int
    timestamp: float | None


@dataclass
class ParseStats:
    data_lines: int = 0
    self_loops: int = 0
    duplicates: int = 0
    distinct_stamps: int = 0


def parse_lines(lines, comment_prefixes=("%", "#")) -> list[ParsedLine]:
    out = []
    for lineno, raw in enumerate(lines, start=1):
        text = raw.strip()
        if not text or text.startswith(tuple(comment_prefixes)):
            continue
        parts = text.split()
        if len(parts) < 2 or len(parts) > 4:
            raise IngestError(f"line {lineno}: expected 'u v [weight] [timestamp]', got {text!r}")
        try:
            u, v = int(parts[0]), int(parts[1])
            ts = float(parts[3]) if len(parts) == 4 else None
            if len(parts) >= 3:
                float(parts[2])
        except ValueError:
            raise IngestError(f"line {lineno}: malformed fields in {text!r}") from None
        out.append(ParsedLine(lineno, u, v, ts))
    return out


class EventStream:
    """Per-stamp event batches; a self-loop stamp yields an empty batch."""

    def __init__(self, batches: list[list[GraphEvent]]):
        self.batches = batches
        self._pos = 0

    def __len__(self):
        return len(self.batches)

    def next_events(self):
        if self._pos >= len(self.batches):
            return None
        batch = self.batches[self._pos]
        self._pos += 1
        return batch

    def events(self) -> list[GraphEvent]:
        return [ev for b in self.batches for ev in b]

    def reset(self) -> "EventStream":
        return EventStream(self.batches)


@dataclass
class LoadedDataset:
    warmup: NetworkInstance
    stream: EventStream
    stats: ParseStats = field(default_factory=ParseStats)


def _batches(parsed: list[ParsedLine], stats: ParseStats) -> list[list[GraphEvent]]:
    out = []
    for stamp, line in enumerate(parsed):
        if line.u == line.v:
            stats.self_loops += 1
            out.append([])
        else:
            out.append([GraphEvent(line.u, line.v, stamp)])
    return out


def load_lines(lines, spec: DatasetSpec) -> LoadedDataset:
    parsed = parse_lines(lines, spec.comment_prefixes)
    if not parsed:
        raise IngestError(f"{spec.path}: no events")
    if not 0 <= spec.initial_stamp < len(parsed):
        raise IngestError(f"initial_stamp {spec.initial_stamp} outside [0, {len(parsed)})")
    stats = ParseStats(data_lines=len(parsed))
    stats.distinct_stamps = len({p.timestamp for p in parsed if p.timestamp is not None})
    batches = _batches(parsed, stats)
    stats.duplicates = count_duplicates(ev for b in batches for ev in b)
    warm = NetworkInstance()
    for batch in batches[: spec.initial_stamp]:
        for ev in batch:
            apply_event(warm, ev)
    return LoadedDataset(warm, EventStream(batches[spec.initial_stamp :]), stats)


def load(spec: DatasetSpec) -> LoadedDataset:
    path = Path(spec.path)
    with path.open() as fh:
        return load_lines(fh, spec)


def count_duplicates(events) -> int:
    seen = set()
    dup = 0
    for ev in events:
        key = (min(ev.u, ev.v), max(ev.u, ev.v))
        if key in seen:
            dup += 1
        seen.add(key)
    return dup


def write_edge_list(events, path, header: str | None = None) -> None:
    """Write events as 'u v 1 stamp' lines (readable by :func:`load`)."""
    with open(path, "w") as fh:
        if header:
            for line in header.splitlines():
                fh.write(f"% {line}\n")
        for ev in events:
            fh.write(f"{ev.u} {ev.v} 1 {ev.stamp}\n")


def read_config(path) -> dict:
    with open(path) as fh:
        return json.load(fh)

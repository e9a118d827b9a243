"""Partial-information view handed to selection policies.

A policy only sees the network through a :class:`PartialView`. The view knows
the accessible region of the previous access units (and every edge attached to
it); anything beyond that must be reached by walking, one inquired
neighbourhood at a time. Every query is appended to an audit log, and a query
about a node the walk could not have reached raises :class:`FirewallViolation`.

Legal subjects at any moment are the region itself, nodes adjacent to the
region, and nodes adjacent to a node whose neighbourhood was inquired.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass

from prowlnet.graph import Coverage, NetworkInstance, NodeId, UnknownNode, distance_levels


class FirewallViolation(RuntimeError):
    """A policy asked about a node outside what a walk could have reached."""


@dataclass(frozen=True)
class NeighborInfo:
    node: NodeId
    degree: int
    opinion: float


@dataclass(frozen=True)
class NeighborhoodReport:
    center: NodeId
    neighbors: tuple[NeighborInfo, ...]

    def degrees(self) -> dict[NodeId, int]:
        return {n.node: n.degree for n in self.neighbors}


@dataclass(frozen=True)
class Query:
    kind: str
    subject: NodeId | None
    tick: int


def b_radius(r: int) -> int:
    """r monus 1 as used for the B-set: r - 1, but 1 when r == 1."""
    return max(r - 1, 1)


class PartialView:
    """Audited window onto G_t for a single selection call.

    ``coverage`` may be supplied when the caller already maintains distances
    to ``access_units``; otherwise it is computed here.
    """

    def __init__(
        self,
        instance: NetworkInstance,
        access_units,
        r: int,
        coverage: Coverage | None = None,
        tick: int | None = None,
    ):
        self.instance = instance
        self.graph = instance.graph
        self.access_units = frozenset(access_units)
        self.r = r
        self.tick = instance.time if tick is None else tick
        self.coverage = coverage if coverage is not None else Coverage(instance.graph, r, self.access_units)
        self.visited_exterior: set[NodeId] = set()
        self.inquired: set[NodeId] = set()
        self.revealed: set[NodeId] = set()
        self.audit_log: list[Query] = []
        # B-set membership beyond one hop needs more than inquired neighbourhoods
        self.extended_queries = b_radius(r) > 1

    # ---- internals ----

    def _log(self, kind: str, subject=None) -> None:
        self.audit_log.append(Query(kind, subject, self.tick))

    def _dist(self, v: NodeId) -> int:
        try:
            return self.coverage.dist[v]
        except KeyError:
            raise UnknownNode(v) from None

    def _in_region(self, v: NodeId) -> bool:
        return self._dist(v) <= self.r

    def is_legal(self, v: NodeId) -> bool:
        return self._dist(v) <= self.r + 1 or v in self.revealed

    def _require_legal(self, kind: str, v: NodeId) -> None:
        if not self.is_legal(v):
            self._log("violation:" + kind, v)
            raise FirewallViolation(f"{kind}({v}) is beyond the walk's reach at tick {self.tick}")

    # ---- queries ----

    def accessible_region(self) -> set[NodeId]:
        self._log("region")
        return self.coverage.region() if self.access_units else set()

    def boundary_nodes(self) -> list[NodeId]:
        self._log("boundary")
        return self.coverage.boundary() if self.access_units else []

    def in_region(self, v: NodeId) -> bool:
        self._require_legal("in_region", v)
        self._log("in_region", v)
        return self._in_region(v)

    def exterior_neighbors(self, v: NodeId) -> list[NodeId]:
        """Neighbours of a region node that lie outside the region (known edges)."""
        if not self._in_region(v):
            self._log("violation:exterior_neighbors", v)
            raise FirewallViolation(f"exterior_neighbors({v}): node is not in the accessible region")
        self._log("exterior_neighbors", v)
        dist, r = self.coverage.dist, self.r
        return [u for u in self.graph.adj[v] if dist[u] > r]

    def region_nodes_outside_units(self) -> list[NodeId]:
        self._log("region")
        units = self.access_units
        return [v for v in self.coverage.region() if v not in units]

    def frontier_nodes(self) -> list[NodeId]:
        """Exterior nodes adjacent to the region."""
        self._log("frontier")
        adj, dist, r = self.graph.adj, self.coverage.dist, self.r
        out = set()
        for x in self.coverage.boundary():
            out.update(u for u in adj[x] if dist[u] > r)
        return list(out)

    def inquire(self, v: NodeId) -> NeighborhoodReport:
        """The 1+-neighbourhood of v: its neighbours with true degrees and opinions."""
        self._require_legal("inquire", v)
        self._log("inquire", v)
        inst = self.instance
        adj = self.graph.adj
        report = NeighborhoodReport(
            v, tuple(NeighborInfo(u, len(adj[u]), inst.opinion(u)) for u in sorted(adj[v]))
        )
        self.inquired.add(v)
        self.revealed.add(v)
        self.revealed.update(adj[v])
        if not self._in_region(v):
            self.visited_exterior.add(v)
        return report

    def degree(self, v: NodeId) -> int:
        if not (self._in_region(v) or v in self.revealed):
            self._log("violation:degree", v)
            raise FirewallViolation(f"degree({v}) not yet revealed")
        self._log("degree", v)
        return len(self.graph.adj[v])

    def n_degree(self, v: NodeId) -> int:
        """Neighbours of v outside the access neighbourhood of the current units."""
        self._require_legal("n_degree", v)
        self._log("n_degree", v)
        dist = self.coverage.dist
        return sum(1 for u in self.graph.adj[v] if dist[u] > 1)

    def in_bset(self, v: NodeId) -> bool:
        """Whether v is within r monus 1 of the exterior set."""
        self._require_legal("in_bset", v)
        self._log("in_bset", v)
        return in_bset(self.coverage, v)

    def sample_exterior(self, rng) -> NodeId:
        """Fallback when the exterior is non-empty but unreachable from the region."""
        if self.access_units and self.coverage.boundary():
            raise FirewallViolation("exterior sampling is only allowed when no boundary node exists")
        pool = sorted(self.coverage.exterior)
        v = pool[rng.randrange(len(pool))]
        self._log("sample_exterior", v)
        self.revealed.add(v)
        return v

    # ---- export ----

    def audit_jsonl(self) -> str:
        return "".join(json.dumps({"kind": q.kind, "subject": q.subject, "tick": q.tick}) + "\n" for q in self.audit_log)


def in_bset(coverage: Coverage, v: NodeId) -> bool:
    """Local BFS from v: is any exterior node within r monus 1?"""
    dist, r = coverage.dist, coverage.r
    if dist[v] > r:
        return True
    depth = b_radius(r)
    adj = coverage.graph.adj
    seen = {v}
    frontier = deque([(v, 0)])
    while frontier:
        x, d = frontier.popleft()
        if d == depth:
            continue
        for y in adj[x]:
            if y in seen:
                continue
            if dist[y] > r:
                return True
            seen.add(y)
            frontier.append((y, d + 1))
    return False


_SUBJECT_FREE = {"region", "boundary", "frontier"}


def replay_audit(instance: NetworkInstance, access_units, r: int, log) -> list[Query]:
    """Re-check an audit log against the graph with an independent BFS.

    Returns the entries that a walk could not legally have issued.
    """
    units = set(access_units)
    levels = distance_levels(instance.graph, units, r + 1) if units else {}
    adj = instance.graph.adj
    revealed: set = set()
    bad = []
    for q in log:
        kind, v = q.kind, q.subject
        if kind.startswith("violation:"):
            bad.append(q)
            continue
        if kind in _SUBJECT_FREE:
            continue
        if kind == "sample_exterior":
            has_boundary = any(
                levels.get(x) == r and any(y not in levels or levels[y] > r for y in adj[x]) for x in levels
            )
            if has_boundary or (v in levels and levels[v] <= r):
                bad.append(q)
            revealed.add(v)
            continue
        in_region = v in levels and levels[v] <= r
        legal = (v in levels) or v in revealed
        if kind == "exterior_neighbors":
            legal = in_region
        elif kind == "degree":
            legal = in_region or v in revealed
        if not legal:
            bad.append(q)
        if kind == "inquire":
            revealed.add(v)
            revealed.update(adj[v])
    return bad

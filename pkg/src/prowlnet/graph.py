"""Incremental undirected simple graph with radius-bounded distance queries.

Nodes only ever enter through an incident edge, so a degree-0 node cannot be
represented. Edges are never removed.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Union

import numpy as np

NodeId = int


class InvalidEvent(ValueError):
    """Raised for graph events that cannot be applied (e.g. self-loops)."""


class UnknownNode(KeyError):
    """Raised when a query names a node that is not in the graph."""


@dataclass(frozen=True)
class GraphEvent:
    u: NodeId
    v: NodeId
    stamp: int = 0
    kind: str = "edge"

    def __post_init__(self):
        if self.u == self.v:
            raise InvalidEvent(f"self-loop on node {self.u} at stamp {self.stamp}")
        if self.kind != "edge":
            raise InvalidEvent(f"unsupported event kind {self.kind!r}")

    @property
    def endpoints(self) -> tuple[NodeId, NodeId]:
        return (self.u, self.v)


class Graph:
    """Adjacency-set graph that also keeps a dense index per node.

    The dense index (insertion order) backs the numpy edge arrays used by the
    vectorised opinion update.
    """

    def __init__(self, edges: Iterable[tuple[NodeId, NodeId]] = ()):
        self.adj: dict[NodeId, set[NodeId]] = {}
        self.index: dict[NodeId, int] = {}
        self.order: list[NodeId] = []
        self._src = np.empty(64, dtype=np.int64)
        self._dst = np.empty(64, dtype=np.int64)
        self.n_edges = 0
        for u, v in edges:
            self.add_edge(u, v)

    def __len__(self) -> int:
        return len(self.order)

    def __contains__(self, v) -> bool:
        return v in self.adj

    def __iter__(self) -> Iterator[NodeId]:
        return iter(self.order)

    def _add_node(self, v: NodeId) -> None:
        self.adj[v] = set()
        self.index[v] = len(self.order)
        self.order.append(v)

    def add_edge(self, u: NodeId, v: NodeId) -> tuple[NodeId, ...] | None:
        """Insert {u, v}. Returns the endpoints that were new nodes, or None for a duplicate."""
        if u == v:
            raise InvalidEvent(f"self-loop on node {u}")
        adj = self.adj
        if u in adj and v in adj[u]:
            return None
        new = []
        for x in (u, v):
            if x not in adj:
                self._add_node(x)
                new.append(x)
        adj[u].add(v)
        adj[v].add(u)
        if self.n_edges == len(self._src):
            self._src = np.concatenate([self._src, np.empty_like(self._src)])
            self._dst = np.concatenate([self._dst, np.empty_like(self._dst)])
        self._src[self.n_edges] = self.index[u]
        self._dst[self.n_edges] = self.index[v]
        self.n_edges += 1
        return tuple(new)

    def has_edge(self, u: NodeId, v: NodeId) -> bool:
        return u in self.adj and v in self.adj[u]

    def neighbors(self, v: NodeId) -> set[NodeId]:
        try:
            return self.adj[v]
        except KeyError:
            raise UnknownNode(v) from None

    def degree(self, v: NodeId) -> int:
        return len(self.neighbors(v))

    def edges(self) -> set[tuple[NodeId, NodeId]]:
        order = self.order
        src, dst = self.edge_arrays()
        out = set()
        for a, b in zip(src.tolist(), dst.tolist()):
            u, v = order[a], order[b]
            out.add((u, v) if u <= v else (v, u))
        return out

    def edge_list(self) -> list[tuple[NodeId, NodeId]]:
        """Edges in insertion order."""
        order = self.order
        src, dst = self.edge_arrays()
        return [(order[a], order[b]) for a, b in zip(src.tolist(), dst.tolist())]

    def edge_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """Dense-index endpoint arrays (views, do not mutate)."""
        return self._src[: self.n_edges], self._dst[: self.n_edges]

    def copy(self) -> "Graph":
        g = Graph()
        g.adj = {v: set(nb) for v, nb in self.adj.items()}
        g.index = dict(self.index)
        g.order = list(self.order)
        g._src = self._src.copy()
        g._dst = self._dst.copy()
        g.n_edges = self.n_edges
        return g


@dataclass
class NetworkInstance:
    """Snapshot G_t: graph, opinions, access units and tick index.

    Opinions are stored as a float array aligned with ``graph.order``.
    """

    graph: Graph = field(default_factory=Graph)
    access_units: set[NodeId] = field(default_factory=set)
    time: int = 0
    _opinions: np.ndarray = field(default_factory=lambda: np.zeros(64))

    @classmethod
    def from_edges(cls, edges, access_units=(), opinions=None) -> "NetworkInstance":
        inst = cls()
        for u, v in edges:
            apply_event(inst, GraphEvent(u, v))
        for s in access_units:
            if s not in inst.graph:
                raise UnknownNode(s)
        inst.access_units = set(access_units)
        if opinions:
            for v, x in opinions.items():
                inst.set_opinion(v, x)
        return inst

    @property
    def nodes(self) -> set[NodeId]:
        return set(self.graph.adj)

    @property
    def edges(self) -> set[tuple[NodeId, NodeId]]:
        return self.graph.edges()

    def _grow(self, n: int) -> None:
        if n > len(self._opinions):
            size = max(n, 2 * len(self._opinions))
            grown = np.zeros(size)
            grown[: len(self._opinions)] = self._opinions
            self._opinions = grown

    def opinion_array(self) -> np.ndarray:
        """Opinions aligned with ``graph.order`` (a view)."""
        return self._opinions[: len(self.graph)]

    def set_opinion_array(self, values: np.ndarray) -> None:
        n = len(self.graph)
        self._grow(n)
        self._opinions[:n] = values

    def opinion(self, v: NodeId) -> float:
        try:
            return float(self._opinions[self.graph.index[v]])
        except KeyError:
            raise UnknownNode(v) from None

    def set_opinion(self, v: NodeId, x: float) -> None:
        if not 0.0 <= x <= 1.0:
            raise ValueError(f"opinion {x} outside [0, 1]")
        try:
            self._opinions[self.graph.index[v]] = x
        except KeyError:
            raise UnknownNode(v) from None

    @property
    def opinions(self) -> dict[NodeId, float]:
        return dict(zip(self.graph.order, self.opinion_array().tolist()))

    def committed_mask(self) -> np.ndarray:
        mask = np.zeros(len(self.graph), dtype=bool)
        index = self.graph.index
        for s in self.access_units:
            mask[index[s]] = True
        return mask

    def copy(self) -> "NetworkInstance":
        return NetworkInstance(
            graph=self.graph.copy(),
            access_units=set(self.access_units),
            time=self.time,
            _opinions=self._opinions.copy(),
        )


GraphLike = Union[Graph, NetworkInstance]


def _graph(g: GraphLike) -> Graph:
    return g.graph if isinstance(g, NetworkInstance) else g


def apply_event(instance: NetworkInstance, ev: GraphEvent) -> NetworkInstance:
    """Apply an edge arrival in place and return the instance.

    New endpoints start with opinion 0. Duplicate edges are a no-op.
    """
    if ev.u == ev.v:
        raise InvalidEvent(f"self-loop on node {ev.u}")
    new = instance.graph.add_edge(ev.u, ev.v)
    if new:
        instance._grow(len(instance.graph))
        for x in new:
            instance._opinions[instance.graph.index[x]] = 0.0
    return instance


def distance_levels(g: GraphLike, sources: Iterable[NodeId], r: int) -> dict[NodeId, int]:
    """Multi-source BFS truncated at depth r: node -> distance for every node within r."""
    graph = _graph(g)
    if r < 0:
        raise ValueError("radius must be non-negative")
    adj = graph.adj
    dist: dict[NodeId, int] = {}
    frontier = deque()
    for s in sources:
        if s not in adj:
            raise UnknownNode(s)
        if s not in dist:
            dist[s] = 0
            frontier.append(s)
    while frontier:
        x = frontier.popleft()
        d = dist[x]
        if d == r:
            continue
        for y in adj[x]:
            if y not in dist:
                dist[y] = d + 1
                frontier.append(y)
    return dist


def within_distance(g: GraphLike, sources: Iterable[NodeId], r: int) -> set[NodeId]:
    """Nodes at distance at most r from some source (the accessible region)."""
    return set(distance_levels(g, sources, r))


def degree(g: GraphLike, v: NodeId) -> int:
    return _graph(g).degree(v)


def is_dominating(g: GraphLike, S: Iterable[NodeId], r: int) -> bool:
    graph = _graph(g)
    return len(within_distance(graph, S, r)) == len(graph)


class Coverage:
    """Distances from a growing source set, maintained under edge insertions.

    Exact distances are kept up to ``r + 1``; anything farther is stored as
    ``r + 2``. Since edges and sources are only ever added, distances only
    decrease and each update is a local BFS from the changed nodes.

    Derived views: the accessible region (dist <= r), the access neighbourhood
    (dist <= 1), the exterior (dist > r) and the ring (dist == r).
    """

    def __init__(self, graph: Graph, r: int, sources: Iterable[NodeId] = ()):
        if r < 1:
            raise ValueError("radius must be >= 1")
        self.graph = graph
        self.r = r
        self.far = r + 2
        self.dist: dict[NodeId, int] = {}
        self.sources: set[NodeId] = set()
        self.exterior: set[NodeId] = set()
        self.ring: set[NodeId] = set()
        self.n_access_nb = 0
        self.entered_nb: list[NodeId] = []
        self._ac_mask = np.zeros(max(64, len(graph)), dtype=bool)
        for v in graph.order:
            self.add_node(v)
        for s in sources:
            self.add_source(s)

    def add_node(self, v: NodeId) -> None:
        self.dist[v] = self.far
        self.exterior.add(v)
        i = self.graph.index[v]
        if i >= len(self._ac_mask):
            grown = np.zeros(2 * len(self._ac_mask) + i, dtype=bool)
            grown[: len(self._ac_mask)] = self._ac_mask
            self._ac_mask = grown

    def _lower(self, v: NodeId, d: int) -> None:
        old = self.dist[v]
        self.dist[v] = d
        r = self.r
        if old > r >= d:
            self.exterior.discard(v)
            self._ac_mask[self.graph.index[v]] = True
        if old == r:
            self.ring.discard(v)
        if d == r:
            self.ring.add(v)
        if old > 1 >= d:
            self.n_access_nb += 1
            self.entered_nb.append(v)

    def _propagate(self, queue: deque) -> None:
        adj = self.graph.adj
        dist = self.dist
        r = self.r
        while queue:
            x = queue.popleft()
            nd = dist[x] + 1
            if nd > r + 1:
                continue
            for y in adj[x]:
                if nd < dist[y]:
                    self._lower(y, nd)
                    if nd <= r:
                        queue.append(y)

    def add_edge(self, u: NodeId, v: NodeId) -> None:
        """Account for a freshly inserted edge (both endpoints already registered)."""
        du, dv = self.dist[u], self.dist[v]
        queue = deque()
        if du + 1 < dv:
            self._lower(v, du + 1)
            queue.append(v)
        elif dv + 1 < du:
            self._lower(u, dv + 1)
            queue.append(u)
        self._propagate(queue)

    def add_source(self, s: NodeId) -> None:
        if s not in self.dist:
            raise UnknownNode(s)
        self.sources.add(s)
        if self.dist[s] > 0:
            self._lower(s, 0)
            self._propagate(deque([s]))

    # ---- queries ----

    def in_region(self, v: NodeId) -> bool:
        return self.dist[v] <= self.r

    def region(self) -> set[NodeId]:
        r = self.r
        return {v for v, d in self.dist.items() if d <= r}

    def access_neighborhood(self) -> set[NodeId]:
        return {v for v, d in self.dist.items() if d <= 1}

    def n_region(self) -> int:
        return len(self.dist) - len(self.exterior)

    def is_dominating(self) -> bool:
        return not self.exterior

    def boundary(self) -> list[NodeId]:
        """Region nodes with an edge leaving the region (only ring nodes qualify)."""
        adj = self.graph.adj
        dist = self.dist
        r = self.r
        return [x for x in self.ring if any(dist[y] > r for y in adj[x])]

    def region_mask(self) -> np.ndarray:
        return self._ac_mask[: len(self.graph)]

    def take_entered(self) -> list[NodeId]:
        out, self.entered_nb = self.entered_nb, []
        return out

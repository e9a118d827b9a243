"""Seeded dynamic network models emitting unit-growth edge-event streams.

Four models: Barabasi-Albert (BA), a three-community stochastic block model
(SB), Jackson-Rogers meeting model (JR) and a rich-club model (RC). Each tick
adds at most one node. All models start from a complete graph on
``avg_degree / 2 + 1`` nodes and are grown to the requested initial size
before the centralization process starts.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from prowlnet.graph import GraphEvent, NetworkInstance, apply_event

MODELS = ("BA", "SB", "JR", "RC")


@dataclass
class GeneratorSpec:
    model: str
    n: int = 5000
    avg_degree: int = 6
    seed: int = 0
    c: float = 1 / 6
    p: float = 0.5
    m_r: int | None = None
    m_n: int | None = None
    alpha: float | None = None

    def __post_init__(self):
        self.model = self.model.upper()
        if self.model not in MODELS:
            raise ValueError(f"unknown model {self.model!r}; choose from {', '.join(MODELS)}")
        d = self.avg_degree
        if d < 2:
            raise ValueError("average degree must be >= 2")
        if self.model in ("BA", "JR") and d % 2:
            raise ValueError(f"{self.model} needs an even average degree")
        if self.n < d:
            raise ValueError("initial size must be at least the average degree")
        if self.alpha is None:
            self.alpha = 2 / d
        if not 0 < self.alpha <= 1:
            raise ValueError("alpha must lie in (0, 1]")
        if self.m_r is None:
            self.m_r = d // 2
        if self.m_n is None:
            self.m_n = d // 2


class DynamicModel:
    """Base class. Keeps its own adjacency so it never reads the simulated instance."""

    def __init__(self, spec: GeneratorSpec):
        self.spec = spec
        self.rng = np.random.default_rng([spec.seed, MODELS.index(spec.model)])
        self.adj: dict[int, set[int]] = {}
        self.order: list[int] = []
        self.tick = 0
        self._next = 0

    def _new_id(self) -> int:
        v = self._next
        self._next += 1
        return v

    def _link(self, u: int, v: int, out: list) -> None:
        for x in (u, v):
            if x not in self.adj:
                self.adj[x] = set()
                self.order.append(x)
        self.adj[u].add(v)
        self.adj[v].add(u)
        out.append(GraphEvent(u, v, self.tick))

    def bootstrap(self) -> list[GraphEvent]:
        size = self.spec.avg_degree // 2 + 1
        nodes = [self._new_id() for _ in range(size)]
        out: list[GraphEvent] = []
        for i, u in enumerate(nodes):
            for v in nodes[i + 1 :]:
                self._link(u, v, out)
        for v in nodes:
            self._registered(v)
        return out

    def _registered(self, v: int) -> None:
        """Hook for models that track extra per-node state."""

    def next_events(self) -> list[GraphEvent]:
        """Events of one tick (at most one new node)."""
        self.tick += 1
        return self._tick()

    def _tick(self) -> list[GraphEvent]:
        raise NotImplementedError

    @property
    def n_nodes(self) -> int:
        return len(self.adj)

    def warmup(self) -> list[GraphEvent]:
        """Bootstrap and grow to the initial size; returns all events in order."""
        events = self.bootstrap()
        while self.n_nodes < self.spec.n:
            events.extend(self.next_events())
        return events


class _DegreePool:
    """Endpoint multiset for degree-proportional sampling."""

    def __init__(self):
        self.items: list[int] = []

    def add_edge(self, u, v):
        self.items.append(u)
        self.items.append(v)

    def sample(self, rng) -> int:
        return self.items[int(rng.integers(len(self.items)))]


class BarabasiAlbert(DynamicModel):
    def __init__(self, spec):
        super().__init__(spec)
        self.pool = _DegreePool()
        self.m = spec.avg_degree // 2

    def _link(self, u, v, out):
        super()._link(u, v, out)
        self.pool.add_edge(u, v)

    def _tick(self):
        targets: set[int] = set()
        while len(targets) < self.m:
            targets.add(self.pool.sample(self.rng))
        v = self._new_id()
        out: list[GraphEvent] = []
        for u in sorted(targets):
            self._link(v, u, out)
        return out


class StochasticBlock(DynamicModel):
    """Three equal-probability communities.

    A newcomer arriving when the network has n_t nodes links to each
    same-community node with probability p_in = 3 d / (2 n_t (1 + 2c)) and to
    each other node with c p_in, giving d/2 expected edges. Draws that produce
    no edge are repeated.
    """

    n_blocks = 3

    def __init__(self, spec):
        super().__init__(spec)
        self.blocks: list[list[int]] = [[] for _ in range(self.n_blocks)]
        self.block_of: dict[int, int] = {}

    def _registered(self, v):
        b = v % self.n_blocks
        self.blocks[b].append(v)
        self.block_of[v] = b

    def _draw(self, members: list[int], p: float) -> list[int]:
        if not members or p <= 0:
            return []
        count = int(self.rng.binomial(len(members), min(p, 1.0)))
        if count == 0:
            return []
        idx = self.rng.choice(len(members), size=count, replace=False)
        return [members[i] for i in sorted(idx.tolist())]

    def _tick(self):
        spec = self.spec
        n_t = self.n_nodes
        p_in = 3 * spec.avg_degree / (2 * n_t * (1 + 2 * spec.c))
        b = int(self.rng.integers(self.n_blocks))
        targets: list[int] = []
        for _ in range(100):
            targets = []
            for j, members in enumerate(self.blocks):
                targets += self._draw(members, p_in if j == b else spec.c * p_in)
            if targets:
                break
        if not targets:
            pool = self.blocks[b] or self.order
            targets = [pool[int(self.rng.integers(len(pool)))]]
        v = self._new_id()
        out: list[GraphEvent] = []
        for u in sorted(targets):
            self._link(v, u, out)
        self.blocks[b].append(v)
        self.block_of[v] = b
        return out


class JacksonRogers(DynamicModel):
    """Newcomer meets m_r random parents and m_n random neighbours of parents,
    linking to each met node independently with probability p."""

    def _tick(self):
        spec = self.spec
        nodes = self.order
        for _ in range(100):
            k_r = min(spec.m_r, len(nodes))
            parents = [nodes[i] for i in self.rng.choice(len(nodes), size=k_r, replace=False)]
            pool = sorted(set().union(*(self.adj[x] for x in parents)) - set(parents))
            k_n = min(spec.m_n, len(pool))
            friends = [pool[i] for i in self.rng.choice(len(pool), size=k_n, replace=False)] if k_n else []
            met = parents + friends
            keep = self.rng.random(len(met)) < spec.p
            targets = [u for u, kept in zip(met, keep) if kept]
            if targets:
                break
        else:
            targets = [nodes[int(self.rng.integers(len(nodes)))]]
        v = self._new_id()
        out: list[GraphEvent] = []
        for u in sorted(targets):
            self._link(v, u, out)
        return out


class RichClub(DynamicModel):
    """With probability alpha a newcomer attaches to one degree-proportional node;
    otherwise an edge joins two degree-proportional existing nodes."""

    max_retries = 50

    def __init__(self, spec):
        super().__init__(spec)
        self.pool = _DegreePool()

    def _link(self, u, v, out):
        super()._link(u, v, out)
        self.pool.add_edge(u, v)

    def _tick(self):
        out: list[GraphEvent] = []
        if self.rng.random() < self.spec.alpha:
            u = self.pool.sample(self.rng)
            self._link(self._new_id(), u, out)
            return out
        for _ in range(self.max_retries):
            a, b = self.pool.sample(self.rng), self.pool.sample(self.rng)
            if a != b and b not in self.adj[a]:
                self._link(min(a, b), max(a, b), out)
                break
        return out


_CLASSES = {"BA": BarabasiAlbert, "SB": StochasticBlock, "JR": JacksonRogers, "RC": RichClub}


def make_model(spec: GeneratorSpec) -> DynamicModel:
    return _CLASSES[spec.model](spec)


def synthetic_start(spec: GeneratorSpec) -> tuple[NetworkInstance, DynamicModel]:
    """Warm a model up to its initial size; returns G_0 and the live model as event source."""
    model = make_model(spec)
    inst = NetworkInstance()
    for ev in model.warmup():
        apply_event(inst, ev)
    return inst, model

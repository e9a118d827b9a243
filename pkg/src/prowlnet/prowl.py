"""Access-unit selection policies and the structural sets they rely on.

Seven policies share one interface:

* ``lran`` / ``ldeg`` pick without walking: a random node adjacent to the
  accessible region, or the region node with the highest N-degree.
* ``xran`` / ``xdeg`` walk inside the exterior set X (random / strictly
  degree-ascending).
* ``bran`` / ``bdeg`` / ``bnde`` walk inside the B-set (random / degree-ascending
  / N-degree-ascending while inside the region).

Every walk starts at a random boundary node ``w0`` of the region and first
steps to a random neighbour ``w1`` outside it; at most ``k`` edges are walked
and the last node is returned.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from functools import cached_property

from prowlnet.graph import Coverage, NetworkInstance, NodeId, UnknownNode, within_distance
from prowlnet.observation import PartialView, Query, b_radius, in_bset

POLICIES = ("lran", "ldeg", "xran", "xdeg", "bran", "bdeg", "bnde")
PROWLING = ("xran", "xdeg", "bran", "bdeg", "bnde")
EXTERIOR_BASED = ("xran", "xdeg")
BSET_BASED = ("bran", "bdeg", "bnde")


class NothingToDo(Exception):
    """The current access units already dominate; no selection is needed."""


class PostconditionError(AssertionError):
    pass


def exterior_set(instance: NetworkInstance, S, r: int) -> set[NodeId]:
    S = set(S)
    return instance.nodes - within_distance(instance, S, r) if S else instance.nodes


def b_set(instance: NetworkInstance, S, r: int) -> set[NodeId]:
    if r < 1:
        raise ValueError("B-set needs r >= 1")
    X = exterior_set(instance, S, r)
    return within_distance(instance, X, b_radius(r)) if X else set()


def access_neighborhood(instance: NetworkInstance, S) -> set[NodeId]:
    S = set(S)
    return within_distance(instance, S, 1) if S else set()


def n_degree(instance: NetworkInstance, S, v: NodeId) -> int:
    if v not in instance.graph:
        raise UnknownNode(v)
    nb = access_neighborhood(instance, S)
    return sum(1 for u in instance.graph.adj[v] if u not in nb)


class StructuralSets:
    """X_t, B_t, N_t and its complement for units S at radius r.

    Full sets are computed lazily; membership tests go through the maintained
    coverage so they stay cheap inside a simulation.
    """

    def __init__(self, instance: NetworkInstance, S, r: int, coverage: Coverage | None = None):
        self.instance = instance
        self.S = frozenset(S)
        self.r = r
        self.coverage = coverage if coverage is not None else Coverage(instance.graph, r, self.S)

    @cached_property
    def exterior(self) -> set[NodeId]:
        return set(self.coverage.exterior)

    @cached_property
    def bset(self) -> set[NodeId]:
        X = self.exterior
        return within_distance(self.instance, X, b_radius(self.r)) if X else set()

    @cached_property
    def access_nb(self) -> set[NodeId]:
        return self.coverage.access_neighborhood()

    @cached_property
    def anti_nb(self) -> set[NodeId]:
        return self.instance.nodes - self.access_nb

    def is_exterior(self, v: NodeId) -> bool:
        return self.coverage.dist[v] > self.r

    def is_bset(self, v: NodeId) -> bool:
        return in_bset(self.coverage, v)


@dataclass
class ProwlTrace:
    policy: str
    tick: int
    walk: list[NodeId]
    chosen: NodeId
    queries: list[Query] = field(default_factory=list)
    n_queries: int = 0
    fallback: bool = False

    def to_dict(self, with_queries: bool = False) -> dict:
        out = {
            "policy": self.policy,
            "tick": self.tick,
            "walk": list(self.walk),
            "chosen": self.chosen,
            "n_queries": self.n_queries,
            "fallback": self.fallback,
        }
        if with_queries:
            out["queries"] = [[q.kind, q.subject, q.tick] for q in self.queries]
        return out


class Policy:
    """Base class: seeded RNG, tie-breaking helpers, trace assembly."""

    name = ""

    def __init__(self, k: int = 4, seed: int = 0):
        if k < 1:
            raise ValueError("k must be >= 1")
        self.k = k
        self.seed = seed
        self.rng = random.Random(f"{seed}:{self.name}")

    def _choice(self, nodes):
        nodes = sorted(nodes)
        return nodes[self.rng.randrange(len(nodes))] if nodes else None

    def _argmax(self, scored):
        """Random tie-break among (node, score) pairs with the top score."""
        if not scored:
            return None
        top = max(s for _, s in scored)
        return self._choice([v for v, s in scored if s == top])

    def _trace(self, view: PartialView, walk, fallback=False) -> ProwlTrace:
        return ProwlTrace(
            self.name, view.tick, list(walk), walk[-1], list(view.audit_log), len(view.audit_log), fallback
        )

    def select(self, view: PartialView) -> ProwlTrace:
        raise NotImplementedError

    def __repr__(self):
        return f"{type(self).__name__}(k={self.k}, seed={self.seed})"


class LocalRandom(Policy):
    name = "lran"

    def select(self, view):
        v = self._choice(view.frontier_nodes())
        if v is None:
            return self._trace(view, [view.sample_exterior(self.rng)], fallback=True)
        return self._trace(view, [v])


class LocalDegree(Policy):
    name = "ldeg"

    def select(self, view):
        scored = [(v, view.n_degree(v)) for v in view.region_nodes_outside_units()]
        v = self._argmax(scored)
        if v is None:
            return self._trace(view, [view.sample_exterior(self.rng)], fallback=True)
        return self._trace(view, [v])


class _Prowler(Policy):
    """k-step walk: boundary node, one step out of the region, then ``step``."""

    def step(self, view: PartialView, w: NodeId):
        raise NotImplementedError

    def select(self, view):
        w0 = self._choice(view.boundary_nodes())
        if w0 is None:
            return self._trace(view, [view.sample_exterior(self.rng)], fallback=True)
        walk = [w0, self._choice(view.exterior_neighbors(w0))]
        while len(walk) - 1 < self.k:
            nxt = self.step(view, walk[-1])
            if nxt is None:
                break
            walk.append(nxt)
        return self._trace(view, walk)


class ExteriorRandom(_Prowler):
    name = "xran"

    def step(self, view, w):
        report = view.inquire(w)
        return self._choice([n.node for n in report.neighbors if not view.in_region(n.node)])


class ExteriorDegree(_Prowler):
    name = "xdeg"

    def step(self, view, w):
        report = view.inquire(w)
        here = len(report.neighbors)
        return self._argmax(
            [(n.node, n.degree) for n in report.neighbors if n.degree > here and not view.in_region(n.node)]
        )


class BsetRandom(_Prowler):
    name = "bran"

    def step(self, view, w):
        report = view.inquire(w)
        return self._choice([n.node for n in report.neighbors if view.in_bset(n.node)])


class BsetDegree(_Prowler):
    name = "bdeg"

    def step(self, view, w):
        report = view.inquire(w)
        here = len(report.neighbors)
        return self._argmax([(n.node, n.degree) for n in report.neighbors if n.degree > here and view.in_bset(n.node)])


class BsetNdegree(_Prowler):
    name = "bnde"

    def step(self, view, w):
        report = view.inquire(w)
        if view.in_region(w):
            # inside the region the access neighbourhood is visible, so rank by N-degree
            here = view.n_degree(w)
            scored = []
            for n in report.neighbors:
                if view.in_bset(n.node):
                    nd = view.n_degree(n.node)
                    if nd > here:
                        scored.append((n.node, nd))
            return self._argmax(scored)
        here = len(report.neighbors)
        return self._argmax([(n.node, n.degree) for n in report.neighbors if n.degree > here and view.in_bset(n.node)])


_REGISTRY = {
    cls.name: cls
    for cls in (LocalRandom, LocalDegree, ExteriorRandom, ExteriorDegree, BsetRandom, BsetDegree, BsetNdegree)
}


def make_policy(name: str, k: int = 4, seed: int = 0) -> Policy:
    try:
        return _REGISTRY[name](k=k, seed=seed)
    except KeyError:
        raise ValueError(f"unknown policy {name!r}; choose from {', '.join(POLICIES)}") from None


def select(policy: Policy, view: PartialView, sets: StructuralSets | None = None) -> ProwlTrace:
    """Run one selection and check the policy's output-set postconditions."""
    if not view.access_units:
        raise ValueError("prowling needs a non-empty access-unit set; seed the first unit directly")
    if not view.coverage.exterior:
        raise NothingToDo("access units already dominate")
    trace = policy.select(view)
    if sets is None:
        sets = StructuralSets(view.instance, view.access_units, view.r, coverage=view.coverage)
    chosen = trace.chosen
    adj = view.graph.adj
    if chosen in view.access_units:
        raise PostconditionError(f"{policy.name} re-selected access unit {chosen}")
    if policy.name in EXTERIOR_BASED and not sets.is_exterior(chosen):
        raise PostconditionError(f"{policy.name} returned {chosen} outside the exterior set")
    if policy.name in BSET_BASED and not sets.is_bset(chosen):
        raise PostconditionError(f"{policy.name} returned {chosen} outside the B-set")
    for a, b in zip(trace.walk, trace.walk[1:]):
        if b not in adj[a]:
            raise PostconditionError(f"walk step {a}->{b} is not an edge")
    if len(trace.walk) - 1 > policy.k:
        raise PostconditionError("walk longer than k")
    return trace

"""Brute-force references for small graphs.

Nothing here touches ``prowlnet.graph`` BFS or ``prowlnet.dynamics``: these
functions exist to catch bugs shared by the fast paths.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

INF = float("inf")


class GraphTooLarge(ValueError):
    pass


@dataclass(frozen=True)
class SmallGraph:
    adj: dict

    @classmethod
    def from_edges(cls, edges, nodes=()):
        adj: dict = {v: set() for v in nodes}
        for u, v in edges:
            if u == v:
                continue
            adj.setdefault(u, set()).add(v)
            adj.setdefault(v, set()).add(u)
        return cls({v: frozenset(nb) for v, nb in adj.items()})

    @property
    def nodes(self):
        return sorted(self.adj)

    def __len__(self):
        return len(self.adj)


def all_pairs_distances(g: SmallGraph) -> dict:
    """Floyd-Warshall; returns dist[(u, v)] with inf for disconnected pairs."""
    nodes = g.nodes
    dist = {(u, v): (0 if u == v else (1 if v in g.adj[u] else INF)) for u in nodes for v in nodes}
    for w in nodes:
        for u in nodes:
            duw = dist[(u, w)]
            if duw == INF:
                continue
            for v in nodes:
                alt = duw + dist[(w, v)]
                if alt < dist[(u, v)]:
                    dist[(u, v)] = alt
    return dist


def covered_by(g: SmallGraph, S, r, dist=None) -> set:
    dist = dist if dist is not None else all_pairs_distances(g)
    return {v for v in g.nodes if any(dist[(s, v)] <= r for s in S)}


def dominates(g: SmallGraph, S, r, dist=None) -> bool:
    return len(covered_by(g, S, r, dist)) == len(g)


def min_dominating_set(g: SmallGraph, r: int, max_nodes: int = 40) -> tuple[int, set]:
    """Exact minimum distance-r dominating set by iterative-deepening branch and bound."""
    n = len(g)
    if n > max_nodes:
        raise GraphTooLarge(f"{n} nodes exceeds limit {max_nodes}")
    if n == 0:
        return 0, set()
    nodes = g.nodes
    pos = {v: i for i, v in enumerate(nodes)}
    dist = all_pairs_distances(g)
    cover = [0] * n
    for u in nodes:
        for v in nodes:
            if dist[(u, v)] <= r:
                cover[pos[u]] |= 1 << pos[v]
    # coverers[v] = nodes whose ball contains v, best first
    coverers = [sorted((i for i in range(n) if cover[i] >> v & 1), key=lambda i: -bin(cover[i]).count("1")) for v in range(n)]
    best_ball = max(bin(c).count("1") for c in cover)
    full = (1 << n) - 1

    def search(covered, budget, chosen):
        if covered == full:
            return chosen
        if budget == 0:
            return None
        missing = bin(full & ~covered).count("1")
        if missing > budget * best_ball:
            return None
        # branch on the uncovered node with the fewest coverers
        rest = full & ~covered
        target, fewest = -1, n + 1
        while rest:
            low = rest & -rest
            v = low.bit_length() - 1
            if len(coverers[v]) < fewest:
                target, fewest = v, len(coverers[v])
            rest ^= low
        for i in coverers[target]:
            found = search(covered | cover[i], budget - 1, chosen + [i])
            if found is not None:
                return found
        return None

    for k in range(1, n + 1):
        found = search(0, k, [])
        if found is not None:
            return k, {nodes[i] for i in found}
    raise AssertionError("unreachable: the full node set dominates")


def min_dominating_size_exhaustive(g: SmallGraph, r: int) -> int:
    """Plain subset enumeration; only for very small graphs."""
    dist = all_pairs_distances(g)
    nodes = g.nodes
    for k in range(0, len(nodes) + 1):
        for S in combinations(nodes, k):
            if dominates(g, S, r, dist):
                return k
    return len(nodes)


def greedy_dominating_set(g: SmallGraph, r: int) -> set:
    """Repeatedly take the node whose radius-r ball covers the most uncovered nodes."""
    dist = all_pairs_distances(g)
    nodes = g.nodes
    ball = {u: {v for v in nodes if dist[(u, v)] <= r} for u in nodes}
    uncovered = set(nodes)
    chosen = set()
    while uncovered:
        u = max(nodes, key=lambda x: (len(ball[x] & uncovered), -nodes.index(x)))
        chosen.add(u)
        uncovered -= ball[u]
    return chosen


def reference_degroot_step(adj: dict, opinions: dict, S, r: int) -> dict:
    """Naive synchronous update: committed -> 1, outside region -> neighbour mean,
    inside region -> (1 + sum of free neighbours) / (1 + number of free neighbours)."""
    S = set(S)
    # region by repeated frontier expansion, no shared BFS code
    region = set(S)
    for _ in range(r):
        region = region | {w for x in region for w in adj[x]}
    out = {}
    for v in adj:
        nbrs = list(adj[v])
        if v in S:
            out[v] = 1.0
        elif v not in region:
            if nbrs:
                total = 0.0
                for u in nbrs:
                    total += opinions[u]
                out[v] = total / len(nbrs)
            else:
                out[v] = opinions[v]
        else:
            free = [u for u in nbrs if u not in S]
            total = 1.0
            for u in free:
                total += opinions[u]
            out[v] = total / (1 + len(free))
    return out


def iterate_until(adj: dict, opinions: dict, S, r: int, threshold: float, max_steps: int = 100_000) -> int:
    """Step count until every opinion reaches ``threshold`` (brute force)."""
    cur = dict(opinions)
    for step in range(max_steps + 1):
        if min(cur.values()) >= threshold:
            return step
        cur = reference_degroot_step(adj, cur, S, r)
    raise RuntimeError("no convergence")

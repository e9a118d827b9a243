"""Cross-checks of the fast code paths against the brute-force oracle.

Used by ``prowlnet verify`` and by the test suite.
"""

from __future__ import annotations

import random

import numpy as np

from prowlnet import fixtures
from prowlnet.controller import RunConfig, run
from prowlnet.dynamics import step_opinions
from prowlnet.graph import NetworkInstance, is_dominating
from prowlnet.oracle import (
    SmallGraph,
    dominates,
    greedy_dominating_set,
    min_dominating_set,
    min_dominating_size_exhaustive,
    reference_degroot_step,
)
from prowlnet.prowl import EXTERIOR_BASED, PROWLING


def random_instance(rng: random.Random, max_nodes: int = 15) -> tuple[NetworkInstance, int]:
    """A random graph with random opinions and units, plus a radius.

    Graphs may be disconnected; every node has at least one edge because
    nodes only enter through edges.
    """
    n = rng.randint(2, max_nodes)
    p = rng.uniform(0.05, 0.6)
    edges = [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < p]
    if not edges:
        edges = [(0, 1)]
    inst = NetworkInstance.from_edges(edges)
    nodes = sorted(inst.nodes)
    inst.access_units = set(rng.sample(nodes, rng.randint(0, len(nodes))))
    for v in nodes:
        inst.set_opinion(v, 1.0 if v in inst.access_units else rng.random())
    return inst, rng.randint(1, 4)


def step_discrepancy(inst: NetworkInstance, r: int) -> float:
    fast = step_opinions(inst, r)
    adj = {v: set(nb) for v, nb in inst.graph.adj.items()}
    ref = reference_degroot_step(adj, inst.opinions, inst.access_units, r)
    return max(abs(fast[v] - ref[v]) for v in adj)


def check_step_equivalence(instances: int = 1000, seed: int = 0, tol: float = 1e-12):
    rng = random.Random(seed)
    worst = 0.0
    for _ in range(instances):
        inst, r = random_instance(rng)
        worst = max(worst, step_discrepancy(inst, r))
    return worst <= tol, f"max |fast - reference| = {worst:.3g} over {instances} instances"


def check_small_minimums():
    cases = {
        "star K1,4 r=1": (SmallGraph.from_edges([(0, i) for i in range(1, 5)]), 1, 1),
        "path P5 r=1": (SmallGraph.from_edges([(i, i + 1) for i in range(4)]), 1, 2),
        "cycle C6 r=1": (SmallGraph.from_edges([(i, (i + 1) % 6) for i in range(6)]), 1, 2),
    }
    bad = []
    for name, (g, r, expect) in cases.items():
        size, witness = min_dominating_set(g, r)
        if size != expect or size != min_dominating_size_exhaustive(g, r) or not dominates(g, witness, r):
            bad.append(name)
        if not dominates(g, greedy_dominating_set(g, r), r):
            bad.append(name + " greedy")
    return not bad, "all small cases agree" if not bad else f"mismatch: {bad}"


def fixture_costs(r: int = 2, seeds=range(10)) -> dict[str, list[int]]:
    inst = fixtures.hub_fixture()
    out = {}
    for policy in PROWLING:
        costs = []
        for s in seeds:
            rec = run(None, RunConfig(policy=policy, r=r, seed=s, seed_node=fixtures.SEED_NODE), inst)
            if not is_dominating(rec.snapshot, rec.snapshot.access_units, r):
                raise AssertionError(f"{policy} seed {s}: reported domination does not verify")
            costs.append(rec.domination_units)
        out[policy] = costs
    return out


def check_fixture(r: int = 2):
    g = SmallGraph.from_edges(fixtures.HUB_EDGES)
    size, _ = min_dominating_set(g, r)
    costs = fixture_costs(r)
    x_mean = min(np.mean(costs[p]) for p in EXTERIOR_BASED)
    ok = size == fixtures.MIN_DOMINATING_R2 and all(c > size for p in EXTERIOR_BASED for c in costs[p])
    ok = ok and np.mean(costs["bdeg"]) <= x_mean and np.mean(costs["bnde"]) <= x_mean
    means = ", ".join(f"{p}={np.mean(c):.1f}" for p, c in costs.items())
    return ok, f"minimum {size}; mean costs {means}"


def run_checks(instances: int = 1000, seed: int = 0):
    yield ("step equivalence", *check_step_equivalence(instances, seed))
    yield ("small minimum dominating sets", *check_small_minimums())
    yield ("hub fixture", *check_fixture())

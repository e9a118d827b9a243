"""Small static graphs shared by tests, the CLI ``verify`` command and docs.

``hub_fixture`` is a 33-node, 51-edge network built around six hubs (4..9).
Each hub owns a small spoke triangle with two pendant leaves hanging off the
spokes; hubs are joined by a 6-cycle with three chords, and three connector
nodes (1, 2, 3) form a triangle that touches the hubs. With r = 2 the six hubs
form a minimum dominating set, and no five nodes dominate: every leaf can only
be reached from inside its own cluster.

Prowling from hub 4 shows the gap between walk families: a walk confined to
the exterior set ends on leaves and spokes far from their hub, while a B-set
walk can step back towards the hub and cover a whole cluster at once.
"""

from __future__ import annotations

from prowlnet.graph import NetworkInstance

HUBS = (4, 5, 6, 7, 8, 9)
CONNECTORS = (1, 2, 3)
SEED_NODE = 4
MIN_DOMINATING_R2 = 6  # checked against the exact search in the oracle tests


def _hub_edges() -> list[tuple[int, int]]:
    edges = []
    nxt = 10
    for h in HUBS:
        s1, l1, s2, l2 = nxt, nxt + 1, nxt + 2, nxt + 3
        nxt += 4
        edges += [(h, s1), (s1, l1), (h, s2), (s2, l2), (s1, s2)]
    edges += [(4, 5), (5, 6), (6, 7), (7, 8), (8, 9), (9, 4)]
    edges += [(4, 7), (5, 8), (6, 9)]
    edges += [(1, 4), (1, 5), (1, 6), (2, 6), (2, 7), (2, 8), (3, 8), (3, 9), (3, 4)]
    edges += [(1, 2), (2, 3), (1, 3)]
    return edges


HUB_EDGES = tuple(_hub_edges())


def hub_fixture() -> NetworkInstance:
    return NetworkInstance.from_edges(HUB_EDGES)


def path_abc() -> NetworkInstance:
    """Path a-b-c with integer labels 0-1-2."""
    return NetworkInstance.from_edges([(0, 1), (1, 2)])


# s-a, a-b, b-c, b-d, c-d: used to contrast exterior and B-set walks
WALK_EDGES = (("s", "a"), ("a", "b"), ("b", "c"), ("b", "d"), ("c", "d"))


def walk_fixture() -> NetworkInstance:
    return NetworkInstance.from_edges(WALK_EDGES)

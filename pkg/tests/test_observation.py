import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from prowlnet.graph import NetworkInstance, within_distance
from prowlnet.observation import FirewallViolation, PartialView, Query, b_radius, replay_audit
from prowlnet.prowl import POLICIES, Policy, make_policy, select


def test_region_examples(path_abc, path5):
    assert PartialView(path_abc, set(), 1).accessible_region() == set()
    assert PartialView(path_abc, {"a"}, 1).accessible_region() == {"a", "b"}
    assert PartialView(path5, {"a"}, 2).accessible_region() == {"a", "b", "c"}


def test_boundary_examples(path_abc):
    assert PartialView(path_abc, {"b"}, 1).boundary_nodes() == []
    assert PartialView(path_abc, {"a"}, 1).boundary_nodes() == ["b"]
    assert PartialView(path_abc, set(), 1).boundary_nodes() == []


def test_inquire_returns_true_degrees(path_abc, star):
    rep = PartialView(path_abc, {"a"}, 1).inquire("b")
    assert rep.degrees() == {"a": 1, "c": 1}
    rep = PartialView(star, {1}, 1).inquire(0)
    assert rep.degrees() == {1: 1, 2: 1, 3: 1, 4: 1}


def test_inquire_beyond_reach_is_refused(path5):
    view = PartialView(path5, {"a"}, 1)
    with pytest.raises(FirewallViolation):
        view.inquire("d")
    assert view.audit_log[-1].kind == "violation:inquire"


def test_walk_extends_legal_set_one_hop_at_a_time(path5):
    view = PartialView(path5, {"a"}, 1)
    view.inquire("c")  # one hop outside the region
    with pytest.raises(FirewallViolation):
        view.inquire("e")  # not yet revealed
    view.inquire("d")  # revealed by c
    view.inquire("e")  # revealed by d
    legal = [q for q in view.audit_log if not q.kind.startswith("violation")]
    assert replay_audit(path5, {"a"}, 1, legal) == []


def test_degree_requires_reveal(path5):
    view = PartialView(path5, {"a"}, 1)
    with pytest.raises(FirewallViolation):
        view.degree("c")
    view.inquire("b")
    assert view.degree("c") == 2


def test_exterior_neighbors_only_from_region(path5):
    view = PartialView(path5, {"a"}, 1)
    assert view.exterior_neighbors("b") == ["c"]
    with pytest.raises(FirewallViolation):
        view.exterior_neighbors("c")


def test_audit_log_is_append_only(path5):
    view = PartialView(path5, {"a"}, 2, tick=7)
    seen = []
    for call in (view.boundary_nodes, lambda: view.inquire("c"), lambda: view.in_bset("d"), lambda: view.n_degree("b")):
        call()
        assert view.audit_log[: len(seen)] == seen
        seen = list(view.audit_log)
    assert all(q.tick == 7 for q in view.audit_log)
    assert view.audit_jsonl().count("\n") == len(view.audit_log)


def test_b_radius():
    assert [b_radius(r) for r in (1, 2, 3, 4)] == [1, 1, 2, 3]


def test_extended_queries_flag(path5):
    assert not PartialView(path5, {"a"}, 2).extended_queries
    assert PartialView(path5, {"a"}, 3).extended_queries


def test_sample_exterior_only_without_boundary():
    inst = NetworkInstance.from_edges([(0, 1), (2, 3)])
    rng = random.Random(0)
    assert PartialView(inst, {0}, 1).sample_exterior(rng) in {2, 3}
    inst2 = NetworkInstance.from_edges([(0, 1), (1, 2), (2, 3)])
    with pytest.raises(FirewallViolation):
        PartialView(inst2, {0}, 1).sample_exterior(rng)


class PeekingPolicy(Policy):
    """Deliberately cheats: asks about the node farthest from the units."""

    name = "peek"

    def select(self, view):
        far = max(view.graph.adj, key=lambda v: view.coverage.dist[v])
        view.inquire(far)
        return self._trace(view, [far])


def test_cheating_policy_is_caught(path5):
    view = PartialView(path5, {"a"}, 1)
    with pytest.raises(FirewallViolation):
        select(PeekingPolicy(), view)
    assert replay_audit(path5, {"a"}, 1, view.audit_log)


def test_forged_log_is_caught_by_replay(path5):
    forged = [Query("boundary", None, 1), Query("inquire", "e", 1)]
    assert replay_audit(path5, {"a"}, 1, forged) == [forged[1]]
    legal = [Query("inquire", "c", 1), Query("inquire", "d", 1), Query("inquire", "e", 1)]
    assert replay_audit(path5, {"a"}, 1, legal) == []


@settings(max_examples=120, deadline=None)
@given(
    st.lists(st.tuples(st.integers(0, 25), st.integers(0, 25)).filter(lambda e: e[0] != e[1]), min_size=3, max_size=60),
    st.integers(1, 3),
    st.sampled_from(POLICIES[2:]),
    st.integers(0, 50),
    st.integers(1, 6),
)
def test_prowls_only_issue_legal_queries(edges, r, policy, seed, k):
    inst = NetworkInstance.from_edges(edges)
    rng = random.Random(seed)
    units = {rng.choice(sorted(inst.nodes))}
    if within_distance(inst, units, r) == inst.nodes:
        return
    view = PartialView(inst, units, r)
    select(make_policy(policy, k=k, seed=seed), view)
    assert replay_audit(inst, units, r, view.audit_log) == []

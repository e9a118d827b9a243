import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from prowlnet.graph import NetworkInstance, within_distance
from prowlnet.observation import PartialView
from prowlnet.prowl import (
    BSET_BASED,
    EXTERIOR_BASED,
    POLICIES,
    NothingToDo,
    StructuralSets,
    access_neighborhood,
    b_set,
    exterior_set,
    make_policy,
    n_degree,
    select,
)


def test_exterior_examples(path_abc):
    assert exterior_set(path_abc, set(), 1) == {"a", "b", "c"}
    assert exterior_set(path_abc, {"b"}, 1) == set()
    assert exterior_set(path_abc, {"a"}, 1) == {"c"}


def test_bset_examples(walk_graph, path_abc):
    assert within_distance(walk_graph, {"s"}, 2) == {"s", "a", "b"}
    assert b_set(walk_graph, {"s"}, 2) == {"b", "c", "d"}
    assert b_set(path_abc, {"b"}, 1) == set()
    # r = 1: X plus its neighbours
    assert b_set(walk_graph, {"s"}, 1) == {"a", "b", "c", "d"}


def test_ndegree_examples(walk_graph):
    assert access_neighborhood(walk_graph, {"s"}) == {"s", "a"}
    assert n_degree(walk_graph, {"s"}, "a") == 1
    assert n_degree(walk_graph, {"s"}, "b") == 2
    assert n_degree(walk_graph, {"s"}, "s") == 0


def test_structural_sets_agree_with_helpers(hub):
    S = {4, 20}
    sets = StructuralSets(hub, S, 2)
    assert sets.exterior == exterior_set(hub, S, 2)
    assert sets.bset == b_set(hub, S, 2)
    assert sets.anti_nb == hub.nodes - access_neighborhood(hub, S)
    assert all(sets.is_bset(v) == (v in sets.bset) for v in hub.nodes)


@pytest.mark.parametrize("policy", ["xdeg", "bdeg", "bnde", "lran"])
def test_walk_fixture_choice_r1(walk_graph, policy):
    view = PartialView(walk_graph, {"s"}, 1)
    trace = select(make_policy(policy, k=4, seed=3), view)
    assert trace.chosen == "b"
    if policy in ("xdeg", "bdeg"):
        assert trace.walk == ["a", "b"]


def test_bset_walk_fixture_r2(walk_graph):
    for seed in range(5):
        view = PartialView(walk_graph, {"s"}, 2)
        trace = select(make_policy("bdeg", k=4, seed=seed), view)
        assert trace.walk[0] == "b"
        assert trace.chosen in {"b", "c", "d"}


def test_nothing_to_do_and_empty_units(path_abc):
    with pytest.raises(NothingToDo):
        select(make_policy("bdeg"), PartialView(path_abc, {"b"}, 1))
    with pytest.raises(ValueError):
        select(make_policy("bdeg"), PartialView(path_abc, set(), 1))


def test_unknown_policy_and_bad_k():
    with pytest.raises(ValueError):
        make_policy("nope")
    with pytest.raises(ValueError):
        make_policy("bdeg", k=0)


def test_fallback_when_exterior_is_unreachable():
    inst = NetworkInstance.from_edges([(0, 1), (2, 3)])
    for name in POLICIES:
        trace = select(make_policy(name, seed=1), PartialView(inst, {0}, 1))
        if name == "ldeg":
            # ranks region nodes, so it never needs the fallback
            assert trace.chosen == 1 and not trace.fallback
        else:
            assert trace.fallback and trace.chosen in {2, 3}


def test_local_policies_ignore_k(hub):
    for name in ("lran", "ldeg"):
        picks = {select(make_policy(name, k=k, seed=2), PartialView(hub, {4}, 1)).chosen for k in (1, 4, 7, 10)}
        assert len(picks) == 1


def test_same_seed_same_walk(hub):
    for name in POLICIES:
        a = select(make_policy(name, seed=9), PartialView(hub, {4}, 2)).to_dict()
        b = select(make_policy(name, seed=9), PartialView(hub, {4}, 2)).to_dict()
        assert a == b


edges = st.lists(st.tuples(st.integers(0, 30), st.integers(0, 30)).filter(lambda e: e[0] != e[1]), min_size=3, max_size=80)


@settings(max_examples=200, deadline=None)
@given(edges, st.integers(1, 4), st.sampled_from(POLICIES), st.integers(1, 8), st.integers(0, 99))
def test_postconditions_on_random_graphs(edge_list, r, name, k, seed):
    inst = NetworkInstance.from_edges(edge_list)
    rng = random.Random(seed)
    nodes = sorted(inst.nodes)
    units = set(rng.sample(nodes, rng.randint(1, min(3, len(nodes)))))
    X = exterior_set(inst, units, r)
    if not X:
        return
    trace = select(make_policy(name, k=k, seed=seed), PartialView(inst, units, r))
    assert trace.chosen not in units
    if name in EXTERIOR_BASED:
        assert trace.chosen in X
    if name in BSET_BASED:
        assert trace.chosen in b_set(inst, units, r)
    assert len(trace.walk) - 1 <= k
    if not trace.fallback and name not in ("lran", "ldeg"):
        assert trace.walk[0] in within_distance(inst, units, r)
        assert trace.walk[1] in X

import json

import pytest

from prowlnet.controller import (
    DOMINATED,
    MAX_TICKS,
    ListSource,
    RunConfig,
    compute_t_epsilon,
    cost_bound_violations,
    growth_violations,
    lemma_violations,
    persistence_violations,
    run,
    unit_monotonicity_violations,
)
from prowlnet.generators import GeneratorSpec, synthetic_start
from prowlnet.graph import GraphEvent, NetworkInstance, is_dominating
from prowlnet.oracle import iterate_until


def test_static_path_dominated_by_first_unit(path_abc):
    for policy in ("lran", "bdeg", "xran"):
        rec = run(None, RunConfig(policy=policy, r=2, seed_node="a"), path_abc)
        assert rec.status == DOMINATED
        assert rec.domination_cost == 1 and rec.domination_units == 1
        assert rec.final_units() == {"a"}


def test_initial_instance_is_not_mutated(path_abc):
    run(None, RunConfig(r=1, seed_node="a", tail_ticks=5), path_abc)
    assert path_abc.access_units == set() and path_abc.opinion("b") == 0.0


def test_t_epsilon_on_frozen_snapshot(path_abc):
    rec = run(None, RunConfig(r=2, seed_node="a", epsilons=(0.3, 1.0)), path_abc)
    adj = {v: set(nb) for v, nb in path_abc.graph.adj.items()}
    zeros = {v: 0.0 for v in adj}
    assert rec.t_epsilon["0.3"] == iterate_until(adj, zeros, {"a"}, 2, 0.7)
    assert rec.t_epsilon["1.0"] == 0
    assert compute_t_epsilon(rec, 0.3) == rec.t_epsilon["0.3"]


def test_t_epsilon_needs_domination(path_abc):
    rec = run(None, RunConfig(r=1, max_ticks=1, keep_snapshot=False), path_abc)
    with pytest.raises(ValueError):
        compute_t_epsilon(rec, 0.1)


def test_centralization_cost_on_static_graph(hub):
    rec = run(None, RunConfig(policy="bdeg", r=2, seed_node=4, epsilons=(0.01, 0.5), tail_ticks=400), hub)
    for key in ("0.01", "0.5"):
        cen = rec.centralization[key]
        assert cen is not None
        assert cen["tick"] >= rec.domination_cost
        assert cen["cost"] == rec.rows[cen["tick"]].n_units
    assert rec.centralization["0.5"]["tick"] <= rec.centralization["0.01"]["tick"]


def test_config_validation():
    for bad in (dict(r=0), dict(k=0), dict(cadence=0), dict(policy="zz"), dict(epsilons=(0.0,))):
        with pytest.raises(ValueError):
            RunConfig(**bad)


def test_post_domination_newcomers_become_units(path_abc):
    batches = [[GraphEvent("c", "d", 1)], [GraphEvent("d", "e", 2)], [GraphEvent("e", "f", 3)]]
    rec = run(ListSource(batches), RunConfig(r=2, seed_node="b", tail_ticks=5), path_abc)
    assert rec.domination_cost == 1
    # tick 1: d joins at distance 2 from b (inside); tick 2: e at distance 3 -> unit
    assert rec.rows[2].selected == ["e"]
    assert rec.rows[3].selected == []
    assert persistence_violations(rec) == []
    final = NetworkInstance.from_edges([("a", "b"), ("b", "c"), ("c", "d"), ("d", "e"), ("e", "f")])
    assert is_dominating(final, rec.final_units(), 2)


def test_exhausted_source_freezes_network(path_abc):
    rec = run(ListSource([[GraphEvent("c", "d", 1)]]), RunConfig(r=1, seed_node="a", tail_ticks=10), path_abc)
    assert rec.status == DOMINATED
    assert rec.rows[-1].n_nodes == 4
    assert len(rec.rows) == rec.domination_cost + 10 + 1


def test_non_unit_growth_is_flagged():
    start = NetworkInstance.from_edges([(0, 1)])
    batches = [[GraphEvent(2, 3, 1)], [GraphEvent(1, 2, 2)]]
    rec = run(ListSource(batches), RunConfig(policy="bdeg", r=1, seed_node=0, tail_ticks=3), start)
    assert rec.unit_growth_violations == 1


def test_max_ticks_status():
    inst, model = synthetic_start(GeneratorSpec("BA", n=200, seed=1))
    rec = run(model, RunConfig(policy="lran", r=1, max_ticks=3), inst)
    assert rec.status == MAX_TICKS and rec.domination_cost is None
    assert rec.centralization == {"0.01": None}


@pytest.mark.parametrize("model", ["BA", "RC"])
def test_growing_run_properties(model):
    inst, src = synthetic_start(GeneratorSpec(model, n=150, seed=4))
    rec = run(src, RunConfig(policy="bnde", r=2, seed=4, tail_ticks=100, audit=True), inst)
    assert rec.status == DOMINATED
    assert growth_violations(rec) == []
    assert lemma_violations(rec) == []
    assert cost_bound_violations(rec) == []
    assert persistence_violations(rec) == []
    assert unit_monotonicity_violations(rec) == []
    assert rec.audit_violations == 0
    snap = rec.snapshot
    assert is_dominating(snap, snap.access_units, 2)


def test_record_serialization(tmp_path, hub):
    rec = run(None, RunConfig(policy="xdeg", r=2, seed=3, seed_node=4), hub)
    data = json.loads(rec.to_json())
    assert data["domination_cost"] == rec.domination_cost
    assert len(data["rows"]) == len(rec.rows)
    assert data["domination_snapshot"]["units"] == sorted(rec.snapshot.access_units)
    rec.write_csv(tmp_path / "r.csv")
    lines = (tmp_path / "r.csv").read_text().splitlines()
    assert lines[0].startswith("tick,n_nodes,n_edges,n_units")
    assert len(lines) == len(rec.rows) + 1


def test_same_seed_same_record():
    def once():
        inst, src = synthetic_start(GeneratorSpec("JR", n=150, seed=2))
        return run(src, RunConfig(policy="bran", r=2, seed=2, tail_ticks=20), inst).to_json()

    assert once() == once()

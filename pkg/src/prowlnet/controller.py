"""Domination-driven centralization loop and its cost metrics.

Each tick runs three phases in order:

1. graph events for the tick (``cadence`` source stamps) are applied;
2. while the access units do not dominate, one unit is selected by the policy;
   once they dominate, every node that appears outside the accessible region
   becomes a unit;
3. opinions advance one synchronous step using this tick's units.
"""

from __future__ import annotations

import csv
import json
import logging
import random
from dataclasses import asdict, dataclass, field
from typing import Iterable, Protocol

import numpy as np

from prowlnet.dynamics import NonConvergence, degroot_step, run_to_convergence
from prowlnet.graph import Coverage, GraphEvent, NetworkInstance, NodeId
from prowlnet.observation import PartialView, replay_audit
from prowlnet.prowl import POLICIES, PROWLING, NothingToDo, ProwlTrace, StructuralSets, make_policy, select

log = logging.getLogger(__name__)

DOMINATED = "dominated"
MAX_TICKS = "max_ticks"


class EventSource(Protocol):
    def next_events(self) -> list[GraphEvent] | None:
        """Events of the next stamp, or None once the source is exhausted."""


class ListSource:
    """Replays pre-grouped per-stamp event batches."""

    def __init__(self, batches: Iterable[list[GraphEvent]]):
        self._it = iter(batches)

    def next_events(self):
        return next(self._it, None)


class EmptySource:
    def next_events(self):
        return None


@dataclass
class RunConfig:
    policy: str = "bnde"
    r: int = 2
    k: int = 4
    cadence: int = 1
    epsilons: tuple[float, ...] = (0.01,)
    seed: int = 0
    max_ticks: int = 100_000
    tail_ticks: int = 0
    seed_node: NodeId | None = None
    audit: bool = False
    keep_queries: bool = False
    keep_snapshot: bool = True
    stop_mean_opinion: float | None = None
    convergence_max_steps: int = 100_000

    def __post_init__(self):
        if self.policy not in POLICIES:
            raise ValueError(f"unknown policy {self.policy!r}")
        if self.r < 1 or self.k < 1 or self.cadence < 1:
            raise ValueError("r, k and cadence must all be >= 1")
        if self.max_ticks < 1 or self.tail_ticks < 0:
            raise ValueError("max_ticks must be >= 1 and tail_ticks >= 0")
        self.epsilons = tuple(float(e) for e in self.epsilons)
        for e in self.epsilons:
            if not 0 < e <= 1:
                raise ValueError("epsilon must lie in (0, 1]")


@dataclass
class TickRow:
    tick: int
    n_nodes: int
    n_edges: int
    n_units: int
    n_anti: int
    nb_gain: int
    new_nodes: int
    selected: list[NodeId]
    dominating: bool
    min_opinion: float
    mean_opinion: float
    max_opinion: float


CSV_FIELDS = [
    "tick", "n_nodes", "n_edges", "n_units", "n_anti", "nb_gain", "new_nodes",
    "n_selected", "dominating", "min_opinion", "mean_opinion", "max_opinion",
]  # fmt: skip


def _eps_key(eps: float) -> str:
    return repr(float(eps))


@dataclass
class RunRecord:
    config: dict
    rows: list[TickRow] = field(default_factory=list)
    status: str = MAX_TICKS
    domination_cost: int | None = None
    domination_units: int | None = None
    centralization: dict = field(default_factory=dict)
    t_epsilon: dict = field(default_factory=dict)
    traces: list[ProwlTrace] = field(default_factory=list)
    unit_growth_violations: int = 0
    audit_violations: int = 0
    n_queries: int = 0
    extended_queries: bool = False
    snapshot: NetworkInstance | None = None

    @property
    def dominated(self) -> bool:
        return self.domination_cost is not None

    def final_units(self) -> set[NodeId]:
        units = set()
        for row in self.rows:
            units.update(row.selected)
        return units

    def to_dict(self) -> dict:
        snap = None
        if self.snapshot is not None:
            s = self.snapshot
            snap = {
                "edges": [list(e) for e in s.graph.edge_list()],
                "nodes": list(s.graph.order),
                "opinions": s.opinion_array().tolist(),
                "units": sorted(s.access_units),
            }
        return {
            "config": self.config,
            "status": self.status,
            "domination_cost": self.domination_cost,
            "domination_units": self.domination_units,
            "centralization": self.centralization,
            "t_epsilon": self.t_epsilon,
            "unit_growth_violations": self.unit_growth_violations,
            "audit_violations": self.audit_violations,
            "n_queries": self.n_queries,
            "extended_queries": self.extended_queries,
            "rows": [asdict(r) for r in self.rows],
            "traces": [t.to_dict(with_queries=bool(t.queries)) for t in self.traces],
            "domination_snapshot": snap,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(CSV_FIELDS)
            for r in self.rows:
                w.writerow([
                    r.tick, r.n_nodes, r.n_edges, r.n_units, r.n_anti, r.nb_gain, r.new_nodes,
                    len(r.selected), int(r.dominating), repr(r.min_opinion), repr(r.mean_opinion), repr(r.max_opinion),
                ])  # fmt: skip


class _Sim:
    """Mutable state of one run: instance, coverage and the committed mask."""

    def __init__(self, instance: NetworkInstance, r: int):
        self.inst = instance
        self.cov = Coverage(instance.graph, r)
        self.committed = np.zeros(max(64, len(instance.graph)), dtype=bool)

    def apply(self, ev: GraphEvent) -> int:
        inst, cov = self.inst, self.cov
        new = inst.graph.add_edge(ev.u, ev.v)
        if new is None:
            return 0
        if new:
            inst._grow(len(inst.graph))
            for x in new:
                inst._opinions[inst.graph.index[x]] = 0.0
                cov.add_node(x)
        cov.add_edge(ev.u, ev.v)
        return len(new)

    def add_unit(self, v: NodeId) -> None:
        self.inst.access_units.add(v)
        self.cov.add_source(v)
        i = self.inst.graph.index[v]
        if i >= len(self.committed):
            grown = np.zeros(2 * len(self.committed) + i, dtype=bool)
            grown[: len(self.committed)] = self.committed
            self.committed = grown
        self.committed[i] = True

    def committed_mask(self) -> np.ndarray:
        n = len(self.inst.graph)
        if n > len(self.committed):
            grown = np.zeros(2 * n, dtype=bool)
            grown[: len(self.committed)] = self.committed
            self.committed = grown
        return self.committed[:n]


def run(source: EventSource | None, cfg: RunConfig, initial: NetworkInstance | None = None) -> RunRecord:
    """Run the centralization process from ``initial`` (copied) fed by ``source``."""
    inst = initial.copy() if initial is not None else NetworkInstance()
    inst.access_units = set()
    inst.time = 0
    inst.set_opinion_array(np.zeros(len(inst.graph)))
    source = source if source is not None else EmptySource()
    sim = _Sim(inst, cfg.r)
    cov = sim.cov
    policy = make_policy(cfg.policy, cfg.k, cfg.seed)
    first_rng = random.Random(f"{cfg.seed}:first")
    record = RunRecord(config=asdict(cfg), extended_queries=cfg.r > 2)
    pending = {_eps_key(e): e for e in cfg.epsilons}
    record.centralization = {key: None for key in pending}

    def row(t, new_nodes, selected, gain):
        ops = inst.opinion_array()
        n = len(ops)
        return TickRow(
            tick=t,
            n_nodes=len(inst.graph),
            n_edges=inst.graph.n_edges,
            n_units=len(inst.access_units),
            n_anti=len(inst.graph) - cov.n_access_nb,
            nb_gain=gain,
            new_nodes=new_nodes,
            selected=selected,
            dominating=n > 0 and cov.is_dominating(),
            min_opinion=float(ops.min()) if n else 1.0,
            mean_opinion=float(ops.mean()) if n else 1.0,
            max_opinion=float(ops.max()) if n else 1.0,
        )

    record.rows.append(row(0, len(inst.graph), [], 0))
    cov.take_entered()
    exhausted = False
    warned = False
    t = 0
    while t < cfg.max_ticks:
        t += 1
        inst.time = t
        new_nodes = 0
        if not exhausted:
            for _ in range(cfg.cadence):
                batch = source.next_events()
                if batch is None:
                    exhausted = True
                    break
                for ev in batch:
                    new_nodes += sim.apply(ev)
        if new_nodes > 1:
            record.unit_growth_violations += 1
            if cfg.policy in PROWLING and not warned:
                log.warning("tick %d added %d nodes; unit growth assumption violated", t, new_nodes)
                warned = True

        selected: list[NodeId] = []
        if record.domination_cost is None:
            if len(inst.graph) and cov.exterior:
                if not inst.access_units:
                    chosen = _first_unit(inst, cfg, first_rng)
                    record.traces.append(ProwlTrace("seed", t, [chosen], chosen))
                else:
                    chosen = _prowl_once(inst, cov, policy, cfg, t, record)
                if chosen is not None:
                    sim.add_unit(chosen)
                    selected.append(chosen)
        elif cov.exterior:
            # post-domination: every node outside the region is a newcomer
            for v in sorted(cov.exterior):
                sim.add_unit(v)
                selected.append(v)

        current = row(t, new_nodes, selected, len(cov.take_entered()))
        record.rows.append(current)
        if current.dominating and record.domination_cost is None:
            record.domination_cost = t
            record.domination_units = len(inst.access_units)
            record.status = DOMINATED
            if cfg.keep_snapshot:
                record.snapshot = inst.copy()

        for key, eps in list(pending.items()):
            if current.n_nodes and current.min_opinion >= 1.0 - eps:
                record.centralization[key] = {"tick": t, "cost": current.n_units}
                del pending[key]

        src, dst = inst.graph.edge_arrays()
        inst.set_opinion_array(
            degroot_step(src, dst, inst.opinion_array(), sim.committed_mask(), cov.region_mask())
        )

        if cfg.stop_mean_opinion is not None:
            if current.mean_opinion >= cfg.stop_mean_opinion:
                break
        elif record.domination_cost is not None and t - record.domination_cost >= cfg.tail_ticks:
            break

    for eps in cfg.epsilons:
        record.t_epsilon[_eps_key(eps)] = compute_t_epsilon(record, eps) if record.snapshot is not None else None
    return record


def _first_unit(inst: NetworkInstance, cfg: RunConfig, rng: random.Random) -> NodeId:
    if cfg.seed_node is not None and cfg.seed_node in inst.graph:
        return cfg.seed_node
    nodes = sorted(inst.graph.order)
    return nodes[rng.randrange(len(nodes))]


def _prowl_once(inst, cov, policy, cfg: RunConfig, t: int, record: RunRecord):
    units = frozenset(inst.access_units)
    view = PartialView(inst, units, cfg.r, coverage=cov, tick=t)
    try:
        trace = select(policy, view, StructuralSets(inst, units, cfg.r, coverage=cov))
    except NothingToDo:
        return None
    record.n_queries += len(view.audit_log)
    if cfg.audit:
        record.audit_violations += len(replay_audit(inst, units, cfg.r, view.audit_log))
    if not cfg.keep_queries:
        trace.queries = []
    record.traces.append(trace)
    return trace.chosen


def compute_t_epsilon(record: RunRecord, epsilon: float, max_steps: int | None = None) -> int | None:
    """DeGroot steps on the frozen dominated instance until every opinion >= 1 - epsilon.

    Returns None if the bound on steps is hit.
    """
    if record.snapshot is None:
        raise ValueError("run never dominated (or snapshot not kept); t_epsilon is undefined")
    limit = max_steps if max_steps is not None else record.config.get("convergence_max_steps", 100_000)
    try:
        return run_to_convergence(record.snapshot, record.config["r"], epsilon, max_steps=limit).steps
    except NonConvergence:
        return None


# ---- post-hoc property checks (each returns the offending ticks) ----


def growth_violations(record: RunRecord) -> list[int]:
    """Selection ticks where the access neighbourhood grew by fewer than two nodes."""
    return [row.tick for row in record.rows[1:] if row.selected and row.nb_gain < 2]


def lemma_violations(record: RunRecord) -> list[int]:
    """Ticks where |anti_{t-1}| - |anti_t| < |N_t minus N_{t-1}| - 1."""
    rows = record.rows
    return [b.tick for a, b in zip(rows, rows[1:]) if a.n_anti - b.n_anti < b.nb_gain - 1]


def cost_bound_violations(record: RunRecord) -> list[int]:
    """Pre-domination selection ticks t with (delta - t) > |anti_t|."""
    delta = record.domination_cost
    if delta is None:
        return []
    return [row.tick for row in record.rows[1:] if row.tick < delta and row.selected and delta - row.tick > row.n_anti]


def persistence_violations(record: RunRecord) -> list[int]:
    delta = record.domination_cost
    if delta is None:
        return []
    return [row.tick for row in record.rows if row.tick >= delta and not row.dominating]


def unit_monotonicity_violations(record: RunRecord) -> list[int]:
    rows = record.rows
    return [b.tick for a, b in zip(rows, rows[1:]) if b.n_units < a.n_units]

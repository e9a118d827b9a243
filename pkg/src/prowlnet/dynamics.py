"""Synchronous decentralized DeGroot update with committed access units."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from prowlnet.graph import NetworkInstance, within_distance


class NonConvergence(RuntimeError):
    def __init__(self, steps: int, min_opinion: float):
        super().__init__(f"opinions did not reach the target within {steps} steps (min={min_opinion:.6g})")
        self.steps = steps
        self.min_opinion = min_opinion


def degroot_step(
    src: np.ndarray,
    dst: np.ndarray,
    opinions: np.ndarray,
    committed: np.ndarray,
    accessible: np.ndarray,
) -> np.ndarray:
    """One synchronous update over dense-indexed edge arrays.

    committed nodes -> 1; nodes outside the accessible region -> mean of all
    neighbours; other accessible nodes -> (1 + sum over non-committed
    neighbours) / (1 + their count). A node with no neighbours keeps its value.
    """
    n = len(opinions)
    c = opinions
    deg = np.bincount(src, minlength=n) + np.bincount(dst, minlength=n)
    nb_sum = np.bincount(src, weights=c[dst], minlength=n) + np.bincount(dst, weights=c[src], minlength=n)
    free = ~committed
    free_f = free.astype(float)
    free_sum = np.bincount(src, weights=c[dst] * free_f[dst], minlength=n) + np.bincount(
        dst, weights=c[src] * free_f[src], minlength=n
    )
    free_cnt = np.bincount(src, weights=free_f[dst], minlength=n) + np.bincount(dst, weights=free_f[src], minlength=n)
    out = np.where(deg > 0, nb_sum / np.maximum(deg, 1), c)
    out = np.where(accessible, (1.0 + free_sum) / (1.0 + free_cnt), out)
    out[committed] = 1.0
    return out


def _masks(instance: NetworkInstance, r: int, accessible=None) -> tuple[np.ndarray, np.ndarray]:
    graph = instance.graph
    committed = instance.committed_mask()
    if accessible is None:
        accessible = within_distance(graph, instance.access_units, r) if instance.access_units else set()
    if isinstance(accessible, np.ndarray):
        return committed, accessible.astype(bool)
    mask = np.zeros(len(graph), dtype=bool)
    for v in accessible:
        mask[graph.index[v]] = True
    return committed, mask


def step_opinions(instance: NetworkInstance, r: int, accessible=None) -> dict:
    """C_{t+1} as a node -> opinion mapping; the instance is not modified.

    ``accessible`` defaults to the radius-r region of ``instance.access_units``.
    """
    committed, mask = _masks(instance, r, accessible)
    src, dst = instance.graph.edge_arrays()
    new = degroot_step(src, dst, instance.opinion_array(), committed, mask)
    return dict(zip(instance.graph.order, new.tolist()))


def iterate_opinions(instance: NetworkInstance, r: int) -> Iterator[np.ndarray]:
    """Yield C_0, C_1, ... on the frozen instance (arrays aligned with graph.order)."""
    committed, mask = _masks(instance, r)
    src, dst = instance.graph.edge_arrays()
    cur = instance.opinion_array().copy()
    while True:
        yield cur
        cur = degroot_step(src, dst, cur, committed, mask)


@dataclass
class Convergence:
    steps: int
    final: dict


def run_to_convergence(instance: NetworkInstance, r: int, epsilon: float, max_steps: int = 100_000) -> Convergence:
    """Iterate the update on a static instance until every opinion is >= 1 - epsilon."""
    if not 0 < epsilon <= 1:
        raise ValueError("epsilon must lie in (0, 1]")
    target = 1.0 - epsilon
    for step, cur in enumerate(iterate_opinions(instance, r)):
        low = float(cur.min()) if len(cur) else 1.0
        if low >= target:
            return Convergence(step, dict(zip(instance.graph.order, cur.tolist())))
        if step >= max_steps:
            raise NonConvergence(step, low)
    raise AssertionError("unreachable")


def average_opinion(opinions) -> float:
    values = list(opinions.values()) if isinstance(opinions, dict) else list(opinions)
    if not values:
        raise ValueError("average of an empty opinion vector")
    return float(np.mean(values))


def write_opinion_series(rows, path) -> None:
    """CSV with columns tick,min,mean,max; ``rows`` holds (tick, min, mean, max) tuples."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["tick", "min", "mean", "max"])
        for row in rows:
            w.writerow(row)

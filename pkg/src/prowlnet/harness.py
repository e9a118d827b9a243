"""Experiment plans: repeated seeded runs over a grid, aggregated into CSV tables.

Three experiments are available:

* ``experiment1``: domination cost (mean±std) per source, policy, r and k;
* ``experiment2``: domination cost against average degree, initial size and r
  on the synthetic models, one CSV per (model, axis);
* ``experiment3``: average-opinion series per policy until the mean reaches a
  threshold, plus ticks-to-threshold summaries.

Runs are independent jobs. With ``workers > 1`` they go through a process
pool, but results are always reduced in (cell, seed) order so the CSV bodies
do not depend on scheduling.
"""

from __future__ import annotations

import csv
import logging
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields, replace
from functools import lru_cache
from pathlib import Path

from prowlnet.controller import RunConfig, run
from prowlnet.generators import MODELS, GeneratorSpec, synthetic_start
from prowlnet.graph import is_dominating
from prowlnet.ingest import DatasetSpec, IngestError, load
from prowlnet.prowl import POLICIES

log = logging.getLogger(__name__)


class PlanError(ValueError):
    pass


@dataclass
class ExperimentPlan:
    policies: list[str] = field(default_factory=lambda: list(POLICIES))
    radii: list[int] = field(default_factory=lambda: [1, 2])
    ks: list[int] = field(default_factory=lambda: [4, 7, 10])
    models: list[str] = field(default_factory=lambda: list(MODELS))
    datasets: dict = field(default_factory=dict)
    n: int = 5000
    avg_degree: int = 6
    reps: int = 10
    seed: int = 0
    workers: int = 1
    max_ticks: int = 20_000
    epsilons: list[float] = field(default_factory=list)
    threshold: float = 0.8
    # experiment 2 axes; the other two parameters stay at n / avg_degree / r=2
    degrees: list[int] = field(default_factory=lambda: [4, 6, 8, 10, 12, 14])
    sizes: list[int] = field(default_factory=lambda: [1000, 2000, 3000, 4000, 5000])
    sweep_radii: list[int] = field(default_factory=lambda: [1, 2, 3, 4])
    sweep_r: int = 2
    sweep_k: int = 4
    out: str = "results"

    def __post_init__(self):
        bad = [p for p in self.policies if p not in POLICIES]
        if bad:
            raise PlanError(f"unknown policies: {bad}")
        self.models = [m.upper() for m in self.models]
        bad = [m for m in self.models if m not in MODELS]
        if bad:
            raise PlanError(f"unknown models: {bad}")
        if self.reps < 1 or self.workers < 1:
            raise PlanError("reps and workers must be >= 1")
        if any(r < 1 for r in self.radii + self.sweep_radii) or any(k < 1 for k in self.ks):
            raise PlanError("radii and k values must be >= 1")

    @property
    def seeds(self) -> list[int]:
        return [self.seed + i for i in range(self.reps)]

    @classmethod
    def from_config(cls, config: dict, **overrides) -> "ExperimentPlan":
        known = {f.name for f in fields(cls)}
        # a shared config file may also carry a "run" section for single runs
        unknown = set(config) - known - {"run"}
        if unknown:
            raise PlanError(f"unknown plan keys: {sorted(unknown)}")
        merged = {k: v for k, v in config.items() if k != "run"}
        merged.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**merged)


@dataclass(frozen=True)
class Cell:
    """One fully specified grid point; ``source`` is a model name or a dataset key."""

    source: str
    policy: str
    r: int
    k: int
    n: int = 0
    avg_degree: int = 0
    cadence: int = 1
    dataset: tuple = ()  # sorted DatasetSpec items for dataset sources

    @property
    def synthetic(self) -> bool:
        return not self.dataset


@dataclass
class JobResult:
    cell: Cell
    seed: int
    status: str
    cost: int  # |S| at domination, or at the last tick when censored
    domination_tick: int | None
    verified: bool
    t_epsilon: dict
    ticks_to_threshold: int | None = None
    series: list[float] = field(default_factory=list)

    @property
    def censored(self) -> bool:
        return self.domination_tick is None


@dataclass(frozen=True)
class _Job:
    cell: Cell
    seed: int
    max_ticks: int
    epsilons: tuple
    threshold: float | None


@lru_cache(maxsize=4)
def _load_dataset(items: tuple):
    return load(DatasetSpec(**dict(items)))


def _start(cell: Cell, seed: int):
    if cell.synthetic:
        inst, model = synthetic_start(GeneratorSpec(cell.source, n=cell.n, avg_degree=cell.avg_degree, seed=seed))
        return inst, model
    data = _load_dataset(cell.dataset)
    return data.warmup, data.stream.reset()


def run_job(job: _Job) -> JobResult:
    cell = job.cell
    initial, source = _start(cell, job.seed)
    cfg = RunConfig(
        policy=cell.policy,
        r=cell.r,
        k=cell.k,
        cadence=cell.cadence,
        epsilons=job.epsilons,
        seed=job.seed,
        max_ticks=job.max_ticks,
        stop_mean_opinion=job.threshold,
        keep_snapshot=job.threshold is None,
    )
    rec = run(source, cfg, initial)
    last = rec.rows[-1]
    verified = False
    if rec.snapshot is not None:
        verified = is_dominating(rec.snapshot, rec.snapshot.access_units, cell.r)
    result = JobResult(
        cell=cell,
        seed=job.seed,
        status=rec.status,
        cost=rec.domination_units if rec.domination_units is not None else last.n_units,
        domination_tick=rec.domination_cost,
        verified=verified,
        t_epsilon=dict(rec.t_epsilon),
    )
    if job.threshold is not None:
        result.series = [row.mean_opinion for row in rec.rows[1:]]
        hit = [row.tick for row in rec.rows[1:] if row.mean_opinion >= job.threshold]
        result.ticks_to_threshold = hit[0] if hit else None
    return result


def run_jobs(jobs: list[_Job], workers: int = 1) -> list[JobResult]:
    """Results come back in job order whatever the worker count."""
    if workers <= 1 or len(jobs) <= 1:
        return [run_job(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(run_job, jobs, chunksize=1))


def _jobs(plan: ExperimentPlan, cells: list[Cell], threshold=None) -> list[_Job]:
    eps = tuple(plan.epsilons)
    return [_Job(c, s, plan.max_ticks, eps, threshold) for c in cells for s in plan.seeds]


def _group(results: list[JobResult]) -> dict[Cell, list[JobResult]]:
    out: dict[Cell, list[JobResult]] = {}
    for res in results:
        out.setdefault(res.cell, []).append(res)
    return out


def mean_std(values) -> tuple[float, float]:
    values = list(values)
    if not values:
        return float("nan"), float("nan")
    return statistics.fmean(values), statistics.pstdev(values)


def fmt_mean_std(mean: float, std: float) -> str:
    return f"{mean:.1f}±{std:.1f}"


def _dataset_cells(plan: ExperimentPlan, notices: list[str]) -> list[tuple[str, DatasetSpec]]:
    out = []
    for name, section in sorted(plan.datasets.items()):
        try:
            spec = DatasetSpec.from_config(section)
        except IngestError as exc:
            notices.append(f"dataset {name}: {exc}; skipped")
            continue
        if not Path(spec.path).exists():
            notices.append(f"dataset {name}: {spec.path} not found; cells skipped")
            continue
        out.append((name, spec))
    return out


def _sources(plan: ExperimentPlan, notices: list[str]):
    """(label, cell kwargs) for every available source."""
    out = [(m, dict(n=plan.n, avg_degree=plan.avg_degree)) for m in plan.models]
    for name, spec in _dataset_cells(plan, notices):
        out.append((name, dict(cadence=spec.cadence, dataset=tuple(sorted(asdict(spec).items())))))
    return out


def _write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)


@dataclass
class ExperimentResult:
    files: list[Path] = field(default_factory=list)
    rows: list[dict] = field(default_factory=list)
    notices: list[str] = field(default_factory=list)


EXP1_HEADER = ["source", "policy", "r", "k", "cost", "mean", "std", "runs", "censored", "verified"]


def experiment1(plan: ExperimentPlan) -> ExperimentResult:
    """Domination cost per (source, policy, r, k)."""
    result = ExperimentResult()
    cells = []
    for label, kw in _sources(plan, result.notices):
        for policy in plan.policies:
            for r in plan.radii:
                for k in plan.ks:
                    cells.append(Cell(label, policy, r, k, **kw))
    for note in result.notices:
        log.info(note)
    grouped = _group(run_jobs(_jobs(plan, cells), plan.workers))
    table = []
    for cell in cells:
        runs = grouped[cell]
        mean, std = mean_std(r.cost for r in runs)
        row = {
            "source": cell.source,
            "policy": cell.policy,
            "r": cell.r,
            "k": cell.k,
            "cost": fmt_mean_std(mean, std),
            "mean": mean,
            "std": std,
            "runs": len(runs),
            "censored": sum(r.censored for r in runs),
            "verified": sum(r.verified for r in runs),
        }
        for eps in plan.epsilons:
            key = repr(float(eps))
            vals = [r.t_epsilon.get(key) for r in runs]
            vals = [v for v in vals if v is not None]
            row[f"t_eps={eps:g}"] = fmt_mean_std(*mean_std(vals)) if vals else ""
        result.rows.append(row)
        table.append(row)
    header = EXP1_HEADER + [f"t_eps={e:g}" for e in plan.epsilons]
    path = Path(plan.out) / "exp1.csv"
    _write_csv(path, header, [[_cellfmt(row[h]) for h in header] for row in table])
    result.files.append(path)
    return result


def _cellfmt(v):
    return repr(v) if isinstance(v, float) else v


AXES = ("degree", "size", "radius")
EXP2_HEADER = ["model", "axis", "value", "policy", "mean", "std", "runs", "censored"]


def experiment2(plan: ExperimentPlan, axes=AXES) -> ExperimentResult:
    """Domination cost on synthetic models against one parameter at a time."""
    result = ExperimentResult()
    cells: list[tuple[str, int, Cell]] = []
    for model in plan.models:
        for axis in axes:
            if axis == "degree":
                grid = [(v, dict(avg_degree=v, n=plan.n, r=plan.sweep_r)) for v in plan.degrees]
            elif axis == "size":
                grid = [(v, dict(avg_degree=plan.avg_degree, n=v, r=plan.sweep_r)) for v in plan.sizes]
            elif axis == "radius":
                grid = [(v, dict(avg_degree=plan.avg_degree, n=plan.n, r=v)) for v in plan.sweep_radii]
            else:
                raise PlanError(f"unknown axis {axis!r}; choose from {', '.join(AXES)}")
            for value, kw in grid:
                for policy in plan.policies:
                    cell = Cell(model, policy, kw["r"], plan.sweep_k, n=kw["n"], avg_degree=kw["avg_degree"])
                    cells.append((axis, value, cell))
    unique = list(dict.fromkeys(c for _, _, c in cells))
    grouped = _group(run_jobs(_jobs(plan, unique), plan.workers))
    by_file: dict[tuple[str, str], list[list]] = {}
    for axis, value, cell in cells:
        runs = grouped[cell]
        mean, std = mean_std(r.cost for r in runs)
        row = {
            "model": cell.source, "axis": axis, "value": value, "policy": cell.policy,
            "mean": mean, "std": std, "runs": len(runs), "censored": sum(r.censored for r in runs),
        }  # fmt: skip
        result.rows.append(row)
        by_file.setdefault((cell.source, axis), []).append([_cellfmt(row[h]) for h in EXP2_HEADER])
    for (model, axis), rows in by_file.items():
        path = Path(plan.out) / f"exp2_{model}_{axis}.csv"
        _write_csv(path, EXP2_HEADER, rows)
        result.files.append(path)
    return result


def experiment3(plan: ExperimentPlan) -> ExperimentResult:
    """Seed-averaged mean-opinion series per policy until the threshold is reached.

    A run stops at the first tick whose mean opinion reaches the threshold;
    the series average at tick t is taken over the runs still going at t.
    """
    result = ExperimentResult()
    sources = _sources(plan, result.notices)
    for note in result.notices:
        log.info(note)
    r = plan.radii[0] if len(plan.radii) == 1 else plan.sweep_r
    k = plan.ks[0] if len(plan.ks) == 1 else plan.sweep_k
    cells = [Cell(label, p, r, k, **kw) for label, kw in sources for p in plan.policies]
    grouped = _group(run_jobs(_jobs(plan, cells, threshold=plan.threshold), plan.workers))
    for label, _ in sources:
        mine = [c for c in cells if c.source == label]
        length = max(len(res.series) for c in mine for res in grouped[c])
        series_rows = []
        for t in range(length):
            line = [t + 1]
            for c in mine:
                vals = [res.series[t] for res in grouped[c] if t < len(res.series)]
                line.append(repr(statistics.fmean(vals)) if vals else "")
            series_rows.append(line)
        path = Path(plan.out) / f"exp3_{label}_series.csv"
        _write_csv(path, ["tick"] + [c.policy for c in mine], series_rows)
        result.files.append(path)
        summary = []
        for c in mine:
            hits = [res.ticks_to_threshold for res in grouped[c]]
            reached = [h for h in hits if h is not None]
            mean, std = mean_std(reached)
            row = {"source": label, "policy": c.policy, "mean": mean, "std": std, "reached": len(reached), "runs": len(hits)}
            result.rows.append(row)
            summary.append([label, c.policy, repr(mean), repr(std), len(reached), len(hits)])
        path = Path(plan.out) / f"exp3_{label}_summary.csv"
        _write_csv(path, ["source", "policy", "mean_ticks", "std_ticks", "reached", "runs"], summary)
        result.files.append(path)
    return result


def with_overrides(plan: ExperimentPlan, **kw) -> ExperimentPlan:
    return replace(plan, **{k: v for k, v in kw.items() if v is not None})

"""Command-line entry point.

Exit codes: 0 success (``run``: dominated), 1 failed check (``verify``),
2 input error, 3 ``run`` stopped at max ticks without dominating.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from prowlnet.controller import DOMINATED, RunConfig, run
from prowlnet.generators import MODELS, GeneratorSpec, make_model, synthetic_start
from prowlnet.harness import ExperimentPlan, PlanError, experiment1, experiment2, experiment3
from prowlnet.ingest import DatasetSpec, IngestError, load, read_config, write_edge_list

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_INPUT = 2
EXIT_MAX_TICKS = 3


def _list(kind):
    def parse(text: str):
        try:
            return [kind(x) for x in text.split(",") if x.strip()]
        except ValueError:
            raise argparse.ArgumentTypeError(f"expected a comma-separated list, got {text!r}") from None

    return parse


def _common(p: argparse.ArgumentParser, lists: bool) -> None:
    many = _list(int)
    p.add_argument("--config", help="JSON file; flags override its keys")
    p.add_argument("--policy", type=_list(str) if lists else str, help="policy name" + (" list" if lists else ""))
    p.add_argument("--r", type=many if lists else int, help="accessible-region radius")
    p.add_argument("--k", type=many if lists else int, help="prowl walk length")
    p.add_argument("--seed", type=int)
    p.add_argument("--out", help="output directory")
    p.add_argument("--model", type=_list(str) if lists else str, help=f"synthetic model ({', '.join(MODELS)})")
    p.add_argument("--n", type=int, help="initial network size for synthetic models")
    p.add_argument("--avg-degree", type=int)
    p.add_argument("--max-ticks", type=int)
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="prowlnet", description="Prowling-based centralization of growing networks.")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="dump a synthetic edge stream")
    g.add_argument("--model", required=True)
    g.add_argument("--n", type=int, default=5000)
    g.add_argument("--avg-degree", type=int, default=6)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--ticks", type=int, default=1000, help="ticks emitted after the warm-up")
    g.add_argument("--out", required=True, help="edge-list file")

    r = sub.add_parser("run", help="single run, written as JSON and CSV")
    _common(r, lists=False)
    r.add_argument("--dataset", help="edge-list file (or dataset key in --config)")
    r.add_argument("--initial-stamp", type=int)
    r.add_argument("--cadence", type=int)
    r.add_argument("--epsilon", type=float, action="append")
    r.add_argument("--tail", type=int, default=0, help="ticks to keep running after domination")
    r.add_argument("--seed-node", type=int)
    r.add_argument("--audit", action="store_true", help="replay every query against the firewall")

    for name, helptext in (("exp1", "domination-cost table"), ("exp2", "synthetic sweeps"), ("exp3", "opinion series")):
        e = sub.add_parser(name, help=helptext)
        _common(e, lists=True)
        e.add_argument("--reps", type=int)
        e.add_argument("--workers", type=int)
        e.add_argument("--epsilon", type=_list(float))
        e.add_argument("--dataset", action="append", metavar="NAME=PATH", help="add a dataset source")
        e.add_argument("--cadence", type=int, help="cadence for --dataset sources")
        e.add_argument("--threshold", type=float, help="exp3 mean-opinion target")
        if name == "exp2":
            e.add_argument("--axis", type=_list(str), help="degree,size,radius")

    v = sub.add_parser("verify", help="oracle cross-checks")
    v.add_argument("--instances", type=int, default=1000)
    v.add_argument("--seed", type=int, default=0)
    return parser


def _config(args) -> dict:
    return read_config(args.config) if getattr(args, "config", None) else {}


def cmd_generate(args) -> int:
    spec = GeneratorSpec(args.model, n=args.n, avg_degree=args.avg_degree, seed=args.seed)
    model = make_model(spec)
    events = model.warmup()
    n_warm = len(events)
    for _ in range(args.ticks):
        events.extend(model.next_events())
    header = f"{spec.model} n={spec.n} d={spec.avg_degree} seed={spec.seed}\nwarm-up lines: {n_warm}"
    write_edge_list(events, args.out, header=header)
    print(f"wrote {len(events)} events ({n_warm} warm-up) to {args.out}")
    return EXIT_OK


def cmd_run(args) -> int:
    conf = _config(args)
    run_conf = conf.get("run", {})
    pick = lambda key, default: getattr(args, key) if getattr(args, key, None) is not None else run_conf.get(key, default)  # noqa: E731
    cfg = RunConfig(
        policy=pick("policy", "bnde"),
        r=pick("r", 2),
        k=pick("k", 4),
        cadence=1,
        epsilons=tuple(args.epsilon or run_conf.get("epsilons", (0.01,))),
        seed=pick("seed", 0),
        max_ticks=pick("max_ticks", 100_000),
        tail_ticks=args.tail,
        seed_node=args.seed_node,
        audit=args.audit,
    )
    dataset = args.dataset or run_conf.get("dataset")
    if dataset:
        section = conf.get("datasets", {}).get(dataset, {"path": dataset})
        section = dict(section)
        if args.initial_stamp is not None:
            section["initial_stamp"] = args.initial_stamp
        if args.cadence is not None:
            section["cadence"] = args.cadence
        spec = DatasetSpec.from_config(section)
        data = load(spec)
        cfg.cadence = spec.cadence
        initial, source = data.warmup, data.stream
    else:
        gspec = GeneratorSpec(
            pick("model", "BA"), n=pick("n", 1000), avg_degree=pick("avg_degree", 6), seed=cfg.seed
        )
        initial, source = synthetic_start(gspec)
        if args.cadence is not None:
            cfg.cadence = args.cadence
    record = run(source, cfg, initial)
    out = Path(args.out or "run_out")
    out.mkdir(parents=True, exist_ok=True)
    (out / "run.json").write_text(record.to_json())
    record.write_csv(out / "run.csv")
    print(f"status={record.status} domination_tick={record.domination_cost} units={record.domination_units}")
    for key, val in record.centralization.items():
        print(f"eps={key} centralization={val} t_eps={record.t_epsilon.get(key)}")
    if record.audit_violations:
        print(f"audit violations: {record.audit_violations}", file=sys.stderr)
    return EXIT_OK if record.status == DOMINATED else EXIT_MAX_TICKS


def _plan(args) -> ExperimentPlan:
    conf = _config(args)
    over = {
        "policies": args.policy,
        "ks": args.k,
        "models": args.model,
        "n": args.n,
        "avg_degree": args.avg_degree,
        "reps": args.reps,
        "seed": args.seed,
        "workers": args.workers,
        "max_ticks": args.max_ticks,
        "epsilons": args.epsilon,
        "threshold": args.threshold,
        "out": args.out,
    }
    if args.r is not None:
        over["sweep_radii" if args.command == "exp2" else "radii"] = args.r
    if args.dataset:
        datasets = dict(conf.get("datasets", {}))
        for item in args.dataset:
            name, _, path = item.partition("=")
            if not path:
                raise PlanError(f"--dataset expects NAME=PATH, got {item!r}")
            section = {"path": path}
            if args.cadence is not None:
                section["cadence"] = args.cadence
            datasets[name] = section
        over["datasets"] = datasets
    return ExperimentPlan.from_config(conf, **over)


def cmd_exp(args) -> int:
    plan = _plan(args)
    if args.command == "exp1":
        res = experiment1(plan)
    elif args.command == "exp2":
        res = experiment2(plan, axes=tuple(args.axis) if args.axis else ("degree", "size", "radius"))
    else:
        res = experiment3(plan)
    for note in res.notices:
        print(f"notice: {note}", file=sys.stderr)
    for path in res.files:
        print(path)
    return EXIT_OK


def cmd_verify(args) -> int:
    from prowlnet import verify

    ok = True
    for name, passed, detail in verify.run_checks(args.instances, args.seed):
        print(f"{'PASS' if passed else 'FAIL'} {name}: {detail}")
        ok = ok and passed
    return EXIT_OK if ok else EXIT_CHECK_FAILED


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if getattr(args, "verbose", False) else logging.WARNING, format="%(levelname)s %(message)s")
    handlers = {"generate": cmd_generate, "run": cmd_run, "exp1": cmd_exp, "exp2": cmd_exp, "exp3": cmd_exp, "verify": cmd_verify}
    try:
        return handlers[args.command](args)
    except (IngestError, PlanError, ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())

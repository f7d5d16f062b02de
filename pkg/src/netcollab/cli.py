"""Command-line entry point: ``netcollab generate|run|suite|stats``."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .dynamics import load_problem
from .errors import ConfigurationError
from .nc import NcConfig
from .suite import (
    ALGORITHMS,
    SuiteSpec,
    aggregate,
    check_algorithm,
    generate,
    load_runs,
    run_one,
    run_suite,
    write_report,
)

EXIT_OK, EXIT_IO, EXIT_CONFIG, EXIT_PARTIAL = 0, 1, 2, 3


def _read_config(path) -> dict:
    if path is None:
        return {}
    try:
        d = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"{path}: invalid JSON ({exc})") from None
    if not isinstance(d, dict):
        raise ConfigurationError(f"{path}: configuration must be a JSON object")
    NcConfig.from_dict(d)
    return d


def _load_spec(args) -> SuiteSpec:
    if args.spec is not None:
        d = json.loads(Path(args.spec).read_text())
    elif getattr(args, "network", None) is not None:
        d = {"instances": [{"network": args.network, "dynamics": args.dynamics,
                            "ns": args.ns, "l": args.l, "n": args.n}]}
    else:
        raise ConfigurationError("give --spec or --network")
    if args.seed is not None:
        d["seed"] = args.seed
        for inst in d.get("instances", []):
            inst.setdefault("seed", args.seed)
    if getattr(args, "reps", None) is not None:
        d["reps"] = args.reps
    return SuiteSpec.from_dict(d)


def cmd_generate(args) -> int:
    for p in generate(_load_spec(args), args.out):
        print(p)
    return EXIT_OK


def cmd_run(args) -> int:
    algo = check_algorithm(args.algo)
    overrides = _read_config(args.config)
    if args.seed is not None:
        overrides["seed"] = args.seed
    cfg = NcConfig.from_dict(overrides)
    try:
        problem = load_problem(args.dataset)
    except (KeyError, ValueError) as exc:
        print(f"error: cannot parse dataset {args.dataset}: {exc}", file=sys.stderr)
        return EXIT_IO
    result = run_one(problem, algo, cfg)
    out = Path(args.out)
    if out.is_dir():
        out = out / f"{Path(args.dataset).stem}__{algo}.json"
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(result.to_json())
    out.with_suffix(".csv").write_text(result.trace_csv())
    nmi = "n/a" if result.nmi_vs_truth is None else f"{result.nmi_vs_truth:.4f}"
    print(f"{algo}: mcc={result.mcc:.4f} nmi={nmi} q={result.q_star:.4f} "
          f"fe1={result.fe1} fe2={result.fe2} steps={result.cd_steps} -> {out}")
    return EXIT_OK


def cmd_suite(args) -> int:
    spec = _load_spec(args)
    report = run_suite(spec, args.out, max(1, args.parallel), _read_config(args.config))
    _print_report(report)
    if report["failures"]:
        for f in report["failures"]:
            print(f"failed: {f['instance']} {f['algorithm']} rep {f['rep']}: {f['error']}",
                  file=sys.stderr)
        return EXIT_PARTIAL
    return EXIT_OK


def cmd_stats(args) -> int:
    src = Path(args.runs)
    run_dir = src / "runs" if (src / "runs").is_dir() else src
    if not run_dir.is_dir():
        raise FileNotFoundError(f"no run directory at {src}")
    records = load_runs(run_dir)
    if not records:
        raise ConfigurationError(f"no run files in {run_dir}")
    algorithms = None
    if args.ref is not None:
        names = sorted({r["algorithm"] for r in records})
        algorithms = [args.ref] + [a for a in names if a != args.ref]
    report = aggregate(records, algorithms=algorithms)
    report["failures"] = []
    out = Path(args.out) if args.out else src
    out.mkdir(parents=True, exist_ok=True)
    write_report(report, out)
    _print_report(report)
    return EXIT_OK


def _print_report(report: dict) -> None:
    for r in report["rows"]:
        mark = r["mark"] or ""
        print(f"{r['instance']:<16} {r['algorithm']:<6} {r['metric']:<4} "
              f"{r['mean_std']:<22} {mark}")
    for algo, counts in report["win_tie_loss"].items():
        print(f"{algo} vs {report['reference']}: "
              f"{counts['+']}/{counts['~']}/{counts['-']} (+/~/-)")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="netcollab", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write dataset files for suite instances")
    g.add_argument("--spec", help="suite JSON file")
    g.add_argument("--network", help="single instance: named network (ZK, ER, BA, WS, NW)")
    g.add_argument("--dynamics", default="EG", help="EG or RN")
    g.add_argument("--ns", type=int, default=5)
    g.add_argument("--l", type=int, default=10)
    g.add_argument("--n", type=int, default=50, help="node count for synthetic networks")
    g.add_argument("--seed", type=int)
    g.add_argument("--out", required=True, help="output directory")
    g.set_defaults(func=cmd_generate)

    r = sub.add_parser("run", help="run one algorithm on one dataset")
    r.add_argument("dataset")
    r.add_argument("--algo", default="nc", help="|".join(ALGORITHMS))
    r.add_argument("--config", help="JSON file with NcConfig fields")
    r.add_argument("--seed", type=int)
    r.add_argument("--out", required=True, help="result JSON path or directory")
    r.set_defaults(func=cmd_run)

    s = sub.add_parser("suite", help="run all instances x algorithms x repetitions")
    s.add_argument("--spec", required=True)
    s.add_argument("--out", required=True)
    s.add_argument("--seed", type=int)
    s.add_argument("--reps", type=int)
    s.add_argument("--parallel", type=int, default=1)
    s.add_argument("--config", help="JSON file with NcConfig fields")
    s.set_defaults(func=cmd_suite)

    t = sub.add_parser("stats", help="aggregate existing run files into a report")
    t.add_argument("runs", help="suite output directory or directory of run JSON files")
    t.add_argument("--out", help="report directory (default: the input directory)")
    t.add_argument("--ref", help="reference algorithm for rank-sum marks")
    t.set_defaults(func=cmd_stats)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigurationError, KeyError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"configuration error: {msg}", file=sys.stderr)
        return EXIT_CONFIG
    except (OSError, json.JSONDecodeError) as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())

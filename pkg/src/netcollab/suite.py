"""Benchmark harness: instance specs, seeded repetitions and aggregated statistics."""

from __future__ import annotations

import csv
import hashlib
import io
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from .dynamics import load_problem, make_problem, save_problem
from .errors import ConfigurationError
from .graph import KNOWN_NETWORKS, load_edge_list, make_network
from .nc import NcConfig, run_network_collaborator, run_nr2cd
from .stats import mark, rank_sum_test, summarize

ALGORITHMS = {"nc": run_network_collaborator, "nr2cd": run_nr2cd}
DEFAULT_REPS = 20


@dataclass
class Instance:
    id: str
    network: str | None = None
    dynamics: str = "EG"
    ns: int = 5
    l: int = 10
    seed: int = 0
    n: int = 50  # node count for synthetic generators
    edges: str | None = None  # edge-list path instead of a named network
    truth: str | None = None

    @classmethod
    def from_dict(cls, d: dict, index: int = 0) -> "Instance":
        d = dict(d)
        known = set(cls.__dataclass_fields__)
        unknown = set(d) - known
        if unknown:
            raise ConfigurationError(f"unknown instance keys: {sorted(unknown)}")
        if d.get("network") is None and d.get("edges") is None:
            raise ConfigurationError(f"instance {index} names neither a network nor an edge list")
        if "id" not in d:
            src = d.get("network") or Path(d["edges"]).stem
            d["id"] = f"{src}-{d.get('dynamics', 'EG')}{d.get('ns', 5)}-{d.get('l', 10)}"
        inst = cls(**d)
        inst.dynamics = inst.dynamics.upper()
        if inst.dynamics not in ("EG", "RN"):
            raise ConfigurationError(f"instance {inst.id}: dynamics must be EG or RN")
        if inst.network is not None and inst.network.upper() not in KNOWN_NETWORKS:
            raise ConfigurationError(
                f"unknown network {inst.network!r}; known: {', '.join(KNOWN_NETWORKS)}"
            )
        if inst.ns < 1 or inst.l < 1:
            raise ConfigurationError(f"instance {inst.id}: ns and l must be >= 1")
        return inst

    def build(self):
        if self.edges is not None:
            net = load_edge_list(self.edges, self.truth, name=Path(self.edges).stem)
        else:
            net = make_network(self.network, seed=self.seed, n=self.n)
        return make_problem(net, self.dynamics, self.ns, self.l, self.seed)


@dataclass
class SuiteSpec:
    instances: list[Instance]
    algorithms: list[str] = field(default_factory=lambda: ["nc", "nr2cd"])
    reps: int = DEFAULT_REPS
    seed: int = 0
    config: dict = field(default_factory=dict)

    @classmethod
    def from_dict(cls, d: dict) -> "SuiteSpec":
        unknown = set(d) - {"instances", "algorithms", "reps", "seed", "config"}
        if unknown:
            raise ConfigurationError(f"unknown suite keys: {sorted(unknown)}")
        if not d.get("instances"):
            raise ConfigurationError("suite has no instances")
        spec = cls(
            instances=[Instance.from_dict(x, i) for i, x in enumerate(d["instances"])],
            algorithms=list(d.get("algorithms", ["nc", "nr2cd"])),
            reps=int(d.get("reps", DEFAULT_REPS)),
            seed=int(d.get("seed", 0)),
            config=dict(d.get("config", {})),
        )
        spec.validate()
        return spec

    @classmethod
    def load(cls, path) -> "SuiteSpec":
        with open(path) as fh:
            try:
                d = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ConfigurationError(f"{path}: invalid JSON ({exc})") from None
        return cls.from_dict(d)

    def validate(self) -> None:
        if self.reps < 1:
            raise ConfigurationError(f"repetitions must be >= 1, got {self.reps}")
        for a in self.algorithms:
            check_algorithm(a)
        ids = [i.id for i in self.instances]
        if len(set(ids)) != len(ids):
            raise ConfigurationError("instance ids must be unique")
        NcConfig.from_dict(self.config)


def check_algorithm(name: str) -> str:
    if name not in ALGORITHMS:
        raise ConfigurationError(f"unknown algorithm {name!r}; known: {', '.join(ALGORITHMS)}")
    return name


def cell_seed(base: int, instance_id: str, algorithm: str, rep: int) -> int:
    """Independent, reproducible 63-bit seed for one suite cell."""
    key = f"{base}|{instance_id}|{algorithm}|{rep}".encode()
    return int.from_bytes(hashlib.sha256(key).digest()[:8], "little") >> 1


def run_one(problem, algorithm: str, cfg: NcConfig):
    return ALGORITHMS[check_algorithm(algorithm)](problem, cfg)


def generate(spec: SuiteSpec, out_dir) -> list[Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    for inst in spec.instances:
        p = out / f"{inst.id}.json"
        save_problem(inst.build(), p)
        paths.append(p)
    return paths


def _cell(task: tuple) -> dict:
    dataset, inst_id, algorithm, rep, seed, overrides, run_path, order = task
    rec = {"instance": inst_id, "algorithm": algorithm, "rep": rep, "seed": seed}
    try:
        cfg = NcConfig.from_dict({**overrides, "seed": seed})
        res = run_one(load_problem(dataset), algorithm, cfg)
        doc = res.to_dict()
        # order lets ``stats`` rebuild the report in suite order
        doc.update(instance=inst_id, rep=rep, order=list(order))
        Path(run_path).write_text(json.dumps(doc, sort_keys=True, indent=1))
        rec.update(ok=True, **_metrics(doc))
    except Exception as exc:  # a failed cell must not stop the suite
        rec.update(ok=False, error=f"{type(exc).__name__}: {exc}")
    return rec


def _metrics(doc: dict) -> dict:
    m = doc["metrics"]
    return {"mcc": m["mcc"], "nmi": m["nmi_vs_truth"], "q": m["q_star"]}


def run_suite(spec: SuiteSpec, out_dir, parallel: int = 1, cfg_overrides=None) -> dict:
    """Run every (instance, algorithm, repetition) cell and write the report."""
    out = Path(out_dir)
    runs = out / "runs"
    runs.mkdir(parents=True, exist_ok=True)
    overrides = {**spec.config, **(cfg_overrides or {})}
    NcConfig.from_dict(overrides)
    datasets = generate(spec, out / "datasets")
    tasks = []
    for i, (inst, ds) in enumerate(zip(spec.instances, datasets)):
        for j, algo in enumerate(spec.algorithms):
            for rep in range(spec.reps):
                seed = cell_seed(spec.seed, inst.id, algo, rep)
                path = runs / f"{inst.id}__{algo}__r{rep:03d}.json"
                tasks.append((str(ds), inst.id, algo, rep, seed, overrides, str(path), (i, j)))
    if parallel > 1:
        with ProcessPoolExecutor(max_workers=parallel) as pool:
            records = list(pool.map(_cell, tasks))
    else:
        records = [_cell(t) for t in tasks]
    failures = [r for r in records if not r["ok"]]
    report = aggregate(records, [i.id for i in spec.instances], spec.algorithms)
    report["failures"] = failures
    write_report(report, out)
    return report


def load_runs(run_dir) -> list[dict]:
    records = []
    for p in sorted(Path(run_dir).glob("*.json")):
        doc = json.loads(p.read_text())
        records.append({
            "instance": doc["instance"], "algorithm": doc["algorithm"], "rep": doc["rep"],
            "seed": doc["config"]["seed"], "ok": True, "order": doc.get("order", [0, 0]),
            **_metrics(doc),
        })
    return records


def _ordered(records, key: str, slot: int) -> list[str]:
    first = {}
    for r in records:
        pos = r.get("order", [0, 0])[slot]
        first[r[key]] = min(first.get(r[key], pos), pos)
    return sorted(first, key=lambda k: (first[k], k))


def aggregate(records: list[dict], instances=None, algorithms=None) -> dict:
    """Per-cell summaries plus rank-sum comparisons against the first algorithm.

    The CD metric is NMI against the truth partition, or modularity Q when an
    instance has none.  A mark of '+' means the compared algorithm is
    significantly better than the reference, '-' significantly worse.
    """
    ok = [r for r in records if r.get("ok", True)]
    instances = instances or _ordered(ok, "instance", 0)
    algorithms = algorithms or _ordered(ok, "algorithm", 1)
    ref = algorithms[0]
    rows = []
    wtl = {a: {"+": 0, "~": 0, "-": 0} for a in algorithms[1:]}
    for inst in instances:
        cell = {a: [r for r in ok if r["instance"] == inst and r["algorithm"] == a]
                for a in algorithms}
        has_truth = all(r["nmi"] is not None for rs in cell.values() for r in rs)
        cd_metric = "nmi" if has_truth else "q"
        for metric in ("mcc", cd_metric):
            values = {a: [r[metric] for r in sorted(cell[a], key=lambda r: r["rep"])]
                      for a in algorithms}
            ref_sum = summarize(values[ref])
            for a in algorithms:
                s = summarize(values[a])
                row = {"instance": inst, "algorithm": a, "metric": metric, **s,
                       "mean_std": _mean_std(s), "p_value": None, "mark": None}
                if a != ref and values[a] and values[ref]:
                    p = rank_sum_test(values[a], values[ref])
                    row["p_value"] = p
                    row["mark"] = mark(p, s["mean"], ref_sum["mean"])
                    wtl[a][row["mark"]] += 1
                rows.append(row)
    return {"reference": ref, "rows": rows, "win_tie_loss": wtl}


def _mean_std(s: dict) -> str:
    if s["mean"] is None:
        return ""
    return f"{s['mean']:.2e}({s['std']:.2e})"


REPORT_FIELDS = ["instance", "algorithm", "metric", "mean", "std", "median", "n",
                 "mean_std", "p_value", "mark"]


def report_csv(report: dict) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=REPORT_FIELDS, lineterminator="\n")
    w.writeheader()
    for row in report["rows"]:
        w.writerow({k: ("" if row[k] is None else row[k]) for k in REPORT_FIELDS})
    return buf.getvalue()


def write_report(report: dict, out_dir) -> None:
    out = Path(out_dir)
    (out / "report.json").write_text(json.dumps(report, sort_keys=True, indent=1))
    (out / "report.csv").write_text(report_csv(report))


def find_row(report: dict, instance: str, algorithm: str, metric: str):
    for r in report["rows"]:
        if (r["instance"], r["algorithm"], r["metric"]) == (instance, algorithm, metric):
            return r
    return None

"""Joint reconstruction and community detection with two-way knowledge transfer.

The NR task runs NSGA-II over adjacency genomes.  Each normal-stage
generation hands a representative network to a dynamic community-detection
step, and the resulting partition drives two masked local searches back in
the NR population.  :func:`run_nr2cd` is the no-transfer baseline.
"""

from __future__ import annotations

import csv
import dataclasses
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .community import CdRates, cd_dynamic_step, cd_preoptimize
from .errors import ConfigurationError
from .moea import (
    NrOptimizer,
    Population,
    crowding_distance,
    environment_selection,
    fast_nondominated_sort,
    nr_offspring,
    survivor_indices,
)
from .objectives import mcc, modularity, nmi, nr_objectives_batch, symmetrize

TRANSFER_FLIP = 0.8


@dataclass
class NcConfig:
    n1: int = 100
    n2: int = 100
    tfe1: int = 200_000
    tfe2: int = 200_000
    lambda_: float = 0.5
    t1: int = 1000
    alpha: int = 20
    seed: int = 0
    pc: float = 1.0
    pm: float | None = None  # None -> 1/D
    p_mu: float = 0.2
    p_mi: float = 0.2
    p_mumi: float = 0.5

    @classmethod
    def from_dict(cls, d: dict) -> "NcConfig":
        d = dict(d)
        if "lambda" in d:
            d["lambda_"] = d.pop("lambda")
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = set(d) - names
        if unknown:
            raise ConfigurationError(f"unknown config keys: {sorted(unknown)}")
        return cls(**d)

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["lambda"] = d.pop("lambda_")
        return d

    @property
    def normal_fe1(self) -> int:
        return int(math.floor(self.lambda_ * self.tfe1))

    @property
    def normal_fe2(self) -> int:
        return int(math.floor(self.lambda_ * self.tfe2))

    @property
    def steps(self) -> int:
        """Number of dynamic CD steps T."""
        return math.ceil(self.lambda_ * self.tfe1 / (self.n1 + 2 * self.t1))

    @property
    def t2(self) -> int:
        return int(math.floor(self.lambda_ * self.tfe2 / self.steps))

    @property
    def cd_rates(self) -> CdRates:
        return CdRates(self.p_mu, self.p_mi, self.p_mumi)

    def validate_baseline(self) -> None:
        if self.n1 < 2 or self.n2 < 2:
            raise ConfigurationError("population sizes must be >= 2")
        if self.tfe1 < self.n1:
            raise ConfigurationError(f"tfe1={self.tfe1} cannot fit one NR population")
        if self.tfe2 < self.n2:
            raise ConfigurationError(f"tfe2={self.tfe2} cannot fit one CD population")

    def validate(self) -> None:
        self.validate_baseline()
        if not 0.0 < self.lambda_ < 1.0:
            raise ConfigurationError(f"lambda must lie in (0, 1), got {self.lambda_}")
        if self.t1 < 0 or self.alpha < 0:
            raise ConfigurationError("t1 and alpha must be non-negative")
        if self.tfe1 - self.normal_fe1 < self.n1:
            raise ConfigurationError("NR pre-optimization budget below one population")
        if self.tfe2 - self.normal_fe2 < self.n2:
            raise ConfigurationError("CD pre-optimization budget below one population")
        if self.normal_fe1 < self.n1:
            raise ConfigurationError("NR normal-stage budget below one generation")
        if self.steps < 1:
            raise ConfigurationError("no CD steps fit the normal stage")
        if self.t2 < self.n2:
            raise ConfigurationError(
                f"t2={self.t2} per CD step is smaller than the CD population n2={self.n2}"
            )


# ---------------------------------------------------------------------------
# Representative selection and CD -> NR transfer

def select_representative_index(objs, rng) -> int:
    """First-front member with the largest crowding distance.

    Ties are broken uniformly; fronts of one or two members pick uniformly.
    """
    objs = np.asarray(objs)
    if objs.shape[0] == 0:
        raise RuntimeError("cannot select from an empty population")
    front = np.asarray(fast_nondominated_sort(objs)[0])
    if front.size > 2:
        cd = crowding_distance(objs[front])
        front = front[cd == cd.max()]
    return int(front[rng.integers(front.size)])


def select_representative(pop: Population, rng) -> np.ndarray:
    return pop.genomes[select_representative_index(pop.objs, rng)]


def intra_positions(partition, community: int) -> np.ndarray:
    """Flat off-diagonal positions (i, j) with both endpoints in one community."""
    lab = np.asarray(partition)
    n = lab.size
    members = np.flatnonzero(lab == community)
    ii, jj = np.meshgrid(members, members, indexing="ij")
    keep = ii != jj
    return np.sort((ii[keep] * n + jj[keep]).ravel())


def inter_positions(partition) -> np.ndarray:
    """Flat positions (i, j) whose endpoints lie in different communities."""
    lab = np.asarray(partition)
    return np.flatnonzero((lab[:, None] != lab[None, :]).ravel())


@dataclass
class LocalSearchResult:
    pop: Population | None
    evaluations: int
    mask: np.ndarray
    initial: np.ndarray | None = None  # the perturbed starting genomes


def local_search(x_ref, mask, alpha: int, budget: int, problem, rng,
                 pc: float = 1.0) -> LocalSearchResult:
    """Masked NSGA-II around ``x_ref``; the initialization counts toward ``budget``."""
    mask = np.asarray(mask, dtype=np.int64)
    size = min(alpha, budget)
    if size < 2 or mask.size == 0:
        return LocalSearchResult(None, 0, mask)
    init = np.tile(np.asarray(x_ref, dtype=bool), (size, 1))
    init[:, mask] ^= rng.random((size, mask.size)) < TRANSFER_FLIP
    used = size
    pop = Population(init.copy(), nr_objectives_batch(problem, init), used).annotate()
    pm = 1.0 / mask.size
    while used < budget:
        count = min(size, budget - used)
        pairs = (count + 1) // 2
        # parents drawn uniformly from the sub-population
        pa = pop.genomes[rng.integers(size, size=pairs)]
        pb = pop.genomes[rng.integers(size, size=pairs)]
        c1, c2 = nr_offspring(pa, pb, rng, mask, pm, pc)
        kids = np.empty((2 * pairs, init.shape[1]), dtype=bool)
        kids[0::2], kids[1::2] = c1, c2
        kids = kids[:count]
        used += count
        pool = Population.union(pop, Population(kids, nr_objectives_batch(problem, kids)))
        pop = environment_selection(pool, size)
    pop.fe_used = used
    return LocalSearchResult(pop, used, mask, init)


@dataclass
class TransferReport:
    reference: np.ndarray
    community: int
    community_size: int
    within: LocalSearchResult
    between: LocalSearchResult
    survivors_within: int = 0
    survivors_between: int = 0

    @property
    def evaluations(self) -> int:
        return self.within.evaluations + self.between.evaluations


def transfer_cd_to_nr(pop: Population, partition, alpha: int, t1: int, problem, rng,
                      n1: int | None = None, budget: int | None = None,
                      pc: float = 1.0) -> tuple[Population, TransferReport]:
    """Both local searches plus the merge; ``budget`` caps their joint cost."""
    n1 = len(pop) if n1 is None else n1
    lab = np.asarray(partition)
    if lab.size != problem.n:
        raise ValueError("partition length does not match the problem")
    budget = 2 * t1 if budget is None else budget
    x_ref = select_representative(pop, rng)
    labels = np.unique(lab)
    chosen = int(labels[rng.integers(labels.size)])
    skip = alpha == 0
    b1 = 0 if skip else min(t1, budget)
    within = local_search(x_ref, intra_positions(lab, chosen), alpha, b1, problem, rng, pc)
    b2 = 0 if skip else min(t1, budget - within.evaluations)
    between = local_search(x_ref, inter_positions(lab), alpha, b2, problem, rng, pc)

    parts = [pop] + [r.pop for r in (within, between) if r.pop is not None]
    pool = Population.union(*parts)
    keep_idx = np.sort(survivor_indices(pool.objs, n1))
    out = pool.take(keep_idx).annotate()
    out.fe_used = pop.fe_used + within.evaluations + between.evaluations
    report = TransferReport(x_ref.copy(), chosen, int(np.sum(lab == chosen)), within, between)
    base = len(pop)
    n_in = 0 if within.pop is None else len(within.pop)
    report.survivors_within = int(np.sum((keep_idx >= base) & (keep_idx < base + n_in)))
    report.survivors_between = int(np.sum(keep_idx >= base + n_in))
    return out, report


def knowledge_transfer_cd_to_nr(pop: Population, partition, alpha: int, t1: int,
                                problem, rng) -> Population:
    return transfer_cd_to_nr(pop, partition, alpha, t1, problem, rng)[0]


# ---------------------------------------------------------------------------
# Runs

@dataclass
class RunResult:
    algorithm: str
    config: dict
    x_star: np.ndarray
    c_star: np.ndarray
    mcc: float
    nmi_vs_truth: float | None
    q_star: float
    fe1: int
    fe2: int
    cd_steps: int
    trace: list = field(default_factory=list)
    x_star_objectives: tuple = ()

    def to_dict(self) -> dict:
        return {
            "algorithm": self.algorithm,
            "config": self.config,
            "metrics": {
                "mcc": self.mcc,
                "nmi_vs_truth": self.nmi_vs_truth,
                "q_star": self.q_star,
            },
            "fe1": self.fe1,
            "fe2": self.fe2,
            "cd_steps": self.cd_steps,
            "x_star": np.flatnonzero(self.x_star).tolist(),
            "x_star_objectives": list(self.x_star_objectives),
            "c_star": np.asarray(self.c_star).tolist(),
            "trace": self.trace,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=1)

    def trace_csv(self) -> str:
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=TRACE_FIELDS, lineterminator="\n")
        w.writeheader()
        for row in self.trace:
            w.writerow({k: ("" if row.get(k) is None else row.get(k)) for k in TRACE_FIELDS})
        return buf.getvalue()


TRACE_FIELDS = [
    "t", "fe1", "fe2", "front_size", "best_h", "rep_h", "rep_g", "q_t", "nmi_truth",
    "community", "community_size", "ls1_evals", "ls2_evals", "ls1_survivors",
    "ls2_survivors",
]


def _finish(name, cfg, problem, nr, rng, c_star, fe2, steps, trace) -> RunResult:
    idx = select_representative_index(nr.pop.objs, rng)
    x_star = nr.pop.genomes[idx].copy()
    net = problem.truth_network
    truth = net.truth_partition
    return RunResult(
        algorithm=name,
        config=cfg.to_dict(),
        x_star=x_star,
        c_star=np.asarray(c_star),
        mcc=mcc(x_star, net),
        nmi_vs_truth=None if truth is None else nmi(c_star, truth),
        q_star=modularity(net.adjacency, c_star),
        fe1=nr.fe,
        fe2=fe2,
        cd_steps=steps,
        trace=trace,
        x_star_objectives=tuple(float(v) for v in nr.pop.objs[idx]),
    )


def _base_record(t, nr, fe2) -> dict:
    objs = nr.pop.objs
    return {
        "t": t,
        "fe1": nr.fe,
        "fe2": fe2,
        "front_size": int(np.sum(nr.pop.rank == 0)),
        "best_h": float(objs[:, 0].min()),
    }


def run_network_collaborator(problem, cfg: NcConfig | None = None, progress=None) -> RunResult:
    cfg = cfg or NcConfig()
    cfg.validate()
    rng = np.random.default_rng(cfg.seed)
    n = problem.n
    nr = NrOptimizer(problem, rng, cfg.n1, cfg.pc, cfg.pm)
    rates = cfg.cd_rates

    # pre-optimization
    pre1 = cfg.tfe1 - cfg.normal_fe1
    nr.run(pre1)
    x0 = select_representative(nr.pop, rng)
    pre = cd_preoptimize(symmetrize(x0, n), cfg.n2, cfg.tfe2 - cfg.normal_fe2, rng, rates)
    c_prev = pre.partition
    fe2 = pre.fe_used

    steps, t2 = cfg.steps, cfg.t2
    done = 0
    trace = []
    t = 0
    while nr.fe < cfg.tfe1:
        t += 1
        nr.generation(cfg.tfe1 - nr.fe)
        rec = _base_record(t, nr, fe2)
        if done < steps and fe2 < cfg.tfe2:
            done += 1
            rep = select_representative_index(nr.pop.objs, rng)
            x_t = symmetrize(nr.pop.genomes[rep], n)
            budget2 = t2 if done < steps else cfg.tfe2 - fe2
            step = cd_dynamic_step(x_t, c_prev, cfg.n2, budget2, rng, rates)
            fe2 += step.fe_used
            c_prev = step.partition
            new_pop, rep_tr = transfer_cd_to_nr(
                nr.pop, c_prev, cfg.alpha, cfg.t1, problem, rng,
                n1=cfg.n1, budget=cfg.tfe1 - nr.fe, pc=cfg.pc,
            )
            nr.fe += rep_tr.evaluations
            new_pop.fe_used = nr.fe
            nr.pop = new_pop
            rep_objs = _rep_objs(problem, rep_tr.reference)
            rec.update(
                fe1=nr.fe,
                fe2=fe2,
                front_size=int(np.sum(nr.pop.rank == 0)),
                best_h=float(nr.pop.objs[:, 0].min()),
                rep_h=rep_objs[0],
                rep_g=rep_objs[1],
                q_t=step.quality,
                nmi_truth=(None if problem.truth_partition is None
                           else nmi(c_prev, problem.truth_partition)),
                community=rep_tr.community,
                community_size=rep_tr.community_size,
                ls1_evals=rep_tr.within.evaluations,
                ls2_evals=rep_tr.between.evaluations,
                ls1_survivors=rep_tr.survivors_within,
                ls2_survivors=rep_tr.survivors_between,
            )
        trace.append(rec)
        if progress is not None:
            progress(rec)
    return _finish("nc", cfg, problem, nr, rng, c_prev, fe2, done, trace)


def _rep_objs(problem, genome) -> tuple[float, float]:
    o = nr_objectives_batch(problem, np.asarray(genome)[None])[0]
    return float(o[0]), float(o[1])


def run_nr2cd(problem, cfg: NcConfig | None = None, progress=None) -> RunResult:
    """Reconstruct with the full NR budget, then detect communities once."""
    cfg = cfg or NcConfig()
    cfg.validate_baseline()
    rng = np.random.default_rng(cfg.seed)
    nr = NrOptimizer(problem, rng, cfg.n1, cfg.pc, cfg.pm)
    trace = []

    def record(opt):
        rec = _base_record(len(trace) + 1, opt, 0)
        trace.append(rec)
        if progress is not None:
            progress(rec)

    nr.run(cfg.tfe1, callback=record)
    x_star = select_representative(nr.pop, rng)
    cd = cd_preoptimize(symmetrize(x_star, problem.n), cfg.n2, cfg.tfe2, rng, cfg.cd_rates)
    if trace:
        trace[-1]["fe2"] = cd.fe_used
    # X* must be the genome the CD stage saw; reuse it instead of reselecting
    idx = int(np.flatnonzero((nr.pop.genomes == x_star).all(axis=1))[0])
    net = problem.truth_network
    truth = net.truth_partition
    return RunResult(
        algorithm="nr2cd",
        config=cfg.to_dict(),
        x_star=x_star.copy(),
        c_star=cd.partition,
        mcc=mcc(x_star, net),
        nmi_vs_truth=None if truth is None else nmi(cd.partition, truth),
        q_star=modularity(net.adjacency, cd.partition),
        fe1=nr.fe,
        fe2=cd.fe_used,
        cd_steps=0,
        trace=trace,
        x_star_objectives=tuple(float(v) for v in nr.pop.objs[idx]),
    )

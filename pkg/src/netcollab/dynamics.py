"""Evolutionary-game and resistor-network dynamics, and the per-node linear
systems they induce for network reconstruction."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.special import expit

from .errors import DimensionError
from .graph import Network

# prisoner's dilemma payoffs, rows/cols ordered (cooperate, defect)
PAYOFF = np.array([[1.0, 0.0], [1.2, 0.0]])
KAPPA = 0.1
V_PEAK = 1.0
OMEGA = 1e3
DELTA_W_MAX = 20.0


@dataclass(frozen=True, eq=False)
class EgData:
    strategies: np.ndarray  # (ns, l, n, 2) one-hot, [1,0] = cooperate
    payoffs: np.ndarray  # (ns, l, n)
    seed: int | None = None


@dataclass(frozen=True, eq=False)
class RnData:
    voltages: np.ndarray  # (ns, l, n)
    currents: np.ndarray  # (ns, l, n)
    perturbations: np.ndarray  # (ns, n)
    times: np.ndarray | None = None  # (ns, l)
    seed: int | None = None


def fermi(y_i, y_j, kappa: float = KAPPA):
    """Probability that a player with payoff ``y_i`` imitates one with ``y_j``."""
    return expit(-(np.asarray(y_i) - np.asarray(y_j)) / kappa)


def eg_payoffs(adjacency: np.ndarray, coop: np.ndarray) -> np.ndarray:
    """Round payoffs of every player given cooperation flags."""
    s = np.stack([coop, ~coop], axis=-1).astype(np.float64)
    # S_i^T P S_j for all pairs, weighted by the links
    pair = s @ PAYOFF @ s.T
    return (adjacency * pair).sum(axis=1)


def simulate_eg(net: Network, ns: int, l: int, seed: int) -> EgData:
    if ns < 1 or l < 1:
        raise ValueError("ns and l must be >= 1")
    rng = np.random.default_rng(seed)
    a = net.adjacency.astype(np.float64)
    n = net.n
    nbrs = [np.flatnonzero(net.adjacency[i]) for i in range(n)]
    has_nbr = np.array([len(x) > 0 for x in nbrs])
    strategies = np.zeros((ns, l, n, 2), dtype=np.uint8)
    payoffs = np.zeros((ns, l, n))
    for s in range(ns):
        coop = rng.random(n) < 0.5
        for t in range(l):
            y = eg_payoffs(a, coop)
            strategies[s, t, :, 0] = coop
            strategies[s, t, :, 1] = ~coop
            payoffs[s, t] = y
            # synchronous Fermi update against one random neighbour each
            partner = np.array(
                [x[rng.integers(len(x))] if len(x) else i for i, x in enumerate(nbrs)]
            )
            adopt = has_nbr & (rng.random(n) < fermi(y, y[partner]))
            coop = np.where(adopt, coop[partner], coop)
    return EgData(strategies, payoffs, seed)


def simulate_rn(net: Network, ns: int, l: int, seed: int) -> RnData:
    if ns < 1 or l < 1:
        raise ValueError("ns and l must be >= 1")
    rng = np.random.default_rng(seed)
    a = net.adjacency.astype(np.float64)
    n = net.n
    dw = rng.uniform(0.0, DELTA_W_MAX, size=(ns, n))
    times = rng.uniform(0.0, 10 * 2 * np.pi / OMEGA, size=(ns, l))
    v = V_PEAK * np.sin((OMEGA + dw[:, None, :]) * times[:, :, None])
    # I_i = sum_j a_ij (V_i - V_j) = deg_i V_i - (A V)_i
    cur = a.sum(axis=1) * v - v @ a.T
    return RnData(v, cur, dw, times, seed)


@dataclass(frozen=True, eq=False)
class NrProblem:
    """Per-node systems ``design[i] @ x_i ~= targets[i]``.

    ``design`` has shape (n, m, n) with m = ns * l stacked observations.
    """

    design: np.ndarray
    targets: np.ndarray
    truth_network: Network
    kind: str = ""
    data: EgData | RnData | None = None

    def __post_init__(self):
        n = self.truth_network.n
        if self.design.shape[0] != n or self.design.shape[2] != n:
            raise DimensionError(f"design shape {self.design.shape} does not fit n={n}")
        if self.targets.shape != self.design.shape[:2]:
            raise DimensionError("targets must have shape (n, m)")
        # (n, n, m) layout so that genome rows multiply contiguous blocks
        object.__setattr__(self, "_design_t", np.ascontiguousarray(self.design.transpose(0, 2, 1)))

    @property
    def n(self) -> int:
        return self.truth_network.n

    @property
    def dim(self) -> int:
        return self.n * self.n

    @property
    def truth_partition(self):
        return self.truth_network.truth_partition

    def truth_genome(self) -> np.ndarray:
        return self.truth_network.adjacency.reshape(-1).astype(bool)

    def residuals(self, genomes: np.ndarray) -> np.ndarray:
        """Reconstruction error h for a batch of genomes, shape (p, n*n)."""
        g = np.asarray(genomes, dtype=np.float64).reshape(-1, self.n, self.n)
        # pred[i, p, :] = x_{p,i} @ design_t[i]
        pred = np.matmul(g.transpose(1, 0, 2), self._design_t)
        diff = pred - self.targets[:, None, :]
        return np.einsum("ipm,ipm->p", diff, diff)


def _check_shapes(arr: np.ndarray, net: Network, what: str) -> None:
    if arr.ndim < 3 or arr.shape[2] != net.n:
        raise DimensionError(f"{what} shape {arr.shape} inconsistent with n={net.n}")


def build_eg_problem(data: EgData, net: Network) -> NrProblem:
    _check_shapes(data.strategies, net, "strategies")
    if data.payoffs.shape != data.strategies.shape[:3]:
        raise DimensionError("payoffs must match strategies' (ns, l, n)")
    ns, l, n, _ = data.strategies.shape
    s = data.strategies.reshape(ns * l, n, 2).astype(np.float64)
    # design[i, r, j] = S_i(r)^T P S_j(r)
    design = np.einsum("rik,kq,rjq->irj", s, PAYOFF, s)
    targets = data.payoffs.reshape(ns * l, n).T.copy()
    return NrProblem(design, targets, net, "EG", data)


def build_rn_problem(data: RnData, net: Network) -> NrProblem:
    _check_shapes(data.voltages, net, "voltages")
    if data.currents.shape != data.voltages.shape:
        raise DimensionError("currents must match voltages")
    ns, l, n = data.voltages.shape
    v = data.voltages.reshape(ns * l, n)
    # design[i, r, j] = V_i(r) - V_j(r)
    design = v.T[:, :, None] - v[None, :, :]
    targets = data.currents.reshape(ns * l, n).T.copy()
    return NrProblem(design, targets, net, "RN", data)


def make_problem(net: Network, kind: str, ns: int, l: int, seed: int) -> NrProblem:
    kind = kind.upper()
    if kind == "EG":
        return build_eg_problem(simulate_eg(net, ns, l, seed), net)
    if kind == "RN":
        return build_rn_problem(simulate_rn(net, ns, l, seed), net)
    raise ValueError(f"unknown dynamics {kind!r}; expected EG or RN")


# ---------------------------------------------------------------------------
# Dataset documents

def problem_to_dict(problem: NrProblem, meta: dict | None = None) -> dict:
    net = problem.truth_network
    data = problem.data
    doc = {
        "format": "netcollab-dataset/1",
        "dynamics": problem.kind,
        "n": net.n,
        "network": net.name,
        "edges": net.edges().tolist(),
        "design_shape": [problem.design.shape[1], net.n],
        "seed": getattr(data, "seed", None),
    }
    if net.truth_partition is not None:
        doc["truth_partition"] = net.truth_partition.tolist()
    if isinstance(data, EgData):
        doc["ns"], doc["l"] = data.payoffs.shape[:2]
        doc["cooperate"] = data.strategies[..., 0].astype(int).tolist()
        doc["payoffs"] = data.payoffs.tolist()
    elif isinstance(data, RnData):
        doc["ns"], doc["l"] = data.voltages.shape[:2]
        doc["voltages"] = data.voltages.tolist()
        doc["currents"] = data.currents.tolist()
        doc["perturbations"] = data.perturbations.tolist()
        if data.times is not None:
            doc["times"] = data.times.tolist()
    else:
        raise ValueError("problem carries no raw dynamics to export")
    if meta:
        doc["meta"] = meta
    return doc


def problem_from_dict(doc: dict) -> NrProblem:
    n = int(doc["n"])
    a = np.zeros((n, n), dtype=np.uint8)
    e = np.asarray(doc["edges"], dtype=np.int64).reshape(-1, 2)
    a[e[:, 0], e[:, 1]] = 1
    a[e[:, 1], e[:, 0]] = 1
    net = Network(a, doc.get("truth_partition"), doc.get("network", ""))
    kind = doc["dynamics"].upper()
    seed = doc.get("seed")
    if kind == "EG":
        coop = np.asarray(doc["cooperate"], dtype=np.uint8)
        strat = np.stack([coop, 1 - coop], axis=-1)
        data = EgData(strat, np.asarray(doc["payoffs"], dtype=np.float64), seed)
        return build_eg_problem(data, net)
    if kind == "RN":
        times = doc.get("times")
        data = RnData(
            np.asarray(doc["voltages"], dtype=np.float64),
            np.asarray(doc["currents"], dtype=np.float64),
            np.asarray(doc["perturbations"], dtype=np.float64),
            None if times is None else np.asarray(times, dtype=np.float64),
            seed,
        )
        return build_rn_problem(data, net)
    raise ValueError(f"unknown dynamics {kind!r}")


def save_problem(problem: NrProblem, path, meta: dict | None = None) -> None:
    text = json.dumps(problem_to_dict(problem, meta), sort_keys=True, separators=(",", ":"))
    Path(path).write_text(text + "\n", encoding="utf-8")


def load_problem(path) -> NrProblem:
    return problem_from_dict(json.loads(Path(path).read_text(encoding="utf-8")))

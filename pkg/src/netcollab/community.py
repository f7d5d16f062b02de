"""Label-vector genetic operators and the two community-detection optimizers.

Labels are node ids in ``[0, n)``; operators only ever copy labels between
nodes, so that range is preserved.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .moea import binary_tournament, rank_and_crowding, survivor_indices
from .objectives import ModularityEvaluator, nmi_batch


@dataclass(frozen=True)
class CdRates:
    p_mu: float = 0.2
    p_mi: float = 0.2
    p_mumi: float = 0.5


class Neighborhoods:
    """CSR neighbour lists of an undirected graph."""

    def __init__(self, adjacency):
        a = np.asarray(adjacency) != 0
        self.adjacency = a
        self.n = a.shape[0]
        self.deg = a.sum(axis=1)
        self.indptr = np.concatenate([[0], np.cumsum(self.deg)])
        self.indices = np.nonzero(a)[1]
        self.has_nbr = self.deg > 0

    def random_neighbor(self, shape, rng) -> np.ndarray:
        """A uniformly random neighbour per node (self for isolated nodes)."""
        u = rng.random(shape)
        off = np.floor(u * self.deg).astype(np.int64)
        pick = np.minimum(self.indptr[:-1] + off, max(self.indices.size - 1, 0))
        if self.indices.size == 0:
            return np.broadcast_to(np.arange(self.n), shape).copy()
        return np.where(self.has_nbr, self.indices[pick], np.arange(self.n))


def random_labels(nb: Neighborhoods, count: int, rng) -> np.ndarray:
    """Neighbour-label initialization.

    Starting from singletons, nodes are visited in random order and each copies
    the current label of a random neighbour, so labels spread along edges.
    """
    lab = np.tile(np.arange(nb.n), (count, 1))
    for row in lab:
        order = rng.permutation(nb.n)
        picks = nb.random_neighbor(nb.n, rng)
        for v in order:
            row[v] = row[picks[v]]
    return lab


def label_mutation(lab: np.ndarray, nb: Neighborhoods, rate: float, rng) -> np.ndarray:
    hit = (rng.random(lab.shape) < rate) & nb.has_nbr
    src = nb.random_neighbor(lab.shape, rng)
    new = np.take_along_axis(lab, src, axis=1)
    return np.where(hit, new, lab)


def label_migration(lab: np.ndarray, nb: Neighborhoods, rate: float, rng) -> np.ndarray:
    """Selected nodes take the most common neighbour label (ties at random)."""
    hit = (rng.random(lab.shape) < rate) & nb.has_nbr
    if not hit.any():
        return lab
    rows = np.flatnonzero(hit.any(axis=1))
    out = lab.copy()
    a = nb.adjacency.astype(np.float64)
    for r in rows:
        uniq, inv = np.unique(lab[r], return_inverse=True)
        onehot = np.zeros((nb.n, uniq.size))
        onehot[np.arange(nb.n), inv] = 1.0
        counts = a @ onehot
        # jitter below 1 only reorders equal counts
        counts += rng.random(counts.shape) * 0.5
        best = uniq[np.argmax(counts, axis=1)]
        out[r] = np.where(hit[r], best, lab[r])
    return out


def two_point_crossover(pa: np.ndarray, pb: np.ndarray, rng):
    pairs, n = pa.shape
    cuts = np.sort(rng.integers(0, n + 1, size=(pairs, 2)), axis=1)
    col = np.arange(n)[None, :]
    mid = (col >= cuts[:, :1]) & (col < cuts[:, 1:])
    return np.where(mid, pb, pa), np.where(mid, pa, pb)


def cd_offspring(pa: np.ndarray, pb: np.ndarray, nb: Neighborhoods, rng,
                 rates: CdRates = CdRates()):
    c1, c2 = two_point_crossover(pa, pb, rng)
    kids = np.concatenate([c1, c2])
    use_mut = rng.random(kids.shape[0]) < rates.p_mumi
    out = kids.copy()
    if use_mut.any():
        out[use_mut] = label_mutation(kids[use_mut], nb, rates.p_mu, rng)
    if (~use_mut).any():
        out[~use_mut] = label_migration(kids[~use_mut], nb, rates.p_mi, rng)
    half = pa.shape[0]
    return out[:half], out[half:]


def cd_variation(p1, p2, adjacency, rng, rates: CdRates = CdRates()):
    """Two-point crossover, then per child either mutation or migration."""
    nb = Neighborhoods(adjacency)
    a = np.asarray(p1, dtype=np.int64)[None]
    b = np.asarray(p2, dtype=np.int64)[None]
    c1, c2 = cd_offspring(a, b, nb, rng, rates)
    return c1[0], c2[0]


def _breed(pop: np.ndarray, parents: np.ndarray, count: int, nb, rng, rates) -> np.ndarray:
    pairs = (count + 1) // 2
    c1, c2 = cd_offspring(pop[parents[:pairs]], pop[parents[pairs:2 * pairs]], nb, rng, rates)
    kids = np.empty((2 * pairs, pop.shape[1]), dtype=np.int64)
    kids[0::2], kids[1::2] = c1, c2
    return kids[:count]


@dataclass
class CdResult:
    partition: np.ndarray
    quality: float
    fe_used: int
    front: np.ndarray | None = None  # final first-front label vectors
    front_objs: np.ndarray | None = None  # (Q, NMI) of the front


def cd_preoptimize(adjacency, n2: int, budget: int, rng, rates: CdRates = CdRates()) -> CdResult:
    """Single-objective GA maximizing modularity within ``budget`` evaluations."""
    if budget < n2:
        raise ValueError(f"budget {budget} smaller than population {n2}")
    nb = Neighborhoods(adjacency)
    q_of = ModularityEvaluator(adjacency)
    pop = random_labels(nb, n2, rng)
    q = q_of(pop)
    fe = n2
    while fe < budget:
        count = min(n2, budget - fe)
        a = rng.integers(n2, size=2 * ((count + 1) // 2))
        b = rng.integers(n2, size=a.size)
        parents = np.where(q[b] > q[a], b, a)
        kids = _breed(pop, parents, count, nb, rng, rates)
        kq = q_of(kids)
        fe += count
        allpop = np.concatenate([pop, kids])
        allq = np.concatenate([q, kq])
        keep = np.argsort(-allq, kind="stable")[:n2]
        pop, q = allpop[keep], allq[keep]
    best = int(np.argmax(q))
    return CdResult(pop[best].copy(), float(q[best]), fe)


def cd_dynamic_step(x_t, c_prev, n2: int, t2: int, rng, rates: CdRates = CdRates()) -> CdResult:
    """Biobjective (modularity, NMI to the previous partition) NSGA-II step.

    The previous partition seeds the initial population.  The returned
    partition is the first-front member with the highest modularity.
    """
    c_prev = np.asarray(c_prev, dtype=np.int64)
    if t2 < n2:
        raise ValueError(f"budget {t2} smaller than population {n2}")
    nb = Neighborhoods(x_t)
    if c_prev.size != nb.n:
        raise ValueError("previous partition length does not match the snapshot")
    q_of = ModularityEvaluator(x_t)

    def evaluate(lab):
        return np.column_stack([-q_of(lab), -nmi_batch(lab, c_prev)])

    # labels of c_prev may lie outside [0, n); map each community to a member id
    seed = np.empty_like(c_prev)
    for lab in np.unique(c_prev):
        members = np.flatnonzero(c_prev == lab)
        seed[members] = members[0]
    pop = np.concatenate([seed[None], random_labels(nb, n2 - 1, rng)])
    objs = evaluate(pop)
    fe = n2
    rank, crowd = rank_and_crowding(objs)
    while fe < t2:
        count = min(n2, t2 - fe)
        parents = binary_tournament(rank, crowd, 2 * ((count + 1) // 2), rng)
        kids = _breed(pop, parents, count, nb, rng, rates)
        kobjs = evaluate(kids)
        fe += count
        allpop = np.concatenate([pop, kids])
        allobjs = np.concatenate([objs, kobjs])
        keep = survivor_indices(allobjs, n2)
        pop, objs = allpop[keep], allobjs[keep]
        rank, crowd = rank_and_crowding(objs)
    first = np.flatnonzero(rank == 0)
    best = first[np.argmin(objs[first, 0])]
    return CdResult(pop[best].copy(), float(-objs[best, 0]), fe, pop[first].copy(), -objs[first])

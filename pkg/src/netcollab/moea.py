"""NSGA-II machinery and the binary NR optimizer."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError
from .objectives import nr_objectives_batch


def _as_objs(objs) -> np.ndarray:
    try:
        arr = np.asarray(objs, dtype=np.float64)
    except ValueError:
        raise DimensionError("objective vectors have mixed lengths") from None
    if arr.ndim != 2:
        raise DimensionError("objective vectors have mixed lengths")
    return arr


def fast_nondominated_sort(objs) -> list[list[int]]:
    """Deb's fast nondominated sorting; returns fronts as index lists."""
    f = _as_objs(objs)
    n = f.shape[0]
    if n == 0:
        raise ValueError("cannot sort an empty set")
    le = np.all(f[:, None, :] <= f[None, :, :], axis=2)
    lt = np.any(f[:, None, :] < f[None, :, :], axis=2)
    dom = le & lt  # dom[p, q]: p dominates q
    count = dom.sum(axis=0)
    fronts = []
    current = np.flatnonzero(count == 0)
    while current.size:
        fronts.append(current.tolist())
        count = count - dom[current].sum(axis=0)
        count[current] = -1
        current = np.flatnonzero(count == 0)
    return fronts


def front_ranks(objs) -> np.ndarray:
    fronts = fast_nondominated_sort(objs)
    rank = np.empty(sum(map(len, fronts)), dtype=np.int64)
    for k, fr in enumerate(fronts):
        rank[fr] = k
    return rank


def crowding_distance(front_objs) -> np.ndarray:
    f = _as_objs(front_objs)
    n, m = f.shape
    dist = np.zeros(n)
    if n <= 2:
        dist[:] = np.inf
        return dist
    for k in range(m):
        order = np.argsort(f[:, k], kind="stable")
        col = f[order, k]
        span = col[-1] - col[0]
        dist[order[0]] = dist[order[-1]] = np.inf
        if span > 0:
            dist[order[1:-1]] += (col[2:] - col[:-2]) / span
    return dist


def rank_and_crowding(objs) -> tuple[np.ndarray, np.ndarray]:
    f = _as_objs(objs)
    rank = np.empty(f.shape[0], dtype=np.int64)
    crowd = np.empty(f.shape[0])
    for k, fr in enumerate(fast_nondominated_sort(f)):
        rank[fr] = k
        crowd[fr] = crowding_distance(f[fr])
    return rank, crowd


def survivor_indices(objs, n: int) -> np.ndarray:
    """NSGA-II survival: whole fronts first, the last one cut by crowding."""
    f = _as_objs(objs)
    if f.shape[0] < n:
        raise ValueError(f"pool of {f.shape[0]} is smaller than target size {n}")
    chosen: list[int] = []
    for fr in fast_nondominated_sort(f):
        if len(chosen) + len(fr) <= n:
            chosen.extend(fr)
            if len(chosen) == n:
                break
            continue
        cd = crowding_distance(f[fr])
        order = np.argsort(-cd, kind="stable")
        chosen.extend(np.asarray(fr)[order[: n - len(chosen)]].tolist())
        break
    return np.asarray(chosen, dtype=np.int64)


@dataclass
class Population:
    """Genomes (one per row) with their objective vectors."""

    genomes: np.ndarray
    objs: np.ndarray
    fe_used: int = 0
    rank: np.ndarray | None = field(default=None, repr=False)
    crowding: np.ndarray | None = field(default=None, repr=False)

    def __len__(self):
        return self.genomes.shape[0]

    def annotate(self) -> "Population":
        self.rank, self.crowding = rank_and_crowding(self.objs)
        return self

    def take(self, idx) -> "Population":
        return Population(self.genomes[idx], self.objs[idx], self.fe_used)

    @staticmethod
    def union(*pops: "Population") -> "Population":
        return Population(
            np.concatenate([p.genomes for p in pops]),
            np.concatenate([p.objs for p in pops]),
            max(p.fe_used for p in pops),
        )


def environment_selection(pool: Population, n: int) -> Population:
    out = pool.take(survivor_indices(pool.objs, n))
    return out.annotate()


def binary_tournament(rank, crowding, count: int, rng) -> np.ndarray:
    """Indices of ``count`` winners of (rank asc, crowding desc) tournaments."""
    size = len(rank)
    a = rng.integers(size, size=count)
    b = rng.integers(size, size=count)
    better_b = (rank[b] < rank[a]) | ((rank[b] == rank[a]) & (crowding[b] > crowding[a]))
    return np.where(better_b, b, a)


# ---------------------------------------------------------------------------
# Binary variation for the NR genome

def offdiagonal_positions(n: int) -> np.ndarray:
    flat = np.arange(n * n)
    return flat[flat // n != flat % n]


def _check_mask(mask, dim: int, n: int) -> np.ndarray:
    m = np.unique(np.asarray(mask, dtype=np.int64))
    if m.size and (m[0] < 0 or m[-1] >= dim):
        raise IndexError(f"mask index out of range [0, {dim})")
    return m[m // n != m % n]


def nr_variation(p1, p2, rng, mask=None, pc: float = 1.0, pm: float | None = None,
                 point: int | None = None):
    """Single-point crossover then bitwise mutation on two binary genomes.

    With ``mask`` the operators only see the listed positions (in increasing
    order); everything else is copied from the respective parent.  Diagonal
    positions never change.  The default mutation rate is 1/D unmasked and
    1/|mask| masked.
    """
    a = np.asarray(p1, dtype=bool)
    b = np.asarray(p2, dtype=bool)
    if a.shape != b.shape or a.ndim != 1:
        raise DimensionError("parents must be equal-length 1-D genomes")
    dim = a.size
    n = int(round(np.sqrt(dim)))
    if mask is None:
        pos = offdiagonal_positions(n)
        rate = 1.0 / dim if pm is None else pm
    else:
        pos = _check_mask(mask, dim, n)
        rate = (1.0 / max(pos.size, 1)) if pm is None else pm
    c1, c2 = nr_offspring(a[None], b[None], rng, pos, rate, pc, point)
    return c1[0], c2[0]


def nr_offspring(pa: np.ndarray, pb: np.ndarray, rng, positions: np.ndarray,
                 pm: float, pc: float = 1.0, point: int | None = None):
    """Vectorised pairwise variation restricted to ``positions``."""
    c1 = pa.copy()
    c2 = pb.copy()
    k = positions.size
    pairs = pa.shape[0]
    if k == 0:
        return c1, c2
    sa = pa[:, positions]
    sb = pb[:, positions]
    if point is not None:
        cut = np.full(pairs, point)
    elif k > 1:
        cut = rng.integers(1, k, size=pairs)
    else:
        cut = np.zeros(pairs, dtype=np.int64)
    do_x = rng.random(pairs) < pc
    head = (np.arange(k)[None, :] < cut[:, None]) & do_x[:, None]
    # child 1 takes the head from parent 2, child 2 the head from parent 1
    n1 = np.where(head, sb, sa)
    n2 = np.where(head, sa, sb)
    n1 ^= rng.random((pairs, k)) < pm
    n2 ^= rng.random((pairs, k)) < pm
    c1[:, positions] = n1
    c2[:, positions] = n2
    return c1, c2


class NrOptimizer:
    """Steady NSGA-II over binary adjacency genomes.

    Every objective evaluation goes through :meth:`evaluate`, which keeps
    ``fe`` exact.
    """

    def __init__(self, problem, rng, pop_size: int = 100, pc: float = 1.0,
                 pm: float | None = None, init_density: float | None = None):
        self.problem = problem
        self.rng = rng
        self.pop_size = pop_size
        self.pc = pc
        self.pm = 1.0 / problem.dim if pm is None else pm
        self.init_density = 6.0 / problem.n if init_density is None else init_density
        self.positions = offdiagonal_positions(problem.n)
        self.fe = 0
        self.pop: Population | None = None

    def evaluate(self, genomes: np.ndarray) -> np.ndarray:
        self.fe += genomes.shape[0]
        return nr_objectives_batch(self.problem, genomes)

    def random_genomes(self, count: int) -> np.ndarray:
        g = np.zeros((count, self.problem.dim), dtype=bool)
        g[:, self.positions] = self.rng.random((count, self.positions.size)) < self.init_density
        return g

    def initialize(self, budget: int | None = None) -> Population:
        count = self.pop_size if budget is None else min(self.pop_size, budget)
        g = self.random_genomes(count)
        self.pop = Population(g, self.evaluate(g), self.fe).annotate()
        return self.pop

    def variation(self, pop: Population, count: int, positions=None, pm=None) -> np.ndarray:
        pos = self.positions if positions is None else positions
        rate = self.pm if pm is None else pm
        pairs = (count + 1) // 2
        idx = binary_tournament(pop.rank, pop.crowding, 2 * pairs, self.rng)
        c1, c2 = nr_offspring(pop.genomes[idx[:pairs]], pop.genomes[idx[pairs:]],
                              self.rng, pos, rate, self.pc)
        kids = np.empty((2 * pairs, pop.genomes.shape[1]), dtype=bool)
        kids[0::2], kids[1::2] = c1, c2
        return kids[:count]

    def generation(self, budget: int | None = None) -> int:
        """One generation of at most ``budget`` offspring; returns evaluations used."""
        count = self.pop_size if budget is None else min(self.pop_size, budget)
        if count <= 0:
            return 0
        kids = self.variation(self.pop, count)
        pool = Population.union(self.pop, Population(kids, self.evaluate(kids)))
        self.pop = environment_selection(pool, self.pop_size)
        self.pop.fe_used = self.fe
        return count

    def run(self, budget: int, callback=None) -> Population:
        """Spend ``budget`` evaluations, initializing first if needed."""
        start = self.fe
        if self.pop is None:
            self.initialize(budget)
        while self.fe - start < budget:
            self.generation(budget - (self.fe - start))
            if callback is not None:
                callback(self)
        return self.pop

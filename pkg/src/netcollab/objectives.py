"""Objective functions and evaluation metrics for both tasks."""

from __future__ import annotations

import math

import numpy as np

from .errors import DimensionError


def nr_objectives(problem, genome) -> tuple[float, float]:
    """(reconstruction error, number of links) for one NR genome."""
    g = np.asarray(genome)
    if g.size != problem.dim:
        raise DimensionError(f"genome length {g.size} != {problem.dim}")
    return float(problem.residuals(g[None])[0]), float(np.count_nonzero(g))


def nr_objectives_batch(problem, genomes: np.ndarray) -> np.ndarray:
    g = np.asarray(genomes)
    out = np.empty((g.shape[0], 2))
    out[:, 0] = problem.residuals(g)
    out[:, 1] = np.count_nonzero(g, axis=1)
    return out


def symmetrize(genome, n: int) -> np.ndarray:
    """Logical-OR symmetrization of a flat or square genome."""
    x = np.asarray(genome).reshape(n, n) != 0
    s = x | x.T
    np.fill_diagonal(s, False)
    return s.astype(np.uint8)


class ModularityEvaluator:
    """Batched modularity of label vectors on a fixed undirected graph."""

    def __init__(self, adjacency):
        a = np.asarray(adjacency) != 0
        self.n = a.shape[0]
        iu, ju = np.nonzero(np.triu(a, 1))
        self.ei, self.ej = iu, ju
        self.m = iu.size
        self.deg = a.sum(axis=1).astype(np.float64)

    def __call__(self, labels: np.ndarray) -> np.ndarray:
        lab = np.atleast_2d(np.asarray(labels, dtype=np.int64))
        p, n = lab.shape
        if n != self.n:
            raise DimensionError(f"partition length {n} != {self.n}")
        if self.m == 0:
            return np.zeros(p)
        intra = (lab[:, self.ei] == lab[:, self.ej]).sum(axis=1)
        # community degree sums via one bincount over (individual, label)
        if lab.min() < 0 or lab.max() >= n:
            lab = np.array([_dense_labels(row) for row in lab])
        idx = lab + (np.arange(p) * n)[:, None]
        ds = np.bincount(idx.ravel(), weights=np.tile(self.deg, p), minlength=p * n)
        ds = ds.reshape(p, n)
        return intra / self.m - ((ds / (2.0 * self.m)) ** 2).sum(axis=1)


def modularity(adjacency, partition) -> float:
    """Newman modularity; defined as 0 for an edgeless graph."""
    return float(ModularityEvaluator(adjacency)(np.asarray(partition)[None])[0])


def _dense_labels(x: np.ndarray) -> np.ndarray:
    return np.unique(x, return_inverse=True)[1].reshape(-1)


def nmi(b1, b2) -> float:
    """Normalized mutual information 2 I(B1;B2) / (H(B1) + H(B2))."""
    x = np.asarray(b1).reshape(-1)
    y = np.asarray(b2).reshape(-1)
    if x.size != y.size:
        raise DimensionError(f"partition lengths differ: {x.size} vs {y.size}")
    if x.size == 0:
        raise DimensionError("empty partitions")
    xi, yi = _dense_labels(x), _dense_labels(y)
    k1, k2 = xi.max() + 1, yi.max() + 1
    conf = np.bincount(xi * k2 + yi, minlength=k1 * k2).reshape(k1, k2).astype(np.float64)
    return _nmi_from_confusion(conf, x.size)


def _nmi_from_confusion(conf: np.ndarray, n: int) -> float:
    rows = conf.sum(axis=1)
    cols = conf.sum(axis=0)
    hx = -np.sum(rows * np.log(rows / n))
    hy = -np.sum(cols * np.log(cols / n))
    if hx + hy == 0.0:
        return 1.0  # both trivial, hence identical
    nz = conf > 0
    outer = np.outer(rows, cols)
    mi = np.sum(conf[nz] * np.log(conf[nz] * n / outer[nz]))
    return float(min(1.0, max(0.0, 2.0 * mi / (hx + hy))))


def nmi_batch(labels: np.ndarray, reference) -> np.ndarray:
    ref = _dense_labels(np.asarray(reference))
    return np.array([nmi(row, ref) for row in np.atleast_2d(labels)])


def mcc(pred, truth) -> float:
    """Matthews correlation over all off-diagonal ordered pairs."""
    t = np.asarray(getattr(truth, "adjacency", truth)) != 0
    n = t.shape[0]
    p = np.asarray(pred).reshape(-1)
    if p.size != n * n:
        raise DimensionError(f"prediction length {p.size} != {n * n}")
    p = p.reshape(n, n) != 0
    off = ~np.eye(n, dtype=bool)
    p, t = p[off], t[off]
    tp = float(np.sum(p & t))
    tn = float(np.sum(~p & ~t))
    fp = float(np.sum(p & ~t))
    fn = float(np.sum(~p & t))
    den = (tp + fp) * (tp + fn) * (tn + fp) * (tn + fn)
    if den == 0:
        return 0.0
    return (tp * tn - fp * fn) / math.sqrt(den)


def dominates(a, b) -> bool:
    """Pareto dominance for minimization."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise DimensionError(f"objective lengths differ: {a.shape} vs {b.shape}")
    return bool(np.all(a <= b) and np.any(a < b))

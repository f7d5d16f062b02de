"""Undirected binary networks, synthetic generators and edge-list loaders."""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from .errors import ParseError

__all__ = [
    "Network",
    "as_partition",
    "communities",
    "load_edge_list",
    "load_named",
    "generate_er",
    "generate_ba",
    "generate_ws",
    "generate_nw",
    "KNOWN_NETWORKS",
    "make_network",
]


def as_partition(labels, n: int | None = None) -> np.ndarray:
    """Validate a label vector and return it as a read-only int64 array."""
    arr = np.asarray(labels)
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError("partition must be a non-empty 1-D label vector")
    if n is not None and arr.size != n:
        raise ValueError(f"partition has {arr.size} labels, expected {n}")
    arr = arr.astype(np.int64, copy=True)
    arr.setflags(write=False)
    return arr


def communities(labels) -> list[list[int]]:
    """Decode a label vector into node lists, ordered by first occurrence."""
    groups: dict[int, list[int]] = {}
    for node, lab in enumerate(np.asarray(labels).tolist()):
        groups.setdefault(lab, []).append(node)
    return list(groups.values())


@dataclass(frozen=True, eq=False)
class Network:
    """Symmetric, zero-diagonal binary adjacency plus optional ground truth."""

    adjacency: np.ndarray
    truth_partition: np.ndarray | None = None
    name: str = ""

    def __post_init__(self):
        a = np.asarray(self.adjacency)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError("adjacency must be square")
        a = (a != 0).astype(np.uint8)
        if not np.array_equal(a, a.T):
            raise ValueError("adjacency must be symmetric")
        if a.diagonal().any():
            raise ValueError("adjacency must have a zero diagonal")
        a.setflags(write=False)
        object.__setattr__(self, "adjacency", a)
        if self.truth_partition is not None:
            object.__setattr__(
                self, "truth_partition", as_partition(self.truth_partition, a.shape[0])
            )

    @property
    def n(self) -> int:
        return self.adjacency.shape[0]

    @property
    def n_edges(self) -> int:
        return int(self.adjacency.sum()) // 2

    @property
    def degrees(self) -> np.ndarray:
        return self.adjacency.sum(axis=1).astype(np.int64)

    def edges(self) -> np.ndarray:
        """Upper-triangle edge list, shape (e, 2)."""
        iu, ju = np.nonzero(np.triu(self.adjacency, 1))
        return np.column_stack([iu, ju])


def _from_edges(n: int, edges, **kw) -> Network:
    a = np.zeros((n, n), dtype=np.uint8)
    if len(edges):
        e = np.asarray(edges, dtype=np.int64)
        a[e[:, 0], e[:, 1]] = 1
        a[e[:, 1], e[:, 0]] = 1
    return Network(a, **kw)


# ---------------------------------------------------------------------------
# Loaders

def load_edge_list(path, truth_path=None, name: str = "") -> Network:
    """Read a ``u v`` edge list (``#`` comments) and an optional truth file.

    Node ids are 0- or 1-based, detected from the smallest id seen.  A comment
    of the form ``# nodes: N`` declares the node count; ids beyond it raise.
    Duplicate edges are merged and self-loops dropped with a warning.
    """
    path = Path(path)
    declared = None
    pairs = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                body = line.lstrip("#").strip().lower()
                if body.startswith("nodes:"):
                    try:
                        declared = int(body.split(":", 1)[1])
                    except ValueError:
                        raise ParseError(f"{path}:{lineno}: bad node-count header") from None
                continue
            parts = line.split()
            if len(parts) < 2:
                raise ParseError(f"{path}:{lineno}: expected 'u v', got {line!r}")
            try:
                u, v = int(parts[0]), int(parts[1])
            except ValueError:
                raise ParseError(f"{path}:{lineno}: non-integer node id in {line!r}") from None
            if u < 0 or v < 0:
                raise ParseError(f"{path}:{lineno}: negative node id")
            pairs.append((u, v, lineno))
    if not pairs:
        raise ParseError(f"{path}: no edges")

    offset = 1 if min(min(u, v) for u, v, _ in pairs) >= 1 else 0
    truth = None
    if truth_path is not None:
        truth = _read_truth(truth_path)

    n = max(max(u, v) for u, v, _ in pairs) - offset + 1
    if declared is not None:
        for u, v, lineno in pairs:
            if max(u, v) - offset >= declared:
                raise ValueError(
                    f"{path}:{lineno}: node id {max(u, v)} out of range for {declared} nodes"
                )
        n = declared
    if truth is not None:
        n = max(n, len(truth))

    loops = 0
    edges = set()
    for u, v, _ in pairs:
        u, v = u - offset, v - offset
        if u == v:
            loops += 1
            continue
        edges.add((min(u, v), max(u, v)))
    if loops:
        warnings.warn(f"{path}: dropped {loops} self-loop(s)", stacklevel=2)
    return _from_edges(n, sorted(edges), truth_partition=truth, name=name or path.stem)


def _read_truth(path) -> list[int]:
    labels = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            try:
                labels.append(int(line.split()[0]))
            except ValueError:
                raise ParseError(f"{path}:{lineno}: bad label {line!r}") from None
    return labels


_BUNDLED = {"zk": ("zk.edges", "zk.truth")}


def load_named(name: str) -> Network:
    """Load a bundled real network by (case-insensitive) name."""
    key = name.lower()
    if key not in _BUNDLED:
        raise KeyError(name)
    edges, truth = _BUNDLED[key]
    root = resources.files(__package__) / "data"
    with resources.as_file(root / edges) as ep, resources.as_file(root / truth) as tp:
        return load_edge_list(ep, tp, name=name.upper())


# ---------------------------------------------------------------------------
# Synthetic generators

def generate_er(n: int, p: float, seed: int) -> Network:
    """Erdos-Renyi G(n, p)."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    if n < 2:
        raise ValueError("n must be >= 2")
    rng = np.random.default_rng(seed)
    iu, ju = np.triu_indices(n, 1)
    keep = rng.random(iu.size) < p
    return _from_edges(n, np.column_stack([iu[keep], ju[keep]]), name="ER")


def generate_ba(n: int, m: int, seed: int) -> Network:
    """Barabasi-Albert growth from an m-clique; each new node adds m links."""
    if not 1 <= m < n:
        raise ValueError(f"need 1 <= m < n, got m={m}, n={n}")
    rng = np.random.default_rng(seed)
    deg = np.zeros(n, dtype=np.float64)
    edges = [(i, j) for i in range(m) for j in range(i + 1, m)]
    deg[:m] = m - 1
    for new in range(m, n):
        w = deg[:new]
        if w.sum() == 0:
            targets = rng.choice(new, size=m, replace=False)
        else:
            targets = rng.choice(new, size=m, replace=False, p=w / w.sum())
        for t in targets:
            edges.append((int(t), new))
        deg[targets] += 1
        deg[new] = m
    return _from_edges(n, edges, name="BA")


def _ring(n: int, k: int) -> np.ndarray:
    if k % 2:
        raise ValueError(f"ring degree k must be even, got {k}")
    if not 0 <= k < n:
        raise ValueError(f"need 0 <= k < n, got k={k}, n={n}")
    a = np.zeros((n, n), dtype=np.uint8)
    idx = np.arange(n)
    for off in range(1, k // 2 + 1):
        a[idx, (idx + off) % n] = 1
        a[(idx + off) % n, idx] = 1
    return a


def generate_ws(n: int, k: int, p_rewire: float, seed: int) -> Network:
    """Watts-Strogatz ring with per-edge rewiring of the far endpoint."""
    if not 0.0 <= p_rewire <= 1.0:
        raise ValueError(f"p_rewire must lie in [0, 1], got {p_rewire}")
    a = _ring(n, k)
    rng = np.random.default_rng(seed)
    for off in range(1, k // 2 + 1):
        for u in range(n):
            v = (u + off) % n
            if rng.random() >= p_rewire:
                continue
            free = np.flatnonzero(a[u] == 0)
            free = free[free != u]
            if free.size == 0:
                continue
            w = int(rng.choice(free))
            a[u, v] = a[v, u] = 0
            a[u, w] = a[w, u] = 1
    return Network(a, name="WS")


def generate_nw(n: int, k: int, p_add: float, seed: int) -> Network:
    """Newman-Watts ring plus independent shortcuts on non-lattice pairs."""
    if not 0.0 <= p_add <= 1.0:
        raise ValueError(f"p_add must lie in [0, 1], got {p_add}")
    a = _ring(n, k)
    rng = np.random.default_rng(seed)
    iu, ju = np.triu_indices(n, 1)
    cand = a[iu, ju] == 0
    add = cand & (rng.random(iu.size) < p_add)
    a[iu[add], ju[add]] = 1
    a[ju[add], iu[add]] = 1
    return Network(a, name="NW")


def _synthetic(name: str, n: int, seed: int) -> Network:
    if name == "er":
        return generate_er(n, 6.0 / (n - 1), seed)
    if name == "ba":
        return generate_ba(n, 3, seed)
    if name == "ws":
        return generate_ws(n, 6, 0.1, seed)
    if name == "nw":
        return generate_nw(n, 4, 2.0 / (n - 1 - 4), seed)
    raise KeyError(name)


KNOWN_NETWORKS = ("ZK", "ER", "BA", "WS", "NW")


def make_network(name: str, seed: int = 0, n: int = 50) -> Network:
    """Resolve a benchmark network by name; synthetics use mean degree ~6."""
    key = name.lower()
    if key in _BUNDLED:
        return load_named(name)
    try:
        return _synthetic(key, n, seed)
    except KeyError:
        raise KeyError(
            f"unknown network {name!r}; known: {', '.join(KNOWN_NETWORKS)}"
        ) from None

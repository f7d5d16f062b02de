"""Slow, obviously-correct reference implementations used by the tests."""

import itertools
import math

import numpy as np


def dominates(a, b):
    return all(x <= y for x, y in zip(a, b)) and any(x < y for x, y in zip(a, b))


def brute_fronts(objs):
    remaining = set(range(len(objs)))
    fronts = []
    while remaining:
        front = sorted(i for i in remaining
                       if not any(dominates(objs[j], objs[i]) for j in remaining if j != i))
        fronts.append(front)
        remaining -= set(front)
    return fronts


def brute_crowding(objs):
    n = len(objs)
    if n <= 2:
        return [math.inf] * n
    m = len(objs[0])
    dist = [0.0] * n
    for k in range(m):
        order = sorted(range(n), key=lambda i: (objs[i][k], i))
        lo, hi = objs[order[0]][k], objs[order[-1]][k]
        dist[order[0]] = dist[order[-1]] = math.inf
        for pos in range(1, n - 1):
            i = order[pos]
            if hi > lo and dist[i] != math.inf:
                dist[i] += (objs[order[pos + 1]][k] - objs[order[pos - 1]][k]) / (hi - lo)
    return dist


def brute_modularity(adj, labels):
    adj = np.asarray(adj)
    n = len(labels)
    e = adj.sum() / 2
    if e == 0:
        return 0.0
    q = 0.0
    for c in set(labels):
        members = [i for i in range(n) if labels[i] == c]
        inner = sum(adj[i][j] for i in members for j in members if i < j)
        deg = sum(adj[i].sum() for i in members)
        q += inner / e - (deg / (2 * e)) ** 2
    return float(q)


def brute_nmi(x, y):
    n = len(x)
    cx, cy = sorted(set(x)), sorted(set(y))
    hx = -sum((list(x).count(a) / n) * math.log(list(x).count(a) / n) for a in cx)
    hy = -sum((list(y).count(b) / n) * math.log(list(y).count(b) / n) for b in cy)
    if hx + hy == 0:
        return 1.0
    mi = 0.0
    for a in cx:
        for b in cy:
            nab = sum(1 for i in range(n) if x[i] == a and y[i] == b)
            if nab:
                mi += nab / n * math.log(nab * n / (list(x).count(a) * list(y).count(b)))
    return 2 * mi / (hx + hy)


def brute_mcc(pred, truth):
    n = len(truth)
    tp = tn = fp = fn = 0
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            p, t = bool(pred[i][j]), bool(truth[i][j])
            tp += p and t
            tn += (not p) and (not t)
            fp += p and not t
            fn += (not p) and t
    den = (tp + fp) * (tp + fn) * (tn + fp) * (tn + fn)
    return 0.0 if den == 0 else (tp * tn - fp * fn) / math.sqrt(den)


def brute_rank_sum(a, b):
    """Two-sided exact p-value by enumerating every split of the pooled sample."""
    pooled = list(a) + list(b)
    n = len(pooled)
    order = sorted(range(n), key=lambda i: pooled[i])
    ranks = [0.0] * n
    i = 0
    while i < n:
        j = i
        while j + 1 < n and pooled[order[j + 1]] == pooled[order[i]]:
            j += 1
        for k in range(i, j + 1):
            ranks[order[k]] = (i + j) / 2 + 1
        i = j + 1
    n1 = len(a)
    centre = n1 * (n + 1) / 2
    obs = abs(sum(ranks[:n1]) - centre)
    hits = total = 0
    for combo in itertools.combinations(range(n), n1):
        total += 1
        if abs(sum(ranks[c] for c in combo) - centre) >= obs - 1e-9:
            hits += 1
    return hits / total


def set_partitions(items):
    """All set partitions of ``items`` (Bell-number many)."""
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in set_partitions(rest):
        for k in range(len(part)):
            yield part[:k] + [[first] + part[k]] + part[k + 1:]
        yield [[first]] + part


def two_triangles():
    a = np.zeros((6, 6), dtype=np.uint8)
    for u, v in [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]:
        a[u, v] = a[v, u] = 1
    return a

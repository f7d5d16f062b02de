import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from netcollab.dynamics import make_problem
from netcollab.errors import DimensionError
from netcollab.graph import generate_er, load_named
from netcollab.objectives import (
    ModularityEvaluator,
    dominates,
    mcc,
    modularity,
    nmi,
    nmi_batch,
    nr_objectives,
    nr_objectives_batch,
    symmetrize,
)
from oracles import brute_mcc, brute_modularity, brute_nmi, two_triangles

labels = st.lists(st.integers(0, 4), min_size=1, max_size=12)


@pytest.fixture(scope="module")
def small_problem():
    net = generate_er(5, 0.5, seed=3)
    return make_problem(net, "EG", 3, 4, seed=1)


def test_nr_objectives_truth_and_empty(small_problem):
    pr = small_problem
    h, g = nr_objectives(pr, pr.truth_genome())
    assert h < 1e-9
    assert g == 2 * pr.truth_network.n_edges
    h0, g0 = nr_objectives(pr, np.zeros(pr.dim, dtype=bool))
    assert g0 == 0
    assert h0 == pytest.approx(float(np.sum(pr.targets ** 2)), rel=1e-12)


def test_nr_objectives_dense_oracle(small_problem):
    pr = small_problem
    rng = np.random.default_rng(0)
    for _ in range(20):
        x = rng.random(pr.dim) < 0.4
        x.reshape(pr.n, pr.n)[np.diag_indices(pr.n)] = False
        xm = x.reshape(pr.n, pr.n).astype(float)
        want = sum(float(np.sum((pr.design[i] @ xm[i] - pr.targets[i]) ** 2)) for i in range(pr.n))
        h, g = nr_objectives(pr, x)
        assert h == pytest.approx(want, rel=1e-10, abs=1e-10)
        assert g == x.sum()
    batch = rng.random((7, pr.dim)) < 0.3
    objs = nr_objectives_batch(pr, batch)
    for row, o in zip(batch, objs):
        assert tuple(o) == pytest.approx(nr_objectives(pr, row))


def test_nr_objectives_length_check(small_problem):
    with pytest.raises(DimensionError):
        nr_objectives(small_problem, np.zeros(7))


def test_symmetrize_or():
    g = np.zeros(9, dtype=bool)
    g[1] = True  # (0, 1)
    g[4] = True  # diagonal (1, 1)
    s = symmetrize(g, 3)
    assert s[0, 1] == s[1, 0] == 1
    assert s.trace() == 0
    assert s.sum() == 2


def test_modularity_examples():
    a = two_triangles()
    assert modularity(a, [0, 0, 0, 1, 1, 1]) == pytest.approx(0.5)
    assert modularity(a, [0] * 6) == pytest.approx(0.0, abs=1e-15)
    assert modularity(np.zeros((3, 3)), [0, 1, 2]) == 0.0
    zk = load_named("ZK")
    want = brute_modularity(zk.adjacency, list(zk.truth_partition))
    assert modularity(zk.adjacency, zk.truth_partition) == pytest.approx(want, abs=1e-12)


def test_modularity_batch_and_odd_labels():
    zk = load_named("ZK")
    rng = np.random.default_rng(5)
    labs = rng.integers(0, 34, size=(10, 34))
    q = ModularityEvaluator(zk.adjacency)(labs)
    for row, v in zip(labs, q):
        assert v == pytest.approx(brute_modularity(zk.adjacency, list(row)), abs=1e-12)
    # labels outside [0, n) are relabelled, not rejected
    shifted = labs * 7 - 1000
    assert np.allclose(ModularityEvaluator(zk.adjacency)(shifted), q, atol=1e-12)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10_000), st.integers(2, 10))
def test_modularity_permutation_invariant_and_bounded(seed, n):
    rng = np.random.default_rng(seed)
    a = generate_er(n, 0.5, seed=seed).adjacency
    lab = rng.integers(0, 3, size=n)
    perm = rng.permutation(3)
    q = modularity(a, lab)
    assert q == pytest.approx(modularity(a, perm[lab]), abs=1e-12)
    assert -0.5 - 1e-12 <= q <= 1.0


def test_nmi_examples():
    assert nmi([0, 0, 1, 1], [5, 5, 9, 9]) == pytest.approx(1.0)
    assert nmi([0, 1, 2, 3], [0, 0, 0, 0]) == 0.0
    assert nmi([0, 0, 1, 1], [0, 1, 1, 1]) == pytest.approx(brute_nmi([0, 0, 1, 1], [0, 1, 1, 1]), abs=1e-12)
    assert nmi([3, 3, 3], [1, 1, 1]) == 1.0
    with pytest.raises(DimensionError):
        nmi([0, 1], [0, 1, 2])


@settings(max_examples=100, deadline=None)
@given(labels, st.data())
def test_nmi_symmetric_permutation_invariant(x, data):
    y = data.draw(st.lists(st.integers(0, 4), min_size=len(x), max_size=len(x)))
    v = nmi(x, y)
    assert 0.0 <= v <= 1.0
    assert v == pytest.approx(nmi(y, x), abs=1e-12)
    relabel = [7, 3, 9, 1, 0]
    assert v == pytest.approx(nmi([relabel[i] for i in x], y), abs=1e-12)
    assert v == pytest.approx(brute_nmi(x, y), abs=1e-12)


def test_nmi_batch_matches_scalar():
    rng = np.random.default_rng(2)
    labs = rng.integers(0, 4, size=(6, 15))
    ref = rng.integers(0, 3, size=15)
    assert np.allclose(nmi_batch(labs, ref), [nmi(r, ref) for r in labs])


def test_mcc_examples():
    zk = load_named("ZK")
    a = zk.adjacency
    assert mcc(a.ravel(), zk) == pytest.approx(1.0)
    comp = 1 - a
    np.fill_diagonal(comp, 0)
    assert mcc(comp, zk) == pytest.approx(-1.0)
    # 3-node path 0-1-2, prediction adds (0, 2): one false positive
    truth = np.array([[0, 1, 0], [1, 0, 1], [0, 1, 0]])
    pred = truth.copy()
    pred[0, 2] = 1
    assert mcc(pred, truth) == pytest.approx(brute_mcc(pred, truth))
    # tp=4 tn=1 fp=1 fn=0
    assert mcc(pred, truth) == pytest.approx(4 / np.sqrt(5 * 4 * 2 * 1))
    assert mcc(np.zeros(9), truth) == 0.0


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10_000), st.integers(2, 8))
def test_mcc_bounded_and_relabel_invariant(seed, n):
    rng = np.random.default_rng(seed)
    truth = generate_er(n, 0.4, seed=seed).adjacency
    pred = (rng.random((n, n)) < 0.4).astype(int)
    v = mcc(pred, truth)
    assert -1 - 1e-12 <= v <= 1 + 1e-12
    p = rng.permutation(n)
    assert v == pytest.approx(mcc(pred[np.ix_(p, p)], truth[np.ix_(p, p)]), abs=1e-12)


def test_dominates():
    assert dominates((1, 1), (2, 2))
    assert not dominates((1, 2), (2, 1)) and not dominates((2, 1), (1, 2))
    assert not dominates((1, 1), (1, 1))
    with pytest.raises(DimensionError):
        dominates((1, 2), (1, 2, 3))


@settings(max_examples=200, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 3), st.integers(0, 3)), min_size=3, max_size=3))
def test_dominance_irreflexive_transitive(pts):
    a, b, c = pts
    assert not dominates(a, a)
    if dominates(a, b) and dominates(b, c):
        assert dominates(a, c)

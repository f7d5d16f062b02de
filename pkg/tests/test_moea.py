import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from netcollab.dynamics import make_problem
from netcollab.errors import DimensionError
from netcollab.graph import generate_er
from netcollab.moea import (
    NrOptimizer,
    Population,
    binary_tournament,
    crowding_distance,
    environment_selection,
    fast_nondominated_sort,
    front_ranks,
    nr_variation,
    offdiagonal_positions,
    survivor_indices,
)
from netcollab.objectives import dominates
from oracles import brute_crowding, brute_fronts


def random_objs(rng, n, m, ties=True):
    if ties:
        return rng.integers(0, 6, size=(n, m)).astype(float)
    return rng.random((n, m))


def test_sort_examples():
    assert fast_nondominated_sort([(1, 1)]) == [[0]]
    assert fast_nondominated_sort([(1, 2), (2, 1), (2, 2)]) == [[0, 1], [2]]
    assert fast_nondominated_sort([(3, 3)] * 4) == [[0, 1, 2, 3]]
    with pytest.raises(DimensionError):
        fast_nondominated_sort([(1, 2), (1, 2, 3)])
    with pytest.raises(ValueError):
        fast_nondominated_sort(np.zeros((0, 2)))


def test_sort_matches_bruteforce():
    rng = np.random.default_rng(0)
    for trial in range(300):
        n = int(rng.integers(1, 200 if trial % 30 == 0 else 25))
        m = int(rng.integers(2, 5))
        objs = random_objs(rng, n, m, ties=trial % 2 == 0)
        got = [sorted(f) for f in fast_nondominated_sort(objs)]
        assert got == brute_fronts(objs.tolist())


def test_crowding_examples():
    assert crowding_distance([(0, 1), (1, 0)]).tolist() == [math.inf, math.inf]
    cd = crowding_distance([(0, 4), (1, 2), (4, 0)])
    assert cd[1] == pytest.approx(2.0)
    assert math.isinf(cd[0]) and math.isinf(cd[2])
    flat = crowding_distance([(0, 5), (1, 5), (2, 5), (3, 5)])
    # second objective has zero range: interior points get only the first term
    assert flat[1] == pytest.approx(2 / 3) and flat[2] == pytest.approx(2 / 3)


def test_crowding_matches_bruteforce():
    rng = np.random.default_rng(1)
    for _ in range(300):
        objs = rng.random((int(rng.integers(1, 15)), int(rng.integers(2, 4))))
        got = crowding_distance(objs)
        want = brute_crowding(objs.tolist())
        assert np.allclose(got, want, atol=1e-12, equal_nan=False)


def brute_selection_ranks(objs, n):
    fronts = brute_fronts(objs.tolist())
    rank = {i: k for k, f in enumerate(fronts) for i in f}
    out = []
    for f in fronts:
        if len(out) == n:
            break
        if len(out) + len(f) <= n:
            out.extend(f)
        else:
            cd = brute_crowding(objs[f].tolist())
            need = n - len(out)
            cut = sorted(cd, reverse=True)[need - 1]
            return sorted(rank[i] for i in out) + [rank[f[0]]] * need, cut, f, cd
    return sorted(rank[i] for i in out), None, None, None


def test_survival_matches_bruteforce():
    rng = np.random.default_rng(2)
    for _ in range(200):
        objs = rng.random((20, 2))
        keep = survivor_indices(objs, 10)
        assert len(set(keep.tolist())) == 10
        want_ranks, cut, last, cd = brute_selection_ranks(objs, 10)
        ranks = front_ranks(objs)
        assert sorted(ranks[keep].tolist()) == want_ranks
        if last is not None:
            # the chosen members of the split front are among the most crowded
            chosen = [i for i in keep if i in last]
            cdmap = dict(zip(last, cd))
            assert min(cdmap[i] for i in chosen) >= cut


def test_survival_edge_cases():
    objs = np.array([[0, 3], [1, 1], [3, 0], [2, 2], [4, 4]], dtype=float)
    assert sorted(survivor_indices(objs, 5).tolist()) == [0, 1, 2, 3, 4]
    assert sorted(survivor_indices(objs, 3).tolist()) == [0, 1, 2]
    with pytest.raises(ValueError):
        survivor_indices(objs, 6)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10_000), st.integers(2, 40))
def test_selection_never_drops_a_dominator(seed, size):
    rng = np.random.default_rng(seed)
    objs = rng.integers(0, 8, size=(size, 2)).astype(float)
    n = int(rng.integers(1, size + 1))
    keep = set(survivor_indices(objs, n).tolist())
    for i in set(range(size)) - keep:
        for j in keep:
            assert not dominates(objs[i], objs[j])


def test_environment_selection_population():
    rng = np.random.default_rng(3)
    g = rng.random((12, 9)) < 0.5
    pop = Population(g, rng.random((12, 2)), fe_used=12)
    out = environment_selection(pop, 6)
    assert len(out) == 6 and out.fe_used == 12
    assert out.rank is not None and out.crowding is not None


def test_binary_tournament_prefers_better():
    rank = np.array([0, 1])
    crowd = np.array([1.0, 5.0])
    wins = binary_tournament(rank, crowd, 4000, np.random.default_rng(0))
    # index 0 wins unless both draws pick index 1
    assert np.mean(wins == 0) == pytest.approx(0.75, abs=0.03)


def test_nr_variation_identity():
    rng = np.random.default_rng(0)
    a = rng.random(16) < 0.5
    b = rng.random(16) < 0.5
    c1, c2 = nr_variation(a, b, rng, pm=0.0, point=0)
    assert np.array_equal(c1, a) and np.array_equal(c2, b)


def test_nr_variation_crossover_exchanges_heads():
    a = np.zeros(16, dtype=bool)
    b = np.ones(16, dtype=bool)
    b[[0, 5, 10, 15]] = False
    c1, c2 = nr_variation(a, b, np.random.default_rng(0), pm=0.0, point=3)
    pos = offdiagonal_positions(4)
    assert c1[pos[:3]].all() and not c1[pos[3:]].any()
    assert not c2[pos[:3]].any() and c2[pos[3:]].all()


def test_nr_variation_mask_and_diagonal():
    rng = np.random.default_rng(1)
    n = 6
    mask = [1, 2, 7, 8, 14]  # 7 and 14 are diagonal positions
    for _ in range(200):
        a = rng.random(n * n) < 0.5
        b = rng.random(n * n) < 0.5
        a[::n + 1] = b[::n + 1] = False
        c1, c2 = nr_variation(a, b, rng, mask=mask, pm=0.5)
        outside = np.setdiff1d(np.arange(n * n), [1, 2, 8])
        assert np.array_equal(c1[outside], a[outside])
        assert np.array_equal(c2[outside], b[outside])
        assert not c1[::n + 1].any() and not c2[::n + 1].any()
    with pytest.raises(IndexError):
        nr_variation(a, b, rng, mask=[0, 36])
    with pytest.raises(DimensionError):
        nr_variation(a, b[:-1], rng)


def test_nr_variation_mutation_rate():
    rng = np.random.default_rng(2)
    d = 100
    z = np.zeros(d, dtype=bool)
    flips = [nr_variation(z, z, rng)[0].sum() for _ in range(10_000)]
    # D - N off-diagonal positions at rate 1/D
    assert np.mean(flips) == pytest.approx(90 / 100, abs=0.05)


@pytest.fixture(scope="module")
def tiny_problem():
    return make_problem(generate_er(8, 0.3, seed=4), "EG", 20, 10, seed=4)


def test_optimizer_accounting_and_monotone(tiny_problem):
    opt = NrOptimizer(tiny_problem, np.random.default_rng(0), pop_size=20)
    best = []
    opt.run(25, callback=lambda o: best.append(o.pop.objs[:, 0].min()))
    assert opt.fe == 25
    opt.run(1000, callback=lambda o: best.append(o.pop.objs[:, 0].min()))
    assert opt.fe == 1025 and opt.pop.fe_used == 1025
    assert all(b2 <= b1 for b1, b2 in zip(best, best[1:]))
    diag = np.arange(8) * 9
    assert not opt.pop.genomes[:, diag].any()


def test_optimizer_recovers_small_network(tiny_problem):
    opt = NrOptimizer(tiny_problem, np.random.default_rng(1), pop_size=50)
    pop = opt.run(20_000)
    best = pop.genomes[np.argmin(pop.objs[:, 0])]
    assert np.array_equal(best, tiny_problem.truth_genome())

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bigreedy import rng as rngmod
from bigreedy.cost import build_cache
from bigreedy.exceptions import BudgetExceededError, UnsupportedSpaceError
from bigreedy.metric import PointSpace
from bigreedy.selectors import (
    SelectorSpec,
    ball_guess_from,
    boost_count,
    guess_ball,
    kmeanspp_seed,
    make_selector,
    pp_sample_count,
    select_all,
    select_ball,
    select_pp,
    select_sgd,
    select_uniform,
    sgd_ball,
    sgd_sample_count,
    subset_means,
)

from helpers import geometric_median, tv_distance, two_clusters

L2P1 = PointSpace.euclidean(2, p=1)


def test_spec_validation():
    with pytest.raises(ValueError):
        SelectorSpec("select_pp", epsilon=0, k=2)
    with pytest.raises(ValueError):
        SelectorSpec("subset_means", epsilon=1.5)
    with pytest.raises(ValueError):
        SelectorSpec("select_uniform", m=0)
    with pytest.raises(ValueError):
        SelectorSpec("select_sgd", epsilon=0.5, samples=0)
    with pytest.raises(ValueError):
        SelectorSpec("nope")


def test_sample_counts():
    assert pp_sample_count(2, 1.0, 1) == 256
    assert sgd_sample_count(3, 1 / 0.1**0.5) == 2 * 3**4  # 1/eps^2 = 0.1 -> s = 1
    assert sgd_sample_count(2, 0.1) == 2 * 2**103
    assert boost_count(0.3) == 4
    assert boost_count(0.25) == 4


def test_select_all(X014):
    assert select_all(X014) is X014
    assert len(select_all(X014[:0])) == 0


def test_select_pp_law(line, X014):
    cache = build_cache(line, X014, [[0.0]])
    spec = SelectorSpec("select_pp", epsilon=1.0, k=2, m=100_000)
    sel = select_pp(X014, cache, spec, np.random.default_rng(0))
    assert sel.nominal_count == 256 and len(sel) == 100_000
    freq4 = np.mean(sel.points[:, 0] == 4.0)
    assert abs(freq4 - 16 / 17) < 0.01
    counts = [np.sum(sel.points[:, 0] == v) for v in (0.0, 1.0, 4.0)]
    assert counts[0] == 0
    assert tv_distance(counts, [0, 1, 16]) < 0.02


def test_select_pp_zero_cost_and_empty(line, X014):
    spec = SelectorSpec("select_pp", epsilon=1.0, k=2, m=10)
    sel = select_pp(X014, build_cache(line, X014, X014), spec, np.random.default_rng(0))
    assert sel.zero_cost and len(sel) == 1
    sel = select_pp(X014, build_cache(line, X014), spec, np.random.default_rng(0))
    assert not sel.zero_cost and len(sel) == 10


def test_select_pp_cap_warns(line, X014):
    spec = SelectorSpec("select_pp", epsilon=0.01, k=2)
    with pytest.warns(UserWarning):
        sel = select_pp(X014, build_cache(line, X014, [[0.0]]), spec, np.random.default_rng(0))
    assert len(sel) == 1_000_000


def test_select_uniform_law():
    X = np.arange(4.0)[:, None]
    sel = select_uniform(X, SelectorSpec("select_uniform", m=100_000), np.random.default_rng(1))
    freq = np.bincount(sel.points[:, 0].astype(int), minlength=4) / 100_000
    assert np.all(np.abs(freq - 0.25) < 0.01)
    one = select_uniform(X[:1], SelectorSpec("select_uniform", m=1), np.random.default_rng(1))
    assert one.points.tolist() == [[0.0]]


def test_subset_means_examples(X014):
    assert subset_means(X014, 0.5)[:, 0].tolist() == [0.0, 0.5, 1.0, 2.0, 2.5, 4.0]
    assert np.array_equal(subset_means(X014, 1.0), X014)
    assert np.array_equal(subset_means(X014[:1], 0.2), X014[:1])
    with pytest.raises(BudgetExceededError):
        subset_means(np.random.default_rng(0).normal(size=(60, 2)), 0.2, limit=1000)


def test_subset_means_memoized(line, X014):
    select = make_selector(SelectorSpec("subset_means", epsilon=0.5), line, X014)
    a = select(build_cache(line, X014), np.random.default_rng(0)).points
    b = select(build_cache(line, X014, [[1.0]]), np.random.default_rng(9)).points
    assert a is b
    with pytest.raises(UnsupportedSpaceError):
        make_selector(SelectorSpec("subset_means", epsilon=0.5), L2P1, np.zeros((2, 2)))


@given(st.integers(0, 2**32), st.sampled_from([1.0, 0.5, 1 / 3]))
def test_subset_means_inaba_bound(seed, eps):
    r = np.random.default_rng(seed)
    sp = PointSpace.kmeans(2)
    X = r.normal(size=(9, 2))
    A = X[r.choice(9, size=int(r.integers(1, 9)), replace=False)]
    Y = subset_means(X, eps)
    best = sp.pairwise_delta(A, Y).sum(axis=0).min()
    base = sp.delta_to(A, sp.mean(A)).sum()
    assert best <= (1 + eps) * base * (1 + 1e-9) + 1e-12


def test_guess_ball_examples(line, X014):
    g = guess_ball(X014[:1], line, np.random.default_rng(0))
    assert (g.y_index, g.b, g.m, g.r_estimate) == (0, 1, 1, 0.0)
    g = ball_guess_from(X014, line, 0, 2, 2)
    assert g.B[:, 0].tolist() == [0.0, 1.0] and g.r_estimate == 0.5


def test_guess_ball_ties_lowest_index(line):
    X = np.array([[0.0], [1.0], [-1.0], [1.0]])
    g = ball_guess_from(X, line, 0, 3, 1)
    assert g.B_index.tolist() == [0, 1, 2]


def test_guess_ball_uniform_triples():
    X = np.arange(3.0)[:, None]
    sp = PointSpace.kmeans(1)
    r = np.random.default_rng(4)
    seen = np.zeros((3, 3, 3))
    for _ in range(27_000):
        g = guess_ball(X, sp, r)
        seen[g.y_index, g.b - 1, g.m - 1] += 1
    assert tv_distance(seen.ravel(), np.ones(27)) < 0.03


def test_sgd_ball_trivial_cases():
    r = np.random.default_rng(0)
    start = np.array([1.0, -2.0])
    far = lambda g: np.array([50.0, 50.0])
    assert np.array_equal(sgd_ball(far, L2P1, start, 3.0, 1, 0.5, r), start)
    assert np.array_equal(sgd_ball(far, L2P1, start, 0.0, 25, 0.5, r), start)
    with pytest.raises(UnsupportedSpaceError):
        sgd_ball(far, PointSpace.kmeans(2), start, 1.0, 3, 0.1, r)
    with pytest.raises(UnsupportedSpaceError):
        sgd_ball(far, PointSpace.euclidean(2, norm="l1"), start, 1.0, 3, 0.1, r)


def test_sgd_ball_converges_to_constant_target():
    target = np.array([0.0, 0.0])
    hits = 0
    for seed in range(10):
        r = np.random.default_rng(seed)
        ang = r.uniform(0, 2 * np.pi)
        start = np.array([np.cos(ang), np.sin(ang)])
        out = sgd_ball(lambda g: target, L2P1, start, 2.0, 400, 2 * 2 / 20, r)
        hits += np.linalg.norm(out - target) <= 0.5
    assert hits >= 9


@given(st.integers(0, 2**32), st.floats(0, 5), st.integers(1, 60))
def test_sgd_iterates_stay_in_ball(seed, radius, steps):
    r = np.random.default_rng(seed)
    X = r.normal(scale=4, size=(10, 2))
    start = r.normal(size=2)
    record = []
    sgd_ball(lambda g: X[g.integers(0, 10)], L2P1, start, radius, steps, 0.7, r, record=record)
    assert len(record) == steps
    for w in record:
        assert np.linalg.norm(w - start) <= radius * (1 + 1e-12) + 1e-15


def test_select_sgd_single_point():
    X = np.array([[3.0, 4.0]])
    sel = select_sgd(X, L2P1, 0.5, 5, np.random.default_rng(0))
    assert np.array_equal(sel.points, np.repeat(X, 5, axis=0))


def test_select_sgd_finds_uncovered_cluster():
    eps, ok = 0.5, 0
    for seed in range(10):
        _, B, X = two_clusters(seed)
        base = np.linalg.norm(B - geometric_median(B), axis=1).sum()
        sel = select_sgd(X, L2P1, eps, 200, rngmod.stream(seed))
        best = min(np.linalg.norm(B - c, axis=1).sum() for c in sel.points)
        ok += best <= (1 + 16 * eps) * base
    assert ok >= 9


def test_select_ball_containment_and_zero_radius():
    r = np.random.default_rng(0)
    sp = PointSpace.euclidean(2, norm="l1", p=2)
    X = r.normal(size=(15, 2))
    base = 77
    sel = select_ball(X, sp, 0.5, 50, rngmod.stream(base))
    # regenerate each sample's guess from the documented per-sample streams
    child = rngmod.child_seed(rngmod.stream(base))
    for i, c in enumerate(sel.points):
        g = guess_ball(X, sp, rngmod.stream(child, i))
        radius = 2 * g.r_estimate ** (1 / sp.p)
        assert sp.dist_to(c[None], g.y)[0] <= radius * (1 + 1e-12) + 1e-15
    same = np.zeros((4, 2))
    assert np.array_equal(select_ball(same, sp, 0.5, 3, r).points, np.zeros((3, 2)))
    with pytest.raises(UnsupportedSpaceError):
        select_ball(np.arange(2), PointSpace.finite(np.array([[0, 1], [1, 0.0]])), 0.5, 1, r)


def test_select_ball_hits_optimal_center():
    eps, ok = 0.5, 0
    for seed in range(10):
        _, B, X = two_clusters(seed)
        c_star = geometric_median(B)
        psi = np.linalg.norm(B - c_star, axis=1).mean()
        target = ((1 + eps) - 1) * psi  # p = q = 1
        sel = select_ball(X, L2P1, eps, 200, rngmod.stream(seed))
        ok += np.linalg.norm(sel.points - c_star, axis=1).min() <= target
    assert ok >= 9


def test_kmeanspp_examples(line, X014):
    r = np.random.default_rng(3)
    firsts = [kmeanspp_seed(X014, line, 1, r)[0, 0] for _ in range(3000)]
    assert set(firsts) == {0.0, 1.0, 4.0}
    draws = np.array([kmeanspp_seed(X014, line, 1, r, initial=[[0.0]])[0, 0] for _ in range(100_000)])
    counts = [np.sum(draws == v) for v in (0.0, 1.0, 4.0)]
    assert abs(counts[1] / 1e5 - 1 / 17) < 0.01 and abs(counts[2] / 1e5 - 16 / 17) < 0.01
    same = np.ones((5, 2))
    C, costs = kmeanspp_seed(same, PointSpace.kmeans(2), 3, r, return_costs=True)
    assert np.array_equal(C, np.ones((3, 2))) and costs == [0.0, 0.0, 0.0]


@given(st.integers(0, 2**32), st.integers(1, 12))
def test_kmeanspp_full_budget_reaches_zero(seed, n):
    r = np.random.default_rng(seed)
    X = r.normal(size=(n, 3))
    C, costs = kmeanspp_seed(X, PointSpace.euclidean(3, p=2), n, r, return_costs=True)
    assert costs[-1] == 0.0
    assert len({tuple(c) for c in C}) == n

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from bigreedy.cost import (
    add_center,
    assign,
    build_cache,
    candidate_cost,
    candidate_costs,
    cost,
    distinct_count,
    normalized_cost,
)
from bigreedy.exceptions import EmptyCentersError, EmptyClusterError
from bigreedy.metric import PointSpace


def test_cost_examples(line, X014):
    assert cost(line, X014, [[0.0]]) == 17.0
    assert cost(line, X014, [[0.0], [4.0]]) == 1.0
    assert cost(line, X014, X014) == 0.0
    assert cost(line, X014[:0], [[0.0]]) == 0.0
    with pytest.raises(EmptyCentersError):
        cost(line, X014, [])


def test_normalized_cost_examples(line):
    assert normalized_cost(line, [[0.0], [2.0]], [[1.0]]) == 1.0
    metric_line = PointSpace.euclidean(1, p=2)
    assert normalized_cost(metric_line, [[0.0], [2.0]], [[1.0]]) == pytest.approx(1.0)
    assert normalized_cost(line, [[3.0]], [[3.0], [5.0]]) == 0.0
    with pytest.raises(EmptyClusterError):
        normalized_cost(line, np.empty((0, 1)), [[1.0]])


def test_cache_examples(line, X014):
    cache = build_cache(line, X014, [[0.0], [4.0]])
    assert cache.nearest_dist.tolist() == [0.0, 1.0, 0.0]
    assert cache.total_cost == 1.0
    empty = build_cache(line, X014)
    assert not empty.has_centers and np.all(np.isinf(empty.nearest_dist))
    assert math.isinf(empty.total_cost)
    assert build_cache(line, X014[:0], [[1.0]]).total_cost == 0.0


def test_candidate_cost_examples(line, X014):
    cache = build_cache(line, X014, [[0.0]])
    assert candidate_cost(cache, [4.0]) == 1.0
    assert candidate_cost(cache, [0.0]) == cache.total_cost
    empty = build_cache(line, X014)
    assert candidate_cost(empty, [1.0]) == cost(line, X014, [[1.0]]) == 10.0


def test_add_center_examples(line, X014):
    cache = build_cache(line, X014, [[0.0]])
    assert cache.total_cost == 17.0
    after = add_center(cache, [4.0])
    assert after.total_cost == 1.0
    again = add_center(after, [4.0])
    assert again.total_cost == 1.0 and again.n_centers == 3
    assert distinct_count(line, again.centers) == 2
    assert cache.total_cost == 17.0  # copy on write
    assert add_center(build_cache(line, X014), [1.0]).total_cost == 10.0


def test_assign_examples(line, X014):
    assert assign(line, X014, [[0.0], [4.0]]) == [[0, 1], [2]]
    assert assign(line, np.array([[2.0]]), [[0.0], [4.0]]) == [[0], []]
    assert assign(line, X014, [[9.0]]) == [[0, 1, 2]]
    with pytest.raises(EmptyCentersError):
        assign(line, X014, [])


def test_finite_metric_cache():
    dist = np.array([[0, 1, 3], [1, 0, 2], [3, 2, 0.0]])
    sp = PointSpace.finite(dist, p=2)
    X = np.arange(3)
    cache = build_cache(sp, X, [0])
    assert cache.total_cost == 0 + 1 + 9
    assert candidate_cost(cache, 2) == 1.0
    assert assign(sp, X, [0, 2]) == [[0, 1], [2]]


def test_candidate_costs_thread_independent():
    rng = np.random.default_rng(0)
    sp = PointSpace.euclidean(4, p=1.5)
    X = rng.normal(size=(700, 4))
    cache = build_cache(sp, X, X[:3])
    a = candidate_costs(cache, X, threads=1)
    b = candidate_costs(cache, X, threads=4)
    assert np.array_equal(a, b)


# -- properties ----------------------------------------------------------------

SPACES = [PointSpace.kmeans(2)] + [PointSpace.euclidean(2, norm=n, p=p) for n in ("l2", "l1", "linf") for p in (1, 2, 3)]


def _points(min_size=1, max_size=25):
    return hnp.arrays(
        float, st.tuples(st.integers(min_size, max_size), st.just(2)), elements=st.floats(-100, 100, allow_nan=False)
    )


@given(st.sampled_from(SPACES), _points(), _points(1, 6), _points(1, 1))
def test_incremental_matches_batch(space, X, C, c):
    cache = build_cache(space, X, C)
    direct = cost(space, X, np.vstack([C, c]))
    assert candidate_cost(cache, c[0]) == pytest.approx(direct, rel=1e-9, abs=1e-12)
    after = add_center(cache, c[0])
    assert after.total_cost == pytest.approx(direct, rel=1e-9, abs=1e-12)
    fresh = build_cache(space, X, after.centers)
    assert np.array_equal(after.nearest_idx, fresh.nearest_idx)


@given(st.sampled_from(SPACES), _points(), _points(2, 8), st.data())
def test_monotone_and_supermodular(space, X, pool, data):
    n = len(pool)
    small = data.draw(st.lists(st.integers(0, n - 1), min_size=1, max_size=n, unique=True))
    extra = data.draw(st.lists(st.integers(0, n - 1), max_size=n, unique=True))
    big = sorted(set(small) | set(extra))
    c = data.draw(hnp.arrays(float, 2, elements=st.floats(-100, 100, allow_nan=False)))
    f_small, f_big = cost(space, X, pool[small]), cost(space, X, pool[big])
    assert f_big <= f_small * (1 + 1e-12) + 1e-12
    gain_small = f_small - cost(space, X, np.vstack([pool[small], c]))
    gain_big = f_big - cost(space, X, np.vstack([pool[big], c]))
    assert gain_small >= gain_big - 1e-9 * max(1.0, f_small)


@given(st.sampled_from(SPACES), _points(), _points(1, 6))
def test_decomposition_over_partition(space, X, C):
    parts = assign(space, X, C)
    assert sorted(i for p in parts for i in p) == list(range(len(X)))
    total = sum(cost(space, X[p], C) for p in parts if p)
    assert total == pytest.approx(cost(space, X, C), rel=1e-9, abs=1e-12)
    cache = build_cache(space, X, C)
    for j, p in enumerate(parts):
        assert np.all(cache.nearest_idx[p] == j)


@given(
    hnp.arrays(float, st.tuples(st.integers(1, 50), st.integers(1, 10)), elements=st.floats(-50, 50, allow_nan=False)),
    st.integers(0, 2**32),
)
def test_bias_variance(A, seed):
    d = A.shape[1]
    sp = PointSpace.kmeans(d)
    z = np.random.default_rng(seed).normal(scale=20, size=d)
    mu = sp.mean(A)
    lhs = float(sp.delta_to(A, z).sum())
    rhs = float(sp.delta_to(A, mu).sum()) + len(A) * float(sp.delta_to(mu[None], z)[0])
    assert lhs == pytest.approx(rhs, rel=1e-9, abs=1e-9)

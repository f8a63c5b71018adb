import io
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gamescape import generators as gen
from gamescape.features import (FEATURE_NAMES, alpharank_entropy_norm, count_3cycles,
                                cycles3_norm, degree_stats_norm, feature_vector, simple_cycle_histogram,
                                spearman, summary_stats)
from gamescape.games import SymmetricMatrixGame, permute_strategies
from gamescape.io import features_to_csv, read_features_csv


class TestEntropy:
    def test_uniform(self):
        assert alpharank_entropy_norm(np.full(3, 1 / 3)) == pytest.approx(1.0, abs=1e-15)

    def test_point_mass(self):
        assert alpharank_entropy_norm([1.0, 0.0, 0.0]) == 0.0

    def test_example(self):
        value = alpharank_entropy_norm([0.5, 0.25, 0.25])
        assert value == pytest.approx(1.5 * math.log(2) / math.log(3), rel=1e-12)
        assert round(value, 3) == 0.946

    def test_single_node(self):
        with pytest.raises(ValueError):
            alpharank_entropy_norm([1.0])


class TestCycles:
    def test_rps(self):
        adj = np.array([[0, 1, 0], [0, 0, 1], [1, 0, 0]])
        assert count_3cycles(adj) == 1
        assert cycles3_norm(adj) == 0.5

    def test_complete_digraph(self):
        adj = np.ones((5, 5)) - np.eye(5)
        assert cycles3_norm(adj) == 1.0

    def test_small_graphs(self):
        assert cycles3_norm(np.array([[0, 1], [1, 0]])) == 0.0

    def test_histogram_matches_trace(self):
        adj = np.random.default_rng(0).random((8, 8)) < 0.4
        np.fill_diagonal(adj, False)
        assert simple_cycle_histogram(adj)[3] == count_3cycles(adj)

    def test_histogram_node_cap(self):
        with pytest.raises(ValueError):
            simple_cycle_histogram(np.zeros((61, 61), dtype=bool))


class TestDegrees:
    def test_transitive_4(self):
        game = gen.transitive_game(4)
        fv = feature_vector(game)
        assert fv.out_mean == pytest.approx(0.5)
        out = np.sort(np.array([0, 1, 2, 3]) / 3)
        assert fv.out_median == pytest.approx(np.median(out))

    def test_rps(self):
        fv = feature_vector(gen.rps())
        assert fv.in_mean == 0.5 and fv.in_std == 0.0
        assert fv.in_skew == 0.0 and fv.in_kurt == 0.0

    def test_moment_conventions(self):
        x = np.array([0.0, 0.0, 0.0, 1.0])
        mean, median, std, skew, kurt = summary_stats(x)
        assert std == pytest.approx(math.sqrt(3 / 16))
        assert skew == pytest.approx(np.mean((x - 0.25) ** 3) / std ** 3)
        assert kurt == pytest.approx(np.mean((x - 0.25) ** 4) / std ** 4)
        assert median == 0.0 and mean == 0.25

    def test_bad_max_degree(self):
        with pytest.raises(ValueError):
            degree_stats_norm(np.zeros((3, 3)), 0)

    @given(st.integers(2, 9), st.integers(0, 10_000))
    @settings(max_examples=50)
    def test_in_mean_equals_out_mean(self, n, seed):
        adj = np.random.default_rng(seed).random((n, n)) < 0.5
        np.fill_diagonal(adj, False)
        stats = degree_stats_norm(adj, n - 1)
        assert stats[0] == stats[5]


class TestFeatureVector:
    def test_transitive_10(self):
        fv = feature_vector(gen.transitive_game(10))
        assert fv.cycles3_norm == 0.0
        assert fv.entropy_norm <= 0.05

    def test_rps(self):
        fv = feature_vector(gen.rps())
        assert fv.entropy_norm == pytest.approx(1.0, abs=1e-8)
        assert fv.cycles3_norm == 0.5

    def test_constant_game(self):
        fv = feature_vector(SymmetricMatrixGame(np.ones((4, 4))))
        assert np.all(fv.values[2:] == 0.0)
        assert fv.entropy_norm == pytest.approx(1.0, abs=1e-12)

    def test_order_and_ranges(self):
        fv = feature_vector(gen.motivating_random(10, seed=1))
        assert list(fv.as_dict()) == list(FEATURE_NAMES)
        assert 0 <= fv.entropy_norm <= 1 and 0 <= fv.cycles3_norm <= 1
        assert 0 <= fv.in_mean <= 1 and fv.in_mean == fv.out_mean

    @given(st.integers(0, 10_000), st.floats(0.01, 100))
    @settings(max_examples=25, deadline=None)
    def test_scale_and_permutation_invariance(self, seed, scale):
        game = gen.motivating_random(8, seed=seed)
        base = feature_vector(game).values
        scaled = SymmetricMatrixGame(game.matrix * scale)
        assert np.allclose(feature_vector(scaled).values, base, atol=1e-9)
        assert np.allclose(feature_vector(permute_strategies(game, seed)).values, base, atol=1e-9)

    def test_transitive_suite_features_identical(self):
        vectors = [feature_vector(gen.motivating_transitive(10, seed)).values for seed in range(20)]
        assert all(np.allclose(v, vectors[0], atol=1e-9) for v in vectors)

    def test_unnormalized_toggle(self):
        fv = feature_vector(gen.rps(), normalize=False)
        assert fv.cycles3 == 1.0 and fv.in_mean == 1.0
        assert fv.entropy == pytest.approx(math.log(3))

    def test_csv_round_trip(self):
        vectors = [feature_vector(gen.rps()), feature_vector(gen.transitive_game(5))]
        text = features_to_csv(vectors)
        assert text.splitlines()[0] == ("name,entropy,cycles3,in_mean,in_median,in_std,in_skew,"
                                        "in_kurt,out_mean,out_median,out_std,out_skew,out_kurt")
        back = read_features_csv(text)
        assert [v.name for v in back] == ["RPS", "Transitive(n=5)"]
        assert all(np.array_equal(a.values, b.values) for a, b in zip(vectors, back))


class TestSpearman:
    def test_monotone(self):
        assert spearman([1, 2, 3], [1, 4, 9])[0] == 1.0
        assert spearman([1, 2, 3], [3, 2, 1])[0] == -1.0

    def test_ties(self):
        rho, _ = spearman([1, 2, 2, 3], [1, 2, 3, 4])
        assert rho == pytest.approx(0.9486832980505138, rel=1e-12)

    def test_matches_scipy(self):
        from scipy import stats
        rng = np.random.default_rng(0)
        x, y = rng.normal(size=30), rng.normal(size=30)
        ref = stats.spearmanr(x, y)
        rho, p = spearman(x, y)
        assert rho == pytest.approx(ref.statistic, rel=1e-12)
        assert p == pytest.approx(ref.pvalue, rel=1e-9)

    def test_zero_variance(self):
        with pytest.raises(ValueError):
            spearman([1, 1, 1], [1, 2, 3])

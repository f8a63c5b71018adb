import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from gamescape import generators as gen
from gamescape.games import GameError, PayoffTensor, SymmetricMatrixGame
from gamescape.response_graph import (AlphaRankParams, _finite_transition, alpharank,
                                      build_response_graph, gth_stationary,
                                      improvement_digraph, power_stationary,
                                      stationary_distribution, to_dot)

EPS = 1e-10


class TestParams:
    @pytest.mark.parametrize("kwargs", [{"epsilon": 0.5}, {"epsilon": 0.0}, {"alpha": 0.0},
                                        {"m": 1}, {"mode": "other"}, {"population": "both"}])
    def test_invalid(self, kwargs):
        with pytest.raises(ValueError):
            AlphaRankParams(**kwargs)


class TestConstruction:
    def test_rps_infinite_weights(self):
        graph = build_response_graph(gen.rps())
        assert graph.eta == 0.5
        assert graph.transitions[0, 1] == 0.5 * (1 - EPS)   # Rock -> Paper improves
        assert graph.transitions[0, 2] == 0.5 * EPS
        assert np.allclose(graph.transitions.sum(axis=1), 1.0, atol=1e-12)

    def test_finite_formula_example(self):
        value = _finite_transition(np.array([math.log(2)]), 1.0, 1.0, 2)[0]
        assert math.isclose(value, 2 / 3, rel_tol=1e-14)

    def test_finite_tie_is_eta_over_m(self):
        assert _finite_transition(np.array([0.0]), 0.25, 0.2, 50)[0] == 0.25 / 50

    @given(st.floats(-50, 50), st.floats(0.01, 5), st.integers(2, 100))
    def test_finite_matches_direct_formula(self, gain, alpha, m):
        got = _finite_transition(np.array([gain]), 1.0, alpha, m)[0]
        x = alpha * gain
        if abs(x) < 1e-6:
            assert math.isclose(got, 1 / m, rel_tol=1e-4)
        elif abs(m * x) < 300:
            expected = (1 - math.exp(-x)) / (1 - math.exp(-m * x))
            assert math.isclose(got, expected, rel_tol=1e-9)
        assert 0.0 <= got <= 1.0

    def test_multi_population_counts(self):
        tensor = PayoffTensor(np.random.default_rng(0).normal(size=(3, 2, 3, 4)))
        graph = build_response_graph(tensor)
        assert graph.num_nodes == 24
        assert graph.max_degree == 1 + 2 + 3
        assert math.isclose(graph.eta, 1 / 6)
        # only unilateral deviations carry mass
        for a, s in enumerate(graph.nodes):
            for b, t in enumerate(graph.nodes):
                if a != b and sum(x != y for x, y in zip(s, t)) > 1:
                    assert graph.transitions[a, b] == 0.0
        assert not np.any(np.diag(graph.improvement))

    def test_single_population_requires_symmetry(self):
        with pytest.raises(GameError):
            build_response_graph(gen.bruns_game("Pd", "Ch"), AlphaRankParams(population="single"))

    def test_single_strategy_is_undefined(self):
        with pytest.raises(GameError):
            build_response_graph(SymmetricMatrixGame([[0.0]]))

    def test_resident_fitness_variant(self):
        matrix = np.array([[1.0, 0.0], [2.0, 0.5]])
        graph = build_response_graph(SymmetricMatrixGame(matrix),
                                     AlphaRankParams(fitness="resident"))
        assert graph.payoff_gain[0, 1] == matrix[1, 0] - matrix[0, 0]


class TestImprovement:
    def test_rps_cycle(self):
        adj = improvement_digraph(build_response_graph(gen.rps()))
        assert adj.sum() == 3
        assert adj[0, 1] and adj[1, 2] and adj[2, 0]

    @pytest.mark.parametrize("n", [3, 6, 11])
    def test_transitive_edge_count(self, n):
        adj = improvement_digraph(build_response_graph(gen.transitive_game(n)))
        assert adj.sum() == n * (n - 1) // 2
        assert np.all(adj[:, 0][1:])

    def test_constant_game(self):
        adj = improvement_digraph(build_response_graph(SymmetricMatrixGame(np.ones((4, 4)))))
        assert adj.sum() == 0


class TestStationary:
    def test_rps_uniform(self):
        _, dist = alpharank(gen.rps())
        assert np.allclose(dist.pi, 1 / 3, atol=1e-8)
        assert dist.residual <= 1e-10

    def test_transitive_concentrates_on_dominant(self):
        _, dist = alpharank(gen.transitive_game(4))
        assert dist.pi[0] >= 1 - 10 * EPS * 4

    def test_continuity_in_epsilon(self):
        game = gen.transitive_game(3)
        a = alpharank(game, AlphaRankParams(epsilon=1e-6))[1].pi
        b = alpharank(game, AlphaRankParams(epsilon=5e-7))[1].pi
        assert np.abs(a - b).max() <= 10 * 1e-6

    def test_power_matches_direct(self):
        graph = build_response_graph(gen.motivating_random(12, seed=3),
                                     AlphaRankParams(mode="finite", alpha=0.5))
        direct = stationary_distribution(graph, "direct").pi
        power = stationary_distribution(graph, "power").pi
        assert np.allclose(direct, power, atol=1e-10)

    def test_gth_on_known_chain(self):
        p = np.array([[0.9, 0.1], [0.3, 0.7]])
        assert np.allclose(gth_stationary(p), [0.75, 0.25], atol=1e-15)
        assert np.allclose(power_stationary(p), [0.75, 0.25], atol=1e-12)

    def test_non_ergodic_chain_raises(self):
        with pytest.raises(ArithmeticError):
            gth_stationary(np.eye(3))

    def test_11_20_multi_population(self):
        graph, dist = alpharank(gen.game_11_20())
        assert graph.num_nodes == 100
        assert dist.residual <= 1e-10
        assert math.isclose(dist.pi.sum(), 1.0, abs_tol=1e-12)


@given(st.integers(2, 6).flatmap(
    lambda n: arrays(np.float64, (n, n), elements=st.floats(-3, 3, allow_nan=False))),
    st.floats(0.1, 100))
@settings(max_examples=50)
def test_scale_invariance_infinite_alpha(matrix, scale):
    game = SymmetricMatrixGame(matrix)
    scaled = SymmetricMatrixGame(matrix * scale)
    g1, d1 = alpharank(game)
    g2, d2 = alpharank(scaled)
    if np.array_equal(np.sign(g1.payoff_gain), np.sign(g2.payoff_gain)):
        assert np.array_equal(g1.transitions, g2.transitions)
        assert np.array_equal(d1.pi, d2.pi)


def test_player_constant_shift_leaves_graph_unchanged():
    tensor = gen.bruns_game("Ch", "Pd")
    shifted = PayoffTensor(tensor.payoffs + np.array([3.0, -1.0])[:, None, None])
    assert np.array_equal(build_response_graph(tensor).transitions,
                          build_response_graph(shifted).transitions)


def test_dot_export():
    graph, dist = alpharank(gen.rps())
    text = to_dot(graph, dist.pi)
    assert text.startswith("digraph") and text.count("->") == 3
    assert "0.333333" in text

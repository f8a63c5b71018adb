import io
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from gamescape import generators as gen
from gamescape.games import (GameError, PayoffTensor, SymmetricMatrixGame, expand_with_mixtures,
                             permute_strategies, restrict, standardize_zero_sum, subsample,
                             validate)
from gamescape.io import game_from_dict, game_to_json, read_game, write_csv, write_game

RPS = np.array([[0, -1, 1], [1, 0, -1], [-1, 1, 0]], dtype=float)


def square_matrices(max_n=6):
    return st.integers(2, max_n).flatmap(
        lambda n: arrays(np.float64, (n, n), elements=st.floats(-5, 5, allow_nan=False)))


class TestValidate:
    def test_rps_is_valid(self):
        assert validate(gen.rps().to_tensor()) == []

    def test_nonfinite_entry_reports_index(self):
        payoffs = np.zeros((2, 2, 2))
        payoffs[0, 0, 1] = np.inf
        problems = validate(PayoffTensor(payoffs))
        assert len(problems) == 1
        assert "finite" in problems[0] and "(0, 1)" in problems[0]

    def test_symmetry_violation(self):
        payoffs = np.stack([RPS, RPS.T.copy()])
        payoffs[1, 0, 1] = 7.0
        problems = validate(PayoffTensor(payoffs, symmetric=True))
        assert len(problems) == 1 and "symmetr" in problems[0]

    def test_matrix_game_rejects_non_square(self):
        with pytest.raises(GameError):
            SymmetricMatrixGame(np.zeros((2, 3)))


class TestStandardize:
    def test_rps_unchanged(self):
        out = standardize_zero_sum(RPS)
        assert np.array_equal(out.matrix, RPS)

    def test_scaling_example(self):
        out = standardize_zero_sum([[0, 4], [-4, 0]])
        assert np.array_equal(out.matrix, [[0, 1], [-1, 0]])

    def test_zeros(self):
        assert np.array_equal(standardize_zero_sum(np.zeros((3, 3))).matrix, np.zeros((3, 3)))

    def test_non_square(self):
        with pytest.raises(GameError):
            standardize_zero_sum(np.zeros((2, 3)))

    @given(square_matrices())
    def test_antisymmetric_bounded_and_idempotent(self, m):
        once = standardize_zero_sum(m).matrix
        assert np.array_equal(once, -once.T)
        assert np.abs(once).max() <= 1.0
        assert np.array_equal(standardize_zero_sum(once).matrix, once)


class TestMixtures:
    def test_uniform_mixture_against_rps_is_zero(self):
        # the uniform mixture is a zero column/row against the pure strategies
        game = gen.rps()
        x = np.full(3, 1 / 3)
        assert np.allclose(x @ game.matrix, 0.0)
        out = expand_with_mixtures(game, 2, support_fraction=1.0, seed=3)
        assert out.n == 5

    def test_zero_mixtures_is_identity(self):
        game = gen.rps()
        assert np.array_equal(expand_with_mixtures(game, 0).matrix, game.matrix)

    def test_negative_count(self):
        with pytest.raises(GameError):
            expand_with_mixtures(gen.rps(), -1)

    @given(st.integers(0, 6), st.integers(0, 10_000))
    @settings(max_examples=30)
    def test_preserves_antisymmetry(self, count, seed):
        out = expand_with_mixtures(gen.disc_game(6, seed=1), count, seed=seed).matrix
        assert np.array_equal(out, -out.T)
        assert np.all(np.diag(out) == 0)

    def test_mixture_payoffs_are_expectations(self):
        # even-sized antisymmetric matrices are generically invertible, so the
        # mixture can be recovered from its payoffs against the pure strategies
        base = gen.random_game_of_skill(6, seed=2)
        out = expand_with_mixtures(base, 1, support_fraction=0.5, seed=4).matrix
        x = np.linalg.solve(base.matrix.T, out[6, :6])
        assert math.isclose(x.sum(), 1.0, abs_tol=1e-8)
        assert np.all(x > -1e-9)
        assert np.count_nonzero(x > 1e-9) <= 3
        assert out[6, 6] == 0.0


class TestSubsample:
    def test_full_keep_is_identity(self):
        game = gen.disc_game(10, seed=0)
        assert np.array_equal(subsample(game, 1.0, seed=5).matrix, game.matrix)

    def test_half_is_principal_submatrix(self):
        base = gen.disc_game(10, seed=0)
        game = SymmetricMatrixGame(base.matrix, labels=tuple(str(i) for i in range(10)))
        sub = subsample(game, 0.5, seed=7)
        assert sub.n == 5
        kept = [int(label) for label in sub.labels]
        assert kept == sorted(set(kept))
        assert np.array_equal(sub.matrix, game.matrix[np.ix_(kept, kept)])
        assert np.array_equal(subsample(game, 0.5, seed=7).matrix, sub.matrix)

    def test_too_small(self):
        with pytest.raises(GameError):
            subsample(gen.disc_game(10, seed=0), 0.01, seed=0)

    def test_restrict_matches_indices(self):
        game = gen.disc_game(8, seed=1)
        sub = restrict(game, [1, 4, 6])
        assert np.array_equal(sub.matrix, game.matrix[np.ix_([1, 4, 6], [1, 4, 6])])


class TestSerialization:
    def test_rps_round_trip(self, tmp_path):
        path = tmp_path / "rps.json"
        write_game(gen.rps(), path)
        back = read_game(path)
        assert back == gen.rps().to_tensor()
        assert np.array_equal(back.as_symmetric().matrix, RPS)

    def test_shape_mismatch(self):
        doc = {"name": "x", "players": 2, "strategy_counts": [3, 3], "symmetric": False,
               "payoffs": [np.zeros((2, 3)).tolist(), np.zeros((2, 3)).tolist()]}
        with pytest.raises(GameError):
            game_from_dict(doc)

    def test_nan_token_rejected(self):
        text = ('{"name": "x", "players": 2, "strategy_counts": [1, 1], "symmetric": false, '
                '"payoffs": [[[NaN]], [[0]]]}')
        with pytest.raises(GameError):
            read_game(io.StringIO(text))

    def test_csv_of_11_20(self):
        tensor = gen.game_11_20()
        buffer = io.StringIO()
        write_csv(tensor, buffer, labels=[str(r) for r in range(11, 21)])
        buffer.seek(0)
        back = read_game(buffer)
        assert back.strategy_counts == (10, 10)
        assert np.array_equal(back.payoffs, tensor.payoffs)

    @pytest.mark.parametrize("game", [
        gen.rps(), gen.redundant_rps(), gen.blotto(5, 3), gen.elo_game(7, 0.3, seed=2),
        gen.disc_game(6, seed=1), gen.random_game_of_skill(6, seed=3),
        gen.normal_bernoulli(6, seed=4), gen.transitive_game(5), gen.motivating_cyclical(10),
        gen.motivating_random(6, seed=1), gen.game_11_20(), gen.bruns_game("Pd", "Ch"),
    ], ids=lambda g: g.name)
    def test_generator_outputs_round_trip_exactly(self, game):
        text = game_to_json(game)
        back = read_game(io.StringIO(text))
        expected = game.to_tensor() if isinstance(game, SymmetricMatrixGame) else game
        assert np.array_equal(back.payoffs, expected.payoffs)
        assert back.name == expected.name

    @given(square_matrices())
    def test_arbitrary_reals_round_trip(self, m):
        game = SymmetricMatrixGame(m, name="h")
        back = read_game(io.StringIO(game_to_json(game)))
        assert np.array_equal(back.payoffs[0], m)


def test_permutation_is_relabelling():
    game = gen.disc_game(6, seed=0)
    perm = permute_strategies(game, seed=3)
    assert sorted(perm.matrix.ravel().tolist()) == sorted(game.matrix.ravel().tolist())
    assert np.array_equal(perm.matrix, -perm.matrix.T)

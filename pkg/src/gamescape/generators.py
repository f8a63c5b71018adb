"""Constructors for canonical and randomly sampled games."""

from __future__ import annotations

import itertools
import math

import numpy as np

from gamescape.games import GameError, PayoffTensor, SymmetricMatrixGame, permute_strategies
from gamescape.melo import MEloGenome, melo_payoffs

__all__ = [
    "BRUNS_PATTERNS",
    "blotto",
    "blotto_strategies",
    "bruns_2x2_suite",
    "disc_game",
    "elo_game",
    "game_11_20",
    "melo_game",
    "motivating_cyclical",
    "motivating_random",
    "motivating_transitive",
    "normal_bernoulli",
    "random_game_of_skill",
    "redundant_rps",
    "rps",
    "transitive_game",
]

BLOTTO_MAX_STRATEGIES = 10_000

# Row-player ordinal payoffs of the twelve core 2x2 patterns, in table order.
BRUNS_PATTERNS: dict[str, tuple[tuple[int, int], tuple[int, int]]] = {
    "Ch": ((2, 3), (1, 4)),
    "Ba": ((3, 2), (1, 4)),
    "Hr": ((3, 1), (2, 4)),
    "Cm": ((2, 1), (3, 4)),
    "Dl": ((1, 2), (3, 4)),
    "Pd": ((1, 3), (2, 4)),
    "Sh": ((1, 4), (2, 3)),
    "As": ((1, 4), (3, 2)),
    "Co": ((2, 4), (3, 1)),
    "Pc": ((3, 4), (2, 1)),
    "Ha": ((3, 4), (1, 2)),
    "Nc": ((2, 4), (1, 3)),
}


def rps() -> SymmetricMatrixGame:
    return SymmetricMatrixGame([[0, -1, 1], [1, 0, -1], [-1, 1, 0]], name="RPS",
                               labels=("R", "P", "S"))


def redundant_rps() -> SymmetricMatrixGame:
    """RPS with a duplicate of Rock as the second strategy."""
    matrix = [[0, 0, -1, 1],
              [0, 0, -1, 1],
              [1, 1, 0, -1],
              [-1, -1, 1, 0]]
    return SymmetricMatrixGame(matrix, name="Redundant RPS", labels=("R", "R'", "P", "S"))


def blotto_strategies(tokens: int, regions: int,
                      max_strategies: int = BLOTTO_MAX_STRATEGIES) -> np.ndarray:
    """All allocations of ``tokens`` over ``regions``, in lexicographic order."""
    if tokens < 1 or regions < 1:
        raise GameError(f"Blotto needs tokens >= 1 and regions >= 1, got ({tokens}, {regions})")
    count = math.comb(tokens + regions - 1, regions - 1)
    if count > max_strategies:
        raise GameError(f"Blotto({tokens},{regions}) has {count} strategies, above the "
                        f"cap of {max_strategies}")
    # stars and bars: bar positions in increasing lexicographic order give
    # allocations in lexicographic order of the first region (then the next...)
    allocations = []
    for bars in itertools.combinations(range(tokens + regions - 1), regions - 1):
        edges = (-1, *bars, tokens + regions - 1)
        allocations.append([edges[i + 1] - edges[i] - 1 for i in range(regions)])
    return np.array(allocations, dtype=int).reshape(count, regions)


def blotto(tokens: int, regions: int, max_strategies: int = BLOTTO_MAX_STRATEGIES) -> SymmetricMatrixGame:
    """Colonel Blotto with +1/0/-1 per region won/drawn/lost."""
    allocations = blotto_strategies(tokens, regions, max_strategies)
    diff = allocations[:, None, :] - allocations[None, :, :]
    matrix = np.sign(diff).sum(axis=2)
    labels = tuple("".join(map(str, a)) if tokens < 10 else "-".join(map(str, a))
                   for a in allocations)
    return SymmetricMatrixGame(matrix, name=f"Blotto({tokens},{regions})", labels=labels)


def _antisymmetric(matrix: np.ndarray) -> np.ndarray:
    upper = np.triu(matrix, 1)
    return upper - upper.T


def elo_game(n: int, noise_sigma: float = 0.0, seed: int = 0) -> SymmetricMatrixGame:
    """Elo game, optionally with Gaussian payoff noise, symmetrized as ``N - N^T``.

    Ratings are i.i.d. standard normal. The noise-free table is
    ``2 * sigmoid(r_i - r_j) - 1``.
    """
    if n < 2:
        raise GameError(f"elo_game needs n >= 2, got {n}")
    if noise_sigma < 0:
        raise GameError(f"noise_sigma must be >= 0, got {noise_sigma}")
    rng = np.random.default_rng(seed)
    ratings = rng.standard_normal(n)
    noisy = np.tanh(0.5 * (ratings[:, None] - ratings[None, :]))
    if noise_sigma > 0:
        noisy = noisy + rng.normal(0.0, noise_sigma, size=(n, n))
    matrix = noisy - noisy.T
    return SymmetricMatrixGame(matrix, name=f"Elo(n={n},noise={noise_sigma:g},seed={seed})")


def disc_game(n: int, seed: int = 0) -> SymmetricMatrixGame:
    """Disc game over ``n`` points drawn uniformly from the unit disc."""
    if n < 2:
        raise GameError(f"disc_game needs n >= 2, got {n}")
    rng = np.random.default_rng(seed)
    points = np.empty((0, 2))
    while len(points) < n:
        candidates = rng.uniform(-1.0, 1.0, size=(2 * (n - len(points)) + 8, 2))
        inside = candidates[(candidates ** 2).sum(axis=1) <= 1.0]
        points = np.vstack([points, inside])
    points = points[:n]
    return SymmetricMatrixGame(disc_payoffs(points), name=f"Disc(n={n},seed={seed})")


def disc_payoffs(points) -> np.ndarray:
    """``M(i,j) = S_i^T [[0,-1],[1,0]] S_j = y_i x_j - x_i y_j``."""
    points = np.asarray(points, dtype=float)
    half = np.outer(points[:, 1], points[:, 0])
    return half - half.T


def random_game_of_skill(n: int, seed: int = 0) -> SymmetricMatrixGame:
    """``M(i,j) = 0.5 (W_ij - W_ji) + S_i - S_j`` with standard normal W, S."""
    if n < 2:
        raise GameError(f"random_game_of_skill needs n >= 2, got {n}")
    rng = np.random.default_rng(seed)
    w = rng.standard_normal((n, n))
    s = rng.standard_normal(n)
    matrix = 0.5 * (w - w.T) + (s[:, None] - s[None, :])
    return SymmetricMatrixGame(_antisymmetric(matrix), name=f"RGoS(n={n},seed={seed})")


def normal_bernoulli(n: int, seed: int = 0) -> SymmetricMatrixGame:
    """``M(i,j) = W_ij - W_ji + S_i - S_j`` with W ~ U(0,1) and S standard normal."""
    if n < 2:
        raise GameError(f"normal_bernoulli needs n >= 2, got {n}")
    rng = np.random.default_rng(seed)
    s = rng.standard_normal(n)
    w = rng.uniform(0.0, 1.0, size=(n, n))
    matrix = (w - w.T) + (s[:, None] - s[None, :])
    return SymmetricMatrixGame(_antisymmetric(matrix), name=f"NormalBernoulli(n={n},seed={seed})")


def transitive_game(n: int) -> SymmetricMatrixGame:
    """+1 above the diagonal, -1 below; strategy 0 beats every other."""
    if n < 1:
        raise GameError(f"transitive_game needs n >= 1, got {n}")
    upper = np.triu(np.ones((n, n)), 1)
    return SymmetricMatrixGame(upper - upper.T, name=f"Transitive(n={n})")


def _rescaled(game: SymmetricMatrixGame, name: str) -> SymmetricMatrixGame:
    scale = float(np.abs(game.matrix).max())
    matrix = game.matrix / scale if scale > 0 else game.matrix
    return SymmetricMatrixGame(matrix, name=name)


def motivating_cyclical(n: int = 10, seed: int | None = None,
                        last_vector: tuple[float, float] = (-1.0, -1.0)) -> SymmetricMatrixGame:
    """Rank-1 mElo game: a transitive chain of ``n - 1`` strategies plus a cycle-maker.

    Strategies ``i < n - 1`` sit on the line ``c_i = (i, n - 2 - i)`` so that a
    higher index wins. The final strategy's vector ``last_vector`` beats the
    strong end of the chain and loses to the weak end, closing cycles. With
    ``seed`` set the strategies are randomly relabelled.
    """
    if n < 3:
        raise GameError(f"motivating_cyclical needs n >= 3, got {n}")
    vectors = np.zeros((n, 2))
    vectors[:-1, 0] = np.arange(n - 1)
    vectors[:-1, 1] = np.arange(n - 2, -1, -1)
    vectors[-1] = last_vector
    game = _rescaled(melo_payoffs(MEloGenome(np.zeros(n), vectors)),
                     name=f"Cyclical(n={n})")
    if seed is not None:
        game = permute_strategies(game, seed).renamed(f"Cyclical(n={n},seed={seed})")
    return game


def motivating_random(n: int = 10, seed: int = 0, rank: int = 3) -> SymmetricMatrixGame:
    """mElo game of the given rank with i.i.d. standard normal parameters."""
    if n < 3:
        raise GameError(f"motivating_random needs n >= 3, got {n}")
    rng = np.random.default_rng(seed)
    genome = MEloGenome(rng.standard_normal(n), rng.standard_normal((n, 2 * rank)))
    return melo_payoffs(genome, name=f"RandomMElo(n={n},seed={seed})")


def motivating_transitive(n: int = 10, seed: int = 0) -> SymmetricMatrixGame:
    """Noise-free Elo game used as the transitive motivating class."""
    return elo_game(n, 0.0, seed).renamed(f"TransitiveElo(n={n},seed={seed})")


def melo_game(genome: MEloGenome) -> SymmetricMatrixGame:
    return melo_payoffs(genome)


def game_11_20() -> PayoffTensor:
    """The 11-20 money request game over requests 11..20."""
    requests = np.arange(11, 21)
    own = requests[:, None].astype(float)
    other = requests[None, :]
    row = own + 20.0 * (own == other - 1)
    return PayoffTensor(np.stack([row, row.T]), name="11-20", symmetric=True)


def bruns_pattern(code: str) -> np.ndarray:
    return np.array(BRUNS_PATTERNS[code], dtype=float)


def anti_transpose(matrix: np.ndarray) -> np.ndarray:
    """Transpose along the anti-diagonal: ``B[i, j] = A[n-1-j, n-1-i]``."""
    return np.asarray(matrix)[::-1, ::-1].T


def bruns_game(row_code: str, col_code: str) -> PayoffTensor:
    row = bruns_pattern(row_code)
    col = anti_transpose(bruns_pattern(col_code))
    return PayoffTensor(np.stack([row, col]), name=f"{row_code}x{col_code}")


def bruns_2x2_suite() -> list[PayoffTensor]:
    """All 144 ordered (row pattern, column pattern) pairs, row-major."""
    return [bruns_game(r, c) for r in BRUNS_PATTERNS for c in BRUNS_PATTERNS]

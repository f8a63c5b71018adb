"""Normal-form game containers with validation and elementary transformations.

Two representations are used throughout the package:

* :class:`PayoffTensor` holds a K-player general-sum game as one dense
  payoff array per player, indexed by pure strategy profile.
* :class:`SymmetricMatrixGame` holds a two-player symmetric game as the single
  row-player matrix ``M``; the column player's payoffs are ``M.T``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np


class GameError(ValueError):
    """Raised when a game violates a structural precondition."""


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.array(array, dtype=float, copy=True)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class PayoffTensor:
    """K-player normal-form game.

    Attributes:
      payoffs: array of shape ``(K, |S^1|, ..., |S^K|)``; ``payoffs[k][s]`` is
        player k's payoff at profile ``s``.
      name: free-form label.
      symmetric: whether the game is flagged as a two-player symmetric game.
    """

    payoffs: np.ndarray
    name: str = "game"
    symmetric: bool = False

    def __post_init__(self):
        object.__setattr__(self, "payoffs", _frozen(self.payoffs))

    @property
    def num_players(self) -> int:
        return self.payoffs.shape[0]

    @property
    def strategy_counts(self) -> tuple[int, ...]:
        return tuple(self.payoffs.shape[1:])

    @property
    def num_profiles(self) -> int:
        return math.prod(self.strategy_counts)

    def __eq__(self, other):
        if not isinstance(other, PayoffTensor):
            return NotImplemented
        return (self.name == other.name and self.symmetric == other.symmetric
                and self.payoffs.shape == other.payoffs.shape
                and np.array_equal(self.payoffs, other.payoffs))

    def as_symmetric(self) -> SymmetricMatrixGame:
        """Returns the row-player matrix of a symmetric two-player game."""
        if self.num_players != 2 or self.strategy_counts[0] != self.strategy_counts[1]:
            raise GameError(f"{self.name}: not a square two-player game")
        if not np.array_equal(self.payoffs[1], self.payoffs[0].T):
            raise GameError(f"{self.name}: column payoffs are not the transpose "
                            "of row payoffs")
        return SymmetricMatrixGame(self.payoffs[0], name=self.name)


@dataclass(frozen=True, eq=False)
class SymmetricMatrixGame:
    """Two-player symmetric game stored as the row player's ``n x n`` matrix."""

    matrix: np.ndarray
    name: str = "game"
    labels: tuple[str, ...] | None = field(default=None)

    def __post_init__(self):
        matrix = _frozen(self.matrix)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise GameError(f"{self.name}: payoff matrix must be square, "
                            f"got shape {matrix.shape}")
        object.__setattr__(self, "matrix", matrix)
        if self.labels is not None:
            labels = tuple(str(label) for label in self.labels)
            if len(labels) != matrix.shape[0]:
                raise GameError(f"{self.name}: {len(labels)} labels for "
                                f"{matrix.shape[0]} strategies")
            object.__setattr__(self, "labels", labels)

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    def __eq__(self, other):
        if not isinstance(other, SymmetricMatrixGame):
            return NotImplemented
        return (self.name == other.name and self.matrix.shape == other.matrix.shape
                and np.array_equal(self.matrix, other.matrix))

    def is_antisymmetric(self) -> bool:
        return bool(np.array_equal(self.matrix, -self.matrix.T))

    def to_tensor(self) -> PayoffTensor:
        return PayoffTensor(np.stack([self.matrix, self.matrix.T]), name=self.name,
                            symmetric=True)

    def renamed(self, name: str) -> SymmetricMatrixGame:
        return SymmetricMatrixGame(self.matrix, name=name, labels=self.labels)


Game = PayoffTensor | SymmetricMatrixGame


def as_tensor(game: Game) -> PayoffTensor:
    if isinstance(game, SymmetricMatrixGame):
        return game.to_tensor()
    return game


def validate(game: PayoffTensor) -> list[str]:
    """Lists every invariant violation of ``game``; empty when valid."""
    violations = []
    payoffs = np.asarray(game.payoffs)
    if payoffs.ndim < 2:
        return [f"shape: payoff array must be (K, |S^1|, ..., |S^K|), got {payoffs.shape}"]
    k = payoffs.shape[0]
    if payoffs.ndim != k + 1:
        violations.append(f"shape: {k} players but payoff array has "
                          f"{payoffs.ndim - 1} strategy axes")
    if any(count < 1 for count in payoffs.shape[1:]):
        violations.append(f"shape: strategy counts must be positive, got {payoffs.shape[1:]}")
    for index in zip(*np.nonzero(~np.isfinite(payoffs))):
        player, profile = int(index[0]), tuple(int(i) for i in index[1:])
        violations.append(f"finiteness: player {player} payoff at profile {profile} "
                          f"is {payoffs[index]}")
    if game.symmetric:
        if k != 2 or payoffs.ndim != 3 or payoffs.shape[1] != payoffs.shape[2]:
            violations.append("symmetry: symmetric flag requires two players with equal "
                              f"strategy counts, got shape {payoffs.shape}")
        else:
            mismatch = payoffs[1] != payoffs[0].T
            for i, j in zip(*np.nonzero(mismatch)):
                violations.append(f"symmetry: M2{(int(i), int(j))} = {payoffs[1][i, j]} "
                                  f"differs from M1{(int(j), int(i))} = {payoffs[0][j, i]}")
    return violations


def standardize_zero_sum(matrix, name: str = "standardized") -> SymmetricMatrixGame:
    """Symmetrizes ``M`` into ``(M - M.T) / c`` with entries in ``[-1, 1]``.

    ``c = max(1, max |M - M.T|)`` so a matrix that is already antisymmetric and
    bounded by one comes back unchanged.
    """
    if isinstance(matrix, SymmetricMatrixGame):
        name = matrix.name
        matrix = matrix.matrix
    matrix = np.asarray(matrix, dtype=float)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise GameError(f"standardize_zero_sum needs a square matrix, got {matrix.shape}")
    if np.array_equal(matrix, -matrix.T) and (matrix.size == 0 or np.abs(matrix).max() <= 1):
        return SymmetricMatrixGame(matrix, name=name)
    diff = matrix - matrix.T
    scale = max(1.0, float(np.abs(diff).max()))
    return SymmetricMatrixGame(diff / scale, name=name)


def expand_with_mixtures(game: SymmetricMatrixGame, num_mixtures: int,
                         support_fraction: float = 0.5, seed: int = 0) -> SymmetricMatrixGame:
    """Appends ``num_mixtures`` random mixed strategies as new pure strategies.

    Each mixture draws a uniformly random subset of ``ceil(support_fraction * n)``
    base strategies and weights that are uniform on the simplex. Payoffs of the
    enlarged game are bilinear: ``x^T M y``.
    """
    if num_mixtures < 0:
        raise GameError(f"num_mixtures must be >= 0, got {num_mixtures}")
    if game.n < 2:
        raise GameError("expand_with_mixtures needs at least two base strategies")
    if not 0 < support_fraction <= 1:
        raise GameError(f"support_fraction must lie in (0, 1], got {support_fraction}")
    if num_mixtures == 0:
        return game
    rng = np.random.default_rng(seed)
    n = game.n
    support_size = math.ceil(support_fraction * n)
    mixtures = np.zeros((num_mixtures, n))
    for row in mixtures:
        support = rng.choice(n, size=support_size, replace=False)
        row[support] = rng.dirichlet(np.ones(support_size))
    strategies = np.vstack([np.eye(n), mixtures])
    upper = strategies @ game.matrix @ strategies.T
    if game.is_antisymmetric():
        # keep antisymmetry exact despite rounding
        upper = np.triu(upper, 1)
        upper = upper - upper.T
    labels = None
    if game.labels is not None:
        labels = game.labels + tuple(f"mix{i}" for i in range(num_mixtures))
    return SymmetricMatrixGame(upper, name=f"{game.name}+mix{num_mixtures}", labels=labels)


def subsample(game: SymmetricMatrixGame, keep_fraction: float, seed: int = 0) -> SymmetricMatrixGame:
    """Keeps a uniformly random subset of ``ceil(keep_fraction * n)`` strategies."""
    if not 0 < keep_fraction <= 1:
        raise GameError(f"keep_fraction must lie in (0, 1], got {keep_fraction}")
    size = math.ceil(keep_fraction * game.n)
    if size < 2:
        raise GameError(f"subsample would keep {size} strategies; need at least 2")
    if size == game.n:
        return game
    rng = np.random.default_rng(seed)
    keep = np.sort(rng.choice(game.n, size=size, replace=False))
    return restrict(game, keep, name=f"{game.name}[sub{size}]")


def restrict(game: SymmetricMatrixGame, indices: Sequence[int], name: str | None = None) -> SymmetricMatrixGame:
    """Principal submatrix over ``indices``, in the given order."""
    indices = np.asarray(indices, dtype=int)
    labels = None
    if game.labels is not None:
        labels = tuple(game.labels[i] for i in indices)
    return SymmetricMatrixGame(game.matrix[np.ix_(indices, indices)],
                               name=name or game.name, labels=labels)


def permute_strategies(game: SymmetricMatrixGame, seed: int) -> SymmetricMatrixGame:
    """Relabels strategies by a seeded uniformly random permutation."""
    order = np.random.default_rng(seed).permutation(game.n)
    return restrict(game, order)

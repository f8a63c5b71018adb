"""Multidimensional Elo (mElo) payoff model.

Strategy ``i`` carries a transitive rating ``r_i`` and a ``2k``-vector ``c_i``;
its win probability against ``j`` is ``sigmoid(r_i - r_j + c_i^T Omega c_j)``
with ``Omega = sum_l (e_{2l-1} e_{2l}^T - e_{2l} e_{2l-1}^T)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from gamescape.games import SymmetricMatrixGame


@dataclass(frozen=True, eq=False)
class MEloGenome:
    """mElo parameters for ``n`` strategies at rank ``k``."""

    ratings: np.ndarray
    vectors: np.ndarray

    def __post_init__(self):
        ratings = np.array(self.ratings, dtype=float).reshape(-1)
        vectors = np.array(self.vectors, dtype=float)
        if vectors.ndim != 2 or vectors.shape[0] != ratings.shape[0] or vectors.shape[1] % 2:
            raise ValueError(f"intransitive vectors must have shape (n, 2k) with n = "
                             f"{ratings.shape[0]}, got {vectors.shape}")
        ratings.setflags(write=False)
        vectors.setflags(write=False)
        object.__setattr__(self, "ratings", ratings)
        object.__setattr__(self, "vectors", vectors)

    @property
    def n(self) -> int:
        return self.ratings.shape[0]

    @property
    def k(self) -> int:
        return self.vectors.shape[1] // 2

    @staticmethod
    def size(n: int, k: int) -> int:
        return n * (1 + 2 * k)

    @classmethod
    def zeros(cls, n: int, k: int) -> MEloGenome:
        return cls(np.zeros(n), np.zeros((n, 2 * k)))

    @classmethod
    def from_vector(cls, x, n: int, k: int) -> MEloGenome:
        """Inverse of :meth:`to_vector`; each strategy owns a ``1 + 2k`` block."""
        x = np.asarray(x, dtype=float)
        if x.shape != (cls.size(n, k),):
            raise ValueError(f"expected a vector of length {cls.size(n, k)}, got {x.shape}")
        blocks = x.reshape(n, 1 + 2 * k)
        return cls(blocks[:, 0], blocks[:, 1:])

    def to_vector(self) -> np.ndarray:
        return np.hstack([self.ratings[:, None], self.vectors]).reshape(-1)

    def to_dict(self) -> dict:
        return {"n": self.n, "k": self.k, "ratings": self.ratings.tolist(),
                "vectors": self.vectors.tolist()}

    @classmethod
    def from_dict(cls, doc: dict) -> MEloGenome:
        n, k = int(doc["n"]), int(doc["k"])
        vectors = np.array(doc["vectors"], dtype=float).reshape(n, 2 * k)
        return cls(doc["ratings"], vectors)


def melo_logits(genome: MEloGenome) -> np.ndarray:
    """Exactly antisymmetric matrix of ``r_i - r_j + c_i^T Omega c_j``."""
    r = genome.ratings
    transitive = r[:, None] - r[None, :]
    if genome.k == 0:
        return transitive
    first = genome.vectors[:, 0::2]
    second = genome.vectors[:, 1::2]
    # c_i^T Omega c_j = sum_l (c_i[2l] c_j[2l+1] - c_i[2l+1] c_j[2l]), 0-indexed
    half = first @ second.T
    return transitive + (half - half.T)


def melo_win_probabilities(genome: MEloGenome) -> np.ndarray:
    """Raw mElo payoffs ``sigmoid(logits)`` in ``(0, 1)``."""
    return 1.0 / (1.0 + np.exp(-melo_logits(genome)))


def melo_payoffs(genome: MEloGenome, name: str = "mElo") -> SymmetricMatrixGame:
    """Zero-sum mElo game ``2 * sigmoid(logits) - 1``, antisymmetric in ``(-1, 1)``."""
    upper = np.triu(np.tanh(0.5 * melo_logits(genome)), 1)
    return SymmetricMatrixGame(upper - upper.T, name=name)

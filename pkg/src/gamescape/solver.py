"""Zero-sum Nash equilibria, Double Oracle, and the complexity experiment."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal, Sequence

import numpy as np
from scipy.optimize import linprog

from gamescape.features import GraphFeatureVector, feature_vector, spearman
from gamescape.games import SymmetricMatrixGame
from gamescape.response_graph import AlphaRankParams

_LP_OPTIONS = {"primal_feasibility_tolerance": 1e-10, "dual_feasibility_tolerance": 1e-10}


class SolverError(ArithmeticError):
    pass


@dataclass(frozen=True, eq=False)
class NashSolution:
    row_strategy: np.ndarray
    col_strategy: np.ndarray
    value: float


def _maximin(matrix: np.ndarray) -> tuple[np.ndarray, float]:
    """Row player's maximin mixture: max v s.t. x^T M >= v, x on the simplex."""
    n, m = matrix.shape
    c = np.zeros(n + 1)
    c[-1] = -1.0
    a_ub = np.hstack([-matrix.T, np.ones((m, 1))])
    a_eq = np.zeros((1, n + 1))
    a_eq[0, :n] = 1.0
    res = linprog(c, A_ub=a_ub, b_ub=np.zeros(m), A_eq=a_eq, b_eq=[1.0],
                  bounds=[(0, None)] * n + [(None, None)], method="highs-ds",
                  options=_LP_OPTIONS)
    if res.status != 0:
        raise SolverError(f"maximin LP failed: {res.message}")
    x = np.clip(res.x[:n], 0.0, None)
    x /= x.sum()
    return x, float(res.x[-1])


def zero_sum_nash(matrix) -> NashSolution:
    """Nash equilibrium of the zero-sum game with row payoffs ``matrix``."""
    matrix = np.asarray(getattr(matrix, "matrix", matrix), dtype=float)
    if matrix.ndim != 2 or not np.all(np.isfinite(matrix)):
        raise ValueError("zero_sum_nash needs a finite 2-D payoff matrix")
    x, value = _maximin(matrix)
    y, neg_value = _maximin(-matrix.T)
    if abs(value + neg_value) > 1e-8 * max(1.0, float(np.abs(matrix).max())):
        raise SolverError(f"minimax identity violated: {value} vs {-neg_value}")
    return NashSolution(row_strategy=x, col_strategy=y, value=float(x @ matrix @ y))


def exploitability(matrix, row_strategy, col_strategy) -> float:
    """Largest gain either player gets from a pure deviation."""
    matrix = np.asarray(matrix, dtype=float)
    value = row_strategy @ matrix @ col_strategy
    row_gain = float((matrix @ col_strategy).max() - value)
    col_gain = float(value - (row_strategy @ matrix).min())
    return max(row_gain, col_gain, 0.0)


def best_response(matrix, opponent_mixture, player: Literal["row", "col"] = "row",
                  tol: float = 1e-9) -> int:
    """Lowest-index pure best response over the full game.

    Expected payoffs within ``tol * max|M|`` of the best count as ties.
    """
    matrix = np.asarray(matrix, dtype=float)
    mixture = np.asarray(opponent_mixture, dtype=float)
    if player == "row":
        utility = matrix @ mixture
    elif player == "col":
        utility = -(mixture @ matrix)
    else:
        raise ValueError(f"player must be 'row' or 'col', got {player!r}")
    slack = tol * max(1.0, float(np.abs(matrix).max())) if matrix.size else tol
    return int(np.flatnonzero(utility >= utility.max() - slack)[0])


@dataclass(frozen=True, eq=False)
class DoubleOracleTrace:
    """Result of one Double Oracle run.

    ``iterations`` counts restricted-solve rounds, including the final round in
    which no best response is new; ``expansions`` excludes that round.
    """

    iterations: int
    supports: list[tuple[tuple[int, ...], tuple[int, ...]]]
    solution: NashSolution
    seed: int | None
    initial: tuple[int, int]
    exploitability: float

    @property
    def expansions(self) -> int:
        return self.iterations - 1


def _restricted_nash(matrix: np.ndarray, rows: list[int], cols: list[int]):
    sub = matrix[np.ix_(rows, cols)]
    if rows == cols and np.array_equal(sub, -sub.T):
        # symmetric restricted game: the row maximin is also a column equilibrium
        x, _ = _maximin(sub)
        return x, x
    sol = zero_sum_nash(sub)
    return sol.row_strategy, sol.col_strategy


def double_oracle(game, seed: int | None = 0, initial: tuple[int, int] | None = None,
                  shared_start: bool = True, max_rounds: int | None = None) -> DoubleOracleTrace:
    """Double Oracle on a two-player zero-sum game given by its row payoffs.

    Both players start from a single seeded strategy (the same one when
    ``shared_start``; drawn independently otherwise). Each round solves the
    restricted game, then adds each player's full-game best response to the
    opponent's restricted equilibrium; the run ends when nothing is added.
    """
    matrix = np.asarray(getattr(game, "matrix", game), dtype=float)
    n_rows, n_cols = matrix.shape
    if initial is None:
        rng = np.random.default_rng(seed)
        if shared_start and n_rows == n_cols:
            start = int(rng.integers(n_rows))
            initial = (start, start)
        else:
            initial = (int(rng.integers(n_rows)), int(rng.integers(n_cols)))
    rows, cols = [initial[0]], [initial[1]]
    max_rounds = max_rounds or (n_rows + n_cols)
    supports = []
    rounds = 0
    while True:
        rounds += 1
        supports.append((tuple(rows), tuple(cols)))
        x_sub, y_sub = _restricted_nash(matrix, rows, cols)
        x = np.zeros(n_rows)
        x[rows] = x_sub
        y = np.zeros(n_cols)
        y[cols] = y_sub
        br_row = best_response(matrix, y, "row")
        br_col = best_response(matrix, x, "col")
        added = False
        if br_row not in rows:
            rows = sorted(rows + [br_row])
            added = True
        if br_col not in cols:
            cols = sorted(cols + [br_col])
            added = True
        if not added:
            break
        if rounds >= max_rounds:
            raise SolverError(f"Double Oracle exceeded {max_rounds} rounds")
    solution = NashSolution(row_strategy=x, col_strategy=y, value=float(x @ matrix @ y))
    return DoubleOracleTrace(iterations=rounds, supports=supports, solution=solution,
                             seed=seed, initial=initial,
                             exploitability=exploitability(matrix, x, y))


@dataclass(frozen=True, eq=False)
class ComplexityResult:
    names: list[str]
    sizes: np.ndarray
    iterations: np.ndarray          # (games, trials), raw round counts
    features: list[GraphFeatureVector]
    normalize_iters: bool
    initials: np.ndarray            # (games, trials, 2) row and column starts
    correlations: dict[str, tuple[float, float]] = field(default_factory=dict)

    @property
    def scores(self) -> np.ndarray:
        """Per-trial iteration counts, divided by strategy count when normalizing."""
        if self.normalize_iters:
            return self.iterations / self.sizes[:, None]
        return self.iterations.astype(float)

    @property
    def mean(self) -> np.ndarray:
        return self.scores.mean(axis=1)

    @property
    def std(self) -> np.ndarray:
        return self.scores.std(axis=1)


CORRELATED_FEATURES = ("entropy", "cycles3", "in_mean")


def complexity_experiment(games: Sequence[SymmetricMatrixGame], trials: int = 10, seed: int = 0,
                          normalize_iters: bool = True, normalize_graph: bool = True,
                          params: AlphaRankParams | None = None,
                          correlate: Sequence[str] = CORRELATED_FEATURES,
                          shared_start: bool = True) -> ComplexityResult:
    """Double Oracle iteration statistics against response-graph features.

    Trial ``t`` of game ``g`` draws its start from ``default_rng([seed, g, t])``:
    one strategy for both players when ``shared_start``, else one each.
    """
    names, sizes, iters, feats, initials = [], [], [], [], []
    for g, game in enumerate(games):
        names.append(game.name)
        sizes.append(game.n)
        counts, starts = [], []
        for t in range(trials):
            rng = np.random.default_rng([seed, g, t])
            if shared_start:
                start = int(rng.integers(game.n))
                initial = (start, start)
            else:
                initial = (int(rng.integers(game.n)), int(rng.integers(game.n)))
            counts.append(double_oracle(game, seed=None, initial=initial).iterations)
            starts.append(initial)
        iters.append(counts)
        initials.append(starts)
        feats.append(feature_vector(game, params, normalize=normalize_graph))
    result = ComplexityResult(names=names, sizes=np.array(sizes, dtype=float),
                              iterations=np.array(iters, dtype=float), features=feats,
                              normalize_iters=normalize_iters,
                              initials=np.array(initials, dtype=int).reshape(len(names), trials, 2))
    mean = result.mean
    for feature in correlate:
        column = np.array([getattr(f, feature) for f in feats])
        try:
            result.correlations[feature] = spearman(column, mean)
        except ValueError:
            result.correlations[feature] = (float("nan"), float("nan"))
    return result

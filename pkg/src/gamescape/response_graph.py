"""alpha-Rank response graphs and their stationary distributions.

Nodes are pure strategy profiles (multi-population) or strategies
(single-population, symmetric two-player games only). Edges connect profiles
that differ by one player's unilateral deviation, with the transition
probability determined by that player's payoff change.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from gamescape.games import Game, GameError, PayoffTensor, SymmetricMatrixGame

DIRECT_SOLVE_MAX_NODES = 2000


@dataclass(frozen=True)
class AlphaRankParams:
    """Evolutionary model parameters.

    ``mode="infinite"`` uses the infinite-alpha limit: improving deviations get
    ``eta (1 - epsilon)``, worsening ones ``eta epsilon``, ties ``eta / 2``.
    ``mode="finite"`` evaluates the fixation-probability form with selection
    pressure ``alpha`` and population size ``m``.

    ``population`` is ``"single"`` or ``"multi"``; ``None`` picks single for
    :class:`SymmetricMatrixGame` inputs and multi otherwise. ``fitness`` selects
    the single-population payoff comparison: ``"pairwise"`` uses
    ``M(sigma, s) - M(s, sigma)``, ``"resident"`` uses ``M(sigma, s) - M(s, s)``.
    """

    mode: Literal["finite", "infinite"] = "infinite"
    alpha: float = 0.2
    m: int = 50
    epsilon: float = 1e-10
    population: Literal["single", "multi"] | None = None
    fitness: Literal["pairwise", "resident"] = "pairwise"

    def __post_init__(self):
        if self.mode not in ("finite", "infinite"):
            raise ValueError(f"unknown alpha-Rank mode {self.mode!r}")
        if not 0 < self.epsilon < 0.5:
            raise ValueError(f"epsilon must lie in (0, 0.5), got {self.epsilon}")
        if self.alpha <= 0:
            raise ValueError(f"alpha must be positive, got {self.alpha}")
        if int(self.m) != self.m or self.m < 2:
            raise ValueError(f"population size m must be an integer >= 2, got {self.m}")
        if self.population not in (None, "single", "multi"):
            raise ValueError(f"unknown population model {self.population!r}")
        if self.fitness not in ("pairwise", "resident"):
            raise ValueError(f"unknown single-population fitness {self.fitness!r}")

    def to_dict(self) -> dict:
        return {"mode": self.mode, "alpha": self.alpha, "m": self.m,
                "epsilon": self.epsilon, "population": self.population,
                "fitness": self.fitness}


@dataclass(frozen=True, eq=False)
class ResponseGraph:
    """Weighted response graph.

    Attributes:
      nodes: profiles (tuples of strategy indices) or single strategy indices.
      transitions: row-stochastic matrix ``E``.
      improvement: boolean adjacency, ``s -> sigma`` iff the deviator strictly gains.
      payoff_gain: deviator's payoff change per edge (0 where no edge exists).
      eta: reciprocal of the number of unilateral deviations per node.
      max_degree: number of unilateral deviations per node.
    """

    nodes: tuple
    transitions: np.ndarray
    improvement: np.ndarray
    payoff_gain: np.ndarray
    eta: float
    max_degree: int
    population: str
    params: AlphaRankParams = field(default_factory=AlphaRankParams)

    @property
    def num_nodes(self) -> int:
        return len(self.nodes)

    def node_label(self, index: int) -> str:
        node = self.nodes[index]
        if isinstance(node, tuple):
            return ",".join(str(s) for s in node)
        return str(node)


@dataclass(frozen=True, eq=False)
class AlphaRankDistribution:
    pi: np.ndarray
    residual: float


def _finite_transition(gain: np.ndarray, eta: float, alpha: float, m: int) -> np.ndarray:
    """Fixation-probability transition, evaluated without overflow."""
    x = alpha * gain
    out = np.full(gain.shape, eta / m)
    pos = x > 0
    neg = x < 0
    # (1 - e^{-x}) / (1 - e^{-mx})
    out[pos] = eta * np.expm1(-x[pos]) / np.expm1(-m * x[pos])
    # same ratio rewritten as e^{(m-1)x} (e^x - 1) / (e^{mx} - 1) for x < 0
    xn = x[neg]
    out[neg] = eta * np.exp((m - 1) * xn) * np.expm1(xn) / np.expm1(m * xn)
    return out


def _edge_weights(gain: np.ndarray, edges: np.ndarray, eta: float,
                  params: AlphaRankParams) -> np.ndarray:
    weights = np.zeros(gain.shape)
    g = gain[edges]
    if params.mode == "infinite":
        w = np.where(g > 0, eta * (1.0 - params.epsilon),
                     np.where(g < 0, eta * params.epsilon, eta / 2.0))
    else:
        w = _finite_transition(g, eta, params.alpha, int(params.m))
    weights[edges] = w
    return weights


def _close_rows(weights: np.ndarray) -> np.ndarray:
    n = weights.shape[0]
    off = weights.copy()
    off[np.diag_indices(n)] = 0.0
    off[np.diag_indices(n)] = 1.0 - off.sum(axis=1)
    return off


def _single_population(matrix: np.ndarray, params: AlphaRankParams):
    n = matrix.shape[0]
    if n < 2:
        raise GameError("response graph undefined: a single strategy has no deviations")
    if params.fitness == "pairwise":
        # gain[s, sigma] = M(sigma, s) - M(s, sigma)
        gain = matrix.T - matrix
    else:
        gain = matrix.T - np.diag(matrix)[:, None]
    edges = ~np.eye(n, dtype=bool)
    gain = np.where(edges, gain, 0.0)
    return tuple(range(n)), gain, edges, n - 1


def _multi_population(tensor: PayoffTensor):
    counts = tensor.strategy_counts
    max_degree = sum(c - 1 for c in counts)
    if max_degree == 0:
        raise GameError("response graph undefined: every player has a single strategy")
    nodes = tuple(np.ndindex(*counts))
    size = len(nodes)
    flat = np.arange(size).reshape(counts)
    gain = np.zeros((size, size))
    edges = np.zeros((size, size), dtype=bool)
    for k, count in enumerate(counts):
        if count < 2:
            continue
        payoff = tensor.payoffs[k].reshape(-1)
        # move player k's axis last: each row of ``groups`` lists profiles that
        # differ only in player k's strategy
        groups = np.moveaxis(flat, k, -1).reshape(-1, count)
        src = np.repeat(groups, count, axis=1).reshape(-1)
        dst = np.tile(groups, (1, count)).reshape(-1)
        keep = src != dst
        src, dst = src[keep], dst[keep]
        edges[src, dst] = True
        gain[src, dst] = payoff[dst] - payoff[src]
    return nodes, gain, edges, max_degree


def build_response_graph(game: Game, params: AlphaRankParams | None = None) -> ResponseGraph:
    """Builds the response graph of ``game`` under ``params``."""
    params = params or AlphaRankParams()
    population = params.population
    if population is None:
        population = "single" if isinstance(game, SymmetricMatrixGame) else "multi"
    if population == "single":
        if isinstance(game, SymmetricMatrixGame):
            matrix = game.matrix
        else:
            if not game.symmetric:
                raise GameError(f"{game.name}: single-population response graphs need a "
                                "symmetric two-player game")
            matrix = game.as_symmetric().matrix
        nodes, gain, edges, max_degree = _single_population(matrix, params)
    else:
        tensor = game.to_tensor() if isinstance(game, SymmetricMatrixGame) else game
        nodes, gain, edges, max_degree = _multi_population(tensor)
    eta = 1.0 / max_degree
    weights = _edge_weights(gain, edges, eta, params)
    transitions = _close_rows(weights)
    transitions.setflags(write=False)
    improvement = edges & (gain > 0)
    improvement.setflags(write=False)
    gain.setflags(write=False)
    return ResponseGraph(nodes=nodes, transitions=transitions, improvement=improvement,
                         payoff_gain=gain, eta=eta, max_degree=max_degree,
                         population=population, params=params)


def improvement_digraph(graph: ResponseGraph) -> np.ndarray:
    """Boolean adjacency of strictly payoff-improving deviations."""
    return graph.improvement


def gth_stationary(transitions: np.ndarray) -> np.ndarray:
    """Stationary distribution by Grassmann-Taksar-Heyman state reduction.

    Subtraction-free, so it stays accurate for nearly decomposable chains such
    as infinite-alpha graphs with tiny ``epsilon``.
    """
    p = np.array(transitions, dtype=float, copy=True)
    n = p.shape[0]
    scales = np.zeros(n)
    for k in range(n - 1, 0, -1):
        s = p[k, :k].sum()
        if s <= 0:
            raise ArithmeticError(f"state {k} has no outflow to lower states; chain is "
                                  "not irreducible")
        scales[k] = s
        p[:k, :k] += np.outer(p[:k, k], p[k, :k] / s)
    pi = np.zeros(n)
    pi[0] = 1.0
    for k in range(1, n):
        pi[k] = pi[:k] @ p[:k, k] / scales[k]
    return pi / pi.sum()


def power_stationary(transitions: np.ndarray, tol: float = 1e-13,
                     max_iter: int = 1_000_000) -> np.ndarray:
    n = transitions.shape[0]
    pi = np.full(n, 1.0 / n)
    for _ in range(max_iter):
        nxt = pi @ transitions
        nxt /= nxt.sum()
        if np.abs(nxt - pi).sum() <= tol:
            return nxt
        pi = nxt
    raise ArithmeticError(f"power iteration did not converge in {max_iter} steps; "
                          "the chain is likely not ergodic")


def stationary_distribution(graph: ResponseGraph | np.ndarray,
                            method: Literal["auto", "direct", "power"] = "auto") -> AlphaRankDistribution:
    """alpha-Rank distribution: the stationary ``pi`` with ``pi^T E = pi^T``."""
    transitions = graph.transitions if isinstance(graph, ResponseGraph) else np.asarray(graph)
    n = transitions.shape[0]
    if method == "auto":
        method = "direct" if n <= DIRECT_SOLVE_MAX_NODES else "power"
    if method == "direct":
        pi = gth_stationary(transitions)
    elif method == "power":
        pi = power_stationary(transitions)
    else:
        raise ValueError(f"unknown stationary solver {method!r}")
    residual = float(np.abs(pi @ transitions - pi).max())
    pi.setflags(write=False)
    return AlphaRankDistribution(pi=pi, residual=residual)


def alpharank(game: Game, params: AlphaRankParams | None = None) -> tuple[ResponseGraph, AlphaRankDistribution]:
    graph = build_response_graph(game, params)
    return graph, stationary_distribution(graph)


def to_dot(graph: ResponseGraph, pi: np.ndarray | None = None, name: str = "response_graph") -> str:
    """DOT text: one node per profile, improvement edges weighted by ``E``."""
    lines = [f'digraph "{name}" {{']
    for i in range(graph.num_nodes):
        label = graph.node_label(i)
        if pi is not None:
            label = f"{label}\\npi={pi[i]:.6f}"
        lines.append(f'  n{i} [label="{label}"];')
    for s, t in zip(*np.nonzero(graph.improvement)):
        lines.append(f"  n{s} -> n{t} [weight={float(graph.transitions[s, t])!r}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def profile_count(game: Game) -> int:
    if isinstance(game, SymmetricMatrixGame):
        return game.n
    return math.prod(game.strategy_counts)

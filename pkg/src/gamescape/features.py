"""Response-graph feature vectors and rank correlation."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats

from gamescape.games import Game
from gamescape.response_graph import AlphaRankParams, alpharank

FEATURE_NAMES = (
    "entropy", "cycles3",
    "in_mean", "in_median", "in_std", "in_skew", "in_kurt",
    "out_mean", "out_median", "out_std", "out_skew", "out_kurt",
)

MOMENT_CONVENTION = "population std; standardized skew; non-excess kurtosis; 0 when variance is 0"


@dataclass(frozen=True, eq=False)
class GraphFeatureVector:
    name: str
    values: np.ndarray
    normalized: bool = True

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.shape != (len(FEATURE_NAMES),):
            raise ValueError(f"feature vector must have {len(FEATURE_NAMES)} entries")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def __getattr__(self, item):
        if item in FEATURE_NAMES:
            return float(self.values[FEATURE_NAMES.index(item)])
        raise AttributeError(item)

    @property
    def entropy_norm(self) -> float:
        return float(self.values[0])

    @property
    def cycles3_norm(self) -> float:
        return float(self.values[1])

    def as_dict(self) -> dict[str, float]:
        return dict(zip(FEATURE_NAMES, map(float, self.values)))


def entropy(pi) -> float:
    pi = np.asarray(pi, dtype=float)
    nz = pi[pi > 0]
    return float(-(nz * np.log(nz)).sum())


def alpharank_entropy_norm(pi) -> float:
    """Entropy of ``pi`` divided by the entropy of the uniform distribution."""
    n = len(pi)
    if n < 2:
        raise ValueError("normalized entropy needs at least two nodes")
    return min(1.0, max(0.0, entropy(pi) / math.log(n)))


def count_3cycles(adjacency) -> float:
    """Directed 3-cycles, ``trace(A^3) / 3``."""
    a = np.asarray(adjacency, dtype=float)
    return float(np.einsum("ij,ji->", a @ a, a)) / 3.0


def cycles3_norm(adjacency) -> float:
    """3-cycle count relative to the complete digraph on the same nodes."""
    n = np.asarray(adjacency).shape[0]
    if n < 3:
        return 0.0
    return count_3cycles(adjacency) / (n * (n - 1) * (n - 2) / 3.0)


def summary_stats(values, mean: float | None = None) -> np.ndarray:
    """Mean, median, std, skew and kurtosis with population moments.

    ``mean`` may be supplied when it is known exactly (degree sums).
    """
    x = np.asarray(values, dtype=float)
    mean = float(x.mean()) if mean is None else float(mean)
    centered = x - mean
    var = float(np.mean(centered ** 2))
    std = math.sqrt(var)
    if var <= 1e-300 or std <= 1e-15 * max(1.0, abs(mean)):
        skew = kurt = 0.0
        std = 0.0
    else:
        skew = float(np.mean(centered ** 3)) / std ** 3
        kurt = float(np.mean(centered ** 4)) / var ** 2
    return np.array([mean, float(np.median(x)), std, skew, kurt])


def degree_stats_norm(adjacency, max_degree: int | None) -> np.ndarray:
    """In-degree then out-degree summary stats of ``adjacency / max_degree``.

    Pass ``max_degree=None`` for raw (unnormalized) degrees.
    """
    a = np.asarray(adjacency, dtype=float)
    scale = 1.0 if max_degree is None else float(max_degree)
    if scale <= 0:
        raise ValueError(f"max_degree must be positive, got {max_degree}")
    indeg = a.sum(axis=0) / scale
    outdeg = a.sum(axis=1) / scale
    # both directions share the edge total, so their means agree exactly
    mean = float(a.sum()) / (a.shape[0] * scale)
    return np.concatenate([summary_stats(indeg, mean), summary_stats(outdeg, mean)])


def feature_vector(game: Game, params: AlphaRankParams | None = None,
                   normalize: bool = True, name: str | None = None) -> GraphFeatureVector:
    """Builds the response graph and assembles the 12 features in fixed order."""
    graph, dist = alpharank(game, params)
    return features_from_graph(graph, dist.pi, normalize=normalize,
                               name=name or getattr(game, "name", "game"))


def features_from_graph(graph, pi, normalize: bool = True, name: str = "game") -> GraphFeatureVector:
    adj = graph.improvement
    if normalize:
        head = [alpharank_entropy_norm(pi), cycles3_norm(adj)]
        degrees = degree_stats_norm(adj, graph.max_degree)
    else:
        head = [entropy(pi), count_3cycles(adj)]
        degrees = degree_stats_norm(adj, None)
    return GraphFeatureVector(name=name, values=np.concatenate([head, degrees]),
                              normalized=normalize)


def spearman(x, y) -> tuple[float, float]:
    """Spearman rank correlation (average ranks for ties) and two-sided p-value.

    The p-value uses the Student-t approximation with ``n - 2`` degrees of freedom.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("spearman needs two 1-D sequences of equal length")
    n = len(x)
    if n < 3:
        raise ValueError(f"spearman needs at least 3 observations, got {n}")
    rx = stats.rankdata(x)
    ry = stats.rankdata(y)
    dx = rx - rx.mean()
    dy = ry - ry.mean()
    sxx = float(dx @ dx)
    syy = float(dy @ dy)
    if sxx == 0 or syy == 0:
        raise ValueError("spearman is undefined when an input has zero rank variance")
    rho = float(dx @ dy) / math.sqrt(sxx * syy)
    rho = max(-1.0, min(1.0, rho))
    if abs(rho) == 1.0:
        return rho, 0.0
    t = rho * math.sqrt((n - 2) / (1.0 - rho * rho))
    p = 2.0 * float(stats.t.sf(abs(t), n - 2))
    return rho, p


def simple_cycle_histogram(adjacency, max_length: int = 6, max_nodes: int = 60) -> dict[int, int]:
    """Counts simple directed cycles of each length up to ``max_length``.

    Exhaustive depth-bounded search, so only offered for small graphs.
    """
    a = np.asarray(adjacency, dtype=bool)
    n = a.shape[0]
    if n > max_nodes:
        raise ValueError(f"cycle enumeration is limited to {max_nodes} nodes, got {n}")
    succ = [np.flatnonzero(a[i]) for i in range(n)]
    counts = {length: 0 for length in range(2, max_length + 1)}

    # each cycle is counted once, rooted at its smallest node
    def extend(root: int, node: int, depth: int, on_path: set[int]):
        for nxt in succ[node]:
            if nxt == root and depth >= 2:
                counts[depth] += 1
            elif nxt > root and nxt not in on_path and depth < max_length:
                on_path.add(nxt)
                extend(root, nxt, depth + 1, on_path)
                on_path.remove(nxt)

    for root in range(n):
        extend(root, root, 1, {root})
    return counts

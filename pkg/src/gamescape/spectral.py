"""Spectral clustering of response graphs and their contraction."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from gamescape.response_graph import ResponseGraph

ZERO_EIGENVALUE_TOL = 1e-8
_TIE_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class SpectralEmbedding:
    coordinates: np.ndarray
    eigenvalues: np.ndarray
    num_zero: int


@dataclass(frozen=True, eq=False)
class Dendrogram:
    """Merge history of average-linkage agglomeration.

    ``merges[t] = (a, b, distance, size)`` in scipy linkage convention: cluster
    ids below ``n`` are leaves, id ``n + t`` is the cluster formed at step t.
    """

    n: int
    merges: np.ndarray

    def labels(self, k: int) -> np.ndarray:
        """Flat labels after ``n - k`` merges, numbered by smallest member."""
        if not 1 <= k <= self.n:
            raise ValueError(f"cluster count must lie in [1, {self.n}], got {k}")
        members = {i: [i] for i in range(self.n)}
        for step in range(self.n - k):
            a, b = int(self.merges[step, 0]), int(self.merges[step, 1])
            members[self.n + step] = members.pop(a) + members.pop(b)
        labels = np.empty(self.n, dtype=int)
        groups = sorted(members.values(), key=min)
        for cid, group in enumerate(groups):
            labels[group] = cid
        return labels


@dataclass(frozen=True, eq=False)
class Clustering:
    labels: np.ndarray
    k: int

    def members(self) -> list[np.ndarray]:
        return [np.flatnonzero(self.labels == c) for c in range(self.k)]


@dataclass(frozen=True, eq=False)
class ContractedGraph:
    """Cluster-level graph; ``weights[a, b]`` sums ``E`` over member pairs."""

    clusters: list[np.ndarray]
    weights: np.ndarray
    mass: np.ndarray

    @property
    def k(self) -> int:
        return len(self.clusters)

    def improvement(self) -> np.ndarray:
        """Net-flow digraph: ``a -> b`` iff more mass flows a->b than b->a."""
        net = self.weights - self.weights.T
        adj = net > 0
        np.fill_diagonal(adj, False)
        return adj


def bibliometric_symmetrize(adjacency, zero_diagonal: bool = True) -> np.ndarray:
    """``A A^T + A^T A``: co-citation plus co-reference similarity."""
    a = np.asarray(adjacency, dtype=float)
    sym = a @ a.T + a.T @ a
    sym = 0.5 * (sym + sym.T)
    if zero_diagonal:
        np.fill_diagonal(sym, 0.0)
    return sym


def laplacian(sym: np.ndarray) -> np.ndarray:
    return np.diag(sym.sum(axis=1)) - sym


def _first_significant_index(vec: np.ndarray) -> int:
    nz = np.flatnonzero(np.abs(vec) > 1e-12)
    return int(nz[0]) if nz.size else len(vec)


def spectral_embed(sym, d: int = 2) -> SpectralEmbedding:
    """Embeds nodes with the eigenvectors of the smallest nonzero eigenvalues of ``D - A``.

    Each eigenvector is sign-fixed so that its largest-magnitude entry is positive.
    """
    sym = np.asarray(sym, dtype=float)
    n = sym.shape[0]
    if not 1 <= d <= n - 1:
        raise ValueError(f"embedding dimension must lie in [1, {n - 1}], got {d}")
    values, vectors = np.linalg.eigh(laplacian(sym))
    scale = max(1.0, float(np.abs(values).max()))
    values = np.where(np.abs(values) <= ZERO_EIGENVALUE_TOL * scale, 0.0, values)
    order = sorted(range(n), key=lambda i: (round(values[i] / scale, 10),
                                            _first_significant_index(vectors[:, i])))
    values, vectors = values[order], vectors[:, order]
    num_zero = int(np.sum(values == 0.0))
    if num_zero + d > n:
        raise ValueError(f"only {n - num_zero} nonzero eigenvalues; cannot embed in {d} "
                         "dimensions")
    coords = vectors[:, num_zero:num_zero + d].copy()
    for j in range(d):
        col = coords[:, j]
        pivot = int(np.argmax(np.abs(col)))
        if col[pivot] < 0:
            coords[:, j] = -col
    return SpectralEmbedding(coordinates=coords, eigenvalues=values, num_zero=num_zero)


def average_linkage(coordinates) -> Dendrogram:
    """Average-linkage agglomeration on Euclidean distances.

    Ties in merge distance go to the cluster pair with the lexicographically
    smallest ``(min member index, max member index)`` of their smallest members.
    """
    x = np.asarray(coordinates, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    n = x.shape[0]
    diff = x[:, None, :] - x[None, :, :]
    dist = np.sqrt((diff ** 2).sum(axis=2))
    np.fill_diagonal(dist, np.inf)
    size = np.ones(n)
    ident = list(range(n))
    first = np.arange(n)
    alive = np.ones(n, dtype=bool)
    merges = np.zeros((max(n - 1, 0), 4))
    for step in range(n - 1):
        live = np.flatnonzero(alive)
        block = dist[np.ix_(live, live)]
        best = block.min()
        tol = _TIE_TOL * max(1.0, abs(best))
        cand_i, cand_j = np.nonzero(block <= best + tol)
        keep = cand_i < cand_j
        cand_i, cand_j = live[cand_i[keep]], live[cand_j[keep]]
        lo = np.minimum(first[cand_i], first[cand_j])
        hi = np.maximum(first[cand_i], first[cand_j])
        pick = np.lexsort((hi, lo))[0]
        i, j = int(cand_i[pick]), int(cand_j[pick])
        if first[j] < first[i]:
            i, j = j, i
        merges[step] = (min(ident[i], ident[j]), max(ident[i], ident[j]),
                        dist[i, j], size[i] + size[j])
        # Lance-Williams update for average linkage; slot i becomes the merge
        new = (size[i] * dist[i] + size[j] * dist[j]) / (size[i] + size[j])
        dist[i, :] = new
        dist[:, i] = new
        dist[i, i] = np.inf
        dist[j, :] = np.inf
        dist[:, j] = np.inf
        size[i] += size[j]
        first[i] = min(first[i], first[j])
        alive[j] = False
        ident[i] = n + step
    return Dendrogram(n=n, merges=merges)


def cluster(coordinates, k: int) -> Clustering:
    n = np.asarray(coordinates).shape[0]
    if not 1 <= k <= n:
        raise ValueError(f"cluster count must lie in [1, {n}], got {k}")
    return Clustering(labels=average_linkage(coordinates).labels(k), k=k)


def distortion(coordinates, labels: np.ndarray) -> float:
    """Sum of squared distances from points to their cluster centroid."""
    x = np.asarray(coordinates, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    total = 0.0
    for c in np.unique(labels):
        pts = x[labels == c]
        total += float(((pts - pts.mean(axis=0)) ** 2).sum())
    return total


def pham_statistic(coordinates, k_max: int, dendrogram: Dendrogram | None = None) -> np.ndarray:
    """``f(K)`` for ``K = 1..k_max`` (index 0 holds K = 1).

    ``f(K) = S_K / (a_K S_{K-1})`` with ``a_2 = 1 - 3 / (4 d)`` and
    ``a_K = a_{K-1} + (1 - a_{K-1}) / 6``; ``f(1) = 1`` and ``f(K) = 1``
    whenever ``S_{K-1} = 0``.
    """
    x = np.asarray(coordinates, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    dims = x.shape[1]
    dendrogram = dendrogram or average_linkage(x)
    f = np.ones(k_max)
    prev = distortion(x, dendrogram.labels(1))
    weight = 1.0 - 3.0 / (4.0 * dims)
    for k in range(2, k_max + 1):
        if k > 2:
            weight = weight + (1.0 - weight) / 6.0
        current = distortion(x, dendrogram.labels(k))
        f[k - 1] = 1.0 if prev <= 0 else current / (weight * prev)
        prev = current
    return f


def select_cluster_count(coordinates, k_max: int | None = None, threshold: float = 0.85,
                         dendrogram: Dendrogram | None = None) -> int:
    """Pham-Dimov-Nguyen choice: argmin ``f(K)`` among ``f(K) < threshold``, else 1."""
    n = np.asarray(coordinates).shape[0]
    if n < 2:
        return 1
    k_max = min(n - 1, 10) if k_max is None else min(k_max, n)
    f = pham_statistic(coordinates, k_max, dendrogram)
    eligible = np.flatnonzero(f < threshold)
    if eligible.size == 0:
        return 1
    return int(eligible[np.argmin(f[eligible])]) + 1


def contract(graph: ResponseGraph | np.ndarray, clustering: Clustering,
             pi: np.ndarray | None = None) -> ContractedGraph:
    """Fuses each cluster into one node, summing transition mass and pi mass."""
    transitions = graph.transitions if isinstance(graph, ResponseGraph) else np.asarray(graph)
    indicator = np.zeros((transitions.shape[0], clustering.k))
    indicator[np.arange(transitions.shape[0]), clustering.labels] = 1.0
    weights = indicator.T @ transitions @ indicator
    if pi is None:
        mass = np.full(clustering.k, np.nan)
    else:
        mass = indicator.T @ np.asarray(pi)
    return ContractedGraph(clusters=clustering.members(), weights=weights, mass=mass)


@dataclass(frozen=True, eq=False)
class SpectralAnalysis:
    symmetrized: np.ndarray
    embedding: SpectralEmbedding
    dendrogram: Dendrogram
    clustering: Clustering
    contracted: ContractedGraph


def analyze_graph(graph: ResponseGraph, pi: np.ndarray | None = None, d: int = 2,
                  k: int | None = None, k_max: int | None = None) -> SpectralAnalysis:
    """Symmetrize, embed, cluster (selecting ``k`` if not given) and contract."""
    sym = bibliometric_symmetrize(graph.transitions)
    n = sym.shape[0]
    d = min(d, n - 1)
    embedding = spectral_embed(sym, d)
    dendrogram = average_linkage(embedding.coordinates)
    if k is None:
        # the selection statistic is degenerate on three or fewer points
        k = n if n <= 3 else select_cluster_count(embedding.coordinates, k_max,
                                                  dendrogram=dendrogram)
    clustering = Clustering(labels=dendrogram.labels(k), k=k)
    contracted = contract(graph, clustering, pi)
    return SpectralAnalysis(sym, embedding, dendrogram, clustering, contracted)


def contracted_to_dot(contracted: ContractedGraph, name: str = "contracted",
                      node_labels: list[str] | None = None) -> str:
    lines = [f'digraph "{name}" {{']
    for c, members in enumerate(contracted.clusters):
        label = node_labels[c] if node_labels else "{" + ",".join(map(str, members)) + "}"
        mass = contracted.mass[c]
        if np.isfinite(mass):
            label = f"{label}\\npi={mass:.6f}"
        lines.append(f'  c{c} [label="{label}"];')
    for a in range(contracted.k):
        for b in range(contracted.k):
            if a != b and contracted.weights[a, b] > 0:
                lines.append(f"  c{a} -> c{b} [weight={float(contracted.weights[a, b])!r}];")
    lines.append("}")
    return "\n".join(lines) + "\n"

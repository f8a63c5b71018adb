"""CMA-ES search over mElo genomes toward target landscape coordinates."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Sequence

import numpy as np

from gamescape.features import feature_vector
from gamescape.games import SymmetricMatrixGame
from gamescape.landscape import Landscape, project
from gamescape.melo import MEloGenome, melo_payoffs
from gamescape.response_graph import AlphaRankParams

DEFAULT_RANK = 5


class CmaEsError(ArithmeticError):
    """Raised when the objective returns a non-finite value."""

    def __init__(self, message: str, candidate: np.ndarray):
        super().__init__(message)
        self.candidate = candidate


@dataclass(frozen=True)
class CmaEsConfig:
    """Search settings; ``population_size=None`` picks ``4 + floor(3 ln d)``."""

    population_size: int | None = None
    initial_step: float = 0.5
    max_iterations: int = 20
    seed: int = 0
    target_f: float | None = None

    def __post_init__(self):
        if self.population_size is not None and self.population_size < 2:
            raise ValueError(f"population_size must be >= 2, got {self.population_size}")
        if not self.initial_step > 0:
            raise ValueError(f"initial_step must be > 0, got {self.initial_step}")
        if self.max_iterations < 1:
            raise ValueError(f"max_iterations must be >= 1, got {self.max_iterations}")

    def lam(self, dim: int) -> int:
        if self.population_size is not None:
            return self.population_size
        return 4 + int(math.floor(3 * math.log(dim))) if dim > 1 else 4

    def to_dict(self, dim: int | None = None) -> dict:
        doc = {"population_size": self.population_size, "initial_step": self.initial_step,
               "max_iterations": self.max_iterations, "seed": self.seed,
               "target_f": self.target_f}
        if dim is not None:
            doc["effective_population_size"] = self.lam(dim)
        return doc


class CmaEsResult(NamedTuple):
    best_x: np.ndarray
    best_f: float
    history: list[float]


def cma_es_minimize(objective: Callable[[np.ndarray], float], x0, config: CmaEsConfig = CmaEsConfig(),
                    callback: Callable[[int, np.ndarray, float], None] | None = None) -> CmaEsResult:
    """(mu/mu_w, lambda)-CMA-ES with cumulative step-size adaptation.

    Args:
        objective: Function to minimize.
        x0: Initial mean.
        config: Population size, step size, iteration budget and seed.
        callback: Called after each generation with ``(iteration, best_x, best_f)``
            for the best point found so far.

    Returns:
        Best point, its value, and the best-so-far value after every generation
        (so the history never increases).

    Raises:
        CmaEsError: If the objective is not finite at some candidate.
    """
    mean = np.array(x0, dtype=float).reshape(-1)
    dim = mean.size
    lam = config.lam(dim)
    mu = lam // 2
    weights = math.log((lam + 1) / 2) - np.log(np.arange(1, mu + 1))
    weights /= weights.sum()
    mueff = 1.0 / float(weights @ weights)

    cc = (4 + mueff / dim) / (dim + 4 + 2 * mueff / dim)
    cs = (mueff + 2) / (dim + mueff + 5)
    c1 = 2 / ((dim + 1.3) ** 2 + mueff)
    cmu = min(1 - c1, 2 * (mueff - 2 + 1 / mueff) / ((dim + 2) ** 2 + mueff))
    damps = 1 + 2 * max(0.0, math.sqrt((mueff - 1) / (dim + 1)) - 1) + cs
    chi_n = math.sqrt(dim) * (1 - 1 / (4 * dim) + 1 / (21 * dim ** 2))

    rng = np.random.default_rng(config.seed)
    sigma = config.initial_step
    cov = np.eye(dim)
    basis = np.eye(dim)
    scales = np.ones(dim)
    p_sigma = np.zeros(dim)
    p_c = np.zeros(dim)

    best_x, best_f = mean.copy(), math.inf
    history: list[float] = []
    for iteration in range(1, config.max_iterations + 1):
        z = rng.standard_normal((lam, dim))
        y = (z * scales) @ basis.T
        candidates = mean + sigma * y
        values = np.empty(lam)
        for i, x in enumerate(candidates):
            value = float(objective(x))
            if not math.isfinite(value):
                raise CmaEsError(f"objective returned {value} at iteration {iteration}", x.copy())
            values[i] = value
        order = np.argsort(values, kind="stable")
        if values[order[0]] < best_f:
            best_f = float(values[order[0]])
            best_x = candidates[order[0]].copy()
        history.append(best_f)
        if callback is not None:
            callback(iteration, best_x, best_f)
        if config.target_f is not None and best_f <= config.target_f:
            break

        selected = y[order[:mu]]
        y_w = weights @ selected
        mean = mean + sigma * y_w

        inv_sqrt = (basis / scales) @ basis.T
        p_sigma = (1 - cs) * p_sigma + math.sqrt(cs * (2 - cs) * mueff) * (inv_sqrt @ y_w)
        norm_ps = float(np.linalg.norm(p_sigma))
        h_sigma = norm_ps / math.sqrt(1 - (1 - cs) ** (2 * iteration)) < (1.4 + 2 / (dim + 1)) * chi_n
        p_c = (1 - cc) * p_c + h_sigma * math.sqrt(cc * (2 - cc) * mueff) * y_w

        rank_mu = (selected.T * weights) @ selected
        correction = (1 - h_sigma) * cc * (2 - cc)
        cov = ((1 - c1 - cmu) * cov + c1 * (np.outer(p_c, p_c) + correction * cov)
               + cmu * rank_mu)
        sigma *= math.exp((cs / damps) * (norm_ps / chi_n - 1))

        cov = np.triu(cov) + np.triu(cov, 1).T
        eigvals, basis = np.linalg.eigh(cov)
        scales = np.sqrt(np.clip(eigvals, 1e-20, None))
    return CmaEsResult(best_x=best_x, best_f=best_f, history=history)


@dataclass(frozen=True, eq=False)
class TrajectoryPoint:
    iteration: int
    coords: np.ndarray
    objective: float


@dataclass(frozen=True, eq=False)
class GenerationResult:
    genome: MEloGenome
    game: SymmetricMatrixGame
    target: np.ndarray
    trajectory: list[TrajectoryPoint] = field(default_factory=list)

    @property
    def initial_distance(self) -> float:
        return math.sqrt(self.trajectory[0].objective)

    @property
    def final_distance(self) -> float:
        return math.sqrt(self.trajectory[-1].objective)

    def __iter__(self):
        return iter((self.genome, self.game, self.trajectory))

    def trajectory_csv(self) -> str:
        lines = ["iteration,pc1,pc2,objective"]
        for point in self.trajectory:
            lines.append(f"{point.iteration},{float(point.coords[0])!r},{float(point.coords[1])!r},"
                         f"{float(point.objective)!r}")
        return "\n".join(lines) + "\n"


def target_coordinates(targets: Sequence[tuple[object, float]], landscape: Landscape,
                       params: AlphaRankParams | None = None) -> np.ndarray:
    """Weighted mixture of target landscape coordinates.

    Each target is a game (projected through its feature vector) or a
    coordinate pair.
    """
    if not targets:
        raise ValueError("at least one target is required")
    weights = np.array([float(w) for _, w in targets])
    if np.any(weights < 0) or not math.isclose(weights.sum(), 1.0, abs_tol=1e-9):
        raise ValueError(f"target weights must be nonnegative and sum to 1, got {weights.tolist()}")
    points = []
    for target, _ in targets:
        if hasattr(target, "matrix") or hasattr(target, "payoffs"):
            points.append(project(landscape, feature_vector(target, params)))
        else:
            points.append(np.asarray(target, dtype=float).reshape(-1))
    return weights @ np.array(points)


def generate_game(n: int, targets: Sequence[tuple[object, float]], landscape: Landscape,
                  config: CmaEsConfig = CmaEsConfig(), k: int = DEFAULT_RANK,
                  params: AlphaRankParams | None = None) -> GenerationResult:
    """Searches mElo genomes whose landscape position matches the targets.

    The search starts at the zero genome (a constant-payoff game) and minimizes
    the squared landscape distance to the weighted target mixture.
    """
    if n < 2:
        raise ValueError(f"generated games need n >= 2, got {n}")
    target = target_coordinates(targets, landscape, params)

    def coords_of(x: np.ndarray) -> np.ndarray:
        game = melo_payoffs(MEloGenome.from_vector(x, n, k))
        return project(landscape, feature_vector(game, params))

    def objective(x: np.ndarray) -> float:
        diff = coords_of(x) - target
        return float(diff @ diff)

    x0 = np.zeros(MEloGenome.size(n, k))
    start = coords_of(x0)
    trajectory = [TrajectoryPoint(0, start, float((start - target) @ (start - target)))]

    def record(iteration: int, best_x: np.ndarray, best_f: float):
        if best_f < trajectory[-1].objective:
            trajectory.append(TrajectoryPoint(iteration, coords_of(best_x), best_f))
        else:
            last = trajectory[-1]
            trajectory.append(TrajectoryPoint(iteration, last.coords, last.objective))

    result = cma_es_minimize(objective, x0, config, callback=record)
    best_x = result.best_x if result.best_f < trajectory[0].objective else x0
    genome = MEloGenome.from_vector(best_x, n, k)
    game = melo_payoffs(genome, name=f"Generated(n={n},k={k},seed={config.seed})")
    return GenerationResult(genome=genome, game=game, target=target, trajectory=trajectory)

"""Named game collections used by the experiments and the CLI."""

from __future__ import annotations

from typing import Callable

from gamescape import generators as gen
from gamescape.games import SymmetricMatrixGame


def motivating_suite(count: int = 20, n: int = 10) -> dict[str, list[SymmetricMatrixGame]]:
    """Seeded transitive (Elo), cyclical (relabelled) and random mElo instances."""
    return {
        "transitive": [gen.motivating_transitive(n, seed) for seed in range(count)],
        "cyclical": [gen.motivating_cyclical(n, seed=seed) for seed in range(count)],
        "random": [gen.motivating_random(n, seed) for seed in range(count)],
    }


def complexity_suite() -> list[SymmetricMatrixGame]:
    """Desk-scale collection of 33 games spanning transitive to cyclic structure."""
    games = [gen.motivating_transitive(10, seed) for seed in range(7)]
    games += [gen.motivating_cyclical(10, seed=seed) for seed in range(7)]
    games += [gen.motivating_random(10, seed) for seed in range(6)]
    games += [
        gen.rps(),
        gen.blotto(5, 3),
        gen.blotto(5, 4),
        gen.disc_game(50, seed=0),
        gen.elo_game(50, 0.0, seed=0),
        gen.elo_game(50, 0.1, seed=0),
        gen.elo_game(50, 0.5, seed=0),
        gen.random_game_of_skill(50, seed=0),
    ]
    games += [gen.transitive_game(n) for n in (10, 20, 30, 40, 50)]
    return games


def landscape_suite() -> list[SymmetricMatrixGame]:
    return complexity_suite() + [gen.blotto(10, 3)]


def _int(params: dict, key: str, default: int) -> int:
    return int(params.get(key, default))


FAMILIES: dict[str, Callable[[dict], SymmetricMatrixGame]] = {
    "rps": lambda p: gen.rps(),
    "redundant_rps": lambda p: gen.redundant_rps(),
    "blotto": lambda p: gen.blotto(_int(p, "tokens", 5), _int(p, "regions", 3)),
    "elo": lambda p: gen.elo_game(_int(p, "n", 50), float(p.get("noise", 0.0)), _int(p, "seed", 0)),
    "disc": lambda p: gen.disc_game(_int(p, "n", 50), _int(p, "seed", 0)),
    "rgos": lambda p: gen.random_game_of_skill(_int(p, "n", 50), _int(p, "seed", 0)),
    "normal_bernoulli": lambda p: gen.normal_bernoulli(_int(p, "n", 50), _int(p, "seed", 0)),
    "transitive": lambda p: gen.transitive_game(_int(p, "n", 10)),
    "cyclical": lambda p: gen.motivating_cyclical(
        _int(p, "n", 10), seed=None if p.get("seed") is None else int(p["seed"])),
    "random_melo": lambda p: gen.motivating_random(_int(p, "n", 10), _int(p, "seed", 0)),
    "transitive_elo": lambda p: gen.motivating_transitive(_int(p, "n", 10), _int(p, "seed", 0)),
}

FAMILY_PARAMS: dict[str, frozenset[str]] = {
    "rps": frozenset(),
    "redundant_rps": frozenset(),
    "blotto": frozenset({"tokens", "regions"}),
    "elo": frozenset({"n", "noise", "seed"}),
    "disc": frozenset({"n", "seed"}),
    "rgos": frozenset({"n", "seed"}),
    "normal_bernoulli": frozenset({"n", "seed"}),
    "transitive": frozenset({"n"}),
    "cyclical": frozenset({"n", "seed"}),
    "random_melo": frozenset({"n", "seed"}),
    "transitive_elo": frozenset({"n", "seed"}),
}
"""Parameter names each entry of :data:`FAMILIES` reads."""

"""Game JSON and two-player CSV serialization."""

from __future__ import annotations

import csv
import io
import json
import os
from pathlib import Path
from typing import IO, Any

import numpy as np

from gamescape.features import FEATURE_NAMES, GraphFeatureVector
from gamescape.games import Game, GameError, PayoffTensor, as_tensor, validate


def format_real(value: float) -> str:
    """17-significant-digit decimal text; round-trips every finite double."""
    return format(float(value), ".17g")


def _nested(array: np.ndarray) -> str:
    if array.ndim == 1:
        return "[" + ", ".join(format_real(v) for v in array) + "]"
    return "[" + ", ".join(_nested(sub) for sub in array) + "]"


def game_to_json(game: Game) -> str:
    tensor = as_tensor(game)
    header = {
        "name": tensor.name,
        "players": tensor.num_players,
        "strategy_counts": list(tensor.strategy_counts),
        "symmetric": bool(tensor.symmetric),
    }
    body = json.dumps(header, ensure_ascii=False)[:-1]
    return f'{body}, "payoffs": {_nested(tensor.payoffs)}}}\n'


def _reject_constant(token: str):
    raise GameError(f"non-finite token {token!r} is not permitted in game JSON")


def game_from_dict(doc: Any) -> PayoffTensor:
    if not isinstance(doc, dict):
        raise GameError("game JSON must be an object")
    missing = {"name", "players", "strategy_counts", "symmetric", "payoffs"} - doc.keys()
    if missing:
        raise GameError(f"game JSON missing keys: {sorted(missing)}")
    players = doc["players"]
    counts = doc["strategy_counts"]
    if not isinstance(players, int) or players < 1:
        raise GameError(f"'players' must be a positive integer, got {players!r}")
    if (not isinstance(counts, list) or len(counts) != players
            or not all(isinstance(c, int) and c >= 1 for c in counts)):
        raise GameError(f"'strategy_counts' must list {players} positive integers, got {counts!r}")
    try:
        payoffs = np.array(doc["payoffs"], dtype=float)
    except (TypeError, ValueError) as exc:
        raise GameError(f"payoff array is ragged or non-numeric: {exc}") from None
    expected = (players, *counts)
    if payoffs.shape != expected:
        raise GameError(f"shape mismatch: strategy_counts imply {expected}, "
                        f"payoff array has shape {payoffs.shape}")
    game = PayoffTensor(payoffs, name=str(doc["name"]), symmetric=bool(doc["symmetric"]))
    problems = validate(game)
    if problems:
        raise GameError("; ".join(problems))
    return game


def read_game(source: str | os.PathLike | IO[str]) -> PayoffTensor:
    """Reads a game from a JSON document or a two-player symmetric CSV."""
    if hasattr(source, "read"):
        text = source.read()
        suffix = ""
    else:
        path = Path(source)
        text = path.read_text(encoding="utf-8")
        suffix = path.suffix.lower()
    if suffix == ".csv" or (suffix != ".json" and not text.lstrip().startswith("{")):
        name = Path(source).stem if not hasattr(source, "read") else "game"
        return read_csv(io.StringIO(text), name=name)
    try:
        doc = json.loads(text, parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise GameError(f"malformed game JSON: {exc}") from None
    return game_from_dict(doc)


def write_game(game: Game, target: str | os.PathLike | IO[str]) -> None:
    text = game_to_json(game)
    if hasattr(target, "write"):
        target.write(text)
    else:
        Path(target).write_text(text, encoding="utf-8")


def read_csv(stream: IO[str], name: str = "game") -> PayoffTensor:
    """Parses a labelled ``n x n`` row-player table into a symmetric two-tensor."""
    rows = [row for row in csv.reader(stream) if row]
    if len(rows) < 2:
        raise GameError("CSV game needs a header row and at least one strategy row")
    labels = rows[0][1:]
    n = len(labels)
    if len(rows) - 1 != n:
        raise GameError(f"CSV game has {n} column labels but {len(rows) - 1} rows")
    try:
        matrix = np.array([[float(cell) for cell in row[1:]] for row in rows[1:]])
    except ValueError as exc:
        raise GameError(f"non-numeric CSV cell: {exc}") from None
    if matrix.shape != (n, n):
        raise GameError(f"CSV payoff block has shape {matrix.shape}, expected {(n, n)}")
    game = PayoffTensor(np.stack([matrix, matrix.T]), name=name, symmetric=True)
    problems = validate(game)
    if problems:
        raise GameError("; ".join(problems))
    return game


def write_csv(game: Game, target: str | os.PathLike | IO[str],
              labels: list[str] | None = None) -> None:
    tensor = as_tensor(game)
    if not tensor.symmetric:
        raise GameError("CSV export is only defined for symmetric two-player games")
    matrix = tensor.payoffs[0]
    if labels is None:
        labels = getattr(game, "labels", None) or [f"s{i}" for i in range(matrix.shape[0])]
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow([""] + list(labels))
    for label, row in zip(labels, matrix):
        writer.writerow([label] + [format_real(v) for v in row])
    if hasattr(target, "write"):
        target.write(buffer.getvalue())
    else:
        Path(target).write_text(buffer.getvalue(), encoding="utf-8")


def features_to_csv(vectors) -> str:
    """One row per game: ``name`` then the twelve features in fixed order."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["name", *FEATURE_NAMES])
    for vec in vectors:
        writer.writerow([vec.name, *(format_real(v) for v in vec.values)])
    return buffer.getvalue()


def read_features_csv(text: str, normalized: bool = True) -> list[GraphFeatureVector]:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or tuple(rows[0]) != ("name", *FEATURE_NAMES):
        raise GameError("features CSV header must be: name," + ",".join(FEATURE_NAMES))
    out = []
    for line, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != len(FEATURE_NAMES) + 1:
            raise GameError(f"features CSV line {line} has {len(row)} fields")
        try:
            values = [float(v) for v in row[1:]]
        except ValueError as exc:
            raise GameError(f"features CSV line {line}: {exc}") from None
        out.append(GraphFeatureVector(row[0], values, normalized=normalized))
    return out

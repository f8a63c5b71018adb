"""``gamescape`` command line: tools for building and studying games.

Every command writes into ``--out`` and finishes with a ``manifest.json``
recording the command line, parameters and SHA-256 digests of inputs and
outputs. Exit status is 0 on success, 1 on invalid input and 2 on numerical
failure.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from gamescape import __version__
from gamescape import generators as gen
from gamescape.features import FEATURE_NAMES, feature_vector, features_from_graph
from gamescape.games import GameError, PayoffTensor, SymmetricMatrixGame
from gamescape.io import (features_to_csv, format_real, game_to_json, read_features_csv,
                          read_game, write_csv)
from gamescape.landscape import (fit_landscape, pairwise_distances, project, read_landscape,
                                 scatter_svg)
from gamescape.melo import MEloGenome
from gamescape.response_graph import AlphaRankParams, alpharank, to_dot
from gamescape.solver import complexity_experiment
from gamescape.spectral import analyze_graph, cluster, contracted_to_dot
from gamescape.suites import (FAMILIES, FAMILY_PARAMS, complexity_suite, landscape_suite,
                              motivating_suite)
from gamescape.synth import DEFAULT_RANK, CmaEsConfig, generate_game

EXIT_OK, EXIT_INVALID, EXIT_NUMERIC = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """Argument parser that reports bad flags as invalid input (exit 1)."""

    def error(self, message):
        raise UsageError(message)


@dataclass
class RunManifest:
    command: str
    argv: list[str]
    version: str
    seeds: list[int] = field(default_factory=list)
    parameters: dict = field(default_factory=dict)
    inputs: dict[str, str] = field(default_factory=dict)
    outputs: dict[str, str] = field(default_factory=dict)


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


class _Run:
    """Collects outputs of one command and writes its manifest."""

    def __init__(self, args, argv: list[str]):
        self.out = Path(args.out)
        self.out.mkdir(parents=True, exist_ok=True)
        self.manifest = RunManifest(command=args.command, argv=list(argv), version=__version__)

    def input(self, path) -> Path:
        path = Path(path)
        if not path.is_file():
            raise UsageError(f"input file not found: {path}")
        self.manifest.inputs[str(path)] = _sha256(path)
        return path

    def write(self, name: str, text: str) -> Path:
        path = self.out / name
        path.write_text(text, encoding="utf-8")
        self.manifest.outputs[name] = _sha256(path)
        return path

    def finish(self, seeds: Sequence[int] = (), **parameters):
        self.manifest.seeds = [int(s) for s in seeds]
        self.manifest.parameters = parameters
        (self.out / "manifest.json").write_text(
            json.dumps(asdict(self.manifest), indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _csv_text(header: Sequence[str], rows) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buffer.getvalue()


def _stem(name: str) -> str:
    keep = "".join(ch if ch.isalnum() or ch in "-_." else "_" for ch in name)
    return keep.strip("_") or "game"


def _params(args) -> AlphaRankParams:
    population = None if args.population == "auto" else args.population
    return AlphaRankParams(mode=args.alpha_mode, alpha=args.alpha, m=args.m,
                           epsilon=args.epsilon, population=population)


def _load(path: Path) -> SymmetricMatrixGame | PayoffTensor:
    tensor = read_game(path)
    if tensor.symmetric and tensor.num_players == 2:
        return tensor.as_symmetric()
    return tensor


def _family_game(family: str, params: dict):
    if family == "11-20":
        return gen.game_11_20()
    if family == "bruns":
        return gen.bruns_game(params.get("row", "Pd"), params.get("col", "Pd"))
    if family not in FAMILIES:
        raise UsageError(f"unknown family {family!r}; choose from "
                         f"{', '.join(sorted([*FAMILIES, '11-20', 'bruns']))}")
    unknown = set(params) - FAMILY_PARAMS[family] - {"seed"}
    if unknown:
        allowed = ", ".join(sorted(FAMILY_PARAMS[family])) or "none"
        raise UsageError(f"unknown parameter(s) {', '.join(sorted(unknown))} for {family}; "
                         f"accepted: {allowed}")
    return FAMILIES[family](params)


def _key_values(items: Sequence[str]) -> dict:
    out = {}
    for item in items:
        key, sep, value = item.partition("=")
        if not sep:
            raise UsageError(f"expected key=value, got {item!r}")
        out[key] = value
    return out


# --------------------------------------------------------------------------- gen

def cmd_gen(args, run: _Run) -> int:
    params = _key_values(args.param)
    if args.seed is not None:
        params.setdefault("seed", str(args.seed))
    try:
        game = _family_game(args.family, params)
    except (KeyError, ValueError) as exc:
        raise UsageError(f"bad parameters for {args.family}: {exc}") from None
    stem = _stem(args.family)
    if args.format == "csv":
        buffer = io.StringIO()
        write_csv(game, buffer)
        run.write(f"{stem}.csv", buffer.getvalue())
    else:
        run.write(f"{stem}.json", game_to_json(game))
    run.finish(seeds=[int(params["seed"])] if "seed" in params else [],
               family=args.family, params=params, format=args.format)
    return EXIT_OK


# ----------------------------------------------------------------------- analyze

def cmd_analyze(args, run: _Run) -> int:
    params = _params(args)
    vectors = []
    for path in args.game:
        game = _load(run.input(path))
        graph, dist = alpharank(game, params)
        stem = _stem(Path(path).stem)
        labels = [graph.node_label(i) for i in range(graph.num_nodes)]
        run.write(f"{stem}.ranking.csv", _csv_text(
            ["node", "profile", "pi"],
            [[i, labels[i], format_real(p)] for i, p in enumerate(dist.pi)]))
        run.write(f"{stem}.response.dot", to_dot(graph, dist.pi, name=game.name))
        if graph.num_nodes >= 2:
            analysis = analyze_graph(graph, dist.pi, d=args.d, k=args.k, k_max=args.k_max)
            coords = analysis.embedding.coordinates
            run.write(f"{stem}.embedding.csv", _csv_text(
                ["node", "profile", *[f"x{j + 1}" for j in range(coords.shape[1])], "cluster",
                 "pi"],
                [[i, labels[i], *map(format_real, coords[i]), int(analysis.clustering.labels[i]),
                  format_real(dist.pi[i])] for i in range(graph.num_nodes)]))
            run.write(f"{stem}.eigenvalues.csv", _csv_text(
                ["index", "eigenvalue"],
                [[i, format_real(v)] for i, v in enumerate(analysis.embedding.eigenvalues)]))
            run.write(f"{stem}.linkage.csv", _csv_text(
                ["a", "b", "distance", "size"],
                [[int(a), int(b), format_real(dd), int(s)]
                 for a, b, dd, s in analysis.dendrogram.merges]))
            run.write(f"{stem}.contracted.dot", contracted_to_dot(analysis.contracted,
                                                                  name=f"{game.name} contracted"))
        vectors.append(features_from_graph(graph, dist.pi, normalize=not args.no_normalize_graph,
                                           name=game.name))
    run.write("features.csv", features_to_csv(vectors))
    run.finish(alpharank=params.to_dict(), d=args.d, k=args.k, k_max=args.k_max,
               normalize_graph=not args.no_normalize_graph)
    return EXIT_OK


# --------------------------------------------------------------------- landscape

def _suite(name: str):
    if name == "landscape":
        return landscape_suite()
    if name == "complexity":
        return complexity_suite()
    if name == "motivating":
        groups = motivating_suite()
        return groups["transitive"] + groups["cyclical"] + groups["random"]
    raise UsageError(f"unknown suite {name!r}")


def _collect_features(args, run: _Run, params: AlphaRankParams):
    vectors = []
    if args.features:
        vectors += read_features_csv(run.input(args.features).read_text(encoding="utf-8"),
                                     normalized=not args.no_normalize_graph)
    for path in args.game or ():
        vectors.append(feature_vector(_load(run.input(path)), params,
                                      normalize=not args.no_normalize_graph))
    if args.suite:
        vectors += [feature_vector(g, params, normalize=not args.no_normalize_graph)
                    for g in _suite(args.suite)]
    if not vectors:
        raise UsageError("landscape needs --features, --game or --suite")
    return vectors


def cmd_landscape(args, run: _Run) -> int:
    params = _params(args)
    vectors = _collect_features(args, run, params)
    landscape = fit_landscape(vectors, standardize=not args.no_standardize)
    run.write("features.csv", features_to_csv(vectors))
    run.write("coords.csv", landscape.coords_csv())
    run.write("loadings.csv", landscape.loadings_csv())
    dist = pairwise_distances(landscape)
    run.write("distances.csv", _csv_text(
        ["name", *landscape.names],
        [[name, *map(format_real, row)] for name, row in zip(landscape.names, dist)]))
    if args.svg:
        run.write("landscape.svg", scatter_svg(landscape.names, landscape.coords))
    run.finish(alpharank=params.to_dict(), standardize=not args.no_standardize,
               normalize_graph=not args.no_normalize_graph, suite=args.suite,
               covariance="population")
    return EXIT_OK


# ------------------------------------------------------------------------- solve

def cmd_solve(args, run: _Run) -> int:
    params = _params(args)
    games = []
    for path in args.game or ():
        game = _load(run.input(path))
        if not isinstance(game, SymmetricMatrixGame):
            raise UsageError(f"{path}: solve needs a symmetric two-player game")
        games.append(game)
    if args.suite:
        games += _suite(args.suite)
    if not games:
        raise UsageError("solve needs --game or --suite")
    normalize_iters = args.normalize_iters == "on"
    result = complexity_experiment(games, trials=args.trials, seed=args.seed,
                                   normalize_iters=normalize_iters,
                                   normalize_graph=not args.no_normalize_graph, params=params,
                                   correlate=FEATURE_NAMES[:3] if len(games) >= 3 else (),
                                   shared_start=not args.independent_starts)
    scores = result.scores
    rows = []
    for g, name in enumerate(result.names):
        for t in range(args.trials):
            r0, c0 = result.initials[g, t]
            rows.append([name, int(result.sizes[g]), t, int(r0), int(c0),
                         int(result.iterations[g, t]), format_real(scores[g, t])])
    run.write("iterations.csv", _csv_text(
        ["game", "n", "trial", "row_start", "col_start", "iterations", "score"], rows))
    run.write("summary.csv", _csv_text(
        ["game", "n", "mean", "std", *FEATURE_NAMES],
        [[name, int(n), format_real(m), format_real(s), *map(format_real, f.values)]
         for name, n, m, s, f in zip(result.names, result.sizes, result.mean, result.std,
                                     result.features)]))
    run.write("correlations.csv", _csv_text(
        ["feature", "rho", "p_value"],
        [[k, format_real(rho), format_real(p)] for k, (rho, p) in result.correlations.items()]))
    for feature, (rho, p) in result.correlations.items():
        print(f"{feature:10s} rho_s = {rho:.2f}  p = {p:.2f}")
    run.finish(seeds=[args.seed], trials=args.trials, normalize_iters=normalize_iters,
               normalize_graph=not args.no_normalize_graph, alpharank=params.to_dict(),
               shared_start=not args.independent_starts, suite=args.suite)
    return EXIT_OK


# ------------------------------------------------------------------------- synth

def _split_targets(text: str) -> list[tuple[str, float | None]]:
    """Splits ``name:weight,...`` at top-level commas (names may hold parentheses)."""
    parts, depth, current = [], 0, ""
    for ch in text:
        if ch == "," and depth == 0:
            parts.append(current)
            current = ""
            continue
        depth += {"(": 1, ")": -1}.get(ch, 0)
        current += ch
    parts.append(current)
    targets = []
    for part in filter(None, (p.strip() for p in parts)):
        name, sep, weight = part.rpartition(":")
        if sep and not weight.endswith(")"):
            try:
                targets.append((name, float(weight)))
                continue
            except ValueError:
                pass
        targets.append((part, None))
    if not targets:
        raise UsageError("--targets is empty")
    return targets


def _landscape_files(paths: Sequence[str], run: _Run):
    if len(paths) == 1 and Path(paths[0]).is_dir():
        paths = [str(Path(paths[0]) / "loadings.csv"), str(Path(paths[0]) / "coords.csv")]
    loadings = coords = None
    for path in paths:
        text = run.input(path).read_text(encoding="utf-8")
        if text.startswith("row,"):
            loadings = text
        elif text.startswith("name,pc1"):
            coords = text
        else:
            raise UsageError(f"{path}: neither a loadings nor a coordinates CSV")
    if loadings is None:
        raise UsageError("--landscape must include the loadings CSV")
    return read_landscape(loadings, coords)


def cmd_synth(args, run: _Run) -> int:
    landscape = _landscape_files(args.landscape, run)
    params = _params(args)
    raw = _split_targets(args.targets)
    missing = [w is None for _, w in raw]
    if any(missing) and not all(missing):
        raise UsageError("give a weight for every target or for none")
    weights = [1.0 / len(raw)] * len(raw) if all(missing) else [w for _, w in raw]
    targets = []
    for (name, _), weight in zip(raw, weights):
        if name in landscape.names:
            targets.append((landscape.coordinate(name), weight))
        elif name in FAMILIES or name in ("11-20", "bruns"):
            targets.append((_family_game(name, {}), weight))
        else:
            raise UsageError(f"target {name!r} is neither in the landscape nor a known family")
    config = CmaEsConfig(population_size=args.population_size, initial_step=args.step,
                         max_iterations=args.iters, seed=args.seed)
    result = generate_game(args.size, targets, landscape, config, k=args.rank, params=params)
    final = feature_vector(result.game, params)
    run.write("game.json", game_to_json(result.game))
    run.write("genome.json", json.dumps(result.genome.to_dict(), indent=2) + "\n")
    run.write("trajectory.csv", result.trajectory_csv())
    run.write("features.csv", features_to_csv([final]))
    print(f"distance {result.initial_distance:.4g} -> {result.final_distance:.4g}; "
          f"final coords {np.array2string(project(landscape, final), precision=4)}")
    run.finish(seeds=[args.seed], size=args.size, rank=args.rank,
               targets=[[n, w] for (n, _), w in zip(raw, weights)],
               cma_es=config.to_dict(MEloGenome.size(args.size, args.rank)),
               alpharank=params.to_dict(), target_coords=result.target.tolist())
    return EXIT_OK


# -------------------------------------------------------------------- taxonomy2x2

def cmd_taxonomy2x2(args, run: _Run) -> int:
    games = gen.bruns_2x2_suite()
    for alpha in args.alpha:
        params = AlphaRankParams(mode="finite", alpha=alpha, m=args.m, epsilon=args.epsilon,
                                 population="multi")
        vectors = [feature_vector(g, params) for g in games]
        landscape = fit_landscape(vectors)
        clustering = cluster(landscape.coords, args.clusters)
        tag = f"alpha{alpha:g}"
        run.write(f"features_{tag}.csv", features_to_csv(vectors))
        run.write(f"coords_{tag}.csv", landscape.coords_csv())
        run.write(f"loadings_{tag}.csv", landscape.loadings_csv())
        run.write(f"labels_{tag}.csv", _csv_text(
            ["name", "row", "col", "label"],
            [[g.name, *g.name.split("x"), int(lab)] for g, lab in zip(games, clustering.labels)]))
        dist = pairwise_distances(landscape)
        run.write(f"distances_{tag}.csv", _csv_text(
            ["name", *landscape.names],
            [[name, *map(format_real, row)] for name, row in zip(landscape.names, dist)]))
    run.finish(alphas=list(args.alpha), clusters=args.clusters, m=args.m, epsilon=args.epsilon,
               population="multi", mode="finite")
    return EXIT_OK


# ------------------------------------------------------------------------ parser

def _alpharank_flags(parser, mode: str = "infinite"):
    parser.add_argument("--alpha-mode", choices=("infinite", "finite"), default=mode)
    parser.add_argument("--alpha", type=float, default=0.2)
    parser.add_argument("--m", type=int, default=50, help="population size (finite mode)")
    parser.add_argument("--epsilon", type=float, default=1e-10)
    parser.add_argument("--population", choices=("auto", "single", "multi"), default="auto")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="gamescape", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("gen", help="write a game from a named family")
    p.add_argument("--family", required=True)
    p.add_argument("--param", action="append", default=[], metavar="KEY=VALUE")
    p.add_argument("--seed", type=int)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--out", required=True)

    p = sub.add_parser("analyze", help="response graph, ranking, spectral clusters, features")
    p.add_argument("--game", required=True, action="append")
    _alpharank_flags(p)
    p.add_argument("--d", type=int, default=2, help="embedding dimension")
    p.add_argument("--k", type=int, help="force the cluster count")
    p.add_argument("--k-max", type=int)
    p.add_argument("--no-normalize-graph", action="store_true")
    p.add_argument("--out", required=True)

    p = sub.add_parser("landscape", help="fit the 2-D feature landscape")
    p.add_argument("--features")
    p.add_argument("--game", action="append")
    p.add_argument("--suite", choices=("landscape", "complexity", "motivating"))
    _alpharank_flags(p)
    p.add_argument("--no-standardize", action="store_true")
    p.add_argument("--no-normalize-graph", action="store_true")
    p.add_argument("--svg", action="store_true")
    p.add_argument("--out", required=True)

    p = sub.add_parser("solve", help="Double Oracle iteration counts and correlations")
    p.add_argument("--game", action="append")
    p.add_argument("--suite", choices=("complexity", "motivating", "landscape"))
    p.add_argument("--trials", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--normalize-iters", choices=("on", "off"), default="on")
    p.add_argument("--no-normalize-graph", action="store_true")
    p.add_argument("--independent-starts", action="store_true")
    _alpharank_flags(p)
    p.add_argument("--out", required=True)

    p = sub.add_parser("synth", help="generate an mElo game near target landscape coordinates")
    p.add_argument("--size", type=int, required=True)
    p.add_argument("--targets", required=True, help="name[:weight],...")
    p.add_argument("--landscape", required=True, nargs="+",
                   help="directory with coords.csv and loadings.csv, or the two files")
    p.add_argument("--iters", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--rank", type=int, default=DEFAULT_RANK)
    p.add_argument("--step", type=float, default=0.5)
    p.add_argument("--population-size", type=int)
    _alpharank_flags(p)
    p.add_argument("--out", required=True)

    p = sub.add_parser("taxonomy2x2", help="landscape and clusters of the 144 ordinal 2x2 games")
    p.add_argument("--alpha", type=float, action="append")
    p.add_argument("--clusters", type=int, default=7)
    p.add_argument("--m", type=int, default=50)
    p.add_argument("--epsilon", type=float, default=1e-10)
    p.add_argument("--out", required=True)
    return parser


COMMANDS = {"gen": cmd_gen, "analyze": cmd_analyze, "landscape": cmd_landscape,
            "solve": cmd_solve, "synth": cmd_synth, "taxonomy2x2": cmd_taxonomy2x2}


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = build_parser().parse_args(argv)
        if args.command == "taxonomy2x2" and not args.alpha:
            args.alpha = [0.2, 0.01]
        return COMMANDS[args.command](args, _Run(args, argv))
    except (UsageError, GameError, FileNotFoundError, ValueError, KeyError) as exc:
        print(f"gamescape: error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"gamescape: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())

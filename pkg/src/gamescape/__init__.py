"""Response-graph analysis and procedural generation of normal-form games."""

__version__ = "0.1.0"

from gamescape.features import GraphFeatureVector, feature_vector
from gamescape.games import GameError, PayoffTensor, SymmetricMatrixGame
from gamescape.landscape import Landscape, fit_landscape
from gamescape.melo import MEloGenome, melo_payoffs
from gamescape.response_graph import AlphaRankParams, alpharank, build_response_graph
from gamescape.solver import double_oracle, zero_sum_nash
from gamescape.synth import CmaEsConfig, cma_es_minimize, generate_game

__all__ = [
    "AlphaRankParams",
    "CmaEsConfig",
    "GameError",
    "GraphFeatureVector",
    "Landscape",
    "MEloGenome",
    "PayoffTensor",
    "SymmetricMatrixGame",
    "alpharank",
    "build_response_graph",
    "cma_es_minimize",
    "double_oracle",
    "feature_vector",
    "fit_landscape",
    "generate_game",
    "melo_payoffs",
    "zero_sum_nash",
]

"""Weighted angel-devil game engine.

Exact-rational rules for the AD-game, the hierarchical scale-up
implementation map, the nested winning strategy, adversarial devils, a
simulation/verification harness and an interactive session service.
"""

from .grid import Cell, Rect, Run, floor_to
from .measure import Measure
from .moves import CATALOG, Direction, Kind, LocatedMove, MoveSpec
from .params import ParamSet, solve_params, toy_params
from .rat import Rat, rat
from .rules import Configuration, GameSpec, History, angel_allowed, base_game, devil_allowed

__all__ = [
    "Cell", "Rect", "Run", "floor_to", "Measure",
    "CATALOG", "Direction", "Kind", "LocatedMove", "MoveSpec",
    "ParamSet", "solve_params", "toy_params", "Rat", "rat",
    "Configuration", "GameSpec", "History", "angel_allowed", "base_game",
    "devil_allowed",
]

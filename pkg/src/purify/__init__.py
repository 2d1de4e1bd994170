"""Entanglement purification: bipartite and multipartite protocols, repeaters,
and a dense density-matrix oracle that certifies the closed-form maps."""

__version__ = "0.1.0"

from .errors import BelowThresholdError, InvalidStateError, UnreachableTargetError
from .graphs import Graph, GraphError, coloring_of, parse_edge_list, two_coloring_of
from .states import (
    BellDiagonal,
    GateNoiseModel,
    NoiseKind,
    PauliChannel,
    WernerParam,
    depolarizing,
    entropy,
    werner_from_fidelity,
)
from .bipartite import (
    bbpssw_fixed_points,
    bbpssw_step,
    dejmps_step,
    hashing_yield,
    nested_pump,
    pump,
    search_nested_schedule,
)
from .multipartite import GraphDiagonalState, kcolor_purify, p1_step, p2_step, purify_two_colorable
from .analysis import purification_range, threshold_p
from .repeater import RepeaterConfig, repeater_run, resource_scaling, swap

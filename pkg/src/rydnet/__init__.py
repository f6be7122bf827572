"""Gate loss, loss-aware routing and benchmark simulation for Rydberg arrays
whose interaction range is set by the choice of Rydberg level."""

from .physics import (
    GateDrive,
    LPChannel,
    LPGateParams,
    NoiseConfig,
    PhysicsContext,
    PowerLawModel,
    TableModel,
    load_table,
    solve_lp_params,
)
from .router import Fixed, Graded, LatticeSpec, build_graph, shortest_route, synthesize_cz

__version__ = "0.1.0"

__all__ = [
    "Fixed",
    "GateDrive",
    "Graded",
    "LPChannel",
    "LPGateParams",
    "LatticeSpec",
    "NoiseConfig",
    "PhysicsContext",
    "PowerLawModel",
    "TableModel",
    "build_graph",
    "load_table",
    "shortest_route",
    "solve_lp_params",
    "synthesize_cz",
]

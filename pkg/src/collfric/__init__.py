"""Friction and anti-friction of a system dragged over a lattice of ancillas,
modelled as a quantum collision model."""
from .collision import (CollisionSpec, InteractionRecord, collide_once, friction_series,
                        run_trajectory, zeno_critical_speed, zeno_leading_coefficient)
from .convex import (ConvexEnergies, ConvexModelSpec, FrictionDecomposition, Retention,
                     direct_friction, friction_at, friction_decomposition)
from .errors import ConfigError, InvariantViolation
from .kernels import BACKEND
from .models import (DampedSwapParams, EntangleDisentangleParams, build_convex_spec,
                     damped_swap_friction, ed_friction)
from .quantum import QubitThermalState

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "CollisionSpec", "ConfigError", "ConvexEnergies", "ConvexModelSpec",
    "DampedSwapParams", "EntangleDisentangleParams", "FrictionDecomposition",
    "InteractionRecord", "InvariantViolation", "QubitThermalState", "Retention",
    "build_convex_spec", "collide_once", "damped_swap_friction", "direct_friction",
    "ed_friction", "friction_at", "friction_decomposition", "friction_series",
    "run_trajectory", "zeno_critical_speed", "zeno_leading_coefficient",
]

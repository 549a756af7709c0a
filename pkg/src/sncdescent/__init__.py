"""Descent for modules along strict normal crossings divisors, with exact arithmetic."""

from .constructors import (
    ChainRing,
    CompletionTower,
    DivisorSpec,
    LaurentElement,
    LocalizedRing,
    Precision,
    chain_ring,
    check_bl_sequence,
    completion_tower,
    localize,
    stratum_ring,
)
from .descent import DescentDatum, check_cocycle, datum_from_module, glue, verify_roundtrip
from .diagrams import (
    ChainModule,
    DiagramModule,
    grothendieck_construction,
    is_cocartesian_diagram,
    kan_limit,
    nerve,
    ring_diagram,
    strata_poset,
)
from .errors import (
    ChainError,
    CocycleInvalid,
    DescentError,
    NoStabilization,
    PrecisionExhausted,
    StructuralError,
    UnsupportedError,
)
from .field import QQ, Field
from .modules import ModuleMap, PresentedModule, is_module_iso
from .poly import Polynomial, PolyRing
from .rings import PresentedRing
from .smith import smith_invariants
from .towers import TowerModule, is_cocartesian_tower, module_to_tower, tower_stabilized_presentation

__version__ = "0.1.0"

__all__ = [
    "ChainError",
    "ChainModule",
    "ChainRing",
    "CocycleInvalid",
    "CompletionTower",
    "DescentDatum",
    "DescentError",
    "DiagramModule",
    "DivisorSpec",
    "Field",
    "LaurentElement",
    "LocalizedRing",
    "ModuleMap",
    "NoStabilization",
    "PolyRing",
    "Polynomial",
    "Precision",
    "PrecisionExhausted",
    "PresentedModule",
    "PresentedRing",
    "QQ",
    "StructuralError",
    "TowerModule",
    "UnsupportedError",
    "chain_ring",
    "check_bl_sequence",
    "check_cocycle",
    "completion_tower",
    "datum_from_module",
    "glue",
    "grothendieck_construction",
    "is_cocartesian_diagram",
    "is_cocartesian_tower",
    "is_module_iso",
    "kan_limit",
    "localize",
    "module_to_tower",
    "nerve",
    "ring_diagram",
    "smith_invariants",
    "strata_poset",
    "stratum_ring",
    "tower_stabilized_presentation",
    "verify_roundtrip",
]

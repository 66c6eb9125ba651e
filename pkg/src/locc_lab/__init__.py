"""Orthogonal product state sets in three-party systems: generators, a
local-triviality verifier for orthogonality-preserving measurements, and a
simulator for entanglement-assisted LOCC discrimination protocols."""
from .estimators import ProtocolSimulator, TrivialityVerifier
from .families import (Family, ProductState, StateSet, check_orthogonality, computational_basis,
                       expected_count, gen_example1, gen_example2, gen_theorem1, gen_theorem2,
                       gen_theorem3, gen_theorem4, gen_theorem5, gen_theorem6, generate)
from .protocol import (Leaf, MeasurementNode, ProtocolReport, ResourceState, run_protocol,
                       verify_perfect)
from .protocols import (builtin_bell2_odd, builtin_bell_c6, builtin_for, builtin_ghz_c2d,
                        builtin_ghz_c6, builtin_ghz_odd)
from .verifier import build_constraints, hermitian_nullspace, verify_nonlocality

__all__ = [
    "Family", "ProductState", "StateSet", "check_orthogonality", "computational_basis",
    "expected_count", "gen_example1", "gen_example2", "gen_theorem1", "gen_theorem2",
    "gen_theorem3", "gen_theorem4", "gen_theorem5", "gen_theorem6", "generate",
    "build_constraints", "hermitian_nullspace", "verify_nonlocality",
    "Leaf", "MeasurementNode", "ProtocolReport", "ResourceState", "run_protocol", "verify_perfect",
    "builtin_ghz_c6", "builtin_ghz_c2d", "builtin_ghz_odd", "builtin_bell_c6", "builtin_bell2_odd",
    "builtin_for", "TrivialityVerifier", "ProtocolSimulator",
]
__version__ = "0.1.0"

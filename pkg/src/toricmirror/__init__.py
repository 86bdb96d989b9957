"""Exact computations for quantum D-modules of smooth projective toric varieties.

The pipeline runs from a fan through its cohomology ring, hypergeometric
operators and I-function to the quantum connection, and cross-checks the
result against the Batyrev presentation of the quantum ring.
"""
from .cohomology import AlgebraElement, GradedAlgebra, build_algebra, integrate, poincare_pairing_matrix
from .fan import FanData, FanoType, classify_fano, exact_sequence, primitive_relations, validate_fan
from .gkz import WeylOperator, batyrev_quantum_ring, euler_operator, reduced_box_operator
from .hypergeometric import build_I, build_I_tilde, mirror_map
from .series import LogLaurentSeries

__version__ = "0.1.0"

__all__ = [
    "AlgebraElement", "GradedAlgebra", "build_algebra", "integrate", "poincare_pairing_matrix",
    "FanData", "FanoType", "classify_fano", "exact_sequence", "primitive_relations", "validate_fan",
    "WeylOperator", "batyrev_quantum_ring", "euler_operator", "reduced_box_operator",
    "build_I", "build_I_tilde", "mirror_map", "LogLaurentSeries",
]

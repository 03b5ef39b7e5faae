"""Exact informationally complete POVMs from permutation magic states."""

from .cyclo import Cyclotomic, format_cyclo, parse_cyclo, root_of_unity
from .linalg import ExactMatrix, ExactVector
from .pauli import PauliSpec, WeylOperator, cosets, default_spec, parse_label
from .permmagic import MagicGroup, PermGate, candidate_states, generate_group, parse_perm
from .povm import Fiducial, Povm, build_povm, parse_vector
from .geometry import IncidenceStructure, SimpleGraph, find_blocks, tuple_traces
from .contextuality import KSCertificate, certificate_from_geometry, verify

__all__ = [
    "Cyclotomic", "format_cyclo", "parse_cyclo", "root_of_unity",
    "ExactMatrix", "ExactVector",
    "PauliSpec", "WeylOperator", "cosets", "default_spec", "parse_label",
    "MagicGroup", "PermGate", "candidate_states", "generate_group", "parse_perm",
    "Fiducial", "Povm", "build_povm", "parse_vector",
    "IncidenceStructure", "SimpleGraph", "find_blocks", "tuple_traces",
    "KSCertificate", "certificate_from_geometry", "verify",
]

"""Exact invariants and independent oracles for central hyperplane arrangements."""

from arrtopo.arrangement import (
    ArrangementError,
    CentralArrangement,
    essential_rank,
    parse_arrangement,
    serialize_arrangement,
)
from arrtopo.genericity import (
    AffineChart,
    GenericHypersurface,
    sample_generic_chart,
    sample_generic_hypersurface,
)
from arrtopo.lattice import (
    IntegerPolynomial,
    IntersectionLattice,
    build_lattice,
    characteristic_polynomial,
    deletion_restriction_poincare,
    poincare_polynomial,
    projective_poincare,
    restrict_to_generic_hyperplane,
)
from arrtopo.invariants import (
    InvariantReport,
    MilnorChainReport,
    euler_complement_with_hypersurface,
    euler_minus_generic_hyperplane,
    invariant_report,
    milnor_chain_report,
    minimal_cell_vector,
    smooth_hypersurface_euler,
)

__version__ = "0.1.0"

__all__ = [
    "ArrangementError",
    "CentralArrangement",
    "essential_rank",
    "parse_arrangement",
    "serialize_arrangement",
    "AffineChart",
    "GenericHypersurface",
    "sample_generic_chart",
    "sample_generic_hypersurface",
    "IntegerPolynomial",
    "IntersectionLattice",
    "build_lattice",
    "characteristic_polynomial",
    "deletion_restriction_poincare",
    "poincare_polynomial",
    "projective_poincare",
    "restrict_to_generic_hyperplane",
    "InvariantReport",
    "MilnorChainReport",
    "euler_complement_with_hypersurface",
    "euler_minus_generic_hyperplane",
    "invariant_report",
    "milnor_chain_report",
    "minimal_cell_vector",
    "smooth_hypersurface_euler",
]

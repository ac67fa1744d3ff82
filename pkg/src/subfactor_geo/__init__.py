"""Numerics for the extension of a finite-dimensional tracial inclusion by
its trace-preserving conditional expectation, and for the metric geometry of
the resulting projection orbit.

The package builds the extension algebra of an inclusion N ⊂ M from a
trace-orthonormal basis, verifies its defining properties, and exposes the
weak-Riemannian structure of the unitary orbit of the distinguished
projection: tangent projections, conjugation geodesics, horizontal lifts,
length and energy functionals, first variation, local inverses, and the
comparison with one-sided projection geometry.
"""

from .algebra import (
    AlgebraDescriptor,
    Inclusion,
    expectation_E,
    horizontal_projection,
    make_custom_inclusion,
    make_group_flip_inclusion,
    make_tensor_inclusion,
    pimsner_popa_validate,
    random_antihermitian,
    random_hermitian,
    random_horizontal,
    random_unitary,
)
from .basic import (
    BasicConstruction,
    build_basic_construction,
    dump_construction,
    recover_unitary,
    verify_construction_properties,
)
from .config import RunConfig, SUITE_NAMES, default_config, load_config, parse_config
from .errors import (
    BranchCutError,
    ConfigError,
    ConstructionError,
    ConvergenceError,
    DomainError,
    MembershipError,
    RadiusError,
    RefinementError,
)
from .families import FAMILY_NAMES, family_construction, family_inclusion
from .grassmann import (
    degeneracy_test,
    degenerate_geodesic_closed_form,
    grassmann_exp_block,
    sample_degenerate_direction,
    sample_nondegenerate_direction,
    tangent_decompose,
    tangent_space_comparison,
    totally_geodesic_audit,
)
from .orbit import (
    DiscreteCurve,
    OrbitPoint,
    TangentVector,
    base_point,
    convexity_probe,
    covariant_derivative,
    curve_from_unitaries,
    curve_lengths,
    delta_q,
    first_variation,
    geodesic_at,
    geodesic_equation_residual,
    horizontal_lift,
    kappa_q,
    lift_defects,
    minimality_experiment,
    orbit_log,
    orbit_section_theta,
    random_horizontal_at,
    random_orbit_point,
    sample_geodesic,
    shorten_to_polygonal,
    tangent_projection,
)
from .report import CheckRecord, RunReport, SuiteReport
from .suites import run_suites

__version__ = "0.1.0"

__all__ = [
    "AlgebraDescriptor",
    "BasicConstruction",
    "BranchCutError",
    "CheckRecord",
    "ConfigError",
    "ConstructionError",
    "ConvergenceError",
    "DiscreteCurve",
    "DomainError",
    "FAMILY_NAMES",
    "Inclusion",
    "MembershipError",
    "OrbitPoint",
    "RadiusError",
    "RefinementError",
    "RunConfig",
    "RunReport",
    "SUITE_NAMES",
    "SuiteReport",
    "TangentVector",
    "base_point",
    "build_basic_construction",
    "convexity_probe",
    "covariant_derivative",
    "curve_from_unitaries",
    "curve_lengths",
    "default_config",
    "degeneracy_test",
    "degenerate_geodesic_closed_form",
    "delta_q",
    "dump_construction",
    "expectation_E",
    "family_construction",
    "family_inclusion",
    "first_variation",
    "geodesic_at",
    "geodesic_equation_residual",
    "grassmann_exp_block",
    "horizontal_lift",
    "horizontal_projection",
    "kappa_q",
    "lift_defects",
    "load_config",
    "make_custom_inclusion",
    "make_group_flip_inclusion",
    "make_tensor_inclusion",
    "minimality_experiment",
    "orbit_log",
    "orbit_section_theta",
    "parse_config",
    "pimsner_popa_validate",
    "random_antihermitian",
    "random_hermitian",
    "random_horizontal",
    "random_horizontal_at",
    "random_orbit_point",
    "random_unitary",
    "recover_unitary",
    "run_suites",
    "sample_degenerate_direction",
    "sample_geodesic",
    "sample_nondegenerate_direction",
    "shorten_to_polygonal",
    "tangent_decompose",
    "tangent_projection",
    "tangent_space_comparison",
    "totally_geodesic_audit",
    "verify_construction_properties",
]

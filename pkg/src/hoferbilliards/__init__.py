"""Convex plane billiards: ball maps, table homotopies, Hofer lengths,
polygon smoothing, periodic orbits and persistence barcodes."""

from .billiard import (
    AnnulusPoint,
    chord_length,
    forward_map,
    generating_partials,
    inverse_map,
    iterate,
    map_jacobian,
)
from .curves import (
    DiscTable,
    FourierSupportSpec,
    FourierTable,
    PolygonBoundary,
    PolygonSpec,
    SampledCurve,
    TableCurve,
    build_fourier_table,
    c0_distance,
    disc_table,
    regular_polygon,
    rigid_motion,
    shift_mark,
    unit_square,
)
from .dynamics import (
    ChordData,
    PeriodicOrbitCandidate,
    almost_periodicity_experiment,
    find_periodic_orbits,
    functional_gap,
    orbit_functional,
    orbit_gradient,
    phase_fixed_points,
    reconstruct_table,
    table_chord_data,
)
from .homotopy import (
    HamiltonianField,
    TablePath,
    bracket_dB,
    hamilton_jacobi_residual,
    hamiltonian_value,
    hofer_length,
    normal_perturbation_path,
    path_geometric_length,
    support_interp_path,
    translation_path,
    verify_comparison,
)
from .persistence import (
    Barcode,
    GridFunction,
    bottleneck_distance,
    sample_orbit_functional,
    stability_check,
    sublevel_barcode,
)
from .smoothing import (
    CornerProfile,
    SmoothingFamily,
    cauchy_tail,
    family_from_polygon,
    family_speed,
    make_profile,
    positive_curvature_lift,
    profile_independence_gap,
)

__all__ = [
    "AnnulusPoint",
    "Barcode",
    "ChordData",
    "CornerProfile",
    "DiscTable",
    "FourierSupportSpec",
    "FourierTable",
    "GridFunction",
    "HamiltonianField",
    "PeriodicOrbitCandidate",
    "PolygonBoundary",
    "PolygonSpec",
    "SampledCurve",
    "SmoothingFamily",
    "TableCurve",
    "TablePath",
    "almost_periodicity_experiment",
    "bottleneck_distance",
    "bracket_dB",
    "build_fourier_table",
    "c0_distance",
    "cauchy_tail",
    "chord_length",
    "disc_table",
    "family_from_polygon",
    "family_speed",
    "find_periodic_orbits",
    "forward_map",
    "functional_gap",
    "generating_partials",
    "hamilton_jacobi_residual",
    "hamiltonian_value",
    "hofer_length",
    "inverse_map",
    "iterate",
    "make_profile",
    "map_jacobian",
    "normal_perturbation_path",
    "orbit_functional",
    "orbit_gradient",
    "path_geometric_length",
    "phase_fixed_points",
    "positive_curvature_lift",
    "profile_independence_gap",
    "reconstruct_table",
    "regular_polygon",
    "rigid_motion",
    "sample_orbit_functional",
    "shift_mark",
    "stability_check",
    "sublevel_barcode",
    "support_interp_path",
    "table_chord_data",
    "translation_path",
    "unit_square",
    "verify_comparison",
]

__version__ = "0.1.0"

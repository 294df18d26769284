"""Core domain logic: circle functions, surfaces, index, conformal map, Bishop discs."""

from .bishop import (
    AttachmentCertificate,
    BishopDisc,
    BishopProblem,
    DiscFamily,
    FamilyRecord,
    HoloPerturbation,
    IterationDiagnostics,
    ProbeReport,
    SolveConfig,
    apply_A_inv,
    apply_H,
    apply_Lambda,
    assemble_disc,
    disc_family,
    find_convergence_radius,
    fixed_point_defect,
    iterate_H,
    nonexistence_probe,
    prepare_problem,
    solve_disc,
    taylor_tail_Q,
    verify_attachment,
)
from .circle import (
    CircleFunction,
    FourierCoeffs,
    analytic_completion,
    extend_inside,
    hilbert,
    holder_norm,
    winding_number,
)
from .conformal import ConformalMap, aux_R, kappa_of, level_curve, riemann_map
from .maslov import (
    IndexReport,
    index_report,
    index_via_roots,
    index_via_winding,
    index_via_zero_count,
    profile_zeros,
)
from .surface import (
    HermitianHomPoly,
    PolyZZbar,
    SurfaceGerm,
    angular_profile,
    is_isolated_cr_singularity,
    make_bishop_quadric,
    make_example_4_1,
    make_power,
    subharmonicity_report,
)

__all__ = [
    "AttachmentCertificate",
    "BishopDisc",
    "BishopProblem",
    "CircleFunction",
    "ConformalMap",
    "DiscFamily",
    "FamilyRecord",
    "FourierCoeffs",
    "HermitianHomPoly",
    "HoloPerturbation",
    "IndexReport",
    "IterationDiagnostics",
    "PolyZZbar",
    "ProbeReport",
    "SolveConfig",
    "SurfaceGerm",
    "analytic_completion",
    "angular_profile",
    "apply_A_inv",
    "apply_H",
    "apply_Lambda",
    "assemble_disc",
    "aux_R",
    "disc_family",
    "extend_inside",
    "find_convergence_radius",
    "fixed_point_defect",
    "hilbert",
    "holder_norm",
    "index_report",
    "index_via_roots",
    "index_via_winding",
    "index_via_zero_count",
    "is_isolated_cr_singularity",
    "iterate_H",
    "kappa_of",
    "level_curve",
    "make_bishop_quadric",
    "make_example_4_1",
    "make_power",
    "nonexistence_probe",
    "prepare_problem",
    "profile_zeros",
    "riemann_map",
    "solve_disc",
    "subharmonicity_report",
    "taylor_tail_Q",
    "verify_attachment",
    "winding_number",
]

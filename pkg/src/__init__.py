"""Bishop discs - CR singularity index and Bishop disc construction."""

# Infrastructure
from .infrastructure import Logger, logger, SingletonMeta

# Core domain logic
from .core import (
    BishopDisc,
    BishopProblem,
    CircleFunction,
    ConformalMap,
    DiscFamily,
    HermitianHomPoly,
    HoloPerturbation,
    IndexReport,
    PolyZZbar,
    SolveConfig,
    SurfaceGerm,
    disc_family,
    index_report,
    nonexistence_probe,
    prepare_problem,
    riemann_map,
    solve_disc,
)
from .core.errors import BishopDiscsError, InputError, MathError

# Ports (interfaces)
from .ports import (
    ExportPort,
    IterationInfo,
    MapSample,
    SolverObserverPort,
    SurfaceSpecPort,
)

# Adapters (implementations)
from .adapters import (
    CsvExportAdapter,
    JsonSurfaceSpecAdapter,
    LoggerSolverObserverAdapter,
)

# Application layer
from .application import (
    RunReport,
    SolveHandler,
    cmd_classify,
    cmd_examples,
    cmd_family,
    cmd_index,
    cmd_probe,
    cmd_verify,
)

__all__ = [
    "Logger",
    "logger",
    "SingletonMeta",
    "BishopDisc",
    "BishopProblem",
    "CircleFunction",
    "ConformalMap",
    "DiscFamily",
    "HermitianHomPoly",
    "HoloPerturbation",
    "IndexReport",
    "PolyZZbar",
    "SolveConfig",
    "SurfaceGerm",
    "disc_family",
    "index_report",
    "nonexistence_probe",
    "prepare_problem",
    "riemann_map",
    "solve_disc",
    "BishopDiscsError",
    "InputError",
    "MathError",
    "ExportPort",
    "IterationInfo",
    "MapSample",
    "SolverObserverPort",
    "SurfaceSpecPort",
    "CsvExportAdapter",
    "JsonSurfaceSpecAdapter",
    "LoggerSolverObserverAdapter",
    "RunReport",
    "SolveHandler",
    "cmd_classify",
    "cmd_examples",
    "cmd_family",
    "cmd_index",
    "cmd_probe",
    "cmd_verify",
]

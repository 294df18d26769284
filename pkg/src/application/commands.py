"""Command functions behind the CLI; each returns a RunReport."""

import hashlib
import json
import time
from dataclasses import asdict, dataclass, field
from typing import Optional, Sequence, Tuple

import psutil

from ..adapters import CsvExportAdapter, JsonSurfaceSpecAdapter
from ..core.bishop import (
    SolveConfig,
    disc_family,
    fixed_point_defect,
    nonexistence_probe,
    prepare_problem,
    solve_disc,
    verify_attachment,
)
from ..core.circle import DEFAULT_GRID
from ..core.conformal import map_table
from ..core.errors import IndexNotPositive, ParameterOutOfRange
from ..core.maslov import index_report
from ..core.surface import (
    PolyZZbar,
    SurfaceGerm,
    example_4_1_epsilon_window,
    make_bishop_quadric,
    make_example_4_1,
    make_power,
    subharmonicity_report,
)
from ..infrastructure.logger import logger
from ..ports import ExportPort, SurfaceSpecPort

EXAMPLE_NAMES = ("bishop-quadric", "example-4-1", "power")
DEFAULT_INDEX_RADIUS = 0.1
Term = Tuple[int, int, float, float]


@dataclass(frozen=True)
class RunReport:
    command: str
    arguments: dict
    input_digest: str
    outputs: dict
    elapsed_seconds: Optional[float] = None

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "RunReport":
        return cls(**json.loads(text))


@dataclass
class _Stopwatch:
    enabled: bool
    started: float = field(default_factory=time.perf_counter)

    def elapsed(self, command: str) -> Optional[float]:
        seconds = time.perf_counter() - self.started
        logger.info(f"{command} finished in {seconds:.3f} s")
        return seconds if self.enabled else None


def resolve_workers(n_workers: int) -> int:
    """0 means one worker per physical core."""
    if n_workers < 0:
        raise ParameterOutOfRange(f"worker count must be >= 0, got {n_workers}")
    if n_workers == 0:
        return psutil.cpu_count(logical=False) or 1
    return n_workers


def _digest(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def _load(spec_path: str, spec_port: Optional[SurfaceSpecPort]) -> Tuple[SurfaceGerm, str]:
    spec_port = spec_port or JsonSurfaceSpecAdapter()
    germ = spec_port.load(spec_path)
    with open(spec_path, "rb") as handle:
        digest = hashlib.sha256(handle.read()).hexdigest()
    return germ, digest


def _index_radius(germ: SurfaceGerm, r: Optional[float]) -> float:
    return DEFAULT_INDEX_RADIUS * germ.radius if r is None else r


def _config_dict(config: SolveConfig) -> dict:
    return asdict(config)


def cmd_index(
    spec_path: str,
    r: Optional[float] = None,
    grid: int = DEFAULT_GRID,
    timing: bool = False,
    spec_port: Optional[SurfaceSpecPort] = None,
) -> RunReport:
    clock = _Stopwatch(timing)
    germ, digest = _load(spec_path, spec_port)
    radius = _index_radius(germ, r)
    report = index_report(germ, radius, grid)
    return RunReport(
        command="index",
        arguments={"spec": spec_path, "r": radius, "grid": grid},
        input_digest=digest,
        outputs=report.to_dict(),
        elapsed_seconds=clock.elapsed("index"),
    )


def cmd_classify(
    spec_path: str,
    r: Optional[float] = None,
    grid: int = DEFAULT_GRID,
    timing: bool = False,
    spec_port: Optional[SurfaceSpecPort] = None,
) -> RunReport:
    """Index, subharmonicity of the leading term and remainder type."""
    clock = _Stopwatch(timing)
    germ, digest = _load(spec_path, spec_port)
    radius = _index_radius(germ, r)
    report = index_report(germ, radius, grid)
    subharmonicity = subharmonicity_report(germ.leading)
    outputs = report.to_dict()
    outputs.update(
        {
            "m": germ.m,
            "everywhere_subharmonic": subharmonicity.everywhere_subharmonic,
            "laplacian_min": subharmonicity.min_value,
            "laplacian_min_angle": subharmonicity.min_angle,
            "subharmonicity_fails_at": list(subharmonicity.fails_at),
            "real_remainder": germ.remainder.hermitian_defect() is None,
        }
    )
    return RunReport(
        command="classify",
        arguments={"spec": spec_path, "r": radius, "grid": grid},
        input_digest=digest,
        outputs=outputs,
        elapsed_seconds=clock.elapsed("classify"),
    )


def _require_positive_index(germ: SurfaceGerm, grid: int) -> int:
    report = index_report(germ, _index_radius(germ, None), grid)
    if not report.is_positive:
        raise IndexNotPositive(
            f"index ≤ 0 (Ind = {report.index}): the leading term changes sign, so no "
            f"family of Bishop discs starts at the singularity; use 'probe' for details"
        )
    return report.index


def cmd_family(
    spec_path: str,
    r_min: float,
    r_max: float,
    steps: int,
    config: Optional[SolveConfig] = None,
    out_csv: Optional[str] = None,
    boundaries_csv: Optional[str] = None,
    n_workers: int = 1,
    timing: bool = False,
    spec_port: Optional[SurfaceSpecPort] = None,
    exporter: Optional[ExportPort] = None,
) -> RunReport:
    clock = _Stopwatch(timing)
    config = config or SolveConfig()
    exporter = exporter or CsvExportAdapter()
    germ, digest = _load(spec_path, spec_port)
    index = _require_positive_index(germ, config.n_samples)
    family = disc_family(
        germ, r_min, r_max, steps, config=config, n_workers=resolve_workers(n_workers)
    )
    if out_csv is not None:
        exporter.write_family(family.records, out_csv)
    if boundaries_csv is not None:
        exporter.write_boundaries(family.discs, boundaries_csv)
    outputs = {
        "index": index,
        "summary": family.summary(),
        "records": [asdict(record) for record in family.records],
    }
    return RunReport(
        command="family",
        arguments={
            "spec": spec_path,
            "r_min": r_min,
            "r_max": r_max,
            "steps": steps,
            "config": _config_dict(config),
            "out": out_csv,
        },
        input_digest=digest,
        outputs=outputs,
        elapsed_seconds=clock.elapsed("family"),
    )


def cmd_probe(
    spec_path: str, timing: bool = False, spec_port: Optional[SurfaceSpecPort] = None
) -> RunReport:
    clock = _Stopwatch(timing)
    germ, digest = _load(spec_path, spec_port)
    report = nonexistence_probe(germ)
    return RunReport(
        command="probe",
        arguments={"spec": spec_path},
        input_digest=digest,
        outputs=report.to_dict(),
        elapsed_seconds=clock.elapsed("probe"),
    )


def cmd_verify(
    spec_path: str,
    r: float,
    config: Optional[SolveConfig] = None,
    map_csv: Optional[str] = None,
    boundaries_csv: Optional[str] = None,
    timing: bool = False,
    spec_port: Optional[SurfaceSpecPort] = None,
    exporter: Optional[ExportPort] = None,
) -> RunReport:
    """Solve one radius and print its attachment and fixed-point certificates."""
    clock = _Stopwatch(timing)
    config = config or SolveConfig()
    exporter = exporter or CsvExportAdapter()
    germ, digest = _load(spec_path, spec_port)
    index = _require_positive_index(germ, config.n_samples)
    problem = prepare_problem(germ, config.n_samples)
    disc = solve_disc(problem, r, config)
    certificate = verify_attachment(disc, germ)
    defect = fixed_point_defect(problem, r, disc.perturbation)
    diagnostics = disc.diagnostics
    if map_csv is not None:
        exporter.write_conformal_map(map_table(problem.cmap, problem.R), map_csv)
    if boundaries_csv is not None:
        exporter.write_boundaries([disc], boundaries_csv)
    outputs = {
        "index": index,
        "r": r,
        "residual": certificate.residual,
        "certified": disc.certified,
        "f1_negative_energy": certificate.f1_negative_energy,
        "f2_negative_energy": certificate.f2_negative_energy,
        "fixed_point_defect": defect,
        "fixed_point_certified": defect < 2.0 * config.tol,
        "sup_norm": disc.sup_norm,
        "iterations": diagnostics.iterations,
        "contraction_ratio": diagnostics.contraction_ratio,
        "ball_escape": diagnostics.ball_escape,
        "kappa": problem.cmap.kappa,
        "g_prime_at_0": problem.cmap.g_prime_at_0,
        "conformal_method": problem.cmap.method,
        "orientation": problem.orientation,
    }
    return RunReport(
        command="verify",
        arguments={"spec": spec_path, "r": r, "config": _config_dict(config)},
        input_digest=digest,
        outputs=outputs,
        elapsed_seconds=clock.elapsed("verify"),
    )


def _remainder(terms: Sequence[Term]) -> PolyZZbar:
    poly = PolyZZbar()
    for mu, nu, re, im in terms:
        poly = poly + PolyZZbar.monomial(int(mu), int(nu), complex(re, im))
    return poly


def build_example(name: str, params: dict) -> SurfaceGerm:
    """Germ for a named example; params may carry 'terms' for the remainder."""
    remainder = _remainder(params.get("terms", ()))
    radius = float(params.get("radius", 1.0))
    if name == "bishop-quadric":
        return make_bishop_quadric(float(params.get("gamma", 0.0)), remainder, radius)
    if name == "example-4-1":
        C = float(params.get("C", 0.5))
        eps = params.get("eps")
        if eps is None:
            lower, upper = example_4_1_epsilon_window(C)
            eps = 0.5 * (lower + upper)
            logger.info(f"eps window for C = {C}: ({lower:.12g}, {upper:.12g}); using {eps:.12g}")
        return make_example_4_1(float(eps), C, remainder, radius)
    if name == "power":
        return make_power(int(params.get("m", 2)), remainder, radius)
    raise ParameterOutOfRange(f"unknown example '{name}'; choose from {', '.join(EXAMPLE_NAMES)}")


def cmd_examples(
    name: str,
    params: Optional[dict] = None,
    out: Optional[str] = None,
    spec_port: Optional[SurfaceSpecPort] = None,
) -> RunReport:
    """Emit the spec of a named example, optionally writing it to out."""
    params = dict(params or {})
    spec_port = spec_port or JsonSurfaceSpecAdapter()
    text = spec_port.dumps(build_example(name, params))
    if out is not None:
        with open(out, "w", encoding="utf-8") as handle:
            handle.write(text + "\n")
        logger.info(f"Wrote example '{name}' to {out}")
    arguments = {key: value for key, value in params.items() if key != "terms"}
    arguments["terms"] = [list(term) for term in params.get("terms", ())]
    return RunReport(
        command="examples",
        arguments={"name": name, "params": arguments, "out": out},
        input_digest=_digest(text),
        outputs={"spec": json.loads(text)},
    )


__all__ = [
    "EXAMPLE_NAMES",
    "RunReport",
    "build_example",
    "cmd_classify",
    "cmd_examples",
    "cmd_family",
    "cmd_index",
    "cmd_probe",
    "cmd_verify",
    "resolve_workers",
]

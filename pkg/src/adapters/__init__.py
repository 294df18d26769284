import csv
import json
from typing import Sequence

from ..core.errors import ParameterOutOfRange, SpecParseError
from ..core.surface import HermitianHomPoly, PolyZZbar, SurfaceGerm
from ..infrastructure.logger import logger
from ..ports import (
    ExportPort,
    IterationInfo,
    MapSample,
    SolverObserverPort,
    SurfaceSpecPort,
)


class LoggerSolverObserverAdapter(SolverObserverPort):
    """Adapter reporting solver progress through the shared logger."""

    def log_iteration(self, info: IterationInfo) -> None:
        ratio = "n/a" if info.ratio is None else f"{info.ratio:.3e}"
        logger.debug(
            f"r={info.r:.6g} step {info.iteration}: |da|={info.step:.3e}, "
            f"ratio={ratio}, holder={info.holder:.3e}"
        )

    def log_ball_escape(self, info: IterationInfo) -> None:
        logger.warning(
            f"r={info.r:.6g}: Hoelder estimate {info.holder:.3e} left the ball "
            f"of radius {info.ball_radius:.3e} at step {info.iteration}"
        )

    def log_converged(self, r: float, iterations: int, residual: float) -> None:
        logger.info(f"r={r:.6g}: converged in {iterations} steps, residual {residual:.3e}")

    def log_failure(self, r: float, reason: str) -> None:
        logger.warning(f"r={r:.6g}: {reason}")


def _terms_to_json(poly: PolyZZbar) -> list:
    return [
        {"mu": mu, "nu": nu, "re": float(c.real), "im": float(c.imag)}
        for (mu, nu), c in poly.terms.items()
    ]


def _terms_from_json(entries, field: str) -> dict:
    if not isinstance(entries, list):
        raise SpecParseError("expected a list of terms", field=field)
    terms = {}
    for position, entry in enumerate(entries):
        location = f"{field}[{position}]"
        if not isinstance(entry, dict):
            raise SpecParseError("term must be an object", field=location)
        for key in ("mu", "nu", "re"):
            if key not in entry:
                raise SpecParseError(f"missing key '{key}'", field=location)
        try:
            mu, nu = int(entry["mu"]), int(entry["nu"])
            coefficient = complex(float(entry["re"]), float(entry.get("im", 0.0)))
        except (TypeError, ValueError) as exc:
            raise SpecParseError(f"bad number: {exc}", field=location) from exc
        if mu < 0 or nu < 0:
            raise SpecParseError("exponents must be nonnegative", field=location)
        key = (mu, nu)
        terms[key] = terms.get(key, 0.0) + coefficient
    return terms


class JsonSurfaceSpecAdapter(SurfaceSpecPort):
    """Adapter for JSON surface specs.

    Format: {"m": int, "leading": [{"mu", "nu", "re", "im"}...],
    "remainder": [...], "radius": float}.
    """

    def load(self, path: str) -> SurfaceGerm:
        try:
            with open(path, "r", encoding="utf-8") as handle:
                text = handle.read()
        except OSError as exc:
            raise SpecParseError(f"cannot read {path}: {exc}") from exc
        return self.loads(text)

    def loads(self, text: str) -> SurfaceGerm:
        try:
            document = json.loads(text)
        except json.JSONDecodeError as exc:
            raise SpecParseError(exc.msg, line=exc.lineno) from exc
        if not isinstance(document, dict):
            raise SpecParseError("spec must be a JSON object")
        for key in ("m", "leading"):
            if key not in document:
                raise SpecParseError("required field is missing", field=key)
        m = document["m"]
        if not isinstance(m, int) or isinstance(m, bool):
            raise SpecParseError("degree must be an integer", field="m")
        try:
            radius = float(document.get("radius", 1.0))
        except (TypeError, ValueError) as exc:
            raise SpecParseError("radius must be a number", field="radius") from exc
        try:
            leading = HermitianHomPoly.from_terms(
                m, _terms_from_json(document["leading"], "leading")
            )
        except ParameterOutOfRange as exc:
            raise SpecParseError(str(exc), field="leading") from exc
        remainder = PolyZZbar(_terms_from_json(document.get("remainder", []), "remainder"))
        if not radius > 0.0:
            raise SpecParseError("radius must be positive", field="radius")
        return SurfaceGerm(leading, remainder, radius)

    def dumps(self, germ: SurfaceGerm) -> str:
        document = {
            "m": germ.m,
            "leading": _terms_to_json(germ.leading.poly),
            "remainder": _terms_to_json(germ.remainder),
            "radius": germ.radius,
        }
        return json.dumps(document, indent=2)


class CsvExportAdapter(ExportPort):
    """Adapter writing family, boundary and map tables as CSV."""

    def write_family(self, records, path: str) -> None:
        with open(path, "w", newline="", encoding="utf-8") as handle:
            writer = csv.writer(handle)
            writer.writerow(
                ["r", "status", "residual", "sup_norm", "contraction_ratio", "iterations", "message"]
            )
            for record in records:
                writer.writerow(
                    [
                        repr(record.r),
                        record.status,
                        "" if record.residual is None else repr(record.residual),
                        "" if record.sup_norm is None else repr(record.sup_norm),
                        "" if record.contraction_ratio is None else repr(record.contraction_ratio),
                        "" if record.iterations is None else record.iterations,
                        record.message,
                    ]
                )
        logger.info(f"Wrote {len(records)} family records to {path}")

    def write_boundaries(self, discs, path: str) -> None:
        with open(path, "w", newline="", encoding="utf-8") as handle:
            writer = csv.writer(handle)
            writer.writerow(["r", "theta", "re_f1", "im_f1", "re_f2", "im_f2"])
            for disc in discs:
                theta = disc.f1_boundary.theta
                f1, f2 = disc.f1_boundary.values, disc.f2_boundary.values
                for k in range(disc.f1_boundary.n_samples):
                    writer.writerow(
                        [
                            repr(disc.r),
                            repr(float(theta[k])),
                            repr(float(f1[k].real)),
                            repr(float(f1[k].imag)),
                            repr(float(f2[k].real)),
                            repr(float(f2[k].imag)),
                        ]
                    )
        logger.info(f"Wrote boundary samples of {len(discs)} discs to {path}")

    def write_conformal_map(self, samples: Sequence[MapSample], path: str) -> None:
        with open(path, "w", newline="", encoding="utf-8") as handle:
            writer = csv.writer(handle)
            writer.writerow(["theta", "re_g", "im_g", "rho", "phi", "R"])
            for sample in samples:
                writer.writerow(
                    [
                        repr(sample.theta),
                        repr(sample.re_g),
                        repr(sample.im_g),
                        repr(sample.rho),
                        repr(sample.phi),
                        repr(sample.R),
                    ]
                )
        logger.info(f"Wrote {len(samples)} conformal map samples to {path}")


__all__ = [
    "CsvExportAdapter",
    "JsonSurfaceSpecAdapter",
    "LoggerSolverObserverAdapter",
]

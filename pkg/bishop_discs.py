#!/usr/bin/env python3
"""
Bishop discs - index classification and disc families at CR singularities.

Reports are printed to stdout as JSON; logs go to stderr. Exit codes are
0 (ok), 1 (input error) and 2 (mathematical failure).
"""

import json
import logging
import sys
from functools import wraps

import asyncclick as click
from src import BishopDiscsError, SolveConfig, logger
from src.application import (
    cmd_classify,
    cmd_examples,
    cmd_family,
    cmd_index,
    cmd_probe,
    cmd_verify,
)
from src.application.commands import EXAMPLE_NAMES


def reporting(command):
    """Print the RunReport of a command, or log the error and exit with its code."""

    @wraps(command)
    async def wrapper(*args, **kwargs):
        try:
            report = await command(*args, **kwargs)
        except BishopDiscsError as exc:
            logger.error(f"{type(exc).__name__}: {exc}")
            sys.exit(exc.exit_code)
        if report is not None:
            click.echo(report.to_json())

    return wrapper


def solver_options(command):
    command = click.option("--grid", type=int, default=1024, show_default=True, help="Circle grid size (power of two).")(command)
    command = click.option("--alpha", type=float, default=0.5, show_default=True, help="Hoelder exponent for diagnostics.")(command)
    command = click.option("--delta", type=float, default=0.75, show_default=True, help="Ball exponent delta in (1/2, 1).")(command)
    command = click.option("--tol", type=float, default=1e-10, show_default=True, help="Fixed-point tolerance.")(command)
    command = click.option("--max-iter", type=int, default=200, show_default=True, help="Fixed-point iteration budget.")(command)
    return command


def _config(grid: int, alpha: float, delta: float, tol: float, max_iter: int) -> SolveConfig:
    return SolveConfig(delta=delta, tol=tol, max_iter=max_iter, alpha=alpha, n_samples=grid)


@click.group()
@click.option("--verbose", "-v", count=True, help="-v for debug output.")
@click.option("--timing", is_flag=True, help="Include wall time in reports.")
@click.pass_context
async def main(ctx, verbose: int, timing: bool):
    """Maslov-type index and Bishop discs of surfaces w = F_m(z) + R(z)."""
    logger.set_level(logging.DEBUG if verbose else logging.INFO)
    ctx.ensure_object(dict)
    ctx.obj["timing"] = timing


@main.command()
@click.argument("spec", type=click.Path(exists=True, dir_okay=False))
@click.option("--r", "radius", type=float, default=None, help="Circle radius for the winding formula.")
@click.option("--grid", type=int, default=1024, show_default=True)
@click.pass_context
@reporting
async def index(ctx, spec: str, radius, grid: int):
    """Index by the three formulas, with agreement flag."""
    return cmd_index(spec, radius, grid, timing=ctx.obj["timing"])


@main.command()
@click.argument("spec", type=click.Path(exists=True, dir_okay=False))
@click.option("--r", "radius", type=float, default=None)
@click.option("--grid", type=int, default=1024, show_default=True)
@click.pass_context
@reporting
async def classify(ctx, spec: str, radius, grid: int):
    """Index plus subharmonicity of the leading term."""
    return cmd_classify(spec, radius, grid, timing=ctx.obj["timing"])


@main.command()
@click.argument("spec", type=click.Path(exists=True, dir_okay=False))
@click.option("--r-min", type=float, required=True)
@click.option("--r-max", type=float, required=True)
@click.option("--steps", type=int, default=10, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), default=None, help="Family CSV.")
@click.option("--boundaries", type=click.Path(dir_okay=False), default=None, help="Boundary samples CSV.")
@click.option("--workers", type=int, default=1, show_default=True, help="Worker processes; 0 = physical cores.")
@solver_options
@click.pass_context
@reporting
async def family(ctx, spec, r_min, r_max, steps, out, boundaries, workers, grid, alpha, delta, tol, max_iter):
    """Solve Bishop's equation on a grid of radii."""
    return cmd_family(
        spec,
        r_min,
        r_max,
        steps,
        config=_config(grid, alpha, delta, tol, max_iter),
        out_csv=out,
        boundaries_csv=boundaries,
        n_workers=workers,
        timing=ctx.obj["timing"],
    )


@main.command()
@click.argument("spec", type=click.Path(exists=True, dir_okay=False))
@click.option("--r", "radius", type=float, required=True)
@click.option("--map-out", type=click.Path(dir_okay=False), default=None, help="Conformal map CSV.")
@click.option("--boundaries", type=click.Path(dir_okay=False), default=None)
@solver_options
@click.pass_context
@reporting
async def verify(ctx, spec, radius, map_out, boundaries, grid, alpha, delta, tol, max_iter):
    """Solve one radius and report its certificates."""
    return cmd_verify(
        spec,
        radius,
        config=_config(grid, alpha, delta, tol, max_iter),
        map_csv=map_out,
        boundaries_csv=boundaries,
        timing=ctx.obj["timing"],
    )


@main.command()
@click.argument("spec", type=click.Path(exists=True, dir_okay=False))
@click.pass_context
@reporting
async def probe(ctx, spec: str):
    """Sign-change witnesses for a germ of nonpositive index."""
    return cmd_probe(spec, timing=ctx.obj["timing"])


@main.command()
@click.argument("name", type=click.Choice(EXAMPLE_NAMES))
@click.option("--gamma", type=float, default=0.0, show_default=True)
@click.option("--eps", type=float, default=None, help="Defaults to the middle of the admissible window.")
@click.option("--C", "C", type=float, default=0.5, show_default=True)
@click.option("--m", type=int, default=2, show_default=True)
@click.option("--radius", type=float, default=1.0, show_default=True)
@click.option("--term", "terms", type=(int, int, float, float), multiple=True, help="Remainder term MU NU RE IM.")
@click.option("--out", type=click.Path(dir_okay=False), default=None)
@reporting
async def examples(name, gamma, eps, C, m, radius, terms, out):
    """Emit the spec of a named example surface."""
    params = {"gamma": gamma, "eps": eps, "C": C, "m": m, "radius": radius, "terms": terms}
    report = cmd_examples(name, params, out)
    if out is None:
        click.echo(json.dumps(report.outputs["spec"], indent=2))
        return None
    return report


if __name__ == "__main__":
    main()

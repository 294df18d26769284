"""Application layer: worker pool and CLI command functions."""

from .commands import (
    RunReport,
    build_example,
    cmd_classify,
    cmd_examples,
    cmd_family,
    cmd_index,
    cmd_probe,
    cmd_verify,
    resolve_workers,
)
from .solve_handler import SolveHandler

__all__ = [
    "RunReport",
    "SolveHandler",
    "build_example",
    "cmd_classify",
    "cmd_examples",
    "cmd_family",
    "cmd_index",
    "cmd_probe",
    "cmd_verify",
    "resolve_workers",
]

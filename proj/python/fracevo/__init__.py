"""Python bindings for the fracevo series solver."""

from __future__ import annotations

import io
import json
import os
from typing import Any, Iterable

import numpy as np

from . import _core
from ._core import FracevoError, SCHEMA_VERSION, indicator_positivity, rl_mode_identity, run

__all__ = [
    "FracevoError",
    "SCHEMA_VERSION",
    "Trajectory",
    "analyze",
    "h_coefficients",
    "indicator_positivity",
    "load_config",
    "phi_alpha",
    "rl_mode_identity",
    "run",
    "solve",
    "verify",
]


def _text(config: Any) -> str:
    if isinstance(config, dict):
        return json.dumps(config)
    if isinstance(config, (str, os.PathLike)) and os.path.exists(config):
        with open(config, encoding="utf-8") as fh:
            return fh.read()
    if isinstance(config, str):
        return config
    raise TypeError("config must be a dict, a JSON string or a path")


def load_config(config: Any) -> dict:
    """Validated, normalized config as a dict."""
    return json.loads(_core.normalize_config(_text(config)))


def analyze(config: Any) -> tuple[int, dict]:
    code, report = _core.analyze(_text(config))
    return code, json.loads(report)


class Trajectory:
    """Solution samples: times (T,) and u (T, N) complex."""

    def __init__(self, exit_code: int, report: dict, csv: str):
        self.exit_code = exit_code
        self.report = report
        if csv:
            data = np.loadtxt(io.StringIO(csv), delimiter=",", skiprows=1, ndmin=2)
            self.times = data[:, 0]
            self.u = data[:, 1::2] + 1j * data[:, 2::2]
        else:
            self.times = np.empty(0)
            self.u = np.empty((0, 0), dtype=complex)

    @property
    def ok(self) -> bool:
        return self.exit_code == 0


def solve(config: Any, force: bool = False, corrupt: bool = False) -> Trajectory:
    code, report, csv = _core.solve(_text(config), force, corrupt)
    return Trajectory(code, json.loads(report), csv)


def verify(config: Any, checks: Iterable[str] = (), force: bool = False, corrupt: bool = False) -> tuple[int, dict]:
    code, report = _core.verify(_text(config), list(checks), force, corrupt)
    return code, json.loads(report)


def phi_alpha(function: dict, alpha: float, lam: complex) -> complex:
    return _core.phi_alpha(json.dumps(function), alpha, lam)


def h_coefficients(function: dict, alpha: float, t: float, mu: complex, order: int) -> list[complex]:
    return _core.h_coefficients(json.dumps(function), alpha, t, mu, order)

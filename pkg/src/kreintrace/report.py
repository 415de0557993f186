"""Run configuration and verification reports."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from typing import Any

import numpy as np

from .errors import BadArgument

DERIVATIVE_TOL = 1e-5
MIN_ORDER = 0.9
# Rounding in a difference quotient is about eps * |f(X)| / t; errors below
# EXACT_FLOOR times that carry no information about the order.
EXACT_FLOOR = 1e3


@dataclass(frozen=True)
class RunConfig:
    tol: float = 1e-8
    quad_nodes: int = 64
    fourier_order: int = 32
    trials: int = 200
    seed: int = 0

    def __post_init__(self):
        if not 0 < self.tol < 1:
            raise BadArgument("tol must lie in (0, 1)")
        for name in ("quad_nodes", "fourier_order", "trials"):
            if getattr(self, name) < 1:
                raise BadArgument(f"{name} must be positive")
        if self.seed < 0:
            raise BadArgument("seed must be nonnegative")

    def as_dict(self) -> dict:
        return asdict(self)


def _jsonable(value):
    if isinstance(value, (complex, np.complexfloating)):
        return [float(value.real), float(value.imag)]
    if isinstance(value, np.ndarray):
        return [_jsonable(v) for v in value.tolist()]
    if isinstance(value, (np.floating, np.integer, np.bool_)):
        return value.item()
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


@dataclass
class VerificationReport:
    """Outcome of one identity check: both sides, their distance and the verdict."""

    lhs: complex
    rhs: complex
    residual: float
    tol: float
    passed: bool
    meta: dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "lhs": _jsonable(complex(self.lhs)),
            "rhs": _jsonable(complex(self.rhs)),
            "residual": float(self.residual),
            "tol": float(self.tol),
            "pass": bool(self.passed),
            "meta": _jsonable(self.meta),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def fitted_order(ts, errs) -> float:
    """Least-squares slope of log err against log t."""
    ts = np.asarray(ts, dtype=float)
    errs = np.asarray(errs, dtype=float)
    slope, _ = np.polyfit(np.log(ts), np.log(errs), 1)
    return float(slope)


def rounding_floor(value_norm: float, t_min: float) -> float:
    return EXACT_FLOOR * float(np.finfo(float).eps) * (1.0 + value_norm) / t_min


def derivative_report(ts, errs, tol, meta, floor: float = 0.0) -> VerificationReport:
    """Order is fitted on log-log data; errors all below ``floor`` count as exact."""
    ts = [float(t) for t in ts]
    errs = [float(e) for e in errs]
    if max(errs) <= floor:
        order = math.inf
        passed = True
    else:
        order = fitted_order(ts, np.maximum(errs, 1e-300))
        passed = order >= MIN_ORDER and errs[-1] <= tol
    meta = dict(meta, t=ts, err=errs, order=order, min_order=MIN_ORDER, rounding_floor=floor)
    return VerificationReport(errs[-1], 0.0, errs[-1], tol, passed, meta)


def check_t_list(t_list) -> list[float]:
    ts = [float(t) for t in t_list]
    if not ts or any(t <= 0 for t in ts) or any(b >= a for a, b in zip(ts, ts[1:])):
        raise ValueError("t_list must be positive and strictly decreasing")
    return ts

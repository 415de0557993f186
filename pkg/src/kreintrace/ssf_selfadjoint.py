"""Spectral shift function of a Hermitian pair and the trace formula on the line.

    trace(f(A) - f(B)) = int_R f'(t) xi(t) dt,   xi = N_B - N_A,

where N_X(t) counts eigenvalues of X that are <= t.  Functions are real
polynomials, so both sides are exact up to rounding.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from numpy.polynomial import Polynomial

from . import linalg
from .errors import DimensionMismatch
from .report import DERIVATIVE_TOL, RunConfig, VerificationReport, check_t_list, derivative_report, rounding_floor


@dataclass(frozen=True)
class StepFunction:
    """Compactly supported step function: values[i] on [breakpoints[i], breakpoints[i+1])."""

    breakpoints: np.ndarray
    values: np.ndarray

    @property
    def intervals(self) -> list[tuple[float, float, float]]:
        b = self.breakpoints
        return [(float(b[i]), float(b[i + 1]), float(self.values[i])) for i in range(len(self.values))]

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        if len(self.values) == 0:
            return np.zeros(np.shape(t))
        idx = np.searchsorted(self.breakpoints, t, side="right") - 1
        inside = (idx >= 0) & (idx < len(self.values))
        return np.where(inside, self.values[np.clip(idx, 0, len(self.values) - 1)], 0.0)

    def integral(self) -> float:
        return float(np.sum(self.values * np.diff(self.breakpoints))) if len(self.values) else 0.0


def _check_pair(A, B) -> tuple[np.ndarray, np.ndarray]:
    A = linalg.check_hermitian(A)
    B = linalg.check_hermitian(B)
    if A.shape != B.shape:
        raise DimensionMismatch(f"A is {A.shape}, B is {B.shape}")
    return A, B


def ssf_counting_sa(A, B) -> StepFunction:
    """xi(t) = #{eig(B) <= t} - #{eig(A) <= t}."""
    A, B = _check_pair(A, B)
    la = linalg.herm_eig(A).eigenvalues
    lb = linalg.herm_eig(B).eigenvalues
    pts = np.unique(np.concatenate([la, lb]))
    after = (np.searchsorted(lb, pts, side="right") - np.searchsorted(la, pts, side="right")).astype(float)
    before = np.append(0.0, after[:-1])
    jumps = after != before
    if not np.any(jumps):
        return StepFunction(np.zeros(0), np.zeros(0))
    return StepFunction(pts[jumps], after[jumps][:-1])


def polynomial(coeffs: Sequence[float]) -> Polynomial:
    """Real polynomial from ascending coefficients."""
    c = np.asarray(coeffs, dtype=float)
    if c.ndim != 1 or len(c) == 0:
        raise ValueError("polynomial needs at least one coefficient")
    return Polynomial(c)


def poly_of_matrix(p: Polynomial, M: np.ndarray) -> np.ndarray:
    """p(M) by Horner's rule."""
    out = np.zeros_like(M, dtype=complex)
    eye = np.eye(M.shape[0])
    for c in p.coef[::-1]:
        out = out @ M + c * eye
    return out


def _poly_tol(p: Polynomial, radius: float, tol: float) -> float:
    deg = p.degree()
    return tol * (1.0 + deg * float(np.max(np.abs(p.coef))) * radius**deg)


def verify_trace_formula_sa(A, B, p: Polynomial, cfg: RunConfig | None = None) -> VerificationReport:
    """trace(p(A) - p(B)) by Horner against the exact interval sum of p' xi."""
    cfg = cfg or RunConfig()
    A, B = _check_pair(A, B)
    lhs = complex(np.trace(poly_of_matrix(p, A) - poly_of_matrix(p, B)))
    xi = ssf_counting_sa(A, B)
    if len(xi.values):
        pv = p(xi.breakpoints)
        rhs = complex(np.sum(xi.values * np.diff(pv)))
    else:
        rhs = 0j
    radius = max(linalg.op_norm(A), linalg.op_norm(B))
    tol = _poly_tol(p, radius, cfg.tol)
    residual = abs(lhs - rhs)
    meta = {
        "check": "trace_formula_selfadjoint",
        "degree": int(p.degree()),
        "dim": A.shape[0],
        "spectral_radius": radius,
        "config": cfg.as_dict(),
    }
    return VerificationReport(lhs, rhs, residual, tol, residual <= tol, meta)


def real_divided_difference(p: Polynomial, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Matrix of (p(x_i) - p(y_j)) / (x_i - y_j), exact on the diagonal.

    Uses D t**k (x, y) = sum_{j+l=k-1} x**j y**l, so nothing cancels.
    """
    c = p.coef
    k = len(c) - 1
    if k < 1:
        return np.zeros((len(x), len(y)))
    H = np.zeros((k, k))
    for j in range(k):
        for l in range(k - j):
            H[j, l] = c[j + l + 1]
    X = np.asarray(x, dtype=float)[:, None] ** np.arange(k)
    Y = np.asarray(y, dtype=float)[:, None] ** np.arange(k)
    return X @ H @ Y.T


def derivative_check_sa(
    A, K, p: Polynomial, t_list: Sequence[float], tol: float | None = None
) -> VerificationReport:
    """Finite differences of t -> p(A + tK) against the double operator integral, in Frobenius norm."""
    A = linalg.check_hermitian(A)
    K = linalg.check_hermitian(K)
    if A.shape != K.shape:
        raise DimensionMismatch(f"A is {A.shape}, K is {K.shape}")
    ts = check_t_list(t_list)
    E = linalg.herm_eig(A)
    W = E.vectors
    L = real_divided_difference(p, E.eigenvalues, E.eigenvalues)
    D = W @ (L * (W.conj().T @ K @ W)) @ W.conj().T
    pA = poly_of_matrix(p, A)
    errs = [float(np.linalg.norm((poly_of_matrix(p, A + t * K) - pA) / t - D)) for t in ts]
    if tol is None:
        n = np.arange(len(p.coef))
        tol = DERIVATIVE_TOL * (1.0 + float(np.sum(np.abs(p.coef) * n**2)))
    meta = {"check": "derivative_selfadjoint", "norm": "frobenius", "dim": A.shape[0]}
    floor = rounding_floor(float(np.linalg.norm(pA)), ts[-1])
    return derivative_report(ts, errs, tol, meta, floor)

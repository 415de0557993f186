"""Spectral shift function of a unitary pair and the trace formula on the circle.

For unitaries U, V the spectral shift function xi satisfies

    trace(f(U) - f(V)) = int_T f'(zeta) xi(zeta) dzeta,   mean(xi) = 0.

In finite dimension xi is a step function.  Writing f'(zeta) dzeta as
d f(e^{i theta}) and integrating by parts forces a jump of -1 at each
eigenvalue of U and +1 at each eigenvalue of V (counterclockwise).

Three independent routes to xi are provided: eigenvalue counting, Fourier
coefficients from trace(U^n - V^n), and the homotopy V_s = exp(isA) U with
the measure nu = -int_0^1 nu_s ds, nu_s(D) = trace(E_s(D) A).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import linalg
from .circlefn import CircleFunction, rotate
from .doi import divided_difference_grid, doi_apply
from .errors import DimensionMismatch
from .linalg import UnitaryEigen, dagger
from .report import DERIVATIVE_TOL, RunConfig, VerificationReport, check_t_list, derivative_report, rounding_floor

TWO_PI = 2 * math.pi
# Eigenvalue angles closer than this count as one breakpoint.
MERGE_TOL = 1e-12

# How the path-method constants were pinned against the counting oracle.
PATH_CONVENTION = (
    "trace Q_s = i * sum_k lambda_k f'(lambda_k) <A w_k, w_k>; "
    "nu = -int_0^1 nu_s ds; xi_hat(m) = moment(-m) / (2 pi), m != 0"
)


@dataclass(frozen=True)
class SpectralShift:
    """Piecewise-constant function on the circle.

    ``values[i]`` is taken on the arc from ``breakpoints[i]`` to
    ``breakpoints[i + 1]``; the last arc wraps to ``breakpoints[0] + 2 pi``.
    With no breakpoints the function is the constant ``values[0]``.
    """

    breakpoints: np.ndarray
    values: np.ndarray

    @property
    def arcs(self) -> list[tuple[float, float, float]]:
        b = self.breakpoints
        if len(b) == 0:
            return [(-math.pi, math.pi, float(self.values[0]))]
        ends = np.append(b[1:], b[0] + TWO_PI)
        return [(float(s), float(e), float(v)) for s, e, v in zip(b, ends, self.values)]

    @property
    def arclengths(self) -> np.ndarray:
        b = self.breakpoints
        if len(b) == 0:
            return np.array([TWO_PI])
        return np.append(np.diff(b), b[0] + TWO_PI - b[-1])

    def mean(self) -> float:
        return float(np.sum(self.values * self.arclengths) / TWO_PI)

    @property
    def jumps(self) -> np.ndarray:
        """Change of value when crossing each breakpoint counterclockwise."""
        if len(self.breakpoints) == 0:
            return np.zeros(0)
        return self.values - np.roll(self.values, 1)

    def __call__(self, theta):
        theta = np.mod(np.asarray(theta, dtype=float) + math.pi, TWO_PI) - math.pi
        if len(self.breakpoints) == 0:
            return np.full(np.shape(theta), self.values[0])
        idx = np.searchsorted(self.breakpoints, theta, side="right") - 1
        return self.values[idx]

    def rotated(self, angle: float) -> "SpectralShift":
        """xi(e^{-i angle} .), breakpoints moved by ``angle``."""
        if len(self.breakpoints) == 0:
            return self
        b = np.mod(self.breakpoints + angle + math.pi, TWO_PI) - math.pi
        b = np.where(b <= -math.pi, math.pi, b)
        order = np.argsort(b, kind="stable")
        return SpectralShift(b[order], self.values[order])


@dataclass(frozen=True)
class AtomicMeasure:
    """Finitely supported complex measure on the circle."""

    angles: np.ndarray
    weights: np.ndarray

    @property
    def atoms(self) -> list[tuple[float, complex]]:
        return list(zip(self.angles.tolist(), self.weights.tolist()))

    @property
    def total_variation(self) -> float:
        return float(np.sum(np.abs(self.weights)))

    @property
    def total_mass(self) -> complex:
        return complex(np.sum(self.weights))

    def moment(self, n: int) -> complex:
        """int zeta**n dnu."""
        return complex(np.sum(self.weights * np.exp(1j * n * self.angles)))


@dataclass(frozen=True)
class PathSample:
    s: float
    quad_weight: float
    eigen: UnitaryEigen
    atom_weights: np.ndarray


def _check_pair(U, V) -> tuple[np.ndarray, np.ndarray]:
    U = linalg.check_unitary(U)
    V = linalg.check_unitary(V)
    if U.shape != V.shape:
        raise DimensionMismatch(f"U is {U.shape}, V is {V.shape}")
    return U, V


def _step_from_jumps(angles: np.ndarray, jumps: np.ndarray) -> SpectralShift:
    """Mean-zero step function with the given jumps; coincident angles are merged."""
    order = np.argsort(angles, kind="stable")
    angles, jumps = angles[order], jumps[order]
    merged_a: list[float] = []
    merged_j: list[float] = []
    for a, j in zip(angles, jumps):
        if merged_a and a - merged_a[-1] <= MERGE_TOL:
            merged_j[-1] += j
        else:
            merged_a.append(float(a))
            merged_j.append(float(j))
    # -pi + 0 and pi are the same point of the circle
    if len(merged_a) > 1 and merged_a[0] + TWO_PI - merged_a[-1] <= MERGE_TOL:
        merged_j[-1] += merged_j.pop(0)
        merged_a.pop(0)
    keep = [k for k, j in enumerate(merged_j) if j != 0]
    if not keep:
        return SpectralShift(np.zeros(0), np.zeros(1))
    b = np.array([merged_a[k] for k in keep])
    jumps = np.array([merged_j[k] for k in keep])
    raw = np.cumsum(np.append(0.0, jumps[1:]))
    lengths = np.append(np.diff(b), b[0] + TWO_PI - b[-1])
    raw = raw - np.sum(raw * lengths) / TWO_PI
    return SpectralShift(b, raw)


def ssf_counting(U, V) -> SpectralShift:
    """Exact spectral shift of a unitary pair from the two spectra."""
    U, V = _check_pair(U, V)
    au = linalg.unitary_eig(U).angles
    av = linalg.unitary_eig(V).angles
    angles = np.concatenate([au, av])
    jumps = np.concatenate([-np.ones(len(au)), np.ones(len(av))])
    return _step_from_jumps(angles, jumps)


def integrate_against(xi: SpectralShift, f: CircleFunction) -> complex:
    """int_T f'(zeta) xi(zeta) dzeta, summed exactly arc by arc."""
    if len(xi.breakpoints) == 0:
        return 0j
    pts = f(np.exp(1j * xi.breakpoints))
    return complex(np.sum(xi.values * (np.roll(pts, -1) - pts)))


def step_fourier_coefficients(xi: SpectralShift, order: int) -> dict[int, complex]:
    """Closed-form Fourier coefficients (1/2pi) int xi(theta) e^{-im theta} dtheta, 1 <= |m| <= order."""
    out = {}
    for m in _frequencies(order):
        total = 0j
        for start, end, value in xi.arcs:
            total += value * (np.exp(-1j * m * end) - np.exp(-1j * m * start)) / (-1j * m)
        out[m] = complex(total / TWO_PI)
    return out


def _frequencies(order: int) -> list[int]:
    return [m for m in range(-order, order + 1) if m != 0]


def ssf_fourier(U, V, N: int) -> dict[int, complex]:
    """Fourier coefficients of xi from traces of powers: xi_hat(-n) = trace(U^n - V^n) / (2 pi i n)."""
    if N < 1:
        raise ValueError("N must be at least 1")
    U, V = _check_pair(U, V)
    traces = {}
    Pu, Pv = U.copy(), V.copy()
    for n in range(1, N + 1):
        d = complex(np.trace(Pu) - np.trace(Pv))
        traces[n] = d
        traces[-n] = d.conjugate()
        Pu, Pv = Pu @ U, Pv @ V
    return {m: traces[-m] / (TWO_PI * 1j * (-m)) for m in _frequencies(N)}


def gauss_legendre_unit(nodes: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights on [0, 1]."""
    x, w = np.polynomial.legendre.leggauss(nodes)
    return 0.5 * (x + 1.0), 0.5 * w


def path_generator(U, V) -> np.ndarray:
    """Hermitian A with V = exp(iA) U (principal branch)."""
    U, V = _check_pair(U, V)
    if np.array_equal(U, V):
        return np.zeros_like(U, dtype=complex)
    return linalg.principal_log_unitary(V @ dagger(U))


def path_decompose(U, V, nodes: int) -> list[PathSample]:
    """Spectral data of V_s = exp(isA) U at the Gauss-Legendre nodes on [0, 1]."""
    if nodes < 2:
        raise ValueError("nodes must be at least 2")
    A = path_generator(U, V)
    U = linalg.as_matrix(U)
    EA = linalg.herm_eig(A)
    samples = []
    for s, w in zip(*gauss_legendre_unit(nodes)):
        Vs = EA.exp_i(s) @ U
        E = linalg.unitary_eig(Vs)
        a = np.einsum("ik,ij,jk->k", E.vectors.conj(), A, E.vectors).real
        samples.append(PathSample(float(s), float(w), E, a))
    return samples


def path_nu(samples: Sequence[PathSample]) -> AtomicMeasure:
    """nu = -int_0^1 nu_s ds, discretized by the quadrature of the samples."""
    if not samples:
        raise ValueError("no path samples")
    angles = np.concatenate([p.eigen.angles for p in samples])
    weights = np.concatenate([-p.quad_weight * p.atom_weights for p in samples]).astype(complex)
    return AtomicMeasure(angles, weights)


def xi_from_nu(nu: AtomicMeasure, order: int) -> dict[int, complex]:
    """Fourier coefficients of xi read off the moments of nu: xi_hat(m) = M_{-m} / (2 pi)."""
    return {m: nu.moment(-m) / TWO_PI for m in _frequencies(order)}


def _transport_kernel(f: CircleFunction, E: UnitaryEigen) -> np.ndarray:
    """i tau (Df)(zeta, tau) on the spectrum of E."""
    lam = E.eigenvalues
    return 1j * divided_difference_grid(f, lam, lam) * lam[None, :]


def trace_formula_path(U, V, f: CircleFunction, nodes: int) -> complex:
    """Quadrature of int_0^1 trace(d/ds f(V_s)) ds, an approximation of trace(f(V) - f(U))."""
    U, V = _check_pair(U, V)
    A = path_generator(U, V)
    total = 0j
    for p in path_decompose(U, V, nodes):
        Q = doi_apply(_transport_kernel(f, p.eigen), p.eigen, p.eigen, A)
        total += p.quad_weight * np.trace(Q)
    return complex(total)


def _scale(f: CircleFunction) -> float:
    return 1.0 + f.weighted_l1(1) if f.has_coeffs else 1.0


def verify_trace_formula(U, V, f: CircleFunction, cfg: RunConfig | None = None) -> VerificationReport:
    """Compare trace(f(U) - f(V)) with the integral of f' against the counting xi."""
    cfg = cfg or RunConfig()
    U, V = _check_pair(U, V)
    lhs = complex(np.trace(f.of_unitary(U) - f.of_unitary(V)))
    xi = ssf_counting(U, V)
    rhs = integrate_against(xi, f)
    tol = cfg.tol * _scale(f)
    residual = abs(lhs - rhs)
    meta = {
        "check": "trace_formula_unitary",
        "function_kind": f.kind,
        "dim": U.shape[0],
        "breakpoints": len(xi.breakpoints),
        "config": cfg.as_dict(),
    }
    if not f.has_coeffs:
        meta["note"] = "function is outside the operator Lipschitz class tested here"
    return VerificationReport(lhs, rhs, residual, tol, residual <= tol, meta)


def derivative_check(
    U, A, f: CircleFunction, t_list: Sequence[float], tol: float | None = None
) -> VerificationReport:
    """Finite differences of t -> f(exp(itA) U) against the double operator integral derivative.

    The default tolerance on err(t_min) is 1e-5 (1 + sum |c_n| n^2).
    """
    U = linalg.check_unitary(U)
    A = linalg.check_hermitian(A)
    if A.shape != U.shape:
        raise DimensionMismatch(f"U is {U.shape}, A is {A.shape}")
    ts = check_t_list(t_list)
    EU = linalg.unitary_eig(U)
    D = doi_apply(_transport_kernel(f, EU), EU, EU, A)
    EA = linalg.herm_eig(A)
    fU = f.of_unitary(U, EU)
    errs = [linalg.op_norm((f.of_unitary(EA.exp_i(t) @ U) - fU) / t - D) for t in ts]
    if tol is None:
        tol = DERIVATIVE_TOL * (1.0 + (f.weighted_l1(2) if f.has_coeffs else 0.0))
    meta = {"check": "derivative_unitary", "norm": "operator", "dim": U.shape[0]}
    floor = rounding_floor(linalg.op_norm(fU), ts[-1])
    return derivative_report(ts, errs, tol, meta, floor)


@dataclass(frozen=True)
class WindingProfile:
    angles: np.ndarray
    direct: np.ndarray
    via_xi: np.ndarray

    @property
    def residuals(self) -> np.ndarray:
        return np.abs(self.direct - self.via_xi)

    @property
    def max_residual(self) -> float:
        return float(np.max(self.residuals))

    @property
    def max_jump(self) -> float:
        """Largest change of the direct profile between neighbouring grid points."""
        return float(np.max(np.abs(np.roll(self.direct, -1) - self.direct)))


def winding_profile(U, V, f: CircleFunction, grid: int) -> WindingProfile:
    """zeta -> trace(f(zeta U) - f(zeta V)), directly and through xi of (U, V)."""
    if grid < 2:
        raise ValueError("grid must be at least 2")
    U, V = _check_pair(U, V)
    xi = ssf_counting(U, V)
    angles = TWO_PI * np.arange(grid) / grid
    direct = np.empty(grid, dtype=complex)
    via_xi = np.empty(grid, dtype=complex)
    EU = None if f.has_coeffs else linalg.unitary_eig(U)
    EV = None if f.has_coeffs else linalg.unitary_eig(V)
    for k, theta in enumerate(angles):
        zeta = np.exp(1j * theta)
        if f.has_coeffs:
            direct[k] = np.trace(f.of_unitary(zeta * U) - f.of_unitary(zeta * V))
        else:
            fz = rotate(f, zeta)
            direct[k] = np.trace(
                linalg.matrix_function(EU, fz) - linalg.matrix_function(EV, fz)
            )
        via_xi[k] = integrate_against(xi, rotate(f, zeta))
    return WindingProfile(angles, direct, via_xi)


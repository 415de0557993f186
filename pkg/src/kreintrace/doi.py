"""Divided differences, double operator integrals and Schur multiplier norms.

In finite dimension the double operator integral

    T  ->  iint Phi(zeta, tau) dE1(zeta) T dE2(tau)

is conjugated Schur (entrywise) multiplication by the kernel matrix
``Phi(lambda_i, mu_j)`` sampled on the two spectra.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import linalg
from .circlefn import CircleFunction, trig_poly
from .errors import DimensionMismatch, UnsupportedKind, ZeroDegree
from .linalg import UnitaryEigen, dagger

TOL_DIAG = 1e-7
PERTURBATION_SCALES = (1.0, 0.1, 0.01)


# ---------------------------------------------------------------------------
# Divided differences
# ---------------------------------------------------------------------------


def _monomial_loewner(coeffs, zs: np.ndarray, ts: np.ndarray) -> np.ndarray:
    """Divided difference of sum c_n z**n on the grid zs x ts, without cancellation.

    For n > 0 the divided difference of z**n is sum_{j+k=n-1} zeta**j tau**k,
    for n = -m < 0 it is -sum_{a+b=m+1, a,b>=1} zeta**-a tau**-b; both are
    Hankel quadratic forms in the power vectors.
    """
    pos = max((n for n in coeffs if n > 0), default=0)
    neg = max((-n for n in coeffs if n < 0), default=0)
    out = np.zeros((len(zs), len(ts)), dtype=complex)
    if pos:
        Hp = np.zeros((pos, pos), dtype=complex)
        for j in range(pos):
            for k in range(pos - j):
                Hp[j, k] = coeffs.get(j + k + 1, 0)
        Zp = zs[:, None] ** np.arange(pos)
        Tp = ts[:, None] ** np.arange(pos)
        out += Zp @ Hp @ Tp.T
    if neg:
        Hn = np.zeros((neg, neg), dtype=complex)
        for a in range(neg):
            for b in range(neg - a):
                Hn[a, b] = -coeffs.get(-(a + b + 1), 0)
        Zn = zs[:, None] ** -np.arange(1, neg + 1)
        Tn = ts[:, None] ** -np.arange(1, neg + 1)
        out += Zn @ Hn @ Tn.T
    return out


def divided_difference_grid(f: CircleFunction, zs, ts) -> np.ndarray:
    """Matrix of (Df)(zs[i], ts[j])."""
    zs = np.atleast_1d(np.asarray(zs, dtype=complex))
    ts = np.atleast_1d(np.asarray(ts, dtype=complex))
    if f.coeffs is not None:
        return _monomial_loewner(f.coeffs, zs, ts)
    Z = zs[:, None]
    T = ts[None, :]
    diff = Z - T
    near = np.abs(diff) <= TOL_DIAG
    out = np.empty(diff.shape, dtype=complex)
    far = ~near
    if np.any(far):
        fz = f(zs)[:, None] * np.ones_like(diff)
        ft = f(ts)[None, :] * np.ones_like(diff)
        out[far] = (fz[far] - ft[far]) / diff[far]
    if np.any(near):
        rows = np.nonzero(near)[0]
        out[near] = f.deriv(zs[rows])
    return out


def divided_difference(f: CircleFunction, zeta: complex, tau: complex) -> complex:
    """(f(zeta) - f(tau)) / (zeta - tau), and f'(zeta) when |zeta - tau| <= 1e-7."""
    return complex(divided_difference_grid(f, [zeta], [tau])[0, 0])


@dataclass(frozen=True)
class KernelMatrix:
    """A kernel Phi sampled on two spectral grids: values[i, j] = Phi(lambda_i, mu_j)."""

    values: np.ndarray

    @property
    def rows(self) -> int:
        return self.values.shape[0]

    @property
    def cols(self) -> int:
        return self.values.shape[1]


def _values(K) -> np.ndarray:
    return K.values if isinstance(K, KernelMatrix) else np.asarray(K, dtype=complex)


def loewner_kernel(f: CircleFunction, E1: UnitaryEigen, E2: UnitaryEigen) -> KernelMatrix:
    return KernelMatrix(divided_difference_grid(f, E1.eigenvalues, E2.eigenvalues))


def doi_apply(K, E1: UnitaryEigen, E2: UnitaryEigen, T: np.ndarray) -> np.ndarray:
    """W1 (K o (W1^* T W2)) W2^*."""
    Kv = _values(K)
    T = np.asarray(T, dtype=complex)
    if Kv.shape != (E1.dim, E2.dim) or T.shape != (E1.dim, E2.dim):
        raise DimensionMismatch(
            f"kernel {Kv.shape}, operator {T.shape}, spectra {E1.dim}x{E2.dim}"
        )
    inner = dagger(E1.vectors) @ T @ E2.vectors
    return E1.vectors @ (Kv * inner) @ dagger(E2.vectors)


def doi_trace(K, E: UnitaryEigen, T: np.ndarray) -> complex:
    """trace of the double operator integral over (E, E), from the kernel diagonal alone."""
    Kv = _values(K)
    T = np.asarray(T, dtype=complex)
    if Kv.shape != (E.dim, E.dim) or T.shape != (E.dim, E.dim):
        raise DimensionMismatch(f"kernel {Kv.shape}, operator {T.shape}, spectrum {E.dim}")
    mu = np.einsum("ik,ij,jk->k", E.vectors.conj(), T, E.vectors)
    return complex(np.sum(np.diagonal(Kv) * mu))


# ---------------------------------------------------------------------------
# Haagerup representations
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class HaagerupRep:
    """Phi(zeta, tau) = sum_k phi_k(zeta) psi_k(tau) with square-sum bounds on each side."""

    terms: tuple[tuple[CircleFunction, CircleFunction], ...]
    row_bound: float
    col_bound: float

    @property
    def upper_bound(self) -> float:
        return math.sqrt(self.row_bound * self.col_bound)

    def kernel(self, zs, ts) -> np.ndarray:
        zs = np.atleast_1d(np.asarray(zs, dtype=complex))
        ts = np.atleast_1d(np.asarray(ts, dtype=complex))
        if not self.terms:
            return np.zeros((len(zs), len(ts)), dtype=complex)
        Phi = np.stack([phi(zs) for phi, _ in self.terms], axis=1)
        Psi = np.stack([psi(ts) for _, psi in self.terms], axis=1)
        return Phi @ Psi.T


def _monomial_terms(n: int, left: complex = 1.0, right: complex = 1.0):
    if n > 0:
        return [
            (trig_poly({j: left}), trig_poly({n - 1 - j: right}))
            for j in range(n)
        ]
    m = -n
    return [
        (trig_poly({j - m: -left}), trig_poly({-1 - j: right}))
        for j in range(m)
    ]


def haagerup_rep_monomial(n: int) -> HaagerupRep:
    """Representation of the divided difference of z**n by |n| unimodular monomial pairs."""
    if n == 0:
        raise ZeroDegree("z**0 is constant; its divided difference vanishes")
    return HaagerupRep(tuple(_monomial_terms(n)), float(abs(n)), float(abs(n)))


def haagerup_rep(f: CircleFunction) -> HaagerupRep:
    """Term-by-term representation of Df for coefficient-backed f.

    c_n is split as sqrt|c_n| e^{i arg c_n} on the left and sqrt|c_n| on the
    right, so both square-sum bounds equal sum |c_n| |n|.
    """
    if f.coeffs is None:
        raise UnsupportedKind(f"no explicit Haagerup representation for kind {f.kind!r}")
    terms = []
    bound = 0.0
    for n, c in f.coeffs.items():
        if n == 0:
            continue
        r = math.sqrt(abs(c))
        terms.extend(_monomial_terms(n, left=c / r, right=r))
        bound += abs(c) * abs(n)
    return HaagerupRep(tuple(terms), bound, bound)


# ---------------------------------------------------------------------------
# Norm estimation
# ---------------------------------------------------------------------------


def _top_singular(M: np.ndarray) -> tuple[float, np.ndarray, np.ndarray]:
    Uu, s, Vh = np.linalg.svd(M, full_matrices=False)
    return float(s[0]), Uu[:, 0], Vh[0].conj()


def _ascend(Kv: np.ndarray, T: np.ndarray, steps: int) -> float:
    """Best ratio ||K o T|| / ||T|| along a monotone ascent started at T.

    With (x, y) the top singular pair of K o T, the next iterate is the unitary
    polar factor of diag(x) conj(K) diag(conj(y)), which can only increase
    ||K o T|| at ||T|| = 1.
    """
    best = linalg.op_norm(Kv * T) / linalg.op_norm(T)
    for _ in range(steps):
        _, x, y = _top_singular(Kv * T)
        G = x[:, None] * Kv.conj() * y.conj()[None, :]
        P, _, Qh = np.linalg.svd(G, full_matrices=False)
        T = P @ Qh
        ratio = linalg.op_norm(Kv * T) / linalg.op_norm(T)
        if ratio <= best * (1 + 1e-12):
            best = max(best, ratio)
            break
        best = ratio
    return best


def schur_norm_lower_bound(
    K, trials: int, seed: int, ascent_steps: int = 40, ascent_starts: int = 3
) -> float:
    """Certified lower bound for the Schur multiplier norm of K.

    Every candidate is an explicit operator T, so each ratio ||K o T|| / ||T||
    is a valid lower bound.  Candidates: all matrix units (giving max |K_ij|),
    ``trials`` complex Gaussian matrices, and a monotone ascent started from the
    all-ones matrix and from the best ``ascent_starts`` Gaussian draws.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    Kv = _values(K)
    best = float(np.max(np.abs(Kv)))
    rows, cols = Kv.shape
    draws = []
    for child in np.random.SeedSequence(seed).spawn(trials):
        rng = np.random.default_rng(child)
        T = rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))
        ratio = linalg.op_norm(Kv * T) / linalg.op_norm(T)
        draws.append((ratio, len(draws), T))
        best = max(best, ratio)
    if ascent_steps > 0:
        starts = [np.ones((rows, cols), dtype=complex)]
        starts += [T for _, _, T in sorted(draws, key=lambda d: (-d[0], d[1]))[:ascent_starts]]
        for T in starts:
            best = max(best, _ascend(Kv, T, ascent_steps))
    return best


def equispaced_eigen(n: int) -> UnitaryEigen:
    """Diagonal resolution with n equispaced angles offset by half a step.

    The offset keeps 0 and pi off the grid for even n, where the sawtooth has corners.
    """
    angles = -np.pi + (np.arange(n) + 0.5) * (2 * np.pi / n)
    return UnitaryEigen.diagonal(angles)


def ol_ratio(f: CircleFunction, U: np.ndarray, V: np.ndarray) -> float:
    """||f(U) - f(V)|| / ||U - V|| (0 when U = V)."""
    den = linalg.op_norm(U - V)
    if den == 0.0:
        return 0.0
    return linalg.op_norm(f.of_unitary(U) - f.of_unitary(V)) / den


def _diagonal_pair(zeta: complex, tau: complex, rest: np.ndarray):
    U = np.diag(np.concatenate([[zeta], rest]))
    V = np.diag(np.concatenate([[tau], rest]))
    return U, V


def ol_seminorm_lower_bound(
    f: CircleFunction,
    dim: int,
    trials: int,
    seed: int,
    probe_points: Sequence[tuple[complex, complex]] = (),
) -> float:
    """Lower bound for the operator Lipschitz seminorm from explicit unitary pairs.

    Trial k uses its own child seed.  Trials cycle through V = exp(i eps A) U
    with eps in (1, 0.1, 0.01), ||A|| = 1, and a diagonal pair that differs in
    one eigenvalue, where the ratio is exactly |Df(zeta, tau)|.  Each entry of
    ``probe_points`` adds the diagonal pair for that (zeta, tau).
    """
    if dim < 1 or trials < 1:
        raise ValueError("dim and trials must be at least 1")
    best = 0.0
    for k, child in enumerate(np.random.SeedSequence(seed).spawn(trials)):
        rng = np.random.default_rng(child)
        mode = k % (len(PERTURBATION_SCALES) + 1)
        if mode < len(PERTURBATION_SCALES):
            U = linalg.random_unitary(dim, rng)
            A = linalg.random_hermitian(dim, rng, scale=1.0)
            V = linalg.herm_eig(A).exp_i(PERTURBATION_SCALES[mode]) @ U
        else:
            theta = rng.uniform(-np.pi, np.pi)
            delta = rng.choice([-1.0, 1.0]) * 10 ** rng.uniform(-3, 0)
            rest = np.exp(1j * rng.uniform(-np.pi, np.pi, dim - 1))
            U, V = _diagonal_pair(np.exp(1j * theta), np.exp(1j * (theta + delta)), rest)
        best = max(best, ol_ratio(f, U, V))
    for zeta, tau in probe_points:
        rest = np.ones(dim - 1, dtype=complex)
        U, V = _diagonal_pair(complex(zeta), complex(tau), rest)
        best = max(best, ol_ratio(f, U, V))
    return best

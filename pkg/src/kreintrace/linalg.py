"""Dense complex linear algebra for Hermitian and unitary matrices.

Everything here works on plain ``numpy`` arrays.  Eigendecompositions are
returned as small frozen dataclasses so that a spectral resolution can be
computed once and reused for functional calculus, double operator integrals
and one-parameter groups.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import BranchAmbiguity, NoConvergence, NotHermitian, NotUnitary

HERMITIAN_TOL = 1e-10
UNITARY_TOL = 1e-10
CLUSTER_GAP = 1e-8
BRANCH_TOL = 1e-8

JACOBI_MAX_SWEEPS = 30
JACOBI_TOL = 1e-14

# Default Hermitian eigensolver; "jacobi" selects the in-house cyclic Jacobi.
DEFAULT_SOLVER = "lapack"


def as_matrix(M) -> np.ndarray:
    """Return ``M`` as a finite square complex array."""
    A = np.asarray(M, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] < 1:
        raise ValueError(f"expected a nonempty square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix has non-finite entries")
    return A


def dagger(M: np.ndarray) -> np.ndarray:
    return M.conj().T


def hermitian_defect(H: np.ndarray) -> float:
    return float(np.max(np.abs(H - dagger(H))))


def unitary_defect(U: np.ndarray) -> float:
    return float(np.max(np.abs(dagger(U) @ U - np.eye(U.shape[0]))))


def check_hermitian(H, tol: float = HERMITIAN_TOL) -> np.ndarray:
    H = as_matrix(H)
    defect = hermitian_defect(H)
    if defect > tol:
        raise NotHermitian(f"||H - H^*||_max = {defect:.3e} exceeds {tol:.1e}")
    return H


def check_unitary(U, tol: float = UNITARY_TOL) -> np.ndarray:
    U = as_matrix(U)
    defect = unitary_defect(U)
    if defect > tol:
        raise NotUnitary(f"||U^*U - I||_max = {defect:.3e} exceeds {tol:.1e}")
    return U


# ---------------------------------------------------------------------------
# Eigendecompositions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class HermitianEigen:
    """Spectral resolution of a Hermitian matrix: ascending eigenvalues, eigenvector columns."""

    eigenvalues: np.ndarray
    vectors: np.ndarray

    @property
    def dim(self) -> int:
        return len(self.eigenvalues)

    def reconstruct(self) -> np.ndarray:
        return (self.vectors * self.eigenvalues) @ dagger(self.vectors)

    def apply(self, g: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
        """g(H) for a scalar function g acting elementwise on the eigenvalues."""
        return (self.vectors * g(self.eigenvalues)) @ dagger(self.vectors)

    def exp_i(self, t: float) -> np.ndarray:
        """The unitary exp(i t H)."""
        return (self.vectors * np.exp(1j * t * self.eigenvalues)) @ dagger(self.vectors)


@dataclass(frozen=True)
class UnitaryEigen:
    """Spectral resolution of a unitary matrix.

    ``angles`` are ascending in (-pi, pi]; the eigenvalue belonging to column
    ``k`` of ``vectors`` is ``exp(1j * angles[k])``.
    """

    angles: np.ndarray
    vectors: np.ndarray

    @property
    def dim(self) -> int:
        return len(self.angles)

    @property
    def eigenvalues(self) -> np.ndarray:
        return np.exp(1j * self.angles)

    def reconstruct(self) -> np.ndarray:
        return (self.vectors * self.eigenvalues) @ dagger(self.vectors)

    def coordinates(self, T: np.ndarray) -> np.ndarray:
        """T expressed in the eigenbasis, W^* T W."""
        return dagger(self.vectors) @ T @ self.vectors

    @classmethod
    def diagonal(cls, angles) -> "UnitaryEigen":
        """Resolution of diag(exp(i*angles)) in the standard basis."""
        angles = np.asarray(angles, dtype=float)
        order = np.argsort(angles, kind="stable")
        return cls(angles[order], np.eye(len(angles), dtype=complex)[:, order])


def _round_robin(m: int) -> list[list[tuple[int, int]]]:
    """Rounds of disjoint index pairs covering every pair of range(m) once (m even)."""
    players = list(range(m))
    rounds = []
    for _ in range(m - 1):
        pairs = [
            (min(players[k], players[m - 1 - k]), max(players[k], players[m - 1 - k]))
            for k in range(m // 2)
        ]
        rounds.append(pairs)
        players = [players[0]] + [players[-1]] + players[1:-1]
    return rounds


def jacobi_eigh(
    H: np.ndarray, max_sweeps: int = JACOBI_MAX_SWEEPS, tol: float = JACOBI_TOL
) -> tuple[np.ndarray, np.ndarray]:
    """Cyclic Jacobi eigensolver for a complex Hermitian matrix.

    Each sweep visits every off-diagonal pair once, in round-robin order so
    that the rotations of one round act on disjoint index pairs and can be
    applied together.  Returns unsorted eigenvalues and eigenvector columns.
    """
    A = np.array(H, dtype=complex)
    n = A.shape[0]
    V = np.eye(n, dtype=complex)
    scale = np.linalg.norm(A)
    if n == 1:
        return A.diagonal().real.copy(), V

    m = n + (n % 2)
    schedule = []
    for rnd in _round_robin(m):
        pairs = np.array([pq for pq in rnd if pq[1] < n])
        schedule.append((pairs[:, 0], pairs[:, 1]))

    for _ in range(max_sweeps):
        off = np.linalg.norm(A - np.diag(A.diagonal()))
        if off <= tol * scale:
            return A.diagonal().real.copy(), V
        for p, q in schedule:
            apq = A[p, q]
            r = np.abs(apq)
            active = r > 0.0
            r_safe = np.where(active, r, 1.0)
            phase = np.where(active, apq / r_safe, 1.0)
            theta = (A[q, q].real - A[p, p].real) / (2.0 * r_safe)
            sgn = np.where(theta >= 0.0, 1.0, -1.0)
            t = np.where(active, sgn / (np.abs(theta) + np.sqrt(theta * theta + 1.0)), 0.0)
            c = 1.0 / np.sqrt(1.0 + t * t)
            s = t * c
            ph = np.conj(phase)
            G = np.eye(n, dtype=complex)
            G[p, p] = c
            G[p, q] = s
            G[q, p] = -s * ph
            G[q, q] = c * ph
            A = dagger(G) @ A @ G
            A = 0.5 * (A + dagger(A))
            V = V @ G
    off = np.linalg.norm(A - np.diag(A.diagonal()))
    if off <= tol * scale:
        return A.diagonal().real.copy(), V
    raise NoConvergence(
        f"Jacobi did not converge in {max_sweeps} sweeps (off-diagonal mass {off:.3e})"
    )


def _eigh(H: np.ndarray, solver: str) -> tuple[np.ndarray, np.ndarray]:
    if solver == "jacobi":
        w, V = jacobi_eigh(H)
    elif solver == "lapack":
        try:
            w, V = np.linalg.eigh(H)
        except np.linalg.LinAlgError as exc:
            raise NoConvergence(str(exc)) from exc
    else:
        raise ValueError(f"unknown solver {solver!r}")
    order = np.argsort(w, kind="stable")
    return w[order], V[:, order]


def herm_eig(H, solver: str | None = None) -> HermitianEigen:
    """Eigendecomposition of a Hermitian matrix with ascending eigenvalues."""
    H = check_hermitian(H)
    H = 0.5 * (H + dagger(H))
    w, V = _eigh(H, solver or DEFAULT_SOLVER)
    return HermitianEigen(w, V)


def _clusters(values: np.ndarray, gap: float) -> list[np.ndarray]:
    """Split sorted values into maximal runs whose consecutive gaps are below ``gap``."""
    breaks = np.nonzero(np.diff(values) >= gap)[0] + 1
    return np.split(np.arange(len(values)), breaks)


def unitary_eig(U, solver: str | None = None) -> UnitaryEigen:
    """Eigendecomposition of a unitary matrix.

    U = C + iS with commuting Hermitian C = (U + U^*)/2 and S = (U - U^*)/(2i).
    C is diagonalized first; eigenvectors of C whose eigenvalues fall in one
    cluster span an S-invariant subspace, where S separates the conjugate
    angles +theta and -theta that share a cosine.
    """
    U = check_unitary(U)
    solver = solver or DEFAULT_SOLVER
    C = 0.5 * (U + dagger(U))
    S = (U - dagger(U)) / 2j
    cvals, W = _eigh(C, solver)
    blocks = []
    for idx in _clusters(cvals, CLUSTER_GAP):
        Wc = W[:, idx]
        if len(idx) == 1:
            blocks.append(Wc)
            continue
        Sc = dagger(Wc) @ S @ Wc
        Sc = 0.5 * (Sc + dagger(Sc))
        _, Y = _eigh(Sc, solver)
        blocks.append(Wc @ Y)
    W = np.concatenate(blocks, axis=1)
    rayleigh = np.einsum("ik,ij,jk->k", W.conj(), U, W)
    angles = np.angle(rayleigh)
    angles = np.where(angles <= -np.pi, np.pi, angles)
    order = np.argsort(angles, kind="stable")
    return UnitaryEigen(angles[order], W[:, order])


def principal_log_unitary(W, solver: str | None = None) -> np.ndarray:
    """Hermitian A with spectrum in (-pi, pi] and exp(iA) = W."""
    E = unitary_eig(W, solver)
    if np.any(np.abs(E.angles) > np.pi - BRANCH_TOL):
        warnings.warn(
            "eigenvalue within 1e-8 of -1; logarithm branch is ill-conditioned",
            BranchAmbiguity,
            stacklevel=2,
        )
    A = (E.vectors * E.angles) @ dagger(E.vectors)
    return 0.5 * (A + dagger(A))


def matrix_function(E: UnitaryEigen, f: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
    """f(U) = W diag(f(exp(i*angles))) W^* for the unitary resolved by ``E``."""
    values = np.asarray(f(E.eigenvalues), dtype=complex)
    return (E.vectors * values) @ dagger(E.vectors)


def unitary_exp(A, t: float) -> np.ndarray:
    """exp(i t A) for Hermitian A."""
    return herm_eig(A).exp_i(t)


# ---------------------------------------------------------------------------
# Norms and random matrices
# ---------------------------------------------------------------------------


def op_norm(M: np.ndarray) -> float:
    """Spectral norm (largest singular value)."""
    return float(np.linalg.norm(M, 2))


def trace_norm(M: np.ndarray) -> float:
    """Sum of singular values."""
    return float(np.sum(np.linalg.svd(M, compute_uv=False)))


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary from the QR factorization of a complex Ginibre matrix."""
    Z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    Q, R = np.linalg.qr(Z)
    d = np.diagonal(R)
    return Q * (d / np.abs(d))


def random_hermitian(
    dim: int,
    rng: np.random.Generator,
    rank: int | None = None,
    scale: float | None = None,
) -> np.ndarray:
    """Random Hermitian matrix, optionally of fixed rank and operator norm ``scale``.

    Without ``rank``/``scale`` the entries have real and imaginary parts in [-1, 1].
    """
    if rank is None and scale is None:
        G = rng.uniform(-1, 1, (dim, dim)) + 1j * rng.uniform(-1, 1, (dim, dim))
        return 0.5 * (G + dagger(G))
    rank = dim if rank is None else rank
    Q = random_unitary(dim, rng)[:, :rank]
    lam = rng.uniform(0.2, 1.0, rank) * rng.choice([-1.0, 1.0], rank)
    lam[0] = np.sign(lam[0])
    if scale is not None:
        lam = lam * (scale / np.max(np.abs(lam)))
    H = (Q * lam) @ dagger(Q)
    return 0.5 * (H + dagger(H))

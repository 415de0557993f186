"""Functions on the unit circle and their derivatives.

The derivative of a circle function is always taken with respect to the
complex variable: ``d/dtheta f(e^{i theta}) = i e^{i theta} f'(e^{i theta})``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np

from . import linalg
from .errors import BadArgument, DerivativeUndefined, DivergentSeries

TRIG = "trig_poly"
ABS_SERIES = "abs_series"
SAWTOOTH = "sawtooth"

# Distance in angle below which the sawtooth counts as sitting on a corner.
SAWTOOTH_CORNER_TOL = 1e-12
DIVERGENCE_LIMIT = 1e12


def _power_sum(coeffs: Mapping[int, complex], z: np.ndarray) -> np.ndarray:
    out = np.zeros(np.shape(z), dtype=complex)
    for n, c in coeffs.items():
        out = out + c * z**n
    return out


def _power_sum_deriv(coeffs: Mapping[int, complex], z: np.ndarray) -> np.ndarray:
    out = np.zeros(np.shape(z), dtype=complex)
    for n, c in coeffs.items():
        if n != 0:
            out = out + (n * c) * z ** (n - 1)
    return out


@dataclass(frozen=True)
class CircleFunction:
    """A function on the unit circle with its complex derivative.

    Coefficient-backed kinds (``trig_poly``, ``abs_series``) carry a sparse
    Fourier map ``n -> c_n`` with ``f(z) = sum c_n z**n``.  Arbitrary
    callables may be wrapped with :meth:`from_callables`.
    """

    kind: str
    coeffs: Mapping[int, complex] | None = None
    tail_bound: float = 0.0
    _eval: Callable[[np.ndarray], np.ndarray] | None = field(default=None, repr=False)
    _deriv: Callable[[np.ndarray], np.ndarray] | None = field(default=None, repr=False)

    @classmethod
    def from_callables(cls, f, fprime, kind: str = "custom") -> "CircleFunction":
        return cls(kind=kind, _eval=f, _deriv=fprime)

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        if self.coeffs is not None:
            return _power_sum(self.coeffs, z)
        return np.asarray(self._eval(z), dtype=complex)

    def deriv(self, z):
        z = np.asarray(z, dtype=complex)
        if self.coeffs is not None:
            return _power_sum_deriv(self.coeffs, z)
        return np.asarray(self._deriv(z), dtype=complex)

    def theta_deriv(self, z):
        """d/dtheta f(e^{i theta}) at z = e^{i theta}."""
        z = np.asarray(z, dtype=complex)
        return 1j * z * self.deriv(z)

    @property
    def has_coeffs(self) -> bool:
        return self.coeffs is not None

    def weighted_l1(self, power: int = 1) -> float:
        """sum |c_n| |n|**power over the stored coefficients (inf without coefficients)."""
        if self.coeffs is None:
            return math.inf
        return float(sum(abs(c) * abs(n) ** power for n, c in self.coeffs.items()))

    @property
    def degree(self) -> int:
        if not self.coeffs:
            return 0
        return max(abs(n) for n in self.coeffs)

    def of_unitary(self, U: np.ndarray, eigen: linalg.UnitaryEigen | None = None) -> np.ndarray:
        """f(U).  Coefficient-backed functions use matrix powers, others the eigenbasis."""
        if self.coeffs is None:
            return linalg.matrix_function(eigen or linalg.unitary_eig(U), self)
        return trig_poly_of_unitary(U, self.coeffs)


def trig_poly_of_unitary(U: np.ndarray, coeffs: Mapping[int, complex]) -> np.ndarray:
    """sum c_n U**n, using U**-n = (U**n)^*."""
    dim = U.shape[0]
    top = max((abs(n) for n in coeffs), default=0)
    powers = [np.eye(dim, dtype=complex)]
    for _ in range(top):
        powers.append(powers[-1] @ U)
    out = np.zeros((dim, dim), dtype=complex)
    for n, c in coeffs.items():
        P = powers[n] if n >= 0 else linalg.dagger(powers[-n])
        out = out + c * P
    return out


def _clean_coeffs(coeffs: Mapping[int, complex]) -> dict[int, complex]:
    out = {}
    for n, c in sorted(coeffs.items()):
        if int(n) != n:
            raise BadArgument(f"non-integer frequency {n!r}")
        c = complex(c)
        if c != 0:
            out[int(n)] = c
    return out


def trig_poly(coeffs: Mapping[int, complex]) -> CircleFunction:
    """f(z) = sum c_n z**n with finitely many nonzero c_n."""
    return CircleFunction(kind=TRIG, coeffs=_clean_coeffs(coeffs))


def abs_conv_series(coeffs: Mapping[int, complex], truncation: int) -> CircleFunction:
    """Truncation to |n| <= N of a series whose derivative has absolutely summable coefficients.

    ``tail_bound`` records sum_{|n| > N} |n c_n| over the supplied support.
    """
    coeffs = _clean_coeffs(coeffs)
    total = sum(abs(n * c) for n, c in coeffs.items())
    if not math.isfinite(total) or total > DIVERGENCE_LIMIT:
        raise DivergentSeries(f"sum |n c_n| = {total:.3e} over the supplied support")
    kept = {n: c for n, c in coeffs.items() if abs(n) <= truncation}
    tail = sum(abs(n * c) for n, c in coeffs.items() if abs(n) > truncation)
    return CircleFunction(kind=ABS_SERIES, coeffs=kept, tail_bound=float(tail))


def geometric_series(ratio: float, truncation: int) -> CircleFunction:
    """c_n = ratio**|n| for all integers n, truncated at |n| <= N.

    The tail bound is the exact infinite sum 2 * sum_{n>N} n r**n.
    """
    if not 0 <= ratio < 1:
        raise BadArgument("geometric ratio must lie in [0, 1)")
    if truncation < 0:
        raise BadArgument("truncation must be nonnegative")
    r, N = ratio, truncation
    kept = _clean_coeffs({n: r ** abs(n) for n in range(-N, N + 1)})
    # sum_{n>N} n r^n = r^{N+1} ((N+1) - N r) / (1-r)^2
    tail = 2.0 * r ** (N + 1) * ((N + 1) - N * r) / (1.0 - r) ** 2
    return CircleFunction(kind=ABS_SERIES, coeffs=kept, tail_bound=float(tail))


def _sawtooth_eval(z: np.ndarray) -> np.ndarray:
    return np.abs(np.angle(z)).astype(complex)


def _sawtooth_deriv(z: np.ndarray) -> np.ndarray:
    theta = np.angle(z)
    corner = (np.abs(theta) < SAWTOOTH_CORNER_TOL) | (np.abs(theta) > np.pi - SAWTOOTH_CORNER_TOL)
    if np.any(corner):
        raise DerivativeUndefined("sawtooth |theta| is not differentiable at theta = 0 or pi")
    return np.sign(theta) / (1j * z)


def sawtooth_nonOL() -> CircleFunction:
    """f(e^{i theta}) = |theta| on (-pi, pi]: Lipschitz, but not operator Lipschitz."""
    return CircleFunction(kind=SAWTOOTH, _eval=_sawtooth_eval, _deriv=_sawtooth_deriv)


def rotate(f: CircleFunction, zeta0: complex) -> CircleFunction:
    """tau -> f(zeta0 * tau)."""
    zeta0 = complex(zeta0)
    if abs(abs(zeta0) - 1.0) > 1e-12:
        raise BadArgument("rotation must be by a unit complex number")
    if f.coeffs is not None:
        rotated = {n: c * zeta0**n for n, c in f.coeffs.items()}
        return CircleFunction(kind=f.kind, coeffs=rotated, tail_bound=f.tail_bound)
    return CircleFunction(
        kind=f.kind,
        _eval=lambda z: f(zeta0 * np.asarray(z)),
        _deriv=lambda z: zeta0 * f.deriv(zeta0 * np.asarray(z)),
    )


@dataclass(frozen=True)
class OLBound:
    """Two-sided estimate of the operator Lipschitz seminorm."""

    lower: float
    upper: float = math.inf

    def __post_init__(self):
        if self.lower < 0 or self.lower > self.upper:
            raise ValueError(f"inconsistent bounds [{self.lower}, {self.upper}]")


# ---------------------------------------------------------------------------
# JSON function specs
# ---------------------------------------------------------------------------


def _parse_complex(value) -> complex:
    if isinstance(value, (list, tuple)) and len(value) == 2:
        return complex(float(value[0]), float(value[1]))
    if isinstance(value, (int, float)):
        return complex(value)
    raise BadArgument(f"cannot read complex number from {value!r}")


def from_spec(spec: Mapping) -> CircleFunction:
    """Build a circle function from its JSON description.

    Accepted shapes::

        {"kind": "trig", "coeffs": {"-2": [re, im], "3": [re, im]}}
        {"kind": "abs_series", "rule": "geometric", "ratio": r, "N": n}
        {"kind": "sawtooth"}
    """
    if not isinstance(spec, Mapping) or "kind" not in spec:
        raise BadArgument("function spec must be an object with a 'kind' field")
    kind = spec["kind"]
    if kind in ("trig", TRIG):
        raw = spec.get("coeffs")
        if not isinstance(raw, Mapping):
            raise BadArgument("trig spec needs a 'coeffs' object")
        try:
            coeffs = {int(k): _parse_complex(v) for k, v in raw.items()}
        except ValueError as exc:
            raise BadArgument(f"bad trig coefficients: {exc}") from exc
        return trig_poly(coeffs)
    if kind == "abs_series":
        if spec.get("rule") != "geometric":
            raise BadArgument("abs_series spec supports rule 'geometric' only")
        try:
            return geometric_series(float(spec["ratio"]), int(spec["N"]))
        except KeyError as exc:
            raise BadArgument(f"abs_series spec is missing {exc}") from exc
    if kind == SAWTOOTH:
        return sawtooth_nonOL()
    raise BadArgument(f"unknown function kind {kind!r}")

"""Pair files, seeded pair generation and the plain-text output formats."""

from __future__ import annotations

import json
import os
import sys
import tempfile
from dataclasses import dataclass, field
from typing import Any, Mapping

import numpy as np

from . import linalg
from .errors import BadArgument, NotHermitian, NotUnitary

KINDS = ("unitary", "hermitian")


def matrix_to_json(M: np.ndarray) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in M]


def matrix_from_json(rows) -> np.ndarray:
    try:
        M = np.array([[complex(re, im) for re, im in row] for row in rows], dtype=complex)
    except (TypeError, ValueError) as exc:
        raise BadArgument(f"matrix entries must be [re, im] pairs: {exc}") from exc
    return linalg.as_matrix(M)


@dataclass
class PairFile:
    """Two matrices of one kind plus provenance.  For hermitian pairs U, V hold A, B."""

    dim: int
    kind: str
    U: np.ndarray
    V: np.ndarray
    seed: int | None = None
    meta: dict[str, Any] = field(default_factory=dict)

    def validate(self) -> "PairFile":
        if self.kind not in KINDS:
            raise BadArgument(f"pair kind must be one of {KINDS}, got {self.kind!r}")
        for name, M in (("U", self.U), ("V", self.V)):
            if M.shape != (self.dim, self.dim):
                raise BadArgument(f"{name} has shape {M.shape}, expected {self.dim}x{self.dim}")
            try:
                if self.kind == "unitary":
                    linalg.check_unitary(M)
                else:
                    linalg.check_hermitian(M)
            except (NotUnitary, NotHermitian) as exc:
                raise BadArgument(f"{name}: {exc}") from exc
        return self

    def to_dict(self) -> dict:
        return {
            "dim": self.dim,
            "kind": self.kind,
            "seed": self.seed,
            "meta": self.meta,
            "U": matrix_to_json(self.U),
            "V": matrix_to_json(self.V),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1) + "\n"

    @classmethod
    def from_dict(cls, data: Mapping) -> "PairFile":
        try:
            pair = cls(
                dim=int(data["dim"]),
                kind=str(data["kind"]),
                U=matrix_from_json(data["U"]),
                V=matrix_from_json(data["V"]),
                seed=data.get("seed"),
                meta=dict(data.get("meta") or {}),
            )
        except KeyError as exc:
            raise BadArgument(f"pair file is missing {exc}") from exc
        except ValueError as exc:
            raise BadArgument(str(exc)) from exc
        return pair.validate()

    @classmethod
    def load(cls, path: str) -> "PairFile":
        try:
            with open(path) as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise BadArgument(f"cannot read pair file {path}: {exc}") from exc
        return cls.from_dict(data)


def gen_pair(dim: int, kind: str, perturbation_scale: float, rank: int, seed: int) -> PairFile:
    """Seeded pair whose difference comes from a rank-``rank`` Hermitian perturbation.

    unitary:   U Haar-random, V = exp(iA) U with ||A|| = perturbation_scale.
    hermitian: A random with entries in [-1, 1], B = A + K with ||K|| = perturbation_scale.
    """
    if kind not in KINDS:
        raise BadArgument(f"kind must be one of {KINDS}")
    if dim < 1:
        raise BadArgument("dim must be at least 1")
    if not 1 <= rank <= dim:
        raise BadArgument("rank must satisfy 1 <= rank <= dim")
    if not perturbation_scale > 0:
        raise BadArgument("perturbation scale must be positive")
    rng = np.random.default_rng(seed)
    meta = {"perturbation_scale": perturbation_scale, "rank": rank}
    if kind == "unitary":
        U = linalg.random_unitary(dim, rng)
        A = linalg.random_hermitian(dim, rng, rank=rank, scale=perturbation_scale)
        V = linalg.herm_eig(A).exp_i(1.0) @ U
    else:
        U = linalg.random_hermitian(dim, rng)
        K = linalg.random_hermitian(dim, rng, rank=rank, scale=perturbation_scale)
        V = U + K
        V = 0.5 * (V + V.conj().T)
    return PairFile(dim, kind, U, V, seed, meta)


# ---------------------------------------------------------------------------
# Output
# ---------------------------------------------------------------------------


def fmt(x: float) -> str:
    return repr(float(x))


def write_output(text: str, path: str | None) -> None:
    """Write to ``path`` through a temporary file and rename, or to stdout."""
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def coefficients_json(coeffs: Mapping[int, complex]) -> str:
    data = {str(n): [float(c.real), float(c.imag)] for n, c in sorted(coeffs.items())}
    return json.dumps(data, indent=1) + "\n"


def coefficients_from_json(text: str) -> dict[int, complex]:
    return {int(k): complex(re, im) for k, (re, im) in json.loads(text).items()}


def coefficients_csv(coeffs: Mapping[int, complex]) -> str:
    lines = ["n,re,im"]
    lines += [f"{n},{fmt(c.real)},{fmt(c.imag)}" for n, c in sorted(coeffs.items())]
    return "\n".join(lines) + "\n"


def arcs_csv(rows, header: str = "theta_start,theta_end,value") -> str:
    lines = [header] + [f"{fmt(a)},{fmt(b)},{fmt(v)}" for a, b, v in rows]
    return "\n".join(lines) + "\n"


def read_arcs_csv(text: str) -> list[tuple[float, float, float]]:
    rows = text.strip().splitlines()[1:]
    return [tuple(float(x) for x in row.split(",")) for row in rows]

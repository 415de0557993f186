import numpy as np
import pytest

from kreintrace import circlefn, linalg

CRITERIA: list[str] = []


def record(number: int, passed: bool, detail: str) -> None:
    CRITERIA.append(f"criterion {number}: {'PASS' if passed else 'FAIL'}  {detail}")


def pytest_terminal_summary(terminalreporter):
    if CRITERIA:
        terminalreporter.section("acceptance criteria")
        for line in CRITERIA:
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_trig(rng, degree, scale=1.0):
    coeffs = {n: scale * (rng.normal() + 1j * rng.normal()) for n in range(-degree, degree + 1)}
    return circlefn.trig_poly(coeffs)


def random_pair(rng, dim):
    return linalg.random_unitary(dim, rng), linalg.random_unitary(dim, rng)

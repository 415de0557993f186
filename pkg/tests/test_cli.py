import json
import math
import subprocess
import sys
import warnings

import numpy as np
import pytest

from kreintrace import linalg, pairs
from kreintrace.cli import main

Z = '{"kind": "trig", "coeffs": {"1": [1, 0]}}'
Z5 = '{"kind": "trig", "coeffs": {"5": [1, 0]}}'
CUBE = '{"kind": "poly", "coeffs": [0, 0, 0, 1]}'
SAW = '{"kind": "sawtooth"}'


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def unitary_pair(tmp_path, capsys):
    path = tmp_path / "pair.json"
    assert run(capsys, "--seed", 3, "--out", path, "gen-pair", "--dim", 6, "--scale", 1.0)[0] == 0
    return path


@pytest.fixture
def hermitian_pair(tmp_path, capsys):
    path = tmp_path / "herm.json"
    argv = ("--seed", 4, "--out", path, "gen-pair", "--dim", 8, "--kind", "hermitian", "--scale", 0.5)
    assert run(capsys, *argv)[0] == 0
    return path


def identical_pair(tmp_path, dim=3):
    U = linalg.random_unitary(dim, np.random.default_rng(1))
    path = tmp_path / "same.json"
    pairs.write_output(pairs.PairFile(dim, "unitary", U, U.copy(), 1, {}).to_json(), str(path))
    return path


def test_gen_pair_is_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for path in (a, b):
        argv = ("--seed", 7, "--out", path, "gen-pair", "--dim", 1, "--scale", math.pi / 2, "--rank", 1)
        assert run(capsys, *argv)[0] == 0
    assert a.read_bytes() == b.read_bytes()


def test_gen_pair_round_trip(unitary_pair, hermitian_pair):
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        pair = pairs.PairFile.load(str(unitary_pair))
        herm = pairs.PairFile.load(str(hermitian_pair))
    assert pair.kind == "unitary" and pair.dim == 6
    assert herm.kind == "hermitian" and herm.dim == 8
    again = pairs.PairFile.from_dict(json.loads(pair.to_json()))
    np.testing.assert_array_equal(again.U, pair.U)
    np.testing.assert_array_equal(again.V, pair.V)


def test_gen_pair_rank_recovery(tmp_path, capsys):
    path = tmp_path / "r2.json"
    assert run(capsys, "--out", path, "gen-pair", "--dim", 8, "--scale", 1.0, "--rank", 2)[0] == 0
    pair = pairs.PairFile.load(str(path))
    A = linalg.principal_log_unitary(pair.V @ pair.U.conj().T)
    eig = np.abs(np.linalg.eigvalsh(A))
    assert np.sum(eig < 1e-9) == 6


def test_gen_pair_rejects_zero_scale(tmp_path, capsys):
    path = tmp_path / "bad.json"
    code, _, err = run(capsys, "--out", path, "gen-pair", "--dim", 2, "--scale", 0)
    assert code == 2 and "scale" in err
    assert not path.exists()
    assert list(tmp_path.iterdir()) == []


def test_invalid_pair_file(tmp_path, capsys):
    path = tmp_path / "broken.json"
    data = json.loads(pairs.PairFile(2, "unitary", np.eye(2), np.eye(2), None, {}).to_json())
    data["V"][0][0] = [2.0, 0.0]
    path.write_text(json.dumps(data))
    assert run(capsys, "ssf", path)[0] == 2


def test_ssf_counting_identical_pair(tmp_path, capsys):
    code, out, _ = run(capsys, "ssf", identical_pair(tmp_path))
    assert code == 0
    rows = out.strip().splitlines()
    assert rows[0] == "theta_start,theta_end,value"
    assert len(rows) == 2 and float(rows[1].split(",")[2]) == 0


def test_ssf_fourier_scalar_closed_form(tmp_path, capsys):
    path = tmp_path / "one.json"
    run(capsys, "--seed", 7, "--out", path, "gen-pair", "--dim", 1, "--scale", math.pi / 2, "--rank", 1)
    pair = pairs.PairFile.load(str(path))
    u, v = pair.U[0, 0], pair.V[0, 0]
    assert abs(abs(np.angle(v / u)) - math.pi / 2) < 1e-12
    code, out, _ = run(capsys, "--fourier-order", 4, "ssf", path, "--method", "fourier")
    coeffs = pairs.coefficients_from_json(out)
    assert code == 0 and sorted(coeffs) == [-4, -3, -2, -1, 1, 2, 3, 4]
    for m, c in coeffs.items():
        n = -m
        assert c == pytest.approx((u**n - v**n) / (2j * math.pi * n), abs=1e-12)


def test_ssf_path_matches_fourier(unitary_pair, capsys):
    _, fourier, _ = run(capsys, "--fourier-order", 8, "ssf", unitary_pair, "--method", "fourier")
    _, path, _ = run(capsys, "--fourier-order", 8, "--quad-nodes", 64, "ssf", unitary_pair, "--method", "path")
    a, b = pairs.coefficients_from_json(fourier), pairs.coefficients_from_json(path)
    assert max(abs(a[m] - b[m]) for m in a) <= 1e-5


def test_ssf_csv_formats(unitary_pair, hermitian_pair, capsys):
    code, out, _ = run(capsys, "--format", "csv", "--fourier-order", 2, "ssf", unitary_pair, "--method", "fourier")
    assert code == 0 and len(out.strip().splitlines()) == 5
    code, out, _ = run(capsys, "ssf", hermitian_pair)
    assert code == 0 and out.startswith("t_start,t_end,value")


def test_ssf_method_kind_mismatch(hermitian_pair, capsys):
    assert run(capsys, "ssf", hermitian_pair, "--method", "fourier")[0] == 3
    assert run(capsys, "ssf", hermitian_pair, "--method", "path")[0] == 3


def test_verify_linear_passes(unitary_pair, capsys):
    code, out, _ = run(capsys, "verify", unitary_pair, "--function", Z)
    report = json.loads(out)
    assert code == 0 and report["pass"]
    assert report["meta"]["config"]["tol"] == 1e-8


def test_verify_hermitian_cubic(hermitian_pair, capsys):
    code, out, _ = run(capsys, "verify", hermitian_pair, "--function", CUBE)
    report = json.loads(out)
    assert code == 0 and report["residual"] <= 1e-8


def test_verify_failure_exit_code(unitary_pair, capsys):
    big = '{"kind": "trig", "coeffs": {"16": [1, 0], "-16": [1, 0]}}'
    code, out, _ = run(capsys, "--tol", 1e-300, "verify", unitary_pair, "--function", big)
    assert code == 1 and not json.loads(out)["pass"]


def test_verify_refuses_sawtooth(unitary_pair, capsys):
    code, out, err = run(capsys, "verify", unitary_pair, "--function", SAW)
    assert code == 2 and out == ""
    assert "not everywhere differentiable" in err


def test_verify_bad_specs(unitary_pair, hermitian_pair, tmp_path, capsys):
    assert run(capsys, "verify", unitary_pair, "--function", "{not json")[0] == 2
    assert run(capsys, "verify", unitary_pair, "--function", '{"kind": "bessel"}')[0] == 2
    assert run(capsys, "verify", hermitian_pair, "--function", Z)[0] == 2
    spec = tmp_path / "f.json"
    spec.write_text(Z)
    assert run(capsys, "verify", unitary_pair, "--function", f"@{spec}")[0] == 0


def test_no_partial_output_on_failure(unitary_pair, tmp_path, capsys):
    out = tmp_path / "report.json"
    assert run(capsys, "--out", out, "verify", unitary_pair, "--function", SAW)[0] == 2
    assert not out.exists()
    assert not any(p.name.startswith(".tmp-") for p in tmp_path.iterdir())


def test_lipnorm_identity(capsys):
    code, out, _ = run(capsys, "--trials", 20, "lipnorm", "--function", Z, "--dims", "4,8")
    rows = [r.split(",") for r in out.strip().splitlines()[1:]]
    assert code == 0 and len(rows) == 2
    for _, lo, up in rows:
        assert float(lo) == pytest.approx(1, abs=1e-12) and float(up) == pytest.approx(1, abs=1e-12)


def test_lipnorm_power_sandwich(capsys):
    code, out, _ = run(capsys, "--trials", 500, "--seed", 0, "lipnorm", "--function", Z5, "--dims", 32)
    _, lo, up = out.strip().splitlines()[1].split(",")
    assert code == 0 and float(up) == 5
    assert 4.0 <= float(lo) <= 5.0


def test_lipnorm_json(capsys):
    code, out, _ = run(capsys, "--trials", 5, "--format", "json", "lipnorm", "--function", SAW, "--dims", 8)
    data = json.loads(out)
    assert code == 0 and data[0]["dim"] == 8 and data[0]["upper_bound"] is None


@pytest.mark.slow
def test_lipnorm_sawtooth_growth(capsys):
    code, out, _ = run(capsys, "--trials", 20, "lipnorm", "--function", SAW, "--dims", "16,64,256")
    rows = [r.split(",") for r in out.strip().splitlines()[1:]]
    lows = [float(r[1]) for r in rows]
    assert code == 0 and lows[0] < lows[1] < lows[2]
    assert all(r[2] == "inf" for r in rows)


def test_lipnorm_bad_dims(capsys):
    assert run(capsys, "lipnorm", "--function", Z, "--dims", "0")[0] == 2
    assert run(capsys, "lipnorm", "--function", Z, "--dims", "x")[0] == 2


def test_derivative_check_generated(capsys):
    code, out, _ = run(capsys, "derivative-check", "--dim", 6, "--function", Z5)
    report = json.loads(out)
    assert code == 0 and report["meta"]["order"] >= 0.9
    assert report["meta"]["t"] == [1e-2, 1e-3, 1e-4]


def test_derivative_check_pairs(unitary_pair, hermitian_pair, capsys):
    assert run(capsys, "derivative-check", unitary_pair, "--function", Z)[0] == 0
    code, out, _ = run(capsys, "derivative-check", hermitian_pair, "--function", '{"kind": "poly", "coeffs": [0, 0, 1]}')
    assert code == 0 and json.loads(out)["meta"]["norm"] == "frobenius"


def test_derivative_check_zero_direction_is_exact(tmp_path, capsys):
    code, out, _ = run(capsys, "derivative-check", identical_pair(tmp_path), "--function", Z5)
    report = json.loads(out)
    assert code == 0 and report["meta"]["err"] == [0.0, 0.0, 0.0]


def test_derivative_check_bad_inputs(unitary_pair, capsys):
    assert run(capsys, "derivative-check", "--function", Z)[0] == 2
    assert run(capsys, "derivative-check", unitary_pair, "--function", SAW)[0] == 2
    assert run(capsys, "derivative-check", unitary_pair, "--function", Z, "--t-list", "1e-4,1e-2")[0] == 2


def test_profile_identical_pair(tmp_path, capsys):
    code, out, err = run(capsys, "profile", identical_pair(tmp_path), "--function", Z5, "--grid", 12)
    rows = [list(map(float, r.split(","))) for r in out.strip().splitlines()[1:]]
    assert code == 0 and len(rows) == 12
    assert all(r[1] == 0 and r[2] == 0 for r in rows)
    assert "max_residual" in err


def test_profile_linear(unitary_pair, capsys):
    pair = pairs.PairFile.load(str(unitary_pair))
    d = np.trace(pair.U - pair.V)
    _, out, _ = run(capsys, "profile", unitary_pair, "--function", Z, "--grid", 36)
    for row in out.strip().splitlines()[1:]:
        a, re, im, _ = map(float, row.split(","))
        assert complex(re, im) == pytest.approx(np.exp(1j * a) * d, abs=1e-12)


def test_profile_needs_unitary(hermitian_pair, capsys):
    assert run(capsys, "profile", hermitian_pair, "--function", Z)[0] == 3


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "kreintrace", "--help"], capture_output=True, text=True)
    assert proc.returncode == 0 and "gen-pair" in proc.stdout

"""Command line front end.

Exit codes: 0 success / check passed, 1 check failed, 2 invalid input,
3 method not available for the pair kind.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import circlefn, doi, linalg, pairs
from . import ssf_selfadjoint as sa
from . import ssf_unitary as su
from .errors import BadArgument, KreinTraceError, UnsupportedKind
from .report import RunConfig, VerificationReport

EXIT_OK, EXIT_FAIL, EXIT_INVALID, EXIT_KIND = 0, 1, 2, 3
DEFAULT_T_LIST = "1e-2,1e-3,1e-4"


class CommandError(Exception):
    def __init__(self, message: str, code: int = EXIT_INVALID):
        super().__init__(message)
        self.code = code


def _parse_function(text: str) -> dict:
    if text.startswith("@"):
        with open(text[1:]) as fh:
            text = fh.read()
    try:
        spec = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CommandError(f"function spec is not valid JSON: {exc}") from exc
    if not isinstance(spec, dict):
        raise CommandError("function spec must be a JSON object")
    return spec


def _circle_function(spec: dict) -> circlefn.CircleFunction:
    try:
        return circlefn.from_spec(spec)
    except BadArgument as exc:
        raise CommandError(str(exc)) from exc


def _polynomial(spec: dict):
    if spec.get("kind") != "poly" or not isinstance(spec.get("coeffs"), list):
        raise CommandError('hermitian pairs need {"kind": "poly", "coeffs": [c0, c1, ...]}')
    try:
        return sa.polynomial([float(c) for c in spec["coeffs"]])
    except (TypeError, ValueError) as exc:
        raise CommandError(f"bad polynomial coefficients: {exc}") from exc


def _refuse_nondifferentiable(f: circlefn.CircleFunction) -> None:
    if f.kind == circlefn.SAWTOOTH:
        raise CommandError(
            "sawtooth |theta| is not everywhere differentiable (corners at theta = 0, pi) "
            "and not operator Lipschitz; the trace-formula check does not apply"
        )


def _load_pair(path: str) -> pairs.PairFile:
    try:
        return pairs.PairFile.load(path)
    except BadArgument as exc:
        raise CommandError(f"invalid pair: {exc}") from exc


def _config(args) -> RunConfig:
    try:
        return RunConfig(
            tol=args.tol,
            quad_nodes=args.quad_nodes,
            fourier_order=args.fourier_order,
            trials=args.trials,
            seed=args.seed,
        )
    except BadArgument as exc:
        raise CommandError(str(exc)) from exc


def _float_list(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise CommandError(f"expected comma-separated numbers, got {text!r}") from exc


def _emit_report(report: VerificationReport, cfg: RunConfig, args) -> None:
    report.meta.setdefault("config", cfg.as_dict())
    pairs.write_output(report.to_json() + "\n", args.out)


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def cmd_gen_pair(args) -> int:
    try:
        pair = pairs.gen_pair(args.dim, args.kind, args.scale, args.rank or args.dim, args.seed)
    except BadArgument as exc:
        raise CommandError(str(exc)) from exc
    pairs.write_output(pair.to_json(), args.out)
    return EXIT_OK


def cmd_ssf(args) -> int:
    cfg = _config(args)
    pair = _load_pair(args.pair)
    if pair.kind == "hermitian":
        if args.method != "counting":
            raise CommandError(f"method {args.method!r} needs a unitary pair", EXIT_KIND)
        xi = sa.ssf_counting_sa(pair.U, pair.V)
        if args.format == "json":
            text = json.dumps(
                {"breakpoints": xi.breakpoints.tolist(), "values": xi.values.tolist()}, indent=1
            ) + "\n"
        else:
            text = pairs.arcs_csv(xi.intervals, header="t_start,t_end,value")
        pairs.write_output(text, args.out)
        return EXIT_OK

    if args.method == "counting":
        xi = su.ssf_counting(pair.U, pair.V)
        if args.format == "json":
            text = json.dumps(
                {"breakpoints": xi.breakpoints.tolist(), "values": xi.values.tolist()}, indent=1
            ) + "\n"
        else:
            text = pairs.arcs_csv(xi.arcs)
    else:
        if args.method == "fourier":
            coeffs = su.ssf_fourier(pair.U, pair.V, cfg.fourier_order)
        else:
            samples = su.path_decompose(pair.U, pair.V, cfg.quad_nodes)
            coeffs = su.xi_from_nu(su.path_nu(samples), cfg.fourier_order)
        if args.format == "csv":
            text = pairs.coefficients_csv(coeffs)
        else:
            text = pairs.coefficients_json(coeffs)
    pairs.write_output(text, args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    cfg = _config(args)
    pair = _load_pair(args.pair)
    spec = _parse_function(args.function)
    if pair.kind == "hermitian":
        report = sa.verify_trace_formula_sa(pair.U, pair.V, _polynomial(spec), cfg)
    else:
        f = _circle_function(spec)
        _refuse_nondifferentiable(f)
        report = su.verify_trace_formula(pair.U, pair.V, f, cfg)
    _emit_report(report, cfg, args)
    return EXIT_OK if report.passed else EXIT_FAIL


def lipnorm_rows(f: circlefn.CircleFunction, dims, cfg: RunConfig) -> list[tuple[int, float, float]]:
    try:
        upper = doi.haagerup_rep(f).upper_bound
    except UnsupportedKind:
        upper = math.inf
    rows = []
    for dim in dims:
        ol = doi.ol_seminorm_lower_bound(f, dim, cfg.trials, cfg.seed)
        E = doi.equispaced_eigen(dim)
        schur = doi.schur_norm_lower_bound(doi.loewner_kernel(f, E, E), cfg.trials, cfg.seed)
        # estimates of an exact value can overshoot the certified upper bound by rounding
        rows.append((dim, min(max(ol, schur), upper), upper))
    return rows


def cmd_lipnorm(args) -> int:
    cfg = _config(args)
    f = _circle_function(_parse_function(args.function))
    dims = [int(d) for d in _float_list(args.dims)]
    if not dims or any(d < 1 for d in dims):
        raise CommandError("--dims needs at least one positive dimension")
    rows = lipnorm_rows(f, dims, cfg)
    if args.format == "json":
        data = [
            {"dim": d, "lower_bound": lo, "upper_bound": None if math.isinf(up) else up}
            for d, lo, up in rows
        ]
        text = json.dumps(data, indent=1) + "\n"
    else:
        lines = ["dim,lower_bound,upper_bound"]
        lines += [f"{d},{pairs.fmt(lo)},{'inf' if math.isinf(up) else pairs.fmt(up)}" for d, lo, up in rows]
        text = "\n".join(lines) + "\n"
    pairs.write_output(text, args.out)
    return EXIT_OK


def cmd_derivative_check(args) -> int:
    cfg = _config(args)
    ts = _float_list(args.t_list)
    spec = _parse_function(args.function)
    if args.pair:
        pair = _load_pair(args.pair)
        kind = pair.kind
    else:
        kind = args.kind
        if args.dim is None or args.dim < 1:
            raise CommandError("derivative-check needs a pair file or --dim")
        if not args.scale > 0:
            raise CommandError("--scale must be positive")
        rng = np.random.default_rng(cfg.seed)
    try:
        if kind == "hermitian":
            p = _polynomial(spec)
            if args.pair:
                A, K = pair.U, pair.V - pair.U
            else:
                A = linalg.random_hermitian(args.dim, rng)
                K = linalg.random_hermitian(args.dim, rng, scale=args.scale)
            report = sa.derivative_check_sa(A, K, p, ts)
        else:
            f = _circle_function(spec)
            _refuse_nondifferentiable(f)
            if args.pair:
                U = pair.U
                A = su.path_generator(pair.U, pair.V)
            else:
                U = linalg.random_unitary(args.dim, rng)
                A = linalg.random_hermitian(args.dim, rng, scale=args.scale)
            report = su.derivative_check(U, A, f, ts)
    except ValueError as exc:
        raise CommandError(str(exc)) from exc
    _emit_report(report, cfg, args)
    return EXIT_OK if report.meta["order"] >= 0.9 else EXIT_FAIL


def cmd_profile(args) -> int:
    cfg = _config(args)
    pair = _load_pair(args.pair)
    if pair.kind != "unitary":
        raise CommandError("profile needs a unitary pair", EXIT_KIND)
    f = _circle_function(_parse_function(args.function))
    prof = su.winding_profile(pair.U, pair.V, f, args.grid)
    if args.format == "json":
        data = {
            "angle": prof.angles.tolist(),
            "g": [[float(z.real), float(z.imag)] for z in prof.direct],
            "residual": prof.residuals.tolist(),
            "max_residual": prof.max_residual,
            "max_jump": prof.max_jump,
            "config": cfg.as_dict(),
        }
        text = json.dumps(data, indent=1) + "\n"
    else:
        lines = ["angle,re_g,im_g,residual"]
        lines += [
            f"{pairs.fmt(a)},{pairs.fmt(g.real)},{pairs.fmt(g.imag)},{pairs.fmt(r)}"
            for a, g, r in zip(prof.angles, prof.direct, prof.residuals)
        ]
        text = "\n".join(lines) + "\n"
    pairs.write_output(text, args.out)
    print(
        f"max_residual={prof.max_residual:.3e} max_adjacent_jump={prof.max_jump:.3e}",
        file=sys.stderr,
    )
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

_GLOBAL_DEFAULTS = {
    "seed": 0,
    "tol": 1e-8,
    "quad_nodes": 64,
    "fourier_order": 32,
    "trials": 200,
    "out": None,
    "format": None,
}


def _add_globals(parser: argparse.ArgumentParser, suppress: bool) -> None:
    d = (lambda key: argparse.SUPPRESS) if suppress else _GLOBAL_DEFAULTS.get
    parser.add_argument("--seed", type=int, default=d("seed"), help="random seed")
    parser.add_argument("--tol", type=float, default=d("tol"), help="verification tolerance")
    parser.add_argument("--quad-nodes", type=int, default=d("quad_nodes"), help="Gauss-Legendre nodes")
    parser.add_argument("--fourier-order", type=int, default=d("fourier_order"), help="largest |n|")
    parser.add_argument("--trials", type=int, default=d("trials"), help="random trials for norm bounds")
    parser.add_argument("--out", default=d("out"), help="output file (default stdout)")
    parser.add_argument("--format", choices=("json", "csv"), default=d("format"))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kreintrace",
        description="Spectral shift functions and trace formulas for finite unitary and Hermitian pairs.",
    )
    _add_globals(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-pair", help="generate a seeded unitary or Hermitian pair")
    _add_globals(p, suppress=True)
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--kind", choices=pairs.KINDS, default="unitary")
    p.add_argument("--scale", type=float, required=True, help="operator norm of the perturbation")
    p.add_argument("--rank", type=int, default=None, help="rank of the perturbation (default dim)")
    p.set_defaults(func=cmd_gen_pair)

    p = sub.add_parser("ssf", help="spectral shift function by counting, Fourier or path method")
    _add_globals(p, suppress=True)
    p.add_argument("pair")
    p.add_argument("--method", choices=("counting", "fourier", "path"), default="counting")
    p.set_defaults(func=cmd_ssf)

    p = sub.add_parser("verify", help="check the trace formula for one function")
    _add_globals(p, suppress=True)
    p.add_argument("pair")
    p.add_argument("--function", required=True, help="function spec as JSON or @file")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("lipnorm", help="operator Lipschitz seminorm bounds")
    _add_globals(p, suppress=True)
    p.add_argument("--function", required=True, help="function spec as JSON or @file")
    p.add_argument("--dims", required=True, help="comma-separated dimensions")
    p.set_defaults(func=cmd_lipnorm)

    p = sub.add_parser("derivative-check", help="finite differences against the operator derivative")
    _add_globals(p, suppress=True)
    p.add_argument("pair", nargs="?", default=None)
    p.add_argument("--function", required=True, help="function spec as JSON or @file")
    p.add_argument("--t-list", default=DEFAULT_T_LIST)
    p.add_argument("--dim", type=int, default=None, help="generate U and A instead of reading a pair")
    p.add_argument("--kind", choices=pairs.KINDS, default="unitary")
    p.add_argument("--scale", type=float, default=0.25, help="operator norm of the generated direction")
    p.set_defaults(func=cmd_derivative_check)

    p = sub.add_parser("profile", help="trace(f(zeta U) - f(zeta V)) around the circle")
    _add_globals(p, suppress=True)
    p.add_argument("pair")
    p.add_argument("--function", required=True, help="function spec as JSON or @file")
    p.add_argument("--grid", type=int, default=360)
    p.set_defaults(func=cmd_profile)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CommandError as exc:
        print(f"kreintrace {args.command}: {exc}", file=sys.stderr)
        return exc.code
    except KreinTraceError as exc:
        print(f"kreintrace {args.command}: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())

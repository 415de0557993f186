"""Finite-dimensional spectral shift functions, double operator integrals and trace formulas."""

from .circlefn import CircleFunction, OLBound, abs_conv_series, rotate, sawtooth_nonOL, trig_poly
from .doi import (
    HaagerupRep,
    KernelMatrix,
    divided_difference,
    doi_apply,
    doi_trace,
    haagerup_rep,
    haagerup_rep_monomial,
    loewner_kernel,
    ol_seminorm_lower_bound,
    schur_norm_lower_bound,
)
from .linalg import (
    HermitianEigen,
    UnitaryEigen,
    herm_eig,
    matrix_function,
    principal_log_unitary,
    unitary_eig,
    unitary_exp,
)
from .report import RunConfig, VerificationReport
from .ssf_selfadjoint import StepFunction, derivative_check_sa, ssf_counting_sa, verify_trace_formula_sa
from .ssf_unitary import (
    AtomicMeasure,
    PathSample,
    SpectralShift,
    derivative_check,
    integrate_against,
    path_decompose,
    path_nu,
    ssf_counting,
    ssf_fourier,
    trace_formula_path,
    verify_trace_formula,
    winding_profile,
    xi_from_nu,
)

__version__ = "0.1.0"

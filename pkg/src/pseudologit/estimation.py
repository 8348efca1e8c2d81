"""Point estimation for the full model.

Method of moments comes in two flavours: ``"paper"`` reproduces the
published sigma1 formula (which leaves out beta-hat and is badly biased
whenever beta != 1) and ``"corrected"`` uses the residual variance
``S2^2 - beta_hat * S12``.  Maximum likelihood runs a BFGS quasi-Newton
search in log-scale coordinates; :func:`fit_mle_paper_hybrid` is the
coordinate-wise Newton / fixed-point scheme kept for comparison.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, TextIO, Union

import numpy as np

from .data import PairedSample, summarize
from .errors import (
    DegenerateSampleError,
    DomainError,
    NonPositiveScaleError,
    SingularInformationError,
)
from .model import PARAM_NAMES, ModelParams, loglik_and_score

__all__ = [
    "FitMethod", "FitResult", "SolverOptions", "PairedSample", "summarize",
    "method_of_moments", "fit_mle", "fit_mle_paper_hybrid", "observed_information",
    "standard_errors", "newton_step_location", "Parametrization", "FULL_MODEL",
    "MIN_MLE_SAMPLE",
]

MIN_MLE_SAMPLE = 6
_PI = math.pi
# Fisher information of log(scale) for one logistic observation.
_LOG_SCALE_INFO = (_PI ** 2 + 3.0) / 9.0
_MAX_LOG_STEP = 2.0
_ARMIJO_C1 = 1e-4
_STEP_TOL = 1e-12


class FitMethod(str, enum.Enum):
    MOM_PAPER = "MoM-paper"
    MOM_CORRECTED = "MoM-corrected"
    MLE_QUASI_NEWTON = "MLE-quasi-newton"
    MLE_PAPER_HYBRID = "MLE-paper-hybrid"


@dataclass
class SolverOptions:
    """Stopping rules and tracing for the iterative fits.

    ``tol`` bounds the sup-norm of the score; ``None`` means ``1e-8 * n``.
    When ``verbose`` is set, one line per iteration goes to ``trace``
    (a text stream or a callable taking a string; stderr-free by default).
    """

    tol: Optional[float] = None
    max_iter: int = 500
    verbose: bool = False
    trace: Union[TextIO, Callable[[str], None], None] = None

    def tolerance(self, n: int) -> float:
        return self.tol if self.tol is not None else 1e-8 * n

    def emit(self, line: str):
        if not self.verbose or self.trace is None:
            return
        if hasattr(self.trace, "write"):
            self.trace.write(line + "\n")
        else:
            self.trace(line)


@dataclass
class FitResult:
    estimates: ModelParams
    std_errors: Optional[np.ndarray]
    loglik_at_estimate: float
    method: FitMethod
    converged: bool
    iterations: int
    grad_norm: float
    n: int
    parameter_names: tuple = PARAM_NAMES
    free_estimates: Optional[np.ndarray] = None
    note: str = ""
    submodel: Optional[object] = field(default=None, repr=False)

    @property
    def k(self) -> int:
        return len(self.parameter_names)

    @property
    def minus2loglik(self) -> float:
        return -2.0 * self.loglik_at_estimate

    @property
    def aic(self) -> float:
        return self.minus2loglik + 2 * self.k

    @property
    def bic(self) -> float:
        return self.minus2loglik + self.k * math.log(self.n)

    def free_values(self) -> np.ndarray:
        if self.free_estimates is not None:
            return self.free_estimates
        return self.estimates.to_array()


class Parametrization:
    """Affine map from free coordinates to the full log-scale vector.

    The full working vector is ``u = (mu, log sigma0, alpha, beta, log sigma1)``
    and a (sub)model is ``u = A @ v + offset`` for free ``v``.  Every nested
    model handled here (equal scales, a scale pinned to one) is of that
    form, so one optimizer serves all of them.  ``log_mask`` marks which
    free coordinates are log-scales.
    """

    _U_LOG = np.array([False, True, False, False, True])

    def __init__(self, names, A, offset=None):
        self.names = tuple(names)
        self.A = np.asarray(A, dtype=float)
        self.offset = np.zeros(5) if offset is None else np.asarray(offset, dtype=float)
        self.k = self.A.shape[1]
        self.log_mask = np.array([bool(np.any(self.A[self._U_LOG, j] != 0)) for j in range(self.k)])
        self._pinv = np.linalg.pinv(self.A)

    def to_params(self, v) -> ModelParams:
        u = self.A @ np.asarray(v, dtype=float) + self.offset
        return ModelParams(u[0], math.exp(u[1]), u[2], u[3], math.exp(u[4]))

    def from_params(self, p: ModelParams) -> np.ndarray:
        u = np.array([p.mu, math.log(p.sigma0), p.alpha, p.beta, math.log(p.sigma1)])
        return self._pinv @ (u - self.offset)

    def natural(self, v) -> np.ndarray:
        v = np.asarray(v, dtype=float)
        return np.where(self.log_mask, np.exp(v), v)

    def from_natural(self, w) -> np.ndarray:
        w = np.asarray(w, dtype=float)
        return np.where(self.log_mask, np.log(np.where(self.log_mask, w, 1.0)), w)

    def project(self, p: ModelParams) -> ModelParams:
        return self.to_params(self.from_params(p))

    def grad_v(self, g_full: np.ndarray, p: ModelParams) -> np.ndarray:
        g_u = g_full * np.array([1.0, p.sigma0, 1.0, 1.0, p.sigma1])
        return self.A.T @ g_u

    def grad_natural(self, g_full: np.ndarray, p: ModelParams, v) -> np.ndarray:
        return self.grad_v(g_full, p) / np.where(self.log_mask, self.natural(v), 1.0)

    def expected_information_v(self, p: ModelParams, s: PairedSample) -> np.ndarray:
        n = s.n
        mean_x2 = s.s1_sq + s.m1 ** 2
        info = np.zeros((5, 5))
        info[0, 0] = n / (3.0 * p.sigma0 ** 2)
        info[1, 1] = n * _LOG_SCALE_INFO
        c = n / (3.0 * p.sigma1 ** 2)
        info[2:4, 2:4] = c * np.array([[1.0, s.m1], [s.m1, mean_x2]])
        info[4, 4] = n * _LOG_SCALE_INFO
        return self.A.T @ info @ self.A


FULL_MODEL = Parametrization(PARAM_NAMES, np.eye(5))


# --------------------------------------------------------------------------
# method of moments


def method_of_moments(s: PairedSample, variant: str = "corrected") -> FitResult:
    """Moment estimators from the divide-by-n plug-in moments.

    ``variant="paper"`` uses ``sigma1 = sqrt(3 (S2^2 - S12)) / pi``;
    ``variant="corrected"`` uses ``sqrt(3 (S2^2 - beta_hat S12)) / pi``.
    """
    if variant not in ("paper", "corrected"):
        raise DomainError(f"unknown method-of-moments variant {variant!r}")
    if not s.s1_sq > 0.0:
        raise DegenerateSampleError("x has zero variance")
    beta = s.s12 / s.s1_sq
    alpha = s.m2 - beta * s.m1
    sigma0 = math.sqrt(3.0 * s.s1_sq) / _PI
    if variant == "paper":
        radicand = s.s2_sq - s.s12
        method = FitMethod.MOM_PAPER
    else:
        radicand = s.s2_sq - beta * s.s12
        method = FitMethod.MOM_CORRECTED
    if not radicand > 0.0:
        raise NonPositiveScaleError(
            f"sigma1 radicand is {radicand:.6g} (variant={variant}); scale would be non-positive")
    sigma1 = math.sqrt(3.0 * radicand) / _PI
    est = ModelParams(s.m1, sigma0, alpha, beta, sigma1)
    ll, g = loglik_and_score(est, s)
    return FitResult(est, None, ll, method, True, 0, float(np.max(np.abs(g))), s.n)


# --------------------------------------------------------------------------
# maximum likelihood


def check_identifiable(s: PairedSample):
    if s.n < MIN_MLE_SAMPLE:
        raise DegenerateSampleError(f"need at least {MIN_MLE_SAMPLE} pairs for ML fitting, got {s.n}")
    if not s.s1_sq > 0.0:
        raise DegenerateSampleError("x has zero variance")
    resid = s.s2_sq - s.s12 ** 2 / s.s1_sq
    if not resid > 1e-12 * max(s.s2_sq, 1e-300):
        raise DegenerateSampleError("x and y are collinear; conditional scale is not identifiable")


def default_init(s: PairedSample) -> ModelParams:
    try:
        return method_of_moments(s, "corrected").estimates
    except (NonPositiveScaleError, DegenerateSampleError, DomainError):
        return ModelParams(s.m1, math.sqrt(3.0 * s.s1_sq) / _PI, s.m2, 0.0,
                           math.sqrt(3.0 * s.s2_sq) / _PI)


def _evaluate(param: Parametrization, s: PairedSample, v):
    p = param.to_params(v)
    ll, g = loglik_and_score(p, s)
    return p, ll, param.grad_v(g, p), param.grad_natural(g, p, v)


def quasi_newton(s: PairedSample, param: Parametrization, init: ModelParams,
                 opts: SolverOptions, method: FitMethod = FitMethod.MLE_QUASI_NEWTON,
                 submodel=None) -> FitResult:
    """Maximize the log-likelihood over ``param``'s free coordinates with BFGS.

    The inverse-Hessian seed is the inverse expected information at the
    start point, which makes the first step close to a scoring step.
    Near the optimum the objective change falls below float resolution, so
    a step that leaves the objective flat to rounding is still accepted
    when it shrinks the gradient.
    """
    tol = opts.tolerance(s.n)
    v = param.from_params(init)
    p, ll, gv, gnat = _evaluate(param, s, v)
    if not math.isfinite(ll):
        raise DomainError("log-likelihood is not finite at the starting point")
    H0 = np.linalg.inv(param.expected_information_v(p, s))
    H = H0.copy()
    it = 0
    converged = float(np.max(np.abs(gnat))) < tol
    restarted = False
    while not converged and it < opts.max_iter:
        it += 1
        # maximize ll  <=>  minimize -ll; ascent direction is H @ grad
        d = H @ gv
        slope = float(gv @ d)
        if slope <= 0.0:
            H = H0.copy()
            d = H @ gv
            slope = float(gv @ d)
        big = np.max(np.abs(d[param.log_mask])) if param.log_mask.any() else 0.0
        if big > _MAX_LOG_STEP:
            d *= _MAX_LOG_STEP / big
            slope = float(gv @ d)
        if np.max(np.abs(d) / np.maximum(1.0, np.abs(v))) < _STEP_TOL:
            converged = True
            break
        t = 1.0
        accepted = False
        gnorm = float(np.max(np.abs(gnat)))
        flat = 10.0 * np.finfo(float).eps * max(1.0, abs(ll))
        for _ in range(60):
            v_new = v + t * d
            try:
                p_new, ll_new, gv_new, gnat_new = _evaluate(param, s, v_new)
            except (DomainError, OverflowError):
                t *= 0.5
                continue
            if math.isfinite(ll_new) and (
                ll_new >= ll + _ARMIJO_C1 * t * slope
                or (ll_new >= ll - flat and float(np.max(np.abs(gnat_new))) < gnorm)
            ):
                accepted = True
                break
            t *= 0.5
        if not accepted:
            if restarted:
                break
            H = H0.copy()
            restarted = True
            continue
        restarted = False
        step = v_new - v
        y = gv - gv_new  # gradient of the minimized objective changes by -(gv_new - gv)
        sy = float(step @ y)
        if sy > 1e-12 * np.linalg.norm(step) * np.linalg.norm(y):
            rho = 1.0 / sy
            Hy = H @ y
            H = (H - rho * (np.outer(step, Hy) + np.outer(Hy, step))
                 + (rho * rho * float(y @ Hy) + rho) * np.outer(step, step))
        v, p, ll, gv, gnat = v_new, p_new, ll_new, gv_new, gnat_new
        grad_norm = float(np.max(np.abs(gnat)))
        opts.emit(f"iter {it:4d}  loglik {ll:.12g}  |score| {grad_norm:.3e}  t {t:.3g}")
        converged = grad_norm < tol
    grad_norm = float(np.max(np.abs(gnat)))
    return FitResult(
        estimates=p, std_errors=None, loglik_at_estimate=ll, method=method,
        converged=bool(converged), iterations=it, grad_norm=grad_norm, n=s.n,
        parameter_names=param.names, free_estimates=param.natural(v), submodel=submodel,
    )


def attach_standard_errors(fit: FitResult, s: PairedSample, param: Parametrization) -> FitResult:
    try:
        info = observed_information(fit.estimates, s, param)
        fit.std_errors = standard_errors(info)
    except SingularInformationError as exc:
        fit.std_errors = None
        fit.note = (fit.note + "; " if fit.note else "") + str(exc)
    return fit


def fit_mle(s: PairedSample, init: Optional[ModelParams] = None,
            opts: Optional[SolverOptions] = None, compute_se: bool = True) -> FitResult:
    """Full five-parameter maximum-likelihood fit.

    Starts from the corrected moment estimates unless ``init`` is given.
    A run that exhausts ``opts.max_iter`` comes back with
    ``converged=False``; it is never reported as a success.
    """
    opts = opts or SolverOptions()
    check_identifiable(s)
    start = init if init is not None else default_init(s)
    fit = quasi_newton(s, FULL_MODEL, start, opts)
    if compute_se:
        attach_standard_errors(fit, s, FULL_MODEL)
    return fit


# --------------------------------------------------------------------------
# coordinate-wise Newton / fixed-point scheme


def newton_step_location(resid: np.ndarray, scale: float) -> float:
    """Newton increment for a logistic location given residuals ``x - loc``.

    Solves ``sum tanh(r/2s) = 0``, the location score equation, one step at
    a time: returns ``delta`` so the updated location is ``loc + delta``.
    """
    t = np.tanh(0.5 * resid / scale)
    g = float(np.sum(t))
    dg = float(np.sum(1.0 - t * t)) / (2.0 * scale)
    return g / dg


def _scale_fixed_point(resid: np.ndarray, scale: float) -> float:
    return float(np.mean(resid * np.tanh(0.5 * resid / scale)))


def fit_mle_paper_hybrid(s: PairedSample, init: Optional[ModelParams] = None,
                         opts: Optional[SolverOptions] = None,
                         compute_se: bool = True) -> FitResult:
    """Alternate Newton steps in the locations with fixed-point scale updates.

    Each sweep does one Newton step for ``mu``, one fixed-point update of
    ``sigma0``, one joint Newton step for ``(alpha, beta)`` and one
    fixed-point update of ``sigma1``.  If the log-likelihood drops on two
    consecutive sweeps, or ``max_iter`` sweeps pass, the fit is redone with
    :func:`fit_mle` and the result is labelled as such.
    """
    opts = opts or SolverOptions()
    check_identifiable(s)
    start = init if init is not None else default_init(s)
    tol = opts.tolerance(s.n)
    x, y = s.xs, s.ys
    mu, s0, a, b, s1 = start.mu, start.sigma0, start.alpha, start.beta, start.sigma1
    p = start
    ll, g = loglik_and_score(p, s)
    drops = 0
    it = 0
    failed = False
    while float(np.max(np.abs(g))) >= tol:
        if it >= opts.max_iter:
            failed = True
            break
        it += 1
        mu += newton_step_location(x - mu, s0)
        s0 = _scale_fixed_point(x - mu, s0)
        r = y - a - b * x
        t = np.tanh(0.5 * r / s1)
        w = 1.0 - t * t
        G = np.array([np.sum(t), np.sum(x * t)])
        J = np.array([[np.sum(w), np.sum(w * x)], [np.sum(w * x), np.sum(w * x * x)]]) / (2.0 * s1)
        try:
            da, db = np.linalg.solve(J, G)
        except np.linalg.LinAlgError:
            failed = True
            break
        a += da
        b += db
        s1 = _scale_fixed_point(y - a - b * x, s1)
        if not all(math.isfinite(v) for v in (mu, s0, a, b, s1)) or s0 <= 0.0 or s1 <= 0.0:
            failed = True
            break
        p = ModelParams(mu, s0, a, b, s1)
        ll_new, g = loglik_and_score(p, s)
        drops = drops + 1 if ll_new < ll else 0
        ll = ll_new
        opts.emit(f"sweep {it:4d}  loglik {ll:.12g}  |score| {np.max(np.abs(g)):.3e}")
        if drops >= 2:
            failed = True
            break
    if failed:
        fit = fit_mle(s, init=start, opts=opts, compute_se=compute_se)
        fit.note = "paper-hybrid scheme did not converge; fell back to quasi-Newton"
        return fit
    fit = FitResult(p, None, ll, FitMethod.MLE_PAPER_HYBRID, True, it,
                    float(np.max(np.abs(g))), s.n, free_estimates=p.to_array())
    if compute_se:
        attach_standard_errors(fit, s, FULL_MODEL)
    return fit


# --------------------------------------------------------------------------
# information and standard errors


def _natural_score(param: Parametrization, s: PairedSample, w: np.ndarray) -> np.ndarray:
    v = param.from_natural(w)
    p = param.to_params(v)
    _, g = loglik_and_score(p, s)
    return param.grad_natural(g, p, v)


def observed_information(p: ModelParams, s: PairedSample,
                         param: Parametrization = FULL_MODEL) -> np.ndarray:
    """Negative Hessian of the log-likelihood by central differences of the score.

    Works in the natural free coordinates of ``param`` (for the full model,
    ``(mu, sigma0, alpha, beta, sigma1)``); step ``1e-5 * max(1, |theta_j|)``.
    """
    w = param.natural(param.from_params(p))
    k = w.size
    hess = np.empty((k, k))
    for j in range(k):
        h = 1e-5 * max(1.0, abs(w[j]))
        if param.log_mask[j]:
            h = min(h, 0.5 * w[j])
        wp = w.copy()
        wm = w.copy()
        wp[j] += h
        wm[j] -= h
        hess[:, j] = (_natural_score(param, s, wp) - _natural_score(param, s, wm)) / (2.0 * h)
    info = -hess
    return 0.5 * (info + info.T)


def standard_errors(info) -> np.ndarray:
    info = np.asarray(info, dtype=float)
    if info.ndim != 2 or info.shape[0] != info.shape[1]:
        raise DomainError("information matrix must be square")
    if not np.all(np.isfinite(info)):
        raise SingularInformationError("information matrix has non-finite entries")
    try:
        chol = np.linalg.cholesky(info)
    except np.linalg.LinAlgError:
        raise SingularInformationError("information matrix is not positive definite") from None
    inv_chol = np.linalg.inv(chol)
    cov_diag = np.sum(inv_chol * inv_chol, axis=0)
    return np.sqrt(cov_diag)

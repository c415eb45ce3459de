"""
l1 recovery: LASSO and basis pursuit.

Both run accelerated proximal gradient (monotone FISTA) with complex soft
thresholding over a decreasing lambda schedule, followed by a least-squares
refit on the detected support. Basis pursuit additionally tries the refit
after every continuation stage and stops as soon as it reproduces y.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from pilotcs.errors import OverdeterminedSupportError

STEP_RULES = ("fixed", "backtracking")
_TINY = 1e-300


@dataclass(frozen=True)
class SolverConfig:
    """Solver settings.

    ``lam`` is the final LASSO weight. Continuation starts at
    ``continuation_start * max|Phi^H y|`` and decreases geometrically to
    ``lam`` over ``continuation_steps`` stages. Intermediate stages stop at
    ``stage_tol`` (or ``rel_tol`` if larger), the final one at ``rel_tol``.
    ``max_iters`` bounds each stage. The detected support keeps entries with
    modulus at least ``support_threshold`` times the largest one; when
    debiasing, refit coefficients below ``lambda_floor * lam`` are pruned.
    """

    lam: float = 0.0
    continuation_steps: int = 10
    continuation_start: float = 0.5
    max_iters: int = 3000
    rel_tol: float = 1e-6
    stage_tol: float = 1e-3
    step_rule: str = "fixed"
    debias: bool = True
    support_threshold: float = 1e-3
    lambda_floor: float = 0.5
    accelerated: bool = True
    bp_lambda_ratio: float = 1e-6
    bp_residual_tol: float = 1e-8

    def __post_init__(self):
        if not (self.lam >= 0 and math.isfinite(self.lam)):
            raise ValueError(f"lam must be finite and nonnegative, got {self.lam}")
        if self.continuation_steps < 1:
            raise ValueError("continuation_steps must be >= 1")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if not self.rel_tol > 0:
            raise ValueError("rel_tol must be positive")
        if self.step_rule not in STEP_RULES:
            raise ValueError(f"step_rule must be one of {STEP_RULES}, got {self.step_rule!r}")
        if not self.support_threshold > 0:
            raise ValueError("support_threshold must be positive")
        if self.lambda_floor < 0:
            raise ValueError("lambda_floor must be nonnegative")


@dataclass
class RecoveryResult:
    estimate: np.ndarray
    iterations: int
    final_objective: float
    support_estimate: np.ndarray
    converged: bool
    lam: float = 0.0
    history: list = field(default_factory=list, repr=False)


def soft_threshold(v: np.ndarray, tau: float) -> np.ndarray:
    """Complex soft thresholding: shrink each modulus by tau, keep the phase."""
    mag = np.abs(v)
    scale = np.maximum(mag - tau, 0.0) / np.maximum(mag, _TINY)
    return v * scale


def lasso_objective(op, h, y, lam) -> float:
    r = op.forward(h) - y
    return 0.5 * float(np.vdot(r, r).real) + lam * float(np.sum(np.abs(h)))


def noisy_lambda(sigma_sq: float, N: int, factor: float = 1.0) -> float:
    """Noise-calibrated weight factor * sigma * sqrt(2 ln N)."""
    return factor * math.sqrt(sigma_sq) * math.sqrt(2.0 * math.log(N))


def _check_y(op, y) -> np.ndarray:
    y = np.asarray(y, dtype=np.complex128)
    if y.shape != (op.M,):
        raise ValueError(f"expected measurement vector of length M={op.M}, got shape {y.shape}")
    if not np.all(np.isfinite(y)):
        raise ValueError("measurement vector contains non-finite values")
    return y


def _schedule(lam_max: float, lam: float, cfg: SolverConfig) -> list:
    start = cfg.continuation_start * lam_max
    if cfg.continuation_steps == 1 or lam >= start:
        return [lam]
    floor = lam if lam > 0 else lam_max * 1e-9
    ratios = np.geomspace(start, floor, cfg.continuation_steps)
    sched = list(ratios[:-1]) + [lam]
    return sched


def _stage(op, y, x, Ax, lam, step, tol, cfg, history, stage):
    """Monotone FISTA at fixed lam. Returns (x, Ax, iterations, converged, step)."""
    def objective(Ah, h):
        r = Ah - y
        return 0.5 * float(np.vdot(r, r).real) + lam * float(np.sum(np.abs(h)))

    def prox_step(v, Av, step):
        grad = op.adjoint(Av - y)
        if cfg.step_rule == "fixed":
            z = soft_threshold(v - step * grad, step * lam)
            return z, op.forward(z), step
        r = Av - y
        f_v = 0.5 * float(np.vdot(r, r).real)
        while True:
            z = soft_threshold(v - step * grad, step * lam)
            Az = op.forward(z)
            d = z - v
            rz = Az - y
            quad = f_v + float(np.vdot(grad, d).real) + float(np.vdot(d, d).real) / (2 * step)
            if 0.5 * float(np.vdot(rz, rz).real) <= quad * (1 + 1e-12) + 1e-300:
                return z, Az, step
            step *= 0.5

    F = objective(Ax, x)
    v, Av = x, Ax
    t = 1.0
    for it in range(1, cfg.max_iters + 1):
        z, Az, step = prox_step(v, Av, step)
        Fz = objective(Az, z)
        if Fz <= F:
            x_new, Ax_new, F_new = z, Az, Fz
        else:
            x_new, Ax_new, F_new = x, Ax, F
        change = np.linalg.norm(z - v)
        history.append((stage, lam, it, F_new, float(np.linalg.norm(Ax_new - y))))
        if change <= tol * max(np.linalg.norm(z), _TINY):
            # confirm with a plain proximal step from the monotone iterate
            zz, Azz, step = prox_step(x_new, Ax_new, step)
            if np.linalg.norm(zz - x_new) <= tol * max(np.linalg.norm(zz), _TINY):
                return zz, Azz, it, True, step
        if cfg.accelerated:
            t_new = 0.5 * (1 + math.sqrt(1 + 4 * t * t))
            a, b = t / t_new, (t - 1) / t_new
            v = x_new + a * (z - x_new) + b * (x_new - x)
            Av = Ax_new + a * (Az - Ax_new) + b * (Ax_new - Ax)
            t = t_new
        else:
            v, Av = x_new, Ax_new
        x, Ax, F = x_new, Ax_new, F_new
    return x, Ax, cfg.max_iters, False, step


def _support(x: np.ndarray, rel: float) -> np.ndarray:
    mag = np.abs(x)
    peak = mag.max() if mag.size else 0.0
    if peak == 0:
        return np.zeros(0, dtype=np.int64)
    return np.flatnonzero(mag >= rel * peak)


def debias_on_support(op, support, y) -> np.ndarray:
    """Least-squares coefficients of y on the columns listed in ``support``.

    Returns a vector aligned with ``support``.
    """
    support = np.asarray(support, dtype=np.int64).ravel()
    y = np.asarray(y, dtype=np.complex128)
    if support.size == 0:
        return np.zeros(0, dtype=np.complex128)
    if support.size > op.M:
        raise OverdeterminedSupportError(
            f"support of size {support.size} exceeds the {op.M} available measurements")
    A = op.columns(support)
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    return coef


def _refit(op, y, x, rel, floor=0.0):
    """Least-squares refit on the thresholded support of x.

    Refit coefficients below ``floor`` are dropped and the rest refit once more.
    """
    supp = _support(x, rel)
    if supp.size == 0 or supp.size > op.M:
        return None, supp
    coef = debias_on_support(op, supp, y)
    if floor > 0:
        keep = np.abs(coef) >= floor
        if not keep.all():
            supp = supp[keep]
            coef = debias_on_support(op, supp, y)
    est = np.zeros(op.N, dtype=np.complex128)
    est[supp] = coef
    return est, supp


def _solve(op, y, cfg: SolverConfig, lam: float, early_exit=None) -> RecoveryResult:
    lam_max = float(np.max(np.abs(op.adjoint(y)))) if op.N else 0.0
    x = np.zeros(op.N, dtype=np.complex128)
    history: list = []
    if lam_max == 0.0 or lam >= lam_max:
        return RecoveryResult(x, 0, lasso_objective(op, x, y, lam), np.zeros(0, dtype=np.int64),
                              True, lam, history)

    step = 1.0 / op.spectral_norm_sq()
    Ax = np.zeros(op.M, dtype=np.complex128)
    total, converged = 0, False
    sched = _schedule(lam_max, lam, cfg)
    for k, lam_k in enumerate(sched):
        last = k == len(sched) - 1
        tol = cfg.rel_tol if last else max(cfg.rel_tol, cfg.stage_tol)
        x, Ax, its, converged, step = _stage(op, y, x, Ax, lam_k, step, tol, cfg, history, k)
        total += its
        if early_exit is not None and not last:
            done = early_exit(x)
            if done is not None:
                est, supp = done
                return RecoveryResult(est, total, lasso_objective(op, est, y, lam), supp, True, lam, history)

    supp = _support(x, cfg.support_threshold)
    if cfg.debias:
        est, refit_supp = _refit(op, y, x, cfg.support_threshold, cfg.lambda_floor * lam)
        if est is not None:
            x, supp = est, refit_supp
    return RecoveryResult(x, total, lasso_objective(op, x, y, lam), supp, converged, lam, history)


def lasso(op, y, cfg: Optional[SolverConfig] = None) -> RecoveryResult:
    """Approximately minimize 0.5*||Phi h - y||^2 + lam*||h||_1.

    Parameters
    ----------
    op : MeasurementOperator
    y : array of shape (M,)
    cfg : SolverConfig
        ``cfg.lam`` is the target weight; with ``cfg.debias`` the entries on
        the detected support are replaced by their least-squares refit.

    Returns
    -------
    RecoveryResult
        ``converged`` is False when the final stage hit ``max_iters``.
    """
    cfg = cfg or SolverConfig()
    y = _check_y(op, y)
    return _solve(op, y, cfg, cfg.lam)


def basis_pursuit(op, y, cfg: Optional[SolverConfig] = None) -> RecoveryResult:
    """Approximate argmin ||h||_1 subject to Phi h = y.

    Runs LASSO continuation down to ``bp_lambda_ratio * max|Phi^H y|`` (or
    ``cfg.lam`` if set). After each stage the detected support is refit by
    least squares; the refit is accepted once its relative residual is below
    ``bp_residual_tol`` and the support holds at most M/2 entries.
    """
    cfg = cfg or SolverConfig()
    y = _check_y(op, y)
    y_norm = float(np.linalg.norm(y))
    if y_norm == 0:
        z = np.zeros(op.N, dtype=np.complex128)
        return RecoveryResult(z, 0, 0.0, np.zeros(0, dtype=np.int64), True, 0.0, [])
    lam_max = float(np.max(np.abs(op.adjoint(y))))
    lam = cfg.lam if cfg.lam > 0 else cfg.bp_lambda_ratio * lam_max

    def early_exit(x):
        est, supp = _refit(op, y, x, cfg.support_threshold)
        if est is None or supp.size > op.M // 2:
            return None
        if np.linalg.norm(op.forward(est) - y) <= cfg.bp_residual_tol * y_norm:
            return est, supp
        return None

    res = _solve(op, y, replace(cfg, debias=True), lam, early_exit)
    resid = float(np.linalg.norm(op.forward(res.estimate) - y)) / y_norm
    res.converged = res.converged and resid <= 1e-6
    return res

"""Independent verification paths for the backward-error machinery.

Everything here is deliberately redundant with the main implementation:
the linearization is rebuilt with literal Kronecker products, the
minimum-norm solve is redone through the normal equations of the
transposed system, the uniform pseudoinverse bound is recomputed from an
explicit SVD, and the minimization over multipliers is done numerically
with a derivative-free method. These paths exist so the closed-form
routes in backward_error can be cross-checked, never to replace them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla
from scipy.optimize import minimize as _nelder_mead

from .core import (
    IlseProblem,
    OptimizationError,
    RankDeficiencyError,
    WeightScheme,
    apply_signature,
)
from .backward_error import backward_error_estimate, least_squares_multiplier, rhs_vector


def _kron_linearization(problem, y, xi, w):
    # Literal Kronecker-product assembly; independent of the block fills
    # used by backward_error.linearization_matrix.
    m, n, s = problem.m, problem.n, problem.s
    y = np.asarray(y, dtype=float)
    xi = np.asarray(xi, dtype=float)
    r_y = problem.residual(y)
    sr = apply_signature(problem.sig, r_y)
    AtS = apply_signature(problem.sig, problem.A).T

    K = np.kron(np.eye(n), sr[None, :]) - AtS @ np.kron(y[None, :], np.eye(m))
    top = np.hstack([
        K,
        AtS / w.theta1,
        -np.kron(np.eye(n), xi[None, :]) / w.theta2,
        np.zeros((n, s)),
    ])
    bottom = np.hstack([
        np.zeros((s, n * m + m)),
        np.kron(y[None, :], np.eye(s)) / w.theta2,
        -np.eye(s) / w.theta3,
    ])
    return np.vstack([top, bottom])


def estimate_via_normal_equations(
    problem: IlseProblem, y: np.ndarray, xi: np.ndarray, w: WeightScheme
) -> float:
    """rho(xi) through rhs^T (J J^T)^-1 rhs on a Kronecker-built J.

    Squares the conditioning, so only trustworthy on benign instances;
    that is exactly what makes it a useful cross-check for the QR path.
    """
    J = _kron_linearization(problem, y, xi, w)
    rhs = rhs_vector(problem, y, xi)
    G = J @ J.T
    wvec = sla.solve(0.5 * (G + G.T), rhs, assume_a="pos")
    return math.sqrt(max(float(rhs @ wvec), 0.0))


def pinv_norm_bound_via_svd(problem: IlseProblem, y: np.ndarray, w: WeightScheme) -> float:
    """tau0 recomputed as the explicit pseudoinverse norm.

    Assembles the linearization with the multiplier-dependent column block
    zeroed out and returns 1/sigma_min from a dense SVD of the full
    (n+s) x (nm+m+ns+s) matrix.
    """
    n, s = problem.n, problem.s
    M = _kron_linearization(problem, y, np.zeros(s), w)
    M[:, n * problem.m + problem.m:n * problem.m + problem.m + n * s] = 0.0
    svals = sla.svdvals(M)
    smin = float(svals[-1])
    if smin <= 0.0:
        raise RankDeficiencyError("zeroed linearization is singular", sigma_min=smin)
    return 1.0 / smin


def estimate_on_grid(
    problem: IlseProblem, y: np.ndarray, w: WeightScheme,
    lo: float, hi: float, step: float,
) -> tuple[float, float]:
    """Exhaustive 1-D scan of rho over scalar multipliers in [lo, hi].

    Only valid for s = 1. Returns (xi_best, rho_best). Brute force by
    design: this is the reference the optimizer is checked against.
    """
    if problem.s != 1:
        raise ValueError("grid scan requires a single constraint (s = 1)")
    best_xi, best_rho = lo, math.inf
    for t in np.arange(lo, hi + 0.5 * step, step):
        rho = estimate_via_normal_equations(problem, y, np.array([t]), w)
        if rho < best_rho:
            best_xi, best_rho = float(t), rho
    return best_xi, best_rho


@dataclass(frozen=True)
class MinimizeResult:
    """Best multiplier found, its estimate value, the total number of
    estimate evaluations, and whether any start converged."""

    xi_star: np.ndarray
    rho_star: float
    iterations: int
    converged: bool


def minimize_estimate(
    problem: IlseProblem,
    y: np.ndarray,
    w: WeightScheme,
    xi0: np.ndarray | None = None,
    max_iters: int | None = None,
    tol: float = 1e-8,
    starts: int = 3,
    seed: int = 0,
) -> MinimizeResult:
    """Numerically minimize rho over multipliers with multi-start Nelder-Mead.

    Starting points are the least-squares multiplier, optionally xi0, and
    ``starts`` random Gaussian points; max_iters caps the total number of
    rho evaluations (default 200 per multiplier dimension). Trial points
    where the linearization is rank deficient are skipped. The result
    never exceeds rho at the least-squares multiplier, ties between starts
    resolve to the earlier start, and fixed seeds give bitwise-identical
    output.
    """
    y = np.asarray(y, dtype=float)
    s = problem.s
    if max_iters is None:
        max_iters = 200 * max(s, 1)

    xi1 = least_squares_multiplier(problem, y)
    points = [xi1]
    if xi0 is not None:
        points.append(np.asarray(xi0, dtype=float))
    rng = np.random.Generator(np.random.Philox(key=seed & (2**64 - 1)))
    spread = 1.0 + float(np.linalg.norm(xi1))
    for _ in range(starts):
        points.append(spread * rng.standard_normal(s))

    evals = 0
    failures = 0

    def objective(xi):
        nonlocal evals, failures
        evals += 1
        try:
            return backward_error_estimate(problem, y, xi, w)
        except RankDeficiencyError:
            failures += 1
            return math.inf

    best_rho = math.inf
    best_xi = xi1
    converged = False
    budget_per_start = max(max_iters // len(points), 2 * s + 4)
    for x0 in points:
        f0 = objective(x0)
        if f0 < best_rho:
            best_rho, best_xi = f0, np.array(x0, dtype=float)
        if not math.isfinite(f0):
            continue
        res = _nelder_mead(
            objective,
            x0,
            method="Nelder-Mead",
            options={
                "maxfev": budget_per_start,
                "fatol": tol * max(f0, 1e-300),
                "xatol": tol * (1.0 + float(np.linalg.norm(x0))),
                "disp": False,
            },
        )
        if res.success:
            converged = True
        if math.isfinite(res.fun) and res.fun < best_rho:
            best_rho, best_xi = float(res.fun), np.array(res.x, dtype=float)

    if not math.isfinite(best_rho):
        raise OptimizationError(
            f"every trial point failed ({failures} rank-deficient evaluations)"
        )
    return MinimizeResult(
        xi_star=best_xi, rho_star=best_rho, iterations=evals, converged=converged
    )


def estimate_gradient_fd(
    problem: IlseProblem,
    y: np.ndarray,
    xi: np.ndarray,
    w: WeightScheme,
    h: float | None = None,
) -> np.ndarray:
    """Central finite-difference gradient of xi -> rho(xi).

    Diagnostic only: rho involves extreme singular values and need not be
    differentiable everywhere. Default step is 1e-6 * (1 + |xi|).
    """
    xi = np.asarray(xi, dtype=float)
    if h is None:
        h = 1e-6 * (1.0 + float(np.linalg.norm(xi)))
    grad = np.empty(xi.shape[0])
    for i in range(xi.shape[0]):
        step = np.zeros_like(xi)
        step[i] = h
        up = backward_error_estimate(problem, y, xi + step, w)
        down = backward_error_estimate(problem, y, xi - step, w)
        grad[i] = (up - down) / (2.0 * h)
    return grad

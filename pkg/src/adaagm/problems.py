"""Smooth convex test problems with known constants.

Each factory returns an immutable :class:`SmoothProblem` whose ground-truth
constants (smoothness L, strong-convexity modulus mu, minimizer, minimum
value) are filled in whenever they are available analytically or by a
high-accuracy reference solve.  These constants are what the diagnostics
layer checks solver runs against.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np
from scipy.special import expit, logsumexp, softmax

Array = np.ndarray


@dataclass(frozen=True)
class SmoothProblem:
    """A smooth convex objective with optional ground-truth constants.

    Instances are read-only after construction and hold no mutable state,
    so they are safe to evaluate concurrently.
    """

    dimension: int
    value: Callable[[Array], float]
    gradient: Callable[[Array], Array]
    L_known: Optional[float] = None
    mu_known: Optional[float] = None
    x_star: Optional[Array] = None
    f_star: Optional[float] = None
    name: str = "problem"
    # True when x_star/f_star come from a numerical reference solve rather
    # than a closed form; certificate tolerances widen accordingly.
    solution_is_reference: bool = False

    def with_minimizer(self, x_star, f_star: Optional[float] = None,
                       reference: bool = False) -> "SmoothProblem":
        """Return a copy with the minimizer fields filled in."""
        x_star = np.asarray(x_star, dtype=float)
        if x_star.shape != (self.dimension,):
            raise ValueError("minimizer has wrong dimension")
        if f_star is None:
            f_star = float(self.value(x_star))
        return replace(self, x_star=x_star, f_star=float(f_star),
                       solution_is_reference=reference)


def load_matrix_csv(path) -> Array:
    """Load a dense matrix from CSV: comma-separated, one row per line, no header."""
    return np.loadtxt(path, delimiter=",", ndmin=2, dtype=float)


def make_quadratic(matrix, offset, name: str = "quadratic") -> SmoothProblem:
    """Quadratic f(x) = 0.5 x'Ax - b'x for symmetric PSD A.

    L is the largest eigenvalue, mu the smallest; the minimizer solves
    A x = b.  Raises ValueError for non-symmetric or indefinite A, or when
    b lies outside the column space of A (no minimizer exists).
    """
    A = np.asarray(matrix, dtype=float)
    b = np.asarray(offset, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError("matrix must be square")
    n = A.shape[0]
    if b.shape != (n,):
        raise ValueError("offset length must match matrix size")
    scale = 1.0 + float(np.abs(A).max(initial=0.0))
    if not np.allclose(A, A.T, atol=1e-12 * scale):
        raise ValueError("matrix must be symmetric")
    eigs = np.linalg.eigvalsh(A)
    lam_min, lam_max = float(eigs[0]), float(eigs[-1])
    if lam_min < -1e-10 * max(1.0, lam_max):
        raise ValueError("matrix must be positive semidefinite")
    x_star = np.linalg.lstsq(A, b, rcond=None)[0]
    residual = np.linalg.norm(A @ x_star - b)
    if residual > 1e-8 * (1.0 + np.linalg.norm(b)):
        raise ValueError("offset is not in the column space of the matrix; "
                         "the quadratic has no minimizer")

    def value(x: Array) -> float:
        return float(0.5 * x @ (A @ x) - b @ x)

    def gradient(x: Array) -> Array:
        return A @ x - b

    prob = SmoothProblem(
        dimension=n, value=value, gradient=gradient,
        L_known=lam_max, mu_known=max(lam_min, 0.0), name=name,
    )
    return prob.with_minimizer(x_star)


def make_log_sum_exp(rows, shifts, temperature: float,
                     name: str = "log_sum_exp") -> SmoothProblem:
    """Smoothed max f(x) = t * log sum_i exp((a_i'x + b_i) / t).

    The smoothness constant is bounded by sigma_max(A)^2 / t.  No minimizer
    is recorded at construction; it may not exist (e.g. a single affine row
    is unbounded below).  Use ``with_minimizer`` when one is known.
    """
    A = np.asarray(rows, dtype=float)
    if A.ndim == 1:
        A = A.reshape(1, -1)
    if A.size == 0:
        raise ValueError("rows must be nonempty")
    if temperature <= 0:
        raise ValueError("temperature must be positive")
    b = np.asarray(shifts, dtype=float)
    if b.shape != (A.shape[0],):
        raise ValueError("shifts length must match the number of rows")
    t = float(temperature)
    sigma_max = float(np.linalg.norm(A, 2))

    def value(x: Array) -> float:
        return t * float(logsumexp((A @ x + b) / t))

    def gradient(x: Array) -> Array:
        return A.T @ softmax((A @ x + b) / t)

    return SmoothProblem(
        dimension=A.shape[1], value=value, gradient=gradient,
        L_known=sigma_max ** 2 / t, mu_known=0.0, name=name,
    )


def make_symmetric_log_sum_exp(rows, temperature: float,
                               name: str = "log_sum_exp_sym") -> SmoothProblem:
    """Log-sum-exp over the rows and their negations, zero shifts.

    By symmetry the origin is a minimizer, so the problem ships with an
    exact x_star and f_star = t*log(2n).
    """
    A = np.asarray(rows, dtype=float)
    if A.ndim == 1:
        A = A.reshape(1, -1)
    full = np.vstack([A, -A])
    prob = make_log_sum_exp(full, np.zeros(full.shape[0]), temperature, name=name)
    f_star = temperature * float(np.log(full.shape[0]))
    return prob.with_minimizer(np.zeros(prob.dimension), f_star)


def make_logistic(features, labels, ridge: float,
                  name: str = "logistic") -> SmoothProblem:
    """Ridge-regularized logistic loss over +/-1 labels.

    f(x) = sum_i log(1 + exp(-y_i a_i'x)) + (ridge/2)||x||^2 with
    L = sigma_max(A)^2/4 + ridge and mu = ridge.  When ridge > 0, the
    minimizer is computed once by a high-accuracy reference solve with the
    adaptive solver itself and frozen into the problem.
    """
    A = np.asarray(features, dtype=float)
    if A.ndim == 1:
        A = A.reshape(1, -1)
    y = np.asarray(labels, dtype=float)
    if y.shape != (A.shape[0],):
        raise ValueError("labels length must match the number of feature rows")
    if not np.all(np.isin(y, (-1.0, 1.0))):
        raise ValueError("labels must be +1 or -1")
    if ridge < 0:
        raise ValueError("ridge must be nonnegative")
    ridge = float(ridge)
    sigma_max = float(np.linalg.norm(A, 2))

    def value(x: Array) -> float:
        margins = y * (A @ x)
        return float(np.sum(np.logaddexp(0.0, -margins))) + 0.5 * ridge * float(x @ x)

    def gradient(x: Array) -> Array:
        margins = y * (A @ x)
        return -(A.T @ (y * expit(-margins))) + ridge * x

    prob = SmoothProblem(
        dimension=A.shape[1], value=value, gradient=gradient,
        L_known=0.25 * sigma_max ** 2 + ridge, mu_known=ridge, name=name,
    )
    if ridge > 0:
        x_star = _reference_minimizer(prob)
        prob = prob.with_minimizer(x_star, reference=True)
    return prob


def _reference_minimizer(problem: SmoothProblem) -> Array:
    """Solve to gradient norm <= 1e-12 with the library's own solver."""
    from .schedule import get_profile
    from .solver import StopCriteria, run_adaagm

    params = get_profile("sc-2")
    stop = StopCriteria(max_iters=200_000, grad_tol=1e-12)
    trace = run_adaagm(problem, params, stop, np.zeros(problem.dimension),
                       store_iterates=True)
    return trace.xs[-1]


def check_grad_fd(problem: SmoothProblem, point, step: float) -> float:
    """Max per-coordinate error of the gradient vs. central finite differences.

    The error in coordinate i is |g_i - fd_i| / max(1, |g_i|); the caller
    thresholds the returned maximum.
    """
    if step <= 0:
        raise ValueError("step must be positive")
    x = np.asarray(point, dtype=float)
    g = np.asarray(problem.gradient(x), dtype=float)
    worst = 0.0
    for i in range(x.size):
        e = np.zeros_like(x)
        e[i] = step
        fd = (problem.value(x + e) - problem.value(x - e)) / (2.0 * step)
        err = abs(g[i] - fd) / max(1.0, abs(g[i]))
        worst = max(worst, err)
    return worst

"""Solver loops: the adaptive accelerated method and two fixed-step baselines.

All runs produce a :class:`Trace` of per-iteration records.  The energy
column of a record at index k is computed from the iterates available at
the end of iteration k (it needs x_{k+1} and y_{k+1}), so it lags the other
columns by one step; the final record carries no energy.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .problems import SmoothProblem
from .schedule import (
    AlgoParams,
    ScheduleState,
    advance_step,
    default_params,
    floor_q,
    init_schedule,
    local_smoothness,
    next_t,
    validate_params,
)

Array = np.ndarray


class DivergenceError(RuntimeError):
    """A non-finite value or gradient appeared at iteration ``k``."""

    def __init__(self, k: int):
        super().__init__(f"non-finite value or gradient at iteration {k}")
        self.k = k


@dataclass
class StopCriteria:
    """Stopping rule: iteration budget plus optional tolerances.

    ``grad_tol=None`` resolves to the scale-free default
    1e-10*(1 + ||grad(x0)||).  Zero tolerances never fire, leaving the
    budget as the only criterion.
    """

    max_iters: int = 100_000
    grad_tol: Optional[float] = None
    gap_tol: Optional[float] = None


@dataclass
class TraceRecord:
    """One logged iteration."""

    k: int
    gap: Optional[float]
    grad_norm: float
    s: Optional[float]
    t: Optional[float]
    L_est: Optional[float]
    energy: Optional[float] = None


@dataclass
class Trace:
    """A solver run: per-iteration records plus the start point.

    ``xs``/``ys`` hold iterate snapshots when the run was asked to store
    them, aligned with ``records``.
    """

    records: list[TraceRecord]
    x0: Array
    algorithm: str
    xs: Optional[list[Array]] = None
    ys: Optional[list[Array]] = None

    def __len__(self) -> int:
        return len(self.records)


def _check_finite(f: float, g: Array, k: int) -> None:
    if not np.isfinite(f) or not np.all(np.isfinite(g)):
        raise DivergenceError(k)


def _resolved_grad_tol(stop: StopCriteria, g0: Array) -> float:
    if stop.grad_tol is not None:
        return stop.grad_tol
    return 1e-10 * (1.0 + float(np.linalg.norm(g0)))


def _probe_s0(problem: SmoothProblem, x0: Array, g0: Array, f0: float,
              params: AlgoParams) -> float:
    """Initial step from a unit-scaled trial step when L is unknown.

    The probe's local estimate never exceeds the true L, so q divided by it
    is at least q/L.
    """
    q = floor_q(params)
    g_norm = float(np.linalg.norm(g0))
    if g_norm == 0.0:
        return 1.0
    eps = 1e-4 * (1.0 + float(np.linalg.norm(x0)))
    x1 = x0 - eps * g0 / g_norm
    f1 = float(problem.value(x1))
    g1 = np.asarray(problem.gradient(x1), dtype=float)
    _check_finite(f1, g1, 0)
    L_hat = local_smoothness(g1, g0, f1, f0, x1, x0)
    if L_hat <= 0.0:
        return 1.0
    return q / L_hat


def run_adaagm(problem: SmoothProblem, params: Optional[AlgoParams] = None,
               stop: Optional[StopCriteria] = None, x0=None, *,
               force_constant_step: bool = False,
               store_iterates: bool = False, thin: int = 1) -> Trace:
    """Run the adaptive accelerated method from x0 = y0.

    ``force_constant_step`` freezes s at s0 and skips parameter validation;
    with gamma=1, m=1, t0=1 this makes the loop coincide with the classical
    momentum baseline, which the tests exploit as a cross-check.
    """
    if x0 is None:
        x0 = np.zeros(problem.dimension)
    x0 = np.asarray(x0, dtype=float)
    if params is None:
        params = default_params(problem)
    if not force_constant_step:
        report = validate_params(params, L_known=problem.L_known)
        if not report.valid:
            raise ValueError("invalid parameters: " + "; ".join(report.failures))
    stop = stop or StopCriteria()
    thin = max(1, int(thin))

    x = x0.copy()
    y = x0.copy()
    f_x = float(problem.value(x))
    g_x = np.asarray(problem.gradient(x), dtype=float)
    _check_finite(f_x, g_x, 0)
    grad_tol = _resolved_grad_tol(stop, g_x)

    s0 = params.s0
    if s0 is None:
        if force_constant_step:
            raise ValueError("a constant-step run needs an explicit s0")
        if problem.L_known is not None and problem.L_known > 0:
            s0 = floor_q(params) / problem.L_known
        else:
            s0 = _probe_s0(problem, x0, g_x, f_x, params)
    sched = init_schedule(params, s0)

    has_gap = problem.f_star is not None
    has_energy = has_gap and problem.x_star is not None
    # import here: diagnostics depends on this module's types only at runtime
    from .diagnostics import EnergyInputs, energy as energy_fn

    records: list[TraceRecord] = []
    xs: Optional[list[Array]] = [] if store_iterates else None
    ys: Optional[list[Array]] = [] if store_iterates else None
    clamp_base = problem.L_known
    L_seen = 0.0
    L_curr = 0.0
    k = 0
    while True:
        grad_norm = float(np.linalg.norm(g_x))
        gap = f_x - problem.f_star if has_gap else None
        stopping = (
            k >= stop.max_iters
            or (grad_tol > 0.0 and grad_norm <= grad_tol)
            or (stop.gap_tol is not None and stop.gap_tol > 0.0
                and has_gap and gap <= stop.gap_tol)
        )
        rec = None
        if k % thin == 0 or stopping:
            rec = TraceRecord(k=k, gap=gap, grad_norm=grad_norm,
                              s=sched.s_curr, t=sched.t_curr, L_est=L_curr)
            records.append(rec)
            if store_iterates:
                xs.append(x.copy())
                ys.append(y.copy())
        if stopping:
            break

        y_next = x - sched.s_curr * g_x
        momentum = (sched.t_curr - 1.0) / sched.t_next
        correction = (params.gamma - 1.0) * sched.t_curr / sched.t_next
        x_next = y_next + momentum * (y_next - y) + correction * (y_next - x)
        f_next = float(problem.value(x_next))
        g_next = np.asarray(problem.gradient(x_next), dtype=float)
        _check_finite(f_next, g_next, k + 1)

        L_new = local_smoothness(g_next, g_x, f_next, f_x, x_next, x,
                                 clamp=clamp_base,
                                 underflow_fallback=(L_seen or None))
        L_seen = max(L_seen, L_new)

        if rec is not None and has_energy:
            rec.energy = energy_fn(EnergyInputs(
                x_next=x_next, y_next=y_next, x=x, y=y,
                grad_x=g_x, f_x=f_x, t=sched.t_curr, t_next=sched.t_next,
                s=sched.s_curr, x_star=problem.x_star, f_star=problem.f_star,
                params=params,
            ))

        if force_constant_step:
            sched = ScheduleState(
                t_curr=sched.t_next, t_next=next_t(sched.t_next, params.m),
                s_curr=s0, L_next=0.0,
            )
        else:
            sched = advance_step(replace(sched, L_next=L_new), params)

        x, y, f_x, g_x, L_curr = x_next, y_next, f_next, g_next, L_new
        k += 1

    return Trace(records=records, x0=x0, algorithm="adaagm", xs=xs, ys=ys)


def _run_fixed(problem: SmoothProblem, step: float, stop: StopCriteria, x0,
               algorithm: str, store_iterates: bool, thin: int) -> Trace:
    x0 = np.asarray(x0, dtype=float)
    thin = max(1, int(thin))
    x = x0.copy()
    y = x0.copy()
    g = np.asarray(problem.gradient(x), dtype=float)
    f = float(problem.value(x))
    _check_finite(f, g, 0)
    grad_tol = _resolved_grad_tol(stop, g)
    has_gap = problem.f_star is not None

    theta_curr = 1.0
    theta_next = next_t(1.0, 1.0)

    records: list[TraceRecord] = []
    xs: Optional[list[Array]] = [] if store_iterates else None
    ys: Optional[list[Array]] = [] if store_iterates else None
    k = 0
    while True:
        grad_norm = float(np.linalg.norm(g))
        gap = f - problem.f_star if has_gap else None
        stopping = (
            k >= stop.max_iters
            or (grad_tol > 0.0 and grad_norm <= grad_tol)
            or (stop.gap_tol is not None and stop.gap_tol > 0.0
                and has_gap and gap <= stop.gap_tol)
        )
        if k % thin == 0 or stopping:
            t_col = theta_curr if algorithm == "nesterov" else None
            records.append(TraceRecord(k=k, gap=gap, grad_norm=grad_norm,
                                       s=step, t=t_col, L_est=None))
            if store_iterates:
                xs.append(x.copy())
                ys.append(y.copy())
        if stopping:
            break

        if algorithm == "gd":
            x = x - step * g
        else:
            y_next = x - step * g
            x = y_next + (theta_curr - 1.0) / theta_next * (y_next - y)
            y = y_next
            theta_curr = theta_next
            theta_next = next_t(theta_curr, 1.0)
        f = float(problem.value(x))
        g = np.asarray(problem.gradient(x), dtype=float)
        _check_finite(f, g, k + 1)
        k += 1

    return Trace(records=records, x0=x0, algorithm=algorithm, xs=xs, ys=ys)


def run_gd(problem: SmoothProblem, step: float,
           stop: Optional[StopCriteria] = None, x0=None, *,
           store_iterates: bool = False, thin: int = 1) -> Trace:
    """Fixed-step gradient descent baseline."""
    if step <= 0:
        raise ValueError("step must be positive")
    if problem.L_known is not None and problem.L_known > 0 and step >= 2.0 / problem.L_known:
        warnings.warn(f"step {step:.6g} >= 2/L = {2.0 / problem.L_known:.6g}; "
                      "gradient descent may diverge", stacklevel=2)
    if x0 is None:
        x0 = np.zeros(problem.dimension)
    return _run_fixed(problem, step, stop or StopCriteria(), x0, "gd",
                      store_iterates, thin)


def run_nesterov(problem: SmoothProblem, step: float,
                 stop: Optional[StopCriteria] = None, x0=None, *,
                 store_iterates: bool = False, thin: int = 1) -> Trace:
    """Classical momentum baseline with the theta recursion from theta_0 = 1."""
    if step <= 0:
        raise ValueError("step must be positive")
    if problem.L_known is not None and problem.L_known > 0 and step > 1.0 / problem.L_known:
        warnings.warn(f"step {step:.6g} > 1/L = {1.0 / problem.L_known:.6g}; "
                      "the accelerated rate is not guaranteed", stacklevel=2)
    if x0 is None:
        x0 = np.zeros(problem.dimension)
    return _run_fixed(problem, step, stop or StopCriteria(), x0, "nesterov",
                      store_iterates, thin)


# --- CSV serialization -------------------------------------------------------

_CSV_HEADER = "k,gap,grad_norm,s,t,L_est,energy"


def _fmt(v: Optional[float]) -> str:
    return "" if v is None else format(float(v), ".17g")


def write_trace_csv(trace: Trace, path) -> None:
    """Write a trace as CSV with 17-significant-digit floats.

    The start point rides along in a comment line so that certificates can
    be re-checked from the file alone.
    """
    lines = [
        f"# algorithm = {trace.algorithm}",
        "# x0 = " + " ".join(format(v, ".17g") for v in trace.x0),
        "# note: energy[k] uses the step-(k+1) iterates and lags the other columns by one row",
        _CSV_HEADER,
    ]
    for r in trace.records:
        lines.append(",".join([
            str(r.k), _fmt(r.gap), _fmt(r.grad_norm), _fmt(r.s),
            _fmt(r.t), _fmt(r.L_est), _fmt(r.energy),
        ]))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def read_trace_csv(path) -> Trace:
    """Read a trace written by :func:`write_trace_csv`."""
    algorithm = "unknown"
    x0: Optional[Array] = None
    records: list[TraceRecord] = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                body = line.lstrip("# ").strip()
                if body.startswith("algorithm ="):
                    algorithm = body.split("=", 1)[1].strip()
                elif body.startswith("x0 ="):
                    x0 = np.array([float(v) for v in body.split("=", 1)[1].split()])
                continue
            if line == _CSV_HEADER:
                continue
            parts = line.split(",")
            if len(parts) != 7:
                raise ValueError(f"malformed trace row: {line!r}")
            vals = [None if p == "" else float(p) for p in parts[1:]]
            records.append(TraceRecord(k=int(parts[0]), gap=vals[0],
                                       grad_norm=vals[1], s=vals[2],
                                       t=vals[3], L_est=vals[4], energy=vals[5]))
    if x0 is None:
        raise ValueError(f"trace file {path} is missing the x0 comment line")
    return Trace(records=records, x0=x0, algorithm=algorithm)

"""Adaptive embedded Runge-Kutta time integration (Dormand-Prince 5(4)).

The propagating solution is 5th order with an embedded 4th-order error
estimate; the pair is FSAL, so an accepted step costs six right-hand-side
evaluations. Error control is the standard elementwise weighting

    scale_i = abs_tol + rel_tol * max(|y_i|, |y_new_i|),
    err     = sqrt(mean((e_i / scale_i)^2)),   accept iff err <= 1,

with the power-law step update dt *= clip(0.9 * err^(-1/5), 0.2, 5.0).
Requested snapshot times are landed on exactly by truncating the step, so
reported states carry no interpolation error. A non-finite error estimate
(NaN tendencies from a failing right-hand side) is treated as a rejection at
the maximum shrink factor; if dt falls below 1e-14 the integration aborts
with the last healthy state attached, which is the expected outcome for
shear-unstable runs rather than a crash.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import StepUnderflowError, ValidationError

__all__ = ["StepController", "StepStats", "IntegrationResult", "integrate"]

# Dormand-Prince 5(4) tableau
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    np.array([]),
    np.array([1 / 5]),
    np.array([3 / 40, 9 / 40]),
    np.array([44 / 45, -56 / 15, 32 / 9]),
    np.array([19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729]),
    np.array([9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656]),
    np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84]),
]
_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
# b5 - b4: local error estimator weights
_E = np.array([71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40])

DT_FLOOR = 1e-14


@dataclass
class StepStats:
    accepted: int = 0
    rejected: int = 0
    rhs_evals: int = 0


@dataclass
class StepController:
    """Tolerances and step-size policy; also accumulates run statistics."""

    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    safety: float = 0.9
    min_factor: float = 0.2
    max_factor: float = 5.0
    dt: float | None = None            # None -> automatic initial step
    dt_floor: float = DT_FLOOR
    stats: StepStats = field(default_factory=StepStats)

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise ValidationError("rel_tol/abs_tol", "tolerances must be positive")


@dataclass
class IntegrationResult:
    t: float
    y: np.ndarray
    stats: StepStats
    status: str            # completed | cancelled


def _initial_step(rhs_fn, t0, y0, f0, t_span, rel_tol, abs_tol):
    """Hairer-style automatic first step, with a safe fallback when the
    initial tendency vanishes (e.g. a rest state)."""
    span = t_span[1] - t_span[0]
    scale = abs_tol + rel_tol * np.abs(y0)
    d0 = np.sqrt(np.mean((y0 / scale) ** 2))
    d1 = np.sqrt(np.mean((f0 / scale) ** 2))
    if d0 < 1e-5 or d1 < 1e-5:
        h0 = 1e-6 * span if d1 == 0.0 else 0.01 * (d0 / d1)
    else:
        h0 = 0.01 * d0 / d1
    h0 = min(h0, span)
    y1 = y0 + h0 * f0
    f1 = rhs_fn(t0 + h0, y1)
    d2 = np.sqrt(np.mean(((f1 - f0) / scale) ** 2)) / h0
    if max(d1, d2) <= 1e-15:
        h1 = max(1e-6 * span, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** 0.2
    return min(100 * h0, h1, span)


def integrate(rhs_fn, t_span, y0, controller=None, snapshot_times=(), on_step=None, on_snapshot=None):
    """March y' = rhs_fn(t, y) over t_span = (t0, t1).

    on_step(t, y, stats) runs after every accepted step; returning False
    cancels the integration. on_snapshot(t, y) runs whenever an accepted
    step lands on one of snapshot_times (which it does exactly). Raises
    StepUnderflowError on blow-up.
    """
    controller = controller or StepController()
    t0, t1 = float(t_span[0]), float(t_span[1])
    if not np.isfinite([t0, t1]).all() or t1 <= t0:
        raise ValidationError("t_span", f"need finite t1 > t0, got {t_span}")
    stats = controller.stats
    y = np.array(y0, dtype=float)
    t = t0
    targets = sorted({float(s) for s in snapshot_times if t0 < s <= t1})

    f = rhs_fn(t, y)
    stats.rhs_evals += 1
    if controller.dt is not None:
        dt = float(controller.dt)
    else:
        dt = _initial_step(rhs_fn, t0, y, f, (t0, t1), controller.rel_tol, controller.abs_tol)
        stats.rhs_evals += 1
    if not np.isfinite(dt) or dt <= 0.0:
        # a right-hand side that fails already at t0 still gets a few
        # shrinking attempts before the underflow error fires
        dt = 1e-6 * (t1 - t0)
    dt = max(dt, controller.dt_floor)

    k = np.empty((7, y.size))
    while t < t1:
        if dt < controller.dt_floor:
            raise StepUnderflowError(t, y, stats, dt)
        # truncate to land exactly on the next requested time
        boundary = targets[0] if targets else t1
        dt_step = min(dt, t1 - t)
        truncated = False
        if t + dt_step >= boundary - 1e-12 * max(1.0, abs(boundary)):
            dt_step = boundary - t
            truncated = True

        k[0] = f
        for i in range(1, 7):
            yi = y + dt_step * (_A[i] @ k[:i])
            k[i] = rhs_fn(t + _C[i] * dt_step, yi)
        stats.rhs_evals += 6
        y_new = y + dt_step * (_B5 @ k)
        err_vec = dt_step * (_E @ k)
        scale = controller.abs_tol + controller.rel_tol * np.maximum(np.abs(y), np.abs(y_new))
        with np.errstate(invalid="ignore", over="ignore"):
            err = float(np.sqrt(np.mean((err_vec / scale) ** 2)))

        if not np.isfinite(err):
            stats.rejected += 1
            dt = dt_step * controller.min_factor
            continue
        if err <= 1.0:
            t_new = boundary if dt_step == boundary - t else t + dt_step
            t, y = float(t_new), y_new
            # FSAL: last stage is the first stage of the next step (copied;
            # a later rejected attempt would otherwise overwrite it in place)
            f = k[6].copy()
            stats.accepted += 1
            if targets and t == targets[0]:
                targets.pop(0)
                if on_snapshot is not None:
                    on_snapshot(t, y)
            if on_step is not None:
                keep_going = on_step(t, y, stats)
                if keep_going is not None and not keep_going:
                    return IntegrationResult(t=t, y=y, stats=stats, status="cancelled")
            factor = controller.max_factor if err == 0.0 else min(
                controller.max_factor, max(controller.min_factor, controller.safety * err**-0.2)
            )
            # a step truncated to land on an output time must not throttle
            # the natural step size
            dt = max(dt, dt_step * factor) if truncated else dt_step * factor
        else:
            stats.rejected += 1
            dt = dt_step * min(1.0, max(controller.min_factor, controller.safety * err**-0.2))

    return IntegrationResult(t=t, y=y, stats=stats, status="completed")

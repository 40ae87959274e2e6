"""Linear Kelvin-Helmholtz analysis around constant-shear states.

Linearizing either the two-layer Euler equations or a multiplier model about
a flat interface with constant shear yields a 2x2 system

    d/dt zeta + c(D) dx zeta + b(D) dx v = 0
    d/dt v    + a(D) dx zeta + c(D) dx v = 0

whose plane-wave frequencies are omega = k (c +- sqrt(a b)). Since b > 0, a
mode is neutrally stable exactly when a(k) > 0; the growth rate of an
unstable mode is |k| sqrt(-a b).

``euler_coeffs`` gives the exact-dispersion coefficients (tanh kernels,
evaluated through tanh(x)/x so every k -> 0 limit is removable), and
``model_coeffs`` the multiplier-model counterparts. The shear is specified
as vbar = u2 - gamma*u1 for the Euler system and as the flux wbar for the
models; the two are linked by wbar = vbar / (gamma + delta).
"""

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .multipliers import MultiplierSpec, eval_multiplier

__all__ = [
    "euler_coeffs",
    "model_coeffs",
    "threshold_curve",
    "euler_threshold_curve",
    "growth_rate",
    "growth_rates",
    "StabilityCurve",
    "threshold_table",
]


def _tanhc(x):
    """tanh(x)/x with the removable limit 1 at x = 0; series below 1e-4."""
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    small = np.abs(x) < 1e-4
    xs = x[small]
    out[small] = 1.0 - xs**2 / 3.0 + 2.0 * xs**4 / 15.0
    xb = x[~small]
    out[~small] = np.tanh(xb) / xb
    return out


def euler_coeffs(k, params, vbar):
    """Exact-dispersion shear coefficients (a, b, c) at wavenumber k.

    Written with t_i = tanh(s_i)/s_i, s_1 = sqrt(mu)|k|, s_2 = sqrt(mu)|k|/delta,
    which removes every 0/0: at k = 0 they reduce to b = 1/(gamma+delta) and
    c = (delta^2-gamma)/(gamma+delta)^2 * eps*vbar.
    """
    g, d, eps, mu, inv_bond = params.gamma, params.delta, params.epsilon, params.mu, params.inv_bond
    k = np.abs(np.asarray(k, dtype=float))
    t1 = _tanhc(np.sqrt(mu) * k)
    t2 = _tanhc(np.sqrt(mu) * k / d)
    den = t1 + g * t2 / d
    b = (t1 * t2 / d) / den
    c = (d * t1 - g * t2 / d) / den * eps * vbar / (g + d)
    a = (g + d) * (1.0 + inv_bond * k**2) - g * (d + 1.0) ** 2 / (d + g) ** 2 * (eps * vbar) ** 2 / den
    return a, b, c


def model_coeffs(k, params, spec, wbar):
    """Multiplier-model shear coefficients (a, b, c) at wavenumber k."""
    g, d, eps, mu, inv_bond = params.gamma, params.delta, params.epsilon, params.mu, params.inv_bond
    k = np.abs(np.asarray(k, dtype=float))
    f1sq = eval_multiplier(spec, 1, k, mu) ** 2
    f2sq = eval_multiplier(spec, 2, k, mu) ** 2
    den = 1.0 + mu * (f2sq + g * d * f1sq) * k**2 / (3.0 * d * (g + d))
    b = 1.0 / ((g + d) * den)
    c = eps * wbar * ((d**2 - g) / (g + d) + mu * (f2sq - g * f1sq) * k**2 / (3.0 * (g + d))) / den
    a = (
        (g + d) * (1.0 + inv_bond * k**2)
        - (eps * wbar) ** 2
        * g * (d + 1.0) ** 2 / (d * (g + d))
        * (d**2 + mu * k**2 * f2sq / 3.0) * (1.0 + mu * k**2 * f1sq / 3.0) / den
    )
    return a, b, c


@dataclass
class StabilityCurve:
    """Sampled instability threshold: for each wavenumber, the value of
    eps^2 * wbar^2 above which that mode grows. NaN marks modes that are
    stable for every shear."""

    k: np.ndarray
    threshold: np.ndarray
    model: str


def threshold_curve(k_grid, params, spec):
    """Solve a(k) = 0 for eps^2*wbar^2 (a is affine in it):
    threshold = (gamma+delta)(1 + k^2/Bo) / Gamma(k)."""
    k = np.asarray(k_grid, dtype=float)
    if np.any(k <= 0):
        raise ValidationError("k_grid", "wavenumbers must be positive")
    g, d, mu, inv_bond = params.gamma, params.delta, params.mu, params.inv_bond
    f1sq = eval_multiplier(spec, 1, k, mu) ** 2
    f2sq = eval_multiplier(spec, 2, k, mu) ** 2
    den = 1.0 + mu * (f2sq + g * d * f1sq) * k**2 / (3.0 * d * (g + d))
    gamma_k = g * (d + 1.0) ** 2 / (d * (g + d)) * (
        (d**2 + mu * k**2 * f2sq / 3.0) * (1.0 + mu * k**2 * f1sq / 3.0) / den
    )
    stable_always = gamma_k <= 0.0
    with np.errstate(divide="ignore", invalid="ignore"):
        thr = (g + d) * (1.0 + inv_bond * k**2) / gamma_k
    thr = np.where(stable_always, np.nan, thr)
    return StabilityCurve(k=k, threshold=thr, model=spec.label)


def euler_threshold_curve(k_grid, params):
    """Full-dispersion counterpart of :func:`threshold_curve`."""
    k = np.asarray(k_grid, dtype=float)
    if np.any(k <= 0):
        raise ValidationError("k_grid", "wavenumbers must be positive")
    g, d, mu, inv_bond = params.gamma, params.delta, params.mu, params.inv_bond
    t1 = _tanhc(np.sqrt(mu) * k)
    t2 = _tanhc(np.sqrt(mu) * k / d)
    gamma_k = g * (d + 1.0) ** 2 / (t1 + g * t2 / d)
    stable_always = gamma_k <= 0.0
    with np.errstate(divide="ignore", invalid="ignore"):
        thr = (g + d) * (1.0 + inv_bond * k**2) / gamma_k
    thr = np.where(stable_always, np.nan, thr)
    return StabilityCurve(k=k, threshold=thr, model="euler")


def growth_rate(k, params, spec, wbar):
    """Temporal growth rate of mode k: max Im omega over the eigenvalues of
    the 2x2 symbol matrix k*[[c, b], [a, c]]; zero for stable modes.

    The eigenvalue route (rather than the closed-form shortcut) keeps custom
    multipliers with exotic symbols on the same code path.
    """
    a, b, c = model_coeffs(float(k), params, spec, wbar)
    matrix = float(k) * np.array([[c, b], [a, c]], dtype=complex)
    omegas = np.linalg.eigvals(matrix)
    return max(0.0, float(np.max(omegas.imag)))


def growth_rates(k_grid, params, spec, wbar):
    return np.array([growth_rate(k, params, spec, wbar) for k in np.asarray(k_grid, dtype=float)])


def threshold_table(k_grid, params, theta1=None, theta2=None):
    """Columns for the threshold-curve CSV: the three built-in families plus
    the exact-dispersion reference, on a shared k grid."""
    d = params.delta
    if theta1 is None:
        theta1 = 1.0 / 15.0
    if theta2 is None:
        theta2 = 1.0 / (15.0 * d**2)
    specs = {
        "threshold_original": MultiplierSpec.identity(),
        "threshold_regularized": MultiplierSpec.regularized(theta1, theta2),
        "threshold_improved": MultiplierSpec.improved(d),
    }
    columns = {"k": np.asarray(k_grid, dtype=float)}
    for name, spec in specs.items():
        columns[name] = threshold_curve(k_grid, params, spec).threshold
    columns["threshold_euler"] = euler_threshold_curve(k_grid, params).threshold
    return columns

"""Conserved and monitored quantities along a trajectory.

Exactly conserved by the flow (and tracked as numerical-drift indicators):
excess mass Z, the velocity mass V, the horizontal impulse I, and the total
energy H. The horizontal momentum M is generally *not* conserved under a
rigid lid and is reported without any conservation claim; the centroid
quantity C is conserved only in the one-layer limit gamma = 0. The
hyperbolicity margin and the high-band spectral amplitude flag incipient
shear instability.
"""

from dataclasses import dataclass

import numpy as np

from .operators import apply_mass_operator, capillary_density, layer_depths
from .spectral import inner, mode_amplitudes

__all__ = [
    "DiagnosticsRow",
    "mass",
    "velocity_mass",
    "impulse",
    "energy",
    "momentum",
    "centroid",
    "band_max",
    "hyperbolicity_margin",
    "compute_row",
]


@dataclass
class DiagnosticsRow:
    t: float
    Z: float
    V: float
    I: float
    H: float
    M: float
    C: float
    hyp_margin: float
    high_band: float

    HEADER = "t,Z,V,I,H,M,C,hyp_margin,high_band"

    def as_csv(self):
        vals = (self.t, self.Z, self.V, self.I, self.H, self.M, self.C, self.hyp_margin, self.high_band)
        return ",".join(f"{v:.17g}" for v in vals)


def mass(grid, zeta):
    """Z = integral of zeta."""
    return grid.dx * float(np.sum(zeta))


def velocity_mass(ctx, zeta, w):
    """V = integral of A[eps*zeta] w, i.e. of the momentum density v."""
    return ctx.grid.dx * float(np.sum(apply_mass_operator(ctx, zeta, w)))


def impulse(grid, zeta, v):
    """I = integral of zeta * v."""
    return inner(grid, zeta, v)


def energy(ctx, zeta, w):
    """Total energy
    integral[ (gamma+delta) zeta^2 + capillary
              + gamma h1 u1^2 + h2 u2^2
              + (mu gamma/3) h1 (h1 dx F1 u1)^2 + (mu/3) h2 (h2 dx F2 u2)^2 ].

    Identically zero at rest, so drift needs no reference subtraction.
    """
    p = ctx.params
    grid = ctx.grid
    h1, h2 = layer_depths(p, zeta)
    u1, u2 = -w / h1, w / h2
    density = (p.gamma + p.delta) * zeta**2 + capillary_density(grid, zeta, p)
    density += p.gamma * h1 * u1**2 + h2 * u2**2
    if p.mu > 0.0:
        s1 = np.fft.irfft(ctx.deriv * ctx.f1 * np.fft.rfft(u1), grid.n)
        s2 = np.fft.irfft(ctx.deriv * ctx.f2 * np.fft.rfft(u2), grid.n)
        density += p.mu * (p.gamma / 3.0) * h1 * (h1 * s1) ** 2
        density += (p.mu / 3.0) * h2 * (h2 * s2) ** 2
    return grid.dx * float(np.sum(density))


def momentum(grid, params, w):
    """M = integral of gamma h1 u1 + h2 u2 = (1 - gamma) * integral of w.
    Monitored only; the rigid lid breaks its conservation."""
    return (1.0 - params.gamma) * grid.dx * float(np.sum(w))


def centroid(grid, zeta, w, t):
    """C = integral of (zeta * x - t * w); a conservation check only for
    gamma = 0."""
    return grid.dx * float(np.sum(zeta * grid.x - t * w))


def band_max(grid, zeta, k_band=None):
    """max |zeta_hat(k)| over |k| >= k_band (default: half-Nyquist), with the
    single-mode normalization |zeta_hat| = amplitude/2."""
    if k_band is None:
        k_band = 0.5 * grid.nyquist
    amps = mode_amplitudes(grid, zeta)
    tail = amps[grid.k >= k_band]
    return float(tail.max()) if tail.size else 0.0


def hyperbolicity_margin(params, zeta, w):
    """min over x of (gamma+delta) - eps^2 (h2^-3 + gamma h1^-3) w^2; a
    nonpositive value flags departure from the hyperbolic domain."""
    h1, h2 = layer_depths(params, zeta)
    p = params
    return float(np.min((p.gamma + p.delta) - p.epsilon**2 * (h2**-3 + p.gamma * h1**-3) * w**2))


def compute_row(ctx, t, zeta, v, w, k_band=None):
    """One diagnostics record from a state snapshot (w already recovered)."""
    grid = ctx.grid
    return DiagnosticsRow(
        t=t,
        Z=mass(grid, zeta),
        V=grid.dx * float(np.sum(v)),
        I=impulse(grid, zeta, v),
        H=energy(ctx, zeta, w),
        M=momentum(grid, ctx.params, w),
        C=centroid(grid, zeta, w, t),
        hyp_margin=hyperbolicity_margin(ctx.params, zeta, w),
        high_band=band_max(grid, zeta, k_band),
    )

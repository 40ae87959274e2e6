"""Nonlocal mass operator, quadratic flux terms, and the two-equation
evolution in Hamiltonian variables (zeta, v).

Layer depths are h1 = 1 - eps*zeta (upper) and h2 = 1/delta + eps*zeta
(lower); the shared flux variable w = -h1*u1 = h2*u2 carries both layer
velocities. The momentum density conjugate to zeta is v = A[eps*zeta] w with
the mass operator

    A[eps*zeta] w = ((h1 + gamma*h2)/(h1*h2)) w
                    - (mu*gamma/3) h1^{-1} dx F1{ h1^3 dx F1{ h1^{-1} w } }
                    - (mu/3)       h2^{-1} dx F2{ h2^3 dx F2{ h2^{-1} w } },

self-adjoint and positive definite for non-cavitating depths. The evolution
reads

    dt zeta = -dx w,
    dt v    = -dx[ (gamma+delta) zeta
                   - (gamma+delta)/Bo * dx( dx zeta / sqrt(1 + mu eps^2 (dx zeta)^2) )
                   + (eps/2) (h1^2 - gamma h2^2)/(h1 h2)^2 * w^2
                   - mu*eps * R[eps*zeta, w] ],

where the bracket is the zeta-gradient of the energy functional and w is
recovered from v at every evaluation by preconditioned conjugate gradients
(Fourier-diagonal flat-interface preconditioner, warm-started through the
workspace). Pointwise products are evaluated in physical space between
spectral derivative/multiplier applications; the optional 2/3-rule dealias
mask is applied to the assembled tendencies when enabled.
"""

import numpy as np

from .errors import CavitationError, ConvergenceError
from .multipliers import eval_multiplier
from .spectral import dealias_mask, ddx, inner

__all__ = [
    "CAVITATION_FLOOR",
    "GNContext",
    "GNWorkspace",
    "q_operator",
    "r_operator",
    "layer_depths",
    "apply_mass_operator",
    "invert_mass_operator",
    "r_flux",
    "surface_tension_term",
    "capillary_gradient",
    "capillary_density",
    "interface_gradient",
    "rhs",
    "w_to_velocities",
    "hamiltonian",
]

# CG positive-definiteness degrades as a depth approaches zero; treat
# anything at or below this as cavitation.
CAVITATION_FLOOR = 1e-6


def layer_depths(params, zeta):
    """(h1, h2) = (1 - eps*zeta, 1/delta + eps*zeta), with cavitation check."""
    h1 = 1.0 - params.epsilon * zeta
    h2 = 1.0 / params.delta + params.epsilon * zeta
    if min(h1.min(), h2.min()) <= CAVITATION_FLOOR:
        raise CavitationError(
            f"layer depth reached {min(h1.min(), h2.min()):.3e} (floor {CAVITATION_FLOOR:g})"
        )
    return h1, h2


class GNContext:
    """Precomputed spectral data for one (grid, params, multiplier) triple.

    Holds the layer symbols on the wavenumber ladder, the derivative symbol
    (Nyquist zeroed), the flat-interface symbol of the mass operator used as
    CG preconditioner, and the solver/dealias settings.
    """

    def __init__(self, grid, params, spec, cg_tol=1e-12, cg_max_iter=200, dealias=False):
        self.grid = grid
        self.params = params
        self.spec = spec
        self.cg_tol = float(cg_tol)
        self.cg_max_iter = int(cg_max_iter)
        self.f1 = eval_multiplier(spec, 1, grid.k, params.mu)
        self.f2 = eval_multiplier(spec, 2, grid.k, params.mu)
        # ik with the Nyquist entry zeroed, matching spectral.ddx
        dk = grid.k.copy()
        dk[-1] = 0.0
        self.deriv = 1j * dk
        g, d, mu = params.gamma, params.delta, params.mu
        # symbol of A at zeta = 0 (uses the same truncated derivative ladder)
        self.flat_symbol = (g + d) + (mu / 3.0) * (self.f2**2 / d + g * self.f1**2) * dk**2
        self.mask = dealias_mask(grid) if dealias else None

    def nonlocal_active(self):
        return self.params.mu > 0.0


def _dxf(grid, u, fsym, deriv):
    """dx F{u} for a precomputed layer symbol."""
    return np.fft.irfft(deriv * fsym * np.fft.rfft(u), grid.n)


def q_operator(grid, h, u, fsym):
    """Layer dispersion operator  -(1/3) h^{-1} dx F{ h^3 dx F{u} }."""
    dk = grid.k.copy()
    dk[-1] = 0.0
    deriv = 1j * dk
    t = _dxf(grid, u, fsym, deriv)
    t = _dxf(grid, h**3 * t, fsym, deriv)
    return -(t / h) / 3.0


def r_operator(grid, h, u, fsym):
    """Quadratic layer term  (1/2)(h dx F{u})^2 + (1/3) h^{-1} u dx F{ h^3 dx F{u} }."""
    dk = grid.k.copy()
    dk[-1] = 0.0
    deriv = 1j * dk
    s = _dxf(grid, u, fsym, deriv)
    t = _dxf(grid, h**3 * s, fsym, deriv)
    return 0.5 * (h * s) ** 2 + (u * t) / (3.0 * h)


def apply_mass_operator(ctx, zeta, w, depths=None):
    """A[eps*zeta] w; ``depths`` may pass precomputed (h1, h2)."""
    h1, h2 = depths if depths is not None else layer_depths(ctx.params, zeta)
    g, mu = ctx.params.gamma, ctx.params.mu
    out = (h1 + g * h2) / (h1 * h2) * w
    if mu > 0.0:
        grid, deriv = ctx.grid, ctx.deriv
        t2 = _dxf(grid, w / h2, ctx.f2, deriv)
        t2 = _dxf(grid, h2**3 * t2, ctx.f2, deriv)
        t1 = _dxf(grid, w / h1, ctx.f1, deriv)
        t1 = _dxf(grid, h1**3 * t1, ctx.f1, deriv)
        out -= (mu / 3.0) * (t2 / h2 + g * t1 / h1)
    return out


def invert_mass_operator(ctx, zeta, v, tol=None, max_iter=None, x0=None, depths=None):
    """Solve A[eps*zeta] w = v for w.

    mu = 0 makes A a pointwise multiplication and the inverse is exact; the
    general case runs conjugate gradients on the self-adjoint positive
    definite operator, preconditioned by the flat-interface symbol and
    warm-started from ``x0`` when given. The relative residual
    ||A w - v|| <= tol ||v|| is guaranteed on return.
    """
    tol = ctx.cg_tol if tol is None else tol
    max_iter = ctx.cg_max_iter if max_iter is None else max_iter
    h1, h2 = depths if depths is not None else layer_depths(ctx.params, zeta)
    if not ctx.nonlocal_active():
        return v * (h1 * h2) / (h1 + ctx.params.gamma * h2)

    grid = ctx.grid
    b_norm = float(np.linalg.norm(v))
    if b_norm == 0.0:
        return np.zeros_like(v)

    def apply_a(u):
        return apply_mass_operator(ctx, zeta, u, depths=(h1, h2))

    def precondition(r):
        return np.fft.irfft(np.fft.rfft(r) / ctx.flat_symbol, grid.n)

    x = np.zeros_like(v) if x0 is None else np.array(x0, dtype=float)
    r = v - apply_a(x) if x0 is not None else v.copy()
    residuals = [float(np.linalg.norm(r))]
    if residuals[-1] <= tol * b_norm:
        return x
    z = precondition(r)
    p = z.copy()
    rz = float(r @ z)
    for _ in range(max_iter):
        ap = apply_a(p)
        alpha = rz / float(p @ ap)
        x += alpha * p
        r -= alpha * ap
        residuals.append(float(np.linalg.norm(r)))
        if residuals[-1] <= tol * b_norm:
            return x
        z = precondition(r)
        rz_next = float(r @ z)
        p = z + (rz_next / rz) * p
        rz = rz_next
    raise ConvergenceError(
        f"mass-operator CG did not reach tol={tol:g} in {max_iter} iterations "
        f"(relative residual {residuals[-1] / b_norm:.3e})",
        residuals,
    )


def r_flux(ctx, h1, h2, w):
    """R[eps*zeta, w] = R_2[h2, w/h2] - gamma * R_1[h1, -w/h1]."""
    grid = ctx.grid
    r2 = r_operator(grid, h2, w / h2, ctx.f2)
    r1 = r_operator(grid, h1, -w / h1, ctx.f1)
    return r2 - ctx.params.gamma * r1


def capillary_gradient(grid, zeta, params):
    """-(gamma+delta)/Bo * dx( dx zeta / sqrt(1 + mu eps^2 (dx zeta)^2) ),
    the surface-tension part of the zeta-gradient."""
    p = params
    if p.inv_bond == 0.0:
        return np.zeros(grid.n)
    s = ddx(grid, zeta)
    slope_sq = p.mu * p.epsilon**2 * s**2
    return -(p.gamma + p.delta) * p.inv_bond * ddx(grid, s / np.sqrt(1.0 + slope_sq))


def surface_tension_term(grid, zeta, params):
    """(gamma+delta)/Bo * dx^2( dx zeta / sqrt(1 + mu eps^2 (dx zeta)^2) ),
    the surface-tension term as it enters dt v."""
    return -ddx(grid, capillary_gradient(grid, zeta, params))


def interface_gradient(ctx, zeta, w, depths=None):
    """The zeta-gradient of the energy functional (the bracket inside dt v)."""
    p = ctx.params
    h1, h2 = depths if depths is not None else layer_depths(p, zeta)
    grad = (p.gamma + p.delta) * zeta + capillary_gradient(ctx.grid, zeta, p)
    grad += 0.5 * p.epsilon * (h1**2 - p.gamma * h2**2) / (h1 * h2) ** 2 * w**2
    if p.mu > 0.0 and p.epsilon > 0.0:
        grad -= p.mu * p.epsilon * r_flux(ctx, h1, h2, w)
    return grad


def rhs(ctx, zeta, v, workspace=None):
    """Tendencies (dt zeta, dt v) at state (zeta, v).

    Recovers w = A^{-1} v first (warm-started through the workspace), then
    assembles the two exact spatial derivatives. Hyperbolicity is not
    checked here; it is a monitored diagnostic.
    """
    depths = layer_depths(ctx.params, zeta)
    x0 = workspace.w_prev if workspace is not None else None
    w = invert_mass_operator(ctx, zeta, v, x0=x0, depths=depths)
    if workspace is not None:
        workspace.w_prev = w
    dzeta = -ddx(ctx.grid, w)
    dv = -ddx(ctx.grid, interface_gradient(ctx, zeta, w, depths=depths))
    if ctx.mask is not None:
        dzeta = np.fft.irfft(ctx.mask * np.fft.rfft(dzeta), ctx.grid.n)
        dv = np.fft.irfft(ctx.mask * np.fft.rfft(dv), ctx.grid.n)
    return dzeta, dv


class GNWorkspace:
    """Per-integration scratch: carries the previous w as CG warm start.
    Not shareable between concurrent integrations."""

    def __init__(self):
        self.w_prev = None


def w_to_velocities(params, zeta, w):
    """Layer-averaged velocities (u1, u2) = (-w/h1, w/h2); their weighted sum
    h1*u1 + h2*u2 vanishes identically under the rigid lid."""
    h1, h2 = layer_depths(params, zeta)
    return -w / h1, w / h2


def capillary_density(grid, zeta, params):
    """Pointwise capillary energy density
    2 (gamma+delta)/Bo * (dx zeta)^2 / (1 + sqrt(1 + mu eps^2 (dx zeta)^2)).

    Algebraically equal to 2(gamma+delta)/(mu eps^2 Bo) (sqrt(1+...) - 1) but
    free of the removable mu*eps^2 -> 0 singularity and of cancellation.
    """
    p = params
    if p.inv_bond == 0.0:
        return np.zeros(grid.n)
    s = ddx(grid, zeta)
    slope_sq = p.mu * p.epsilon**2 * s**2
    return 2.0 * (p.gamma + p.delta) * p.inv_bond * s**2 / (1.0 + np.sqrt(1.0 + slope_sq))


def hamiltonian(ctx, zeta, v, tol=1e-14, max_iter=None, x0=None):
    """The conserved functional H(zeta, v) =
    (1/2) integral[ (gamma+delta) zeta^2 + capillary + w A w ]  with w = A^{-1} v.

    Its gradients are dH/dzeta = interface_gradient and dH/dv = w; the finite
    differences of this function are the oracle for both. Inverted tighter
    than the evolution default so central differences stay clean.
    """
    p = ctx.params
    if max_iter is None:
        max_iter = max(ctx.cg_max_iter, 400)
    w = invert_mass_operator(ctx, zeta, v, tol=tol, max_iter=max_iter, x0=x0)
    quad = inner(ctx.grid, zeta, (p.gamma + p.delta) * zeta)
    cap = inner(ctx.grid, capillary_density(ctx.grid, zeta, p), np.ones(ctx.grid.n))
    return 0.5 * (quad + cap + inner(ctx.grid, w, v))

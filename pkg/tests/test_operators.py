import numpy as np
import pytest

from gnwaves.errors import CavitationError
from gnwaves.multipliers import MultiplierSpec, eval_multiplier
from gnwaves.operators import (
    GNContext,
    GNWorkspace,
    apply_mass_operator,
    hamiltonian,
    interface_gradient,
    invert_mass_operator,
    layer_depths,
    q_operator,
    r_flux,
    r_operator,
    rhs,
    surface_tension_term,
    w_to_velocities,
)
from gnwaves.params import PhysParams
from gnwaves.spectral import Grid, ddx, inner

from conftest import REF_PARAMS, random_smooth_field


def make_ctx(grid, params=REF_PARAMS, spec=None, **kw):
    spec = spec or MultiplierSpec.regularized_for_depth(params.delta)
    return GNContext(grid, params, spec, **kw)


def random_state(ctx, rng, zeta_scale=None):
    """Random smooth (zeta, w) with ||eps*zeta||_inf <= 0.5."""
    max_zeta = 0.5 / max(ctx.params.epsilon, 1e-12) if zeta_scale is None else zeta_scale
    zeta = random_smooth_field(ctx.grid, rng, max_abs=max_zeta)
    w = random_smooth_field(ctx.grid, rng, max_abs=1.0)
    return zeta, w


class TestLayerOperators:
    def test_q_vanishes_on_constants(self, grid):
        fsym = np.exp(-0.2 * grid.k)
        h = 1.0 + 0.2 * np.sin(2 * np.pi * grid.x / grid.length)
        out = q_operator(grid, h, np.full(grid.n, 1.7), fsym)
        assert np.allclose(out, 0.0, atol=1e-14)

    def test_q_constant_depth_identity_symbol(self, grid):
        c = 1.3
        k0 = 4 * np.pi / grid.length
        u = np.sin(k0 * grid.x)
        out = q_operator(grid, np.full(grid.n, c), u, np.ones_like(grid.k))
        assert np.allclose(out, (c**2 * k0**2 / 3.0) * u, rtol=1e-12)

    def test_q_constant_depth_general_symbol(self, grid):
        c = 0.8
        k0 = 6 * np.pi / grid.length
        u = np.sin(k0 * grid.x)
        fsym = 1.0 / (1.0 + 0.05 * grid.k**2)
        fk0 = 1.0 / (1.0 + 0.05 * k0**2)
        out = q_operator(grid, np.full(grid.n, c), u, fsym)
        assert np.allclose(out, (c**2 * k0**2 * fk0**2 / 3.0) * u, rtol=1e-12)

    def test_r_vanishes_on_constants(self, grid):
        fsym = np.exp(-0.2 * grid.k)
        h = 1.0 + 0.2 * np.cos(2 * np.pi * grid.x / grid.length)
        out = r_operator(grid, h, np.full(grid.n, -0.4), fsym)
        assert np.allclose(out, 0.0, atol=1e-14)

    def test_r_constant_depth_identity_symbol(self, grid):
        c = 1.1
        k0 = 4 * np.pi / grid.length
        u = np.sin(k0 * grid.x)
        out = r_operator(grid, np.full(grid.n, c), u, np.ones_like(grid.k))
        expected = (c**2 * k0**2 / 2.0) * np.cos(k0 * grid.x) ** 2 - (c**2 * k0**2 / 3.0) * u**2
        assert np.allclose(out, expected, rtol=0, atol=1e-11)


class TestMassOperator:
    def test_linear_in_w(self, grid):
        ctx = make_ctx(grid)
        assert np.allclose(apply_mass_operator(ctx, np.zeros(grid.n), np.zeros(grid.n)), 0.0)

    def test_flat_interface_symbol(self, grid):
        # at zeta = 0 the operator is diagonal with symbol
        # (gamma+delta) + (mu/3)(F2^2/delta + gamma F1^2) k^2
        p = REF_PARAMS
        for spec in (
            MultiplierSpec.identity(),
            MultiplierSpec.regularized_for_depth(p.delta),
            MultiplierSpec.improved(p.delta),
        ):
            ctx = GNContext(grid, p, spec)
            k0 = 10 * np.pi / grid.length
            w = np.sin(k0 * grid.x)
            f1 = float(eval_multiplier(spec, 1, k0, p.mu))
            f2 = float(eval_multiplier(spec, 2, k0, p.mu))
            symbol = (p.gamma + p.delta) + (p.mu / 3.0) * (f2**2 / p.delta + p.gamma * f1**2) * k0**2
            out = apply_mass_operator(ctx, np.zeros(grid.n), w)
            assert np.allclose(out, symbol * w, rtol=1e-12)

    def test_flat_symbol_matches_stability_b(self, grid):
        # cross-module consistency: the flat symbol equals 1/((gamma+delta) b(k)) * ... i.e.
        # bbar(k) = (gamma+delta) * D(k) = 1 / b_model(k)
        from gnwaves.stability import model_coeffs

        p = REF_PARAMS
        spec = MultiplierSpec.improved(p.delta)
        ctx = GNContext(grid, p, spec)
        k = grid.k[1:-1]  # skip mean and Nyquist (derivative ladder truncates it)
        _, b, _ = model_coeffs(k, p, spec, wbar=0.0)
        assert np.allclose(ctx.flat_symbol[1:-1], 1.0 / b, rtol=1e-12)

    def test_local_limit_gamma_zero_mu_zero(self, grid):
        p = PhysParams(gamma=0.0, epsilon=0.5, mu=0.0, delta=0.5, inv_bond=0.0)
        ctx = GNContext(grid, p, MultiplierSpec.identity())
        rng = np.random.default_rng(5)
        zeta, w = random_state(ctx, rng)
        h1, h2 = layer_depths(p, zeta)
        out = apply_mass_operator(ctx, zeta, w)
        assert np.allclose(out, w / h2, rtol=1e-14)

    def test_self_adjoint_and_positive(self, grid):
        ctx = make_ctx(grid)
        rng = np.random.default_rng(11)
        for _ in range(10):
            zeta, w = random_state(ctx, rng)
            g = random_smooth_field(grid, rng)
            aw = apply_mass_operator(ctx, zeta, w)
            ag = apply_mass_operator(ctx, zeta, g)
            lhs, rhs_ = inner(grid, aw, g), inner(grid, w, ag)
            assert lhs == pytest.approx(rhs_, rel=1e-12)
            assert inner(grid, aw, w) > 0

    def test_cavitation_raises(self, grid):
        ctx = make_ctx(grid)
        zeta = np.full(grid.n, 2.1)  # h1 = 1 - 0.5*2.1 < 0
        with pytest.raises(CavitationError):
            apply_mass_operator(ctx, zeta, np.ones(grid.n))


class TestInversion:
    def test_flat_interface_oracle(self, grid):
        # exact Fourier-diagonal division; CG converges in one iteration
        ctx = make_ctx(grid)
        rng = np.random.default_rng(23)
        v = random_smooth_field(grid, rng)
        expected = np.fft.irfft(np.fft.rfft(v) / ctx.flat_symbol, grid.n)
        w = invert_mass_operator(ctx, np.zeros(grid.n), v)
        assert np.max(np.abs(w - expected)) <= 1e-13

    def test_zero_rhs(self, grid):
        ctx = make_ctx(grid)
        w = invert_mass_operator(ctx, np.zeros(grid.n), np.zeros(grid.n))
        assert np.array_equal(w, np.zeros(grid.n))

    def test_round_trip_random_states(self, grid):
        ctx = make_ctx(grid)
        rng = np.random.default_rng(31)
        for _ in range(10):
            zeta, _ = random_state(ctx, rng)
            v = random_smooth_field(grid, rng)
            w = invert_mass_operator(ctx, zeta, v, tol=1e-12)
            residual = apply_mass_operator(ctx, zeta, w) - v
            assert np.linalg.norm(residual) <= 1e-12 * np.linalg.norm(v)

    def test_warm_start_converges(self, grid):
        ctx = make_ctx(grid)
        rng = np.random.default_rng(37)
        zeta, _ = random_state(ctx, rng)
        v = random_smooth_field(grid, rng)
        w1 = invert_mass_operator(ctx, zeta, v)
        w2 = invert_mass_operator(ctx, zeta, v, x0=w1)
        assert np.allclose(w1, w2, atol=1e-11)

    def test_mu_zero_is_pointwise(self, grid):
        p = PhysParams(gamma=0.95, epsilon=0.5, mu=0.0, delta=0.5, inv_bond=0.0)
        ctx = GNContext(grid, p, MultiplierSpec.identity())
        rng = np.random.default_rng(41)
        zeta, _ = random_state(ctx, rng)
        v = random_smooth_field(grid, rng)
        h1, h2 = layer_depths(p, zeta)
        w = invert_mass_operator(ctx, zeta, v)
        assert np.allclose(w, v * h1 * h2 / (h1 + p.gamma * h2), rtol=1e-15)


class TestVelocities:
    def test_zero_flux(self, grid):
        u1, u2 = w_to_velocities(REF_PARAMS, np.zeros(grid.n), np.zeros(grid.n))
        assert np.array_equal(u1, np.zeros(grid.n))
        assert np.array_equal(u2, np.zeros(grid.n))

    def test_flat_interface_unit_flux(self, grid):
        u1, u2 = w_to_velocities(REF_PARAMS, np.zeros(grid.n), np.ones(grid.n))
        assert np.allclose(u1, -1.0)
        assert np.allclose(u2, REF_PARAMS.delta)

    def test_rigid_lid_identity(self, grid):
        rng = np.random.default_rng(43)
        zeta = random_smooth_field(grid, rng, max_abs=0.9)
        w = random_smooth_field(grid, rng)
        h1, h2 = layer_depths(REF_PARAMS, zeta)
        u1, u2 = w_to_velocities(REF_PARAMS, zeta, w)
        assert np.allclose(h1 * u1 + h2 * u2, 0.0, atol=1e-15)


class TestSurfaceTension:
    def test_zero_without_tension(self, grid):
        p = PhysParams(inv_bond=0.0)
        rng = np.random.default_rng(47)
        zeta = random_smooth_field(grid, rng)
        assert np.array_equal(surface_tension_term(grid, zeta, p), np.zeros(grid.n))

    def test_linear_reduction_single_mode(self, grid):
        # with mu*eps^2 = 0 the term is (gamma+delta)/Bo * dddx zeta
        p = PhysParams(gamma=0.95, epsilon=0.0, mu=0.1, delta=0.5, inv_bond=5e-4)
        k0 = 8 * np.pi / grid.length
        zeta = np.sin(k0 * grid.x)
        out = surface_tension_term(grid, zeta, p)
        expected = (p.gamma + p.delta) * p.inv_bond * (-(k0**3)) * np.cos(k0 * grid.x)
        assert np.allclose(out, expected, rtol=1e-11)

    def test_finite_difference_oracle(self):
        # fully nonlinear term vs an O(h^2) centered stencil on a fine grid
        p = REF_PARAMS
        results = []
        for n in (1024, 2048, 4096):
            g = Grid(n, 4.0)
            zeta = np.exp(-2 * g.x**2) * np.sin(g.x)
            spectral = surface_tension_term(g, zeta, p)

            def fd_d1(f, dx):
                return (np.roll(f, -1) - np.roll(f, 1)) / (2 * dx)

            def fd_d2(f, dx):
                return (np.roll(f, -1) - 2 * f + np.roll(f, 1)) / dx**2

            s = fd_d1(zeta, g.dx)
            inner_term = s / np.sqrt(1.0 + p.mu * p.epsilon**2 * s**2)
            fd = (p.gamma + p.delta) * p.inv_bond * fd_d2(inner_term, g.dx)
            results.append(np.max(np.abs(fd - spectral)))
        # second-order convergence of the stencil toward the spectral value
        rate = np.log2(results[0] / results[1])
        assert rate == pytest.approx(2.0, abs=0.2)
        rate = np.log2(results[1] / results[2])
        assert rate == pytest.approx(2.0, abs=0.2)


class TestRFluxAssembly:
    def test_matches_expanded_form(self, grid):
        # R[eps zeta, w] assembled from the layer operators must equal the
        # fully expanded expression (independent path)
        ctx = make_ctx(grid, spec=MultiplierSpec.improved(REF_PARAMS.delta))
        rng = np.random.default_rng(53)
        zeta, w = random_state(ctx, rng)
        h1, h2 = layer_depths(ctx.params, zeta)

        def dxf(u, fsym):
            return ddx(grid, np.fft.irfft(fsym * np.fft.rfft(u), grid.n))

        g = ctx.params.gamma
        t2 = dxf(h2**3 * dxf(w / h2, ctx.f2), ctx.f2)
        t1 = dxf(h1**3 * dxf(w / h1, ctx.f1), ctx.f1)
        expanded = (
            w * t2 / (3.0 * h2**2)
            - g * w * t1 / (3.0 * h1**2)
            + 0.5 * (h2 * dxf(w / h2, ctx.f2)) ** 2
            - 0.5 * g * (h1 * dxf(w / h1, ctx.f1)) ** 2
        )
        assert np.allclose(r_flux(ctx, h1, h2, w), expanded, rtol=0, atol=1e-12)


class TestRhs:
    def test_rest_state_is_steady(self, grid):
        ctx = make_ctx(grid)
        dzeta, dv = rhs(ctx, np.zeros(grid.n), np.zeros(grid.n))
        assert np.allclose(dzeta, 0.0, atol=1e-16)
        assert np.allclose(dv, 0.0, atol=1e-16)

    def test_constant_shear_is_steady(self, grid):
        ctx = make_ctx(grid)
        p = ctx.params
        wbar = 0.3
        v = apply_mass_operator(ctx, np.zeros(grid.n), np.full(grid.n, wbar))
        dzeta, dv = rhs(ctx, np.zeros(grid.n), v)
        assert np.max(np.abs(dzeta)) <= 1e-13
        assert np.max(np.abs(dv)) <= 1e-13

    def test_mu_zero_multiplier_independence(self, grid):
        # every nonlocal term carries mu; at mu = 0 the family is irrelevant
        p = PhysParams(gamma=0.95, epsilon=0.5, mu=0.0, delta=0.5, inv_bond=5e-4)
        rng = np.random.default_rng(59)
        zeta = random_smooth_field(grid, rng, max_abs=0.9)
        v = random_smooth_field(grid, rng)
        outs = []
        for spec in (MultiplierSpec.identity(), MultiplierSpec.improved(p.delta)):
            ctx = GNContext(grid, p, spec)
            outs.append(rhs(ctx, zeta, v))
        assert np.array_equal(outs[0][0], outs[1][0])
        assert np.array_equal(outs[0][1], outs[1][1])

    def test_workspace_warm_start_used(self, grid):
        ctx = make_ctx(grid)
        rng = np.random.default_rng(61)
        zeta = random_smooth_field(grid, rng, max_abs=0.5)
        v = random_smooth_field(grid, rng)
        ws = GNWorkspace()
        rhs(ctx, zeta, v, workspace=ws)
        assert ws.w_prev is not None


class TestLinearDispersion:
    def test_single_mode_oscillation_frequency(self):
        # seed the right-moving linear eigenvector about rest and check the
        # measured frequency against omega^2 = k^2 a(k) b(k) (shear-free)
        from gnwaves.stability import model_coeffs
        from gnwaves.timestepper import StepController, integrate

        grid = Grid(128, 4.0)
        p = REF_PARAMS
        spec = MultiplierSpec.improved(p.delta)
        ctx = GNContext(grid, p, spec)
        k0 = 8 * np.pi / grid.length
        a, b, _ = model_coeffs(k0, p, spec, wbar=0.0)
        omega = k0 * np.sqrt(a * b)
        amp = 1e-8
        zeta0 = amp * np.cos(k0 * grid.x)
        v0 = amp * np.sqrt(a / b) * np.cos(k0 * grid.x)
        idx = int(np.argmin(np.abs(grid.k - k0)))
        phases = [(0.0, np.angle(np.fft.rfft(zeta0)[idx]))]

        def watch(t, y, stats):
            phases.append((t, np.angle(np.fft.rfft(y[: grid.n])[idx])))
            return True

        ws = GNWorkspace()

        def f(t, y):
            dz, dv = rhs(ctx, y[: grid.n], y[grid.n :], workspace=ws)
            return np.concatenate([dz, dv])

        # abs_tol must sit far below the 1e-8 mode amplitude or the error
        # control is effectively loose-relative and the phase drifts
        integrate(
            f, (0.0, 1.0), np.concatenate([zeta0, v0]),
            StepController(rel_tol=1e-11, abs_tol=1e-19), on_step=watch,
        )
        ts = np.array([t for t, _ in phases])
        unwrapped = np.unwrap(np.array([ph for _, ph in phases]))
        omega_measured = -np.polyfit(ts, unwrapped, 1)[0]
        assert omega_measured == pytest.approx(omega, rel=1e-6)


class TestHamiltonianGradients:
    def test_gradient_wrt_v_is_w(self, grid):
        ctx = make_ctx(grid)
        rng = np.random.default_rng(67)
        zeta, w0 = random_state(ctx, rng)
        v = apply_mass_operator(ctx, zeta, w0)
        phi = random_smooth_field(grid, rng)
        w = invert_mass_operator(ctx, zeta, v, tol=1e-14, max_iter=800)
        exact = inner(grid, w, phi)
        for h in (1e-2, 1e-3):
            fd = (hamiltonian(ctx, zeta, v + h * phi) - hamiltonian(ctx, zeta, v - h * phi)) / (2 * h)
            # H is quadratic in v: central differences are exact to round-off
            assert fd == pytest.approx(exact, rel=1e-9)

    def test_gradient_wrt_zeta_second_order(self, grid):
        ctx = make_ctx(grid)
        rng = np.random.default_rng(71)
        zeta, w0 = random_state(ctx, rng)
        v = apply_mass_operator(ctx, zeta, w0)
        phi = random_smooth_field(grid, rng, max_abs=0.2)
        w = invert_mass_operator(ctx, zeta, v, tol=1e-14, max_iter=800)
        exact = inner(grid, interface_gradient(ctx, zeta, w), phi)
        errs = []
        for h in (1e-2, 1e-3):
            fd = (hamiltonian(ctx, zeta + h * phi, v) - hamiltonian(ctx, zeta - h * phi, v)) / (2 * h)
            errs.append(abs(fd - exact))
        order = np.log10(errs[0] / errs[1])
        assert order == pytest.approx(2.0, abs=0.3)

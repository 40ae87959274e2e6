"""Wires a configuration to a full simulation with on-disk run records.

One call to :func:`run_experiment` builds the grid, multiplier, and initial
state, integrates to t_end writing diagnostics and snapshots as it goes, and
finishes the record with a checksummed manifest. Shear blow-up (step-size
underflow) is a recorded *result*, not an exception: the last healthy state
is saved and the returned status says "blowup".

During time integration, cavitation and solver-convergence failures inside a
trial stage are converted to NaN tendencies; the error controller then
rejects the step and shrinks, so every terminal failure surfaces uniformly
as step-size underflow.
"""

import os
import time
from dataclasses import dataclass

import numpy as np

from . import __version__
from .diagnostics import DiagnosticsRow, compute_row
from .errors import CavitationError, ConvergenceError, StepUnderflowError, ValidationError
from .io_store import (
    DiagnosticsWriter,
    snapshot_name,
    spectrum_name,
    write_manifest,
    write_snapshot,
    write_spectrum,
)
from .multipliers import MultiplierSpec, load_symbol_table
from .operators import GNContext, GNWorkspace, apply_mass_operator, invert_mass_operator, rhs
from .params import serialize_config
from .saint_venant import depth_flux, sv_hyperbolicity_margin, sv_rhs
from .spectral import Grid
from .timestepper import StepController, integrate

__all__ = ["RunResult", "build_multiplier", "initial_state", "run_experiment"]

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_BLOWUP = 3


@dataclass
class RunResult:
    status: str          # completed | blowup
    t_final: float
    out_dir: str
    stats: object
    reason: str = ""


def build_multiplier(config, base_dir="."):
    """Resolve the config's multiplier string into a MultiplierSpec."""
    name = config.multiplier
    delta = config.params.delta
    if name == "identity":
        return MultiplierSpec.identity()
    if name == "regularized":
        theta1 = config.theta1 if config.theta1 is not None else 1.0 / 15.0
        theta2 = config.theta2 if config.theta2 is not None else 1.0 / (15.0 * delta**2)
        return MultiplierSpec.regularized(theta1, theta2)
    if name == "improved":
        return MultiplierSpec.improved(delta)
    path = name.split(":", 1)[1]
    if not os.path.isabs(path):
        path = os.path.join(base_dir, path)
    return load_symbol_table(path)


def initial_state(config, grid):
    """(zeta0, w0) from the configured preset."""
    if config.initial_condition == "rest":
        zeta0 = np.zeros(grid.n)
    else:
        zeta0 = config.ic_amplitude * np.exp(-config.ic_width * grid.x**2)
    w0 = np.zeros(grid.n)
    return zeta0, w0


def _prepare_out_dir(out_dir, force):
    os.makedirs(out_dir, exist_ok=True)
    manifest = os.path.join(out_dir, "manifest.txt")
    if os.path.exists(manifest) and not force:
        raise ValidationError("out", f"{out_dir} already holds a run record (use force to overwrite)")


def run_experiment(config, out_dir, force=False, config_dir="."):
    """Run one experiment (dispersive or hydrostatic model) into out_dir."""
    _prepare_out_dir(out_dir, force)
    t_start = time.monotonic()
    grid = Grid(config.grid_n, config.domain_half_length)
    params = config.params
    spec = build_multiplier(config, base_dir=config_dir)
    ctx = GNContext(
        grid, params, spec,
        cg_tol=config.cg_tol, cg_max_iter=config.cg_max_iter, dealias=config.dealias,
    )
    zeta0, w0 = initial_state(config, grid)
    k_band = config.k_band if config.k_band is not None else 0.5 * grid.nyquist
    snapshot_times = tuple(config.snapshot_times) or (config.t_end,)

    # second evolution variable: momentum density v for the dispersive model,
    # vbar = w/H for the hydrostatic one (they coincide at mu = 0)
    is_sv = config.model == "sv"
    if not np.any(w0):
        second0 = np.zeros(grid.n)
    elif is_sv:
        second0 = w0 / depth_flux(params, zeta0)
    else:
        second0 = apply_mass_operator(ctx, zeta0, w0)
    y0 = np.concatenate([zeta0, second0])

    workspace = GNWorkspace()

    def unpack(y):
        return y[: grid.n], y[grid.n :]

    def recover_w(zeta, second):
        if is_sv:
            return depth_flux(params, zeta) * second
        return invert_mass_operator(ctx, zeta, second, x0=workspace.w_prev)

    def rhs_vec(t, y):
        zeta, second = unpack(y)
        try:
            if is_sv:
                dzeta, dsecond = sv_rhs(grid, params, zeta, second, dealias=config.dealias)
            else:
                dzeta, dsecond = rhs(ctx, zeta, second, workspace=workspace)
        except (CavitationError, ConvergenceError):
            # let the error controller reject and shrink; terminal failures
            # then surface uniformly as step-size underflow
            return np.full(2 * grid.n, np.nan)
        return np.concatenate([dzeta, dsecond])

    controller = StepController(rel_tol=config.rel_tol, abs_tol=config.abs_tol)

    with open(os.path.join(out_dir, "config.txt"), "w", encoding="utf-8") as fh:
        fh.write(serialize_config(config))

    data_files = ["config.txt", "diag.csv"]

    def diag_row(t, zeta, second):
        w = recover_w(zeta, second)
        if is_sv:
            row = compute_row(ctx, t, zeta, second, w, k_band)
            row.hyp_margin = sv_hyperbolicity_margin(params, zeta, second)
            return row
        return compute_row(ctx, t, zeta, second, w, k_band)

    def save_state(t, zeta, second):
        w = recover_w(zeta, second)
        snap = snapshot_name(t)
        write_snapshot(os.path.join(out_dir, snap), grid, zeta, w)
        data_files.append(snap)
        if config.write_spectra:
            spec_file = spectrum_name(t)
            write_spectrum(os.path.join(out_dir, spec_file), grid, zeta)
            data_files.append(spec_file)

    status, reason, t_final = "completed", "", config.t_end
    with DiagnosticsWriter(os.path.join(out_dir, "diag.csv"), DiagnosticsRow.HEADER) as diag:
        diag.append(diag_row(0.0, zeta0, second0))
        save_state(0.0, zeta0, second0)
        step_index = {"count": 0}

        def on_step(t, y, stats):
            step_index["count"] += 1
            if step_index["count"] % config.diag_stride == 0:
                diag.append(diag_row(t, *unpack(y)))
            return True

        def on_snapshot(t, y):
            save_state(t, *unpack(y))

        try:
            result = integrate(
                rhs_vec, (0.0, config.t_end), y0,
                controller=controller,
                snapshot_times=snapshot_times,
                on_step=on_step,
                on_snapshot=on_snapshot,
            )
            t_final = result.t
        except StepUnderflowError as blowup:
            status = "blowup"
            reason = str(blowup)
            t_final = blowup.t
            zeta, second = unpack(blowup.state)
            try:
                save_state(t_final, zeta, second)
            except (CavitationError, ConvergenceError):
                # last accepted state may already cavitate for w-recovery;
                # store zeta with a zero flux column rather than nothing
                write_snapshot(os.path.join(out_dir, snapshot_name(t_final)), grid, zeta, np.zeros(grid.n))
                data_files.append(snapshot_name(t_final))

    metadata = {
        "generator": f"gnwaves {__version__}",
        "model": config.model,
        "multiplier": spec.label,
        "grid_n": grid.n,
        "t_end": config.t_end,
        "status": status,
        "t_final": f"{t_final:.17g}",
        "reason": reason,
        "wall_time_s": f"{time.monotonic() - t_start:.3f}",
        "accepted": controller.stats.accepted,
        "rejected": controller.stats.rejected,
        "rhs_evals": controller.stats.rhs_evals,
    }
    write_manifest(out_dir, metadata, data_files)
    return RunResult(status=status, t_final=t_final, out_dir=out_dir, stats=controller.stats, reason=reason)

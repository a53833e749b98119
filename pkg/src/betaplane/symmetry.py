"""Field-level group actions and the scale-equivariance experiment.

A restricted subgroup acts on whole experiment setups: scalings,
translations in t and y, constant gauges of psi and linear-in-time
Galilean boosts f(t) = a + c*t. Nonlinear boosts would displace the
solution off the co-moving grid; linear ones reduce to a constant mean
velocity plus a spectral shift at comparison time, which keeps both the
pushforward and the pullback exact on band-limited fields.

The experiment runs a reference configuration and its transformed
sibling for the same number of steps, pulls the transformed vorticity
back and compares fields and shell spectra.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
import math

from .config import RunConfig, generate_initial_condition
from .diagnostics import energy_spectrum
from .dynamics import InstabilityError, ModelParams, auto_dt, integrate
from .grid import Grid, RealField
from .invariants import GroupElement
from .spectral import laplacian, spectral_shift

import numpy as np


class HarnessDomainError(ValueError):
    """Group element outside the harness subgroup (nonlinear f, non-constant g)."""


class ExperimentInstabilityError(RuntimeError):
    """One of the paired runs went unstable."""

    def __init__(self, run_id: str, step: int):
        super().__init__(f"{run_id} run unstable at step {step}")
        self.run_id = run_id
        self.step = step


@dataclass(frozen=True)
class EquivarianceReport:
    field_rel_err: float
    spectrum_rms_log_err: float
    dt_reference: float
    steps: int


def _check_harness(gel: GroupElement) -> tuple[float, float]:
    """Return (f(0), f'(0)) after validating the subgroup restriction."""
    if any(c != 0.0 for c in gel.f.coeffs[2:]):
        raise HarnessDomainError("harness boosts must be linear in time")
    if any(c != 0.0 for c in gel.g.coeffs[1:]):
        raise HarnessDomainError("harness gauge must be a constant")
    return gel.f.derivative(0, 0.0), gel.f.derivative(1, 0.0)


def _resolve_reference(cfg: RunConfig) -> tuple[RealField, float]:
    psi0 = cfg.initial_psi
    if psi0 is None:
        psi0 = generate_initial_condition(cfg)
    dt = cfg.dt if cfg.dt is not None else auto_dt(psi0)
    return psi0, dt


def transform_setup(gel: GroupElement, cfg: RunConfig) -> RunConfig:
    """Configuration whose solution is the transformed reference solution.

    Grid lengths scale by e^{-eps1}, dt by e^{eps1}, step count stays;
    the initial streamfunction picks up the weight e^{-3 eps1}, the
    spatial shift and the constant gauge; the boost's -f'(t)*y ramp has
    no periodic representation and is carried as the mean velocity
    e^{-2 eps1}*(u0 + f').
    """
    f0, c = _check_harness(gel)
    psi0, dt = _resolve_reference(cfg)
    scale = math.exp(-gel.eps1)
    grid_b = Grid(cfg.grid.nx, cfg.grid.ny, cfg.grid.lx * scale,
                  cfg.grid.ly * scale)
    shifted = spectral_shift(psi0, f0, gel.eps3)
    values_b = scale**3 * (shifted.values + gel.g(0.0))
    psi_b = RealField(grid_b, values_b)
    return replace(
        cfg,
        grid=grid_b,
        dt=dt / scale,
        mean_velocity=scale**2 * (cfg.mean_velocity + c),
        initial_psi=psi_b,
    )


def pullback_field(gel: GroupElement, field: RealField, grid: Grid,
                   time: float = 0.0, weight: int = -1) -> RealField:
    """Inverse group action on a field of the given scaling weight.

    weight is the power of e^{-eps1} the field carries forward
    (vorticity: -1, streamfunction: -3). time is the reference-run time
    of the sample, which sets the accumulated boost displacement f(t).
    """
    _check_harness(gel)
    sx = gel.f.derivative(0, time)
    sy = gel.eps3
    on_target = RealField(grid, field.values)
    unshifted = spectral_shift(on_target, -sx, -sy)
    return RealField(grid, math.exp(-weight * gel.eps1) * unshifted.values)


def _normalized_log_spectrum(psi: RealField, n_use: int) -> np.ndarray:
    shells = energy_spectrum(psi).shells
    if shells[0] <= 0.0 or np.any(shells[1:n_use] <= 0.0):
        raise ValueError("spectrum has empty shells in the comparison range")
    return np.log10(shells[1:n_use] / shells[0])


def equivariance_experiment(cfg: RunConfig, gel: GroupElement,
                            steps: int | None = None) -> EquivarianceReport:
    """Run reference and transformed setups, pull back, compare.

    Reports the relative L2 error of the pulled-back final vorticity and
    the RMS difference of log10 shell spectra (each normalized by its
    shell-1 value) over shells 2..N/4.
    """
    if steps is None:
        steps = cfg.steps
    psi0, dt = _resolve_reference(cfg)
    cfg = replace(cfg, initial_psi=psi0, dt=dt)
    cfg_b = transform_setup(gel, cfg)

    def run(which: str, setup: RunConfig):
        params = ModelParams(
            beta=setup.beta,
            dt=setup.dt,
            dissipation=setup.dissipation,
            raw_gamma=setup.raw_gamma,
            raw_alpha=setup.raw_alpha,
            mean_velocity=setup.mean_velocity,
        )
        zeta0 = laplacian(setup.initial_psi)
        try:
            return integrate(zeta0, params, steps)
        except InstabilityError as exc:
            raise ExperimentInstabilityError(which, exc.step) from exc

    state_a = run("reference", cfg)
    state_b = run("transformed", cfg_b)

    t_final = steps * dt
    zeta_back = pullback_field(gel, state_b.zeta_curr, cfg.grid,
                               time=t_final, weight=-1)
    ref = state_a.zeta_curr.values
    num = np.linalg.norm(zeta_back.values - ref)
    den = np.linalg.norm(ref)
    field_rel_err = float(num / den) if den > 0 else float(num)

    n_use = max(2, cfg.grid.nx // 4)
    log_a = _normalized_log_spectrum(state_a.psi_curr, n_use)
    log_b = _normalized_log_spectrum(state_b.psi_curr, n_use)
    spectrum_rms = float(np.sqrt(np.mean((log_a - log_b) ** 2)))
    return EquivarianceReport(
        field_rel_err=field_rel_err,
        spectrum_rms_log_err=spectrum_rms,
        dt_reference=dt,
        steps=steps,
    )

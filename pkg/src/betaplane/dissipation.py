"""Closure terms D(psi, zeta) for the vorticity tendency.

All variants return the contribution to the raw zeta equation
zeta_t + J(psi, zeta) + beta psi_x = D. Derivatives are spectral except
the bracket inside the anticipated-vorticity closure, which uses the
Arakawa stencil like the resolved advection.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import RealField
from .kernels import arakawa
from .spectral import laplacian, spectral_derivative

VARIANTS = (
    "none",
    "classical",
    "invariant_hyper",
    "down_gradient_invariant",
    "anticipated_invariant",
    "conservative_seventh",
    "conservative_fourth",
    "isotropic_a",
    "isotropic_b",
)

_NEEDS_N = {"classical", "invariant_hyper", "isotropic_a", "isotropic_b"}


class DissipationOverflowError(FloatingPointError):
    """Non-finite closure output, typically too-large nu or field amplitude."""


@dataclass(frozen=True)
class DissipationSpec:
    """Tagged closure choice.

    kind: one of VARIANTS; n is the (hyper)diffusion order where it
    applies; nu the viscosity-like coefficient; K the down-gradient
    exchange coefficient.
    """

    kind: str = "none"
    n: int = 2
    nu: float = 0.0
    K: float = 0.0

    def __post_init__(self):
        if self.kind not in VARIANTS:
            raise ValueError(f"unknown dissipation kind {self.kind!r}")
        if self.kind in _NEEDS_N and self.n < 1:
            raise ValueError("dissipation order n must be >= 1")
        if self.nu < 0 or self.K < 0:
            raise ValueError("nu and K must be non-negative")


def _abs_psi_x(psi: RealField) -> np.ndarray:
    return np.abs(spectral_derivative(psi, "x").values)


def _finite(spec: "DissipationSpec", values: np.ndarray) -> np.ndarray:
    if not np.all(np.isfinite(values)):
        raise DissipationOverflowError(
            f"non-finite output from {spec.kind} closure "
            f"(nu={spec.nu}, K={spec.K})"
        )
    return values


def dissipation(spec: DissipationSpec, psi: RealField, zeta: RealField,
                beta: float = 0.0) -> RealField:
    """Evaluate the closure D on the grid."""
    grid = psi.grid
    n, nu, K = spec.n, spec.nu, spec.K
    sign = (-1.0) ** (n - 1)

    if spec.kind == "none":
        return RealField(grid, np.zeros(grid.shape))

    if spec.kind == "classical":
        d = sign * nu * laplacian(zeta, n).values
    elif spec.kind == "invariant_hyper":
        d = sign * nu * _abs_psi_x(psi) ** ((2 * n + 1) / 2) * laplacian(zeta, n).values
    elif spec.kind == "down_gradient_invariant":
        psi_x = spectral_derivative(psi, "x").values
        d = K * np.sign(psi_x) * np.abs(psi_x) ** 1.5 * laplacian(zeta).values
    elif spec.kind == "anticipated_invariant":
        # eta = zeta + beta*y is split analytically so the stencil never
        # sees the non-periodic beta*y ramp:
        # J(psi_y, eta) = J(psi_y, zeta) + beta*psi_xy, eta_yy = zeta_yy.
        psi_x = spectral_derivative(psi, "x").values
        psi_y = spectral_derivative(psi, "y")
        psi_xy = spectral_derivative(psi_y, "x").values
        bracket = arakawa(psi_y.values, zeta.values, grid.dx, grid.dy) + beta * psi_xy
        zeta_yy = spectral_derivative(zeta, "y", 2).values
        d = nu * np.sqrt(np.abs(psi_x)) * (np.sign(psi_x) * bracket + psi_x * zeta_yy)
    elif spec.kind == "conservative_seventh":
        z = zeta.values
        lap_z = laplacian(zeta).values
        zx = spectral_derivative(zeta, "x").values
        zy = spectral_derivative(zeta, "y").values
        with np.errstate(over="ignore", invalid="ignore"):
            inner = z**5 * lap_z + 6.0 * z**4 * (zx**2 + zy**2)
        if not np.all(np.isfinite(inner)):
            raise DissipationOverflowError(
                f"non-finite output from {spec.kind} closure (nu={nu}, K={K})"
            )
        d = 7.0 * nu * laplacian(RealField(grid, inner)).values
    elif spec.kind == "conservative_fourth":
        d = nu * laplacian(RealField(grid, _finite(spec, zeta.values**4))).values
    elif spec.kind == "isotropic_a":
        d = sign * nu * zeta.values ** (2 * n + 1) * laplacian(zeta, n).values
    elif spec.kind == "isotropic_b":
        core = zeta if n == 1 else laplacian(zeta, n - 1)
        with np.errstate(over="ignore", invalid="ignore"):
            coeff = zeta.values ** (2 * n + 1)
            fxv = _finite(spec, coeff * spectral_derivative(core, "x").values)
            fyv = _finite(spec, coeff * spectral_derivative(core, "y").values)
        fx = RealField(grid, fxv)
        fy = RealField(grid, fyv)
        d = sign * nu * (
            spectral_derivative(fx, "x").values + spectral_derivative(fy, "y").values
        )
    else:  # pragma: no cover - guarded by DissipationSpec
        raise ValueError(spec.kind)

    if not np.all(np.isfinite(d)):
        raise DissipationOverflowError(
            f"non-finite output from {spec.kind} closure (nu={nu}, K={K})"
        )
    return RealField(grid, d)

"""Discrete Fourier transforms, spectral derivatives and Poisson inversion.

Convention: forward transform is unscaled, the inverse carries
1/(nx*ny), so Parseval reads sum |f|^2 = sum |fhat|^2 / (nx*ny).
"""

from __future__ import annotations

import numpy as np

from .grid import Grid, GridConfigError, RealField, SpectralField


def dft2(f: RealField) -> SpectralField:
    """Forward 2D transform (unscaled)."""
    return SpectralField(f.grid, np.fft.fft2(f.values))


def idft2(F: SpectralField) -> RealField:
    """Inverse 2D transform; returns the real part.

    For coefficients with conjugate symmetry the imaginary part is
    roundoff only and is dropped.
    """
    return RealField(F.grid, np.fft.ifft2(F.coefficients).real)


def _derivative_factor(grid: Grid, axis: str, order: int) -> np.ndarray:
    if axis == "x":
        k = grid.kx()
        n = grid.nx
    elif axis == "y":
        k = grid.ky()
        n = grid.ny
    else:
        raise ValueError(f"axis must be 'x' or 'y', got {axis!r}")
    factor = (1j * k) ** order
    if order % 2:
        # The Nyquist mode has no well-defined sign for odd derivatives;
        # zero it to keep the result real and symmetric.
        nyq = n // 2
        if axis == "x":
            factor[nyq, :] = 0.0
        else:
            factor[:, nyq] = 0.0
    return factor


def spectral_derivative(f: RealField, axis: str, order: int = 1) -> RealField:
    """d^order f / d axis^order by multiplication with (i k)^order."""
    if order < 1:
        raise ValueError("derivative order must be >= 1")
    fhat = np.fft.fft2(f.values)
    fhat *= _derivative_factor(f.grid, axis, order)
    return RealField(f.grid, np.fft.ifft2(fhat).real)


def laplacian(f: RealField, power: int = 1) -> RealField:
    """Delta^power f computed spectrally."""
    if power < 1:
        raise ValueError("laplacian power must be >= 1")
    fhat = np.fft.fft2(f.values)
    fhat *= (-f.grid.k2()) ** power
    return RealField(f.grid, np.fft.ifft2(fhat).real)


def poisson_solve(zeta: RealField) -> RealField:
    """Invert Delta psi = zeta on the torus with mean(psi) = 0.

    A nonzero mean of zeta has no periodic solution; it is projected
    out silently (the callers keep zeta zero-mean anyway).
    """
    grid = zeta.grid
    zhat = np.fft.fft2(zeta.values)
    k2 = grid.k2()
    k2[0, 0] = 1.0  # avoid division by zero; mode is zeroed below
    psihat = zhat / (-k2)
    psihat[0, 0] = 0.0
    return RealField(grid, np.fft.ifft2(psihat).real)


def dealias_truncate(f: RealField) -> RealField:
    """2/3-rule truncation, used only in convergence studies."""
    grid = f.grid
    fhat = np.fft.fft2(f.values)
    kx_cut = (2.0 / 3.0) * np.abs(grid.kx()).max()
    ky_cut = (2.0 / 3.0) * np.abs(grid.ky()).max()
    mask = (np.abs(grid.kx()) <= kx_cut) & (np.abs(grid.ky()) <= ky_cut)
    return RealField(grid, np.fft.ifft2(fhat * mask).real)


def spectral_shift(f: RealField, shift_x: float, shift_y: float) -> RealField:
    """Translate f by (shift_x, shift_y): result(x) = f(x - shift).

    Exact for band-limited fields; the Nyquist modes are phase-shifted
    symmetrically via the real part.
    """
    grid = f.grid
    if shift_x == 0.0 and shift_y == 0.0:
        return f
    fhat = np.fft.fft2(f.values)
    phase = np.exp(-1j * (grid.kx() * shift_x + grid.ky() * shift_y))
    return RealField(grid, np.fft.ifft2(fhat * phase).real)


def mean_removed(f: RealField) -> RealField:
    return RealField(f.grid, f.values - f.values.mean())

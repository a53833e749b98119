"""Hot stencil kernels with numba and pure-numpy implementations.

The Arakawa bracket is the dominant per-step cost besides the FFTs, so
it gets an ``@njit`` loop kernel. The numpy fallback uses np.roll and is
selected via BETAPLANE_NO_NUMBA=1 (see betaplane._accel).
"""

from __future__ import annotations

import numpy as np

from ._accel import NUMBA_ENABLED, njit


def arakawa_numpy(a: np.ndarray, b: np.ndarray, dx: float, dy: float) -> np.ndarray:
    """Nine-point Arakawa Jacobian J(a, b) = a_x b_y - a_y b_x.

    Average of the three second-order forms (J1 + J2 + J3) / 3, which
    makes sum J, sum a*J and sum b*J vanish to roundoff and gives exact
    antisymmetry under a <-> b.
    """

    def xp(f):
        return np.roll(f, -1, axis=0)

    def xm(f):
        return np.roll(f, 1, axis=0)

    def yp(f):
        return np.roll(f, -1, axis=1)

    def ym(f):
        return np.roll(f, 1, axis=1)

    j1 = (xp(a) - xm(a)) * (yp(b) - ym(b)) - (yp(a) - ym(a)) * (xp(b) - xm(b))

    j2 = (
        xp(a) * (yp(xp(b)) - ym(xp(b)))
        - xm(a) * (yp(xm(b)) - ym(xm(b)))
        - yp(a) * (xp(yp(b)) - xm(yp(b)))
        + ym(a) * (xp(ym(b)) - xm(ym(b)))
    )

    j3 = (
        yp(xp(a)) * (yp(b) - xp(b))
        - ym(xm(a)) * (xm(b) - ym(b))
        - yp(xm(a)) * (yp(b) - xm(b))
        + ym(xp(a)) * (xp(b) - ym(b))
    )

    return (j1 + j2 + j3) / (12.0 * dx * dy)


def _arakawa_loops(a, b, dx, dy):  # pragma: no cover - numba-compiled twin below
    nx, ny = a.shape
    out = np.empty_like(a)
    for i in range(nx):
        ip = i + 1 if i + 1 < nx else 0
        im = i - 1 if i >= 1 else nx - 1
        for j in range(ny):
            jp = j + 1 if j + 1 < ny else 0
            jm = j - 1 if j >= 1 else ny - 1
            j1 = (a[ip, j] - a[im, j]) * (b[i, jp] - b[i, jm]) - (
                a[i, jp] - a[i, jm]
            ) * (b[ip, j] - b[im, j])
            j2 = (
                a[ip, j] * (b[ip, jp] - b[ip, jm])
                - a[im, j] * (b[im, jp] - b[im, jm])
                - a[i, jp] * (b[ip, jp] - b[im, jp])
                + a[i, jm] * (b[ip, jm] - b[im, jm])
            )
            j3 = (
                a[ip, jp] * (b[i, jp] - b[ip, j])
                - a[im, jm] * (b[im, j] - b[i, jm])
                - a[im, jp] * (b[i, jp] - b[im, j])
                + a[ip, jm] * (b[ip, j] - b[i, jm])
            )
            out[i, j] = (j1 + j2 + j3) / (12.0 * dx * dy)
    return out


if NUMBA_ENABLED:
    arakawa_numba = njit(cache=True)(_arakawa_loops)
    arakawa = arakawa_numba
else:
    arakawa_numba = None
    arakawa = arakawa_numpy

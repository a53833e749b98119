"""Prolonged pseudogroup action, moving frame and normalized invariants.

The symmetry pseudogroup of the beta-plane vorticity equation combines a
scaling, time and y translations, a generalized Galilean boost in x with
time profile f(t) and a streamfunction gauging g(t):

    (T, X, Y, Psi) = (e^{e1}(t + e2), e^{-e1}(x + f(t)),
                      e^{-e1}(y + e3), e^{-3 e1}(psi + g(t) - f'(t) y)).

Prolongation to derivatives and the moving-frame normalization follow
from the operator D_T = e^{-e1}(D_t - f'(t) D_x); its powers are
expanded on jet coordinates with coefficients that are polynomials in
the derivatives of f, which keeps the whole action exact on jets of
polynomial-in-time group elements.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

from .jets import (
    Alpha,
    Jet,
    JetPoly,
    TimeFunction,
    jp_coord,
    jp_eval,
    material_power,
    multi_indices,
)


class SingularFrameError(ValueError):
    """Moving frame undefined where psi_x vanishes."""


class PhantomIndexError(ValueError):
    """Requested a normalized invariant at a phantom multi-index."""


@dataclass(frozen=True)
class GroupElement:
    eps1: float = 0.0
    eps2: float = 0.0
    eps3: float = 0.0
    f: TimeFunction = TimeFunction.zero()
    g: TimeFunction = TimeFunction.zero()

    @classmethod
    def identity(cls) -> "GroupElement":
        return cls()


def compose(outer: GroupElement, inner: GroupElement) -> GroupElement:
    """Element acting as outer after inner, for boost-free elements.

    General composition drags f through the scaling of t in a way that
    leaves the canonical form only for f = 0, which is all the
    composition-consistency checks need.
    """
    if not outer.f.is_zero() or not inner.f.is_zero():
        raise ValueError("composition is only supported for boost-free elements")
    e1 = inner.eps1 + outer.eps1
    e2 = inner.eps2 + math.exp(-inner.eps1) * outer.eps2
    e3 = inner.eps3 + math.exp(inner.eps1) * outer.eps3
    # Psi2 = e^{-3(e1a+e1b)} (psi + g_in(t) + e^{3 e1_in} g_out(T_in(t)))
    g_out_of_t = outer.g.affine_argument(
        math.exp(inner.eps1), math.exp(inner.eps1) * inner.eps2
    )
    # affine_argument gives s -> g_out(scale*s + shift); we need argument
    # e^{e1_in} (t + e2_in) = e^{e1_in} t + e^{e1_in} e2_in
    g = inner.g + math.exp(3.0 * inner.eps1) * g_out_of_t
    return GroupElement(e1, e2, e3, TimeFunction.zero(), g)


@dataclass(frozen=True)
class FrameParameters:
    """Pseudogroup parameters singled out by the normalization conditions.

    f_derivs[k] is the k-th time derivative of the boost profile at the
    jet's own time (f_derivs[0] = -x); h_derivs[k] the k-th derivative
    of h(t, y) = g(t) - f'(t) y there.
    """

    eps1: float
    eps2: float
    eps3: float
    sign: float
    f_derivs: tuple[float, ...]
    h_derivs: tuple[float, ...]

    def group_element(self, t: float, y: float) -> GroupElement:
        """Polynomial group element realizing the frame at the jet point."""
        f = TimeFunction.from_taylor(t, self.f_derivs)
        g_derivs = [
            h + fk1 * y for h, fk1 in zip(self.h_derivs, self.f_derivs[1:])
        ]
        g = TimeFunction.from_taylor(t, g_derivs)
        return GroupElement(self.eps1, self.eps2, self.eps3, f, g)


# ---------------------------------------------------------------------------
# Prolonged action: Psi_alpha = e^{w e1}((D_t - f' D_x)^{a1} psi_{0 a2 a3}
#                                        + correction).
# The operator power is expanded as a linear combination of jet
# coordinates whose coefficients are polynomials in f', f'', ...
# (FPoly: monomials are sorted tuples of derivative orders).
# ---------------------------------------------------------------------------

FPoly = dict[tuple[int, ...], float]
LinExpr = dict[Alpha, FPoly]


def _fp_add(target: FPoly, mono: tuple[int, ...], c: float) -> None:
    target[mono] = target.get(mono, 0.0) + c


def _fp_dt(p: FPoly) -> FPoly:
    out: FPoly = {}
    for mono, c in p.items():
        for i, k in enumerate(mono):
            bumped = tuple(sorted(mono[:i] + (k + 1,) + mono[i + 1 :]))
            _fp_add(out, bumped, c)
    return out


def _fp_mul_f1(p: FPoly) -> FPoly:
    return {tuple(sorted(mono + (1,))): c for mono, c in p.items()}


def _fp_eval(p: FPoly, f_derivs) -> float:
    total = 0.0
    for mono, c in p.items():
        prod = c
        for k in mono:
            prod *= f_derivs[k]
        total += prod
    return total


def _boost_material_apply(expr: LinExpr) -> LinExpr:
    """(D_t - f'(t) D_x) acting on sum_alpha c_alpha(f', f'', ...) psi_alpha."""
    out: LinExpr = {}

    def add(alpha: Alpha, p: FPoly) -> None:
        tgt = out.setdefault(alpha, {})
        for mono, c in p.items():
            _fp_add(tgt, mono, c)

    for (a1, a2, a3), p in expr.items():
        add((a1 + 1, a2, a3), p)  # D_t on the jet coordinate
        add((a1, a2, a3), _fp_dt(p))  # D_t on the coefficient
        add((a1, a2 + 1, a3), {m: -c for m, c in _fp_mul_f1(p).items()})
    return {a: {m: c for m, c in p.items() if c != 0.0} for a, p in out.items()}


@lru_cache(maxsize=None)
def _transformed_core(a1: int, a2: int, a3: int) -> tuple:
    """(D_t - f' D_x)^{a1} psi_{0 a2 a3} as a hashable LinExpr."""
    expr: LinExpr = {(0, a2, a3): {(): 1.0}}
    for _ in range(a1):
        expr = _boost_material_apply(expr)
    return tuple(
        (alpha, tuple(sorted(p.items()))) for alpha, p in sorted(expr.items())
    )


def _eval_core(a1: int, a2: int, a3: int, jet: Jet, f_derivs) -> float:
    total = 0.0
    for alpha, items in _transformed_core(a1, a2, a3):
        coeff = _fp_eval(dict(items), f_derivs)
        if coeff:
            total += coeff * jet[alpha]
    return total


def prolong_action(gel: GroupElement, z: Jet) -> Jet:
    """Transformed jet at the transformed base point, same order."""
    t, x, y = z.point
    r = z.order
    e1 = gel.eps1
    f_derivs = gel.f.derivative_values(t, r + 1)
    g_derivs = gel.g.derivative_values(t, r)

    T = math.exp(e1) * (t + gel.eps2)
    X = math.exp(-e1) * (x + f_derivs[0])
    Y = math.exp(-e1) * (y + gel.eps3)

    values = {}
    for alpha in multi_indices(r):
        a1, a2, a3 = alpha
        core = _eval_core(a1, a2, a3, z, f_derivs)
        if a2 == 0 and a3 == 1:
            core -= f_derivs[a1 + 1]
        elif a2 == 0 and a3 == 0:
            core += g_derivs[a1] - f_derivs[a1 + 1] * y
        weight = a2 + a3 - a1 - 3
        values[alpha] = math.exp(weight * e1) * core
    return Jet(order=r, point=(T, X, Y), values=values)


# ---------------------------------------------------------------------------
# Moving frame and normalized invariants.
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _frame_f_poly(k: int) -> tuple:
    """(D_t - psi_y D_x)^k psi_y, the jet polynomial behind f^{(k+1)}."""
    return tuple(material_power(jp_coord((0, 0, 1)), k).items())


@lru_cache(maxsize=None)
def _frame_h_poly(k: int) -> tuple:
    """-(D_t - psi_y D_x)^k psi, the jet polynomial behind h^{(k)}."""
    p = material_power(jp_coord((0, 0, 0)), k)
    return tuple((m, -c) for m, c in p.items())


def moving_frame(z: Jet) -> FrameParameters:
    """Solve the normalization conditions at the jet.

    eps1 = ln sqrt|psi_x|, eps2 = -t, eps3 = -y, f = -x,
    f^{(k+1)} = (D_t - psi_y D_x)^k psi_y,
    h^{(k)} = -(D_t - psi_y D_x)^k psi.
    """
    t, x, y = z.point
    psi_x = z[(0, 1, 0)]
    if psi_x == 0.0:
        raise SingularFrameError("moving frame is singular where psi_x = 0")
    kmax = z.order - 1
    f_derivs = [-x]
    for k in range(kmax + 1):
        f_derivs.append(jp_eval(dict(_frame_f_poly(k)), z))
    h_derivs = [jp_eval(dict(_frame_h_poly(k)), z) for k in range(kmax + 1)]
    return FrameParameters(
        eps1=0.5 * math.log(abs(psi_x)),
        eps2=-t,
        eps3=-y,
        sign=math.copysign(1.0, psi_x),
        f_derivs=tuple(f_derivs),
        h_derivs=tuple(h_derivs),
    )


def invariantize(z: Jet) -> Jet:
    """Apply the jet's own frame: prolong_action(frame(z), z)."""
    t, _, y = z.point
    return prolong_action(moving_frame(z).group_element(t, y), z)


def is_phantom(alpha: Alpha) -> bool:
    a1, a2, a3 = alpha
    return (a2 == 0 and a3 in (0, 1)) or alpha == (0, 1, 0)


@lru_cache(maxsize=None)
def _invariant_poly(a1: int, a2: int, a3: int) -> tuple:
    return tuple(material_power(jp_coord((0, a2, a3)), a1).items())


def normalized_invariant(z: Jet, alpha: Alpha) -> float:
    """I_alpha = |psi_x|^{(a2+a3-a1-3)/2} (D_t - psi_y D_x)^{a1} psi_{0 a2 a3}."""
    alpha = tuple(alpha)
    if is_phantom(alpha):
        raise PhantomIndexError(f"{alpha} is a phantom index")
    if sum(alpha) > z.order:
        raise JetOrderErrorFor(alpha, z.order)
    psi_x = z[(0, 1, 0)]
    if psi_x == 0.0:
        raise SingularFrameError("invariants are singular where psi_x = 0")
    a1, a2, a3 = alpha
    weight = (a2 + a3 - a1 - 3) / 2.0
    return abs(psi_x) ** weight * jp_eval(dict(_invariant_poly(a1, a2, a3)), z)


def JetOrderErrorFor(alpha, order):
    from .jets import JetOrderError

    return JetOrderError(f"invariant {alpha} needs jet order {sum(alpha)}, have {order}")


def nonphantom_indices(max_order: int) -> list[Alpha]:
    return [a for a in multi_indices(max_order) if sum(a) > 0 and not is_phantom(a)]


def invariant_representation_residual(z: Jet, beta: float) -> float:
    """(zeta_t - psi_y zeta_x)/psi_x + zeta_y + beta, the invariant form
    of the vorticity equation evaluated on a jet."""
    psi_x = z[(0, 1, 0)]
    if psi_x == 0.0:
        raise SingularFrameError("invariant representation undefined at psi_x = 0")
    zeta_t = z[(1, 2, 0)] + z[(1, 0, 2)]
    zeta_x = z[(0, 3, 0)] + z[(0, 1, 2)]
    zeta_y = z[(0, 2, 1)] + z[(0, 0, 3)]
    psi_y = z[(0, 0, 1)]
    return (zeta_t - psi_y * zeta_x) / psi_x + zeta_y + beta

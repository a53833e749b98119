"""Exact jets of analytic fields and polynomial calculus on jet space.

A jet stores the streamfunction and all its partial derivatives up to a
fixed order at one space-time point, indexed by multi-indices
alpha = (a_t, a_x, a_y). Analytic fields (finite sums of trigonometric
space-time modes) provide exact jets of any order and serve as the
brute-force oracle throughout the verification suites.

The module also implements differential polynomials on jet coordinates
(JetPoly): linear combinations of monomials in the psi_alpha with float
coefficients, closed under total differentiation. They are what lets
frame parameters, normalized invariants and conservation fluxes be
evaluated exactly on jets instead of symbolically.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

Alpha = tuple[int, int, int]

MAX_JET_ORDER = 8

DELTA = ((1, 0, 0), (0, 1, 0), (0, 0, 1))


class JetOrderError(ValueError):
    """Requested operation needs a higher jet order than available."""


def multi_indices(order: int) -> list[Alpha]:
    """All alpha with |alpha| <= order, graded-lexicographic."""
    out = []
    for total in range(order + 1):
        for a1 in range(total, -1, -1):
            for a2 in range(total - a1, -1, -1):
                out.append((a1, a2, total - a1 - a2))
    return out


@dataclass(frozen=True)
class Jet:
    """Values psi_alpha for all |alpha| <= order at one point (t, x, y)."""

    order: int
    point: tuple[float, float, float]
    values: Mapping[Alpha, float]

    def __post_init__(self):
        for alpha in multi_indices(self.order):
            if alpha not in self.values:
                raise ValueError(f"jet is missing entry {alpha}")
        if not all(math.isfinite(v) for v in self.values.values()):
            raise ValueError("jet contains non-finite values")

    def __getitem__(self, alpha: Alpha) -> float:
        try:
            return self.values[alpha]
        except KeyError:
            raise JetOrderError(
                f"jet of order {self.order} has no entry {alpha}"
            ) from None


@dataclass(frozen=True)
class AnalyticField:
    """psi(t, x, y) = sum A*sin(omega*t + kappa*x + lam*y + phase).

    Differentiation multiplies each term by the matching frequency and
    shifts the phase by pi/2, so every mixed partial is closed-form.
    """

    terms: tuple[tuple[float, float, float, float, float], ...]

    @classmethod
    def from_terms(cls, terms: Iterable[Iterable[float]]) -> "AnalyticField":
        return cls(tuple(tuple(float(v) for v in t) for t in terms))

    @classmethod
    def random(cls, rng: np.random.Generator, n_terms: int = 4,
               amplitude: float = 1.0, freq: float = 1.0) -> "AnalyticField":
        terms = []
        for _ in range(n_terms):
            a = amplitude * rng.uniform(0.3, 1.0) * rng.choice([-1.0, 1.0])
            om, ka, la = freq * rng.uniform(0.3, 1.2, size=3) * rng.choice(
                [-1.0, 1.0], size=3
            )
            ph = rng.uniform(0.0, 2.0 * np.pi)
            terms.append((a, om, ka, la, ph))
        return cls.from_terms(terms)

    def derivative(self, alpha: Alpha, point: tuple[float, float, float]) -> float:
        a1, a2, a3 = alpha
        t, x, y = point
        shift = (a1 + a2 + a3) * 0.5 * np.pi
        total = 0.0
        for amp, om, ka, la, ph in self.terms:
            factor = om**a1 * ka**a2 * la**a3
            total += amp * factor * math.sin(om * t + ka * x + la * y + ph + shift)
        return total

    def shortest_wavelength(self) -> float:
        """2*pi over the largest frequency component, for FD step sizing."""
        fmax = max(
            (max(abs(om), abs(ka), abs(la)) for _, om, ka, la, _ in self.terms),
            default=0.0,
        )
        if fmax == 0.0:
            return 1.0
        return 2.0 * np.pi / fmax

    def jet(self, point: tuple[float, float, float], order: int) -> Jet:
        return analytic_jet(self, point, order)


def analytic_jet(field: AnalyticField, point, order: int) -> Jet:
    """Exact jet of an analytic field; order is capped at MAX_JET_ORDER."""
    if order > MAX_JET_ORDER:
        raise JetOrderError(f"jet order {order} exceeds cap {MAX_JET_ORDER}")
    point = tuple(float(v) for v in point)
    values = {
        alpha: field.derivative(alpha, point) for alpha in multi_indices(order)
    }
    return Jet(order=order, point=point, values=values)


@dataclass(frozen=True)
class TimeFunction:
    """Polynomial in (t - t0) with exact derivatives of every order."""

    coeffs: tuple[float, ...]
    t0: float = 0.0

    @classmethod
    def zero(cls) -> "TimeFunction":
        return cls((0.0,))

    @classmethod
    def from_taylor(cls, t0: float, derivs: Iterable[float]) -> "TimeFunction":
        """Polynomial with prescribed derivative values at t0."""
        coeffs = tuple(d / math.factorial(k) for k, d in enumerate(derivs))
        return cls(coeffs, t0=float(t0))

    @classmethod
    def random(cls, rng: np.random.Generator, degree: int = 4,
               scale: float = 1.0) -> "TimeFunction":
        return cls(tuple(scale * rng.uniform(-1.0, 1.0) for _ in range(degree + 1)))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return all(c == 0.0 for c in self.coeffs)

    def derivative(self, k: int, t: float) -> float:
        s = t - self.t0
        total = 0.0
        for j in range(k, len(self.coeffs)):
            total += (
                self.coeffs[j] * math.factorial(j) / math.factorial(j - k) * s ** (j - k)
            )
        return total

    def __call__(self, t: float) -> float:
        return self.derivative(0, t)

    def derivative_values(self, t: float, up_to: int) -> list[float]:
        return [self.derivative(k, t) for k in range(up_to + 1)]

    def affine_argument(self, scale: float, shift: float) -> "TimeFunction":
        """Return s -> self(scale*s + shift) as a polynomial in s."""
        # expand about s0 = 0 via Taylor of self at t = shift
        derivs = [
            self.derivative(k, shift) * scale**k for k in range(len(self.coeffs))
        ]
        return TimeFunction.from_taylor(0.0, derivs)

    def __mul__(self, scalar: float) -> "TimeFunction":
        return TimeFunction(tuple(scalar * c for c in self.coeffs), self.t0)

    __rmul__ = __mul__

    def __add__(self, other: "TimeFunction") -> "TimeFunction":
        if self.t0 != other.t0:
            # re-expand the other polynomial about self.t0
            other = TimeFunction.from_taylor(
                self.t0, other.derivative_values(self.t0, other.degree)
            )
        n = max(len(self.coeffs), len(other.coeffs))
        a = list(self.coeffs) + [0.0] * (n - len(self.coeffs))
        b = list(other.coeffs) + [0.0] * (n - len(other.coeffs))
        return TimeFunction(tuple(x + y for x, y in zip(a, b)), self.t0)


# ---------------------------------------------------------------------------
# Differential polynomials on jet coordinates.
#
# A JetPoly maps monomials (sorted tuples of Alpha) to coefficients;
# the empty monomial is the constant term.
# ---------------------------------------------------------------------------

Monomial = tuple[Alpha, ...]
JetPoly = dict[Monomial, float]


def jp_const(c: float) -> JetPoly:
    return {(): float(c)} if c else {}

def jp_coord(alpha: Alpha) -> JetPoly:
    return {(tuple(alpha),): 1.0}


def jp_add(*polys: JetPoly) -> JetPoly:
    out: JetPoly = {}
    for p in polys:
        for mono, c in p.items():
            out[mono] = out.get(mono, 0.0) + c
    return {m: c for m, c in out.items() if c != 0.0}


def jp_scale(p: JetPoly, s: float) -> JetPoly:
    if s == 0.0:
        return {}
    return {m: s * c for m, c in p.items()}


def jp_mul(p: JetPoly, q: JetPoly) -> JetPoly:
    out: JetPoly = {}
    for m1, c1 in p.items():
        for m2, c2 in q.items():
            mono = tuple(sorted(m1 + m2))
            out[mono] = out.get(mono, 0.0) + c1 * c2
    return {m: c for m, c in out.items() if c != 0.0}


def jp_pow(p: JetPoly, n: int) -> JetPoly:
    out = jp_const(1.0)
    for _ in range(n):
        out = jp_mul(out, p)
    return out


def jp_total_derivative(p: JetPoly, direction: int) -> JetPoly:
    """Total derivative D_j of a coefficient-constant jet polynomial.

    direction: 0 = t, 1 = x, 2 = y. Product rule over the monomial
    factors; each factor alpha becomes alpha + delta_j.
    """
    delta = DELTA[direction]
    out: JetPoly = {}
    for mono, c in p.items():
        for i, alpha in enumerate(mono):
            bumped = tuple(
                alpha[k] + delta[k] for k in range(3)
            )
            new = tuple(sorted(mono[:i] + (bumped,) + mono[i + 1 :]))
            out[new] = out.get(new, 0.0) + c
    return {m: c for m, c in out.items() if c != 0.0}


def jp_order(p: JetPoly) -> int:
    """Highest |alpha| appearing in the polynomial."""
    return max((sum(a) for mono in p for a in mono), default=0)


def jp_eval(p: JetPoly, jet: Jet) -> float:
    total = 0.0
    for mono, c in p.items():
        prod = c
        for alpha in mono:
            prod *= jet[alpha]
        total += prod
    return total


def material_operator(p: JetPoly) -> JetPoly:
    """(D_t - psi_y D_x) applied to a jet polynomial."""
    psi_y = jp_coord((0, 0, 1))
    return jp_add(
        jp_total_derivative(p, 0),
        jp_scale(jp_mul(psi_y, jp_total_derivative(p, 1)), -1.0),
    )


def material_power(p: JetPoly, k: int) -> JetPoly:
    for _ in range(k):
        p = material_operator(p)
    return p


# Frequently used building blocks.
PSI = jp_coord((0, 0, 0))
PSI_X = jp_coord((0, 1, 0))
PSI_Y = jp_coord((0, 0, 1))
ZETA = jp_add(jp_coord((0, 2, 0)), jp_coord((0, 0, 2)))


def zeta_derivative(a1: int, a2: int, a3: int) -> JetPoly:
    """d^{a1+a2+a3} zeta / dt^{a1} dx^{a2} dy^{a3} as a jet polynomial."""
    p = ZETA
    for _ in range(a1):
        p = jp_total_derivative(p, 0)
    for _ in range(a2):
        p = jp_total_derivative(p, 1)
    for _ in range(a3):
        p = jp_total_derivative(p, 2)
    return p

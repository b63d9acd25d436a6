"""Planar solution of the quartic one-matrix model, raw and renormalized.

The raw model weights every four-valent gluing by ``g`` per vertex.  All of
its planar correlation data flows through one auxiliary quantity, the
endpoint parameter ``a^2(g) = (1 - sqrt(1 - 12 g)) / (6 g)`` of the
eigenvalue support:

* two-point function     ``G2 = a^2 (4 - a^2) / 3``
* connected four-point   ``Gamma = (a^2)^2 (a^2 - 1)(5 - 2 a^2) / 9``
* free energy            ``F = log(a^2)/2 - (a^2 - 1)(9 - a^2) / 24``

The renormalized ("reduced") model rescales the quadratic term so that the
two-point function is identically 1, which removes all self-energy
decorations from the counted diagrams.  Its endpoint parameter solves the
cubic ``27 g = (a^2 - 1)(4 - a^2)^2`` on the branch through ``a^2(0) = 1``,
and ``t(g) = a^2 (4 - a^2) / 3``.

Everything is available both as exact rational series (the authoritative
mode) and as double-precision evaluations for plotting-free numerics such
as spectral-density checks.  Exact arithmetic lives in `linkcensus.series`;
this module never mixes floats into series.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .series import (
    AlgebraicSystem,
    BivariatePoly,
    Series,
    SeriesError,
    compose,
    div,
    integrate,
    log_series,
    mul,
    newton_solve,
    sqrt_series,
)

__all__ = [
    "SingularityError",
    "RAW_CRITICAL_G",
    "REDUCED_CRITICAL_G",
    "ModelPoint",
    "SpectralData",
    "a2_raw_series",
    "g2_raw_series",
    "g4_raw_series",
    "gamma_raw_series",
    "free_energy_raw_series",
    "reduced_cubic",
    "a2_reduced_series",
    "t_series",
    "gamma_reduced_series",
    "g4_reduced_series",
    "free_energy_reduced_series",
    "g2_scaled_series",
    "solve_unit_two_point",
    "substitute_renormalized",
    "a2_raw",
    "g2_raw",
    "g4_raw",
    "gamma_raw",
    "free_energy_raw",
    "resolvent",
    "density",
    "spectral_data",
    "density_moment",
    "a2_reduced",
    "t_of_g",
    "gamma_reduced",
    "free_energy_reduced",
]


class SingularityError(ValueError):
    """Numeric evaluation was requested at or beyond a branch singularity."""


RAW_CRITICAL_G = Fraction(1, 12)
REDUCED_CRITICAL_G = Fraction(4, 27)


# ---------------------------------------------------------------------------
# exact series
# ---------------------------------------------------------------------------


def a2_raw_series(order: int) -> Series:
    """Series of the raw endpoint parameter; coefficients are 3^k Catalan(k)."""
    root = sqrt_series(Series.from_coeffs([1, -12], order + 1))
    return (1 - root).shift_down(1) / 6


def g2_raw_series(order: int) -> Series:
    a2 = a2_raw_series(order)
    return mul(a2, 4 - a2) / 3


def gamma_raw_series(order: int) -> Series:
    a2 = a2_raw_series(order)
    return mul(mul(a2, a2), mul(a2 - 1, 5 - 2 * a2)) / 9


def g4_raw_series(order: int) -> Series:
    g2 = g2_raw_series(order)
    return gamma_raw_series(order) + 2 * mul(g2, g2)


def free_energy_raw_series(order: int) -> Series:
    if order < 1:
        return Series.zero(order)
    a2 = a2_raw_series(order)
    return log_series(a2) / 2 - mul(a2 - 1, 9 - a2) / 24


def reduced_cubic() -> AlgebraicSystem:
    """The cubic relation pinning the reduced endpoint parameter.

    ``27 g = (y - 1)(4 - y)^2`` rewritten as ``P(g, y) = 0`` with the branch
    through ``y(0) = 1``.
    """
    relation = BivariatePoly.from_dict(
        {(0, 3): 1, (0, 2): -9, (0, 1): 24, (0, 0): -16, (1, 0): -27}
    )
    return AlgebraicSystem(relation, Fraction(1))


def a2_reduced_series(order: int) -> Series:
    return newton_solve(reduced_cubic(), order)


def t_series(order: int) -> Series:
    u = a2_reduced_series(order)
    return mul(u, 4 - u) / 3


def gamma_reduced_series(order: int) -> Series:
    """Counting series of renormalized tangle diagrams: 1, 2, 6, 22, 91, ..."""
    u = a2_reduced_series(order)
    four_minus = 4 - u
    return div(mul(u - 1, 5 - 2 * u), mul(four_minus, four_minus))


def g4_reduced_series(order: int) -> Series:
    # with the two-point function pinned to 1 the disconnected part is constant
    return gamma_reduced_series(order) + 2


def free_energy_reduced_series(order: int) -> Series:
    """Counting series of renormalized closed diagrams, from dF/dg = G4/4."""
    if order < 1:
        return Series.zero(order)
    return integrate(g4_reduced_series(order - 1) / 4)


def g2_scaled_series(t: Fraction, order: int) -> Series:
    """Two-point series of the model with quadratic weight ``t`` (exact in g).

    Solves ``t y - 3 g y^2 = 1`` for the endpoint parameter and substitutes
    into ``G2 = t y^2 - 4 g y^3``.  Used to pin the scaling property
    ``G2(t, g) = G2(1, g / t^2) / t`` against an independent expansion.
    """
    t = Fraction(t)
    if t <= 0:
        raise SeriesError("the quadratic weight must be positive")
    relation = BivariatePoly.from_dict({(0, 1): t, (1, 2): -3, (0, 0): -1})
    y = newton_solve(AlgebraicSystem(relation, Fraction(1) / t), order)
    g = Series.identity(order)
    return t * mul(y, y) - 4 * mul(g, mul(y, mul(y, y)))


def solve_unit_two_point(g2_raw: Series) -> Series:
    """Solve ``G2(t(g), g) = 1`` order by order for ``t(g)``.

    ``g2_raw`` is the raw series ``G2(1, g)`` (from a closed form or from the
    enumeration oracle); the scaling property turns the constraint into the
    fixed point ``t = G2(1, g / t^2)``, which gains one order per sweep.
    """
    if g2_raw.coeffs[0] == 0:
        raise SeriesError("raw two-point series must have a nonzero constant term")
    order = g2_raw.order
    t = Series.constant(g2_raw.coeffs[0], order, g2_raw.var)
    g = Series.identity(order) if order >= 1 else Series.zero(0)
    for _ in range(order + 1):
        inner = mul(g, div(Series.one(order, g2_raw.var), mul(t, t)))
        t_next = compose(g2_raw, inner)
        if t_next == t:
            break
        t = t_next
    return t


def substitute_renormalized(raw: Series, t: Series, legs: int) -> Series:
    """Renormalize a raw 2n-point series: ``t^{-n} * raw(g / t(g)^2)``.

    ``legs`` is the number of external legs (2n); each leg pair carries one
    factor of 1/t and every vertex two.
    """
    if legs % 2 != 0 or legs < 0:
        raise SeriesError("legs must be a nonnegative even integer")
    order = min(raw.order, t.order)
    one = Series.one(order, raw.var)
    inv_t2 = div(one, mul(t.truncate(order), t.truncate(order)))
    inner = mul(Series.identity(order) if order >= 1 else Series.zero(0), inv_t2)
    result = compose(raw, inner)
    for _ in range(legs // 2):
        result = div(result, t.truncate(result.order))
    return result


# ---------------------------------------------------------------------------
# double-precision evaluation
# ---------------------------------------------------------------------------


def _check_raw_domain(g: float) -> None:
    if not 0 <= g <= float(RAW_CRITICAL_G):
        raise SingularityError(
            f"raw model is only defined for 0 <= g <= 1/12, got g = {g}"
        )


def _check_reduced_domain(g: float) -> None:
    if not 0 <= g <= float(REDUCED_CRITICAL_G):
        raise SingularityError(
            f"reduced model is only defined for 0 <= g <= 4/27, got g = {g}"
        )


def a2_raw(g: float) -> float:
    """Raw endpoint parameter; the form below is stable down to g = 0."""
    _check_raw_domain(g)
    return 2.0 / (1.0 + math.sqrt(1.0 - 12.0 * g))


def g2_raw(g: float) -> float:
    a2 = a2_raw(g)
    return a2 * (4.0 - a2) / 3.0


def gamma_raw(g: float) -> float:
    a2 = a2_raw(g)
    return a2 * a2 * (a2 - 1.0) * (5.0 - 2.0 * a2) / 9.0


def g4_raw(g: float) -> float:
    return gamma_raw(g) + 2.0 * g2_raw(g) ** 2


def free_energy_raw(g: float) -> float:
    a2 = a2_raw(g)
    return 0.5 * math.log(a2) - (a2 - 1.0) * (9.0 - a2) / 24.0


def resolvent(g: float, lam: complex) -> complex:
    """Spectral resolvent; behaves as 1/lam at infinity (checked in tests)."""
    _check_raw_domain(g)
    a2 = a2_raw(g)
    lam = complex(lam)
    w = _sqrt_branch(lam, a2)
    return 0.5 * lam - 0.5 * g * lam**3 - (-0.5 * g * lam**2 + 0.5 - g * a2) * w


def _sqrt_branch(lam: complex, a2: float) -> complex:
    """sqrt(lam^2 - 4 a^2) on the branch asymptotic to lam at infinity."""
    w = ((lam - 2.0 * math.sqrt(a2)) ** 0.5) * ((lam + 2.0 * math.sqrt(a2)) ** 0.5)
    if (w * lam.conjugate()).real < 0:
        w = -w
    return w


def density(g: float, lam: float) -> float:
    """Eigenvalue density on the support [-2a, 2a]."""
    _check_raw_domain(g)
    a2 = a2_raw(g)
    if lam * lam > 4.0 * a2 + 1e-12:
        raise SingularityError(
            f"lambda = {lam} lies outside the spectral support [-{2*math.sqrt(a2):.6f}, {2*math.sqrt(a2):.6f}]"
        )
    inside = max(4.0 * a2 - lam * lam, 0.0)
    return (0.5 - 0.5 * g * lam * lam - g * a2) * math.sqrt(inside) / math.pi


def density_moment(g: float, k: int, nodes: int = 96) -> float:
    """k-th moment of the density by Gauss-Legendre quadrature.

    The substitution ``lam = 2 a sin(theta)`` removes the square-root edge
    so the integrand is smooth and the rule converges to machine precision.
    """
    _check_raw_domain(g)
    a2 = a2_raw(g)
    a = math.sqrt(a2)
    x, w = np.polynomial.legendre.leggauss(nodes)
    theta = 0.5 * math.pi * x
    lam = 2.0 * a * np.sin(theta)
    jac = 2.0 * a * np.cos(theta) * 0.5 * math.pi
    dens = (0.5 - 0.5 * g * lam**2 - g * a2) * np.sqrt(np.maximum(4.0 * a2 - lam**2, 0.0)) / math.pi
    return float(np.sum(w * lam**k * dens * jac))


def a2_reduced(g: float) -> float:
    """Reduced endpoint parameter, tracked continuously from a^2(0) = 1.

    On the physical branch ``a^2`` increases monotonically from 1 to 2 as g
    runs to 4/27, so bisection follows the branch without ever consulting
    closed-form cubic roots; a Newton polish finishes to machine precision.
    """
    _check_reduced_domain(g)
    target = 27.0 * g

    def rhs(u: float) -> float:
        return (u - 1.0) * (4.0 - u) ** 2

    lo, hi = 1.0, 2.0
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if rhs(mid) < target:
            lo = mid
        else:
            hi = mid
    u = 0.5 * (lo + hi)
    for _ in range(4):
        deriv = (4.0 - u) ** 2 - 2.0 * (u - 1.0) * (4.0 - u)
        if deriv == 0.0:
            break
        u -= (rhs(u) - target) / deriv
        u = min(max(u, 1.0), 2.0)
    return u


def t_of_g(g: float) -> float:
    u = a2_reduced(g)
    return u * (4.0 - u) / 3.0


def gamma_reduced(g: float) -> float:
    u = a2_reduced(g)
    return (u - 1.0) * (5.0 - 2.0 * u) / (4.0 - u) ** 2


def free_energy_reduced(g: float, nodes: int = 128) -> float:
    """Reduced free energy by quadrature of dF/dg = G4(t(g), g)/4 from 0."""
    _check_reduced_domain(g)
    if g == 0.0:
        return 0.0
    x, w = np.polynomial.legendre.leggauss(nodes)
    s = 0.5 * g * (x + 1.0)
    vals = np.array([0.25 * (gamma_reduced(si) + 2.0) for si in s])
    return float(np.sum(w * vals) * 0.5 * g)


# ---------------------------------------------------------------------------
# model-point and spectral containers
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ModelPoint:
    """A coupling value together with the model variant it refers to."""

    g: float
    variant: str = "raw"  # "raw" (t = 1) or "reduced" (t = t(g))

    def __post_init__(self) -> None:
        if self.variant not in ("raw", "reduced"):
            raise ValueError(f"unknown variant {self.variant!r}")
        if self.variant == "raw":
            _check_raw_domain(float(self.g))
        else:
            _check_reduced_domain(float(self.g))

    def a2(self) -> float:
        return a2_raw(float(self.g)) if self.variant == "raw" else a2_reduced(float(self.g))

    def gamma(self) -> float:
        return gamma_raw(float(self.g)) if self.variant == "raw" else gamma_reduced(float(self.g))

    def free_energy(self) -> float:
        return (
            free_energy_raw(float(self.g))
            if self.variant == "raw"
            else free_energy_reduced(float(self.g))
        )


@dataclass(frozen=True)
class SpectralData:
    """Endpoint parameter and support of the eigenvalue density at one coupling."""

    a2: float
    support: tuple


def spectral_data(g: float) -> SpectralData:
    """Build `SpectralData`, verifying its defining equation and normalization."""
    a2 = a2_raw(g)
    residual = a2 - 3.0 * g * a2 * a2 - 1.0
    if abs(residual) > 1e-12:
        raise SingularityError(f"endpoint equation residual {residual:g} exceeds 1e-12")
    norm = density_moment(g, 0)
    if abs(norm - 1.0) > 1e-9:
        raise SingularityError(f"density normalization {norm!r} deviates from 1")
    a = math.sqrt(a2)
    return SpectralData(a2=a2, support=(-2.0 * a, 2.0 * a))

"""Skeleton calculus for tangles and the flype-equivalence correction.

A connected tangle decomposes uniquely into two-particle-irreducible (2PI)
pieces plugged into the slots of a fully two-particle-reducible skeleton.
Writing ``gamma`` for the renormalized tangle series and ``d`` for the 2PI
tangle series, the two directions of that decomposition are closed forms:

* ``d = gamma (1 - gamma) / (1 + gamma)``
* skeletons over a slot series x:  ``(1 - x - sqrt((1 - x)^2 - 4 x)) / 2``

and the matrix-model solution supplies ``zeta[gamma]``, the series of
nontrivial fully-2PI skeletons (``d = g + zeta``), as an explicit algebraic
expression in ``gamma`` alone.

Modding out flype moves changes only the reducible skeleton layer.  The
corrected skeleton generating function leads to the fixed-point equation

    W(g) = (1/2) [ (1 + g - zeta[W]) - sqrt((1 - g + zeta[W])^2
                                            - 8 zeta[W] - 8 g^2/(1 - g)) ]

whose solution counts flype-equivalence classes of tangles.  This module
computes that series two independent ways — iterating the fixed point on
exact series, and Newton-expanding the branch of a single quintic polynomial
relation obtained by eliminating the radicals with exact resultants — and it
refuses to answer if the two disagree.  The dominant singularity is then
certified algebraically from the discriminant of the quintic and confirmed
numerically by tracking the branch to its fold point.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import sympy as sp

from . import onematrix
from .series import (
    AlgebraicSystem,
    BivariatePoly,
    Series,
    SeriesError,
    div,
    mul,
    newton_solve,
    sqrt_series,
)

__all__ = [
    "BranchMismatchError",
    "SkeletonFunctions",
    "FlypeSingularity",
    "d_of_gamma",
    "gamma_of_d",
    "zeta_of_gamma",
    "skeleton_series",
    "gamma_tilde",
    "flype_quintic",
    "flype_discriminant",
    "flype_singularity",
    "skeleton_functions",
]


class BranchMismatchError(RuntimeError):
    """The series route and the algebraic route disagreed; refuse to answer."""


def d_of_gamma(gamma: Series) -> Series:
    """2PI tangle series from the full tangle series."""
    if gamma.coeffs[0] != 0:
        raise SeriesError("tangle series must have zero constant term")
    return div(mul(gamma, 1 - gamma), 1 + gamma)


def gamma_of_d(d: Series) -> Series:
    """Full tangle series rebuilt from the 2PI series (inverts d_of_gamma)."""
    if d.coeffs[0] != 0:
        raise SeriesError("2PI series must have zero constant term")
    return skeleton_series(d)


def skeleton_series(slot: Series) -> Series:
    """Fully two-particle-reducible skeletons with ``slot`` in every slot.

    For ``slot = g`` this is the Schroeder-type series 1, 2, 6, 22, 90, ...
    """
    if slot.coeffs[0] != 0:
        raise SeriesError("slot series must have zero constant term")
    one = Series.one(slot.order, slot.var)
    rad = mul(1 - slot, 1 - slot) - 4 * slot
    return (one - slot - sqrt_series(rad)) / 2


def zeta_of_gamma(gamma: Series) -> Series:
    """Nontrivial fully-2PI skeletons as a function of the tangle series.

    Exact expansion of
    ``-2/(1+gamma) + 2 - gamma - [1 + 10 gamma - 2 gamma^2
      - (1 - 4 gamma)^{3/2}] / (2 (gamma+2)^3)``;
    the expansion starts at order 5 on the renormalized branch.
    """
    if gamma.coeffs[0] != 0:
        raise SeriesError("tangle series must have zero constant term")
    one = Series.one(gamma.order, gamma.var)
    first = -2 * div(one, 1 + gamma) + 2 - gamma
    one_minus = 1 - 4 * gamma
    radical32 = mul(one_minus, sqrt_series(one_minus))
    numer = 1 + 10 * gamma - 2 * mul(gamma, gamma) - radical32
    denom = (2 + gamma) ** 3
    return first - div(numer, denom) / 2


def _flype_skeleton_map(g: Series, zeta: Series) -> Series:
    """The flype-corrected skeleton generating function of (g, zeta)."""
    one = Series.one(g.order, g.var)
    inner = mul(1 - g + zeta, 1 - g + zeta) - 8 * zeta - 8 * div(mul(g, g), 1 - g)
    return (one + g - zeta - sqrt_series(inner)) / 2


def _gamma_tilde_fixed_point(order: int) -> Series:
    """Solve the flype fixed-point equation by iteration on exact series."""
    g = Series.identity(order)
    w = g
    for _ in range(order + 2):
        w_next = _flype_skeleton_map(g, zeta_of_gamma(w))
        if w_next == w:
            return w
        w = w_next
    raise BranchMismatchError("flype fixed point failed to stabilize")


# ---------------------------------------------------------------------------
# exact elimination to a single polynomial relation
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def _quintic_sympy():
    """Eliminate the radicals from the implicit flype system exactly.

    Returns the sympy polynomial P(g, W) of degree five in W whose branch
    through W(0) = 0 is the flype-class tangle series.  The two radicals are
    removed by one squaring each; the resultant in the auxiliary variable
    (the 2PI slot series value) collapses the system to one polynomial, whose
    spurious factors are discarded by matching the series solution.
    """
    g, W, z = sp.symbols("g W z", rational=True)
    # squaring the corrected-skeleton equation W = (1/2)[(1+g-z) - sqrt(...)]
    e1 = sp.expand(
        (1 - g) * ((1 + g - z - 2 * W) ** 2 - (1 - g + z) ** 2 + 8 * z) + 8 * g**2
    )
    # clearing denominators and the (1-4W)^{3/2} radical from z = zeta[W]
    lhs = sp.expand(
        2 * (1 + W) * (W + 2) ** 3 * z
        + 4 * (W + 2) ** 3
        - 2 * (1 + W) * (2 - W) * (W + 2) ** 3
        + (1 + W) * (1 + 10 * W - 2 * W**2)
    )
    e2 = sp.expand(lhs**2 - (1 + W) ** 2 * (1 - 4 * W) ** 3)
    resultant = sp.resultant(sp.Poly(e1, z), sp.Poly(e2, z))
    series = _gamma_tilde_fixed_point(12)
    quintic = None
    for factor, _mult in sp.factor_list(resultant)[1]:
        poly = sp.Poly(factor, g, W)
        if _vanishes_on_series(poly, series):
            if quintic is not None:
                raise BranchMismatchError("two resultant factors match the series")
            quintic = poly
    if quintic is None or sp.degree(quintic, W) != 5:
        raise BranchMismatchError("no quintic factor matches the series branch")
    # canonical sign: positive leading coefficient in (W, then g) ordering
    if quintic.LC() < 0:
        quintic = -quintic
    return quintic


def _vanishes_on_series(poly: sp.Poly, series: Series) -> bool:
    acc = Series.zero(series.order)
    for (i, j), coeff in poly.terms():
        term = Series.constant(Fraction(int(sp.numer(coeff)), int(sp.denom(coeff))),
                               series.order)
        term = mul(term, series**j)
        acc = acc + term.shift_up(i).truncate(series.order)
    return acc.is_zero()


def _sympy_poly_to_bivariate(poly: sp.Poly) -> BivariatePoly:
    terms = {}
    for (i, j), coeff in poly.terms():
        terms[(i, j)] = Fraction(int(sp.numer(coeff)), int(sp.denom(coeff)))
    return BivariatePoly.from_dict(terms)


def flype_quintic() -> BivariatePoly:
    """The eliminated degree-five relation P(g, W) = 0 for flype classes."""
    return _sympy_poly_to_bivariate(_quintic_sympy())


def gamma_tilde(order: int) -> Series:
    """Series counting flype-equivalence classes of tangles: 1, 2, 4, 10, 29, ...

    Computed independently by fixed-point iteration and by Newton expansion
    of the eliminated quintic; a mismatch raises `BranchMismatchError`.
    """
    if order < 1:
        raise SeriesError("order must be at least 1")
    by_iteration = _gamma_tilde_fixed_point(order)
    system = AlgebraicSystem(flype_quintic(), Fraction(0))
    by_quintic = newton_solve(system, order)
    if by_iteration != by_quintic:
        raise BranchMismatchError(
            "fixed-point series and quintic branch disagree; wrong branch selected"
        )
    return by_iteration


@dataclass(frozen=True)
class SkeletonFunctions:
    """The four series of the skeleton calculus at a common order."""

    gamma: Series        # renormalized tangles
    d_2pi: Series        # 2PI tangles
    zeta: Series         # nontrivial fully-2PI skeletons, d = g + zeta
    gamma_tilde: Series  # flype-equivalence classes of tangles


def skeleton_functions(order: int) -> SkeletonFunctions:
    gamma = onematrix.gamma_reduced_series(order)
    return SkeletonFunctions(
        gamma=gamma,
        d_2pi=d_of_gamma(gamma),
        zeta=zeta_of_gamma(gamma),
        gamma_tilde=gamma_tilde(order),
    )


# ---------------------------------------------------------------------------
# the dominant singularity
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FlypeSingularity:
    """Exact and numeric location of the flype-class singularity."""

    minimal_polynomial: tuple   # integer coefficients, ascending, root = g_c
    g_critical: float
    growth: float               # 1/g_c
    fold_numeric: float         # from tracking the quintic branch to its fold
    agreement: float            # |g_critical - fold_numeric|


@lru_cache(maxsize=None)
def flype_discriminant() -> tuple:
    """Discriminant (in W) of the flype quintic, as integer coefficients in g."""
    g = sp.Symbol("g", rational=True)
    disc = sp.expand(sp.discriminant(_quintic_sympy().as_expr(), sp.Symbol("W", rational=True)))
    poly = sp.Poly(disc, g)
    return tuple(int(c) for c in reversed(poly.all_coeffs()))


def _smallest_positive_root():
    """Exact smallest positive root of the discriminant (sympy CRootOf/rationals)."""
    g = sp.Symbol("g")
    coeffs = flype_discriminant()
    poly = sp.Poly(sum(c * g**i for i, c in enumerate(coeffs)), g)
    roots = [r for r in sp.real_roots(poly) if r.is_positive]
    if not roots:
        raise BranchMismatchError("discriminant has no positive real root")
    smallest = min(roots, key=lambda r: sp.nsimplify(r.evalf(40)))
    # identify the irreducible factor carrying this root
    for factor, _mult in sp.factor_list(poly.as_expr())[1]:
        fpoly = sp.Poly(factor, g)
        if fpoly.degree() >= 1 and sp.simplify(fpoly.as_expr().subs(g, smallest)) == 0:
            minpoly = tuple(int(c) for c in reversed(fpoly.all_coeffs()))
            return smallest, minpoly
    raise BranchMismatchError("smallest positive root matches no factor")


def _fold_by_tracking(bipoly: BivariatePoly, seed_series: Series) -> float:
    """Follow the counting branch of P(g, W) = 0 to its singularity, in floats.

    The radius-limiting point is where the W-derivative of the relation
    vanishes along the branch, i.e. where the branch collides with another
    root of P(g, .).  Here the collision is threefold and pinches a real
    pair into the complex plane, so the stable detector is the moment the
    pair leaves the real axis: the squared imaginary part grows linearly in
    g past the collision, and bisection plus one linear extrapolation pins
    the collision point far below the requested tolerance.
    """
    import numpy as np

    deg_w = bipoly.degree_y()
    by_j: dict = {}
    for (i, j), c in bipoly.terms:
        by_j.setdefault(j, []).append((i, float(c)))

    def roots_at(gv: float):
        coeffs = [
            sum(c * gv**i for i, c in by_j.get(j, ()))
            for j in range(deg_w, -1, -1)
        ]
        return np.roots(coeffs)

    def branch_value(gv: float) -> float:
        return float(sum(float(c) * gv**k for k, c in enumerate(seed_series.coeffs)))

    # track the counting branch to the edge of the series' safe zone and
    # make sure it belongs to the root cluster that is about to collide
    g_safe = 0.12
    w_track = branch_value(g_safe)
    cluster_center = min(roots_at(g_safe), key=lambda r: abs(r - w_track))
    if abs(cluster_center - w_track) > 1e-3:
        raise BranchMismatchError("lost the counting branch during tracking")

    # the pair splits off the real axis like (g - g_fold)^{3/2}, far too flat
    # for double precision; 200-bit roots make the departure unambiguous
    from mpmath import mp, mpf

    mp.prec = 200
    exact_by_j: dict = {}
    for (i, j), c in bipoly.terms:
        exact_by_j.setdefault(j, []).append((i, c))

    def max_imag(gv) -> float:
        coeffs = []
        for j in range(deg_w, -1, -1):
            acc = mpf(0)
            for i, c in exact_by_j.get(j, ()):
                acc += mpf(c.numerator) / mpf(c.denominator) * gv**i
            coeffs.append(acc)
        rr = mp.polyroots(coeffs, maxsteps=300, extraprec=200)
        near = [r for r in rr if abs(r - mpf(1) / 4) < mpf("0.2")]
        if not near:
            raise BranchMismatchError("root cluster disappeared during tracking")
        return max(abs(mp.im(r)) for r in near)

    im_tol = mpf("1e-18")
    lo = mpf(g_safe)
    hi = None
    g_scan = lo
    for _ in range(200):
        g_scan = g_scan + mpf("0.005")
        if max_imag(g_scan) > im_tol:
            hi = g_scan
            break
        lo = g_scan
    if hi is None:
        raise BranchMismatchError("no branch collision found while tracking")
    while hi - lo > mpf("1e-13"):
        mid = (lo + hi) / 2
        if max_imag(mid) > im_tol:
            hi = mid
        else:
            lo = mid
    return float((lo + hi) / 2)


def flype_singularity(tolerance: float = 1e-10) -> FlypeSingularity:
    """Locate the flype-class singularity exactly and numerically.

    The exact value is the smallest positive root of the discriminant of the
    eliminated quintic; the numeric value tracks the counting branch of the
    quintic to the fold where its W-derivative vanishes.  A disagreement
    beyond ``tolerance`` raises `BranchMismatchError`.
    """
    root, minpoly = _smallest_positive_root()
    g_exact = float(root.evalf(30))
    fold = _fold_by_tracking(flype_quintic(), _gamma_tilde_fixed_point(10))
    agreement = abs(g_exact - fold)
    if agreement > tolerance:
        raise BranchMismatchError(
            f"exact discriminant root {g_exact!r} and numeric fold {fold!r} "
            f"differ by {agreement:g}"
        )
    return FlypeSingularity(
        minimal_polynomial=minpoly,
        g_critical=g_exact,
        growth=1.0 / g_exact,
        fold_numeric=fold,
        agreement=agreement,
    )

"""Exact series arithmetic: ring laws, composition, reversion, radicals, branches."""

import random
from fractions import Fraction

import pytest

from linkcensus.series import (
    AlgebraicSystem,
    BivariatePoly,
    Series,
    SeriesError,
    add,
    compose,
    derivative,
    div,
    integrate,
    log_series,
    mul,
    newton_solve,
    reversion,
    sqrt_series,
)

F = Fraction


def S(*coeffs):
    return Series.from_coeffs(coeffs)


def rand_series(rng, order, unit=False, zero_constant=False):
    coeffs = [F(rng.randint(-4, 4), rng.randint(1, 4)) for _ in range(order + 1)]
    if unit:
        coeffs[0] = F(rng.choice([1, -1, 2]))
    if zero_constant:
        coeffs[0] = F(0)
        coeffs[1] = F(rng.choice([1, -1, 2, -2]))
    return Series.from_coeffs(coeffs)


# -- ring arithmetic ---------------------------------------------------------


def test_polynomial_product():
    a = Series.from_coeffs([1, 1], 2)
    b = Series.from_coeffs([1, -1], 2)
    assert mul(a, b) == S(1, 0, -1)


def test_geometric_inverse():
    geo = div(Series.one(6), S(1, -1, 0, 0, 0, 0, 0))
    assert geo == Series.from_coeffs([1] * 7)


def test_long_division():
    q = div(S(1, 2, 9), S(1, 1, 0))
    assert q == S(1, 1, 8)


def test_truncation_to_smaller_order():
    a = Series.from_coeffs([1, 2, 3], 5)
    b = Series.from_coeffs([1, 1], 2)
    assert (a + b).order == 2
    assert mul(a, b).order == 2


def test_division_by_nonunit_rejected():
    with pytest.raises(SeriesError, match="zero constant term"):
        div(Series.one(3), Series.identity(3))


def test_ring_axioms_on_random_series():
    rng = random.Random(20260808)
    for _ in range(40):
        order = rng.randint(2, 12)
        a, b, c = (rand_series(rng, order) for _ in range(3))
        assert add(a, b) == add(b, a)
        assert mul(a, b) == mul(b, a)
        assert mul(a, add(b, c)) == add(mul(a, b), mul(a, c))
        assert mul(mul(a, b), c) == mul(a, mul(b, c))


def test_div_mul_round_trip():
    rng = random.Random(7)
    for _ in range(25):
        order = rng.randint(1, 10)
        a = rand_series(rng, order)
        b = rand_series(rng, order, unit=True)
        assert mul(div(a, b), b) == a


# -- composition and reversion ------------------------------------------------


def test_compose_identity_inner():
    outer = S(0, 1, 1)
    assert compose(outer, Series.identity(2)) == outer


def test_compose_substitution():
    outer = Series.from_coeffs([1, 1, 1], 2)  # 1/(1-y) truncated
    inner = Series.from_coeffs([0, 0, 1], 4)  # g^2
    assert compose(outer, inner) == Series.from_coeffs([1, 0, 1, 0, 1], 4)


def test_compose_requires_zero_constant():
    with pytest.raises(SeriesError, match="zero constant"):
        compose(Series.one(3), Series.one(3))


def test_reversion_identity():
    assert reversion(Series.identity(5)) == Series.identity(5)


def test_reversion_catalan():
    # inverse of g - g^2 starts the Catalan numbers
    r = reversion(S(0, 1, -1, 0, 0))
    assert r == S(0, 1, 1, 2, 5)


def test_reversion_round_trip_fixed():
    s = Series.from_coeffs([0, 1, 3, 1], 6)
    assert compose(s, reversion(s)) == Series.identity(6)


def test_reversion_round_trips_random():
    rng = random.Random(99)
    for _ in range(20):
        order = rng.randint(2, 12)
        s = rand_series(rng, order, zero_constant=True)
        r = reversion(s)
        assert compose(s, r) == Series.identity(order)
        assert compose(r, s) == Series.identity(order)
        assert reversion(r) == s


def test_reversion_preconditions():
    with pytest.raises(SeriesError):
        reversion(S(1, 1))
    with pytest.raises(SeriesError):
        reversion(S(0, 0, 1))


# -- radicals and transcendental helpers --------------------------------------


def test_sqrt_binomial():
    s = sqrt_series(Series.from_coeffs([1, -12], 3))
    assert s == S(1, -6, -18, -108)


def test_sqrt_of_one():
    assert sqrt_series(Series.one(4)) == Series.one(4)


def test_sqrt_squares_back():
    s = S(1, 1, 1)
    r = sqrt_series(s)
    assert mul(r, r) == s


def test_sqrt_random_round_trip():
    rng = random.Random(5)
    for _ in range(20):
        order = rng.randint(1, 12)
        s = rand_series(rng, order)
        sq = mul(s, s)
        if sq.coeffs[0] == 0:
            continue
        r = sqrt_series(sq)
        assert mul(r, r) == sq


def test_sqrt_rejects_non_square():
    with pytest.raises(SeriesError, match="square"):
        sqrt_series(S(2, 1))
    with pytest.raises(SeriesError):
        sqrt_series(S(0, 1))


def test_log_and_derivative():
    # log(1/(1-g)) = g + g^2/2 + g^3/3 + ...
    geo = div(Series.one(5), S(1, -1, 0, 0, 0, 0))
    lg = log_series(geo)
    assert lg == Series.from_coeffs([0, 1, F(1, 2), F(1, 3), F(1, 4), F(1, 5)])
    assert derivative(integrate(geo)) == geo


# -- algebraic branches --------------------------------------------------------


def test_newton_square_root_branch():
    system = AlgebraicSystem(
        BivariatePoly.from_dict({(0, 2): 1, (0, 0): -1, (1, 0): -1}), F(1)
    )  # y^2 = 1 + g
    sol = newton_solve(system, 2)
    assert sol == S(1, F(1, 2), F(-1, 8))
    assert sol == sqrt_series(S(1, 1, 0))


def test_newton_catalan_shift():
    # y = g (1 + y)^2
    system = AlgebraicSystem(
        BivariatePoly.from_dict({(0, 1): 1, (1, 0): -1, (1, 1): -2, (1, 2): -1}), F(0)
    )
    assert newton_solve(system, 3) == S(0, 1, 2, 5)


def test_newton_residual_is_checked():
    system = AlgebraicSystem(
        BivariatePoly.from_dict({(0, 3): 1, (0, 2): -9, (0, 1): 24, (0, 0): -16, (1, 0): -27}),
        F(1),
    )
    sol = newton_solve(system, 8)
    assert system.relation.eval_series(sol).is_zero()
    assert sol.coeffs[:5] == (F(1), F(3), F(6), F(21), F(90))


def test_singular_jacobian_is_refused():
    with pytest.raises(SeriesError, match="dP/dy"):
        AlgebraicSystem(BivariatePoly.from_dict({(0, 2): 1, (1, 0): -1}), F(0))


def test_branch_point_must_lie_on_curve():
    with pytest.raises(SeriesError, match="branch point"):
        AlgebraicSystem(BivariatePoly.from_dict({(0, 1): 1, (0, 0): -1}), F(0))


# -- JSON interface ------------------------------------------------------------


def test_json_schema_and_round_trip():
    s = Series.from_coeffs([F(1), F(1, 2), F(-3, 7)], var="g")
    data = s.to_json_dict()
    assert data == {"var": "g", "order": 2, "coeffs": ["1", "1/2", "-3/7"]}
    assert Series.from_json(s.to_json()) == s


def test_json_integer_rendering():
    assert Series.from_coeffs([2, 4]).to_json_dict()["coeffs"] == ["2", "4"]


def test_coefficients_beyond_order_are_refused():
    s = S(1, 2)
    with pytest.raises(SeriesError):
        s[5]

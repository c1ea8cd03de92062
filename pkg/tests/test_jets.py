"""Truncated series, coordinate changes and exterior calculus."""

import random

import pytest
import sympy as sp
from gmpy2 import mpq
from hypothesis import given, settings
from hypothesis import strategies as st

from poisson3.errors import ConfigurationError, DegreeOverflowError, NonInvertibleChangeError
from poisson3.generators import random_change
from poisson3.jets import (CoordinateChange, DifferentialObject, TruncatedSeries,
                           exterior_derivative, function, invert_change, substitute, wedge)

from conftest import EPS, X, Y, Z, from_sympy, to_sympy, truncate_sympy

x, y, z, eps = TruncatedSeries.variables(6, 2)


# -- arithmetic ---------------------------------------------------------------------------

def test_monomial_product():
    assert x * y == TruncatedSeries.monomial((1, 1, 0, 0))


def test_product_beyond_degree_is_dropped():
    assert (x ** 6) * x == TruncatedSeries.zero()


def test_exact_rational_addition():
    assert x.scale(mpq(1, 2)) + x.scale(mpq(1, 3)) == x.scale(mpq(5, 6))


def test_eps_counts_in_the_weighted_degree():
    assert (x ** 5) * eps != TruncatedSeries.zero()
    assert (x ** 5) * eps * eps == TruncatedSeries.zero()
    assert eps ** 3 == TruncatedSeries.zero()


def test_mismatched_truncation_is_a_configuration_error():
    with pytest.raises(ConfigurationError):
        x + TruncatedSeries.var("x", 5, 2)


def test_partial_derivatives():
    assert (x * x * y).partial("x") == (x * y).scale(2)
    assert TruncatedSeries.constant(7).partial("z").is_zero()
    assert (x * x + y * y).partial("y") == y.scale(2)
    assert (x * x - y * y).partial("y") == y.scale(-2)


def test_serialization_round_trip_is_exact():
    s = (x * y).scale(mpq(1, 3)) - eps * z + x ** 4
    assert TruncatedSeries.from_records(s.to_records()) == s
    assert {"powers": [1, 1, 0, 0], "coeff": "1/3"} in s.to_records()
    # canonical order does not depend on insertion order
    shuffled = TruncatedSeries.from_records(list(reversed(s.to_records())))
    assert shuffled.to_records() == s.to_records()


def test_records_reject_degree_overflow():
    with pytest.raises(DegreeOverflowError):
        TruncatedSeries.from_records([{"powers": [9, 0, 0, 0], "coeff": "1"}])


def test_records_reject_bad_rational():
    with pytest.raises(ValueError):
        TruncatedSeries.from_records([{"powers": [1, 0, 0, 0], "coeff": "one"}])


# -- substitution and inversion ---------------------------------------------------------

def test_substitute_identity():
    assert substitute(x, CoordinateChange.identity()) == x


def test_substitute_shear():
    ch = CoordinateChange((x + y, y, z))
    assert substitute(x * x, ch) == x * x + (x * y).scale(2) + y * y


def test_substitute_swap():
    ch = CoordinateChange((y, x, z))
    assert substitute(x * y, ch) == x * y


def test_singular_change_is_rejected():
    with pytest.raises(NonInvertibleChangeError):
        CoordinateChange((x + y, x + y, z))


def test_invert_identity():
    assert invert_change(CoordinateChange.identity()).is_identity()


def test_invert_scaling():
    inv = invert_change(CoordinateChange((x.scale(2), y, z)))
    assert inv.images == (x.scale(mpq(1, 2)), y, z)


def test_invert_quadratic_shear():
    ch = CoordinateChange((x + y * y, y, z))
    inv = invert_change(ch)
    assert inv.images == (x - y * y, y, z)
    assert ch.then(inv).is_identity() and inv.then(ch).is_identity()


def test_invert_change_both_compositions_on_random_changes():
    rng = random.Random(7)
    for _ in range(50):
        ch = random_change(rng)
        inv = invert_change(ch)
        assert ch.then(inv).is_identity()
        assert inv.then(ch).is_identity()


def test_substitution_agrees_with_sympy():
    rng = random.Random(3)
    for _ in range(5):
        ch = random_change(rng)
        s = x * y - (z ** 2).scale(mpq(3, 2)) + eps * x + x ** 3
        images = [to_sympy(im) for im in ch.images]
        expect = to_sympy(s).subs({X: images[0], Y: images[1], Z: images[2]}, simultaneous=True)
        assert to_sympy(substitute(s, ch)) == truncate_sympy(expect, 6)


# -- ring laws (property) -----------------------------------------------------------------

_coeff = st.fractions(min_value=-5, max_value=5, max_denominator=4)
_powers = st.tuples(st.integers(0, 3), st.integers(0, 3), st.integers(0, 3), st.integers(0, 2))


@st.composite
def series(draw, D=6, E=2):
    terms = draw(st.dictionaries(_powers, _coeff, max_size=5))
    return TruncatedSeries({p: c for p, c in terms.items() if sum(p) <= D and p[3] <= E}, D, E)


@settings(max_examples=60, deadline=None)
@given(series(), series(), series())
def test_ring_laws(a, b, c):
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a * b == b * a
    assert a - a == TruncatedSeries.zero()


@settings(max_examples=40, deadline=None)
@given(series(), series())
def test_product_matches_sympy(a, b):
    assert to_sympy(a * b) == truncate_sympy(to_sympy(a) * to_sympy(b), 6)


@settings(max_examples=25, deadline=None)
@given(series(), series(), st.integers(0, 10_000))
def test_substitution_is_a_ring_morphism(a, b, seed):
    ch = random_change(random.Random(seed))
    assert substitute(a * b, ch) == substitute(a, ch) * substitute(b, ch)
    assert substitute(a + b, ch) == substitute(a, ch) + substitute(b, ch)


@settings(max_examples=25, deadline=None)
@given(series(D=8, E=3), series(D=8, E=3), series(D=8, E=3))
def test_ring_laws_at_larger_truncation(a, b, c):
    assert (a * b) * c == a * (b * c)
    assert (a + b) * c == a * c + b * c


def test_reading_sympy_back():
    assert from_sympy(X * Y + EPS * Z) == x * y + eps * z


# -- exterior calculus ----------------------------------------------------------------------

def one_form(a, b, c):
    return DifferentialObject("1-form", (a, b, c))


def test_d_of_coordinate():
    assert exterior_derivative(function(x)).components == (TruncatedSeries.constant(1),
                                                          TruncatedSeries.zero(),
                                                          TruncatedSeries.zero())


def test_d_of_exact_form_vanishes():
    assert exterior_derivative(one_form(y, x, TruncatedSeries.zero())).is_zero()


def test_d_of_z_dx():
    # d(z dx) = dz ^ dx, the second basis 2-form
    dw = exterior_derivative(one_form(z, TruncatedSeries.zero(), TruncatedSeries.zero()))
    assert dw.components == (TruncatedSeries.zero(), TruncatedSeries.constant(1),
                             TruncatedSeries.zero())


def test_d_of_three_form_is_an_error():
    with pytest.raises(ValueError):
        exterior_derivative(DifferentialObject("3-form", (x,)))


def test_wedge_basics():
    one, zero = TruncatedSeries.constant(1), TruncatedSeries.zero()
    dx, dy = one_form(one, zero, zero), one_form(zero, one, zero)
    assert wedge(dx, dy).components == (zero, zero, one)
    assert wedge(dx, dx).is_zero()
    dydx = wedge(dy, dx)
    assert wedge(one_form(y, x, zero), dydx).is_zero()


def test_wedge_degree_overflow():
    two = DifferentialObject("2-form", (x, y, z))
    with pytest.raises(ValueError):
        wedge(two, two)


@settings(max_examples=30, deadline=None)
@given(series(), series(), series(), series())
def test_d_squared_is_zero(f, a, b, c):
    assert exterior_derivative(exterior_derivative(function(f))).is_zero()
    assert exterior_derivative(exterior_derivative(one_form(a, b, c))).is_zero()


@settings(max_examples=30, deadline=None)
@given(series(), series(), series(), series(), series(), series())
def test_wedge_graded_commutativity(a1, a2, a3, b1, b2, b3):
    a, b = one_form(a1, a2, a3), one_form(b1, b2, b3)
    assert wedge(a, b) == wedge(b, a).scale(-1)
    two = DifferentialObject("2-form", (b1, b2, b3))
    assert wedge(a, two) == wedge(two, a)


def test_sympy_oracle_for_d():
    f = x * x * y + eps * z ** 3
    d = exterior_derivative(function(f)).components
    expr = to_sympy(f)
    assert [to_sympy(c) for c in d] == [truncate_sympy(sp.diff(expr, v), 6) for v in (X, Y, Z)]

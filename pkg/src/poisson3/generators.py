"""Random exact families and coordinate changes for tests and demos."""

from __future__ import annotations

import random
from fractions import Fraction

from .jets import DEFAULT_D, DEFAULT_E, CoordinateChange, TruncatedSeries
from .poisson import PoissonFamily, from_fg, from_planar


def small_rational(rng: random.Random, bound: int = 3) -> Fraction:
    num = rng.randint(-bound, bound)
    den = rng.choice((1, 1, 1, 2, 3))
    return Fraction(num, den)


def nonzero_rational(rng: random.Random, bound: int = 3) -> Fraction:
    while True:
        q = small_rational(rng, bound)
        if q:
            return q


def random_poly(rng, variables, degrees, D=DEFAULT_D, E=DEFAULT_E, terms=4, eps_max=1,
                nonzero=False):
    """Sparse random polynomial in the given variable indices.

    ``degrees`` is the allowed range of total degree in those variables; each
    term may also carry eps^l with l <= eps_max.
    """
    lo, hi = degrees
    coeffs = {}
    for _ in range(terms):
        deg = rng.randint(lo, hi)
        powers = [0, 0, 0, 0]
        for _ in range(deg):
            powers[rng.choice(variables)] += 1
        powers[3] = rng.randint(0, eps_max)
        q = nonzero_rational(rng) if nonzero else small_rational(rng)
        coeffs[tuple(powers)] = coeffs.get(tuple(powers), 0) + q
    return TruncatedSeries(coeffs, D, E)


def random_change(rng: random.Random, D=DEFAULT_D, E=DEFAULT_E, nonlinear_terms=2,
                  eps_terms=True) -> CoordinateChange:
    """Invertible linear part plus a few sparse quadratic and cubic terms."""
    xs = TruncatedSeries.variables(D, E)
    while True:
        m = [[rng.randint(-1, 1) for _ in range(3)] for _ in range(3)]
        det = (m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
               - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
               + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]))
        if det != 0:
            break
    images = []
    for row in m:
        im = sum((xs[j].scale(c) for j, c in enumerate(row) if c), TruncatedSeries.zero(D, E))
        im = im + random_poly(rng, (0, 1, 2), (2, 3), D, E, terms=nonlinear_terms, eps_max=0)
        if eps_terms:
            im = im + random_poly(rng, (0, 1, 2), (1, 1), D, E, terms=1, eps_max=0) * xs[3]
        images.append(im)
    return CoordinateChange(tuple(images), "random")


def random_fg_family(rng: random.Random, D=DEFAULT_D, E=DEFAULT_E, kind=None) -> PoissonFamily:
    """from_fg with df ^ dg = 0 by construction.

    kind 'g_zero': g = 0; 'g_of_f': g = c1 f + c2 f^2; 'common': f, g both functions
    of one h.
    """
    kind = kind or rng.choice(("g_zero", "g_of_f", "common"))
    quad = random_poly(rng, (0, 1), (2, 2), D, E, terms=3, eps_max=0)
    f = quad + random_poly(rng, (0, 1), (1, 4), D, E, terms=3)
    f = f.select(lambda p: p[0] + p[1] >= 2 or (p[0] + p[1] == 1 and p[3] >= 1))
    zero = TruncatedSeries.zero(D, E)
    if kind == "g_zero":
        g = zero
    elif kind == "g_of_f":
        g = f.scale(small_rational(rng)) + (f * f).scale(small_rational(rng))
    else:
        h = random_poly(rng, (0, 1), (1, 2), D, E, terms=3)
        # linear terms only with an eps factor, so that P vanishes at the origin
        h = h.select(lambda p: p[0] + p[1] >= 2 or (p[0] + p[1] == 1 and p[3] >= 1))
        h = h + quad
        f = h.scale(small_rational(rng)) + (h * h).scale(small_rational(rng))
        g = h.scale(small_rational(rng)) + (h * h * h).scale(small_rational(rng))
    return from_fg(f, g)


def random_planar_family(rng: random.Random, D=DEFAULT_D, E=DEFAULT_E) -> PoissonFamily:
    """d/dy ^ v with v(0) = 0 at eps = 0 and nonzero divergence at 0."""
    xs = TruncatedSeries.variables(D, E)
    x, z, eps = xs[0], xs[2], xs[3]
    while True:
        m = [[small_rational(rng) for _ in range(2)] for _ in range(2)]
        if m[0][0] + m[1][1] != 0:
            break
    alpha = x.scale(m[0][0]) + z.scale(m[0][1])
    beta = x.scale(m[1][0]) + z.scale(m[1][1])
    alpha = alpha + random_poly(rng, (0, 2), (2, 4), D, E, terms=3)
    beta = beta + random_poly(rng, (0, 2), (2, 4), D, E, terms=3)
    alpha = alpha + eps.scale(small_rational(rng))
    return from_planar(alpha, beta)


def random_family(rng: random.Random, D=DEFAULT_D, E=DEFAULT_E) -> PoissonFamily:
    if rng.random() < 0.6:
        return random_fg_family(rng, D, E)
    return random_planar_family(rng, D, E)


def random_a_family(rng: random.Random, sign: int = 1, m: int = 2, D=DEFAULT_D,
                    E=DEFAULT_E) -> PoissonFamily:
    """A germ with f R-equivalent to sign x^2 + y^(m+1) and g a function of f.

    Higher terms are x^2 r(x, y) with r(0) = 0 and y^(m+2) s(y), which keep
    the type; the unfolding adds eps y.
    """
    xs = TruncatedSeries.variables(D, E)
    x, y, eps = xs[0], xs[1], xs[3]
    a = Fraction(sign * rng.randint(1, 3), rng.choice((1, 2)))
    b = nonzero_rational(rng)
    r = random_poly(rng, (0, 1), (1, 2), D, E, terms=2, eps_max=0)
    s = random_poly(rng, (1,), (0, 1), D, E, terms=1, eps_max=0)
    f = (x * x) * (TruncatedSeries.constant(a, D, E) + r) + y ** (m + 1) * (
        TruncatedSeries.constant(b, D, E) + y * s)
    f = f + (eps * y).scale(nonzero_rational(rng))
    g = f.scale(small_rational(rng)) + (f * f).scale(small_rational(rng))
    return from_fg(f, g)


def random_n_family(rng: random.Random, sign: int = 1, D=DEFAULT_D, E=DEFAULT_E) -> PoissonFamily:
    """N germ: f and g functions of a nondegenerate quadratic q of signature given by sign."""
    xs = TruncatedSeries.variables(D, E)
    x, y, eps = xs[0], xs[1], xs[3]
    while True:
        m = [[rng.randint(-2, 2) for _ in range(2)] for _ in range(2)]
        if m[0][0] * m[1][1] - m[0][1] * m[1][0]:
            break
    u = x.scale(m[0][0]) + y.scale(m[0][1])
    v = x.scale(m[1][0]) + y.scale(m[1][1])
    q = u * u + (v * v).scale(sign)
    f = (eps * q).scale(nonzero_rational(rng)) + (q * q).scale(nonzero_rational(rng))
    f = f + (q * q * q).scale(small_rational(rng))
    g = q.scale(nonzero_rational(rng)) + (q * q).scale(small_rational(rng))
    return from_fg(f, g)


def random_definite_family(rng: random.Random, sign: int = 1, D=DEFAULT_D,
                           E=DEFAULT_E) -> PoissonFamily:
    """so3 (sign = 1) or sl2 (sign = -1) germ: f with a definite or indefinite quadratic part."""
    xs = TruncatedSeries.variables(D, E)
    x, y = xs[0], xs[1]
    a, c = rng.randint(1, 3), rng.randint(1, 3)
    b = rng.randint(-1, 1)
    quad = (x * x).scale(a) + (x * y).scale(b) + (y * y).scale(sign * c)
    f = quad + random_poly(rng, (0, 1), (3, 4), D, E, terms=2)
    g = f.scale(small_rational(rng))
    return from_fg(f, g)

"""Exact small-matrix helpers on top of sympy, working with gmpy2 rationals."""

from __future__ import annotations

import sympy
from gmpy2 import mpq


def to_sympy(q) -> sympy.Rational:
    q = mpq(q)
    return sympy.Rational(int(q.numerator), int(q.denominator))


def from_sympy(r) -> mpq:
    r = sympy.Rational(r)
    return mpq(int(r.p), int(r.q))


def matrix(rows) -> sympy.Matrix:
    return sympy.Matrix([[to_sympy(v) for v in row] for row in rows])


def nullspace(rows) -> list[list[mpq]]:
    """Basis of the right kernel, each vector as a list of rationals."""
    m = matrix(rows)
    return [[from_sympy(v) for v in vec] for vec in m.nullspace()]


def rank(rows) -> int:
    if not rows or not rows[0]:
        return 0
    return matrix(rows).rank()


def solve(rows, rhs) -> list[mpq] | None:
    """A solution of rows @ u = rhs, or None when the system is inconsistent."""
    m = matrix(rows)
    b = sympy.Matrix([to_sympy(v) for v in rhs])
    try:
        sol, params = m.gauss_jordan_solve(b)
    except ValueError:
        return None
    sol = sol.subs({p: 0 for p in params})
    return [from_sympy(v) for v in sol]


def det(rows) -> mpq:
    return from_sympy(matrix(rows).det())


def is_positive_definite(rows) -> bool:
    """Sylvester's criterion on a symmetric rational matrix."""
    m = matrix(rows)
    return all(m[:k, :k].det() > 0 for k in range(1, m.rows + 1))


def is_square(q) -> bool:
    """True when the non-negative rational q is the square of a rational."""
    q = mpq(q)
    if q < 0:
        return False
    import gmpy2
    return gmpy2.is_square(q.numerator) and gmpy2.is_square(q.denominator)


def rational_sqrt(q) -> mpq:
    import gmpy2
    q = mpq(q)
    return mpq(gmpy2.isqrt(q.numerator), gmpy2.isqrt(q.denominator))

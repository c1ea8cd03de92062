"""Shared helpers: sympy converters used as independent oracles, and model families."""

from __future__ import annotations

import sympy as sp
from gmpy2 import mpq

from poisson3.jets import TruncatedSeries
from poisson3.poisson import PoissonFamily, from_fg, from_planar

X, Y, Z, EPS = sp.symbols("x y z eps")
SYMS = (X, Y, Z, EPS)


def to_sympy(s: TruncatedSeries) -> sp.Expr:
    out = sp.Integer(0)
    for p, v in s.items():
        out += sp.Rational(int(v.numerator), int(v.denominator)) * X**p[0] * Y**p[1] * Z**p[2] * EPS**p[3]
    return sp.expand(out)


def from_sympy(expr, D=6, E=2) -> TruncatedSeries:
    poly = sp.Poly(sp.expand(expr), *SYMS)
    coeffs = {}
    for powers, c in poly.terms():
        if sum(powers) <= D and powers[3] <= E:
            coeffs[powers] = mpq(int(c.p), int(c.q))
    return TruncatedSeries(coeffs, D, E)


def truncate_sympy(expr, cap: int, E: int = 2) -> sp.Expr:
    """Keep the monomials of weighted degree <= cap and eps-order <= E."""
    if expr == 0:
        return sp.Integer(0)
    poly = sp.Poly(sp.expand(expr), *SYMS)
    return sp.expand(sum((c * X**p[0] * Y**p[1] * Z**p[2] * EPS**p[3]
                          for p, c in poly.terms() if sum(p) <= cap and p[3] <= E),
                         sp.Integer(0)))


def jacobiator_oracle(P: PoissonFamily) -> sp.Expr:
    """{x,{y,z}} + {y,{z,x}} + {z,{x,y}} from the bracket matrix, by sympy."""
    b = {("x", "y"): to_sympy(P.bxy), ("y", "z"): to_sympy(P.byz), ("z", "x"): to_sympy(P.bzx)}
    names = ("x", "y", "z")
    sym = dict(zip(names, (X, Y, Z)))

    def br(i, j):
        if i == j:
            return sp.Integer(0)
        if (i, j) in b:
            return b[(i, j)]
        return -b[(j, i)]

    def bracket_fn(f, g):
        return sum(sp.diff(f, sym[i]) * sp.diff(g, sym[j]) * br(i, j)
                   for i in names for j in names)

    return sp.expand(bracket_fn(X, b[("y", "z")]) + bracket_fn(Y, b[("z", "x")])
                     + bracket_fn(Z, b[("x", "y")]))


def variables(D=6, E=2):
    return TruncatedSeries.variables(D, E)


# -- model families ----------------------------------------------------------------------

def a_model(sign: int = 1, D=6, E=2) -> PoissonFamily:
    """sign x^2/2 + y^3/3 - eps y with g = 0: so3 + sl2 (sign +) or two sl2 (sign -) for eps > 0."""
    x, y, z, e = variables(D, E)
    f = (x * x).scale(mpq(sign, 2)) + (y ** 3).scale(mpq(1, 3)) - e * y
    return from_fg(f, TruncatedSeries.zero(D, E))


def n_model(lam0: int = 1, mu1=mpq(1), sign: int = 1, mu0p: int = -1, D=6, E=2) -> PoissonFamily:
    """g = lam0 q / 2 with q = x^2 + sign y^2 and C = mu0' eps + mu1 q, so that
    f = int C dg = lam0 (mu0' eps q / 2 + mu1 q^2 / 4)."""
    x, y, z, e = variables(D, E)
    q = x * x + (y * y).scale(sign)
    g = q.scale(mpq(lam0, 2))
    f = ((e * q).scale(mpq(mu0p, 2)) + (q * q).scale(mpq(mu1) / 4)).scale(lam0)
    return from_fg(f, g)


def saddle_node_model(D=6, E=2) -> PoissonFamily:
    """d/dy ^ ((x^2 - eps) d/dx + z d/dz)."""
    x, y, z, e = variables(D, E)
    return from_planar(x * x - e, z)


def radial(D=6, E=2) -> PoissonFamily:
    """{x,y} = 0, {y,z} = y, {z,x} = -x."""
    x, y, z, e = variables(D, E)
    return PoissonFamily(TruncatedSeries.zero(D, E), y, -x, True)


def so3(D=6, E=2) -> PoissonFamily:
    x, y, z, e = variables(D, E)
    return PoissonFamily(z, x, y, True)


# -- acceptance report -----------------------------------------------------------------

_ACCEPTANCE_LINES: list[str] = []


def report_criterion(number: int, title: str, ok: bool, detail: str) -> None:
    """Record and print one PASS/FAIL line for an acceptance criterion."""
    line = f"criterion {number} [{'PASS' if ok else 'FAIL'}] {title}: {detail}"
    _ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE_LINES, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)

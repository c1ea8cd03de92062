"""A singularities: Casimir functions and the versal normal form.

For an algebraically isolated A germ the potentials satisfy g = lam(f) for a
one-variable series lam.  A Casimir is then C = G(z, f) with G solving

    (1 + z lam'(w)) G_z - z G_w = 0,     G = w + z^2/2 + ...,

which is solved weight by weight (z has weight 1, w weight 2).  Splitting the
Morse directions z and x off C leaves a one-variable function of y, reduced to
kappa y^(m+1) + sum_{j<m} h_j(eps) y^j.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

from gmpy2 import mpq

from .. import linalg
from ..errors import PreconditionError, ReductionError
from ..jets import TruncatedSeries, rational_str
from ..poisson import PoissonFamily
from .zform import NormalFormData, reduce_13

# G(z, w) and Gamma(w) are stored with w in the x slot and z in the z slot.
W_SLOT = 0


def eps_poly_records(s: TruncatedSeries) -> list[str]:
    """Coefficients of eps^0..eps^E of a series with no other variables."""
    E = s.E
    return [rational_str(s[(0, 0, 0, l)]) for l in range(E + 1)]


def solve_lambda(f: TruncatedSeries, g: TruncatedSeries) -> TruncatedSeries:
    """lam(t) = sum_{k>=1} lam_k(eps) t^k with g = lam(f); returned with t in the x slot."""
    D, E = f.trunc
    columns, labels = [], []
    power = TruncatedSeries.constant(1, D, E)
    eps = TruncatedSeries.var("eps", D, E)
    for k in range(1, D + 1):
        power = power * f
        if power.is_zero():
            break
        ep = power
        for l in range(E + 1):
            if ep.is_zero():
                break
            columns.append(ep)
            labels.append((k, l))
            ep = ep * eps
    if not columns:
        if g.is_zero():
            return TruncatedSeries.zero(D, E)
        raise ReductionError("g is not a function of f: not algebraically isolated")
    keys = sorted({p for s in columns + [g] for p, _ in s.items()})
    rows = [[col[p] for col in columns] for p in keys]
    sol = linalg.solve(rows, [g[p] for p in keys])
    if sol is None:
        raise ReductionError("g is not a function of f modulo the truncation degree: "
                             "not algebraically isolated at this degree")
    lam = {}
    for (k, l), v in zip(labels, sol):
        if v != 0:
            lam[(k, 0, 0, l)] = v
    return TruncatedSeries(lam, D, E)


def _weight(p) -> int:
    return p[2] + 2 * p[W_SLOT]


def solve_casimir_ansatz(lam: TruncatedSeries) -> TruncatedSeries:
    """G(z, w) with (1 + z lam'(w)) G_z - z G_w = 0 up to weight D - 1."""
    D, E = lam.trunc
    w, _, z, _ = TruncatedSeries.variables(D, E)
    dlam = lam.partial(W_SLOT)
    G = w + (z * z).scale(mpq(1, 2))
    for k in range(3, D + 1):
        R = -(z * dlam * G.partial(2))
        rhs = {}
        for p, v in R.items():
            if _weight(p) == k - 1:
                rhs.setdefault((p[2], p[W_SLOT]), {})[p[3]] = v

        def r_at(a, b, l):
            return rhs.get((a, b), {}).get(l, mpq(0))

        new: dict = {}
        for l in range(E + 1):
            g = {}
            # coefficient of z^a w^b in D0 G_k:  (a+1) g[a+1,b] - (b+1) g[a-1,b+1]
            start = 0 if (k - 1) % 2 == 0 else 1
            for a in range(start, k, 2):
                b = (k - 1 - a) // 2
                g[(a + 1, b)] = (r_at(a, b, l) + (b + 1) * g.get((a - 1, b + 1), 0)) / (a + 1)
            if k % 2 == 0:
                # kernel (w + z^2/2)^(k/2); normalise the z^k coefficient to zero
                half = k // 2
                kern = {(2 * i, half - i): mpq(comb(half, i), 2 ** i) for i in range(half + 1)}
                t = -g.get((k, 0), 0) / kern[(k, 0)]
                for key, kv in kern.items():
                    g[key] = g.get(key, 0) + t * kv
            for (a, b), v in g.items():
                if v != 0:
                    new[(b, 0, a, l)] = v
        G = G + TruncatedSeries(new, D, E)
    return G


def casimir_equation_residual(G: TruncatedSeries, lam: TruncatedSeries) -> TruncatedSeries:
    D = G.trunc[0]
    z = TruncatedSeries.var("z", *G.trunc)
    Q = (1 + z * lam.partial(W_SLOT)) * G.partial(2) - z * G.partial(W_SLOT)
    # eps counts in the weight: higher terms only reach C above degree D
    return Q.select(lambda p: _weight(p) + p[3] <= D - 1)


@dataclass
class CasimirFamily:
    """Casimir C(x, y, z, eps) of the normal-form family, and the solved ansatz G."""

    C: TruncatedSeries
    G: TruncatedSeries
    lam: TruncatedSeries
    normal_form: NormalFormData
    C_original: TruncatedSeries | None = None

    def residuals(self, family: PoissonFamily | None = None, C: TruncatedSeries | None = None):
        """{C, x}, {C, y}, {C, z} kept up to degree D - 1."""
        fam = family or self.normal_form.family
        C = self.C if C is None else C
        D = C.trunc[0]
        return tuple(fam.bracket(C, h).truncated(D - 1)
                     for h in TruncatedSeries.variables(*C.trunc)[:3])

    def to_record(self) -> dict:
        return {"C": self.C.to_records(), "G": self.G.to_records(),
                "lambda": self.lam.to_records()}


def a_casimir(P: PoissonFamily, D: int | None = None,
              nf: NormalFormData | None = None) -> CasimirFamily:
    nf = nf or reduce_13(P, D)
    f, g = nf.f, nf.g
    # the construction needs g = lam(f) with f of order two: A germs, and also
    # so3 / sl2 germs whose g is a function of f
    j2 = _quadratic_part(f.at_eps0())
    if linalg.rank(_quad_matrix(j2)) == 0 or g.at_eps0().truncated(1):
        raise PreconditionError("Casimir construction needs j1 g0 = 0 and j2 f0 != 0")
    lam = solve_lambda(f, g)
    G = solve_casimir_ansatz(lam)
    if casimir_equation_residual(G, lam):
        raise ReductionError("Casimir ansatz has no solution at this degree")
    z = TruncatedSeries.var("z", *f.trunc)
    C = G.substitute((f, TruncatedSeries.var("y", *f.trunc), z))
    C_orig = C.substitute(nf.total_change())
    return CasimirFamily(C, G, lam, nf, C_orig)


def _quadratic_part(f: TruncatedSeries) -> tuple[mpq, mpq, mpq]:
    """(a, b, c) with j2 f = a x^2 + b x y + c y^2."""
    return f[(2, 0, 0, 0)], f[(1, 1, 0, 0)], f[(0, 2, 0, 0)]


def _quad_matrix(q) -> list[list[mpq]]:
    a, b, c = q
    return [[a, b / 2], [b / 2, c]]


@dataclass
class ANormalForm:
    """Data of the normal form

        H (z dx^dy + sign x dy^dz + lead (delta y^m + sum_i h_i y^i) dz^dx)

    with H(0) > 0 and lead > 0; h_i(0) = 0.  delta = 1 unless m is odd and
    sign = +1; for A- the x <-> z swap identifies the two values of delta.  The y-scaling that would make
    lead = 1 needs an (m+1)-th root, so lead is reported instead.
    """

    sign: int
    m: int
    delta: int
    h: list  # h_i(eps) as series in eps, i = 0..m-2
    lead: mpq
    kappa: mpq  # coefficient of y^(m+1) in the split Casimir, before normalising
    casimir: CasimirFamily | None = None

    @property
    def generic(self) -> bool:
        return self.m == 2

    def h_prime0(self, i: int = 0) -> mpq:
        return self.h[i][(0, 0, 0, 1)] if i < len(self.h) else mpq(0)

    def to_record(self) -> dict:
        return {"sign": "+" if self.sign > 0 else "-", "m": self.m, "delta": self.delta,
                "h": [eps_poly_records(hi) for hi in self.h], "lead": rational_str(self.lead),
                "H_sign_at_0": "positive", "generic": self.generic}


def _rational_split(f: TruncatedSeries):
    """Linear (x, y) change making j2 f0 = c x^2; returns (f in new coords, c)."""
    a, b, c = _quadratic_part(f.at_eps0())
    D, E = f.trunc
    x, y, z, _ = TruncatedSeries.variables(D, E)
    if b * b != 4 * a * c or (a == 0 and c == 0):
        raise PreconditionError("2-jet of f0 does not have rank one")
    if a != 0:
        # a x^2 + b x y + c y^2 = a (x + b/(2a) y)^2 ; X = x + s y
        s = b / (2 * a)
        return f.substitute((x - y.scale(s), y, z)), a
    return f.substitute((y, x, z)), c


def split_morse(f: TruncatedSeries, Gamma: TruncatedSeries | None = None):
    """Residual one-variable function after splitting off the x direction.

    Returns (r(y, eps), c) with f ~ c X^2 + r(y); when ``Gamma`` is given the
    returned function is Gamma(r).
    """
    fl, c = _rational_split(f)
    D, E = f.trunc
    x, y, z, _ = TruncatedSeries.variables(D, E)
    fx = fl.partial(0)
    xi = TruncatedSeries.zero(D, E)
    for _ in range(D + 2):
        nxt = xi - fx.substitute((xi, y, z)).scale(1 / (2 * c))
        if nxt == xi:
            break
        xi = nxt
    r = fl.substitute((xi, y, z))
    if Gamma is not None:
        r = Gamma.substitute((r, y, z))
    return r, c


def casimir_profile(G: TruncatedSeries) -> TruncatedSeries:
    """Gamma(w) = G(zeta(w), w) where G_z(zeta(w), w) = 0."""
    D, E = G.trunc
    w, y, z, _ = TruncatedSeries.variables(D, E)
    Gz = G.partial(2)
    zeta = TruncatedSeries.zero(D, E)
    for _ in range(D + 2):
        nxt = zeta - Gz.substitute((w, y, zeta))
        if nxt == zeta:
            break
        zeta = nxt
    return G.substitute((w, y, zeta))


def versal_form(cy: TruncatedSeries, m: int):
    """Change y -> y + psi(y, eps) bringing cy to kappa y^(m+1) + sum_{j<m} h_j y^j."""
    D, E = cy.trunc
    x, y, z, _ = TruncatedSeries.variables(D, E)
    kappa = cy.at_eps0()[(0, m + 1, 0, 0)]
    lin = (m + 1) * kappa
    psi = TruncatedSeries.zero(D, E)
    for _ in range((D + 2) * (E + 2)):
        cur = cy.substitute((x, y + psi, z))
        err = {}
        for p, v in cur.items():
            j, l = p[1], p[3]
            if j < m:
                continue
            if j == m + 1 and l == 0:
                continue
            err[(0, j - m, 0, l)] = -v / lin
        if not err:
            break
        psi = psi + TruncatedSeries(err, D, E)
    else:
        raise ReductionError("versal reduction did not converge")
    low = {j: cur.select(lambda p, j=j: p[1] == j).div_var(1, j) if j else
           cur.select(lambda p: p[1] == 0) for j in range(m)}
    return kappa, low


def a_normal_form(P: PoissonFamily, D: int | None = None,
                  nf: NormalFormData | None = None) -> ANormalForm:
    nf = nf or reduce_13(P, D)
    r0, c = split_morse(nf.f.at_eps0())
    order = r0.order()
    Dd = nf.f.trunc[0]
    if order is None or order > Dd:
        raise ReductionError(f"f0 is not R-equivalent to +-x^2 +- y^(m+1) with m <= {Dd - 1}: "
                             "not algebraically isolated at this degree")
    m = order - 1
    cas = a_casimir(P, D, nf)
    Gamma = casimir_profile(cas.G)
    cy, _ = split_morse(nf.f, Gamma)
    if m % 2 == 0 and cy.at_eps0()[(0, m + 1, 0, 0)] < 0:
        x, y, z, _ = TruncatedSeries.variables(*cy.trunc)
        cy = cy.substitute((x, -y, z))
    kappa, low = versal_form(cy, m)
    lead_signed = (m + 1) * kappa
    delta = 1 if m % 2 == 0 else (1 if kappa > 0 else -1)
    lead = abs(lead_signed)
    # d/dy of the versal form divided by lead: delta y^m + sum_i (i+1) h~_{i+1} y^i / lead
    h = [low[i + 1].scale(mpq(i + 1) / lead) for i in range(m - 1)]
    sign = 1 if c > 0 else -1
    if sign < 0 and delta < 0:
        # the swap (x, y, z) -> (z, y, x) keeps the A- form and negates
        # delta y^m + sum h_i y^i, so delta = -1 is equivalent to delta = 1
        delta = 1
        h = [-hi for hi in h]
    return ANormalForm(sign, m, delta, h, lead, kappa, cas)

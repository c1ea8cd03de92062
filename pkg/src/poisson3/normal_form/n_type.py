"""N singularities: rotational normal form of the potentials.

For an N germ the potentials of the normal form satisfy j2 f0 = 0, j1 g0 = 0
and j2 g0 is a nondegenerate quadratic form q.  Area-preserving changes of
(x, y) keep the shape {x,y} = z, {y,z} = f_x + z g_x, {z,x} = f_y + z g_y and
bring g to a series Lam(q) in q alone; f is then a series M(q) as well and

    C(q) = M'(q) / Lam'(q) = c_0(eps) + c_1(eps) q + ...

so that {y,z} = g_x (z + C) and {z,x} = g_y (z + C).  The reduction runs in
three stages: move the origin to the critical point of g, fix the quadratic
part of g up to a scalar with a unimodular linear change, then remove the
non-radial part of g degree by degree with time-one Hamiltonian flows.

Everything stays rational: q is the rational form j2 g0 rather than the unit
form x^2 +- y^2.  Passing to the unit form rescales by sqrt|det q|, which is
only needed for lambda_i, mu_i of the unit form and is applied on output.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from gmpy2 import mpq

from .. import linalg
from ..errors import PreconditionError, ReductionError
from ..jets import CoordinateChange, TruncatedSeries, rational_matrix_inverse, rational_str
from ..poisson import PoissonFamily, from_fg
from .a_type import eps_poly_records
from .zform import NormalFormData, reduce_13, xy_degree


def _binom(a: mpq, k: int) -> mpq:
    out = mpq(1)
    for i in range(k):
        out = out * (a - i) / (i + 1)
    return out


def _eps_part(s: TruncatedSeries, i: int, j: int) -> TruncatedSeries:
    """Coefficient of x^i y^j as a series in eps."""
    part = s.select(lambda p: p[0] == i and p[1] == j and p[2] == 0)
    return part.div_var(0, i).div_var(1, j)


def _mat_mul(a, b):
    return [[a[i][0] * b[0][j] + a[i][1] * b[1][j] for j in range(2)] for i in range(2)]


def _mat_add(a, b):
    return [[a[i][j] + b[i][j] for j in range(2)] for i in range(2)]


def _mat_scale(a, s):
    return [[a[i][j] * s for j in range(2)] for i in range(2)]


def planar_bracket(u: TruncatedSeries, v: TruncatedSeries) -> TruncatedSeries:
    return u.partial(0) * v.partial(1) - u.partial(1) * v.partial(0)


def quad_matrix(s: TruncatedSeries) -> list[list[mpq]]:
    """Symmetric matrix of the eps-free quadratic part of s in (x, y)."""
    a, b, c = s[(2, 0, 0, 0)], s[(1, 1, 0, 0)], s[(0, 2, 0, 0)]
    return [[a, b / 2], [b / 2, c]]


@dataclass
class NFamilyNormalForm:
    """Rotational normal form of an N family.

    ``Lam[i]`` and ``M[i]`` are the eps-series with g = sum Lam_i q^i and
    f = sum M_i q^i, ``c[i]`` those of C = M'/Lam', all relative to the
    rational form q = j2 g0 with matrix ``q_matrix``.  The z^2 tails of the
    general normal form vanish identically in this shape and are kept as zero
    series for completeness.
    """

    sign: int
    q: TruncatedSeries
    q_matrix: list
    Lam: list
    M: list
    c: list
    f: TruncatedSeries
    g: TruncatedSeries
    Q1: TruncatedSeries
    Q2: TruncatedSeries
    normal_form: NormalFormData | None = None
    change_log: list = field(default_factory=list)

    @property
    def det(self) -> mpq:
        return linalg.det(self.q_matrix)

    @property
    def orientation(self) -> int:
        """+1 when q is positive definite or indefinite, -1 when negative definite."""
        return -1 if self.sign > 0 and self.q_matrix[0][0] < 0 else 1

    def coefficient(self, series: list, i: int, l: int = 0) -> mpq:
        return series[i][(0, 0, 0, l)] if i < len(series) else mpq(0)

    # -- invariants -----------------------------------------------------------
    @property
    def kappa1(self) -> mpq:
        """lambda_0(0) mu_1(0); exact since the sqrt|det q| factors pair up."""
        return 2 * self.coefficient(self.Lam, 1) * self.coefficient(self.c, 1) * abs(self.det)

    @property
    def kappa2(self) -> mpq:
        """lambda_0(0)^2 - 8 kappa_1."""
        lam1 = self.coefficient(self.Lam, 1)
        return 4 * abs(self.det) * lam1 * lam1 - 8 * self.kappa1

    @property
    def mu0_prime(self) -> mpq:
        return self.coefficient(self.c, 0, 1)

    @property
    def mu1_at_0(self) -> mpq:
        return self.coefficient(self.c, 1)

    @property
    def generic_singularity(self) -> bool:
        return self.mu1_at_0 != 0

    @property
    def generic_unfolding(self) -> bool:
        return self.mu1_at_0 != 0 and self.mu0_prime != 0

    @property
    def radius_level(self) -> mpq | None:
        """rho with C = 0 on z = 0, q = rho eps + O(eps^2)."""
        if self.mu1_at_0 == 0:
            return None
        return -self.mu0_prime / self.mu1_at_0

    @property
    def circle_side(self) -> int | None:
        """Sign of eps on which the closed curve of singular points exists (N+ only)."""
        rho = self.radius_level
        if self.sign < 0 or rho is None or rho == 0:
            return None
        return (1 if rho > 0 else -1) * self.orientation

    def radius_squared(self) -> float | None:
        """r^2 / eps for the unit form, r^2 = rho / sqrt|det q|; exact only for square |det q|."""
        rho = self.radius_level
        if rho is None:
            return None
        return float(rho) * self.orientation / math.sqrt(abs(float(self.det)))

    def unit_form(self) -> dict:
        """lambda_i(eps), mu_i(eps) for the unit form x^2 +- y^2, as floats.

        lambda_i = 2 (i+1) Lam_(i+1) s^(i+1) r^(i+1) and mu_i = c_i (s r)^i with
        r = sqrt|det q| and s the orientation of q.
        """
        r = math.sqrt(abs(float(self.det)))
        s = self.orientation
        E = self.f.trunc[1]

        def poly(series, i):
            return [float(series[i][(0, 0, 0, l)]) if i < len(series) else 0.0
                    for l in range(E + 1)]

        lam = []
        for i in range(len(self.Lam) - 1):
            k = i + 1
            lam.append([2 * k * v * (s * r) ** k for v in poly(self.Lam, k)])
        mu = [[v * (s * r) ** i for v in poly(self.c, i)] for i in range(len(self.c))]
        return {"lambda": lam, "mu": mu}

    def rebuild(self) -> tuple[TruncatedSeries, TruncatedSeries]:
        """(f, g) rebuilt from Lam and C; equals (self.f, self.g) for a valid form."""
        g = _series_in_q(self.Lam, self.q)
        # M' = C Lam'
        D, E = self.f.trunc
        t = TruncatedSeries.var("x", D, E)
        lam_t = _series_in_q(self.Lam, t)
        c_t = _series_in_q(self.c, t)
        dm = c_t * lam_t.partial(0)
        m_t = dm.antiderivative(0)
        f = m_t.substitute((self.q, TruncatedSeries.var("y", D, E), TruncatedSeries.var("z", D, E)))
        return f, g

    def family(self) -> PoissonFamily:
        return from_fg(self.f, self.g)

    def total_change(self) -> CoordinateChange:
        D, E = self.f.trunc
        total = CoordinateChange.identity(D, E)
        for ch in self.change_log:
            total = total.then(ch)
        return total

    def to_record(self) -> dict:
        return {"sign": "+" if self.sign > 0 else "-",
                "q_matrix": [[rational_str(v) for v in row] for row in self.q_matrix],
                "Lambda": [eps_poly_records(s) for s in self.Lam],
                "M": [eps_poly_records(s) for s in self.M],
                "C": [eps_poly_records(s) for s in self.c],
                "lambda_mu_unit_form": self.unit_form(),
                "Q1": self.Q1.to_records(), "Q2": self.Q2.to_records(),
                "kappa1": rational_str(self.kappa1), "kappa2": rational_str(self.kappa2),
                "generic_singularity": self.generic_singularity,
                "generic_unfolding": self.generic_unfolding}


def _series_in_q(coeffs: list, q: TruncatedSeries) -> TruncatedSeries:
    D, E = q.trunc
    out = TruncatedSeries.zero(D, E)
    power = TruncatedSeries.constant(1, D, E)
    for c in coeffs:
        out = out + c * power
        power = power * q
    return out


def _fit_in_q(s: TruncatedSeries, q: TruncatedSeries, cap: int) -> list | None:
    """eps-series a_i with s = sum_i a_i q^i on monomials of weight <= cap."""
    D, E = s.trunc
    eps = TruncatedSeries.var("eps", D, E)
    columns, labels = [], []
    power = TruncatedSeries.constant(1, D, E)
    i = 0
    while not power.truncated(cap).is_zero():
        ep = power
        for l in range(E + 1):
            if ep.truncated(cap).is_zero():
                break
            columns.append(ep.truncated(cap))
            labels.append((i, l))
            ep = ep * eps
        power = power * q
        i += 1
    target = s.truncated(cap)
    keys = sorted({p for col in columns + [target] for p, _ in col.items()})
    rows = [[col[p] for col in columns] for p in keys]
    sol = linalg.solve(rows, [target[p] for p in keys])
    if sol is None:
        return None
    out = [TruncatedSeries.zero(D, E) for _ in range(i)]
    for (k, l), v in zip(labels, sol):
        if v != 0:
            out[k] = out[k] + TruncatedSeries({(0, 0, 0, l): v}, D, E)
    return out


def _divide_q_series(num: list, den: list, D: int, E: int) -> list:
    """Coefficients of num(q)/den(q) as eps-series, den[0] invertible."""
    t = TruncatedSeries.var("x", D, E)
    n = _series_in_q(num, t)
    d = _series_in_q(den, t)
    quot = n * d.reciprocal()
    return [quot.select(lambda p, i=i: p[0] == i).div_var(0, i) if i else
            quot.select(lambda p: p[0] == 0) for i in range(len(num))]


def _recentre(g: TruncatedSeries):
    """eps-series (px, py) at which grad g vanishes."""
    D, E = g.trunc
    x, y, z, _ = TruncatedSeries.variables(D, E)
    H = quad_matrix(g.at_eps0())
    Hinv = rational_matrix_inverse([[2 * H[0][0], 2 * H[0][1]], [2 * H[1][0], 2 * H[1][1]]])
    gx, gy = g.partial(0), g.partial(1)
    px = py = TruncatedSeries.zero(D, E)
    for _ in range(E + 2):
        at = (px, py, z)
        rx, ry = gx.substitute(at), gy.substitute(at)
        px = px - (rx.scale(Hinv[0][0]) + ry.scale(Hinv[0][1]))
        py = py - (rx.scale(Hinv[1][0]) + ry.scale(Hinv[1][1]))
    at = (px, py, z)
    if not (gx.substitute(at).truncated(D - 1).is_zero()
            and gy.substitute(at).truncated(D - 1).is_zero()):
        raise ReductionError("critical point of g not found")
    return px, py


def _drop_constant(s: TruncatedSeries) -> TruncatedSeries:
    return s.select(lambda p: p[0] or p[1] or p[2])


def _unimodular_fix(g: TruncatedSeries):
    """Unimodular eps-dependent matrix L with j2 g(L u) = ell(eps) j2 g0(u); returns (L, ell)."""
    D, E = g.trunc
    one = TruncatedSeries.constant(1, D, E)
    zero = TruncatedSeries.zero(D, E)
    a, b, c = _eps_part(g, 2, 0), _eps_part(g, 1, 1), _eps_part(g, 0, 2)
    S = [[a, b.scale(mpq(1, 2))], [b.scale(mpq(1, 2)), c]]
    S0 = quad_matrix(g.at_eps0())
    d0 = linalg.det(S0)
    ratio = (S[0][0] * S[1][1] - S[0][1] * S[1][0]).scale(1 / d0)
    u = ratio - one
    ell = TruncatedSeries.zero(D, E)
    power = one
    for k in range(E + 1):
        ell = ell + power.scale(_binom(mpq(1, 2), k))
        power = power * u
    inv_ell = ell.reciprocal()
    S0inv = rational_matrix_inverse(S0)
    Minv = [[(S[0][j] * inv_ell).scale(S0inv[i][0]) + (S[1][j] * inv_ell).scale(S0inv[i][1])
             for j in range(2)] for i in range(2)]
    N = _mat_add(Minv, [[-one, zero], [zero, -one]])
    L = [[one, zero], [zero, one]]
    Npow = L
    for k in range(1, E + 1):
        Npow = _mat_mul(Npow, N)
        L = _mat_add(L, _mat_scale(Npow, _binom(mpq(-1, 2), k)))
    return L, ell


def _homological_basis(q: TruncatedSeries, k: int):
    """Images {q, x^(k-j) y^j} and q^(k/2) as coefficient vectors of degree k."""
    D, E = q.trunc
    keys = [(k - j, j, 0, 0) for j in range(k + 1)]
    cols = []
    for j in range(k + 1):
        mono = TruncatedSeries.monomial((k - j, j, 0, 0), 1, D, E)
        img = planar_bracket(q, mono)
        cols.append([img[key] for key in keys])
    kern = None
    if k % 2 == 0:
        qk = q ** (k // 2)
        kern = [qk[key] for key in keys]
    return keys, cols, kern


def _flow_map(H: TruncatedSeries):
    """(exp(L) x, exp(L) y) with L(u) = {u, H}."""
    D, E = H.trunc
    x, y, z, _ = TruncatedSeries.variables(D, E)
    out = []
    for v in (x, y):
        total, term = v, v
        for n in range(1, D + 1):
            term = planar_bracket(term, H).scale(mpq(1, n))
            if term.is_zero():
                break
            total = total + term
        out.append(total)
    return out[0], out[1], z


def _require_n(f: TruncatedSeries, g: TruncatedSeries) -> int:
    f0, g0 = f.at_eps0(), g.at_eps0()
    if f0.truncated(2) or g0.truncated(1):
        raise PreconditionError("not an N singularity: need j2 f0 = 0 and j1 g0 = 0")
    Q = quad_matrix(g0)
    d = linalg.det(Q)
    if d == 0:
        raise PreconditionError("j2 g0 is degenerate: N singularity of neither sign")
    return 1 if d > 0 else -1


def n_reduce(P: PoissonFamily, D: int | None = None,
             nf: NormalFormData | None = None) -> NFamilyNormalForm:
    """Rotational normal form of a family whose member at eps = 0 is N+ or N-."""
    nf = nf or reduce_13(P, D)
    f, g = nf.f, nf.g
    sign = _require_n(f, g)
    D, E = f.trunc
    x, y, z, _ = TruncatedSeries.variables(D, E)
    log = list(nf.change_log)

    # 1. origin at the critical point of g
    px, py = _recentre(g)
    if not (px.is_zero() and py.is_zero()):
        shift = (x + px, y + py, z)
        f, g = _drop_constant(f.substitute(shift)), _drop_constant(g.substitute(shift))
        log.append(CoordinateChange.from_inverse(shift, "recentre"))

    # 2. quadratic part of g proportional to j2 g0
    L, ell = _unimodular_fix(g)
    if not all(L[i][j] == (1 if i == j else 0) for i in range(2) for j in range(2)):
        lin = (L[0][0] * x + L[0][1] * y, L[1][0] * x + L[1][1] * y, z)
        f, g = f.substitute(lin), g.substitute(lin)
        log.append(CoordinateChange.from_inverse(lin, "unimodular"))
    q = g.at_eps0().select(lambda p: xy_degree(p) == 2)
    inv_ell = ell.reciprocal()

    # 3. remove the non-radial part of g degree by degree
    for k in range(3, D + 1):
        keys, cols, kern = _homological_basis(q, k)
        Ht = {}
        for l in range(D - k + 1):
            if l > E:
                break
            rhs = [-g[(a, b, 0, l)] for a, b, _, _ in keys]
            if not any(rhs):
                continue
            rows = [list(c_row) + ([-kern[i]] if kern else [])
                    for i, c_row in enumerate(zip(*cols))]
            sol = linalg.solve(rows, rhs)
            if sol is None:
                raise ReductionError(f"homological equation at degree {k} has no solution")
            for (a, b, _, _), v in zip(keys, sol[:k + 1]):
                if v != 0:
                    Ht[(a, b, 0, l)] = v
        if not Ht:
            continue
        H = TruncatedSeries(Ht, D, E) * inv_ell
        phi = _flow_map(H)
        f, g = f.substitute(phi), g.substitute(phi)
        log.append(CoordinateChange.from_inverse(phi, f"rotational:{k}"))

    cap = D
    Lam = _fit_in_q(g, q, cap)
    M = _fit_in_q(f, q, cap)
    if Lam is None or M is None:
        cap = D - 1
        Lam = _fit_in_q(g, q, cap)
        M = _fit_in_q(f, q, cap)
    if Lam is None or M is None:
        raise ReductionError("potentials are not radial after normalization: "
                             "insufficient truncation degree")
    n = max(len(Lam), len(M))
    Lam = Lam + [TruncatedSeries.zero(D, E)] * (n - len(Lam))
    M = M + [TruncatedSeries.zero(D, E)] * (n - len(M))
    if Lam[1].at_eps0().is_zero():
        raise PreconditionError("lambda_0(0) = 0: not an N singularity")
    dLam = [Lam[i + 1].scale(i + 1) for i in range(n - 1)]
    dM = [M[i + 1].scale(i + 1) for i in range(n - 1)]
    c = _divide_q_series(dM, dLam, D, E)
    if c and c[0].at_eps0()[(0, 0, 0, 0)] != 0:
        raise ReductionError("mu_0(0) != 0")
    zero = TruncatedSeries.zero(D, E)
    return NFamilyNormalForm(sign, q, quad_matrix(q), Lam, M, c, f, g, zero, zero,
                             nf, log)


__all__ = ["NFamilyNormalForm", "n_reduce", "planar_bracket", "quad_matrix"]

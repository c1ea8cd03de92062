"""V singularities: rectify the curl and read off the planar vector field.

If the curl X of P does not vanish at the origin, coordinates in which X is
d/dy give P = d/dy ^ (alpha d/dx + beta d/dz) with alpha, beta independent of
y.  The coordinates are the flow-box chart (x', y', z') -> exp(y' X)(x' u + z' v)
for a plane spanned by u, v transversal to X(0).
"""

from __future__ import annotations

from dataclasses import dataclass
from math import factorial

from gmpy2 import mpq

from .. import linalg
from ..errors import PreconditionError, ReductionError
from ..jets import CoordinateChange, TruncatedSeries, rational_matrix_inverse, rational_str
from ..poisson import PoissonFamily, curl, pushforward


@dataclass(frozen=True)
class EigenPair:
    """Eigenvalues of a real 2x2 matrix, kept as its trace and determinant.

    The pair is only meaningful up to a common nonzero factor.
    """

    trace: mpq
    det: mpq

    @classmethod
    def from_matrix(cls, m) -> "EigenPair":
        return cls(mpq(m[0][0] + m[1][1]), mpq(m[0][0] * m[1][1] - m[0][1] * m[1][0]))

    @classmethod
    def from_values(cls, l1, l2) -> "EigenPair":
        return cls(mpq(l1) + mpq(l2), mpq(l1) * mpq(l2))

    @classmethod
    def from_complex(cls, re, im) -> "EigenPair":
        """The conjugate pair re +- i im."""
        return cls(2 * mpq(re), mpq(re) ** 2 + mpq(im) ** 2)

    @property
    def discriminant(self) -> mpq:
        return self.trace ** 2 - 4 * self.det

    def is_real(self) -> bool:
        return self.discriminant >= 0

    def rational_values(self) -> tuple[mpq, mpq] | None:
        """Both eigenvalues when they are rational, smaller one first."""
        disc = self.discriminant
        if not linalg.is_square(disc):
            return None
        r = linalg.rational_sqrt(disc)
        return (self.trace - r) / 2, (self.trace + r) / 2

    def scaled(self, c) -> "EigenPair":
        c = mpq(c)
        return EigenPair(self.trace * c, self.det * c * c)

    def to_record(self) -> dict:
        rec = {"trace": rational_str(self.trace), "det": rational_str(self.det)}
        vals = self.rational_values()
        if vals is not None:
            rec["values"] = [rational_str(v) for v in vals]
        return rec


@dataclass(frozen=True)
class PlanarFamily:
    """alpha(x, z, eps) d/dx + beta(x, z, eps) d/dz."""

    alpha: TruncatedSeries
    beta: TruncatedSeries
    eigen: EigenPair

    def linear_matrix(self) -> list[list[mpq]]:
        return planar_linear_matrix(self.alpha, self.beta)


def planar_linear_matrix(alpha: TruncatedSeries, beta: TruncatedSeries) -> list[list[mpq]]:
    """Linearization of (alpha, beta) at the origin for eps = 0, variables (x, z)."""
    return [[alpha[(1, 0, 0, 0)], alpha[(0, 0, 1, 0)]],
            [beta[(1, 0, 0, 0)], beta[(0, 0, 1, 0)]]]


def flow_box(X, D: int, E: int) -> CoordinateChange:
    """Change whose inverse is (x', y', z') -> exp(y' X)(x' u + z' v)."""
    X0 = [c.value_at_origin() for c in X]
    std = [[mpq(int(i == j)) for j in range(3)] for i in range(3)]
    pair = next((u, v) for u, v in ((std[0], std[2]), (std[0], std[1]), (std[1], std[2]))
                if linalg.rank([u, X0, v]) == 3)
    u, v = pair
    xs = TruncatedSeries.variables(D, E)
    x, y, z = xs[:3]
    sigma = tuple(x.scale(u[i]) + z.scale(v[i]) for i in range(3))
    psi = []
    for i in range(3):
        h = xs[i]
        total = TruncatedSeries.zero(D, E)
        ypow = TruncatedSeries.constant(1, D, E)
        for n in range(D + 1):
            total = total + (h.substitute(sigma) * ypow).scale(mpq(1, factorial(n)))
            h = X[0] * h.partial(0) + X[1] * h.partial(1) + X[2] * h.partial(2)
            ypow = ypow * y
            if ypow.is_zero() or h.is_zero():
                break
        psi.append(total)
    return CoordinateChange.from_inverse(tuple(psi), "flowbox")


def v_reduce(P: PoissonFamily) -> tuple[PlanarFamily, CoordinateChange]:
    """Coordinates with curl = d/dy and P = d/dy ^ (alpha d/dx + beta d/dz)."""
    X = curl(P).components
    if all(c.value_at_origin() == 0 for c in X):
        raise PreconditionError("curl vanishes at the origin: not a V singularity")
    if not P.is_singular_at_origin():
        raise PreconditionError("P does not vanish at the origin for eps = 0")
    D, E = P.trunc
    ch = flow_box(X, D, E)
    Q = pushforward(P, ch)
    cap = D - 1
    if Q.bzx.truncated(cap) or any(p[1] for s in (Q.bxy, Q.byz) for p, _ in
                                   s.truncated(cap).items()):
        raise ReductionError("rectified structure is not of the form d/dy ^ v")
    no_y = (lambda p: p[1] == 0)
    alpha = (-Q.bxy).select(no_y)
    beta = Q.byz.select(no_y)
    eigen = EigenPair.from_matrix(planar_linear_matrix(alpha, beta))
    if eigen.trace == 0:
        raise ReductionError("planar field has zero divergence at the origin")
    return PlanarFamily(alpha, beta, eigen), ch


@dataclass(frozen=True)
class CenterReduction:
    """Field on the centre manifold of a saddle-node, eps suspended.

    ``reduced`` is u' as a series in (u, eps) (stored in the x slot), ``rate``
    the transverse eigenvalue along the centre manifold, ``lam`` its value at 0.
    """

    reduced: TruncatedSeries
    rate: TruncatedSeries
    lam: mpq


def center_reduction(alpha: TruncatedSeries, beta: TruncatedSeries) -> CenterReduction:
    """Reduce a planar family with one zero eigenvalue to its centre manifold."""
    D, E = alpha.trunc
    M = planar_linear_matrix(alpha, beta)
    ep = EigenPair.from_matrix(M)
    if ep.det != 0 or ep.trace == 0:
        raise PreconditionError("linear part is not of saddle-node type")
    lam = ep.trace
    # kernel vector k and lam-eigenvector w of M
    ker = linalg.nullspace(M)[0]
    w = linalg.nullspace([[M[0][0] - lam, M[0][1]], [M[1][0], M[1][1] - lam]])[0]
    T = [[ker[0], w[0]], [ker[1], w[1]]]
    Tinv = rational_matrix_inverse(T)
    x, y, z, eps = TruncatedSeries.variables(D, E)
    # (x, z) = u k + s w with u in the x slot and s in the z slot
    to_old = (x.scale(T[0][0]) + z.scale(T[0][1]), y, x.scale(T[1][0]) + z.scale(T[1][1]))
    a_old, b_old = alpha.substitute(to_old), beta.substitute(to_old)
    A = a_old.scale(Tinv[0][0]) + b_old.scale(Tinv[0][1])
    S = a_old.scale(Tinv[1][0]) + b_old.scale(Tinv[1][1])
    N = S - z.scale(lam)
    h = TruncatedSeries.zero(D, E)
    for _ in range(D + 1):
        on = (x, y, h)
        h_new = (h.partial(0) * A.substitute(on) - N.substitute(on)).scale(1 / lam)
        if h_new == h:
            break
        h = h_new
    on = (x, y, h)
    reduced = A.substitute(on)
    rate = S.partial(2).substitute(on) - h.partial(0) * A.partial(2).substitute(on)
    return CenterReduction(reduced, rate, lam)


@dataclass(frozen=True)
class SaddleNodeData:
    """Order data of a saddle-node at eps = 0; p is None when no finite order is seen."""

    p: int | None
    delta: int | None
    modulus: mpq | None
    unfolding: tuple | None  # (f0'(0), f1(0), f2(0)) for the eps-family when p = 1


def saddle_node_data(alpha: TruncatedSeries, beta: TruncatedSeries) -> SaddleNodeData:
    cr = center_reduction(alpha, beta)
    D = alpha.trunc[0]
    red0 = cr.reduced.at_eps0()
    order = red0.order()
    if order is None:
        return SaddleNodeData(None, None, None, None)
    p = order - 1
    lead = red0[(order, 0, 0, 0)]
    delta = 1 if order % 2 == 0 else (1 if lead / cr.lam > 0 else -1)
    modulus = None
    # residue of rate / reduced at u = 0 needs reduced through degree 2p + 1
    if 2 * p + 1 <= D:
        G = red0.div_var(0, order)
        quot = cr.rate.at_eps0() * G.reciprocal()
        modulus = -quot[(p, 0, 0, 0)]
    unfolding = None
    if p == 1:
        r = cr.reduced
        unfolding = (r[(0, 0, 0, 1)], r[(1, 0, 0, 0)], r[(2, 0, 0, 0)])
    return SaddleNodeData(p, delta, modulus, unfolding)


def _monomials(k: int):
    return [(a, k - a) for a in range(k + 1)]


def eigen_coordinates(alpha: TruncatedSeries, beta: TruncatedSeries, values) -> tuple:
    """Field in coordinates (u, w) along the eigenvectors of values[0], values[1].

    u sits in the x slot and w in the z slot; the eigenvalues must be rational
    and distinct.
    """
    M = planar_linear_matrix(alpha.at_eps0(), beta.at_eps0())
    l1, l2 = values
    if l1 == l2:
        raise PreconditionError("eigenvalues must be distinct")
    e1 = linalg.nullspace([[M[0][0] - l1, M[0][1]], [M[1][0], M[1][1] - l1]])[0]
    e2 = linalg.nullspace([[M[0][0] - l2, M[0][1]], [M[1][0], M[1][1] - l2]])[0]
    T = [[e1[0], e2[0]], [e1[1], e2[1]]]
    Ti = rational_matrix_inverse(T)
    D, E = alpha.trunc
    x, y, z, _ = TruncatedSeries.variables(D, E)
    old = (x.scale(T[0][0]) + z.scale(T[0][1]), y, x.scale(T[1][0]) + z.scale(T[1][1]))
    a, b = alpha.at_eps0().substitute(old), beta.at_eps0().substitute(old)
    return (a.scale(Ti[0][0]) + b.scale(Ti[0][1]), a.scale(Ti[1][0]) + b.scale(Ti[1][1]))


def poincare_dulac(alpha: TruncatedSeries, beta: TruncatedSeries, values, upto: int) -> tuple:
    """Remove the nonresonant terms of degree 2..upto of the eps = 0 field.

    Returns the field in eigen coordinates (u, w) (x and z slots); through
    degree ``upto`` only monomials u^a w^b e_i with a l1 + b l2 = l_i survive.
    """
    lam = (mpq(values[0]), mpq(values[1]))
    v = list(eigen_coordinates(alpha, beta, lam))
    D, E = alpha.trunc
    x, y, z, _ = TruncatedSeries.variables(D, E)
    slots = (0, 2)
    for k in range(2, min(upto, D) + 1):
        h = [{}, {}]
        for i in range(2):
            for a, b in _monomials(k):
                key = (a, 0, b, 0)
                coeff = v[i][key]
                mu = a * lam[0] + b * lam[1] - lam[i]
                if coeff != 0 and mu != 0:
                    h[i][key] = coeff / mu
        if not h[0] and not h[1]:
            continue
        h0, h1 = TruncatedSeries(h[0], D, E), TruncatedSeries(h[1], D, E)
        psi = CoordinateChange((x - h0, y, z - h1), "poincare-dulac")
        inv = psi.inverse()
        new = []
        for im in (psi.images[0], psi.images[2]):
            comp = im.partial(slots[0]) * v[0] + im.partial(slots[1]) * v[1]
            new.append(comp.substitute(inv))
        v = new
    return v[0], v[1]

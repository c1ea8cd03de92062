"""Poisson structures on (R^3, 0) depending on a parameter, stored as bivector jets.

A family is given by the three brackets {x,y}, {y,z}, {z,x}.  Most formulas use
the vector F = ({y,z}, {z,x}, {x,y}), for which {f, g} = F . (grad f x grad g),
the Pfaffian form is F . (dx, dy, dz) and the Jacobi identity reads F . curl F = 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

from gmpy2 import mpq

from . import linalg
from .errors import (ConfigurationError, IntegrabilityError, NotPoissonError,
                     PreconditionError)
from .jets import (DEFAULT_D, DEFAULT_E, CoordinateChange, DifferentialObject,
                   TruncatedSeries, exterior_derivative, rational_str)

SCHEMA = "poisson3/1"
PFAFFIAN_SCHEMA = "poisson3-pfaffian/1"
DOCUMENT_KEYS = {"schema", "trunc", "brackets", "meta"}
BRACKET_KEYS = ("xy", "yz", "zx")


def _cross(a, b):
    return (a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0])


def _dot(a, b):
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]


def gradient(f: TruncatedSeries) -> tuple:
    return f.partial(0), f.partial(1), f.partial(2)


def curl_vector(v: Sequence[TruncatedSeries]) -> tuple:
    a, b, c = v
    return (c.partial(1) - b.partial(2), a.partial(2) - c.partial(0), b.partial(0) - a.partial(1))


@dataclass(frozen=True)
class PoissonFamily:
    """Brackets {x,y}, {y,z}, {z,x} of a family of bivectors.

    ``checked`` records whether the Jacobi identity was verified when the
    family was built; use :meth:`unchecked` for raw input.
    """

    bxy: TruncatedSeries
    byz: TruncatedSeries
    bzx: TruncatedSeries
    checked: bool = field(default=False, compare=False)

    def __post_init__(self):
        if not (self.bxy.trunc == self.byz.trunc == self.bzx.trunc):
            raise ConfigurationError("brackets have mismatched truncation")

    @classmethod
    def unchecked(cls, bxy, byz, bzx) -> "PoissonFamily":
        return cls(bxy, byz, bzx, False)

    @classmethod
    def validated(cls, bxy, byz, bzx) -> "PoissonFamily":
        fam = cls(bxy, byz, bzx, False)
        res = jacobi_residual(fam)
        if not res.is_zero():
            raise NotPoissonError(f"Jacobi identity fails: residual {res}")
        return cls(bxy, byz, bzx, True)

    @classmethod
    def zero(cls, D=DEFAULT_D, E=DEFAULT_E) -> "PoissonFamily":
        z = TruncatedSeries.zero(D, E)
        return cls(z, z, z, True)

    @property
    def trunc(self) -> tuple[int, int]:
        return self.bxy.trunc

    @property
    def vector(self) -> tuple:
        """F = ({y,z}, {z,x}, {x,y})."""
        return self.byz, self.bzx, self.bxy

    def matrix(self) -> list[list[TruncatedSeries]]:
        """Antisymmetric matrix of brackets {x_i, x_j}."""
        z = TruncatedSeries.zero(*self.trunc)
        return [[z, self.bxy, -self.bzx],
                [-self.bxy, z, self.byz],
                [self.bzx, -self.byz, z]]

    def bracket(self, f: TruncatedSeries, g: TruncatedSeries) -> TruncatedSeries:
        return _dot(self.vector, _cross(gradient(f), gradient(g)))

    def at_eps0(self) -> "PoissonFamily":
        return PoissonFamily(self.bxy.at_eps0(), self.byz.at_eps0(), self.bzx.at_eps0(),
                             self.checked)

    def truncated(self, cap: int) -> "PoissonFamily":
        return PoissonFamily(self.bxy.truncated(cap), self.byz.truncated(cap),
                             self.bzx.truncated(cap), self.checked)

    def value_at_origin(self) -> tuple:
        return tuple(b.value_at_origin() for b in (self.bxy, self.byz, self.bzx))

    def is_singular_at_origin(self) -> bool:
        return all(v == 0 for v in self.value_at_origin())

    def __eq__(self, other):
        if not isinstance(other, PoissonFamily):
            return NotImplemented
        return (self.bxy, self.byz, self.bzx) == (other.bxy, other.byz, other.bzx)

    def __hash__(self):
        return hash((self.bxy, self.byz, self.bzx))

    # -- serialization --------------------------------------------------------------
    def to_document(self, meta: Mapping | None = None) -> dict:
        D, E = self.trunc
        doc = {"schema": SCHEMA, "trunc": {"d": D, "e": E},
               "brackets": {"xy": self.bxy.to_records(), "yz": self.byz.to_records(),
                            "zx": self.bzx.to_records()}}
        if meta:
            doc["meta"] = dict(meta)
        return doc

    @classmethod
    def from_document(cls, doc: Mapping, validate: bool = False) -> "PoissonFamily":
        _check_header(doc, SCHEMA, DOCUMENT_KEYS)
        D, E = parse_trunc(doc.get("trunc"))
        br = doc.get("brackets")
        if not isinstance(br, Mapping) or set(br) != set(BRACKET_KEYS):
            raise ValueError("brackets: expected exactly the keys 'xy', 'yz', 'zx'")
        series = {}
        for key in BRACKET_KEYS:
            recs = br[key]
            if not isinstance(recs, list):
                raise ValueError(f"brackets.{key}: expected a list of records")
            try:
                series[key] = TruncatedSeries.from_records(recs, D, E)
            except ValueError as exc:
                raise type(exc)(f"brackets.{key}: {exc}") from None
        build = cls.validated if validate else cls.unchecked
        return build(series["xy"], series["yz"], series["zx"])

    def __str__(self):
        return f"{{x,y}} = {self.bxy}\n{{y,z}} = {self.byz}\n{{z,x}} = {self.bzx}"


def _check_header(doc, schema: str, keys: set) -> None:
    if not isinstance(doc, Mapping):
        raise ValueError("document: expected a JSON object")
    unknown = sorted(set(doc) - keys)
    if unknown:
        raise ValueError(f"document: unknown fields {unknown}")
    if doc.get("schema", schema) != schema:
        raise ValueError(f"schema: expected {schema!r}, got {doc.get('schema')!r}")


def parse_trunc(t) -> tuple[int, int]:
    if t is None:
        return DEFAULT_D, DEFAULT_E
    if not isinstance(t, Mapping) or set(t) - {"d", "e"}:
        raise ValueError("trunc: expected an object with keys 'd' and 'e'")
    D, E = t.get("d", DEFAULT_D), t.get("e", DEFAULT_E)
    for name, v in (("d", D), ("e", E)):
        if not isinstance(v, int) or isinstance(v, bool) or v < 0 or v > 20:
            raise ValueError(f"trunc.{name}: expected an integer in 0..20")
    if D < 2:
        raise ValueError("trunc.d: need at least 2")
    return D, E


# -- invariants -----------------------------------------------------------------------

def jacobi_residual(P: PoissonFamily) -> TruncatedSeries:
    """Coefficient of w ^ dw in dx^dy^dz for w = F . dx, kept up to degree D-1."""
    F = P.vector
    D = P.trunc[0]
    return _dot(F, curl_vector(F)).truncated(D - 1)


def curl(P: PoissonFamily) -> DifferentialObject:
    """Modular vector field of P for the volume form dx^dy^dz."""
    return DifferentialObject("vector", curl_vector(P.vector))


def curl_at_origin(P: PoissonFamily) -> tuple:
    return tuple(c.value_at_origin() for c in curl(P).components)


def pushforward(P: PoissonFamily, ch: CoordinateChange) -> PoissonFamily:
    """Brackets of the new coordinates given by ``ch``, written in the new coordinates."""
    grads = [gradient(im) for im in ch.images]
    F = P.vector
    inv = ch.inverse()

    def br(a, b):
        return _dot(F, _cross(grads[a], grads[b])).substitute(inv)

    return PoissonFamily(br(0, 1), br(1, 2), br(2, 0), P.checked)


def lie_derivative_bivector(X: Sequence[TruncatedSeries], P: PoissonFamily) -> list[list]:
    """Full matrix of L_X P."""
    M = P.matrix()
    dX = [[X[i].partial(k) for k in range(3)] for i in range(3)]
    out = [[None] * 3 for _ in range(3)]
    for i in range(3):
        for j in range(3):
            acc = _dot(X, gradient(M[i][j]))
            for k in range(3):
                acc = acc - M[k][j] * dX[i][k] - M[i][k] * dX[j][k]
            out[i][j] = acc
    return out


def lie_symmetry_residual(X: DifferentialObject, P: PoissonFamily) -> DifferentialObject:
    """[X, P] as a bivector (yz, zx, xy components), kept up to degree D-1."""
    if X.kind != "vector":
        raise ValueError("expected a vector field")
    L = lie_derivative_bivector(X.components, P)
    D = P.trunc[0]
    return DifferentialObject("bivector", (L[1][2], L[2][0], L[0][1])).truncated(D - 1)


# -- Pfaffian bridge ---------------------------------------------------------------------

@dataclass(frozen=True)
class PfaffianEquation:
    omega: DifferentialObject

    def integrability_residual(self) -> TruncatedSeries:
        w = self.omega.components
        D = w[0].trunc[0]
        return _dot(w, exterior_derivative(self.omega).components).truncated(D - 1)

    def to_document(self) -> dict:
        D, E = self.omega.trunc
        return {"schema": PFAFFIAN_SCHEMA, "trunc": {"d": D, "e": E},
                "omega": {k: c.to_records() for k, c in zip(("dx", "dy", "dz"),
                                                               self.omega.components)}}

    @classmethod
    def from_document(cls, doc: Mapping) -> "PfaffianEquation":
        _check_header(doc, PFAFFIAN_SCHEMA, {"schema", "trunc", "omega", "meta"})
        D, E = parse_trunc(doc.get("trunc"))
        om = doc.get("omega")
        if not isinstance(om, Mapping) or set(om) != {"dx", "dy", "dz"}:
            raise ValueError("omega: expected exactly the keys 'dx', 'dy', 'dz'")
        comps = []
        for key in ("dx", "dy", "dz"):
            if not isinstance(om[key], list):
                raise ValueError(f"omega.{key}: expected a list of records")
            try:
                comps.append(TruncatedSeries.from_records(om[key], D, E))
            except ValueError as exc:
                raise type(exc)(f"omega.{key}: {exc}") from None
        return cls(DifferentialObject("1-form", tuple(comps)))


def to_pfaffian(P: PoissonFamily) -> PfaffianEquation:
    return PfaffianEquation(DifferentialObject("1-form", P.vector))


def from_pfaffian(eq: PfaffianEquation | DifferentialObject) -> PoissonFamily:
    if isinstance(eq, DifferentialObject):
        eq = PfaffianEquation(eq)
    if eq.omega.kind != "1-form":
        raise ValueError("expected a 1-form")
    res = eq.integrability_residual()
    if not res.is_zero():
        raise IntegrabilityError(f"w ^ dw = {res} is not zero", residual=res)
    a, b, c = eq.omega.components
    return PoissonFamily(c, a, b, True)


# -- constructors ---------------------------------------------------------------------

def _require_planar(s: TruncatedSeries, name: str, forbidden: str) -> None:
    if s.depends_on(forbidden):
        raise PreconditionError(f"{name} must not depend on {forbidden}")


def fg_residual(f: TruncatedSeries, g: TruncatedSeries) -> DifferentialObject:
    """df ^ dg as a 2-form, kept up to degree D-1 (the reliable part of the product)."""
    D = f.trunc[0]
    dxy = (f.partial(0) * g.partial(1) - f.partial(1) * g.partial(0)).truncated(D - 1)
    z = TruncatedSeries.zero(*f.trunc)
    return DifferentialObject("2-form", (z, z, dxy))


def from_fg(f: TruncatedSeries, g: TruncatedSeries) -> PoissonFamily:
    """{x,y} = z, {y,z} = f_x + z g_x, {z,x} = f_y + z g_y."""
    for name, s in (("f", f), ("g", g)):
        _require_planar(s, name, "z")
        if any(p[:3] == (0, 0, 0) for p, _ in s.items()):
            raise PreconditionError(f"{name} must vanish at x = y = 0 for every eps")
    res = fg_residual(f, g)
    if not res.is_zero():
        raise PreconditionError(f"df ^ dg = ({res.components[2]}) dx^dy is not zero",
                                residual=res)
    x, y, z, _ = TruncatedSeries.variables(*f.trunc)
    return PoissonFamily(z, f.partial(0) + z * g.partial(0), f.partial(1) + z * g.partial(1), True)


def from_planar(alpha: TruncatedSeries, beta: TruncatedSeries) -> PoissonFamily:
    """P = d/dy ^ (alpha d/dx + beta d/dz), i.e. {x,y} = -alpha, {y,z} = beta, {z,x} = 0."""
    _require_planar(alpha, "alpha", "y")
    _require_planar(beta, "beta", "y")
    return PoissonFamily(-alpha, beta, TruncatedSeries.zero(*alpha.trunc), True)


# -- linearization ----------------------------------------------------------------------

@dataclass(frozen=True)
class LieAlgebra1Jet:
    """Lie algebra of the linear part of P at a singular point.

    ``constants[a][b][k]`` is the e_k coefficient of [e_a, e_b].  For solvable
    algebras ``basis`` = (e1, e2, e3) spans an abelian ideal by e1, e2 and
    ``B`` holds [e_i, e3] = B[i][0] e1 + B[i][1] e2.
    """

    constants: tuple
    kind: str  # zero | so3 | sl2 | solvable
    basis: tuple | None = None
    B: tuple | None = None

    @property
    def trace_B(self):
        return None if self.B is None else self.B[0][0] + self.B[1][1]

    @property
    def det_B(self):
        return None if self.B is None else self.B[0][0] * self.B[1][1] - self.B[0][1] * self.B[1][0]

    def is_zero(self) -> bool:
        return self.kind == "zero"

    def matches_radial(self) -> bool:
        """True for the algebra [e1,e3] = e1, [e2,e3] = e2 up to scale.

        Its curl at the origin is nonzero, and the z-form reduction cannot
        start from it.
        """
        if self.B is None:
            return False
        (a, b), (c, d) = self.B
        return b == 0 and c == 0 and a == d and a != 0

    def to_record(self) -> dict:
        rec = {"kind": self.kind}
        if self.B is not None:
            rec["B"] = [[rational_str(v) for v in row] for row in self.B]
            rec["trace_B"] = rational_str(self.trace_B)
            rec["det_B"] = rational_str(self.det_B)
        return rec


def structure_constants(P: PoissonFamily, point=(0, 0, 0), eps=0) -> list:
    """Exact linearization of P at a rational point; the point must be singular."""
    p = [mpq(v) for v in point]
    e = mpq(eps)
    M = P.matrix()
    for i in range(3):
        for j in range(i + 1, 3):
            if M[i][j].evaluate(*p, e) != 0:
                raise PreconditionError("not a singular point")
    return [[[M[a][b].partial(k).evaluate(*p, e) for k in range(3)] for b in range(3)]
            for a in range(3)]


def _bracket_vec(c, u, v):
    return [sum(u[a] * v[b] * c[a][b][k] for a in range(3) for b in range(3)) for k in range(3)]


def _coords(basis, w):
    """Coordinates of w in a basis of three vectors."""
    cols = [[basis[j][i] for j in range(3)] for i in range(3)]
    return linalg.solve(cols, w)


def _is_lie(c) -> bool:
    for a in range(3):
        for b in range(a + 1, 3):
            for d in range(b + 1, 3):
                for k in range(3):
                    if sum(c[a][b][m] * c[m][d][k] + c[b][d][m] * c[m][a][k]
                           + c[d][a][m] * c[m][b][k] for m in range(3)) != 0:
                        return False
    return True


def lie_algebra_from_constants(c) -> LieAlgebra1Jet:
    c = [[[mpq(v) for v in row] for row in mat] for mat in c]
    const = tuple(tuple(tuple(row) for row in mat) for mat in c)
    if all(v == 0 for mat in c for row in mat for v in row):
        return LieAlgebra1Jet(const, "zero")
    if not _is_lie(c):
        raise NotPoissonError("linear part does not satisfy the Jacobi identity")
    ad = [[[c[a][b][k] for b in range(3)] for k in range(3)] for a in range(3)]
    tau = [sum(ad[a][i][i] for i in range(3)) for a in range(3)]
    derived = [[c[a][b][k] for k in range(3)] for a in range(3) for b in range(a + 1, 3)]
    r = linalg.rank(derived)
    std = [[mpq(int(i == j)) for j in range(3)] for i in range(3)]
    if any(t != 0 for t in tau):
        ideal = linalg.nullspace([tau])
        e3 = next(v for v, t in zip(std, tau) if t != 0)
    elif r == 3:
        killing = [[sum(ad[a][i][k] * ad[b][k][i] for i in range(3) for k in range(3))
                    for b in range(3)] for a in range(3)]
        neg = [[-v for v in row] for row in killing]
        return LieAlgebra1Jet(const, "so3" if linalg.is_positive_definite(neg) else "sl2")
    elif r == 2:
        ideal = _span_basis(derived)
        e3 = _complement(ideal, std)
    else:
        d = _span_basis(derived)[0]
        ad_d = [[sum(d[a] * ad[a][k][b] for a in range(3)) for b in range(3)] for k in range(3)]
        ker = linalg.nullspace(ad_d)
        w = next(v for v in ker + std if linalg.rank([d, v]) == 2)
        ideal = [d, w]
        e3 = _complement(ideal, std)
    basis = (tuple(ideal[0]), tuple(ideal[1]), tuple(e3))
    B = []
    for i in range(2):
        co = _coords(basis, _bracket_vec(c, basis[i], basis[2]))
        if co is None or co[2] != 0:
            raise ArithmeticError("ideal basis is not invariant")
        B.append((co[0], co[1]))
    return LieAlgebra1Jet(const, "solvable", basis, tuple(B))


def _span_basis(vectors) -> list:
    out = []
    for v in vectors:
        if any(x != 0 for x in v) and linalg.rank(out + [list(v)]) > len(out):
            out.append(list(v))
    return out


def _complement(ideal, std):
    return next(v for v in std if linalg.rank([list(u) for u in ideal] + [v]) == 3)


def lie_1jet(P: PoissonFamily, point=(0, 0, 0), eps=0) -> LieAlgebra1Jet:
    return lie_algebra_from_constants(structure_constants(P, point, eps))

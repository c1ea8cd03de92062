"""Reduction of a family to the z-form and then to the (f, g) normal form.

Stage one picks linear coordinates a, b whose bracket c = {a, b} is a third
independent coordinate, so that {x,y} = z.  Stage two removes, one
(x, y)-degree at a time, every power z^k with k >= 2 from {y,z} and {z,x}.
Once both are affine in z the Jacobi identity makes them the partial
derivatives of two potentials f, g with df ^ dg = 0.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from ..errors import OutsideTaxonomyError, PreconditionError, ReductionError
from ..jets import CoordinateChange, DifferentialObject, TruncatedSeries
from ..poisson import (PoissonFamily, fg_residual, from_fg, jacobi_residual, lie_1jet,
                       pushforward)


def xy_degree(powers) -> int:
    return powers[0] + powers[1]


def euler_potential(a: TruncatedSeries, c: TruncatedSeries) -> TruncatedSeries:
    """Potential h with h_x = a, h_y = c, assuming a_y = c_x and h(0, 0) = 0.

    Each (x, y)-homogeneous part of degree n contributes (x a_n + y c_n)/(n+1).
    """
    coeffs: dict = {}
    for src, shift in ((a, (1, 0, 0, 0)), (c, (0, 1, 0, 0))):
        for p, v in src.items():
            key = tuple(pi + si for pi, si in zip(p, shift))
            coeffs[key] = coeffs.get(key, 0) + v / (xy_degree(p) + 1)
    return a.like(coeffs)


@dataclass(frozen=True)
class ZFormFamily:
    """A family with {x,y} = z; U = {y,z} and V = {z,x}."""

    family: PoissonFamily

    def __post_init__(self):
        x, y, z, _ = TruncatedSeries.variables(*self.family.trunc)
        if self.family.bxy != z:
            raise PreconditionError("family is not in z-form ({x,y} != z)")

    @property
    def U(self) -> TruncatedSeries:
        return self.family.byz

    @property
    def V(self) -> TruncatedSeries:
        return self.family.bzx

    def z_tail(self, q: int) -> tuple[TruncatedSeries, TruncatedSeries]:
        """Parts of U, V of (x, y)-degree q carrying z^k, k >= 2."""
        sel = (lambda p: xy_degree(p) == q and p[2] >= 2)
        return self.U.select(sel), self.V.select(sel)

    def is_affine_in_z(self) -> bool:
        return all(p[2] <= 1 for s in (self.U, self.V) for p, _ in s.items())


@dataclass
class NormalFormData:
    """Potentials f, g of the normal form and the changes that produced it."""

    f: TruncatedSeries
    g: TruncatedSeries
    family: PoissonFamily
    change_log: list = field(default_factory=list)

    def total_change(self) -> CoordinateChange:
        D, E = self.f.trunc
        total = CoordinateChange.identity(D, E)
        for ch in self.change_log:
            total = total.then(ch)
        return total

    def to_record(self) -> dict:
        return {"f": self.f.to_records(), "g": self.g.to_records(),
                "change_log": [ch.to_record() for ch in self.change_log]}


def _candidate_vectors():
    basis = [(1, 0, 0), (0, 1, 0), (0, 0, 1)]
    rest = [v for v in itertools.product((0, 1, -1, 2, -2), repeat=3)
            if any(v) and v not in basis]
    return basis + rest


def reduce_to_zform(P: PoissonFamily) -> tuple[ZFormFamily, CoordinateChange]:
    """Find linear a, b with a, b, {a, b} independent and use them as x, y, z."""
    if not P.is_singular_at_origin():
        raise PreconditionError("P does not vanish at the origin for eps = 0")
    jet = lie_1jet(P)
    if jet.is_zero():
        raise OutsideTaxonomyError("1-jet is zero: outside the classification")
    if jet.matches_radial():
        raise PreconditionError(
            "1-jet isomorphic to the radial structure {x,y}=0, {y,z}=y, {z,x}=-x: "
            "the (f, g) normal form does not apply")
    D, E = P.trunc
    xs = TruncatedSeries.variables(D, E)[:3]
    cand = _candidate_vectors()
    from .. import linalg
    for u, v in itertools.combinations(cand, 2):
        if linalg.rank([u, v]) < 2:
            continue
        a = sum((xs[i].scale(u[i]) for i in range(3) if u[i]), TruncatedSeries.zero(D, E))
        b = sum((xs[i].scale(v[i]) for i in range(3) if v[i]), TruncatedSeries.zero(D, E))
        c = P.bracket(a, b)
        if linalg.rank([list(u), list(v), c.linear_coefficients()]) == 3:
            ch = CoordinateChange((a, b, c), "zform")
            fam = pushforward(P, ch)
            return ZFormFamily(fam), ch
    raise ReductionError("no coordinate pair found for the z-form")  # unreachable


def lemma51_step(Z: ZFormFamily, q: int) -> tuple[ZFormFamily, CoordinateChange]:
    """Make the (x, y)-degree q parts of {y,z}, {z,x} affine in z.

    Lower (x, y)-degrees are untouched.  The change is the composite of
    z -> z (1 + e), x -> x + r and a final reset z -> {x, y}.
    """
    fam = Z.family
    D, E = fam.trunc
    x, y, z, _ = TruncatedSeries.variables(D, E)
    TU, TV = Z.z_tail(q)
    if TU.is_zero() and TV.is_zero():
        return Z, CoordinateChange.identity(D, E)
    # the tails are closed: d/dy TU = d/dx TV, a consequence of Jacobi
    if (TU.partial(1) - TV.partial(0)).truncated(D - 1):
        raise ReductionError(f"z-tails at degree {q} are not closed; input is not Poisson")
    # z e with e_x = TU/z^2, e_y = TV/z^2; dividing first keeps the top degree
    z_e = euler_potential(TU.div_var("z"), TV.div_var("z"))
    ch1 = CoordinateChange((x, y, z + z_e), f"tail{q}")
    fam1 = pushforward(fam, ch1)
    # {x, y} = z (1 + c) with c of (x, y)-degree >= q + 1
    c = fam1.bxy.div_var("z") - 1
    r = -c.select(lambda p: xy_degree(p) == q + 1).antiderivative(0)
    xhat = x + r
    ch2 = CoordinateChange((xhat, y, fam1.bracket(xhat, y)), f"shear{q}")
    fam2 = pushforward(fam1, ch2)
    out = ZFormFamily(fam2)
    tu, tv = out.z_tail(q)
    if tu or tv:
        raise ReductionError(f"degree {q} tail survived the step")
    return out, ch1.then(ch2)


def reduce_13(P: PoissonFamily, D: int | None = None) -> NormalFormData:
    """Potentials f, g with P equivalent to {x,y}=z, {y,z}=f_x+z g_x, {z,x}=f_y+z g_y."""
    if D is not None and D != P.trunc[0]:
        P = PoissonFamily(*(b.with_trunc(D, P.trunc[1]) for b in (P.bxy, P.byz, P.bzx)))
    D, E = P.trunc
    Z, ch0 = reduce_to_zform(P)
    log = [ch0]
    for q in range(D - 1):
        Z, ch = lemma51_step(Z, q)
        if not ch.is_identity():
            log.append(ch)
    if not Z.is_affine_in_z():
        raise ReductionError("z-tails remain after all stages")
    U, V = Z.U, Z.V
    a, b = U.select(lambda p: p[2] == 0), U.select(lambda p: p[2] == 1).div_var("z")
    c, d = V.select(lambda p: p[2] == 0), V.select(lambda p: p[2] == 1).div_var("z")
    f = euler_potential(a, c)
    g = euler_potential(b, d)
    nf = NormalFormData(f, g, Z.family, log)
    check_13(nf)
    return nf


def check_13(nf: NormalFormData) -> None:
    """Exact consistency of the potentials with the reduced family below degree D."""
    D = nf.f.trunc[0]
    res = fg_residual(nf.f, nf.g)
    if not res.is_zero():
        raise ReductionError(f"df ^ dg != 0: {res.components[2]}")
    rebuilt = from_fg(nf.f, nf.g)
    if rebuilt.truncated(D - 1) != nf.family.truncated(D - 1):
        raise ReductionError("reduced family does not have the (f, g) shape")
    if jacobi_residual(nf.family):
        raise ReductionError("Jacobi identity lost during reduction")


def verify_14(nf_or_f, g: TruncatedSeries | None = None) -> DifferentialObject:
    """df ^ dg as a 2-form (zero for a valid normal form)."""
    if g is None:
        return fg_residual(nf_or_f.f, nf_or_f.g)
    return fg_residual(nf_or_f, g)

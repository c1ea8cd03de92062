"""Singularity classes of germs with nonzero 1-jet.

The class is read off in two steps.  The curl at the origin and the 1-jet
decide V; otherwise the potentials f, g of the normal form decide by the
quadratic type of j2 f0 and, for N germs, of j2 g0.  V germs get a sub-type
from the eigenvalues of the planar field, A germs the data (m, delta) of their
versal form and N germs the invariants kappa_1, kappa_2.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from gmpy2 import mpq

from .errors import OutsideTaxonomyError, Poisson3Error, PreconditionError, ReductionError
from .jets import TruncatedSeries, rational_str
from .normal_form.a_type import ANormalForm, a_normal_form
from .normal_form.n_type import NFamilyNormalForm, n_reduce
from .normal_form.planar import (EigenPair, PlanarFamily, poincare_dulac, saddle_node_data,
                                 v_reduce)
from .normal_form.zform import NormalFormData, reduce_13
from .poisson import LieAlgebra1Jet, PoissonFamily, curl_at_origin, lie_1jet

TAGS = ("V", "so3", "sl2", "Aplus", "Aminus", "Nplus", "Nminus", "N_undetermined",
        "OutsideTaxonomy")

QUADFORM_CLASSES = ("pos_def", "neg_def", "indefinite", "rank1_plus", "rank1_minus", "zero")

# normal-form identifiers of V germs
NONRESONANT = "nonresonant"          # {x,y} = z, {z,y} = theta x + z
RESONANT_NODE = "resonant_node"      # {x,y} = N x + delta z^N, {z,y} = z
RESONANT_SADDLE = "resonant_saddle"  # {x,y} = -p/q x + delta x^(q+1) z^p + ..., {z,y} = z
SADDLE_NODE = "saddle_node"          # {x,y} = delta^(p+1) x^(p+1) + a x^(2p+1), {z,y} = z


@dataclass(frozen=True)
class VSubtype:
    """Kind of a V germ and the parameters of its normal form.

    ``params`` holds theta (nonresonant), N and delta (resonant node), p, q
    and delta (resonant saddle) or p, delta and the modulus truncation a
    (saddle-node).  A parameter is None when it needs more jet than available.
    """

    kind: str  # node | saddle | focus | saddle_node | saddle_node_exclusive_or_undetermined
    resonance: tuple | None
    normal_form_id: str | None
    params: dict = field(default_factory=dict)
    eigen: EigenPair | None = None

    def discrete_key(self) -> tuple:
        keep = {k: v for k, v in self.params.items() if k in ("N", "p", "q", "delta")}
        return (self.kind, self.resonance, self.normal_form_id, tuple(sorted(keep.items())))

    def to_record(self) -> dict:
        rec = {"kind": self.kind, "normal_form": self.normal_form_id}
        if self.resonance is not None:
            rec["resonance"] = list(self.resonance)
        for k, v in self.params.items():
            rec[k] = rational_str(v) if isinstance(v, (mpq, Fraction)) else v
        if self.eigen is not None:
            rec["eigen"] = self.eigen.to_record()
        return rec


@dataclass(frozen=True)
class KappaInvariants:
    """kappa_1 = lambda_0(0) mu_1(0) and kappa_2 = lambda_0(0)^2 - 8 kappa_1."""

    kappa1: mpq
    kappa2: mpq

    @classmethod
    def from_lambda_mu(cls, lambda0, mu1) -> "KappaInvariants":
        k1 = mpq(lambda0) * mpq(mu1)
        return cls(k1, mpq(lambda0) ** 2 - 8 * k1)

    def signs(self) -> tuple[int, int]:
        return (_sign(self.kappa1), _sign(self.kappa2))

    def v_kind(self) -> str:
        """Kind of the V points on the singular curve of a generic unfolding."""
        if self.kappa2 < 0:
            return "focus"
        return "node" if self.kappa1 > 0 else "saddle"

    def to_record(self) -> dict:
        return {"kappa1": rational_str(self.kappa1), "kappa2": rational_str(self.kappa2)}


@dataclass(frozen=True)
class SingularityClass:
    """Class tag of a germ and its detail record."""

    tag: str
    detail: object = None
    reason: str = ""

    def discrete_key(self) -> tuple:
        d = self.detail
        if isinstance(d, VSubtype):
            return (self.tag, d.discrete_key())
        if isinstance(d, AInvariants):
            return (self.tag, d.m, d.delta, d.isolated)
        if isinstance(d, NDetail):
            return (self.tag, None if d.kappas is None else d.kappas.signs())
        return (self.tag,)

    def to_record(self) -> dict:
        rec = {"class": self.tag}
        if self.detail is not None:
            rec.update(self.detail.to_record())
        if self.reason:
            rec["reason"] = self.reason
        return rec


@dataclass(frozen=True)
class AInvariants:
    sign: int
    m: int | None
    delta: int | None
    isolated: bool
    normal_form: ANormalForm | None = None

    @property
    def generic(self) -> bool:
        return self.m == 2

    def to_record(self) -> dict:
        rec = {"sign": "+" if self.sign > 0 else "-", "isolated_at_D": self.isolated,
               "m": self.m, "delta": self.delta, "generic": self.generic}
        if self.normal_form is not None:
            rec["normal_form"] = self.normal_form.to_record()
        return rec


@dataclass(frozen=True)
class NDetail:
    sign: int | None
    kappas: KappaInvariants | None
    normal_form: NFamilyNormalForm | None = None

    def to_record(self) -> dict:
        rec = {}
        if self.kappas is not None:
            rec.update(self.kappas.to_record())
        if self.normal_form is not None:
            nf = self.normal_form
            rec["generic_singularity"] = nf.generic_singularity
            rec["generic_unfolding"] = nf.generic_unfolding
        return rec


def _sign(v) -> int:
    return (v > 0) - (v < 0)


# -- quadratic forms -------------------------------------------------------------

def quadform_class(q2: TruncatedSeries) -> str:
    """Exact signature class of a binary quadratic form in (x, y)."""
    for p, _ in q2.items():
        if p[2] or p[3] or p[0] + p[1] != 2:
            raise ValueError("quadform_class needs a homogeneous quadratic form in x, y")
    a, b, c = q2[(2, 0, 0, 0)], q2[(1, 1, 0, 0)], q2[(0, 2, 0, 0)]
    d = 4 * a * c - b * b
    if d > 0:
        return "pos_def" if a > 0 else "neg_def"
    if d < 0:
        return "indefinite"
    if a > 0 or c > 0:
        return "rank1_plus"
    if a < 0 or c < 0:
        return "rank1_minus"
    return "zero"


def _j2(s: TruncatedSeries) -> TruncatedSeries:
    return s.at_eps0().select(lambda p: p[0] + p[1] + p[2] == 2)


# -- 1-jet -------------------------------------------------------------------------

def classify_1jet(L: LieAlgebra1Jet) -> str:
    """Coarse class from the Lie algebra of the 1-jet: V, Aplus, Aminus, N, so3, sl2
    or OutsideTaxonomy."""
    if L.is_zero():
        return "OutsideTaxonomy"
    if L.kind in ("so3", "sl2"):
        return L.kind
    tr, det = L.trace_B, L.det_B
    if tr != 0:
        return "V"
    if det > 0:
        return "Aplus"
    if det < 0:
        return "Aminus"
    return "N"


# -- V sub-types --------------------------------------------------------------------

def v_subtype(e: EigenPair, planar: PlanarFamily | None = None) -> VSubtype:
    """Kind and normal form of a V germ with eigenvalue data ``e``.

    The eigenvalues are defined up to a common factor.  With ``planar`` the
    resonant and saddle-node parameters that depend on higher jets are filled
    in as far as the truncation allows.
    """
    if e.trace == 0:
        raise PreconditionError("eigenvalues sum to zero: not a V singularity")
    D = planar.alpha.trunc[0] if planar is not None else 0
    if e.det == 0:
        params = {"p": None, "delta": None, "a": None}
        kind = "saddle_node"
        if planar is not None:
            sn = saddle_node_data(planar.alpha, planar.beta)
            if sn.p is None:
                kind = "saddle_node_exclusive_or_undetermined"
            params = {"p": sn.p, "delta": sn.delta, "a": sn.modulus}
        return VSubtype(kind, None, SADDLE_NODE, params, e)
    theta = -e.det / (e.trace * e.trace)
    if not e.is_real():
        return VSubtype("focus", None, NONRESONANT, {"theta": theta}, e)
    kind = "node" if e.det > 0 else "saddle"
    vals = e.rational_values()
    if vals is None:
        return VSubtype(kind, None, NONRESONANT, {"theta": theta}, e)
    small, big = sorted(vals, key=abs)
    ratio = abs(big) / abs(small)
    if kind == "node":
        if ratio.denominator != 1:
            return VSubtype(kind, None, NONRESONANT, {"theta": theta}, e)
        N = int(ratio)
        return VSubtype(kind, ("node", N), RESONANT_NODE,
                        {"N": N, "delta": _node_delta(planar, N, small, big)}, e)
    pq = abs(small) / abs(big)
    p, q = int(pq.numerator), int(pq.denominator)
    delta = None
    if planar is not None and p + q + 1 <= D:
        delta = _saddle_delta(planar, p, q, small, big)
    return VSubtype(kind, ("saddle", p, q), RESONANT_SADDLE, {"p": p, "q": q, "delta": delta}, e)


def _node_delta(planar, N, small, big):
    """0 when the resonant monomial is absent (linearizable), 1 otherwise."""
    if planar is None:
        return None
    if N == 1:
        M = planar.linear_matrix()
        scalar = M[0][1] == 0 and M[1][0] == 0 and M[0][0] == M[1][1]
        return 0 if scalar else 1
    if N > planar.alpha.trunc[0]:
        return None
    # u: eigenvalue big (x slot), w: eigenvalue small (z slot); resonant term w^N in u'
    u_dot, _ = poincare_dulac(planar.alpha, planar.beta, (big, small), N)
    return 0 if u_dot[(0, 0, N, 0)] == 0 else 1


def _saddle_delta(planar, p, q, small, big):
    """0 or 1: presence of the first orbital resonant term after rescaling.

    The sign can be absorbed by x -> -x or z -> -z since p and q are not both even.
    """
    u_dot, w_dot = poincare_dulac(planar.alpha, planar.beta, (small, big), p + q + 1)
    a1 = u_dot[(q + 1, 0, p, 0)] / big
    b1 = w_dot[(q, 0, p + 1, 0)] / big
    c1 = a1 + mpq(p, q) * b1
    return 0 if c1 == 0 else 1


# -- A and N invariants ---------------------------------------------------------------

def a_invariants(nf: NormalFormData, P: PoissonFamily | None = None) -> AInvariants:
    P = P if P is not None else nf.family
    cls = quadform_class(_j2(nf.f))
    sign = 1 if cls == "rank1_plus" else -1
    try:
        anf = a_normal_form(P, None, nf)
    except ReductionError:
        return AInvariants(sign, None, None, False)
    return AInvariants(anf.sign, anf.m, anf.delta, True, anf)


def kappas(nf: NFamilyNormalForm) -> KappaInvariants:
    return KappaInvariants(nf.kappa1, nf.kappa2)


# -- full classification ------------------------------------------------------------------

def is_v_by_curl(P: PoissonFamily) -> bool:
    """The V criterion on the 1-jet: nonzero curl at 0 or the radial 1-jet."""
    P0 = P.at_eps0()
    return any(v != 0 for v in curl_at_origin(P0)) or lie_1jet(P0).matches_radial()


def classify(P: PoissonFamily, D: int | None = None) -> SingularityClass:
    """Class of the germ of P at the origin for eps = 0, with family data where available."""
    if not P.is_singular_at_origin():
        raise PreconditionError("P does not vanish at the origin for eps = 0")
    if D is not None and D != P.trunc[0]:
        P = PoissonFamily(*(b.with_trunc(D, P.trunc[1]) for b in (P.bxy, P.byz, P.bzx)))
    jet = lie_1jet(P)
    if jet.is_zero():
        return SingularityClass("OutsideTaxonomy", reason="1-jet is zero")
    if is_v_by_curl(P):
        return SingularityClass("V", _v_detail(P, jet))
    try:
        nf = reduce_13(P)
    except OutsideTaxonomyError as exc:
        return SingularityClass("OutsideTaxonomy", reason=str(exc))
    if nf.g.at_eps0().truncated(1):
        return SingularityClass("V", _v_detail(P, jet))
    fclass = quadform_class(_j2(nf.f))
    if fclass == "pos_def":
        return SingularityClass("so3")
    if fclass in ("neg_def", "indefinite"):
        return SingularityClass("sl2")
    if fclass in ("rank1_plus", "rank1_minus"):
        inv = a_invariants(nf, P)
        return SingularityClass("Aplus" if fclass == "rank1_plus" else "Aminus", inv)
    gclass = quadform_class(_j2(nf.g))
    if gclass in ("pos_def", "neg_def", "indefinite"):
        tag = "Nminus" if gclass == "indefinite" else "Nplus"
        try:
            nn = n_reduce(P, None, nf)
            return SingularityClass(tag, NDetail(nn.sign, kappas(nn), nn))
        except Poisson3Error as exc:
            return SingularityClass(tag, NDetail(None, None), reason=str(exc))
    return SingularityClass("N_undetermined",
                            reason="j2 g0 is degenerate: outside the N+/N- cases")


def _v_detail(P: PoissonFamily, jet: LieAlgebra1Jet) -> VSubtype:
    try:
        planar, _ = v_reduce(P)
        return v_subtype(planar.eigen, planar)
    except Poisson3Error:
        # fall back on the 1-jet: the action on the ideal has the same spectrum up to scale
        return v_subtype(EigenPair.from_matrix(jet.B))


__all__ = ["AInvariants", "KappaInvariants", "NDetail", "QUADFORM_CLASSES", "SingularityClass",
           "TAGS", "VSubtype", "a_invariants", "classify", "classify_1jet", "is_v_by_curl",
           "kappas", "quadform_class", "v_subtype"]

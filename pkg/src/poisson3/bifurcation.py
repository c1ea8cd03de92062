"""Bifurcation scenarios of one-parameter families and their numerical check.

``predict`` reads the scenario off the class of the germ at eps = 0 and its
unfolding data.  ``verify`` samples the singular set for a grid of eps values
(Gauss-Newton from a seed grid), labels every point by the Lie algebra of the
linearization and compares counts, set dimensions and labels with the
prediction.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse.csgraph import connected_components

from .classifier import KappaInvariants, SingularityClass, classify
from .jets import rational_str
from .normal_form.planar import saddle_node_data, v_reduce
from .poisson import PoissonFamily

DEFAULT_GRID = (-0.1, 0.1, 21)
DEFAULT_BOX = 1.0
DEFAULT_TOL = 1e-10
DEFAULT_SEEDS = 13
SIGN_MARGIN = 1e-6
# below this |eps| the split points are too close for a sign decision at SIGN_MARGIN
RESOLUTION_FLOOR = 1e-3

SCENARIOS = ("saddle_node_V", "A_split", "N_a", "N_b", "N_c", "none_irremovable", "unknown")


def _sgn(v) -> int:
    return (v > 0) - (v < 0)


# -- prediction ---------------------------------------------------------------------

@dataclass(frozen=True)
class SidePrediction:
    """Expected singular set on one side of eps = 0.

    ``points`` lists the classes of the isolated points, ``curves`` the V kind
    of each curve component ("saddle", "node", "focus", ...).
    """

    points: tuple = ()
    curves: tuple = ()
    shape: str = ""  # circle | hyperbola | lines | curve

    def to_record(self) -> dict:
        rec = {"points": list(self.points), "curves": list(self.curves)}
        if self.shape:
            rec["shape"] = self.shape
        return rec


@dataclass
class BifurcationReport:
    scenario: str
    singularity: SingularityClass
    negative: SidePrediction | None = None
    positive: SidePrediction | None = None
    kappas: KappaInvariants | None = None
    genericity: dict = field(default_factory=dict)
    radius_level: object = None  # exact rho with q = rho eps on the curve (N+)
    radius_squared: float | None = None  # r^2 / eps in the unit form
    reason: str = ""

    def side(self, eps: float) -> SidePrediction | None:
        if eps > 0:
            return self.positive
        if eps < 0:
            return self.negative
        return None

    def to_record(self) -> dict:
        rec = {"scenario": self.scenario, "class": self.singularity.to_record(),
               "genericity": self.genericity}
        if self.negative is not None:
            rec["eps_negative"] = self.negative.to_record()
        if self.positive is not None:
            rec["eps_positive"] = self.positive.to_record()
        if self.kappas is not None:
            rec["kappas"] = self.kappas.to_record()
        if self.radius_level is not None:
            rec["radius_level"] = rational_str(self.radius_level)
        if self.radius_squared is not None:
            rec["radius_squared_per_eps"] = self.radius_squared
        if self.reason:
            rec["reason"] = self.reason
        return rec


def _sides(on_side: int, there: SidePrediction, other: SidePrediction):
    return (there, other) if on_side < 0 else (other, there)


def predict(P: PoissonFamily, D: int | None = None) -> BifurcationReport:
    """Scenario of the family from the class of P_0 and the unfolding data."""
    cls = classify(P, D)
    tag = cls.tag
    if tag in ("so3", "sl2"):
        side = SidePrediction((tag,))
        return BifurcationReport("none_irremovable", cls, side, side)
    if tag == "V":
        return _predict_v(P, cls)
    if tag in ("Aplus", "Aminus"):
        return _predict_a(cls)
    if tag in ("Nplus", "Nminus"):
        return _predict_n(cls)
    return BifurcationReport("unknown", cls, reason=cls.reason or f"no scenario for {tag}")


def _predict_v(P: PoissonFamily, cls: SingularityClass) -> BifurcationReport:
    sub = cls.detail
    if sub.kind in ("node", "saddle", "focus"):
        side = SidePrediction((), (sub.kind,), "curve")
        return BifurcationReport("none_irremovable", cls, side, side)
    if sub.kind != "saddle_node":
        return BifurcationReport("unknown", cls, reason="saddle-node of undetermined order")
    planar, _ = v_reduce(P)
    sn = saddle_node_data(planar.alpha, planar.beta)
    gen = {"p_equals_1": sn.p == 1}
    if sn.p != 1:
        return BifurcationReport("unknown", cls, genericity=gen,
                                 reason="saddle-node is not generic (p != 1)")
    f0p, _, f2 = sn.unfolding
    gen["f0_prime_nonzero"] = f0p != 0
    if f0p == 0:
        return BifurcationReport("unknown", cls, genericity=gen,
                                 reason="unfolding is not generic: f0'(0) = 0")
    on = _sgn(-f0p * f2)
    there = SidePrediction((), ("saddle", "node"), "lines")
    neg, pos = _sides(on, there, SidePrediction())
    return BifurcationReport("saddle_node_V", cls, neg, pos, genericity=gen)


def _predict_a(cls: SingularityClass) -> BifurcationReport:
    inv = cls.detail
    gen = {"m_equals_2": inv.m == 2}
    if inv.m != 2 or inv.normal_form is None:
        return BifurcationReport("unknown", cls, genericity=gen,
                                 reason="A singularity is not generic (m != 2)")
    h0p = inv.normal_form.h_prime0(0)
    gen["h0_prime_nonzero"] = h0p != 0
    if h0p == 0:
        return BifurcationReport("unknown", cls, genericity=gen,
                                 reason="unfolding is not generic: h0'(0) = 0")
    pts = ("so3", "sl2") if cls.tag == "Aplus" else ("sl2", "sl2")
    neg, pos = _sides(-_sgn(h0p), SidePrediction(pts), SidePrediction())
    return BifurcationReport("A_split", cls, neg, pos, genericity=gen)


def _predict_n(cls: SingularityClass) -> BifurcationReport:
    det = cls.detail
    if det is None or det.normal_form is None:
        return BifurcationReport("unknown", cls, reason=cls.reason or "N normal form failed")
    nf, kap = det.normal_form, det.kappas
    gen = {"mu1_nonzero": nf.generic_singularity, "mu0_prime_mu1_nonzero": nf.generic_unfolding}
    rep = dict(kappas=kap, genericity=gen, radius_level=nf.radius_level,
               radius_squared=nf.radius_squared())
    if not nf.generic_unfolding:
        return BifurcationReport("unknown", cls, reason="unfolding is not generic", **rep)
    vk = kap.v_kind()
    if cls.tag == "Nminus":
        side = SidePrediction(("sl2",), (vk, vk), "hyperbola")
        return BifurcationReport("N_c", cls, side, side, **rep)
    if kap.kappa1 > 0:
        there, other, name = SidePrediction(("sl2",), (vk,), "circle"), SidePrediction(("so3",)), "N_a"
    else:
        there, other, name = SidePrediction(("so3",), (vk,), "circle"), SidePrediction(("sl2",)), "N_b"
    neg, pos = _sides(nf.circle_side, there, other)
    return BifurcationReport(name, cls, neg, pos, **rep)


# -- numerics ------------------------------------------------------------------------

class NumericFamily:
    """Float evaluation of F = ({y,z}, {z,x}, {x,y}) and its Jacobian at fixed eps."""

    def __init__(self, P: PoissonFamily, eps: float):
        self.eps = float(eps)
        self.terms = []
        for b in P.vector:
            powers, coeffs = b.float_terms()
            c = coeffs * self.eps ** powers[:, 3] if len(coeffs) else coeffs
            keep = c != 0
            self.terms.append((powers[keep, :3], c[keep]))

    @staticmethod
    def _eval(powers, coeffs, pts):
        if not len(coeffs):
            return np.zeros(len(pts))
        mon = np.prod(pts[:, None, :] ** powers[None, :, :], axis=2)
        return mon @ coeffs

    def values(self, pts: np.ndarray) -> np.ndarray:
        return np.stack([self._eval(p, c, pts) for p, c in self.terms], axis=1)

    def jacobian(self, pts: np.ndarray) -> np.ndarray:
        J = np.zeros((len(pts), 3, 3))
        for i, (powers, coeffs) in enumerate(self.terms):
            for k in range(3):
                mask = powers[:, k] > 0
                if not mask.any():
                    continue
                pw = powers[mask].copy()
                c = coeffs[mask] * pw[:, k]
                pw[:, k] -= 1
                J[:, i, k] = self._eval(pw, c, pts)
        return J

    def bracket_jacobian(self, pt) -> np.ndarray:
        """d{x_a, x_b}/dx_k at a point as c[a][b][k]."""
        J = self.jacobian(np.asarray(pt, dtype=float)[None, :])[0]
        # rows of J: {y,z}, {z,x}, {x,y}
        c = np.zeros((3, 3, 3))
        c[1, 2], c[2, 0], c[0, 1] = J[0], J[1], J[2]
        c[2, 1], c[0, 2], c[1, 0] = -J[0], -J[1], -J[2]
        return c


@dataclass
class SingularPointRecord:
    eps: float
    point: tuple
    residual: float
    label: str
    dimension: int  # 0 isolated, 1 curve sample
    diagnostics: dict = field(default_factory=dict)
    component: int | None = None

    def to_record(self) -> dict:
        rec = {"eps": self.eps, "point": list(self.point), "residual": self.residual,
               "class": self.label, "dimension": self.dimension,
               "diagnostics": self.diagnostics}
        if self.component is not None:
            rec["component"] = self.component
        return rec


def find_singular_points(P: PoissonFamily, eps: float, box: float = DEFAULT_BOX,
                         tol: float = DEFAULT_TOL, seeds_per_axis: int = DEFAULT_SEEDS,
                         max_iter: int = 60, classify_points: bool = True
                         ) -> list[SingularPointRecord]:
    """Singular points of P_eps in the cube |x|, |y|, |z| <= box."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    num = NumericFamily(P, eps)
    g = np.linspace(-box, box, seeds_per_axis)
    pts = np.array(np.meshgrid(g, g, g, indexing="ij")).reshape(3, -1).T
    for _ in range(max_iter):
        F = num.values(pts)
        J = num.jacobian(pts)
        step = np.einsum("nij,nj->ni", np.linalg.pinv(J, rcond=1e-10), F)
        pts = pts - step
        pts = np.clip(pts, -4 * box, 4 * box)
        if np.all(np.abs(step) < tol * 1e-2):
            break
    res = np.linalg.norm(num.values(pts), axis=1)
    ok = (res <= tol) & np.all(np.abs(pts) <= box * (1 + 1e-9), axis=1)
    pts, res = pts[ok], res[ok]
    # deduplicate within 10 tol
    order = np.lexsort(pts.T[::-1])
    kept, kept_res = [], []
    for idx in order:
        p = pts[idx]
        if kept and np.min(np.linalg.norm(np.array(kept) - p, axis=1)) <= 10 * tol:
            continue
        kept.append(p)
        kept_res.append(res[idx])
    out = []
    for p, r in zip(kept, kept_res):
        J = num.jacobian(p[None, :])[0]
        sv = np.linalg.svd(J, compute_uv=False)
        scale = max(sv[0], 1e-300)
        rank = int(np.sum(sv > 1e-7 * max(scale, 1.0)))
        label, diag = classify_point(P, eps, p, num=num) if classify_points else ("", {})
        diag["singular_values"] = [float(s) for s in sv]
        out.append(SingularPointRecord(float(eps), tuple(float(v) for v in p), float(r),
                                       label, 0 if rank == 3 else 1, diag))
    return out


def classify_point(P: PoissonFamily, eps: float, point, tol: float = DEFAULT_TOL,
                   margin: float = SIGN_MARGIN, num: NumericFamily | None = None):
    """Class of the linearization at a singular point: so3, sl2, V(kind) or unresolved.

    Returns (label, diagnostics).  Every sign decision must clear ``margin``
    relative to the size of the linearization; otherwise the label is
    "unresolved".
    """
    num = num or NumericFamily(P, eps)
    c = num.bracket_jacobian(point)
    scale = float(np.max(np.abs(c)))
    diag = {"scale": scale}
    if scale <= margin:
        return "unresolved", diag
    c = c / scale
    ad = np.transpose(c, (0, 2, 1))  # ad[a][k][b] = c[a][b][k]
    tau = np.array([np.trace(ad[a]) for a in range(3)])
    diag["tau"] = tau.tolist()
    if np.linalg.norm(tau) > margin:
        # ideal I = ker tau, e3 with tau(e3) = 1
        e3 = tau / np.dot(tau, tau)
        _, _, vt = np.linalg.svd(tau[None, :])
        basis = vt[1:]
        B = np.zeros((2, 2))
        for i in range(2):
            br = np.einsum("a,b,abk->k", basis[i], e3, c)
            B[i] = basis @ br
        tr, det = np.trace(B), np.linalg.det(B)
        disc = tr * tr - 4 * det
        diag.update(trace=float(tr), det=float(det))
        t2 = tr * tr
        if abs(det) <= margin * t2:
            return "V(saddle_node)", diag
        if det < 0:
            return "V(saddle)", diag
        if disc < -margin * t2:
            return "V(focus)", diag
        return "V(node)", diag
    derived = np.array([c[a, b] for a in range(3) for b in range(a + 1, 3)])
    sv = np.linalg.svd(derived, compute_uv=False)
    if sv[-1] <= margin:
        return "unresolved", diag
    killing = np.einsum("aik,bki->ab", ad, ad)
    ev = np.linalg.eigvalsh(killing)
    diag["killing"] = ev.tolist()
    if np.min(np.abs(ev)) <= margin * np.max(np.abs(ev)):
        return "unresolved", diag
    return ("so3" if np.all(ev < 0) else "sl2"), diag


def _project(num: NumericFamily, pts: np.ndarray, iters: int = 30) -> np.ndarray:
    for _ in range(iters):
        step = np.einsum("nij,nj->ni", np.linalg.pinv(num.jacobian(pts), rcond=1e-10),
                         num.values(pts))
        pts = pts - step
    return pts


def _chord_on_curve(num: NumericFamily, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """For each pair (A[i], B[i]) of curve samples: does the chord follow the curve?

    The quarter points of the chord are projected back onto the singular set;
    the pair is linked when every projection lands on a non-isolated singular
    point within a quarter of the chord length.
    """
    L = np.linalg.norm(B - A, axis=1)
    ok = np.ones(len(A), dtype=bool)
    for t in (0.25, 0.5, 0.75):
        M = (1 - t) * A + t * B
        Q = _project(num, M)
        res = np.linalg.norm(num.values(Q), axis=1)
        sv = np.linalg.svd(num.jacobian(Q), compute_uv=False)
        on_curve = sv[:, -1] <= 1e-7 * np.maximum(sv[:, 0], 1.0)
        ok &= (res <= 1e-8) & on_curve & (np.linalg.norm(Q - M, axis=1) <= 0.25 * L)
    return ok


def _components(samples: list[SingularPointRecord], link: float,
                num: NumericFamily | None = None) -> int:
    """Connected components of the curve samples.

    Samples closer than ``link`` are candidate neighbours; with ``num`` a
    candidate edge is kept only when its chord follows the singular set, so
    that nearby branches are not merged.
    """
    if not samples:
        return 0
    X = np.array([s.point for s in samples])
    d = np.linalg.norm(X[:, None, :] - X[None, :, :], axis=2)
    i, j = np.nonzero(np.triu(d <= link, 1))
    if num is None:
        keep_i, keep_j = i, j
    else:
        # Kruskal order: test only edges that would join two components
        order = np.argsort(d[i, j], kind="stable")
        i, j = i[order], j[order]
        parent = np.arange(len(X))

        def find(a):
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        keep_i, keep_j = [], []
        pending = np.ones(len(i), dtype=bool)
        while True:
            pending &= np.array([find(a) != find(b) for a, b in zip(i, j)], dtype=bool)
            idx = np.nonzero(pending)[0][:64]
            if not len(idx):
                break
            pending[idx] = False
            passed = _chord_on_curve(num, X[i[idx]], X[j[idx]])
            for k in idx[passed]:
                parent[find(i[k])] = find(j[k])
                keep_i.append(i[k])
                keep_j.append(j[k])
    adj = np.zeros((len(X), len(X)), dtype=bool)
    adj[keep_i, keep_j] = True
    n, labels = connected_components(adj, directed=False)
    for s, lab in zip(samples, labels):
        s.component = int(lab)
    return n


# -- verification -----------------------------------------------------------------------

@dataclass
class EpsObservation:
    eps: float
    points: list
    isolated: list
    curves: list  # per component: sorted list of labels
    verdict: str  # match | mismatch | skipped
    notes: list = field(default_factory=list)

    def to_record(self) -> dict:
        return {"eps": self.eps, "verdict": self.verdict, "isolated": self.isolated,
                "curves": self.curves, "notes": self.notes,
                "points": [p.to_record() for p in self.points]}


@dataclass
class VerificationReport:
    prediction: BifurcationReport
    observations: list
    settings: dict

    @property
    def verdict(self) -> str:
        checked = [o for o in self.observations if o.verdict != "skipped"]
        if not checked:
            return "inconclusive"
        return "match" if all(o.verdict == "match" for o in checked) else "mismatch"

    def to_record(self) -> dict:
        return {"verdict": self.verdict, "prediction": self.prediction.to_record(),
                "settings": self.settings,
                "observations": [o.to_record() for o in self.observations]}


def thread_count() -> int:
    env = os.environ.get("POISSON3_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return max(1, min(4, os.cpu_count() or 1))


def eps_grid(a: float, b: float, n: int) -> list[float]:
    if n < 1:
        raise ValueError("grid needs at least one point")
    return [float(v) for v in np.linspace(a, b, n)]


def observe(P: PoissonFamily, eps: float, box: float, tol: float,
            seeds_per_axis: int = DEFAULT_SEEDS) -> EpsObservation:
    pts = find_singular_points(P, eps, box, tol, seeds_per_axis)
    isolated = sorted(p.label for p in pts if p.dimension == 0)
    curve_pts = [p for p in pts if p.dimension == 1]
    if abs(eps) < RESOLUTION_FLOOR:
        # no verdict is drawn here; skip the component analysis
        return EpsObservation(eps, pts, isolated, [], "skipped")
    spacing = 2 * box / max(seeds_per_axis - 1, 1)
    n = _components(curve_pts, 3 * spacing, NumericFamily(P, eps))
    curves = [sorted({p.label for p in curve_pts if p.component == k}) for k in range(n)]
    return EpsObservation(eps, pts, isolated, curves, "skipped")


def compare(obs: EpsObservation, side) -> None:
    """Fill in the verdict of an observation against a side prediction."""
    if abs(obs.eps) < RESOLUTION_FLOOR:
        obs.notes.append("below resolution floor")
        return
    if side is None:
        obs.notes.append("no prediction")
        return
    notes = []
    if sorted(side.points) != obs.isolated:
        notes.append(f"isolated points {obs.isolated} != predicted {sorted(side.points)}")
    want = sorted(f"V({k})" for k in side.curves)
    got = sorted(c[0] if len(c) == 1 else "mixed:" + ",".join(c) for c in obs.curves)
    if want != got:
        notes.append(f"curve components {got} != predicted {want}")
    obs.notes.extend(notes)
    obs.verdict = "mismatch" if notes else "match"


def verify(P: PoissonFamily, grid=None, box: float = DEFAULT_BOX, tol: float = DEFAULT_TOL,
           seeds_per_axis: int = DEFAULT_SEEDS, prediction: BifurcationReport | None = None,
           threads: int | None = None) -> VerificationReport:
    """Compare observed singular sets over an eps grid with the prediction."""
    grid = list(grid) if grid is not None else eps_grid(*DEFAULT_GRID)
    prediction = prediction or predict(P)
    workers = threads or thread_count()

    def one(eps):
        obs = observe(P, eps, box, tol, seeds_per_axis)
        compare(obs, prediction.side(eps))
        return obs

    if workers > 1 and len(grid) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            observations = list(pool.map(one, grid))
    else:
        observations = [one(e) for e in grid]
    settings = {"box": box, "tol": tol, "seeds_per_axis": seeds_per_axis,
                "grid": grid, "resolution_floor": RESOLUTION_FLOOR, "sign_margin": SIGN_MARGIN,
                "threads": workers}
    return VerificationReport(prediction, observations, settings)


def curve_radius(points: list[SingularPointRecord], centre=(0.0, 0.0, 0.0)) -> float | None:
    """Mean distance of the curve samples from ``centre``."""
    samples = [p.point for p in points if p.dimension == 1]
    if not samples:
        return None
    X = np.array(samples) - np.asarray(centre)
    return float(np.mean(np.linalg.norm(X, axis=1)))


__all__ = ["BifurcationReport", "DEFAULT_BOX", "DEFAULT_GRID", "DEFAULT_SEEDS", "DEFAULT_TOL",
           "EpsObservation", "NumericFamily", "RESOLUTION_FLOOR", "SCENARIOS", "SIGN_MARGIN",
           "SidePrediction", "SingularPointRecord", "VerificationReport", "classify_point",
           "compare", "curve_radius", "eps_grid", "find_singular_points", "observe", "predict",
           "thread_count", "verify"]

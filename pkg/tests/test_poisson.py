"""Poisson families: Jacobi residual, curl, pushforward, 1-jets, Pfaffian bridge."""

import random

import pytest
import sympy as sp
from gmpy2 import mpq

from poisson3.errors import IntegrabilityError, PreconditionError
from poisson3.generators import random_change, random_family, random_fg_family
from poisson3.jets import CoordinateChange, DifferentialObject, TruncatedSeries
from poisson3.poisson import (PfaffianEquation, PoissonFamily, curl, curl_at_origin, from_fg,
                              from_pfaffian, from_planar, jacobi_residual, lie_1jet,
                              lie_symmetry_residual, pushforward, to_pfaffian)

from conftest import X, Y, Z, jacobiator_oracle, radial, so3, to_sympy, truncate_sympy

x, y, z, eps = TruncatedSeries.variables(6, 2)
ZERO = TruncatedSeries.zero()
ONE = TruncatedSeries.constant(1)


# -- Jacobi residual ---------------------------------------------------------------------

def test_jacobi_so3_is_zero():
    assert jacobi_residual(so3()).is_zero()


def test_jacobi_exact_potential_is_zero():
    # omega = d(xy + z^2/2)
    assert jacobi_residual(PoissonFamily(z, y, x)).is_zero()


def test_jacobi_failure_value():
    res = jacobi_residual(PoissonFamily(z, y, x * x))
    assert res == z * (x.scale(2) - ONE)


def test_jacobi_agrees_with_direct_jacobiator():
    # with omega = ({y,z}, {z,x}, {x,y}) the coefficient of omega ^ d omega is
    # minus {x,{y,z}} + {y,{z,x}} + {z,{x,y}}
    rng = random.Random(11)
    for _ in range(8):
        a, b, c = (TruncatedSeries({(rng.randint(0, 2), rng.randint(0, 2), rng.randint(0, 2), 0):
                                    rng.randint(-2, 2) for _ in range(3)}) for _ in range(3))
        P = PoissonFamily.unchecked(a, b, c)
        assert to_sympy(jacobi_residual(P)) == truncate_sympy(-jacobiator_oracle(P), 5)


def test_jacobi_sign_convention_against_oracle():
    P = PoissonFamily.unchecked(z, y, x * x)
    assert jacobiator_oracle(P) == sp.expand(-2 * X * Z + Z)


def test_validated_constructor_rejects_non_poisson():
    from poisson3.errors import NotPoissonError
    with pytest.raises(NotPoissonError):
        PoissonFamily.validated(z, y, x * x)


# -- curl ---------------------------------------------------------------------------------

def test_curl_of_fg_form():
    P = from_fg(ZERO, x * x + y * y)
    X_ = curl(P).components
    assert X_ == (y.scale(-2), x.scale(2), ZERO)


def test_curl_of_fg_form_ignores_f():
    g = x * x + y * y
    f = (x * x + y * y) * (x * x + y * y)
    assert curl(from_fg(f, g)).components == (y.scale(-2), x.scale(2), ZERO)


def test_curl_of_linear_semisimple_is_zero():
    assert curl(so3()).is_zero()
    assert curl(PoissonFamily(z, x, -y)).is_zero()


def test_curl_of_radial_jet():
    assert curl_at_origin(radial()) == (0, 0, -2)


def test_curl_matches_sympy():
    rng = random.Random(5)
    P = random_family(rng)
    F = [to_sympy(c) for c in P.vector]
    expect = [sp.diff(F[2], Y) - sp.diff(F[1], Z), sp.diff(F[0], Z) - sp.diff(F[2], X),
              sp.diff(F[1], X) - sp.diff(F[0], Y)]
    assert [to_sympy(c) for c in curl(P).components] == [sp.expand(e) for e in expect]


# -- symmetry of the curl ---------------------------------------------------------------------

def test_curl_is_a_symmetry_of_fg_families():
    rng = random.Random(2)
    for _ in range(20):
        P = random_fg_family(rng)
        assert lie_symmetry_residual(curl(P), P).is_zero()


def test_y_translation_is_a_symmetry_of_planar_structures():
    P = from_planar(x * z + x, z * z - x)
    dy = DifferentialObject("vector", (ZERO, ONE, ZERO))
    assert lie_symmetry_residual(dy, P).is_zero()


def test_lie_derivative_value():
    # [z d/dz, z dx^dy] = z dx^dy
    P = PoissonFamily.unchecked(z, ZERO, ZERO)
    Xf = DifferentialObject("vector", (ZERO, ZERO, z))
    assert lie_symmetry_residual(Xf, P).components == (ZERO, ZERO, z)


# -- pushforward ------------------------------------------------------------------------------

def test_pushforward_identity():
    P = random_family(random.Random(1))
    assert pushforward(P, CoordinateChange.identity()) == P


def test_pushforward_so3_by_swap_and_reflection():
    # swap x, y and negate z: the rotation by pi about the line x = y, z = 0
    ch = CoordinateChange((y, x, -z))
    Q = pushforward(so3(), ch)
    assert Q == PoissonFamily(z, x, y)


def test_pushforward_preserves_jacobi():
    rng = random.Random(4)
    for _ in range(30):
        P = random_family(rng)
        assert jacobi_residual(pushforward(P, random_change(rng))).is_zero()


def test_pushforward_agrees_with_sympy_chain_rule():
    rng = random.Random(9)
    P = random_family(rng)
    ch = CoordinateChange((x + y * y, y + x * z, z))
    Q = pushforward(P, ch)
    # {u, v} of the new coordinates in the old ones, then expressed in the new ones
    M = [[0, to_sympy(P.bxy), -to_sympy(P.bzx)],
         [-to_sympy(P.bxy), 0, to_sympy(P.byz)],
         [to_sympy(P.bzx), -to_sympy(P.byz), 0]]
    ims = [to_sympy(im) for im in ch.images]
    grads = [[sp.diff(im, v) for v in (X, Y, Z)] for im in ims]

    def br(a, b):
        return sp.expand(sum(grads[a][i] * M[i][j] * grads[b][j] for i in range(3) for j in range(3)))

    inv = [to_sympy(im) for im in ch.inverse().images]
    for got, (a, b) in zip((Q.bxy, Q.byz, Q.bzx), ((0, 1), (1, 2), (2, 0))):
        expect = truncate_sympy(br(a, b).subs({X: inv[0], Y: inv[1], Z: inv[2]},
                                                simultaneous=True), 6)
        assert truncate_sympy(to_sympy(got), 5) == truncate_sympy(expect, 5)


# -- 1-jets ---------------------------------------------------------------------------------

def test_so3_jet():
    L = lie_1jet(so3())
    assert L.kind == "so3"


def test_sl2_jet():
    assert lie_1jet(PoissonFamily(z, x, -y)).kind == "sl2"


def test_radial_jet_has_nonzero_trace():
    L = lie_1jet(radial())
    assert L.matches_radial()
    assert L.trace_B != 0


def test_zero_jet_is_flagged():
    L = lie_1jet(PoissonFamily(z * z, x * x, y * y))
    assert L.is_zero()


def test_jet_at_a_regular_point_is_an_error():
    with pytest.raises(PreconditionError):
        lie_1jet(PoissonFamily(ONE, x, y))


def test_jet_structure_constants_satisfy_jacobi():
    rng = random.Random(6)
    for _ in range(10):
        P = random_family(rng)
        c = lie_1jet(P).constants
        for a in range(3):
            for b in range(3):
                for d in range(3):
                    for k in range(3):
                        s = sum(c[a][b][m] * c[m][d][k] + c[b][d][m] * c[m][a][k]
                                + c[d][a][m] * c[m][b][k] for m in range(3))
                        assert s == 0


# -- constructors -----------------------------------------------------------------------------

def test_from_fg_definite():
    P = from_fg(x * x + y * y, ZERO)
    assert (P.bxy, P.byz, P.bzx) == (z, x.scale(2), y.scale(2))


def test_from_fg_g_only():
    P = from_fg(ZERO, y)
    assert (P.bxy, P.byz, P.bzx) == (z, ZERO, z)


def test_from_fg_accepts_dependent_and_rejects_independent():
    assert from_fg(x * x, x ** 4).checked
    with pytest.raises(PreconditionError) as info:
        from_fg(x * x, y)
    assert info.value.residual.components[2] == x.scale(2)


def test_from_planar_convention_and_jacobi():
    P = from_planar(z, x)
    assert (P.bxy, P.byz, P.bzx) == (-z, x, ZERO)
    assert jacobi_residual(P).is_zero()


def test_from_planar_scalar_field_eigenvalues():
    L = lie_1jet(from_planar(x, z))
    assert L.trace_B != 0


def test_from_planar_zero_field():
    P = from_planar(ZERO, ZERO)
    assert lie_1jet(P).is_zero()


# -- Pfaffian bridge ----------------------------------------------------------------------------

def test_so3_pfaffian_form():
    eq = to_pfaffian(so3())
    assert eq.omega.components == (x, y, z)


def test_pfaffian_round_trip():
    rng = random.Random(8)
    for _ in range(10):
        P = random_family(rng)
        assert from_pfaffian(to_pfaffian(P)) == P


def test_constant_pfaffian():
    P = from_pfaffian(DifferentialObject("1-form", (ZERO, ZERO, ONE)))
    assert (P.bxy, P.byz, P.bzx) == (ONE, ZERO, ZERO)


def test_non_integrable_pfaffian_carries_residual():
    # z dx + dy: omega ^ d omega = dy ^ dz ^ dx... nonzero
    w = DifferentialObject("1-form", (z, ONE, ZERO))
    with pytest.raises(IntegrabilityError) as info:
        from_pfaffian(w)
    assert not info.value.residual.is_zero()


def test_pfaffian_document_round_trip():
    eq = to_pfaffian(so3())
    assert PfaffianEquation.from_document(eq.to_document()) == eq


def test_integrability_matches_jacobi_on_valid_and_invalid():
    rng = random.Random(10)
    cases = [random_family(rng) for _ in range(30)]
    cases += [PoissonFamily.unchecked(z + x * x.scale(k), y, x * x) for k in range(1, 11)]
    for P in cases:
        assert to_pfaffian(P).integrability_residual() == jacobi_residual(P)
        assert to_pfaffian(P).integrability_residual().is_zero() == jacobi_residual(P).is_zero()


# -- documents ------------------------------------------------------------------------------

def test_document_round_trip():
    P = random_family(random.Random(12))
    assert PoissonFamily.from_document(P.to_document({"name": "t"})) == P


def test_document_rejects_unknown_fields():
    doc = so3().to_document()
    doc["extra"] = 1
    with pytest.raises(ValueError):
        PoissonFamily.from_document(doc)


def test_document_keeps_rationals_exact():
    doc = so3().to_document()
    doc["brackets"]["xy"] = [{"powers": [0, 0, 1, 0], "coeff": "1/3"}]
    P = PoissonFamily.from_document(doc)
    assert P.bxy == z.scale(mpq(1, 3))

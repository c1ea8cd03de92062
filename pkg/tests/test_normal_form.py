"""Normal forms: z-form reduction, (f, g) potentials, planar V form, A and N families."""

import random

import pytest
from gmpy2 import mpq

from poisson3.errors import OutsideTaxonomyError, PreconditionError, ReductionError
from poisson3.generators import (random_a_family, random_change, random_family,
                                 random_fg_family, random_n_family, random_planar_family)
from poisson3.jets import CoordinateChange, TruncatedSeries
from poisson3.normal_form import (a_casimir, a_normal_form, n_reduce, reduce_13,
                                  v_reduce, verify_14)
from poisson3.normal_form.planar import EigenPair, poincare_dulac, saddle_node_data
from poisson3.normal_form.zform import ZFormFamily, check_13, lemma51_step, reduce_to_zform, xy_degree
from poisson3.poisson import (PoissonFamily, from_fg, from_planar, jacobi_residual,
                              lie_1jet, pushforward)

from conftest import n_model, radial, so3

x, y, z, eps = TruncatedSeries.variables(6, 2)
ZERO = TruncatedSeries.zero()


# -- z-form ------------------------------------------------------------------------------

def test_so3_is_already_in_zform():
    Z, ch = reduce_to_zform(so3())
    assert ch.is_identity()
    assert Z.family == so3()


def test_relabelled_linear_structure_finds_a_pair():
    P = pushforward(PoissonFamily(z, x, -y), CoordinateChange((z, x, y)))
    assert P.bxy != z
    Z, _ = reduce_to_zform(P)
    assert Z.family.bxy == z


def test_radial_jet_is_rejected():
    with pytest.raises(PreconditionError, match="radial"):
        reduce_to_zform(radial())


def test_zero_jet_is_outside_the_taxonomy():
    with pytest.raises(OutsideTaxonomyError):
        reduce_to_zform(PoissonFamily(z * z, x * x, y * y))


def test_step_on_affine_input_is_the_identity():
    Z = ZFormFamily(from_fg(x * x + y ** 3, ZERO))
    out, ch = lemma51_step(Z, 0)
    assert ch.is_identity() and out == Z


def test_step_absorbs_a_z_squared_term():
    # {x,y} = z, {y,z} = x + z^2, {z,x} = 0 is Poisson and not affine in z
    P = PoissonFamily(z, x + z * z, ZERO)
    assert jacobi_residual(P).is_zero()
    out, _ = lemma51_step(ZFormFamily(P), 0)
    tu, tv = out.z_tail(0)
    assert tu.is_zero() and tv.is_zero()
    assert jacobi_residual(out.family).is_zero()


def test_step_leaves_lower_degrees_untouched():
    rng = random.Random(3)
    for _ in range(6):
        P = pushforward(random_fg_family(rng), random_change(rng))
        Z, _ = reduce_to_zform(P)
        for q in range(3):
            Z, _ = lemma51_step(Z, q)
        before = Z
        after, _ = lemma51_step(before, 3)
        low = (lambda p: xy_degree(p) < 3 and p[2] <= 1)
        assert after.U.select(low).truncated(4) == before.U.select(low).truncated(4)
        assert after.z_tail(3) == (ZERO, ZERO)
        # the closedness the step relies on holds on every Jacobi-valid input
        tu, tv = before.z_tail(3)
        assert (tu.partial(1) - tv.partial(0)).truncated(5).is_zero()


# -- (f, g) potentials ------------------------------------------------------------------------

def test_reduce_13_round_trips_fg_input():
    nf = reduce_13(from_fg(x * x + y ** 3, ZERO))
    assert nf.f == x * x + y ** 3 and nf.g.is_zero()


def test_reduce_13_of_planar_input_gives_one_variable_potentials():
    nf = reduce_13(from_planar(x + z * z, z.scale(2) + x * x))
    used = {v for s in (nf.f, nf.g) for v in ("x", "y") if s.depends_on(v)}
    assert len(used) == 1


def test_reduce_13_on_random_pushforwards():
    rng = random.Random(5)
    for _ in range(10):
        P = pushforward(random_family(rng), random_change(rng))
        nf = reduce_13(P)
        assert verify_14(nf).is_zero()
        check_13(nf)
        assert jacobi_residual(nf.family).is_zero()


def test_change_log_replays_the_reduction():
    rng = random.Random(6)
    P = pushforward(random_fg_family(rng), random_change(rng))
    nf = reduce_13(P)
    assert pushforward(P, nf.total_change()).truncated(4) == nf.family.truncated(4)


def test_verify_14_values():
    assert verify_14(x * x, x ** 4).is_zero()
    assert verify_14(x * x, y).components[2] == x.scale(2)
    assert verify_14(ZERO, x * y + y).is_zero()


# -- planar (V) form --------------------------------------------------------------------------

def test_v_reduce_straightens_the_structure():
    rng = random.Random(7)
    for _ in range(5):
        P = pushforward(random_planar_family(rng), random_change(rng))
        planar, ch = v_reduce(P)
        Q = pushforward(P, ch).truncated(5)
        # Q = d/dy ^ (alpha d/dx + beta d/dz) with alpha, beta free of y
        assert Q.bzx.is_zero()
        assert Q.bxy == -planar.alpha.truncated(5) and Q.byz == planar.beta.truncated(5)


def test_v_reduce_eigen_ratio_matches_the_jet():
    rng = random.Random(8)
    for _ in range(20):
        P = random_planar_family(rng)
        Q = pushforward(P, random_change(rng))
        e_direct = EigenPair.from_matrix(lie_1jet(P).B)
        e_reduced = v_reduce(Q)[0].eigen
        # equal up to a common factor: det / trace^2 is scale invariant
        assert e_direct.det * e_reduced.trace ** 2 == e_reduced.det * e_direct.trace ** 2


def test_v_reduce_of_radial_jet_is_a_scalar_node():
    planar, _ = v_reduce(radial())
    assert planar.eigen.discriminant == 0 and planar.eigen.det > 0


def test_v_reduce_of_resonant_node():
    planar, _ = v_reduce(from_planar(x, z.scale(2)))
    a, b = planar.eigen.rational_values()
    assert b / a == 2


def test_v_reduce_of_so3_is_an_error():
    with pytest.raises(PreconditionError):
        v_reduce(so3())


def test_poincare_dulac_keeps_the_resonant_term():
    # u' = 2u + w^2, w' = w: the w^2 term is resonant and survives
    u_dot, w_dot = poincare_dulac(x.scale(2) + z * z, z, (2, 1), 3)
    assert u_dot[(0, 0, 2, 0)] == 1
    # a nonresonant term is removed
    u_dot, _ = poincare_dulac(x.scale(2) + x * z, z, (2, 1), 3)
    assert u_dot[(1, 0, 1, 0)] == 0


def test_saddle_node_order_and_unfolding():
    sn = saddle_node_data(x * x - eps, z)
    assert sn.p == 1 and sn.delta == 1
    assert sn.unfolding == (-1, 0, 1)


def test_saddle_node_of_higher_order():
    sn = saddle_node_data(x ** 3, z)
    assert sn.p == 2


# -- A germs -----------------------------------------------------------------------------------

def test_casimir_of_definite_potential():
    cf = a_casimir(from_fg(x * x + y * y, ZERO))
    assert cf.C == x * x + y * y + (z * z).scale(mpq(1, 2))
    assert all(r.is_zero() for r in cf.residuals())


def test_casimir_with_g_equal_to_f():
    f = x * x + y ** 3
    cf = a_casimir(from_fg(f, f))
    assert cf.G != TruncatedSeries.var("x") + (z * z).scale(mpq(1, 2))
    assert all(r.is_zero() for r in cf.residuals())


def test_casimir_rejects_v_input():
    with pytest.raises(PreconditionError):
        a_casimir(from_fg(ZERO, y))


def test_casimir_of_pushed_forward_family():
    rng = random.Random(9)
    P = random_a_family(rng, 1, 2)
    Q = pushforward(P, random_change(rng))
    cf = a_casimir(Q)
    assert all(r.is_zero() for r in cf.residuals(Q, cf.C_original))


def test_a_normal_form_generic_plus():
    anf = a_normal_form(from_fg((x * x).scale(mpq(1, 2)) + (y ** 3).scale(mpq(1, 3)), ZERO))
    assert (anf.sign, anf.m, anf.delta, anf.generic) == (1, 2, 1, True)


def test_a_normal_form_minus_quartic():
    anf = a_normal_form(from_fg((-x * x).scale(mpq(1, 2)) + (y ** 4).scale(mpq(1, 4)), ZERO))
    assert (anf.sign, anf.m, anf.delta) == (-1, 3, 1)


def test_a_minus_delta_is_normalised():
    # -x^2/2 - y^4/4 and -x^2/2 + y^4/4 differ by the x <-> z swap
    anf = a_normal_form(from_fg((-x * x).scale(mpq(1, 2)) - (y ** 4).scale(mpq(1, 4)), ZERO))
    assert (anf.sign, anf.m, anf.delta) == (-1, 3, 1)
    swapped = pushforward(from_fg((-x * x).scale(mpq(1, 2)) + (y ** 4).scale(mpq(1, 4)), ZERO),
                          CoordinateChange((z, y, x)))
    assert swapped == PoissonFamily(z, -x, -(y ** 3))


def test_a_plus_quartic_keeps_delta_sign():
    anf = a_normal_form(from_fg(x * x - y ** 4, ZERO))
    assert (anf.sign, anf.m, anf.delta) == (1, 3, -1)


def test_a_normal_form_unfolding_coefficient():
    anf = a_normal_form(from_fg((x * x).scale(mpq(1, 2)) + (y ** 3).scale(mpq(1, 3)) - eps * y,
                                ZERO))
    assert anf.h_prime0(0) == -1


def test_non_isolated_a_germ_is_an_error():
    with pytest.raises((PreconditionError, ReductionError)):
        a_normal_form(from_fg(x * x * y, ZERO))


# -- N germs -----------------------------------------------------------------------------------

def test_n_reduce_diagonal_plus():
    q = x * x + y * y
    nn = n_reduce(from_fg(eps * q + q * q, q))
    unit = nn.unit_form()
    assert nn.sign == 1
    assert unit["lambda"][0][0] == pytest.approx(2.0)
    assert unit["mu"][0][0] == 0 and unit["mu"][0][1] != 0
    assert unit["mu"][1][0] != 0
    assert (nn.kappa1, nn.kappa2) == (4, -28)


def test_n_reduce_diagonal_minus():
    q = x * x - y * y
    assert n_reduce(from_fg(eps * q + q * q, q)).sign == -1


def test_n_reduce_rejects_degenerate_g():
    q = x * x + y * y
    with pytest.raises(PreconditionError):
        n_reduce(from_fg(q * q, q * q))


def test_n_model_kappas():
    assert (lambda nn: (nn.kappa1, nn.kappa2))(n_reduce(n_model(1, 1))) == (1, -7)
    assert (lambda nn: (nn.kappa1, nn.kappa2))(n_reduce(n_model(1, mpq(1, 9)))) == \
        (mpq(1, 9), mpq(1, 9))


def test_n_rebuild_matches_reduced_potentials():
    rng = random.Random(10)
    for sign in (1, -1):
        P = pushforward(random_n_family(rng, sign), random_change(rng))
        nn = n_reduce(P)
        f, g = nn.rebuild()
        assert f.truncated(5) == nn.f.truncated(5)
        assert g.truncated(5) == nn.g.truncated(5)


def test_n_kappas_invariant_under_changes():
    rng = random.Random(11)
    P = random_n_family(rng, 1)
    k = n_reduce(P)
    for _ in range(3):
        k2 = n_reduce(pushforward(P, random_change(rng)))
        assert (k2.kappa1, k2.kappa2) == (k.kappa1, k.kappa2)
        assert k2.circle_side == k.circle_side

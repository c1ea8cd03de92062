"""Classification of germs: 1-jet, quadratic types, V sub-types, A and N invariants."""

import random

import pytest
from gmpy2 import mpq
from hypothesis import given, settings
from hypothesis import strategies as st

from poisson3.classifier import (KappaInvariants, classify, classify_1jet, is_v_by_curl,
                                 quadform_class, v_subtype)
from poisson3.errors import PreconditionError
from poisson3.generators import random_change, random_planar_family
from poisson3.jets import TruncatedSeries
from poisson3.normal_form.planar import EigenPair
from poisson3.poisson import PoissonFamily, from_fg, from_planar, lie_1jet, pushforward

from conftest import n_model, radial, saddle_node_model, so3

x, y, z, eps = TruncatedSeries.variables(6, 2)
ZERO = TruncatedSeries.zero()


# -- end-to-end examples ------------------------------------------------------------------

def test_so3():
    assert classify(so3()).to_record() == {"class": "so3"}


def test_sl2():
    assert classify(PoissonFamily(z, x, -y)).tag == "sl2"


def test_radial_is_a_scalar_node():
    c = classify(radial())
    assert c.tag == "V"
    assert (c.detail.kind, c.detail.params["N"], c.detail.params["delta"]) == ("node", 1, 0)


def test_a_plus_cusp():
    rec = classify(from_fg(x * x + y ** 3, ZERO)).to_record()
    assert (rec["class"], rec["m"], rec["delta"], rec["generic"]) == ("Aplus", 2, 1, True)


def test_a_minus_cusp():
    assert classify(from_fg(-x * x + y ** 3, ZERO)).discrete_key() == ("Aminus", 2, 1, True)


def test_n_models():
    assert classify(n_model(1, 1)).discrete_key() == ("Nplus", (1, -1))
    assert classify(n_model(1, mpq(1, 9))).discrete_key() == ("Nplus", (1, 1))
    assert classify(n_model(1, 1, sign=-1)).discrete_key() == ("Nminus", (1, -1))
    assert classify(n_model(1, -1)).discrete_key() == ("Nplus", (-1, 1))


def test_degenerate_g_is_undetermined():
    assert classify(from_fg(x ** 3, x * x)).tag == "N_undetermined"


def test_zero_jet_is_outside_the_taxonomy():
    c = classify(PoissonFamily(z * z, x * x, y * y))
    assert c.tag == "OutsideTaxonomy" and c.reason


def test_regular_point_is_an_error():
    with pytest.raises(PreconditionError):
        classify(PoissonFamily(TruncatedSeries.constant(1), x, y))


def test_saddle_node_data():
    d = classify(saddle_node_model()).detail
    assert (d.kind, d.params["p"], d.params["delta"]) == ("saddle_node", 1, 1)


def test_planar_kinds():
    assert classify(from_planar(x - z, x + z)).detail.kind == "focus"
    d = classify(from_planar(x.scale(2), z.scale(-3))).detail
    assert (d.kind, d.params["p"], d.params["q"]) == ("saddle", 2, 3)
    d = classify(from_planar(x, z.scale(2))).detail
    assert (d.kind, d.params["N"]) == ("node", 2)


def test_divergence_free_planar_saddle_is_not_v():
    # the linear field diag(1, -1) has zero trace, so the curl vanishes at 0
    assert classify(from_planar(x, -z)).tag != "V"


# -- 1-jet and quadratic forms --------------------------------------------------------------

def test_classify_1jet():
    assert classify_1jet(lie_1jet(so3())) == "so3"
    assert classify_1jet(lie_1jet(radial())) == "V"
    assert classify_1jet(lie_1jet(from_fg(x * x, ZERO))) == "Aplus"
    assert classify_1jet(lie_1jet(from_fg(-x * x, ZERO))) == "Aminus"
    assert classify_1jet(lie_1jet(from_fg(ZERO, ZERO))) == "N"
    assert classify_1jet(lie_1jet(PoissonFamily(z * z, x * x, y * y))) == "OutsideTaxonomy"


@pytest.mark.parametrize("form, expected", [
    (x * x + y * y, "pos_def"),
    (-x * x - y * y, "neg_def"),
    ((x * y).scale(2), "indefinite"),
    (x * x - y * y, "indefinite"),
    (x * x, "rank1_plus"),
    ((x + y) * (x + y), "rank1_plus"),
    (-(y * y), "rank1_minus"),
    (ZERO, "zero"),
])
def test_quadform_class(form, expected):
    assert quadform_class(form) == expected


def test_quadform_class_rejects_non_quadratic():
    with pytest.raises(ValueError):
        quadform_class(x * x + y ** 3)


# -- V sub-types ---------------------------------------------------------------------------------

def test_resonant_node_from_values():
    s = v_subtype(EigenPair.from_values(1, 2))
    assert (s.kind, s.params["N"], s.normal_form_id) == ("node", 2, "resonant_node")


def test_focus_is_nonresonant():
    s = v_subtype(EigenPair.from_complex(1, 1))
    assert (s.kind, s.normal_form_id) == ("focus", "nonresonant")
    assert s.params["theta"] == mpq(-1, 2)


def test_resonant_saddle_ratio():
    s = v_subtype(EigenPair.from_values(-2, 3))
    assert (s.kind, s.params["p"], s.params["q"]) == ("saddle", 2, 3)


def test_irrational_node_is_nonresonant():
    # x^2 - 3x + 1 has irrational roots
    s = v_subtype(EigenPair(mpq(3), mpq(1)))
    assert (s.kind, s.normal_form_id) == ("node", "nonresonant")


def test_trace_zero_is_not_v():
    with pytest.raises(PreconditionError):
        v_subtype(EigenPair.from_values(1, -1))


@settings(max_examples=60, deadline=None)
@given(st.integers(-9, 9), st.integers(-9, 9), st.fractions(min_value=-5, max_value=5,
                                                          max_denominator=7))
def test_v_subtype_is_scale_invariant(a, b, c):
    if a + b == 0 or c == 0:
        return
    e = EigenPair.from_values(a, b)
    s1, s2 = v_subtype(e), v_subtype(e.scaled(mpq(c.numerator, c.denominator)))
    assert s1.discrete_key() == s2.discrete_key()


# -- kappa invariants ----------------------------------------------------------------------------

@pytest.mark.parametrize("lam, mu, expected, kind", [
    (1, 1, (1, -7), "focus"),
    (1, mpq(1, 9), (mpq(1, 9), mpq(1, 9)), "node"),
    (2, -1, (-2, 20), "saddle"),
])
def test_kappas_from_lambda_mu(lam, mu, expected, kind):
    k = KappaInvariants.from_lambda_mu(lam, mu)
    assert (k.kappa1, k.kappa2) == expected
    assert k.v_kind() == kind


def test_kappas_of_the_n_model_agree_with_the_formula():
    for mu in (1, mpq(1, 9), -1):
        d = classify(n_model(1, mu)).detail.kappas
        k = KappaInvariants.from_lambda_mu(1, mu)
        assert (d.kappa1, d.kappa2) == (k.kappa1, k.kappa2)


# -- V criterion ----------------------------------------------------------------------------------

def test_v_criterion_on_planar_pushforwards():
    rng = random.Random(21)
    for _ in range(10):
        P = pushforward(random_planar_family(rng), random_change(rng))
        assert is_v_by_curl(P) == (classify(P).tag == "V")


def test_class_is_invariant_under_changes():
    rng = random.Random(22)
    for P in (from_fg(x * x + y ** 3, ZERO), n_model(1, 1), saddle_node_model()):
        key = classify(P).discrete_key()
        for _ in range(2):
            assert classify(pushforward(P, random_change(rng))).discrete_key() == key

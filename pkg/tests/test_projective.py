import random
from fractions import Fraction

import pytest

from foliation_lab import QQ
from foliation_lab.cli import foliation_from_document, load_corpus
from foliation_lab.errors import (DescentError, HomogeneityError, InputError, IntegrabilityError,
                                  NotZeroDimensional)
from foliation_lab.forms import (PolyForm, PolyVectorField, contract, descent_check, is_integrable,
                                 parse_one_form, pullback_linear)
from foliation_lab.groebner import Ideal
from foliation_lab.linalg import rank
from foliation_lab import projective as P

from conftest import FP
from sympy_oracles import delta_oracle, deg_z2_oracle

P3 = P.projective_ring(3)

# name -> (d, deg Z2, delta)
CORPUS = {
    "pencil": (0, 1, 0),
    "rational_1_2": (1, 2, 1),
    "rational_1_3": (2, 3, 4),
    "diagonal_pullback": (1, 3, 0),
    "logarithmic_d1": (1, 3, 1),
    "logarithmic_d2": (2, 6, 3),
}


def corpus(name, field=QQ):
    return foliation_from_document(load_corpus(name), field)


def form(text, ring=P3):
    return parse_one_form(text, ring)


# validation

def test_validate_pencil():
    F = P.validate(form("x0*dx1 - x1*dx0"))
    assert (F.n, F.d) == (3, 0)


def test_validate_rational_example():
    F = P.validate(form("-2*x1^2*dx0 - 2*x2*x3*dx0 + 2*x0*x1*dx1 + x0*x3*dx2 + x0*x2*dx3"))
    assert F.d == 1


@pytest.mark.parametrize("text, error", [
    ("x1*dx2 + x3*dx0", DescentError),
    ("x1^2*dx2 + x3*dx0", HomogeneityError),
    ("x2*x3*dx1 + x1*x3*dx2 + x1*x2*dx3", DescentError),
])
def test_validate_errors(text, error):
    with pytest.raises(error):
        P.validate(form(text))


def test_validate_rejects_non_integrable_descending_form():
    R = P.projective_ring(3)
    # rad ⌐ (dx0∧dx1 + dx2∧dx3) is a descending contact form
    two = PolyForm(R, 2, {(0, 1): R.one(), (2, 3): R.one()})
    w = contract(PolyVectorField.radial(R), two)
    assert descent_check(w, 2).passed and not is_integrable(w)
    with pytest.raises(IntegrabilityError):
        P.validate(w)


def test_validate_shape_errors():
    with pytest.raises(InputError):
        P.validate(PolyForm(P3, 1))
    with pytest.raises(InputError):
        P.foliation_from_strings(["x0", "x1"], n=3)
    with pytest.raises(InputError):
        P.validate(PolyForm(P3, 2, {(0, 1): P3.one()}))


# singular scheme

def test_singular_ideal_pencil():
    Z = P.singular_ideal(P.pencil("x0", "x1", P3))
    x0, x1, _, _ = P3.gens()
    assert Z.ideal == Ideal(P3, [x0, x1]) and Z.projective_dimension == 1


def test_singular_ideal_rational_contains_conic():
    Z = P.singular_ideal(corpus("rational_1_2"))
    assert Z.projective_dimension == 1
    conic = Ideal(P3, [P3.parse("x0"), P3.parse("x1^2 + x2*x3")])
    assert conic.contains_ideal(Z.ideal)
    assert P3.parse("x1^2 + x2*x3") in Z.ideal


def test_singular_ideal_of_bare_form():
    Z = P.singular_ideal(form("x2*x3*dx1 + x1*x3*dx2 + x1*x2*dx3"))
    assert Z.projective_dimension == 1
    assert Z.ideal == Ideal(P3, [P3.parse("x2*x3"), P3.parse("x1*x3"), P3.parse("x1*x2")])


# generators

def test_rational_generator_matches_corpus_form():
    assert P.rational("x0", "x1^2 + x2*x3", P3).w == corpus("rational_1_2").w


def test_pencil_generator():
    assert P.pencil("x0", "x1", P3).w == form("x0*dx1 - x1*dx0")


def test_logarithmic_generator():
    F = P.logarithmic(["x0", "x1", "x2"], [1, 1, -2], P3)
    assert F.d == 1
    with pytest.raises(InputError):
        P.logarithmic(["x0", "x1", "x2"], [1, 1, 1], P3)


@pytest.mark.parametrize("seed", range(12))
def test_rational_convention_descends(seed):
    rng = random.Random(seed)
    a, b = rng.randint(1, 3), rng.randint(1, 3)
    F = P.rational(P._random_form(P3, a, rng), P._random_form(P3, b, rng), P3)
    assert F.d == a + b - 2


@pytest.mark.parametrize("kind", ["rational", "logarithmic", "linear_pullback"])
@pytest.mark.parametrize("n", [3, 4])
def test_random_foliations_are_valid(kind, n):
    rng = random.Random(f"{kind}{n}")
    for d in (1, 2):
        F = P.random_foliation(n, d, rng, FP, kind)
        assert (F.n, F.d) == (n, d)
        assert is_integrable(F.w) and descent_check(F.w, d + 2).passed


def test_generate_errors():
    with pytest.raises(InputError):
        P.generate("bogus", {}, QQ, 3)
    with pytest.raises(InputError):
        P.generate("pencil", {"F": "x0", "G": "x1"})


# plane invariants

@pytest.mark.parametrize("name", sorted(CORPUS))
def test_corpus_values(name):
    d, z, delta = CORPUS[name]
    F = corpus(name)
    assert F.d == d
    assert P.deg_z2(F).value == z
    assert P.delta_global(F).value == delta


@pytest.mark.parametrize("name", sorted(CORPUS))
def test_corpus_values_match_sympy(name):
    F = corpus(name)
    M = P.random_plane_matrix(F.n, random.Random(name), 20)
    assert P.deg_z2(F, plane=M).value == deg_z2_oracle(F, M) == CORPUS[name][1]
    assert P.delta_global(F, plane=M).value == delta_oracle(F, M) == CORPUS[name][2]


@pytest.mark.parametrize("name", ["rational_1_2", "diagonal_pullback"])
def test_corpus_values_over_fp(name):
    F = corpus(name, FP)
    assert (P.deg_z2(F).value, P.delta_global(F).value) == CORPUS[name][1:]


def test_values_are_seed_independent_and_deterministic():
    F = corpus("rational_1_3")
    values = {P.deg_z2(F, seed=s).value for s in range(4)}
    assert values == {3}
    assert P.deg_z2(F, seed=9).certificate() == P.deg_z2(F, seed=9).certificate()


@pytest.mark.parametrize("seed", range(4))
def test_invariants_under_coordinate_change(seed):
    rng = random.Random(seed)
    F = corpus("logarithmic_d1")
    while True:
        A = [[rng.randint(-3, 3) for _ in range(4)] for _ in range(4)]
        if rank(A, QQ) == 4:
            break
    G = P.validate(pullback_linear(F.w, A, P3))
    assert P.deg_z2(G).value == 3 and P.delta_global(G).value == 1


def test_common_factor_is_input_error():
    # x3 * (x0 dx1 - x1 dx0) has a codimension-one singular set
    F = P.validate(form("x3*x0*dx1 - x3*x1*dx0"))
    with pytest.raises(InputError):
        P.deg_z2(F, retries=2)


def test_plane_invariants_need_n_at_least_3():
    F = P.validate(form("x0*dx1 - x1*dx0", P.projective_ring(2)))
    with pytest.raises(InputError):
        P.deg_z2(F)


def test_bad_fixed_plane():
    F = corpus("pencil")
    with pytest.raises(InputError):
        P.deg_z2(F, plane=[[1, 0, 0], [2, 0, 0], [3, 0, 0], [4, 0, 0]])


def test_tangent_fixed_plane_is_not_zero_dimensional():
    F = corpus("pencil")
    # the plane x0 = 0 contains the singular line x0 = x1 = 0
    with pytest.raises(NotZeroDimensional):
        P.deg_z2(F, plane=[[0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1]])


# Chern data and bounds

def test_chern_data_examples():
    c = P.chern_data(3, 0, 1, 0)
    assert (c.c1_tf, c.c2_tf) == (2, 1)
    assert P.chern_data(3, 1, 2, 1).c2_tf == 1
    c = P.chern_data(4, 2, 7, 0)
    assert c.c2_tf == -1 and P.pn_floor(4, 2) == -1


def test_pencil_tangent_sheaf_is_split():
    # T = O(1) + O(1): c1 = 2, c2 = 1, discriminant 2*2*1 - 1*4 = 0
    c = P.chern_data(3, 0, 1, 0)
    assert (c.c1_tf, c.c2_tf, c.discriminant) == (2, 1, 0)


def test_discriminant_floor_is_attained_at_the_c2_floor():
    for n in (3, 4, 5):
        for d in range(0, 4):
            c = P.chern_data(n, d, d * d + d + 1, 0)
            assert c.c2_tf == P.pn_floor(n, d)
            assert c.discriminant == -(n - 2) * d * d


@pytest.mark.parametrize("name", sorted(CORPUS))
def test_corpus_bounds_pass(name):
    report = P.verify_bounds(corpus(name))
    assert report.passed, report.failures()
    out = report.as_dict()
    assert out["lower_deg_z2"] <= out["deg_z2"] <= out["upper_deg_z2"]


def test_bound_flags_detect_violation():
    c = P.chern_data(3, 1, 4, 0)
    _, flags = P.bound_flags(c)
    assert not flags["thmB_upper"] and not flags["thmA_lower"]


# witness

@pytest.mark.parametrize("name", ["pencil", "rational_1_2", "rational_1_3", "logarithmic_d1"])
def test_witness_found(name):
    w = P.first_integral_witness(corpus(name))
    assert w is not None and w.wedge_vanishes and w.radial_identity
    assert w.E.homogeneous_degree() == 1


@pytest.mark.parametrize("name", ["diagonal_pullback", "logarithmic_d2"])
def test_witness_absent(name):
    assert P.first_integral_witness(corpus(name)) is None


# Theorem A evaluator

@pytest.mark.parametrize("n", [3, 4, 5])
@pytest.mark.parametrize("d", range(5))
def test_theorem_a_reproduces_pn_floor(n, d):
    nums = P.pn_intersection_numbers(n, d)
    r = P.theorem_a_report(n, c2H=P.pn_floor(n, d), delta=0, **nums)
    assert r.P == P.pn_floor(n, d)
    assert r.passed and not r.degenerate


def test_theorem_a_squeeze_when_delta_is_zero():
    nums = P.pn_intersection_numbers(3, 1)
    assert P.theorem_a_report(3, c2H=0, delta=0, **nums).passed
    assert not P.theorem_a_report(3, c2H=1, delta=0, **nums).passed
    assert not P.theorem_a_report(3, c2H=-1, delta=0, **nums).passed


def test_theorem_a_degenerate_surface():
    r = P.theorem_a_report(2, HN=1, KH=-3, NH=3, c2H=7, delta=0)
    assert r.degenerate and r.P == 0


def test_theorem_a_discriminant_check():
    nums = P.pn_intersection_numbers(4, 2)
    assert P.theorem_a_report(4, c2H=-1, delta=0, disc=-8, square=4, **nums).discriminant_ok
    assert not P.theorem_a_report(4, c2H=-1, delta=0, disc=-9, square=4, **nums).passed
    with pytest.raises(InputError):
        P.theorem_a_report(4, c2H=-1, delta=0, disc=-8, **nums)


@pytest.mark.parametrize("bad", [{"HN": Fraction(1, 2)}, {"KH": 1.0}, {"NH": "x"}, {"delta": -1}])
def test_theorem_a_rejects_inexact_input(bad):
    args = {"HN": 1, "KH": -4, "NH": 3, "c2H": 0, "delta": 0, **bad}
    with pytest.raises(InputError):
        P.theorem_a_report(3, **args)

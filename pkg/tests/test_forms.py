import itertools
import random

import pytest

from foliation_lab import QQ, PolyRing, Polynomial
from foliation_lab.errors import DescentError, InputError
from foliation_lab.forms import (PolyForm, PolyVectorField, coefficient_ideal, contract, descent_check,
                                 euler_chart_check, exterior_d, insertion_sign, is_integrable,
                                 lie_derivative, parse_one_form, pullback, pullback_linear,
                                 random_descent_form, restrict_chart, wedge)
from foliation_lab.groebner import Ideal

from conftest import FP

RXY = PolyRing(("x", "y"), QQ)
R3 = PolyRing.standard(3, start=1)
P3 = PolyRing.standard(4)


def dx(ring, *idx):
    return PolyForm.dx(ring, *idx)


def random_poly(ring, rng, max_deg=3, terms=4, box=7):
    monos = [m for m in itertools.product(range(max_deg + 1), repeat=ring.nvars) if sum(m) <= max_deg]
    return Polynomial(ring, {m: rng.randint(-box, box) for m in rng.sample(monos, min(terms, len(monos)))})


def random_form(ring, p, rng, max_deg=3):
    return PolyForm(ring, p, {I: random_poly(ring, rng, max_deg)
                              for I in itertools.combinations(range(ring.nvars), p) if rng.random() < 0.7})


# sign convention

def _brute_sign(i, I):
    seq = [i] + list(I)
    if len(set(seq)) < len(seq):
        return 0
    inv = sum(1 for a, b in itertools.combinations(seq, 2) if a > b)
    return -1 if inv % 2 else 1


@pytest.mark.parametrize("n", range(1, 6))
def test_insertion_sign_exhaustive(n):
    for p in range(0, 4):
        for I in itertools.combinations(range(n), p):
            for i in range(n):
                assert insertion_sign(i, I) == _brute_sign(i, I)


@pytest.mark.parametrize("n", range(2, 6))
def test_wedge_of_differentials_matches_permutation_sign(n):
    for p, q in [(1, 1), (1, 2), (2, 1), (1, 3), (3, 1), (2, 2)]:
        for I in itertools.combinations(range(n), p):
            for J in itertools.combinations(range(n), q):
                got = dx(PolyRing.standard(n), *I) ^ dx(PolyRing.standard(n), *J)
                if set(I) & set(J):
                    assert got.is_zero()
                    continue
                seq = list(I) + list(J)
                inv = sum(1 for a, b in itertools.combinations(seq, 2) if a > b)
                K = tuple(sorted(seq))
                assert got.coefficient(K) == PolyRing.standard(n).constant(-1 if inv % 2 else 1)


# worked examples

def test_wedge_examples():
    x, y = RXY.gens()
    assert dx(RXY, 0) ^ dx(RXY, 1) == -(dx(RXY, 1) ^ dx(RXY, 0))
    a = PolyForm.one_form(RXY, [x * y, x + 1])
    assert (a ^ a).is_zero()
    lhs = PolyForm.one_form(RXY, [0, x]) ^ PolyForm.one_form(RXY, [y, 0])
    assert lhs == dx(RXY, 0, 1).scale(-(x * y))


def test_exterior_d_examples():
    x, y = RXY.gens()
    assert PolyForm.one_form(RXY, [0, x]).d() == dx(RXY, 0, 1)
    f = x**3 + x * y
    assert PolyForm.function(f).d().d().is_zero()
    x0, x1 = RXY.gens()
    w = PolyForm.one_form(RXY, [-x1, x0])
    assert exterior_d(w) == dx(RXY, 0, 1).scale(2)


def test_contract_examples():
    x0, x1 = RXY.gens()
    rad = PolyVectorField.radial(RXY)
    assert contract(rad, dx(RXY, 0, 1)) == PolyForm.one_form(RXY, [-x1, x0])
    assert contract(rad, PolyForm.one_form(RXY, [-x1, x0])).is_zero()
    f = x0**2 + 3
    assert contract(PolyVectorField.partial(RXY, 0), dx(RXY, 0, 1).scale(f)) == PolyForm.one_form(RXY, [0, f])


def test_descent_examples():
    x0, x1 = RXY.gens()
    assert descent_check(PolyForm.one_form(RXY, [-x1, x0]), 2).passed
    bad = descent_check(dx(RXY, 0), 1)
    assert not bad.passed and bad.failures() == ["rad ⌐ w != 0"]


def test_integrability_examples():
    x1, x2, x3 = R3.gens()
    assert is_integrable(PolyForm.one_form(R3, [x2 * x3, x1 * x3, x1 * x2]))
    assert not is_integrable(PolyForm.one_form(R3, [x3, x1, 0]))
    rng = random.Random(1)
    assert is_integrable(random_form(RXY, 1, rng))
    with pytest.raises(InputError):
        is_integrable(dx(R3, 0, 1))


def test_restrict_chart_examples():
    x0, x1 = RXY.gens()
    out = restrict_chart(PolyForm.one_form(RXY, [-x1, x0]))
    assert out.ring.names == ("y",) and out == PolyForm.one_form(out.ring, [1])
    x0, x1, x2, x3 = P3.gens()
    w = PolyForm.one_form(P3, [0, x2, x3, x1])
    r = restrict_chart(w)
    assert r.ring.names == ("x1", "x2", "x3")
    assert r == PolyForm.one_form(r.ring, [r.ring.parse("x2"), r.ring.parse("x3"), r.ring.parse("x1")])
    with pytest.raises(InputError):
        restrict_chart(w, 4)


def test_pullback_linear_examples():
    rng = random.Random(5)
    w = random_form(R3, 1, rng)
    ident = [[1, 0, 0], [0, 1, 0], [0, 0, 1]]
    assert str(pullback_linear(w, ident)) == str(w).replace("x1", "y0").replace("x2", "y1").replace("x3", "y2")
    out = pullback_linear(dx(R3, 0, 1), [[1, 0], [0, 1], [1, 1]])
    assert out == dx(out.ring, 0, 1)
    with pytest.raises(InputError):
        pullback_linear(w, [[1, 0], [0, 1]])


def test_coefficient_ideal_examples():
    x0, x1 = RXY.gens()
    assert coefficient_ideal(PolyForm.one_form(RXY, [-x1, x0])) == Ideal(RXY, [x0, x1])
    x1, x2, x3 = R3.gens()
    I = coefficient_ideal(PolyForm.function(x1 * x2 * x3).d())
    assert I == Ideal(R3, [x2 * x3, x1 * x3, x1 * x2])
    assert coefficient_ideal(PolyForm(R3, 1)).is_zero()


def test_zero_form_and_degree():
    z = PolyForm(R3, 2)
    assert z.is_zero() and not z and z.coefficient_degree() is None
    with pytest.raises(InputError):
        PolyForm(R3, 1, {(0, 1): R3.one()})
    with pytest.raises(InputError):
        PolyForm(R3, 2, {(1, 0): R3.one()})


def test_parse_one_form():
    x, y = RXY.gens()
    assert parse_one_form("x*dy - y*dx", RXY) == PolyForm.one_form(RXY, [-y, x])
    assert parse_one_form("3*x^2*y*dx + dy", RXY) == PolyForm.one_form(RXY, [x**2 * y * 3, 1])
    with pytest.raises(InputError):
        parse_one_form("x*y", RXY)
    with pytest.raises(InputError):
        parse_one_form("dx*dy", RXY)


def test_chart_lemma_examples():
    x0, x1 = RXY.gens()
    assert euler_chart_check(PolyForm.one_form(RXY, [-x1, x0]), 2).passed
    F = P3.parse("x0*x1 + x2^2 - 3*x3^2")
    G = P3.parse("x1 + 2*x3")
    w = contract(PolyVectorField.radial(P3), PolyForm.function(F).d() ^ PolyForm.function(G).d())
    assert euler_chart_check(w, 3).passed
    with pytest.raises(DescentError):
        euler_chart_check(dx(RXY, 0), 1)


# properties

@pytest.mark.parametrize("seed", range(20))
@pytest.mark.parametrize("p", [0, 1, 2])
def test_d_squared_is_zero(seed, p, field):
    R = PolyRing.standard(4, field)
    w = random_form(R, p, random.Random(seed))
    assert w.d().d().is_zero()


@pytest.mark.parametrize("seed", range(30))
def test_leibniz(seed):
    rng = random.Random(seed)
    R = PolyRing.standard(4, FP)
    p, q = rng.choice([(0, 1), (1, 1), (1, 2), (2, 1), (0, 2)])
    a, b = random_form(R, p, rng), random_form(R, q, rng)
    sign = -1 if p % 2 else 1
    assert (a ^ b).d() == (a.d() ^ b) + (a ^ b.d()).scale(sign)


@pytest.mark.parametrize("seed", range(30))
def test_graded_anticommutativity(seed):
    rng = random.Random(seed)
    R = PolyRing.standard(5, FP)
    p, q = rng.choice([(1, 1), (1, 2), (2, 2), (1, 3)])
    a, b = random_form(R, p, rng, 2), random_form(R, q, rng, 2)
    assert wedge(a, b) == wedge(b, a).scale(-1 if p * q % 2 else 1)


@pytest.mark.parametrize("seed", range(30))
def test_contract_is_antiderivation(seed):
    rng = random.Random(seed)
    R = PolyRing.standard(4, FP)
    v = PolyVectorField(R, tuple(random_poly(R, rng, 2) for _ in range(4)))
    p, q = rng.choice([(1, 1), (1, 2), (2, 1)])
    a, b = random_form(R, p, rng, 2), random_form(R, q, rng, 2)
    rhs = (contract(v, a) ^ b) + (a ^ contract(v, b)).scale(-1 if p % 2 else 1)
    assert contract(v, a ^ b) == rhs
    assert contract(v, contract(v, a ^ b)).is_zero()


@pytest.mark.parametrize("seed", range(30))
def test_cartan_homogeneity_on_descent_forms(seed):
    rng = random.Random(seed)
    R = PolyRing.standard(rng.choice([3, 4, 5]), FP)
    p = rng.choice([1, 2])
    k = rng.randint(p + 1, 5)
    w = random_descent_form(R, p, k, rng)
    rad = PolyVectorField.radial(R)
    assert contract(rad, w).is_zero()
    assert lie_derivative(rad, w) == w.scale(k)
    assert descent_check(w, k).passed
    assert not descent_check(w, k + 1).passed or w.is_zero()


@pytest.mark.parametrize("seed", range(15))
def test_pullback_commutes_with_d(seed):
    rng = random.Random(seed)
    R = PolyRing.standard(4, FP)
    S = PolyRing.standard(3, FP, prefix="y")
    w = random_form(R, rng.choice([1, 2]), rng, 2)
    M = [[rng.randint(-3, 3) for _ in range(3)] for _ in range(4)]
    assert pullback_linear(w.d(), M, S) == pullback_linear(w, M, S).d()
    images = [random_poly(S, rng, 2, 3) for _ in range(4)]
    assert pullback(w.d(), images) == pullback(w, images).d()


@pytest.mark.parametrize("seed", range(10))
def test_chart_lemma_on_random_descent_forms(seed):
    rng = random.Random(seed)
    R = PolyRing.standard(4, FP)
    p = rng.choice([1, 2])
    k = rng.randint(p + 1, 4)
    w = random_descent_form(R, p, k, rng)
    assert euler_chart_check(w, k, rng.randrange(4)).passed

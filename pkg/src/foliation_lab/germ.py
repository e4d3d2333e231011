"""Local invariants of foliation germs at the origin.

A planar germ is a 1-form ``a dx + b dy`` in two variables; ``f`` denotes the
coefficient of ``dx ∧ dy`` in its exterior derivative.  Every length here is
the length of the local ring at the origin, never a global colength.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from typing import Sequence

from .errors import BudgetExceeded, GenericityError, InputError, IntegrabilityError
from .forms import PolyForm, coefficient_ideal, is_integrable, pullback
from .groebner import INFINITE, Ideal, ideal_quotient, limits, local_colength_origin
from .linalg import kernel_basis, rank
from .poly import PolyRing, Polynomial

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class GermInvariants:
    mu: int | float
    delta: int | float
    unfolding_length: int | float
    kupka: bool

    def as_dict(self) -> dict:
        return {"mu": _num(self.mu), "delta": _num(self.delta),
                "unfolding_length": _num(self.unfolding_length), "kupka": self.kupka}


def _num(v):
    return "infinite" if v == INFINITE else int(v)


def _planar(eta: PolyForm) -> tuple[Polynomial, Polynomial]:
    if eta.p != 1 or eta.ring.nvars != 2:
        raise InputError("expected a 1-form in two variables")
    return eta.coefficient((0,)), eta.coefficient((1,))


def planar_germ(ring: PolyRing, a, b) -> PolyForm:
    """The germ ``a dx + b dy`` on a two-variable ring."""
    if ring.nvars != 2:
        raise InputError("planar germs need a two-variable ring")
    return PolyForm.one_form(ring, [a, b])


def d_coefficient(eta: PolyForm) -> Polynomial:
    """f with d(eta) = f dx ∧ dy."""
    _planar(eta)
    return eta.d().coefficient((0, 1))


def milnor_ideal(eta: PolyForm) -> Ideal:
    a, b = _planar(eta)
    return Ideal(eta.ring, [a, b])


def milnor(eta: PolyForm):
    """Milnor number: local length of O/(a, b)."""
    return local_colength_origin(milnor_ideal(eta))


def delta_local(eta: PolyForm):
    """Local length of O/(a, b, f): coefficients of eta and d(eta)."""
    a, b = _planar(eta)
    return local_colength_origin(Ideal(eta.ring, [a, b, d_coefficient(eta)]))


def persistent_ideal(eta: PolyForm) -> Ideal:
    """(J : f), the functions h with h d(eta) = eta ∧ theta for some theta."""
    J = milnor_ideal(eta)
    f = d_coefficient(eta)
    if not f:
        return Ideal.unit(eta.ring)
    return ideal_quotient(J, f)


def unfolding_length(eta: PolyForm):
    """Length of I(eta)/J(eta) at the origin, computed from the two ideals."""
    mu = milnor(eta)
    if mu == INFINITE:
        return INFINITE
    return mu - local_colength_origin(persistent_ideal(eta))


def is_singular(eta: PolyForm) -> bool:
    return all(A.constant_term() == 0 for A in eta.coeffs.values())


def is_kupka(eta: PolyForm) -> bool:
    """True iff d(eta) does not vanish at the (singular) origin."""
    if not is_singular(eta):
        raise InputError("the germ is regular at the origin; Kupka is defined at singular points")
    return d_coefficient(eta).constant_term() != 0


def invariants(eta: PolyForm) -> GermInvariants:
    """All four invariants of a planar germ.  A regular germ gets zeros."""
    if not is_singular(eta):
        return GermInvariants(0, 0, 0, False)
    return GermInvariants(milnor(eta), delta_local(eta), unfolding_length(eta), is_kupka(eta))


# --------------------------------------------------------------------------
# restriction to planes and the sandwich
# --------------------------------------------------------------------------

def plane_parametrization(equations: Sequence[Sequence], ring: PolyRing) -> list[list]:
    """An n x 2 matrix whose columns span the plane {equations * x = 0}."""
    n = ring.nvars
    field = ring.field
    rows = [[field(a) for a in row] for row in equations]
    if len(rows) != n - 2 or any(len(r) != n for r in rows):
        raise InputError(f"a plane in {n} variables needs {n - 2} equations of length {n}")
    if rank(rows, field) != n - 2:
        raise InputError("plane equations are not independent")
    basis = kernel_basis(rows, n, field)
    return [[basis[0][i], basis[1][i]] for i in range(n)]


def _plane_images(equations, ring: PolyRing) -> list[Polynomial]:
    M = plane_parametrization(equations, ring)
    S = PolyRing(("s", "t"), ring.field)
    s, t = S.gens()
    return [s.scale(r[0]) + t.scale(r[1]) for r in M]


def restrict_to_plane(w: PolyForm, equations) -> PolyForm:
    """Pullback of w to the plane, in coordinates (s, t)."""
    return pullback(w, _plane_images(equations, w.ring))


def intersection_multiplicity(w: PolyForm, equations) -> int:
    """(Z·S) at 0: local length of all coefficients of w restricted to the plane."""
    if w.p != 1:
        raise InputError("expected a 1-form")
    if not is_singular(w):
        raise InputError("the form is regular at the origin")
    images = _plane_images(equations, w.ring)
    S = images[0].ring
    value = local_colength_origin(Ideal(S, [A.compose(images) for A in w.coeffs.values()]))
    if value == INFINITE:
        raise GenericityError("restricted singular ideal is not zero-dimensional at 0; choose another plane")
    return value


@dataclass(frozen=True)
class KeyLemmaReport:
    mu: int
    delta: int
    izs: int
    plane: tuple[tuple, ...]

    @property
    def upper_ok(self) -> bool:
        return self.mu >= self.izs

    @property
    def lower_ok(self) -> bool:
        return self.izs >= self.mu - self.delta

    @property
    def passed(self) -> bool:
        return self.upper_ok and self.lower_ok

    def as_dict(self) -> dict:
        return {"mu": self.mu, "delta": self.delta, "izs": self.izs, "upper_ok": self.upper_ok,
                "lower_ok": self.lower_ok, "pass": self.passed,
                "plane": [list(row) for row in self.plane]}


def key_lemma_check(w: PolyForm, equations) -> KeyLemmaReport:
    """mu(w|S) >= (Z·S)_0 >= mu(w|S) - delta(w|S) on the plane S.

    The hypothesis that Z is of pure codimension two is the caller's
    responsibility; the inequalities themselves are checked exactly.
    """
    if not is_integrable(w):
        raise IntegrabilityError("w ∧ dw != 0")
    restricted = restrict_to_plane(w, equations)
    mu = milnor(restricted)
    if mu == INFINITE:
        raise GenericityError("restriction to the plane has a non-isolated singularity at 0")
    izs = intersection_multiplicity(w, equations)
    report = KeyLemmaReport(mu, delta_local(restricted), izs, tuple(tuple(r) for r in equations))
    if not report.passed:
        log.error("sandwich inequality failed: %s for form %s", report, w)
    return report


def random_plane_equations(n: int, rng, box: int = 50) -> list[list[int]]:
    """(n-2) x n integer matrix of full rank with entries in [-box, box]."""
    from .poly import QQ
    while True:
        M = [[rng.randint(-box, box) for _ in range(n)] for _ in range(n - 2)]
        if rank(M, QQ) == n - 2:
            return M


def key_lemma_trial(w: PolyForm, rng, retries: int = 8, box: int = 50) -> KeyLemmaReport:
    """key_lemma_check on a random plane through 0, re-drawn on degeneracy."""
    n = w.ring.nvars
    for _ in range(retries):
        eqs = random_plane_equations(n, rng, box)
        try:
            return key_lemma_check(w, eqs)
        except GenericityError:
            continue
    raise GenericityError(f"no transverse plane found in {retries} attempts")


# --------------------------------------------------------------------------
# random germs
# --------------------------------------------------------------------------

def _random_poly(ring: PolyRing, rng, min_deg: int, max_deg: int, terms: int, box: int = 9) -> Polynomial:
    monos = [m for m in itertools.product(range(max_deg + 1), repeat=ring.nvars)
             if min_deg <= sum(m) <= max_deg]
    chosen = rng.sample(monos, min(terms, len(monos)))
    return Polynomial(ring, {m: rng.choice([c for c in range(-box, box + 1) if c]) for m in chosen})


def random_planar_germ(ring: PolyRing, rng, max_degree: int = 4) -> PolyForm:
    """Random singular germ a dx + b dy with an isolated singularity at 0."""
    while True:
        kind = rng.random()
        lo = rng.choice([1, 1, 2, 2, 3])
        a = _random_poly(ring, rng, lo, max_degree, rng.randint(1, 4))
        b = _random_poly(ring, rng, rng.choice([1, 2, 3]), max_degree, rng.randint(1, 4))
        if kind < 0.15:
            # exact germs have f = 0
            F = _random_poly(ring, rng, 2, max_degree, rng.randint(1, 4))
            a, b = F.derivative(0), F.derivative(1)
        eta = planar_germ(ring, a, b)
        if milnor(eta) != INFINITE and is_singular(eta) and (a or b):
            return eta


def random_integrable_germ(n: int, ring_or_field, rng, kind: str | None = None) -> PolyForm:
    """Integrable singular 1-form germ in n variables from one of four families.

    ``closed``: dF; ``unit_multiple``: g dF with g(0) != 0; ``rational``:
    a f dg - b g df with f(0) = g(0) = 0; ``pullback``: a planar germ pulled
    back along a random linear or quadratic map to the plane.
    """
    ring = ring_or_field if isinstance(ring_or_field, PolyRing) else \
        PolyRing(tuple(f"x{i}" for i in range(1, n + 1)), ring_or_field)
    kind = kind or rng.choice(["closed", "unit_multiple", "rational", "pullback"])
    while True:
        core = None
        if kind == "closed":
            F = _random_poly(ring, rng, 2, 4, rng.randint(2, 5))
            w = PolyForm.function(F).d()
        elif kind == "unit_multiple":
            F = _random_poly(ring, rng, 2, 4, rng.randint(2, 5))
            g = ring.constant(rng.choice([1, 2, 3, -1])) + _random_poly(ring, rng, 1, 2, 2)
            core = PolyForm.function(F).d()
            w = core.scale(g)
        elif kind == "rational":
            f = _random_poly(ring, rng, 1, 3, rng.randint(1, 3))
            g = _random_poly(ring, rng, 1, 3, rng.randint(1, 3))
            p, q = rng.choice([(1, 1), (1, 2), (2, 1), (2, 3)])
            w = PolyForm.function(g).d().scale(f.scale(p)) - PolyForm.function(f).d().scale(g.scale(q))
        elif kind == "pullback":
            plane = PolyRing(("u", "v"), ring.field)
            eta = random_planar_germ(plane, rng, max_degree=3)
            images = [_random_poly(ring, rng, 1, rng.choice([1, 1, 2]), rng.randint(1, 3)) for _ in range(2)]
            w = pullback(eta, images)
        else:
            raise InputError(f"unknown germ family {kind!r}")
        if w and is_singular(w) and _codim_two(core or w):
            return w


def _codim_two(w: PolyForm, max_pairs: int = 300) -> bool:
    # a codimension-one singular set admits no transverse plane; candidates
    # whose Groebner basis is expensive are simply discarded
    try:
        with limits(max_pairs=max_pairs):
            return coefficient_ideal(w).dimension() <= w.ring.nvars - 2
    except BudgetExceeded:
        return False

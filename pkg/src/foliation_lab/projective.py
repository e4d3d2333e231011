"""Codimension-one foliations on projective space.

A degree-d foliation on P^n is given by a 1-form ``w`` in the homogeneous
coordinates x0..xn whose coefficients are homogeneous of degree d + 1, with
rad ⌐ w = 0 and w ∧ dw = 0.  Degrees of singular schemes are computed on
random planes P^2 ⊂ P^n, so no primary decomposition or point enumeration is
ever needed.
"""

from __future__ import annotations

import itertools
import logging
import random
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Callable, Sequence

from .errors import (DescentError, GenericityError, HomogeneityError, InputError,
                     IntegrabilityError, NotZeroDimensional)
from .forms import (PolyForm, PolyVectorField, coefficient_ideal, contract, descent_check,
                    is_integrable, pullback, pullback_linear, random_descent_form)
from .groebner import Ideal, dimension, hilbert_degree_certified, saturate_irrelevant
from .linalg import kernel_basis, rank
from .poly import QQ, Field, PolyRing, Polynomial

log = logging.getLogger(__name__)

DEFAULT_RETRIES = 8
PLANE_BOX = 50


def substream(seed, name: str) -> random.Random:
    """Independent deterministic generator for one named use of a seed."""
    return random.Random(f"{seed}:{name}")


@dataclass(frozen=True)
class ProjFoliation:
    n: int
    d: int
    w: PolyForm

    @property
    def ring(self) -> PolyRing:
        return self.w.ring

    @property
    def field(self) -> Field:
        return self.w.ring.field

    def coefficients(self) -> list[Polynomial]:
        return [self.w.coefficient((i,)) for i in range(self.n + 1)]


def projective_ring(n: int, field: Field = QQ) -> PolyRing:
    return PolyRing.standard(n + 1, field)


def validate(w: PolyForm, n: int | None = None) -> ProjFoliation:
    """Check homogeneity, descent and integrability; infer the degree."""
    if w.p != 1:
        raise InputError(f"expected a 1-form, got a {w.p}-form")
    n = w.ring.nvars - 1 if n is None else n
    if w.ring.nvars != n + 1:
        raise InputError(f"a form on P^{n} needs {n + 1} variables, got {w.ring.nvars}")
    if n < 2:
        raise InputError("projective foliations need n >= 2")
    if w.is_zero():
        raise InputError("the zero form defines no foliation")
    degs = {A.homogeneous_degree() for A in w.coeffs.values()}
    if None in degs or len(degs) != 1:
        raise HomogeneityError("coefficients are not homogeneous of one common degree")
    deg = degs.pop()
    report = descent_check(w, deg + 1)
    if not report.passed:
        raise DescentError("form does not descend to projective space: " + "; ".join(report.failures()))
    if not is_integrable(w):
        raise IntegrabilityError("w ∧ dw != 0: the distribution is not integrable")
    return ProjFoliation(n, deg - 1, w)


def foliation_from_strings(coefficients: Sequence[str], field: Field = QQ, n: int | None = None) -> ProjFoliation:
    n = len(coefficients) - 1 if n is None else n
    if len(coefficients) != n + 1:
        raise InputError(f"P^{n} needs {n + 1} coefficients, got {len(coefficients)}")
    ring = projective_ring(n, field)
    return validate(PolyForm.one_form(ring, [ring.parse(c) for c in coefficients]), n)


@dataclass(frozen=True)
class SingularLocus:
    ideal: Ideal
    projective_dimension: int


def singular_ideal(F: ProjFoliation | PolyForm) -> SingularLocus:
    """Ideal of all coefficients with the projective dimension of its zero set.

    A bare homogeneous form is accepted too; descent is not needed to define
    its zero scheme.
    """
    w = F.w if isinstance(F, ProjFoliation) else F
    if any(not A.is_homogeneous() for A in w.coeffs.values()):
        raise HomogeneityError("the zero scheme of an inhomogeneous form is not projective")
    I = coefficient_ideal(w)
    return SingularLocus(I, dimension(I) - 1)


# --------------------------------------------------------------------------
# random planes and plane invariants
# --------------------------------------------------------------------------

def random_plane_matrix(n: int, rng: random.Random, box: int = PLANE_BOX) -> list[list[int]]:
    """(n+1) x 3 integer matrix of rank 3: x = M y embeds P^2 in P^n."""
    while True:
        M = [[rng.randint(-box, box) for _ in range(3)] for _ in range(n + 1)]
        if rank(M, QQ) == 3:
            return M


def _plane_ring(F: ProjFoliation) -> PolyRing:
    return PolyRing.standard(3, F.field, prefix="y")


def _images(F: ProjFoliation, M) -> list[Polynomial]:
    S = _plane_ring(F)
    ys = S.gens()
    return [sum((y.scale(a) for y, a in zip(ys, row) if a), S.zero()) for row in M]


def restricted_singular_ideal(F: ProjFoliation, M) -> Ideal:
    """Coefficients of w evaluated on the plane x = M y (Z ∩ L, not tangencies)."""
    images = _images(F, M)
    S = images[0].ring
    return Ideal(S, [A.compose(images) for A in F.coefficients()])


def restrict_to_plane(F: ProjFoliation, M) -> PolyForm:
    return pullback_linear(F.w, M, _plane_ring(F))


def delta_ideal(F: ProjFoliation, M) -> Ideal:
    """Coefficients of w|L together with those of d(w|L)."""
    wl = restrict_to_plane(F, M)
    return Ideal(wl.ring, list(wl.coeffs.values()) + list(wl.d().coeffs.values()))


@dataclass(frozen=True)
class PlaneValue:
    value: int
    planes: tuple
    steps: tuple
    attempts: int

    def certificate(self) -> dict:
        return {"planes": [[list(row) for row in M] for M in self.planes],
                "stabilized_at": list(self.steps), "attempts": self.attempts}


def _plane_degree(ideal_on: Callable[[list[list[int]]], Ideal], n: int, rng: random.Random,
                  retries: int, what: str) -> PlaneValue:
    dim_failures = 0
    for attempt in range(1, retries + 1):
        results = []
        for _ in range(2):
            M = random_plane_matrix(n, rng)
            try:
                st = hilbert_degree_certified(saturate_irrelevant(ideal_on(M)))
            except NotZeroDimensional:
                dim_failures += 1
                break
            results.append((M, st))
        if len(results) == 2 and results[0][1].value == results[1][1].value:
            (M1, s1), (M2, s2) = results
            return PlaneValue(s1.value, (M1, M2), (s1.step, s2.step), attempt)
    if dim_failures == retries:
        raise InputError(f"{what}: the singular set has a codimension-one component "
                         "(the coefficients share a common factor)")
    raise GenericityError(f"{what}: no two random planes agreed in {retries} attempts")


def _fixed_plane(ideal_on, M, n: int) -> PlaneValue:
    M = [list(r) for r in M]
    if len(M) != n + 1 or any(len(r) != 3 for r in M) or rank(M, QQ) != 3:
        raise InputError(f"a plane in P^{n} is an {n + 1} x 3 matrix of rank 3")
    st = hilbert_degree_certified(saturate_irrelevant(ideal_on(M)))
    return PlaneValue(st.value, (M,), (st.step,), 1)


def deg_z2(F: ProjFoliation, seed=0, retries: int = DEFAULT_RETRIES, plane=None) -> PlaneValue:
    """Degree of the codimension-two part of the singular scheme.

    Computed as the length of Z ∩ L for a random plane L, where Z ∩ L is cut
    out by the coefficients of w evaluated along L; lower-dimensional
    components of Z miss a general plane.  A caller-supplied ``plane`` is used
    as is, without the two-plane agreement check.
    """
    _need_n3(F)
    if plane is not None:
        return _fixed_plane(lambda M: restricted_singular_ideal(F, M), plane, F.n)
    return _plane_degree(lambda M: restricted_singular_ideal(F, M), F.n, substream(seed, "degz2"),
                         retries, "deg Z2")


def delta_global(F: ProjFoliation, seed=0, retries: int = DEFAULT_RETRIES, plane=None) -> PlaneValue:
    """Total delta of the foliation restricted to a random plane."""
    _need_n3(F)
    if plane is not None:
        return _fixed_plane(lambda M: delta_ideal(F, M), plane, F.n)
    return _plane_degree(lambda M: delta_ideal(F, M), F.n, substream(seed, "delta"), retries, "delta")


def _need_n3(F: ProjFoliation):
    if F.n < 3:
        raise InputError("plane sections need n >= 3")


# --------------------------------------------------------------------------
# Chern data and bounds
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class ChernData:
    n: int
    d: int
    c1_tf: int
    c2_tf: int
    discriminant: int
    deg_z2: int
    delta_global: int


def chern_data(n: int, d: int, deg_z2: int, delta_global: int) -> ChernData:
    """Chern numbers of the tangent sheaf against H^(n-2)."""
    twice = 2 * d * d + (n - 3) * (n - 2 * d) + 4 - 2 * deg_z2
    if twice % 2:
        raise InputError(f"non-integral c2 for n={n}, d={d}, deg Z2={deg_z2}")
    c1 = n - 1 - d
    c2 = twice // 2
    disc = 2 * (n - 1) * c2 - (n - 2) * c1 * c1
    return ChernData(n, d, c1, c2, disc, deg_z2, delta_global)


def pn_floor(n: int, d: int) -> Fraction:
    """Lower bound for c2 of the tangent sheaf on P^n: (n-2)(n-1-2d)/2."""
    return Fraction((n - 2) * (n - 1 - 2 * d), 2)


@dataclass(frozen=True)
class BoundReport:
    chern: ChernData
    floor: Fraction
    flags: dict
    certificates: dict = dc_field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(self.flags.values())

    def failures(self) -> list[str]:
        return sorted(k for k, v in self.flags.items() if not v)

    def as_dict(self) -> dict:
        c = self.chern
        return {"n": c.n, "d": c.d, "deg_z2": c.deg_z2, "delta": c.delta_global,
                "c1_tf": c.c1_tf, "c2_tf": c.c2_tf, "discriminant": c.discriminant,
                "P": _fmt_q(self.floor), "lower_deg_z2": c.d + 1,
                "upper_deg_z2": c.d * c.d + c.d + 1, "flags": dict(sorted(self.flags.items())),
                "pass": self.passed, "certificates": self.certificates}


def _fmt_q(q: Fraction) -> str | int:
    return q.numerator if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def bound_flags(c: ChernData) -> tuple[Fraction, dict]:
    n, d = c.n, c.d
    P = pn_floor(n, d)
    top = d * d + d + 1
    flags = {
        "thmB_lower": c.deg_z2 >= d + 1,
        "thmB_upper": c.deg_z2 <= top,
        "c2_window": d * d + P >= c.c2_tf >= P,
        "discriminant_floor": c.discriminant >= -(n - 2) * d * d,
        "thmA_lower": c.c2_tf >= P,
        "thmA_upper": c.delta_global + P >= c.c2_tf,
        "delta_bound": c.delta_global <= d * d,
        "sandwich": top >= c.deg_z2 >= top - c.delta_global,
    }
    return P, flags


def verify_bounds(F: ProjFoliation, seed=0, retries: int = DEFAULT_RETRIES, plane=None) -> BoundReport:
    """Compute deg Z2 and delta and evaluate every bound; failures are logged loudly."""
    z = deg_z2(F, seed, retries, plane)
    dl = delta_global(F, seed, retries, plane)
    c = chern_data(F.n, F.d, z.value, dl.value)
    P, flags = bound_flags(c)
    report = BoundReport(c, P, flags, {"deg_z2": z.certificate(), "delta": dl.certificate()})
    if not report.passed:
        log.error("BOUND VIOLATION %s for w = %s over %s, seed %r: %s",
                  report.failures(), F.w, F.field.describe(), seed, report.as_dict())
    return report


# --------------------------------------------------------------------------
# first-integral witness
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Witness:
    E: Polynomial
    plane: tuple
    wedge_vanishes: bool
    radial_identity: bool

    def as_dict(self) -> dict:
        return {"E": str(self.E), "plane": [list(r) for r in self.plane],
                "dwL_wedge_dE_zero": self.wedge_vanishes, "radial_identity": self.radial_identity}


def first_integral_witness(F: ProjFoliation, seed=0, retries: int = DEFAULT_RETRIES,
                           plane=None) -> Witness | None:
    """Linear form E with d(w|L) ∧ dE = 0 on a random plane L, if one exists.

    Writing d(w|L) = A dy1∧dy2 - B dy0∧dy2 + C dy0∧dy1, such E = a y0 + b y1
    + c y2 are the kernel vectors of the relation aA + bB + cC = 0.
    """
    _need_n3(F)
    rng = substream(seed, "witness")
    for _ in range(retries):
        M = [list(r) for r in plane] if plane is not None else random_plane_matrix(F.n, rng)
        wl = restrict_to_plane(F, M)
        if wl.is_zero():
            if plane is not None:
                raise GenericityError("the form vanishes on the given plane")
            continue
        dwl = wl.d()
        S = wl.ring
        rad = PolyVectorField.radial(S)
        radial_ok = contract(rad, dwl) == wl.scale(F.d + 2)
        if not radial_ok:
            log.error("radial identity failed on plane %s for w = %s", M, F.w)
        comps = [dwl.coefficient((1, 2)), -dwl.coefficient((0, 2)), dwl.coefficient((0, 1))]
        monos = sorted({m for A in comps for m in A.terms})
        rows = [[A.terms.get(m, S.field(0)) for A in comps] for m in monos]
        kernel = kernel_basis(rows, 3, S.field)
        if not kernel:
            return None
        E = sum((y.scale(a) for y, a in zip(S.gens(), kernel[0]) if a), S.zero())
        wedge_ok = dwl.wedge(PolyForm.function(E).d()).is_zero()
        return Witness(E, tuple(tuple(r) for r in M), wedge_ok, radial_ok)
    raise GenericityError("restriction vanished on every sampled plane")


# --------------------------------------------------------------------------
# generators
# --------------------------------------------------------------------------

def _poly(ring: PolyRing, f) -> Polynomial:
    return ring.parse(f) if isinstance(f, str) else ring(f)


def _homogeneous_degree(f: Polynomial) -> int:
    deg = f.homogeneous_degree()
    if deg is None or deg < 1:
        raise InputError(f"expected a nonconstant homogeneous form, got {f}")
    return deg


def rational(F, G, ring: PolyRing) -> ProjFoliation:
    """a F dG - b G dF for forms F, G of degrees a, b (first integral F^b/G^a)."""
    F, G = _poly(ring, F), _poly(ring, G)
    a, b = _homogeneous_degree(F), _homogeneous_degree(G)
    w = PolyForm.function(G).d().scale(F.scale(a)) - PolyForm.function(F).d().scale(G.scale(b))
    return validate(w)


def pencil(F, G, ring: PolyRing) -> ProjFoliation:
    F, G = _poly(ring, F), _poly(ring, G)
    if _homogeneous_degree(F) != 1 or _homogeneous_degree(G) != 1:
        raise InputError("a pencil of hyperplanes needs two linear forms")
    return rational(F, G, ring)


def logarithmic(forms: Sequence, lambdas: Sequence, ring: PolyRing) -> ProjFoliation:
    """(prod F_j) * sum lambda_i dF_i / F_i, for sum lambda_i deg F_i = 0."""
    Fs = [_poly(ring, f) for f in forms]
    residues = [Fraction(str(l)) for l in lambdas]
    if len(Fs) != len(residues) or len(Fs) < 2:
        raise InputError("logarithmic foliations need at least two forms and one residue per form")
    if any(l == 0 for l in residues):
        raise InputError("residues must be nonzero")
    degs = [_homogeneous_degree(f) for f in Fs]
    if sum(l * k for l, k in zip(residues, degs)) != 0:
        raise InputError("degree balance sum lambda_i deg F_i = 0 fails")
    lams = [ring.field(l) for l in residues]
    w = PolyForm(ring, 1)
    for i, (Fi, li) in enumerate(zip(Fs, lams)):
        others = ring.one()
        for j, Fj in enumerate(Fs):
            if j != i:
                others = others * Fj
        w = w + PolyForm.function(Fi).d().scale(others.scale(li))
    return validate(w)


def linear_pullback(eta: PolyForm, projection: Sequence[Sequence], ring: PolyRing) -> ProjFoliation:
    """Pull a foliation of P^2 (1-form in 3 variables) back along y = P x."""
    if eta.ring.nvars != 3 or eta.p != 1:
        raise InputError("linear_pullback expects a 1-form in three variables")
    if len(projection) != 3 or any(len(r) != ring.nvars for r in projection):
        raise InputError(f"projection must be a 3 x {ring.nvars} matrix")
    if rank(projection, ring.field) != 3:
        raise InputError("projection matrix must have rank 3")
    xs = ring.gens()
    images = [sum((x.scale(a) for x, a in zip(xs, row) if a), ring.zero()) for row in projection]
    base = eta if eta.ring.field == ring.field else PolyForm(
        eta.ring.with_field(ring.field), 1,
        {I: A.change_ring(eta.ring.with_field(ring.field)) for I, A in eta.coeffs.items()})
    return validate(pullback(base, images))


def _random_form(ring: PolyRing, deg: int, rng: random.Random, box: int = 9) -> Polynomial:
    monos = [m for m in itertools.product(range(deg + 1), repeat=ring.nvars) if sum(m) == deg]
    while True:
        f = Polynomial(ring, {m: rng.randint(-box, box) for m in monos})
        if f.homogeneous_degree() == deg:
            return f


def random_foliation(n: int, d: int, rng: random.Random, field: Field = QQ, kind: str | None = None,
                     ) -> ProjFoliation:
    """Random degree-d foliation on P^n from the rational, logarithmic or pullback families."""
    ring = projective_ring(n, field)
    kinds = ["rational", "linear_pullback"] + (["logarithmic"] if d >= 1 else [])
    kind = kind or rng.choice(kinds)
    if kind == "rational":
        a = rng.randint(1, (d + 2) // 2)
        return rational(_random_form(ring, a, rng), _random_form(ring, d + 2 - a, rng), ring)
    if kind == "logarithmic":
        if d < 1:
            raise InputError("logarithmic foliations with three or more factors have degree >= 1")
        k = rng.randint(3, min(d + 2, 4))
        degs = [1] * k
        for _ in range(d + 2 - k):
            degs[rng.randrange(k)] += 1
        while True:
            lams = [rng.choice([-3, -2, -1, 1, 2, 3]) for _ in range(k - 1)]
            s = sum(l * e for l, e in zip(lams, degs))
            if s:
                lams = [l * degs[-1] for l in lams] + [-s]
                break
        return logarithmic([_random_form(ring, e, rng) for e in degs], lams, ring)
    if kind == "linear_pullback":
        plane = PolyRing.standard(3, field, prefix="y")
        while True:
            eta = random_descent_form(plane, 1, d + 2, rng, terms=6)
            P = [[rng.randint(-9, 9) for _ in range(n + 1)] for _ in range(3)]
            if eta and rank(P, field) == 3:
                return linear_pullback(eta, P, ring)
    raise InputError(f"unknown foliation family {kind!r}")


def generate(kind: str, params: dict, field: Field = QQ, n: int | None = None) -> ProjFoliation:
    """Build a foliation from a generator description (as used in input documents)."""
    if kind in ("rational", "pencil"):
        n = _need(n, params)
        ring = projective_ring(n, field)
        builder = rational if kind == "rational" else pencil
        return builder(params["F"], params["G"], ring)
    if kind == "logarithmic":
        n = _need(n, params)
        return logarithmic(params["forms"], params["lambdas"], projective_ring(n, field))
    if kind == "linear_pullback":
        n = _need(n, params)
        plane = PolyRing.standard(3, field, prefix="y")
        coeffs = params["planar_form"]
        if len(coeffs) != 3:
            raise InputError("planar_form needs three coefficients")
        eta = PolyForm.one_form(plane, [plane.parse(c) for c in coeffs])
        return linear_pullback(eta, params["projection"], projective_ring(n, field))
    if kind == "random":
        n = _need(n, params)
        return random_foliation(n, int(params["d"]), substream(params.get("seed", 0), "generator"),
                                field, params.get("family"))
    raise InputError(f"unknown generator {kind!r}")


def _need(n, params) -> int:
    n = params.get("n", n)
    if n is None:
        raise InputError("generator needs n")
    return int(n)


# --------------------------------------------------------------------------
# Theorem A numeric evaluator
# --------------------------------------------------------------------------

def _exact(name: str, v, integral: bool = True) -> Fraction:
    try:
        q = Fraction(str(v)) if not isinstance(v, Fraction) else v
    except (ValueError, ZeroDivisionError) as e:
        raise InputError(f"{name}: not an exact number: {v!r}") from e
    if isinstance(v, float):
        raise InputError(f"{name}: floats are not exact; pass an integer or 'p/q'")
    if integral and q.denominator != 1:
        raise InputError(f"{name}: intersection numbers must be integers, got {v}")
    return q


@dataclass(frozen=True)
class TheoremAReport:
    n: int
    P: Fraction
    c2H: Fraction
    delta: Fraction
    lower: bool
    upper: bool
    degenerate: bool
    discriminant_ok: bool | None

    @property
    def passed(self) -> bool:
        return self.lower and self.upper and self.discriminant_ok is not False

    def as_dict(self) -> dict:
        return {"n": self.n, "P": _fmt_q(self.P), "c2H": _fmt_q(self.c2H), "delta": _fmt_q(self.delta),
                "lower": self.lower, "upper": self.upper, "degenerate": self.degenerate,
                "discriminant_ok": self.discriminant_ok, "pass": self.passed}


def theorem_a_report(n: int, HN, KH, NH, c2H, delta, disc=None, square=None) -> TheoremAReport:
    """delta + P >= c2H >= P with P = -(n-2)(NH + KH + (n-1)/2 HN).

    HN = H^n, KH = K_X.H^(n-1), NH = c1(N).H^(n-1); ``disc`` and ``square``
    (the discriminant and (K_X + c1(N) + (n-1)H)^2, both against H^(n-2))
    enable the extra check disc >= -(n-2) square.
    """
    if int(n) != n or n < 2:
        raise InputError("n must be an integer >= 2")
    HN, KH, NH, c2H = (_exact(k, v) for k, v in (("HN", HN), ("KH", KH), ("NH", NH), ("c2H", c2H)))
    delta = _exact("delta", delta)
    if delta < 0:
        raise InputError("delta is a length and cannot be negative")
    P = -(n - 2) * (NH + KH + Fraction(n - 1, 2) * HN)
    disc_ok = None
    if disc is not None or square is not None:
        if disc is None or square is None:
            raise InputError("the discriminant check needs both disc and square")
        disc_ok = _exact("disc", disc) >= -(n - 2) * _exact("square", square)
    return TheoremAReport(n, P, c2H, delta, c2H >= P, delta + P >= c2H, n == 2, disc_ok)


def pn_intersection_numbers(n: int, d: int) -> dict:
    """HN, KH, NH for a degree-d foliation on P^n with H the hyperplane class."""
    return {"HN": 1, "KH": -(n + 1), "NH": d + 2}

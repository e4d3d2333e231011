"""Polynomial differential forms: wedge, d, contraction, charts, pullbacks.

A p-form is stored sparsely as ``{I: A_I}`` with ``I`` a strictly increasing
tuple of variable indices, meaning ``sum A_I dx_I``.  All signs come from
:func:`insertion_sign`, the parity of moving ``dx_i`` into sorted position.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .errors import DescentError, InputError
from .groebner import Ideal
from .poly import PolyRing, Polynomial, parse_poly


def insertion_sign(i: int, I: Sequence[int]) -> int:
    """Sign of ``dx_i ∧ dx_I = ±dx_{I ∪ {i}}``; 0 when ``i`` is already in ``I``."""
    if i in I:
        return 0
    return -1 if sum(1 for j in I if j < i) % 2 else 1


def _merge_sign(I: Sequence[int], J: Sequence[int]) -> int:
    """Sign of ``dx_I ∧ dx_J`` relative to the sorted multi-index."""
    if set(I) & set(J):
        return 0
    inversions = sum(1 for a in I for b in J if a > b)
    return -1 if inversions % 2 else 1


class PolyForm:
    """Immutable differential p-form with polynomial coefficients."""

    __slots__ = ("ring", "p", "coeffs")

    def __init__(self, ring: PolyRing, p: int, coeffs: Mapping[Sequence[int], Polynomial] | None = None):
        if p < 0:
            raise InputError(f"negative form degree {p}")
        clean: dict[tuple[int, ...], Polynomial] = {}
        for I, A in (coeffs or {}).items():
            I = tuple(I)
            if len(I) != p or any(a >= b for a, b in zip(I, I[1:])) or any(not 0 <= i < ring.nvars for i in I):
                raise InputError(f"bad multi-index {I} for a {p}-form in {ring.nvars} variables")
            A = ring(A)
            if A:
                clean[I] = A
        self.ring = ring
        self.p = p
        self.coeffs = clean

    @classmethod
    def _make(cls, ring, p, coeffs):
        obj = cls.__new__(cls)
        obj.ring, obj.p = ring, p
        obj.coeffs = {I: A for I, A in coeffs.items() if A}
        return obj

    @classmethod
    def one_form(cls, ring: PolyRing, coefficients: Sequence) -> "PolyForm":
        """``sum coefficients[i] dx_i``; strings are parsed in ``ring``."""
        if len(coefficients) != ring.nvars:
            raise InputError(f"expected {ring.nvars} coefficients, got {len(coefficients)}")
        return cls(ring, 1, {(i,): ring(a) for i, a in enumerate(coefficients)})

    @classmethod
    def function(cls, f: Polynomial) -> "PolyForm":
        return cls(f.ring, 0, {(): f})

    @classmethod
    def dx(cls, ring: PolyRing, *indices: int) -> "PolyForm":
        """The basic form dx_{i1} ∧ ... ∧ dx_{ik} (indices in any order)."""
        sign = 1
        I: tuple[int, ...] = ()
        for i in reversed(indices):
            s = insertion_sign(i, I)
            if s == 0:
                return cls(ring, len(indices))
            sign *= s
            I = tuple(sorted(I + (i,)))
        return cls(ring, len(indices), {I: ring.constant(sign)})

    # -- queries ------------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.coeffs

    def __bool__(self):
        return bool(self.coeffs)

    def coefficient(self, I: Sequence[int]) -> Polynomial:
        return self.coeffs.get(tuple(I), self.ring.zero())

    def coefficient_list(self) -> list[Polynomial]:
        """All coefficients in multi-index order, zeros included."""
        return [self.coefficient(I) for I in itertools.combinations(range(self.ring.nvars), self.p)]

    def coefficient_degree(self) -> int | None:
        """Common degree of the coefficients if all are homogeneous of one degree."""
        degs = {A.homogeneous_degree() for A in self.coeffs.values()}
        if len(degs) != 1 or None in degs:
            return None
        return degs.pop()

    def __eq__(self, other):
        if not isinstance(other, PolyForm):
            return NotImplemented
        if other.ring != self.ring:
            return False
        if not self.coeffs and not other.coeffs:
            return True
        return self.p == other.p and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.ring, self.p, frozenset(self.coeffs.items())))

    def __str__(self):
        if not self.coeffs:
            return "0"
        names = self.ring.names
        parts = []
        for I in sorted(self.coeffs):
            basis = "∧".join(f"d{names[i]}" for i in I)
            A = str(self.coeffs[I])
            if not I:
                parts.append(A)
            else:
                parts.append(f"({A})*{basis}")
        return " + ".join(parts)

    def __repr__(self):
        return f"PolyForm<{self.p}>({self})"

    # -- linear structure ---------------------------------------------------

    def _check(self, other: "PolyForm"):
        if other.ring != self.ring:
            raise InputError("forms live over different rings")

    def __add__(self, other: "PolyForm") -> "PolyForm":
        self._check(other)
        if self.p != other.p and self and other:
            raise InputError("cannot add forms of different degree")
        p = self.p if self else other.p
        out = dict(self.coeffs)
        for I, A in other.coeffs.items():
            out[I] = out[I] + A if I in out else A
        return PolyForm._make(self.ring, p, out)

    def __neg__(self):
        return PolyForm._make(self.ring, self.p, {I: -A for I, A in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, f) -> "PolyForm":
        """Multiply every coefficient by a polynomial or scalar."""
        f = self.ring(f)
        return PolyForm._make(self.ring, self.p, {I: A * f for I, A in self.coeffs.items()})

    def __rmul__(self, f):
        return self.scale(f)

    # -- exterior algebra ---------------------------------------------------

    def wedge(self, other: "PolyForm") -> "PolyForm":
        self._check(other)
        out: dict[tuple[int, ...], Polynomial] = {}
        for I, A in self.coeffs.items():
            for J, B in other.coeffs.items():
                s = _merge_sign(I, J)
                if s == 0:
                    continue
                K = tuple(sorted(I + J))
                term = A * B if s > 0 else -(A * B)
                out[K] = out[K] + term if K in out else term
        return PolyForm._make(self.ring, self.p + other.p, out)

    def __xor__(self, other):
        return self.wedge(other)

    def d(self) -> "PolyForm":
        """Exterior derivative: sum over i of ∂_i A_I dx_i ∧ dx_I."""
        out: dict[tuple[int, ...], Polynomial] = {}
        for I, A in self.coeffs.items():
            for i in A.variables():
                s = insertion_sign(i, I)
                if s == 0:
                    continue
                K = tuple(sorted(I + (i,)))
                term = A.derivative(i)
                if s < 0:
                    term = -term
                out[K] = out[K] + term if K in out else term
        return PolyForm._make(self.ring, self.p + 1, out)

    def restrict_chart(self, i: int = 0) -> "PolyForm":
        return restrict_chart(self, i)

    def pullback(self, images: Sequence[Polynomial]) -> "PolyForm":
        return pullback(self, images)


@dataclass(frozen=True)
class PolyVectorField:
    """Polynomial vector field ``sum components[i] ∂/∂x_i``."""

    ring: PolyRing
    components: tuple[Polynomial, ...] = field(default=())

    def __post_init__(self):
        comps = tuple(self.ring(c) for c in self.components)
        if len(comps) != self.ring.nvars:
            raise InputError(f"vector field needs {self.ring.nvars} components")
        object.__setattr__(self, "components", comps)

    @classmethod
    def radial(cls, ring: PolyRing) -> "PolyVectorField":
        return cls(ring, ring.gens())

    @classmethod
    def partial(cls, ring: PolyRing, i: int) -> "PolyVectorField":
        comps = [ring.zero()] * ring.nvars
        comps[i] = ring.one()
        return cls(ring, tuple(comps))


def wedge(a: PolyForm, b: PolyForm) -> PolyForm:
    return a.wedge(b)


def exterior_d(a: PolyForm) -> PolyForm:
    return a.d()


def contract(v: PolyVectorField, a: PolyForm) -> PolyForm:
    """Interior product v ⌐ a, with (-1)^k for the k-th slot."""
    if v.ring != a.ring:
        raise InputError("vector field and form live over different rings")
    if a.p == 0:
        return PolyForm(a.ring, 0)
    out: dict[tuple[int, ...], Polynomial] = {}
    for I, A in a.coeffs.items():
        for k, j in enumerate(I):
            vj = v.components[j]
            if not vj:
                continue
            K = I[:k] + I[k + 1:]
            term = vj * A
            if k % 2:
                term = -term
            out[K] = out[K] + term if K in out else term
    return PolyForm._make(a.ring, a.p - 1, out)


def lie_derivative(v: PolyVectorField, a: PolyForm) -> PolyForm:
    """Cartan's formula: v ⌐ da + d(v ⌐ a)."""
    return contract(v, a.d()) + contract(v, a).d()


def is_integrable(w: PolyForm) -> bool:
    """Exact test of w ∧ dw = 0 for a 1-form."""
    if w.p != 1:
        raise InputError("integrability is defined here for 1-forms")
    if w.ring.nvars < 3:
        return True
    return w.wedge(w.d()).is_zero()


@dataclass(frozen=True)
class DescentReport:
    contraction_vanishes: bool
    lie_homogeneous: bool
    twist: int

    @property
    def passed(self) -> bool:
        return self.contraction_vanishes and self.lie_homogeneous

    def failures(self) -> list[str]:
        out = []
        if not self.contraction_vanishes:
            out.append("rad ⌐ w != 0")
        if not self.lie_homogeneous:
            out.append(f"L_rad w != {self.twist}*w")
        return out


def descent_check(w: PolyForm, k: int) -> DescentReport:
    """Check rad ⌐ w = 0 and L_rad w = k w (w is then a twisted form of weight k)."""
    rad = PolyVectorField.radial(w.ring)
    contraction = contract(rad, w)
    lie = lie_derivative(rad, w)
    return DescentReport(contraction.is_zero(), lie == w.scale(k), k)


def restrict_chart(w: PolyForm, i: int = 0) -> PolyForm:
    """Set x_i = 1, drop every term containing dx_i, and remove x_i."""
    n = w.ring.nvars
    if not 0 <= i < n:
        raise InputError(f"chart index {i} out of range for {n} variables")
    target = PolyRing(w.ring.names[:i] + w.ring.names[i + 1:], w.ring.field)
    out = {}
    for I, A in w.coeffs.items():
        if i in I:
            continue
        J = tuple(j - 1 if j > i else j for j in I)
        out[J] = A.specialize(i, 1)
    return PolyForm._make(target, w.p, out)


def _det(rows: list[list[Polynomial]], ring: PolyRing) -> Polynomial:
    if not rows:
        return ring.one()
    if len(rows) == 1:
        return rows[0][0]
    total = ring.zero()
    for j, a in enumerate(rows[0]):
        if not a:
            continue
        minor = [r[:j] + r[j + 1:] for r in rows[1:]]
        term = a * _det(minor, ring)
        total = total + term if j % 2 == 0 else total - term
    return total


def pullback(w: PolyForm, images: Sequence[Polynomial]) -> PolyForm:
    """Pull w back along the polynomial map x_i = images[i](y)."""
    if len(images) != w.ring.nvars:
        raise InputError(f"pullback needs {w.ring.nvars} images, got {len(images)}")
    target = images[0].ring
    m = target.nvars
    jac = [[g.derivative(j) for j in range(m)] for g in images]
    out: dict[tuple[int, ...], Polynomial] = {}
    for I, A in w.coeffs.items():
        A2 = A.compose(images)
        if not A2:
            continue
        for J in itertools.combinations(range(m), w.p):
            minor = _det([[jac[i][j] for j in J] for i in I], target)
            if minor:
                term = A2 * minor
                out[J] = out[J] + term if J in out else term
    return PolyForm._make(target, w.p, out)


def pullback_linear(w: PolyForm, matrix: Sequence[Sequence], target: PolyRing | None = None) -> PolyForm:
    """Pull w back along x = M y, M given as rows per source variable."""
    if len(matrix) != w.ring.nvars:
        raise InputError(f"matrix has {len(matrix)} rows, expected {w.ring.nvars}")
    ncols = len(matrix[0]) if matrix else 0
    target = target or PolyRing.standard(ncols, w.ring.field, prefix="y")
    if target.nvars != ncols or any(len(r) != ncols for r in matrix):
        raise InputError("pullback matrix does not match the target ring")
    ys = target.gens()
    images = [sum((y.scale(a) for y, a in zip(ys, row) if a), target.zero()) for row in matrix]
    return pullback(w, images)


def coefficient_ideal(w: PolyForm) -> Ideal:
    """Ideal generated by all coefficients of w (zero ideal for the zero form)."""
    return Ideal(w.ring, list(w.coeffs.values()))


@dataclass(frozen=True)
class ChartReport:
    chart: int
    twist: int
    from_d_omega: tuple[Polynomial, ...]
    from_chart: tuple[Polynomial, ...]
    forward: bool
    backward: bool

    @property
    def passed(self) -> bool:
        return self.forward and self.backward


def euler_chart_check(w: PolyForm, k: int, chart: int = 0) -> ChartReport:
    """Certify, on the chart {x_chart = 1}, that the coefficients of dw generate
    the same ideal as the coefficients of w|chart together with d(w|chart).

    Both inclusions are checked by Groebner-basis membership.
    """
    report = descent_check(w, k)
    if not report.passed:
        raise DescentError("; ".join(report.failures()))
    dw = w.d()
    big = [A.specialize(chart, 1) for A in dw.coeffs.values()]
    restricted = restrict_chart(w, chart)
    ring = restricted.ring
    small = list(restricted.d().coeffs.values()) + list(restricted.coeffs.values())
    big = [ring(g) for g in big]
    I_big, I_small = Ideal(ring, big), Ideal(ring, small)
    forward = I_big.contains_ideal(I_small)
    backward = I_small.contains_ideal(I_big)
    return ChartReport(chart, k, tuple(big), tuple(small), forward, backward)


def random_descent_form(ring: PolyRing, p: int, k: int, rng, terms: int = 3, box: int = 9) -> PolyForm:
    """A random twisted p-form of weight k: rad ⌐ eta for a random (p+1)-form eta
    whose coefficients are sparse homogeneous of degree k - p - 1."""
    n = ring.nvars
    deg = k - p - 1
    if deg < 0 or p + 1 > n:
        raise InputError(f"no descent {p}-forms of twist {k} in {n} variables")
    monos = [m for m in itertools.product(range(deg + 1), repeat=n) if sum(m) == deg]
    eta = {}
    for J in itertools.combinations(range(n), p + 1):
        chosen = rng.sample(monos, min(terms, len(monos)))
        eta[J] = Polynomial(ring, {m: rng.randint(-box, box) for m in chosen})
    return contract(PolyVectorField.radial(ring), PolyForm(ring, p + 1, eta))


def parse_one_form(text: str, ring: PolyRing) -> PolyForm:
    """Parse a 1-form written with differentials, e.g. ``"x*dy - y*dx"``.

    Every term must contain exactly one differential ``d<name>`` of a ring
    variable; coefficients may be any polynomial expression.
    """
    tags = [f"_d{i}_" for i in range(ring.nvars)]
    order = sorted(range(ring.nvars), key=lambda i: -len(ring.names[i]))
    pattern = re.compile(r"\bd(" + "|".join(re.escape(ring.names[i]) for i in order) + r")\b")
    index = {nm: i for i, nm in enumerate(ring.names)}
    marked = pattern.sub(lambda m: tags[index[m.group(1)]], text)
    big = PolyRing(ring.names + tuple(tags), ring.field)
    expr = parse_poly(marked, big)
    n = ring.nvars
    coeffs = [dict() for _ in range(n)]
    for m, c in expr.terms.items():
        dpart = m[n:]
        if sum(dpart) != 1:
            raise InputError(f"{text!r}: every term needs exactly one differential")
        coeffs[dpart.index(1)][m[:n]] = c
    return PolyForm.one_form(ring, [Polynomial(ring, t) for t in coeffs])

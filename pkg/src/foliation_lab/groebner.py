"""Buchberger's algorithm and the ideal operations built on it.

Everything here is exact.  Lengths that come from a stabilization argument
(local colength at the origin, Hilbert degree) are returned together with
the step at which they stabilized, see :class:`Stabilized`.
"""

from __future__ import annotations

import contextlib
import contextvars
import heapq
import itertools
import logging
import math
from dataclasses import dataclass, replace
from typing import Iterable, NamedTuple, Sequence

from .errors import BudgetExceeded, InputError, NotZeroDimensional
from .poly import GREVLEX, Monomial, PolyRing, Polynomial, TermOrder

log = logging.getLogger(__name__)

INFINITE = math.inf


@dataclass(frozen=True)
class Limits:
    """Resource budgets.  Exceeding one raises :class:`BudgetExceeded`."""

    max_pairs: int = 500_000
    max_degree: int = 400
    local_cap: int = 64
    saturation_steps: int = 64


_limits: contextvars.ContextVar[Limits] = contextvars.ContextVar("foliation_lab_limits", default=Limits())


def current_limits() -> Limits:
    return _limits.get()


@contextlib.contextmanager
def limits(**changes):
    """Temporarily override budgets: ``with limits(max_pairs=1000): ...``."""
    token = _limits.set(replace(_limits.get(), **{k: v for k, v in changes.items() if v is not None}))
    try:
        yield _limits.get()
    finally:
        _limits.reset(token)


class Stabilized(NamedTuple):
    value: int | float
    step: int


# --------------------------------------------------------------------------
# monomial helpers
# --------------------------------------------------------------------------

def _divides(a: Monomial, b: Monomial) -> bool:
    return all(x <= y for x, y in zip(a, b))


def _lcm(a: Monomial, b: Monomial) -> Monomial:
    return tuple(x if x > y else y for x, y in zip(a, b))


def _sub(a: Monomial, b: Monomial) -> Monomial:
    return tuple(x - y for x, y in zip(a, b))


class _Elem:
    """Monic basis element in dict form."""

    __slots__ = ("lm", "terms", "tail", "sugar")

    def __init__(self, lm, terms, sugar: int = 0):
        self.lm = lm
        self.terms = terms
        self.tail = [(m, c) for m, c in terms.items() if m != lm]
        self.sugar = sugar


def _make_monic(terms: dict, key, field, sugar: int = 0) -> _Elem:
    lm = min(terms, key=key)
    lc = terms[lm]
    if lc != 1:
        inv = field.inv(lc)
        mod = field.modulus
        if mod:
            terms = {m: c * inv % mod for m, c in terms.items()}
        else:
            terms = {m: c * inv for m, c in terms.items()}
    return _Elem(lm, terms, sugar)


def _reduce(p: dict, basis: Sequence[_Elem], key, mod, full: bool = True) -> dict:
    """Remainder of ``p`` modulo ``basis`` (monic elements)."""
    if not p or not basis:
        return dict(p)
    p = dict(p)
    heap = [(key(m), m) for m in p]
    heapq.heapify(heap)
    rem = {}
    lms = [(b.lm, b) for b in basis]
    while heap:
        _, m = heapq.heappop(heap)
        c = p.pop(m, None)
        if c is None:
            continue
        for lm, b in lms:
            if _divides(lm, m):
                t = _sub(m, lm)
                for mg, cg in b.tail:
                    mm = tuple(x + y for x, y in zip(t, mg))
                    old = p.get(mm)
                    v = (0 if old is None else old) - c * cg
                    if mod:
                        v %= mod
                    if v:
                        p[mm] = v
                        if old is None:
                            heapq.heappush(heap, (key(mm), mm))
                    elif old is not None:
                        del p[mm]
                break
        else:
            rem[m] = c
            if not full:
                rem.update(p)
                return rem
    return rem


def _spoly(f: _Elem, g: _Elem, mod) -> dict:
    lcm = _lcm(f.lm, g.lm)
    tf, tg = _sub(lcm, f.lm), _sub(lcm, g.lm)
    out: dict = {}
    for m, c in f.tail:
        out[tuple(x + y for x, y in zip(tf, m))] = c
    for m, c in g.tail:
        mm = tuple(x + y for x, y in zip(tg, m))
        v = out.get(mm, 0) - c
        if mod:
            v %= mod
        if v:
            out[mm] = v
        else:
            out.pop(mm, None)
    return out


# --------------------------------------------------------------------------
# Groebner bases
# --------------------------------------------------------------------------

class GroebnerBasis:
    """Reduced Groebner basis of an ideal for one term order."""

    def __init__(self, ring: PolyRing, order: TermOrder, polys: Sequence[Polynomial], pairs: int = 0):
        key = order.key(ring.nvars)
        polys = sorted(polys, key=lambda f: key(f.leading_monomial(order)))
        self.ring = ring
        self.order = order
        self.polys: tuple[Polynomial, ...] = tuple(polys)
        self.lms: tuple[Monomial, ...] = tuple(f.leading_monomial(order) for f in polys)
        self.reduced = True
        self.pairs_processed = pairs
        self._elems = [_Elem(lm, dict(f.terms)) for lm, f in zip(self.lms, polys)]

    def __iter__(self):
        return iter(self.polys)

    def __len__(self):
        return len(self.polys)

    def __repr__(self):
        return f"GroebnerBasis([{', '.join(map(str, self.polys))}])"

    def is_unit(self) -> bool:
        return any(not any(lm) for lm in self.lms)

    def is_zero(self) -> bool:
        return not self.polys

    def reduce(self, f: Polynomial) -> Polynomial:
        if f.ring != self.ring:
            raise InputError("polynomial and basis live in different rings")
        key = self.order.key(self.ring.nvars)
        return Polynomial._make(self.ring, _reduce(f.terms, self._elems, key, self.ring.field.modulus))

    def contains(self, f: Polynomial) -> bool:
        return not self.reduce(f)

    def same_ideal(self, other: "GroebnerBasis") -> bool:
        return self.order == other.order and set(self.polys) == set(other.polys)


def buchberger(gens: Iterable[Polynomial], order: TermOrder = GREVLEX, ring: PolyRing | None = None) -> GroebnerBasis:
    """Reduced Groebner basis of the ideal generated by ``gens``.

    Sugar selection strategy (the normal strategy on homogeneous input) with
    the Gebauer-Moeller installation of both Buchberger criteria.  Raises :class:`BudgetExceeded` past ``max_pairs``
    S-pairs or when a basis element exceeds ``max_degree``.
    """
    gens = [g for g in gens]
    if ring is None:
        if not gens:
            raise InputError("buchberger needs a ring or a nonempty generator list")
        ring = gens[0].ring
    if any(g.ring != ring for g in gens):
        raise InputError("generators live in different rings")
    gens = [g for g in gens if g]
    field, mod = ring.field, ring.field.modulus
    key = order.key(ring.nvars)
    lim = current_limits()
    if not gens:
        return GroebnerBasis(ring, order, [])

    elems: list[_Elem] = []
    active: set[int] = set()
    pairs: set[tuple[int, int]] = set()

    def update(ih: int):
        nonlocal active, pairs
        mh = elems[ih].lm
        C = set(active)
        D = set()
        while C:
            ig = C.pop()
            mg = elems[ig].lm
            lcm_hg = _lcm(mh, mg)
            disjoint = all(a == 0 or b == 0 for a, b in zip(mh, mg))
            if disjoint or (
                not any(_divides(_lcm(mh, elems[ip].lm), lcm_hg) for ip in C)
                and not any(_divides(_lcm(mh, elems[pr[1]].lm), lcm_hg) for pr in D)
            ):
                D.add((ih, ig))
        E = set()
        for ih_, ig in D:
            mg = elems[ig].lm
            if not all(a == 0 or b == 0 for a, b in zip(mh, mg)):
                E.add((ih_, ig))
        new_pairs = set()
        for ig1, ig2 in pairs:
            m1, m2 = elems[ig1].lm, elems[ig2].lm
            l12 = _lcm(m1, m2)
            if not _divides(mh, l12) or _lcm(m1, mh) == l12 or _lcm(m2, mh) == l12:
                new_pairs.add((ig1, ig2))
        pairs = new_pairs | E
        active = {ig for ig in active if not _divides(mh, elems[ig].lm)}
        active.add(ih)

    def add(terms: dict, sugar: int):
        el = _make_monic(terms, key, field, sugar)
        if sum(el.lm) > lim.max_degree:
            raise BudgetExceeded(f"Groebner basis degree exceeded max_degree={lim.max_degree}")
        elems.append(el)
        update(len(elems) - 1)

    # reduce generators against each other as they come in, smallest first
    for g in sorted(gens, key=lambda f: key(f.leading_monomial(order)), reverse=True):
        r = _reduce(g.terms, [elems[i] for i in sorted(active)], key, mod)
        if r:
            add(r, g.degree())
            if not any(elems[-1].lm):
                return GroebnerBasis(ring, order, [ring.one()])

    def sugar(pr) -> int:
        a, b = elems[pr[0]], elems[pr[1]]
        lcm = _lcm(a.lm, b.lm)
        return max(a.sugar + sum(lcm) - sum(a.lm), b.sugar + sum(lcm) - sum(b.lm))

    processed = 0
    while pairs:
        pair = min(pairs, key=lambda pr: (sugar(pr), key(_lcm(elems[pr[0]].lm, elems[pr[1]].lm)), pr))
        pairs.discard(pair)
        processed += 1
        if processed > lim.max_pairs:
            raise BudgetExceeded(f"Groebner basis exceeded max_pairs={lim.max_pairs}")
        s = _spoly(elems[pair[0]], elems[pair[1]], mod)
        r = _reduce(s, [elems[i] for i in sorted(active)], key, mod)
        if r:
            add(r, sugar(pair))
            if not any(elems[-1].lm):
                return GroebnerBasis(ring, order, [ring.one()], processed)

    # interreduce the (already minimal) active set
    basis = [elems[i] for i in sorted(active, key=lambda i: key(elems[i].lm))]
    reduced = []
    for i, el in enumerate(basis):
        others = basis[:i] + basis[i + 1:]
        tail = _reduce(dict(el.tail), others, key, mod)
        tail[el.lm] = el.terms[el.lm]
        reduced.append(Polynomial._make(ring, tail))
    return GroebnerBasis(ring, order, reduced, processed)


def normal_form(f: Polynomial, G: GroebnerBasis) -> Polynomial:
    return G.reduce(f)


def s_pairs_reduce_to_zero(G: GroebnerBasis) -> bool:
    """Buchberger's criterion checked on every pair, no shortcuts."""
    key = G.order.key(G.ring.nvars)
    mod = G.ring.field.modulus
    els = G._elems
    for a, b in itertools.combinations(els, 2):
        if _reduce(_spoly(a, b, mod), els, key, mod):
            return False
    return True


# --------------------------------------------------------------------------
# ideals
# --------------------------------------------------------------------------

class Ideal:
    """Finitely generated ideal with cached Groebner bases per order."""

    def __init__(self, ring: PolyRing, gens: Iterable[Polynomial] = ()):
        gens = tuple(ring(g) for g in gens)
        self.ring = ring
        self.gens = tuple(g for g in gens if g)
        self._gb: dict[TermOrder, GroebnerBasis] = {}

    @classmethod
    def unit(cls, ring: PolyRing) -> "Ideal":
        return cls(ring, [ring.one()])

    @classmethod
    def maximal(cls, ring: PolyRing) -> "Ideal":
        """The ideal of the origin, (x_1, ..., x_n)."""
        return cls(ring, ring.gens())

    def groebner(self, order: TermOrder = GREVLEX) -> GroebnerBasis:
        gb = self._gb.get(order)
        if gb is None:
            gb = buchberger(self.gens, order, ring=self.ring)
            self._gb[order] = gb
        return gb

    def __repr__(self):
        return f"Ideal({', '.join(map(str, self.gens)) or '0'})"

    def is_zero(self) -> bool:
        return not self.gens

    def is_unit(self) -> bool:
        return self.groebner().is_unit()

    def __contains__(self, f) -> bool:
        return self.groebner().contains(self.ring(f))

    def contains_ideal(self, other: "Ideal") -> bool:
        gb = self.groebner()
        return all(gb.contains(g) for g in other.gens)

    def __eq__(self, other):
        if not isinstance(other, Ideal):
            return NotImplemented
        return self.ring == other.ring and self.groebner().same_ideal(other.groebner())

    __hash__ = None

    def __add__(self, other: "Ideal | Iterable[Polynomial]") -> "Ideal":
        extra = other.gens if isinstance(other, Ideal) else tuple(other)
        return Ideal(self.ring, self.gens + tuple(extra))

    def __mul__(self, other: "Ideal") -> "Ideal":
        return Ideal(self.ring, [f * g for f in self.gens for g in other.gens])

    def quotient(self, f: Polynomial) -> "Ideal":
        return ideal_quotient(self, f)

    def saturate(self, f: Polynomial) -> "Ideal":
        return saturation(self, f)

    def colength(self):
        return colength(self)

    def dimension(self) -> int:
        return dimension(self)


def _tagged_ring(ring: PolyRing) -> PolyRing:
    name = "_t"
    while name in ring.names:
        name += "_"
    return PolyRing((name,) + ring.names, ring.field)


def intersection(I: Ideal, J: Ideal) -> Ideal:
    """I ∩ J by eliminating t from t*I + (1 - t)*J."""
    ring = I.ring
    if J.ring != ring:
        raise InputError("ideals live in different rings")
    if I.is_zero() or J.is_zero():
        return Ideal(ring)
    T = _tagged_ring(ring)
    shift = list(range(1, T.nvars))
    t = T.gen(0)
    gens = [t * g.change_ring(T, shift) for g in I.gens]
    gens += [(1 - t) * h.change_ring(T, shift) for h in J.gens]
    gb = buchberger(gens, TermOrder("block", block=1), ring=T)
    kept = []
    for g in gb:
        if all(m[0] == 0 for m in g.terms):
            kept.append(Polynomial._make(ring, {m[1:]: c for m, c in g.terms.items()}))
    return Ideal(ring, kept)


def ideal_quotient(I: Ideal, f: Polynomial, method: str = "auto") -> Ideal:
    """(I : f) = {g : g*f in I}.

    ``elimination`` computes (I ∩ (f)) / f with a tag variable.  ``linear``
    needs k[x]/I finite-dimensional and takes the kernel of multiplication by
    f on the standard-monomial basis.  ``auto`` uses ``linear`` when it applies.
    """
    f = I.ring(f)
    if not f:
        raise InputError("ideal quotient by the zero polynomial")
    if f.is_constant():
        return I
    if I.is_zero():
        return Ideal(I.ring)
    if method not in ("auto", "linear", "elimination"):
        raise ValueError(f"unknown quotient method {method!r}")
    if method != "elimination":
        sm = standard_monomials(I.groebner())
        if sm is not None:
            return _quotient_linear(I, f, sm)
        if method == "linear":
            raise NotZeroDimensional("linear ideal quotient needs a zero-dimensional ideal")
    meet = intersection(I, Ideal(I.ring, [f]))
    return Ideal(I.ring, [g.exact_div(f) for g in meet.gens])


def _quotient_linear(I: Ideal, f: Polynomial, basis: list[Monomial]) -> Ideal:
    from .linalg import kernel_basis

    ring, G = I.ring, I.groebner()
    index = {m: k for k, m in enumerate(basis)}
    # column j holds the normal form of f * basis[j]
    cols = []
    for m in basis:
        nf = G.reduce(f.mul_monomial(m))
        col = [ring.field(0)] * len(basis)
        for mm, c in nf.terms.items():
            col[index[mm]] = c
        cols.append(col)
    rows = [[cols[j][i] for j in range(len(basis))] for i in range(len(basis))]
    extra = []
    for v in kernel_basis(rows, len(basis), ring.field):
        extra.append(Polynomial._make(ring, {m: c for m, c in zip(basis, v) if c}))
    return Ideal(ring, list(G.polys) + extra)


def saturation(I: Ideal, f: Polynomial) -> Ideal:
    """(I : f^∞) by iterating ideal quotients until the ideal stops growing."""
    lim = current_limits()
    cur = I
    for _ in range(lim.saturation_steps):
        nxt = ideal_quotient(cur, f)
        if nxt.groebner().same_ideal(cur.groebner()):
            return nxt
        cur = nxt
    raise BudgetExceeded(f"saturation did not stabilize in {lim.saturation_steps} steps")


def saturate_by_variable(I: Ideal, i: int) -> Ideal:
    """(I : x_i^∞) for homogeneous I: grevlex GB with x_i last, then divide out x_i."""
    ring = I.ring
    if not all(g.is_homogeneous() for g in I.gens):
        return saturation(I, ring.gen(i))
    perm = tuple(j for j in range(ring.nvars) if j != i) + (i,)
    gb = I.groebner(TermOrder("grevlex", perm))
    out = []
    for g in gb:
        k = min(m[i] for m in g.terms)
        if k:
            g = Polynomial._make(ring, {m[:i] + (m[i] - k,) + m[i + 1:]: c for m, c in g.terms.items()})
        out.append(g)
    return Ideal(ring, out)


def saturate_irrelevant(I: Ideal) -> Ideal:
    """(I : m^∞) for m = (x_0, ..., x_n), as the intersection of the (I : x_i^∞)."""
    parts = [saturate_by_variable(I, i) for i in range(I.ring.nvars)]
    result = parts[0]
    for part in parts[1:]:
        if part.groebner().same_ideal(result.groebner()):
            continue
        if result.contains_ideal(part):
            result = part
        elif not part.contains_ideal(result):
            result = intersection(result, part)
    return Ideal(I.ring, result.groebner().polys)


# --------------------------------------------------------------------------
# lengths, dimension, Hilbert degree
# --------------------------------------------------------------------------

def standard_monomials(G: GroebnerBasis, max_degree: int | None = None) -> list[Monomial] | None:
    """Monomials outside the leading-term ideal, or None if there are infinitely many.

    With ``max_degree`` the enumeration is restricted to that degree and is
    always finite.
    """
    n = G.ring.nvars
    lms = G.lms
    if G.is_zero() and max_degree is None:
        return None if n else [()]
    bounds = []
    for i in range(n):
        pure = [lm[i] for lm in lms if lm[i] and sum(lm) == lm[i]]
        if pure:
            bounds.append(min(pure) - 1)
        elif max_degree is None:
            return None
        else:
            bounds.append(max_degree)
    out = []

    def rec(i, prefix, deg):
        if i == n:
            m = tuple(prefix)
            if not any(_divides(lm, m) for lm in lms):
                out.append(m)
            return
        top = bounds[i] if max_degree is None else min(bounds[i], max_degree - deg)
        for e in range(top + 1):
            prefix.append(e)
            partial = tuple(prefix) + (0,) * (n - i - 1)
            if any(_divides(lm, partial) for lm in lms):
                prefix.pop()
                break
            rec(i + 1, prefix, deg + e)
            prefix.pop()

    rec(0, [], 0)
    return out


def colength(I: Ideal):
    """dim_k k[x]/I as a natural number, or INFINITE."""
    sm = standard_monomials(I.groebner())
    return INFINITE if sm is None else len(sm)


def dimension(I: Ideal) -> int:
    """Krull dimension of k[x]/I; -1 for the unit ideal."""
    G = I.groebner()
    if G.is_unit():
        return -1
    n = I.ring.nvars
    supports = [frozenset(i for i, e in enumerate(lm) if e) for lm in G.lms]
    for size in range(n, -1, -1):
        for U in itertools.combinations(range(n), size):
            Us = set(U)
            if not any(s <= Us for s in supports):
                return size
    return 0


def _power_of_maximal(ring: PolyRing, N: int) -> list[Polynomial]:
    n = ring.nvars
    one = ring.field(1)
    out = []
    for combo in itertools.combinations_with_replacement(range(n), N):
        e = [0] * n
        for i in combo:
            e[i] += 1
        out.append(Polynomial._make(ring, {tuple(e): one}))
    return out


def origin_is_isolated(I: Ideal) -> bool:
    """True when the origin is not on a positive-dimensional component of V(I)."""
    if dimension(I) <= 0:
        return True
    parts = [saturation(I, x) for x in I.ring.gens()]
    sat = parts[0]
    for p in parts[1:]:
        sat = intersection(sat, p)
    # V(I : m^∞) is the closure of V(I) minus the origin
    return any(g.constant_term() != 0 for g in sat.groebner())


def local_length(I: Ideal) -> Stabilized:
    """Length of the localization of k[x]/I at the origin, with certificate.

    colength(I + m^N) is computed for N = 2, 4, 8, ... until two consecutive
    values agree; ``step`` is the N at which agreement was first observed.
    """
    ring = I.ring
    G = I.groebner()
    if G.is_unit() or any(g.constant_term() != 0 for g in G):
        return Stabilized(0, 0)
    cap = current_limits().local_cap
    if not origin_is_isolated(I):
        return Stabilized(INFINITE, 0)
    prev = None
    N = 1
    while N <= cap:
        N = 2 if N == 1 else 2 * N
        if N > cap:
            break
        truncated = Ideal(ring, list(G.polys) + _power_of_maximal(ring, N))
        val = colength(truncated)
        if prev is not None and val == prev:
            return Stabilized(val, N)
        prev = val
    raise BudgetExceeded(f"local colength did not stabilize below local_cap={cap}")


def local_colength_origin(I: Ideal):
    """dim_k of (k[x]/I) localized at the origin; INFINITE when not finite."""
    return local_length(I).value


def hilbert_function(I: Ideal, D: int) -> int:
    """dim_k of the degree-D piece of k[x]/I for homogeneous I."""
    G = I.groebner()
    n = I.ring.nvars
    lms = G.lms
    count = 0
    for combo in itertools.combinations_with_replacement(range(n), D):
        e = [0] * n
        for i in combo:
            e[i] += 1
        m = tuple(e)
        if not any(_divides(lm, m) for lm in lms):
            count += 1
    return count


def hilbert_degree_certified(I: Ideal) -> Stabilized:
    """Degree of the zero-dimensional projective scheme cut out by homogeneous I.

    The Hilbert function is evaluated from the top degree of the basis
    upward until three consecutive values agree.
    """
    if not all(g.is_homogeneous() for g in I.gens):
        raise InputError("hilbert_degree needs a homogeneous ideal")
    dim = dimension(I)
    if dim <= 0:
        return Stabilized(0, 0)
    if dim > 1:
        raise NotZeroDimensional(f"projective dimension {dim - 1} > 0")
    G = I.groebner()
    start = max((sum(lm) for lm in G.lms), default=0)
    cap = current_limits().max_degree
    run = [hilbert_function(I, start), hilbert_function(I, start + 1)]
    D = start + 1
    while D < start + cap:
        D += 1
        run.append(hilbert_function(I, D))
        if run[-1] == run[-2] == run[-3]:
            return Stabilized(run[-1], D - 2)
    raise BudgetExceeded("Hilbert function did not stabilize")


def hilbert_degree(I: Ideal) -> int:
    return hilbert_degree_certified(I).value

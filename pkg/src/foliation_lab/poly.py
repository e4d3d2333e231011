"""Exact multivariate polynomials over Q and prime fields.

Polynomials are immutable values: a ring (variable names plus coefficient
field) and a sparse map from exponent tuples to nonzero coefficients.
Coefficients are :class:`fractions.Fraction` over Q and plain ints in
``[0, p)`` over F_p.  There is no floating-point path.
"""

from __future__ import annotations

import functools
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Mapping, Sequence

from .errors import InputError, ParseError

Monomial = tuple  # tuple[int, ...]

DEFAULT_PRIME = 2147483629


def _is_probable_prime(p: int) -> bool:
    if p < 2:
        return False
    small = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
    for q in small:
        if p % q == 0:
            return p == q
    d, s = p - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    # deterministic for p < 3.3e24
    for a in small:
        x = pow(a, d, p)
        if x in (1, p - 1):
            continue
        for _ in range(s - 1):
            x = x * x % p
            if x == p - 1:
                break
        else:
            return False
    return True


@dataclass(frozen=True)
class Field:
    """Coefficient field: Q when ``modulus`` is None, otherwise F_p."""

    modulus: int | None = None

    def __post_init__(self):
        if self.modulus is not None and not _is_probable_prime(self.modulus):
            raise InputError(f"field modulus {self.modulus} is not prime")

    @property
    def characteristic(self) -> int:
        return self.modulus or 0

    def __call__(self, value) -> int | Fraction:
        p = self.modulus
        if isinstance(value, str):
            value = Fraction(value)
        if p is None:
            return Fraction(value)
        if isinstance(value, Fraction):
            if value.denominator % p == 0:
                raise ZeroDivisionError(f"{value} has no image in F_{p}")
            return value.numerator * pow(value.denominator, -1, p) % p
        return int(value) % p

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        if self.modulus is None:
            return 1 / Fraction(a)
        return pow(a, -1, self.modulus)

    def format(self, a) -> str:
        """Exact text for a coefficient; F_p residues use the symmetric range."""
        if self.modulus is not None:
            a = int(a)
            if a > self.modulus // 2:
                a -= self.modulus
            return str(a)
        a = Fraction(a)
        return str(a.numerator) if a.denominator == 1 else f"{a.numerator}/{a.denominator}"

    def describe(self) -> str:
        return "q" if self.modulus is None else f"fp:{self.modulus}"

    @classmethod
    def parse(cls, text: str) -> "Field":
        """Parse ``q``, ``fp`` (default prime) or ``fp:P``."""
        text = text.strip().lower()
        if text in ("q", "qq"):
            return QQ
        if text == "fp":
            return cls(DEFAULT_PRIME)
        if text.startswith("fp:"):
            try:
                return cls(int(text[3:]))
            except ValueError:
                raise InputError(f"bad field descriptor {text!r}") from None
        raise InputError(f"bad field descriptor {text!r}")


QQ = Field()


def GF(p: int = DEFAULT_PRIME) -> Field:
    return Field(p)


# --------------------------------------------------------------------------
# term orders
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class TermOrder:
    """A monomial order.

    ``kind`` is ``grevlex``, ``lex`` or ``block``.  ``perm`` lists variable
    indices from most to least significant (identity when omitted).  A
    ``block`` order compares the first ``block`` variables of ``perm`` by
    grevlex and breaks ties by grevlex on the rest, so it eliminates them.
    """

    kind: str = "grevlex"
    perm: tuple[int, ...] | None = None
    block: int = 0

    def __post_init__(self):
        if self.kind not in ("grevlex", "lex", "block"):
            raise ValueError(f"unknown term order {self.kind!r}")

    def key(self, nvars: int) -> Callable[[Monomial], tuple]:
        """Sort key where a *smaller* key means a *larger* monomial."""
        return _order_key(self, nvars)

    def leading(self, monomials: Iterable[Monomial], nvars: int) -> Monomial:
        return min(monomials, key=self.key(nvars))

    def greater(self, a: Monomial, b: Monomial) -> bool:
        k = self.key(len(a))
        return k(a) < k(b)


@functools.lru_cache(maxsize=None)
def _order_key(order: TermOrder, nvars: int):
    perm = order.perm if order.perm is not None else tuple(range(nvars))
    if sorted(perm) != list(range(nvars)):
        raise ValueError(f"order permutation {perm} does not match {nvars} variables")
    if order.kind == "lex":
        return lambda m: tuple(-m[i] for i in perm)
    if order.kind == "grevlex":
        rev = perm[::-1]
        return lambda m: (-sum(m),) + tuple(m[i] for i in rev)
    head, tail = perm[: order.block], perm[order.block:]
    rh, rt = head[::-1], tail[::-1]

    def key(m):
        return ((-sum(m[i] for i in head),) + tuple(m[i] for i in rh)
                + (-sum(m[i] for i in tail),) + tuple(m[i] for i in rt))

    return key


GREVLEX = TermOrder("grevlex")
LEX = TermOrder("lex")


# --------------------------------------------------------------------------
# rings and polynomials
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class PolyRing:
    names: tuple[str, ...]
    field: Field = QQ

    def __post_init__(self):
        object.__setattr__(self, "names", tuple(self.names))
        if len(set(self.names)) != len(self.names):
            raise InputError(f"duplicate variable names in {self.names}")

    @classmethod
    def standard(cls, nvars: int, field: Field = QQ, prefix: str = "x", start: int = 0) -> "PolyRing":
        return cls(tuple(f"{prefix}{i}" for i in range(start, start + nvars)), field)

    @property
    def nvars(self) -> int:
        return len(self.names)

    def with_field(self, field: Field) -> "PolyRing":
        return PolyRing(self.names, field)

    def zero(self) -> "Polynomial":
        return Polynomial._make(self, {})

    def one(self) -> "Polynomial":
        return self.constant(1)

    def constant(self, c) -> "Polynomial":
        c = self.field(c)
        return Polynomial._make(self, {(0,) * self.nvars: c} if c != 0 else {})

    def gen(self, i: int | str) -> "Polynomial":
        if isinstance(i, str):
            i = self.index(i)
        e = [0] * self.nvars
        e[i] = 1
        return Polynomial._make(self, {tuple(e): self.field(1)})

    def gens(self) -> tuple["Polynomial", ...]:
        return tuple(self.gen(i) for i in range(self.nvars))

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise InputError(f"unknown variable {name!r}") from None

    def monomial(self, exps: Sequence[int], coeff=1) -> "Polynomial":
        return Polynomial(self, {tuple(exps): coeff})

    def parse(self, text: str) -> "Polynomial":
        return parse_poly(text, self)

    def __call__(self, value) -> "Polynomial":
        if isinstance(value, Polynomial):
            if value.ring == self:
                return value
            if value.ring.names == self.names:
                return Polynomial(self, value.terms)
            raise InputError("polynomial belongs to a different ring")
        if isinstance(value, str):
            return self.parse(value)
        return self.constant(value)


class Polynomial:
    """Immutable sparse polynomial.  Build through :class:`PolyRing`."""

    __slots__ = ("ring", "terms", "_hash")

    def __init__(self, ring: PolyRing, terms: Mapping[Monomial, object] | None = None):
        conv = ring.field
        clean = {}
        for m, c in (terms or {}).items():
            m = tuple(int(e) for e in m)
            if len(m) != ring.nvars or min(m, default=0) < 0:
                raise InputError(f"bad exponent vector {m} for {ring.nvars} variables")
            c = conv(c)
            if c != 0:
                clean[m] = c
        self.ring = ring
        self.terms = clean
        self._hash = None

    @classmethod
    def _make(cls, ring: PolyRing, terms: dict) -> "Polynomial":
        obj = cls.__new__(cls)
        obj.ring = ring
        obj.terms = terms
        obj._hash = None
        return obj

    # -- basic queries ------------------------------------------------------

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __len__(self):
        return len(self.terms)

    def items(self) -> Iterator[tuple[Monomial, object]]:
        return iter(self.terms.items())

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(m) for m in self.terms), default=-1)

    def homogeneous_degree(self) -> int | None:
        """Common total degree of all terms, or None if inhomogeneous or zero."""
        degs = {sum(m) for m in self.terms}
        return degs.pop() if len(degs) == 1 else None

    def is_homogeneous(self) -> bool:
        return self.is_zero() or self.homogeneous_degree() is not None

    def is_constant(self) -> bool:
        return all(not any(m) for m in self.terms)

    def constant_term(self):
        return self.terms.get((0,) * self.ring.nvars, self.ring.field(0))

    def coefficient(self, exps: Sequence[int]):
        return self.terms.get(tuple(exps), self.ring.field(0))

    def variables(self) -> set[int]:
        return {i for m in self.terms for i, e in enumerate(m) if e}

    def leading_monomial(self, order: TermOrder = GREVLEX) -> Monomial:
        return order.leading(self.terms, self.ring.nvars)

    def leading_coefficient(self, order: TermOrder = GREVLEX):
        return self.terms[self.leading_monomial(order)]

    def monic(self, order: TermOrder = GREVLEX) -> "Polynomial":
        if not self.terms:
            return self
        return self.scale(self.ring.field.inv(self.leading_coefficient(order)))

    # -- arithmetic ---------------------------------------------------------

    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            if other.ring != self.ring:
                raise InputError(f"ring mismatch: {self.ring.names}/{self.ring.field.describe()} vs "
                                 f"{other.ring.names}/{other.ring.field.describe()}")
            return other
        if isinstance(other, (int, Fraction)):
            return self.ring.constant(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        mod = self.ring.field.modulus
        out = dict(self.terms)
        for m, c in other.terms.items():
            v = out.get(m, 0) + c
            if mod:
                v %= mod
            if v:
                out[m] = v
            else:
                out.pop(m, None)
        return Polynomial._make(self.ring, out)

    __radd__ = __add__

    def __neg__(self):
        mod = self.ring.field.modulus
        if mod:
            return Polynomial._make(self.ring, {m: (-c) % mod for m, c in self.terms.items()})
        return Polynomial._make(self.ring, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        mod = self.ring.field.modulus
        out: dict = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = tuple(a + b for a, b in zip(m1, m2))
                out[m] = out.get(m, 0) + c1 * c2
        if mod:
            out = {m: c % mod for m, c in out.items()}
        return Polynomial._make(self.ring, {m: c for m, c in out.items() if c})

    __rmul__ = __mul__

    def scale(self, c) -> "Polynomial":
        c = self.ring.field(c)
        if c == 0:
            return self.ring.zero()
        mod = self.ring.field.modulus
        if mod:
            return Polynomial._make(self.ring, {m: v * c % mod for m, v in self.terms.items()})
        return Polynomial._make(self.ring, {m: v * c for m, v in self.terms.items()})

    def mul_monomial(self, mono: Monomial, c=1) -> "Polynomial":
        c = self.ring.field(c)
        mod = self.ring.field.modulus
        out = {}
        for m, v in self.terms.items():
            w = v * c
            if mod:
                w %= mod
            if w:
                out[tuple(a + b for a, b in zip(m, mono))] = w
        return Polynomial._make(self.ring, out)

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("exponent must be a non-negative integer")
        result, base = self.ring.one(), self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __truediv__(self, other):
        if isinstance(other, Polynomial):
            if other.is_constant() and other:
                other = other.constant_term()
            else:
                return self.exact_div(other)
        return self.scale(self.ring.field.inv(self.ring.field(other)))

    def divmod(self, divisor: "Polynomial", order: TermOrder = GREVLEX) -> tuple["Polynomial", "Polynomial"]:
        """Multivariate division by a single polynomial."""
        divisor = self._coerce(divisor)
        if not divisor:
            raise ZeroDivisionError("division by the zero polynomial")
        field = self.ring.field
        lm = divisor.leading_monomial(order)
        lc_inv = field.inv(divisor.terms[lm])
        key = order.key(self.ring.nvars)
        q: dict = {}
        rem: dict = {}
        p = self
        while p:
            m = min(p.terms, key=key)
            c = p.terms[m]
            if all(a >= b for a, b in zip(m, lm)):
                t = tuple(a - b for a, b in zip(m, lm))
                f = field(c * lc_inv)
                q[t] = f
                p = p - divisor.mul_monomial(t, f)
            else:
                rem[m] = c
                p = p - Polynomial._make(self.ring, {m: c})
        return Polynomial._make(self.ring, q), Polynomial._make(self.ring, rem)

    def exact_div(self, divisor: "Polynomial") -> "Polynomial":
        q, r = self.divmod(divisor)
        if r:
            raise ArithmeticError("polynomial division is not exact")
        return q

    # -- calculus and substitution -----------------------------------------

    def derivative(self, i: int) -> "Polynomial":
        n = self.ring.nvars
        if not 0 <= i < n:
            raise InputError(f"variable index {i} out of range for {n} variables")
        mod = self.ring.field.modulus
        out = {}
        for m, c in self.terms.items():
            e = m[i]
            if e:
                v = c * e
                if mod:
                    v %= mod
                if v:
                    out[m[:i] + (e - 1,) + m[i + 1:]] = v
        return Polynomial._make(self.ring, out)

    def compose(self, images: Sequence["Polynomial"]) -> "Polynomial":
        """Substitute ``x_i -> images[i]``; images share one target ring."""
        if len(images) != self.ring.nvars:
            raise InputError(f"need {self.ring.nvars} images, got {len(images)}")
        if not images:
            raise InputError("cannot compose a polynomial in zero variables")
        target = images[0].ring
        if any(g.ring != target for g in images):
            raise InputError("images must live in one ring")
        powers: list[list[Polynomial]] = [[target.one()] for _ in images]

        def power(i, e):
            pw = powers[i]
            while len(pw) <= e:
                pw.append(pw[-1] * images[i])
            return pw[e]

        result: dict = {}
        mod = target.field.modulus
        for m, c in self.terms.items():
            term = target.constant(c) if target.field == self.ring.field else target.constant(Fraction(c))
            for i, e in enumerate(m):
                if e:
                    term = term * power(i, e)
            for mm, cc in term.terms.items():
                result[mm] = result.get(mm, 0) + cc
        if mod:
            result = {m: c % mod for m, c in result.items()}
        return Polynomial._make(target, {m: c for m, c in result.items() if c})

    def linear_substitute(self, matrix: Sequence[Sequence], target: PolyRing | None = None) -> "Polynomial":
        """Substitute ``x_i -> sum_j matrix[i][j] * y_j``."""
        if len(matrix) != self.ring.nvars:
            raise InputError(f"matrix has {len(matrix)} rows, expected {self.ring.nvars}")
        ncols = len(matrix[0]) if matrix else 0
        if any(len(row) != ncols for row in matrix):
            raise InputError("ragged substitution matrix")
        target = target or PolyRing.standard(ncols, self.ring.field, prefix="y")
        if target.nvars != ncols:
            raise InputError("target ring does not match matrix columns")
        ys = target.gens()
        images = [sum((y.scale(a) for y, a in zip(ys, row) if a), target.zero()) for row in matrix]
        return self.compose(images)

    def evaluate(self, point: Sequence):
        field = self.ring.field
        pt = [field(v) for v in point]
        mod = field.modulus
        total = 0
        for m, c in self.terms.items():
            v = c
            for x, e in zip(pt, m):
                if e:
                    v = v * x ** e
            total += v
        return total % mod if mod else Fraction(total)

    def specialize(self, i: int, value) -> "Polynomial":
        """Set ``x_i = value`` and drop the variable from the ring."""
        names = self.ring.names[:i] + self.ring.names[i + 1:]
        target = PolyRing(names, self.ring.field)
        images = list(target.gens())
        images.insert(i, target.constant(value))
        return self.compose(images)

    def change_ring(self, ring: PolyRing, positions: Sequence[int] | None = None) -> "Polynomial":
        """Re-embed into ``ring``; variable ``i`` goes to ``positions[i]``."""
        if positions is None:
            positions = [ring.index(nm) for nm in self.ring.names]
        out = {}
        for m, c in self.terms.items():
            e = [0] * ring.nvars
            for i, a in enumerate(m):
                if a:
                    e[positions[i]] = a
            out[tuple(e)] = ring.field(c) if ring.field != self.ring.field else c
        return Polynomial(ring, out) if ring.field != self.ring.field else Polynomial._make(ring, out)

    # -- comparison and printing -------------------------------------------

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.ring.constant(other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.ring == other.ring and self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.ring, frozenset(self.terms.items())))
        return self._hash

    def sorted_terms(self, order: TermOrder = GREVLEX) -> list[tuple[Monomial, object]]:
        key = order.key(self.ring.nvars)
        return sorted(self.terms.items(), key=lambda t: key(t[0]))

    def __str__(self):
        if not self.terms:
            return "0"
        fmt = self.ring.field.format
        names = self.ring.names
        parts = []
        for m, c in self.sorted_terms():
            s = fmt(c)
            neg = s.startswith("-")
            if neg:
                s = s[1:]
            mono = "*".join(names[i] + (f"^{e}" if e > 1 else "") for i, e in enumerate(m) if e)
            if mono:
                body = mono if s == "1" else f"{s}*{mono}"
            else:
                body = s
            if not parts:
                parts.append(("-" if neg else "") + body)
            else:
                parts.append((" - " if neg else " + ") + body)
        return "".join(parts)

    def __repr__(self):
        return f"Polynomial({str(self)!r})"


# --------------------------------------------------------------------------
# parser
# --------------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\*\*|[-+*/^()]))")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            bad = pos + len(text[pos:]) - len(text[pos:].lstrip())
            raise ParseError(f"unexpected character {text[bad]!r}", bad)
        start = m.start(m.lastindex)
        if m.group(1):
            tokens.append(("num", m.group(1), start))
        elif m.group(2):
            tokens.append(("name", m.group(2), start))
        else:
            op = m.group(3)
            tokens.append(("op", "^" if op == "**" else op, start))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, ring: PolyRing):
        self.ring = ring
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value):
        kind, val, pos = self.take()
        if val != value or kind == "end":
            raise ParseError(f"expected {value!r}, found {val or 'end of input'!r}", pos)

    def parse(self) -> Polynomial:
        result = self.expr()
        kind, val, pos = self.peek()
        if kind != "end":
            msg = "implicit multiplication is not allowed" if kind in ("num", "name") or val == "(" \
                else f"unexpected {val!r}"
            raise ParseError(msg, pos)
        return result

    def expr(self) -> Polynomial:
        left = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            right = self.term()
            left = left + right if op == "+" else left - right
        return left

    def term(self) -> Polynomial:
        left = self.unary()
        while self.peek()[0] == "op" and self.peek()[1] in ("*", "/"):
            _, op, pos = self.take()
            right = self.unary()
            if op == "*":
                left = left * right
            else:
                if not right.is_constant() or not right:
                    raise ParseError("division only by a nonzero constant", pos)
                left = left.scale(self.ring.field.inv(right.constant_term()))
        return left

    def unary(self) -> Polynomial:
        kind, val, _ = self.peek()
        if kind == "op" and val in ("-", "+"):
            self.take()
            inner = self.unary()
            return -inner if val == "-" else inner
        return self.power()

    def power(self) -> Polynomial:
        base = self.atom()
        if self.peek()[0] == "op" and self.peek()[1] == "^":
            self.take()
            kind, val, pos = self.take()
            if kind != "num":
                raise ParseError("exponent must be a non-negative integer literal", pos)
            base = base ** int(val)
        return base

    def atom(self) -> Polynomial:
        kind, val, pos = self.take()
        if kind == "num":
            try:
                return self.ring.constant(int(val))
            except ZeroDivisionError:
                raise ParseError("constant vanishes in this field", pos) from None
        if kind == "name":
            if val not in self.ring.names:
                raise ParseError(f"unknown variable {val!r}", pos)
            return self.ring.gen(val)
        if val == "(":
            inner = self.expr()
            self.expect(")")
            return inner
        raise ParseError(f"unexpected {val or 'end of input'!r}", pos)


def parse_poly(text: str, ring: PolyRing) -> Polynomial:
    """Parse ``text`` into a polynomial of ``ring``.

    Grammar: integer literals, variable names, ``+ - * / ^`` and parentheses;
    ``/`` divides by a constant only, ``**`` is accepted for ``^``.

    >>> R = PolyRing.standard(3)
    >>> str(parse_poly("3*x0^2*x1 - x2", R))
    '3*x0^2*x1 - x2'
    """
    if not isinstance(text, str):
        raise ParseError("polynomial must be given as a string", 0)
    return _Parser(text, ring).parse()

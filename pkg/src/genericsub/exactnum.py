"""Exact scalars: the field F = Q or Q(a), the ring R = Z or Z_S, and Frac(R) = Q.

Elements of Q(a) are coordinate vectors in the power basis 1, a, ..., a^(d-1)
reduced modulo the minimal polynomial.  In ordered mode the sign of an
element is decided exactly by isolating the chosen real root of the minimal
polynomial with rational bisection and evaluating with interval arithmetic.
"""

from __future__ import annotations

import re
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from functools import total_ordering
from math import gcd, isqrt
from typing import Iterable, Optional, Sequence, Union

from .errors import DivisionByZero, FieldSpecError, NotIndependentBasis, RingSpecError
from .intlinalg import rref, solve_rational

Rational = Union[int, Fraction]

# ---------------------------------------------------------------- polynomials
# Polynomials are lists of Fractions, lowest degree first, no trailing zeros.


def _trim(p: list) -> list:
    while p and p[-1] == 0:
        p.pop()
    return p


def _pmul(a: Sequence, b: Sequence) -> list:
    if not a or not b:
        return []
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x == 0:
            continue
        for j, y in enumerate(b):
            out[i + j] += x * y
    return _trim(out)


def _psub(a: Sequence, b: Sequence) -> list:
    n = max(len(a), len(b))
    return _trim([(a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0) for i in range(n)])


def _pdivmod(a: Sequence, b: Sequence) -> tuple[list, list]:
    a = [Fraction(x) for x in a]
    b = _trim([Fraction(x) for x in b])
    if not b:
        raise DivisionByZero("polynomial division by zero")
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 0)
    r = list(a)
    lead = b[-1]
    while len(_trim(r)) >= len(b):
        shift = len(r) - len(b)
        f = r[-1] / lead
        q[shift] = f
        for i, y in enumerate(b):
            r[i + shift] -= f * y
        _trim(r)
    return _trim(q), _trim(r)


def _peval(p: Sequence, x: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in reversed(p):
        acc = acc * x + c
    return acc


def _pderiv(p: Sequence) -> list:
    return _trim([i * p[i] for i in range(1, len(p))])


def _divisors(n: int) -> list[int]:
    n = abs(n)
    small = [d for d in range(1, isqrt(n) + 1) if n % d == 0]
    return sorted(set(small + [n // d for d in small]))


def _has_rational_root(p: Sequence[int]) -> bool:
    # monic integer polynomial: rational roots are integer divisors of p(0)
    if p[0] == 0:
        return True
    for d in _divisors(p[0]):
        for r in (d, -d):
            if _peval([Fraction(c) for c in p], Fraction(r)) == 0:
                return True
    return False


def _has_quadratic_factor(p: Sequence[int]) -> bool:
    # monic quartic x^4 + a3 x^3 + a2 x^2 + a1 x + a0 = (x^2+ax+b)(x^2+cx+d)
    a0, a1, a2, a3 = p[0], p[1], p[2], p[3]
    for b in _divisors(a0):
        for bb in (b, -b):
            d, rem = divmod(a0, bb)
            if rem:
                continue
            # a + c = a3, a c + b + d = a2  =>  a^2 - a3 a + (a2 - b - d) = 0
            disc = a3 * a3 - 4 * (a2 - bb - d)
            if disc < 0:
                continue
            s = isqrt(disc)
            if s * s != disc:
                continue
            for num in (a3 + s, a3 - s):
                if num % 2:
                    continue
                a = num // 2
                c = a3 - a
                if a * d + bb * c == a1:
                    return True
    return False


def _sturm(p: Sequence[Fraction]) -> list[list]:
    seq = [list(p), _pderiv(p)]
    while seq[-1] and len(seq[-1]) > 1:
        _, r = _pdivmod(seq[-2], seq[-1])
        if not r:
            break
        seq.append([-x for x in r])
    return seq


def _sign_changes(seq: list[list], x: Fraction) -> int:
    signs = []
    for q in seq:
        v = _peval(q, x)
        if v != 0:
            signs.append(v > 0)
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def _isolate_real_roots(p: Sequence[int]) -> list[tuple[Fraction, Fraction]]:
    """Disjoint intervals (lo, hi], each holding exactly one real root, increasing."""
    pf = [Fraction(c) for c in p]
    seq = _sturm(pf)
    bound = 1 + max(abs(Fraction(c)) for c in p[:-1])
    out = []
    stack = [(-bound, bound)]
    while stack:
        lo, hi = stack.pop()
        n = _sign_changes(seq, lo) - _sign_changes(seq, hi)
        if n == 0:
            continue
        if n == 1:
            out.append((lo, hi))
            continue
        mid = (lo + hi) / 2
        stack.append((lo, mid))
        stack.append((mid, hi))
    return sorted(out)


# ---------------------------------------------------------------- specs


@dataclass(frozen=True)
class FieldSpec:
    """F = Q (minpoly empty) or Q(a) for a monic irreducible integer minpoly.

    `minpoly` lists coefficients from the constant term upwards.  When
    `ordered` is set, F is ordered through the real root of index
    `root_index` (roots sorted increasingly).
    """

    minpoly: tuple[int, ...] = ()
    ordered: bool = False
    root_index: int = 0

    def __post_init__(self):
        mp = tuple(int(c) for c in self.minpoly)
        object.__setattr__(self, "minpoly", mp)
        if not mp:
            return
        deg = len(mp) - 1
        if mp[-1] != 1:
            raise FieldSpecError("minimal polynomial must be monic")
        if deg < 2:
            raise FieldSpecError("minimal polynomial must have degree at least 2 (use Q for degree 1)")
        if deg > 4:
            raise FieldSpecError("minimal polynomials of degree above 4 are not supported")
        if _has_rational_root(mp) or (deg == 4 and _has_quadratic_factor(mp)):
            raise FieldSpecError(f"minimal polynomial {poly_text(mp)} is reducible over Q")
        if self.ordered:
            roots = _isolate_real_roots(mp)
            if not roots:
                raise FieldSpecError("ordered mode needs a real root of the minimal polynomial")
            if not 0 <= self.root_index < len(roots):
                raise FieldSpecError(f"root index {self.root_index} out of range: {len(roots)} real roots")

    @classmethod
    def rationals(cls, ordered: bool = False) -> "FieldSpec":
        return cls((), ordered, 0)

    @classmethod
    def number_field(cls, minpoly: Sequence[int], ordered: bool = False, root_index: int = 0) -> "FieldSpec":
        return cls(tuple(minpoly), ordered, root_index)

    @property
    def kind(self) -> str:
        return "NumberField" if self.minpoly else "Rationals"

    @property
    def degree(self) -> int:
        return len(self.minpoly) - 1 if self.minpoly else 1

    def describe(self) -> str:
        if not self.minpoly:
            return "Q"
        return f"Q({poly_text(self.minpoly)})"

    def zero(self) -> "FieldElem":
        return FieldElem(self, (Fraction(0),) * self.degree)

    def one(self) -> "FieldElem":
        return self.const(1)

    def const(self, q: Rational) -> "FieldElem":
        return FieldElem(self, (Fraction(q),) + (Fraction(0),) * (self.degree - 1))

    def gen(self) -> "FieldElem":
        if self.degree == 1:
            raise FieldSpecError("Q has no field generator")
        return FieldElem(self, (Fraction(0), Fraction(1)) + (Fraction(0),) * (self.degree - 2))

    def elem(self, coords: Sequence[Rational]) -> "FieldElem":
        coords = [Fraction(c) for c in coords]
        if len(coords) > self.degree:
            return self.from_poly(coords)
        coords += [Fraction(0)] * (self.degree - len(coords))
        return FieldElem(self, tuple(coords))

    def from_poly(self, p: Sequence[Rational]) -> "FieldElem":
        p = _trim([Fraction(c) for c in p])
        if self.minpoly:
            _, p = _pdivmod(p, [Fraction(c) for c in self.minpoly])
        coords = list(p) + [Fraction(0)] * (self.degree - len(p))
        return FieldElem(self, tuple(coords))

    def parse(self, text: str) -> "FieldElem":
        return parse_scalar(text, self)

    # ---- ordered-mode support
    def _root_interval(self) -> tuple[Fraction, Fraction]:
        key = (self.minpoly, self.root_index)
        with _ROOT_LOCK:
            iv = _ROOT_CACHE.get(key)
            if iv is None:
                iv = _isolate_real_roots(self.minpoly)[self.root_index]
                _ROOT_CACHE[key] = iv
        return iv

    def refine_root(self, width: Fraction) -> tuple[Fraction, Fraction]:
        """An interval of at most `width` containing the designated real root."""
        lo, hi = self._root_interval()
        if hi - lo <= width:
            return lo, hi
        p = [Fraction(c) for c in self.minpoly]
        s_hi = _peval(p, hi) > 0
        while hi - lo > width:
            mid = (lo + hi) / 2
            v = _peval(p, mid)
            if (v > 0) == s_hi:
                hi = mid
            else:
                lo = mid
        with _ROOT_LOCK:
            old = _ROOT_CACHE[(self.minpoly, self.root_index)]
            if hi - lo < old[1] - old[0]:
                _ROOT_CACHE[(self.minpoly, self.root_index)] = (lo, hi)
        return lo, hi


_ROOT_CACHE: dict = {}
_ROOT_LOCK = threading.Lock()


@dataclass(frozen=True)
class RingSpec:
    """R = Z, or R = {m/n : every prime factor of n lies in inverted_primes}."""

    inverted_primes: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        ps = frozenset(int(p) for p in self.inverted_primes)
        for p in ps:
            if p < 2 or any(p % d == 0 for d in range(2, isqrt(p) + 1)):
                raise RingSpecError(f"{p} is not a prime")
        object.__setattr__(self, "inverted_primes", ps)

    @classmethod
    def integers(cls) -> "RingSpec":
        return cls(frozenset())

    @classmethod
    def localization(cls, primes: Iterable[int]) -> "RingSpec":
        return cls(frozenset(primes))

    @property
    def kind(self) -> str:
        return "Localization" if self.inverted_primes else "Integers"

    def describe(self) -> str:
        if not self.inverted_primes:
            return "Z"
        return "Z[" + ",".join(f"1/{p}" for p in sorted(self.inverted_primes)) + "]"

    def strip(self, n: int) -> int:
        """n with every inverted prime removed (the non-unit part, up to sign)."""
        n = abs(int(n))
        if n == 0:
            return 0
        for p in self.inverted_primes:
            while n % p == 0:
                n //= p
        return n

    def contains(self, q: Rational) -> bool:
        q = Fraction(q)
        return self.strip(q.denominator) == 1

    def is_unit(self, q: Rational) -> bool:
        q = Fraction(q)
        return q != 0 and self.strip(q.numerator) == 1 and self.strip(q.denominator) == 1

    def normalize(self, q: Rational) -> int:
        """Canonical nonnegative integer generating the ideal qR."""
        q = Fraction(q)
        return self.strip(q.numerator)

    def divides(self, d: Rational, x: Rational) -> bool:
        d, x = Fraction(d), Fraction(x)
        if d == 0:
            return x == 0
        return self.contains(x / d)


# ---------------------------------------------------------------- elements


@total_ordering
@dataclass(frozen=True)
class FieldElem:
    """An element of F in power-basis coordinates."""

    spec: FieldSpec
    coords: tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.coords) != self.spec.degree:
            raise FieldSpecError("coordinate vector length differs from field degree")

    # arithmetic
    def __add__(self, other):
        other = _coerce(self.spec, other)
        if other is NotImplemented:
            return other
        return FieldElem(self.spec, tuple(a + b for a, b in zip(self.coords, other.coords)))

    __radd__ = __add__

    def __neg__(self):
        return FieldElem(self.spec, tuple(-a for a in self.coords))

    def __sub__(self, other):
        other = _coerce(self.spec, other)
        if other is NotImplemented:
            return other
        return FieldElem(self.spec, tuple(a - b for a, b in zip(self.coords, other.coords)))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = _coerce(self.spec, other)
        if other is NotImplemented:
            return other
        if self.spec.degree == 1:
            return FieldElem(self.spec, (self.coords[0] * other.coords[0],))
        return self.spec.from_poly(_pmul(self.coords, other.coords))

    __rmul__ = __mul__

    def inverse(self) -> "FieldElem":
        if self.is_zero():
            raise DivisionByZero("inverse of zero")
        if self.spec.degree == 1:
            return FieldElem(self.spec, (1 / self.coords[0],))
        # extended Euclid in Q[x]: s*self + t*minpoly = 1
        m = [Fraction(c) for c in self.spec.minpoly]
        r0, r1 = m, _trim(list(self.coords))
        s0, s1 = [], [Fraction(1)]
        while len(r1) > 1:
            q, r = _pdivmod(r0, r1)
            r0, r1 = r1, r
            s0, s1 = s1, _psub(s0, _pmul(q, s1))
        c = r1[0]
        return self.spec.from_poly([x / c for x in s1])

    def __truediv__(self, other):
        other = _coerce(self.spec, other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        return _coerce(self.spec, other) * self.inverse()

    # predicates
    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coords)

    def __bool__(self) -> bool:
        return not self.is_zero()

    def is_rational(self) -> bool:
        return all(c == 0 for c in self.coords[1:])

    def rational(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self} is not rational")
        return self.coords[0]

    def __eq__(self, other):
        if isinstance(other, FieldElem):
            return self.spec.minpoly == other.spec.minpoly and self.coords == other.coords
        if isinstance(other, (int, Fraction)):
            return self.is_rational() and self.coords[0] == other
        return NotImplemented

    def __hash__(self):
        if self.is_rational():
            return hash(self.coords[0])
        return hash((self.spec.minpoly, self.coords))

    def __lt__(self, other):
        # a total order for sorting (lexicographic on coordinates), not the field order
        other = _coerce(self.spec, other)
        return self.coords < other.coords

    # order
    def sign(self) -> int:
        """Sign under the designated real embedding (exact)."""
        if self.is_zero():
            return 0
        if self.spec.degree == 1 or self.is_rational():
            return 1 if self.coords[0] > 0 else -1
        width = Fraction(1, 2**8)
        while True:
            lo, hi = self.interval(width)
            if lo > 0:
                return 1
            if hi < 0:
                return -1
            width /= 2**8

    def interval(self, width: Fraction) -> tuple[Fraction, Fraction]:
        """Rational interval containing the real value (root interval of given width)."""
        if self.spec.degree == 1:
            return self.coords[0], self.coords[0]
        lo, hi = self.spec.refine_root(width)
        acc = (Fraction(0), Fraction(0))
        for c in reversed(self.coords):
            prods = [acc[0] * lo, acc[0] * hi, acc[1] * lo, acc[1] * hi]
            acc = (min(prods) + c, max(prods) + c)
        return acc

    def approx(self, bits: int = 64) -> Fraction:
        lo, hi = self.interval(Fraction(1, 2**bits))
        return (lo + hi) / 2

    def __float__(self) -> float:
        return float(self.approx())

    # text
    def __str__(self) -> str:
        return scalar_text(self)

    def __repr__(self) -> str:
        return f"FieldElem({scalar_text(self)})"


def _coerce(spec: FieldSpec, x):
    if isinstance(x, FieldElem):
        if x.spec.minpoly != spec.minpoly:
            raise FieldSpecError("mixing elements of different fields")
        return x
    if isinstance(x, (int, Fraction)):
        return spec.const(x)
    return NotImplemented


# ---------------------------------------------------------------- operations


def field_arith(op: str, a: FieldElem, b: Optional[FieldElem] = None) -> FieldElem:
    """add | sub | mul | inv | neg."""
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "neg":
        return -a
    if op == "inv":
        return a.inverse()
    raise ValueError(f"unknown field operation {op!r}")


def in_fraction_field(a: FieldElem) -> bool:
    """Is a in Frac(R) = Q (all coordinates beyond the first vanish)?"""
    return a.is_rational()


def in_ring(a: FieldElem, ring: RingSpec) -> bool:
    return a.is_rational() and ring.contains(a.coords[0])


@dataclass(frozen=True)
class IndependenceCertificate:
    """Outcome of a greedy left-to-right basis extraction.

    Independent: `basis` lists every index.  Dependent: `dependent_index`
    is the first element lying in the Q-span of the earlier basis elements,
    with lams[dependent_index] = sum(coefficients[j] * lams[basis[j]]).
    """

    independent: bool
    basis: tuple[int, ...]
    dependent_index: Optional[int] = None
    coefficients: Optional[tuple[Fraction, ...]] = None

    def describe(self, names: Sequence[str] = ()) -> str:
        if self.independent:
            return "independent, basis {" + ",".join(map(str, self.basis)) + "}"
        terms = " + ".join(f"{c}*lam{j}" for j, c in zip(self.basis, self.coefficients or ()))
        return f"lam{self.dependent_index} = {terms or '0'}"


def rhat_independent(lams: Sequence[FieldElem]) -> tuple[bool, IndependenceCertificate]:
    if not lams:
        raise ValueError("rhat_independent needs a nonempty tuple")
    basis: list[int] = []
    for i, lam in enumerate(lams):
        if basis:
            M = [[lams[j].coords[k] for j in basis] for k in range(lam.spec.degree)]
            q = solve_rational(M, list(lam.coords))
        else:
            q = [] if lam.is_zero() else None
        if q is not None:
            cert = IndependenceCertificate(False, tuple(basis), i, tuple(q))
            return False, cert
        basis.append(i)
    return True, IndependenceCertificate(True, tuple(basis))


def greedy_basis(lams: Sequence[FieldElem]) -> list[int]:
    """Indices of the greedy maximal Q-independent subsequence."""
    basis: list[int] = []
    rows: list[list[Fraction]] = []
    for i, lam in enumerate(lams):
        cand = rows + [list(lam.coords)]
        if len(rref(cand)[1]) > len(rows):
            rows = cand
            basis.append(i)
    return basis


def is_independent(lams: Sequence[FieldElem]) -> bool:
    return bool(lams) and len(greedy_basis(lams)) == len(lams)


def rhat_coordinates(target: FieldElem, basis: Sequence[FieldElem]) -> Optional[list[Fraction]]:
    """The q with target = sum q_j basis_j, q in Q, or None outside the span."""
    if basis and not is_independent(basis):
        raise NotIndependentBasis("basis is dependent over Frac(R)")
    if not basis:
        return [] if target.is_zero() else None
    M = [[b.coords[k] for b in basis] for k in range(target.spec.degree)]
    return solve_rational(M, list(target.coords))


# ---------------------------------------------------------------- text


def poly_text(p: Sequence[Rational], var: str = "a") -> str:
    """Human form of a polynomial given lowest degree first."""
    parts = []
    for i in range(len(p) - 1, -1, -1):
        c = Fraction(p[i])
        if c == 0:
            continue
        mag = abs(c)
        if i == 0:
            body = _frac_text(mag)
        else:
            mono = var if i == 1 else f"{var}^{i}"
            body = mono if mag == 1 else f"{_frac_text(mag)}*{mono}"
        if not parts:
            parts.append(("-" if c < 0 else "") + body)
        else:
            parts.append((" - " if c < 0 else " + ") + body)
    return "".join(parts) if parts else "0"


def _frac_text(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def scalar_text(x: FieldElem) -> str:
    return poly_text(list(x.coords))


def is_simple_scalar(x: FieldElem) -> bool:
    """True when the printed form needs no parentheses before '*'."""
    if x.is_rational():
        return True
    nz = [i for i, c in enumerate(x.coords) if c != 0]
    return len(nz) == 1 and x.coords[nz[0]] == 1 and nz[0] == 1


_SCALAR_TOKEN = re.compile(r"\s*(?:(\d+)|(a)|([-+*/^()]))")


def parse_scalar(text: str, spec: FieldSpec) -> FieldElem:
    """Parse a scalar literal such as '3/4', 'a', '1 + 2*a - a^2'."""
    toks = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _SCALAR_TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise FieldSpecError(f"bad scalar literal {text!r} at {pos}")
        toks.append(m.group(1) or m.group(2) or m.group(3))
        pos = m.end()
    it = _ScalarParser(toks, spec)
    v = it.expr()
    if it.i != len(toks):
        raise FieldSpecError(f"trailing input in scalar literal {text!r}")
    return v


class _ScalarParser:
    def __init__(self, toks, spec):
        self.toks, self.spec, self.i = toks, spec, 0

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else None

    def take(self):
        t = self.peek()
        self.i += 1
        return t

    def expr(self):
        v = self.term()
        while self.peek() in ("+", "-"):
            op = self.take()
            w = self.term()
            v = v + w if op == "+" else v - w
        return v

    def term(self):
        v = self.unary()
        while self.peek() in ("*", "/"):
            op = self.take()
            w = self.unary()
            v = v * w if op == "*" else v / w
        return v

    def unary(self):
        if self.peek() == "-":
            self.take()
            return -self.unary()
        if self.peek() == "+":
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        t = self.take()
        if t is None:
            raise FieldSpecError("unexpected end of scalar literal")
        if t == "(":
            v = self.expr()
            if self.take() != ")":
                raise FieldSpecError("missing ')' in scalar literal")
        elif t == "a":
            v = self.spec.gen()
        elif t.isdigit():
            v = self.spec.const(int(t))
        else:
            raise FieldSpecError(f"unexpected {t!r} in scalar literal")
        if self.peek() == "^":
            self.take()
            e = self.take()
            if e is None or not e.isdigit():
                raise FieldSpecError("exponent must be a nonnegative integer")
            r = self.spec.one()
            for _ in range(int(e)):
                r = r * v
            v = r
        return v


def parse_field_spec(text: str, ordered: bool = False, root_index: int = 0) -> FieldSpec:
    """'Q' or 'Q(<monic polynomial in a>)'."""
    t = text.strip().replace(" ", "")
    if t in ("Q", "QQ"):
        return FieldSpec.rationals(ordered)
    m = re.fullmatch(r"Q\((.*)\)", t)
    if not m:
        raise FieldSpecError(f"unrecognised field {text!r}; use Q or Q(<polynomial in a>)")
    poly = _parse_poly_int(m.group(1))
    return FieldSpec.number_field(poly, ordered, root_index)


def _parse_poly_int(text: str) -> list[int]:
    # reuse the scalar parser over a large formal field: evaluate at a symbolic level
    toks = re.findall(r"\d+|a|[-+*^()/]", text)
    if "".join(toks) != text:
        raise FieldSpecError(f"bad polynomial {text!r}")
    coeffs: dict[int, Fraction] = {}
    # split into signed monomials
    for sign, mono in re.findall(r"([+-]?)([^+-]+)", text):
        s = -1 if sign == "-" else 1
        m = re.fullmatch(r"(?:(\d+)\*?)?(a)(?:\^(\d+))?|(\d+)", mono)
        if not m:
            raise FieldSpecError(f"bad monomial {mono!r}")
        if m.group(4) is not None:
            deg, c = 0, int(m.group(4))
        else:
            c = int(m.group(1)) if m.group(1) else 1
            deg = int(m.group(3)) if m.group(3) else 1
        coeffs[deg] = coeffs.get(deg, Fraction(0)) + s * c
    top = max(coeffs)
    out = [0] * (top + 1)
    for d, c in coeffs.items():
        if c.denominator != 1:
            raise FieldSpecError("minimal polynomial must have integer coefficients")
        out[d] = int(c)
    return out


def parse_ring_spec(text: str) -> RingSpec:
    """'Z' or 'Z[1/2,1/3]'."""
    t = text.strip().replace(" ", "")
    if t in ("Z", "ZZ"):
        return RingSpec.integers()
    m = re.fullmatch(r"Z\[((?:1/\d+,)*1/\d+)\]", t)
    if not m:
        raise RingSpecError(f"unrecognised ring {text!r}; use Z or Z[1/p,...]")
    primes = [int(x[2:]) for x in m.group(1).split(",")]
    return RingSpec.localization(primes)


def lcm(*xs: int) -> int:
    out = 1
    for x in xs:
        x = abs(int(x))
        if x:
            out = out * x // gcd(out, x)
    return out


def common_denominator(qs: Iterable[Fraction]) -> int:
    return lcm(*[Fraction(q).denominator for q in qs])

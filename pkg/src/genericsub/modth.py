"""pp-reasoning in the free R-module of infinite rank.

G is modelled as the free R-module on generator ids.  A pp-condition
exists y (A x + B y = c p) decouples across generator coordinates, so every
question reduces to integer (or localized) linear algebra per coordinate.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Hashable, Iterable, Mapping, Optional, Sequence, Union

from .errors import ArityMismatch, MultiVariable, NotClosed
from .exactnum import RingSpec, common_denominator, lcm
from .formulas import PPConstraint
from .intlinalg import integer_kernel, lattice_contains, localize_lattice, solve_over


class GVector:
    """Finite R-combination of generators: {generator id: coefficient}."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Union[Mapping, Iterable] = ()):
        items = coeffs.items() if isinstance(coeffs, Mapping) else coeffs
        acc: dict = {}
        for g, c in items:
            acc[g] = acc.get(g, Fraction(0)) + Fraction(c)
        self.coeffs = {g: c for g, c in sorted(acc.items(), key=lambda p: _gkey(p[0])) if c != 0}

    @classmethod
    def gen(cls, g: Hashable, c=1) -> "GVector":
        return cls({g: c})

    def __getitem__(self, g) -> Fraction:
        return self.coeffs.get(g, Fraction(0))

    def support(self) -> list:
        return list(self.coeffs)

    def __add__(self, other: "GVector") -> "GVector":
        return GVector(list(self.coeffs.items()) + list(other.coeffs.items()))

    def __sub__(self, other: "GVector") -> "GVector":
        return self + other.scale(-1)

    def __neg__(self) -> "GVector":
        return self.scale(-1)

    def scale(self, r) -> "GVector":
        r = Fraction(r)
        return GVector({g: r * c for g, c in self.coeffs.items()})

    def is_zero(self) -> bool:
        return not self.coeffs

    def in_ring(self, ring: RingSpec) -> bool:
        return all(ring.contains(c) for c in self.coeffs.values())

    def __eq__(self, other) -> bool:
        return isinstance(other, GVector) and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash(tuple(self.coeffs.items()))

    def __repr__(self) -> str:
        if not self.coeffs:
            return "GVector(0)"
        parts = [f"{c}*{g}" for g, c in self.coeffs.items()]
        return "GVector(" + " + ".join(parts) + ")"


def _gkey(g):
    return (0, g, "") if isinstance(g, int) else (1, 0, str(g))


def _support(vectors: Iterable[GVector]) -> list:
    seen: dict = {}
    for v in vectors:
        for g in v.coeffs:
            seen[g] = None
    return sorted(seen, key=_gkey)


# ---------------------------------------------------------------- evaluation


def _check_arity(pp: PPConstraint, args: Sequence) -> None:
    if len(args) != pp.arity:
        raise ArityMismatch(f"pp predicate expects {pp.arity} arguments, got {len(args)}")


def _rhs(pp: PPConstraint, args: Sequence[GVector], g) -> list[Fraction]:
    # c*p - A*x at coordinate g
    xs = [args[j][g] for j in range(pp.k)]
    p = args[pp.k][g] if pp.has_param else Fraction(0)
    return [pp.c[i] * p - sum(pp.A[i][j] * xs[j] for j in range(pp.k)) for i in range(pp.n)]


def eval_pp(pp: PPConstraint, args: Sequence[GVector], ring: Optional[RingSpec] = None) -> bool:
    """Does exists y in G^m with A*args + B*y = c*p hold for these elements of G?"""
    ring = ring or RingSpec.integers()
    _check_arity(pp, args)
    if not all(a.in_ring(ring) for a in args):
        return False
    for g in _support(args):
        b = _rhs(pp, args, g)
        if pp.m == 0:
            if any(b):
                return False
        elif solve_over([list(r) for r in pp.B], b, ring.contains) is None:
            return False
    return True


# ---------------------------------------------------------------- one-variable solution sets


def _int_residue(r: Fraction, d: int) -> int:
    """Image of r in R/dR = Z/dZ (d free of inverted primes)."""
    return (r.numerator * pow(r.denominator, -1, d)) % d if d > 1 else 0


@dataclass(frozen=True)
class Congruence:
    """{xi in R : xi = residue mod modulus*R}; modulus 0 means xi = residue exactly."""

    modulus: int
    residue: Fraction

    def contains(self, xi, ring: RingSpec) -> bool:
        xi = Fraction(xi)
        if self.modulus == 0:
            return xi == self.residue
        return ring.contains((xi - self.residue) / self.modulus)

    def canonical(self) -> "Congruence":
        if self.modulus == 0:
            return self
        return Congruence(self.modulus, Fraction(_int_residue(self.residue, self.modulus)))


def _meet(a: Congruence, b: Congruence, ring: RingSpec) -> Optional[Congruence]:
    if a.modulus == 0:
        return a if b.contains(a.residue, ring) else None
    if b.modulus == 0:
        return b if a.contains(b.residue, ring) else None
    m1, m2 = a.modulus, b.modulus
    r1, r2 = _int_residue(a.residue, m1), _int_residue(b.residue, m2)
    g = gcd(m1, m2)
    if (r2 - r1) % g:
        return None
    l = m1 // g * m2
    t = ((r2 - r1) // g * pow(m1 // g, -1, m2 // g)) % (m2 // g) if m2 // g > 1 else 0
    return Congruence(l, Fraction((r1 + m1 * t) % l))


@dataclass(frozen=True)
class PPSolutionSet:
    """Per-generator congruences for x; generators outside `residues` use default_residue 0."""

    modulus: int
    residues: tuple = ()
    free_directions: bool = True

    def residue(self, g) -> Fraction:
        for h, r in self.residues:
            if h == g:
                return r
        return Fraction(0)

    def contains(self, x: GVector, ring: RingSpec) -> bool:
        if not x.in_ring(ring):
            return False
        gens = set(x.support()) | {h for h, _ in self.residues}
        return all(Congruence(self.modulus, self.residue(g)).contains(x[g], ring) for g in gens)

    def basepoint(self) -> GVector:
        return GVector(dict(self.residues))

    @property
    def is_full(self) -> bool:
        return self.modulus == 1


def _ideal_generator(col: Sequence[int], B: Sequence[Sequence[int]], ring: RingSpec) -> int:
    # generator of {xi : exists y, col*xi + B y = 0}, normalized in R
    M = [[col[i]] + list(B[i]) for i in range(len(col))]
    ker = integer_kernel(M, cols=1 + (len(B[0]) if B and B[0] else 0))
    d = 0
    for v in ker:
        d = gcd(d, abs(v[0]))
    return ring.strip(d) if d else 0


def pp_solution_set(pp: PPConstraint, args: Sequence[Optional[GVector]], ring: Optional[RingSpec] = None) -> Optional[PPSolutionSet]:
    """Exact solution set in G of the single slot left as None; None when empty."""
    ring = ring or RingSpec.integers()
    _check_arity(pp, args)
    slots = [i for i, a in enumerate(args) if a is None]
    if len(slots) > 1:
        raise MultiVariable(f"{len(slots)} free slots; expected exactly one")
    if not slots:
        return PPSolutionSet(1) if eval_pp(pp, args, ring) else None
    j = slots[0]
    known = [a if a is not None else GVector() for a in args]
    if j < pp.k:
        col = [pp.A[i][j] for i in range(pp.n)]
    else:
        col = [-pp.c[i] for i in range(pp.n)]
    B = [list(r) for r in pp.B]
    d = _ideal_generator(col, B, ring)
    residues = []
    for g in _support([a for a in args if a is not None]):
        b = _rhs(pp, known, g)
        M = [[col[i]] + B[i] for i in range(pp.n)]
        sol = solve_over(M, b, ring.contains)
        if sol is None:
            return None
        r = Congruence(d, sol[0]).canonical().residue
        if r != 0:
            residues.append((g, r))
    return PPSolutionSet(d, tuple(residues), free_directions=d != 0)


# ---------------------------------------------------------------- satisfiability


@dataclass(frozen=True)
class Sat:
    witness: GVector


@dataclass(frozen=True)
class Unsat:
    reason: str = ""


PPInstance = tuple  # (PPConstraint, args with exactly one None)


def _combine(sets: Sequence[PPSolutionSet], ring: RingSpec) -> Optional[PPSolutionSet]:
    if not sets:
        return PPSolutionSet(1)
    gens = sorted({h for s in sets for h, _ in s.residues}, key=_gkey)
    modulus = None
    residues = []
    for g in gens + [None]:
        acc: Optional[Congruence] = Congruence(1, Fraction(0))
        for s in sets:
            r = s.residue(g) if g is not None else Fraction(0)
            acc = _meet(acc, Congruence(s.modulus, r), ring)
            if acc is None:
                return None
        if g is None:
            modulus = acc.modulus
        elif acc.residue != 0:
            residues.append((g, acc.residue))
    # re-reduce residues modulo the combined modulus
    out = []
    for g, r in residues:
        rr = Congruence(modulus, r).canonical().residue
        if rr:
            out.append((g, rr))
    return PPSolutionSet(modulus, tuple(out), modulus != 0)


def sat_constraints(
    pos: Sequence[PPInstance],
    neg: Sequence[PPInstance],
    params: Optional[Mapping] = None,
    ring: Optional[RingSpec] = None,
    fresh: Hashable = "h_fresh",
):
    """Sat(witness) or Unsat for x in G meeting every pos and no neg condition.

    The positive set is a coset S = xi0 + d0*G.  A negative coset of modulus
    d_k with d_k | d0 contains S or misses it; the others have infinite index
    in S and are escaped along a fresh generator: the witness xi0 + d0*h_fresh
    has coordinate d0 there, which is not in d_k*R.
    """
    ring = ring or RingSpec.integers()
    pos_sets = []
    for pp, args in pos:
        s = pp_solution_set(pp, args, ring)
        if s is None:
            return Unsat("a positive condition has no solution")
        pos_sets.append(s)
    S = _combine(pos_sets, ring)
    if S is None:
        return Unsat("positive congruences are incompatible")
    xi0 = S.basepoint()
    need_shift = False
    for pp, args in neg:
        N = pp_solution_set(pp, args, ring)
        if N is None:
            continue
        dk = N.modulus
        relevant = (S.modulus == 0) or (dk != 0 and S.modulus % dk == 0)
        if relevant:
            if N.contains(xi0, ring):
                return Unsat("the positive coset lies inside a negative coset")
        else:
            need_shift = True
    w = xi0
    if need_shift and S.modulus != 0:
        w = xi0 + GVector.gen(fresh, S.modulus)
    return Sat(w)


# ---------------------------------------------------------------- sentences


@dataclass(frozen=True)
class IndexStatement:
    """[psi1 : psi1 /\\ psi2] >= k for one-variable, parameter-free pp conditions."""

    psi1: PPConstraint
    psi2: PPConstraint
    k: int


def subgroup_pp(d: int) -> PPConstraint:
    """x in d*G."""
    if d == 0:
        return PPConstraint(((1,),), ((),), (0,), 1, 0)
    return PPConstraint(((1,),), ((-d,),), (0,), 1, 1)


def _pp_ideal(pp: PPConstraint, ring: RingSpec) -> int:
    if pp.k != 1 or pp.has_param:
        raise NotClosed("index statements need one-variable parameter-free pp conditions")
    col = [pp.A[i][0] for i in range(pp.n)]
    return _ideal_generator(col, [list(r) for r in pp.B], ring)


def decide_pp_sentence(s: Union[PPConstraint, IndexStatement], ring: Optional[RingSpec] = None) -> bool:
    """Truth in the free R-module of infinite rank.

    A closed pp sentence is homogeneous, so y = 0 witnesses it.  Indices of
    pp-definable subgroups are 1 when the coordinate ideals agree and
    infinite otherwise.
    """
    ring = ring or RingSpec.integers()
    if isinstance(s, PPConstraint):
        if s.k != 0 or s.has_param:
            raise NotClosed("pp sentence has free slots")
        return True
    d1 = _pp_ideal(s.psi1, ring)
    d2 = _pp_ideal(s.psi2, ring)
    d12 = ring.strip(lcm(d1, d2)) if d1 and d2 else 0
    if s.k <= 1:
        return True
    return d12 != d1


# ---------------------------------------------------------------- canonical types


def _tuple_matrix(tup: Sequence[GVector]) -> tuple[list[list[int]], list]:
    gens = _support(tup)
    rows = [[t[g] for t in tup] for g in gens]
    den = common_denominator(x for r in rows for x in r)
    return [[int(x * den) for x in r] for r in rows], gens


@dataclass(frozen=True)
class CanonicalPPType:
    """Complete pp-type invariant of a tuple: the R-row space of its coordinate matrix.

    `relations` and `divisibility` are derived data kept for explanations.
    """

    arity: int
    row_space: tuple
    relations: tuple = field(compare=False, default=())
    divisibility: tuple = field(compare=False, default=())


def canonical_pp_type(tup: Sequence[GVector], ring: Optional[RingSpec] = None, bound: int = 12) -> CanonicalPPType:
    ring = ring or RingSpec.integers()
    n = len(tup)
    rows, _ = _tuple_matrix(tup)
    row_space = tuple(localize_lattice(rows, n, ring.strip)) if rows else ()
    T = [list(r) for r in rows]
    if T:
        rel = integer_kernel(T, cols=n)
    else:
        rel = [[int(i == j) for i in range(n)] for j in range(n)]
    relations = tuple(localize_lattice(rel, n, ring.strip)) if rel else ()
    levels = []
    for s in range(2, max(bound, 2) + 1):
        if ring.strip(s) != s:
            continue
        if T:
            M = [r + [-s if i == j else 0 for j in range(len(T))] for i, r in enumerate(T)]
            ker = integer_kernel(M, cols=n + len(T))
            lat = [v[:n] for v in ker]
        else:
            lat = [[int(i == j) for i in range(n)] for j in range(n)]
        levels.append((s, tuple(localize_lattice(lat, n, ring.strip))))
    return CanonicalPPType(n, row_space, relations, tuple(levels))


def _separating(la: Sequence, lb: Sequence, n: int, ring: RingSpec):
    # a basis vector of one lattice that the other lattice misses
    for v in la:
        if not lattice_contains(lb, [v], n, ring.contains):
            return v
    for v in lb:
        if not lattice_contains(la, [v], n, ring.contains):
            return v
    return None


def describe_pp_difference(a: CanonicalPPType, b: CanonicalPPType, names: Sequence[str] = (),
                           ring: Optional[RingSpec] = None) -> str:
    """Name a pp-condition separating two canonical types, or '' when equal."""
    if a == b:
        return ""
    ring = ring or RingSpec.integers()
    n = a.arity
    names = list(names) or [f"x{i + 1}" for i in range(n)]

    def comb(r):
        parts = []
        for c, nm in zip(r, names):
            if c == 0:
                continue
            parts.append(nm if c == 1 else f"{c}*{nm}")
        return " + ".join(parts) or "0"

    v = _separating(a.relations, b.relations, n, ring)
    if v is not None:
        return f"{comb(v)} = 0"
    for (s, la), (_, lb) in zip(a.divisibility, b.divisibility):
        v = _separating(la, lb, n, ring)
        if v is not None:
            return f"{comb(v)} ∈ {s}G"
    return "row spaces differ: " + str([list(r) for r in a.row_space]) + " vs " + str([list(r) for r in b.row_space])

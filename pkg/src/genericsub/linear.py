"""Flat linear forms over variables and f-applications.

A `Lin` is a finite F-linear combination of atoms.  An atom is a variable
or an f_{lams,i}-application whose argument is itself a `Lin`.  Linear
forms are the working representation of terms inside elimination and
evaluation; `to_term` converts back for printing.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Optional, Sequence, Union

from .errors import UnsupportedBaseAtom
from .exactnum import FieldElem, FieldSpec, RingSpec, is_independent
from .formulas import ZERO, FApp, Scale, Sum, Term, Var, Zero


@dataclass(frozen=True)
class VarAtom:
    name: str

    def key(self):
        return (0, self.name)


@dataclass(frozen=True)
class FAtom:
    lams: tuple
    index: int
    arg: "Lin"

    def key(self):
        return (1, tuple(x.coords for x in self.lams), self.index, self.arg.key())


AtomT = Union[VarAtom, FAtom]


class Lin:
    """Immutable sorted linear combination; zero coefficients are dropped."""

    __slots__ = ("spec", "terms", "_key", "_hash")

    def __init__(self, spec: FieldSpec, items: Union[Mapping, Iterable] = ()):
        acc: dict = {}
        pairs = items.items() if isinstance(items, Mapping) else items
        for atom, c in pairs:
            if not isinstance(c, FieldElem):
                c = spec.const(c)
            acc[atom] = acc[atom] + c if atom in acc else c
        self.spec = spec
        self.terms = tuple(sorted(((a, c) for a, c in acc.items() if not c.is_zero()), key=lambda p: p[0].key()))
        self._key = None
        self._hash = None

    # construction
    @classmethod
    def zero(cls, spec: FieldSpec) -> "Lin":
        return cls(spec)

    @classmethod
    def var(cls, spec: FieldSpec, name: str, coef=1) -> "Lin":
        return cls(spec, [(VarAtom(name), coef)])

    @classmethod
    def atom(cls, spec: FieldSpec, a: AtomT, coef=1) -> "Lin":
        return cls(spec, [(a, coef)])

    # identity
    def key(self):
        if self._key is None:
            self._key = tuple((a.key(), c.coords) for a, c in self.terms)
        return self._key

    def __eq__(self, other):
        return isinstance(other, Lin) and self.key() == other.key()

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.key())
        return self._hash

    def __repr__(self):
        return f"Lin({print_lin(self)})"

    def __str__(self):
        return print_lin(self)

    # algebra
    def __add__(self, other: "Lin") -> "Lin":
        return Lin(self.spec, list(self.terms) + list(other.terms))

    def __sub__(self, other: "Lin") -> "Lin":
        return self + other.scale(-1)

    def __neg__(self) -> "Lin":
        return self.scale(-1)

    def scale(self, c) -> "Lin":
        if not isinstance(c, FieldElem):
            c = self.spec.const(c)
        if c.is_zero():
            return Lin(self.spec)
        return Lin(self.spec, [(a, c * d) for a, d in self.terms])

    def is_zero(self) -> bool:
        return not self.terms

    def coeff(self, atom: AtomT) -> FieldElem:
        for a, c in self.terms:
            if a == atom:
                return c
        return self.spec.zero()

    def var_coeff(self, name: str) -> FieldElem:
        return self.coeff(VarAtom(name))

    def without(self, atoms: Iterable[AtomT]) -> "Lin":
        drop = set(atoms)
        return Lin(self.spec, [(a, c) for a, c in self.terms if a not in drop])

    def restrict(self, pred: Callable[[AtomT], bool]) -> "Lin":
        return Lin(self.spec, [(a, c) for a, c in self.terms if pred(a)])

    def atoms(self) -> list:
        return [a for a, _ in self.terms]

    # variables
    def vars(self) -> set:
        out = set()
        for a, _ in self.terms:
            if isinstance(a, VarAtom):
                out.add(a.name)
            else:
                out |= a.arg.vars()
        return out

    def top_vars(self) -> set:
        return {a.name for a, _ in self.terms if isinstance(a, VarAtom)}

    def mentions(self, names) -> bool:
        names = {names} if isinstance(names, str) else set(names)
        return bool(self.vars() & names)

    def fatoms(self) -> list:
        """All f-atoms, innermost first, without duplicates."""
        seen: list = []
        for a, _ in self.terms:
            if isinstance(a, FAtom):
                for b in a.arg.fatoms():
                    if b not in seen:
                        seen.append(b)
                if a not in seen:
                    seen.append(a)
        return seen

    # rewriting
    def map_atoms(self, fn: Callable[[AtomT], "Lin"]) -> "Lin":
        """Rebuild bottom-up: f-atom arguments first, then fn on every atom."""
        out: list = []
        for a, c in self.terms:
            if isinstance(a, FAtom):
                a = FAtom(a.lams, a.index, a.arg.map_atoms(fn))
                if a.arg.is_zero():
                    continue
            out.extend((b, c * d) for b, d in fn(a).terms)
        return Lin(self.spec, out)

    def subst(self, mapping: Mapping[str, "Lin"], simplify: Optional[Callable[[FAtom], "Lin"]] = None) -> "Lin":
        def fn(a: AtomT) -> Lin:
            if isinstance(a, VarAtom):
                return mapping.get(a.name, Lin.atom(self.spec, a))
            if simplify is not None:
                return simplify(a)
            return Lin.atom(self.spec, a)

        return self.map_atoms(fn)

    def replace_atom(self, target: AtomT, value: "Lin") -> "Lin":
        def fn(a: AtomT) -> Lin:
            return value if a == target else Lin.atom(self.spec, a)

        return self.map_atoms(fn)

    def is_rational(self) -> bool:
        return all(c.is_rational() for _, c in self.terms)

    def lead(self) -> Optional[FieldElem]:
        return self.terms[0][1] if self.terms else None


# ---------------------------------------------------------------- term bridge


def linearize(t: Term, spec: FieldSpec) -> Lin:
    if isinstance(t, Var):
        return Lin.var(spec, t.name)
    if isinstance(t, Zero):
        return Lin(spec)
    if isinstance(t, Scale):
        return linearize(t.term, spec).scale(t.coef)
    if isinstance(t, Sum):
        return linearize(t.left, spec) + linearize(t.right, spec)
    if isinstance(t, FApp):
        arg = linearize(t.arg, spec)
        if arg.is_zero():
            return Lin(spec)
        return Lin.atom(spec, FAtom(tuple(t.lams), t.index, arg))
    raise UnsupportedBaseAtom(f"unsupported term {t!r}")


def atom_to_term(a: AtomT) -> Term:
    if isinstance(a, VarAtom):
        return Var(a.name)
    return FApp(a.lams, a.index, to_term(a.arg))


def to_term(lin: Lin) -> Term:
    out: Optional[Term] = None
    for a, c in lin.terms:
        base = atom_to_term(a)
        piece = base if c == 1 else Scale(c, base)
        out = piece if out is None else Sum(out, piece)
    return ZERO if out is None else out


def print_lin(lin: Lin) -> str:
    from .formulas import print_term

    return print_term(to_term(lin))


# ---------------------------------------------------------------- f-simplification


def simplify_fatom(a: FAtom, ring: RingSpec, gvars: frozenset = frozenset()) -> Lin:
    """Evaluate f_{lams,i}(arg) syntactically when arg is visibly an element of G_lams.

    Atoms known to lie in G are f-atoms and the variables in gvars.  When
    every such atom's coefficient is an R-multiple of a single lam_j the
    decomposition is read off directly (it is unique by freeness).
    """
    spec = a.arg.spec
    if a.arg.is_zero():
        return Lin(spec)
    parts: dict = {j: [] for j in range(len(a.lams))}
    for atom, c in a.arg.terms:
        in_g = isinstance(atom, FAtom) or (isinstance(atom, VarAtom) and atom.name in gvars)
        if not in_g:
            return Lin.atom(spec, a)
        hit = None
        for j, lam in enumerate(a.lams):
            q = c / lam
            if q.is_rational() and ring.contains(q.rational()):
                hit = (j, q)
                break
        if hit is None:
            return Lin.atom(spec, a)
        parts[hit[0]].append((atom, hit[1]))
    return Lin(spec, parts[a.index - 1])


def simplifier(ring: RingSpec, gvars: frozenset = frozenset()) -> Callable[[FAtom], Lin]:
    return lambda a: simplify_fatom(a, ring, gvars)


def lin_rows_text(rows: Sequence[Sequence]) -> list:
    return [[str(Fraction(v)) for v in r] for r in rows]

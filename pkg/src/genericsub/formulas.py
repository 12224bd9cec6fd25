"""Terms and formulas of the language with G, G_lambda, f_lambda,i and pp-predicates.

Grammar (precedence ~ > /\\ > \\/ > ->, quantifiers extend to the right)::

    formula := true | false | atom | ~formula | formula /\\ formula
             | formula \\/ formula | formula -> formula
             | exists x . formula | forall x . formula | ( formula )
    atom    := term = term | term != term | term < term | G(term)
             | Gl[scalars](term) | pp{A|B|c}(terms)
    term    := ident | scalar*term | term + term | term - term | -term | 0
             | f[scalars; i](term)
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from fractions import Fraction
from itertools import count
from typing import Iterable, Iterator, Optional, Sequence, Union

from .config import EngineConfig
from .errors import (
    ArityMismatch,
    FormulaSyntaxError,
    IndependenceError,
    OrderNotAvailable,
    QuantifierPresent,
    ResourceLimit,
)
from .exactnum import FieldElem, FieldSpec, is_independent, is_simple_scalar, scalar_text

# ---------------------------------------------------------------- terms


class Term:
    __slots__ = ()

    def __str__(self) -> str:
        return print_term(self)

    def __add__(self, other: "Term") -> "Term":
        return Sum(self, other)


@dataclass(frozen=True)
class Var(Term):
    name: str


@dataclass(frozen=True)
class Zero(Term):
    pass


ZERO = Zero()


@dataclass(frozen=True)
class Scale(Term):
    coef: FieldElem
    term: Term


@dataclass(frozen=True)
class Sum(Term):
    left: Term
    right: Term


def _check_lams(lams: tuple) -> None:
    if not lams:
        raise IndependenceError("scalar tuple must be nonempty")
    if not is_independent(list(lams)):
        txt = ", ".join(scalar_text(x) for x in lams)
        raise IndependenceError(f"scalars ({txt}) are dependent over Q")


@dataclass(frozen=True)
class FApp(Term):
    """f_{lams,index}(arg): the index-th G-coordinate along lams, 0 off G_lams."""

    lams: tuple
    index: int
    arg: Term

    def __post_init__(self):
        object.__setattr__(self, "lams", tuple(self.lams))
        _check_lams(self.lams)
        if not 1 <= self.index <= len(self.lams):
            raise IndependenceError(f"index {self.index} outside 1..{len(self.lams)}")


def neg_term(t: Term, spec: FieldSpec) -> Term:
    if isinstance(t, Scale):
        return Scale(-t.coef, t.term)
    return Scale(spec.const(-1), t)


def term_scalars(t: Term) -> Iterator[FieldElem]:
    if isinstance(t, Scale):
        yield t.coef
        yield from term_scalars(t.term)
    elif isinstance(t, Sum):
        yield from term_scalars(t.left)
        yield from term_scalars(t.right)
    elif isinstance(t, FApp):
        yield from t.lams
        yield from term_scalars(t.arg)


# ---------------------------------------------------------------- pp constraints


@dataclass(frozen=True)
class PPConstraint:
    """exists y in G^m with A*args + B*y = c*p; p is a trailing slot present iff c != 0."""

    A: tuple
    B: tuple
    c: tuple
    k: int
    m: int

    def __post_init__(self):
        A = tuple(tuple(int(v) for v in r) for r in self.A)
        B = tuple(tuple(int(v) for v in r) for r in self.B)
        c = tuple(int(v) for v in self.c)
        n = len(c)
        if n == 0:
            raise ArityMismatch("pp constraint needs at least one equation")
        if len(A) != n or len(B) != n:
            raise ArityMismatch("pp matrix row counts disagree")
        if any(len(r) != self.k for r in A) or any(len(r) != self.m for r in B):
            raise ArityMismatch("pp matrix rows are ragged")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "c", c)

    @classmethod
    def make(cls, A: Sequence[Sequence[int]], B: Sequence[Sequence[int]], c: Sequence[int]) -> "PPConstraint":
        n = len(c)
        k = len(A[0]) if A and A[0] is not None and len(A) else 0
        m = len(B[0]) if B and len(B) else 0
        A = A if A else [[] for _ in range(n)]
        B = B if B else [[] for _ in range(n)]
        return cls(tuple(map(tuple, A)), tuple(map(tuple, B)), tuple(c), k, m)

    @property
    def n(self) -> int:
        return len(self.c)

    @property
    def has_param(self) -> bool:
        return any(self.c)

    @property
    def arity(self) -> int:
        return self.k + (1 if self.has_param else 0)

    def text(self) -> str:
        def mat(M, cols):
            if cols == 0:
                return ""
            return ";".join(",".join(str(v) for v in r) for r in M)

        return f"pp{{{mat(self.A, self.k)}|{mat(self.B, self.m)}|{';'.join(str(v) for v in self.c)}}}"

    def to_json(self) -> dict:
        return {"A": [list(r) for r in self.A], "B": [list(r) for r in self.B], "c": list(self.c), "k": self.k, "m": self.m}


# ---------------------------------------------------------------- formulas


class Formula:
    __slots__ = ()

    def __str__(self) -> str:
        return print_formula(self)


class Atom(Formula):
    __slots__ = ()


@dataclass(frozen=True)
class Eq(Atom):
    left: Term
    right: Term


@dataclass(frozen=True)
class Lt(Atom):
    left: Term
    right: Term


@dataclass(frozen=True)
class InG(Atom):
    term: Term


@dataclass(frozen=True)
class InGl(Atom):
    lams: tuple
    term: Term

    def __post_init__(self):
        object.__setattr__(self, "lams", tuple(self.lams))
        _check_lams(self.lams)


@dataclass(frozen=True)
class PP(Atom):
    pp: PPConstraint
    args: tuple

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))
        if len(self.args) != self.pp.arity:
            raise ArityMismatch(f"pp predicate expects {self.pp.arity} arguments, got {len(self.args)}")


@dataclass(frozen=True)
class Top(Formula):
    pass


@dataclass(frozen=True)
class Bottom(Formula):
    pass


TRUE = Top()
FALSE = Bottom()


@dataclass(frozen=True)
class Not(Formula):
    body: Formula


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Exists(Formula):
    var: str
    body: Formula


@dataclass(frozen=True)
class Forall(Formula):
    var: str
    body: Formula


def conj(parts: Iterable[Formula]) -> Formula:
    out: Optional[Formula] = None
    for p in parts:
        out = p if out is None else And(out, p)
    return TRUE if out is None else out


def disj(parts: Iterable[Formula]) -> Formula:
    out: Optional[Formula] = None
    for p in parts:
        out = p if out is None else Or(out, p)
    return FALSE if out is None else out


def implies(a: Formula, b: Formula) -> Formula:
    return Or(Not(a), b)


def neq(a: Term, b: Term) -> Formula:
    """a != b as a literal."""
    return Not(Eq(a, b))


# ---------------------------------------------------------------- traversal


def term_vars(t: Term) -> set:
    if isinstance(t, Var):
        return {t.name}
    if isinstance(t, Scale):
        return term_vars(t.term)
    if isinstance(t, Sum):
        return term_vars(t.left) | term_vars(t.right)
    if isinstance(t, FApp):
        return term_vars(t.arg)
    return set()


def atom_terms(a: Atom) -> tuple:
    if isinstance(a, (Eq, Lt)):
        return (a.left, a.right)
    if isinstance(a, (InG, InGl)):
        return (a.term,)
    if isinstance(a, PP):
        return a.args
    raise TypeError(a)


def free_vars(f: Formula) -> set:
    if isinstance(f, Atom):
        out: set = set()
        for t in atom_terms(f):
            out |= term_vars(t)
        return out
    if isinstance(f, Not):
        return free_vars(f.body)
    if isinstance(f, (And, Or)):
        return free_vars(f.left) | free_vars(f.right)
    if isinstance(f, (Exists, Forall)):
        return free_vars(f.body) - {f.var}
    return set()


def all_vars(f: Formula) -> set:
    if isinstance(f, Atom):
        return free_vars(f)
    if isinstance(f, Not):
        return all_vars(f.body)
    if isinstance(f, (And, Or)):
        return all_vars(f.left) | all_vars(f.right)
    if isinstance(f, (Exists, Forall)):
        return all_vars(f.body) | {f.var}
    return set()


def is_quantifier_free(f: Formula) -> bool:
    if isinstance(f, (Exists, Forall)):
        return False
    if isinstance(f, Not):
        return is_quantifier_free(f.body)
    if isinstance(f, (And, Or)):
        return is_quantifier_free(f.left) and is_quantifier_free(f.right)
    return True


def atoms_of(f: Formula) -> list:
    if isinstance(f, Atom):
        return [f]
    if isinstance(f, Not):
        return atoms_of(f.body)
    if isinstance(f, (And, Or)):
        return atoms_of(f.left) + atoms_of(f.right)
    if isinstance(f, (Exists, Forall)):
        return atoms_of(f.body)
    return []


def fresh_name(base: str, avoid: set) -> str:
    root = re.sub(r"_\d+$", "", base)
    for i in count(1):
        cand = f"{root}_{i}"
        if cand not in avoid:
            return cand
    raise AssertionError  # pragma: no cover


def subst_term(t: Term, var: str, s: Term) -> Term:
    if isinstance(t, Var):
        return s if t.name == var else t
    if isinstance(t, Scale):
        return Scale(t.coef, subst_term(t.term, var, s))
    if isinstance(t, Sum):
        return Sum(subst_term(t.left, var, s), subst_term(t.right, var, s))
    if isinstance(t, FApp):
        return FApp(t.lams, t.index, subst_term(t.arg, var, s))
    return t


def map_atom_terms(a: Atom, fn) -> Atom:
    if isinstance(a, Eq):
        return Eq(fn(a.left), fn(a.right))
    if isinstance(a, Lt):
        return Lt(fn(a.left), fn(a.right))
    if isinstance(a, InG):
        return InG(fn(a.term))
    if isinstance(a, InGl):
        return InGl(a.lams, fn(a.term))
    if isinstance(a, PP):
        return PP(a.pp, tuple(fn(t) for t in a.args))
    raise TypeError(a)


def substitute(f: Formula, var: str, t: Term) -> Formula:
    """Capture-avoiding substitution of t for the free occurrences of var."""
    tv = term_vars(t)

    def go(g: Formula) -> Formula:
        if isinstance(g, Atom):
            return map_atom_terms(g, lambda s: subst_term(s, var, t))
        if isinstance(g, Not):
            return Not(go(g.body))
        if isinstance(g, And):
            return And(go(g.left), go(g.right))
        if isinstance(g, Or):
            return Or(go(g.left), go(g.right))
        if isinstance(g, (Exists, Forall)):
            if g.var == var:
                return g
            body, bv = g.body, g.var
            if bv in tv:
                nb = fresh_name(bv, tv | all_vars(g.body) | {var})
                body = substitute(body, bv, Var(nb))
                bv = nb
            return type(g)(bv, go(body))
        return g

    return go(f)


def rectify(f: Formula, avoid: Optional[set] = None) -> Formula:
    """Rename bound variables that clash with free variables or with an outer binder."""
    avoid = set(free_vars(f)) if avoid is None else set(avoid)

    def go(g: Formula, taken: set) -> Formula:
        if isinstance(g, Not):
            return Not(go(g.body, taken))
        if isinstance(g, And):
            return And(go(g.left, taken), go(g.right, taken))
        if isinstance(g, Or):
            return Or(go(g.left, taken), go(g.right, taken))
        if isinstance(g, (Exists, Forall)):
            bv, body = g.var, g.body
            if bv in taken:
                nb = fresh_name(bv, taken | all_vars(body))
                body = substitute(body, bv, Var(nb))
                bv = nb
            return type(g)(bv, go(body, taken | {bv}))
        return g

    return go(f, avoid)


# ---------------------------------------------------------------- normal forms


def nnf(f: Formula) -> Formula:
    """Negation normal form; implications are already disjunctions."""

    def pos(g: Formula) -> Formula:
        if isinstance(g, Not):
            return negf(g.body)
        if isinstance(g, And):
            return And(pos(g.left), pos(g.right))
        if isinstance(g, Or):
            return Or(pos(g.left), pos(g.right))
        if isinstance(g, Exists):
            return Exists(g.var, pos(g.body))
        if isinstance(g, Forall):
            return Forall(g.var, pos(g.body))
        return g

    def negf(g: Formula) -> Formula:
        if isinstance(g, Not):
            return pos(g.body)
        if isinstance(g, And):
            return Or(negf(g.left), negf(g.right))
        if isinstance(g, Or):
            return And(negf(g.left), negf(g.right))
        if isinstance(g, Exists):
            return Forall(g.var, negf(g.body))
        if isinstance(g, Forall):
            return Exists(g.var, negf(g.body))
        if isinstance(g, Top):
            return FALSE
        if isinstance(g, Bottom):
            return TRUE
        return Not(g)

    return pos(f)


Literal = Formula  # an Atom or Not(Atom)


def is_literal(f: Formula) -> bool:
    return isinstance(f, Atom) or (isinstance(f, Not) and isinstance(f.body, Atom))


def dnf_clauses(f: Formula, max_clauses: int = 10_000) -> list[list[Formula]]:
    """Clauses (lists of literals) of a disjunctive normal form; [] means false."""
    if not is_quantifier_free(f):
        raise QuantifierPresent("disjunctive normal form needs a quantifier-free formula")

    def go(g: Formula) -> list[list[Formula]]:
        if isinstance(g, Top):
            return [[]]
        if isinstance(g, Bottom):
            return []
        if is_literal(g):
            return [[g]]
        if isinstance(g, Or):
            out = go(g.left) + go(g.right)
        elif isinstance(g, And):
            left, right = go(g.left), go(g.right)
            if len(left) * len(right) >= max_clauses:
                raise ResourceLimit(f"disjunctive normal form exceeds {max_clauses} clauses")
            out = [a + b for a in left for b in right]
        else:  # pragma: no cover
            raise TypeError(g)
        if len(out) >= max_clauses:
            raise ResourceLimit(f"disjunctive normal form exceeds {max_clauses} clauses")
        return out

    clauses = []
    for cl in go(nnf(f)):
        seen: list = []
        for lit in cl:
            if lit not in seen:
                seen.append(lit)
        clauses.append(seen)
    return clauses


def to_dnf(f: Formula, max_clauses: int = 10_000) -> Formula:
    return disj(conj(cl) for cl in dnf_clauses(f, max_clauses))


# ---------------------------------------------------------------- printing


def _is_negative(c: FieldElem) -> bool:
    return scalar_text(c).startswith("-")


def _coef_text(c: FieldElem) -> str:
    s = scalar_text(c)
    return s if is_simple_scalar(c) else f"({s})"


def _scale_text(c: FieldElem, t: Term) -> str:
    inner = print_term(t)
    if isinstance(t, Sum) or (isinstance(t, Scale) and _is_negative(t.coef)):
        inner = f"({inner})"
    if c == -1 and not isinstance(t, Scale):
        return "-" + inner
    return f"{_coef_text(c)}*{inner}"


def print_term(t: Term) -> str:
    if isinstance(t, Var):
        return t.name
    if isinstance(t, Zero):
        return "0"
    if isinstance(t, Scale):
        return _scale_text(t.coef, t.term)
    if isinstance(t, Sum):
        left = print_term(t.left)
        r = t.right
        if isinstance(r, Scale) and _is_negative(r.coef):
            c, u = -r.coef, r.term
            if c == 1 and not isinstance(u, Scale):
                body = print_term(u)
                if isinstance(u, Sum):
                    body = f"({body})"
            else:
                body = _scale_text(c, u)
            return f"{left} - {body}"
        right = print_term(r)
        if isinstance(r, Sum):
            right = f"({right})"
        return f"{left} + {right}"
    if isinstance(t, FApp):
        lams = ", ".join(scalar_text(x) for x in t.lams)
        return f"f[{lams}; {t.index}]({print_term(t.arg)})"
    raise TypeError(t)


_PREC = {Or: 1, And: 2, Not: 3}


def _prec(f: Formula) -> int:
    if isinstance(f, (Exists, Forall)):
        return 0
    return _PREC.get(type(f), 4)


def print_formula(f: Formula) -> str:
    if isinstance(f, Top):
        return "true"
    if isinstance(f, Bottom):
        return "false"
    if isinstance(f, Eq):
        return f"{print_term(f.left)} = {print_term(f.right)}"
    if isinstance(f, Lt):
        return f"{print_term(f.left)} < {print_term(f.right)}"
    if isinstance(f, InG):
        return f"G({print_term(f.term)})"
    if isinstance(f, InGl):
        return f"Gl[{', '.join(scalar_text(x) for x in f.lams)}]({print_term(f.term)})"
    if isinstance(f, PP):
        return f"{f.pp.text()}({', '.join(print_term(t) for t in f.args)})"
    if isinstance(f, Not):
        b = f.body
        inner = print_formula(b)
        if _prec(b) < 3 or isinstance(b, (Eq, Lt)):
            inner = f"({inner})"
        return "~" + inner
    if isinstance(f, (And, Or)):
        p = _prec(f)
        op = " /\\ " if isinstance(f, And) else " \\/ "
        left, right = print_formula(f.left), print_formula(f.right)
        if _prec(f.left) < p:
            left = f"({left})"
        if _prec(f.right) <= p:
            right = f"({right})"
        return left + op + right
    if isinstance(f, Exists):
        return f"exists {f.var} . {print_formula(f.body)}"
    if isinstance(f, Forall):
        return f"forall {f.var} . {print_formula(f.body)}"
    raise TypeError(f)


# ---------------------------------------------------------------- parsing

_TOKEN = re.compile(
    r"""\s*(?:
      (?P<rat>\d+/\d+)
    | (?P<int>\d+)
    | (?P<op>/\\|\\/|->|!=|[~=<+\-*().,;\[\]{}|])
    | (?P<ident>[A-Za-z_][A-Za-z0-9_']*)
    )""",
    re.VERBOSE,
)

KEYWORDS = {"exists", "forall", "true", "false", "G", "Gl", "f", "pp"}


@dataclass(frozen=True)
class Tok:
    kind: str
    text: str
    pos: int


def tokenize(text: str) -> list[Tok]:
    toks = []
    pos = 0
    n = len(text)
    while True:
        while pos < n and text[pos].isspace():
            pos += 1
        if pos >= n:
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise FormulaSyntaxError(f"unexpected character {text[pos]!r}", pos, (), text)
        kind = m.lastgroup
        toks.append(Tok(kind, m.group(kind), m.start(kind)))
        pos = m.end()
    toks.append(Tok("eof", "", n))
    return toks


class _Fail(Exception):
    def __init__(self, pos: int, expected: tuple, message: str):
        self.pos, self.expected, self.message = pos, expected, message


class Parser:
    """Backtracking recursive descent over a token list."""

    def __init__(self, text: str, cfg: EngineConfig):
        self.text = text
        self.cfg = cfg
        self.spec = cfg.field
        self.toks = tokenize(text)
        self.i = 0
        self.best: Optional[_Fail] = None

    # -- helpers
    def peek(self, k: int = 0) -> Tok:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def fail(self, expected: Sequence[str], message: str = "") -> "_Fail":
        tok = self.peek()
        msg = message or (f"unexpected {tok.text!r}" if tok.kind != "eof" else "unexpected end of input")
        f = _Fail(tok.pos, tuple(expected), msg)
        if self.best is None or f.pos > self.best.pos or (f.pos == self.best.pos and not self.best.expected):
            self.best = f
        elif f.pos == self.best.pos:
            merged = tuple(dict.fromkeys(self.best.expected + f.expected))
            self.best = _Fail(f.pos, merged, self.best.message)
        return f

    def accept(self, text: str) -> bool:
        if self.peek().text == text and self.peek().kind in ("op", "ident"):
            self.i += 1
            return True
        return False

    def expect(self, text: str) -> Tok:
        tok = self.peek()
        if tok.text == text and tok.kind in ("op", "ident"):
            self.i += 1
            return tok
        raise self.fail((repr(text),))

    # -- entry
    def parse(self) -> Formula:
        try:
            f = self.imp()
            if self.peek().kind != "eof":
                raise self.fail(("end of input", "'/\\'", "'\\/'", "'->'"))
        except _Fail:
            b = self.best
            raise FormulaSyntaxError(b.message, b.pos, b.expected, self.text) from None
        return f

    # -- formulas
    def imp(self) -> Formula:
        left = self.disj()
        if self.accept("->"):
            right = self.imp()
            return Or(Not(left), right)
        return left

    def disj(self) -> Formula:
        f = self.conj()
        while self.accept("\\/"):
            f = Or(f, self.conj())
        return f

    def conj(self) -> Formula:
        f = self.unary()
        while self.accept("/\\"):
            f = And(f, self.unary())
        return f

    def unary(self) -> Formula:
        if self.accept("~"):
            return Not(self.unary())
        tok = self.peek()
        if tok.kind == "ident" and tok.text in ("exists", "forall"):
            self.i += 1
            v = self.peek()
            if v.kind != "ident" or v.text in KEYWORDS or self._is_gen(v.text):
                raise self.fail(("variable name",))
            self.i += 1
            self.expect(".")
            body = self.imp()
            return (Exists if tok.text == "exists" else Forall)(v.text, body)
        return self.primary()

    def primary(self) -> Formula:
        tok = self.peek()
        if tok.kind == "ident" and tok.text == "true":
            self.i += 1
            return TRUE
        if tok.kind == "ident" and tok.text == "false":
            self.i += 1
            return FALSE
        if tok.kind == "ident" and tok.text == "G" and self.peek(1).text == "(":
            self.i += 2
            t = self.term()
            self.expect(")")
            return InG(t)
        if tok.kind == "ident" and tok.text == "Gl" and self.peek(1).text == "[":
            self.i += 2
            lams = self.scalar_list("]")
            self.expect("(")
            t = self.term()
            self.expect(")")
            return self._guard(lambda: InGl(lams, t), tok.pos)
        if tok.kind == "ident" and tok.text == "pp" and self.peek(1).text == "{":
            return self.pp_atom()
        if tok.text == "(":
            save = self.i
            try:
                return self.rel_atom()
            except _Fail:
                self.i = save
            self.i += 1
            f = self.imp()
            self.expect(")")
            return f
        return self.rel_atom()

    def rel_atom(self) -> Formula:
        left = self.term()
        op = self.peek()
        if op.text == "=":
            self.i += 1
            return Eq(left, self.term())
        if op.text == "!=":
            self.i += 1
            return Not(Eq(left, self.term()))
        if op.text == "<":
            if not self.cfg.ordered:
                raise OrderNotAvailable("order atoms need an ordered configuration", op.pos, (), self.text)
            self.i += 1
            return Lt(left, self.term())
        raise self.fail(("'='", "'!='", "'<'", "'+'", "'-'"))

    def pp_atom(self) -> Formula:
        pos = self.peek().pos
        self.i += 2
        A = self.int_matrix()
        self.expect("|")
        B = self.int_matrix()
        self.expect("|")
        c = [self.signed_int()]
        while self.accept(";") or self.accept(","):
            c.append(self.signed_int())
        self.expect("}")
        n = len(c)
        A = A or [[] for _ in range(n)]
        B = B or [[] for _ in range(n)]
        self.expect("(")
        args: list[Term] = []
        if self.peek().text != ")":
            args.append(self.term())
            while self.accept(","):
                args.append(self.term())
        self.expect(")")
        try:
            pp = PPConstraint(tuple(map(tuple, A)), tuple(map(tuple, B)), tuple(c), len(A[0]), len(B[0]))
            return PP(pp, tuple(args))
        except ArityMismatch as e:
            raise FormulaSyntaxError(str(e), pos, (), self.text) from None

    def int_matrix(self) -> list[list[int]]:
        if self.peek().text in ("|", "}"):
            return []
        rows = [self.int_row()]
        while self.accept(";"):
            rows.append(self.int_row())
        return rows

    def int_row(self) -> list[int]:
        row = [self.signed_int()]
        while self.accept(","):
            row.append(self.signed_int())
        return row

    def signed_int(self) -> int:
        sign = -1 if self.accept("-") else 1
        tok = self.peek()
        if tok.kind != "int":
            raise self.fail(("integer",))
        self.i += 1
        return sign * int(tok.text)

    def scalar_list(self, close: str) -> tuple:
        out = [self.scalar()]
        while self.accept(","):
            out.append(self.scalar())
        self.expect(close)
        return tuple(out)

    def scalar(self) -> FieldElem:
        kind, v = self.expr()
        if kind != "s":
            raise self.fail(("scalar",), "expected a scalar, found a term")
        return v

    def term(self) -> Term:
        kind, v = self.expr()
        return self._as_term(kind, v)

    def _as_term(self, kind: str, v) -> Term:
        if kind == "t":
            return v
        if v.is_zero():
            return ZERO
        raise self.fail(("term",), f"scalar {scalar_text(v)} used as a term")

    def _guard(self, build, pos: int):
        try:
            return build()
        except IndependenceError:
            raise
        except ArityMismatch as e:  # pragma: no cover
            raise FormulaSyntaxError(str(e), pos, (), self.text) from None

    def _is_gen(self, name: str) -> bool:
        return name == "a" and self.spec.degree > 1

    # -- typed expressions: ('s', FieldElem) or ('t', Term)
    def expr(self):
        kind, v = self.prod()
        while self.peek().text in ("+", "-") and self.peek().kind == "op":
            op = self.peek().text
            self.i += 1
            k2, w = self.prod()
            if kind == "s" and k2 == "s":
                v = v + w if op == "+" else v - w
                continue
            left = self._as_term(kind, v)
            right = self._as_term(k2, w)
            v = Sum(left, right if op == "+" else neg_term(right, self.spec))
            kind = "t"
        return kind, v

    def prod(self):
        kind, v = self.unary_expr()
        if self.peek().text == "*" and self.peek().kind == "op":
            if kind != "s":
                raise self.fail(("'+'", "'-'", "'='"), "a term cannot be multiplied on the right")
            self.i += 1
            k2, w = self.prod()
            if k2 == "s":
                return "s", v * w
            return "t", Scale(v, w)
        return kind, v

    def unary_expr(self):
        if self.peek().text == "-" and self.peek().kind == "op":
            self.i += 1
            kind, v = self.unary_expr()
            if kind == "s":
                return "s", -v
            return "t", neg_term(v, self.spec)
        return self.atom_expr()

    def atom_expr(self):
        tok = self.peek()
        if tok.kind == "int":
            self.i += 1
            return "s", self.spec.const(int(tok.text))
        if tok.kind == "rat":
            self.i += 1
            p, q = tok.text.split("/")
            if int(q) == 0:
                raise self.fail(("nonzero denominator",), "zero denominator")
            return "s", self.spec.const(Fraction(int(p), int(q)))
        if tok.text == "(" and tok.kind == "op":
            self.i += 1
            kv = self.expr()
            self.expect(")")
            return kv
        if tok.kind == "ident":
            if self._is_gen(tok.text):
                self.i += 1
                return "s", self.spec.gen()
            if tok.text == "f" and self.peek(1).text == "[":
                self.i += 2
                lams = self.scalar_list(";")
                itok = self.peek()
                if itok.kind != "int":
                    raise self.fail(("index",))
                self.i += 1
                self.expect("]")
                self.expect("(")
                arg = self.term()
                self.expect(")")
                return "t", self._guard(lambda: FApp(lams, int(itok.text), arg), tok.pos)
            if tok.text in KEYWORDS:
                raise self.fail(("term",), f"keyword {tok.text!r} cannot start a term")
            self.i += 1
            return "t", Var(tok.text)
        raise self.fail(("term", "scalar", "'('"))


def parse(text: str, cfg: Optional[EngineConfig] = None) -> Formula:
    """Parse formula text under cfg; bound variables clashing with free ones are renamed."""
    cfg = cfg or EngineConfig()
    f = Parser(text, cfg).parse()
    return rectify(f)


def parse_term(text: str, cfg: Optional[EngineConfig] = None) -> Term:
    cfg = cfg or EngineConfig()
    p = Parser(text, cfg)
    try:
        t = p.term()
        if p.peek().kind != "eof":
            raise p.fail(("end of input",))
    except _Fail:
        b = p.best
        raise FormulaSyntaxError(b.message, b.pos, b.expected, text) from None
    return t


# ---------------------------------------------------------------- JSON


def term_to_json(t: Term):
    if isinstance(t, Var):
        return {"kind": "Var", "name": t.name}
    if isinstance(t, Zero):
        return {"kind": "Zero"}
    if isinstance(t, Scale):
        return {"kind": "Scale", "coef": scalar_text(t.coef), "term": term_to_json(t.term)}
    if isinstance(t, Sum):
        return {"kind": "Sum", "left": term_to_json(t.left), "right": term_to_json(t.right)}
    if isinstance(t, FApp):
        return {"kind": "FApp", "lams": [scalar_text(x) for x in t.lams], "index": t.index, "arg": term_to_json(t.arg)}
    raise TypeError(t)


def to_json(f: Formula):
    """Canonical JSON-ready structure: every node is {'kind': ..., children...}."""
    if isinstance(f, Top):
        return {"kind": "True"}
    if isinstance(f, Bottom):
        return {"kind": "False"}
    if isinstance(f, (Eq, Lt)):
        return {"kind": type(f).__name__, "left": term_to_json(f.left), "right": term_to_json(f.right)}
    if isinstance(f, InG):
        return {"kind": "InG", "term": term_to_json(f.term)}
    if isinstance(f, InGl):
        return {"kind": "InGl", "lams": [scalar_text(x) for x in f.lams], "term": term_to_json(f.term)}
    if isinstance(f, PP):
        return {"kind": "PP", "pp": f.pp.to_json(), "args": [term_to_json(t) for t in f.args]}
    if isinstance(f, Not):
        return {"kind": "Not", "body": to_json(f.body)}
    if isinstance(f, (And, Or)):
        return {"kind": type(f).__name__, "left": to_json(f.left), "right": to_json(f.right)}
    if isinstance(f, (Exists, Forall)):
        return {"kind": type(f).__name__, "var": f.var, "body": to_json(f.body)}
    raise TypeError(f)


def dumps(f: Formula) -> str:
    return json.dumps(to_json(f), sort_keys=True, separators=(",", ":"))


def term_from_json(obj, spec: FieldSpec) -> Term:
    k = obj["kind"]
    if k == "Var":
        return Var(obj["name"])
    if k == "Zero":
        return ZERO
    if k == "Scale":
        return Scale(spec.parse(obj["coef"]), term_from_json(obj["term"], spec))
    if k == "Sum":
        return Sum(term_from_json(obj["left"], spec), term_from_json(obj["right"], spec))
    if k == "FApp":
        return FApp(tuple(spec.parse(x) for x in obj["lams"]), obj["index"], term_from_json(obj["arg"], spec))
    raise ValueError(f"unknown term kind {k!r}")


def from_json(obj, spec: FieldSpec) -> Formula:
    k = obj["kind"]
    if k == "True":
        return TRUE
    if k == "False":
        return FALSE
    if k in ("Eq", "Lt"):
        cls = Eq if k == "Eq" else Lt
        return cls(term_from_json(obj["left"], spec), term_from_json(obj["right"], spec))
    if k == "InG":
        return InG(term_from_json(obj["term"], spec))
    if k == "InGl":
        return InGl(tuple(spec.parse(x) for x in obj["lams"]), term_from_json(obj["term"], spec))
    if k == "PP":
        p = obj["pp"]
        pp = PPConstraint(tuple(map(tuple, p["A"])), tuple(map(tuple, p["B"])), tuple(p["c"]), p["k"], p["m"])
        return PP(pp, tuple(term_from_json(t, spec) for t in obj["args"]))
    if k == "Not":
        return Not(from_json(obj["body"], spec))
    if k in ("And", "Or"):
        cls = And if k == "And" else Or
        return cls(from_json(obj["left"], spec), from_json(obj["right"], spec))
    if k in ("Exists", "Forall"):
        cls = Exists if k == "Exists" else Forall
        return cls(obj["var"], from_json(obj["body"], spec))
    raise ValueError(f"unknown formula kind {k!r}")


def loads(text: str, spec: FieldSpec) -> Formula:
    return from_json(json.loads(text), spec)

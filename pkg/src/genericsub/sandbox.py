"""An executable model: V spanned by formal generators, G the R-span of the h-generators.

Generators come in two kinds.  h-generators form an R-basis of G; v-generators
are generic directions outside span_F(G).  Fresh generators satisfy no
relation with existing elements, which makes freeness and codensity hold
exactly.  In ordered mode each generator also gets a real value q*sqrt(p)
for a fresh prime p, so distinct generators stay F-linearly independent as
real numbers and the induced order on V is total.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from math import isqrt
from typing import Iterable, Mapping, Optional, Sequence

from .config import EngineConfig
from .errors import (
    CNotIndependent,
    EngineError,
    NoWitness,
    NotClosed,
    ResourceLimit,
    UnboundVariable,
)
from .exactnum import FieldElem, FieldSpec, common_denominator, parse_scalar, rhat_coordinates, scalar_text
from .formulas import (
    And,
    Bottom,
    Eq,
    Exists,
    Formula,
    InG,
    InGl,
    Lt,
    Not,
    Or,
    PP,
    Top,
    Term,
    free_vars,
    is_quantifier_free,
    parse_term,
)
from .intlinalg import integer_kernel, lattice_contains, lattice_hnf, left_kernel, saturation, solve_over
from .linear import FAtom, Lin, VarAtom, linearize
from .modth import GVector, canonical_pp_type, describe_pp_difference, eval_pp

_GEN = re.compile(r"^([hv])(\d+)$")


def _gen_key(g: str):
    m = _GEN.match(g)
    return (0, m.group(1), int(m.group(2))) if m else (1, g, 0)


class VElem:
    """Finite F-combination of generators."""

    __slots__ = ("spec", "coeffs")

    def __init__(self, spec: FieldSpec, coeffs=()):
        items = coeffs.items() if isinstance(coeffs, Mapping) else coeffs
        acc: dict = {}
        for g, c in items:
            if not isinstance(c, FieldElem):
                c = spec.const(c)
            acc[g] = acc[g] + c if g in acc else c
        self.spec = spec
        self.coeffs = {g: acc[g] for g in sorted(acc, key=_gen_key) if not acc[g].is_zero()}

    def __add__(self, other: "VElem") -> "VElem":
        return VElem(self.spec, list(self.coeffs.items()) + list(other.coeffs.items()))

    def __sub__(self, other: "VElem") -> "VElem":
        return self + other.scale(-1)

    def __neg__(self) -> "VElem":
        return self.scale(-1)

    def scale(self, c) -> "VElem":
        if not isinstance(c, FieldElem):
            c = self.spec.const(c)
        return VElem(self.spec, {g: c * x for g, x in self.coeffs.items()})

    def __getitem__(self, g) -> FieldElem:
        return self.coeffs.get(g, self.spec.zero())

    def is_zero(self) -> bool:
        return not self.coeffs

    def support(self) -> list:
        return list(self.coeffs)

    def __eq__(self, other) -> bool:
        return isinstance(other, VElem) and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash(tuple(self.coeffs.items()))

    def text(self) -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for g, c in self.coeffs.items():
            if c == 1:
                body = g
            elif c == -1:
                body = "-" + g
            elif c.is_rational():
                body = f"{scalar_text(c)}*{g}"
            else:
                body = f"({scalar_text(c)})*{g}"
            parts.append(body)
        out = parts[0]
        for p in parts[1:]:
            out += " - " + p[1:] if p.startswith("-") else " + " + p
        return out

    def __repr__(self) -> str:
        return f"VElem({self.text()})"

    def to_json(self) -> dict:
        return {g: scalar_text(c) for g, c in self.coeffs.items()}

    @classmethod
    def from_gvector(cls, spec: FieldSpec, g: GVector) -> "VElem":
        return cls(spec, {k: spec.const(c) for k, c in g.coeffs.items()})


def _primes():
    n = 3
    while True:
        if all(n % p for p in range(3, isqrt(n) + 1, 2)):
            yield n
        n += 2


def _discriminant(poly: Sequence[int]) -> int:
    """Discriminant of a monic integer polynomial (low-to-high) via the Sylvester matrix."""
    from .intlinalg import det

    p = list(poly)
    n = len(p) - 1
    if n < 1:
        return 1
    dp = [i * p[i] for i in range(1, n + 1)]
    m = n - 1
    size = n + m
    rows = []
    hi_p = list(reversed(p))
    hi_dp = list(reversed(dp))
    for i in range(m):
        rows.append([0] * i + hi_p + [0] * (size - i - len(hi_p)))
    for i in range(n):
        rows.append([0] * i + hi_dp + [0] * (size - i - len(hi_dp)))
    return det(rows)


def _sqrt_interval(p: int, bits: int) -> tuple[Fraction, Fraction]:
    s = isqrt(p << (2 * bits))
    return Fraction(s, 1 << bits), Fraction(s + 1, 1 << bits)


def _imul(a: tuple, b: tuple) -> tuple:
    prods = [a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1]]
    return min(prods), max(prods)


class ModelHandle:
    """Generators, named elements and (in ordered mode) real values of generators."""

    def __init__(self, cfg: Optional[EngineConfig] = None):
        self.cfg = cfg or EngineConfig()
        self.spec = self.cfg.field
        self.ring = self.cfg.ring
        self.h: list[str] = []
        self.v: list[str] = []
        self.names: dict[str, VElem] = {}
        self.real: dict[str, tuple[Fraction, int]] = {}
        self._counter = 0
        self._prime_iter = _primes()
        disc = abs(_discriminant(self.spec.minpoly)) if self.spec.minpoly else 1
        self._bad_primes = {p for p in range(2, 200) if disc % p == 0} if disc else set()

    # generators
    def _next_prime(self) -> int:
        while True:
            p = next(self._prime_iter)
            if p not in self._bad_primes:
                return p

    def _new_gen(self, kind: str, value: Optional[Fraction]) -> VElem:
        self._counter += 1
        name = f"{kind}{self._counter}"
        (self.h if kind == "h" else self.v).append(name)
        if self.cfg.ordered:
            p = self._next_prime()
            if value is None or value == 0:
                q = Fraction(1) if value is None else Fraction(1, 1 << 40)
            else:
                lo, hi = _sqrt_interval(p, 96)
                q = Fraction(value) / ((lo + hi) / 2)
                q = q.limit_denominator(1 << 32)
            self.real[name] = (q, p)
        return self.gen(name)

    def fresh_G(self, m: int = 1, values: Optional[Sequence] = None) -> list[VElem]:
        vals = list(values) if values is not None else [None] * m
        return [self._new_gen("h", val) for val in vals]

    def fresh_generic(self, k: int = 1, values: Optional[Sequence] = None) -> list[VElem]:
        vals = list(values) if values is not None else [None] * k
        return [self._new_gen("v", val) for val in vals]

    def gen(self, name: str) -> VElem:
        return VElem(self.spec, {name: self.spec.one()})

    def is_gen(self, name: str) -> bool:
        return name in self.h or name in self.v

    # named elements
    def bind(self, name: str, elem: VElem) -> VElem:
        self.names[name] = elem
        return elem

    def lookup(self, name: str, assignment: Optional[Mapping] = None) -> VElem:
        if assignment and name in assignment:
            return assignment[name]
        if name in self.names:
            return self.names[name]
        if self.is_gen(name):
            return self.gen(name)
        raise UnboundVariable(name)

    def element(self, text: str) -> VElem:
        """Evaluate a term written in the formula syntax (generators by name)."""
        return eval_term(parse_term(text, self.cfg), {}, self)

    # G structure
    def to_gvector(self, e: VElem) -> Optional[GVector]:
        """e as an element of G, or None when e lies outside G."""
        out = {}
        for g, c in e.coeffs.items():
            if g not in self.h or not c.is_rational():
                return None
            q = c.rational()
            if not self.ring.contains(q):
                return None
            out[g] = q
        return GVector(out)

    def in_G(self, e: VElem) -> bool:
        return self.to_gvector(e) is not None

    def decompose(self, e: VElem, lams: Sequence[FieldElem]) -> Optional[list[VElem]]:
        """(g_1..g_n) in G^n with e = sum lam_j g_j, or None when e is outside G_lam."""
        comps: list[dict] = [{} for _ in lams]
        for g, c in e.coeffs.items():
            if g not in self.h:
                return None
            co = rhat_coordinates(c, list(lams))
            if co is None:
                return None
            for j, q in enumerate(co):
                if not self.ring.contains(q):
                    return None
                if q:
                    comps[j][g] = q
        return [VElem(self.spec, d) for d in comps]

    # order
    def _interval(self, e: VElem, bits: int) -> tuple[Fraction, Fraction]:
        lo, hi = Fraction(0), Fraction(0)
        width = Fraction(1, 1 << bits)
        for g, c in e.coeffs.items():
            q, p = self.real[g]
            ci = c.interval(width)
            si = _sqrt_interval(p, bits)
            t = _imul(_imul(ci, si), (q, q))
            lo, hi = lo + t[0], hi + t[1]
        return lo, hi

    def sign(self, e: VElem) -> int:
        if not self.cfg.ordered:
            raise EngineError("the order is only available in ordered mode")
        if e.is_zero():
            return 0
        bits = 32
        while bits <= self.cfg.limits.bits:
            lo, hi = self._interval(e, bits)
            if lo > 0:
                return 1
            if hi < 0:
                return -1
            bits *= 2
        raise ResourceLimit("sign refinement exceeded the bit limit")

    def approx(self, e: VElem, bits: int = 96) -> Fraction:
        lo, hi = self._interval(e, bits)
        return (lo + hi) / 2

    def snapshot(self) -> dict:
        out = {
            "field": self.spec.describe(),
            "ring": self.ring.describe(),
            "ordered": self.cfg.ordered,
            "h": list(self.h),
            "v": list(self.v),
            "elements": {k: self.names[k].to_json() for k in sorted(self.names)},
        }
        if self.cfg.ordered:
            out["real_values"] = {g: {"q": str(q), "sqrt": p} for g, (q, p) in sorted(self.real.items(), key=lambda kv: _gen_key(kv[0]))}
        return out


def load_model(data: Mapping, cfg: Optional[EngineConfig] = None) -> ModelHandle:
    """Rebuild a model from snapshot() output; the configuration must agree with it."""
    m = ModelHandle(cfg)
    for key, have in (("field", m.spec.describe()), ("ring", m.ring.describe()), ("ordered", m.cfg.ordered)):
        if key in data and data[key] != have:
            raise EngineError(f"snapshot {key} {data[key]!r} does not match the configuration ({have!r})")
    real = data.get("real_values", {})
    gens = [("h", g) for g in data.get("h", [])] + [("v", g) for g in data.get("v", [])]
    for kind, g in sorted(gens, key=lambda kg: _gen_key(kg[1])):
        if not re.fullmatch(rf"{kind}\d+", g):
            raise EngineError(f"bad generator name {g!r}")
        (m.h if kind == "h" else m.v).append(g)
        m._counter = max(m._counter, int(g[1:]))
        if m.cfg.ordered:
            if g in real:
                p = int(real[g]["sqrt"])
                m.real[g] = (Fraction(real[g]["q"]), p)
                m._bad_primes.add(p)
            else:
                m.real[g] = (Fraction(1), m._next_prime())
    for name, coeffs in data.get("elements", {}).items():
        e = VElem(m.spec, {g: parse_scalar(str(c), m.spec) for g, c in coeffs.items()})
        unknown = [g for g in e.coeffs if not m.is_gen(g)]
        if unknown:
            raise EngineError(f"element {name!r} uses unknown generators {unknown}")
        m.bind(name, e)
    return m


def new_model(cfg: Optional[EngineConfig] = None, n_h: int = 0, n_v: int = 0) -> ModelHandle:
    m = ModelHandle(cfg)
    if n_h:
        m.fresh_G(n_h)
    if n_v:
        m.fresh_generic(n_v)
    return m


# ---------------------------------------------------------------- evaluation


def eval_lin(lin: Lin, assignment: Mapping, model: ModelHandle) -> VElem:
    acc = VElem(model.spec)
    for a, c in lin.terms:
        if isinstance(a, VarAtom):
            val = model.lookup(a.name, assignment)
        else:
            arg = eval_lin(a.arg, assignment, model)
            parts = model.decompose(arg, a.lams)
            val = parts[a.index - 1] if parts is not None else VElem(model.spec)
        acc = acc + val.scale(c)
    return acc


def eval_term(t: Term, assignment: Mapping, model: ModelHandle) -> VElem:
    return eval_lin(linearize(t, model.spec), assignment, model)


def eval_qfree(f: Formula, assignment: Mapping, model: ModelHandle) -> bool:
    """Exact truth value of a quantifier-free formula in the model."""
    if isinstance(f, Top):
        return True
    if isinstance(f, Bottom):
        return False
    if isinstance(f, Not):
        return not eval_qfree(f.body, assignment, model)
    if isinstance(f, And):
        return eval_qfree(f.left, assignment, model) and eval_qfree(f.right, assignment, model)
    if isinstance(f, Or):
        return eval_qfree(f.left, assignment, model) or eval_qfree(f.right, assignment, model)
    ev = lambda t: eval_term(t, assignment, model)  # noqa: E731
    if isinstance(f, Eq):
        return (ev(f.left) - ev(f.right)).is_zero()
    if isinstance(f, Lt):
        return model.sign(ev(f.right) - ev(f.left)) > 0
    if isinstance(f, InG):
        return model.in_G(ev(f.term))
    if isinstance(f, InGl):
        return model.decompose(ev(f.term), f.lams) is not None
    if isinstance(f, PP):
        gs = [model.to_gvector(ev(t)) for t in f.args]
        if any(g is None for g in gs):
            return False
        return eval_pp(f.pp, gs, model.ring)
    raise EngineError(f"cannot evaluate {type(f).__name__} without eliminating quantifiers")


# ---------------------------------------------------------------- witnesses


def _eval_clause(lits, assignment, model) -> bool:
    from .qe import lit_to_formula

    return all(eval_qfree(lit_to_formula(l, model.cfg), assignment, model) for l in lits)


def _fm_point(cons: list, nvars: int) -> Optional[list[Fraction]]:
    """Rational t with 0 < c0 + sum c_b t_b for every (c0, [c_b]) in cons."""
    levels = [cons]
    cur = cons
    for b in reversed(range(nvars)):
        lower, upper, rest = [], [], []
        for c0, cs in cur:
            a = cs[b]
            (rest if a == 0 else lower if a > 0 else upper).append((c0, cs))
        new = list(rest)
        for p0, pc in lower:
            for q0, qc in upper:
                ap, aq = pc[b], qc[b]
                new.append((p0 * -aq + q0 * ap, [x * -aq + y * ap for x, y in zip(pc, qc)]))
        cur = new
        levels.append(cur)
    if any(c0 <= 0 for c0, _ in cur):
        return None
    t = [Fraction(0)] * nvars
    for b in range(nvars):
        cons_b = levels[nvars - 1 - b]
        lo, hi = None, None
        for c0, cs in cons_b:
            a = cs[b]
            if a == 0:
                continue
            rest = c0 + sum(cs[i] * t[i] for i in range(b))
            bound = -rest / a
            if a > 0:
                lo = bound if lo is None else max(lo, bound)
            else:
                hi = bound if hi is None else min(hi, bound)
        t[b] = _pick(lo, hi)
    return t


def _pick(lo, hi) -> Fraction:
    if lo is None and hi is None:
        return Fraction(1)
    if lo is None:
        return hi - 1
    if hi is None:
        return lo + 1
    return (lo + hi) / 2


def _module_witness(leaf, assignment, model: ModelHandle, env_extra: dict) -> Optional[dict]:
    """Values of the G-variables for a module leaf, or None."""
    from .qe import _collect, _matrix, _y_lattice, _Ctx

    mod = leaf.module
    ys = mod.ys
    ws, zs = _collect(mod.pos_rows, ys)
    wvals = []
    for w in ws:
        gv = model.to_gvector(eval_lin(w, assignment, model))
        if gv is None:
            return None
        wvals.append(gv)
    y0: list[dict] = [dict() for _ in ys]
    if mod.pos_rows:
        My = _matrix(mod.pos_rows, ys, "y")
        Mz = _matrix(mod.pos_rows, zs, "z")
        Mw = _matrix(mod.pos_rows, ws, "w")
        M = [a + b for a, b in zip(My, Mz)]
        support = sorted({g for w in wvals for g in w.support()}, key=_gen_key)
        for g in support:
            rhs = [-sum(Fraction(Mw[r][j]) * wvals[j][g] for j in range(len(ws))) for r in range(len(M))]
            sol = solve_over(M, rhs, model.ring.contains, cols=len(ys) + len(zs))
            if sol is None:
                return None
            for i in range(len(ys)):
                if sol[i]:
                    y0[i][g] = sol[i]
    yvals = [VElem(model.spec, d) for d in y0]
    need_fresh = bool(mod.dropped) or bool(mod.lts)
    if need_fresh:
        basis = _y_lattice(mod.pos_rows, ys, _Ctx(model.cfg))
        values = None
        if mod.lts and model.cfg.ordered:
            env = dict(assignment)
            env.update({y: v for y, v in zip(ys, yvals)})
            cons = []
            for L in mod.lts:
                c0 = model.approx(eval_lin(L, env, model))
                cs = []
                for e in basis:
                    coef = sum((L.var_coeff(y) * e[i] for i, y in enumerate(ys)), model.spec.zero())
                    cs.append(coef.approx(96) if not coef.is_zero() else Fraction(0))
                cons.append((c0, cs))
            values = _fm_point(cons, len(basis))
            if values is None:
                return None
        fresh = model.fresh_G(len(basis), values)
        for e, h in zip(basis, fresh):
            for i in range(len(ys)):
                if e[i]:
                    yvals[i] = yvals[i] + h.scale(e[i])
    return {y: v for y, v in zip(ys, yvals)}


def _generic_witness(leaf, assignment, model: ModelHandle) -> VElem:
    if leaf.bounds is None or not model.cfg.ordered:
        return model.fresh_generic(1)[0]
    lows, ups = leaf.bounds
    lo = max((model.approx(eval_lin(b, assignment, model)) for b in lows), default=None)
    hi = min((model.approx(eval_lin(b, assignment, model)) for b in ups), default=None)
    return model.fresh_generic(1, [_pick(lo, hi)])[0]


def witness(f: Exists, model: ModelHandle, assignment: Optional[Mapping] = None) -> VElem:
    """An element realizing the body of f, validated by evaluation; NoWitness otherwise."""
    from .qe import _leaf_clauses, leaves_for

    if not isinstance(f, Exists) or not is_quantifier_free(f.body):
        raise EngineError("witness expects exists x . <quantifier-free formula>")
    assignment = dict(assignment or {})
    x = f.var
    for leaf in leaves_for(f, model.cfg):
        if not any(cl is not None and _eval_clause(cl, assignment, model) for cl in _leaf_clauses(leaf)):
            continue
        cand: Optional[VElem] = None
        if leaf.tag == "Substitution":
            cand = eval_lin(leaf.x_expr, assignment, model)
        elif leaf.tag == "Step3-Generic":
            cand = _generic_witness(leaf, assignment, model)
        elif leaf.module is not None:
            yv = _module_witness(leaf, assignment, model, {})
            if yv is None:
                continue
            env = dict(assignment)
            env.update(yv)
            cand = eval_lin(leaf.x_expr, env, model)
        if cand is None:
            continue
        env = dict(assignment)
        env[x] = cand
        if eval_qfree(f.body, env, model):
            return cand
    raise NoWitness(f"no witness for exists {x}")


# ---------------------------------------------------------------- linear algebra over F


def _frref(rows: list[list[FieldElem]]) -> tuple[list[list[FieldElem]], list[int]]:
    A = [list(r) for r in rows]
    piv = []
    r = 0
    ncols = len(A[0]) if A else 0
    for c in range(ncols):
        p = next((i for i in range(r, len(A)) if not A[i][c].is_zero()), None)
        if p is None:
            continue
        A[r], A[p] = A[p], A[r]
        inv = A[r][c].inverse()
        A[r] = [x * inv for x in A[r]]
        for i in range(len(A)):
            if i != r and not A[i][c].is_zero():
                f = A[i][c]
                A[i] = [a - f * b for a, b in zip(A[i], A[r])]
        piv.append(c)
        r += 1
    return A[:r], piv


def _vecs(elems: Sequence[VElem], gens: list, spec: FieldSpec) -> list[list[FieldElem]]:
    return [[e[g] for g in gens] for e in elems]


def _gens_of(elems: Iterable[VElem], model: ModelHandle) -> tuple[list, list]:
    sup = {g for e in elems for g in e.support()}
    hs = sorted((g for g in sup if g in model.h), key=_gen_key)
    vs = sorted((g for g in sup if g not in model.h), key=_gen_key)
    return hs, vs


def _qspace_in_G(elems: Sequence[VElem], model: ModelHandle, hs: list, vs: list) -> list[list[Fraction]]:
    """Q-basis of span_F(elems) intersected with Q^H (rational combinations of h-generators)."""
    spec = model.spec
    d = spec.degree
    powers = [spec.one()]
    for _ in range(1, d):
        powers.append(powers[-1] * spec.gen())
    rows = []
    for e in elems:
        for p in powers:
            pe = e.scale(p)
            rows.append(pe)
    if not rows:
        return []
    keep = [(g, 0) for g in hs]
    zero = [(g, k) for g in hs for k in range(1, d)] + [(g, k) for g in vs for k in range(d)]
    Z = [[r[g].coords[k] for g, k in zero] for r in rows]
    K = [[r[g].coords[k] for g, k in keep] for r in rows]
    if zero:
        lk = left_kernel(Z, rows=len(rows))
    else:
        lk = [[Fraction(int(i == j)) for j in range(len(rows))] for i in range(len(rows))]
    out = []
    for t in lk:
        v = [sum(t[i] * K[i][j] for i in range(len(rows))) for j in range(len(hs))]
        if any(v):
            out.append(v)
    return out


def _int_rows(vs: list[list[Fraction]]) -> list[list[int]]:
    out = []
    for v in vs:
        den = common_denominator(v)
        out.append([int(x * den) for x in v])
    return out


def _g_lattice(elems: Sequence[VElem], model: ModelHandle, hs: list) -> list[tuple[int, ...]]:
    """Integer basis of G(span_F(elems)) over the given h-generators (saturated)."""
    _, vs = _gens_of(elems, model)
    qs = _qspace_in_G(elems, model, hs, vs)
    return saturation(_int_rows(qs), len(hs)) if qs else []


@dataclass
class Closure:
    """Basis of the closure <B> and an R-basis of its G-part."""

    basis: list
    g_part: list
    dim: int

    def to_json(self) -> dict:
        return {
            "dimension": self.dim,
            "basis": [b.text() for b in self.basis],
            "g_part": [repr(g) for g in self.g_part],
        }


def closure(elems: Sequence[VElem], model: ModelHandle) -> Closure:
    """F-span of elems together with every f-extraction; one extraction round is a fixed point."""
    spec = model.spec
    elems = [e for e in elems if not e.is_zero()]
    if not elems:
        return Closure([], [], 0)
    hs, vs = _gens_of(elems, model)
    gens = hs + vs
    B, _ = _frref(_vecs(elems, gens, spec))
    # elements of the span without generic part
    vcols = [gens.index(g) for g in vs]
    Bv = [[row[c] for c in vcols] for row in B]
    if vcols:
        comb = _f_left_kernel(Bv, len(B), spec)
    else:
        comb = [[spec.const(int(i == j)) for j in range(len(B))] for i in range(len(B))]
    U: list[list[Fraction]] = []
    for xi in comb:
        vec = [sum((xi[i] * B[i][c] for i in range(len(B))), spec.zero()) for c in range(len(hs))]
        for k in range(spec.degree):
            u = [x.coords[k] for x in vec]
            if any(u):
                U.append(u)
    rows = [list(r) for r in B] + [[spec.const(x) for x in u] + [spec.zero()] * len(vs) for u in U]
    C, _ = _frref(rows)
    basis = [VElem(spec, {g: c for g, c in zip(gens, r)}) for r in C]
    lat = saturation(_int_rows(U), len(hs)) if U else []
    gpart = [GVector({g: c for g, c in zip(hs, r) if c}) for r in lat]
    return Closure(basis, gpart, len(C))


def _f_left_kernel(M: list[list[FieldElem]], nrows: int, spec: FieldSpec) -> list[list[FieldElem]]:
    """Basis of {xi : xi M = 0} over F."""
    if not M or not M[0]:
        return [[spec.const(int(i == j)) for j in range(nrows)] for i in range(nrows)]
    T = [[M[i][j] for i in range(nrows)] for j in range(len(M[0]))]
    R, piv = _frref(T)
    free = [c for c in range(nrows) if c not in piv]
    out = []
    for fcol in free:
        v = [spec.zero()] * nrows
        v[fcol] = spec.one()
        for r, pc in enumerate(piv):
            v[pc] = -R[r][fcol]
        out.append(v)
    return out


def _frank(elems: Sequence[VElem], model: ModelHandle) -> int:
    elems = [e for e in elems if not e.is_zero()]
    if not elems:
        return 0
    hs, vs = _gens_of(elems, model)
    B, _ = _frref(_vecs(elems, hs + vs, model.spec))
    return len(B)


def g_independent(A: Sequence[VElem], model: ModelHandle) -> bool:
    """span_F(A) is closed under the f-extractions."""
    return closure(A, model).dim == _frank(A, model)


def is_closed(A: Sequence[VElem], model: ModelHandle) -> bool:
    return g_independent(A, model)


def g_basis(a: Sequence[VElem], C: Sequence[VElem], model: ModelHandle) -> list[VElem]:
    """G-elements of <aC> completing a basis of G(<C>) (over Q) to one of G(<aC>)."""
    if not is_closed(C, model):
        raise CNotIndependent("the base set is not closed under the f-extractions")
    big = closure(list(a) + list(C), model)
    small = closure(list(C), model)
    hs = sorted({g for v in big.g_part + small.g_part for g in v.support()}, key=_gen_key)
    from .intlinalg import rank

    cur = [[v[g] for g in hs] for v in small.g_part]
    out = []
    for v in big.g_part:
        row = [v[g] for g in hs]
        grows = rank(cur + [row]) > rank(cur) if cur else any(row)
        if grows:
            cur.append(row)
            out.append(VElem.from_gvector(model.spec, v))
    return out


# ---------------------------------------------------------------- type equality


@dataclass
class TypeComparison:
    equal: bool
    explanation: str

    def __bool__(self) -> bool:
        return self.equal


def _tuple_data(a: Sequence[VElem], model: ModelHandle):
    spec = model.spec
    n = len(a)
    hs, vs = _gens_of(a, model)
    gens = hs + vs
    rows = _vecs(a, gens, spec) if gens else [[] for _ in a]
    relations = _f_left_kernel(rows, n, spec) if gens else [[spec.const(int(i == j)) for j in range(n)] for i in range(n)]
    rel_rref, _ = _frref(relations) if relations else ([], [])
    vcols = [gens.index(g) for g in vs]
    Bv = [[r[c] for c in vcols] for r in rows]
    P = _f_left_kernel(Bv, n, spec) if vcols else [[spec.const(int(i == j)) for j in range(n)] for i in range(n)]
    P, _ = _frref(P) if P else ([], [])
    comps = []
    for xi in P:
        vec = [sum((xi[i] * rows[i][c] for i in range(n)), spec.zero()) for c in range(len(hs))]
        for k in range(spec.degree):
            comps.append((xi, k, [x.coords[k] for x in vec]))
    return rel_rref, P, comps, hs


def _xi_name(xi: Sequence[FieldElem], spec: FieldSpec) -> str:
    from .linear import print_lin

    lin = Lin(spec, [(VarAtom(f"x{i + 1}"), c) for i, c in enumerate(xi)])
    return print_lin(lin)


def _comp_name(xi, k: int, spec: FieldSpec) -> str:
    base = _xi_name(xi, spec)
    if spec.degree == 1:
        return base
    lams = ", ".join(["1"] + [("a" if e == 1 else f"a^{e}") for e in range(1, spec.degree)])
    return f"f[{lams}; {k + 1}]({base})"


def types_equal(a: Sequence[VElem], model_a: ModelHandle, b: Sequence[VElem], model_b: ModelHandle) -> TypeComparison:
    """Do the tuples have the same type?  The explanation names the first difference."""
    if len(a) != len(b):
        return TypeComparison(False, "tuples have different lengths")
    spec = model_a.spec
    ra, Pa, ca, hsa = _tuple_data(a, model_a)
    rb, Pb, cb, hsb = _tuple_data(b, model_b)
    if ra != rb:
        return TypeComparison(False, "different F-linear relations")
    for i, (x, y) in enumerate(zip(a, b)):
        if model_a.in_G(x) != model_b.in_G(y):
            return TypeComparison(False, f"G(x{i + 1})")
    if Pa != Pb:
        return TypeComparison(False, "different intersection with span_F(G)")
    # rational component vectors: compare the R-modules spanned by their coordinate columns
    den = common_denominator([x for _, _, u in ca + cb for x in u])
    ga = [GVector({g: den * x for g, x in zip(hsa, u) if x}) for _, _, u in ca]
    gb = [GVector({g: den * x for g, x in zip(hsb, u) if x}) for _, _, u in cb]
    names = [_comp_name(xi, k, spec) for xi, k, _ in ca]
    ta = canonical_pp_type(ga, model_a.ring, model_a.cfg.limits.pp_bound)
    tb = canonical_pp_type(gb, model_b.ring, model_b.cfg.limits.pp_bound)
    if ta != tb:
        diff = describe_pp_difference(ta, tb, names, model_a.ring)
        if den != 1:
            diff += f" (components scaled by {den})"
        return TypeComparison(False, diff)
    if model_a.cfg.ordered:
        diff = _order_difference(a, model_a, b, model_b)
        if diff:
            return TypeComparison(False, diff)
    return TypeComparison(True, "same type")


def _order_difference(a, ma: ModelHandle, b, mb: ModelHandle, box: int = 2) -> Optional[str]:
    """Sign comparison of small combinations (a bounded check of the order type)."""
    spec = ma.spec
    scal = [spec.const(k) for k in range(-box, box + 1)]
    if spec.degree > 1:
        scal += [spec.gen() * k for k in (-1, 1)]
    n = len(a)
    if n > 3:
        scal = [spec.const(k) for k in (-1, 0, 1)]
    for coefs in product(scal, repeat=n):
        if all(c.is_zero() for c in coefs):
            continue
        ea = VElem(spec)
        eb = VElem(spec)
        for c, x, y in zip(coefs, a, b):
            ea = ea + x.scale(c)
            eb = eb + y.scale(c)
        sa, sb = ma.sign(ea), mb.sign(eb)
        if sa != sb:
            rel = {1: "0 < ", -1: "0 > ", 0: "0 = "}[sa]
            return f"order: {rel}{_xi_name(coefs, spec)}"
    return None


# ---------------------------------------------------------------- axiom checks


@dataclass
class AxiomReport:
    freeness_samples: int = 0
    freeness_violations: list = field(default_factory=list)
    density_passes: int = 0
    density_failures: list = field(default_factory=list)
    codensity_passes: int = 0
    codensity_failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not (self.freeness_violations or self.density_failures or self.codensity_failures)

    def to_json(self) -> dict:
        return {
            "freeness": {"samples": self.freeness_samples, "violations": self.freeness_violations},
            "density": {"constructive_passes": self.density_passes, "failures": self.density_failures},
            "codensity": {"constructive_passes": self.codensity_passes, "failures": self.codensity_failures},
            "ok": self.ok,
        }


def _random_scalar(rng: random.Random, spec: FieldSpec, bound: int = 3) -> FieldElem:
    coords = []
    for _ in range(spec.degree):
        p = rng.randint(-bound, bound)
        q = rng.randint(1, bound)
        coords.append(Fraction(p, q))
    return spec.elem(coords)


def check_axioms(model: ModelHandle, samples: int = 10_000, box: int = 3, generators: int = 3,
                 max_len: int = 3, lams: Optional[Sequence[Sequence[FieldElem]]] = None,
                 seed: int = 0) -> AxiomReport:
    """Bounded freeness check plus constructive density and codensity passes."""
    from .exactnum import is_independent
    from .formulas import parse

    rng = random.Random(seed)
    spec = model.spec
    rep = AxiomReport()
    while len(model.h) < generators:
        model.fresh_G(1)
    hs = [model.gen(g) for g in model.h[:generators]]
    fixed = [tuple(t) for t in lams] if lams else None
    attempts = 0
    while rep.freeness_samples < samples and attempts < 20 * samples:
        attempts += 1
        if fixed:
            lam = fixed[attempts % len(fixed)]
        else:
            k = rng.randint(1, max_len)
            lam = tuple(_random_scalar(rng, spec) for _ in range(k))
            if not is_independent(lam):
                continue
        gs = []
        for _ in lam:
            coeffs = {h.support()[0]: rng.randint(-box, box) for h in hs}
            gs.append(VElem(spec, coeffs))
        if rng.random() < 0.1 and len(gs) > 1:
            gs = [VElem(spec)] * len(gs)  # exercise the trivial relation too
        total = VElem(spec)
        for l_, g in zip(lam, gs):
            total = total + g.scale(l_)
        rep.freeness_samples += 1
        if total.is_zero() and not all(g.is_zero() for g in gs):
            rep.freeness_violations.append({
                "lambda": [scalar_text(x) for x in lam],
                "g": [g.text() for g in gs],
            })
    # density: x in rG satisfying base inequations and, when ordered, an interval
    base = {"c": hs[0]}
    if len(hs) > 1:
        base["d"] = hs[0] + hs[1].scale(spec.gen() if spec.degree > 1 else 2)
    conds = ["~(x = c)", "~(x = 0) /\\ ~(x = c)", "~(x = d)"]
    if model.cfg.ordered:
        conds += ["c < x", "x < c /\\ 0 < x", "c < x /\\ x < d"]
    for r in (1, 2, 3):
        for text in conds:
            if "d" in text and "d" not in base:
                continue
            f = parse(f"exists x . Gl[{r}](x) /\\ ({text})", model.cfg)
            try:
                w = witness(f, model, base)
                ok = eval_qfree(f.body, {**base, "x": w}, model)
            except (NoWitness, EngineError) as e:  # pragma: no cover - reported, not raised
                ok, w = False, None
            if ok:
                rep.density_passes += 1
            else:
                rep.density_failures.append({"r": r, "condition": text})
    # codensity: a point outside span_F(G + params)
    for text in ["~(x = 0)", "~(x = c)", "~Gl[1](x - c)"] + (["c < x", "x < c"] if model.cfg.ordered else []):
        f = parse(f"exists x . {text}", model.cfg)
        try:
            w = witness(f, model, base)
            ok = eval_qfree(f.body, {**base, "x": w}, model) and any(g in model.v for g in w.support())
        except (NoWitness, EngineError):  # pragma: no cover
            ok = False
        if ok:
            rep.codensity_passes += 1
        else:
            rep.codensity_failures.append({"condition": text})
    return rep


# ---------------------------------------------------------------- half-graph probe


@dataclass
class ProbeReport:
    samples: int
    hypotheses_met: int
    violations: list

    def to_json(self) -> dict:
        return {"samples": self.samples, "hypotheses_met": self.hypotheses_met, "violations": self.violations}


def halfgraph_probe(model: ModelHandle, samples: int = 10_000, box: int = 5, seed: int = 0) -> ProbeReport:
    """If c1-d2, c1-d3, c2-d3 lie in G then so does c2-d2, on sampled quadruples."""
    rng = random.Random(seed)
    spec = model.spec
    while len(model.h) < 4:
        model.fresh_G(1)
    while len(model.v) < 2:
        model.fresh_generic(1)
    hs = model.h[:4]
    vs = model.v[:2]

    def rand_elem() -> VElem:
        d = {g: rng.randint(-box, box) for g in hs}
        for g in vs:
            d[g] = Fraction(rng.randint(-box, box), rng.randint(1, 3))
        return VElem(spec, d)

    def rand_g() -> VElem:
        return VElem(spec, {g: rng.randint(-box, box) for g in hs})

    met = 0
    bad = []
    for _ in range(samples):
        c1 = rand_elem()
        mode = rng.random()
        d2 = c1 - rand_g() if mode < 0.7 else rand_elem()
        d3 = c1 - rand_g() if mode < 0.8 else rand_elem()
        c2 = d3 + rand_g() if rng.random() < 0.7 else rand_elem()
        if model.in_G(c1 - d2) and model.in_G(c1 - d3) and model.in_G(c2 - d3):
            met += 1
            if not model.in_G(c2 - d2):
                bad.append({"c1": c1.text(), "c2": c2.text(), "d2": d2.text(), "d3": d3.text()})
    return ProbeReport(samples, met, bad)


# ---------------------------------------------------------------- independence relation


@dataclass
class IndepResult:
    independent: bool
    failed: Optional[int]
    detail: str = ""

    def __iter__(self):
        yield self.independent
        yield self.failed


def indep_G(a: Sequence[VElem], V0: Sequence[VElem], D: Sequence[VElem], model: ModelHandle,
            moduli_bound: int = 12) -> IndepResult:
    """Check the three conditions of the G-independence relation; report the first failure."""
    if not is_closed(V0, model):
        raise NotClosed("V0 is not closed")
    if not is_closed(D, model):
        raise NotClosed("D is not closed")
    if _frank(list(V0) + list(D), model) != _frank(D, model):
        raise NotClosed("V0 is not contained in D")
    # (1) linear independence of <V0 a> from D over V0
    A = closure(list(a) + list(V0), model).basis
    dim_a, dim_d = _frank(A, model), _frank(D, model)
    dim_ad = _frank(list(A) + list(D), model)
    dim_v0 = _frank(V0, model)
    if dim_a + dim_d - dim_ad != dim_v0:
        return IndepResult(False, 1, "span of a over V0 meets D outside V0")
    everything = list(A) + list(D)
    hs, _ = _gens_of(everything, model)
    n = len(hs)
    ga = _g_lattice(A, model, hs)
    gd = _g_lattice(D, model, hs)
    gv = _g_lattice(V0, model, hs)
    member = model.ring.contains
    # (2) heir criterion for the G-part
    cands = [list(v) for v in ga]
    cands += [[x + y for x, y in zip(u, w)] for i, u in enumerate(ga) for w in ga[i + 1:]]
    cands += [[x - y for x, y in zip(u, w)] for i, u in enumerate(ga) for w in ga[i + 1:]]
    unit = [[int(i == j) for j in range(n)] for i in range(n)]
    for s in [0] + list(range(2, moduli_bound + 1)):
        sg = [[s * x for x in u] for u in unit] if s else []
        for g in cands:
            if not any(g):
                continue
            in_d = lattice_contains(list(gd) + sg, [g], n, member)
            in_v0 = lattice_contains(list(gv) + sg, [g], n, member)
            if in_d and not in_v0:
                gtxt = VElem.from_gvector(model.spec, GVector({h: c for h, c in zip(hs, g) if c})).text()
                where = "G(D)" if s == 0 else f"G(D) + {s}G"
                return IndepResult(False, 2, f"{gtxt} lies in {where} but not in the matching coset over V0")
    # (3) G(<aV0> + D) = G(<aV0>) + G(D)
    gsum = _g_lattice(everything, model, hs)
    parts = lattice_hnf(list(ga) + list(gd), n) if (ga or gd) else []
    if not lattice_contains(parts, gsum, n, member):
        return IndepResult(False, 3, "G(<aV0> + D) is larger than G(<aV0>) + G(D)")
    return IndepResult(True, None, "independent")

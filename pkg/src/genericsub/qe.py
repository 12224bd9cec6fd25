"""Quantifier elimination for F-vector spaces with a generic R-submodule G.

One existential quantifier is eliminated clause by clause over a
disjunctive normal form.

Stage X works on the bound variable x:
  * an f-application f_{lam,k}(beta x + s) splits into the branch where its
    argument lies in G_lam (then x = (sum lam_j y_j - s)/beta with fresh
    G-variables y) and the branch where the application is 0;
  * a positive equation in x is solved for x (Substitution);
  * a positive G-literal or pp-literal on an x-term parametrizes x by fresh
    G-variables (Step1-InG / Step2-SpanGB);
  * otherwise x is taken generic over G and the parameters (Step3-Generic).

Stage Y removes the G-variables: every literal becomes a pp-condition on
the G-variables and on G-valued parameter terms w, and the existential over
G^m is decided in the free R-module of infinite rank.  A negative
condition whose homogeneous lattice does not contain the positive one has
infinite index and is dropped; this is the only place the free-module
profile of G is used and it is flagged in the trace.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import count
from typing import Any, Iterable, Optional, Sequence

from .config import EngineConfig
from .errors import ResourceLimit, UnboundConstant, UnsupportedBaseAtom
from .exactnum import FieldElem, common_denominator
from .formulas import (
    FALSE,
    TRUE,
    ZERO,
    And,
    Atom,
    Bottom,
    Eq,
    Exists,
    Forall,
    Formula,
    InG,
    InGl,
    Lt,
    Not,
    Or,
    PP,
    PPConstraint,
    Top,
    conj,
    disj,
    dnf_clauses,
    free_vars,
    is_quantifier_free,
    nnf,
    parse,
    print_formula,
)
from .intlinalg import integer_kernel, lattice_contains, left_kernel, localize_lattice
from .linear import FAtom, Lin, VarAtom, linearize, simplifier, to_term
from .mordell import gl_decompose, member_translation

# ---------------------------------------------------------------- literals


@dataclass(frozen=True)
class Row:
    """sum y_i*a_i + sum w_j*b_j + sum z_k*c_k = 0 with integer coefficients."""

    y: tuple
    w: tuple
    z: tuple


@dataclass(frozen=True)
class Group:
    """exists z in G (every row); z names are local to the group."""

    rows: tuple

    def znames(self) -> list:
        out: list = []
        for r in self.rows:
            for z, _ in r.z:
                if z not in out:
                    out.append(z)
        return out


@dataclass(frozen=True)
class Lit:
    kind: str  # eq | lt | gl | pp | grp
    pos: bool
    lin: Optional[Lin] = None
    mu: tuple = ()
    pp: Optional[PPConstraint] = None
    args: tuple = ()
    group: Optional[Group] = None

    def lins(self) -> list:
        if self.kind in ("eq", "lt", "gl"):
            return [self.lin]
        if self.kind == "pp":
            return list(self.args)
        return []

    def map(self, fn) -> "Lit":
        if self.kind in ("eq", "lt", "gl"):
            return Lit(self.kind, self.pos, fn(self.lin), self.mu)
        if self.kind == "pp":
            return Lit("pp", self.pos, pp=self.pp, args=tuple(fn(a) for a in self.args))
        return self

    def negate(self) -> "Lit":
        return Lit(self.kind, not self.pos, self.lin, self.mu, self.pp, self.args, self.group)

    def vars(self) -> set:
        out: set = set()
        for l in self.lins():
            out |= l.vars()
        if self.group is not None:
            for r in self.group.rows:
                out |= {y for y, _ in r.y}
                for w, _ in r.w:
                    out |= w.vars()
        return out

    def mentions(self, names) -> bool:
        names = {names} if isinstance(names, str) else set(names)
        return bool(self.vars() & names)


def lit_of_atom(a: Atom, pos: bool, cfg: EngineConfig) -> Lit:
    spec = cfg.field
    if isinstance(a, Eq):
        return Lit("eq", pos, linearize(a.left, spec) - linearize(a.right, spec))
    if isinstance(a, Lt):
        return Lit("lt", pos, linearize(a.right, spec) - linearize(a.left, spec))
    if isinstance(a, InG):
        return Lit("gl", pos, linearize(a.term, spec), (spec.one(),))
    if isinstance(a, InGl):
        return Lit("gl", pos, linearize(a.term, spec), tuple(a.lams))
    if isinstance(a, PP):
        return Lit("pp", pos, pp=a.pp, args=tuple(linearize(t, spec) for t in a.args))
    raise UnsupportedBaseAtom(f"unsupported atom {a!r}")


def _lead_normalized(lin: Lin, ordered: bool) -> Lin:
    c = lin.lead()
    if c is None:
        return lin
    if ordered:
        return lin.scale((c if c.sign() > 0 else -c).inverse())
    return lin.scale(c.inverse())


def lit_to_formula(l: Lit, cfg: EngineConfig) -> Formula:
    if l.kind == "eq":
        a: Formula = Eq(to_term(_lead_normalized(l.lin, False)), ZERO)
    elif l.kind == "lt":
        a = Lt(ZERO, to_term(_lead_normalized(l.lin, True)))
    elif l.kind == "gl":
        a = InGl(l.mu, to_term(l.lin))
    elif l.kind == "pp":
        a = PP(l.pp, tuple(to_term(x) for x in l.args))
    else:  # pragma: no cover
        raise ValueError("module groups never reach the output")
    return a if l.pos else Not(a)


def simplify_lit(l: Lit, cfg: EngineConfig, gvars=frozenset()):
    """True, False or a (possibly rewritten) literal."""
    ring = cfg.ring
    simp = simplifier(ring, frozenset(gvars))
    if l.kind in ("eq", "lt", "gl", "pp"):
        l = l.map(lambda x: x.map_atoms(lambda a: simp(a) if isinstance(a, FAtom) else Lin.atom(x.spec, a)))
    verdict = None
    if l.kind == "eq":
        if l.lin.is_zero():
            verdict = True
    elif l.kind == "lt":
        if l.lin.is_zero():
            verdict = False
    elif l.kind == "gl":
        if l.lin.is_zero() or gl_decompose(l.mu, l.lin, ring, frozenset(gvars)) is not None:
            verdict = True
    elif l.kind == "pp":
        if all(a.is_zero() for a in l.args):
            verdict = True
    if verdict is None:
        return l
    return verdict if l.pos else (not verdict)


# ---------------------------------------------------------------- clause normalization


def _unit_normalized(c: FieldElem, cfg: EngineConfig) -> FieldElem:
    """Representative of c up to units of R; G_lam only depends on that class."""
    if c.is_rational():
        q = c.rational()
        return cfg.field.const(Fraction(cfg.ring.strip(q.numerator), cfg.ring.strip(q.denominator)))
    first = next(x for x in c.coords if x != 0)
    return -c if first < 0 else c


def normalize_lit(l: Lit, cfg: EngineConfig):
    s = simplify_lit(l, cfg)
    if isinstance(s, bool):
        return s
    if s.kind == "eq":
        s = Lit("eq", s.pos, _lead_normalized(s.lin, False))
    elif s.kind == "lt":
        s = Lit("lt", s.pos, _lead_normalized(s.lin, True))
    elif s.kind == "gl":
        # c*t in G_mu  iff  t in G_{mu/c}
        c = s.lin.lead()
        mu = tuple(_unit_normalized(m / c, cfg) for m in s.mu)
        s = Lit("gl", s.pos, s.lin.scale(c.inverse()), mu)
    return s


def normalize_clause(lits: Iterable[Lit], cfg: EngineConfig) -> Optional[list[Lit]]:
    """Simplified, deduplicated literals sorted by text; None for a false clause."""
    out: dict = {}
    for l in lits:
        s = normalize_lit(l, cfg)
        if s is True:
            continue
        if s is False:
            return None
        out[print_formula(lit_to_formula(s, cfg))] = s
    texts = set(out)
    for t, l in out.items():
        comp = print_formula(lit_to_formula(l.negate(), cfg))
        if comp in texts:
            return None
    return [out[k] for k in sorted(out)]


def clauses_to_formula(clauses: Iterable[Optional[list[Lit]]], cfg: EngineConfig) -> Formula:
    seen: dict = {}
    for cl in clauses:
        if cl is None:
            continue
        if not cl:
            return TRUE
        f = conj(lit_to_formula(l, cfg) for l in cl)
        seen[print_formula(f)] = f
    return disj(seen[k] for k in sorted(seen))


def formula_clauses(f: Formula, cfg: EngineConfig) -> list[list[Lit]]:
    """DNF clauses as literal lists; in ordered mode ~(a<b) becomes b<a or a=b."""
    g = nnf(f)
    if cfg.ordered:
        g = _expand_neg_lt(g)
    out = []
    for cl in dnf_clauses(g, cfg.limits.clauses):
        lits = []
        for lit in cl:
            if isinstance(lit, Not):
                lits.append(lit_of_atom(lit.body, False, cfg))
            else:
                lits.append(lit_of_atom(lit, True, cfg))
        out.append(lits)
    return out


def _expand_neg_lt(f: Formula) -> Formula:
    if isinstance(f, Not) and isinstance(f.body, Lt):
        a, b = f.body.left, f.body.right
        return Or(Lt(b, a), Eq(a, b))
    if isinstance(f, And):
        return And(_expand_neg_lt(f.left), _expand_neg_lt(f.right))
    if isinstance(f, Or):
        return Or(_expand_neg_lt(f.left), _expand_neg_lt(f.right))
    return f


def normalize_qf(f: Formula, cfg: EngineConfig) -> Formula:
    """Canonical disjunctive normal form of a quantifier-free formula."""
    return clauses_to_formula((normalize_clause(cl, cfg) for cl in formula_clauses(f, cfg)), cfg)


# ---------------------------------------------------------------- leaves


@dataclass
class ModuleData:
    ys: list
    ws: list
    pos_rows: list
    neg_groups: list
    kept: list
    dropped: list
    lts: list

    def to_json(self) -> dict:
        return {
            "g_variables": list(self.ys),
            "w_terms": [str(w) for w in self.ws],
            "positive_rows": [_row_json(r, self.ws) for r in self.pos_rows],
            "negative_groups": [[_row_json(r, self.ws) for r in g.rows] for g in self.neg_groups],
            "kept_negatives": list(self.kept),
            "dropped_negatives": list(self.dropped),
            "free_module_profile": bool(self.dropped),
        }


def _row_json(r: Row, ws: list) -> dict:
    return {
        "y": {n: c for n, c in r.y},
        "w": {str(w): c for w, c in r.w},
        "z": {n: c for n, c in r.z},
    }


@dataclass
class Leaf:
    tag: str
    path: list
    result: Optional[list]  # normalized literals, None when false
    x_expr: Optional[Lin] = None
    module: Optional[ModuleData] = None
    bounds: Optional[tuple] = None  # (lower Lins, upper Lins) for a generic x

    def formula(self, cfg: EngineConfig) -> Formula:
        return clauses_to_formula([self.result], cfg)

    def to_json(self, cfg: EngineConfig) -> dict:
        d: dict[str, Any] = {"tag": self.tag, "path": list(self.path), "result": print_formula(self.formula(cfg))}
        if self.x_expr is not None:
            d["x"] = str(self.x_expr)
        if self.module is not None:
            d["module_query"] = self.module.to_json()
        return d


class _Ctx:
    def __init__(self, cfg: EngineConfig):
        self.cfg = cfg
        self.spec = cfg.field
        self.ring = cfg.ring
        self.counter = count(1)
        self.leaves = 0

    def fresh(self, base: str) -> str:
        return f"${base}{next(self.counter)}"

    def bump(self) -> None:
        self.leaves += 1
        if self.leaves > self.cfg.limits.clauses:
            raise ResourceLimit(f"elimination exceeds {self.cfg.limits.clauses} branches")


def _subst_lits(lits: list, mapping: dict, ctx: _Ctx, gvars) -> Optional[list]:
    simp = simplifier(ctx.ring, frozenset(gvars))
    out = []
    for l in lits:
        nl = l.map(lambda x: x.subst(mapping, simp))
        s = simplify_lit(nl, ctx.cfg, gvars)
        if s is True:
            continue
        if s is False:
            return None
        out.append(s)
    return out


def _replace_fatoms(lits: list, targets: dict, ctx: _Ctx, gvars) -> Optional[list]:
    def fn(a):
        if isinstance(a, FAtom) and a in targets:
            return targets[a]
        return Lin.atom(ctx.spec, a)

    simp_out = []
    for l in lits:
        nl = l.map(lambda x: x.map_atoms(fn))
        s = simplify_lit(nl, ctx.cfg, gvars)
        if s is True:
            continue
        if s is False:
            return None
        simp_out.append(s)
    return simp_out


def _first_fatom(lits: list, names: set) -> Optional[FAtom]:
    for l in lits:
        for lin in l.lins():
            for fa in lin.fatoms():
                if fa.arg.top_vars() & names:
                    return fa
    return None


# ---------------------------------------------------------------- Stage X


def _stage_x(lits: list, x: str, ctx: _Ctx, path: list):
    spec = ctx.spec
    fa = _first_fatom(lits, {x})
    if fa is not None:
        beta = fa.arg.var_coeff(x)
        s = fa.arg.without([VarAtom(x)])
        lams = fa.lams
        # branch A: the argument lies in G_lams
        ys = [ctx.fresh("y") for _ in lams]
        comb = Lin(spec, [(VarAtom(y), lam) for y, lam in zip(ys, lams)])
        x_expr = (comb - s).scale(beta.inverse())
        la = _subst_lits(lits, {x: x_expr}, ctx, set(ys))
        if la is not None:
            yield from _stage_y(la, ys, ctx, path + [f"split {fa_text(fa)}: in G_lam"], x_expr, "Step2-SpanGB")
        # branch B: the argument is outside G_lams, every f_{lams,i} of it is 0
        zero = {FAtom(lams, i + 1, fa.arg): Lin(spec) for i in range(len(lams))}
        lb = _replace_fatoms(lits, zero, ctx, set())
        if lb is not None:
            lb = lb + [Lit("gl", False, fa.arg, lams)]
            yield from _stage_x(lb, x, ctx, path + [f"split {fa_text(fa)}: outside G_lam"])
        return
    # no f-application on x is left
    for l in lits:
        if l.kind == "eq" and l.pos and not l.lin.var_coeff(x).is_zero():
            beta = l.lin.var_coeff(x)
            s = l.lin.without([VarAtom(x)])
            x_expr = s.scale(-(beta.inverse()))
            rest = _subst_lits(lits, {x: x_expr}, ctx, set())
            ctx.bump()
            res = normalize_clause(rest, ctx.cfg) if rest is not None else None
            yield Leaf("Substitution", path, res, x_expr=x_expr)
            return
    for l in lits:
        target = None
        if l.kind == "gl" and l.pos and not l.lin.var_coeff(x).is_zero():
            target = (l.mu, l.lin)
        elif l.kind == "pp" and l.pos:
            for a in l.args:
                if not a.var_coeff(x).is_zero():
                    target = ((spec.one(),), a)
                    break
        if target is None:
            continue
        mu, lin = target
        beta = lin.var_coeff(x)
        s = lin.without([VarAtom(x)])
        ys = [ctx.fresh("y") for _ in mu]
        comb = Lin(spec, [(VarAtom(y), m) for y, m in zip(ys, mu)])
        x_expr = (comb - s).scale(beta.inverse())
        tag = "Step1-InG" if (len(mu) == 1 and mu[0] == 1 and lin == Lin.var(spec, x)) else "Step2-SpanGB"
        sub = _subst_lits(lits, {x: x_expr}, ctx, set(ys))
        if sub is None:
            ctx.bump()
            yield Leaf(tag, path, None, x_expr=x_expr)
            return
        yield from _stage_y(sub, ys, ctx, path, x_expr, tag)
        return
    # generic branch
    keep, lts = [], []
    for l in lits:
        if not l.mentions(x):
            keep.append(l)
        elif l.kind == "lt":
            lts.append(l.lin)
        elif l.pos:  # pragma: no cover - positive x-literals were handled above
            raise UnsupportedBaseAtom(f"unexpected positive literal on the bound variable: {l}")
    extra: list[Lit] = []
    bounds = None
    if lts:
        extra, bounds = _fm_eliminate(lts, [x], ctx)
    ctx.bump()
    res = normalize_clause(keep + extra, ctx.cfg)
    yield Leaf("Step3-Generic", path, res, bounds=bounds)


def fa_text(fa: FAtom) -> str:
    from .formulas import print_term

    return print_term(to_term(Lin.atom(fa.arg.spec, fa)))


# ---------------------------------------------------------------- Stage Y


def _stage_y(lits: list, ys: list, ctx: _Ctx, path: list, x_expr: Lin, tag: str):
    gv = set(ys)
    fa = _first_fatom(lits, gv)
    if fa is not None:
        arg = fa.arg
        gam = {y: arg.var_coeff(y) for y in ys if not arg.var_coeff(y).is_zero()}
        s = arg.without([VarAtom(y) for y in ys])
        tr = member_translation(fa.lams, gam, s, ctx.ring)
        grp = _group_of(tr, ctx)
        vals = {FAtom(fa.lams, k, arg): tr.value(k) for k in range(1, len(fa.lams) + 1)}
        zero = {FAtom(fa.lams, k, arg): Lin(ctx.spec) for k in range(1, len(fa.lams) + 1)}
        cond = _cond_lits(tr, True, ctx)
        # A: argument in G_mu
        la = _replace_fatoms(lits, vals, ctx, gv)
        if la is not None:
            extra = cond + ([Lit("grp", True, group=grp)] if grp.rows else [])
            yield from _stage_y(la + extra, ys, ctx, path + [f"split {fa_text(fa)}: in G_mu"], x_expr, tag)
        lz = _replace_fatoms(lits, zero, ctx, gv)
        if lz is not None:
            if cond:
                for c in cond:
                    yield from _stage_y(lz + [c.negate()], ys, ctx, path + [f"split {fa_text(fa)}: parameter part outside"], x_expr, tag)
            if grp.rows:
                yield from _stage_y(lz + cond + [Lit("grp", False, group=grp)], ys, ctx,
                                    path + [f"split {fa_text(fa)}: G-part outside"], x_expr, tag)
        return
    # translate one literal on the G-variables at a time
    for i, l in enumerate(lits):
        if l.kind in ("grp", "lt") or not l.mentions(gv):
            continue
        rest = lits[:i] + lits[i + 1:]
        for alt in _translate(l, ys, ctx):
            yield from _stage_y(rest + alt, ys, ctx, path, x_expr, tag)
        return
    yield _finish_module(lits, ys, ctx, path, x_expr, tag)


def _cond_lits(tr, pos: bool, ctx: _Ctx) -> list:
    if tr.condition == TRUE:
        return []
    return [lit_of_atom(tr.condition, pos, ctx.cfg)]


def _group_of(tr, ctx: _Ctx) -> Group:
    rows = []
    for r in tr.rows:
        z = ()
        if r.dz:
            z = ((ctx.fresh("z"), -r.dz),)
        rows.append(Row(tuple(r.coeffs), tuple((tr.w[i], c) for i, c in r.wcoef), z))
    return Group(tuple(rows))


def _member(mu: tuple, lin: Lin, ys: list, ctx: _Ctx):
    gam = {y: lin.var_coeff(y) for y in ys if not lin.var_coeff(y).is_zero()}
    s = lin.without([VarAtom(y) for y in ys])
    tr = member_translation(mu, gam, s, ctx.ring)
    return tr, _group_of(tr, ctx), _cond_lits(tr, True, ctx)


def _translate(l: Lit, ys: list, ctx: _Ctx) -> list[list[Lit]]:
    """Alternatives (a disjunction of literal lists) equivalent to l over y in G."""
    if l.kind in ("eq", "gl"):
        mu = () if l.kind == "eq" else l.mu
        tr, grp, cond = _member(mu, l.lin, ys, ctx)
        g = [Lit("grp", True, group=grp)] if grp.rows else []
        if l.pos:
            return [cond + g]
        alts = [[c.negate()] for c in cond]
        if grp.rows:
            alts.append(cond + [Lit("grp", False, group=grp)])
        return alts
    if l.kind == "pp":
        pp = l.pp
        conds: list[Lit] = []
        exprs: list[Lin] = []  # each argument as (w + sum D a y)/D
        for a in l.args:
            if not a.mentions(set(ys)):
                conds.append(Lit("gl", True, a, (ctx.spec.one(),)))
                exprs.append(a)
                continue
            tr, grp, cond = _member((ctx.spec.one(),), a, ys, ctx)
            conds.extend(cond)
            if grp.rows:
                conds.append(Lit("grp", True, group=grp))
            exprs.append(tr.value(1))
        zs = [ctx.fresh("z") for _ in range(pp.m)]
        rows = []
        for i in range(pp.n):
            acc = Lin(ctx.spec)
            for j in range(pp.k):
                acc = acc + exprs[j].scale(pp.A[i][j])
            if pp.has_param:
                acc = acc - exprs[pp.k].scale(pp.c[i])
            den = common_denominator(c.rational() for _, c in acc.terms)
            acc = acc.scale(den)
            yco = tuple((y, int(acc.var_coeff(y).rational())) for y in ys if not acc.var_coeff(y).is_zero())
            wpart = acc.without([VarAtom(y) for y in ys])
            w = ((wpart, 1),) if not wpart.is_zero() else ()
            z = tuple((zs[j], den * pp.B[i][j]) for j in range(pp.m) if pp.B[i][j])
            if yco or w or z:
                rows.append(Row(yco, w, z))
        sysg = Group(tuple(rows))
        g = [Lit("grp", True, group=sysg)] if rows else []
        if l.pos:
            return [conds + g]
        alts = [[c.negate()] for c in conds]
        if rows:
            alts.append(conds + [Lit("grp", False, group=sysg)])
        return alts
    raise UnsupportedBaseAtom(f"cannot translate literal kind {l.kind}")


# ---------------------------------------------------------------- module elimination


def _collect(rows: Sequence[Row], ys: list):
    ws: list = []
    zs: list = []
    for r in rows:
        for w, _ in r.w:
            if w not in ws:
                ws.append(w)
        for z, _ in r.z:
            if z not in zs:
                zs.append(z)
    return ws, zs


def _matrix(rows: Sequence[Row], cols: list, part: str) -> list[list[int]]:
    out = []
    for r in rows:
        entries = dict(getattr(r, part))
        out.append([entries.get(c, 0) for c in cols])
    return out


def _y_lattice(rows: Sequence[Row], ys: list, ctx: _Ctx) -> list:
    """Homogeneous solution lattice of the rows projected to the G-variables (over R)."""
    m = len(ys)
    if not rows:
        return [tuple(int(i == j) for j in range(m)) for i in range(m)]
    _, zs = _collect(rows, ys)
    My = _matrix(rows, ys, "y")
    Mz = _matrix(rows, zs, "z")
    M = [a + b for a, b in zip(My, Mz)]
    ker = integer_kernel(M, cols=m + len(zs))
    return localize_lattice([v[:m] for v in ker], m, ctx.ring.strip)


def _w_lattice(rows: Sequence[Row], ys: list, ws: list, ctx: _Ctx) -> list:
    t = len(ws)
    _, zs = _collect(rows, ys)
    Mw = _matrix(rows, ws, "w")
    My = _matrix(rows, ys, "y")
    Mz = _matrix(rows, zs, "z")
    M = [a + b + c for a, b, c in zip(Mw, My, Mz)]
    ker = integer_kernel(M, cols=t + len(ys) + len(zs))
    return localize_lattice([v[:t] for v in ker], t, ctx.ring.strip)


def _projection_lits(rows: Sequence[Row], ys: list, ctx: _Ctx, pos: bool) -> list:
    """Literals expressing (not) exists y in G^m: rows, as a condition on the w-terms."""
    ws, _ = _collect(rows, ys)
    t = len(ws)
    verdict: Optional[bool] = None
    lits: list[Lit] = []
    if t == 0:
        verdict = True
    else:
        L = _w_lattice(rows, ys, ws, ctx)
        full = all(
            lattice_contains(L, [[int(i == j) for j in range(t)]], t, ctx.ring.contains) for i in range(t)
        )
        if full:
            verdict = True
        elif t == 1:
            d = L[0][0] if L else 0
            if d == 0:
                lits = [Lit("eq", True, ws[0])]
            else:
                lits = [Lit("gl", True, ws[0], (ctx.spec.const(d),))]
        elif not L:
            lits = [Lit("eq", True, w) for w in ws]
        else:
            r = len(L)
            A = tuple(tuple(int(i == j) for j in range(t)) for i in range(t))
            B = tuple(tuple(-L[j][i] for j in range(r)) for i in range(t))
            lits = [Lit("pp", True, pp=PPConstraint(A, B, (0,) * t, t, r), args=tuple(ws))]
    if verdict is not None:
        # None marks a false clause
        return [] if verdict == pos else None
    if pos:
        return lits
    if len(lits) == 1:
        return [lits[0].negate()]
    # negation of a conjunction of equations: keep as a disjunction marker
    return [("or", [l.negate() for l in lits])]


def _finish_module(lits: list, ys: list, ctx: _Ctx, path: list, x_expr: Lin, tag: str) -> Leaf:
    pos_rows: list[Row] = []
    negs: list[Group] = []
    lts: list[Lin] = []
    params: list[Lit] = []
    for l in lits:
        if l.kind == "grp":
            if l.pos:
                pos_rows.extend(l.group.rows)
            else:
                negs.append(l.group)
        elif l.kind == "lt" and l.mentions(set(ys)):
            lts.append(l.lin)
        else:
            params.append(l)
    lam0 = _y_lattice(pos_rows, ys, ctx)
    m = len(ys)
    kept, dropped = [], []
    out: list = list(params)
    ok = True
    pl = _projection_lits(pos_rows, ys, ctx, True)
    if pl is None:
        ok = False
    else:
        out.extend(pl)
    disj_parts: list = []
    for k, g in enumerate(negs):
        rows0k = pos_rows + list(g.rows)
        lam0k = _y_lattice(rows0k, ys, ctx)
        if lattice_contains(lam0k, lam0, m, ctx.ring.contains):
            kept.append(k)
            nl = _projection_lits(rows0k, ys, ctx, False)
            if nl is None:
                ok = False
                continue
            for item in nl:
                if isinstance(item, tuple):
                    disj_parts.append(item[1])
                else:
                    out.append(item)
        else:
            dropped.append(k)
    ws, _ = _collect(pos_rows + [r for g in negs for r in g.rows], ys)
    extra: list[Lit] = []
    if ok and lts:
        extra = _hull_fm(pos_rows, lts, ys, ctx)
    module = ModuleData(list(ys), ws, pos_rows, negs, kept, dropped, lts)
    ctx.bump()
    if not ok:
        return Leaf(tag, path, None, x_expr=x_expr, module=module)
    base = out + extra
    if disj_parts:
        # a negated multi-equation projection: distribute over its disjuncts
        results = []
        import itertools

        for choice in itertools.product(*disj_parts):
            results.append(normalize_clause(base + list(choice), ctx.cfg))
        alive = [r for r in results if r is not None]
        leaf = Leaf(tag, path, alive[0] if alive else None, x_expr=x_expr, module=module)
        leaf.alternatives = alive  # type: ignore[attr-defined]
        return leaf
    return Leaf(tag, path, normalize_clause(base, ctx.cfg), x_expr=x_expr, module=module)


# ---------------------------------------------------------------- Fourier-Motzkin


def _fm_eliminate(lts: list, names: list, ctx: _Ctx):
    """Eliminate names from  0 < lin  constraints over an ordered vector space.

    Returns (constraints on the remaining variables, bounds of the last
    eliminated variable when exactly one variable is eliminated).
    """
    cons = list(lts)
    bounds = None
    for v in names:
        lower, upper, rest = [], [], []
        for c in cons:
            a = c.var_coeff(v)
            if a.is_zero():
                rest.append(c)
            elif a.sign() > 0:
                lower.append(c)
            else:
                upper.append(c)
        if len(names) == 1:
            # x > -(c - a x)/a for lower, x < ... for upper
            lo = [(c.without([VarAtom(v)])).scale(-(c.var_coeff(v).inverse())) for c in lower]
            up = [(c.without([VarAtom(v)])).scale(-(c.var_coeff(v).inverse())) for c in upper]
            bounds = (lo, up)
        for p in lower:
            for q in upper:
                ap, aq = p.var_coeff(v), q.var_coeff(v)
                comb = p.scale(-aq) + q.scale(ap)
                rest.append(comb)
        cons = rest
        if len(cons) > ctx.cfg.limits.clauses:
            raise ResourceLimit("Fourier-Motzkin elimination produced too many constraints")
    return [Lit("lt", True, c) for c in cons], bounds


def _hull_fm(pos_rows: list, lts: list, ys: list, ctx: _Ctx) -> list:
    """Strict inequalities on the F-affine hull of the positive module solutions."""
    spec = ctx.spec
    ws, zs = _collect(pos_rows, ys)
    eqs: list[Lin] = []
    if pos_rows:
        Mz = _matrix(pos_rows, zs, "z")
        P = left_kernel(Mz, rows=len(pos_rows)) if zs else [
            [Fraction(int(i == j)) for j in range(len(pos_rows))] for i in range(len(pos_rows))
        ]
        for p in P:
            acc = Lin(spec)
            for coef, r in zip(p, pos_rows):
                if coef == 0:
                    continue
                for y, c in r.y:
                    acc = acc + Lin.var(spec, y, coef * c)
                for w, c in r.w:
                    acc = acc + w.scale(coef * c)
            if not acc.is_zero():
                eqs.append(acc)
    cons = list(lts)
    free = list(ys)
    for e in eqs:
        piv = next((y for y in free if not e.var_coeff(y).is_zero()), None)
        if piv is None:
            continue
        a = e.var_coeff(piv)
        val = e.without([VarAtom(piv)]).scale(-(a.inverse()))
        cons = [c.subst({piv: val}) for c in cons]
        eqs = [q.subst({piv: val}) for q in eqs]
        free.remove(piv)
    res, _ = _fm_eliminate(cons, free, ctx)
    return res


# ---------------------------------------------------------------- elimination API


@dataclass
class TraceEntry:
    var: str
    body: str
    clauses: list
    result: str

    def to_json(self) -> dict:
        return {"var": self.var, "body": self.body, "clauses": self.clauses, "result": self.result}


@dataclass
class EliminationTrace:
    config: str = ""
    input: str = ""
    output: str = ""
    entries: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "config": self.config,
            "input": self.input,
            "output": self.output,
            "eliminations": [e.to_json() for e in self.entries],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True, ensure_ascii=False)

    @property
    def free_module_profile_used(self) -> bool:
        return any(
            br.get("module_query", {}).get("free_module_profile")
            for e in self.entries
            for cl in e.clauses
            for br in cl["branches"]
        )


def clause_leaves(lits: list, x: str, cfg: EngineConfig, ctx: Optional[_Ctx] = None) -> list[Leaf]:
    ctx = ctx or _Ctx(cfg)
    lits = [l for l in lits]
    # literals without x stay as they are
    return list(_stage_x(lits, x, ctx, []))


def _leaf_clauses(leaf: Leaf) -> list:
    alts = getattr(leaf, "alternatives", None)
    if alts is not None:
        return alts
    return [leaf.result]


def eliminate_one(f: Exists, cfg: Optional[EngineConfig] = None) -> tuple[Formula, TraceEntry]:
    """Quantifier-free equivalent of exists x . body (body quantifier-free)."""
    cfg = cfg or EngineConfig()
    if not isinstance(f, Exists) or not is_quantifier_free(f.body):
        raise ValueError("eliminate_one expects exists x . <quantifier-free formula>")
    x = f.var
    ctx = _Ctx(cfg)
    all_clauses: list = []
    trace_clauses = []
    for lits in formula_clauses(f.body, cfg):
        simp = []
        dead = False
        for l in lits:
            s = simplify_lit(l, cfg)
            if s is True:
                continue
            if s is False:
                dead = True
                break
            simp.append(s)
        text = print_formula(conj(lit_to_formula(l, cfg) for l in lits))
        if dead:
            trace_clauses.append({"clause": text, "branches": [], "result": "false"})
            continue
        leaves = list(_stage_x(simp, x, ctx, []))
        cl_results = []
        for leaf in leaves:
            cl_results.extend(_leaf_clauses(leaf))
        all_clauses.extend(cl_results)
        trace_clauses.append({
            "clause": text,
            "branches": [leaf.to_json(cfg) for leaf in leaves],
            "result": print_formula(clauses_to_formula(cl_results, cfg)),
        })
    out = clauses_to_formula(all_clauses, cfg)
    entry = TraceEntry(x, print_formula(f.body), trace_clauses, print_formula(out))
    return out, entry


def eliminate_all(f: Formula, cfg: Optional[EngineConfig] = None, memo: Optional[dict] = None) -> tuple[Formula, EliminationTrace]:
    """Quantifier-free equivalent of f, eliminating innermost quantifiers first."""
    cfg = cfg or EngineConfig()
    trace = EliminationTrace(cfg.describe(), print_formula(f))

    def ex(var: str, body: Formula) -> Formula:
        body = normalize_qf(body, cfg)
        key = (var, print_formula(body))
        if memo is not None and key in memo:
            res = parse(memo[key], cfg)
            trace.entries.append(TraceEntry(var, key[1], [], memo[key]))
            return res
        res, entry = eliminate_one(Exists(var, body), cfg)
        trace.entries.append(entry)
        return res

    def go(g: Formula) -> Formula:
        if isinstance(g, (Atom, Top, Bottom)):
            return g
        if isinstance(g, Not):
            return Not(go(g.body))
        if isinstance(g, And):
            return And(go(g.left), go(g.right))
        if isinstance(g, Or):
            return Or(go(g.left), go(g.right))
        if isinstance(g, Exists):
            return ex(g.var, go(g.body))
        if isinstance(g, Forall):
            return Not(ex(g.var, Not(go(g.body))))
        raise TypeError(g)

    out = normalize_qf(go(f), cfg)
    trace.output = print_formula(out)
    return out, trace


def replay(trace: EliminationTrace, cfg: Optional[EngineConfig] = None, verify: bool = False) -> Formula:
    """Rebuild the output from the recorded eliminations.

    With verify=True every recorded elimination is recomputed and compared.
    """
    cfg = cfg or EngineConfig()
    memo = {}
    for e in trace.entries:
        if verify:
            body = parse(e.body, cfg) if e.body else TRUE
            res, _ = eliminate_one(Exists(e.var, body), cfg)
            if print_formula(res) != e.result:
                raise AssertionError(f"replay mismatch for exists {e.var}: {print_formula(res)} != {e.result}")
        memo[(e.var, e.body)] = e.result
    out, _ = eliminate_all(parse(trace.input, cfg), cfg, memo=memo)
    return out


def trace_from_json(obj: dict) -> EliminationTrace:
    t = EliminationTrace(obj.get("config", ""), obj["input"], obj.get("output", ""))
    for e in obj.get("eliminations", []):
        t.entries.append(TraceEntry(e["var"], e["body"], e.get("clauses", []), e["result"]))
    return t


def decide_sentence(f: Formula, cfg: Optional[EngineConfig] = None, model=None, assignment: Optional[dict] = None) -> tuple[bool, EliminationTrace]:
    """Truth value of f; free variables must be bound by the model or assignment."""
    cfg = cfg or (model.cfg if model is not None else EngineConfig())
    res, trace = eliminate_all(f, cfg)
    if isinstance(res, Top):
        return True, trace
    if isinstance(res, Bottom):
        return False, trace
    fv = free_vars(res)
    if model is None:
        raise UnboundConstant(f"unbound constants: {', '.join(sorted(fv))}")
    from .sandbox import eval_qfree

    return eval_qfree(res, assignment or {}, model), trace


# ---------------------------------------------------------------- small / large


def _forcing(l: Lit, x: str) -> bool:
    if not l.pos:
        return False
    if l.kind in ("eq", "gl"):
        return not l.lin.var_coeff(x).is_zero()
    if l.kind == "pp":
        return any(not a.var_coeff(x).is_zero() for a in l.args)
    return False


def _split_small(lits: list, x: str, ctx: _Ctx):
    """Yield (is_small, literals) after splitting f-applications on x."""
    fa = _first_fatom(lits, {x})
    if fa is not None:
        spec = ctx.spec
        # in G_lam: x lies in span(G + params), so the piece is small
        yield True, lits
        zero = {FAtom(fa.lams, i + 1, fa.arg): Lin(spec) for i in range(len(fa.lams))}
        lb = _replace_fatoms(lits, zero, ctx, set())
        if lb is not None:
            yield from _split_small(lb + [Lit("gl", False, fa.arg, fa.lams)], x, ctx)
        return
    yield any(_forcing(l, x) for l in lits), lits


def is_small(f: Formula, x: str, cfg: Optional[EngineConfig] = None) -> str:
    """'Small' when every clause pins x into span(G + parameters), else 'Large'."""
    cfg = cfg or EngineConfig()
    ctx = _Ctx(cfg)
    for lits in formula_clauses(f, cfg):
        for small, _ in _split_small(lits, x, ctx):
            if not small:
                return "Large"
    return "Small"


def large_approx(f: Formula, x: str, cfg: Optional[EngineConfig] = None) -> Formula:
    """Base-language formula X (equations and order only) with f differing from X on a small set."""
    cfg = cfg or EngineConfig()
    ctx = _Ctx(cfg)
    parts = []
    for lits in formula_clauses(f, cfg):
        for small, cl in _split_small(lits, x, ctx):
            if small:
                continue
            base = [l for l in cl if l.kind in ("eq", "lt")]
            parts.append(normalize_clause(base, cfg))
    return clauses_to_formula(parts, cfg)


def leaves_for(f: Exists, cfg: EngineConfig) -> list[Leaf]:
    """All branch leaves of exists x . body, for witness construction."""
    out = []
    ctx = _Ctx(cfg)
    for lits in formula_clauses(f.body, cfg):
        simp = []
        dead = False
        for l in lits:
            s = simplify_lit(l, cfg)
            if s is True:
                continue
            if s is False:
                dead = True
                break
            simp.append(s)
        if not dead:
            out.extend(_stage_x(simp, f.var, ctx, []))
    return out


def closure(elems, model):
    """Finite description of the definable closure of a set of model elements."""
    from .sandbox import closure as _closure

    return _closure(elems, model)


def types_equal(a: Sequence, model_a, b: Sequence, model_b):
    from .sandbox import types_equal as _te

    return _te(a, model_a, b, model_b)

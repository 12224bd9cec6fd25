"""Reducing F-linear conditions on G to R-linear ones.

`mordell_lang_reduce` turns one F-relation among elements of G into an
integer system; `member_translation` is the workhorse behind it for
conditions of the form  sum gamma_j x_j + s in G_mu  with x_j ranging over G;
`normalize_term` flattens f-applications whose arguments involve G-valued
variables.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Optional, Sequence

from .config import EngineConfig
from .errors import NotGClassified
from .exactnum import FieldElem, FieldSpec, RingSpec, common_denominator, greedy_basis, rhat_coordinates
from .formulas import (
    TRUE,
    Eq,
    Formula,
    InGl,
    Not,
    PPConstraint,
    Term,
    conj,
)
from .linear import FAtom, Lin, VarAtom, linearize, to_term

# ---------------------------------------------------------------- Mordell-Lang reduction


@dataclass(frozen=True)
class RLinearSystem:
    """Integer rows r with sum_i r_i x_i = 0, one per basis scalar."""

    n: int
    rows: tuple
    basis: tuple

    def holds(self, values: Sequence) -> bool:
        """values: GVectors (or anything with + and scale) for x_0..x_{n-1}."""
        from .modth import GVector

        for r in self.rows:
            acc = GVector()
            for c, v in zip(r, values):
                if c:
                    acc = acc + v.scale(c)
            if not acc.is_zero():
                return False
        return True

    def text(self, names: Sequence[str] = ()) -> list[str]:
        names = list(names) or [f"x{i}" for i in range(self.n)]
        out = []
        for r in self.rows:
            parts = []
            for c, nm in zip(r, names):
                if c == 0:
                    continue
                mag = abs(c)
                body = nm if mag == 1 else f"{mag}*{nm}"
                if not parts:
                    parts.append(("-" if c < 0 else "") + body)
                else:
                    parts.append((" - " if c < 0 else " + ") + body)
            out.append("".join(parts) + " = 0")
        return out


def mordell_lang_reduce(lams: Sequence[FieldElem]) -> RLinearSystem:
    """R-system equivalent on G^n to sum lam_i x_i = 0.

    Greedy left-to-right basis lam_b; every other lam_i = sum_b q_ib lam_b.
    Freeness splits the relation into one equation per basis scalar,
    x_b + sum_i q_ib x_i = 0, cleared by the least common denominator.
    """
    if not lams:
        raise ValueError("mordell_lang_reduce needs a nonempty tuple")
    n = len(lams)
    basis = greedy_basis(lams)
    bl = [lams[b] for b in basis]
    q = {}
    for i in range(n):
        if i in basis:
            continue
        q[i] = rhat_coordinates(lams[i], bl)
    rows = []
    for jb, b in enumerate(basis):
        row = [Fraction(0)] * n
        row[b] = Fraction(1)
        for i, qi in q.items():
            row[i] += qi[jb]
        den = common_denominator(row)
        rows.append(tuple(int(x * den) for x in row))
    return RLinearSystem(n, tuple(rows), tuple(basis))


# ---------------------------------------------------------------- span decomposition


@dataclass(frozen=True)
class SpanDecomposition:
    """nu = mu followed by a greedy basis extension from gammas.

    gamma_j = sum_l a[j][l] nu_l with rational a; D clears all denominators.
    """

    nu: tuple
    a: tuple
    D: int


def span_decomposition(mu: Sequence[FieldElem], gammas: Sequence[FieldElem]) -> SpanDecomposition:
    allv = list(mu) + list(gammas)
    idx = greedy_basis(allv) if allv else []
    nu = tuple(allv[i] for i in idx)
    a = []
    for g in gammas:
        co = rhat_coordinates(g, list(nu)) if nu else []
        a.append(tuple(co))
    D = common_denominator(x for r in a for x in r)
    return SpanDecomposition(nu, tuple(a), D)


def gl_decompose(nu: Sequence[FieldElem], lin: Lin, ring: RingSpec, gvars=frozenset()) -> Optional[list[Lin]]:
    """Syntactic decomposition lin = sum nu_l w_l with every w_l visibly in G, or None."""
    spec = lin.spec
    parts: list[list] = [[] for _ in nu]
    for atom, c in lin.terms:
        in_g = isinstance(atom, FAtom) or (isinstance(atom, VarAtom) and atom.name in gvars)
        if not in_g:
            return None
        hit = None
        for j, lam in enumerate(nu):
            q = c / lam
            if q.is_rational() and ring.contains(q.rational()):
                hit = (j, q)
                break
        if hit is None:
            return None
        parts[hit[0]].append((atom, hit[1]))
    return [Lin(spec, p) for p in parts]


@dataclass(frozen=True)
class ModRow:
    """sum coeffs[x] x + sum wcoef[i] w_i - dz * z = 0, with z a local G-variable when dz != 0."""

    coeffs: tuple  # ((var name, int), ...)
    wcoef: tuple  # ((w index, int), ...)
    dz: int = 0


@dataclass
class MemberTranslation:
    """sum gamma_j x_j + s in G_mu, rewritten over x in G.

    Holds iff `condition` (D*s in G_nu) and every row holds.  `value(k)`
    is f_{mu,k}(sum gamma_j x_j + s) on that set.
    """

    mu: tuple
    decomposition: SpanDecomposition
    w: list
    condition: Formula
    rows: list
    xs: tuple
    spec: FieldSpec = field(repr=False, default=None)

    def value(self, k: int) -> Lin:
        """f_{mu,k} of the argument as a linear form in x and w (1-based k)."""
        D = self.decomposition.D
        out = self.w[k - 1].scale(Fraction(1, D))
        for j, x in enumerate(self.xs):
            c = self.decomposition.a[j][k - 1]
            if c:
                out = out + Lin.var(self.spec, x, c)
        return out


def member_translation(
    mu: Sequence[FieldElem],
    gammas: Mapping[str, FieldElem],
    s: Lin,
    ring: RingSpec,
    gvars=frozenset(),
) -> MemberTranslation:
    """Translate  sum gamma_j x_j + s in G_mu  (mu may be empty: the equation = 0)."""
    spec = s.spec
    xs = tuple(gammas)
    dec = span_decomposition(mu, [gammas[x] for x in xs])
    D = dec.D
    Ds = s.scale(D)
    nu = dec.nu
    w: list[Lin] = []
    cond: Formula = TRUE
    if nu:
        parts = gl_decompose(nu, Ds, ring, gvars)
        if parts is not None:
            w = parts
        elif len(nu) == 1 and nu[0] == 1:
            w = [Ds]
            cond = InGl(nu, to_term(Ds))
        else:
            w = [Lin.atom(spec, FAtom(nu, l + 1, Ds)) for l in range(len(nu))]
            cond = InGl(nu, to_term(Ds))
    elif not Ds.is_zero():
        # no x at all and mu empty: s = 0 is a plain equation on parameters
        from .formulas import Eq, ZERO

        cond = Eq(to_term(s), ZERO)
    rows: list[ModRow] = []
    nmu = len(mu)
    for l in range(len(nu)):
        coeffs = tuple((x, int(dec.a[j][l] * D)) for j, x in enumerate(xs) if dec.a[j][l] != 0)
        wl = ((l, 1),) if not w[l].is_zero() else ()
        if l < nmu:
            if D == 1 or ring.is_unit(D):
                continue  # membership of a sum of G-elements in G
            rows.append(ModRow(coeffs, wl, D))
        else:
            if not coeffs and not wl:
                continue
            rows.append(ModRow(coeffs, wl, 0))
    return MemberTranslation(tuple(mu), dec, w, cond, rows, xs, spec)


# ---------------------------------------------------------------- term normalization


@dataclass(frozen=True)
class GuardedTermList:
    """Cases (guard, flat linear form); guards partition the ambient space."""

    cases: tuple

    def terms(self) -> list:
        return [t for _, t in self.cases]

    def text(self) -> list[str]:
        from .formulas import print_formula

        return [f"{print_formula(g)} => {t}" for g, t in self.cases]


def _is_g_atom(atom, classes: Mapping[str, str]) -> bool:
    if isinstance(atom, FAtom):
        return True
    return classes.get(atom.name) in ("InG", "GParam")


def _normalize_lin(lin: Lin, classes: Mapping[str, str], ring: RingSpec) -> list[tuple[list, Lin]]:
    """Cases [(guard literals, lin)] with f-arguments free of G-atoms and generic variables."""
    spec = lin.spec
    gvars = frozenset(v for v, c in classes.items() if c in ("InG", "GParam"))
    # rewrite the innermost f-atom that still needs work
    for fa in lin.fatoms():
        arg = fa.arg
        generic = [a for a, _ in arg.terms if isinstance(a, VarAtom) and classes.get(a.name) == "Generic"]
        if generic:
            return _normalize_lin(lin.replace_atom(fa, Lin(spec)), classes, ring)
        gat = [(a, c) for a, c in arg.terms if _is_g_atom(a, classes)]
        if not gat:
            continue
        mu = fa.lams
        parts = gl_decompose(mu, arg, ring, gvars)
        if parts is not None:
            return _normalize_lin(lin.replace_atom(fa, parts[fa.index - 1]), classes, ring)
        g, alpha = gat[0]
        b = arg.without([g])
        co = rhat_coordinates(alpha, list(mu))
        if co is None:
            # alpha outside the span of mu: decompose b along (mu, -alpha); the argument
            # lies in G_mu exactly when the -alpha coordinate of b equals g
            if b.is_zero():
                return _normalize_lin(lin.replace_atom(fa, Lin(spec)), classes, ring)
            ext = tuple(mu) + (-alpha,)
            new = Lin.atom(spec, FAtom(ext, fa.index, b))
            last = Lin.atom(spec, FAtom(ext, len(ext), b))
            guard = Eq(to_term(last), to_term(Lin.atom(spec, g)))
            out = []
            for gl, t in _normalize_lin(lin.replace_atom(fa, new), classes, ring):
                out.append(([guard] + gl, t))
            for gl, t in _normalize_lin(lin.replace_atom(fa, Lin(spec)), classes, ring):
                out.append(([Not(guard)] + gl, t))
            return out
        s = common_denominator(co)
        qk = co[fa.index - 1]
        gterm = Lin.atom(spec, g)
        sb = b.scale(s)
        inner = Lin.atom(spec, FAtom(tuple(mu), fa.index, sb)) if not sb.is_zero() else Lin(spec)
        on = inner.scale(Fraction(1, s)) + gterm.scale(qk)
        guard = InGl(tuple(mu), to_term(arg))
        out = []
        for gl, t in _normalize_lin(lin.replace_atom(fa, on), classes, ring):
            out.append(([guard] + gl, t))
        for gl, t in _normalize_lin(lin.replace_atom(fa, Lin(spec)), classes, ring):
            out.append(([Not(guard)] + gl, t))
        return out
    return [([], lin)]


def normalize_term(t: Term, classification: Mapping[str, str], cfg: Optional[EngineConfig] = None) -> GuardedTermList:
    """Flatten f-applications on arguments that involve G-valued or generic variables.

    classification maps variable names to 'InG', 'Generic', 'GParam' (a
    parameter known to lie in G) or 'Unknown'.
    Case 1 (alpha outside span_Q(mu)) is unconditional; Case 2 splits on
    whether the argument lies in G_mu.
    """
    cfg = cfg or EngineConfig()
    lin = linearize(t, cfg.field) if not isinstance(t, Lin) else t
    cases = _normalize_lin(lin, classification, cfg.ring)
    return GuardedTermList(tuple((conj(g), l) for g, l in cases))


# ---------------------------------------------------------------- moduleize


@dataclass(frozen=True)
class ModuleizedCase:
    """On `guard`: the literals hold iff pp(xs..., ws...) holds."""

    guard: Formula
    pp: PPConstraint
    xs: tuple
    ws: tuple

    def args(self) -> tuple:
        return tuple(self.xs) + tuple(self.ws)


def rows_to_pp(rows: Sequence[ModRow], xs: Sequence[str], nw: int) -> PPConstraint:
    """exists z in G (rows) as a pp constraint on (xs, w_0..w_{nw-1})."""
    k = len(xs) + nw
    zcount = sum(1 for r in rows if r.dz)
    A, B = [], []
    zi = 0
    for r in rows:
        arow = [0] * k
        for x, c in r.coeffs:
            arow[xs.index(x)] += c
        for i, c in r.wcoef:
            arow[len(xs) + i] += c
        brow = [0] * zcount
        if r.dz:
            brow[zi] = -r.dz
            zi += 1
        A.append(tuple(arow))
        B.append(tuple(brow))
    if not rows:
        A = [tuple([0] * k)]
        B = [tuple([0] * zcount)]
    return PPConstraint(tuple(A), tuple(B), tuple([0] * len(A)), k, zcount)


def moduleize_on_G(literals: Sequence[Formula], classification: Mapping[str, str], cfg: Optional[EngineConfig] = None) -> list[ModuleizedCase]:
    """Express positive G, G_mu and equation literals over InG variables as one pp-condition.

    The variables must all be classified 'InG'; anything else is a parameter
    term.  Each literal  sum gamma_j x_j + s in G_mu  goes through
    member_translation; parameter parts w become extra pp slots.
    """
    from .formulas import Eq, InG

    cfg = cfg or EngineConfig()
    spec, ring = cfg.field, cfg.ring
    xs = [v for v, c in classification.items() if c == "InG"]
    gparams = {v for v, c in classification.items() if c == "GParam"}
    for v, c in classification.items():
        if c not in ("InG", "GParam"):
            raise NotGClassified(f"variable {v} is classified {c}, not InG")
    guards: list[Formula] = []
    all_rows: list[ModRow] = []
    ws: list[Lin] = []
    for lit in literals:
        if isinstance(lit, Eq):
            mu: tuple = ()
            lin = linearize(lit.left, spec) - linearize(lit.right, spec)
        elif isinstance(lit, InG):
            mu, lin = (spec.one(),), linearize(lit.term, spec)
        elif isinstance(lit, InGl):
            mu, lin = lit.lams, linearize(lit.term, spec)
        else:
            raise NotGClassified(f"unsupported literal {lit}")
        gam = {x: lin.var_coeff(x) for x in xs if not lin.var_coeff(x).is_zero()}
        s = lin.without([VarAtom(x) for x in xs])
        tr = member_translation(mu, gam, s, ring, frozenset(xs) | gparams)
        if tr.condition != TRUE:
            guards.append(tr.condition)
        for r in tr.rows:
            wc = []
            for i, c in r.wcoef:
                if tr.w[i] not in ws:
                    ws.append(tr.w[i])
                wc.append((ws.index(tr.w[i]), c))
            all_rows.append(ModRow(r.coeffs, tuple(wc), r.dz))
    pp = rows_to_pp(all_rows, xs, len(ws))
    return [ModuleizedCase(conj(guards), pp, tuple(xs), tuple(to_term(w) for w in ws))]

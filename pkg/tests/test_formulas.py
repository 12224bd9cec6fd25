import random
from fractions import Fraction

import pytest

from genericsub.config import EngineConfig
from genericsub.corpus import COMMON, ORDERED, ORDERED_SQRT2, SQRT2
from genericsub.errors import (
    ArityMismatch,
    FormulaSyntaxError,
    IndependenceError,
    OrderNotAvailable,
    QuantifierPresent,
    ResourceLimit,
)
from genericsub.formulas import (
    And,
    Eq,
    Exists,
    InG,
    Not,
    Or,
    PP,
    Scale,
    Sum,
    Var,
    atoms_of,
    dumps,
    free_vars,
    loads,
    parse,
    parse_term,
    print_formula,
    substitute,
    to_dnf,
)
from genericsub.sandbox import eval_qfree, new_model


def test_parse_shape(cfg):
    f = parse("exists x . G(x) /\\ ~G(x + c)", cfg)
    assert f == Exists("x", And(InG(Var("x")), Not(InG(Sum(Var("x"), Var("c"))))))


def test_dependent_gl_rejected(cfg):
    with pytest.raises(IndependenceError):
        parse("Gl[1, 2](x)", cfg)


def test_dependent_f_rejected(cfg2):
    with pytest.raises(IndependenceError):
        parse("f[a, 2*a; 1](x) = 0", cfg2)
    with pytest.raises(IndependenceError):
        parse("f[1, a; 3](x) = 0", cfg2)


def test_order_rejected_when_unordered(cfg):
    with pytest.raises(OrderNotAvailable):
        parse("x < c", cfg)


def test_syntax_error_position(cfg):
    with pytest.raises(FormulaSyntaxError) as ei:
        parse("G(x) /\\ ", cfg)
    assert ei.value.position == 8
    diag = ei.value.diagnostic()
    assert diag.splitlines()[-1].index("^") == 2 + 8


def test_pp_arity(cfg):
    # the parser reports it as a positioned syntax error; the constructor raises directly
    with pytest.raises(FormulaSyntaxError):
        parse("pp{1,1||0}(x)", cfg)
    pp = parse("pp{1,1||0}(x, y)", cfg).pp
    with pytest.raises(ArityMismatch):
        PP(pp, (Var("x"),))


def test_precedence(cfg):
    f = parse("G(x) \\/ G(y) /\\ G(z)", cfg)
    assert isinstance(f, Or) and isinstance(f.right, And)
    g = parse("~G(x) /\\ G(y)", cfg)
    assert isinstance(g, And) and isinstance(g.left, Not)
    h = parse("exists x . G(x) /\\ G(y)", cfg)
    assert isinstance(h, Exists) and isinstance(h.body, And)


@pytest.mark.parametrize("cfgname,texts", [
    ("cfg", COMMON), ("cfg2", COMMON + SQRT2), ("cfg_ord", COMMON + ORDERED), ("cfg2_ord", COMMON + SQRT2 + ORDERED + ORDERED_SQRT2),
])
def test_print_parse_roundtrip(cfgname, texts, request):
    c = request.getfixturevalue(cfgname)
    for t in texts:
        for f in (parse(t, c), Exists("x", parse(t, c))):
            assert parse(print_formula(f), c) == f
            assert loads(dumps(f), c.field) == f


def test_dnf_examples(cfg):
    a, b, c = (parse(f"G({v})", cfg) for v in "xyz")
    assert to_dnf(Not(And(a, b))) == Or(Not(a), Not(b))
    assert to_dnf(And(a, Or(b, c))) == Or(And(a, b), And(a, c))


def test_dnf_needs_quantifier_free(cfg):
    with pytest.raises(QuantifierPresent):
        to_dnf(parse("exists x . G(x)", cfg))


def test_dnf_size_guard(cfg):
    f = parse(" /\\ ".join(f"(G(x{i}) \\/ G(y{i}))" for i in range(15)), cfg)
    with pytest.raises(ResourceLimit):
        to_dnf(f)


def test_substitute_and_free_vars(cfg):
    f = parse("G(x)", cfg)
    two_y = Scale(cfg.field.const(2), Var("y"))
    assert substitute(f, "x", two_y) == InG(two_y)
    assert free_vars(Exists("x", Eq(Var("x"), Var("y")))) == {"y"}


def test_substitute_avoids_capture(cfg):
    f = parse("exists y . x = y", cfg)
    g = substitute(f, "x", Var("y"))
    assert free_vars(g) == {"y"}
    assert isinstance(g, Exists) and g.var != "y"


ATOMS = ["G(x)", "G(x + y)", "x = y", "Gl[2](x - y)", "2*x = y", "G(y)", "pp{1,-1|-3|0}(x, y)", "f[1;1](x) = y"]


def _random_formula(rng, depth=0):
    if depth >= 2 or rng.random() < 0.3:
        return rng.choice(ATOMS)
    op = rng.choice(["/\\", "\\/", "->"])
    left, right = _random_formula(rng, depth + 1), _random_formula(rng, depth + 1)
    s = f"({left} {op} {right})"
    return "~" + s if rng.random() < 0.3 else s


def _samples(model, rng, n):
    hs = model.fresh_G(2)
    v = model.fresh_generic(1)[0]
    pool = [hs[0], hs[1], v, hs[0].scale(Fraction(1, 2)), hs[0].scale(2) + hs[1], hs[0] + v]
    return [{"x": rng.choice(pool), "y": rng.choice(pool)} for _ in range(n)]


def test_dnf_agrees_with_sandbox(cfg):
    rng = random.Random(11)
    model = new_model(cfg)
    points = _samples(model, rng, 50)
    for _ in range(100):
        f = parse(_random_formula(rng), cfg)
        d = to_dnf(f)
        assert set(map(print_formula, atoms_of(d))) <= set(map(print_formula, atoms_of(f)))
        for p in points:
            assert eval_qfree(f, p, model) == eval_qfree(d, p, model)


def test_substitution_agrees_with_assignment(cfg):
    rng = random.Random(5)
    model = new_model(cfg)
    points = _samples(model, rng, 100)
    for p in points:
        f = parse(_random_formula(rng), cfg)
        t = parse_term("2*y + x", cfg)
        lhs = eval_qfree(substitute(f, "x", t), p, model)
        val = p["y"].scale(2) + p["x"]
        assert lhs == eval_qfree(f, {**p, "x": val}, model)


def test_pp_prints_semicolons(cfg):
    f = parse("pp{1,1;1,-1||0,0}(x, c)", cfg)
    assert print_formula(f) == "pp{1,1;1,-1||0;0}(x, c)"

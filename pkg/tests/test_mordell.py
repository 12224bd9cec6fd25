import itertools
import random
from fractions import Fraction

import pytest

from genericsub.errors import NotGClassified
from genericsub.exactnum import FieldSpec
from genericsub.formulas import parse, parse_term
from genericsub.linear import FAtom
from genericsub.modth import GVector, eval_pp
from genericsub.mordell import moduleize_on_G, mordell_lang_reduce, normalize_term
from genericsub.sandbox import eval_lin, eval_qfree, new_model
from genericsub.suites import mordell_exactness


def _relation_holds(lams, gs):
    """sum lam_i g_i = 0 computed directly from power-basis coordinates."""
    d = lams[0].spec.degree
    gens = set().union(*(g.coeffs for g in gs))
    for h in gens:
        for k in range(d):
            if sum(l.coords[k] * g.coeffs.get(h, 0) for l, g in zip(lams, gs)) != 0:
                return False
    return True


def _brute(lams, box, ngen):
    sysm = mordell_lang_reduce(lams)
    vecs = [GVector({f"h{j + 1}": c for j, c in enumerate(cs) if c}) for cs in itertools.product(range(-box, box + 1), repeat=ngen)]
    for gs in itertools.product(vecs, repeat=len(lams)):
        assert sysm.holds(gs) == _relation_holds(lams, gs)
    return sysm


def test_reduce_sqrt2_example(K):
    a = K.gen()
    s = _brute([K.one(), a, K.one() + a], 2, 1)
    assert s.text() == ["x0 + x2 = 0", "x1 + x2 = 0"]


def test_reduce_independent_forces_zero(K):
    s = mordell_lang_reduce([K.one(), K.gen()])
    assert s.text() == ["x0 = 0", "x1 = 0"]


def test_reduce_rationals(Q):
    s = _brute([Q.const(Fraction(1, 2)), Q.const(Fraction(1, 3))], 2, 2)
    assert s.text() == ["3*x0 + 2*x1 = 0"]


def test_reduce_small_box_two_generators(K):
    a = K.gen()
    _brute([a, K.const(2), a * 3 - 1], 1, 2)


def test_exactness_suite_reduced_scope(K):
    res = mordell_exactness(K, exhaustive_len=1, sampled_lens=(2, 3), samples=150)
    assert res.ok, res.counterexample


def test_case1_sqrt2(cfg2):
    out = normalize_term(parse_term("f[1;1](a*g + b)", cfg2), {"g": "InG", "b": "Unknown"}, cfg2)
    assert out.text() == ["f[1, -a; 2](b) = g => f[1, -a; 1](b)", "~(f[1, -a; 2](b) = g) => 0"]


def test_case1_value_on_both_branches(cfg2):
    model = new_model(cfg2)
    h1, h2, h3 = model.fresh_G(3)
    a = cfg2.field.gen()
    t = parse_term("f[1;1](a*g + b)", cfg2)
    out = normalize_term(t, {"g": "InG", "b": "Unknown"}, cfg2)
    from genericsub.sandbox import eval_term

    g = h1.scale(2) - h3
    for b, want in [(h2 - g.scale(a), h2), (h2 - h1.scale(a), _zero(model)), (h2.scale(Fraction(1, 2)), _zero(model))]:
        p = {"g": g, "b": b}
        assert eval_term(t, p, model) == want
        (i,) = [i for i, (gd, _) in enumerate(out.cases) if eval_qfree(gd, p, model)]
        assert eval_lin(out.cases[i][1], p, model) == want


def _zero(model):
    from genericsub.sandbox import VElem

    return VElem(model.spec)


def test_case2_half(cfg):
    out = normalize_term(parse_term("f[1;1](1/2*g + b)", cfg), {"g": "InG", "b": "Unknown"}, cfg)
    assert out.text() == [
        "Gl[1](b + 1/2*g) => 1/2*g + 1/2*f[1; 1](2*b)",
        "~Gl[1](b + 1/2*g) => 0",
    ]


def test_f_on_G_is_identity(cfg):
    out = normalize_term(parse_term("f[1;1](g)", cfg), {"g": "InG"}, cfg)
    assert out.text() == ["true => g"]


def _points(model, rng, n, names):
    hs = model.fresh_G(3)
    vs = model.fresh_generic(1)
    coeffs = [Fraction(k, q) for k in range(-3, 4) for q in (1, 2)]
    out = []
    for _ in range(n):
        asg = {}
        for nm in names:
            if nm.startswith("g"):
                e = sum((h.scale(rng.randint(-3, 3)) for h in hs), start=hs[0].scale(0))
            else:
                e = sum((b.scale(rng.choice(coeffs)) for b in hs + (vs if rng.random() < 0.3 else [])), start=hs[0].scale(0))
                if model.spec.degree > 1 and rng.random() < 0.4:
                    e = e + hs[1].scale(model.spec.gen() * rng.choice(coeffs))
            asg[nm] = e
        out.append(asg)
    return out


TERMS = [
    ("f[1;1](1/2*g + b)", {"g": "InG", "b": "Unknown"}),
    ("f[1;1](g + b)", {"g": "InG", "b": "Unknown"}),
    ("f[2;1](g) + f[1;1](1/3*g + 2*b)", {"g": "InG", "b": "Unknown"}),
    ("f[1;1](f[1;1](1/2*g + b) + 1/2*g)", {"g": "InG", "b": "Unknown"}),
    ("3*g + f[1;1](b - 2/3*g) - b", {"g": "InG", "b": "Unknown"}),
]
TERMS2 = [
    ("f[1;1](a*g + b)", {"g": "InG", "b": "Unknown"}),
    ("f[1, a; 2](1/2*a*g + b)", {"g": "InG", "b": "Unknown"}),
    ("f[1, a; 1](f[1;1](g + 1/2*b) + a*g)", {"g": "InG", "b": "Unknown"}),
]


@pytest.mark.parametrize("cfgname,terms", [("cfg", TERMS), ("cfg2", TERMS2)])
def test_normalize_partition_and_value(cfgname, terms, request):
    c = request.getfixturevalue(cfgname)
    rng = random.Random(17)
    model = new_model(c)
    pts = _points(model, rng, 1000, ["g", "b"])
    for text, classes in terms:
        t = parse_term(text, c)
        out = normalize_term(t, classes, c)
        for _, lin in out.cases:
            for fa in lin.fatoms():
                assert not fa.arg.fatoms(), "nested f-application in output"
        for p in pts[:: 1 if len(terms) < 4 else 2]:
            hits = [i for i, (g, _) in enumerate(out.cases) if eval_qfree(g, p, model)]
            assert len(hits) == 1
            from genericsub.sandbox import eval_term

            assert eval_lin(out.cases[hits[0]][1], p, model) == eval_term(t, p, model)


def test_moduleize_examples(cfg, cfg2):
    (m,) = moduleize_on_G([parse("Gl[2](x)", cfg)], {"x": "InG"}, cfg)
    assert m.pp.text() == "pp{1|-2|0}" and m.xs == ("x",)
    (m,) = moduleize_on_G([parse("G(a*x + g0)", cfg2)], {"x": "InG", "g0": "GParam"}, cfg2)
    assert m.pp.text() == "pp{1||0}"
    (m,) = moduleize_on_G([parse("G(x + x)", cfg)], {"x": "InG"}, cfg)
    assert m.pp.text() == "pp{0||0}"


def test_moduleize_matches_sandbox(cfg2):
    model = new_model(cfg2)
    hs = model.fresh_G(2)
    (m,) = moduleize_on_G([parse("G(a*x + g0)", cfg2)], {"x": "InG", "g0": "GParam"}, cfg2)
    for cx in range(-2, 3):
        for c0 in range(-2, 3):
            x, g0 = hs[0].scale(cx), hs[1].scale(c0) + hs[0].scale(c0)
            truth = eval_qfree(parse("G(a*x + g0)", cfg2), {"x": x, "g0": g0}, model)
            assert not m.ws
            assert truth == eval_pp(m.pp, [model.to_gvector(x)])


def test_moduleize_needs_classification(cfg):
    with pytest.raises(NotGClassified):
        moduleize_on_G([parse("G(x)", cfg)], {"x": "Generic"}, cfg)


def test_exactness_oracle_detects_broken_reduction(K, monkeypatch):
    from genericsub import suites
    from genericsub.mordell import RLinearSystem

    def drop_last_row(lams):
        s = mordell_lang_reduce(lams)
        return RLinearSystem(s.n, s.rows[:-1], s.basis)

    monkeypatch.setattr(suites, "mordell_lang_reduce", drop_last_row)
    res = suites.mordell_exactness(K, exhaustive_len=2, sampled_lens=(), coord_bound=1)
    assert res.failed > 0 and res.counterexample is not None

import json
import random
from fractions import Fraction

import pytest

from genericsub.errors import CNotIndependent, NotClosed, NoWitness, UnboundVariable
from genericsub.formulas import Exists, parse
from genericsub.sandbox import (
    VElem,
    check_axioms,
    closure,
    eval_qfree,
    g_basis,
    g_independent,
    halfgraph_probe,
    indep_G,
    load_model,
    new_model,
    types_equal,
    witness,
)
from genericsub.suites import indep_scenarios


def test_fresh_generators(cfg):
    m = new_model(cfg)
    h1, h2 = m.fresh_G(2)
    (v,) = m.fresh_generic(1)
    assert m.in_G(h1) and m.in_G(h1 + h2)
    assert not m.in_G(h1.scale(Fraction(1, 2)))
    assert not m.in_G(v)
    assert list(v.coeffs) == ["v3"]


def test_eval_examples(cfg2):
    m = new_model(cfg2, n_h=2)
    a = cfg2.field.gen()
    h1, h2 = m.gen("h1"), m.gen("h2")
    x = h1 + h2.scale(a)
    assert eval_qfree(parse("G(x)", cfg2), {"x": h1}, m)
    assert eval_qfree(parse("Gl[1, a](x)", cfg2), {"x": x}, m)
    assert m.decompose(x, [cfg2.field.one(), a]) == [h1, h2]
    assert eval_qfree(parse("f[1, a; 2](x) = y", cfg2), {"x": x, "y": h2}, m)
    assert eval_qfree(parse("f[1, a; 1](x) = 0", cfg2), {"x": h1.scale(Fraction(1, 2))}, m)


def test_unbound_variable(cfg):
    m = new_model(cfg)
    with pytest.raises(UnboundVariable):
        eval_qfree(parse("G(z)", cfg), {}, m)


def test_witness_recipes(cfg):
    m = new_model(cfg, n_h=1)
    h1 = m.gen("h1")
    for text in ["G(x) /\\ ~(x = c)", "~Gl[1](x - c)", "2*x = c", "Gl[2](x - c) /\\ ~Gl[4](x + c) /\\ ~(x = 0)"]:
        body = parse(text, cfg)
        w = witness(Exists("x", body), m, {"c": h1})
        assert eval_qfree(body, {"c": h1, "x": w}, m), text
    with pytest.raises(NoWitness):
        witness(Exists("x", parse("G(x) /\\ 2*x = c", cfg)), m, {"c": h1})


def test_check_axioms_fixed_lambdas(cfg2):
    a = cfg2.field.gen()
    one = cfg2.field.one()
    rep = check_axioms(new_model(cfg2), samples=500, box=3, generators=2, lams=[(one, a), (one, one + a)])
    assert rep.ok and rep.freeness_samples == 500
    assert rep.density_passes == 9 and rep.codensity_passes == 3


def test_density_witness_shape(cfg):
    m = new_model(cfg, n_h=1)
    f = parse("exists x . Gl[2](x) /\\ ~(x = c)", cfg)
    w = witness(f, m, {"c": m.gen("h1")})
    assert m.in_G(w.scale(Fraction(1, 2)))
    assert eval_qfree(f.body, {"c": m.gen("h1"), "x": w}, m)


def test_closure_examples(cfg2):
    m = new_model(cfg2, n_h=2)
    a = cfg2.field.gen()
    h1, h2 = m.gen("h1"), m.gen("h2")
    c = closure([h1], m)
    assert c.dim == 1 and c.g_part == [m.to_gvector(h1)]
    c = closure([h1 + h2.scale(a)], m)
    assert c.dim == 2 and set(c.g_part) == {m.to_gvector(h1), m.to_gvector(h2)}
    assert closure([], m).dim == 0


def test_g_independence(cfg2):
    m = new_model(cfg2, n_h=2)
    a = cfg2.field.gen()
    h1, h2 = m.gen("h1"), m.gen("h2")
    assert g_independent([h1, h2], m)
    assert not g_independent([h1 + h2.scale(a)], m)
    assert sorted(map(VElem.text, g_basis([h1 + h2.scale(a)], [], m))) == ["h1", "h2"]
    with pytest.raises(CNotIndependent):
        g_basis([h1], [h1 + h2.scale(a)], m)


def test_closure_operator_properties(cfg2):
    rng = random.Random(6)
    m = new_model(cfg2, n_h=3, n_v=1)
    a = cfg2.field.gen()
    gens = [m.gen(g) for g in m.h + m.v]
    scal = [cfg2.field.const(k) for k in (-1, 1, 2)] + [a, a + 1]

    def rand():
        e = VElem(cfg2.field)
        for g in gens:
            if rng.random() < 0.5:
                e = e + g.scale(rng.choice(scal))
        return e

    def span_contains(cl, e):
        return closure(cl.basis + [e], m).dim == cl.dim

    for _ in range(60):
        A = [rand() for _ in range(rng.randint(1, 3))]
        B = A + [rand()]
        cA, cB = closure(A, m), closure(B, m)
        assert all(span_contains(cA, e) for e in A)
        assert all(span_contains(cB, e) for e in cA.basis)
        assert closure(cA.basis, m).dim == cA.dim


def test_types_equal_examples(cfg):
    m = new_model(cfg, n_h=2, n_v=1)
    h1, h2, v = m.gen("h1"), m.gen("h2"), m.gen("v3")
    assert types_equal([h1], m, [h2], m).equal
    r = types_equal([h1.scale(2)], m, [h1], m)
    assert not r.equal and r.explanation == "x1 ∈ 2G"
    r = types_equal([v], m, [h1], m)
    assert not r.equal and r.explanation == "G(x1)"


def test_indep_scenarios(cfg):
    for name, want, got in indep_scenarios(cfg):
        assert got == want, name


def test_indep_requires_closed_base(cfg2):
    m = new_model(cfg2, n_h=2)
    a = cfg2.field.gen()
    with pytest.raises(NotClosed):
        indep_G([m.gen("h1")], [m.gen("h1") + m.gen("h2").scale(a)], [], m)


def test_halfgraph(cfg):
    rep = halfgraph_probe(new_model(cfg), samples=2000)
    assert rep.violations == [] and rep.hypotheses_met > 0


def test_G_closed_under_operations(cfg):
    rng = random.Random(1)
    m = new_model(cfg, n_h=3)
    hs = [m.gen(g) for g in m.h]
    for _ in range(500):
        x = sum((h.scale(rng.randint(-4, 4)) for h in hs), start=VElem(cfg.field))
        y = sum((h.scale(rng.randint(-4, 4)) for h in hs), start=VElem(cfg.field))
        assert m.in_G(x + y) and m.in_G(x - y) and m.in_G(x.scale(rng.randint(-5, 5)))
        assert m.in_G(x) == eval_qfree(parse("G(x)", cfg), {"x": x}, m)


def test_snapshot_roundtrip(cfg2_ord):
    m = new_model(cfg2_ord, n_h=2, n_v=1)
    a = cfg2_ord.field.gen()
    m.bind("c", m.gen("h1").scale(a) + m.gen("v3").scale(Fraction(-1, 2)))
    data = json.loads(json.dumps(m.snapshot()))
    m2 = load_model(data, cfg2_ord)
    assert m2.snapshot() == m.snapshot()
    assert m2.sign(m2.lookup("c")) == m.sign(m.lookup("c"))
    assert m2.fresh_G(1)[0].text() == "h4"


def test_snapshot_config_mismatch(cfg, cfg2):
    from genericsub.errors import EngineError

    data = new_model(cfg2, n_h=1).snapshot()
    with pytest.raises(EngineError):
        load_model(data, cfg)

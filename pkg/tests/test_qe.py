import json

import pytest

from genericsub.config import EngineConfig
from genericsub.errors import UnboundConstant
from genericsub.formulas import Exists, is_quantifier_free, parse, print_formula
from genericsub.qe import (
    decide_sentence,
    eliminate_all,
    eliminate_one,
    is_small,
    large_approx,
    replay,
    trace_from_json,
)
from genericsub.sandbox import eval_qfree, new_model, witness


def elim(text, cfg):
    return print_formula(eliminate_all(parse(text, cfg), cfg)[0])


@pytest.mark.parametrize("text,want", [
    ("exists x . G(x) /\\ G(x + c)", "Gl[1](c)"),
    ("exists x . G(x) /\\ ~(x = 0)", "true"),
    ("exists x . 2*x = c", "true"),
    ("forall x . G(x) -> G(2*x)", "true"),
    ("forall x . G(2*x) -> G(x)", "false"),
    ("exists x . G(x) /\\ 2*x = c", "Gl[2](c)"),
    ("exists x . Gl[2](x - c) /\\ Gl[3](x - d)", "Gl[1](c - d)"),
    ("exists x . G(x)", "true"),
    ("exists x . ~(x = x)", "false"),
])
def test_pure_rationals(text, want, cfg):
    assert elim(text, cfg) == want


def test_sqrt2_examples(cfg2):
    assert elim("exists x . ~Gl[1, a](x - c)", cfg2) == "true"
    assert elim("exists x . G(a*x) /\\ G(x + c)", cfg2) == "Gl[1, 1/2*a](c)"


def test_ring_dependence(cfg, Zhalf_cfg):
    text = "exists x . G(x) /\\ ~Gl[2](x)"
    assert elim(text, cfg) == "true"
    assert elim(text, Zhalf_cfg) == "false"


def test_ordered_examples(cfg_ord):
    assert elim("exists x . c < x /\\ x < d", cfg_ord) == "0 < -c + d"
    assert elim("exists x . G(x) /\\ 0 < x", cfg_ord) == "true"


def test_ordered_sqrt2(cfg2_ord):
    assert elim("exists x . G(x) /\\ G(a*x) /\\ 0 < x", cfg2_ord) == "false"


def test_quantifier_free_is_normalized(cfg):
    out = eliminate_all(parse("G(c) /\\ (c = d \\/ G(d))", cfg), cfg)[0]
    assert is_quantifier_free(out)
    again = eliminate_all(out, cfg)[0]
    assert print_formula(again) == print_formula(out)


def test_nested_quantifiers(cfg):
    assert elim("forall c . exists x . G(x) /\\ G(x + c)", cfg) == "false"
    # x = -c always puts 0 in G
    assert elim("exists c . forall x . ~G(x + c)", cfg) == "false"
    assert elim("exists c . forall x . x + c = 0 -> G(2*x)", cfg) == "true"
    assert elim("forall c . exists x . ~G(x) /\\ ~(x = c)", cfg) == "true"


def test_decide(cfg):
    assert decide_sentence(parse("exists x . G(x)", cfg), cfg)[0] is True
    assert decide_sentence(parse("exists x . ~(x = x)", cfg), cfg)[0] is False
    with pytest.raises(UnboundConstant):
        decide_sentence(parse("exists x . G(x) /\\ G(x + c)", cfg), cfg)


def test_decide_with_model(cfg):
    m = new_model(cfg, n_h=1)
    f = parse("exists x . G(x) /\\ G(x + c)", cfg)
    m.bind("c", m.gen("h1"))
    assert decide_sentence(f, cfg, m)[0] is True
    m.bind("c", m.gen("h1").scale(0.5))
    assert decide_sentence(f, cfg, m)[0] is False


def test_trace_json_roundtrip_and_replay(cfg2):
    f = parse("exists x . G(a*x) /\\ G(x + c) /\\ ~(x = d)", cfg2)
    out, tr = eliminate_all(f, cfg2)
    data = json.loads(tr.dumps())
    back = trace_from_json(data)
    assert back.to_json() == tr.to_json()
    assert print_formula(replay(back, cfg2, verify=True)) == print_formula(out)
    tags = {b["tag"] for e in data["eliminations"] for c in e["clauses"] for b in c["branches"]}
    assert tags <= {"Substitution", "Step1-InG", "Step2-SpanGB", "Step3-Generic"}


def test_trace_is_deterministic(cfg):
    f = parse("exists x . G(x) /\\ ~G(x + c) /\\ ~(x = d)", cfg)
    assert eliminate_all(f, cfg)[1].dumps() == eliminate_all(f, cfg)[1].dumps()


def test_free_module_profile_flag(cfg):
    _, tr = eliminate_all(parse("exists x . G(x) /\\ ~Gl[2](x)", cfg), cfg)
    assert tr.free_module_profile_used
    _, tr = eliminate_all(parse("exists x . G(x) /\\ G(x + c)", cfg), cfg)
    assert not tr.free_module_profile_used


def test_eliminate_one_matches_all(cfg):
    f = parse("exists x . Gl[2](x - c) /\\ ~G(x)", cfg)
    one, entry = eliminate_one(f, cfg)
    assert print_formula(one) == elim("exists x . Gl[2](x - c) /\\ ~G(x)", cfg)
    assert entry.var == "x"


@pytest.mark.parametrize("text,kind,approx", [
    ("~(x = 0) /\\ G(x)", "Small", "false"),
    ("~(x = c) /\\ ~G(x)", "Large", "~(c - x = 0)"),
    ("false", "Small", "false"),
    ("~G(x)", "Large", "true"),
    ("f[1;1](x) = c", "Large", "c = 0"),
])
def test_small_large(text, kind, approx, cfg):
    f = parse(text, cfg)
    assert is_small(f, "x", cfg) == kind
    assert print_formula(large_approx(f, "x", cfg)) == approx


def test_witness_examples(cfg):
    m = new_model(cfg, n_h=1)
    h1 = m.gen("h1")
    body = parse("G(x) /\\ ~(x = c)", cfg)
    w = witness(Exists("x", body), m, {"c": h1})
    assert eval_qfree(body, {"c": h1, "x": w}, m)
    body = parse("2*x = c", cfg)
    w = witness(Exists("x", body), m, {"c": h1})
    assert w == h1.scale(0.5)
    body = parse("~Gl[1](x - c)", cfg)
    w = witness(Exists("x", body), m, {"c": h1})
    assert any(g in m.v for g in w.coeffs)

"""Property suites shared by the command line and the acceptance tests.

Every suite returns a SuiteResult with pass/fail counts, the first
counterexample and a few labelled counts for plotting.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from math import gcd
from typing import Optional

from .config import EngineConfig, sqrt2_config
from .errors import NoWitness
from .exactnum import FieldSpec
from .formulas import Exists, Forall, Not, parse, print_formula
from .mordell import mordell_lang_reduce


@dataclass
class SuiteResult:
    suite: str
    passed: int = 0
    failed: int = 0
    counterexample: Optional[dict] = None
    counts: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)
    failures_by_kind: dict = field(default_factory=dict)
    seconds: float = 0.0

    @property
    def ok(self) -> bool:
        return self.failed == 0

    def fail(self, example: dict) -> None:
        self.failed += 1
        kind = example.get("kind", self.suite)
        self.failures_by_kind[kind] = self.failures_by_kind.get(kind, 0) + 1
        if self.counterexample is None:
            self.counterexample = example

    def to_json(self) -> dict:
        return {
            "suite": self.suite,
            "passed": self.passed,
            "failed": self.failed,
            "ok": self.ok,
            "first_counterexample": self.counterexample,
            "failures_by_kind": dict(sorted(self.failures_by_kind.items())),
            "counts": self.counts,
            "notes": self.notes,
        }


# ---------------------------------------------------------------- Mordell-Lang exactness


def small_rationals(bound: int = 3) -> list[Fraction]:
    return sorted({Fraction(p, q) for p in range(-bound, bound + 1) for q in range(1, bound + 1)})


def _ml_check(lams, points) -> Optional[tuple]:
    """First coefficient vector where the integer system and the F-relation disagree."""
    sysm = mordell_lang_reduce(lams)
    # one common denominator for every coordinate keeps the relation and allows int arithmetic
    den = 1
    for l in lams:
        for q in l.coords:
            den = den * q.denominator // gcd(den, q.denominator)
    rel = [[int(l.coords[k] * den) for l in lams] for k in range(lams[0].spec.degree)]
    rows = [list(r) for r in sysm.rows]
    for x in points:
        truth = all(sum(c * xi for c, xi in zip(r, x)) == 0 for r in rel)
        mine = all(sum(c * xi for c, xi in zip(r, x)) == 0 for r in rows)
        if truth != mine:
            return tuple(x)
    return None


def mordell_exactness(spec: FieldSpec, exhaustive_len: int = 2, sampled_lens=(3, 4), samples: int = 2000,
                      box: int = 3, coord_bound: int = 3, seed: int = 0) -> SuiteResult:
    """Solution set of the reduced integer system against the F-relation itself.

    Both sets split generator by generator, so checking coefficient vectors in
    the box at a single generator covers every tuple on any number of generators.
    Lengths up to exhaustive_len run over every scalar tuple; longer ones are sampled.
    """
    t0 = time.time()
    res = SuiteResult("mordell")
    qs = small_rationals(coord_bound)
    scalars = [spec.elem(c) for c in product(qs, repeat=spec.degree)]
    rng = random.Random(seed)
    for n in range(1, exhaustive_len + 1):
        points = list(product(range(-box, box + 1), repeat=n))
        cnt = 0
        for lams in product(scalars, repeat=n):
            if any(l.is_zero() for l in lams):
                continue
            cnt += 1
            bad = _ml_check(lams, points)
            if bad is None:
                res.passed += 1
            else:
                res.fail({"lambda": [str(l) for l in lams], "g": list(bad)})
        res.counts[f"length {n} (all)"] = cnt
    for n in sampled_lens:
        points = list(product(range(-box, box + 1), repeat=n))
        cnt = 0
        for _ in range(samples):
            lams = tuple(rng.choice(scalars) for _ in range(n))
            if any(l.is_zero() for l in lams):
                continue
            cnt += 1
            bad = _ml_check(lams, points)
            if bad is None:
                res.passed += 1
            else:
                res.fail({"lambda": [str(l) for l in lams], "g": list(bad)})
        res.counts[f"length {n} (sampled)"] = cnt
    total = len(scalars) ** 4
    res.notes.append(f"full domain at length 4 has {total} scalar tuples; lengths > {exhaustive_len} are sampled")
    res.seconds = time.time() - t0
    return res


# ---------------------------------------------------------------- QE round trip


def qe_roundtrip(cfg: EngineConfig, candidates_per: int = 50, check_witness: bool = True,
                 check_replay: bool = True) -> SuiteResult:
    """Complementarity, witness soundness, refutation sampling and trace replay on the corpus."""
    from .corpus import candidates, corpus, parameter_sets
    from .qe import eliminate_all, replay
    from .sandbox import eval_qfree, new_model, witness

    t0 = time.time()
    res = SuiteResult("qe-roundtrip")
    model = new_model(cfg)
    psets = parameter_sets(model)
    comp = wit = ref = rep = 0
    for body in corpus(cfg):
        phi = parse(body, cfg)
        ex = Exists("x", phi)
        r1, tr = eliminate_all(ex, cfg)
        r2, _ = eliminate_all(Forall("x", Not(phi)), cfg)
        if check_replay:
            again = replay(tr, cfg, verify=True)
            if print_formula(again) != print_formula(r1):
                res.fail({"formula": body, "kind": "replay", "got": print_formula(again), "want": print_formula(r1)})
            else:
                rep += 1
        for asg in psets:
            names = {k: v.text() for k, v in asg.items()}
            d1 = eval_qfree(r1, asg, model)
            d2 = eval_qfree(r2, asg, model)
            if d1 == d2:
                res.fail({"formula": body, "kind": "complementarity", "params": names})
                continue
            comp += 1
            if not check_witness:
                res.passed += 1
                continue
            if d1:
                try:
                    w = witness(ex, model, asg)
                    ok = eval_qfree(phi, {**asg, "x": w}, model)
                except NoWitness:
                    ok = False
                if not ok:
                    res.fail({"formula": body, "kind": "witness", "params": names})
                    continue
                wit += 1
            else:
                hit = next((c for c in candidates(model, asg, candidates_per)
                            if eval_qfree(phi, {**asg, "x": c}, model)), None)
                if hit is not None:
                    res.fail({"formula": body, "kind": "refutation", "params": names, "x": hit.text()})
                    continue
                ref += 1
            res.passed += 1
    res.counts = {"complementary": comp, "witnessed": wit, "refuted": ref, "replayed": rep,
                  "formulas": len(corpus(cfg))}
    res.seconds = time.time() - t0
    return res


# ---------------------------------------------------------------- small / large approximation

APPROX_FORMULAS = [
    "G(x)",
    "~G(x)",
    "x = c",
    "~(x = c)",
    "G(x) \\/ x = c",
    "~G(x - c) /\\ ~(x = d)",
    "f[1;1](x) = c",
    "f[1;1](x) = 0",
    "Gl[2](x - c) /\\ ~G(x)",
    "~Gl[2](x) /\\ ~(x = c + d)",
    "G(x + c) \\/ ~G(x - d)",
    "pp{1,-1|-2|0}(x, c)",
    "~pp{1,-1|-2|0}(x, c)",
    "f[1;1](x + c) = d",
    "~(f[1;1](x) = c) /\\ ~(x = d)",
    "G(2*x) /\\ ~G(x)",
    "2*x = c \\/ ~G(x)",
    "G(x) -> x = c",
    "~G(x) /\\ ~G(x + c) /\\ ~G(x + d)",
    "(G(x) \\/ G(x + c)) /\\ ~(x = 0)",
]


def _v_part(e, model):
    from .sandbox import VElem

    return VElem(model.spec, {g: c for g, c in e.coeffs.items() if g in model.v})


def approx_suite(cfg: EngineConfig, samples: int = 1000, seed: int = 0, formulas=None) -> SuiteResult:
    """Points where f and large_approx(f) disagree must lie in span_F(params + G)."""
    from .corpus import parameter_sets
    from .qe import large_approx
    from .sandbox import _frank, eval_qfree, new_model

    t0 = time.time()
    res = SuiteResult("approx")
    rng = random.Random(seed)
    model = new_model(cfg)
    psets = parameter_sets(model)
    pool_v = model.fresh_generic(2)
    hs = [model.gen(g) for g in model.h[:3]]
    coeffs = [Fraction(k, q) for k in range(-3, 4) for q in (1, 2)]
    diffs = 0
    for body in formulas or APPROX_FORMULAS:
        f = parse(body, cfg)
        big = large_approx(f, "x", cfg)
        for i in range(samples):
            asg = psets[i % len(psets)]
            params = [asg[k] for k in sorted(asg)]
            x = sum((b.scale(rng.choice(coeffs)) for b in hs + params), start=model.gen(model.h[0]).scale(0))
            if rng.random() < 0.5:
                for v in pool_v:
                    x = x + v.scale(rng.choice(coeffs))
            point = {**asg, "x": x}
            if eval_qfree(f, point, model) == eval_qfree(big, point, model):
                res.passed += 1
                continue
            diffs += 1
            pv = [_v_part(p, model) for p in params]
            if _frank(pv + [_v_part(x, model)], model) == _frank(pv, model):
                res.passed += 1
            else:
                res.fail({"formula": body, "approx": print_formula(big), "x": x.text(),
                          "params": {k: v.text() for k, v in asg.items()}})
    res.counts = {"formulas": len(formulas or APPROX_FORMULAS), "points in difference": diffs}
    res.seconds = time.time() - t0
    return res


# ---------------------------------------------------------------- sandbox suites


def axioms_suite(cfg: EngineConfig, samples: int = 10_000, box: int = 3, generators: int = 3, seed: int = 0) -> SuiteResult:
    from .sandbox import check_axioms, new_model

    t0 = time.time()
    res = SuiteResult("axioms")
    rep = check_axioms(new_model(cfg), samples=samples, box=box, generators=generators, seed=seed)
    res.passed = rep.freeness_samples - len(rep.freeness_violations) + rep.density_passes + rep.codensity_passes
    for v in rep.freeness_violations:
        res.fail({"axiom": "freeness", **v})
    for v in rep.density_failures:
        res.fail({"axiom": "density", **v})
    for v in rep.codensity_failures:
        res.fail({"axiom": "codensity", **v})
    res.counts = {
        "freeness samples": rep.freeness_samples,
        "density passes": rep.density_passes,
        "codensity passes": rep.codensity_passes,
    }
    res.seconds = time.time() - t0
    return res


def halfgraph_suite(cfg: EngineConfig, samples: int = 10_000, box: int = 5, seed: int = 0) -> SuiteResult:
    from .sandbox import halfgraph_probe, new_model

    t0 = time.time()
    res = SuiteResult("halfgraph")
    rep = halfgraph_probe(new_model(cfg), samples=samples, box=box, seed=seed)
    res.passed = rep.samples - len(rep.violations)
    for v in rep.violations:
        res.fail(v)
    res.counts = {"samples": rep.samples, "hypotheses met": rep.hypotheses_met, "violations": len(rep.violations)}
    res.seconds = time.time() - t0
    return res


def indep_scenarios(cfg: EngineConfig) -> list[tuple[str, tuple, tuple]]:
    """(name, expected (independent, failed condition), observed) for the three fixtures."""
    from .sandbox import indep_G, new_model

    out = []
    m = new_model(cfg, n_h=2)
    h1, h2 = m.gen("h1"), m.gen("h2")
    v0 = [h1]
    d = m.fresh_generic(1)[0]
    a = m.fresh_generic(1)[0]
    r = indep_G([a], v0, v0 + [d], m)
    out.append(("fresh generic", (True, None), (r.independent, r.failed)))
    m2 = new_model(cfg, n_h=1, n_v=1)
    a2 = m2.gen("v2")
    D2 = [m2.gen("h1") - a2]
    r = indep_G([a2], [], D2, m2)
    out.append(("coset", (False, 3), (r.independent, r.failed)))
    m3 = new_model(cfg, n_h=2)
    a3 = m3.gen("h1").scale(2) + m3.gen("h2")
    r = indep_G([a3], [], [m3.gen("h2")], m3)
    out.append(("heir", (False, 2), (r.independent, r.failed)))
    return out


def indep_suite(cfg: EngineConfig) -> SuiteResult:
    t0 = time.time()
    res = SuiteResult("indep")
    for name, want, got in indep_scenarios(cfg):
        if want == got:
            res.passed += 1
        else:
            res.fail({"scenario": name, "expected": list(want), "observed": list(got)})
        res.counts[name] = int(want == got)
    res.seconds = time.time() - t0
    return res


SUITES = ("axioms", "halfgraph", "mordell", "qe-roundtrip", "indep")


def run_suite(name: str, cfg: EngineConfig, bounds: Optional[dict] = None) -> SuiteResult:
    b = dict(bounds or {})
    seed = int(b.pop("seed", 0))
    if name == "axioms":
        return axioms_suite(cfg, samples=int(b.get("samples", cfg.limits.samples)), box=int(b.get("box", 3)),
                            generators=int(b.get("generators", 3)), seed=seed)
    if name == "halfgraph":
        return halfgraph_suite(cfg, samples=int(b.get("samples", cfg.limits.samples)), box=int(b.get("box", 5)), seed=seed)
    if name == "mordell":
        spec = cfg.field if cfg.field.degree > 1 else sqrt2_config().field
        return mordell_exactness(spec, exhaustive_len=int(b.get("exhaustive", 2)),
                                 samples=int(b.get("samples", 2000)), box=int(b.get("box", 3)), seed=seed)
    if name == "qe-roundtrip":
        return qe_roundtrip(cfg, candidates_per=int(b.get("candidates", 50)))
    if name == "indep":
        return indep_suite(cfg)
    raise ValueError(f"unknown suite {name!r}; expected one of {', '.join(SUITES)}")

"""Acceptance criteria 1-9.

Each test records one PASS/FAIL line; the lines are printed in the pytest
terminal summary, and directly when this file is run as a script.
"""

import itertools
import random
import sys
import time
from fractions import Fraction

import pytest

from genericsub.config import EngineConfig, sqrt2_config
from genericsub.exactnum import FieldSpec
from genericsub.intlinalg import det, hnf, matmul, matvec, snf, solve_integer
from genericsub.sandbox import new_model, types_equal
from genericsub.suites import (
    APPROX_FORMULAS,
    approx_suite,
    axioms_suite,
    halfgraph_suite,
    indep_scenarios,
    mordell_exactness,
    qe_roundtrip,
    small_rationals,
)

try:
    from conftest import ACCEPTANCE
except ImportError:  # run as a script from elsewhere
    ACCEPTANCE = {}


def report(n: int, ok: bool, detail: str) -> None:
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'} - {detail}"
    ACCEPTANCE[n] = line
    print(line)


CONFIGS = {
    "Q/Z": EngineConfig(),
    "Q(sqrt2)/Z": sqrt2_config(),
    "Q/Z ordered": EngineConfig(FieldSpec.rationals(True)),
    "Q(sqrt2)/Z ordered": sqrt2_config(ordered=True),
}


@pytest.fixture(scope="module")
def roundtrips():
    return {name: qe_roundtrip(cfg) for name, cfg in CONFIGS.items()}


def test_criterion_1_mordell_lang_exactness():
    K = sqrt2_config().field
    t0 = time.time()
    res = mordell_exactness(K, exhaustive_len=2, sampled_lens=(3, 4), samples=5000, box=3)
    n_scalars = len(small_rationals(3)) ** 2
    full = sum(n_scalars ** n for n in range(1, 5))
    detail = (f"{res.passed + res.failed} tuples checked ({', '.join(f'{k}: {v}' for k, v in res.counts.items())}), "
              f"{res.failed} mismatches in {time.time() - t0:.0f}s; the literal domain has {full} tuples, "
              f"so lengths 3-4 are sampled rather than exhaustive")
    assert res.ok, res.counterexample
    report(1, False, detail)
    pytest.xfail("exhaustive coverage of all length-4 tuples is out of reach at desk scale; reduced scope passed")


def test_criterion_2_complementarity(roundtrips):
    bad = {n: r.failures_by_kind.get("complementarity", 0) + r.failures_by_kind.get("replay", 0) for n, r in roundtrips.items()}
    sizes = {n: r.counts["formulas"] for n, r in roundtrips.items()}
    cases = sum(r.counts["complementary"] for r in roundtrips.values())
    ok = all(v == 0 for v in bad.values()) and min(sizes.values()) >= 50
    report(2, ok, f"{cases} (formula, parameter) cases over {len(roundtrips)} configurations, corpus sizes {sizes}, violations {bad}")
    assert ok, {n: r.counterexample for n, r in roundtrips.items() if r.failed}


def test_criterion_3_witness_and_refutation(roundtrips):
    wit = sum(r.counts["witnessed"] for r in roundtrips.values())
    ref = sum(r.counts["refuted"] for r in roundtrips.values())
    bad = sum(r.failures_by_kind.get("witness", 0) + r.failures_by_kind.get("refutation", 0) for r in roundtrips.values())
    report(3, bad == 0, f"{wit} witnesses validated, {ref} false cases survived 50-candidate falsification, {bad} violations")
    assert bad == 0


def test_criterion_4_freeness():
    res = axioms_suite(sqrt2_config(), samples=10_000, box=3, generators=3)
    free_bad = res.failures_by_kind.get("axioms", 0)
    n = res.counts["freeness samples"]
    ok = res.ok and n == 10_000
    report(4, ok, f"{n} independent (lambda, g) samples over Q(sqrt2), {free_bad} violations; "
                  f"density passes {res.counts['density passes']}, codensity passes {res.counts['codensity passes']}")
    assert ok, res.counterexample


def test_criterion_5_halfgraph():
    res = halfgraph_suite(EngineConfig(), samples=10_000, box=5)
    report(5, res.ok, f"{res.counts['samples']} quadruples, {res.counts['hypotheses met']} met the hypotheses, {res.failed} violations")
    assert res.ok, res.counterexample


def _smith_ok(S):
    diag = [S[i][i] for i in range(min(len(S), len(S[0])))]
    off = all(S[i][j] == 0 for i in range(len(S)) for j in range(len(S[0])) if i != j)
    nz = [d for d in diag if d]
    return off and all(d >= 0 for d in diag) and diag[: len(nz)] == nz and all(b % a == 0 for a, b in zip(nz, nz[1:]))


def _brute_solvable(A, b, box=50):
    for x, y in itertools.product(range(-box, box + 1), repeat=2):
        rest = [b[i] - A[i][0] * x - A[i][1] * y for i in range(2)]
        col = [A[0][2], A[1][2]]
        if col == [0, 0]:
            if rest == [0, 0]:
                return True
            continue
        i = 0 if col[0] else 1
        if rest[i] % col[i] == 0:
            z = rest[i] // col[i]
            if -box <= z <= box and all(rest[j] == col[j] * z for j in range(2)):
                return True
    return False


def test_criterion_6_normal_forms():
    rng = random.Random(606)
    bad = 0
    for _ in range(1000):
        r, c = rng.randint(1, 6), rng.randint(1, 6)
        M = [[rng.randint(-20, 20) for _ in range(c)] for _ in range(r)]
        S, U, V = snf(M)
        H, W = hnf(M)
        if not (matmul(matmul(U, M), V) == S and abs(det(U)) == 1 and abs(det(V)) == 1 and _smith_ok(S)
                and matmul(W, M) == H and abs(det(W)) == 1):
            bad += 1
    solve_bad = 0
    for _ in range(1000):
        A = [[rng.randint(-5, 5) for _ in range(3)] for _ in range(2)]
        b = matvec(A, [rng.randint(-3, 3) for _ in range(3)]) if rng.random() < 0.5 else [rng.randint(-10, 10) for _ in range(2)]
        x = solve_integer(A, b)
        if x is not None:
            solve_bad += matvec(A, x) != b
        else:
            solve_bad += _brute_solvable(A, b)
    ok = bad == 0 and solve_bad == 0
    report(6, ok, f"1000 fuzzed matrices up to 6x6: {bad} recomposition failures; 1000 systems: {solve_bad} disagreements with brute force")
    assert ok


# (config, tuple in model A, tuple in model B, expected equal, expected explanation)
TYPE_PAIRS = [
    ("Q", ["h1"], ["h2"], True, None),
    ("Q", ["h1", "v4"], ["h2", "v5"], True, None),
    ("K", ["h1 + a*h2"], ["h3 + a*h1"], True, None),
    ("Q", ["2*h1 + h2", "h2"], ["2*h2 + h1", "h1"], True, None),
    ("Q", ["v4 + h1"], ["v5 + h2"], True, None),
    ("Q", ["1/2*h1"], ["1/2*h3"], True, None),
    ("Q", ["h1", "h1 + h2"], ["h2", "h2 + h1"], True, None),
    ("Q", ["v4", "3*v4 + h1"], ["v5", "3*v5 + h3"], True, None),
    ("K", ["a*v4 + h1"], ["a*v5 + h2"], True, None),
    ("Q", ["h1 - h2", "h1 + h2"], ["h3 - h1", "h3 + h1"], True, None),
    ("Q", ["v4"], ["v4 + h1"], True, None),
    ("Q", ["2*h1"], ["h1"], False, "x1 ∈ 2G"),
    ("Q", ["v4"], ["h1"], False, "G(x1)"),
    ("Q", ["3*h1"], ["h1"], False, "x1 ∈ 3G"),
    ("Q", ["h1", "2*h2"], ["h1", "h2"], False, "x2 ∈ 2G"),
    ("Q", ["h1", "h1 + 2*h2"], ["h1", "h2"], False, "x1 + x2 ∈ 2G"),
    ("Q", ["h1", "h1"], ["h1", "h2"], False, "different F-linear relations"),
    ("Q", ["1/2*h1"], ["h1"], False, "G(x1)"),
    ("K", ["h1 + a*h2"], ["h1 + 2*a*h2"], False, "f[1, a; 2](x1) ∈ 2G"),
    ("Qo", ["h1"], ["-h1"], False, "order:"),
]


def test_criterion_7_type_equality():
    cfgs = {"Q": EngineConfig(), "K": sqrt2_config(), "Qo": EngineConfig(FieldSpec.rationals(True))}
    errors = []
    for key, ta, tb, want, expl in TYPE_PAIRS:
        A, B = new_model(cfgs[key], n_h=3, n_v=2), new_model(cfgs[key], n_h=3, n_v=2)
        r = types_equal([A.element(t) for t in ta], A, [B.element(t) for t in tb], B)
        if r.equal != want or (expl is not None and not r.explanation.startswith(expl)):
            errors.append((ta, tb, r.equal, r.explanation))
    report(7, not errors and len(TYPE_PAIRS) == 20, f"{len(TYPE_PAIRS)} fixture pairs, {len(errors)} errors")
    assert not errors, errors


def test_criterion_8_small_large():
    results = [approx_suite(cfg, samples=1000) for cfg in (EngineConfig(), sqrt2_config())]
    bad = sum(r.failed for r in results)
    hits = sum(r.counts["points in difference"] for r in results)
    report(8, bad == 0, f"{len(APPROX_FORMULAS)} formulas x 1000 samples in 2 configurations; "
                        f"{hits} points in the symmetric difference, {bad} outside span(params + G)")
    assert bad == 0, [r.counterexample for r in results if r.failed]


def test_criterion_9_independence():
    got = indep_scenarios(EngineConfig())
    wrong = [(name, want, obs) for name, want, obs in got if want != obs]
    report(9, not wrong, "; ".join(f"{name}: {obs}" for name, _, obs in got))
    assert not wrong


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-s"]))

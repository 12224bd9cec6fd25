import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from genericsub.errors import ArityMismatch, MultiVariable, NotClosed
from genericsub.exactnum import RingSpec
from genericsub.formulas import PPConstraint
from genericsub.modth import (
    GVector,
    IndexStatement,
    Sat,
    Unsat,
    canonical_pp_type,
    decide_pp_sentence,
    describe_pp_difference,
    eval_pp,
    pp_solution_set,
    sat_constraints,
    subgroup_pp,
)

h1, h2 = GVector.gen("h1"), GVector.gen("h2")


def pp(A, B, c):
    return PPConstraint.make(A, B, c)


def in_dG(d):
    return subgroup_pp(d)


def coset_pp():
    # x - p in 2G with p the parameter slot
    return pp([[1]], [[-2]], [1])


def test_eval_examples():
    assert eval_pp(in_dG(2), [h1.scale(2)])
    assert not eval_pp(in_dG(2), [h1])
    assert not eval_pp(in_dG(3), [h1 + h2.scale(3)])


def test_eval_arity():
    with pytest.raises(ArityMismatch):
        eval_pp(in_dG(2), [h1, h2])


def test_solution_set_parity():
    twice = pp([[2]], [[]], [1])  # 2x = p
    assert pp_solution_set(twice, [None, h1]) is None


def test_solution_set_coset():
    s = pp_solution_set(coset_pp(), [None, h1])
    assert s.modulus == 2 and s.residues == (("h1", 1),)
    for cand in [h1, h1.scale(3), h1 + h2.scale(2), h1 + h2, h2, GVector(), h1.scale(-1)]:
        assert s.contains(cand, RingSpec.integers()) == eval_pp(coset_pp(), [cand, h1])


def test_solution_set_closed():
    s = pp_solution_set(pp([[]], [[1]], [0]), [])
    assert s.is_full


def test_solution_set_two_slots():
    with pytest.raises(MultiVariable):
        pp_solution_set(pp([[1, 1]], [[]], [0]), [None, None])


def _brute_sat(pos, neg, box=8):
    for c1 in range(-box, box + 1):
        for c2 in range(-box, box + 1):
            x = h1.scale(c1) + GVector.gen("h9", c2)
            if all(eval_pp(p, [x] + a[1:]) for p, a in pos) and not any(eval_pp(p, [x] + a[1:]) for p, a in neg):
                return True
    return False


def test_sat_examples():
    r = sat_constraints([(coset_pp(), [None, h1]), (in_dG(4), [None])], [])
    assert isinstance(r, Unsat)
    assert not _brute_sat([(coset_pp(), [None, h1]), (in_dG(4), [None])], [])
    r = sat_constraints([(in_dG(2), [None])], [(in_dG(4), [None])])
    assert isinstance(r, Sat)
    assert eval_pp(in_dG(2), [r.witness]) and not eval_pp(in_dG(4), [r.witness])
    assert r.witness == GVector.gen("h_fresh", 2)
    assert sat_constraints([], []) == Sat(GVector())


def test_sat_random_against_brute():
    rng = random.Random(8)
    for _ in range(300):
        pos, neg = [], []
        for lst, k in ((pos, rng.randint(0, 2)), (neg, rng.randint(0, 2))):
            for _ in range(k):
                d = rng.randint(1, 4)
                if rng.random() < 0.5:
                    lst.append((in_dG(d), [None]))
                else:
                    lst.append((pp([[1]], [[-d]], [1]), [None, h1.scale(rng.randint(-3, 3))]))
        r = sat_constraints(pos, neg)
        brute = _brute_sat(pos, neg)
        assert isinstance(r, Sat) == brute
        if isinstance(r, Sat):
            w = r.witness
            assert all(eval_pp(p, [w] + a[1:]) for p, a in pos)
            assert not any(eval_pp(p, [w] + a[1:]) for p, a in neg)


def test_pp_sentences():
    assert decide_pp_sentence(IndexStatement(subgroup_pp(1), subgroup_pp(2), 2))
    assert decide_pp_sentence(pp([[]], [[2]], [0]))
    assert not decide_pp_sentence(IndexStatement(subgroup_pp(1), subgroup_pp(2), 2), RingSpec.localization([2]))
    with pytest.raises(NotClosed):
        decide_pp_sentence(in_dG(2))


@pytest.mark.parametrize("d", [1, 2, 3, 6])
def test_index_of_self_is_one(d):
    assert not decide_pp_sentence(IndexStatement(subgroup_pp(d), subgroup_pp(d), 2))


def test_canonical_types():
    assert canonical_pp_type([h1]) == canonical_pp_type([h2])
    a, b = canonical_pp_type([h1.scale(2)]), canonical_pp_type([h1])
    assert a != b
    assert describe_pp_difference(a, b) == "x1 ∈ 2G"
    z = canonical_pp_type([GVector()])
    assert z.relations == ((1,),)


def test_canonical_type_permutation_invariant():
    rng = random.Random(2)
    gens = ["h1", "h2", "h3"]
    for _ in range(100):
        tup = [GVector({g: rng.randint(-3, 3) for g in gens}) for _ in range(2)]
        perm = dict(zip(gens, rng.sample(gens, 3)))
        moved = [GVector({perm[g]: c for g, c in t.coeffs.items()}) for t in tup]
        assert canonical_pp_type(tup) == canonical_pp_type(moved)


def _brute_eval(P, args):
    """Search y per generator: y1 over a wide range, y2 solved exactly."""
    gens = sorted(set().union(*(a.coeffs for a in args)) | {"h1"})
    for g in gens:
        rhs = []
        for i in range(P.n):
            v = sum(P.A[i][j] * args[j][g] for j in range(P.k))
            p = args[P.k][g] if P.has_param else 0
            rhs.append(P.c[i] * p - v)
        m = P.m
        ok = False
        if m == 0:
            ok = all(r == 0 for r in rhs)
        elif m == 1:
            ok = any(all(P.B[i][0] * y == rhs[i] for i in range(P.n)) for y in range(-200, 201))
        else:
            for y1 in range(-200, 201):
                rest = [rhs[i] - P.B[i][0] * y1 for i in range(P.n)]
                col = [P.B[i][1] for i in range(P.n)]
                if all(c == 0 for c in col):
                    ok = all(r == 0 for r in rest)
                else:
                    i0 = next(i for i, c in enumerate(col) if c)
                    if rest[i0] % col[i0] == 0:
                        y2 = rest[i0] // col[i0]
                        ok = all(col[i] * y2 == rest[i] for i in range(P.n))
                if ok:
                    break
        if not ok:
            return False
    return True


def test_eval_pp_against_search():
    rng = random.Random(12)
    def coef():
        return rng.randint(-3, 3)

    for _ in range(400):
        n, k, m = rng.randint(1, 2), rng.randint(1, 2), rng.randint(0, 2)
        c = [coef() for _ in range(n)] if rng.random() < 0.4 else [0] * n
        P = pp([[coef() for _ in range(k)] for _ in range(n)], [[coef() for _ in range(m)] for _ in range(n)], c)
        args = [GVector({"h1": rng.randint(-2, 2), "h2": rng.randint(-2, 2)}) for _ in range(P.arity)]
        assert eval_pp(P, args) == _brute_eval(P, args), (P.text(), args)


@given(st.integers(1, 12), st.integers(-20, 20))
def test_dG_membership(d, c):
    assert eval_pp(in_dG(d), [h1.scale(c)]) == (c % d == 0)

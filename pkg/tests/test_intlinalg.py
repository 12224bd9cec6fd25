import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from genericsub.errors import DimensionMismatch, RankMismatch
from genericsub.intlinalg import (
    CosetDesc,
    columns,
    coset_finite_cover,
    coset_subset,
    det,
    hnf,
    identity,
    kernel_basis,
    lattice_member,
    matmul,
    matvec,
    rref,
    snf,
    solve_integer,
    solve_rational,
)


def _cofactor_det(M):
    # cofactor expansion, fine for the tiny sizes used here
    n = len(M)
    if n == 0:
        return 1
    if n == 1:
        return M[0][0]
    return sum((-1) ** j * M[0][j] * _cofactor_det([r[:j] + r[j + 1:] for r in M[1:]]) for j in range(n))


def _is_smith(S):
    rows, cols = len(S), len(S[0]) if S else 0
    diag = []
    for i in range(rows):
        for j in range(cols):
            if i != j and S[i][j] != 0:
                return False
    for i in range(min(rows, cols)):
        diag.append(S[i][i])
    if any(d < 0 for d in diag):
        return False
    nz = [d for d in diag if d]
    if diag[: len(nz)] != nz:
        return False
    return all(nz[i + 1] % nz[i] == 0 for i in range(len(nz) - 1))


def test_rref_identity():
    I = identity(3)
    R, piv = rref(I)
    assert R == I and piv == [0, 1, 2]


def test_kernel_of_row():
    (v,) = kernel_basis([[1, 1]])
    assert v[0] == -v[1] != 0


def test_solve_rational_diagonal():
    assert solve_rational([[2, 0], [0, 3]], [1, 1]) == [Fraction(1, 2), Fraction(1, 3)]


def test_solve_rational_dimension_check():
    with pytest.raises(DimensionMismatch):
        solve_rational([[1, 0]], [1, 2])


def test_snf_small_example():
    S, U, V = snf([[2, 4], [6, 8]])
    assert [S[0][0], S[1][1]] == [2, 4]
    assert matmul(matmul(U, [[2, 4], [6, 8]]), V) == S


def test_snf_identity():
    S, _, _ = snf(identity(3))
    assert S == identity(3)


def test_hnf_zero():
    H, U = hnf([[0, 0], [0, 0]])
    assert H == [[0, 0], [0, 0]] and U == identity(2)


def test_hnf_shape():
    M = [[4, 6, 2], [2, 3, 5], [6, 9, 7]]
    H, U = hnf(M)
    assert matmul(U, M) == H
    assert abs(det(U)) == 1
    # echelon with positive pivots and reduced entries above them
    piv = []
    for r in H:
        nz = [j for j, x in enumerate(r) if x]
        if nz:
            piv.append(nz[0])
    assert piv == sorted(piv)
    for i, p in enumerate(piv):
        assert H[i][p] > 0
        assert all(0 <= H[k][p] < H[i][p] for k in range(i))


def test_solve_integer_examples():
    assert solve_integer([[2]], [1]) is None
    x = solve_integer([[2, 3]], [1])
    assert 2 * x[0] + 3 * x[1] == 1
    assert lattice_member([2, 0], columns([(2, 0), (0, 2)], 2))


def test_coset_examples():
    Z, twoZ = CosetDesc([0], [[1]]), CosetDesc([0], [[2]])
    assert coset_subset(twoZ, Z)
    assert not coset_subset(Z, twoZ)
    assert coset_finite_cover(Z, [twoZ, CosetDesc([1], [[2]])])
    assert not coset_finite_cover(Z, [twoZ, CosetDesc([1], [[4]])])


def test_cover_empty_and_rank():
    Z = CosetDesc([0], [[1]])
    assert not coset_finite_cover(Z, [])
    with pytest.raises(RankMismatch):
        coset_subset(Z, CosetDesc([0, 0], [[1, 0]]))


def test_cover_infinite_index_discarded():
    plane = CosetDesc([0, 0], [[1, 0], [0, 1]])
    axis = CosetDesc([0, 0], [[1, 0]])
    assert not coset_finite_cover(plane, [axis, CosetDesc([0, 1], [[1, 0]])])


def _brute_cover(C, covers, box=12):
    gens = [list(v) for v in C.lattice]
    for coeffs in itertools.product(range(-box, box + 1), repeat=len(gens)):
        p = list(C.basepoint)
        for c, g in zip(coeffs, gens):
            p = [a + c * b for a, b in zip(p, g)]
        if not any(D.contains(p) for D in covers):
            return False
    return True


def test_cover_against_enumeration():
    rng = random.Random(4)
    for _ in range(150):
        n = rng.choice([1, 2])
        C = CosetDesc([rng.randint(-3, 3) for _ in range(n)], [[rng.randint(1, 3) if i == j else 0 for j in range(n)] for i in range(n)])
        covers = []
        for _ in range(rng.randint(1, 4)):
            L = [[rng.choice([1, 2, 3, 4]) if i == j else rng.choice([0, 0, 1]) for j in range(n)] for i in range(n)]
            covers.append(CosetDesc([rng.randint(-4, 4) for _ in range(n)], L))
        assert coset_finite_cover(C, covers) == _brute_cover(C, covers, box=12 if n == 1 else 6)


def test_cover_monotone():
    rng = random.Random(9)
    Z = CosetDesc([0], [[1]])
    for _ in range(100):
        covers = [CosetDesc([rng.randint(0, 5)], [[rng.randint(1, 6)]]) for _ in range(rng.randint(1, 4))]
        if coset_finite_cover(Z, covers):
            assert coset_finite_cover(Z, covers + [CosetDesc([rng.randint(0, 5)], [[rng.randint(1, 6)]])])


def random_matrix(rng, rows, cols, lo=-20, hi=20):
    return [[rng.randint(lo, hi) for _ in range(cols)] for _ in range(rows)]


def test_snf_hnf_fuzz():
    rng = random.Random(2024)
    for _ in range(1000):
        r, c = rng.randint(1, 6), rng.randint(1, 6)
        M = random_matrix(rng, r, c)
        if rng.random() < 0.2:
            # force rank deficiency
            M[-1] = [a + b for a, b in zip(M[0], M[-1 if r == 1 else 1])] if r > 1 else M[-1]
        S, U, V = snf(M)
        assert matmul(matmul(U, M), V) == S
        assert abs(det(U)) == 1 and abs(det(V)) == 1
        assert _is_smith(S)
        H, W = hnf(M)
        assert matmul(W, M) == H and abs(det(W)) == 1


def test_det_matches_cofactor():
    rng = random.Random(1)
    for _ in range(200):
        n = rng.randint(1, 5)
        M = random_matrix(rng, n, n, -6, 6)
        assert det(M) == _cofactor_det(M)


def test_solve_integer_vs_bruteforce():
    rng = random.Random(7)
    box = range(-50, 51)
    for _ in range(1000):
        A = random_matrix(rng, 2, 3, -5, 5)
        x0 = [rng.randint(-3, 3) for _ in range(3)]
        b = matvec(A, x0) if rng.random() < 0.5 else [rng.randint(-10, 10) for _ in range(2)]
        got = solve_integer(A, b)
        if got is not None:
            assert matvec(A, got) == b
            continue
        # no solution claimed: search the box, eliminating the last variable when possible
        found = False
        for x, y in itertools.product(box, box):
            rest = [b[i] - A[i][0] * x - A[i][1] * y for i in range(2)]
            col = [A[0][2], A[1][2]]
            if col == [0, 0]:
                if rest == [0, 0]:
                    found = True
            else:
                i = 0 if col[0] else 1
                if rest[i] % col[i] == 0:
                    z = rest[i] // col[i]
                    if -50 <= z <= 50 and all(rest[j] == col[j] * z for j in range(2)):
                        found = True
            if found:
                break
        assert not found, (A, b)


@given(st.lists(st.lists(st.integers(-20, 20), min_size=3, max_size=3), min_size=1, max_size=4))
def test_snf_property(M):
    S, U, V = snf(M)
    assert matmul(matmul(U, M), V) == S
    assert _is_smith(S)

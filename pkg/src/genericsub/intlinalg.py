"""Exact linear algebra over Q and Z.

Rational row reduction, kernels and solving, together with the integer
lattice toolkit used by the module layer: Hermite and Smith normal forms,
integer solving, lattice membership, and coset inclusion / finite cover
tests.  Matrices are plain lists of rows.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from math import gcd
from typing import Callable, Iterable, Optional, Sequence

from .errors import DimensionMismatch, RankMismatch, ResourceLimit

Matrix = list[list]

# integers wider than this abort the computation
BIT_LIMIT = 10**6
# residue enumeration cap for coset_finite_cover
RESIDUE_LIMIT = 200_000


def _shape(M: Sequence[Sequence]) -> tuple[int, int]:
    rows = len(M)
    if rows == 0:
        return 0, 0
    cols = len(M[0])
    for r in M:
        if len(r) != cols:
            raise DimensionMismatch("ragged matrix")
    return rows, cols


def _guard(x: int) -> int:
    if x.bit_length() > BIT_LIMIT:
        raise ResourceLimit(f"integer entry exceeds {BIT_LIMIT} bits")
    return x


def identity(n: int) -> Matrix:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def transpose(M: Sequence[Sequence], cols: Optional[int] = None) -> Matrix:
    if not M:
        return [[] for _ in range(cols or 0)]
    return [list(c) for c in zip(*M)]


def matmul(A: Sequence[Sequence], B: Sequence[Sequence]) -> Matrix:
    ra, ca = _shape(A)
    rb, cb = _shape(B)
    if ca != rb:
        raise DimensionMismatch(f"cannot multiply {ra}x{ca} by {rb}x{cb}")
    if rb == 0:
        return [[0] * (len(B[0]) if B else 0) for _ in range(ra)]
    Bt = transpose(B)
    return [[sum(a * b for a, b in zip(row, col)) for col in Bt] for row in A]


def matvec(A: Sequence[Sequence], v: Sequence) -> list:
    _, c = _shape(A)
    if A and c != len(v):
        raise DimensionMismatch("matrix/vector size mismatch")
    return [sum(a * x for a, x in zip(row, v)) for row in A]


# ---------------------------------------------------------------- rationals

def rref(M: Sequence[Sequence]) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form over Q and the pivot columns."""
    rows, cols = _shape(M)
    A = [[Fraction(x) for x in r] for r in M]
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r >= rows:
            break
        p = next((i for i in range(r, rows) if A[i][c] != 0), None)
        if p is None:
            continue
        A[r], A[p] = A[p], A[r]
        inv = 1 / A[r][c]
        A[r] = [x * inv for x in A[r]]
        for i in range(rows):
            if i != r and A[i][c] != 0:
                f = A[i][c]
                A[i] = [x - f * y for x, y in zip(A[i], A[r])]
        pivots.append(c)
        r += 1
    return A, pivots


def rank(M: Sequence[Sequence]) -> int:
    return len(rref(M)[1]) if M else 0


def kernel_basis(M: Sequence[Sequence], cols: Optional[int] = None) -> list[list[Fraction]]:
    """Basis of {v : M v = 0}; `cols` is needed when M has no rows."""
    rows, c = _shape(M)
    if rows == 0:
        n = cols or 0
        return [[Fraction(int(i == j)) for i in range(n)] for j in range(n)]
    R, pivots = rref(M)
    free = [j for j in range(c) if j not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * c
        v[f] = Fraction(1)
        for i, p in enumerate(pivots):
            v[p] = -R[i][f]
        basis.append(v)
    return basis


def solve_rational(M: Sequence[Sequence], b: Sequence) -> Optional[list[Fraction]]:
    """Some x with M x = b over Q, or None."""
    rows, cols = _shape(M)
    if rows != len(b):
        raise DimensionMismatch("right-hand side length differs from row count")
    if rows == 0:
        return [Fraction(0)] * (cols or 0)
    aug = [list(r) + [b[i]] for i, r in enumerate(M)]
    R, pivots = rref(aug)
    if cols in pivots:
        return None
    x = [Fraction(0)] * cols
    for i, p in enumerate(pivots):
        x[p] = R[i][cols]
    return x


def left_kernel(M: Sequence[Sequence], rows: Optional[int] = None) -> list[list[Fraction]]:
    """Basis of {w : w^T M = 0}."""
    r, c = _shape(M)
    if r == 0:
        return []
    if c == 0:
        return kernel_basis([], cols=r)
    return kernel_basis(transpose(M))


# ---------------------------------------------------------------- integers

def _egcd(a: int, b: int) -> tuple[int, int, int]:
    """(g, x, y) with a x + b y = g >= 0."""
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def hnf(M: Sequence[Sequence[int]]) -> tuple[Matrix, Matrix]:
    """Row Hermite normal form: H = U M with U unimodular.

    H is in row echelon form, pivots are positive and the entries above
    each pivot lie in [0, pivot).
    """
    rows, cols = _shape(M)
    H = [[int(x) for x in r] for r in M]
    U = identity(rows)
    r = 0
    for c in range(cols):
        if r >= rows:
            break
        nz = [i for i in range(r, rows) if H[i][c] != 0]
        if not nz:
            continue
        p = nz[0]
        H[r], H[p] = H[p], H[r]
        U[r], U[p] = U[p], U[r]
        for i in range(r + 1, rows):
            if H[i][c] == 0:
                continue
            a, b = H[r][c], H[i][c]
            g, x, y = _egcd(a, b)
            ag, bg = a // g, b // g
            Hr, Hi = H[r], H[i]
            H[r] = [_guard(x * u + y * v) for u, v in zip(Hr, Hi)]
            H[i] = [_guard(-bg * u + ag * v) for u, v in zip(Hr, Hi)]
            Ur, Ui = U[r], U[i]
            U[r] = [x * u + y * v for u, v in zip(Ur, Ui)]
            U[i] = [-bg * u + ag * v for u, v in zip(Ur, Ui)]
        if H[r][c] < 0:
            H[r] = [-u for u in H[r]]
            U[r] = [-u for u in U[r]]
        piv = H[r][c]
        for i in range(r):
            q = H[i][c] // piv
            if q:
                H[i] = [u - q * v for u, v in zip(H[i], H[r])]
                U[i] = [u - q * v for u, v in zip(U[i], U[r])]
        r += 1
    return H, U


def _pivot_combo(a: int, b: int) -> tuple[int, int, int]:
    # when the pivot already divides b keep it in place (plain elimination)
    if b % a == 0:
        return a, 1, 0
    return _egcd(a, b)


def snf(M: Sequence[Sequence[int]]) -> tuple[Matrix, Matrix, Matrix]:
    """Smith normal form: S = U M V, S diagonal with d1 | d2 | ..."""
    rows, cols = _shape(M)
    S = [[int(x) for x in r] for r in M]
    U = identity(rows)
    V = identity(cols)

    def swap_rows(i, j):
        S[i], S[j] = S[j], S[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in S:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]

    t = 0
    while t < min(rows, cols):
        entries = [(abs(S[i][j]), i, j) for i in range(t, rows) for j in range(t, cols) if S[i][j] != 0]
        if not entries:
            break
        _, i, j = min(entries)
        swap_rows(t, i)
        swap_cols(t, j)
        while True:
            done = True
            # clear column t below the pivot
            for i in range(t + 1, rows):
                if S[i][t] != 0:
                    a, b = S[t][t], S[i][t]
                    g, x, y = _pivot_combo(a, b)
                    ag, bg = a // g, b // g
                    St, Si = S[t], S[i]
                    S[t] = [_guard(x * u + y * v) for u, v in zip(St, Si)]
                    S[i] = [_guard(-bg * u + ag * v) for u, v in zip(St, Si)]
                    Ut, Ui = U[t], U[i]
                    U[t] = [x * u + y * v for u, v in zip(Ut, Ui)]
                    U[i] = [-bg * u + ag * v for u, v in zip(Ut, Ui)]
            # clear row t right of the pivot
            for j in range(t + 1, cols):
                if S[t][j] != 0:
                    done = False
                    a, b = S[t][t], S[t][j]
                    g, x, y = _pivot_combo(a, b)
                    ag, bg = a // g, b // g
                    for row in S:
                        u, v = row[t], row[j]
                        row[t], row[j] = _guard(x * u + y * v), _guard(-bg * u + ag * v)
                    for row in V:
                        u, v = row[t], row[j]
                        row[t], row[j] = x * u + y * v, -bg * u + ag * v
            if done and all(S[i][t] == 0 for i in range(t + 1, rows)):
                d = S[t][t]
                bad = next(
                    ((i, j) for i in range(t + 1, rows) for j in range(t + 1, cols) if S[i][j] % d != 0),
                    None,
                )
                if bad is None:
                    break
                # fold the offending row into the pivot row and redo
                i = bad[0]
                S[t] = [u + v for u, v in zip(S[t], S[i])]
                U[t] = [u + v for u, v in zip(U[t], U[i])]
        if S[t][t] < 0:
            S[t] = [-u for u in S[t]]
            U[t] = [-u for u in U[t]]
        t += 1
    return S, U, V


def snf_diagonal(M: Sequence[Sequence[int]]) -> list[int]:
    rows, cols = _shape(M)
    S, _, _ = snf(M)
    return [S[i][i] for i in range(min(rows, cols))]


def det(M: Sequence[Sequence[int]]) -> int:
    """Integer determinant by fraction-free elimination."""
    n, c = _shape(M)
    if n != c:
        raise DimensionMismatch("determinant of a non-square matrix")
    if n == 0:
        return 1
    A = [[int(x) for x in r] for r in M]
    sign, prev = 1, 1
    for k in range(n - 1):
        if A[k][k] == 0:
            p = next((i for i in range(k + 1, n) if A[i][k] != 0), None)
            if p is None:
                return 0
            A[k], A[p] = A[p], A[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                A[i][j] = (A[i][j] * A[k][k] - A[i][k] * A[k][j]) // prev
        prev = A[k][k]
    return sign * A[n - 1][n - 1]


def _default_member(q: Fraction) -> bool:
    return q.denominator == 1


def solve_over(
    A: Sequence[Sequence[int]],
    b: Sequence,
    member: Callable[[Fraction], bool] = _default_member,
    cols: Optional[int] = None,
) -> Optional[list[Fraction]]:
    """Some x with A x = b and every x_i satisfying `member`, via SNF.

    `member` describes a subring of Q that is a principal ideal domain
    containing Z (Z itself or a localization); the right-hand side may have
    entries in that ring.
    """
    rows, c = _shape(A)
    if rows != len(b):
        raise DimensionMismatch("right-hand side length differs from row count")
    if rows == 0:
        return [Fraction(0)] * (cols if cols is not None else 0)
    S, U, V = snf(A)
    ub = [sum(Fraction(u) * Fraction(x) for u, x in zip(row, b)) for row in U]
    y = [Fraction(0)] * c
    for i in range(rows):
        d = S[i][i] if i < c else 0
        if d == 0:
            if ub[i] != 0:
                return None
        else:
            q = ub[i] / d
            if not member(q):
                return None
            y[i] = q
    return [sum(Fraction(v) * yy for v, yy in zip(row, y)) for row in V]


def solve_integer(A: Sequence[Sequence[int]], b: Sequence[int], cols: Optional[int] = None) -> Optional[list[int]]:
    """Some integer x with A x = b, or None."""
    x = solve_over(A, b, cols=cols)
    if x is None:
        return None
    return [int(v) for v in x]


def lattice_member(v: Sequence[int], L: Sequence[Sequence[int]], member: Callable[[Fraction], bool] = _default_member) -> bool:
    """Is v in the lattice generated by the columns of L?"""
    if not L or not L[0]:
        return all(x == 0 for x in v)
    if len(L) != len(v):
        raise DimensionMismatch("vector and lattice live in different ranks")
    return solve_over(L, v, member) is not None


def integer_kernel(M: Sequence[Sequence[int]], cols: Optional[int] = None) -> list[list[int]]:
    """Z-basis of {x in Z^n : M x = 0}."""
    rows, c = _shape(M)
    if rows == 0:
        n = cols or 0
        return [[int(i == j) for i in range(n)] for j in range(n)]
    S, _, V = snf(M)
    r = sum(1 for i in range(min(rows, c)) if S[i][i] != 0)
    return [[V[i][j] for i in range(c)] for j in range(r, c)]


def columns(vectors: Iterable[Sequence[int]], n: int) -> Matrix:
    """Matrix whose columns are the given vectors of length n."""
    vs = [list(v) for v in vectors]
    return [[v[i] for v in vs] for i in range(n)]


def column_list(L: Sequence[Sequence[int]]) -> list[list[int]]:
    if not L:
        return []
    return [list(c) for c in zip(*L)]


def lattice_hnf(gens: Iterable[Sequence[int]], n: int) -> list[tuple[int, ...]]:
    """Canonical basis of the lattice spanned by `gens` in Z^n (nonzero HNF rows)."""
    rows = [list(map(int, g)) for g in gens]
    if not rows:
        return []
    H, _ = hnf(rows)
    return [tuple(r) for r in H if any(r)]


def lattice_sum(A: Sequence[Sequence[int]], B: Sequence[Sequence[int]], n: int) -> list[tuple[int, ...]]:
    return lattice_hnf(list(A) + list(B), n)


def lattice_intersection(A: Sequence[Sequence[int]], B: Sequence[Sequence[int]], n: int) -> list[tuple[int, ...]]:
    """Basis (as generator list) of span_Z(A) intersected with span_Z(B)."""
    A = [list(a) for a in A]
    B = [list(b) for b in B]
    if not A or not B:
        return []
    M = [[a[i] for a in A] + [-b[i] for b in B] for i in range(n)]
    ker = integer_kernel(M, cols=len(A) + len(B))
    out = []
    for k in ker:
        v = [sum(k[j] * A[j][i] for j in range(len(A))) for i in range(n)]
        out.append(v)
    return lattice_hnf(out, n)


def saturation(gens: Sequence[Sequence[int]], n: int) -> list[tuple[int, ...]]:
    """Basis of (span_Q(gens)) intersected with Z^n."""
    gens = [list(g) for g in gens if any(g)]
    if not gens:
        return []
    perp = left_kernel(columns(gens, n))
    if not perp:
        return [tuple(int(i == j) for i in range(n)) for j in range(n)]
    rows = []
    for w in perp:
        den = 1
        for x in w:
            den = den * x.denominator // gcd(den, x.denominator)
        rows.append([int(x * den) for x in w])
    return lattice_hnf(integer_kernel(rows, cols=n), n)


def localize_lattice(gens: Sequence[Sequence[int]], n: int, strip: Callable[[int], int]) -> list[tuple[int, ...]]:
    """Canonical integer basis of (L tensor Z_S) intersected with Z^n.

    `strip` removes the inverted primes from an integer.
    """
    gens = [list(g) for g in gens if any(g)]
    if not gens:
        return []
    M = columns(gens, n)
    S, U, _ = snf(M)
    Uinv = _unimodular_inverse(U)
    out = []
    for i in range(min(n, len(gens))):
        d = S[i][i]
        if d == 0:
            continue
        d = strip(d)
        out.append([Uinv[r][i] * d for r in range(n)])
    return lattice_hnf(out, n)


def _unimodular_inverse(U: Sequence[Sequence[int]]) -> Matrix:
    n = len(U)
    aug = [list(map(Fraction, r)) + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(U)]
    R, _ = rref(aug)
    return [[int(x) for x in r[n:]] for r in R]


def unimodular_inverse(U: Sequence[Sequence[int]]) -> Matrix:
    return _unimodular_inverse(U)


def lattice_contains(big: Sequence[Sequence[int]], small: Sequence[Sequence[int]], n: int,
                     member: Callable[[Fraction], bool] = _default_member) -> bool:
    """Is span(small) contained in span(big)?  Generators are given as vectors."""
    small = [list(s) for s in small if any(s)]
    if not small:
        return True
    big = [list(b) for b in big if any(b)]
    if not big:
        return False
    L = columns(big, n)
    return all(solve_over(L, s, member) is not None for s in small)


# ---------------------------------------------------------------- cosets

@dataclass(frozen=True)
class CosetDesc:
    """basepoint + (lattice spanned by generator vectors) inside Z^n.

    The lattice is stored as its canonical HNF basis, so equal cosets of
    equal lattices compare equal after `normalized`.
    """

    basepoint: tuple[int, ...]
    lattice: tuple[tuple[int, ...], ...]

    def __init__(self, basepoint: Sequence[int], lattice: Iterable[Sequence[int]] = ()):
        n = len(basepoint)
        gens = [tuple(int(x) for x in g) for g in lattice]
        for g in gens:
            if len(g) != n:
                raise RankMismatch("lattice generator length differs from basepoint length")
        object.__setattr__(self, "basepoint", tuple(int(x) for x in basepoint))
        object.__setattr__(self, "lattice", tuple(lattice_hnf(gens, n)))

    @property
    def rank(self) -> int:
        return len(self.basepoint)

    def contains(self, v: Sequence[int]) -> bool:
        diff = [a - b for a, b in zip(v, self.basepoint)]
        return lattice_member(diff, columns(self.lattice, self.rank))

    def normalized(self) -> "CosetDesc":
        """Same coset with the basepoint reduced against the HNF basis."""
        b = list(self.basepoint)
        for row in self.lattice:
            p = next(i for i, x in enumerate(row) if x)
            q = b[p] // row[p]
            b = [x - q * y for x, y in zip(b, row)]
        return CosetDesc(b, self.lattice)


def _check_rank(*cs: CosetDesc) -> int:
    n = cs[0].rank
    for c in cs:
        if c.rank != n:
            raise RankMismatch("cosets live in different ranks")
    return n


def coset_subset(C1: CosetDesc, C2: CosetDesc) -> bool:
    n = _check_rank(C1, C2)
    if not lattice_contains(C2.lattice, C1.lattice, n):
        return False
    return C2.contains(C1.basepoint)


def coset_finite_cover(C: CosetDesc, covers: Sequence[CosetDesc]) -> bool:
    """Is C contained in the union of `covers`?

    Covers whose lattice meets C's lattice in infinite index are discarded
    (a finite union of such cosets never covers, by Neumann's lemma).  The
    rest is decided by enumerating residues of C's lattice modulo the
    intersection of the remaining lattices.
    """
    if not covers:
        return False
    n = _check_rank(C, *covers)
    LC = [list(v) for v in C.lattice]
    r = len(LC)
    relevant = []
    for D in covers:
        inter = lattice_intersection(LC, D.lattice, n) if LC else []
        if len(inter) == r:
            relevant.append(D)
    if not relevant:
        return False
    if r == 0:
        return any(D.contains(C.basepoint) for D in relevant)
    inter = LC
    for D in relevant:
        inter = [list(v) for v in lattice_intersection(inter, D.lattice, n)]
    # express the intersection in coordinates of C's lattice basis
    B = columns(LC, n)
    coords = []
    for v in inter:
        x = solve_integer(B, v)
        coords.append(x)
    Mi = columns(coords, r)
    S, U, _ = snf(Mi)
    diag = [S[i][i] for i in range(r)]
    count = 1
    for d in diag:
        count *= d
        if count > RESIDUE_LIMIT:
            raise ResourceLimit("too many residues to enumerate in finite-cover test")
    Uinv = _unimodular_inverse(U)
    base = list(C.basepoint)
    for ks in product(*[range(d) for d in diag]):
        w = [sum(Uinv[i][j] * ks[j] for j in range(r)) for i in range(r)]
        p = [base[i] + sum(B[i][j] * w[j] for j in range(r)) for i in range(n)]
        if not any(D.contains(p) for D in relevant):
            return False
    return True

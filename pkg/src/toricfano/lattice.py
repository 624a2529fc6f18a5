"""Exact integer and rational linear algebra over lattices.

All arithmetic is arbitrary precision and exact: integer matrices are
sequences of rows of Python ints, rational vectors are tuples of
``fractions.Fraction`` (always in lowest terms with positive denominator,
which Fraction guarantees).  No floating point is used anywhere.

Conventions:
  * a "matrix" is a list/tuple of equal-length rows;
  * ``hermite_normal_form`` is row-style: U * M = H with U unimodular;
  * ``integer_kernel(M)`` returns a basis of the saturated left kernel
    {v : v * M = 0}, i.e. integer relations among the rows of M.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Optional, Sequence

IntVector = tuple[int, ...]
IntMatrix = list[list[int]]
RationalVector = tuple[Fraction, ...]


def identity_matrix(n: int) -> IntMatrix:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def zero_matrix(rows: int, cols: int) -> IntMatrix:
    return [[0] * cols for _ in range(rows)]


def mat_mul(a: Sequence[Sequence[int]], b: Sequence[Sequence[int]]) -> IntMatrix:
    if a and b and len(a[0]) != len(b):
        raise ValueError(f"dimension mismatch: {len(a[0])} vs {len(b)}")
    cols = range(len(b[0])) if b else range(0)
    return [[sum(ra[k] * b[k][j] for k in range(len(b))) for j in cols] for ra in a]


def mat_vec(a: Sequence[Sequence[int]], v: Sequence) -> list:
    if a and len(a[0]) != len(v):
        raise ValueError(f"dimension mismatch: {len(a[0])} vs {len(v)}")
    return [sum(row[k] * v[k] for k in range(len(v))) for row in a]


def transpose(m: Sequence[Sequence]) -> list[list]:
    return [list(col) for col in zip(*m)] if m else []


def dot(u: Sequence, v: Sequence):
    if len(u) != len(v):
        raise ValueError(f"dimension mismatch: {len(u)} vs {len(v)}")
    return sum(a * b for a, b in zip(u, v))


def vector_gcd(v: Sequence[int]) -> int:
    g = 0
    for x in v:
        g = gcd(g, x)
    return g


def primitive_vector(v: Sequence) -> IntVector:
    """Scale a nonzero rational direction to its primitive integer vector.

    Only positive scaling is applied, so the ray direction is preserved.
    """
    if all(x == 0 for x in v):
        raise ValueError("zero vector has no primitive representative")
    fracs = [Fraction(x) for x in v]
    mult = 1
    for f in fracs:
        mult = mult * f.denominator // gcd(mult, f.denominator)
    ints = [int(f * mult) for f in fracs]
    g = vector_gcd(ints)
    return tuple(x // g for x in ints)


def hermite_normal_form(m: Sequence[Sequence[int]]) -> tuple[IntMatrix, IntMatrix]:
    """Row Hermite normal form: returns (H, U) with U * M = H, |det U| = 1.

    H has its pivot rows on top (pivots positive, entries above a pivot
    reduced into [0, pivot)), zero rows at the bottom.  Total on any
    integer matrix, including zero matrices.
    """
    if not m:
        raise ValueError("empty matrix")
    rows, cols = len(m), len(m[0])
    if any(len(r) != cols for r in m):
        raise ValueError("ragged matrix")
    h = [list(map(int, r)) for r in m]
    u = identity_matrix(rows)
    pivot_row = 0
    for col in range(cols):
        # Euclid on the entries of this column at/below pivot_row.
        while True:
            nonzero = [i for i in range(pivot_row, rows) if h[i][col] != 0]
            if not nonzero:
                break
            i0 = min(nonzero, key=lambda i: (abs(h[i][col]), i))
            if i0 != pivot_row:
                h[i0], h[pivot_row] = h[pivot_row], h[i0]
                u[i0], u[pivot_row] = u[pivot_row], u[i0]
            a = h[pivot_row][col]
            done = True
            for i in range(pivot_row + 1, rows):
                q = h[i][col] // a  # floor division keeps remainders in [0, |a|)
                if q:
                    for j in range(cols):
                        h[i][j] -= q * h[pivot_row][j]
                    for j in range(rows):
                        u[i][j] -= q * u[pivot_row][j]
                if h[i][col] != 0:
                    done = False
            if done:
                break
        if pivot_row < rows and h[pivot_row][col] != 0:
            if h[pivot_row][col] < 0:
                h[pivot_row] = [-x for x in h[pivot_row]]
                u[pivot_row] = [-x for x in u[pivot_row]]
            a = h[pivot_row][col]
            for i in range(pivot_row):
                q = h[i][col] // a
                if q:
                    for j in range(cols):
                        h[i][j] -= q * h[pivot_row][j]
                    for j in range(rows):
                        u[i][j] -= q * u[pivot_row][j]
            pivot_row += 1
            if pivot_row == rows:
                break
    return h, u


def integer_kernel(m: Sequence[Sequence[int]]) -> list[IntVector]:
    """Basis of the saturated lattice {v : v * M = 0} (relations among rows).

    Computed from the unimodular transform of the HNF, then HNF-reduced
    again so the returned basis is canonical.  Saturation is automatic:
    v*M = 0 iff v lies in the span of the U-rows facing zero rows of H.
    """
    h, u = hermite_normal_form(m)
    kernel_rows = [u[i] for i in range(len(h)) if all(x == 0 for x in h[i])]
    if not kernel_rows:
        return []
    reduced, _ = hermite_normal_form(kernel_rows)
    return [tuple(r) for r in reduced if any(x != 0 for x in r)]


def rational_rank(m: Sequence[Sequence]) -> int:
    """Rank over Q, by fraction-free Gaussian elimination."""
    if not m:
        return 0
    work = [[Fraction(x) for x in row] for row in m]
    rows, cols = len(work), len(work[0])
    rank = 0
    for col in range(cols):
        piv = next((i for i in range(rank, rows) if work[i][col] != 0), None)
        if piv is None:
            continue
        work[rank], work[piv] = work[piv], work[rank]
        inv = 1 / work[rank][col]
        work[rank] = [x * inv for x in work[rank]]
        for i in range(rows):
            if i != rank and work[i][col] != 0:
                f = work[i][col]
                work[i] = [x - f * y for x, y in zip(work[i], work[rank])]
        rank += 1
        if rank == rows:
            break
    return rank


def det_int(m: Sequence[Sequence[int]]) -> int:
    """Exact determinant of a square integer matrix (Bareiss)."""
    n = len(m)
    if any(len(r) != n for r in m):
        raise ValueError("not square")
    if n == 0:
        return 1
    a = [list(map(int, r)) for r in m]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            piv = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
            if piv is None:
                return 0
            a[k], a[piv] = a[piv], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
            a[i][k] = 0
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def solve_rational(a: Sequence[Sequence], b: Sequence) -> Optional[RationalVector]:
    """Exact solution x of A x = b, or None when the system is inconsistent.

    Underdetermined systems get the particular solution with free
    variables set to zero (deterministic: pivots chosen left to right).
    """
    if not a:
        raise ValueError("empty matrix")
    rows, cols = len(a), len(a[0])
    if len(b) != rows:
        raise ValueError(f"dimension mismatch: {rows} rows vs {len(b)} rhs entries")
    work = [[Fraction(x) for x in row] + [Fraction(b[i])] for i, row in enumerate(a)]
    pivots: list[tuple[int, int]] = []
    rank = 0
    for col in range(cols):
        piv = next((i for i in range(rank, rows) if work[i][col] != 0), None)
        if piv is None:
            continue
        work[rank], work[piv] = work[piv], work[rank]
        inv = 1 / work[rank][col]
        work[rank] = [x * inv for x in work[rank]]
        for i in range(rows):
            if i != rank and work[i][col] != 0:
                f = work[i][col]
                work[i] = [x - f * y for x, y in zip(work[i], work[rank])]
        pivots.append((rank, col))
        rank += 1
        if rank == rows:
            break
    for i in range(rank, rows):
        if work[i][cols] != 0:
            return None
    x = [Fraction(0)] * cols
    for row, col in pivots:
        x[col] = work[row][cols]
    return tuple(x)


def solve_integer(a: Sequence[Sequence[int]], b: Sequence[int]) -> Optional[IntVector]:
    """Integer solution x of A x = b, or None if none exists.

    Via the row HNF of A^T: A x = b becomes H^T y = b with x = U^T y,
    and H^T is lower triangular so y is found by forward substitution
    with exact divisibility checks.
    """
    if not a:
        raise ValueError("empty matrix")
    rows, cols = len(a), len(a[0])
    if len(b) != rows:
        raise ValueError(f"dimension mismatch: {rows} rows vs {len(b)} rhs entries")
    h, u = hermite_normal_form(transpose(a))
    # Solve H^T y = b; H^T is rows x cols with column k equal to row k of H.
    y = [0] * cols
    residual = list(map(int, b))
    for k in range(cols):
        hk = h[k]
        lead = next((j for j in range(rows) if hk[j] != 0), None)
        if lead is None:
            break
        if residual[lead] % hk[lead] != 0:
            return None
        y[k] = residual[lead] // hk[lead]
        if y[k]:
            for j in range(rows):
                residual[j] -= y[k] * hk[j]
    if any(residual):
        return None
    ut = transpose(u)
    return tuple(dot(row, y) for row in ut)


def lift_to_fractions(v: Sequence) -> RationalVector:
    return tuple(Fraction(x) for x in v)

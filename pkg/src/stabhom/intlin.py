"""Dense exact linear algebra over the integers.

Matrices are lists of lists of Python ints, so nothing overflows. These routines
are meant for small and medium matrices: the residue left over after sparse
pre-reduction, presentation bookkeeping, and lattice comparisons.
"""

from __future__ import annotations

from typing import List, Optional, Sequence, Tuple

IntMatrix = List[List[int]]


def xgcd(a: int, b: int) -> Tuple[int, int, int]:
    """Return ``(g, s, t)`` with ``s*a + t*b == g == gcd(a, b) >= 0``."""
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t


def identity(n: int) -> IntMatrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def copy(M: Sequence[Sequence[int]]) -> IntMatrix:
    return [[int(x) for x in row] for row in M]


def matmul(A: Sequence[Sequence[int]], B: Sequence[Sequence[int]]) -> IntMatrix:
    if not A:
        return []
    inner = len(B)
    cols = len(B[0]) if inner else 0
    out = [[0] * cols for _ in range(len(A))]
    for i, row in enumerate(A):
        o = out[i]
        for k in range(inner):
            a = row[k]
            if a:
                bk = B[k]
                for j in range(cols):
                    if bk[j]:
                        o[j] += a * bk[j]
    return out


def transpose(M: Sequence[Sequence[int]], ncols: Optional[int] = None) -> IntMatrix:
    if not M:
        return [[] for _ in range(ncols or 0)]
    return [list(col) for col in zip(*M)]


def _swap_rows(M: IntMatrix, i: int, j: int) -> None:
    M[i], M[j] = M[j], M[i]


def _swap_cols(M: IntMatrix, i: int, j: int) -> None:
    for row in M:
        row[i], row[j] = row[j], row[i]


def smith_form(
    M: Sequence[Sequence[int]], rows: int, cols: int, transforms: bool = False
) -> Tuple[List[int], Optional[IntMatrix], Optional[IntMatrix]]:
    """Smith normal form of an integer matrix.

    Args:
        M: the ``rows x cols`` matrix.
        rows: number of rows (needed when ``M`` is empty).
        cols: number of columns.
        transforms: also return unimodular ``U`` and ``V`` with
            ``U @ M @ V == diag(divisors)`` (padded with zeros).

    Returns:
        ``(divisors, U, V)`` where ``divisors`` lists the nonzero elementary
        divisors in divisibility order. ``U`` and ``V`` are ``None`` unless
        requested.
    """
    A = copy(M) if rows and cols else [[0] * cols for _ in range(rows)]
    U = identity(rows) if transforms else None
    V = identity(cols) if transforms else None
    t = 0
    while t < min(rows, cols):
        # pick the smallest nonzero entry in the remaining block as pivot
        best = None
        for i in range(t, rows):
            row = A[i]
            for j in range(t, cols):
                x = row[j]
                if x and (best is None or abs(x) < best[0]):
                    best = (abs(x), i, j)
                    if best[0] == 1:
                        break
            if best is not None and best[0] == 1:
                break
        if best is None:
            break
        _, pi, pj = best
        if pi != t:
            _swap_rows(A, pi, t)
            if U is not None:
                _swap_rows(U, pi, t)
        if pj != t:
            _swap_cols(A, pj, t)
            if V is not None:
                _swap_cols(V, pj, t)
        while True:
            done = True
            p = A[t][t]
            # clear column t below the pivot
            for i in range(t + 1, rows):
                x = A[i][t]
                if x:
                    q = x // p
                    if q:
                        ai, at = A[i], A[t]
                        for j in range(t, cols):
                            if at[j]:
                                ai[j] -= q * at[j]
                        if U is not None:
                            ui, ut = U[i], U[t]
                            for j in range(rows):
                                if ut[j]:
                                    ui[j] -= q * ut[j]
                    if A[i][t]:
                        done = False
            # clear row t right of the pivot
            at = A[t]
            for j in range(t + 1, cols):
                x = at[j]
                if x:
                    q = x // p
                    if q:
                        for i in range(t, rows):
                            if A[i][t]:
                                A[i][j] -= q * A[i][t]
                        if V is not None:
                            for row in V:
                                if row[t]:
                                    row[j] -= q * row[t]
                    if at[j]:
                        done = False
            if done:
                # enforce divisibility against the rest of the block
                bad = None
                for i in range(t + 1, rows):
                    row = A[i]
                    for j in range(t + 1, cols):
                        if row[j] % p:
                            bad = i
                            break
                    if bad is not None:
                        break
                if bad is None:
                    break
                ai, at = A[bad], A[t]
                for j in range(t, cols):
                    at[j] += ai[j]
                if U is not None:
                    ub, ut = U[bad], U[t]
                    for j in range(rows):
                        ut[j] += ub[j]
                continue
            # move the smallest remaining entry of row/column t to the pivot
            best = (abs(A[t][t]), t, t)
            for i in range(t + 1, rows):
                x = A[i][t]
                if x and abs(x) < best[0]:
                    best = (abs(x), i, t)
            for j in range(t + 1, cols):
                x = A[t][j]
                if x and abs(x) < best[0]:
                    best = (abs(x), t, j)
            _, pi, pj = best
            if pi != t:
                _swap_rows(A, pi, t)
                if U is not None:
                    _swap_rows(U, pi, t)
            if pj != t:
                _swap_cols(A, pj, t)
                if V is not None:
                    _swap_cols(V, pj, t)
        if A[t][t] < 0:
            A[t] = [-x for x in A[t]]
            if U is not None:
                U[t] = [-x for x in U[t]]
        t += 1
    divisors = [A[i][i] for i in range(min(rows, cols)) if A[i][i]]
    return divisors, U, V


def elementary_divisors(M: Sequence[Sequence[int]], rows: int, cols: int) -> List[int]:
    return smith_form(M, rows, cols)[0]


def hermite_rows(M: Sequence[Sequence[int]], cols: int) -> IntMatrix:
    """Row-style Hermite normal form of the row lattice of ``M``.

    The result has positive pivots, entries above each pivot reduced into
    ``[0, pivot)``, and no zero rows. It is canonical for the row lattice.
    """
    A = [list(r) for r in M if any(r)]
    r = 0
    for c in range(cols):
        if r >= len(A):
            break
        # gcd-combine every row with a nonzero entry in column c into row r
        for i in range(r + 1, len(A)):
            b = A[i][c]
            if not b:
                continue
            a = A[r][c]
            g, s, t = xgcd(a, b)
            ua, ub = a // g, b // g
            ar, ai = A[r], A[i]
            A[r] = [s * x + t * y for x, y in zip(ar, ai)]
            A[i] = [-ub * x + ua * y for x, y in zip(ar, ai)]
        if A[r][c] == 0:
            continue
        if A[r][c] < 0:
            A[r] = [-x for x in A[r]]
        p = A[r][c]
        for i in range(r):
            q = A[i][c] // p
            if q:
                A[i] = [x - q * y for x, y in zip(A[i], A[r])]
        r += 1
    return [row for row in A[:r]]


def kernel_basis(M: Sequence[Sequence[int]], rows: int, cols: int) -> IntMatrix:
    """A Z-basis (as a list of vectors) of ``{x : M x = 0}``."""
    divisors, _, V = smith_form(M, rows, cols, transforms=True)
    rank = len(divisors)
    assert V is not None
    return [[V[i][j] for i in range(cols)] for j in range(rank, cols)]


def solve(M: Sequence[Sequence[int]], rows: int, cols: int, b: Sequence[int]) -> Optional[List[int]]:
    """An integer solution of ``M x = b`` or ``None`` when none exists."""
    divisors, U, V = smith_form(M, rows, cols, transforms=True)
    assert U is not None and V is not None
    ub = [sum(U[i][k] * b[k] for k in range(rows)) for i in range(rows)]
    y = [0] * cols
    for i, d in enumerate(divisors):
        if ub[i] % d:
            return None
        y[i] = ub[i] // d
    for i in range(len(divisors), rows):
        if ub[i]:
            return None
    return [sum(V[i][k] * y[k] for k in range(cols)) for i in range(cols)]


def determinant(M: Sequence[Sequence[int]]) -> int:
    """Fraction-free (Bareiss) determinant."""
    n = len(M)
    if n == 0:
        return 1
    A = copy(M)
    sign = 1
    prev = 1
    for k in range(n - 1):
        if A[k][k] == 0:
            for i in range(k + 1, n):
                if A[i][k]:
                    A[k], A[i] = A[i], A[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                A[i][j] = (A[i][j] * A[k][k] - A[i][k] * A[k][j]) // prev
        prev = A[k][k]
    return sign * A[n - 1][n - 1]


def unimodular_inverse(V: Sequence[Sequence[int]]) -> IntMatrix:
    """Inverse of a unimodular matrix via the Hermite form of ``[V | I]``."""
    n = len(V)
    aug = [list(V[i]) + [int(i == j) for j in range(n)] for i in range(n)]
    H = hermite_rows(aug, 2 * n)
    if len(H) != n or any(H[i][i] != 1 for i in range(n)):
        raise ValueError("matrix is not unimodular")
    return [row[n:] for row in H]

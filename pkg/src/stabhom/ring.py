"""Exact linear algebra over Z/m.

Vectors are tuples of residues in ``[0, m)``. Submodules of ``(Z/m)^n`` are
stored through their Howell normal form, which is canonical: two submodules are
equal exactly when their Howell matrices agree.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Iterable, Iterator, List, Optional, Sequence, Tuple

from . import intlin

Vector = Tuple[int, ...]
Matrix = Tuple[Vector, ...]


@lru_cache(maxsize=None)
def _is_prime(m: int) -> bool:
    if m < 2:
        return False
    return all(m % d for d in range(2, math.isqrt(m) + 1))


def prime_power_factors(m: int) -> List[Tuple[int, int]]:
    """Return ``[(p, e), ...]`` with ``m = prod p**e``."""
    out = []
    d = 2
    while d * d <= m:
        if m % d == 0:
            e = 0
            while m % d == 0:
                m //= d
                e += 1
            out.append((d, e))
        d += 1
    if m > 1:
        out.append((m, 1))
    return out


@dataclass(frozen=True)
class FiniteRing:
    """The ring Z/m.

    Attributes:
        modulus: m >= 2.
    """

    modulus: int
    stable_rank: int = field(default=1, compare=False)

    def __post_init__(self) -> None:
        if self.modulus < 2:
            raise ValueError(f"modulus must be >= 2, got {self.modulus}")

    @classmethod
    def parse(cls, spec: str) -> "FiniteRing":
        """Parse a ring string such as ``"zmod:6"``."""
        kind, _, rest = spec.partition(":")
        if kind != "zmod" or not rest.isdigit():
            raise ValueError(f"bad ring spec {spec!r}; expected 'zmod:m'")
        return cls(int(rest))

    @property
    def spec(self) -> str:
        return f"zmod:{self.modulus}"

    @property
    def is_field(self) -> bool:
        return _is_prime(self.modulus)

    @cached_property
    def units(self) -> Tuple[int, ...]:
        m = self.modulus
        return tuple(r for r in range(m) if math.gcd(r, m) == 1)

    def is_unit(self, a: int) -> bool:
        return math.gcd(a % self.modulus, self.modulus) == 1

    def inv(self, a: int) -> int:
        return pow(a % self.modulus, -1, self.modulus)

    def vectors(self, n: int) -> Iterator[Vector]:
        """All vectors of ``(Z/m)^n`` in lexicographic order."""
        return itertools.product(range(self.modulus), repeat=n)


# --------------------------------------------------------------------------
# small vector / matrix helpers


def reduce_vec(v: Iterable[int], m: int) -> Vector:
    return tuple(int(x) % m for x in v)


def dot(u: Sequence[int], v: Sequence[int], m: int) -> int:
    return sum(a * b for a, b in zip(u, v)) % m


def mat_mul(A: Sequence[Sequence[int]], B: Sequence[Sequence[int]], m: int) -> Matrix:
    return tuple(tuple(x % m for x in row) for row in intlin.matmul(A, B))


def mat_transpose(A: Sequence[Sequence[int]], rows: int, cols: int) -> Matrix:
    return tuple(tuple(A[i][j] for i in range(rows)) for j in range(cols))


def identity_matrix(n: int) -> Matrix:
    return tuple(tuple(int(i == j) for j in range(n)) for i in range(n))


def det_mod(A: Sequence[Sequence[int]], m: int) -> int:
    return intlin.determinant(A) % m


def mat_inverse(A: Sequence[Sequence[int]], m: int) -> Matrix:
    """Inverse of a square matrix over Z/m (raises if singular)."""
    n = len(A)
    d = det_mod(A, m)
    if math.gcd(d, m) != 1:
        raise ValueError("matrix is not invertible over Z/%d" % m)
    # Gauss-Jordan with gcd-based row operations on [A | I]
    M = [list(row) + [int(i == j) for j in range(n)] for i, row in enumerate(A)]
    for c in range(n):
        for i in range(c + 1, n):
            b = M[i][c] % m
            if not b:
                continue
            a = M[c][c] % m
            g, s, t = intlin.xgcd(a, b)
            ua, ub = a // g, b // g
            rc, ri = M[c], M[i]
            M[c] = [(s * x + t * y) % m for x, y in zip(rc, ri)]
            M[i] = [(-ub * x + ua * y) % m for x, y in zip(rc, ri)]
        piv = M[c][c] % m
        inv = pow(piv, -1, m)
        M[c] = [(x * inv) % m for x in M[c]]
    for c in range(n - 1, -1, -1):
        for i in range(c):
            f = M[i][c]
            if f:
                M[i] = [(x - f * y) % m for x, y in zip(M[i], M[c])]
    return tuple(tuple(row[n:]) for row in M)


# --------------------------------------------------------------------------
# Howell normal form


def _gcd_unit(a: int, m: int) -> int:
    """A unit ``u`` with ``u*a == gcd(a, m)`` modulo m."""
    g = math.gcd(a, m)
    if g == m:
        return 1
    mg = m // g
    base = pow((a // g) % mg, -1, mg) if mg > 1 else 0
    u = base
    while math.gcd(u, m) != 1:
        u += mg
    return u % m


def howell_rows(rows: Iterable[Sequence[int]], m: int, n: int) -> Matrix:
    """Canonical Howell form of the row span of ``rows`` in ``(Z/m)^n``.

    Rows come out in echelon order. Each pivot divides ``m``, entries above a
    pivot are reduced modulo it, and for every row ``r`` with pivot ``p`` the
    multiple ``(m/p) r`` lies in the span of the rows below.
    """
    A = [[x % m for x in r] for r in rows]
    A = [r for r in A if any(r)]
    r = 0
    for c in range(n):
        if r >= len(A):
            break
        for i in range(r + 1, len(A)):
            b = A[i][c]
            if not b:
                continue
            a = A[r][c]
            if not a:
                A[r], A[i] = A[i], A[r]
                continue
            g, s, t = intlin.xgcd(a, b)
            ua, ub = a // g, b // g
            ar, ai = A[r], A[i]
            A[r] = [(s * x + t * y) % m for x, y in zip(ar, ai)]
            A[i] = [(-ub * x + ua * y) % m for x, y in zip(ar, ai)]
        a = A[r][c]
        if not a:
            continue
        u = _gcd_unit(a, m)
        if u != 1:
            A[r] = [(u * x) % m for x in A[r]]
        p = A[r][c]
        for i in range(r):
            q = A[i][c] // p
            if q:
                A[i] = [(x - q * y) % m for x, y in zip(A[i], A[r])]
        extra = [((m // p) * x) % m for x in A[r]]
        if any(extra):
            A.append(extra)
        r += 1
    return tuple(tuple(row) for row in A[:r])


def _pivot(row: Sequence[int]) -> int:
    for j, x in enumerate(row):
        if x:
            return j
    return len(row)


@dataclass(frozen=True)
class Submodule:
    """A submodule of ``(Z/m)^n`` in Howell normal form.

    Build instances with :func:`howell_form` or :meth:`span`; the constructor
    trusts that ``howell`` is already canonical.
    """

    modulus: int
    ambient_rank: int
    howell: Matrix

    @classmethod
    def span(cls, vectors: Iterable[Sequence[int]], modulus: int, ambient_rank: int) -> "Submodule":
        return cls(modulus, ambient_rank, howell_rows(vectors, modulus, ambient_rank))

    @classmethod
    def zero(cls, modulus: int, n: int) -> "Submodule":
        return cls(modulus, n, ())

    @classmethod
    def full(cls, modulus: int, n: int) -> "Submodule":
        return cls(modulus, n, identity_matrix(n))

    def key(self) -> Tuple[int, ...]:
        return tuple(x for row in self.howell for x in row)

    def to_json(self) -> List[List[int]]:
        return [list(r) for r in self.howell]

    def contains(self, v: Sequence[int]) -> bool:
        m = self.modulus
        w = [x % m for x in v]
        for row in self.howell:
            c = _pivot(row)
            p = row[c]
            if w[c] % p:
                return False
            q = w[c] // p
            if q:
                w = [(x - q * y) % m for x, y in zip(w, row)]
        return not any(w)

    def __le__(self, other: "Submodule") -> bool:
        return all(other.contains(r) for r in self.howell)

    def elements(self) -> List[Vector]:
        """All elements, each listed once."""
        m = self.modulus
        ranges = [range(m // row[_pivot(row)]) for row in self.howell]
        out = []
        for coeffs in itertools.product(*ranges):
            v = [0] * self.ambient_rank
            for c, row in zip(coeffs, self.howell):
                if c:
                    v = [(x + c * y) % m for x, y in zip(v, row)]
            out.append(tuple(v))
        return out

    def order(self) -> int:
        return math.prod(self.modulus // row[_pivot(row)] for row in self.howell)

    @cached_property
    def _smith(self) -> Tuple[List[int], List[List[int]]]:
        """Elementary divisors ``d_i`` and unimodular rows ``q_i`` with the
        submodule equal to the span of the ``d_i q_i``."""
        rows = [list(r) for r in self.howell]
        k, n = len(rows), self.ambient_rank
        divisors, _, V = intlin.smith_form(rows, k, n, transforms=True)
        assert V is not None
        Vinv = _int_inverse(V)
        d = [x % self.modulus for x in divisors] + [0] * (n - len(divisors))
        return d, Vinv

    @property
    def rank_free(self) -> Optional[int]:
        """Rank when the submodule is free, ``None`` otherwise."""
        m = self.modulus
        d, _ = self._smith
        r = 0
        for x in d:
            g = math.gcd(x, m)
            if g == 1:
                r += 1
            elif g != m:
                return None
        return r

    @property
    def is_splittable(self) -> bool:
        """True iff this is a free direct summand (it has a free complement)."""
        return self.rank_free is not None

    def basis(self) -> List[Vector]:
        """A basis of a free submodule; deterministic."""
        m = self.modulus
        if self.rank_free is None:
            raise ValueError("submodule is not free")
        if all(row[_pivot(row)] == 1 for row in self.howell) and len(self.howell) == self.rank_free:
            return list(self.howell)
        d, Q = self._smith
        return [reduce_vec([d[i] * x for x in Q[i]], m) for i in range(len(d)) if math.gcd(d[i], m) == 1]


def _int_inverse(V: Sequence[Sequence[int]]) -> List[List[int]]:
    """Inverse of a unimodular integer matrix."""
    n = len(V)
    cols = []
    for j in range(n):
        e = [int(i == j) for i in range(n)]
        x = intlin.solve(V, n, n, e)
        assert x is not None
        cols.append(x)
    return [[cols[j][i] for j in range(n)] for i in range(n)]


def howell_form(rows: Iterable[Sequence[int]], modulus: int, ambient_rank: int) -> Submodule:
    """Canonical Howell form of the row span; empty input gives the zero submodule."""
    return Submodule.span(rows, modulus, ambient_rank)


def is_unimodular(v: Sequence[int], modulus: int) -> bool:
    """True iff the entries of ``v`` generate the unit ideal of Z/m."""
    g = modulus
    for x in v:
        g = math.gcd(g, x % modulus)
    return g == 1


def is_partial_basis(vectors: Sequence[Sequence[int]], modulus: int, n: int) -> bool:
    """True iff ``vectors`` extend to a basis of ``(Z/m)^n``."""
    k = len(vectors)
    if k == 0:
        return True
    if k > n:
        return False
    divisors = intlin.elementary_divisors([list(v) for v in vectors], k, n)
    return len(divisors) == k and all(math.gcd(d, modulus) == 1 for d in divisors)


def _check_same(A: Submodule, B: Submodule) -> None:
    if A.modulus != B.modulus or A.ambient_rank != B.ambient_rank:
        raise ValueError("ambient mismatch")


def submodule_sum(A: Submodule, B: Submodule) -> Submodule:
    _check_same(A, B)
    return Submodule.span(A.howell + B.howell, A.modulus, A.ambient_rank)


def intersect(A: Submodule, B: Submodule) -> Submodule:
    """``A ∩ B`` via the Howell form of the block rows ``[A A; B 0]``."""
    _check_same(A, B)
    n, m = A.ambient_rank, A.modulus
    zero = (0,) * n
    block = [r + r for r in A.howell] + [r + zero for r in B.howell]
    H = howell_rows(block, m, 2 * n)
    return Submodule.span([r[n:] for r in H if not any(r[:n])], m, n)


def saturation(W: Submodule) -> Submodule:
    """Splittable hull of ``W``.

    ``W`` is the span of ``d_i q_i`` for a basis ``q_i`` of the ambient module
    (a Smith decomposition). The hull is the span of the ``q_i`` whose ``d_i``
    is nonzero. Over a field this is ``W`` itself; over Z/p^e its rank is the
    least rank of a free summand containing ``W``.
    """
    m = W.modulus
    d, Q = W._smith
    rows = [Q[i] for i in range(len(d)) if d[i] % m]
    return Submodule.span(rows, m, W.ambient_rank)


def _complement_seed(W: Submodule) -> Tuple[List[Vector], List[Vector]]:
    """A basis of a splittable ``W`` and of one fixed complement."""
    m = W.modulus
    d, Q = W._smith
    basis = W.basis()
    comp = [reduce_vec(Q[i], m) for i in range(len(d)) if d[i] % m == 0]
    return basis, comp


def enumerate_complements(W: Submodule) -> List[Submodule]:
    """All free complements ``C`` with ``W ⊕ C`` the whole module.

    Complements are graphs of linear maps from one fixed complement into ``W``,
    listed in lexicographic order of the map's coefficients.
    """
    if not W.is_splittable:
        raise ValueError("no complement: submodule is not splittable")
    m, n = W.modulus, W.ambient_rank
    basis, comp = _complement_seed(W)
    k, c = len(basis), len(comp)
    out = []
    for coeffs in itertools.product(range(m), repeat=k * c):
        gens = []
        for j, cj in enumerate(comp):
            v = list(cj)
            for i, wi in enumerate(basis):
                a = coeffs[j * k + i]
                if a:
                    v = [(x + a * y) % m for x, y in zip(v, wi)]
            gens.append(v)
        out.append(Submodule.span(gens, m, n))
    return out


def complete_basis(
    partial: Sequence[Sequence[int]], modulus: int, n: int, orientation_subgroup: Optional[Sequence[int]] = None
) -> Matrix:
    """Extend a partial basis to an invertible ``n x n`` matrix.

    The given vectors become the first columns. Each further column is the
    lexicographically smallest vector keeping the columns a partial basis.
    With ``orientation_subgroup`` the last appended column is scaled by the
    smallest unit that moves the determinant into that subgroup.

    Returns:
        The matrix as a tuple of rows.
    """
    m = modulus
    cols = [reduce_vec(v, m) for v in partial]
    if not is_partial_basis(cols, m, n):
        raise ValueError("input is not a partial basis")
    k = len(cols)
    if k < n:
        for v in itertools.product(range(m), repeat=n):
            if is_partial_basis(cols + [v], m, n):
                cols.append(v)
                if len(cols) == n:
                    break
    M = mat_transpose(cols, n, n)
    if orientation_subgroup is not None:
        H = {h % m for h in orientation_subgroup}
        d = det_mod(M, m)
        if d not in H:
            if k == n:
                raise ValueError("no H-completion: determinant fixed outside H")
            dinv = pow(d, -1, m)
            u = min((h * dinv) % m for h in H)
            cols[-1] = tuple((u * x) % m for x in cols[-1])
            M = mat_transpose(cols, n, n)
    assert math.gcd(det_mod(M, m), m) == 1
    return M


# --------------------------------------------------------------------------
# symplectic structure


@dataclass(frozen=True)
class SymplecticSpace:
    """``R^{2g}`` with the form ``sum_i x_{2i-1} y_{2i} - x_{2i} y_{2i-1}``."""

    genus: int
    modulus: int

    @property
    def dim(self) -> int:
        return 2 * self.genus

    @cached_property
    def gram(self) -> Matrix:
        n = self.dim
        J = [[0] * n for _ in range(n)]
        for i in range(self.genus):
            J[2 * i][2 * i + 1] = 1
            J[2 * i + 1][2 * i] = self.modulus - 1
        return tuple(tuple(r) for r in J)

    def form(self, x: Sequence[int], y: Sequence[int]) -> int:
        s = 0
        for i in range(self.genus):
            s += x[2 * i] * y[2 * i + 1] - x[2 * i + 1] * y[2 * i]
        return s % self.modulus

    def is_symplectic(self, M: Sequence[Sequence[int]]) -> bool:
        """``M^T J M == J`` for a square matrix given by rows."""
        n = self.dim
        cols = mat_transpose(M, n, n)
        return all(
            self.form(cols[i], cols[j]) == self.gram[i][j] for i in range(n) for j in range(n)
        )

    def check_pairs(self, pairs: Sequence[Tuple[Sequence[int], Sequence[int]]]) -> None:
        for i, (a, b) in enumerate(pairs):
            for j, (c, d) in enumerate(pairs):
                ok = (
                    self.form(a, c) == 0
                    and self.form(b, d) == 0
                    and self.form(a, d) == (1 if i == j else 0)
                )
                if not ok:
                    raise ValueError("pairs are not a symplectic partial basis")

    def perp_projection(self, pairs: Sequence[Tuple[Sequence[int], Sequence[int]]], x: Sequence[int]) -> Vector:
        """Project ``x`` onto the orthogonal complement of the pairs' span."""
        m = self.modulus
        v = list(x)
        for a, b in pairs:
            ca, cb = self.form(x, a), self.form(x, b)
            v = [(vi + ca * bi - cb * ai) % m for vi, ai, bi in zip(v, a, b)]
        return tuple(v)


def _combine_to_unit(values: Sequence[int], m: int) -> Optional[List[int]]:
    """Coefficients ``c`` with ``sum c_i values_i == 1`` modulo m, if any."""
    g, acc = 0, [0] * len(values)
    for i, x in enumerate(values):
        x %= m
        if not x:
            continue
        g, s, t = intlin.xgcd(g, x)
        acc = [s * a for a in acc]
        acc[i] = t
    if math.gcd(g, m) != 1:
        return None
    inv = pow(g % m, -1, m)
    return [(a * inv) % m for a in acc]


def symplectic_complete(
    pairs: Sequence[Tuple[Sequence[int], Sequence[int]]], space: SymplecticSpace
) -> Matrix:
    """Extend a symplectic partial basis to a symplectic matrix.

    The given pairs fill the first columns as ``a_1, b_1, a_2, b_2, ...``. The
    remaining pairs come from Gram-Schmidt on projections of the standard
    basis into the orthogonal complement.
    """
    m, n = space.modulus, space.dim
    pairs = [(reduce_vec(a, m), reduce_vec(b, m)) for a, b in pairs]
    space.check_pairs(pairs)
    std = [tuple(int(i == j) for i in range(n)) for j in range(n)]
    while len(pairs) < space.genus:
        proj = [space.perp_projection(pairs, e) for e in std]
        a = next((v for v in proj if is_unimodular(v, m)), None)
        if a is None:
            a = next(
                (
                    reduce_vec([x + y for x, y in zip(u, v)], m)
                    for u, v in itertools.combinations(proj, 2)
                    if is_unimodular([x + y for x, y in zip(u, v)], m)
                ),
                None,
            )
        if a is None:
            raise ValueError("could not find a unimodular vector in the complement")
        vals = [space.form(a, v) for v in proj]
        coeffs = _combine_to_unit(vals, m)
        if coeffs is None:
            raise ValueError("pairing is not perfect on the complement")
        b = [0] * n
        for c, v in zip(coeffs, proj):
            if c:
                b = [(x + c * y) % m for x, y in zip(b, v)]
        pairs.append((a, tuple(b)))
    cols = [v for pair in pairs for v in pair]
    M = mat_transpose(cols, n, n)
    assert space.is_symplectic(M)
    return M


def enumerate_submodules(modulus: int, n: int, splittable_only: bool = False) -> List[Submodule]:
    """Every submodule of ``(Z/m)^n`` by closing spans under adding one vector.

    Returns them sorted by (order, Howell key). Exhaustive, so only meant for
    small ``m**n``.
    """
    vectors = list(itertools.product(range(modulus), repeat=n))
    zero = Submodule.zero(modulus, n)
    seen = {zero.key(): zero}
    frontier = [zero]
    while frontier:
        nxt = []
        for S in frontier:
            for v in vectors:
                if S.contains(v):
                    continue
                T = Submodule.span(list(S.howell) + [v], modulus, n)
                if T.key() not in seen:
                    seen[T.key()] = T
                    nxt.append(T)
        frontier = nxt
    out = sorted(seen.values(), key=lambda S: (S.order(), S.key()))
    if splittable_only:
        out = [S for S in out if S.is_splittable]
    return out

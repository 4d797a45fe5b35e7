"""Exact homology of chain complexes of free modules.

Boundary matrices are kept in coordinate (COO) form. Rank and elementary
divisors are computed in three stages:

1. vectorized peeling of rows and columns that carry a single unit entry;
2. sparse Gaussian elimination with unit pivots (Markowitz-style choice);
3. dense Smith normal form of whatever is left (integer tier only).

Over a field every nonzero entry is a unit, so stage 3 never runs. When the
homology of several consecutive degrees is needed, pivot columns of
``d_i`` are used to drop rows of ``d_{i+1}`` ("clearing"), which keeps both
the rank and (for unit pivots) the torsion of ``d_{i+1}``.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from scipy import sparse
from scipy.sparse import csgraph

from . import intlin

Z_TIER_NNZ_LIMIT = 10**7
FIELD_PRIMES = (2, 3, 5)
DEFAULT_DENSE_LIMIT = 4 * 10**6  # entries of the dense residual


class BudgetExceeded(RuntimeError):
    """The exact integer computation would exceed the memory budget."""


def dense_limit() -> int:
    """Residual size limit, scaled by ``STABHOM_MEM_BUDGET`` (bytes) when set."""
    env = os.environ.get("STABHOM_MEM_BUDGET")
    if env:
        try:
            return max(10**4, int(float(env)) // 64)
        except ValueError:
            pass
    return DEFAULT_DENSE_LIMIT


@dataclass
class SparseMatrix:
    """Integer matrix in canonical coordinate form (no duplicates, no zeros)."""

    shape: Tuple[int, int]
    rows: np.ndarray
    cols: np.ndarray
    vals: np.ndarray

    @classmethod
    def from_coo(cls, shape: Tuple[int, int], rows, cols, vals, modulus: int = 0) -> "SparseMatrix":
        rows = np.asarray(rows, dtype=np.int64)
        cols = np.asarray(cols, dtype=np.int64)
        vals = np.asarray(vals, dtype=np.int64)
        if len(vals):
            key = rows * max(shape[1], 1) + cols
            order = np.argsort(key, kind="stable")
            key, rows, cols, vals = key[order], rows[order], cols[order], vals[order]
            uniq, start = np.unique(key, return_index=True)
            vals = np.add.reduceat(vals, start)
            rows, cols = rows[start], cols[start]
            if modulus:
                vals = vals % modulus
            keep = vals != 0
            rows, cols, vals = rows[keep], cols[keep], vals[keep]
        return cls(shape, rows, cols, vals)

    @classmethod
    def from_dense(cls, M: Sequence[Sequence[int]], shape: Optional[Tuple[int, int]] = None) -> "SparseMatrix":
        A = np.asarray(M, dtype=np.int64)
        if shape is None:
            shape = A.shape if A.ndim == 2 else (0, 0)
        A = A.reshape(shape)
        r, c = np.nonzero(A)
        return cls.from_coo(shape, r, c, A[r, c])

    @property
    def nnz(self) -> int:
        return len(self.vals)

    def to_scipy(self) -> sparse.csr_matrix:
        return sparse.csr_matrix((self.vals, (self.rows, self.cols)), shape=self.shape, dtype=np.int64)

    def to_dense(self) -> List[List[int]]:
        out = [[0] * self.shape[1] for _ in range(self.shape[0])]
        for r, c, v in zip(self.rows.tolist(), self.cols.tolist(), self.vals.tolist()):
            out[r][c] += v
        return out

    def mod(self, p: int) -> "SparseMatrix":
        return SparseMatrix.from_coo(self.shape, self.rows, self.cols, self.vals, modulus=p)

    def drop_rows(self, dead: np.ndarray) -> "SparseMatrix":
        """Remove the rows flagged in the boolean mask ``dead`` (indices kept)."""
        if not dead.any():
            return self
        keep = ~dead[self.rows]
        return SparseMatrix(self.shape, self.rows[keep], self.cols[keep], self.vals[keep])


def compose_is_zero(A: SparseMatrix, B: SparseMatrix, modulus: int = 0) -> bool:
    """Is ``A @ B == 0`` (optionally modulo ``modulus``)?"""
    if A.nnz == 0 or B.nnz == 0:
        return True
    P = (A.to_scipy() @ B.to_scipy()).tocoo()
    data = P.data % modulus if modulus else P.data
    return not np.any(data)


# --------------------------------------------------------------------------
# rank and elementary divisors


@dataclass
class Reduction:
    """Outcome of reducing one matrix."""

    rank: int
    divisors: List[int]  # elementary divisors > 1 (integer tier only)
    pivot_cols: np.ndarray  # columns pivoted with unit pivots
    peeled: int = 0
    eliminated: int = 0
    dense_shape: Tuple[int, int] = (0, 0)


def _peel(rows, cols, vals, shape, modulus):
    """Repeatedly remove unit singletons; returns the residual and pivots."""
    nr, nc = shape
    pivots: List[np.ndarray] = []
    rank = 0
    while len(vals):
        unit = np.ones(len(vals), dtype=bool) if modulus else (np.abs(vals) == 1)
        ccount = np.bincount(cols, minlength=nc)
        sing = (ccount[cols] == 1) & unit
        if sing.any():
            r, c = rows[sing], cols[sing]
            _, first = np.unique(r, return_index=True)
            r, c = r[first], c[first]
        else:
            rcount = np.bincount(rows, minlength=nr)
            sing = (rcount[rows] == 1) & unit
            if not sing.any():
                break
            r, c = rows[sing], cols[sing]
            _, first = np.unique(c, return_index=True)
            r, c = r[first], c[first]
        dead_r = np.zeros(nr, dtype=bool)
        dead_c = np.zeros(nc, dtype=bool)
        dead_r[r] = True
        dead_c[c] = True
        keep = ~dead_r[rows] & ~dead_c[cols]
        rows, cols, vals = rows[keep], cols[keep], vals[keep]
        pivots.append(c)
        rank += len(c)
    piv = np.concatenate(pivots) if pivots else np.zeros(0, dtype=np.int64)
    return rows, cols, vals, rank, piv


def _eliminate(rows, cols, vals, modulus: int):
    """Sparse elimination with unit pivots. Returns residual entries and pivots.

    Pivots are taken from the currently sparsest column (lazy heap), choosing
    the shortest row with a unit entry there. Over Z, columns without a unit
    entry are set aside for the dense stage.
    """
    import heapq

    R: Dict[int, Dict[int, int]] = {}
    C: Dict[int, set] = {}
    for r, c, v in zip(rows.tolist(), cols.tolist(), vals.tolist()):
        R.setdefault(r, {})[c] = v
        C.setdefault(c, set()).add(r)
    heap = [(len(rs), c) for c, rs in C.items()]
    heapq.heapify(heap)
    pivots: List[int] = []
    stuck: set = set()

    while heap:
        cnt, pc = heapq.heappop(heap)
        rs = C.get(pc)
        if not rs or len(rs) != cnt:
            if rs and pc not in stuck:
                heapq.heappush(heap, (len(rs), pc))
            continue
        best = None
        for r in rs:
            v = R[r][pc]
            if (v % modulus != 0) if modulus else (v == 1 or v == -1):
                ln = len(R[r])
                if best is None or ln < best[0]:
                    best = (ln, r)
        if best is None:
            stuck.add(pc)
            continue
        pr = best[1]
        prow = R.pop(pr)
        pv = prow[pc]
        inv = pow(pv, -1, modulus) if modulus else pv
        for c in prow:
            C[c].discard(pr)
        for r in list(rs):
            row = R[r]
            f = row[pc] * inv
            if modulus:
                f %= modulus
            for c, x in prow.items():
                nv = row.get(c, 0) - f * x
                if modulus:
                    nv %= modulus
                if nv:
                    if c not in row:
                        C[c].add(r)
                    row[c] = nv
                else:
                    row.pop(c, None)
                    C[c].discard(r)
            if not row:
                del R[r]
        del C[pc]
        stuck.discard(pc)
        for c in prow:
            if c == pc:
                continue
            n = len(C[c])
            if n == 0:
                del C[c]
                stuck.discard(c)
            else:
                if c in stuck and not modulus:
                    stuck.discard(c)
                heapq.heappush(heap, (n, c))
        pivots.append(pc)
    rr, cc, vv = [], [], []
    for r, row in R.items():
        for c, v in row.items():
            rr.append(r)
            cc.append(c)
            vv.append(v)
    return (np.array(rr, dtype=np.int64), np.array(cc, dtype=np.int64), np.array(vv, dtype=np.int64),
            len(pivots), np.array(pivots, dtype=np.int64))


def reduce_matrix(M: SparseMatrix, modulus: int = 0) -> Reduction:
    """Rank (and elementary divisors over Z) of a sparse matrix.

    Args:
        M: the matrix.
        modulus: ``0`` for integers, or a prime ``p`` for ``F_p``.
    """
    if modulus:
        M = M.mod(modulus)
    rows, cols, vals = M.rows, M.cols, M.vals
    rows, cols, vals, r1, piv1 = _peel(rows, cols, vals, M.shape, modulus)
    rows, cols, vals, r2, piv2 = _eliminate(rows, cols, vals, modulus)
    divisors: List[int] = []
    rank = r1 + r2
    dense_shape = (0, 0)
    if len(vals):
        if modulus:
            raise AssertionError("field elimination left a residual")
        ur, ri = np.unique(rows, return_inverse=True)
        uc, ci = np.unique(cols, return_inverse=True)
        dense_shape = (len(ur), len(uc))
        if dense_shape[0] * dense_shape[1] > dense_limit():
            raise BudgetExceeded(
                f"dense residual {dense_shape} exceeds the budget; use field coefficients instead")
        D = [[0] * len(uc) for _ in range(len(ur))]
        for a, b, v in zip(ri.tolist(), ci.tolist(), vals.tolist()):
            D[a][b] = v
        divs = intlin.elementary_divisors(D, len(ur), len(uc))
        rank += len(divs)
        divisors = [d for d in divs if d != 1]
    return Reduction(rank, sorted(divisors), np.concatenate([piv1, piv2]), r1, r2, dense_shape)


# --------------------------------------------------------------------------
# chain complexes


@dataclass
class ChainComplex:
    """Free chain complex indexed from degree ``-1``.

    Attributes:
        dims: rank of ``C_p`` for each degree ``p``.
        boundaries: ``boundaries[p]`` maps ``C_p -> C_{p-1}``.
        characteristic: ``0`` for chains over Z, ``p`` for chains over F_p.
    """

    dims: Dict[int, int]
    boundaries: Dict[int, SparseMatrix]
    characteristic: int = 0
    name: str = ""

    def dim(self, p: int) -> int:
        return self.dims.get(p, 0)

    def boundary(self, p: int) -> SparseMatrix:
        if p in self.boundaries:
            return self.boundaries[p]
        return SparseMatrix((self.dim(p - 1), self.dim(p)), *(np.zeros(0, dtype=np.int64),) * 3)

    @property
    def top(self) -> int:
        return max((p for p, d in self.dims.items() if d), default=-1)

    def nnz(self) -> int:
        return sum(b.nnz for b in self.boundaries.values())

    def check_d_squared(self) -> bool:
        for p in sorted(self.boundaries):
            if p - 1 in self.boundaries:
                if not compose_is_zero(self.boundaries[p - 1], self.boundaries[p], self.characteristic):
                    raise AssertionError(f"{self.name}: d_{p - 1} d_{p} != 0")
        return True

    def euler_characteristic(self, lo: int = -1, hi: Optional[int] = None) -> int:
        hi = self.top if hi is None else hi
        return sum((-1) ** p * self.dim(p) for p in range(lo, hi + 1))


def chain_complex_of(X, augment: bool = True, check: bool = True) -> ChainComplex:
    """Chain complex of a semisimplicial set with ``d = sum (-1)^i d_i``.

    With ``augment`` the degree ``-1`` group is ``Z`` and ``d_0`` sums vertices,
    so the homology is reduced homology.
    """
    dims: Dict[int, int] = {}
    bnd: Dict[int, SparseMatrix] = {}
    if augment:
        dims[-1] = 1
    for p in range(X.dim + 1):
        dims[p] = X.size(p)
    if augment and X.dim >= 0:
        n0 = X.size(0)
        bnd[0] = SparseMatrix((1, n0), np.zeros(n0, dtype=np.int64), np.arange(n0, dtype=np.int64),
                              np.ones(n0, dtype=np.int64))
    for p in range(1, X.dim + 1):
        F = X.faces(p)
        n = len(F)
        rows = F.T.reshape(-1)
        cols = np.tile(np.arange(n, dtype=np.int64), p + 1)
        signs = np.repeat(np.array([(-1) ** i for i in range(p + 1)], dtype=np.int64), n)
        bnd[p] = SparseMatrix.from_coo((X.size(p - 1), n), rows, cols, signs)
    C = ChainComplex(dims, bnd, 0, getattr(X, "name", ""))
    if check:
        C.check_d_squared()
    return C


@dataclass
class DegreeHomology:
    degree: int
    betti: int
    torsion: List[int] = field(default_factory=list)

    @property
    def is_zero(self) -> bool:
        return self.betti == 0 and not self.torsion

    def to_json(self) -> Dict:
        return {"degree": self.degree, "betti": self.betti, "torsion": list(self.torsion)}


@dataclass
class HomologyResult:
    """Reduced homology in a range of degrees."""

    coefficient: str  # "Z" or "F_p"
    tier: str  # "Z" or "field"
    degrees: Dict[int, DegreeHomology]
    caveat: str = ""

    def betti(self, i: int) -> int:
        return self.degrees[i].betti

    def torsion(self, i: int) -> List[int]:
        return self.degrees[i].torsion

    def vanishes(self, degrees: Optional[Iterable[int]] = None) -> bool:
        ds = self.degrees if degrees is None else degrees
        return all(self.degrees[i].is_zero for i in ds)

    def to_json(self) -> Dict:
        return {
            "coefficient": self.coefficient,
            "tier": self.tier,
            "caveat": self.caveat,
            "degrees": [self.degrees[i].to_json() for i in sorted(self.degrees)],
        }


FIELD_CAVEAT = ("F_p coefficients: H~_i(-;F_p) = 0 implies H~_i(-;Z) (x) F_p = 0 and "
                "Tor(H~_{i-1}(-;Z), F_p) = 0; Z-homology is not fully determined")


def reduced_homology(C: ChainComplex, degrees: Iterable[int], coefficient: int = 0,
                     clearing: bool = True) -> HomologyResult:
    """Homology of ``C`` in the given degrees.

    Args:
        C: chain complex (with augmentation for reduced homology).
        degrees: degrees to compute.
        coefficient: ``0`` for Z, or a prime ``p``.
        clearing: drop rows of ``d_{i+1}`` indexed by pivot columns of ``d_i``.
    """
    degrees = sorted(set(degrees))
    if C.characteristic and coefficient not in (0, C.characteristic):
        raise ValueError("chains over F_p only admit F_p coefficients")
    modulus = coefficient or C.characteristic
    lo = degrees[0] if degrees else 0
    hi = degrees[-1] if degrees else -1
    # only pivots from unit-pivot reductions may be used for clearing; all are
    # units over a field and peeling/elimination only uses unit pivots over Z
    reductions: Dict[int, Reduction] = {}
    prev_pivots: Optional[np.ndarray] = None
    start = max(min(C.dims), lo) if C.dims else lo
    for p in range(start, hi + 2):
        M = C.boundary(p)
        if clearing and prev_pivots is not None and len(prev_pivots):
            dead = np.zeros(M.shape[0], dtype=bool)
            dead[prev_pivots] = True
            M = M.drop_rows(dead)
        red = reduce_matrix(M, modulus)
        reductions[p] = red
        prev_pivots = red.pivot_cols if red.dense_shape == (0, 0) else None
    out = {}
    for i in degrees:
        ri = reductions[i].rank if i in reductions else 0
        rn = reductions[i + 1].rank if i + 1 in reductions else 0
        betti = C.dim(i) - ri - rn
        tors = list(reductions[i + 1].divisors) if (i + 1 in reductions and not modulus) else []
        out[i] = DegreeHomology(i, betti, tors)
    coef = f"F_{modulus}" if modulus else "Z"
    return HomologyResult(coef, "field" if modulus else "Z", out, FIELD_CAVEAT if modulus and not C.characteristic else "")


def smith_homology(C: ChainComplex, degrees: Iterable[int]) -> HomologyResult:
    """Integer homology via sparse pre-reduction and dense Smith normal form."""
    if C.characteristic:
        raise ValueError("integer homology needs chains over Z")
    return reduced_homology(C, degrees, 0)


def field_betti(C: ChainComplex, p: int, degrees: Iterable[int]) -> HomologyResult:
    """Betti numbers over ``F_p`` by sparse elimination."""
    return reduced_homology(C, degrees, p)


def homology_by_policy(C: ChainComplex, degrees: Iterable[int], tier: str = "auto",
                       primes: Sequence[int] = FIELD_PRIMES) -> List[HomologyResult]:
    """Z tier when the complex is small enough, otherwise F_p for each prime.

    Returns one result for the Z tier, or one per prime for the field tier.
    Complexes whose chains are already over ``F_p`` always use that field.
    """
    degrees = list(degrees)
    if C.characteristic:
        return [reduced_homology(C, degrees, C.characteristic)]
    if tier == "Z" or (tier == "auto" and C.nnz() < Z_TIER_NNZ_LIMIT):
        try:
            return [reduced_homology(C, degrees, 0)]
        except BudgetExceeded:
            if tier == "Z":
                raise
    return [reduced_homology(C, degrees, p) for p in primes]


# --------------------------------------------------------------------------
# connectivity


def zero_connectivity(X) -> str:
    """``"empty"``, ``"nonempty-disconnected"`` or ``"connected"`` via union-find."""
    n = X.size(0)
    if n == 0:
        return "empty"
    if X.dim >= 1:
        E = X.level(1)
        g = sparse.coo_matrix((np.ones(len(E), dtype=np.int8), (E[:, 0], E[:, 1])), shape=(n, n))
        k, _ = csgraph.connected_components(g, directed=False)
        return "connected" if k == 1 else "nonempty-disconnected"
    if X.edge_oracle is not None:
        return "connected" if _bfs_connected(n, X.edge_oracle) else "nonempty-disconnected"
    return "connected" if n == 1 else "nonempty-disconnected"


def _bfs_connected(n: int, oracle, chunk: int = 512) -> bool:
    """Breadth-first search using a chunked adjacency oracle."""
    seen = np.zeros(n, dtype=bool)
    seen[0] = True
    frontier = np.array([0], dtype=np.int64)
    while len(frontier):
        reached = np.zeros(n, dtype=bool)
        for s in range(0, len(frontier), chunk):
            rows = oracle(frontier[s:s + chunk])
            reached |= rows.any(axis=0)
        new = reached & ~seen
        seen |= new
        frontier = np.nonzero(new)[0]
        if seen.all():
            return True
    return bool(seen.all())

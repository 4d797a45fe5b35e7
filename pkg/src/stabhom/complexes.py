"""Semisimplicial sets and simplicial complexes built from partial bases.

A :class:`SemisimplicialSet` stores each level as a lexicographically sorted
integer array of vertex-id tuples. The face ``d_i`` deletes entry ``i``. Every
complex built here has this form: K of a stability category, PB, PBC, SPB and
ordered complexes.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from . import category as cg
from . import ring as rg
from .ring import Submodule, SymplecticSpace, Vector

Simplex = Tuple[int, ...]


class SemisimplicialSet:
    """Levels of ordered vertex tuples closed under deleting entries.

    Args:
        vertices: payloads of the vertices (any hashable values).
        levels: ``levels[p]`` is a ``(count, p+1)`` int array of vertex ids,
            sorted lexicographically and without duplicates.
        name: label used in reports.
        faces: optional explicit face tables overriding deletion (used to
            cross-check the categorical construction).
        edge_oracle: optional callable ``ids -> bool matrix`` giving adjacency
            rows for vertices when level 1 is not materialized.
    """

    def __init__(
        self,
        vertices: Sequence[Any],
        levels: Sequence[np.ndarray],
        name: str = "",
        faces: Optional[Dict[int, np.ndarray]] = None,
        edge_oracle: Optional[Callable[[np.ndarray], np.ndarray]] = None,
        meta: Optional[Dict[str, Any]] = None,
    ) -> None:
        self.vertices = list(vertices)
        self.levels = [np.asarray(lv, dtype=np.int64).reshape(-1, p + 1) for p, lv in enumerate(levels)]
        while self.levels and len(self.levels[-1]) == 0:
            self.levels.pop()
        self.name = name
        self._faces: Dict[int, np.ndarray] = dict(faces or {})
        self._keys: Dict[int, Any] = {}
        self.edge_oracle = edge_oracle
        self.meta = dict(meta or {})

    # -- sizes -----------------------------------------------------------
    @property
    def dim(self) -> int:
        return len(self.levels) - 1

    def size(self, p: int) -> int:
        return len(self.levels[p]) if 0 <= p < len(self.levels) else 0

    def f_vector(self) -> List[int]:
        return [len(lv) for lv in self.levels]

    def level(self, p: int) -> np.ndarray:
        if 0 <= p < len(self.levels):
            return self.levels[p]
        return np.zeros((0, p + 1), dtype=np.int64)

    def simplex_payload(self, p: int, idx: int) -> Tuple[Any, ...]:
        return tuple(self.vertices[v] for v in self.levels[p][idx])

    # -- lookup ----------------------------------------------------------
    def _encode(self, arr: np.ndarray) -> Any:
        base = max(len(self.vertices), 1)
        width = arr.shape[1]
        if width * math.log2(base + 1) < 62:
            key = np.zeros(len(arr), dtype=np.int64)
            for j in range(width):
                key = key * base + arr[:, j]
            return key
        return None

    def _level_keys(self, p: int) -> Any:
        if p not in self._keys:
            lv = self.level(p)
            enc = self._encode(lv)
            if enc is None:
                enc = {tuple(r): i for i, r in enumerate(lv.tolist())}
            self._keys[p] = enc
        return self._keys[p]

    def lookup(self, p: int, tuples: np.ndarray) -> np.ndarray:
        """Indices in level ``p`` of the given vertex tuples (``-1`` when absent)."""
        tuples = np.asarray(tuples, dtype=np.int64).reshape(-1, p + 1)
        keys = self._level_keys(p)
        if isinstance(keys, dict):
            return np.array([keys.get(tuple(r), -1) for r in tuples.tolist()], dtype=np.int64)
        q = self._encode(tuples)
        pos = np.searchsorted(keys, q)
        pos = np.minimum(pos, max(len(keys) - 1, 0))
        found = (len(keys) > 0) & (keys[pos] == q) if len(keys) else np.zeros(len(q), dtype=bool)
        return np.where(found, pos, -1)

    def index(self, simplex: Sequence[int]) -> Optional[int]:
        p = len(simplex) - 1
        if p > self.dim:
            return None
        i = int(self.lookup(p, np.array([simplex]))[0])
        return None if i < 0 else i

    def faces(self, p: int) -> np.ndarray:
        """``(count, p+1)`` table: column ``i`` holds the index of ``d_i`` in level ``p-1``."""
        if p in self._faces:
            return self._faces[p]
        lv = self.level(p)
        out = np.zeros((len(lv), p + 1), dtype=np.int64)
        if p >= 1:
            for i in range(p + 1):
                sub = np.delete(lv, i, axis=1)
                idx = self.lookup(p - 1, sub)
                if len(idx) and (idx < 0).any():
                    bad = lv[int(np.argmax(idx < 0))]
                    raise ValueError(f"{self.name}: face {i} of {tuple(bad)} is missing")
                out[:, i] = idx
        self._faces[p] = out
        return out

    def check_simplicial_identities(self, max_p: Optional[int] = None) -> bool:
        """Assert ``d_i d_j = d_{j-1} d_i`` for ``i < j`` on every level."""
        top = self.dim if max_p is None else min(max_p, self.dim)
        for p in range(2, top + 1):
            fp, fq = self.faces(p), self.faces(p - 1)
            for j in range(p + 1):
                for i in range(j):
                    lhs = fq[fp[:, j], i]
                    rhs = fq[fp[:, i], j - 1]
                    if not np.array_equal(lhs, rhs):
                        raise AssertionError(f"{self.name}: simplicial identity fails for i={i}, j={j}, p={p}")
        return True

    def truncate(self, max_dim: int) -> "SemisimplicialSet":
        return SemisimplicialSet(self.vertices, self.levels[: max_dim + 1], self.name,
                                 {p: f for p, f in self._faces.items() if p <= max_dim},
                                 self.edge_oracle, self.meta)

    def to_json(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "f_vector": self.f_vector(),
            "levels": [lv.tolist() for lv in self.levels],
            "faces": [self.faces(p).tolist() for p in range(1, self.dim + 1)],
        }

    def __repr__(self) -> str:
        return f"SemisimplicialSet({self.name!r}, f={self.f_vector()})"


@dataclass
class SimplicialComplex:
    """A simplicial complex with all simplices stored as sorted vertex-id tuples."""

    vertices: List[Any]
    simplices: List[List[Simplex]] = field(default_factory=list)
    name: str = ""

    @classmethod
    def from_facets(cls, vertices: Sequence[Any], facets: Iterable[Iterable[int]], name: str = "") -> "SimplicialComplex":
        levels: Dict[int, set] = {}
        for f in facets:
            f = tuple(sorted(set(f)))
            for k in range(1, len(f) + 1):
                for sub in itertools.combinations(f, k):
                    levels.setdefault(k - 1, set()).add(sub)
        top = max(levels) if levels else -1
        simplices = [sorted(levels.get(p, ())) for p in range(top + 1)]
        return cls(list(vertices), simplices, name)

    @property
    def dim(self) -> int:
        return len(self.simplices) - 1

    def contains(self, s: Iterable[int]) -> bool:
        s = tuple(sorted(set(s)))
        p = len(s) - 1
        if p < 0:
            return True
        return p <= self.dim and _sorted_member(self.simplices[p], s)

    def all_simplices(self) -> Iterable[Simplex]:
        for lv in self.simplices:
            yield from lv

    def link(self, sigma: Iterable[int]) -> "SimplicialComplex":
        sigma = set(sigma)
        if not self.contains(sigma):
            raise ValueError("simplex not in complex")
        facets = []
        for s in self.all_simplices():
            if sigma <= set(s):
                rest = tuple(v for v in s if v not in sigma)
                if rest:
                    facets.append(rest)
        return SimplicialComplex.from_facets(self.vertices, facets, f"Lk({sorted(sigma)})")

    def oriented(self) -> SemisimplicialSet:
        """The semisimplicial set of increasingly ordered simplices (same homology)."""
        levels = [np.array(lv, dtype=np.int64).reshape(-1, p + 1) for p, lv in enumerate(self.simplices)]
        return SemisimplicialSet(self.vertices, levels, self.name + "[oriented]")


def _sorted_member(sorted_list: List[Simplex], s: Simplex) -> bool:
    import bisect

    i = bisect.bisect_left(sorted_list, s)
    return i < len(sorted_list) and sorted_list[i] == s


# --------------------------------------------------------------------------
# generic constructions


def ordered_complex(X: SimplicialComplex) -> SemisimplicialSet:
    """``X^ord``: every simplex with every ordering of its vertices."""
    levels = []
    for p, lv in enumerate(X.simplices):
        rows = sorted(perm for s in lv for perm in itertools.permutations(s))
        levels.append(np.array(rows, dtype=np.int64).reshape(-1, p + 1))
    return SemisimplicialSet(X.vertices, levels, X.name + "^ord")


def underlying_complex(X: SemisimplicialSet) -> SimplicialComplex:
    """Forget orderings (and collapse ordered copies of the same vertex set)."""
    simplices = []
    for p, lv in enumerate(X.levels):
        if len(lv) == 0:
            break
        srt = np.unique(np.sort(lv, axis=1), axis=0)
        keep = np.all(np.diff(srt, axis=1) > 0, axis=1) if p else np.ones(len(srt), dtype=bool)
        simplices.append([tuple(r) for r in srt[keep].tolist()])
    return SimplicialComplex(X.vertices, simplices, X.name + "_o")


def link(X: SemisimplicialSet, sigma: Sequence[int]) -> SemisimplicialSet:
    """Ordered link: tuples ``tau`` such that ``sigma`` followed by ``tau`` is a simplex.

    For the complexes built here membership does not depend on the vertex
    order, so this equals the ordered complex of the unordered link.
    """
    sigma = tuple(int(v) for v in sigma)
    k = len(sigma)
    if X.index(sigma) is None:
        raise ValueError("sigma is not a simplex")
    levels = []
    for p in range(k, X.dim + 1):
        lv = X.level(p)
        mask = np.all(lv[:, :k] == np.array(sigma, dtype=np.int64), axis=1)
        tail = lv[mask][:, k:]
        if len(tail) == 0:
            break
        levels.append(np.unique(tail, axis=0))
    return SemisimplicialSet(X.vertices, levels, f"Lk({sigma}) in {X.name}")


def relabel(X: SemisimplicialSet, mapping: Sequence[int], vertices: Sequence[Any], name: str = "") -> SemisimplicialSet:
    """Apply a vertex relabelling and re-sort levels."""
    m = np.asarray(mapping, dtype=np.int64)
    levels = []
    for lv in X.levels:
        new = m[lv] if len(lv) else lv
        levels.append(np.unique(new, axis=0) if len(new) else new)
    return SemisimplicialSet(vertices, levels, name or X.name)


def is_isomorphic_by(X: SemisimplicialSet, Y: SemisimplicialSet, vertex_map: Sequence[int]) -> bool:
    """Does the vertex bijection ``X -> Y`` carry every level of ``X`` onto ``Y``?

    Faces are deletions on both sides, so level equality is a face-commuting
    isomorphism.
    """
    if len(set(vertex_map)) != len(X.vertices) or len(X.vertices) != len(Y.vertices):
        return False
    if X.f_vector() != Y.f_vector():
        return False
    Z = relabel(X, vertex_map, Y.vertices)
    return all(np.array_equal(a, b) for a, b in zip(Z.levels, Y.levels))


def flag_levels(adj: Sequence[int], max_dim: int, cap: Optional[int] = None) -> List[np.ndarray]:
    """Ordered cliques (levels ``0..max_dim``) of a graph given by bitsets."""
    return cg.clique_levels(adj, max_dim + 1, cap=cap)


def _default_max_dim(max_dim: Optional[int], top: int) -> int:
    return top if max_dim is None else min(max_dim, top)


# --------------------------------------------------------------------------
# K of a stability category


def build_K(cat: cg.CategoryId, n: int, max_dim: Optional[int] = None, route: str = "fast",
            cap: Optional[int] = None) -> SemisimplicialSet:
    """``K_p = Hom(p+1, n)`` with faces given by precomposition with ``h_i``.

    Args:
        cat: the category.
        n: target rank (genus for SI).
        max_dim: keep levels ``0..max_dim`` (default: all, i.e. ``n-1``).
        route: ``"fast"`` enumerates cliques of compatible vertices and uses
            deletion as faces. ``"categorical"`` enumerates each hom-set and
            computes faces by composing morphisms; it is slow and meant as a
            cross-check.
        cap: maximal number of simplices per level.
    """
    top = _default_max_dim(max_dim, n - 1)
    name = f"K[{cat.spec}]({n})"
    verts = cg.vertex_table(cg._full(cat), n)
    verts = tuple(cg.Morphism(cat, 1, n, v.cols, v.duals) for v in verts)
    if route == "categorical":
        return _build_K_categorical(cat, n, top, verts, name)
    if top < 0 or n == 0:
        return SemisimplicialSet(verts, [], name)
    adj = cg.adjacency_bitsets(cg.compatibility_matrix(cat, verts))
    levels = flag_levels(adj, top, cap=cap)
    if cat.kind == "vic-h" and top == n - 1 and n >= 1:
        lv = levels[n - 1]
        keep = [i for i, row in enumerate(lv.tolist())
                if cg.determinant(cg._morphism_from_vertices(cat, n, [verts[j] for j in row])) in cat.H]
        levels[n - 1] = lv[keep]
    return SemisimplicialSet(verts, levels, name, meta={"category": cat.spec, "n": n})


def _build_K_categorical(cat, n, top, verts, name) -> SemisimplicialSet:
    vindex = {v.key(): i for i, v in enumerate(verts)}
    levels, faces = [], {}
    prev_index: Dict[Tuple, int] = {}
    for p in range(top + 1):
        homs = cg.hom_set(cat, p + 1, n)
        rows = []
        for sigma in homs:
            row = []
            for j in range(p + 1):
                vj = cg.compose(sigma, _slot(cat, p + 1, j))
                row.append(vindex[vj.key()])
            rows.append(row)
        arr = np.array(rows, dtype=np.int64).reshape(-1, p + 1)
        order = np.lexsort(arr.T[::-1]) if len(arr) else np.arange(0)
        arr = arr[order]
        homs = [homs[i] for i in order]
        if p >= 1:
            ft = np.zeros((len(homs), p + 1), dtype=np.int64)
            for s, sigma in enumerate(homs):
                for i in range(p + 1):
                    ft[s, i] = prev_index[cg.compose(sigma, cg.face_morphism(cat, p, i)).key()]
            faces[p] = ft
        prev_index = {h.key(): i for i, h in enumerate(homs)}
        levels.append(arr)
    return SemisimplicialSet(verts, levels, name + "[categorical]", faces=faces)


def _slot(cat: cg.CategoryId, k: int, j: int) -> cg.Morphism:
    """The morphism ``1 -> k`` onto summand ``j``."""
    b = cat.block
    N = cat.dim(k)
    e = tuple(tuple(int(r == b * j + t) for r in range(N)) for t in range(b))
    return cg.Morphism(cat, 1, k, e, e)


# --------------------------------------------------------------------------
# partial bases


def _coords(V: Submodule) -> Tuple[List[Vector], int]:
    """A basis of a free summand ``V`` and its rank."""
    if not V.is_splittable:
        raise ValueError("ambient submodule must be a free summand")
    b = list(V.basis())
    return b, len(b)


def _to_ambient(basis: Sequence[Vector], c: Sequence[int], m: int) -> Vector:
    N = len(basis[0]) if basis else 0
    out = [0] * N
    for bi, ci in zip(basis, c):
        if ci:
            out = [(o + ci * x) % m for o, x in zip(out, bi)]
    return tuple(out)


def build_pb(U: Submodule, W: Submodule, ambient: Optional[Submodule] = None,
             max_dim: Optional[int] = None) -> SemisimplicialSet:
    """``PB(U, W)``: ordered partial bases of ``U`` that extend a basis of ``W``.

    The partial-basis condition is taken inside ``ambient`` (default: the
    whole coordinate module). ``W = 0`` gives ``PB(U)``.
    """
    m, N = U.modulus, U.ambient_rank
    V = ambient or Submodule.full(m, N)
    for X in (U, W):
        if not X.is_splittable:
            raise ValueError("U and W must be splittable")
    Vb, rkV = _coords(V)
    wb = list(W.basis())
    verts = sorted(v for v in U.elements() if _extends(list(wb) + [v], Vb, m, N))
    top = _default_max_dim(max_dim, U.rank_free - 1 if U.rank_free is not None else rkV - 1)
    levels: List[np.ndarray] = []
    if verts and top >= 0:
        states: List[Tuple[Tuple[int, ...], List[Vector]]] = [((i,), [v]) for i, v in enumerate(verts)]
        levels.append(np.arange(len(verts), dtype=np.int64).reshape(-1, 1))
        for p in range(1, top + 1):
            nxt = []
            for tup, vecs in states:
                used = set(tup)
                for j, u in enumerate(verts):
                    if j in used:
                        continue
                    cand = vecs + [u]
                    if _extends(wb + cand, Vb, m, N):
                        nxt.append((tup + (j,), cand))
            if not nxt:
                break
            levels.append(np.array([t for t, _ in nxt], dtype=np.int64))
            states = nxt
    return SemisimplicialSet(verts, levels, f"PB(U,W)")


def _extends(vectors: Sequence[Vector], Vbasis: Sequence[Vector], m: int, N: int) -> bool:
    """Are ``vectors`` a partial basis of the free summand spanned by ``Vbasis``?"""
    if not vectors:
        return True
    if len(Vbasis) == N:
        return rg.is_partial_basis(list(vectors), m, N)
    # express in coordinates of V and test there
    full = rg.complete_basis(list(Vbasis), m, N)
    inv = rg.mat_inverse(full, m)
    r = len(Vbasis)
    coords = []
    for v in vectors:
        c = [sum(inv[i][j] * v[j] for j in range(N)) % m for i in range(N)]
        if any(c[r:]):
            return False
        coords.append(tuple(c[:r]))
    return rg.is_partial_basis(coords, m, r)


@dataclass(frozen=True)
class PBCVertex:
    """A vertex ``(v, C)`` of a PBC complex."""

    v: Vector
    C: Submodule

    def __lt__(self, other: "PBCVertex") -> bool:
        return (self.v, self.C.howell) < (other.v, other.C.howell)


def build_pbc(V: Submodule, U: Submodule, W: Submodule, max_dim: Optional[int] = None,
              cap: Optional[int] = None) -> SemisimplicialSet:
    """``PBC(V, U, W)``: simplices ``(f, C)`` with ``im f`` in ``U`` and ``W`` in ``C``.

    Vertices are pairs ``(v, C)``; pairwise compatibility ``v_i in C_j`` makes
    this the full flag complex on its vertices. Face ``d_i`` absorbs ``v_i``
    into the complement, which is deletion on vertex tuples.
    """
    m, N = V.modulus, V.ambient_rank
    for X in (U, W):
        if not X.is_splittable:
            raise ValueError("U and W must be splittable")
    if not (U <= V and W <= V):
        raise ValueError("U and W must lie in V")
    Vb, r = _coords(V)
    verts: List[PBCVertex] = []
    for v in sorted(U.elements()):
        if not _extends([v], Vb, m, N):
            continue
        for C in _relative_complements(Submodule.span([v], m, N), V):
            if W <= C:
                verts.append(PBCVertex(v, C))
    verts.sort()
    n = len(verts)
    compat = np.zeros((n, n), dtype=bool)
    for i, a in enumerate(verts):
        for j, b in enumerate(verts):
            if i != j and b.C.contains(a.v) and a.C.contains(b.v):
                compat[i, j] = True
    top = _default_max_dim(max_dim, (U.rank_free or 0) - 1)
    levels = flag_levels(cg.adjacency_bitsets(compat), top, cap=cap) if n and top >= 0 else []
    return SemisimplicialSet(verts, levels, "PBC(V,U,W)")


def _relative_complements(L: Submodule, V: Submodule) -> List[Submodule]:
    """All complements of ``L`` inside the free summand ``V`` (deterministic order)."""
    m, N = V.modulus, V.ambient_rank
    if V == Submodule.full(m, N):
        return rg.enumerate_complements(L)
    Vb, r = _coords(V)
    full = rg.complete_basis(list(Vb), m, N)
    inv = rg.mat_inverse(full, m)
    Lc = [tuple(sum(inv[i][j] * x[j] for j in range(N)) % m for i in range(r)) for x in L.howell]
    out = []
    for C in rg.enumerate_complements(Submodule.span(Lc, m, r)):
        gens = [_to_ambient(Vb, c, m) for c in C.howell]
        out.append(Submodule.span(gens, m, N))
    return sorted(out, key=lambda c: c.howell)


# --------------------------------------------------------------------------
# symplectic partial bases


def hyperbolic_pairs(space: SymplecticSpace, W: Optional[Submodule] = None) -> List[Tuple[Vector, Vector]]:
    """All pairs ``(a, b)`` with ``<a, b> = 1``, both orthogonal to ``W``."""
    m, N = space.modulus, space.dim
    vecs = list(itertools.product(range(m), repeat=N))
    if W is not None:
        gens = W.howell
        vecs = [x for x in vecs if all(space.form(x, w) == 0 for w in gens)]
    arr = np.array(vecs, dtype=np.int64).reshape(-1, N)
    J = np.array(space.gram, dtype=np.int64)
    out = []
    forms = (arr @ J @ arr.T) % m
    for i in range(len(vecs)):
        for j in np.nonzero(forms[i] == 1)[0]:
            out.append((vecs[i], vecs[int(j)]))
    return out


def _pair_arrays(space: SymplecticSpace, pairs: Sequence[Tuple[Vector, Vector]]) -> Tuple[np.ndarray, np.ndarray]:
    A = np.array([p[0] for p in pairs], dtype=np.int64).reshape(-1, space.dim)
    B = np.array([p[1] for p in pairs], dtype=np.int64).reshape(-1, space.dim)
    return A, B


def spb_orthogonality(space: SymplecticSpace, pairs: Sequence[Tuple[Vector, Vector]]) -> Callable[[np.ndarray], np.ndarray]:
    """Adjacency oracle: rows of ``pair_i  perp  pair_j`` for a chunk of ids."""
    A, B = _pair_arrays(space, pairs)
    J = np.array(space.gram, dtype=np.int64)
    m = space.modulus
    AJ, BJ = A @ J, B @ J

    def rows(ids: np.ndarray) -> np.ndarray:
        ids = np.asarray(ids, dtype=np.int64)
        ok = np.ones((len(ids), len(pairs)), dtype=bool)
        for X in (AJ[ids], BJ[ids]):
            for Y in (A, B):
                ok &= (X @ Y.T) % m == 0
        ok[np.arange(len(ids)), ids] = False
        return ok

    return rows


def build_spb(space: SymplecticSpace, W: Optional[Submodule] = None, max_dim: Optional[int] = None,
              lazy_edges: bool = False, cap: Optional[int] = None) -> SemisimplicialSet:
    """Ordered symplectic partial bases, optionally restricted to ``span^perp ⊇ W``.

    With ``lazy_edges`` only the vertices are materialized and adjacency is
    available through ``edge_oracle`` (for connectivity of large genus).
    """
    pairs = hyperbolic_pairs(space, W)
    oracle = spb_orthogonality(space, pairs)
    top = _default_max_dim(max_dim, space.genus - 1)
    name = f"SPB(genus {space.genus})" + ("" if W is None else " ∩ Lk(W)")
    if lazy_edges or not pairs:
        levels = [np.arange(len(pairs), dtype=np.int64).reshape(-1, 1)] if pairs and top >= 0 else []
        return SemisimplicialSet(pairs, levels, name, edge_oracle=oracle)
    compat = oracle(np.arange(len(pairs)))
    levels = flag_levels(cg.adjacency_bitsets(compat), top, cap=cap) if top >= 0 else []
    return SemisimplicialSet(pairs, levels, name, edge_oracle=oracle)


# --------------------------------------------------------------------------
# join complexes and wCM


@dataclass
class JoinReport:
    is_join: bool
    reason: str = ""
    witness: Any = None


def is_join_complex(Y: SimplicialComplex, X: SimplicialComplex, pi: Sequence[int]) -> JoinReport:
    """Check that the vertex map ``pi`` exhibits ``Y`` as a join complex over ``X``.

    The lifting condition is checked per simplex ``rho`` of ``X``: with
    ``L_x`` the vertices over ``x`` that lie in simplices over ``rho``, every
    choice from ``prod L_x`` must span a simplex, i.e. the number of simplices
    over ``rho`` must equal ``prod |L_x|``.
    """
    fibers: Dict[Simplex, List[Simplex]] = {}
    for s in Y.all_simplices():
        img = tuple(sorted({pi[v] for v in s}))
        if len(img) != len(s):
            return JoinReport(False, "not simplexwise injective", s)
        if not X.contains(img):
            return JoinReport(False, "not simplicial", s)
        fibers.setdefault(img, []).append(s)
    for rho in X.all_simplices():
        if rho not in fibers:
            return JoinReport(False, "not surjective", rho)
    for rho, over in fibers.items():
        L: Dict[int, set] = {x: set() for x in rho}
        for s in over:
            for v in s:
                L[pi[v]].add(v)
        expected = math.prod(len(L[x]) for x in rho)
        if expected != len(over):
            present = set(over)
            for choice in itertools.product(*(sorted(L[x]) for x in rho)):
                if tuple(sorted(choice)) not in present:
                    return JoinReport(False, "lifting condition fails", choice)
    return JoinReport(True)


@dataclass
class WCMReport:
    dimension: int
    passed: bool
    global_ok: bool
    failures: List[Tuple[Simplex, int]]
    links_checked: int
    note: str = "homology surrogate: reduced homology vanishing stands in for connectivity"


def wcm_check(X: SimplicialComplex, n: int, coefficient: int = 0) -> WCMReport:
    """Check (i) ``H~_i(X) = 0`` for ``i <= n-1`` and (ii) ``H~_i(Lk s) = 0`` for ``i <= n-2-p``."""
    from .homology import chain_complex_of, reduced_homology

    def vanishes(K: SimplicialComplex, upto: int) -> bool:
        if upto < -1:
            return True
        S = K.oriented().truncate(upto + 1)
        res = reduced_homology(chain_complex_of(S), range(-1, upto + 1), coefficient=coefficient)
        return res.vanishes()

    global_ok = vanishes(X, n - 1)
    failures = []
    count = 0
    for p, lv in enumerate(X.simplices):
        if n - 2 - p < -1:
            break
        for s in lv:
            count += 1
            if not vanishes(X.link(s), n - 2 - p):
                failures.append((s, n - 2 - p))
    return WCMReport(n, global_ok and not failures, global_ok, failures, count)

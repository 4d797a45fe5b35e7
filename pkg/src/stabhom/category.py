"""Finite stability groupoids and their stability categories.

Every morphism ``m -> n`` is stored as a pair of matrices ``(F, Xi)`` with
``Xi F = I``. ``F`` is given by its columns (the images of the basis of the
source). ``Xi`` is given by its rows (dual functionals), and its kernel is the
complement of the image. This covers all four families:

* FI: ``F`` is a 0/1 injection matrix and ``Xi = F^T``.
* VIC(R) and VIC^H(R): ``F`` is an ordered partial basis and ``ker Xi = C``.
* SI(R): ``F`` lists hyperbolic pairs ``a_1, b_1, ...`` and ``Xi`` is the
  symplectic projection, so ``ker Xi`` is the orthogonal complement.

Composition is ``(F, Xi) o (G, Eta) = (F G, Eta Xi)``, which is the rule
``(f, C) o (g, D) = (f g, C + f(D))`` in disguise. Automorphisms of ``n`` are
morphisms ``n -> n``, so the groups ``G_n`` reuse the same type.

Coordinates: ``G_k`` sits in ``G_n`` as the upper-left block ``g + id``. The
deterministic section of a morphism ``phi: m -> n`` is the automorphism whose
first columns are a basis of the complement and whose last columns are
``F``. The section's twist therefore lives in the upper-left block.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from . import ring as rg
from .ring import FiniteRing, SymplecticSpace, Vector

DEFAULT_GROUP_CAP = 10**7
DEFAULT_HOM_CAP = 5 * 10**6

KINDS = ("fi", "vic", "vic-h", "si")


class CapExceeded(RuntimeError):
    """An enumeration would exceed its configured cap."""


@dataclass(frozen=True)
class CategoryId:
    """One of FI, VIC(Z/m), VIC^H(Z/m), SI(Z/m).

    For SI the object ``n`` denotes the genus, i.e. the module ``R^{2n}``.
    """

    kind: str
    ring: Optional[FiniteRing] = None
    H: Optional[Tuple[int, ...]] = None

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"unknown category kind {self.kind!r}")
        if self.kind == "fi":
            if self.ring is not None:
                raise ValueError("FI takes no ring")
            return
        if self.ring is None:
            raise ValueError(f"{self.kind} needs a ring")
        if self.kind == "vic-h":
            if self.H is None:
                raise ValueError("vic-h needs a unit subgroup H")
            m = self.ring.modulus
            Hs = set(self.H)
            if 1 not in Hs or any(not self.ring.is_unit(h) for h in Hs):
                raise ValueError("H must contain 1 and consist of units")
            if any((a * b) % m not in Hs for a in Hs for b in Hs):
                raise ValueError("H is not closed under multiplication")
            object.__setattr__(self, "H", tuple(sorted(Hs)))
        elif self.H is not None:
            raise ValueError("only vic-h takes H")

    @classmethod
    def parse(cls, spec: str) -> "CategoryId":
        """Parse ``"fi"``, ``"vic:zmod:2"``, ``"vic-h:zmod:3:{1}"``, ``"si:zmod:2"``."""
        spec = spec.strip()
        if spec == "fi":
            return cls("fi")
        parts = spec.split(":")
        kind = parts[0]
        if kind in ("vic", "si") and len(parts) == 3:
            return cls(kind, FiniteRing.parse(":".join(parts[1:3])))
        if kind == "vic-h" and len(parts) == 4:
            body = parts[3].strip()
            if not (body.startswith("{") and body.endswith("}")):
                raise ValueError(f"bad H in {spec!r}; expected e.g. '{{1,2}}'")
            H = tuple(int(x) for x in body[1:-1].split(",") if x.strip())
            return cls(kind, FiniteRing.parse(":".join(parts[1:3])), H)
        raise ValueError(f"bad category spec {spec!r}")

    @property
    def spec(self) -> str:
        if self.kind == "fi":
            return "fi"
        base = f"{self.kind}:{self.ring.spec}"
        if self.kind == "vic-h":
            return base + ":{" + ",".join(map(str, self.H)) + "}"
        return base

    @property
    def modulus(self) -> int:
        # FI matrices only ever hold 0/1 entries with sums of at most one term,
        # so reducing modulo 2 is harmless and keeps the arithmetic uniform.
        return 2 if self.ring is None else self.ring.modulus

    @property
    def block(self) -> int:
        """Ambient coordinates per unit of rank (2 for SI, else 1)."""
        return 2 if self.kind == "si" else 1

    def dim(self, n: int) -> int:
        return self.block * n

    @property
    def has_full_units(self) -> bool:
        return self.kind != "vic-h" or set(self.H) == set(self.ring.units)

    def symplectic_space(self, n: int) -> SymplecticSpace:
        return SymplecticSpace(n, self.modulus)


@dataclass(frozen=True)
class Morphism:
    """A morphism ``source -> target`` of a stability category.

    Attributes:
        cat: the category.
        source: rank (genus for SI) of the source.
        target: rank of the target.
        cols: images of the source basis (``dim(source)`` vectors in ``R^dim(target)``).
        duals: rows of the left inverse ``Xi``; its kernel is the complement.
    """

    cat: CategoryId
    source: int
    target: int
    cols: Tuple[Vector, ...]
    duals: Tuple[Vector, ...]

    # payload views -------------------------------------------------------
    @property
    def word(self) -> Tuple[int, ...]:
        """FI only: the injection as the tuple of images (0-based)."""
        return tuple(c.index(1) for c in self.cols)

    @property
    def vectors(self) -> Tuple[Vector, ...]:
        return self.cols

    @property
    def pairs(self) -> Tuple[Tuple[Vector, Vector], ...]:
        return tuple((self.cols[2 * i], self.cols[2 * i + 1]) for i in range(self.source))

    @property
    def complement(self) -> rg.Submodule:
        """The complement ``ker Xi`` as a canonical submodule."""
        return rg.Submodule.span(self._complement_gens(), self.cat.modulus, self.cat.dim(self.target))

    def _complement_gens(self) -> List[Vector]:
        # (I - F Xi) e_j spans ker Xi because Xi F = I
        m, N = self.cat.modulus, self.cat.dim(self.target)
        gens = []
        for j in range(N):
            v = [int(i == j) for i in range(N)]
            for c, d in zip(self.cols, self.duals):
                if d[j]:
                    v = [(x - d[j] * y) % m for x, y in zip(v, c)]
            gens.append(tuple(v))
        return gens

    def key(self) -> Tuple:
        return (self.source, self.target, self.cols, self.duals)

    def matrix(self) -> rg.Matrix:
        """``F`` as rows."""
        return rg.mat_transpose(self.cols, len(self.cols), self.cat.dim(self.target)) if self.cols else ()

    def __repr__(self) -> str:
        if self.cat.kind == "fi":
            return f"Morphism(fi, {self.source}->{self.target}, word={self.word})"
        return f"Morphism({self.cat.spec}, {self.source}->{self.target}, cols={self.cols}, duals={self.duals})"


# --------------------------------------------------------------------------
# basic constructions


def identity(cat: CategoryId, n: int) -> Morphism:
    N = cat.dim(n)
    e = tuple(tuple(int(i == j) for i in range(N)) for j in range(N))
    return Morphism(cat, n, n, e, e)


def _apply(cols: Sequence[Vector], x: Sequence[int], m: int, N: int) -> Vector:
    """``F x`` where ``F`` is given by columns."""
    out = [0] * N
    for c, a in zip(cols, x):
        if a:
            out = [(o + a * ci) % m for o, ci in zip(out, c)]
    return tuple(out)


def _pull(duals: Sequence[Vector], y: Sequence[int], m: int, N: int) -> Vector:
    """``y Xi`` for a row vector ``y``."""
    out = [0] * N
    for d, a in zip(duals, y):
        if a:
            out = [(o + a * di) % m for o, di in zip(out, d)]
    return tuple(out)


def compose(f: Morphism, g: Morphism) -> Morphism:
    """``f o g`` for ``g: l -> m`` and ``f: m -> n``."""
    if g.target != f.source or f.cat != g.cat:
        raise ValueError(f"cannot compose {f.source}->{f.target} after {g.source}->{g.target}")
    m = f.cat.modulus
    N = f.cat.dim(f.target)
    cols = tuple(_apply(f.cols, c, m, N) for c in g.cols)
    duals = tuple(_pull(f.duals, d, m, N) for d in g.duals)
    return Morphism(f.cat, g.source, f.target, cols, duals)


def inverse(g: Morphism) -> Morphism:
    """Inverse of an automorphism: swap ``F`` and ``Xi``."""
    if g.source != g.target:
        raise ValueError("only automorphisms are invertible")
    N = g.cat.dim(g.source)
    cols = tuple(tuple(g.duals[i][j] for i in range(N)) for j in range(N))
    duals = tuple(tuple(g.cols[j][i] for j in range(N)) for i in range(N))
    return Morphism(g.cat, g.source, g.target, cols, duals)


def monoidal_sum(f: Morphism, g: Morphism) -> Morphism:
    """Block sum ``f + g: f.source + g.source -> f.target + g.target``."""
    if f.cat != g.cat:
        raise ValueError("category mismatch")
    cat = f.cat
    Nf, Ng = cat.dim(f.target), cat.dim(g.target)
    zf, zg = (0,) * Nf, (0,) * Ng
    cols = tuple(c + zg for c in f.cols) + tuple(zf + c for c in g.cols)
    duals = tuple(d + zg for d in f.duals) + tuple(zf + d for d in g.duals)
    return Morphism(cat, f.source + g.source, f.target + g.target, cols, duals)


def canonical_inclusion(cat: CategoryId, n: int) -> Morphism:
    """The morphism ``n = n + 0 -> n + 1`` (new coordinates at the end)."""
    N, N1 = cat.dim(n), cat.dim(n + 1)
    e = tuple(tuple(int(i == j) for i in range(N1)) for j in range(N))
    return Morphism(cat, n, n + 1, e, e)


def face_morphism(cat: CategoryId, p: int, i: int) -> Morphism:
    """``h_i: p -> p+1``, the coordinate insertion that skips slot ``i+1``."""
    if not 0 <= i <= p:
        raise ValueError(f"face index {i} out of range for p={p}")
    b = cat.block
    N1 = cat.dim(p + 1)
    skip = set(range(b * i, b * i + b))
    e = tuple(tuple(int(r == j) for r in range(N1)) for j in range(N1) if j not in skip)
    return Morphism(cat, p, p + 1, e, e)


def sigma(cat: CategoryId, n: int) -> Morphism:
    """The involution swapping the last two rank-one summands of ``n``."""
    if n < 2:
        raise ValueError("sigma_n needs n >= 2")
    b = cat.block
    N = cat.dim(n)
    perm = list(range(N))
    for t in range(b):
        perm[N - 2 * b + t], perm[N - b + t] = perm[N - b + t], perm[N - 2 * b + t]
    cols = tuple(tuple(int(r == perm[j]) for r in range(N)) for j in range(N))
    return Morphism(cat, n, n, cols, cols)


def cyclic_shift(cat: CategoryId, n: int) -> Morphism:
    """Automorphism of ``n`` moving summand ``j`` to ``j+1`` and the last to the first.

    Composed with the canonical inclusion ``n-1 -> n`` it gives ``iota + id``,
    the inclusion with complement the first summand.
    """
    b = cat.block
    N = cat.dim(n)
    cols = tuple(tuple(int(r == (j + b) % N) for r in range(N)) for j in range(N))
    return Morphism(cat, n, n, cols, cols)


def determinant(g: Morphism) -> int:
    return rg.det_mod(g.matrix(), g.cat.modulus)


# --------------------------------------------------------------------------
# vertices (morphisms 1 -> n) and hom-set enumeration


@lru_cache(maxsize=None)
def vertex_table(cat: CategoryId, n: int) -> Tuple[Morphism, ...]:
    """All morphisms ``1 -> n`` in a deterministic (lexicographic) order."""
    if n < 1:
        return ()
    m = cat.modulus
    if cat.kind == "fi":
        out = []
        for j in range(n):
            e = (tuple(int(r == j) for r in range(n)),)
            out.append(Morphism(cat, 1, n, e, e))
        return tuple(out)
    if cat.kind in ("vic", "vic-h"):
        out = []
        vecs = list(itertools.product(range(m), repeat=n))
        for v in vecs:
            if not rg.is_unimodular(v, m):
                continue
            for xi in vecs:
                if rg.dot(xi, v, m) == 1:
                    out.append(Morphism(cat, 1, n, (v,), (xi,)))
        if cat.kind == "vic-h" and n == 1:
            out = [f for f in out if f.cols[0][0] in cat.H]
        return tuple(out)
    space = cat.symplectic_space(n)
    out = []
    vecs = list(itertools.product(range(m), repeat=2 * n))
    for a in vecs:
        if not rg.is_unimodular(a, m):
            continue
        for b in vecs:
            if space.form(a, b) == 1:
                out.append(Morphism(cat, 1, n, (a, b), _symplectic_duals(space, (a, b))))
    return tuple(out)


def _symplectic_duals(space: SymplecticSpace, cols: Sequence[Vector]) -> Tuple[Vector, ...]:
    """Rows of the symplectic projection onto the span of hyperbolic pairs."""
    N = space.dim
    e = [tuple(int(r == j) for r in range(N)) for j in range(N)]
    duals = []
    for t in range(0, len(cols), 2):
        a, b = cols[t], cols[t + 1]
        duals.append(tuple(space.form(x, b) for x in e))
        duals.append(tuple(space.form(a, x) for x in e))
    return tuple(duals)


def compatibility_matrix(cat: CategoryId, verts: Sequence[Morphism]) -> np.ndarray:
    """Boolean matrix: ``x`` and ``y`` can sit in one morphism (``Xi_x F_y = 0`` both ways)."""
    n = len(verts)
    if n == 0:
        return np.zeros((0, 0), dtype=bool)
    m = cat.modulus
    b = cat.block
    C = np.array([c for v in verts for c in v.cols], dtype=np.int64)  # (b*n, N)
    D = np.array([d for v in verts for d in v.duals], dtype=np.int64)
    P = (D @ C.T) % m  # P[(x,s),(y,t)] = xi_{x,s}(col_{y,t})
    Z = (P == 0).reshape(n, b, n, b).all(axis=(1, 3))
    return Z & Z.T


def adjacency_bitsets(compat: np.ndarray) -> List[int]:
    """Rows of a boolean matrix as Python int bitsets (bit j = column j)."""
    if compat.size == 0:
        return [0] * compat.shape[0]
    packed = np.packbits(compat, axis=1, bitorder="little")
    return [int.from_bytes(row.tobytes(), "little") for row in packed]


def ordered_cliques(adj: Sequence[int], size: int, allowed: Optional[int] = None) -> np.ndarray:
    """All ordered ``size``-tuples of pairwise adjacent vertices, lexicographically.

    Args:
        adj: adjacency bitsets.
        size: tuple length.
        allowed: optional bitset restricting the vertices.

    Returns:
        An ``(count, size)`` int64 array.
    """
    levels = clique_levels(adj, size, allowed)
    return levels[size - 1] if size >= 1 else np.zeros((1, 0), dtype=np.int64)


def clique_levels(adj: Sequence[int], max_size: int, allowed: Optional[int] = None,
                  cap: Optional[int] = None) -> List[np.ndarray]:
    """Ordered cliques of sizes ``1..max_size``; entry ``p`` holds size ``p+1``.

    Each level is lexicographically sorted because parents are visited in order
    and children are appended by increasing vertex id.
    """
    n = len(adj)
    full = (1 << n) - 1 if allowed is None else allowed
    out: List[np.ndarray] = []
    if max_size < 1:
        return out
    verts = [v for v in range(n) if (full >> v) & 1]
    out.append(np.array(verts, dtype=np.int64).reshape(-1, 1))
    tuples: List[Tuple[int, ...]] = [(v,) for v in verts]
    masks: List[int] = [adj[v] & full for v in verts]
    for size in range(2, max_size + 1):
        last = size == max_size
        new_tuples: List[Tuple[int, ...]] = []
        new_masks: List[int] = []
        for t, mask in zip(tuples, masks):
            rest = mask
            while rest:
                low = rest & -rest
                u = low.bit_length() - 1
                rest ^= low
                new_tuples.append(t + (u,))
                if not last:
                    new_masks.append(mask & adj[u])
            if cap is not None and len(new_tuples) > cap:
                raise CapExceeded(f"more than {cap} cliques of size {size}")
        out.append(np.array(new_tuples, dtype=np.int64).reshape(-1, size))
        tuples, masks = new_tuples, new_masks
    return out


def _morphism_from_vertices(cat: CategoryId, n: int, verts: Sequence[Morphism]) -> Morphism:
    cols = tuple(c for v in verts for c in v.cols)
    duals = tuple(d for v in verts for d in v.duals)
    return Morphism(cat, len(verts), n, cols, duals)


def hom_count(cat: CategoryId, m: int, n: int) -> int:
    """``|Hom(m, n)|`` from closed formulas (used for caps and cross-checks)."""
    if m > n or m < 0:
        return 0
    if cat.kind == "vic-h" and m == n:
        return group_order(cat, n)
    return group_order(_full(cat), n) // group_order(_full(cat), n - m)


def _full(cat: CategoryId) -> CategoryId:
    return CategoryId("vic", cat.ring) if cat.kind == "vic-h" else cat


def hom_set(cat: CategoryId, m: int, n: int, cap: int = DEFAULT_HOM_CAP) -> List[Morphism]:
    """All morphisms ``m -> n`` in a deterministic order.

    For ``m >= 1`` these are the ordered ``m``-cliques of compatible vertices
    (morphisms ``1 -> n``). In VIC^H the endomorphisms are filtered by
    determinant.
    """
    if m < 0 or m > n:
        return []
    if m == 0:
        return [Morphism(cat, 0, n, (), ())]
    if hom_count(cat, m, n) > cap:
        raise CapExceeded(f"|Hom({m},{n})| = {hom_count(cat, m, n)} exceeds cap {cap}")
    verts = vertex_table(_full(cat) if cat.kind == "vic-h" else cat, n)
    verts = tuple(Morphism(cat, 1, n, v.cols, v.duals) for v in verts)
    adj = adjacency_bitsets(compatibility_matrix(cat, verts))
    rows = ordered_cliques(adj, m)
    out = [_morphism_from_vertices(cat, n, [verts[i] for i in row]) for row in rows.tolist()]
    if cat.kind == "vic-h" and m == n:
        out = [f for f in out if determinant(f) in cat.H]
    return out


# --------------------------------------------------------------------------
# groups


def group_order(cat: CategoryId, n: int) -> int:
    if n == 0:
        return 1
    if cat.kind == "fi":
        return math.factorial(n)
    m = cat.modulus
    total = 1
    for p, e in rg.prime_power_factors(m):
        if cat.kind == "si":
            q = p
            o = q ** (n * n)
            for i in range(1, n + 1):
                o *= q ** (2 * i) - 1
            o *= p ** ((e - 1) * n * (2 * n + 1))
        else:
            o = 1
            for i in range(n):
                o *= p**n - p**i
            o *= p ** ((e - 1) * n * n)
        total *= o
    if cat.kind == "vic-h":
        total = total * len(cat.H) // len(cat.ring.units)
    return total


@dataclass(frozen=True)
class GroupTable:
    """Full element table of ``G_n``."""

    cat: CategoryId
    n: int
    elements: Tuple[Morphism, ...]
    index: Dict[Tuple, int]
    generators: Tuple[Morphism, ...]

    def __len__(self) -> int:
        return len(self.elements)


def group_generators(cat: CategoryId, n: int) -> List[Morphism]:
    """A small generating set of ``G_n``."""
    if n == 0:
        return []
    b, m, N = cat.block, cat.modulus, cat.dim(n)

    def from_cols(cols: Sequence[Sequence[int]]) -> Morphism:
        cols = tuple(tuple(int(x) % m for x in c) for c in cols)
        rows = rg.mat_transpose(cols, N, N)
        inv = rg.mat_inverse(rows, m)
        duals = tuple(tuple(r) for r in inv)
        return Morphism(cat, n, n, cols, duals)

    e = [[int(r == j) for r in range(N)] for j in range(N)]
    gens: List[Morphism] = []
    if cat.kind == "fi":
        if n >= 2:
            swap = [e[1], e[0]] + e[2:]
            cyc = [e[(j + 1) % n] for j in range(n)]
            gens = [from_cols(swap), from_cols(cyc)]
        return gens
    if cat.kind in ("vic", "vic-h"):
        for i in range(N):
            for j in range(N):
                if i != j:
                    cols = [list(c) for c in e]
                    cols[j][i] = 1  # column j gains e_i
                    gens.append(from_cols(cols))
        units = cat.ring.units if cat.kind == "vic" else cat.H
        for u in units:
            if u != 1:
                cols = [list(c) for c in e]
                cols[0][0] = u
                gens.append(from_cols(cols))
        return gens
    # SI: elementary symplectic matrices with r = 1 (rows i, columns j, 0-based)
    def elem(entries: Sequence[Tuple[int, int, int]]) -> Morphism:
        M = [[int(r == c) for c in range(N)] for r in range(N)]
        for r, c, v in entries:
            M[r][c] = (M[r][c] + v) % m
        cols = rg.mat_transpose(M, N, N)
        return from_cols(cols)

    for i in range(n):
        gens.append(elem([(2 * i, 2 * i + 1, 1)]))
        gens.append(elem([(2 * i + 1, 2 * i, 1)]))
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            gens.append(elem([(2 * i, 2 * j, 1), (2 * j + 1, 2 * i + 1, -1)]))
            gens.append(elem([(2 * i, 2 * j + 1, 1), (2 * j, 2 * i + 1, 1)]))
            gens.append(elem([(2 * i + 1, 2 * j, 1), (2 * j + 1, 2 * i, -1)]))
    return gens


def enumerate_group(cat: CategoryId, n: int, cap: int = DEFAULT_GROUP_CAP) -> GroupTable:
    """Enumerate ``G_n`` completely (raises :class:`CapExceeded` when too large)."""
    order = group_order(cat, n)
    if order > cap:
        raise CapExceeded(f"|G_{n}| = {order} is too large; use morphism enumeration instead")
    elements = tuple(hom_set(cat, n, n, cap=cap))
    if len(elements) != order:
        raise AssertionError(f"enumerated {len(elements)} elements, expected {order}")
    index = {g.key(): i for i, g in enumerate(elements)}
    return GroupTable(cat, n, elements, index, tuple(group_generators(cat, n)))


# --------------------------------------------------------------------------
# sections and twists


def _complement_basis(phi: Morphism) -> List[Vector]:
    """A deterministic basis of the complement of ``phi``, ordered as coordinates."""
    cat, n, m = phi.cat, phi.target, phi.source
    N = cat.dim(n)
    if cat.kind == "fi":
        image = set(phi.word)
        return [tuple(int(r == j) for r in range(N)) for j in range(N) if j not in image]
    if cat.kind == "si":
        space = cat.symplectic_space(n)
        full = rg.symplectic_complete(list(phi.pairs), space)
        cols = rg.mat_transpose(full, N, N)
        return list(cols[cat.dim(m):])
    comp = rg.Submodule.span(phi._complement_gens(), cat.modulus, N)
    return list(comp.basis())


@lru_cache(maxsize=200_000)
def section(phi: Morphism) -> Morphism:
    """The deterministic automorphism ``s(phi)`` of the target.

    Its first columns are a basis of the complement, its last columns are
    ``phi``'s columns. In VIC^H the last complement column is scaled by the
    smallest unit that puts the determinant into ``H``.
    """
    cat, n = phi.cat, phi.target
    N = cat.dim(n)
    m = cat.modulus
    comp = _complement_basis(phi)
    cols = comp + list(phi.cols)
    rows = rg.mat_transpose(cols, N, N)
    if cat.kind == "vic-h":
        d = rg.det_mod(rows, m)
        if d not in cat.H:
            if not comp:
                raise ValueError("no H-completion: determinant fixed outside H")
            dinv = pow(d, -1, m)
            u = min((h * dinv) % m for h in cat.H)
            cols[len(comp) - 1] = tuple((u * x) % m for x in cols[len(comp) - 1])
            rows = rg.mat_transpose(cols, N, N)
    inv = rg.mat_inverse(rows, m)
    g = Morphism(cat, n, n, tuple(tuple(c) for c in cols), tuple(tuple(r) for r in inv))
    return g


def restrict_block(t_full: Morphism, k: int) -> Morphism:
    """Extract ``t`` from ``t + id`` (upper-left block of rank ``k``); asserts the shape."""
    cat = t_full.cat
    K, N = cat.dim(k), cat.dim(t_full.target)
    for j in range(N):
        col, dual = t_full.cols[j], t_full.duals[j]
        if j < K:
            if any(col[K:]) or any(dual[K:]):
                raise AssertionError("twist is not block diagonal")
        else:
            e = tuple(int(r == j) for r in range(N))
            if col != e or dual != e:
                raise AssertionError("twist is not the identity on the complement block")
    cols = tuple(c[:K] for c in t_full.cols[:K])
    duals = tuple(d[:K] for d in t_full.duals[:K])
    return Morphism(cat, k, k, cols, duals)


def section_and_twist(phi: Morphism, g: Morphism) -> Tuple[Morphism, Morphism]:
    """Return ``(g phi, t)`` with ``s(g phi) (t + id) = g s(phi)``.

    The twist ``t`` lies in ``G_{n-m}``, acting on the complement block.
    """
    if g.source != phi.target or g.target != phi.target:
        raise ValueError("g must be an automorphism of phi's target")
    new = compose(g, phi)
    t_full = compose(inverse(section(new)), compose(g, section(phi)))
    return new, restrict_block(t_full, phi.target - phi.source)


@lru_cache(maxsize=None)
def face_section(cat: CategoryId, p: int, i: int) -> Morphism:
    """``s(h_i)``, the element of ``G_{p+1}`` representing the face coset."""
    return section(face_morphism(cat, p, i))


def face_and_twist(sigma_: Morphism, i: int) -> Tuple[Morphism, Morphism]:
    """Face ``d_i sigma = sigma o h_i`` and the twist ``t`` in ``G_{k+1}``.

    For ``sigma: p+1 -> n`` and ``k = n-p-1`` this satisfies
    ``s(sigma) (id_k + s(h_i)) = s(d_i sigma) (t + id_p)``, which is how the face
    map ``g (id + h_i) ⊗ phi(a)`` is rewritten in section coordinates.
    """
    cat = sigma_.cat
    p = sigma_.source - 1
    n = sigma_.target
    k = n - p - 1
    face = compose(sigma_, face_morphism(cat, p, i))
    lifted = compose(section(sigma_), monoidal_sum(identity(cat, k), face_section(cat, p, i)))
    t_full = compose(inverse(section(face)), lifted)
    return face, restrict_block(t_full, k + 1)


def orbit_representative(phi: Morphism) -> Tuple[Morphism, Morphism]:
    """Split ``phi = rep o k`` with ``k`` in ``G_m`` (precomposition orbit).

    ``rep`` depends only on the image and complement of ``phi``: its columns
    are a canonical basis of the image (increasing coordinates for FI, the
    canonical module basis for VIC, a canonical symplectic basis for SI) and
    its left inverse is ``k Xi``, which has the same kernel.
    """
    cat, m, n = phi.cat, phi.source, phi.target
    if m == 0:
        return phi, identity(cat, 0)
    N, M = cat.dim(n), cat.dim(m)
    md = cat.modulus
    if cat.kind == "fi":
        basis = tuple(tuple(int(r == w) for r in range(N)) for w in sorted(phi.word))
    else:
        image = rg.Submodule.span(phi.cols, md, N)
        if cat.kind == "si":
            basis = tuple(_canonical_symplectic_basis(cat, n, image))
        else:
            basis = tuple(image.basis())
    kmat = _solve_coords(basis, phi.cols, md, N)
    kcols = tuple(tuple(kmat[r][c] for r in range(M)) for c in range(M))
    if cat.kind == "vic-h":
        # G_m^H-orbits refine GL_m-orbits by the coset of det(k) in R^x / H
        d = rg.det_mod(kmat, md)
        u = min((d * h) % md for h in cat.H)
        uinv = pow(u, -1, md)
        basis = (tuple((u * x) % md for x in basis[0]),) + basis[1:]
        kmat = [[(uinv * x) % md for x in kmat[0]]] + [list(r) for r in kmat[1:]]
        kcols = tuple(tuple(kmat[r][c] for r in range(M)) for c in range(M))
    kinv = rg.mat_inverse(kmat, md)
    k = Morphism(cat, m, m, kcols, tuple(tuple(r) for r in kinv))
    duals = tuple(_pull(phi.duals, row, md, N) for row in kmat)
    rep = Morphism(cat, m, n, basis, duals)
    return rep, k


def _solve_coords(basis: Sequence[Vector], targets: Sequence[Vector], m: int, N: int) -> List[List[int]]:
    """Matrix ``K`` (as rows) with ``sum_r basis[r] K[r][c] = targets[c]``."""
    M = len(basis)
    # basis is a partial basis: complete it and invert to read coordinates
    full = rg.complete_basis(basis, m, N)
    inv = rg.mat_inverse(full, m)
    K = [[0] * len(targets) for _ in range(M)]
    for c, t in enumerate(targets):
        coords = [sum(inv[r][j] * t[j] for j in range(N)) % m for r in range(N)]
        if any(coords[M:]):
            raise AssertionError("target not in the span of the basis")
        for r in range(M):
            K[r][c] = coords[r]
    return K


def _canonical_symplectic_basis(cat: CategoryId, n: int, image: rg.Submodule) -> List[Vector]:
    """Deterministic symplectic basis (``a_1, b_1, ...``) of a symplectic summand."""
    md = cat.modulus
    space = cat.symplectic_space(n)
    gens = list(image.elements())
    gens.sort()
    pairs: List[Tuple[Vector, Vector]] = []
    target_rank = len(image.basis()) // 2
    while len(pairs) < target_rank:
        proj = sorted({space.perp_projection(pairs, v) for v in gens})
        found = None
        for a in proj:
            if not rg.is_unimodular(a, md):
                continue
            for b in proj:
                if space.form(a, b) == 1:
                    found = (a, b)
                    break
            if found:
                break
        if found is None:
            raise AssertionError("no hyperbolic pair found in symplectic summand")
        pairs.append(found)
    return [v for pr in pairs for v in pr]

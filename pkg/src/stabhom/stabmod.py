"""Modules over stability categories.

A module ``A`` assigns to each rank ``n`` a finitely presented abelian group
``A_n`` with an action of ``G_n`` and a transition ``phi_n: A_n -> A_{n+1}``.
Everything is stored on generators: actions and transitions are integer
matrices (``target generators x source generators``) that must preserve the
relation lattices.

The machinery built on top: shift, kernel and cokernel of ``A -> SA``,
polynomial degree over a finite window, induced representations, the central
stability complex, and the coequalizer test for central stability degree.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from . import category as cg
from . import intlin
from . import ring as rg
from .homology import (ChainComplex, HomologyResult, SparseMatrix, compose_is_zero, homology_by_policy,
                       reduce_matrix)

DEFAULT_INDUCED_CAP = 2 * 10**6  # basis size of an induced module / chain group


# --------------------------------------------------------------------------
# presented abelian groups


def _as_matrix(rows: Any, cols: int) -> np.ndarray:
    A = np.asarray(rows, dtype=np.int64)
    return A.reshape(-1, cols) if A.size else np.zeros((0, cols), dtype=np.int64)


@dataclass(frozen=True)
class PresentedAbelianGroup:
    """``Z^g / (row span of relations)``.

    Attributes:
        generators: number of generators ``g``.
        relations: tuple of relation rows, each of length ``g``.
    """

    generators: int
    relations: Tuple[Tuple[int, ...], ...] = ()

    @classmethod
    def free(cls, g: int) -> "PresentedAbelianGroup":
        return cls(g, ())

    @classmethod
    def elementary(cls, g: int, p: int) -> "PresentedAbelianGroup":
        return cls(g, tuple(tuple(p * int(i == j) for j in range(g)) for i in range(g)))

    @classmethod
    def from_matrix(cls, g: int, R: Any) -> "PresentedAbelianGroup":
        R = _as_matrix(R, g)
        rows = tuple(tuple(int(x) for x in r) for r in R.tolist() if any(r))
        return cls(g, rows)

    def relation_matrix(self) -> np.ndarray:
        return _as_matrix(self.relations, self.generators)

    @lru_cache(maxsize=None)
    def invariants(self) -> Tuple[int, Tuple[int, ...]]:
        """``(free rank, torsion coefficients > 1)`` from the Smith form."""
        divs = intlin.elementary_divisors(self.relations, len(self.relations), self.generators)
        return self.generators - len(divs), tuple(d for d in divs if d != 1)

    @property
    def free_rank(self) -> int:
        return self.invariants()[0]

    @property
    def torsion(self) -> Tuple[int, ...]:
        return self.invariants()[1]

    def is_zero(self) -> bool:
        return self.invariants() == (0, ())

    def is_free(self) -> bool:
        return not self.torsion

    def isomorphic(self, other: "PresentedAbelianGroup") -> bool:
        return self.invariants() == other.invariants()

    def elementary_prime(self) -> Optional[int]:
        """``p`` when every relation row is ``p`` times a distinct unit vector covering all generators."""
        if not self.generators or len(self.relations) != self.generators:
            return None
        primes = set()
        seen = set()
        for row in self.relations:
            nz = [(j, x) for j, x in enumerate(row) if x]
            if len(nz) != 1:
                return None
            j, x = nz[0]
            seen.add(j)
            primes.add(abs(x))
        if len(primes) != 1 or len(seen) != self.generators:
            return None
        p = primes.pop()
        return p if rg._is_prime(p) else None

    @lru_cache(maxsize=None)
    def _hnf(self) -> Tuple[Tuple[int, ...], ...]:
        return tuple(tuple(r) for r in intlin.hermite_rows(self.relations, self.generators))

    def contains_relations(self, D: np.ndarray) -> bool:
        """Does every column of ``D`` lie in the relation lattice?"""
        D = np.asarray(D, dtype=np.int64)
        if not D.any():
            return True
        if not self.relations:
            return False
        p = self.elementary_prime()
        if p is not None:
            return not np.any(D % p)
        H = self._hnf()
        pivots = [next(j for j, x in enumerate(r) if x) for r in H]
        for col in D.T.tolist():
            if not any(col):
                continue
            v = list(col)
            for r, c in zip(H, pivots):
                if v[c]:
                    if v[c] % r[c]:
                        return False
                    q = v[c] // r[c]
                    v = [a - q * b for a, b in zip(v, r)]
            if any(v):
                return False
        return True

    def to_json(self) -> Dict[str, Any]:
        return {"generators": self.generators, "relations": [list(r) for r in self.relations]}

    def describe(self) -> str:
        f, t = self.invariants()
        parts = [f"Z^{f}"] if f else []
        for d in sorted(set(t)):
            c = t.count(d)
            parts.append(f"(Z/{d})^{c}" if c > 1 else f"Z/{d}")
        return " + ".join(parts) if parts else "0"


@dataclass(frozen=True)
class Simplification:
    """Isomorphism of a presentation with a diagonal one.

    ``proj`` (new x old) maps old generator coordinates to new ones and
    ``lift`` (old x new) sends new generators to representatives.
    """

    group: PresentedAbelianGroup
    proj: np.ndarray
    lift: np.ndarray


def simplify(G: PresentedAbelianGroup) -> Simplification:
    """Eliminate generators along unit pivots, then diagonalize the rest by SNF.

    The result presents ``Z^f + Z/d_1 + ...`` with relations ``d_i e_i``
    (``d_i > 1``) on the torsion generators and none on the free ones.
    """
    g = G.generators
    R = G.relation_matrix().copy()
    P = np.eye(g, dtype=np.int64)
    alive = list(range(g))
    while R.shape[0]:
        unit = np.abs(R) == 1
        cand = np.nonzero(unit.any(axis=1))[0]
        if not len(cand):
            break
        weights = (R[cand] != 0).sum(axis=1)
        i = int(cand[np.argmin(weights)])
        j = int(np.nonzero(unit[i])[0][0])
        u = int(R[i, j])
        r = R[i].copy()
        # coordinates transform as x -> x - x_j * u * r, killing coordinate j
        col = R[:, j].copy()
        nz = np.nonzero(col)[0]
        R[nz] -= np.outer(col[nz] * u, r)
        pj = P[j].copy()
        nzp = np.nonzero(pj)[0]
        P[:, nzp] -= np.outer(u * r, pj[nzp])
        if np.abs(R).max(initial=0) > 2**40 or np.abs(P).max(initial=0) > 2**40:
            raise OverflowError("coefficient growth during simplification")
        R = np.delete(np.delete(R, i, axis=0), j, axis=1)
        P = np.delete(P, j, axis=0)
        del alive[j]
        R = R[np.any(R != 0, axis=1)]
    g1 = len(alive)
    lift1 = np.zeros((g, g1), dtype=np.int64)
    lift1[alive, np.arange(g1)] = 1
    if not R.shape[0]:
        return Simplification(PresentedAbelianGroup.free(g1), P, lift1)
    divs, _, V = intlin.smith_form(R.tolist(), R.shape[0], g1, transforms=True)
    assert V is not None
    Vinv = intlin.unimodular_inverse(V)
    proj2 = np.array(V, dtype=object).T
    lift2 = np.array(Vinv, dtype=object).T
    keep = [i for i in range(g1) if i >= len(divs) or divs[i] > 1]
    tors = [divs[i] for i in keep if i < len(divs)]
    proj = (proj2[keep] @ P.astype(object))
    for row, d in enumerate(tors):
        proj[row] %= d
    lift = lift1.astype(object) @ lift2[:, keep]
    k = len(keep)
    rels = tuple(tuple(d * int(c == r) for c in range(k)) for r, d in enumerate(tors))
    return Simplification(PresentedAbelianGroup(k, rels), _to_int64(proj), _to_int64(lift))


def _to_int64(M: np.ndarray) -> np.ndarray:
    if M.size and np.abs(M).max() > 2**62:
        raise OverflowError("matrix entries exceed int64")
    return np.asarray(M.astype(np.int64) if M.dtype == object else M, dtype=np.int64)


# --------------------------------------------------------------------------
# morphism helpers


@lru_cache(maxsize=100_000)
def automorphism_extension(f: cg.Morphism) -> cg.Morphism:
    """An automorphism ``h`` of the target with ``h o iota = f``.

    ``iota`` is the standard inclusion onto the first coordinates. The
    complement columns come from the deterministic complement basis; in VIC^H
    the last one is rescaled so the determinant lies in ``H``.
    """
    cat, m, n = f.cat, f.source, f.target
    if m == n:
        return f
    N, md = cat.dim(n), cat.modulus
    comp = cg._complement_basis(f)
    cols = list(f.cols) + [tuple(c) for c in comp]
    rows = rg.mat_transpose(cols, N, N)
    if cat.kind == "vic-h":
        d = rg.det_mod(rows, md)
        if d not in cat.H:
            u = min((h * pow(d, -1, md)) % md for h in cat.H)
            cols[-1] = tuple((u * x) % md for x in cols[-1])
            rows = rg.mat_transpose(cols, N, N)
    inv = rg.mat_inverse(rows, md)
    return cg.Morphism(cat, n, n, tuple(tuple(c) for c in cols), tuple(tuple(r) for r in inv))


def standard_inclusion(cat: cg.CategoryId, m: int, n: int) -> cg.Morphism:
    f = cg.identity(cat, m)
    for k in range(m, n):
        f = cg.compose(cg.canonical_inclusion(cat, k), f)
    return f


def shift_inclusion(cat: cg.CategoryId, n: int) -> cg.Morphism:
    """``iota + id: n -> 1 + n``, whose complement is the first summand."""
    return cg.compose(cg.cyclic_shift(cat, n + 1), cg.canonical_inclusion(cat, n))


def imatmul(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Exact integer product, through float64 BLAS when no sum can exceed 2^52."""
    if not A.size or not B.size:
        return np.zeros((A.shape[0], B.shape[1]), dtype=np.int64)
    bound = float(np.abs(A).max()) * float(np.abs(B).max()) * A.shape[1]
    if bound < 2.0**52:
        return np.rint(A.astype(np.float64) @ B.astype(np.float64)).astype(np.int64)
    return A @ B


def _perm_matrix(targets: Sequence[int], size: int) -> np.ndarray:
    M = np.zeros((size, len(targets)), dtype=np.int64)
    if len(targets):
        M[np.asarray(targets, dtype=np.int64), np.arange(len(targets))] = 1
    return M


# --------------------------------------------------------------------------
# modules


class StabilityModule:
    """Base class: subclasses implement ``_group``, ``_act`` and ``_transition``.

    Args:
        cat: the stability category.
        max_rank: largest rank at which the module is defined.
        name: label used in reports.
    """

    trivial_action = False

    def __init__(self, cat: cg.CategoryId, max_rank: int, name: str = "") -> None:
        if max_rank < 0:
            raise ValueError("max_rank must be nonnegative")
        self.cat = cat
        self.max_rank = max_rank
        self.name = name or type(self).__name__
        self._groups: Dict[int, PresentedAbelianGroup] = {}
        self._acts: Dict[Tuple[int, Tuple], np.ndarray] = {}
        self._trans: Dict[int, np.ndarray] = {}

    # interface ------------------------------------------------------------
    def _group(self, n: int) -> PresentedAbelianGroup:
        raise NotImplementedError

    def _act(self, n: int, g: cg.Morphism) -> np.ndarray:
        raise NotImplementedError

    def _transition(self, n: int) -> np.ndarray:
        raise NotImplementedError

    # cached accessors -----------------------------------------------------
    def _check(self, n: int) -> None:
        if not 0 <= n <= self.max_rank:
            raise ValueError(f"{self.name}: rank {n} outside 0..{self.max_rank}")

    def group(self, n: int) -> PresentedAbelianGroup:
        self._check(n)
        if n not in self._groups:
            self._groups[n] = self._group(n)
        return self._groups[n]

    def rank(self, n: int) -> int:
        """Number of generators at rank ``n``."""
        return self.group(n).generators

    def act(self, n: int, g: cg.Morphism) -> np.ndarray:
        self._check(n)
        if g.source != n or g.target != n:
            raise ValueError("action needs an automorphism of rank n")
        key = (n, g.key())
        M = self._acts.get(key)
        if M is None:
            M = self._act(n, g)
            self._acts[key] = M
        return M

    def transition(self, n: int) -> np.ndarray:
        self._check(n + 1)
        if n not in self._trans:
            self._trans[n] = self._transition(n)
        return self._trans[n]

    def transition_chain(self, m: int, n: int) -> np.ndarray:
        """``phi_{n-1} ... phi_m``."""
        M = np.eye(self.rank(m), dtype=np.int64)
        for k in range(m, n):
            M = imatmul(self.transition(k), M)
        return M

    def morphism_map(self, f: cg.Morphism) -> np.ndarray:
        """``A(f): A_m -> A_n`` for a morphism ``f: m -> n``."""
        h = automorphism_extension(f)
        return imatmul(self.act(f.target, h), self.transition_chain(f.source, f.target))

    def natural_map(self, n: int) -> np.ndarray:
        """``A_n -> (SA)_n = A_{n+1}`` induced by ``iota + id``."""
        return self.morphism_map(shift_inclusion(self.cat, n))

    def is_zero_at(self, n: int) -> bool:
        return self.group(n).is_zero()

    # serialization --------------------------------------------------------
    def to_json(self) -> Dict[str, Any]:
        levels = []
        for n in range(self.max_rank + 1):
            level: Dict[str, Any] = self.group(n).to_json()
            level["actions"] = [self.act(n, g).tolist() for g in cg.group_generators(self.cat, n)]
            level["phi"] = self.transition(n).tolist() if n < self.max_rank else None
            levels.append(level)
        return {"category": self.cat.spec, "max_rank": self.max_rank, "name": self.name, "levels": levels}

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.name!r}, {self.cat.spec}, max_rank={self.max_rank})"


# --- permutation and free modules ------------------------------------------


class PermutationModule(StabilityModule):
    """``M(m)``: the free abelian group on ``Hom(m, n)`` with postcomposition."""

    def __init__(self, cat: cg.CategoryId, m: int, max_rank: int, name: str = "",
                 cap: int = cg.DEFAULT_HOM_CAP) -> None:
        super().__init__(cat, max_rank, name or f"M({m})")
        self.m = m
        self.cap = cap
        self.trivial_action = m == 0
        self._bases: Dict[int, Tuple[List[cg.Morphism], Dict[Tuple, int]]] = {}

    def basis(self, n: int) -> List[cg.Morphism]:
        return self._basis(n)[0]

    def _basis(self, n: int) -> Tuple[List[cg.Morphism], Dict[Tuple, int]]:
        if n not in self._bases:
            homs = cg.hom_set(self.cat, self.m, n, cap=self.cap)
            self._bases[n] = (homs, {f.key(): i for i, f in enumerate(homs)})
        return self._bases[n]

    def _group(self, n: int) -> PresentedAbelianGroup:
        return PresentedAbelianGroup.free(len(self._basis(n)[0]))

    def _act(self, n: int, g: cg.Morphism) -> np.ndarray:
        homs, index = self._basis(n)
        return _perm_matrix([index[cg.compose(g, f).key()] for f in homs], len(homs))

    def _transition(self, n: int) -> np.ndarray:
        homs, _ = self._basis(n)
        homs1, index1 = self._basis(n + 1)
        inc = cg.canonical_inclusion(self.cat, n)
        return _perm_matrix([index1[cg.compose(inc, f).key()] for f in homs], len(homs1))


@dataclass
class GroupoidModule:
    """A ``Z[G_m]``-module ``W`` concentrated in rank ``m``.

    Attributes:
        cat: the category.
        m: the rank carrying ``W``.
        group: the underlying presented abelian group.
        action: ``k -> matrix`` for ``k`` in ``G_m``.
    """

    cat: cg.CategoryId
    m: int
    group: PresentedAbelianGroup
    action: Callable[[cg.Morphism], np.ndarray]
    name: str = "W"

    @classmethod
    def trivial(cls, cat: cg.CategoryId, m: int) -> "GroupoidModule":
        one = np.eye(1, dtype=np.int64)
        return cls(cat, m, PresentedAbelianGroup.free(1), lambda k: one, f"Z_triv[{m}]")

    @classmethod
    def regular(cls, cat: cg.CategoryId, m: int) -> "GroupoidModule":
        """``Z[G_m]`` with left multiplication."""
        table = cg.enumerate_group(cat, m)
        size = len(table)

        def act(k: cg.Morphism) -> np.ndarray:
            return _perm_matrix([table.index[cg.compose(k, h).key()] for h in table.elements], size)

        return cls(cat, m, PresentedAbelianGroup.free(size), lru_cache(maxsize=None)(act), f"Z[G_{m}]")


class FreeModule(StabilityModule):
    """``M(W)_n = Z[Hom(m, n)] (x)_{G_m} W``.

    The basis is (precomposition-orbit representative, generator of ``W``); a
    morphism ``phi = rep o k`` acts on ``rep (x) w`` through ``k``.
    """

    def __init__(self, W: GroupoidModule, max_rank: int, name: str = "",
                 cap: int = cg.DEFAULT_HOM_CAP) -> None:
        super().__init__(W.cat, max_rank, name or f"M({W.name})")
        self.W = W
        self.cap = cap
        self._reps: Dict[int, Tuple[List[cg.Morphism], Dict[Tuple, int]]] = {}

    def representatives(self, n: int) -> List[cg.Morphism]:
        return self._orbit_reps(n)[0]

    def _orbit_reps(self, n: int) -> Tuple[List[cg.Morphism], Dict[Tuple, int]]:
        if n not in self._reps:
            seen: Dict[Tuple, cg.Morphism] = {}
            for f in cg.hom_set(self.cat, self.W.m, n, cap=self.cap):
                rep, _ = cg.orbit_representative(f)
                seen.setdefault(rep.key(), rep)
            reps = [seen[k] for k in sorted(seen)]
            self._reps[n] = (reps, {r.key(): i for i, r in enumerate(reps)})
        return self._reps[n]

    def _group(self, n: int) -> PresentedAbelianGroup:
        reps, _ = self._orbit_reps(n)
        R = self.W.group.relation_matrix()
        g = len(reps) * self.W.group.generators
        if not len(R) or not reps:
            return PresentedAbelianGroup.free(g)
        return PresentedAbelianGroup.from_matrix(g, np.kron(np.eye(len(reps), dtype=np.int64), R))

    def _blocks(self, src: List[cg.Morphism], post: cg.Morphism, n_out: int) -> np.ndarray:
        reps_out, index = self._orbit_reps(n_out)
        w = self.W.group.generators
        M = np.zeros((len(reps_out) * w, len(src) * w), dtype=np.int64)
        for j, psi in enumerate(src):
            rep, k = cg.orbit_representative(cg.compose(post, psi))
            i = index[rep.key()]
            M[i * w:(i + 1) * w, j * w:(j + 1) * w] = self.W.action(k)
        return M

    def _act(self, n: int, g: cg.Morphism) -> np.ndarray:
        return self._blocks(self._orbit_reps(n)[0], g, n)

    def _transition(self, n: int) -> np.ndarray:
        return self._blocks(self._orbit_reps(n)[0], cg.canonical_inclusion(self.cat, n), n + 1)


# --- pointwise constructions -----------------------------------------------


def _same_frame(mods: Sequence[StabilityModule]) -> Tuple[cg.CategoryId, int]:
    if not mods:
        raise ValueError("need at least one module")
    cat = mods[0].cat
    if any(A.cat != cat for A in mods):
        raise ValueError("modules live over different categories")
    ranks = {A.max_rank for A in mods}
    if len(ranks) != 1:
        raise ValueError(f"rank mismatch: {sorted(ranks)}")
    return cat, ranks.pop()


def _block_diag(blocks: Sequence[np.ndarray]) -> np.ndarray:
    rows = sum(b.shape[0] for b in blocks)
    cols = sum(b.shape[1] for b in blocks)
    M = np.zeros((rows, cols), dtype=np.int64)
    r = c = 0
    for b in blocks:
        M[r:r + b.shape[0], c:c + b.shape[1]] = b
        r += b.shape[0]
        c += b.shape[1]
    return M


class DirectSum(StabilityModule):
    def __init__(self, summands: Sequence[StabilityModule], name: str = "") -> None:
        cat, N = _same_frame(summands)
        super().__init__(cat, N, name or " + ".join(A.name for A in summands))
        self.summands = list(summands)
        self.trivial_action = all(A.trivial_action for A in summands)

    def _group(self, n: int) -> PresentedAbelianGroup:
        gens = [A.group(n) for A in self.summands]
        R = _block_diag([G.relation_matrix() for G in gens])
        return PresentedAbelianGroup.from_matrix(sum(G.generators for G in gens), R)

    def _act(self, n: int, g: cg.Morphism) -> np.ndarray:
        return _block_diag([A.act(n, g) for A in self.summands])

    def _transition(self, n: int) -> np.ndarray:
        return _block_diag([A.transition(n) for A in self.summands])


class TensorProduct(StabilityModule):
    """Levelwise ``A (x) B`` with the diagonal action; basis ``(a, b)`` row-major."""

    def __init__(self, A: StabilityModule, B: StabilityModule, name: str = "") -> None:
        cat, N = _same_frame([A, B])
        super().__init__(cat, N, name or f"({A.name}) (x) ({B.name})")
        self.A, self.B = A, B
        self.trivial_action = A.trivial_action and B.trivial_action

    def _group(self, n: int) -> PresentedAbelianGroup:
        GA, GB = self.A.group(n), self.B.group(n)
        ga, gb = GA.generators, GB.generators
        RA, RB = GA.relation_matrix(), GB.relation_matrix()
        rows = [np.kron(RA, np.eye(gb, dtype=np.int64)), np.kron(np.eye(ga, dtype=np.int64), RB)]
        return PresentedAbelianGroup.from_matrix(ga * gb, np.vstack(rows) if ga * gb else np.zeros((0, 0)))

    def _act(self, n: int, g: cg.Morphism) -> np.ndarray:
        return np.kron(self.A.act(n, g), self.B.act(n, g))

    def _transition(self, n: int) -> np.ndarray:
        return np.kron(self.A.transition(n), self.B.transition(n))


def _require_free(A: StabilityModule, n: int, what: str) -> int:
    G = A.group(n)
    if G.relations:
        raise ValueError(f"{what} needs relation-free levels; {A.name} has relations at rank {n}")
    return G.generators


def _minors(M: np.ndarray, k: int, subsets_out: np.ndarray, subsets_in: np.ndarray) -> np.ndarray:
    """Matrix of ``k x k`` minors ``det M[I, J]`` (rows ``I`` in ``subsets_out``)."""
    if k == 0:
        return np.ones((1, 1), dtype=np.int64)
    if not len(subsets_out) or not len(subsets_in):
        return np.zeros((len(subsets_out), len(subsets_in)), dtype=np.int64)
    sub = M[subsets_out[:, None, :, None], subsets_in[None, :, None, :]]
    if k == 1:
        return sub[:, :, 0, 0]
    if k == 2:
        return sub[..., 0, 0] * sub[..., 1, 1] - sub[..., 0, 1] * sub[..., 1, 0]
    if k == 3:
        a = sub
        return (a[..., 0, 0] * (a[..., 1, 1] * a[..., 2, 2] - a[..., 1, 2] * a[..., 2, 1])
                - a[..., 0, 1] * (a[..., 1, 0] * a[..., 2, 2] - a[..., 1, 2] * a[..., 2, 0])
                + a[..., 0, 2] * (a[..., 1, 0] * a[..., 2, 1] - a[..., 1, 1] * a[..., 2, 0]))
    out = np.zeros(sub.shape[:2], dtype=np.int64)
    for i in range(sub.shape[0]):
        for j in range(sub.shape[1]):
            out[i, j] = intlin.determinant(sub[i, j].tolist())
    return out


class ExteriorPower(StabilityModule):
    """``Lambda^k A`` for relation-free ``A``; basis: increasing ``k``-subsets."""

    def __init__(self, A: StabilityModule, k: int, name: str = "") -> None:
        super().__init__(A.cat, A.max_rank, name or f"Lambda^{k}({A.name})")
        self.A, self.k = A, k

    def _subsets(self, n: int) -> np.ndarray:
        g = _require_free(self.A, n, "an exterior power")
        return np.array(list(itertools.combinations(range(g), self.k)), dtype=np.int64).reshape(-1, self.k)

    def _group(self, n: int) -> PresentedAbelianGroup:
        return PresentedAbelianGroup.free(len(self._subsets(n)))

    def _act(self, n: int, g: cg.Morphism) -> np.ndarray:
        S = self._subsets(n)
        return _minors(self.A.act(n, g), self.k, S, S)

    def _transition(self, n: int) -> np.ndarray:
        return _minors(self.A.transition(n), self.k, self._subsets(n + 1), self._subsets(n))


class SymmetricPower(StabilityModule):
    """``Sym^k A`` for ``k <= 2`` and relation-free ``A``; basis: monomials ``i <= j``."""

    def __init__(self, A: StabilityModule, k: int, name: str = "") -> None:
        if k not in (0, 1, 2):
            raise ValueError("only Sym^0, Sym^1 and Sym^2 are implemented")
        super().__init__(A.cat, A.max_rank, name or f"Sym^{k}({A.name})")
        self.A, self.k = A, k
        self.trivial_action = k == 0

    def monomials(self, n: int) -> List[Tuple[int, ...]]:
        g = _require_free(self.A, n, "a symmetric power")
        return list(itertools.combinations_with_replacement(range(g), self.k))

    def _group(self, n: int) -> PresentedAbelianGroup:
        return PresentedAbelianGroup.free(len(self.monomials(n)))

    def _induced(self, M: np.ndarray, src: List[Tuple[int, ...]], dst: List[Tuple[int, ...]]) -> np.ndarray:
        if self.k == 0:
            return np.ones((1, 1), dtype=np.int64)
        if self.k == 1:
            return M.copy()
        a, b = (np.array([m[t] for m in dst], dtype=np.int64) for t in (0, 1))
        i, j = (np.array([m[t] for m in src], dtype=np.int64) for t in (0, 1))
        # e_i e_j -> (M e_i)(M e_j); coefficient of e_a e_b
        out = M[a][:, i] * M[b][:, j] + M[b][:, i] * M[a][:, j]
        diag = a == b
        out[diag] = M[a[diag]][:, i] * M[a[diag]][:, j]
        return out

    def _act(self, n: int, g: cg.Morphism) -> np.ndarray:
        mons = self.monomials(n)
        return self._induced(self.A.act(n, g), mons, mons)

    def _transition(self, n: int) -> np.ndarray:
        return self._induced(self.A.transition(n), self.monomials(n), self.monomials(n + 1))


class QuotientModule(StabilityModule):
    """``A`` modulo extra relations ``extra(n)`` (rows on ``A_n``'s generators).

    The extra relations must span a submodule; :func:`verify_module` checks that
    the action and transitions preserve them.
    """

    def __init__(self, A: StabilityModule, extra: Callable[[int], np.ndarray], name: str = "") -> None:
        super().__init__(A.cat, A.max_rank, name or f"{A.name}/~")
        self.A = A
        self.extra = extra
        self.trivial_action = A.trivial_action

    def _group(self, n: int) -> PresentedAbelianGroup:
        G = self.A.group(n)
        R = np.vstack([G.relation_matrix(), _as_matrix(self.extra(n), G.generators)])
        return PresentedAbelianGroup.from_matrix(G.generators, R)

    def _act(self, n: int, g: cg.Morphism) -> np.ndarray:
        return self.A.act(n, g)

    def _transition(self, n: int) -> np.ndarray:
        return self.A.transition(n)


def scalar_reduction(A: StabilityModule, p: int, name: str = "") -> QuotientModule:
    """``A (x) Z/p``."""
    return QuotientModule(A, lambda n: p * np.eye(A.rank(n), dtype=np.int64), name or f"{A.name} (x) Z/{p}")


class SimplifiedModule(StabilityModule):
    """``A`` transported to the diagonal presentation of every level."""

    def __init__(self, A: StabilityModule, name: str = "") -> None:
        super().__init__(A.cat, A.max_rank, name or A.name)
        self.A = A
        self.trivial_action = A.trivial_action
        self._simp: Dict[int, Simplification] = {}

    def simplification(self, n: int) -> Simplification:
        if n not in self._simp:
            self._simp[n] = simplify(self.A.group(n))
        return self._simp[n]

    def _group(self, n: int) -> PresentedAbelianGroup:
        return self.simplification(n).group

    def _reduce(self, n: int, M: np.ndarray) -> np.ndarray:
        G = self.simplification(n).group
        for r, row in enumerate(G.relations):
            M[r] %= row[r]
        return M

    def _act(self, n: int, g: cg.Morphism) -> np.ndarray:
        S = self.simplification(n)
        return self._reduce(n, imatmul(S.proj, imatmul(self.A.act(n, g), S.lift)))

    def _transition(self, n: int) -> np.ndarray:
        S0, S1 = self.simplification(n), self.simplification(n + 1)
        return self._reduce(n + 1, imatmul(S1.proj, imatmul(self.A.transition(n), S0.lift)))


def simplified(A: StabilityModule) -> StabilityModule:
    return A if isinstance(A, SimplifiedModule) else SimplifiedModule(A)


# --- shift, kernel, cokernel -----------------------------------------------


class ShiftModule(StabilityModule):
    """``(SA)_n = A_{n+1}`` with ``G_n`` acting through ``1 + g``."""

    def __init__(self, A: StabilityModule, name: str = "") -> None:
        if A.max_rank == 0:
            raise ValueError("cannot shift a module defined only at rank 0")
        super().__init__(A.cat, A.max_rank - 1, name or f"S({A.name})")
        self.A = A
        self.trivial_action = A.trivial_action

    def _group(self, n: int) -> PresentedAbelianGroup:
        return self.A.group(n + 1)

    def _act(self, n: int, g: cg.Morphism) -> np.ndarray:
        return self.A.act(n + 1, cg.monoidal_sum(cg.identity(self.cat, 1), g))

    def _transition(self, n: int) -> np.ndarray:
        return self.A.transition(n + 1)


class CokernelModule(StabilityModule):
    """``coker(A -> SA)``, presented as ``A_{n+1}`` modulo the image of ``A_n``."""

    def __init__(self, A: StabilityModule, name: str = "") -> None:
        if A.max_rank == 0:
            raise ValueError("cokernel needs max_rank >= 1")
        super().__init__(A.cat, A.max_rank - 1, name or f"coker({A.name})")
        self.A = A
        self.S = ShiftModule(A)

    def _group(self, n: int) -> PresentedAbelianGroup:
        G = self.S.group(n)
        R = np.vstack([G.relation_matrix(), self.A.natural_map(n).T])
        return PresentedAbelianGroup.from_matrix(G.generators, R)

    def _act(self, n: int, g: cg.Morphism) -> np.ndarray:
        return self.S.act(n, g)

    def _transition(self, n: int) -> np.ndarray:
        return self.S.transition(n)


def _preimage_lattice(f: np.ndarray, target: PresentedAbelianGroup) -> List[List[int]]:
    """Basis of ``{x : f x in relations(target)}``."""
    gs = f.shape[1]
    T = target.relation_matrix()
    M = np.hstack([f, -T.T]) if T.shape[0] else f
    K = intlin.kernel_basis(M.tolist(), M.shape[0], M.shape[1])
    return intlin.hermite_rows([v[:gs] for v in K], gs)


class KernelModule(StabilityModule):
    """``ker(A -> SA)``; generators are a basis of the preimage lattice."""

    def __init__(self, A: StabilityModule, name: str = "") -> None:
        if A.max_rank == 0:
            raise ValueError("kernel needs max_rank >= 1")
        super().__init__(A.cat, A.max_rank - 1, name or f"ker({A.name})")
        self.A = A
        self._lat: Dict[int, np.ndarray] = {}

    def lattice(self, n: int) -> np.ndarray:
        if n not in self._lat:
            L = _preimage_lattice(self.A.natural_map(n), self.A.group(n + 1))
            self._lat[n] = _as_matrix(L, self.A.rank(n))
        return self._lat[n]

    def _coords(self, n: int, V: np.ndarray) -> np.ndarray:
        """Coordinates of the columns of ``V`` in the (echelon) lattice basis."""
        L = self.lattice(n)
        pivots = [int(np.nonzero(r)[0][0]) for r in L]
        out = np.zeros((len(L), V.shape[1]), dtype=np.int64)
        for c in range(V.shape[1]):
            v = V[:, c].copy()
            for i, (r, p) in enumerate(zip(L, pivots)):
                if v[p]:
                    if v[p] % r[p]:
                        raise AssertionError("vector outside the kernel lattice")
                    q = v[p] // r[p]
                    out[i, c] = q
                    v = v - q * r
            if v.any():
                raise AssertionError("vector outside the kernel lattice")
        return out

    def _group(self, n: int) -> PresentedAbelianGroup:
        L = self.lattice(n)
        R = self.A.group(n).relation_matrix()
        return PresentedAbelianGroup.from_matrix(len(L), self._coords(n, R.T).T if len(R) else np.zeros((0, len(L))))

    def _act(self, n: int, g: cg.Morphism) -> np.ndarray:
        return self._coords(n, self.A.act(n, g) @ self.lattice(n).T)

    def _transition(self, n: int) -> np.ndarray:
        return self._coords(n + 1, self.A.transition(n) @ self.lattice(n).T)


def shift(A: StabilityModule) -> ShiftModule:
    return ShiftModule(A)


def kernel_coker(A: StabilityModule) -> Tuple[KernelModule, SimplifiedModule]:
    """``(ker(A -> SA), coker(A -> SA))``; the cokernel is simplified levelwise."""
    return KernelModule(A), SimplifiedModule(CokernelModule(A))


def kernel_is_zero(A: StabilityModule, n: int) -> bool:
    """Is ``A_n -> A_{n+1}`` (the natural map to the shift) injective?"""
    src, dst = A.group(n), A.group(n + 1)
    if src.is_zero():
        return True
    f = A.natural_map(n)
    if not src.relations and not dst.relations:
        r, c = np.nonzero(f)
        return reduce_matrix(SparseMatrix.from_coo(f.shape, r, c, f[r, c])).rank == f.shape[1]
    p, q = src.elementary_prime(), dst.elementary_prime()
    if p is not None and p == q:
        r, c = np.nonzero(f)
        return reduce_matrix(SparseMatrix.from_coo(f.shape, r, c, f[r, c]), p).rank == f.shape[1]
    L = _preimage_lattice(f, dst)
    return src.contains_relations(_as_matrix(L, src.generators).T)


# --------------------------------------------------------------------------
# invariant checks


@dataclass
class ModuleCheck:
    """Outcome of :func:`verify_module` at one rank."""

    n: int
    relations_preserved: bool
    homomorphism: bool
    equivariant: Optional[bool]
    sigma_fixed: Optional[bool]

    @property
    def ok(self) -> bool:
        return all(v is not False for v in (self.relations_preserved, self.homomorphism,
                                            self.equivariant, self.sigma_fixed))


def _congruent(M1: np.ndarray, M2: np.ndarray, target: PresentedAbelianGroup) -> bool:
    return target.contains_relations(M1 - M2)


def _maps_relations(M: np.ndarray, src: PresentedAbelianGroup, dst: PresentedAbelianGroup) -> bool:
    R = src.relation_matrix()
    return dst.contains_relations(M @ R.T) if len(R) else True


def verify_module(A: StabilityModule, n: int) -> ModuleCheck:
    """Check the module axioms at rank ``n`` on group generators.

    Relations are preserved by actions and transitions, generator actions
    compose correctly, ``phi_n`` is equivariant for ``g -> g + 1``, and
    ``sigma_{n+2}`` fixes ``phi_{n+1} phi_n``.
    """
    cat = A.cat
    G = A.group(n)
    gens = cg.group_generators(cat, n)
    preserved = all(_maps_relations(A.act(n, g), G, G) for g in gens)
    hom = True
    for g, h in itertools.product(gens[:4], repeat=2):
        hom &= _congruent(A.act(n, cg.compose(g, h)), A.act(n, g) @ A.act(n, h), G)
    equiv = sigma_ok = None
    if n + 1 <= A.max_rank:
        G1 = A.group(n + 1)
        phi = A.transition(n)
        preserved &= _maps_relations(phi, G, G1)
        one = cg.identity(cat, 1)
        equiv = all(_congruent(phi @ A.act(n, g), A.act(n + 1, cg.monoidal_sum(g, one)) @ phi, G1)
                    for g in gens)
    if n + 2 <= A.max_rank:
        G2 = A.group(n + 2)
        chain = A.transition(n + 1) @ A.transition(n)
        sigma_ok = _congruent(A.act(n + 2, cg.sigma(cat, n + 2)) @ chain, chain, G2)
    return ModuleCheck(n, preserved, hom, equiv, sigma_ok)


# --------------------------------------------------------------------------
# polynomial degree


NEG_INF = "-inf"


@dataclass
class PolynomialDegreeReport:
    """Verdict of :func:`polynomial_degree`.

    Attributes:
        degree: ``"-inf"``, an integer bound ``r``, or ``None`` when no bound
            was established (see ``reason``).
        floor: the rank floor ``d``; statements concern ranks ``> d``.
        window: ``(lo, hi)``, the ranks on which every condition was checked.
        steps: per recursion depth, the ranks where the kernel was nonzero and
            whether the next cokernel vanished.
    """

    module: str
    degree: Any
    floor: int
    window: Optional[Tuple[int, int]]
    steps: List[Dict[str, Any]] = field(default_factory=list)
    reason: str = ""

    def bound_at_most(self, r: int) -> bool:
        if self.degree == NEG_INF:
            return True
        return isinstance(self.degree, int) and self.degree <= r

    def to_json(self) -> Dict[str, Any]:
        return {"module": self.module, "degree": self.degree, "floor": self.floor,
                "window": list(self.window) if self.window else None, "steps": self.steps,
                "reason": self.reason}


def polynomial_degree(A: StabilityModule, d: int = -1, max_degree: int = 6) -> PolynomialDegreeReport:
    """Smallest ``r`` with polynomial degree ``<= r`` in ranks ``> d`` on the window.

    Degree ``-inf`` means ``A_n = 0`` for ``d < n <= N``. Degree ``<= r`` means
    ``ker(A -> SA)_n = 0`` for ``d < n`` and the cokernel has degree ``<= r - 1``.
    Each cokernel loses one rank, so the depth-``j`` module is checked on
    ``d < n <= N - j`` and kernels on ``d < n <= N - j - 1``.
    """
    N = A.max_rank
    lo = d + 1
    cur: StabilityModule = simplified(A)
    if all(cur.is_zero_at(n) for n in range(max(lo, 0), N + 1)):
        return PolynomialDegreeReport(A.name, NEG_INF, d, (lo, N))
    steps: List[Dict[str, Any]] = []
    for j in range(max_degree + 1):
        top = N - j - 1
        if top < max(lo, 0):
            return PolynomialDegreeReport(A.name, None, d, None, steps,
                                          f"window exhausted at depth {j}; raise max_rank")
        bad = [n for n in range(max(lo, 0), top + 1) if not kernel_is_zero(cur, n)]
        _, coker = kernel_coker(cur)
        zero = all(coker.is_zero_at(n) for n in range(max(lo, 0), top + 1))
        steps.append({"depth": j, "kernel_nonzero_at": bad, "coker_zero": zero,
                      "coker_ranks": [coker.group(n).describe() for n in range(max(lo, 0), top + 1)]})
        if bad:
            return PolynomialDegreeReport(A.name, None, d, (lo, top), steps,
                                          f"kernel nonzero at ranks {bad} (depth {j})")
        if zero:
            return PolynomialDegreeReport(A.name, j, d, (lo, top), steps)
        cur = coker
    return PolynomialDegreeReport(A.name, None, d, None, steps, f"exceeds {max_degree}")


# --------------------------------------------------------------------------
# induced representations


def _level_kind(groups: Sequence[PresentedAbelianGroup]) -> int:
    """``0`` if all groups are free, ``p`` if all are nonzero-or-empty F_p-spaces.

    Raises:
        ValueError: for mixed torsion, where the chain groups are not free over
            a single coefficient ring.
    """
    chars = set()
    for G in groups:
        if G.generators == 0:
            continue
        if not G.relations:
            chars.add(0)
            continue
        p = G.elementary_prime()
        if p is None:
            raise ValueError("levels with mixed torsion; split the module into summands")
        chars.add(p)
    if len(chars) > 1:
        raise ValueError(f"levels over different coefficient rings {sorted(chars)}")
    return chars.pop() if chars else 0


class InducedRepresentation:
    """``Ind_{G_k}^{G_n} A_k = Z[G_n] (x)_{Z[G_k]} A_k``.

    ``G_k`` sits in ``G_n`` as the upper-left block. Cosets are indexed by
    ``Hom(n-k, n)`` through the section ``s``; the basis is
    ``(sigma, a) -> s(sigma) (x) a``, ordered sigma-major.
    """

    def __init__(self, A: StabilityModule, k: int, n: int, cap: int = DEFAULT_INDUCED_CAP) -> None:
        if not 0 <= k <= n:
            raise ValueError("need 0 <= k <= n")
        self.A, self.k, self.n = A, k, n
        self.base = A.group(k)
        count = cg.hom_count(A.cat, n - k, n)
        if count * self.base.generators > cap:
            raise cg.CapExceeded(f"induced module of rank {count * self.base.generators} exceeds cap {cap}")
        self.cosets = cg.hom_set(A.cat, n - k, n) if self.base.generators else []
        self.index = {s.key(): i for i, s in enumerate(self.cosets)}

    @property
    def rank(self) -> int:
        return len(self.cosets) * self.base.generators

    def group(self) -> PresentedAbelianGroup:
        R = self.base.relation_matrix()
        if not len(R) or not self.cosets:
            return PresentedAbelianGroup.free(self.rank)
        return PresentedAbelianGroup.from_matrix(self.rank, np.kron(np.eye(len(self.cosets), dtype=np.int64), R))

    def act(self, g: cg.Morphism) -> np.ndarray:
        """``g s(sigma) = s(g sigma) (t + id)`` sends ``(sigma, a)`` to ``(g sigma, t a)``."""
        w = self.base.generators
        M = np.zeros((self.rank, self.rank), dtype=np.int64)
        for j, s in enumerate(self.cosets):
            new, t = cg.section_and_twist(s, g)
            i = self.index[new.key()]
            M[i * w:(i + 1) * w, j * w:(j + 1) * w] = self.A.act(self.k, t)
        return M


def induced_module(A: StabilityModule, k: int, n: int, cap: int = DEFAULT_INDUCED_CAP) -> InducedRepresentation:
    return InducedRepresentation(A, k, n, cap)


# --------------------------------------------------------------------------
# central stability complex


class _BlockAssembler:
    def __init__(self) -> None:
        self.rows: List[np.ndarray] = []
        self.cols: List[np.ndarray] = []
        self.vals: List[np.ndarray] = []

    def add(self, block: np.ndarray, r0: int, c0: int, sign: int = 1) -> None:
        r, c = np.nonzero(block)
        if len(r):
            self.rows.append(r + r0)
            self.cols.append(c + c0)
            self.vals.append(sign * block[r, c])

    def build(self, shape: Tuple[int, int], modulus: int) -> SparseMatrix:
        if not self.rows:
            return SparseMatrix.from_coo(shape, [], [], [])
        return SparseMatrix.from_coo(shape, np.concatenate(self.rows), np.concatenate(self.cols),
                                     np.concatenate(self.vals), modulus=modulus)


def _delete_vertex(s: cg.Morphism, i: int) -> cg.Morphism:
    b = s.cat.block
    keep = [j for j in range(len(s.cols)) if not b * i <= j < b * i + b]
    return cg.Morphism(s.cat, s.source - 1, s.target, tuple(s.cols[j] for j in keep),
                       tuple(s.duals[j] for j in keep))


def central_stability_complex(A: StabilityModule, n: int, max_i: Optional[int] = None,
                              cap: int = DEFAULT_INDUCED_CAP, check: bool = True) -> ChainComplex:
    """The complex ``C_p = Z[G_n] (x)_{G_{n-p-1}} A_{n-p-1}`` for ``-1 <= p``.

    ``C_{-1} = A_n``. A basis element of ``C_p`` is ``(sigma, a)`` with
    ``sigma`` in ``Hom(p+1, n)``; its ``i``-th face is
    ``(d_i sigma, t phi(a))`` where ``t`` is the twist of
    :func:`category.face_and_twist`. Chains are over Z when every level used is
    free and over ``F_p`` when every level is an ``F_p``-vector space.

    Args:
        A: the module (levels are simplified first).
        n: the rank.
        max_i: build degrees up to ``max_i + 1`` (default: all, i.e. ``n - 1``).
        cap: bound on any chain group's rank.
        check: assert ``d^2 = 0``.
    """
    S = simplified(A)
    top = n - 1 if max_i is None else min(n - 1, max_i + 1)
    levels = {p: S.group(n - p - 1) for p in range(-1, top + 1)}
    char = _level_kind(list(levels.values()))
    for p in range(0, top + 1):
        size = cg.hom_count(A.cat, p + 1, n) * levels[p].generators
        if size > cap:
            raise cg.CapExceeded(f"C_{p} at n={n} has rank {size} > cap {cap}")
    dims = {-1: levels[-1].generators}
    bnd: Dict[int, SparseMatrix] = {}
    prev_index: Dict[Tuple, int] = {cg.Morphism(A.cat, 0, n, (), ()).key(): 0}
    for p in range(0, top + 1):
        k = n - p - 1
        w, w1 = levels[p].generators, levels[p - 1].generators
        homs = cg.hom_set(A.cat, p + 1, n) if w else []
        dims[p] = len(homs) * w
        asm = _BlockAssembler()
        if w and w1:
            phi = S.transition(k)
            blocks: Dict[Tuple, np.ndarray] = {}
            for j, s in enumerate(homs):
                for i in range(p + 1):
                    if S.trivial_action:
                        face, block = _delete_vertex(s, i), phi
                    else:
                        face, t = cg.face_and_twist(s, i)
                        block = blocks.get(t.key())
                        if block is None:
                            block = imatmul(S.act(k + 1, t), phi)
                            blocks[t.key()] = block
                    r = prev_index[face.key()]
                    asm.add(block, r * w1, j * w, (-1) ** i)
        bnd[p] = asm.build((dims[p - 1], dims[p]), char)
        prev_index = {s.key(): j for j, s in enumerate(homs)}
    C = ChainComplex(dims, bnd, char, f"C~({A.name})_{n}")
    if check:
        C.check_d_squared()
    return C


def central_stability_homology(A: StabilityModule, n: int, degrees: Iterable[int], tier: str = "auto",
                               cap: int = DEFAULT_INDUCED_CAP) -> List[HomologyResult]:
    """Reduced homology of the central stability complex at rank ``n``."""
    degrees = sorted(set(degrees))
    C = central_stability_complex(A, n, max_i=max(degrees), cap=cap)
    return homology_by_policy(C, [i for i in degrees if i <= n - 1] or [-1], tier)


# --------------------------------------------------------------------------
# coequalizer and central stability degree


@dataclass
class CoequalizerLevel:
    n: int
    status: str  # "iso", "not-iso" or "skipped"
    surjective: Optional[bool] = None
    exact: Optional[bool] = None
    ind_ranks: Tuple[int, int] = (0, 0)
    detail: str = ""

    def to_json(self) -> Dict[str, Any]:
        return {"n": self.n, "status": self.status, "surjective": self.surjective, "exact": self.exact,
                "ind_ranks": list(self.ind_ranks), "detail": self.detail}


@dataclass
class CSDReport:
    """Central stability degree verdict.

    ``degree = d`` means the coequalizer map was verified to be an isomorphism
    for every ``d < n <= window_top`` and fails (or was skipped) at ``n = d``.
    Nothing is claimed above ``window_top``.
    """

    module: str
    levels: List[CoequalizerLevel]
    degree: Optional[int]
    window_top: int

    def to_json(self) -> Dict[str, Any]:
        return {"module": self.module, "degree": self.degree, "window_top": self.window_top,
                "levels": [lv.to_json() for lv in self.levels]}


def _ind_twists_map(S: StabilityModule, pairs: Sequence[Tuple[int, int, cg.Morphism, int]],
                    shape: Tuple[int, int], w_out: int, w_in: int, char: int, phi: np.ndarray) -> SparseMatrix:
    asm = _BlockAssembler()
    cache: Dict[Tuple, np.ndarray] = {}
    for r, c, t, sign in pairs:
        block = cache.get(t.key())
        if block is None:
            block = imatmul(S.act(t.source, t), phi)
            cache[t.key()] = block
        asm.add(block, r * w_out, c * w_in, sign)
    return asm.build(shape, char)


def coequalizer_level(A: StabilityModule, n: int, cap: int = DEFAULT_INDUCED_CAP) -> CoequalizerLevel:
    """Is ``coeq(Ind A_{n-2} => Ind A_{n-1}) -> A_n`` an isomorphism?

    The first map sends ``g (x) a`` to ``g (x) phi(a)``; the second sends it to
    ``g sigma_n (x) phi(a)``. In coset coordinates, ``tau`` in ``Hom(2, n)``
    maps to the faces ``tau o h_0`` and ``tau o h_1`` with twists read off from
    ``s(tau)`` and ``s(tau) sigma_n`` respectively.
    """
    cat = A.cat
    S = simplified(A)
    G_n = S.group(n)
    G1 = S.group(n - 1) if n >= 1 else PresentedAbelianGroup.free(0)
    G2 = S.group(n - 2) if n >= 2 else PresentedAbelianGroup.free(0)
    try:
        char = _level_kind([G_n, G1, G2])
    except ValueError as exc:
        return CoequalizerLevel(n, "skipped", detail=str(exc))
    w1, w2 = G1.generators, G2.generators
    size1 = cg.hom_count(cat, 1, n) * w1 if n >= 1 else 0
    size2 = cg.hom_count(cat, 2, n) * w2 if n >= 2 else 0
    if max(size1, size2) > cap:
        return CoequalizerLevel(n, "skipped", ind_ranks=(size1, size2),
                                detail=f"induced rank {max(size1, size2)} exceeds cap {cap}")
    homs1 = cg.hom_set(cat, 1, n) if (n >= 1 and w1) else []
    index1 = {s.key(): i for i, s in enumerate(homs1)}
    # augmentation: (sigma, a) -> s(sigma) phi(a)
    eps = _ind_twists_map(S, [(0, j, cg.section(s), 1) for j, s in enumerate(homs1)],
                          (G_n.generators, len(homs1) * w1), G_n.generators, w1, char,
                          S.transition(n - 1) if homs1 else np.zeros((0, 0), dtype=np.int64))
    D = SparseMatrix.from_coo((len(homs1) * w1, 0), [], [], [])
    if n >= 2 and w2 and w1:
        homs2 = cg.hom_set(cat, 2, n)
        sig = cg.sigma(cat, n)
        pairs = []
        for j, tau in enumerate(homs2):
            st = cg.section(tau)
            for sign, drop, lifted in ((1, 0, st), (-1, 1, cg.compose(st, sig))):
                face = _delete_vertex(tau, drop)
                t_full = cg.compose(cg.inverse(cg.section(face)), lifted)
                pairs.append((index1[face.key()], j, cg.restrict_block(t_full, n - 1), sign))
        D = _ind_twists_map(S, pairs, (len(homs1) * w1, len(homs2) * w2), w1, w2, char,
                            S.transition(n - 2))
    if not compose_is_zero(eps, D, char):
        raise AssertionError(f"{A.name}: the two induced maps disagree after the augmentation at n={n}")
    red_e = reduce_matrix(eps, char)
    red_d = reduce_matrix(D, char)
    surjective = red_e.rank == G_n.generators and not red_e.divisors
    exact = red_d.rank == eps.shape[1] - red_e.rank and not red_d.divisors
    status = "iso" if surjective and exact else "not-iso"
    return CoequalizerLevel(n, status, surjective, exact, (eps.shape[1], D.shape[1]))


def coequalizer_csd(A: StabilityModule, max_n: Optional[int] = None,
                    cap: int = DEFAULT_INDUCED_CAP) -> CSDReport:
    """Run :func:`coequalizer_level` for ``0 <= n <= max_n`` and infer the degree."""
    N = A.max_rank if max_n is None else min(max_n, A.max_rank)
    levels = [coequalizer_level(A, n, cap) for n in range(N + 1)]
    top = N
    while top >= 0 and levels[top].status == "skipped":
        top -= 1
    degree: Optional[int] = -1
    for lv in levels[:top + 1]:
        if lv.status != "iso":
            degree = lv.n
    if top < 0 or degree == top:
        degree = None
    return CSDReport(A.name, levels, degree, top)


# --------------------------------------------------------------------------
# builtin modules


class AdjointModule(StabilityModule):
    """``A_n = M_n(F_p)`` with conjugation; ``phi`` pads by zero.

    Basis ``E_ab`` in row-major order. ``g`` acts by ``X -> g X g^{-1}``.
    """

    def __init__(self, cat: cg.CategoryId, max_rank: int, name: str = "") -> None:
        if cat.kind not in ("vic", "vic-h") or not rg._is_prime(cat.modulus):
            raise ValueError("the adjoint module needs VIC over a prime field")
        super().__init__(cat, max_rank, name or f"adjoint({cat.spec})")
        self.p = cat.modulus

    def _group(self, n: int) -> PresentedAbelianGroup:
        return PresentedAbelianGroup.elementary(n * n, self.p)

    def _act(self, n: int, g: cg.Morphism) -> np.ndarray:
        F = np.array(g.cols, dtype=np.int64).T.reshape(n, n)
        Finv = np.array(g.duals, dtype=np.int64).reshape(n, n)
        # column (i, j) holds vec(F E_ij F^{-1}) = F[:, i] (x) Finv[j, :]
        M = np.einsum("ai,jb->abij", F, Finv).reshape(n * n, n * n)
        return M % self.p

    def _transition(self, n: int) -> np.ndarray:
        m = n + 1
        M = np.zeros((m * m, n * n), dtype=np.int64)
        for i in range(n):
            for j in range(n):
                M[i * m + j, i * n + j] = 1
        return M


BUILTINS = ("putman-sam:zmod:<m>", "h1ia-fi", "johnson-fi", "adjoint:zmod:<p>")


def builtin(name: str, max_rank: int) -> StabilityModule:
    """Named modules.

    * ``putman-sam:zmod:m``: free abelian group on pairs (unimodular ``v``,
      complement ``C``) in ``(Z/m)^n``, i.e. ``M(1)`` over VIC(Z/m).
    * ``h1ia-fi``: ``Lambda^2 M(1) (x) M(1)`` over FI.
    * ``johnson-fi``: ``Lambda^3 H + (Sym^0 H + Sym^1 H + Sym^2 H / H) (x) Z/2``
      over FI with ``H = M(1) + M(1)``; the quotient kills squares.
    * ``adjoint:zmod:p``: ``n x n`` matrices over F_p with conjugation.
    """
    parts = name.split(":")
    if parts[0] == "putman-sam" and len(parts) == 3 and parts[1] == "zmod":
        cat = cg.CategoryId.parse(f"vic:zmod:{parts[2]}")
        return PermutationModule(cat, 1, max_rank, name=name)
    if name == "h1ia-fi":
        fi = cg.CategoryId("fi")
        M1 = PermutationModule(fi, 1, max_rank)
        return TensorProduct(ExteriorPower(M1, 2), M1, name=name)
    if name == "johnson-fi":
        return johnson_module(max_rank)
    if parts[0] == "adjoint" and len(parts) == 3 and parts[1] == "zmod":
        return AdjointModule(cg.CategoryId.parse(f"vic:zmod:{parts[2]}"), max_rank, name=name)
    raise ValueError(f"unknown builtin {name!r}; known: {', '.join(BUILTINS)}")


def johnson_module(max_rank: int) -> StabilityModule:
    fi = cg.CategoryId("fi")
    M1 = PermutationModule(fi, 1, max_rank)
    H = DirectSum([M1, M1], name="H")
    sym2 = SymmetricPower(H, 2)

    def squares(n: int) -> np.ndarray:
        mons = sym2.monomials(n)
        pos = {m: i for i, m in enumerate(mons)}
        rows = np.zeros((2 * n, len(mons)), dtype=np.int64)
        for i in range(2 * n):
            rows[i, pos[(i, i)]] = 1
        return rows

    torsion = scalar_reduction(DirectSum([SymmetricPower(H, 0), SymmetricPower(H, 1),
                                          QuotientModule(sym2, squares, "Sym^2(H)/H")]), 2)
    return DirectSum([ExteriorPower(H, 3), torsion], name="johnson-fi")


# --------------------------------------------------------------------------
# declarative modules


class DeclaredModule(StabilityModule):
    """A module read from the JSON format produced by :meth:`StabilityModule.to_json`.

    Actions are given on :func:`category.group_generators`; the action of an
    arbitrary element is found by a breadth-first closure over the group.
    """

    def __init__(self, data: Dict[str, Any], group_cap: int = 200_000) -> None:
        cat = cg.CategoryId.parse(data["category"])
        super().__init__(cat, int(data["max_rank"]), data.get("name", "declared"))
        self.levels = data["levels"]
        if len(self.levels) != self.max_rank + 1:
            raise ValueError("need one level per rank 0..max_rank")
        self.group_cap = group_cap
        self._closure: Dict[int, Dict[Tuple, np.ndarray]] = {}

    @classmethod
    def from_json(cls, text: str) -> "DeclaredModule":
        return cls(json.loads(text))

    def _group(self, n: int) -> PresentedAbelianGroup:
        lv = self.levels[n]
        return PresentedAbelianGroup.from_matrix(int(lv["generators"]), lv.get("relations") or [])

    def _elements(self, n: int) -> Dict[Tuple, np.ndarray]:
        if n in self._closure:
            return self._closure[n]
        g = self.rank(n)
        gens = cg.group_generators(self.cat, n)
        mats = [np.asarray(M, dtype=np.int64).reshape(g, g) for M in self.levels[n]["actions"]]
        if len(mats) != len(gens):
            raise ValueError(f"rank {n}: expected {len(gens)} generator matrices, got {len(mats)}")
        e = cg.identity(self.cat, n)
        table = {e.key(): np.eye(g, dtype=np.int64)}
        frontier = [e]
        while frontier:
            nxt = []
            for x in frontier:
                for s, Ms in zip(gens, mats):
                    y = cg.compose(s, x)
                    if y.key() not in table:
                        table[y.key()] = Ms @ table[x.key()]
                        nxt.append(y)
                        if len(table) > self.group_cap:
                            raise cg.CapExceeded(f"G_{n} closure exceeds {self.group_cap}")
            frontier = nxt
        self._closure[n] = table
        return table

    def _act(self, n: int, g: cg.Morphism) -> np.ndarray:
        return self._elements(n)[g.key()]

    def _transition(self, n: int) -> np.ndarray:
        phi = self.levels[n].get("phi")
        if phi is None:
            raise ValueError(f"rank {n}: missing phi")
        return np.asarray(phi, dtype=np.int64).reshape(self.rank(n + 1), self.rank(n))

import itertools
from typing import Iterable, Sequence, Set, Tuple

from hypothesis import settings

from stabhom import ring as rg

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


def brute_span(rows: Iterable[Sequence[int]], m: int, n: int) -> Set[Tuple[int, ...]]:
    """All Z/m-linear combinations of ``rows``, by closure under adding generators."""
    gens = [tuple(x % m for x in r) for r in rows]
    seen = {(0,) * n}
    frontier = list(seen)
    while frontier:
        nxt = []
        for v in frontier:
            for g in gens:
                w = tuple((a + b) % m for a, b in zip(v, g))
                if w not in seen:
                    seen.add(w)
                    nxt.append(w)
        frontier = nxt
    return seen


def all_vectors(m: int, n: int):
    return itertools.product(range(m), repeat=n)


class Lattice:
    """Cached sums, intersections and direct-sum data for a list of submodules."""

    def __init__(self, subs):
        self.subs = subs
        self.idx = {S.key(): i for i, S in enumerate(subs)}
        k = len(subs)
        self.meet = [[self.idx[rg.intersect(subs[i], subs[j]).key()] for j in range(k)] for i in range(k)]
        self.join = [[self.idx[rg.submodule_sum(subs[i], subs[j]).key()] for j in range(k)] for i in range(k)]
        self.le = [[subs[i] <= subs[j] for j in range(k)] for i in range(k)]
        m, n = subs[0].modulus, subs[0].ambient_rank
        self.zero = self.idx[rg.Submodule.zero(m, n).key()]
        self.full = self.idx[rg.Submodule.full(m, n).key()]

    def direct(self, a, b):
        return self.meet[a][b] == self.zero and self.join[a][b] == self.full


def check_laws(L, triples):
    for a, b, c in triples:
        assert L.le[L.join[L.meet[a][c]][L.meet[b][c]]][L.meet[L.join[a][b]][c]]
        if L.direct(a, b):
            if L.le[a][c]:
                bc = L.meet[b][c]
                assert L.join[a][bc] == c and L.meet[a][bc] == L.zero
            if L.le[c][a]:
                assert L.meet[a][L.join[b][c]] == c

import itertools
import math

import pytest

from stabhom import category as cg
from stabhom import ring as rg

from conftest import all_vectors

FI = cg.CategoryId.parse("fi")
VIC2 = cg.CategoryId.parse("vic:zmod:2")
VIC3 = cg.CategoryId.parse("vic:zmod:3")
SI2 = cg.CategoryId.parse("si:zmod:2")


def brute_group_order(cat, n):
    """Count invertible (and, for SI, form-preserving) matrices by enumeration."""
    N, m = cat.dim(n), cat.modulus
    count = 0
    sp = cat.symplectic_space(n) if cat.kind == "si" else None
    for entries in itertools.product(range(m), repeat=N * N):
        M = [entries[i * N:(i + 1) * N] for i in range(N)]
        d = rg.det_mod(M, m)
        if math.gcd(d, m) != 1:
            continue
        if cat.kind == "vic-h" and d not in cat.H:
            continue
        if sp is not None and not sp.is_symplectic(M):
            continue
        count += 1
    return count


def test_parse_round_trip():
    for s in ["fi", "vic:zmod:2", "vic-h:zmod:3:{1}", "si:zmod:2", "vic-h:zmod:7:{1,2,4}"]:
        assert cg.CategoryId.parse(s).spec == s
    for bad in ["vic", "vic-h:zmod:5:{2}", "si:zmod:x", "gl:zmod:2"]:
        with pytest.raises(ValueError):
            cg.CategoryId.parse(bad)


@pytest.mark.parametrize("cat, n, order", [(FI, 3, 6), (VIC2, 2, 6), (SI2, 2, 720)])
def test_group_order_examples(cat, n, order):
    assert cg.group_order(cat, n) == order
    assert len(cg.enumerate_group(cat, n)) == order


@pytest.mark.parametrize("spec, n", [("vic:zmod:2", 2), ("vic:zmod:2", 3), ("vic:zmod:3", 2), ("vic:zmod:4", 2),
                                     ("vic:zmod:6", 2), ("vic-h:zmod:3:{1}", 2), ("vic-h:zmod:5:{1,4}", 2),
                                     ("si:zmod:2", 1), ("si:zmod:3", 1), ("si:zmod:2", 2)])
def test_group_order_matches_brute_force(spec, n):
    cat = cg.CategoryId.parse(spec)
    assert cg.group_order(cat, n) == brute_group_order(cat, n)


def test_hom_set_examples():
    assert len(cg.hom_set(FI, 1, 3)) == 3
    assert len(cg.hom_set(VIC2, 1, 2)) == 6 == cg.group_order(VIC2, 2) // cg.group_order(VIC2, 1)
    sp = rg.SymplecticSpace(2, 2)
    pairs = sum(sp.form(a, b) == 1 for a in all_vectors(2, 4) for b in all_vectors(2, 4))
    assert len(cg.hom_set(SI2, 1, 2)) == pairs == 120


CASES = [("fi", n) for n in range(1, 8)] + [("vic:zmod:2", n) for n in range(1, 5)] + \
        [("vic:zmod:3", n) for n in range(1, 4)] + [("vic-h:zmod:3:{1}", n) for n in range(1, 4)] + \
        [("si:zmod:2", g) for g in (1, 2)]


@pytest.mark.parametrize("spec, n", CASES)
def test_hom_counts_times_stabilizer(spec, n):
    cat = cg.CategoryId.parse(spec)
    for m in range(0, n + 1):
        if cg.hom_count(cat, m, n) > 200_000:
            continue
        homs = cg.hom_set(cat, m, n)
        assert len(homs) == cg.hom_count(cat, m, n)
        assert len({f.key() for f in homs}) == len(homs)
        if cat.kind != "vic-h" or m < n:
            assert len(homs) * cg.group_order(cat, n - m) == cg.group_order(cat, n)


def _is_valid(f):
    cat = f.cat
    N, m = cat.dim(f.target), cat.modulus
    XiF = [[sum(d[k] * c[k] for k in range(N)) % m for c in f.cols] for d in f.duals]
    if XiF != [[int(i == j) for j in range(len(f.cols))] for i in range(len(f.duals))]:
        return False
    if cat.kind == "si":
        sp = cat.symplectic_space(f.target)
        try:
            sp.check_pairs(f.pairs)
        except ValueError:
            return False
        # the complement is the symplectic orthogonal of the image
        comp = f.complement
        return all(sp.form(x, c) == 0 for x in comp.elements() for c in f.cols)
    return True


@pytest.mark.parametrize("spec, m, n", [("vic:zmod:2", 1, 3), ("vic:zmod:4", 1, 2), ("si:zmod:2", 1, 2),
                                        ("vic:zmod:3", 2, 2), ("fi", 2, 4)])
def test_payloads_are_valid(spec, m, n):
    cat = cg.CategoryId.parse(spec)
    for f in cg.hom_set(cat, m, n):
        assert _is_valid(f)
        img = rg.Submodule.span(f.cols, cat.modulus, cat.dim(n))
        assert rg.intersect(img, f.complement) == rg.Submodule.zero(cat.modulus, cat.dim(n))
        assert rg.submodule_sum(img, f.complement) == rg.Submodule.full(cat.modulus, cat.dim(n))


def test_identity_and_fi_composition():
    f = cg.hom_set(FI, 1, 2)[0]
    assert cg.compose(cg.identity(FI, 2), f) == f
    assert cg.compose(f, cg.identity(FI, 1)) == f
    g = cg.canonical_inclusion(FI, 1)  # {1} -> {1,2}
    h = cg.canonical_inclusion(FI, 2)  # {1,2} -> {1,2,3}
    assert cg.compose(h, g).word == (0,)
    for a in cg.hom_set(FI, 1, 2):
        for b in cg.hom_set(FI, 2, 3):
            assert cg.compose(b, a).word == tuple(b.word[i] for i in a.word)


@pytest.mark.parametrize("spec", ["vic:zmod:2", "vic:zmod:3", "vic:zmod:4"])
def test_vic_composition_complement(spec):
    cat = cg.CategoryId.parse(spec)
    m = cat.modulus
    for g in cg.hom_set(cat, 1, 2)[::3]:
        for f in cg.hom_set(cat, 2, 3)[:8]:
            fg = cg.compose(f, g)
            fD = rg.Submodule.span([cg._apply(f.cols, x, m, 3) for x in g.complement.elements()], m, 3)
            assert fg.complement == rg.submodule_sum(f.complement, fD)


def test_monoidal_sum_examples():
    assert cg.monoidal_sum(cg.identity(VIC2, 2), cg.identity(VIC2, 1)) == cg.identity(VIC2, 3)
    a, b = cg.hom_set(FI, 1, 2)[1], cg.hom_set(FI, 2, 3)[3]
    s = cg.monoidal_sum(a, b)
    assert s.word == a.word + tuple(2 + w for w in b.word)
    e1 = cg.canonical_inclusion(VIC2, 1)  # the e_1 line in R^2 with complement e_2
    s = cg.monoidal_sum(e1, e1)
    assert s.cols == ((1, 0, 0, 0), (0, 0, 1, 0))
    assert s.complement == rg.Submodule.span([(0, 1, 0, 0), (0, 0, 0, 1)], 2, 4)


def test_canonical_inclusion_examples():
    f = cg.canonical_inclusion(FI, 0)
    assert (f.source, f.target) == (0, 1) and cg.hom_set(FI, 0, 1) == [f]
    f = cg.canonical_inclusion(VIC2, 2)
    assert f.cols == ((1, 0, 0), (0, 1, 0))
    assert f.complement == rg.Submodule.span([(0, 0, 1)], 2, 3)
    f = cg.canonical_inclusion(SI2, 1)
    assert f.pairs == (((1, 0, 0, 0), (0, 1, 0, 0)),)


def test_face_morphism_examples():
    assert cg.face_morphism(FI, 0, 0) == cg.canonical_inclusion(FI, 0)
    assert cg.face_morphism(FI, 2, 1).word == (0, 2)
    h = cg.face_morphism(VIC2, 1, 0)
    assert h.cols == ((0, 1),)
    assert h.complement == rg.Submodule.span([(1, 0)], 2, 2)
    with pytest.raises(ValueError):
        cg.face_morphism(FI, 1, 2)


@pytest.mark.parametrize("spec, n", [("fi", 3), ("vic:zmod:2", 3), ("si:zmod:2", 2), ("vic-h:zmod:3:{1}", 2)])
def test_faces_satisfy_simplicial_identities(spec, n):
    cat = cg.CategoryId.parse(spec)
    for p in range(1, n):
        for j in range(p + 1):
            for i in range(j):
                # h_j h_i = h_i h_{j-1} as maps p-1 -> p+1
                lhs = cg.compose(cg.face_morphism(cat, p, j), cg.face_morphism(cat, p - 1, i))
                rhs = cg.compose(cg.face_morphism(cat, p, i), cg.face_morphism(cat, p - 1, j - 1))
                assert lhs == rhs


@pytest.mark.parametrize("spec, m, n", [("fi", 1, 3), ("fi", 2, 4), ("vic:zmod:2", 1, 2), ("vic:zmod:2", 1, 3),
                                        ("vic:zmod:3", 1, 2), ("si:zmod:2", 1, 2), ("vic-h:zmod:3:{1}", 1, 2)])
def test_twist_lies_in_complement_block(spec, m, n):
    """``s(g phi)^-1 g s(phi)`` is block diagonal with identity on the image block."""
    cat = cg.CategoryId.parse(spec)
    G = cg.enumerate_group(cat, n)
    step = max(1, len(G) // 100)  # SI genus 2 has 720 elements; sample them
    for phi in cg.hom_set(cat, m, n):
        for g in G.elements[::step]:
            new, t = cg.section_and_twist(phi, g)
            assert new == cg.compose(g, phi)
            lhs = cg.compose(cg.section(new), cg.monoidal_sum(t, cg.identity(cat, m)))
            assert lhs == cg.compose(g, cg.section(phi))


def test_twist_identity_and_fi_permutation():
    for phi in cg.hom_set(FI, 1, 3):
        new, t = cg.section_and_twist(phi, cg.identity(FI, 3))
        assert new == phi and t == cg.identity(FI, 2)
    # for FI the twist is the permutation g induces on the complement letters,
    # read in increasing order
    G = cg.enumerate_group(FI, 3)
    for phi in cg.hom_set(FI, 1, 3):
        comp = [j for j in range(3) if j not in phi.word]
        for g in G.elements:
            new, t = cg.section_and_twist(phi, g)
            new_comp = [j for j in range(3) if j not in new.word]
            expected = tuple(new_comp.index(g.word[c]) for c in comp)
            assert t.word == expected


@pytest.mark.parametrize("spec, m, n", [("fi", 1, 3), ("vic:zmod:2", 1, 3), ("si:zmod:2", 1, 2),
                                        ("vic-h:zmod:3:{1}", 1, 2)])
def test_twist_cocycle(spec, m, n):
    cat = cg.CategoryId.parse(spec)
    G = cg.enumerate_group(cat, n).elements
    gens = cg.group_generators(cat, n)
    for phi in cg.hom_set(cat, m, n)[:10]:
        for g in G[:40]:
            for h in gens:
                mid, t1 = cg.section_and_twist(phi, g)
                _, t2 = cg.section_and_twist(mid, h)
                _, t = cg.section_and_twist(phi, cg.compose(h, g))
                assert t == cg.compose(t2, t1)


@pytest.mark.parametrize("spec, m, n", [("fi", 2, 3), ("vic:zmod:2", 1, 2), ("vic:zmod:2", 2, 3),
                                        ("vic:zmod:3", 1, 2), ("si:zmod:2", 1, 2), ("vic-h:zmod:3:{1}", 1, 2)])
def test_actions_are_free_and_transitive(spec, m, n):
    cat = cg.CategoryId.parse(spec)
    homs = cg.hom_set(cat, m, n)
    keys = {f.key() for f in homs}
    G = cg.enumerate_group(cat, n)
    phi = homs[0]
    orbit = {cg.compose(g, phi).key() for g in G.elements}
    assert orbit == keys  # transitive
    Gm = cg.enumerate_group(cat, m).elements
    orbits = {}
    for f in homs:
        rep, k = cg.orbit_representative(f)
        assert cg.compose(rep, k) == f
        orbits.setdefault(rep.key(), set()).add(f.key())
    for rep_key, members in orbits.items():
        rep = next(f for f in homs if f.key() == rep_key) if rep_key in keys else None
        assert len(members) == len(Gm)  # free right action of G_m
        if rep is not None:
            assert {cg.compose(rep, k).key() for k in Gm} == members


def test_full_unit_vic_h_matches_vic():
    H = cg.CategoryId.parse("vic-h:zmod:3:{1,2}")
    for m, n in [(1, 2), (2, 2), (1, 3), (2, 3)]:
        a = [(f.cols, f.duals) for f in cg.hom_set(H, m, n)]
        b = [(f.cols, f.duals) for f in cg.hom_set(VIC3, m, n)]
        assert a == b
    assert H.has_full_units
    f, g = cg.hom_set(H, 1, 2)[2], cg.hom_set(H, 2, 2)[5]
    f2, g2 = cg.hom_set(VIC3, 1, 2)[2], cg.hom_set(VIC3, 2, 2)[5]
    assert cg.compose(g, f).cols == cg.compose(g2, f2).cols


def test_sigma_and_cyclic_shift():
    s = cg.sigma(FI, 3)
    assert s.word == (0, 2, 1)
    assert cg.compose(s, s) == cg.identity(FI, 3)
    c = cg.cyclic_shift(VIC2, 3)
    inc = cg.compose(c, cg.canonical_inclusion(VIC2, 2))
    assert inc.cols == ((0, 1, 0), (0, 0, 1))
    assert inc.complement == rg.Submodule.span([(1, 0, 0)], 2, 3)
    ssi = cg.sigma(SI2, 2)
    assert SI2.symplectic_space(2).is_symplectic(ssi.matrix())

import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from stabhom import category as cg
from stabhom import complexes as cx
from stabhom import homology as hm
from stabhom import stabmod as sm
from stabhom.stabmod import PresentedAbelianGroup

FI = cg.CategoryId.parse("fi")
VIC2 = cg.CategoryId.parse("vic:zmod:2")
SI2 = cg.CategoryId.parse("si:zmod:2")


def M(m, N, cat=FI):
    return sm.PermutationModule(cat, m, N)


# -- presented groups ------------------------------------------------------------


def test_presented_group_invariants():
    G = PresentedAbelianGroup.from_matrix(3, [[2, 0, 0], [0, 4, 0]])
    assert G.invariants() == (1, (2, 4))
    assert G.describe() == "Z^1 + Z/2 + Z/4"
    assert PresentedAbelianGroup.elementary(3, 2).elementary_prime() == 2
    assert PresentedAbelianGroup.free(0).is_zero()
    assert PresentedAbelianGroup.from_matrix(2, [[1, 1], [0, 1]]).is_zero()


@given(st.lists(st.lists(st.integers(-4, 4), min_size=3, max_size=3), max_size=4))
def test_simplify_is_isomorphism(rows):
    G = PresentedAbelianGroup.from_matrix(3, rows)
    S = sm.simplify(G)
    assert S.group.invariants() == G.invariants()
    # proj o lift is the identity on the simplified group
    P, L = np.asarray(S.proj), np.asarray(S.lift)
    if S.group.generators:
        assert S.group.contains_relations(P @ L - np.eye(S.group.generators, dtype=np.int64))
    # proj kills the old relations
    R = G.relation_matrix()
    if len(R):
        assert S.group.contains_relations(P @ R.T)


# -- free modules ------------------------------------------------------------------


def test_free_module_ranks():
    for n in range(5):
        assert M(0, 4).rank(n) == 1
        assert M(1, 4).rank(n) == n
        assert M(2, 4).rank(n) == n * (n - 1)
    assert M(0, 3).act(3, cg.sigma(FI, 3)).tolist() == [[1]]
    assert M(3, 4).is_zero_at(2)


@pytest.mark.parametrize("spec, m, N", [("fi", 1, 4), ("fi", 2, 4), ("vic:zmod:2", 1, 3), ("si:zmod:2", 1, 2),
                                        ("vic-h:zmod:3:{1}", 1, 2)])
def test_regular_free_module_is_permutation_module(spec, m, N):
    cat = cg.CategoryId.parse(spec)
    F = sm.FreeModule(sm.GroupoidModule.regular(cat, m), N)
    P = sm.PermutationModule(cat, m, N)
    for n in range(N + 1):
        assert F.rank(n) == P.rank(n)
        if n <= N - 1 or n == N:
            assert sm.verify_module(F, n).ok


def test_trivial_free_module_over_fi_counts_subsets():
    F = sm.FreeModule(sm.GroupoidModule.trivial(FI, 2), 5)
    assert [F.rank(n) for n in range(6)] == [math.comb(n, 2) for n in range(6)]


# -- module axioms ------------------------------------------------------------------


def modules():
    yield "M(1) fi", M(1, 4)
    yield "M(1) vic2", M(1, 3, VIC2)
    yield "M(1) si2", M(1, 2, SI2)
    yield "h1ia", sm.builtin("h1ia-fi", 4)
    yield "johnson", sm.builtin("johnson-fi", 4)
    yield "adjoint", sm.builtin("adjoint:zmod:2", 3)
    yield "putman-sam", sm.builtin("putman-sam:zmod:2", 3)
    yield "shift", sm.shift(M(2, 5))
    yield "tensor", sm.TensorProduct(M(1, 4), M(1, 4))
    yield "sym2", sm.SymmetricPower(M(1, 4), 2)
    yield "coker", sm.kernel_coker(M(2, 5))[1]
    yield "coker vic", sm.kernel_coker(M(1, 4, VIC2))[1]
    yield "mod 2", sm.scalar_reduction(M(1, 4), 2)


MODULES = list(modules())


@pytest.mark.parametrize("name, A", MODULES)
def test_module_axioms(name, A):
    for n in range(A.max_rank + 1):
        chk = sm.verify_module(A, n)
        assert chk.ok, (name, chk)


def test_tensor_with_constant_module():
    A = sm.builtin("h1ia-fi", 4)
    T = sm.TensorProduct(A, M(0, 4))
    for n in range(5):
        assert T.rank(n) == A.rank(n)
        for g in cg.group_generators(FI, n):
            assert np.array_equal(T.act(n, g), A.act(n, g))


def test_h1ia_ranks_match_free_decomposition():
    A = sm.builtin("h1ia-fi", 6)
    for n in range(7):
        assert A.rank(n) == n * n * (n - 1) // 2 == 2 * math.comb(n, 2) + 3 * math.comb(n, 3)
    assert A.rank(3) == 9 and A.rank(4) == 24


def test_builtin_ranks():
    ps = sm.builtin("putman-sam:zmod:2", 4)
    assert [ps.rank(n) for n in range(1, 5)] == [1, 6, 28, 120]
    ad = sm.builtin("adjoint:zmod:2", 4)
    for n in range(5):
        assert ad.rank(n) == n * n
        assert ad.group(n).elementary_prime() == 2 or n == 0
    with pytest.raises(ValueError):
        sm.builtin("nope", 3)


def test_putman_sam_ranks_match_vector_complement_count():
    # unimodular vectors of (Z/2)^n times complements of a line: (2^n - 1) 2^(n-1)
    ps = sm.builtin("putman-sam:zmod:2", 4)
    for n in range(1, 5):
        assert ps.rank(n) == (2 ** n - 1) * 2 ** (n - 1)


def test_johnson_module_levels():
    J = sm.builtin("johnson-fi", 4)
    for n in range(5):
        f, tors = J.group(n).invariants()
        assert f == math.comb(2 * n, 3)
        assert len(tors) == 1 + n + 2 * n * n and set(tors) <= {2}


# -- shift, kernel, cokernel --------------------------------------------------------------


def test_constant_module_shift_is_iso():
    A = M(0, 5)
    ker, coker = sm.kernel_coker(A)
    for n in range(5):
        assert sm.kernel_is_zero(A, n)
        assert coker.is_zero_at(n)


def test_coker_of_m1_is_constant():
    _, coker = sm.kernel_coker(M(1, 6))
    for n in range(6):
        assert coker.group(n).invariants() == (1, ())


@pytest.mark.parametrize("m", [1, 2, 3])
def test_coker_of_free_fi_module_is_smaller_free_module(m):
    N = 6
    A = M(m, N + 1)
    _, coker = sm.kernel_coker(A)
    B = sm.DirectSum([M(m - 1, N)] * m)
    for n in range(N + 1):
        assert sm.kernel_is_zero(A, n)
        assert coker.group(n).isomorphic(B.group(n))
    # homology vanishing agrees at small ranks
    for n in range(1, 5):
        degrees = list(range(-1, n))
        a = sm.central_stability_homology(coker, n, degrees)[0]
        b = sm.central_stability_homology(B, n, degrees)[0]
        assert [a.degrees[i].is_zero for i in degrees] == [b.degrees[i].is_zero for i in degrees]


def test_kernel_of_m2_vanishes():
    A = M(2, 6)
    assert all(sm.kernel_is_zero(A, n) for n in range(6))
    K, _ = sm.kernel_coker(A)
    assert all(K.is_zero_at(n) for n in range(6))


def test_kernel_is_detected():
    # A_n -> A_{n+1} sends everything to zero: the kernel is all of A
    Z = sm.QuotientModule(M(1, 3), lambda n: np.eye(n, dtype=np.int64))
    assert all(Z.is_zero_at(n) for n in range(4))
    K, _ = sm.kernel_coker(sm.scalar_reduction(M(1, 4), 2))
    assert all(K.is_zero_at(n) for n in range(4))


def test_shift_levels():
    A = M(1, 5)
    S = sm.shift(A)
    for n in range(5):
        assert S.rank(n) == A.rank(n + 1)


# -- polynomial degree ---------------------------------------------------------------------


def test_zero_module_has_degree_minus_infinity():
    Z = sm.QuotientModule(M(1, 3), lambda n: np.eye(n, dtype=np.int64))
    rep = sm.polynomial_degree(Z)
    assert rep.degree == sm.NEG_INF and rep.bound_at_most(-1)


@pytest.mark.parametrize("m", [0, 1, 2, 3])
def test_free_fi_module_degree(m):
    rep = sm.polynomial_degree(M(m, 6 + m + 1))
    assert rep.degree == m
    assert rep.window == (0, 6)


def test_builtin_degrees():
    assert sm.polynomial_degree(sm.builtin("h1ia-fi", 7)).degree == 3
    assert sm.polynomial_degree(sm.builtin("adjoint:zmod:2", 6)).degree == 2
    # exponential rank growth rules out finite degree; the window only shows no small bound
    rep = sm.polynomial_degree(sm.builtin("putman-sam:zmod:2", 4))
    assert rep.degree is None and not rep.bound_at_most(3)


def test_degree_report_when_window_is_short():
    rep = sm.polynomial_degree(M(3, 3))
    assert rep.degree is None and "window" in rep.reason


# -- induced modules and the central stability complex ------------------------------------------


def test_induced_examples():
    zero = sm.QuotientModule(M(1, 3), lambda n: np.eye(n, dtype=np.int64))
    assert sm.induced_module(sm.simplified(zero), 1, 3).group().is_zero()
    assert sm.induced_module(M(0, 3), 2, 3).rank == 3
    assert sm.induced_module(M(0, 3), 1, 3).rank == 6
    ps = sm.builtin("putman-sam:zmod:2", 4)
    assert sm.induced_module(ps, 3, 4).rank == 28 * 120


def test_induced_action_is_a_representation():
    A = M(1, 3)
    ind = sm.induced_module(A, 2, 3)
    G = cg.enumerate_group(FI, 3).elements
    for g in G:
        for h in G:
            assert np.array_equal(ind.act(cg.compose(g, h)), ind.act(g) @ ind.act(h))


@pytest.mark.parametrize("spec, n", [("fi", 3), ("fi", 4), ("vic:zmod:2", 2), ("vic:zmod:2", 3)])
def test_csc_of_constant_module_is_k(spec, n):
    cat = cg.CategoryId.parse(spec)
    C = sm.central_stability_complex(M(0, n, cat), n)
    D = hm.chain_complex_of(cx.build_K(cat, n))
    assert C.dims == D.dims
    for p in D.boundaries:
        assert C.boundary(p).to_dense() == D.boundary(p).to_dense()


def test_csc_shapes():
    C = sm.central_stability_complex(M(1, 2), 2)
    assert [C.dim(p) for p in (-1, 0, 1)] == [2, 2, 0]
    C0 = sm.central_stability_complex(M(1, 2), 0)
    assert C0.dims == {-1: 0}


@pytest.mark.parametrize("name, A", [(n, A) for n, A in MODULES if n not in ("johnson", "adjoint", "putman-sam", "M(1) si2")])
def test_csc_d_squared(name, A):
    for n in range(1, min(A.max_rank, 4) + 1):
        C = sm.central_stability_complex(A, n)
        assert C.check_d_squared()


@pytest.mark.parametrize("spec, m, N", [("fi", 1, 4), ("fi", 2, 4), ("vic:zmod:2", 1, 3), ("vic:zmod:2", 0, 3)])
def test_surjectivity_matches_h_minus_one(spec, m, N):
    cat = cg.CategoryId.parse(spec)
    for A in (M(m, N, cat), sm.kernel_coker(M(m, N + 1, cat))[1]):
        for n in range(1, N + 1):
            lv = sm.coequalizer_level(A, n)
            (res,) = sm.central_stability_homology(A, n, [-1])
            assert lv.surjective == res.degrees[-1].is_zero


def test_constant_module_homology():
    for n in range(1, 6):
        (res,) = sm.central_stability_homology(M(0, n), n, [-1])
        assert res.vanishes()
    (res,) = sm.central_stability_homology(M(0, 3, VIC2), 3, [0])
    assert res.vanishes()


@pytest.mark.parametrize("m", [0, 1, 2])
def test_free_module_homology_bound(m):
    """H~_i(M(m))_n = 0 for n > i + m + 1 over FI."""
    A = M(m, 6)
    for n in range(1, 7):
        degrees = [i for i in range(-1, 3) if n > i + m + 1 and i <= n - 1]
        if degrees:
            (res,) = sm.central_stability_homology(A, n, degrees)
            assert res.vanishes(degrees)


# -- coequalizer ----------------------------------------------------------------------------------------


def test_csd_constant_and_m1():
    rep = sm.coequalizer_csd(M(0, 5))
    assert [lv.status for lv in rep.levels[1:]] == ["iso"] * 5
    rep = sm.coequalizer_csd(M(1, 5))
    assert [lv.status for lv in rep.levels[1:]] == ["not-iso", "iso", "iso", "iso", "iso"]
    assert rep.degree == 1


def test_csd_putman_sam():
    rep = sm.coequalizer_csd(sm.builtin("putman-sam:zmod:2", 4))
    assert rep.levels[4].status == "iso"
    assert rep.degree == 3 and rep.window_top == 4


def test_csd_respects_cap():
    rep = sm.coequalizer_csd(sm.builtin("putman-sam:zmod:2", 4), cap=1000)
    assert rep.levels[4].status == "skipped"
    assert rep.window_top < 4


# -- JSON format -----------------------------------------------------------------------------------------


def test_declared_module_round_trip():
    A = sm.builtin("adjoint:zmod:2", 3)
    B = sm.DeclaredModule.from_json(json.dumps(A.to_json()))
    G = cg.enumerate_group(A.cat, 3).elements
    for g in G[::7]:
        assert np.array_equal(B.act(3, g) % 2, A.act(3, g) % 2)
    assert sm.polynomial_degree(B).degree == sm.polynomial_degree(A).degree
    with pytest.raises(ValueError):
        sm.DeclaredModule({"category": "fi", "max_rank": 2, "levels": []})

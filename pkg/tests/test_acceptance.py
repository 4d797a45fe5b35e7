"""Acceptance criteria 1-10, one pass/fail line each.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the summary lines.
"""
import math
import random

from stabhom import category as cg
from stabhom import cli
from stabhom import complexes as cx
from stabhom import homology as hm
from stabhom import ring as rg
from stabhom import stabmod as sm

from conftest import Lattice, brute_span, check_laws


def report(capsys, number, title, ok, detail=""):
    with capsys.disabled():
        line = f"criterion {number:>2} {'PASS' if ok else 'FAIL'}  {title}"
        print("\n" + line + (f"  ({detail})" if detail else ""))
    assert ok, detail


def suite(name, **kw):
    return cli.run_suite(cli.SuiteSpec(name, **kw)).records


def all_pass(records):
    return bool(records) and all(r.status == "pass" for r in records)


def statuses(records):
    return ", ".join(f"{r.status}" for r in records)


def test_criterion_01_injective_words(capsys):
    recs = suite("h3", category="fi", n_min=2, n_max=6, tier="Z")
    tops = [r.computed["derangements"] for r in recs]
    ok = all_pass(recs) and len(recs) == 5 and tops == [cli.derangements(n) for n in range(2, 7)]
    report(capsys, 1, "H3 for FI, n = 2..6 over Z, top rank = derangements", ok, f"derangements {tops}")


def test_criterion_02_vic_h3(capsys):
    z_tier = suite("h3", category="vic:zmod:2", n_min=1, n_max=4, i_max=0, tier="Z")
    field = suite("h3", category="vic:zmod:2", n_min=5, n_max=5, i_max=1, tier="field", primes=(2, 3, 5))
    f3 = suite("h3", category="vic:zmod:3", n_min=1, n_max=3, tier="Z")
    ok = all_pass(z_tier) and all_pass(field) and all_pass(f3)
    report(capsys, 2, "H3 for VIC over F_2 (Z tier n <= 4, field tier n = 5) and F_3 (n <= 3)", ok,
           f"F_2 Z: {statuses(z_tier)}; F_2 field: {statuses(field)}; F_3: {statuses(f3)}")


def test_criterion_03_partial_basis_connectivity(capsys):
    recs = suite("connectivity", category="vic:zmod:2", n_min=1, n_max=4, genus_max=0, lazy_genus=0)
    pairs = sum(r.computed["pairs"] for r in recs)
    report(capsys, 3, "PB(U,W) vanishing range for all splittable pairs in F_2^n, n <= 4", all_pass(recs),
           f"{pairs} pairs checked")


def test_criterion_04_wcm_and_join(capsys):
    wcm = suite("wcm", category="vic:zmod:2", n_min=3, n_max=3)
    join = suite("join", category="vic:zmod:2", n_min=1, n_max=3)
    report(capsys, 4, "PB(F_2^3) wCM of dimension 2; PBC -> PB join complex for all pairs in F_2^3",
           all_pass(wcm) and all_pass(join), f"wcm: {statuses(wcm)}; join: {statuses(join)}")


def test_criterion_05_symplectic(capsys):
    recs = suite("connectivity", category="si:zmod:2", n_min=0, n_max=0, genus_max=3, lazy_genus=4)
    counts = [r.computed["count"] for r in recs[:3]]
    ok = all_pass(recs) and counts == [6, 120, 2016] and recs[-1].computed["status"] == "connected"
    report(capsys, 5, "SPB vertex counts 6/120/2016; genus 4 nonempty and connected", ok,
           f"counts {counts}, genus 4 {recs[-1].computed['status']}")


def test_criterion_06_putman_sam(capsys):
    z2 = suite("csd", builtin="putman-sam:zmod:2", n_max=4)
    z3 = suite("csd", builtin="putman-sam:zmod:3", n_max=4)
    at4 = next(r for r in z2 if r.claim.endswith("at n = 4"))
    ok = at4.computed["status"] == "iso" and z2[-1].status == "pass"
    # over Z/3 the rank-4 level exceeds the enumeration cap; it must be reported, not hidden
    z3_ok = z3[-1].status in ("pass", "skipped")
    report(capsys, 6, "Putman-Sam over Z/2: coequalizer iso at n = 4, degree <= 3 on window", ok and z3_ok,
           f"Z/2 window {z2[-1].computed}; Z/3 {z3[-1].status}")


def test_criterion_07_free_fi_polynomial_degree(capsys):
    recs = suite("polydeg", category="fi", free=3, n_max=6)
    report(capsys, 7, "M(m) over FI: polynomial degree <= m, ker = 0, coker = M(m-1)^m, m <= 3, n <= 6",
           all_pass(recs) and len(recs) == 7, statuses(recs))


def test_criterion_08_h4(capsys):
    fi = suite("h4", category="fi", m_max=2, n_max=6)
    vic = suite("h4", category="vic:zmod:2", m_max=1, n_max=4, i_max=0)
    report(capsys, 8, "H4 for coker M(m): FI m <= 2, n <= 6; VIC(F_2) m <= 1, n <= 4", all_pass(fi) and all_pass(vic),
           f"{len(fi)} FI and {len(vic)} VIC checks")


def test_criterion_09_ia_inputs(capsys):
    A = sm.builtin("h1ia-fi", 6)
    ranks = [A.rank(n) for n in range(7)]
    ranks_ok = all(ranks[n] == n * n * (n - 1) // 2 == 2 * math.comb(n, 2) + 3 * math.comb(n, 3) for n in range(7))
    h1ia = suite("polydeg", builtin="h1ia-fi", n_max=7)
    adjoint = suite("polydeg", builtin="adjoint:zmod:2", n_max=6)
    report(capsys, 9, "h1ia-fi ranks n^2(n-1)/2 and degree <= 3; adjoint:zmod:2 degree <= 2",
           ranks_ok and all_pass(h1ia) and all_pass(adjoint), f"ranks {ranks}")


def _constructed_complexes():
    fi, vic2, vic3 = (cg.CategoryId.parse(s) for s in ("fi", "vic:zmod:2", "vic:zmod:3"))
    for n in range(1, 6):
        yield cx.build_K(fi, n)
    for n in range(1, 4):
        yield cx.build_K(vic2, n)
    for n in range(1, 3):
        yield cx.build_K(vic3, n)
    for q, n in ((2, 3), (3, 2), (4, 2)):
        V = rg.Submodule.full(q, n)
        for U, W in cli._splittable_pairs(q, n):
            yield cx.build_pb(U, W, ambient=V)
            yield cx.build_pbc(V, U, W)
    yield cx.build_spb(rg.SymplecticSpace(1, 2))
    yield cx.build_spb(rg.SymplecticSpace(2, 2), max_dim=1)


def _module_complexes():
    for spec, m, N in (("fi", 1, 4), ("fi", 2, 4), ("vic:zmod:2", 1, 3)):
        A = sm.PermutationModule(cg.CategoryId.parse(spec), m, N)
        for n in range(1, N + 1):
            yield sm.central_stability_complex(A, n)
    A = sm.builtin("h1ia-fi", 4)
    for n in range(1, 5):
        yield sm.central_stability_complex(A, n)


def test_criterion_10_infrastructure(capsys):
    complexes = list(_constructed_complexes())
    d2 = all(X.check_simplicial_identities() and hm.chain_complex_of(X, check=False).check_d_squared()
             for X in complexes)
    d2 = d2 and all(C.check_d_squared() for C in _module_complexes())

    rnd = random.Random(10)
    howell_ok = True
    for _ in range(1000):
        m, n = rnd.randint(2, 8), rnd.randint(1, 4)
        rows = [[rnd.randrange(m) for _ in range(n)] for _ in range(rnd.randint(0, 4))]
        S = rg.Submodule.span(rows, m, n)
        oracle = brute_span(rows, m, n)
        # canonical: the same span from its own elements in shuffled order gives the same form
        elems = sorted(oracle)
        rnd.shuffle(elems)
        howell_ok &= set(S.elements()) == oracle
        howell_ok &= rg.Submodule.span(elems, m, n).howell == S.howell

    laws_ok = True
    try:
        for p in (2, 3):
            L = Lattice(rg.enumerate_submodules(p, 3))
            k = len(L.subs)
            check_laws(L, ((a, b, c) for a in range(k) for b in range(k) for c in range(k)))
        L = Lattice(rg.enumerate_submodules(4, 3))
        k = len(L.subs)
        check_laws(L, [(rnd.randrange(k), rnd.randrange(k), rnd.randrange(k)) for _ in range(4000)])
    except AssertionError:
        laws_ok = False
    report(capsys, 10, "d^2 = 0 on all built complexes; Howell canonical on 1000 instances; lattice laws",
           d2 and howell_ok and laws_ok, f"{len(complexes)} complexes, d2 {d2}, howell {howell_ok}, laws {laws_ok}")


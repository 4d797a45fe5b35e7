"""Command line runner: acceptance suites and one-off complex/module builds.

Every run produces a report of records ``{claim, anchor, computed, status,
tier}``. ``status`` is ``pass`` or ``fail`` for asserted checks, ``measured``
for values printed without an expected result, and ``skipped`` when a cap was
hit. The exit code is 1 iff some record failed.
"""

from __future__ import annotations

import argparse
import itertools
import json
import math
import sys
import time
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

from . import __version__
from . import category as cg
from . import complexes as cx
from . import homology as hm
from . import ring as rg
from . import stabmod as sm

SCHEMA = "stabhom-report/1"
SUITES = ("h3", "h4", "connectivity", "csd", "polydeg", "wcm", "join")
CAPS = (cg.CapExceeded, hm.BudgetExceeded)

# Anchors state the claim each check tests; they are plain-language statements.
ANCHOR_H3_FI = "the complex of injective words on n letters is (n-2)-connected (H3 with k = a = 1 for FI)"
ANCHOR_H3_VIC = ("the complex of partial bases with complements of V is ((rk V - s - 2)/2)-connected "
                 "(H3 with k = 2, a = s + 1 for VIC over a ring of stable rank s)")
ANCHOR_H4_FI = "H~_i(coker M(m))_n = 0 for n > i + m + 1 over FI (H4 with l = b = 1)"
ANCHOR_H4_VIC = "H~_i(coker M(m))_n = 0 for n > 2(i + m) + s + 1 over VIC (H4 with l = 2, b = s + 1)"
ANCHOR_PB = "PB(U, W) is (rk U - rk W - 1 - s)-connected for splittable W in U (van der Kallen)"
ANCHOR_WCM = "PB(U, W) is weakly Cohen-Macaulay of dimension rk U - rk W - s"
ANCHOR_JOIN = "forgetting complements PBC(V, U, W) -> PB(U, W) exhibits a join complex"
ANCHOR_SPB_COUNT = "hyperbolic pairs in F_q^{2g} number (q^{2g} - 1) q^{2g-1}"
ANCHOR_SPB_CONN = "SPB(V) is ((n - s - 3)/2)-connected for V of genus n (Mirzaii-van der Kallen)"
ANCHOR_CSD = "the Putman-Sam module has central stability degree 3"
ANCHOR_POLY_FREE = "a free module M(W) generated in rank m has polynomial degree <= m"
ANCHOR_COKER_FREE = "over FI, ker M(m) = 0 and coker M(m) is isomorphic to M(m-1)^{+m}"
ANCHOR_POLY_H1IA = "H_1(IA_n) = Lambda^2 M(1) (x) M(1) has polynomial degree <= 3"
ANCHOR_DERIVED = "derived: no published value; computed for comparison"

# Known polynomial degree bounds for builtins.
POLY_BOUNDS = {"h1ia-fi": (3, ANCHOR_POLY_H1IA), "johnson-fi": (3, ANCHOR_DERIVED)}


@dataclass
class Record:
    claim: str
    anchor: str
    computed: Any
    status: str
    tier: str = ""
    runtime: Optional[float] = None

    def to_json(self, timings: bool) -> Dict[str, Any]:
        out = {"claim": self.claim, "anchor": self.anchor, "computed": self.computed,
               "status": self.status, "tier": self.tier}
        if timings and self.runtime is not None:
            out["runtime"] = round(self.runtime, 3)
        return out


@dataclass
class Report:
    command: str
    inputs: Dict[str, Any]
    records: List[Record] = field(default_factory=list)

    @property
    def failed(self) -> bool:
        return any(r.status == "fail" for r in self.records)

    def to_json(self, timings: bool = False) -> Dict[str, Any]:
        return {"schema": SCHEMA, "tool_version": __version__, "command": self.command,
                "input": self.inputs, "records": [r.to_json(timings) for r in self.records],
                "failed": self.failed}

    def table(self, timings: bool = False) -> str:
        rows = [("status", "tier", "claim", "computed")]
        for r in self.records:
            comp = json.dumps(r.computed, sort_keys=True)
            if len(comp) > 70:
                comp = comp[:67] + "..."
            rows.append((r.status, r.tier, r.claim + (f" [{r.runtime:.2f}s]" if timings and r.runtime else ""),
                         comp))
        widths = [max(len(row[i]) for row in rows) for i in range(3)]
        lines = ["  ".join(row[i].ljust(widths[i]) for i in range(3)) + "  " + row[3] for row in rows]
        passed = sum(r.status == "pass" for r in self.records)
        failed = sum(r.status == "fail" for r in self.records)
        skipped = sum(r.status == "skipped" for r in self.records)
        lines.append(f"{passed} passed, {failed} failed, {skipped} skipped, "
                     f"{len(self.records) - passed - failed - skipped} measured")
        return "\n".join(lines)


@dataclass
class SuiteSpec:
    """Parameters of a suite run."""

    suite: str
    category: str = "fi"
    n_min: int = 1
    n_max: int = 4
    m_max: int = 1
    i_max: Optional[int] = None
    genus_max: int = 3
    lazy_genus: int = 4
    builtin: Optional[str] = None
    free: Optional[int] = None
    tier: str = "auto"
    primes: Tuple[int, ...] = hm.FIELD_PRIMES

    def validate(self) -> None:
        if self.suite not in SUITES:
            raise ValueError(f"unknown suite {self.suite!r}; known: {', '.join(SUITES)}")
        if self.tier not in ("auto", "Z", "field"):
            raise ValueError("tier must be auto, Z or field")
        if self.n_min < 0 or self.n_max < self.n_min:
            raise ValueError("need 0 <= n_min <= n_max")
        cg.CategoryId.parse(self.category)


def _timed(fn: Callable[[], Record]) -> Record:
    t = time.perf_counter()
    try:
        rec = fn()
    except CAPS as exc:
        rec = Record(str(exc), "", None, "skipped")
    rec.runtime = time.perf_counter() - t
    return rec


def _verdict(ok: bool) -> str:
    return "pass" if ok else "fail"


def _homology(C: hm.ChainComplex, degrees: Sequence[int], tier: str,
              primes: Sequence[int]) -> List[hm.HomologyResult]:
    if tier == "field":
        if C.characteristic:
            return [hm.reduced_homology(C, degrees, C.characteristic)]
        return [hm.reduced_homology(C, degrees, p) for p in primes]
    return hm.homology_by_policy(C, degrees, tier, primes)


def _tier_of(results: Sequence[hm.HomologyResult]) -> str:
    return ",".join(r.coefficient for r in results)


def _homology_json(results: Sequence[hm.HomologyResult]) -> Any:
    return [r.to_json() for r in results]


def _stable_rank_bound(cat: cg.CategoryId) -> Tuple[int, int]:
    """``(k, a)`` of the H3/H4 ranges: (1, 1) for FI, (2, s + 1) with s = 1 otherwise."""
    return (1, 1) if cat.kind == "fi" else (2, 2)


def derangements(n: int) -> int:
    """Number of fixed-point-free permutations, by enumeration."""
    return sum(all(p[i] != i for i in range(n)) for p in itertools.permutations(range(n)))


# --------------------------------------------------------------------------
# suites


def suite_h3(spec: SuiteSpec) -> List[Record]:
    cat = cg.CategoryId.parse(spec.category)
    k, a = _stable_rank_bound(cat)
    anchor = ANCHOR_H3_FI if cat.kind == "fi" else ANCHOR_H3_VIC
    out = []
    for n in range(max(spec.n_min, 1), spec.n_max + 1):
        degrees = [i for i in range(-1, n) if n > k * i + a]
        if spec.i_max is not None:
            degrees = [i for i in degrees if i <= spec.i_max]
        want_top = cat.kind == "fi"
        if not degrees and not want_top:
            continue

        def run(n=n, degrees=degrees, want_top=want_top) -> Record:
            top = max(degrees + ([n - 1] if want_top else []))
            C = hm.chain_complex_of(cx.build_K(cat, n, max_dim=top + 1))
            results = _homology(C, sorted(set(degrees + ([n - 1] if want_top else []))), spec.tier, spec.primes)
            ok = all(r.vanishes(degrees) for r in results)
            computed: Dict[str, Any] = {"homology": _homology_json(results)}
            if want_top:
                computed["top_rank"] = results[0].betti(n - 1)
                computed["derangements"] = derangements(n)
                ok = ok and results[0].betti(n - 1) == derangements(n)
            claim = f"H~_i(K({n})) = 0 for i in {degrees} over {cat.spec}"
            if want_top:
                claim += f"; rank H~_{n - 1} = derangements({n})"
            return Record(claim, anchor, computed, _verdict(ok), _tier_of(results))

        out.append(_timed(run))
    return out


def suite_h4(spec: SuiteSpec) -> List[Record]:
    cat = cg.CategoryId.parse(spec.category)
    k, a = _stable_rank_bound(cat)
    anchor = ANCHOR_H4_FI if cat.kind == "fi" else ANCHOR_H4_VIC
    out = []
    for m in range(0, spec.m_max + 1):
        _, coker = sm.kernel_coker(sm.PermutationModule(cat, m, spec.n_max + 1))
        for n in range(max(spec.n_min, 1), spec.n_max + 1):
            degrees = [i for i in range(-1, n) if n > k * (i + m) + a]
            if spec.i_max is not None:
                degrees = [i for i in degrees if i <= spec.i_max]
            if not degrees:
                continue

            def run(m=m, n=n, degrees=degrees) -> Record:
                results = _homology(sm.central_stability_complex(coker, n, max_i=max(degrees)),
                                    degrees, spec.tier, spec.primes)
                ok = all(r.vanishes(degrees) for r in results)
                claim = f"H~_i(coker M({m}))_{n} = 0 for i in {degrees} over {cat.spec}"
                return Record(claim, anchor, {"homology": _homology_json(results)}, _verdict(ok),
                              _tier_of(results))

            out.append(_timed(run))
    return out


def _splittable_pairs(m: int, n: int) -> List[Tuple[rg.Submodule, rg.Submodule]]:
    subs = rg.enumerate_submodules(m, n, splittable_only=True)
    return [(U, W) for U in subs for W in subs if W <= U]


def suite_connectivity(spec: SuiteSpec) -> List[Record]:
    cat = cg.CategoryId.parse(spec.category)
    q = 2 if cat.kind == "fi" else cat.modulus
    s = 1
    out = []
    for n in range(max(spec.n_min, 1), spec.n_max + 1):
        def run(n=n) -> Record:
            V = rg.Submodule.full(q, n)
            failures = []
            pairs = _splittable_pairs(q, n)
            for U, W in pairs:
                top = U.rank_free - W.rank_free - 1 - s
                if top < -1:
                    continue
                C = hm.chain_complex_of(cx.build_pb(U, W, ambient=V, max_dim=top + 1))
                res = hm.reduced_homology(C, range(-1, top + 1))
                if not res.vanishes():
                    failures.append({"U": [list(r) for r in U.howell], "W": [list(r) for r in W.howell]})
            return Record(f"H~_i(PB(U,W)) = 0 for i <= rk U - rk W - 2, all splittable W <= U in (Z/{q})^{n}",
                          ANCHOR_PB, {"pairs": len(pairs), "failures": failures}, _verdict(not failures), "Z")

        out.append(_timed(run))
    if q == 2 or rg._is_prime(q):
        for g in range(1, spec.genus_max + 1):
            def run_count(g=g) -> Record:
                count = len(cx.hyperbolic_pairs(rg.SymplecticSpace(g, q)))
                expected = (q ** (2 * g) - 1) * q ** (2 * g - 1)
                return Record(f"SPB vertices of genus {g} over F_{q}", ANCHOR_SPB_COUNT,
                              {"count": count, "expected": expected}, _verdict(count == expected))

            out.append(_timed(run_count))
        if spec.lazy_genus:
            g = spec.lazy_genus

            def run_conn() -> Record:
                X = cx.build_spb(rg.SymplecticSpace(g, q), lazy_edges=True)
                status = hm.zero_connectivity(X)
                bound = (g - s - 3) / 2
                verdict = _verdict(status == "connected") if bound >= 0 else "measured"
                return Record(f"SPB of genus {g} over F_{q} is nonempty and connected", ANCHOR_SPB_CONN,
                              {"status": status, "vertices": X.size(0), "bound": bound}, verdict, "union-find")

            out.append(_timed(run_conn))
    return out


def suite_wcm(spec: SuiteSpec) -> List[Record]:
    cat = cg.CategoryId.parse(spec.category)
    q = 2 if cat.kind == "fi" else cat.modulus
    out = []
    for n in range(max(spec.n_min, 1), spec.n_max + 1):
        def run(n=n) -> Record:
            V = rg.Submodule.full(q, n)
            X = cx.underlying_complex(cx.build_pb(V, rg.Submodule.zero(q, n)))
            dim = n - 1
            rep = cx.wcm_check(X, dim)
            above = cx.wcm_check(X, dim + 1).passed
            computed = {"dimension": dim, "global": rep.global_ok, "links_checked": rep.links_checked,
                        "failures": len(rep.failures), "passes_dimension_plus_one": above}
            return Record(f"PB((Z/{q})^{n}) is wCM of dimension {dim} (homology surrogate)", ANCHOR_WCM,
                          computed, _verdict(rep.passed), "Z")

        out.append(_timed(run))
    return out


def suite_join(spec: SuiteSpec) -> List[Record]:
    cat = cg.CategoryId.parse(spec.category)
    q = 2 if cat.kind == "fi" else cat.modulus
    out = []
    for n in range(max(spec.n_min, 1), spec.n_max + 1):
        def run(n=n) -> Record:
            V = rg.Submodule.full(q, n)
            pairs = _splittable_pairs(q, n)
            failures = []
            for U, W in pairs:
                Y = cx.underlying_complex(cx.build_pbc(V, U, W))
                X = cx.underlying_complex(cx.build_pb(U, W, ambient=V))
                index = {v: i for i, v in enumerate(X.vertices)}
                if any(y.v not in index for y in Y.vertices):
                    failures.append({"U": [list(r) for r in U.howell], "reason": "vertex outside PB(U,W)"})
                    continue
                rep = cx.is_join_complex(Y, X, [index[y.v] for y in Y.vertices])
                if not rep.is_join:
                    failures.append({"U": [list(r) for r in U.howell], "W": [list(r) for r in W.howell],
                                     "reason": rep.reason})
            return Record(f"PBC(V,U,W) -> PB(U,W) is a join complex for all splittable W <= U in (Z/{q})^{n}",
                          ANCHOR_JOIN, {"pairs": len(pairs), "failures": failures}, _verdict(not failures))

        out.append(_timed(run))
    return out


def _suite_module(spec: SuiteSpec, max_rank: int) -> sm.StabilityModule:
    if spec.builtin:
        return sm.builtin(spec.builtin, max_rank)
    if spec.free is not None:
        return sm.PermutationModule(cg.CategoryId.parse(spec.category), spec.free, max_rank)
    raise ValueError("this suite needs --builtin or --free")


def suite_csd(spec: SuiteSpec) -> List[Record]:
    A = _suite_module(spec, spec.n_max)
    out: List[Record] = []
    rep = sm.coequalizer_csd(A, spec.n_max)
    for lv in rep.levels:
        status = "skipped" if lv.status == "skipped" else "measured"
        out.append(Record(f"coequalizer map of {A.name} at n = {lv.n}", ANCHOR_DERIVED, lv.to_json(), status))
    expected = 3 if A.name.startswith("putman-sam") else None
    window = {"degree": rep.degree, "window_top": rep.window_top}
    if expected is None:
        out.append(Record(f"central stability degree of {A.name}", ANCHOR_DERIVED, window, "measured"))
    elif rep.window_top <= expected:
        out.append(Record(f"central stability degree of {A.name} <= {expected}", ANCHOR_CSD, window, "skipped"))
    else:
        ok = all(lv.status == "iso" for lv in rep.levels if expected < lv.n <= rep.window_top)
        out.append(Record(f"coequalizer map of {A.name} is an isomorphism for {expected} < n <= {rep.window_top}",
                          ANCHOR_CSD, window, _verdict(ok)))
    return out


def suite_polydeg(spec: SuiteSpec) -> List[Record]:
    out: List[Record] = []
    if spec.free is not None and not spec.builtin:
        cat = cg.CategoryId.parse(spec.category)
        for m in range(0, spec.free + 1):
            N = spec.n_max + m + 1

            def run(m=m, N=N) -> Record:
                A = sm.PermutationModule(cat, m, N)
                rep = sm.polynomial_degree(A)
                return Record(f"M({m}) over {cat.spec} has polynomial degree <= {m}", ANCHOR_POLY_FREE,
                              rep.to_json(), _verdict(rep.bound_at_most(m)))

            out.append(_timed(run))
            if cat.kind == "fi" and m >= 1:
                def run_coker(m=m) -> Record:
                    A = sm.PermutationModule(cat, m, spec.n_max + 1)
                    ker, coker = sm.kernel_coker(A)
                    B = sm.DirectSum([sm.PermutationModule(cat, m - 1, spec.n_max)] * m)
                    kernel_zero = all(sm.kernel_is_zero(A, n) for n in range(spec.n_max + 1))
                    levels = [(coker.group(n).describe(), B.group(n).describe()) for n in range(spec.n_max + 1)]
                    ok = kernel_zero and all(coker.group(n).isomorphic(B.group(n)) for n in range(spec.n_max + 1))
                    return Record(f"ker M({m}) = 0 and coker M({m}) = M({m - 1})^{m} levelwise for n <= {spec.n_max}",
                                  ANCHOR_COKER_FREE, {"kernel_zero": kernel_zero, "levels": levels}, _verdict(ok))

                out.append(_timed(run_coker))
        return out
    A = _suite_module(spec, spec.n_max)
    bound, anchor = POLY_BOUNDS.get(spec.builtin or "", (None, ANCHOR_DERIVED))
    if spec.builtin and spec.builtin.startswith("adjoint"):
        bound = 2

    def run_builtin() -> Record:
        rep = sm.polynomial_degree(A)
        if bound is None:
            return Record(f"polynomial degree of {A.name}", anchor, rep.to_json(), "measured")
        return Record(f"{A.name} has polynomial degree <= {bound} on its window", anchor, rep.to_json(),
                      _verdict(rep.bound_at_most(bound)))

    out.append(_timed(run_builtin))
    return out


SUITE_RUNNERS = {"h3": suite_h3, "h4": suite_h4, "connectivity": suite_connectivity, "csd": suite_csd,
                 "polydeg": suite_polydeg, "wcm": suite_wcm, "join": suite_join}


def run_suite(spec: SuiteSpec) -> Report:
    """Run the named suite and collect its records."""
    spec.validate()
    inputs = {k: (list(v) if isinstance(v, tuple) else v) for k, v in vars(spec).items()}
    return Report(f"suite {spec.suite}", inputs, SUITE_RUNNERS[spec.suite](spec))


# --------------------------------------------------------------------------
# one-off builds


def parse_degrees(text: Optional[str], default: Sequence[int]) -> List[int]:
    """``"a..b"`` or a comma list; ``None`` gives ``default``."""
    if not text:
        return list(default)
    if ".." in text:
        lo, hi = text.split("..")
        return list(range(int(lo), int(hi) + 1))
    return sorted({int(x) for x in text.split(",")})


def _submodule(text: Optional[str], m: int, N: int, default: rg.Submodule) -> rg.Submodule:
    if text is None:
        return default
    rows = json.loads(text)
    if not isinstance(rows, list) or any(len(r) != N for r in rows):
        raise ValueError(f"expected a JSON list of length-{N} rows, got {text!r}")
    return rg.Submodule.span([tuple(int(x) % m for x in r) for r in rows], m, N)


def build_complex(args: argparse.Namespace) -> cx.SemisimplicialSet:
    cat = cg.CategoryId.parse(args.cat)
    if args.kind == "k":
        n = args.genus if cat.kind == "si" and args.genus is not None else args.n
        if n is None:
            raise ValueError("--n (or --genus for si) is required")
        return cx.build_K(cat, n, max_dim=args.max_dim)
    q = 2 if cat.kind == "fi" else cat.modulus
    if args.kind == "spb":
        if args.genus is None:
            raise ValueError("--genus is required for spb")
        space = rg.SymplecticSpace(args.genus, q)
        W = _submodule(args.w, q, space.dim, None) if args.w else None
        lazy = args.zero_conn and not args.homology
        return cx.build_spb(space, W, max_dim=args.max_dim, lazy_edges=lazy)
    if args.n is None:
        raise ValueError("--n is required")
    V = _submodule(args.v, q, args.n, rg.Submodule.full(q, args.n))
    U = _submodule(args.u, q, args.n, V)
    W = _submodule(args.w, q, args.n, rg.Submodule.zero(q, args.n))
    if args.kind == "pb":
        return cx.build_pb(U, W, ambient=V, max_dim=args.max_dim)
    return cx.build_pbc(V, U, W, max_dim=args.max_dim)


def complex_cmd(args: argparse.Namespace) -> Report:
    X = build_complex(args)
    inputs = {k: getattr(args, k) for k in ("cat", "n", "genus", "kind", "u", "v", "w", "degrees", "tier",
                                            "max_dim", "homology", "zero_conn")}
    report = Report("complex", inputs)
    report.records.append(Record(f"f-vector of {X.name}", ANCHOR_DERIVED, X.f_vector(), "measured"))
    if args.zero_conn:
        report.records.append(_timed(lambda: Record(f"0-connectivity of {X.name}", ANCHOR_DERIVED,
                                                    hm.zero_connectivity(X), "measured", "union-find")))
    if args.homology:
        degrees = parse_degrees(args.degrees, range(-1, X.dim + 1))

        def run() -> Record:
            C = hm.chain_complex_of(X)
            results = _homology(C, degrees, args.tier, hm.FIELD_PRIMES)
            return Record(f"reduced homology of {X.name}", ANCHOR_DERIVED, _homology_json(results), "measured",
                          _tier_of(results))

        report.records.append(_timed(run))
    return report


def module_cmd(args: argparse.Namespace) -> Report:
    A = sm.builtin(args.builtin, args.max_rank)
    inputs = {k: getattr(args, k) for k in ("builtin", "max_rank", "polydeg", "csd", "homology", "n",
                                            "degrees", "tier")}
    report = Report("module", inputs)
    ranks = [A.group(n).describe() for n in range(A.max_rank + 1)]
    report.records.append(Record(f"levels of {A.name}", ANCHOR_DERIVED, ranks, "measured"))
    if args.polydeg:
        report.records.append(_timed(lambda: Record(f"polynomial degree of {A.name}", ANCHOR_DERIVED,
                                                    sm.polynomial_degree(A).to_json(), "measured")))
    if args.csd:
        report.records.append(_timed(lambda: Record(f"central stability degree of {A.name}", ANCHOR_DERIVED,
                                                    sm.coequalizer_csd(A).to_json(), "measured")))
    if args.homology:
        ns = [args.n] if args.n is not None else list(range(1, A.max_rank + 1))
        for n in ns:
            degrees = [i for i in parse_degrees(args.degrees, range(-1, n)) if i <= n - 1]

            def run(n=n, degrees=degrees) -> Record:
                results = _homology(sm.central_stability_complex(A, n, max_i=max(degrees)), degrees,
                                    args.tier, hm.FIELD_PRIMES)
                return Record(f"central stability homology of {A.name} at n = {n}", ANCHOR_DERIVED,
                              _homology_json(results), "measured", _tier_of(results))

            report.records.append(_timed(run))
    return report


# --------------------------------------------------------------------------
# entry point


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="stabhom", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"stabhom {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(q: argparse.ArgumentParser) -> None:
        q.add_argument("--out", help="write the JSON report here")
        q.add_argument("--timings", action="store_true", help="include runtimes (breaks byte-identity)")
        q.add_argument("--json", action="store_true", help="print JSON instead of the table")
        q.add_argument("--tier", default="auto", choices=("auto", "Z", "field"))

    s = sub.add_parser("suite", help="run an acceptance suite")
    s.add_argument("name", choices=SUITES)
    s.add_argument("--cat", default="fi")
    s.add_argument("--n-min", type=int, default=1)
    s.add_argument("--n-max", type=int, default=4)
    s.add_argument("--m-max", type=int, default=1)
    s.add_argument("--i-max", type=int)
    s.add_argument("--genus-max", type=int, default=3)
    s.add_argument("--lazy-genus", type=int, default=4, help="0 disables the large-genus connectivity check")
    s.add_argument("--builtin")
    s.add_argument("--free", type=int, help="free module M(m) (polydeg: all m' <= m)")
    s.add_argument("--primes", default="2,3,5")
    common(s)

    c = sub.add_parser("complex", help="build one complex")
    c.add_argument("--cat", required=True)
    c.add_argument("--n", type=int)
    c.add_argument("--genus", type=int)
    c.add_argument("--kind", choices=("k", "pb", "pbc", "spb"), default="k")
    c.add_argument("--u", help="rows spanning U as JSON")
    c.add_argument("--v", help="rows spanning V as JSON")
    c.add_argument("--w", help="rows spanning W as JSON")
    c.add_argument("--degrees", help="'a..b' or comma list")
    c.add_argument("--max-dim", type=int)
    c.add_argument("--homology", action="store_true")
    c.add_argument("--zero-conn", action="store_true")
    common(c)

    m = sub.add_parser("module", help="evaluate one builtin module")
    m.add_argument("--builtin", required=True)
    m.add_argument("--max-rank", type=int, default=5)
    m.add_argument("--polydeg", action="store_true")
    m.add_argument("--csd", action="store_true")
    m.add_argument("--homology", action="store_true")
    m.add_argument("--n", type=int)
    m.add_argument("--degrees")
    common(m)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "suite":
            spec = SuiteSpec(args.name, args.cat, args.n_min, args.n_max, args.m_max, args.i_max,
                             args.genus_max, args.lazy_genus, args.builtin, args.free, args.tier,
                             tuple(int(x) for x in args.primes.split(",")))
            report = run_suite(spec)
        elif args.command == "complex":
            report = complex_cmd(args)
        else:
            report = module_cmd(args)
    except ValueError as exc:
        parser.exit(2, f"stabhom: error: {exc}\n")
    text = json.dumps(report.to_json(args.timings), indent=2, sort_keys=True)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    print(text if args.json else report.table(args.timings))
    return 1 if report.failed else 0


if __name__ == "__main__":
    sys.exit(main())

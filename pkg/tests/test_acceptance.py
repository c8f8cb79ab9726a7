"""Acceptance suite: one test and one printed pass/fail line per criterion."""

from __future__ import annotations

import time

import gmpy2
import pytest

from gpalab import bigraph, gpa, scalars, twod2
from gpalab import conn4442 as conn
from gpalab import generator as gen_mod

TIMINGS: dict[str, float] = {}


def _timed(key):
    class _Timer:
        def __enter__(self):
            self.t0 = time.time()
            return self

        def __exit__(self, *exc):
            TIMINGS[key] = time.time() - self.t0

    return _Timer()


def _line(num: int, name: str, passed: bool, detail: str = "") -> None:
    flag = "PASS" if passed else "FAIL"
    suffix = f" ({detail})" if detail else ""
    print(f"criterion {num:02d} {name}: {flag}{suffix}")
    assert passed, f"criterion {num} ({name}) failed{suffix}"


def _report_ok(rep) -> tuple[bool, str]:
    if rep.passed:
        worst = max((r.residual for r in rep.records), default=gmpy2.mpfr(0))
        return True, f"{len(rep.records)} checks, worst {scalars.decimal_str(worst, 3)}"
    bad = "; ".join(r.name for r in rep.failures())
    return False, f"failing: {bad}"


@pytest.fixture(scope="module")
def sys_one():
    with _timed("build"):
        return twod2.build_relation_system()


@pytest.fixture(scope="module")
def neg_one(sys_one):
    with _timed("build-negated"):
        return twod2.negated_system(sys_one)


def test_01_codec_round_trip():
    t0 = time.time()
    codes = [
        "bwd1duals1",
        bigraph.TWOD2_CODE,
        bigraph.TWOD2_DUAL_CODE,
        bigraph.TWOD2_REJECTED_CODE,
        bigraph.CONN_4442_CODE,
    ]
    ok = all(bigraph.encode_bigraph(bigraph.parse_bigraph(c)) == c for c in codes)
    g = bigraph.twod2_graph()
    ok = ok and g.num_vertices == 8 and len(g.edges) == 8
    ok = ok and g.depth_sizes == (1, 1, 1, 2, 1, 1, 1)
    elapsed = time.time() - t0
    _line(1, "codec", ok and elapsed < 1.0, f"{elapsed:.2f}s")


def test_02_pf_norm():
    t0 = time.time()
    pf = bigraph.perron_frobenius(bigraph.twod2_graph())
    resid = abs(pf.norm ** 2 - (3 + scalars.sqrt_pos(5)))
    elapsed = time.time() - t0
    _line(2, "pf-norm", resid < gmpy2.mpfr(10) ** -30 and elapsed < 1.0,
          f"residual {scalars.decimal_str(resid, 3)}, {elapsed:.2f}s")


def test_03_jones_wenzl():
    t0 = time.time()
    graph = bigraph.twod2_graph()
    ctx = scalars.default_quantum_context()
    tol = gmpy2.mpfr(10) ** -30
    worst = gmpy2.mpfr(0)
    for n in range(1, 6):
        f = gpa.jones_wenzl(n, graph, 0)
        worst = max(worst, (f * f - f).norm())
        worst = max(worst, abs(f.trace() - ctx.quantum_integer(n + 1)))
        for pos in range(1, 2 * n + 1):
            if pos in (n, 2 * n):
                continue
            worst = max(worst, gpa.cap(f, pos).norm())
    elapsed = time.time() - t0
    _line(3, "jones-wenzl", worst < tol and elapsed < 30.0,
          f"worst residual {scalars.decimal_str(worst, 3)}, {elapsed:.1f}s")


def test_04_generator(sys_one):
    t0 = time.time()
    residuals = gen_mod.check_generator(sys_one.generator)
    tol40 = gmpy2.mpfr(10) ** -40
    tol30 = gmpy2.mpfr(10) ** -30
    ok = all(
        residuals[k] < tol40
        for k in ("self_adjoint", "rotation", "cappings", "square",
                  "rotated_square", "tl_overlap")
    )
    ok = ok and residuals["table"] < tol30
    check_resid = (gpa.fourier(sys_one.t) - sys_one.t_check).norm()
    ok = ok and check_resid < tol30
    elapsed = time.time() - t0
    _line(4, "generator", ok and elapsed < 60.0, f"{elapsed:.1f}s")


def test_05_rotational_eigenvalue():
    with _timed("eigenvalue-scan"):
        scan = gen_mod.eigenvalue_scan(seed=0, num_starts=500)
        ok = all(
            d["min_residual"] > 1e-6 and not d["solutions_found"]
            for d in scan.values()
        )
        control = gen_mod.eigenvalue_scan(
            candidates=[("one", gmpy2.mpc(1))], seed=0, num_starts=25
        )
        ok = ok and control["one"]["solutions_found"]
    elapsed = TIMINGS["eigenvalue-scan"]
    _line(5, "rotational-eigenvalue", ok and elapsed < 600.0, f"{elapsed:.0f}s")


def test_06_two_families():
    with _timed("families"):
        scan = gen_mod.solve_families(seed=0, num_starts=200)
        tol = gmpy2.mpfr(10) ** -20
        ok = len(scan.solutions) >= 20
        ok = ok and all(s.match_residual < tol for s in scan.solutions)
        ok = ok and all(s.tangent_dim == 1 for s in scan.solutions)
        ok = ok and {s.sign for s in scan.solutions} == {1, -1}
    elapsed = TIMINGS["families"]
    _line(6, "two-families", ok and elapsed < 600.0,
          f"{len(scan.solutions)} solutions, {elapsed:.0f}s")


def test_07_printed_traces(sys_one):
    tol = gmpy2.mpfr(10) ** -30
    r5 = scalars.sqrt_pos(5)
    pairs = [
        (sys_one.e3_plus[0], scalars.sqrt_pos(7 + 3 * r5)),
        (sys_one.s4_plus[0], 2 + r5),
        (sys_one.s4_minus[0], (1 + r5) / 2),
        (sys_one.s4_minus[1], (3 + r5) / 2),
        (sys_one.s5_plus[0], scalars.sqrt_pos(3 + r5)),
        (sys_one.s6_plus[0], gmpy2.mpfr(1)),
    ]
    worst = max(abs(el.trace() - want) for el, want in pairs)
    _line(7, "printed-traces", worst < tol,
          f"worst {scalars.decimal_str(worst, 3)}")


def test_08_rotation_matrices(sys_one):
    with _timed("rotation-matrices"):
        rep = twod2.verify_rotation_matrices(sys_one)
    ok, detail = _report_ok(rep)
    _line(8, "rotation-matrices", ok, detail)


def test_09_figures(sys_one):
    with _timed("figures"):
        rep = twod2.verify_figures(sys_one)
    ok, detail = _report_ok(rep)
    ok = ok and len(rep.corrections) >= 2
    _line(9, "figures", ok, detail + f", {len(rep.corrections)} corrections reported")


def test_10_jellyfish(sys_one):
    with _timed("jellyfish"):
        rep = twod2.verify_jellyfish(sys_one)
    ok, detail = _report_ok(rep)
    _line(10, "jellyfish", ok, detail)


def test_11_lambda_independence(sys_one, neg_one):
    with _timed("lambda-independence"):
        rep = twod2.verify_lambda_independence()
        rep.merge(twod2.verify_automorphism(sys_one, neg_one))
    ok, detail = _report_ok(rep)
    _line(11, "parameter-independence", ok, detail)


def test_12_principal_graph(sys_one):
    with _timed("principal-graph"):
        rep = twod2.verify_principal_graph(sys_one)
    ok, detail = _report_ok(rep)
    _line(12, "principal-graph", ok, detail)


def test_13_connection_4442():
    with _timed("conn4442"):
        rep = conn.run_connection_suite(seed=0, num_starts=500)
    elapsed = TIMINGS["conn4442"]
    ok, detail = _report_ok(rep)
    _line(13, "connection-4442", ok and elapsed < 300.0,
          detail + f", {elapsed:.0f}s")


def test_14_full_suite_runtime(sys_one, neg_one):
    with _timed("remaining-verifiers"):
        rep = twod2.verify_AB(sys_one)
        rep.merge(twod2.verify_matrix_units(sys_one))
    ok, detail = _report_ok(rep)
    total = sum(TIMINGS.values())
    _line(14, "full-suite-runtime", ok and total < 1800.0,
          f"accumulated {total:.0f}s across all stages")

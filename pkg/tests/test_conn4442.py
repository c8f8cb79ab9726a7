"""Tests for the 4442 branch matrix and phase solve."""

from __future__ import annotations

import gmpy2
import pytest

from gpalab import conn4442 as conn
from gpalab import scalars


@pytest.fixture(scope="module")
def solved():
    return conn.solve_phases(seed=0, num_starts=220)


def test_branch_constants():
    a, b, c = conn.branch_constants()
    tol = gmpy2.mpfr(10) ** -40
    r5 = scalars.sqrt_pos(5)
    assert abs(a - 3 * (2 + r5)) < tol
    assert abs(c - 3 * scalars.sqrt_pos(3 + r5)) < tol
    assert abs(1 + 2 * b ** 2 + b * c - a ** 2) < tol


def test_all_ones_matrix():
    bm = conn.build_branch_matrix(conn.PhaseSolution.all_ones())
    assert abs(complex(bm.entry(1, 1)) - (-0.0786893)) < 1e-6
    # the corner entries carry no phase
    assert float(scalars.im_part(bm.entry(1, 4))) == 0
    assert conn.unitarity_residual(conn.PhaseSolution.all_ones()) > 0.1


def test_non_unit_phase_rejected():
    values = [1] * 9
    values[0] = 2
    with pytest.raises(ValueError):
        conn.build_branch_matrix(conn.PhaseSolution.from_values(values))


def test_reference_solution_unitary():
    ref = conn.PhaseSolution.reference()
    tol30 = gmpy2.mpfr(10) ** -30
    assert ref.modulus_defect() < tol30
    assert conn.unitarity_residual(ref) < tol30
    assert conn.unitarity_residual(ref.conjugate()) < tol30


def test_solve_finds_two_clusters(solved):
    assert len(solved.solutions) == 2
    assert solved.converged > 100
    for resid in solved.residuals:
        assert resid < gmpy2.mpfr(10) ** -35


def test_solve_requires_enough_starts():
    with pytest.raises(ValueError):
        conn.solve_phases(seed=0, num_starts=10)


def test_verify_solutions(solved):
    rep = conn.verify_solutions(solved)
    assert rep.passed
    names = {r.name for r in rep.records}
    assert "conjugate_pair" in names
    assert "swap_symmetry" in names
    assert "closed_form" in names


def test_classification_error_on_truncated_set(solved):
    broken = conn.SolveResult(
        solutions=solved.solutions[:1],
        residuals=solved.residuals[:1],
        cluster_sizes=solved.cluster_sizes[:1],
        num_starts=solved.num_starts,
        converged=solved.converged,
    )
    with pytest.raises(conn.ClassificationError):
        conn.verify_solutions(broken)


def test_solution_order_is_deterministic(solved):
    again = conn.solve_phases(seed=1, num_starts=220)
    for a, b in zip(solved.solutions, again.solutions):
        assert max(
            scalars.modulus(x - y) for x, y in zip(a.as_tuple(), b.as_tuple())
        ) < gmpy2.mpfr(10) ** -30


def test_reference_constants_emitted():
    ref = conn.reference_constants()
    assert ref["verified"] is False
    assert abs(scalars.modulus(ref["eigenvalue"]) - 1) < gmpy2.mpfr(10) ** -40

"""Tests for the relation system and its verification suites."""

from __future__ import annotations

import gmpy2
import pytest

from gpalab import gpa, scalars, twod2


@pytest.fixture(scope="module")
def sys_one():
    return twod2.build_relation_system()


@pytest.fixture(scope="module")
def neg_one(sys_one):
    return twod2.negated_system(sys_one)


def _assert_passed(rep):
    assert rep.passed, "\n".join(
        f"{r.name}: {scalars.decimal_str(r.residual, 3)} > "
        f"{scalars.decimal_str(r.tol, 3)}"
        for r in rep.failures()
    )


def test_build_produces_projections(sys_one):
    tol = gmpy2.mpfr(10) ** -40
    r5 = scalars.sqrt_pos(5)
    assert abs(sys_one.e3_plus[0].trace() - scalars.sqrt_pos(7 + 3 * r5)) < tol
    assert abs(sys_one.s4_plus[0].trace() - (2 + r5)) < tol
    assert abs(sys_one.s4_minus[0].trace() - (1 + r5) / 2) < tol
    assert abs(sys_one.s4_minus[1].trace() - (3 + r5) / 2) < tol
    assert abs(sys_one.s5_plus[0].trace() - scalars.sqrt_pos(3 + r5)) < tol
    assert abs(sys_one.s6_plus[0].trace() - 1) < tol


def test_unit_star_structure(sys_one):
    tol = gmpy2.mpfr(10) ** -40
    e11, e12, e21, e22 = sys_one.s4_plus
    assert (e12.adjoint() - e21).norm() < tol
    assert (e11 * e12 - e12).norm() < tol
    assert (e12 * e21 - e11).norm() < tol


def test_rotation_constants_sum():
    rc = twod2.RotationConstants.standard()
    tol = gmpy2.mpfr(10) ** -40
    assert abs(rc.alpha + rc.beta - 1) < tol
    assert abs(rc.eta ** 2 - (2 - scalars.sqrt_pos(5))) < tol


def test_verify_ab(sys_one):
    _assert_passed(twod2.verify_AB(sys_one))


def test_verify_matrix_units(sys_one):
    _assert_passed(twod2.verify_matrix_units(sys_one))


def test_verify_rotation_matrices(sys_one):
    _assert_passed(twod2.verify_rotation_matrices(sys_one))


def test_verify_figures(sys_one):
    rep = twod2.verify_figures(sys_one)
    _assert_passed(rep)
    # the two repaired table entries are reported, not silently patched
    assert rep.corrections


def test_verify_jellyfish(sys_one):
    _assert_passed(twod2.verify_jellyfish(sys_one))


def test_verify_automorphism(sys_one, neg_one):
    _assert_passed(twod2.verify_automorphism(sys_one, neg_one))


def test_verify_principal_graph(sys_one):
    _assert_passed(twod2.verify_principal_graph(sys_one))


def test_coefficients_match_negated_system(sys_one, neg_one):
    left = twod2.extract_relation_coefficients(sys_one)
    right = twod2.extract_relation_coefficients(neg_one)
    assert len(left) == len(right)
    assert twod2.compare_coefficients(left, left) == 0


def test_build_rejects_bad_generator(sys_one):
    from gpalab.generator import Generator

    graph = sys_one.t.space.graph
    fake = Generator(element=gpa.jones_wenzl(3, graph, 0), omega=gmpy2.mpc(1))
    with pytest.raises(twod2.ConstructionError):
        twod2.build_relation_system(gen=fake)

"""Tests for arbitrary-precision scalars, quantum integers, named constants."""

from __future__ import annotations

import gmpy2
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gpalab import scalars


def tol(shift: int = 10) -> gmpy2.mpfr:
    return gmpy2.mpfr(10) ** (-scalars.get_precision() + shift)


def test_quantum_integer_base_cases():
    ctx = scalars.default_quantum_context()
    assert scalars.approx_eq(ctx.quantum_integer(0), 0, tol())
    assert scalars.approx_eq(ctx.quantum_integer(1), 1, tol())
    assert scalars.approx_eq(
        ctx.quantum_integer(2), scalars.sqrt_pos(3 + scalars.sqrt_pos(5)), tol()
    )


def test_quantum_integer_printed_decimals():
    ctx = scalars.default_quantum_context()
    assert scalars.approx_eq(ctx.quantum_integer(2), "2.2882456", 1e-6)
    assert scalars.approx_eq(ctx.quantum_integer(3), 2 + scalars.sqrt_pos(5), tol())
    assert scalars.approx_eq(ctx.quantum_integer(3), "4.2360680", 1e-6)
    assert scalars.approx_eq(ctx.quantum_integer(5), "12.7082040", 1e-6)


def test_quantum_integer_recursion_residual():
    ctx = scalars.default_quantum_context()
    two = ctx.quantum_integer(2)
    for n in range(1, 12):
        lhs = ctx.quantum_integer(n + 1)
        rhs = two * ctx.quantum_integer(n) - ctx.quantum_integer(n - 1)
        assert abs(lhs - rhs) < tol()


def test_quantum_integers_positive():
    ctx = scalars.default_quantum_context()
    for n in range(1, 13):
        assert ctx.quantum_integer(n) > 0


def test_named_constants_registered_and_squared():
    """Every registered radical squares back to its radicand."""
    r5 = scalars.sqrt_pos(5)
    expected_squares = {
        "delta": 3 + r5,
        "sqrt_7_plus_3sqrt5": 7 + 3 * r5,
        "sqrt5": gmpy2.mpfr(5),
        "diamond_radical": (5 * r5 - 11) / 2,
    }
    for key, square in expected_squares.items():
        value = scalars.named_constant(key)
        assert scalars.approx_eq(value * value, square, tol())


def test_named_constant_values():
    assert scalars.approx_eq(scalars.named_constant("alpha_rot"), "0.3819660", 1e-6)
    eta = scalars.named_constant("eta_rot")
    assert scalars.approx_eq(eta, scalars.comp(0, "0.4858683"), 1e-6)
    assert scalars.approx_eq(scalars.named_constant("zero"), 0, tol())
    assert scalars.approx_eq(
        scalars.named_constant("diamond_radical"), "0.3002831", 1e-6
    )
    # alpha_rot + beta_rot = 1 exactly.
    total = scalars.named_constant("alpha_rot") + scalars.named_constant("beta_rot")
    assert scalars.approx_eq(total, 1, tol())


def test_named_constant_unknown_key():
    with pytest.raises(KeyError):
        scalars.named_constant("no-such-constant")


def test_approx_eq_examples():
    assert scalars.approx_eq(1, 1, 1e-40)
    assert scalars.approx_eq(2 - scalars.sqrt_pos(5), "-0.2360680", 1e-6)
    assert not scalars.approx_eq("0.3819660", "0.6180340", 1e-6)
    with pytest.raises(ValueError):
        scalars.approx_eq(1, 1, 0)


@settings(max_examples=50, deadline=None)
@given(
    st.tuples(
        st.floats(-10, 10, allow_nan=False),
        st.floats(-10, 10, allow_nan=False),
    )
)
def test_conjugation_involution_and_modulus(parts):
    z = scalars.comp(*parts)
    assert scalars.conj(scalars.conj(z)) == z
    norm_sq = z * scalars.conj(z)
    assert abs(norm_sq.imag) < tol()
    assert scalars.approx_eq(norm_sq.real, abs(z) ** 2, tol())


def test_principal_branch_sqrt():
    z = scalars.csqrt(scalars.comp(-1, 0))
    assert scalars.approx_eq(z, scalars.comp(0, 1), tol())
    w = scalars.csqrt(scalars.comp(0, 2))
    assert scalars.approx_eq(w * w, scalars.comp(0, 2), tol())
    assert w.real > 0


def test_precision_round_trip():
    original = scalars.get_precision()
    try:
        scalars.set_precision(90)
        assert scalars.get_precision() == 90
        ctx = scalars.default_quantum_context()
        residual = abs(ctx.quantum_integer(2) ** 2 - (3 + scalars.sqrt_pos(5)))
        assert residual < gmpy2.mpfr(10) ** -80
    finally:
        scalars.set_precision(original)

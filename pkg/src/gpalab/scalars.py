"""Arbitrary-precision complex scalars, quantum integers, and named constants.

All numeric work in this package runs on gmpy2's mpfr/mpc types at a
configurable decimal precision (default 60 digits).  Values are compared only
through ``approx_eq`` with an explicit tolerance; square roots of complex
values always take the principal branch, and constants that are pure
imaginary are built as a real radical times i rather than as the square root
of a negative real.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import gmpy2

DEFAULT_DIGITS = 60

# Extra mantissa bits beyond the requested decimal digits, so that strings of
# arithmetic operations keep the final results good to the full digit count.
_GUARD_BITS = 40

_current_digits = DEFAULT_DIGITS


def bits_for_digits(digits: int) -> int:
    """Mantissa bits needed for the given number of decimal digits."""
    return int(digits * 3.3219280948873626) + _GUARD_BITS


def set_precision(digits: int) -> None:
    """Set the working precision, in decimal digits, for all scalar work."""
    global _current_digits
    if digits < 1:
        raise ValueError("precision must be a positive digit count")
    _current_digits = int(digits)
    gmpy2.get_context().precision = bits_for_digits(_current_digits)


def get_precision() -> int:
    """Return the working precision in decimal digits."""
    return _current_digits


def default_precision_from_env() -> int:
    """Read PA_PRECISION from the environment, falling back to the default."""
    raw = os.environ.get("PA_PRECISION", "")
    if raw.strip():
        return int(raw)
    return DEFAULT_DIGITS


# Initialize the gmpy2 context once on import.
set_precision(default_precision_from_env())


def real(x) -> gmpy2.mpfr:
    """Coerce an int, string, float, or mpfr to an mpfr at working precision."""
    return gmpy2.mpfr(x)


def comp(re=0, im=0) -> gmpy2.mpc:
    """Build an mpc from real and imaginary parts."""
    return gmpy2.mpc(gmpy2.mpfr(re), gmpy2.mpfr(im))


def imag_unit() -> gmpy2.mpc:
    """The imaginary unit at working precision."""
    return comp(0, 1)


def conj(z):
    """Complex conjugate of an mpfr or mpc (mpfr values pass through)."""
    if isinstance(z, gmpy2.mpc):
        return z.conjugate()
    return z


def re_part(z) -> gmpy2.mpfr:
    if isinstance(z, gmpy2.mpc):
        return z.real
    return gmpy2.mpfr(z)


def im_part(z) -> gmpy2.mpfr:
    if isinstance(z, gmpy2.mpc):
        return z.imag
    return gmpy2.mpfr(0)


def sqrt_pos(x) -> gmpy2.mpfr:
    """Square root of a nonnegative real."""
    xr = gmpy2.mpfr(x)
    if xr < 0:
        raise ValueError("sqrt_pos needs a nonnegative real")
    return gmpy2.sqrt(xr)


def csqrt(z) -> gmpy2.mpc:
    """Principal-branch square root of a complex value."""
    return gmpy2.sqrt(gmpy2.mpc(z))


def modulus(z) -> gmpy2.mpfr:
    return abs(z)


def approx_eq(a, b, tol) -> bool:
    """True iff |a - b| <= tol.  The only sanctioned comparison of scalars."""
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    return abs(gmpy2.mpc(a) - gmpy2.mpc(b)) <= gmpy2.mpfr(tol)


def is_small(z, tol) -> bool:
    return abs(gmpy2.mpc(z)) <= gmpy2.mpfr(tol)


def decimal_str(x, digits: int | None = None) -> str:
    """Scientific-notation decimal string for an mpfr at working precision."""
    d = digits if digits is not None else get_precision()
    xr = gmpy2.mpfr(x)
    if xr == 0:
        return "0"
    mantissa, exponent, _ = xr.digits(10, d)
    sign = "-" if mantissa.startswith("-") else ""
    body = mantissa.lstrip("-")
    return f"{sign}0.{body}e{exponent}"


@dataclass(frozen=True)
class QuantumContext:
    """Quantum integers [n] for a loop parameter q with q + 1/q = [2] > 2."""

    two_q: gmpy2.mpfr

    @property
    def q(self) -> gmpy2.mpfr:
        t = gmpy2.mpfr(self.two_q)
        return (t + gmpy2.sqrt(t * t - 4)) / 2

    def quantum_integer(self, n: int) -> gmpy2.mpfr:
        """[n] = (q^n - q^-n)/(q - 1/q), real and positive for n >= 1."""
        if n < 0:
            raise ValueError("quantum integers are defined for n >= 0")
        q = self.q
        if n == 0:
            return gmpy2.mpfr(0)
        return (q**n - q**-n) / (q - 1 / q)


def quantum_integer(ctx: QuantumContext, n: int) -> gmpy2.mpfr:
    return ctx.quantum_integer(n)


def default_quantum_context() -> QuantumContext:
    """The context with [2] = sqrt(3 + sqrt 5), shared by both scope graphs."""
    return QuantumContext(two_q=sqrt_pos(3 + sqrt_pos(5)))


def _r5() -> gmpy2.mpfr:
    return sqrt_pos(5)


# Each named constant is a zero-argument builder so values always reflect the
# current working precision.
_CONSTANTS = {
    "zero": lambda: comp(0),
    "sqrt5": lambda: _r5(),
    "index": lambda: 3 + _r5(),
    "delta": lambda: sqrt_pos(3 + _r5()),
    "sqrt_7_plus_3sqrt5": lambda: sqrt_pos(7 + 3 * _r5()),
    "alpha_rot": lambda: (3 - _r5()) / 2,
    "beta_rot": lambda: (-1 + _r5()) / 2,
    "eta_rot": lambda: imag_unit() * sqrt_pos(_r5() - 2),
    "diamond_radical": lambda: sqrt_pos((5 * _r5() - 11) / 2),
    "b_comp_coeff": lambda: real(3) / 4 * sqrt_pos(3 + _r5()),
    "a_star_coeff": lambda: sqrt_pos(2 + _r5()) / 2,
    "a_jw_coeff": lambda: sqrt_pos(1 + _r5()) / 3,
    "a_b_coeff": lambda: sqrt_pos(_r5() - 2) / 3,
    "four_box_correction": lambda: (2 + _r5()) / sqrt_pos(7 + 3 * _r5()),
    "three_box_ptrace": lambda: sqrt_pos(7 + 3 * _r5()) / (2 + _r5()),
    "five_box_ptrace": lambda: sqrt_pos(3 + _r5()) / (2 + _r5()),
    "six_box_correction": lambda: (2 + _r5()) / sqrt_pos(3 + _r5()),
    "six_box_ptrace": lambda: 1 / sqrt_pos(3 + _r5()),
    "five_box_minus_correction": lambda: sqrt_pos(7 + 3 * _r5()) / ((3 + _r5()) / 2),
    "positivity_coeff": lambda: sqrt_pos(7 + 3 * _r5()) / ((1 + _r5()) / 2),
    "golden": lambda: (1 + _r5()) / 2,
}


def named_constant(key: str):
    """Look up a registered algebraic constant at working precision."""
    try:
        builder = _CONSTANTS[key]
    except KeyError:
        raise KeyError(f"unknown named constant: {key!r}") from None
    return builder()


def constant_keys() -> list[str]:
    return sorted(_CONSTANTS)

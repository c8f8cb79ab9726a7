"""Derived elements and relation checks for the diamond graph planar algebra.

Starting from the solved three-box generator this module constructs the full
tower of derived elements: the four-box uncappable pair, the matrix units at
box indices four, five and six on both shadings, and the annular cup bases.
It then verifies, coefficient by coefficient, the half-click rotation
matrices, the two published coefficient tables, the one-strand substitution
identities used by the evaluation algorithm, the sign automorphism, and the
principal-graph data of the planar subalgebra the generator produces.

All constructions run in exact interval-free ball-style arithmetic (gmpy2 at
the configured precision); residuals reported by the verifiers are typically
around 10^(-precision + 10).
"""

from __future__ import annotations

from dataclasses import dataclass

import gmpy2
import numpy as np

from . import gpa, scalars
from .generator import Generator, check_generator, generator_element
from .report import Report


class ConstructionError(RuntimeError):
    """An inline consistency check failed while building a derived element."""


def _tol30():
    return gmpy2.mpfr(10) ** -30


def _tol25():
    return gmpy2.mpfr(10) ** -25


@dataclass(frozen=True)
class RotationConstants:
    """The three scalars filling the half-click rotation matrices."""

    alpha: gmpy2.mpfr
    beta: gmpy2.mpfr
    eta: gmpy2.mpc

    @classmethod
    def standard(cls) -> "RotationConstants":
        return cls(
            alpha=scalars.named_constant("alpha_rot"),
            beta=scalars.named_constant("beta_rot"),
            eta=scalars.named_constant("eta_rot"),
        )

    def four_box_matrix(self) -> list[list]:
        """Half-click rotation on the even four-box units (e11, e12, e21, e22)."""
        a, b, h = self.alpha, self.beta, self.eta
        hb = scalars.conj(h)
        return [
            [a, hb, h, b],
            [h, b, a, hb],
            [hb, a, b, h],
            [b, h, hb, a],
        ]

    def five_box_rows(self) -> list[list]:
        """Rows expressing the half-click rotation of the odd five-box units
        over the even five-box units, in the order (e11, e12, e21, e22)."""
        a, b, h = self.alpha, self.beta, self.eta
        hb = scalars.conj(h)
        return [
            [b, h, hb, a],
            [hb, a, b, h],
            [h, b, a, hb],
            [a, hb, h, b],
        ]

    @staticmethod
    def six_box_matrix() -> list[list]:
        """Half-click rotation on the even six-box units."""
        one = gmpy2.mpfr(1)
        zero = gmpy2.mpfr(0)
        return [
            [zero, zero, zero, one],
            [zero, -one, zero, zero],
            [zero, zero, -one, zero],
            [one, zero, zero, zero],
        ]


@dataclass
class RelationSystem:
    """Every derived element of the tower over one generator."""

    generator: Generator
    t: gpa.GpaElement
    t_check: gpa.GpaElement
    jw3: gpa.GpaElement
    jw3_check: gpa.GpaElement
    jw4: gpa.GpaElement
    jw4_check: gpa.GpaElement
    e3_plus: tuple
    e3_minus: tuple
    a: gpa.GpaElement
    b: gpa.GpaElement
    a_check: gpa.GpaElement
    b_check: gpa.GpaElement
    s4_plus: tuple
    g1: gpa.GpaElement
    g2: gpa.GpaElement
    s4_minus: tuple
    s5_plus: tuple
    s5_minus: tuple
    s6_plus: tuple
    cups_plus: tuple
    cups_minus: tuple
    basis_plus: tuple
    basis_minus: tuple


def _require(condition_residual, tol, what: str) -> None:
    res = abs(gmpy2.mpc(condition_residual)) if not isinstance(
        condition_residual, gmpy2.mpfr
    ) else condition_residual
    if not res <= tol:
        raise ConstructionError(
            f"inline check failed while building {what}: residual "
            f"{scalars.decimal_str(res, 3)} exceeds {scalars.decimal_str(tol, 3)}"
        )


def build_relation_system(gen: Generator | None = None, lam=1) -> RelationSystem:
    """Construct the full derived tower, checking each definition inline.

    Every layer is verified as it is built (projections are idempotent,
    partial traces land where they should, traces take their closed-form
    values); a failure raises ConstructionError naming the definition.
    """
    if gen is None:
        gen = generator_element(lam)
    tol = _tol30()
    t = gen.element
    t_check = gen.check_element
    graph = t.space.graph
    half = gmpy2.mpfr(1) / 2
    r5 = scalars.sqrt_pos(5)
    i_unit = scalars.imag_unit()

    rep = check_generator(gen)
    for key in ("self_adjoint", "square", "cappings", "rotation"):
        _require(rep[key], tol, f"the generator ({key})")

    jw3 = gpa.jones_wenzl(3, graph, 0)
    jw3_check = gpa.jones_wenzl(3, graph, 1)
    jw4 = gpa.jones_wenzl(4, graph, 0)
    jw4_check = gpa.jones_wenzl(4, graph, 1)

    e3_plus = (half * (jw3 + t), half * (jw3 - t))
    e3_minus = (half * (jw3_check + t_check), half * (jw3_check - t_check))
    for k, e in enumerate(e3_plus + e3_minus):
        _require((e * e - e).norm(), tol, f"three-box projection {k}")
        _require(
            abs(e.trace() - scalars.named_constant("sqrt_7_plus_3sqrt5")),
            tol,
            f"trace of three-box projection {k}",
        )

    corr = scalars.named_constant("four_box_correction")
    e11 = gpa.include_right(e3_plus[0]) - corr * gpa.comp_circ(e3_plus[0], e3_plus[0])
    e22 = gpa.include_right(e3_plus[1]) - corr * gpa.comp_circ(e3_plus[1], e3_plus[1])
    for name, e in (("e11", e11), ("e22", e22)):
        _require((e * e - e).norm(), tol, f"four-box diagonal unit {name}")
        _require(abs(e.trace() - (2 + r5)), tol, f"trace of four-box unit {name}")
    _require((e11 * e22).norm(), tol, "orthogonality of e11 and e22")

    b = scalars.named_constant("b_comp_coeff") * gpa.comp_circ(t, t) - jw4
    a = i_unit * (
        scalars.named_constant("a_star_coeff")
        * gpa.fourier(gpa.comp_circ(t_check, t_check))
        - scalars.named_constant("a_jw_coeff") * gpa.fourier(jw4_check)
        - scalars.named_constant("a_b_coeff") * b
    )
    for name, x in (("B", b), ("A", a)):
        _require((x.adjoint() - x).norm(), tol, f"self-adjointness of {name}")
        _require(abs(x.trace()), tol, f"trace of {name}")
    _require((gpa.rotation(a) + a).norm(), tol, "rotation eigenvalue of A")
    _require((gpa.rotation(b) - b).norm(), tol, "rotation eigenvalue of B")

    e12 = e11 * a * e22
    e21 = e12.adjoint()
    s4_plus = (e11, e12, e21, e22)
    _require((e12 * e21 - e11).norm(), tol, "four-box unit product e12.e21")
    _require((e21 * e12 - e22).norm(), tol, "four-box unit product e21.e12")

    a_check = i_unit * gpa.fourier(a)
    b_check = gpa.fourier(b)
    _require((a_check.adjoint() - a_check).norm(), tol, "self-adjointness of A-check")

    g1 = gpa.include_right(e3_minus[0]) - corr * gpa.comp_circ(e3_minus[0], e3_minus[0])
    g2 = gpa.include_right(e3_minus[1]) - corr * gpa.comp_circ(e3_minus[1], e3_minus[1])
    sq = scalars.csqrt(1 + r5)
    em1 = half * (1 - r5) * g1 - sq * (g1 * a_check * g1)
    em2 = half * (1 + r5) * g1 + sq * (g1 * a_check * g1)
    em3 = half * (1 + r5) * g2 + sq * (g2 * a_check * g2)
    em4 = half * (1 - r5) * g2 - sq * (g2 * a_check * g2)
    s4_minus = (em1, em2, em3, em4)
    golden = (1 + r5) / 2
    target_traces = (golden, golden + 1, golden + 1, golden)
    for k, (e, tr) in enumerate(zip(s4_minus, target_traces), start=1):
        _require((e * e - e).norm(), tol, f"odd four-box projection {k}")
        _require(abs(e.trace() - tr), tol, f"trace of odd four-box projection {k}")
    _require((em1 + em2 - g1).norm(), tol, "decomposition em1 + em2 = g1")
    _require((em3 + em4 - g2).norm(), tol, "decomposition em3 + em4 = g2")
    _require((em1 * em3).norm(), tol, "orthogonality of em1 and em3")

    c5 = scalars.named_constant("three_box_ptrace")
    f11 = gpa.include_right(e11) - c5 * (
        gpa.comp_circ(e11, e11) + gpa.comp_circ(e12, e21)
    )
    f12 = gpa.include_right(e12) - c5 * gpa.comp_circ(e11 + e12, e12 + e22)
    f22 = gpa.include_right(e22) - c5 * (
        gpa.comp_circ(e22, e22) + gpa.comp_circ(e21, e12)
    )
    f21 = f12.adjoint()
    s5_plus = (f11, f12, f21, f22)
    sqrt_index = scalars.sqrt_pos(3 + r5)
    for name, e in (("f11", f11), ("f22", f22)):
        _require((e * e - e).norm(), tol, f"five-box diagonal unit {name}")
        _require(abs(e.trace() - sqrt_index), tol, f"trace of five-box unit {name}")
    _require((f12 * f21 - f11).norm(), tol, "five-box unit product f12.f21")

    cm5 = scalars.named_constant("five_box_minus_correction")
    consts = RotationConstants.standard()
    al, be, et = consts.alpha, consts.beta, consts.eta
    etb = scalars.conj(et)
    fm11 = gpa.include_right(em2) - cm5 * gpa.comp_circ(em2, em2)
    fm22 = gpa.include_right(em3) - cm5 * gpa.comp_circ(em3, em3)
    fm12 = gpa.fourier_power(
        gpa.linear_combination(zip((etb, al, be, et), s5_plus)), 5
    )
    fm21 = gpa.fourier_power(
        gpa.linear_combination(zip((et, be, al, etb), s5_plus)), 5
    )
    s5_minus = (fm11, fm12, fm21, fm22)
    for name, e in (("fm11", fm11), ("fm22", fm22)):
        _require((e * e - e).norm(), tol, f"odd five-box diagonal unit {name}")
        _require(abs(e.trace() - sqrt_index), tol, f"trace of odd five-box unit {name}")
    _require((fm12 * fm21 - fm11).norm(), tol, "odd five-box unit product fm12.fm21")
    _require((fm21 - fm12.adjoint()).norm(), tol, "adjoint pairing of fm12 and fm21")

    c6 = scalars.named_constant("six_box_correction")
    g11 = gpa.include_right(f11) - c6 * gpa.comp_circ(f11, f11)
    g12 = gpa.include_right(f12) - c6 * gpa.comp_circ(f11, f12)
    g22 = gpa.include_right(f22) - c6 * gpa.comp_circ(f22, f22)
    g21 = g12.adjoint()
    s6_plus = (g11, g12, g21, g22)
    for name, e in (("g11", g11), ("g22", g22)):
        _require((e * e - e).norm(), tol, f"six-box diagonal unit {name}")
        _require(abs(e.trace() - 1), tol, f"trace of six-box unit {name}")
    _require((g12 * g21 - g11).norm(), tol, "six-box unit product g12.g21")

    cups_plus = tuple(gpa.annular_cup(i, t, t_check) for i in range(8))
    cups_minus = tuple(
        gpa.annular_cup(i, t_check, gpa.fourier(t_check)) for i in range(8)
    )
    basis_plus = (a, b, gpa.fourier(jw4_check)) + cups_plus
    basis_minus = (a_check, b_check, gpa.fourier(jw4)) + cups_minus

    return RelationSystem(
        generator=gen,
        t=t,
        t_check=t_check,
        jw3=jw3,
        jw3_check=jw3_check,
        jw4=jw4,
        jw4_check=jw4_check,
        e3_plus=e3_plus,
        e3_minus=e3_minus,
        a=a,
        b=b,
        a_check=a_check,
        b_check=b_check,
        s4_plus=s4_plus,
        g1=g1,
        g2=g2,
        s4_minus=s4_minus,
        s5_plus=s5_plus,
        s5_minus=s5_minus,
        s6_plus=s6_plus,
        cups_plus=cups_plus,
        cups_minus=cups_minus,
        basis_plus=basis_plus,
        basis_minus=basis_minus,
    )


# -- verification: the uncappable pair ----------------------------------------


def verify_AB(sys: RelationSystem) -> Report:
    """Defining properties of the uncappable four-box pair A and B."""
    rep = Report("uncappable-pair")
    tol = _tol30()
    for name, x in (("A", sys.a), ("B", sys.b)):
        rep.check(
            f"{name}-self-adjoint",
            f"{name} equals its adjoint",
            (x.adjoint() - x).norm(),
            tol,
        )
        caps = max(gpa.cap(x, k).norm() for k in range(1, 9))
        rep.check(
            f"{name}-uncappable",
            f"every boundary capping of {name} vanishes",
            caps,
            tol,
        )
    rep.check(
        "A-rotation",
        "the two-click rotation negates A",
        (gpa.rotation(sys.a) + sys.a).norm(),
        tol,
    )
    rep.check(
        "B-rotation",
        "the two-click rotation fixes B",
        (gpa.rotation(sys.b) - sys.b).norm(),
        tol,
    )
    triple = [sys.a, sys.b, sys.jw4]
    triple_check = [sys.a_check, sys.b_check, sys.jw4_check]
    for tag, family in (("even", triple), ("odd", triple_check)):
        worst = gmpy2.mpfr(0)
        for x in family:
            for y in family:
                _, res = gpa.span_membership(x * y, family)
                worst = max(worst, res)
        rep.check(
            f"span-closed-{tag}",
            f"pairwise products of the {tag} triple stay in its span",
            worst,
            tol,
        )
    worst = max(abs(gpa.inner_product(sys.a, c)) for c in sys.cups_plus)
    rep.check(
        "A-perp-annular",
        "A is orthogonal to every annular cup of the generator",
        worst,
        tol,
    )
    return rep


# -- verification: matrix units and traces -------------------------------------


def _unit_relations(rep: Report, tag: str, units, tol) -> None:
    """Check the 2x2 matrix-unit relations for (e11, e12, e21, e22)."""
    labels = ("11", "12", "21", "22")
    pairs = {
        ("11", "11"): "11", ("11", "12"): "12",
        ("12", "21"): "11", ("12", "22"): "12",
        ("21", "11"): "21", ("21", "12"): "22",
        ("22", "21"): "21", ("22", "22"): "22",
    }
    worst = gmpy2.mpfr(0)
    for (i, x) in zip(labels, units):
        for (j, y) in zip(labels, units):
            prod = x * y
            out = pairs.get((i, j))
            if out is not None:
                prod = prod - units[labels.index(out)]
            worst = max(worst, prod.norm())
    rep.check(
        f"{tag}-matrix-units",
        f"the {tag} quadruple satisfies the 2x2 matrix-unit relations",
        worst,
        tol,
    )
    adj = max(
        (units[0].adjoint() - units[0]).norm(),
        (units[3].adjoint() - units[3]).norm(),
        (units[1].adjoint() - units[2]).norm(),
    )
    rep.check(
        f"{tag}-star-structure",
        f"adjoints of the {tag} units transpose the indices",
        adj,
        tol,
    )


def verify_matrix_units(sys: RelationSystem) -> Report:
    """Matrix-unit relations and closed-form traces at every level."""
    rep = Report("matrix-units")
    tol = _tol30()
    r5 = scalars.sqrt_pos(5)
    _unit_relations(rep, "four-box", sys.s4_plus, tol)
    _unit_relations(rep, "five-box", sys.s5_plus, tol)
    _unit_relations(rep, "odd-five-box", sys.s5_minus, tol)
    _unit_relations(rep, "six-box", sys.s6_plus, tol)

    worst = gmpy2.mpfr(0)
    for i, x in enumerate(sys.s4_minus):
        for j, y in enumerate(sys.s4_minus):
            prod = x * y
            if i == j:
                prod = prod - x
            worst = max(worst, prod.norm())
    rep.check(
        "odd-four-box-projections",
        "the four odd four-box projections are orthogonal idempotents",
        worst,
        tol,
    )
    rep.check(
        "odd-four-box-partition",
        "the odd projections pair up to g1 and g2",
        max(
            (sys.s4_minus[0] + sys.s4_minus[1] - sys.g1).norm(),
            (sys.s4_minus[2] + sys.s4_minus[3] - sys.g2).norm(),
        ),
        tol,
    )

    golden = (1 + r5) / 2
    trace_checks = [
        ("three-box", sys.e3_plus[0], scalars.named_constant("sqrt_7_plus_3sqrt5")),
        ("four-box", sys.s4_plus[0], 2 + r5),
        ("odd-four-box-thin", sys.s4_minus[0], golden),
        ("odd-four-box-thick", sys.s4_minus[1], golden + 1),
        ("five-box", sys.s5_plus[0], scalars.sqrt_pos(3 + r5)),
        ("six-box", sys.s6_plus[0], gmpy2.mpfr(1)),
    ]
    for tag, el, value in trace_checks:
        rep.check(
            f"trace-{tag}",
            f"the {tag} minimal projection has its closed-form trace",
            abs(el.trace() - value),
            tol,
        )
    return rep


# -- verification: rotation matrices -------------------------------------------


def _fit_over(target, family):
    coeffs, res = gpa.span_membership(target, list(family))
    return coeffs, res


def _matrix_action_residual(op, sources, targets, matrix):
    """Worst residual of op(sources[r]) = sum_c matrix[r][c] * targets[c]."""
    worst = gmpy2.mpfr(0)
    for row, src in zip(matrix, sources):
        img = op(src)
        combo = gpa.linear_combination(zip(row, targets))
        worst = max(worst, (img - combo).norm())
    return worst


def verify_rotation_matrices(sys: RelationSystem) -> Report:
    """Entrywise checks of the half-click rotation on the unit quadruples."""
    rep = Report("rotation-matrices")
    tol = _tol25()
    consts = RotationConstants.standard()
    rep.check(
        "alpha-plus-beta",
        "the two real rotation constants sum to one",
        abs(consts.alpha + consts.beta - 1),
        tol,
    )

    half4 = lambda x: gpa.fourier_power(x, 4)
    rep.check(
        "four-box-half-click",
        "the half-click rotation acts on the four-box units by the stated matrix",
        _matrix_action_residual(
            half4, sys.s4_plus, sys.s4_plus, consts.four_box_matrix()
        ),
        tol,
    )
    swaps = (sys.s4_minus[0], sys.s4_minus[2], sys.s4_minus[1], sys.s4_minus[3])
    rep.check(
        "odd-four-box-half-click",
        "the half-click rotation fixes the outer odd projections and swaps the inner two",
        max((half4(x) - y).norm() for x, y in zip(sys.s4_minus, swaps)),
        tol,
    )

    half5 = lambda x: gpa.fourier_power(x, 5)
    rep.check(
        "five-box-half-click",
        "the half-click rotation carries the odd five-box units to the stated "
        "combinations of the even ones",
        _matrix_action_residual(
            half5, sys.s5_minus, sys.s5_plus, consts.five_box_rows()
        ),
        tol,
    )

    half6 = lambda x: gpa.fourier_power(x, 6)
    rep.check(
        "six-box-half-click",
        "the half-click rotation acts on the six-box units by the stated signed "
        "permutation",
        _matrix_action_residual(
            half6, sys.s6_plus, sys.s6_plus, consts.six_box_matrix()
        ),
        tol,
    )
    rep.note_correction(
        "six-box-off-diagonal",
        "the half-click rotation negates each six-box off-diagonal unit in "
        "place; a published prose line instead claims it exchanges them with "
        "a sign, contradicting the published matrix, which is correct",
        "rotation(e12) = -e12, rotation(e21) = -e21",
    )
    return rep


# -- verification: the coefficient tables --------------------------------------


def _sqrt(x):
    return scalars.sqrt_pos(x)


def _table_one_even_rows():
    """Frozen coefficient rows for the half-click images of the four-box
    units over the odd annular basis (printed-sign convention)."""
    r5 = scalars.sqrt_pos(5)
    i = scalars.imag_unit()
    eighth = gmpy2.mpfr(1) / 8
    row1 = [
        gmpy2.mpc(0), gmpy2.mpc(-1) / 6, gmpy2.mpc(1) / 3,
        -eighth * _sqrt(7 - 3 * r5), gmpy2.mpc(0), -eighth * _sqrt(7 - 3 * r5),
        (r5 - 1) / 8, -eighth * _sqrt(3 + r5), gmpy2.mpfr(1) / 2,
        -eighth * _sqrt(3 + r5), (r5 - 1) / 8,
    ]
    row2 = [
        i / 2, gmpy2.mpc(0), gmpy2.mpc(0),
        -(i / 8) * _sqrt(5 * (r5 - 1)), (i / 4) * _sqrt(2 + r5),
        -(i / 8) * _sqrt(5 * (r5 - 1)), (i / 4) * _sqrt((r5 - 1) / 2),
        -(i / 8) * _sqrt(r5 - 1), (i / 4) * _sqrt(r5 - 2),
        -(i / 8) * _sqrt(r5 - 1), (i / 4) * _sqrt((r5 - 1) / 2),
    ]
    row3 = list(row2[:1]) + [-c for c in row2[1:]]
    row4 = list(row1[:3]) + [-c for c in row1[3:]]
    return [row1, row2, row3, row4]


def _table_one_odd_rows():
    """Frozen coefficient rows for the half-click images of the odd four-box
    projections over the even annular basis."""
    r5 = scalars.sqrt_pos(5)
    i = scalars.imag_unit()
    s2 = _sqrt(2)
    row1 = [
        (i / 2) * _sqrt((r5 - 2) / 2), gmpy2.mpc(1) / (6 * s2), (3 - r5) / 6,
        -1 / (4 * s2), gmpy2.mpfr(1) / 4, -1 / (4 * s2), (r5 - 1) / 8,
        -1 / (4 * s2), gmpy2.mpfr(1) / 4, -1 / (4 * s2), (r5 - 1) / 8,
    ]
    row2 = [
        (i / 4) * _sqrt(5 * r5 - 11), (r5 - 5) / (12 * s2), (r5 - 1) / 6,
        _sqrt(3 - r5) / 8, gmpy2.mpfr(-1) / 4, _sqrt(3 - r5) / 8, gmpy2.mpc(0),
        -_sqrt(3 - r5) / 8, gmpy2.mpfr(1) / 4, -_sqrt(3 - r5) / 8, gmpy2.mpc(0),
    ]
    row3 = list(row2[:3]) + [
        -_sqrt(3 - r5) / 8, gmpy2.mpfr(1) / 4, -_sqrt(3 - r5) / 8, gmpy2.mpc(0),
        _sqrt(3 - r5) / 8, gmpy2.mpfr(-1) / 4, _sqrt(3 - r5) / 8, gmpy2.mpc(0),
    ]
    row4 = list(row1[:3]) + [-c for c in row1[3:]]
    return [row1, row2, row3, row4]


def _table_two_rows():
    """Frozen coefficients of the closing cup of the generator (and of its
    shaded partner) over the units and the remaining cups, after correcting
    the overall sign of the published right-hand sides."""
    r5 = scalars.sqrt_pos(5)
    i = scalars.imag_unit()
    gamma = _sqrt(r5 - 2)
    cups_tail = [
        gmpy2.mpc(0), gmpy2.mpc(1), -_sqrt(3 + r5), (2 + r5),
        -_sqrt(3 + r5), gmpy2.mpc(1), gmpy2.mpc(0),
    ]
    even_row = [-2 * r5, -2 * i * gamma, 2 * i * gamma, 2 * r5] + cups_tail
    odd_row = [-(1 + r5), -(3 + r5), (3 + r5), (1 + r5)] + cups_tail
    return even_row, odd_row


def figure_basis_minus(sys: RelationSystem) -> tuple:
    """The odd four-box annular basis in the printed-sign convention.

    The published coefficient table is stated over a basis whose first
    element is the negative of the working odd uncappable element; with the
    published sign that element fails the sandwich construction of the odd
    projections, so the system stores the working sign and this helper
    restores the printed one for entrywise table comparison.
    """
    return (-1 * sys.a_check,) + sys.basis_minus[1:]


def _entrywise_table_check(rep, tag, statement, images, basis, rows, tol):
    worst_coeff = gmpy2.mpfr(0)
    worst_res = gmpy2.mpfr(0)
    fitted = []
    for img, row in zip(images, rows):
        coeffs, res = _fit_over(img, basis)
        fitted.append(coeffs)
        worst_res = max(worst_res, res)
        for c, e in zip(coeffs, row):
            worst_coeff = max(worst_coeff, abs(gmpy2.mpc(c) - gmpy2.mpc(e)))
    rep.check(f"{tag}-membership", f"{statement} (span residual)", worst_res, tol)
    rep.check(f"{tag}-entries", f"{statement} (entrywise)", worst_coeff, tol)
    return fitted


def verify_figures(sys: RelationSystem) -> Report:
    """Entrywise verification of the two published coefficient tables."""
    rep = Report("figures")
    tol = _tol25()

    _entrywise_table_check(
        rep,
        "table-one-even",
        "one-click images of the four-box units expand over the odd "
        "annular basis with the stated coefficients",
        [gpa.fourier(x) for x in sys.s4_plus],
        figure_basis_minus(sys),
        _table_one_even_rows(),
        tol,
    )
    _entrywise_table_check(
        rep,
        "table-one-odd",
        "one-click images of the odd four-box projections expand over the "
        "even annular basis with the stated coefficients",
        [gpa.fourier(x) for x in sys.s4_minus],
        sys.basis_plus,
        _table_one_odd_rows(),
        tol,
    )
    rep.note_correction(
        "table-one-odd-damaged-entry",
        "one printed coefficient in the third row is typeset with an empty "
        "numerator; the recomputed value restores the row symmetry",
        "+(1/8)*sqrt(3-sqrt(5))",
    )
    rep.note_correction(
        "odd-basis-sign",
        "the first odd basis element appears in print with the opposite "
        "sign; the working sign is the one under which the sandwich "
        "construction of the odd projections succeeds",
        "printed element = -(working element)",
    )

    even_row, odd_row = _table_two_rows()
    even_family = list(sys.s4_plus) + [sys.cups_plus[i] for i in range(1, 8)]
    odd_family = list(sys.s4_minus) + [sys.cups_minus[i] for i in range(1, 8)]
    even_res = (
        sys.cups_plus[0] - gpa.linear_combination(zip(even_row, even_family))
    ).norm()
    odd_res = (
        sys.cups_minus[0] - gpa.linear_combination(zip(odd_row, odd_family))
    ).norm()
    rep.check(
        "table-two-even",
        "the closing cup of the generator equals the stated combination of "
        "the units and the remaining cups",
        even_res,
        tol,
    )
    rep.check(
        "table-two-odd",
        "the closing cup of the shaded generator equals the stated "
        "combination of the odd projections and the remaining cups",
        odd_res,
        tol,
    )
    rep.note_correction(
        "table-two-sign",
        "both published rows hold only after negating the entire printed "
        "right-hand side; the frozen coefficients above include that sign",
        "working row = -(printed row)",
    )
    return rep


# -- verification: substitution identities -------------------------------------


def verify_jellyfish(sys: RelationSystem) -> Report:
    """The one-strand substitution identities driving the evaluation algorithm."""
    rep = Report("substitution-identities")
    tol = _tol25()
    tol30 = _tol30()
    r5 = scalars.sqrt_pos(5)
    ptr = gpa.partial_trace_right
    incl = gpa.include_right
    comp = gpa.comp_circ
    e11, e12, e21, e22 = sys.s4_plus
    em1, em2, em3, em4 = sys.s4_minus
    f11, f12, f21, f22 = sys.s5_plus
    fm11, fm12, fm21, fm22 = sys.s5_minus
    g11, g12, g21, g22 = sys.s6_plus

    c3 = scalars.named_constant("three_box_ptrace")
    rep.check(
        "generator-from-units",
        "the generator is the scaled difference of the partial traces of the "
        "diagonal four-box units",
        (sys.t - c3 * (ptr(e11) - ptr(e22))).norm(),
        tol,
    )

    c4 = scalars.named_constant("four_box_correction")
    ptr_four = max(
        (ptr(e11) - c4 * sys.e3_plus[0]).norm(),
        (ptr(e22) - c4 * sys.e3_plus[1]).norm(),
    )
    rep.check(
        "four-box-partial-trace",
        "partial traces of the diagonal four-box units scale the three-box "
        "projections",
        ptr_four,
        tol,
    )

    c5p = scalars.named_constant("five_box_ptrace")
    rep.check(
        "five-box-partial-trace",
        "partial traces of the five-box units scale the four-box units",
        max((ptr(f) - c5p * e).norm() for f, e in zip(sys.s5_plus, sys.s4_plus)),
        tol,
    )

    cm_tr = scalars.sqrt_pos(3 + r5) / ((3 + r5) / 2)
    rep.check(
        "odd-five-box-partial-trace",
        "partial traces of the odd five-box diagonal units scale the inner "
        "odd four-box projections",
        max((ptr(fm11) - cm_tr * em2).norm(), (ptr(fm22) - cm_tr * em3).norm()),
        tol,
    )
    cm4_tr = ((3 + r5) / 2) / scalars.named_constant("sqrt_7_plus_3sqrt5")
    rep.check(
        "odd-four-box-partial-trace",
        "partial traces of the inner odd four-box projections scale the odd "
        "three-box projections",
        max(
            (ptr(em2) - cm4_tr * sys.e3_minus[0]).norm(),
            (ptr(em3) - cm4_tr * sys.e3_minus[1]).norm(),
        ),
        tol,
    )
    c6p = scalars.named_constant("six_box_ptrace")
    rep.check(
        "six-box-partial-trace",
        "partial traces of the six-box units scale the five-box units",
        max((ptr(g) - c6p * f).norm() for g, f in zip(sys.s6_plus, sys.s5_plus)),
        tol,
    )

    c5 = scalars.named_constant("three_box_ptrace")
    rep.check(
        "inclusion-four-to-five",
        "including the off-diagonal four-box unit recovers its five-box lift "
        "plus the correcting composition",
        (incl(e12) - f12 - c5 * comp(e11 + e12, e12 + e22)).norm(),
        tol,
    )
    cm5 = scalars.named_constant("five_box_minus_correction")
    rep.check(
        "inclusion-odd-four-to-five",
        "including the inner odd projections recovers their five-box lifts "
        "plus the correcting compositions",
        max(
            (incl(em2) - fm11 - cm5 * comp(em2, em2)).norm(),
            (incl(em3) - fm22 - cm5 * comp(em3, em3)).norm(),
        ),
        tol,
    )
    c6 = scalars.named_constant("six_box_correction")
    rep.check(
        "inclusion-five-to-six",
        "including the off-diagonal five-box unit recovers its six-box lift "
        "plus the correcting composition",
        (incl(f12) - g12 - c6 * comp(f11, f12)).norm(),
        tol,
    )
    cpos = scalars.named_constant("positivity_coeff")
    rep.check(
        "outer-odd-positivity",
        "including an outer odd projection equals the scaled composition "
        "with itself",
        max(
            (incl(em1) - cpos * comp(em1, em1)).norm(),
            (incl(em4) - cpos * comp(em4, em4)).norm(),
        ),
        tol,
    )

    t_inc = incl(sys.t)
    absorb = max(
        (e11 * t_inc - e11).norm(),
        (e21 * t_inc - e21).norm(),
        (e12 * t_inc + e12).norm(),
        (e22 * t_inc + e22).norm(),
    )
    rep.check(
        "absorption",
        "right multiplication by the included generator fixes first-column "
        "units and negates second-column units",
        absorb,
        tol30,
    )

    witnesses = list(sys.s6_plus)
    for u in sys.s5_plus:
        for v in sys.s5_plus:
            witnesses.append(comp(u, v))
    for x in sys.s4_plus:
        for y in sys.s4_plus:
            witnesses.append(incl(comp(x, y)))
    worst = gmpy2.mpfr(0)
    for x in sys.s4_plus:
        _, res = gpa.span_membership(incl(incl(x)), witnesses)
        worst = max(worst, res)
    rep.check(
        "two-strand-substitution",
        "twice-included four-box units lie in the span of six-box units, "
        "compositions of five-box units, and included compositions of "
        "four-box units",
        worst,
        tol,
    )
    return rep


# -- coefficient extraction and parameter independence --------------------------


def extract_relation_coefficients(sys: RelationSystem) -> list:
    """Canonically ordered vector of every fitted relation coefficient.

    The entries are computed from the system by least-squares fits over
    linearly independent families, so the vector is well defined; it is the
    object whose invariance across generator parameters and under the sign
    automorphism expresses parameter independence of the relations.
    """
    out: list = []
    half4 = lambda x: gpa.fourier_power(x, 4)
    half5 = lambda x: gpa.fourier_power(x, 5)
    half6 = lambda x: gpa.fourier_power(x, 6)

    for x in sys.s4_plus:
        coeffs, _ = _fit_over(gpa.fourier(x), figure_basis_minus(sys))
        out.extend(coeffs)
    for x in sys.s4_minus:
        coeffs, _ = _fit_over(gpa.fourier(x), sys.basis_plus)
        out.extend(coeffs)
    for x in sys.s4_plus:
        coeffs, _ = _fit_over(half4(x), list(sys.s4_plus))
        out.extend(coeffs)
    for x in sys.s4_minus:
        coeffs, _ = _fit_over(half4(x), list(sys.s4_minus))
        out.extend(coeffs)
    for x in sys.s5_minus:
        coeffs, _ = _fit_over(half5(x), list(sys.s5_plus))
        out.extend(coeffs)
    for x in sys.s6_plus:
        coeffs, _ = _fit_over(half6(x), list(sys.s6_plus))
        out.extend(coeffs)

    ptr = gpa.partial_trace_right
    incl = gpa.include_right
    single_fits = [
        (sys.t, [ptr(sys.s4_plus[0]) - ptr(sys.s4_plus[3])]),
        (ptr(sys.s4_plus[0]), [sys.e3_plus[0]]),
        (ptr(sys.s5_plus[0]), [sys.s4_plus[0]]),
        (ptr(sys.s5_minus[0]), [sys.s4_minus[1]]),
        (ptr(sys.s4_minus[1]), [sys.e3_minus[0]]),
        (ptr(sys.s6_plus[0]), [sys.s5_plus[0]]),
        (incl(sys.s4_minus[0]), [gpa.comp_circ(sys.s4_minus[0], sys.s4_minus[0])]),
    ]
    for target, family in single_fits:
        coeffs, _ = _fit_over(target, family)
        out.extend(coeffs)

    t_inc = incl(sys.t)
    for x in sys.s4_plus:
        coeffs, _ = _fit_over(x * t_inc, list(sys.s4_plus))
        out.extend(coeffs)
    return out


def compare_coefficients(left: list, right: list):
    """Largest entrywise deviation between two extracted coefficient vectors."""
    if len(left) != len(right):
        raise ValueError("coefficient vectors have different lengths")
    worst = gmpy2.mpfr(0)
    for x, y in zip(left, right):
        worst = max(worst, abs(gmpy2.mpc(x) - gmpy2.mpc(y)))
    return worst


def verify_lambda_independence(lams=None) -> Report:
    """Relation coefficients agree across generator parameters."""
    if lams is None:
        lams = [
            gmpy2.mpc(1),
            scalars.imag_unit(),
            gmpy2.exp(scalars.imag_unit() * gmpy2.const_pi() / 7),
        ]
    rep = Report("parameter-independence")
    tol = _tol25()
    base = None
    base_label = None
    for lam in lams:
        sys = build_relation_system(lam=lam)
        coeffs = extract_relation_coefficients(sys)
        z = gmpy2.mpc(lam)
        label = "%.6g%+.6gi" % (float(scalars.re_part(z)), float(scalars.im_part(z)))
        if base is None:
            base, base_label = coeffs, label
            continue
        rep.check(
            f"coefficients-{label}",
            f"relation coefficients at parameter {label} match those at "
            f"{base_label}",
            compare_coefficients(base, coeffs),
            tol,
        )
    return rep


# -- the sign automorphism ------------------------------------------------------


def negated_system(sys: RelationSystem) -> RelationSystem:
    """The relation system built over the negated generator."""
    gen = sys.generator
    neg = Generator(
        element=-1 * gen.element,
        omega=gen.omega,
        table=None,
        lam=gen.lam,
    )
    return build_relation_system(gen=neg)


def verify_automorphism(sys: RelationSystem, neg: RelationSystem | None = None) -> Report:
    """Negating the generator swaps the units by the stated permutation."""
    if neg is None:
        neg = negated_system(sys)
    rep = Report("sign-automorphism")
    tol = _tol25()

    swaps = [
        ("three-box", sys.e3_plus, neg.e3_plus, (1, 0)),
        ("odd-three-box", sys.e3_minus, neg.e3_minus, (1, 0)),
        ("four-box", sys.s4_plus, neg.s4_plus, (3, 2, 1, 0)),
        ("odd-four-box", sys.s4_minus, neg.s4_minus, (3, 2, 1, 0)),
        ("five-box", sys.s5_plus, neg.s5_plus, (3, 2, 1, 0)),
        ("odd-five-box", sys.s5_minus, neg.s5_minus, (3, 2, 1, 0)),
        ("six-box", sys.s6_plus, neg.s6_plus, (3, 2, 1, 0)),
    ]
    for tag, orig, new, perm in swaps:
        worst = max((new[i] - orig[p]).norm() for i, p in enumerate(perm))
        rep.check(
            f"swap-{tag}",
            f"negating the generator permutes the {tag} units by index reversal",
            worst,
            tol,
        )
    for name, x, y in (
        ("A", sys.a, neg.a),
        ("B", sys.b, neg.b),
        ("A-check", sys.a_check, neg.a_check),
        ("B-check", sys.b_check, neg.b_check),
    ):
        rep.check(
            f"fixed-{name}",
            f"the uncappable element {name} is invariant under the sign "
            "automorphism",
            (x - y).norm(),
            tol,
        )

    fit_orig = [
        _fit_over(gpa.fourier(x), figure_basis_minus(sys))[0] for x in sys.s4_plus
    ]
    fit_neg = [
        _fit_over(gpa.fourier(x), figure_basis_minus(neg))[0] for x in neg.s4_plus
    ]
    worst = gmpy2.mpfr(0)
    for r in range(4):
        expected = list(fit_orig[3 - r][:3]) + [-c for c in fit_orig[3 - r][3:]]
        for c, e in zip(fit_neg[r], expected):
            worst = max(worst, abs(gmpy2.mpc(c) - gmpy2.mpc(e)))
    rep.check(
        "table-one-prescription",
        "the coefficient table of the negated system is the original with "
        "rows reversed and cup columns negated",
        worst,
        tol,
    )

    even_row, _ = _table_two_rows()
    rev_units = list(reversed(even_row[:4]))
    family = list(sys.s4_plus) + [sys.cups_plus[i] for i in range(1, 8)]
    flipped = gpa.linear_combination(
        zip(rev_units + [-c for c in even_row[4:]], family)
    )
    rep.check(
        "table-two-prescription",
        "over the original elements, the closing-cup row of the negated "
        "system is the original row with the unit coefficients reversed and "
        "the cup coefficients negated",
        (neg.cups_plus[0] - flipped).norm(),
        tol,
    )
    return rep


# -- principal graph -------------------------------------------------------------


def verify_principal_graph(sys: RelationSystem) -> Report:
    """Dimension and trace data of the planar subalgebra the generator builds."""
    rep = Report("principal-graph")
    tol = _tol30()
    graph = sys.t.space.graph

    from .bigraph import loop_count_at_vertex

    dims = gpa.subalgebra_closure([sys.t], 5)
    expected = [loop_count_at_vertex(graph, 0, 2 * n) for n in range(6)]
    ok = all(dims.get((n, 0), 0) == expected[n] for n in range(6))
    rep.expect_true(
        "closure-dimensions",
        "the subalgebra generated by the one generator has box dimensions "
        f"{expected} at indices 0..5, matching the loop counts at the root",
        ok,
    )

    tl3 = [gpa.tl_embed(d, graph, 0).to_float() for d in gpa.all_tl_diagrams(3)]
    mat = np.array([x.flatten() for x in tl3])
    tl3_rank = np.linalg.matrix_rank(mat.astype(np.complex128), tol=1e-8)
    rep.expect_true(
        "new-three-box-dimension",
        "exactly one dimension of the three-box space lies outside the "
        "diagrammatic span",
        dims.get((3, 0), 0) - int(tl3_rank) == 1,
    )

    tl4 = [gpa.tl_embed(d, graph, 0).to_float() for d in gpa.all_tl_diagrams(4)]
    annular = [c.to_float() for c in sys.cups_plus]
    lower = np.array([x.flatten() for x in tl4 + annular]).astype(np.complex128)
    lower_rank = int(np.linalg.matrix_rank(lower, tol=1e-8))
    with_units = np.vstack(
        [lower, np.array([x.to_float().flatten() for x in sys.s4_plus]).astype(np.complex128)]
    )
    full_rank = int(np.linalg.matrix_rank(with_units, tol=1e-8))
    rep.expect_true(
        "depth-four-block",
        "the four-box units span a single two-by-two block beyond the "
        "diagrammatic and annular parts, and together these fill the "
        "closure dimension",
        full_rank == dims.get((4, 0), 0) and full_rank - lower_rank == 2,
    )

    pf = gpa.graph_pf(graph)
    depth_reps = {
        3: sys.e3_plus[0],
        4: sys.s4_plus[0],
        5: sys.s5_plus[0],
        6: sys.s6_plus[0],
    }
    worst = gmpy2.mpfr(0)
    for depth, el in depth_reps.items():
        verts = graph.vertices_at(depth)
        mu = pf.weight(verts[0])
        worst = max(worst, abs(el.trace() - mu))
    rep.check(
        "trace-vector",
        "the minimal projection at each depth has trace equal to the "
        "eigenvector weight of the matching graph vertex",
        worst,
        tol,
    )
    return rep


def run_full_suite(sys: RelationSystem | None = None, with_negation: bool = True) -> Report:
    """Every verification over one relation system, merged into one report."""
    if sys is None:
        sys = build_relation_system()
    rep = Report("relation-suite")
    rep.merge(verify_AB(sys))
    rep.merge(verify_matrix_units(sys))
    rep.merge(verify_rotation_matrices(sys))
    rep.merge(verify_figures(sys))
    rep.merge(verify_jellyfish(sys))
    rep.merge(verify_principal_graph(sys))
    if with_negation:
        rep.merge(verify_automorphism(sys))
    return rep

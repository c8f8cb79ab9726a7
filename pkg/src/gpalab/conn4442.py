"""Bi-unitary connection solve for the 4442 bipartite graph pair.

The branch matrix of the 4442 connection is a 4 x 4 unitary whose entries
are fixed positive reals built from the quantum integers A = [5], B = [4],
C = 3[2], times nine unknown unit-modulus phases.  This module builds the
matrix, measures its unitarity defect, solves for the phases by seeded
Gauss-Newton iteration on the torus of phase angles, and classifies the
solutions: there are exactly two, complex conjugate to each other and
exchanged by simultaneously swapping the second and third rows and columns.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import gmpy2
import numpy as np

from . import scalars
from .report import Report

PHASE_NAMES = ("xi1", "xi2", "xi3", "xi4", "eta1", "eta2", "eta3", "eta4", "zeta")

# positions of the nine phases inside the 4 x 4 branch matrix
PHASE_POSITIONS = {
    "xi1": (1, 1),
    "xi2": (1, 2),
    "xi3": (2, 1),
    "xi4": (2, 2),
    "eta1": (1, 3),
    "eta2": (2, 3),
    "eta3": (3, 1),
    "eta4": (3, 2),
    "zeta": (3, 3),
}


class SearchFailure(RuntimeError):
    """The seeded phase search found no unitary point."""


class ClassificationError(RuntimeError):
    """The solution set does not match the expected two-cluster structure."""


def branch_constants() -> tuple[gmpy2.mpfr, gmpy2.mpfr, gmpy2.mpfr]:
    """The quantum-integer constants (A, B, C) = ([5], [4], 3[2])."""
    ctx = scalars.default_quantum_context()
    return (
        ctx.quantum_integer(5),
        ctx.quantum_integer(4),
        3 * ctx.quantum_integer(2),
    )


@dataclass(frozen=True)
class PhaseSolution:
    """The nine unit-modulus phases of the 4442 branch matrix."""

    xi1: gmpy2.mpc
    xi2: gmpy2.mpc
    xi3: gmpy2.mpc
    xi4: gmpy2.mpc
    eta1: gmpy2.mpc
    eta2: gmpy2.mpc
    eta3: gmpy2.mpc
    eta4: gmpy2.mpc
    zeta: gmpy2.mpc

    def as_tuple(self) -> tuple[gmpy2.mpc, ...]:
        return tuple(getattr(self, name) for name in PHASE_NAMES)

    def modulus_defect(self) -> gmpy2.mpfr:
        return max(abs(scalars.modulus(z) - 1) for z in self.as_tuple())

    def conjugate(self) -> "PhaseSolution":
        return PhaseSolution(*(scalars.conj(z) for z in self.as_tuple()))

    def angles(self) -> np.ndarray:
        """Phase angles in radians, as float64 (for clustering distances)."""
        return np.array(
            [math.atan2(float(scalars.im_part(z)), float(scalars.re_part(z)))
             for z in self.as_tuple()]
        )

    @staticmethod
    def from_values(values) -> "PhaseSolution":
        return PhaseSolution(*(gmpy2.mpc(v) for v in values))

    @staticmethod
    def all_ones() -> "PhaseSolution":
        return PhaseSolution.from_values([1] * 9)

    @staticmethod
    def reference() -> "PhaseSolution":
        """The closed-form solution with Im(xi1) < 0."""
        r15 = scalars.sqrt_pos(15)
        r5 = scalars.sqrt_pos(5)
        xi1 = scalars.csqrt(scalars.comp(gmpy2.mpfr(-11) / 16, -3 * r15 / 16))
        xi4 = scalars.conj(xi1)
        inner = scalars.comp(
            (-1 - 3 * r5) / 2, -scalars.sqrt_pos(6 * (3 - r5)) / 2
        )
        eta1 = -scalars.csqrt(inner) / 2
        eta2 = scalars.conj(eta1)
        minus_one = gmpy2.mpc(-1)
        return PhaseSolution(
            xi1=xi1,
            xi2=minus_one,
            xi3=minus_one,
            xi4=xi4,
            eta1=eta1,
            eta2=eta2,
            eta3=eta1,
            eta4=eta2,
            zeta=gmpy2.mpc(1),
        )


@dataclass(frozen=True)
class BranchMatrix:
    """The 4442 branch matrix: constants A, B, C and the 4 x 4 entry grid."""

    a: gmpy2.mpfr
    b: gmpy2.mpfr
    c: gmpy2.mpfr
    entries: tuple

    def entry(self, i: int, j: int) -> gmpy2.mpc:
        """Matrix entry with 1-based row and column indices."""
        if not (1 <= i <= 4 and 1 <= j <= 4):
            raise IndexError("branch matrix indices run from 1 to 4")
        return self.entries[i - 1][j - 1]

    def as_array(self) -> np.ndarray:
        return np.array(
            [[complex(self.entries[i][j]) for j in range(4)] for i in range(4)]
        )

    def quantum_relation_residual(self) -> gmpy2.mpfr:
        """|1 + 2B^2 + BC - A^2|, the phase-free norm of the first row."""
        return abs(1 + 2 * self.b ** 2 + self.b * self.c - self.a ** 2)


def build_branch_matrix(phases: PhaseSolution, tol=None) -> BranchMatrix:
    """Assemble the branch matrix (1/A) M for the given nine phases."""
    if tol is None:
        tol = gmpy2.mpfr(10) ** -30
    if phases.modulus_defect() > tol:
        raise ValueError("branch matrix phases must have unit modulus")
    a, b, c = branch_constants()
    s = scalars.sqrt_pos(b * c)
    x1, x2, x3, x4, h1, h2, h3, h4, z = phases.as_tuple()
    m = (
        (gmpy2.mpc(-1), gmpy2.mpc(b), gmpy2.mpc(b), gmpy2.mpc(s)),
        (gmpy2.mpc(b), b * x1, x2, s * h1),
        (gmpy2.mpc(b), x3, b * x4, s * h2),
        (gmpy2.mpc(s), s * h3, s * h4, 3 * z),
    )
    entries = tuple(tuple(v / a for v in row) for row in m)
    return BranchMatrix(a=a, b=b, c=c, entries=entries)


def unitarity_residual(phases: PhaseSolution) -> gmpy2.mpfr:
    """Frobenius norm of U*U - I for the branch matrix U of the phases."""
    u = build_branch_matrix(phases, tol=gmpy2.mpfr("0.5")).entries
    total = gmpy2.mpfr(0)
    for i in range(4):
        for j in range(4):
            acc = gmpy2.mpc(0)
            for k in range(4):
                acc += scalars.conj(u[k][i]) * u[k][j]
            if i == j:
                acc -= 1
            total += scalars.modulus(acc) ** 2
    return scalars.sqrt_pos(total)


def _float_matrix_parts():
    """Constant part and per-phase coefficient masks of M/A as float64."""
    a, b, c = branch_constants()
    af, bf = float(a), float(b)
    sf = float(scalars.sqrt_pos(b * c))
    const = np.array(
        [
            [-1.0, bf, bf, sf],
            [bf, 0.0, 0.0, 0.0],
            [bf, 0.0, 0.0, 0.0],
            [sf, 0.0, 0.0, 0.0],
        ]
    ) / af
    coeff = np.array(
        [
            [0.0, 0.0, 0.0, 0.0],
            [0.0, bf, 1.0, sf],
            [0.0, 1.0, bf, sf],
            [0.0, sf, sf, 3.0],
        ]
    ) / af
    return const, coeff


def _angles_to_matrix(theta: np.ndarray, const: np.ndarray, coeff: np.ndarray) -> np.ndarray:
    u = const.astype(complex).copy()
    for k, name in enumerate(PHASE_NAMES):
        i, j = PHASE_POSITIONS[name]
        u[i, j] = coeff[i, j] * np.exp(1j * theta[k])
    return u


def _residual_and_jacobian(theta: np.ndarray, const: np.ndarray, coeff: np.ndarray):
    """Real residual vector of U*U - I and its analytic Jacobian in theta.

    Each phase appears in exactly one entry of U, so dU/dtheta_k has a single
    nonzero entry i * U[i, j], and d(U*U)/dtheta_k = dU* U + U* dU.
    """
    u = _angles_to_matrix(theta, const, coeff)
    g = u.conj().T @ u - np.eye(4)
    resid = np.concatenate([g.real.ravel(), g.imag.ravel()])
    jac = np.empty((32, 9))
    for k, name in enumerate(PHASE_NAMES):
        i, j = PHASE_POSITIONS[name]
        du = np.zeros((4, 4), dtype=complex)
        du[i, j] = 1j * u[i, j]
        dg = du.conj().T @ u + u.conj().T @ du
        jac[:, k] = np.concatenate([dg.real.ravel(), dg.imag.ravel()])
    return resid, jac


def _gauss_newton_float(theta: np.ndarray, const, coeff, max_iter: int = 80):
    for _ in range(max_iter):
        resid, jac = _residual_and_jacobian(theta, const, coeff)
        if np.linalg.norm(resid) < 1e-13:
            return theta, np.linalg.norm(resid)
        step, *_ = np.linalg.lstsq(jac, -resid, rcond=None)
        if np.linalg.norm(step) > 10:
            step = step * (10 / np.linalg.norm(step))
        theta = theta + step
    resid, _ = _residual_and_jacobian(theta, const, coeff)
    return theta, np.linalg.norm(resid)


def _solve_normal_equations(jac: list, rhs: list) -> list:
    """Least-squares step from the 9 x 9 normal equations in exact scalars."""
    m = len(jac)
    n = len(jac[0])
    ata = [[sum(jac[r][i] * jac[r][j] for r in range(m)) for j in range(n)]
           for i in range(n)]
    atb = [sum(jac[r][i] * rhs[r] for r in range(m)) for i in range(n)]
    for col in range(n):
        piv = max(range(col, n), key=lambda r: abs(ata[r][col]))
        ata[col], ata[piv] = ata[piv], ata[col]
        atb[col], atb[piv] = atb[piv], atb[col]
        if ata[col][col] == 0:
            continue
        for r in range(col + 1, n):
            f = ata[r][col] / ata[col][col]
            for cc in range(col, n):
                ata[r][cc] -= f * ata[col][cc]
            atb[r] -= f * atb[col]
    sol = [gmpy2.mpfr(0)] * n
    for r in range(n - 1, -1, -1):
        if ata[r][r] == 0:
            continue
        acc = atb[r] - sum(ata[r][cc] * sol[cc] for cc in range(r + 1, n))
        sol[r] = acc / ata[r][r]
    return sol


def _unitarity_rows(u) -> list:
    """The sixteen entries of U*U - I, row-major."""
    rows = []
    for i in range(4):
        for j in range(4):
            acc = gmpy2.mpc(0)
            for k in range(4):
                acc += scalars.conj(u[k][i]) * u[k][j]
            if i == j:
                acc -= 1
            rows.append(acc)
    return rows


def _exact_phase_refine(theta: np.ndarray, target_exponent: int = -50, max_iter: int = 60):
    """High-precision Gauss-Newton on the angle vector, returns PhaseSolution.

    The unitarity Jacobian at each solution has a one-dimensional null space
    (the solutions are isolated only at second order along it), so plain
    Gauss-Newton converges linearly at rate exactly 1/2 in that direction.
    Doubling every second step is an Aitken extrapolation that cancels the
    geometric tail and restores quadratic convergence; the linear algebra
    runs at working precision because a float64 Jacobian floors out near
    residual 1e-27.
    """
    ang = [gmpy2.mpfr(float(t)) for t in theta]
    target = gmpy2.mpfr(10) ** target_exponent

    def assemble(angles):
        phases = PhaseSolution(
            *(gmpy2.exp(scalars.imag_unit() * t) for t in angles)
        )
        return build_branch_matrix(phases, tol=gmpy2.mpfr("0.5")), phases

    for it in range(max_iter):
        bm, phases = assemble(ang)
        u = bm.entries
        rows = _unitarity_rows(u)
        resid_norm = scalars.sqrt_pos(
            sum(scalars.modulus(v) ** 2 for v in rows)
        )
        if resid_norm < target:
            return phases, resid_norm
        rvec = []
        for v in rows:
            rvec.append(-scalars.re_part(v))
            rvec.append(-scalars.im_part(v))
        jac = [[gmpy2.mpfr(0)] * 9 for _ in range(32)]
        for k, name in enumerate(PHASE_NAMES):
            pi, pj = PHASE_POSITIONS[name]
            du = scalars.imag_unit() * u[pi][pj]
            r = 0
            for i in range(4):
                for j in range(4):
                    acc = gmpy2.mpc(0)
                    if i == pj:
                        acc += scalars.conj(du) * u[pi][j]
                    if j == pj:
                        acc += scalars.conj(u[pi][i]) * du
                    jac[2 * r][k] = scalars.re_part(acc)
                    jac[2 * r + 1][k] = scalars.im_part(acc)
                    r += 1
        step = _solve_normal_equations(jac, rvec)
        factor = 2 if it % 2 == 1 else 1
        ang = [t + factor * d for t, d in zip(ang, step)]
    bm, phases = assemble(ang)
    return phases, unitarity_residual(phases)


def _angle_distance(a: np.ndarray, b: np.ndarray) -> float:
    d = np.angle(np.exp(1j * (a - b)))
    return float(np.linalg.norm(d))


@dataclass
class SolveResult:
    """Output of the seeded phase search."""

    solutions: list[PhaseSolution]
    residuals: list[gmpy2.mpfr]
    cluster_sizes: list[int]
    num_starts: int
    converged: int


def solve_phases(seed: int = 0, num_starts: int = 500,
                 cluster_radius: float = 1e-8) -> SolveResult:
    """Search for unit-phase assignments making the branch matrix unitary.

    Runs Gauss-Newton from num_starts random points on the 9-torus of phase
    angles, refines every float-converged point to high precision, and
    clusters the refined angle vectors.  Raises SearchFailure when nothing
    converges.
    """
    if num_starts < 200:
        raise ValueError("solve_phases needs at least 200 starts")
    rng = np.random.default_rng(seed)
    const, coeff = _float_matrix_parts()
    reps: list[np.ndarray] = []
    members: list[int] = []
    refined: list[PhaseSolution] = []
    residuals: list[gmpy2.mpfr] = []
    converged = 0
    for _ in range(num_starts):
        theta0 = rng.uniform(0.0, 2.0 * np.pi, size=9)
        theta, resid = _gauss_newton_float(theta0, const, coeff)
        if resid > 1e-12:
            continue
        converged += 1
        theta = np.mod(theta, 2.0 * np.pi)
        hit = None
        for idx, rep in enumerate(reps):
            if _angle_distance(theta, rep) < 1e-6:
                hit = idx
                break
        if hit is not None:
            members[hit] += 1
            continue
        phases, exact_resid = _exact_phase_refine(theta)
        fine = phases.angles()
        for idx in range(len(reps)):
            if _angle_distance(fine, refined[idx].angles()) < cluster_radius:
                hit = idx
                break
        if hit is not None:
            members[hit] += 1
            continue
        reps.append(theta)
        members.append(1)
        refined.append(phases)
        residuals.append(exact_resid)
    if not refined:
        raise SearchFailure("no unitary phase assignment found")
    order = np.argsort([float(scalars.im_part(p.xi1)) for p in refined])
    return SolveResult(
        solutions=[refined[i] for i in order],
        residuals=[residuals[i] for i in order],
        cluster_sizes=[members[i] for i in order],
        num_starts=num_starts,
        converged=converged,
    )


def _swap_rows_cols_23(phases: PhaseSolution) -> PhaseSolution:
    """The phase relabeling induced by swapping rows and columns 2 and 3."""
    return PhaseSolution(
        xi1=phases.xi4,
        xi2=phases.xi3,
        xi3=phases.xi2,
        xi4=phases.xi1,
        eta1=phases.eta2,
        eta2=phases.eta1,
        eta3=phases.eta4,
        eta4=phases.eta3,
        zeta=phases.zeta,
    )


def _rigidity_probe(phases: PhaseSolution) -> tuple[float, float, float]:
    """Isolation data at a solution: (second-smallest sv, smallest sv, growth).

    The unitarity Jacobian has exactly one null direction; the solution is
    still isolated because the residual grows quadratically along it.  The
    growth value is the residual at distance 1e-4 along the null direction,
    normalized by the squared distance, so an exactly flat family would give
    a value near zero.
    """
    const, coeff = _float_matrix_parts()
    theta = phases.angles()
    _, jac = _residual_and_jacobian(theta, const, coeff)
    svals, vecs = np.linalg.svd(jac)[1:]
    null_dir = vecs[-1]
    eps = 1e-4
    growth = []
    for sign in (1.0, -1.0):
        resid, _ = _residual_and_jacobian(theta + sign * eps * null_dir, const, coeff)
        growth.append(np.linalg.norm(resid) / eps ** 2)
    return float(svals[-2]), float(svals[-1]), min(growth)


def verify_solutions(result: SolveResult) -> Report:
    """Check the two-cluster classification of the phase search output."""
    rep = Report("conn4442")
    tol30 = gmpy2.mpfr(10) ** -30
    tol25 = gmpy2.mpfr(10) ** -25
    rep.expect_true(
        "cluster_count",
        "the seeded search finds exactly two solution clusters",
        len(result.solutions) == 2,
    )
    if len(result.solutions) != 2:
        raise ClassificationError(
            f"expected 2 solution clusters, found {len(result.solutions)}"
        )
    for i, (sol, resid) in enumerate(zip(result.solutions, result.residuals)):
        rep.check(
            f"unitary_{i}",
            "refined branch matrix is unitary",
            resid,
            tol30,
        )
        rep.check(
            f"unit_modulus_{i}",
            "all nine phases have unit modulus",
            sol.modulus_defect(),
            tol30,
        )
        sv8, sv9, growth = _rigidity_probe(sol)
        rep.expect_true(
            f"rigidity_{i}",
            "unitarity Jacobian has rank 8 and the residual grows "
            "quadratically along its single null direction (isolated point)",
            sv8 > 0.01 and growth > 1e-3,
        )
        rep.note_correction(
            f"rigidity_detail_{i}",
            "second-smallest/smallest singular value and quadratic growth "
            "rate along the null direction",
            f"{sv8:.6f} / {sv9:.3e} / {growth:.6f}",
        )
    sol_a, sol_b = result.solutions
    conj_defect = max(
        scalars.modulus(x - scalars.conj(y))
        for x, y in zip(sol_a.as_tuple(), sol_b.as_tuple())
    )
    rep.check(
        "conjugate_pair",
        "the two solutions are entrywise complex conjugates",
        conj_defect,
        tol25,
    )
    swapped = _swap_rows_cols_23(sol_a)
    swap_defect = max(
        scalars.modulus(x - y)
        for x, y in zip(swapped.as_tuple(), sol_b.as_tuple())
    )
    rep.check(
        "swap_symmetry",
        "swapping rows and columns 2 and 3 maps one solution to the other",
        swap_defect,
        tol25,
    )
    ref = PhaseSolution.reference()
    neg = sol_a if float(scalars.im_part(sol_a.xi1)) < 0 else sol_b
    closed_defect = max(
        scalars.modulus(x - y)
        for x, y in zip(neg.as_tuple(), ref.as_tuple())
    )
    rep.check(
        "closed_form",
        "the Im(xi1) < 0 solution matches the closed-form phase list",
        closed_defect,
        tol25,
    )
    dec = {
        "xi1": complex(0.395285, -0.918559),
        "eta1": complex(-0.135045, 0.990839),
    }
    for name, ref_val in dec.items():
        got = complex(getattr(neg, name))
        rep.check(
            f"decimal_{name}",
            f"{name} matches the six-digit reference decimals",
            abs(got - ref_val),
            gmpy2.mpfr(10) ** -5,
        )
    for name, want in (("xi2", -1), ("xi3", -1), ("zeta", 1)):
        rep.check(
            f"fixed_{name}",
            f"{name} equals {want} in both solutions",
            max(scalars.modulus(getattr(s, name) - want) for s in result.solutions),
            tol25,
        )
    if not rep.passed:
        raise ClassificationError(
            "solution classification failed: "
            + "; ".join(r.name for r in rep.failures())
        )
    return rep


def reference_constants() -> dict:
    """Unverified eigenvector reference constants, emitted for completeness."""
    r5 = scalars.sqrt_pos(5)
    alpha = -1 - r5 / 3
    beta = scalars.comp((3 + r5) / 6, scalars.sqrt_pos((5 + r5) / 10))
    return {
        "alpha": alpha,
        "beta": beta,
        "eigenvalue": gmpy2.exp(scalars.imag_unit() * 2 * gmpy2.const_pi() * 3 / 5),
        "verified": False,
    }


def run_connection_suite(seed: int = 0, num_starts: int = 500) -> Report:
    """Solve the 4442 phases and verify the two-solution classification."""
    result = solve_phases(seed=seed, num_starts=num_starts)
    rep = verify_solutions(result)
    bm = build_branch_matrix(result.solutions[0])
    rep.check(
        "quantum_relation",
        "1 + 2 B^2 + B C = A^2 for A = [5], B = [4], C = 3 [2]",
        bm.quantum_relation_residual(),
        gmpy2.mpfr(10) ** -40,
    )
    return rep

"""Solving for the uncappable rotation-eigenvector generator on the
chain-diamond-chain graph.

The generator is a self-adjoint 3-box, an eigenvector of the two-click
rotation, with every boundary capping zero, pinned by a 24-entry table of
coefficients on the loops that stay inside the diamond.  Those linear
constraints are assembled into one sparse real system over the 304 real
coordinates (real and imaginary parts of the 152 basis coefficients) and
solved by a float-factored, exactly-refined least squares.  A Gauss-Newton
search over the kernel of the homogeneous part recovers the full solution
variety of the quadratic relation (square equals the Jones-Wenzl 3-box) and
matches every solution back to the one-parameter family.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import gmpy2
import numpy as np

from . import gpa, linalg, scalars
from .bigraph import twod2_graph

# Depth-2 and depth-3 vertices of the chain-diamond-chain graph, by the
# compass letters used in the coefficient-table labels.
LOOP_LETTERS = {"W": 2, "S": 3, "N": 4, "E": 5}

# The 24 labels, each a closed 6-step walk around the diamond read as
# v0 v1 .. v5 (v5 adjacent to v0), in a fixed deterministic order.
DIAMOND_LABELS = (
    "WSWSWS", "WSWSWN", "WSWSES", "WSWSEN",
    "WSWNWN", "WSWNES", "WSWNEN", "WSESWN",
    "WSESES", "WSESEN", "WSENWN", "WSENES",
    "WSENEN", "WNWNWN", "WNWNES", "WNWNEN",
    "WNESES", "WNESEN", "WNENES", "WNENEN",
    "ESESES", "ESESEN", "ESENEN", "ENENEN",
)

# Each table value is either a fixed real constant or +/- c times an integer
# power of the circle parameter, with c the diamond radical
# sqrt((5 sqrt 5 - 11) / 2).  Constants: "p" = 2 - sqrt5, "m" = sqrt5 - 2,
# "hp" = (3 - sqrt5)/2, "hm" = (sqrt5 - 3)/2.
_TABLE_SPEC = {
    "WSWSWS": ("p",),
    "WSWSWN": ("hp",),
    "WSWSES": ("m",),
    "WSWSEN": ("c", -1, -1),
    "WSWNWN": ("hm",),
    "WSWNES": ("c", -1, +1),
    "WSWNEN": ("hp",),
    "WSESWN": ("hm",),
    "WSESES": ("p",),
    "WSESEN": ("c", +1, -1),
    "WSENWN": ("c", -1, -1),
    "WSENES": ("hp",),
    "WSENEN": ("c", +1, -1),
    "WNWNWN": ("m",),
    "WNWNES": ("c", -1, +1),
    "WNWNEN": ("p",),
    "WNESES": ("c", +1, +1),
    "WNESEN": ("hm",),
    "WNENES": ("c", +1, +1),
    "WNENEN": ("m",),
    "ESESES": ("m",),
    "ESESEN": ("hm",),
    "ESENEN": ("hp",),
    "ENENEN": ("p",),
}


class ExpansionError(RuntimeError):
    """Base class for failures of the linear expansion step."""


class NoSolutionError(ExpansionError):
    """The constraint system is inconsistent at the requested tolerance."""

    def __init__(self, residual):
        self.residual = residual
        super().__init__(f"inconsistent constraints, residual {float(residual):.3e}")


class NonUniqueExtensionError(ExpansionError):
    """The constraint system does not pin the element down."""

    def __init__(self, kernel_dim: int):
        self.kernel_dim = kernel_dim
        super().__init__(f"extension not unique, kernel dimension {kernel_dim}")


class CounterexampleError(RuntimeError):
    """A converged search point does not belong to the expected family."""


def label_loop(label: str) -> tuple[int, ...]:
    """The 6-tuple of vertex ids for a table label."""
    if len(label) != 6 or any(ch not in LOOP_LETTERS for ch in label):
        raise ValueError(f"bad table label: {label!r}")
    return tuple(LOOP_LETTERS[ch] for ch in label)


def label_pair(label: str) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """The (p, q) basis pair addressed by a table label."""
    return gpa._pair_of_loop(label_loop(label), 3)


def _constant(name: str):
    r5 = scalars.sqrt_pos(5)
    if name == "p":
        return 2 - r5
    if name == "m":
        return r5 - 2
    if name == "hp":
        return (3 - r5) / 2
    if name == "hm":
        return (r5 - 3) / 2
    raise KeyError(name)


@dataclass(frozen=True)
class DiamondTable:
    """The 24 pinned coefficients, tagged with the circle parameter used."""

    lam: object
    values: dict

    @classmethod
    def zeros(cls) -> "DiamondTable":
        return cls(lam=None, values={lb: gmpy2.mpc(0) for lb in DIAMOND_LABELS})

    def value(self, label: str):
        return self.values[label]


def diamond_values(lam) -> DiamondTable:
    """Evaluate the coefficient table at a unit-modulus circle parameter."""
    lam = gmpy2.mpc(lam)
    slack = gmpy2.mpfr(10) ** (-(scalars.get_precision() // 2))
    if abs(abs(lam) - 1) > slack:
        raise ValueError("the circle parameter must have modulus 1")
    c = scalars.named_constant("diamond_radical")
    values = {}
    for label, spec in _TABLE_SPEC.items():
        if spec[0] == "c":
            _tag, sign, power = spec
            values[label] = gmpy2.mpc(sign * c) * lam**power
        else:
            values[label] = gmpy2.mpc(_constant(spec[0]))
    return DiamondTable(lam=lam, values=values)


@dataclass
class Generator:
    """A solved generator: the element plus the data that pinned it."""

    element: gpa.GpaElement
    omega: object
    table: DiamondTable | None = None
    lam: object = None

    @property
    def check_element(self) -> gpa.GpaElement:
        """The one-click rotation of the generator (the shaded partner)."""
        return gpa.fourier(self.element)


# -- the sparse constraint system ---------------------------------------------


def _fourier_plan(space: gpa.BoxSpace) -> gpa._LinearPlan:
    d = gpa.FOURIER_SHIFT
    return gpa._get_plan(space, f"fourier{d}", lambda: gpa._plan_fourier(space, d))


def _ptr_plan(space: gpa.BoxSpace) -> gpa._LinearPlan:
    return gpa._get_plan(space, "ptr", lambda: gpa._plan_partial_trace_right(space))


def _shift_arrays(space: gpa.BoxSpace, shift: int):
    """Destination indices and weights of the shift-fold one-click rotation."""
    total = space.total_dim
    idx = np.arange(total, dtype=np.int64)
    wts = np.full(total, gmpy2.mpfr(1), dtype=object)
    sp = space
    for _ in range(shift):
        plan = _fourier_plan(sp)
        perm = np.empty(sp.total_dim, dtype=np.int64)
        step_w = np.empty(sp.total_dim, dtype=object)
        perm[plan.src_idx] = plan.dst_idx
        step_w[plan.src_idx] = plan.weights
        wts = wts * step_w[idx]
        idx = perm[idx]
        sp = plan.dst_space
    return sp, idx, wts


def _cap_triplets(space: gpa.BoxSpace, shift: int):
    """Triplets (src, dst, weight) of the boundary capping ptr o F^shift."""
    sp, idx, wts = _shift_arrays(space, shift)
    plan = _ptr_plan(sp)
    pmap = {int(s): (int(d), w) for s, d, w in zip(plan.src_idx, plan.dst_idx, plan.weights)}
    out = []
    for g in range(space.total_dim):
        hit = pmap.get(int(idx[g]))
        if hit is not None:
            out.append((g, hit[0], wts[g] * hit[1]))
    return out


def _rotation_triplets(space: gpa.BoxSpace):
    """Triplets of the two-click rotation, a weighted permutation."""
    _sp, idx, wts = _shift_arrays(space, 2)
    return [(g, int(idx[g]), wts[g]) for g in range(space.total_dim)]


def _expansion_system(
    space: gpa.BoxSpace,
    omega,
    table: DiamondTable | None = None,
    selfadjoint: bool = True,
) -> linalg.SparseRows:
    """The real-linear constraint rows over (Re, Im) coordinates.

    Rows: all six boundary cappings vanish; the two-click rotation acts by
    the eigenvalue omega; optionally self-adjointness; optionally the 24
    table anchors as inhomogeneous rows.
    """
    D = space.total_dim
    system = linalg.SparseRows(2 * D)

    for shift in range(2 * space.n):
        by_dst: dict[int, list[tuple[int, object]]] = {}
        for g, d, w in _cap_triplets(space, shift):
            by_dst.setdefault(d, []).append((g, w))
        for d in sorted(by_dst):
            cols = [g for g, _ in by_dst[d]]
            ws = [w for _, w in by_dst[d]]
            system.add_row(cols, ws)
            system.add_row([D + g for g in cols], ws)

    om = gmpy2.mpc(omega)
    wr, wi = scalars.re_part(om), scalars.im_part(om)
    for g, d, w in _rotation_triplets(space):
        system.add_row([g, d, D + d], [w, -wr, wi])
        system.add_row([D + g, d, D + d], [w, -wi, -wr])

    if selfadjoint:
        for key in space.keys:
            ps = space.paths[key]
            m = len(ps)
            off = space.offsets[key]
            for i in range(m):
                system.add_row([D + off + i * m + i], [gmpy2.mpfr(1)])
                for j in range(i + 1, m):
                    gij = off + i * m + j
                    gji = off + j * m + i
                    system.add_row([gij, gji], [1, -1])
                    system.add_row([D + gij, D + gji], [1, 1])

    if table is not None:
        for label in DIAMOND_LABELS:
            p, q = label_pair(label)
            g = space.global_index((p[0], p[-1]), p, q)
            v = gmpy2.mpc(table.value(label))
            system.add_row([g], [gmpy2.mpfr(1)], rhs=scalars.re_part(v))
            system.add_row([D + g], [gmpy2.mpfr(1)], rhs=scalars.im_part(v))
    return system


def _element_of_real_vector(space: gpa.BoxSpace, z: np.ndarray) -> gpa.GpaElement:
    D = space.total_dim
    vec = np.array(
        [scalars.comp(z[g], z[D + g]) for g in range(D)], dtype=object
    )
    return gpa.element_from_vector(space, vec, gpa.EXACT)


def expand_generator(table: DiamondTable, omega=1) -> Generator:
    """Solve the capping/rotation/self-adjointness constraints with the 24
    table anchors, requiring the solution to exist and be unique."""
    space = gpa.box_space(twod2_graph(), 3, 0)
    system = _expansion_system(space, omega, table=table, selfadjoint=True)
    z, residual = linalg.sparse_refined_lstsq(system)
    threshold = gmpy2.mpfr(10) ** (-scalars.get_precision() + 15)
    if residual > threshold:
        raise NoSolutionError(residual)
    rank = linalg.float_rank(system.to_dense_float())
    if rank < 2 * space.total_dim:
        raise NonUniqueExtensionError(2 * space.total_dim - rank)
    zr = np.array([scalars.re_part(v) for v in z], dtype=object)
    element = _element_of_real_vector(space, zr)
    return Generator(element=element, omega=gmpy2.mpc(omega), table=table, lam=table.lam)


def expansion_kernel_dimension(omega=1, selfadjoint: bool = True) -> int:
    """Dimension of the homogeneous solution space (no table anchors)."""
    space = gpa.box_space(twod2_graph(), 3, 0)
    system = _expansion_system(space, omega, table=None, selfadjoint=selfadjoint)
    return 2 * space.total_dim - linalg.float_rank(system.to_dense_float())


# -- the one-parameter family, linear in (Re lam, Im lam) ---------------------

_FAMILY_CACHE: dict = {}


def generator_family():
    """Elements (T_const, T_re, T_im) with T(lam) = T_const + Re lam * T_re
    + Im lam * T_im, recovered from three expansions."""
    key = scalars.get_precision()
    if key not in _FAMILY_CACHE:
        one = expand_generator(diamond_values(1)).element
        minus = expand_generator(diamond_values(-1)).element
        i_el = expand_generator(diamond_values(scalars.imag_unit())).element
        half = gmpy2.mpfr(1) / 2
        t_const = half * (one + minus)
        t_re = half * (one - minus)
        t_im = i_el - t_const
        _FAMILY_CACHE[key] = (t_const, t_re, t_im)
    return _FAMILY_CACHE[key]


def generator_element(lam) -> Generator:
    """The family member at a unit-modulus parameter, via the linear form."""
    table = diamond_values(lam)
    t_const, t_re, t_im = generator_family()
    lam = gmpy2.mpc(lam)
    element = t_const + scalars.re_part(lam) * t_re + scalars.im_part(lam) * t_im
    return Generator(element=element, omega=gmpy2.mpc(1), table=table, lam=lam)


# -- verification report -------------------------------------------------------


def check_generator(gen: Generator) -> dict:
    """Residuals of every defining property of a solved generator.

    Keys: self_adjoint, rotation, cappings (max over the six boundary
    positions), square (against the Jones-Wenzl 3-box), rotated_square and
    check_self_adjoint (for the one-click rotation of the generator),
    tl_overlap (max trace pairing against the five Temperley-Lieb diagram
    images; a large value flags a Temperley-Lieb impostor), and table (max
    anchor deviation, when a table is attached).
    """
    t = gen.element
    graph = t.space.graph
    f3 = gpa.jones_wenzl(3, graph, t.space.parity)
    f3_check = gpa.jones_wenzl(3, graph, 1 - t.space.parity)
    t_check = gpa.fourier(t)
    report = {
        "self_adjoint": (t.adjoint() - t).norm(),
        "rotation": (gpa.rotation(t) - gen.omega * t).norm(),
        "cappings": max(gpa.cap(t, i).norm() for i in range(1, 2 * t.space.n + 1)),
        "square": (t * t - f3).norm(),
        "rotated_square": (t_check * t_check - f3_check).norm(),
        "check_self_adjoint": (t_check.adjoint() - t_check).norm(),
        "tl_overlap": max(
            abs(gpa.inner_product(t, gpa.tl_embed(d, graph, t.space.parity)))
            for d in gpa.all_tl_diagrams(t.space.n)
        ),
    }
    if gen.table is not None:
        report["table"] = max(
            abs(t.coeff(*label_pair(lb)) - gen.table.value(lb)) for lb in DIAMOND_LABELS
        )
    return report


# -- the quadratic solve over the homogeneous kernel ---------------------------


@dataclass
class FamilySolution:
    """One distinct converged point of the Gauss-Newton search."""

    element: gpa.GpaElement
    sign: int
    lam: object
    match_residual: object
    newton_residual: object
    tangent_dim: int
    hits: int = 1


@dataclass
class FamilyScan:
    """Outcome of a multistart search for square roots of the 3-box
    Jones-Wenzl inside the homogeneous constraint space."""

    kernel_dim: int
    starts: int
    converged: int
    solutions: list[FamilySolution] = field(default_factory=list)


def _stack_complex(vec: np.ndarray) -> np.ndarray:
    re = np.array([scalars.re_part(v) for v in vec], dtype=object)
    im = np.array([scalars.im_part(v) for v in vec], dtype=object)
    return np.concatenate([re, im])


def _float_newton(c0, basis_f, f3_vec_f, max_iter=200):
    """Float Levenberg-Marquardt for || flatten(E(c)^2 - f3) ||, E linear in c."""
    k = len(basis_f)
    space = basis_f[0].space

    def assemble(c):
        e = gpa.zero_element(space, gpa.FLOAT)
        for cj, kj in zip(c, basis_f):
            e = e + float(cj) * kj
        return e

    def resid(e):
        return (e * e).flatten() - f3_vec_f

    c = np.array(c0, dtype=np.float64)
    e = assemble(c)
    f = resid(e)
    fn = np.linalg.norm(f)
    damping = 1e-3
    for _ in range(max_iter):
        if fn < 1e-12:
            break
        cols = []
        for kj in basis_f:
            d = (e * kj + kj * e).flatten()
            cols.append(np.concatenate([d.real, d.imag]))
        jac = np.array(cols).T
        rhs = -np.concatenate([f.real, f.imag])
        gram = jac.T @ jac
        grad = jac.T @ rhs
        moved = False
        for _attempt in range(30):
            step = np.linalg.solve(gram + damping * np.eye(k), grad)
            c_new = c + step
            f_new = resid(assemble(c_new))
            fn_new = np.linalg.norm(f_new)
            if fn_new < fn:
                c, f, fn = c_new, f_new, fn_new
                e = assemble(c)
                damping = max(damping / 3, 1e-12)
                moved = True
                break
            damping *= 4
        if not moved or np.linalg.norm(step) < 1e-15:
            break
    return c, fn


def _exact_newton(c0, basis, f3, max_iter=12, step_tol=gmpy2.mpfr("1e-45")):
    """Polish a float Gauss-Newton point to working precision."""
    space = basis[0].space
    k = len(basis)

    def assemble(c):
        e = gpa.zero_element(space, gpa.EXACT)
        for cj, kj in zip(c, basis):
            e = e + cj * kj
        return e

    c = np.array([gmpy2.mpfr(x) for x in c0], dtype=object)
    target = gmpy2.mpfr(10) ** (-scalars.get_precision() + 12)
    fn = None
    for _ in range(max_iter):
        e = assemble(c)
        f = (e * e).flatten() - f3.flatten()
        fs = _stack_complex(f)
        fn = scalars.sqrt_pos(sum(x * x for x in fs))
        if fn < target:
            break
        jac = np.empty((2 * space.total_dim, k), dtype=object)
        for j, kj in enumerate(basis):
            jac[:, j] = _stack_complex((e * kj + kj * e).flatten())
        step = linalg.solve_normal_equations(jac, -fs)
        c = c + step
        if scalars.sqrt_pos(sum(x * x for x in step)) < step_tol:
            e = assemble(c)
            fs = _stack_complex((e * e).flatten() - f3.flatten())
            fn = scalars.sqrt_pos(sum(x * x for x in fs))
            break
    return c, fn


def solve_families(seed: int = 0, num_starts: int = 160) -> FamilyScan:
    """Multistart search for all square roots of the Jones-Wenzl 3-box among
    self-adjoint uncappable rotation-invariant elements.

    Every converged point must match plus or minus a family member at the
    parameter read off its anchor coefficient, else CounterexampleError.
    """
    graph = twod2_graph()
    space = gpa.box_space(graph, 3, 0)
    f3 = gpa.jones_wenzl(3, graph, 0)
    f3_f = f3.to_float()
    system = _expansion_system(space, 1, table=None, selfadjoint=True)
    kernel = linalg.sparse_exact_kernel(system)
    k = len(kernel)
    basis = [_element_of_real_vector(space, v) for v in kernel]
    basis_f = [b.to_float() for b in basis]
    f3_vec_f = f3_f.flatten()

    c_rad = scalars.named_constant("diamond_radical")
    anchor_p, anchor_q = label_pair("WSWSEN")
    t_const, t_re, t_im = generator_family()
    accept = gmpy2.mpfr("1e-40")

    rng = np.random.default_rng(seed)
    scan = FamilyScan(kernel_dim=k, starts=num_starts, converged=0)
    for _ in range(num_starts):
        c0 = rng.normal(0.0, 2.0, size=k)
        c_f, fn_f = _float_newton(c0, basis_f, f3_vec_f)
        if fn_f > 1e-8:
            continue
        c_x, fn_x = _exact_newton(c_f, basis, f3)
        if fn_x > accept:
            continue
        scan.converged += 1
        element = gpa.zero_element(space, gpa.EXACT)
        for cj, kj in zip(c_x, basis):
            element = element + cj * kj
        vec_f = element.to_float().flatten()
        existing = None
        for sol in scan.solutions:
            if np.linalg.norm(sol.element.to_float().flatten() - vec_f) < 1e-8:
                existing = sol
                break
        if existing is not None:
            existing.hits += 1
            continue

        value = element.coeff(anchor_p, anchor_q)
        if abs(value) == 0:
            raise CounterexampleError("converged point has a zero anchor entry")
        best = None
        for sign in (+1, -1):
            lam_hat = gmpy2.mpc(-sign * c_rad) / value
            if abs(abs(lam_hat) - 1) > gmpy2.mpfr("1e-10"):
                continue
            member = (
                t_const
                + scalars.re_part(lam_hat) * t_re
                + scalars.im_part(lam_hat) * t_im
            )
            res = (element - sign * member).norm()
            if best is None or res < best[2]:
                best = (sign, lam_hat, res)
        if best is None or best[2] > gmpy2.mpfr("1e-20"):
            raise CounterexampleError(
                "converged point does not match the one-parameter family"
            )

        cols = []
        e_f = element.to_float()
        for kj in basis_f:
            d = (e_f * kj + kj * e_f).flatten()
            cols.append(np.concatenate([d.real, d.imag]))
        jac = np.array(cols).T.astype(np.float64)
        tangent = k - linalg.float_rank(jac, cutoff=1e-6)

        scan.solutions.append(
            FamilySolution(
                element=element,
                sign=best[0],
                lam=best[1],
                match_residual=best[2],
                newton_residual=fn_x,
                tangent_dim=tangent,
            )
        )
    return scan


def eigenvalue_scan(candidates=None, seed: int = 0, num_starts: int = 60, tol: float = 1e-6) -> dict:
    """Search for square roots of the Jones-Wenzl 3-box among uncappable
    rotation eigenvectors at other eigenvalues (no self-adjointness imposed).

    Runs entirely in the float engine.  Returns, per candidate eigenvalue,
    the kernel dimension of the linear constraints, the smallest residual
    reached by any start, and whether that beats the tolerance.
    """
    if candidates is None:
        third = 2 * gmpy2.const_pi() / 3
        w = scalars.comp(gmpy2.cos(third), gmpy2.sin(third))
        candidates = [
            ("exp(2*pi*i/3)", w),
            ("exp(-2*pi*i/3)", scalars.conj(w)),
        ]
    graph = twod2_graph()
    space = gpa.box_space(graph, 3, 0)
    f3_vec_f = gpa.jones_wenzl(3, graph, 0).to_float().flatten()
    rng = np.random.default_rng(seed)
    report = {}
    for label, omega in candidates:
        system = _expansion_system(space, omega, table=None, selfadjoint=False)
        dense = system.to_dense_float()
        float_kernel = linalg.float_kernel_basis(dense)
        k = len(float_kernel)
        if k == 0:
            report[label] = {
                "kernel_dim": 0,
                "min_residual": float(np.linalg.norm(f3_vec_f)),
                "solutions_found": False,
            }
            continue
        basis_f = []
        D = space.total_dim
        for v in float_kernel:
            vec = v[:D] + 1j * v[D:]
            basis_f.append(gpa.element_from_vector(space, vec, gpa.FLOAT))
        best = None
        for _ in range(num_starts):
            c0 = rng.normal(0.0, 2.0, size=k)
            _c, fn = _float_newton(c0, basis_f, f3_vec_f)
            if best is None or fn < best:
                best = fn
        report[label] = {
            "kernel_dim": k,
            "min_residual": float(best),
            "solutions_found": bool(best < tol),
        }
    return report

"""Mixed-precision linear algebra helpers.

Dense systems are factored once in float64 and the solutions polished by
iterative refinement with exact-precision residuals, which converges to full
working precision in a handful of sweeps for the well-conditioned systems in
this package.  Matrices are numpy object arrays of gmpy2 reals.
"""

from __future__ import annotations

import gmpy2
import numpy as np

from . import scalars


def as_object_matrix(rows) -> np.ndarray:
    mat = np.empty((len(rows), len(rows[0])), dtype=object)
    for i, row in enumerate(rows):
        for j, value in enumerate(row):
            mat[i, j] = gmpy2.mpfr(value)
    return mat


def to_float(mat: np.ndarray) -> np.ndarray:
    return mat.astype(np.float64)


def refined_lstsq(C: np.ndarray, d: np.ndarray, sweeps: int = 8):
    """Least-squares solution of a real system at working precision.

    Factors the float64 projection once (pseudo-inverse) and polishes with
    exact residuals.  Returns (solution vector, final residual norm), both
    exact.  For consistent full-rank systems the residual reaches the working
    precision; for inconsistent systems it converges to the least-squares
    residual.
    """
    pinv = np.linalg.pinv(C.astype(np.float64))
    z = np.full(C.shape[1], gmpy2.mpfr(0), dtype=object)
    for _ in range(sweeps):
        r = d - C @ z
        step = pinv @ r.astype(np.float64)
        z = z + np.array([gmpy2.mpfr(s) for s in step], dtype=object)
    r = d - C @ z
    res = scalars.sqrt_pos(sum(x * x for x in r))
    return z, res


def float_rank(C: np.ndarray, cutoff: float = 1e-8) -> int:
    s = np.linalg.svd(C.astype(np.float64), compute_uv=False)
    if len(s) == 0:
        return 0
    return int((s > cutoff * max(s[0], 1.0)).sum())


def float_kernel_basis(C: np.ndarray, cutoff: float = 1e-8) -> list[np.ndarray]:
    """Orthonormal float64 basis of the (numerical) kernel of a real matrix."""
    Cf = C.astype(np.float64)
    _u, s, vt = np.linalg.svd(Cf, full_matrices=True)
    scale = max(s[0], 1.0) if len(s) else 1.0
    rank = int((s > cutoff * scale).sum())
    return [vt[i] for i in range(rank, vt.shape[0])]


def refine_kernel_vector(C: np.ndarray, pinv: np.ndarray, v0: np.ndarray, sweeps: int = 8) -> np.ndarray:
    """Polish an approximate kernel vector of C to working precision."""
    v = np.array([gmpy2.mpfr(x) for x in v0], dtype=object)
    for _ in range(sweeps):
        r = C @ v
        step = pinv @ r.astype(np.float64)
        v = v - np.array([gmpy2.mpfr(s) for s in step], dtype=object)
    nrm = scalars.sqrt_pos(sum(x * x for x in v))
    return v / nrm


def exact_kernel_basis(C: np.ndarray, cutoff: float = 1e-8) -> list[np.ndarray]:
    """Kernel basis of a real matrix, polished to working precision.

    The kernel dimension is read off the float64 singular values; each float
    basis vector is refined, then the set is re-orthonormalized exactly.
    """
    float_basis = float_kernel_basis(C, cutoff)
    if not float_basis:
        return []
    pinv = np.linalg.pinv(C.astype(np.float64))
    refined = [refine_kernel_vector(C, pinv, v) for v in float_basis]
    out: list[np.ndarray] = []
    for v in refined:
        for u in out:
            v = v - (u @ v) * u
        nrm = scalars.sqrt_pos(sum(x * x for x in v))
        if nrm > gmpy2.mpfr("0.5"):
            out.append(v / nrm)
    if len(out) != len(float_basis):
        raise RuntimeError("kernel refinement lost a direction")
    return out


class SparseRows:
    """A sparse real matrix stored row by row, for exact residual sweeps."""

    def __init__(self, ncols: int):
        self.ncols = ncols
        self.rows: list[tuple[np.ndarray, np.ndarray]] = []
        self.rhs: list = []

    @property
    def nrows(self) -> int:
        return len(self.rows)

    def add_row(self, cols, weights, rhs=0) -> None:
        self.rows.append(
            (
                np.array(cols, dtype=np.int64),
                np.array([gmpy2.mpfr(w) for w in weights], dtype=object),
            )
        )
        self.rhs.append(rhs)

    def matvec(self, z: np.ndarray) -> np.ndarray:
        out = np.empty(len(self.rows), dtype=object)
        for i, (cols, weights) in enumerate(self.rows):
            acc = gmpy2.mpfr(0)
            for c, w in zip(cols, weights):
                acc += w * z[c]
            out[i] = acc
        return out

    def rhs_vector(self) -> np.ndarray:
        return np.array([gmpy2.mpc(v) for v in self.rhs], dtype=object)

    def to_dense_float(self) -> np.ndarray:
        dense = np.zeros((len(self.rows), self.ncols))
        for i, (cols, weights) in enumerate(self.rows):
            for c, w in zip(cols, weights):
                dense[i, c] += float(w)
        return dense


def sparse_refined_lstsq(system: SparseRows, sweeps: int = 6):
    """Least squares for a sparse real system with an exact right-hand side.

    The right-hand side may be complex; real and imaginary parts are solved
    against the same float factorization.  Returns (solution, residual norm).
    """
    dense = system.to_dense_float()
    pinv = np.linalg.pinv(dense)
    d = system.rhs_vector()
    z = np.full(system.ncols, gmpy2.mpc(0), dtype=object)
    for _ in range(sweeps):
        r = d - system.matvec(z)
        r_re = np.array([float(scalars.re_part(x)) for x in r])
        r_im = np.array([float(scalars.im_part(x)) for x in r])
        step_re = pinv @ r_re
        step_im = pinv @ r_im
        z = z + np.array(
            [scalars.comp(a, b) for a, b in zip(step_re, step_im)], dtype=object
        )
    r = d - system.matvec(z)
    res = scalars.sqrt_pos(sum((abs(x)) ** 2 for x in r))
    return z, res


def sparse_exact_kernel(system: SparseRows, cutoff: float = 1e-8) -> list[np.ndarray]:
    """Exact-precision kernel basis of a sparse real matrix."""
    dense = system.to_dense_float()
    float_basis = float_kernel_basis(dense, cutoff)
    if not float_basis:
        return []
    pinv = np.linalg.pinv(dense)
    out: list[np.ndarray] = []
    for v0 in float_basis:
        v = np.array([gmpy2.mpfr(x) for x in v0], dtype=object)
        for _ in range(6):
            r = system.matvec(v)
            step = pinv @ np.array([float(x) for x in r])
            v = v - np.array([gmpy2.mpfr(s) for s in step], dtype=object)
        for u in out:
            v = v - (u @ v) * u
        nrm = scalars.sqrt_pos(sum(x * x for x in v))
        if nrm > gmpy2.mpfr("0.5"):
            out.append(v / nrm)
    if len(out) != len(float_basis):
        raise RuntimeError("kernel refinement lost a direction")
    return out


def solve_normal_equations(J: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """Solve the small dense least-squares system J x ~ rhs exactly.

    Uses exact normal equations with Gaussian elimination; intended for
    Newton steps where J has at most a few dozen columns.
    """
    JT = J.T
    A = JT @ J
    b = JT @ rhs
    k = A.shape[0]
    M = np.concatenate([A, b.reshape(-1, 1)], axis=1)
    for col in range(k):
        pivot = max(range(col, k), key=lambda r: abs(M[r, col]))
        if abs(M[pivot, col]) == 0:
            raise ZeroDivisionError("singular normal equations")
        if pivot != col:
            M[[col, pivot]] = M[[pivot, col]]
        M[col] = M[col] / M[col, col]
        for r in range(k):
            if r != col and M[r, col] != 0:
                M[r] = M[r] - M[r, col] * M[col]
    return M[:, k]

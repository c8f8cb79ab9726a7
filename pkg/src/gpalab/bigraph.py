"""Depth-graded bipartite graphs: compact codec, PF data, loop enumeration.

A graph is stored with global integer vertex ids assigned depth by depth
(the depth-0 root is vertex 0).  Edges only join consecutive depths and are
simple; the codec rejects multiplicities of 2 or more.  Even depths carry an
involutive dual permutation.

Codec grammar: ``"bwd"``, then one block per depth 1..D separated by ``"v"``;
within a block, vertices are separated by ``"p"`` and each vertex lists one
0/1 adjacency digit per previous-depth vertex, separated by ``"x"``; then
``"duals"`` followed by one block per even depth (0, 2, ...), separated by
``"v"``, each a 1-indexed involution with entries separated by ``"x"``.
The root is implicit, so the smallest code, ``"bwdduals1"``, is the one-vertex
graph and ``"bwd1duals1"`` is the single-edge graph.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import gmpy2
import numpy as np

from . import scalars


class CodecError(ValueError):
    """Malformed graph code; carries the character position of the problem."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class MultiplicityError(CodecError):
    """An adjacency digit of 2 or more; multi-edges are unsupported."""


class DualsError(ValueError):
    """Dual data is not a well-formed involution."""


@dataclass(frozen=True)
class BipartiteGraph:
    """Immutable depth-graded simple bipartite graph with dual permutations.

    depth_sizes: number of vertices at each depth (depth 0 is the root).
    blocks: blocks[d][i][j] is the 0/1 adjacency of vertex i at depth d+1 to
        vertex j at depth d.
    duals: one 0-indexed involutive permutation per even depth.
    """

    depth_sizes: tuple[int, ...]
    blocks: tuple[tuple[tuple[int, ...], ...], ...]
    duals: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if not self.depth_sizes or self.depth_sizes[0] != 1:
            raise ValueError("depth 0 must hold exactly the root")
        if len(self.blocks) != len(self.depth_sizes) - 1:
            raise ValueError("need one adjacency block per depth >= 1")
        for d, block in enumerate(self.blocks):
            if len(block) != self.depth_sizes[d + 1]:
                raise ValueError(f"block {d} has the wrong vertex count")
            for row in block:
                if len(row) != self.depth_sizes[d]:
                    raise ValueError(f"block {d} has the wrong row width")
                if any(c not in (0, 1) for c in row):
                    raise ValueError("adjacency entries must be 0 or 1")
        even_depths = [d for d in range(len(self.depth_sizes)) if d % 2 == 0]
        if len(self.duals) != len(even_depths):
            raise DualsError("need one dual block per even depth")
        for k, d in enumerate(even_depths):
            perm = self.duals[k]
            size = self.depth_sizes[d]
            if sorted(perm) != list(range(size)):
                raise DualsError(f"dual block for depth {d} is not a permutation")
            if any(perm[perm[i]] != i for i in range(size)):
                raise DualsError(f"dual block for depth {d} is not an involution")

    # -- basic structure -------------------------------------------------

    @cached_property
    def depth_offsets(self) -> tuple[int, ...]:
        offs = [0]
        for s in self.depth_sizes:
            offs.append(offs[-1] + s)
        return tuple(offs)

    @property
    def num_vertices(self) -> int:
        return self.depth_offsets[-1]

    @cached_property
    def depth_of(self) -> tuple[int, ...]:
        out = []
        for d, s in enumerate(self.depth_sizes):
            out.extend([d] * s)
        return tuple(out)

    def parity_of(self, v: int) -> int:
        return self.depth_of[v] % 2

    def vertices_at(self, depth: int) -> range:
        return range(self.depth_offsets[depth], self.depth_offsets[depth + 1])

    @cached_property
    def even_vertices(self) -> tuple[int, ...]:
        return tuple(v for v in range(self.num_vertices) if self.parity_of(v) == 0)

    @cached_property
    def odd_vertices(self) -> tuple[int, ...]:
        return tuple(v for v in range(self.num_vertices) if self.parity_of(v) == 1)

    @cached_property
    def edges(self) -> frozenset[frozenset[int]]:
        out = set()
        for d, block in enumerate(self.blocks):
            lo, hi = self.depth_offsets[d], self.depth_offsets[d + 1]
            for i, row in enumerate(block):
                for j, bit in enumerate(row):
                    if bit:
                        out.add(frozenset((lo + j, hi + i)))
        return frozenset(out)

    @cached_property
    def neighbors(self) -> tuple[tuple[int, ...], ...]:
        adj = [[] for _ in range(self.num_vertices)]
        for e in self.edges:
            a, b = sorted(e)
            adj[a].append(b)
            adj[b].append(a)
        return tuple(tuple(sorted(x)) for x in adj)

    @cached_property
    def adjacency_matrix(self) -> np.ndarray:
        """Exact integer adjacency matrix (numpy object array of Python ints)."""
        n = self.num_vertices
        mat = np.zeros((n, n), dtype=object)
        for e in self.edges:
            a, b = sorted(e)
            mat[a, b] = 1
            mat[b, a] = 1
        return mat

    def is_connected(self) -> bool:
        seen = {0}
        stack = [0]
        while stack:
            v = stack.pop()
            for w in self.neighbors[v]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return len(seen) == self.num_vertices

    def to_json_dict(self) -> dict:
        """JSON-friendly description: vertices by depth, edges, duals."""
        return {
            "code": encode_bigraph(self),
            "vertices": [
                {"id": v, "depth": self.depth_of[v]} for v in range(self.num_vertices)
            ],
            "edges": sorted(sorted(e) for e in self.edges),
            "duals": [list(p) for p in self.duals],
        }


# -- codec ---------------------------------------------------------------


def parse_bigraph(code: str) -> BipartiteGraph:
    """Parse the compact codec into a graph, with position-aware errors."""
    if not code.startswith("bwd"):
        raise CodecError("code must start with 'bwd'", 0)
    marker = code.find("duals")
    if marker < 0:
        raise CodecError("code must contain 'duals'", len(code))
    body = code[3:marker]
    duals_text = code[marker + 5 :]

    blocks: list[list[list[int]]] = []
    depth_sizes = [1]
    pos = 3
    if body:
        for block_text in body.split("v"):
            block: list[list[int]] = []
            if not block_text:
                raise CodecError("empty depth block", pos)
            vpos = pos
            for vertex_text in block_text.split("p"):
                row: list[int] = []
                tpos = vpos
                if not vertex_text:
                    raise CodecError("empty vertex entry", vpos)
                for token in vertex_text.split("x"):
                    if not token.isdigit():
                        raise CodecError(f"expected a digit, got {token!r}", tpos)
                    value = int(token)
                    if value > 1:
                        raise MultiplicityError(
                            f"edge multiplicity {value} unsupported", tpos
                        )
                    row.append(value)
                    tpos += len(token) + 1
                if len(row) != depth_sizes[-1]:
                    raise CodecError(
                        f"vertex lists {len(row)} adjacency digits, "
                        f"previous depth has {depth_sizes[-1]} vertices",
                        vpos,
                    )
                block.append(row)
                vpos += len(vertex_text) + 1
            blocks.append(block)
            depth_sizes.append(len(block))
            pos += len(block_text) + 1

    duals: list[list[int]] = []
    pos = marker + 5
    if not duals_text:
        raise CodecError("missing dual blocks", pos)
    for block_text in duals_text.split("v"):
        perm: list[int] = []
        tpos = pos
        for token in block_text.split("x"):
            if not token.isdigit():
                raise CodecError(f"expected a digit, got {token!r}", tpos)
            perm.append(int(token) - 1)
            tpos += len(token) + 1
        duals.append(perm)
        pos += len(block_text) + 1

    even_depths = [d for d in range(len(depth_sizes)) if d % 2 == 0]
    if len(duals) != len(even_depths):
        raise CodecError(
            f"{len(duals)} dual blocks for {len(even_depths)} even depths",
            marker + 5,
        )
    try:
        return BipartiteGraph(
            depth_sizes=tuple(depth_sizes),
            blocks=tuple(tuple(tuple(r) for r in b) for b in blocks),
            duals=tuple(tuple(p) for p in duals),
        )
    except DualsError as exc:
        raise DualsError(f"{exc} in code {code!r}") from exc


def encode_bigraph(g: BipartiteGraph) -> str:
    """Serialize a graph back to its canonical code."""
    body = "v".join(
        "p".join("x".join(str(c) for c in row) for row in block) for block in g.blocks
    )
    duals = "v".join("x".join(str(i + 1) for i in perm) for perm in g.duals)
    return f"bwd{body}duals{duals}"


# -- Perron-Frobenius data ------------------------------------------------


@dataclass(frozen=True)
class PFData:
    """Graph norm and the positive eigenvector normalized to 1 at the root."""

    norm: gmpy2.mpfr
    weights: dict[int, gmpy2.mpfr]

    def weight(self, v: int) -> gmpy2.mpfr:
        return self.weights[v]


def perron_frobenius(g: BipartiteGraph) -> PFData:
    """Dominant eigenvalue and positive eigenvector by power iteration.

    The adjacency spectrum of a bipartite graph is symmetric, so the
    iteration runs on the shifted operator adjacency + 3*identity, whose
    dominant eigenvalue is norm + 3 with a strictly positive eigenvector.
    """
    if not g.is_connected():
        raise ValueError("Perron-Frobenius data needs a connected graph")
    n = g.num_vertices
    tol = gmpy2.mpfr(10) ** (-scalars.get_precision() + 10)
    if n == 1:
        return PFData(norm=gmpy2.mpfr(0), weights={0: gmpy2.mpfr(1)})

    shift = gmpy2.mpfr(3)
    vec = [gmpy2.mpfr(1) for _ in range(n)]
    nbrs = g.neighbors
    norm_est = gmpy2.mpfr(0)
    for _ in range(200000):
        nxt = [shift * vec[v] + sum(vec[w] for w in nbrs[v]) for v in range(n)]
        scale = nxt[0]
        nxt = [x / scale for x in nxt]
        delta = max(abs(nxt[v] - vec[v]) for v in range(n))
        vec = nxt
        if delta < tol / 16:
            break
    else:
        raise RuntimeError("power iteration did not converge")
    # Rayleigh-style estimate from the root row once the vector is stable.
    norm_est = sum(vec[w] for w in nbrs[0]) / vec[0]
    residual = max(
        abs(sum(vec[w] for w in nbrs[v]) - norm_est * vec[v]) for v in range(n)
    )
    if residual >= tol:
        raise RuntimeError(f"PF residual too large: {residual}")
    return PFData(norm=norm_est, weights={v: vec[v] for v in range(n)})


# -- loops ----------------------------------------------------------------


def enumerate_loops(g: BipartiteGraph, base_parity: int, length: int) -> list[tuple[int, ...]]:
    """All closed vertex walks of the given even length, lexicographic order.

    A loop of length 2n is returned as a (2n+1)-tuple v0..v2n with v2n = v0
    and v0 of the requested parity (0 = even depth, 1 = odd depth).
    """
    if length % 2 != 0 or length < 0:
        raise ValueError("loop length must be a nonnegative even integer")
    bases = [v for v in range(g.num_vertices) if g.parity_of(v) == base_parity]
    out: list[tuple[int, ...]] = []

    def extend(walk: list[int], remaining: int, base: int) -> None:
        if remaining == 0:
            if walk[-1] == base:
                out.append(tuple(walk))
            return
        for w in g.neighbors[walk[-1]]:
            walk.append(w)
            extend(walk, remaining - 1, base)
            walk.pop()

    for base in bases:
        extend([base], length, base)
    return out


def loop_count_at_vertex(g: BipartiteGraph, v: int, length: int) -> int:
    """Exact count of closed walks of the given length based at a vertex."""
    if length % 2 != 0 or length < 0:
        raise ValueError("loop length must be a nonnegative even integer")
    if not (0 <= v < g.num_vertices):
        raise ValueError("vertex out of range")
    if length == 0:
        return 1
    mat = g.adjacency_matrix
    power = np.eye(g.num_vertices, dtype=object)
    for _ in range(length):
        power = power @ mat
    return int(power[v, v])


# -- the two scope graphs --------------------------------------------------

TWOD2_CODE = "bwd1v1v1p1v1x1v1v1duals1v1v1v1"
TWOD2_DUAL_CODE = "bwd1v1v1p1v1x0p1x0p0x1p0x1v0x1x1x0duals1v1v1x3x2x4"
TWOD2_REJECTED_CODE = "bwd1v1v1p1v1x0p1x0p0x1p0x1v1x0x0x1duals1v1v1x3x2x4"
CONN_4442_CODE = (
    "bwd1v1v1v1v1p1p1v1x0x0p0x1x0p0x0x1v1x0x0p0x1x0v1x0p0x1duals1v1v1v2x1x3v2x1"
)


def twod2_graph() -> BipartiteGraph:
    """The chain-diamond-chain graph: 8 vertices, 8 edges, depth profile
    1,1,1,2,1,1,1.  Vertex ids: 0 root, 1, 2 (west), 3/4 (south/north),
    5 (east), 6, 7."""
    return parse_bigraph(TWOD2_CODE)

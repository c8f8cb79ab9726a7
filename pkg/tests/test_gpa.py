"""Tests for the planar algebra engine: operations, TL images, Jones-Wenzl."""

from __future__ import annotations

import random

import gmpy2
import pytest

from gpalab import bigraph, gpa, scalars

G = bigraph.twod2_graph()
CTX = scalars.default_quantum_context()
DELTA = CTX.quantum_integer(2)
TIGHT = gmpy2.mpfr("1e-40")


def random_element(space: gpa.BoxSpace, rng: random.Random) -> gpa.GpaElement:
    x = gpa.zero_element(space)
    for _g, _key, p, q in space.entries():
        x.set_coeff(p, q, scalars.comp(rng.uniform(-1, 1), rng.uniform(-1, 1)))
    return x


def test_space_dimensions_match_adjacency_powers():
    for n in range(5):
        for parity in (0, 1):
            space = gpa.box_space(G, n, parity)
            verts = G.even_vertices if parity == 0 else G.odd_vertices
            expected = sum(bigraph.loop_count_at_vertex(G, v, 2 * n) for v in verts)
            assert space.total_dim == expected


def test_linear_combination_and_identity():
    rng = random.Random(1)
    space = gpa.box_space(G, 2, 0)
    x = random_element(space, rng)
    y = random_element(space, rng)
    assert (gpa.linear_combination([(1, x), (0, y)]) - x).norm() < TIGHT
    assert gpa.linear_combination([(1, x), (-1, x)]).norm() < TIGHT
    ident = gpa.identity_element(space)
    assert (gpa.multiply(x, ident) - x).norm() < TIGHT
    assert (gpa.multiply(ident, x) - x).norm() < TIGHT


def test_multiply_associative_and_adjoint_antihomomorphism():
    rng = random.Random(2)
    space = gpa.box_space(G, 3, 0)
    x, y, z = (random_element(space, rng) for _ in range(3))
    lhs = gpa.multiply(gpa.multiply(x, y), z)
    rhs = gpa.multiply(x, gpa.multiply(y, z))
    assert (lhs - rhs).norm() < TIGHT
    assert (gpa.adjoint(gpa.adjoint(x)) - x).norm() < TIGHT
    prod = gpa.adjoint(gpa.multiply(x, y))
    swap = gpa.multiply(gpa.adjoint(y), gpa.adjoint(x))
    assert (prod - swap).norm() < TIGHT


def test_trace_properties():
    rng = random.Random(3)
    space = gpa.box_space(G, 2, 0)
    x = random_element(space, rng)
    y = random_element(space, rng)
    assert abs(gpa.trace(gpa.multiply(x, y)) - gpa.trace(gpa.multiply(y, x))) < TIGHT
    assert abs(gpa.trace(gpa.zero_element(space))) < TIGHT
    # inner product agrees with trace(adjoint(y) x) and is positive definite
    direct = gpa.inner_product(x, y)
    via_trace = gpa.trace(gpa.multiply(x.adjoint(), y))
    assert abs(direct - scalars.conj(via_trace)) < TIGHT
    assert abs(gpa.inner_product(x, y) - gpa.trace(gpa.multiply(y.adjoint(), x))) < TIGHT
    assert x.norm() > 0


def test_trace_normalization():
    assert abs(gpa.trace(gpa.identity_element(gpa.box_space(G, 0, 0))) - 1) < TIGHT
    assert abs(gpa.trace(gpa.identity_element(gpa.box_space(G, 1, 0))) - DELTA) < TIGHT
    assert abs(gpa.trace(gpa.identity_element(gpa.box_space(G, 1, 1))) - DELTA) < TIGHT


def test_fourier_period_isometry_inverse():
    rng = random.Random(4)
    for n in (1, 2, 3):
        space = gpa.box_space(G, n, 0)
        x = random_element(space, rng)
        y = x
        for _ in range(2 * n):
            y = gpa.fourier(y)
        assert (y - x).norm() < TIGHT
        fx = gpa.fourier(x)
        assert abs(fx.norm() - x.norm()) < TIGHT
        back = gpa.fourier(fx, direction=-gpa.FOURIER_SHIFT)
        assert (back - x).norm() < TIGHT
        x2 = random_element(space, rng)
        lhs = gpa.inner_product(gpa.fourier(x), gpa.fourier(x2))
        assert abs(lhs - gpa.inner_product(x, x2)) < TIGHT


def test_include_and_partial_trace():
    rng = random.Random(5)
    space = gpa.box_space(G, 2, 0)
    x = random_element(space, rng)
    assert gpa.include_right(gpa.zero_element(space)).norm() < TIGHT
    roundtrip = gpa.partial_trace_right(gpa.include_right(x))
    assert (roundtrip - DELTA * x).norm() < TIGHT
    assert abs(gpa.trace(gpa.include_right(x)) - DELTA * gpa.trace(x)) < TIGHT
    assert abs(gpa.trace(gpa.partial_trace_right(x)) - gpa.trace(x)) < TIGHT


def test_cap_positions_and_oracle():
    id1 = gpa.identity_element(gpa.box_space(G, 1, 0))
    id0 = gpa.identity_element(gpa.box_space(G, 0, 0))
    id0_odd = gpa.identity_element(gpa.box_space(G, 0, 1))
    # capping a single strand closes it into a weighted circle: the
    # loop-sum oracle gives sum_v mu(v)/mu(u) = delta at every even u.
    assert (gpa.cap(id1, 2) - DELTA * id0).norm() < TIGHT
    assert (gpa.cap(id1, 1) - DELTA * id0_odd).norm() < TIGHT
    space = gpa.box_space(G, 2, 0)
    x = random_element(space, random.Random(6))
    with pytest.raises(ValueError):
        gpa.cap(x, 0)
    with pytest.raises(ValueError):
        gpa.cap(x, 5)


# -- Temperley-Lieb ---------------------------------------------------------


def compose_diagrams(x: gpa.TlDiagram, y: gpa.TlDiagram) -> tuple[int, gpa.TlDiagram]:
    """Diagram-calculus oracle: stack x over y, count closed circles.

    Returns (circles, composite diagram) so that
    embed(x) embed(y) = delta^circles * embed(composite).
    """
    n = x.n
    # nodes: ('xt', k) external top, ('yb', k) external bottom,
    # glue x bottom point n+j to y top point n-1-j.
    links: dict = {}

    def add_link(a, b):
        links.setdefault(a, []).append(b)
        links.setdefault(b, []).append(a)

    for a in range(2 * n):
        b = x.match[a]
        if a < b:
            add_link(("x", a), ("x", b))
        b = y.match[a]
        if a < b:
            add_link(("y", a), ("y", b))
    for j in range(n):
        add_link(("x", n + j), ("y", n - 1 - j))

    external = {("x", k) for k in range(n)} | {("y", n + j) for j in range(n)}
    seen = set()
    match = [0] * (2 * n)
    circles = 0
    for start in list(links):
        if start in seen:
            continue
        # walk the strand from this node to its end(s)
        component = set()
        stack = [start]
        while stack:
            node = stack.pop()
            if node in component:
                continue
            component.add(node)
            stack.extend(links[node])
        seen |= component
        ends = sorted(component & external)
        if not ends:
            circles += 1
            continue
        assert len(ends) == 2
        labels = []
        for side, k in ends:
            labels.append(k if side == "x" else k)
        a, b = labels
        match[a], match[b] = b, a
    return circles, gpa.TlDiagram(tuple(match))


def test_tl_diagram_validation():
    gpa.TlDiagram((1, 0, 3, 2, 5, 4, 7, 6))  # nested cups, legal
    with pytest.raises(ValueError):
        gpa.TlDiagram((2, 3, 0, 1))  # crossing chords
    with pytest.raises(ValueError):
        gpa.TlDiagram((0, 1, 2, 3))


def test_all_tl_diagrams_catalan():
    catalan = {1: 1, 2: 2, 3: 5, 4: 14, 5: 42}
    for n, c in catalan.items():
        diagrams = gpa.all_tl_diagrams(n)
        assert len(diagrams) == c
        assert len(set(diagrams)) == c


def test_tl_identity_and_cupcap_embed():
    for parity in (0, 1):
        ident = gpa.tl_embed(gpa.tl_identity(2), G, parity)
        assert (ident - gpa.identity_element(gpa.box_space(G, 2, parity))).norm() < TIGHT
    e1 = gpa.tl_embed(gpa.tl_cupcap(2, 1), G, 0)
    assert (gpa.multiply(e1, e1) - DELTA * e1).norm() < TIGHT
    # trace of nested cups = delta^(closed loops)
    cupcap = gpa.tl_embed(gpa.tl_cupcap(2, 1), G, 0)
    assert abs(gpa.trace(cupcap) - DELTA) < TIGHT  # one circle after closure


def test_tl_jones_relations():
    n = 3
    e1 = gpa.tl_embed(gpa.tl_cupcap(n, 1), G, 0)
    e2 = gpa.tl_embed(gpa.tl_cupcap(n, 2), G, 0)
    assert (gpa.multiply(gpa.multiply(e1, e2), e1) - e1).norm() < TIGHT
    assert (gpa.multiply(gpa.multiply(e2, e1), e2) - e2).norm() < TIGHT


def test_tl_multiplicativity_against_diagram_oracle():
    rng = random.Random(7)
    for n in (2, 3):
        diagrams = gpa.all_tl_diagrams(n)
        for _ in range(6):
            d1, d2 = rng.choice(diagrams), rng.choice(diagrams)
            circles, comp = compose_diagrams(d1, d2)
            lhs = gpa.multiply(gpa.tl_embed(d1, G, 0), gpa.tl_embed(d2, G, 0))
            rhs = (DELTA**circles) * gpa.tl_embed(comp, G, 0)
            assert (lhs - rhs).norm() < TIGHT


def test_jones_wenzl_properties():
    tol30 = gmpy2.mpfr("1e-30")
    for n in range(1, 6):
        f = gpa.jones_wenzl(n, G, 0)
        assert (gpa.multiply(f, f) - f).norm() < tol30
        assert (f.adjoint() - f).norm() < tol30
        assert abs(gpa.trace(f) - CTX.quantum_integer(n + 1)) < tol30
        for k in range(1, n):
            ek = gpa.tl_embed(gpa.tl_cupcap(n, k), G, 0)
            assert gpa.multiply(f, ek).norm() < tol30
        closures = {n, 2 * n} if n > 1 else {1, 2}
        for i in range(1, 2 * n + 1):
            capped = gpa.cap(f, i)
            if i in closures:
                assert capped.norm() > 0.5
            else:
                assert capped.norm() < tol30
        if n > 1:
            ratio = CTX.quantum_integer(n + 1) / CTX.quantum_integer(n)
            prev = gpa.jones_wenzl(n - 1, G, 0)
            assert (gpa.partial_trace_right(f) - ratio * prev).norm() < tol30


def test_span_membership():
    rng = random.Random(8)
    space = gpa.box_space(G, 2, 0)
    basis = [random_element(space, rng) for _ in range(3)]
    coeffs, residual = gpa.span_membership(basis[1], basis)
    assert residual < TIGHT
    assert abs(coeffs[1] - 1) < gmpy2.mpfr("1e-30")
    target = gpa.linear_combination([(2, basis[0]), (scalars.comp(0, -3), basis[2])])
    coeffs, residual = gpa.span_membership(target, basis)
    assert residual < gmpy2.mpfr("1e-30")
    assert abs(coeffs[0] - 2) < gmpy2.mpfr("1e-30")
    assert abs(coeffs[2] - scalars.comp(0, -3)) < gmpy2.mpfr("1e-30")
    # a vector orthogonalized against the list has residual = its own norm
    extra = random_element(space, rng)
    fit, _ = gpa.span_membership(extra, basis)
    ortho = extra - gpa.linear_combination(list(zip(fit, basis)))
    _, res = gpa.span_membership(ortho, basis)
    assert abs(res - ortho.norm()) < gmpy2.mpfr("1e-30")


def test_comp_circ_zero_and_shading():
    space = gpa.box_space(G, 3, 0)
    zero = gpa.zero_element(space)
    x = random_element(space, random.Random(9))
    assert gpa.comp_circ(zero, x).norm() < TIGHT
    out = gpa.comp_circ(x, x)
    assert out.space.n == 4 and out.space.parity == 0
    star = gpa.comp_star(x, x)
    assert star.space.n == 4 and star.space.parity == 0


def test_subalgebra_closure_tl_dims():
    dims = gpa.subalgebra_closure([], 4, graph=G)
    catalan = {0: 1, 1: 1, 2: 2, 3: 5, 4: 14}
    for n, c in catalan.items():
        assert dims[(n, 0)] == c
        assert dims[(n, 1)] == c
    f1 = gpa.jones_wenzl(1, G, 0).to_float()
    assert gpa.subalgebra_closure([f1], 4) == dims


def test_element_json_round_trip():
    f3 = gpa.jones_wenzl(3, G, 0)
    data = gpa.element_to_json(f3)
    assert data["graph"] == bigraph.TWOD2_CODE
    assert data["n"] == 3 and data["parity"] == "+"
    back = gpa.element_from_json(data)
    assert (back - f3).norm() < gmpy2.mpfr("1e-55")

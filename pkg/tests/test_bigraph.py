"""Tests for the graph codec, Perron-Frobenius data, and loop enumeration."""

from __future__ import annotations

import gmpy2
import pytest

from gpalab import bigraph, scalars

THEOREM_CODES = [
    bigraph.TWOD2_CODE,
    bigraph.TWOD2_DUAL_CODE,
    bigraph.TWOD2_REJECTED_CODE,
    bigraph.CONN_4442_CODE,
]


def tol(shift: int = 10) -> gmpy2.mpfr:
    return gmpy2.mpfr(10) ** (-scalars.get_precision() + shift)


def hand_built_twod2() -> bigraph.BipartiteGraph:
    """The chain-diamond-chain graph assembled field by field."""
    return bigraph.BipartiteGraph(
        depth_sizes=(1, 1, 1, 2, 1, 1, 1),
        blocks=(
            ((1,),),
            ((1,),),
            ((1,), (1,)),
            ((1, 1),),
            ((1,),),
            ((1,),),
        ),
        duals=((0,), (0,), (0,), (0,)),
    )


def test_round_trip_theorem_codes():
    for code in THEOREM_CODES:
        assert bigraph.encode_bigraph(bigraph.parse_bigraph(code)) == code


def test_parsed_twod2_matches_hand_built():
    parsed = bigraph.parse_bigraph(bigraph.TWOD2_CODE)
    assert parsed == hand_built_twod2()
    assert parsed.num_vertices == 8
    assert len(parsed.edges) == 8
    assert parsed.depth_sizes == (1, 1, 1, 2, 1, 1, 1)


def test_dual_graph_shape():
    g = bigraph.parse_bigraph(bigraph.TWOD2_DUAL_CODE)
    assert g.num_vertices == 10
    assert g.depth_sizes == (1, 1, 1, 2, 4, 1)
    # depth-4 dual permutation is (1)(2 3)(4) in 1-indexed form
    assert g.duals[-1] == (0, 2, 1, 3)


def test_4442_shape():
    g = bigraph.parse_bigraph(bigraph.CONN_4442_CODE)
    assert g.num_vertices == 15
    assert len(g.edges) == 14
    assert g.depth_sizes == (1, 1, 1, 1, 1, 3, 3, 2, 2)
    assert g.duals[-2] == (1, 0, 2)
    assert g.duals[-1] == (1, 0)


def test_minimal_codes():
    root_only = bigraph.parse_bigraph("bwdduals1")
    assert root_only.num_vertices == 1
    assert len(root_only.edges) == 0
    single_edge = bigraph.parse_bigraph("bwd1duals1")
    assert single_edge.num_vertices == 2
    assert len(single_edge.edges) == 1
    assert bigraph.encode_bigraph(single_edge) == "bwd1duals1"


def test_parse_errors():
    with pytest.raises(bigraph.CodecError):
        bigraph.parse_bigraph("xyz")
    with pytest.raises(bigraph.CodecError):
        bigraph.parse_bigraph("bwd1v1")  # no duals marker
    with pytest.raises(bigraph.MultiplicityError):
        bigraph.parse_bigraph("bwd2duals1")
    with pytest.raises(bigraph.CodecError):
        bigraph.parse_bigraph("bwd1x1duals1")  # too many adjacency digits
    with pytest.raises(bigraph.CodecError):
        bigraph.parse_bigraph("bwd1v1duals1")  # missing dual block for depth 2
    with pytest.raises(bigraph.DualsError):
        bigraph.parse_bigraph("bwd1v1p1duals1v2x2")  # not a permutation
    with pytest.raises(bigraph.DualsError):
        bigraph.parse_bigraph(
            "bwd1v1v1p1v1x0p1x0p0x1p0x1v0x1x1x0duals1v1v2x3x1x4"
        )  # 3-cycle is not an involution


def test_pf_twod2_norm_and_weights():
    g = bigraph.twod2_graph()
    pf = bigraph.perron_frobenius(g)
    r5 = scalars.sqrt_pos(5)
    assert abs(pf.norm**2 - (3 + r5)) < gmpy2.mpfr(10) ** -30
    ctx = scalars.default_quantum_context()
    q2, q3, q4 = (ctx.quantum_integer(n) for n in (2, 3, 4))
    expected = {0: 1, 1: q2, 2: q3, 3: q4 / 2, 4: q4 / 2, 5: q3, 6: q2, 7: 1}
    for v, value in expected.items():
        assert abs(pf.weight(v) - value) < tol()


def test_pf_4442_norm():
    g = bigraph.parse_bigraph(bigraph.CONN_4442_CODE)
    pf = bigraph.perron_frobenius(g)
    assert abs(pf.norm**2 - (3 + scalars.sqrt_pos(5))) < gmpy2.mpfr(10) ** -30


def test_pf_single_edge():
    pf = bigraph.perron_frobenius(bigraph.parse_bigraph("bwd1duals1"))
    assert abs(pf.norm - 1) < tol()


def test_pf_residual_invariant():
    for code in (bigraph.TWOD2_CODE, bigraph.CONN_4442_CODE):
        g = bigraph.parse_bigraph(code)
        pf = bigraph.perron_frobenius(g)
        for v in range(g.num_vertices):
            lhs = sum(pf.weight(w) for w in g.neighbors[v])
            assert abs(lhs - pf.norm * pf.weight(v)) < tol()
            assert pf.weight(v) > 0


def test_enumerate_loops_basics():
    g = bigraph.twod2_graph()
    zero = bigraph.enumerate_loops(g, 0, 0)
    assert zero == [(v,) for v in g.even_vertices]
    loops6 = bigraph.enumerate_loops(g, 0, 6)
    w, s, n, e = 2, 3, 4, 5
    assert (w, s, w, s, w, s, w) in loops6
    assert (e, s, e, s, e, s, e) in loops6
    assert loops6 == sorted(loops6)


def test_loop_counts_match_adjacency_powers():
    for code in (bigraph.TWOD2_CODE, bigraph.CONN_4442_CODE):
        g = bigraph.parse_bigraph(code)
        for n in range(0, 7):
            loops = bigraph.enumerate_loops(g, 0, 2 * n)
            counts: dict[int, int] = {}
            for loop in loops:
                counts[loop[0]] = counts.get(loop[0], 0) + 1
            for v in g.even_vertices:
                assert counts.get(v, 0) == bigraph.loop_count_at_vertex(g, v, 2 * n)


def test_loop_count_examples():
    g = bigraph.twod2_graph()
    assert bigraph.loop_count_at_vertex(g, 0, 2) == 1
    g4 = bigraph.parse_bigraph(bigraph.CONN_4442_CODE)
    assert bigraph.loop_count_at_vertex(g4, 0, 4) == 2


def test_json_description():
    g = bigraph.twod2_graph()
    desc = g.to_json_dict()
    assert desc["code"] == bigraph.TWOD2_CODE
    assert len(desc["vertices"]) == 8
    assert len(desc["edges"]) == 8
    assert desc["duals"] == [[0], [0], [0], [0]]

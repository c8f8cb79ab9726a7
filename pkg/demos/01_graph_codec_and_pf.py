"""Parse the compact bipartite-graph codec and compute Perron-Frobenius data.

The codec packs a depth-graded bipartite graph into a single string: 'bwd'
then one adjacency block per depth ('v' between depths, 'p' between vertices,
'x' between 0/1 digits), then 'duals' with one involution per even depth.
The diamond-with-arms graph and the 4442 graph are both built this way.
"""

from gpalab import bigraph
from gpalab import scalars

codes = {
    "single edge": "bwd1duals1",
    "diamond with arms": bigraph.TWOD2_CODE,
    "diamond dual": bigraph.TWOD2_DUAL_CODE,
    "rejected variant": bigraph.TWOD2_REJECTED_CODE,
    "4442": bigraph.CONN_4442_CODE,
}

for name, code in codes.items():
    graph = bigraph.parse_bigraph(code)
    assert bigraph.encode_bigraph(graph) == code
    print(f"{name}: {graph.num_vertices} vertices, {len(graph.edges)} edges, "
          f"depth profile {list(graph.depth_sizes)}")

print()
print("Perron-Frobenius data (weights normalized to 1 at the root):")
for name in ("diamond with arms", "4442"):
    graph = bigraph.parse_bigraph(codes[name])
    pf = bigraph.perron_frobenius(graph)
    print(f"  {name}: norm^2 = {scalars.decimal_str(pf.norm ** 2, 12)}")
    weights = ", ".join(
        scalars.decimal_str(pf.weight(v), 6) for v in range(graph.num_vertices)
    )
    print(f"    weights: {weights}")

graph = bigraph.twod2_graph()
print()
print("loop counts at the root (these are the box dimensions the planar")
print("subalgebra of the generator must reproduce):")
for n in range(7):
    print(f"  length {2 * n}: {bigraph.loop_count_at_vertex(graph, 0, 2 * n)}")

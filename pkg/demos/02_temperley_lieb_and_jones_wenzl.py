"""Temperley-Lieb diagrams and Jones-Wenzl projections inside the graph
planar algebra.

Non-crossing matchings of 2n boundary points embed as elements of the n-box
space; the Jones-Wenzl projection is the unique diagrammatic projection
killed by every same-side capping, built by the Wenzl recursion.
"""

import gmpy2

from gpalab import bigraph, gpa, scalars

graph = bigraph.twod2_graph()
ctx = scalars.default_quantum_context()

print("quantum integers at the graph norm ([2] = sqrt(3+sqrt(5))):")
for n in range(1, 7):
    print(f"  [{n}] = {scalars.decimal_str(ctx.quantum_integer(n), 12)}")

print()
print("non-crossing matchings (Catalan counts) and box-space dimensions:")
for n in range(1, 6):
    diagrams = gpa.all_tl_diagrams(n)
    space = gpa.box_space(graph, n, 0)
    print(f"  n={n}: {len(diagrams)} diagrams, "
          f"box dimension {space.total_dim}")

print()
print("Jones-Wenzl checks (idempotent, uncappable, trace = [n+1]):")
for n in range(1, 6):
    f = gpa.jones_wenzl(n, graph, 0)
    idem = (f * f - f).norm()
    caps = max(
        (gpa.cap(f, pos).norm()
         for pos in range(1, 2 * n + 1) if pos not in (n, 2 * n)),
        default=gmpy2.mpfr(0),
    )
    trace = abs(f.trace() - ctx.quantum_integer(n + 1))
    print(f"  f({n}): idempotent {scalars.decimal_str(idem, 3)}, "
          f"cappings {scalars.decimal_str(caps, 3)}, "
          f"trace defect {scalars.decimal_str(trace, 3)}")

print()
print("the partial trace of a Jones-Wenzl is the previous one, scaled:")
f4 = gpa.jones_wenzl(4, graph, 0)
f3 = gpa.jones_wenzl(3, graph, 0)
ratio = ctx.quantum_integer(5) / ctx.quantum_integer(4)
defect = (gpa.partial_trace_right(f4) - ratio * f3).norm()
print(f"  ptr f(4) - ([5]/[4]) f(3): {scalars.decimal_str(defect, 3)}")

"""Verification workbench for graph planar algebras of bipartite graphs.

The package builds the planar algebra of a depth-graded bipartite graph over
arbitrary-precision complex scalars, reconstructs the distinguished 3-box
generator of the diamond-with-arms graph together with all of its derived
elements and relation checks, and solves the unitarity constraints of the
4442 branch matrix.
"""

from __future__ import annotations

__version__ = "0.1.0"

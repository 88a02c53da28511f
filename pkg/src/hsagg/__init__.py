"""Hierarchical secure aggregation with groupwise keys.

Library layout:
  gf        prime-field arithmetic
  linalg    dense GF(q) matrices, rank, seeded random generation
  combi     user/group enumeration and saturating binomials
  rates     optimal rate region and blocklength selection
  scheme    precoding-matrix constructions and stacked matrices
  protocol  the two-hop aggregation round
  audit     rank predicates, exhaustive entropy oracles, rate audits
  cli       command-line front end and JSON formats
"""

__version__ = "0.1.0"

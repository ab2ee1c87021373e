"""slicedeg: exact degree analysis of slice-distinguishing polynomials over F_p.

Modules:
  linalg         exact F_p linear algebra (RREF, nullspace, rank oracle)
  cube           Boolean cube, multilinear polynomials, slice statistics
  closure        vanishing ideals, degree closures, ideal sampling
  distinguish    exact and robust minimum slice-distinguishing degree
  spectra        symmetric-function spectra, periods, decompositions
  constructions  explicit polynomial constructions and bound checkers
  experiments    named, seeded, reproducible experiment harness
"""

from .config import Caps, CapExceeded, DEFAULT_CAPS
from .linalg import FieldMatrix, PrimeField, RankOracle, nullspace_basis, rref
from .cube import (CubePoint, MultilinearPoly, SliceStats, SubstitutionMap,
                   apply_substitution, elementary_symmetric, enumerate_slice,
                   eval_poly, multilinearize_product, slice_stats,
                   symmetric_value_table)

__version__ = "0.1.0"

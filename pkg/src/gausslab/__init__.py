"""Gauss and Kloosterman sums over small finite fields.

Build a field with :func:`build_field`, fix a tower with
:func:`subfield_view`, then evaluate character sums, aggregate statistics
and verification suites from the submodules.  Everything is deterministic:
canonical modulus, canonical generator, fixed-order reductions.
"""

from .chars import AddChar, Family
from .equidist import Target, build_population, ks_distance, star_discrepancy, weyl_sum
from .expsum import (
    gauss_records,
    gauss_sum_direct,
    gauss_sums_all,
    kloosterman_all,
    kloosterman_direct,
    kloosterman_table,
)
from .ffield import ZERO, FieldTable, GuardError, SubfieldView, build_field, subfield_view
from .gl2gauss import conj_classes, cuspidal_char, matrix_gauss_sum, verify_kondo

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "ZERO",
    "AddChar",
    "Family",
    "FieldTable",
    "GuardError",
    "SubfieldView",
    "Target",
    "build_field",
    "subfield_view",
    "build_population",
    "weyl_sum",
    "star_discrepancy",
    "ks_distance",
    "gauss_records",
    "gauss_sum_direct",
    "gauss_sums_all",
    "kloosterman_all",
    "kloosterman_direct",
    "kloosterman_table",
    "conj_classes",
    "cuspidal_char",
    "matrix_gauss_sum",
    "verify_kondo",
]

"""Cross-validation harness for the cliffc samplers.

Transcribes the published reference samplers (with seeds threaded
through and arithmetic over GF(2)), compares their output distributions
against the cliffc command line tool, and reports a verdict on the
reference listing's defective rounding formula.  The primary package is
only ever exercised through its command line and JSON formats.
"""

from .compare import XValReport, compare_distributions, exact_layer_pmf
from .reference import (
    corrected_sample_qmallows,
    reference_random_clifford,
    reference_sample_qmallows,
)

__all__ = [
    "XValReport",
    "compare_distributions",
    "exact_layer_pmf",
    "corrected_sample_qmallows",
    "reference_random_clifford",
    "reference_sample_qmallows",
]

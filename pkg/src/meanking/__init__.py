"""Mean King's problem in prime power dimensions.

Modules:

* :mod:`meanking.galois` - GF(p^n) arithmetic and operation tables
* :mod:`meanking.weylalg` - qudit Pauli/Weyl operators and state helpers
* :mod:`meanking.mub` - commuting observable sets and mutually unbiased bases
* :mod:`meanking.kings` - label tables, tracking basis, protocol verification
* :mod:`meanking.cli` - command-line front end
"""

from .galois import FieldElement, FieldSpec, default_spec, validate_spec
from .kings import build_protocol, exhaustive_verify, label_table, run_round
from .mub import family, unbiasedness_report
from .weylalg import WeylWord

__version__ = "0.1.0"

__all__ = [
    "FieldElement",
    "FieldSpec",
    "WeylWord",
    "build_protocol",
    "default_spec",
    "exhaustive_verify",
    "family",
    "label_table",
    "run_round",
    "unbiasedness_report",
    "validate_spec",
]

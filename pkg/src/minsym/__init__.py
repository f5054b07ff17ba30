"""Minimum-symbol analysis and dataset tooling for attribute-value signaling games."""

from .core import (
    AttributeSpace,
    GameInstance,
    ObjectVector,
    SymbolSet,
    decode_symbol,
    difference_set,
    encode_pair,
)
from .sms import SmsResult, solve_min_sym, solve_min_sym_enum, solve_min_sym_hitting, verify_witness

__version__ = "0.1.0"

__all__ = [
    "AttributeSpace",
    "GameInstance",
    "ObjectVector",
    "SymbolSet",
    "SmsResult",
    "decode_symbol",
    "difference_set",
    "encode_pair",
    "solve_min_sym",
    "solve_min_sym_enum",
    "solve_min_sym_hitting",
    "verify_witness",
    "__version__",
]

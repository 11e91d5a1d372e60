"""Arithmetic dynamics of Drinfeld F_q[T]-modules over F_q(t)."""

from .drinfeld import DrinfeldModule, j_invariant, parse_module, torsion_global
from .errors import DomainError, DrinfeldError, ParseError, UsageError
from .funcfield import GF, Place, PolyA, RatFunc

__all__ = ["DrinfeldModule", "DomainError", "DrinfeldError", "GF", "ParseError",
           "Place", "PolyA", "RatFunc", "UsageError", "j_invariant", "parse_module",
           "torsion_global"]
__version__ = "0.1.0"

"""QPP interleaver algebra and turbo-code minimum distance tools."""

from .permpoly import Factorization, PermPoly, Qpp, factorize
from .convcode import ConstituentSpec, TerminationMode

__all__ = ["Factorization", "PermPoly", "Qpp", "factorize", "ConstituentSpec", "TerminationMode"]
__version__ = "0.1.0"

"""Hidden periodicity in the prime sequence via logarithmic gaps and telegraph signals."""

from .errors import PrimePeriodError

__version__ = "0.1.0"

__all__ = ["PrimePeriodError", "__version__"]

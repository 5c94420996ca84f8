"""Thermodynamics of information erasure into heat and spin reservoirs."""

__version__ = "0.1.0"

from ._core import BACKEND  # noqa: E402
from .errors import EraserLabError, NumericalError, ValidationError  # noqa: E402

__all__ = ["BACKEND", "EraserLabError", "NumericalError", "ValidationError", "__version__"]

"""Numerical toolkit for the Oshima compactification of SL(n, R) and its groupoids."""

from .errors import OshimaLabError
from .lie import Tolerances, build_group

__version__ = "0.1.0"

__all__ = ["OshimaLabError", "Tolerances", "build_group", "__version__"]

"""
decoherence-kit - collisional decoherence observables for matter-wave interferometry
"""

__version__ = "0.1.0"

from decokit.errors import DecokitError
from decokit.validation import ValidationSuite

__all__ = ["DecokitError", "ValidationSuite", "__version__"]

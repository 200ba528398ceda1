"""Exact-plus-numerical laboratory for deltoid-domain orthogonal polynomial
diffusions and their A2/G2 root-system structure."""

__version__ = "0.1.0"

from .scalars import FieldScalar, Rational  # noqa: F401
from .poly import MPoly  # noqa: F401
from .diffusion import DiffusionModel  # noqa: F401

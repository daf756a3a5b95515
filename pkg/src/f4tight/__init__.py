"""A (q^4+1)-tight set in the polar space of the minimal F_4(q)-module."""

from .galois import FieldSpec, field_from_order, field_make
from .pointset import PointSet

__all__ = ["FieldSpec", "PointSet", "field_from_order", "field_make"]
__version__ = "0.1.0"

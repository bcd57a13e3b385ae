"""Root init for radixtiles."""
from . import constants, errors, parser, transformers
from .digits import DigitSet, canonical_digits, validate_digit_set
from .lattice import IntMatrix, IntVector
from .radix import decide_radix, expand

__version__ = "0.1.0"

__title__ = "radixtiles"
__description__ = "Radix representations in matrix bases, self-affine tiles and Haar-like wavelets"

__license__ = "MIT"

project_name = __title__

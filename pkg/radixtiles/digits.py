"""Digit sets: canonical generation, validation and the digit step."""

import itertools
import logging
from fractions import Fraction
from functools import cached_property
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

from radixtiles import config
from radixtiles.errors import (DimensionError, DuplicateCoset, InternalError, MissingZero, ResourceLimit,
                               SingularMatrix, WrongCount, _Error)
from radixtiles.lattice import (CosetIndex, IntMatrix, IntVector, SmithDecomposition, as_matrix, as_vector,
                                coset_index, smith_normal_form, solve_integral)

logger = logging.getLogger(__name__)

HALF = Fraction(1, 2)


class FundamentalDomain:
    """The half-open cube F = [-1/2, 1/2)^n."""

    @staticmethod
    def contains(point: Sequence[Fraction]) -> bool:
        """Exact membership test, lower faces included, upper faces excluded."""
        return all(-HALF <= c < HALF for c in point)

    @staticmethod
    def contains_image(matrix: IntMatrix, z: Sequence[int]) -> bool:
        """Return True when A^-1 z lies in F, decided in integers.

        With w = adj(A) z the condition -1/2 <= w_i / det < 1/2 becomes -det <= 2 w_i < det for det > 0 and
        det < 2 w_i <= -det for det < 0.
        """
        det = matrix.det
        w = matrix.adjugate @ z
        if det > 0:
            return all(-det <= 2 * c < det for c in w)
        return all(det < 2 * c <= -det for c in w)


F = FundamentalDomain()


class DigitSet:
    """A complete residue system of Z^n / A(Z^n) containing 0, attached to its radix A.

    Instances are only built through :func:`validate_digit_set` or :func:`canonical_digits`, so the
    invariants (q members, distinct cosets, zero present) always hold.
    """

    def __init__(self, matrix: IntMatrix, digits: Iterable[IntVector], canonical: bool = False):
        self.matrix = matrix
        self.digits: Tuple[IntVector, ...] = tuple(digits)
        self.canonical = canonical

    @property
    def n(self) -> int:
        """Dimension."""
        return self.matrix.n

    @property
    def q(self) -> int:
        """Number of digits, |det A|."""
        return len(self.digits)

    def __iter__(self) -> Iterator[IntVector]:
        return iter(self.digits)

    def __len__(self) -> int:
        return len(self.digits)

    def __eq__(self, other) -> bool:
        return isinstance(other, DigitSet) and self.matrix == other.matrix and self.digits == other.digits

    def __hash__(self) -> int:
        return hash((self.matrix, self.digits))

    def __repr__(self) -> str:
        return f"DigitSet({self.matrix.rows}, {[tuple(d) for d in self.digits]}, canonical={self.canonical})"

    @cached_property
    def snf(self) -> SmithDecomposition:
        """Smith decomposition of the radix."""
        return smith_normal_form(self.matrix)

    @cached_property
    def by_coset(self) -> Dict[CosetIndex, IntVector]:
        """Coset index -> digit."""
        return {coset_index(d, self.snf): d for d in self.digits}

    @cached_property
    def max_norm(self) -> float:
        """C = max over digits of the Euclidean norm."""
        return max(d.norm_squared() for d in self.digits) ** 0.5

    def to_json(self) -> dict:
        """Serialize with decimal-string integers."""
        return {
            "matrix": self.matrix.to_json(),
            "digits": [d.to_json() for d in self.digits],
            "canonical": self.canonical,
        }

    @classmethod
    def from_json(cls, data: dict) -> "DigitSet":
        """Rebuild and revalidate a serialized digit set."""
        matrix = IntMatrix.from_json(data["matrix"])
        digit_set = validate_digit_set(matrix, [IntVector(int(c) for c in d) for d in data["digits"]])
        digit_set.canonical = bool(data.get("canonical", False))
        return digit_set


def validate_digit_set(matrix, digits: Sequence) -> DigitSet:
    """Check that the digits form a complete residue system of Z^n / A(Z^n) containing 0.

    The returned DigitSet keeps the input order.

    Raises
    ------
    SingularMatrix
        If det A = 0.
    DimensionError
        If a digit has the wrong dimension.
    WrongCount
        If there are not q = |det A| digits.
    DuplicateCoset
        For the first pair of congruent digits.
    MissingZero
        If 0 is not a digit.
    """
    matrix = as_matrix(matrix)
    q = abs(matrix.det)
    if q == 0:
        raise SingularMatrix(str(matrix))

    vectors = [as_vector(d) for d in digits]
    for d in vectors:
        if d.n != matrix.n:
            raise DimensionError(matrix.n, d.n, f"digit {d} does not match the matrix")
    if len(vectors) != q:
        raise WrongCount(q, len(vectors))

    snf = smith_normal_form(matrix)
    seen: Dict[CosetIndex, IntVector] = {}
    for d in vectors:
        index = coset_index(d, snf)
        if index in seen:
            raise DuplicateCoset(seen[index], d)
        seen[index] = d

    if IntVector.zero(matrix.n) not in vectors:
        raise MissingZero()

    return DigitSet(matrix, vectors)


def digit_box(matrix: IntMatrix) -> List[range]:
    """Integer ranges per coordinate covering A(F): |z_i| <= sum_j |A_ij| / 2."""
    return [range(-(s // 2), s // 2 + 1) for s in matrix.row_abs_sums()]


def canonical_digits(matrix, box_cap: Optional[int] = None) -> DigitSet:
    """Return D = A(F) ∩ Z^n in lexicographic order.

    Raises
    ------
    ResourceLimit
        If the enumeration box has more than ``box_cap`` points.
    InternalError
        If the enumeration does not give a complete residue system.

    Examples
    --------
    >>> [tuple(d) for d in canonical_digits([[3]])]
    [(-1,), (0,), (1,)]
    """
    matrix = as_matrix(matrix)
    if matrix.det == 0:
        raise SingularMatrix(str(matrix))

    box = digit_box(matrix)
    box_size = 1
    for r in box:
        box_size *= len(r)
    cap = config.get_point_cap(box_cap)
    if box_size > cap:
        raise ResourceLimit("canonical digit box", box_size, cap)

    digits = [IntVector(z) for z in itertools.product(*box) if F.contains_image(matrix, z)]
    try:
        digit_set = validate_digit_set(matrix, digits)
    except _Error as exc:
        raise InternalError(f"canonical digits of {matrix} failed validation: {exc.message}") from exc

    digit_set.canonical = True
    logger.debug(f"canonical digits of {matrix}: {len(digits)} from a box of {box_size}")
    return digit_set


def digit_for(x: Sequence[int], digit_set: DigitSet) -> Tuple[IntVector, IntVector]:
    """Return the digit d congruent to x and the successor x' = A^-1 (x - d), so that x = A x' + d."""
    x = as_vector(x)
    digit = digit_set.by_coset[coset_index(x, digit_set.snf)]
    successor = solve_integral(digit_set.matrix, x - digit)
    if successor is None:
        raise InternalError(f"{x} - {digit} is not in A(Z^n)")
    return digit, successor

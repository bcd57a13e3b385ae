"""Exact integer linear algebra over Z^n.

Matrices and vectors hold Python integers only, so determinants, Smith normal forms and powers of the
radix never overflow. Rational quantities are expressed through the adjugate (``A^-1 = adj(A) / det A``)
so that no floating point value enters a decision.
"""

import itertools
import json
import logging
import numbers
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Iterable, List, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np
import sympy

from radixtiles.errors import DimensionError, ResourceLimit, SingularMatrix

logger = logging.getLogger(__name__)


def _as_int(value) -> int:
    if isinstance(value, bool) or not isinstance(value, numbers.Integral):
        if isinstance(value, Fraction) and value.denominator == 1:
            return int(value)
        raise TypeError(f"expected an integer entry, got {value!r}")
    return int(value)


class IntVector(tuple):
    """Lattice vector with exact integer entries.

    Behaves like a tuple (hashable, comparable, usable as a set member) but ``+``, ``-`` and unary ``-``
    are componentwise vector operations.
    """

    def __new__(cls, entries: Iterable = ()):
        return super().__new__(cls, (_as_int(x) for x in entries))

    @classmethod
    def zero(cls, n: int) -> "IntVector":
        """Return the zero vector of dimension n."""
        return cls((0,) * n)

    @property
    def n(self) -> int:
        """Dimension."""
        return len(self)

    def _check(self, other: Sequence) -> None:
        if len(other) != len(self):
            raise DimensionError(len(self), len(other))

    def __add__(self, other: Sequence) -> "IntVector":
        self._check(other)
        return IntVector(a + b for a, b in zip(self, other))

    def __sub__(self, other: Sequence) -> "IntVector":
        self._check(other)
        return IntVector(a - b for a, b in zip(self, other))

    def __neg__(self) -> "IntVector":
        return IntVector(-a for a in self)

    def __mul__(self, scalar: int) -> "IntVector":
        return IntVector(scalar * a for a in self)

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        """Return True for the zero vector."""
        return not any(self)

    def norm_squared(self) -> int:
        """Exact squared Euclidean norm."""
        return sum(a * a for a in self)

    def to_json(self) -> List[str]:
        """Serialize as a list of decimal strings."""
        return [str(a) for a in self]

    def __repr__(self) -> str:
        return f"IntVector({list(self)})"

    def __str__(self) -> str:
        return "(" + ",".join(str(a) for a in self) + ")"


class IntMatrix:
    """Square matrix with exact integer entries, immutable."""

    def __init__(self, rows: Iterable[Iterable]):
        """Init IntMatrix.

        :param rows: Row-major entries, square, dimension at least 1.
        """
        self.rows: Tuple[Tuple[int, ...], ...] = tuple(tuple(_as_int(x) for x in row) for row in rows)
        self.n = len(self.rows)
        if self.n == 0:
            raise DimensionError(">= 1", 0, "matrix must not be empty")
        for row in self.rows:
            if len(row) != self.n:
                raise DimensionError(self.n, len(row), "matrix must be square")

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        """Return the n x n identity."""
        return cls.scalar(n, 1)

    @classmethod
    def scalar(cls, n: int, c: int) -> "IntMatrix":
        """Return c times the n x n identity."""
        return cls([[c if i == j else 0 for j in range(n)] for i in range(n)])

    def __getitem__(self, index: Tuple[int, int]) -> int:
        i, j = index
        return self.rows[i][j]

    def __eq__(self, other) -> bool:
        return isinstance(other, IntMatrix) and self.rows == other.rows

    def __hash__(self) -> int:
        return hash(self.rows)

    def __repr__(self) -> str:
        return f"IntMatrix({[list(r) for r in self.rows]})"

    def __str__(self) -> str:
        return json.dumps([list(r) for r in self.rows])

    def __neg__(self) -> "IntMatrix":
        return IntMatrix([[-x for x in row] for row in self.rows])

    def __sub__(self, other: "IntMatrix") -> "IntMatrix":
        self._check(other.n)
        return IntMatrix([[a - b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def __add__(self, other: "IntMatrix") -> "IntMatrix":
        self._check(other.n)
        return IntMatrix([[a + b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def _check(self, n: int) -> None:
        if n != self.n:
            raise DimensionError(self.n, n)

    def __matmul__(self, other):
        if isinstance(other, IntMatrix):
            self._check(other.n)
            columns = list(zip(*other.rows))
            return IntMatrix([[sum(a * b for a, b in zip(row, col)) for col in columns] for row in self.rows])

        self._check(len(other))
        return IntVector(sum(a * b for a, b in zip(row, other)) for row in self.rows)

    def transpose(self) -> "IntMatrix":
        """Return the transpose."""
        return IntMatrix(zip(*self.rows))

    def gram(self) -> "IntMatrix":
        """Return A^T A."""
        return self.transpose() @ self

    def power(self, k: int) -> "IntMatrix":
        """Return A^k for k >= 0 by repeated squaring."""
        if k < 0:
            raise ValueError("negative powers are not integer matrices; use adjugate/det")
        result = IntMatrix.identity(self.n)
        base = self
        while k:
            if k & 1:
                result = result @ base
            base = base @ base
            k >>= 1
        return result

    def row_abs_sums(self) -> List[int]:
        """Return the absolute row sums (sum_j |A_ij|)."""
        return [sum(abs(x) for x in row) for row in self.rows]

    def max_abs_row_sum(self) -> int:
        """Return the infinity operator norm."""
        return max(self.row_abs_sums())

    @cached_property
    def det(self) -> int:
        """Exact determinant."""
        return det_exact(self)

    @cached_property
    def adjugate(self) -> "IntMatrix":
        """Exact adjugate, adj(A) A = det(A) I."""
        if self.n == 1:
            return IntMatrix([[1]])
        return IntMatrix([[int(x) for x in row] for row in self.to_sympy().adjugate().tolist()])

    def to_sympy(self) -> sympy.Matrix:
        """Return a sympy integer matrix."""
        return sympy.Matrix(self.rows)

    def to_numpy(self, dtype=float) -> np.ndarray:
        """Return a numpy copy (float by default, use ``dtype=object`` for exact integers)."""
        return np.array(self.rows, dtype=dtype)

    def to_json(self) -> List[List[str]]:
        """Serialize as nested lists of decimal strings, row-major."""
        return [[str(x) for x in row] for row in self.rows]

    @classmethod
    def from_json(cls, data: Sequence[Sequence[Union[str, int]]]) -> "IntMatrix":
        """Parse nested lists of integers or decimal strings."""
        return cls([[int(x) for x in row] for row in data])

    def inverse_apply(self, x: Sequence) -> Tuple[Fraction, ...]:
        """Return A^-1 x as exact fractions."""
        det = self.det
        if det == 0:
            raise SingularMatrix(str(self))
        return tuple(Fraction(v, det) for v in self.adjugate @ x)


class SmithDecomposition(NamedTuple):
    """U A V = S with unimodular U, V and diagonal S, s_1 | s_2 | ... | s_n."""

    U: IntMatrix
    S: IntMatrix
    V: IntMatrix

    @property
    def invariant_factors(self) -> Tuple[int, ...]:
        """Return (s_1, ..., s_n)."""
        return tuple(self.S[i, i] for i in range(self.S.n))


class CosetIndex(NamedTuple):
    """Least non-negative residues (r_1, ..., r_n), 0 <= r_i < s_i."""

    residues: Tuple[int, ...]


def as_matrix(value) -> IntMatrix:
    """Coerce nested sequences (or an IntMatrix) to IntMatrix."""
    return value if isinstance(value, IntMatrix) else IntMatrix(value)


def as_vector(value) -> IntVector:
    """Coerce a sequence (or an integer, for n = 1) to IntVector."""
    if isinstance(value, IntVector):
        return value
    if isinstance(value, numbers.Integral):
        return IntVector((value,))
    return IntVector(value)


def det_exact(matrix: IntMatrix) -> int:
    """Return the exact determinant, computed fraction-free (Bareiss).

    Examples
    --------
    The twin dragon matrix has two digits:

    >>> det_exact(IntMatrix([[1, 1], [-1, 1]]))
    2
    """
    return _det_rows(matrix.rows)


@lru_cache(maxsize=4096)
def _det_rows(rows: Tuple[Tuple[int, ...], ...]) -> int:
    if len(rows) == 1:
        return rows[0][0]
    return int(sympy.Matrix(rows).det(method="bareiss"))


def smith_normal_form(matrix: IntMatrix) -> SmithDecomposition:
    """Return the Smith normal form U A V = S of a nonsingular integer matrix.

    Pivoting is deterministic: the nonzero entry of smallest magnitude in the active block, ties broken by
    the lowest (row, column) index. Diagonal entries are positive and satisfy s_i | s_(i+1).

    Raises
    ------
    SingularMatrix
        If det A = 0.
    """
    if matrix.det == 0:
        raise SingularMatrix(str(matrix))
    return _smith(matrix)


@lru_cache(maxsize=1024)
def _smith(matrix: IntMatrix) -> SmithDecomposition:
    n = matrix.n
    s = [list(row) for row in matrix.rows]
    u = [[int(i == j) for j in range(n)] for i in range(n)]
    v = [[int(i == j) for j in range(n)] for i in range(n)]

    def swap_rows(i: int, j: int) -> None:
        s[i], s[j] = s[j], s[i]
        u[i], u[j] = u[j], u[i]

    def swap_columns(i: int, j: int) -> None:
        for m in (s, v):
            for row in m:
                row[i], row[j] = row[j], row[i]

    def add_row(target: int, source: int, factor: int) -> None:
        for m in (s, u):
            m[target] = [a + factor * b for a, b in zip(m[target], m[source])]

    def add_column(target: int, source: int, factor: int) -> None:
        for m in (s, v):
            for row in m:
                row[target] += factor * row[source]

    for t in range(n):
        while True:
            candidates = [(abs(s[i][j]), i, j) for i in range(t, n) for j in range(t, n) if s[i][j]]
            _, pi, pj = min(candidates)
            swap_rows(t, pi)
            swap_columns(t, pj)
            pivot = s[t][t]

            clean = True
            for i in range(t + 1, n):
                if s[i][t]:
                    add_row(i, t, -(s[i][t] // pivot))
                    clean = clean and s[i][t] == 0
            for j in range(t + 1, n):
                if s[t][j]:
                    add_column(j, t, -(s[t][j] // pivot))
                    clean = clean and s[t][j] == 0
            if not clean:
                continue

            offender = next(
                (i for i in range(t + 1, n) for j in range(t + 1, n) if s[i][j] % pivot),
                None,
            )
            if offender is None:
                break
            add_row(t, offender, 1)

        if s[t][t] < 0:
            s[t] = [-a for a in s[t]]
            u[t] = [-a for a in u[t]]

    return SmithDecomposition(U=IntMatrix(u), S=IntMatrix(s), V=IntMatrix(v))


def coset_index(x: Sequence, snf: SmithDecomposition) -> CosetIndex:
    """Return the coset of x in Z^n / A(Z^n) as least non-negative residues of U x modulo (s_1, ..., s_n)."""
    ux = snf.U @ as_vector(x)
    return CosetIndex(tuple(c % f for c, f in zip(ux, snf.invariant_factors)))


def solve_integral(matrix: IntMatrix, b: Sequence) -> Optional[IntVector]:
    """Return the integer solution z of A z = b, or None if the rational solution is not integral.

    Raises
    ------
    SingularMatrix
        If det A = 0.
    """
    det = matrix.det
    if det == 0:
        raise SingularMatrix(str(matrix))

    numerators = matrix.adjugate @ as_vector(b)
    if any(c % det for c in numerators):
        return None
    return IntVector(c // det for c in numerators)


def same_coset(x: Sequence, y: Sequence, matrix: IntMatrix) -> bool:
    """Return True when x - y lies in A(Z^n)."""
    return solve_integral(matrix, as_vector(x) - as_vector(y)) is not None


def coset_representatives(matrix: IntMatrix) -> List[IntVector]:
    """Return one representative U^-1 r per coset, r running over the residue box of the Smith form."""
    snf = smith_normal_form(matrix)
    u_inv = snf.U.adjugate if snf.U.det == 1 else -snf.U.adjugate
    boxes = [range(f) for f in snf.invariant_factors]
    return [u_inv @ IntVector(r) for r in itertools.product(*boxes)]


@lru_cache(maxsize=4096)
def inverse_power_norm_squared(matrix: IntMatrix, power: int) -> Fraction:
    """Return the squared Frobenius norm of A^-power, an exact upper bound on the squared spectral norm."""
    det = matrix.det
    if det == 0:
        raise SingularMatrix(str(matrix))
    if power == 0:
        return Fraction(matrix.n)

    adj_power = matrix.adjugate.power(power)
    squares = sum(x * x for row in adj_power.rows for x in row)
    return Fraction(squares, det ** (2 * power))


@lru_cache(maxsize=4096)
def inverse_power_norm(matrix: IntMatrix, power: int) -> float:
    """Return an upper bound on the spectral norm of A^-power.

    The bound is the Frobenius norm of the exact rational matrix adj(A)^power / det(A)^power, rounded up.
    """
    return float(np.sqrt(float(inverse_power_norm_squared(matrix, power)))) * (1 + 1e-12)


def contraction_power(matrix: IntMatrix, limit: int = 512) -> int:
    """Return the least m >= 1 whose Frobenius bound on |A^-m| is at most 1/2, compared exactly.

    Raises
    ------
    ResourceLimit
        If no m <= limit contracts, which happens when A is not a dilation matrix.
    """
    for m in range(1, limit + 1):
        if inverse_power_norm_squared(matrix, m) <= Fraction(1, 4):
            return m
    raise ResourceLimit("contraction power", limit + 1, limit)

"""Exact lattice arithmetic and Smith normal form tests."""
from fractions import Fraction

import numpy as np
import pytest

from radixtiles.errors import DimensionError, ResourceLimit, SingularMatrix
from radixtiles.lattice import (IntMatrix, IntVector, coset_index, coset_representatives, contraction_power,
                                det_exact, inverse_power_norm, inverse_power_norm_squared, same_coset,
                                smith_normal_form, solve_integral)

from ..constants import MU_ABOVE_TWO, SINGULAR, THREE_I2, TWIN_DRAGON


class TestIntVector:
    """Componentwise vector arithmetic."""

    def test_arithmetic(self):
        """Addition, subtraction, negation and scaling are componentwise."""
        x, y = IntVector((1, -2)), IntVector((3, 5))
        assert x + y == (4, 3)
        assert x - y == (-2, -7)
        assert -x == (-1, 2)
        assert x * 3 == (3, -6)
        assert isinstance(x + y, IntVector)

    def test_zero_and_norm(self):
        """Zero vector and squared norm."""
        assert IntVector.zero(3).is_zero()
        assert IntVector((3, 4)).norm_squared() == 25

    def test_dimension_mismatch(self):
        """Vectors of different dimension cannot be added."""
        with pytest.raises(DimensionError):
            IntVector((1, 2)) + IntVector((1,))

    def test_rejects_non_integers(self):
        """Entries must be integers."""
        with pytest.raises(TypeError):
            IntVector((1.5, 2))

    def test_json(self):
        """Integers serialize as decimal strings."""
        assert IntVector((10**30, -1)).to_json() == [str(10**30), "-1"]


class TestIntMatrix:
    """Exact matrix operations."""

    def test_det_and_adjugate(self):
        """adj(A) A = det(A) I."""
        matrix = IntMatrix([[2, 1, 0], [1, 3, 1], [0, 1, 4]])
        assert matrix.det == det_exact(matrix) == 18
        product = matrix.adjugate @ matrix
        assert product == IntMatrix.scalar(3, 18)

    def test_power(self):
        """Powers of the twin dragon matrix."""
        dragon = IntMatrix(TWIN_DRAGON)
        assert dragon.power(0) == IntMatrix.identity(2)
        assert dragon.power(2) == IntMatrix([[0, 2], [-2, 0]])
        assert dragon.power(4) == IntMatrix.scalar(2, -4)

    def test_big_integers(self):
        """Large powers stay exact."""
        matrix = IntMatrix([[3]])
        assert matrix.power(80)[0, 0] == 3**80

    def test_matrix_vector_product(self):
        """A x for a lattice vector."""
        assert IntMatrix(TWIN_DRAGON) @ IntVector((1, 0)) == (1, -1)

    def test_inverse_apply(self):
        """A^-1 x as exact fractions."""
        assert IntMatrix(TWIN_DRAGON).inverse_apply((1, 0)) == (Fraction(1, 2), Fraction(1, 2))

    def test_ragged_rows(self):
        """Rows of different lengths are rejected."""
        with pytest.raises(DimensionError):
            IntMatrix([[1, 2], [3]])

    def test_json_round_trip(self):
        """from_json inverts to_json."""
        matrix = IntMatrix([[5, -2], [7, 3]])
        assert IntMatrix.from_json(matrix.to_json()) == matrix


class TestSmithNormalForm:
    """U A V = S with s_i | s_(i+1)."""

    def test_twin_dragon(self):
        """The twin dragon quotient is Z/2."""
        snf = smith_normal_form(IntMatrix(TWIN_DRAGON))
        assert snf.invariant_factors == (1, 2)

    def test_scalar(self):
        """3 I_2 has quotient (Z/3)^2."""
        assert smith_normal_form(IntMatrix(THREE_I2)).invariant_factors == (3, 3)

    @pytest.mark.parametrize("rows", MU_ABOVE_TWO + [TWIN_DRAGON, [[2, 4], [6, 8]], [[0, 1], [6, 0]]])
    def test_decomposition(self, rows):
        """U and V are unimodular, S is diagonal with positive dividing entries and |det| = prod s_i."""
        matrix = IntMatrix(rows)
        snf = smith_normal_form(matrix)
        assert snf.U @ matrix @ snf.V == snf.S
        assert abs(snf.U.det) == 1 and abs(snf.V.det) == 1

        factors = snf.invariant_factors
        assert all(f > 0 for f in factors)
        assert all(b % a == 0 for a, b in zip(factors, factors[1:]))
        assert np.prod(factors) == abs(matrix.det)
        off_diagonal = [snf.S[i, j] for i in range(matrix.n) for j in range(matrix.n) if i != j]
        assert not any(off_diagonal)

    def test_deterministic(self):
        """The same matrix always gives the same decomposition."""
        matrix = IntMatrix([[4, 6], [2, 7]])
        assert smith_normal_form(matrix) == smith_normal_form(IntMatrix([[4, 6], [2, 7]]))

    def test_singular(self):
        """det A = 0 is rejected."""
        with pytest.raises(SingularMatrix):
            smith_normal_form(IntMatrix(SINGULAR))


class TestCosets:
    """Coset indices, integral solutions and representatives."""

    def test_coset_index_agrees_with_solvability(self):
        """Equal coset indices exactly when x - y lies in A(Z^n)."""
        matrix = IntMatrix([[2, 1], [0, 3]])
        snf = smith_normal_form(matrix)
        vectors = [IntVector((a, b)) for a in range(-3, 4) for b in range(-3, 4)]
        for x in vectors[::5]:
            for y in vectors:
                assert (coset_index(x, snf) == coset_index(y, snf)) == same_coset(x, y, matrix)

    def test_solve_integral(self):
        """Integral solutions exist only on A(Z^n)."""
        dragon = IntMatrix(TWIN_DRAGON)
        assert solve_integral(dragon, (2, 0)) == (1, 1)
        assert solve_integral(dragon, (1, 0)) is None

    def test_solve_singular(self):
        """Singular systems are rejected."""
        with pytest.raises(SingularMatrix):
            solve_integral(IntMatrix(SINGULAR), (1, 2))

    @pytest.mark.parametrize("rows", [TWIN_DRAGON, THREE_I2, [[2, 1], [0, 3]], [[0, 1], [6, 0]]])
    def test_representatives(self, rows):
        """One representative per coset."""
        matrix = IntMatrix(rows)
        snf = smith_normal_form(matrix)
        representatives = coset_representatives(matrix)
        assert len(representatives) == abs(matrix.det)
        assert len({coset_index(r, snf) for r in representatives}) == abs(matrix.det)


class TestNormBounds:
    """Upper bounds on the norm of inverse powers."""

    @pytest.mark.parametrize("rows", [TWIN_DRAGON, [[3, 1], [0, 3]], [[2, 1], [0, 3]]])
    def test_bounds_spectral_norm(self, rows):
        """The Frobenius bound is never below the spectral norm."""
        matrix = IntMatrix(rows)
        for k in range(1, 6):
            inverse = np.linalg.inv(np.array(matrix.power(k).rows, dtype=float))
            assert inverse_power_norm(matrix, k) >= np.linalg.norm(inverse, 2) * (1 - 1e-12)

    @pytest.mark.parametrize("rows", [TWIN_DRAGON, [[2]], [[3, 1], [0, 3]]])
    def test_contraction_power(self, rows):
        """The least power whose inverse bound is at most 1/2."""
        matrix = IntMatrix(rows)
        m = contraction_power(matrix)
        assert inverse_power_norm_squared(matrix, m) <= Fraction(1, 4)
        assert m == 1 or inverse_power_norm_squared(matrix, m - 1) > Fraction(1, 4)

    def test_strong_contraction(self):
        """A = 3 contracts at once."""
        assert contraction_power(IntMatrix([[3]])) == 1

    @pytest.mark.parametrize("rows, power", [([[2]], 1), (TWIN_DRAGON, 3)])
    def test_bound_exactly_one_half(self, rows, power):
        """A bound of exactly 1/2 already contracts."""
        matrix = IntMatrix(rows)
        assert inverse_power_norm_squared(matrix, power) == Fraction(1, 4)
        assert contraction_power(matrix) == power

    def test_no_contraction(self):
        """A non-expanding matrix hits the power limit."""
        with pytest.raises(ResourceLimit):
            contraction_power(IntMatrix([[1, 0], [0, 2]]), limit=20)

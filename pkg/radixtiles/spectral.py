"""Dilation test, the exact mu > 2 criterion, singular value estimates and the search for beta."""

import logging
from dataclasses import dataclass, field
from math import gcd
from typing import List, Optional, Tuple

import numpy as np

from radixtiles import defaults
from radixtiles.digits import DigitSet, canonical_digits
from radixtiles.errors import InternalError, SingularMatrix
from radixtiles.lattice import IntMatrix, as_matrix, det_exact
from radixtiles.radix import DecisionReport, decide_radix

logger = logging.getLogger(__name__)


@dataclass
class SpectralReport:
    """Spectral facts about a radix A."""

    q: int
    is_dilation: bool
    mu_exceeds_two: bool
    mu_estimate: float
    char_poly: List[int] = field(default_factory=list)

    def to_json(self) -> dict:
        """Serialize with decimal-string integers."""
        return {
            "q": str(self.q),
            "is_dilation": self.is_dilation,
            "mu_exceeds_two": self.mu_exceeds_two,
            "mu_estimate": self.mu_estimate,
            "char_poly": [str(c) for c in self.char_poly],
        }


@dataclass
class BetaResult:
    """Least power A^beta whose canonical digit set yields a radix representation."""

    beta: int
    digit_set: DigitSet
    decision: DecisionReport
    mu_power: Optional[int] = None

    def to_json(self) -> dict:
        """Serialize with decimal-string integers."""
        return {
            "beta": self.beta,
            "mu_power": self.mu_power,
            "digit_set": self.digit_set.to_json(),
            "decision": self.decision.to_json(),
        }


def characteristic_polynomial(matrix: IntMatrix) -> List[int]:
    """Coefficients of det(lambda I - A), leading coefficient first."""
    return [int(c) for c in matrix.to_sympy().charpoly().all_coeffs()]


def _all_roots_inside_unit_disk(coefficients: List[int]) -> bool:
    """Schur-Cohn test for a real integer polynomial given lowest degree first."""
    f = list(coefficients)
    while len(f) > 1:
        a0, am = f[0], f[-1]
        if abs(a0) >= abs(am):
            return False
        reversed_f = f[::-1]
        # (a_m f - a_0 f*) / z, exact since its constant term vanishes
        f = [am * c - a0 * r for c, r in zip(f, reversed_f)][1:]
        divisor = 0
        for c in f:
            divisor = gcd(divisor, c)
        if divisor > 1:
            f = [c // divisor for c in f]
    return f[0] != 0


def is_dilation_matrix(matrix) -> bool:
    """Return True when every eigenvalue of A lies strictly outside the closed unit disk.

    The roots of p(lambda) = det(lambda I - A) are outside the disk exactly when the roots of the reversed
    polynomial lambda^n p(1/lambda) are inside it; that is decided by the Schur-Cohn recursion in integers.
    """
    matrix = as_matrix(matrix)
    poly = characteristic_polynomial(matrix)
    if poly[-1] == 0:
        return False
    # leading-first coefficients of p are the lowest-first coefficients of the reversed polynomial
    return _all_roots_inside_unit_disk(poly)


def mu_exceeds_two(matrix) -> bool:
    """Return True when the smallest singular value of A exceeds 2.

    Decided by Sylvester's criterion: every leading principal minor of A^T A - 4I is positive.
    """
    matrix = as_matrix(matrix)
    shifted = matrix.gram() - IntMatrix.scalar(matrix.n, 4)
    return all(det_exact(IntMatrix([row[:k] for row in shifted.rows[:k]])) > 0 for k in range(1, matrix.n + 1))


def smallest_singular_value_estimate(matrix) -> float:
    """Floating point estimate of the smallest singular value, from the eigenvalues of A^T A.

    Raises
    ------
    SingularMatrix
        If det A = 0.
    """
    matrix = as_matrix(matrix)
    if matrix.det == 0:
        raise SingularMatrix(str(matrix))
    gram = np.array(matrix.gram().rows, dtype=float)
    return float(np.sqrt(max(np.linalg.eigvalsh(gram).min(), 0.0)))


def spectral_report(matrix) -> SpectralReport:
    """Collect q, the dilation flag, the exact mu > 2 flag, the estimate of mu and the characteristic polynomial."""
    matrix = as_matrix(matrix)
    report = SpectralReport(
        q=abs(matrix.det),
        is_dilation=is_dilation_matrix(matrix),
        mu_exceeds_two=mu_exceeds_two(matrix),
        mu_estimate=smallest_singular_value_estimate(matrix) if matrix.det else 0.0,
        char_poly=characteristic_polynomial(matrix),
    )
    if report.mu_exceeds_two and report.mu_estimate <= 2 - defaults.SINGULAR_VALUE_TOLERANCE:
        raise InternalError(f"exact mu > 2 but estimate {report.mu_estimate} for {matrix}")
    return report


def least_mu_power(matrix, k_max: int) -> Optional[int]:
    """Return the least k <= k_max with mu(A^k) > 2."""
    matrix = as_matrix(matrix)
    for k in range(1, k_max + 1):
        if mu_exceeds_two(matrix.power(k)):
            return k
    return None


def find_beta(
    matrix,
    k_max: int = defaults.DEFAULT_K_MAX,
    point_cap: Optional[int] = None,
    progress: bool = False,
) -> Optional[BetaResult]:
    """Return the least beta <= k_max for which A^beta with its canonical digits yields a radix representation.

    The canonical digit set is recomputed for every power. When mu(A^beta) > 2 the decision is guaranteed
    to be positive; a negative decision there raises InternalError. Returns None when no beta <= k_max works.
    """
    matrix = as_matrix(matrix)
    mu_power = least_mu_power(matrix, k_max)

    for beta in range(1, k_max + 1):
        power = matrix.power(beta)
        digit_set = canonical_digits(power, box_cap=point_cap)
        decision = decide_radix(digit_set, point_cap=point_cap, progress=progress)
        logger.info(f"beta={beta}: yields={decision.yields}")

        if not decision.yields and mu_exceeds_two(power):
            raise InternalError(f"mu(A^{beta}) > 2 but the decision for {power} is negative")
        if decision.yields:
            return BetaResult(beta=beta, digit_set=digit_set, decision=decision, mu_power=mu_power)

    return None


def beta_ladder(matrix, beta: int, extra: int = 2, point_cap: Optional[int] = None) -> List[Tuple[int, bool]]:
    """Decide A^k with canonical digits for k = beta, ..., beta + extra."""
    matrix = as_matrix(matrix)
    ladder = []
    for k in range(beta, beta + extra + 1):
        digit_set = canonical_digits(matrix.power(k), box_cap=point_cap)
        ladder.append((k, decide_radix(digit_set, point_cap=point_cap).yields))
    return ladder

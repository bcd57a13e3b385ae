"""Haar-like scaling function chi_T: refinement, orthonormal translates, low-pass symbol and the MRA search."""

import logging
from dataclasses import dataclass, field
from math import sqrt
from typing import Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from radixtiles import config, defaults
from radixtiles.digits import DigitSet
from radixtiles.errors import NoBetaFound
from radixtiles.lattice import as_matrix, coset_representatives
from radixtiles.radix import DecisionReport, decide_radix
from radixtiles.sampling import (chunk_generators, map_chunks, sample_bits, sampling_settings, survival_depths,
                                 translates, uniform_dyadic)
from radixtiles.spectral import find_beta
from radixtiles.tile import MembershipCertificate, TileCover, Verdict, cover_or_none, membership, search_context

logger = logging.getLogger(__name__)

IMPLIED_CONDITIONS = "density and trivial intersection of the V_j ladder are implied by theory, not checked"


class ScalingFunction:
    """phi = chi_T for T = T(A, D), evaluated through the membership oracle."""

    normalization = 1

    def __init__(self, digit_set: DigitSet, depth: Optional[int] = None, use_cover: bool = True):
        self.digit_set = digit_set
        self.depth = config.get_sampling_defaults()["depth"] if depth is None else depth
        self.cover: Optional[TileCover] = cover_or_none(digit_set, use_cover)

    def evaluate(self, x: Sequence) -> Tuple[int, MembershipCertificate]:
        """Return (1, certificate) for a Candidate and (0, certificate) for a certified Outside."""
        certificate = membership(x, self.digit_set, self.depth, cover=self.cover)
        return int(certificate.verdict is Verdict.CANDIDATE), certificate

    def __call__(self, x: Sequence) -> int:
        return self.evaluate(x)[0]


@dataclass
class MRAReport:
    """Consolidated scaling-function checks for A^beta with its digit set."""

    beta: int
    digit_set: DigitSet
    refinement_pass_rate: float
    max_offdiagonal_inner_product: float
    verdict: bool
    decision: Optional[DecisionReport] = None
    self_inner_product: float = float("nan")
    mu_power: Optional[int] = None
    overlaps: pd.DataFrame = field(default_factory=pd.DataFrame, repr=False)

    def to_json(self) -> dict:
        """Serialize with decimal-string integers."""
        return {
            "beta": self.beta,
            "mu_power": self.mu_power,
            "digit_set": self.digit_set.to_json(),
            "yields": None if self.decision is None else self.decision.yields,
            "refinement_pass_rate": self.refinement_pass_rate,
            "max_offdiagonal_inner_product": self.max_offdiagonal_inner_product,
            "self_inner_product": self.self_inner_product,
            "verdict": self.verdict,
            "unchecked": IMPLIED_CONDITIONS,
        }


def _refinement_chunk(task) -> Tuple[int, int]:
    context, size, sequence, depth, bits = task
    q, n = context.digits.shape
    scale = 2**bits
    rng = np.random.default_rng(sequence)
    points = uniform_dyadic(rng, size, n, context.radius, bits)

    images = points @ context.transposed
    queries = [points] + [images - scale * d for d in context.digits]
    last = survival_depths(context, np.concatenate(queries), scale, depth + 2).reshape(1 + q, size)

    candidate = last >= depth
    ambiguous = (candidate & (last < depth + 2)).any(axis=0)
    holds = candidate[0].astype(int) == candidate[1:].sum(axis=0)
    return int((~ambiguous).sum()), int((holds & ~ambiguous).sum())


def refinement_check(
    phi: ScalingFunction,
    samples: Optional[int] = None,
    depth: Optional[int] = None,
    seed: Optional[int] = None,
    jobs: int = 1,
) -> float:
    """Fraction of seeded sample points x with phi(x) = sum_d phi(A x - d).

    A sample is dropped as boundary-ambiguous when one of its queries is a Candidate at ``depth`` but is
    certified Outside at ``depth + 2``. Returns nan when every sample is ambiguous.
    """
    samples, depth, seed = sampling_settings(samples, phi.depth if depth is None else depth, seed)
    digit_set = phi.digit_set
    context = search_context(digit_set, phi.cover is not None)
    bits = sample_bits(context, context.radius + 1)

    tasks = [(context, size, sequence, depth, bits) for size, sequence in chunk_generators(seed, samples)]
    results = map_chunks(_refinement_chunk, tasks, jobs)
    checked = sum(r[0] for r in results)
    passed = sum(r[1] for r in results)
    logger.info(f"refinement of {digit_set.matrix}: {passed}/{checked} of {samples} samples")
    return passed / checked if checked else float("nan")


def _overlap_chunk(task) -> np.ndarray:
    context, size, sequence, depth, bits, shifts = task
    n = context.digits.shape[1]
    scale = 2**bits
    rng = np.random.default_rng(sequence)
    points = uniform_dyadic(rng, size, n, context.radius, bits)
    states = (points[:, None, :] - scale * shifts[None, :, :]).reshape(-1, n)
    candidate = (survival_depths(context, states, scale, depth) >= depth).reshape(size, len(shifts))
    return (candidate & candidate[:, :1]).sum(axis=0)


def orthonormality_check(
    phi: ScalingFunction,
    samples: Optional[int] = None,
    depth: Optional[int] = None,
    seed: Optional[int] = None,
    jobs: int = 1,
) -> Tuple[float, pd.DataFrame]:
    """Estimate m(T ∩ (T + k)) for every translate with |k| <= 2R and return the largest off-diagonal value.

    The table has one row per translate; the row of k = 0 estimates m(T) itself.
    """
    samples, depth, seed = sampling_settings(samples, phi.depth if depth is None else depth, seed)
    digit_set = phi.digit_set
    context = search_context(digit_set, phi.cover is not None)
    n = digit_set.n
    shifts = translates(n, 2 * context.radius)
    shifts = shifts[np.argsort(np.abs(shifts).sum(axis=1), kind="stable")]
    bits = sample_bits(context, 3 * context.radius + 1)
    volume = (2 * context.radius) ** n

    tasks = [
        (context, size, sequence, depth, bits, shifts) for size, sequence in chunk_generators(seed, samples)
    ]
    counts = np.sum(map_chunks(_overlap_chunk, tasks, jobs), axis=0)
    overlaps = volume * counts / samples

    table = pd.DataFrame(
        {
            "translate": ["(" + ",".join(str(int(c)) for c in k) + ")" for k in shifts],
            "norm": [sqrt(float((k * k).sum())) for k in shifts],
            "overlap": overlaps,
        }
    )
    off_diagonal = [v for k, v in zip(shifts, overlaps) if k.any()]
    largest = float(max(off_diagonal)) if off_diagonal else 0.0
    return largest, table


def lowpass_symbol(digit_set: DigitSet, xi: Sequence[float]) -> complex:
    """m_0(xi) = q^-1 sum_d exp(-2 pi i d . xi)."""
    digits = np.array(digit_set.digits, dtype=float)
    phases = digits @ np.atleast_1d(np.asarray(xi, dtype=float))
    return complex(np.exp(-2j * np.pi * phases).mean())


def qmf_sum(digit_set: DigitSet, xi: Sequence[float]) -> float:
    """Sum of |m_0(xi + gamma)|^2 over gamma in (A^T)^-1 Z^n / Z^n, which is 1 for a complete residue system."""
    transposed = digit_set.matrix.transpose()
    inverse = np.linalg.inv(np.array(transposed.rows, dtype=float))
    xi = np.atleast_1d(np.asarray(xi, dtype=float))
    total = 0.0
    for r in coset_representatives(transposed):
        total += abs(lowpass_symbol(digit_set, xi + inverse @ np.array(r, dtype=float))) ** 2
    return total


def mra_check(
    digit_set: DigitSet,
    beta: int = 1,
    samples: Optional[int] = None,
    depth: Optional[int] = None,
    seed: Optional[int] = None,
    point_cap: Optional[int] = None,
    decision: Optional[DecisionReport] = None,
    jobs: int = 1,
) -> MRAReport:
    """Run the refinement and orthonormality checks for one digit set and consolidate the verdict."""
    decision = decision or decide_radix(digit_set, point_cap=point_cap)
    phi = ScalingFunction(digit_set, depth)
    rate = refinement_check(phi, samples, depth, seed, jobs)
    largest, table = orthonormality_check(phi, samples, depth, seed, jobs)
    self_rows = table[table["norm"] == 0]["overlap"]

    verdict = bool(
        decision.yields
        and rate >= defaults.REFINEMENT_PASS_RATE
        and largest <= defaults.MAX_OFFDIAGONAL_OVERLAP
    )
    return MRAReport(
        beta=beta,
        digit_set=digit_set,
        refinement_pass_rate=rate,
        max_offdiagonal_inner_product=largest,
        verdict=verdict,
        decision=decision,
        self_inner_product=float(self_rows.iloc[0]) if len(self_rows) else float("nan"),
        overlaps=table,
    )


def haar_mra(
    matrix,
    k_max: int = defaults.DEFAULT_K_MAX,
    samples: Optional[int] = None,
    depth: Optional[int] = None,
    seed: Optional[int] = None,
    point_cap: Optional[int] = None,
    jobs: int = 1,
) -> MRAReport:
    """Find the least beta for which A^beta yields a radix representation and check chi_T as scaling function.

    Raises
    ------
    NoBetaFound
        If no beta <= k_max works.
    """
    matrix = as_matrix(matrix)
    found = find_beta(matrix, k_max, point_cap=point_cap)
    if found is None:
        raise NoBetaFound(k_max)

    report = mra_check(
        found.digit_set,
        beta=found.beta,
        samples=samples,
        depth=depth,
        seed=seed,
        point_cap=point_cap,
        decision=found.decision,
        jobs=jobs,
    )
    report.mu_power = found.mu_power
    return report

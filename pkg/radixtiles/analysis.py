"""Analysis of problems and suites: runs the modules in order, cross-checks them and writes reports."""
import csv
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from math import isnan
from pathlib import Path
from typing import Iterable, List, Optional, Union

import numpy as np
import pandas as pd
from tqdm import tqdm

from radixtiles import config, defaults
from radixtiles.constants import TWIN_DRAGON, TWIN_DRAGON_DIGITS
from radixtiles.digits import DigitSet, canonical_digits, validate_digit_set
from radixtiles.errors import NoBetaFound, ResourceLimit, SpecValueError, _Error
from radixtiles.lattice import IntMatrix, as_matrix
from radixtiles.parser import InvalidCase, ProblemSpec
from radixtiles.radix import DecisionReport, decide_radix
from radixtiles.spectral import SpectralReport, least_mu_power, spectral_report
from radixtiles.tile import (InteriorVerdict, MultiplicityEstimate, interior_zero_test, multiplicity_estimate,
                             probe_origin, render_tile_2d)
from radixtiles.wavelet import MRAReport, haar_mra, mra_check

logger = logging.getLogger(__name__)

SUMMARY_COLUMNS = [
    "name",
    "n",
    "q",
    "digits",
    "yields",
    "mean_multiplicity",
    "interior",
    "probe",
    "refinement_pass_rate",
    "max_overlap",
    "beta",
    "mu_power",
    "mra_verdict",
    "cross_check",
    "error",
]

__all__ = ["ProblemSpec", "CaseRecord", "SuiteResult", "analyze_problem", "run_suite", "figure1", "write_report"]


@dataclass
class CaseRecord:
    """Everything computed for one problem, or the error that stopped it."""

    name: str
    matrix: Optional[IntMatrix]
    digit_source: Optional[str]
    seed: int
    samples: int
    depth: int
    digit_set: Optional[DigitSet] = None
    spectral: Optional[SpectralReport] = None
    decision: Optional[DecisionReport] = None
    multiplicity: Optional[MultiplicityEstimate] = None
    interior: Optional[InteriorVerdict] = None
    probe: Optional[InteriorVerdict] = None
    wavelet: Optional[MRAReport] = None
    mra: Optional[MRAReport] = None
    notes: List[str] = field(default_factory=list)
    violations: List[str] = field(default_factory=list)
    error: Optional[dict] = None

    @property
    def yields(self) -> Optional[bool]:
        """Radix decision, None when it was not reached."""
        return None if self.decision is None else self.decision.yields

    @property
    def beta(self) -> Optional[int]:
        """Least power found by the MRA search."""
        return None if self.mra is None else self.mra.beta

    @property
    def mean_multiplicity(self) -> Optional[float]:
        """Sampled covering multiplicity."""
        return None if self.multiplicity is None else self.multiplicity.mean_multiplicity

    @property
    def mra_verdict(self) -> Optional[bool]:
        """Verdict of the Haar-like MRA for the least working power."""
        return None if self.mra is None else self.mra.verdict

    @property
    def cross_check(self) -> Optional[bool]:
        """True when no consistency rule was violated, None for failed cases."""
        return None if self.error else not self.violations

    def to_json(self) -> dict:
        """Serialize with decimal-string integers."""

        def optional(value):
            return None if value is None else value.to_json()

        return {
            "name": self.name,
            "matrix": None if self.matrix is None else self.matrix.to_json(),
            "digit_source": self.digit_source,
            "seed": self.seed,
            "samples": self.samples,
            "depth": self.depth,
            "digit_set": optional(self.digit_set),
            "spectral": optional(self.spectral),
            "decision": optional(self.decision),
            "multiplicity": optional(self.multiplicity),
            "interior": None if self.interior is None else self.interior.value,
            "probe": None if self.probe is None else self.probe.value,
            "wavelet": optional(self.wavelet),
            "mra": optional(self.mra),
            "notes": self.notes,
            "cross_check": self.cross_check,
            "violations": self.violations,
            "error": self.error,
        }

    def summary(self) -> dict:
        """One flat row for report tables."""
        return {
            "name": self.name,
            "n": None if self.matrix is None else self.matrix.n,
            "q": None if self.matrix is None else abs(self.matrix.det),
            "digits": self.digit_source,
            "yields": self.yields,
            "mean_multiplicity": self.mean_multiplicity,
            "interior": None if self.interior is None else self.interior.value,
            "probe": None if self.probe is None else self.probe.value,
            "refinement_pass_rate": None if self.wavelet is None else self.wavelet.refinement_pass_rate,
            "max_overlap": None if self.wavelet is None else self.wavelet.max_offdiagonal_inner_product,
            "beta": self.beta,
            "mu_power": None if self.mra is None else self.mra.mu_power,
            "mra_verdict": self.mra_verdict,
            "cross_check": self.cross_check,
            "error": None if self.error is None else self.error.get("error_class"),
        }


@dataclass
class SuiteResult:
    """Case records of a suite in input order."""

    name: str
    records: List[CaseRecord]
    seed: int
    samples: int
    depth: int

    @property
    def ledger(self) -> List[dict]:
        """Cross-check violations of all cases, empty when every case is consistent."""
        return [{"case": r.name, "violation": v} for r in self.records for v in r.violations]

    @property
    def errors(self) -> List[dict]:
        """Cases stopped by an error."""
        return [{"case": r.name, **r.error} for r in self.records if r.error]

    @property
    def passed(self) -> bool:
        """True when the cross-check ledger is empty."""
        return not self.ledger

    def to_dataframe(self) -> pd.DataFrame:
        """Summary table, one row per case."""
        return pd.DataFrame([r.summary() for r in self.records], columns=SUMMARY_COLUMNS)

    def to_json(self) -> dict:
        """Serialize with decimal-string integers."""
        return {
            "name": self.name,
            "seed": self.seed,
            "samples": self.samples,
            "depth": self.depth,
            "cases": [r.to_json() for r in self.records],
            "ledger": self.ledger,
            "errors": self.errors,
        }


def _resolve(spec: ProblemSpec, samples, depth, seed, k_max, point_cap) -> dict:
    """Option precedence: problem document > call arguments > configuration."""
    settings = config.get_sampling_defaults()

    def first(*values):
        return next((v for v in values if v is not None), None)

    return {
        "samples": first(spec.samples, samples, settings["samples"]),
        "depth": first(spec.depth, depth, settings["depth"]),
        "seed": first(spec.seed, seed, settings["seed"]),
        "k_max": first(spec.k_max, k_max, defaults.DEFAULT_K_MAX),
        "point_cap": first(spec.point_cap, point_cap),
    }


def digit_set_for(spec: ProblemSpec, point_cap: Optional[int] = None) -> DigitSet:
    """Return the canonical digit set or the validated explicit one."""
    if spec.digits is None:
        return canonical_digits(spec.matrix, box_cap=point_cap)
    return validate_digit_set(spec.matrix, spec.digits)


def cross_check_violations(record: CaseRecord) -> List[str]:
    """Check the computed facts of a case against each other.

    The radix decision is positive exactly when the translates tile with multiplicity one and 0 is interior.
    A negative decision with a tiling must leave 0 on the boundary.
    """
    violations = []
    tolerance = defaults.MULTIPLICITY_TOLERANCE
    mean = record.mean_multiplicity
    tiles = mean is not None and abs(mean - 1) <= tolerance
    probed_interior = record.probe is InteriorVerdict.LIKELY_INTERIOR

    if record.yields is True and not (tiles and probed_interior):
        violations.append(f"radix representation but multiplicity={mean:.4f} and probe={record.probe.value}")
    if record.yields is False and tiles and probed_interior:
        violations.append(f"no radix representation but multiplicity={mean:.4f} and 0 probed interior")
    if record.yields is False and tiles and record.interior is not InteriorVerdict.BOUNDARY_BY_THEOREM:
        violations.append(f"tiling without radix representation gave {record.interior.value}")

    if mean is not None and mean < 1 - tolerance:
        violations.append(f"translates of T fail to cover: multiplicity={mean:.4f}")

    spectral, digit_set = record.spectral, record.digit_set
    if spectral and spectral.mu_exceeds_two and digit_set and digit_set.canonical and record.yields is False:
        violations.append("mu > 2 with canonical digits but no radix representation")

    wavelet = record.wavelet
    if wavelet is not None and mean is not None:
        orthonormal = wavelet.max_offdiagonal_inner_product <= defaults.MAX_OFFDIAGONAL_OVERLAP
        if orthonormal != tiles:
            violations.append(
                f"translate overlap {wavelet.max_offdiagonal_inner_product:.4f} disagrees with "
                f"multiplicity={mean:.4f}"
            )
        rate = wavelet.refinement_pass_rate
        if not isnan(rate) and rate < defaults.REFINEMENT_PASS_RATE:
            violations.append(f"refinement equation holds for only {rate:.4f} of the samples")

    return violations


def analyze_problem(
    spec: ProblemSpec,
    samples: Optional[int] = None,
    depth: Optional[int] = None,
    seed: Optional[int] = None,
    k_max: Optional[int] = None,
    point_cap: Optional[int] = None,
    jobs: int = 1,
    progress: bool = False,
    with_mra: bool = True,
) -> CaseRecord:
    """Run spectral report, digits, decision, multiplicity, interior test and wavelet checks for one problem.

    Raises
    ------
    SpecValueError
        If the matrix is not a dilation matrix.
    """
    options = _resolve(spec, samples, depth, seed, k_max, point_cap)
    samples, depth, seed = options["samples"], options["depth"], options["seed"]
    record = CaseRecord(
        name=spec.name,
        matrix=spec.matrix,
        digit_source=spec.digit_source,
        seed=seed,
        samples=samples,
        depth=depth,
    )

    record.spectral = spectral_report(spec.matrix)
    if not record.spectral.is_dilation:
        raise SpecValueError("$.matrix", f"{spec.matrix} is not a dilation matrix")

    digit_set = record.digit_set = digit_set_for(spec, options["point_cap"])

    try:
        record.decision = decide_radix(digit_set, point_cap=options["point_cap"], progress=progress)
    except ResourceLimit as exc:
        logger.warning(f"{spec.name or spec.matrix}: decision skipped, {exc.message}")
        record.notes.append(exc.message)

    record.multiplicity = multiplicity_estimate(digit_set, samples=samples, depth=depth, seed=seed, jobs=jobs)
    if record.decision is not None:
        record.interior = interior_zero_test(
            digit_set, depth, decision=record.decision, multiplicity=record.multiplicity
        )
    record.probe = probe_origin(digit_set, depth)
    if record.interior is None:
        record.interior = record.probe

    if record.decision is not None:
        record.wavelet = mra_check(
            digit_set, 1, samples=samples, depth=depth, seed=seed, decision=record.decision, jobs=jobs
        )

    if with_mra:
        if digit_set.canonical and record.yields:
            record.mra = record.wavelet
            record.mra.mu_power = least_mu_power(spec.matrix, options["k_max"])
        else:
            try:
                record.mra = haar_mra(
                    spec.matrix,
                    options["k_max"],
                    samples=samples,
                    depth=depth,
                    seed=seed,
                    point_cap=options["point_cap"],
                    jobs=jobs,
                )
            except (NoBetaFound, ResourceLimit) as exc:
                logger.warning(f"{spec.name or spec.matrix}: {exc.message}")
                record.notes.append(exc.message)

    record.violations = cross_check_violations(record)
    for violation in record.violations:
        logger.error(f"{spec.name or spec.matrix}: {violation}")
    return record


def _failed_record(spec: ProblemSpec, error: dict) -> CaseRecord:
    settings = config.get_sampling_defaults()
    return CaseRecord(
        name=spec.name,
        matrix=spec.matrix,
        digit_source=spec.digit_source,
        seed=settings["seed"] if spec.seed is None else spec.seed,
        samples=settings["samples"] if spec.samples is None else spec.samples,
        depth=settings["depth"] if spec.depth is None else spec.depth,
        error=error,
    )


def _invalid_record(case: InvalidCase) -> CaseRecord:
    settings = config.get_sampling_defaults()
    return CaseRecord(
        name=case.name,
        matrix=None,
        digit_source=None,
        seed=settings["seed"],
        samples=settings["samples"],
        depth=settings["depth"],
        error=case.error,
    )


def _analyze_case(task) -> CaseRecord:
    """Worker of :func:`run_suite`; errors become part of the record."""
    spec, options = task
    if isinstance(spec, InvalidCase):
        return _invalid_record(spec)
    try:
        return analyze_problem(spec, **options)
    except _Error as exc:
        logger.error(f"{spec.name or spec.matrix}: {exc.to_string()}")
        return _failed_record(spec, exc.to_dict())
    except Exception as exc:
        logger.exception(f"{spec.name or spec.matrix}: unexpected failure")
        return _failed_record(spec, {"error_class": type(exc).__name__, "hint": str(exc)})


def run_suite(
    cases: Iterable[Union[ProblemSpec, InvalidCase]],
    name: str = "",
    samples: Optional[int] = None,
    depth: Optional[int] = None,
    seed: Optional[int] = None,
    k_max: Optional[int] = None,
    point_cap: Optional[int] = None,
    jobs: int = 1,
    progress: bool = False,
) -> SuiteResult:
    """Analyze every case, up to ``jobs`` at a time, and return the records in input order.

    A case that fails, or that could not be read in the first place, is recorded with its error and the run
    continues.
    """
    cases = list(cases)
    settings = config.get_sampling_defaults()
    options = {"samples": samples, "depth": depth, "seed": seed, "k_max": k_max, "point_cap": point_cap}
    tasks = [(spec, options) for spec in cases]

    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as executor:
            records = list(tqdm(executor.map(_analyze_case, tasks), total=len(tasks), disable=not progress))
    else:
        records = [_analyze_case(task) for task in tqdm(tasks, desc="cases", disable=not progress)]

    result = SuiteResult(
        name=name,
        records=records,
        seed=settings["seed"] if seed is None else seed,
        samples=settings["samples"] if samples is None else samples,
        depth=settings["depth"] if depth is None else depth,
    )
    logger.info(f"suite {name!r}: {len(records)} cases, {len(result.ledger)} violations, {len(result.errors)} errors")
    return result


def figure1(
    out: Optional[str] = None,
    depth: int = defaults.FIGURE1_DEPTH,
    size=defaults.FIGURE1_SIZE,
    matrix=TWIN_DRAGON,
    digits=TWIN_DRAGON_DIGITS,
) -> np.ndarray:
    """Rasterize the tile of ``matrix`` (the twin dragon by default) on the window fixed by its cover.

    The raster is written to ``out`` as PGM or PNG by suffix.
    """
    digit_set = validate_digit_set(as_matrix(matrix), digits)
    width, height = size
    return render_tile_2d(digit_set, depth, width=width, height=height, out=out)


def write_report(reports: Union[Iterable[str], str], df: pd.DataFrame) -> List[str]:
    """Write a report table to every given path, the format chosen by suffix.

    Parameters
    ----------
    reports: Iterable[str] or str
        File paths, or one string of comma separated paths. Acceptable formats are CSV, TSV, TXT, JSON, HTML
        and MD.
    df: pandas.DataFrame
        Report table.

    Returns
    -------
    list
        The paths written.
    """
    if isinstance(reports, str):
        reports = reports.split(",")

    written = []
    for report in reports:
        suffix = Path(report).suffix.lower()
        try:
            if suffix == ".csv":
                df.to_csv(report, index=False)

            elif suffix == ".tsv":
                df.to_csv(report, sep="\t", index=False)

            elif suffix == ".json":
                df.to_json(report, orient="records", indent=2)

            elif suffix == ".txt":
                with open(report, "w") as fd:
                    fd.write(df.to_string(index=False))

            elif suffix == ".html":
                df.to_html(report, index=False)

            elif suffix == ".md":
                header = pd.DataFrame([["---"] * len(df.columns)], columns=df.columns)
                table = pd.concat([header, df.astype(str).replace(r"\|", "&#124;", regex=True)])
                table.to_csv(report, sep="|", index=False, quoting=csv.QUOTE_NONE, escapechar="\\")

            else:
                logger.warning(f"Unknown report format {report}, skipped")
                continue

            written.append(report)

        except PermissionError:
            logger.error(f"Report {report} is still open and cannot be overwritten.")

    return written

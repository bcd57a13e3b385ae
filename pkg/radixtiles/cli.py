"""Command line interface to radixtiles."""

import functools
import logging
import sys
from typing import Optional

import click

from radixtiles import defaults
from radixtiles.analysis import analyze_problem, digit_set_for, figure1, run_suite, write_report
from radixtiles.config import set_configuration
from radixtiles.constants import EXIT_CROSS_CHECK, EXIT_INPUT_ERROR, WORKED_EXAMPLES_SUITE
from radixtiles.database import list_runs, store_suite_result
from radixtiles.digits import F
from radixtiles.errors import SpecValueError, _Error
from radixtiles.parser import (ProblemSpec, parse_digits, parse_document, parse_matrix, parse_point,
                               parse_problem, parse_suite, parse_vector, read_document)
from radixtiles.radix import decide_radix, expand, reconstruct
from radixtiles.spectral import beta_ladder, find_beta, spectral_report
from radixtiles.tile import budget_depth, measure_estimate, membership, multiplicity_estimate, render_tile_2d
from radixtiles.tools import dumps
from radixtiles.wavelet import ScalingFunction, haar_mra, lowpass_symbol, mra_check, qmf_sum

logger = logging.getLogger(__name__)


def _setup_logging(verbose: bool) -> None:
    package_logger = logging.getLogger("radixtiles")
    package_logger.setLevel(logging.DEBUG)
    for handler in (defaults.logHandler, defaults.ch):
        if handler not in package_logger.handlers:
            package_logger.addHandler(handler)
    defaults.ch.setLevel(logging.INFO if verbose else logging.WARNING)


def handle_errors(command):
    """Print radixtiles errors as one diagnostic line and exit with the input-error code."""

    @functools.wraps(command)
    def wrapper(*args, **kwargs):
        try:
            return command(*args, **kwargs)
        except _Error as exc:
            logger.debug(f"{command.__name__} failed", exc_info=True)
            click.echo(exc.to_string(), err=True)
            sys.exit(EXIT_INPUT_ERROR)

    return wrapper


def _emit(data, out: Optional[str] = None) -> None:
    text = dumps(data)
    if out:
        with open(out, "w") as fd:
            fd.write(text + "\n")
        logger.info(f"report written to {out}")
    else:
        click.echo(text)


def _problem(
    problem_file: Optional[str] = None,
    matrix: Optional[str] = None,
    digits: Optional[str] = None,
    canonical: bool = False,
) -> ProblemSpec:
    """Build a problem from a document file or from the --matrix/--digits/--canonical flags."""
    if problem_file:
        if matrix or digits:
            raise SpecValueError("--matrix", "give a problem file or --matrix/--digits, not both")
        return parse_problem(read_document(problem_file))

    if not matrix:
        raise SpecValueError("--matrix", "a matrix or a problem file is required")
    if digits and canonical:
        raise SpecValueError("--digits", "--digits and --canonical exclude each other")

    radix = parse_matrix(parse_document(matrix, "--matrix"), "--matrix")
    explicit = parse_digits(parse_document(digits, "--digits"), radix.n, "--digits") if digits else None
    return ProblemSpec(matrix=radix, digits=explicit)


def problem_options(command):
    """Options selecting the radix and its digit set."""
    options = [
        click.option("-m", "--matrix", default=None, help='integer matrix as JSON, e.g. "[[1,1],[-1,1]]"'),
        click.option("-d", "--digits", default=None, help='digit vectors as JSON, e.g. "[[0,0],[1,0]]"'),
        click.option("--canonical", is_flag=True, default=False, help="use the canonical digits A(F) ∩ Z^n"),
    ]
    for option in reversed(options):
        command = option(command)
    return command


def sampling_options(command):
    """Options of the seeded Monte-Carlo estimators."""
    options = [
        click.option("--depth", type=int, default=None, help=f"search depth [{defaults.DEFAULT_DEPTH}]"),
        click.option("--samples", type=int, default=None, help=f"sample points [{defaults.DEFAULT_SAMPLES}]"),
        click.option("--seed", type=int, default=None, help=f"random seed [{defaults.DEFAULT_SEED}]"),
        click.option("-j", "--jobs", type=int, default=1, help="worker processes"),
    ]
    for option in reversed(options):
        command = option(command)
    return command


@click.group(help="Radix representations, self-affine tiles and Haar-like wavelets on {}".format(sys.executable))
@click.version_option()
@click.option("-v", "--verbose", is_flag=True, default=False, help="log progress to the console")
def main(verbose: bool):
    """Entry method."""
    _setup_logging(verbose)


@main.command()
@click.argument("problem_file", required=False)
@problem_options
@sampling_options
@click.option("--kmax", type=int, default=None, help=f"largest power of the beta search [{defaults.DEFAULT_K_MAX}]")
@click.option("--cap", type=int, default=None, help="lattice-point cap of the decision")
@click.option("--no-mra", "no_mra", is_flag=True, default=False, help="skip the beta search")
@click.option("-o", "--out", default=None, help="write the JSON report to a file")
@click.option("--progress", is_flag=True, default=False, help="show progress bars")
@handle_errors
def analyze(problem_file, matrix, digits, canonical, depth, samples, seed, jobs, kmax, cap, no_mra, out, progress):
    """Run every analysis on one problem; exit 2 when the results contradict each other."""
    spec = _problem(problem_file, matrix, digits, canonical)
    record = analyze_problem(
        spec,
        samples=samples,
        depth=depth,
        seed=seed,
        k_max=kmax,
        point_cap=cap,
        jobs=jobs,
        progress=progress,
        with_mra=not no_mra,
    )
    _emit(record, out)
    if record.cross_check is False:
        sys.exit(EXIT_CROSS_CHECK)


@main.command()
@problem_options
@click.option("--cap", type=int, default=None, help="cap on the enumeration box")
@handle_errors
def digits(matrix, digits, canonical, cap):
    """Print the validated (or canonical) digit set with the Smith form of A."""
    spec = _problem(None, matrix, digits, canonical)
    digit_set = digit_set_for(spec, cap)
    snf = digit_set.snf
    _emit(
        {
            **digit_set.to_json(),
            "q": str(digit_set.q),
            "invariant_factors": [str(s) for s in snf.invariant_factors],
            "smith": {"U": snf.U.to_json(), "S": snf.S.to_json(), "V": snf.V.to_json()},
            "in_fundamental_domain": [F.contains_image(digit_set.matrix, d) for d in digit_set],
        }
    )


@main.command("expand")
@click.argument("vector")
@problem_options
@click.option("--max-steps", "max_steps", type=int, default=None, help="digit-step budget")
@handle_errors
def expand_vector(vector, matrix, digits, canonical, max_steps):
    """Expand an integer VECTOR (JSON) in base A."""
    spec = _problem(None, matrix, digits, canonical)
    digit_set = digit_set_for(spec)
    x = parse_vector(parse_document(vector, "VECTOR"), spec.n, "VECTOR")
    expansion = expand(x, digit_set, max_steps)
    data = expansion.to_json()
    if expansion.terminated:
        data["reconstructed"] = reconstruct(expansion, digit_set.matrix).to_json()
    _emit(data)


@main.command()
@problem_options
@click.option("--cap", type=int, default=None, help="lattice-point cap")
@click.option("-o", "--out", default=None, help="write the JSON report to a file")
@click.option("--progress", is_flag=True, default=False, help="show a progress bar")
@handle_errors
def decide(matrix, digits, canonical, cap, out, progress):
    """Decide whether A yields a radix representation with the digit set."""
    spec = _problem(None, matrix, digits, canonical)
    report = decide_radix(digit_set_for(spec, cap), point_cap=cap, progress=progress)
    _emit(report, out)


@main.command()
@click.option("-m", "--matrix", required=True, help="integer matrix as JSON")
@click.option("--kmax", type=int, default=defaults.DEFAULT_K_MAX, help="largest power tried")
@click.option("--cap", type=int, default=None, help="lattice-point cap")
@click.option("--ladder", type=int, default=0, help="also decide the next LADDER powers above beta")
@handle_errors
def beta(matrix, kmax, cap, ladder):
    """Find the least beta for which A^beta yields a radix representation with canonical digits."""
    spec = _problem(None, matrix)
    found = find_beta(spec.matrix, kmax, point_cap=cap)
    data = {"spectral": spectral_report(spec.matrix), "k_max": kmax, "result": found}
    if found is not None and ladder:
        data["ladder"] = [{"k": k, "yields": y} for k, y in beta_ladder(spec.matrix, found.beta, ladder, cap)]
    _emit(data)


@main.group()
def tile():
    """Self-affine tile T(A, D)."""
    pass


@tile.command()
@problem_options
@click.option("--depth", type=int, default=None, help="number of digits of the point cloud")
@click.option("--size", type=(int, int), default=defaults.FIGURE1_SIZE, help="width and height in pixels")
@click.option("-o", "--out", required=True, help="raster file (.pgm or .png)")
@handle_errors
def render(matrix, digits, canonical, depth, size, out):
    """Rasterize the depth-k approximation of a planar tile."""
    spec = _problem(None, matrix, digits, canonical)
    digit_set = digit_set_for(spec)
    width, height = size
    depth = budget_depth(digit_set) if depth is None else depth
    raster = render_tile_2d(digit_set, depth, width=width, height=height, out=out)
    _emit({"out": out, "filled_fraction": float((raster == 0).mean())})


@tile.command()
@problem_options
@sampling_options
@click.option("--no-cover", "no_cover", is_flag=True, default=False, help="prune with the bounding ball only")
@handle_errors
def multiplicity(matrix, digits, canonical, depth, samples, seed, jobs, no_cover):
    """Estimate how many lattice translates of T cover a point."""
    spec = _problem(None, matrix, digits, canonical)
    estimate = multiplicity_estimate(
        digit_set_for(spec), samples=samples, depth=depth, seed=seed, jobs=jobs, use_cover=not no_cover
    )
    _emit(estimate)


@tile.command()
@problem_options
@sampling_options
@handle_errors
def measure(matrix, digits, canonical, depth, samples, seed, jobs):
    """Estimate the Lebesgue measure of T."""
    spec = _problem(None, matrix, digits, canonical)
    _emit({"measure": measure_estimate(digit_set_for(spec), samples=samples, depth=depth, seed=seed, jobs=jobs)})


@tile.command()
@click.argument("point")
@problem_options
@click.option("--depth", type=int, default=None, help="search depth")
@handle_errors
def contains(point, matrix, digits, canonical, depth):
    """Query membership of a rational POINT (JSON, entries may be "p/q") in T."""
    spec = _problem(None, matrix, digits, canonical)
    x = parse_point(parse_document(point, "POINT"), spec.n, "POINT")
    _emit(membership(x, digit_set_for(spec), defaults.DEFAULT_DEPTH if depth is None else depth))


@main.group()
def wavelet():
    """Haar-like scaling function chi_T."""
    pass


@wavelet.command()
@problem_options
@sampling_options
@click.option("--cap", type=int, default=None, help="lattice-point cap")
@handle_errors
def check(matrix, digits, canonical, depth, samples, seed, jobs, cap):
    """Check refinement and orthonormal translates of chi_T for the given digit set."""
    spec = _problem(None, matrix, digits, canonical)
    report = mra_check(digit_set_for(spec), 1, samples=samples, depth=depth, seed=seed, point_cap=cap, jobs=jobs)
    _emit({**report.to_json(), "overlaps": report.overlaps.to_dict(orient="records")})


@wavelet.command()
@click.option("-m", "--matrix", required=True, help="integer matrix as JSON")
@sampling_options
@click.option("--kmax", type=int, default=defaults.DEFAULT_K_MAX, help="largest power tried")
@click.option("--cap", type=int, default=None, help="lattice-point cap")
@handle_errors
def mra(matrix, depth, samples, seed, jobs, kmax, cap):
    """Find the least working power of A and check its Haar-like MRA."""
    spec = _problem(None, matrix)
    report = haar_mra(spec.matrix, kmax, samples=samples, depth=depth, seed=seed, point_cap=cap, jobs=jobs)
    _emit(report)


@wavelet.command()
@click.argument("xi")
@problem_options
@handle_errors
def symbol(xi, matrix, digits, canonical):
    """Evaluate the low-pass symbol m_0 at a frequency XI (JSON) and its quadrature-mirror sum."""
    spec = _problem(None, matrix, digits, canonical)
    digit_set = digit_set_for(spec)
    frequency = [float(c) for c in parse_point(parse_document(xi, "XI"), spec.n, "XI")]
    value = lowpass_symbol(digit_set, frequency)
    _emit(
        {
            "m0": {"real": value.real, "imag": value.imag},
            "abs2": abs(value) ** 2,
            "qmf_sum": qmf_sum(digit_set, frequency),
        }
    )


@wavelet.command()
@click.argument("point")
@problem_options
@click.option("--depth", type=int, default=None, help="search depth")
@handle_errors
def phi(point, matrix, digits, canonical, depth):
    """Evaluate chi_T at a rational POINT."""
    spec = _problem(None, matrix, digits, canonical)
    x = parse_point(parse_document(point, "POINT"), spec.n, "POINT")
    value, certificate = ScalingFunction(digit_set_for(spec), depth).evaluate(x)
    _emit({"value": value, "certificate": certificate})


@main.command("figure1")
@click.option("-o", "--out", default="figure1.pgm", help="raster file (.pgm or .png) [figure1.pgm]")
@click.option("--depth", type=int, default=defaults.FIGURE1_DEPTH, help=f"digits [{defaults.FIGURE1_DEPTH}]")
@click.option("--size", type=(int, int), default=defaults.FIGURE1_SIZE, help="width and height in pixels")
@click.option("-m", "--matrix", default=None, help="planar matrix instead of the twin dragon")
@click.option("-d", "--digits", default=None, help="digits for --matrix")
@handle_errors
def render_figure1(out, depth, size, matrix, digits):
    """Render the twin dragon tile."""
    options = {}
    if matrix:
        spec = _problem(None, matrix, digits, not digits)
        options = {"matrix": spec.matrix, "digits": digit_set_for(spec).digits}
    raster = figure1(out, depth=depth, size=size, **options)
    _emit({"out": out, "depth": depth, "filled_pixels": int((raster == 0).sum())})


@main.command()
@click.argument("suite_file", required=False, default=WORKED_EXAMPLES_SUITE)
@sampling_options
@click.option("--kmax", type=int, default=None, help="largest power tried by the beta search")
@click.option("--cap", type=int, default=None, help="lattice-point cap")
@click.option("-o", "--out", default=None, help="write the JSON result to a file")
@click.option(
    "-r",
    "--reports",
    default=None,
    help="path(s) to summary report file(s) separated by comma with suffix (.md, .txt, .csv, .tsv, .json, .html)",
)
@click.option("-s", "--store", is_flag=True, default=False, help="store the run in the results database")
@click.option("--progress", is_flag=True, default=False, help="show a progress bar")
@handle_errors
def suite(suite_file, depth, samples, seed, jobs, kmax, cap, out, reports, store, progress):
    """Analyze every case of SUITE_FILE (the bundled examples by default); exit 2 on any contradiction."""
    name, cases = parse_suite(read_document(suite_file))
    result = run_suite(
        cases,
        name=name,
        samples=samples,
        depth=depth,
        seed=seed,
        k_max=kmax,
        point_cap=cap,
        jobs=jobs,
        progress=progress,
    )
    _emit(result, out)
    if reports:
        write_report(reports, result.to_dataframe())
    if store:
        store_suite_result(result)
    if not result.passed:
        sys.exit(EXIT_CROSS_CHECK)


@main.command()
@click.option("--cap", type=int, default=None, help="lattice-point cap")
@click.option("--dk-cap", "dk_cap", type=int, default=None, help="cap on q^k digit strings")
@click.option("--max-steps", "max_steps", type=int, default=None, help="digit-step budget of an expansion")
@click.option("--samples", type=int, default=None, help="default sample count")
@click.option("--depth", type=int, default=None, help="default search depth")
@click.option("--seed", type=int, default=None, help="default seed")
@click.option("--sqlalchemy_connection_string", default=None, help="results database, any SQLAlchemy URL")
def settings(cap, dk_cap, max_steps, samples, depth, seed, sqlalchemy_connection_string):
    """Write defaults to the configuration file and print it."""
    configuration = set_configuration(
        point_cap=cap,
        dk_cap=dk_cap,
        max_steps=max_steps,
        samples=samples,
        depth=depth,
        seed=seed,
        sqlalchemy_connection_string=sqlalchemy_connection_string,
    )
    _emit(configuration)


@main.command()
def history():
    """List stored suite runs."""
    runs = list_runs()
    click.echo(runs.to_string(index=False) if len(runs) else "no stored runs")


if __name__ == "__main__":
    main()

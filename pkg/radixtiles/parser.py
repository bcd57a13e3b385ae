"""This module parses problem and suite documents."""

import codecs
import logging
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Any, List, Optional, Tuple, Union

from lark import Lark
from lark.exceptions import UnexpectedInput

from radixtiles.constants import CANONICAL, EXPLICIT, GRAMMAR_PROBLEM_PATH, GRAMMAR_START
from radixtiles.errors import DimensionError, SpecSyntaxError, SpecValueError
from radixtiles.lattice import IntMatrix, IntVector
from radixtiles.transformers import _ProblemTransformer

logger = logging.getLogger(__name__)

DECIMAL_INTEGER = re.compile(r"^\s*[+-]?\d+\s*$")
RATIONAL = re.compile(r"^\s*([+-]?\d+)\s*/\s*(\d+)\s*$")

# option keys of a problem document and their ProblemSpec attribute
OPTION_KEYS = {"depth": "depth", "samples": "samples", "seed": "seed", "kmax": "k_max", "cap": "point_cap"}


def load_grammar(grammar_path: str) -> str:
    """Return eBNF grammar in lark style.

    Parameters
    ----------
    grammar_path : str
        path to eBNF grammar in lark style.

    Returns
    -------
    string
        eBNF grammar in lark style.
    """
    logger.debug("load grammar {}".format(grammar_path))
    with codecs.open(grammar_path, "r", encoding="utf-8") as fd_grammar:
        return fd_grammar.read()


@lru_cache(maxsize=1)
def _get_parser() -> Lark:
    grammar = load_grammar(GRAMMAR_PROBLEM_PATH)
    return Lark(grammar, start=GRAMMAR_START, parser="lalr", transformer=_ProblemTransformer())


@dataclass
class ProblemSpec:
    """One analysis problem: the radix, its digit source and run options.

    ``digits`` is None for the canonical digit set A(F) ∩ Z^n.
    """

    matrix: IntMatrix
    digits: Optional[List[IntVector]] = None
    name: str = ""
    depth: Optional[int] = None
    samples: Optional[int] = None
    seed: Optional[int] = None
    k_max: Optional[int] = None
    point_cap: Optional[int] = None
    extra: dict = field(default_factory=dict)

    @property
    def digit_source(self) -> str:
        """Return 'canonical' or 'explicit'."""
        return CANONICAL if self.digits is None else EXPLICIT

    @property
    def n(self) -> int:
        """Dimension of the problem."""
        return self.matrix.n

    def to_json(self) -> dict:
        """Serialize to the document format read by :func:`parse_problem`."""
        data = {"name": self.name, "matrix": self.matrix.to_json()}
        data["digits"] = CANONICAL if self.digits is None else [d.to_json() for d in self.digits]
        for key, attribute in OPTION_KEYS.items():
            value = getattr(self, attribute)
            if value is not None:
                data[key] = str(value) if attribute == "point_cap" else value
        for key, value in self.extra.items():
            data.setdefault(key, value)
        return data


@dataclass
class InvalidCase:
    """A suite case that could not be read; it is reported with its error instead of being analyzed."""

    name: str
    path: str
    error: dict


def parse_document(text: str, source: Optional[str] = None) -> Any:
    """Parse a JSON-dialect document into Python values.

    Raises
    ------
    SpecSyntaxError
        With line and column of the first syntax error.
    """
    try:
        return _get_parser().parse(text)
    except UnexpectedInput as exc:
        logger.info(f"Syntax error in {source or '<input>'}: {exc}")
        raise SpecSyntaxError(exc, text, source) from exc


def read_document(path: str) -> Any:
    """Read and parse a document from a file."""
    with codecs.open(path, "r", encoding="utf-8") as fd:
        return parse_document(fd.read(), source=path)


def parse_integer(value: Any, path: str = "$") -> int:
    """Interpret an integer given bare or as decimal string."""
    if isinstance(value, bool):
        raise SpecValueError(path, "expected an integer, got a boolean")
    if isinstance(value, int):
        return value
    if isinstance(value, Fraction) and value.denominator == 1:
        return int(value)
    if isinstance(value, str) and DECIMAL_INTEGER.match(value):
        return int(value)
    raise SpecValueError(path, f"expected an integer, got {value!r}")


def parse_rational(value: Any, path: str = "$") -> Fraction:
    """Interpret an integer, decimal or ``"p/q"`` value as an exact fraction."""
    if isinstance(value, bool):
        raise SpecValueError(path, "expected a number, got a boolean")
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, str):
        found = RATIONAL.match(value)
        if found:
            numerator, denominator = int(found.group(1)), int(found.group(2))
            if denominator == 0:
                raise SpecValueError(path, "zero denominator")
            return Fraction(numerator, denominator)
        try:
            return Fraction(value.strip())
        except ValueError:
            pass
    raise SpecValueError(path, f"expected a rational number, got {value!r}")


def parse_matrix(value: Any, path: str = "$.matrix") -> IntMatrix:
    """Interpret nested lists as a square integer matrix.

    A bare integer or a one-element list is read as a 1 x 1 matrix.
    """
    if not isinstance(value, list):
        return IntMatrix([[parse_integer(value, path)]])
    if value and not any(isinstance(row, list) for row in value):
        if len(value) != 1:
            raise SpecValueError(path, "a flat list is only accepted for 1 x 1 matrices")
        return IntMatrix([[parse_integer(value[0], f"{path}[0]")]])
    if not value or not all(isinstance(row, list) for row in value):
        raise SpecValueError(path, "expected a non-empty list of rows")

    rows = [[parse_integer(x, f"{path}[{i}][{j}]") for j, x in enumerate(row)] for i, row in enumerate(value)]
    try:
        return IntMatrix(rows)
    except DimensionError as exc:
        raise SpecValueError(path, exc.message) from exc


def parse_vector(value: Any, n: int, path: str = "$") -> IntVector:
    """Interpret a list (or a bare integer when n = 1) as an integer vector of dimension n."""
    entries = value if isinstance(value, list) else [value]
    if len(entries) != n:
        raise SpecValueError(path, f"expected {n} coordinates, got {len(entries)}")
    return IntVector(parse_integer(x, f"{path}[{i}]") for i, x in enumerate(entries))


def parse_point(value: Any, n: int, path: str = "$") -> Tuple[Fraction, ...]:
    """Interpret a list (or a bare number when n = 1) as a rational point of dimension n."""
    entries = value if isinstance(value, list) else [value]
    if len(entries) != n:
        raise SpecValueError(path, f"expected {n} coordinates, got {len(entries)}")
    return tuple(parse_rational(x, f"{path}[{i}]") for i, x in enumerate(entries))


def parse_digits(value: Any, n: int, path: str = "$.digits") -> Optional[List[IntVector]]:
    """Interpret a digit list; ``"canonical"`` or null selects the canonical digit set."""
    if value is None or value == CANONICAL:
        return None
    if not isinstance(value, list):
        raise SpecValueError(path, f'expected a list of digits or "{CANONICAL}"')
    return [parse_vector(d, n, f"{path}[{i}]") for i, d in enumerate(value)]


def parse_problem(value: Any, path: str = "$") -> ProblemSpec:
    """Build a ProblemSpec from a parsed problem document."""
    if not isinstance(value, dict):
        raise SpecValueError(path, "a problem must be an object")
    if "matrix" not in value:
        raise SpecValueError(path, 'missing "matrix"')

    matrix = parse_matrix(value["matrix"], f"{path}.matrix")
    spec = ProblemSpec(
        matrix=matrix,
        digits=parse_digits(value.get("digits"), matrix.n, f"{path}.digits"),
        name=str(value.get("name", "")),
    )
    for key, attribute in OPTION_KEYS.items():
        if value.get(key) is not None:
            number = parse_integer(value[key], f"{path}.{key}")
            if number < 0 or (number == 0 and key != "seed"):
                raise SpecValueError(f"{path}.{key}", "must be positive")
            setattr(spec, attribute, number)

    known = {"name", "matrix", "digits", *OPTION_KEYS}
    spec.extra = {k: v for k, v in value.items() if k not in known}
    return spec


def parse_problem_text(text: str, source: Optional[str] = None) -> ProblemSpec:
    """Parse a problem document given as text."""
    return parse_problem(parse_document(text, source))


def parse_suite(value: Any) -> Tuple[str, List[Union[ProblemSpec, InvalidCase]]]:
    """Build the (name, cases) of a suite document.

    A suite is either a list of problems or an object with ``"cases"`` (and optionally ``"name"``). A case that
    cannot be read becomes an :class:`InvalidCase`, so one bad entry does not stop the others.

    Raises
    ------
    SpecValueError
        If the document is not a suite at all.
    """
    if isinstance(value, list):
        name, cases = "", value
    elif isinstance(value, dict) and isinstance(value.get("cases"), list):
        name, cases = str(value.get("name", "")), value["cases"]
    else:
        raise SpecValueError("$", 'a suite is a list of problems or an object with "cases"')

    parsed: List[Union[ProblemSpec, InvalidCase]] = []
    for i, case in enumerate(cases):
        path = f"$.cases[{i}]"
        try:
            parsed.append(parse_problem(case, path))
        except SpecValueError as exc:
            case_name = str(case.get("name", "")) if isinstance(case, dict) else ""
            logger.warning(f"suite case {case_name or path} skipped: {exc.to_string()}")
            parsed.append(InvalidCase(name=case_name or path, path=path, error=exc.to_dict()))
    return name, parsed

"""Error class definitions."""
import re
from collections import OrderedDict
from typing import Optional

from lark.exceptions import UnexpectedCharacters, UnexpectedEOF, UnexpectedInput, UnexpectedToken

TEMPLATE = "{error_class}\tentry:{entry}\tline:{line_number}\tcolumn:{column}\thint:{hint}"


class _Error(Exception):
    """Base class for all errors."""

    def __init__(self, message: str = ""):
        super(_Error, self).__init__(message)
        self.class_name = self.__class__.__name__
        self.message = message
        self.value_dict = OrderedDict(
            [
                ("error_class", self.class_name),
                ("entry", None),
                ("line_number", None),
                ("column", None),
                ("hint", None),
            ]
        )

    def to_dict(self) -> dict:
        """Format the properties of error into a dictionary."""
        return {"error_class": self.class_name, "hint": self.message}

    def to_string(self) -> str:
        """Format the output to a string."""
        self.value_dict.update(self.to_dict())
        return TEMPLATE.format(**self.value_dict)

    def __str__(self):
        return self.to_string()


class SingularMatrix(_Error):
    """Matrix with determinant zero where an invertible one is required."""

    def __init__(self, matrix_repr: str):
        """Initialize error class.

        :param matrix_repr: String representation of the offending matrix.
        """
        super(SingularMatrix, self).__init__(f"det = 0 for {matrix_repr}")
        self.entry = matrix_repr

    def to_dict(self) -> dict:
        """Format the properties of error into a dictionary."""
        return {"error_class": self.class_name, "entry": self.entry, "hint": "matrix must be invertible"}


class DimensionError(_Error):
    """Dimension mismatch or unsupported dimension."""

    def __init__(self, expected, found, hint: str = ""):
        """Initialize error class.

        :param expected: Expected dimension (or description).
        :param found: Dimension found.
        :param hint: Sentence to give the user in the error report.
        """
        super(DimensionError, self).__init__(f"expected dimension {expected}, found {found}. {hint}".strip())
        self.expected = expected
        self.found = found
        self.hint = hint

    def to_dict(self) -> dict:
        """Format the properties of error into a dictionary."""
        return {
            "error_class": self.class_name,
            "entry": f"expected={self.expected} found={self.found}",
            "hint": self.hint,
        }


class WrongCount(_Error):
    """Digit set does not have q = |det A| members."""

    def __init__(self, expected: int, found: int):
        """Initialize error class.

        :param expected: q = |det A|.
        :param found: Number of digits given.
        """
        super(WrongCount, self).__init__(f"digit set needs {expected} digits, got {found}")
        self.expected = expected
        self.found = found

    def to_dict(self) -> dict:
        """Format the properties of error into a dictionary."""
        return {
            "error_class": self.class_name,
            "entry": str(self.found),
            "hint": f"a complete residue system has |det A| = {self.expected} members",
        }


class DuplicateCoset(_Error):
    """Two digits lie in the same coset of Z^n / A(Z^n)."""

    def __init__(self, first, second):
        """Initialize error class.

        :param first: First digit of the offending pair.
        :param second: Second digit of the offending pair.
        """
        super(DuplicateCoset, self).__init__(f"digits {first} and {second} are congruent modulo A(Z^n)")
        self.pair = (first, second)

    def to_dict(self) -> dict:
        """Format the properties of error into a dictionary."""
        return {
            "error_class": self.class_name,
            "entry": f"{self.pair[0]} ~ {self.pair[1]}",
            "hint": "digits must be pairwise incongruent modulo A(Z^n)",
        }


class MissingZero(_Error):
    """The zero vector is not a digit."""

    def __init__(self):
        """Initialize error class."""
        super(MissingZero, self).__init__("digit set must contain the zero vector")


class InternalError(_Error):
    """A result violates an invariant that holds mathematically."""


class StepBudgetExceeded(_Error):
    """Expansion neither terminated nor cycled within the step budget."""

    def __init__(self, start, max_steps: int):
        """Initialize error class.

        :param start: Vector whose expansion was attempted.
        :param max_steps: Step budget that was exhausted.
        """
        super(StepBudgetExceeded, self).__init__(f"no termination or cycle within {max_steps} steps")
        self.entry = str(start)
        self.max_steps = max_steps

    def to_dict(self) -> dict:
        """Format the properties of error into a dictionary."""
        return {
            "error_class": self.class_name,
            "entry": self.entry,
            "hint": f"raise max_steps above {self.max_steps}",
        }


class NotTerminated(_Error):
    """Reconstruction requested for an expansion that ended in a cycle."""


class ResourceLimit(_Error):
    """A computation would exceed a configured cap."""

    def __init__(self, what: str, count: int, cap: int):
        """Initialize error class.

        :param what: Name of the capped quantity.
        :param count: Size that would be required.
        :param cap: Configured cap.
        """
        super(ResourceLimit, self).__init__(f"{what}: {count} exceeds cap {cap}")
        self.what = what
        self.count = count
        self.cap = cap

    def to_dict(self) -> dict:
        """Format the properties of error into a dictionary."""
        return {
            "error_class": self.class_name,
            "entry": f"{self.what}={self.count}",
            "hint": f"cap is {self.cap}; raise it with --cap or RADIXTILES_CAP",
        }


class NoBetaFound(_Error):
    """No power A^beta with beta <= k_max yields a radix representation."""

    def __init__(self, k_max: int):
        """Initialize error class.

        :param k_max: Largest power tried.
        """
        super(NoBetaFound, self).__init__(f"no beta <= {k_max} yields a radix representation")
        self.k_max = k_max


class SpecValueError(_Error):
    """Well-formed input with an invalid value."""

    def __init__(self, path: str, hint: str):
        """Initialize error class.

        :param path: JSON path of the offending value.
        :param hint: Sentence to give the user in the error report.
        """
        super(SpecValueError, self).__init__(f"{path}: {hint}")
        self.path = path
        self.hint = hint

    def to_dict(self) -> dict:
        """Format the properties of error into a dictionary."""
        return {"error_class": self.class_name, "entry": self.path, "hint": self.hint}


class SpecSyntaxError(_Error):
    """Syntax error in a problem or suite document."""

    def __init__(self, exception: UnexpectedInput, text: str, source: Optional[str] = None):
        """Initialize error class.

        :param exception: Lark exception raised while parsing.
        :param text: Parsed document.
        :param source: File name of the document, if any.
        """
        self.exception = exception
        self.text = text
        self.source = source
        self.line_number = getattr(exception, "line", None)
        self.column = getattr(exception, "column", None)
        super(SpecSyntaxError, self).__init__(f"{source or '<input>'}:{self.line_number}:{self.column}")

    def to_dict(self) -> dict:
        """Format the properties of error into a dictionary."""
        value_dict = {"line_number": self.line_number, "column": self.column}

        if isinstance(self.exception, UnexpectedEOF) or self.line_number in (None, -1):
            value_dict.update({"error_class": self.class_name + "_unexpected_eof", "hint": "document ended early"})
            return value_dict

        line = self.text.splitlines()[self.line_number - 1] if self.text else ""
        hint = "%s >>>>>> %s" % (line[: self.column - 1], line[self.column - 1 :])
        value_dict["hint"] = re.sub("[\n\r]", "", hint).strip()

        if isinstance(self.exception, UnexpectedCharacters):
            value_dict.update(
                {
                    "error_class": self.class_name + "_unexpected_input",
                    "entry": line[self.column - 1 : self.column + 4],
                }
            )

        elif isinstance(self.exception, UnexpectedToken):
            value_dict.update(
                {
                    "error_class": self.class_name + "_unexpected_token",
                    "entry": re.sub("[\n\r]", "", str(self.exception.token)),
                }
            )

        else:
            value_dict["error_class"] = self.class_name

        return value_dict

"""Transformer module for the transformation of lark trees."""

import json
import logging
import re
from fractions import Fraction

from lark import Transformer

logger = logging.getLogger(__name__)

INTEGER = re.compile(r"^[+-]?\d+$")


class _ProblemTransformer(Transformer):
    """Turn a parsed problem document into plain Python values.

    Integers become ``int``, other numbers ``Fraction`` (exact decimal value), strings stay strings; the
    interpretation of decimal-integer and ``"p/q"`` strings is left to :mod:`radixtiles.parser`, which
    knows where a number is expected.
    """

    def start(self, children):
        return children[0]

    def number(self, children):
        text = str(children[0])
        if INTEGER.match(text):
            return int(text)
        return Fraction(text)

    def string(self, children):
        return json.loads(children[0])

    def true(self, _):
        return True

    def false(self, _):
        return False

    def null(self, _):
        return None

    def array(self, children):
        return list(children)

    def pair(self, children):
        key, value = children
        return key, value

    def object(self, children):
        return dict(children)

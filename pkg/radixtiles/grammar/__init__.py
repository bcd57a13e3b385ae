"""Lark grammars used by the parser."""

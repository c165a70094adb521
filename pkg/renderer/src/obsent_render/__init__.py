"""Figure templates for obsent CSV outputs.

This package draws; it does not compute.  Every number that appears in a
figure (curves, reference lines, offsets) is read from the input CSV's
table or its ``# key=value`` metadata preamble.
"""

from .errors import HashMismatchError, RenderError, SchemaError
from .render import FigureSpec, render
from .table import Table, read_table
from .templates import TEMPLATES, template_ids

__all__ = [
    "FigureSpec",
    "HashMismatchError",
    "RenderError",
    "SchemaError",
    "TEMPLATES",
    "Table",
    "read_table",
    "render",
    "template_ids",
]

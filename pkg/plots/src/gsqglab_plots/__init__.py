"""Figure generation from gsqglab CSV artifacts.

This package never computes simulation quantities; it only reads the
documented CSV schemas (``# schema=gsqglab.*.v1`` comment line plus a
header row) and renders static figures from them.
"""

from .render import CsvFormatError, FigureSpec, SchemaError, render

__all__ = ["CsvFormatError", "FigureSpec", "SchemaError", "render"]

__version__ = "0.1.0"

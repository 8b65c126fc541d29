"""Figure rendering for deltagauss CSV output files."""

from .render import COLUMN_CONTRACTS, FigureJob, SchemaError, build_figure, render

__version__ = "0.1.0"

__all__ = ["COLUMN_CONTRACTS", "FigureJob", "SchemaError", "build_figure", "render"]

"""Regenerate publication-style figures from simulation CSV output."""

from .reader import (RATES_COLUMNS, SWEEP_COLUMNS, TRAJECTORY_COLUMNS,
                     SchemaError, read_csv, read_group)
from .render import FIGURE_IDS, FigureSpec, render

__version__ = "0.1.0"

__all__ = ["RATES_COLUMNS", "SWEEP_COLUMNS", "TRAJECTORY_COLUMNS", "SchemaError",
           "read_csv", "read_group", "FIGURE_IDS", "FigureSpec", "render",
           "__version__"]

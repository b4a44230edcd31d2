"""expsumplots: batch figures from expsumlab experiment CSVs."""

__version__ = "0.1.0"

from .render import (
    FIT_TOLERANCE,
    FitMismatch,
    PLOT_KINDS,
    PlotSpec,
    RenderResult,
    SchemaMismatch,
    least_squares_slope,
    render,
)

__all__ = [
    "FIT_TOLERANCE", "FitMismatch", "PLOT_KINDS", "PlotSpec", "RenderResult",
    "SchemaMismatch", "least_squares_slope", "render", "__version__",
]

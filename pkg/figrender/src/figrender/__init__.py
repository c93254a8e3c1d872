"""Figure rendering for the phonent sweep CSV datasets."""
from .figures import (
    AXIS_COLUMN,
    CurveMap,
    FigureSpec,
    RenderInputError,
    build_figure,
    build_specs,
    load_table,
    render,
)

__version__ = "0.1.0"

__all__ = [
    "AXIS_COLUMN",
    "CurveMap",
    "FigureSpec",
    "RenderInputError",
    "build_figure",
    "build_specs",
    "load_table",
    "render",
    "__version__",
]

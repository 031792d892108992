"""SVG figure rendering for the fractransport solver's CSV artifacts."""

from .render import FigureSpec, MissingColumnError, render

__all__ = ["FigureSpec", "MissingColumnError", "render"]

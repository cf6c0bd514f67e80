"""Figure rendering for poisson-growth experiment artifacts."""

from .jobs import KINDS, FigureError, FigureJob
from .render import render

__all__ = ["KINDS", "FigureError", "FigureJob", "render"]

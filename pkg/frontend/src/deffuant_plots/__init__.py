"""Publication-style figures from opinion-dynamics CSV outputs.

Reads only the engine's documented file formats (`bin_center,density`
distribution CSVs and `bin_center,d=...` bifurcation CSVs); there is no
in-memory coupling to the engine.  Rendering is deterministic: identical
inputs and options produce identical image bytes.
"""

__version__ = "0.1.0"

from .io import FormatError, read_bifurcation_csv, read_distribution_csv
from .render import FigureSpec, plot_bifurcation, plot_distribution

__all__ = [
    "FigureSpec",
    "FormatError",
    "plot_bifurcation",
    "plot_distribution",
    "read_bifurcation_csv",
    "read_distribution_csv",
]

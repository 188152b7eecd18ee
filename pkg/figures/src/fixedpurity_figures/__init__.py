"""Figure regeneration for fixedpurity CLI outputs.

Pure views: the scripts parse the CLI's CSV/JSON artifacts and plot them,
with no random numbers and no numerics beyond axis transforms.  Rendering is
deterministic, so regenerating a figure from identical inputs is byte-stable.
"""

__version__ = "0.1.0"

from .figures import FIGURES, FigureSpec, make_figure
from .style import load_style

__all__ = ["FIGURES", "FigureSpec", "make_figure", "load_style"]

"""Figure rendering for torusperc experiment CSV outputs."""

from .figures import FAMILIES, render

__version__ = "0.1.0"

__all__ = ["FAMILIES", "render", "__version__"]

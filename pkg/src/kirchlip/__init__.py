"""Exact LIP calculus on Kirch-open subsets of the natural numbers.

Submodules:
    exactmath  integers, rationals, polynomials, resultants, Smith form
    kirch      progression set algebra and cover shapes
    lipcalc    divided differences, circuits, product-sums
    splitter   f = g - h across an intersection
    cech       window Čech cohomology and obstruction functionals
    cexgen     a locally LIP function that is not LIP
    cli        command-line front end
"""
from .errors import InputError, InternalContradiction, KirchError, ResourceError

__version__ = "0.1.0"

__all__ = ["InputError", "InternalContradiction", "KirchError", "ResourceError", "__version__"]

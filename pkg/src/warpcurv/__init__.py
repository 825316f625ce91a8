"""Curvature conditions and warped-product verification for coordinate metrics.

Subpackages are imported explicitly (``from warpcurv import expr`` etc.);
nothing heavy happens at package import time.
"""

__version__ = "0.1.0"

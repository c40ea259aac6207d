"""Geodesic flow on genus-2 surfaces without focal points.

Points are (x, y) tuples in the Poincare disk, unit tangents (x, y, angle),
boundary points angles in [0, 2pi).
"""

from ._core import *  # noqa: F401,F403
from ._core import __doc__  # noqa: F401

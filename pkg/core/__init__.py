"""
CCC4: co-circular central configurations of four bodies
License: GPL-3.0
"""

from .geometry import DistanceVector, MassVector, ScalarReport
from .chart import PCoords, VWPoint

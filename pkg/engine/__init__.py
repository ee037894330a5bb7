"""
CCC4: co-circular central configurations of four bodies
License: GPL-3.0
"""

from .solver import SolveRecord, SolverOptions, minimize_U

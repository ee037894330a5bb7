"""
CCC4: co-circular central configurations of four bodies
License: GPL-3.0
"""

from .ccc4_shell import Ccc4Shell, main

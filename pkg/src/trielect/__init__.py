"""Leader election for particle systems on the triangular grid.

Local edge-orientation certificates, a two-line self-stabilising repair
rule, fair and adversarial schedulers, and exhaustive small-instance
checkers for the structural facts the construction rests on.
"""

from .lattice import Cell, Dir, PortMap, ALL_PORTMAPS, IDENTITY_PORTMAP
from .support import Support, BoundaryClass, check_angle_census, boundary_witness
from .config import Configuration, LinkState, EdgeOrientation, deserialize
from .rules import is_valid, sinks, rule_report
from .algorithm import activation_step, is_activable, ActivationEffect
from .scheduler import run, detect_final, RandomSequential, RoundRobin, Scripted

__version__ = "0.1.0"

__all__ = [
    "ALL_PORTMAPS",
    "ActivationEffect",
    "BoundaryClass",
    "Cell",
    "Configuration",
    "Dir",
    "EdgeOrientation",
    "IDENTITY_PORTMAP",
    "LinkState",
    "PortMap",
    "RandomSequential",
    "RoundRobin",
    "Scripted",
    "Support",
    "activation_step",
    "check_angle_census",
    "deserialize",
    "detect_final",
    "is_activable",
    "is_valid",
    "boundary_witness",
    "rule_report",
    "run",
    "sinks",
    "__version__",
]

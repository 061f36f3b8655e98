"""Heat rectification in boundary-driven quantum Ising chains.

Two Ohmic bosonic baths flip the end spins of a σᶻ-diagonal chain. The
package solves the resulting population dynamics cycle by cycle, computes
heat currents and rectification, and cross-checks the results against
closed forms (three and four sites) and a dense Lindblad oracle.
"""

from .analytic import asymptotic_probe, cramer_n3, cramer_n4, g_coefficient
from .bath import BathSpec, Side, a_coefficient, occupation, rate
from .exceptions import (
    ConfigError,
    ContractError,
    DegeneracyError,
    DimensionError,
    NotApplicableError,
    PolicyError,
    PresetError,
    RankAmbiguityError,
    SizeError,
    SpinDiodeError,
    StabilityError,
)
from .graph import build_graph, cycle_energy_mismatch, decompose_cycles, flip
from .model import ChainSpec, EigenSystem, SpinConfig, eigensystem, energy, preset
from .steadystate import (
    EqualCycleMass,
    InteriorDistribution,
    PaperEqualCurrent,
    SteadyState,
    assemble,
    residual,
    solve_cycle,
)
from .transport import (
    TransportReport,
    current_law_check,
    heat_current_left,
    heat_current_right,
    perfect_condition,
    rectify,
)

__version__ = "0.1.0"

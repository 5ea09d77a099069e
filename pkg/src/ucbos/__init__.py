"""Ground states of long-range Ising models via resummed unit-cell optimisation."""

from .cells import UnitCell, canonicalize, cell_sites, enumerate_cells, make_cell, supercell
from .driver import GroundStateReport, StaircasePoint, ground_state_at_field, sweep_staircase
from .lattice import (
    Lattice,
    ShortRangeBond,
    make_kagome,
    make_shastry_sutherland,
    make_square,
    make_triangular,
    site_position,
)
from .model import IsingProblem, build_problem, energy_per_cell, energy_per_site, magnetization
from .resummation import CouplingMatrix, fold_short_range_bonds, lattice_sum, resum_couplings
from .samplers import (
    SampleSet,
    SamplerConfig,
    solve_exhaustive,
    solve_greedy,
    solve_simulated_annealing,
)

__version__ = "0.1.0"

"""Primer set selection for multiplex PCR under amplification-length constraints."""

from .greedy import (
    SOLVERS,
    CoverState,
    InfeasibleInstanceError,
    brute_force_optimal,
    gain,
    potential,
    solve_gfix,
    solve_gpot,
    solve_gvar,
    verify_cover,
)
from .instances import extract_from_genome, generate_random_instance, parse_instance, write_instance
from .report import SolutionReport, Witness, write_report
from .seq import (
    CandidateSet,
    Instance,
    Primer,
    TargetPair,
    build_index,
    degeneracy,
    enumerate_candidates,
    hybridization_position,
    reverse_complement,
)

__version__ = "0.1.0"

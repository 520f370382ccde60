"""Discrete potential theory on finite graphs.

Edge calculus, integral identities, fundamental solutions, Perron's method
for the Dirichlet problem and balayage for the Poisson problem with measure
data, all checkable against a direct linear solve.
"""

from .balayage import (
    Schedule,
    SchedulePolicy,
    SweepState,
    init_sweep,
    run_balayage,
    sweep_report,
    sweep_step,
)
from .calculus import (
    NORMALIZED,
    UNNORMALIZED,
    LaplacianVariant,
    boundary_flux,
    check_divergence_theorem,
    check_integration_by_parts,
    divergence,
    edge_average,
    edge_dot,
    gradient,
    integrate_wrt_measure,
    laplacian,
    volume_integral,
)
from .generators import path_graph, star_graph, triangle
from .graph import BoundaryData, Domain, Graph, boundary_of, build_graph, validate_domain
from .oracle import DirichletProblem, dirichlet_solve
from .perron import classify_harmonicity, extremum_trace, harmonic_lift, perron_solve
from .potential import fundamental_solution, green_matrix, newtonian_potential, symmetry_check

__version__ = "0.1.0"

"""Exact solution and decoherence factor of the time-dependent generalized Cini model.

The fixed-boson-number sector of the model is a spin-j driven by a
time-dependent su(2) Hamiltonian.  It is solved with a Lewis-Riesenfeld
invariant, and every closed-form result can be checked against direct
propagation of the Schroedinger equation.
"""

__version__ = "0.1.0"

from .errors import CiniError, ConfigError, NonFiniteError, SingularityError
from .su2 import SU2Rep, build_rep, commutator, su2_displacement, wigner_d_diag
from .model import (
    ComplexSchedule,
    Constant,
    Cosine,
    DetectorParams,
    LevelParams,
    Linear,
    SphericalParams,
    SubspaceLabel,
    Sum,
    eval_schedule,
    hamiltonian_matrix,
    spherical_from_physical,
)
from .invariant import (
    AuxiliaryTrajectory,
    TimeGrid,
    beta_from_aux,
    build_V,
    check_invariant_ode,
    check_transformed_invariant,
    integrate_auxiliary,
    invariant_matrix,
    transformed_h_coefficient,
)
from .phases import (
    BranchEvolution,
    PhaseTrace,
    assemble_solution,
    coefficients_from_initial,
    cyclic_solid_angle,
    dynamical_phase,
    evolve_branch,
    geometric_phase,
)
from .oracle import direct_propagate, fidelity, unitary_propagator
from .decoherence import (
    DecoherenceTrace,
    branch_overlap,
    classical_limit_scan,
    decoherence_closed,
    decoherence_direct,
    reduced_coherence,
    special_case_factor,
)
from .config import RunConfig, parse_config

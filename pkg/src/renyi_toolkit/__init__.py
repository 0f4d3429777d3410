"""Quantum Renyi divergences, pretty good measures, and their verifiers.

Numerics for the Petz and minimal (sandwiched) Renyi divergence families,
conditional Renyi entropies with closed-form and numerical marginal
optimizers, pretty good fidelity / measurement / singlet fraction with
their optimality conditions, the three supporting semidefinite programs,
and a randomized property-testing harness that exercises every
inequality, equality condition and duality relation at small Hilbert
space dimensions.
"""

from .divergence import (
    AltExponents,
    Family,
    check_alt,
    check_reverse_alt,
    check_sandwich,
    d_alpha,
    equality_condition,
    q_alpha,
)
from .entropy import (
    OptimizerResult,
    check_coherent_classical_bound,
    check_entropy_chain,
    check_minlike_bounds,
    dephase_cq,
    duality_check,
    equality_condition_up,
    h_down,
    h_up,
    minimal_q_directional_derivative,
    minimal_q_fd_derivative,
    petz_up_optimizer,
)
from .harness import CHECKS, SuiteConfig, SuiteReport, full_config, run_suite
from .matcore import (
    ConvergenceError,
    DimensionError,
    EigenDecomposition,
    HermitianOperator,
    MatrixError,
    commutator_norm,
    eigh,
    eigh_jacobi,
    mat_pow,
    partial_trace,
    schatten_norm,
    tensor,
)
from .pretty_good import (
    Povm,
    check_fidelity_bounds,
    check_guessing_bounds,
    fidelity,
    pgm,
    pgm_guess_probability,
    pgm_optimality,
    pretty_good_fidelity,
    singlet_fractions,
    singlet_optimality,
    trace_distance,
)
from .sdpsolve import (
    SdpShape,
    SdpSolution,
    solve_fidelity_primal,
    solve_guessing,
    solve_min_entropy,
    verify_fidelity_certificate,
)
from .states import (
    DensityOperator,
    Ensemble,
    PureState,
    canonical_purification,
    classically_coherent_purification,
    cq_state,
    gram_matrix,
    maximally_entangled,
    maximally_mixed,
    random_density,
    shift_unitary,
    substream,
)

__version__ = "0.1.0"

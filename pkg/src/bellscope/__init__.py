"""Bell tests for multimode continuous-variable states under homodyne
detection with binned outcomes: Mermin-Klyshko operators, sign and root
binning, optimal-state eigenproblems, erasure noise, and the conditional
generation of a three-mode candidate state.
"""

from .mk import (
    MKExpansion,
    bell_factor,
    classical_bound_exhaustive,
    expand_mk,
    quantum_bound,
)
from .numerics import (
    IntegrationError,
    LogSignedReal,
    hermite_eval,
    integrate_1d,
    integrate_segments,
    max_eigenpair,
    reciprocal_gamma,
    rgamma_log,
)
from .signbin import (
    AngleSettings,
    FockCorrelatedState,
    bell_factor_sign,
    bell_matrix,
    chsh_angles,
    converged_optimum,
    correlator_E,
    default_optimizer_angles,
    g_rs,
    ghz_like_angles,
    hermite_halfline_overlap,
    optimize_state,
    outcome_probability,
)
from .rootbin import (
    ParityFunctionPair,
    RootBinningSpec,
    bell_factor_root,
    binned_product_correlator,
    binned_product_probabilities,
    cat_pair,
    cat_state_terms,
    class_correlator,
    direct_bell_psi3,
    max_theta_bell,
    maximal_violation_curve,
    optimal_phase,
    overlaps_VW,
    psi3_bell_report,
    psi3_prime_terms,
)
from .erasure import (
    erased_term_correlator,
    noisy_bell_direct,
    noisy_bell_factor,
    p_max_ghz,
)
from .catprep import (
    CoherentSuperposition,
    bs_transform,
    coherent_overlap,
    fidelity,
    generation_pipeline,
    homodyne_project,
    psi3_prime_state,
    scs_state,
    tensor,
)

__version__ = "0.1.0"

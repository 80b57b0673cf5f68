"""Construction and analysis of homogeneous two-phase solutions in the plane."""

from ._core import (
    AngularProfile,
    MatchingResult,
    NodalSet,
    NodallabError,
    PlanarField,
    ProblemParams,
    D,
    H,
    N,
    Phi,
    W,
    __version__,
    admissible_orders,
    beta_k_gaps,
    beta_k_sequence,
    beta_q,
    blow_up,
    construct_uk,
    derived_exponents,
    dyadic_ladder,
    energy_drift,
    estimate_order,
    extract_nodal_set,
    gamma_q,
    h1_norm,
    hamiltonian_cauchy,
    k_bar,
    load,
    monotonicity_scan,
    profile_zero_structure,
    psi,
    save,
    sigma_k_sequence,
    suite_names,
    transition_exponent,
    verify,
)

__all__ = [name for name in dir() if not name.startswith("_")] + ["__version__"]

"""Mixing coefficients and rho-mixing certificates for copula-based Markov chains."""

from .copula import (
    AxiomReport,
    CdfCopula,
    Clayton,
    Copula,
    Frechet,
    HoeffdingM,
    HoeffdingW,
    Independence,
    Mardia,
    Mixture,
    check_axioms,
    mix,
    parse_copula,
)
from .transition import TransitionMatrix, coarsen, discretize, matrix_power
from .metrics import (
    MixingReport,
    beta_n,
    copula_report,
    envelope_bound,
    extract_constant_minorant,
    inequality_audit,
    mixing_report,
    phi_n,
    rho_n,
    theorem2_bound,
)
from .chain import PathSample, empirical_corr, sample_next, sample_path
from .mh import (
    MarginalModel,
    MhModel,
    acceptance,
    build_model,
    certify,
    certify_general,
    certify_independent,
    mh_copula_ac_density,
    mh_rejection_mass,
    mh_sample,
    mh_transition_matrix,
)

__version__ = "0.1.0"

//! The entropic measure (Dirichlet process) on quantile functions.
//!
//! The measure is handled only through its finite-dimensional marginals,
//! which are Dirichlet laws on the ordered simplex, and through the step
//! quantiles those marginals induce. Exact set probabilities reduce to
//! regularized incomplete beta functions.

mod ricci;
mod sampling;
mod special;

pub use ricci::{
    decade_grid, falsify_ricci, log_concavity_ratio, prob_as, prob_cst, ricci_threshold,
    RicciReport, RicciRow,
};
pub use sampling::{
    count_exceedances, mc_set_probability, mc_set_probability_parallel, refinement_coupling,
    sample_marginal, sample_quantile, DirichletSpec, MarginalSampler, McEstimate, RngState,
    CHUNK_DRAWS,
};
pub use special::{beta_integral, ln_beta, reg_incomplete_beta, reg_incomplete_beta_upper};

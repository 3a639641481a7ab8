//! Verifiers for the probabilistic and geometric bounds: Γ-moments, the
//! subdivision branching process, chain statistics, speed functionals and
//! eigenvector perturbation.

pub mod chains;
pub mod gw;
pub mod ldev;
pub mod perturbation;
pub mod speed;
pub mod stats;

pub use chains::{simulate_t_chain, simulate_tx_prime_chain, t_gamma_moment, t_mean, tx_prime_success};
pub use gw::{galton_watson_size, gw_gamma_bound, gw_gamma_max, gw_gamma_moment, gw_mean, gw_total_mean, GwSample};
pub use ldev::{
    log_gamma_moment, moment_check, overlap_for_success, random_count_exponents, random_count_sample,
    verify_ldev_composition, verify_ldev_random_count, LdevReport, MomentCheck,
    RandomCountReport, RandomCountSample,
};
pub use perturbation::{
    angle_to_subspace, eig_angle_bound, operator_norm, projected_rate, random_angle_instance, random_hermitian, rate_bound,
};
pub use speed::{bit_cost_bound, bit_cost_enumerated, bit_cost_rough, rho_theta, sigma_theta, SpeedProfile};

//! Learning from noisy labels with interpolating networks.

pub mod curves;
pub mod data;
pub mod experiment;
pub mod prob;
pub mod search;

pub use curves::{
    binary_entropy, clean_to_noisy, high_quantization_bound, noisy_to_clean, phi,
    phi_tangent_bound, tempered_curves, CurvePoint,
};
pub use data::{
    empirical_errors, empirical_risk, population_risk_exact, population_risk_mc, sample_dataset,
    DataDistribution, Dataset, Hypothesis, Noise,
};
pub use experiment::{run_experiment, to_csv, ExperimentConfig, ExperimentRow};
pub use prob::{consistency_mc, eps_tr_exact, inconsistency_prob_exact};
pub use search::{
    min_size_interpolator, posterior_enumerate, posterior_sample, FunctionPrior, PosteriorSummary,
    SearchBudget,
};

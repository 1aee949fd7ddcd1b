//! Closed-form parameters of the random-graph models and their seeded samplers.

mod incidence;
mod params;
mod poisson;
mod sample;

pub use incidence::{artifact_triangle_columns, IncidenceMatrix};
pub use params::{
    epsilon, p_hat, p_k, q2, r_k, thresholds, DerivedParams, ModelParams, Thresholds,
};
pub use poisson::PoissonSampler;
pub use sample::{
    large_set_inclusion_probability, large_set_union_bound, sample_clique_cover,
    sample_clique_cover_with, sample_gnmp, sample_gnmp_classed, sample_gnmp_full,
    sample_gnmp_with, sample_gnp, sample_gnp_with, sample_poissonized, sample_poissonized_with,
    CliqueCoverSample, CliqueStream, ColumnRecord, GnmpSample, FULL_MATRIX_MAX_COLUMNS,
    MAX_EXPECTED_SETS,
};

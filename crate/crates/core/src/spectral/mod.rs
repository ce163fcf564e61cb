//! Optimality criteria of pose-graphs from their spectra.

pub mod criteria;
pub mod fim;
pub mod indices;
pub mod report;
pub mod weights;

pub use criteria::{
    a_opt, d_opt, e_opt, e_tilde_opt, t_opt, utility_p, utility_p_over, CriteriaValues, Criterion,
    Spectrum,
};
pub use fim::{assemble_fim, criteria_from_fim, BlockInfoMatrix, DENSE_FIM_LIMIT};
pub use indices::{
    algebraic_connectivity, graph_health_metrics, kirchhoff_index, spanning_tree_count,
    spanning_tree_count_exact, HealthMetrics,
};
pub use report::{
    criteria_from_laplacian, verify_bound, BoundCheck, BoundViolation, OptimalityReport, FullDimForm,
    Source,
};
pub use weights::{edge_weight, edge_weights, weighted_laplacian, WeightScheme};

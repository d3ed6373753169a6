//! Evaluation: F1 with foreign keys counted as their referenced primary keys,
//! dataset statistics, and the ablation and scalability runners.

mod bench;
mod canon;
mod f1;

pub use bench::{
    run_ablation, run_scalability, stats_row, AblationRow, Dataset, ExperimentGrid, ScalabilityRow, StatsRow,
    ABLATION_HEADER, SCALABILITY_HEADER, STATS_HEADER,
};
pub use canon::canonicalize_ref;
pub use f1::{evaluate_f1, Counts, EvalReport};

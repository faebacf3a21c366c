//! Functional-equation residual checks, the singular-locus guard and the
//! grid runner.

mod checks;
mod grid;
mod locus;
mod report;

pub use checks::{
    check_cm, check_kmt, check_lemma_34_1, check_thm_12, check_thm_21, check_thm_22, guard_singular, reflect,
    sigma_psi_sum, Hyperplane, KmtInput, CONTINUATION_N,
};
pub use grid::{
    evaluate_point, run_grid, summarize, AxisRange, Grid, GridAxis, GridRecord, Identity, KmtSetup, Outcome,
    RunConfig, Summary,
};
pub use locus::{singular_locus, HyperplaneWitness, SingularLocusSpec, DEFAULT_BAND};
pub use report::{FEReport, TruncationRecord, Verdict};

//! Seeded perturbation families and sweeps.

mod generate;
mod record;
mod sweeps;

pub use generate::{generate, Family, GeneratorSpec, DELTA_MAX, SWEEP_MAX_DIM};
pub use record::{
    csv_header, read_csv, run_record, write_csv, ExperimentRecord, RecordDetail, RecordFailure,
};
pub use sweeps::{
    fit_records, lemma_summary, run_lemma_suite, run_records, run_santalo_stability,
    run_square_order, run_theorem_sweep, shell_radii, theorem_summary, Check, DeltaAggregate,
    EmpiricalConstants, Exponent, ShellStat, SweepConfig, SweepKind, SweepSummary, EXPONENT_CEIL,
    EXPONENT_FLOOR, SHELLS, TREND_FACTOR, VANISH_TOL,
};

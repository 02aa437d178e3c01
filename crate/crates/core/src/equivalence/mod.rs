//! Gauge action on symbols and the equivalence decision procedures.

mod cohomology;
mod decide;
mod gauge;

pub use cohomology::{
    classify_form, cohomology_compare, construct_phase, CohomologyResult, Lattice, Phase,
    CLOSED_TOL, PERIOD_TOL,
};
pub use decide::{
    decide_equivalence, lift_report, transition_monodromy, ChargeComparison, CompareOptions,
    Decision, EquivalenceReport, GaugeSample, LiftReport, MetricComparison, Mode,
    PotentialComparison, Residuals, Stage, StageResult, Tolerances, TransitionSummary,
};
pub use gauge::{
    apply_gauge, gauge_jet, group_defect, volume_form_reduction, volume_gauge, GaugeMap, Group,
    ReduceSide, VolumeForm,
};

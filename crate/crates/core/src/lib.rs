//! Exact coupling analysis for the two-party, two-setting spin scenario.
//!
//! Every outcome recorded under a context `(i, j)` is its own random
//! variable (`A_ij`, `B_ij`). The library imposes joint distributions on the
//! eight double-indexed variables, decides which constraints on the
//! unobservable cross-context pairs are compatible with a scenario, and
//! contrasts that with the conditionalization constructions, which are
//! compatible with everything.
//!
//! Probabilities are exact rationals end to end. Floating point only
//! enters through the transcendental inequality families (arcsin, `√2`)
//! and through measurement directions.

pub mod campaign;
pub mod conditionalization;
pub mod connections;
pub mod coupling;
pub mod distributions;
pub mod inequalities;
pub mod lp;
pub mod quantum;
pub mod rational;

pub use conditionalization::{
    avis_even_partition, avis_zero_padded, simple_conditional_coupling, uninformativeness_report,
    uninformativeness_report_pairs, verify_conditionals, ConditionDistribution,
    ConditionalCoupling, ConstructionKind, PartitionWeights,
};
pub use connections::{
    rationalize, satisfies_s1_prime, satisfies_s2_prime, test_equivalent, test_fitting,
    test_forcing, ConnectionVector, Role, SetRole,
};
pub use coupling::{
    connection_range, coupling_exists, identity_coupling_exists, independent_coupling,
    pair_coupling_range, Connection, Coupling, CouplingVerdict, Pattern, Variable,
};
pub use distributions::{
    check_no_signaling, correlation, scenario_from_correlations, Context, PairDistribution,
    Scenario,
};
pub use inequalities::{
    bell_ch_fine, classify, quantum_arcsin, tsirelson, Classification, CorrelationVector, Family,
    FamilyReport,
};
pub use lp::{optimize, solve_feasibility, Direction, LinearProgram, LpOutcome, LpStatus};
pub use quantum::{realizability_check, singlet_correlations, SettingVector};
pub use rational::Rational;

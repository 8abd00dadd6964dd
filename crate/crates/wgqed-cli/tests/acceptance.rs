//! One PASS/FAIL line per acceptance criterion. Tolerances are pinned here rather
//! than taken from the library so that loosening them there cannot go unnoticed.

use wgqed::oracle::report::{parse_scenarios, DEFAULT_SCENARIOS};
use wgqed_cli::verify::{self, CriterionResult};

#[test]
fn acceptance_criteria() {
    let scenarios = parse_scenarios(DEFAULT_SCENARIOS).unwrap();
    let results: Vec<CriterionResult> = vec![
        verify::unitarity(1e-12),
        verify::transmission_zeros(1e-12),
        verify::pole_algebra(0.0, 0.05),
        verify::quench(1e-20, 1e-6),
        verify::closed_form_consistency(1e-12),
        verify::branch_invariance(1e-12),
        verify::beats(0.03),
        verify::statistics(),
        verify::linewidth(0.15),
        verify::oracle_single(&scenarios, 0.02),
        verify::oracle_two(&scenarios, 0.10),
        verify::determinism(),
    ];
    for r in &results {
        println!("{}", r.line());
    }
    let failed: Vec<u32> = results.iter().filter(|r| !r.pass()).map(|r| r.id).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}

#[test]
fn library_tolerances_match_pinned_values() {
    use verify::tol::*;
    assert_eq!(
        [UNITARITY, ZEROS, POLES_EXACT, SUBRADIANT_REL, QUENCH_MAX, UNEQUAL_MIN, CONSISTENCY, BRANCH, BEAT_REL, LINEWIDTH_REL, ORACLE_SINGLE, ORACLE_TWO],
        [1e-12, 1e-12, 0.0, 0.05, 1e-20, 1e-6, 1e-12, 1e-12, 0.03, 0.15, 0.02, 0.10]
    );
}

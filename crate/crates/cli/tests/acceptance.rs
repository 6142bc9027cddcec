//! Acceptance suite: one test per built-in check (the library's check
//! registry), plus the `verify` subcommand end to end. Each test prints a
//! single pass/fail line for its criterion.

use queue_poa_core::verify;

fn check(id: usize) {
    let r = verify::run_criterion(id);
    let status = if r.passed { "PASS" } else { "FAIL" };
    println!(
        "criterion {:>2} ({}): {status} [{:.2}s]",
        r.id, r.name, r.seconds
    );
    assert!(r.passed, "criterion {} ({}) failed: {}", r.id, r.name, r.detail);
}

#[test]
fn acceptance_01_power_law_tail_ratios() {
    check(1);
}

#[test]
fn acceptance_02_vanishing_threshold_efficiency() {
    check(2);
}

#[test]
fn acceptance_03_bounded_mass_efficiency_approach() {
    check(3);
}

#[test]
fn acceptance_04_slowly_settling_limit_classification() {
    check(4);
}

#[test]
fn acceptance_05_alternating_profile_ratio_bounds() {
    check(5);
}

#[test]
fn acceptance_06_monotone_profile_ratio_sides() {
    check(6);
}

#[test]
fn acceptance_07_flat_profile_closed_forms() {
    check(7);
}

#[test]
fn acceptance_08_intensity_scale_coupling() {
    check(8);
}

#[test]
fn acceptance_09_stationary_distribution_cross_check() {
    check(9);
}

#[test]
fn acceptance_10_multi_slot_benefit_and_optimizer_dominance() {
    check(10);
}

#[test]
fn acceptance_11_two_state_bound_growth_and_consistency() {
    check(11);
}

#[test]
fn acceptance_12_simulation_corroboration() {
    check(12);
}

#[test]
fn acceptance_13_single_state_reduction() {
    check(13);
}

#[test]
fn acceptance_14_verify_subcommand_exits_zero() {
    let out = std::process::Command::new(env!("CARGO_BIN_EXE_queue-poa"))
        .arg("verify")
        .output()
        .unwrap();
    let status = if out.status.success() { "PASS" } else { "FAIL" };
    println!("criterion 14 (verify subcommand): {status}");
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(
        out.status.success(),
        "verify exited {:?}\nstdout:\n{stdout}\nstderr:\n{}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(stdout.contains("all 13 checks passed"), "stdout:\n{stdout}");
}

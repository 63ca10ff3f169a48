//! Acceptance criteria 1 to 14 at desk scale, one verdict line each.
//!
//! Criteria run one at a time so that their runtime budgets measure the
//! criterion alone.

use std::io::Write;
use std::sync::Mutex;

use scatter_cli::config::Profile;
use scatter_cli::suite::{run_criterion, Status, SuiteOptions};

const SEED: u64 = 2024;

static SERIAL: Mutex<()> = Mutex::new(());

fn criterion(id: u8) {
    let _guard = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let scratch = tempfile::tempdir().expect("scratch directory");
    let opts = SuiteOptions::new(Profile::Desk, SEED, scratch.path().to_path_buf());
    let outcome = run_criterion(id, &opts);
    // written past the test harness capture so every verdict shows up
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{}", outcome.line());
    let _ = out.flush();
    assert_ne!(outcome.status, Status::Fail, "{}", outcome.line());
}

#[test]
fn criterion_01_continuum_edge() {
    criterion(1);
}

#[test]
fn criterion_02_sqrt_lemma() {
    criterion(2);
}

#[test]
fn criterion_03_dispersion() {
    criterion(3);
}

#[test]
fn criterion_04_fiber_shift() {
    criterion(4);
}

#[test]
fn criterion_05_virial() {
    criterion(5);
}

#[test]
fn criterion_06_commutator_paths() {
    criterion(6);
}

#[test]
fn criterion_07_free_mourre() {
    criterion(7);
}

#[test]
fn criterion_08_interacting_mourre() {
    criterion(8);
}

#[test]
fn criterion_09_partition() {
    criterion(9);
}

#[test]
fn criterion_10_propagator() {
    criterion(10);
}

#[test]
fn criterion_11_local_decay() {
    criterion(11);
}

#[test]
fn criterion_12_minimal_velocity() {
    criterion(12);
}

#[test]
fn criterion_13_completeness() {
    criterion(13);
}

#[test]
fn criterion_14_determinism() {
    criterion(14);
}

//! Acceptance gate: one test per criterion, each printing a pass/fail line
//! (visible with `cargo test --test acceptance -- --nocapture`). Tolerances
//! and instance counts are pinned here.

use std::time::{Duration, Instant};

use ultrakit::report::SuiteReport;
use ultrakit::suites;

const SEED: u64 = 42;

fn gate(name: &str, budget: Duration, report: SuiteReport, elapsed: Duration) {
    let status = if report.all_pass() { "PASS" } else { "FAIL" };
    println!(
        "{name}: {status} ({} records, {:.2?}, budget {:.0?})",
        report.records.len(),
        elapsed,
        budget
    );
    for failure in report.failures().iter().take(5) {
        println!("  failed: {} {} {:?}", failure.suite, failure.instance, failure.witness);
    }
    assert!(report.all_pass(), "{name} reported failures");
    assert!(
        elapsed <= budget,
        "{name} exceeded its time budget: {elapsed:.2?} > {budget:.2?}"
    );
}

#[test]
fn criterion_01_ultrafilter_laws() {
    // Lattice-homomorphism axioms and autoduality on 200 random queries per
    // value in {δ_0, δ_7, factorial, a pushforward, a sum}; zero violations.
    let start = Instant::now();
    let report = suites::uf_laws_suite(SEED, 200);
    assert_eq!(report.records.len(), 5);
    gate(
        "criterion 01 ultrafilter laws",
        Duration::from_secs(5),
        report,
        start.elapsed(),
    );
}

#[test]
fn criterion_02_coherence_suite() {
    // Associator and unitor coherences, reindexing functoriality and its
    // associator square: 100 randomized instances with finite carriers ≤ 3
    // and factorial instances with probe period ≤ 4; zero violations.
    let start = Instant::now();
    let report = suites::coherence_suite(SEED, 100, 4);
    gate(
        "criterion 02 coherence suite",
        Duration::from_secs(30),
        report,
        start.elapsed(),
    );
}

#[test]
fn criterion_03_topology_roundtrip() {
    // Topology → convergence → topology is the identity on all 29
    // three-point spaces and 500 sampled four-point spaces.
    let start = Instant::now();
    let report = suites::roundtrip_suite(SEED, 500);
    let three_point = report
        .records
        .iter()
        .filter(|r| r.instance.starts_with("three-point"))
        .count();
    assert_eq!(three_point, 29);
    let four_point = report
        .records
        .iter()
        .filter(|r| r.instance.starts_with("four-point"))
        .count();
    assert_eq!(four_point, 500);
    gate(
        "criterion 03 topology roundtrip",
        Duration::from_secs(30),
        report,
        start.elapsed(),
    );
}

#[test]
fn criterion_04_etale_cross_check() {
    // The lift characterization agrees with the direct local-homeomorphism
    // verdict on every continuous map between spaces with ≤ 3 points and on
    // 1000 sampled maps at 4–5 points; the mismatch branch never fires.
    let start = Instant::now();
    let report = suites::etale_suite(SEED, 1000);
    gate(
        "criterion 04 etale cross-check",
        Duration::from_secs(120),
        report,
        start.elapsed(),
    );
}

#[test]
fn criterion_05_reconstruction() {
    // Stalks are an equivalence (object counts, hom counts, round trips) for
    // every space with ≤ 3 points at fiber bound 2.
    let start = Instant::now();
    let report = suites::reconstruction_suite(3, 2);
    let three_point = report
        .records
        .iter()
        .filter(|r| r.instance.starts_with("3-point"))
        .count();
    assert_eq!(three_point, 29);
    gate(
        "criterion 05 reconstruction",
        Duration::from_secs(300),
        report,
        start.elapsed(),
    );
}

#[test]
fn criterion_06_presheaf_roundtrip() {
    // Presheaf ↔ ultrasheaf round trips are identities for all presheaves
    // with fibers ≤ 2 over all categories with ≤ 2 objects and ≤ 2 parallel
    // arrows, exhaustively.
    let start = Instant::now();
    let report = suites::presheaf_suite(2);
    let categories = report
        .records
        .iter()
        .filter(|r| r.instance.contains("roundtrips"))
        .count();
    assert_eq!(categories, 108);
    gate(
        "criterion 06 presheaf roundtrip",
        Duration::from_secs(60),
        report,
        start.elapsed(),
    );
}

#[test]
fn criterion_07_exactness() {
    // Strict initiality, disjoint stable coproducts, effective stable
    // quotients over 100 randomized sheaf diagrams at fiber bound 3.
    let start = Instant::now();
    let report = suites::pretopos_suite(SEED, 100, 3);
    gate(
        "criterion 07 exactness",
        Duration::from_secs(120),
        report,
        start.elapsed(),
    );
}

#[test]
fn criterion_08_descent() {
    // At least 50 generated maps with the lifting criterion certify
    // universal on the full battery; at least 10 surjectivity violators fail
    // with a witness.
    let start = Instant::now();
    let report = suites::descent_suite(SEED, 50, 10);
    let positives = report
        .records
        .iter()
        .filter(|r| r.instance.starts_with("lifting-"))
        .count();
    let negatives = report
        .records
        .iter()
        .filter(|r| r.instance.starts_with("violator-"))
        .count();
    assert!(positives >= 50, "only {positives} lifting instances");
    assert!(negatives >= 10, "only {negatives} violating instances");
    gate(
        "criterion 08 descent",
        Duration::from_secs(600),
        report,
        start.elapsed(),
    );
}

#[test]
fn criterion_09_equivariant_sheaves() {
    // The one-point involution groupoid at fiber bound 2: descent data and
    // equivariant sheaves are equivalent with exactly 4 isomorphism classes.
    let start = Instant::now();
    let report = suites::equivariant_suite(2);
    assert!(report
        .records
        .iter()
        .any(|r| r.instance == "z2-four-objects"));
    gate(
        "criterion 09 equivariant sheaves",
        Duration::from_secs(10),
        report,
        start.elapsed(),
    );
}

#[test]
fn criterion_10_determinism() {
    // Every suite rerun with the same seed and configuration produces a
    // byte-identical structured report.
    let start = Instant::now();
    let pairs: Vec<(&str, String, String)> = vec![
        (
            "uf-laws",
            suites::uf_laws_suite(SEED, 200).to_json_lines(),
            suites::uf_laws_suite(SEED, 200).to_json_lines(),
        ),
        (
            "coherence",
            suites::coherence_suite(SEED, 40, 4).to_json_lines(),
            suites::coherence_suite(SEED, 40, 4).to_json_lines(),
        ),
        (
            "roundtrip",
            suites::roundtrip_suite(SEED, 100).to_json_lines(),
            suites::roundtrip_suite(SEED, 100).to_json_lines(),
        ),
        (
            "etale",
            suites::etale_suite(SEED, 100).to_json_lines(),
            suites::etale_suite(SEED, 100).to_json_lines(),
        ),
        (
            "reconstruct",
            suites::reconstruction_suite(2, 2).to_json_lines(),
            suites::reconstruction_suite(2, 2).to_json_lines(),
        ),
        (
            "alexandroff",
            suites::presheaf_suite(1).to_json_lines(),
            suites::presheaf_suite(1).to_json_lines(),
        ),
        (
            "pretopos",
            suites::pretopos_suite(SEED, 40, 3).to_json_lines(),
            suites::pretopos_suite(SEED, 40, 3).to_json_lines(),
        ),
        (
            "descent",
            suites::descent_suite(SEED, 8, 3).to_json_lines(),
            suites::descent_suite(SEED, 8, 3).to_json_lines(),
        ),
        (
            "equivariant",
            suites::equivariant_suite(2).to_json_lines(),
            suites::equivariant_suite(2).to_json_lines(),
        ),
        (
            "saturation",
            suites::saturation_suite(8).to_json_lines(),
            suites::saturation_suite(8).to_json_lines(),
        ),
    ];
    let mut all_equal = true;
    for (name, a, b) in &pairs {
        if a != b {
            all_equal = false;
            println!("  suite {name} is not deterministic");
        }
    }
    println!(
        "criterion 10 determinism: {} ({} suites, {:.2?})",
        if all_equal { "PASS" } else { "FAIL" },
        pairs.len(),
        start.elapsed()
    );
    assert!(all_equal);
}

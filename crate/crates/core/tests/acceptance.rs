//! Acceptance suite: one PASS/FAIL line per criterion, then a single assert.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the lines.

use std::time::Instant;

use toric_periods::config::RunConfig;
use toric_periods::curve::CurveConfig;
use toric_periods::report::{run, Command, Report};

/// Relative tolerance for every floating-point comparison.
const TOL: f64 = 1e-9;
/// Wall-clock budget for the exhaustive census of one field.
const CENSUS_SECONDS_PER_FIELD: f64 = 60.0;
/// Number of non-constant control pairs for the optimality check.
const NONCONSTANT_PAIRS: usize = 20;

type Criterion = fn() -> Result<String, String>;

fn cfg(q: u32, lambda: u32) -> RunConfig {
    let mut c = RunConfig::new(CurveConfig::prime(q, lambda, 0, 1, 4));
    c.tolerance = TOL;
    c
}

/// The curve with a nonzero cusp space used by the spectral criteria.
fn spectral_cfg() -> RunConfig {
    cfg(5, 3)
}

fn report(cmd: Command, c: &RunConfig) -> Result<Report, String> {
    run(cmd, c).map_err(|e| format!("{}: {e}", cmd.name()))
}

/// All checks whose name satisfies `pick` passed, and there was at least one.
fn picked(r: &Report, pick: impl Fn(&str) -> bool) -> Result<usize, String> {
    let chosen: Vec<_> = r.checks.iter().filter(|c| pick(&c.name)).collect();
    if chosen.is_empty() {
        return Err(format!("{}: no matching checks", r.command));
    }
    match chosen.iter().find(|c| !c.passed) {
        Some(c) => Err(format!("{} failed: {}", c.name, c.detail)),
        None => Ok(chosen.len()),
    }
}

fn invariant_bijectivity() -> Result<String, String> {
    let mut times = vec![];
    for q in [3, 5, 7] {
        let mut c = cfg(3, 2);
        c.census_fields = vec![q];
        let start = Instant::now();
        let r = report(Command::CensusInvariants, &c)?;
        let secs = start.elapsed().as_secs_f64();
        picked(&r, |n| n.ends_with("_regular_count_is_trace_one_units"))?;
        picked(&r, |n| n.ends_with("_inv_injective"))?;
        picked(&r, |n| n.ends_with("_nonregular_count_is_6"))?;
        if secs > CENSUS_SECONDS_PER_FIELD {
            return Err(format!("F_{q} census took {secs:.1}s"));
        }
        times.push(format!("F_{q} {secs:.2}s"));
    }
    Ok(times.join(", "))
}

fn orbital_run(q: u32, lambda: u32, degree: u32) -> Result<Report, String> {
    let mut c = cfg(q, lambda);
    c.orbital_degree = degree;
    report(Command::Orbital, &c)
}

fn route_equality() -> Result<String, String> {
    let mut out = vec![];
    for (q, lambda) in [(3, 2), (5, 3)] {
        let r = orbital_run(q, lambda, 2)?;
        picked(&r, |n| n == "route_a_equals_route_b")?;
        out.push(format!("q={q}: {}", r.check("route_a_equals_route_b").map(|c| c.detail.as_str()).unwrap_or("")));
    }
    Ok(out.join(", "))
}

fn unit_element() -> Result<String, String> {
    for (q, lambda) in [(3, 2), (5, 3), (7, 3)] {
        let r = orbital_run(q, lambda, 0)?;
        picked(&r, |n| n == "unit_j_total_is_one")?;
        picked(&r, |n| n == "local_unit_factors_multiply_to_one")?;
    }
    Ok("J(f_0) = 1 and local products = 1 for q = 3, 5, 7".into())
}

fn functional_equation() -> Result<String, String> {
    for (q, lambda) in [(3, 2), (5, 3)] {
        let r = orbital_run(q, lambda, 2)?;
        picked(&r, |n| n == "functional_equation" || n == "odd_derivatives_vanish")?;
    }
    Ok("exact symmetry in s, odd r ≤ 5 vanish, q = 3, 5".into())
}

fn representations() -> Result<String, String> {
    let mut c = cfg(3, 2);
    c.reps_max_d = 3;
    let r = report(Command::Reps, &c)?;
    let n = picked(&r, |_| true)?;
    Ok(format!("{n} checks for d ≤ 3"))
}

fn periods_identity() -> Result<String, String> {
    let r3 = report(Command::VerifyTheoremD, &cfg(3, 2))?;
    let vacuous = r3.check("no_cusp_forms").is_some_and(|c| c.passed);
    if !vacuous {
        picked(&r3, |n| n.ends_with("_residual"))?;
    }
    let r5 = report(Command::VerifyTheoremD, &spectral_cfg())?;
    let forms = picked(&r5, |n| n.ends_with("_residual"))?;
    let shipped = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/../../configs/q5_l3.json"))
        .map_err(|e| e.to_string())
        .and_then(|t| RunConfig::from_json(&t).map_err(|e| e.to_string()))?;
    let dim = report(Command::VerifyTheoremD, &shipped)?.data["cusp_dimension"].as_u64().unwrap_or(0);
    if dim == 0 {
        return Err("shipped config q5_l3 has no cusp forms".into());
    }
    Ok(format!("q=3 {}, q=5 λ=3: {forms} eigenforms within {TOL:e}", if vacuous { "vacuous" } else { "checked" }))
}

fn spectral_decomposition() -> Result<String, String> {
    let r = report(Command::VerifyJpi, &spectral_cfg())?;
    picked(&r, |n| n == "satake_transform_vanishes")?;
    let n = picked(&r, |n| n == "j_total_matches_eigenform_sum")?;
    picked(&r, |n| n == "j_total_matches_spectral_side_exactly")?;
    picked(&r, |n| n == "nontrivial_eisenstein_element")?;
    Ok(format!("{n} Eisenstein elements, {}", r.check("nontrivial_eisenstein_element").map(|c| c.detail.as_str()).unwrap_or("")))
}

fn rationality() -> Result<String, String> {
    let r = report(Command::Spectral, &spectral_cfg())?;
    let mut n = 0;
    for rv in [0, 2] {
        n += picked(&r, |name| name.starts_with("orbit_") && name.ends_with(&format!("_c_{rv}_sum_is_rational")))?;
    }
    Ok(format!("{n} orbit sums for r ∈ {{0, 2}}"))
}

fn optimal_embeddings() -> Result<String, String> {
    let mut c = spectral_cfg();
    c.nonconstant_pairs = NONCONSTANT_PAIRS;
    let r = report(Command::Optimal, &c)?;
    picked(&r, |n| n == "canonical_pair_is_optimal")?;
    let n = picked(&r, |n| n == "nonconstant_pair_is_not_optimal")?;
    if n != NONCONSTANT_PAIRS {
        return Err(format!("{n} control pairs, expected {NONCONSTANT_PAIRS}"));
    }
    picked(&r, |n| n == "unit_count_is_one_with_invariant_half")?;
    Ok(format!("inv 1/2 optimal, {n} controls rejected"))
}

fn hecke_hygiene() -> Result<String, String> {
    let r = report(Command::Spectral, &cfg(3, 2))?;
    picked(&r, |n| n == "hecke_commute" || n == "hecke_self_adjoint")?;
    Ok("q = 3, exact rationals".into())
}

#[test]
fn acceptance_criteria() {
    let criteria: [(&str, Criterion); 10] = [
        ("invariant bijectivity", invariant_bijectivity),
        ("route equality", route_equality),
        ("unit element", unit_element),
        ("functional equation and parity", functional_equation),
        ("representation theory", representations),
        ("four-torus period identity", periods_identity),
        ("spectral decomposition", spectral_decomposition),
        ("rationality of orbit sums", rationality),
        ("optimal embeddings", optimal_embeddings),
        ("Hecke algebra hygiene", hecke_hygiene),
    ];
    let mut failed = vec![];
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = f();
        let secs = start.elapsed().as_secs_f64();
        match &outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} [{secs:.1}s]", i + 1),
            Err(e) => {
                println!("FAIL {:>2} {name}: {e} [{secs:.1}s]", i + 1);
                failed.push(i + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}

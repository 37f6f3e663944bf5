//! Random-instance property battery behind `minimax selftest`.

use std::io::{self, Write};

use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::certificate::{check_theorem1, check_theorem2, extract_certificate, verify_identities};
use crate::equioscillation::alternation_pattern;
use crate::fit::{fit, InstanceRecord, ProblemInstance};
use crate::oracle::{brute_force_fit, compare_with_fit};
use crate::testing;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SelftestError {
    #[error("--instances must be at least 1")]
    NoInstances,
}

/// Properties in report order.
pub const PROPERTIES: [&str; 6] = [
    "theorem1",
    "theorem2",
    "identities",
    "oracle",
    "equioscillation",
    "weighted_rescale",
];

#[derive(Debug, Clone, PartialEq)]
pub struct Failure {
    pub property: &'static str,
    pub instance: usize,
    pub detail: String,
    pub record: InstanceRecord,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PropertyTally {
    pub name: &'static str,
    pub passed: usize,
    pub total: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelftestSummary {
    pub seed: u64,
    pub tallies: Vec<PropertyTally>,
    pub failures: Vec<Failure>,
}

impl SelftestSummary {
    pub fn all_pass(&self) -> bool {
        self.failures.is_empty()
    }

    /// One line per property, one block per failure with a replayable
    /// instance record, and a final verdict.
    pub fn render(&self, out: &mut impl Write) -> io::Result<()> {
        let total = self.tallies.first().map_or(0, |t| t.total);
        writeln!(out, "selftest seed={} instances={total}", self.seed)?;
        for t in &self.tallies {
            let verdict = if t.passed == t.total { "pass" } else { "FAIL" };
            writeln!(
                out,
                "{:<18} {:>5}/{:<5} {verdict}",
                t.name, t.passed, t.total
            )?;
        }
        for f in &self.failures {
            writeln!(out, "failure {} #{}: {}", f.property, f.instance, f.detail)?;
            let json = serde_json::to_string(&f.record).map_err(io::Error::other)?;
            writeln!(out, "  replay: {json}")?;
        }
        writeln!(
            out,
            "result: {}",
            if self.all_pass() { "PASS" } else { "FAIL" }
        )
    }
}

type Check = Result<(), String>;

fn stream(seed: u64, property: usize, instance: usize) -> ChaCha8Rng {
    let mut r = testing::rng(seed);
    r.set_stream(((property as u64) << 32) | instance as u64);
    r
}

fn ensure(ok: bool, what: impl FnOnce() -> String) -> Check {
    if ok {
        Ok(())
    } else {
        Err(what())
    }
}

fn structural(instance: &ProblemInstance, which: usize) -> Check {
    let f = fit(instance).map_err(|e| e.to_string())?;
    let m = instance.num_functions();
    match which {
        0 => {
            let ok = check_theorem1(&f, m).map_err(|e| e.to_string())?;
            ensure(ok, || {
                format!("{} active points for m = {m}", f.active_points.len())
            })
        }
        1 => {
            let cert = extract_certificate(&f, instance).map_err(|e| e.to_string())?;
            let ok = check_theorem2(&f, &cert, instance).map_err(|e| e.to_string())?;
            ensure(ok, || {
                format!(
                    "odd sum {:.12}, even sum {:.12}",
                    cert.odd_sum, cert.even_sum
                )
            })
        }
        _ => {
            let cert = extract_certificate(&f, instance).map_err(|e| e.to_string())?;
            let rep = verify_identities(&cert, &f, instance).map_err(|e| e.to_string())?;
            ensure(rep.all_pass, || {
                format!(
                    "gap {:.3e}, beta sum {:.3e}, identity h {:.3e}",
                    rep.strong_duality_gap, rep.beta_sum_residual, rep.identity_h_residual
                )
            })
        }
    }
}

/// LP and brute force agree on `d`, and on `α` when the optimum is unique.
pub fn oracle_agreement(instance: &ProblemInstance) -> Check {
    let f = fit(instance).map_err(|e| e.to_string())?;
    let o = brute_force_fit(instance).map_err(|e| e.to_string())?;
    let c = compare_with_fit(&f, &o, instance).map_err(|e| e.to_string())?;
    ensure(c.agrees, || {
        format!(
            "LP d = {:.17e}, oracle d = {:.17e}, coefficient difference {:.3e} (unique: {})",
            f.discrepancy, o.discrepancy, c.max_coefficient_difference, o.unique
        )
    })
}

fn equioscillation(instance: &ProblemInstance) -> Check {
    let f = fit(instance).map_err(|e| e.to_string())?;
    let r = alternation_pattern(&f, instance).map_err(|e| e.to_string())?;
    ensure(r.equioscillates, || {
        format!("signs {:?} for degree {}", r.signs, r.degree)
    })
}

/// The weighted fit equals the unweighted fit of the rescaled rows.
pub fn weighted_rescale(instance: &ProblemInstance) -> Check {
    let w = fit(instance).map_err(|e| e.to_string())?;
    let u = fit(&testing::prescaled(instance)).map_err(|e| e.to_string())?;
    ensure((w.discrepancy - u.discrepancy).abs() <= 1e-9, || {
        format!("d {:.17e} vs {:.17e}", w.discrepancy, u.discrepancy)
    })?;
    let worst = w
        .coefficients
        .iter()
        .zip(&u.coefficients)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    ensure(worst <= 1e-8, || {
        format!("coefficients differ by {worst:.3e}")
    })
}

fn instance_for(property: usize, rng: &mut ChaCha8Rng, k: usize) -> ProblemInstance {
    match property {
        0..=2 => testing::smooth_noise_instance(rng, 50, 4),
        3 => testing::small_instance(rng),
        4 => testing::generic_instance(rng, 30, 1 + k % 3),
        _ => testing::weighted_instance(rng, 30, 3),
    }
}

fn check(property: usize, instance: &ProblemInstance) -> Check {
    match property {
        0..=2 => structural(instance, property),
        3 => oracle_agreement(instance),
        4 => equioscillation(instance),
        _ => weighted_rescale(instance),
    }
}

pub fn run_selftest(seed: u64, instances: usize) -> Result<SelftestSummary, SelftestError> {
    if instances == 0 {
        return Err(SelftestError::NoInstances);
    }
    let jobs: Vec<(usize, usize)> = (0..PROPERTIES.len())
        .flat_map(|p| (0..instances).map(move |k| (p, k)))
        .collect();
    let outcomes: Vec<(usize, usize, ProblemInstance, Check)> = jobs
        .into_par_iter()
        .map(|(p, k)| {
            // The three structural checks share one instance stream.
            let mut rng = stream(seed, if p <= 2 { 0 } else { p }, k);
            let instance = instance_for(p, &mut rng, k);
            let outcome = check(p, &instance);
            (p, k, instance, outcome)
        })
        .collect();
    let mut tallies: Vec<PropertyTally> = PROPERTIES
        .iter()
        .map(|&name| PropertyTally {
            name,
            passed: 0,
            total: instances,
        })
        .collect();
    let mut failures = Vec::new();
    for (p, k, instance, outcome) in outcomes {
        match outcome {
            Ok(()) => tallies[p].passed += 1,
            Err(detail) => failures.push(Failure {
                property: PROPERTIES[p],
                instance: k,
                detail,
                record: instance.to_record(),
            }),
        }
    }
    Ok(SelftestSummary {
        seed,
        tallies,
        failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_instances_rejected() {
        assert_eq!(run_selftest(1, 0), Err(SelftestError::NoInstances));
    }

    #[test]
    fn small_battery_passes_and_is_deterministic() {
        let a = run_selftest(42, 3).unwrap();
        let b = run_selftest(42, 3).unwrap();
        let mut ta = Vec::new();
        let mut tb = Vec::new();
        a.render(&mut ta).unwrap();
        b.render(&mut tb).unwrap();
        assert_eq!(ta, tb);
        assert!(a.all_pass(), "{}", String::from_utf8_lossy(&ta));
        assert!(String::from_utf8(ta).unwrap().ends_with("result: PASS\n"));
    }
}

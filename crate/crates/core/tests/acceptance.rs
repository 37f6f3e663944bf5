//! Acceptance suite. Prints one line per criterion and exits nonzero if any
//! criterion fails.
//!
//! Quantities are recomputed here from raw design matrices, values and
//! multipliers instead of trusting the report fields they are checked
//! against.

use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::Instant;

use minimax_lp::equioscillation::{
    alternation_pattern, one_sided_construction, perturbation_step, reduction_step,
};
use minimax_lp::oracle::brute_force_fit;
use minimax_lp::{fit, objective_value, testing, BasisSet, FitResult, ProblemInstance};
use nalgebra::DMatrix;
use rand::Rng;
use serde_json::Value;

type Verdict = Result<String, String>;

struct Raw {
    g: DMatrix<f64>,
    y: Vec<f64>,
}

/// Weighted design and values, rebuilt from the instance's parts.
fn raw(inst: &ProblemInstance) -> Raw {
    let mut g = DMatrix::zeros(inst.len(), inst.num_functions());
    let mut y = Vec::with_capacity(inst.len());
    for (i, p) in inst.points().iter().enumerate() {
        let mu = inst.weight(i);
        let scale = inst.point_scale().map_or(1.0, |s| s[i]);
        for (k, f) in inst.basis().functions().iter().enumerate() {
            g[(i, k)] = mu * scale * f.eval(p).unwrap();
        }
        y.push(mu * inst.values()[i]);
    }
    Raw { g, y }
}

fn residuals(r: &Raw, alpha: &[f64]) -> Vec<f64> {
    (0..r.y.len())
        .map(|i| {
            r.y[i]
                - (0..alpha.len())
                    .map(|k| r.g[(i, k)] * alpha[k])
                    .sum::<f64>()
        })
        .collect()
}

fn structural_instances() -> Vec<ProblemInstance> {
    let mut rng = testing::rng(20_240_601);
    (0..100)
        .map(|_| testing::smooth_noise_instance(&mut rng, 50, 4))
        .collect()
}

fn solve_all(insts: &[ProblemInstance]) -> Result<Vec<FitResult>, String> {
    insts
        .iter()
        .map(|i| fit(i).map_err(|e| e.to_string()))
        .collect()
}

fn active_point_count(insts: &[ProblemInstance], fits: &[FitResult]) -> Verdict {
    let mut fewest = usize::MAX;
    for (k, (inst, f)) in insts.iter().zip(fits).enumerate() {
        let raw = raw(inst);
        let r = residuals(&raw, &f.coefficients);
        let d = r.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
        if (d - f.discrepancy).abs() > 1e-9 * d.max(1.0) {
            return Err(format!(
                "instance {k}: reported d {} but max |r| = {d}",
                f.discrepancy
            ));
        }
        let tol = 1e-7 * d.max(1.0);
        let active = r.iter().filter(|v| (v.abs() - d).abs() <= tol).count();
        fewest = fewest.min(active);
        if active < 6 {
            return Err(format!("instance {k}: {active} active points"));
        }
    }
    Ok(format!("100/100 instances, fewest active points {fewest}"))
}

fn balanced_sides(insts: &[ProblemInstance], fits: &[FitResult]) -> Verdict {
    let mut worst: f64 = 0.0;
    for (k, (inst, f)) in insts.iter().zip(fits).enumerate() {
        let r = residuals(&raw(inst), &f.coefficients);
        let d = f.discrepancy;
        let tol = 1e-7 * d.max(1.0);
        let above = r.iter().any(|v| (v - d).abs() <= tol);
        let below = r.iter().any(|v| (v + d).abs() <= tol);
        if !(above && below) {
            return Err(format!(
                "instance {k}: residual at +d {above}, at -d {below}"
            ));
        }
        let beta = &f.solution.dual;
        let over: f64 = beta.iter().step_by(2).sum();
        let under: f64 = beta.iter().skip(1).step_by(2).sum();
        let e = (over - 0.5).abs().max((under - 0.5).abs());
        worst = worst.max(e);
        if e > 1e-9 {
            return Err(format!(
                "instance {k}: overshoot {over}, undershoot {under}"
            ));
        }
    }
    Ok(format!(
        "100/100 instances, worst half-sum deviation {worst:.2e}"
    ))
}

fn dual_identities(insts: &[ProblemInstance], fits: &[FitResult]) -> Verdict {
    let (mut gap_w, mut sum_w, mut orth_w, mut h_w) = (0.0_f64, 0.0_f64, 0.0_f64, 0.0_f64);
    for (k, (inst, f)) in insts.iter().zip(fits).enumerate() {
        let raw = raw(inst);
        let (n, m) = raw.g.shape();
        let beta = &f.solution.dual;
        let d = f.discrepancy;
        let scale = d.max(1.0);
        if beta.len() != 2 * n || beta.iter().any(|b| *b < 0.0) {
            return Err(format!("instance {k}: multipliers missing or negative"));
        }
        let over = |i: usize| beta[2 * i];
        let under = |i: usize| beta[2 * i + 1];
        let gap = (0..n).map(|i| (under(i) - over(i)) * raw.y[i]).sum::<f64>() - d;
        let sum = beta.iter().sum::<f64>() - 1.0;
        let orth = (0..m)
            .map(|c| {
                (0..n)
                    .map(|i| (over(i) - under(i)) * raw.g[(i, c)])
                    .sum::<f64>()
                    .abs()
            })
            .fold(0.0, f64::max);
        let fitted: Vec<f64> = (0..n)
            .map(|i| (0..m).map(|c| raw.g[(i, c)] * f.coefficients[c]).sum())
            .collect();
        let h = (0..n)
            .map(|i| over(i) * (fitted[i] - raw.y[i]) + under(i) * (raw.y[i] - fitted[i]))
            .sum::<f64>()
            - d;
        gap_w = gap_w.max(gap.abs() / scale);
        sum_w = sum_w.max(sum.abs());
        orth_w = orth_w.max(orth);
        h_w = h_w.max(h.abs());
        if gap.abs() > 1e-8 * scale || sum.abs() > 1e-9 || orth > 1e-8 || h.abs() > 1e-8 {
            return Err(format!(
                "instance {k}: gap {gap:.2e}, sum {sum:.2e}, orthogonality {orth:.2e}, h {h:.2e}"
            ));
        }
    }
    Ok(format!(
        "100/100 instances, worst gap {gap_w:.2e}, sum {sum_w:.2e}, orthogonality {orth_w:.2e}, h {h_w:.2e}"
    ))
}

fn oracle_equivalence() -> Verdict {
    let mut rng = testing::rng(77);
    let (mut unique, mut worst_d, mut worst_a) = (0, 0.0_f64, 0.0_f64);
    for k in 0..500 {
        let inst = testing::small_instance(&mut rng);
        let f = fit(&inst).map_err(|e| format!("instance {k}: {e}"))?;
        let o = brute_force_fit(&inst).map_err(|e| format!("instance {k}: {e}"))?;
        let dd = (f.discrepancy - o.discrepancy).abs();
        worst_d = worst_d.max(dd);
        if dd > 1e-8 {
            return Err(format!(
                "instance {k}: LP {} vs oracle {}",
                f.discrepancy, o.discrepancy
            ));
        }
        if o.unique {
            unique += 1;
            let da = f
                .coefficients
                .iter()
                .zip(&o.coefficients)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            worst_a = worst_a.max(da);
            if da > 1e-7 {
                return Err(format!("instance {k}: coefficients differ by {da:.2e}"));
            }
        } else {
            let achieved = objective_value(&inst, &o.coefficients).unwrap();
            if (achieved - f.discrepancy).abs() > 1e-8 {
                return Err(format!(
                    "instance {k}: oracle coefficients achieve {achieved}"
                ));
            }
        }
    }
    Ok(format!(
        "500/500 instances ({unique} unique), worst d difference {worst_d:.2e}, coefficients {worst_a:.2e}"
    ))
}

fn weighted_rescale() -> Verdict {
    let mut rng = testing::rng(31);
    let (mut worst_d, mut worst_a) = (0.0_f64, 0.0_f64);
    for k in 0..100 {
        let base = testing::smooth_noise_instance(&mut rng, 30, 3);
        let mu: Vec<f64> = (0..30).map(|_| rng.random_range(0.1..=10.0)).collect();
        let weighted = base.clone().with_weights(mu.clone()).unwrap();
        let scaled_values: Vec<f64> = base.values().iter().zip(&mu).map(|(y, w)| y * w).collect();
        let rescaled =
            ProblemInstance::new(base.points().to_vec(), scaled_values, base.basis().clone())
                .and_then(|i| i.with_point_scale(mu))
                .unwrap();
        let a = fit(&weighted).map_err(|e| e.to_string())?;
        let b = fit(&rescaled).map_err(|e| e.to_string())?;
        let dd = (a.discrepancy - b.discrepancy).abs();
        let da = a
            .coefficients
            .iter()
            .zip(&b.coefficients)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max);
        worst_d = worst_d.max(dd);
        worst_a = worst_a.max(da);
        if dd > 1e-9 || da > 1e-8 {
            return Err(format!(
                "instance {k}: d difference {dd:.2e}, coefficients {da:.2e}"
            ));
        }
    }
    Ok(format!(
        "100/100 instances, worst d difference {worst_d:.2e}, coefficients {worst_a:.2e}"
    ))
}

fn parabola_line() -> Verdict {
    let xs: Vec<f64> = (0..=1000).map(|k| f64::from(k) / 1000.0).collect();
    let ys: Vec<f64> = xs.iter().map(|x| x * x).collect();
    let inst = ProblemInstance::from_xy(&xs, &ys, BasisSet::parse("1, x", 1).unwrap()).unwrap();
    let f = fit(&inst).map_err(|e| e.to_string())?;
    let e0 = (f.coefficients[0] + 0.125).abs();
    let e1 = (f.coefficients[1] - 1.0).abs();
    let ed = (f.discrepancy - 0.125).abs();
    if e0.max(e1) > 1e-6 || ed > 1e-6 {
        return Err(format!(
            "coefficients {:?}, d {}",
            f.coefficients, f.discrepancy
        ));
    }
    Ok(format!(
        "alpha = ({:.9}, {:.9}), d = {:.9}",
        f.coefficients[0], f.coefficients[1], f.discrepancy
    ))
}

fn one_sided() -> Verdict {
    let mut rng = testing::rng(55);
    let (mut worst_d, mut worst_a) = (0.0_f64, 0.0_f64);
    for k in 0..50 {
        let inst = testing::generic_instance(&mut rng, 30, 1 + k % 3);
        let f = fit(&inst).map_err(|e| e.to_string())?;
        let r = residuals(&raw(&inst), &f.coefficients);
        let tol = 1e-7 * f.discrepancy.max(1.0);
        let j = (0..inst.len())
            .find(|&i| (r[i] + f.discrepancy).abs() <= tol)
            .ok_or_else(|| format!("instance {k}: no overshoot point"))?;
        let flipped = one_sided_construction(&inst, &f, j).map_err(|e| e.to_string())?;
        let g = fit(&flipped).map_err(|e| e.to_string())?;
        let dd = (g.discrepancy - f.discrepancy).abs();
        let da = g
            .coefficients
            .iter()
            .zip(&f.coefficients)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max);
        worst_d = worst_d.max(dd);
        worst_a = worst_a.max(da);
        if dd > 1e-9 || da > 1e-8 {
            return Err(format!(
                "instance {k}: d difference {dd:.2e}, coefficients {da:.2e}"
            ));
        }
        let after = residuals(&raw(&flipped), &g.coefficients);
        if (after[j] - f.discrepancy).abs() > tol {
            return Err(format!("instance {k}: point {j} did not change side"));
        }
        let verdict = alternation_pattern(&g, &flipped).map_err(|e| e.to_string())?;
        if verdict.equioscillates {
            return Err(format!(
                "instance {k}: modified fit still alternates {:?}",
                verdict.signs
            ));
        }
    }
    Ok(format!(
        "50/50 instances, worst d difference {worst_d:.2e}, coefficients {worst_a:.2e}"
    ))
}

fn lagrange_perturbation() -> Verdict {
    let mut rng = testing::rng(88);
    let mut worst: f64 = 0.0;
    for k in 0..100 {
        let c = testing::reference_configuration(&mut rng);
        let z = &c.reference.abscissae;
        let j = c.pair;
        let product: f64 = (0..z.len())
            .filter(|&i| i != j && i != j + 1)
            .map(|i| (z[j + 1] - z[i]) / (z[j] - z[i]))
            .product();
        let expected = c.epsilon * product;
        let p = perturbation_step(&c.reference, &c.instance, j, c.epsilon)
            .map_err(|e| e.to_string())?;
        let rel = (p.direct_difference - expected).abs() / expected.abs();
        worst = worst.max(rel);
        if rel > 1e-8 || !p.agrees || expected <= 0.0 {
            return Err(format!(
                "configuration {k}: direct {} vs product {expected}",
                p.direct_difference
            ));
        }
        let q =
            reduction_step(&c.reference, &c.instance, j, c.epsilon).map_err(|e| e.to_string())?;
        if q.max_reference_discrepancy >= c.reference.discrepancy || !q.reduced {
            return Err(format!(
                "configuration {k}: reference discrepancy {} not below {}",
                q.max_reference_discrepancy, c.reference.discrepancy
            ));
        }
    }
    Ok(format!(
        "100/100 configurations, worst relative difference {worst:.2e}, all reduced below d"
    ))
}

fn convexity() -> Verdict {
    let mut rng = testing::rng(12);
    let mut worst = f64::NEG_INFINITY;
    for k in 0..20 {
        let inst = testing::smooth_noise_instance(&mut rng, 30, 3);
        let raw = raw(&inst);
        let obj = |a: &[f64]| {
            residuals(&raw, a)
                .iter()
                .fold(0.0_f64, |m, v| m.max(v.abs()))
        };
        for _ in 0..1000 {
            let a = testing::random_coefficients(&mut rng, 4, 3.0);
            let b = testing::random_coefficients(&mut rng, 4, 3.0);
            let t: f64 = rng.random_range(0.0..=1.0);
            let mix: Vec<f64> = a
                .iter()
                .zip(&b)
                .map(|(x, y)| t * x + (1.0 - t) * y)
                .collect();
            let lib = objective_value(&inst, &mix).unwrap();
            let excess = lib - (t * obj(&a) + (1.0 - t) * obj(&b));
            worst = worst.max(excess);
            if excess > 1e-12 {
                return Err(format!(
                    "instance {k}: convex combination exceeds by {excess:.2e}"
                ));
            }
        }
    }
    Ok(format!("20000/20000 triples, largest excess {worst:.2e}"))
}

fn cli_golden() -> Verdict {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests");
    let hat = dir.join("data/hat.csv");
    let golden =
        std::fs::read(dir.join("golden/hat_certify_verify.json")).map_err(|e| e.to_string())?;
    let mut outputs = Vec::new();
    for _ in 0..2 {
        let out = Command::new(env!("CARGO_BIN_EXE_minimax"))
            .args([
                "fit",
                "--data",
                hat.to_str().unwrap(),
                "--basis",
                "1,x",
                "--certify",
                "--verify",
            ])
            .output()
            .map_err(|e| e.to_string())?;
        if out.status.code() != Some(0) {
            return Err(format!(
                "exit {:?}: {}",
                out.status.code(),
                String::from_utf8_lossy(&out.stderr)
            ));
        }
        outputs.push(out.stdout);
    }
    if outputs[0] != outputs[1] || outputs[0] != golden {
        return Err("report bytes differ from the golden file".into());
    }
    let v: Value = serde_json::from_slice(&outputs[0]).map_err(|e| e.to_string())?;
    if v["discrepancy"].as_f64() != Some(0.5) {
        return Err(format!("discrepancy {}", v["discrepancy"]));
    }
    let flags = [
        &v["certificate"]["theorem1_pass"],
        &v["certificate"]["theorem2_pass"],
        &v["certificate"]["duality_pass"],
        &v["certificate"]["beta_sum_pass"],
        &v["certificate"]["orthogonality_pass"],
        &v["certificate"]["identity_h_pass"],
        &v["certificate"]["all_pass"],
        &v["alternation"]["equioscillates"],
        &v["oracle"]["agrees"],
    ];
    if flags.iter().any(|f| **f != Value::Bool(true)) {
        return Err("a pass flag is not true".into());
    }
    Ok(format!(
        "{} bytes, identical across runs and to the golden file",
        golden.len()
    ))
}

fn main() -> ExitCode {
    let started = Instant::now();
    let insts = structural_instances();
    let fits = solve_all(&insts);
    let with_fits = |check: fn(&[ProblemInstance], &[FitResult]) -> Verdict| match &fits {
        Ok(f) => check(&insts, f),
        Err(e) => Err(e.clone()),
    };
    let results: Vec<(&str, Verdict)> = vec![
        ("active-point count", with_fits(active_point_count)),
        ("overshoot/undershoot balance", with_fits(balanced_sides)),
        ("dual identities", with_fits(dual_identities)),
        ("brute-force equivalence", oracle_equivalence()),
        ("weighted rescale", weighted_rescale()),
        ("x^2 by a line on 1001 samples", parabola_line()),
        ("one-sided construction", one_sided()),
        ("Lagrange perturbation", lagrange_perturbation()),
        ("convexity", convexity()),
        ("CLI golden report", cli_golden()),
    ];
    let mut failed = 0;
    for (k, (name, verdict)) in results.iter().enumerate() {
        match verdict {
            Ok(detail) => println!("criterion {:>2} {name}: PASS ({detail})", k + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} {name}: FAIL ({detail})", k + 1);
            }
        }
    }
    let elapsed = started.elapsed().as_secs_f64();
    println!(
        "acceptance: {} of {} criteria pass in {elapsed:.1} s",
        results.len() - failed,
        results.len()
    );
    if elapsed >= 60.0 {
        println!("acceptance: FAIL (runtime {elapsed:.1} s exceeds 60 s)");
        return ExitCode::FAILURE;
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

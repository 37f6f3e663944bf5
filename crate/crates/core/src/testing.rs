//! Seeded random instances shared by the self-test, the examples and the
//! integration tests.
//!
//! Every generator takes the RNG by reference so a single
//! [`rng`] stream reproduces a whole battery.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::basis::{BasisSet, EvaluationPoint};
use crate::equioscillation::ReferenceSet;
use crate::fit::ProblemInstance;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `n` distinct sorted abscissae, uniform on `[lo, hi]`, pairwise at least
/// `1e-6 · (hi − lo)` apart.
pub fn distinct_abscissae(rng: &mut impl Rng, n: usize, lo: f64, hi: f64) -> Vec<f64> {
    let min_gap = 1e-6 * (hi - lo);
    loop {
        let mut xs: Vec<f64> = (0..n).map(|_| rng.random_range(lo..=hi)).collect();
        xs.sort_by(f64::total_cmp);
        if xs.windows(2).all(|w| w[1] - w[0] > min_gap) {
            return xs;
        }
    }
}

fn smooth(x: f64, phase: f64) -> f64 {
    (3.0 * x + phase).sin() + 0.5 * (x * phase).exp()
}

/// `n` points on `[−1, 1]` with values from a smooth function plus uniform
/// noise of amplitude 0.05, fitted by monomials up to `degree`.
pub fn smooth_noise_instance(rng: &mut impl Rng, n: usize, degree: usize) -> ProblemInstance {
    let xs = distinct_abscissae(rng, n, -1.0, 1.0);
    let phase = rng.random_range(-1.0..1.0);
    let ys: Vec<f64> = xs
        .iter()
        .map(|&x| smooth(x, phase) + rng.random_range(-0.05..0.05))
        .collect();
    ProblemInstance::from_xy(&xs, &ys, BasisSet::monomials(degree))
        .expect("generated instance is valid")
}

/// `n` points with generic values uniform on `[−1, 1]`.
pub fn generic_instance(rng: &mut impl Rng, n: usize, degree: usize) -> ProblemInstance {
    let xs = distinct_abscissae(rng, n, -1.0, 1.0);
    let ys: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    ProblemInstance::from_xy(&xs, &ys, BasisSet::monomials(degree))
        .expect("generated instance is valid")
}

/// A small instance within the oracle's reach: `m ≤ 3`, `m + 1 ≤ n ≤ 12`.
/// One in four is two-dimensional with the affine basis `1, x, y`, which
/// is not a Haar system.
pub fn small_instance(rng: &mut impl Rng) -> ProblemInstance {
    if rng.random_range(0..4) == 0 {
        let n = rng.random_range(4..=12);
        let points: Vec<EvaluationPoint> = (0..n)
            .map(|_| [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)].into())
            .collect();
        let ys: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let basis = BasisSet::parse("1, x, y", 2).expect("affine basis parses");
        return ProblemInstance::new(points, ys, basis).expect("generated instance is valid");
    }
    let degree = rng.random_range(0..=2);
    let n = rng.random_range(degree + 2..=12);
    generic_instance(rng, n, degree)
}

/// [`smooth_noise_instance`] with weights uniform on `[0.1, 10]`.
pub fn weighted_instance(rng: &mut impl Rng, n: usize, degree: usize) -> ProblemInstance {
    let base = smooth_noise_instance(rng, n, degree);
    let weights = (0..n).map(|_| rng.random_range(0.1..=10.0)).collect();
    base.with_weights(weights).expect("weights are positive")
}

/// The unweighted instance whose design rows and values are the weighted
/// ones: `Γ'_j(x_i) = μ_i Γ_j(x_i)`, `y'_i = μ_i y_i`.
pub fn prescaled(instance: &ProblemInstance) -> ProblemInstance {
    let weights: Vec<f64> = (0..instance.len()).map(|i| instance.weight(i)).collect();
    let scale: Vec<f64> = match instance.point_scale() {
        Some(s) => s.iter().zip(&weights).map(|(s, w)| s * w).collect(),
        None => weights,
    };
    ProblemInstance::new(
        instance.points().to_vec(),
        instance.weighted_values(),
        instance.basis().clone(),
    )
    .and_then(|i| i.with_point_scale(scale))
    .expect("rescaled instance is valid")
}

/// A reference set of `t + 2` points with a same-sided neighbouring pair.
#[derive(Debug, Clone)]
pub struct ReferenceConfiguration {
    pub instance: ProblemInstance,
    pub reference: ReferenceSet,
    /// Position in the reference of the first point of the same-sided pair.
    pub pair: usize,
    pub epsilon: f64,
}

/// Degree `t ∈ 1..=4`, sorted nodes on `[−1, 1]`, a random polynomial `f`
/// of degree `t`, values `q_i = f(z_i) + s_i d` with signs alternating
/// except across one pair, and a few extra points strictly within `d/2` of
/// `f`. `ε` is drawn from `[0.01 d, 0.1 d]`.
pub fn reference_configuration(rng: &mut impl Rng) -> ReferenceConfiguration {
    let t = rng.random_range(1..=4);
    let k = t + 2;
    let z = distinct_abscissae(rng, k, -1.0, 1.0);
    let pair = rng.random_range(0..k - 1);
    let first: i8 = if rng.random_bool(0.5) { 1 } else { -1 };
    let mut signs = vec![first; k];
    for i in 1..k {
        signs[i] = if i == pair + 1 {
            signs[i - 1]
        } else {
            -signs[i - 1]
        };
    }
    let d = rng.random_range(0.1..=1.0);
    let coeffs: Vec<f64> = (0..=t).map(|_| rng.random_range(-1.0..1.0)).collect();
    let f = |x: f64| coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c);

    let mut xs = z.clone();
    let mut ys: Vec<f64> = z
        .iter()
        .zip(&signs)
        .map(|(&x, &s)| f(x) + f64::from(s) * d)
        .collect();
    for _ in 0..rng.random_range(0..=5) {
        let x = rng.random_range(-1.0..1.0);
        if xs.iter().all(|v| (v - x).abs() > 1e-6) {
            xs.push(x);
            ys.push(f(x) + rng.random_range(-0.5..0.5) * d);
        }
    }
    let instance = ProblemInstance::from_xy(&xs, &ys, BasisSet::monomials(t))
        .expect("generated instance is valid");
    let reference = ReferenceSet::new((0..k).collect(), z, signs, d);
    let epsilon = rng.random_range(0.01..=0.1) * d;
    ReferenceConfiguration {
        instance,
        reference,
        pair,
        epsilon,
    }
}

/// A coefficient vector with entries uniform on `[−scale, scale]`.
pub fn random_coefficients(rng: &mut impl Rng, m: usize, scale: f64) -> Vec<f64> {
    (0..m).map(|_| rng.random_range(-scale..=scale)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_instance() {
        let a = smooth_noise_instance(&mut rng(7), 50, 4);
        let b = smooth_noise_instance(&mut rng(7), 50, 4);
        assert_eq!(a, b);
        assert_eq!(a.len(), 50);
        assert_eq!(a.num_functions(), 5);
    }

    #[test]
    fn small_instances_stay_small() {
        let mut r = rng(1);
        for _ in 0..200 {
            let i = small_instance(&mut r);
            assert!(i.len() <= 12 && i.num_functions() <= 3 && i.len() > i.num_functions());
        }
    }

    #[test]
    fn reference_configuration_has_one_repeat() {
        let mut r = rng(3);
        for _ in 0..50 {
            let c = reference_configuration(&mut r);
            let s = &c.reference.signs;
            assert_eq!(s[c.pair], s[c.pair + 1]);
            assert_eq!(c.reference.sign_runs(), s.len() - 1);
            assert!(c.epsilon <= 0.1 * c.reference.discrepancy);
        }
    }

    #[test]
    fn prescaled_matches_weighted_rows() {
        let i = weighted_instance(&mut rng(5), 10, 2);
        let p = prescaled(&i);
        assert!(!p.is_weighted());
        assert_eq!(p.design().unwrap(), i.weighted_design().unwrap());
        assert_eq!(p.values(), i.weighted_values().as_slice());
    }
}

//! Polynomial interpolation in barycentric form.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum InterpolationError {
    #[error("nodes {first} and {second} coincide")]
    DuplicateNode { first: usize, second: usize },
    #[error("{nodes} nodes but {values} values")]
    LengthMismatch { nodes: usize, values: usize },
    #[error("at least one node is required")]
    Empty,
    #[error("node {0} is not finite")]
    NonFinite(usize),
}

/// The unique polynomial of degree `nodes.len() − 1` through the given
/// points, evaluated with the second barycentric formula.
#[derive(Debug, Clone, PartialEq)]
pub struct LagrangePolynomial {
    nodes: Vec<f64>,
    node_values: Vec<f64>,
    weights: Vec<f64>,
}

impl LagrangePolynomial {
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn node_values(&self) -> &[f64] {
        &self.node_values
    }

    pub fn degree(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn eval(&self, x: f64) -> f64 {
        if self.nodes.len() == 1 {
            return self.node_values[0];
        }
        let mut num = 0.0;
        let mut den = 0.0;
        for ((&z, &v), &w) in self.nodes.iter().zip(&self.node_values).zip(&self.weights) {
            let diff = x - z;
            if diff == 0.0 {
                return v;
            }
            let t = w / diff;
            num += t * v;
            den += t;
        }
        num / den
    }
}

pub fn lagrange_interpolate(
    nodes: &[f64],
    values: &[f64],
) -> Result<LagrangePolynomial, InterpolationError> {
    if nodes.is_empty() {
        return Err(InterpolationError::Empty);
    }
    if nodes.len() != values.len() {
        return Err(InterpolationError::LengthMismatch {
            nodes: nodes.len(),
            values: values.len(),
        });
    }
    if let Some(i) = nodes.iter().position(|z| !z.is_finite()) {
        return Err(InterpolationError::NonFinite(i));
    }
    let lo = nodes.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = nodes.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min_gap = 1e-12 * (hi - lo);
    for i in 0..nodes.len() {
        for k in i + 1..nodes.len() {
            if (nodes[i] - nodes[k]).abs() <= min_gap {
                return Err(InterpolationError::DuplicateNode {
                    first: i,
                    second: k,
                });
            }
        }
    }
    let weights = (0..nodes.len())
        .map(|k| {
            let prod: f64 = (0..nodes.len())
                .filter(|&i| i != k)
                .map(|i| nodes[k] - nodes[i])
                .product();
            1.0 / prod
        })
        .collect();
    Ok(LagrangePolynomial {
        nodes: nodes.to_vec(),
        node_values: values.to_vec(),
        weights,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_line() {
        let p = lagrange_interpolate(&[0.0, 1.0], &[0.0, 1.0]).unwrap();
        assert_eq!(p.degree(), 1);
        assert!((p.eval(0.5) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn hat_extrapolates() {
        // Through (0,0), (1,1), (2,0) the polynomial is x(2 − x), so p(3) = −3.
        let p = lagrange_interpolate(&[0.0, 1.0, 2.0], &[0.0, 1.0, 0.0]).unwrap();
        assert!((p.eval(3.0) + 3.0).abs() < 1e-12);
    }

    #[test]
    fn single_node_is_constant() {
        let p = lagrange_interpolate(&[5.0], &[7.0]).unwrap();
        assert_eq!(p.degree(), 0);
        assert_eq!(p.eval(-100.0), 7.0);
        assert_eq!(p.eval(5.0), 7.0);
    }

    #[test]
    fn reproduces_node_values() {
        let nodes = [-0.9, -0.2, 0.1, 0.65, 1.3];
        let values = [3.0, -1.0, 0.25, 8.0, -2.5];
        let p = lagrange_interpolate(&nodes, &values).unwrap();
        for (z, v) in nodes.iter().zip(values) {
            assert!((p.eval(*z) - v).abs() <= 1e-9 * v.abs());
        }
        // Nearly at a node the barycentric form stays continuous.
        assert!((p.eval(0.1 + 1e-14) - 0.25).abs() < 1e-9);
    }

    #[test]
    fn errors() {
        assert!(matches!(
            lagrange_interpolate(&[0.0, 1.0, 0.0], &[1.0, 2.0, 3.0]),
            Err(InterpolationError::DuplicateNode {
                first: 0,
                second: 2
            })
        ));
        assert!(matches!(
            lagrange_interpolate(&[], &[]),
            Err(InterpolationError::Empty)
        ));
        assert!(matches!(
            lagrange_interpolate(&[0.0], &[1.0, 2.0]),
            Err(InterpolationError::LengthMismatch { .. })
        ));
    }
}

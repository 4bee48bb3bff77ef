//! Quadrature representation of the inhomogeneous line shape `nu(delta)`.
//!
//! Every distribution is a finite set of detuning nodes with normalized
//! weights, so that `sum_k w_k f(delta_k)` stands in for
//! `int f(delta) nu(delta) d delta`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Lorentzian support is truncated at this many half-widths on either side.
pub const LORENTZIAN_TRUNCATION: f64 = 8.0;

const NORMALIZATION_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LineShape {
    /// `nu = delta(Delta)`.
    SharpLine,
    /// Normal distribution; `width` is the standard deviation in MHz.
    Gaussian { width: f64 },
    /// Cauchy distribution; `width` is the half width at half maximum in MHz.
    Lorentzian { width: f64 },
    /// User-supplied nodes and weights.
    Custom,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetuningDistribution {
    shape: LineShape,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl DetuningDistribution {
    pub fn sharp_line() -> Self {
        Self {
            shape: LineShape::SharpLine,
            nodes: vec![0.0],
            weights: vec![1.0],
        }
    }

    /// Builds the quadrature for `shape` with `node_count` nodes.
    ///
    /// Symmetric shapes require an odd node count so that `Delta = 0` is a
    /// node. `Custom` cannot be built this way; use [`Self::custom`].
    pub fn new(shape: LineShape, node_count: usize) -> Result<Self> {
        if node_count == 0 {
            return Err(Error::InvalidParameter("node_count must be >= 1".into()));
        }
        match shape {
            LineShape::SharpLine => {
                if node_count != 1 {
                    return Err(Error::InvalidParameter(
                        "a sharp line has exactly one node".into(),
                    ));
                }
                Ok(Self::sharp_line())
            }
            LineShape::Gaussian { width } => {
                check_symmetric(width, node_count)?;
                let (x, w) = gauss_hermite(node_count);
                let scale = std::f64::consts::SQRT_2 * width;
                let nodes = x.iter().map(|&x| x * scale).collect();
                Ok(Self::normalized(shape, nodes, w))
            }
            LineShape::Lorentzian { width } => {
                check_symmetric(width, node_count)?;
                if node_count == 1 {
                    return Ok(Self {
                        shape,
                        nodes: vec![0.0],
                        weights: vec![1.0],
                    });
                }
                // Delta = width * tan(u) turns nu(Delta) dDelta into du / pi, so a
                // uniform trapezoid rule in u has equal weights away from the ends.
                let u_max = LORENTZIAN_TRUNCATION.atan();
                let n = node_count;
                let du = 2.0 * u_max / (n - 1) as f64;
                let half = n / 2;
                let mut nodes = Vec::with_capacity(n);
                let mut weights = Vec::with_capacity(n);
                for j in 0..n {
                    let offset = j as isize - half as isize;
                    let u = offset as f64 * du;
                    nodes.push(if offset == 0 { 0.0 } else { width * u.tan() });
                    weights.push(if j == 0 || j == n - 1 { 0.5 } else { 1.0 });
                }
                Ok(Self::normalized(shape, nodes, weights))
            }
            LineShape::Custom => Err(Error::InvalidParameter(
                "custom distributions are built from explicit nodes and weights".into(),
            )),
        }
    }

    /// Custom distribution. Weights are renormalized to unit sum.
    pub fn custom(nodes: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if nodes.is_empty() || nodes.len() != weights.len() {
            return Err(Error::InvalidParameter(
                "custom distribution needs equally many nodes and weights".into(),
            ));
        }
        if nodes.windows(2).any(|p| p[1] <= p[0]) {
            return Err(Error::InvalidParameter("nodes must be strictly increasing".into()));
        }
        if weights.iter().any(|w| !(*w >= 0.0) || !w.is_finite()) {
            return Err(Error::InvalidParameter("weights must be finite and >= 0".into()));
        }
        if weights.iter().sum::<f64>() <= 0.0 {
            return Err(Error::InvalidParameter("weights sum to zero".into()));
        }
        Ok(Self::normalized(LineShape::Custom, nodes, weights))
    }

    fn normalized(shape: LineShape, nodes: Vec<f64>, mut weights: Vec<f64>) -> Self {
        let total: f64 = weights.iter().sum();
        for w in &mut weights {
            *w /= total;
        }
        let dist = Self {
            shape,
            nodes,
            weights,
        };
        debug_assert!((dist.weights.iter().sum::<f64>() - 1.0).abs() < NORMALIZATION_TOL);
        dist
    }

    pub fn shape(&self) -> LineShape {
        self.shape
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.nodes.iter().copied().zip(self.weights.iter().copied())
    }

    /// `sum_k w_k f(Delta_k)`, summed in node order.
    pub fn integrate(&self, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.iter().map(|(d, w)| w * f(d)).sum()
    }

    pub fn max_abs_detuning(&self) -> f64 {
        self.nodes.iter().fold(0.0_f64, |m, d| m.max(d.abs()))
    }
}

fn check_symmetric(width: f64, node_count: usize) -> Result<()> {
    if !(width > 0.0) || !width.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "line width must be positive, got {width}"
        )));
    }
    if node_count % 2 == 0 {
        return Err(Error::InvalidParameter(format!(
            "symmetric line shapes need an odd node count (got {node_count}) so that Delta = 0 is a node"
        )));
    }
    Ok(())
}

/// Gauss-Hermite nodes and weights for `int exp(-x^2) f(x) dx`, via the
/// eigen-decomposition of the Jacobi matrix. Nodes are symmetrized and the
/// centre node (odd `n`) is set to exactly zero.
fn gauss_hermite(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut jacobi = DMatrix::<f64>::zeros(n, n);
    for k in 1..n {
        let b = (k as f64 / 2.0).sqrt();
        jacobi[(k, k - 1)] = b;
        jacobi[(k - 1, k)] = b;
    }
    let eig = jacobi.symmetric_eigen();
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let v0 = eig.eigenvectors[(0, i)];
            (eig.eigenvalues[i], std::f64::consts::PI.sqrt() * v0 * v0)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut nodes: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let mut weights: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    for i in 0..n / 2 {
        let j = n - 1 - i;
        let x = 0.5 * (nodes[j] - nodes[i]);
        let w = 0.5 * (weights[i] + weights[j]);
        nodes[i] = -x;
        nodes[j] = x;
        weights[i] = w;
        weights[j] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trapezoid(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
        let h = (b - a) / (n - 1) as f64;
        let mut s = 0.5 * (f(a) + f(b));
        for i in 1..n - 1 {
            s += f(a + i as f64 * h);
        }
        s * h
    }

    #[test]
    fn sharp_line_is_single_node() {
        let d = DetuningDistribution::new(LineShape::SharpLine, 1).unwrap();
        assert_eq!(d.nodes(), &[0.0]);
        assert_eq!(d.weights(), &[1.0]);
    }

    #[test]
    fn gaussian_symmetric_and_normalized() {
        let d = DetuningDistribution::new(LineShape::Gaussian { width: 1.0 }, 7).unwrap();
        assert!((d.weights().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        for i in 0..7 {
            assert_eq!(d.nodes()[i], -d.nodes()[6 - i]);
            assert_eq!(d.weights()[i], d.weights()[6 - i]);
        }
        assert_eq!(d.nodes()[3], 0.0);
        assert!(d.nodes().windows(2).all(|p| p[1] > p[0]));
    }

    #[test]
    fn gaussian_second_moment_matches_dense_trapezoid() {
        let width = 1.0;
        let density = |x: f64| {
            (-x * x / (2.0 * width * width)).exp() / ((2.0 * std::f64::consts::PI).sqrt() * width)
        };
        let oracle = trapezoid(|x| x * x * density(x), -12.0, 12.0, 100_000);
        let d = DetuningDistribution::new(LineShape::Gaussian { width }, 7).unwrap();
        let quad = d.integrate(|x| x * x);
        assert!((quad - oracle).abs() < 1e-6, "{quad} vs {oracle}");
        assert!((quad - 1.0).abs() < 1e-6);
    }

    #[test]
    fn lorentzian_matches_truncated_density() {
        let width = 0.7;
        let d = DetuningDistribution::new(LineShape::Lorentzian { width }, 401).unwrap();
        assert!((d.weights().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert_eq!(d.nodes()[200], 0.0);
        let support = LORENTZIAN_TRUNCATION * width;
        assert!((d.nodes()[400] - support).abs() < 1e-12);
        // Truncated, renormalized Lorentzian against a smooth test function.
        let lor = |x: f64| width / std::f64::consts::PI / (x * x + width * width);
        let norm = trapezoid(lor, -support, support, 200_001);
        let f = |x: f64| 1.0 / (1.0 + x * x);
        let oracle = trapezoid(|x| f(x) * lor(x), -support, support, 200_001) / norm;
        assert!((d.integrate(f) - oracle).abs() < 1e-4);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(DetuningDistribution::new(LineShape::Gaussian { width: 0.0 }, 7).is_err());
        assert!(DetuningDistribution::new(LineShape::Gaussian { width: -1.0 }, 7).is_err());
        assert!(DetuningDistribution::new(LineShape::Lorentzian { width: 1.0 }, 8).is_err());
        assert!(DetuningDistribution::new(LineShape::Gaussian { width: 1.0 }, 0).is_err());
        assert!(DetuningDistribution::custom(vec![1.0, 0.0], vec![0.5, 0.5]).is_err());
    }

    #[test]
    fn custom_is_renormalized() {
        let d = DetuningDistribution::custom(vec![-1.0, 0.5, 2.0], vec![1.0, 2.0, 1.0]).unwrap();
        assert!((d.weights().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert_eq!(d.shape(), LineShape::Custom);
    }
}

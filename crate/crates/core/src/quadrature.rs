//! One-dimensional quadrature rules and the shared quadrature configuration.

use serde::{Deserialize, Serialize};

use crate::error::{NilError, Result};

/// Nodes and weights of a rule for `∫_R f(x) dx ≈ Σ w_i f(x_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

/// Gauss–Hermite nodes and weights for the weight `e^{−x²}`, ascending.
///
/// Newton iteration on the orthonormal Hermite polynomial recurrence; the
/// weights are returned in log form alongside so callers can compensate for
/// the Gaussian weight without overflow.
pub fn gauss_hermite(n: usize) -> Rule {
    let (nodes, log_w) = gauss_hermite_log(n);
    Rule {
        nodes,
        weights: log_w.iter().map(|l| l.exp()).collect(),
    }
}

/// Gauss–Hermite rule with the weight folded in: `∫ f ≈ Σ w_i e^{x_i²} f(x_i)`
/// for `f` that decays like a Gaussian of unit width.
pub fn gauss_hermite_compensated(n: usize) -> Rule {
    let (nodes, log_w) = gauss_hermite_log(n);
    let weights = nodes.iter().zip(&log_w).map(|(x, l)| (l + x * x).exp()).collect();
    Rule { nodes, weights }
}

fn gauss_hermite_log(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "Gauss-Hermite order must be positive");
    let pim4 = std::f64::consts::PI.powf(-0.25);
    let nf = n as f64;
    let mut roots = vec![0.0; n];
    let mut logw = vec![0.0; n];
    let m = n.div_ceil(2);
    let mut z = 0.0f64;
    for i in 0..m {
        z = match i {
            0 => (2.0 * nf + 1.0).sqrt() - 1.85575 * (2.0 * nf + 1.0).powf(-1.0 / 6.0),
            1 => z - 1.14 * nf.powf(0.426) / z,
            2 => 1.86 * z - 0.86 * roots[0],
            3 => 1.91 * z - 0.91 * roots[1],
            _ => 2.0 * z - roots[i - 2],
        };
        let mut pp = 0.0;
        for _ in 0..100 {
            let (p1, p2) = hermite_poly_pair(n, z, pim4);
            pp = (2.0 * nf).sqrt() * p2;
            let dz = p1 / pp;
            z -= dz;
            if dz.abs() <= 1e-15 * z.abs().max(1.0) {
                break;
            }
        }
        let (_, p2) = hermite_poly_pair(n, z, pim4);
        pp = if p2 != 0.0 { (2.0 * nf).sqrt() * p2 } else { pp };
        roots[i] = z;
        roots[n - 1 - i] = -z;
        let lw = std::f64::consts::LN_2 - 2.0 * pp.abs().ln();
        logw[i] = lw;
        logw[n - 1 - i] = lw;
    }
    // Ascending order.
    roots.reverse();
    logw.reverse();
    if n % 2 == 1 {
        roots[n / 2] = 0.0;
    }
    (roots, logw)
}

/// Orthonormal Hermite polynomials `(p_n(z), p_{n−1}(z))` w.r.t. `e^{−x²}`.
fn hermite_poly_pair(n: usize, z: f64, pim4: f64) -> (f64, f64) {
    let mut p1 = pim4;
    let mut p2 = 0.0;
    for j in 1..=n {
        let p3 = p2;
        p2 = p1;
        let jf = j as f64;
        p1 = z * (2.0 / jf).sqrt() * p2 - ((jf - 1.0) / jf).sqrt() * p3;
    }
    (p1, p2)
}

/// Composite trapezoid rule on `[−half_width, half_width]` with `points` nodes.
pub fn trapezoid(points: usize, half_width: f64) -> Rule {
    assert!(points >= 2, "trapezoid needs at least two points");
    let h = 2.0 * half_width / (points - 1) as f64;
    let nodes = (0..points).map(|i| -half_width + h * i as f64).collect();
    let mut weights = vec![h; points];
    weights[0] *= 0.5;
    weights[points - 1] *= 0.5;
    Rule { nodes, weights }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    GaussHermite,
    Trapezoid,
}

/// Quadrature configuration for one axis.
///
/// For `Trapezoid`, `box_half_width` is the truncation box. For
/// `GaussHermite`, it is the length scale `s`: nodes are `center + s·x_i`, so
/// the rule suits integrands decaying like `e^{−(x/s)²}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub scheme: Scheme,
    pub points: usize,
    pub box_half_width: f64,
    #[serde(default)]
    pub center: f64,
    /// Relative size an integrand may keep at the outermost nodes.
    #[serde(default = "default_edge_tol")]
    pub edge_tol: f64,
}

fn default_edge_tol() -> f64 {
    1e-6
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec::trapezoid(401, 20.0)
    }
}

impl QuadratureSpec {
    pub fn trapezoid(points: usize, box_half_width: f64) -> Self {
        QuadratureSpec {
            scheme: Scheme::Trapezoid,
            points,
            box_half_width,
            center: 0.0,
            edge_tol: default_edge_tol(),
        }
    }

    pub fn gauss_hermite(points: usize, scale: f64) -> Self {
        QuadratureSpec {
            scheme: Scheme::GaussHermite,
            points,
            box_half_width: scale,
            center: 0.0,
            edge_tol: default_edge_tol(),
        }
    }

    pub fn with_center(mut self, center: f64) -> Self {
        self.center = center;
        self
    }

    pub fn with_edge_tol(mut self, edge_tol: f64) -> Self {
        self.edge_tol = edge_tol;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.points < 2 {
            return Err(NilError::invalid("quadrature order must be at least 2"));
        }
        if !(self.box_half_width > 0.0) || !self.box_half_width.is_finite() {
            return Err(NilError::invalid("quadrature box must be positive and finite"));
        }
        if !(self.edge_tol >= 0.0) || !self.center.is_finite() {
            return Err(NilError::invalid("quadrature edge tolerance and center must be finite"));
        }
        Ok(())
    }

    pub fn rule(&self) -> Result<Rule> {
        self.validate()?;
        let base = match self.scheme {
            Scheme::Trapezoid => trapezoid(self.points, self.box_half_width),
            Scheme::GaussHermite => {
                let r = gauss_hermite_compensated(self.points);
                let s = self.box_half_width;
                Rule {
                    nodes: r.nodes.iter().map(|x| s * x).collect(),
                    weights: r.weights.iter().map(|w| s * w).collect(),
                }
            }
        };
        Ok(Rule {
            nodes: base.nodes.iter().map(|x| x + self.center).collect(),
            weights: base.weights,
        })
    }

    /// Errors with `Truncation` if the magnitudes at the first or last node
    /// exceed `edge_tol` times the maximum over all nodes.
    pub fn check_edges(&self, magnitudes: &[f64]) -> Result<()> {
        check_edges(magnitudes, self.edge_tol)
    }
}

pub fn check_edges(magnitudes: &[f64], edge_tol: f64) -> Result<()> {
    let Some((&first, &last)) = magnitudes.first().zip(magnitudes.last()) else {
        return Ok(());
    };
    let max = magnitudes.iter().cloned().fold(0.0, f64::max);
    let edge = first.max(last);
    if edge > edge_tol * max {
        return Err(NilError::Truncation {
            edge: edge / max,
            threshold: edge_tol,
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_hermite_small_orders() {
        let r = gauss_hermite(2);
        assert!((r.nodes[1] - 0.5f64.sqrt()).abs() < 1e-14);
        assert!((r.weights[0] - std::f64::consts::PI.sqrt() / 2.0).abs() < 1e-14);
        let r = gauss_hermite(3);
        assert_eq!(r.nodes[1], 0.0);
        assert!((r.nodes[2] - 1.5f64.sqrt()).abs() < 1e-14);
        assert!((r.weights[1] - 2.0 * std::f64::consts::PI.sqrt() / 3.0).abs() < 1e-14);
    }

    #[test]
    fn gauss_hermite_moments() {
        // ∫ x^{2p} e^{−x²} = Γ(p + ½)
        for &n in &[10usize, 40, 80, 150] {
            let r = gauss_hermite(n);
            assert!(r.nodes.windows(2).all(|w| w[0] < w[1]));
            let mut gamma = std::f64::consts::PI.sqrt();
            for p in 0..n.min(20) {
                let got = r.integrate(|x| x.powi(2 * p as i32));
                assert!(
                    (got - gamma).abs() <= 1e-12 * gamma,
                    "n={n} p={p}: {got} vs {gamma}"
                );
                assert!(r.integrate(|x| x.powi(2 * p as i32 + 1)).abs() < 1e-10 * gamma.max(1.0));
                gamma *= p as f64 + 0.5;
            }
        }
    }

    #[test]
    fn compensated_rule_integrates_gaussians() {
        let r = gauss_hermite_compensated(80);
        let got = r.integrate(|x| (-0.5 * x * x).exp());
        assert!((got - (2.0 * std::f64::consts::PI).sqrt()).abs() < 1e-13);
        let q = QuadratureSpec::gauss_hermite(60, 3.0).with_center(1.0);
        let got = q.rule().unwrap().integrate(|x| (-(x - 1.0).powi(2) / 9.0).exp());
        assert!((got - 3.0 * std::f64::consts::PI.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn trapezoid_is_spectral_on_gaussians() {
        let r = trapezoid(401, 20.0);
        let got = r.integrate(|x| (-x * x).exp());
        assert!((got - std::f64::consts::PI.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn edge_detection() {
        let q = QuadratureSpec::trapezoid(5, 1.0);
        assert!(q.check_edges(&[0.0, 0.5, 1.0, 0.5, 0.0]).is_ok());
        assert!(matches!(
            q.check_edges(&[0.1, 0.5, 1.0, 0.5, 0.0]),
            Err(NilError::Truncation { .. })
        ));
        assert!(q.check_edges(&[0.0; 5]).is_ok());
        assert!(QuadratureSpec::trapezoid(1, 1.0).validate().is_err());
    }
}

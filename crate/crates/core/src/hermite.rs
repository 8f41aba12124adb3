//! Normalized Hermite functions, the dilation `U(r)`, Laguerre polynomials and
//! the diagonal special Hermite functions.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{check_len, NilError, Result};

/// Default finite-difference step for [`recurrence_check`].
pub const DEFAULT_RECURRENCE_STEP: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MultiIndex(pub Vec<usize>);

impl MultiIndex {
    pub fn new(alpha: Vec<usize>) -> Self {
        MultiIndex(alpha)
    }

    pub fn zeros(n: usize) -> Self {
        MultiIndex(vec![0; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `|α| = Σ α_j`.
    pub fn order(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    /// `(2α_j + 1)` as reals.
    pub fn odd_weights(&self) -> Vec<f64> {
        self.0.iter().map(|&a| 2.0 * a as f64 + 1.0).collect()
    }

    /// All multi-indices of length `n` with `|α| ≤ max_order`, sorted by order
    /// and then lexicographically.
    pub fn up_to(n: usize, max_order: usize) -> Vec<MultiIndex> {
        fn rec(n: usize, budget: usize, prefix: &mut Vec<usize>, out: &mut Vec<MultiIndex>) {
            if prefix.len() == n {
                out.push(MultiIndex(prefix.clone()));
                return;
            }
            for a in 0..=budget {
                prefix.push(a);
                rec(n, budget - a, prefix, out);
                prefix.pop();
            }
        }
        let mut out = Vec::new();
        rec(n, max_order, &mut Vec::with_capacity(n), &mut out);
        out.sort_by(|a, b| a.order().cmp(&b.order()).then_with(|| a.0.cmp(&b.0)));
        out
    }
}

impl From<Vec<usize>> for MultiIndex {
    fn from(v: Vec<usize>) -> Self {
        MultiIndex(v)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DilationVector(Vec<f64>);

impl DilationVector {
    pub fn new(r: Vec<f64>) -> Result<Self> {
        if r.iter().any(|x| !(*x > 0.0) || !x.is_finite()) {
            return Err(NilError::invalid("dilation entries must be positive and finite"));
        }
        Ok(DilationVector(r))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Values `φ_0(x), …, φ_p(x)` of the L²-normalized Hermite functions.
pub fn hermite_functions(p: usize, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(p + 1);
    let mut prev = 0.0;
    let mut cur = std::f64::consts::PI.powf(-0.25) * (-0.5 * x * x).exp();
    out.push(cur);
    for q in 0..p {
        let qf = q as f64;
        let next = (2.0 / (qf + 1.0)).sqrt() * x * cur - (qf / (qf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
        out.push(cur);
    }
    out
}

/// `φ_p(x)`.
pub fn hermite_function(p: usize, x: f64) -> f64 {
    let mut prev = 0.0;
    let mut cur = std::f64::consts::PI.powf(-0.25) * (-0.5 * x * x).exp();
    for q in 0..p {
        let qf = q as f64;
        let next = (2.0 / (qf + 1.0)).sqrt() * x * cur - (qf / (qf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// `∏_j φ_{α_j}(ξ_j)`.
pub fn hermite_eval(alpha: &MultiIndex, xi: &[f64]) -> Result<f64> {
    check_len("multi-index", xi.len(), alpha.len())?;
    Ok(alpha
        .0
        .iter()
        .zip(xi)
        .map(|(&a, &x)| hermite_function(a, x))
        .product())
}

/// `(U(r)φ_α)(ξ) = ∏ r_j^{1/4} φ_{α_j}(√r_j ξ_j)`.
pub fn dilate(r: &DilationVector, alpha: &MultiIndex, xi: &[f64]) -> Result<f64> {
    check_len("dilation vector", xi.len(), r.len())?;
    check_len("multi-index", xi.len(), alpha.len())?;
    Ok(r
        .0
        .iter()
        .zip(&alpha.0)
        .zip(xi)
        .map(|((&rj, &a), &x)| rj.powf(0.25) * hermite_function(a, rj.sqrt() * x))
        .product())
}

/// Laguerre polynomial `L_p(x)` by its three-term recurrence.
pub fn laguerre(p: usize, x: f64) -> f64 {
    let mut prev = 1.0;
    if p == 0 {
        return prev;
    }
    let mut cur = 1.0 - x;
    for q in 1..p {
        let qf = q as f64;
        let next = ((2.0 * qf + 1.0 - x) * cur - qf * prev) / (qf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// One-variable factor `L_a(r²/2) e^{−r²/4}` with `r² = x² + y²`.
pub fn special_hermite_factor(a: usize, x: f64, y: f64) -> f64 {
    let r2 = x * x + y * y;
    laguerre(a, 0.5 * r2) * (-0.25 * r2).exp()
}

/// `Φ_αα(z) = ∏_j L_{α_j}(|z_j|²/2) e^{−|z_j|²/4}` with `z_j = x_j + i y_j`.
///
/// Normalized so that `Φ_αα(z) = (π(x, y, 0) φ_α, φ_α)` for the unit-weight
/// Schrödinger representation; the value is real.
pub fn special_hermite_diag(alpha: &MultiIndex, z: &[Complex64]) -> Result<Complex64> {
    check_len("multi-index", z.len(), alpha.len())?;
    let v: f64 = alpha
        .0
        .iter()
        .zip(z)
        .map(|(&a, zj)| special_hermite_factor(a, zj.re, zj.im))
        .product();
    Ok(Complex64::new(v, 0.0))
}

/// `Φ^d_αα(x, y) = Φ_αα(√d x + i √d y)` evaluated on real frame coordinates.
pub fn special_hermite_diag_dilated(d: &[f64], alpha: &MultiIndex, x: &[f64], y: &[f64]) -> Result<f64> {
    check_len("multi-index", d.len(), alpha.len())?;
    check_len("frame x-coordinates", d.len(), x.len())?;
    check_len("frame y-coordinates", d.len(), y.len())?;
    Ok((0..d.len())
        .map(|j| {
            let s = d[j].sqrt();
            special_hermite_factor(alpha.0[j], s * x[j], s * y[j])
        })
        .product())
}

/// Residual of `(x_j∂_{x_j} + y_j∂_{y_j}) Φ_αα = (α_j+1) Φ_{α+e_j} − α_j Φ_{α−e_j} − Φ_αα`.
///
/// The left side uses central differences with `step`.
pub fn recurrence_check(alpha: &MultiIndex, j: usize, z: &[Complex64], step: f64) -> Result<f64> {
    check_len("multi-index", z.len(), alpha.len())?;
    if j >= alpha.len() {
        return Err(NilError::invalid(format!(
            "coordinate index {j} out of range for n = {}",
            alpha.len()
        )));
    }
    if !(step > 0.0) {
        return Err(NilError::invalid("finite-difference step must be positive"));
    }
    let eval = |dz: Complex64| -> f64 {
        let mut w = z.to_vec();
        w[j] += dz;
        special_hermite_diag(alpha, &w).map(|c| c.re).unwrap_or(f64::NAN)
    };
    let dx = (eval(Complex64::new(step, 0.0)) - eval(Complex64::new(-step, 0.0))) / (2.0 * step);
    let dy = (eval(Complex64::new(0.0, step)) - eval(Complex64::new(0.0, -step))) / (2.0 * step);
    let lhs = z[j].re * dx + z[j].im * dy;

    let aj = alpha.0[j];
    let mut up = alpha.clone();
    up.0[j] += 1;
    let mut rhs = (aj as f64 + 1.0) * special_hermite_diag(&up, z)?.re - special_hermite_diag(alpha, z)?.re;
    if aj > 0 {
        let mut down = alpha.clone();
        down.0[j] -= 1;
        rhs -= aj as f64 * special_hermite_diag(&down, z)?.re;
    }
    Ok((lhs - rhs).abs())
}

//! Sublaplacian eigenfunctions `h_λ`, chains `f_k` with `L f_k = f_{k+1}`,
//! their sup norms, the aggregates `F_α = ∫ h_λ φ(λ) dλ` and a windowed
//! spectral-concentration probe.
//!
//! For a functional `λ` and multi-index `α`, set
//! `λ̃ = |λ| / ((2α+1)·d(λ)) · λ`. Then
//! `h_λ(v, z) = Φ^{d(λ̃)}_αα(x, y) e^{iλ̃(z)}`, with `(x, y)` the frame
//! coordinates of `v` at `λ̃`, satisfies `L h_λ = −|λ| h_λ`.

use std::ops::RangeInclusive;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{check_len, NilError, Result};
use crate::hermite::{special_hermite_diag_dilated, MultiIndex};
use crate::invariant_ops::{sublaplacian_apply, PointEvaluator};
use crate::nilgroup::{GroupElement, TwoStepAlgebra};
use crate::quadrature::trapezoid;
use crate::sampling::Halton;
use crate::schrodinger_rep::Grid;
use crate::symplectic::{frame, partial_frame, CentralFunctional, SymplecticFrame};

/// How frames are built for eigenfunctions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrameMode {
    /// Nondegenerate `B_λ` required.
    Full,
    /// Frame of the nondegenerate part; the radical is ignored.
    Partial,
}

fn frame_for(a: &TwoStepAlgebra, lambda: &CentralFunctional, tol: f64, mode: FrameMode) -> Result<SymplecticFrame> {
    match mode {
        FrameMode::Full => frame(a, lambda, tol),
        FrameMode::Partial => Ok(partial_frame(a, lambda, tol)?.frame),
    }
}

fn weighted_d(alpha: &MultiIndex, d: &[f64]) -> f64 {
    alpha.odd_weights().iter().zip(d).map(|(w, d)| w * d).sum()
}

/// `λ̃` together with the residuals of the identities it must satisfy.
#[derive(Debug, Clone, PartialEq)]
pub struct LambdaTilde {
    pub lambda_tilde: CentralFunctional,
    /// Frame at `λ̃`.
    pub frame: SymplecticFrame,
    /// `max_l |λ_l − ((2α+1)·d(λ̃)/|λ̃|) λ̃_l|`
    pub inverse_residual: f64,
    /// `|(2α+1)·d(λ̃) − |λ||`
    pub eigenvalue_residual: f64,
}

pub fn lambda_tilde(a: &TwoStepAlgebra, lambda: &CentralFunctional, alpha: &MultiIndex, tol: f64) -> Result<LambdaTilde> {
    lambda_tilde_with(a, lambda, alpha, tol, FrameMode::Full)
}

pub fn lambda_tilde_with(
    a: &TwoStepAlgebra,
    lambda: &CentralFunctional,
    alpha: &MultiIndex,
    tol: f64,
    mode: FrameMode,
) -> Result<LambdaTilde> {
    let base = frame_for(a, lambda, tol, mode)?;
    check_len("multi-index", base.n(), alpha.len())?;
    let norm = lambda.norm();
    let lt = lambda.scaled(norm / weighted_d(alpha, &base.d));
    let fr = frame_for(a, &lt, tol, mode)?;
    check_len("frame rank at lambda tilde", base.n(), fr.n())?;
    let wd = weighted_d(alpha, &fr.d);
    let back = lt.scaled(wd / lt.norm());
    let inverse_residual = back
        .0
        .iter()
        .zip(&lambda.0)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    Ok(LambdaTilde {
        lambda_tilde: lt,
        frame: fr,
        inverse_residual,
        eigenvalue_residual: (wd - norm).abs(),
    })
}

/// The eigenfunction `h_λ` for a fixed `(λ, α)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Eigenfunction {
    pub lambda: CentralFunctional,
    pub alpha: MultiIndex,
    pub lambda_tilde: CentralFunctional,
    /// Frame at `λ̃`.
    pub frame: SymplecticFrame,
}

impl Eigenfunction {
    pub fn new(a: &TwoStepAlgebra, lambda: &CentralFunctional, alpha: &MultiIndex, tol: f64) -> Result<Self> {
        Self::with_mode(a, lambda, alpha, tol, FrameMode::Full)
    }

    pub fn with_mode(
        a: &TwoStepAlgebra,
        lambda: &CentralFunctional,
        alpha: &MultiIndex,
        tol: f64,
        mode: FrameMode,
    ) -> Result<Self> {
        check_len("central functional", a.k(), lambda.0.len())?;
        let lt = lambda_tilde_with(a, lambda, alpha, tol, mode)?;
        Ok(Eigenfunction {
            lambda: lambda.clone(),
            alpha: alpha.clone(),
            lambda_tilde: lt.lambda_tilde,
            frame: lt.frame,
        })
    }

    /// `−|λ|`.
    pub fn eigenvalue(&self) -> f64 {
        -self.lambda.norm()
    }
}

impl PointEvaluator for Eigenfunction {
    fn eval(&self, v: &[f64], z: &[f64]) -> Complex64 {
        let (x, y) = self.frame.coords(v);
        let amp = special_hermite_diag_dilated(&self.frame.d, &self.alpha, &x, &y).unwrap_or(f64::NAN);
        Complex64::from_polar(amp, self.lambda_tilde.dot(z))
    }
}

/// `h_λ` as a shared evaluator.
pub fn h_lambda(a: &TwoStepAlgebra, lambda: &CentralFunctional, alpha: &MultiIndex, tol: f64) -> Result<Arc<Eigenfunction>> {
    Ok(Arc::new(Eigenfunction::new(a, lambda, alpha, tol)?))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainTerm {
    pub lambda: CentralFunctional,
    pub alpha: MultiIndex,
    pub coeff: Complex64,
}

/// Spectral recipe `f_k = Σ coeff · (−|λ|)^k · h_λ`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ChainSpec {
    pub terms: Vec<ChainTerm>,
}

/// A chain with its eigenfunctions built once.
#[derive(Debug, Clone)]
pub struct Chain {
    terms: Vec<(Complex64, f64, Arc<Eigenfunction>)>,
}

impl Chain {
    pub fn new(a: &TwoStepAlgebra, spec: &ChainSpec, tol: f64) -> Result<Self> {
        Self::with_mode(a, spec, tol, FrameMode::Full)
    }

    pub fn with_mode(a: &TwoStepAlgebra, spec: &ChainSpec, tol: f64, mode: FrameMode) -> Result<Self> {
        let mut terms = Vec::with_capacity(spec.terms.len());
        for t in &spec.terms {
            if !t.coeff.re.is_finite() || !t.coeff.im.is_finite() {
                return Err(NilError::invalid("chain coefficients must be finite"));
            }
            let h = Eigenfunction::with_mode(a, &t.lambda, &t.alpha, tol, mode)?;
            terms.push((t.coeff, t.lambda.norm(), Arc::new(h)));
        }
        Ok(Chain { terms })
    }

    /// `f_k`.
    pub fn element(&self, k: i32) -> ChainElement {
        ChainElement {
            k,
            terms: self
                .terms
                .iter()
                .map(|(c, s, h)| (c * (-s).powi(k), h.clone()))
                .collect(),
        }
    }

    /// The distinct `|λ|` values of the terms.
    pub fn spectral_radii(&self) -> Vec<f64> {
        self.terms.iter().map(|t| t.1).collect()
    }

    pub fn eigenfunctions(&self) -> impl Iterator<Item = (Complex64, &Arc<Eigenfunction>)> {
        self.terms.iter().map(|(c, _, h)| (*c, h))
    }
}

/// One element `f_k` of a chain.
#[derive(Debug, Clone)]
pub struct ChainElement {
    pub k: i32,
    terms: Vec<(Complex64, Arc<Eigenfunction>)>,
}

impl PointEvaluator for ChainElement {
    fn eval(&self, v: &[f64], z: &[f64]) -> Complex64 {
        self.terms.iter().map(|(c, h)| c * h.eval(v, z)).sum()
    }
}

pub fn build_chain(a: &TwoStepAlgebra, spec: &ChainSpec, k_range: RangeInclusive<i32>, tol: f64) -> Result<Vec<ChainElement>> {
    let chain = Chain::new(a, spec, tol)?;
    Ok(k_range.map(|k| chain.element(k)).collect())
}

/// `max_p |L f_k(p) − f_{k+1}(p)|`.
pub fn chain_relation_check(
    a: &TwoStepAlgebra,
    chain: &Chain,
    k: i32,
    points: &[GroupElement],
    h: f64,
) -> Result<f64> {
    let fk = chain.element(k);
    let next = chain.element(k + 1);
    let mut worst = 0.0f64;
    for p in points {
        let lf = sublaplacian_apply(a, &fk, p, h)?;
        worst = worst.max((lf - next.eval_at(p)).norm());
    }
    Ok(worst)
}

/// Sampling box and budget for [`sup_norm_estimate`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupNormOptions {
    pub m: usize,
    pub k: usize,
    pub v_half_width: f64,
    pub z_half_width: f64,
    pub samples: usize,
    pub seed: u64,
}

impl SupNormOptions {
    pub fn for_algebra(a: &TwoStepAlgebra, seed: u64) -> Self {
        SupNormOptions {
            m: a.m(),
            k: a.k(),
            v_half_width: 4.0,
            z_half_width: 4.0,
            samples: 512,
            seed,
        }
    }
}

/// Lower bound for `sup |f|`: the box center, Halton points, then coordinate
/// search around the best candidate.
pub fn sup_norm_estimate(f: &dyn PointEvaluator, opts: &SupNormOptions) -> f64 {
    let (m, k) = (opts.m, opts.k);
    let dim = m + k;
    let widths: Vec<f64> = (0..dim)
        .map(|i| if i < m { opts.v_half_width } else { opts.z_half_width })
        .collect();
    let eval = |p: &[f64]| f.eval(&p[..m], &p[m..]).norm();
    let mut best_p = vec![0.0; dim];
    let mut best = eval(&best_p);
    for u in Halton::new(dim, opts.seed).take(opts.samples) {
        let p: Vec<f64> = u.iter().zip(&widths).map(|(u, w)| (2.0 * u - 1.0) * w).collect();
        let val = eval(&p);
        if val > best {
            best = val;
            best_p = p;
        }
    }
    let mut step = 0.1;
    while step > 1e-7 {
        let mut improved = false;
        for i in 0..dim {
            for sgn in [1.0, -1.0] {
                let mut p = best_p.clone();
                p[i] = (p[i] + sgn * step * widths[i]).clamp(-widths[i], widths[i]);
                let val = eval(&p);
                if val > best {
                    best = val;
                    best_p = p;
                    improved = true;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    best
}

/// Compactly supported bump `exp(1 − (1 − ρ²)^{−order})`, `ρ = |λ − c| / r`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BumpSpec {
    pub center: Vec<f64>,
    pub radius: f64,
    #[serde(default = "default_order")]
    pub order: u32,
}

fn default_order() -> u32 {
    1
}

impl BumpSpec {
    pub fn new(center: Vec<f64>, radius: f64) -> Result<Self> {
        let b = BumpSpec { center, radius, order: 1 };
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.radius > 0.0) || !self.radius.is_finite() {
            return Err(NilError::invalid("bump radius must be positive"));
        }
        if self.order == 0 {
            return Err(NilError::invalid("bump order must be at least 1"));
        }
        if self.center.iter().any(|c| !c.is_finite()) {
            return Err(NilError::invalid("bump center must be finite"));
        }
        Ok(())
    }

    pub fn value(&self, lambda: &[f64]) -> f64 {
        let r2: f64 = lambda
            .iter()
            .zip(&self.center)
            .map(|(l, c)| (l - c).powi(2))
            .sum::<f64>()
            / (self.radius * self.radius);
        if r2 >= 1.0 {
            return 0.0;
        }
        (1.0 - (1.0 - r2).powi(-(self.order as i32))).exp()
    }

    /// Tensor trapezoid nodes over the bounding box with nonzero bump value,
    /// as `(λ, weight · φ(λ))`.
    pub fn weighted_nodes(&self, points: usize) -> Vec<(Vec<f64>, f64)> {
        let k = self.center.len();
        let rule = trapezoid(points.max(2), self.radius);
        let mut out = Vec::new();
        let mut idx = vec![0usize; k];
        loop {
            let lambda: Vec<f64> = idx.iter().enumerate().map(|(l, &i)| self.center[l] + rule.nodes[i]).collect();
            let w: f64 = idx.iter().map(|&i| rule.weights[i]).product();
            let val = self.value(&lambda);
            if val > 0.0 {
                out.push((lambda, w * val));
            }
            let mut a = k;
            loop {
                if a == 0 {
                    return out;
                }
                a -= 1;
                idx[a] += 1;
                if idx[a] < rule.len() {
                    break;
                }
                idx[a] = 0;
            }
        }
    }
}

/// Default λ-quadrature points per axis for [`build_f_alpha`].
pub const DEFAULT_LAMBDA_POINTS: usize = 41;

/// `Σ w_i h_{λ_i}`: a quadrature of `∫ h_λ w(λ) dλ`.
#[derive(Debug, Clone)]
pub struct SpectralAggregate {
    pub nodes: Vec<(f64, Eigenfunction)>,
}

impl PointEvaluator for SpectralAggregate {
    fn eval(&self, v: &[f64], z: &[f64]) -> Complex64 {
        self.nodes.iter().map(|(w, h)| *w * h.eval(v, z)).sum()
    }
}

/// `F_α = ∫ h_λ φ(λ) dλ` by tensor trapezoid over the bump's bounding box.
pub fn build_f_alpha(
    a: &TwoStepAlgebra,
    alpha: &MultiIndex,
    phi: &BumpSpec,
    points: usize,
    tol: f64,
) -> Result<SpectralAggregate> {
    phi.validate()?;
    check_len("bump center", a.k(), phi.center.len())?;
    let mut nodes = Vec::new();
    for (lambda, w) in phi.weighted_nodes(points) {
        let h = Eigenfunction::new(a, &CentralFunctional(lambda), alpha, tol)?;
        nodes.push((w, h));
    }
    Ok(SpectralAggregate { nodes })
}

/// Settings for [`concentration_probe`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeOptions {
    pub l_max: usize,
    /// Half-width `R` of the cube window `|t_l| ≤ R`.
    pub window: f64,
    /// `v`-grid for the spatial integral.
    pub v_box: f64,
    pub v_points: usize,
    pub lambda_points: usize,
    pub edge_tol: f64,
    pub tol: f64,
    /// Multi-index of the kernel eigenfunctions; zero if unset.
    #[serde(default)]
    pub kernel_alpha: Option<MultiIndex>,
}

impl Default for ProbeOptions {
    fn default() -> Self {
        ProbeOptions {
            l_max: 4,
            window: 10.0,
            v_box: 12.0,
            v_points: 61,
            lambda_points: DEFAULT_LAMBDA_POINTS,
            edge_tol: 1e-6,
            tol: crate::symplectic::DEFAULT_NONDEGENERACY_TOL,
            kernel_alpha: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeRow {
    pub l: usize,
    pub magnitude: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeReport {
    pub table: Vec<ProbeRow>,
    /// `|P_{l_max}| / |P_{l_max − 1}|`.
    pub ratio: f64,
}

/// `∫_{−R}^{R} e^{iωt} dt`.
fn window_integral(omega: f64, r: f64) -> f64 {
    if (omega * r).abs() < 1e-8 {
        2.0 * r
    } else {
        2.0 * (omega * r).sin() / omega
    }
}

/// Windowed bilinear pairing `P_l = ∫_{|t_l| ≤ R} ∫_v f_l(v, t) K(v, t) dv dt`,
/// `K = ∫ h_λ ψ(λ) φ(λ) dλ`, for `l = 0..=l_max`.
///
/// The `t`-integral of the product of characters is done in closed form over
/// the cube window; the `v`-integral by trapezoid on the `v`-grid.
pub fn concentration_probe(
    a: &TwoStepAlgebra,
    spec: &ChainSpec,
    phi: &BumpSpec,
    psi: &BumpSpec,
    opts: &ProbeOptions,
) -> Result<ProbeReport> {
    phi.validate()?;
    psi.validate()?;
    check_len("bump center", a.k(), phi.center.len())?;
    check_len("bump center", a.k(), psi.center.len())?;
    if opts.l_max == 0 {
        return Err(NilError::invalid("probe needs l_max >= 1"));
    }
    let chain = Chain::new(a, spec, opts.tol)?;
    let grid = Grid::new(a.m(), opts.v_box, opts.v_points)?;
    let points: Vec<Vec<f64>> = (0..grid.len()).map(|i| grid.point(i)).collect();
    let zero_z = vec![0.0; a.k()];
    let edge: Vec<bool> = (0..grid.len())
        .map(|i| grid.unflatten(i).iter().any(|&j| j == 0 || j == grid.points - 1))
        .collect();

    let kernel_alpha = opts.kernel_alpha.clone().unwrap_or_else(|| MultiIndex::zeros(a.m() / 2));
    // Kernel nodes λ with weight ψφ; skip nodes where ψ vanishes.
    let mut kernel = Vec::new();
    for (lambda, w) in phi.weighted_nodes(opts.lambda_points) {
        let s = psi.value(&lambda);
        if s > 0.0 {
            let h = Eigenfunction::new(a, &CentralFunctional(lambda), &kernel_alpha, opts.tol)?;
            kernel.push((w * s, h));
        }
    }

    let vol = grid.cell_volume();
    let mut q = Vec::new();
    let (mut edge_max, mut max) = (0.0f64, 0.0f64);
    for (c, hmu) in chain.eigenfunctions() {
        let mu_vals: Vec<Complex64> = points.iter().map(|p| hmu.eval(p, &zero_z)).collect();
        let mut acc = Complex64::new(0.0, 0.0);
        for (w, hl) in &kernel {
            let mut spatial = Complex64::new(0.0, 0.0);
            for (i, p) in points.iter().enumerate() {
                let val = mu_vals[i] * hl.eval(p, &zero_z);
                let mag = val.norm();
                max = max.max(mag);
                if edge[i] {
                    edge_max = edge_max.max(mag);
                }
                spatial += val;
            }
            let win: f64 = hmu
                .lambda_tilde
                .0
                .iter()
                .zip(&hl.lambda_tilde.0)
                .map(|(m, l)| window_integral(m + l, opts.window))
                .product();
            acc += *w * win * spatial * vol;
        }
        q.push((c, hmu.lambda.norm(), acc));
    }
    if edge_max > opts.edge_tol * max {
        return Err(NilError::Truncation {
            edge: edge_max / max,
            threshold: opts.edge_tol,
        });
    }
    let table: Vec<ProbeRow> = (0..=opts.l_max)
        .map(|l| ProbeRow {
            l,
            magnitude: q
                .iter()
                .map(|(c, s, qj)| c * (-s).powi(l as i32) * qj)
                .sum::<Complex64>()
                .norm(),
        })
        .collect();
    let ratio = table[opts.l_max].magnitude / table[opts.l_max - 1].magnitude;
    Ok(ProbeReport { table, ratio })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling;

    fn cf(v: &[f64]) -> CentralFunctional {
        CentralFunctional(v.to_vec())
    }

    fn term(lambda: &[f64], alpha: &[usize], re: f64) -> ChainTerm {
        ChainTerm {
            lambda: cf(lambda),
            alpha: MultiIndex(alpha.to_vec()),
            coeff: Complex64::new(re, 0.0),
        }
    }

    fn random_points(a: &TwoStepAlgebra, seed: u64, n: usize, w: f64) -> Vec<GroupElement> {
        let mut rng = sampling::rng(seed);
        (0..n)
            .map(|_| GroupElement::new(sampling::uniform_vec(&mut rng, a.m(), w), sampling::uniform_vec(&mut rng, a.k(), w)))
            .collect()
    }

    #[test]
    fn lambda_tilde_examples() {
        let h = TwoStepAlgebra::heisenberg(1).unwrap();
        let lt = lambda_tilde(&h, &cf(&[2.5]), &MultiIndex(vec![0]), 1e-10).unwrap();
        assert!((lt.lambda_tilde.0[0] - 2.5).abs() < 1e-14);
        let lt = lambda_tilde(&h, &cf(&[3.0]), &MultiIndex(vec![1]), 1e-10).unwrap();
        assert!((lt.lambda_tilde.0[0] - 1.0).abs() < 1e-14);

        let f = TwoStepAlgebra::free_two_step(4).unwrap();
        let mut rng = sampling::rng(40);
        let lambda = cf(&sampling::normal_vec(&mut rng, 6));
        let lt = lambda_tilde(&f, &lambda, &MultiIndex(vec![1, 0]), 1e-10).unwrap();
        assert!(lt.inverse_residual < 1e-10 && lt.eigenvalue_residual < 1e-10);
        assert!(lambda_tilde(&h, &cf(&[0.0]), &MultiIndex(vec![0]), 1e-10).is_err());
        assert!(lambda_tilde(&h, &cf(&[1.0]), &MultiIndex(vec![0, 0]), 1e-10).is_err());
    }

    #[test]
    fn h_lambda_basics() {
        let h = TwoStepAlgebra::heisenberg(1).unwrap();
        let e = h_lambda(&h, &cf(&[1.0]), &MultiIndex(vec![0]), 1e-10).unwrap();
        assert_eq!(e.eval(&[0.0, 0.0], &[0.0]), Complex64::new(1.0, 0.0));
        for p in random_points(&h, 1, 50, 5.0) {
            assert!(e.eval_at(&p).norm() <= 1.0 + 1e-12);
        }
        for p in random_points(&h, 2, 20, 2.0) {
            let lh = sublaplacian_apply(&h, e.as_ref(), &p, 1e-3).unwrap();
            assert!((lh + e.eval_at(&p)).norm() < 1e-5);
        }
    }

    #[test]
    fn eigen_relation_on_free_group() {
        let f = TwoStepAlgebra::free_two_step(4).unwrap();
        let mut rng = sampling::rng(41);
        for alpha in [vec![0, 0], vec![1, 0], vec![0, 2]] {
            let lambda = cf(&sampling::normal_vec(&mut rng, 6));
            let e = Eigenfunction::new(&f, &lambda, &MultiIndex(alpha), 1e-10).unwrap();
            let s = lambda.norm();
            for p in random_points(&f, 3, 10, 1.5) {
                let lh = sublaplacian_apply(&f, &e, &p, 1e-3).unwrap();
                assert!((lh - e.eigenvalue() * e.eval_at(&p)).norm() <= 1e-4 * (1.0 + s * s));
            }
        }
    }

    #[test]
    fn partial_frame_eigenfunctions_on_non_mw_group() {
        let f3 = TwoStepAlgebra::free_two_step(3).unwrap();
        let lambda = cf(&[0.6, -0.3, 0.9]);
        let e = Eigenfunction::with_mode(&f3, &lambda, &MultiIndex(vec![1]), 1e-10, FrameMode::Partial).unwrap();
        for p in random_points(&f3, 5, 10, 1.5) {
            let lh = sublaplacian_apply(&f3, &e, &p, 1e-3).unwrap();
            assert!((lh - e.eigenvalue() * e.eval_at(&p)).norm() < 1e-5);
        }
        assert!(Eigenfunction::new(&f3, &lambda, &MultiIndex(vec![1]), 1e-10).is_err());
    }

    #[test]
    fn chain_scaling_and_relation() {
        let h = TwoStepAlgebra::heisenberg(1).unwrap();
        let unit = ChainSpec { terms: vec![term(&[1.0], &[0], 1.0)] };
        let chain = Chain::new(&h, &unit, 1e-10).unwrap();
        let p = GroupElement::new(vec![0.3, 0.2], vec![0.5]);
        assert_eq!(chain.element(3).eval_at(&p), -chain.element(0).eval_at(&p));
        let pts = random_points(&h, 7, 10, 2.0);
        assert!(chain_relation_check(&h, &chain, 0, &pts, 1e-3).unwrap() < 1e-5);

        let empty = Chain::new(&h, &ChainSpec::default(), 1e-10).unwrap();
        assert_eq!(chain_relation_check(&h, &empty, 0, &pts, 1e-3).unwrap(), 0.0);

        let mixed = ChainSpec {
            terms: vec![term(&[1.0], &[0], 1.0), term(&[-2.0], &[1], 0.5)],
        };
        let chain = Chain::new(&h, &mixed, 1e-10).unwrap();
        for k in -2..=2 {
            assert!(chain_relation_check(&h, &chain, k, &pts, 1e-3).unwrap() < 1e-4);
        }
        assert_eq!(build_chain(&h, &mixed, -1..=1, 1e-10).unwrap().len(), 3);
    }

    #[test]
    fn sup_norm_examples() {
        let h = TwoStepAlgebra::heisenberg(1).unwrap();
        let opts = SupNormOptions::for_algebra(&h, 3);
        let e = h_lambda(&h, &cf(&[1.0]), &MultiIndex(vec![1]), 1e-10).unwrap();
        let s = sup_norm_estimate(e.as_ref(), &opts);
        assert!(s > 0.99 && s <= 1.0 + 1e-12);
        let zero = |_v: &[f64], _z: &[f64]| Complex64::new(0.0, 0.0);
        assert_eq!(sup_norm_estimate(&zero, &opts), 0.0);

        let spec = ChainSpec { terms: vec![term(&[2.0], &[0], 1.0)] };
        let chain = Chain::new(&h, &spec, 1e-10).unwrap();
        let est: Vec<f64> = (-3..=3).map(|k| sup_norm_estimate(&chain.element(k), &opts)).collect();
        for w in est.windows(2) {
            assert!(((w[1] / w[0]).log2() - 1.0).abs() < 1e-6);
        }
    }

    #[test]
    fn bounded_chain_with_two_directions() {
        let f = TwoStepAlgebra::free_two_step(4).unwrap();
        let mut rng = sampling::rng(50);
        let u1 = sampling::unit_vector(&mut rng, 6);
        let u2 = sampling::unit_vector(&mut rng, 6);
        let spec = ChainSpec {
            terms: vec![term(&u1, &[0, 0], 1.0), term(&u2, &[1, 0], 0.7)],
        };
        let chain = Chain::new(&f, &spec, 1e-10).unwrap();
        let opts = SupNormOptions { samples: 128, ..SupNormOptions::for_algebra(&f, 9) };
        let est: Vec<f64> = (-2..=2).map(|k| sup_norm_estimate(&chain.element(k), &opts)).collect();
        let (lo, hi) = est.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), v| (lo.min(*v), hi.max(*v)));
        assert!(hi / lo <= 1.01, "{est:?}");
    }

    #[test]
    fn bump_profile() {
        let b = BumpSpec::new(vec![1.0], 0.5).unwrap();
        assert_eq!(b.value(&[1.0]), 1.0);
        assert_eq!(b.value(&[1.5]), 0.0);
        assert_eq!(b.value(&[0.2]), 0.0);
        assert!(b.value(&[1.2]) > 0.0 && b.value(&[1.2]) < 1.0);
        assert!(BumpSpec::new(vec![0.0], 0.0).is_err());
        let integral: f64 = b.weighted_nodes(401).iter().map(|n| n.1).sum();
        let coarse: f64 = b.weighted_nodes(41).iter().map(|n| n.1).sum();
        assert!((integral - coarse).abs() < 1e-4 * integral);
    }

    #[test]
    fn f_alpha_basics() {
        let h = TwoStepAlgebra::heisenberg(1).unwrap();
        let bump = BumpSpec::new(vec![1.0], 0.2).unwrap();
        let fa = build_f_alpha(&h, &MultiIndex(vec![0]), &bump, 41, 1e-10).unwrap();
        let mass: f64 = bump.weighted_nodes(41).iter().map(|n| n.1).sum();
        assert!((fa.eval(&[0.0, 0.0], &[0.0]) - Complex64::new(mass, 0.0)).norm() < 1e-12);
        let (p, q) = (fa.eval(&[0.7, -0.4], &[0.3]), fa.eval(&[-0.7, 0.4], &[0.3]));
        assert!((p - q).norm() < 1e-12);
        let decay: Vec<f64> = [0.0, 10.0, 20.0, 40.0].iter().map(|t| fa.eval(&[0.0, 0.0], &[*t]).norm()).collect();
        assert!(decay.windows(2).all(|w| w[1] < w[0]), "{decay:?}");
        let bad = BumpSpec::new(vec![0.1], 0.2).unwrap();
        assert!(matches!(
            build_f_alpha(&h, &MultiIndex(vec![0]), &bad, 41, 1e-10),
            Err(NilError::Nondegeneracy { .. })
        ));
    }

    #[test]
    fn probe_ratio_and_off_sphere_decay() {
        let h = TwoStepAlgebra::heisenberg(1).unwrap();
        let phi = BumpSpec::new(vec![-1.5], 1.0).unwrap();
        let unit = ChainSpec { terms: vec![term(&[1.0], &[0], 1.0)] };
        let cover = BumpSpec::new(vec![-1.0], 0.3).unwrap();
        let r = concentration_probe(&h, &unit, &phi, &cover, &ProbeOptions::default()).unwrap();
        assert!((r.ratio - 1.0).abs() < 0.05);

        let double = ChainSpec { terms: vec![term(&[2.0], &[0], 1.0)] };
        let cover2 = BumpSpec::new(vec![-2.0], 0.3).unwrap();
        let r = concentration_probe(&h, &double, &phi, &cover2, &ProbeOptions::default()).unwrap();
        assert!((r.ratio - 2.0).abs() < 0.05);

        let off = BumpSpec::new(vec![-1.6], 0.3).unwrap();
        let at = |w: f64| {
            let o = ProbeOptions { window: w, ..ProbeOptions::default() };
            concentration_probe(&h, &unit, &phi, &off, &o).unwrap().table[0].magnitude
        };
        let (p10, p40) = (at(10.0), at(40.0));
        assert!(p40 <= 0.25 * p10, "{p10} {p40}");
    }
}

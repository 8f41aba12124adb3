//! Schrödinger-type representations `π_λ` on sampled functions, their matrix
//! coefficients, the central Fourier transform, twisted convolution, the group
//! Fourier transform on a truncated Hermite block and the scaled oscillator.
//!
//! In frame coordinates `g = (x, y, t)` the representation acts by
//!
//! ```text
//! π_λ(x, y, t) φ(ξ) = e^{iλ(t)} e^{i Σ_j d_j (x_j ξ_j − ½ x_j y_j)} φ(ξ − y).
//! ```

use std::sync::OnceLock;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{check_len, NilError, Result};
use crate::hermite::{hermite_function, DilationVector, MultiIndex};
use crate::invariant_ops::PointEvaluator;
use crate::nilgroup::{GroupElement, TwoStepAlgebra};
use crate::quadrature::{gauss_hermite_compensated, QuadratureSpec, Rule, Scheme};
use crate::symplectic::{CentralFunctional, SymplecticFrame};

/// Default Gauss–Hermite order for matrix coefficients.
pub const DEFAULT_MC_ORDER: usize = 80;

/// Uniform tensor grid `[−box, box]^dim` with `points` nodes per axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub dim: usize,
    pub box_half_width: f64,
    pub points: usize,
}

impl Grid {
    pub fn new(dim: usize, box_half_width: f64, points: usize) -> Result<Self> {
        if points < 2 {
            return Err(NilError::invalid("a grid needs at least two points per axis"));
        }
        if !(box_half_width > 0.0) || !box_half_width.is_finite() {
            return Err(NilError::invalid("grid box must be positive and finite"));
        }
        let total = (points as u128).checked_pow(dim as u32);
        if total.is_none_or(|t| t > 1 << 28) {
            return Err(NilError::invalid("grid too large"));
        }
        Ok(Grid {
            dim,
            box_half_width,
            points,
        })
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.box_half_width / (self.points - 1) as f64
    }

    pub fn len(&self) -> usize {
        self.points.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn coordinate(&self, i: usize) -> f64 {
        -self.box_half_width + self.spacing() * i as f64
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    /// Per-axis indices of a flat (row-major, axis 0 slowest) index.
    pub fn unflatten(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.dim];
        for a in (0..self.dim).rev() {
            idx[a] = flat % self.points;
            flat /= self.points;
        }
        idx
    }

    pub fn flatten(&self, idx: &[usize]) -> usize {
        idx.iter().fold(0, |acc, &i| acc * self.points + i)
    }

    pub fn point(&self, flat: usize) -> Vec<f64> {
        self.unflatten(flat).into_iter().map(|i| self.coordinate(i)).collect()
    }
}

/// Complex values on a [`Grid`].
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFunction {
    pub grid: Grid,
    pub values: Vec<Complex64>,
}

impl SampledFunction {
    pub fn new(grid: Grid, values: Vec<Complex64>) -> Result<Self> {
        check_len("sampled values", grid.len(), values.len())?;
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(NilError::invalid("sampled values must be finite"));
        }
        Ok(SampledFunction { grid, values })
    }

    pub fn from_fn<F: FnMut(&[f64]) -> Complex64>(grid: Grid, mut f: F) -> Self {
        let values = (0..grid.len()).map(|i| f(&grid.point(i))).collect();
        SampledFunction { grid, values }
    }

    pub fn zeros(grid: Grid) -> Self {
        SampledFunction {
            grid,
            values: vec![Complex64::new(0.0, 0.0); grid.len()],
        }
    }

    pub fn dim(&self) -> usize {
        self.grid.dim
    }

    pub fn norm_l2(&self) -> f64 {
        (self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.grid.cell_volume()).sqrt()
    }

    /// `Σ f conj(g) · cell volume`.
    pub fn inner(&self, other: &SampledFunction) -> Result<Complex64> {
        self.check_same_grid(other)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b.conj())
            .sum::<Complex64>()
            * self.grid.cell_volume())
    }

    pub fn max_abs_diff(&self, other: &SampledFunction) -> Result<f64> {
        self.check_same_grid(other)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn check_same_grid(&self, other: &SampledFunction) -> Result<()> {
        if self.grid != other.grid {
            return Err(NilError::invalid("sampled functions live on different grids"));
        }
        Ok(())
    }

    pub fn linear_combination(&self, a: Complex64, other: &SampledFunction, b: Complex64) -> Result<SampledFunction> {
        self.check_same_grid(other)?;
        Ok(SampledFunction {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(x, y)| a * x + b * y)
                .collect(),
        })
    }
}

/// Coordinates `(x, y, t)` of a group element in a symplectic frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameCoordinates {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub t: Vec<f64>,
}

pub fn to_frame(frame: &SymplecticFrame, g: &GroupElement) -> Result<FrameCoordinates> {
    check_len("group element v", frame.m(), g.v.len())?;
    let (x, y) = frame.coords(&g.v);
    Ok(FrameCoordinates { x, y, t: g.z.clone() })
}

pub fn from_frame(frame: &SymplecticFrame, c: &FrameCoordinates) -> Result<GroupElement> {
    check_len("frame x-coordinates", frame.n(), c.x.len())?;
    check_len("frame y-coordinates", frame.n(), c.y.len())?;
    Ok(GroupElement::new(frame.vector(&c.x, &c.y), c.t.clone()))
}

/// Output of [`apply_pi`].
#[derive(Debug, Clone, PartialEq)]
pub struct PiApplication {
    pub phi: SampledFunction,
    /// Set when the grid spacing exceeds `box/8`.
    pub coarse_grid: bool,
}

const STENCIL: i64 = 8;
const STENCIL_LOW: i64 = -3;

fn lagrange_weights(frac: f64) -> [f64; STENCIL as usize] {
    let mut w = [0.0; STENCIL as usize];
    for (o, wo) in w.iter_mut().enumerate() {
        let xo = (o as i64 + STENCIL_LOW) as f64;
        let mut p = 1.0;
        for q in 0..STENCIL {
            if q as usize == o {
                continue;
            }
            let xq = (q + STENCIL_LOW) as f64;
            p *= (frac - xq) / (xo - xq);
        }
        *wo = p;
    }
    w
}

/// Replaces `values` along `axis` by samples at `ξ − shift` (zero outside).
fn shift_axis(values: &[Complex64], grid: &Grid, axis: usize, shift: f64) -> Vec<Complex64> {
    let p = grid.points;
    let s = -shift / grid.spacing();
    let base = s.floor();
    let w = lagrange_weights(s - base);
    let base = base as i64;
    let stride = p.pow((grid.dim - 1 - axis) as u32);
    let mut out = vec![Complex64::new(0.0, 0.0); values.len()];
    for (flat, o) in out.iter_mut().enumerate() {
        let i = ((flat / stride) % p) as i64;
        let origin = flat as i64 - i * stride as i64;
        let mut acc = Complex64::new(0.0, 0.0);
        for (q, wq) in w.iter().enumerate() {
            let src = i + base + STENCIL_LOW + q as i64;
            if src >= 0 && src < p as i64 && *wq != 0.0 {
                acc += wq * values[(origin + src * stride as i64) as usize];
            }
        }
        *o = acc;
    }
    out
}

fn check_frame_weights(frame: &SymplecticFrame) -> Result<()> {
    if frame.d.iter().any(|d| !(*d > 0.0)) || frame.n() == 0 {
        let smallest = frame.d.iter().cloned().fold(f64::INFINITY, f64::min);
        return Err(NilError::Nondegeneracy {
            smallest: if smallest.is_finite() { smallest } else { 0.0 },
            tolerance: 0.0,
        });
    }
    Ok(())
}

/// `π_λ(g) φ` for `g` in frame coordinates, with `λ = frame.lambda`.
///
/// The shifted argument is interpolated with an 8-point Lagrange stencil;
/// samples outside the box count as zero.
pub fn apply_pi(frame: &SymplecticFrame, g: &FrameCoordinates, phi: &SampledFunction) -> Result<PiApplication> {
    check_frame_weights(frame)?;
    let n = frame.n();
    check_len("representation space dimension", n, phi.dim())?;
    check_len("frame x-coordinates", n, g.x.len())?;
    check_len("frame y-coordinates", n, g.y.len())?;
    check_len("central coordinates", frame.lambda.0.len(), g.t.len())?;
    let grid = phi.grid;
    let mut values = phi.values.clone();
    for (axis, &y) in g.y.iter().enumerate() {
        if y != 0.0 {
            values = shift_axis(&values, &grid, axis, y);
        }
    }
    let central = frame.lambda.dot(&g.t);
    let constant: f64 = central - 0.5 * (0..n).map(|j| frame.d[j] * g.x[j] * g.y[j]).sum::<f64>();
    // Per-axis phase tables e^{i d_j x_j ξ_j}.
    let tables: Vec<Vec<Complex64>> = (0..n)
        .map(|j| {
            (0..grid.points)
                .map(|i| Complex64::from_polar(1.0, frame.d[j] * g.x[j] * grid.coordinate(i)))
                .collect()
        })
        .collect();
    let c0 = Complex64::from_polar(1.0, constant);
    for (flat, v) in values.iter_mut().enumerate() {
        let idx = grid.unflatten(flat);
        let mut ph = c0;
        for (j, &i) in idx.iter().enumerate() {
            ph *= tables[j][i];
        }
        *v *= ph;
    }
    Ok(PiApplication {
        phi: SampledFunction { grid, values },
        coarse_grid: grid.spacing() > grid.box_half_width / 8.0,
    })
}

fn default_mc_rule() -> &'static Rule {
    static RULE: OnceLock<Rule> = OnceLock::new();
    RULE.get_or_init(|| gauss_hermite_compensated(DEFAULT_MC_ORDER))
}

/// One-variable coefficient `(π(x, y, 0) φ^d_a, φ^d_b)` for weight `d`.
///
/// With `u = √d ξ − √d y/2` the integrand becomes
/// `e^{iXu} φ_a(u − Y/2) φ_b(u + Y/2)`, `X = √d x`, `Y = √d y`, integrated by
/// the compensated Gauss–Hermite `rule`.
pub fn matrix_coefficient_1d(d: f64, a: usize, b: usize, x: f64, y: f64, rule: &Rule) -> Complex64 {
    let s = d.sqrt();
    let (xs, ys) = (s * x, s * y);
    let mut acc = Complex64::new(0.0, 0.0);
    for (&u, &w) in rule.nodes.iter().zip(&rule.weights) {
        let amp = w * hermite_function(a, u - 0.5 * ys) * hermite_function(b, u + 0.5 * ys);
        if amp != 0.0 {
            acc += amp * Complex64::from_polar(1.0, xs * u);
        }
    }
    acc
}

/// `Φ^{d(λ)}_αβ(z) = (π_λ(z, 0) φ^{d(λ)}_α, φ^{d(λ)}_β)` with
/// `z = (x_1, …, x_n, y_1, …, y_n)` in frame coordinates.
pub fn matrix_coefficient(frame: &SymplecticFrame, alpha: &MultiIndex, beta: &MultiIndex, z: &[f64]) -> Result<Complex64> {
    matrix_coefficient_with_rule(frame, alpha, beta, z, default_mc_rule())
}

pub fn matrix_coefficient_with_rule(
    frame: &SymplecticFrame,
    alpha: &MultiIndex,
    beta: &MultiIndex,
    z: &[f64],
    rule: &Rule,
) -> Result<Complex64> {
    check_frame_weights(frame)?;
    let n = frame.n();
    check_len("multi-index alpha", n, alpha.len())?;
    check_len("multi-index beta", n, beta.len())?;
    check_len("frame point", 2 * n, z.len())?;
    Ok((0..n)
        .map(|j| matrix_coefficient_1d(frame.d[j], alpha.0[j], beta.0[j], z[j], z[n + j], rule))
        .product())
}

/// Tensor product of a 1D rule over `k` axes, iterated in row-major order.
struct TensorRule<'a> {
    rule: &'a Rule,
    k: usize,
}

impl TensorRule<'_> {
    fn for_each<F: FnMut(&[usize], &[f64], f64)>(&self, mut f: F) {
        let p = self.rule.len();
        let mut idx = vec![0usize; self.k];
        let mut nodes: Vec<f64> = vec![self.rule.nodes[0]; self.k];
        loop {
            let w: f64 = idx.iter().map(|&i| self.rule.weights[i]).product();
            f(&idx, &nodes, w);
            let mut a = self.k;
            loop {
                if a == 0 {
                    return;
                }
                a -= 1;
                idx[a] += 1;
                if idx[a] < p {
                    nodes[a] = self.rule.nodes[idx[a]];
                    break;
                }
                idx[a] = 0;
                nodes[a] = self.rule.nodes[0];
            }
        }
    }
}

/// `∫ f(v, t) · phase(t) dt` at one `v`, plus (edge magnitude, max magnitude).
fn central_integral(
    f: &dyn PointEvaluator,
    v: &[f64],
    lambda: &[f64],
    rule: &Rule,
    phase_tables: &[Vec<Complex64>],
) -> (Complex64, f64, f64) {
    let k = lambda.len();
    let last = rule.len() - 1;
    let mut acc = Complex64::new(0.0, 0.0);
    let mut edge = 0.0f64;
    let mut max = 0.0f64;
    TensorRule { rule, k }.for_each(|idx, t, w| {
        let val = f.eval(v, t);
        let mag = val.norm();
        max = max.max(mag);
        if idx.iter().any(|&i| i == 0 || i == last) {
            edge = edge.max(mag);
        }
        let mut ph = Complex64::new(w, 0.0);
        for (l, &i) in idx.iter().enumerate() {
            ph *= phase_tables[l][i];
        }
        acc += val * ph;
    });
    (acc, edge, max)
}

fn phase_tables(lambda: &[f64], rule: &Rule, sign: f64) -> Vec<Vec<Complex64>> {
    lambda
        .iter()
        .map(|&l| {
            rule.nodes
                .iter()
                .map(|&t| Complex64::from_polar(1.0, -sign * l * t))
                .collect()
        })
        .collect()
}

/// Central Fourier transform `f^λ(v) = ∫ f(v, t) e^{−iλ(t)} dt` on a `v`-grid.
///
/// The `t`-integral uses the tensor product of `quad` over the `k` central
/// axes. For trapezoid rules, magnitudes at the box faces above
/// `quad.edge_tol` times the maximum raise `Truncation`.
pub fn central_ft(
    f: &dyn PointEvaluator,
    lambda: &CentralFunctional,
    grid: Grid,
    quad: &QuadratureSpec,
) -> Result<SampledFunction> {
    central_ft_signed(f, lambda.as_slice(), 1.0, grid, quad)
}

fn central_ft_signed(
    f: &dyn PointEvaluator,
    lambda: &[f64],
    sign: f64,
    grid: Grid,
    quad: &QuadratureSpec,
) -> Result<SampledFunction> {
    let rule = quad.rule()?;
    let tables = phase_tables(lambda, &rule, sign);
    let mut values = Vec::with_capacity(grid.len());
    let mut edge = 0.0f64;
    let mut max = 0.0f64;
    for flat in 0..grid.len() {
        let v = grid.point(flat);
        let (val, e, m) = central_integral(f, &v, lambda, &rule, &tables);
        values.push(val);
        edge = edge.max(e);
        max = max.max(m);
    }
    if quad.scheme == Scheme::Trapezoid && edge > quad.edge_tol * max {
        return Err(NilError::Truncation {
            edge: edge / max,
            threshold: quad.edge_tol,
        });
    }
    Ok(SampledFunction { grid, values })
}

fn check_convolution_grids(a: &TwoStepAlgebra, f: &SampledFunction, g: &SampledFunction) -> Result<()> {
    f.check_same_grid(g)?;
    check_len("grid dimension", a.m(), f.dim())?;
    if f.grid.points.is_multiple_of(2) {
        return Err(NilError::invalid(
            "twisted convolution needs an odd number of points per axis so that z − w stays on the grid",
        ));
    }
    Ok(())
}

/// `(f ∗_λ g)(z) = ∫ f(z − w) g(w) e^{−(i/2)λ([z, w])} dw` by a direct lattice sum.
pub fn twisted_convolution(
    a: &TwoStepAlgebra,
    f: &SampledFunction,
    g: &SampledFunction,
    lambda: &CentralFunctional,
) -> Result<SampledFunction> {
    check_convolution_grids(a, f, g)?;
    let targets: Vec<Vec<usize>> = (0..f.grid.len()).map(|i| f.grid.unflatten(i)).collect();
    let values = twisted_convolution_at(a, f, g, lambda, &targets)?;
    Ok(SampledFunction { grid: f.grid, values })
}

/// [`twisted_convolution`] at selected grid indices only.
pub fn twisted_convolution_at(
    a: &TwoStepAlgebra,
    f: &SampledFunction,
    g: &SampledFunction,
    lambda: &CentralFunctional,
    targets: &[Vec<usize>],
) -> Result<Vec<Complex64>> {
    check_convolution_grids(a, f, g)?;
    let b = a.skew_form(lambda.as_slice())?;
    let grid = f.grid;
    let m = grid.dim;
    let p = grid.points;
    let center = (p - 1) / 2;
    let vol = grid.cell_volume();
    let mut out = Vec::with_capacity(targets.len());
    for iz in targets {
        check_len("target index", m, iz.len())?;
        if iz.iter().any(|&i| i >= p) {
            return Err(NilError::invalid("target index outside the grid"));
        }
        let z: Vec<f64> = iz.iter().map(|&i| grid.coordinate(i)).collect();
        // λ([z, w]) = (Bᵀ z) · w, split into per-axis phase tables.
        let u: Vec<f64> = (0..m).map(|j| (0..m).map(|i| z[i] * b[(i, j)]).sum()).collect();
        let tables: Vec<Vec<Complex64>> = u
            .iter()
            .map(|&uj| {
                (0..p)
                    .map(|i| Complex64::from_polar(1.0, -0.5 * uj * grid.coordinate(i)))
                    .collect()
            })
            .collect();
        let mut acc = Complex64::new(0.0, 0.0);
        'outer: for flat in 0..grid.len() {
            let iw = grid.unflatten(flat);
            let mut src = 0usize;
            let mut ph = Complex64::new(1.0, 0.0);
            for j in 0..m {
                let s = iz[j] as i64 - iw[j] as i64 + center as i64;
                if s < 0 || s >= p as i64 {
                    continue 'outer;
                }
                src = src * p + s as usize;
                ph *= tables[j][iw[j]];
            }
            acc += f.values[src] * g.values[flat] * ph;
        }
        out.push(acc * vol);
    }
    Ok(out)
}

/// A truncated block `⟨f̂(λ) φ_α, φ_β⟩` of the group Fourier transform.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupFourierBlock {
    pub basis: Vec<MultiIndex>,
    /// Row `β`, column `α`.
    pub matrix: DMatrix<Complex64>,
}

impl GroupFourierBlock {
    pub fn entry(&self, alpha: &MultiIndex, beta: &MultiIndex) -> Option<Complex64> {
        let ia = self.basis.iter().position(|b| b == alpha)?;
        let ib = self.basis.iter().position(|b| b == beta)?;
        Some(self.matrix[(ib, ia)])
    }
}

/// `f̂(λ) = ∫ f(x, y, t) π_λ(x, y, t) dx dy dt` restricted to `|α|, |β| ≤ max_order`.
///
/// The `t`-integral is done first at every `(x, y)` node of the tensor
/// `quad_v` rule in frame coordinates, then paired with tabulated
/// one-variable matrix coefficients.
pub fn group_ft(
    frame: &SymplecticFrame,
    f: &dyn PointEvaluator,
    max_order: usize,
    quad_v: &QuadratureSpec,
    quad_t: &QuadratureSpec,
) -> Result<GroupFourierBlock> {
    check_frame_weights(frame)?;
    let n = frame.n();
    let lambda = frame.lambda.as_slice();
    let basis = MultiIndex::up_to(n, max_order);
    let rule_v = quad_v.rule()?;
    let rule_t = quad_t.rule()?;
    let t_tables = phase_tables(lambda, &rule_t, -1.0);
    let pv = rule_v.len();

    // table[j][a][b][ix * pv + iy] = Φ^{d_j}_{ab}(x, y)
    let mc_rule = default_mc_rule();
    let tables: Vec<Vec<Vec<Vec<Complex64>>>> = (0..n)
        .map(|j| {
            (0..=max_order)
                .map(|a| {
                    (0..=max_order)
                        .map(|b| {
                            let mut t = Vec::with_capacity(pv * pv);
                            for &x in &rule_v.nodes {
                                for &y in &rule_v.nodes {
                                    t.push(matrix_coefficient_1d(frame.d[j], a, b, x, y, mc_rule));
                                }
                            }
                            t
                        })
                        .collect()
                })
                .collect()
        })
        .collect();

    let nb = basis.len();
    let mut matrix = DMatrix::from_element(nb, nb, Complex64::new(0.0, 0.0));
    let mut edge_v = 0.0f64;
    let mut max_v = 0.0f64;
    let mut edge_t = 0.0f64;
    let mut max_t = 0.0f64;
    let last = pv - 1;
    TensorRule { rule: &rule_v, k: 2 * n }.for_each(|idx, xy, w| {
        let v = frame.vector(&xy[..n], &xy[n..]);
        let (ft, e, m) = central_integral(f, &v, lambda, &rule_t, &t_tables);
        edge_t = edge_t.max(e);
        max_t = max_t.max(m);
        let mag = ft.norm();
        max_v = max_v.max(mag);
        if idx.iter().any(|&i| i == 0 || i == last) {
            edge_v = edge_v.max(mag);
        }
        let weighted = ft * w;
        for (ia, alpha) in basis.iter().enumerate() {
            for (ib, beta) in basis.iter().enumerate() {
                let mut phi = weighted;
                for j in 0..n {
                    phi *= tables[j][alpha.0[j]][beta.0[j]][idx[j] * pv + idx[n + j]];
                }
                matrix[(ib, ia)] += phi;
            }
        }
    });
    if quad_t.scheme == Scheme::Trapezoid && edge_t > quad_t.edge_tol * max_t {
        return Err(NilError::Truncation {
            edge: edge_t / max_t,
            threshold: quad_t.edge_tol,
        });
    }
    if quad_v.scheme == Scheme::Trapezoid && edge_v > quad_v.edge_tol * max_v {
        return Err(NilError::Truncation {
            edge: edge_v / max_v,
            threshold: quad_v.edge_tol,
        });
    }
    Ok(GroupFourierBlock { basis, matrix })
}

/// Finite-difference order for the scaled oscillator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FdOrder {
    Second,
    Sixth,
}

impl FdOrder {
    fn stencil(self) -> &'static [f64] {
        match self {
            FdOrder::Second => &[1.0, -2.0, 1.0],
            FdOrder::Sixth => &[
                1.0 / 90.0,
                -3.0 / 20.0,
                3.0 / 2.0,
                -49.0 / 18.0,
                3.0 / 2.0,
                -3.0 / 20.0,
                1.0 / 90.0,
            ],
        }
    }
}

/// `π_λ(L) φ = −H(d) φ = Σ_j (∂²_{ξ_j} − d_j² ξ_j²) φ` with a sixth-order stencil.
pub fn hamiltonian_apply(d: &DilationVector, phi: &SampledFunction) -> Result<SampledFunction> {
    hamiltonian_apply_with(d, phi, FdOrder::Sixth)
}

/// [`hamiltonian_apply`] with a chosen stencil; samples outside the box count as zero.
pub fn hamiltonian_apply_with(d: &DilationVector, phi: &SampledFunction, order: FdOrder) -> Result<SampledFunction> {
    check_len("dilation vector", phi.dim(), d.len())?;
    let grid = phi.grid;
    let p = grid.points as i64;
    let h2 = grid.spacing().powi(2);
    let st = order.stencil();
    let half = (st.len() / 2) as i64;
    let mut out = vec![Complex64::new(0.0, 0.0); phi.values.len()];
    for axis in 0..grid.dim {
        let stride = grid.points.pow((grid.dim - 1 - axis) as u32) as i64;
        let d2 = d.as_slice()[axis].powi(2);
        for (flat, o) in out.iter_mut().enumerate() {
            let i = (flat as i64 / stride) % p;
            let mut lap = Complex64::new(0.0, 0.0);
            for (q, c) in st.iter().enumerate() {
                let s = i + q as i64 - half;
                if s >= 0 && s < p {
                    lap += c * phi.values[(flat as i64 + (s - i) * stride) as usize];
                }
            }
            let xi = grid.coordinate(i as usize);
            *o += lap / h2 - d2 * xi * xi * phi.values[flat];
        }
    }
    Ok(SampledFunction { grid, values: out })
}

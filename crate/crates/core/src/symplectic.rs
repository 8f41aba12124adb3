//! Almost-symplectic frames for the skew forms `B_λ(V, V') = λ([V, V'])`.
//!
//! For nondegenerate `B = B_λ` the frame `{X_j, Y_j}` is orthonormal with
//! `X_iᵀ B Y_j = δ_ij d_j`, `X_iᵀ B X_j = Y_iᵀ B Y_j = 0`. It is built by
//! deflation: `BᵀB = −B²` has eigenvalues `d_j²`, each on a `B`-invariant plane.
//! A unit vector `X` in the top eigenspace gives `Y = BᵀX / d` and the
//! orthogonal complement of `span{X, Y}` is again `B`-invariant.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{check_len, NilError, Result};
use crate::nilgroup::TwoStepAlgebra;

/// Default nondegeneracy tolerance, relative to the spectral norm of `B_λ`.
pub const DEFAULT_NONDEGENERACY_TOL: f64 = 1e-10;

/// Eigenvalues of `BᵀB` within this relative distance of the top one are
/// treated as one eigenspace.
const CLUSTER_REL_TOL: f64 = 1e-8;

/// `d_j` values within this relative distance are aligned jointly.
const ALIGN_CLUSTER_REL_TOL: f64 = 1e-6;

/// A central functional `λ = Σ λ_l T_l*`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CentralFunctional(pub Vec<f64>);

impl CentralFunctional {
    pub fn new(components: Vec<f64>) -> Self {
        CentralFunctional(components)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn scaled(&self, r: f64) -> Self {
        CentralFunctional(self.0.iter().map(|x| r * x).collect())
    }

    pub fn dot(&self, t: &[f64]) -> f64 {
        self.0.iter().zip(t).map(|(a, b)| a * b).sum()
    }
}

impl From<Vec<f64>> for CentralFunctional {
    fn from(v: Vec<f64>) -> Self {
        CentralFunctional(v)
    }
}

/// Orthonormal frame `{X_j(λ), Y_j(λ)}` of `v` with weights `d_1 ≥ … ≥ d_n > 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticFrame {
    /// `m × n`, columns `X_j` in the `{V_i}` basis.
    pub x: DMatrix<f64>,
    /// `m × n`, columns `Y_j`.
    pub y: DMatrix<f64>,
    pub d: Vec<f64>,
    pub lambda: CentralFunctional,
}

/// Maximum-entry residuals of the frame invariants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FrameResiduals {
    /// `‖(X|Y)ᵀ(X|Y) − I‖_max`
    pub orthonormality: f64,
    /// `‖XᵀBY − diag(d)‖_max`
    pub pairing: f64,
    /// `‖XᵀBX‖_max`
    pub xx: f64,
    /// `‖YᵀBY‖_max`
    pub yy: f64,
    /// Spectral norm of `B`.
    pub b_norm: f64,
}

impl FrameResiduals {
    pub fn within(&self, ortho_tol: f64, pairing_rel_tol: f64) -> bool {
        let scale = pairing_rel_tol * (1.0 + self.b_norm);
        self.orthonormality <= ortho_tol
            && self.pairing <= scale
            && self.xx <= scale
            && self.yy <= scale
    }
}

impl SymplecticFrame {
    pub fn n(&self) -> usize {
        self.d.len()
    }

    pub fn m(&self) -> usize {
        self.x.nrows()
    }

    /// Frame columns in the order `(X_1, Y_1, …, X_n, Y_n)`.
    pub fn ordered_columns(&self) -> Vec<Vec<f64>> {
        let mut cols = Vec::with_capacity(2 * self.n());
        for j in 0..self.n() {
            cols.push(self.x.column(j).iter().cloned().collect());
            cols.push(self.y.column(j).iter().cloned().collect());
        }
        cols
    }

    /// The orthogonal change of basis `D_λ`: row `2j` is `X_jᵀ`, row `2j+1`
    /// is `Y_jᵀ`, so `D_λ v` lists the frame coordinates of `v`.
    pub fn change_of_basis(&self) -> DMatrix<f64> {
        let m = self.m();
        let mut d = DMatrix::zeros(m, m);
        for j in 0..self.n() {
            d.row_mut(2 * j).copy_from(&self.x.column(j).transpose());
            d.row_mut(2 * j + 1).copy_from(&self.y.column(j).transpose());
        }
        d
    }

    /// `(x, y)` with `x_j = ⟨v, X_j⟩`, `y_j = ⟨v, Y_j⟩`.
    pub fn coords(&self, v: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let n = self.n();
        let mut x = vec![0.0; n];
        let mut y = vec![0.0; n];
        for j in 0..n {
            let (cx, cy) = (self.x.column(j), self.y.column(j));
            for (i, vi) in v.iter().enumerate() {
                x[j] += vi * cx[i];
                y[j] += vi * cy[i];
            }
        }
        (x, y)
    }

    /// Inverse of [`SymplecticFrame::coords`].
    pub fn vector(&self, x: &[f64], y: &[f64]) -> Vec<f64> {
        let m = self.m();
        let mut v = vec![0.0; m];
        for j in 0..self.n() {
            for (i, vi) in v.iter_mut().enumerate() {
                *vi += x[j] * self.x[(i, j)] + y[j] * self.y[(i, j)];
            }
        }
        v
    }

    pub fn residuals(&self, b: &DMatrix<f64>) -> FrameResiduals {
        let n = self.n();
        let m = self.m();
        let mut full = DMatrix::zeros(m, 2 * n);
        full.columns_mut(0, n).copy_from(&self.x);
        full.columns_mut(n, n).copy_from(&self.y);
        let gram = full.transpose() * &full - DMatrix::identity(2 * n, 2 * n);
        let mut pairing = self.x.transpose() * b * &self.y;
        for j in 0..n {
            pairing[(j, j)] -= self.d[j];
        }
        let xx = self.x.transpose() * b * &self.x;
        let yy = self.y.transpose() * b * &self.y;
        FrameResiduals {
            orthonormality: gram.amax(),
            pairing: pairing.amax(),
            xx: xx.amax(),
            yy: yy.amax(),
            b_norm: spectral_norm(b),
        }
    }
}

/// Frame of the nondegenerate part of a possibly degenerate `B_λ`, together
/// with an orthonormal basis of its radical.
#[derive(Debug, Clone, PartialEq)]
pub struct PartialFrame {
    pub frame: SymplecticFrame,
    /// `m × r` orthonormal basis of `ker B_λ`.
    pub radical: DMatrix<f64>,
}

pub fn b_matrix(a: &TwoStepAlgebra, lambda: &CentralFunctional) -> Result<DMatrix<f64>> {
    a.skew_form(lambda.as_slice())
}

pub fn spectral_norm(b: &DMatrix<f64>) -> f64 {
    if b.is_empty() {
        return 0.0;
    }
    b.singular_values().max()
}

/// Smallest singular value of `B_λ` and its spectral norm.
pub fn singular_range(b: &DMatrix<f64>) -> (f64, f64) {
    let sv = b.singular_values();
    (sv.min(), sv.max())
}

/// Errors unless `B_λ` is nondegenerate at relative tolerance `tol`.
pub fn check_nondegenerate(a: &TwoStepAlgebra, lambda: &CentralFunctional, tol: f64) -> Result<DMatrix<f64>> {
    let b = b_matrix(a, lambda)?;
    if a.m() % 2 == 1 {
        return Err(NilError::Nondegeneracy {
            smallest: 0.0,
            tolerance: tol,
        });
    }
    let (smallest, largest) = singular_range(&b);
    if !(smallest > tol * largest) || largest == 0.0 {
        return Err(NilError::Nondegeneracy {
            smallest,
            tolerance: tol * largest,
        });
    }
    Ok(b)
}

/// Canonical almost-symplectic frame of a nondegenerate `B_λ`.
///
/// Blocks come out with `d_1 ≥ d_2 ≥ …`. Inside a repeated eigenspace the
/// standard basis vector with the largest projection onto it (lowest index on
/// ties) seeds `X_j`; each `X_j` is signed so its largest-magnitude component
/// is positive.
pub fn frame(a: &TwoStepAlgebra, lambda: &CentralFunctional, tol: f64) -> Result<SymplecticFrame> {
    let b = check_nondegenerate(a, lambda, tol)?;
    let norm = spectral_norm(&b);
    let (x, y, d, radical) = decompose(&b, tol * norm);
    debug_assert_eq!(radical.ncols(), 0);
    Ok(SymplecticFrame {
        x,
        y,
        d,
        lambda: lambda.clone(),
    })
}

/// Frame of the nondegenerate part of `B_λ`; never fails on degeneracy unless
/// `B_λ` vanishes identically.
pub fn partial_frame(a: &TwoStepAlgebra, lambda: &CentralFunctional, tol: f64) -> Result<PartialFrame> {
    let b = b_matrix(a, lambda)?;
    let norm = spectral_norm(&b);
    if norm == 0.0 {
        return Err(NilError::Nondegeneracy {
            smallest: 0.0,
            tolerance: tol,
        });
    }
    let (x, y, d, radical) = decompose(&b, tol * norm);
    Ok(PartialFrame {
        frame: SymplecticFrame {
            x,
            y,
            d,
            lambda: lambda.clone(),
        },
        radical,
    })
}

fn decompose(b: &DMatrix<f64>, abs_tol: f64) -> (DMatrix<f64>, DMatrix<f64>, Vec<f64>, DMatrix<f64>) {
    let m = b.nrows();
    let bt = b.transpose();
    let s = &bt * b;
    let mut q = DMatrix::<f64>::identity(m, m);
    let mut xs: Vec<DVector<f64>> = Vec::new();
    let mut ys: Vec<DVector<f64>> = Vec::new();
    let mut ds = Vec::new();

    while q.ncols() >= 2 {
        let r = q.ncols();
        let reduced = q.transpose() * &s * &q;
        let eig = SymmetricEigen::new(reduced);
        let top = eig.eigenvalues.max();
        if top.max(0.0).sqrt() <= abs_tol {
            break;
        }
        let cluster: Vec<usize> = (0..r)
            .filter(|&i| eig.eigenvalues[i] >= top * (1.0 - CLUSTER_REL_TOL))
            .collect();
        let c = DMatrix::from_columns(
            &cluster
                .iter()
                .map(|&i| eig.eigenvectors.column(i).into_owned())
                .collect::<Vec<_>>(),
        );
        // Seed X from the standard basis vector with the largest projection.
        let proj_basis = &c * c.transpose();
        let mut best: Option<(usize, f64, DVector<f64>)> = None;
        for i in 0..m {
            let qi = q.row(i).transpose();
            let p = &proj_basis * qi;
            let nrm = p.norm();
            match &best {
                Some((_, bn, _)) if nrm <= bn * (1.0 + 1e-9) => {}
                _ => best = Some((i, nrm, p)),
            }
        }
        let (_, _, u) = best.expect("nonempty cluster");
        let mut xv = &q * u;
        xv /= xv.norm();
        // Largest-magnitude component positive.
        let mut lead = 0;
        for i in 1..m {
            if xv[i].abs() > xv[lead].abs() * (1.0 + 1e-12) {
                lead = i;
            }
        }
        if xv[lead] < 0.0 {
            xv = -xv;
        }
        let btx = &bt * &xv;
        let d = btx.norm();
        let yv = btx / d;

        let av = q.transpose() * &xv;
        let bv = q.transpose() * &yv;
        let p = DMatrix::<f64>::identity(r, r) - &av * av.transpose() - &bv * bv.transpose();
        let peig = SymmetricEigen::new(p);
        let keep: Vec<DVector<f64>> = (0..r)
            .filter(|&i| peig.eigenvalues[i] > 0.5)
            .map(|i| peig.eigenvectors.column(i).into_owned())
            .collect();
        xs.push(xv);
        ys.push(yv);
        ds.push(d);
        q = if keep.is_empty() {
            DMatrix::zeros(m, 0)
        } else {
            &q * DMatrix::from_columns(&keep)
        };
    }

    let n = ds.len();
    let x = if n == 0 { DMatrix::zeros(m, 0) } else { DMatrix::from_columns(&xs) };
    let y = if n == 0 { DMatrix::zeros(m, 0) } else { DMatrix::from_columns(&ys) };
    (x, y, ds, q)
}

/// Frames along a path of functionals, each aligned to its predecessor.
///
/// Blocks with (numerically) equal `d_j` are mixed by the unitary that best
/// matches the previous frame; isolated blocks are rotated within their
/// `(X_j, Y_j)` plane. Both moves preserve every frame invariant.
pub fn frame_aligned(
    a: &TwoStepAlgebra,
    path: &[CentralFunctional],
    tol: f64,
) -> Result<Vec<SymplecticFrame>> {
    let mut out: Vec<SymplecticFrame> = Vec::with_capacity(path.len());
    for lambda in path {
        let mut f = frame(a, lambda, tol)?;
        if let Some(prev) = out.last() {
            align_to(&mut f, prev);
        }
        out.push(f);
    }
    Ok(out)
}

/// Rotates `f` inside its `d`-eigenspaces to best match `prev`.
pub fn align_to(f: &mut SymplecticFrame, prev: &SymplecticFrame) {
    let n = f.n();
    let m = f.m();
    if n == 0 || prev.n() != n {
        return;
    }
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && (f.d[start] - f.d[end]).abs() <= ALIGN_CLUSTER_REL_TOL * f.d[0] {
            end += 1;
        }
        let c = end - start;
        let z = |fr: &SymplecticFrame| {
            DMatrix::from_fn(m, c, |i, j| {
                Complex64::new(fr.x[(i, start + j)], fr.y[(i, start + j)])
            })
        };
        let zp = z(prev);
        let zn = z(f);
        let overlap = zp.adjoint() * &zn;
        let svd = overlap.svd(true, true);
        if let (Some(u), Some(v_t)) = (svd.u, svd.v_t) {
            let w = v_t.adjoint() * u.adjoint();
            let rotated = zn * w;
            for j in 0..c {
                for i in 0..m {
                    f.x[(i, start + j)] = rotated[(i, j)].re;
                    f.y[(i, start + j)] = rotated[(i, j)].im;
                }
            }
        }
        start = end;
    }
}

/// `max_j |d_j(rλ) − r·d_j(λ)|`.
pub fn homogeneity_check(a: &TwoStepAlgebra, lambda: &CentralFunctional, r: f64, tol: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(NilError::invalid("homogeneity scale r must be positive"));
    }
    let base = frame(a, lambda, tol)?;
    let scaled = frame(a, &lambda.scaled(r), tol)?;
    check_len("frame weights", base.n(), scaled.n())?;
    Ok(base
        .d
        .iter()
        .zip(&scaled.d)
        .map(|(d, ds)| (ds - r * d).abs())
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling;

    fn cf(v: &[f64]) -> CentralFunctional {
        CentralFunctional(v.to_vec())
    }

    #[test]
    fn b_matrix_examples() {
        let h = TwoStepAlgebra::heisenberg(1).unwrap();
        let b = b_matrix(&h, &cf(&[3.0])).unwrap();
        assert_eq!(b, DMatrix::from_row_slice(2, 2, &[0.0, 3.0, -3.0, 0.0]));
        assert_eq!(b_matrix(&h, &cf(&[0.0])).unwrap(), DMatrix::zeros(2, 2));

        let f = TwoStepAlgebra::free_two_step(3).unwrap();
        let b = b_matrix(&f, &cf(&[1.0, 0.0, 0.0])).unwrap();
        let mut expect = DMatrix::zeros(3, 3);
        expect[(0, 1)] = 1.0;
        expect[(1, 0)] = -1.0;
        assert_eq!(b, expect);
        assert!(b_matrix(&f, &cf(&[1.0])).is_err());
    }

    #[test]
    fn b_matrix_is_linear() {
        let f = TwoStepAlgebra::free_two_step(4).unwrap();
        // dyadic entries keep the sums exact
        let l1 = cf(&[0.5, -0.25, 1.0, 2.0, 0.125, -1.5]);
        let l2 = cf(&[1.0, 0.75, -0.5, 0.25, 4.0, 0.5]);
        let sum = cf(&l1.0.iter().zip(&l2.0).map(|(a, b)| a + b).collect::<Vec<_>>());
        assert_eq!(
            b_matrix(&f, &sum).unwrap(),
            b_matrix(&f, &l1).unwrap() + b_matrix(&f, &l2).unwrap()
        );
    }

    #[test]
    fn heisenberg_frame_is_standard() {
        let h = TwoStepAlgebra::heisenberg(1).unwrap();
        let fr = frame(&h, &cf(&[2.0]), DEFAULT_NONDEGENERACY_TOL).unwrap();
        assert_eq!(fr.d.len(), 1);
        assert!((fr.d[0] - 2.0).abs() < 1e-14);
        assert!((fr.x[(0, 0)] - 1.0).abs() < 1e-14 && fr.x[(1, 0)].abs() < 1e-14);
        assert!((fr.y[(1, 0)] - 1.0).abs() < 1e-14 && fr.y[(0, 0)].abs() < 1e-14);

        let h2 = TwoStepAlgebra::heisenberg(2).unwrap();
        let fr = frame(&h2, &cf(&[1.0]), DEFAULT_NONDEGENERACY_TOL).unwrap();
        assert_eq!(fr.d.len(), 2);
        assert!(fr.d.iter().all(|d| (d - 1.0).abs() < 1e-12));
        let b = b_matrix(&h2, &cf(&[1.0])).unwrap();
        assert!(fr.residuals(&b).within(1e-12, 1e-12));
    }

    #[test]
    fn degenerate_functionals_rejected() {
        let h = TwoStepAlgebra::heisenberg(1).unwrap();
        assert!(matches!(
            frame(&h, &cf(&[0.0]), DEFAULT_NONDEGENERACY_TOL),
            Err(NilError::Nondegeneracy { .. })
        ));
        let f3 = TwoStepAlgebra::free_two_step(3).unwrap();
        assert!(matches!(
            frame(&f3, &cf(&[1.0, 0.2, 0.3]), DEFAULT_NONDEGENERACY_TOL),
            Err(NilError::Nondegeneracy { .. })
        ));
    }

    #[test]
    fn partial_frame_splits_radical() {
        let f3 = TwoStepAlgebra::free_two_step(3).unwrap();
        let lambda = cf(&[0.3, -0.5, 0.8]);
        let pf = partial_frame(&f3, &lambda, DEFAULT_NONDEGENERACY_TOL).unwrap();
        assert_eq!(pf.frame.n(), 1);
        assert_eq!(pf.radical.ncols(), 1);
        let b = b_matrix(&f3, &lambda).unwrap();
        assert!((&b * &pf.radical).amax() < 1e-12);
        assert!((pf.frame.x.transpose() * &pf.radical).amax() < 1e-12);
        assert!((pf.frame.y.transpose() * &pf.radical).amax() < 1e-12);
        assert!(pf.frame.residuals(&b).within(1e-12, 1e-12));
    }

    #[test]
    fn free4_random_frames_pass_residuals() {
        let f = TwoStepAlgebra::free_two_step(4).unwrap();
        let mut rng = sampling::rng(1);
        for _ in 0..50 {
            let lambda = cf(&sampling::normal_vec(&mut rng, 6));
            let fr = frame(&f, &lambda, DEFAULT_NONDEGENERACY_TOL).unwrap();
            let b = b_matrix(&f, &lambda).unwrap();
            let res = fr.residuals(&b);
            assert!(res.within(1e-10, 1e-8), "{res:?}");
            assert!(fr.d[0] >= fr.d[1] && fr.d[1] > 0.0);
            let (x, y) = fr.coords(&[0.3, -1.0, 2.0, 0.5]);
            let back = fr.vector(&x, &y);
            for (a, b) in back.iter().zip(&[0.3, -1.0, 2.0, 0.5]) {
                assert!((a - b).abs() < 1e-12);
            }
            let d = fr.change_of_basis();
            assert!((d.transpose() * &d - DMatrix::identity(4, 4)).amax() < 1e-12);
        }
    }

    #[test]
    fn homogeneity_examples() {
        let h = TwoStepAlgebra::heisenberg(1).unwrap();
        assert_eq!(homogeneity_check(&h, &cf(&[1.0]), 5.0, 1e-10).unwrap(), 0.0);
        let f = TwoStepAlgebra::free_two_step(4).unwrap();
        let mut rng = sampling::rng(8);
        let lambda = cf(&sampling::unit_vector(&mut rng, 6));
        assert!(homogeneity_check(&f, &lambda, 1.0, 1e-10).unwrap() == 0.0);
        assert!(homogeneity_check(&f, &lambda, 3.0, 1e-10).unwrap() <= 1e-10);
        assert!(homogeneity_check(&f, &lambda, -1.0, 1e-10).is_err());
    }

    #[test]
    fn scaled_functional_gives_same_frame() {
        let f = TwoStepAlgebra::free_two_step(4).unwrap();
        let mut rng = sampling::rng(21);
        let lambda = cf(&sampling::unit_vector(&mut rng, 6));
        let a = frame(&f, &lambda, 1e-10).unwrap();
        let b = frame(&f, &lambda.scaled(7.0), 1e-10).unwrap();
        assert!((&a.x - &b.x).amax() < 1e-8);
        assert!((&a.y - &b.y).amax() < 1e-8);
    }

    #[test]
    fn aligned_constant_path_is_constant() {
        let f = TwoStepAlgebra::free_two_step(4).unwrap();
        let lambda = cf(&[0.3, 0.1, -0.7, 0.2, 0.5, -0.1]);
        let frames = frame_aligned(&f, &vec![lambda; 4], 1e-10).unwrap();
        for w in frames.windows(2) {
            assert!((&w[0].x - &w[1].x).amax() < 1e-12);
            assert!((&w[0].y - &w[1].y).amax() < 1e-12);
        }
    }

    #[test]
    fn aligned_heisenberg_scaling_path() {
        let h = TwoStepAlgebra::heisenberg(1).unwrap();
        let path: Vec<_> = (0..=10).map(|i| cf(&[1.0 + 0.1 * i as f64])).collect();
        let frames = frame_aligned(&h, &path, 1e-10).unwrap();
        for (fr, l) in frames.iter().zip(&path) {
            assert!((fr.d[0] - l.0[0]).abs() < 1e-13);
            assert!((&fr.x - &frames[0].x).amax() < 1e-13);
            assert!((&fr.y - &frames[0].y).amax() < 1e-13);
        }
    }

    #[test]
    fn aligned_heisenberg2_degenerate_block_tracks_previous() {
        // d = (1, 1) everywhere, so the canonical frame is unique only up to
        // U(2); alignment must reproduce a rotated reference frame.
        let h2 = TwoStepAlgebra::heisenberg(2).unwrap();
        let base = frame(&h2, &cf(&[1.0]), 1e-10).unwrap();
        let th: f64 = 0.4;
        let mut rotated = base.clone();
        for i in 0..4 {
            let (x0, y0) = (base.x[(i, 0)], base.y[(i, 0)]);
            rotated.x[(i, 0)] = th.cos() * x0 - th.sin() * y0;
            rotated.y[(i, 0)] = th.sin() * x0 + th.cos() * y0;
        }
        let mut next = frame(&h2, &cf(&[1.5]), 1e-10).unwrap();
        align_to(&mut next, &rotated);
        assert!((&next.x - &rotated.x).amax() < 1e-10);
        assert!((&next.y - &rotated.y).amax() < 1e-10);
        let b = b_matrix(&h2, &cf(&[1.5])).unwrap();
        assert!(next.residuals(&b).within(1e-10, 1e-10));
    }
}

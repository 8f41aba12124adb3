//! Left-invariant vector fields and the sublaplacian, applied numerically by
//! differencing along the group curves `s ↦ g·(s u, 0)`.
//!
//! Because `s ↦ (s u, 0)` is a one-parameter subgroup, the curve above is the
//! integral curve of the left-invariant field `U` through `g`, so first and
//! second differences along it converge to `U f(g)` and `U² f(g)`.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{check_len, NilError, Result};
use crate::nilgroup::{GroupElement, TwoStepAlgebra};
use crate::symplectic::SymplecticFrame;

/// Default step for first-order fields.
pub const DEFAULT_FIELD_STEP: f64 = 1e-4;
/// Default step for the sublaplacian.
pub const DEFAULT_LAPLACIAN_STEP: f64 = 1e-3;

/// A smooth function on `G` in exponential coordinates `(v, z)`.
pub trait PointEvaluator: Send + Sync {
    fn eval(&self, v: &[f64], z: &[f64]) -> Complex64;

    fn eval_at(&self, g: &GroupElement) -> Complex64 {
        self.eval(&g.v, &g.z)
    }

    /// `(∂f/∂v, ∂f/∂z)` when known in closed form.
    fn gradient(&self, _v: &[f64], _z: &[f64]) -> Option<(Vec<Complex64>, Vec<Complex64>)> {
        None
    }
}

impl<F> PointEvaluator for F
where
    F: Fn(&[f64], &[f64]) -> Complex64 + Send + Sync,
{
    fn eval(&self, v: &[f64], z: &[f64]) -> Complex64 {
        self(v, z)
    }
}

pub type SharedEvaluator = Arc<dyn PointEvaluator>;

/// Wraps a value closure together with its analytic gradient.
pub struct WithGradient<F, G> {
    pub value: F,
    pub gradient: G,
}

impl<F, G> PointEvaluator for WithGradient<F, G>
where
    F: Fn(&[f64], &[f64]) -> Complex64 + Send + Sync,
    G: Fn(&[f64], &[f64]) -> (Vec<Complex64>, Vec<Complex64>) + Send + Sync,
{
    fn eval(&self, v: &[f64], z: &[f64]) -> Complex64 {
        (self.value)(v, z)
    }

    fn gradient(&self, v: &[f64], z: &[f64]) -> Option<(Vec<Complex64>, Vec<Complex64>)> {
        Some((self.gradient)(v, z))
    }
}

/// Sum of evaluators with complex coefficients.
pub struct Combination {
    pub terms: Vec<(Complex64, SharedEvaluator)>,
}

impl PointEvaluator for Combination {
    fn eval(&self, v: &[f64], z: &[f64]) -> Complex64 {
        self.terms.iter().map(|(c, f)| c * f.eval(v, z)).sum()
    }
}

fn check_point(a: &TwoStepAlgebra, g: &GroupElement) -> Result<()> {
    check_len("group element v", a.m(), g.v.len())?;
    check_len("group element z", a.k(), g.z.len())
}

fn check_step(h: f64) -> Result<()> {
    if !(h > 0.0) || !h.is_finite() {
        return Err(NilError::invalid("finite-difference step must be positive"));
    }
    Ok(())
}

fn along(a: &TwoStepAlgebra, f: &dyn PointEvaluator, g: &GroupElement, dir: &[f64], s: f64) -> Complex64 {
    let step = GroupElement {
        v: dir.iter().map(|u| s * u).collect(),
        z: vec![0.0; a.k()],
    };
    let p = a.multiply_unchecked(g, &step);
    f.eval(&p.v, &p.z)
}

/// `(U f)(g)` for `U = Σ dir_i V_i`, central difference with one Richardson step.
pub fn directional_field_apply(
    a: &TwoStepAlgebra,
    dir: &[f64],
    f: &dyn PointEvaluator,
    g: &GroupElement,
    h: f64,
) -> Result<Complex64> {
    check_point(a, g)?;
    check_len("direction", a.m(), dir.len())?;
    check_step(h)?;
    let diff = |s: f64| (along(a, f, g, dir, s) - along(a, f, g, dir, -s)) / (2.0 * s);
    Ok((4.0 * diff(0.5 * h) - diff(h)) / 3.0)
}

/// `(V_i f)(g) = d/ds f(g·(s e_i, 0))|_{s=0}`, zero-based `i`.
pub fn left_field_apply(
    a: &TwoStepAlgebra,
    i: usize,
    f: &dyn PointEvaluator,
    g: &GroupElement,
    h: f64,
) -> Result<Complex64> {
    if i >= a.m() {
        return Err(NilError::invalid(format!("field index {i} out of range for m = {}", a.m())));
    }
    let mut e = vec![0.0; a.m()];
    e[i] = 1.0;
    directional_field_apply(a, &e, f, g, h)
}

/// `(V_i f)(g) = ∂f/∂v_i + ½ Σ_l [v, e_i]_l ∂f/∂z_l` from an analytic gradient.
pub fn left_field_apply_analytic(
    a: &TwoStepAlgebra,
    i: usize,
    f: &dyn PointEvaluator,
    g: &GroupElement,
) -> Result<Option<Complex64>> {
    check_point(a, g)?;
    if i >= a.m() {
        return Err(NilError::invalid(format!("field index {i} out of range for m = {}", a.m())));
    }
    let Some((dv, dz)) = f.gradient(&g.v, &g.z) else {
        return Ok(None);
    };
    let mut e = vec![0.0; a.m()];
    e[i] = 1.0;
    let br = a.bracket_unchecked(&g.v, &e);
    let mut out = dv[i];
    for (l, b) in br.iter().enumerate() {
        out += 0.5 * b * dz[l];
    }
    Ok(Some(out))
}

/// `Σ_u (u² f)(g)` over the given directions, by second differences along
/// the group curves, optionally Richardson-extrapolated once.
pub fn sum_of_squares_apply(
    a: &TwoStepAlgebra,
    dirs: &[Vec<f64>],
    f: &dyn PointEvaluator,
    g: &GroupElement,
    h: f64,
    richardson: bool,
) -> Result<Complex64> {
    check_point(a, g)?;
    check_step(h)?;
    for d in dirs {
        check_len("direction", a.m(), d.len())?;
    }
    let center = f.eval(&g.v, &g.z);
    let second = |s: f64| -> Complex64 {
        dirs.iter()
            .map(|d| along(a, f, g, d, s) - 2.0 * center + along(a, f, g, d, -s))
            .sum::<Complex64>()
            / (s * s)
    };
    if richardson {
        Ok((4.0 * second(0.5 * h) - second(h)) / 3.0)
    } else {
        Ok(second(h))
    }
}

fn standard_basis(m: usize) -> Vec<Vec<f64>> {
    (0..m)
        .map(|i| {
            let mut e = vec![0.0; m];
            e[i] = 1.0;
            e
        })
        .collect()
}

/// `L f(g) = Σ_i V_i² f(g)` with one Richardson step.
pub fn sublaplacian_apply(a: &TwoStepAlgebra, f: &dyn PointEvaluator, g: &GroupElement, h: f64) -> Result<Complex64> {
    sum_of_squares_apply(a, &standard_basis(a.m()), f, g, h, true)
}

/// `L f(g)` without extrapolation (second-order accurate in `h`).
pub fn sublaplacian_apply_plain(
    a: &TwoStepAlgebra,
    f: &dyn PointEvaluator,
    g: &GroupElement,
    h: f64,
) -> Result<Complex64> {
    sum_of_squares_apply(a, &standard_basis(a.m()), f, g, h, false)
}

/// `|Σ V_i² f(g) − Σ (X_j² + Y_j²) f(g)|`.
pub fn frame_invariance_check(
    a: &TwoStepAlgebra,
    frame: &SymplecticFrame,
    f: &dyn PointEvaluator,
    g: &GroupElement,
    h: f64,
) -> Result<f64> {
    check_len("frame dimension", a.m(), frame.m())?;
    let by_basis = sublaplacian_apply(a, f, g, h)?;
    let by_frame = sum_of_squares_apply(a, &frame.ordered_columns(), f, g, h, true)?;
    Ok((by_basis - by_frame).norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling;
    use crate::symplectic::{frame, CentralFunctional};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn random_element(a: &TwoStepAlgebra, rng: &mut rand_chacha::ChaCha8Rng, w: f64) -> GroupElement {
        GroupElement::new(sampling::uniform_vec(rng, a.m(), w), sampling::uniform_vec(rng, a.k(), w))
    }

    fn gaussian(v: &[f64], z: &[f64]) -> Complex64 {
        let r2: f64 = v.iter().map(|x| x * x).sum::<f64>() + 0.5 * z.iter().map(|x| x * x).sum::<f64>();
        c((-0.5 * r2).exp())
    }

    #[test]
    fn field_examples() {
        let h = TwoStepAlgebra::heisenberg(1).unwrap();
        let g = GroupElement::new(vec![0.7, -1.3], vec![0.4]);
        let zf = |_v: &[f64], z: &[f64]| c(z[0]);
        let got = left_field_apply(&h, 0, &zf, &g, 1e-4).unwrap();
        assert!((got - c(1.3 / 2.0)).norm() < 1e-10);
        let one = |_v: &[f64], _z: &[f64]| c(1.0);
        assert_eq!(left_field_apply(&h, 1, &one, &g, 1e-4).unwrap(), c(0.0));
        assert!(left_field_apply(&h, 2, &one, &g, 1e-4).is_err());
    }

    #[test]
    fn character_field_matches_chain_rule() {
        let a = TwoStepAlgebra::free_two_step(4).unwrap();
        let mut rng = sampling::rng(2);
        let mu = sampling::normal_vec(&mut rng, 6);
        let mu2 = mu.clone();
        let f = move |_v: &[f64], z: &[f64]| {
            let ph: f64 = mu2.iter().zip(z).map(|(a, b)| a * b).sum();
            Complex64::from_polar(1.0, ph)
        };
        for _ in 0..10 {
            let g = random_element(&a, &mut rng, 1.5);
            for i in 0..4 {
                let mut e = vec![0.0; 4];
                e[i] = 1.0;
                let br = a.bracket(&g.v, &e).unwrap();
                let s: f64 = mu.iter().zip(&br).map(|(a, b)| a * b).sum();
                let want = Complex64::new(0.0, 0.5 * s) * f(&g.v, &g.z);
                let got = left_field_apply(&a, i, &f, &g, 1e-4).unwrap();
                assert!((got - want).norm() < 1e-8, "{got} vs {want}");
            }
        }
    }

    #[test]
    fn analytic_field_agrees_with_difference() {
        let a = TwoStepAlgebra::free_two_step(3).unwrap();
        let f = WithGradient {
            value: gaussian,
            gradient: |v: &[f64], z: &[f64]| {
                let g = gaussian(v, z);
                (
                    v.iter().map(|x| -x * g).collect(),
                    z.iter().map(|x| -0.5 * x * g).collect(),
                )
            },
        };
        let mut rng = sampling::rng(4);
        for _ in 0..10 {
            let g = random_element(&a, &mut rng, 1.0);
            for i in 0..3 {
                let fd = left_field_apply(&a, i, &f, &g, 1e-4).unwrap();
                let an = left_field_apply_analytic(&a, i, &f, &g).unwrap().unwrap();
                assert!((fd - an).norm() < 1e-9);
            }
        }
        assert!(left_field_apply_analytic(&a, 0, &gaussian, &GroupElement::identity(3, 3))
            .unwrap()
            .is_none());
    }

    #[test]
    fn left_invariance() {
        let a = TwoStepAlgebra::free_two_step(4).unwrap();
        let mut rng = sampling::rng(6);
        let g0 = random_element(&a, &mut rng, 1.0);
        let a2 = a.clone();
        let g0c = g0.clone();
        let translated = move |v: &[f64], z: &[f64]| {
            let p = a2.multiply_unchecked(&g0c, &GroupElement::new(v.to_vec(), z.to_vec()));
            gaussian(&p.v, &p.z)
        };
        for _ in 0..10 {
            let g = random_element(&a, &mut rng, 1.0);
            let moved = a.multiply(&g0, &g).unwrap();
            for i in 0..4 {
                let lhs = left_field_apply(&a, i, &translated, &g, 1e-4).unwrap();
                let rhs = left_field_apply(&a, i, &gaussian, &moved, 1e-4).unwrap();
                assert!((lhs - rhs).norm() < 1e-6);
            }
        }
    }

    #[test]
    fn sublaplacian_examples() {
        let a = TwoStepAlgebra::free_two_step(3).unwrap();
        let g = GroupElement::new(vec![0.3, -0.2, 1.0], vec![0.5, 0.1, -0.7]);
        let one = |_v: &[f64], _z: &[f64]| c(1.0);
        assert_eq!(sublaplacian_apply(&a, &one, &g, 1e-3).unwrap(), c(0.0));
        let sq = |v: &[f64], _z: &[f64]| c(v.iter().map(|x| x * x).sum());
        let got = sublaplacian_apply(&a, &sq, &g, 1e-3).unwrap();
        assert!((got - c(6.0)).norm() < 1e-6);
    }

    fn heisenberg_ground(v: &[f64], z: &[f64]) -> Complex64 {
        let r2 = v[0] * v[0] + v[1] * v[1];
        Complex64::from_polar((-0.25 * r2).exp(), z[0])
    }

    #[test]
    fn heisenberg_ground_state_eigenvalue() {
        let h = TwoStepAlgebra::heisenberg(1).unwrap();
        let mut rng = sampling::rng(10);
        for _ in 0..20 {
            let g = random_element(&h, &mut rng, 2.0);
            let got = sublaplacian_apply(&h, &heisenberg_ground, &g, 1e-3).unwrap();
            let want = -heisenberg_ground(&g.v, &g.z);
            assert!((got - want).norm() < 1e-6, "{got} vs {want}");
        }
    }

    #[test]
    fn convergence_orders() {
        let h = TwoStepAlgebra::heisenberg(1).unwrap();
        let g = GroupElement::new(vec![0.8, -0.5], vec![0.3]);
        let want = -heisenberg_ground(&g.v, &g.z);
        let err = |s: f64, rich: bool| {
            let got = if rich {
                sublaplacian_apply(&h, &heisenberg_ground, &g, s).unwrap()
            } else {
                sublaplacian_apply_plain(&h, &heisenberg_ground, &g, s).unwrap()
            };
            (got - want).norm()
        };
        let plain = (err(0.2, false) / err(0.1, false)).log2();
        let rich = (err(0.4, true) / err(0.2, true)).log2();
        assert!(plain >= 1.9, "plain order {plain}");
        assert!(rich >= 3.9, "extrapolated order {rich}");
    }

    #[test]
    fn default_step_is_near_optimal() {
        let h = TwoStepAlgebra::heisenberg(1).unwrap();
        let g = GroupElement::new(vec![1.1, 0.4], vec![-0.9]);
        let want = -heisenberg_ground(&g.v, &g.z);
        let sweep: Vec<(f64, f64)> = [1e-1, 3e-2, 1e-2, 3e-3, 1e-3, 3e-4, 1e-4, 3e-5, 1e-5]
            .iter()
            .map(|&s| (s, (sublaplacian_apply(&h, &heisenberg_ground, &g, s).unwrap() - want).norm()))
            .collect();
        let best = sweep.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
        let at_default = sweep.iter().find(|p| p.0 == DEFAULT_LAPLACIAN_STEP).unwrap().1;
        assert!(at_default <= 1e-8 && at_default <= 100.0 * best, "{sweep:?}");
    }

    #[test]
    fn frame_invariance() {
        let h = TwoStepAlgebra::heisenberg(1).unwrap();
        let fr = frame(&h, &CentralFunctional(vec![1.0]), 1e-10).unwrap();
        let g = GroupElement::new(vec![0.2, 0.9], vec![0.1]);
        assert!(frame_invariance_check(&h, &fr, &heisenberg_ground, &g, 1e-3).unwrap() < 1e-14);

        let a = TwoStepAlgebra::free_two_step(4).unwrap();
        let mut rng = sampling::rng(13);
        for _ in 0..5 {
            let lambda = CentralFunctional(sampling::normal_vec(&mut rng, 6));
            let fr = frame(&a, &lambda, 1e-10).unwrap();
            let g = random_element(&a, &mut rng, 1.0);
            assert!(frame_invariance_check(&a, &fr, &gaussian, &g, 1e-3).unwrap() < 1e-6);
            let one = |_v: &[f64], _z: &[f64]| c(1.0);
            assert_eq!(frame_invariance_check(&a, &fr, &one, &g, 1e-3).unwrap(), 0.0);
        }
    }
}

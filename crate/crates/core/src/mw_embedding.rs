//! Embedding of a two-step algebra `g = v ⊕ z` into `h = (v × v*) ⊕ (z × R)`,
//! which always has nondegenerate forms, and the lift of functions on `G` to
//! functions on `H` that ignore the new coordinates.
//!
//! Child coordinates are `(v, η)` on the first layer and `(z, t)` on the
//! center. The new bracket component is chosen so that the left-invariant
//! fields are `Ṽ_i = V_i + ½ η_i ∂_t` and `Ṽ_{m+i} = ∂_{η_i} − ½ v_i ∂_t`,
//! i.e. `c'(m+i, j, k+1) = δ_ij`.

use std::sync::Arc;

use num_complex::Complex64;

use crate::eigenchain::{Chain, ChainSpec, FrameMode};
use crate::error::{check_len, Result};
use crate::invariant_ops::{left_field_apply, sublaplacian_apply, PointEvaluator, SharedEvaluator};
use crate::nilgroup::{GroupElement, TwoStepAlgebra};

#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddedAlgebra {
    pub parent: TwoStepAlgebra,
    pub child: TwoStepAlgebra,
}

impl EmbeddedAlgebra {
    /// Child index of parent first-layer coordinate `i`.
    pub fn v_index(&self, i: usize) -> usize {
        i
    }

    /// Child index of the dual coordinate `η_i`.
    pub fn eta_index(&self, i: usize) -> usize {
        self.parent.m() + i
    }

    /// Child index of parent central coordinate `l`.
    pub fn z_index(&self, l: usize) -> usize {
        l
    }

    /// Child index of the new central coordinate.
    pub fn t_index(&self) -> usize {
        self.parent.k()
    }

    /// Parent element `(v, z)` of a child element `(v, η, z, t)`.
    pub fn project(&self, g: &GroupElement) -> GroupElement {
        GroupElement::new(g.v[..self.parent.m()].to_vec(), g.z[..self.parent.k()].to_vec())
    }

    /// Child element `(v, η, z, t)`.
    pub fn child_element(&self, parent: &GroupElement, eta: &[f64], t: f64) -> Result<GroupElement> {
        self.parent.check_element(parent)?;
        check_len("dual coordinates", self.parent.m(), eta.len())?;
        let mut v = parent.v.clone();
        v.extend_from_slice(eta);
        let mut z = parent.z.clone();
        z.push(t);
        Ok(GroupElement::new(v, z))
    }
}

pub fn embed(a: &TwoStepAlgebra) -> Result<EmbeddedAlgebra> {
    let (m, k) = (a.m(), a.k());
    let mut entries = Vec::new();
    for i in 0..m {
        for j in (i + 1)..m {
            for l in 0..k {
                let c = a.get(i, j, l);
                if c != 0.0 {
                    entries.push((i, j, l, c));
                }
            }
        }
    }
    // c'(i, m+i, k) = −1, i.e. c'(m+i, i, k) = +1.
    for i in 0..m {
        entries.push((i, m + i, k, -1.0));
    }
    let child = TwoStepAlgebra::from_upper(2 * m, k + 1, &entries)?;
    Ok(EmbeddedAlgebra { parent: a.clone(), child })
}

/// `f̃(v, η, z, t) = f(v, z)`.
pub struct Lifted {
    inner: SharedEvaluator,
    m: usize,
    k: usize,
}

impl PointEvaluator for Lifted {
    fn eval(&self, v: &[f64], z: &[f64]) -> Complex64 {
        self.inner.eval(&v[..self.m], &z[..self.k])
    }
}

pub fn lift(emb: &EmbeddedAlgebra, f: SharedEvaluator) -> Lifted {
    Lifted {
        inner: f,
        m: emb.parent.m(),
        k: emb.parent.k(),
    }
}

/// `(max |Ṽ_i f̃ − V_i f|, max |Ṽ_{m+i} f̃|)` over `i` and child sample points.
pub fn lifted_field_check(emb: &EmbeddedAlgebra, f: SharedEvaluator, points: &[GroupElement], h: f64) -> Result<(f64, f64)> {
    let lifted = lift(emb, f.clone());
    let m = emb.parent.m();
    let (mut horizontal, mut dual) = (0.0f64, 0.0f64);
    for p in points {
        emb.child.check_element(p)?;
        let q = emb.project(p);
        for i in 0..m {
            let child = left_field_apply(&emb.child, emb.v_index(i), &lifted, p, h)?;
            let parent = left_field_apply(&emb.parent, i, f.as_ref(), &q, h)?;
            horizontal = horizontal.max((child - parent).norm());
            let eta = left_field_apply(&emb.child, emb.eta_index(i), &lifted, p, h)?;
            dual = dual.max(eta.norm());
        }
    }
    Ok((horizontal, dual))
}

/// `max |L̃ f̃ − L f|` over child sample points.
pub fn lifted_sublaplacian_check(emb: &EmbeddedAlgebra, f: SharedEvaluator, points: &[GroupElement], h: f64) -> Result<f64> {
    let lifted = lift(emb, f.clone());
    let mut worst = 0.0f64;
    for p in points {
        emb.child.check_element(p)?;
        let child = sublaplacian_apply(&emb.child, &lifted, p, h)?;
        let parent = sublaplacian_apply(&emb.parent, f.as_ref(), &emb.project(p), h)?;
        worst = worst.max((child - parent).norm());
    }
    Ok(worst)
}

/// Residuals of the chain relation for a lifted chain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PipelineResiduals {
    /// `max |L̃ f̃_k − f̃_{k+1}|` on the child.
    pub child: f64,
    /// `max |L f_k − f_{k+1}|` on the parent, at the projected points.
    pub parent: f64,
}

/// Builds the chain on the parent from frames of the nondegenerate part of
/// each `B_λ`, lifts every element to the child, checks the chain relation
/// there with the child sublaplacian and again on the parent after
/// projecting the sample points.
pub fn non_mw_chain_pipeline(
    emb: &EmbeddedAlgebra,
    spec: &ChainSpec,
    ks: &[i32],
    points: &[GroupElement],
    h: f64,
    tol: f64,
) -> Result<PipelineResiduals> {
    let chain = Chain::with_mode(&emb.parent, spec, tol, FrameMode::Partial)?;
    let mut res = PipelineResiduals { child: 0.0, parent: 0.0 };
    for &k in ks {
        let fk: SharedEvaluator = Arc::new(chain.element(k));
        let next: SharedEvaluator = Arc::new(chain.element(k + 1));
        let lk = lift(emb, fk.clone());
        let lnext = lift(emb, next.clone());
        for p in points {
            emb.child.check_element(p)?;
            let child = sublaplacian_apply(&emb.child, &lk, p, h)?;
            res.child = res.child.max((child - lnext.eval_at(p)).norm());
            let q = emb.project(p);
            let parent = sublaplacian_apply(&emb.parent, fk.as_ref(), &q, h)?;
            res.parent = res.parent.max((parent - next.eval_at(&q)).norm());
        }
    }
    Ok(res)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigenchain::{h_lambda, ChainTerm};
    use crate::hermite::MultiIndex;
    use crate::nilgroup::{DEFAULT_MW_TOL, DEFAULT_MW_TRIALS};
    use crate::sampling;
    use crate::symplectic::CentralFunctional;

    fn child_points(emb: &EmbeddedAlgebra, seed: u64, n: usize) -> Vec<GroupElement> {
        let mut rng = sampling::rng(seed);
        (0..n)
            .map(|_| {
                GroupElement::new(
                    sampling::uniform_vec(&mut rng, emb.child.m(), 1.5),
                    sampling::uniform_vec(&mut rng, emb.child.k(), 1.5),
                )
            })
            .collect()
    }

    fn gaussian() -> SharedEvaluator {
        Arc::new(|v: &[f64], z: &[f64]| {
            let r2: f64 = v.iter().map(|x| x * x).sum::<f64>() + z.iter().map(|x| 0.5 * x * x).sum::<f64>();
            Complex64::new((-0.5 * r2).exp(), 0.0)
        })
    }

    #[test]
    fn embedded_algebras_are_mw() {
        for a in [
            TwoStepAlgebra::heisenberg(1).unwrap(),
            TwoStepAlgebra::heisenberg(2).unwrap(),
            TwoStepAlgebra::free_two_step(3).unwrap(),
            TwoStepAlgebra::free_two_step(4).unwrap(),
        ] {
            let emb = embed(&a).unwrap();
            assert_eq!(emb.child.m(), 2 * a.m());
            assert_eq!(emb.child.k(), a.k() + 1);
            assert!(emb.child.is_mw(DEFAULT_MW_TRIALS, 1, DEFAULT_MW_TOL).unwrap());
        }
    }

    #[test]
    fn parent_bracket_embeds_and_new_component_matches_fields() {
        let a = TwoStepAlgebra::free_two_step(3).unwrap();
        let emb = embed(&a).unwrap();
        let mut rng = sampling::rng(8);
        for _ in 0..10 {
            let v = sampling::normal_vec(&mut rng, 3);
            let w = sampling::normal_vec(&mut rng, 3);
            let mut cv = v.clone();
            cv.extend([0.0; 3]);
            let mut cw = w.clone();
            cw.extend([0.0; 3]);
            let mut want = a.bracket(&v, &w).unwrap();
            want.push(0.0);
            assert_eq!(emb.child.bracket(&cv, &cw).unwrap(), want);
        }
        // [(V, η), (V', η')] has new component η(V') − η'(V).
        let v = [1.0, 2.0, 0.5, 0.3, -0.7, 0.2];
        let w = [-0.4, 0.1, 1.5, 0.9, 0.6, -1.1];
        let br = emb.child.bracket(&v, &w).unwrap();
        let eta_v: f64 = (0..3).map(|i| v[3 + i] * w[i]).sum();
        let etap_v: f64 = (0..3).map(|i| w[3 + i] * v[i]).sum();
        assert!((br[3] - (eta_v - etap_v)).abs() < 1e-14);
    }

    #[test]
    fn lift_ignores_new_coordinates() {
        let h = TwoStepAlgebra::heisenberg(1).unwrap();
        let emb = embed(&h).unwrap();
        let e = h_lambda(&h, &CentralFunctional(vec![1.0]), &MultiIndex(vec![0]), 1e-10).unwrap();
        let lifted = lift(&emb, e.clone());
        let base = GroupElement::new(vec![0.4, -0.2], vec![0.9]);
        let a = emb.child_element(&base, &[3.0, -1.0], 7.0).unwrap();
        let b = emb.child_element(&base, &[-2.0, 0.5], -4.0).unwrap();
        assert_eq!(lifted.eval_at(&a), e.eval_at(&base));
        assert_eq!(lifted.eval_at(&b), e.eval_at(&base));
    }

    #[test]
    fn lifted_fields_and_sublaplacian() {
        let one: SharedEvaluator = Arc::new(|_v: &[f64], _z: &[f64]| Complex64::new(1.0, 0.0));
        let h = TwoStepAlgebra::heisenberg(1).unwrap();
        let emb = embed(&h).unwrap();
        let pts = child_points(&emb, 1, 5);
        assert_eq!(lifted_field_check(&emb, one.clone(), &pts, 1e-4).unwrap(), (0.0, 0.0));
        assert_eq!(lifted_sublaplacian_check(&emb, one, &pts, 1e-3).unwrap(), 0.0);

        let e = h_lambda(&h, &CentralFunctional(vec![1.0]), &MultiIndex(vec![0]), 1e-10).unwrap();
        let (a, b) = lifted_field_check(&emb, e.clone(), &pts, 1e-4).unwrap();
        assert!(a <= 1e-6 && b <= 1e-6);
        assert!(lifted_sublaplacian_check(&emb, e, &pts, 1e-3).unwrap() <= 1e-5);

        let f3 = TwoStepAlgebra::free_two_step(3).unwrap();
        let emb = embed(&f3).unwrap();
        let pts = child_points(&emb, 2, 5);
        let (a, b) = lifted_field_check(&emb, gaussian(), &pts, 1e-4).unwrap();
        assert!(a <= 1e-6 && b <= 1e-6);
        assert!(lifted_sublaplacian_check(&emb, gaussian(), &pts, 1e-3).unwrap() <= 1e-5);
    }

    #[test]
    fn non_mw_pipeline() {
        let f3 = TwoStepAlgebra::free_two_step(3).unwrap();
        let emb = embed(&f3).unwrap();
        let spec = ChainSpec {
            terms: vec![
                ChainTerm {
                    lambda: CentralFunctional(vec![0.6, -0.3, 0.9]),
                    alpha: MultiIndex(vec![0]),
                    coeff: Complex64::new(1.0, 0.0),
                },
                ChainTerm {
                    lambda: CentralFunctional(vec![-0.2, 0.8, 0.1]),
                    alpha: MultiIndex(vec![1]),
                    coeff: Complex64::new(0.0, 0.5),
                },
            ],
        };
        let pts = child_points(&emb, 3, 8);
        let res = non_mw_chain_pipeline(&emb, &spec, &[-1, 0, 1], &pts, 1e-3, 1e-10).unwrap();
        assert!(res.child <= 1e-4 && res.parent <= 1e-4, "{res:?}");
    }
}

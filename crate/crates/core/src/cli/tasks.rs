use std::sync::Arc;

use num_complex::Complex64;

use super::config::{parse_list, Defaults, ExperimentSpec, PsiSide, TaskKind, TermInput};
use super::report::Check;
use crate::eigenchain::{
    chain_relation_check, concentration_probe, lambda_tilde, BumpSpec, Chain, ChainSpec, ChainTerm, Eigenfunction,
    ProbeOptions, SupNormOptions, sup_norm_estimate,
};
use crate::error::{NilError, Result};
use crate::hermite::MultiIndex;
use crate::invariant_ops::{sublaplacian_apply, PointEvaluator, SharedEvaluator};
use crate::mw_embedding::{embed, lifted_field_check, lifted_sublaplacian_check, non_mw_chain_pipeline};
use crate::nilgroup::{GroupElement, TwoStepAlgebra};
use crate::sampling;
use crate::symplectic::{b_matrix, frame, homogeneity_check, partial_frame, CentralFunctional};

/// Group-law checks.
const GROUP_TOL: f64 = 1e-12;
/// Frame orthonormality.
const ORTHO_TOL: f64 = 1e-10;
/// Frame pairing residuals, relative to `1 + ‖B‖`.
const PAIRING_TOL: f64 = 1e-8;
/// Relative homogeneity of the frame weights.
const HOMOGENEITY_TOL: f64 = 1e-10;
/// Relative gap between consecutive weights below which a report flags a near-collision.
const WEIGHT_COLLISION_TOL: f64 = 1e-6;
/// Residuals of the `λ̃` identities.
const LAMBDA_TILDE_TOL: f64 = 1e-10;
/// Eigen-relation residual, relative to `1 + |λ|²`.
const EIGEN_TOL: f64 = 1e-5;
/// Sup-norm spread separating bounded from growing chains.
const BOUNDED_RATIO: f64 = 1.01;
const GROWTH_TOL: f64 = 1e-6;
/// Chain relation, relative to `max(1, sup|f_{k+1}|)`.
const CHAIN_TOL: f64 = 1e-4;
/// Relative tolerance of the probe's geometric ratio.
const PROBE_RATIO_TOL: f64 = 0.05;
/// Required shrink factor of the off-sphere pairing.
const PROBE_SHRINK: f64 = 4.0;
const LIFTED_FIELD_TOL: f64 = 1e-6;
const LIFTED_LAPLACIAN_TOL: f64 = 1e-5;
const PIPELINE_TOL: f64 = 1e-4;
const UNIT_TOL: f64 = 1e-12;

/// Output of one task before it is wrapped into a report.
pub struct TaskOutcome {
    pub checks: Vec<Check>,
    pub resolutions: serde_json::Map<String, serde_json::Value>,
}

impl TaskOutcome {
    fn new() -> Self {
        TaskOutcome {
            checks: Vec::new(),
            resolutions: serde_json::Map::new(),
        }
    }

    fn push(&mut self, c: Check) {
        self.checks.push(c);
    }

    fn resolution(&mut self, key: &str, value: impl serde::Serialize) {
        self.resolutions
            .insert(key.to_string(), serde_json::to_value(value).expect("serializable"));
    }

    /// Numerical-domain errors become failed checks named `name`; anything
    /// else propagates as an input error.
    fn soft<T>(&mut self, name: &str, r: Result<T>) -> Result<Option<T>> {
        match r {
            Ok(v) => Ok(Some(v)),
            Err(e @ (NilError::Nondegeneracy { .. } | NilError::Truncation { .. })) => {
                let kind = match e {
                    NilError::Nondegeneracy { .. } => "nondegeneracy",
                    _ => "truncation",
                };
                self.push(Check::failure(format!("{name}.{kind}"), e.to_string()));
                Ok(None)
            }
            Err(e) => Err(e),
        }
    }
}

pub fn run_task(spec: &ExperimentSpec, a: &TwoStepAlgebra) -> Result<TaskOutcome> {
    match spec.task {
        TaskKind::VerifyGroup => verify_group(spec, a),
        TaskKind::Symplectic => symplectic(spec, a),
        TaskKind::Eigen => eigen(spec, a),
        TaskKind::Chain => chain(spec, a),
        TaskKind::Probe => probe(spec, a),
        TaskKind::Embed => embedding(spec, a),
    }
}

fn random_element<R: rand::Rng>(rng: &mut R, a: &TwoStepAlgebra) -> GroupElement {
    GroupElement::new(sampling::normal_vec(rng, a.m()), sampling::normal_vec(rng, a.k()))
}

/// Seeded sample points, uniform in `[-w, w]` per coordinate.
pub fn sample_points(a: &TwoStepAlgebra, count: usize, half_width: f64, seed: u64) -> Vec<GroupElement> {
    let mut rng = sampling::rng(seed);
    (0..count)
        .map(|_| {
            GroupElement::new(
                sampling::uniform_vec(&mut rng, a.m(), half_width),
                sampling::uniform_vec(&mut rng, a.k(), half_width),
            )
        })
        .collect()
}

fn verify_group(spec: &ExperimentSpec, a: &TwoStepAlgebra) -> Result<TaskOutcome> {
    let d = &spec.defaults;
    let mut out = TaskOutcome::new();
    out.resolution("triples", d.triples);
    let mut rng = sampling::rng(spec.seed);
    let e = a.identity();
    let (mut assoc, mut ident, mut inv) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..d.triples {
        let g = random_element(&mut rng, a);
        let h = random_element(&mut rng, a);
        let k = random_element(&mut rng, a);
        let left = a.multiply(&a.multiply(&g, &h)?, &k)?;
        let right = a.multiply(&g, &a.multiply(&h, &k)?)?;
        assoc = assoc.max(left.max_abs_diff(&right));
        ident = ident
            .max(a.multiply(&g, &e)?.max_abs_diff(&g))
            .max(a.multiply(&e, &g)?.max_abs_diff(&g));
        let gi = a.inverse(&g);
        inv = inv
            .max(a.multiply(&g, &gi)?.max_abs_diff(&e))
            .max(a.multiply(&gi, &g)?.max_abs_diff(&e));
    }
    out.push(Check::at_most("associativity", assoc, GROUP_TOL));
    out.push(Check::at_most("identity", ident, GROUP_TOL));
    out.push(Check::at_most("inverse", inv, GROUP_TOL));
    let mw = a.is_mw(d.mw_trials, spec.seed, d.mw_tol)?;
    out.push(Check::info("is_mw", if mw { 1.0 } else { 0.0 }));
    Ok(out)
}

fn lambda_param(spec: &ExperimentSpec, a: &TwoStepAlgebra) -> Result<Option<CentralFunctional>> {
    match &spec.params.lambda {
        None => Ok(None),
        Some(l) => {
            if l.len() != a.k() {
                return Err(NilError::DimensionMismatch {
                    what: "lambda",
                    expected: a.k(),
                    got: l.len(),
                });
            }
            if l.iter().any(|x| !x.is_finite()) {
                return Err(NilError::invalid("lambda components must be finite"));
            }
            Ok(Some(CentralFunctional(l.clone())))
        }
    }
}

fn symplectic(spec: &ExperimentSpec, a: &TwoStepAlgebra) -> Result<TaskOutcome> {
    let d = &spec.defaults;
    let mut out = TaskOutcome::new();
    let lambdas = match lambda_param(spec, a)? {
        Some(l) => vec![l],
        None => {
            let mut rng = sampling::rng(spec.seed);
            (0..d.frame_samples)
                .map(|_| CentralFunctional(sampling::normal_vec(&mut rng, a.k())))
                .collect()
        }
    };
    out.resolution("frames", lambdas.len());
    let (mut ortho, mut pairing, mut xx, mut yy, mut homog) = (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let mut min_gap = f64::INFINITY;
    for lambda in &lambdas {
        let Some(fr) = out.soft("frame", frame(a, lambda, d.frame_tol))? else {
            return Ok(out);
        };
        let r = fr.residuals(&b_matrix(a, lambda)?);
        let scale = 1.0 + r.b_norm;
        ortho = ortho.max(r.orthonormality);
        pairing = pairing.max(r.pairing / scale);
        xx = xx.max(r.xx / scale);
        yy = yy.max(r.yy / scale);
        let dmax = fr.d.iter().cloned().fold(0.0, f64::max);
        for w in fr.d.windows(2) {
            min_gap = min_gap.min((w[0] - w[1]).abs() / dmax);
        }
        for &s in &d.homogeneity_scales {
            let Some(h) = out.soft("homogeneity", homogeneity_check(a, lambda, s, d.frame_tol))? else {
                return Ok(out);
            };
            homog = homog.max(h / (s * dmax));
        }
    }
    out.push(Check::at_most("orthonormality", ortho, ORTHO_TOL));
    out.push(Check::at_most("pairing_relative", pairing, PAIRING_TOL));
    out.push(Check::at_most("xx_relative", xx, PAIRING_TOL));
    out.push(Check::at_most("yy_relative", yy, PAIRING_TOL));
    out.push(Check::at_most("homogeneity_relative", homog, HOMOGENEITY_TOL));
    if min_gap.is_finite() {
        let mut c = Check::info("min_weight_gap", min_gap);
        if min_gap < WEIGHT_COLLISION_TOL {
            c = c.with_note("weights nearly coincide; d_j may fail to be smooth near this λ");
        }
        out.push(c);
    }
    Ok(out)
}

fn alpha_param(spec: &ExperimentSpec, n: usize) -> Result<MultiIndex> {
    match &spec.params.alpha {
        None => Ok(MultiIndex::zeros(n)),
        Some(al) if al.len() == n => Ok(MultiIndex(al.clone())),
        Some(al) => Err(NilError::DimensionMismatch {
            what: "alpha",
            expected: n,
            got: al.len(),
        }),
    }
}

fn eigen(spec: &ExperimentSpec, a: &TwoStepAlgebra) -> Result<TaskOutcome> {
    let d = &spec.defaults;
    let mut out = TaskOutcome::new();
    let lambda = lambda_param(spec, a)?.ok_or_else(|| NilError::invalid("eigen needs lambda"))?;
    let alpha = alpha_param(spec, a.m() / 2)?;
    let Some(lt) = out.soft("lambda_tilde", lambda_tilde(a, &lambda, &alpha, d.frame_tol))? else {
        return Ok(out);
    };
    out.push(Check::at_most("lambda_tilde.inverse", lt.inverse_residual, LAMBDA_TILDE_TOL));
    out.push(Check::at_most("lambda_tilde.eigenvalue", lt.eigenvalue_residual, LAMBDA_TILDE_TOL));
    let h = Eigenfunction::new(a, &lambda, &alpha, d.frame_tol)?;
    out.resolution("points", d.eigen_points);
    out.resolution("laplacian_step", d.laplacian_step);
    let points = sample_points(a, d.eigen_points, d.sample_box, spec.seed);
    let mu = h.eigenvalue();
    let scale = 1.0 + lambda.norm().powi(2);
    let mut worst = 0.0f64;
    for p in &points {
        let lh = sublaplacian_apply(a, &h, p, d.laplacian_step)?;
        worst = worst.max((lh - mu * h.eval_at(p)).norm() / scale);
    }
    out.push(Check::at_most("eigen_residual", worst, EIGEN_TOL));
    let at_zero = h.eval_at(&a.identity());
    out.push(Check::at_most("value_at_identity", (at_zero - Complex64::new(1.0, 0.0)).norm(), UNIT_TOL));
    let sup = sup_norm_estimate(&h, &sup_options(spec, a));
    out.push(Check::at_most("sup_norm", sup, 1.0 + UNIT_TOL));
    Ok(out)
}

fn sup_options(spec: &ExperimentSpec, a: &TwoStepAlgebra) -> SupNormOptions {
    SupNormOptions {
        v_half_width: spec.defaults.sup_box,
        z_half_width: spec.defaults.sup_box,
        samples: spec.defaults.sup_samples,
        ..SupNormOptions::for_algebra(a, spec.seed)
    }
}

fn chain_spec(spec: &ExperimentSpec, a: &TwoStepAlgebra, n: usize) -> Result<ChainSpec> {
    let cs = spec.params.chain_spec(a.k(), n)?;
    if cs.terms.is_empty() {
        return Err(NilError::invalid(format!("{} needs at least one chain term", spec.task.name())));
    }
    for t in &cs.terms {
        if t.alpha.len() != n {
            return Err(NilError::DimensionMismatch {
                what: "term alpha",
                expected: n,
                got: t.alpha.len(),
            });
        }
    }
    Ok(cs)
}

fn chain(spec: &ExperimentSpec, a: &TwoStepAlgebra) -> Result<TaskOutcome> {
    let d = &spec.defaults;
    let mut out = TaskOutcome::new();
    let cs = chain_spec(spec, a, a.m() / 2)?;
    if d.k_min >= d.k_max {
        return Err(NilError::invalid("k_min must be below k_max"));
    }
    let Some(ch) = out.soft("chain", Chain::new(a, &cs, d.frame_tol))? else {
        return Ok(out);
    };
    out.resolution("k_range", [d.k_min, d.k_max]);
    out.resolution("sup_samples", d.sup_samples);
    let opts = sup_options(spec, a);
    let sups: Vec<f64> = (d.k_min..=d.k_max).map(|k| sup_norm_estimate(&ch.element(k), &opts)).collect();
    let max = sups.iter().cloned().fold(0.0, f64::max);
    let min = sups.iter().cloned().fold(f64::INFINITY, f64::min);
    let spread = max / min;
    let radii = ch.spectral_radii();
    let on_sphere = radii.iter().all(|s| (s - 1.0).abs() <= UNIT_TOL);
    if on_sphere {
        out.push(Check::at_most("boundedness", spread, BOUNDED_RATIO));
    } else {
        out.push(Check::info("boundedness", spread).with_note("unbounded by design; see expected_growth"));
        out.push(Check::at_least("expected_growth", spread, BOUNDED_RATIO));
    }
    let s0 = radii[0];
    if radii.iter().all(|s| (s - s0).abs() <= UNIT_TOL * s0) {
        let ratios: Vec<f64> = sups.windows(2).map(|w| w[1] / w[0]).collect();
        let mid = ((0 - d.k_min) as usize).min(ratios.len() - 1);
        out.push(Check::near("growth_ratio", ratios[mid], s0, GROWTH_TOL));
        let worst = ratios.iter().map(|r| (r - s0).abs()).fold(0.0, f64::max);
        out.push(Check::at_most("growth_ratio_spread", worst, GROWTH_TOL));
    }
    let points = sample_points(a, d.eigen_points, d.sample_box, spec.seed);
    let mut rel = 0.0f64;
    for k in -2..=2 {
        let r = chain_relation_check(a, &ch, k, &points, d.laplacian_step)?;
        let next = sup_norm_estimate(&ch.element(k + 1), &opts);
        rel = rel.max(r / next.max(1.0));
    }
    out.push(Check::at_most("chain_relation", rel, CHAIN_TOL));
    Ok(out)
}

fn default_bumps(cs: &ChainSpec) -> (BumpSpec, BumpSpec) {
    let l = &cs.terms[0].lambda;
    let unit = l.scaled(1.0 / l.norm());
    let phi = BumpSpec {
        center: unit.scaled(-1.5).0,
        radius: 1.0,
        order: 1,
    };
    let psi = BumpSpec {
        center: l.scaled(-1.0).0,
        radius: 0.3,
        order: 1,
    };
    (phi, psi)
}

fn probe(spec: &ExperimentSpec, a: &TwoStepAlgebra) -> Result<TaskOutcome> {
    let d = &spec.defaults;
    let mut out = TaskOutcome::new();
    let cs = chain_spec(spec, a, a.m() / 2)?;
    let (phi0, psi0) = default_bumps(&cs);
    let phi = spec.params.phi.clone().unwrap_or(phi0);
    let psi = spec.params.psi.clone().unwrap_or(psi0);
    for b in [&phi, &psi] {
        b.validate()?;
        if b.center.len() != a.k() {
            return Err(NilError::DimensionMismatch {
                what: "bump center",
                expected: a.k(),
                got: b.center.len(),
            });
        }
    }
    // The pairing peaks at λ = −μ for each chain term μ.
    let covered: Vec<&ChainTerm> = cs
        .terms
        .iter()
        .filter(|t| psi.value(&t.lambda.scaled(-1.0).0) > 0.0 && phi.value(&t.lambda.scaled(-1.0).0) > 0.0)
        .collect();
    let side = spec.params.psi_side.unwrap_or(if covered.is_empty() {
        PsiSide::OffSphere
    } else {
        PsiSide::Covering
    });
    let base = ProbeOptions {
        l_max: d.probe_l_max,
        v_box: d.probe_v_box,
        v_points: d.probe_v_points,
        lambda_points: d.lambda_points,
        tol: d.frame_tol,
        ..ProbeOptions::default()
    };
    out.resolution("probe_v_points", d.probe_v_points);
    out.resolution("lambda_points", d.lambda_points);
    match side {
        PsiSide::Covering => {
            let dominant = covered.iter().map(|t| t.lambda.norm()).fold(0.0, f64::max);
            if dominant == 0.0 {
                return Err(NilError::invalid("psi_side = covering but psi misses every chain term"));
            }
            let window = d.probe_windows.first().copied().unwrap_or(base.window);
            out.resolution("window", window);
            let Some(r) = out.soft("probe", concentration_probe(a, &cs, &phi, &psi, &ProbeOptions { window, ..base }))?
            else {
                return Ok(out);
            };
            for row in &r.table {
                out.push(Check::info(format!("pairing.l{}", row.l), row.magnitude));
            }
            out.push(Check::near("geometric_ratio", r.ratio, dominant, PROBE_RATIO_TOL * dominant));
        }
        PsiSide::OffSphere => {
            let [r0, r1] = match d.probe_windows.as_slice() {
                [r0, r1] => [*r0, *r1],
                _ => return Err(NilError::invalid("probe_windows must hold two radii")),
            };
            out.resolution("windows", [r0, r1]);
            let mut mags = Vec::new();
            for w in [r0, r1] {
                let Some(r) =
                    out.soft("probe", concentration_probe(a, &cs, &phi, &psi, &ProbeOptions { window: w, ..base.clone() }))?
                else {
                    return Ok(out);
                };
                out.push(Check::info(format!("pairing.l0.window{w}"), r.table[0].magnitude));
                mags.push(r.table[0].magnitude);
            }
            out.push(Check::at_least("off_sphere_shrink", mags[0] / mags[1], PROBE_SHRINK));
        }
    }
    Ok(out)
}

fn first_lambda(t: &TermInput, k: usize) -> Result<CentralFunctional> {
    let l = match t {
        TermInput::Table(t) => t.lambda.0.clone(),
        TermInput::Text(s) => match s.split_once('|') {
            Some((head, _)) => parse_list(head, "lambda")?,
            None => parse_list::<f64>(s, "term")?.into_iter().take(k).collect(),
        },
    };
    if l.len() != k {
        return Err(NilError::DimensionMismatch {
            what: "term lambda",
            expected: k,
            got: l.len(),
        });
    }
    Ok(CentralFunctional(l))
}

fn gaussian() -> SharedEvaluator {
    Arc::new(|v: &[f64], z: &[f64]| {
        let r2: f64 = v.iter().map(|x| x * x).sum::<f64>() + z.iter().map(|x| 0.5 * x * x).sum::<f64>();
        Complex64::new((-0.5 * r2).exp(), 0.0)
    })
}

fn embedding(spec: &ExperimentSpec, a: &TwoStepAlgebra) -> Result<TaskOutcome> {
    let d = &spec.defaults;
    let mut out = TaskOutcome::new();
    let emb = embed(a)?;
    out.push(Check::flag("child_is_mw", emb.child.is_mw(d.mw_trials, spec.seed, d.mw_tol)?));

    let cs = if spec.params.terms.is_empty() {
        let mut rng = sampling::rng(spec.seed);
        let lambda = CentralFunctional(sampling::normal_vec(&mut rng, a.k()));
        let Some(pf) = out.soft("partial_frame", partial_frame(a, &lambda, d.frame_tol))? else {
            return Ok(out);
        };
        ChainSpec {
            terms: vec![ChainTerm {
                lambda,
                alpha: MultiIndex::zeros(pf.frame.n()),
                coeff: Complex64::new(1.0, 0.0),
            }],
        }
    } else {
        // Rank of the nondegenerate part, read off the first term's λ.
        let lambda = first_lambda(&spec.params.terms[0], a.k())?;
        let Some(pf) = out.soft("partial_frame", partial_frame(a, &lambda, d.frame_tol))? else {
            return Ok(out);
        };
        let n = pf.frame.n();
        chain_spec(spec, a, n)?
    };

    out.resolution("points", d.embed_points);
    let points = sample_points(&emb.child, d.embed_points, d.sample_box, spec.seed);
    let Some(ch) = out.soft(
        "chain",
        Chain::with_mode(a, &cs, d.frame_tol, crate::eigenchain::FrameMode::Partial),
    )?
    else {
        return Ok(out);
    };
    let test_fns: Vec<SharedEvaluator> = vec![gaussian(), Arc::new(ch.element(0))];
    let (mut horizontal, mut dual, mut lap) = (0.0f64, 0.0f64, 0.0f64);
    for f in &test_fns {
        let (hz, du) = lifted_field_check(&emb, f.clone(), &points, d.field_step)?;
        horizontal = horizontal.max(hz);
        dual = dual.max(du);
        lap = lap.max(lifted_sublaplacian_check(&emb, f.clone(), &points, d.laplacian_step)?);
    }
    out.push(Check::at_most("lifted_field.horizontal", horizontal, LIFTED_FIELD_TOL));
    out.push(Check::at_most("lifted_field.dual", dual, LIFTED_FIELD_TOL));
    out.push(Check::at_most("lifted_sublaplacian", lap, LIFTED_LAPLACIAN_TOL));
    let Some(res) = out.soft(
        "pipeline",
        non_mw_chain_pipeline(&emb, &cs, &[-1, 0, 1], &points, d.laplacian_step, d.frame_tol),
    )?
    else {
        return Ok(out);
    };
    out.push(Check::at_most("pipeline.child", res.child, PIPELINE_TOL));
    out.push(Check::at_most("pipeline.parent", res.parent, PIPELINE_TOL));
    Ok(out)
}

/// Defaults echoed into the report environment.
pub fn defaults_json(d: &Defaults) -> serde_json::Value {
    serde_json::to_value(d).expect("serializable")
}

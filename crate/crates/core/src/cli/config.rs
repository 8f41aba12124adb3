use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::eigenchain::{BumpSpec, ChainSpec, ChainTerm};
use crate::error::{NilError, Result};
use crate::hermite::MultiIndex;
use crate::nilgroup::TwoStepAlgebra;
use crate::symplectic::CentralFunctional;

/// Every numerical default used by the tasks, overridable from the
/// `[defaults]` table of an experiment file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Defaults {
    pub mw_trials: usize,
    pub mw_tol: f64,
    pub frame_tol: f64,
    pub triples: usize,
    pub frame_samples: usize,
    pub homogeneity_scales: Vec<f64>,
    pub eigen_points: usize,
    pub sample_box: f64,
    pub field_step: f64,
    pub laplacian_step: f64,
    pub k_min: i32,
    pub k_max: i32,
    pub sup_samples: usize,
    pub sup_box: f64,
    pub probe_l_max: usize,
    pub probe_windows: Vec<f64>,
    pub probe_v_box: f64,
    pub probe_v_points: usize,
    pub lambda_points: usize,
    pub embed_points: usize,
}

impl Default for Defaults {
    fn default() -> Self {
        Defaults {
            mw_trials: crate::nilgroup::DEFAULT_MW_TRIALS,
            mw_tol: crate::nilgroup::DEFAULT_MW_TOL,
            frame_tol: crate::symplectic::DEFAULT_NONDEGENERACY_TOL,
            triples: 1000,
            frame_samples: 100,
            homogeneity_scales: vec![0.5, 2.0, 7.0],
            eigen_points: 20,
            sample_box: 2.0,
            field_step: crate::invariant_ops::DEFAULT_FIELD_STEP,
            laplacian_step: crate::invariant_ops::DEFAULT_LAPLACIAN_STEP,
            k_min: -6,
            k_max: 6,
            sup_samples: 512,
            sup_box: 4.0,
            probe_l_max: 4,
            probe_windows: vec![10.0, 40.0],
            probe_v_box: 12.0,
            probe_v_points: 61,
            lambda_points: crate::eigenchain::DEFAULT_LAMBDA_POINTS,
            embed_points: 20,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TaskKind {
    VerifyGroup,
    Symplectic,
    Eigen,
    Chain,
    Probe,
    Embed,
}

impl TaskKind {
    pub fn name(self) -> &'static str {
        match self {
            TaskKind::VerifyGroup => "verify-group",
            TaskKind::Symplectic => "symplectic",
            TaskKind::Eigen => "eigen",
            TaskKind::Chain => "chain",
            TaskKind::Probe => "probe",
            TaskKind::Embed => "embed",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PsiSide {
    /// ψ covers the spectral support of the chain.
    Covering,
    /// ψ avoids the unit sphere.
    OffSphere,
}

/// A chain term as text (`"λ;..|α;..|re,im"` or the short form) or a table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TermInput {
    Text(String),
    Table(ChainTerm),
}

/// Task parameters; which ones are used depends on the task.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TaskParams {
    pub lambda: Option<Vec<f64>>,
    pub alpha: Option<Vec<usize>>,
    pub terms: Vec<TermInput>,
    pub phi: Option<BumpSpec>,
    pub psi: Option<BumpSpec>,
    pub psi_side: Option<PsiSide>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum GroupSource {
    Builtin(String),
    File(PathBuf),
}

impl GroupSource {
    pub fn load(&self) -> Result<TwoStepAlgebra> {
        match self {
            GroupSource::Builtin(name) => TwoStepAlgebra::builtin(name),
            GroupSource::File(path) => TwoStepAlgebra::load_definition(path),
        }
    }

    pub fn label(&self) -> String {
        match self {
            GroupSource::Builtin(name) => name.clone(),
            GroupSource::File(path) => path.display().to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub group: GroupSource,
    pub task: TaskKind,
    pub params: TaskParams,
    pub defaults: Defaults,
    pub seed: u64,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ExperimentFile {
    task: TaskKind,
    group: Option<String>,
    group_file: Option<PathBuf>,
    out: Option<PathBuf>,
    seed: Option<u64>,
    #[serde(default)]
    params: TaskParams,
    #[serde(default)]
    defaults: Defaults,
}

/// 1-based line of a byte offset.
fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

impl ExperimentSpec {
    /// Parses an experiment file; relative `group_file` and `out` paths are
    /// resolved against the file's directory.
    pub fn parse(text: &str, base: Option<&Path>) -> Result<Self> {
        let file: ExperimentFile = toml::from_str(text).map_err(|e| NilError::Parse {
            line: e.span().map(|s| line_of(text, s.start)).unwrap_or(0),
            message: e.message().to_string(),
        })?;
        let resolve = |p: PathBuf| match base {
            Some(b) if p.is_relative() => b.join(p),
            _ => p,
        };
        let group = match (file.group, file.group_file) {
            (Some(_), Some(_)) => return Err(NilError::invalid("give either group or group_file, not both")),
            (Some(name), None) => GroupSource::Builtin(name),
            (None, Some(path)) => GroupSource::File(resolve(path)),
            (None, None) => GroupSource::Builtin("heisenberg-1".into()),
        };
        Ok(ExperimentSpec {
            group,
            task: file.task,
            params: file.params,
            defaults: file.defaults,
            seed: file.seed.unwrap_or(0),
            out: file.out.map(resolve),
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text, path.parent())
    }
}

/// Splits on `;` or `,` and parses each piece.
pub fn parse_list<T: std::str::FromStr>(text: &str, what: &str) -> Result<Vec<T>> {
    text.split([';', ','])
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<T>()
                .map_err(|_| NilError::invalid(format!("cannot parse {what} component '{s}'")))
        })
        .collect()
}

/// Parses `"λ;..|α;..|re,im"`; without `|`, the numbers are read as the
/// `k` components of `λ`, then `n` entries of `α`, then the coefficient
/// (`1` if absent, `re` or `re;im`).
pub fn parse_term(text: &str, k: usize, n: usize) -> Result<ChainTerm> {
    let (lambda, alpha, coeff): (Vec<f64>, Vec<usize>, Vec<f64>) = if text.contains('|') {
        let parts: Vec<&str> = text.split('|').collect();
        if parts.len() > 3 {
            return Err(NilError::invalid(format!("term '{text}' has more than three fields")));
        }
        let coeff = match parts.get(2) {
            Some(c) => parse_list(c, "coefficient")?,
            None => vec![1.0],
        };
        (parse_list(parts[0], "lambda")?, parse_list(parts[1], "alpha")?, coeff)
    } else {
        let nums: Vec<&str> = text.split(';').map(str::trim).filter(|s| !s.is_empty()).collect();
        if nums.len() < k + n {
            return Err(NilError::invalid(format!(
                "term '{text}' needs {k} lambda and {n} alpha components"
            )));
        }
        let lambda = nums[..k].join(";");
        let alpha = nums[k..k + n].join(";");
        let coeff = if nums.len() > k + n {
            parse_list(&nums[k + n..].join(";"), "coefficient")?
        } else {
            vec![1.0]
        };
        (parse_list(&lambda, "lambda")?, parse_list(&alpha, "alpha")?, coeff)
    };
    if lambda.len() != k {
        return Err(NilError::DimensionMismatch {
            what: "term lambda",
            expected: k,
            got: lambda.len(),
        });
    }
    let coeff = match coeff.as_slice() {
        [re] => num_complex::Complex64::new(*re, 0.0),
        [re, im] => num_complex::Complex64::new(*re, *im),
        _ => return Err(NilError::invalid(format!("term '{text}': coefficient must be 're' or 're,im'"))),
    };
    Ok(ChainTerm {
        lambda: CentralFunctional(lambda),
        alpha: MultiIndex(alpha),
        coeff,
    })
}

/// Parses `"c;..|radius"` or `"c;..|radius|order"`.
pub fn parse_bump(text: &str) -> Result<BumpSpec> {
    let parts: Vec<&str> = text.split('|').collect();
    if !(2..=3).contains(&parts.len()) {
        return Err(NilError::invalid(format!("bump '{text}' must be 'center|radius[|order]'")));
    }
    let center = parse_list(parts[0], "bump center")?;
    let radius = parts[1]
        .trim()
        .parse::<f64>()
        .map_err(|_| NilError::invalid(format!("bad bump radius in '{text}'")))?;
    let order = match parts.get(2) {
        Some(o) => o
            .trim()
            .parse::<u32>()
            .map_err(|_| NilError::invalid(format!("bad bump order in '{text}'")))?,
        None => 1,
    };
    let b = BumpSpec { center, radius, order };
    b.validate()?;
    Ok(b)
}

impl TaskParams {
    pub fn chain_spec(&self, k: usize, n: usize) -> Result<ChainSpec> {
        let terms = self
            .terms
            .iter()
            .map(|t| match t {
                TermInput::Text(s) => parse_term(s, k, n),
                TermInput::Table(t) => Ok(t.clone()),
            })
            .collect::<Result<Vec<_>>>()?;
        for t in &terms {
            if t.lambda.0.len() != k {
                return Err(NilError::DimensionMismatch {
                    what: "term lambda",
                    expected: k,
                    got: t.lambda.0.len(),
                });
            }
        }
        Ok(ChainSpec { terms })
    }
}

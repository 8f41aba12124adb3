//! Two-step nilpotent Lie algebras given by structure constants, and the
//! group law on exponential coordinates.
//!
//! An algebra is `g = v ⊕ z` with `dim v = m`, `dim z = k` and brackets
//! `[V_i, V_j] = Σ_l c(i,j,l) T_l`. The centre is spanned by the `T_l`, so the
//! Baker–Campbell–Hausdorff series stops after the first bracket:
//!
//! `(v, z) · (v', z') = (v + v', z + z' + ½[v, v'])`.

use std::fmt;
use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{check_len, NilError, Result};
use crate::sampling;

/// Relative tolerance used when validating antisymmetry of structure constants.
const ANTISYMMETRY_TOL: f64 = 1e-12;

pub const DEFAULT_MW_TRIALS: usize = 16;
pub const DEFAULT_MW_TOL: f64 = 1e-10;

#[derive(Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoStepAlgebra {
    m: usize,
    k: usize,
    /// Dense `c(i, j, l)` stored at `(i * m + j) * k + l` (zero based).
    c: Vec<f64>,
}

impl fmt::Debug for TwoStepAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TwoStepAlgebra(m={}, k={}) {{", self.m, self.k)?;
        for i in 0..self.m {
            for j in (i + 1)..self.m {
                for l in 0..self.k {
                    let v = self.get(i, j, l);
                    if v != 0.0 {
                        write!(f, " [{},{}]_{}={}", i + 1, j + 1, l + 1, v)?;
                    }
                }
            }
        }
        write!(f, " }}")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupElement {
    pub v: Vec<f64>,
    pub z: Vec<f64>,
}

impl GroupElement {
    pub fn new(v: Vec<f64>, z: Vec<f64>) -> Self {
        GroupElement { v, z }
    }

    pub fn identity(m: usize, k: usize) -> Self {
        GroupElement {
            v: vec![0.0; m],
            z: vec![0.0; k],
        }
    }

    /// The horizontal element `(s·dir, 0)`.
    pub fn horizontal(dir: &[f64], s: f64, k: usize) -> Self {
        GroupElement {
            v: dir.iter().map(|x| s * x).collect(),
            z: vec![0.0; k],
        }
    }

    pub fn max_abs_diff(&self, other: &GroupElement) -> f64 {
        self.v
            .iter()
            .zip(&other.v)
            .chain(self.z.iter().zip(&other.z))
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

impl TwoStepAlgebra {
    /// Builds an algebra from dense constants indexed `(i * m + j) * k + l`.
    /// The array must be antisymmetric in `(i, j)`.
    pub fn new(m: usize, k: usize, c: Vec<f64>) -> Result<Self> {
        if m == 0 || k == 0 {
            return Err(NilError::invalid("algebra dimensions m and k must be positive"));
        }
        check_len("structure constants", m * m * k, c.len())?;
        if c.iter().any(|x| !x.is_finite()) {
            return Err(NilError::invalid("structure constants must be finite"));
        }
        let alg = TwoStepAlgebra { m, k, c };
        alg.validate()?;
        Ok(alg)
    }

    /// Builds an algebra from upper-triangular entries `(i, j, l, value)` with
    /// `i < j`, zero based; the lower triangle is filled in by antisymmetry.
    pub fn from_upper(m: usize, k: usize, entries: &[(usize, usize, usize, f64)]) -> Result<Self> {
        if m == 0 || k == 0 {
            return Err(NilError::invalid("algebra dimensions m and k must be positive"));
        }
        let mut c = vec![0.0; m * m * k];
        for &(i, j, l, value) in entries {
            if i >= m || j >= m || l >= k {
                return Err(NilError::invalid(format!(
                    "bracket index ({}, {}, {}) out of range for dims {m} {k}",
                    i + 1,
                    j + 1,
                    l + 1
                )));
            }
            if i >= j {
                return Err(NilError::invalid(format!(
                    "bracket entries must satisfy i < j, got ({}, {})",
                    i + 1,
                    j + 1
                )));
            }
            c[(i * m + j) * k + l] = value;
            c[(j * m + i) * k + l] = -value;
        }
        TwoStepAlgebra::new(m, k, c)
    }

    fn validate(&self) -> Result<()> {
        let scale = self.c.iter().fold(0.0f64, |a, x| a.max(x.abs())).max(1.0);
        for i in 0..self.m {
            for j in i..self.m {
                for l in 0..self.k {
                    let a = self.get(i, j, l);
                    let b = self.get(j, i, l);
                    if (a + b).abs() > ANTISYMMETRY_TOL * scale {
                        return Err(NilError::invalid(format!(
                            "structure constants not antisymmetric: c({},{},{}) = {a}, c({},{},{}) = {b} (symmetric part {})",
                            i + 1,
                            j + 1,
                            l + 1,
                            j + 1,
                            i + 1,
                            l + 1,
                            0.5 * (a + b)
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn k(&self) -> usize {
        self.k
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, l: usize) -> f64 {
        self.c[(i * self.m + j) * self.k + l]
    }

    pub fn constants(&self) -> &[f64] {
        &self.c
    }

    pub fn check_element(&self, g: &GroupElement) -> Result<()> {
        check_len("group element v", self.m, g.v.len())?;
        check_len("group element z", self.k, g.z.len())
    }

    /// `[v, w] = Σ_{i,j} v_i w_j c(i, j, ·)`.
    pub fn bracket(&self, v: &[f64], w: &[f64]) -> Result<Vec<f64>> {
        check_len("bracket left argument", self.m, v.len())?;
        check_len("bracket right argument", self.m, w.len())?;
        Ok(self.bracket_unchecked(v, w))
    }

    pub(crate) fn bracket_unchecked(&self, v: &[f64], w: &[f64]) -> Vec<f64> {
        let (m, k) = (self.m, self.k);
        let mut out = vec![0.0; k];
        for i in 0..m {
            if v[i] == 0.0 {
                continue;
            }
            for j in 0..m {
                let vw = v[i] * w[j];
                if vw == 0.0 {
                    continue;
                }
                let base = (i * m + j) * k;
                for (o, c) in out.iter_mut().zip(&self.c[base..base + k]) {
                    *o += vw * c;
                }
            }
        }
        out
    }

    pub fn multiply(&self, g: &GroupElement, h: &GroupElement) -> Result<GroupElement> {
        self.check_element(g)?;
        self.check_element(h)?;
        Ok(self.multiply_unchecked(g, h))
    }

    pub(crate) fn multiply_unchecked(&self, g: &GroupElement, h: &GroupElement) -> GroupElement {
        let br = self.bracket_unchecked(&g.v, &h.v);
        GroupElement {
            v: g.v.iter().zip(&h.v).map(|(a, b)| a + b).collect(),
            z: g
                .z
                .iter()
                .zip(&h.z)
                .zip(&br)
                .map(|((a, b), c)| a + b + 0.5 * c)
                .collect(),
        }
    }

    pub fn inverse(&self, g: &GroupElement) -> GroupElement {
        GroupElement {
            v: g.v.iter().map(|x| -x).collect(),
            z: g.z.iter().map(|x| -x).collect(),
        }
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement::identity(self.m, self.k)
    }

    /// Matrix of the skew form `B_λ(V, V') = λ([V, V'])` in the `{V_i}` basis.
    pub fn skew_form(&self, lambda: &[f64]) -> Result<DMatrix<f64>> {
        check_len("central functional", self.k, lambda.len())?;
        let (m, k) = (self.m, self.k);
        let mut b = DMatrix::zeros(m, m);
        for i in 0..m {
            for j in (i + 1)..m {
                let base = (i * m + j) * k;
                let s: f64 = self.c[base..base + k]
                    .iter()
                    .zip(lambda)
                    .map(|(c, l)| c * l)
                    .sum();
                b[(i, j)] = s;
                b[(j, i)] = -s;
            }
        }
        Ok(b)
    }

    /// Moore–Wolf test: is `B_λ` nondegenerate for some `λ`?
    ///
    /// Nondegeneracy holds on a Zariski-open set, so `trials` seeded samples on
    /// the unit sphere of `z*` decide it with overwhelming probability.
    pub fn is_mw(&self, trials: usize, seed: u64, tol: f64) -> Result<bool> {
        if !(tol > 0.0) {
            return Err(NilError::invalid("is_mw tolerance must be positive"));
        }
        if self.m % 2 == 1 {
            return Ok(false);
        }
        let mut rng = sampling::rng(seed);
        for _ in 0..trials {
            let lambda = sampling::unit_vector(&mut rng, self.k);
            let b = self.skew_form(&lambda)?;
            let sv = b.singular_values();
            let smallest = sv.iter().cloned().fold(f64::INFINITY, f64::min);
            if smallest > tol {
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// Heisenberg algebra of dimension `2n + 1`: `[V_j, V_{n+j}] = T`.
    pub fn heisenberg(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(NilError::invalid("Heisenberg dimension n must be positive"));
        }
        let entries: Vec<_> = (0..n).map(|j| (j, n + j, 0, 1.0)).collect();
        TwoStepAlgebra::from_upper(2 * n, 1, &entries)
    }

    /// Free two-step nilpotent algebra on `m` generators: `[V_i, V_j] = T_{(i,j)}`
    /// for `i < j`, with the pairs enumerated lexicographically.
    pub fn free_two_step(m: usize) -> Result<Self> {
        if m < 2 {
            return Err(NilError::invalid("free two-step algebra needs m >= 2"));
        }
        let k = m * (m - 1) / 2;
        let mut entries = Vec::with_capacity(k);
        let mut l = 0;
        for i in 0..m {
            for j in (i + 1)..m {
                entries.push((i, j, l, 1.0));
                l += 1;
            }
        }
        TwoStepAlgebra::from_upper(m, k, &entries)
    }

    /// Resolves `heisenberg-<n>` and `free2step-<m>`.
    pub fn builtin(name: &str) -> Result<Self> {
        let parse = |s: &str| {
            s.parse::<usize>()
                .map_err(|_| NilError::invalid(format!("bad dimension in group name '{name}'")))
        };
        if let Some(n) = name.strip_prefix("heisenberg-") {
            TwoStepAlgebra::heisenberg(parse(n)?)
        } else if let Some(m) = name.strip_prefix("free2step-") {
            TwoStepAlgebra::free_two_step(parse(m)?)
        } else {
            Err(NilError::invalid(format!(
                "unknown group '{name}' (expected heisenberg-<n> or free2step-<m>)"
            )))
        }
    }

    /// Parses the line-oriented group-definition format:
    ///
    /// ```text
    /// # comment
    /// dims <m> <k>
    /// bracket <i> <j> <l> <value>     (1-based, i < j)
    /// ```
    pub fn parse_definition(text: &str) -> Result<Self> {
        let mut dims: Option<(usize, usize)> = None;
        let mut entries: Vec<(usize, usize, usize, f64)> = Vec::new();
        let mut seen = std::collections::BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| NilError::Parse {
                line: line_no,
                message,
            };
            let fields: Vec<&str> = line.split_whitespace().collect();
            match fields[0] {
                "dims" => {
                    if dims.is_some() {
                        return Err(err("duplicate 'dims' header".into()));
                    }
                    if fields.len() != 3 {
                        return Err(err("expected 'dims <m> <k>'".into()));
                    }
                    let m: usize = fields[1]
                        .parse()
                        .map_err(|_| err(format!("bad m '{}'", fields[1])))?;
                    let k: usize = fields[2]
                        .parse()
                        .map_err(|_| err(format!("bad k '{}'", fields[2])))?;
                    if m == 0 || k == 0 {
                        return Err(err("dims must be positive".into()));
                    }
                    dims = Some((m, k));
                }
                "bracket" => {
                    let (m, k) = dims.ok_or_else(|| err("'bracket' before 'dims' header".into()))?;
                    if fields.len() != 5 {
                        return Err(err("expected 'bracket <i> <j> <l> <value>'".into()));
                    }
                    let idx = |s: &str, max: usize, name: &str| -> Result<usize> {
                        let v: usize = s.parse().map_err(|_| err(format!("bad {name} '{s}'")))?;
                        if v == 0 || v > max {
                            return Err(err(format!("{name} = {v} out of range 1..={max}")));
                        }
                        Ok(v - 1)
                    };
                    let i = idx(fields[1], m, "i")?;
                    let j = idx(fields[2], m, "j")?;
                    let l = idx(fields[3], k, "l")?;
                    let value: f64 = fields[4]
                        .parse()
                        .map_err(|_| err(format!("bad value '{}'", fields[4])))?;
                    if !value.is_finite() {
                        return Err(err("bracket value must be finite".into()));
                    }
                    if i == j {
                        if value != 0.0 {
                            return Err(err(format!(
                                "[V_{0}, V_{0}] must vanish; got {value} (symmetric part rejected)",
                                i + 1
                            )));
                        }
                        continue;
                    }
                    // Lower-triangle lines are accepted as long as they agree with
                    // antisymmetry; otherwise the symmetric part is reported.
                    let (a, b, v) = if i < j { (i, j, value) } else { (j, i, -value) };
                    if let Some(&prev) = seen.get(&(a, b, l)) {
                        if prev != v {
                            return Err(err(format!(
                                "conflicting bracket for ({}, {}, {}): symmetric part {} is nonzero",
                                a + 1,
                                b + 1,
                                l + 1,
                                0.5 * (prev - v)
                            )));
                        }
                        continue;
                    }
                    seen.insert((a, b, l), v);
                    entries.push((a, b, l, v));
                }
                other => return Err(err(format!("unknown record '{other}'"))),
            }
        }
        let (m, k) = dims.ok_or(NilError::Parse {
            line: 0,
            message: "missing 'dims <m> <k>' header".into(),
        })?;
        TwoStepAlgebra::from_upper(m, k, &entries)
    }

    pub fn load_definition(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        TwoStepAlgebra::parse_definition(&text)
    }

    /// Serializes into the group-definition format (upper triangle only).
    pub fn to_definition(&self) -> String {
        let mut out = format!("dims {} {}\n", self.m, self.k);
        for i in 0..self.m {
            for j in (i + 1)..self.m {
                for l in 0..self.k {
                    let v = self.get(i, j, l);
                    if v != 0.0 {
                        out.push_str(&format!("bracket {} {} {} {:?}\n", i + 1, j + 1, l + 1, v));
                    }
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn e(m: usize, i: usize) -> Vec<f64> {
        let mut v = vec![0.0; m];
        v[i] = 1.0;
        v
    }

    #[test]
    fn heisenberg_bracket_table() {
        let h = TwoStepAlgebra::heisenberg(1).unwrap();
        assert_eq!((h.m(), h.k()), (2, 1));
        assert_eq!(h.bracket(&e(2, 0), &e(2, 1)).unwrap(), vec![1.0]);
        assert_eq!(h.bracket(&e(2, 1), &e(2, 0)).unwrap(), vec![-1.0]);

        let h2 = TwoStepAlgebra::heisenberg(2).unwrap();
        assert_eq!(h2.m(), 4);
        for j in 0..2 {
            assert_eq!(h2.bracket(&e(4, j), &e(4, j + 2)).unwrap(), vec![1.0]);
        }
        assert_eq!(h2.bracket(&e(4, 0), &e(4, 1)).unwrap(), vec![0.0]);
        assert!(TwoStepAlgebra::heisenberg(0).is_err());
    }

    #[test]
    fn free_two_step_bracket_bilinear() {
        let f = TwoStepAlgebra::free_two_step(3).unwrap();
        assert_eq!(f.k(), 3);
        let v = vec![1.0, 1.0, 0.0];
        assert_eq!(f.bracket(&v, &e(3, 2)).unwrap(), vec![0.0, 1.0, 1.0]);
        assert_eq!(TwoStepAlgebra::free_two_step(4).unwrap().k(), 6);
        assert!(TwoStepAlgebra::free_two_step(1).is_err());
    }

    #[test]
    fn free_two_step_m2_is_heisenberg() {
        let f = TwoStepAlgebra::free_two_step(2).unwrap();
        assert_eq!(f, TwoStepAlgebra::heisenberg(1).unwrap());
    }

    #[test]
    fn bracket_dimension_mismatch() {
        let h = TwoStepAlgebra::heisenberg(1).unwrap();
        assert!(matches!(
            h.bracket(&[1.0], &[0.0, 1.0]),
            Err(NilError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn multiply_heisenberg_basis() {
        let h = TwoStepAlgebra::heisenberg(1).unwrap();
        let g = GroupElement::new(e(2, 0), vec![0.0]);
        let k = GroupElement::new(e(2, 1), vec![0.0]);
        let p = h.multiply(&g, &k).unwrap();
        assert_eq!(p, GroupElement::new(vec![1.0, 1.0], vec![0.5]));
        assert_eq!(h.multiply(&g, &h.identity()).unwrap(), g);
        assert_eq!(h.inverse(&g), GroupElement::new(vec![-1.0, 0.0], vec![0.0]));
        assert_eq!(h.inverse(&h.identity()), h.identity().clone());
        assert!(h.multiply(&g, &GroupElement::new(vec![0.0], vec![0.0])).is_err());
    }

    #[test]
    fn is_mw_examples() {
        assert!(TwoStepAlgebra::heisenberg(1).unwrap().is_mw(16, 0, 1e-10).unwrap());
        assert!(!TwoStepAlgebra::free_two_step(3).unwrap().is_mw(16, 0, 1e-10).unwrap());
        // Degenerate even-dimensional example: only [V1, V2] nonzero in m = 4.
        let d = TwoStepAlgebra::from_upper(4, 1, &[(0, 1, 0, 1.0)]).unwrap();
        assert!(!d.is_mw(16, 0, 1e-10).unwrap());
        assert!(d.is_mw(16, 0, -1.0).is_err());
    }

    #[test]
    fn is_mw_free4_matches_pfaffian_oracle() {
        // For m = 4 the Pfaffian of B_λ is λ12 λ34 − λ13 λ24 + λ14 λ23, so B_λ is
        // nondegenerate exactly when that polynomial is nonzero.
        let f = TwoStepAlgebra::free_two_step(4).unwrap();
        let mut rng = sampling::rng(11);
        let mut nonzero = 0;
        for _ in 0..200 {
            let l = sampling::unit_vector(&mut rng, 6);
            // pair order: (12, 13, 14, 23, 24, 34)
            let pf = l[0] * l[5] - l[1] * l[4] + l[2] * l[3];
            let det = f.skew_form(&l).unwrap().determinant();
            assert!((det - pf * pf).abs() < 1e-12);
            if pf.abs() > 1e-6 {
                nonzero += 1;
            }
        }
        assert!(nonzero > 190);
        assert!(f.is_mw(16, 5, 1e-10).unwrap());
    }

    #[test]
    fn is_mw_deterministic() {
        let f = TwoStepAlgebra::free_two_step(4).unwrap();
        let a: Vec<bool> = (0..5).map(|s| f.is_mw(3, s, 0.3).unwrap()).collect();
        let b: Vec<bool> = (0..5).map(|s| f.is_mw(3, s, 0.3).unwrap()).collect();
        assert_eq!(a, b);
    }

    #[test]
    fn definition_round_trip_and_diagnostics() {
        let text = "# free algebra on three generators\ndims 3 3\nbracket 1 2 1 1\nbracket 1 3 2 1\nbracket 2 3 3 1.0\n";
        let a = TwoStepAlgebra::parse_definition(text).unwrap();
        assert_eq!(a, TwoStepAlgebra::free_two_step(3).unwrap());
        assert_eq!(TwoStepAlgebra::parse_definition(&a.to_definition()).unwrap(), a);

        let bad = "dims 2 1\nbracket 1 2 1 1\nbracket 2 1 1 1\n";
        match TwoStepAlgebra::parse_definition(bad) {
            Err(NilError::Parse { line, message }) => {
                assert_eq!(line, 3);
                assert!(message.contains("symmetric part"));
            }
            other => panic!("expected parse error, got {other:?}"),
        }
        let consistent = "dims 2 1\nbracket 1 2 1 1\nbracket 2 1 1 -1\n";
        assert!(TwoStepAlgebra::parse_definition(consistent).is_ok());
        assert!(TwoStepAlgebra::parse_definition("dims 2 1\nbracket 1 1 1 2\n").is_err());
        assert!(TwoStepAlgebra::parse_definition("bracket 1 2 1 1\n").is_err());
        assert!(TwoStepAlgebra::parse_definition("dims 2 1\nbracket 1 3 1 1\n").is_err());
        assert!(TwoStepAlgebra::parse_definition("dims 2 1\nfoo\n").is_err());
    }

    #[test]
    fn new_rejects_symmetric_constants() {
        let c = vec![0.0, 1.0, 1.0, 0.0];
        assert!(TwoStepAlgebra::new(2, 1, c).is_err());
    }

    #[test]
    fn builtin_names() {
        assert_eq!(TwoStepAlgebra::builtin("heisenberg-2").unwrap().m(), 4);
        assert_eq!(TwoStepAlgebra::builtin("free2step-4").unwrap().k(), 6);
        assert!(TwoStepAlgebra::builtin("heisenberg-x").is_err());
        assert!(TwoStepAlgebra::builtin("abelian-3").is_err());
    }

    fn algebras() -> Vec<TwoStepAlgebra> {
        vec![
            TwoStepAlgebra::heisenberg(1).unwrap(),
            TwoStepAlgebra::heisenberg(2).unwrap(),
            TwoStepAlgebra::free_two_step(3).unwrap(),
            TwoStepAlgebra::free_two_step(4).unwrap(),
        ]
    }

    fn element(a: &TwoStepAlgebra, raw: &[i32]) -> GroupElement {
        // Small dyadic rationals keep every operation exact in binary floating point.
        let vals: Vec<f64> = raw.iter().map(|&x| x as f64 / 8.0).collect();
        GroupElement::new(vals[..a.m()].to_vec(), vals[a.m()..a.m() + a.k()].to_vec())
    }

    proptest! {
        #[test]
        fn associativity_exact_on_dyadics(
            which in 0usize..4,
            raw in proptest::collection::vec(-64i32..64, 30),
        ) {
            let a = &algebras()[which];
            let w = a.m() + a.k();
            let g = element(a, &raw[0..w]);
            let h = element(a, &raw[10..10 + w]);
            let x = element(a, &raw[20..20 + w]);
            let lhs = a.multiply(&a.multiply(&g, &h).unwrap(), &x).unwrap();
            let rhs = a.multiply(&g, &a.multiply(&h, &x).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn bracket_antisymmetric(
            which in 0usize..4,
            v in proptest::collection::vec(-5.0f64..5.0, 4),
            w in proptest::collection::vec(-5.0f64..5.0, 4),
        ) {
            let a = &algebras()[which];
            let m = a.m();
            let b1 = a.bracket(&v[..m], &w[..m]).unwrap();
            let b2 = a.bracket(&w[..m], &v[..m]).unwrap();
            for (x, y) in b1.iter().zip(&b2) {
                prop_assert!((x + y).abs() <= 1e-12);
            }
            let self_br = a.bracket(&v[..m], &v[..m]).unwrap();
            prop_assert!(self_br.iter().all(|x| x.abs() <= 1e-12));
        }

        #[test]
        fn inverse_is_two_sided(
            which in 0usize..4,
            raw in proptest::collection::vec(-10.0f64..10.0, 10),
        ) {
            let a = &algebras()[which];
            let g = GroupElement::new(raw[..a.m()].to_vec(), raw[a.m()..a.m() + a.k()].to_vec());
            let id = a.identity();
            prop_assert!(a.multiply(&g, &a.inverse(&g)).unwrap().max_abs_diff(&id) <= 1e-12);
            prop_assert!(a.multiply(&a.inverse(&g), &g).unwrap().max_abs_diff(&id) <= 1e-12);
        }
    }
}

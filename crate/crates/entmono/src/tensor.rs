//! Dense tensor-register primitives.
//!
//! Mixed-radix index bookkeeping for registers of small qudits, partial
//! trace / partial transpose, bipartite Schmidt decomposition, Hermitian
//! eigensolvers, and the JSON state format shared with the CLI.
//!
//! Conventions: subsystem 0 is the most significant digit of a basis index
//! (|abc⟩ ↦ a·d₁d₂ + b·d₂ + c), and Schmidt coefficients are stored as the
//! *squared* values ϑᵢ, descending.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::fmt;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

/// Pure-state norm tolerance: |Σ|aᵢ|² − 1| ≤ this.
pub const NORM_TOL: f64 = 1e-12;
/// Density Hermiticity tolerance: max |ρ − ρ†| entry ≤ this.
pub const HERM_TOL: f64 = 1e-12;
/// Density trace tolerance: |Tr ρ − 1| ≤ this.
pub const TRACE_TOL: f64 = 1e-12;
/// Eigenvalues in (−PSD_NEG_TOL, 0) are float noise and clip to 0; anything
/// more negative fails validation.
pub const PSD_NEG_TOL: f64 = 1e-10;
/// `hermitian_eigenvalues` rejects matrices farther than this from Hermitian.
pub const HERM_EIG_TOL: f64 = 1e-10;
/// Schmidt coefficients must sum to 1 within this.
pub const SCHMIDT_SUM_TOL: f64 = 1e-10;

// ---------------------------------------------------------------------------
// Register dimensions
// ---------------------------------------------------------------------------

/// Subsystem dimensions of a register, e.g. `[2, 2, 2]` for three qubits.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DimVector(Vec<usize>);

impl DimVector {
    /// Each dimension must be ≥ 2 and the register non-empty.
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::Validation("register has no subsystems".into()));
        }
        if let Some(d) = dims.iter().find(|&&d| d < 2) {
            return Err(Error::Validation(format!(
                "subsystem dimension {d} < 2"
            )));
        }
        Ok(DimVector(dims))
    }

    pub fn total(&self) -> usize {
        self.0.iter().product()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    /// Row-major strides: basis index = Σᵢ kᵢ·strideᵢ.
    pub fn strides(&self) -> Vec<usize> {
        let n = self.0.len();
        let mut s = vec![1usize; n];
        for i in (0..n.saturating_sub(1)).rev() {
            s[i] = s[i + 1] * self.0[i + 1];
        }
        s
    }

    /// Digits of `index` in this register's mixed radix.
    pub fn digits(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0usize; self.0.len()];
        for i in (0..self.0.len()).rev() {
            out[i] = index % self.0[i];
            index /= self.0[i];
        }
        out
    }
}

impl std::ops::Index<usize> for DimVector {
    type Output = usize;
    fn index(&self, i: usize) -> &usize {
        &self.0[i]
    }
}

/// Basis offsets contributed by the subsystems in `subs` (in the order given)
/// for every joint value of those subsystems. `offsets[m]` is the full-index
/// contribution of joint value `m`, where `m` runs over the sub-register in
/// row-major order.
fn subsystem_offsets(dims: &DimVector, subs: &[usize]) -> Vec<usize> {
    let strides = dims.strides();
    let sub_dims: Vec<usize> = subs.iter().map(|&s| dims[s]).collect();
    let total: usize = sub_dims.iter().product();
    let mut out = vec![0usize; total];
    for (m, slot) in out.iter_mut().enumerate() {
        let mut rem = m;
        let mut off = 0usize;
        for i in (0..subs.len()).rev() {
            off += (rem % sub_dims[i]) * strides[subs[i]];
            rem /= sub_dims[i];
        }
        *slot = off;
    }
    out
}

fn check_subsystem_list(dims: &DimVector, subs: &[usize], what: &str) -> Result<()> {
    if subs.is_empty() {
        return Err(Error::Validation(format!("{what}: empty subsystem list")));
    }
    let mut seen = vec![false; dims.len()];
    for &s in subs {
        if s >= dims.len() {
            return Err(Error::Validation(format!(
                "{what}: subsystem {s} out of range for {} subsystems",
                dims.len()
            )));
        }
        if seen[s] {
            return Err(Error::Validation(format!(
                "{what}: subsystem {s} listed twice"
            )));
        }
        seen[s] = true;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// States
// ---------------------------------------------------------------------------

/// Normalized pure state over a register.
#[derive(Debug, Clone)]
pub struct PureState {
    dims: DimVector,
    amp: CVec,
}

impl PureState {
    pub fn new(dims: DimVector, amp: CVec) -> Result<Self> {
        if amp.len() != dims.total() {
            return Err(Error::Validation(format!(
                "amplitude length {} does not match register dimension {}",
                amp.len(),
                dims.total()
            )));
        }
        let norm2: f64 = amp.iter().map(|a| a.norm_sqr()).sum();
        if (norm2 - 1.0).abs() > NORM_TOL {
            return Err(Error::Validation(format!(
                "state norm² = {norm2} violates normalization beyond {NORM_TOL:e}"
            )));
        }
        Ok(PureState { dims, amp })
    }

    pub fn dims(&self) -> &DimVector {
        &self.dims
    }

    pub fn amplitudes(&self) -> &CVec {
        &self.amp
    }

    pub fn subsystems(&self) -> usize {
        self.dims.len()
    }

    /// ρ = |ψ⟩⟨ψ|; rank-1 and passes density validation by construction.
    pub fn to_density(&self) -> DensityOperator {
        let mat = &self.amp * self.amp.adjoint();
        DensityOperator {
            dims: self.dims.clone(),
            mat,
        }
    }

    /// Reduced density on `keep` (retained in the order given).
    pub fn reduced(&self, keep: &[usize]) -> Result<DensityOperator> {
        check_subsystem_list(&self.dims, keep, "reduced")?;
        let traced: Vec<usize> = (0..self.dims.len())
            .filter(|s| !keep.contains(s))
            .collect();
        let keep_off = subsystem_offsets(&self.dims, keep);
        let dk = keep_off.len();
        let mut mat = CMat::zeros(dk, dk);
        if traced.is_empty() {
            for a in 0..dk {
                for b in 0..dk {
                    mat[(a, b)] = self.amp[keep_off[a]] * self.amp[keep_off[b]].conj();
                }
            }
        } else {
            let tr_off = subsystem_offsets(&self.dims, &traced);
            for a in 0..dk {
                for b in 0..dk {
                    let mut s = C64::new(0.0, 0.0);
                    for &t in &tr_off {
                        s += self.amp[keep_off[a] + t] * self.amp[keep_off[b] + t].conj();
                    }
                    mat[(a, b)] = s;
                }
            }
        }
        let dims = DimVector::new(keep.iter().map(|&s| self.dims[s]).collect())?;
        DensityOperator::new(dims, mat)
    }
}

/// Validated density operator: Hermitian, unit trace, positive semidefinite
/// up to float noise.
#[derive(Debug, Clone)]
pub struct DensityOperator {
    dims: DimVector,
    mat: CMat,
}

impl DensityOperator {
    pub fn new(dims: DimVector, mat: CMat) -> Result<Self> {
        let d = dims.total();
        if mat.nrows() != d || mat.ncols() != d {
            return Err(Error::Validation(format!(
                "matrix is {}×{}, register dimension is {d}",
                mat.nrows(),
                mat.ncols()
            )));
        }
        let herm_err = (0..d)
            .flat_map(|i| (0..d).map(move |j| (i, j)))
            .map(|(i, j)| (mat[(i, j)] - mat[(j, i)].conj()).norm())
            .fold(0.0f64, f64::max);
        if herm_err > HERM_TOL {
            return Err(Error::Validation(format!(
                "matrix deviates from Hermitian by {herm_err:.3e} (> {HERM_TOL:e})"
            )));
        }
        let trace = mat.trace();
        if (trace.re - 1.0).abs() > TRACE_TOL || trace.im.abs() > TRACE_TOL {
            return Err(Error::Validation(format!(
                "trace {trace} deviates from 1 beyond {TRACE_TOL:e}"
            )));
        }
        let eigs = eigh_values(&mat);
        if let Some(&lmin) = eigs.last() {
            if lmin < -PSD_NEG_TOL {
                return Err(Error::Validation(format!(
                    "eigenvalue {lmin:.3e} below the −{PSD_NEG_TOL:e} positivity floor"
                )));
            }
        }
        Ok(DensityOperator { dims, mat })
    }

    pub fn dims(&self) -> &DimVector {
        &self.dims
    }

    pub fn matrix(&self) -> &CMat {
        &self.mat
    }

    /// Tr ρ² (real by Hermiticity).
    pub fn purity(&self) -> f64 {
        self.mat.norm_squared()
    }

    /// Eigendecomposition, descending, with (−PSD_NEG_TOL, 0) noise clipped
    /// to 0. Columns of the returned matrix are the matching eigenvectors.
    pub fn eigen(&self) -> (Vec<f64>, CMat) {
        let (mut vals, vecs) = eigh(&self.mat);
        for v in &mut vals {
            if *v < 0.0 {
                *v = 0.0;
            }
        }
        (vals, vecs)
    }

    /// Number of eigenvalues above `tol`.
    pub fn rank(&self, tol: f64) -> usize {
        self.eigen().0.iter().filter(|&&v| v > tol).count()
    }
}

// ---------------------------------------------------------------------------
// Partitions
// ---------------------------------------------------------------------------

/// Bipartition of register subsystems into side A and side B.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partition {
    side_a: Vec<usize>,
    side_b: Vec<usize>,
}

impl Partition {
    /// Sides must be non-empty and disjoint. Range and coverage checks need
    /// the register and happen in [`Partition::validate_for`] / callers.
    pub fn new(side_a: Vec<usize>, side_b: Vec<usize>) -> Result<Self> {
        if side_a.is_empty() || side_b.is_empty() {
            return Err(Error::Validation("partition side is empty".into()));
        }
        for s in &side_a {
            if side_b.contains(s) {
                return Err(Error::Validation(format!(
                    "subsystem {s} appears on both sides of the partition"
                )));
            }
        }
        for (name, side) in [("A", &side_a), ("B", &side_b)] {
            let mut sorted = side.to_vec();
            sorted.sort_unstable();
            sorted.dedup();
            if sorted.len() != side.len() {
                return Err(Error::Validation(format!(
                    "partition side {name} lists a subsystem twice"
                )));
            }
        }
        Ok(Partition { side_a, side_b })
    }

    /// A = {first}, B = all other subsystems in register order.
    pub fn first_vs_rest(first: usize, n: usize) -> Result<Self> {
        if first >= n {
            return Err(Error::Validation(format!(
                "first subsystem {first} out of range for {n} subsystems"
            )));
        }
        let rest: Vec<usize> = (0..n).filter(|&s| s != first).collect();
        Partition::new(vec![first], rest)
    }

    /// Parses `"0:12"`-style syntax: decimal subsystem digits, sides split
    /// by `:`.
    pub fn parse(s: &str) -> Result<Self> {
        let (a, b) = s
            .split_once(':')
            .ok_or_else(|| Error::Input(format!("partition `{s}` missing `:`")))?;
        let digits = |side: &str| -> Result<Vec<usize>> {
            side.chars()
                .map(|c| {
                    c.to_digit(10)
                        .map(|d| d as usize)
                        .ok_or_else(|| Error::Input(format!("bad subsystem digit `{c}` in `{s}`")))
                })
                .collect()
        };
        let (side_a, side_b) = (digits(a)?, digits(b)?);
        if side_a.is_empty() || side_b.is_empty() {
            return Err(Error::Input(format!("partition `{s}` has an empty side")));
        }
        Partition::new(side_a, side_b)
    }

    pub fn side_a(&self) -> &[usize] {
        &self.side_a
    }

    pub fn side_b(&self) -> &[usize] {
        &self.side_b
    }

    pub fn validate_for(&self, n: usize) -> Result<()> {
        for &s in self.side_a.iter().chain(&self.side_b) {
            if s >= n {
                return Err(Error::Validation(format!(
                    "partition subsystem {s} out of range for {n} subsystems"
                )));
            }
        }
        Ok(())
    }

    pub fn covers(&self, n: usize) -> bool {
        self.side_a.len() + self.side_b.len() == n && self.validate_for(n).is_ok()
    }

    pub fn require_covering(&self, n: usize) -> Result<()> {
        self.validate_for(n)?;
        if !self.covers(n) {
            return Err(Error::Validation(format!(
                "partition {self} must cover all {n} subsystems"
            )));
        }
        Ok(())
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.side_a {
            write!(f, "{s}")?;
        }
        write!(f, ":")?;
        for s in &self.side_b {
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Core operations
// ---------------------------------------------------------------------------

/// Kronecker product.
pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

/// Traces out every subsystem not in `keep`; the kept subsystems appear in
/// the order given.
pub fn partial_trace(rho: &DensityOperator, keep: &[usize]) -> Result<DensityOperator> {
    check_subsystem_list(rho.dims(), keep, "partial_trace")?;
    let n = rho.dims().len();
    let traced: Vec<usize> = (0..n).filter(|s| !keep.contains(s)).collect();
    let keep_off = subsystem_offsets(rho.dims(), keep);
    let dk = keep_off.len();
    let mut out = CMat::zeros(dk, dk);
    let m = rho.matrix();
    if traced.is_empty() {
        for a in 0..dk {
            for b in 0..dk {
                out[(a, b)] = m[(keep_off[a], keep_off[b])];
            }
        }
    } else {
        let tr_off = subsystem_offsets(rho.dims(), &traced);
        for a in 0..dk {
            for b in 0..dk {
                let mut s = C64::new(0.0, 0.0);
                for &t in &tr_off {
                    s += m[(keep_off[a] + t, keep_off[b] + t)];
                }
                out[(a, b)] = s;
            }
        }
    }
    let dims = DimVector::new(keep.iter().map(|&s| rho.dims()[s]).collect())?;
    DensityOperator::new(dims, out)
}

/// Transposes the indices of the subsystems in `subset`. The result is
/// Hermitian but in general not positive semidefinite, so it is returned as a
/// plain matrix.
pub fn partial_transpose(rho: &DensityOperator, subset: &[usize]) -> Result<CMat> {
    check_subsystem_list(rho.dims(), subset, "partial_transpose")?;
    let dims = rho.dims();
    let d = dims.total();
    let strides = dims.strides();
    // For each index, the offset contributed by the transposed subsystems and
    // the remainder contributed by everything else.
    let mut sub_part = vec![0usize; d];
    for (i, slot) in sub_part.iter_mut().enumerate() {
        let digs = dims.digits(i);
        *slot = subset.iter().map(|&s| digs[s] * strides[s]).sum();
    }
    let m = rho.matrix();
    let mut out = CMat::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            let i2 = i - sub_part[i] + sub_part[j];
            let j2 = j - sub_part[j] + sub_part[i];
            out[(i, j)] = m[(i2, j2)];
        }
    }
    Ok(out)
}

/// Σᵢ σᵢ(M): the trace norm (nuclear norm).
pub fn trace_norm(m: &CMat) -> f64 {
    m.clone().svd(false, false).singular_values.iter().sum()
}

/// Bipartite Schmidt data. `coefficients` are the squared Schmidt
/// coefficients ϑᵢ, descending; the state reconstructs as
/// amp = Σᵢ √ϑᵢ · aᵢ ⊗ bᵢ with aᵢ/bᵢ the columns of `vectors_a`/`vectors_b`
/// (under the partition's subsystem ordering).
#[derive(Debug, Clone)]
pub struct SchmidtDecomposition {
    pub coefficients: Vec<f64>,
    pub vectors_a: CMat,
    pub vectors_b: CMat,
}

/// Schmidt decomposition of `psi` across a covering bipartition.
pub fn schmidt(psi: &PureState, p: &Partition) -> Result<SchmidtDecomposition> {
    p.require_covering(psi.subsystems())?;
    let off_a = subsystem_offsets(psi.dims(), p.side_a());
    let off_b = subsystem_offsets(psi.dims(), p.side_b());
    let (da, db) = (off_a.len(), off_b.len());
    let mut m = CMat::zeros(da, db);
    for (ia, &oa) in off_a.iter().enumerate() {
        for (ib, &ob) in off_b.iter().enumerate() {
            m[(ia, ib)] = psi.amplitudes()[oa + ob];
        }
    }
    let svd = m.svd(true, true);
    let coefficients: Vec<f64> = svd.singular_values.iter().map(|s| s * s).collect();
    let total: f64 = coefficients.iter().sum();
    if (total - 1.0).abs() > SCHMIDT_SUM_TOL {
        return Err(Error::Numerical(format!(
            "Schmidt coefficients sum to {total}, off from 1 beyond {SCHMIDT_SUM_TOL:e}"
        )));
    }
    let u = svd.u.expect("svd with vectors");
    let v_t = svd.v_t.expect("svd with vectors");
    Ok(SchmidtDecomposition {
        coefficients,
        vectors_a: u,
        // amp[ia,ib] = Σᵢ σᵢ U[ia,i] Vt[i,ib]: the right Schmidt vectors are
        // the (unconjugated) rows of Vt.
        vectors_b: v_t.transpose(),
    })
}

/// Eigenvalues of a Hermitian matrix, descending. Rejects matrices farther
/// than `HERM_EIG_TOL` from Hermitian.
pub fn hermitian_eigenvalues(m: &CMat) -> Result<Vec<f64>> {
    if m.nrows() != m.ncols() {
        return Err(Error::Validation("matrix not square".into()));
    }
    let herm_err = (0..m.nrows())
        .flat_map(|i| (0..m.ncols()).map(move |j| (i, j)))
        .map(|(i, j)| (m[(i, j)] - m[(j, i)].conj()).norm())
        .fold(0.0f64, f64::max);
    if herm_err > HERM_EIG_TOL {
        return Err(Error::Validation(format!(
            "matrix deviates from Hermitian by {herm_err:.3e} (> {HERM_EIG_TOL:e})"
        )));
    }
    Ok(eigh_values(m))
}

/// Hermitian eigendecomposition, descending eigenvalues with matching
/// eigenvector columns. The input is symmetrized to suppress float noise.
pub(crate) fn eigh(m: &CMat) -> (Vec<f64>, CMat) {
    let h = (m + m.adjoint()).scale(0.5);
    let se = nalgebra::SymmetricEigen::new(h);
    let n = se.eigenvalues.len();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| se.eigenvalues[b].total_cmp(&se.eigenvalues[a]));
    let vals: Vec<f64> = idx.iter().map(|&i| se.eigenvalues[i]).collect();
    let mut vecs = CMat::zeros(n, n);
    for (c, &i) in idx.iter().enumerate() {
        vecs.set_column(c, &se.eigenvectors.column(i));
    }
    (vals, vecs)
}

pub(crate) fn eigh_values(m: &CMat) -> Vec<f64> {
    let h = (m + m.adjoint()).scale(0.5);
    let se = nalgebra::SymmetricEigen::new(h);
    let mut vals: Vec<f64> = se.eigenvalues.iter().copied().collect();
    vals.sort_by(|a, b| b.total_cmp(a));
    vals
}

/// Principal square root of a PSD matrix; negative float noise is clipped.
pub(crate) fn sqrtm_psd(m: &CMat) -> CMat {
    let (vals, vecs) = eigh(m);
    let d = vals.len();
    let diag = CMat::from_diagonal(&CVec::from_iterator(
        d,
        vals.iter().map(|&v| C64::new(v.max(0.0).sqrt(), 0.0)),
    ));
    &vecs * diag * vecs.adjoint()
}

// ---------------------------------------------------------------------------
// JSON state format
// ---------------------------------------------------------------------------

/// A state as loaded from JSON: pure amplitudes or a density matrix.
#[derive(Debug, Clone)]
pub enum QuantumState {
    Pure(PureState),
    Mixed(DensityOperator),
}

impl QuantumState {
    pub fn dims(&self) -> &DimVector {
        match self {
            QuantumState::Pure(p) => p.dims(),
            QuantumState::Mixed(m) => m.dims(),
        }
    }

    pub fn to_density(&self) -> DensityOperator {
        match self {
            QuantumState::Pure(p) => p.to_density(),
            QuantumState::Mixed(m) => m.clone(),
        }
    }

    pub fn as_pure(&self) -> Option<&PureState> {
        match self {
            QuantumState::Pure(p) => Some(p),
            QuantumState::Mixed(_) => None,
        }
    }
}

#[derive(Serialize, Deserialize)]
struct StateJson {
    dims: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    amplitudes: Option<Vec<[f64; 2]>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    matrix: Option<Vec<Vec<[f64; 2]>>>,
}

/// Parses `{"dims": [...], "amplitudes": [[re, im], ...]}` or
/// `{"dims": [...], "matrix": [[[re, im], ...], ...]}`.
pub fn state_from_json_str(text: &str) -> Result<QuantumState> {
    let raw: StateJson =
        serde_json::from_str(text).map_err(|e| Error::Input(format!("bad state JSON: {e}")))?;
    let dims = DimVector::new(raw.dims)?;
    match (raw.amplitudes, raw.matrix) {
        (Some(amp), None) => {
            let v = CVec::from_iterator(amp.len(), amp.iter().map(|&[re, im]| C64::new(re, im)));
            Ok(QuantumState::Pure(PureState::new(dims, v)?))
        }
        (None, Some(rows)) => {
            let d = dims.total();
            if rows.len() != d || rows.iter().any(|r| r.len() != d) {
                return Err(Error::Validation(format!(
                    "matrix must be {d}×{d} for dims {:?}",
                    dims.as_slice()
                )));
            }
            let mut m = CMat::zeros(d, d);
            for (i, row) in rows.iter().enumerate() {
                for (j, &[re, im]) in row.iter().enumerate() {
                    m[(i, j)] = C64::new(re, im);
                }
            }
            Ok(QuantumState::Mixed(DensityOperator::new(dims, m)?))
        }
        (Some(_), Some(_)) => Err(Error::Input(
            "state JSON has both `amplitudes` and `matrix`".into(),
        )),
        (None, None) => Err(Error::Input(
            "state JSON needs `amplitudes` or `matrix`".into(),
        )),
    }
}

pub fn state_from_json_file(path: &std::path::Path) -> Result<QuantumState> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Input(format!("cannot read {}: {e}", path.display())))?;
    state_from_json_str(&text)
}

pub fn pure_to_json(psi: &PureState) -> String {
    let raw = StateJson {
        dims: psi.dims().as_slice().to_vec(),
        amplitudes: Some(psi.amplitudes().iter().map(|a| [a.re, a.im]).collect()),
        matrix: None,
    };
    serde_json::to_string_pretty(&raw).expect("state serializes")
}

pub fn density_to_json(rho: &DensityOperator) -> String {
    let d = rho.dims().total();
    let m = rho.matrix();
    let rows: Vec<Vec<[f64; 2]>> = (0..d)
        .map(|i| (0..d).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect();
    let raw = StateJson {
        dims: rho.dims().as_slice().to_vec(),
        amplitudes: None,
        matrix: Some(rows),
    };
    serde_json::to_string_pretty(&raw).expect("state serializes")
}

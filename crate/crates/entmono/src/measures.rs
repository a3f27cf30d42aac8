//! Bipartite entanglement measures and residual (monogamy) quantities.
//!
//! Pure-state concurrence, the Wootters two-qubit concurrence, negativity
//! under the ‖·‖₁ − 1 convention, Schmidt-coefficient closed forms, the
//! convex-roof extended negativity dispatcher, and the residual
//! entanglements κ (concurrence) and ε (CREN).

use serde::{Deserialize, Serialize};

use crate::convexroof::{roof_upper_bound, RoofConfig, RoofObjective};
use crate::error::{Error, Result};
use crate::tensor::{
    self, C64, CMat, DensityOperator, Partition, PureState, QuantumState,
};

/// Expected agreement between definitional κ and its 4ϑ₁ϑ₂ cross-check.
pub const KAPPA_CROSS_TOL: f64 = 1e-8;
/// Beyond this, the κ cross-check mismatch is treated as a numerical failure.
pub const KAPPA_CROSS_ERR: f64 = 1e-6;
/// CKW non-negativity slack for exact three-qubit residuals.
pub const RESIDUAL_NEG_TOL: f64 = 1e-9;
/// Negativity more negative than this fails; noise above it clips to 0.
pub const NEGATIVITY_NEG_TOL: f64 = 1e-10;

/// How a measure value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedFormPure,
    Wootters,
    SchmidtFormula,
    TraceNorm,
    ConvexRoofUpper,
}

impl Method {
    /// The serialized name of this method.
    pub fn as_str(self) -> &'static str {
        match self {
            Method::ClosedFormPure => "closed_form_pure",
            Method::Wootters => "wootters",
            Method::SchmidtFormula => "schmidt_formula",
            Method::TraceNorm => "trace_norm",
            Method::ConvexRoofUpper => "convex_roof_upper",
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Which entanglement measure a residual quantity is built from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasureKind {
    Concurrence,
    Cren,
}

/// A computed measure with its provenance and, for optimizer-backed values,
/// a sound enclosing interval.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MeasureValue {
    pub value: f64,
    pub method: Method,
    /// `[lower, upper]` with lower ≤ value ≤ upper; present only when the
    /// value is optimizer-bounded rather than exact.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub interval: Option<[f64; 2]>,
    /// Whether the optimizer's restart sweeps stalled below their tolerance.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub converged: Option<bool>,
}

impl MeasureValue {
    fn exact(value: f64, method: Method) -> Self {
        MeasureValue {
            value,
            method,
            interval: None,
            converged: None,
        }
    }
}

/// A residual entanglement κ or ε. The raw value may be tiny-negative from
/// float noise; bound evaluators clamp at 0.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResidualEntanglement {
    pub value: f64,
    pub measure_kind: MeasureKind,
    /// `[lower, upper]` populated when any ingredient is optimizer-bounded.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub uncertainty: Option<[f64; 2]>,
    /// For three-qubit κ: the independent 4ϑ₁ϑ₂ value it must agree with.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cross_check: Option<f64>,
}

/// A scalar with sound lower/upper bounds; `exact` when all three coincide
/// up to float noise (closed-form ingredients).
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Bracket {
    pub value: f64,
    pub lower: f64,
    pub upper: f64,
    pub exact: bool,
}

impl Bracket {
    fn exact(v: f64) -> Self {
        Bracket {
            value: v,
            lower: v,
            upper: v,
            exact: true,
        }
    }
}

// ---------------------------------------------------------------------------
// Pure-state measures
// ---------------------------------------------------------------------------

/// Pure-state concurrence √(2(1 − Tr ρ_A²)) across partition `p`.
pub fn concurrence_pure(psi: &PureState, p: &Partition) -> Result<MeasureValue> {
    p.require_covering(psi.subsystems())?;
    let rho_a = psi.reduced(p.side_a())?;
    let c2 = (2.0 * (1.0 - rho_a.purity())).max(0.0);
    Ok(MeasureValue::exact(c2.sqrt(), Method::ClosedFormPure))
}

/// σ_y ⊗ σ_y as a real matrix.
fn yy() -> CMat {
    let mut m = CMat::zeros(4, 4);
    m[(0, 3)] = C64::new(-1.0, 0.0);
    m[(1, 2)] = C64::new(1.0, 0.0);
    m[(2, 1)] = C64::new(1.0, 0.0);
    m[(3, 0)] = C64::new(-1.0, 0.0);
    m
}

fn require_two_qubit(rho: &DensityOperator, what: &str) -> Result<()> {
    if rho.dims().as_slice() != [2, 2] {
        return Err(Error::Validation(format!(
            "{what} needs a two-qubit state, got dims {:?}",
            rho.dims().as_slice()
        )));
    }
    Ok(())
}

/// Spin flip ρ̃ = (σ_y⊗σ_y) ρ* (σ_y⊗σ_y) of a two-qubit state.
pub fn spin_flip(rho: &DensityOperator) -> Result<CMat> {
    require_two_qubit(rho, "spin_flip")?;
    let yy = yy();
    Ok(&yy * rho.matrix().conjugate() * &yy)
}

/// Descending ϑᵢ = √eig(ρρ̃), computed as the singular values of
/// B = √ρ (σ_y⊗σ_y) conj(√ρ). BB† is similar to ρρ̃, and the SVD route
/// avoids the √noise blow-up of root-taking near zero eigenvalues.
pub fn wootters_thetas(rho: &DensityOperator) -> Result<[f64; 4]> {
    require_two_qubit(rho, "wootters_thetas")?;
    let s = tensor::sqrtm_psd(rho.matrix());
    let b = &s * yy() * s.conjugate();
    let sv = b.svd(false, false).singular_values;
    Ok([sv[0], sv[1], sv[2], sv[3]])
}

/// Wootters concurrence C(ρ) = max{ϑ₁−ϑ₂−ϑ₃−ϑ₄, 0} of a two-qubit state.
pub fn wootters_concurrence(rho: &DensityOperator) -> Result<MeasureValue> {
    let t = wootters_thetas(rho)?;
    let c = (t[0] - t[1] - t[2] - t[3]).clamp(0.0, 1.0);
    Ok(MeasureValue::exact(c, Method::Wootters))
}

/// Tr(ρ ρ̃) = Σᵢ ϑᵢ² for a two-qubit state.
pub fn tilde_overlap(rho: &DensityOperator) -> Result<f64> {
    let flip = spin_flip(rho)?;
    Ok((rho.matrix() * flip).trace().re)
}

/// Negativity N(ρ) = ‖ρ^{T_A}‖₁ − 1 across partition `p` (side A transposed).
pub fn negativity(rho: &DensityOperator, p: &Partition) -> Result<MeasureValue> {
    p.require_covering(rho.dims().len())?;
    let pt = tensor::partial_transpose(rho, p.side_a())?;
    let raw = tensor::trace_norm(&pt) - 1.0;
    if raw < -NEGATIVITY_NEG_TOL {
        return Err(Error::Numerical(format!(
            "trace norm of a partial transpose fell below 1 by {:.3e}",
            -raw
        )));
    }
    Ok(MeasureValue::exact(raw.max(0.0), Method::TraceNorm))
}

/// Pure-state negativity 2Σ_{i<j}√(ϑᵢϑⱼ) = (Σᵢ√ϑᵢ)² − 1 from the Schmidt
/// coefficients.
pub fn negativity_pure_schmidt(psi: &PureState, p: &Partition) -> Result<MeasureValue> {
    let sd = tensor::schmidt(psi, p)?;
    let root_sum: f64 = sd.coefficients.iter().map(|&t| t.sqrt()).sum();
    let sum: f64 = sd.coefficients.iter().sum();
    let n = (root_sum * root_sum - sum).max(0.0);
    Ok(MeasureValue::exact(n, Method::SchmidtFormula))
}

/// Pure-state concurrence 2√(Σ_{i<j}ϑᵢϑⱼ) = √(2(1 − Σᵢϑᵢ²)) from the
/// Schmidt coefficients.
pub fn concurrence_pure_schmidt(psi: &PureState, p: &Partition) -> Result<MeasureValue> {
    let sd = tensor::schmidt(psi, p)?;
    let sum: f64 = sd.coefficients.iter().sum();
    let sq_sum: f64 = sd.coefficients.iter().map(|&t| t * t).sum();
    let c = (2.0 * (sum * sum - sq_sum)).max(0.0).sqrt();
    Ok(MeasureValue::exact(c, Method::SchmidtFormula))
}

// ---------------------------------------------------------------------------
// Convex-roof extended negativity
// ---------------------------------------------------------------------------

/// Convex-roof extended negativity N_c across `p`.
///
/// Pure states use the single-term decomposition (N_c = N); two-qubit mixed
/// states use C(ρ) = N_c(ρ); everything else runs the roof optimizer and
/// returns an upper bound with a sound enclosing interval (PPT negativity as
/// the lower end).
pub fn cren(state: &QuantumState, p: &Partition, cfg: &RoofConfig) -> Result<MeasureValue> {
    match state {
        QuantumState::Pure(psi) => negativity(&psi.to_density(), p),
        QuantumState::Mixed(rho) => {
            p.require_covering(rho.dims().len())?;
            // Two-qubit mixed states: C(ρ) = N_c(ρ), symmetric in the sides.
            if rho.dims().as_slice() == [2, 2] {
                return wootters_concurrence(rho);
            }
            roof_upper_bound(rho, p, RoofObjective::Negativity, cfg)
        }
    }
}

/// CREN of `rho` across `p` with sound lower/upper bounds. Exact for
/// two-qubit or rank-1 inputs, optimizer-bracketed otherwise.
pub fn cren_bracketed(rho: &DensityOperator, p: &Partition, cfg: &RoofConfig) -> Result<Bracket> {
    p.require_covering(rho.dims().len())?;
    if rho.dims().as_slice() == [2, 2] {
        return Ok(Bracket::exact(wootters_concurrence(rho)?.value));
    }
    let mv = cren(&QuantumState::Mixed(rho.clone()), p, cfg)?;
    match mv.interval {
        Some([lo, hi]) => Ok(Bracket {
            value: mv.value,
            lower: lo,
            upper: hi,
            exact: false,
        }),
        None => Ok(Bracket::exact(mv.value)),
    }
}

/// Concurrence of `rho` across `p` with sound lower/upper bounds. Exact for
/// two-qubit inputs (Wootters); optimizer upper bound otherwise, with the
/// lower end supplied by the caller's structural knowledge (default 0).
pub fn concurrence_bracketed(
    rho: &DensityOperator,
    p: &Partition,
    lower_hint: f64,
    cfg: &RoofConfig,
) -> Result<Bracket> {
    p.require_covering(rho.dims().len())?;
    if rho.dims().as_slice() == [2, 2] {
        return Ok(Bracket::exact(wootters_concurrence(rho)?.value));
    }
    let mut roof_cfg = cfg.clone();
    roof_cfg.lower_hint = lower_hint.max(0.0);
    let roof = roof_upper_bound(rho, p, RoofObjective::Concurrence, &roof_cfg)?;
    let upper = roof.value.max(lower_hint);
    Ok(Bracket {
        value: upper,
        lower: lower_hint.max(0.0),
        upper,
        exact: false,
    })
}

// ---------------------------------------------------------------------------
// Residual entanglements
// ---------------------------------------------------------------------------

/// Residual concurrence tangle κ = C²_{A|BC} − C²_{AB} − C²_{AC} of a
/// three-qubit pure state (A = subsystem 0), with the independent 4ϑ₁ϑ₂
/// cross-check from the spin-flip spectrum of ρ_AB.
pub fn residual_kappa(psi: &PureState) -> Result<ResidualEntanglement> {
    if psi.dims().as_slice() != [2, 2, 2] {
        return Err(Error::Validation(format!(
            "residual κ needs three qubits, got dims {:?}",
            psi.dims().as_slice()
        )));
    }
    let c_full = concurrence_pure(psi, &Partition::first_vs_rest(0, 3)?)?.value;
    let rho_ab = psi.reduced(&[0, 1])?;
    let rho_ac = psi.reduced(&[0, 2])?;
    let t = wootters_thetas(&rho_ab)?;
    let c_ab = (t[0] - t[1] - t[2] - t[3]).clamp(0.0, 1.0);
    let c_ac = wootters_concurrence(&rho_ac)?.value;
    let kappa = c_full * c_full - c_ab * c_ab - c_ac * c_ac;
    // ρ_AB of a three-qubit pure state has Schmidt-rank ≤ 2 spin-flip
    // spectrum: ϑ₃ = ϑ₄ = 0 and κ = 4ϑ₁ϑ₂.
    let cross = 4.0 * t[0] * t[1];
    if (kappa - cross).abs() > KAPPA_CROSS_ERR {
        return Err(Error::Numerical(format!(
            "κ = {kappa} disagrees with 4ϑ₁ϑ₂ = {cross} beyond {KAPPA_CROSS_ERR:e}"
        )));
    }
    if kappa < -RESIDUAL_NEG_TOL {
        return Err(Error::Numerical(format!(
            "κ = {kappa} below the −{RESIDUAL_NEG_TOL:e} non-negativity floor"
        )));
    }
    Ok(ResidualEntanglement {
        value: kappa,
        measure_kind: MeasureKind::Concurrence,
        uncertainty: None,
        cross_check: Some(cross),
    })
}

/// CREN bracket for the two-party reduced state on subsystems (a, b) of a
/// pure state: exact Wootters for qubit pairs, optimizer-bracketed otherwise.
pub fn pair_cren_bracket(
    psi: &PureState,
    a: usize,
    b: usize,
    cfg: &RoofConfig,
) -> Result<Bracket> {
    let rho = psi.reduced(&[a, b])?;
    cren_bracketed(&rho, &Partition::new(vec![0], vec![1])?, cfg)
}

/// CREN bracket for the grouped term N_{cA|B₂⋯} on the reduced state over
/// `[first] ++ rest`. Lower bound: the larger of the summation-form bound
/// √(Σⱼ N_c(A,Bⱼ)²) over exact/bracketed pairs and the PPT negativity of the
/// reduced state. Upper bound: the roof optimizer.
pub fn grouped_cren_bracket(
    psi: &PureState,
    first: usize,
    rest: &[usize],
    cfg: &RoofConfig,
) -> Result<Bracket> {
    let mut keep = vec![first];
    keep.extend_from_slice(rest);
    let rho = psi.reduced(&keep)?;
    let p = Partition::first_vs_rest(0, keep.len())?;
    let mut pair_sq = 0.0;
    for &b in rest {
        let pb = pair_cren_bracket(psi, first, b, cfg)?;
        pair_sq += pb.lower * pb.lower;
    }
    let ppt = negativity(&rho, &p)?.value;
    let lower = pair_sq.sqrt().max(ppt).max(0.0);
    let base = cren_bracketed(&rho, &p, cfg)?;
    let upper = base.upper.max(lower);
    Ok(Bracket {
        value: base.value.clamp(lower, upper),
        lower,
        upper,
        exact: false,
    })
}

/// Concurrence bracket for the grouped term C_{A|B₂⋯}: lower bound from the
/// summation-form monogamy over exact pairwise Wootters concurrences, upper
/// bound from the roof optimizer.
pub fn grouped_concurrence_bracket(
    psi: &PureState,
    first: usize,
    rest: &[usize],
    cfg: &RoofConfig,
) -> Result<Bracket> {
    let mut keep = vec![first];
    keep.extend_from_slice(rest);
    let rho = psi.reduced(&keep)?;
    let p = Partition::first_vs_rest(0, keep.len())?;
    let mut pair_sq = 0.0;
    for &b in rest {
        let c = wootters_concurrence(&psi.reduced(&[first, b])?)?.value;
        pair_sq += c * c;
    }
    let lower = pair_sq.sqrt();
    let base = concurrence_bracketed(&rho, &p, lower, cfg)?;
    Ok(Bracket {
        value: base.value.clamp(lower, base.upper),
        lower,
        upper: base.upper,
        exact: false,
    })
}

/// Residual CREN ε = N²_{cA|B₁⋯} − N²_{cAB₁} − N²_{cA|B₂⋯} of a pure state
/// with A = `first` and the Bⱼ the remaining subsystems in register order.
/// For three parties the last term is the plain pairwise N_{cAB₂}; for more,
/// it is a grouped term and `uncertainty` brackets the optimizer.
pub fn residual_epsilon(
    psi: &PureState,
    first: usize,
    cfg: &RoofConfig,
) -> Result<ResidualEntanglement> {
    let n = psi.subsystems();
    if n < 3 {
        return Err(Error::Validation(format!(
            "residual ε needs ≥ 3 subsystems, got {n}"
        )));
    }
    if first >= n {
        return Err(Error::Validation(format!(
            "subsystem {first} out of range for {n} subsystems"
        )));
    }
    let others: Vec<usize> = (0..n).filter(|&s| s != first).collect();
    let full = negativity(&psi.to_density(), &Partition::first_vs_rest(first, n)?)?.value;
    let ab1 = pair_cren_bracket(psi, first, others[0], cfg)?;
    let tail = if n == 3 {
        pair_cren_bracket(psi, first, others[1], cfg)?
    } else {
        grouped_cren_bracket(psi, first, &others[1..], cfg)?
    };
    let full_sq = full * full;
    let value = full_sq - ab1.value * ab1.value - tail.value * tail.value;
    let lower = full_sq - ab1.upper * ab1.upper - tail.upper * tail.upper;
    let upper = full_sq - ab1.lower * ab1.lower - tail.lower * tail.lower;
    let exact = ab1.exact && tail.exact;
    if exact && psi.dims().as_slice() == [2, 2, 2] && value < -RESIDUAL_NEG_TOL {
        return Err(Error::Numerical(format!(
            "ε = {value} below the −{RESIDUAL_NEG_TOL:e} non-negativity floor"
        )));
    }
    Ok(ResidualEntanglement {
        value,
        measure_kind: MeasureKind::Cren,
        uncertainty: if exact { None } else { Some([lower, upper]) },
        cross_check: None,
    })
}

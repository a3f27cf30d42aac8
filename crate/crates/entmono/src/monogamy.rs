//! Monogamy-bound evaluators and the audit engine.
//!
//! Each inequality's right-hand side is a pure arithmetic function of
//! measure ingredients; the audit engine assembles those ingredients for a
//! state (exact where closed forms exist, bracketed where the convex-roof
//! optimizer is involved), evaluates every applicable bound over a ν grid,
//! and issues interval-aware verdicts.

use serde::{Deserialize, Serialize};
use std::fmt;

use crate::convexroof::RoofConfig;
use crate::error::{Error, Result};
use crate::measures::{
    self, Bracket, MeasureKind,
};
use crate::tensor::{Partition, PureState};

/// Squared factors at or below this are treated as exact zeros by the
/// grouped geometric-mean term.
pub const ZERO_FACTOR_TOL: f64 = 1e-18;
/// Absolute floor of the pass/fail tolerance.
pub const ABS_TOL_FLOOR: f64 = 1e-12;
/// Default relative pass/fail tolerance.
pub const DEFAULT_REL_TOL: f64 = 1e-8;

/// A closed real interval [lo, hi].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        debug_assert!(lo <= hi + 1e-12, "interval endpoints out of order");
        Interval { lo, hi }
    }

    pub fn point(v: f64) -> Self {
        Interval { lo: v, hi: v }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }
}

/// The monogamy bounds the audit engine knows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoundId {
    #[serde(rename = "sum_C")]
    SumC,
    #[serde(rename = "prod2020_C")]
    Prod2020C,
    #[serde(rename = "prod2021_C")]
    Prod2021C,
    #[serde(rename = "lemma1_C")]
    Lemma1C,
    #[serde(rename = "theorem1_C")]
    Theorem1C,
    #[serde(rename = "sum_N")]
    SumN,
    #[serde(rename = "prod2021_N")]
    Prod2021N,
    #[serde(rename = "lemma3_N")]
    Lemma3N,
    #[serde(rename = "theorem2_N")]
    Theorem2N,
}

impl BoundId {
    pub fn as_str(&self) -> &'static str {
        match self {
            BoundId::SumC => "sum_C",
            BoundId::Prod2020C => "prod2020_C",
            BoundId::Prod2021C => "prod2021_C",
            BoundId::Lemma1C => "lemma1_C",
            BoundId::Theorem1C => "theorem1_C",
            BoundId::SumN => "sum_N",
            BoundId::Prod2021N => "prod2021_N",
            BoundId::Lemma3N => "lemma3_N",
            BoundId::Theorem2N => "theorem2_N",
        }
    }
}

impl fmt::Display for BoundId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Interval-aware comparison outcome for LHS ≥ RHS.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    /// LHS clears even the worst-case RHS endpoint.
    HoldsWithCertainty,
    /// LHS falls below even the best-case RHS endpoint.
    FailsWithCertainty,
    /// LHS clears the optimizer's best estimate but not the worst case.
    HoldsAtBestEstimate,
    /// The interval is too wide to call either way.
    Indeterminate,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::HoldsWithCertainty => "holds_with_certainty",
            Verdict::FailsWithCertainty => "fails_with_certainty",
            Verdict::HoldsAtBestEstimate => "holds_at_best_estimate",
            Verdict::Indeterminate => "indeterminate",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

fn require_nu(nu: f64) -> Result<()> {
    if nu < 2.0 {
        return Err(Error::Validation(format!("ν = {nu} below the ν ≥ 2 scope")));
    }
    Ok(())
}

fn bracket_pow(x_plus: f64, y_plus: f64, nu: f64) -> f64 {
    (4.0 * x_plus * y_plus).max(0.0).powf(nu / 4.0)
}

/// RHS [4(C²_AB + κ/2)(C²_AC + κ/2)]^{ν/4} (the κ-half-terms product form;
/// also the CREN form with ε and squared CRENs). κ is clamped at 0.
pub fn kappa_half_terms(c_ab_sq: f64, c_ac_sq: f64, kappa: f64, nu: f64) -> Result<f64> {
    require_nu(nu)?;
    let k = kappa.max(0.0);
    Ok(bracket_pow(c_ab_sq + 0.5 * k, c_ac_sq + 0.5 * k, nu))
}

/// RHS (4C²_AB·C²_AC + κ²)^{ν/4} (the 2021 product form; CREN variant takes
/// CRENs and ε). Arguments are the unsquared pairwise values.
pub fn zhang2021(c_ab: f64, c_ac: f64, kappa: f64, nu: f64) -> Result<f64> {
    require_nu(nu)?;
    let k = kappa.max(0.0);
    let prod = c_ab * c_ab * c_ac * c_ac;
    Ok((4.0 * prod + k * k).max(0.0).powf(nu / 4.0))
}

/// RHS 2(C²_AB·C²_AC + κ²/4)^{1/2} (the 2020 product form, ν = 2 only).
/// Algebraically identical to [`zhang2021`] at ν = 2.
pub fn zhang2020(c_ab: f64, c_ac: f64, kappa: f64) -> f64 {
    let k = kappa.max(0.0);
    let prod = c_ab * c_ab * c_ac * c_ac;
    2.0 * (prod + 0.25 * k * k).max(0.0).sqrt()
}

/// RHS Σᵢ vᵢ^ν (the summation form, both measure kinds).
pub fn sum_bound(pairwise: &[f64], nu: f64) -> f64 {
    pairwise.iter().map(|&v| v.max(0.0).powf(nu)).sum()
}

/// The arithmetic–geometric mean chain over N−1 squared pairwise values:
/// returns ((Πc²)^{1/(N−1)}, (Σc²)/(N−1), total²/(N−1)). Callers assert
/// geo ≤ arith ≤ cap. `pairwise_sq` must be non-empty.
pub fn amgm_chain(pairwise_sq: &[f64], total_sq: f64) -> (f64, f64, f64) {
    assert!(!pairwise_sq.is_empty(), "amgm_chain needs ≥ 1 pairwise value");
    let n1 = pairwise_sq.len() as f64;
    let geo = pairwise_sq
        .iter()
        .map(|&v| v.max(0.0))
        .product::<f64>()
        .powf(1.0 / n1);
    let arith = pairwise_sq.iter().sum::<f64>() / n1;
    (geo, arith, total_sq / n1)
}

/// The grouped geometric-mean term (N−2)(Π C²_{AB_{i+1}})^{1/(N−2)} with
/// zero factors dropped: k·(Π over nonzero)^{1/k} for k nonzero factors
/// (0 when none). The AM–GM inequality over the nonzero subset still lower
/// bounds the full pairwise sum, so the bound stays valid while remaining
/// non-trivial on product-like states.
fn grouped_geo_term(pairwise_sq: &[f64]) -> f64 {
    let nz: Vec<f64> = pairwise_sq
        .iter()
        .copied()
        .filter(|&v| v > ZERO_FACTOR_TOL)
        .collect();
    match nz.len() {
        0 => 0.0,
        1 => nz[0],
        2 => 2.0 * (nz[0] * nz[1]).sqrt(),
        k => k as f64 * nz.iter().product::<f64>().powf(1.0 / k as f64),
    }
}

/// RHS of the N-party theorem form
/// [4(C²_{AB₁} + κ/2)(term + κ/2)]^{ν/4} with `term` the grouped
/// geometric-mean of the remaining squared pairwise values. Monotone
/// non-decreasing in κ, so an input interval maps to the interval of values
/// at its endpoints. At N = 3 (a single remaining value) this reduces
/// exactly to [`kappa_half_terms`].
pub fn theorem_bound(
    c_ab1_sq: f64,
    pairwise_rest_sq: &[f64],
    kappa: Interval,
    nu: f64,
) -> Result<Interval> {
    require_nu(nu)?;
    let term = grouped_geo_term(pairwise_rest_sq);
    let eval = |k: f64| {
        let kc = k.max(0.0);
        bracket_pow(c_ab1_sq + 0.5 * kc, term + 0.5 * kc, nu)
    };
    Ok(Interval::new(eval(kappa.lo), eval(kappa.hi)))
}

/// The three-party CREN product RHS evaluated from counterexample
/// ingredients (squared CRENs and ε); identical arithmetic to
/// [`kappa_half_terms`].
pub fn counterexample_bound(n_sq: f64, np_sq: f64, eps: f64, nu: f64) -> Result<f64> {
    kappa_half_terms(n_sq, np_sq, eps, nu)
}

// ---------------------------------------------------------------------------
// ν grids and verdicts
// ---------------------------------------------------------------------------

/// Inclusive arithmetic ν grid.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct NuGrid {
    pub min: f64,
    pub max: f64,
    pub step: f64,
}

impl NuGrid {
    pub fn new(min: f64, max: f64, step: f64) -> Result<Self> {
        if min < 2.0 {
            return Err(Error::Input(format!("ν min = {min} below 2")));
        }
        if step <= 0.0 {
            return Err(Error::Input(format!("ν step = {step} must be > 0")));
        }
        if max < min {
            return Err(Error::Input(format!("ν max = {max} below min = {min}")));
        }
        Ok(NuGrid { min, max, step })
    }

    /// min, min+step, …, up to max inclusive (float-safe endpoint handling).
    pub fn values(&self) -> Vec<f64> {
        let count = ((self.max - self.min) / self.step + 1e-9).floor() as usize;
        (0..=count).map(|i| self.min + i as f64 * self.step).collect()
    }
}

impl Default for NuGrid {
    fn default() -> Self {
        NuGrid {
            min: 2.0,
            max: 10.0,
            step: 0.25,
        }
    }
}

/// Interval-aware verdict for LHS ≥ RHS with tolerance
/// max(ABS_TOL_FLOOR, rel·max(|LHS|, |RHS_hi|)).
pub fn verdict(lhs: f64, rhs: Interval, rhs_best: f64, rel_tol: f64) -> Verdict {
    let tol = (rel_tol * lhs.abs().max(rhs.hi.abs())).max(ABS_TOL_FLOOR);
    if lhs - rhs.hi >= -tol {
        Verdict::HoldsWithCertainty
    } else if lhs - rhs.lo < -tol {
        Verdict::FailsWithCertainty
    } else if lhs - rhs_best >= -tol {
        Verdict::HoldsAtBestEstimate
    } else {
        Verdict::Indeterminate
    }
}

// ---------------------------------------------------------------------------
// Audit engine
// ---------------------------------------------------------------------------

/// Audit configuration: ν grid, pass/fail tolerance, and roof knobs.
#[derive(Debug, Clone)]
pub struct AuditOptions {
    pub nu_grid: NuGrid,
    pub rel_tol: f64,
    pub roof: RoofConfig,
}

impl Default for AuditOptions {
    fn default() -> Self {
        AuditOptions {
            nu_grid: NuGrid::default(),
            rel_tol: DEFAULT_REL_TOL,
            roof: RoofConfig::default(),
        }
    }
}

/// The measure ingredients an audit ran on. Pairwise entries follow the
/// B-party register order; `grouped` is the N ≥ 4 grouped term bracket.
#[derive(Debug, Clone, Serialize)]
pub struct AuditIngredients {
    /// The one-vs-rest measure value (C or N of the pure input).
    pub lhs: f64,
    pub pairwise: Vec<Bracket>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grouped: Option<Bracket>,
    /// Residual κ/ε enclosure (raw; evaluators clamp at 0).
    pub residual: Interval,
    pub residual_best: f64,
}

/// One bound at one ν.
#[derive(Debug, Clone, Serialize)]
pub struct BoundEval {
    pub id: BoundId,
    pub rhs_low: f64,
    pub rhs_high: f64,
    pub rhs_best: f64,
    /// LHS^ν − rhs_high (the certified worst-case margin).
    pub margin: f64,
    pub verdict: Verdict,
}

/// All bounds at one ν.
#[derive(Debug, Clone, Serialize)]
pub struct NuRow {
    pub nu: f64,
    pub lhs: f64,
    pub bounds: Vec<BoundEval>,
    /// Bound with the largest best-estimate RHS (ties: first in id order).
    pub tightest: BoundId,
}

/// Full audit result for one state and measure kind.
#[derive(Debug, Clone, Serialize)]
pub struct AuditReport {
    pub label: String,
    pub measure_kind: MeasureKind,
    pub first: usize,
    pub dims: Vec<usize>,
    pub rel_tolerance: f64,
    pub ingredients: AuditIngredients,
    pub rows: Vec<NuRow>,
}

impl AuditReport {
    pub fn all_hold_with_certainty(&self) -> bool {
        self.rows
            .iter()
            .flat_map(|r| &r.bounds)
            .all(|b| b.verdict == Verdict::HoldsWithCertainty)
    }

    pub fn any_fails_with_certainty(&self) -> bool {
        self.rows
            .iter()
            .flat_map(|r| &r.bounds)
            .any(|b| b.verdict == Verdict::FailsWithCertainty)
    }

    /// One CSV row per ν × bound; numbers in round-trip (shortest) form.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("label,nu,bound_id,lhs,rhs_low,rhs_high,margin,verdict\n");
        for row in &self.rows {
            for b in &row.bounds {
                out.push_str(&format!(
                    "{},{},{},{},{},{},{},{}\n",
                    self.label, row.nu, b.id, row.lhs, b.rhs_low, b.rhs_high, b.margin, b.verdict
                ));
            }
        }
        out
    }
}

struct Ingredients {
    lhs: f64,
    pairwise: Vec<Bracket>,
    grouped: Option<Bracket>,
    residual: Interval,
    residual_best: f64,
}

fn concurrence_ingredients(
    psi: &PureState,
    first: usize,
    opts: &AuditOptions,
) -> Result<Ingredients> {
    if psi.dims().as_slice().iter().any(|&d| d != 2) {
        return Err(Error::Validation(
            "concurrence audits need a qubit register".into(),
        ));
    }
    let n = psi.subsystems();
    let others: Vec<usize> = (0..n).filter(|&s| s != first).collect();
    let lhs = measures::concurrence_pure(psi, &Partition::first_vs_rest(first, n)?)?.value;
    let mut pairwise = Vec::with_capacity(others.len());
    for &b in &others {
        let c = measures::wootters_concurrence(&psi.reduced(&[first, b])?)?.value;
        pairwise.push(Bracket {
            value: c,
            lower: c,
            upper: c,
            exact: true,
        });
    }
    let lhs_sq = lhs * lhs;
    if n == 3 {
        let k = lhs_sq - pairwise[0].value.powi(2) - pairwise[1].value.powi(2);
        Ok(Ingredients {
            lhs,
            pairwise,
            grouped: None,
            residual: Interval::point(k),
            residual_best: k,
        })
    } else {
        let grouped =
            measures::grouped_concurrence_bracket(psi, first, &others[1..], &opts.roof)?;
        let c1_sq = pairwise[0].value.powi(2);
        let residual = Interval::new(
            lhs_sq - c1_sq - grouped.upper * grouped.upper,
            lhs_sq - c1_sq - grouped.lower * grouped.lower,
        );
        let residual_best = lhs_sq - c1_sq - grouped.value * grouped.value;
        Ok(Ingredients {
            lhs,
            pairwise,
            grouped: Some(grouped),
            residual,
            residual_best,
        })
    }
}

fn cren_ingredients(psi: &PureState, first: usize, opts: &AuditOptions) -> Result<Ingredients> {
    let n = psi.subsystems();
    let others: Vec<usize> = (0..n).filter(|&s| s != first).collect();
    let lhs =
        measures::negativity(&psi.to_density(), &Partition::first_vs_rest(first, n)?)?.value;
    let mut pairwise = Vec::with_capacity(others.len());
    for &b in &others {
        pairwise.push(measures::pair_cren_bracket(psi, first, b, &opts.roof)?);
    }
    let lhs_sq = lhs * lhs;
    if n == 3 {
        let (b1, b2) = (pairwise[0], pairwise[1]);
        let residual = Interval::new(
            lhs_sq - b1.upper * b1.upper - b2.upper * b2.upper,
            lhs_sq - b1.lower * b1.lower - b2.lower * b2.lower,
        );
        let residual_best = lhs_sq - b1.value * b1.value - b2.value * b2.value;
        Ok(Ingredients {
            lhs,
            pairwise,
            grouped: None,
            residual,
            residual_best,
        })
    } else {
        let grouped = measures::grouped_cren_bracket(psi, first, &others[1..], &opts.roof)?;
        let b1 = pairwise[0];
        let residual = Interval::new(
            lhs_sq - b1.upper * b1.upper - grouped.upper * grouped.upper,
            lhs_sq - b1.lower * b1.lower - grouped.lower * grouped.lower,
        );
        let residual_best =
            lhs_sq - b1.value * b1.value - grouped.value * grouped.value;
        Ok(Ingredients {
            lhs,
            pairwise,
            grouped: Some(grouped),
            residual,
            residual_best,
        })
    }
}

fn eval_bound(
    id: BoundId,
    ing: &Ingredients,
    nu: f64,
    lhs_pow: f64,
    rel_tol: f64,
) -> Result<BoundEval> {
    let pw = &ing.pairwise;
    let (lo, hi, best) = match id {
        BoundId::SumC | BoundId::SumN => (
            sum_bound(&pw.iter().map(|b| b.lower).collect::<Vec<_>>(), nu),
            sum_bound(&pw.iter().map(|b| b.upper).collect::<Vec<_>>(), nu),
            sum_bound(&pw.iter().map(|b| b.value).collect::<Vec<_>>(), nu),
        ),
        BoundId::Prod2020C => (
            zhang2020(pw[0].lower, pw[1].lower, ing.residual.lo),
            zhang2020(pw[0].upper, pw[1].upper, ing.residual.hi),
            zhang2020(pw[0].value, pw[1].value, ing.residual_best),
        ),
        BoundId::Prod2021C | BoundId::Prod2021N => (
            zhang2021(pw[0].lower, pw[1].lower, ing.residual.lo, nu)?,
            zhang2021(pw[0].upper, pw[1].upper, ing.residual.hi, nu)?,
            zhang2021(pw[0].value, pw[1].value, ing.residual_best, nu)?,
        ),
        BoundId::Lemma1C | BoundId::Lemma3N => (
            kappa_half_terms(
                pw[0].lower * pw[0].lower,
                pw[1].lower * pw[1].lower,
                ing.residual.lo,
                nu,
            )?,
            kappa_half_terms(
                pw[0].upper * pw[0].upper,
                pw[1].upper * pw[1].upper,
                ing.residual.hi,
                nu,
            )?,
            kappa_half_terms(
                pw[0].value * pw[0].value,
                pw[1].value * pw[1].value,
                ing.residual_best,
                nu,
            )?,
        ),
        BoundId::Theorem1C | BoundId::Theorem2N => {
            let rest_lo: Vec<f64> = pw[1..].iter().map(|b| b.lower * b.lower).collect();
            let rest_hi: Vec<f64> = pw[1..].iter().map(|b| b.upper * b.upper).collect();
            let rest_best: Vec<f64> = pw[1..].iter().map(|b| b.value * b.value).collect();
            let lo = theorem_bound(
                pw[0].lower * pw[0].lower,
                &rest_lo,
                Interval::point(ing.residual.lo),
                nu,
            )?
            .lo;
            let hi = theorem_bound(
                pw[0].upper * pw[0].upper,
                &rest_hi,
                Interval::point(ing.residual.hi),
                nu,
            )?
            .hi;
            let best = theorem_bound(
                pw[0].value * pw[0].value,
                &rest_best,
                Interval::point(ing.residual_best),
                nu,
            )?
            .lo;
            (lo, hi, best)
        }
    };
    // Guard against float noise inverting near-degenerate endpoints.
    let (lo, hi) = (lo.min(hi), hi.max(lo));
    let best = best.clamp(lo, hi);
    let rhs = Interval::new(lo, hi);
    Ok(BoundEval {
        id,
        rhs_low: lo,
        rhs_high: hi,
        rhs_best: best,
        margin: lhs_pow - hi,
        verdict: verdict(lhs_pow, rhs, best, rel_tol),
    })
}

/// Bounds applicable to a given measure kind and party count, in reporting
/// order. `prod2020_C` only exists at ν = 2 and is filtered per grid point.
fn applicable_bounds(kind: MeasureKind, n: usize) -> Vec<BoundId> {
    match (kind, n) {
        (MeasureKind::Concurrence, 3) => vec![
            BoundId::SumC,
            BoundId::Prod2020C,
            BoundId::Prod2021C,
            BoundId::Lemma1C,
        ],
        (MeasureKind::Concurrence, _) => vec![BoundId::SumC, BoundId::Theorem1C],
        (MeasureKind::Cren, 3) => vec![BoundId::SumN, BoundId::Prod2021N, BoundId::Lemma3N],
        (MeasureKind::Cren, _) => vec![BoundId::SumN, BoundId::Theorem2N],
    }
}

/// Audits every applicable monogamy bound for `psi` with A = `first` over
/// the ν grid. Pure input; concurrence kind requires a qubit register.
pub fn audit(
    psi: &PureState,
    first: usize,
    kind: MeasureKind,
    opts: &AuditOptions,
    label: &str,
) -> Result<AuditReport> {
    let n = psi.subsystems();
    if n < 3 {
        return Err(Error::Validation(format!(
            "monogamy audits need ≥ 3 subsystems, got {n}"
        )));
    }
    if first >= n {
        return Err(Error::Validation(format!(
            "subsystem {first} out of range for {n} subsystems"
        )));
    }
    let ing = match kind {
        MeasureKind::Concurrence => concurrence_ingredients(psi, first, opts)?,
        MeasureKind::Cren => cren_ingredients(psi, first, opts)?,
    };
    let ids = applicable_bounds(kind, n);
    let mut rows = Vec::new();
    for nu in opts.nu_grid.values() {
        let lhs_pow = ing.lhs.powf(nu);
        let mut bounds = Vec::new();
        for &id in &ids {
            if id == BoundId::Prod2020C && (nu - 2.0).abs() > 1e-12 {
                continue;
            }
            bounds.push(eval_bound(id, &ing, nu, lhs_pow, opts.rel_tol)?);
        }
        // Strict comparison keeps the earliest id on ties.
        let mut tightest = bounds.first().expect("at least one bound").id;
        let mut tightest_rhs = bounds[0].rhs_best;
        for b in &bounds[1..] {
            if b.rhs_best > tightest_rhs {
                tightest_rhs = b.rhs_best;
                tightest = b.id;
            }
        }
        rows.push(NuRow {
            nu,
            lhs: lhs_pow,
            bounds,
            tightest,
        });
    }
    Ok(AuditReport {
        label: label.to_string(),
        measure_kind: kind,
        first,
        dims: psi.dims().as_slice().to_vec(),
        rel_tolerance: opts.rel_tol,
        ingredients: AuditIngredients {
            lhs: ing.lhs,
            pairwise: ing.pairwise.clone(),
            grouped: ing.grouped,
            residual: ing.residual,
            residual_best: ing.residual_best,
        },
        rows,
    })
}

//! Convex-roof upper bounds by descent over pure-state decompositions.
//!
//! A rank-r mixed state's decompositions of size m are exactly the m×r
//! isometries applied to its eigen-ensemble, so the optimizer walks the
//! isometry manifold with pairwise Givens rotations, minimizing
//! Σⱼ pⱼ·measure(ψⱼ). The result is an upper bound on the roof; reports
//! carry it as one, never as an exact value.

use nalgebra::SymmetricEigen;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::measures::{MeasureValue, Method};
use crate::states::split_seed;
use crate::tensor::{self, C64, CMat, CVec, DensityOperator, Partition};

/// Eigenvalues below this are dropped from the eigen-ensemble.
pub const RANK_TOL: f64 = 1e-12;
/// Every working decomposition must reconstruct ρ within this (max entry).
pub const RECONSTRUCTION_TOL: f64 = 1e-8;
/// Ensemble weights must sum to 1 within this.
pub const WEIGHT_SUM_TOL: f64 = 1e-10;
/// Smallest pair-rotation step before a restart is considered stalled.
const STEP_FLOOR: f64 = 1e-3;
/// Initial pair-rotation step (radians).
const STEP_INIT: f64 = 0.5;

/// Which pure-state measure the roof averages.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RoofObjective {
    Negativity,
    Concurrence,
}

/// Optimizer knobs. Defaults suit the small registers this crate targets.
#[derive(Debug, Clone)]
pub struct RoofConfig {
    /// Decomposition cardinality m; defaults to r² (r = rank of ρ).
    pub ensemble_size: Option<usize>,
    /// Independent restarts; the first uses the eigen-ensemble itself.
    pub restarts: usize,
    /// Sweep cap per restart.
    pub max_iters: usize,
    /// Objective-change convergence tolerance per sweep.
    pub tol: f64,
    /// Base seed; restart i draws from a stream split off (seed, i).
    pub seed: u64,
    /// Known lower bound on the roof, folded into the reported interval.
    pub lower_hint: f64,
}

impl Default for RoofConfig {
    fn default() -> Self {
        RoofConfig {
            ensemble_size: None,
            restarts: 16,
            max_iters: 200,
            tol: 1e-8,
            seed: 7,
            lower_hint: 0.0,
        }
    }
}

/// A size-m pure-state decomposition of ρ, as the isometry V (m×r) acting on
/// the eigen-ensemble, together with the ensemble it induces.
#[derive(Debug, Clone)]
pub struct DecompositionPoint {
    pub ensemble_size: usize,
    /// m×r matrix with orthonormal columns; |ψ̃ⱼ⟩ = Σₖ Vⱼₖ √λₖ|eₖ⟩.
    pub isometry: CMat,
    /// (pⱼ, normalized |ψⱼ⟩), zero-weight members dropped.
    pub ensemble: Vec<(f64, CVec)>,
}

/// Reorders a density's subsystems so side A comes first, returning the
/// permuted operator and the bipartite dimensions (d_A, d_B).
pub(crate) fn bipartite_layout(
    rho: &DensityOperator,
    p: &Partition,
) -> Result<(DensityOperator, usize, usize)> {
    let order: Vec<usize> = p.side_a().iter().chain(p.side_b()).copied().collect();
    let perm = tensor::partial_trace(rho, &order)?; // keep-all = permutation
    let da: usize = p.side_a().iter().map(|&s| rho.dims()[s]).product();
    let db: usize = p.side_b().iter().map(|&s| rho.dims()[s]).product();
    Ok((perm, da, db))
}

/// Eigenvalues of M̃M̃† (or M̃†M̃, whichever is smaller) for the dA×dB
/// reshape M̃ of an unnormalized vector. These are the Schmidt weights
/// scaled by the vector's squared norm.
fn gram_spectrum(v: &CVec, da: usize, db: usize) -> Vec<f64> {
    let small = da.min(db);
    if small == 1 {
        return vec![v.norm_squared()];
    }
    if small == 2 {
        // 2×2 Hermitian closed form on the smaller Gram matrix.
        let (mut g00, mut g11) = (0.0f64, 0.0f64);
        let mut g01 = C64::new(0.0, 0.0);
        if da <= db {
            for j in 0..db {
                let (a, b) = (v[j], v[db + j]);
                g00 += a.norm_sqr();
                g11 += b.norm_sqr();
                g01 += a * b.conj();
            }
        } else {
            for i in 0..da {
                let (a, b) = (v[2 * i], v[2 * i + 1]);
                g00 += a.norm_sqr();
                g11 += b.norm_sqr();
                g01 += a.conj() * b;
            }
        }
        let half_tr = 0.5 * (g00 + g11);
        let disc = (0.25 * (g00 - g11) * (g00 - g11) + g01.norm_sqr()).max(0.0).sqrt();
        return vec![half_tr + disc, (half_tr - disc).max(0.0)];
    }
    let mut m = CMat::zeros(da, db);
    for i in 0..da {
        for j in 0..db {
            m[(i, j)] = v[i * db + j];
        }
    }
    let g = if da <= db {
        &m * m.adjoint()
    } else {
        m.adjoint() * &m
    };
    let se = SymmetricEigen::new(g);
    se.eigenvalues.iter().map(|&x| x.max(0.0)).collect()
}

/// The context fixed across one roof call: the bipartite reshape of a member
/// vector and the measure being averaged.
#[derive(Clone, Copy)]
struct SplitObjective {
    da: usize,
    db: usize,
    obj: RoofObjective,
}

impl SplitObjective {
    /// pⱼ·measure(ψⱼ) evaluated directly on the unnormalized member ψ̃ⱼ:
    /// negativity gives (Σᵢ√sᵢ)² − Σᵢsᵢ, concurrence √(2((Σsᵢ)² − Σsᵢ²)),
    /// with sᵢ the Gram spectrum of the reshape.
    fn member(self, v: &CVec) -> f64 {
        let s = gram_spectrum(v, self.da, self.db);
        match self.obj {
            RoofObjective::Negativity => {
                let root_sum: f64 = s.iter().map(|&x| x.max(0.0).sqrt()).sum();
                let total: f64 = s.iter().sum();
                (root_sum * root_sum - total).max(0.0)
            }
            RoofObjective::Concurrence => {
                let total: f64 = s.iter().sum();
                let sq: f64 = s.iter().map(|&x| x * x).sum();
                (2.0 * (total * total - sq)).max(0.0).sqrt()
            }
        }
    }
}

/// One restart's working state: the unnormalized members ψ̃ⱼ (columns of
/// P = Φ Vᵀ), the isometry V, and cached member objectives.
struct Working {
    cols: Vec<CVec>,
    isometry: CMat,
    f: Vec<f64>,
}

impl Working {
    fn objective(&self) -> f64 {
        self.f.iter().sum()
    }
}

fn initial_point(phi: &CMat, m: usize, ridx: usize, seed: u64) -> Working {
    let r = phi.ncols();
    let isometry = if ridx == 0 {
        // Eigen-ensemble itself, padded with zero columns.
        let mut v = CMat::zeros(m, r);
        for k in 0..r {
            v[(k, k)] = C64::new(1.0, 0.0);
        }
        v
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(split_seed(seed, ridx as u64));
        let g = CMat::from_fn(m, r, |_, _| {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            C64::new(re, im)
        });
        g.qr().q()
    };
    // P = Φ Vᵀ: member j is Σₖ Vⱼₖ · φₖ.
    let p = phi * isometry.transpose();
    let cols: Vec<CVec> = (0..m).map(|j| CVec::from(p.column(j))).collect();
    Working {
        cols,
        isometry,
        f: vec![0.0; m],
    }
}

/// Asserts the decomposition invariants: weights sum to 1 and the members
/// reconstruct ρ entrywise within `RECONSTRUCTION_TOL`.
fn check_reconstruction(w: &Working, rho: &CMat) -> Result<()> {
    let d = rho.nrows();
    let mut acc = CMat::zeros(d, d);
    for col in &w.cols {
        acc += col * col.adjoint();
    }
    let weight: f64 = w.cols.iter().map(|c| c.norm_squared()).sum();
    if (weight - 1.0).abs() > WEIGHT_SUM_TOL {
        return Err(Error::Numerical(format!(
            "ensemble weights sum to {weight}, off from 1 beyond {WEIGHT_SUM_TOL:e}"
        )));
    }
    let err = (acc - rho)
        .iter()
        .map(|z| z.norm())
        .fold(0.0f64, f64::max);
    if err > RECONSTRUCTION_TOL {
        return Err(Error::Numerical(format!(
            "decomposition reconstructs ρ only to {err:.3e} (> {RECONSTRUCTION_TOL:e})"
        )));
    }
    Ok(())
}

/// Applies the (j,k) Givens rotation with angle t and phase φ to the working
/// point (columns of P and, equivalently, rows of V).
fn rotate(w: &mut Working, j: usize, k: usize, t: f64, phase: C64, so: SplitObjective) {
    let (ct, st) = (t.cos(), t.sin());
    let u = &w.cols[j] * C64::new(ct, 0.0) + &w.cols[k] * (phase * st);
    let v = &w.cols[j] * (-phase.conj() * st) + &w.cols[k] * C64::new(ct, 0.0);
    w.cols[j] = u;
    w.cols[k] = v;
    let row_j = w.isometry.row(j).into_owned();
    let row_k = w.isometry.row(k).into_owned();
    w.isometry.set_row(j, &(row_j.clone() * C64::new(ct, 0.0) + row_k.clone() * (phase * st)));
    w.isometry.set_row(k, &(row_j * (-phase.conj() * st) + row_k * C64::new(ct, 0.0)));
    w.f[j] = so.member(&w.cols[j]);
    w.f[k] = so.member(&w.cols[k]);
}

/// Objective of the candidate (j,k) rotation without applying it.
fn candidate_value(w: &Working, j: usize, k: usize, t: f64, phase: C64, so: SplitObjective) -> f64 {
    let (ct, st) = (t.cos(), t.sin());
    let u = &w.cols[j] * C64::new(ct, 0.0) + &w.cols[k] * (phase * st);
    let v = &w.cols[j] * (-phase.conj() * st) + &w.cols[k] * C64::new(ct, 0.0);
    so.member(&u) + so.member(&v)
}

struct RestartOutcome {
    value: f64,
    converged: bool,
    point: Working,
}

fn run_restart(
    phi: &CMat,
    rho: &CMat,
    m: usize,
    so: SplitObjective,
    cfg: &RoofConfig,
    ridx: usize,
) -> Result<RestartOutcome> {
    let mut w = initial_point(phi, m, ridx, cfg.seed);
    for j in 0..m {
        w.f[j] = so.member(&w.cols[j]);
    }
    let mut step = STEP_INIT;
    let mut converged = false;
    for _ in 0..cfg.max_iters {
        check_reconstruction(&w, rho)?;
        // Refresh cached member objectives to stop incremental drift.
        for j in 0..m {
            w.f[j] = so.member(&w.cols[j]);
        }
        let before = w.objective();
        for j in 0..m {
            for k in (j + 1)..m {
                let current = w.f[j] + w.f[k];
                let mut best: Option<(f64, f64, C64)> = None;
                for &phase in &[C64::new(1.0, 0.0), C64::new(0.0, 1.0)] {
                    for &t in &[step, -step] {
                        let val = candidate_value(&w, j, k, t, phase, so);
                        if val < current && best.is_none_or(|(b, _, _)| val < b) {
                            best = Some((val, t, phase));
                        }
                    }
                }
                if let Some((mut best_val, mut best_t, phase)) = best {
                    // Greedily double the accepted step while it keeps helping.
                    for _ in 0..3 {
                        let t2 = best_t * 2.0;
                        let val = candidate_value(&w, j, k, t2, phase, so);
                        if val < best_val {
                            best_val = val;
                            best_t = t2;
                        } else {
                            break;
                        }
                    }
                    rotate(&mut w, j, k, best_t, phase, so);
                }
            }
        }
        let after = w.objective();
        if before - after < cfg.tol {
            if step <= STEP_FLOOR {
                converged = true;
                break;
            }
            step *= 0.5;
        }
    }
    check_reconstruction(&w, rho)?;
    Ok(RestartOutcome {
        value: w.objective(),
        converged,
        point: w,
    })
}

/// Best-found decomposition average of the objective across restarts: an
/// upper bound on the convex roof. `interval` spans from the best known
/// lower bound (PPT negativity for the negativity objective, plus any
/// `lower_hint`) up to the returned value; deterministic for a fixed seed.
pub fn roof_upper_bound(
    rho: &DensityOperator,
    p: &Partition,
    objective: RoofObjective,
    cfg: &RoofConfig,
) -> Result<MeasureValue> {
    Ok(roof_with_decomposition(rho, p, objective, cfg)?.0)
}

/// As [`roof_upper_bound`], also returning the minimizing decomposition.
pub fn roof_with_decomposition(
    rho: &DensityOperator,
    p: &Partition,
    objective: RoofObjective,
    cfg: &RoofConfig,
) -> Result<(MeasureValue, DecompositionPoint)> {
    p.require_covering(rho.dims().len())?;
    if cfg.restarts < 1 {
        return Err(Error::Validation("restarts must be ≥ 1".into()));
    }
    let (perm, da, db) = bipartite_layout(rho, p)?;
    let (vals, vecs) = perm.eigen();
    let kept: Vec<usize> = (0..vals.len()).filter(|&i| vals[i] > RANK_TOL).collect();
    let r = kept.len().max(1);
    let d = da * db;
    // Φ columns are √λₖ·|eₖ⟩; ΦΦ† = ρ.
    let mut phi = CMat::zeros(d, r);
    for (c, &i) in kept.iter().enumerate() {
        phi.set_column(c, &(vecs.column(i) * C64::new(vals[i].sqrt(), 0.0)));
    }
    if kept.is_empty() {
        phi.set_column(0, &(vecs.column(0) * C64::new(vals[0].max(0.0).sqrt(), 0.0)));
    }

    let mut lower = cfg.lower_hint.max(0.0);
    if objective == RoofObjective::Negativity {
        // PPT lower bound N(ρ) ≤ N_c(ρ); unchanged by the permutation, so
        // evaluate it on the original operator and partition.
        let ppt = crate::measures::negativity(rho, p)?;
        lower = lower.max(ppt.value);
    }

    let so = SplitObjective {
        da,
        db,
        obj: objective,
    };
    if r == 1 {
        // Rank 1: the roof is the pure-state measure itself.
        let value = so.member(&CVec::from(phi.column(0))).max(lower);
        let isometry = CMat::identity(1, 1);
        let col = CVec::from(phi.column(0));
        let point = DecompositionPoint {
            ensemble_size: 1,
            isometry,
            ensemble: vec![(1.0, col.normalize())],
        };
        return Ok((
            MeasureValue {
                value,
                method: Method::ConvexRoofUpper,
                interval: Some([lower.min(value), value]),
                converged: Some(true),
            },
            point,
        ));
    }

    let m = cfg.ensemble_size.unwrap_or(r * r);
    if m < r {
        return Err(Error::Validation(format!(
            "ensemble size {m} below rank {r}"
        )));
    }

    let mut best: Option<RestartOutcome> = None;
    for ridx in 0..cfg.restarts {
        let outcome = run_restart(&phi, perm.matrix(), m, so, cfg, ridx)?;
        if best.as_ref().is_none_or(|b| outcome.value < b.value) {
            best = Some(outcome);
        }
    }
    let best = best.expect("restarts ≥ 1");
    let value = best.value.max(lower);
    let ensemble: Vec<(f64, CVec)> = best
        .point
        .cols
        .iter()
        .filter(|c| c.norm_squared() > 1e-14)
        .map(|c| (c.norm_squared(), c.normalize()))
        .collect();
    let point = DecompositionPoint {
        ensemble_size: m,
        isometry: best.point.isometry.clone(),
        ensemble,
    };
    Ok((
        MeasureValue {
            value,
            method: Method::ConvexRoofUpper,
            interval: Some([lower.min(value), value]),
            converged: Some(best.converged),
        },
        point,
    ))
}

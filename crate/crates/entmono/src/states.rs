//! Canonical state constructors and seeded random-state generators.
//!
//! Frozen families (W, GHZ, the Example-1 product-form family, the
//! generalized-Schmidt family, and the two qutrit counterexample states) plus
//! Haar-random pure states and induced random mixed states for property
//! campaigns. All randomness is deterministic per (seed, index).

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::tensor::{C64, CMat, CVec, DensityOperator, DimVector, PureState};

/// Normalization tolerance for recipe parameters (Σp² = 1 etc.).
pub const PARAM_NORM_TOL: f64 = 1e-10;

/// A named state construction with its parameters and register shape,
/// kept alongside generated states so reports can say what was built.
#[derive(Debug, Clone)]
pub struct StateRecipe {
    pub name: String,
    pub parameters: Vec<f64>,
    pub dims: DimVector,
}

fn qubits(n: usize) -> DimVector {
    DimVector::new(vec![2; n]).expect("qubit register")
}

/// W state on `n` qubits: equal superposition of all weight-1 basis states.
pub fn w_state(n: usize) -> Result<PureState> {
    if n < 2 {
        return Err(Error::Validation(format!("W state needs ≥ 2 qubits, got {n}")));
    }
    let dims = qubits(n);
    let mut amp = CVec::zeros(dims.total());
    let a = C64::new(1.0 / (n as f64).sqrt(), 0.0);
    for k in 0..n {
        amp[1usize << k] = a;
    }
    PureState::new(dims, amp)
}

/// GHZ state on `n` qubits: (|0…0⟩ + |1…1⟩)/√2.
pub fn ghz_state(n: usize) -> Result<PureState> {
    if n < 2 {
        return Err(Error::Validation(format!("GHZ state needs ≥ 2 qubits, got {n}")));
    }
    let dims = qubits(n);
    let d = dims.total();
    let mut amp = CVec::zeros(d);
    let a = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    amp[0] = a;
    amp[d - 1] = a;
    PureState::new(dims, amp)
}

/// Three-qubit product-form family
/// p₁e^{iθ}|000⟩ + p₂|001⟩ + p₃|010⟩ + p₄|100⟩ + p₅|111⟩.
pub fn example1_state(p: [f64; 5], theta: f64) -> Result<PureState> {
    if p.iter().any(|&x| x <= 0.0) {
        return Err(Error::Validation("all pᵢ must be > 0".into()));
    }
    if !(0.0..std::f64::consts::PI).contains(&theta) {
        return Err(Error::Validation(format!("θ = {theta} outside [0, π)")));
    }
    let norm2: f64 = p.iter().map(|x| x * x).sum();
    if (norm2 - 1.0).abs() > PARAM_NORM_TOL {
        return Err(Error::Validation(format!(
            "Σpᵢ² = {norm2} off from 1 beyond {PARAM_NORM_TOL:e}"
        )));
    }
    let dims = qubits(3);
    let mut amp = CVec::zeros(8);
    amp[0] = C64::from_polar(p[0], theta);
    amp[1] = C64::new(p[1], 0.0); // |001⟩
    amp[2] = C64::new(p[2], 0.0); // |010⟩
    amp[4] = C64::new(p[3], 0.0); // |100⟩
    amp[7] = C64::new(p[4], 0.0); // |111⟩
    PureState::new(dims, amp)
}

/// Default Example-1 instance: p₁ = p₅ = 1/5, p₂ = √15/5, p₃ = p₄ = 2/5, θ = 0.
pub fn example1_default_params() -> ([f64; 5], f64) {
    ([0.2, 15f64.sqrt() / 5.0, 0.4, 0.4, 0.2], 0.0)
}

/// Three-qubit generalized-Schmidt family
/// ϑ₀|000⟩ + ϑ₁e^{iφ}|100⟩ + ϑ₂|110⟩ + ϑ₃|101⟩ + ϑ₄|111⟩.
///
/// This placement (ϑ₂ on |110⟩, ϑ₃ on |101⟩) is the one under which the
/// closed forms of [`gsd_closed_forms`] hold; see that function.
pub fn gsd_state(theta: [f64; 5], phi: f64) -> Result<PureState> {
    if theta.iter().any(|&x| x < 0.0) {
        return Err(Error::Validation("all ϑᵢ must be ≥ 0".into()));
    }
    let norm2: f64 = theta.iter().map(|x| x * x).sum();
    if (norm2 - 1.0).abs() > PARAM_NORM_TOL {
        return Err(Error::Validation(format!(
            "Σϑᵢ² = {norm2} off from 1 beyond {PARAM_NORM_TOL:e}"
        )));
    }
    let dims = qubits(3);
    let mut amp = CVec::zeros(8);
    amp[0] = C64::new(theta[0], 0.0);
    amp[4] = C64::from_polar(theta[1], phi); // |100⟩
    amp[6] = C64::new(theta[2], 0.0); // |110⟩
    amp[5] = C64::new(theta[3], 0.0); // |101⟩
    amp[7] = C64::new(theta[4], 0.0); // |111⟩
    PureState::new(dims, amp)
}

/// Exact convex-roof negativities of the generalized-Schmidt family:
/// (N_{cA|BC}, N_{cAB}, N_{cAC}) =
/// (2ϑ₀√(ϑ₂²+ϑ₃²+ϑ₄²), 2ϑ₀ϑ₂, 2ϑ₀ϑ₃).
pub fn gsd_closed_forms(theta: [f64; 5]) -> (f64, f64, f64) {
    let tail = (theta[2] * theta[2] + theta[3] * theta[3] + theta[4] * theta[4]).sqrt();
    (
        2.0 * theta[0] * tail,
        2.0 * theta[0] * theta[2],
        2.0 * theta[0] * theta[3],
    )
}

/// Default Example-2 instance: ϑ₀ = ϑ₃ = ϑ₄ = √(1/5), ϑ₂ = √(2/5), ϑ₁ = 0.
pub fn gsd_example2_params() -> ([f64; 5], f64) {
    let a = 0.2f64.sqrt();
    ([a, 0.0, 0.4f64.sqrt(), a, a], 0.0)
}

/// Totally antisymmetric three-qutrit state: Σ_σ sgn(σ)|σ(0)σ(1)σ(2)⟩/√6.
pub fn ou_state() -> PureState {
    let dims = DimVector::new(vec![3, 3, 3]).expect("qutrit register");
    let mut amp = CVec::zeros(27);
    let s = 1.0 / 6f64.sqrt();
    for (a, b, c, sign) in [
        (0, 1, 2, 1.0),
        (0, 2, 1, -1.0),
        (1, 2, 0, 1.0),
        (1, 0, 2, -1.0),
        (2, 0, 1, 1.0),
        (2, 1, 0, -1.0),
    ] {
        amp[9 * a + 3 * b + c] = C64::new(sign * s, 0.0);
    }
    PureState::new(dims, amp).expect("normalized by construction")
}

/// The 3⊗2⊗2 state (√2|010⟩ + √2|101⟩ + |200⟩ + |211⟩)/√6.
pub fn kim_sanders_state() -> PureState {
    let dims = DimVector::new(vec![3, 2, 2]).expect("3x2x2 register");
    let mut amp = CVec::zeros(12);
    let s = 1.0 / 6f64.sqrt();
    let r2 = 2f64.sqrt();
    amp[2] = C64::new(r2 * s, 0.0); // |010⟩
    amp[5] = C64::new(r2 * s, 0.0); // |101⟩
    amp[8] = C64::new(s, 0.0); // |200⟩
    amp[11] = C64::new(s, 0.0); // |211⟩
    PureState::new(dims, amp).expect("normalized by construction")
}

/// Exact convex-roof negativity ingredients (N_{cAB}, N_{cAC}, N_{cA|BC})
/// for the named counterexample states, fixed by their symmetry: every
/// pure decomposition of the antisymmetric state's two-party marginals has
/// negativity 1, and the 3⊗2⊗2 state's marginals have Schmidt rank 2 with
/// roof value √(8/9).
pub fn known_cren_ingredients(name: &str) -> Option<(f64, f64, f64)> {
    match name {
        "ou" => Some((1.0, 1.0, 2.0)),
        "kim-sanders" => {
            let v = (8f64 / 9.0).sqrt();
            Some((v, v, 2.0))
        }
        _ => None,
    }
}

/// splitmix64 mixing step: decorrelates a base seed and a draw index so
/// batch generation is reproducible regardless of evaluation order.
pub fn split_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn gaussian_c64<R: rand::Rng>(rng: &mut R) -> C64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    C64::new(re, im)
}

/// Haar-random pure state: a normalized complex-Gaussian amplitude vector.
pub fn haar_random_pure(dims: &DimVector, seed: u64) -> PureState {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = dims.total();
    let mut amp = CVec::from_fn(d, |_, _| gaussian_c64(&mut rng));
    let norm = amp.norm();
    amp /= C64::new(norm, 0.0);
    PureState::new(dims.clone(), amp).expect("normalized by construction")
}

/// Random mixed state of the requested rank: the reduced state of a
/// Haar-random purification, ρ = GG†/Tr(GG†) with G a d×rank Gaussian.
pub fn random_mixed(dims: &DimVector, rank: usize, seed: u64) -> Result<DensityOperator> {
    let d = dims.total();
    if rank < 1 || rank > d {
        return Err(Error::Validation(format!(
            "rank {rank} outside 1..={d} for register dimension {d}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = DMatrix::<Complex64>::from_fn(d, rank, |_, _| gaussian_c64(&mut rng));
    let mut rho: CMat = &g * g.adjoint();
    let tr = rho.trace().re;
    rho /= C64::new(tr, 0.0);
    DensityOperator::new(dims.clone(), rho)
}

/// Resolves a builtin state name, optionally overriding the family
/// parameters (Example-1: p₁…p₅, θ; generalized-Schmidt: ϑ₀…ϑ₄, φ).
/// Accepts `w3`, `ghz3`, `ghz4`, `example1`, `gsd-example2`, `ou`,
/// `kim-sanders`, and the general forms `wN`/`ghzN`.
pub fn builtin_state(name: &str, params: Option<&[f64]>) -> Result<(PureState, StateRecipe)> {
    let require_no_params = |what: &str| -> Result<()> {
        if params.is_some() {
            Err(Error::Input(format!("state `{what}` takes no --params")))
        } else {
            Ok(())
        }
    };
    let six = |what: &str, def: ([f64; 5], f64)| -> Result<([f64; 5], f64)> {
        match params {
            None => Ok(def),
            Some(p) if p.len() == 6 => Ok(([p[0], p[1], p[2], p[3], p[4]], p[5])),
            Some(p) => Err(Error::Input(format!(
                "state `{what}` takes 6 parameters (got {})",
                p.len()
            ))),
        }
    };
    let (psi, parameters) = match name {
        "example1" => {
            let (p, theta) = six("example1", example1_default_params())?;
            let mut v = p.to_vec();
            v.push(theta);
            (example1_state(p, theta)?, v)
        }
        "gsd-example2" => {
            let (t, phi) = six("gsd-example2", gsd_example2_params())?;
            let mut v = t.to_vec();
            v.push(phi);
            (gsd_state(t, phi)?, v)
        }
        "ou" => {
            require_no_params("ou")?;
            (ou_state(), vec![])
        }
        "kim-sanders" => {
            require_no_params("kim-sanders")?;
            (kim_sanders_state(), vec![])
        }
        _ => {
            require_no_params(name)?;
            let family_size = |n: usize| -> Result<usize> {
                if n < 2 {
                    Err(Error::Input(format!("state `{name}` needs N ≥ 2 parties")))
                } else {
                    Ok(n)
                }
            };
            if let Some(n) = name.strip_prefix("ghz").and_then(|s| s.parse::<usize>().ok()) {
                (ghz_state(family_size(n)?)?, vec![n as f64])
            } else if let Some(n) = name.strip_prefix('w').and_then(|s| s.parse::<usize>().ok()) {
                (w_state(family_size(n)?)?, vec![n as f64])
            } else {
                return Err(Error::Input(format!(
                    "unknown state `{name}` (try w3, ghz3, ghz4, example1, gsd-example2, ou, kim-sanders, or wN/ghzN)"
                )));
            }
        }
    };
    let recipe = StateRecipe {
        name: name.to_string(),
        parameters,
        dims: psi.dims().clone(),
    };
    Ok((psi, recipe))
}

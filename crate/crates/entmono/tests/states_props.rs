//! Properties of the builtin state families and seeded sampling.

use entmono::states::{
    builtin_state, example1_default_params, example1_state, ghz_state, gsd_closed_forms,
    gsd_example2_params, gsd_state, haar_random_pure, kim_sanders_state, known_cren_ingredients,
    ou_state, random_mixed, split_seed, w_state,
};
use entmono::tensor::{C64, DimVector};
use entmono::Error;

fn dims(v: &[usize]) -> DimVector {
    DimVector::new(v.to_vec()).unwrap()
}

#[test]
fn w_state_places_equal_weight_on_single_excitations() {
    let w = w_state(3).unwrap();
    assert_eq!(w.dims().as_slice(), &[2, 2, 2]);
    let a = w.amplitudes();
    let inv = 1.0 / 3f64.sqrt();
    for idx in [1usize, 2, 4] {
        assert!((a[idx].re - inv).abs() < 1e-15 && a[idx].im == 0.0);
    }
    for idx in [0usize, 3, 5, 6, 7] {
        assert_eq!(a[idx], C64::new(0.0, 0.0));
    }
    assert!(matches!(w_state(1), Err(Error::Validation(_))));
}

#[test]
fn ghz_state_superposes_the_extremes() {
    let g = ghz_state(4).unwrap();
    let a = g.amplitudes();
    let inv = 1.0 / 2f64.sqrt();
    assert!((a[0].re - inv).abs() < 1e-15);
    assert!((a[15].re - inv).abs() < 1e-15);
    assert_eq!(a.iter().filter(|z| z.norm() > 0.0).count(), 2);
}

#[test]
fn example1_default_matches_known_marginal() {
    let (p, theta) = example1_default_params();
    let psi = example1_state(p, theta).unwrap();
    let rho_a = psi.reduced(&[0]).unwrap();
    let m = rho_a.matrix();
    assert!((m[(0, 0)].re - 0.8).abs() < 1e-12);
    assert!((m[(1, 1)].re - 0.2).abs() < 1e-12);
    assert!((m[(0, 1)].re - 0.08).abs() < 1e-12);
    assert!(m[(0, 1)].im.abs() < 1e-12);
}

#[test]
fn example1_rejects_bad_parameters() {
    assert!(matches!(
        example1_state([0.5, 0.5, 0.5, 0.5, 0.5], 0.0),
        Err(Error::Validation(_))
    ));
    let (p, _) = example1_default_params();
    assert!(matches!(
        example1_state(p, -0.1),
        Err(Error::Validation(_))
    ));
    assert!(matches!(
        example1_state(p, std::f64::consts::PI),
        Err(Error::Validation(_))
    ));
    assert!(matches!(
        example1_state([0.0, 1.0, 0.0, 0.0, 0.0], 0.0),
        Err(Error::Validation(_))
    ));
}

#[test]
fn gsd_instance_matches_its_closed_forms() {
    let (t, phi) = gsd_example2_params();
    let psi = gsd_state(t, phi).unwrap();
    let (n_full, n_ab, n_ac) = gsd_closed_forms(t);
    assert!((n_full - 0.8).abs() < 1e-15);
    assert!((n_ab - 2.0 * 2f64.sqrt() / 5.0).abs() < 1e-15);
    assert!((n_ac - 0.4).abs() < 1e-15);
    // The closed forms describe the realized state, cross-checked against
    // full measures in the acceptance suite; here check normalization only.
    assert!((psi.amplitudes().norm() - 1.0).abs() < 1e-12);
}

#[test]
fn gsd_rejects_negative_or_unnormalized_coefficients() {
    assert!(matches!(
        gsd_state([0.5, -0.5, 0.5, 0.5, 0.0], 0.0),
        Err(Error::Validation(_))
    ));
    assert!(matches!(
        gsd_state([1.0, 1.0, 0.0, 0.0, 0.0], 0.0),
        Err(Error::Validation(_))
    ));
}

#[test]
fn counterexample_states_have_quoted_ingredients() {
    let ou = ou_state();
    assert_eq!(ou.dims().as_slice(), &[3, 3, 3]);
    assert!((ou.amplitudes().norm() - 1.0).abs() < 1e-12);
    let ks = kim_sanders_state();
    assert_eq!(ks.dims().as_slice(), &[3, 2, 2]);
    assert!((ks.amplitudes().norm() - 1.0).abs() < 1e-12);

    let (ab, ac, full) = known_cren_ingredients("ou").unwrap();
    assert_eq!((ab, ac, full), (1.0, 1.0, 2.0));
    let (ab, ac, full) = known_cren_ingredients("kim-sanders").unwrap();
    assert!((ab * ab - 8.0 / 9.0).abs() < 1e-15);
    assert!((ac * ac - 8.0 / 9.0).abs() < 1e-15);
    assert_eq!(full, 2.0);
    assert!(known_cren_ingredients("w3").is_none());
}

#[test]
fn split_seed_separates_streams() {
    let s = split_seed(7, 0);
    assert_ne!(s, split_seed(7, 1));
    assert_ne!(s, split_seed(8, 0));
    assert_eq!(s, split_seed(7, 0));
}

#[test]
fn haar_sampling_is_deterministic_and_normalized() {
    let d = dims(&[3, 4]);
    let a = haar_random_pure(&d, 42);
    let b = haar_random_pure(&d, 42);
    assert_eq!(a.amplitudes(), b.amplitudes());
    assert!((a.amplitudes().norm() - 1.0).abs() < 1e-12);
}

#[test]
fn random_mixed_has_requested_rank_and_is_a_state() {
    let d = dims(&[2, 2]);
    for rank in 1..=4usize {
        let rho = random_mixed(&d, rank, 9).unwrap();
        let tr: C64 = rho.matrix().trace();
        assert!((tr.re - 1.0).abs() < 1e-12);
        assert_eq!(rho.rank(1e-10), rank);
    }
    assert!(matches!(random_mixed(&d, 0, 1), Err(Error::Validation(_))));
    assert!(matches!(random_mixed(&d, 5, 1), Err(Error::Validation(_))));
    // Deterministic in the seed.
    let a = random_mixed(&d, 2, 3).unwrap();
    let b = random_mixed(&d, 2, 3).unwrap();
    assert_eq!(a.matrix(), b.matrix());
}

#[test]
fn builtin_state_resolves_names_and_validates_parameters() {
    for name in ["w3", "ghz3", "ghz4", "example1", "gsd-example2", "ou", "kim-sanders", "w5", "ghz6"] {
        let (psi, recipe) = builtin_state(name, None).unwrap();
        assert_eq!(recipe.name, name);
        assert!((psi.amplitudes().norm() - 1.0).abs() < 1e-12);
    }
    assert!(matches!(builtin_state("nosuch", None), Err(Error::Input(_))));
    assert!(matches!(builtin_state("w1", None), Err(Error::Input(_))));
    // example1 takes exactly six parameters: p1..p5 and θ.
    let (p, theta) = example1_default_params();
    let params = [p[0], p[1], p[2], p[3], p[4], theta];
    let (psi, _) = builtin_state("example1", Some(&params)).unwrap();
    let (reference, _) = builtin_state("example1", None).unwrap();
    assert_eq!(psi.amplitudes(), reference.amplitudes());
    assert!(matches!(
        builtin_state("example1", Some(&params[..4])),
        Err(Error::Input(_))
    ));
    assert!(matches!(
        builtin_state("w3", Some(&params)),
        Err(Error::Input(_))
    ));
    // gsd-example2 with explicit parameters reproduces the default.
    let (t, phi) = gsd_example2_params();
    let gp = [t[0], t[1], t[2], t[3], t[4], phi];
    let (g1, _) = builtin_state("gsd-example2", Some(&gp)).unwrap();
    let (g2, _) = builtin_state("gsd-example2", None).unwrap();
    assert_eq!(g1.amplitudes(), g2.amplitudes());
}

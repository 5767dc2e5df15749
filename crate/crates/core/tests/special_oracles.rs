use proptest::prelude::*;
use toda_lab::coords::coordinates;
use toda_lab::special::{
    generating_identity_check, nontrivial_identity, sigma_logtau, special_coords, special_logtau,
    unweighted_logtau,
};
use toda_lab::{fixtures, ConformalPair, Hamiltonian, C64};

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

fn max_diff(a: &[C64], b: &[C64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

#[test]
fn matches_general_coordinates() {
    let p = fixtures::random(16);
    for mu in 1..=3 {
        for nu in 1..=3 {
            let general = coordinates(&p, &Hamiltonian::monomial(mu, nu).unwrap(), 16).unwrap();
            let closed = special_coords(&p, mu, nu, 16).unwrap();
            assert!(max_diff(&general.t, &closed.t) <= 1e-12);
            assert!(max_diff(&general.v, &closed.v) <= 1e-12);
            assert!((general.t0_alt - closed.t0_alt).norm() <= 1e-12);
        }
    }
}

#[test]
fn negative_exponents_match_general_coordinates() {
    let p = fixtures::random(12);
    for (mu, nu) in [(-1, 2), (2, -1)] {
        let general = coordinates(&p, &Hamiltonian::monomial(mu, nu).unwrap(), 12).unwrap();
        let closed = special_coords(&p, mu, nu, 12).unwrap();
        assert!(max_diff(&general.t, &closed.t) <= 1e-12);
        assert!(max_diff(&general.v, &closed.v) <= 1e-12);
    }
}

#[test]
fn ellipse_second_time() {
    let x = special_coords(&fixtures::sigma_ellipse(12), 1, 1, 12).unwrap();
    assert!((x.t(2) - c(0.05)).norm() <= 1e-12);
    assert!((x.t(0) - c(0.99)).norm() <= 1e-12);
}

#[test]
fn nontrivial_identity_and_closed_tau() {
    let p = fixtures::random(16);
    for mu in 1..=3 {
        for nu in 1..=3 {
            let x = coordinates(&p, &Hamiltonian::monomial(mu, nu).unwrap(), 16).unwrap();
            assert!(nontrivial_identity(&x, mu, nu) <= 1e-9);
            assert!((special_logtau(&x, mu, nu) - x.log_t).norm() <= 1e-9);
        }
    }
}

#[test]
fn unweighted_form_differs_from_tau() {
    let p = fixtures::random(16);
    let x = coordinates(&p, &Hamiltonian::monomial(2, 1).unwrap(), 16).unwrap();
    assert!((unweighted_logtau(&x, 2, 1) - x.log_t).norm() > 1e-5);
    let id = coordinates(
        &fixtures::identity(8),
        &Hamiltonian::monomial(1, 1).unwrap(),
        8,
    )
    .unwrap();
    assert_eq!(unweighted_logtau(&id, 1, 1), special_logtau(&id, 1, 1));
}

#[test]
fn sigma_tau_formula() {
    for g in [
        vec![c(1.0), c(0.0), c(0.1)],
        vec![c(1.1), C64::new(0.02, 0.01), C64::new(0.0, 0.05)],
    ] {
        let p = ConformalPair::sigma_conjugate(&g, 16).unwrap();
        for mu in 1..=3 {
            let x = coordinates(&p, &Hamiltonian::monomial(mu, mu).unwrap(), 16).unwrap();
            assert!((sigma_logtau(&x, mu) - x.log_t).norm() <= 1e-9);
            assert!(x.log_t.im.abs() <= 1e-10);
        }
    }
}

#[test]
fn generating_identity() {
    let p = fixtures::random(16);
    for (mu, nu) in [(1, 1), (2, 2), (2, 3), (3, 1)] {
        let r = generating_identity_check(&p, mu, nu, 16).unwrap();
        assert!(r.derivative_residual <= 1e-9, "{mu} {nu} {r:?}");
        assert!(r.expansion_defect <= 1e-10);
    }
    let r = generating_identity_check(&fixtures::identity(8), 1, 1, 8).unwrap();
    assert_eq!(r.constant_offset, c(1.0));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn identities_on_random_pairs(seed in 0u64..1000, mu in 1i32..=3, nu in 1i32..=3) {
        let p = ConformalPair::random_pair(seed, 0.25, 12, false);
        let x = coordinates(&p, &Hamiltonian::monomial(mu, nu).unwrap(), 12).unwrap();
        prop_assert!(nontrivial_identity(&x, mu, nu) <= 1e-9);
        prop_assert!((special_logtau(&x, mu, nu) - x.log_t).norm() <= 1e-9);
        let r = generating_identity_check(&p, mu, nu, 12).unwrap();
        prop_assert!(r.derivative_residual <= 1e-9);
    }
}

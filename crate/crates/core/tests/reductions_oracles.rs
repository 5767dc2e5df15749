use proptest::prelude::*;
use toda_lab::coords::coordinates;
use toda_lab::grunsky::{grunsky_table, grunsky_via_inverse};
use toda_lab::reductions::{
    green_coefficients, green_identity_check, hessian_kernel, real_subspace_check,
    sigma_coordinate_check,
};
use toda_lab::{fixtures, ConformalPair, Hamiltonian, Monomial, C64};

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

fn sigma_hamiltonians() -> Vec<Hamiltonian> {
    vec![
        Hamiltonian::monomial(1, 1).unwrap(),
        Hamiltonian::monomial(2, 2).unwrap(),
        Hamiltonian::new([
            Monomial::new(2, 1, C64::new(0.4, 0.1)),
            Monomial::new(1, 2, C64::new(0.4, -0.1)),
        ])
        .unwrap(),
    ]
}

fn perturbative_gs() -> Vec<Vec<C64>> {
    vec![
        vec![c(1.0), c(0.0), c(0.1)],
        vec![c(1.0), c(0.0), C64::new(0.0, 0.05)],
        vec![
            c(1.2),
            C64::new(0.03, 0.01),
            C64::new(0.0, 0.05),
            C64::new(0.02, -0.01),
        ],
    ]
}

#[test]
fn identity_sigma_defects_vanish() {
    let (x, r) =
        sigma_coordinate_check(&[c(1.0)], &Hamiltonian::monomial(1, 1).unwrap(), 8).unwrap();
    assert_eq!(r.defect(), 0.0);
    assert_eq!(x.t(0), c(1.0));
    assert_eq!(x.v0(), c(-1.0));
}

#[test]
fn ellipse_sigma_coordinates() {
    let g = [c(1.0), c(0.0), c(0.1)];
    for h in sigma_hamiltonians() {
        let (_, r) = sigma_coordinate_check(&g, &h, 12).unwrap();
        assert!(r.defect() <= 1e-10, "{r:?}");
        assert!(r.t0_imag <= 1e-12);
    }
    let (x, _) = sigma_coordinate_check(&g, &Hamiltonian::monomial(1, 1).unwrap(), 12).unwrap();
    assert!((x.t(0) - c(0.99)).norm() <= 1e-12);
    assert!((x.t(2) - c(0.05)).norm() <= 1e-12);
    assert!((x.t(-2) + c(0.05)).norm() <= 1e-12);
}

#[test]
fn complex_sigma_coordinates() {
    for g in perturbative_gs() {
        for h in sigma_hamiltonians() {
            let (_, r) = sigma_coordinate_check(&g, &h, 10).unwrap();
            assert!(r.defect() <= 1e-10, "{g:?} {r:?}");
        }
    }
}

#[test]
fn disc_kernel_is_log_of_one_minus_inverse_product() {
    let k = green_coefficients(&[c(1.0)], 8).unwrap();
    for m in 1..=8 {
        for n in 1..=8 {
            let want = if m == n { c(1.0 / m as f64) } else { c(0.0) };
            assert!((k.mixed(m, n) - want).norm() <= 1e-13);
            assert!(k.holo(m, n).norm() <= 1e-13);
        }
        assert!(k.single(m).norm() <= 1e-13);
    }
    let h = Hamiltonian::monomial(1, 1).unwrap();
    assert!(green_identity_check(&[c(1.0)], &h, 8).unwrap().defect <= 1e-13);
}

#[test]
fn green_identity_on_perturbative_maps() {
    for g in perturbative_gs() {
        for h in sigma_hamiltonians().iter().take(2) {
            let r = green_identity_check(&g, h, 8).unwrap();
            assert!(r.defect <= 1e-10, "{g:?}: {}", r.defect);
            assert!(r.hermitian_defect <= 1e-12, "{}", r.hermitian_defect);
        }
    }
}

#[test]
fn ellipse_entry_two_ways() {
    let g = [c(1.0), c(0.0), c(0.1)];
    let k = green_coefficients(&g, 8).unwrap();
    let pair = ConformalPair::sigma_conjugate(&g, 8).unwrap();
    let dual = hessian_kernel(&grunsky_via_inverse(&pair, 8).unwrap(), 8);
    assert!((k.get(-1, 1) - dual.get(-1, 1)).norm() <= 1e-10);
    assert!(k.max_difference(&dual) <= 1e-10);
}

#[test]
fn constant_entry_is_log_conformal_radius() {
    let g = [c(1.3), c(0.0), c(0.1)];
    let k = green_coefficients(&g, 6).unwrap();
    // G(z) ~ z/1.3 at infinity: log(1/1.3) − log(1/1.3²).
    assert!(
        (k.constant() - 1.3f64.ln()).abs() <= 1e-12,
        "{}",
        k.constant()
    );
}

/// Direct evaluation of `G_Ω − log|1/z1 − 1/z2|` from the inverse map.
fn kernel_direct(pair: &ConformalPair, z1: C64, z2: C64) -> f64 {
    let big_g = pair.g().invert_function().unwrap();
    let eval = |z: C64| big_g.support().map(|(k, a)| a * z.powi(k)).sum::<C64>();
    let (g1, g2) = (eval(z1), eval(z2));
    let green = ((g1 - g2) / (g1 * g2.conj() - 1.0)).norm().ln();
    green - (1.0 / z1 - 1.0 / z2).norm().ln()
}

#[test]
fn truncated_kernel_matches_pointwise_values() {
    let g = [c(1.0), C64::new(0.02, 0.01), C64::new(0.0, 0.05)];
    let pair = ConformalPair::sigma_conjugate(&g, 16).unwrap();
    let k = green_coefficients(&g, 16).unwrap();
    for (z1, z2) in [
        (C64::new(3.0, 0.5), C64::new(-2.0, 2.5)),
        (C64::new(0.0, -3.2), C64::new(3.1, 0.2)),
    ] {
        let mut s = C64::new(0.0, 0.0);
        for p in -16i32..=16 {
            for q in -16i32..=16 {
                let a = if p < 0 {
                    z1.powi(p)
                } else {
                    z1.conj().powi(-p)
                };
                let b = if q < 0 {
                    z2.powi(q)
                } else {
                    z2.conj().powi(-q)
                };
                s += k.get(p, q) * a * b;
            }
        }
        assert!(s.im.abs() <= 1e-12);
        assert!(
            (s.re - kernel_direct(&pair, z1, z2)).abs() <= 1e-8,
            "{} {}",
            s.re,
            kernel_direct(&pair, z1, z2)
        );
    }
}

#[test]
fn real_subspace() {
    let h = Hamiltonian::monomial(1, 1).unwrap();
    assert_eq!(
        real_subspace_check(&fixtures::identity(8), &h, 8).unwrap(),
        0.0
    );
    let real = ConformalPair::random_pair(11, 0.3, 12, true);
    assert!(real_subspace_check(&real, &h, 12).unwrap() <= 1e-11);
    let h2 = Hamiltonian::new([Monomial::new(2, 1, c(1.0)), Monomial::new(1, 3, c(-0.2))]).unwrap();
    assert!(real_subspace_check(&real, &h2, 12).unwrap() <= 1e-11);
    let complex = ConformalPair::random_pair(11, 0.3, 12, false);
    assert!(real_subspace_check(&complex, &h, 12).unwrap() > 1e-6);
}

#[test]
fn real_pair_log_tau_is_real() {
    let real = ConformalPair::random_pair(3, 0.25, 10, true);
    let x = coordinates(&real, &Hamiltonian::monomial(2, 1).unwrap(), 10).unwrap();
    assert!(x.log_t.im.abs() <= 1e-11);
}

#[test]
fn hessian_kernel_reads_the_table() {
    let pair = fixtures::identity(6);
    let k = hessian_kernel(&grunsky_table(&pair, 6).unwrap(), 6);
    for m in 1..=6 {
        assert!((k.mixed(m, m) - c(1.0 / m as f64)).norm() <= 1e-14);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn green_identity_random_sigma_maps(
        a1 in -0.05f64..0.05, a2 in -0.05f64..0.05, b2 in -0.05f64..0.05, b3 in -0.03f64..0.03,
        scale in 0.8f64..1.3,
    ) {
        let g = [c(scale), C64::new(a1, a2), C64::new(b2, a1), C64::new(b3, 0.0)];
        let h = Hamiltonian::monomial(1, 1).unwrap();
        let r = green_identity_check(&g, &h, 6).unwrap();
        prop_assert!(r.defect <= 1e-10, "{}", r.defect);
        prop_assert!(r.hermitian_defect <= 1e-12);
        let (_, s) = sigma_coordinate_check(&g, &h, 8).unwrap();
        prop_assert!(s.defect() <= 1e-10);
    }
}

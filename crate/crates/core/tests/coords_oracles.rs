use toda_lab::coords::{coordinates, phi_psi, plemelj_check};
use toda_lab::hamiltonian::gauge_shift_constants;
use toda_lab::{fixtures, ConformalPair, GaugeTerm, Hamiltonian, Monomial, Variable, C64};

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

fn hamiltonians() -> Vec<Hamiltonian> {
    vec![
        Hamiltonian::monomial(1, 1).unwrap(),
        Hamiltonian::monomial(2, 2).unwrap(),
        Hamiltonian::new([Monomial::new(2, 1, c(1.0)), Monomial::new(1, 2, c(0.3))]).unwrap(),
        Hamiltonian::new([
            Monomial::new(1, 1, c(1.0)),
            Monomial::new(3, 2, C64::new(0.05, 0.02)),
        ])
        .unwrap(),
        Hamiltonian::monomial(-1, 2).unwrap(),
    ]
}

fn pairs() -> Vec<(&'static str, ConformalPair)> {
    vec![
        ("identity", fixtures::identity(16)),
        ("sigma", fixtures::sigma_ellipse(16)),
        ("random", fixtures::random(16)),
        ("joukowski", fixtures::joukowski_inverse(16)),
    ]
}

#[test]
fn ellipse_times() {
    let p = fixtures::sigma_ellipse(16);
    let x = coordinates(&p, &Hamiltonian::monomial(1, 1).unwrap(), 16).unwrap();
    assert!((x.t(0) - c(0.99)).norm() <= 1e-10, "{}", x.t(0));
    assert!(x.t(1).norm() <= 1e-10);
    assert!((x.t(2) - c(0.05)).norm() <= 1e-10, "{}", x.t(2));
}

#[test]
fn gauge_shift_on_identity() {
    let p = fixtures::identity(8);
    let h = Hamiltonian::from_triples(&[(1, 1, c(1.0)), (1, 0, c(1.0))]).unwrap();
    let x = coordinates(&p, &h, 8).unwrap();
    assert_eq!(x.t(1), c(1.0));
    assert_eq!(x.t(0), c(1.0));
}

#[test]
fn duality_z2_and_plemelj_everywhere() {
    for (name, p) in pairs() {
        for h in hamiltonians() {
            let x = coordinates(&p, &h, 16).unwrap();
            assert!(x.t0_defect() <= 1e-10, "{name} {h:?} {}", x.t0_defect());
            assert!(x.z2_defect() <= 1e-10, "{name} {}", x.z2_defect());
            let pl = plemelj_check(&p, &h, &x).unwrap();
            assert!(
                pl.coefficient_defect <= 1e-10,
                "{name} {}",
                pl.coefficient_defect
            );
        }
    }
}

#[test]
fn phi_psi_definitions() {
    let p = fixtures::random(8);
    let x = coordinates(&p, &Hamiltonian::monomial(1, 1).unwrap(), 8).unwrap();
    let (phi, psi) = phi_psi(&x);
    for n in 1..=8 {
        assert_eq!(phi[n as usize - 1], x.v(n) / n as f64);
        assert_eq!(psi[n as usize - 1], x.v(-n) / n as f64);
    }
    let id = coordinates(
        &fixtures::identity(8),
        &Hamiltonian::monomial(1, 1).unwrap(),
        8,
    )
    .unwrap();
    let (phi, psi) = phi_psi(&id);
    assert!(phi.iter().chain(&psi).all(|z| *z == c(0.0)));
}

#[test]
fn sigma_reality_relations() {
    let p = fixtures::sigma_ellipse(16);
    for mu in [1, 2] {
        let x = coordinates(&p, &Hamiltonian::monomial(mu, mu).unwrap(), 16).unwrap();
        for n in 1..=16 {
            assert!((x.t(-n) + x.t(n).conj()).norm() <= 1e-10);
            assert!((x.v(-n) + x.v(n).conj()).norm() <= 1e-10);
        }
        assert!(x.t(0).im.abs() <= 1e-12);
        let (phi, psi) = phi_psi(&x);
        for (a, b) in phi.iter().zip(&psi) {
            assert!((b + a.conj()).norm() <= 1e-10);
        }
    }
}

#[test]
fn real_subspace_is_real() {
    let p = ConformalPair::random_pair(5, 0.3, 12, true);
    for h in hamiltonians()
        .into_iter()
        .filter(|h| h.has_real_coefficients())
    {
        let x = coordinates(&p, &h, 12).unwrap();
        assert!(x.max_imag() <= 1e-11, "{}", x.max_imag());
    }
}

#[test]
fn v0_on_identity_for_square_hamiltonian() {
    let x = coordinates(
        &fixtures::identity(4),
        &Hamiltonian::monomial(2, 2).unwrap(),
        4,
    )
    .unwrap();
    assert!(x.v0().norm().is_finite());
}

#[test]
fn gauge_covariance_of_coordinates() {
    let gauge = vec![
        GaugeTerm {
            variable: Variable::Z1,
            exponent: 1,
            c: c(1.0),
        },
        GaugeTerm {
            variable: Variable::Z2,
            exponent: 2,
            c: c(1.0),
        },
    ];
    let shift = gauge_shift_constants(&gauge, 16);
    for (name, p) in [
        ("identity", fixtures::identity(16)),
        ("random", fixtures::random(16)),
    ] {
        for h in hamiltonians() {
            let Ok(hg) = Hamiltonian::with_gauge(h.core().terms().to_vec(), gauge.clone()) else {
                continue;
            };
            let a = coordinates(&p, &h, 16).unwrap();
            let b = coordinates(&p, &hg, 16).unwrap();
            for n in -16..=16 {
                assert!(
                    (b.t(n) - a.t(n) - shift.t(n)).norm() <= 1e-10,
                    "{name} t{n}"
                );
                if n != 0 {
                    assert!(
                        (b.v(n) - a.v(n) - shift.v(n)).norm() <= 1e-10,
                        "{name} v{n}"
                    );
                }
            }
            assert!((b.v0() - a.v0() - shift.v0).norm() <= 1e-10, "{name} v0");
        }
    }
}

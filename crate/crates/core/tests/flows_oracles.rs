use proptest::prelude::*;
use toda_lab::coords::coordinates;
use toda_lab::flows::{
    canonical_check, coordinate_derivatives, flow_field, jacobian_check, lax_check, step,
    string_check, tau_gradient_check, trajectory, Method,
};
use toda_lab::{fixtures, ConformalPair, GaugeTerm, Hamiltonian, Monomial, Variable, C64};

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

fn mixed() -> Hamiltonian {
    Hamiltonian::new([Monomial::new(2, 1, c(1.0)), Monomial::new(1, 2, c(0.3))]).unwrap()
}

fn hamiltonians() -> Vec<Hamiltonian> {
    vec![
        Hamiltonian::monomial(1, 1).unwrap(),
        Hamiltonian::monomial(2, 1).unwrap(),
        mixed(),
        Hamiltonian::new([
            Monomial::new(1, 1, c(1.0)),
            Monomial::new(3, 2, C64::new(0.05, 0.02)),
        ])
        .unwrap(),
    ]
}

#[test]
fn identity_step_along_first_flow() {
    let p = fixtures::identity(8);
    let h = Hamiltonian::monomial(1, 1).unwrap();
    let eps = 1e-3;
    let q = step(&p, &h, 1, eps, Method::Euler).unwrap();
    assert_eq!(q.g(), p.g());
    assert_eq!(q.f().coeff(1), c(1.0));
    assert!((q.f().coeff(2) - c(-eps)).norm() < 1e-15);
    let t = coordinates(&q, &h, 4).unwrap();
    assert!((t.t(1) / eps - 1.0).norm() < 1e-7);
}

#[test]
fn identity_jacobian() {
    let p = fixtures::identity(8);
    let h = Hamiltonian::monomial(1, 1).unwrap();
    assert!(jacobian_check(&p, &h, 4, 1e-5).unwrap() <= 1e-6);
}

#[test]
fn random_jacobian_two_hamiltonians() {
    let p = fixtures::random(16);
    for h in [Hamiltonian::monomial(1, 1).unwrap(), mixed()] {
        let d = jacobian_check(&p, &h, 8, 1e-5).unwrap();
        assert!(d <= 1e-6, "{d:e}");
    }
}

#[test]
fn forward_backward_euler_is_second_order() {
    let p = fixtures::random(16);
    let h = mixed();
    let mut last = 0.0;
    for eps in [1e-3, 5e-4] {
        let q = step(
            &step(&p, &h, 2, eps, Method::Euler).unwrap(),
            &h,
            2,
            -eps,
            Method::Euler,
        )
        .unwrap();
        let err = q
            .g()
            .sub(p.g())
            .unwrap()
            .max_abs()
            .max(q.f().sub(p.f()).unwrap().max_abs());
        assert!(err < 10.0 * eps * eps, "{err:e}");
        if last > 0.0 {
            assert!(err < last / 3.0);
        }
        last = err;
    }
}

#[test]
fn rk4_converges_to_fine_trajectory() {
    let p = fixtures::random(16);
    let h = Hamiltonian::monomial(1, 1).unwrap();
    let coarse = step(&p, &h, 1, 1e-2, Method::Rk4).unwrap();
    let fine = trajectory(&p, &h, 1, 1e-3, 10, Method::Rk4).unwrap();
    let fine = fine.last().unwrap();
    assert!(coarse.g().sub(fine.g()).unwrap().max_abs() < 1e-9);
    assert!(coarse.f().sub(fine.f()).unwrap().max_abs() < 1e-9);
}

#[test]
fn large_euler_step_leaves_chart() {
    let p = fixtures::random(16);
    let h = Hamiltonian::monomial(1, 1).unwrap();
    assert!(matches!(
        step(&p, &h, 0, 0.1, Method::Euler),
        Err(toda_lab::TodaError::FlowLeftChart { .. })
    ));
}

#[test]
fn normalization_preserved_to_first_order() {
    let p = fixtures::random(16);
    for h in hamiltonians() {
        for n in -4..=4 {
            let k = flow_field(&p, &h, n).unwrap();
            let d = k.dg.coeff(1) / p.b() + k.df.coeff(1) / p.a1();
            assert!(d.norm() < 1e-12);
            assert!(k.split_defect(&p).unwrap() < 1e-10);
        }
    }
}

#[test]
fn string_equation() {
    assert_eq!(
        string_check(
            &fixtures::identity(8),
            &Hamiltonian::monomial(1, 1).unwrap()
        )
        .unwrap(),
        0.0
    );
    let p = fixtures::random(16);
    for h in hamiltonians() {
        let r = string_check(&p, &h).unwrap();
        assert!(r <= 1e-9, "{r:e}");
    }
}

#[test]
fn lax_equations_and_canonical_relation() {
    for p in [
        fixtures::random(16),
        fixtures::sigma_ellipse(16),
        fixtures::identity(16),
    ] {
        for h in hamiltonians() {
            for n in [-3, -2, -1, 1, 2, 3, 4, -4] {
                let r = lax_check(&p, &h, n).unwrap();
                assert!(r.residual() <= 1e-8, "{r:?}");
            }
            assert!(canonical_check(&p, &h).unwrap() <= 1e-8);
        }
    }
}

#[test]
fn tau_gradient_and_hessian() {
    let p = fixtures::random(16);
    for h in [Hamiltonian::monomial(1, 1).unwrap(), mixed()] {
        let r = tau_gradient_check(&p, &h, 6, 1e-5).unwrap();
        assert!(r.gradient_defect <= 1e-6, "{r:?}");
        assert!(r.hessian_defect <= 1e-6, "{r:?}");
        assert!(r.v0_defect <= 1e-6, "{r:?}");
        assert!(r.symmetry_defect <= 1e-6, "{r:?}");
    }
}

#[test]
fn identity_v0_derivative_vanishes() {
    let p = fixtures::identity(8);
    let h = Hamiltonian::monomial(1, 1).unwrap();
    let d = coordinate_derivatives(&p, &h, 1, 1e-5).unwrap();
    assert!(d.dv(0, 0).norm() < 1e-9);
}

#[test]
fn gauge_leaves_fields_unchanged() {
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
    let p = fixtures::random(16);
    for h in hamiltonians() {
        let Ok(hg) = Hamiltonian::with_gauge(h.core().terms().to_vec(), gauge.clone()) else {
            continue;
        };
        for n in -3..=3 {
            let a = flow_field(&p, &h, n).unwrap();
            let b = flow_field(&p, &hg, n).unwrap();
            assert_eq!(a, b);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn lax_and_string_on_random_pairs(seed in 0u64..1000, real in any::<bool>(), n in 1i32..4, neg in any::<bool>()) {
        let p = ConformalPair::random_pair(seed, 0.3, 8, real);
        let h = mixed();
        let n = if neg { -n } else { n };
        prop_assert!(lax_check(&p, &h, n).unwrap().residual() <= 1e-8);
        prop_assert!(string_check(&p, &h).unwrap() <= 1e-9);
        prop_assert!(flow_field(&p, &h, n).unwrap().split_defect(&p).unwrap() <= 1e-10);
    }
}

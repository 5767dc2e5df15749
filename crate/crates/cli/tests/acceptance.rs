//! Acceptance suite: one line per criterion, nonzero exit if any fails.

use std::process::{Command, ExitCode};
use std::time::Instant;

use toda_lab::coords::coordinates;
use toda_lab::flows::{
    canonical_check, flow_field, jacobian_check, lax_check, string_check, tau_gradient_check,
};
use toda_lab::grunsky::{grunsky_table, grunsky_via_inverse};
use toda_lab::hamiltonian::gauge_shift_constants;
use toda_lab::reductions::{green_identity_check, sigma_coordinate_check};
use toda_lab::special::{
    generating_identity_check, nontrivial_identity, sigma_logtau, special_logtau,
};
use toda_lab::{fixtures, GaugeTerm, Hamiltonian, Monomial, Variable, C64};
use toda_lab_cli::{cmd_verify, ExperimentConfig};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

fn within(label: &str, got: f64, tol: f64) -> Result<String, String> {
    if got <= tol {
        Ok(format!("{label} {got:.2e} ≤ {tol:.0e}"))
    } else {
        Err(format!("{label} {got:.2e} > {tol:.0e}"))
    }
}

fn all(parts: Vec<Outcome>) -> Outcome {
    let mut ok = Vec::new();
    for p in parts {
        ok.push(p?);
    }
    Ok(ok.join("; "))
}

fn e<T, E: std::fmt::Display>(r: Result<T, E>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn mono(mu: i32, nu: i32) -> Hamiltonian {
    Hamiltonian::monomial(mu, nu).unwrap()
}

fn mixed() -> Hamiltonian {
    Hamiltonian::new([Monomial::new(2, 1, c(1.0)), Monomial::new(1, 2, c(0.3))]).unwrap()
}

fn grunsky_symmetry() -> Outcome {
    let p = fixtures::random(16);
    let t = e(grunsky_table(&p, 16))?;
    let d = e(grunsky_via_inverse(&p, 16))?;
    all(vec![
        within("symmetry", t.symmetry_defect(), 1e-10),
        within("dual path", t.max_difference(&d), 1e-10),
    ])
}

fn identity_closed_forms() -> Outcome {
    let p = fixtures::identity(16);
    let t = e(grunsky_table(&p, 8))?;
    let mut worst = t.b00().norm();
    for n in 1..=8 {
        worst = worst.max((t.get(n, -n) - c(1.0 / n as f64)).norm());
    }
    let x = e(coordinates(&p, &mono(1, 1), 16))?;
    let coords = (x.t(0) - c(1.0))
        .norm()
        .max((x.v0() + c(1.0)).norm())
        .max((x.log_t + c(0.75)).norm());
    all(vec![
        within("b(n,-n), b00", worst, 1e-12),
        within("t0, v0, logT", coords, 1e-12),
    ])
}

fn joukowski() -> Outcome {
    let t = e(grunsky_table(&fixtures::joukowski_inverse(16), 4))?;
    let d = (t.get(1, 1) - c(0.1))
        .norm()
        .max((t.get(2, 2) - c(0.005)).norm());
    within("b(1,1), b(2,2)", d, 1e-10)
}

fn t0_duality() -> Outcome {
    let hs = [mono(1, 1), mono(2, 2), mixed(), mono(-1, 2)];
    let mut worst: f64 = 0.0;
    for p in [
        fixtures::identity(16),
        fixtures::sigma_ellipse(16),
        fixtures::random(16),
        fixtures::joukowski_inverse(16),
    ] {
        for h in &hs {
            worst = worst.max(e(coordinates(&p, h, 16))?.t0_defect());
        }
    }
    within("4 fixtures × 4 H", worst, 1e-10)
}

fn jacobian() -> Outcome {
    let p = fixtures::random(16);
    let h2 = Hamiltonian::new([Monomial::new(2, 1, c(1.0)), Monomial::new(1, 2, c(0.3))]).unwrap();
    all(vec![
        within("z1/z2", e(jacobian_check(&p, &mono(1, 1), 8, 1e-5))?, 1e-6),
        within(
            "z1²/z2 + 0.3 z1/z2²",
            e(jacobian_check(&p, &h2, 8, 1e-5))?,
            1e-6,
        ),
    ])
}

fn string_equation() -> Outcome {
    let p = fixtures::random(16);
    let mut worst: f64 = 0.0;
    for h in [mono(1, 1), mono(2, 1), mixed()] {
        worst = worst.max(e(string_check(&p, &h))?);
    }
    let id = e(string_check(&fixtures::identity(16), &mono(1, 1)))?;
    if id != 0.0 {
        return Err(format!("identity residual {id:e} is not exactly 0"));
    }
    all(vec![
        within("random, 3 H", worst, 1e-9),
        Ok("identity exactly 0".into()),
    ])
}

fn lax() -> Outcome {
    let p = fixtures::random(16);
    let h = mono(1, 1);
    let mut worst: f64 = 0.0;
    for n in [-3, -2, -1, 1, 2, 3] {
        worst = worst.max(e(lax_check(&p, &h, n))?.residual());
    }
    all(vec![
        within("n = ±1..3", worst, 1e-8),
        within("canonical", e(canonical_check(&p, &h))?, 1e-8),
    ])
}

fn tau() -> Outcome {
    let p = fixtures::random(16);
    let h = mono(1, 1);
    let r = e(tau_gradient_check(&p, &h, 6, 1e-5))?;
    let x = e(coordinates(&p, &h, 16))?;
    all(vec![
        within("gradient", r.gradient_defect, 1e-6),
        within("hessian", r.hessian_defect, 1e-6),
        within("v0", r.v0_defect, 1e-6),
        within("Z2", x.z2_defect(), 1e-10),
    ])
}

fn gauge() -> Outcome {
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
    let mut coords: f64 = 0.0;
    let mut fields: f64 = 0.0;
    for p in [fixtures::identity(16), fixtures::random(16)] {
        for h in [mono(1, 1), mono(2, 1), mono(2, 3)] {
            let hg = e(Hamiltonian::with_gauge(
                h.core().terms().to_vec(),
                gauge.clone(),
            ))?;
            let a = e(coordinates(&p, &h, 16))?;
            let b = e(coordinates(&p, &hg, 16))?;
            coords = coords.max((b.v0() - a.v0() - shift.v0).norm());
            for n in -16..=16 {
                coords = coords.max((b.t(n) - a.t(n) - shift.t(n)).norm());
                if n != 0 {
                    coords = coords.max((b.v(n) - a.v(n) - shift.v(n)).norm());
                }
            }
            for n in -3..=3 {
                let fa = e(flow_field(&p, &h, n))?;
                let fb = e(flow_field(&p, &hg, n))?;
                fields = fields
                    .max(e(fa.dg.sub(&fb.dg))?.max_abs())
                    .max(e(fa.df.sub(&fb.df))?.max_abs());
            }
        }
    }
    all(vec![
        within("coordinate shift", coords, 1e-10),
        within("flow fields", fields, 1e-12),
    ])
}

fn sigma() -> Outcome {
    let g = [c(1.0), c(0.0), c(0.1)];
    let mut reality: f64 = 0.0;
    let mut t0_imag: f64 = 0.0;
    let mut tau: f64 = 0.0;
    for mu in [1, 2] {
        let (x, r) = e(sigma_coordinate_check(&g, &mono(mu, mu), 16))?;
        reality = reality.max(r.t_defect).max(r.v_defect);
        t0_imag = t0_imag.max(r.t0_imag);
        tau = tau.max((sigma_logtau(&x, mu) - x.log_t).norm());
    }
    let (x, _) = e(sigma_coordinate_check(&g, &mono(1, 1), 16))?;
    let values = (x.t(0) - c(0.99)).norm().max((x.t(2) - c(0.05)).norm());
    all(vec![
        within("t_-n + conj t_n", reality, 1e-10),
        within("Im t0", t0_imag, 1e-12),
        within("t0 = 0.99, t2 = 0.05", values, 1e-10),
        within("Σ tau", tau, 1e-9),
    ])
}

fn green() -> Outcome {
    let gs = [
        vec![c(1.0), c(0.0), c(0.1)],
        vec![
            c(1.2),
            C64::new(0.03, 0.01),
            C64::new(0.0, 0.05),
            C64::new(0.02, -0.01),
        ],
    ];
    let mut worst: f64 = 0.0;
    for g in &gs {
        for h in [mono(1, 1), mono(2, 2)] {
            worst = worst.max(e(green_identity_check(g, &h, 8))?.defect);
        }
    }
    within("2 g × 2 H at N = 8", worst, 1e-10)
}

fn monomial_suite() -> Outcome {
    let p = fixtures::random(16);
    let mut nontrivial: f64 = 0.0;
    let mut tau: f64 = 0.0;
    let mut deriv: f64 = 0.0;
    for mu in 1..=3 {
        for nu in 1..=3 {
            let x = e(coordinates(&p, &mono(mu, nu), 16))?;
            nontrivial = nontrivial.max(nontrivial_identity(&x, mu, nu));
            tau = tau.max((special_logtau(&x, mu, nu) - x.log_t).norm());
            deriv = deriv.max(e(generating_identity_check(&p, mu, nu, 16))?.derivative_residual);
        }
    }
    all(vec![
        within("nontrivial identity", nontrivial, 1e-9),
        within("closed-form logT", tau, 1e-9),
        within("generating identity d/dw", deriv, 1e-9),
    ])
}

const VERIFY_CONFIG: &str = r#"{
  "hamiltonian": [{"mu": 2, "nu": 1, "re": 1.0, "im": 0.0}, {"mu": 1, "nu": 2, "re": 0.3, "im": 0.0}],
  "pair": {"random": {"seed": 7, "decay": 0.3, "real": false}},
  "order": 16,
  "samples_M": 1024,
  "eps_fd": 1e-5,
  "tolerances": {}
}"#;

fn run_binary(config: &std::path::Path, threads: &str) -> Result<Vec<u8>, String> {
    let out = e(Command::new(env!("CARGO_BIN_EXE_toda-lab"))
        .arg("verify")
        .arg(config)
        .env("TODA_LAB_THREADS", threads)
        .output())?;
    if !out.status.success() {
        return Err(format!("verify exited with {}", out.status));
    }
    Ok(out.stdout)
}

fn determinism() -> Outcome {
    let cfg = e(ExperimentConfig::from_json(VERIFY_CONFIG))?;
    let a = e(cmd_verify(&cfg, &[], false))?.to_json();
    let b = e(cmd_verify(&cfg, &[], false))?.to_json();
    if a != b {
        return Err("in-process reports differ".into());
    }
    let dir = e(tempfile::tempdir())?;
    let path = dir.path().join("verify.json");
    e(std::fs::write(&path, VERIFY_CONFIG))?;
    let one = run_binary(&path, "1")?;
    let four = run_binary(&path, "4")?;
    if one != four || one != a.as_bytes() {
        return Err("binary reports differ across runs or thread counts".into());
    }
    Ok(format!("{} identical bytes across 4 runs", a.len()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 13] = [
        ("grunsky symmetry and dual path", grunsky_symmetry),
        ("identity fixture closed forms", identity_closed_forms),
        ("joukowski-inverse fixture", joukowski),
        ("t0 duality", t0_duality),
        ("jacobian", jacobian),
        ("string equation", string_equation),
        ("lax equations", lax),
        ("tau identities", tau),
        ("gauge covariance", gauge),
        ("sigma reduction", sigma),
        ("green kernel identity", green),
        ("monomial suite", monomial_suite),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let out = f();
        let secs = start.elapsed().as_secs_f64();
        match out {
            Ok(detail) => println!("criterion {:>2} PASS {name}: {detail} [{secs:.1}s]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL {name}: {detail} [{secs:.1}s]", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

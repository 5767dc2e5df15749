//! The subcommands, each returning serialized artifacts or a check report.

use serde::Serialize;
use toda_lab::coords::{coordinates, plemelj_check, TodaCoordinates};
use toda_lab::flows::{
    canonical_check, coordinate_derivatives, flow_field, lax_check, string_check,
    tau_gradient_report, trajectory, CoordinateDerivatives, Method,
};
use toda_lab::grunsky::{grunsky_table, grunsky_via_inverse};
use toda_lab::hamiltonian::gauge_shift_constants;
use toda_lab::reductions::{green_identity_check, sigma_coordinate_check};
use toda_lab::special::{
    generating_identity_check, nontrivial_identity, sigma_logtau, special_coords, special_logtau,
};
use toda_lab::{ConformalPair, GaugeTerm, Hamiltonian, LaurentSeries, Variable, C64};

use crate::config::ExperimentConfig;
use crate::report::{Artifact, Report};
use crate::CliError;

/// Check names accepted by `verify`, with their default tolerances.
pub const ALL_CHECKS: &[(&str, f64)] = &[
    ("canonical", 1e-8),
    ("gauge_covariance", 1e-10),
    ("gauge_flow_invariance", 1e-12),
    ("grunsky_dual_path", 1e-10),
    ("grunsky_symmetry", 1e-10),
    ("jacobian", 1e-6),
    ("lax", 1e-8),
    ("plemelj", 1e-10),
    ("real_subspace", 1e-11),
    ("string", 1e-9),
    ("t0_duality", 1e-10),
    ("tau_gradient", 1e-6),
    ("tau_hessian_symmetry", 1e-6),
    ("z2_closed_form", 1e-10),
];

const JACOBIAN_ORDER: usize = 8;
const TAU_ORDER: usize = 6;
const GREEN_ORDER: usize = 8;

fn json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("plain data serializes") + "\n"
}

#[derive(Serialize)]
struct CoordEntry {
    n: i32,
    t: C64,
    v: C64,
}

#[derive(Serialize)]
struct CoordsOut {
    order: usize,
    t0: C64,
    t0_alt: C64,
    v0: C64,
    log_t: C64,
    log_tau: f64,
    z1: C64,
    z2: C64,
    z3: C64,
    z2_closed: C64,
    entries: Vec<CoordEntry>,
}

impl CoordsOut {
    fn new(x: &TodaCoordinates) -> Self {
        let o = x.order as i32;
        CoordsOut {
            order: x.order,
            t0: x.t(0),
            t0_alt: x.t0_alt,
            v0: x.v0(),
            log_t: x.log_t,
            log_tau: x.log_tau(),
            z1: x.z1,
            z2: x.z2,
            z3: x.z3,
            z2_closed: x.z2_closed,
            entries: (-o..=o)
                .map(|n| CoordEntry {
                    n,
                    t: x.t(n),
                    v: x.v(n),
                })
                .collect(),
        }
    }
}

fn setup(cfg: &ExperimentConfig) -> Result<(ConformalPair, Hamiltonian), CliError> {
    Ok((cfg.pair()?, cfg.hamiltonian()?))
}

pub fn cmd_coords(cfg: &ExperimentConfig) -> Result<Artifact, CliError> {
    let (pair, h) = setup(cfg)?;
    let x = coordinates(&pair, &h, cfg.order)?;
    let mut csv = String::from("n,t_re,t_im,v_re,v_im\n");
    for n in -(cfg.order as i32)..=cfg.order as i32 {
        let (t, v) = (x.t(n), x.v(n));
        csv += &format!("{n},{:e},{:e},{:e},{:e}\n", t.re, t.im, v.re, v.im);
    }
    Ok(Artifact {
        json: json(&CoordsOut::new(&x)),
        csv,
    })
}

#[derive(Serialize)]
struct GrunskyEntry {
    m: i32,
    n: i32,
    b: C64,
}

#[derive(Serialize)]
struct GrunskyOut {
    order: usize,
    b00: C64,
    symmetry_defect: f64,
    entries: Vec<GrunskyEntry>,
}

pub fn cmd_grunsky(cfg: &ExperimentConfig) -> Result<Artifact, CliError> {
    let pair = cfg.pair()?;
    let table = grunsky_table(&pair, cfg.order)?;
    let o = cfg.order as i32;
    let mut entries = Vec::new();
    let mut csv = String::from("m,n,re,im\n");
    for m in -o..=o {
        for n in -o..=o {
            let b = table.get(m, n);
            csv += &format!("{m},{n},{:e},{:e}\n", b.re, b.im);
            entries.push(GrunskyEntry { m, n, b });
        }
    }
    let out = GrunskyOut {
        order: cfg.order,
        b00: table.b00(),
        symmetry_defect: table.symmetry_defect(),
        entries,
    };
    Ok(Artifact {
        json: json(&out),
        csv,
    })
}

#[derive(Serialize)]
struct FlowStep {
    step: usize,
    time: f64,
    b: C64,
    log_t: C64,
    t: Vec<C64>,
}

#[derive(Serialize)]
struct FlowOut {
    n: i32,
    eps: f64,
    method: Method,
    /// `t` lists `t_m` for `m = −order..=order`.
    order: usize,
    steps: Vec<FlowStep>,
}

pub fn cmd_flow(
    cfg: &ExperimentConfig,
    n: i32,
    eps: f64,
    steps: usize,
    method: Method,
) -> Result<Artifact, CliError> {
    let (pair, h) = setup(cfg)?;
    if n.unsigned_abs() as usize > cfg.order {
        return Err(CliError::Usage(format!(
            "flow index {n} exceeds order {}",
            cfg.order
        )));
    }
    let path = trajectory(&pair, &h, n, eps, steps, method)?;
    let o = cfg.order as i32;
    let mut out = FlowOut {
        n,
        eps,
        method,
        order: cfg.order,
        steps: Vec::new(),
    };
    let mut csv = String::from("step,time,m,re,im\n");
    for (k, p) in path.iter().enumerate() {
        let x = coordinates(p, &h, cfg.order)?;
        let time = k as f64 * eps;
        for m in -o..=o {
            csv += &format!("{k},{time:e},{m},{:e},{:e}\n", x.t(m).re, x.t(m).im);
        }
        out.steps.push(FlowStep {
            step: k,
            time,
            b: p.b(),
            log_t: x.log_t,
            t: x.t.clone(),
        });
    }
    Ok(Artifact {
        json: json(&out),
        csv,
    })
}

fn extra_gauge() -> Vec<GaugeTerm> {
    vec![
        GaugeTerm {
            variable: Variable::Z1,
            exponent: 1,
            c: C64::new(1.0, 0.0),
        },
        GaugeTerm {
            variable: Variable::Z2,
            exponent: 2,
            c: C64::new(1.0, 0.0),
        },
    ]
}

fn gauged(h: &Hamiltonian) -> toda_lab::Result<Hamiltonian> {
    let mut gauge = h.gauge().to_vec();
    gauge.extend(extra_gauge());
    Hamiltonian::with_gauge(h.core().terms().to_vec(), gauge)
}

fn gauge_covariance(pair: &ConformalPair, h: &Hamiltonian, order: usize) -> toda_lab::Result<f64> {
    let shift = gauge_shift_constants(&extra_gauge(), order);
    let a = coordinates(pair, h, order)?;
    let b = coordinates(pair, &gauged(h)?, order)?;
    let o = order as i32;
    let mut worst = (b.v0() - a.v0() - shift.v0).norm();
    for n in -o..=o {
        worst = worst.max((b.t(n) - a.t(n) - shift.t(n)).norm());
        if n != 0 {
            worst = worst.max((b.v(n) - a.v(n) - shift.v(n)).norm());
        }
    }
    Ok(worst)
}

fn max_coeff_diff(a: &LaurentSeries, b: &LaurentSeries) -> toda_lab::Result<f64> {
    Ok(a.sub(b)?.max_abs())
}

fn gauge_flow_invariance(pair: &ConformalPair, h: &Hamiltonian) -> toda_lab::Result<f64> {
    let hg = gauged(h)?;
    let mut worst: f64 = 0.0;
    for n in -3..=3 {
        let a = flow_field(pair, h, n)?;
        let b = flow_field(pair, &hg, n)?;
        worst = worst
            .max(max_coeff_diff(&a.dg, &b.dg)?)
            .max(max_coeff_diff(&a.df, &b.df)?);
    }
    Ok(worst)
}

/// The derivatives for `|n|, |m| ≤ order` out of a larger table.
fn restrict(d: &CoordinateDerivatives, order: usize) -> CoordinateDerivatives {
    let skip = d.order - order;
    let cut = |rows: &[Vec<C64>]| -> Vec<Vec<C64>> {
        rows[skip..skip + 2 * order + 1]
            .iter()
            .map(|r| r[skip..skip + 2 * order + 1].to_vec())
            .collect()
    };
    CoordinateDerivatives {
        order,
        eps: d.eps,
        dt: cut(&d.dt),
        dv: cut(&d.dv),
        dlog_t: d.dlog_t[skip..skip + 2 * order + 1].to_vec(),
    }
}

fn selected(names: &[String]) -> Result<Vec<(&'static str, f64)>, CliError> {
    if names.is_empty() {
        return Ok(ALL_CHECKS.to_vec());
    }
    let mut out = Vec::new();
    for name in names {
        match ALL_CHECKS.iter().find(|(n, _)| n == name) {
            Some(c) => out.push(*c),
            None => return Err(CliError::Usage(format!("unknown check `{name}`"))),
        }
    }
    Ok(out)
}

/// Runs the selected checks (all when `names` is empty) on the configured pair and Hamiltonian.
/// Gauge checks are skipped when `H + z1 + z2²` is not admissible, `real_subspace` unless pair and `H` are real.
pub fn cmd_verify(
    cfg: &ExperimentConfig,
    names: &[String],
    timings: bool,
) -> Result<Report, CliError> {
    let checks = selected(names)?;
    let (pair, h) = setup(cfg)?;
    let order = cfg.order;
    let eps = cfg.eps_fd;
    let mut r = Report::new("verify");
    let wants = |n: &str| checks.iter().any(|(c, _)| *c == n);

    let table = grunsky_table(&pair, order);
    let coords = coordinates(&pair, &h, order);
    let needs_derivs = wants("jacobian") || wants("tau_gradient") || wants("tau_hessian_symmetry");
    let derivs = if needs_derivs {
        Some(coordinate_derivatives(
            &pair,
            &h,
            order.min(JACOBIAN_ORDER),
            eps,
        ))
    } else {
        None
    };

    for (name, default) in checks {
        let tol = cfg.tolerance(name, default);
        match name {
            "grunsky_symmetry" => {
                r.check(name, tol, timings, || Ok(table.clone()?.symmetry_defect()))
            }
            "grunsky_dual_path" => r.check(name, tol, timings, || {
                Ok(table
                    .clone()?
                    .max_difference(&grunsky_via_inverse(&pair, order)?))
            }),
            "t0_duality" => r.check(name, tol, timings, || Ok(coords.clone()?.t0_defect())),
            "z2_closed_form" => r.check(name, tol, timings, || Ok(coords.clone()?.z2_defect())),
            "plemelj" => r.check(name, tol, timings, || {
                Ok(plemelj_check(&pair, &h, &coords.clone()?)?.coefficient_defect)
            }),
            "string" => r.check(name, tol, timings, || string_check(&pair, &h)),
            "lax" => r.check(name, tol, timings, || {
                let mut worst: f64 = 0.0;
                for n in [-3, -2, -1, 1, 2, 3] {
                    worst = worst.max(lax_check(&pair, &h, n)?.residual());
                }
                Ok(worst)
            }),
            "canonical" => r.check(name, tol, timings, || canonical_check(&pair, &h)),
            "jacobian" => r.check(name, tol, timings, || {
                Ok(derivs.clone().unwrap()?.jacobian_defect())
            }),
            "tau_gradient" | "tau_hessian_symmetry" => r.check(name, tol, timings, || {
                let d = derivs.clone().unwrap()?;
                let d = restrict(&d, d.order.min(TAU_ORDER));
                let full = coordinates(&pair, &h, pair.order())?;
                let table = grunsky_table(&pair, d.order)?;
                let rep = tau_gradient_report(&d, &full, &table);
                Ok(if name == "tau_gradient" {
                    rep.defect()
                } else {
                    rep.symmetry_defect
                })
            }),
            "gauge_covariance" | "gauge_flow_invariance" => {
                if gauged(&h).is_ok() {
                    r.check(name, tol, timings, || {
                        if name == "gauge_covariance" {
                            gauge_covariance(&pair, &h, order)
                        } else {
                            gauge_flow_invariance(&pair, &h)
                        }
                    });
                }
            }
            "real_subspace" => {
                if pair.max_imag() == 0.0 && h.has_real_coefficients() {
                    r.check(name, tol, timings, || Ok(coords.clone()?.max_imag()));
                }
            }
            _ => unreachable!("names come from ALL_CHECKS"),
        }
    }
    if let Ok(x) = &coords {
        r.value("t0", x.t(0));
        r.value("v0", x.v0());
        r.value("log_t", x.log_t);
    }
    Ok(r.finish())
}

/// Σ reality relations and the Green kernel identity for a `sigma_from_g` pair.
pub fn cmd_sigma(cfg: &ExperimentConfig, timings: bool) -> Result<Report, CliError> {
    let g = cfg.sigma_g()?;
    let h = cfg.hamiltonian()?;
    let order = cfg.order;
    let mut r = Report::new("sigma");
    let sig = sigma_coordinate_check(&g, &h, order);
    r.check(
        "sigma_reality",
        cfg.tolerance("sigma_reality", 1e-10),
        timings,
        || Ok(sig.clone()?.1.defect()),
    );
    r.check(
        "sigma_t0_imag",
        cfg.tolerance("sigma_t0_imag", 1e-12),
        timings,
        || Ok(sig.clone()?.1.t0_imag),
    );
    let green = green_identity_check(&g, &h, order.min(GREEN_ORDER));
    r.check(
        "green_identity",
        cfg.tolerance("green_identity", 1e-10),
        timings,
        || Ok(green.clone()?.defect),
    );
    r.check(
        "green_hermitian",
        cfg.tolerance("green_hermitian", 1e-12),
        timings,
        || Ok(green.clone()?.hermitian_defect),
    );
    if let [m] = h.core().terms() {
        if m.mu == m.nu && m.mu > 0 && m.c == C64::new(1.0, 0.0) && h.gauge().is_empty() {
            r.check(
                "sigma_tau",
                cfg.tolerance("sigma_tau", 1e-9),
                timings,
                || {
                    let x = sig.clone()?.0;
                    Ok((sigma_logtau(&x, m.mu) - x.log_t).norm())
                },
            );
        }
    }
    if let Ok((x, _)) = &sig {
        r.value("t0", x.t(0));
        r.value("t1", x.t(1));
        r.value("t2", x.t(2));
        r.value("v0", x.v0());
        r.value("log_t", x.log_t);
    }
    Ok(r.finish())
}

/// Monomial-case checks for `H = z1^μ z2^(−ν)`; the configured Hamiltonian is ignored.
pub fn cmd_special(
    cfg: &ExperimentConfig,
    mu: i32,
    nu: i32,
    timings: bool,
) -> Result<Report, CliError> {
    let pair = cfg.pair()?;
    let h =
        Hamiltonian::monomial(mu, nu).map_err(|e| CliError::Usage(format!("--mu/--nu: {e}")))?;
    let order = cfg.order;
    let mut r = Report::new("special");
    let general = coordinates(&pair, &h, order);
    r.check(
        "special_vs_general",
        cfg.tolerance("special_vs_general", 1e-12),
        timings,
        || {
            let a = general.clone()?;
            let b = special_coords(&pair, mu, nu, order)?;
            Ok(a.t
                .iter()
                .chain(&a.v)
                .zip(b.t.iter().chain(&b.v))
                .map(|(x, y)| (x - y).norm())
                .fold(0.0, f64::max))
        },
    );
    r.check(
        "nontrivial_identity",
        cfg.tolerance("nontrivial_identity", 1e-9),
        timings,
        || Ok(nontrivial_identity(&general.clone()?, mu, nu)),
    );
    r.check(
        "special_logtau",
        cfg.tolerance("special_logtau", 1e-9),
        timings,
        || {
            let x = general.clone()?;
            Ok((special_logtau(&x, mu, nu) - x.log_t).norm())
        },
    );
    let gen = generating_identity_check(&pair, mu, nu, order);
    r.check(
        "generating_derivative",
        cfg.tolerance("generating_derivative", 1e-9),
        timings,
        || Ok(gen.clone()?.derivative_residual),
    );
    r.check(
        "generating_expansion",
        cfg.tolerance("generating_expansion", 1e-10),
        timings,
        || Ok(gen.clone()?.expansion_defect),
    );
    if let Ok(g) = &gen {
        r.value("constant_offset", g.constant_offset);
    }
    r.value("mu", mu);
    r.value("nu", nu);
    Ok(r.finish())
}

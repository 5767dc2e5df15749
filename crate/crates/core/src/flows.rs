//! The flows `∂_n` on pairs, flow stepping and the dynamical identities:
//! the Jacobian, the string equation, the Lax equations and the tau gradient.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::conformal_pair::ConformalPair;
use crate::coords::{coordinates, TodaCoordinates};
use crate::error::{Result, TodaError};
use crate::grunsky::{faber, GrunskyTable};
use crate::hamiltonian::{Hamiltonian, MonomialSum};
use crate::series::{divide_on_circle, Flavor, LaurentSeries, C64, MIN_CIRCLE_MODULUS};
use crate::util::par_map;

/// Largest `|a1·b − 1|` accepted after a step before renormalizing.
pub const DRIFT_TOL: f64 = 1e-9;

/// `u_n(w)` and the induced variations of `g` and `f`.
#[derive(Clone, Debug, PartialEq)]
pub struct FlowField {
    pub n: i32,
    pub u: LaurentSeries,
    pub dg: LaurentSeries,
    pub df: LaurentSeries,
}

impl FlowField {
    /// `u_{n;m}`, the coefficient of `w^(m+1)` in `u_n`.
    pub fn u_coeff(&self, m: i32) -> C64 {
        self.u.coeff(m + 1)
    }

    /// Largest coefficient of `dg/g′ − df/f′ − u_n` on the common window.
    pub fn split_defect(&self, pair: &ConformalPair) -> Result<f64> {
        let a = self.dg.mul(&pair.g().derivative().recip()?)?;
        let b = self.df.mul(&pair.f().derivative().recip()?)?;
        let d = a.sub(&b)?;
        let (lo, hi) = (d.lo(), d.hi());
        Ok((lo..=hi)
            .map(|k| (d.coeff(k) - self.u.coeff(k)).norm())
            .fold(0.0, f64::max))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Euler,
    Rk4,
}

/// `(b, a1)` when `g = b·w` and `f = a1·w` exactly.
fn monomial_pair(pair: &ConformalPair) -> Option<(C64, C64)> {
    let single = |s: &LaurentSeries| {
        let mut it = s.support();
        match (it.next(), it.next()) {
            (Some((1, c)), None) => Some(c),
            _ => None,
        }
    };
    Some((single(pair.g())?, single(pair.f())?))
}

/// `Σ c·(b w)^μ·(a w)^(−ν)` as an exact Laurent polynomial.
fn along_monomial_pair(sum: &MonomialSum, b: C64, a: C64) -> LaurentSeries {
    let terms: Vec<(i32, C64)> = sum
        .terms()
        .iter()
        .map(|t| (t.mu - t.nu, t.c * b.powi(t.mu) * a.powi(-t.nu)))
        .collect();
    LaurentSeries::from_terms(&terms)
}

/// Samples of the pair and its derivatives at the roots of unity.
struct CircleGrid {
    w: Vec<C64>,
    g: Vec<C64>,
    gp: Vec<C64>,
    f: Vec<C64>,
    fp: Vec<C64>,
}

impl CircleGrid {
    fn new(pair: &ConformalPair) -> Self {
        let m = pair.samples();
        let w = (0..m)
            .map(|j| C64::from_polar(1.0, TAU * j as f64 / m as f64))
            .collect();
        CircleGrid {
            w,
            g: pair.g().sample_on_circle(m),
            gp: pair.g().derivative().sample_on_circle(m),
            f: pair.f().sample_on_circle(m),
            fp: pair.f().derivative().sample_on_circle(m),
        }
    }

    fn len(&self) -> usize {
        self.w.len()
    }

    fn eval(&self, sum: &MonomialSum) -> Vec<C64> {
        (0..self.len())
            .map(|j| sum.eval(self.g[j], self.f[j]))
            .collect()
    }

    /// Coefficients on `[−width, width]` of a sampled function, largest modulus.
    fn max_coeff(samples: &[C64], width: i32) -> Result<f64> {
        let s = LaurentSeries::from_circle_samples(samples, -width, width, Flavor::TwoSided)?;
        Ok(s.max_abs())
    }
}

fn check_index(pair: &ConformalPair, n: i32) -> Result<()> {
    if n.unsigned_abs() as usize > pair.order() {
        return Err(TodaError::IndexOutOfRange {
            index: n,
            order: pair.order(),
        });
    }
    Ok(())
}

/// `P_n′`, with `P_0′ = 1/w`.
fn faber_derivative(pair: &ConformalPair, n: i32) -> Result<LaurentSeries> {
    if n == 0 {
        return Ok(LaurentSeries::monomial(C64::new(1.0, 0.0), -1));
    }
    Ok(faber(pair, n)?.poly()?.derivative())
}

/// `u_n = −P_n′/(f′g′·∂1∂2H(g,f))` on the window `[−D−|n|, D+|n|+2]`.
pub fn u_field(pair: &ConformalPair, h: &Hamiltonian, n: i32) -> Result<LaurentSeries> {
    check_index(pair, n)?;
    let num = faber_derivative(pair, n)?.neg();
    let d = pair.depth() as i32;
    let (lo, hi) = (-d - n.abs(), d + n.abs() + 2);
    if let Some((b, a)) = monomial_pair(pair) {
        let den = along_monomial_pair(&h.d12(), b, a).scale(b * a);
        return divide_on_circle(&num, &den, lo, hi, pair.samples());
    }
    let grid = CircleGrid::new(pair);
    let h12 = grid.eval(&h.d12());
    let den: Vec<C64> = (0..grid.len())
        .map(|j| grid.gp[j] * grid.fp[j] * h12[j])
        .collect();
    let min_modulus = den.iter().map(|x| x.norm()).fold(f64::INFINITY, f64::min);
    if min_modulus <= MIN_CIRCLE_MODULUS {
        return Err(TodaError::DenominatorVanishes { min_modulus });
    }
    let q: Vec<C64> = num
        .sample_on_circle(grid.len())
        .iter()
        .zip(&den)
        .map(|(a, b)| a / b)
        .collect();
    LaurentSeries::from_circle_samples(&q, lo, hi, Flavor::TwoSided)
}

/// `dg = g′·(½u_{n;0}w + Σ_{m≥1} u_{n;−m}w^(1−m))`, `df = −f′·(½u_{n;0}w + Σ_{m≥1} u_{n;m}w^(m+1))`.
pub fn flow_field(pair: &ConformalPair, h: &Hamiltonian, n: i32) -> Result<FlowField> {
    let u = u_field(pair, h, n)?;
    let d = pair.depth() as i32;
    let half = LaurentSeries::monomial(u.coeff(1) * 0.5, 1);
    let minus = u.restrict(u.lo(), 0, Flavor::AtInfinity).add(&half)?;
    let plus = u.restrict(2, u.hi(), Flavor::AtZero).add(&half)?;
    let dg = pair
        .g()
        .derivative()
        .mul(&minus)?
        .restrict(1 - d, 1, Flavor::AtInfinity);
    let df = pair
        .f()
        .derivative()
        .mul(&plus)?
        .neg()
        .restrict(1, 1 + d, Flavor::AtZero);
    Ok(FlowField { n, u, dg, df })
}

fn advance(
    pair: &ConformalPair,
    eps: f64,
    dg: &LaurentSeries,
    df: &LaurentSeries,
) -> Result<ConformalPair> {
    let e = C64::new(eps, 0.0);
    let g = pair.g().add(&dg.scale(e))?;
    let f = pair.f().add(&df.scale(e))?;
    Ok(ConformalPair::raw(g, f, pair.order(), pair.resolution()))
}

/// One step of size `eps` along `∂_n`, followed by the rescaling `f ← f/(a1·b)`.
pub fn step(
    pair: &ConformalPair,
    h: &Hamiltonian,
    n: i32,
    eps: f64,
    method: Method,
) -> Result<ConformalPair> {
    if eps == 0.0 {
        return Ok(pair.clone());
    }
    let moved = match method {
        Method::Euler => {
            let k = flow_field(pair, h, n)?;
            advance(pair, eps, &k.dg, &k.df)?
        }
        Method::Rk4 => {
            let k1 = flow_field(pair, h, n)?;
            let k2 = flow_field(&advance(pair, eps / 2.0, &k1.dg, &k1.df)?, h, n)?;
            let k3 = flow_field(&advance(pair, eps / 2.0, &k2.dg, &k2.df)?, h, n)?;
            let k4 = flow_field(&advance(pair, eps, &k3.dg, &k3.df)?, h, n)?;
            let two = C64::new(2.0, 0.0);
            let dg = k1
                .dg
                .add(&k2.dg.scale(two))?
                .add(&k3.dg.scale(two))?
                .add(&k4.dg)?;
            let df = k1
                .df
                .add(&k2.df.scale(two))?
                .add(&k3.df.scale(two))?
                .add(&k4.df)?;
            advance(pair, eps / 6.0, &dg, &df)?
        }
    };
    let norm = moved.a1() * moved.b();
    let drift = (norm - 1.0).norm();
    if drift > DRIFT_TOL {
        return Err(TodaError::FlowLeftChart { drift });
    }
    let f = moved.f().scale(norm.inv());
    ConformalPair::from_series(moved.g().clone(), f, pair.order(), pair.resolution())
}

/// The pairs visited by `steps` consecutive steps, starting pair included.
pub fn trajectory(
    pair: &ConformalPair,
    h: &Hamiltonian,
    n: i32,
    eps: f64,
    steps: usize,
    method: Method,
) -> Result<Vec<ConformalPair>> {
    let mut out = vec![pair.clone()];
    for _ in 0..steps {
        let next = step(out.last().unwrap(), h, n, eps, method)?;
        out.push(next);
    }
    Ok(out)
}

/// Central-difference derivatives of `t_m`, `v_m` and `log𝔗` along `∂_n`, `|n|, |m| ≤ order`.
/// `log𝔗` is always summed to the pair's own order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoordinateDerivatives {
    pub order: usize,
    pub eps: f64,
    /// `dt[n + order][m + order] ≈ ∂_n t_m`.
    pub dt: Vec<Vec<C64>>,
    /// `dv[n + order][m + order] ≈ ∂_n v_m`.
    pub dv: Vec<Vec<C64>>,
    /// `dlog_t[n + order] ≈ ∂_n log𝔗`.
    pub dlog_t: Vec<C64>,
}

impl CoordinateDerivatives {
    fn at(&self, table: &[Vec<C64>], n: i32, m: i32) -> C64 {
        let o = self.order as i32;
        table[(n + o) as usize][(m + o) as usize]
    }

    pub fn dt(&self, n: i32, m: i32) -> C64 {
        self.at(&self.dt, n, m)
    }

    pub fn dv(&self, n: i32, m: i32) -> C64 {
        self.at(&self.dv, n, m)
    }

    pub fn dlog_t(&self, n: i32) -> C64 {
        self.dlog_t[(n + self.order as i32) as usize]
    }

    /// `max |∂_n t_m − δ_nm|`.
    pub fn jacobian_defect(&self) -> f64 {
        let o = self.order as i32;
        let mut worst: f64 = 0.0;
        for n in -o..=o {
            for m in -o..=o {
                let want = if n == m { 1.0 } else { 0.0 };
                worst = worst.max((self.dt(n, m) - want).norm());
            }
        }
        worst
    }
}

pub fn coordinate_derivatives(
    pair: &ConformalPair,
    h: &Hamiltonian,
    order: usize,
    eps: f64,
) -> Result<CoordinateDerivatives> {
    let o = order as i32;
    let full = pair.order();
    let rows = par_map(
        (-o..=o).collect(),
        |n| -> Result<(Vec<C64>, Vec<C64>, C64)> {
            let plus: TodaCoordinates =
                coordinates(&step(pair, h, n, eps, Method::Euler)?, h, full)?;
            let minus = coordinates(&step(pair, h, n, -eps, Method::Euler)?, h, full)?;
            let q = |a: C64, b: C64| (a - b) / (2.0 * eps);
            let dt = (-o..=o).map(|m| q(plus.t(m), minus.t(m))).collect();
            let dv = (-o..=o).map(|m| q(plus.v(m), minus.v(m))).collect();
            Ok((dt, dv, q(plus.log_t, minus.log_t)))
        },
    );
    let mut out = CoordinateDerivatives {
        order,
        eps,
        dt: Vec::new(),
        dv: Vec::new(),
        dlog_t: Vec::new(),
    };
    for r in rows {
        let (dt, dv, dl) = r?;
        out.dt.push(dt);
        out.dv.push(dv);
        out.dlog_t.push(dl);
    }
    Ok(out)
}

/// `max |∂_n t_m − δ_nm|` for `|n|, |m| ≤ order`.
pub fn jacobian_check(
    pair: &ConformalPair,
    h: &Hamiltonian,
    order: usize,
    eps: f64,
) -> Result<f64> {
    Ok(coordinate_derivatives(pair, h, order, eps)?.jacobian_defect())
}

/// Largest coefficient of `{g,f}·∂1∂2H(g,f) − 1`, the bracket taken with the `n = 0` field.
pub fn string_check(pair: &ConformalPair, h: &Hamiltonian) -> Result<f64> {
    let k = flow_field(pair, h, 0)?;
    if let Some((b, a)) = monomial_pair(pair) {
        let exact = |s: &LaurentSeries| s.clone().with_flavor(Flavor::Exact);
        let w = LaurentSeries::monomial(C64::new(1.0, 0.0), 1);
        let gp = exact(&pair.g().derivative());
        let fp = exact(&pair.f().derivative());
        let bracket = w.mul(&gp.mul(&exact(&k.df))?.sub(&fp.mul(&exact(&k.dg))?)?)?;
        let h12 = along_monomial_pair(&h.d12(), b, a);
        return Ok(bracket.mul(&h12)?.sub(&LaurentSeries::one())?.max_abs());
    }
    let grid = CircleGrid::new(pair);
    let m = grid.len();
    let (dg, df) = (k.dg.sample_on_circle(m), k.df.sample_on_circle(m));
    let h12 = grid.eval(&h.d12());
    let r: Vec<C64> = (0..m)
        .map(|j| grid.w[j] * (grid.gp[j] * df[j] - grid.fp[j] * dg[j]) * h12[j] - 1.0)
        .collect();
    CircleGrid::max_coeff(&r, pair.depth() as i32)
}

/// `ℬ_n` and `∂_0 ℬ_n` built from the `n = 0` field.
fn lax_generator(
    pair: &ConformalPair,
    zero: &FlowField,
    n: i32,
) -> Result<(LaurentSeries, LaurentSeries)> {
    let halve_constant = |s: LaurentSeries| -> Result<LaurentSeries> {
        let c = s.coeff(0) * 0.5;
        s.sub(&LaurentSeries::constant(c))
    };
    let (x, dx, lo, hi) = if n > 0 {
        (pair.g(), &zero.dg, 0, n)
    } else {
        (pair.f(), &zero.df, n, 0)
    };
    let b = halve_constant(x.int_pow(n)?.restrict(lo, hi, Flavor::Exact))?;
    let db = x.int_pow(n - 1)?.mul(dx)?.scale(C64::new(n as f64, 0.0));
    let db = halve_constant(db.restrict(lo, hi, Flavor::Exact))?;
    Ok((b, db))
}

/// Residuals of `∂_n g = {ℬ_n, g}` and `∂_n f = {ℬ_n, f}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LaxReport {
    pub n: i32,
    pub g_residual: f64,
    pub f_residual: f64,
}

impl LaxReport {
    pub fn residual(&self) -> f64 {
        self.g_residual.max(self.f_residual)
    }
}

/// Compares the flow field of `∂_n` with the bracket `{ℬ_n, ·} = w(ℬ_n′ ∂_0 − ∂_0ℬ_n ∂_w)`.
pub fn lax_check(pair: &ConformalPair, h: &Hamiltonian, n: i32) -> Result<LaxReport> {
    if n == 0 {
        return Err(TodaError::IndexOutOfRange {
            index: 0,
            order: pair.order(),
        });
    }
    let zero = flow_field(pair, h, 0)?;
    let field = flow_field(pair, h, n)?;
    let (b, db) = lax_generator(pair, &zero, n)?;
    let bp = b.derivative();
    let bracket = |x: &LaurentSeries, dx0: &LaurentSeries| -> Result<LaurentSeries> {
        Ok(bp.mul(dx0)?.sub(&db.mul(&x.derivative())?)?.shift(1))
    };
    let rg = bracket(pair.g(), &zero.dg)?.sub(&field.dg)?;
    let rf = bracket(pair.f(), &zero.df)?.sub(&field.df)?;
    Ok(LaxReport {
        n,
        g_residual: rg.max_abs(),
        f_residual: rf.max_abs(),
    })
}

/// Largest coefficient of `{g, ℳ} − g` with `ℳ = g·∂1H(g,f)`.
pub fn canonical_check(pair: &ConformalPair, h: &Hamiltonian) -> Result<f64> {
    let zero = flow_field(pair, h, 0)?;
    let grid = CircleGrid::new(pair);
    let m = grid.len();
    let (dg, df) = (zero.dg.sample_on_circle(m), zero.df.sample_on_circle(m));
    let h1 = grid.eval(&h.d1());
    let h11 = grid.eval(&h.d11());
    let h12 = grid.eval(&h.d12());
    let r: Vec<C64> = (0..m)
        .map(|j| {
            let (g, gp, fp) = (grid.g[j], grid.gp[j], grid.fp[j]);
            let m_w = gp * h1[j] + g * (h11[j] * gp + h12[j] * fp);
            let m_0 = dg[j] * h1[j] + g * (h11[j] * dg[j] + h12[j] * df[j]);
            grid.w[j] * (gp * m_0 - dg[j] * m_w) - g
        })
        .collect();
    CircleGrid::max_coeff(&r, pair.depth() as i32)
}

/// The Hessian entry predicted by the Grunsky table for `∂_n v_m`.
pub fn predicted_hessian(table: &GrunskyTable, m: i32, n: i32) -> C64 {
    match (m, n) {
        (0, 0) => table.b00() * -2.0,
        (m, 0) => table.get(m, 0) * m.abs() as f64,
        (0, n) => table.get(0, n) * n.abs() as f64,
        (m, n) => table.get(m, n) * -((m * n).abs() as f64),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TauGradientReport {
    /// `max |∂_n log𝔗 − v_n|`.
    pub gradient_defect: f64,
    /// `max |∂_n v_m − predicted_hessian(m, n)|`.
    pub hessian_defect: f64,
    /// `|∂_0 v_0 + 2 b00|`.
    pub v0_defect: f64,
    /// `max |∂_n v_m − ∂_m v_n|`.
    pub symmetry_defect: f64,
}

impl TauGradientReport {
    pub fn defect(&self) -> f64 {
        self.gradient_defect
            .max(self.hessian_defect)
            .max(self.v0_defect)
    }
}

pub fn tau_gradient_report(
    derivs: &CoordinateDerivatives,
    coords: &TodaCoordinates,
    table: &GrunskyTable,
) -> TauGradientReport {
    let o = derivs.order as i32;
    let mut r = TauGradientReport {
        gradient_defect: 0.0,
        hessian_defect: 0.0,
        v0_defect: 0.0,
        symmetry_defect: 0.0,
    };
    for n in -o..=o {
        r.gradient_defect = r
            .gradient_defect
            .max((derivs.dlog_t(n) - coords.v(n)).norm());
        for m in -o..=o {
            let got = derivs.dv(n, m);
            r.hessian_defect = r
                .hessian_defect
                .max((got - predicted_hessian(table, m, n)).norm());
            r.symmetry_defect = r.symmetry_defect.max((got - derivs.dv(m, n)).norm());
        }
    }
    r.v0_defect = (derivs.dv(0, 0) + table.b00() * 2.0).norm();
    r
}

/// Tau gradient and Hessian identities for `|n|, |m| ≤ order`.
pub fn tau_gradient_check(
    pair: &ConformalPair,
    h: &Hamiltonian,
    order: usize,
    eps: f64,
) -> Result<TauGradientReport> {
    let derivs = coordinate_derivatives(pair, h, order, eps)?;
    let coords = coordinates(pair, h, pair.order())?;
    let table = crate::grunsky::grunsky_table(pair, order)?;
    Ok(tau_gradient_report(&derivs, &coords, &table))
}

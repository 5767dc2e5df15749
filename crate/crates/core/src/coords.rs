//! Toda coordinates `t_n`, `v_n`, the function `v0` and the tau function.

use serde::{Deserialize, Serialize};

use crate::conformal_pair::ConformalPair;
use crate::error::{Result, TodaError};
use crate::grunsky::log_ratio;
use crate::hamiltonian::{Hamiltonian, PairPowers};
use crate::series::{checked_residue, LaurentSeries, C64};

const ZERO: C64 = C64::new(0.0, 0.0);

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TodaCoordinates {
    pub order: usize,
    /// `t[n + order]` for `|n| ≤ order`.
    pub t: Vec<C64>,
    /// `v[n + order]` for `|n| ≤ order`; the middle entry is `v0`.
    pub v: Vec<C64>,
    pub t0_alt: C64,
    pub z1: C64,
    pub z2: C64,
    pub z3: C64,
    pub log_t: C64,
    pub z2_closed: C64,
}

impl TodaCoordinates {
    pub fn t(&self, n: i32) -> C64 {
        self.t[(n + self.order as i32) as usize]
    }

    pub fn v(&self, n: i32) -> C64 {
        self.v[(n + self.order as i32) as usize]
    }

    pub fn v0(&self) -> C64 {
        self.v(0)
    }

    /// `log τ = 2 Re log𝔗`.
    pub fn log_tau(&self) -> f64 {
        2.0 * self.log_t.re
    }

    pub fn t0_defect(&self) -> f64 {
        (self.t(0) - self.t0_alt).norm()
    }

    pub fn z2_defect(&self) -> f64 {
        (self.z2 - self.z2_closed).norm()
    }

    /// Largest imaginary part over `t`, `v`, `v0` and `log𝔗`.
    pub fn max_imag(&self) -> f64 {
        self.t
            .iter()
            .chain(&self.v)
            .chain(std::iter::once(&self.log_t))
            .map(|c| c.im.abs())
            .fold(0.0, f64::max)
    }
}

/// `∂1H(g,f)·g′` and `∂2H(g,f)·f′`, the two integrand kernels.
pub(crate) struct Kernels {
    pub a: LaurentSeries,
    pub b: LaurentSeries,
}

impl Kernels {
    pub fn new(pair: &ConformalPair, h: &Hamiltonian, powers: &mut PairPowers) -> Result<Self> {
        let a = h.d1().eval_along(powers)?.mul(&pair.g().derivative())?;
        let b = h.d2().eval_along(powers)?.mul(&pair.f().derivative())?;
        Ok(Kernels { a, b })
    }
}

pub struct TimeVariables {
    pub t: Vec<C64>,
    pub v: Vec<C64>,
    pub t0_alt: C64,
}

fn check_order(pair: &ConformalPair, order: usize) -> Result<()> {
    if order > pair.order() {
        return Err(TodaError::IndexOutOfRange {
            index: order as i32,
            order: pair.order(),
        });
    }
    Ok(())
}

/// `t_n` for `|n| ≤ N`, `v_n` for `1 ≤ |n| ≤ N` (slot 0 of `v` left zero) and
/// the second expression for `t0`.
pub fn time_variables(
    pair: &ConformalPair,
    h: &Hamiltonian,
    order: usize,
) -> Result<TimeVariables> {
    check_order(pair, order)?;
    let mut powers = PairPowers::new(pair)?;
    let k = Kernels::new(pair, h, &mut powers)?;
    time_variables_with(&k, &mut powers, order)
}

fn time_variables_with(
    k: &Kernels,
    powers: &mut PairPowers,
    order: usize,
) -> Result<TimeVariables> {
    let o = order as i32;
    let mut t = vec![ZERO; 2 * order + 1];
    let mut v = vec![ZERO; 2 * order + 1];
    let one = LaurentSeries::one();
    t[order] = checked_residue(&k.a, &one)?;
    let t0_alt = -checked_residue(&k.b, &one)?;
    for n in 1..=o {
        let nf = n as f64;
        t[(o + n) as usize] = checked_residue(&k.a, powers.g(-n)?)? / nf;
        v[(o + n) as usize] = checked_residue(&k.a, powers.g(n)?)?;
        t[(o - n) as usize] = checked_residue(&k.b, powers.f(n)?)? / nf;
        v[(o - n) as usize] = checked_residue(&k.b, powers.f(-n)?)?;
    }
    Ok(TimeVariables { t, v, t0_alt })
}

/// `v0 = Res[∂1H g′ log(g/w) + ∂2H f′ log(f/w) − H/w]` with `log a1 := −log b`.
pub fn v_zero(pair: &ConformalPair, h: &Hamiltonian) -> Result<C64> {
    let mut powers = PairPowers::new(pair)?;
    let k = Kernels::new(pair, h, &mut powers)?;
    v_zero_with(pair, h, &k, &mut powers)
}

fn v_zero_with(
    pair: &ConformalPair,
    h: &Hamiltonian,
    k: &Kernels,
    powers: &mut PairPowers,
) -> Result<C64> {
    let (lg, lf) = paired_logs(pair)?;
    let hs = h.all_terms().eval_along(powers)?;
    Ok(checked_residue(&k.a, &lg)? + checked_residue(&k.b, &lf)? - hs.coeff(0))
}

/// `log(g/w)` and `log(f/w)` with the constant terms `log b` and `−log b`.
pub fn paired_logs(pair: &ConformalPair) -> Result<(LaurentSeries, LaurentSeries)> {
    let log_b = LaurentSeries::constant(pair.b().ln());
    let lg = log_ratio(pair.g())?;
    let lg = lg.sub(&LaurentSeries::constant(lg.coeff(0)))?.add(&log_b)?;
    let lf = log_ratio(pair.f())?;
    let lf = lf.sub(&LaurentSeries::constant(lf.coeff(0)))?.sub(&log_b)?;
    Ok((lg, lf))
}

/// Coefficients of `Φ(z) = Σ (v_n/n) z^(−n)` and `Ψ(z) = Σ (v_(−n)/n) z^n`, index `n − 1`.
pub fn phi_psi(coords: &TodaCoordinates) -> (Vec<C64>, Vec<C64>) {
    let o = coords.order as i32;
    let phi = (1..=o).map(|n| coords.v(n) / n as f64).collect();
    let psi = (1..=o).map(|n| coords.v(-n) / n as f64).collect();
    (phi, psi)
}

/// `(Z1, Z2, Z3, log𝔗, ½Σ t_n v_n)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TauParts {
    pub z1: C64,
    pub z2: C64,
    pub z3: C64,
    pub log_t: C64,
    pub z2_closed: C64,
}

fn tau_parts(
    pair: &ConformalPair,
    h: &Hamiltonian,
    k: &Kernels,
    powers: &mut PairPowers,
    tv: &TimeVariables,
    v0: C64,
    order: usize,
) -> Result<TauParts> {
    let o = order as i32;
    let t = |n: i32| tv.t[(n + o) as usize];
    let v = |n: i32| tv.v[(n + o) as usize];
    let z1 = t(0) * v0 / 2.0;

    let phi_terms: Vec<(i32, C64)> = (1..=o).map(|n| (-n, v(n) / n as f64)).collect();
    let psi_terms: Vec<(i32, C64)> = (1..=o).map(|n| (n, v(-n) / n as f64)).collect();
    let phi_g = LaurentSeries::compose(&LaurentSeries::from_terms(&phi_terms), pair.g())?;
    let psi_f = LaurentSeries::compose(&LaurentSeries::from_terms(&psi_terms), pair.f())?;
    let z2 = (checked_residue(&k.a, &phi_g)? + checked_residue(&k.b, &psi_f)?) / 2.0;

    let (j1, j2) = h.j_pair();
    let j1 = j1.eval_along(powers)?;
    let j2 = j2.eval_along(powers)?;
    let z3 = (checked_residue(&j1, &pair.g().derivative())?
        + checked_residue(&j2, &pair.f().derivative())?)
        / 4.0;

    let mut z2_closed = ZERO;
    for n in 1..=o {
        z2_closed += t(n) * v(n) + t(-n) * v(-n);
    }
    z2_closed /= 2.0;
    Ok(TauParts {
        z1,
        z2,
        z3,
        log_t: z1 + z2 + z3,
        z2_closed,
    })
}

/// All coordinates and the tau function for `|n| ≤ order`.
pub fn coordinates(pair: &ConformalPair, h: &Hamiltonian, order: usize) -> Result<TodaCoordinates> {
    check_order(pair, order)?;
    let mut powers = PairPowers::new(pair)?;
    let k = Kernels::new(pair, h, &mut powers)?;
    let mut tv = time_variables_with(&k, &mut powers, order)?;
    let v0 = v_zero_with(pair, h, &k, &mut powers)?;
    let parts = tau_parts(pair, h, &k, &mut powers, &tv, v0, order)?;
    tv.v[order] = v0;
    Ok(TodaCoordinates {
        order,
        t: tv.t,
        v: tv.v,
        t0_alt: tv.t0_alt,
        z1: parts.z1,
        z2: parts.z2,
        z3: parts.z3,
        log_t: parts.log_t,
        z2_closed: parts.z2_closed,
    })
}

/// Tau pieces recomputed from a finished coordinate set.
pub fn log_tau(
    pair: &ConformalPair,
    h: &Hamiltonian,
    coords: &TodaCoordinates,
) -> Result<TauParts> {
    let mut powers = PairPowers::new(pair)?;
    let k = Kernels::new(pair, h, &mut powers)?;
    let mut v = coords.v.clone();
    v[coords.order] = ZERO;
    let tv = TimeVariables {
        t: coords.t.clone(),
        v,
        t0_alt: coords.t0_alt,
    };
    tau_parts(pair, h, &k, &mut powers, &tv, coords.v0(), coords.order)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlemeljReport {
    /// Basis coefficients against `(n t_n, t0, v_n)` and `(−n t_(−n), t0, −v_(−n))`.
    pub coefficient_defect: f64,
    /// Sup over the circle grid of `ℳ − Σ_(|k|≤N)` basis terms; truncation-limited.
    pub reconstruction_defect: f64,
}

/// Expands `ℳ = g·∂1H` in powers of `g` and `ℳ̃ = −f·∂2H` in powers of `f`.
pub fn plemelj_check(
    pair: &ConformalPair,
    h: &Hamiltonian,
    coords: &TodaCoordinates,
) -> Result<PlemeljReport> {
    let o = coords.order as i32;
    let mut powers = PairPowers::new(pair)?;
    let m = h.d1().eval_along(&mut powers)?.mul(pair.g())?;
    let mt = h.d2().eval_along(&mut powers)?.mul(pair.f())?.neg();
    let dg = pair.g().derivative();
    let df = pair.f().derivative();
    let samples = pair.samples();
    let sm = m.sample_on_circle(samples);
    let smt = mt.sample_on_circle(samples);
    let mut recon = vec![ZERO; samples];
    let mut recon_t = vec![ZERO; samples];
    let mut defect: f64 = 0.0;
    for kk in -o..=o {
        let gk = powers.g(-kk - 1)?.mul(&dg)?;
        let coef = checked_residue(&m, &gk)?;
        let want = match kk {
            0 => coords.t(0),
            k if k > 0 => coords.t(k) * k as f64,
            k => coords.v(-k),
        };
        defect = defect.max((coef - want).norm());
        let fk = powers.f(-kk - 1)?.mul(&df)?;
        let coef_t = checked_residue(&mt, &fk)?;
        let want_t = match kk {
            0 => coords.t(0),
            k if k < 0 => -coords.t(k) * (-k) as f64,
            k => -coords.v(-k),
        };
        defect = defect.max((coef_t - want_t).norm());
        for (r, s) in recon
            .iter_mut()
            .zip(powers.g(kk)?.sample_on_circle(samples))
        {
            *r += coef * s;
        }
        for (r, s) in recon_t
            .iter_mut()
            .zip(powers.f(kk)?.sample_on_circle(samples))
        {
            *r += coef_t * s;
        }
    }
    let mut rec: f64 = 0.0;
    for i in 0..samples {
        rec = rec
            .max((sm[i] - recon[i]).norm())
            .max((smt[i] - recon_t[i]).norm());
    }
    Ok(PlemeljReport {
        coefficient_defect: defect,
        reconstruction_defect: rec,
    })
}

//! The monomial Hamiltonian `H = z1^μ z2^(−ν)`: closed-form coordinates, tau and identities.

use serde::{Deserialize, Serialize};

use crate::conformal_pair::ConformalPair;
use crate::coords::{paired_logs, plemelj_check, TodaCoordinates};
use crate::error::{Result, TodaError};
use crate::hamiltonian::{Hamiltonian, PairPowers};
use crate::series::{checked_residue, LaurentSeries, C64};

const ZERO: C64 = C64::new(0.0, 0.0);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonomialCase {
    pub mu: i32,
    pub nu: i32,
}

impl MonomialCase {
    pub fn new(mu: i32, nu: i32) -> Result<Self> {
        if mu == 0 || nu == 0 {
            return Err(TodaError::InvalidHamiltonian(
                "μ and ν must be nonzero".into(),
            ));
        }
        Ok(MonomialCase { mu, nu })
    }

    pub fn hamiltonian(&self) -> Hamiltonian {
        Hamiltonian::monomial(self.mu, self.nu).expect("nonzero exponents")
    }

    fn spread(&self) -> usize {
        (self.mu.unsigned_abs() + self.nu.unsigned_abs()) as usize
    }

    /// `|μ| + |ν| + N` must stay below the pair's series depth.
    pub fn check_budget(&self, pair: &ConformalPair, order: usize) -> Result<()> {
        let needed = self.spread() + order;
        if needed >= pair.depth() {
            return Err(TodaError::WindowBudget {
                needed,
                depth: pair.depth(),
            });
        }
        Ok(())
    }
}

/// `f^(−ν)·g′` and `g^μ·f′`, the two halves every residue shares.
struct Halves {
    fg: LaurentSeries,
    gf: LaurentSeries,
    q: LaurentSeries,
}

impl Halves {
    fn new(pair: &ConformalPair, case: MonomialCase, powers: &mut PairPowers) -> Result<Self> {
        let f_nu = powers.f(-case.nu)?.clone();
        let g_mu = powers.g(case.mu)?.clone();
        Ok(Halves {
            fg: f_nu.mul(&pair.g().derivative())?,
            gf: g_mu.mul(&pair.f().derivative())?,
            q: g_mu.mul(&f_nu)?,
        })
    }
}

/// `t_n`, `v_n` for `|n| ≤ order` from the contour formulas specific to the monomial.
pub fn special_coords(
    pair: &ConformalPair,
    mu: i32,
    nu: i32,
    order: usize,
) -> Result<TodaCoordinates> {
    let case = MonomialCase::new(mu, nu)?;
    case.check_budget(pair, order)?;
    let mut powers = PairPowers::new(pair)?;
    let h = Halves::new(pair, case, &mut powers)?;
    let (muf, nuf) = (mu as f64, nu as f64);
    let o = order as i32;
    let mut t = vec![ZERO; 2 * order + 1];
    let mut v = vec![ZERO; 2 * order + 1];
    t[order] = checked_residue(powers.g(mu - 1)?, &h.fg)? * muf;
    let t0_alt = checked_residue(powers.f(-nu - 1)?, &h.gf)? * nuf;
    for n in 1..=o {
        let nf = n as f64;
        t[(o + n) as usize] = checked_residue(powers.g(mu - n - 1)?, &h.fg)? * muf / nf;
        v[(o + n) as usize] = checked_residue(powers.g(mu + n - 1)?, &h.fg)? * muf;
        t[(o - n) as usize] = checked_residue(powers.f(-nu + n - 1)?, &h.gf)? * (-nuf / nf);
        v[(o - n) as usize] = checked_residue(powers.f(-nu - n - 1)?, &h.gf)? * (-nuf);
    }
    let (lg, lf) = paired_logs(pair)?;
    let a = powers.g(mu - 1)?.mul(&lg)?;
    let b = powers.f(-nu - 1)?.mul(&lf)?;
    v[order] = checked_residue(&a, &h.fg)? * muf - checked_residue(&b, &h.gf)? * nuf - h.q.coeff(0);

    let mut coords = TodaCoordinates {
        order,
        t,
        v,
        t0_alt,
        z1: ZERO,
        z2: ZERO,
        z3: ZERO,
        log_t: ZERO,
        z2_closed: ZERO,
    };
    let parts = closed_parts(&coords, mu, nu);
    coords.z1 = parts.0;
    coords.z2 = parts.1;
    coords.z2_closed = parts.1;
    coords.z3 = parts.2;
    coords.log_t = parts.0 + parts.1 + parts.2;
    Ok(coords)
}

/// `Σ_(n≥1) n t_n v_n` and `Σ_(n≥1) n t_(−n) v_(−n)`.
fn weighted_sums(coords: &TodaCoordinates) -> (C64, C64) {
    let o = coords.order as i32;
    let mut plus = ZERO;
    let mut minus = ZERO;
    for n in 1..=o {
        let nf = n as f64;
        plus += coords.t(n) * coords.v(n) * nf;
        minus += coords.t(-n) * coords.v(-n) * nf;
    }
    (plus, minus)
}

/// `(t0 v0/2, ½Σ t_n v_n, Z3)` with `Z3` from the canonical `J` pair in closed form.
fn closed_parts(coords: &TodaCoordinates, mu: i32, nu: i32) -> (C64, C64, C64) {
    let o = coords.order as i32;
    let (muf, nuf) = (mu as f64, nu as f64);
    let t0 = coords.t(0);
    let mut z2 = ZERO;
    for n in 1..=o {
        z2 += coords.t(n) * coords.v(n) + coords.t(-n) * coords.v(-n);
    }
    let (plus, minus) = weighted_sums(coords);
    let z3 = -(t0 * t0 * (1.0 / muf + 1.0 / nuf)) / 8.0 - plus / (4.0 * muf) - minus / (4.0 * nuf);
    (t0 * coords.v0() / 2.0, z2 / 2.0, z3)
}

/// `2ν Σ n t_n v_n + ν t0²` minus `2μ Σ n t_(−n) v_(−n) + μ t0²`.
pub fn nontrivial_identity(coords: &TodaCoordinates, mu: i32, nu: i32) -> f64 {
    let (plus, minus) = weighted_sums(coords);
    let t0 = coords.t(0);
    let (muf, nuf) = (mu as f64, nu as f64);
    let lhs = plus * 2.0 * nuf + t0 * t0 * nuf;
    let rhs = minus * 2.0 * muf + t0 * t0 * muf;
    (lhs - rhs).norm()
}

/// `log𝔗 = −⅛(1/μ + 1/ν)t0² + ½t0v0 + ½Σ(1 − n/(2μ))t_n v_n + ½Σ(1 − n/(2ν))t_(−n) v_(−n)`.
pub fn special_logtau(coords: &TodaCoordinates, mu: i32, nu: i32) -> C64 {
    let (a, b, c) = closed_parts(coords, mu, nu);
    a + b + c
}

/// The same sum with the weights `1 − 1/(2μ)`, `1 − 1/(2ν)` in place of `1 − n/(2μ)`, `1 − n/(2ν)`.
pub fn unweighted_logtau(coords: &TodaCoordinates, mu: i32, nu: i32) -> C64 {
    let o = coords.order as i32;
    let (muf, nuf) = (mu as f64, nu as f64);
    let t0 = coords.t(0);
    let mut s = -(t0 * t0 * (1.0 / muf + 1.0 / nuf)) / 8.0 + t0 * coords.v0() / 2.0;
    for n in 1..=o {
        s += coords.t(n) * coords.v(n) * (0.5 - 0.25 / muf)
            + coords.t(-n) * coords.v(-n) * (0.5 - 0.25 / nuf);
    }
    s
}

/// On Σ with `μ = ν`: `−t0²/(4μ) + t0v0/2 + ½Σ(1 − n/(2μ))(t_n v_n + conj(t_n v_n))`.
pub fn sigma_logtau(coords: &TodaCoordinates, mu: i32) -> C64 {
    let o = coords.order as i32;
    let muf = mu as f64;
    let t0 = coords.t(0);
    let mut s = -(t0 * t0) / (4.0 * muf) + t0 * coords.v0() / 2.0;
    for n in 1..=o {
        let tv = coords.t(n) * coords.v(n);
        s += (tv + tv.conj()) * (0.5 - n as f64 / (4.0 * muf));
    }
    s
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratingReport {
    /// Both expansions of `μg^μf^(−ν)` and `νg^μf^(−ν)` against `(t, v)`.
    pub expansion_defect: f64,
    /// Max over `|k| ≤ N` of the `w^k` coefficient of `d/dw[g^μ f^(−ν)] − d/dw[RHS]`.
    pub derivative_residual: f64,
    /// `w^0` coefficient of `g^μ f^(−ν) − RHS`.
    pub constant_offset: C64,
}

/// Checks `g^μ f^(−ν) = Σ t_n g^n + t0 log(g/w) − Σ (v_n/n) g^(−n) − Σ t_(−n) f^(−n) − t0 log(f/w) + Σ (v_(−n)/n) f^n`
/// in differentiated form on exponents `|k| ≤ order`; the sums run as far as the window budget allows.
pub fn generating_identity_check(
    pair: &ConformalPair,
    mu: i32,
    nu: i32,
    order: usize,
) -> Result<GeneratingReport> {
    let case = MonomialCase::new(mu, nu)?;
    case.check_budget(pair, order)?;
    let h = case.hamiltonian();
    let coords = special_coords(pair, mu, nu, order)?;
    let expansion_defect = plemelj_check(pair, &h, &coords)?.coefficient_defect;

    let ext = pair.depth() - case.spread() - order - 1;
    let ext = ext.min(pair.order().max(order) * 4).max(order);
    let full = special_coords(pair, mu, nu, ext)?;
    let mut powers = PairPowers::new(pair)?;
    let g_mu = powers.g(mu)?.clone();
    let q = g_mu.mul(powers.f(-nu)?)?;
    let (lg, lf) = paired_logs(pair)?;
    let logs = lg.sub(&lf)?;

    let o = order as i32;
    let width = 2 * order + 1;
    let mut rhs = vec![ZERO; width];
    let mut add = |s: &LaurentSeries, c: C64| {
        for k in -o..=o {
            rhs[(k + o) as usize] += s.coeff(k) * c;
        }
    };
    add(&logs, full.t(0));
    for n in 1..=ext as i32 {
        let nf = n as f64;
        add(powers.g(n)?, full.t(n));
        add(powers.g(-n)?, -full.v(n) / nf);
        add(powers.f(-n)?, -full.t(-n));
        add(powers.f(n)?, full.v(-n) / nf);
    }
    // d/dw multiplies the w^k coefficient by k.
    let mut residual: f64 = 0.0;
    for k in -o..=o {
        let diff = q.coeff(k) - rhs[(k + o) as usize];
        residual = residual.max((diff * k as f64).norm());
    }
    Ok(GeneratingReport {
        expansion_defect,
        derivative_residual: residual,
        constant_offset: q.coeff(0) - rhs[o as usize],
    })
}

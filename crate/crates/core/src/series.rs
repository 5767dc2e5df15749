//! Windowed truncated Laurent series over complex doubles.
//!
//! A series stores the coefficients of `w^lo ..= w^hi`. Its flavor says which
//! side of the window is a hard truncation: `AtZero` series are exact at the
//! bottom and cut off above, `AtInfinity` series are exact at the top and cut
//! off below, `TwoSided` series are cut off on both sides and `Exact` series
//! are finite Laurent polynomials. Only trusted coefficients are stored, so
//! the reliable window always equals the stored window.

use std::cell::RefCell;
use std::fmt;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Result, TodaError};

pub type C64 = Complex64;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Smallest modulus accepted for a leading coefficient that must be inverted.
pub const MIN_INVERTIBLE: f64 = 1e-300;
/// Smallest sampled modulus accepted for a circle denominator.
pub const MIN_CIRCLE_MODULUS: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Flavor {
    AtZero,
    AtInfinity,
    TwoSided,
    Exact,
}

impl Flavor {
    pub fn truncated_below(self) -> bool {
        matches!(self, Flavor::AtInfinity | Flavor::TwoSided)
    }

    pub fn truncated_above(self) -> bool {
        matches!(self, Flavor::AtZero | Flavor::TwoSided)
    }

    fn combine(self, other: Flavor) -> Flavor {
        match (self, other) {
            (Flavor::Exact, f) | (f, Flavor::Exact) => f,
            (a, b) if a == b => a,
            _ => Flavor::TwoSided,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Flavor::AtZero => "AtZero",
            Flavor::AtInfinity => "AtInfinity",
            Flavor::TwoSided => "TwoSided",
            Flavor::Exact => "Exact",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LaurentSeries {
    lo: i32,
    coeffs: Vec<C64>,
    flavor: Flavor,
}

/// Coefficients read along the decay direction starting at the leading term.
struct DecayView {
    lead: i32,
    dir: i32,
    d: Vec<C64>,
    flavor: Flavor,
}

impl DecayView {
    fn into_series(self) -> LaurentSeries {
        let DecayView {
            lead,
            dir,
            mut d,
            flavor,
        } = self;
        if dir >= 0 {
            LaurentSeries::new(lead, d, flavor)
        } else {
            let lo = lead - (d.len() as i32 - 1);
            d.reverse();
            LaurentSeries::new(lo, d, flavor)
        }
    }
}

impl LaurentSeries {
    /// Builds a series from `coeffs[k]` = coefficient of `w^(lo+k)`.
    pub fn new(lo: i32, coeffs: Vec<C64>, flavor: Flavor) -> Self {
        let coeffs = if coeffs.is_empty() {
            vec![ZERO]
        } else {
            coeffs
        };
        LaurentSeries { lo, coeffs, flavor }
    }

    pub fn zero() -> Self {
        Self::new(0, vec![ZERO], Flavor::Exact)
    }

    pub fn constant(c: C64) -> Self {
        Self::new(0, vec![c], Flavor::Exact)
    }

    pub fn one() -> Self {
        Self::constant(ONE)
    }

    pub fn monomial(c: C64, k: i32) -> Self {
        Self::new(k, vec![c], Flavor::Exact)
    }

    /// Finite Laurent polynomial from `(exponent, coefficient)` pairs.
    pub fn from_terms(terms: &[(i32, C64)]) -> Self {
        Self::from_terms_with(terms, Flavor::Exact)
    }

    pub fn from_terms_with(terms: &[(i32, C64)], flavor: Flavor) -> Self {
        if terms.is_empty() {
            return Self::new(0, vec![ZERO], flavor);
        }
        let lo = terms.iter().map(|t| t.0).min().unwrap();
        let hi = terms.iter().map(|t| t.0).max().unwrap();
        let mut coeffs = vec![ZERO; (hi - lo + 1) as usize];
        for &(k, c) in terms {
            coeffs[(k - lo) as usize] += c;
        }
        Self::new(lo, coeffs, flavor)
    }

    /// Same series viewed with window `[lo, hi]`, padding with exact zeros.
    pub fn padded(&self, lo: i32, hi: i32, flavor: Flavor) -> Self {
        let coeffs = (lo..=hi).map(|k| self.coeff(k)).collect();
        Self::new(lo, coeffs, flavor)
    }

    pub fn lo(&self) -> i32 {
        self.lo
    }

    pub fn hi(&self) -> i32 {
        self.lo + self.coeffs.len() as i32 - 1
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn flavor(&self) -> Flavor {
        self.flavor
    }

    pub fn with_flavor(mut self, flavor: Flavor) -> Self {
        self.flavor = flavor;
        self
    }

    /// Exponent range whose coefficients are trusted.
    pub fn reliable(&self) -> (i32, i32) {
        (self.lo, self.hi())
    }

    pub fn coeff(&self, k: i32) -> C64 {
        if k < self.lo || k > self.hi() {
            ZERO
        } else {
            self.coeffs[(k - self.lo) as usize]
        }
    }

    pub fn residue(&self) -> C64 {
        self.coeff(-1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| *c == ZERO)
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Exponents `k` with a stored nonzero coefficient.
    pub fn support(&self) -> impl Iterator<Item = (i32, C64)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != ZERO)
            .map(move |(i, c)| (self.lo + i as i32, *c))
    }

    /// Where the series is "large": the exact edge for one-sided flavors,
    /// the dominant coefficient otherwise.
    fn anchor(&self) -> i32 {
        match self.flavor {
            Flavor::AtInfinity => self.support().map(|(k, _)| k).last().unwrap_or(self.hi()),
            Flavor::AtZero => self.support().map(|(k, _)| k).next().unwrap_or(self.lo),
            _ => {
                let mut best = self.lo;
                let mut m = -1.0;
                for (i, c) in self.coeffs.iter().enumerate() {
                    if c.norm() > m {
                        m = c.norm();
                        best = self.lo + i as i32;
                    }
                }
                best
            }
        }
    }

    /// Number of trusted terms past the leading one, in the decay direction.
    pub fn depth(&self) -> usize {
        match self.flavor {
            Flavor::AtInfinity => (self.anchor() - self.lo) as usize,
            Flavor::AtZero => (self.hi() - self.anchor()) as usize,
            _ => self.len() - 1,
        }
    }

    pub fn eval(&self, w: C64) -> C64 {
        let mut acc = ZERO;
        for c in self.coeffs.iter().rev() {
            acc = acc * w + c;
        }
        acc * w.powi(self.lo)
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::new(
            self.lo,
            self.coeffs.iter().map(|c| c * s).collect(),
            self.flavor,
        )
    }

    pub fn neg(&self) -> Self {
        self.scale(-ONE)
    }

    /// Multiplication by `w^k`.
    pub fn shift(&self, k: i32) -> Self {
        Self::new(self.lo + k, self.coeffs.clone(), self.flavor)
    }

    /// Coefficientwise conjugation, `a(w) ↦ conj(a(conj w))`.
    pub fn conj(&self) -> Self {
        Self::new(
            self.lo,
            self.coeffs.iter().map(|c| c.conj()).collect(),
            self.flavor,
        )
    }

    /// `a(w) ↦ conj(a(1/conj w))`; swaps the roles of zero and infinity.
    pub fn conj_reflect(&self) -> Self {
        let coeffs: Vec<C64> = self.coeffs.iter().rev().map(|c| c.conj()).collect();
        let flavor = match self.flavor {
            Flavor::AtZero => Flavor::AtInfinity,
            Flavor::AtInfinity => Flavor::AtZero,
            f => f,
        };
        Self::new(-self.hi(), coeffs, flavor)
    }

    /// Keeps exponents in `[lo, hi]`, tagging the result with `flavor`.
    pub fn restrict(&self, lo: i32, hi: i32, flavor: Flavor) -> Self {
        let lo2 = lo.max(self.lo);
        let hi2 = hi.min(self.hi());
        if lo2 > hi2 {
            return Self::new(lo.max(self.lo.min(hi)), vec![ZERO], flavor);
        }
        let coeffs = (lo2..=hi2).map(|k| self.coeff(k)).collect();
        Self::new(lo2, coeffs, flavor)
    }

    pub fn derivative(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| c * (self.lo + i as i32) as f64)
            .collect();
        Self::new(self.lo - 1, coeffs, self.flavor)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.combine(other, ONE)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.combine(other, -ONE)
    }

    fn combine(&self, other: &Self, s: C64) -> Result<Self> {
        let mut lo = self.lo.min(other.lo);
        let mut hi = self.hi().max(other.hi());
        for x in [self, other] {
            if x.flavor.truncated_below() {
                lo = lo.max(x.lo);
            }
            if x.flavor.truncated_above() {
                hi = hi.min(x.hi());
            }
        }
        if lo > hi {
            return Err(TodaError::WindowUnderflow { lo, hi });
        }
        let coeffs = (lo..=hi)
            .map(|k| self.coeff(k) + s * other.coeff(k))
            .collect();
        Ok(Self::new(lo, coeffs, self.flavor.combine(other.flavor)))
    }

    /// Trusted exponent window of `self * other`.
    pub fn product_window(&self, other: &Self) -> (i32, i32) {
        let mut lo = self.lo + other.lo;
        let mut hi = self.hi() + other.hi();
        for (a, b) in [(self, other), (other, self)] {
            if a.flavor.truncated_below() {
                let edge = if b.flavor.truncated_above() {
                    b.anchor()
                } else {
                    b.hi()
                };
                lo = lo.max(a.lo + edge);
            }
            if a.flavor.truncated_above() {
                let edge = if b.flavor.truncated_below() {
                    b.anchor()
                } else {
                    b.lo
                };
                hi = hi.min(a.hi() + edge);
            }
        }
        (lo, hi)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        let (lo, hi) = self.product_window(other);
        if lo > hi {
            return Err(TodaError::WindowUnderflow { lo, hi });
        }
        let mut out = vec![ZERO; (hi - lo + 1) as usize];
        for (i, a) in self.coeffs.iter().enumerate() {
            if *a == ZERO {
                continue;
            }
            let ei = self.lo + i as i32;
            let jlo = (lo - ei - other.lo).max(0);
            let jhi = (hi - ei - other.lo).min(other.len() as i32 - 1);
            for j in jlo..=jhi {
                let e = ei + other.lo + j;
                out[(e - lo) as usize] += a * other.coeffs[j as usize];
            }
        }
        Ok(Self::new(lo, out, self.flavor.combine(other.flavor)))
    }

    fn decay_view(&self) -> Result<DecayView> {
        let support: Vec<i32> = self.support().map(|(k, _)| k).collect();
        if support.is_empty() {
            return Err(TodaError::ZeroLeadingCoefficient);
        }
        match self.flavor {
            Flavor::AtZero => {
                let lead = support[0];
                let d = (lead..=self.hi()).map(|k| self.coeff(k)).collect();
                Ok(DecayView {
                    lead,
                    dir: 1,
                    d,
                    flavor: Flavor::AtZero,
                })
            }
            Flavor::AtInfinity => {
                let lead = *support.last().unwrap();
                let d = (self.lo..=lead).rev().map(|k| self.coeff(k)).collect();
                Ok(DecayView {
                    lead,
                    dir: -1,
                    d,
                    flavor: Flavor::AtInfinity,
                })
            }
            Flavor::Exact if support.len() == 1 => Ok(DecayView {
                lead: support[0],
                dir: 0,
                d: vec![self.coeff(support[0])],
                flavor: Flavor::Exact,
            }),
            f => Err(TodaError::AmbiguousExpansion(f.name())),
        }
    }

    /// Factors the series as `c·w^j·(1+u)` with `u` free of a constant term.
    pub fn split_normalize(&self) -> Result<(C64, i32, LaurentSeries)> {
        let v = self.decay_view()?;
        let c = v.d[0];
        if v.d.len() == 1 {
            return Ok((c, v.lead, Self::zero()));
        }
        let mut d: Vec<C64> = v.d.iter().map(|x| x / c).collect();
        d[0] = ZERO;
        let u = DecayView {
            lead: 0,
            dir: v.dir,
            d,
            flavor: v.flavor,
        }
        .into_series();
        let u = match v.dir {
            1 => u.restrict(1, u.hi(), v.flavor),
            _ => u.restrict(u.lo(), -1, v.flavor),
        };
        Ok((c, v.lead, u))
    }

    /// Multiplicative inverse, expanded in the flavor's decay direction.
    pub fn recip(&self) -> Result<Self> {
        let v = self.decay_view()?;
        let d0 = v.d[0];
        if d0.norm() < MIN_INVERTIBLE {
            return Err(TodaError::NonInvertibleLeadingTerm { modulus: d0.norm() });
        }
        let inv0 = d0.inv();
        let n = v.d.len();
        let mut r = vec![ZERO; n];
        r[0] = inv0;
        for k in 1..n {
            let mut s = ZERO;
            for j in 1..=k {
                s += v.d[j] * r[k - j];
            }
            r[k] = -s * inv0;
        }
        Ok(DecayView {
            lead: -v.lead,
            dir: v.dir,
            d: r,
            flavor: v.flavor,
        }
        .into_series())
    }

    pub fn int_pow(&self, k: i32) -> Result<Self> {
        if k == 0 {
            return Ok(Self::one());
        }
        let base = if k < 0 { self.recip()? } else { self.clone() };
        let mut e = k.unsigned_abs();
        let mut result: Option<Self> = None;
        let mut sq = base;
        loop {
            if e & 1 == 1 {
                result = Some(match result {
                    None => sq.clone(),
                    Some(r) => r.mul(&sq)?,
                });
            }
            e >>= 1;
            if e == 0 {
                break;
            }
            sq = sq.mul(&sq)?;
        }
        Ok(result.unwrap())
    }

    /// `log(1+u)` for `u` without constant term, decaying in its flavor direction.
    pub fn log1p(&self) -> Result<Self> {
        if self.coeff(0) != ZERO {
            return Err(TodaError::NonzeroConstantTerm);
        }
        if self.is_zero() {
            return Ok(Self::zero());
        }
        let (dir, depth) = match self.flavor {
            Flavor::AtZero => {
                if self.support().any(|(k, _)| k < 0) {
                    return Err(TodaError::NotDecaying);
                }
                (1, self.hi().max(1))
            }
            Flavor::AtInfinity => {
                if self.support().any(|(k, _)| k > 0) {
                    return Err(TodaError::NotDecaying);
                }
                (-1, (-self.lo).max(1))
            }
            f => return Err(TodaError::AmbiguousExpansion(f.name())),
        };
        let n = depth as usize;
        let u: Vec<C64> = (0..=n).map(|k| self.coeff(dir * k as i32)).collect();
        let mut l = vec![ZERO; n + 1];
        for k in 1..=n {
            let mut s = ZERO;
            for j in 1..k {
                s += l[j] * u[k - j] * j as f64;
            }
            l[k] = u[k] - s / k as f64;
        }
        let series = DecayView {
            lead: 0,
            dir,
            d: l,
            flavor: self.flavor,
        }
        .into_series();
        Ok(if dir == 1 {
            series.restrict(1, depth, self.flavor)
        } else {
            series.restrict(-depth, -1, self.flavor)
        })
    }

    /// `outer(inner(w))`, by Horner's rule in `inner` and `1/inner`.
    pub fn compose(outer: &Self, inner: &Self) -> Result<Self> {
        let mut total: Option<Self> = None;
        if outer.hi() >= 0 {
            let mut acc = Self::constant(outer.coeff(outer.hi()));
            for k in (0..outer.hi()).rev() {
                acc = acc.mul(inner)?.add(&Self::constant(outer.coeff(k)))?;
            }
            total = Some(acc);
        }
        if outer.lo < 0 {
            let y = inner.recip()?;
            let mut acc = Self::constant(outer.coeff(outer.lo)).mul(&y)?;
            for k in outer.lo + 1..0 {
                acc = acc.add(&Self::constant(outer.coeff(k)))?.mul(&y)?;
            }
            total = Some(match total {
                None => acc,
                Some(t) => t.add(&acc)?,
            });
        }
        Ok(total.unwrap())
    }

    /// Functional inverse `G` with `self(G(z)) = z` on the trusted window.
    pub fn invert_function(&self) -> Result<Self> {
        let flavor = self.flavor;
        let lead = match flavor {
            Flavor::AtZero | Flavor::AtInfinity => self.coeff(1),
            _ => return Err(TodaError::AmbiguousExpansion(flavor.name())),
        };
        if lead.norm() < MIN_INVERTIBLE {
            return Err(TodaError::VanishingLeadingCoefficient);
        }
        let ok_shape = match flavor {
            Flavor::AtZero => self.support().all(|(k, _)| k >= 1),
            _ => self.support().all(|(k, _)| k <= 1),
        };
        if !ok_shape {
            return Err(TodaError::NotDecaying);
        }
        let depth = self.depth() as i32;
        let (lo, hi) = match flavor {
            Flavor::AtZero => (1, 1 + depth),
            _ => (1 - depth, 1),
        };
        let z = Self::monomial(ONE, 1).padded(lo, hi, flavor);
        let deriv = self.derivative();
        let mut g = Self::monomial(lead.inv(), 1).padded(lo, hi, flavor);
        let iters = (depth.max(1) as f64).log2().ceil() as usize + 2;
        for _ in 0..iters {
            let r = Self::compose(self, &g)?.sub(&z)?;
            let d = Self::compose(&deriv, &g)?;
            let step = r.mul(&d.recip()?)?;
            g = g.sub(&step)?.restrict(lo, hi, flavor);
        }
        Ok(g)
    }

    /// Values at the `m`-th roots of unity, `s[j] = a(exp(2πij/m))`.
    pub fn sample_on_circle(&self, m: usize) -> Vec<C64> {
        let mut buf = vec![ZERO; m];
        for (i, c) in self.coeffs.iter().enumerate() {
            let k = (self.lo + i as i32).rem_euclid(m as i32) as usize;
            buf[k] += c;
        }
        with_planner(|p| p.plan_fft_inverse(m).process(&mut buf));
        buf
    }

    /// Coefficients in `[lo, hi]` recovered from samples at the roots of unity.
    pub fn from_circle_samples(samples: &[C64], lo: i32, hi: i32, flavor: Flavor) -> Result<Self> {
        let m = samples.len();
        let width = (hi - lo + 1).max(0) as usize;
        if width * 4 > m {
            return Err(TodaError::GridTooSmall { samples: m, width });
        }
        let mut buf = samples.to_vec();
        with_planner(|p| p.plan_fft_forward(m).process(&mut buf));
        let scale = 1.0 / m as f64;
        let coeffs = (lo..=hi)
            .map(|k| buf[k.rem_euclid(m as i32) as usize] * scale)
            .collect();
        Ok(Self::new(lo, coeffs, flavor))
    }

    /// The single nonzero term, if there is exactly one.
    fn as_monomial(&self) -> Option<(C64, i32)> {
        let mut it = self.support();
        let first = it.next()?;
        if it.next().is_some() {
            return None;
        }
        Some((first.1, first.0))
    }
}

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn with_planner<R>(f: impl FnOnce(&mut FftPlanner<f64>) -> R) -> R {
    PLANNER.with(|p| f(&mut p.borrow_mut()))
}

/// `num/den` on the unit circle, coefficients recovered on `[lo, hi]` from `m` samples.
pub fn divide_on_circle(
    num: &LaurentSeries,
    den: &LaurentSeries,
    lo: i32,
    hi: i32,
    m: usize,
) -> Result<LaurentSeries> {
    if let Some((c, k)) = den.as_monomial() {
        if c.norm() <= MIN_CIRCLE_MODULUS {
            return Err(TodaError::DenominatorVanishes {
                min_modulus: c.norm(),
            });
        }
        let q = num.scale(c.inv()).shift(-k);
        return Ok(q.padded(lo, hi, Flavor::TwoSided));
    }
    let ns = num.sample_on_circle(m);
    let ds = den.sample_on_circle(m);
    let min_modulus = ds.iter().map(|d| d.norm()).fold(f64::INFINITY, f64::min);
    if min_modulus <= MIN_CIRCLE_MODULUS {
        return Err(TodaError::DenominatorVanishes { min_modulus });
    }
    let q: Vec<C64> = ns.iter().zip(&ds).map(|(a, b)| a / b).collect();
    LaurentSeries::from_circle_samples(&q, lo, hi, Flavor::TwoSided)
}

/// Product computed by pointwise multiplication of circle samples.
pub fn mul_on_circle(
    a: &LaurentSeries,
    b: &LaurentSeries,
    lo: i32,
    hi: i32,
    m: usize,
) -> Result<LaurentSeries> {
    let sa = a.sample_on_circle(m);
    let sb = b.sample_on_circle(m);
    let p: Vec<C64> = sa.iter().zip(&sb).map(|(x, y)| x * y).collect();
    LaurentSeries::from_circle_samples(&p, lo, hi, Flavor::TwoSided)
}

/// Coefficient of `w^-1` in `a·b` without forming the product.
pub fn residue_of_product(a: &LaurentSeries, b: &LaurentSeries) -> C64 {
    coeff_of_product(a, b, -1)
}

/// Like [`residue_of_product`], but fails when `w^-1` lies outside the trusted
/// window of the product.
pub fn checked_residue(a: &LaurentSeries, b: &LaurentSeries) -> Result<C64> {
    let (lo, hi) = a.product_window(b);
    if lo > -1 || hi < -1 {
        return Err(TodaError::WindowUnderflow { lo, hi });
    }
    Ok(residue_of_product(a, b))
}

/// Coefficient of `w^e` in `a·b` without forming the product.
pub fn coeff_of_product(a: &LaurentSeries, b: &LaurentSeries, e: i32) -> C64 {
    let mut s = ZERO;
    for (i, c) in a.coeffs.iter().enumerate() {
        let k = a.lo + i as i32;
        s += c * b.coeff(e - k);
    }
    s
}

/// Caches successive powers `a^k` for one base series.
#[derive(Clone, Debug)]
pub struct PowerCache {
    pos: Vec<LaurentSeries>,
    neg: Vec<LaurentSeries>,
}

impl PowerCache {
    pub fn new(base: &LaurentSeries) -> Result<Self> {
        let inv = base.recip()?;
        Ok(PowerCache {
            pos: vec![LaurentSeries::one(), base.clone()],
            neg: vec![LaurentSeries::one(), inv],
        })
    }

    pub fn pow(&mut self, k: i32) -> Result<&LaurentSeries> {
        let list = if k >= 0 { &mut self.pos } else { &mut self.neg };
        let n = k.unsigned_abs() as usize;
        while list.len() <= n {
            let next = list.last().unwrap().mul(&list[1])?;
            list.push(next);
        }
        Ok(&list[n])
    }
}

impl fmt::Display for LaurentSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.support() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({:.6e}{:+.6e}i)w^{}", c.re, c.im, k)?;
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " [{}; {}..={}]", self.flavor.name(), self.lo, self.hi())
    }
}

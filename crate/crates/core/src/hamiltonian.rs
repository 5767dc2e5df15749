//! Monomial Hamiltonians `H(z1, z2) = Σ c·z1^μ·z2^(−ν)` and their calculus.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::conformal_pair::ConformalPair;
use crate::error::{Result, TodaError};
use crate::series::{LaurentSeries, PowerCache, C64};

/// `c·z1^mu·z2^(−nu)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Monomial {
    pub mu: i32,
    pub nu: i32,
    pub c: C64,
}

impl Monomial {
    pub fn new(mu: i32, nu: i32, c: C64) -> Self {
        Monomial { mu, nu, c }
    }
}

/// A finite sum of monomials with like terms merged and zero terms dropped,
/// kept sorted by `(mu, nu)`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct MonomialSum {
    terms: Vec<Monomial>,
}

impl MonomialSum {
    pub fn new(terms: impl IntoIterator<Item = Monomial>) -> Self {
        let mut map: BTreeMap<(i32, i32), C64> = BTreeMap::new();
        for t in terms {
            *map.entry((t.mu, t.nu)).or_insert(C64::new(0.0, 0.0)) += t.c;
        }
        let terms = map
            .into_iter()
            .filter(|(_, c)| *c != C64::new(0.0, 0.0))
            .map(|((mu, nu), c)| Monomial { mu, nu, c })
            .collect();
        MonomialSum { terms }
    }

    pub fn terms(&self) -> &[Monomial] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, mu: i32, nu: i32) -> C64 {
        self.terms
            .iter()
            .find(|t| t.mu == mu && t.nu == nu)
            .map(|t| t.c)
            .unwrap_or(C64::new(0.0, 0.0))
    }

    pub fn d1(&self) -> Self {
        Self::new(
            self.terms
                .iter()
                .map(|t| Monomial::new(t.mu - 1, t.nu, t.c * t.mu as f64)),
        )
    }

    pub fn d2(&self) -> Self {
        Self::new(
            self.terms
                .iter()
                .map(|t| Monomial::new(t.mu, t.nu + 1, -t.c * t.nu as f64)),
        )
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::new(
            self.terms
                .iter()
                .map(|t| Monomial::new(t.mu, t.nu, t.c * s)),
        )
    }

    pub fn plus(&self, other: &Self) -> Self {
        Self::new(self.terms.iter().chain(&other.terms).copied())
    }

    /// Value at a point.
    pub fn eval(&self, z1: C64, z2: C64) -> C64 {
        self.terms
            .iter()
            .map(|t| t.c * z1.powi(t.mu) * z2.powi(-t.nu))
            .sum()
    }

    /// `Σ c·g^mu·f^(−nu)` as a series in `w`.
    pub fn eval_along(&self, powers: &mut PairPowers) -> Result<LaurentSeries> {
        let mut acc: Option<LaurentSeries> = None;
        for t in &self.terms {
            let term = match (t.mu, t.nu) {
                (0, 0) => LaurentSeries::constant(C64::new(1.0, 0.0)),
                (mu, 0) => powers.g(mu)?.clone(),
                (0, nu) => powers.f(-nu)?.clone(),
                (mu, nu) => {
                    let gm = powers.g(mu)?.clone();
                    gm.mul(powers.f(-nu)?)?
                }
            }
            .scale(t.c);
            acc = Some(match acc {
                None => term,
                Some(a) => a.add(&term)?,
            });
        }
        Ok(acc.unwrap_or_else(LaurentSeries::zero))
    }
}

/// Cached integer powers of `g` and `f`.
#[derive(Clone, Debug)]
pub struct PairPowers {
    g: PowerCache,
    f: PowerCache,
}

impl PairPowers {
    pub fn new(pair: &ConformalPair) -> Result<Self> {
        Ok(PairPowers {
            g: PowerCache::new(pair.g())?,
            f: PowerCache::new(pair.f())?,
        })
    }

    pub fn g(&mut self, k: i32) -> Result<&LaurentSeries> {
        self.g.pow(k)
    }

    pub fn f(&mut self, k: i32) -> Result<&LaurentSeries> {
        self.f.pow(k)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Variable {
    Z1,
    Z2,
}

/// A monomial `c·z^exponent` of a one-variable gauge function.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaugeTerm {
    pub variable: Variable,
    pub exponent: i32,
    pub c: C64,
}

impl GaugeTerm {
    fn as_monomial(&self) -> Monomial {
        match self.variable {
            Variable::Z1 => Monomial::new(self.exponent, 0, self.c),
            Variable::Z2 => Monomial::new(0, -self.exponent, self.c),
        }
    }
}

/// A Hamiltonian: mixed terms (both exponents nonzero) plus optional gauge terms.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Hamiltonian {
    core: MonomialSum,
    gauge: Vec<GaugeTerm>,
}

impl Hamiltonian {
    pub fn new(terms: impl IntoIterator<Item = Monomial>) -> Result<Self> {
        Self::with_gauge(terms, Vec::new())
    }

    pub fn monomial(mu: i32, nu: i32) -> Result<Self> {
        Self::new([Monomial::new(mu, nu, C64::new(1.0, 0.0))])
    }

    pub fn with_gauge(
        terms: impl IntoIterator<Item = Monomial>,
        gauge: Vec<GaugeTerm>,
    ) -> Result<Self> {
        let terms: Vec<Monomial> = terms.into_iter().collect();
        if let Some(t) = terms.iter().find(|t| t.mu == 0 || t.nu == 0) {
            return Err(TodaError::InvalidHamiltonian(format!(
                "term ({}, {}) has a zero exponent; use a gauge term",
                t.mu, t.nu
            )));
        }
        if gauge.iter().any(|g| g.exponent == 0) {
            return Err(TodaError::InvalidHamiltonian(
                "gauge exponent must be nonzero".into(),
            ));
        }
        let core = MonomialSum::new(terms);
        if core.is_zero() {
            return Err(TodaError::InvalidHamiltonian(
                "∂1∂2H vanishes identically".into(),
            ));
        }
        let h = Hamiltonian { core, gauge };
        h.check_admissible()?;
        Ok(h)
    }

    /// Parses mixed and gauge terms from `(mu, nu, c)` triples; a zero exponent marks a gauge term.
    pub fn from_triples(triples: &[(i32, i32, C64)]) -> Result<Self> {
        let mut core = Vec::new();
        let mut gauge = Vec::new();
        for &(mu, nu, c) in triples {
            match (mu, nu) {
                (0, 0) => {
                    return Err(TodaError::InvalidHamiltonian(
                        "constant term has no effect".into(),
                    ))
                }
                (mu, 0) => gauge.push(GaugeTerm {
                    variable: Variable::Z1,
                    exponent: mu,
                    c,
                }),
                (0, nu) => gauge.push(GaugeTerm {
                    variable: Variable::Z2,
                    exponent: -nu,
                    c,
                }),
                _ => core.push(Monomial::new(mu, nu, c)),
            }
        }
        Self::with_gauge(core, gauge)
    }

    fn check_admissible(&self) -> Result<()> {
        let all = self.all_terms();
        for a in all.terms() {
            for b in self.core.terms() {
                if a.mu + b.mu == 0 || a.nu + b.nu == 0 {
                    return Err(TodaError::LogObstruction((a.mu, a.nu), (b.mu, b.nu)));
                }
            }
        }
        Ok(())
    }

    pub fn core(&self) -> &MonomialSum {
        &self.core
    }

    pub fn gauge(&self) -> &[GaugeTerm] {
        &self.gauge
    }

    pub fn without_gauge(&self) -> Self {
        Hamiltonian {
            core: self.core.clone(),
            gauge: Vec::new(),
        }
    }

    pub fn all_terms(&self) -> MonomialSum {
        MonomialSum::new(
            self.core
                .terms()
                .iter()
                .copied()
                .chain(self.gauge.iter().map(GaugeTerm::as_monomial)),
        )
    }

    pub fn d1(&self) -> MonomialSum {
        self.all_terms().d1()
    }

    pub fn d2(&self) -> MonomialSum {
        self.all_terms().d2()
    }

    pub fn d11(&self) -> MonomialSum {
        self.d1().d1()
    }

    pub fn d22(&self) -> MonomialSum {
        self.d2().d2()
    }

    pub fn d12(&self) -> MonomialSum {
        self.core.d1().d2()
    }

    /// `(J1, J2)` with `−∂J1/∂z2 = ∂J2/∂z1 = H·∂1∂2H`.
    pub fn j_pair(&self) -> (MonomialSum, MonomialSum) {
        let all = self.all_terms();
        let mut j1 = Vec::new();
        let mut j2 = Vec::new();
        for a in all.terms() {
            for b in self.core.terms() {
                let w = a.c * b.c * (b.mu * b.nu) as f64;
                j2.push(Monomial::new(
                    a.mu + b.mu,
                    a.nu + b.nu + 1,
                    -w / (a.mu + b.mu) as f64,
                ));
                j1.push(Monomial::new(
                    a.mu + b.mu - 1,
                    a.nu + b.nu,
                    -w / (a.nu + b.nu) as f64,
                ));
            }
        }
        (MonomialSum::new(j1), MonomialSum::new(j2))
    }

    /// Σ-admissibility: every `(μ, ν, c)` has the partner `(ν, μ, conj c)`.
    pub fn is_sigma_admissible(&self) -> bool {
        self.gauge.is_empty()
            && self.core.terms().iter().all(|t| {
                (self.core.coeff(t.nu, t.mu) - t.c.conj()).norm() <= 1e-14 * t.c.norm().max(1.0)
            })
    }

    pub fn has_real_coefficients(&self) -> bool {
        self.all_terms().terms().iter().all(|t| t.c.im == 0.0)
    }
}

/// Predicted shifts of `t_n`, `v_n` and `v0` caused by gauge terms.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct GaugeShift {
    pub t: BTreeMap<i32, C64>,
    pub v: BTreeMap<i32, C64>,
    pub v0: C64,
}

impl GaugeShift {
    pub fn t(&self, n: i32) -> C64 {
        self.t.get(&n).copied().unwrap_or_default()
    }

    pub fn v(&self, n: i32) -> C64 {
        self.v.get(&n).copied().unwrap_or_default()
    }
}

/// Shifts for `|n| ≤ order` from residues of `z^k` monomials at 0 and ∞.
pub fn gauge_shift_constants(terms: &[GaugeTerm], order: usize) -> GaugeShift {
    let n_max = order as i32;
    let mut out = GaugeShift::default();
    let bump = |map: &mut BTreeMap<i32, C64>, n: i32, c: C64| {
        if n != 0 && n.abs() <= n_max {
            *map.entry(n).or_default() += c;
        }
    };
    for term in terms {
        let k = term.exponent;
        let c = term.c;
        match term.variable {
            Variable::Z1 if k > 0 => bump(&mut out.t, k, c),
            Variable::Z1 => bump(&mut out.v, -k, c * k as f64),
            Variable::Z2 if k < 0 => bump(&mut out.t, k, -c),
            Variable::Z2 => bump(&mut out.v, -k, c * k as f64),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn sum(t: &[(i32, i32, f64)]) -> MonomialSum {
        MonomialSum::new(t.iter().map(|&(m, n, x)| Monomial::new(m, n, c(x))))
    }

    #[test]
    fn partial_examples() {
        let h = Hamiltonian::monomial(1, 1).unwrap();
        assert_eq!(h.d1(), sum(&[(0, 1, 1.0)]));
        assert_eq!(h.d2(), sum(&[(1, 2, -1.0)]));
        assert_eq!(h.d12(), sum(&[(0, 2, -1.0)]));
        assert_eq!(
            Hamiltonian::monomial(2, 1).unwrap().d12(),
            sum(&[(1, 2, -2.0)])
        );
        let h =
            Hamiltonian::new([Monomial::new(1, 1, c(1.0)), Monomial::new(2, 2, c(0.5))]).unwrap();
        assert_eq!(h.d12(), sum(&[(0, 2, -1.0), (1, 3, -2.0)]));
    }

    #[test]
    fn j_pair_of_monomial() {
        for (mu, nu) in [(1, 1), (2, 3), (-1, 2), (3, -2)] {
            let (j1, j2) = Hamiltonian::monomial(mu, nu).unwrap().j_pair();
            assert_eq!(j1, sum(&[(2 * mu - 1, 2 * nu, -(mu as f64) / 2.0)]));
            assert_eq!(j2, sum(&[(2 * mu, 2 * nu + 1, -(nu as f64) / 2.0)]));
        }
    }

    #[test]
    fn log_obstruction() {
        let r = Hamiltonian::new([Monomial::new(1, 1, c(1.0)), Monomial::new(-1, 1, c(1.0))]);
        assert!(matches!(r, Err(TodaError::LogObstruction(..))));
    }

    #[test]
    fn j_pair_solves_defining_equation() {
        let h = Hamiltonian::with_gauge(
            [
                Monomial::new(2, 1, c(1.0)),
                Monomial::new(1, 2, C64::new(0.3, -0.2)),
            ],
            vec![GaugeTerm {
                variable: Variable::Z1,
                exponent: 1,
                c: c(0.7),
            }],
        )
        .unwrap();
        let (j1, j2) = h.j_pair();
        let rhs: Vec<Monomial> = h
            .all_terms()
            .terms()
            .iter()
            .flat_map(|a| {
                h.d12()
                    .terms()
                    .iter()
                    .map(|b| Monomial::new(a.mu + b.mu, a.nu + b.nu, a.c * b.c))
                    .collect::<Vec<_>>()
            })
            .collect();
        let rhs = MonomialSum::new(rhs);
        let lhs1 = j1.d2().scale(c(-1.0));
        let lhs2 = j2.d1();
        for s in [lhs1, lhs2] {
            assert_eq!(s.terms().len(), rhs.terms().len());
            for t in rhs.terms() {
                assert!((s.coeff(t.mu, t.nu) - t.c).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn gauge_constants() {
        let z1 = GaugeTerm {
            variable: Variable::Z1,
            exponent: 1,
            c: c(1.0),
        };
        let s = gauge_shift_constants(&[z1], 8);
        assert_eq!(s.t(1), c(1.0));
        assert_eq!(s.t.len(), 1);
        assert!(s.v.is_empty());

        let z1sq = GaugeTerm {
            variable: Variable::Z1,
            exponent: 2,
            c: c(1.0),
        };
        let s = gauge_shift_constants(&[z1sq], 8);
        assert_eq!(s.t(2), c(1.0));
        assert_eq!(s.t.len(), 1);

        let z2 = GaugeTerm {
            variable: Variable::Z2,
            exponent: 1,
            c: c(1.0),
        };
        let s = gauge_shift_constants(&[z2], 8);
        assert!(s.t.is_empty());
        assert_eq!(s.v(-1), c(1.0));
    }
}

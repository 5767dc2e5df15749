//! The pair `(g, f)` of conformal-map series with `a1·b = 1`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Result, TodaError};
use crate::series::{Flavor, LaurentSeries, C64};

/// Allowed normalization defect `|a1·b − 1|`.
pub const NORMALIZATION_TOL: f64 = 1e-12;

/// Working depth of the stored series and size of the circle grid.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Resolution {
    pub depth: usize,
    pub samples: usize,
}

impl Resolution {
    pub fn for_order(order: usize) -> Self {
        let depth = (4 * order + 16).max(64);
        Resolution {
            depth,
            samples: Self::samples_for(order, depth),
        }
    }

    /// Smallest power-of-two grid (at least 1024) resolving the flow windows.
    pub fn samples_for(order: usize, depth: usize) -> usize {
        let width = 2 * (depth + order) + 3;
        (4 * width).next_power_of_two().max(1024)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConformalPair {
    g: LaurentSeries,
    f: LaurentSeries,
    order: usize,
    resolution: Resolution,
}

impl ConformalPair {
    /// `g_coeffs[k]` is the coefficient of `w^(1-k)`, `f_coeffs[k]` that of `w^k`.
    pub fn from_coefficients(g_coeffs: &[C64], f_coeffs: &[C64], order: usize) -> Result<Self> {
        if g_coeffs.is_empty() || f_coeffs.len() < 2 {
            return Err(TodaError::InvalidPair("g needs b and f needs a1".into()));
        }
        if f_coeffs[0] != C64::new(0.0, 0.0) {
            return Err(TodaError::NonzeroConstantInF);
        }
        let mut res = Resolution::for_order(order);
        res.depth = res.depth.max(g_coeffs.len() - 1).max(f_coeffs.len() - 2);
        let d = res.depth as i32;
        let g_terms: Vec<(i32, C64)> = g_coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| (1 - k as i32, *c))
            .collect();
        let f_terms: Vec<(i32, C64)> = f_coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| (k as i32, *c))
            .collect();
        let g = LaurentSeries::from_terms(&g_terms).padded(1 - d, 1, Flavor::AtInfinity);
        let f = LaurentSeries::from_terms(&f_terms).padded(1, 1 + d, Flavor::AtZero);
        Self::from_series(g, f, order, res)
    }

    /// Validates a pair given as series; both are re-windowed to the resolution depth.
    pub fn from_series(
        g: LaurentSeries,
        f: LaurentSeries,
        order: usize,
        res: Resolution,
    ) -> Result<Self> {
        if g.support().any(|(k, _)| k > 1) {
            return Err(TodaError::InvalidPair("g has powers above w".into()));
        }
        if f.coeff(0) != C64::new(0.0, 0.0) {
            return Err(TodaError::NonzeroConstantInF);
        }
        if f.support().any(|(k, _)| k < 1) {
            return Err(TodaError::InvalidPair("f has negative powers".into()));
        }
        let b = g.coeff(1);
        let a1 = f.coeff(1);
        if b.norm() == 0.0 || a1.norm() == 0.0 {
            return Err(TodaError::InvalidPair("b and a1 must be nonzero".into()));
        }
        let defect = (a1 * b - 1.0).norm();
        if defect > NORMALIZATION_TOL {
            return Err(TodaError::Normalization { defect });
        }
        let d = res.depth as i32;
        Ok(ConformalPair {
            g: g.padded(1 - d, 1, Flavor::AtInfinity),
            f: f.padded(1, 1 + d, Flavor::AtZero),
            order,
            resolution: res,
        })
    }

    /// Σ-pair `f(w) = 1/conj(g(1/conj w))`; needs real `b`.
    pub fn sigma_conjugate(g_coeffs: &[C64], order: usize) -> Result<Self> {
        let b = *g_coeffs
            .first()
            .ok_or_else(|| TodaError::InvalidPair("empty g".into()))?;
        if b.im.abs() > NORMALIZATION_TOL * b.norm() {
            return Err(TodaError::InvalidPair("Σ pair needs real b".into()));
        }
        let mut res = Resolution::for_order(order);
        res.depth = res.depth.max(g_coeffs.len() - 1);
        let d = res.depth as i32;
        let terms: Vec<(i32, C64)> = g_coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| (1 - k as i32, *c))
            .collect();
        let g = LaurentSeries::from_terms(&terms).padded(1 - d, 1, Flavor::AtInfinity);
        let f = g.conj_reflect().recip()?;
        Self::from_series(g, f, order, res)
    }

    /// Seeded pair with tails bounded by `decay^k`; `real` keeps every coefficient real.
    pub fn random_pair(seed: u64, decay: f64, order: usize, real: bool) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let draw = |scale: f64, rng: &mut ChaCha8Rng| -> C64 {
            let r = scale * rng.gen_range(0.0..1.0);
            if real {
                if rng.gen_bool(0.5) {
                    C64::new(r, 0.0)
                } else {
                    C64::new(-r, 0.0)
                }
            } else {
                C64::from_polar(r, rng.gen_range(0.0..std::f64::consts::TAU))
            }
        };
        let b = C64::new(1.0, 0.0) + draw(0.05, &mut rng);
        let mut g = vec![b];
        let mut f = vec![C64::new(0.0, 0.0), b.inv()];
        for k in 1..=order {
            g.push(draw(0.5 * decay.powi(k as i32), &mut rng));
            f.push(draw(0.5 * decay.powi(k as i32), &mut rng));
        }
        Self::from_coefficients(&g, &f, order).expect("random pair is normalized by construction")
    }

    /// Skips validation; used for intermediate Runge–Kutta stages.
    pub(crate) fn raw(
        g: LaurentSeries,
        f: LaurentSeries,
        order: usize,
        resolution: Resolution,
    ) -> Self {
        ConformalPair {
            g,
            f,
            order,
            resolution,
        }
    }

    pub fn g(&self) -> &LaurentSeries {
        &self.g
    }

    pub fn f(&self) -> &LaurentSeries {
        &self.f
    }

    pub fn b(&self) -> C64 {
        self.g.coeff(1)
    }

    pub fn a1(&self) -> C64 {
        self.f.coeff(1)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn depth(&self) -> usize {
        self.resolution.depth
    }

    pub fn samples(&self) -> usize {
        self.resolution.samples
    }

    pub fn resolution(&self) -> Resolution {
        self.resolution
    }

    pub fn with_samples(mut self, samples: usize) -> Self {
        self.resolution.samples = samples;
        self
    }

    /// Coefficients in the `from_coefficients` layout, up to the pair's depth.
    pub fn g_coeffs(&self) -> Vec<C64> {
        (0..=self.depth() as i32)
            .map(|k| self.g.coeff(1 - k))
            .collect()
    }

    pub fn f_coeffs(&self) -> Vec<C64> {
        (0..=self.depth() as i32 + 1)
            .map(|k| self.f.coeff(k))
            .collect()
    }

    /// Largest coefficient of `f(w) − 1/conj(g(1/conj w))`.
    pub fn sigma_defect(&self) -> Result<f64> {
        let other = self.g.conj_reflect().recip()?;
        let diff = self.f.sub(&other)?;
        Ok(diff.max_abs())
    }

    /// Largest imaginary part among the stored coefficients of g and f.
    pub fn max_imag(&self) -> f64 {
        self.g
            .coeffs()
            .iter()
            .chain(self.f.coeffs())
            .map(|c| c.im.abs())
            .fold(0.0, f64::max)
    }
}

/// Named pairs used throughout the test suites and the command line.
pub mod fixtures {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    /// `g = f = w`.
    pub fn identity(order: usize) -> ConformalPair {
        ConformalPair::from_coefficients(&[c(1.0)], &[c(0.0), c(1.0)], order).unwrap()
    }

    /// `g = w + 0.1/w` with its Σ partner `f = w/(1 + 0.1 w²)`.
    pub fn sigma_ellipse(order: usize) -> ConformalPair {
        ConformalPair::sigma_conjugate(&[c(1.0), c(0.0), c(0.1)], order).unwrap()
    }

    /// Seed 7, decay 0.3, complex coefficients.
    pub fn random(order: usize) -> ConformalPair {
        ConformalPair::random_pair(7, 0.3, order, false)
    }

    /// `g` the inverse of `z ↦ z + 0.1/z`, `f = w`.
    pub fn joukowski_inverse(order: usize) -> ConformalPair {
        let res = Resolution::for_order(order);
        let d = res.depth as i32;
        let j = LaurentSeries::from_terms(&[(1, c(1.0)), (-1, c(0.1))]).padded(
            1 - d,
            1,
            Flavor::AtInfinity,
        );
        let g = j.invert_function().unwrap();
        let f = LaurentSeries::monomial(c(1.0), 1);
        ConformalPair::from_series(g, f, order, res).unwrap()
    }
}

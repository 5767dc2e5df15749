//! The Σ and real subspaces, and the Dirichlet Green's function kernel on Σ.

use std::f64::consts::TAU;

use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::conformal_pair::ConformalPair;
use crate::coords::{coordinates, TodaCoordinates};
use crate::error::{Result, TodaError};
use crate::grunsky::{grunsky_table, GrunskyTable};
use crate::hamiltonian::Hamiltonian;
use crate::series::{LaurentSeries, C64};

const ZERO: C64 = C64::new(0.0, 0.0);

/// Radius of the sampling circles relative to `|b|`.
const GREEN_RADIUS: f64 = 1.5;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SigmaReport {
    /// `max |t_(−n) + conj t_n|`.
    pub t_defect: f64,
    /// `max |v_(−n) + conj v_n|`.
    pub v_defect: f64,
    pub t0_imag: f64,
    pub v0_imag: f64,
    pub log_t_imag: f64,
}

impl SigmaReport {
    pub fn defect(&self) -> f64 {
        self.t_defect
            .max(self.v_defect)
            .max(self.t0_imag)
            .max(self.v0_imag)
    }
}

fn require_sigma(h: &Hamiltonian) -> Result<()> {
    if !h.is_sigma_admissible() {
        return Err(TodaError::NotSigmaAdmissible(
            "every (μ, ν, c) needs the partner (ν, μ, conj c) and no gauge terms".into(),
        ));
    }
    Ok(())
}

pub fn sigma_report(coords: &TodaCoordinates) -> SigmaReport {
    let o = coords.order as i32;
    let mut r = SigmaReport {
        t_defect: 0.0,
        v_defect: 0.0,
        t0_imag: coords.t(0).im.abs(),
        v0_imag: coords.v0().im.abs(),
        log_t_imag: coords.log_t.im.abs(),
    };
    for n in 1..=o {
        r.t_defect = r.t_defect.max((coords.t(-n) + coords.t(n).conj()).norm());
        r.v_defect = r.v_defect.max((coords.v(-n) + coords.v(n).conj()).norm());
    }
    r
}

/// Builds the Σ pair of `g` and checks the reality relations of its coordinates.
pub fn sigma_coordinate_check(
    g_coeffs: &[C64],
    h: &Hamiltonian,
    order: usize,
) -> Result<(TodaCoordinates, SigmaReport)> {
    require_sigma(h)?;
    let pair = ConformalPair::sigma_conjugate(g_coeffs, order)?;
    let coords = coordinates(&pair, h, order)?;
    let report = sigma_report(&coords);
    Ok((coords, report))
}

/// Largest imaginary part among `t`, `v`, `v0` and `log𝔗`.
pub fn real_subspace_check(pair: &ConformalPair, h: &Hamiltonian, order: usize) -> Result<f64> {
    Ok(coordinates(pair, h, order)?.max_imag())
}

/// Fourier coefficients of `K = G_Ω(z1, z2) − log|1/z1 − 1/z2|` in the variables
/// `z^(−m)` (negative index) and `conj(z)^(−m)` (positive index), `|p|, |q| ≤ order`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GreenCoefficients {
    pub order: usize,
    /// `kernel[(p + N)(2N + 1) + q + N]`.
    pub kernel: Vec<C64>,
}

impl GreenCoefficients {
    fn zero(order: usize) -> Self {
        let w = 2 * order + 1;
        GreenCoefficients {
            order,
            kernel: vec![ZERO; w * w],
        }
    }

    fn idx(&self, p: i32, q: i32) -> usize {
        let o = self.order as i32;
        ((p + o) * (2 * o + 1) + q + o) as usize
    }

    pub fn get(&self, p: i32, q: i32) -> C64 {
        self.kernel[self.idx(p, q)]
    }

    fn set(&mut self, p: i32, q: i32, c: C64) {
        let i = self.idx(p, q);
        self.kernel[i] = c;
    }

    pub fn constant(&self) -> f64 {
        self.get(0, 0).re
    }

    /// Coefficient `M_mn` of `Re(M_mn z1^(−m) conj(z2)^(−n))`, `m, n ≥ 1`.
    pub fn mixed(&self, m: i32, n: i32) -> C64 {
        self.get(-m, n) * 2.0
    }

    /// Coefficient `A_mn` of `Re(A_mn z1^(−m) z2^(−n))`, `m, n ≥ 1`.
    pub fn holo(&self, m: i32, n: i32) -> C64 {
        self.get(-m, -n) * 2.0
    }

    /// Coefficient `s_m` of `Re(s_m z1^(−m))`.
    pub fn single(&self, m: i32) -> C64 {
        self.get(-m, 0) * 2.0
    }

    /// Reality `k(−p,−q) = conj k(p,q)` and Hermitian mixed block `M_mn = conj M_nm`.
    pub fn hermitian_defect(&self) -> f64 {
        let o = self.order as i32;
        let mut worst: f64 = 0.0;
        for p in -o..=o {
            for q in -o..=o {
                worst = worst.max((self.get(-p, -q) - self.get(p, q).conj()).norm());
            }
        }
        for m in 1..=o {
            for n in 1..=o {
                worst = worst.max((self.mixed(m, n) - self.mixed(n, m).conj()).norm());
            }
        }
        worst
    }

    pub fn max_difference(&self, other: &Self) -> f64 {
        self.kernel
            .iter()
            .zip(&other.kernel)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Rows `p, q, re, im` for CSV export.
    pub fn rows(&self) -> Vec<(i32, i32, f64, f64)> {
        let o = self.order as i32;
        let mut out = Vec::new();
        for p in -o..=o {
            for q in -o..=o {
                let c = self.get(p, q);
                out.push((p, q, c.re, c.im));
            }
        }
        out
    }
}

/// `a(R·e^(iθ_j))` for the `m` equally spaced angles.
fn sample_at_radius(a: &LaurentSeries, radius: f64, m: usize) -> Vec<C64> {
    let scaled: Vec<(i32, C64)> = a.support().map(|(k, c)| (k, c * radius.powi(k))).collect();
    LaurentSeries::from_terms(&scaled).sample_on_circle(m)
}

/// Kernel coefficients from samples of `G = g⁻¹` on the torus `|z1| = |z2| = R`.
pub fn green_coefficients(g_coeffs: &[C64], order: usize) -> Result<GreenCoefficients> {
    let pair = ConformalPair::sigma_conjugate(g_coeffs, order)?;
    let big_g = pair.g().invert_function()?;
    let m = (16 * order).next_power_of_two().max(256);
    let r = GREEN_RADIUS * pair.b().norm().max(1.0);
    let gs = sample_at_radius(&big_g, r, m);
    let dgs = sample_at_radius(&big_g.derivative(), r, m);
    let zs: Vec<C64> = (0..m)
        .map(|j| C64::from_polar(r, TAU * j as f64 / m as f64))
        .collect();

    let mut grid = vec![ZERO; m * m];
    for i in 0..m {
        for j in 0..m {
            let (z1, z2, g1, g2) = (zs[i], zs[j], gs[i], gs[j]);
            let quotient = if i == j {
                dgs[i]
            } else {
                (g1 - g2) / (z1 - z2)
            };
            let cross = (g1 * g2.conj() - 1.0) / (z1 * z2.conj());
            grid[i * m + j] = C64::new(quotient.ln().re - cross.ln().re, 0.0);
        }
    }
    let mut planner = FftPlanner::<f64>::new();
    let fft = planner.plan_fft_forward(m);
    for row in grid.chunks_mut(m) {
        fft.process(row);
    }
    let mut col = vec![ZERO; m];
    for j in 0..m {
        for i in 0..m {
            col[i] = grid[i * m + j];
        }
        fft.process(&mut col);
        for i in 0..m {
            grid[i * m + j] = col[i];
        }
    }
    // grid now holds Σ K e^(−ipθ) e^(−iqφ); the coefficient of e^(ipθ) e^(iqφ) sits at (p, q) mod m.
    let scale = 1.0 / (m * m) as f64;
    let o = order as i32;
    let mut out = GreenCoefficients::zero(order);
    let wrap = |k: i32| k.rem_euclid(m as i32) as usize;
    for p in -o..=o {
        for q in -o..=o {
            let c = grid[wrap(p) * m + wrap(q)] * scale * r.powi(p.abs() + q.abs());
            out.set(p, q, c);
        }
    }
    Ok(out)
}

/// `½D(z1)D(z2)log𝔗` assembled from the second derivatives of `log𝔗` expressed by Grunsky entries.
pub fn hessian_kernel(table: &GrunskyTable, order: usize) -> GreenCoefficients {
    let o = order as i32;
    let b = |m: i32, n: i32| table.get(m, n);
    let mut out = GreenCoefficients::zero(order);
    out.set(0, 0, -b(0, 0));
    for m in 1..=o {
        out.set(-m, 0, b(m, 0) * 0.5);
        out.set(0, -m, b(m, 0) * 0.5);
        out.set(m, 0, b(-m, 0) * -0.5);
        out.set(0, m, b(-m, 0) * -0.5);
        for n in 1..=o {
            out.set(-m, -n, b(m, n) * -0.5);
            out.set(m, n, b(-m, -n) * -0.5);
            out.set(-m, n, b(m, -n) * 0.5);
            out.set(m, -n, b(n, -m) * 0.5);
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GreenReport {
    pub defect: f64,
    pub hermitian_defect: f64,
    pub kernel: GreenCoefficients,
}

/// Compares the sampled Green kernel with the tau Hessian; `H` only has to be Σ-admissible.
pub fn green_identity_check(
    g_coeffs: &[C64],
    h: &Hamiltonian,
    order: usize,
) -> Result<GreenReport> {
    require_sigma(h)?;
    let pair = ConformalPair::sigma_conjugate(g_coeffs, order)?;
    let table = grunsky_table(&pair, order)?;
    let predicted = hessian_kernel(&table, order);
    let kernel = green_coefficients(g_coeffs, order)?;
    Ok(GreenReport {
        defect: kernel.max_difference(&predicted),
        hermitian_defect: kernel.hermitian_defect(),
        kernel,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn disc_kernel() {
        let k = green_coefficients(&[c(1.0)], 6).unwrap();
        for m in 1..=6 {
            assert!((k.mixed(m, m) - c(1.0 / m as f64)).norm() < 1e-12);
            for n in 1..=6 {
                assert!(k.holo(m, n).norm() < 1e-12);
                if n != m {
                    assert!(k.mixed(m, n).norm() < 1e-12);
                }
            }
        }
        assert!(k.constant().abs() < 1e-14);
    }

    #[test]
    fn rejects_non_sigma_hamiltonian() {
        let h = Hamiltonian::monomial(2, 1).unwrap();
        assert!(matches!(
            sigma_coordinate_check(&[c(1.0)], &h, 4),
            Err(TodaError::NotSigmaAdmissible(_))
        ));
    }
}

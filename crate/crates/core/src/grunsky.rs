//! Faber polynomials and the four-quadrant Grunsky table of a pair.

use serde::{Deserialize, Serialize};

use crate::conformal_pair::ConformalPair;
use crate::error::{Result, TodaError};
use crate::series::{residue_of_product, Flavor, LaurentSeries, C64};
use crate::util::par_map;

const ZERO: C64 = C64::new(0.0, 0.0);

/// `P_n` for `n ≠ 0`; `P_0 = log w` is only a marker.
#[derive(Clone, Debug, PartialEq)]
pub enum FaberPolynomial {
    Log,
    Poly { index: i32, poly: LaurentSeries },
}

impl FaberPolynomial {
    pub fn poly(&self) -> Result<&LaurentSeries> {
        match self {
            FaberPolynomial::Log => Err(TodaError::LogFaberPolynomial),
            FaberPolynomial::Poly { poly, .. } => Ok(poly),
        }
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

/// `(g^n)_{≥0}` for `n ≥ 1`, `(f^n)_{≤0}` for `n ≤ −1`.
pub fn faber(pair: &ConformalPair, n: i32) -> Result<FaberPolynomial> {
    check_index(pair, n)?;
    faber_unchecked(pair, n)
}

fn faber_unchecked(pair: &ConformalPair, n: i32) -> Result<FaberPolynomial> {
    Ok(match n {
        0 => FaberPolynomial::Log,
        n if n > 0 => FaberPolynomial::Poly {
            index: n,
            poly: pair.g().int_pow(n)?.restrict(0, n, Flavor::Exact),
        },
        n => FaberPolynomial::Poly {
            index: n,
            poly: pair.f().int_pow(n)?.restrict(n, 0, Flavor::Exact),
        },
    })
}

/// Dense table of `b(m, n)` for `|m|, |n| ≤ order`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrunskyTable {
    order: usize,
    data: Vec<C64>,
}

impl GrunskyTable {
    fn zeros(order: usize) -> Self {
        let w = 2 * order + 1;
        GrunskyTable {
            order,
            data: vec![ZERO; w * w],
        }
    }

    fn idx(&self, m: i32, n: i32) -> usize {
        let o = self.order as i32;
        assert!(
            m.abs() <= o && n.abs() <= o,
            "Grunsky index ({m}, {n}) outside order {o}"
        );
        ((m + o) * (2 * o + 1) + (n + o)) as usize
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn get(&self, m: i32, n: i32) -> C64 {
        self.data[self.idx(m, n)]
    }

    fn set(&mut self, m: i32, n: i32, v: C64) {
        let i = self.idx(m, n);
        self.data[i] = v;
    }

    pub fn b00(&self) -> C64 {
        self.get(0, 0)
    }

    pub fn symmetry_defect(&self) -> f64 {
        let o = self.order as i32;
        let mut worst: f64 = 0.0;
        for m in -o..=o {
            for n in -o..=o {
                worst = worst.max((self.get(m, n) - self.get(n, m)).norm());
            }
        }
        worst
    }

    pub fn max_difference(&self, other: &GrunskyTable) -> f64 {
        let o = self.order.min(other.order) as i32;
        let mut worst: f64 = 0.0;
        for m in -o..=o {
            for n in -o..=o {
                worst = worst.max((self.get(m, n) - other.get(m, n)).norm());
            }
        }
        worst
    }

    /// Rows `m = −N..=N`, each a list over `n = −N..=N`.
    pub fn rows(&self) -> Vec<Vec<C64>> {
        let w = 2 * self.order + 1;
        self.data.chunks(w).map(|r| r.to_vec()).collect()
    }
}

/// `g^(m−1)·g′` and `f^(−m−1)·f′` for `|m| ≤ order`.
struct Integrands {
    order: i32,
    g: Vec<LaurentSeries>,
    f: Vec<LaurentSeries>,
}

impl Integrands {
    fn new(pair: &ConformalPair, order: i32) -> Result<Self> {
        let dg = pair.g().derivative();
        let df = pair.f().derivative();
        let mut g = Vec::new();
        let mut f = Vec::new();
        for m in -order..=order {
            g.push(pair.g().int_pow(m - 1)?.mul(&dg)?);
            f.push(pair.f().int_pow(-m - 1)?.mul(&df)?);
        }
        Ok(Integrands { order, g, f })
    }

    fn g(&self, m: i32) -> &LaurentSeries {
        &self.g[(m + self.order) as usize]
    }

    fn f(&self, m: i32) -> &LaurentSeries {
        &self.f[(m + self.order) as usize]
    }
}

/// Grunsky table by residues in the `w`-plane.
pub fn grunsky_table(pair: &ConformalPair, order: usize) -> Result<GrunskyTable> {
    if order > pair.order() {
        return Err(TodaError::IndexOutOfRange {
            index: order as i32,
            order: pair.order(),
        });
    }
    let o = order as i32;
    let ints = Integrands::new(pair, o)?;
    let log_g = log_ratio(pair.g())?;
    let log_f = log_ratio(pair.f())?;
    let rows: Vec<Result<Vec<C64>>> = par_map((-o..=o).collect(), |n| {
        let mut row = vec![ZERO; (2 * o + 1) as usize];
        let put = |row: &mut Vec<C64>, m: i32, v: C64| row[(m + o) as usize] = v;
        if n == 0 {
            for m in 1..=o {
                put(&mut row, m, residue_of_product(&log_g, ints.g(m)));
                put(&mut row, -m, residue_of_product(&log_f, ints.f(m)));
            }
            put(&mut row, 0, -pair.b().ln());
            return Ok(row);
        }
        let p = faber_unchecked(pair, n)?;
        let p = p.poly()?;
        let k = n.abs() as f64;
        for m in 1..=o {
            put(&mut row, m, residue_of_product(p, ints.g(m)) / k);
            put(&mut row, -m, residue_of_product(p, ints.f(m)) / k);
        }
        let zero_col = if n > 0 {
            residue_of_product(p, ints.f(0)) / k
        } else {
            -residue_of_product(p, ints.g(0)) / k
        };
        put(&mut row, 0, zero_col);
        Ok(row)
    });
    let mut table = GrunskyTable::zeros(order);
    for (i, row) in rows.into_iter().enumerate() {
        let n = i as i32 - o;
        for (j, v) in row?.into_iter().enumerate() {
            table.set(n, j as i32 - o, v);
        }
    }
    Ok(table)
}

/// `log(a(w)/w)` with the principal branch for the leading coefficient.
pub fn log_ratio(a: &LaurentSeries) -> Result<LaurentSeries> {
    let (c, _, u) = a.split_normalize()?;
    u.log1p()?.add(&LaurentSeries::constant(c.ln()))
}

/// `ℬ_n = P_n − (n/2)·b(n,0)` and `ℬ_{−n} = P_{−n} + (n/2)·b(−n,0)`.
pub fn b_polynomial(pair: &ConformalPair, table: &GrunskyTable, n: i32) -> Result<LaurentSeries> {
    if n == 0 {
        return Err(TodaError::LogFaberPolynomial);
    }
    check_index(pair, n)?;
    let p = faber_unchecked(pair, n)?;
    let shift = -(n as f64) / 2.0 * table.get(n, 0);
    p.poly()?.add(&LaurentSeries::constant(shift))
}

/// Truncated bivariate power series `Σ a[i][j] x^i y^j`, `i, j ≤ n`.
#[derive(Clone, Debug)]
struct Bivariate {
    n: usize,
    a: Vec<C64>,
}

impl Bivariate {
    fn zeros(n: usize) -> Self {
        Bivariate {
            n,
            a: vec![ZERO; (n + 1) * (n + 1)],
        }
    }

    fn get(&self, i: usize, j: usize) -> C64 {
        self.a[i * (self.n + 1) + j]
    }

    fn set(&mut self, i: usize, j: usize, v: C64) {
        self.a[i * (self.n + 1) + j] = v;
    }

    fn mul(&self, o: &Bivariate) -> Bivariate {
        let n = self.n;
        let mut r = Bivariate::zeros(n);
        for i1 in 0..=n {
            for j1 in 0..=n {
                let x = self.get(i1, j1);
                if x == ZERO {
                    continue;
                }
                for i2 in 0..=n - i1 {
                    for j2 in 0..=n - j1 {
                        let k = (i1 + i2) * (n + 1) + j1 + j2;
                        r.a[k] += x * o.get(i2, j2);
                    }
                }
            }
        }
        r
    }

    /// `log(Q)` for `Q` with nonzero constant term; relies on the non-constant
    /// part being nilpotent in total degree.
    fn log(&self) -> Bivariate {
        let c0 = self.get(0, 0);
        let mut u = self.clone();
        for v in &mut u.a {
            *v /= c0;
        }
        u.set(0, 0, ZERO);
        let mut out = Bivariate::zeros(self.n);
        let mut power = u.clone();
        for k in 1..=2 * self.n {
            let s = if k % 2 == 1 { 1.0 } else { -1.0 } / k as f64;
            for (o, p) in out.a.iter_mut().zip(&power.a) {
                *o += p * s;
            }
            power = power.mul(&u);
        }
        out.set(0, 0, c0.ln());
        out
    }
}

/// Grunsky table from the logarithmic generating functions of the inverse maps.
pub fn grunsky_via_inverse(pair: &ConformalPair, order: usize) -> Result<GrunskyTable> {
    if order > pair.order() {
        return Err(TodaError::IndexOutOfRange {
            index: order as i32,
            order: pair.order(),
        });
    }
    let n = order;
    let big_g = pair.g().invert_function()?;
    let big_f = pair.f().invert_function()?;
    let beta = |k: usize| big_g.coeff(-(k as i32));
    let beta_lead = big_g.coeff(1);
    let alpha = |k: usize| big_f.coeff(k as i32);

    // x = 1/z, y = 1/ζ
    let mut q1 = Bivariate::zeros(n);
    q1.set(0, 0, beta_lead);
    for i in 1..=n {
        for j in 1..=n {
            q1.set(i, j, -beta(i + j - 1));
        }
    }
    // x = 1/z, y = ζ
    let mut q2 = Bivariate::zeros(n);
    q2.set(0, 0, beta_lead);
    for i in 1..=n {
        q2.set(i, 0, beta(i - 1));
    }
    for k in 1..=n {
        let v = q2.get(1, k) - alpha(k);
        q2.set(1, k, v);
    }
    // x = z, y = ζ
    let mut q3 = Bivariate::zeros(n);
    for i in 0..=n {
        for j in 0..=n {
            q3.set(i, j, alpha(i + j + 1));
        }
    }
    let (l1, l2, l3) = (q1.log(), q2.log(), q3.log());

    let mut table = GrunskyTable::zeros(order);
    let o = order as i32;
    table.set(0, 0, l2.get(0, 0));
    for m in 1..=n {
        for k in 1..=n {
            table.set(m as i32, k as i32, -l1.get(m, k));
        }
        for k in 0..=n {
            let v = -l2.get(m, k);
            table.set(m as i32, -(k as i32), v);
            table.set(-(k as i32), m as i32, v);
        }
    }
    for m in 0..=n {
        for k in 0..=n {
            if m + k > 0 {
                table.set(-(m as i32), -(k as i32), -l3.get(m, k));
            }
        }
    }
    // log(G(z)/z) = b00 − Σ b(0,m) z^(−m)
    let lg = log_ratio(&big_g)?;
    for m in 1..=o {
        table.set(0, m, -lg.coeff(-m));
    }
    Ok(table)
}

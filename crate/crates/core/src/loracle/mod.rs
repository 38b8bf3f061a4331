//! Numerical L(E, chi, 1) for ring class characters chi of K, used as an
//! independent check on the p-adic side.
//!
//! L(E, chi, s) has degree 4, gamma factor Gamma_C(s)^2 and is self-dual
//! with root number +1 in the definite setting. The value at the centre is
//! computed from the approximate functional equation
//!
//!   L(1) = sum_m (b_m / m) [V(m / (A t)) + V(m t / A)],  A = sqrt(Q) / (4 pi^2),
//!
//! which holds for every t > 0; evaluating at two values of t checks Q, the
//! Euler factors and the truncation at once.

pub mod bessel;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::f64::consts::PI;

use crate::arith::{factor, kronecker, primes_up_to};
use crate::ellcurve::WeierstrassCurve;
use crate::error::{Error, Result};
use crate::quadorders::{ideals_of_norm, OkIdeal};
use bessel::smoothing_weight;

/// Largest truncation the oracle accepts.
pub const NORM_CAP: usize = 1_000_000;

/// The two smoothing parameters compared by the self-check.
const T_VALUES: [f64; 2] = [1.0, 1.25];

/// The curve and field data shared by all levels.
#[derive(Clone, Debug)]
pub struct LOracle {
    curve: WeierstrassCurve,
    conductor: u64,
    d_k: i64,
    c: i64,
    p: u64,
}

/// Everything needed to evaluate L(E, chi, 1) for characters of conductor c p^n.
#[derive(Clone, Debug)]
pub struct LevelOracle {
    pub n: u32,
    pub q: f64,
    pub bound: usize,
    pub target: f64,
    d_k: i64,
    conductor: u64,
    f: i64,
    ap: HashMap<u64, i64>,
    spf: Vec<u32>,
    weights: Vec<Vec<f64>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LValue {
    pub re: f64,
    pub im: f64,
    /// |L(t_1) - L(t_2)| for the two smoothing parameters.
    pub spread: f64,
    pub terms: usize,
}

impl LValue {
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }
}

impl LOracle {
    pub fn new(curve: &WeierstrassCurve, d_k: i64, c: i64, p: u64) -> Result<Self> {
        let curve = curve.minimal_model()?;
        let conductor = curve.conductor()?;
        if conductor % (p * p) != 0 {
            return Err(Error::Hypothesis(format!("p^2 = {} does not divide N = {conductor}", p * p)));
        }
        if crate::arith::gcd(c, conductor as i64) != 1 {
            return Err(Error::InvalidInput(format!("c = {c} is not prime to N = {conductor}")));
        }
        Ok(LOracle { curve, conductor, d_k, c, p })
    }

    /// Conductor of E/K twisted by a good ring class character chi of level n >= 1,
    /// i.e. chi (psi o N) has conductor exactly p^n at each prime above p.
    pub fn analytic_conductor(&self, n: u32) -> Result<f64> {
        if n == 0 {
            return Err(Error::Unsupported("the oracle needs a character ramified at p".into()));
        }
        let mut q = 1f64;
        for (l, e) in factor(self.d_k.unsigned_abs()) {
            if !self.conductor.is_multiple_of(l) {
                q *= (l as f64).powi(2 * e as i32);
            }
        }
        for (l, e) in factor(self.conductor / (self.p * self.p)) {
            if e > 1 {
                return Err(Error::Unsupported(format!("additive reduction at {l} away from p")));
            }
            q *= (l * l) as f64;
        }
        for (l, e) in factor(self.c as u64) {
            q *= (l as f64).powi(4 * e as i32);
        }
        q *= (self.p as f64).powi(4 * n as i32);
        Ok(q)
    }

    /// Tabulate a_l, the sieve and the smoothing weights for level n.
    pub fn prepare(&self, n: u32, target: f64) -> Result<LevelOracle> {
        let q = self.analytic_conductor(n)?;
        let a = q.sqrt() / (4.0 * PI * PI);
        // The weight decays like exp(-2 sqrt(x)); ask for exp(-z) well below the target.
        let z = (1.0 / target).ln() + 15.0;
        let t_max = T_VALUES.iter().cloned().fold(1.0, f64::max);
        let bound = (a * t_max * (z / 2.0).powi(2)).ceil() as usize + 10;
        if bound > NORM_CAP {
            return Err(Error::OracleNonConvergence(format!(
                "truncation {bound} exceeds the cap {NORM_CAP} (Q = {q:.3e})"
            )));
        }
        let f = self.c * (self.p as i64).pow(n);
        let needed: Vec<u64> = primes_up_to(bound)
            .into_iter()
            .filter(|&l| {
                let k = kronecker(self.d_k, l as i64);
                f % l as i64 != 0 && (k != -1 || l * l <= bound as u64)
            })
            .collect();
        let ap: HashMap<u64, i64> = needed.iter().copied().zip(self.curve.ap_table(&needed)?).collect();
        let weights = T_VALUES
            .iter()
            .map(|&t| {
                (0..=bound)
                    .map(|m| {
                        if m == 0 {
                            return 0.0;
                        }
                        let x = m as f64 / a;
                        smoothing_weight(x / t) + smoothing_weight(x * t)
                    })
                    .collect()
            })
            .collect();
        Ok(LevelOracle {
            n,
            q,
            bound,
            target,
            d_k: self.d_k,
            conductor: self.conductor,
            f,
            ap,
            spf: smallest_prime_factors(bound),
            weights,
        })
    }
}

fn smallest_prime_factors(n: usize) -> Vec<u32> {
    let mut spf = vec![0u32; n + 1];
    for i in 2..=n {
        if spf[i] == 0 {
            for j in (i..=n).step_by(i) {
                if spf[j] == 0 {
                    spf[j] = i as u32;
                }
            }
        }
    }
    spf
}

type Poly = Vec<Complex64>;

fn poly_mul(a: &Poly, b: &Poly) -> Poly {
    let mut out = vec![Complex64::new(0.0, 0.0); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Coefficients c_0..c_k of 1/P(X).
fn inverse_series(poly: &Poly, k: usize) -> Vec<Complex64> {
    let mut c = vec![Complex64::new(1.0, 0.0)];
    for i in 1..=k {
        let mut s = Complex64::new(0.0, 0.0);
        for (j, pj) in poly.iter().enumerate().skip(1) {
            if j <= i {
                s -= pj * c[i - j];
            }
        }
        c.push(s);
    }
    c
}

impl LevelOracle {
    /// The inverse Euler factor at l as a polynomial in X = l^{-s}.
    pub fn euler_factor(&self, l: u64, chi: &dyn Fn(&OkIdeal) -> Complex64) -> Poly {
        let one = Complex64::new(1.0, 0.0);
        let lf = l as f64;
        if self.f % l as i64 == 0 {
            return vec![one];
        }
        let a = *self.ap.get(&l).expect("a_l tabulated") as f64;
        let ideals = ideals_of_norm(l as i64, self.d_k);
        let good_quadratic = |x: Complex64| vec![one, -a * x, lf * x * x];
        let linear = |x: Complex64| vec![one, -a * x];
        let bad = self.conductor.is_multiple_of(l);
        match kronecker(self.d_k, l as i64) {
            1 => {
                let (x, y) = (chi(&ideals[0]), chi(&ideals[1]));
                if bad {
                    poly_mul(&linear(x), &linear(y))
                } else {
                    poly_mul(&good_quadratic(x), &good_quadratic(y))
                }
            }
            0 => {
                let x = chi(&ideals[0]);
                if bad {
                    linear(x)
                } else {
                    good_quadratic(x)
                }
            }
            _ => {
                let z = Complex64::new(0.0, 0.0);
                if bad {
                    vec![one, z, -a * a * one]
                } else {
                    vec![one, z, -(a * a - 2.0 * lf) * one, z, lf * lf * one]
                }
            }
        }
    }

    /// Dirichlet coefficients b_1..b_bound (index 0 unused).
    pub fn coefficients(&self, chi: &dyn Fn(&OkIdeal) -> Complex64) -> Vec<Complex64> {
        let m = self.bound;
        let mut local: HashMap<u64, Vec<Complex64>> = HashMap::new();
        for l in primes_up_to(m) {
            let mut k = 0;
            let mut pk = 1usize;
            while pk * l as usize <= m {
                pk *= l as usize;
                k += 1;
            }
            let poly = if self.f % l as i64 != 0 && kronecker(self.d_k, l as i64) == -1 && l * l > m as u64 {
                vec![Complex64::new(1.0, 0.0)]
            } else {
                self.euler_factor(l, chi)
            };
            local.insert(l, inverse_series(&poly, k));
        }
        let mut b = vec![Complex64::new(0.0, 0.0); m + 1];
        b[1] = Complex64::new(1.0, 0.0);
        for i in 2..=m {
            let l = self.spf[i] as usize;
            let (mut rest, mut k) = (i, 0);
            while rest % l == 0 {
                rest /= l;
                k += 1;
            }
            b[i] = b[rest] * local[&(l as u64)][k];
        }
        b
    }

    /// L(E, chi, 1) with the two-parameter self-check.
    pub fn l_value(&self, chi: &dyn Fn(&OkIdeal) -> Complex64) -> Result<LValue> {
        let b = self.coefficients(chi);
        let sums: Vec<Complex64> = self
            .weights
            .iter()
            .map(|w| (1..=self.bound).map(|m| b[m] * (w[m] / m as f64)).sum())
            .collect();
        let spread = (sums[0] - sums[1]).norm();
        if spread > self.target.max(1e-12) * 10.0 {
            return Err(Error::OracleNonConvergence(format!(
                "smoothing self-check failed: |L(t1) - L(t2)| = {spread:.3e} at level {}",
                self.n
            )));
        }
        Ok(LValue { re: sums[0].re, im: sums[0].im, spread, terms: self.bound })
    }
}

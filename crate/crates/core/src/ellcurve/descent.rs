//! SRAE classification at p and the descent E -> (g, psi, alpha) with
//! pi_E = pi_g (x) psi.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Signed;
use serde::{Deserialize, Serialize};

use super::{ReductionType, WeierstrassCurve};
use crate::arith::cyclo::Cyclotomic;
use crate::arith::padic::Zpn;
use crate::arith::{gcd, primes_up_to, valuation_big, DirichletModP};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SraeClass {
    AlreadySemistable,
    PotentiallyMultiplicative,
    GoodAfterTwist,
    PotentiallyGoodAbelian { e: u32 },
    NotSrae,
}

/// Level of pi_g at p: Steinberg or ramified principal series (`LevelP`),
/// or unramified (`LevelZero`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum DescentCase {
    LevelP,
    LevelZero,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CurveDescent {
    pub curve: WeierstrassCurve,
    pub conductor: u64,
    pub p: u64,
    pub class: SraeClass,
    pub psi: DirichletModP,
    pub case: DescentCase,
    /// The twisted curve when psi is quadratic.
    pub g_curve: Option<WeierstrassCurve>,
    /// a_p(g) when g comes from a curve.
    pub a_p_g: Option<i64>,
    /// alpha when known from the curve side; otherwise read off the quaternionic U_p.
    pub alpha: Option<Zpn>,
    /// a_l(g) for good primes l, as coefficient vectors over Q(zeta_d), d = ord(psi).
    pub eigenvalues: Vec<(u64, Vec<i64>)>,
    pub a_l_e: Vec<(u64, i64)>,
}

impl CurveDescent {
    pub fn eigenvalue(&self, l: u64) -> Option<Cyclotomic<BigRational>> {
        let d = self.psi.order.max(1) as u32;
        let zero = BigRational::from_integer(BigInt::from(0));
        self.eigenvalues.iter().find(|(q, _)| *q == l).map(|(_, c)| {
            Cyclotomic::from_power_sum(
                d,
                &zero,
                c.iter().enumerate().map(|(i, &x)| (i as u64, BigRational::from_integer(BigInt::from(x)))),
            )
        })
    }

    /// N / p^2, the tame level away from p.
    pub fn level_away_from_p(&self) -> u64 {
        self.conductor / (self.p * self.p)
    }
}

pub fn p_star(p: u64) -> i64 {
    if p % 4 == 1 {
        p as i64
    } else {
        -(p as i64)
    }
}

pub fn classify_srae(e: &WeierstrassCurve, p: u64) -> Result<SraeClass> {
    if p == 2 {
        return Err(Error::InvalidInput("p = 2 is not supported".into()));
    }
    let ld = e.local_data(p);
    if ld.reduction != ReductionType::Additive {
        return Ok(SraeClass::AlreadySemistable);
    }
    let j = e.j_invariant();
    if !j.numer().is_zero_big() && valuation_big(j.denom(), p) > valuation_big(&j.numer().abs(), p) {
        return Ok(SraeClass::PotentiallyMultiplicative);
    }
    let tw = e.quadratic_twist(p_star(p))?;
    if tw.local_data(p).reduction == ReductionType::Good {
        return Ok(SraeClass::GoodAfterTwist);
    }
    if p == 3 {
        return Ok(SraeClass::NotSrae);
    }
    let v = ld.disc_valuation;
    let ee = 12 / gcd(12, v as i64) as u32;
    if matches!(ee, 3 | 4 | 6) && (p - 1).is_multiple_of(ee as u64) {
        return Ok(SraeClass::PotentiallyGoodAbelian { e: ee });
    }
    Ok(SraeClass::NotSrae)
}

trait IsZeroBig {
    fn is_zero_big(&self) -> bool;
}

impl IsZeroBig for BigInt {
    fn is_zero_big(&self) -> bool {
        num_traits::Zero::is_zero(self)
    }
}

/// Local type at p used for the conductor-of-twist search: Steinberg twisted by
/// a tame character, or a tame principal series pi(mu, mu^{-1}); characters of
/// Z_p^x are given by their exponent m with mu(g0) = zeta_{p-1}^m.
#[derive(Clone, Copy, Debug)]
enum LocalType {
    SteinbergTwist(u64),
    PrincipalSeries(u64),
}

fn twisted_conductor_exponent(t: LocalType, psi_exp: u64, p: u64) -> u32 {
    let m = p - 1;
    let a = |x: u64| if x.is_multiple_of(m) { 0u32 } else { 1u32 };
    match t {
        LocalType::SteinbergTwist(mu) => {
            let x = (mu + m - psi_exp) % m;
            if x == 0 {
                1
            } else {
                2 * a(x)
            }
        }
        LocalType::PrincipalSeries(mu) => a((mu + m - psi_exp) % m) + a((2 * m - mu - psi_exp) % m),
    }
}

/// Searches all characters mod p for the one minimising the p-exponent of the
/// conductor of pi_E (x) psi^{-1}; ties go to the smallest order, then the smallest k.
fn search_psi(t: LocalType, p: u64) -> (DirichletModP, u32) {
    let m = p - 1;
    let mut best: Option<(u32, u64, u64)> = None;
    for j in 0..m {
        let f = twisted_conductor_exponent(t, j, p);
        let order = m / gcd(m as i64, j as i64) as u64;
        let k = j / (m / order);
        let key = (f, order, k);
        if best.is_none_or(|b| key < b) {
            best = Some(key);
        }
    }
    let (f, order, k) = best.expect("at least one character");
    (DirichletModP::new(p, order, k), f)
}

pub fn find_twist_descent(e: &WeierstrassCurve, p: u64, eig_bound: u64, prec: u32) -> Result<CurveDescent> {
    let curve = e.minimal_model()?;
    let class = classify_srae(&curve, p)?;
    let conductor = curve.conductor()?;
    if class == SraeClass::AlreadySemistable {
        return Err(Error::Hypothesis(format!("E is already semistable at {p} (N = {conductor})")));
    }
    if valuation_big(&BigInt::from(conductor), p) != 2 {
        return Err(Error::Unsupported(format!("conductor exponent at p must be 2 (N = {conductor})")));
    }
    let half = (p - 1) / 2;
    let local = match class {
        SraeClass::PotentiallyMultiplicative => LocalType::SteinbergTwist(half),
        SraeClass::GoodAfterTwist => LocalType::PrincipalSeries(half),
        SraeClass::PotentiallyGoodAbelian { e } => LocalType::PrincipalSeries((p - 1) / e as u64),
        SraeClass::AlreadySemistable => {
            return Err(Error::Hypothesis(format!("E is already semistable at p = {p}; no descent needed")))
        }
        SraeClass::NotSrae => return Err(Error::Hypothesis(format!("E is not SRAE at p = {p}"))),
    };
    let (psi, f) = search_psi(local, p);
    let case = match f {
        0 => DescentCase::LevelZero,
        1 => DescentCase::LevelP,
        _ => return Err(Error::Verification("no character mod p lowers the conductor".into())),
    };
    let (g_curve, a_p_g, alpha) = if psi.is_quadratic() {
        let g = curve.quadratic_twist(p_star(p))?;
        let ap = g.local_data(p).ap;
        let ap = if case == DescentCase::LevelZero { super::ap_of_model(&g, p) } else { ap };
        let alpha = match case {
            DescentCase::LevelP => Zpn::new(p, prec, ap as i128),
            DescentCase::LevelZero => {
                if ap % p as i64 == 0 {
                    return Err(Error::Hypothesis(format!("g is supersingular at p (a_p = {ap})")));
                }
                Zpn::unit_root_of_hecke_poly(ap, p, prec)?
            }
        };
        (Some(g), Some(ap), Some(alpha))
    } else {
        (None, None, None)
    };
    let primes: Vec<u64> = primes_up_to(eig_bound as usize).into_iter().filter(|&l| conductor % l != 0).collect();
    let aps = curve.ap_table(&primes)?;
    let d = psi.order.max(1);
    let mut eigenvalues = Vec::new();
    let mut a_l_e = Vec::new();
    for (&l, &a) in primes.iter().zip(&aps) {
        // a_l(g) = a_l(E) psi(l)^{-1}.
        let e_inv = (d - psi.exponent(l as i64)) % d;
        let zero = BigRational::from_integer(BigInt::from(0));
        let v = Cyclotomic::from_power_sum(d as u32, &zero, [(e_inv, BigRational::from_integer(BigInt::from(a)))]);
        let coeffs = v.coeffs.iter().map(|c| c.to_integer().try_into().expect("small coefficient")).collect();
        eigenvalues.push((l, coeffs));
        a_l_e.push((l, a));
    }
    Ok(CurveDescent { curve, conductor, p, class, psi, case, g_curve, a_p_g, alpha, eigenvalues, a_l_e })
}

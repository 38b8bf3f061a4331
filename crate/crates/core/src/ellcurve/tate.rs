//! Tate's algorithm: minimal model, Kodaira symbol, conductor exponent and
//! Tamagawa number at a prime.

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::WeierstrassCurve;
use crate::arith::{kronecker, mod_inv};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Kodaira {
    I(u32),
    II,
    III,
    IV,
    IStar(u32),
    IVStar,
    IIIStar,
    IIStar,
}

impl Kodaira {
    /// Number of irreducible components of the special fibre.
    pub fn components(&self) -> u32 {
        match *self {
            Kodaira::I(0) => 1,
            Kodaira::I(n) => n,
            Kodaira::II => 1,
            Kodaira::III => 2,
            Kodaira::IV => 3,
            Kodaira::IStar(n) => 5 + n,
            Kodaira::IVStar => 7,
            Kodaira::IIIStar => 8,
            Kodaira::IIStar => 9,
        }
    }
}

impl std::fmt::Display for Kodaira {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Kodaira::I(n) => write!(f, "I{n}"),
            Kodaira::II => write!(f, "II"),
            Kodaira::III => write!(f, "III"),
            Kodaira::IV => write!(f, "IV"),
            Kodaira::IStar(n) => write!(f, "I{n}*"),
            Kodaira::IVStar => write!(f, "IV*"),
            Kodaira::IIIStar => write!(f, "III*"),
            Kodaira::IIStar => write!(f, "II*"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ReductionType {
    Good,
    SplitMultiplicative,
    NonsplitMultiplicative,
    Additive,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalReductionData {
    pub p: u64,
    pub conductor_exponent: u32,
    pub kodaira: Kodaira,
    pub reduction: ReductionType,
    pub tamagawa: u32,
    /// Valuation of the minimal discriminant.
    pub disc_valuation: u32,
    /// Model minimal at p.
    pub minimal: WeierstrassCurve,
    /// Trace of Frobenius on the reduction: 1, -1, 0 at bad primes.
    pub ap: i64,
}

fn val(x: &BigInt, p: u64) -> u32 {
    if x.is_zero() {
        u32::MAX / 2
    } else {
        crate::arith::valuation_big(x, p)
    }
}

fn md(x: &BigInt, p: u64) -> u64 {
    let pb = BigInt::from(p);
    (((x % &pb) + &pb) % &pb).to_u64().expect("residue")
}

fn pdiv(x: &BigInt, p: u64) -> bool {
    md(x, p) == 0
}

/// Roots in F_p of a polynomial given low degree first.
fn roots_mod_p(coeffs: &[u64], p: u64) -> Vec<u64> {
    (0..p)
        .filter(|&x| {
            let mut acc = 0u128;
            for &c in coeffs.iter().rev() {
                acc = (acc * x as u128 + c as u128) % p as u128;
            }
            acc == 0
        })
        .collect()
}

/// Does a Y^2 + b Y + c (a a unit) have a double root mod p? Returns the root if so.
fn double_root(a: u64, b: u64, c: u64, p: u64) -> Option<u64> {
    if p == 2 {
        // Derivative is b; a double root exists iff b is even.
        if b % 2 == 1 {
            return None;
        }
        // a Y^2 + c = 0 with a odd: Y = c.
        return Some(c % 2);
    }
    let disc = (b as u128 * b as u128 + 4 * (p as u128 - 1) * a as u128 % p as u128 * c as u128) % p as u128;
    if disc != 0 {
        return None;
    }
    let inv = mod_inv(2 * a as i128, p as i128).expect("unit") as u128;
    Some(((p as u128 - b as u128 % p as u128) * inv % p as u128) as u64)
}

fn has_root(a: u64, b: u64, c: u64, p: u64) -> bool {
    !roots_mod_p(&[c, b, a], p).is_empty()
}

pub fn tate(curve: &WeierstrassCurve, p: u64) -> LocalReductionData {
    let pb = BigInt::from(p);
    let zero = BigInt::zero();
    let one = BigInt::one();
    let mut e = curve.clone();
    loop {
        let disc = e.discriminant();
        let n = val(&disc, p);
        if n == 0 {
            let ap = super::ap_of_model(&e, p);
            return LocalReductionData {
                p,
                conductor_exponent: 0,
                kodaira: Kodaira::I(0),
                reduction: ReductionType::Good,
                tamagawa: 1,
                disc_valuation: 0,
                minimal: e,
                ap,
            };
        }
        // Move the singular point to (0, 0).
        let [b2, b4, b6, _] = e.b_invariants();
        let (a1, a2, a3, a4, a6) = (&e.a[0], &e.a[1], &e.a[2], &e.a[3], &e.a[4]);
        let (r, t): (BigInt, BigInt) = if p == 2 {
            if pdiv(&b2, 2) {
                let r = BigInt::from(md(a4, 2));
                let t = BigInt::from(md(&(&r * (1 + a2 + a4) + a6), 2));
                (r, t)
            } else {
                let r = BigInt::from(md(a3, 2));
                let t = BigInt::from(md(&(&r + a4), 2));
                (r, t)
            }
        } else if p == 3 {
            let r = if pdiv(&b2, 3) { BigInt::from(md(&-&b6, 3)) } else { BigInt::from(md(&-(&b2 * &b4), 3)) };
            let t = BigInt::from(md(&(a1 * &r + a3), 3));
            (r, t)
        } else {
            let c4 = e.c4();
            let c6 = e.c6();
            let r = if pdiv(&c4, p) {
                let inv12 = mod_inv(12, p as i128).unwrap();
                BigInt::from(md(&(-&b2 * BigInt::from(inv12)), p))
            } else {
                let d = md(&(12 * &c4), p);
                let inv = mod_inv(d as i128, p as i128).unwrap();
                BigInt::from(md(&(-(&c6 + &b2 * &c4) * BigInt::from(inv)), p))
            };
            let inv2 = mod_inv(2, p as i128).unwrap();
            let t = BigInt::from(md(&(-(a1 * &r + a3) * BigInt::from(inv2)), p));
            (r, t)
        };
        e = e.transform(&r, &zero, &t, &one);
        let [b2, _, _, b8] = e.b_invariants();
        let c4 = e.c4();
        // Multiplicative reduction.
        if !pdiv(&c4, p) {
            let (a1, a2) = (md(&e.a[0], p), md(&e.a[1], p));
            // x^2 + a1 x - a2 splits?
            let split = if p == 2 {
                a2 % 2 == 0
            } else {
                kronecker((a1 * a1 + 4 * a2) as i64 % p as i64, p as i64) == 1
            };
            let tam = if split {
                n
            } else if n % 2 == 1 {
                1
            } else {
                2
            };
            let _ = b2;
            return LocalReductionData {
                p,
                conductor_exponent: 1,
                kodaira: Kodaira::I(n),
                reduction: if split { ReductionType::SplitMultiplicative } else { ReductionType::NonsplitMultiplicative },
                tamagawa: tam,
                disc_valuation: n,
                minimal: e,
                ap: if split { 1 } else { -1 },
            };
        }
        let additive = |kod: Kodaira, f: u32, c: u32, e: WeierstrassCurve| LocalReductionData {
            p,
            conductor_exponent: f,
            kodaira: kod,
            reduction: ReductionType::Additive,
            tamagawa: c,
            disc_valuation: n,
            minimal: e,
            ap: 0,
        };
        if val(&e.a[4], p) < 2 {
            return additive(Kodaira::II, n, 1, e);
        }
        if val(&b8, p) < 3 {
            return additive(Kodaira::III, n - 1, 2, e);
        }
        let [_, _, b6, _] = e.b_invariants();
        if val(&b6, p) < 3 {
            let a3p = md(&(&e.a[2] / &pb), p);
            let a6p = md(&(&e.a[4] / (&pb * &pb)), p);
            let c = if has_root(1, a3p, (p - a6p) % p, p) { 3 } else { 1 };
            return additive(Kodaira::IV, n - 2, c, e);
        }
        // Arrange p | a1, a2; p^2 | a3, a4; p^3 | a6.
        let (s, t) = if p == 2 {
            let s = BigInt::from(md(&e.a[1], 2));
            let t = 2 * BigInt::from(md(&(&e.a[4] / 4), 2));
            (s, t)
        } else {
            let inv2 = BigInt::from(mod_inv(2, p as i128).unwrap());
            let s = BigInt::from(md(&(-&e.a[0] * &inv2), p));
            let t = BigInt::from(md(&(-&e.a[2] * &inv2), p)) * &pb;
            (s, t)
        };
        e = e.transform(&zero, &s, &t, &one);
        // Re-centre a3 modulo p^2 if needed (p odd).
        if p != 2 && !(&e.a[2] % (&pb * &pb)).is_zero() {
            let inv2 = BigInt::from(mod_inv(2, p as i128).unwrap());
            let t2 = BigInt::from(md(&(-(&e.a[2] / &pb) * &inv2), p)) * &pb;
            e = e.transform(&zero, &zero, &t2, &one);
        }
        let p2 = &pb * &pb;
        let p3 = &p2 * &pb;
        let a2p = md(&(&e.a[1] / &pb), p);
        let a4p = md(&(&e.a[3] / &p2), p);
        let a6p = md(&(&e.a[4] / &p3), p);
        let cubic = [a6p, a4p, a2p, 1];
        let roots = roots_mod_p(&cubic, p);
        // Multiplicity of roots via derivative.
        let dcubic = [a4p, 2 * a2p % p, 3 % p];
        let d2 = [2 * a2p % p, 6 % p];
        let simple = roots.iter().filter(|&&x| !roots_mod_p(&dcubic, p).contains(&x)).count();
        let discriminant_zero = roots.iter().any(|x| roots_mod_p(&dcubic, p).contains(x));
        if !discriminant_zero {
            let _ = simple;
            return additive(Kodaira::IStar(0), n - 4, 1 + roots.len() as u32, e);
        }
        let double: Vec<u64> =
            roots.iter().copied().filter(|x| roots_mod_p(&dcubic, p).contains(x) && !roots_mod_p(&d2, p).contains(x)).collect();
        let triple: Vec<u64> =
            roots.iter().copied().filter(|x| roots_mod_p(&dcubic, p).contains(x) && roots_mod_p(&d2, p).contains(x)).collect();
        if let Some(&x0) = double.first() {
            // I_m^*: move the double root to 0.
            e = e.transform(&(BigInt::from(x0) * &pb), &zero, &zero, &one);
            let mut m = 1u32;
            loop {
                if m % 2 == 1 {
                    let k = (m + 3) / 2;
                    let pk = pb.pow(k);
                    let a3k = md(&(&e.a[2] / &pk), p);
                    let a6k = md(&(&e.a[4] / pb.pow(m + 3)), p);
                    match double_root(1, a3k, (p - a6k) % p, p) {
                        None => {
                            let c = if has_root(1, a3k, (p - a6k) % p, p) { 4 } else { 2 };
                            return additive(Kodaira::IStar(m), n - 4 - m, c, e);
                        }
                        Some(y0) => {
                            e = e.transform(&zero, &zero, &(BigInt::from(y0) * &pk), &one);
                        }
                    }
                } else {
                    let k = (m + 4) / 2;
                    let a21 = md(&(&e.a[1] / &pb), p);
                    let a4k = md(&(&e.a[3] / pb.pow(k)), p);
                    let a6k = md(&(&e.a[4] / pb.pow(m + 3)), p);
                    match double_root(a21, a4k, a6k, p) {
                        None => {
                            let c = if has_root(a21, a4k, a6k, p) { 4 } else { 2 };
                            return additive(Kodaira::IStar(m), n - 4 - m, c, e);
                        }
                        Some(x0) => {
                            e = e.transform(&(BigInt::from(x0) * pb.pow((m + 2) / 2)), &zero, &zero, &one);
                        }
                    }
                }
                m += 1;
            }
        }
        let x0 = *triple.first().expect("cubic has a triple root");
        e = e.transform(&(BigInt::from(x0) * &pb), &zero, &zero, &one);
        let a32 = md(&(&e.a[2] / &p2), p);
        let a64 = md(&(&e.a[4] / (&p2 * &p2)), p);
        match double_root(1, a32, (p - a64) % p, p) {
            None => {
                let c = if has_root(1, a32, (p - a64) % p, p) { 3 } else { 1 };
                return additive(Kodaira::IVStar, n - 6, c, e);
            }
            Some(y0) => {
                e = e.transform(&zero, &zero, &(BigInt::from(y0) * &p2), &one);
            }
        }
        if val(&e.a[3], p) < 4 {
            return additive(Kodaira::IIIStar, n - 7, 2, e);
        }
        if val(&e.a[4], p) < 6 {
            return additive(Kodaira::IIStar, n - 8, 1, e);
        }
        // Non-minimal: scale by p.
        e = e.transform(&zero, &zero, &zero, &pb);
    }
}

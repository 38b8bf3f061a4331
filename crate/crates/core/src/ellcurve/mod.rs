//! Elliptic curves over Q: invariants, quadratic twists, point counting,
//! Tate's algorithm and the twist descent at an additive prime.

pub mod descent;
pub mod tate;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{is_prime, valuation_big};
use crate::error::{Error, Result};
pub use tate::{Kodaira, LocalReductionData, ReductionType};

/// Long Weierstrass model y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeierstrassCurve {
    pub a: [BigInt; 5],
}

impl WeierstrassCurve {
    pub fn new(a: [i64; 5]) -> Result<Self> {
        Self::from_big(a.map(BigInt::from))
    }

    pub fn from_big(a: [BigInt; 5]) -> Result<Self> {
        let e = WeierstrassCurve { a };
        if e.discriminant().is_zero() {
            return Err(Error::InvalidInput("singular Weierstrass equation (discriminant 0)".into()));
        }
        Ok(e)
    }

    pub fn coeffs_i64(&self) -> Option<[i64; 5]> {
        let v: Vec<i64> = self.a.iter().filter_map(|x| x.to_i64()).collect();
        v.try_into().ok()
    }

    pub fn b_invariants(&self) -> [BigInt; 4] {
        let [a1, a2, a3, a4, a6] = &self.a;
        let b2 = a1 * a1 + 4 * a2;
        let b4 = a1 * a3 + 2 * a4;
        let b6 = a3 * a3 + 4 * a6;
        let b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4;
        [b2, b4, b6, b8]
    }

    pub fn c4(&self) -> BigInt {
        let [b2, b4, _, _] = self.b_invariants();
        &b2 * &b2 - 24 * b4
    }

    pub fn c6(&self) -> BigInt {
        let [b2, b4, b6, _] = self.b_invariants();
        -(&b2 * &b2 * &b2) + 36 * &b2 * b4 - 216 * b6
    }

    pub fn discriminant(&self) -> BigInt {
        let [b2, b4, b6, b8] = self.b_invariants();
        -(&b2 * &b2 * &b8) - 8 * &b4 * &b4 * &b4 - 27 * &b6 * &b6 + 9 * &b2 * &b4 * &b6
    }

    pub fn j_invariant(&self) -> BigRational {
        let c4 = self.c4();
        BigRational::new(&c4 * &c4 * &c4, self.discriminant())
    }

    /// Change of coordinates x = u^2 x' + r, y = u^3 y' + s u^2 x' + t, returning the new model.
    /// Requires the resulting coefficients to be integral.
    pub fn transform(&self, r: &BigInt, s: &BigInt, t: &BigInt, u: &BigInt) -> Self {
        let [a1, a2, a3, a4, a6] = &self.a;
        let n1 = a1 + 2 * s;
        let n2 = a2 - s * a1 + 3 * r - s * s;
        let n3 = a3 + r * a1 + 2 * t;
        let n4 = a4 - s * a3 + 2 * r * a2 - (t + r * s) * a1 + 3 * r * r - 2 * s * t;
        let n6 = a6 + r * a4 + r * r * a2 + r * r * r - t * a3 - t * t - r * t * a1;
        let us = [u.clone(), u.pow(2), u.pow(3), u.pow(4), u.pow(6)];
        let out = [n1, n2, n3, n4, n6];
        let a = std::array::from_fn(|i| {
            assert!((&out[i] % &us[i]).is_zero(), "non-integral coordinate change");
            &out[i] / &us[i]
        });
        WeierstrassCurve { a }
    }

    /// A model with the given c4, c6 (integral, possibly non-minimal).
    pub fn from_c4_c6(c4: &BigInt, c6: &BigInt) -> Result<Self> {
        let z = BigInt::zero();
        Self::from_big([z.clone(), z.clone(), z, -27 * c4, -54 * c6])
    }

    /// Quadratic twist by d (a fundamental discriminant or squarefree integer), minimalised.
    pub fn quadratic_twist(&self, d: i64) -> Result<Self> {
        let d = BigInt::from(d);
        let c4 = self.c4() * &d * &d;
        let c6 = self.c6() * &d * &d * &d;
        Self::from_c4_c6(&c4, &c6)?.minimal_model()
    }

    /// Global minimal model (Tate's algorithm at every bad prime, then a1, a3 in {0,1}, a2 in {-1,0,1}).
    pub fn minimal_model(&self) -> Result<Self> {
        let mut e = self.clone();
        for p in self.bad_primes()? {
            e = tate::tate(&e, p).minimal;
        }
        Ok(e.reduced_form())
    }

    /// Normalise so that a1, a3 lie in {0, 1} and a2 in {-1, 0, 1}.
    fn reduced_form(&self) -> Self {
        let (zero, one) = (BigInt::zero(), BigInt::one());
        let two = BigInt::from(2);
        let three = BigInt::from(3);
        let a1 = &self.a[0];
        let s = -(a1 - a1.rem_euclid_big(&two)) / &two;
        let e1 = self.transform(&zero, &s, &zero, &one);
        let a2 = &e1.a[1];
        let target = (a2 + &one).rem_euclid_big(&three) - &one;
        let r = (&target - a2) / &three;
        let e2 = e1.transform(&r, &zero, &zero, &one);
        let a3 = &e2.a[2];
        let t = -(a3 - a3.rem_euclid_big(&two)) / &two;
        e2.transform(&zero, &zero, &t, &one)
    }

    /// Primes dividing the discriminant (trial division up to 10^6, then a
    /// primality test on the cofactor).
    pub fn bad_primes(&self) -> Result<Vec<u64>> {
        let mut d = self.discriminant().abs();
        let mut out = Vec::new();
        for p in crate::arith::primes_up_to(1_000_000) {
            let pb = BigInt::from(p);
            if (&d % &pb).is_zero() {
                out.push(p);
                while (&d % &pb).is_zero() {
                    d /= &pb;
                }
            }
            if d.is_one() {
                return Ok(out);
            }
        }
        match d.to_u64() {
            Some(q) if is_prime(q) => {
                out.push(q);
                Ok(out)
            }
            _ => Err(Error::Unsupported("discriminant has a large composite cofactor".into())),
        }
    }

    pub fn local_data(&self, p: u64) -> LocalReductionData {
        tate::tate(self, p)
    }

    pub fn conductor(&self) -> Result<u64> {
        let mut n = 1u64;
        for p in self.bad_primes()? {
            n *= p.pow(self.local_data(p).conductor_exponent);
        }
        Ok(n)
    }

    /// a_l = l + 1 - #E~(F_l) on a model minimal at l (any reduction type).
    pub fn ap(&self, l: u64) -> i64 {
        let e = if self.discriminant_valuation(l) >= 12 { self.local_data(l).minimal } else { self.clone() };
        ap_of_model(&e, l)
    }

    fn discriminant_valuation(&self, l: u64) -> u32 {
        valuation_big(&self.discriminant(), l)
    }

    /// a_l for a good prime l; bad primes are rejected.
    pub fn count_points_ap(&self, l: u64) -> Result<i64> {
        if !is_prime(l) {
            return Err(Error::InvalidInput(format!("{l} is not prime")));
        }
        let min = self.minimal_model()?;
        if (min.discriminant() % BigInt::from(l)).is_zero() {
            return Err(Error::InvalidInput(format!("{l} is a prime of bad reduction")));
        }
        Ok(ap_of_model(&min, l))
    }

    /// a_l for all primes l <= bound (using a minimal model), computed in parallel.
    pub fn ap_table(&self, primes: &[u64]) -> Result<Vec<i64>> {
        let min = self.minimal_model()?;
        let bad = min.bad_primes()?;
        Ok(primes
            .par_iter()
            .map(|&l| if bad.contains(&l) { min.local_data(l).ap } else { ap_of_model(&min, l) })
            .collect())
    }
}

trait RemEuclidBig {
    fn rem_euclid_big(&self, m: &BigInt) -> BigInt;
}

impl RemEuclidBig for BigInt {
    fn rem_euclid_big(&self, m: &BigInt) -> BigInt {
        ((self % m) + m) % m
    }
}

/// l + 1 - #E(F_l) for the given integral model (all points of the reduction).
pub fn ap_of_model(e: &WeierstrassCurve, l: u64) -> i64 {
    let lb = BigInt::from(l);
    let red = |x: &BigInt| x.rem_euclid_big(&lb).to_u64().expect("residue");
    if l == 2 {
        let [a1, a2, a3, a4, a6] = e.a.clone().map(|x| red(&x));
        let mut count = 1i64;
        for x in 0..2u64 {
            for y in 0..2u64 {
                let lhs = y * y + a1 * x * y + a3 * y;
                let rhs = x * x * x + a2 * x * x + a4 * x + a6;
                if (lhs + rhs) % 2 == 0 {
                    count += 1;
                }
            }
        }
        return 3 - count;
    }
    // (2y + a1 x + a3)^2 = 4x^3 + b2 x^2 + 2 b4 x + b6
    let [b2, b4, b6, _] = e.b_invariants();
    let (b2, b4, b6) = (red(&b2), red(&b4), red(&b6));
    let mut is_sq = vec![false; l as usize];
    for y in 0..l {
        is_sq[(y * y % l) as usize] = true;
    }
    let mut s = 0i64;
    let lu = l as u128;
    for x in 0..l as u128 {
        let v = ((4 * x * x % lu * x + b2 as u128 * x % lu * x + 2 * b4 as u128 * x + b6 as u128) % lu) as usize;
        if v != 0 {
            s += if is_sq[v] { 1 } else { -1 };
        }
    }
    -s
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn naive_count(e: &WeierstrassCurve, l: u64) -> i64 {
        let lb = BigInt::from(l);
        let red = |x: &BigInt| (((x % &lb) + &lb) % &lb).to_i64().unwrap();
        let [a1, a2, a3, a4, a6] = e.a.clone().map(|x| red(&x));
        let l = l as i64;
        let mut count = 1;
        for x in 0..l {
            for y in 0..l {
                let lhs = y * y + a1 * x * y + a3 * y;
                let rhs = x * x * x + a2 * x * x + a4 * x + a6;
                if (lhs - rhs).rem_euclid(l) == 0 {
                    count += 1;
                }
            }
        }
        l + 1 - count
    }

    #[test]
    fn invariants_identity() {
        let e = WeierstrassCurve::new([1, 1, 1, -10, -10]).unwrap();
        let lhs = e.c4().pow(3) - e.c6().pow(2);
        assert_eq!(lhs, 1728 * e.discriminant());
        assert_eq!(e.discriminant(), BigInt::from(50625));
    }

    #[test]
    fn singular_curve_rejected() {
        assert!(WeierstrassCurve::new([0, 1, 0, 0, 0]).is_err());
    }

    #[test]
    fn point_counts_small_curves() {
        let e = WeierstrassCurve::new([0, 0, 0, -1, 0]).unwrap();
        assert_eq!(e.count_points_ap(3).unwrap(), 0);
        let e11 = WeierstrassCurve::new([0, -1, 1, 0, 0]).unwrap();
        assert_eq!(e11.count_points_ap(2).unwrap(), -2);
        assert!(e11.count_points_ap(11).is_err());
        let e11a = WeierstrassCurve::new([0, -1, 1, -10, -20]).unwrap();
        let ap: Vec<i64> = [2, 3, 5, 7, 13].iter().map(|&l| e11a.count_points_ap(l).unwrap()).collect();
        assert_eq!(ap, vec![-2, -1, 1, -2, 4]);
    }

    #[test]
    fn twisting_twice_returns_the_curve() {
        let e = WeierstrassCurve::new([1, 1, 1, -10, -10]).unwrap();
        let t = e.quadratic_twist(5).unwrap();
        assert_eq!(t.conductor().unwrap(), 75);
        let tt = t.quadratic_twist(5).unwrap();
        assert_eq!(tt.j_invariant(), e.j_invariant());
        assert_eq!(tt.conductor().unwrap(), 15);
        assert_eq!(tt, e.minimal_model().unwrap());
    }

    proptest! {
        #[test]
        fn character_sum_count_matches_naive(a in proptest::array::uniform5(-30i64..30), li in 0usize..12) {
            let l = [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37][li];
            let Ok(e) = WeierstrassCurve::new(a) else { return Ok(()); };
            let ap = ap_of_model(&e, l);
            prop_assert_eq!(ap, naive_count(&e, l));
            if !(e.discriminant() % BigInt::from(l)).is_zero() {
                prop_assert!((ap * ap) as u64 <= 4 * l);
            }
        }
    }
}

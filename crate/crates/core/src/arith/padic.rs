//! Fixed-precision p-adic integers Z/p^N and 2x2 matrices over them.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use std::fmt;

use super::mod_inv;
use crate::error::{Error, Result};

/// An element of Z/p^N. The modulus must stay below 2^64 so products fit in u128.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Zpn {
    pub p: u64,
    pub prec: u32,
    pub v: u128,
}

impl fmt::Debug for Zpn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} mod {}^{}", self.v, self.p, self.prec)
    }
}

pub fn modulus(p: u64, prec: u32) -> u128 {
    (p as u128).pow(prec)
}

pub fn check_precision(p: u64, prec: u32) -> Result<()> {
    let ok = (p as u128).checked_pow(prec).is_some_and(|m| m <= u64::MAX as u128);
    if ok && prec > 0 {
        Ok(())
    } else {
        Err(Error::Unsupported(format!("precision {p}^{prec} exceeds 64-bit modulus")))
    }
}

/// Largest N with p^N below 2^64.
pub fn max_precision(p: u64) -> u32 {
    let mut n = 1;
    while check_precision(p, n + 1).is_ok() {
        n += 1;
    }
    n
}

impl Zpn {
    pub fn modulus(&self) -> u128 {
        modulus(self.p, self.prec)
    }

    pub fn new(p: u64, prec: u32, v: i128) -> Self {
        let m = modulus(p, prec) as i128;
        Zpn { p, prec, v: v.rem_euclid(m) as u128 }
    }

    pub fn zero(p: u64, prec: u32) -> Self {
        Zpn { p, prec, v: 0 }
    }

    pub fn one(p: u64, prec: u32) -> Self {
        Zpn::new(p, prec, 1)
    }

    pub fn like(&self, v: i128) -> Self {
        Zpn::new(self.p, self.prec, v)
    }

    pub fn from_big(p: u64, prec: u32, v: &BigInt) -> Self {
        let m = BigInt::from(modulus(p, prec));
        let r = ((v % &m) + &m) % &m;
        Zpn { p, prec, v: r.to_u128().expect("reduced residue") }
    }

    /// Image of a rational with denominator prime to p.
    pub fn from_rational(p: u64, prec: u32, q: &BigRational) -> Result<Self> {
        let n = Zpn::from_big(p, prec, q.numer());
        let d = Zpn::from_big(p, prec, q.denom());
        Ok(n * d.inv()?)
    }

    pub fn is_zero(&self) -> bool {
        self.v == 0
    }

    /// Valuation, capped at the precision.
    pub fn valuation(&self) -> u32 {
        if self.v == 0 {
            return self.prec;
        }
        let mut v = self.v;
        let mut k = 0;
        while v.is_multiple_of(self.p as u128) {
            v /= self.p as u128;
            k += 1;
        }
        k
    }

    pub fn is_unit(&self) -> bool {
        !self.v.is_multiple_of(self.p as u128)
    }

    pub fn inv(&self) -> Result<Self> {
        let m = self.modulus() as i128;
        mod_inv(self.v as i128, m)
            .map(|x| Zpn { v: x as u128, ..*self })
            .ok_or_else(|| Error::Verification(format!("{self:?} is not a p-adic unit")))
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut b = *self;
        let mut r = self.like(1);
        while e > 0 {
            if e & 1 == 1 {
                r = r * b;
            }
            b = b * b;
            e >>= 1;
        }
        r
    }

    /// Exact division by p^k; the result has precision reduced by k.
    pub fn div_p_power(&self, k: u32) -> Result<Self> {
        if k == 0 {
            return Ok(*self);
        }
        let pk = (self.p as u128).pow(k);
        if !self.v.is_multiple_of(pk) || k >= self.prec {
            return Err(Error::Verification(format!("{self:?} not divisible by {}^{k}", self.p)));
        }
        Ok(Zpn { p: self.p, prec: self.prec - k, v: self.v / pk })
    }

    pub fn reduce_to(&self, prec: u32) -> Self {
        assert!(prec <= self.prec);
        Zpn { p: self.p, prec, v: self.v % modulus(self.p, prec) }
    }

    /// Balanced representative in (-m/2, m/2].
    pub fn balanced(&self) -> i128 {
        let m = self.modulus();
        if self.v > m / 2 {
            self.v as i128 - m as i128
        } else {
            self.v as i128
        }
    }

    pub fn residue(&self) -> u64 {
        (self.v % self.p as u128) as u64
    }

    /// Square root of a unit square by Hensel lifting (p odd).
    pub fn sqrt_unit(&self) -> Result<Self> {
        let r0 = super::sqrt_mod_prime(self.residue() as i64, self.p)
            .filter(|&r| r != 0)
            .ok_or_else(|| Error::Verification(format!("{self:?} is not a unit square")))?;
        let mut x = self.like(r0 as i128);
        for _ in 0..(self.prec as usize + 2) {
            let two_x_inv = (x + x).inv()?;
            x = x - (x * x - *self) * two_x_inv;
        }
        debug_assert_eq!(x * x, *self);
        Ok(x)
    }

    /// Teichmüller representative of the residue of `self`.
    pub fn teichmuller(&self) -> Self {
        let mut x = *self;
        for _ in 0..self.prec + 1 {
            x = x.pow(self.p);
        }
        x
    }

    /// The unit root of x^2 - a x + p, for a a p-adic unit.
    pub fn unit_root_of_hecke_poly(a: i64, p: u64, prec: u32) -> Result<Self> {
        let a = Zpn::new(p, prec, a as i128);
        if !a.is_unit() {
            return Err(Error::Hypothesis(format!("a_p = {a:?} is not ordinary")));
        }
        let pp = a.like(p as i128);
        let mut x = a;
        for _ in 0..(prec as usize + 2) {
            let f = x * x - a * x + pp;
            let df = x + x - a;
            x = x - f * df.inv()?;
        }
        Ok(x)
    }
}

macro_rules! same_ring {
    ($a:expr, $b:expr) => {
        debug_assert!($a.p == $b.p && $a.prec == $b.prec, "mixed p-adic rings: {:?} vs {:?}", $a, $b);
    };
}

impl std::ops::Add for Zpn {
    type Output = Zpn;
    fn add(self, o: Zpn) -> Zpn {
        same_ring!(self, o);
        let m = self.modulus();
        Zpn { v: (self.v + o.v) % m, ..self }
    }
}

impl std::ops::Sub for Zpn {
    type Output = Zpn;
    fn sub(self, o: Zpn) -> Zpn {
        same_ring!(self, o);
        let m = self.modulus();
        Zpn { v: (self.v + m - o.v) % m, ..self }
    }
}

impl std::ops::Mul for Zpn {
    type Output = Zpn;
    fn mul(self, o: Zpn) -> Zpn {
        same_ring!(self, o);
        Zpn { v: self.v * o.v % self.modulus(), ..self }
    }
}

impl std::ops::Neg for Zpn {
    type Output = Zpn;
    fn neg(self) -> Zpn {
        let m = self.modulus();
        Zpn { v: (m - self.v) % m, ..self }
    }
}

/// 2x2 matrix over Z/p^N, row major.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Mat2 {
    pub m: [[Zpn; 2]; 2],
}

impl Mat2 {
    pub fn new(a: Zpn, b: Zpn, c: Zpn, d: Zpn) -> Self {
        Mat2 { m: [[a, b], [c, d]] }
    }

    pub fn from_ints(p: u64, prec: u32, e: [[i128; 2]; 2]) -> Self {
        let z = |v| Zpn::new(p, prec, v);
        Mat2::new(z(e[0][0]), z(e[0][1]), z(e[1][0]), z(e[1][1]))
    }

    pub fn identity(p: u64, prec: u32) -> Self {
        Mat2::from_ints(p, prec, [[1, 0], [0, 1]])
    }

    pub fn zero(p: u64, prec: u32) -> Self {
        Mat2::from_ints(p, prec, [[0, 0], [0, 0]])
    }

    pub fn det(&self) -> Zpn {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    pub fn trace(&self) -> Zpn {
        self.m[0][0] + self.m[1][1]
    }

    /// Adjugate, so that `adj(A) * A = det(A)`.
    pub fn adj(&self) -> Self {
        let [[a, b], [c, d]] = self.m;
        Mat2::new(d, -b, -c, a)
    }

    pub fn inv(&self) -> Result<Self> {
        let di = self.det().inv()?;
        Ok(self.adj().scale(di))
    }

    pub fn scale(&self, s: Zpn) -> Self {
        let [[a, b], [c, d]] = self.m;
        Mat2::new(a * s, b * s, c * s, d * s)
    }

    pub fn mul(&self, o: &Mat2) -> Mat2 {
        let a = &self.m;
        let b = &o.m;
        let e = |i: usize, j: usize| a[i][0] * b[0][j] + a[i][1] * b[1][j];
        Mat2::new(e(0, 0), e(0, 1), e(1, 0), e(1, 1))
    }

    pub fn add(&self, o: &Mat2) -> Mat2 {
        let e = |i: usize, j: usize| self.m[i][j] + o.m[i][j];
        Mat2::new(e(0, 0), e(0, 1), e(1, 0), e(1, 1))
    }

    pub fn sub(&self, o: &Mat2) -> Mat2 {
        let e = |i: usize, j: usize| self.m[i][j] - o.m[i][j];
        Mat2::new(e(0, 0), e(0, 1), e(1, 0), e(1, 1))
    }

    pub fn p(&self) -> u64 {
        self.m[0][0].p
    }

    pub fn prec(&self) -> u32 {
        self.m[0][0].prec
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn unit_root_is_root() {
        // a_5 of the conductor 11 curve is 1.
        let a = Zpn::unit_root_of_hecke_poly(1, 5, 20).unwrap();
        let f = a * a - a * a.like(1) + a.like(5);
        assert!(f.is_zero());
        assert!(a.is_unit());
    }

    #[test]
    fn teichmuller_is_root_of_unity() {
        let t = Zpn::new(7, 12, 3).teichmuller();
        assert_eq!(t.pow(6), t.like(1));
        assert_eq!(t.residue(), 3);
    }

    #[test]
    fn precision_guard() {
        assert!(check_precision(5, 20).is_ok());
        assert!(check_precision(11, 20).is_err());
        assert_eq!(max_precision(5), 27);
    }

    proptest! {
        #[test]
        fn field_axioms_mod_p_power(a in any::<i64>(), b in any::<i64>(), c in any::<i64>()) {
            let z = |v: i64| Zpn::new(5, 20, v as i128);
            let (x, y, w) = (z(a), z(b), z(c));
            prop_assert_eq!((x + y) * w, x * w + y * w);
            prop_assert_eq!(x - x, z(0));
            prop_assert_eq!((x * y).balanced().rem_euclid(5), (a as i128 * b as i128).rem_euclid(5));
            if x.is_unit() {
                prop_assert_eq!(x * x.inv().unwrap(), z(1));
            }
        }

        #[test]
        fn sqrt_of_unit_squares(a in 1i64..10_000) {
            prop_assume!(a % 7 != 0);
            let x = Zpn::new(7, 15, a as i128);
            let s = (x * x).sqrt_unit().unwrap();
            prop_assert_eq!(s * s, x * x);
        }

        #[test]
        fn adjugate_identity(e in proptest::array::uniform4(-1000i128..1000)) {
            let m = Mat2::from_ints(5, 10, [[e[0], e[1]], [e[2], e[3]]]);
            let prod = m.adj().mul(&m);
            let d = m.det();
            prop_assert_eq!(prod, Mat2::identity(5, 10).scale(d));
        }
    }
}

//! Rational definite quaternion algebras (a, b) and their elements.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{ramified_places, Place};
use crate::error::{Error, Result};

/// An element x0 + x1 i + x2 j + x3 k.
pub type Quat = [BigRational; 4];

pub fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn quat_from_ints(v: [i64; 4]) -> Quat {
    v.map(rat)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuatAlgebra {
    pub a: i64,
    pub b: i64,
    pub ramification: Vec<Place>,
}

impl QuatAlgebra {
    pub fn new(a: i64, b: i64) -> Self {
        QuatAlgebra { a, b, ramification: ramified_places(a, b) }
    }

    pub fn discriminant(&self) -> u64 {
        self.ramification
            .iter()
            .filter_map(|v| match v {
                Place::Finite(q) => Some(*q),
                Place::Infinite => None,
            })
            .product()
    }

    pub fn is_definite(&self) -> bool {
        self.ramification.contains(&Place::Infinite)
    }

    pub fn mul(&self, x: &Quat, y: &Quat) -> Quat {
        let a = rat(self.a);
        let b = rat(self.b);
        let ab = &a * &b;
        [
            &x[0] * &y[0] + &a * &x[1] * &y[1] + &b * &x[2] * &y[2] - &ab * &x[3] * &y[3],
            &x[0] * &y[1] + &x[1] * &y[0] - &b * &x[2] * &y[3] + &b * &x[3] * &y[2],
            &x[0] * &y[2] + &x[2] * &y[0] + &a * &x[1] * &y[3] - &a * &x[3] * &y[1],
            &x[0] * &y[3] + &x[3] * &y[0] + &x[1] * &y[2] - &x[2] * &y[1],
        ]
    }

    pub fn conj(&self, x: &Quat) -> Quat {
        [x[0].clone(), -&x[1], -&x[2], -&x[3]]
    }

    pub fn nrd(&self, x: &Quat) -> BigRational {
        let a = rat(self.a);
        let b = rat(self.b);
        &x[0] * &x[0] - &a * &x[1] * &x[1] - &b * &x[2] * &x[2] + &a * &b * &x[3] * &x[3]
    }

    pub fn trd(&self, x: &Quat) -> BigRational {
        &x[0] * rat(2)
    }

    pub fn one() -> Quat {
        [BigRational::one(), BigRational::zero(), BigRational::zero(), BigRational::zero()]
    }
}

/// A definite algebra ramified exactly at infinity and the given finite primes,
/// with a and b negative and prime to every integer in `avoid`.
pub fn construct_algebra(finite_ram: &[u64], avoid: &[u64]) -> Result<QuatAlgebra> {
    let mut target: Vec<Place> = vec![Place::Infinite];
    let mut fr = finite_ram.to_vec();
    fr.sort_unstable();
    target.extend(fr.iter().map(|&q| Place::Finite(q)));
    if target.len() % 2 == 1 {
        return Err(Error::Hypothesis(format!(
            "ramification set {target:?} has odd cardinality (indefinite case unsupported)"
        )));
    }
    for total in 2i64..2000 {
        for ma in 1..total {
            let (a, b) = (-ma, -(total - ma));
            if b > a {
                continue;
            }
            if avoid.iter().any(|&q| (a * b) % q as i64 == 0) {
                continue;
            }
            if ramified_places(a, b) == target {
                return Ok(QuatAlgebra::new(a, b));
            }
        }
    }
    Err(Error::Verification(format!("no algebra found for ramification {target:?}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn algebras_for_small_discriminants() {
        for (q, avoid) in [(2u64, vec![5u64]), (3, vec![5]), (11, vec![5]), (13, vec![5]), (7, vec![3, 5])] {
            let b = construct_algebra(&[q], &avoid).unwrap();
            assert_eq!(b.discriminant(), q);
            assert!(b.is_definite());
            for p in &avoid {
                assert_ne!((b.a * b.b) % *p as i64, 0);
            }
        }
        assert!(construct_algebra(&[3, 5], &[]).is_err());
    }

    proptest! {
        #[test]
        fn norm_is_multiplicative(x in proptest::array::uniform4(-9i64..9), y in proptest::array::uniform4(-9i64..9), a in -7i64..-1, b in -7i64..-1) {
            let alg = QuatAlgebra::new(a, b);
            let (qx, qy) = (quat_from_ints(x), quat_from_ints(y));
            let xy = alg.mul(&qx, &qy);
            prop_assert_eq!(alg.nrd(&xy), alg.nrd(&qx) * alg.nrd(&qy));
            // x * conj(x) = nrd(x).
            let n = alg.mul(&qx, &alg.conj(&qx));
            prop_assert_eq!(n[0].clone(), alg.nrd(&qx));
            prop_assert!(n[1..].iter().all(|c| c.is_zero()));
        }
    }
}

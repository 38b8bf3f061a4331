//! Orders in imaginary quadratic fields: binary quadratic forms, ring class
//! groups, and the tower of ring class groups of conductors c p^n.

pub mod group;
pub mod tower;

use serde::{Deserialize, Serialize};
use std::collections::HashMap;

use crate::arith::egcd;
use group::FiniteAbelianGroup;

/// Positive definite binary quadratic form a x^2 + b xy + c y^2.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Form {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl Form {
    pub fn new(a: i64, b: i64, c: i64) -> Self {
        Form { a, b, c }
    }

    /// The form with leading coefficient `a` and middle coefficient `b` of discriminant `disc`.
    pub fn from_ab(a: i64, b: i64, disc: i64) -> Self {
        let num = b as i128 * b as i128 - disc as i128;
        assert!(num % (4 * a as i128) == 0, "b^2 - disc not divisible by 4a");
        Form { a, b, c: (num / (4 * a as i128)) as i64 }
    }

    pub fn disc(&self) -> i64 {
        self.b * self.b - 4 * self.a * self.c
    }

    pub fn identity(disc: i64) -> Self {
        let b = disc.rem_euclid(2);
        Form::from_ab(1, b, disc)
    }

    pub fn is_reduced(&self) -> bool {
        -self.a < self.b && self.b <= self.a && self.a <= self.c && !(self.a == self.c && self.b < 0)
    }

    pub fn reduce(&self) -> Self {
        let disc = self.disc();
        let (mut a, mut b) = (self.a as i128, self.b as i128);
        let d = disc as i128;
        loop {
            // Normalise b into (-a, a].
            let two_a = 2 * a;
            let mut nb = b.rem_euclid(two_a);
            if nb > a {
                nb -= two_a;
            }
            b = nb;
            let c = (b * b - d) / (4 * a);
            if a > c {
                a = c;
                b = -b;
                continue;
            }
            if a == c && b < 0 {
                b = -b;
            }
            return Form { a: a as i64, b: b as i64, c: c as i64 };
        }
    }

    pub fn inverse(&self) -> Self {
        Form { a: self.a, b: -self.b, c: self.c }.reduce()
    }

    /// Dirichlet composition followed by reduction.
    pub fn compose(&self, o: &Form) -> Form {
        let disc = self.disc() as i128;
        assert_eq!(disc, o.disc() as i128, "composition of forms of different discriminant");
        let (a1, b1) = (self.a as i128, self.b as i128);
        let (a2, b2) = (o.a as i128, o.b as i128);
        let s = (b1 + b2) / 2;
        let (g1, x1, y1) = egcd(a1, a2);
        let (e, x2, y2) = egcd(g1, s);
        let (u, v, w) = (x1 * x2, y1 * x2, y2);
        let a3 = a1 * a2 / (e * e);
        let num = u * a1 * b2 + v * a2 * b1 + w * (b1 * b2 + disc) / 2;
        let b3 = (num / e).rem_euclid(2 * a3);
        let c3 = (b3 * b3 - disc) / (4 * a3);
        Form { a: a3 as i64, b: b3 as i64, c: c3 as i64 }.reduce()
    }

    pub fn is_primitive(&self) -> bool {
        crate::arith::gcd(crate::arith::gcd(self.a, self.b), self.c) == 1
    }
}

/// All reduced primitive forms of a negative discriminant.
pub fn reduced_forms(disc: i64) -> Vec<Form> {
    assert!(disc < 0 && disc.rem_euclid(4) <= 1);
    let mut out = Vec::new();
    let mut a = 1i64;
    while 3 * a * a <= -disc {
        for b in (-a + 1)..=a {
            if (b * b - disc) % (4 * a) != 0 {
                continue;
            }
            let f = Form::from_ab(a, b, disc);
            if f.is_reduced() && f.is_primitive() {
                out.push(f);
            }
        }
        a += 1;
    }
    out
}

/// A primitive integral ideal of O_K: the lattice [a, (-b + sqrt D)/2].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct OkIdeal {
    pub norm: i64,
    pub b: i64,
}

impl OkIdeal {
    /// Class of the ideal `self ∩ O_f` in Pic(O_f); requires gcd(norm, f) = 1.
    pub fn form_at_conductor(&self, f: i64, d_k: i64) -> Form {
        let disc = f * f * d_k;
        Form::from_ab(self.norm, f * self.b, disc).reduce()
    }
}

/// Primitive O_K-ideals of norm `a` (one per `b` mod 2a).
pub fn ideals_of_norm(a: i64, d_k: i64) -> Vec<OkIdeal> {
    (-a + 1..=a)
        .filter(|&b| (b - d_k).rem_euclid(2) == 0 && (b * b - d_k).rem_euclid(4 * a) == 0)
        .map(|b| OkIdeal { norm: a, b })
        .collect()
}

/// u_f = #O_f^x / 2.
pub fn half_unit_count(d_k: i64, f: i64) -> u64 {
    match (d_k, f) {
        (-4, 1) => 2,
        (-3, 1) => 3,
        _ => 1,
    }
}

/// Fundamental discriminant test.
pub fn is_fundamental_discriminant(d: i64) -> bool {
    if d >= 0 {
        return false;
    }
    let sqfree = |n: i64| crate::arith::factor(n.unsigned_abs()).iter().all(|&(_, e)| e == 1);
    match d.rem_euclid(4) {
        1 => sqfree(d),
        0 => {
            let m = d / 4;
            matches!(m.rem_euclid(4), 2 | 3) && sqfree(m)
        }
        _ => false,
    }
}

/// The class group Pic(O_f) of discriminant f^2 D as an abstract group.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RingClassGroup {
    pub conductor: i64,
    pub disc: i64,
    pub forms: Vec<Form>,
    pub group: FiniteAbelianGroup,
}

impl RingClassGroup {
    pub fn new(d_k: i64, f: i64) -> Self {
        let disc = f * f * d_k;
        let forms = reduced_forms(disc);
        let index: HashMap<Form, u32> = forms.iter().enumerate().map(|(i, f)| (*f, i as u32)).collect();
        let mul = forms
            .iter()
            .map(|x| forms.iter().map(|y| index[&x.compose(y)]).collect())
            .collect();
        let identity = index[&Form::identity(disc)];
        RingClassGroup { conductor: f, disc, forms, group: FiniteAbelianGroup::from_table(mul, identity) }
    }

    pub fn class_number(&self) -> usize {
        self.forms.len()
    }

    pub fn index_of(&self, f: &Form) -> u32 {
        let r = f.reduce();
        self.forms.iter().position(|x| *x == r).expect("form of matching discriminant") as u32
    }

    pub fn class_of_ideal(&self, id: &OkIdeal, d_k: i64) -> u32 {
        self.index_of(&id.form_at_conductor(self.conductor, d_k))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{factor, kronecker};
    use num_bigint::BigInt;
    use proptest::prelude::*;

    /// h(f^2 D) from the class number formula.
    fn class_number_oracle(d_k: i64, f: i64) -> i64 {
        let h0 = reduced_forms(d_k).len() as i64;
        let w = match d_k {
            -3 => 3,
            -4 => 2,
            _ => 1,
        };
        let mut num = h0 * f;
        let mut den = 1;
        for (q, _) in factor(f as u64) {
            num *= q as i64 - kronecker(d_k, q as i64) as i64;
            den *= q as i64;
        }
        let units = if f == 1 { 1 } else { w };
        num / den / units
    }

    /// Product of two ideals via lattices in the basis (1, w), w = (D + sqrt D)/2,
    /// read back as a reduced form.
    fn lattice_product_oracle(f1: &Form, f2: &Form) -> Form {
        let disc = f1.disc() as i128;
        // Elements x + y w with w^2 = disc*w - disc*(disc-1)/4.
        let gens = |f: &Form| -> [(i128, i128); 2] {
            // (-b + sqrt disc)/2 = (-b - disc)/2 + w
            [(f.a as i128, 0), ((-f.b as i128 - disc) / 2, 1)]
        };
        let mulq = |x: (i128, i128), y: (i128, i128)| {
            let n = disc * (disc - 1) / 4;
            (x.0 * y.0 - x.1 * y.1 * n, x.0 * y.1 + x.1 * y.0 + x.1 * y.1 * disc)
        };
        let mut rows = vec![];
        for x in gens(f1) {
            for y in gens(f2) {
                let z = mulq(x, y);
                rows.push(vec![BigInt::from(z.1), BigInt::from(z.0)]);
            }
        }
        let h = crate::lattice::from_big(&crate::lattice::hnf_big(&rows));
        // h = [[c1, r], [0, a]] : lattice spanned by (c1 w + r) and a.
        let (c1, r, a) = (h[0][0], h[0][1], h[1][1]);
        assert_eq!(a % c1, 0);
        let (an, rn) = (a / c1, r / c1);
        // Primitive part: [an, rn + w] = [an, (-b + sqrt)/2] with -b = 2 rn + disc.
        let b = -(2 * rn + disc);
        Form::from_ab(an as i64, b as i64, disc as i64).reduce()
    }

    #[test]
    fn class_numbers_match_formula() {
        for d in [-3i64, -4, -7, -8, -11, -15, -20, -23, -47, -84] {
            for f in 1..=12 {
                assert_eq!(reduced_forms(f * f * d).len() as i64, class_number_oracle(d, f), "D={d} f={f}");
            }
        }
        assert_eq!(RingClassGroup::new(-4, 25).class_number(), 10);
        assert_eq!(RingClassGroup::new(-4, 125).class_number(), 50);
    }

    #[test]
    fn fundamental_discriminants() {
        assert!(is_fundamental_discriminant(-4));
        assert!(is_fundamental_discriminant(-3));
        assert!(is_fundamental_discriminant(-8));
        assert!(!is_fundamental_discriminant(-12));
        assert!(!is_fundamental_discriminant(-16));
    }

    proptest! {
        #[test]
        fn composition_matches_ideal_multiplication(di in 0usize..6, f in 1i64..8, i in 0usize..1000, j in 0usize..1000) {
            let d_k = [-3i64, -4, -7, -8, -15, -23][di];
            let disc = f * f * d_k;
            let forms = reduced_forms(disc);
            let (x, y) = (forms[i % forms.len()], forms[j % forms.len()]);
            // Use representatives with coprime leading coefficients for the oracle.
            let x2 = prime_to_form(&x, y.a * f);
            prop_assert_eq!(x.compose(&y), lattice_product_oracle(&x2, &y));
        }
    }

    /// An equivalent form whose leading coefficient is prime to m.
    fn prime_to_form(f: &Form, m: i64) -> Form {
        for x in -6i64..=6 {
            for y in -6i64..=6 {
                if crate::arith::gcd(x, y) != 1 {
                    continue;
                }
                let a = f.a * x * x + f.b * x * y + f.c * y * y;
                if a > 0 && crate::arith::gcd(a, m) == 1 {
                    // Complete (x, y) to an SL2 matrix.
                    let (_, s, t) = egcd(x as i128, y as i128);
                    let (z, w) = (-(t as i64), s as i64);
                    let b = 2 * f.a * x * z + f.b * (x * w + y * z) + 2 * f.c * y * w;
                    return Form::from_ab(a, b, f.disc());
                }
            }
        }
        panic!("no coprime representative")
    }
}

//! Elementary number theory on machine integers, plus the p-adic and
//! cyclotomic coefficient rings used throughout.

pub mod cyclo;
pub mod padic;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

pub fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.unsigned_abs(), b.unsigned_abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a as i64
}

pub fn lcm(a: i64, b: i64) -> i64 {
    if a == 0 || b == 0 {
        return 0;
    }
    (a / gcd(a, b) * b).abs()
}

/// Returns `(g, x, y)` with `a*x + b*y = g = gcd(a, b) >= 0`.
pub fn egcd(a: i128, b: i128) -> (i128, i128, i128) {
    let (mut r0, mut r1) = (a, b);
    let (mut s0, mut s1) = (1i128, 0i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0.div_euclid(r1);
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 < 0 {
        (-r0, -s0, -t0)
    } else {
        (r0, s0, t0)
    }
}

pub fn mod_pow(base: u64, mut e: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let m128 = m as u128;
    let mut b = (base % m) as u128;
    let mut r = 1u128;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % m128;
        }
        b = b * b % m128;
        e >>= 1;
    }
    r as u64
}

pub fn mod_inv(a: i128, m: i128) -> Option<i128> {
    let (g, x, _) = egcd(a.rem_euclid(m), m);
    (g == 1).then(|| x.rem_euclid(m))
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = mod_pow(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = ((x as u128 * x as u128) % n as u128) as u64;
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Trial-division factorisation, adequate for the sizes met here.
pub fn factor(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n.is_multiple_of(p) {
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn prime_divisors(n: u64) -> Vec<u64> {
    factor(n).into_iter().map(|(p, _)| p).collect()
}

pub fn primes_up_to(n: usize) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let mut sieve = vec![true; n + 1];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2;
    while i * i <= n {
        if sieve[i] {
            let mut j = i * i;
            while j <= n {
                sieve[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    (0..=n).filter(|&k| sieve[k]).map(|k| k as u64).collect()
}

/// p-adic valuation of a nonzero integer.
pub fn valuation(mut n: i128, p: u64) -> u32 {
    assert!(n != 0, "valuation of zero");
    let p = p as i128;
    let mut v = 0;
    while n % p == 0 {
        n /= p;
        v += 1;
    }
    v
}

pub fn valuation_big(n: &BigInt, p: u64) -> u32 {
    assert!(!n.is_zero(), "valuation of zero");
    let pb = BigInt::from(p);
    let mut n = n.clone();
    let mut v = 0;
    while (&n % &pb).is_zero() {
        n /= &pb;
        v += 1;
    }
    v
}

/// Kronecker symbol (a/n).
pub fn kronecker(a: i64, n: i64) -> i32 {
    let (mut a, mut n) = (a as i128, n as i128);
    if n == 0 {
        return if a.abs() == 1 { 1 } else { 0 };
    }
    let mut k = 1i32;
    if n < 0 {
        n = -n;
        if a < 0 {
            k = -k;
        }
    }
    let tab2 = [0, 1, 0, -1, 0, -1, 0, 1];
    if a % 2 == 0 && n % 2 == 0 {
        return 0;
    }
    while n % 2 == 0 {
        n /= 2;
        k *= tab2[(a & 7) as usize];
    }
    a = a.rem_euclid(n);
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            k *= tab2[(n & 7) as usize];
        }
        if a & n & 2 != 0 {
            k = -k;
        }
        (a, n) = (n % a, a);
    }
    if n == 1 {
        k
    } else {
        0
    }
}

/// Square root of `a` modulo an odd prime `p`, if one exists (Tonelli-Shanks).
pub fn sqrt_mod_prime(a: i64, p: u64) -> Option<u64> {
    let a = a.rem_euclid(p as i64) as u64;
    if a == 0 {
        return Some(0);
    }
    if p == 2 {
        return Some(a);
    }
    if mod_pow(a, (p - 1) / 2, p) != 1 {
        return None;
    }
    let mut q = p - 1;
    let mut s = 0;
    while q.is_multiple_of(2) {
        q /= 2;
        s += 1;
    }
    let mut z = 2;
    while mod_pow(z, (p - 1) / 2, p) != p - 1 {
        z += 1;
    }
    let mulm = |x: u64, y: u64| ((x as u128 * y as u128) % p as u128) as u64;
    let mut m = s;
    let mut c = mod_pow(z, q, p);
    let mut t = mod_pow(a, q, p);
    let mut r = mod_pow(a, q.div_ceil(2), p);
    while t != 1 {
        let mut i = 0;
        let mut tt = t;
        while tt != 1 {
            tt = mulm(tt, tt);
            i += 1;
        }
        let mut b = c;
        for _ in 0..(m - i - 1) {
            b = mulm(b, b);
        }
        m = i;
        c = mulm(b, b);
        t = mulm(t, c);
        r = mulm(r, b);
    }
    Some(r.min(p - r))
}

/// Smallest primitive root modulo the prime `p`.
pub fn primitive_root(p: u64) -> u64 {
    if p == 2 {
        return 1;
    }
    let qs = prime_divisors(p - 1);
    (2..p)
        .find(|&g| qs.iter().all(|&q| mod_pow(g, (p - 1) / q, p) != 1))
        .expect("prime modulus has a primitive root")
}

/// A place of Q.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize, serde::Deserialize)]
pub enum Place {
    Infinite,
    Finite(u64),
}

/// Hilbert symbol (a, b)_v for nonzero integers.
pub fn hilbert_symbol(a: i64, b: i64, v: Place) -> i32 {
    assert!(a != 0 && b != 0);
    match v {
        Place::Infinite => {
            if a < 0 && b < 0 {
                -1
            } else {
                1
            }
        }
        Place::Finite(p) => {
            let al = valuation(a as i128, p);
            let be = valuation(b as i128, p);
            let u = a / (p as i64).pow(al);
            let w = b / (p as i64).pow(be);
            if p == 2 {
                let eps = |x: i64| ((x.rem_euclid(4) - 1) / 2) as u32 & 1;
                let omega = |x: i64| {
                    let r = x.rem_euclid(8);
                    if r == 3 || r == 5 {
                        1u32
                    } else {
                        0
                    }
                };
                let e = eps(u) * eps(w) + al * omega(w) + be * omega(u);
                if e.is_multiple_of(2) {
                    1
                } else {
                    -1
                }
            } else {
                let mut s = if (al * be) % 2 == 1 && p % 4 == 3 { -1 } else { 1 };
                if be % 2 == 1 {
                    s *= kronecker(u, p as i64);
                }
                if al % 2 == 1 {
                    s *= kronecker(w, p as i64);
                }
                s
            }
        }
    }
}

/// Hilbert symbol for nonzero rationals, by clearing square denominators.
pub fn hilbert_symbol_q(a: &BigRational, b: &BigRational, v: Place) -> i32 {
    let clear = |x: &BigRational| -> i64 {
        let n = x.numer() * x.denom();
        n.to_i64().expect("Hilbert symbol argument fits in i64")
    };
    hilbert_symbol(clear(a), clear(b), v)
}

/// Set of places where the quaternion algebra (a, b) ramifies.
pub fn ramified_places(a: i64, b: i64) -> Vec<Place> {
    let mut out = Vec::new();
    if hilbert_symbol(a, b, Place::Infinite) == -1 {
        out.push(Place::Infinite);
    }
    let mut ps = prime_divisors(2 * a.unsigned_abs() * b.unsigned_abs());
    ps.sort_unstable();
    for p in ps {
        if hilbert_symbol(a, b, Place::Finite(p)) == -1 {
            out.push(Place::Finite(p));
        }
    }
    out
}

pub fn big_to_i128(x: &BigInt) -> i128 {
    x.to_i128().expect("integer overflow converting BigInt to i128")
}

/// A Dirichlet character modulo an odd prime p, psi(g0) = zeta_d^k for the
/// smallest primitive root g0 and k prime to d.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct DirichletModP {
    pub p: u64,
    pub order: u64,
    pub k: u64,
    pub g0: u64,
    dlog: Vec<u64>,
}

impl DirichletModP {
    pub fn new(p: u64, order: u64, k: u64) -> Self {
        assert!((p - 1).is_multiple_of(order), "order must divide p - 1");
        assert!(order == 1 || gcd(order as i64, k as i64) == 1);
        let g0 = primitive_root(p);
        let mut dlog = vec![0u64; p as usize];
        let mut x = 1u64;
        for e in 0..p - 1 {
            dlog[x as usize] = e;
            x = x * g0 % p;
        }
        DirichletModP { p, order, k: k % order.max(1), g0, dlog }
    }

    /// The unique quadratic character mod p.
    pub fn quadratic(p: u64) -> Self {
        DirichletModP::new(p, 2, 1)
    }

    pub fn trivial(p: u64) -> Self {
        DirichletModP::new(p, 1, 0)
    }

    pub fn discrete_log(&self, a: i64) -> u64 {
        let r = a.rem_euclid(self.p as i64) as usize;
        assert!(r != 0, "discrete log of a multiple of p");
        self.dlog[r]
    }

    /// psi(a) as an exponent of zeta_d.
    pub fn exponent(&self, a: i64) -> u64 {
        if self.order == 1 {
            return 0;
        }
        self.discrete_log(a) * self.k % self.order
    }

    pub fn square(&self) -> Self {
        let ord = self.order / gcd(self.order as i64, 2) as u64;
        let k = if ord == 1 { 0 } else { (2 * self.k) % self.order / (self.order / ord) };
        DirichletModP::new(self.p, ord, k)
    }

    pub fn inverse(&self) -> Self {
        DirichletModP::new(self.p, self.order, (self.order - self.k % self.order.max(1)) % self.order.max(1))
    }

    pub fn is_quadratic(&self) -> bool {
        self.order == 2
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn legendre_naive(a: i64, p: u64) -> i32 {
        let a = a.rem_euclid(p as i64) as u64;
        if a == 0 {
            return 0;
        }
        if (1..p).any(|x| x * x % p == a) {
            1
        } else {
            -1
        }
    }

    #[test]
    fn kronecker_small_table() {
        assert_eq!(kronecker(-4, 5), 1);
        assert_eq!(kronecker(-4, 3), -1);
        assert_eq!(kronecker(-4, 2), 0);
        assert_eq!(kronecker(-3, 5), -1);
        assert_eq!(kronecker(-3, 2), -1);
        assert_eq!(kronecker(5, 2), -1);
        assert_eq!(kronecker(-7, 2), 1);
    }

    #[test]
    fn hilbert_symbols_of_known_algebras() {
        assert_eq!(ramified_places(-1, -1), vec![Place::Infinite, Place::Finite(2)]);
        assert_eq!(ramified_places(-1, -3), vec![Place::Infinite, Place::Finite(3)]);
        assert_eq!(ramified_places(-1, -11), vec![Place::Infinite, Place::Finite(11)]);
        assert_eq!(ramified_places(-2, -5), vec![Place::Infinite, Place::Finite(5)]);
    }

    #[test]
    fn tonelli_shanks_roots() {
        for p in primes_up_to(200).into_iter().skip(1) {
            for a in 0..p as i64 {
                match sqrt_mod_prime(a, p) {
                    Some(r) => assert_eq!((r * r) % p, a as u64),
                    None => assert_eq!(legendre_naive(a, p), -1),
                }
            }
        }
    }

    #[test]
    fn dirichlet_characters_mod_p() {
        let psi = DirichletModP::new(13, 6, 1);
        for a in 1..13i64 {
            for b in 1..13i64 {
                assert_eq!(psi.exponent(a * b), (psi.exponent(a) + psi.exponent(b)) % 6);
            }
        }
        let sq = psi.square();
        assert_eq!(sq.order, 3);
        for a in 1..13i64 {
            assert_eq!(sq.exponent(a) * 2 % 6, 2 * psi.exponent(a) % 6);
            assert_eq!((psi.exponent(a) + psi.inverse().exponent(a)) % 6, 0);
        }
        let q = DirichletModP::quadratic(5);
        assert_eq!((1..5).map(|a| q.exponent(a)).collect::<Vec<_>>(), vec![0, 1, 1, 0]);
    }

    #[test]
    fn primitive_roots() {
        assert_eq!(primitive_root(5), 2);
        assert_eq!(primitive_root(7), 3);
        assert_eq!(primitive_root(11), 2);
    }

    proptest! {
        #[test]
        fn kronecker_matches_euler_criterion(a in -500i64..500, pi in 1usize..40) {
            let p = primes_up_to(200)[pi];
            prop_assert_eq!(kronecker(a, p as i64), legendre_naive(a, p));
        }

        #[test]
        fn hilbert_product_formula(a in -60i64..60, b in -60i64..60) {
            prop_assume!(a != 0 && b != 0);
            let mut prod = hilbert_symbol(a, b, Place::Infinite);
            for p in prime_divisors(2 * a.unsigned_abs() * b.unsigned_abs()) {
                prod *= hilbert_symbol(a, b, Place::Finite(p));
            }
            prop_assert_eq!(prod, 1);
        }

        #[test]
        fn egcd_bezout(a in -10_000i128..10_000, b in -10_000i128..10_000) {
            let (g, x, y) = egcd(a, b);
            prop_assert_eq!(a * x + b * y, g);
            prop_assert_eq!(g, gcd(a as i64, b as i64) as i128);
        }
    }
}

//! Finite abelian groups given by a multiplication table, their
//! decomposition into cyclic factors, and their characters.

use serde::{Deserialize, Serialize};

use crate::arith::{factor, lcm};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FiniteAbelianGroup {
    pub mul: Vec<Vec<u32>>,
    pub identity: u32,
    /// Generators of a direct decomposition, with their orders.
    pub basis: Vec<(u32, u64)>,
    /// Exponent vector of each element in the basis.
    pub coords: Vec<Vec<u64>>,
}

impl FiniteAbelianGroup {
    pub fn from_table(mul: Vec<Vec<u32>>, identity: u32) -> Self {
        let mut g = FiniteAbelianGroup { mul, identity, basis: vec![], coords: vec![] };
        g.decompose();
        g
    }

    pub fn order(&self) -> usize {
        self.mul.len()
    }

    pub fn op(&self, a: u32, b: u32) -> u32 {
        self.mul[a as usize][b as usize]
    }

    pub fn pow(&self, a: u32, mut e: u64) -> u32 {
        let mut r = self.identity;
        let mut b = a;
        while e > 0 {
            if e & 1 == 1 {
                r = self.op(r, b);
            }
            b = self.op(b, b);
            e >>= 1;
        }
        r
    }

    pub fn inv(&self, a: u32) -> u32 {
        let o = self.elem_order(a);
        self.pow(a, o - 1)
    }

    pub fn elem_order(&self, a: u32) -> u64 {
        let mut x = a;
        let mut k = 1;
        while x != self.identity {
            x = self.op(x, a);
            k += 1;
        }
        k
    }

    pub fn exponent(&self) -> u64 {
        self.basis.iter().fold(1u64, |acc, &(_, n)| lcm(acc as i64, n as i64) as u64)
    }

    /// Element with the given exponent vector.
    pub fn from_coords(&self, c: &[u64]) -> u32 {
        let mut x = self.identity;
        for (&(b, _), &e) in self.basis.iter().zip(c) {
            x = self.op(x, self.pow(b, e));
        }
        x
    }

    fn decompose(&mut self) {
        let n = self.order() as u64;
        let mut basis: Vec<(u32, u64)> = Vec::new();
        for (q, _) in factor(n) {
            let sylow: Vec<u32> = (0..n as u32).filter(|&x| is_power_of(self.elem_order(x), q)).collect();
            let mut local: Vec<(u32, u64)> = Vec::new();
            // Map element -> exponents over `local`.
            let mut span: Vec<Option<Vec<u64>>> = vec![None; n as usize];
            span[self.identity as usize] = Some(vec![]);
            let mut span_size = 1usize;
            while span_size < sylow.len() {
                let (y, m) = sylow
                    .iter()
                    .filter(|&&y| span[y as usize].is_none())
                    .map(|&y| (y, self.quotient_order(y, &span)))
                    .max_by_key(|&(y, m)| (m, std::cmp::Reverse(y)))
                    .expect("element outside span");
                let h = self.pow(y, m);
                let t = span[h as usize].clone().expect("power lies in span");
                let mut y2 = y;
                for (i, &(b, bo)) in local.iter().enumerate() {
                    let ti = t.get(i).copied().unwrap_or(0);
                    assert_eq!(ti % m, 0, "non-split extension in decomposition");
                    let e = (bo - (ti / m) % bo) % bo;
                    y2 = self.op(y2, self.pow(b, e));
                }
                debug_assert_eq!(self.elem_order(y2), m);
                local.push((y2, m));
                let old: Vec<(u32, Vec<u64>)> =
                    span.iter().enumerate().filter_map(|(x, v)| v.clone().map(|v| (x as u32, v))).collect();
                let k = local.len();
                let mut yp = self.identity;
                for e in 0..m {
                    for (x, v) in &old {
                        let z = self.op(*x, yp);
                        let mut w = v.clone();
                        w.resize(k, 0);
                        w[k - 1] = e;
                        span[z as usize] = Some(w);
                    }
                    yp = self.op(yp, y2);
                }
                span_size = span.iter().filter(|s| s.is_some()).count();
            }
            basis.extend(local);
        }
        self.basis = basis;
        let mut coords = vec![vec![]; n as usize];
        let mut acc: Vec<(u32, Vec<u64>)> = vec![(self.identity, vec![])];
        for (i, &(b, bo)) in self.basis.iter().enumerate() {
            let mut next = Vec::with_capacity(acc.len() * bo as usize);
            for (x, v) in &acc {
                let mut y = *x;
                for e in 0..bo {
                    let mut w = v.clone();
                    w.resize(i + 1, 0);
                    w[i] = e;
                    next.push((y, w));
                    y = self.op(y, b);
                }
            }
            acc = next;
        }
        assert_eq!(acc.len(), n as usize, "decomposition does not cover the group");
        for (x, v) in acc {
            coords[x as usize] = v;
        }
        self.coords = coords;
    }

    fn quotient_order(&self, y: u32, span: &[Option<Vec<u64>>]) -> u64 {
        let mut x = y;
        let mut k = 1;
        while span[x as usize].is_none() {
            x = self.op(x, y);
            k += 1;
        }
        k
    }

    /// All characters, as exponent vectors on the basis.
    pub fn all_characters(&self) -> Vec<Character> {
        let mut out = vec![vec![]];
        for &(_, n) in &self.basis {
            let mut next = Vec::new();
            for v in &out {
                for k in 0..n {
                    let mut w: Vec<u64> = v.clone();
                    w.push(k);
                    next.push(w);
                }
            }
            out = next;
        }
        out.into_iter().map(|k| Character { k }).collect()
    }

    /// chi(x) as an exponent of zeta_E, E the group exponent.
    pub fn char_value(&self, chi: &Character, x: u32) -> u64 {
        let e = self.exponent();
        let c = &self.coords[x as usize];
        self.basis
            .iter()
            .zip(&chi.k)
            .zip(c)
            .map(|((&(_, n), &k), &ci)| k * ci % n * (e / n))
            .sum::<u64>()
            % e
    }

    /// The character with chi(x) = zeta_E^{f(x)}; `f` must be a homomorphism to Z/E.
    pub fn character_from_fn(&self, f: impl Fn(u32) -> u64) -> Character {
        let e = self.exponent();
        let k = self.basis.iter().map(|&(b, n)| (f(b) % e) / (e / n)).collect();
        let chi = Character { k };
        debug_assert!((0..self.order() as u32).all(|x| self.char_value(&chi, x) == f(x) % e));
        chi
    }

    pub fn char_order(&self, chi: &Character) -> u64 {
        self.basis
            .iter()
            .zip(&chi.k)
            .fold(1u64, |acc, (&(_, n), &k)| lcm(acc as i64, (n / crate::arith::gcd(n as i64, k as i64) as u64) as i64) as u64)
    }
}

fn is_power_of(mut x: u64, q: u64) -> bool {
    while x.is_multiple_of(q) {
        x /= q;
    }
    x == 1
}

/// A character given by exponents on the decomposition basis of its group.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Character {
    pub k: Vec<u64>,
}

//! The tower of ring class groups G_n = Pic(O_{c p^n}) together with the
//! twisted groups G~_n, realised as the image of ideals in G_n x Im(psi).

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use super::group::FiniteAbelianGroup;
use super::{ideals_of_norm, OkIdeal, RingClassGroup};
use crate::arith::{gcd, DirichletModP};
use crate::error::{Error, Result};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TowerLevel {
    pub n: u32,
    pub pic: RingClassGroup,
    /// Elements of G~_n as (class in G_n, exponent of psi). At level 0 the
    /// psi-coordinate is dropped and G~_0 is G_0.
    pub elems: Vec<(u32, u64)>,
    pub tilde: FiniteAbelianGroup,
    /// A representative O_K-ideal for each element of G~_n.
    pub reps: Vec<OkIdeal>,
    /// Projection G~_n -> G~_{n-1}; empty at level 0.
    pub proj: Vec<u32>,
}

impl TowerLevel {
    pub fn order(&self) -> usize {
        self.elems.len()
    }

    pub fn index_of(&self, class: u32, s: u64) -> Option<u32> {
        self.elems.binary_search(&(class, s)).ok().map(|i| i as u32)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Tower {
    pub d_k: i64,
    pub c: i64,
    pub p: u64,
    pub psi: DirichletModP,
    /// Representative ideals have norm prime to this integer (and to c p D).
    pub avoid: i64,
    pub levels: Vec<TowerLevel>,
}

impl Tower {
    pub fn new(d_k: i64, c: i64, p: u64, psi: DirichletModP, avoid: i64, n_max: u32) -> Result<Self> {
        if !super::is_fundamental_discriminant(d_k) {
            return Err(Error::InvalidInput(format!("{d_k} is not a negative fundamental discriminant")));
        }
        if c < 1 || gcd(c, p as i64) != 1 {
            return Err(Error::InvalidInput(format!("conductor c = {c} must be positive and prime to p")));
        }
        let avoid_all = avoid.abs().max(1) * c * p as i64 * d_k.abs();
        let mut levels = Vec::new();
        for n in 0..=n_max {
            let f = c * (p as i64).pow(n);
            let pic = RingClassGroup::new(d_k, f);
            let d = psi.order;
            let target = if n == 0 {
                pic.class_number()
            } else {
                pic.class_number() * psi.square().order as usize
            };
            let mut found: BTreeMap<(u32, u64), OkIdeal> = BTreeMap::new();
            let mut a = 1i64;
            while found.len() < target {
                if gcd(a, avoid_all) == 1 {
                    for id in ideals_of_norm(a, d_k) {
                        let g = pic.class_of_ideal(&id, d_k);
                        let s = if n == 0 { 0 } else { psi.exponent(a) };
                        found.entry((g, s)).or_insert(id);
                    }
                }
                a += 1;
                if a > 1_000_000 {
                    return Err(Error::Verification(format!("could not populate G~_{n}")));
                }
            }
            let elems: Vec<(u32, u64)> = found.keys().copied().collect();
            let reps: Vec<OkIdeal> = found.values().copied().collect();
            let idx = |key: (u32, u64)| elems.binary_search(&key).expect("closed under products") as u32;
            let mul: Vec<Vec<u32>> = elems
                .iter()
                .map(|&(g1, s1)| {
                    elems
                        .iter()
                        .map(|&(g2, s2)| {
                            let g = pic.group.op(g1, g2);
                            let s = if n == 0 { 0 } else { (s1 + s2) % d };
                            idx((g, s))
                        })
                        .collect()
                })
                .collect();
            let identity = idx((pic.group.identity, 0));
            let tilde = FiniteAbelianGroup::from_table(mul, identity);
            let proj = if n == 0 {
                vec![]
            } else {
                let prev: &TowerLevel = &levels[n as usize - 1];
                reps.iter()
                    .map(|id| {
                        let g = prev.pic.class_of_ideal(id, d_k);
                        let s = if n == 1 { 0 } else { psi.exponent(id.norm) };
                        prev.index_of(g, s).expect("projection lands in G~_{n-1}")
                    })
                    .collect()
            };
            levels.push(TowerLevel { n, pic, elems, tilde, reps, proj });
        }
        Ok(Tower { d_k, c, p, psi, avoid: avoid_all, levels })
    }

    pub fn level(&self, n: u32) -> &TowerLevel {
        &self.levels[n as usize]
    }

    pub fn n_max(&self) -> u32 {
        self.levels.len() as u32 - 1
    }

    /// psi(sigma) for sigma in G~_n as an exponent of zeta_d (n >= 1).
    pub fn psi_exponent(&self, n: u32, sigma: u32) -> u64 {
        self.level(n).elems[sigma as usize].1
    }

    /// The image of sigma in G_n.
    pub fn class_of(&self, n: u32, sigma: u32) -> u32 {
        self.level(n).elems[sigma as usize].0
    }

    /// Projection from level n down to level m <= n.
    pub fn project(&self, n: u32, m: u32, mut sigma: u32) -> u32 {
        let mut k = n;
        while k > m {
            sigma = self.level(k).proj[sigma as usize];
            k -= 1;
        }
        sigma
    }

    /// Kernel of G~_{n+1} -> G~_n as a list of elements.
    pub fn kernel(&self, n: u32) -> Vec<u32> {
        let up = self.level(n + 1);
        let e = self.level(n).tilde.identity;
        (0..up.order() as u32).filter(|&t| up.proj[t as usize] == e).collect()
    }

    /// The fibre over sigma in G~_n inside G~_{n+1}.
    pub fn fibre(&self, n: u32, sigma: u32) -> Vec<u32> {
        let up = self.level(n + 1);
        (0..up.order() as u32).filter(|&t| up.proj[t as usize] == sigma).collect()
    }

    /// Class in G~_n of an arbitrary O_K-ideal of norm prime to the avoided primes.
    pub fn element_of_ideal(&self, n: u32, id: &OkIdeal) -> u32 {
        let lv = self.level(n);
        let g = lv.pic.class_of_ideal(id, self.d_k);
        let s = if n == 0 { 0 } else { self.psi.exponent(id.norm) };
        lv.index_of(g, s).expect("ideal class lies in G~_n")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::kronecker;

    #[test]
    fn running_example_tower_sizes() {
        let t = Tower::new(-4, 1, 5, DirichletModP::quadratic(5), 3, 3).unwrap();
        assert_eq!(t.level(0).order(), 1);
        assert_eq!(t.level(1).order(), 2);
        assert_eq!(t.level(2).order(), 10);
        assert_eq!(t.level(3).order(), 50);
        for n in 1..3 {
            assert_eq!(t.kernel(n).len(), 5);
        }
        // Level 1 over level 0: (p - (D/p)) / u_0 with u_0 = 2 for D = -4.
        assert_eq!(t.kernel(0).len(), ((5 - kronecker(-4, 5)) / 2) as usize);
    }

    #[test]
    fn projections_are_homomorphisms() {
        let t = Tower::new(-3, 1, 5, DirichletModP::quadratic(5), 11, 2).unwrap();
        for n in 1..=2u32 {
            let (up, down) = (t.level(n), t.level(n - 1));
            for a in 0..up.order() as u32 {
                for b in 0..up.order() as u32 {
                    let lhs = up.proj[up.tilde.op(a, b) as usize];
                    let rhs = down.tilde.op(up.proj[a as usize], up.proj[b as usize]);
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }

    #[test]
    fn higher_order_psi_enlarges_the_group() {
        let psi = DirichletModP::new(13, 4, 1);
        let t = Tower::new(-4, 1, 13, psi, 1, 1).unwrap();
        assert_eq!(t.level(1).order(), t.level(1).pic.class_number() * 2);
    }
}

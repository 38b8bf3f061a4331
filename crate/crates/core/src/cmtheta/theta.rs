//! Group-ring elements over G~_n: theta_n, its untwisted version and L_n.

use serde::{Deserialize, Serialize};

use super::{psi_exact, psi_exponent, regularize, Family, Setup};
use crate::brandt::eigen::QuatEigenform;
use crate::error::Result;
use crate::arith::cyclo::Coeff;
use crate::arith::padic::Zpn;
use crate::brandt::eigen::PadicEmbedding;
use crate::brandt::Cyc;
use crate::quadorders::tower::Tower;

/// sum_sigma coeffs[sigma] sigma in C[G~_n].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupRingElt<C> {
    pub n: u32,
    pub coeffs: Vec<C>,
}

impl<C: Coeff> GroupRingElt<C> {
    /// Image under G~_n -> G~_{n-1}.
    pub fn pushforward(&self, tower: &Tower) -> GroupRingElt<C> {
        let n = self.n;
        let lower = tower.level(n - 1).order();
        let mut out = vec![self.coeffs[0].zero_like(); lower];
        for (s, c) in self.coeffs.iter().enumerate() {
            let t = tower.level(n).proj[s] as usize;
            out[t] = out[t].c_add(c);
        }
        GroupRingElt { n: n - 1, coeffs: out }
    }

    /// The involution sigma -> sigma^{-1}.
    pub fn star(&self, tower: &Tower) -> GroupRingElt<C> {
        let g = &tower.level(self.n).tilde;
        let mut out = vec![self.coeffs[0].zero_like(); self.coeffs.len()];
        for (s, c) in self.coeffs.iter().enumerate() {
            out[g.inv(s as u32) as usize] = c.clone();
        }
        GroupRingElt { n: self.n, coeffs: out }
    }

    /// Product in the group ring.
    pub fn convolve(&self, o: &GroupRingElt<C>, tower: &Tower) -> GroupRingElt<C> {
        let g = &tower.level(self.n).tilde;
        let mut out = vec![self.coeffs[0].zero_like(); self.coeffs.len()];
        for (a, x) in self.coeffs.iter().enumerate() {
            if x.c_is_zero() {
                continue;
            }
            for (b, y) in o.coeffs.iter().enumerate() {
                let k = g.op(a as u32, b as u32) as usize;
                out[k] = out[k].c_add(&x.c_mul(y));
            }
        }
        GroupRingElt { n: self.n, coeffs: out }
    }

    /// Multiply by the group element tau.
    pub fn translate(&self, tau: u32, tower: &Tower) -> GroupRingElt<C> {
        let g = &tower.level(self.n).tilde;
        let mut out = vec![self.coeffs[0].zero_like(); self.coeffs.len()];
        for (s, c) in self.coeffs.iter().enumerate() {
            out[g.op(s as u32, tau) as usize] = c.clone();
        }
        GroupRingElt { n: self.n, coeffs: out }
    }

    pub fn scale(&self, s: &C) -> GroupRingElt<C> {
        GroupRingElt { n: self.n, coeffs: self.coeffs.iter().map(|c| c.c_mul(s)).collect() }
    }
}

/// theta~_n = sum zeta_n^sigma sigma.
pub fn theta_tilde(fam: &Family, n: u32) -> GroupRingElt<Zpn> {
    GroupRingElt { n, coeffs: fam.zeta_at(n).to_vec() }
}

/// theta_n = sum psi(sigma) zeta_n^sigma sigma, with psi read through the p-adic embedding.
pub fn theta(fam: &Family, tower: &Tower, emb: &PadicEmbedding, n: u32) -> GroupRingElt<Zpn> {
    let coeffs = fam
        .zeta_at(n)
        .iter()
        .enumerate()
        .map(|(s, z)| emb.zeta.pow(psi_exponent(tower, n, s as u32)) * *z)
        .collect();
    GroupRingElt { n, coeffs }
}

/// Exact theta_n in Q(zeta_d)[G~_n], when the regularised values are exact.
pub fn theta_exact(fam: &Family, tower: &Tower, n: u32) -> Option<GroupRingElt<Cyc>> {
    let z = fam.exact_at(n)?;
    let coeffs = z.iter().enumerate().map(|(s, v)| psi_exact(tower, n, s as u32).mul(v)).collect();
    Some(GroupRingElt { n, coeffs })
}

/// L_n = theta_n theta_n^* with the pairing taken to be multiplication.
pub fn l_element<C: Coeff>(th: &GroupRingElt<C>, tower: &Tower) -> GroupRingElt<C> {
    th.convolve(&th.star(tower), tower)
}

/// Recompute L_n with the CM points based at sigma_0 and compare with psi(sigma_0)^{-2} L_n.
pub fn base_point_covariance(
    setup: &Setup,
    g: &QuatEigenform,
    fam: &Family,
    sigma0: u32,
    n: u32,
) -> Result<bool> {
    let tower = setup.tower;
    let emb = &g.embedding;
    let base = tower.level(n).reps[sigma0 as usize];
    let moved = regularize(setup, g, Some(&base), None)?;
    let l = l_element(&theta(fam, tower, emb, n), tower);
    let l_moved = l_element(&theta(&moved, tower, emb, n), tower);
    let psi0 = emb.zeta.pow(psi_exponent(tower, n, sigma0));
    let factor = (psi0 * psi0).inv()?;
    Ok(l_moved == l.scale(&factor))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadorders::tower::Tower;
    use crate::arith::DirichletModP;
    use proptest::prelude::*;

    fn tower() -> Tower {
        Tower::new(-4, 1, 5, DirichletModP::quadratic(5), 3, 2).unwrap()
    }

    proptest! {
        #[test]
        fn l_element_is_star_symmetric(v in proptest::collection::vec(0i128..625, 10)) {
            let t = tower();
            let th = GroupRingElt { n: 2, coeffs: v.iter().map(|&x| Zpn::new(5, 4, x)).collect() };
            let l = l_element(&th, &t);
            prop_assert_eq!(l.star(&t), l.clone());
            // Identity coefficient is the sum of squares.
            let e = t.level(2).tilde.identity as usize;
            let s = th.coeffs.iter().fold(Zpn::zero(5, 4), |a, x| a + *x * *x);
            prop_assert_eq!(l.coeffs[e], s);
        }

        #[test]
        fn pushforward_is_a_ring_map(v in proptest::collection::vec(0i128..625, 10), w in proptest::collection::vec(0i128..625, 10)) {
            let t = tower();
            let a = GroupRingElt { n: 2, coeffs: v.iter().map(|&x| Zpn::new(5, 4, x)).collect() };
            let b = GroupRingElt { n: 2, coeffs: w.iter().map(|&x| Zpn::new(5, 4, x)).collect() };
            prop_assert_eq!(a.convolve(&b, &t).pushforward(&t), a.pushforward(&t).convolve(&b.pushforward(&t), &t));
        }
    }
}

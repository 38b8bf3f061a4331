//! Characters of the ring class groups evaluated on theta_n and L_n, the
//! multiplier e_p, and the comparison with complex L-values.

pub mod report;

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::arith::cyclo::{rat_to_f64, Cyclotomic};
use crate::arith::lcm;
use crate::arith::padic::Zpn;
use crate::brandt::eigen::PadicEmbedding;
use crate::brandt::Cyc;
use crate::cmtheta::theta::GroupRingElt;
use crate::cmtheta::{psi_exponent, Family, PrimeType};
use crate::error::{Error, Result};
use crate::quadorders::group::Character;
use crate::quadorders::tower::Tower;
use crate::quadorders::OkIdeal;

pub type PadicCyc = Cyclotomic<Zpn>;

/// A character of G_n = Pic(O_{c p^n}), as exponents on the basis of that group.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct RingCharacter {
    pub n: u32,
    pub k: Vec<u64>,
}

impl RingCharacter {
    fn character(&self) -> Character {
        Character { k: self.k.clone() }
    }

    /// Exponent E of G_n; values of chi are powers of zeta_E.
    pub fn value_order(&self, tower: &Tower) -> u32 {
        tower.level(self.n).pic.group.exponent() as u32
    }

    pub fn order(&self, tower: &Tower) -> u64 {
        tower.level(self.n).pic.group.char_order(&self.character())
    }

    pub fn inverse(&self, tower: &Tower) -> RingCharacter {
        let basis = &tower.level(self.n).pic.group.basis;
        let k = self.k.iter().zip(basis).map(|(&k, &(_, m))| (m - k) % m).collect();
        RingCharacter { n: self.n, k }
    }

    /// chi(sigma) for sigma in G~_m, m >= n, as an exponent of zeta_E.
    pub fn exponent_at(&self, tower: &Tower, m: u32, sigma: u32) -> u64 {
        let below = tower.project(m, self.n, sigma);
        let class = tower.class_of(self.n, below);
        tower.level(self.n).pic.group.char_value(&self.character(), class)
    }

    /// chi on an O_K-ideal prime to c p D, as a complex number.
    pub fn on_ideal(&self, tower: &Tower, id: &OkIdeal) -> Complex64 {
        let pic = &tower.level(self.n).pic;
        let v = pic.group.char_value(&self.character(), pic.class_of_ideal(id, tower.d_k));
        Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * v as f64 / self.value_order(tower) as f64)
    }

    fn check_level(&self, tower: &Tower, m: u32) -> Result<()> {
        if self.n > m || self.n > tower.n_max() {
            return Err(Error::InvalidInput(format!(
                "character of level {} cannot be evaluated at level {m} (n_max = {})",
                self.n,
                tower.n_max()
            )));
        }
        let basis = &tower.level(self.n).pic.group.basis;
        if self.k.len() != basis.len() || self.k.iter().zip(basis).any(|(&k, &(_, o))| k >= o) {
            return Err(Error::InvalidInput(format!("{:?} is not a character of G_{}", self.k, self.n)));
        }
        Ok(())
    }

    /// Smallest m such that chi (psi o N) is trivial on ker(G~_N -> G~_m), N = max(n, 1).
    pub fn tilde_level(&self, tower: &Tower) -> Result<u32> {
        let top = self.n.max(1);
        self.check_level(tower, top)?;
        let e = self.value_order(tower) as u64;
        let d = tower.psi.order.max(1);
        let l = lcm(e as i64, d as i64) as u64;
        let g = &tower.level(top).tilde;
        let value = |s: u32| (self.exponent_at(tower, top, s) * (l / e) + tower.psi_exponent(top, s) * (l / d)) % l;
        for m in 0..top {
            let id = tower.level(m).tilde.identity;
            let trivial = (0..g.order() as u32).filter(|&s| tower.project(top, m, s) == id).all(|s| value(s) == 0);
            if trivial {
                return Ok(m);
            }
        }
        Ok(top)
    }

    /// chi~ has conductor exactly p^n, so p does not lie in S(chi).
    pub fn is_good(&self, tower: &Tower) -> Result<bool> {
        Ok(self.n >= 1 && self.tilde_level(tower)? == self.n)
    }
}

pub fn characters(tower: &Tower, n: u32) -> Vec<RingCharacter> {
    tower.level(n).pic.group.all_characters().into_iter().map(|c| RingCharacter { n, k: c.k }).collect()
}

pub fn good_characters(tower: &Tower, n: u32) -> Result<Vec<RingCharacter>> {
    let mut out = Vec::new();
    for chi in characters(tower, n) {
        if chi.is_good(tower)? {
            out.push(chi);
        }
    }
    Ok(out)
}

/// sum_sigma chi(sigma) x(sigma) in (Z/p^N)[zeta_E].
pub fn eval_padic(tower: &Tower, chi: &RingCharacter, x: &GroupRingElt<Zpn>) -> Result<PadicCyc> {
    chi.check_level(tower, x.n)?;
    let e = chi.value_order(tower);
    let template = x.coeffs[0];
    Ok(Cyclotomic::from_power_sum(
        e,
        &template,
        x.coeffs.iter().enumerate().map(|(s, c)| (chi.exponent_at(tower, x.n, s as u32), *c)),
    ))
}

/// sum_sigma chi(sigma) x(sigma) in Q(zeta_L), L = lcm(E, d).
pub fn eval_exact(tower: &Tower, chi: &RingCharacter, x: &GroupRingElt<Cyc>) -> Result<Cyc> {
    chi.check_level(tower, x.n)?;
    let e = chi.value_order(tower) as u64;
    let d = x.coeffs[0].order as u64;
    let l = lcm(e as i64, d as i64) as u32;
    let zero = BigRational::zero();
    let mut acc = Cyclotomic::zero(l, &zero);
    for (s, c) in x.coeffs.iter().enumerate() {
        let k = chi.exponent_at(tower, x.n, s as u32) * (l as u64 / e);
        acc = acc.add(&c.lift_order(l).mul_root(k));
    }
    Ok(acc)
}

pub fn to_complex(x: &Cyc) -> Complex64 {
    x.to_complex(rat_to_f64)
}

/// sum_sigma chi(sigma)^{+-1} psi(sigma) zeta_n^sigma, straight from the regularised values.
pub fn twisted_sum(
    tower: &Tower,
    fam: &Family,
    emb: &PadicEmbedding,
    chi: &RingCharacter,
    n: u32,
    invert: bool,
) -> Result<PadicCyc> {
    chi.check_level(tower, n)?;
    let e = chi.value_order(tower) as u64;
    let zeta = fam.zeta_at(n);
    let terms = zeta.iter().enumerate().map(|(s, z)| {
        let k = chi.exponent_at(tower, n, s as u32);
        let k = if invert { (e - k) % e } else { k };
        (k, emb.zeta.pow(psi_exponent(tower, n, s as u32)) * *z)
    });
    Ok(Cyclotomic::from_power_sum(e as u32, &zeta[0], terms))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CharEvaluation {
    pub chi: RingCharacter,
    pub n: u32,
    pub theta: PadicCyc,
    pub l: PadicCyc,
    /// chi(L_C) when exact values are available.
    pub l_complex: Option<[f64; 2]>,
}

/// chi(theta_n) and chi(L_n), with the complex image of chi(L_n) when the family is exact.
pub fn evaluate(tower: &Tower, fam: &Family, emb: &PadicEmbedding, chi: &RingCharacter, n: u32) -> Result<CharEvaluation> {
    use crate::cmtheta::theta::{l_element, theta, theta_exact};
    if n < fam.n_min || n > fam.n_max {
        return Err(Error::InvalidInput(format!("level {n} outside the computed range {}..={}", fam.n_min, fam.n_max)));
    }
    let th = theta(fam, tower, emb, n);
    let theta_v = eval_padic(tower, chi, &th)?;
    let l = eval_padic(tower, chi, &l_element(&th, tower))?;
    let l_complex = match theta_exact(fam, tower, n) {
        Some(te) => {
            let z = to_complex(&eval_exact(tower, chi, &l_element(&te, tower))?);
            Some([z.re, z.im])
        }
        None => None,
    };
    Ok(CharEvaluation { chi: chi.clone(), n, theta: theta_v, l, l_complex })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Factorization {
    pub chi: RingCharacter,
    pub n: u32,
    pub holds: bool,
    pub symmetric: bool,
    pub detail: String,
}

/// chi(L_n) = [sum chi~(sigma) zeta^sigma][sum chi~^{-1}(sigma) zeta^sigma], and chi(L_n) = chi^{-1}(L_n).
pub fn factorization_check(tower: &Tower, fam: &Family, emb: &PadicEmbedding, chi: &RingCharacter, n: u32) -> Result<Factorization> {
    let ev = evaluate(tower, fam, emb, chi, n)?;
    let a = twisted_sum(tower, fam, emb, chi, n, false)?;
    let b = twisted_sum(tower, fam, emb, chi, n, true)?;
    let rhs = a.mul(&b);
    let inv = evaluate(tower, fam, emb, &chi.inverse(tower), n)?;
    let holds = rhs == ev.l;
    let symmetric = inv.l == ev.l;
    let detail = if holds && symmetric {
        String::new()
    } else {
        format!("chi(L) = {:?}, product = {:?}, chi^-1(L) = {:?}", ev.l, rhs, inv.l)
    };
    Ok(Factorization { chi: chi.clone(), n, holds, symmetric, detail })
}

/// e_p(chi~): 1 for n >= 1, otherwise the Euler-type factor at p from the
/// values of chi~ on the Frobenius elements of the primes above p.
pub fn e_p_multiplier(kind: PrimeType, n: u32, frob: &[PadicCyc], alpha: Zpn, order: u32) -> Result<PadicCyc> {
    let one = Cyclotomic::scalar(order, alpha.like(1));
    if n >= 1 {
        return Ok(one);
    }
    let ainv = alpha.inv()?;
    let need = match kind {
        PrimeType::Split => 2,
        PrimeType::Ramified => 1,
        PrimeType::Inert => 0,
    };
    if frob.len() < need {
        return Err(Error::InvalidInput(format!("e_p needs {need} Frobenius values, got {}", frob.len())));
    }
    if frob.iter().any(|f| f.order != order) {
        return Err(Error::InvalidInput("Frobenius values live in a different cyclotomic ring".into()));
    }
    let factor = |f: &PadicCyc| one.sub(&f.scale(&ainv));
    Ok(match kind {
        PrimeType::Split => factor(&frob[0]).mul(&factor(&frob[1])),
        PrimeType::Ramified => factor(&frob[0]),
        PrimeType::Inert => Cyclotomic::scalar(order, alpha.like(1) - ainv * ainv),
    })
}

/// chi~(sigma_P) at level 0 for the Frobenius elements of the primes above p.
pub fn frobenius_values(tower: &Tower, chi: &RingCharacter, frob: &[u32], template: Zpn) -> Result<Vec<PadicCyc>> {
    if chi.n != 0 {
        return Err(Error::InvalidInput("Frobenius values are only used at level 0".into()));
    }
    let e = chi.value_order(tower);
    Ok(frob.iter().map(|&f| Cyclotomic::root_power(e, &template, chi.exponent_at(tower, 0, f))).collect())
}

#[cfg(test)]
mod tests;

//! The invariant suite run by `verify`.

use num_rational::BigRational;
use num_traits::Zero;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

use super::Pipeline;
use crate::arith::padic::Zpn;
use crate::arith::primes_up_to;
use crate::brandt::eigen::{apply_padic, joint_eigenspace_dimension};
use crate::brandt::mat_product;
use crate::cmtheta::theta::base_point_covariance;
use crate::error::Result;
use crate::evaluate::{characters, factorization_check};
use crate::quatorders::embedding::LocalAtP;
use crate::quatorders::ideals::mass;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub checks: Vec<Check>,
    pub pass: bool,
}

fn check(name: impl Into<String>, f: impl FnOnce() -> Result<(bool, String)>) -> Check {
    let name = name.into();
    match f() {
        Ok((pass, detail)) => Check { name, pass, detail },
        Err(e) => Check { name, pass: false, detail: e.to_string() },
    }
}

/// Up to four good primes at which T_l and a_l(g) are both available.
pub fn hecke_primes(pl: &Pipeline) -> Vec<u64> {
    let ls = &pl.q.ls;
    let bad = ls.p * ls.disc() * ls.level();
    primes_up_to(pl.config.eig_bound as usize)
        .into_iter()
        .filter(|l| !bad.is_multiple_of(*l) && pl.descent.eigenvalue(*l).is_some())
        .take(4)
        .collect()
}

pub fn verify(pl: &Pipeline) -> VerifyReport {
    let mut checks = Vec::new();
    let ls = &pl.q.ls;
    let setup = pl.setup();
    let tower = &pl.tower;

    checks.push(check("mass formula", || {
        let total = pl.q.classes.weights.iter().fold(BigRational::zero(), |a, &w| a + BigRational::new(1.into(), w.into()));
        let want = mass(ls.disc(), ls.level());
        Ok((total == want, format!("sum 1/w = {total}, mass = {want}, h = {}", pl.q.h())))
    }));

    let primes = hecke_primes(pl);
    checks.push(check("Hecke operators commute", || {
        let ms = primes.iter().map(|&l| pl.q.brandt_matrix(l)).collect::<Result<Vec<_>>>()?;
        let mut ok = true;
        for i in 0..ms.len() {
            for j in i + 1..ms.len() {
                ok &= mat_product(&ms[i], &ms[j]) == mat_product(&ms[j], &ms[i]);
            }
        }
        Ok((ok, format!("T_l for l in {primes:?}")))
    }));
    checks.push(check("joint eigenspace is a line", || {
        let dim = joint_eigenspace_dimension(&pl.q, &pl.descent, &primes)?;
        Ok((dim == 1, format!("dimension {dim} for l in {primes:?}")))
    }));
    checks.push(check("eigenvalue at p", || {
        let up = pl.q.p_operator()?;
        let ug = apply_padic(&up, &pl.g.padic, &pl.g.embedding)?;
        let a = pl.g.alpha;
        let lambda: Zpn = match ls.local {
            LocalAtP::Eichler => a,
            LocalAtP::Maximal => a + a.like(ls.p as i128) * a.inv()?,
        };
        let ok = ug.iter().zip(&pl.g.padic).all(|(x, y)| *x == lambda * *y);
        Ok((ok, format!("alpha = {}", a.balanced())))
    }));

    for n in pl.fam.n_min..pl.fam.n_max {
        checks.push(check(format!("U_p and Galois at n = {n}"), || {
            let r = setup.up_relation(n)?;
            Ok((r.equal, format!("{} points", r.lhs.len())))
        }));
        checks.push(check(format!("distribution relation at n = {n}"), || {
            let lower = pl.fam.zeta_at(n);
            let upper = pl.fam.zeta_at(n + 1);
            let ok = (0..lower.len() as u32).all(|s| {
                let sum = tower.fibre(n, s).iter().fold(lower[0].like(0), |a, &t| a + upper[t as usize]);
                sum == lower[s as usize]
            });
            Ok((ok, format!("{} classes", lower.len())))
        }));
    }

    for n in pl.fam.levels() {
        checks.push(check(format!("factorization at n = {n}"), || {
            let chars = characters(tower, n);
            let mut bad = Vec::new();
            for chi in &chars {
                let f = factorization_check(tower, &pl.fam, &pl.g.embedding, chi, n)?;
                if !(f.holds && f.symmetric) {
                    bad.push(chi.k.clone());
                }
            }
            Ok((bad.is_empty(), format!("{} characters, failures {bad:?}", chars.len())))
        }));
    }

    let seed = pl.config.seed;
    let mut rng = StdRng::seed_from_u64(seed);
    for n in pl.fam.levels() {
        let order = tower.level(n).order() as u32;
        let picks: Vec<u32> = (0..3).map(|_| rng.gen_range(0..order)).collect();
        checks.push(check(format!("base point covariance at n = {n}"), || {
            let mut ok = true;
            for &s in &picks {
                ok &= base_point_covariance(&setup, &pl.g, &pl.fam, s, n)?;
            }
            Ok((ok, format!("sigma_0 in {picks:?}")))
        }));
    }

    let pass = checks.iter().all(|c| c.pass);
    VerifyReport { seed, checks, pass }
}

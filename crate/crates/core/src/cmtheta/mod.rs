//! CM points z_n^sigma on X_U, the U_p relation, regularised values and the
//! theta / L elements built from them.

pub mod theta;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::cyclo::Cyclotomic;
use crate::arith::kronecker;
use crate::arith::padic::Zpn;
use crate::brandt::eigen::QuatEigenform;
use crate::brandt::{Cyc, QuaternionicLevel, XuPoint};
use crate::error::{Error, Result};
use crate::quadorders::tower::Tower;
use crate::quadorders::{half_unit_count, ideals_of_norm, OkIdeal};
use crate::quatorders::embedding::LocalAtP;
use crate::quatorders::ideals::Lat;

/// Everything needed to place CM points.
pub struct Setup<'a> {
    pub q: &'a QuaternionicLevel,
    pub tower: &'a Tower,
}

/// How p sits in K.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PrimeType {
    Split,
    Ramified,
    Inert,
}

pub fn prime_type(d_k: i64, p: u64) -> PrimeType {
    match kronecker(d_k, p as i64) {
        1 => PrimeType::Split,
        0 => PrimeType::Ramified,
        _ => PrimeType::Inert,
    }
}

impl Setup<'_> {
    pub fn local(&self) -> LocalAtP {
        self.q.ls.local
    }

    /// Lowest level carrying CM points: 1 with an Eichler order at p, 0 otherwise.
    pub fn n_min(&self) -> u32 {
        match self.local() {
            LocalAtP::Eichler => 1,
            LocalAtP::Maximal => 0,
        }
    }

    pub fn delta(&self, n: u32) -> Result<[[i128; 2]; 2]> {
        let p = self.q.ls.p as i128;
        match self.local() {
            LocalAtP::Eichler if n >= 1 => Ok([[p.pow(n - 1), 0], [0, 1]]),
            LocalAtP::Maximal => Ok([[p.pow(n), 0], [0, 1]]),
            _ => Err(Error::InvalidInput("CM points z_n need n >= 1 here".into())),
        }
    }

    /// The lattice iota(a_1 ... a_k) R for representative ideals prime to p.
    pub fn ideal_lattice(&self, ideals: &[OkIdeal]) -> Lat {
        let ls = &self.q.ls;
        let mut m = ls.r.clone();
        for id in ideals {
            let g = ls.ideal_generator(id.b);
            let mut gens: Vec<_> = m.rows.iter().map(|r| r.map(|v| v * id.norm as i128)).collect();
            gens.extend(m.rows.iter().map(|r| ls.o.mul(&g, r)));
            m = Lat::from_gens(&gens);
        }
        m
    }

    /// The point [iota(a_1 ... a_k) delta_n] of X_U.
    pub fn point(&self, ideals: &[OkIdeal], n: u32) -> Result<XuPoint> {
        let delta = self.delta(n)?;
        let m = self.ideal_lattice(ideals);
        let l = self.q.ls.local_sublattice(&m, &delta);
        self.q.locate(&l, &delta)
    }

    /// z_n^sigma for every sigma in G~_n, optionally translated by a base ideal.
    pub fn orbit(&self, n: u32, base: Option<&OkIdeal>) -> Result<Vec<XuPoint>> {
        let lv = self.tower.level(n);
        lv.reps
            .par_iter()
            .map(|id| {
                let mut ids = vec![*id];
                ids.extend(base.copied());
                self.point(&ids, n)
            })
            .collect()
    }

    /// Elements of G~_0 given by the primes of K above p.
    pub fn frobenius_elements(&self) -> Vec<u32> {
        let lv = self.tower.level(0);
        ideals_of_norm(self.q.ls.p as i64, self.tower.d_k)
            .iter()
            .map(|id| {
                let g = lv.pic.class_of_ideal(id, self.tower.d_k);
                lv.index_of(g, 0).expect("class of a prime above p")
            })
            .collect()
    }

    /// Compare sum over ker(G~_{n+1} -> G~_n) of z_{n+1}^sigma with the p-operator applied to z_n.
    pub fn up_relation(&self, n: u32) -> Result<UpRelation> {
        let ls = &self.q.ls;
        let delta = self.delta(n)?;
        let base = self.ideal_lattice(&[]);
        let mut rhs = self.q.p_translates(&ls.local_sublattice(&base, &delta), &delta)?;
        let kernel = self.tower.kernel(n);
        let up = self.tower.level(n + 1);
        let pts: Vec<XuPoint> = kernel
            .par_iter()
            .map(|&s| self.point(&[up.reps[s as usize]], n + 1))
            .collect::<Result<_>>()?;
        let mut lhs = Vec::new();
        match self.local() {
            LocalAtP::Eichler => lhs.extend(pts),
            LocalAtP::Maximal if n >= 1 => {
                lhs.extend(pts);
                lhs.push(self.point(&[], n - 1)?);
            }
            LocalAtP::Maximal => {
                let u0 = half_unit_count(self.tower.d_k, self.tower.c) as usize;
                for _ in 0..u0 {
                    lhs.extend(pts.iter().copied());
                }
                let lv = self.tower.level(0);
                for f in self.frobenius_elements() {
                    lhs.push(self.point(&[lv.reps[f as usize]], 0)?);
                }
            }
        }
        lhs.sort();
        rhs.sort();
        let equal = lhs == rhs;
        Ok(UpRelation { n, lhs, rhs, equal })
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct UpRelation {
    pub n: u32,
    pub lhs: Vec<XuPoint>,
    pub rhs: Vec<XuPoint>,
    pub equal: bool,
}

/// Regularised values at every level n_min..=n_max, indexed by G~_n.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Family {
    pub n_min: u32,
    pub n_max: u32,
    pub base: Option<OkIdeal>,
    pub orbits: Vec<Vec<XuPoint>>,
    pub zeta: Vec<Vec<Zpn>>,
    /// Exact values in Q(zeta_d) when alpha is rational.
    pub zeta_exact: Option<Vec<Vec<Cyc>>>,
}

impl Family {
    pub fn zeta_at(&self, n: u32) -> &[Zpn] {
        &self.zeta[(n - self.n_min) as usize]
    }

    pub fn orbit_at(&self, n: u32) -> &[XuPoint] {
        &self.orbits[(n - self.n_min) as usize]
    }

    pub fn exact_at(&self, n: u32) -> Option<&[Cyc]> {
        self.zeta_exact.as_ref().map(|z| z[(n - self.n_min) as usize].as_slice())
    }

    pub fn levels(&self) -> impl Iterator<Item = u32> {
        self.n_min..=self.n_max
    }
}

/// Compute orbits and regularised values. `alpha_exact` is alpha when it is rational.
pub fn regularize(
    setup: &Setup,
    g: &QuatEigenform,
    base: Option<&OkIdeal>,
    alpha_exact: Option<i64>,
) -> Result<Family> {
    let n_min = setup.n_min();
    let n_max = setup.tower.n_max();
    if n_max < n_min {
        return Err(Error::InvalidInput("n_max below the first level with CM points".into()));
    }
    let q = setup.q;
    let orbits: Vec<Vec<XuPoint>> = (n_min..=n_max).map(|n| setup.orbit(n, base)).collect::<Result<_>>()?;
    let gval = |x: &XuPoint| g.value_padic(q, x);
    let alpha = g.alpha;
    let ainv = alpha.inv()?;
    let mut zeta = Vec::new();
    for n in n_min..=n_max {
        let orb = &orbits[(n - n_min) as usize];
        let vals: Vec<Zpn> = match setup.local() {
            LocalAtP::Eichler => orb.iter().map(|x| Ok(gval(x)? * ainv.pow(n as u64))).collect::<Result<_>>()?,
            LocalAtP::Maximal if n >= 1 => {
                let lower = &orbits[(n - 1 - n_min) as usize];
                (0..orb.len())
                    .map(|s| {
                        let t = setup.tower.project(n, n - 1, s as u32) as usize;
                        Ok((alpha * gval(&orb[s])? - gval(&lower[t])?) * ainv.pow(n as u64 + 1))
                    })
                    .collect::<Result<_>>()?
            }
            LocalAtP::Maximal => bottom_values(setup, orb, &gval, alpha)?,
        };
        zeta.push(vals);
    }
    let zeta_exact = match (setup.local(), alpha_exact) {
        (LocalAtP::Eichler, Some(a)) if a == 1 || a == -1 => Some(
            (n_min..=n_max)
                .map(|n| {
                    let sign = if a == -1 && n % 2 == 1 { -1 } else { 1 };
                    orbits[(n - n_min) as usize]
                        .iter()
                        .map(|x| {
                            let v = g.value_exact(q, x);
                            if sign < 0 {
                                v.neg()
                            } else {
                                v
                            }
                        })
                        .collect()
                })
                .collect(),
        ),
        _ => None,
    };
    Ok(Family { n_min, n_max, base: base.copied(), orbits, zeta, zeta_exact })
}

/// The three n = 0 formulas with a maximal order at p.
fn bottom_values(
    setup: &Setup,
    orb: &[XuPoint],
    gval: &dyn Fn(&XuPoint) -> Result<Zpn>,
    alpha: Zpn,
) -> Result<Vec<Zpn>> {
    let u0 = half_unit_count(setup.tower.d_k, setup.tower.c);
    let u0_inv = alpha.like(u0 as i128).inv().map_err(|_| {
        Error::Unsupported(format!("u_0 = {u0} is not invertible mod p"))
    })?;
    let ainv = alpha.inv()?;
    let lv = setup.tower.level(0);
    let frob = setup.frobenius_elements();
    let one = alpha.like(1);
    (0..orb.len())
        .map(|s| {
            let g0 = gval(&orb[s])?;
            let shifted = |f: u32| gval(&orb[lv.tilde.op(s as u32, f) as usize]);
            let v = match prime_type(setup.tower.d_k, setup.q.ls.p) {
                PrimeType::Split => {
                    (one + ainv * ainv) * g0 - ainv * (shifted(frob[0])? + shifted(frob[1])?)
                }
                PrimeType::Ramified => g0 - ainv * shifted(frob[0])?,
                PrimeType::Inert => (one - ainv * ainv) * g0,
            };
            Ok(u0_inv * v)
        })
        .collect()
}

/// psi(sigma) at level n as an exponent of zeta_d; the psi-coordinate is absent at level 0.
pub fn psi_exponent(tower: &Tower, n: u32, sigma: u32) -> u64 {
    if n == 0 {
        0
    } else {
        tower.psi_exponent(n, sigma)
    }
}

/// psi as an element of Q(zeta_d).
pub fn psi_exact(tower: &Tower, n: u32, sigma: u32) -> Cyc {
    let d = tower.psi.order.max(1) as u32;
    Cyclotomic::root_power(d, &num_rational::BigRational::from_integer(0.into()), psi_exponent(tower, n, sigma))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::DirichletModP;
    use crate::brandt::eigen::extract_eigenform;
    use crate::ellcurve::descent::find_twist_descent;
    use crate::ellcurve::WeierstrassCurve;
    use crate::quatorders::embedding::LevelStructure;

    fn running(n_max: u32) -> (QuaternionicLevel, Tower, QuatEigenform) {
        let e = WeierstrassCurve::new([1, 1, 1, -10, -10]).unwrap().quadratic_twist(5).unwrap();
        let desc = find_twist_descent(&e, 5, 50, 20).unwrap();
        let ls = LevelStructure::build(-4, 1, 5, 3, LocalAtP::Eichler, 12).unwrap();
        let avoid = (ls.disc() * ls.level()) as i64;
        let q = QuaternionicLevel::new(ls, DirichletModP::quadratic(5)).unwrap();
        let g = extract_eigenform(&q, &desc, 20, 50, 1).unwrap();
        let t = Tower::new(-4, 1, 5, DirichletModP::quadratic(5), avoid, n_max).unwrap();
        (q, t, g)
    }

    #[test]
    fn up_relation_on_the_running_example() {
        let (q, t, _) = running(2);
        let s = Setup { q: &q, tower: &t };
        let r = s.up_relation(1).unwrap();
        assert!(r.equal, "{:?} vs {:?}", r.lhs, r.rhs);
        assert_eq!(r.lhs.len(), 5);
    }

    #[test]
    fn distribution_relation_on_the_running_example() {
        let (q, t, g) = running(2);
        let s = Setup { q: &q, tower: &t };
        let fam = regularize(&s, &g, None, Some(1)).unwrap();
        for sigma in 0..t.level(1).order() as u32 {
            let sum = t.fibre(1, sigma).iter().fold(Zpn::zero(5, 20), |a, &x| a + fam.zeta_at(2)[x as usize]);
            assert_eq!(sum, fam.zeta_at(1)[sigma as usize]);
        }
    }

    #[test]
    fn trivial_sigma_gives_z_n() {
        let (q, t, _) = running(1);
        let s = Setup { q: &q, tower: &t };
        let id = t.level(1).tilde.identity as usize;
        let rep = t.level(1).reps[id];
        assert_eq!(s.point(&[rep], 1).unwrap(), s.point(&[], 1).unwrap());
    }

    #[test]
    fn moving_the_base_point_rescales_l() {
        let (q, t, g) = running(2);
        let s = Setup { q: &q, tower: &t };
        let fam = regularize(&s, &g, None, Some(1)).unwrap();
        for n in 1..=2 {
            let last = t.level(n).order() as u32 - 1;
            assert!(theta::base_point_covariance(&s, &g, &fam, last, n).unwrap());
        }
    }
}

#[cfg(test)]
mod good_twist_tests {
    use super::*;
    use crate::arith::DirichletModP;
    use crate::brandt::eigen::extract_eigenform;
    use crate::ellcurve::descent::find_twist_descent;
    use crate::ellcurve::WeierstrassCurve;
    use crate::quatorders::embedding::LevelStructure;

    fn setup(d_k: i64, n_max: u32) -> (QuaternionicLevel, Tower, QuatEigenform) {
        let e = WeierstrassCurve::new([0, -1, 1, -10, -20]).unwrap().quadratic_twist(5).unwrap();
        let desc = find_twist_descent(&e, 5, 50, 20).unwrap();
        let ls = LevelStructure::build(d_k, 1, 5, 11, LocalAtP::Maximal, 12).unwrap();
        let avoid = (ls.disc() * ls.level()) as i64;
        let q = QuaternionicLevel::new(ls, DirichletModP::quadratic(5)).unwrap();
        let g = extract_eigenform(&q, &desc, 20, 50, 1).unwrap();
        let t = Tower::new(d_k, 1, 5, DirichletModP::quadratic(5), avoid, n_max).unwrap();
        (q, t, g)
    }

    #[test]
    fn distribution_with_correction_terms() {
        for d_k in [-4i64, -3] {
            let (q, t, g) = setup(d_k, 2);
            let s = Setup { q: &q, tower: &t };
            for n in 0..2 {
                let r = s.up_relation(n).unwrap();
                assert!(r.equal, "D = {d_k}, n = {n}: {:?} vs {:?}", r.lhs, r.rhs);
            }
            let fam = regularize(&s, &g, None, None).unwrap();
            for n in 0..2u32 {
                for sigma in 0..t.level(n).order() as u32 {
                    let sum = t.fibre(n, sigma).iter().fold(Zpn::zero(5, 20), |a, &x| a + fam.zeta_at(n + 1)[x as usize]);
                    assert_eq!(sum, fam.zeta_at(n)[sigma as usize], "D = {d_k}, n = {n}");
                }
            }
        }
    }
}

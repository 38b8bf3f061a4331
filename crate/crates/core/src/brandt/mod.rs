//! The finite set X_U, Brandt matrices with the psi^2 nebentypus, and the
//! U_p / T_p operator at p.

pub mod eigen;

use num_bigint::BigInt;
use num_rational::BigRational;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::cyclo::Cyclotomic;
use crate::arith::padic::Mat2;
use crate::arith::{is_prime, DirichletModP};
use crate::error::{Error, Result};
use crate::quatorders::embedding::{LevelStructure, LocalAtP};
use crate::quatorders::ideals::{right_ideal_classes, IdealClasses, Lat, RightIdeals};
use crate::quatorders::order::Elt;

pub type Cyc = Cyclotomic<BigRational>;
pub type HeckeMatrix = Vec<Vec<Cyc>>;

/// A point of X_U: an ideal class together with psi^2 of the torus coordinate,
/// written as an exponent of zeta_d (d = ord psi) and reduced modulo the
/// stabiliser of the class.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct XuPoint {
    pub class: usize,
    pub t: u64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct QuaternionicLevel {
    pub ls: LevelStructure,
    pub ctx: RightIdeals,
    pub classes: IdealClasses,
    pub psi: DirichletModP,
    /// Subgroup of Z/d generated by psi^2 of the units of each left order.
    pub stabilisers: Vec<Vec<u64>>,
    pub aux_prime: u64,
}

fn subgroup_generated(d: u64, gens: &[u64]) -> Vec<u64> {
    let mut h = vec![0u64];
    let mut frontier = vec![0u64];
    while let Some(x) = frontier.pop() {
        for g in gens {
            let y = (x + g) % d;
            if !h.contains(&y) {
                h.push(y);
                frontier.push(y);
            }
        }
    }
    h.sort_unstable();
    h
}

impl QuaternionicLevel {
    pub fn new(ls: LevelStructure, psi: DirichletModP) -> Result<Self> {
        if ls.local == LocalAtP::Maximal && psi.square().order > 1 {
            return Err(Error::Unsupported("a maximal order at p needs psi^2 = 1".into()));
        }
        let ctx = ls.ideals();
        let bad = ls.p * ls.disc() * ls.level();
        let aux_prime = (2..).find(|&l| is_prime(l) && !bad.is_multiple_of(l)).expect("a prime exists");
        let classes = right_ideal_classes(&ctx, ls.disc(), ls.level(), aux_prime)?;
        let mut q = QuaternionicLevel { ls, ctx, classes, psi, stabilisers: vec![], aux_prime };
        q.stabilisers = (0..q.classes.len())
            .map(|k| {
                let rep = &q.classes.reps[k];
                let n = q.classes.norms[k];
                let prod = crate::quatorders::ideals::lat_mul(&q.ctx.o, rep, &crate::quatorders::ideals::lat_conj(&q.ctx.o, rep));
                let units = crate::quatorders::ideals::elements_of_norm(&q.ctx.o, &prod, n * n, false);
                let gens: Vec<u64> = units
                    .iter()
                    .map(|x| q.torus_exponent(x, &[[1, 0], [0, 1]], n))
                    .collect::<Result<_>>()?;
                Ok(subgroup_generated(q.d(), &gens))
            })
            .collect::<Result<_>>()?;
        Ok(q)
    }

    /// Order d of psi; values live in Q(zeta_d).
    pub fn d(&self) -> u64 {
        self.psi.order.max(1)
    }

    pub fn h(&self) -> usize {
        self.classes.len()
    }

    /// Classes whose fibre carries no obstruction to psi^{-2}-equivariance.
    pub fn admissible(&self, k: usize) -> bool {
        self.stabilisers[k].len() == 1
    }

    pub fn fibre_size(&self, k: usize) -> u64 {
        self.psi.square().order.max(1) / self.stabilisers[k].len() as u64
    }

    /// psi^2((r)_{22}) for r = adj(phi(x)) beta / norm, as an exponent of zeta_d.
    fn torus_exponent(&self, x: &Elt, beta: &[[i128; 2]; 2], norm: i128) -> Result<u64> {
        if self.psi.square().order <= 1 {
            return Ok(0);
        }
        let m = self.ls.phi(x);
        let b = Mat2::from_ints(m.p(), m.prec(), *beta);
        let r = m.adj().mul(&b);
        let p = self.ls.p;
        let vp = crate::arith::valuation(norm, p);
        let unit_part = norm / (p as i128).pow(vp);
        let r22 = r.m[1][1].div_p_power(vp).map_err(|_| Error::Verification("torus coordinate is not integral".into()))?;
        let r22 = r22 * r22.like(unit_part).inv()?;
        if !r22.is_unit() {
            return Err(Error::Verification("torus coordinate is not a unit".into()));
        }
        Ok(2 * self.psi.exponent(r22.residue() as i64) % self.d())
    }

    fn reduce_t(&self, k: usize, t: u64) -> u64 {
        let d = self.d();
        self.stabilisers[k].iter().map(|s| (t + s) % d).min().unwrap()
    }

    /// Location in X_U of the adelic point whose lattice is `l` and whose p-component is `beta`.
    pub fn locate(&self, l: &Lat, beta: &[[i128; 2]; 2]) -> Result<XuPoint> {
        let (k, x) = self.classes.classify(&self.ctx, l)?;
        let n = self.ctx.norm(l);
        let t = self.torus_exponent(&x, beta, n)?;
        Ok(XuPoint { class: k, t: self.reduce_t(k, t) })
    }

    /// Value of a function on X_U given by class values g_k.
    pub fn eval(&self, g: &[Cyc], x: &XuPoint) -> Cyc {
        let d = self.d();
        g[x.class].mul_root((d - x.t % d) % d)
    }

    fn zero(&self) -> Cyc {
        Cyc::zero(self.d() as u32, &BigRational::from_integer(BigInt::from(0)))
    }

    fn row_from_points(&self, pts: &[XuPoint]) -> Vec<Cyc> {
        let mut row = vec![self.zero(); self.h()];
        let d = self.d();
        for x in pts {
            let one = Cyc::root_power(d as u32, &BigRational::from_integer(BigInt::from(1)), (d - x.t % d) % d);
            row[x.class] = row[x.class].add(&one);
        }
        row
    }

    /// Points of X_U reached by the Hecke correspondence T_l from class i.
    pub fn hecke_points(&self, i: usize, l: u64) -> Result<Vec<XuPoint>> {
        let rep = &self.classes.reps[i];
        self.ctx
            .neighbours(rep, l)
            .iter()
            .map(|nb| self.locate(nb, &[[1, 0], [0, 1]]))
            .collect()
    }

    /// Brandt matrix T_l for l prime to p disc level: (T g)_i = sum over neighbours.
    pub fn brandt_matrix(&self, l: u64) -> Result<HeckeMatrix> {
        if !is_prime(l) || (self.ls.p * self.ls.disc() * self.ls.level()).is_multiple_of(l) {
            return Err(Error::InvalidInput(format!("T_{l} needs a prime not dividing p * disc * level")));
        }
        (0..self.h())
            .into_par_iter()
            .map(|i| Ok(self.row_from_points(&self.hecke_points(i, l)?)))
            .collect()
    }

    /// The matrices at p used by the operator: (p a; 0 1) and, with a maximal order at p, diag(1, p).
    pub fn p_cosets(&self) -> Vec<[[i128; 2]; 2]> {
        let p = self.ls.p as i128;
        let mut v: Vec<[[i128; 2]; 2]> = (0..p).map(|a| [[p, a], [0, 1]]).collect();
        if self.ls.local == LocalAtP::Maximal {
            v.push([[1, 0], [0, p]]);
        }
        v
    }

    /// Points b h for the p-cosets h, with b the point (lattice `m`, p-component `beta`).
    pub fn p_translates(&self, m: &Lat, beta: &[[i128; 2]; 2]) -> Result<Vec<XuPoint>> {
        self.p_cosets()
            .par_iter()
            .map(|h| {
                let bh = mat_mul(beta, h);
                let l = self.ls.local_sublattice(m, &bh);
                self.locate(&l, &bh)
            })
            .collect()
    }

    /// U_p (Eichler at p) or T_p (maximal at p) acting on class values.
    pub fn p_operator(&self) -> Result<HeckeMatrix> {
        (0..self.h())
            .map(|i| Ok(self.row_from_points(&self.p_translates(&self.classes.reps[i], &[[1, 0], [0, 1]])?)))
            .collect()
    }
}

pub fn mat_mul(a: &[[i128; 2]; 2], b: &[[i128; 2]; 2]) -> [[i128; 2]; 2] {
    std::array::from_fn(|i| std::array::from_fn(|j| a[i][0] * b[0][j] + a[i][1] * b[1][j]))
}

pub fn mat_apply(m: &HeckeMatrix, v: &[Cyc]) -> Vec<Cyc> {
    m.iter()
        .map(|row| row.iter().zip(v).fold(v[0].sub(&v[0]), |acc, (a, b)| acc.add(&a.mul(b))))
        .collect()
}

pub fn mat_product(a: &HeckeMatrix, b: &HeckeMatrix) -> HeckeMatrix {
    let n = a.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (0..n).fold(a[0][0].sub(&a[0][0]), |acc, k| acc.add(&a[i][k].mul(&b[k][j]))))
                .collect()
        })
        .collect()
}

//! Lattices inside O, right ideals of a suborder, neighbours, isomorphism
//! testing and enumeration of right ideal classes.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::order::{Elt, MaximalOrder};
use crate::arith::prime_divisors;
use crate::error::{Error, Result};
use crate::lattice::{det, hnf, quad_form, short_vectors};

/// A full-rank sublattice of O in Hermite normal form.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Lat {
    pub rows: Vec<Elt>,
}

impl Lat {
    pub fn from_gens(gens: &[Elt]) -> Self {
        let rows: Vec<Vec<i128>> = gens.iter().map(|g| g.to_vec()).collect();
        let h = hnf(&rows);
        assert_eq!(h.len(), 4, "lattice is not of full rank");
        Lat { rows: h.iter().map(|r| [r[0], r[1], r[2], r[3]]).collect() }
    }

    /// Index in O.
    pub fn index(&self) -> i128 {
        let rows: Vec<Vec<i128>> = self.rows.iter().map(|r| r.to_vec()).collect();
        det(&rows).abs().to_i128().expect("index fits")
    }

    pub fn combine(&self, c: &[i128]) -> Elt {
        let mut out = [0i128; 4];
        for (ci, r) in c.iter().zip(&self.rows) {
            for k in 0..4 {
                out[k] += ci * r[k];
            }
        }
        out
    }

    pub fn scaled(&self, s: i128) -> Lat {
        Lat { rows: self.rows.iter().map(|r| r.map(|x| x * s)).collect() }
    }

    /// Membership test via the HNF.
    pub fn contains(&self, x: &Elt) -> bool {
        let mut v = *x;
        for (col, r) in self.rows.iter().enumerate() {
            let piv = r[col];
            if v[col] % piv != 0 {
                return false;
            }
            let q = v[col] / piv;
            for k in 0..4 {
                v[k] -= q * r[k];
            }
        }
        v.iter().all(|&c| c == 0)
    }
}

pub fn lat_mul(o: &MaximalOrder, a: &Lat, b: &Lat) -> Lat {
    let mut gens = Vec::with_capacity(16);
    for x in &a.rows {
        for y in &b.rows {
            gens.push(o.mul(x, y));
        }
    }
    Lat::from_gens(&gens)
}

pub fn lat_conj(o: &MaximalOrder, a: &Lat) -> Lat {
    Lat::from_gens(&a.rows.iter().map(|x| o.conj_elt(x)).collect::<Vec<_>>())
}

/// Left multiplication of a lattice by an element.
pub fn elt_times_lat(o: &MaximalOrder, x: &Elt, a: &Lat) -> Lat {
    Lat::from_gens(&a.rows.iter().map(|y| o.mul(x, y)).collect::<Vec<_>>())
}

/// Gram matrix of trd(x conj y) on the lattice basis.
pub fn lat_gram(o: &MaximalOrder, a: &Lat) -> Vec<Vec<i128>> {
    let mut g = vec![vec![0i128; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            let mut s = 0i128;
            for k in 0..4 {
                for l in 0..4 {
                    s += a.rows[i][k] * o.gram[k][l] * a.rows[j][l];
                }
            }
            g[i][j] = s;
        }
    }
    g
}

/// Elements of the lattice with reduced norm exactly `n`, up to sign.
pub fn elements_of_norm(o: &MaximalOrder, a: &Lat, n: i128, halve: bool) -> Vec<Elt> {
    let g = lat_gram(o, a);
    short_vectors(&g, 2 * n, halve)
        .into_iter()
        .filter(|c| quad_form(&g, c) == 2 * n)
        .map(|c| a.combine(&c))
        .collect()
}

/// Context for right ideals of an order R contained in O.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RightIdeals {
    pub o: MaximalOrder,
    pub r: Lat,
    pub r_index: i128,
}

impl RightIdeals {
    pub fn new(o: MaximalOrder, r: Lat) -> Self {
        let r_index = r.index();
        RightIdeals { o, r, r_index }
    }

    /// Reduced norm of a right R-ideal contained in R.
    pub fn norm(&self, i: &Lat) -> i128 {
        let q = i.index() / self.r_index;
        let s = (q as f64).sqrt().round() as i128;
        assert_eq!(s * s, q, "index of a right ideal is a square");
        assert_eq!(s * s * self.r_index, i.index());
        s
    }

    /// Some x in J conj(I) with nrd(x) = N(I) N(J), i.e. x / N(I) maps I onto J.
    pub fn isomorphism(&self, i: &Lat, j: &Lat) -> Option<Elt> {
        let prod = lat_mul(&self.o, j, &lat_conj(&self.o, i));
        let target = self.norm(i) * self.norm(j);
        elements_of_norm(&self.o, &prod, target, true).into_iter().next()
    }

    /// Number of units of the left order of I.
    pub fn unit_count(&self, i: &Lat) -> usize {
        let prod = lat_mul(&self.o, i, &lat_conj(&self.o, i));
        let n = self.norm(i);
        elements_of_norm(&self.o, &prod, n * n, false).len()
    }

    /// The l + 1 sublattices J of I with I/J = (Z/l)^2 that are right R-ideals.
    pub fn neighbours(&self, i: &Lat, l: u64) -> Vec<Lat> {
        let li = l as i128;
        let n = self.norm(i);
        let mut out: Vec<Lat> = Vec::new();
        let li_i = i.scaled(li);
        for idx in 1..li.pow(4) {
            let c: [i128; 4] = std::array::from_fn(|k| (idx / li.pow(k as u32)) % li);
            let x = i.combine(&c);
            if self.o.nrd(&x) % (li * n) != 0 {
                continue;
            }
            let mut gens: Vec<Elt> = li_i.rows.clone();
            gens.extend(self.r.rows.iter().map(|r| self.o.mul(&x, r)));
            let j = Lat::from_gens(&gens);
            if j.index() != i.index() * li * li {
                continue;
            }
            if !out.contains(&j) {
                out.push(j);
                if out.len() as u64 == l + 1 {
                    break;
                }
            }
        }
        assert_eq!(out.len() as u64, l + 1, "expected l + 1 neighbours");
        out
    }
}

/// Mass sum 1/w over classes, with w = #units / 2.
pub fn mass(disc: u64, level: u64) -> BigRational {
    let mut num = BigInt::from(1);
    for q in prime_divisors(disc) {
        num *= q - 1;
    }
    for l in prime_divisors(level) {
        num *= l + 1;
    }
    BigRational::new(num, BigInt::from(12))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct IdealClasses {
    pub reps: Vec<Lat>,
    pub norms: Vec<i128>,
    /// #units of the left order / 2.
    pub weights: Vec<u64>,
    pub mass: BigRational,
}

impl IdealClasses {
    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }

    /// Index of the class of `l` and an element realising the isomorphism.
    pub fn classify(&self, ctx: &RightIdeals, l: &Lat) -> Result<(usize, Elt)> {
        for (k, rep) in self.reps.iter().enumerate() {
            if let Some(x) = ctx.isomorphism(rep, l) {
                return Ok((k, x));
            }
        }
        Err(Error::Verification("lattice is not isomorphic to any class representative".into()))
    }
}

/// Right ideal classes of R by neighbour expansion at the prime `l`,
/// halting once the mass formula is met.
pub fn right_ideal_classes(ctx: &RightIdeals, disc: u64, level: u64, l: u64) -> Result<IdealClasses> {
    let target = mass(disc, level);
    let mut reps = vec![ctx.r.clone()];
    let mut weights = vec![ctx.unit_count(&ctx.r) as u64 / 2];
    let mut total = BigRational::new(BigInt::from(1), BigInt::from(weights[0]));
    let mut queue = 0usize;
    while total < target {
        if queue >= reps.len() {
            return Err(Error::Verification("neighbour graph exhausted before reaching the mass".into()));
        }
        let cur = reps[queue].clone();
        queue += 1;
        for nb in ctx.neighbours(&cur, l) {
            if reps.iter().any(|r| ctx.isomorphism(r, &nb).is_some()) {
                continue;
            }
            let w = ctx.unit_count(&nb) as u64 / 2;
            total += BigRational::new(BigInt::from(1), BigInt::from(w));
            reps.push(nb);
            weights.push(w);
            if total >= target {
                break;
            }
        }
    }
    if total != target {
        return Err(Error::Verification(format!("mass overshoot: {total} vs {target}")));
    }
    let norms = reps.iter().map(|r| ctx.norm(r)).collect();
    if target.is_zero() || target.is_negative() {
        return Err(Error::Verification("nonpositive mass".into()));
    }
    Ok(IdealClasses { reps, norms, weights, mass: target })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quatorders::algebra::construct_algebra;
    use crate::quatorders::order::maximal_order;

    fn classes_of_maximal(q: u64) -> IdealClasses {
        let alg = construct_algebra(&[q], &[]).unwrap();
        let o = maximal_order(&alg).unwrap();
        let r = Lat::from_gens(&[[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]]);
        let ctx = RightIdeals::new(o, r);
        let l = if q == 2 { 3 } else { 2 };
        right_ideal_classes(&ctx, q, 1, l).unwrap()
    }

    #[test]
    fn class_numbers_of_maximal_orders() {
        assert_eq!(classes_of_maximal(2).len(), 1);
        assert_eq!(classes_of_maximal(3).len(), 1);
        assert_eq!(classes_of_maximal(11).len(), 2);
        assert_eq!(classes_of_maximal(37).len(), 3);
        let c = classes_of_maximal(11);
        let mut w = c.weights.clone();
        w.sort();
        assert_eq!(w, vec![2, 3]);
        assert_eq!(c.mass, BigRational::new(BigInt::from(5), BigInt::from(6)));
    }

    #[test]
    fn hurwitz_units() {
        let c = classes_of_maximal(2);
        assert_eq!(c.weights, vec![12]);
    }
}

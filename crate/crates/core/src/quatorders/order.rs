//! Orders given by a Z-basis, integer coordinates relative to a fixed
//! maximal order O, and the saturation algorithm producing O.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::algebra::{rat, QuatAlgebra, Quat};
use crate::arith::prime_divisors;
use crate::error::{Error, Result};
use crate::lattice::{det, hnf_big};

/// An element of O in coordinates of O's basis.
pub type Elt = [i128; 4];

/// A maximal order with precomputed structure constants.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MaximalOrder {
    pub alg: QuatAlgebra,
    pub basis: Vec<Quat>,
    /// e_i e_j = sum_k mult[i][j][k] e_k.
    pub mult: Vec<Vec<[i128; 4]>>,
    /// trd(e_i conj(e_j)); nrd(x) = x^T G x / 2.
    pub gram: Vec<Vec<i128>>,
    /// conj(e_i) in coordinates.
    pub conj: Vec<[i128; 4]>,
    pub trd: [i128; 4],
    inv_basis: Vec<Vec<BigRational>>,
}

fn invert(m: &[Vec<BigRational>]) -> Vec<Vec<BigRational>> {
    let n = m.len();
    let mut a: Vec<Vec<BigRational>> = m
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..n).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }));
            row
        })
        .collect();
    for c in 0..n {
        let piv = (c..n).find(|&r| !a[r][c].is_zero()).expect("invertible basis");
        a.swap(c, piv);
        let inv = a[c][c].recip();
        for v in a[c].iter_mut() {
            *v = &*v * &inv;
        }
        for r in 0..n {
            if r != c && !a[r][c].is_zero() {
                let f = a[r][c].clone();
                for k in 0..2 * n {
                    let t = &a[c][k] * &f;
                    a[r][k] = &a[r][k] - t;
                }
            }
        }
    }
    a.into_iter().map(|r| r[n..].to_vec()).collect()
}

impl MaximalOrder {
    pub fn from_basis(alg: QuatAlgebra, basis: Vec<Quat>) -> Result<Self> {
        let mat: Vec<Vec<BigRational>> = basis.iter().map(|q| q.to_vec()).collect();
        let inv_basis = invert(&mat);
        let mut o = MaximalOrder {
            alg,
            basis,
            mult: vec![],
            gram: vec![],
            conj: vec![],
            trd: [0; 4],
            inv_basis,
        };
        let coords = |o: &MaximalOrder, q: &Quat| {
            o.coords_of(q).ok_or_else(|| Error::Verification("basis does not span an order".into()))
        };
        let mut mult = vec![vec![[0i128; 4]; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                mult[i][j] = coords(&o, &o.alg.mul(&o.basis[i], &o.basis[j]))?;
            }
        }
        let mut conj = vec![[0i128; 4]; 4];
        let mut trd = [0i128; 4];
        for i in 0..4 {
            conj[i] = coords(&o, &o.alg.conj(&o.basis[i]))?;
            let t = o.alg.trd(&o.basis[i]);
            trd[i] = t.to_integer().to_i128().filter(|_| t.is_integer()).ok_or_else(|| Error::Verification("non-integral trace".into()))?;
        }
        let mut gram = vec![vec![0i128; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                let t = o.alg.trd(&o.alg.mul(&o.basis[i], &o.alg.conj(&o.basis[j])));
                if !t.is_integer() {
                    return Err(Error::Verification("non-integral trace form".into()));
                }
                gram[i][j] = t.to_integer().to_i128().unwrap();
            }
        }
        o.mult = mult;
        o.conj = conj;
        o.trd = trd;
        o.gram = gram;
        Ok(o)
    }

    /// Coordinates of a rational quaternion, if it lies in the order.
    pub fn coords_of(&self, q: &Quat) -> Option<Elt> {
        let mut out = [0i128; 4];
        for (j, o) in out.iter_mut().enumerate() {
            let mut s = BigRational::zero();
            for i in 0..4 {
                s += &q[i] * &self.inv_basis[i][j];
            }
            if !s.is_integer() {
                return None;
            }
            *o = s.to_integer().to_i128()?;
        }
        Some(out)
    }

    /// Rational coordinates of a quaternion in O's basis.
    pub fn rational_coords(&self, q: &Quat) -> [BigRational; 4] {
        std::array::from_fn(|j| (0..4).map(|i| &q[i] * &self.inv_basis[i][j]).sum())
    }

    pub fn to_quat(&self, x: &Elt) -> Quat {
        let mut q: Quat = std::array::from_fn(|_| BigRational::zero());
        for i in 0..4 {
            if x[i] == 0 {
                continue;
            }
            let c = BigRational::from_integer(BigInt::from(x[i]));
            for k in 0..4 {
                q[k] += &c * &self.basis[i][k];
            }
        }
        q
    }

    pub fn mul(&self, x: &Elt, y: &Elt) -> Elt {
        let mut out = [0i128; 4];
        for i in 0..4 {
            if x[i] == 0 {
                continue;
            }
            for j in 0..4 {
                if y[j] == 0 {
                    continue;
                }
                let c = x[i] * y[j];
                for k in 0..4 {
                    out[k] += c * self.mult[i][j][k];
                }
            }
        }
        out
    }

    pub fn conj_elt(&self, x: &Elt) -> Elt {
        let mut out = [0i128; 4];
        for i in 0..4 {
            for k in 0..4 {
                out[k] += x[i] * self.conj[i][k];
            }
        }
        out
    }

    pub fn nrd(&self, x: &Elt) -> i128 {
        crate::lattice::quad_form(&self.gram, x) / 2
    }

    pub fn trd_elt(&self, x: &Elt) -> i128 {
        (0..4).map(|i| x[i] * self.trd[i]).sum()
    }

    pub fn one(&self) -> Elt {
        self.coords_of(&QuatAlgebra::one()).expect("1 lies in O")
    }

    /// Reduced discriminant sqrt|det(trd(e_i conj e_j))|.
    pub fn discriminant(&self) -> u64 {
        reduced_disc(&self.gram)
    }
}

pub fn reduced_disc(gram: &[Vec<i128>]) -> u64 {
    let d = det(gram).abs();
    let s = d.sqrt();
    assert_eq!(&s * &s, d, "discriminant of an order is a square");
    s.to_u64().expect("discriminant fits")
}

/// A Z-lattice in B stored as integer rows scaled by a common denominator.
#[derive(Clone, Debug)]
struct QLattice {
    den: BigInt,
    rows: Vec<Vec<BigInt>>,
}

impl QLattice {
    fn from_quats(qs: &[Quat]) -> Self {
        let den = qs.iter().flat_map(|q| q.iter().map(|c| c.denom().clone())).fold(BigInt::one(), |a, b| a.lcm(&b));
        let rows: Vec<Vec<BigInt>> =
            qs.iter().map(|q| q.iter().map(|c| (c * BigRational::from_integer(den.clone())).to_integer()).collect()).collect();
        QLattice { den, rows: hnf_big(&rows) }
    }

    fn quats(&self) -> Vec<Quat> {
        self.rows
            .iter()
            .map(|r| std::array::from_fn(|k| BigRational::new(r[k].clone(), self.den.clone())))
            .collect()
    }

    fn same(&self, o: &QLattice) -> bool {
        let a: Vec<Vec<BigRational>> = self.quats().into_iter().map(|q| q.to_vec()).collect();
        let b: Vec<Vec<BigRational>> = o.quats().into_iter().map(|q| q.to_vec()).collect();
        a == b
    }
}

/// Closure of a lattice containing 1 under multiplication, if it stays within
/// denominator `max_den`.
fn ring_closure(alg: &QuatAlgebra, gens: &[Quat], max_den: &BigInt) -> Option<Vec<Quat>> {
    let mut lat = QLattice::from_quats(gens);
    for _ in 0..8 {
        let qs = lat.quats();
        let mut all = qs.clone();
        for x in &qs {
            for y in &qs {
                all.push(alg.mul(x, y));
            }
        }
        let next = QLattice::from_quats(&all);
        if &next.den > max_den || next.rows.len() != 4 {
            return None;
        }
        if next.same(&lat) {
            return Some(lat.quats());
        }
        lat = next;
    }
    None
}

/// A maximal order of the algebra, by saturating Z<1, i, j, k> prime by prime.
pub fn maximal_order(alg: &QuatAlgebra) -> Result<MaximalOrder> {
    let std_basis: Vec<Quat> = (0..4)
        .map(|k| std::array::from_fn(|i| if i == k { BigRational::one() } else { BigRational::zero() }))
        .collect();
    let mut o = MaximalOrder::from_basis(alg.clone(), std_basis)?;
    let target = alg.discriminant();
    let mut guard = 0;
    while o.discriminant() != target {
        guard += 1;
        if guard > 64 {
            return Err(Error::Verification("maximal order saturation did not terminate".into()));
        }
        let ratio = o.discriminant() / target;
        let l = *prime_divisors(ratio).first().expect("ratio > 1");
        let li = l as i128;
        let mut enlarged = None;
        'search: for idx in 1..li.pow(4) {
            let c: [i128; 4] = std::array::from_fn(|k| (idx / li.pow(k as u32)) % li);
            let mut x: Quat = std::array::from_fn(|_| BigRational::zero());
            for (i, &ci) in c.iter().enumerate() {
                for k in 0..4 {
                    x[k] += &o.basis[i][k] * BigRational::new(BigInt::from(ci), BigInt::from(l));
                }
            }
            if !o.alg.nrd(&x).is_integer() || !o.alg.trd(&x).is_integer() {
                continue;
            }
            let mut gens = o.basis.clone();
            gens.push(x);
            let max_den = BigInt::from(l) * o_den(&o);
            if let Some(b) = ring_closure(alg, &gens, &max_den) {
                if let Ok(new) = MaximalOrder::from_basis(alg.clone(), b) {
                    if new.discriminant() < o.discriminant() {
                        enlarged = Some(new);
                        break 'search;
                    }
                }
            }
        }
        o = enlarged.ok_or_else(|| Error::Verification(format!("order not maximal at {l} but no enlargement found")))?;
    }
    Ok(o)
}

fn o_den(o: &MaximalOrder) -> BigInt {
    o.basis.iter().flat_map(|q| q.iter().map(|c| c.denom().clone())).fold(BigInt::one(), |a, b| a.lcm(&b))
}

/// The left order of a right ideal `I` of O, as I conj(I) / N(I).
pub fn left_order_quats(o: &MaximalOrder, ideal_rows: &[Elt], norm: i128) -> Vec<Quat> {
    let mut prods = Vec::new();
    for x in ideal_rows {
        for y in ideal_rows {
            prods.push(o.mul(x, &o.conj_elt(y)));
        }
    }
    let rows: Vec<Vec<i128>> = prods.iter().map(|v| v.to_vec()).collect();
    let h = crate::lattice::hnf(&rows);
    h.iter()
        .map(|r| {
            let e: Elt = [r[0], r[1], r[2], r[3]];
            let q = o.to_quat(&e);
            q.map(|c| c / rat(norm as i64))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quatorders::algebra::construct_algebra;
    use proptest::prelude::*;

    #[test]
    fn maximal_orders_have_the_right_discriminant() {
        for q in [2u64, 3, 5, 7, 11, 13, 17, 23] {
            let alg = construct_algebra(&[q], &[]).unwrap();
            let o = maximal_order(&alg).unwrap();
            assert_eq!(o.discriminant(), q, "disc {q}");
            assert!(o.coords_of(&QuatAlgebra::one()).is_some());
        }
    }

    proptest! {
        #[test]
        fn structure_constants_agree_with_algebra(x in proptest::array::uniform4(-5i128..5), y in proptest::array::uniform4(-5i128..5)) {
            let alg = construct_algebra(&[3], &[5]).unwrap();
            let o = maximal_order(&alg).unwrap();
            let prod = o.mul(&x, &y);
            prop_assert_eq!(o.to_quat(&prod), alg.mul(&o.to_quat(&x), &o.to_quat(&y)));
            prop_assert_eq!(rat(o.nrd(&x) as i64), alg.nrd(&o.to_quat(&x)));
            prop_assert_eq!(o.nrd(&prod), o.nrd(&x) * o.nrd(&y));
        }
    }
}

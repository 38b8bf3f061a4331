//! Elements of R[x]/Phi_m(x) for a coefficient ring R. Used with exact
//! rationals (eigenvector computations) and with Z/p^N (character sums).

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt::Debug;
use std::sync::Arc;

use super::padic::Zpn;
use crate::error::{Error, Result};

pub trait Coeff: Clone + PartialEq + Debug {
    fn zero_like(&self) -> Self;
    fn int_like(&self, k: i64) -> Self;
    fn c_add(&self, o: &Self) -> Self;
    fn c_sub(&self, o: &Self) -> Self;
    fn c_mul(&self, o: &Self) -> Self;
    fn c_is_zero(&self) -> bool;
    fn c_neg(&self) -> Self {
        self.zero_like().c_sub(self)
    }
}

impl Coeff for BigRational {
    fn zero_like(&self) -> Self {
        BigRational::zero()
    }
    fn int_like(&self, k: i64) -> Self {
        BigRational::from_integer(BigInt::from(k))
    }
    fn c_add(&self, o: &Self) -> Self {
        self + o
    }
    fn c_sub(&self, o: &Self) -> Self {
        self - o
    }
    fn c_mul(&self, o: &Self) -> Self {
        self * o
    }
    fn c_is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
}

impl Coeff for Zpn {
    fn zero_like(&self) -> Self {
        Zpn::zero(self.p, self.prec)
    }
    fn int_like(&self, k: i64) -> Self {
        self.like(k as i128)
    }
    fn c_add(&self, o: &Self) -> Self {
        *self + *o
    }
    fn c_sub(&self, o: &Self) -> Self {
        *self - *o
    }
    fn c_mul(&self, o: &Self) -> Self {
        *self * *o
    }
    fn c_is_zero(&self) -> bool {
        Zpn::is_zero(self)
    }
}

impl Coeff for Cyclotomic<BigRational> {
    fn zero_like(&self) -> Self {
        Cyclotomic::zero(self.order, &BigRational::zero())
    }
    fn int_like(&self, k: i64) -> Self {
        Cyclotomic::scalar(self.order, BigRational::from_integer(BigInt::from(k)))
    }
    fn c_add(&self, o: &Self) -> Self {
        self.add(o)
    }
    fn c_sub(&self, o: &Self) -> Self {
        self.sub(o)
    }
    fn c_mul(&self, o: &Self) -> Self {
        self.mul(o)
    }
    fn c_is_zero(&self) -> bool {
        self.is_zero()
    }
}

pub fn euler_phi(m: u32) -> u32 {
    super::factor(m as u64)
        .into_iter()
        .map(|(p, e)| ((p - 1) * p.pow(e - 1)) as u32)
        .product()
}

/// Integer coefficients of the m-th cyclotomic polynomial, low degree first.
pub fn cyclotomic_poly(m: u32) -> Vec<i64> {
    let mut num = vec![0i64; m as usize + 1];
    num[0] = -1;
    num[m as usize] = 1;
    for d in 1..m {
        if m.is_multiple_of(d) {
            num = poly_div_exact(&num, &cyclotomic_poly(d));
        }
    }
    num
}

fn poly_div_exact(a: &[i64], b: &[i64]) -> Vec<i64> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let da = a.len() - 1;
    let mut q = vec![0i64; da - db + 1];
    for i in (0..=da - db).rev() {
        let c = r[i + db] / b[db];
        q[i] = c;
        for j in 0..=db {
            r[i + j] -= c * b[j];
        }
    }
    debug_assert!(r.iter().all(|&x| x == 0));
    q
}

/// A value in R[zeta_m].
#[derive(Clone, Debug)]
pub struct Cyclotomic<C: Coeff> {
    pub order: u32,
    pub coeffs: Vec<C>,
    phi: Arc<Vec<i64>>,
}

#[derive(serde::Serialize, serde::Deserialize)]
struct CycRepr<C> {
    order: u32,
    coeffs: Vec<C>,
}

impl<C: Coeff + serde::Serialize> serde::Serialize for Cyclotomic<C> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CycRepr { order: self.order, coeffs: self.coeffs.clone() }.serialize(s)
    }
}

impl<'de, C: Coeff + serde::Deserialize<'de>> serde::Deserialize<'de> for Cyclotomic<C> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = CycRepr::<C>::deserialize(d)?;
        let phi = Arc::new(cyclotomic_poly(r.order));
        if r.coeffs.len() + 1 != phi.len() {
            return Err(serde::de::Error::custom("coefficient count does not match the cyclotomic degree"));
        }
        Ok(Cyclotomic { order: r.order, coeffs: r.coeffs, phi })
    }
}

impl<C: Coeff> PartialEq for Cyclotomic<C> {
    fn eq(&self, o: &Self) -> bool {
        self.order == o.order && self.coeffs == o.coeffs
    }
}

impl<C: Coeff> Cyclotomic<C> {
    pub fn zero(order: u32, template: &C) -> Self {
        let phi = Arc::new(cyclotomic_poly(order));
        let n = phi.len() - 1;
        Cyclotomic { order, coeffs: vec![template.zero_like(); n], phi }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len()
    }

    fn reduce_long(&self, long: Vec<C>) -> Self {
        let n = self.degree();
        let mut a = long;
        for i in (n..a.len()).rev() {
            let c = a[i].clone();
            if c.c_is_zero() {
                continue;
            }
            for j in 0..n {
                let t = c.c_mul(&c.int_like(self.phi[j]));
                a[i - n + j] = a[i - n + j].c_sub(&t);
            }
            a[i] = c.zero_like();
        }
        a.truncate(n);
        while a.len() < n {
            a.push(self.coeffs[0].zero_like());
        }
        Cyclotomic { order: self.order, coeffs: a, phi: self.phi.clone() }
    }

    /// Builds sum_k c_k zeta^{e_k} from exponent/coefficient pairs.
    pub fn from_power_sum(order: u32, template: &C, terms: impl IntoIterator<Item = (u64, C)>) -> Self {
        let z = Self::zero(order, template);
        let mut long = vec![template.zero_like(); order as usize];
        for (e, c) in terms {
            let k = (e % order as u64) as usize;
            long[k] = long[k].c_add(&c);
        }
        z.reduce_long(long)
    }

    pub fn root_power(order: u32, template: &C, e: u64) -> Self {
        Self::from_power_sum(order, template, [(e, template.int_like(1))])
    }

    pub fn scalar(order: u32, c: C) -> Self {
        let mut z = Self::zero(order, &c);
        z.coeffs[0] = c;
        z
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.c_is_zero())
    }

    pub fn add(&self, o: &Self) -> Self {
        assert_eq!(self.order, o.order);
        let coeffs = self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a.c_add(b)).collect();
        Cyclotomic { coeffs, ..self.clone() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        assert_eq!(self.order, o.order);
        let coeffs = self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a.c_sub(b)).collect();
        Cyclotomic { coeffs, ..self.clone() }
    }

    pub fn neg(&self) -> Self {
        let coeffs = self.coeffs.iter().map(|a| a.c_neg()).collect();
        Cyclotomic { coeffs, ..self.clone() }
    }

    pub fn scale(&self, s: &C) -> Self {
        let coeffs = self.coeffs.iter().map(|a| a.c_mul(s)).collect();
        Cyclotomic { coeffs, ..self.clone() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.order, o.order);
        let n = self.degree();
        let zero = self.coeffs[0].zero_like();
        let mut long = vec![zero; 2 * n.max(1) - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.c_is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                long[i + j] = long[i + j].c_add(&a.c_mul(b));
            }
        }
        self.reduce_long(long)
    }

    /// Multiplication by zeta^e.
    pub fn mul_root(&self, e: u64) -> Self {
        let mut long = vec![self.coeffs[0].zero_like(); self.order as usize];
        for (i, a) in self.coeffs.iter().enumerate() {
            let k = (i as u64 + e) % self.order as u64;
            long[k as usize] = long[k as usize].c_add(a);
        }
        self.reduce_long(long)
    }

    /// The same element viewed in R[zeta_M] for a multiple M of the order.
    pub fn lift_order(&self, big: u32) -> Self {
        assert_eq!(big % self.order, 0);
        let step = (big / self.order) as u64;
        Cyclotomic::from_power_sum(
            big,
            &self.coeffs[0],
            self.coeffs.iter().enumerate().map(|(i, c)| (i as u64 * step, c.clone())),
        )
    }

    /// Galois conjugate zeta -> zeta^k, k prime to the order.
    pub fn galois(&self, k: u64) -> Self {
        Cyclotomic::from_power_sum(
            self.order,
            &self.coeffs[0],
            self.coeffs.iter().enumerate().map(|(i, c)| (i as u64 * k, c.clone())),
        )
    }

    /// Evaluate at a chosen root of unity inside the coefficient ring.
    pub fn eval_at(&self, root: &C) -> C {
        let mut acc = root.zero_like();
        for c in self.coeffs.iter().rev() {
            acc = acc.c_mul(root).c_add(c);
        }
        acc
    }

    pub fn map<D: Coeff>(&self, f: impl Fn(&C) -> D) -> Cyclotomic<D> {
        Cyclotomic { order: self.order, coeffs: self.coeffs.iter().map(f).collect(), phi: self.phi.clone() }
    }

    /// Complex embedding zeta -> exp(2 pi i / m), given a real lift of coefficients.
    pub fn to_complex(&self, lift: impl Fn(&C) -> f64) -> Complex64 {
        let m = self.order as f64;
        self.coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| Complex64::from_polar(lift(c), 2.0 * std::f64::consts::PI * k as f64 / m))
            .sum()
    }

    pub fn as_scalar(&self) -> Option<C> {
        self.coeffs[1..].iter().all(|c| c.c_is_zero()).then(|| self.coeffs[0].clone())
    }
}

impl Cyclotomic<BigRational> {
    /// Multiplicative inverse in the field Q(zeta_m).
    pub fn inverse(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::Verification("inverse of zero in cyclotomic field".into()));
        }
        let n = self.degree();
        // Columns: self * zeta^j.
        let cols: Vec<Self> = (0..n).map(|j| self.mul_root(j as u64)).collect();
        let mut a: Vec<Vec<BigRational>> = (0..n)
            .map(|i| {
                let mut row: Vec<BigRational> = (0..n).map(|j| cols[j].coeffs[i].clone()).collect();
                row.push(if i == 0 { BigRational::one() } else { BigRational::zero() });
                row
            })
            .collect();
        let x = solve_square(&mut a)?;
        Ok(Cyclotomic { coeffs: x, ..self.clone() })
    }

    pub fn is_integral(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_integer())
    }
}

fn solve_square(a: &mut [Vec<BigRational>]) -> Result<Vec<BigRational>> {
    let n = a.len();
    for col in 0..n {
        let piv = (col..n)
            .find(|&r| !Zero::is_zero(&a[r][col]))
            .ok_or_else(|| Error::Verification("singular system".into()))?;
        a.swap(col, piv);
        let inv = a[col][col].recip();
        for v in a[col].iter_mut() {
            *v = &*v * &inv;
        }
        for r in 0..n {
            if r != col && !Zero::is_zero(&a[r][col]) {
                let f = a[r][col].clone();
                for c in col..=n {
                    let t = &a[col][c] * &f;
                    a[r][c] = &a[r][c] - t;
                }
            }
        }
    }
    Ok(a.iter().map(|row| row[n].clone()).collect())
}

/// Real value of a rational coefficient.
pub fn rat_to_f64(q: &BigRational) -> f64 {
    q.numer().to_f64().unwrap_or(f64::NAN) / q.denom().to_f64().unwrap_or(f64::NAN)
}

/// Is the rational a p-adic integer?
pub fn rat_is_p_integral(q: &BigRational, p: u64) -> bool {
    !(q.denom().abs() % BigInt::from(p)).is_zero()
}

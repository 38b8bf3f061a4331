//! Exact linear algebra over Q(zeta_d), eigenform extraction and p-adic normalisation.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::{mat_apply, Cyc, HeckeMatrix, QuaternionicLevel};
use crate::arith::cyclo::Cyclotomic;
use crate::arith::padic::Zpn;
use crate::arith::primes_up_to;
use crate::ellcurve::descent::CurveDescent;
use crate::error::{Error, Result};

/// Basis of the right kernel of a matrix over Q(zeta_d).
pub fn nullspace(rows: &[Vec<Cyc>], ncols: usize) -> Result<Vec<Vec<Cyc>>> {
    let mut a: Vec<Vec<Cyc>> = rows.to_vec();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(piv) = (r..a.len()).find(|&i| !a[i][c].is_zero()) else { continue };
        a.swap(r, piv);
        let inv = a[r][c].inverse()?;
        for v in a[r].iter_mut() {
            *v = v.mul(&inv);
        }
        for i in 0..a.len() {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for k in 0..ncols {
                    let t = a[r][k].mul(&f);
                    a[i][k] = a[i][k].sub(&t);
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == a.len() {
            break;
        }
    }
    let template = rows.first().and_then(|r| r.first()).cloned();
    let Some(template) = template else {
        return Err(Error::InvalidInput("empty system".into()));
    };
    let zero = template.sub(&template);
    let one = Cyclotomic::scalar(template.order, BigRational::one());
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    Ok(free
        .iter()
        .map(|&f| {
            let mut v = vec![zero.clone(); ncols];
            v[f] = one.clone();
            for (i, &pc) in pivots.iter().enumerate() {
                v[pc] = a[i][f].neg();
            }
            v
        })
        .collect())
}

/// Scale a vector so all coordinates are integral with coprime coefficients.
pub fn primitive_integral(v: &[Cyc]) -> Vec<Cyc> {
    let mut den = BigInt::one();
    let mut num_gcd = BigInt::zero();
    for c in v.iter().flat_map(|x| x.coeffs.iter()) {
        den = den.lcm(c.denom());
    }
    for c in v.iter().flat_map(|x| x.coeffs.iter()) {
        num_gcd = num_gcd.gcd(&(c * BigRational::from_integer(den.clone())).to_integer());
    }
    // Fix the sign so the first nonzero coefficient is positive.
    let first = v.iter().flat_map(|x| x.coeffs.iter()).find(|c| !c.is_zero()).cloned();
    let sign = if first.is_some_and(|c| c.is_negative()) { -BigInt::one() } else { BigInt::one() };
    let s = BigRational::new(den * sign, num_gcd);
    v.iter().map(|x| x.scale(&s)).collect()
}

/// The embedding Q(zeta_d) -> Q_p sending zeta_d to a Teichmüller root of unity.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PadicEmbedding {
    pub p: u64,
    pub prec: u32,
    pub d: u64,
    pub zeta: Zpn,
}

impl PadicEmbedding {
    /// zeta_d -> omega(g0)^{(p-1) u / d}, for u prime to d selecting the prime above p.
    pub fn new(p: u64, prec: u32, d: u64, g0: u64, u: u64) -> Result<Self> {
        if !(p - 1).is_multiple_of(d) || num_integer::gcd(u, d.max(1)) != 1 {
            return Err(Error::InvalidInput(format!("bad embedding data d = {d}, u = {u}")));
        }
        let w = Zpn::new(p, prec, g0 as i128).teichmuller();
        let zeta = w.pow((p - 1) / d.max(1) * u);
        Ok(PadicEmbedding { p, prec, d, zeta })
    }

    pub fn embed(&self, x: &Cyc) -> Result<Zpn> {
        let m = x
            .coeffs
            .iter()
            .map(|c| Zpn::from_rational(self.p, self.prec, c))
            .collect::<Result<Vec<_>>>()?;
        let mut acc = Zpn::zero(self.p, self.prec);
        for c in m.iter().rev() {
            acc = acc * self.zeta + *c;
        }
        Ok(acc)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct QuatEigenform {
    /// Exact class values g_k, integral and primitive.
    pub exact: Vec<Cyc>,
    /// p-adic class values scaled so the largest one is 1.
    pub padic: Vec<Zpn>,
    /// Primes used to cut out the eigenspace.
    pub primes: Vec<u64>,
    /// Eigenvalue of the operator at p on the exact form.
    pub p_eigenvalue: Cyc,
    /// alpha to the working precision.
    pub alpha: Zpn,
    pub embedding: PadicEmbedding,
}

impl QuatEigenform {
    pub fn value_exact(&self, q: &QuaternionicLevel, x: &super::XuPoint) -> Cyc {
        q.eval(&self.exact, x)
    }

    pub fn value_padic(&self, q: &QuaternionicLevel, x: &super::XuPoint) -> Result<Zpn> {
        let d = q.d();
        let z = self.embedding.zeta.pow((d - x.t % d) % d);
        Ok(self.padic[x.class] * z)
    }
}

/// Joint eigenvector of the Brandt matrices with the descent's eigenvalues.
pub fn extract_eigenform(q: &QuaternionicLevel, descent: &CurveDescent, prec: u32, bound: u64, u: u64) -> Result<QuatEigenform> {
    let h = q.h();
    let d = q.d();
    let zero = Cyc::zero(d as u32, &BigRational::zero());
    let one = Cyclotomic::scalar(d as u32, BigRational::one());
    let bad = q.ls.p * q.ls.disc() * q.ls.level();
    let mut rows: Vec<Vec<Cyc>> = Vec::new();
    for k in 0..h {
        if !q.admissible(k) {
            let mut r = vec![zero.clone(); h];
            r[k] = one.clone();
            rows.push(r);
        }
    }
    let mut used = Vec::new();
    let mut kernel = vec![];
    for l in primes_up_to(bound as usize).into_iter().filter(|l| !bad.is_multiple_of(*l)) {
        let Some(a) = descent.eigenvalue(l) else { continue };
        let m = q.brandt_matrix(l)?;
        for (i, row) in m.iter().enumerate() {
            let mut r = row.clone();
            r[i] = r[i].sub(&a);
            rows.push(r);
        }
        used.push(l);
        kernel = nullspace(&rows, h)?;
        if kernel.len() <= 1 {
            break;
        }
    }
    if kernel.len() != 1 {
        return Err(Error::Verification(format!(
            "joint eigenspace has dimension {} after T_l for l in {used:?}",
            kernel.len()
        )));
    }
    let g = primitive_integral(&kernel[0]);
    for &l in &used {
        let a = descent.eigenvalue(l).unwrap();
        let tg = mat_apply(&q.brandt_matrix(l)?, &g);
        if tg.iter().zip(&g).any(|(x, y)| *x != y.mul(&a)) {
            return Err(Error::Verification(format!("T_{l} eigenvalue mismatch")));
        }
    }
    let up = q.p_operator()?;
    let ug = mat_apply(&up, &g);
    let (k0, g0) = g.iter().enumerate().find(|(_, x)| !x.is_zero()).expect("nonzero eigenvector");
    let lambda = ug[k0].mul(&g0.inverse()?);
    if ug.iter().zip(&g).any(|(x, y)| *x != y.mul(&lambda)) {
        return Err(Error::Verification("eigenform is not an eigenvector at p".into()));
    }
    crate::arith::padic::check_precision(q.ls.p, prec)?;
    let work = crate::arith::padic::max_precision(q.ls.p);
    let embedding = PadicEmbedding::new(q.ls.p, work, d, q.psi.g0, u)?;
    let lam_p = embedding.embed(&lambda)?.reduce_to(prec);
    let alpha = match descent.alpha {
        Some(a) => a.reduce_to(prec.min(a.prec)),
        None => return Err(Error::Unsupported("alpha is only available for quadratic psi".into())),
    };
    let alpha = Zpn::new(alpha.p, prec, alpha.v as i128);
    match q.ls.local {
        crate::quatorders::embedding::LocalAtP::Eichler => {
            if lam_p != alpha {
                return Err(Error::Verification(format!("U_p eigenvalue {lam_p:?} differs from alpha {alpha:?}")));
            }
        }
        crate::quatorders::embedding::LocalAtP::Maximal => {
            // T_p = alpha + p / alpha.
            let want = alpha + alpha.like(q.ls.p as i128) * alpha.inv()?;
            if lam_p != want {
                return Err(Error::Verification(format!("T_p eigenvalue {lam_p:?} differs from alpha + p/alpha")));
            }
        }
    }
    let padic = normalise(&g, &embedding)?
        .into_iter()
        .map(|x| {
            if x.prec < prec {
                Err(Error::Unsupported(format!("eigenform loses {} digits of precision", work - x.prec)))
            } else {
                Ok(x.reduce_to(prec))
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let embedding = PadicEmbedding::new(q.ls.p, prec, d, q.psi.g0, u)?;
    Ok(QuatEigenform { exact: g, padic, primes: used, p_eigenvalue: lambda, alpha, embedding })
}

/// Dimension of the common kernel of T_l - a_l(g) over the given primes (admissible classes only).
pub fn joint_eigenspace_dimension(q: &QuaternionicLevel, descent: &CurveDescent, primes: &[u64]) -> Result<usize> {
    let h = q.h();
    let d = q.d() as u32;
    let zero = Cyc::zero(d, &BigRational::zero());
    let one = Cyclotomic::scalar(d, BigRational::one());
    let mut rows: Vec<Vec<Cyc>> = (0..h)
        .filter(|&k| !q.admissible(k))
        .map(|k| {
            let mut r = vec![zero.clone(); h];
            r[k] = one.clone();
            r
        })
        .collect();
    for &l in primes {
        let a = descent
            .eigenvalue(l)
            .ok_or_else(|| Error::InvalidInput(format!("no eigenvalue of g recorded at {l}")))?;
        for (i, row) in q.brandt_matrix(l)?.iter().enumerate() {
            let mut r = row.clone();
            r[i] = r[i].sub(&a);
            rows.push(r);
        }
    }
    Ok(nullspace(&rows, h)?.len())
}

/// Divide by the value of smallest valuation, leaving values in Z/p^N with a unit among them.
fn normalise(g: &[Cyc], emb: &PadicEmbedding) -> Result<Vec<Zpn>> {
    let vals: Vec<Zpn> = g.iter().map(|x| emb.embed(x)).collect::<Result<_>>()?;
    let (k, v) = vals
        .iter()
        .enumerate()
        .filter(|(_, x)| !x.is_zero())
        .map(|(k, x)| (k, x.valuation()))
        .min_by_key(|&(_, v)| v)
        .ok_or_else(|| Error::Verification("eigenform vanishes p-adically".into()))?;
    let unit = vals[k].div_p_power(v)?;
    let unit = Zpn::new(emb.p, emb.prec - v, unit.v as i128).inv()?;
    vals.iter()
        .map(|x| {
            let y = x.div_p_power(v)?;
            Ok(y * unit)
        })
        .collect()
}

/// Apply a Hecke matrix to p-adic class values.
pub fn apply_padic(m: &HeckeMatrix, v: &[Zpn], emb: &PadicEmbedding) -> Result<Vec<Zpn>> {
    m.iter()
        .map(|row| {
            let mut acc = v[0].like(0);
            for (a, b) in row.iter().zip(v) {
                let e = emb.embed(a)?;
                acc = acc + Zpn::new(b.p, b.prec, e.v as i128) * *b;
            }
            Ok(acc)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::DirichletModP;
    use crate::ellcurve::descent::find_twist_descent;
    use crate::ellcurve::WeierstrassCurve;
    use crate::quatorders::embedding::{LevelStructure, LocalAtP};

    #[test]
    fn nullspace_of_small_matrix() {
        let c = |v: i64| Cyclotomic::scalar(1, BigRational::from_integer(v.into()));
        let rows = vec![vec![c(1), c(2), c(3)], vec![c(2), c(4), c(6)]];
        let k = nullspace(&rows, 3).unwrap();
        assert_eq!(k.len(), 2);
        for v in k {
            let s = rows[0].iter().zip(&v).fold(c(0), |a, (x, y)| a.add(&x.mul(y)));
            assert!(s.is_zero());
        }
    }

    #[test]
    fn running_example_eigenform() {
        let e = WeierstrassCurve::new([1, 1, 1, -10, -10]).unwrap().quadratic_twist(5).unwrap();
        let desc = find_twist_descent(&e, 5, 50, 20).unwrap();
        let ls = LevelStructure::build(-4, 1, 5, 3, LocalAtP::Eichler, 12).unwrap();
        let q = QuaternionicLevel::new(ls, DirichletModP::quadratic(5)).unwrap();
        let g = extract_eigenform(&q, &desc, 20, 50, 1).unwrap();
        assert_eq!(g.primes, vec![2]);
        assert!(g.padic.iter().any(|x| x.is_unit()));
        assert_eq!(g.alpha, Zpn::new(5, 20, 1));
        let up = q.p_operator().unwrap();
        let ug = apply_padic(&up, &g.padic, &g.embedding).unwrap();
        let scaled: Vec<Zpn> = g.padic.iter().map(|x| *x * g.alpha).collect();
        assert_eq!(ug, scaled);
    }

    #[test]
    fn good_twist_eigenforms() {
        let e = WeierstrassCurve::new([0, -1, 1, -10, -20]).unwrap().quadratic_twist(5).unwrap();
        let desc = find_twist_descent(&e, 5, 50, 20).unwrap();
        for d_k in [-4i64, -3] {
            let ls = LevelStructure::build(d_k, 1, 5, 11, LocalAtP::Maximal, 12).unwrap();
            let q = QuaternionicLevel::new(ls, DirichletModP::quadratic(5)).unwrap();
            let g = extract_eigenform(&q, &desc, 20, 50, 1).unwrap();
            assert_eq!(g.p_eigenvalue.as_scalar().unwrap(), BigRational::from_integer(1.into()));
        }
    }
}

//! Explicit splittings B (x) Q_p = M_2(Q_p) for primes p not dividing 2ab.

use super::algebra::QuatAlgebra;
use super::order::MaximalOrder;
use crate::arith::padic::{Mat2, Zpn};
use crate::error::{Error, Result};

/// Matrices (I, J) over Z/p^prec with I^2 = a, J^2 = b, IJ = -JI.
pub fn split_generators(alg: &QuatAlgebra, p: u64, prec: u32) -> Result<(Mat2, Mat2)> {
    if p == 2 || (alg.a * alg.b) % p as i64 == 0 {
        return Err(Error::Unsupported(format!("splitting at {p} requires p odd and prime to ab")));
    }
    let z = |v: i128| Zpn::new(p, prec, v);
    let (a, b) = (alg.a as i128, alg.b as i128);
    // Find x, y with a x^2 + b y^2 a nonzero square mod p.
    let pi = p as i128;
    let (x, y) = (0..pi)
        .flat_map(|x| (0..pi).map(move |y| (x, y)))
        .find(|&(x, y)| {
            let v = (a * x * x + b * y * y).rem_euclid(pi);
            v != 0 && crate::arith::kronecker(v as i64, p as i64) == 1
        })
        .ok_or_else(|| Error::Verification("no square value of the norm form".into()))?;
    let delta = z(a * x * x + b * y * y);
    let s = delta.sqrt_unit()?;
    // u = x i + y j has u^2 = s^2; k = ij anticommutes with u and k^2 = -ab.
    let u = Mat2::new(s, z(0), z(0), -s);
    let kk = Mat2::new(z(0), z(-a * b), z(1), z(0));
    let uk = u.mul(&kk);
    let dinv = delta.inv()?;
    let i_m = u.scale(z(x * a)).sub(&uk.scale(z(y))).scale(dinv);
    let j_m = u.scale(z(y * b)).add(&uk.scale(z(x))).scale(dinv);
    let id = Mat2::identity(p, prec);
    if i_m.mul(&i_m) != id.scale(z(a)) || j_m.mul(&j_m) != id.scale(z(b)) || i_m.mul(&j_m) != j_m.mul(&i_m).scale(z(-1)) {
        return Err(Error::Verification("splitting relations failed".into()));
    }
    Ok((i_m, j_m))
}

/// Images of the basis of O under the splitting at p.
pub fn basis_images(o: &MaximalOrder, p: u64, prec: u32) -> Result<Vec<Mat2>> {
    let (i_m, j_m) = split_generators(&o.alg, p, prec)?;
    let k_m = i_m.mul(&j_m);
    let one = Mat2::identity(p, prec);
    let gens = [one, i_m, j_m, k_m];
    o.basis
        .iter()
        .map(|q| {
            let mut acc = Mat2::zero(p, prec);
            for (c, g) in q.iter().zip(&gens) {
                acc = acc.add(&g.scale(Zpn::from_rational(p, prec, c)?));
            }
            Ok(acc)
        })
        .collect()
}

/// Apply a linear map given by basis images to an element of O.
pub fn image(imgs: &[Mat2], x: &[i128; 4]) -> Mat2 {
    let (p, prec) = (imgs[0].p(), imgs[0].prec());
    let mut acc = Mat2::zero(p, prec);
    for (c, m) in x.iter().zip(imgs) {
        if *c != 0 {
            acc = acc.add(&m.scale(Zpn::new(p, prec, *c)));
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quatorders::algebra::construct_algebra;
    use crate::quatorders::order::maximal_order;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn splitting_is_multiplicative(x in proptest::array::uniform4(-6i128..6), y in proptest::array::uniform4(-6i128..6), pi in 0usize..3) {
            let p = [5u64, 7, 13][pi];
            let alg = construct_algebra(&[11], &[p]).unwrap();
            let o = maximal_order(&alg).unwrap();
            let imgs = basis_images(&o, p, 8).unwrap();
            let lhs = image(&imgs, &o.mul(&x, &y));
            prop_assert_eq!(lhs, image(&imgs, &x).mul(&image(&imgs, &y)));
            prop_assert_eq!(image(&imgs, &x).det(), Zpn::new(p, 8, o.nrd(&x)));
        }
    }
}

//! Ramification data, optimal embeddings of quadratic orders, the level
//! order R and its standardised local structure at p.

use serde::{Deserialize, Serialize};

use super::algebra::{construct_algebra, QuatAlgebra};
use super::ideals::{right_ideal_classes, Lat, RightIdeals};
use super::order::{left_order_quats, maximal_order, Elt, MaximalOrder};
use super::splitting::{basis_images, image};
use crate::arith::padic::{Mat2, Zpn};
use crate::arith::{factor, kronecker, prime_divisors};
use crate::error::{Error, Result};
use crate::lattice::{congruence_kernel, quad_form, short_vectors};

/// Finite ramified primes and Eichler level primes away from p.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RamSet {
    pub finite: Vec<u64>,
    pub level_primes: Vec<u64>,
}

impl RamSet {
    pub fn disc(&self) -> u64 {
        self.finite.iter().product()
    }
}

/// S = {inf} together with the primes of N/p^2 inert in K.
pub fn ramification_set(n_over_p2: u64, d_k: i64) -> Result<RamSet> {
    let fac = factor(n_over_p2);
    if fac.iter().any(|&(_, e)| e > 1) {
        return Err(Error::Hypothesis(format!("N/p^2 = {n_over_p2} is not squarefree (restricted input)")));
    }
    let mut finite = Vec::new();
    let mut level_primes = Vec::new();
    for (q, _) in fac {
        match kronecker(d_k, q as i64) {
            -1 => finite.push(q),
            1 => level_primes.push(q),
            _ => return Err(Error::Hypothesis(format!("{q} ramifies in K"))),
        }
    }
    if finite.len() % 2 == 0 {
        return Err(Error::Hypothesis(format!(
            "#S = {} is odd (indefinite case unsupported)",
            finite.len() + 1
        )));
    }
    Ok(RamSet { finite, level_primes })
}

/// Local shape of R at p.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LocalAtP {
    /// Standard Eichler order of level p; the setting with additive reduction.
    Eichler,
    /// M_2(Z_p); the good-reduction twist setting.
    Maximal,
}

/// Trace and norm of w' = c(D + sqrt D)/2.
pub fn omega_trace_norm(d_k: i64, c: u64) -> (i128, i128) {
    let (d, c) = (d_k as i128, c as i128);
    (c * d, c * c * (d * d - d) / 4)
}

/// True if Z + f*y is optimally embedded in `lat`, where Z[y] has conductor `c`.
pub fn is_optimal(o: &MaximalOrder, lat: &Lat, y: &Elt, f: i128, c: u64) -> bool {
    let g = y.map(|v| v * f);
    if !lat.contains(&g) || !lat.contains(&o.one()) {
        return false;
    }
    let mut primes = prime_divisors(c);
    for q in prime_divisors(f as u64) {
        if !primes.contains(&q) {
            primes.push(q);
        }
    }
    let one = o.one();
    let q_lat = |q: i128| lat.scaled(q);
    primes.iter().all(|&q| {
        let qi = q as i128;
        let ql = q_lat(qi);
        (0..qi).all(|k| {
            let e: Elt = std::array::from_fn(|t| g[t] + k * one[t]);
            !ql.contains(&e)
        })
    })
}

/// An element of O with the trace and norm of w' giving an optimal embedding of O_c.
pub fn find_optimal_embedding(o: &MaximalOrder, d_k: i64, c: u64) -> Option<Elt> {
    let (t, n) = omega_trace_norm(d_k, c);
    let full = Lat::from_gens(&[[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]]);
    short_vectors(&o.gram, 2 * n, false)
        .into_iter()
        .filter(|x| quad_form(&o.gram, x) == 2 * n)
        .map(|x| [x[0], x[1], x[2], x[3]])
        .filter(|x| o.trd_elt(x) == t)
        .find(|x| is_optimal(o, &full, x, 1, c))
}

/// Representatives of the maximal-order types: left orders of right ideal classes of O.
pub fn maximal_order_types(o: &MaximalOrder, disc: u64) -> Result<Vec<MaximalOrder>> {
    let full = Lat::from_gens(&[[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]]);
    let ctx = RightIdeals::new(o.clone(), full);
    let aux = (2..).find(|l| crate::arith::is_prime(*l) && !disc.is_multiple_of(*l)).unwrap();
    let classes = right_ideal_classes(&ctx, disc, 1, aux)?;
    classes
        .reps
        .iter()
        .zip(&classes.norms)
        .map(|(i, &n)| MaximalOrder::from_basis(o.alg.clone(), left_order_quats(o, &i.rows, n)))
        .collect()
}

/// The order R, the embedding y = iota(w') and the standardised splitting at p.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LevelStructure {
    pub d_k: i64,
    pub c: u64,
    pub p: u64,
    pub ram: RamSet,
    pub local: LocalAtP,
    pub o: MaximalOrder,
    pub r: Lat,
    pub y: Elt,
    /// F^{-1} iota_p(e_i) F for the basis of O; iota_p(y) = (t 1; -n 0).
    pub w_basis: Vec<Mat2>,
    pub prec: u32,
}

fn local_conditions(imgs: &[Mat2], pick: impl Fn(&Mat2) -> Zpn, modulus: i128) -> (Vec<i128>, i128) {
    (imgs.iter().map(|m| pick(m).balanced().rem_euclid(modulus)).collect(), modulus)
}

impl LevelStructure {
    pub fn build(d_k: i64, c: u64, p: u64, n_over_p2: u64, local: LocalAtP, prec: u32) -> Result<Self> {
        let ram = ramification_set(n_over_p2, d_k)?;
        if ram.level_primes.contains(&2) || p == 2 {
            return Err(Error::Unsupported("Eichler level at 2".into()));
        }
        let mut avoid = vec![p];
        avoid.extend(&ram.level_primes);
        let alg: QuatAlgebra = construct_algebra(&ram.finite, &avoid)?;
        let o0 = maximal_order(&alg)?;
        let (o, y) = match find_optimal_embedding(&o0, d_k, c) {
            Some(y) => (o0, y),
            None => maximal_order_types(&o0, ram.disc())?
                .into_iter()
                .find_map(|o| find_optimal_embedding(&o, d_k, c).map(|y| (o, y)))
                .ok_or_else(|| Error::Verification("no maximal order admits an optimal embedding".into()))?,
        };
        let (t, n) = omega_trace_norm(d_k, c);

        // Change of basis at p putting iota(y) in companion form.
        let raw = basis_images(&o, p, prec)?;
        let yp = image(&raw, &y);
        let z = |v: i128| Zpn::new(p, prec, v);
        let cands = [(z(1), z(0)), (z(0), z(1)), (z(1), z(1))];
        let f = cands
            .iter()
            .map(|&(v0, v1)| {
                let yv0 = yp.m[0][0] * v0 + yp.m[0][1] * v1;
                let yv1 = yp.m[1][0] * v0 + yp.m[1][1] * v1;
                Mat2::new(yv0, v0, yv1, v1)
            })
            .find(|f| f.det().is_unit())
            .ok_or_else(|| Error::Verification("no cyclic vector for iota(y) at p".into()))?;
        let finv = f.inv()?;
        let w_basis: Vec<Mat2> = raw.iter().map(|m| finv.mul(m).mul(&f)).collect();
        if image(&w_basis, &y) != Mat2::from_ints(p, prec, [[t, 1], [-n, 0]]) {
            return Err(Error::Verification("companion normal form failed".into()));
        }

        let pi = p as i128;
        let mut conds = Vec::new();
        if local == LocalAtP::Eichler {
            conds.push(local_conditions(&w_basis, |m| m.m[0][1], pi));
        }
        for &q in &ram.level_primes {
            let imgs_q = basis_images(&o, q, 1)?;
            let yq = image(&imgs_q, &y);
            let v = eigenvector_mod_q(&yq, q)?;
            // det(v, z v) for each basis element.
            let coeffs: Vec<i128> = imgs_q
                .iter()
                .map(|m| {
                    let zv0 = m.m[0][0].v as i128 * v.0 + m.m[0][1].v as i128 * v.1;
                    let zv1 = m.m[1][0].v as i128 * v.0 + m.m[1][1].v as i128 * v.1;
                    (v.0 * zv1 - v.1 * zv0).rem_euclid(q as i128)
                })
                .collect();
            conds.push((coeffs, q as i128));
        }
        let r = if conds.is_empty() {
            Lat::from_gens(&[[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]])
        } else {
            let k = congruence_kernel(4, &conds);
            Lat::from_gens(&k.iter().map(|r| [r[0], r[1], r[2], r[3]]).collect::<Vec<_>>())
        };
        let ls = LevelStructure { d_k, c, p, ram, local, o, r, y, w_basis, prec };
        ls.verify()?;
        Ok(ls)
    }

    pub fn level(&self) -> u64 {
        let lp: u64 = self.ram.level_primes.iter().product();
        match self.local {
            LocalAtP::Eichler => lp * self.p,
            LocalAtP::Maximal => lp,
        }
    }

    pub fn disc(&self) -> u64 {
        self.ram.disc()
    }

    /// Conductor c' of the order embedded in R: cp or c.
    pub fn embedded_conductor(&self) -> u64 {
        match self.local {
            LocalAtP::Eichler => self.c * self.p,
            LocalAtP::Maximal => self.c,
        }
    }

    pub fn ideals(&self) -> RightIdeals {
        RightIdeals::new(self.o.clone(), self.r.clone())
    }

    /// Index, multiplicative closure and optimality of R.
    pub fn verify(&self) -> Result<()> {
        if self.r.index() != self.level() as i128 {
            return Err(Error::Verification(format!("[O:R] = {} but level is {}", self.r.index(), self.level())));
        }
        for a in &self.r.rows {
            for b in &self.r.rows {
                if !self.r.contains(&self.o.mul(a, b)) {
                    return Err(Error::Verification("R is not closed under multiplication".into()));
                }
            }
        }
        let f = (self.embedded_conductor() / self.c) as i128;
        if !is_optimal(&self.o, &self.r, &self.y, f, self.c) {
            return Err(Error::Verification("embedding is not optimal".into()));
        }
        let yq = self.o.to_quat(&self.y);
        let (t, n) = omega_trace_norm(self.d_k, self.c);
        let alg = &self.o.alg;
        let lhs = alg.mul(&yq, &yq);
        let rhs: [_; 4] = std::array::from_fn(|k| {
            &yq[k] * super::algebra::rat(t as i64) - super::algebra::quat_from_ints([n as i64, 0, 0, 0])[k].clone()
        });
        if lhs != rhs {
            return Err(Error::Verification("iota(w')^2 != tr iota(w') - nm".into()));
        }
        Ok(())
    }

    /// The local matrix of x at p in the standard coordinates; x must lie in R.
    pub fn phi(&self, x: &Elt) -> Mat2 {
        let w = image(&self.w_basis, x);
        let pr = self.prec - 1;
        match self.local {
            LocalAtP::Eichler => {
                let p = w.m[0][0].like(self.p as i128);
                let b = w.m[0][1].div_p_power(1).expect("element of R");
                Mat2::new(w.m[0][0].reduce_to(pr), b, (w.m[1][0] * p).reduce_to(pr), w.m[1][1].reduce_to(pr))
            }
            LocalAtP::Maximal => Mat2::new(
                w.m[0][0].reduce_to(pr),
                w.m[0][1].reduce_to(pr),
                w.m[1][0].reduce_to(pr),
                w.m[1][1].reduce_to(pr),
            ),
        }
    }

    /// Element of R representing iota(c'(-b + sqrt D)/2) for an O_K-ideal [A, (-b + sqrt D)/2].
    pub fn ideal_generator(&self, b: i64) -> Elt {
        let cp = self.embedded_conductor() as i128;
        let scale = cp / self.c as i128;
        let shift = cp * (b as i128 + self.d_k as i128) / 2;
        let one = self.o.one();
        std::array::from_fn(|k| scale * self.y[k] - shift * one[k])
    }

    /// The lattice iota(a)R for a = [A, c'(-b + sqrt D)/2] in O_{c'}.
    pub fn ideal_lattice(&self, norm: i64, b: i64) -> Lat {
        let g = self.ideal_generator(b);
        let a = norm as i128;
        let mut gens: Vec<Elt> = self.r.rows.iter().map(|r| r.map(|v| v * a)).collect();
        gens.extend(self.r.rows.iter().map(|r| self.o.mul(&g, r)));
        Lat::from_gens(&gens)
    }

    /// { x in M : x_p in beta R_p } for an integral matrix beta with det a power of p times a unit.
    pub fn local_sublattice(&self, m: &Lat, beta: &[[i128; 2]; 2]) -> Lat {
        let det = beta[0][0] * beta[1][1] - beta[0][1] * beta[1][0];
        let k = crate::arith::valuation(det, self.p);
        if k == 0 {
            return m.clone();
        }
        let adj = [[beta[1][1], -beta[0][1]], [-beta[1][0], beta[0][0]]];
        let lower = match self.local {
            LocalAtP::Eichler => k + 1,
            LocalAtP::Maximal => k,
        };
        self.entry_conditions(m, &adj, [[k, k], [lower, k]])
    }

    /// { x in M : p^{e_rs} divides (a phi(x))_rs }.
    pub fn entry_conditions(&self, m: &Lat, a: &[[i128; 2]; 2], e: [[u32; 2]; 2]) -> Lat {
        let pr = self.prec - 1;
        assert!(e.iter().flatten().all(|&x| x < pr), "precision too small for the local condition");
        let am = Mat2::from_ints(self.p, pr, *a);
        let imgs: Vec<Mat2> = m.rows.iter().map(|x| am.mul(&self.phi(x))).collect();
        let pi = self.p as i128;
        let mut conds = Vec::new();
        for r in 0..2 {
            for s in 0..2 {
                if e[r][s] > 0 {
                    conds.push(local_conditions(&imgs, |x| x.m[r][s], pi.pow(e[r][s])));
                }
            }
        }
        if conds.is_empty() {
            return m.clone();
        }
        let ker = congruence_kernel(4, &conds);
        Lat::from_gens(&ker.iter().map(|c| m.combine(c)).collect::<Vec<_>>())
    }

    /// p^n R_n for R_n = delta_n R delta_n^{-1} with delta_n = diag(p^{n-1}, 1); a sublattice of R.
    pub fn conjugated_order_scaled(&self, n: u32) -> Result<Lat> {
        if n == 0 || self.local != LocalAtP::Eichler {
            return Err(Error::InvalidInput("conjugated orders need n >= 1 and an Eichler order at p".into()));
        }
        let pn = (self.p as i128).pow(n);
        let scaled = self.r.scaled(pn);
        if n == 1 {
            return Ok(scaled);
        }
        Ok(self.entry_conditions(&self.r, &[[1, 0], [0, 1]], [[n, 2 * n - 1], [2, n]]))
    }

    /// Optimality of Z + p^n w' in R_n, tested on the scaled lattice.
    pub fn conjugate_is_optimal(&self, n: u32) -> Result<bool> {
        let lat = self.conjugated_order_scaled(n)?;
        let pi = self.p as i128;
        let pn = pi.pow(n);
        let one = self.o.one();
        let gen = self.y.map(|v| v * pn * pn);
        if !lat.contains(&gen) || !lat.contains(&one.map(|v| v * pn)) {
            return Ok(false);
        }
        // p^n (k + p^{n-1} y) must not lie in p^n R_n.
        Ok((0..pi).all(|k| {
            let e: Elt = std::array::from_fn(|t| pn * (k * one[t] + pn / pi * self.y[t]));
            !lat.contains(&e)
        }))
    }
}

fn eigenvector_mod_q(m: &Mat2, q: u64) -> Result<(i128, i128)> {
    let qi = q as i128;
    for v0 in 0..qi {
        for v1 in 0..qi {
            if (v0, v1) == (0, 0) {
                continue;
            }
            let a = m.m[0][0].v as i128 * v0 + m.m[0][1].v as i128 * v1;
            let b = m.m[1][0].v as i128 * v0 + m.m[1][1].v as i128 * v1;
            if (v0 * b - v1 * a).rem_euclid(qi) == 0 {
                return Ok((v0, v1));
            }
        }
    }
    Err(Error::Hypothesis(format!("iota(w') has no eigenline mod {q}; {q} must split in K")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quatorders::ideals::mass;
    use num_bigint::BigInt;
    use num_rational::BigRational;

    #[test]
    fn ramification_examples() {
        assert_eq!(ramification_set(3, -4).unwrap().finite, vec![3]);
        assert!(ramification_set(3, -11).is_err());
        assert!(ramification_set(1, -4).is_err());
        assert!(ramification_set(9, -4).is_err());
    }

    #[test]
    fn running_example_level_structure() {
        let ls = LevelStructure::build(-4, 1, 5, 3, LocalAtP::Eichler, 12).unwrap();
        assert_eq!(ls.disc(), 3);
        assert_eq!(ls.level(), 5);
        let classes = right_ideal_classes(&ls.ideals(), 3, 5, 2).unwrap();
        assert_eq!(classes.len(), 2);
        assert_eq!(classes.mass, BigRational::from_integer(BigInt::from(1)));
        // Normal form of iota(p w') in the standard coordinates.
        let pw = ls.y.map(|v| v * 5);
        let m = ls.phi(&pw);
        assert_eq!(m.m[0][0].residue(), 0);
        assert_eq!(m.m[1][0].residue(), 0);
        assert_eq!(m.m[1][1].residue(), 0);
        assert!(m.m[0][1].is_unit());
    }

    #[test]
    fn good_twist_orders_need_other_types() {
        let split = LevelStructure::build(-4, 1, 5, 11, LocalAtP::Maximal, 12).unwrap();
        let inert = LevelStructure::build(-3, 1, 5, 11, LocalAtP::Maximal, 12).unwrap();
        for ls in [&split, &inert] {
            assert_eq!(ls.disc(), 11);
            let cl = right_ideal_classes(&ls.ideals(), 11, 1, 2).unwrap();
            assert_eq!(cl.mass, mass(11, 1));
            assert_eq!(cl.len(), 2);
        }
        assert_eq!(split.ideals().unit_count(&split.r), 4);
        assert_eq!(inert.ideals().unit_count(&inert.r), 6);
    }

    /// Eichler class numbers from the Eichler formula, counting embedded units.
    fn eichler_class_number(disc: u64, level: u64) -> BigRational {
        let m = mass(disc, level);
        let prod = |d: i64| -> i64 {
            let a: i64 = prime_divisors(disc).iter().map(|&q| 1 - kronecker(d, q as i64) as i64).product();
            let b: i64 = prime_divisors(level).iter().map(|&l| 1 + kronecker(d, l as i64) as i64).product();
            a * b
        };
        m + BigRational::new(prod(-4).into(), 4.into()) + BigRational::new(prod(-3).into(), 3.into())
    }

    #[test]
    fn eichler_class_numbers_match_formula() {
        // (N/p^2, D, p): level p times the split primes of N/p^2.
        for (np2, d_k, p) in [(3u64, -4i64, 5u64), (3 * 13, -4, 5), (7, -4, 5), (3, -4, 13), (11, -3, 7), (7 * 5, -3, 11)] {
            let ls = LevelStructure::build(d_k, 1, p, np2, LocalAtP::Eichler, 10).unwrap();
            let cl = right_ideal_classes(&ls.ideals(), ls.disc(), ls.level(), 2).unwrap();
            let h = eichler_class_number(ls.disc(), ls.level());
            assert_eq!(BigRational::from_integer(BigInt::from(cl.len())), h, "{np2} {d_k} {p}");
        }
    }

    #[test]
    fn conjugated_orders_embed_deeper_conductors() {
        let ls = LevelStructure::build(-4, 1, 5, 3, LocalAtP::Eichler, 14).unwrap();
        for n in 1..=3u32 {
            let l = ls.conjugated_order_scaled(n).unwrap();
            // R_n has the covolume of R.
            assert_eq!(l.index(), 5 * 5i128.pow(4 * n), "level {n}");
            assert!(ls.conjugate_is_optimal(n).unwrap(), "level {n}");
        }
        // The normal form of iota(p^n w') after conjugation: unit (1,2) entry.
        let m = ls.phi(&ls.y.map(|v| v * 25));
        let conj_12 = m.m[0][1].div_p_power(1).unwrap();
        assert!(conj_12.is_unit());
    }
}

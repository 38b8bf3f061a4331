use super::report::{interpolation_report, LocalData, Tolerances};
use super::*;
use crate::arith::DirichletModP;
use crate::brandt::eigen::{extract_eigenform, QuatEigenform};
use crate::brandt::QuaternionicLevel;
use crate::cmtheta::theta::theta;
use crate::cmtheta::{regularize, Setup};
use crate::ellcurve::descent::find_twist_descent;
use crate::ellcurve::WeierstrassCurve;
use crate::loracle::LOracle;
use crate::quatorders::embedding::{LevelStructure, LocalAtP};

struct Running {
    t: Tower,
    g: QuatEigenform,
    fam: Family,
    e: WeierstrassCurve,
}

fn running(n_max: u32) -> Running {
    let e = WeierstrassCurve::new([1, 1, 1, -10, -10]).unwrap().quadratic_twist(5).unwrap();
    let desc = find_twist_descent(&e, 5, 50, 20).unwrap();
    let ls = LevelStructure::build(-4, 1, 5, 3, LocalAtP::Eichler, 12).unwrap();
    let avoid = (ls.disc() * ls.level()) as i64;
    let q = QuaternionicLevel::new(ls, DirichletModP::quadratic(5)).unwrap();
    let g = extract_eigenform(&q, &desc, 20, 50, 1).unwrap();
    let t = Tower::new(-4, 1, 5, DirichletModP::quadratic(5), avoid, n_max).unwrap();
    let fam = regularize(&Setup { q: &q, tower: &t }, &g, None, Some(1)).unwrap();
    Running { t, g, fam, e }
}

#[test]
fn good_characters_of_the_running_example() {
    let r = running(2);
    let g1 = good_characters(&r.t, 1).unwrap();
    assert_eq!(g1.len(), 1);
    assert_eq!(g1[0].order(&r.t), 1);
    let g2 = good_characters(&r.t, 2).unwrap();
    assert_eq!(g2.len(), 8);
    assert!(g2.iter().all(|c| c.order(&r.t) % 5 == 0));
}

#[test]
fn trivial_character_sums_coefficients() {
    let r = running(2);
    let th = theta(&r.fam, &r.t, &r.g.embedding, 2);
    let triv = &characters(&r.t, 2)[0];
    let v = eval_padic(&r.t, triv, &th).unwrap();
    let s = th.coeffs.iter().fold(Zpn::zero(5, 20), |a, x| a + *x);
    assert_eq!(v.as_scalar(), Some(s));
}

#[test]
fn factorization_for_every_character_up_to_level_two() {
    let r = running(2);
    let mut count = 0;
    for n in 1..=2 {
        for chi in characters(&r.t, n) {
            let f = factorization_check(&r.t, &r.fam, &r.g.embedding, &chi, n).unwrap();
            assert!(f.holds && f.symmetric, "{}", f.detail);
            count += 1;
        }
    }
    assert!(count >= 4);
}

#[test]
fn evaluation_is_independent_of_the_level() {
    let r = running(2);
    for chi in characters(&r.t, 1) {
        let a = evaluate(&r.t, &r.fam, &r.g.embedding, &chi, 1).unwrap();
        let b = evaluate(&r.t, &r.fam, &r.g.embedding, &chi, 2).unwrap();
        assert_eq!(a.theta, b.theta);
    }
}

#[test]
fn level_errors_are_reported() {
    let r = running(1);
    let bad = RingCharacter { n: 2, k: vec![0] };
    assert!(bad.tilde_level(&r.t).is_err());
    let th = theta(&r.fam, &r.t, &r.g.embedding, 1);
    let chi = RingCharacter { n: 1, k: vec![7] };
    assert!(eval_padic(&r.t, &chi, &th).is_err());
}

/// A direct transcription of the four cases, over the p-adic numbers with chi~ given by Teichmüller lifts.
fn e_p_reference(kind: PrimeType, n: u32, f: &[Zpn], alpha: Zpn) -> Zpn {
    let one = alpha.like(1);
    if n > 0 {
        return one;
    }
    let a = alpha.inv().unwrap();
    match kind {
        PrimeType::Split => (one - f[0] * a) * (one - f[1] * a),
        PrimeType::Ramified => one - f[0] * a,
        PrimeType::Inert => one - a * a,
    }
}

#[test]
fn e_p_matches_the_reference_in_all_cases() {
    let alpha = Zpn::unit_root_of_hecke_poly(1, 5, 20).unwrap();
    let zeta4 = Zpn::new(5, 20, 2).teichmuller();
    let f = vec![Cyclotomic::root_power(4, &alpha, 1), Cyclotomic::root_power(4, &alpha, 3)];
    let fp = [zeta4, zeta4.pow(3)];
    for (kind, n) in [(PrimeType::Split, 0), (PrimeType::Ramified, 0), (PrimeType::Inert, 0), (PrimeType::Split, 2)] {
        let got = e_p_multiplier(kind, n, &f, alpha, 4).unwrap().eval_at(&zeta4);
        assert_eq!(got, e_p_reference(kind, n, &fp, alpha), "{kind:?} n = {n}");
    }
}

#[test]
fn e_p_detects_a_trivial_zero() {
    let alpha = Zpn::one(5, 20);
    let f = vec![Cyclotomic::scalar(1, alpha), Cyclotomic::scalar(1, alpha.like(3))];
    assert!(e_p_multiplier(PrimeType::Split, 0, &f, alpha, 1).unwrap().is_zero());
    assert!(e_p_multiplier(PrimeType::Inert, 0, &[], alpha, 1).unwrap().is_zero());
    assert!(e_p_multiplier(PrimeType::Split, 0, &f[..1], alpha, 1).is_err());
}

#[test]
fn ratios_are_constant_over_good_characters() {
    let r = running(2);
    let oracle = LOracle::new(&r.e, -4, 1, 5).unwrap();
    let local = LocalData { kind: PrimeType::Split, frobenius: vec![], alpha: r.g.alpha, alpha_exact: Some(1) };
    let mut chars = good_characters(&r.t, 1).unwrap();
    chars.extend(good_characters(&r.t, 2).unwrap());
    let rep = interpolation_report(&r.t, &r.fam, &r.g.embedding, &local, Some(&oracle), 75, &chars, Tolerances::default())
        .unwrap();
    assert!(rep.pass, "{}", rep.to_table());
    assert!(rep.compared >= 3);
}

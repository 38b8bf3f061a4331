//! The interpolation table: chi(L_C) against L(E, chi, 1) over a list of characters.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::{e_p_multiplier, evaluate, frobenius_values, PadicCyc, RingCharacter};
use crate::arith::padic::Zpn;
use crate::arith::factor;
use crate::brandt::eigen::PadicEmbedding;
use crate::cmtheta::{Family, PrimeType};
use crate::error::{Error, Result};
use crate::loracle::{LOracle, LValue, LevelOracle};
use crate::quadorders::half_unit_count;
use crate::quadorders::tower::Tower;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Target error handed to the oracle, and its zero threshold.
    pub oracle: f64,
    /// Allowed relative spread of the ratios.
    pub ratio: f64,
    /// Zero threshold for |chi(L_C)|.
    pub zero: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { oracle: 1e-4, ratio: 1e-3, zero: 1e-6 }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ReportConstants {
    pub p: u64,
    pub c: i64,
    pub d_k: i64,
    /// Number of primes dividing both N/p^2 and D.
    pub sigma_d: usize,
    pub alpha: Option<i64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ReportRow {
    pub chi: RingCharacter,
    pub order: u64,
    pub good: bool,
    pub e_p: PadicCyc,
    pub u_n: u64,
    /// p^n alpha^{-2n} u_n^2 sqrt|D| c 2^{#Sigma_D}.
    pub scale: Option<f64>,
    pub l_padic_is_zero: bool,
    pub l_complex: Option<[f64; 2]>,
    pub oracle: Option<LValue>,
    pub oracle_error: Option<String>,
    pub ratio: Option<[f64; 2]>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct InterpolationReport {
    pub constants: ReportConstants,
    pub tolerances: Tolerances,
    pub rows: Vec<ReportRow>,
    /// Largest |r_i - r_j| / max |r| over the nonzero ratios.
    pub max_deviation: f64,
    pub compared: usize,
    pub zero_pattern_ok: bool,
    pub pass: bool,
}

/// Data about the order at p needed for e_p.
#[derive(Clone, Debug)]
pub struct LocalData {
    pub kind: PrimeType,
    pub frobenius: Vec<u32>,
    pub alpha: Zpn,
    pub alpha_exact: Option<i64>,
}

pub fn sigma_d(conductor: u64, p: u64, d_k: i64) -> usize {
    let m = conductor / (p * p);
    factor(m).iter().filter(|&&(l, _)| d_k % l as i64 == 0).count()
}

#[allow(clippy::too_many_arguments)]
pub fn interpolation_report(
    tower: &Tower,
    fam: &Family,
    emb: &PadicEmbedding,
    local: &LocalData,
    oracle: Option<&LOracle>,
    conductor: u64,
    chars: &[RingCharacter],
    tol: Tolerances,
) -> Result<InterpolationReport> {
    let mut seen = chars.to_vec();
    seen.sort();
    seen.dedup();
    if seen.len() != chars.len() {
        return Err(Error::InvalidInput("characters in the report must be pairwise distinct".into()));
    }
    let constants = ReportConstants {
        p: tower.p,
        c: tower.c,
        d_k: tower.d_k,
        sigma_d: sigma_d(conductor, tower.p, tower.d_k),
        alpha: local.alpha_exact,
    };
    let mut levels: BTreeMap<u32, Option<LevelOracle>> = BTreeMap::new();
    for chi in chars {
        if let (Some(o), false) = (oracle, levels.contains_key(&chi.n)) {
            let prepared = if fam.zeta_exact.is_some() && chi.n >= 1 {
                Some(o.prepare(chi.n, tol.oracle * 1e-3)?)
            } else {
                None
            };
            levels.insert(chi.n, prepared);
        }
    }
    let rows: Vec<ReportRow> = chars
        .par_iter()
        .map(|chi| row(tower, fam, emb, local, &constants, levels.get(&chi.n).and_then(|o| o.as_ref()), chi))
        .collect::<Result<_>>()?;

    let mut zero_pattern_ok = true;
    let mut ratios = Vec::new();
    for r in &rows {
        if let (Some(lc), Some(o)) = (r.l_complex, r.oracle) {
            let lz = lc[0].hypot(lc[1]) < tol.zero;
            let oz = o.value().norm() < tol.oracle;
            if lz != oz {
                zero_pattern_ok = false;
            }
            if let (false, false, Some(q)) = (lz, oz, r.ratio) {
                ratios.push(num_complex::Complex64::new(q[0], q[1]));
            }
        }
    }
    let scale = ratios.iter().map(|r| r.norm()).fold(0.0, f64::max);
    let mut max_deviation = 0.0f64;
    for (i, a) in ratios.iter().enumerate() {
        for b in &ratios[i + 1..] {
            max_deviation = max_deviation.max((a - b).norm() / scale);
        }
    }
    let oracle_ok = rows.iter().all(|r| r.oracle_error.is_none());
    let pass = oracle_ok && zero_pattern_ok && max_deviation < tol.ratio;
    Ok(InterpolationReport { constants, tolerances: tol, compared: ratios.len(), rows, max_deviation, zero_pattern_ok, pass })
}

fn row(
    tower: &Tower,
    fam: &Family,
    emb: &PadicEmbedding,
    local: &LocalData,
    k: &ReportConstants,
    oracle: Option<&LevelOracle>,
    chi: &RingCharacter,
) -> Result<ReportRow> {
    let n = chi.n;
    let ev = evaluate(tower, fam, emb, chi, n)?;
    let order = chi.value_order(tower);
    let frob = if n == 0 { frobenius_values(tower, chi, &local.frobenius, local.alpha)? } else { vec![] };
    let e_p = e_p_multiplier(local.kind, n, &frob, local.alpha, order)?;
    let f = k.c * (k.p as i64).pow(n);
    let u_n = half_unit_count(k.d_k, f);
    let scale = local.alpha_exact.map(|a| {
        (k.p as f64).powi(n as i32) * (a as f64).powi(-2 * n as i32)
            * (u_n * u_n) as f64
            * (k.d_k.unsigned_abs() as f64).sqrt()
            * k.c as f64
            * 2f64.powi(k.sigma_d as i32)
    });
    let good = chi.is_good(tower)?;
    let (oracle_v, oracle_error) = match oracle {
        Some(o) if good => match o.l_value(&|id| chi.on_ideal(tower, id)) {
            Ok(v) => (Some(v), None),
            Err(e) => (None, Some(e.to_string())),
        },
        _ => (None, None),
    };
    let ratio = match (ev.l_complex, oracle_v, scale) {
        (Some(lc), Some(o), Some(s)) if o.value().norm() > 0.0 => {
            let r = num_complex::Complex64::new(lc[0], lc[1]) / (o.value() * s);
            Some([r.re, r.im])
        }
        _ => None,
    };
    Ok(ReportRow {
        chi: chi.clone(),
        order: chi.order(tower),
        good,
        e_p,
        u_n,
        scale,
        l_padic_is_zero: ev.l.is_zero(),
        l_complex: ev.l_complex,
        oracle: oracle_v,
        oracle_error,
        ratio,
    })
}

impl InterpolationReport {
    pub fn to_table(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "p = {}  D = {}  c = {}  #Sigma_D = {}  alpha = {}",
            self.constants.p,
            self.constants.d_k,
            self.constants.c,
            self.constants.sigma_d,
            self.constants.alpha.map_or("p-adic".to_string(), |a| a.to_string())
        );
        let _ = writeln!(s, "{:<4} {:<14} {:>5} {:>5} {:>24} {:>24} {:>24}", "n", "chi", "ord", "good", "chi(L_C)", "L(E,chi,1)", "ratio");
        let fmt = |v: Option<[f64; 2]>| v.map_or("-".to_string(), |[a, b]| format!("{a:.8e}{b:+.1e}i"));
        for r in &self.rows {
            let o = match (&r.oracle, &r.oracle_error) {
                (Some(v), _) => fmt(Some([v.re, v.im])),
                (None, Some(_)) => "no convergence".to_string(),
                _ => "-".to_string(),
            };
            let _ = writeln!(
                s,
                "{:<4} {:<14} {:>5} {:>5} {:>24} {:>24} {:>24}",
                r.chi.n,
                format!("{:?}", r.chi.k),
                r.order,
                r.good,
                fmt(r.l_complex),
                o,
                fmt(r.ratio)
            );
        }
        let _ = writeln!(
            s,
            "compared {}  max deviation {:.3e}  zero pattern {}  {}",
            self.compared,
            self.max_deviation,
            if self.zero_pattern_ok { "ok" } else { "MISMATCH" },
            if self.pass { "PASS" } else { "FAIL" }
        );
        s
    }
}

//! End-to-end runs: configuration, the assembled objects, and the JSON
//! outputs behind each CLI command.

pub mod cache;
pub mod verify;

use serde::{Deserialize, Serialize};
use std::path::PathBuf;

use crate::arith::padic::check_precision;
use crate::arith::{gcd, is_prime};
use crate::brandt::eigen::{extract_eigenform, QuatEigenform};
use crate::brandt::QuaternionicLevel;
use crate::cmtheta::theta::{l_element, theta};
use crate::cmtheta::{prime_type, regularize, Family, Setup};
use crate::ellcurve::descent::{find_twist_descent, CurveDescent, DescentCase, SraeClass};
use crate::ellcurve::WeierstrassCurve;
use crate::error::{Error, Result};
use crate::evaluate::report::{interpolation_report, InterpolationReport, LocalData, Tolerances};
use crate::evaluate::{characters, evaluate, factorization_check, good_characters, CharEvaluation, Factorization, RingCharacter};
use crate::loracle::LOracle;
use crate::quadorders::tower::Tower;
use crate::quatorders::embedding::{LevelStructure, LocalAtP};
use crate::quatorders::ideals::mass;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Auto,
    /// E has conductor exponent 2 at p after descent: Eichler order of level p.
    Eichler,
    /// The descended form is good at p: maximal order at p, alpha a root of the Hecke polynomial.
    Maximal,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub curve: [i64; 5],
    pub p: u64,
    pub disc: i64,
    pub c: i64,
    pub n_max: u32,
    pub prec: u32,
    pub mode: Mode,
    pub eig_bound: u64,
    pub tol: Tolerances,
    pub cache: Option<PathBuf>,
    /// Selects the prime above p used to embed Q(zeta_d) into Q_p.
    pub prime_choice: u64,
    pub seed: u64,
}

impl RunConfig {
    pub fn new(curve: [i64; 5], p: u64, disc: i64) -> Self {
        RunConfig {
            curve,
            p,
            disc,
            c: 1,
            n_max: 2,
            prec: 20,
            mode: Mode::Auto,
            eig_bound: 50,
            tol: Tolerances::default(),
            cache: None,
            prime_choice: 1,
            seed: 0x5eed,
        }
    }

    /// Everything that determines the cached mathematical content.
    pub fn cache_key(&self) -> String {
        format!(
            "v{}|{:?}|p={}|D={}|c={}|N={}|nmax={}|mode={:?}|bound={}|u={}",
            cache::CACHE_VERSION,
            self.curve,
            self.p,
            self.disc,
            self.c,
            self.prec,
            self.n_max,
            self.mode,
            self.eig_bound,
            self.prime_choice
        )
    }

    fn validate(&self) -> Result<()> {
        if self.p == 2 || !is_prime(self.p) {
            return Err(Error::InvalidInput(format!("p = {} must be an odd prime", self.p)));
        }
        if self.c < 1 || gcd(self.c, self.p as i64) != 1 {
            return Err(Error::InvalidInput(format!("c = {} must be positive and prime to p", self.c)));
        }
        check_precision(self.p, self.prec)?;
        if self.prec < 2 {
            return Err(Error::InvalidInput("precision must be at least 2".into()));
        }
        Ok(())
    }
}

/// The setting attached to (E, p, K): what `analyze` prints.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Analysis {
    pub curve: [i64; 5],
    pub conductor: u64,
    pub p: u64,
    pub disc: i64,
    pub c: i64,
    pub srae_class: SraeClass,
    pub psi_order: u64,
    pub mode: Mode,
    pub alpha: Option<i64>,
    pub alpha_padic: String,
    /// S: the places where B ramifies, "inf" included.
    pub s_places: Vec<String>,
    pub quaternion_disc: u64,
    pub eichler_level: u64,
    pub class_number: usize,
    pub weights: Vec<u64>,
    pub mass: String,
}

pub struct Pipeline {
    pub config: RunConfig,
    pub descent: CurveDescent,
    pub q: QuaternionicLevel,
    pub tower: Tower,
    pub g: QuatEigenform,
    pub fam: Family,
    pub alpha_exact: Option<i64>,
    pub mode: Mode,
}

fn resolve_mode(requested: Mode, case: DescentCase) -> Result<Mode> {
    let natural = match case {
        DescentCase::LevelP => Mode::Eichler,
        DescentCase::LevelZero => Mode::Maximal,
    };
    match requested {
        Mode::Auto => Ok(natural),
        m if m == natural => Ok(m),
        m => Err(Error::Hypothesis(format!("mode {m:?} requested but the curve falls under {natural:?}"))),
    }
}

impl Pipeline {
    pub fn build(config: &RunConfig) -> Result<Pipeline> {
        config.validate()?;
        let e = WeierstrassCurve::new(config.curve)?;
        let descent = find_twist_descent(&e, config.p, config.eig_bound, config.prec)?;
        if gcd(config.c, descent.conductor as i64) != 1 {
            return Err(Error::InvalidInput(format!("c = {} is not prime to N = {}", config.c, descent.conductor)));
        }
        let mode = resolve_mode(config.mode, descent.case)?;
        let local = match mode {
            Mode::Maximal => LocalAtP::Maximal,
            _ => LocalAtP::Eichler,
        };
        let ls_prec = (2 * config.n_max + 4).max(12).min(crate::arith::padic::max_precision(config.p));
        let ls = LevelStructure::build(config.disc, config.c as u64, config.p, descent.level_away_from_p(), local, ls_prec)?;
        let avoid = (ls.disc() * ls.level()) as i64;
        let q = QuaternionicLevel::new(ls, descent.psi.clone())?;
        let tower = Tower::new(config.disc, config.c, config.p, descent.psi.clone(), avoid, config.n_max)?;
        let alpha_exact = match (local, descent.alpha) {
            (LocalAtP::Eichler, Some(a)) if a.balanced().abs() == 1 => Some(a.balanced() as i64),
            _ => None,
        };
        let cached = match &config.cache {
            Some(dir) => cache::load(dir, &config.cache_key())?,
            None => None,
        };
        let (g, fam) = match cached {
            Some(p) => (p.eigenform, p.family),
            None => {
                let g = extract_eigenform(&q, &descent, config.prec, config.eig_bound, config.prime_choice)?;
                let fam = regularize(&Setup { q: &q, tower: &tower }, &g, None, alpha_exact)?;
                if let Some(dir) = &config.cache {
                    cache::store(dir, &config.cache_key(), &cache::Payload { eigenform: g.clone(), family: fam.clone() })?;
                }
                (g, fam)
            }
        };
        Ok(Pipeline { config: config.clone(), descent, q, tower, g, fam, alpha_exact, mode })
    }

    pub fn setup(&self) -> Setup<'_> {
        Setup { q: &self.q, tower: &self.tower }
    }

    pub fn local_data(&self) -> LocalData {
        LocalData {
            kind: prime_type(self.config.disc, self.config.p),
            frobenius: match self.q.ls.local {
                LocalAtP::Maximal => self.setup().frobenius_elements(),
                LocalAtP::Eichler => vec![],
            },
            alpha: self.g.alpha,
            alpha_exact: self.alpha_exact,
        }
    }

    pub fn analysis(&self) -> Analysis {
        let ls = &self.q.ls;
        let mut s_places = vec!["inf".to_string()];
        s_places.extend(ls.ram.finite.iter().map(|q| q.to_string()));
        Analysis {
            curve: self.config.curve,
            conductor: self.descent.conductor,
            p: self.config.p,
            disc: self.config.disc,
            c: self.config.c,
            srae_class: self.descent.class,
            psi_order: self.descent.psi.order,
            mode: self.mode,
            alpha: self.alpha_exact,
            alpha_padic: format!("{}", self.g.alpha.balanced()),
            s_places,
            quaternion_disc: ls.disc(),
            eichler_level: ls.level(),
            class_number: self.q.h(),
            weights: self.q.classes.weights.clone(),
            mass: mass(ls.disc(), ls.level()).to_string(),
        }
    }

    fn check_level(&self, n: u32) -> Result<()> {
        if n < self.fam.n_min || n > self.fam.n_max {
            return Err(Error::InvalidInput(format!(
                "level {n} outside the computed range {}..={}",
                self.fam.n_min, self.fam.n_max
            )));
        }
        Ok(())
    }

    pub fn theta_output(&self, n: u32) -> Result<ThetaOutput> {
        self.check_level(n)?;
        let th = theta(&self.fam, &self.tower, &self.g.embedding, n);
        let l = l_element(&th, &self.tower);
        let lv = self.tower.level(n);
        Ok(ThetaOutput {
            n,
            p: self.config.p,
            prec: self.config.prec,
            elements: lv.elems.iter().zip(&lv.reps).map(|(&(class, psi), r)| (class, psi, r.norm, r.b)).collect(),
            points: self.fam.orbit_at(n).iter().map(|x| (x.class, x.t)).collect(),
            theta: th.coeffs.iter().map(|x| x.v.to_string()).collect(),
            l: l.coeffs.iter().map(|x| x.v.to_string()).collect(),
        })
    }

    /// Default character list: every character at the levels where the family exists.
    pub fn all_characters(&self) -> Vec<RingCharacter> {
        self.fam.levels().flat_map(|n| characters(&self.tower, n)).collect()
    }

    pub fn eval(&self, chars: &[RingCharacter]) -> Result<Vec<EvalOutput>> {
        chars
            .iter()
            .map(|chi| {
                self.check_level(chi.n)?;
                let evaluation = evaluate(&self.tower, &self.fam, &self.g.embedding, chi, chi.n)?;
                let factorization = factorization_check(&self.tower, &self.fam, &self.g.embedding, chi, chi.n)?;
                let good = chi.n >= 1 && chi.is_good(&self.tower)?;
                Ok(EvalOutput { evaluation, factorization, good })
            })
            .collect()
    }

    /// Good characters at the levels the oracle can reach (n <= 2), or the n = 0 characters in the good-twist case.
    pub fn default_report_characters(&self) -> Result<Vec<RingCharacter>> {
        let mut out = Vec::new();
        for n in self.fam.levels() {
            if n == 0 {
                out.extend(characters(&self.tower, 0));
            } else if n <= 2 {
                out.extend(good_characters(&self.tower, n)?);
            }
        }
        Ok(out)
    }

    pub fn report(&self, chars: &[RingCharacter]) -> Result<InterpolationReport> {
        for chi in chars {
            self.check_level(chi.n)?;
        }
        let e = WeierstrassCurve::new(self.config.curve)?;
        let oracle = LOracle::new(&e, self.config.disc, self.config.c, self.config.p)?;
        interpolation_report(
            &self.tower,
            &self.fam,
            &self.g.embedding,
            &self.local_data(),
            Some(&oracle),
            self.descent.conductor,
            chars,
            self.config.tol,
        )
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ThetaOutput {
    pub n: u32,
    pub p: u64,
    pub prec: u32,
    /// (class in G_n, psi exponent, representative ideal norm, b) per element of G~_n.
    pub elements: Vec<(u32, u64, i64, i64)>,
    /// The CM point of each element as (ideal class, torus coordinate).
    pub points: Vec<(usize, u64)>,
    /// Coefficients of theta_n and L_n, as residues mod p^N.
    pub theta: Vec<String>,
    pub l: Vec<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EvalOutput {
    pub evaluation: CharEvaluation,
    pub factorization: Factorization,
    pub good: bool,
}

/// Parse characters from JSON: a list of {"n": .., "k": [..]}.
pub fn parse_characters(text: &str) -> Result<Vec<RingCharacter>> {
    Ok(serde_json::from_str(text)?)
}

//! Empirical lower bounds on the optimal constant, and the exponent probe.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::norms::{sup_norm_bracket, sup_norm_upper, NormEstimate, SearchConfig};
use crate::poly::{enumerate_lambda, HomogeneousPolynomial, MultiIndex};

use super::random::{derive_seed, random_polynomial, PolynomialKind};
use super::lhs_bh;

/// Problem shape of a constant search.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchParams {
    pub m: u32,
    #[serde(rename = "M")]
    pub max_vars: u32,
    pub n: usize,
    pub q: f64,
    /// Random candidates, and separately hill-climbing steps.
    pub budget: usize,
    pub seed: u64,
}

impl SearchParams {
    fn validate(&self) -> Result<()> {
        if !(self.q >= 1.0) {
            return Err(Error::InvalidExponent(self.q));
        }
        if self.max_vars == 0 || self.max_vars > self.m {
            return Err(Error::InvalidParameter(format!(
                "need 1 <= M <= m, got M = {}, m = {}",
                self.max_vars, self.m
            )));
        }
        if self.n == 0 {
            return Err(Error::InvalidParameter("n must be positive".into()));
        }
        Ok(())
    }
}

/// `lhs / ‖P‖` bracketed through a norm bracket. `ratio_lower` divides by the
/// certified upper end, so it is a sound lower bound on the optimal constant.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioWitness {
    pub polynomial: HomogeneousPolynomial,
    pub q: f64,
    pub lhs: f64,
    pub norm: NormEstimate,
    pub ratio_lower: f64,
    pub ratio_upper: f64,
    pub provenance: String,
}

struct Scored {
    poly: HomogeneousPolynomial,
    ratio: f64,
    origin: String,
}

fn score(p: HomogeneousPolynomial, params: &SearchParams, cfg: &SearchConfig, origin: String) -> Result<Scored> {
    let ratio = if p.is_zero() {
        0.0
    } else {
        lhs_bh(&p, params.max_vars, params.q)? / sup_norm_upper(&p, cfg)?.upper
    };
    Ok(Scored { poly: p, ratio, origin })
}

fn seed_family(params: &SearchParams) -> Result<Vec<(HomogeneousPolynomial, &'static str)>> {
    let (m, n) = (params.m, params.n);
    let one = Complex64::new(1.0, 0.0);
    let mut zero = vec![0u32; n];
    zero[0] = m;
    let lambda = enumerate_lambda(m, params.max_vars, n)?;
    Ok(vec![
        (
            HomogeneousPolynomial::monomial(m, n, MultiIndex::from_exponents(&zero), one)?,
            "seed-family:single-monomial",
        ),
        (
            HomogeneousPolynomial::pure_powers(m, &vec![one; n])?,
            "seed-family:pure-powers",
        ),
        (
            HomogeneousPolynomial::new(m, n, lambda.into_iter().map(|a| (a, one)))?,
            "seed-family:all-ones",
        ),
    ])
}

/// Keeps the first of equal ratios, so earlier generation indices win ties.
fn better(a: Scored, b: Scored) -> Scored {
    if b.ratio > a.ratio {
        b
    } else {
        a
    }
}

/// Best `lhs_bh(P, M, q) / ‖P‖` found over the deterministic seed family,
/// `budget` Steinhaus candidates on `Λ_M(m, n)` and `budget` hill-climbing
/// moves from the best of those. Deterministic per seed and independent of
/// the thread count.
pub fn search_constant_lower_bound(params: &SearchParams, cfg: &SearchConfig) -> Result<RatioWitness> {
    search_from(params, cfg, None)
}

/// As [`search_constant_lower_bound`], with `warm` (a polynomial in at most
/// `params.n` variables) added to the seed family.
fn search_from(params: &SearchParams, cfg: &SearchConfig, warm: Option<&HomogeneousPolynomial>) -> Result<RatioWitness> {
    params.validate()?;
    cfg.validate()?;

    let mut seeds: Vec<(HomogeneousPolynomial, String)> = seed_family(params)?
        .into_iter()
        .map(|(p, origin)| (p, origin.to_string()))
        .collect();
    if let Some(w) = warm {
        let embedded = HomogeneousPolynomial::new(params.m, params.n, w.terms().map(|(a, c)| (a.clone(), *c)))?;
        seeds.push((embedded, format!("warm-start:n={}", w.num_vars())));
    }
    let mut best: Option<Scored> = None;
    for (p, origin) in seeds {
        let s = score(p, params, cfg, origin)?;
        best = Some(match best {
            Some(b) => better(b, s),
            None => s,
        });
    }
    let random: Vec<Scored> = (0..params.budget)
        .into_par_iter()
        .map(|i| {
            let seed = derive_seed(params.seed, i as u64);
            let p = random_polynomial(PolynomialKind::Steinhaus, params.m, params.max_vars, params.n, 1.0, seed)?;
            score(p, params, cfg, format!("random:steinhaus index={i}"))
        })
        .collect::<Result<_>>()?;
    let mut best = random.into_iter().fold(best.expect("seed family is nonempty"), better);

    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(params.seed, u64::MAX));
    let mut accepted = 0usize;
    for _ in 0..params.budget {
        let terms: Vec<(MultiIndex, Complex64)> = best.poly.terms().map(|(a, c)| (a.clone(), *c)).collect();
        let k = rng.random_range(0..terms.len());
        let (alpha, c) = &terms[k];
        let moved = match rng.random_range(0..3u8) {
            0 => *c * Complex64::cis(rng.random::<f64>() * TAU),
            1 => *c * 0.5,
            _ => *c * 2.0,
        };
        let candidate = best.poly.with_coefficient(alpha, moved)?;
        let s = score(candidate, params, cfg, String::new())?;
        if s.ratio > best.ratio {
            best = Scored {
                origin: best.origin,
                ..s
            };
            accepted += 1;
        }
    }

    let norm = sup_norm_bracket(&best.poly, cfg)?;
    let lhs = lhs_bh(&best.poly, params.max_vars, params.q)?;
    Ok(RatioWitness {
        q: params.q,
        lhs,
        ratio_lower: lhs / norm.upper,
        ratio_upper: lhs / norm.lower,
        norm,
        provenance: format!(
            "{}; hill-climb accepted {accepted}/{}; seed {}",
            best.origin, params.budget, params.seed
        ),
        polynomial: best.poly,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Trend {
    Flat,
    Increasing,
    Decreasing,
    Mixed,
}

/// Relative change below which consecutive probe ratios count as equal.
pub const TREND_TOLERANCE: f64 = 0.05;

/// Classifies a sequence of ratios.
pub fn classify_trend(values: &[f64]) -> Trend {
    let (lo, hi) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    if values.len() < 2 || hi - lo <= TREND_TOLERANCE * hi.abs() {
        return Trend::Flat;
    }
    let rising = values.windows(2).all(|w| w[1] >= w[0] * (1.0 - TREND_TOLERANCE));
    let falling = values.windows(2).all(|w| w[1] <= w[0] * (1.0 + TREND_TOLERANCE));
    match (rising, falling) {
        (true, false) => Trend::Increasing,
        (false, true) => Trend::Decreasing,
        _ => Trend::Mixed,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeRow {
    pub n: usize,
    pub ratio_lower: f64,
    pub ratio_upper: f64,
    pub provenance: String,
}

/// Growth table of the best ratio against `n`. The trend is an observation
/// about the sampled values only.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeReport {
    pub m: u32,
    #[serde(rename = "M")]
    pub max_vars: u32,
    pub q: f64,
    pub rows: Vec<ProbeRow>,
    pub trend: Trend,
}

pub fn exponent_probe(
    max_vars: u32,
    q: f64,
    n_list: &[usize],
    m: u32,
    budget: usize,
    seed: u64,
    cfg: &SearchConfig,
) -> Result<ProbeReport> {
    if !(q >= 1.0) {
        return Err(Error::InvalidExponent(q));
    }
    if n_list.is_empty() {
        return Err(Error::InvalidParameter("empty list of n".into()));
    }
    // a witness in fewer variables stays admissible, so each search starts
    // from the best one found for a smaller n
    let mut found: Vec<RatioWitness> = Vec::new();
    let mut rows = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let params = SearchParams {
            m,
            max_vars,
            n,
            q,
            budget,
            seed: derive_seed(seed, n as u64),
        };
        let warm = found
            .iter()
            .filter(|w| w.polynomial.num_vars() <= n)
            .max_by(|a, b| a.ratio_lower.total_cmp(&b.ratio_lower));
        let w = search_from(&params, cfg, warm.map(|w| &w.polynomial))?;
        rows.push(ProbeRow {
            n,
            ratio_lower: w.ratio_lower,
            ratio_upper: w.ratio_upper,
            provenance: w.provenance.clone(),
        });
        found.push(w);
    }
    let trend = classify_trend(&rows.iter().map(|r| r.ratio_lower).collect::<Vec<_>>());
    Ok(ProbeReport {
        m,
        max_vars,
        q,
        rows,
        trend,
    })
}

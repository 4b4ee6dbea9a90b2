//! Explicit constants of the uniform Bohnenblust–Hille bound for polynomials
//! with at most `M` variables per monomial.
//!
//! Everything involving factorials of large `m` is assembled in log-space;
//! the exact big-integer route is kept for small `m` as a cross-check.

use std::ops::RangeInclusive;

use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::{Serialize, Serializer};
use statrs::function::factorial::ln_factorial as statrs_ln_factorial;

use crate::error::{Error, Result};
use crate::poly::{binomial, factorial, BigNat};

/// Euler–Mascheroni constant to double precision.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Multiplicative constants of the k-linear Bohnenblust–Hille bounds.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BetaConfig {
    pub beta1: f64,
    pub beta2: f64,
    pub euler_gamma: f64,
}

impl Default for BetaConfig {
    fn default() -> Self {
        Self {
            beta1: 1.0,
            beta2: 1.0,
            euler_gamma: EULER_GAMMA,
        }
    }
}

impl BetaConfig {
    pub fn with_beta1(beta1: f64) -> Self {
        Self {
            beta1,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.beta1 > 0.0 && self.beta1.is_finite()) || !(self.beta2 > 0.0 && self.beta2.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "beta1 and beta2 must be positive and finite, got {} and {}",
                self.beta1, self.beta2
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Field {
    Complex,
    Real,
}

fn check_range(m: u32, max_vars: u32) -> Result<()> {
    if max_vars == 0 || max_vars > m {
        return Err(Error::InvalidParameter(format!(
            "need 1 <= M <= m, got M = {max_vars}, m = {m}"
        )));
    }
    Ok(())
}

/// `ln n!`.
pub fn ln_factorial(n: u64) -> f64 {
    statrs_ln_factorial(n)
}

/// `ln binom(n, k)`.
pub fn ln_binomial(n: u64, k: u64) -> f64 {
    ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
}

/// The earlier polynomial-growth constant `2^{M/2} m^{(M+1)/2}`.
pub fn cdsp_constant(m: u32, max_vars: u32) -> Result<f64> {
    check_range(m, max_vars)?;
    let big_m = f64::from(max_vars);
    Ok(2f64.powf(big_m / 2.0) * f64::from(m).powf((big_m + 1.0) / 2.0))
}

/// Exponent of `k` in the k-linear bound: `(1−γ)/2` (complex) or
/// `(2−ln 2−γ)/2` (real).
pub fn bh_exponent(field: Field, cfg: &BetaConfig) -> f64 {
    match field {
        Field::Complex => (1.0 - cfg.euler_gamma) / 2.0,
        Field::Real => (2.0 - std::f64::consts::LN_2 - cfg.euler_gamma) / 2.0,
    }
}

/// `β₁ k^{(1−γ)/2}` or `β₂ k^{(2−ln 2−γ)/2}`.
pub fn bh_constant_bound(k: u32, field: Field, cfg: &BetaConfig) -> Result<f64> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be positive".into()));
    }
    cfg.validate()?;
    let exponent = bh_exponent(field, cfg);
    match field {
        Field::Complex => assert!(exponent < 0.212, "complex exponent {exponent} >= 0.212"),
        Field::Real => assert!(exponent < 0.365, "real exponent {exponent} >= 0.365"),
    }
    let beta = match field {
        Field::Complex => cfg.beta1,
        Field::Real => cfg.beta2,
    };
    Ok(beta * f64::from(k).powf(exponent))
}

/// `m! / (⌊m/M⌋!)^M`, the uniform bound on `binom(m, τ)` over compositions
/// `τ` of `m` into `M` parts.
#[derive(Clone, Debug, PartialEq)]
pub struct UniformBound {
    /// Always an integer: it equals a multinomial times `(m − M⌊m/M⌋)!`.
    pub exact: BigNat,
    pub ln_value: f64,
}

pub fn multinomial_uniform_bound(m: u32, max_vars: u32) -> Result<UniformBound> {
    check_range(m, max_vars)?;
    let block = m / max_vars;
    let denominator = factorial(block).pow(max_vars);
    let numerator = factorial(m);
    debug_assert_eq!(&numerator % &denominator, BigNat::default());
    Ok(UniformBound {
        exact: numerator / denominator,
        ln_value: ln_uniform_bound(m, max_vars),
    })
}

fn ln_uniform_bound(m: u32, max_vars: u32) -> f64 {
    ln_factorial(u64::from(m)) - f64::from(max_vars) * ln_factorial(u64::from(m / max_vars))
}

/// `[m! / (⌊m/M⌋!)^M]^{M/m}`, which tends to `M^M`.
pub fn stirling_ratio(m: u32, max_vars: u32) -> Result<f64> {
    check_range(m, max_vars)?;
    Ok((f64::from(max_vars) / f64::from(m) * ln_uniform_bound(m, max_vars)).exp())
}

/// Same quantity through exact integer arithmetic; only for `m ≤ 20`.
pub fn stirling_ratio_exact(m: u32, max_vars: u32) -> Result<f64> {
    if m > 20 {
        return Err(Error::InvalidParameter(format!(
            "exact Stirling ratio limited to m <= 20, got {m}"
        )));
    }
    let bound = multinomial_uniform_bound(m, max_vars)?;
    let value = bound.exact.to_f64().expect("fits in f64 for m <= 20");
    Ok(value.powf(f64::from(max_vars) / f64::from(m)))
}

/// `θ = M/m`, after checking `1/(2m/(m+1)) = θ/(2M/(M+1)) + (1−θ)/2` to 1e-12.
pub fn interpolation_theta(m: u32, max_vars: u32) -> Result<f64> {
    check_range(m, max_vars)?;
    let (mf, big_m) = (f64::from(m), f64::from(max_vars));
    let theta = big_m / mf;
    let lhs = (mf + 1.0) / (2.0 * mf);
    let rhs = theta * (big_m + 1.0) / (2.0 * big_m) + (1.0 - theta) / 2.0;
    let residual = (lhs - rhs).abs();
    if residual > 1e-12 {
        return Err(Error::IdentityViolation { m, max_vars, residual });
    }
    Ok(theta)
}

/// `binom(m+M−1, m)`, the number of compositions of `m` into `M` parts.
pub fn composition_count(m: u32, max_vars: u32) -> BigNat {
    binomial(m + max_vars - 1, m)
}

/// `ln` of the uniform constant
/// `binom(m+M−1,m)^{(M+1)/(2m)} · [m!/(⌊m/M⌋!)^M]^{M/m} · C_M^{M/m} · e^M`
/// with `C_M = β₁ M^{(1−γ)/2}`.
pub fn ln_proof_chain_constant(m: u32, max_vars: u32, cfg: &BetaConfig) -> Result<f64> {
    check_range(m, max_vars)?;
    let (mf, big_m) = (f64::from(m), f64::from(max_vars));
    let ln_count = ln_binomial(u64::from(m + max_vars - 1), u64::from(m));
    let ln_bh = bh_constant_bound(max_vars, Field::Complex, cfg)?.ln();
    Ok((big_m + 1.0) / (2.0 * mf) * ln_count
        + big_m / mf * ln_uniform_bound(m, max_vars)
        + big_m / mf * ln_bh
        + big_m)
}

pub fn proof_chain_constant(m: u32, max_vars: u32, cfg: &BetaConfig) -> Result<f64> {
    Ok(ln_proof_chain_constant(m, max_vars, cfg)?.exp())
}

/// `ln` of the constant for the stronger `2M/(M+1)` inequality before
/// interpolation: `binom(m+M−1,m)^{(M+1)/(2M)} · m!/(⌊m/M⌋!)^M · C_M · e^m`.
/// It grows with `m`.
pub fn ln_pre_interpolation_constant(m: u32, max_vars: u32, cfg: &BetaConfig) -> Result<f64> {
    check_range(m, max_vars)?;
    let (mf, big_m) = (f64::from(m), f64::from(max_vars));
    let ln_count = ln_binomial(u64::from(m + max_vars - 1), u64::from(m));
    let ln_bh = bh_constant_bound(max_vars, Field::Complex, cfg)?.ln();
    Ok((big_m + 1.0) / (2.0 * big_m) * ln_count + ln_uniform_bound(m, max_vars) + ln_bh + mf)
}

pub fn pre_interpolation_constant(m: u32, max_vars: u32, cfg: &BetaConfig) -> Result<f64> {
    Ok(ln_pre_interpolation_constant(m, max_vars, cfg)?.exp())
}

/// `M^M e^M`, the limit of [`proof_chain_constant`] as `m → ∞`.
pub fn chain_limit(max_vars: u32) -> f64 {
    let big_m = f64::from(max_vars);
    (big_m * big_m.ln() + big_m).exp()
}

fn ser_bignat<S: Serializer>(v: &BigNat, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConstantReport {
    pub m: u32,
    #[serde(rename = "M")]
    pub max_vars: u32,
    pub theta: f64,
    #[serde(serialize_with = "ser_bignat")]
    pub composition_count: BigNat,
    pub stirling_ratio: f64,
    pub cdsp: f64,
    pub kappa_chain: f64,
    pub beta1: f64,
    /// The earlier polynomial-growth constant is the larger one at this `m`.
    pub cdsp_exceeds_chain: bool,
}

pub const CONSTANT_CSV_HEADER: [&str; 8] = [
    "m",
    "M",
    "theta",
    "composition_count",
    "stirling_ratio",
    "cdsp",
    "kappa_chain",
    "beta1",
];

impl ConstantReport {
    pub fn csv_record(&self) -> [String; 8] {
        [
            self.m.to_string(),
            self.max_vars.to_string(),
            self.theta.to_string(),
            self.composition_count.to_string(),
            self.stirling_ratio.to_string(),
            self.cdsp.to_string(),
            self.kappa_chain.to_string(),
            self.beta1.to_string(),
        ]
    }
}

pub fn constant_report(m: u32, max_vars: u32, cfg: &BetaConfig) -> Result<ConstantReport> {
    let cdsp = cdsp_constant(m, max_vars)?;
    let kappa_chain = proof_chain_constant(m, max_vars, cfg)?;
    Ok(ConstantReport {
        m,
        max_vars,
        theta: interpolation_theta(m, max_vars)?,
        composition_count: composition_count(m, max_vars),
        stirling_ratio: stirling_ratio(m, max_vars)?,
        cdsp,
        kappa_chain,
        beta1: cfg.beta1,
        cdsp_exceeds_chain: cdsp > kappa_chain,
    })
}

/// One report per `m` in `range`, in ascending order.
pub fn constant_table(max_vars: u32, range: RangeInclusive<u32>, cfg: &BetaConfig) -> Result<Vec<ConstantReport>> {
    if range.is_empty() {
        return Err(Error::InvalidParameter("empty m range".into()));
    }
    range
        .into_par_iter()
        .map(|m| constant_report(m, max_vars, cfg))
        .collect()
}

/// Boundedness and crossover facts about the chain constant over
/// `m ∈ [M, m_max]`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChainScan {
    #[serde(rename = "M")]
    pub max_vars: u32,
    pub m_min: u32,
    pub m_max: u32,
    pub beta1: f64,
    /// First `m` attaining the maximum of the chain constant on the scan.
    pub argmax_m: u32,
    pub max_chain: f64,
    pub final_chain: f64,
    /// `M^M e^M`.
    pub limit: f64,
    /// `|final_chain / limit − 1|`.
    pub relative_gap: f64,
    /// Smallest `m*` with `cdsp(m) > chain(m)` for every scanned `m ≥ m*`.
    pub crossover_m: Option<u32>,
    pub cdsp_strictly_increasing: bool,
}

pub fn scan_chain(max_vars: u32, m_max: u32, cfg: &BetaConfig) -> Result<ChainScan> {
    check_range(m_max, max_vars)?;
    let table = constant_table(max_vars, max_vars..=m_max, cfg)?;
    let mut argmax = 0;
    for (i, r) in table.iter().enumerate() {
        if r.kappa_chain > table[argmax].kappa_chain {
            argmax = i;
        }
    }
    let crossover_m = table
        .iter()
        .rposition(|r| !r.cdsp_exceeds_chain)
        .map_or(Some(max_vars), |i| table.get(i + 1).map(|r| r.m));
    let cdsp_strictly_increasing = table.windows(2).all(|w| w[1].cdsp > w[0].cdsp);
    let last = table.last().expect("nonempty range");
    let limit = chain_limit(max_vars);
    Ok(ChainScan {
        max_vars,
        m_min: max_vars,
        m_max,
        beta1: cfg.beta1,
        argmax_m: table[argmax].m,
        max_chain: table[argmax].kappa_chain,
        final_chain: last.kappa_chain,
        limit,
        relative_gap: (last.kappa_chain / limit - 1.0).abs(),
        crossover_m,
        cdsp_strictly_increasing,
    })
}

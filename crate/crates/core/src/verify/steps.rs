//! Instance checks of each inequality in the proof of the uniform bound.

use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::constants::{
    interpolation_theta, multinomial_uniform_bound, pre_interpolation_constant, proof_chain_constant,
    BetaConfig,
};
use crate::error::{Error, Result};
use crate::norms::{
    coeff_lq_norm, lq_norm, multilinear_sup_norm_lower, sup_norm_bracket, NormEstimate, SearchConfig,
};
use crate::poly::{binomial, enumerate_compositions, symmetric_form_basis, BigNat, HomogeneousPolynomial};

use super::lhs_bh;

/// Relative slack for steps computed exactly from coefficients.
pub const EXACT_TOLERANCE: f64 = 1e-9;
/// Relative slack for steps with an optimizer in the loop.
pub const OPTIMIZER_TOLERANCE: f64 = 1e-6;
/// Enumeration budget of the expansion step, `n^M · |Γ|`.
pub const EXPANSION_BUDGET: u128 = 10_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StepId {
    Expansion,
    Des1,
    L2Mmp,
    Holder,
    Polarization,
    Final,
}

impl StepId {
    pub const ALL: [StepId; 6] = [
        StepId::Expansion,
        StepId::Des1,
        StepId::L2Mmp,
        StepId::Holder,
        StepId::Polarization,
        StepId::Final,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            StepId::Expansion => "expansion",
            StepId::Des1 => "des1",
            StepId::L2Mmp => "l2-mmp",
            StepId::Holder => "holder",
            StepId::Polarization => "polarization",
            StepId::Final => "final",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|id| id.as_str() == s)
    }
}

/// Outcome of one inequality check `lhs ≤ rhs`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepReport {
    pub step: StepId,
    pub lhs: f64,
    pub rhs: f64,
    /// `rhs − lhs`.
    pub slack: f64,
    pub passed: bool,
    pub tolerance: f64,
    /// `norm.lower − lhs` for steps whose right side is a norm bracket.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lower_slack: Option<f64>,
}

impl StepReport {
    /// `passed ⇔ lhs ≤ rhs · (1 + tolerance)`.
    pub fn new(step: StepId, lhs: f64, rhs: f64, tolerance: f64) -> Self {
        Self {
            step,
            lhs,
            rhs,
            slack: rhs - lhs,
            passed: lhs <= rhs * (1.0 + tolerance),
            tolerance,
            lower_slack: None,
        }
    }
}

fn check_degree(p: &HomogeneousPolynomial, max_vars: u32) -> Result<()> {
    if max_vars == 0 || max_vars > p.degree() {
        return Err(Error::InvalidParameter(format!(
            "need 1 <= M <= m, got M = {max_vars}, m = {}",
            p.degree()
        )));
    }
    Ok(())
}

/// `Σ_{α∈Λ_M} |c_α|^p ≤ Σ_{τ∈Γ} Σ_{i_1..i_M} (binom(m,τ) |P̂(e_{i_1}^{τ_1},…,e_{i_M}^{τ_M})|)^p`
/// with `p = 2M/(M+1)`, both sides from the coefficients.
pub fn check_expansion_step(p: &HomogeneousPolynomial, max_vars: u32, tolerance: f64) -> Result<StepReport> {
    check_degree(p, max_vars)?;
    let m = p.degree();
    let n = p.num_vars();
    let count = binomial(m + max_vars - 1, m).to_u128().unwrap_or(u128::MAX);
    let needed = (n as u128).saturating_pow(max_vars).saturating_mul(count);
    if needed > EXPANSION_BUDGET {
        return Err(Error::BudgetExceeded {
            needed,
            budget: EXPANSION_BUDGET,
        });
    }
    let exponent = 2.0 * f64::from(max_vars) / (f64::from(max_vars) + 1.0);
    let lhs: f64 = p
        .terms()
        .filter(|(alpha, _)| alpha.vars() <= max_vars as usize)
        .map(|(_, c)| c.norm().powf(exponent))
        .sum();

    let mut rhs = 0.0;
    let mut indices = vec![0usize; max_vars as usize];
    let mut blocks = Vec::with_capacity(max_vars as usize);
    for tau in enumerate_compositions(m, max_vars) {
        let weight = tau.multinomial().to_f64().expect("multinomial fits f64");
        indices.iter_mut().for_each(|i| *i = 0);
        loop {
            blocks.clear();
            blocks.extend(indices.iter().copied().zip(tau.parts().iter().copied()));
            let v = symmetric_form_basis(p, &blocks)?.norm();
            if v > 0.0 {
                rhs += (weight * v).powf(exponent);
            }
            if !advance(&mut indices, n) {
                break;
            }
        }
    }
    Ok(StepReport::new(StepId::Expansion, lhs, rhs, tolerance))
}

/// Odometer over `[0, n)^k`; false once it wraps around.
fn advance(indices: &mut [usize], n: usize) -> bool {
    for i in indices.iter_mut().rev() {
        *i += 1;
        if *i < n {
            return true;
        }
        *i = 0;
    }
    false
}

/// `max_τ binom(m, τ) ≤ m!/(⌊m/M⌋!)^M`, compared exactly.
pub fn check_des1_step(m: u32, max_vars: u32) -> Result<StepReport> {
    let bound = multinomial_uniform_bound(m, max_vars)?;
    let worst: BigNat = enumerate_compositions(m, max_vars)
        .iter()
        .map(|t| t.multinomial())
        .max()
        .expect("at least one composition");
    let mut report = StepReport::new(
        StepId::Des1,
        worst.to_f64().unwrap_or(f64::INFINITY),
        bound.exact.to_f64().unwrap_or(f64::INFINITY),
        0.0,
    );
    report.passed = worst <= bound.exact;
    Ok(report)
}

/// `(Σ_α |c_α|²)^{1/2} ≤ ‖P‖`, checked against the certified upper end of
/// `norm`; the gap to the lower end is recorded as `lower_slack`.
pub fn l2_step_report(p: &HomogeneousPolynomial, norm: &NormEstimate, tolerance: f64) -> Result<StepReport> {
    let lhs = coeff_lq_norm(p, 2.0, None)?;
    let mut report = StepReport::new(StepId::L2Mmp, lhs, norm.upper, tolerance);
    report.lower_slack = Some(norm.lower - lhs);
    Ok(report)
}

pub fn check_l2_step(p: &HomogeneousPolynomial, cfg: &SearchConfig, tolerance: f64) -> Result<StepReport> {
    l2_step_report(p, &sup_norm_bracket(p, cfg)?, tolerance)
}

/// `‖c‖_{2m/(m+1)} ≤ ‖c‖_{2M/(M+1)}^θ ‖c‖_2^{1−θ}` with `θ = M/m`, for any
/// coefficient magnitudes.
pub fn holder_report(coeffs: &[f64], m: u32, max_vars: u32, tolerance: f64) -> Result<StepReport> {
    let theta = interpolation_theta(m, max_vars)?;
    let (mf, big_m) = (f64::from(m), f64::from(max_vars));
    let lhs = lq_norm(coeffs.iter().copied(), 2.0 * mf / (mf + 1.0))?;
    let strong = lq_norm(coeffs.iter().copied(), 2.0 * big_m / (big_m + 1.0))?;
    let l2 = lq_norm(coeffs.iter().copied(), 2.0)?;
    let rhs = strong.powf(theta) * l2.powf(1.0 - theta);
    Ok(StepReport::new(StepId::Holder, lhs, rhs, tolerance))
}

/// Hölder interpolation on the coefficients of `P` over `Λ_M`.
pub fn check_holder_step(p: &HomogeneousPolynomial, max_vars: u32, tolerance: f64) -> Result<StepReport> {
    check_degree(p, max_vars)?;
    let coeffs: Vec<f64> = p
        .terms()
        .filter(|(alpha, _)| alpha.vars() <= max_vars as usize)
        .map(|(_, c)| c.norm())
        .collect();
    holder_report(&coeffs, p.degree(), max_vars, tolerance)
}

/// `‖P̂‖ ≤ e^m ‖P‖`: the multilinear search value against `e^m` times the
/// certified upper end of `norm`.
pub fn polarization_step_report(
    p: &HomogeneousPolynomial,
    norm: &NormEstimate,
    cfg: &SearchConfig,
    tolerance: f64,
) -> Result<StepReport> {
    let multilinear = multilinear_sup_norm_lower(p, cfg)?;
    let rhs = f64::from(p.degree()).exp() * norm.upper;
    Ok(StepReport::new(StepId::Polarization, multilinear.lower, rhs, tolerance))
}

pub fn check_polarization_step(p: &HomogeneousPolynomial, cfg: &SearchConfig, tolerance: f64) -> Result<StepReport> {
    polarization_step_report(p, &sup_norm_bracket(p, cfg)?, cfg, tolerance)
}

/// The stronger exponent `2M/(M+1)` before interpolation, with the
/// non-uniform constant of the chain.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PreInterpolationCheck {
    pub q: f64,
    pub lhs: f64,
    pub constant: f64,
    pub passed: bool,
    /// This constant grows with `m`.
    pub m_uniform: bool,
}

/// Per-instance certificate of the uniform bound
/// `(Σ_{α∈Λ_M} |c_α|^{2m/(m+1)})^{(m+1)/(2m)} ≤ κ_M(m) ‖P‖`, using the search
/// lower bound for `‖P‖`. Since that lower bound never exceeds the true norm,
/// a pass is sound.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Certificate {
    pub m: u32,
    #[serde(rename = "M")]
    pub max_vars: u32,
    pub q: f64,
    pub lhs: f64,
    pub kappa: f64,
    pub beta1: f64,
    pub norm_lower: f64,
    pub passed: bool,
    pub pre_interpolation: PreInterpolationCheck,
}

impl Certificate {
    pub fn to_step(&self) -> StepReport {
        let mut report = StepReport::new(StepId::Final, self.lhs, self.kappa * self.norm_lower, 0.0);
        report.passed = self.passed;
        report
    }
}

pub fn certify_with_norm(
    p: &HomogeneousPolynomial,
    max_vars: u32,
    norm: &NormEstimate,
    beta: &BetaConfig,
) -> Result<Certificate> {
    check_degree(p, max_vars)?;
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let m = p.degree();
    let (mf, big_m) = (f64::from(m), f64::from(max_vars));
    let q = 2.0 * mf / (mf + 1.0);
    let lhs = lhs_bh(p, max_vars, q)?;
    let kappa = proof_chain_constant(m, max_vars, beta)?;

    let strong_q = 2.0 * big_m / (big_m + 1.0);
    let strong_lhs = lhs_bh(p, max_vars, strong_q)?;
    let constant = pre_interpolation_constant(m, max_vars, beta)?;
    Ok(Certificate {
        m,
        max_vars,
        q,
        lhs,
        kappa,
        beta1: beta.beta1,
        norm_lower: norm.lower,
        passed: lhs <= kappa * norm.lower,
        pre_interpolation: PreInterpolationCheck {
            q: strong_q,
            lhs: strong_lhs,
            constant,
            passed: strong_lhs <= constant * norm.lower,
            m_uniform: false,
        },
    })
}

pub fn certify_theorem_instance(
    p: &HomogeneousPolynomial,
    max_vars: u32,
    cfg: &SearchConfig,
    beta: &BetaConfig,
) -> Result<Certificate> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let norm = crate::norms::sup_norm_lower(p, cfg)?;
    certify_with_norm(p, max_vars, &norm, beta)
}

/// Tolerances applied by [`verify_polynomial`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Tolerances {
    pub exact: f64,
    pub optimizer: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            exact: EXACT_TOLERANCE,
            optimizer: OPTIMIZER_TOLERANCE,
        }
    }
}

/// Runs the selected steps on one polynomial, sharing one norm bracket.
pub fn verify_polynomial(
    p: &HomogeneousPolynomial,
    max_vars: u32,
    steps: &[StepId],
    cfg: &SearchConfig,
    beta: &BetaConfig,
    tol: &Tolerances,
) -> Result<Vec<StepReport>> {
    check_degree(p, max_vars)?;
    let needs_norm = steps
        .iter()
        .any(|s| matches!(s, StepId::L2Mmp | StepId::Polarization | StepId::Final));
    let norm = if needs_norm {
        Some(sup_norm_bracket(p, cfg)?)
    } else {
        None
    };
    let norm = norm.as_ref();
    steps
        .iter()
        .map(|step| match step {
            StepId::Expansion => check_expansion_step(p, max_vars, tol.exact),
            StepId::Des1 => check_des1_step(p.degree(), max_vars),
            StepId::L2Mmp => l2_step_report(p, norm.expect("norm computed"), tol.optimizer),
            StepId::Holder => check_holder_step(p, max_vars, tol.exact),
            StepId::Polarization => polarization_step_report(p, norm.expect("norm computed"), cfg, tol.optimizer),
            StepId::Final => Ok(certify_with_norm(p, max_vars, norm.expect("norm computed"), beta)?.to_step()),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::MultiIndex;
    use num_complex::Complex64;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn cfg() -> SearchConfig {
        SearchConfig {
            starts: 8,
            ..Default::default()
        }
    }

    fn z0z1() -> HomogeneousPolynomial {
        HomogeneousPolynomial::monomial(2, 2, MultiIndex::from_exponents(&[1, 1]), c(1.0)).unwrap()
    }

    #[test]
    fn step_ids_round_trip() {
        for id in StepId::ALL {
            assert_eq!(StepId::parse(id.as_str()), Some(id));
            assert_eq!(serde_json::to_string(&id).unwrap(), format!("\"{}\"", id.as_str()));
        }
        assert_eq!(StepId::parse("bogus"), None);
    }

    #[test]
    fn expansion_single_monomial() {
        let p = HomogeneousPolynomial::pure_powers(4, &[c(1.0)]).unwrap();
        let r = check_expansion_step(&p, 1, EXACT_TOLERANCE).unwrap();
        assert_eq!(r.lhs, 1.0);
        assert!(r.rhs >= 1.0 && r.passed);
    }

    #[test]
    fn expansion_counts_orderings() {
        // τ = (1,1) with (i_1, i_2) ∈ {(0,1), (1,0)}: each contributes (2 · ½)^{4/3}
        let r = check_expansion_step(&z0z1(), 2, EXACT_TOLERANCE).unwrap();
        assert_eq!(r.lhs, 1.0);
        assert!((r.rhs - 2.0).abs() < 1e-14, "{}", r.rhs);
        assert!(r.passed);
    }

    #[test]
    fn expansion_budget() {
        let p = HomogeneousPolynomial::pure_powers(8, &vec![c(1.0); 40]).unwrap();
        assert!(matches!(
            check_expansion_step(&p, 8, EXACT_TOLERANCE),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn des1_is_exact() {
        for m in 1..=10 {
            for big_m in 1..=m.min(5) {
                let r = check_des1_step(m, big_m).unwrap();
                assert!(r.passed, "m={m} M={big_m}");
            }
        }
        // equality when M divides m: the balanced composition attains the bound
        let r = check_des1_step(6, 3).unwrap();
        assert_eq!(r.lhs, r.rhs);
    }

    #[test]
    fn l2_examples() {
        let r = check_l2_step(&z0z1(), &cfg(), OPTIMIZER_TOLERANCE).unwrap();
        assert!(r.passed && r.lhs == 1.0 && r.rhs == 1.0);

        let p = HomogeneousPolynomial::pure_powers(3, &[c(1.0); 5]).unwrap();
        let r = check_l2_step(&p, &cfg(), OPTIMIZER_TOLERANCE).unwrap();
        assert!((r.lhs - 5f64.sqrt()).abs() < 1e-15);
        assert!(r.rhs >= 5.0 && r.passed);

        let p = HomogeneousPolynomial::pure_powers(2, &[c(1.0), c(1.0)]).unwrap();
        let r = check_l2_step(&p, &cfg(), OPTIMIZER_TOLERANCE).unwrap();
        assert!((r.lhs - 2f64.sqrt()).abs() < 1e-15);
        assert!(r.passed);
        assert!(r.lower_slack.unwrap() > 0.5);
    }

    #[test]
    fn holder_equality_cases() {
        let p = HomogeneousPolynomial::monomial(5, 3, MultiIndex::from_exponents(&[2, 3, 0]), c(-2.5)).unwrap();
        let r = check_holder_step(&p, 2, EXACT_TOLERANCE).unwrap();
        assert!((r.lhs - r.rhs).abs() < 1e-14 && r.passed);

        let r = holder_report(&[0.3, 1.2, 0.7], 3, 3, EXACT_TOLERANCE).unwrap();
        assert!((r.lhs - r.rhs).abs() < 1e-14 && r.passed);
        let r = holder_report(&[], 4, 2, EXACT_TOLERANCE).unwrap();
        assert!(r.passed);
    }

    #[test]
    fn polarization_examples() {
        let p = HomogeneousPolynomial::pure_powers(3, &[c(1.0)]).unwrap();
        let r = check_polarization_step(&p, &cfg(), OPTIMIZER_TOLERANCE).unwrap();
        assert!((r.lhs - 1.0).abs() < 1e-12 && r.passed);
        let r = check_polarization_step(&z0z1(), &cfg(), OPTIMIZER_TOLERANCE).unwrap();
        assert!(r.lhs >= 0.5 - 1e-15);
        assert!((r.rhs - 2f64.exp()).abs() < 1e-12);
        assert!(r.passed);
    }

    #[test]
    fn certificate_examples() {
        let beta = BetaConfig::default();
        let p = HomogeneousPolynomial::pure_powers(4, &[c(1.0)]).unwrap();
        for big_m in 1..=4 {
            let cert = certify_theorem_instance(&p, big_m, &cfg(), &beta).unwrap();
            assert_eq!(cert.lhs, 1.0);
            assert!(cert.passed);
        }

        // Σ_{j<n} z_j^m with M = 1: lhs = n^{(m+1)/(2m)} ≤ e · n
        let n = 6;
        let p = HomogeneousPolynomial::pure_powers(3, &vec![c(1.0); n]).unwrap();
        let cert = certify_theorem_instance(&p, 1, &cfg(), &beta).unwrap();
        assert!((cert.lhs - (n as f64).powf(4.0 / 6.0)).abs() < 1e-12);
        assert!(cert.passed && cert.pre_interpolation.passed);
        assert!(cert.to_step().passed);
    }

    #[test]
    fn certificate_rejects_zero_polynomial() {
        let p = HomogeneousPolynomial::zero(3, 2).unwrap();
        assert!(matches!(
            certify_theorem_instance(&p, 1, &cfg(), &BetaConfig::default()),
            Err(Error::ZeroPolynomial)
        ));
    }

    #[test]
    fn verify_all_steps_on_monomial() {
        let p = HomogeneousPolynomial::monomial(3, 3, MultiIndex::from_exponents(&[1, 2, 0]), c(1.0)).unwrap();
        let reports = verify_polynomial(&p, 2, &StepId::ALL, &cfg(), &BetaConfig::default(), &Tolerances::default()).unwrap();
        assert_eq!(reports.len(), 6);
        assert!(reports.iter().all(|r| r.passed), "{reports:?}");
    }
}

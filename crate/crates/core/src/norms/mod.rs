//! Coefficient norms and bracketed estimates of the supremum norm
//! `‖P‖ = sup_{‖z‖_∞ ≤ 1} |P(z)|`.
//!
//! For fixed moduli the map `z_j ↦ P(z)` is a polynomial in one variable, so
//! by the maximum modulus principle `|P|` is maximized with every `|z_j| = 1`.
//! All searches therefore run over phases on the polytorus. The same holds for
//! the symmetric multilinear form, slot by slot.

mod ascent;
mod cover;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::poly::HomogeneousPolynomial;

pub use ascent::{multilinear_sup_norm_lower, sup_norm_lower, MULTILINEAR_MAX_DEGREE};
pub use cover::sup_norm_upper;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NormMethod {
    ClosedForm,
    MultistartPhase,
    LipschitzGrid,
    Triangle,
}

/// A bracket `[lower, upper]` for a supremum norm.
///
/// `lower` is the modulus at the recorded witness phases; `upper` is a sound
/// bound, or `+∞` when the producing method only searches from below.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormEstimate {
    pub lower: f64,
    #[serde(serialize_with = "ser_upper", deserialize_with = "de_upper")]
    pub upper: f64,
    pub method: NormMethod,
    pub evaluations: u64,
    pub converged: bool,
    pub witness: Vec<f64>,
}

fn ser_upper<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_f64(*v)
    } else {
        s.serialize_none()
    }
}

fn de_upper<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
    Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::INFINITY))
}

impl NormEstimate {
    pub(crate) fn exact(value: f64, witness: Vec<f64>) -> Self {
        Self {
            lower: value,
            upper: value,
            method: NormMethod::ClosedForm,
            evaluations: 1,
            converged: true,
            witness,
        }
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn contains(&self, value: f64) -> bool {
        self.lower <= value && value <= self.upper
    }
}

/// Knobs shared by the phase searches and the certified cover.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    /// Multistart count, including the deterministic starts.
    pub starts: usize,
    /// Maximum number of full coordinate sweeps per start.
    pub max_iters: usize,
    /// A sweep improving the value by less than this (relative) stops a start.
    pub step_tolerance: f64,
    /// Phase grid points per variable used by the certified cover.
    pub grid_resolution: usize,
    /// Cell evaluation budget of the certified cover; when exhausted the bound
    /// still holds but is looser.
    pub max_cells: usize,
    pub seed: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            starts: 32,
            max_iters: 200,
            step_tolerance: 1e-10,
            grid_resolution: 64,
            max_cells: 20_000,
            seed: 0,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.starts < 1 {
            return Err(Error::InvalidParameter("starts must be at least 1".into()));
        }
        if self.grid_resolution < 2 {
            return Err(Error::InvalidParameter(
                "grid_resolution must be at least 2".into(),
            ));
        }
        if !(self.step_tolerance >= 0.0) {
            return Err(Error::InvalidParameter(
                "step_tolerance must be nonnegative".into(),
            ));
        }
        Ok(())
    }
}

/// `(Σ |x_i|^q)^{1/q}` for `q ≥ 1`, scaled to avoid overflow. `q = 1` is a
/// plain sum in iteration order.
pub fn lq_norm<I: IntoIterator<Item = f64>>(values: I, q: f64) -> Result<f64> {
    if !(q >= 1.0) {
        return Err(Error::InvalidExponent(q));
    }
    let values: Vec<f64> = values.into_iter().map(f64::abs).collect();
    if q == 1.0 {
        return Ok(values.iter().sum());
    }
    let max = values.iter().copied().fold(0.0_f64, f64::max);
    if max == 0.0 {
        return Ok(0.0);
    }
    if q.is_infinite() {
        return Ok(max);
    }
    let s: f64 = values.iter().map(|v| (v / max).powf(q)).sum();
    Ok(max * s.powf(1.0 / q))
}

/// `ℓ_q` norm of the coefficients, optionally restricted to monomials with
/// at most `max_vars` distinct variables.
pub fn coeff_lq_norm(p: &HomogeneousPolynomial, q: f64, max_vars: Option<usize>) -> Result<f64> {
    lq_norm(
        p.terms()
            .filter(|(alpha, _)| max_vars.is_none_or(|mv| alpha.vars() <= mv))
            .map(|(_, c)| c.norm()),
        q,
    )
}

/// `Σ |c_α|`, an upper bound for `‖P‖` by the triangle inequality.
pub fn trivial_upper(p: &HomogeneousPolynomial) -> f64 {
    p.terms().map(|(_, c)| c.norm()).sum()
}

/// Combines the multistart lower bound with the certified upper bound.
pub fn sup_norm_bracket(p: &HomogeneousPolynomial, cfg: &SearchConfig) -> Result<NormEstimate> {
    let low = sup_norm_lower(p, cfg)?;
    let up = cover::sup_norm_upper_from(p, cfg, low.lower)?;
    if up.method == NormMethod::ClosedForm {
        return Ok(up);
    }
    let (mut lower, witness) = if low.lower >= up.lower {
        (low.lower, low.witness)
    } else {
        (up.lower, up.witness)
    };
    // Both ends are computed in floating point; a witness value may exceed a
    // tight certified bound by a few ulps.
    lower = lower.min(up.upper);
    Ok(NormEstimate {
        lower,
        upper: up.upper,
        method: up.method,
        evaluations: low.evaluations + up.evaluations,
        converged: low.converged && up.converged,
        witness,
    })
}

/// Unit-modulus point `e^{iθ_j}` from phases.
pub fn torus_point(phases: &[f64]) -> Vec<Complex64> {
    phases.iter().map(|&t| Complex64::cis(t)).collect()
}

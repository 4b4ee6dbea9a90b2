//! Seeded test-vector generation on `Λ_M(m, n)`.

use std::f64::consts::{FRAC_1_SQRT_2, TAU};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{enumerate_lambda, HomogeneousPolynomial};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum PolynomialKind {
    /// Unit-modulus coefficients with uniform phases on the full support.
    Steinhaus,
    /// Standard complex normal coefficients (`E|c|² = 1`) on the full support.
    Gaussian,
    /// Steinhaus coefficients, each monomial kept with probability `density`.
    SparseLambda,
}

/// Deterministic polynomial supported in `Λ_M(m, n)`. `density` only thins
/// the support of [`PolynomialKind::SparseLambda`]; an empty draw is retried
/// once.
pub fn random_polynomial(
    kind: PolynomialKind,
    m: u32,
    max_vars: u32,
    n: usize,
    density: f64,
    seed: u64,
) -> Result<HomogeneousPolynomial> {
    if !(0.0..=1.0).contains(&density) {
        return Err(Error::InvalidParameter(format!(
            "density must lie in [0, 1], got {density}"
        )));
    }
    let support = enumerate_lambda(m, max_vars, n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let terms = match kind {
        PolynomialKind::Steinhaus => support
            .into_iter()
            .map(|a| (a, Complex64::cis(rng.random::<f64>() * TAU)))
            .collect::<Vec<_>>(),
        PolynomialKind::Gaussian => support
            .into_iter()
            .map(|a| {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                (a, Complex64::new(re, im) * FRAC_1_SQRT_2)
            })
            .collect(),
        PolynomialKind::SparseLambda => {
            let mut kept = Vec::new();
            for _attempt in 0..2 {
                kept.clear();
                for a in &support {
                    if rng.random::<f64>() < density {
                        kept.push((a.clone(), Complex64::cis(rng.random::<f64>() * TAU)));
                    }
                }
                if !kept.is_empty() {
                    break;
                }
            }
            if kept.is_empty() {
                return Err(Error::EmptySupport(density));
            }
            kept
        }
    };
    HomogeneousPolynomial::new(m, n, terms)
}

/// Derives an independent 64-bit seed for item `index` of a run (SplitMix64).
pub fn derive_seed(base: u64, index: u64) -> u64 {
    let mut z = base
        .wrapping_add(0x9E37_79B9_7F4A_7C15)
        .wrapping_add(index.wrapping_mul(0xBF58_476D_1CE4_E5B9));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

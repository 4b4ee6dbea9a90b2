//! Multi-indices, homogeneous polynomials and their symmetric multilinear forms.

mod combinatorics;
mod enumerate;
mod json;
mod multilinear;

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};

pub use combinatorics::{binomial, factorial, multinomial, BigNat};
pub use enumerate::{enumerate_compositions, enumerate_lambda};
pub use json::PolynomialFile;
pub use multilinear::{polarization_eval, symmetric_form_basis, SymmetricTensor, POLARIZATION_MAX_DEGREE};

/// Sparse exponent vector: variable index to a strictly positive exponent.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MultiIndex {
    entries: BTreeMap<usize, u32>,
}

impl MultiIndex {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a multi-index from `(variable, exponent)` pairs. Exponents of
    /// repeated variables are added; zero exponents are dropped.
    pub fn from_pairs<I: IntoIterator<Item = (usize, u32)>>(pairs: I) -> Self {
        let mut entries = BTreeMap::new();
        for (var, exp) in pairs {
            if exp > 0 {
                *entries.entry(var).or_insert(0) += exp;
            }
        }
        Self { entries }
    }

    /// Dense exponent vector, position `j` holding the exponent of `z_j`.
    pub fn from_exponents(exponents: &[u32]) -> Self {
        Self::from_pairs(exponents.iter().copied().enumerate())
    }

    /// `|α|`, the total degree.
    pub fn degree(&self) -> u32 {
        self.entries.values().sum()
    }

    /// Number of distinct variables with a nonzero exponent.
    pub fn vars(&self) -> usize {
        self.entries.len()
    }

    pub fn exponent(&self, var: usize) -> u32 {
        self.entries.get(&var).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, u32)> + '_ {
        self.entries.iter().map(|(&v, &e)| (v, e))
    }

    pub fn max_var(&self) -> Option<usize> {
        self.entries.keys().next_back().copied()
    }

    /// `|α|! / Π α_j!`, exact.
    pub fn multinomial(&self) -> BigNat {
        let parts: Vec<u32> = self.entries.values().copied().collect();
        multinomial(&parts)
    }

    /// Evaluates `z^α`.
    pub fn monomial(&self, z: &[Complex64]) -> Complex64 {
        self.iter()
            .fold(Complex64::new(1.0, 0.0), |acc, (v, e)| acc * z[v].powu(e))
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.entries.is_empty() {
            return write!(f, "1");
        }
        let mut first = true;
        for (v, e) in self.iter() {
            if !first {
                write!(f, "·")?;
            }
            first = false;
            if e == 1 {
                write!(f, "z{v}")?;
            } else {
                write!(f, "z{v}^{e}")?;
            }
        }
        Ok(())
    }
}

/// An m-homogeneous polynomial on `C^n`, stored as a sparse coefficient map.
///
/// Zero coefficients are never stored, so the support is exactly the key set.
#[derive(Clone, Debug, PartialEq)]
pub struct HomogeneousPolynomial {
    degree: u32,
    num_vars: usize,
    coeffs: BTreeMap<MultiIndex, Complex64>,
}

impl HomogeneousPolynomial {
    /// Builds a polynomial from terms. Coefficients of repeated multi-indices
    /// are summed and exact zeros are removed.
    pub fn new<I>(degree: u32, num_vars: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (MultiIndex, Complex64)>,
    {
        if degree == 0 {
            return Err(Error::InvalidParameter("degree must be positive".into()));
        }
        if num_vars == 0 {
            return Err(Error::InvalidParameter(
                "number of variables must be positive".into(),
            ));
        }
        let mut coeffs: BTreeMap<MultiIndex, Complex64> = BTreeMap::new();
        for (alpha, c) in terms {
            if alpha.degree() != degree {
                return Err(Error::Malformed(format!(
                    "monomial {alpha} has degree {}, expected {degree}",
                    alpha.degree()
                )));
            }
            if let Some(v) = alpha.max_var() {
                if v >= num_vars {
                    return Err(Error::Malformed(format!(
                        "monomial {alpha} uses variable {v} outside 0..{num_vars}"
                    )));
                }
            }
            if !(c.re.is_finite() && c.im.is_finite()) {
                return Err(Error::Malformed(format!(
                    "non-finite coefficient for {alpha}"
                )));
            }
            *coeffs.entry(alpha).or_insert(Complex64::new(0.0, 0.0)) += c;
        }
        coeffs.retain(|_, c| *c != Complex64::new(0.0, 0.0));
        Ok(Self {
            degree,
            num_vars,
            coeffs,
        })
    }

    pub fn zero(degree: u32, num_vars: usize) -> Result<Self> {
        Self::new(degree, num_vars, std::iter::empty())
    }

    /// `c · z_var^degree`.
    pub fn monomial(degree: u32, num_vars: usize, alpha: MultiIndex, c: Complex64) -> Result<Self> {
        Self::new(degree, num_vars, [(alpha, c)])
    }

    /// `Σ_j c_j z_j^m`, one pure power per coefficient.
    pub fn pure_powers(degree: u32, coeffs: &[Complex64]) -> Result<Self> {
        Self::new(
            degree,
            coeffs.len(),
            coeffs
                .iter()
                .enumerate()
                .map(|(j, &c)| (MultiIndex::from_pairs([(j, degree)]), c)),
        )
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    /// Number of stored (nonzero) coefficients.
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.is_zero()
    }

    /// `c_α`, zero when `α` is not in the support.
    pub fn coefficient(&self, alpha: &MultiIndex) -> Complex64 {
        self.coeffs
            .get(alpha)
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &Complex64)> + '_ {
        self.coeffs.iter()
    }

    /// Variables that occur in at least one monomial, ascending.
    pub fn active_vars(&self) -> Vec<usize> {
        let mut seen = vec![false; self.num_vars];
        for alpha in self.coeffs.keys() {
            for (v, _) in alpha.iter() {
                seen[v] = true;
            }
        }
        (0..self.num_vars).filter(|&v| seen[v]).collect()
    }

    /// `Σ c_α z^α`.
    pub fn evaluate(&self, z: &[Complex64]) -> Result<Complex64> {
        if z.len() != self.num_vars {
            return Err(Error::DimensionMismatch {
                expected: self.num_vars,
                got: z.len(),
            });
        }
        Ok(self
            .coeffs
            .iter()
            .map(|(alpha, c)| c * alpha.monomial(z))
            .sum())
    }

    /// `λ · P`.
    pub fn scaled(&self, lambda: Complex64) -> Self {
        let terms = self.coeffs.iter().map(|(a, c)| (a.clone(), c * lambda));
        Self::new(self.degree, self.num_vars, terms).expect("scaling preserves validity")
    }

    /// Replaces (or removes, when zero) a single coefficient.
    pub fn with_coefficient(&self, alpha: &MultiIndex, c: Complex64) -> Result<Self> {
        let mut coeffs = self.coeffs.clone();
        coeffs.remove(alpha);
        Self::new(
            self.degree,
            self.num_vars,
            coeffs.into_iter().chain(std::iter::once((alpha.clone(), c))),
        )
    }
}

impl fmt::Display for HomogeneousPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (alpha, c) in &self.coeffs {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({}{:+}i)·{alpha}", c.re, c.im)?;
        }
        Ok(())
    }
}

/// An ordered tuple of nonnegative parts summing to `total`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Composition {
    parts: Vec<u32>,
    total: u32,
}

impl Composition {
    pub fn new(parts: Vec<u32>) -> Self {
        let total = parts.iter().sum();
        Self { parts, total }
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    pub fn total(&self) -> u32 {
        self.total
    }

    /// Part `k` becomes the exponent of variable `k`.
    pub fn to_multi_index(&self) -> MultiIndex {
        MultiIndex::from_exponents(&self.parts)
    }

    /// `m! / Π τ_k!` with `0! = 1` for empty parts.
    pub fn multinomial(&self) -> BigNat {
        multinomial(&self.parts)
    }
}

//! The symmetric m-linear form `P̂` associated with a homogeneous polynomial.
//!
//! At blocks of standard basis vectors `P̂(e_{i_1}^{τ_1}, …, e_{i_M}^{τ_M})`
//! depends only on the aggregated multi-index `α` and equals
//! `c_α / binom(m, α)`. At arbitrary vectors it is recovered from `P` by the
//! sign-averaged polarization identity
//!
//! ```text
//! P̂(x_1, …, x_m) = 1 / (2^m m!) Σ_{ε ∈ {±1}^m} ε_1⋯ε_m P(ε_1 x_1 + ⋯ + ε_m x_m)
//! ```

use std::collections::HashMap;

use num_complex::Complex64;
use num_traits::ToPrimitive;

use crate::error::{Error, Result};

use super::{factorial, HomogeneousPolynomial, MultiIndex};

/// Largest degree accepted by [`polarization_eval`] (`2^m` evaluations of `P`).
pub const POLARIZATION_MAX_DEGREE: u32 = 12;

/// `P̂(e_{i_1}^{τ_1}, …, e_{i_k}^{τ_k})` for `blocks = [(i_1, τ_1), …]`.
///
/// Blocks with zero multiplicity are skipped and repeated variable indices are
/// merged, so the result is invariant under permutations of `blocks`.
pub fn symmetric_form_basis(p: &HomogeneousPolynomial, blocks: &[(usize, u32)]) -> Result<Complex64> {
    let total: u32 = blocks.iter().map(|&(_, t)| t).sum();
    if total != p.degree() {
        return Err(Error::DegreeMismatch {
            expected: p.degree(),
            got: total,
        });
    }
    let alpha = MultiIndex::from_pairs(blocks.iter().copied());
    Ok(basis_value(p, &alpha))
}

/// `c_α / binom(m, α)`.
pub(crate) fn basis_value(p: &HomogeneousPolynomial, alpha: &MultiIndex) -> Complex64 {
    let c = p.coefficient(alpha);
    if c == Complex64::new(0.0, 0.0) {
        return c;
    }
    let weight = alpha
        .multinomial()
        .to_f64()
        .expect("multinomial converts to f64");
    c / weight
}

/// Evaluates `P̂(x_1, …, x_m)` at arbitrary vectors through the polarization
/// identity. Intended as a brute-force oracle: it costs `2^m` evaluations of `P`.
pub fn polarization_eval(p: &HomogeneousPolynomial, xs: &[Vec<Complex64>]) -> Result<Complex64> {
    let m = p.degree();
    if m > POLARIZATION_MAX_DEGREE {
        return Err(Error::OracleScale {
            degree: m,
            limit: POLARIZATION_MAX_DEGREE,
        });
    }
    if xs.len() != m as usize {
        return Err(Error::InvalidParameter(format!(
            "polarization needs {m} vectors, got {}",
            xs.len()
        )));
    }
    let n = p.num_vars();
    for x in xs {
        if x.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: x.len(),
            });
        }
    }
    let mut acc = Complex64::new(0.0, 0.0);
    let mut point = vec![Complex64::new(0.0, 0.0); n];
    for mask in 0u32..(1u32 << m) {
        point.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
        let mut negatives = 0;
        for (k, x) in xs.iter().enumerate() {
            let negative = mask & (1 << k) != 0;
            negatives += negative as u32;
            for (acc_j, x_j) in point.iter_mut().zip(x) {
                if negative {
                    *acc_j -= x_j;
                } else {
                    *acc_j += x_j;
                }
            }
        }
        let value = p.evaluate(&point)?;
        if negatives % 2 == 0 {
            acc += value;
        } else {
            acc -= value;
        }
    }
    let norm = factorial(m).to_f64().expect("small factorial") * f64::from(1u32 << m);
    Ok(acc / norm)
}

/// Dense coefficient array of `P̂`: entry `(i_1, …, i_m)` holds
/// `c_α / binom(m, α)` where `α` counts the indices.
///
/// Contractions against `m - 1` vectors produce the linear functional of the
/// remaining slot, which is what block-coordinate ascent on `|P̂|` needs.
#[derive(Clone, Debug)]
pub struct SymmetricTensor {
    n: usize,
    m: u32,
    data: Vec<Complex64>,
}

impl SymmetricTensor {
    pub fn from_polynomial(p: &HomogeneousPolynomial, max_entries: usize) -> Result<Self> {
        let n = p.num_vars();
        let m = p.degree();
        let entries = (n as u128).checked_pow(m).unwrap_or(u128::MAX);
        if entries > max_entries as u128 {
            return Err(Error::BudgetExceeded {
                needed: entries,
                budget: max_entries as u128,
            });
        }
        let entries = entries as usize;

        let mut values: HashMap<Vec<u32>, Complex64> = HashMap::new();
        for (alpha, _) in p.terms() {
            let mut counts = vec![0u32; n];
            for (v, e) in alpha.iter() {
                counts[v] = e;
            }
            values.insert(counts, basis_value(p, alpha));
        }

        let mut data = vec![Complex64::new(0.0, 0.0); entries];
        let mut tuple = vec![0usize; m as usize];
        let mut counts = vec![0u32; n];
        counts[0] = m;
        for slot in data.iter_mut() {
            if let Some(v) = values.get(counts.as_slice()) {
                *slot = *v;
            }
            // odometer increment, last slot fastest
            for k in (0..m as usize).rev() {
                counts[tuple[k]] -= 1;
                tuple[k] += 1;
                if tuple[k] < n {
                    counts[tuple[k]] += 1;
                    break;
                }
                tuple[k] = 0;
                counts[0] += 1;
            }
        }
        Ok(Self { n, m, data })
    }

    pub fn num_vars(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> u32 {
        self.m
    }

    /// Contracts all slots but one with `others` (`m - 1` vectors). By symmetry
    /// the free slot can be any of them.
    pub fn gradient(&self, others: &[&[Complex64]]) -> Vec<Complex64> {
        assert_eq!(others.len() + 1, self.m as usize, "need m - 1 vectors");
        let mut buf: Option<Vec<Complex64>> = None;
        for v in others {
            let src: &[Complex64] = buf.as_deref().unwrap_or(&self.data);
            let stride = src.len() / self.n;
            let mut next = vec![Complex64::new(0.0, 0.0); stride];
            for (i, vi) in v.iter().enumerate() {
                if *vi == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let block = &src[i * stride..(i + 1) * stride];
                for (acc, t) in next.iter_mut().zip(block) {
                    *acc += vi * t;
                }
            }
            buf = Some(next);
        }
        buf.unwrap_or_else(|| self.data.clone())
    }

    /// `P̂(x_1, …, x_m)`.
    pub fn value(&self, xs: &[&[Complex64]]) -> Complex64 {
        let (last, rest) = xs.split_last().expect("at least one vector");
        let g = self.gradient(rest);
        g.iter().zip(last.iter()).map(|(a, b)| a * b).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn e(j: usize, n: usize) -> Vec<Complex64> {
        let mut v = vec![c(0.0); n];
        v[j] = c(1.0);
        v
    }

    fn z0sq_z1() -> HomogeneousPolynomial {
        HomogeneousPolynomial::monomial(3, 2, MultiIndex::from_pairs([(0, 2), (1, 1)]), c(1.0)).unwrap()
    }

    #[test]
    fn basis_blocks() {
        let p = z0sq_z1();
        let v = symmetric_form_basis(&p, &[(0, 2), (1, 1)]).unwrap();
        assert!((v - c(1.0 / 3.0)).norm() < 1e-15);
        let v = symmetric_form_basis(&p, &[(0, 1), (0, 1), (1, 1)]).unwrap();
        assert!((v - c(1.0 / 3.0)).norm() < 1e-15);
        let v = symmetric_form_basis(&p, &[(1, 1), (0, 0), (0, 2)]).unwrap();
        assert!((v - c(1.0 / 3.0)).norm() < 1e-15);
        assert_eq!(symmetric_form_basis(&p, &[(0, 3)]).unwrap(), c(0.0));

        let pure = HomogeneousPolynomial::pure_powers(5, &[c(1.0)]).unwrap();
        assert_eq!(symmetric_form_basis(&pure, &[(0, 5)]).unwrap(), c(1.0));
    }

    #[test]
    fn basis_blocks_must_sum_to_degree() {
        let p = z0sq_z1();
        assert!(matches!(
            symmetric_form_basis(&p, &[(0, 1), (1, 1)]),
            Err(Error::DegreeMismatch { expected: 3, got: 2 })
        ));
    }

    #[test]
    fn polarization_examples() {
        let p = HomogeneousPolynomial::monomial(2, 2, MultiIndex::from_pairs([(0, 1), (1, 1)]), c(1.0)).unwrap();
        let v = polarization_eval(&p, &[e(0, 2), e(1, 2)]).unwrap();
        assert!((v - c(0.5)).norm() < 1e-15);

        let p = HomogeneousPolynomial::pure_powers(2, &[c(1.0)]).unwrap();
        let v = polarization_eval(&p, &[e(0, 1), e(0, 1)]).unwrap();
        assert!((v - c(1.0)).norm() < 1e-15);

        let v = polarization_eval(&z0sq_z1(), &[e(0, 2), e(0, 2), e(1, 2)]).unwrap();
        assert!((v - c(1.0 / 3.0)).norm() < 1e-15);
    }

    #[test]
    fn polarization_rejects_large_degree_and_bad_shapes() {
        let p = HomogeneousPolynomial::pure_powers(13, &[c(1.0)]).unwrap();
        let xs = vec![e(0, 1); 13];
        assert!(matches!(polarization_eval(&p, &xs), Err(Error::OracleScale { .. })));

        let p = z0sq_z1();
        assert!(polarization_eval(&p, &[e(0, 2), e(1, 2)]).is_err());
        assert!(matches!(
            polarization_eval(&p, &[e(0, 2), e(1, 2), e(0, 3)]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn tensor_matches_polarization() {
        let p = HomogeneousPolynomial::new(
            3,
            3,
            [
                (MultiIndex::from_pairs([(0, 2), (1, 1)]), Complex64::new(1.0, -0.5)),
                (MultiIndex::from_pairs([(2, 3)]), Complex64::new(0.25, 2.0)),
                (MultiIndex::from_pairs([(0, 1), (1, 1), (2, 1)]), Complex64::new(-1.5, 0.0)),
            ],
        )
        .unwrap();
        let t = SymmetricTensor::from_polynomial(&p, 1 << 10).unwrap();
        let xs = vec![
            vec![Complex64::new(0.3, 0.1), Complex64::new(-0.2, 0.7), Complex64::new(0.5, 0.5)],
            vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, -1.0), Complex64::new(0.6, 0.8)],
            vec![Complex64::new(-0.4, 0.2), Complex64::new(0.9, 0.0), Complex64::new(0.1, -0.3)],
        ];
        let refs: Vec<&[Complex64]> = xs.iter().map(|x| x.as_slice()).collect();
        let dense = t.value(&refs);
        let oracle = polarization_eval(&p, &xs).unwrap();
        assert!((dense - oracle).norm() < 1e-13, "{dense} vs {oracle}");
    }

    #[test]
    fn tensor_respects_budget() {
        let p = HomogeneousPolynomial::pure_powers(4, &[c(1.0); 8]).unwrap();
        assert!(matches!(
            SymmetricTensor::from_polynomial(&p, 1000),
            Err(Error::BudgetExceeded { .. })
        ));
    }
}

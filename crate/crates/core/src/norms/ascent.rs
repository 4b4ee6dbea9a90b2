//! Multistart coordinate-wise phase ascent for `|P|` and `|P̂|`.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::poly::{polarization_eval, HomogeneousPolynomial, SymmetricTensor};

use super::{NormEstimate, NormMethod, SearchConfig};

/// Degree limit of [`multilinear_sup_norm_lower`].
pub const MULTILINEAR_MAX_DEGREE: u32 = 8;

/// Dense tensors above this many entries are refused.
const TENSOR_MAX_ENTRIES: usize = 1 << 20;

const GOLDEN: f64 = 0.618_033_988_749_894_9;

/// Lower bound on `‖P‖`: the best `|P(z)|` found by cyclic single-phase
/// maximization from several starts on the torus. Start 0 is the all-ones
/// point; about half of the rest follow a Kronecker sequence, the others are
/// drawn from a ChaCha stream keyed by `(cfg.seed, start)`.
///
/// The returned `upper` is `+∞`.
pub fn sup_norm_lower(p: &HomogeneousPolynomial, cfg: &SearchConfig) -> Result<NormEstimate> {
    cfg.validate()?;
    let n = p.num_vars();
    if p.len() <= 1 {
        let value = p.terms().next().map_or(0.0, |(_, c)| c.norm());
        return Ok(NormEstimate::exact(value, vec![0.0; n]));
    }
    let compiled = Compiled::new(p);
    let results: Vec<StartResult> = (0..cfg.starts)
        .into_par_iter()
        .map(|s| {
            let mut phases = initial_phases(s, n, cfg);
            compiled.ascend(&mut phases, cfg)
        })
        .collect();
    Ok(reduce(results, f64::INFINITY))
}

/// Lower bound on `‖P̂‖ = sup |P̂(x_1, …, x_m)|` over `m`-tuples of torus
/// points, by block-coordinate ascent. Each slot update is exact: with the
/// other slots fixed `P̂` is the linear functional `w`, maximized on the torus
/// at `x_j = conj(w_j)/|w_j|` with value `Σ |w_j|`.
///
/// Start 0 is the basis block with the largest `|c_α| / binom(m, α)`, so the
/// result dominates every basis value. The reported value is re-evaluated at
/// the witness with the polarization oracle.
pub fn multilinear_sup_norm_lower(p: &HomogeneousPolynomial, cfg: &SearchConfig) -> Result<NormEstimate> {
    cfg.validate()?;
    let m = p.degree();
    if m > MULTILINEAR_MAX_DEGREE {
        return Err(Error::OracleScale {
            degree: m,
            limit: MULTILINEAR_MAX_DEGREE,
        });
    }
    let n = p.num_vars();
    let mu = m as usize;
    if p.is_zero() {
        return Ok(NormEstimate::exact(0.0, vec![0.0; mu * n]));
    }
    let tensor = SymmetricTensor::from_polynomial(p, TENSOR_MAX_ENTRIES)?;
    let basis_start = best_basis_block(p);

    let results: Vec<(StartResult, Vec<Vec<Complex64>>)> = (0..cfg.starts)
        .into_par_iter()
        .map(|s| {
            let mut xs = if s == 0 {
                basis_start.clone()
            } else {
                let phases = initial_phases(s, mu * n, cfg);
                phases.chunks(n).map(super::torus_point).collect()
            };
            let r = ascend_multilinear(&tensor, &mut xs, cfg);
            (r, xs)
        })
        .collect();

    let mut best = 0;
    for (i, (r, _)) in results.iter().enumerate() {
        if r.value > results[best].0.value {
            best = i;
        }
    }
    let evaluations: u64 = results.iter().map(|(r, _)| r.evaluations).sum();
    let converged = results.iter().all(|(r, _)| r.converged);
    let xs = &results[best].1;
    let value = polarization_eval(p, xs)?.norm();
    Ok(NormEstimate {
        lower: value,
        upper: f64::INFINITY,
        method: NormMethod::MultistartPhase,
        evaluations: evaluations + (1u64 << m),
        converged,
        witness: xs.iter().flatten().map(|z| z.arg()).collect(),
    })
}

struct StartResult {
    value: f64,
    phases: Vec<f64>,
    evaluations: u64,
    converged: bool,
}

/// Highest value wins; ties keep the lowest start index.
fn reduce(results: Vec<StartResult>, upper: f64) -> NormEstimate {
    let evaluations = results.iter().map(|r| r.evaluations).sum();
    let converged = results.iter().all(|r| r.converged);
    let best = results
        .into_iter()
        .reduce(|a, b| if b.value > a.value { b } else { a })
        .expect("at least one start");
    NormEstimate {
        lower: best.value,
        upper,
        method: NormMethod::MultistartPhase,
        evaluations,
        converged,
        witness: best.phases,
    }
}

pub(crate) fn initial_phases(start: usize, dim: usize, cfg: &SearchConfig) -> Vec<f64> {
    if start == 0 {
        return vec![0.0; dim];
    }
    let low_discrepancy = cfg.starts.div_ceil(2);
    if start < low_discrepancy {
        // R-sequence: additive recurrence with powers of the generalized golden ratio.
        let phi = generalized_golden(dim);
        let mut a = 1.0;
        (0..dim)
            .map(|_| {
                a /= phi;
                TAU * (0.5 + start as f64 * a).fract()
            })
            .collect()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(start as u64);
        (0..dim).map(|_| rng.random::<f64>() * TAU).collect()
    }
}

/// Unique positive root of `x^{d+1} = x + 1`.
fn generalized_golden(dim: usize) -> f64 {
    let mut x: f64 = 2.0;
    for _ in 0..64 {
        x = (1.0 + x).powf(1.0 / (dim as f64 + 1.0));
    }
    x
}

/// Dense view of a polynomial for fast coordinate updates.
struct Compiled {
    n: usize,
    m: usize,
    exps: Vec<u32>,
    coeffs: Vec<Complex64>,
    active: Vec<usize>,
}

impl Compiled {
    fn new(p: &HomogeneousPolynomial) -> Self {
        let n = p.num_vars();
        let mut exps = Vec::with_capacity(p.len() * n);
        let mut coeffs = Vec::with_capacity(p.len());
        for (alpha, c) in p.terms() {
            let start = exps.len();
            exps.resize(start + n, 0);
            for (v, e) in alpha.iter() {
                exps[start + v] = e;
            }
            coeffs.push(*c);
        }
        Self {
            n,
            m: p.degree() as usize,
            exps,
            coeffs,
            active: p.active_vars(),
        }
    }

    fn powers(&self, phases: &[f64]) -> Vec<Complex64> {
        let stride = self.m + 1;
        let mut pow = vec![Complex64::new(1.0, 0.0); self.n * stride];
        for (j, &t) in phases.iter().enumerate() {
            self.set_powers(&mut pow, j, t);
        }
        pow
    }

    fn set_powers(&self, pow: &mut [Complex64], j: usize, phase: f64) {
        let stride = self.m + 1;
        for e in 0..=self.m {
            pow[j * stride + e] = Complex64::cis(e as f64 * phase);
        }
    }

    /// Coefficients `a_e` of `P` as a polynomial in `z_j` alone.
    fn univariate(&self, pow: &[Complex64], j: usize, out: &mut [Complex64]) {
        let stride = self.m + 1;
        out.iter_mut().for_each(|a| *a = Complex64::new(0.0, 0.0));
        for (t, c) in self.coeffs.iter().enumerate() {
            let row = &self.exps[t * self.n..(t + 1) * self.n];
            let mut v = *c;
            for (k, &e) in row.iter().enumerate() {
                if k != j && e > 0 {
                    v *= pow[k * stride + e as usize];
                }
            }
            out[row[j] as usize] += v;
        }
    }

    fn ascend(&self, phases: &mut [f64], cfg: &SearchConfig) -> StartResult {
        let mut pow = self.powers(phases);
        let mut a = vec![Complex64::new(0.0, 0.0); self.m + 1];
        let mut evaluations = 0u64;
        let mut value = {
            self.univariate(&pow, self.active[0], &mut a);
            evaluations += 1;
            horner_abs(&a, phases[self.active[0]])
        };
        let mut converged = false;
        for _ in 0..cfg.max_iters {
            let before = value;
            for &j in &self.active {
                self.univariate(&pow, j, &mut a);
                let (theta, v, evals) = maximize_trig(&a, phases[j]);
                evaluations += evals;
                if v > value * (1.0 + 4.0 * f64::EPSILON) {
                    value = v;
                    phases[j] = theta;
                    self.set_powers(&mut pow, j, theta);
                }
            }
            if value - before <= cfg.step_tolerance * before.max(1.0) {
                converged = true;
                break;
            }
        }
        StartResult {
            value,
            phases: phases.to_vec(),
            evaluations,
            converged,
        }
    }
}

/// `|Σ_e a_e e^{ieθ}|`.
fn horner_abs(a: &[Complex64], theta: f64) -> f64 {
    let w = Complex64::cis(theta);
    a.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * w + c).norm()
}

/// Maximizes `|Σ a_e e^{ieθ}|` over one period: a uniform scan brackets the
/// best lobe, golden-section search refines inside it. Never returns a value
/// below the one at `current`.
fn maximize_trig(a: &[Complex64], current: f64) -> (f64, f64, u64) {
    let degree = a.iter().rposition(|c| *c != Complex64::new(0.0, 0.0)).unwrap_or(0);
    let lowest = a.iter().position(|c| *c != Complex64::new(0.0, 0.0)).unwrap_or(0);
    let current_value = horner_abs(a, current);
    if degree == lowest {
        // a single power: modulus independent of θ
        return (current, current_value, 1);
    }
    let grid = (4 * (degree + 1)).max(16);
    let step = TAU / grid as f64;
    let mut best = (current, current_value);
    let mut evaluations = 1u64;
    for k in 1..grid {
        let t = current + k as f64 * step;
        let v = horner_abs(a, t);
        evaluations += 1;
        if v > best.1 {
            best = (t, v);
        }
    }
    let (mut lo, mut hi) = (best.0 - step, best.0 + step);
    let mut x1 = hi - GOLDEN * (hi - lo);
    let mut x2 = lo + GOLDEN * (hi - lo);
    let mut f1 = horner_abs(a, x1);
    let mut f2 = horner_abs(a, x2);
    evaluations += 2;
    while hi - lo > 1e-10 {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + GOLDEN * (hi - lo);
            f2 = horner_abs(a, x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - GOLDEN * (hi - lo);
            f1 = horner_abs(a, x1);
        }
        evaluations += 1;
    }
    for (t, v) in [(x1, f1), (x2, f2)] {
        if v > best.1 {
            best = (t, v);
        }
    }
    (best.0.rem_euclid(TAU), best.1, evaluations)
}

/// Basis vectors of the block maximizing `|c_α| / binom(m, α)`.
fn best_basis_block(p: &HomogeneousPolynomial) -> Vec<Vec<Complex64>> {
    let n = p.num_vars();
    let mut best: Option<(f64, &crate::poly::MultiIndex)> = None;
    for (alpha, _) in p.terms() {
        let v = crate::poly::symmetric_form_basis(p, &alpha.iter().collect::<Vec<_>>())
            .expect("aggregated blocks have the right degree")
            .norm();
        if best.is_none_or(|(b, _)| v > b) {
            best = Some((v, alpha));
        }
    }
    let (_, alpha) = best.expect("nonzero polynomial");
    let mut xs = Vec::with_capacity(p.degree() as usize);
    for (v, e) in alpha.iter() {
        for _ in 0..e {
            let mut x = vec![Complex64::new(0.0, 0.0); n];
            x[v] = Complex64::new(1.0, 0.0);
            xs.push(x);
        }
    }
    xs
}

fn ascend_multilinear(tensor: &SymmetricTensor, xs: &mut [Vec<Complex64>], cfg: &SearchConfig) -> StartResult {
    let m = xs.len();
    let mut evaluations = 1u64;
    let mut value = {
        let refs: Vec<&[Complex64]> = xs.iter().map(|x| x.as_slice()).collect();
        tensor.value(&refs).norm()
    };
    let mut converged = false;
    for _ in 0..cfg.max_iters {
        let before = value;
        for k in 0..m {
            let w = {
                let others: Vec<&[Complex64]> = xs
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| *i != k)
                    .map(|(_, x)| x.as_slice())
                    .collect();
                tensor.gradient(&others)
            };
            evaluations += 1;
            // The slot optimum dominates the current value, so the update is
            // unconditional; it also moves basis starts onto the torus.
            value = w.iter().map(|c| c.norm()).sum();
            for (x, wj) in xs[k].iter_mut().zip(&w) {
                let r = wj.norm();
                *x = if r > 0.0 { wj.conj() / r } else { Complex64::new(1.0, 0.0) };
            }
        }
        if value - before <= cfg.step_tolerance * before.max(1.0) {
            converged = true;
            break;
        }
    }
    StartResult {
        value,
        phases: Vec::new(),
        evaluations,
        converged,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::MultiIndex;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn cfg() -> SearchConfig {
        SearchConfig {
            starts: 8,
            ..Default::default()
        }
    }

    #[test]
    fn single_monomial_is_closed_form() {
        let p = HomogeneousPolynomial::monomial(2, 2, MultiIndex::from_exponents(&[1, 1]), c(1.0, 0.0)).unwrap();
        let est = sup_norm_lower(&p, &cfg()).unwrap();
        assert_eq!(est.lower, 1.0);
        assert_eq!(est.method, NormMethod::ClosedForm);
    }

    #[test]
    fn pure_power_sum_reaches_n() {
        for n in [2usize, 5, 8] {
            let p = HomogeneousPolynomial::pure_powers(3, &vec![c(1.0, 0.0); n]).unwrap();
            let est = sup_norm_lower(&p, &cfg()).unwrap();
            assert!((est.lower - n as f64).abs() <= 1e-12 * n as f64, "{}", est.lower);
            assert!(est.upper.is_infinite());
        }
    }

    #[test]
    fn rotated_pure_powers_are_aligned() {
        // |Σ c_j z_j^m| on the torus peaks at Σ |c_j| once the phases align.
        let coeffs = [c(0.3, -1.2), c(-0.7, 0.1), c(0.0, 2.0), c(1.0, 1.0)];
        let p = HomogeneousPolynomial::pure_powers(4, &coeffs).unwrap();
        let exact: f64 = coeffs.iter().map(|z| z.norm()).sum();
        let est = sup_norm_lower(&p, &cfg()).unwrap();
        assert!((est.lower - exact).abs() < 1e-9 * exact, "{} vs {exact}", est.lower);
        let z = super::super::torus_point(&est.witness);
        assert!((p.evaluate(&z).unwrap().norm() - est.lower).abs() < 1e-12);
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let p = HomogeneousPolynomial::new(
            3,
            3,
            [
                (MultiIndex::from_exponents(&[2, 1, 0]), c(1.0, 0.5)),
                (MultiIndex::from_exponents(&[0, 1, 2]), c(-0.5, 1.0)),
                (MultiIndex::from_exponents(&[1, 1, 1]), c(0.25, 0.0)),
            ],
        )
        .unwrap();
        let a = sup_norm_lower(&p, &cfg()).unwrap();
        let b = sup_norm_lower(&p, &cfg()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn trig_maximizer_finds_global_lobe() {
        // |1 + e^{3iθ}| = 2|cos(3θ/2)|
        let a = [c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)];
        let (_, v, _) = maximize_trig(&a, 0.9);
        assert!((v - 2.0).abs() < 1e-12);
    }

    #[test]
    fn multilinear_examples() {
        let z0z1 = HomogeneousPolynomial::monomial(2, 2, MultiIndex::from_exponents(&[1, 1]), c(1.0, 0.0)).unwrap();
        let est = multilinear_sup_norm_lower(&z0z1, &cfg()).unwrap();
        assert!(est.lower >= 0.5 - 1e-15);
        assert_eq!(est.witness.len(), 4);

        let pure = HomogeneousPolynomial::pure_powers(4, &[c(1.0, 0.0)]).unwrap();
        let est = multilinear_sup_norm_lower(&pure, &cfg()).unwrap();
        assert!((est.lower - 1.0).abs() < 1e-12);

        let z0sq_z1 = HomogeneousPolynomial::monomial(3, 2, MultiIndex::from_exponents(&[2, 1]), c(1.0, 0.0)).unwrap();
        let est = multilinear_sup_norm_lower(&z0sq_z1, &cfg()).unwrap();
        assert!(est.lower >= 1.0 / 3.0 - 1e-15);
    }

    #[test]
    fn multilinear_rejects_large_degree() {
        let p = HomogeneousPolynomial::pure_powers(9, &[c(1.0, 0.0)]).unwrap();
        assert!(matches!(
            multilinear_sup_norm_lower(&p, &cfg()),
            Err(Error::OracleScale { degree: 9, .. })
        ));
    }

    #[test]
    fn zero_polynomial_norms_vanish() {
        let p = HomogeneousPolynomial::zero(3, 2).unwrap();
        let est = sup_norm_lower(&p, &cfg()).unwrap();
        assert_eq!((est.lower, est.upper, est.converged), (0.0, 0.0, true));
        let est = multilinear_sup_norm_lower(&p, &cfg()).unwrap();
        assert_eq!((est.lower, est.upper), (0.0, 0.0));
    }

    #[test]
    fn generalized_golden_roots() {
        let phi = generalized_golden(1);
        assert!((phi - (1.0 + 5f64.sqrt()) / 2.0).abs() < 1e-12);
        let x = generalized_golden(3);
        assert!((x.powi(4) - x - 1.0).abs() < 1e-12);
    }
}

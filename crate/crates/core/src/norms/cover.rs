//! Certified upper bound for `‖P‖` from a phase grid.
//!
//! One active variable's phase is pinned to zero: `P(e^{iφ} z) = e^{imφ} P(z)`
//! so `|P|` is invariant under a common rotation. The remaining phases live on
//! a grid of `R = grid_resolution` points per axis, spacing `h = 2π/R`. A cell
//! is a box of grid points; its center `c` and half-widths `r_j` bound every
//! phase vector it covers. Two bounds hold on a cell:
//!
//! * first order: `|P(θ)| ≤ |P(c)| + Σ_j L_j r_j` with `L_j = Σ_α α_j |c_α|`,
//!   which bounds `|∂P/∂θ_j|`;
//! * second order on `f = |P|²`:
//!   `f(θ) ≤ f(c) + Σ_j |∂_j f(c)| r_j + ½ rᵀ S r`, where
//!   `S_jk = Σ_{α,β} |c_α||c_β| |α_j − β_j| |α_k − β_k|` bounds the Hessian of
//!   the trigonometric polynomial `f`;
//! * second order on `P`: with `g_j = Σ_α α_j c_α e^{iα·c}`,
//!   `|P(c + δ)| ≤ max_{δ ∈ vertices} |P(c) + i Σ_j g_j δ_j| + ½ Σ_α |c_α| (α·r)²`.
//!   The linear part is the modulus of an affine map, so its maximum over the
//!   box sits at a vertex. Near a maximizer that linear part is nearly
//!   orthogonal to `P(c)`, which keeps this bound tight on small cells.
//!
//! Cells are refined best-first (largest bound first) by bisecting the widest
//! axis. Refinement stops when the worst cell is a single grid point, when its
//! bound no longer exceeds the best value seen, or when the cell budget runs
//! out. The largest open bound is an upper bound for `sup f` in every case; at
//! full resolution the first-order bound is the classic grid cover
//! `max_grid |P| + Σ_j L_j π / R` restricted to the surviving cells.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::error::Result;
use crate::poly::HomogeneousPolynomial;

use super::{trivial_upper, NormEstimate, NormMethod, SearchConfig};

/// Relative inflation absorbing floating-point error in the cell bounds.
const ROUNDING_MARGIN: f64 = 1e-12;
/// Above this many free phases the vertex maximum is replaced by
/// `|P(c)| + Σ_j |g_j| r_j`.
const VERTEX_MAX_DIMS: usize = 6;

/// Certified upper bound on `‖P‖`; `lower` is the best grid value seen.
///
/// Never exceeds the triangle bound `Σ|c_α|`. Zero and single-term
/// polynomials are handled in closed form.
pub fn sup_norm_upper(p: &HomogeneousPolynomial, cfg: &SearchConfig) -> Result<NormEstimate> {
    sup_norm_upper_from(p, cfg, 0.0)
}

/// As [`sup_norm_upper`], given a value `attained ≤ ‖P‖` that some point of
/// the torus is known to reach. Cells whose bound falls below it are dropped.
pub(crate) fn sup_norm_upper_from(p: &HomogeneousPolynomial, cfg: &SearchConfig, attained: f64) -> Result<NormEstimate> {
    cfg.validate()?;
    let n = p.num_vars();
    if p.len() <= 1 {
        let value = p.terms().next().map_or(0.0, |(_, c)| c.norm());
        return Ok(NormEstimate::exact(value, vec![0.0; n]));
    }
    let triangle = trivial_upper(p);
    if attained >= triangle * (1.0 - ROUNDING_MARGIN) {
        return Ok(NormEstimate {
            lower: 0.0,
            upper: triangle,
            method: NormMethod::Triangle,
            evaluations: 0,
            converged: true,
            witness: vec![0.0; n],
        });
    }
    let cover = Cover::new(p, cfg.grid_resolution);
    let outcome = cover.run(cfg.max_cells, attained);

    let grid_upper = outcome.bound_sq.max(0.0).sqrt() * (1.0 + ROUNDING_MARGIN);
    let (upper, method) = if grid_upper < triangle {
        (grid_upper, NormMethod::LipschitzGrid)
    } else {
        (triangle, NormMethod::Triangle)
    };
    let mut witness = vec![0.0; n];
    for (k, &v) in cover.free.iter().enumerate() {
        witness[v] = outcome.best_phases[k];
    }
    Ok(NormEstimate {
        lower: outcome.best_value.min(upper),
        upper,
        method,
        evaluations: outcome.evaluations,
        converged: outcome.converged,
        witness,
    })
}

struct Cover {
    /// Free (non-pinned) active variables, in ascending order.
    free: Vec<usize>,
    /// Per term: `(free index, exponent)` for the nonzero exponents.
    sparse: Vec<Vec<(usize, u32)>>,
    max_exp: u32,
    coeffs: Vec<Complex64>,
    lipschitz: Vec<f64>,
    hessian: Vec<f64>,
    magnitudes: Vec<f64>,
    resolution: u32,
}

struct Cell {
    lo: Vec<u32>,
    hi: Vec<u32>,
    bound_sq: f64,
    seq: u64,
}

impl PartialEq for Cell {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Cell {}

impl PartialOrd for Cell {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Cell {
    // max-heap on the bound; among equal bounds the older cell first
    fn cmp(&self, other: &Self) -> Ordering {
        self.bound_sq
            .total_cmp(&other.bound_sq)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

struct Scratch {
    center: Vec<f64>,
    radius: Vec<f64>,
    grad: Vec<Complex64>,
    /// Row-major `d × (m + 1)` table of center powers.
    powers: Vec<Complex64>,
}

impl Scratch {
    fn new(d: usize, m: u32) -> Self {
        Self {
            center: vec![0.0; d],
            radius: vec![0.0; d],
            grad: vec![Complex64::new(0.0, 0.0); d],
            powers: vec![Complex64::new(0.0, 0.0); d * (m as usize + 1)],
        }
    }
}

struct Outcome {
    bound_sq: f64,
    best_value: f64,
    best_phases: Vec<f64>,
    evaluations: u64,
    converged: bool,
}

impl Cover {
    fn new(p: &HomogeneousPolynomial, resolution: usize) -> Self {
        let active = p.active_vars();
        let free: Vec<usize> = active.iter().skip(1).copied().collect();
        let d = free.len();
        let mut exps = Vec::with_capacity(p.len());
        let mut coeffs = Vec::with_capacity(p.len());
        for (alpha, c) in p.terms() {
            exps.push(free.iter().map(|&v| alpha.exponent(v) as f64).collect::<Vec<_>>());
            coeffs.push(*c);
        }
        let mut lipschitz = vec![0.0; d];
        for (e, c) in exps.iter().zip(&coeffs) {
            for j in 0..d {
                lipschitz[j] += e[j] * c.norm();
            }
        }
        let mut hessian = vec![0.0; d * d];
        for (ea, ca) in exps.iter().zip(&coeffs) {
            for (eb, cb) in exps.iter().zip(&coeffs) {
                let w = ca.norm() * cb.norm();
                for j in 0..d {
                    let dj = (ea[j] - eb[j]).abs();
                    if dj == 0.0 {
                        continue;
                    }
                    for k in 0..d {
                        hessian[j * d + k] += w * dj * (ea[k] - eb[k]).abs();
                    }
                }
            }
        }
        let sparse: Vec<Vec<(usize, u32)>> = exps
            .iter()
            .map(|e| {
                e.iter()
                    .enumerate()
                    .filter(|(_, &x)| x > 0.0)
                    .map(|(j, &x)| (j, x as u32))
                    .collect()
            })
            .collect();
        Self {
            free,
            sparse,
            max_exp: p.degree(),
            magnitudes: coeffs.iter().map(|c| c.norm()).collect(),
            coeffs,
            lipschitz,
            hessian,
            resolution: resolution as u32,
        }
    }

    fn dims(&self) -> usize {
        self.free.len()
    }

    fn step(&self) -> f64 {
        TAU / self.resolution as f64
    }

    /// Returns `(|P(center)|, bound on f over the cell)`. Cell centers and
    /// radii are written to `scratch`.
    fn evaluate(&self, lo: &[u32], hi: &[u32], scratch: &mut Scratch) -> (f64, f64) {
        let d = self.dims();
        let h = self.step();
        let stride = self.max_exp as usize + 1;
        for j in 0..d {
            scratch.center[j] = (lo[j] + hi[j] - 1) as f64 * 0.5 * h;
            scratch.radius[j] = (hi[j] - lo[j]) as f64 * 0.5 * h;
            // powers z_j^e of the center point, e = 0..=m
            let z = Complex64::cis(scratch.center[j]);
            let row = &mut scratch.powers[j * stride..(j + 1) * stride];
            row[0] = Complex64::new(1.0, 0.0);
            for e in 1..stride {
                row[e] = row[e - 1] * z;
            }
        }

        let mut value = Complex64::new(0.0, 0.0);
        scratch.grad.iter_mut().for_each(|g| *g = Complex64::new(0.0, 0.0));
        for (vars, c) in self.sparse.iter().zip(&self.coeffs) {
            let mut term = *c;
            for &(j, e) in vars {
                term *= scratch.powers[j * stride + e as usize];
            }
            value += term;
            for &(j, e) in vars {
                scratch.grad[j] += term * f64::from(e);
            }
        }
        let modulus = value.norm();
        let radius = &scratch.radius;

        let first = modulus
            + self
                .lipschitz
                .iter()
                .zip(radius)
                .map(|(l, r)| l * r)
                .sum::<f64>();
        // ∂_j P = i Σ α_j c_α z^α, so ∂_j |P|² = 2 Re(conj(P) · i g_j) = -2 Im(conj(P) g_j)
        let linear: f64 = scratch
            .grad
            .iter()
            .zip(radius)
            .map(|(g, r)| (2.0 * (value.conj() * g).im).abs() * r)
            .sum();
        let mut quadratic = 0.0;
        for j in 0..d {
            for k in 0..d {
                quadratic += radius[j] * self.hessian[j * d + k] * radius[k];
            }
        }
        let second = modulus * modulus + linear + 0.5 * quadratic;

        let remainder: f64 = self
            .sparse
            .iter()
            .zip(&self.magnitudes)
            .map(|(vars, a)| {
                let reach: f64 = vars.iter().map(|&(j, e)| f64::from(e) * radius[j]).sum();
                a * reach * reach
            })
            .sum::<f64>()
            * 0.5;
        let affine = if d <= VERTEX_MAX_DIMS {
            // Gray-code walk over the vertices, one sign flip per step
            let i = Complex64::new(0.0, 1.0);
            let mut shift: Complex64 = scratch.grad.iter().zip(radius).map(|(g, r)| -g * r).sum();
            let mut signs = 0usize;
            let mut best = (value + i * shift).norm();
            for k in 1..1usize << d {
                let j = k.trailing_zeros() as usize;
                signs ^= 1 << j;
                let flip = scratch.grad[j] * (2.0 * radius[j]);
                if signs >> j & 1 == 1 {
                    shift += flip;
                } else {
                    shift -= flip;
                }
                best = best.max((value + i * shift).norm());
            }
            best
        } else {
            modulus + scratch.grad.iter().zip(radius).map(|(g, r)| g.norm() * r).sum::<f64>()
        };
        let third = affine + remainder;
        (modulus, (first * first).min(second).min(third * third))
    }

    fn run(&self, max_cells: usize, attained: f64) -> Outcome {
        let d = self.dims();
        let lo = vec![0u32; d];
        let hi = vec![self.resolution; d];
        let mut scratch = Scratch::new(d, self.max_exp);
        let (value, bound) = self.evaluate(&lo, &hi, &mut scratch);
        let mut best_value = value;
        let mut best_phases = scratch.center.clone();
        let mut evaluations = 1u64;
        let mut seq = 0u64;
        let mut heap = BinaryHeap::new();
        heap.push(Cell {
            lo,
            hi,
            bound_sq: bound,
            seq,
        });

        loop {
            let top = heap.peek().expect("cover never empties");
            let finest = top.lo.iter().zip(&top.hi).all(|(l, h)| h - l == 1);
            let floor = best_value.max(attained);
            let dominated = top.bound_sq <= floor * floor;
            if finest || dominated {
                return Outcome {
                    bound_sq: top.bound_sq.max(floor * floor),
                    best_value,
                    best_phases,
                    evaluations,
                    converged: true,
                };
            }
            if evaluations as usize >= max_cells {
                return Outcome {
                    bound_sq: top.bound_sq,
                    best_value,
                    best_phases,
                    evaluations,
                    converged: false,
                };
            }
            let cell = heap.pop().expect("peeked");
            let axis = (0..d)
                .max_by(|&a, &b| {
                    (cell.hi[a] - cell.lo[a])
                        .cmp(&(cell.hi[b] - cell.lo[b]))
                        .then_with(|| b.cmp(&a))
                })
                .expect("at least one axis");
            let mid = cell.lo[axis] + (cell.hi[axis] - cell.lo[axis]) / 2;
            for (clo, chi) in [(cell.lo[axis], mid), (mid, cell.hi[axis])] {
                let mut lo = cell.lo.clone();
                let mut hi = cell.hi.clone();
                lo[axis] = clo;
                hi[axis] = chi;
                let (value, bound) = self.evaluate(&lo, &hi, &mut scratch);
                evaluations += 1;
                if value > best_value {
                    best_value = value;
                    best_phases.copy_from_slice(&scratch.center);
                }
                seq += 1;
                heap.push(Cell {
                    lo,
                    hi,
                    // a child is covered by its parent's bound as well
                    bound_sq: bound.min(cell.bound_sq),
                    seq,
                });
            }
        }
    }
}

/// The plain grid cover at full resolution, `max_grid |P| + Σ_j L_j π/R`.
/// Exponential in the number of variables; kept for cross-checking the
/// adaptive cover on small instances.
#[cfg(test)]
fn uniform_grid_cover(p: &HomogeneousPolynomial, resolution: usize) -> f64 {
    let cover = Cover::new(p, resolution);
    let d = cover.dims();
    let mut scratch = Scratch::new(d, p.degree());
    let r = resolution as u32;
    let mut idx = vec![0u32; d];
    let mut best = 0.0_f64;
    loop {
        let hi: Vec<u32> = idx.iter().map(|i| i + 1).collect();
        let (value, _) = cover.evaluate(&idx, &hi, &mut scratch);
        best = best.max(value);
        let mut k = 0;
        loop {
            if k == d {
                let slack: f64 = cover.lipschitz.iter().map(|l| l * std::f64::consts::PI / resolution as f64).sum();
                return best + slack;
            }
            idx[k] += 1;
            if idx[k] < r {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

use crate::error::{Error, Result};

use super::{Composition, MultiIndex};

/// All multi-indices on variables `0..n` of degree `m` with at most
/// `max_vars` nonzero exponents, sorted and free of duplicates.
pub fn enumerate_lambda(m: u32, max_vars: u32, n: usize) -> Result<Vec<MultiIndex>> {
    if m == 0 {
        return Err(Error::InvalidParameter("degree m must be positive".into()));
    }
    if max_vars == 0 || max_vars > m {
        return Err(Error::InvalidParameter(format!(
            "need 1 <= M <= m, got M = {max_vars}, m = {m}"
        )));
    }
    if n == 0 {
        return Err(Error::InvalidParameter("need at least one variable".into()));
    }
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(max_vars as usize);
    lambda_rec(0, n, m, max_vars as usize, &mut current, &mut out);
    out.sort();
    Ok(out)
}

fn lambda_rec(
    var: usize,
    n: usize,
    remaining: u32,
    max_vars: usize,
    current: &mut Vec<(usize, u32)>,
    out: &mut Vec<MultiIndex>,
) {
    if remaining == 0 {
        out.push(MultiIndex::from_pairs(current.iter().copied()));
        return;
    }
    if var == n || current.len() == max_vars {
        return;
    }
    for e in (1..=remaining).rev() {
        current.push((var, e));
        lambda_rec(var + 1, n, remaining - e, max_vars, current, out);
        current.pop();
    }
    lambda_rec(var + 1, n, remaining, max_vars, current, out);
}

/// Ordered `parts`-tuples of nonnegative integers summing to `m`, in
/// lexicographic order. There are `binom(m + parts - 1, m)` of them.
pub fn enumerate_compositions(m: u32, parts: u32) -> Vec<Composition> {
    let mut out = Vec::new();
    if parts == 0 {
        if m == 0 {
            out.push(Composition::new(Vec::new()));
        }
        return out;
    }
    let mut current = Vec::with_capacity(parts as usize);
    compositions_rec(m, parts as usize, &mut current, &mut out);
    out
}

fn compositions_rec(remaining: u32, parts: usize, current: &mut Vec<u32>, out: &mut Vec<Composition>) {
    if current.len() + 1 == parts {
        current.push(remaining);
        out.push(Composition::new(current.clone()));
        current.pop();
        return;
    }
    for first in 0..=remaining {
        current.push(first);
        compositions_rec(remaining - first, parts, current, out);
        current.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn idx(pairs: &[(usize, u32)]) -> MultiIndex {
        MultiIndex::from_pairs(pairs.iter().copied())
    }

    #[test]
    fn pure_powers_only_for_single_variable() {
        let got = enumerate_lambda(3, 1, 2).unwrap();
        let mut want = vec![idx(&[(0, 3)]), idx(&[(1, 3)])];
        want.sort();
        assert_eq!(got, want);
    }

    #[test]
    fn small_lambda_sets() {
        let got = enumerate_lambda(2, 2, 2).unwrap();
        assert_eq!(got.len(), 3);
        assert!(got.contains(&idx(&[(0, 1), (1, 1)])));
        assert!(got.contains(&idx(&[(0, 2)])));
        assert!(got.contains(&idx(&[(1, 2)])));

        // 10 cubic monomials on 3 variables minus z0 z1 z2
        assert_eq!(enumerate_lambda(3, 2, 3).unwrap().len(), 9);
    }

    #[test]
    fn lambda_rejects_bad_parameters() {
        assert!(enumerate_lambda(2, 3, 2).is_err());
        assert!(enumerate_lambda(2, 0, 2).is_err());
        assert!(enumerate_lambda(0, 0, 2).is_err());
        assert!(enumerate_lambda(2, 1, 0).is_err());
    }

    #[test]
    fn compositions_in_lexicographic_order() {
        let got: Vec<Vec<u32>> = enumerate_compositions(3, 2)
            .iter()
            .map(|c| c.parts().to_vec())
            .collect();
        assert_eq!(got, vec![vec![0, 3], vec![1, 2], vec![2, 1], vec![3, 0]]);
        assert_eq!(enumerate_compositions(1, 1)[0].parts(), &[1]);
        assert_eq!(enumerate_compositions(2, 3).len(), 6);
    }

    #[test]
    fn degenerate_compositions() {
        assert!(enumerate_compositions(3, 0).is_empty());
        assert_eq!(enumerate_compositions(0, 0).len(), 1);
        assert_eq!(enumerate_compositions(0, 3).len(), 1);
    }
}

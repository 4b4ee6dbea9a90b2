use num_bigint::BigUint;
use num_traits::One;

/// Arbitrary-precision natural number used for factorials and multinomials.
pub type BigNat = BigUint;

pub fn factorial(n: u32) -> BigNat {
    (2..=n).fold(BigNat::one(), |acc, k| acc * k)
}

/// `n choose k`, zero when `k > n`.
pub fn binomial(n: u32, k: u32) -> BigNat {
    if k > n {
        return BigNat::default();
    }
    let k = k.min(n - k);
    // Each prefix product is itself a binomial, so every division is exact.
    (0..k).fold(BigNat::one(), |acc, i| acc * (n - i) / (i + 1))
}

/// `(Σ parts)! / Π parts_i!`, exact. Zero parts contribute `0! = 1`.
pub fn multinomial(parts: &[u32]) -> BigNat {
    let mut running = 0u32;
    let mut acc = BigNat::one();
    for &p in parts {
        running += p;
        acc *= binomial(running, p);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_factorials() {
        assert_eq!(factorial(0), BigNat::from(1u32));
        assert_eq!(factorial(1), BigNat::from(1u32));
        assert_eq!(factorial(6), BigNat::from(720u32));
        assert_eq!(factorial(20), BigNat::from(2_432_902_008_176_640_000u64));
    }

    #[test]
    fn binomials_against_factorials() {
        for n in 0..30u32 {
            for k in 0..=n {
                assert_eq!(
                    binomial(n, k),
                    factorial(n) / (factorial(k) * factorial(n - k)),
                    "n={n} k={k}"
                );
            }
        }
        assert_eq!(binomial(3, 5), BigNat::default());
    }

    #[test]
    fn big_binomial_does_not_overflow() {
        let b = binomial(100, 49);
        assert_eq!(b.to_string(), "98913082887808032681188722800");
    }

    #[test]
    fn multinomial_handles_zero_parts() {
        assert_eq!(multinomial(&[]), BigNat::from(1u32));
        assert_eq!(multinomial(&[0, 3, 0]), BigNat::from(1u32));
        assert_eq!(multinomial(&[2, 2, 2]), BigNat::from(90u32));
        assert_eq!(multinomial(&[1, 1]), BigNat::from(2u32));
    }
}

//! Seeded random matrices in `Γ0(N)` and `Γ1(N)`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use rand::Rng;

use crate::modgroup::{ts_decompose, Mat2, Quotient};

/// `(a, b; c, d)` with `0 < a < c`, `d` the least positive inverse of `a`
/// mod `c`, and `b` completing the determinant.
fn complete(a: u64, c: u64) -> Mat2 {
    let (a, c) = (BigInt::from(a), BigInt::from(c));
    let d = a.extended_gcd(&c).x.mod_floor(&c);
    let b = (&a * &d - 1u32) / &c;
    Mat2::new(a, b, c, d).expect("completion has determinant 1")
}

fn coprime_below<R: Rng + ?Sized>(rng: &mut R, c: u64, pick: impl Fn(&mut R) -> u64) -> u64 {
    loop {
        let a = pick(rng);
        if a > 0 && a < c.max(2) && a.gcd(&c) == 1 {
            return a;
        }
    }
}

/// Random `γ ∈ Γ0(N)` with `N ≤ c ≤ cmax`, `c ≡ 0 mod N`, followed by a
/// small random translation `T^t`, `|t| ≤ 3`.
pub fn random_gamma0<R: Rng + ?Sized>(rng: &mut R, n: u32, cmax: u64) -> Mat2 {
    let n = n as u64;
    let k = rng.gen_range(1..=(cmax / n).max(1));
    let c = n * k;
    let a = if c == 1 {
        1
    } else {
        coprime_below(rng, c, |r| r.gen_range(1..c))
    };
    let m = if c == 1 {
        Mat2::from_i64(1, 0, 1, 1).unwrap()
    } else {
        complete(a, c)
    };
    let t = rng.gen_range(-3i64..=3);
    &m * &Mat2::t_pow(&t.into())
}

/// Random `γ ∈ Γ1(N)` with `N ≤ c ≤ cmax`.
pub fn random_gamma1<R: Rng + ?Sized>(rng: &mut R, n: u32, cmax: u64) -> Mat2 {
    let n = n as u64;
    let k = rng.gen_range(1..=(cmax / n).max(1));
    let c = n * k;
    let a = coprime_below(rng, c, |r| 1 + n * r.gen_range(0..k));
    let m = complete(a, c);
    let t = n as i64 * rng.gen_range(-2i64..=2);
    &m * &Mat2::t_pow(&t.into())
}

/// Benchmark input with lower-left entry exactly `c`: `0 < a < c` coprime to
/// `c`, completed so that the last exponent of its `quotient` word is zero.
pub fn bench_matrix<R: Rng + ?Sized>(rng: &mut R, c: u64, quotient: Quotient) -> Mat2 {
    assert!(c >= 2, "bench matrices need c ≥ 2");
    let a = coprime_below(rng, c, |r| r.gen_range(1..c));
    let m = complete(a, c);
    let last = ts_decompose(&m, quotient)
        .exponents
        .pop()
        .unwrap_or_else(BigInt::zero);
    &m * &Mat2::t_pow(&-last)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn samples_land_in_their_groups() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in [6u32, 9, 28] {
            for _ in 0..200 {
                let g = random_gamma0(&mut rng, n, 10_000);
                assert!(g.in_gamma0(n));
                assert!(g.c() >= &BigInt::from(n) && g.c() <= &BigInt::from(10_000));
                let h = random_gamma1(&mut rng, n, 10_000);
                assert!(h.in_gamma1(n), "{h}");
            }
        }
    }

    #[test]
    fn samples_are_reproducible() {
        let draw = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..10)
                .map(|_| random_gamma0(&mut rng, 9, 1000))
                .collect::<Vec<_>>()
        };
        assert_eq!(draw(3), draw(3));
        assert_ne!(draw(3), draw(4));
    }

    #[test]
    fn bench_matrices_end_in_zero_exponent() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for q in [Quotient::Floor, Quotient::Nearest] {
            for k in 1..40u64 {
                let c = 28 * k;
                let m = bench_matrix(&mut rng, c, q);
                assert_eq!(m.c(), &BigInt::from(c));
                assert!(m.in_gamma0(28));
                assert!(ts_decompose(&m, q).exponents.last().unwrap().is_zero());
            }
        }
    }
}

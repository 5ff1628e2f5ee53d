//! Reidemeister rewriting of `Γ1(N)` elements over the alphabet 𝒰.
//!
//! [`classic_rewrite`] handles words of single letters `g^{±1}` and only
//! exists as a reference. [`modified_rewrite`] consumes a [`TSWord`] with
//! collected exponents and emits one factor per letter, and [`reduce_word`]
//! folds each `T` exponent into `U(t, T^N)^q · U(t, T^r)`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::cosets::{u_func, Alphabet, CosetKey, Generator, RightTransversal, Sl2Transversal};
use crate::error::{Error, Result};
use crate::modgroup::{residue, Mat2, TSWord};

/// Longest word [`classic_rewrite`] accepts.
pub const CLASSIC_MAX_LETTERS: usize = 32;

/// Single-letter Reidemeister rewriting.
///
/// `word` is a sequence of `(generator, ε)` with `ε = ±1`. Returns
/// `(U(p_k, g_k), ε_k)` whose signed product equals the word's product,
/// with `p_k` the representative of the prefix before letter `k` when
/// `ε_k = 1` and of the prefix through letter `k` when `ε_k = -1`.
pub fn classic_rewrite<R: RightTransversal + ?Sized>(
    word: &[(Mat2, i32)],
    t: &R,
) -> Result<Vec<(Mat2, i32)>> {
    if word.len() > CLASSIC_MAX_LETTERS {
        return Err(Error::InvalidInput(format!(
            "classic rewriting is limited to {CLASSIC_MAX_LETTERS} letters"
        )));
    }
    let product = word.iter().fold(Mat2::identity(), |acc, (g, e)| match e {
        1 => &acc * g,
        -1 => &acc * &g.inv(),
        _ => acc,
    });
    if word.iter().any(|(_, e)| e.abs() != 1) {
        return Err(Error::InvalidInput("letter exponents must be ±1".into()));
    }
    if !t.bar(&product)?.is_identity() {
        return Err(Error::InvalidInput(format!(
            "{product} is not in Γ1({})",
            t.modulus()
        )));
    }
    let mut prefix = Mat2::identity();
    let mut out = Vec::with_capacity(word.len());
    for (g, e) in word {
        if *e == 1 {
            let p = t.bar(&prefix)?.clone();
            out.push((u_func(&p, g, t)?, 1));
            prefix = &prefix * g;
        } else {
            prefix = &prefix * &g.inv();
            let p = t.bar(&prefix)?.clone();
            out.push((u_func(&p, g, t)?, -1));
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RewriteGenerator {
    T,
    S,
    NegIdentity,
}

/// One factor `U(p̄, g^e)` of the modified rewriting.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RewriteFactor {
    pub base_key: CosetKey,
    pub generator: RewriteGenerator,
    pub exponent: BigInt,
}

impl RewriteFactor {
    /// The exact matrix `U(member, g^e)`.
    pub fn value(&self, t: &Sl2Transversal) -> Result<Mat2> {
        let member = t
            .get(self.base_key)
            .ok_or_else(|| Error::MissingCoset(self.base_key.to_string()))?;
        let g = match self.generator {
            RewriteGenerator::T => Mat2::t_pow(&self.exponent),
            RewriteGenerator::S => Mat2::s().pow(&self.exponent),
            RewriteGenerator::NegIdentity => Mat2::neg_identity().pow(&self.exponent),
        };
        u_func(member, &g, t)
    }
}

/// Bottom row of the running prefix, tracked mod `N`.
#[derive(Clone, Copy)]
struct Row {
    c: u32,
    d: u32,
    n: u32,
}

impl Row {
    fn key(&self) -> CosetKey {
        CosetKey {
            c: self.c,
            d: self.d,
        }
    }

    fn times_s(self) -> Self {
        Row {
            c: self.d,
            d: (self.n - self.c) % self.n,
            ..self
        }
    }

    fn times_t(self, e: &BigInt) -> Self {
        let e = residue(e, self.n) as u64;
        Row {
            d: ((self.d as u64 + self.c as u64 * e) % self.n as u64) as u32,
            ..self
        }
    }

    fn negated(self) -> Self {
        Row {
            c: (self.n - self.c) % self.n,
            d: (self.n - self.d) % self.n,
            ..self
        }
    }
}

/// Modified rewriting of `±T^{a1} S … S T^{ar}`.
///
/// Emits `U(p̄, T^{a})` for each nonzero exponent, `U(p̄, S)` for each `S` and
/// a closing `U(p̄, -I)` when the word is negated, where `p̄` is the coset of
/// the prefix so far. Only the prefix's bottom row mod `N` is needed to find
/// `p̄`, so each step is O(1).
pub fn modified_rewrite(w: &TSWord, t: &Sl2Transversal) -> Result<Vec<RewriteFactor>> {
    let n = t.modulus();
    let mut row = Row { c: 0, d: 1 % n, n };
    let mut out = Vec::with_capacity(2 * w.exponents.len() + 1);
    for (i, e) in w.exponents.iter().enumerate() {
        if i > 0 {
            out.push(RewriteFactor {
                base_key: row.key(),
                generator: RewriteGenerator::S,
                exponent: BigInt::one(),
            });
            row = row.times_s();
        }
        if !e.is_zero() {
            out.push(RewriteFactor {
                base_key: row.key(),
                generator: RewriteGenerator::T,
                exponent: e.clone(),
            });
            row = row.times_t(e);
        }
    }
    if w.negate {
        out.push(RewriteFactor {
            base_key: row.key(),
            generator: RewriteGenerator::NegIdentity,
            exponent: BigInt::one(),
        });
        row = row.negated();
    }
    if row.key() != CosetKey::identity(n) {
        return Err(Error::InvalidInput(format!("word {w} is not in Γ1({n})")));
    }
    Ok(out)
}

/// `a = qN + r` with `0 ≤ r < N`.
pub fn reduce_t_power(a: &BigInt, n: u32) -> (BigInt, u32) {
    let (q, r) = a.div_mod_floor(&BigInt::from(n));
    (q, r.to_u32().unwrap())
}

/// A power of one alphabet entry.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReducedFactor {
    pub base_key: CosetKey,
    pub generator: Generator,
    pub multiplicity: BigInt,
}

/// Maps every factor onto alphabet entries, dropping identity contributions.
pub fn reduce_word(factors: &[RewriteFactor], n: u32) -> Vec<ReducedFactor> {
    let mut out = Vec::with_capacity(factors.len() + factors.len() / 2);
    for f in factors {
        let mut push = |generator, multiplicity| {
            out.push(ReducedFactor {
                base_key: f.base_key,
                generator,
                multiplicity,
            })
        };
        match f.generator {
            RewriteGenerator::T => {
                let (q, r) = reduce_t_power(&f.exponent, n);
                if !q.is_zero() {
                    push(Generator::T(n), q);
                }
                if r != 0 {
                    push(Generator::T(r), BigInt::one());
                }
            }
            // only S^1 and (-I)^1 are ever emitted
            RewriteGenerator::S => push(Generator::S(1), f.exponent.clone()),
            RewriteGenerator::NegIdentity => push(Generator::S(2), f.exponent.clone()),
        }
    }
    out
}

/// Exact product of reduced factors through the alphabet.
pub fn reduced_product(
    reduced: &[ReducedFactor],
    t: &Sl2Transversal,
    alphabet: &Alphabet,
) -> Result<Mat2> {
    reduced.iter().try_fold(Mat2::identity(), |acc, f| {
        let e = alphabet
            .entry(t, f.base_key, f.generator)
            .ok_or_else(|| Error::MissingCoset(f.base_key.to_string()))?;
        Ok(&acc * &e.value.pow(&f.multiplicity))
    })
}

/// Human-readable expansion of the rewriting with exact prefixes, one line
/// per factor.
pub fn trace(w: &TSWord, t: &Sl2Transversal) -> Result<Vec<String>> {
    let n = t.modulus();
    let factors = modified_rewrite(w, t)?;
    let mut prefix = Mat2::identity();
    let mut lines = Vec::with_capacity(factors.len());
    let s = Mat2::s();
    let mut letters = Vec::new();
    for (i, e) in w.exponents.iter().enumerate() {
        if i > 0 {
            letters.push(s.clone());
        }
        if !e.is_zero() {
            letters.push(Mat2::t_pow(e));
        }
    }
    if w.negate {
        letters.push(Mat2::neg_identity());
    }
    for (f, letter) in factors.iter().zip(&letters) {
        let rep = t.get(f.base_key).unwrap();
        let line = match f.generator {
            RewriteGenerator::T => {
                let (q, r) = reduce_t_power(&f.exponent, n);
                format!(
                    "U(bar{prefix}, T^{}) = U^{q}({rep}, T^{n}) U({rep}, T^{r})",
                    f.exponent
                )
            }
            RewriteGenerator::S => format!("U(bar{prefix}, S) = U({rep}, S)"),
            RewriteGenerator::NegIdentity => format!("U(bar{prefix}, -I) = U({rep}, S^2)"),
        };
        lines.push(line);
        prefix = &prefix * letter;
    }
    Ok(lines)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cosets::schreier_alphabet;
    use crate::modgroup::{ts_decompose, ts_reconstruct, Quotient};
    use proptest::prelude::*;

    fn m(a: i64, b: i64, c: i64, d: i64) -> Mat2 {
        Mat2::from_i64(a, b, c, d).unwrap()
    }

    fn product(factors: &[RewriteFactor], t: &Sl2Transversal) -> Mat2 {
        factors
            .iter()
            .fold(Mat2::identity(), |acc, f| &acc * &f.value(t).unwrap())
    }

    fn signed_product(seq: &[(Mat2, i32)]) -> Mat2 {
        seq.iter().fold(Mat2::identity(), |acc, (u, e)| {
            if *e == 1 {
                &acc * u
            } else {
                &acc * &u.inv()
            }
        })
    }

    #[test]
    fn classic_examples() {
        let t = Sl2Transversal::new(3);
        let tt = Mat2::t();
        let out =
            classic_rewrite(&[(tt.clone(), 1), (tt.clone(), 1), (tt.clone(), 1)], &t).unwrap();
        assert_eq!(out.len(), 3);
        assert_eq!(signed_product(&out), Mat2::t_pow(&3.into()));

        assert!(classic_rewrite(&[], &t).unwrap().is_empty());
        assert!(classic_rewrite(&[(Mat2::s(), 1)], &t).is_err());
    }

    #[test]
    fn classic_five_letter_pattern() {
        // g1 g1 g1 g2^{-1} g2^{-1} with g1 = T, g2 = S lies in Γ1(N) only if
        // T^3 S^{-2} = -T^3 does, so use N = 2 where -I ≡ I.
        let t = Sl2Transversal::new(2);
        let (tt, s) = (Mat2::t(), Mat2::s());
        let word = [
            (tt.clone(), 1),
            (tt.clone(), 1),
            (tt.clone(), 1),
            (s.clone(), -1),
            (s.clone(), -1),
        ];
        let out = classic_rewrite(&word, &t).unwrap();
        assert_eq!(out.len(), 5);
        assert_eq!(
            out.iter().map(|x| x.1).collect::<Vec<_>>(),
            [1, 1, 1, -1, -1]
        );
        let h = signed_product(&word);
        assert_eq!(signed_product(&out), h);
        // U(bar(g1^3 g2^{-1}), g2)^{-1} is the fourth factor
        let p = &Mat2::t_pow(&3.into()) * &s.inv();
        let rep = t.bar(&p).unwrap();
        assert_eq!(out[3].0, u_func(rep, &s, &t).unwrap());
    }

    #[test]
    fn worked_example_factors() {
        let t = Sl2Transversal::new(9);
        let g1 = m(-152, 137, -81, 73);
        let w = ts_decompose(&g1, Quotient::Floor);
        let f = modified_rewrite(&w, &t).unwrap();
        assert_eq!(f.len(), 20);
        assert_eq!(f[0].base_key, CosetKey::identity(9));
        assert_eq!(
            (f[0].generator, f[0].exponent.clone()),
            (RewriteGenerator::T, 1.into())
        );
        assert_eq!(f[1].base_key, CosetKey::of(&m(1, 1, 0, 1), 9));
        assert_eq!(f[1].generator, RewriteGenerator::S);
        assert_eq!(f[2].base_key, CosetKey::of(&m(1, -1, 1, 0), 9));
        assert_eq!(f[2].exponent, BigInt::from(-2));
        assert_eq!(f[3].base_key, CosetKey::of(&m(1, -3, 1, -2), 9));
        let n = f.len();
        assert_eq!(f[n - 4].base_key, CosetKey::of(&m(-15, -13, -8, -7), 9));
        assert_eq!(f[n - 4].exponent, BigInt::from(-11));
        assert_eq!(f[n - 3].base_key, CosetKey::of(&m(-15, 152, -8, 81), 9));
        assert_eq!(f[n - 2].base_key, CosetKey::of(&m(152, 15, 81, 8), 9));
        assert_eq!(f[n - 1].base_key, CosetKey::of(&m(152, -137, 81, -73), 9));
        assert_eq!(f[n - 1].generator, RewriteGenerator::NegIdentity);
        assert_eq!(product(&f, &t), g1);

        let reduced = reduce_word(&f, 9);
        let alpha = schreier_alphabet(&t);
        assert_eq!(reduced_product(&reduced, &t, &alpha).unwrap(), g1);
        assert_eq!(reduced.last().unwrap().generator, Generator::S(2));
        assert_eq!(
            reduced.last().unwrap().base_key,
            CosetKey::of(&m(8, 7, 9, 8), 9)
        );
    }

    #[test]
    fn identity_and_non_members() {
        let t = Sl2Transversal::new(9);
        let w = ts_decompose(&Mat2::identity(), Quotient::Nearest);
        assert!(modified_rewrite(&w, &t).unwrap().is_empty());
        let w = ts_decompose(&m(17, 32, 9, 17), Quotient::Nearest);
        assert!(matches!(
            modified_rewrite(&w, &t),
            Err(Error::InvalidInput(_))
        ));
        // explicit zero exponent contributes nothing
        let w = TSWord {
            negate: false,
            exponents: vec![0.into()],
        };
        assert!(modified_rewrite(&w, &t).unwrap().is_empty());
    }

    #[test]
    fn t_power_reduction() {
        assert_eq!(reduce_t_power(&(-11).into(), 9), (BigInt::from(-2), 7));
        assert_eq!(reduce_t_power(&1.into(), 9), (BigInt::from(0), 1));
        assert_eq!(reduce_t_power(&9.into(), 9), (BigInt::from(1), 0));
        assert_eq!(reduce_t_power(&(-2).into(), 9), (BigInt::from(-1), 7));
    }

    #[test]
    fn reduce_word_examples() {
        let k = CosetKey::identity(9);
        let f = |generator, e: i64| RewriteFactor {
            base_key: k,
            generator,
            exponent: e.into(),
        };
        assert_eq!(
            reduce_word(&[f(RewriteGenerator::T, 1)], 9),
            [ReducedFactor {
                base_key: k,
                generator: Generator::T(1),
                multiplicity: 1.into()
            }]
        );
        assert_eq!(
            reduce_word(&[f(RewriteGenerator::NegIdentity, 1)], 9),
            [ReducedFactor {
                base_key: k,
                generator: Generator::S(2),
                multiplicity: 1.into()
            }]
        );
        assert_eq!(
            reduce_word(&[f(RewriteGenerator::T, -11)], 9),
            [
                ReducedFactor {
                    base_key: k,
                    generator: Generator::T(9),
                    multiplicity: (-2).into()
                },
                ReducedFactor {
                    base_key: k,
                    generator: Generator::T(7),
                    multiplicity: 1.into()
                },
            ]
        );
        assert_eq!(reduce_word(&[f(RewriteGenerator::T, 18)], 9).len(), 1);
    }

    #[test]
    fn trace_mentions_reductions() {
        let t = Sl2Transversal::new(9);
        let w = ts_decompose(&m(-152, 137, -81, 73), Quotient::Floor);
        let lines = trace(&w, &t).unwrap();
        assert_eq!(lines.len(), 20);
        assert!(lines[0].starts_with("U(bar(1, 0; 0, 1), T^1) = U^0((1, 0; 0, 1), T^9)"));
        assert!(lines[2].contains("T^-2) = U^-1("));
        assert!(
            lines[19].contains("-I) = U((-1, -1; 9, 8), S^2)"),
            "{}",
            lines[19]
        );
    }

    /// Random words in `T`, `T^{-1}`, `S` whose product lies in `Γ1(N)`,
    /// closed up by appending the inverse of a transversal member.
    fn gamma1_word(n: u32) -> impl Strategy<Value = Vec<(Mat2, i32)>> {
        proptest::collection::vec(0u8..3, 0..9).prop_map(move |letters| {
            let mut word: Vec<(Mat2, i32)> = letters
                .iter()
                .map(|l| match l {
                    0 => (Mat2::s(), 1),
                    1 => (Mat2::t(), 1),
                    _ => (Mat2::t(), -1),
                })
                .collect();
            let t = Sl2Transversal::new(n);
            let p = signed_product(&word);
            let rep = t.bar(&p).unwrap().clone();
            // bar(p)^{-1} written in single letters
            let inv = ts_decompose(&rep.inv(), Quotient::Nearest);
            let mut tail: Vec<(Mat2, i32)> = Vec::new();
            for (i, e) in inv.exponents.iter().enumerate() {
                if i > 0 {
                    tail.push((Mat2::s(), 1));
                }
                let k = e.to_i64().unwrap();
                for _ in 0..k.abs() {
                    tail.push((Mat2::t(), k.signum() as i32));
                }
            }
            if inv.negate {
                tail.push((Mat2::s(), 1));
                tail.push((Mat2::s(), 1));
            }
            word.extend(tail);
            free_reduce(word)
        })
    }

    /// Cancels adjacent `T T^{-1}` pairs so every `T` run has one sign.
    fn free_reduce(word: Vec<(Mat2, i32)>) -> Vec<(Mat2, i32)> {
        let mut out: Vec<(Mat2, i32)> = Vec::with_capacity(word.len());
        for (g, e) in word {
            match out.last() {
                Some((h, f)) if *h == g && g == Mat2::t() && *f == -e => {
                    out.pop();
                }
                _ => out.push((g, e)),
            }
        }
        out
    }

    /// Collects consecutive `T^{±1}` letters into powers.
    fn collect_word(word: &[(Mat2, i32)]) -> TSWord {
        let mut exponents = vec![BigInt::zero()];
        for (g, e) in word {
            if *g == Mat2::s() {
                exponents.push(BigInt::zero());
            } else {
                *exponents.last_mut().unwrap() += *e;
            }
        }
        TSWord {
            negate: false,
            exponents,
        }
    }

    /// Expands `U(p̄, T^a)` into single-letter factors.
    fn expand(f: &RewriteFactor, t: &Sl2Transversal) -> Vec<(Mat2, i32)> {
        let base = t.get(f.base_key).unwrap().clone();
        match f.generator {
            RewriteGenerator::T => {
                let a = f.exponent.to_i64().unwrap();
                let tt = Mat2::t();
                if a > 0 {
                    (0..a)
                        .map(|j| {
                            let p = t.bar(&(&base * &Mat2::t_pow(&j.into()))).unwrap();
                            (u_func(p, &tt, t).unwrap(), 1)
                        })
                        .collect()
                } else {
                    (1..=-a)
                        .map(|j| {
                            let p = t.bar(&(&base * &Mat2::t_pow(&(-j).into()))).unwrap();
                            (u_func(p, &tt, t).unwrap(), -1)
                        })
                        .collect()
                }
            }
            _ => vec![(f.value(t).unwrap(), 1)],
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn classic_and_modified_agree(
            (n, word) in prop_oneof![Just(6u32), Just(9), Just(12)].prop_flat_map(|n| (Just(n), gamma1_word(n)))
        ) {
            prop_assume!(word.len() <= CLASSIC_MAX_LETTERS);
            let t = Sl2Transversal::new(n);
            let h = signed_product(&word);
            prop_assert!(h.in_gamma1(n));
            let classic = classic_rewrite(&word, &t).unwrap();
            prop_assert_eq!(signed_product(&classic), h.clone());

            let w = collect_word(&word);
            prop_assert_eq!(ts_reconstruct(&w), h.clone());
            let modified = modified_rewrite(&w, &t).unwrap();
            prop_assert_eq!(product(&modified, &t), h.clone());
            let expanded: Vec<(Mat2, i32)> = modified.iter().flat_map(|f| expand(f, &t)).collect();
            prop_assert_eq!(expanded, classic);
        }
    }
}

//! The generalized Dedekind sum `S_{χ1,χ2}`.
//!
//! [`naive_sum`] evaluates the defining double sum in `O(c·q1)` steps.
//! [`Context`] holds everything that depends only on the character pair
//! and evaluates any `γ ∈ Γ0(N)` in time linear in the length of its
//! `T`/`S` word.

mod cache;

use std::collections::HashMap;

use log::{info, warn};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::characters::{common_order, parity_product, psi, DirichletCharacter};
use crate::cosets::{
    schreier_alphabet, Alphabet, CosetKey, Gamma0Transversal, Generator, LiftStrategy,
    RightTransversal, Sl2Transversal,
};
use crate::error::{Error, Result};
use crate::exactnum::CycElem;
use crate::modgroup::{residue, ts_decompose, Mat2, Quotient, TSWord};
use crate::rewriter::{modified_rewrite, reduce_word};

pub use cache::CACHE_VERSION;

/// Largest lower-left entry the defining sum accepts; keeps the integer
/// accumulators inside `i128`.
pub const NAIVE_MAX_C: u64 = 1 << 32;

/// Default bound on `N = q1·q2` for [`Context::precompute`].
pub const DEFAULT_MAX_LEVEL: u32 = 60;

const NAIVE_MAX_Q1: u32 = 1 << 15;

/// Exponent of the summand's character factor, given the exponents of
/// `χ2(j)` and `χ1(n)` at order `l`.
#[inline]
fn summand_exponent(e2: u32, e1: u32, l: u32) -> usize {
    if cfg!(feature = "conjugate-chi2-only") {
        ((l - e2 + e1) % l) as usize
    } else {
        ((2 * l - e2 - e1) % l) as usize
    }
}

/// The defining double sum
/// `Σ_{j=1}^{c} Σ_{n=1}^{q1} conj(χ2(j)χ1(n)) B1(j/c) B1(n/q1 + aj/c)`.
///
/// Requires `γ ∈ Γ0(q1·q2)` and `1 ≤ c ≤ NAIVE_MAX_C`.
pub fn naive_sum(
    chi1: &DirichletCharacter,
    chi2: &DirichletCharacter,
    gamma: &Mat2,
) -> Result<CycElem> {
    let (q1, q2) = (chi1.modulus(), chi2.modulus());
    let level = q1 as u64 * q2 as u64;
    if level > u32::MAX as u64 || !gamma.in_gamma0(level as u32) {
        return Err(Error::InvalidInput(format!(
            "{gamma} is not in Γ0({level})"
        )));
    }
    if !gamma.c().is_positive() {
        return Err(Error::Unsupported(format!(
            "lower-left entry of {gamma} is not positive"
        )));
    }
    let c = match gamma.c().to_u64() {
        Some(c) if c <= NAIVE_MAX_C => c,
        _ => {
            return Err(Error::Unsupported(format!(
                "lower-left entry of {gamma} is too large"
            )))
        }
    };
    if q1 > NAIVE_MAX_Q1 {
        return Err(Error::Unsupported(format!("modulus {q1} is too large")));
    }
    let l = common_order(chi1, chi2);
    let e1: Vec<Option<u32>> = (0..q1 as i64).map(|n| chi1.exponent_at(n, l)).collect();
    let e2: Vec<Option<u32>> = (0..q2 as i64).map(|j| chi2.exponent_at(j, l)).collect();

    let q1 = q1 as u64;
    let qc = q1 * c;
    let a = gamma.a().mod_floor(&BigInt::from(c)).to_u64().unwrap();
    let step = (a as u128 * q1 as u128 % qc as u128) as u64;
    let mut acc = vec![0i128; l as usize];
    // base = a·j·q1 mod q1·c, so that q1·c·(n/q1 + aj/c) ≡ n·c + base
    let mut base = 0u64;
    for j in 1..c {
        base = (base + step) % qc;
        let Some(x2) = e2[(j % q2 as u64) as usize] else {
            continue;
        };
        let bj = 2 * j as i128 - c as i128;
        for n in 1..q1 {
            let Some(x1) = e1[n as usize] else {
                continue;
            };
            let m = (base + n * c) % qc;
            if m == 0 {
                continue;
            }
            acc[summand_exponent(x2, x1, l)] += bj * (2 * m as i128 - qc as i128);
        }
    }
    let sums: Vec<BigInt> = acc.into_iter().map(BigInt::from).collect();
    let denom = BigInt::from(4u64) * BigInt::from(q1) * BigInt::from(c) * BigInt::from(c);
    Ok(CycElem::from_exponent_sums(l, &sums, &denom))
}

/// `true` iff `S(γaγb) = S(γa) + ψ(γa)·S(γb)` under the defining sum.
///
/// All three matrices must have positive lower-left entries.
pub fn crossed_hom_check(
    chi1: &DirichletCharacter,
    chi2: &DirichletCharacter,
    ga: &Mat2,
    gb: &Mat2,
) -> Result<bool> {
    let prod = ga * gb;
    let lhs = naive_sum(chi1, chi2, &prod)?;
    let sa = naive_sum(chi1, chi2, ga)?;
    let sb = naive_sum(chi1, chi2, gb)?;
    let rhs = &sa + &(&psi(chi1, chi2, ga)? * &sb);
    Ok(lhs == rhs)
}

/// `S` on an element of `Γ1(N)` through the defining sum, extended to
/// `c ≤ 0`: `S(γ) = -S(γ^{-1})` for `c < 0` since `ψ` is trivial on `Γ1`,
/// and `S(T^b) = 0` because the defining sum only sees `a mod c`.
fn gamma1_oracle(
    chi1: &DirichletCharacter,
    chi2: &DirichletCharacter,
    m: &Mat2,
) -> Result<CycElem> {
    let l = common_order(chi1, chi2);
    if m.c().is_positive() {
        naive_sum(chi1, chi2, m)
    } else if m.c().is_negative() {
        Ok(-&naive_sum(chi1, chi2, &m.inv())?)
    } else if m.d().is_positive() {
        Ok(CycElem::zero(l))
    } else {
        Err(Error::Unsupported(format!("{m} is a negative translation")))
    }
}

#[derive(Clone, Copy, Debug)]
pub struct PrecomputeOptions {
    /// Refuse levels above this bound.
    pub max_level: u32,
    pub lift: LiftStrategy,
}

impl Default for PrecomputeOptions {
    fn default() -> Self {
        PrecomputeOptions {
            max_level: DEFAULT_MAX_LEVEL,
            lift: LiftStrategy::default(),
        }
    }
}

/// Precomputed tables for one character pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Context {
    chi1: DirichletCharacter,
    chi2: DirichletCharacter,
    level: u32,
    order: u32,
    t_g0: Gamma0Transversal,
    t_sl2: Sl2Transversal,
    alphabet: Alphabet,
    /// Indexed by `d mod N`; `None` off the unit group.
    sums_g0: Vec<Option<CycElem>>,
    /// Parallel to the alphabet entries.
    sums_alphabet: Vec<CycElem>,
}

fn check_pair(chi1: &DirichletCharacter, chi2: &DirichletCharacter, max_level: u32) -> Result<u32> {
    for chi in [chi1, chi2] {
        if chi.modulus() < 2 {
            return Err(Error::Config(format!("character {chi} has conductor 1")));
        }
        if !chi.is_primitive() {
            return Err(Error::Config(format!("character {chi} is not primitive")));
        }
    }
    let level = chi1.modulus() as u64 * chi2.modulus() as u64;
    if level > max_level as u64 {
        return Err(Error::Config(format!(
            "level {level} exceeds the precomputation bound {max_level}"
        )));
    }
    Ok(level as u32)
}

fn warn_parity(chi1: &DirichletCharacter, chi2: &DirichletCharacter) {
    let p = parity_product(chi1, chi2);
    if p != CycElem::one(p.order()) {
        warn!("χ1(-1)χ2(-1) = {p} for ({chi1}, {chi2}); the pair is odd, computing anyway");
    }
}

impl Context {
    pub fn precompute(chi1: &DirichletCharacter, chi2: &DirichletCharacter) -> Result<Self> {
        Self::precompute_with(chi1, chi2, &PrecomputeOptions::default())
    }

    pub fn precompute_with(
        chi1: &DirichletCharacter,
        chi2: &DirichletCharacter,
        opts: &PrecomputeOptions,
    ) -> Result<Self> {
        let level = check_pair(chi1, chi2, opts.max_level)?;
        warn_parity(chi1, chi2);
        let order = common_order(chi1, chi2);
        let t_g0 = Gamma0Transversal::new(level);
        let t_sl2 = Sl2Transversal::with_strategy(level, opts.lift);
        let alphabet = schreier_alphabet(&t_sl2);
        let sums_g0 = g0_sums(chi1, chi2, &t_g0)?;
        let sums_alphabet = alphabet_sums(chi1, chi2, &t_sl2, &alphabet)?;
        info!(
            "precomputed level {level}: {} + {} transversal members, {} alphabet entries",
            t_g0.len(),
            t_sl2.len(),
            alphabet.len()
        );
        Ok(Context {
            chi1: chi1.clone(),
            chi2: chi2.clone(),
            level,
            order,
            t_g0,
            t_sl2,
            alphabet,
            sums_g0,
            sums_alphabet,
        })
    }

    pub fn chi1(&self) -> &DirichletCharacter {
        &self.chi1
    }

    pub fn chi2(&self) -> &DirichletCharacter {
        &self.chi2
    }

    /// `N = q1·q2`.
    pub fn level(&self) -> u32 {
        self.level
    }

    /// Cyclotomic order of every value.
    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn t_g0(&self) -> &Gamma0Transversal {
        &self.t_g0
    }

    pub fn t_sl2(&self) -> &Sl2Transversal {
        &self.t_sl2
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    /// `S` of the `Γ0` transversal member for `d mod N`.
    pub fn g0_sum(&self, d: u32) -> Option<&CycElem> {
        self.sums_g0.get(d as usize)?.as_ref()
    }

    /// `S` of the alphabet entry at `slot`.
    pub fn alphabet_sum(&self, slot: usize) -> Option<&CycElem> {
        self.sums_alphabet.get(slot)
    }

    pub fn alphabet_sum_for(&self, key: CosetKey, gen: Generator) -> Option<&CycElem> {
        let i = self.t_sl2.index_of(key)?;
        self.sums_alphabet.get(self.alphabet.slot(i, gen))
    }

    /// `γ = γ1·g` with `g` the `Γ0` transversal member of `γ`'s coset.
    pub fn split(&self, gamma: &Mat2) -> Result<(Mat2, Mat2)> {
        if !gamma.in_gamma0(self.level) {
            return Err(Error::InvalidInput(format!(
                "{gamma} is not in Γ0({})",
                self.level
            )));
        }
        let g = self.t_g0.bar(gamma)?.clone();
        Ok((gamma * &g.inv(), g))
    }

    /// The `T`/`S` word of the `Γ1` part of `γ`.
    pub fn word(&self, gamma: &Mat2, quotient: Quotient) -> Result<TSWord> {
        Ok(ts_decompose(&self.split(gamma)?.0, quotient))
    }

    pub fn fast_sum(&self, gamma: &Mat2) -> Result<CycElem> {
        self.fast_sum_with(gamma, Quotient::default())
    }

    /// `S(γ) = S(γ1) + S(g)`, with `S(γ1)` summed over the alphabet.
    pub fn fast_sum_with(&self, gamma: &Mat2, quotient: Quotient) -> Result<CycElem> {
        let (g1, g) = self.split(gamma)?;
        let d = residue(g.d(), self.level);
        let word = ts_decompose(&g1, quotient);
        let factors = modified_rewrite(&word, &self.t_sl2)?;
        let mut counts: HashMap<usize, BigInt> = HashMap::new();
        for f in reduce_word(&factors, self.level) {
            let i = self
                .t_sl2
                .index_of(f.base_key)
                .ok_or_else(|| Error::MissingCoset(f.base_key.to_string()))?;
            *counts
                .entry(self.alphabet.slot(i, f.generator))
                .or_default() += f.multiplicity;
        }
        let mut total = self
            .g0_sum(d)
            .cloned()
            .ok_or_else(|| Error::MissingCoset(d.to_string()))?;
        let mut slots: Vec<_> = counts.into_iter().filter(|(_, m)| !m.is_zero()).collect();
        slots.sort_unstable_by_key(|(s, _)| *s);
        for (slot, m) in slots {
            total += &self.sums_alphabet[slot].scale_int(&m);
        }
        Ok(total)
    }

    /// The defining sum for this pair.
    pub fn naive_sum(&self, gamma: &Mat2) -> Result<CycElem> {
        naive_sum(&self.chi1, &self.chi2, gamma)
    }

    /// Replaces one `Γ0` table value. Only meant for fault injection.
    #[doc(hidden)]
    pub fn corrupt_g0_sum(&mut self, d: u32, value: CycElem) {
        self.sums_g0[d as usize] = Some(value);
    }
}

fn g0_sums(
    chi1: &DirichletCharacter,
    chi2: &DirichletCharacter,
    t: &Gamma0Transversal,
) -> Result<Vec<Option<CycElem>>> {
    let n = t.modulus();
    let l = common_order(chi1, chi2);
    let mut out = vec![None; n as usize];
    for (d, g) in t.iter() {
        let v = if g.is_identity() {
            CycElem::zero(l)
        } else {
            naive_sum(chi1, chi2, g)?
        };
        out[d as usize] = Some(v);
    }
    Ok(out)
}

/// Only `U(t, T)` and `U(t, S)` go through the defining sum; the rest follow
/// from additivity on `Γ1`:
/// `U(t, T^i) = U(t, T^{i-1})·U(bar(t T^{i-1}), T)`,
/// `U(t, S²) = U(t, S)·U(bar(t S), S)` and `U(t, S⁰) = I`.
fn alphabet_sums(
    chi1: &DirichletCharacter,
    chi2: &DirichletCharacter,
    t: &Sl2Transversal,
    alphabet: &Alphabet,
) -> Result<Vec<CycElem>> {
    let n = t.modulus();
    let l = common_order(chi1, chi2);
    let entries = alphabet.entries();
    let mut sums = vec![CycElem::zero(l); entries.len()];
    for i in 0..t.len() {
        for gen in [Generator::T(1), Generator::S(1)] {
            let slot = alphabet.slot(i, gen);
            sums[slot] = gamma1_oracle(chi1, chi2, &entries[slot].value)?;
        }
    }
    let members = t.members();
    let key_index = |c: u64, d: u64| {
        let key = CosetKey {
            c: (c % n as u64) as u32,
            d: (d % n as u64) as u32,
        };
        t.index_of(key).expect("transversal covers every valid key")
    };
    for (i, (key, _)) in members.iter().enumerate() {
        let (c, d) = (key.c as u64, key.d as u64);
        for k in 2..=n {
            let prev = &sums[alphabet.slot(i, Generator::T(k - 1))];
            let next = &sums[alphabet.slot(key_index(c, d + c * (k as u64 - 1)), Generator::T(1))];
            sums[alphabet.slot(i, Generator::T(k))] = prev + next;
        }
        let j = key_index(d, n as u64 - c);
        sums[alphabet.slot(i, Generator::S(2))] =
            &sums[alphabet.slot(i, Generator::S(1))] + &sums[alphabet.slot(j, Generator::S(1))];
    }
    Ok(sums)
}

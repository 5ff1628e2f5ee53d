//! Dirichlet characters with exact values in cyclotomic fields.
//!
//! A character mod `q` is stored as a table of exponents: `χ(n) = ζ_o^{e(n)}`
//! where `o` is the multiplicative order of the character, and `None` marks
//! residues that share a factor with `q`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exactnum::{format_rational, parse_rational, root_of_unity, CycElem, Rational};
use crate::modgroup::Mat2;

fn factorize(mut n: u32) -> Vec<(u32, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            let mut k = 0;
            while n.is_multiple_of(p) {
                n /= p;
                k += 1;
            }
            out.push((p, k));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

fn multiplicative_order(g: u32, m: u32) -> u32 {
    let mut x = g % m;
    let mut k = 1;
    while x != 1 % m {
        x = (x as u64 * g as u64 % m as u64) as u32;
        k += 1;
    }
    k
}

/// Generators of `(Z/qZ)^×` with their orders and a discrete-log table.
#[derive(Debug, Clone)]
pub struct UnitGroup {
    modulus: u32,
    generators: Vec<(u32, u32)>,
    logs: Vec<Option<Vec<u32>>>,
}

impl UnitGroup {
    /// Builds the generating set prime power by prime power and lifts each
    /// local generator through CRT (`≡ g` locally, `≡ 1` elsewhere).
    pub fn new(q: u32) -> Self {
        assert!(q >= 1, "modulus must be positive");
        let mut local: Vec<(u32, u32, u32)> = Vec::new(); // (prime power, generator, order)
        for (p, k) in factorize(q) {
            let pk = p.pow(k);
            if p == 2 {
                match k {
                    1 => {}
                    2 => local.push((pk, 3, 2)),
                    _ => {
                        local.push((pk, pk - 1, 2));
                        local.push((pk, 5, pk / 4));
                    }
                }
            } else {
                let phi = pk / p * (p - 1);
                let g = (2..pk)
                    .find(|&g| g % p != 0 && multiplicative_order(g, pk) == phi)
                    .expect("odd prime powers are cyclic");
                local.push((pk, g, phi));
            }
        }
        let generators: Vec<(u32, u32)> = local
            .iter()
            .map(|&(pk, g, ord)| {
                let rest = q / pk;
                let lifted = (0..rest.max(1))
                    .map(|t| g + pk * t)
                    .find(|x| x % rest == 1 % rest)
                    .expect("CRT lift exists");
                (lifted % q, ord)
            })
            .collect();

        let mut logs = vec![None; q as usize];
        let mut exps = vec![0u32; generators.len()];
        loop {
            let mut n = 1 % q as u64;
            for (&(g, _), &e) in generators.iter().zip(&exps) {
                for _ in 0..e {
                    n = n * g as u64 % q as u64;
                }
            }
            logs[n as usize] = Some(exps.clone());
            if !advance(&mut exps, generators.iter().map(|g| g.1)) {
                break;
            }
        }
        UnitGroup {
            modulus: q,
            generators,
            logs,
        }
    }

    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    /// `(generator, order)` pairs.
    pub fn generators(&self) -> &[(u32, u32)] {
        &self.generators
    }

    pub fn size(&self) -> usize {
        self.logs.iter().filter(|l| l.is_some()).count()
    }
}

/// Odometer step over mixed radices; false once every digit wrapped.
fn advance(digits: &mut [u32], radices: impl Iterator<Item = u32>) -> bool {
    for (d, r) in digits.iter_mut().zip(radices) {
        *d += 1;
        if *d < r {
            return true;
        }
        *d = 0;
    }
    false
}

/// A Dirichlet character, immutable once built.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DirichletCharacter {
    modulus: u32,
    order: u32,
    exponents: Vec<Option<u32>>,
    generator_values: Vec<(u32, Rational)>,
}

impl DirichletCharacter {
    fn from_generator_exponents(group: &UnitGroup, exps: &[u32]) -> Self {
        let gens = group.generators();
        let order = gens
            .iter()
            .zip(exps)
            .map(|(&(_, ord), &e)| ord / e.gcd(&ord))
            .fold(1u32, |acc, o| acc.lcm(&o));
        let exponents = group
            .logs
            .iter()
            .map(|log| {
                log.as_ref().map(|l| {
                    // Σ e_i l_i / ord_i, scaled to order `order`
                    let mut num = 0u64;
                    for ((&(_, ord), &e), &li) in gens.iter().zip(exps).zip(l) {
                        let g = e.gcd(&ord);
                        num += (e / g) as u64 * li as u64 * (order / (ord / g)) as u64;
                    }
                    (num % order as u64) as u32
                })
            })
            .collect();
        let generator_values = gens
            .iter()
            .zip(exps)
            .map(|(&(g, ord), &e)| (g, Rational::new(e.into(), ord.into())))
            .collect();
        DirichletCharacter {
            modulus: group.modulus(),
            order,
            exponents,
            generator_values,
        }
    }

    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    /// Least `k ≥ 1` with `χ^k` trivial.
    pub fn order(&self) -> u32 {
        self.order
    }

    /// Standard unit-group generators with `χ(g) = exp(2πi·v)`.
    pub fn generator_values(&self) -> &[(u32, Rational)] {
        &self.generator_values
    }

    /// Exponent `e` with `χ(n) = ζ_order^e`, or `None` when `gcd(n, q) > 1`.
    pub fn exponent(&self, n: i64) -> Option<u32> {
        self.exponents[n.rem_euclid(self.modulus as i64) as usize]
    }

    pub fn exponent_big(&self, n: &BigInt) -> Option<u32> {
        let r = n.mod_floor(&BigInt::from(self.modulus));
        self.exponents[r.to_usize().unwrap()]
    }

    /// Exponent of `χ(n)` expressed at a multiple `target` of the character order.
    pub fn exponent_at(&self, n: i64, target: u32) -> Option<u32> {
        debug_assert_eq!(target % self.order, 0);
        self.exponent(n).map(|e| e * (target / self.order))
    }

    /// `χ(n)` as an element of `Q(ζ_order)`; zero off the unit group.
    pub fn eval(&self, n: i64) -> CycElem {
        match self.exponent(n) {
            Some(e) => root_of_unity(self.order, e as i64),
            None => CycElem::zero(self.order),
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.order == 1
    }

    /// Least divisor `d` of `q` such that `χ` is trivial on units `≡ 1 mod d`.
    pub fn conductor(&self) -> u32 {
        let q = self.modulus;
        (1..=q)
            .filter(|d| q.is_multiple_of(*d))
            .find(|&d| {
                (0..q).all(|n| n % d != 1 % d || self.exponents[n as usize].is_none_or(|e| e == 0))
            })
            .unwrap_or(q)
    }

    pub fn is_primitive(&self) -> bool {
        self.conductor() == self.modulus
    }

    /// Canonical `q=..;g=..;v=..` description using the standard generators.
    pub fn spec_string(&self) -> String {
        let mut s = format!("q={}", self.modulus);
        for (g, v) in &self.generator_values {
            s.push_str(&format!(";g={g};v={}", format_rational(v)));
        }
        s
    }
}

impl fmt::Display for DirichletCharacter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.spec_string())
    }
}

/// All `φ(q)` Dirichlet characters mod `q`.
pub fn characters_mod(q: u32) -> Vec<DirichletCharacter> {
    let group = UnitGroup::new(q);
    let mut exps = vec![0u32; group.generators().len()];
    let mut out = Vec::new();
    loop {
        out.push(DirichletCharacter::from_generator_exponents(&group, &exps));
        if !advance(&mut exps, group.generators().iter().map(|g| g.1)) {
            break;
        }
    }
    out
}

/// User-facing character description: modulus plus assignments
/// `χ(g) = exp(2πi·v)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CharacterSpec {
    pub modulus: u32,
    pub assignments: Vec<(i64, Rational)>,
}

impl CharacterSpec {
    /// Parses `q=5;g=2;v=3/4`. Each `g` must be followed by its `v`.
    pub fn parse(s: &str) -> Result<Self> {
        let mut modulus = None;
        let mut assignments = Vec::new();
        let mut pending: Option<i64> = None;
        for part in s.split(';').map(str::trim).filter(|p| !p.is_empty()) {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected key=value, got {part:?}")))?;
            let value = value.trim();
            match key.trim() {
                "q" => {
                    let q: u32 = value
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad modulus {value:?}")))?;
                    if q == 0 {
                        return Err(Error::Parse("modulus must be positive".into()));
                    }
                    modulus = Some(q);
                }
                "g" => {
                    if pending.is_some() {
                        return Err(Error::Parse("g given twice without v".into()));
                    }
                    pending = Some(
                        value
                            .parse()
                            .map_err(|_| Error::Parse(format!("bad generator {value:?}")))?,
                    );
                }
                "v" => {
                    let g = pending
                        .take()
                        .ok_or_else(|| Error::Parse("v without preceding g".into()))?;
                    assignments.push((g, parse_rational(value)?));
                }
                other => return Err(Error::Parse(format!("unknown key {other:?}"))),
            }
        }
        if pending.is_some() {
            return Err(Error::Parse("trailing g without v".into()));
        }
        let modulus = modulus.ok_or_else(|| Error::Parse("missing q=".into()))?;
        Ok(CharacterSpec {
            modulus,
            assignments,
        })
    }

    fn matches(&self, chi: &DirichletCharacter) -> bool {
        self.assignments
            .iter()
            .all(|(g, v)| match chi.exponent(*g) {
                Some(e) => {
                    let frac = v - v.floor();
                    frac == Rational::new(e.into(), chi.order().into())
                }
                None => false,
            })
    }

    /// The unique primitive character mod `q` satisfying every assignment.
    pub fn resolve(&self) -> Result<DirichletCharacter> {
        let mut found: Vec<DirichletCharacter> = characters_mod(self.modulus)
            .into_iter()
            .filter(|chi| chi.is_primitive() && self.matches(chi))
            .collect();
        match found.len() {
            1 => Ok(found.pop().unwrap()),
            0 => Err(Error::Config(format!(
                "no primitive character mod {} matches the given values",
                self.modulus
            ))),
            n => Err(Error::Config(format!(
                "{n} primitive characters mod {} match; add generator values to pick one",
                self.modulus
            ))),
        }
    }
}

/// `lcm(order χ1, order χ2, 2)`, the order every sum for the pair lives at.
pub fn common_order(chi1: &DirichletCharacter, chi2: &DirichletCharacter) -> u32 {
    chi1.order().lcm(&chi2.order()).lcm(&2)
}

/// `χ1(-1)·χ2(-1)`.
pub fn parity_product(chi1: &DirichletCharacter, chi2: &DirichletCharacter) -> CycElem {
    let l = common_order(chi1, chi2);
    let e = chi1.exponent_at(-1, l).unwrap() + chi2.exponent_at(-1, l).unwrap();
    root_of_unity(l, e as i64)
}

/// The twist `ψ(γ) = χ1·χ̄2(d)` at the pair's common order.
pub fn psi(chi1: &DirichletCharacter, chi2: &DirichletCharacter, gamma: &Mat2) -> Result<CycElem> {
    let l = common_order(chi1, chi2);
    let n = chi1.modulus() as u64 * chi2.modulus() as u64;
    let d = gamma.d();
    if !d.gcd(&BigInt::from(n)).is_one_abs() {
        return Err(Error::InvalidInput(format!(
            "lower-right entry {d} is not a unit mod {n}"
        )));
    }
    let e1 = chi1.exponent_big(d).unwrap() * (l / chi1.order());
    let e2 = chi2.exponent_big(d).unwrap() * (l / chi2.order());
    Ok(root_of_unity(l, e1 as i64 - e2 as i64))
}

trait OneAbs {
    fn is_one_abs(&self) -> bool;
}

impl OneAbs for BigInt {
    fn is_one_abs(&self) -> bool {
        !self.is_zero() && self.magnitude() == &1u32.into()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(s: &str) -> DirichletCharacter {
        CharacterSpec::parse(s).unwrap().resolve().unwrap()
    }

    fn int(order: u32, n: i64) -> CycElem {
        CycElem::from_rational(order, Rational::from_integer(n.into()))
    }

    fn totient(q: u32) -> usize {
        (1..=q).filter(|n| n.gcd(&q) == 1).count()
    }

    #[test]
    fn small_enumerations() {
        let mod3 = characters_mod(3);
        assert_eq!(mod3.len(), 2);
        let quad = mod3.iter().find(|c| !c.is_trivial()).unwrap();
        assert_eq!(quad.eval(2), int(2, -1));

        let mod4 = characters_mod(4);
        assert_eq!(mod4.len(), 2);
        let nontriv = mod4.iter().find(|c| !c.is_trivial()).unwrap();
        assert_eq!(nontriv.eval(3), int(2, -1));

        let mod7 = characters_mod(7);
        assert_eq!(mod7.len(), 6);
        let group = UnitGroup::new(7);
        assert_eq!(group.generators(), &[(3, 6)]);
        assert!(mod7.iter().any(|c| c.order() == 6));
    }

    #[test]
    fn conductors() {
        let quad3 = spec("q=3");
        assert_eq!(quad3.conductor(), 3);
        assert!(quad3.is_primitive());

        let triv3 = characters_mod(3)
            .into_iter()
            .find(|c| c.is_trivial())
            .unwrap();
        assert_eq!(triv3.conductor(), 1);
        assert!(!triv3.is_primitive());

        // mod 6, induced from the quadratic character mod 3: χ(5) = -1
        let induced = characters_mod(6)
            .into_iter()
            .find(|c| c.exponent(5) == Some(1) && c.order() == 2)
            .unwrap();
        assert_eq!(induced.conductor(), 3);
        assert!(!induced.is_primitive());
    }

    #[test]
    fn eval_examples() {
        let chi1 = spec("q=5;g=2;v=3/4");
        assert_eq!(chi1.order(), 4);
        assert_eq!(chi1.eval(2), &int(4, 0) - &root_of_unity(4, 1));
        assert_eq!(chi1.eval(3), root_of_unity(4, 1));
        assert_eq!(chi1.eval(1), int(4, 1));
        assert_eq!(chi1.eval(10), CycElem::zero(4));
        assert_eq!(spec("q=3").eval(1), int(2, 1));
    }

    #[test]
    fn parity_examples() {
        let quad3 = spec("q=3");
        assert_eq!(parity_product(&quad3, &quad3), int(2, 1));

        let chi4 = spec("q=4");
        let chi7 = spec("q=7;g=3;v=5/6");
        assert_eq!(chi7.eval(-1), int(6, -1));
        assert_eq!(parity_product(&chi4, &chi7), int(6, 1));

        let chi5 = spec("q=5;g=2;v=3/4");
        let chi7b = spec("q=7;g=3;v=1/3");
        assert_eq!(parity_product(&chi5, &chi7b), int(12, -1));
    }

    #[test]
    fn psi_examples() {
        let chi4 = spec("q=4");
        let chi7 = spec("q=7;g=3;v=5/6");
        // d = 3 mod 28: χ1(3) = -1, χ2(3) = exp(2πi·5/6)
        let gamma = Mat2::from_i64(19, 2, 28, 3).unwrap();
        let want = &int(6, -1) * &root_of_unity(6, 5).conj();
        assert_eq!(psi(&chi4, &chi7, &gamma).unwrap(), want);

        let quad3 = spec("q=3");
        let g1 = Mat2::from_i64(-152, 137, -81, 73).unwrap();
        assert_eq!(psi(&quad3, &quad3, &g1).unwrap(), int(2, 1));

        let bad = Mat2::from_i64(1, 1, 2, 3).unwrap();
        assert!(psi(&quad3, &quad3, &bad).is_err());
    }

    #[test]
    fn psi_same_character_is_trivial() {
        let chi = spec("q=5;g=2;v=1/4");
        for d in [1i64, 2, 3, 4, 7, 13, -2] {
            let b = 0;
            let gamma = if d == 1 {
                Mat2::identity()
            } else {
                // any matrix with this lower-right entry and c ≡ 0 mod 25
                let c = 25i64;
                let a = (0..c).find(|a| (a * d - 1).rem_euclid(c) == 0).unwrap();
                Mat2::from_i64(a, (a * d - 1) / c + b, c, d).unwrap()
            };
            assert_eq!(psi(&chi, &chi, &gamma).unwrap(), CycElem::one(4));
        }
    }

    #[test]
    fn enumeration_is_complete_and_distinct() {
        for q in 1..=50u32 {
            let chars = characters_mod(q);
            assert_eq!(chars.len(), totient(q), "q={q}");
            for (i, a) in chars.iter().enumerate() {
                for b in &chars[i + 1..] {
                    assert_ne!(a.exponents, b.exponents, "q={q}");
                }
            }
        }
    }

    #[test]
    fn characters_are_multiplicative_and_orthogonal() {
        for q in 1..=50u32 {
            for chi in characters_mod(q) {
                let o = chi.order();
                assert_eq!(chi.eval(1), CycElem::one(o));
                for m in 1..=q as i64 {
                    for n in 1..=q as i64 {
                        if m.gcd(&(q as i64)) == 1 && n.gcd(&(q as i64)) == 1 {
                            assert_eq!(chi.eval(m * n), &chi.eval(m) * &chi.eval(n));
                        }
                    }
                    assert_eq!(chi.eval(m), chi.eval(m + q as i64));
                    assert_eq!(chi.exponent(m).is_none(), m.gcd(&(q as i64)) != 1);
                }
                let total = (0..q as i64).fold(CycElem::zero(o), |acc, n| &acc + &chi.eval(n));
                if chi.is_trivial() {
                    assert_eq!(
                        total,
                        CycElem::from_rational(1, Rational::from_integer(totient(q).into()))
                    );
                } else {
                    assert!(total.is_zero(), "q={q} {chi}");
                }
                // the order is exact: χ^k is nontrivial for proper divisors k
                for k in 1..o {
                    if o % k == 0 {
                        assert!(
                            (1..q as i64).any(|n| chi.exponent(n).is_some_and(|e| e * k % o != 0))
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn spec_strings_round_trip() {
        for q in [3u32, 4, 5, 7, 8, 12, 15, 16] {
            for chi in characters_mod(q).into_iter().filter(|c| c.is_primitive()) {
                let back = CharacterSpec::parse(&chi.spec_string())
                    .unwrap()
                    .resolve()
                    .unwrap();
                assert_eq!(back, chi);
            }
        }
    }

    #[test]
    fn spec_errors() {
        assert!(CharacterSpec::parse("g=2;v=1/2").is_err());
        assert!(CharacterSpec::parse("q=5;v=1/2").is_err());
        assert!(CharacterSpec::parse("q=5;g=2").is_err());
        assert!(CharacterSpec::parse("q=x").is_err());
        // two primitive characters mod 5 of order 4
        assert!(CharacterSpec::parse("q=5;g=4;v=1/2")
            .unwrap()
            .resolve()
            .is_err());
        // no primitive character mod 6
        assert!(CharacterSpec::parse("q=6").unwrap().resolve().is_err());
        // χ(2) = exp(2πi/3) is impossible mod 5
        assert!(CharacterSpec::parse("q=5;g=2;v=1/3")
            .unwrap()
            .resolve()
            .is_err());
    }
}

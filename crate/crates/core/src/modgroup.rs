//! Exact `SL2(Z)` matrices, congruence-subgroup membership and the
//! Euclidean decomposition `M = ±T^{a1} S T^{a2} S … S T^{ar}`.

use std::fmt;
use std::ops::Mul;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// A 2×2 integer matrix `(a, b; c, d)` with determinant 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Mat2 {
    a: BigInt,
    b: BigInt,
    c: BigInt,
    d: BigInt,
}

impl Mat2 {
    pub fn new(a: BigInt, b: BigInt, c: BigInt, d: BigInt) -> Result<Self> {
        let det = &a * &d - &b * &c;
        if !det.is_one() {
            return Err(Error::Determinant(det.to_string()));
        }
        Ok(Mat2 { a, b, c, d })
    }

    pub fn from_i64(a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        Self::new(a.into(), b.into(), c.into(), d.into())
    }

    /// Entries known to satisfy `ad - bc = 1`.
    pub(crate) fn from_parts(a: BigInt, b: BigInt, c: BigInt, d: BigInt) -> Self {
        debug_assert!((&a * &d - &b * &c).is_one());
        Mat2 { a, b, c, d }
    }

    pub fn identity() -> Self {
        Self::from_parts(1.into(), 0.into(), 0.into(), 1.into())
    }

    pub fn neg_identity() -> Self {
        Self::from_parts((-1).into(), 0.into(), 0.into(), (-1).into())
    }

    /// `S = (0, -1; 1, 0)`.
    pub fn s() -> Self {
        Self::from_parts(0.into(), (-1).into(), 1.into(), 0.into())
    }

    /// `T = (1, 1; 0, 1)`.
    pub fn t() -> Self {
        Self::t_pow(&BigInt::one())
    }

    /// `T^k = (1, k; 0, 1)`.
    pub fn t_pow(k: &BigInt) -> Self {
        Self::from_parts(1.into(), k.clone(), 0.into(), 1.into())
    }

    pub fn a(&self) -> &BigInt {
        &self.a
    }
    pub fn b(&self) -> &BigInt {
        &self.b
    }
    pub fn c(&self) -> &BigInt {
        &self.c
    }
    pub fn d(&self) -> &BigInt {
        &self.d
    }

    pub fn entries(&self) -> [&BigInt; 4] {
        [&self.a, &self.b, &self.c, &self.d]
    }

    pub fn is_identity(&self) -> bool {
        self.a.is_one() && self.b.is_zero() && self.c.is_zero() && self.d.is_one()
    }

    /// `(d, -b; -c, a)`.
    pub fn inv(&self) -> Self {
        Mat2 {
            a: self.d.clone(),
            b: -&self.b,
            c: -&self.c,
            d: self.a.clone(),
        }
    }

    pub fn negate(&self) -> Self {
        Mat2 {
            a: -&self.a,
            b: -&self.b,
            c: -&self.c,
            d: -&self.d,
        }
    }

    /// Integer power; negative exponents use the inverse.
    pub fn pow(&self, k: &BigInt) -> Self {
        let mut base = if k.is_negative() {
            self.inv()
        } else {
            self.clone()
        };
        let mut e = k.abs();
        let mut acc = Mat2::identity();
        while !e.is_zero() {
            if e.is_odd() {
                acc = &acc * &base;
            }
            e >>= 1;
            if !e.is_zero() {
                base = &base * &base;
            }
        }
        acc
    }

    /// `c ≡ 0 (mod n)`.
    pub fn in_gamma0(&self, n: u32) -> bool {
        self.c.mod_floor(&BigInt::from(n)).is_zero()
    }

    /// `c ≡ 0` and `a ≡ d ≡ 1 (mod n)`.
    pub fn in_gamma1(&self, n: u32) -> bool {
        let n_big = BigInt::from(n);
        let one = BigInt::one().mod_floor(&n_big);
        self.in_gamma0(n) && self.a.mod_floor(&n_big) == one && self.d.mod_floor(&n_big) == one
    }

    /// Bottom row reduced mod `n`, the coset key for `Γ1(n)\SL2(Z)`.
    pub fn bottom_row_mod(&self, n: u32) -> (u32, u32) {
        (residue(&self.c, n), residue(&self.d, n))
    }
}

/// `x mod n` in `[0, n)`.
pub(crate) fn residue(x: &BigInt, n: u32) -> u32 {
    let r = x.mod_floor(&BigInt::from(n));
    u32::try_from(r).expect("residue below modulus")
}

impl Mul for &Mat2 {
    type Output = Mat2;
    fn mul(self, rhs: &Mat2) -> Mat2 {
        Mat2 {
            a: &self.a * &rhs.a + &self.b * &rhs.c,
            b: &self.a * &rhs.b + &self.b * &rhs.d,
            c: &self.c * &rhs.a + &self.d * &rhs.c,
            d: &self.c * &rhs.b + &self.d * &rhs.d,
        }
    }
}

impl fmt::Display for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}; {}, {})", self.a, self.b, self.c, self.d)
    }
}

/// Parses `a,b;c,d`, whitespace allowed.
impl FromStr for Mat2 {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let rows: Vec<&str> = s
            .trim()
            .trim_matches(|c| c == '(' || c == ')')
            .split(';')
            .collect();
        if rows.len() != 2 {
            return Err(Error::Parse(format!("expected \"a,b;c,d\", got {s:?}")));
        }
        let mut vals = Vec::with_capacity(4);
        for row in rows {
            let parts: Vec<&str> = row.split(',').collect();
            if parts.len() != 2 {
                return Err(Error::Parse(format!(
                    "expected two entries per row in {s:?}"
                )));
            }
            for p in parts {
                vals.push(
                    p.trim()
                        .parse::<BigInt>()
                        .map_err(|_| Error::Parse(format!("bad integer {:?}", p.trim())))?,
                );
            }
        }
        let d = vals.pop().unwrap();
        let c = vals.pop().unwrap();
        let b = vals.pop().unwrap();
        let a = vals.pop().unwrap();
        Mat2::new(a, b, c, d)
    }
}

/// The word `±T^{e1} S T^{e2} S … S T^{er}`.
///
/// Interior exponents are nonzero; the first and last may be zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TSWord {
    pub negate: bool,
    pub exponents: Vec<BigInt>,
}

impl TSWord {
    /// Number of letters: one per T-power plus one per S.
    pub fn letter_count(&self) -> usize {
        2 * self.exponents.len() - 1
    }

    /// Number of S letters.
    pub fn s_count(&self) -> usize {
        self.exponents.len() - 1
    }
}

impl fmt::Display for TSWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negate {
            write!(f, "-")?;
        }
        for (i, e) in self.exponents.iter().enumerate() {
            if i > 0 {
                write!(f, " S ")?;
            }
            write!(f, "T^{e}")?;
        }
        Ok(())
    }
}

/// How each Euclidean step picks its quotient.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Quotient {
    /// `⌊a/c⌋`. Reproduces the classical worked decompositions, but long
    /// runs of `-2` exponents make the word length linear in `c` in the
    /// worst case.
    Floor,
    /// Nearest integer to `a/c`; the remainder is at most `|c|/2`, so the
    /// word has `O(log |c|)` letters.
    #[default]
    Nearest,
}

/// Writes `m` as `±T^{e1} S … S T^{er}` by repeatedly peeling `T^q S` off
/// the left: `m = T^q S m'` with `m' = S^{-1} T^{-q} m`, whose lower-left
/// entry is `-(a - qc)`.
pub fn ts_decompose(m: &Mat2, quotient: Quotient) -> TSWord {
    let (mut a, mut b, mut c, mut d) = (m.a.clone(), m.b.clone(), m.c.clone(), m.d.clone());
    let mut exponents = Vec::new();
    while !c.is_zero() {
        let (mut q, mut r) = a.div_mod_floor(&c);
        if quotient == Quotient::Nearest && (&r * 2u32).abs() > c.abs() {
            q += 1;
            r -= &c;
        }
        let b_red = &b - &q * &d;
        // S^{-1} (r, b_red; c, d) = (c, d; -r, -b_red)
        a = std::mem::replace(&mut c, -r);
        b = std::mem::replace(&mut d, -b_red);
        exponents.push(q);
    }
    // remaining matrix is ±T^k
    let negate = a.is_negative();
    exponents.push(if negate { -b } else { b });
    TSWord { negate, exponents }
}

/// The exact product of the word.
pub fn ts_reconstruct(w: &TSWord) -> Mat2 {
    let s = Mat2::s();
    let mut acc = Mat2::identity();
    for (i, e) in w.exponents.iter().enumerate() {
        if i > 0 {
            acc = &acc * &s;
        }
        if !e.is_zero() {
            acc = &acc * &Mat2::t_pow(e);
        }
    }
    if w.negate {
        acc.negate()
    } else {
        acc
    }
}

//! Right transversals of `Γ1(N)` in `Γ0(N)` and in `SL2(Z)`, the coset
//! representative map, the `U` function and the finite alphabet 𝒰.
//!
//! Cosets of `Γ1(N)` in `Γ0(N)` are keyed by `d mod N`; cosets in `SL2(Z)`
//! by the bottom row `(c mod N, d mod N)`. Both lookups are O(1).

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;

use crate::error::{Error, Result};
use crate::modgroup::{residue, Mat2};

/// Bottom row of a matrix reduced mod `N`, with `gcd(c, d, N) = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CosetKey {
    pub c: u32,
    pub d: u32,
}

impl CosetKey {
    pub fn of(m: &Mat2, n: u32) -> Self {
        let (c, d) = m.bottom_row_mod(n);
        CosetKey { c, d }
    }

    /// Key of `Γ1(N)` itself.
    pub fn identity(n: u32) -> Self {
        CosetKey { c: 0, d: 1 % n }
    }

    pub fn is_valid(&self, n: u32) -> bool {
        self.c < n && self.d < n && self.c.gcd(&self.d).gcd(&n) == 1
    }
}

impl fmt::Display for CosetKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.c, self.d)
    }
}

impl FromStr for CosetKey {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let (c, d) = s
            .split_once(',')
            .ok_or_else(|| Error::Parse(format!("bad coset key {s:?}")))?;
        let parse = |x: &str| {
            x.trim()
                .parse::<u32>()
                .map_err(|_| Error::Parse(format!("bad coset key {s:?}")))
        };
        Ok(CosetKey {
            c: parse(c)?,
            d: parse(d)?,
        })
    }
}

/// A right transversal of `Γ1(N)` in some overgroup.
pub trait RightTransversal {
    fn modulus(&self) -> u32;

    /// The member sharing `m`'s right coset.
    fn bar(&self, m: &Mat2) -> Result<&Mat2>;
}

/// `U(x, y) = x·y·bar(x·y)^{-1}`, always an element of `Γ1(N)`.
pub fn u_func<R: RightTransversal + ?Sized>(x: &Mat2, y: &Mat2, t: &R) -> Result<Mat2> {
    let xy = x * y;
    let rep = t.bar(&xy)?;
    Ok(&xy * &rep.inv())
}

/// Transversal of `Γ1(N)` in `Γ0(N)`, indexed by `d mod N`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gamma0Transversal {
    n: u32,
    members: Vec<Option<Mat2>>,
}

impl Gamma0Transversal {
    /// Identity for `d ≡ 1`, otherwise `(a, (ad-1)/N; N, d)` with `a` the
    /// least positive inverse of `d`.
    pub fn new(n: u32) -> Self {
        assert!(n >= 1, "level must be positive");
        let members = (0..n)
            .map(|d| {
                if d.gcd(&n) != 1 {
                    return None;
                }
                if d == 1 % n {
                    return Some(Mat2::identity());
                }
                let a = (1..n).find(|a| (a * d) % n == 1).unwrap();
                let b = (a as u64 * d as u64 - 1) / n as u64;
                Some(Mat2::from_parts(a.into(), b.into(), n.into(), d.into()))
            })
            .collect();
        Gamma0Transversal { n, members }
    }

    /// Rebuilds from stored members, checking every invariant.
    pub fn from_members(n: u32, list: Vec<(u32, Mat2)>) -> Result<Self> {
        let mut members = vec![None; n as usize];
        for (d, m) in list {
            if d >= n || d.gcd(&n) != 1 {
                return Err(Error::Cache(format!("bad Γ0 key {d} for N={n}")));
            }
            if !m.in_gamma0(n) || residue(m.d(), n) != d {
                return Err(Error::Cache(format!("member {m} does not match key {d}")));
            }
            if members[d as usize].replace(m).is_some() {
                return Err(Error::Cache(format!("duplicate Γ0 key {d}")));
            }
        }
        let t = Gamma0Transversal { n, members };
        let expected = (0..n).filter(|d| d.gcd(&n) == 1).count();
        if t.len() != expected {
            return Err(Error::Cache(format!(
                "Γ0 transversal has {} members, expected {expected}",
                t.len()
            )));
        }
        if !t.members[(1 % n) as usize]
            .as_ref()
            .is_some_and(Mat2::is_identity)
        {
            return Err(Error::Cache("Γ0 transversal lacks the identity".into()));
        }
        Ok(t)
    }

    pub fn get(&self, d: u32) -> Option<&Mat2> {
        self.members.get(d as usize).and_then(Option::as_ref)
    }

    pub fn len(&self) -> usize {
        self.members.iter().flatten().count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, &Mat2)> {
        self.members
            .iter()
            .enumerate()
            .filter_map(|(d, m)| m.as_ref().map(|m| (d as u32, m)))
    }
}

impl RightTransversal for Gamma0Transversal {
    fn modulus(&self) -> u32 {
        self.n
    }

    fn bar(&self, m: &Mat2) -> Result<&Mat2> {
        if !m.in_gamma0(self.n) {
            return Err(Error::InvalidInput(format!("{m} is not in Γ0({})", self.n)));
        }
        let d = residue(m.d(), self.n);
        self.get(d)
            .ok_or_else(|| Error::MissingCoset(d.to_string()))
    }
}

/// How a coset key is lifted to a matrix of `SL2(Z)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum LiftStrategy {
    /// `c' = c` (or `N` when `c = 0`), scan `d' = d, d+N, …` upwards, and
    /// take the inverse of `d'` mod `c'` of least absolute value.
    #[default]
    Ascending,
    /// `c' = c + N`, scan `d' = d-N, d-2N, …` downwards, and take the least
    /// positive inverse. Only used to check transversal independence.
    Descending,
}

fn lift_key(key: CosetKey, n: u32, strategy: LiftStrategy) -> Mat2 {
    if key == CosetKey::identity(n) {
        return Mat2::identity();
    }
    let n = n as i64;
    let (c, d) = (key.c as i64, key.d as i64);
    let (cc, dd) = match strategy {
        LiftStrategy::Ascending => {
            let cc = if c == 0 { n } else { c };
            let dd = (0..).map(|k| d + k * n).find(|x| x.gcd(&cc) == 1).unwrap();
            (cc, dd)
        }
        LiftStrategy::Descending => {
            let cc = c + n;
            let dd = (1..).map(|k| d - k * n).find(|x| x.gcd(&cc) == 1).unwrap();
            (cc, dd)
        }
    };
    let inv = dd.extended_gcd(&cc).x.rem_euclid(cc);
    let a = match strategy {
        LiftStrategy::Ascending if 2 * inv > cc => inv - cc,
        LiftStrategy::Descending if inv == 0 => cc,
        _ => inv,
    };
    let b = (a * dd - 1) / cc;
    debug_assert_eq!(a * dd - b * cc, 1);
    Mat2::from_parts(a.into(), b.into(), cc.into(), dd.into())
}

/// Transversal of `Γ1(N)` in `SL2(Z)`, one member per valid coset key.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sl2Transversal {
    n: u32,
    members: Vec<(CosetKey, Mat2)>,
    slots: Vec<Option<u32>>,
}

impl Sl2Transversal {
    pub fn new(n: u32) -> Self {
        Self::with_strategy(n, LiftStrategy::Ascending)
    }

    pub fn with_strategy(n: u32, strategy: LiftStrategy) -> Self {
        assert!(n >= 1, "level must be positive");
        let members = (0..n)
            .flat_map(|c| (0..n).map(move |d| CosetKey { c, d }))
            .filter(|k| k.is_valid(n))
            .map(|k| (k, lift_key(k, n, strategy)))
            .collect();
        Self::index(n, members)
    }

    fn index(n: u32, members: Vec<(CosetKey, Mat2)>) -> Self {
        let mut slots = vec![None; (n * n) as usize];
        for (i, (k, _)) in members.iter().enumerate() {
            slots[(k.c * n + k.d) as usize] = Some(i as u32);
        }
        Sl2Transversal { n, members, slots }
    }

    /// Rebuilds from stored members, checking every invariant.
    pub fn from_members(n: u32, members: Vec<(CosetKey, Mat2)>) -> Result<Self> {
        let mut seen = vec![false; (n * n) as usize];
        for (k, m) in &members {
            if !k.is_valid(n) || CosetKey::of(m, n) != *k {
                return Err(Error::Cache(format!("member {m} does not match key {k}")));
            }
            let slot = &mut seen[(k.c * n + k.d) as usize];
            if std::mem::replace(slot, true) {
                return Err(Error::Cache(format!("duplicate SL2 key {k}")));
            }
        }
        let expected = sl2_index(n);
        if members.len() as u64 != expected {
            return Err(Error::Cache(format!(
                "SL2 transversal has {} members, expected {expected}",
                members.len()
            )));
        }
        let t = Self::index(n, members);
        let id = t.index_of(CosetKey::identity(n)).unwrap();
        if !t.members[id].1.is_identity() {
            return Err(Error::Cache("SL2 transversal lacks the identity".into()));
        }
        Ok(t)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> &[(CosetKey, Mat2)] {
        &self.members
    }

    pub fn index_of(&self, key: CosetKey) -> Option<usize> {
        if key.c >= self.n || key.d >= self.n {
            return None;
        }
        self.slots[(key.c * self.n + key.d) as usize].map(|i| i as usize)
    }

    pub fn get(&self, key: CosetKey) -> Option<&Mat2> {
        self.index_of(key).map(|i| &self.members[i].1)
    }
}

impl RightTransversal for Sl2Transversal {
    fn modulus(&self) -> u32 {
        self.n
    }

    fn bar(&self, m: &Mat2) -> Result<&Mat2> {
        let key = CosetKey::of(m, self.n);
        self.get(key)
            .ok_or_else(|| Error::MissingCoset(key.to_string()))
    }
}

/// `φ(N)`, the index of `Γ1(N)` in `Γ0(N)`.
pub fn gamma0_index(n: u32) -> u64 {
    (1..=n).filter(|d| d.gcd(&n) == 1).count() as u64
}

/// `N² ∏_{p | N} (1 - 1/p²)`, the index of `Γ1(N)` in `SL2(Z)`.
pub fn sl2_index(n: u32) -> u64 {
    let mut out = n as u64 * n as u64;
    let mut m = n;
    let mut p = 2;
    while m > 1 {
        if m.is_multiple_of(p) {
            out = out / (p as u64 * p as u64) * (p as u64 * p as u64 - 1);
            while m.is_multiple_of(p) {
                m /= p;
            }
        }
        p += 1;
    }
    out
}

/// Letter of the alphabet: `T^i` for `1 ≤ i ≤ N` or `S^k` for `0 ≤ k ≤ 2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Generator {
    T(u32),
    S(u8),
}

impl Generator {
    pub fn matrix(&self) -> Mat2 {
        match *self {
            Generator::T(i) => Mat2::t_pow(&BigInt::from(i)),
            Generator::S(k) => (0..k).fold(Mat2::identity(), |acc, _| &acc * &Mat2::s()),
        }
    }

    fn slot(&self, n: u32) -> usize {
        match *self {
            Generator::T(i) => {
                debug_assert!((1..=n).contains(&i));
                (i - 1) as usize
            }
            Generator::S(k) => {
                debug_assert!(k <= 2);
                (n + k as u32) as usize
            }
        }
    }

    /// All generators in slot order.
    pub fn all(n: u32) -> impl Iterator<Item = Generator> {
        (1..=n).map(Generator::T).chain((0..3).map(Generator::S))
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Generator::T(i) => write!(f, "T^{i}"),
            Generator::S(k) => write!(f, "S^{k}"),
        }
    }
}

impl FromStr for Generator {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("bad generator {s:?}"));
        let (head, exp) = s.trim().split_once('^').ok_or_else(bad)?;
        let exp: u32 = exp.parse().map_err(|_| bad())?;
        match head {
            "T" if exp >= 1 => Ok(Generator::T(exp)),
            "S" if exp <= 2 => Ok(Generator::S(exp as u8)),
            _ => Err(bad()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlphabetEntry {
    pub base_key: CosetKey,
    pub generator: Generator,
    pub value: Mat2,
}

/// `𝒰 = {U(t, T^i) : 1 ≤ i ≤ N} ∪ {U(t, S^k) : 0 ≤ k ≤ 2}` over all members
/// `t` of the `SL2` transversal, laid out densely by (member, generator).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Alphabet {
    n: u32,
    entries: Vec<AlphabetEntry>,
}

impl Alphabet {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[AlphabetEntry] {
        &self.entries
    }

    /// Position of `U(member, gen)` in [`Alphabet::entries`].
    pub fn slot(&self, member: usize, gen: Generator) -> usize {
        member * (self.n as usize + 3) + gen.slot(self.n)
    }

    pub fn entry(
        &self,
        t: &Sl2Transversal,
        key: CosetKey,
        gen: Generator,
    ) -> Option<&AlphabetEntry> {
        t.index_of(key).map(|i| &self.entries[self.slot(i, gen)])
    }

    /// Rebuilds from stored values, recomputing each `U` to check it.
    pub fn from_entries(t: &Sl2Transversal, entries: Vec<AlphabetEntry>) -> Result<Self> {
        let built = schreier_alphabet(t);
        if built.entries != entries {
            let bad = built
                .entries
                .iter()
                .zip(&entries)
                .find(|(a, b)| a != b)
                .map(|(a, _)| format!("{} {}", a.base_key, a.generator))
                .unwrap_or_else(|| "length".into());
            return Err(Error::Cache(format!("alphabet entry mismatch at {bad}")));
        }
        Ok(built)
    }
}

pub fn schreier_alphabet(t: &Sl2Transversal) -> Alphabet {
    let n = t.modulus();
    let gens: Vec<(Generator, Mat2)> = Generator::all(n).map(|g| (g, g.matrix())).collect();
    let mut entries = Vec::with_capacity(t.len() * gens.len());
    for (key, member) in t.members() {
        for (g, gm) in &gens {
            let value = u_func(member, gm, t).expect("SL2 transversal covers every key");
            entries.push(AlphabetEntry {
                base_key: *key,
                generator: *g,
                value,
            });
        }
    }
    Alphabet { n, entries }
}

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::rational::Rational;
use crate::error::{Error, Result};

/// Integer polynomial, coefficients from the constant term upwards.
type IntPoly = Vec<i64>;

/// Divides `num` by the monic polynomial `den`, asserting an exact quotient.
fn div_exact_monic(num: &[i64], den: &[i64]) -> IntPoly {
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    debug_assert_eq!(den[dd], 1);
    let qlen = rem.len() - dd;
    let mut quot = vec![0i64; qlen];
    for i in (0..qlen).rev() {
        let c = rem[i + dd];
        quot[i] = c;
        if c != 0 {
            for (j, &dj) in den.iter().enumerate() {
                rem[i + j] -= c * dj;
            }
        }
    }
    debug_assert!(rem.iter().all(|&r| r == 0), "inexact cyclotomic division");
    quot
}

fn divisors(n: u32) -> Vec<u32> {
    (1..=n).filter(|d| n.is_multiple_of(*d)).collect()
}

/// The `order`-th cyclotomic polynomial `Φ_order`, low degree first.
///
/// Built by dividing `x^d - 1` by `Φ_e` for every proper divisor `e` of `d`,
/// for each divisor `d` of `order` in increasing order.
pub fn cyclotomic_polynomial(order: u32) -> Vec<i64> {
    assert!(order >= 1, "cyclotomic order must be positive");
    let mut known: HashMap<u32, IntPoly> = HashMap::new();
    for d in divisors(order) {
        let mut poly = vec![0i64; d as usize + 1];
        poly[0] = -1;
        poly[d as usize] = 1;
        for e in divisors(d) {
            if e < d {
                poly = div_exact_monic(&poly, &known[&e]);
            }
        }
        known.insert(d, poly);
    }
    known.remove(&order).unwrap()
}

/// Reduction tables for `Q(ζ_L)`: `powers[k]` holds `x^k mod Φ_L` for `k < L`.
#[derive(Debug)]
struct FieldTables {
    degree: usize,
    powers: Vec<IntPoly>,
}

impl FieldTables {
    fn build(order: u32) -> Self {
        let phi = cyclotomic_polynomial(order);
        let degree = phi.len() - 1;
        let mut powers = Vec::with_capacity(order as usize);
        let mut cur = vec![0i64; degree];
        cur[0] = 1;
        for _ in 0..order {
            powers.push(cur.clone());
            // multiply by x, then fold the x^degree term back
            let top = cur[degree - 1];
            for i in (1..degree).rev() {
                cur[i] = cur[i - 1];
            }
            cur[0] = 0;
            if top != 0 {
                for i in 0..degree {
                    cur[i] -= top * phi[i];
                }
            }
        }
        FieldTables { degree, powers }
    }

    fn power(&self, k: usize) -> &[i64] {
        &self.powers[k % self.powers.len()]
    }
}

fn tables(order: u32) -> Arc<FieldTables> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Arc<FieldTables>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(t) = cache.lock().unwrap().get(&order) {
        return t.clone();
    }
    let built = Arc::new(FieldTables::build(order));
    cache.lock().unwrap().entry(order).or_insert(built).clone()
}

/// Element of `Q(ζ_L)` stored as `Σ coeffs[k] ζ_L^k` reduced modulo `Φ_L`.
///
/// The representation is canonical, so derived equality is field equality
/// for elements of the same order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CycElem {
    order: u32,
    coeffs: Vec<Rational>,
}

/// `ζ_L^{k mod L}` in canonical form.
pub fn root_of_unity(order: u32, k: i64) -> CycElem {
    assert!(order >= 1, "cyclotomic order must be positive");
    let t = tables(order);
    let k = k.rem_euclid(order as i64) as usize;
    CycElem {
        order,
        coeffs: t
            .power(k)
            .iter()
            .map(|&c| Rational::from_integer(c.into()))
            .collect(),
    }
}

impl CycElem {
    pub fn zero(order: u32) -> Self {
        assert!(order >= 1, "cyclotomic order must be positive");
        let degree = tables(order).degree;
        CycElem {
            order,
            coeffs: vec![Rational::zero(); degree],
        }
    }

    pub fn one(order: u32) -> Self {
        root_of_unity(order, 0)
    }

    pub fn from_rational(order: u32, r: Rational) -> Self {
        let mut e = Self::zero(order);
        e.coeffs[0] = r;
        e
    }

    /// Builds `(Σ_k sums[k] ζ_L^k) / denom` where `sums` is indexed by exponent.
    pub fn from_exponent_sums(order: u32, sums: &[BigInt], denom: &BigInt) -> Self {
        let t = tables(order);
        let mut acc = vec![BigInt::zero(); t.degree];
        for (k, s) in sums.iter().enumerate() {
            if s.is_zero() {
                continue;
            }
            for (a, &p) in acc.iter_mut().zip(t.power(k)) {
                if p != 0 {
                    *a += s * p;
                }
            }
        }
        CycElem {
            order,
            coeffs: acc
                .into_iter()
                .map(|n| Rational::new(n, denom.clone()))
                .collect(),
        }
    }

    /// Rebuilds an element from canonical coefficients.
    pub fn from_coeffs(order: u32, coeffs: Vec<Rational>) -> Result<Self> {
        let degree = tables(order).degree;
        if coeffs.len() != degree {
            return Err(Error::InvalidInput(format!(
                "order {order} needs {degree} coefficients, got {}",
                coeffs.len()
            )));
        }
        Ok(CycElem { order, coeffs })
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    fn check_order(&self, other: &Self) -> Result<()> {
        if self.order != other.order {
            return Err(Error::OrderMismatch {
                left: self.order,
                right: other.order,
            });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_order(other)?;
        Ok(CycElem {
            order: self.order,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check_order(other)?;
        Ok(CycElem {
            order: self.order,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_order(other)?;
        let t = tables(self.order);
        let n = t.degree;
        let mut prod = vec![Rational::zero(); 2 * n - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    prod[i + j] += a * b;
                }
            }
        }
        Ok(self.reduce_monomials(&t, prod.into_iter().enumerate()))
    }

    /// Sums `c · x^k` for arbitrary `k`, reducing through the power table.
    fn reduce_monomials(
        &self,
        t: &FieldTables,
        terms: impl Iterator<Item = (usize, Rational)>,
    ) -> Self {
        let mut out = vec![Rational::zero(); t.degree];
        for (k, c) in terms {
            if c.is_zero() {
                continue;
            }
            for (o, &p) in out.iter_mut().zip(t.power(k)) {
                if p != 0 {
                    *o += &c * Rational::from_integer(p.into());
                }
            }
        }
        CycElem {
            order: self.order,
            coeffs: out,
        }
    }

    pub fn scale(&self, r: &Rational) -> Self {
        CycElem {
            order: self.order,
            coeffs: self.coeffs.iter().map(|c| c * r).collect(),
        }
    }

    pub fn scale_int(&self, n: &BigInt) -> Self {
        self.scale(&Rational::from_integer(n.clone()))
    }

    /// Complex conjugation, `ζ_L ↦ ζ_L^{L-1}`.
    pub fn conj(&self) -> Self {
        let t = tables(self.order);
        let l = self.order as usize;
        let terms = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| ((l - k) % l, c.clone()));
        self.reduce_monomials(&t, terms)
    }

    /// Re-expresses the element in `Q(ζ_M)` using `ζ_L = ζ_M^{M/L}`.
    pub fn embed(&self, target: u32) -> Result<Self> {
        if target == 0 || !target.is_multiple_of(self.order) {
            return Err(Error::NotDivisible {
                from: self.order,
                to: target,
            });
        }
        if target == self.order {
            return Ok(self.clone());
        }
        let step = (target / self.order) as usize;
        let t = tables(target);
        let shell = CycElem {
            order: target,
            coeffs: Vec::new(),
        };
        let terms = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| (k * step, c.clone()));
        Ok(shell.reduce_monomials(&t, terms))
    }

    /// Double-precision approximation `(re, im)`; display only.
    pub fn to_complex_approx(&self) -> (f64, f64) {
        let mut re = 0.0;
        let mut im = 0.0;
        for (k, c) in self.coeffs.iter().enumerate() {
            let v = c.to_f64().unwrap_or(f64::NAN);
            let theta = std::f64::consts::TAU * k as f64 / self.order as f64;
            re += v * theta.cos();
            im += v * theta.sin();
        }
        (re, im)
    }
}

impl fmt::Display for CycElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            let body = match (k, mag.is_one()) {
                (0, _) => format!("{mag}"),
                (1, true) => "z".to_string(),
                (1, false) => format!("{mag}*z"),
                (_, true) => format!("z^{k}"),
                (_, false) => format!("{mag}*z^{k}"),
            };
            match (first, c.is_negative()) {
                (true, false) => write!(f, "{body}")?,
                (true, true) => write!(f, "-{body}")?,
                (false, false) => write!(f, " + {body}")?,
                (false, true) => write!(f, " - {body}")?,
            }
            first = false;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl Add for &CycElem {
    type Output = CycElem;
    fn add(self, rhs: &CycElem) -> CycElem {
        self.try_add(rhs).expect("cyclotomic addition")
    }
}

impl Sub for &CycElem {
    type Output = CycElem;
    fn sub(self, rhs: &CycElem) -> CycElem {
        self.try_sub(rhs).expect("cyclotomic subtraction")
    }
}

impl Mul for &CycElem {
    type Output = CycElem;
    fn mul(self, rhs: &CycElem) -> CycElem {
        self.try_mul(rhs).expect("cyclotomic multiplication")
    }
}

impl Neg for &CycElem {
    type Output = CycElem;
    fn neg(self) -> CycElem {
        CycElem {
            order: self.order,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl AddAssign<&CycElem> for CycElem {
    fn add_assign(&mut self, rhs: &CycElem) {
        assert_eq!(self.order, rhs.order, "cyclotomic order mismatch");
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a += b;
        }
    }
}

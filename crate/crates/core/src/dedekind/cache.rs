//! Versioned JSON form of a [`Context`].

use std::fs;
use std::path::Path;

use num_bigint::BigInt;
use num_traits::Signed;
use serde::{Deserialize, Serialize};

use super::{check_pair, naive_sum, warn_parity, Context};
use crate::characters::{common_order, CharacterSpec, DirichletCharacter};
use crate::cosets::{
    Alphabet, AlphabetEntry, CosetKey, Gamma0Transversal, Generator, Sl2Transversal,
};
use crate::error::{Error, Result};
use crate::exactnum::{format_rational, parse_rational, CycElem};
use crate::modgroup::Mat2;

pub const CACHE_VERSION: u32 = 1;

/// Alphabet sums recomputed with the defining sum when a cache is loaded.
const SPOT_CHECKS: usize = 5;

#[derive(Serialize, Deserialize)]
struct GeneratorValue {
    g: u32,
    v: String,
}

#[derive(Serialize, Deserialize)]
struct G0Member {
    d: u32,
    m: [String; 4],
}

#[derive(Serialize, Deserialize)]
struct Sl2Member {
    key: String,
    m: [String; 4],
}

#[derive(Serialize, Deserialize)]
struct G0Sum {
    d: u32,
    v: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct AlphabetSum {
    key: String,
    gen: String,
    m: [String; 4],
    v: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct CacheFile {
    version: u32,
    q1: u32,
    q2: u32,
    chi1: Vec<GeneratorValue>,
    chi2: Vec<GeneratorValue>,
    #[serde(rename = "L")]
    order: u32,
    t_g0: Vec<G0Member>,
    t_sl2: Vec<Sl2Member>,
    sums_g0: Vec<G0Sum>,
    sums_alphabet: Vec<AlphabetSum>,
}

fn bad(msg: impl Into<String>) -> Error {
    Error::Cache(msg.into())
}

fn mat_out(m: &Mat2) -> [String; 4] {
    m.entries().map(|x| x.to_string())
}

fn mat_in(m: &[String; 4]) -> Result<Mat2> {
    let mut e = Vec::with_capacity(4);
    for s in m {
        e.push(
            s.parse::<BigInt>()
                .map_err(|_| bad(format!("bad matrix entry {s:?}")))?,
        );
    }
    let [a, b, c, d]: [BigInt; 4] = e.try_into().unwrap();
    Mat2::new(a, b, c, d).map_err(|e| bad(e.to_string()))
}

fn elem_out(x: &CycElem) -> Vec<String> {
    x.coeffs().iter().map(format_rational).collect()
}

fn elem_in(order: u32, v: &[String]) -> Result<CycElem> {
    let coeffs = v
        .iter()
        .map(|s| parse_rational(s))
        .collect::<Result<Vec<_>>>()?;
    CycElem::from_coeffs(order, coeffs).map_err(|e| bad(e.to_string()))
}

fn chi_out(chi: &DirichletCharacter) -> Vec<GeneratorValue> {
    chi.generator_values()
        .iter()
        .map(|(g, v)| GeneratorValue {
            g: *g,
            v: format_rational(v),
        })
        .collect()
}

fn chi_in(modulus: u32, values: &[GeneratorValue]) -> Result<DirichletCharacter> {
    let assignments = values
        .iter()
        .map(|gv| Ok((gv.g as i64, parse_rational(&gv.v)?)))
        .collect::<Result<Vec<_>>>()?;
    let chi = CharacterSpec {
        modulus,
        assignments,
    }
    .resolve()?;
    if chi_out(&chi)
        .iter()
        .map(|x| (x.g, &x.v))
        .ne(values.iter().map(|x| (x.g, &x.v)))
    {
        return Err(bad(format!(
            "character values for modulus {modulus} are not canonical"
        )));
    }
    Ok(chi)
}

impl Context {
    pub fn to_json(&self) -> String {
        let file = CacheFile {
            version: CACHE_VERSION,
            q1: self.chi1.modulus(),
            q2: self.chi2.modulus(),
            chi1: chi_out(&self.chi1),
            chi2: chi_out(&self.chi2),
            order: self.order,
            t_g0: self
                .t_g0
                .iter()
                .map(|(d, m)| G0Member { d, m: mat_out(m) })
                .collect(),
            t_sl2: self
                .t_sl2
                .members()
                .iter()
                .map(|(k, m)| Sl2Member {
                    key: k.to_string(),
                    m: mat_out(m),
                })
                .collect(),
            sums_g0: self
                .t_g0
                .iter()
                .map(|(d, _)| G0Sum {
                    d,
                    v: elem_out(self.g0_sum(d).unwrap()),
                })
                .collect(),
            sums_alphabet: self
                .alphabet
                .entries()
                .iter()
                .zip(&self.sums_alphabet)
                .map(|(e, v)| AlphabetSum {
                    key: e.base_key.to_string(),
                    gen: e.generator.to_string(),
                    m: mat_out(&e.value),
                    v: elem_out(v),
                })
                .collect(),
        };
        serde_json::to_string(&file).expect("cache serialization")
    }

    /// Parses and validates a cache produced by [`Context::to_json`].
    pub fn from_json(text: &str) -> Result<Self> {
        let file: CacheFile = serde_json::from_str(text).map_err(|e| bad(e.to_string()))?;
        if file.version != CACHE_VERSION {
            return Err(bad(format!("unsupported cache version {}", file.version)));
        }
        let chi1 = chi_in(file.q1, &file.chi1)?;
        let chi2 = chi_in(file.q2, &file.chi2)?;
        let level = check_pair(&chi1, &chi2, u32::MAX)?;
        warn_parity(&chi1, &chi2);
        let order = common_order(&chi1, &chi2);
        if file.order != order {
            return Err(bad(format!(
                "stored order {} differs from {order}",
                file.order
            )));
        }

        let g0_members = file
            .t_g0
            .iter()
            .map(|g| Ok((g.d, mat_in(&g.m)?)))
            .collect::<Result<Vec<_>>>()?;
        let t_g0 =
            Gamma0Transversal::from_members(level, g0_members).map_err(|e| bad(e.to_string()))?;
        let sl2_members = file
            .t_sl2
            .iter()
            .map(|s| Ok((s.key.parse::<CosetKey>()?, mat_in(&s.m)?)))
            .collect::<Result<Vec<_>>>()?;
        let t_sl2 =
            Sl2Transversal::from_members(level, sl2_members).map_err(|e| bad(e.to_string()))?;

        let entries = file
            .sums_alphabet
            .iter()
            .map(|s| {
                Ok(AlphabetEntry {
                    base_key: s.key.parse()?,
                    generator: s.gen.parse::<Generator>()?,
                    value: mat_in(&s.m)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let alphabet = Alphabet::from_entries(&t_sl2, entries)?;
        let sums_alphabet = file
            .sums_alphabet
            .iter()
            .map(|s| elem_in(order, &s.v))
            .collect::<Result<Vec<_>>>()?;
        for (e, v) in alphabet.entries().iter().zip(&sums_alphabet) {
            if e.generator == Generator::S(0) && !v.is_zero() {
                return Err(bad(format!("nonzero sum for U({}, S^0)", e.base_key)));
            }
        }

        let mut sums_g0 = vec![None; level as usize];
        for s in &file.sums_g0 {
            if t_g0.get(s.d).is_none() || sums_g0.get(s.d as usize).is_some_and(Option::is_some) {
                return Err(bad(format!("unexpected or repeated sum for d = {}", s.d)));
            }
            sums_g0[s.d as usize] = Some(elem_in(order, &s.v)?);
        }
        if sums_g0.iter().flatten().count() != t_g0.len() {
            return Err(bad("missing Γ0 transversal sums"));
        }

        let checkable: Vec<usize> = alphabet
            .entries()
            .iter()
            .enumerate()
            .filter(|(_, e)| e.value.c().is_positive())
            .map(|(i, _)| i)
            .collect();
        let stride = (checkable.len() / SPOT_CHECKS).max(1);
        for &i in checkable.iter().step_by(stride).take(SPOT_CHECKS) {
            let e = &alphabet.entries()[i];
            if naive_sum(&chi1, &chi2, &e.value)? != sums_alphabet[i] {
                return Err(bad(format!(
                    "stored sum for U({}, {}) disagrees with the defining sum",
                    e.base_key, e.generator
                )));
            }
        }

        Ok(Context {
            chi1,
            chi2,
            level,
            order,
            t_g0,
            t_sl2,
            alphabet,
            sums_g0,
            sums_alphabet,
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json()).map_err(|e| bad(format!("{}: {e}", path.display())))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| bad(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }
}

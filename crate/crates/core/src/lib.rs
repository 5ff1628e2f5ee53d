//! Exact evaluation of generalized Dedekind sums `S_{χ1,χ2}(γ)` for
//! `γ ∈ Γ0(q1·q2)`.
//!
//! The fast path splits `γ` into a `Γ1(N)` part and a `Γ0` transversal
//! member, writes the `Γ1` part as `±T^{a1} S T^{a2} … T^{ar}`, rewrites that
//! word over a finite alphabet of Schreier-type generators and sums cached
//! values of the alphabet. Cost is linear in the word length, which is
//! logarithmic in the lower-left entry. The defining double sum is kept as an
//! exact oracle ([`dedekind::naive_sum`]).
//!
//! ```
//! use gdsum_core::{characters::CharacterSpec, dedekind::Context, modgroup::Mat2};
//!
//! let chi = CharacterSpec::parse("q=3").unwrap().resolve().unwrap();
//! let ctx = Context::precompute(&chi, &chi).unwrap();
//! let gamma: Mat2 = "17,32;9,17".parse().unwrap();
//! assert!(ctx.fast_sum(&gamma).unwrap().is_zero());
//! ```

pub mod characters;
pub mod cosets;
pub mod dedekind;
pub mod error;
pub mod exactnum;
pub mod modgroup;
pub mod rewriter;
pub mod sampling;

pub use error::{Error, Result};

//! Exact aggregation of equality ILPs into a single knapsack equation, and
//! bin packing instances whose unique optimal packing needs `2^d' - 1`
//! distinct configurations.
//!
//! * [`model`] and [`format`]: ILPs, knapsack equations, bin packing
//!   instances and their text formats.
//! * [`aggregation`]: slack extension, the modulus `M` and power weighting.
//! * [`gadget`]: the constraint system whose solutions are the binary
//!   encodings of an exponent `i` together with `r(d) = γ^i`.
//! * [`hard_instance`]: the point set, its target vector and the bin packing
//!   instance built from the gadget.
//! * [`verifier`]: brute-force oracles that check all of the above.
//!
//! The guide under `book/` walks through each piece; its code blocks are
//! compiled and run as doc-tests of this crate.

pub mod aggregation;
pub mod enumerate;
pub mod error;
pub mod format;
pub mod gadget;
pub mod hard_instance;
pub mod model;
pub mod verifier;

pub use error::{Error, Result};
pub use num_bigint::BigInt;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/data-model.md")]
    mod data_model {}
    #[doc = include_str!("../../../book/src/aggregation.md")]
    mod aggregation {}
    #[doc = include_str!("../../../book/src/gadget.md")]
    mod gadget {}
    #[doc = include_str!("../../../book/src/hard-instance.md")]
    mod hard_instance {}
    #[doc = include_str!("../../../book/src/verification.md")]
    mod verification {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}

//! Scalar coefficients for the algebra core.
//!
//! Everything generic in this crate is written against [`Scalar`], a bundle
//! of `num-traits` bounds satisfied by exact rationals as well as by `f32`
//! and `f64`. The canonical instantiation is [`crate::Rat`] (arbitrary
//! precision rationals); all golden values are computed there, where
//! arithmetic is exact and cancellation is decidable.

use std::fmt;

use num::traits::{FromPrimitive, Signed};

/// Field-like scalar: ring and division operations, signs, and conversion
/// from small integers (used for derivatives and Taylor factorials).
pub trait Scalar: Signed + Clone + FromPrimitive + PartialEq + fmt::Debug + fmt::Display {
    /// Embeds a small signed integer.
    fn from_int(n: i64) -> Self {
        Self::from_i64(n).expect("integer embeds into scalar")
    }
}

impl<T> Scalar for T where T: Signed + Clone + FromPrimitive + PartialEq + fmt::Debug + fmt::Display {}

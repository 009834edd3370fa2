//! The Z2^n degree lattice.
//!
//! A degree is an n-tuple of bits. The mod-2 scalar product between degrees
//! drives every sign in the graded algebra; the standard enumeration order
//! (even degrees lexicographically, then odd ones) indexes graded dimensions.

use std::fmt;

use crate::error::{Error, Result};

/// An element of Z2^n: a fixed-length vector of bits.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Degree {
    bits: Vec<u8>,
}

impl Degree {
    /// Builds a degree from bits, normalizing entries mod 2.
    pub fn new(bits: impl Into<Vec<u8>>) -> Self {
        let mut bits = bits.into();
        assert!(!bits.is_empty(), "degree rank must be at least 1");
        for b in &mut bits {
            *b %= 2;
        }
        Degree { bits }
    }

    /// The zero degree of rank `n`.
    pub fn zero(n: usize) -> Self {
        assert!(n >= 1, "degree rank must be at least 1");
        Degree { bits: vec![0; n] }
    }

    /// Parses a bit-string such as `"011"`.
    pub fn parse(s: &str) -> Result<Self> {
        if s.is_empty() {
            return Err(Error::Declaration("empty degree bit-string".into()));
        }
        let mut bits = Vec::with_capacity(s.len());
        for (i, c) in s.chars().enumerate() {
            match c {
                '0' => bits.push(0),
                '1' => bits.push(1),
                _ => {
                    return Err(Error::Parse {
                        pos: i,
                        msg: format!("invalid degree bit `{c}`"),
                    })
                }
            }
        }
        Ok(Degree { bits })
    }

    pub fn rank(&self) -> usize {
        self.bits.len()
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn is_zero(&self) -> bool {
        self.bits.iter().all(|&b| b == 0)
    }

    /// Componentwise sum mod 2.
    pub fn add(&self, other: &Degree) -> Result<Degree> {
        self.check_rank(other)?;
        Ok(Degree {
            bits: self
                .bits
                .iter()
                .zip(&other.bits)
                .map(|(a, b)| (a + b) % 2)
                .collect(),
        })
    }

    /// The mod-2 scalar product `<a, b>` of the generalized sign rule.
    pub fn scalar_product(&self, other: &Degree) -> Result<u8> {
        self.check_rank(other)?;
        Ok(self
            .bits
            .iter()
            .zip(&other.bits)
            .map(|(a, b)| a * b)
            .sum::<u8>()
            % 2)
    }

    /// A degree is even iff it has an even number of 1-entries,
    /// equivalently `<a, a> = 0`.
    pub fn is_even(&self) -> bool {
        self.bits.iter().sum::<u8>() % 2 == 0
    }

    fn check_rank(&self, other: &Degree) -> Result<()> {
        if self.rank() != other.rank() {
            return Err(Error::RankMismatch(self.rank(), other.rank()));
        }
        Ok(())
    }
}

impl fmt::Display for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.bits {
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// All `2^n` degrees in standard order: even degrees lexicographically
/// (reading bit-vectors left to right with 0 < 1), then odd ones.
pub fn standard_order(n: usize) -> Vec<Degree> {
    assert!(n >= 1, "rank must be at least 1");
    let mut all: Vec<Degree> = (0..(1usize << n))
        .map(|mask| {
            // Lexicographic order on bit-vectors equals numeric order of the
            // mask when the leftmost bit is the highest one.
            let bits: Vec<u8> = (0..n).map(|i| ((mask >> (n - 1 - i)) & 1) as u8).collect();
            Degree { bits }
        })
        .collect();
    all.sort_by_key(|d| (!d.is_even(), d.bits.clone()));
    all
}

/// The nonzero degrees in standard order; they index `GradedDimension::q`.
pub fn nonzero_degrees(n: usize) -> Vec<Degree> {
    standard_order(n).into_iter().filter(|d| !d.is_zero()).collect()
}

/// A graded dimension `p|q`: `p` degree-0 coordinates and one formal
/// parameter count per nonzero degree in standard order.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GradedDimension {
    pub p: usize,
    pub q: Vec<usize>,
}

impl GradedDimension {
    pub fn new(rank: usize, p: usize, q: Vec<usize>) -> Result<Self> {
        let expected = (1usize << rank) - 1;
        if q.len() != expected {
            return Err(Error::Declaration(format!(
                "dimension q must have {expected} entries for rank {rank}, got {}",
                q.len()
            )));
        }
        Ok(GradedDimension { p, q })
    }

    /// Total formal-parameter count `|q|`.
    pub fn total_params(&self) -> usize {
        self.q.iter().sum()
    }

    /// Componentwise sum, used by product domains.
    pub fn sum(&self, other: &GradedDimension) -> Result<GradedDimension> {
        if self.q.len() != other.q.len() {
            return Err(Error::RankMismatch(self.q.len(), other.q.len()));
        }
        Ok(GradedDimension {
            p: self.p + other.p,
            q: self.q.iter().zip(&other.q).map(|(a, b)| a + b).collect(),
        })
    }
}

impl fmt::Display for GradedDimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}|(", self.p)?;
        for (i, qi) in self.q.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{qi}")?;
        }
        write!(f, ")")
    }
}

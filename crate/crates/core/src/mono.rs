//! Exponent vectors shared by polynomial monomials and parameter
//! multi-indices, ordered by graded lexicographic comparison.

use std::cmp::Ordering;
use std::fmt;

/// A vector of exponents over a fixed, ordered symbol list.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Exponents(Vec<u16>);

impl Exponents {
    pub fn new(e: Vec<u16>) -> Self {
        Exponents(e)
    }

    /// The constant monomial over `n` symbols.
    pub fn zero(n: usize) -> Self {
        Exponents(vec![0; n])
    }

    /// The monomial `symbol_i^1`.
    pub fn unit(n: usize, i: usize) -> Self {
        let mut e = vec![0; n];
        e[i] = 1;
        Exponents(e)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, i: usize) -> u16 {
        self.0[i]
    }

    pub fn exponents(&self) -> &[u16] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    /// Total degree.
    pub fn total(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }

    /// Product of monomials: componentwise sum.
    pub fn mul(&self, other: &Exponents) -> Exponents {
        debug_assert_eq!(self.0.len(), other.0.len());
        Exponents(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// Exact monomial quotient, if `other` divides `self`.
    pub fn div(&self, other: &Exponents) -> Option<Exponents> {
        debug_assert_eq!(self.0.len(), other.0.len());
        let mut out = Vec::with_capacity(self.0.len());
        for (a, b) in self.0.iter().zip(&other.0) {
            if a < b {
                return None;
            }
            out.push(a - b);
        }
        Some(Exponents(out))
    }

    /// Sets the exponent of symbol `i` to zero.
    pub fn without(&self, i: usize) -> Exponents {
        let mut e = self.0.clone();
        e[i] = 0;
        Exponents(e)
    }

    pub fn with(&self, i: usize, v: u16) -> Exponents {
        let mut e = self.0.clone();
        e[i] = v;
        Exponents(e)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, u16)> + '_ {
        self.0.iter().copied().enumerate().filter(|&(_, e)| e > 0)
    }
}

impl Ord for Exponents {
    fn cmp(&self, other: &Self) -> Ordering {
        self.total()
            .cmp(&other.total())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Exponents {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Exponents {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graded_lex_order() {
        let a = Exponents::new(vec![2, 1]); // total 3
        let b = Exponents::new(vec![3, 0]); // total 3, lex larger
        let c = Exponents::new(vec![0, 2]); // total 2
        assert!(c < a);
        assert!(a < b);
    }

    #[test]
    fn division() {
        let a = Exponents::new(vec![2, 1]);
        let b = Exponents::new(vec![1, 1]);
        assert_eq!(a.div(&b), Some(Exponents::new(vec![1, 0])));
        assert_eq!(b.div(&a), None);
    }
}

//! Rational functions in the degree-0 coordinates: the exact coefficient
//! field standing in for smooth functions on a chart domain.
//!
//! Canonical form: the fraction is reduced by the monic gcd and the
//! denominator is made monic under graded lex order, so equality is
//! coefficient-wise equality.

use std::fmt;


use crate::error::{Error, Result};
use crate::poly::{Polynomial, VarSet};
use crate::scalar::Scalar;

/// A reduced fraction of multivariate polynomials.
#[derive(Clone, PartialEq, Eq)]
pub struct RatFn<S: Scalar> {
    num: Polynomial<S>,
    den: Polynomial<S>,
}

impl<S: Scalar> RatFn<S> {
    /// Builds `num / den` in canonical form.
    pub fn new(num: Polynomial<S>, den: Polynomial<S>) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let mut f = RatFn { num, den };
        f.canonicalize();
        Ok(f)
    }

    pub fn from_poly(p: Polynomial<S>) -> Self {
        let den = Polynomial::one(p.vars());
        RatFn { num: p, den }
    }

    pub fn zero(vars: &VarSet) -> Self {
        Self::from_poly(Polynomial::zero(vars))
    }

    pub fn one(vars: &VarSet) -> Self {
        Self::from_poly(Polynomial::one(vars))
    }

    pub fn constant(vars: &VarSet, c: S) -> Self {
        Self::from_poly(Polynomial::constant(vars, c))
    }

    pub fn from_int(vars: &VarSet, n: i64) -> Self {
        Self::from_poly(Polynomial::from_int(vars, n))
    }

    pub fn var(vars: &VarSet, i: usize) -> Self {
        Self::from_poly(Polynomial::var(vars, i))
    }

    pub fn numerator(&self) -> &Polynomial<S> {
        &self.num
    }

    pub fn denominator(&self) -> &Polynomial<S> {
        &self.den
    }

    pub fn vars(&self) -> &VarSet {
        self.num.vars()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.den.is_constant() && self.num == Polynomial::one(self.num.vars())
    }

    /// Formal invertibility: nonzero in the fraction field.
    pub fn is_invertible(&self) -> bool {
        !self.num.is_zero()
    }

    fn canonicalize(&mut self) {
        if self.num.is_zero() {
            self.den = Polynomial::one(self.num.vars());
            return;
        }
        let g = Polynomial::gcd(&self.num, &self.den);
        if !g.is_constant() {
            self.num = self.num.div_exact(&g).expect("gcd divides");
            self.den = self.den.div_exact(&g).expect("gcd divides");
        }
        // Monic denominator: its leading coefficient becomes 1 (positive).
        let (_, lc) = self.den.leading_term().expect("nonzero denominator");
        let inv = S::one() / lc.clone();
        self.num = self.num.scale(&inv);
        self.den = self.den.scale(&inv);
    }

    pub fn add(&self, other: &Self) -> Self {
        let num = self
            .num
            .mul(&other.den)
            .add(&other.num.mul(&self.den));
        let den = self.den.mul(&other.den);
        Self::new(num, den).expect("nonzero denominators")
    }

    pub fn neg(&self) -> Self {
        RatFn {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let num = self.num.mul(&other.num);
        let den = self.den.mul(&other.den);
        Self::new(num, den).expect("nonzero denominators")
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        if other.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Self::new(self.num.mul(&other.den), self.den.mul(&other.num))
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Self::new(self.den.clone(), self.num.clone())
    }

    pub fn scale(&self, c: &S) -> Self {
        Self::new(self.num.scale(c), self.den.clone()).expect("nonzero denominator")
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut out = Self::one(self.vars());
        for _ in 0..n {
            out = out.mul(self);
        }
        out
    }

    /// Exact partial derivative via the quotient rule.
    pub fn derivative(&self, v: usize) -> Self {
        let num = self
            .num
            .derivative(v)
            .mul(&self.den)
            .sub(&self.num.mul(&self.den.derivative(v)));
        let den = self.den.mul(&self.den);
        Self::new(num, den).expect("nonzero denominator")
    }

    /// Exact evaluation; errors with `Pole` when the denominator vanishes.
    pub fn evaluate(&self, point: &[S]) -> Result<S> {
        let d = self.den.evaluate(point);
        if d.is_zero() {
            return Err(Error::Pole);
        }
        Ok(self.num.evaluate(point) / d)
    }

    /// Substitutes rational functions (over `vars`) for the variables.
    pub fn compose(&self, vars: &VarSet, images: &[Self]) -> Result<Self> {
        let eval = |p: &Polynomial<S>| -> Self {
            let mut acc = Self::zero(vars);
            for (m, c) in p.terms() {
                let mut term = Self::constant(vars, c.clone());
                for (i, e) in m.iter() {
                    term = term.mul(&images[i].pow(e as u32));
                }
                acc = acc.add(&term);
            }
            acc
        };
        let den = eval(&self.den);
        if den.is_zero() {
            return Err(Error::Pole);
        }
        eval(&self.num).div(&den)
    }

    /// Renames variables into a larger set; `map[i]` is the new index.
    pub fn embed(&self, vars: &VarSet, map: &[usize]) -> Self {
        RatFn {
            num: self.num.embed(vars, map),
            den: self.den.embed(vars, map),
        }
    }

    pub fn sexpr(&self) -> String {
        if self.den.is_constant() {
            self.num.sexpr()
        } else {
            format!("(/ {} {})", self.num.sexpr(), self.den.sexpr())
        }
    }

}

impl<S: Scalar> fmt::Display for RatFn<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_constant() {
            return write!(f, "{}", self.num);
        }
        if self.num.num_terms() > 1 {
            write!(f, "({})", self.num)?;
        } else {
            write!(f, "{}", self.num)?;
        }
        // The canonical denominator is monic, so a one-term denominator is a
        // bare variable power product and may print without parentheses.
        if self.den.num_terms() > 1 {
            write!(f, "/({})", self.den)
        } else {
            write!(f, "/{}", self.den)
        }
    }
}

impl<S: Scalar> fmt::Debug for RatFn<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rat;

    type P = Polynomial<Rat>;
    type F = RatFn<Rat>;

    fn vars(names: &[&str]) -> VarSet {
        VarSet::new(names.iter().map(|s| s.to_string()).collect())
    }

    fn q(n: i64) -> Rat {
        Rat::from_int(n)
    }

    #[test]
    fn add_and_cancellation() {
        let vs = vars(&["x"]);
        let x = F::var(&vs, 0);
        assert_eq!(x.add(&x), x.scale(&q(2)));
        // mul(1/(1+x), 1+x) = 1
        let one_plus_x = F::from_poly(P::var(&vs, 0).add(&P::one(&vs)));
        let inv = one_plus_x.inv().unwrap();
        assert!(inv.mul(&one_plus_x).is_one());
        // x - x normalizes to 0, hence not invertible
        assert!(!x.sub(&x).is_invertible());
        assert!(F::from_poly(P::var(&vs, 0).pow(2).add(&P::one(&vs))).is_invertible());
    }

    #[test]
    fn derivative_quotient_rule() {
        let vs = vars(&["x"]);
        let x = F::var(&vs, 0);
        // d/dx (1/x) = -1/x^2
        let inv_x = x.inv().unwrap();
        let want = F::new(P::from_int(&vs, -1), P::var(&vs, 0).pow(2)).unwrap();
        assert_eq!(inv_x.derivative(0), want);
    }

    #[test]
    fn evaluate_with_pole() {
        let vs = vars(&["x"]);
        let x = F::var(&vs, 0);
        let f = F::one(&vs)
            .div(&x.mul(&x).add(&F::one(&vs)))
            .unwrap();
        // 1/(1+x^2) at x=1 is 1/2
        assert_eq!(f.evaluate(&[q(1)]).unwrap(), q(1) / q(2));
        let g = F::one(&vs).div(&x).unwrap();
        assert_eq!(g.evaluate(&[q(0)]), Err(Error::Pole));
    }

    #[test]
    fn canonical_denominator_is_monic() {
        let vs = vars(&["x"]);
        let x = P::var(&vs, 0);
        // (1+x)/(1-x) -> (-x-1)/(x-1)
        let f = F::new(x.add(&P::one(&vs)), P::one(&vs).sub(&x)).unwrap();
        assert_eq!(f.to_string(), "(-x - 1)/(x - 1)");
        let back = F::new(x.neg().sub(&P::one(&vs)), x.sub(&P::one(&vs))).unwrap();
        assert_eq!(f, back);
    }

    #[test]
    fn display_forms() {
        let vs = vars(&["x"]);
        let x = P::var(&vs, 0);
        let f = F::new(P::one(&vs), x.pow(2).add(&P::one(&vs))).unwrap();
        assert_eq!(f.to_string(), "1/(x^2 + 1)");
        let g = F::new(P::one(&vs), x.pow(2)).unwrap();
        assert_eq!(g.to_string(), "1/x^2");
    }
}

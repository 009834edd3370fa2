//! Graded right fractions and the localization map.
//!
//! Denominators come from a multiplicative set of even homogeneous
//! sections; in the structure-sheaf model they have degree exactly 0 and a
//! formally invertible base part, which makes every sign in the fraction
//! calculus vanish and lets the localization map resolve fractions inside
//! the section algebra itself.

use std::fmt;

use crate::degree::Degree;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::section::{same_system, Section};

/// A right fraction `numerator * denominator^{-1}`.
#[derive(Clone, PartialEq, Debug)]
pub struct GradedFraction<S: Scalar> {
    num: Section<S>,
    den: Section<S>,
}

/// Admissibility of a denominator: even homogeneous and nonzero.
fn check_even_denominator<S: Scalar>(den: &Section<S>) -> Result<Degree> {
    if den.is_zero() {
        return Err(Error::InadmissibleDenominator("zero section".into()));
    }
    match den.degree() {
        Some(d) if d.is_even() => Ok(d),
        Some(d) => Err(Error::InadmissibleDenominator(format!(
            "degree {d} is odd"
        ))),
        None => Err(Error::InadmissibleDenominator(
            "not homogeneous".into(),
        )),
    }
}

/// The structure-sheaf condition: degree exactly 0 with invertible base.
fn check_section_multiplicative<S: Scalar>(den: &Section<S>) -> Result<()> {
    let d = check_even_denominator(den)?;
    if !d.is_zero() {
        return Err(Error::InadmissibleDenominator(format!(
            "degree {d} is nonzero"
        )));
    }
    if !den.epsilon().is_invertible() {
        return Err(Error::NotInvertible);
    }
    Ok(())
}

impl<S: Scalar> GradedFraction<S> {
    /// Builds a fraction; the denominator must be even homogeneous.
    pub fn new(num: Section<S>, den: Section<S>) -> Result<Self> {
        if !same_system(num.system(), den.system()) {
            return Err(Error::SystemMismatch);
        }
        check_even_denominator(&den)?;
        Ok(GradedFraction { num, den })
    }

    /// Embeds a section as the fraction `f * 1^{-1}`.
    pub fn embed(f: Section<S>) -> Self {
        let one = Section::one(f.system());
        GradedFraction { num: f, den: one }
    }

    pub fn numerator(&self) -> &Section<S> {
        &self.num
    }

    pub fn denominator(&self) -> &Section<S> {
        &self.den
    }

    /// The degree of a fraction with homogeneous numerator is the degree of
    /// the numerator.
    pub fn degree(&self) -> Option<Degree> {
        self.num.degree()
    }

    fn check(&self, other: &Self) -> Result<()> {
        if !same_system(self.num.system(), other.num.system()) {
            return Err(Error::SystemMismatch);
        }
        Ok(())
    }

    /// Tests `(r s' - (-1)^{<s,s'>} r' s) sigma = 0` for a caller-supplied
    /// witness `sigma` from the multiplicative set.
    pub fn equivalent(&self, other: &Self, sigma: &Section<S>) -> Result<bool> {
        self.check(other)?;
        if !same_system(sigma.system(), self.num.system()) {
            return Err(Error::SystemMismatch);
        }
        check_even_denominator(sigma)?;
        let s = check_even_denominator(&self.den)?;
        let s2 = check_even_denominator(&other.den)?;
        let sign = s.scalar_product(&s2)?;
        let mut cross = other.num.mul(&self.den)?;
        if sign == 1 {
            cross = cross.neg();
        }
        let diff = self.num.mul(&other.den)?.sub(&cross)?;
        Ok(diff.mul(sigma)?.is_zero())
    }

    /// Equivalence with the default witness `sigma = 1`.
    pub fn equivalent_default(&self, other: &Self) -> Result<bool> {
        self.equivalent(other, &Section::one(self.num.system()))
    }

    /// `r s^{-1} + r' s'^{-1} = (r s' + (-1)^{<s,s'>} r' s)(s s')^{-1}`.
    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let s = check_even_denominator(&self.den)?;
        let s2 = check_even_denominator(&other.den)?;
        let sign = s.scalar_product(&s2)?;
        let mut right = other.num.mul(&self.den)?;
        if sign == 1 {
            right = right.neg();
        }
        let num = self.num.mul(&other.den)?.add(&right)?;
        let den = self.den.mul(&other.den)?;
        GradedFraction::new(num, den)
    }

    /// `r s^{-1} * r' s'^{-1} = (-1)^{<r'+s',s>} r r' (s s')^{-1}`, extended
    /// by linearity over the homogeneous components of `r'`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let s = check_even_denominator(&self.den)?;
        let s2 = check_even_denominator(&other.den)?;
        let den = self.den.mul(&other.den)?;
        let mut num = Section::zero(self.num.system());
        for (gamma, part) in other.num.degree_decompose() {
            let sign = gamma.add(&s2)?.scalar_product(&s)?;
            let mut term = self.num.mul(&part)?;
            if sign == 1 {
                term = term.neg();
            }
            num = num.add(&term)?;
        }
        GradedFraction::new(num, den)
    }

    pub fn neg(&self) -> Self {
        GradedFraction {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn scale_scalar(&self, c: &S) -> Self {
        GradedFraction {
            num: self.num.scale_scalar(c),
            den: self.den.clone(),
        }
    }
}

/// The localization map: resolves `F s^{-1}` to `F * s^{-1}` inside the
/// section algebra. Requires the structure-sheaf condition on the
/// denominator (degree 0, invertible base part).
pub fn lambda_map<S: Scalar>(fraction: &GradedFraction<S>) -> Result<Section<S>> {
    check_section_multiplicative(&fraction.den)?;
    fraction.num.mul(&fraction.den.invert()?)
}

impl<S: Scalar> fmt::Display for GradedFraction<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] / [{}]", self.num, self.den)
    }
}

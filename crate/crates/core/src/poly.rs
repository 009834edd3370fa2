//! Exact multivariate polynomials over a scalar field.
//!
//! Terms are kept in a `BTreeMap` under graded lexicographic order with
//! variables ordered by declaration, which fixes leading terms, canonical
//! forms, and printing once and for all.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;


use crate::error::{Error, Result};
use crate::mono::Exponents;
use crate::scalar::Scalar;

/// An ordered set of variable names shared by all polynomials of one domain.
#[derive(Clone, Debug, Eq)]
pub struct VarSet(Arc<Vec<String>>);

impl VarSet {
    pub fn new(names: Vec<String>) -> Self {
        VarSet(Arc::new(names))
    }

    pub fn empty() -> Self {
        VarSet(Arc::new(Vec::new()))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn name(&self, i: usize) -> &str {
        &self.0[i]
    }

    pub fn names(&self) -> &[String] {
        &self.0
    }

    pub fn index(&self, name: &str) -> Option<usize> {
        self.0.iter().position(|n| n == name)
    }
}

impl PartialEq for VarSet {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0 == other.0
    }
}

/// A multivariate polynomial with scalar coefficients.
///
/// Invariant: no explicit zero coefficients are stored.
#[derive(Clone, PartialEq, Eq)]
pub struct Polynomial<S: Scalar> {
    vars: VarSet,
    terms: BTreeMap<Exponents, S>,
}

impl<S: Scalar> Polynomial<S> {
    pub fn zero(vars: &VarSet) -> Self {
        Polynomial {
            vars: vars.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(vars: &VarSet, c: S) -> Self {
        let mut p = Self::zero(vars);
        if !c.is_zero() {
            p.terms.insert(Exponents::zero(vars.len()), c);
        }
        p
    }

    pub fn one(vars: &VarSet) -> Self {
        Self::constant(vars, S::one())
    }

    pub fn from_int(vars: &VarSet, n: i64) -> Self {
        Self::constant(vars, S::from_int(n))
    }

    /// The variable `x_i` as a polynomial.
    pub fn var(vars: &VarSet, i: usize) -> Self {
        assert!(i < vars.len());
        let mut p = Self::zero(vars);
        p.terms.insert(Exponents::unit(vars.len(), i), S::one());
        p
    }

    pub fn from_terms(vars: &VarSet, terms: impl IntoIterator<Item = (Exponents, S)>) -> Self {
        let mut p = Self::zero(vars);
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn vars(&self) -> &VarSet {
        &self.vars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &S)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.is_zero())
    }

    /// The constant coefficient.
    pub fn constant_term(&self) -> S {
        self.terms
            .get(&Exponents::zero(self.vars.len()))
            .cloned()
            .unwrap_or_else(S::zero)
    }

    pub fn coeff(&self, m: &Exponents) -> S {
        self.terms.get(m).cloned().unwrap_or_else(S::zero)
    }

    fn add_term(&mut self, m: Exponents, c: S) {
        if c.is_zero() {
            return;
        }
        match self.terms.remove(&m) {
            None => {
                self.terms.insert(m, c);
            }
            Some(old) => {
                let s = old + c;
                if !s.is_zero() {
                    self.terms.insert(m, s);
                }
            }
        }
    }

    fn assert_same_vars(&self, other: &Self) {
        assert!(
            self.vars == other.vars,
            "polynomials over different variable sets"
        );
    }

    pub fn add(&self, other: &Self) -> Self {
        self.assert_same_vars(other);
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        Polynomial {
            vars: self.vars.clone(),
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), -c.clone()))
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.assert_same_vars(other);
        let mut out = Self::zero(&self.vars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca.clone() * cb.clone());
            }
        }
        out
    }

    pub fn scale(&self, c: &S) -> Self {
        if c.is_zero() {
            return Self::zero(&self.vars);
        }
        Polynomial {
            vars: self.vars.clone(),
            terms: self
                .terms
                .iter()
                .map(|(m, k)| (m.clone(), k.clone() * c.clone()))
                .collect(),
        }
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut out = Self::one(&self.vars);
        for _ in 0..n {
            out = out.mul(self);
        }
        out
    }

    /// Leading monomial and coefficient under graded lex order.
    pub fn leading_term(&self) -> Option<(&Exponents, &S)> {
        self.terms.iter().next_back()
    }

    /// Scales the polynomial so its leading coefficient is 1.
    pub fn monic(&self) -> Self {
        match self.leading_term() {
            None => self.clone(),
            Some((_, lc)) => {
                let inv = S::one() / lc.clone();
                self.scale(&inv)
            }
        }
    }

    /// Exact polynomial quotient, or `None` when `d` does not divide `self`.
    pub fn div_exact(&self, d: &Self) -> Option<Self> {
        self.assert_same_vars(d);
        let (dm, dc) = d.leading_term()?;
        let mut rem = self.clone();
        let mut quot = Self::zero(&self.vars);
        while let Some((rm, rc)) = rem.leading_term() {
            let m = rm.div(dm)?;
            let c = rc.clone() / dc.clone();
            let mut t = Self::zero(&self.vars);
            t.terms.insert(m.clone(), c.clone());
            quot.add_term(m, c);
            rem = rem.sub(&t.mul(d));
        }
        Some(quot)
    }

    /// Exact partial derivative with respect to variable `v`.
    pub fn derivative(&self, v: usize) -> Self {
        assert!(v < self.vars.len());
        let mut out = Self::zero(&self.vars);
        for (m, c) in &self.terms {
            let e = m.get(v);
            if e > 0 {
                out.add_term(m.with(v, e - 1), c.clone() * S::from_int(e as i64));
            }
        }
        out
    }

    /// Evaluates at a full point, one scalar per variable.
    pub fn evaluate(&self, point: &[S]) -> S {
        assert_eq!(point.len(), self.vars.len());
        let mut acc = S::zero();
        for (m, c) in &self.terms {
            let mut term = c.clone();
            for (i, e) in m.iter() {
                for _ in 0..e {
                    term = term * point[i].clone();
                }
            }
            acc = acc + term;
        }
        acc
    }

    /// The highest exponent of variable `v`.
    pub fn degree_in(&self, v: usize) -> u16 {
        self.terms.keys().map(|m| m.get(v)).max().unwrap_or(0)
    }

    /// True if variable `v` occurs.
    pub fn uses_var(&self, v: usize) -> bool {
        self.terms.keys().any(|m| m.get(v) > 0)
    }

    /// Coefficients of `self` viewed as univariate in `v`, indexed by the
    /// exponent of `v`; coefficient polynomials do not use `v`.
    fn coeffs_in(&self, v: usize) -> BTreeMap<u16, Self> {
        let mut out: BTreeMap<u16, Self> = BTreeMap::new();
        for (m, c) in &self.terms {
            let e = m.get(v);
            out.entry(e)
                .or_insert_with(|| Self::zero(&self.vars))
                .add_term(m.without(v), c.clone());
        }
        out
    }

    /// Content with respect to `v`: the monic gcd of the `v`-coefficients.
    fn content_in(&self, v: usize) -> Self {
        let mut acc = Self::zero(&self.vars);
        for (_, c) in self.coeffs_in(v) {
            acc = Self::gcd(&acc, &c);
            if acc.is_constant() && !acc.is_zero() {
                break;
            }
        }
        acc
    }

    fn primitive_in(&self, v: usize) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let c = self.content_in(v);
        self.div_exact(&c).expect("content divides")
    }

    /// Pseudo-remainder of `f` by `g` in the variable `v`.
    fn pseudo_rem(f: &Self, g: &Self, v: usize) -> Self {
        let d = g.degree_in(v);
        let lc_g = g.coeffs_in(v).remove(&d).expect("nonzero divisor");
        let mut r = f.clone();
        while !r.is_zero() && r.degree_in(v) >= d {
            let e = r.degree_in(v);
            let lc_r = r.coeffs_in(v).remove(&e).expect("nonzero");
            let shift = Self::from_terms(
                &f.vars,
                [(Exponents::zero(f.vars.len()).with(v, e - d), S::one())],
            );
            r = r.mul(&lc_g).sub(&g.mul(&lc_r).mul(&shift));
        }
        r
    }

    /// Monic greatest common divisor, by the primitive Euclidean algorithm
    /// with recursion over the variables.
    pub fn gcd(a: &Self, b: &Self) -> Self {
        if a.is_zero() {
            return b.monic();
        }
        if b.is_zero() {
            return a.monic();
        }
        if a.is_constant() || b.is_constant() {
            return Self::one(&a.vars);
        }
        // Main variable: the highest-indexed variable in use.
        let v = (0..a.vars.len())
            .rev()
            .find(|&v| a.uses_var(v) || b.uses_var(v))
            .expect("nonconstant polynomial uses a variable");
        if !a.uses_var(v) || !b.uses_var(v) {
            // One side is free of v: the gcd divides the other's v-content.
            let (free, mixed) = if a.uses_var(v) { (b, a) } else { (a, b) };
            return Self::gcd(free, &mixed.content_in(v));
        }
        let ca = a.content_in(v);
        let cb = b.content_in(v);
        let cont = Self::gcd(&ca, &cb);
        let mut f = a.div_exact(&ca).expect("content divides");
        let mut g = b.div_exact(&cb).expect("content divides");
        if f.degree_in(v) < g.degree_in(v) {
            std::mem::swap(&mut f, &mut g);
        }
        while !g.is_zero() {
            let r = Self::pseudo_rem(&f, &g, v);
            f = g;
            g = if r.is_zero() { r } else { r.primitive_in(v) };
        }
        cont.mul(&f.primitive_in(v)).monic()
    }

    /// Substitutes `images[i]` for variable `i`; the images live over `vars`.
    pub fn compose_poly(&self, vars: &VarSet, images: &[Self]) -> Self {
        assert_eq!(images.len(), self.vars.len());
        let mut acc = Self::zero(vars);
        for (m, c) in &self.terms {
            let mut term = Self::constant(vars, c.clone());
            for (i, e) in m.iter() {
                term = term.mul(&images[i].pow(e as u32));
            }
            acc = acc.add(&term);
        }
        acc
    }

    /// Renames variables into a larger set: `map[i]` is the new index of
    /// old variable `i`.
    pub fn embed(&self, vars: &VarSet, map: &[usize]) -> Self {
        assert_eq!(map.len(), self.vars.len());
        let mut out = Self::zero(vars);
        for (m, c) in &self.terms {
            let mut e = vec![0u16; vars.len()];
            for (i, k) in m.iter() {
                e[map[i]] = k;
            }
            out.add_term(Exponents::new(e), c.clone());
        }
        out
    }

    /// Projects onto a smaller variable set; `map[i]` is the target index
    /// of variable `i`. Fails when a variable outside the map occurs.
    pub fn project(&self, vars: &VarSet, map: &[Option<usize>]) -> Option<Self> {
        assert_eq!(map.len(), self.vars.len());
        let mut out = Self::zero(vars);
        for (m, c) in &self.terms {
            let mut e = vec![0u16; vars.len()];
            for (i, k) in m.iter() {
                match map[i] {
                    Some(j) => e[j] = k,
                    None => return None,
                }
            }
            out.add_term(Exponents::new(e), c.clone());
        }
        Some(out)
    }

    /// Splits every monomial into the part over `left` variables and the
    /// part over the rest, returning grouped (left-mono, right-mono, coeff).
    pub fn split_monomials(&self, is_left: &[bool]) -> Vec<(Exponents, Exponents, S)> {
        assert_eq!(is_left.len(), self.vars.len());
        let n = self.vars.len();
        self.terms
            .iter()
            .map(|(m, c)| {
                let mut l = vec![0u16; n];
                let mut r = vec![0u16; n];
                for (i, e) in m.iter() {
                    if is_left[i] {
                        l[i] = e;
                    } else {
                        r[i] = e;
                    }
                }
                (Exponents::new(l), Exponents::new(r), c.clone())
            })
            .collect()
    }

    /// Parses errors for unknown variables at the ratfn/parse layer; here we
    /// only expose the index lookup.
    pub fn var_index(&self, name: &str) -> Result<usize> {
        self.vars
            .index(name)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }

    fn fmt_term(f: &mut fmt::Formatter<'_>, vars: &VarSet, m: &Exponents, c: &S) -> fmt::Result {
        let one = S::one();
        let minus_one = -S::one();
        if m.is_zero() {
            return write!(f, "{c}");
        }
        if *c == minus_one {
            write!(f, "-")?;
        } else if *c != one {
            write!(f, "{c}*")?;
        }
        let mut first = true;
        for (i, e) in m.iter() {
            if !first {
                write!(f, "*")?;
            }
            first = false;
            if e == 1 {
                write!(f, "{}", vars.name(i))?;
            } else {
                write!(f, "{}^{}", vars.name(i), e)?;
            }
        }
        Ok(())
    }

    /// S-expression form, used by the alternative CLI output format.
    pub fn sexpr(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let term = |m: &Exponents, c: &S| {
            let mut s = format!("(* {c}");
            for (i, e) in m.iter() {
                s.push_str(&format!(" (^ {} {})", self.vars.name(i), e));
            }
            s.push(')');
            s
        };
        let parts: Vec<String> = self
            .terms
            .iter()
            .rev()
            .map(|(m, c)| term(m, c))
            .collect();
        if parts.len() == 1 {
            parts.into_iter().next().unwrap()
        } else {
            format!("(+ {})", parts.join(" "))
        }
    }
}

impl<S: Scalar> fmt::Display for Polynomial<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        // Leading term first.
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            if k == 0 {
                if c.is_negative() {
                    write!(f, "-")?;
                    Self::fmt_term(f, &self.vars, m, &c.abs())?;
                } else {
                    Self::fmt_term(f, &self.vars, m, c)?;
                }
            } else if c.is_negative() {
                write!(f, " - ")?;
                Self::fmt_term(f, &self.vars, m, &c.abs())?;
            } else {
                write!(f, " + ")?;
                Self::fmt_term(f, &self.vars, m, c)?;
            }
        }
        Ok(())
    }
}

impl<S: Scalar> fmt::Debug for Polynomial<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rat;

    fn vars(names: &[&str]) -> VarSet {
        VarSet::new(names.iter().map(|s| s.to_string()).collect())
    }

    fn q(n: i64) -> Rat {
        Rat::from_int(n)
    }

    type P = Polynomial<Rat>;

    #[test]
    fn arithmetic_and_display() {
        let vs = vars(&["x", "y"]);
        let x = P::var(&vs, 0);
        let y = P::var(&vs, 1);
        let p = x.mul(&x).scale(&(q(3) / q(2))).mul(&y).sub(&P::one(&vs));
        assert_eq!(p.to_string(), "3/2*x^2*y - 1");
        let s = x.add(&y).mul(&x.sub(&y));
        assert_eq!(s.to_string(), "x^2 - y^2");
    }

    #[test]
    fn derivative_rules() {
        let vs = vars(&["x", "y"]);
        let x = P::var(&vs, 0);
        let y = P::var(&vs, 1);
        // d/dy (x^2 y + y^3) = x^2 + 3 y^2
        let p = x.pow(2).mul(&y).add(&y.pow(3));
        let want = x.pow(2).add(&y.pow(2).scale(&q(3)));
        assert_eq!(p.derivative(1), want);
        assert_eq!(x.pow(2).derivative(0), x.scale(&q(2)));
    }

    #[test]
    fn evaluate_is_exact() {
        let vs = vars(&["x"]);
        let x = P::var(&vs, 0);
        assert_eq!(x.pow(2).evaluate(&[q(2)]), q(4));
    }

    #[test]
    fn exact_division() {
        let vs = vars(&["x", "y"]);
        let x = P::var(&vs, 0);
        let y = P::var(&vs, 1);
        let a = x.add(&y);
        let b = x.sub(&y);
        let prod = a.mul(&b);
        assert_eq!(prod.div_exact(&a), Some(b.clone()));
        assert_eq!(prod.div_exact(&b), Some(a.clone()));
        assert_eq!(x.pow(2).div_exact(&a), None);
    }

    #[test]
    fn gcd_multivariate() {
        let vs = vars(&["x", "y"]);
        let x = P::var(&vs, 0);
        let y = P::var(&vs, 1);
        let g = x.add(&y); // x + y
        let a = g.mul(&x.pow(2)).scale(&q(2));
        let b = g.mul(&y).mul(&g);
        let got = P::gcd(&a, &b);
        assert_eq!(got, g.monic());
        // Coprime inputs.
        assert_eq!(P::gcd(&x, &y), P::one(&vs));
        assert_eq!(P::gcd(&P::zero(&vs), &a), a.monic());
    }

    #[test]
    fn gcd_univariate_classic() {
        let vs = vars(&["x"]);
        let x = P::var(&vs, 0);
        // gcd(x^2 - 1, x^2 + 2x + 1) = x + 1
        let a = x.pow(2).sub(&P::one(&vs));
        let b = x.pow(2).add(&x.scale(&q(2))).add(&P::one(&vs));
        assert_eq!(P::gcd(&a, &b), x.add(&P::one(&vs)));
    }
}

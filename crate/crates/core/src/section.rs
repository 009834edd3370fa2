//! Truncated Z2^n-graded formal power series with rational-function
//! coefficients: the section algebra of a graded coordinate domain.
//!
//! Multiplication reorders parameter monomials into canonical order, picking
//! up one `(-1)^{<a,b>}` per transposition; odd parameters square to zero
//! and every monomial above the truncation order is discarded (a quotient by
//! the ideal of high-order parameter monomials, which keeps the algebra
//! exact and closed).

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;


use crate::degree::{nonzero_degrees, standard_order, Degree, GradedDimension};
use crate::error::{Error, Result};
use crate::mono::Exponents;
use crate::poly::VarSet;
use crate::ratfn::RatFn;
use crate::scalar::Scalar;

/// The coordinate data of one graded domain: degree-0 coordinate names,
/// formal parameters with their nonzero degrees, and the truncation order.
///
/// Parameters are kept in canonical order (degree position in the standard
/// order, then declaration index); all sign bookkeeping assumes it.
#[derive(Debug)]
pub struct ParameterSystem {
    rank: usize,
    coord_vars: VarSet,
    param_names: Vec<String>,
    param_degrees: Vec<Degree>,
    truncation: usize,
    dim: GradedDimension,
    /// Pairwise scalar products between parameter degrees.
    koszul: Vec<Vec<u8>>,
    odd: Vec<bool>,
}

impl ParameterSystem {
    /// Validates and canonicalizes a parameter system.
    ///
    /// When `truncation` is `None` the default order is the number of odd
    /// parameters plus twice the number of even nonzero ones.
    pub fn new(
        rank: usize,
        coords: Vec<String>,
        params: Vec<(String, Degree)>,
        truncation: Option<usize>,
    ) -> Result<Arc<Self>> {
        if rank == 0 {
            return Err(Error::Declaration("grading rank must be at least 1".into()));
        }
        let mut seen: Vec<&str> = Vec::new();
        for name in coords.iter().chain(params.iter().map(|(n, _)| n)) {
            if seen.contains(&name.as_str()) {
                return Err(Error::Declaration(format!("duplicate symbol `{name}`")));
            }
            seen.push(name);
        }
        for (name, d) in &params {
            if d.rank() != rank {
                return Err(Error::RankMismatch(d.rank(), rank));
            }
            if d.is_zero() {
                return Err(Error::Declaration(format!(
                    "parameter `{name}` must have nonzero degree"
                )));
            }
        }
        // Canonical parameter order: by degree in standard order, then by
        // declaration index (stable sort).
        let slots: BTreeMap<Degree, usize> = standard_order(rank)
            .into_iter()
            .enumerate()
            .map(|(i, d)| (d, i))
            .collect();
        let mut params = params;
        params.sort_by_key(|(_, d)| slots[d]);
        let (param_names, param_degrees): (Vec<_>, Vec<_>) = params.into_iter().unzip();

        let mut q = vec![0usize; (1 << rank) - 1];
        for (i, d) in nonzero_degrees(rank).iter().enumerate() {
            q[i] = param_degrees.iter().filter(|pd| *pd == d).count();
        }
        let dim = GradedDimension::new(rank, coords.len(), q)?;

        let koszul: Vec<Vec<u8>> = param_degrees
            .iter()
            .map(|a| {
                param_degrees
                    .iter()
                    .map(|b| a.scalar_product(b).expect("equal ranks"))
                    .collect()
            })
            .collect();
        let odd: Vec<bool> = param_degrees.iter().map(|d| !d.is_even()).collect();
        let truncation = truncation.unwrap_or_else(|| {
            let n_odd = odd.iter().filter(|&&o| o).count();
            n_odd + 2 * (odd.len() - n_odd)
        });

        Ok(Arc::new(ParameterSystem {
            rank,
            coord_vars: VarSet::new(coords),
            param_names,
            param_degrees,
            truncation,
            dim,
            koszul,
            odd,
        }))
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn coord_vars(&self) -> &VarSet {
        &self.coord_vars
    }

    pub fn coord_count(&self) -> usize {
        self.coord_vars.len()
    }

    pub fn param_count(&self) -> usize {
        self.param_names.len()
    }

    pub fn param_name(&self, i: usize) -> &str {
        &self.param_names[i]
    }

    pub fn param_names(&self) -> &[String] {
        &self.param_names
    }

    pub fn param_degree(&self, i: usize) -> &Degree {
        &self.param_degrees[i]
    }

    pub fn param_index(&self, name: &str) -> Option<usize> {
        self.param_names.iter().position(|n| n == name)
    }

    pub fn coord_index(&self, name: &str) -> Option<usize> {
        self.coord_vars.index(name)
    }

    pub fn is_odd(&self, i: usize) -> bool {
        self.odd[i]
    }

    pub fn koszul(&self, i: usize, j: usize) -> u8 {
        self.koszul[i][j]
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    pub fn dimension(&self) -> &GradedDimension {
        &self.dim
    }

    /// Same data under a different truncation order.
    pub fn with_truncation(&self, t: usize) -> Arc<Self> {
        ParameterSystem::new(
            self.rank,
            self.coord_vars.names().to_vec(),
            self.param_names
                .iter()
                .cloned()
                .zip(self.param_degrees.iter().cloned())
                .collect(),
            Some(t),
        )
        .expect("already validated")
    }

    /// The Z2^n degree of a parameter monomial.
    pub fn monomial_degree(&self, m: &Exponents) -> Degree {
        let mut d = Degree::zero(self.rank);
        for (i, e) in m.iter() {
            if e % 2 == 1 {
                d = d.add(&self.param_degrees[i]).expect("equal ranks");
            }
        }
        d
    }

    /// True when the multi-index respects nilpotency and truncation bounds.
    pub fn index_is_admissible(&self, m: &Exponents) -> bool {
        m.len() == self.param_count()
            && m.total() as usize <= self.truncation
            && m.iter().all(|(i, e)| !self.odd[i] || e <= 1)
    }

    /// All admissible multi-indices: odd exponents at most 1, total at
    /// most the truncation order. The monomial basis of the truncated
    /// algebra over the coefficient field.
    pub fn admissible_indices(&self) -> Vec<Exponents> {
        fn walk(
            sys: &ParameterSystem,
            pos: usize,
            budget: usize,
            current: &mut Vec<u16>,
            out: &mut Vec<Exponents>,
        ) {
            if pos == sys.param_count() {
                out.push(Exponents::new(current.clone()));
                return;
            }
            let cap = if sys.odd[pos] { 1 } else { budget };
            for e in 0..=cap.min(budget) {
                current.push(e as u16);
                walk(sys, pos + 1, budget - e, current, out);
                current.pop();
            }
        }
        let mut out = Vec::new();
        walk(self, 0, self.truncation, &mut Vec::new(), &mut out);
        out.sort();
        out
    }

    /// Sign for sorting a word of parameters (with repetitions) into
    /// canonical order; 0 when an odd parameter appears twice.
    pub fn monomial_sign(&self, word: &[usize]) -> i8 {
        let mut w = word.to_vec();
        let mut sign = 1i8;
        // Bubble sort; each adjacent transposition of (a, b) contributes
        // (-1)^{<deg a, deg b>}.
        loop {
            let mut swapped = false;
            for k in 0..w.len().saturating_sub(1) {
                if w[k] > w[k + 1] {
                    if self.koszul[w[k]][w[k + 1]] == 1 {
                        sign = -sign;
                    }
                    w.swap(k, k + 1);
                    swapped = true;
                }
            }
            if !swapped {
                break;
            }
        }
        for k in 0..w.len().saturating_sub(1) {
            if w[k] == w[k + 1] && self.odd[w[k]] {
                return 0;
            }
        }
        sign
    }

    /// Sign of merging two canonical monomials `a * b`, and whether the
    /// product survives nilpotency; `None` encodes zero.
    fn merge_sign(&self, a: &Exponents, b: &Exponents) -> Option<i8> {
        let mut exp = 0u32;
        for (i, ea) in a.iter() {
            if self.odd[i] && b.get(i) > 0 {
                return None;
            }
            for (j, eb) in b.iter() {
                if i > j && self.koszul[i][j] == 1 {
                    exp += ea as u32 * eb as u32;
                }
            }
        }
        Some(if exp % 2 == 0 { 1 } else { -1 })
    }
}

impl PartialEq for ParameterSystem {
    fn eq(&self, other: &Self) -> bool {
        self.rank == other.rank
            && self.coord_vars == other.coord_vars
            && self.param_names == other.param_names
            && self.param_degrees == other.param_degrees
            && self.truncation == other.truncation
    }
}

impl Eq for ParameterSystem {}

pub(crate) fn same_system(a: &Arc<ParameterSystem>, b: &Arc<ParameterSystem>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

/// A truncated graded formal power series: a finite map from parameter
/// multi-indices to rational-function coefficients.
#[derive(Clone, PartialEq, Eq)]
pub struct Section<S: Scalar> {
    system: Arc<ParameterSystem>,
    terms: BTreeMap<Exponents, RatFn<S>>,
}

impl<S: Scalar> Section<S> {
    pub fn zero(system: &Arc<ParameterSystem>) -> Self {
        Section {
            system: system.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn one(system: &Arc<ParameterSystem>) -> Self {
        Self::from_base(system, RatFn::one(system.coord_vars()))
    }

    /// A degree-0 coefficient as a section.
    pub fn from_base(system: &Arc<ParameterSystem>, f: RatFn<S>) -> Self {
        assert!(f.vars() == system.coord_vars(), "coefficient variable set");
        let mut s = Self::zero(system);
        s.add_term(Exponents::zero(system.param_count()), f);
        s
    }

    pub fn constant(system: &Arc<ParameterSystem>, c: S) -> Self {
        Self::from_base(system, RatFn::constant(system.coord_vars(), c))
    }

    pub fn from_int(system: &Arc<ParameterSystem>, n: i64) -> Self {
        Self::from_base(system, RatFn::from_int(system.coord_vars(), n))
    }

    /// The coordinate `x_i` as a section.
    pub fn coordinate(system: &Arc<ParameterSystem>, i: usize) -> Self {
        Self::from_base(system, RatFn::var(system.coord_vars(), i))
    }

    /// The parameter `xi_i` as a section.
    pub fn parameter(system: &Arc<ParameterSystem>, i: usize) -> Self {
        assert!(i < system.param_count());
        let mut s = Self::zero(system);
        if system.truncation() >= 1 {
            s.add_term(
                Exponents::unit(system.param_count(), i),
                RatFn::one(system.coord_vars()),
            );
        }
        s
    }

    pub fn from_terms(
        system: &Arc<ParameterSystem>,
        terms: impl IntoIterator<Item = (Exponents, RatFn<S>)>,
    ) -> Self {
        let mut s = Self::zero(system);
        for (m, c) in terms {
            debug_assert!(system.index_is_admissible(&m), "inadmissible multi-index");
            s.add_term(m, c);
        }
        s
    }

    pub fn system(&self) -> &Arc<ParameterSystem> {
        &self.system
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &RatFn<S>)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, m: &Exponents) -> RatFn<S> {
        self.terms
            .get(m)
            .cloned()
            .unwrap_or_else(|| RatFn::zero(self.system.coord_vars()))
    }

    fn add_term(&mut self, m: Exponents, c: RatFn<S>) {
        if c.is_zero() {
            return;
        }
        match self.terms.remove(&m) {
            None => {
                self.terms.insert(m, c);
            }
            Some(old) => {
                let s = old.add(&c);
                if !s.is_zero() {
                    self.terms.insert(m, s);
                }
            }
        }
    }

    fn check_system(&self, other: &Self) -> Result<()> {
        if !same_system(&self.system, &other.system) {
            return Err(Error::SystemMismatch);
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_system(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        Section {
            system: self.system.clone(),
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), c.neg()))
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    /// Scales by a degree-0 coefficient.
    pub fn scale(&self, c: &RatFn<S>) -> Self {
        if c.is_zero() {
            return Self::zero(&self.system);
        }
        Section {
            system: self.system.clone(),
            terms: self
                .terms
                .iter()
                .map(|(m, k)| (m.clone(), k.mul(c)))
                .collect(),
        }
    }

    pub fn scale_scalar(&self, c: &S) -> Self {
        self.scale(&RatFn::constant(self.system.coord_vars(), c.clone()))
    }

    /// Graded product with Koszul signs, truncated at the system order.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_system(other)?;
        let t = self.system.truncation() as u32;
        let mut out = Self::zero(&self.system);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                if ma.total() + mb.total() > t {
                    continue;
                }
                let Some(sign) = self.system.merge_sign(ma, mb) else {
                    continue;
                };
                let mut c = ca.mul(cb);
                if sign < 0 {
                    c = c.neg();
                }
                out.add_term(ma.mul(mb), c);
            }
        }
        Ok(out)
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut out = Self::one(&self.system);
        for _ in 0..n {
            out = out.mul(self).expect("same system");
        }
        out
    }

    /// The base projection: the coefficient of the zero multi-index.
    pub fn epsilon(&self) -> RatFn<S> {
        self.coefficient(&Exponents::zero(self.system.param_count()))
    }

    /// The nilpotent remainder `F - epsilon(F)`.
    pub fn nilpotent_part(&self) -> Self {
        let mut s = self.clone();
        s.terms.remove(&Exponents::zero(self.system.param_count()));
        s
    }

    /// Inverse in the truncated algebra. Exists iff the base projection is
    /// formally invertible; computed by the finite geometric series
    /// `f^{-1} sum_k (-f^{-1} N)^k` with `N` the nilpotent part.
    pub fn invert(&self) -> Result<Self> {
        let base = self.epsilon();
        if !base.is_invertible() {
            return Err(Error::NotInvertible);
        }
        let base_inv = base.inv().expect("nonzero");
        let n = self.nilpotent_part().scale(&base_inv).neg();
        let mut acc = Self::one(&self.system);
        for _ in 0..self.system.truncation() {
            acc = n.mul(&acc).expect("same system").add(&Self::one(&self.system))?;
        }
        Ok(acc.scale(&base_inv))
    }

    /// Splits into homogeneous components by monomial degree.
    pub fn degree_decompose(&self) -> BTreeMap<Degree, Self> {
        let mut out: BTreeMap<Degree, Self> = BTreeMap::new();
        for (m, c) in &self.terms {
            let d = self.system.monomial_degree(m);
            out.entry(d)
                .or_insert_with(|| Self::zero(&self.system))
                .add_term(m.clone(), c.clone());
        }
        out
    }

    /// True when every monomial has degree `d` (the zero section passes).
    pub fn is_homogeneous_of(&self, d: &Degree) -> bool {
        self.terms
            .keys()
            .all(|m| self.system.monomial_degree(m) == *d)
    }

    /// The common degree of a homogeneous section; `None` when mixed.
    /// The zero section reports degree 0.
    pub fn degree(&self) -> Option<Degree> {
        let mut it = self.terms.keys().map(|m| self.system.monomial_degree(m));
        match it.next() {
            None => Some(Degree::zero(self.system.rank())),
            Some(d) => {
                if it.all(|e| e == d) {
                    Some(d)
                } else {
                    None
                }
            }
        }
    }

    /// Re-truncates to a coarser order `t`.
    pub fn truncate(&self, t: usize) -> Self {
        let system = self.system.with_truncation(t);
        let mut s = Self::zero(&system);
        for (m, c) in &self.terms {
            if m.total() as usize <= t {
                s.add_term(m.clone(), c.clone());
            }
        }
        s
    }

    /// Applies a coefficient-wise map (used by substitution plumbing).
    pub fn map_coefficients(&self, mut f: impl FnMut(&RatFn<S>) -> RatFn<S>) -> Self {
        let mut s = Self::zero(&self.system);
        for (m, c) in &self.terms {
            s.add_term(m.clone(), f(c));
        }
        s
    }

    fn fmt_params(&self, out: &mut String, m: &Exponents) {
        let mut first = true;
        for (i, e) in m.iter() {
            if !first {
                out.push('*');
            }
            first = false;
            out.push_str(self.system.param_name(i));
            if e > 1 {
                out.push_str(&format!("^{e}"));
            }
        }
    }

    /// Display order: ascending total parameter degree, then earlier
    /// parameters first within one degree.
    fn display_order(&self) -> Vec<(&Exponents, &RatFn<S>)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|(a, _), (b, _)| {
            a.total()
                .cmp(&b.total())
                .then_with(|| b.exponents().cmp(a.exponents()))
        });
        v
    }

    pub fn sexpr(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let parts: Vec<String> = self
            .display_order()
            .into_iter()
            .map(|(m, c)| {
                let mut s = format!("(* {}", c.sexpr());
                for (i, e) in m.iter() {
                    s.push_str(&format!(" (^ {} {})", self.system.param_name(i), e));
                }
                s.push(')');
                s
            })
            .collect();
        if parts.len() == 1 {
            parts.into_iter().next().unwrap()
        } else {
            format!("(+ {})", parts.join(" "))
        }
    }
}

/// Splits a coefficient into (is_negative, magnitude) for printing; the
/// sign is the sign of the numerator's leading coefficient.
fn sign_split<S: Scalar>(c: &RatFn<S>) -> (bool, RatFn<S>) {
    match c.numerator().leading_term() {
        Some((_, lc)) if lc.is_negative() => (true, c.neg()),
        _ => (false, c.clone()),
    }
}

impl<S: Scalar> fmt::Display for Section<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.display_order().into_iter().enumerate() {
            if m.is_zero() {
                // The base term sorts first; its own printer handles signs.
                write!(f, "{c}")?;
                continue;
            }
            // Sign extraction is only safe when the numerator is a single
            // term; anything else is parenthesized and joined with `+`.
            let single_num = c.numerator().num_terms() <= 1;
            let (neg, mag) = if single_num {
                sign_split(c)
            } else {
                (false, c.clone())
            };
            if k == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mut params = String::new();
            self.fmt_params(&mut params, m);
            if mag.is_one() {
                write!(f, "{params}")?;
            } else if !single_num && mag.denominator().is_constant() {
                write!(f, "({})*{params}", mag.numerator())?;
            } else {
                write!(f, "{mag}*{params}")?;
            }
        }
        Ok(())
    }
}

impl<S: Scalar> fmt::Debug for Section<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

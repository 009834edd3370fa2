//! Product domains, graded tensor elements, and the fundamental
//! isomorphism between the tensor algebra of two factors and the section
//! algebra of their product, realized exactly on truncated series.
//!
//! The combined truncation order is the sum of the factor orders, so the
//! isomorphism pairs every retained left monomial with every retained
//! right one.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::domain::{Domain, Morphism};
use crate::error::{Error, Result};
use crate::mono::Exponents;
use crate::poly::Polynomial;
use crate::ratfn::RatFn;
use crate::scalar::Scalar;
use crate::section::{same_system, ParameterSystem, Section};

/// Which factor of a product a symbol came from.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Side {
    Left,
    Right,
}

/// The product of two domains: the combined domain plus the provenance of
/// every combined symbol.
#[derive(Clone, Debug)]
pub struct ProductDomain {
    left: Domain,
    right: Domain,
    combined: Domain,
    /// Factor coordinate index -> combined coordinate index.
    left_coord: Vec<usize>,
    right_coord: Vec<usize>,
    /// Factor parameter index -> combined parameter index.
    left_param: Vec<usize>,
    right_param: Vec<usize>,
    /// Combined coordinate index -> provenance.
    coord_origin: Vec<(Side, usize)>,
    param_origin: Vec<(Side, usize)>,
}

impl ProductDomain {
    /// Builds the product; name collisions are resolved by the suffixes
    /// `_1` and `_2`, stably under nesting.
    pub fn new(left: &Domain, right: &Domain) -> Result<Self> {
        let (ls, rs) = (left.system(), right.system());
        if ls.rank() != rs.rank() {
            return Err(Error::RankMismatch(ls.rank(), rs.rank()));
        }
        let l_names = {
            let mut v = ls.coord_vars().names().to_vec();
            v.extend(ls.param_names().iter().cloned());
            v
        };
        let r_names = {
            let mut v = rs.coord_vars().names().to_vec();
            v.extend(rs.param_names().iter().cloned());
            v
        };
        let rename = |name: &str, suffix: &str, clash: bool| {
            if clash {
                format!("{name}_{suffix}")
            } else {
                name.to_string()
            }
        };
        let clash = |name: &str| l_names.iter().any(|n| n == name) && r_names.contains(&name.to_string());

        let mut coords = Vec::new();
        for n in ls.coord_vars().names() {
            coords.push(rename(n, "1", clash(n)));
        }
        for n in rs.coord_vars().names() {
            coords.push(rename(n, "2", clash(n)));
        }
        let mut params = Vec::new();
        for (i, n) in ls.param_names().iter().enumerate() {
            params.push((rename(n, "1", clash(n)), ls.param_degree(i).clone()));
        }
        for (i, n) in rs.param_names().iter().enumerate() {
            params.push((rename(n, "2", clash(n)), rs.param_degree(i).clone()));
        }
        let system = ParameterSystem::new(
            ls.rank(),
            coords,
            params,
            Some(ls.truncation() + rs.truncation()),
        )?;
        let combined = Domain::new(format!("{}x{}", left.name(), right.name()), system);

        let csys = combined.system();
        let left_coord: Vec<usize> = (0..ls.coord_count()).collect();
        let right_coord: Vec<usize> = (0..rs.coord_count())
            .map(|i| ls.coord_count() + i)
            .collect();
        // Parameters were re-sorted canonically; recover indices by name.
        let lookup = |name: String| csys.param_index(&name).expect("combined parameter");
        let left_param: Vec<usize> = ls
            .param_names()
            .iter()
            .map(|n| lookup(rename(n, "1", clash(n))))
            .collect();
        let right_param: Vec<usize> = rs
            .param_names()
            .iter()
            .map(|n| lookup(rename(n, "2", clash(n))))
            .collect();

        let mut coord_origin = vec![(Side::Left, 0); csys.coord_count()];
        for (i, &c) in left_coord.iter().enumerate() {
            coord_origin[c] = (Side::Left, i);
        }
        for (i, &c) in right_coord.iter().enumerate() {
            coord_origin[c] = (Side::Right, i);
        }
        let mut param_origin = vec![(Side::Left, 0); csys.param_count()];
        for (i, &p) in left_param.iter().enumerate() {
            param_origin[p] = (Side::Left, i);
        }
        for (i, &p) in right_param.iter().enumerate() {
            param_origin[p] = (Side::Right, i);
        }

        Ok(ProductDomain {
            left: left.clone(),
            right: right.clone(),
            combined,
            left_coord,
            right_coord,
            left_param,
            right_param,
            coord_origin,
            param_origin,
        })
    }

    pub fn left(&self) -> &Domain {
        &self.left
    }

    pub fn right(&self) -> &Domain {
        &self.right
    }

    pub fn combined(&self) -> &Domain {
        &self.combined
    }

    pub fn factor(&self, side: Side) -> &Domain {
        match side {
            Side::Left => &self.left,
            Side::Right => &self.right,
        }
    }

    fn coord_map(&self, side: Side) -> &[usize] {
        match side {
            Side::Left => &self.left_coord,
            Side::Right => &self.right_coord,
        }
    }

    fn param_map(&self, side: Side) -> &[usize] {
        match side {
            Side::Left => &self.left_param,
            Side::Right => &self.right_param,
        }
    }

    /// Includes a factor section into the combined algebra.
    ///
    /// The canonical parameter order of the combined system preserves the
    /// relative order of each factor's parameters, so no signs arise.
    pub fn inject<S: Scalar>(&self, side: Side, f: &Section<S>) -> Result<Section<S>> {
        if !same_system(f.system(), self.factor(side).system()) {
            return Err(Error::SystemMismatch);
        }
        let csys = self.combined.system();
        let cmap = self.coord_map(side);
        let pmap = self.param_map(side);
        let terms = f.terms().map(|(m, c)| {
            let mut e = vec![0u16; csys.param_count()];
            for (i, k) in m.iter() {
                e[pmap[i]] = k;
            }
            (
                Exponents::new(e),
                c.embed(csys.coord_vars(), cmap),
            )
        });
        Ok(Section::from_terms(csys, terms.collect::<Vec<_>>()))
    }

    /// The projection onto a factor: each factor generator pulls back to
    /// its copy inside the combined domain (the `f -> f (x) 1` inclusion).
    pub fn projection<S: Scalar>(&self, side: Side) -> Morphism<S> {
        let fsys = self.factor(side).system();
        let csys = self.combined.system();
        let coord_images = self
            .coord_map(side)
            .iter()
            .map(|&c| Section::coordinate(csys, c))
            .collect();
        let param_images = self
            .param_map(side)
            .iter()
            .map(|&p| Section::parameter(csys, p))
            .collect();
        debug_assert_eq!(self.coord_map(side).len(), fsys.coord_count());
        Morphism::new(
            self.combined.clone(),
            self.factor(side).clone(),
            coord_images,
            param_images,
        )
        .expect("projection images are homogeneous generators")
    }

    /// Serializes the combined domain with the provenance of each symbol.
    pub fn describe(&self) -> String {
        let csys = self.combined.system();
        let mut out = format!(
            "product {} = {} x {}\ndimension {}\n",
            self.combined.name(),
            self.left.name(),
            self.right.name(),
            csys.dimension()
        );
        for (i, (side, j)) in self.coord_origin.iter().enumerate() {
            let (fname, fdom) = match side {
                Side::Left => (self.left.system().coord_vars().name(*j), self.left.name()),
                Side::Right => (self.right.system().coord_vars().name(*j), self.right.name()),
            };
            out.push_str(&format!(
                "coord {} <- {}:{}\n",
                csys.coord_vars().name(i),
                fdom,
                fname
            ));
        }
        for (i, (side, j)) in self.param_origin.iter().enumerate() {
            let (fname, fdom) = match side {
                Side::Left => (self.left.system().param_name(*j), self.left.name()),
                Side::Right => (self.right.system().param_name(*j), self.right.name()),
            };
            out.push_str(&format!(
                "param {} {} <- {}:{}\n",
                csys.param_name(i),
                csys.param_degree(i),
                fdom,
                fname
            ));
        }
        out
    }
}

/// A finite sum of pure tensors of factor sections, kept with monomial
/// parameter parts; scalar factors are absorbed into the left coefficient.
///
/// Equality is representation-level (pairs with identical right part are
/// merged); mathematical equality is decided through [`fundamental_iso`].
#[derive(Clone, PartialEq)]
pub struct TensorElement<S: Scalar> {
    left: Arc<ParameterSystem>,
    right: Arc<ParameterSystem>,
    terms: BTreeMap<(Exponents, Exponents), Vec<(RatFn<S>, RatFn<S>)>>,
}

impl<S: Scalar> TensorElement<S> {
    pub fn zero(left: &Arc<ParameterSystem>, right: &Arc<ParameterSystem>) -> Self {
        TensorElement {
            left: left.clone(),
            right: right.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn one(left: &Arc<ParameterSystem>, right: &Arc<ParameterSystem>) -> Self {
        Self::pure(&Section::one(left), &Section::one(right)).expect("unit")
    }

    /// The pure tensor of two factor sections, expanded to canonical form.
    pub fn pure(f: &Section<S>, g: &Section<S>) -> Result<Self> {
        let mut t = Self::zero(f.system(), g.system());
        for (alpha, fc) in f.terms() {
            for (beta, gc) in g.terms() {
                t.push(alpha.clone(), beta.clone(), fc.clone(), gc.clone());
            }
        }
        Ok(t)
    }

    pub fn left_system(&self) -> &Arc<ParameterSystem> {
        &self.left
    }

    pub fn right_system(&self) -> &Arc<ParameterSystem> {
        &self.right
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn push(&mut self, alpha: Exponents, beta: Exponents, f: RatFn<S>, g: RatFn<S>) {
        if f.is_zero() || g.is_zero() {
            return;
        }
        // Absorb the leading scalar of the right coefficient on the left.
        let (_, lc) = g.numerator().leading_term().expect("nonzero");
        let lc = lc.clone();
        let g = g.scale(&(S::one() / lc.clone()));
        let f = f.scale(&lc);
        let key = (alpha, beta);
        let now_empty = {
            let bucket = self.terms.entry(key.clone()).or_default();
            if let Some(pos) = bucket.iter().position(|(_, g0)| *g0 == g) {
                bucket[pos].0 = bucket[pos].0.add(&f);
                if bucket[pos].0.is_zero() {
                    bucket.remove(pos);
                }
            } else {
                bucket.push((f, g));
                bucket.sort_by_key(|(fc, gc)| format!("{gc}|{fc}"));
            }
            bucket.is_empty()
        };
        if now_empty {
            self.terms.remove(&key);
        }
    }

    fn check(&self, other: &Self) -> Result<()> {
        if !same_system(&self.left, &other.left) || !same_system(&self.right, &other.right) {
            return Err(Error::SystemMismatch);
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut out = self.clone();
        for ((a, b), pairs) in &other.terms {
            for (f, g) in pairs {
                out.push(a.clone(), b.clone(), f.clone(), g.clone());
            }
        }
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        let mut out = Self::zero(&self.left, &self.right);
        for ((a, b), pairs) in &self.terms {
            for (f, g) in pairs {
                out.push(a.clone(), b.clone(), f.neg(), g.clone());
            }
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    /// Bilinear product with the Koszul sign `(-1)^{<deg g, deg h>}` between
    /// the inner factors `... (x) g` and `h (x) ...`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let tl = self.left.truncation() as u32;
        let tr = self.right.truncation() as u32;
        let mut out = Self::zero(&self.left, &self.right);
        for ((a1, b1), pairs1) in &self.terms {
            for ((a2, b2), pairs2) in &other.terms {
                if a1.total() + a2.total() > tl || b1.total() + b2.total() > tr {
                    continue;
                }
                let Some(sl) = merge_sign(&self.left, a1, a2) else {
                    continue;
                };
                let Some(sr) = merge_sign(&self.right, b1, b2) else {
                    continue;
                };
                // Inner Koszul sign between deg(eta^{b1}) and deg(xi^{a2}).
                let cross = self
                    .right
                    .monomial_degree(b1)
                    .scalar_product(&self.left.monomial_degree(a2))
                    .expect("equal ranks");
                let mut sign = sl * sr;
                if cross == 1 {
                    sign = -sign;
                }
                for (f1, g1) in pairs1 {
                    for (f2, g2) in pairs2 {
                        let mut f = f1.mul(f2);
                        if sign < 0 {
                            f = f.neg();
                        }
                        out.push(a1.mul(a2), b1.mul(b2), f, g1.mul(g2));
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn terms(
        &self,
    ) -> impl Iterator<Item = (&(Exponents, Exponents), &Vec<(RatFn<S>, RatFn<S>)>)> {
        self.terms.iter()
    }
}

/// Reordering sign for merging two canonical monomials of one system;
/// `None` when an odd parameter squares to zero.
fn merge_sign(
    sys: &Arc<ParameterSystem>,
    a: &Exponents,
    b: &Exponents,
) -> Option<i8> {
    let mut word: Vec<usize> = Vec::new();
    for (i, e) in a.iter() {
        if sys.is_odd(i) && b.get(i) > 0 {
            return None;
        }
        for _ in 0..e {
            word.push(i);
        }
    }
    for (j, e) in b.iter() {
        for _ in 0..e {
            word.push(j);
        }
    }
    match sys.monomial_sign(&word) {
        0 => None,
        s => Some(s),
    }
}

/// The fundamental isomorphism: sends `f xi^a (x) g eta^b` to the combined
/// section `f g xi^a eta^b`, an algebra isomorphism on truncated spaces.
pub fn fundamental_iso<S: Scalar>(
    pd: &ProductDomain,
    t: &TensorElement<S>,
) -> Result<Section<S>> {
    if !same_system(&t.left, pd.left.system()) || !same_system(&t.right, pd.right.system()) {
        return Err(Error::SystemMismatch);
    }
    let csys = pd.combined.system();
    let mut out = Section::zero(csys);
    for ((a, b), pairs) in &t.terms {
        for (f, g) in pairs {
            let lsec = Section::from_terms(pd.left.system(), [(a.clone(), f.clone())]);
            let rsec = Section::from_terms(pd.right.system(), [(b.clone(), g.clone())]);
            let prod = pd.inject(Side::Left, &lsec)?.mul(&pd.inject(Side::Right, &rsec)?)?;
            out = out.add(&prod)?;
        }
    }
    Ok(out)
}

/// The inverse of the fundamental isomorphism.
///
/// Defined whenever every coefficient denominator factors into a left-only
/// and a right-only part (always the case for sections produced by
/// [`fundamental_iso`]); monomial numerators split uniquely.
pub fn fundamental_iso_inv<S: Scalar>(
    pd: &ProductDomain,
    f: &Section<S>,
) -> Result<TensorElement<S>> {
    if !same_system(f.system(), pd.combined.system()) {
        return Err(Error::SystemMismatch);
    }
    let csys = pd.combined.system();
    let (lsys, rsys) = (pd.left.system(), pd.right.system());
    let n = csys.coord_count();
    let mut to_left = vec![None; n];
    for (i, &c) in pd.left_coord.iter().enumerate() {
        to_left[c] = Some(i);
    }
    let mut to_right = vec![None; n];
    for (i, &c) in pd.right_coord.iter().enumerate() {
        to_right[c] = Some(i);
    }
    let is_left_coord: Vec<bool> = (0..n).map(|c| to_left[c].is_some()).collect();

    let mut out = TensorElement::zero(lsys, rsys);
    for (m, coeff) in f.terms() {
        // Split the parameter monomial by provenance.
        let mut a = vec![0u16; lsys.param_count()];
        let mut b = vec![0u16; rsys.param_count()];
        for (p, e) in m.iter() {
            match pd.param_origin[p] {
                (Side::Left, i) => a[i] = e,
                (Side::Right, i) => b[i] = e,
            }
        }
        let alpha = Exponents::new(a);
        let beta = Exponents::new(b);
        // Only monomials retained by the tensor model invert: each factor
        // part must be admissible for its own system.
        if !lsys.index_is_admissible(&alpha) || !rsys.index_is_admissible(&beta) {
            return Err(Error::ExponentBound(format!(
                "monomial order exceeds a factor truncation at {alpha:?} | {beta:?}"
            )));
        }
        // Sign of unshuffling the canonical monomial into the block form
        // xi^alpha eta^beta: count out-of-order (left, right) letter pairs.
        let mut exp = 0u32;
        for (pl, el) in m.iter() {
            if let (Side::Right, _) = pd.param_origin[pl] {
                continue;
            }
            for (pr, er) in m.iter() {
                if pr >= pl {
                    break;
                }
                if let (Side::Right, _) = pd.param_origin[pr] {
                    if csys.koszul(pl, pr) == 1 {
                        exp += el as u32 * er as u32;
                    }
                }
            }
        }
        let sign = if exp % 2 == 0 { 1 } else { -1 };

        // Factor the denominator as (left part) * (right part).
        let den = coeff.denominator();
        let mut den_l = Polynomial::zero(csys.coord_vars());
        {
            // Content of the denominator with respect to the right block.
            let mut groups: BTreeMap<Exponents, Polynomial<S>> = BTreeMap::new();
            for (lm, rm, c) in den.split_monomials(&is_left_coord) {
                let entry = groups
                    .entry(rm)
                    .or_insert_with(|| Polynomial::zero(csys.coord_vars()));
                *entry = entry.add(&Polynomial::from_terms(csys.coord_vars(), [(lm, c)]));
            }
            for g in groups.values() {
                den_l = Polynomial::gcd(&den_l, g);
            }
        }
        let den_r = den.div_exact(&den_l).expect("content divides");
        let den_l = den_l
            .project(lsys.coord_vars(), &to_left)
            .ok_or_else(|| Error::NotSplit(format!("denominator `{den}` mixes the factors")))?;
        let den_r = den_r
            .project(rsys.coord_vars(), &to_right)
            .ok_or_else(|| Error::NotSplit(format!("denominator `{den}` mixes the factors")))?;

        // Monomials of the numerator split uniquely.
        for (lm, rm, c) in coeff.numerator().split_monomials(&is_left_coord) {
            let lm = Exponents::new(
                (0..lsys.coord_count())
                    .map(|i| lm.get(pd.left_coord[i]))
                    .collect::<Vec<_>>(),
            );
            let rm = Exponents::new(
                (0..rsys.coord_count())
                    .map(|i| rm.get(pd.right_coord[i]))
                    .collect::<Vec<_>>(),
            );
            let c = if sign < 0 { -c } else { c };
            let fl = RatFn::new(
                Polynomial::from_terms(lsys.coord_vars(), [(lm, c)]),
                den_l.clone(),
            )?;
            let fr = RatFn::new(
                Polynomial::from_terms(rsys.coord_vars(), [(rm, S::one())]),
                den_r.clone(),
            )?;
            out.push(alpha.clone(), beta.clone(), fl, fr);
        }
    }
    Ok(out)
}

/// Pullback of a tensor along a pair of morphisms with common source:
/// `sum_j pullback_1(f_j) * pullback_2(g_j)`.
pub fn tensor_pullback<S: Scalar>(
    phi1: &Morphism<S>,
    phi2: &Morphism<S>,
    t: &TensorElement<S>,
) -> Result<Section<S>> {
    if phi1.source() != phi2.source() {
        return Err(Error::DomainMismatch(
            phi1.source().name().to_string(),
            phi2.source().name().to_string(),
        ));
    }
    let mut out = Section::zero(phi1.source().system());
    for ((a, b), pairs) in &t.terms {
        for (f, g) in pairs {
            let lsec = Section::from_terms(t.left_system(), [(a.clone(), f.clone())]);
            let rsec = Section::from_terms(t.right_system(), [(b.clone(), g.clone())]);
            let prod = phi1.pullback(&lsec)?.mul(&phi2.pullback(&rsec)?)?;
            out = out.add(&prod)?;
        }
    }
    Ok(out)
}

/// The universal morphism into a product: the unique morphism whose
/// composites with the projections are the given factor morphisms.
pub fn universal_morphism<S: Scalar>(
    pd: &ProductDomain,
    phi1: &Morphism<S>,
    phi2: &Morphism<S>,
) -> Result<Morphism<S>> {
    if phi1.source() != phi2.source() {
        return Err(Error::DomainMismatch(
            phi1.source().name().to_string(),
            phi2.source().name().to_string(),
        ));
    }
    if phi1.target() != pd.left() || phi2.target() != pd.right() {
        return Err(Error::DomainMismatch(
            phi1.target().name().to_string(),
            pd.left().name().to_string(),
        ));
    }
    let coord_images = pd
        .coord_origin
        .iter()
        .map(|&(side, i)| match side {
            Side::Left => phi1.coord_image(i).clone(),
            Side::Right => phi2.coord_image(i).clone(),
        })
        .collect();
    let param_images = pd
        .param_origin
        .iter()
        .map(|&(side, i)| match side {
            Side::Left => phi1.param_image(i).clone(),
            Side::Right => phi2.param_image(i).clone(),
        })
        .collect();
    Morphism::new(
        phi1.source().clone(),
        pd.combined.clone(),
        coord_images,
        param_images,
    )
}

/// The product of two morphisms, obtained from the universal property:
/// `universal(psi1 . proj1, psi2 . proj2)`.
pub fn product_of_morphisms<S: Scalar>(
    source: &ProductDomain,
    target: &ProductDomain,
    psi1: &Morphism<S>,
    psi2: &Morphism<S>,
) -> Result<Morphism<S>> {
    let comp1 = source.projection::<S>(Side::Left).then(psi1)?;
    let comp2 = source.projection::<S>(Side::Right).then(psi2)?;
    universal_morphism(target, &comp1, &comp2)
}

impl<S: Scalar> fmt::Display for TensorElement<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for ((a, b), pairs) in &self.terms {
            for (fc, gc) in pairs {
                if !first {
                    write!(f, " + ")?;
                }
                first = false;
                let lsec = Section::from_terms(&self.left, [(a.clone(), fc.clone())]);
                let rsec = Section::from_terms(&self.right, [(b.clone(), gc.clone())]);
                let l = lsec.to_string();
                let r = rsec.to_string();
                if l.contains(' ') {
                    write!(f, "({l})")?;
                } else {
                    write!(f, "{l}")?;
                }
                write!(f, " (x) ")?;
                if r.contains(' ') {
                    write!(f, "({r})")?;
                } else {
                    write!(f, "{r}")?;
                }
            }
        }
        Ok(())
    }
}

impl<S: Scalar> fmt::Debug for TensorElement<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

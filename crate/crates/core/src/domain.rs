//! Graded coordinate domains and their morphisms.
//!
//! A morphism is determined by the pullback images of the target generators.
//! Pulling back a section substitutes parameter images directly and extends
//! coefficient functions along the nilpotent shift of each coordinate image
//! by a finite Taylor expansion, which is exact in the truncated algebra.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;


use crate::degree::Degree;
use crate::error::{Error, Result};
use crate::ratfn::RatFn;
use crate::scalar::Scalar;
use crate::section::{same_system, ParameterSystem, Section};

/// A formal Z2^n-domain: a named parameter system.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Domain {
    name: String,
    system: Arc<ParameterSystem>,
}

impl Domain {
    pub fn new(name: impl Into<String>, system: Arc<ParameterSystem>) -> Self {
        Domain {
            name: name.into(),
            system,
        }
    }

    /// The point domain `R^{0|0}` at grading rank `rank`.
    pub fn point(rank: usize) -> Self {
        Domain {
            name: "pt".into(),
            system: ParameterSystem::new(rank, vec![], vec![], Some(0)).expect("valid"),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn system(&self) -> &Arc<ParameterSystem> {
        &self.system
    }

    /// Resolves a symbol name to a generator section.
    pub fn generator<S: Scalar>(&self, name: &str) -> Result<Section<S>> {
        if let Some(i) = self.system.coord_index(name) {
            return Ok(Section::coordinate(&self.system, i));
        }
        if let Some(i) = self.system.param_index(name) {
            return Ok(Section::parameter(&self.system, i));
        }
        Err(Error::UnknownSymbol(name.to_string()))
    }

    /// All generator names, coordinates first, in canonical order.
    pub fn generator_names(&self) -> Vec<String> {
        let mut names: Vec<String> = self.system.coord_vars().names().to_vec();
        names.extend(self.system.param_names().iter().cloned());
        names
    }
}

/// A point of the base space: one scalar per degree-0 coordinate.
#[derive(Clone, PartialEq, Debug)]
pub struct Point<S: Scalar> {
    values: Vec<S>,
}

impl<S: Scalar> Point<S> {
    pub fn new(values: Vec<S>) -> Self {
        Point { values }
    }

    pub fn values(&self) -> &[S] {
        &self.values
    }
}

/// A morphism of Z2^n-domains, stored through the pullback images of the
/// target generators over the source.
#[derive(Clone, PartialEq, Debug)]
pub struct Morphism<S: Scalar> {
    source: Domain,
    target: Domain,
    coord_images: Vec<Section<S>>,
    param_images: Vec<Section<S>>,
}

impl<S: Scalar> Morphism<S> {
    /// Validates degree preservation and assembles the morphism.
    pub fn new(
        source: Domain,
        target: Domain,
        coord_images: Vec<Section<S>>,
        param_images: Vec<Section<S>>,
    ) -> Result<Self> {
        let tsys = target.system();
        if coord_images.len() != tsys.coord_count() || param_images.len() != tsys.param_count() {
            return Err(Error::Declaration(
                "images must cover every target generator".into(),
            ));
        }
        if source.system().rank() != tsys.rank() {
            return Err(Error::RankMismatch(source.system().rank(), tsys.rank()));
        }
        let zero_deg = Degree::zero(tsys.rank());
        for (i, img) in coord_images.iter().enumerate() {
            if !same_system(img.system(), source.system()) {
                return Err(Error::SystemMismatch);
            }
            if !img.is_homogeneous_of(&zero_deg) {
                return Err(Error::DegreeViolation {
                    symbol: tsys.coord_vars().name(i).to_string(),
                    expected: zero_deg.to_string(),
                });
            }
        }
        for (j, img) in param_images.iter().enumerate() {
            if !same_system(img.system(), source.system()) {
                return Err(Error::SystemMismatch);
            }
            let want = tsys.param_degree(j);
            if !img.is_homogeneous_of(want) {
                return Err(Error::DegreeViolation {
                    symbol: tsys.param_name(j).to_string(),
                    expected: want.to_string(),
                });
            }
        }
        Ok(Morphism {
            source,
            target,
            coord_images,
            param_images,
        })
    }

    /// Builds a morphism from named generator images; every target generator
    /// must be assigned exactly once.
    pub fn from_images(
        source: Domain,
        target: Domain,
        images: &BTreeMap<String, Section<S>>,
    ) -> Result<Self> {
        let tsys = target.system().clone();
        let mut coord_images = Vec::with_capacity(tsys.coord_count());
        let mut param_images = Vec::with_capacity(tsys.param_count());
        for name in target.generator_names() {
            let img = images
                .get(&name)
                .ok_or_else(|| Error::Declaration(format!("missing image for `{name}`")))?;
            if tsys.coord_index(&name).is_some() {
                coord_images.push(img.clone());
            } else {
                param_images.push(img.clone());
            }
        }
        for name in images.keys() {
            if tsys.coord_index(name).is_none() && tsys.param_index(name).is_none() {
                return Err(Error::UnknownSymbol(name.clone()));
            }
        }
        Self::new(source, target, coord_images, param_images)
    }

    pub fn identity(domain: &Domain) -> Self {
        let sys = domain.system();
        Morphism {
            source: domain.clone(),
            target: domain.clone(),
            coord_images: (0..sys.coord_count())
                .map(|i| Section::coordinate(sys, i))
                .collect(),
            param_images: (0..sys.param_count())
                .map(|i| Section::parameter(sys, i))
                .collect(),
        }
    }

    /// The unique morphism to the point domain, realizing `r -> r * 1`.
    pub fn to_point(source: &Domain) -> Self {
        Morphism {
            source: source.clone(),
            target: Domain::point(source.system().rank()),
            coord_images: vec![],
            param_images: vec![],
        }
    }

    pub fn source(&self) -> &Domain {
        &self.source
    }

    pub fn target(&self) -> &Domain {
        &self.target
    }

    pub fn coord_image(&self, i: usize) -> &Section<S> {
        &self.coord_images[i]
    }

    pub fn param_image(&self, j: usize) -> &Section<S> {
        &self.param_images[j]
    }

    /// The image of a named target generator.
    pub fn image_of(&self, name: &str) -> Result<&Section<S>> {
        let tsys = self.target.system();
        if let Some(i) = tsys.coord_index(name) {
            return Ok(&self.coord_images[i]);
        }
        if let Some(j) = tsys.param_index(name) {
            return Ok(&self.param_images[j]);
        }
        Err(Error::UnknownSymbol(name.to_string()))
    }

    /// All generator images keyed by target symbol.
    pub fn images(&self) -> BTreeMap<String, Section<S>> {
        let tsys = self.target.system();
        let mut out = BTreeMap::new();
        for (i, img) in self.coord_images.iter().enumerate() {
            out.insert(tsys.coord_vars().name(i).to_string(), img.clone());
        }
        for (j, img) in self.param_images.iter().enumerate() {
            out.insert(tsys.param_name(j).to_string(), img.clone());
        }
        out
    }

    /// Pulls a target section back along the morphism.
    ///
    /// Parameters substitute directly; each coefficient is expanded around
    /// the base parts of the coordinate images by the finite Taylor sum
    /// `sum_k d^k f(b) / k! * nu^k`, with `nu` the nilpotent shifts.
    ///
    /// On the truncated quotients the pullback is a unital algebra
    /// morphism whenever the source truncation order does not exceed the
    /// target's (the quotient maps are then compatible). With only odd
    /// parameters no monomial ever reaches the default cutoff and the law
    /// is unconditional.
    pub fn pullback(&self, f: &Section<S>) -> Result<Section<S>> {
        if !same_system(f.system(), self.target.system()) {
            return Err(Error::SystemMismatch);
        }
        let ssys = self.source.system().clone();
        let svars = ssys.coord_vars();
        // Base parts and nilpotent shifts of the coordinate images.
        let bases: Vec<RatFn<S>> = self.coord_images.iter().map(|b| b.epsilon()).collect();
        let shifts: Vec<Section<S>> = self
            .coord_images
            .iter()
            .map(|b| b.nilpotent_part())
            .collect();
        let shifted: Vec<usize> = (0..shifts.len())
            .filter(|&i| !shifts[i].is_zero())
            .collect();
        let t = ssys.truncation();

        let mut out = Section::zero(&ssys);
        for (alpha, coeff) in f.terms() {
            // Image of the parameter monomial, multiplied in canonical order.
            let mut par = Section::one(&ssys);
            for (j, e) in alpha.iter() {
                par = par.mul(&self.param_images[j].pow(e as u32))?;
            }
            if par.is_zero() {
                continue;
            }
            // Taylor expansion of the coefficient along the shifts.
            let taylor = taylor_expand(coeff, &bases, &shifts, &shifted, t, svars, &ssys)?;
            out = out.add(&taylor.mul(&par)?)?;
        }
        Ok(out)
    }

    /// Composes with `next`, yielding the morphism source -> next.target.
    ///
    /// `self` is applied first: the composite pullback is
    /// `self.pullback . next.pullback`.
    pub fn then(&self, next: &Morphism<S>) -> Result<Morphism<S>> {
        if self.target != next.source {
            return Err(Error::DomainMismatch(
                self.target.name().to_string(),
                next.source.name().to_string(),
            ));
        }
        let coord_images = next
            .coord_images
            .iter()
            .map(|img| self.pullback(img))
            .collect::<Result<Vec<_>>>()?;
        let param_images = next
            .param_images
            .iter()
            .map(|img| self.pullback(img))
            .collect::<Result<Vec<_>>>()?;
        Morphism::new(
            self.source.clone(),
            next.target.clone(),
            coord_images,
            param_images,
        )
    }

    /// The base map: per target coordinate, the base projection of its
    /// image, a rational map between the degree-0 coordinate spaces.
    pub fn base_map(&self) -> Vec<RatFn<S>> {
        self.coord_images.iter().map(|b| b.epsilon()).collect()
    }

    /// Applies the base map to a source point.
    pub fn apply_base(&self, m: &Point<S>) -> Result<Point<S>> {
        let values = self
            .base_map()
            .iter()
            .map(|f| f.evaluate(m.values()))
            .collect::<Result<Vec<_>>>()?;
        Ok(Point::new(values))
    }
}

/// `sum_k (d^k f)(b) / k! * nu^k` over multi-indices `k` supported on the
/// shifted coordinates, truncated at order `t`.
fn taylor_expand<S: Scalar>(
    coeff: &RatFn<S>,
    bases: &[RatFn<S>],
    shifts: &[Section<S>],
    shifted: &[usize],
    t: usize,
    svars: &crate::poly::VarSet,
    ssys: &Arc<ParameterSystem>,
) -> Result<Section<S>> {
    fn walk<S: Scalar>(
        f_deriv: &RatFn<S>,
        pos: usize,
        budget: usize,
        kfact: u64,
        nu_pow: &Section<S>,
        bases: &[RatFn<S>],
        shifts: &[Section<S>],
        shifted: &[usize],
        svars: &crate::poly::VarSet,
        acc: &mut Section<S>,
    ) -> Result<()> {
        if pos == shifted.len() {
            let inv_fact = S::one() / S::from_int(kfact as i64);
            let value = f_deriv.compose(svars, bases)?.scale(&inv_fact);
            *acc = acc.add(&nu_pow.scale(&value))?;
            return Ok(());
        }
        let v = shifted[pos];
        let mut d = f_deriv.clone();
        let mut pow = nu_pow.clone();
        let mut fact = kfact;
        for k in 0..=budget {
            if k > 0 {
                pow = pow.mul(&shifts[v])?;
                if pow.is_zero() {
                    break;
                }
                d = d.derivative(v);
                fact *= k as u64;
            }
            walk(
                &d,
                pos + 1,
                budget - k,
                fact,
                &pow,
                bases,
                shifts,
                shifted,
                svars,
                acc,
            )?;
        }
        Ok(())
    }

    let mut acc = Section::zero(ssys);
    walk(
        coeff,
        0,
        t,
        1,
        &Section::one(ssys),
        bases,
        shifts,
        shifted,
        svars,
        &mut acc,
    )?;
    Ok(acc)
}

/// The evaluation character at a point: evaluates the base projection.
pub fn character_from_point<S: Scalar>(m: &Point<S>, f: &Section<S>) -> Result<S> {
    if m.values().len() != f.system().coord_count() {
        return Err(Error::Declaration(
            "point does not assign every coordinate".into(),
        ));
    }
    f.epsilon().evaluate(m.values())
}

/// Reconstructs the point from the scalar images of the generators.
///
/// Nonzero-degree generators must map to 0: a scalar has degree 0.
pub fn point_from_character<S: Scalar>(
    domain: &Domain,
    chi: &BTreeMap<String, S>,
) -> Result<Point<S>> {
    let sys = domain.system();
    for (name, value) in chi {
        if sys.param_index(name).is_some() {
            if !value.is_zero() {
                return Err(Error::CharacterInconsistent(name.clone()));
            }
        } else if sys.coord_index(name).is_none() {
            return Err(Error::UnknownSymbol(name.clone()));
        }
    }
    let values = sys
        .coord_vars()
        .names()
        .iter()
        .map(|n| {
            chi.get(n)
                .cloned()
                .ok_or_else(|| Error::MissingBinding(n.clone()))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Point::new(values))
}

/// Builds the morphism determined by an algebra map on generators: the
/// reconstruction direction of the morphism/algebra-morphism bijection.
pub fn morphism_from_algebra_map<S: Scalar>(
    source: &Domain,
    target: &Domain,
    images: &BTreeMap<String, Section<S>>,
) -> Result<Morphism<S>> {
    Morphism::from_images(source.clone(), target.clone(), images)
}

impl<S: Scalar> fmt::Display for Morphism<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} -> {}", self.source.name(), self.target.name())?;
        let tsys = self.target.system();
        for (i, img) in self.coord_images.iter().enumerate() {
            writeln!(f, "{} := {}", tsys.coord_vars().name(i), img)?;
        }
        for (j, img) in self.param_images.iter().enumerate() {
            writeln!(f, "{} := {}", tsys.param_name(j), img)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rat;

    type Sec = Section<Rat>;

    fn source_domain() -> Domain {
        // U with coordinate x and odd parameters xi1, xi2 (rank 1).
        let sys = ParameterSystem::new(
            1,
            vec!["x".into()],
            vec![
                ("xi1".into(), Degree::parse("1").unwrap()),
                ("xi2".into(), Degree::parse("1").unwrap()),
            ],
            None,
        )
        .unwrap();
        Domain::new("U", sys)
    }

    fn target_line() -> Domain {
        let sys = ParameterSystem::new(1, vec!["y".into()], vec![], Some(2)).unwrap();
        Domain::new("V", sys)
    }

    /// phi*(y) = x + xi1 xi2.
    fn shift_morphism() -> Morphism<Rat> {
        let u = source_domain();
        let v = target_line();
        let x = Sec::coordinate(u.system(), 0);
        let xi1 = Sec::parameter(u.system(), 0);
        let xi2 = Sec::parameter(u.system(), 1);
        let img = x.add(&xi1.mul(&xi2).unwrap()).unwrap();
        Morphism::new(u, v, vec![img], vec![]).unwrap()
    }

    #[test]
    fn identity_pullback_is_identity() {
        let u = source_domain();
        let id = Morphism::identity(&u);
        let x = Sec::coordinate(u.system(), 0);
        let xi1 = Sec::parameter(u.system(), 0);
        let f = x.mul(&x).unwrap().add(&xi1.scale(&x.epsilon())).unwrap();
        assert_eq!(id.pullback(&f).unwrap(), f);
    }

    #[test]
    fn taylor_shift_on_square() {
        let phi = shift_morphism();
        let v = phi.target().clone();
        let y = Sec::coordinate(v.system(), 0);
        let got = phi.pullback(&y.mul(&y).unwrap()).unwrap();
        // (x + xi1 xi2)^2 = x^2 + 2x xi1 xi2
        let u = phi.source().clone();
        let x = Sec::coordinate(u.system(), 0);
        let xi12 = Sec::parameter(u.system(), 0)
            .mul(&Sec::parameter(u.system(), 1))
            .unwrap();
        let want = x
            .mul(&x)
            .unwrap()
            .add(&xi12.scale(&x.epsilon().scale(&Rat::from_int(2))))
            .unwrap();
        assert_eq!(got, want);
    }

    #[test]
    fn taylor_shift_on_reciprocal() {
        let phi = shift_morphism();
        let v = phi.target().clone();
        let y = Sec::coordinate(v.system(), 0);
        let inv_y = Sec::from_base(v.system(), y.epsilon().inv().unwrap());
        let got = phi.pullback(&inv_y).unwrap();
        // 1/(x + xi1 xi2) = 1/x - xi1 xi2 / x^2
        let u = phi.source().clone();
        let x = Sec::coordinate(u.system(), 0);
        let xi12 = Sec::parameter(u.system(), 0)
            .mul(&Sec::parameter(u.system(), 1))
            .unwrap();
        let inv_x = x.epsilon().inv().unwrap();
        let want = Sec::from_base(u.system(), inv_x.clone())
            .sub(&xi12.scale(&inv_x.pow(2)))
            .unwrap();
        assert_eq!(got, want);
        // Pullback is multiplicative here: phi*(y) phi*(1/y) = 1.
        let y_img = phi.pullback(&y).unwrap();
        assert_eq!(y_img.mul(&got).unwrap(), Sec::one(u.system()));
    }

    #[test]
    fn composition_of_linear_maps() {
        let rank = 1;
        let mk_line = |name: &str, coord: &str| {
            Domain::new(
                name,
                ParameterSystem::new(rank, vec![coord.into()], vec![], Some(0)).unwrap(),
            )
        };
        let m = mk_line("M", "w");
        let n = mk_line("N", "x");
        let p = mk_line("P", "y");
        let psi = Morphism::new(
            m.clone(),
            n.clone(),
            vec![Sec::coordinate(m.system(), 0).scale_scalar(&Rat::from_int(3))],
            vec![],
        )
        .unwrap();
        let phi = Morphism::new(
            n.clone(),
            p.clone(),
            vec![Sec::coordinate(n.system(), 0).scale_scalar(&Rat::from_int(2))],
            vec![],
        )
        .unwrap();
        let comp = psi.then(&phi).unwrap();
        let want = Sec::coordinate(m.system(), 0).scale_scalar(&Rat::from_int(6));
        assert_eq!(comp.coord_image(0), &want);
        // Identity laws.
        let id_m = Morphism::identity(&m);
        assert_eq!(id_m.then(&psi).unwrap(), psi);
        assert_eq!(psi.then(&Morphism::identity(&n)).unwrap(), psi);
    }

    #[test]
    fn base_map_kills_parameters() {
        let phi = shift_morphism();
        let base = phi.base_map();
        let u = phi.source().clone();
        assert_eq!(base[0], RatFn::var(u.system().coord_vars(), 0));
    }

    #[test]
    fn characters_and_points() {
        let u = source_domain();
        let x = Sec::coordinate(u.system(), 0);
        let xi12 = Sec::parameter(u.system(), 0)
            .mul(&Sec::parameter(u.system(), 1))
            .unwrap();
        let f = x.mul(&x).unwrap().add(&xi12.scale(&x.epsilon())).unwrap();
        let m = Point::new(vec![Rat::from_int(2)]);
        assert_eq!(character_from_point(&m, &f).unwrap(), Rat::from_int(4));
        assert_eq!(
            character_from_point(&m, &Sec::one(u.system())).unwrap(),
            Rat::from_int(1)
        );
        assert_eq!(
            character_from_point(&m, &Sec::parameter(u.system(), 0)).unwrap(),
            Rat::from_int(0)
        );

        let mut chi = BTreeMap::new();
        chi.insert("x".to_string(), Rat::from_int(2));
        let p = point_from_character(&u, &chi).unwrap();
        assert_eq!(p, m);
        chi.insert("xi1".to_string(), Rat::from_int(5));
        assert_eq!(
            point_from_character(&u, &chi),
            Err(Error::CharacterInconsistent("xi1".into()))
        );
    }

    #[test]
    fn character_naturality_along_base_map() {
        let phi = shift_morphism();
        let v = phi.target().clone();
        let y = Sec::coordinate(v.system(), 0);
        let f = y.mul(&y).unwrap();
        for k in -3..=3 {
            let m = Point::new(vec![Rat::from_int(k)]);
            let lhs = character_from_point(&m, &phi.pullback(&f).unwrap()).unwrap();
            let rhs = character_from_point(&phi.apply_base(&m).unwrap(), &f).unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn algebra_map_reconstruction_round_trip() {
        let u = source_domain();
        // Target R^{1|1} with generators (y, eta).
        let v = Domain::new(
            "V",
            ParameterSystem::new(
                1,
                vec!["y".into()],
                vec![("eta".into(), Degree::parse("1").unwrap())],
                None,
            )
            .unwrap(),
        );
        let x = Sec::coordinate(u.system(), 0);
        let xi1 = Sec::parameter(u.system(), 0);
        let xi2 = Sec::parameter(u.system(), 1);
        let mut images = BTreeMap::new();
        images.insert("y".to_string(), x.add(&xi1.mul(&xi2).unwrap()).unwrap());
        images.insert("eta".to_string(), xi1.clone());
        let phi = morphism_from_algebra_map(&u, &v, &images).unwrap();
        // Round trip: rebuilding from the generator images reproduces phi.
        let again = morphism_from_algebra_map(&u, &v, &phi.images()).unwrap();
        assert_eq!(phi, again);
        // And the generator images of the built morphism equal the input.
        assert_eq!(phi.images(), images);
        // pullback of y * eta: (x + xi1 xi2) xi1 = x xi1.
        let y_eta = Sec::coordinate(v.system(), 0)
            .mul(&Sec::parameter(v.system(), 0))
            .unwrap();
        assert_eq!(
            phi.pullback(&y_eta).unwrap(),
            xi1.scale(&x.epsilon())
        );
        // Degree violations are rejected.
        let mut bad = images.clone();
        bad.insert("eta".to_string(), x.clone());
        assert!(matches!(
            morphism_from_algebra_map(&u, &v, &bad),
            Err(Error::DegreeViolation { .. })
        ));
    }

    #[test]
    fn terminal_object() {
        let u = source_domain();
        let to_pt = Morphism::to_point(&u);
        // Pullback embeds scalars as constant sections: r -> r * 1.
        let pt = to_pt.target().clone();
        let r = Sec::constant(pt.system(), Rat::from_int(7) / Rat::from_int(2));
        assert_eq!(
            to_pt.pullback(&r).unwrap(),
            Sec::constant(u.system(), Rat::from_int(7) / Rat::from_int(2))
        );
        // Uniqueness: the point domain has no generators, so any two
        // morphisms to it coincide.
        let other = Morphism::new(u.clone(), Domain::point(1), vec![], vec![]).unwrap();
        assert_eq!(to_pt, other);
    }
}

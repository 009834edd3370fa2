//! Seeded random generators for stress-testing the algebraic laws.
//!
//! All generators keep instances small (low degrees, few terms) so that
//! exact arithmetic stays fast across thousands of cases.

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::Rng;

use crate::degree::Degree;
use crate::domain::{Domain, Morphism};
use crate::error::Result;
use crate::mono::Exponents;
use crate::poly::{Polynomial, VarSet};
use crate::ratfn::RatFn;
use crate::section::{ParameterSystem, Section};
use crate::Rat;

pub fn rat(rng: &mut impl Rng) -> Rat {
    let num = rng.gen_range(-4i64..=4);
    let den = rng.gen_range(1i64..=3);
    Rat::new(num.into(), den.into())
}

pub fn nonzero_rat(rng: &mut impl Rng) -> Rat {
    loop {
        let r = rat(rng);
        if !num::Zero::is_zero(&r) {
            return r;
        }
    }
}

pub fn poly(rng: &mut impl Rng, vars: &VarSet, max_degree: u16, max_terms: usize) -> Polynomial<Rat> {
    let mut p = Polynomial::zero(vars);
    let terms = rng.gen_range(0..=max_terms);
    for _ in 0..terms {
        let e: Vec<u16> = (0..vars.len())
            .map(|_| rng.gen_range(0..=max_degree))
            .collect();
        let mono = Polynomial::from_terms(vars, [(Exponents::new(e), rat(rng))]);
        p = p.add(&mono);
    }
    p
}

pub fn nonzero_poly(rng: &mut impl Rng, vars: &VarSet, max_degree: u16, max_terms: usize) -> Polynomial<Rat> {
    loop {
        let p = poly(rng, vars, max_degree, max_terms);
        if !p.is_zero() {
            return p;
        }
    }
}

pub fn ratfn(rng: &mut impl Rng, vars: &VarSet) -> RatFn<Rat> {
    let num = poly(rng, vars, 2, 2);
    // Keep denominators very small; they multiply up through gcds.
    let den = if rng.gen_bool(0.3) {
        nonzero_poly(rng, vars, 1, 2)
    } else {
        Polynomial::one(vars)
    };
    RatFn::new(num, den).expect("nonzero denominator")
}

pub fn nonzero_ratfn(rng: &mut impl Rng, vars: &VarSet) -> RatFn<Rat> {
    loop {
        let f = ratfn(rng, vars);
        if !f.is_zero() {
            return f;
        }
    }
}

/// A polynomial coefficient wrapped as a fraction. Pullbacks of sections
/// with polynomial coefficients along polynomial base maps never hit
/// poles, which keeps randomized morphism laws total.
pub fn poly_ratfn(rng: &mut impl Rng, vars: &VarSet) -> RatFn<Rat> {
    RatFn::from_poly(poly(rng, vars, 2, 2))
}

/// A random section with at most `max_terms` admissible monomials.
pub fn section(
    rng: &mut impl Rng,
    sys: &Arc<ParameterSystem>,
    max_terms: usize,
) -> Section<Rat> {
    let indices = sys.admissible_indices();
    let mut terms = Vec::new();
    for _ in 0..rng.gen_range(0..=max_terms) {
        let m = indices[rng.gen_range(0..indices.len())].clone();
        terms.push((m, ratfn(rng, sys.coord_vars())));
    }
    Section::from_terms(sys, terms)
}

/// A random section with polynomial coefficients.
pub fn poly_section(
    rng: &mut impl Rng,
    sys: &Arc<ParameterSystem>,
    max_terms: usize,
) -> Section<Rat> {
    poly_section_bounded(rng, sys, max_terms, sys.truncation())
}

/// A random polynomial-coefficient section whose parameter monomials have
/// total order at most `max_order`; products of two such sections stay
/// below the truncation cutoff when `2 * max_order <= T`.
pub fn poly_section_bounded(
    rng: &mut impl Rng,
    sys: &Arc<ParameterSystem>,
    max_terms: usize,
    max_order: usize,
) -> Section<Rat> {
    let indices: Vec<Exponents> = sys
        .admissible_indices()
        .into_iter()
        .filter(|m| m.total() as usize <= max_order)
        .collect();
    let mut terms = Vec::new();
    for _ in 0..rng.gen_range(0..=max_terms) {
        let m = indices[rng.gen_range(0..indices.len())].clone();
        terms.push((m, poly_ratfn(rng, sys.coord_vars())));
    }
    Section::from_terms(sys, terms)
}

/// A random section with formally invertible base projection.
pub fn invertible_section(
    rng: &mut impl Rng,
    sys: &Arc<ParameterSystem>,
    max_terms: usize,
) -> Section<Rat> {
    let mut s = section(rng, sys, max_terms);
    if !s.epsilon().is_invertible() {
        let c = Section::from_base(sys, RatFn::constant(sys.coord_vars(), nonzero_rat(rng)));
        s = s.add(&c).expect("same system");
    }
    s
}

/// A random homogeneous section of the given degree (possibly zero when no
/// admissible monomial has that degree).
pub fn homogeneous_section(
    rng: &mut impl Rng,
    sys: &Arc<ParameterSystem>,
    degree: &Degree,
    max_terms: usize,
) -> Section<Rat> {
    homogeneous_with(rng, sys, degree, max_terms, ratfn)
}

/// A random homogeneous section with polynomial coefficients.
pub fn homogeneous_poly_section(
    rng: &mut impl Rng,
    sys: &Arc<ParameterSystem>,
    degree: &Degree,
    max_terms: usize,
) -> Section<Rat> {
    homogeneous_with(rng, sys, degree, max_terms, poly_ratfn)
}

fn homogeneous_with<R: Rng>(
    rng: &mut R,
    sys: &Arc<ParameterSystem>,
    degree: &Degree,
    max_terms: usize,
    mut coeff: impl FnMut(&mut R, &VarSet) -> RatFn<Rat>,
) -> Section<Rat> {
    let indices: Vec<Exponents> = sys
        .admissible_indices()
        .into_iter()
        .filter(|m| sys.monomial_degree(m) == *degree)
        .collect();
    let mut terms = Vec::new();
    if !indices.is_empty() {
        for _ in 0..rng.gen_range(1..=max_terms) {
            let m = indices[rng.gen_range(0..indices.len())].clone();
            terms.push((m, coeff(rng, sys.coord_vars())));
        }
    }
    Section::from_terms(sys, terms)
}

/// A random degree-preserving morphism between two domains of equal rank.
/// Images carry polynomial coefficients so that composites and pullbacks
/// never run into poles.
pub fn morphism(rng: &mut impl Rng, source: &Domain, target: &Domain) -> Result<Morphism<Rat>> {
    let ssys = source.system();
    let tsys = target.system();
    let mut images = BTreeMap::new();
    let zero_deg = Degree::zero(tsys.rank());
    for name in target.generator_names() {
        let img = if tsys.coord_index(&name).is_some() {
            // Base part plus a small degree-0 nilpotent tail.
            let base = Section::from_base(ssys, poly_ratfn(rng, ssys.coord_vars()));
            let tail = homogeneous_poly_section(rng, ssys, &zero_deg, 1).nilpotent_part();
            base.add(&tail)?
        } else {
            let j = tsys.param_index(&name).expect("generator");
            homogeneous_poly_section(rng, ssys, tsys.param_degree(j), 1)
        };
        images.insert(name, img);
    }
    Morphism::from_images(source.clone(), target.clone(), &images)
}

/// Small standard domains used across the stress tests.
pub fn fixture_domains() -> Vec<Domain> {
    let d = |name: &str, rank: usize, coords: &[&str], params: &[(&str, &str)], t: Option<usize>| {
        Domain::new(
            name,
            ParameterSystem::new(
                rank,
                coords.iter().map(|s| s.to_string()).collect(),
                params
                    .iter()
                    .map(|(n, b)| (n.to_string(), Degree::parse(b).unwrap()))
                    .collect(),
                t,
            )
            .unwrap(),
        )
    };
    vec![
        d("LineOdd", 1, &["x"], &[("xi1", "1"), ("xi2", "1")], None),
        d("PlaneOdd", 1, &["x", "y"], &[("xi", "1")], None),
        d(
            "Mixed2",
            2,
            &["x"],
            &[("eta", "11"), ("th1", "01"), ("th2", "10")],
            Some(4),
        ),
        d("EvenOnly", 2, &["x", "y"], &[("eta", "11")], Some(3)),
        d("Bare", 1, &["w"], &[], Some(0)),
    ]
}

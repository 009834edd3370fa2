//! Exact computer algebra for Z2^n-graded geometry at desk scale.
//!
//! The crate implements Z2^n-commutative truncated formal power series with
//! rational-function coefficients, morphisms between graded coordinate
//! domains, graded localization, tensor/product constructions, and a
//! finite-basis presheaf and sheafification engine.
//!
//! The algebra core is generic over the scalar type via [`Scalar`]
//! (`num-traits` bounds); the canonical instantiation uses arbitrary
//! precision rationals and is exported through the type aliases below.

pub mod degree;
pub mod domain;
pub mod error;
pub mod localization;
pub mod mono;
pub mod parse;
pub mod poly;
pub mod product;
pub mod ratfn;
pub mod sample;
pub mod scalar;
pub mod section;
pub mod sheaf;

pub use degree::{nonzero_degrees, standard_order, Degree, GradedDimension};
pub use domain::{character_from_point, morphism_from_algebra_map, point_from_character, Domain, Morphism, Point};
pub use error::{Error, Result};
pub use localization::{lambda_map, GradedFraction};
pub use parse::{domain_to_str, identifiers, parse_domain_str, parse_expression, parse_morphism_str, parse_space_str, SpaceFile};
pub use poly::{Polynomial, VarSet};
pub use product::{fundamental_iso, fundamental_iso_inv, product_of_morphisms, tensor_pullback, universal_morphism, ProductDomain, Side, TensorElement};
pub use ratfn::RatFn;
pub use section::{ParameterSystem, Section};
pub use scalar::Scalar;
pub use sheaf::{cocycle_check_generic, direct_image_compare, push_forward, BasisPresheaf, DirectImageComparison, Extension, FinAlg, FinPresheaf, FiniteSpace, GlueData, PointMap, Sheafification};

/// Canonical exact scalar: arbitrary precision rationals.
pub type Rat = num::BigRational;

/// Polynomials with exact rational coefficients.
pub type RatPoly = Polynomial<Rat>;

/// The exact coefficient field: rational functions in the degree-0
/// coordinates.
pub type BaseFunction = RatFn<Rat>;

/// Graded sections over the exact scalar.
pub type GradedSection = Section<Rat>;

/// Domain morphisms over the exact scalar.
pub type DomainMorphism = Morphism<Rat>;

/// Tensor elements over the exact scalar.
pub type Tensor = TensorElement<Rat>;

/// Graded fractions over the exact scalar.
pub type Fraction = GradedFraction<Rat>;

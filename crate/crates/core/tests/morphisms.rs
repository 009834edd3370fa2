//! Randomized checks of the pullback morphism laws, character naturality,
//! and the generator-level reconstruction round trips.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use z2n_algebra::sample;
use z2n_algebra::{
    character_from_point, morphism_from_algebra_map, point_from_character, Domain, DomainMorphism,
    GradedSection, Morphism, Point, Rat,
};

fn pairs() -> Vec<(Domain, Domain)> {
    let ds = sample::fixture_domains();
    // Source and target must share the grading rank; the quotient maps are
    // compatible when the source truncation does not exceed the target's.
    let mut out = Vec::new();
    for s in &ds {
        for t in &ds {
            if s.system().rank() == t.system().rank()
                && s.system().truncation() <= t.system().truncation()
            {
                out.push((s.clone(), t.clone()));
            }
        }
    }
    out
}

#[test]
fn pullback_is_a_unital_algebra_morphism() {
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    for (s, t) in pairs() {
        for _ in 0..6 {
            let phi = sample::morphism(&mut rng, &s, &t).unwrap();
            let one_t = GradedSection::one(t.system());
            assert_eq!(phi.pullback(&one_t).unwrap(), GradedSection::one(s.system()));
            for _ in 0..4 {
                let f = sample::poly_section(&mut rng, t.system(), 3);
                let g = sample::poly_section(&mut rng, t.system(), 3);
                let fg = f.mul(&g).unwrap();
                assert_eq!(
                    phi.pullback(&fg).unwrap(),
                    phi.pullback(&f).unwrap().mul(&phi.pullback(&g).unwrap()).unwrap()
                );
                assert_eq!(
                    phi.pullback(&f.add(&g).unwrap()).unwrap(),
                    phi.pullback(&f).unwrap().add(&phi.pullback(&g).unwrap()).unwrap()
                );
            }
        }
    }
}

#[test]
fn composition_is_contravariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let ds = sample::fixture_domains();
    for m in &ds {
        for n in &ds {
            for p in &ds {
                if m.system().rank() != n.system().rank()
                    || n.system().rank() != p.system().rank()
                    || m.system().truncation() > n.system().truncation()
                    || n.system().truncation() > p.system().truncation()
                {
                    continue;
                }
                let psi = sample::morphism(&mut rng, m, n).unwrap();
                let phi = sample::morphism(&mut rng, n, p).unwrap();
                let comp = psi.then(&phi).unwrap();
                for _ in 0..3 {
                    let f = sample::poly_section(&mut rng, p.system(), 3);
                    assert_eq!(
                        comp.pullback(&f).unwrap(),
                        psi.pullback(&phi.pullback(&f).unwrap()).unwrap()
                    );
                }
            }
        }
    }
}

#[test]
fn character_naturality() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for (s, t) in pairs() {
        let phi = sample::morphism(&mut rng, &s, &t).unwrap();
        let mut hits = 0;
        let mut attempts = 0;
        while hits < 10 && attempts < 200 {
            attempts += 1;
            let m = Point::new(
                (0..s.system().coord_count())
                    .map(|_| sample::rat(&mut rng))
                    .collect(),
            );
            let f = sample::poly_section(&mut rng, t.system(), 3);
            let Ok(n) = phi.apply_base(&m) else { continue };
            let (Ok(lhs), Ok(rhs)) = (
                character_from_point(&m, &phi.pullback(&f).unwrap()),
                character_from_point(&n, &f),
            ) else {
                continue;
            };
            assert_eq!(lhs, rhs);
            hits += 1;
        }
    }
}

#[test]
fn character_point_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for d in sample::fixture_domains() {
        for _ in 0..10 {
            let m = Point::new(
                (0..d.system().coord_count())
                    .map(|_| sample::rat(&mut rng))
                    .collect(),
            );
            // The character evaluates generators; rebuilding the point from
            // those values recovers it.
            let mut chi = std::collections::BTreeMap::new();
            for name in d.generator_names() {
                let g: GradedSection = d.generator(&name).unwrap();
                chi.insert(name, character_from_point(&m, &g).unwrap());
            }
            assert_eq!(point_from_character(&d, &chi).unwrap(), m);
        }
    }
}

#[test]
fn algebra_map_bijection_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(24);
    for (s, t) in pairs() {
        for _ in 0..5 {
            let phi = sample::morphism(&mut rng, &s, &t).unwrap();
            let rebuilt = morphism_from_algebra_map(&s, &t, &phi.images()).unwrap();
            assert_eq!(phi, rebuilt);
            assert_eq!(rebuilt.images(), phi.images());
        }
    }
}

#[test]
fn point_domain_is_terminal() {
    for d in sample::fixture_domains() {
        let rank = d.system().rank();
        let to_pt: DomainMorphism = Morphism::to_point(&d);
        assert_eq!(to_pt.target(), &Domain::point(rank));
        // Scalars pull back to scalar multiples of the unit.
        let r = GradedSection::constant(
            Domain::point(rank).system(),
            Rat::new(5.into(), 3.into()),
        );
        assert_eq!(
            to_pt.pullback(&r).unwrap(),
            GradedSection::constant(d.system(), Rat::new(5.into(), 3.into()))
        );
        // Uniqueness: the target has no generators, so every candidate
        // morphism carries the same (empty) image data.
        let other: DomainMorphism =
            Morphism::new(d.clone(), Domain::point(rank), vec![], vec![]).unwrap();
        assert_eq!(to_pt, other);
    }
}

//! The finite-space suite: sheaf axioms by enumeration, basis extensions
//! with the flat comparison, stalk preservation, gluing cocycles (both for
//! tabulated transitions and chart-change morphisms), and the direct-image
//! comparison.

use std::collections::BTreeMap;

use z2n_algebra::{
    cocycle_check_generic, direct_image_compare, parse_expression, BasisPresheaf, Degree, Domain,
    DomainMorphism, FinAlg, FinPresheaf, FiniteSpace, GlueData, ParameterSystem, PointMap, Rat,
};

fn names(v: &[&str]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}

/// Five finite spaces of varying shape.
fn space_suite() -> Vec<FiniteSpace> {
    vec![
        // Discrete two points.
        FiniteSpace::new(names(&["a", "b"]), vec![0b00, 0b01, 0b10, 0b11], None).unwrap(),
        // Sierpinski.
        FiniteSpace::new(names(&["a", "b"]), vec![0b00, 0b01, 0b11], None).unwrap(),
        // Three-point line: two open ends, closed middle.
        FiniteSpace::new(
            names(&["a", "b", "c"]),
            vec![0b000, 0b001, 0b100, 0b101, 0b111],
            None,
        )
        .unwrap(),
        // A nested chain.
        FiniteSpace::new(
            names(&["a", "b", "c"]),
            vec![0b000, 0b001, 0b011, 0b111],
            None,
        )
        .unwrap(),
        // Four points generated by two overlapping rectangles.
        FiniteSpace::generated(
            names(&["a", "b", "c", "d"]),
            vec![0b0011, 0b0110, 0b1100],
        )
        .unwrap(),
    ]
}

#[test]
fn sheafification_output_satisfies_both_axioms() {
    for space in space_suite() {
        for alg in [FinAlg::cyclic(2), FinAlg::cyclic(4)] {
            let p = FinPresheaf::constant(space.clone(), alg);
            let sh = p.sheafify();
            assert!(sh.presheaf.is_separated(), "separated on {space:?}");
            assert!(sh.presheaf.satisfies_gluing(), "gluing on {space:?}");
            // The unit is a presheaf-of-algebras morphism, and an iso when
            // the input is already a sheaf.
            assert!(p.is_presheaf_morphism(&sh.presheaf, &sh.unit));
        }
        let f = FinPresheaf::functions(space.clone(), FinAlg::cyclic(2));
        assert!(f.is_sheaf());
        let shf = f.sheafify();
        for u in 0..space.n_opens() {
            assert!(f.alg(u).is_iso_to(shf.presheaf.alg(u), &shf.unit[u]));
        }
    }
}

#[test]
fn stalks_preserved_under_sheafification() {
    for space in space_suite() {
        let p = FinPresheaf::constant(space.clone(), FinAlg::cyclic(2));
        let sh = p.sheafify();
        for x in 0..space.n_points() {
            let (stalk, u) = p.stalk(x);
            let (stalk_sh, _) = sh.presheaf.stalk(x);
            assert!(stalk.is_iso_to(stalk_sh, &sh.unit[u]));
        }
    }
}

#[test]
fn flat_map_bijective_on_basis_opens() {
    for space in space_suite() {
        // Use the basis of all opens with the function sheaf as the basis
        // data: the extension agrees with the sheaf on basis opens.
        let f = FinPresheaf::functions(space.clone(), FinAlg::cyclic(2));
        let mut algs = BTreeMap::new();
        let mut res = BTreeMap::new();
        for &b in space.basis() {
            algs.insert(b, f.alg(b).clone());
            for &c in space.basis() {
                if space.open_mask(c) & !space.open_mask(b) == 0 {
                    res.insert((b, c), f.restriction(b, c).to_vec());
                }
            }
        }
        let bp = BasisPresheaf::new(space.clone(), algs, res).unwrap();
        let ext = bp.extend();
        for &b in space.basis() {
            assert!(
                bp.alg(b).is_iso_to(ext.presheaf.alg(b), &ext.flat[&b]),
                "flat map must be a bijective algebra morphism"
            );
        }
    }
}

#[test]
fn extension_on_a_proper_basis() {
    // Basis = the two singletons and the empty set of the discrete space;
    // the extension over the whole space is the compatible-pair algebra.
    let space = FiniteSpace::new(
        names(&["a", "b"]),
        vec![0b00, 0b01, 0b10, 0b11],
        Some(vec![0, 1, 2]),
    )
    .unwrap();
    let mut algs = BTreeMap::new();
    algs.insert(0, FinAlg::zero_ring());
    algs.insert(1, FinAlg::cyclic(2));
    algs.insert(2, FinAlg::cyclic(2));
    let mut res = BTreeMap::new();
    res.insert((1, 0), vec![0, 0]);
    res.insert((2, 0), vec![0, 0]);
    let bp = BasisPresheaf::new(space.clone(), algs, res).unwrap();
    let ext = bp.extend();
    let whole = space.open_id(0b11).unwrap();
    // Families over {empty, {a}, {b}}: the empty-open member is unique, so
    // 2 x 2 compatible pairs.
    assert_eq!(ext.presheaf.alg(whole).size(), 4);
    let empty = space.open_id(0).unwrap();
    assert_eq!(ext.presheaf.alg(empty).size(), 1);
    // The extension is separated and glues here (a sheaf of pairs).
    assert!(ext.presheaf.is_sheaf());
}

#[test]
fn glue_accepts_valid_cocycles_and_rejects_perturbed_ones() {
    // Cover a 3-open chain by two copies of the whole space with product
    // ring sections; the factor swap is a ring automorphism.
    let space = FiniteSpace::new(names(&["a", "b"]), vec![0b00, 0b01, 0b11], None).unwrap();
    let whole = space.open_id(0b11).unwrap();
    let z2z2 = FinAlg::product(&FinAlg::cyclic(2), &FinAlg::cyclic(2));
    let pieces: Vec<FinPresheaf> = (0..3)
        .map(|_| FinPresheaf::constant(space.subspace(whole), z2z2.clone()))
        .collect();
    let swap = vec![0usize, 2, 1, 3];
    let id4: Vec<usize> = (0..4).collect();
    let tables = |t: &Vec<usize>| -> BTreeMap<u32, Vec<usize>> {
        (0..space.n_opens())
            .map(|u| (space.open_mask(u), t.clone()))
            .collect()
    };
    // Consistent family: every transition is the swap conjugated
    // consistently, here simply swap everywhere between distinct indices
    // fails (swap . swap = id != swap), so use identity everywhere.
    let mut good = BTreeMap::new();
    for i in 0..3usize {
        for j in 0..3usize {
            if i != j {
                good.insert((i, j), tables(&id4));
            }
        }
    }
    let glue = GlueData {
        space: space.clone(),
        cover: vec![whole, whole, whole],
        pieces: pieces.clone(),
        transitions: good.clone(),
    };
    glue.check_cocycle().unwrap();
    let glued = glue.glue().unwrap();
    // Gluing three identical copies along identities: sections are
    // triples with all components equal, one per original section.
    assert_eq!(glued.alg(whole).size(), 4);
    // Perturb one transition.
    let mut bad = good;
    bad.insert((0, 1), tables(&swap));
    let broken = GlueData {
        space,
        cover: vec![whole, whole, whole],
        pieces,
        transitions: bad,
    };
    assert!(broken.check_cocycle().is_err());
}

#[test]
fn chart_transition_cocycle_from_morphisms() {
    // Three chart presentations of one domain, with explicitly inverse
    // coordinate changes; the transitions Phi_i^{-1} ; Phi_j satisfy the
    // cocycle identity by construction, and a perturbed family fails.
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
    let d = Domain::new("U", sys);
    let parse = |s: &str| parse_expression::<Rat>(s, &d).unwrap();
    let mk = |x_img: &str, xi1_img: &str, xi2_img: &str| -> DomainMorphism {
        z2n_algebra::Morphism::new(
            d.clone(),
            d.clone(),
            vec![parse(x_img)],
            vec![parse(xi1_img), parse(xi2_img)],
        )
        .unwrap()
    };
    // Phi_0 = identity; Phi_1 shifts x by xi1 xi2; Phi_2 rescales.
    let phis = [
        mk("x", "xi1", "xi2"),
        mk("x + xi1*xi2", "xi1", "xi2"),
        mk("2*x", "2*xi1", "xi2"),
    ];
    let inverses = [
        mk("x", "xi1", "xi2"),
        mk("x - xi1*xi2", "xi1", "xi2"),
        mk("1/2*x", "1/2*xi1", "xi2"),
    ];
    for (phi, inv) in phis.iter().zip(&inverses) {
        assert_eq!(phi.then(inv).unwrap(), z2n_algebra::Morphism::identity(&d));
        assert_eq!(inv.then(phi).unwrap(), z2n_algebra::Morphism::identity(&d));
    }
    // t_{ij} = Phi_i^{-1} ; Phi_j composes as t_{ij} ; t_{jk} = t_{ik}.
    let t = |i: usize, j: usize| inverses[i].then(&phis[j]).unwrap();
    assert!(cocycle_check_generic(
        3,
        |i, j| Some(t(i, j)),
        |a, b| a.then(b).ok(),
        |a, b| a == b,
    )
    .is_ok());
    // Perturb one transition: replace t(0,1) by an unrelated automorphism.
    let perturbed = mk("x + 1", "xi1", "xi2");
    let get = |i: usize, j: usize| {
        if (i, j) == (0, 1) {
            Some(perturbed.clone())
        } else {
            Some(t(i, j))
        }
    };
    assert!(matches!(
        cocycle_check_generic(3, get, |a, b| a.then(b).ok(), |a, b| a == b),
        Err((0, 1, _))
    ));
}

#[test]
fn direct_image_comparison_on_tabulated_examples() {
    // Collapse maps and inclusions across the suite.
    let line = FiniteSpace::new(
        names(&["a", "b", "c"]),
        vec![0b000, 0b001, 0b100, 0b101, 0b111],
        None,
    )
    .unwrap();
    let point = FiniteSpace::new(names(&["p"]), vec![0b0, 0b1], None).unwrap();
    let collapse = PointMap::new(line.clone(), point.clone(), vec![0, 0, 0]).unwrap();
    for alg in [FinAlg::cyclic(2), FinAlg::product(&FinAlg::cyclic(2), &FinAlg::cyclic(2))] {
        let p = FinPresheaf::constant(line.clone(), alg);
        // direct_image_compare validates the morphism property internally.
        let cmp = direct_image_compare(&collapse, &p).unwrap();
        // Restriction compatibility on a chain is covered by the morphism
        // check; spot-check unitality on the whole open.
        let whole = point.open_id(0b1).unwrap();
        let lhs_alg = cmp.pushed_sheafified.alg(whole);
        let rhs_alg = cmp.sheafified_pushed.alg(whole);
        assert_eq!(
            cmp.iota[whole][lhs_alg.one()],
            rhs_alg.one()
        );
    }
    // The identity map gives the identity comparison.
    let idmap = PointMap::new(line.clone(), line.clone(), vec![0, 1, 2]).unwrap();
    let q = FinPresheaf::functions(line, FinAlg::cyclic(2));
    let cmp = direct_image_compare(&idmap, &q).unwrap();
    for u in 0..cmp.pushed_sheafified.space().n_opens() {
        assert!(cmp
            .pushed_sheafified
            .alg(u)
            .is_iso_to(cmp.sheafified_pushed.alg(u), &cmp.iota[u]));
    }
}

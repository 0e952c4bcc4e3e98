use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use triplekit_core::factors::{norm, Element, Factor};
use triplekit_core::grids::rectangular_grid;
use triplekit_core::linalg::{c, max_abs, random_rotation, CMatrix, C64, I, ONE};
use triplekit_core::linear_map::{Branch, RealLinearMap};
use triplekit_core::reconstruction::*;
use triplekit_core::sampling::random_tripotent;
use triplekit_core::tripotent::{is_quadrangle, is_trangle, Tolerance};
use triplekit_core::Error;

fn cfg(samples: usize) -> Config {
    Config { samples, ..Config::default() }
}

fn tol() -> Tolerance {
    Tolerance::default()
}

/// Largest gap between two maps over random tripotents.
fn map_gap(a: &RealLinearMap, b: &RealLinearMap, n: usize) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    (0..n)
        .map(|_| {
            let w = random_tripotent(a.domain(), &mut rng).unwrap();
            norm(&(&a.apply(&w).unwrap() - &b.apply(&w).unwrap()))
        })
        .fold(0.0, f64::max)
}

#[test]
fn spin_identity() {
    let f = Factor::spin(4).unwrap();
    let phi = make_oracle(&f, &Recipe::Identity).unwrap();
    let r = reconstruct_spin(&phi, &cfg(50)).unwrap();
    assert_eq!(r.lambda0(), ONE);
    assert_eq!(r.branch(), Some(Branch::Linear));
    assert_eq!(r.map, RealLinearMap::identity(&f));
    assert_eq!(r.max_residual(), 0.0);
}

#[test]
fn spin_rotation_with_phase() {
    let f = Factor::spin(4).unwrap();
    let lambda0 = C64::from_polar(1.0, PI / 5.0);
    let recipe = Recipe::Spin { lambda0, rotation_seed: 11, antilinear: false };
    let phi = make_oracle(&f, &recipe).unwrap();
    let r = reconstruct_spin(&phi, &cfg(500)).unwrap();
    assert!(r.max_residual() <= 1e-8, "{}", r.max_residual());
    assert!(r.n_samples() >= 500);
    assert_eq!(r.branch(), Some(Branch::Linear));
    assert!(map_gap(&r.map, phi.ground_truth().unwrap(), 200) < 1e-9);

    let truth = random_rotation(4, &mut ChaCha8Rng::seed_from_u64(11));
    let u = rotation_part(&r.map, r.lambda0()).unwrap();
    let same = (r.lambda0() - lambda0).norm() < 1e-12 && (&u - &truth).amax() < 1e-12;
    let flipped = (r.lambda0() + lambda0).norm() < 1e-12 && (&u + &truth).amax() < 1e-12;
    assert!(same || flipped);
}

#[test]
fn spin_antilinear() {
    for d in 3..=6 {
        let f = Factor::spin(d).unwrap();
        let recipe = Recipe::Spin { lambda0: C64::from_polar(1.0, 2.0), rotation_seed: d as u64, antilinear: true };
        let phi = make_oracle(&f, &recipe).unwrap();
        let r = reconstruct_spin(&phi, &cfg(300)).unwrap();
        assert_eq!(r.branch(), Some(Branch::Antilinear));
        assert!(r.max_residual() <= 1e-8);
        assert!(r.verification.triple_residual < 1e-9);
    }
}

#[test]
fn spin_target_must_match() {
    let map = RealLinearMap::new(
        Factor::spin(3).unwrap(),
        Factor::spin(4).unwrap(),
        Branch::Linear,
        CMatrix::identity(4, 3),
    )
    .unwrap();
    let phi = TripotentOracle::from_map(map);
    match reconstruct_spin(&phi, &cfg(10)) {
        Err(Error::Structure { step, .. }) => assert!(step.starts_with("target factor")),
        other => panic!("{other:?}"),
    }
}

#[test]
fn rect_identity() {
    let f = Factor::rect(2, 3).unwrap();
    let phi = make_oracle(&f, &Recipe::Identity).unwrap();
    let r = reconstruct_rectangular(&phi, &cfg(50)).unwrap();
    assert_eq!(r.map, RealLinearMap::identity(&f));
    assert_eq!(r.max_residual(), 0.0);
    assert!(r.blocks[0].form.is_none());
}

#[test]
fn rect_unitary_pair() {
    let f = Factor::rect(3, 3).unwrap();
    let phi = make_oracle(&f, &Recipe::Rect { seed: Some(5), transpose: false, antilinear: false }).unwrap();
    let r = reconstruct_rectangular(&phi, &cfg(300)).unwrap();
    assert!(r.max_residual() <= 1e-8);
    assert_eq!(r.blocks[0].form.as_ref().unwrap().form, 1);
}

#[test]
fn rect_transpose_form() {
    let f = Factor::rect(3, 3).unwrap();
    let phi = make_oracle(&f, &Recipe::Rect { seed: Some(8), transpose: true, antilinear: false }).unwrap();
    let r = reconstruct_rectangular(&phi, &cfg(300)).unwrap();
    assert!(r.max_residual() <= 1e-8);
    assert_eq!(r.blocks[0].form.as_ref().unwrap().form, 3);
}

#[test]
fn non_square_transpose_changes_shape() {
    let f = Factor::rect(2, 3).unwrap();
    let phi = make_oracle(&f, &Recipe::Rect { seed: Some(1), transpose: true, antilinear: true }).unwrap();
    assert_eq!(phi.target(), &Factor::rect(3, 2).unwrap());
    let r = reconstruct_rectangular(&phi, &cfg(100)).unwrap();
    assert_eq!(r.branch(), Some(Branch::Antilinear));
    assert!(r.max_residual() <= 1e-8);
}

#[test]
fn square_forms_of_plain_maps() {
    let f = Factor::rect(2, 2).unwrap();
    let eye = CMatrix::identity(2, 2);
    let cases = [
        (Recipe::Identity, 1),
        (Recipe::Conjugation, 2),
        (Recipe::Rect { seed: None, transpose: true, antilinear: false }, 3),
        (Recipe::Rect { seed: None, transpose: true, antilinear: true }, 4),
    ];
    for (recipe, form) in cases {
        let t = recipe_map(&f, &recipe).unwrap();
        let s = classify_square_automorphism(&t, tol()).unwrap();
        assert_eq!(s.form, form);
        assert!(max_abs(&(&s.u - &eye)) < 1e-12 && max_abs(&(&s.v - &eye)) < 1e-12);
    }
}

#[test]
fn square_form_recovers_unitaries_up_to_a_scalar() {
    let f = Factor::rect(3, 3).unwrap();
    for (k, (transpose, antilinear)) in [(false, false), (false, true), (true, false), (true, true)].into_iter().enumerate() {
        let t = recipe_map(&f, &Recipe::Rect { seed: Some(40 + k as u64), transpose, antilinear }).unwrap();
        let s = classify_square_automorphism(&t, tol()).unwrap();
        assert_eq!(s.form as usize, 1 + usize::from(antilinear) + 2 * usize::from(transpose));
        let first = s.u.iter().find(|z| z.norm() > 1e-8).unwrap();
        assert!(first.im.abs() < 1e-12 && first.re > 0.0);
        assert!(s.residual < 1e-10);
    }
}

#[test]
fn grid_axiom_failure_names_the_step() {
    let f = Factor::rect(2, 3).unwrap();
    let g = rectangular_grid(2, 3).unwrap();
    let entries = g
        .cells()
        .iter()
        .enumerate()
        .map(|(k, e)| (e.clone(), if k == 1 { -e } else { e.clone() }))
        .collect();
    let phi = TripotentOracle::table(f.clone(), f, entries, tol()).unwrap();
    match reconstruct_rectangular(&phi, &cfg(10)) {
        Err(e @ Error::Structure { .. }) => assert!(e.to_string().starts_with("grid axiom (ii) violated")),
        other => panic!("{other:?}"),
    }
}

fn sum_factor() -> Factor {
    Factor::sum(vec![Factor::spin(3).unwrap(), Factor::rect(2, 2).unwrap()]).unwrap()
}

#[test]
fn atomic_swap() {
    let f = sum_factor();
    let phi = make_oracle(&f, &Recipe::Sum { components: vec![Recipe::Identity, Recipe::Identity], sigma: vec![1, 0] })
        .unwrap();
    let r = reconstruct_atomic(&phi, &cfg(100)).unwrap();
    assert_eq!(r.sigma, vec![1, 0]);
    assert_eq!(r.max_residual(), 0.0);
}

#[test]
fn atomic_mixed_branches() {
    let f = sum_factor();
    let recipe = Recipe::Sum {
        components: vec![
            Recipe::Spin { lambda0: I, rotation_seed: 3, antilinear: false },
            Recipe::Rect { seed: Some(4), transpose: false, antilinear: true },
        ],
        sigma: vec![0, 1],
    };
    let phi = make_oracle(&f, &recipe).unwrap();
    let r = reconstruct_atomic(&phi, &cfg(200)).unwrap();
    assert_eq!(r.branches(), vec![Branch::Linear, Branch::Antilinear]);
    assert_eq!(r.branch(), None);
    assert!(r.max_residual() <= 1e-8);
    assert!(r.blocks.iter().all(|b| b.residual <= 1e-8));
}

#[test]
fn atomic_routing_violation() {
    let f = sum_factor();
    let e0 = Element::basis(&Factor::spin(3).unwrap(), 0).unwrap();
    let e11 = rectangular_grid(2, 2).unwrap().cell(0, 0).clone();
    let x = Element::embed(&f, 0, e0.clone()).unwrap();
    let y = Element::from_components(f.clone(), vec![e0, e11]).unwrap();
    let phi = TripotentOracle::table(f.clone(), f, vec![(x, y)], tol()).unwrap();
    assert!(matches!(reconstruct_atomic(&phi, &cfg(10)), Err(Error::FactorRouting(_))));
}

#[test]
fn discontinuous_phase_is_rejected() {
    let f = Factor::rect(2, 2).unwrap();
    let u = rectangular_grid(2, 2).unwrap().cell(0, 0).clone();
    let w = C64::from_polar(1.0, PI / 3.0);
    let phi = TripotentOracle::table(f.clone(), f, vec![(u.clone(), u.clone()), (u.scale(I), u.scale(w))], tol()).unwrap();
    match detect_branch(&phi, &u, tol()) {
        Err(Error::DiscontinuousPhase { re, im }) => assert!((c(re, im) - w).norm() < 1e-12),
        other => panic!("{other:?}"),
    }
}

#[test]
fn phase_report_is_blind_to_lambda0() {
    let f = Factor::spin(5).unwrap();
    let phi = make_oracle(&f, &Recipe::Spin { lambda0: C64::from_polar(1.0, 0.4), rotation_seed: 2, antilinear: false })
        .unwrap();
    let e0 = Element::basis(&f, 0).unwrap();
    let r = phase_map_report(&phi, &e0, None, 50, 7, tol()).unwrap();
    assert!((r.f_i - I).norm() < 1e-12);
    assert!(r.multiplicativity < 1e-9 && r.conjugation < 1e-9 && r.cross < 1e-9 && r.minus_one < 1e-9);
}

#[test]
fn grid_family_preservation() {
    let g = rectangular_grid(3, 3).unwrap();
    let family = triplekit_core::grids::orthogonal_closure(g.cells(), tol()).unwrap();
    assert_eq!(family.len(), 34);
    let tuples = additive_tuples(&family, tol()).unwrap();
    let phi = make_oracle(g.factor(), &Recipe::Rect { seed: Some(3), transpose: true, antilinear: false }).unwrap();
    let r = check_preservation(&family, &tuples, &phi, tol(), PreservationMode::Full).unwrap();
    assert!(r.ok(), "{:?}", r.violations.first());
    assert!(r.orthogonality_backward_confirmed > 0 && r.additivity_confirmed == tuples.len());
    let r = check_preservation(&family, &tuples, &phi, tol(), PreservationMode::OrderOnly).unwrap();
    assert!(r.ok() && r.orthogonality_forward_confirmed == 0);
}

#[test]
fn quadrangles_and_trangles_are_transported() {
    let g = rectangular_grid(2, 2).unwrap();
    let (e11, e12, e21, e22) = (g.cell(0, 0), g.cell(0, 1), g.cell(1, 0), g.cell(1, 1));
    let u = e12 + e21;
    for (k, recipe) in [
        Recipe::Identity,
        Recipe::Conjugation,
        Recipe::Rect { seed: Some(6), transpose: false, antilinear: false },
        Recipe::Rect { seed: Some(7), transpose: true, antilinear: true },
    ]
    .iter()
    .enumerate()
    {
        let phi = make_oracle(g.factor(), recipe).unwrap();
        let p = |x: &Element| phi.apply(x).unwrap();
        assert!(is_quadrangle(&p(e11), &p(e12), &p(e22), &p(e21), tol()).unwrap(), "recipe {k}");
        assert!(is_trangle(&p(e11), &p(&u), &p(e22), tol()).unwrap(), "recipe {k}");
    }
}

#[test]
fn dispatch_rejects_unsupported_factors() {
    let phi = make_oracle(&Factor::herm(3).unwrap(), &Recipe::Identity).unwrap();
    assert!(matches!(reconstruct(&phi, &cfg(10)), Err(Error::Precondition(_))));
    let phi = make_oracle(&Factor::rect(1, 3).unwrap(), &Recipe::Identity).unwrap();
    assert!(matches!(reconstruct(&phi, &cfg(10)), Err(Error::Precondition(_))));
}

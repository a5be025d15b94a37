//! Group law, coordinates, canonical points and lattice quantities.

use std::f64::consts::PI;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use horocycle::group::{
    act_point, canonicalize, compose, flow_a, flow_phi, flow_u, inverse, iwasawa, iwasawa_compose, proxy_distance,
    GroupElement, Mat2,
};
use horocycle::lattice::{
    invariant_height, reduce_to_fundamental_domain, shortest_vector_length, y_g, IntMat2, LatticeBasis,
};

/// `SL(2,R)` matrix with entries in `[−r, r]`.
fn random_sl2(rng: &mut ChaCha8Rng, r: f64) -> Mat2 {
    loop {
        let a: f64 = rng.gen_range(-r..r);
        let b: f64 = rng.gen_range(-r..r);
        let c: f64 = rng.gen_range(-r..r);
        if a.abs() < 0.1 {
            continue;
        }
        let d = (1.0 + b * c) / a;
        if d.abs() <= r {
            return Mat2::new(a, b, c, d);
        }
    }
}

fn random_g(rng: &mut ChaCha8Rng) -> GroupElement {
    GroupElement::new(random_sl2(rng, 3.0), [rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)]).unwrap()
}

fn random_gamma(rng: &mut ChaCha8Rng, len: usize) -> GroupElement {
    let letters = [IntMat2::S, IntMat2::T, IntMat2::T.inv()];
    let w = (0..rng.gen_range(1..=len)).fold(IntMat2::IDENTITY, |acc, _| acc.mul(&letters[rng.gen_range(0..3)]));
    let v = [rng.gen_range(-5..=5) as f64, rng.gen_range(-5..=5) as f64];
    GroupElement::new(Mat2::from_int(&w), v).unwrap()
}

/// `min |mM|` over `0 < max|mᵢ| ≤ r`, the brute-force shortest vector.
fn brute_shortest(m: &Mat2, r: i64) -> f64 {
    let mut best = f64::INFINITY;
    for i in -r..=r {
        for j in -r..=r {
            if (i, j) != (0, 0) {
                let p = m.row_mul([i as f64, j as f64]);
                best = best.min(p[0].hypot(p[1]));
            }
        }
    }
    best
}

#[test]
fn associativity_on_seeded_triples() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..1000 {
        let (a, b, c) = (random_g(&mut rng), random_g(&mut rng), random_g(&mut rng));
        let l = compose(&compose(&a, &b), &c);
        let r = compose(&a, &compose(&b, &c));
        assert!(l.max_abs_diff(&r) < 1e-11);
    }
}

#[test]
fn identity_and_inverse_laws() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..100 {
        let g = random_g(&mut rng);
        assert!(compose(&g, &GroupElement::IDENTITY).max_abs_diff(&g) < 1e-15);
        assert!(compose(&g, &inverse(&g)).max_abs_diff(&GroupElement::IDENTITY) < 1e-12);
    }
    let a4 = inverse(&flow_a(4.0));
    assert!(a4.max_abs_diff(&flow_a(0.25)) < 1e-15);
}

#[test]
fn commutation_relation_on_grid() {
    for i in -5..=5 {
        for j in -5..=5 {
            let (x, t) = (0.3 * i as f64, 0.4 * j as f64);
            let l = compose(&flow_u(x), &flow_phi(t));
            let r = compose(&flow_phi(t), &flow_u(t.exp() * x));
            assert!(l.max_abs_diff(&r) < 1e-12 * t.exp().max(1.0));
        }
    }
    for y in [0.1, 1.0, 7.0] {
        assert!(flow_a(y).max_abs_diff(&flow_phi(-f64::ln(y))) < 1e-14);
    }
}

#[test]
fn action_is_a_right_action() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..200 {
        let (g, h) = (random_g(&mut rng), random_g(&mut rng));
        let p = [rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)];
        let l = act_point(act_point(p, &g), &h);
        let r = act_point(p, &compose(&g, &h));
        assert!((l[0] - r[0]).abs() < 1e-12 && (l[1] - r[1]).abs() < 1e-12);
    }
}

#[test]
fn iwasawa_round_trip_large_entries() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..1000 {
        let m = random_sl2(&mut rng, 100.0);
        let c = iwasawa(&m);
        assert!(c.v > 0.0 && c.theta > -PI && c.theta <= PI);
        let back = iwasawa_compose(&c);
        let scale = [m.a, m.b, m.c, m.d].iter().fold(1.0f64, |s, x| s.max(x.abs()));
        assert!(back.max_abs_diff(&m) < 1e-12 * scale * scale, "{m:?} -> {back:?}");
    }
}

#[test]
fn canonicalize_is_coset_invariant_and_idempotent() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..300 {
        let g = random_g(&mut rng);
        let gamma = random_gamma(&mut rng, 8);
        let p = canonicalize(&g);
        let q = canonicalize(&compose(&gamma, &g));
        let torus = |a: f64, b: f64| {
            let d = (a - b).abs();
            d.min(1.0 - d)
        };
        assert!(p.m.max_abs_diff(&q.m) < 1e-10, "{p:?} {q:?}");
        assert!(torus(p.xi[0], q.xi[0]) < 1e-10 && torus(p.xi[1], q.xi[1]) < 1e-10);
        let pp = canonicalize(&p.group_element());
        assert!(pp.m.max_abs_diff(&p.m) < 1e-12);
        assert!(torus(pp.xi[0], p.xi[0]) < 1e-12 && torus(pp.xi[1], p.xi[1]) < 1e-12);
        let (x, y) = p.m.mobius_i();
        assert!(x.abs() <= 0.5 + 1e-9 && x * x + y * y >= 1.0 - 1e-9);
    }
}

#[test]
fn proxy_distance_is_left_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..200 {
        let (g, h, k) = (random_g(&mut rng), random_g(&mut rng), random_g(&mut rng));
        let a = proxy_distance(&g, &h);
        let b = proxy_distance(&compose(&k, &g), &compose(&k, &h));
        assert!((a - b).abs() < 1e-8 * a.max(1.0), "{a} vs {b}");
        assert!(proxy_distance(&g, &g) < 1e-12);
    }
}

#[test]
fn shortest_vector_against_enumeration() {
    assert!((shortest_vector_length(&Mat2::new(1.0, 0.0, 0.5, 1.0)) - brute_shortest(&Mat2::new(1.0, 0.0, 0.5, 1.0), 3)).abs() < 1e-15);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..500 {
        let m = random_sl2(&mut rng, 3.0);
        let l = shortest_vector_length(&m);
        let (r, _) = LatticeBasis::from_rows(&m).gauss_reduce();
        // Certificate: no vector with coefficients up to 2 in the reduced basis beats b₁.
        let rm = Mat2::new(r.b1[0], r.b1[1], r.b2[0], r.b2[1]);
        assert!(brute_shortest(&rm, 2) >= l * (1.0 - 1e-12));
        assert!((brute_shortest(&m, 40) - l).abs() < 1e-12 * l.max(1.0) || brute_shortest(&m, 40) > l);
    }
}

#[test]
fn shortest_vector_gamma_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..1000 {
        let m = random_sl2(&mut rng, 3.0);
        let gamma = random_gamma(&mut rng, 8).m;
        let a = shortest_vector_length(&m);
        let b = shortest_vector_length(&gamma.mul(&m));
        assert!((a - b).abs() < 1e-10 * a);
    }
}

#[test]
fn height_equals_reduced_imaginary_part() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..500 {
        let m = random_sl2(&mut rng, 3.0);
        let red = reduce_to_fundamental_domain(&m);
        assert_eq!(red.gamma.det(), 1);
        assert!(Mat2::from_int(&red.gamma).mul(&red.reduced).max_abs_diff(&m) < 1e-10);
        let (x, y) = red.reduced.mobius_i();
        assert!(x.abs() <= 0.5 + 1e-12 && x * x + y * y >= 1.0 - 1e-12);
        // Oracle: enumerate short vectors of the reduced basis.
        let h = invariant_height(&m);
        let h2 = 1.0 / brute_shortest(&red.reduced, 3).powi(2);
        assert!((h - h2).abs() < 1e-9 * h);
    }
}

#[test]
fn y_g_examples() {
    for t in [1.0, 10.0, 1e3, 1e6] {
        assert!((y_g(&GroupElement::IDENTITY, t) - 1.0).abs() < 1e-12);
    }
    let s = GroupElement::from_matrix(Mat2::new(0.0, -1.0, 1.0, 0.0));
    assert!((y_g(&s, 4.0) - 1.0).abs() < 1e-12);
    // U^φ is upper triangular, so its horocycle is closed and y_g ≡ 1; the
    // decaying case needs a lower-left entry with a/c = 1/φ badly approximable.
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    assert!((y_g(&GroupElement::from_matrix(Mat2::u(phi)), 1e6) - 1.0).abs() < 1e-9);
    let g = GroupElement::from_matrix(Mat2::new(1.0, 0.0, phi, 1.0));
    let t: f64 = 1e6;
    let v = y_g(&g, t);
    // Oracle: (p + qφ, q)a(T) over |q| ≤ 3000 and p next to −qφ.
    let mut best = f64::INFINITY;
    for q in -3000i64..=3000 {
        let p0 = (-(q as f64) * phi).round() as i64;
        for p in p0 - 1..=p0 + 1 {
            if (p, q) == (0, 0) {
                continue;
            }
            let x = [p as f64 + q as f64 * phi, q as f64];
            best = best.min((x[0] * t.sqrt()).hypot(x[1] / t.sqrt()));
        }
    }
    assert!((v - 1.0 / (t * best * best)).abs() < 1e-9 * v.max(1e-300), "{v} vs {}", 1.0 / (t * best * best));
    assert!(v < 0.05);
}

proptest! {
    #[test]
    fn inverse_is_two_sided(a in 0.2f64..3.0, b in -3.0f64..3.0, c in -3.0f64..3.0, v1 in -5.0f64..5.0, v2 in -5.0f64..5.0) {
        let g = GroupElement::new(Mat2::new(a, b, c, (1.0 + b * c) / a), [v1, v2]).unwrap();
        prop_assert!(compose(&inverse(&g), &g).max_abs_diff(&GroupElement::IDENTITY) < 1e-10);
        prop_assert!(compose(&g, &inverse(&g)).max_abs_diff(&GroupElement::IDENTITY) < 1e-10);
    }

    #[test]
    fn canonical_xi_in_unit_square(a in 0.2f64..3.0, b in -3.0f64..3.0, c in -3.0f64..3.0, v1 in -50.0f64..50.0, v2 in -50.0f64..50.0) {
        let g = GroupElement::new(Mat2::new(a, b, c, (1.0 + b * c) / a), [v1, v2]).unwrap();
        let p = canonicalize(&g);
        prop_assert!((0.0..1.0).contains(&p.xi[0]) && (0.0..1.0).contains(&p.xi[1]));
        prop_assert!((p.m.det() - 1.0).abs() < 1e-10);
    }
}

//! Closed-horocycle approximation parameters and the interval partition.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use horocycle::closed_approx::{
    audit, partition_intervals, reassemble, sarnak_ubis_params, verify_approx, y_consistency, ClosedApproxParams,
    DEFAULT_CAP,
};
use horocycle::group::{proxy_distance, GroupElement, Mat2};
use horocycle::testfn::TestFunctionSpec;

fn random_m(rng: &mut ChaCha8Rng) -> GroupElement {
    loop {
        let a: f64 = rng.gen_range(-2.0..2.0);
        let b: f64 = rng.gen_range(-2.0..2.0);
        let c: f64 = rng.gen_range(-2.0..2.0);
        if c.abs() < 0.1 || a.abs() < 0.5 {
            continue;
        }
        let d = (1.0 + b * c) / a;
        if d.abs() <= 2.0 {
            return GroupElement::from_matrix(Mat2::new(a, b, c, d));
        }
    }
}

/// Residual of the approximant at time `t`, recomputed from the group law.
fn residual_at(p: &ClosedApproxParams, m: &GroupElement, big_t: f64, t: f64) -> f64 {
    let orbit = Mat2::from_int(&p.gamma.inv()).mul(&m.m).mul(&Mat2::u(p.ell(t, big_t)));
    let a = GroupElement::from_matrix(orbit);
    let b = GroupElement::from_matrix(p.approximant(t));
    proxy_distance(&a, &b) * p.w.abs() * p.s(t).abs()
}

fn check_params(m: &GroupElement, t: f64) -> ClosedApproxParams {
    let p = sarnak_ubis_params(m, t).unwrap();
    assert_eq!(p.gamma.det(), 1);
    assert!(p.omega == 1 || p.omega == -1);
    // (C, D) is the lower row of γ⁻¹MU^{ℓ(0)}; y = 1/D² and W = −D/C.
    let start = Mat2::from_int(&p.gamma.inv()).mul(&m.m).mul(&Mat2::u(p.ell(0.0, t)));
    assert!((p.y - 1.0 / (start.d * start.d)).abs() <= 1e-9 * p.y);
    assert!((p.w + start.d / start.c).abs() <= 1e-9 * p.w.abs());
    let check = verify_approx(&p, m, t, 200).unwrap();
    assert!(check.passes(DEFAULT_CAP), "{check:?}");
    assert!((check.c1() - p.c1).abs() <= 1e-9 * p.c1);
    // Fresh times away from the pole, measured independently.
    for i in 1..40 {
        let s = t * i as f64 / 40.0;
        if p.s(s).abs() > 1e-3 {
            assert!(residual_at(&p, m, t, s) <= DEFAULT_CAP, "t={s}");
        }
    }
    p
}

#[test]
fn rotation_at_t_100() {
    let s = GroupElement::from_matrix(Mat2::new(0.0, -1.0, 1.0, 0.0));
    check_params(&s, 100.0);
}

#[test]
fn lower_triangular_at_t_50() {
    check_params(&GroupElement::from_matrix(Mat2::new(1.0, 0.0, 0.5, 1.0)), 50.0);
}

#[test]
fn upper_triangular_is_exactly_closed() {
    let m = GroupElement::from_matrix(Mat2::u(0.3).mul(&Mat2::a(0.04)));
    let p = sarnak_ubis_params(&m, 1000.0).unwrap();
    assert!(p.exact_closed && (p.y - 0.04).abs() < 1e-15);
    assert!(verify_approx(&p, &m, 1000.0, 10).is_err());
    assert!(partition_intervals([0.1, 0.2], &m, 1000.0, &p).is_err());
}

#[test]
fn bad_inputs() {
    let m = GroupElement::from_matrix(Mat2::new(1.0, 0.0, 0.5, 1.0));
    assert!(sarnak_ubis_params(&m, 1.0).is_err());
    assert!(sarnak_ubis_params(&GroupElement::new(m.m, [0.1, 0.0]).unwrap(), 10.0).is_err());
}

#[test]
fn y_ratio_over_doubling_t() {
    let mut rng = ChaCha8Rng::seed_from_u64(51);
    for _ in 0..8 {
        let m = random_m(&mut rng);
        let mut t = 4.0;
        while t <= 4096.0 {
            let r = y_consistency(&m, t).unwrap();
            assert!((1.0 / 50.0..=50.0).contains(&r), "M={:?} T={t}: {r}", m.m);
            t *= 2.0;
        }
    }
}

#[test]
fn partition_invariants_and_reassembly() {
    let mut rng = ChaCha8Rng::seed_from_u64(52);
    let spec = TestFunctionSpec::default();
    let mut audited = 0;
    while audited < 4 {
        let m = random_m(&mut rng);
        let xi = [rng.gen::<f64>(), rng.gen::<f64>()];
        let t = 1000.0;
        let p = sarnak_ubis_params(&m, t).unwrap();
        if p.y >= 1e-2 {
            continue;
        }
        audited += 1;
        let plan = partition_intervals(xi, &m, t, &p).unwrap();
        let a = audit(&plan, DEFAULT_CAP);
        assert!(a.passes(), "{a:?}");
        // Independent coverage count: every sampled time lies in exactly one piece.
        for k in 0..=997 {
            let s = t * (k as f64 + 0.37) / 998.0;
            let hits = plan.intervals.iter().filter(|i| i.t_lo <= s && s < i.t_hi).count()
                + plan.i0.map_or(0, |(lo, hi)| (lo <= s && s < hi) as usize);
            assert_eq!(hits, 1, "t={s}");
        }
        for i in &plan.intervals {
            assert!(i.rho_max <= 2.0 * i.rho_min && i.y_star < p.y.sqrt());
        }
        let r = reassemble(&spec, &plan, &m, 1e-9).unwrap();
        assert!(r.passes(), "{r:?}");
    }
}

//! Property suites behind `horocycle check`. Each check appends to a
//! failure list; the list is printed as JSON and any entry exits with 2.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use horocycle::arith::{self, phi_twisted_sum, ramanujan, weil_bound, KloostermanTable, SieveTable};
use horocycle::closed_approx::{audit, partition_intervals, sarnak_ubis_params, verify_approx, y_consistency, DEFAULT_CAP};
use horocycle::diophantine::{
    majorant_b, majorant_b_brute, majorant_b_via_special_denominators, majorant_bg, order_change_bounds, shift_xi, Coord,
};
use horocycle::group::{compose, GroupElement, Mat2};
use horocycle::lattice::IntMat2;
use horocycle::orbit::{closed_lift_average, coset_sum_average, AverageRequest};
use horocycle::testfn::{eval_group, eval_terms, eval_with_radius, eval_xi_m, fourier_coeff, TestFunctionSpec};

use crate::{CliError, Outcome, Suite};

#[derive(Debug, Serialize)]
struct Failure {
    suite: &'static str,
    check: &'static str,
    detail: String,
}

#[derive(Default)]
struct Log {
    checks: usize,
    failures: Vec<Failure>,
}

impl Log {
    fn record(&mut self, suite: &'static str, check: &'static str, ok: bool, detail: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failures.push(Failure { suite, check, detail: detail() });
        }
    }
}

pub fn check(suite: Suite, seed: u64) -> Result<Outcome, CliError> {
    let start = Instant::now();
    let mut log = Log::default();
    let all = suite == Suite::All;
    if all || suite == Suite::Arith {
        arith_suite(&mut log, seed);
    }
    if all || suite == Suite::Majorant {
        majorant_suite(&mut log, seed);
    }
    if all || suite == Suite::Fourier {
        fourier_suite(&mut log, seed);
    }
    if all || suite == Suite::Dual {
        dual_suite(&mut log, seed);
    }
    if all || suite == Suite::Closed {
        closed_suite(&mut log, seed);
    }
    let name = format!("{suite:?}").to_lowercase();
    let v = json!({
        "schema": "horocycle-check",
        "version": 1,
        "suite": name,
        "seed": seed,
        "checks": log.checks,
        "elapsed_s": start.elapsed().as_secs_f64(),
        "failures": log.failures,
    });
    let mut text = serde_json::to_string_pretty(&v).expect("serializable");
    text.push('\n');
    let failure = (!log.failures.is_empty()).then(|| CliError::Suite(format!("{} of {} checks failed", log.failures.len(), log.checks)));
    Ok(Outcome { text, failure })
}

fn random_sl2(rng: &mut ChaCha8Rng) -> Mat2 {
    loop {
        let a: f64 = rng.gen_range(-2.0..2.0);
        let b: f64 = rng.gen_range(-2.0..2.0);
        let c: f64 = rng.gen_range(-2.0..2.0);
        if c.abs() < 0.1 || a.abs() < 0.5 {
            continue;
        }
        let d = (1.0 + b * c) / a;
        if d.abs() <= 2.0 {
            return Mat2::new(a, b, c, d);
        }
    }
}

/// A random word of length at most `len` in `S` and `T^{±1}`.
fn random_gamma(rng: &mut ChaCha8Rng, len: usize) -> IntMat2 {
    let letters = [IntMat2::S, IntMat2::T, IntMat2::T.inv()];
    (0..rng.gen_range(1..=len)).fold(IntMat2::IDENTITY, |acc, _| acc.mul(&letters[rng.gen_range(0..3)]))
}

fn arith_suite(log: &mut Log, seed: u64) {
    const S: &str = "arith";
    // Ramanujan closed form against the Kloosterman enumeration.
    let bad: Vec<String> = (1..=500u64)
        .into_par_iter()
        .flat_map_iter(|c| {
            let table = KloostermanTable::new(c);
            (-50..=50i64).filter_map(move |n| {
                let s = table.sum(n, 0);
                let r = ramanujan(n, c) as f64;
                ((s.re - r).abs() > 1e-6 || s.im.abs() > 1e-6).then(|| format!("c={c} n={n}: {s} vs {r}"))
            })
        })
        .collect();
    log.record(S, "ramanujan_closed_form", bad.is_empty(), || bad.join("; "));

    // Weil bound on a reduced range; the full range runs in the acceptance tests.
    let bad: Vec<String> = (1..=500u64)
        .into_par_iter()
        .flat_map_iter(|c| {
            let table = KloostermanTable::new(c);
            (1..=20i64).flat_map(move |n| (1..=20i64).map(move |m| (n, m))).filter_map(move |(n, m)| {
                let v = table.sum(n, m).norm();
                let b = weil_bound(n, m, c);
                (v > b + 1e-6).then(|| format!("c={c} n={n} m={m}: {v} > {b}"))
            })
        })
        .collect();
    log.record(S, "weil_bound", bad.is_empty(), || bad.join("; "));

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let inputs: Vec<(u64, f64, f64)> =
        (0..500).map(|_| (rng.gen_range(1..=30u64), rng.gen::<f64>(), rng.gen_range(1.0..200.0))).collect();
    let sieve = SieveTable::new(30 * 200);
    let bad: Vec<String> = inputs
        .par_iter()
        .filter_map(|&(q, a, x)| match phi_twisted_sum(q, a, x, Some(&sieve)) {
            Ok(r) if r.identity_ok => None,
            Ok(r) => Some(format!("q={q} alpha={a} X={x}: {} vs {}", r.direct, r.rearranged)),
            Err(e) => Some(e.to_string()),
        })
        .collect();
    log.record(S, "phi_twisted_rearrangement", bad.is_empty(), || bad.join("; "));

    let s = arith::kloosterman(1, 1, 3);
    log.record(S, "kloosterman_c3", (s.re + 1.0).abs() < 1e-12 && s.im.abs() < 1e-12, || format!("S(1,1;3) = {s}"));
}

fn majorant_suite(log: &mut Log, seed: u64) {
    const S: &str = "majorant";
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6d61_6a6f);
    let samples: Vec<([f64; 2], f64, f64)> = (0..200)
        .map(|_| ([rng.gen::<f64>(), rng.gen::<f64>()], rng.gen_range(1.0..10.0), 2f64.powf(-rng.gen_range(2.0..20.0))))
        .collect();
    let bad: Vec<String> = samples
        .par_iter()
        .filter_map(|&(xi, l, y)| {
            let coords = [Coord::Float(xi[0]), Coord::Float(xi[1])];
            let scan = majorant_b(xi, l, y);
            let (bv, bq) = majorant_b_brute(&coords, l, y, 10_000);
            if scan.value != bv || scan.witness_q != bq {
                return Some(format!("xi={xi:?} L={l} y={y}: scan ({}, {}) brute ({bv}, {bq})", scan.value, scan.witness_q));
            }
            if let Some(sp) = majorant_b_via_special_denominators(&coords, l, y) {
                if sp.value != scan.value {
                    return Some(format!("xi={xi:?} L={l} y={y}: special {} scan {}", sp.value, scan.value));
                }
            }
            None
        })
        .collect();
    log.record(S, "scan_brute_special", bad.is_empty(), || bad.join("; "));

    let bad: Vec<String> = samples[..50]
        .par_iter()
        .filter_map(|&(xi, l, y)| {
            let b = majorant_b(xi, l, y).value;
            let g = compose(&GroupElement::translation(xi), &GroupElement::from_matrix(Mat2::a(y)));
            let bg = majorant_bg(&g, l / y);
            ((b - bg).abs() > 1e-9 * b.max(1e-300)).then(|| format!("xi={xi:?} L={l} y={y}: {b} vs {bg}"))
        })
        .collect();
    log.record(S, "lattice_identity", bad.is_empty(), || bad.join("; "));

    let mut bad = Vec::new();
    for &(xi, l, y) in &samples[..50] {
        let l2 = rng.gen_range(1.0..10.0);
        let y2 = 2f64.powf(-rng.gen_range(2.0..20.0));
        let (lo, b, hi) = order_change_bounds(xi, l, l2, y, y2);
        if !(lo <= b * (1.0 + 1e-12) && b <= hi * (1.0 + 1e-12)) {
            bad.push(format!("xi={xi:?}: {lo} ≤ {b} ≤ {hi} fails"));
        }
        let n = rng.gen_range(-(l.floor() as i64)..=l.floor() as i64);
        let r = majorant_b(shift_xi(xi, n), l, y).value / majorant_b(xi, l, y).value;
        if !(0.5..=2.0).contains(&r) {
            bad.push(format!("xi={xi:?} n={n}: shift ratio {r}"));
        }
    }
    log.record(S, "order_change_and_shift", bad.is_empty(), || bad.join("; "));

    let bad: Vec<f64> = (2..=30).map(|k| 2f64.powi(-k)).filter(|&y| majorant_b([0.0, 0.5], 1.0, y).value < 0.25).collect();
    log.record(S, "rational_obstruction", bad.is_empty(), || format!("b < 1/4 at y = {bad:?}"));
}

fn fourier_suite(log: &mut Log, seed: u64) {
    const S: &str = "fourier";
    let spec = TestFunctionSpec { k: 1, ..Default::default() };
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x666f_7572);
    let mut bad = Vec::new();
    let mut nonzero = 0;
    for _ in 0..30 {
        // (1, 0)a(y)k(θ) has norm² y ∈ [1/4, 1/2], inside the support.
        let base = Mat2::a(rng.gen_range(0.26..0.5)).mul(&Mat2::k(rng.gen_range(-3.0..3.0)));
        let m = Mat2::from_int(&random_gamma(&mut rng, 6)).mul(&base);
        let g = GroupElement::new(m, [rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)]).expect("det 1");
        let gamma = random_gamma(&mut rng, 8);
        let v = [rng.gen_range(-3..=3) as f64, rng.gen_range(-3..=3) as f64];
        let h = compose(&GroupElement::new(Mat2::from_int(&gamma), v).expect("det 1"), &g);
        let (a, b) = (eval_group(&spec, &g), eval_group(&spec, &h));
        if (a - b).norm() > 1e-9 {
            bad.push(format!("{g:?}: {a} vs {b}"));
        }
        nonzero += (a.norm() > 1e-6) as usize;
    }
    if nonzero < 10 {
        bad.push(format!("only {nonzero} of 30 samples had f ≠ 0"));
    }
    log.record(S, "gamma_invariance", bad.is_empty(), || bad.join("; "));

    let mut bad = Vec::new();
    for _ in 0..10 {
        let m = Mat2::a(rng.gen_range(0.26..0.5)).mul(&Mat2::k(rng.gen_range(-3.0..3.0)));
        let t = random_gamma(&mut rng, 4);
        let tm = Mat2::from_int(&t).mul(&m);
        let Some(term) = eval_terms(&spec, [0.0, 0.0], &tm, 1.0).first().copied() else {
            bad.push(format!("no coset term at {tm:?}"));
            continue;
        };
        let n = spec.n as i64;
        let freq = [n * term.d, -n * term.c];
        // m·ᵀT⁻¹ with T⁻¹ = (d, −b; −c, a)
        let shifted = [freq[0] * t.d - freq[1] * t.b, -freq[0] * t.c + freq[1] * t.a];
        let lhs = fourier_coeff(&spec, &tm, freq, 32).map(|c| c.value);
        let rhs = fourier_coeff(&spec, &m, shifted, 32).map(|c| c.value);
        match (lhs, rhs) {
            (Ok(x), Ok(y)) if (x - y).norm() <= 1e-8 && x.norm() > 1e-6 => {}
            (x, y) => bad.push(format!("T={t:?}: {x:?} vs {y:?}")),
        }
        let mean = fourier_coeff(&spec, &m, [0, 0], 32).map(|c| c.value.norm()).unwrap_or(f64::NAN);
        if !(mean <= 1e-12) {
            bad.push(format!("torus mean {mean}"));
        }
    }
    log.record(S, "coefficient_invariance_and_mean", bad.is_empty(), || bad.join("; "));

    let mut bad = Vec::new();
    for _ in 0..30 {
        let m = random_sl2(&mut rng);
        let xi = [rng.gen::<f64>(), rng.gen::<f64>()];
        let (a, b) = (eval_xi_m(&spec, xi, &m), eval_with_radius(&spec, xi, &m, 2.0));
        if (a - b).norm() > 1e-12 {
            bad.push(format!("{m:?}: {a} vs {b}"));
        }
    }
    log.record(S, "cutoff_completeness", bad.is_empty(), || bad.join("; "));
}

fn dual_suite(log: &mut Log, seed: u64) {
    const S: &str = "dual";
    let spec = TestFunctionSpec::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6475_616c);
    let reqs: Vec<AverageRequest> = (0..10)
        .map(|i| {
            let xi = [rng.gen::<f64>(), rng.gen::<f64>()];
            let alpha = rng.gen_range(-1.0..1.0);
            let beta = alpha + rng.gen_range(0.1..2.0);
            AverageRequest::new(spec, xi, alpha, beta, 2f64.powi(-(2 + i)))
        })
        .collect();
    let bad: Vec<String> = reqs
        .par_iter()
        .filter_map(|r| {
            let a = closed_lift_average(r).map(|x| x.average);
            let b = coset_sum_average(r);
            match (a, b) {
                (Ok(a), Ok(b)) if (a - b).norm() <= (1e-7f64).max(10.0 * r.tol) => None,
                (a, b) => Some(format!("y={} xi={:?}: {a:?} vs {b:?}", r.y, r.xi)),
            }
        })
        .collect();
    log.record(S, "direct_vs_coset_sum", bad.is_empty(), || bad.join("; "));
}

fn closed_suite(log: &mut Log, seed: u64) {
    const S: &str = "closed";
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x636c_6f73);
    let ms: Vec<GroupElement> = (0..10).map(|_| GroupElement::from_matrix(random_sl2(&mut rng))).collect();
    let xis: Vec<[f64; 2]> = (0..10).map(|_| [rng.gen::<f64>(), rng.gen::<f64>()]).collect();
    let bad: Vec<String> = ms
        .par_iter()
        .zip(&xis)
        .flat_map_iter(|(m, &xi)| {
            let mut out = Vec::new();
            for t in [10.0, 100.0, 1000.0] {
                let res = sarnak_ubis_params(m, t).and_then(|p| {
                    let c = verify_approx(&p, m, t, 100)?;
                    let r = y_consistency(m, t)?;
                    Ok((p, c, r))
                });
                match res {
                    Ok((p, c, r)) => {
                        if !c.passes(DEFAULT_CAP) || !(1.0 / 50.0..=50.0).contains(&r) {
                            out.push(format!("M={:?} T={t}: {c:?} ratio {r}", m.m));
                        }
                        if p.y < 1e-2 {
                            match partition_intervals(xi, m, t, &p) {
                                Ok(plan) => {
                                    let a = audit(&plan, DEFAULT_CAP);
                                    if !a.passes() {
                                        out.push(format!("M={:?} T={t}: audit {a:?}", m.m));
                                    }
                                }
                                Err(e) => out.push(e.to_string()),
                            }
                        }
                    }
                    Err(e) => out.push(format!("M={:?} T={t}: {e}", m.m)),
                }
            }
            out
        })
        .collect();
    log.record(S, "approximation_and_partition", bad.is_empty(), || bad.join("; "));
}

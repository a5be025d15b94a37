//! Approximating a long horocycle piece by a lift of a closed horocycle.
//!
//! For `M ∈ SL(2,R)` and `T ≥ 2` we look for `γ ∈ SL(2,Z)` and real
//! `α, y, W`, `ω = ±1` such that `γ⁻¹MU^{ℓ(t)}` stays close to
//! `U^{α + yW/s} a(y/s²)` with `s = 1 − ωt/W`, where `ℓ(t) = t` for `ω = 1`
//! and `ℓ(t) = T − t` for `ω = −1`. If `(C, D)` is the lower row of
//! `γ⁻¹MU^{ℓ(0)}` then `y = 1/D²` and `W = −D/C`; the residual is of order
//! `1/(|W||s|)`. Candidates are primitive vectors of `Z²M` (or `Z²MU^T`)
//! with `|C|` small and `|D|` moderate.
//!
//! The second half implements the interval partition of `[0, T]` driven by
//! these parameters and an audit of its invariants.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::diophantine::{continued_fraction, majorant_b_tilde};
use crate::error::{Error, Result};
use crate::group::{compose, flow_u, proxy_distance, GroupElement, Mat2};
use crate::lattice::{complete_row, enumerate_box_with, gcd, y_g, IntMat2, LatticeBasis};
use crate::orbit::{orbit_breakpoints, orbit_integral};
use crate::quadrature::{integrate_pieces, QuadResult};
use crate::testfn::{eval_xi_m, TestFunctionSpec};

/// Default acceptance cap for measured constants.
pub const DEFAULT_CAP: f64 = 100.0;

/// Output of [`sarnak_ubis_params`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClosedApproxParams {
    /// `γ ∈ SL(2,Z)`.
    pub gamma: IntMat2,
    pub alpha: f64,
    pub y: f64,
    /// `+∞` when `exact_closed`.
    pub w: f64,
    pub omega: i8,
    pub exact_closed: bool,
    /// `max(1/(Ty), T/|W|)`, the smallest `C₁` with `1/(C₁y) ≤ T ≤ C₁|W|`.
    pub c1: f64,
    /// Sampled sup of `d(γ⁻¹MU^{ℓ(t)}, approximant)·|W|·|s|`.
    pub residual_constant: f64,
}

impl ClosedApproxParams {
    /// `sgn(s)·U^{α + yW/s} a(y/s²)` with `s = 1 − ωt/W`.
    ///
    /// Past the pole `s = 0` the lower-right entry of `γ⁻¹MU^{ℓ(t)}` is
    /// negative, so the orbit follows `−U^{…}a(…)`; in `Γ\G` this is the
    /// closed horocycle lifted by `(1, −ξγ)` instead of `(1, ξγ)`.
    pub fn approximant(&self, t: f64) -> Mat2 {
        let s = self.s(t);
        let h = self.y / (s * s);
        let x = self.alpha + self.y * self.w / s;
        let m = Mat2::new(h.sqrt(), x / h.sqrt(), 0.0, 1.0 / h.sqrt());
        if s < 0.0 {
            m.neg()
        } else {
            m
        }
    }

    pub fn s(&self, t: f64) -> f64 {
        1.0 - self.omega as f64 * t / self.w
    }

    /// `ℓ(t)`.
    pub fn ell(&self, t: f64, big_t: f64) -> f64 {
        if self.omega == 1 {
            t
        } else {
            big_t - t
        }
    }
}

/// Measured constants from [`verify_approx`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ApproxCheck {
    pub residual_constant: f64,
    /// `T·y`; `1/(C₁y) ≤ T` needs `T·y ≥ 1/C₁`.
    pub ty: f64,
    /// `T/|W|`; `T ≤ C₁|W|` needs `T/|W| ≤ C₁`.
    pub t_over_w: f64,
    pub samples: usize,
}

impl ApproxCheck {
    pub fn c1(&self) -> f64 {
        (1.0 / self.ty).max(self.t_over_w)
    }

    pub fn passes(&self, cap: f64) -> bool {
        self.residual_constant <= cap && self.c1() <= cap
    }
}

fn check_m(m: &GroupElement, t: f64) -> Result<()> {
    if !(t >= 2.0) || !t.is_finite() {
        return Err(Error::InvalidInput(format!("T must be at least 2, got {t}")));
    }
    if m.v != [0.0, 0.0] {
        return Err(Error::InvalidInput("M must have zero translation part".into()));
    }
    Ok(())
}

fn sample_times(w: f64, omega: i8, t: f64, n: usize) -> Vec<f64> {
    let n = n.max(8);
    let mut ts = Vec::with_capacity(2 * n + 2);
    for i in 0..=n {
        ts.push(t * i as f64 / n as f64);
        // log-spaced towards both ends
        let f = (i as f64 / n as f64 * (t.ln() + 3.0 * std::f64::consts::LN_10)).exp() * 1e-3;
        if f <= t {
            ts.push(f);
            ts.push(t - f);
        }
    }
    // points close to the pole s = 0 on either side
    let pole = omega as f64 * w;
    if pole > 0.0 && pole < t {
        for k in 0..12 {
            let d = pole.abs() * 10f64.powi(-k);
            for p in [pole - d, pole + d] {
                if (0.0..=t).contains(&p) {
                    ts.push(p);
                }
            }
        }
    }
    ts.sort_by(f64::total_cmp);
    ts.dedup();
    ts
}

/// Measures the approximation residual on a sample of times.
pub fn verify_approx(params: &ClosedApproxParams, m: &GroupElement, t: f64, n_samples: usize) -> Result<ApproxCheck> {
    if params.exact_closed {
        return Err(Error::InvalidInput("exact closed parameters have nothing to verify".into()));
    }
    check_m(m, t)?;
    let ginv = GroupElement::from_matrix(Mat2::from_int(&params.gamma.inv()));
    let n = compose(&ginv, m);
    let mut sup: f64 = 0.0;
    let mut count = 0;
    for tt in sample_times(params.w, params.omega, t, n_samples) {
        let s = params.s(tt);
        if s.abs() < 1e-6 {
            continue;
        }
        let actual = compose(&n, &flow_u(params.ell(tt, t)));
        let approx = GroupElement::from_matrix(params.approximant(tt));
        let d = proxy_distance(&actual, &approx);
        sup = sup.max(d * params.w.abs() * s.abs());
        count += 1;
    }
    Ok(ApproxCheck { residual_constant: sup, ty: t * params.y, t_over_w: t / params.w.abs(), samples: count })
}

/// A primitive `k ∈ Z²` with `kMU^{ℓ(0)} = (C, D)`.
#[derive(Clone, Copy, Debug)]
struct Candidate {
    k: [i64; 2],
    omega: i8,
    score: f64,
}

fn build(m: &Mat2, t: f64, k: [i64; 2], omega: i8) -> Option<ClosedApproxParams> {
    let start = if omega == 1 { *m } else { m.mul(&Mat2::u(t)) };
    let mut k = k;
    let row = [k[0] as f64 * start.a + k[1] as f64 * start.c, k[0] as f64 * start.b + k[1] as f64 * start.d];
    if row[0] == 0.0 || row[1] == 0.0 {
        return None;
    }
    if row[1] < 0.0 {
        k = [-k[0], -k[1]];
    }
    let ginv = complete_row(k[0], k[1])?;
    let n0 = Mat2::from_int(&ginv).mul(&start);
    let re = n0.mobius_i().0;
    let shift = (re - 0.5).ceil();
    // γ⁻¹ ← U^{−n}γ⁻¹, i.e. γ ← γU^n
    let ginv = IntMat2::t_pow(-(shift as i64)).mul(&ginv);
    let nn = Mat2::from_int(&ginv).mul(&start);
    let (c, d) = (nn.c, nn.d);
    let y = 1.0 / (d * d);
    let w = -d / c;
    Some(ClosedApproxParams {
        gamma: ginv.inv(),
        alpha: nn.a / c,
        y,
        w,
        omega,
        exact_closed: false,
        c1: (1.0 / (t * y)).max(t / w.abs()),
        residual_constant: f64::NAN,
    })
}

fn candidates(m: &Mat2, t: f64, cap: f64) -> Vec<Candidate> {
    let mut out: Vec<Candidate> = Vec::new();
    let score = |row: [f64; 2]| (row[1] * row[1] / t).max(row[0].abs() * t / row[1].abs());
    for omega in [1i8, -1] {
        let start = if omega == 1 { *m } else { m.mul(&Mat2::u(t)) };
        let basis = LatticeBasis::from_rows(&start);
        // Boxes for C₁ = K: |C| ≤ K^{3/2}/√T, |D| ≤ √(KT); widen until found.
        let mut k: f64 = 4.0;
        loop {
            let before = out.len();
            enumerate_box_with(&basis, [0.0, 0.0], [k.powf(1.5) / t.sqrt(), (k * t).sqrt()], |p| {
                if p.x[0] == 0.0 || p.x[1] <= 0.0 || gcd(p.k[0], p.k[1]) != 1 {
                    return;
                }
                let s = score(p.x);
                if s <= k {
                    out.push(Candidate { k: p.k, omega, score: s });
                }
            });
            if out.len() > before || k >= cap {
                break;
            }
            k = (2.0 * k).min(cap);
        }
    }
    // Convergents p/q of M(∞) = a/c give (−q, p)M with small first entry.
    if m.c != 0.0 {
        let cf = continued_fraction(m.a / m.c, ((m.c.abs() * t.sqrt()).floor() as u64).max(1));
        for (p, q) in cf.convergents.iter().copied() {
            let k = [-q, p];
            for omega in [1i8, -1] {
                let start = if omega == 1 { *m } else { m.mul(&Mat2::u(t)) };
                let row = [k[0] as f64 * start.a + k[1] as f64 * start.c, k[0] as f64 * start.b + k[1] as f64 * start.d];
                if row[0] != 0.0 && row[1] != 0.0 && gcd(k[0], k[1]) == 1 {
                    out.push(Candidate { k, omega, score: score(row) });
                }
            }
        }
    }
    out.sort_by(|a, b| a.score.total_cmp(&b.score));
    out
}

/// Parameters for `M` and `T`. If `M`'s lower-left entry vanishes the orbit
/// is an exact closed horocycle and no search is needed. Otherwise the
/// candidates with the smallest measured `C₁` are verified and the one
/// minimizing `max(C₁, residual constant)` is returned.
pub fn sarnak_ubis_params(m: &GroupElement, t: f64) -> Result<ClosedApproxParams> {
    sarnak_ubis_params_with_cap(m, t, DEFAULT_CAP)
}

pub fn sarnak_ubis_params_with_cap(m: &GroupElement, t: f64, cap: f64) -> Result<ClosedApproxParams> {
    check_m(m, t)?;
    let mm = m.m;
    if mm.c == 0.0 {
        // ±M = U^{ab} a(a²)
        return Ok(ClosedApproxParams {
            gamma: IntMat2::IDENTITY,
            alpha: (mm.a * mm.b).rem_euclid(1.0),
            y: mm.a * mm.a,
            w: f64::INFINITY,
            omega: 1,
            exact_closed: true,
            c1: 1.0,
            residual_constant: 0.0,
        });
    }
    let cands = candidates(&mm, t, cap);
    let mut best: Option<ClosedApproxParams> = None;
    let mut seen = Vec::new();
    for cand in cands.iter().filter(|c| c.score <= cap) {
        if seen.len() >= 8 {
            break;
        }
        let key = (cand.k, cand.omega);
        if seen.contains(&key) || seen.contains(&([-cand.k[0], -cand.k[1]], cand.omega)) {
            continue;
        }
        seen.push(key);
        let Some(mut p) = build(&mm, t, cand.k, cand.omega) else { continue };
        let check = verify_approx(&p, m, t, 64)?;
        p.residual_constant = check.residual_constant;
        let obj = |q: &ClosedApproxParams| q.c1.max(q.residual_constant);
        if p.residual_constant <= cap && best.as_ref().is_none_or(|b| obj(&p) < obj(b)) {
            best = Some(p);
        }
    }
    best.ok_or_else(|| Error::NoCandidate(format!("no admissible candidate with constants below {cap} at T = {t}")))
}

/// `y_{M,T}/y_M(T)`.
pub fn y_consistency(m: &GroupElement, t: f64) -> Result<f64> {
    let p = sarnak_ubis_params(m, t)?;
    Ok(p.y / y_g(m, t))
}

/// One interval `I_j` of a partition plan.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlanInterval {
    pub t_lo: f64,
    pub t_hi: f64,
    pub rho_min: f64,
    pub rho_max: f64,
    pub tau: f64,
    pub n_j: i64,
    pub gamma_j: IntMat2,
    pub y_star: f64,
    /// `1 − ωt/W` is positive on forward intervals and negative on backward ones.
    pub forward: bool,
}

/// A partition of `[0, T]` into `I₁, …, I_m` and a central `I₀`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartitionPlan {
    pub xi: [f64; 2],
    pub t: f64,
    pub params: ClosedApproxParams,
    pub c2: f64,
    pub intervals: Vec<PlanInterval>,
    pub i0: Option<(f64, f64)>,
}

fn xi_gamma(xi: [f64; 2], g: &IntMat2) -> [f64; 2] {
    g.row_mul(xi)
}

fn tau_bound(xi: [f64; 2], p: &ClosedApproxParams, rho: f64, gamma_j: &IntMat2, c2: f64) -> f64 {
    let y = p.y;
    let bt = majorant_b_tilde(xi_gamma(xi, gamma_j), 1.0, y / (rho * rho));
    let first = rho.powf(1.5) * y.powf(-0.5) * p.w.abs().sqrt() * bt.sqrt();
    first.min(c2 * rho * rho / y)
}

/// The interval partition of `[0, T]`, built forwards from `t = 0` while
/// `1 − ωt/W > 2y^{1/4}` and backwards from `t = T` while
/// `1 − ωt/W < −2y^{1/4}`; the rest is `I₀`. Times are in the `ℓ`
/// parametrization.
pub fn partition_intervals(xi: [f64; 2], m: &GroupElement, t: f64, params: &ClosedApproxParams) -> Result<PartitionPlan> {
    check_m(m, t)?;
    if params.exact_closed {
        return Err(Error::InvalidInput("partition needs non-closed parameters".into()));
    }
    if !(params.y < 1.0) {
        return Err(Error::InvalidInput("partition needs y < 1".into()));
    }
    let p = params;
    let c1 = p.c1.max(1.0);
    let c2 = 1.0 / (2.0 * (1.0 + c1).powi(3));
    let gate = 2.0 * p.y.powf(0.25);
    let mut intervals = Vec::new();
    let make = |t_lo: f64, t_hi: f64, n_j: i64, gamma_j: IntMat2, forward: bool| {
        let (a, b) = (p.s(t_lo).abs(), p.s(t_hi).abs());
        let (rho_min, rho_max) = (a.min(b), a.max(b));
        PlanInterval { t_lo, t_hi, rho_min, rho_max, tau: t_hi - t_lo, n_j, gamma_j, y_star: p.y / (rho_min * rho_min), forward }
    };
    let n_of = |sj: f64| (p.alpha + p.y * p.w / sj).floor() as i64;
    let mut tj = 0.0;
    let mut done = false;
    while p.s(tj) > gate {
        let sj = p.s(tj);
        let n_j = n_of(sj);
        let gamma_j = p.gamma.mul(&IntMat2::t_pow(n_j));
        let tau = tau_bound(xi, p, sj.abs(), &gamma_j, c2).min(t - tj);
        let next = if tau >= t - tj { t } else { tj + tau };
        intervals.push(make(tj, next, n_j, gamma_j, true));
        tj = next;
        if tj >= t {
            done = true;
            break;
        }
    }
    let forward_end = tj;
    let mut i0 = None;
    if !done {
        let mut tj = t;
        while p.s(tj) < -gate {
            let sj = p.s(tj);
            let n_j = n_of(sj);
            let gamma_j = p.gamma.mul(&IntMat2::t_pow(n_j));
            let tau = tau_bound(xi, p, sj.abs(), &gamma_j, c2);
            let next = tj - tau;
            intervals.push(make(next, tj, n_j, gamma_j, false));
            tj = next;
            if intervals.len() > 50_000_000 {
                return Err(Error::InvalidInput("partition does not terminate".into()));
            }
        }
        if tj > forward_end {
            i0 = Some((forward_end, tj));
        }
    }
    Ok(PartitionPlan { xi, t, params: *params, c2, intervals, i0 })
}

/// Invariant checks on a [`PartitionPlan`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlanAudit {
    /// `|Σ τ_j + τ₀ − T|`.
    pub coverage_error: f64,
    pub disjoint: bool,
    pub rho_ok: bool,
    pub y_star_ok: bool,
    pub tau0: f64,
    pub tau0_ok: bool,
    /// Largest `(#J_n − 1)/(ρ(n)^{1/2}y^{−1/2}|W|^{−1/2}b̃^{−1/2})` over `n`.
    pub window_count_constant: f64,
    /// Largest `#J_n/(1 + ρ(n)^{1/2}y^{−1/2}|W|^{−1/2}b̃^{−1/2})`, for reference.
    /// Windows filled at the `C₂ρ²/y` step length hold about `1/C₂` intervals
    /// however small the second term is, which inflates the ratio above.
    pub window_count_bracket: f64,
    pub window_ok: bool,
    pub intervals: usize,
}

impl PlanAudit {
    pub fn passes(&self) -> bool {
        self.coverage_error <= 1e-9 * (1.0 + self.intervals as f64).max(1.0)
            && self.disjoint
            && self.rho_ok
            && self.y_star_ok
            && self.tau0_ok
            && self.window_ok
    }
}

pub fn audit(plan: &PartitionPlan, cap: f64) -> PlanAudit {
    let p = &plan.params;
    let y = p.y;
    let mut pieces: Vec<(f64, f64)> = plan.intervals.iter().map(|i| (i.t_lo, i.t_hi)).collect();
    if let Some(i0) = plan.i0 {
        pieces.push(i0);
    }
    pieces.sort_by(|a, b| a.0.total_cmp(&b.0));
    let total: f64 = plan.intervals.iter().map(|i| i.tau).sum::<f64>() + plan.i0.map_or(0.0, |(a, b)| b - a);
    let tol = 1e-9 * plan.t;
    let mut disjoint = pieces.first().is_some_and(|f| f.0.abs() <= tol) && pieces.last().is_some_and(|l| (l.1 - plan.t).abs() <= tol);
    for w in pieces.windows(2) {
        if (w[1].0 - w[0].1).abs() > tol {
            disjoint = false;
        }
    }
    let rho_ok = plan.intervals.iter().all(|i| i.rho_min > 0.0 && i.rho_max <= 2.0 * i.rho_min);
    let y_star_ok = plan.intervals.iter().all(|i| i.y_star < y.sqrt());
    let tau0 = plan.i0.map_or(0.0, |(a, b)| b - a);
    let tau0_ok = tau0 <= 8.0 * y.powf(0.25) * plan.t;
    let mut by_n: std::collections::BTreeMap<i64, usize> = std::collections::BTreeMap::new();
    for i in &plan.intervals {
        *by_n.entry(i.n_j).or_default() += 1;
    }
    let mut worst: f64 = 0.0;
    let mut bracket: f64 = 0.0;
    for (&n, &count) in &by_n {
        let rho = y * p.w.abs() / (1.0 + (n as f64 - p.alpha).abs());
        let g = p.gamma.mul(&IntMat2::t_pow(n));
        let bt = majorant_b_tilde(xi_gamma(plan.xi, &g), 1.0, y / (rho * rho));
        let scale = rho.sqrt() / (y.sqrt() * p.w.abs().sqrt() * bt.sqrt());
        worst = worst.max((count as f64 - 1.0) / scale);
        bracket = bracket.max(count as f64 / (1.0 + scale));
    }
    PlanAudit {
        coverage_error: (total - plan.t).abs(),
        disjoint,
        rho_ok,
        y_star_ok,
        tau0,
        tau0_ok,
        window_count_constant: worst,
        window_count_bracket: bracket,
        window_ok: worst <= cap,
        intervals: plan.intervals.len(),
    }
}

/// Comparison of a plan-based reassembly with the direct orbit integral.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Reassembly {
    /// `T⁻¹` times the sum over intervals of the approximant integrals plus
    /// the direct integral over `I₀`.
    pub reassembled: Complex64,
    pub direct: Complex64,
    pub difference: f64,
    /// `5·(quadrature error + residual × Lipschitz budget)`, per unit time.
    pub budget: f64,
    pub quad_error: f64,
}

impl Reassembly {
    pub fn passes(&self) -> bool {
        self.difference <= self.budget
    }
}

/// Integrates `f` along the approximant `(1, ξγ)U^{α+yW/s}a(y/s²)` on
/// every `I_j`, directly on `I₀`, and compares with the orbit average.
pub fn reassemble(spec: &TestFunctionSpec, plan: &PartitionPlan, m: &GroupElement, tol: f64) -> Result<Reassembly> {
    let p = &plan.params;
    let t = plan.t;
    let xi = plan.xi;
    let g = compose(&GroupElement::translation(xi), m);
    let direct = orbit_integral(spec, &g, 0.0, t, tol * t);
    let xig = xi_gamma(xi, &p.gamma);
    let ginv_m = Mat2::from_int(&p.gamma.inv()).mul(&m.m);
    // Breakpoints of the true orbit in ℓ-time; the approximant's are nearby
    // and the adaptive rule resolves the small offsets.
    let bps: Vec<f64> = {
        let raw = orbit_breakpoints(spec, &ginv_m, 0.0, t);
        raw.into_iter().map(|s| p.ell(s, t)).collect()
    };
    let mut total = QuadResult::zero();
    let mut resid_budget = 0.0;
    let lip = spec.lipschitz_budget();
    let tol_per = tol * t / (plan.intervals.len() as f64 + 1.0);
    for iv in &plan.intervals {
        let mut pts: Vec<f64> = bps.iter().copied().filter(|&b| b > iv.t_lo && b < iv.t_hi).collect();
        pts.push(iv.t_lo);
        pts.push(iv.t_hi);
        pts.sort_by(f64::total_cmp);
        let f = |tt: f64| eval_xi_m(spec, xig, &p.approximant(tt));
        total.add(&integrate_pieces(&f, &pts, tol_per));
        // ∫ c/(|W||s|) dt = c·|ln(s_hi/s_lo)|
        resid_budget += p.residual_constant * lip * (p.s(iv.t_hi) / p.s(iv.t_lo)).abs().ln().abs();
    }
    if let Some((a, b)) = plan.i0 {
        // I₀ in ℓ-time; map back to orbit time.
        let (lo, hi) = if p.omega == 1 { (a, b) } else { (t - b, t - a) };
        total.add(&orbit_integral(spec, &g, lo, hi, tol_per));
    }
    total.settle(tol * t);
    if !total.converged || !direct.converged {
        return Err(Error::Quadrature("reassembly quadrature did not converge".into()));
    }
    let reassembled = total.value / t;
    let dvalue = direct.value / t;
    let quad_error = (total.error + direct.error) / t;
    Ok(Reassembly {
        reassembled,
        direct: dvalue,
        difference: (reassembled - dvalue).norm(),
        budget: 5.0 * (quad_error + tol + resid_budget / t),
        quad_error,
    })
}

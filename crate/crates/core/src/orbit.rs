//! Ergodic averages along horocycle orbits and discrepancy reports.
//!
//! The closed-lift average `(β−α)⁻¹∫_α^β f(Γ(1,ξ)U^x a(y)) dx` is computed
//! two ways: by direct quadrature of `f` with panels split where a coset
//! enters or leaves the support of `ρ`, and as a coset sum where each
//! primitive `(c, d)` contributes a one-dimensional integral in the Iwasawa
//! angle `θ` (using `x = −d/c + y cot θ`).

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::arith::{e, mod_inverse};
use crate::diophantine::{majorant_b_tilde, majorant_bg};
use crate::error::{Error, Result};
use crate::group::{compose, flow_u, GroupElement, Mat2};
use crate::lattice::{enumerate_box_with, gcd, reduce_to_fundamental_domain, y_g, LatticeBasis};
use crate::quadrature::{gauss_legendre_adaptive, integrate_pieces, PolyBump, QuadResult};
use crate::testfn::{eval_reduced, eval_xi_m, mu_average, TestFunctionSpec};

/// Longest stretch of orbit time integrated from one reduced base point.
/// Forming `MU^t` for large `t` and reducing it loses about `εt²` in
/// absolute accuracy, which the adaptive rule would chase as noise.
const REBASE_SPAN: f64 = 4.0;

/// Default `ε` in the discrepancy ratio.
pub const DEFAULT_EPS: f64 = 0.1;

/// How the closed-lift average is evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Method {
    Direct,
    CosetSum,
    /// Sharp window replaced by `χ_{[α,β]} * g_δ`.
    Mollified { delta: f64 },
}

/// A closed-lift average request.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AverageRequest {
    pub spec: TestFunctionSpec,
    pub xi: [f64; 2],
    pub alpha: f64,
    pub beta: f64,
    pub y: f64,
    pub tol: f64,
    pub method: Method,
    pub eps: f64,
}

impl AverageRequest {
    pub fn new(spec: TestFunctionSpec, xi: [f64; 2], alpha: f64, beta: f64, y: f64) -> Self {
        AverageRequest { spec, xi, alpha, beta, y, tol: 1e-9, method: Method::Direct, eps: DEFAULT_EPS }
    }

    pub fn with_method(mut self, method: Method) -> Self {
        self.method = method;
        self
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.spec.validate()?;
        if !(self.y > 0.0 && self.y < 1.0) {
            return Err(Error::InvalidInput(format!("y must lie in (0,1), got {}", self.y)));
        }
        if !(self.alpha < self.beta) || !self.alpha.is_finite() || !self.beta.is_finite() {
            return Err(Error::InvalidInput("need finite alpha < beta".into()));
        }
        if !(self.tol > 0.0) {
            return Err(Error::InvalidInput("tol must be positive".into()));
        }
        if !(self.eps > 0.0 && self.eps < 1.0) {
            return Err(Error::InvalidInput("eps must lie in (0,1)".into()));
        }
        if let Method::Mollified { delta } = self.method {
            if !(delta > 0.0 && delta <= 1.0) {
                return Err(Error::InvalidInput("delta must lie in (0,1]".into()));
            }
        }
        Ok(())
    }

    fn window(&self) -> Window {
        match self.method {
            Method::Mollified { delta } => Window::mollified(self.alpha, self.beta, delta),
            _ => Window::sharp(self.alpha, self.beta),
        }
    }
}

/// Average, reference value and how far apart they are.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscrepancyReport {
    pub average: Complex64,
    pub reference: Complex64,
    pub discrepancy: f64,
    pub majorant: f64,
    pub ratio: f64,
    pub quad_error_estimate: f64,
}

impl DiscrepancyReport {
    fn new(average: Complex64, reference: Complex64, majorant: f64, eps: f64, quad_error: f64) -> Self {
        let discrepancy = (average - reference).norm();
        DiscrepancyReport {
            average,
            reference,
            discrepancy,
            majorant,
            ratio: discrepancy / majorant.powf(1.0 - eps),
            quad_error_estimate: quad_error,
        }
    }
}

/// A weight on the line: the indicator of `[α, β]` or its mollification
/// `ν = χ_{[α,β]} * g_δ` with the unit-mass polynomial bump `g`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub alpha: f64,
    pub beta: f64,
    pub delta: Option<f64>,
}

impl Window {
    pub fn sharp(alpha: f64, beta: f64) -> Self {
        Window { alpha, beta, delta: None }
    }

    pub fn mollified(alpha: f64, beta: f64, delta: f64) -> Self {
        Window { alpha, beta, delta: Some(delta) }
    }

    fn bump() -> PolyBump {
        PolyBump::unit_mass(4)
    }

    pub fn support(&self) -> (f64, f64) {
        let d = self.delta.unwrap_or(0.0);
        (self.alpha - d, self.beta + d)
    }

    pub fn weight(&self, x: f64) -> f64 {
        match self.delta {
            None => {
                if x >= self.alpha && x <= self.beta {
                    1.0
                } else {
                    0.0
                }
            }
            Some(d) => {
                let g = Self::bump();
                g.cdf((x - self.alpha) / d) - g.cdf((x - self.beta) / d)
            }
        }
    }

    pub fn derivative(&self, x: f64) -> f64 {
        match self.delta {
            None => 0.0,
            Some(d) => {
                let g = Self::bump();
                (g.value((x - self.alpha) / d) - g.value((x - self.beta) / d)) / d
            }
        }
    }

    /// Points where the weight is not smooth.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self.delta {
            None => vec![self.alpha, self.beta],
            Some(d) => vec![self.alpha - d, self.alpha + d, self.beta - d, self.beta + d],
        }
    }

    /// `‖ν‖_{L¹} + ‖ν'‖_{L¹}`.
    pub fn w11_norm(&self) -> f64 {
        match self.delta {
            None => self.beta - self.alpha,
            Some(_) => {
                let mut pts = self.breakpoints();
                pts.sort_by(f64::total_cmp);
                let mass = integrate_pieces(&|x| Complex64::new(self.weight(x).abs(), 0.0), &pts, 1e-13);
                let var = integrate_pieces(&|x| Complex64::new(self.derivative(x).abs(), 0.0), &pts, 1e-13);
                mass.value.re + var.value.re
            }
        }
    }
}

fn sorted_unique(mut pts: Vec<f64>, lo: f64, hi: f64) -> Vec<f64> {
    pts.retain(|p| *p > lo && *p < hi);
    pts.push(lo);
    pts.push(hi);
    pts.sort_by(f64::total_cmp);
    pts.dedup_by(|a, b| (*a - *b).abs() <= 1e-15 * (1.0 + b.abs()));
    pts
}

/// Times `t ∈ [t0, t1]` where some coset of the orbit `MU^t` crosses height
/// `v₀` or `v₁`. Between consecutive breakpoints every coset term of the
/// test function is smooth in `t`.
pub fn orbit_breakpoints(spec: &TestFunctionSpec, m: &Mat2, t0: f64, t1: f64) -> Vec<f64> {
    let r = 1.0 / spec.v0.sqrt();
    let tm = 0.5 * (t0 + t1);
    let half = 0.5 * (t1 - t0);
    // Lower row of γMU^t is (c', c't + d') with (c', d') = (c, d)M.
    let mid = m.mul(&Mat2::u(tm));
    let basis = LatticeBasis::from_rows(&mid);
    let mut pts = Vec::new();
    enumerate_box_with(&basis, [0.0, 0.0], [r, r + r * half], |p| {
        let cp = p.x[0];
        if cp <= 0.0 || gcd(p.k[0], p.k[1]) != 1 {
            return;
        }
        // x₂ = c'(t − tm) + d'(tm) at time t
        let centre = tm - p.x[1] / cp;
        for bound in [1.0 / spec.v0, 1.0 / spec.v1] {
            let w2 = bound - cp * cp;
            if w2 > 0.0 {
                let w = w2.sqrt() / cp;
                pts.push(centre - w);
                pts.push(centre + w);
            }
        }
    });
    sorted_unique(pts, t0, t1)
}

/// `∫ ν(x) f(Γ(1,ξ)U^x a(y)) dx` by direct quadrature of `f`.
pub fn direct_integral(req: &AverageRequest) -> QuadResult {
    let w = req.window();
    let (lo, hi) = w.support();
    let y = req.y;
    let a = Mat2::a(y);
    // U^x a(y) = a(y) U^{x/y}
    let mut pts: Vec<f64> = orbit_breakpoints(&req.spec, &a, lo / y, hi / y).into_iter().map(|t| t * y).collect();
    pts.extend(w.breakpoints());
    let pts = sorted_unique(pts, lo, hi);
    let f = |x: f64| {
        let m = Mat2::new(y.sqrt(), x / y.sqrt(), 0.0, 1.0 / y.sqrt());
        eval_xi_m(&req.spec, req.xi, &m) * w.weight(x)
    };
    integrate_pieces(&f, &pts, req.tol * (hi - lo))
}

/// A primitive `(c, d)` with `c ≥ 1` contributing to the coset sum.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CosetIndex {
    pub c: i64,
    pub d: i64,
}

/// All `c ≥ 1`, `(c, d) = 1` whose window `|cx + d| ≤ √(y/v₀)` meets the
/// support of the weight. The range `c ≤ 1/√(yv₀)` is forced by
/// `v = sin²θ/(c²y) ≥ v₀`.
pub fn coset_sum_terms(req: &AverageRequest) -> Vec<CosetIndex> {
    let (lo, hi) = req.window().support();
    let c_max = (1.0 / (req.y * req.spec.v0)).sqrt().floor() as i64;
    let w = (req.y / req.spec.v0).sqrt();
    let mut out = Vec::new();
    for c in 1..=c_max {
        let cf = c as f64;
        let d_lo = (-cf * hi - w).ceil() as i64;
        let d_hi = (-cf * lo + w).floor() as i64;
        for d in d_lo..=d_hi {
            if gcd(c, d) == 1 {
                out.push(CosetIndex { c, d });
            }
        }
    }
    out
}

fn arccot(z: f64) -> f64 {
    f64::atan2(1.0, z)
}

/// The `θ`-integral of one coset pair `±(c, d)`.
fn coset_term(req: &AverageRequest, w: &Window, idx: CosetIndex, tol: f64) -> QuadResult {
    let spec = &req.spec;
    let (c, d) = (idx.c as f64, idx.d as f64);
    let y = req.y;
    let c2y = c * c * y;
    let s0 = c2y * spec.v0;
    if s0 >= 1.0 {
        return QuadResult::zero();
    }
    let th_a = s0.sqrt().asin();
    let th_b = (c2y * spec.v1).min(1.0).sqrt().asin();
    let (lo, hi) = w.support();
    // x = −d/c + y cot θ is decreasing in θ ∈ (0, π).
    let th_of = |x: f64| arccot((x + d / c) / y);
    let (t_lo, t_hi) = (th_of(hi), th_of(lo));
    let mut pts = vec![th_a, th_b, PI - th_b, PI - th_a];
    pts.extend(w.breakpoints().into_iter().map(th_of));
    let lo_t = t_lo.max(th_a);
    let hi_t = t_hi.min(PI - th_a);
    if !(hi_t > lo_t) {
        return QuadResult::zero();
    }
    let pts = sorted_unique(pts, lo_t, hi_t);
    let dstar = mod_inverse(idx.d, idx.c) as f64;
    let profile = spec.profile();
    let k = spec.k as f64;
    let l = spec.l as f64;
    let integrand = |th: f64| {
        let s = th.sin();
        let v = s * s / c2y;
        let r = profile.value(v);
        if r == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let x = -d / c + y * (th.cos() / s);
        let nu = w.weight(x);
        if nu == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let u = dstar / c - (2.0 * th).sin() / (2.0 * c2y);
        e(k * u) * Complex64::from_polar(r * nu * y / (s * s), l * th)
    };
    integrate_pieces(&integrand, &pts, tol)
}

/// The pair factor `e(nφ) + (−1)^l e(−nφ)` with `φ = dξ₁ − cξ₂`.
fn pair_phase(spec: &TestFunctionSpec, xi: [f64; 2], c: i64, d: i64) -> Complex64 {
    let phi = spec.n as f64 * (d as f64 * xi[0] - c as f64 * xi[1]);
    let sign = if spec.l.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    e(phi) + e(-phi) * sign
}

/// The `c = 0` terms `γ = ±1`: `η(x, y, 0)e(nξ₁) + η(x, y, π)e(−nξ₁)`.
/// They vanish whenever `y < v₀`, which always holds since `y < 1 ≤ v₀`.
pub fn c_zero_integral(req: &AverageRequest) -> QuadResult {
    let w = req.window();
    let spec = &req.spec;
    let r = spec.profile().value(req.y);
    if r == 0.0 {
        return QuadResult::zero();
    }
    let (lo, hi) = w.support();
    let ph = pair_phase(spec, req.xi, 0, 1);
    let mut pts = w.breakpoints();
    pts.sort_by(f64::total_cmp);
    let pts = sorted_unique(pts, lo, hi);
    let f = |x: f64| spec.eta(x, req.y, 0.0) * w.weight(x) * ph;
    integrate_pieces(&f, &pts, req.tol)
}

/// `∫ ν(x) f(Γ(1,ξ)U^x a(y)) dx` as a sum over primitive `(c, d)`, each an
/// integral over the Iwasawa angle.
pub fn coset_sum_integral(req: &AverageRequest) -> QuadResult {
    let w = req.window();
    let terms = coset_sum_terms(req);
    let (lo, hi) = w.support();
    let share = req.tol * (hi - lo) / (terms.len().max(1) as f64 + 1.0);
    let mut out = c_zero_integral(req);
    for idx in terms {
        let mut r = coset_term(req, &w, idx, share);
        r.value *= pair_phase(&req.spec, req.xi, idx.c, idx.d);
        out.add(&r);
    }
    out.settle(req.tol * (hi - lo));
    out
}

fn real_fold(spec: &TestFunctionSpec, mut r: QuadResult) -> QuadResult {
    if spec.real_form {
        r.value = Complex64::new(2.0 * r.value.re, 0.0);
        r.error *= 2.0;
    }
    r
}

/// Integral from the coset-sum representation; `f` itself already folds
/// the real form so only this path needs it.
pub fn coset_sum_average(req: &AverageRequest) -> Result<Complex64> {
    req.validate()?;
    let r = real_fold(&req.spec, coset_sum_integral(req));
    check_converged(&r)?;
    Ok(r.value / (req.beta - req.alpha))
}

/// `∫ f(Γ(1,ξ)U^x a(y)) ν(x) dx` with the mollified window (unnormalized).
pub fn mollified_average(req: &AverageRequest) -> Result<Complex64> {
    if !matches!(req.method, Method::Mollified { .. }) {
        return Err(Error::InvalidInput("mollified_average needs Method::Mollified".into()));
    }
    req.validate()?;
    let r = direct_integral(req);
    check_converged(&r)?;
    Ok(r.value)
}

fn check_converged(r: &QuadResult) -> Result<()> {
    if r.converged {
        Ok(())
    } else {
        Err(Error::Quadrature(format!(
            "adaptive quadrature did not converge ({} panels, error estimate {:.3e})",
            r.panels, r.error
        )))
    }
}

/// `(β−α)⁻¹∫_α^β f(Γ(1,ξ)U^x a(y)) dx` with its discrepancy against the
/// `μ`-average and the majorant `b̃_{ξ,L}(y)`, `L = max(1, |α|, |β|)`.
pub fn closed_lift_average(req: &AverageRequest) -> Result<DiscrepancyReport> {
    req.validate()?;
    let r = match req.method {
        Method::CosetSum => real_fold(&req.spec, coset_sum_integral(req)),
        _ => direct_integral(req),
    };
    check_converged(&r)?;
    let len = req.beta - req.alpha;
    let l = 1f64.max(req.alpha.abs()).max(req.beta.abs());
    let majorant = majorant_b_tilde(req.xi, l, req.y);
    Ok(DiscrepancyReport::new(r.value / len, mu_average(&req.spec), majorant, req.eps, r.error / len))
}

/// Request for an average along a general orbit `Γ g U^t`, `t ∈ [0, T]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneralRequest {
    pub spec: TestFunctionSpec,
    pub g: GroupElement,
    pub t: f64,
    pub tol: f64,
    pub eps: f64,
}

/// `∫_{t0}^{t1} f(Γ g U^t) dt`, flowing from a reduced base point that is
/// refreshed at every breakpoint and every [`REBASE_SPAN`] units of time.
pub fn orbit_integral(spec: &TestFunctionSpec, g: &GroupElement, t0: f64, t1: f64, tol: f64) -> QuadResult {
    let mut pts = orbit_breakpoints(spec, &g.m, t0, t1);
    let chunks = ((t1 - t0) / REBASE_SPAN).ceil() as usize;
    pts.extend((1..chunks).map(|k| t0 + k as f64 * REBASE_SPAN));
    let pts = sorted_unique(pts, t0, t1);
    let mut out = QuadResult::zero();
    let total = t1 - t0;
    for w in pts.windows(2) {
        if !(w[1] > w[0]) {
            continue;
        }
        // gU^a = (γM', v) = (γ, 0)(M', v), so f(gU^t) = f((M', v)U^{t−a}).
        let base = compose(g, &flow_u(w[0]));
        let h = GroupElement { m: reduce_to_fundamental_domain(&base.m).reduced, v: base.v };
        let f = |s: f64| eval_reduced(spec, &compose(&h, &flow_u(s)));
        out.add(&gauss_legendre_adaptive(f, 0.0, w[1] - w[0], tol * (w[1] - w[0]) / total));
    }
    out.settle(tol);
    out
}

/// `T⁻¹∫₀ᵀ f(Γ g U^t) dt` with majorant `y_g(T)^{1/4} + b_g(T)`.
pub fn general_orbit_average(req: &GeneralRequest) -> Result<DiscrepancyReport> {
    req.spec.validate()?;
    if !(req.t >= 2.0) || !req.t.is_finite() {
        return Err(Error::InvalidInput(format!("T must be at least 2, got {}", req.t)));
    }
    if !(req.tol > 0.0) {
        return Err(Error::InvalidInput("tol must be positive".into()));
    }
    let r = orbit_integral(&req.spec, &req.g, 0.0, req.t, req.tol * req.t);
    check_converged(&r)?;
    let majorant = y_g(&req.g, req.t).powf(0.25) + majorant_bg(&req.g, req.t);
    Ok(DiscrepancyReport::new(r.value / req.t, mu_average(&req.spec), majorant, req.eps, r.error / req.t))
}

/// Plain adaptive integral of `f` along `x ↦ (1,ξ)U^x a(y)` without
/// breakpoints, used as a cross-check for short windows.
pub fn blind_integral(req: &AverageRequest) -> QuadResult {
    let w = req.window();
    let (lo, hi) = w.support();
    let y = req.y;
    gauss_legendre_adaptive(
        |x| {
            let m = Mat2::new(y.sqrt(), x / y.sqrt(), 0.0, 1.0 / y.sqrt());
            eval_xi_m(&req.spec, req.xi, &m) * w.weight(x)
        },
        lo,
        hi,
        req.tol,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec() -> TestFunctionSpec {
        TestFunctionSpec::default()
    }

    #[test]
    fn direct_and_coset_sum_agree() {
        let req = AverageRequest::new(spec(), [0.0, 0.0], 0.0, 1.0, 0.25);
        let a = closed_lift_average(&req).unwrap().average;
        let b = coset_sum_average(&req).unwrap();
        assert!((a - b).norm() < 1e-7, "{a} vs {b}");
    }

    #[test]
    fn high_orbit_misses_support() {
        let req = AverageRequest::new(spec(), [0.3, 0.7], 0.0, 1.0, 0.9);
        let r = closed_lift_average(&req).unwrap();
        assert_eq!(r.average, Complex64::new(0.0, 0.0));
        assert!(coset_sum_terms(&req).is_empty());
    }

    #[test]
    fn c_range_at_quarter_height() {
        let req = AverageRequest::new(spec(), [0.0, 0.0], 0.0, 1.0, 0.25);
        let terms = coset_sum_terms(&req);
        assert!(terms.iter().all(|t| t.c == 1));
        assert_eq!(terms, vec![CosetIndex { c: 1, d: -1 }, CosetIndex { c: 1, d: 0 }]);
    }

    #[test]
    fn mollifier_mass() {
        let w = Window::mollified(0.0, 1.0, 0.1);
        let pts = sorted_unique(w.breakpoints(), -0.1, 1.1);
        let m = integrate_pieces(&|x| Complex64::new(w.weight(x), 0.0), &pts, 1e-14);
        assert!((m.value.re - 1.0).abs() < 1e-10);
    }

    #[test]
    fn identity_orbit_is_zero() {
        let req = GeneralRequest { spec: spec(), g: GroupElement::IDENTITY, t: 50.0, tol: 1e-9, eps: DEFAULT_EPS };
        let r = general_orbit_average(&req).unwrap();
        assert_eq!(r.average, Complex64::new(0.0, 0.0));
        assert_eq!(r.reference, Complex64::new(0.0, 0.0));
    }
}

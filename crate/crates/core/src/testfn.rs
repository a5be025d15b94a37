//! Single-mode test functions on `X = Γ\G`.
//!
//! A spec fixes `η(u, v, θ) = e(ku)·ρ(v)·e^{ilθ}` with `ρ` a polynomial
//! bump supported in `[v₀, v₁]`, `v₀ ≥ 1`. The test function is the
//! Poincaré series
//!
//! ```text
//! f((1,ξ)M) = Σ_{(c,d) primitive} η(γ_{c,d} M) · e(n(dξ₁ − cξ₂))
//! ```
//!
//! over both signs of `(c, d)`, where `γ_{c,d} ∈ SL(2,Z)` has lower row
//! `(c, d)`. It is `Γ`-invariant by construction and its `n`-th torus Fourier
//! mode along `(n, 0)` is `η` itself.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::arith::e;
use crate::error::{Error, Result};
use crate::group::{canonicalize, compose, iwasawa, CanonicalPoint, GroupElement, Mat2};
use crate::lattice::{enumerate_box_with, gcd, reduce_to_fundamental_domain, LatticeBasis};
use crate::quadrature::{gauss_legendre_adaptive, PolyBump};

/// Parameters of a single-mode test function.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TestFunctionSpec {
    /// Torus frequency.
    pub n: u32,
    /// Fourier index in `u`.
    pub k: i64,
    /// Angular index: the factor is `e^{ilθ}`.
    pub l: i64,
    pub v0: f64,
    pub v1: f64,
    /// Exponent `p` of the profile `(1 − s²)^p`.
    pub power: u32,
    pub amplitude: f64,
    /// Evaluate `2 Re f` instead of `f`.
    pub real_form: bool,
}

impl Default for TestFunctionSpec {
    fn default() -> Self {
        TestFunctionSpec { n: 1, k: 0, l: 0, v0: 2.0, v1: 4.0, power: 4, amplitude: 1.0, real_form: false }
    }
}

/// Closed-form sup bounds on `η` and its derivatives up to order two.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SmoothnessBudget {
    pub sup: f64,
    pub du: f64,
    pub dv: f64,
    pub dtheta: f64,
    pub duu: f64,
    pub dvv: f64,
    pub dthth: f64,
    pub duv: f64,
    pub dutheta: f64,
    pub dvtheta: f64,
}

impl TestFunctionSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.v0 >= 1.0) {
            return Err(Error::InvalidInput(format!("v0 must be at least 1, got {}", self.v0)));
        }
        if !(self.v1 > self.v0) || !self.v1.is_finite() {
            return Err(Error::InvalidInput("v1 must exceed v0".into()));
        }
        if self.power < 3 {
            return Err(Error::InvalidInput("profile power must be at least 3".into()));
        }
        Ok(())
    }

    pub fn profile(&self) -> PolyBump {
        PolyBump::new(self.v0, self.v1, self.power, self.amplitude)
    }

    /// `η(u, v, θ)`, which is also the Fourier mode `f̃_n` for `n ≥ 1`.
    pub fn eta(&self, u: f64, v: f64, theta: f64) -> Complex64 {
        let r = self.profile().value(v);
        if r == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        e(self.k as f64 * u) * Complex64::from_polar(r, self.l as f64 * theta)
    }

    pub fn smoothness_budget(&self) -> SmoothnessBudget {
        let b = self.profile();
        let a = b.sup();
        let w = 2.0 * PI * self.k.abs() as f64;
        let l = self.l.abs() as f64;
        SmoothnessBudget {
            sup: a,
            du: w * a,
            dv: b.sup_derivative(),
            dtheta: l * a,
            duu: w * w * a,
            dvv: b.sup_second_derivative(),
            dthth: l * l * a,
            duv: w * b.sup_derivative(),
            dutheta: w * l * a,
            dvtheta: l * b.sup_derivative(),
        }
    }

    /// `sup|f|`: for `v₀ > 1` at most one pair `±(c,d)` reaches the support.
    pub fn sup_f(&self) -> f64 {
        let per = if self.v0 > 1.0 { 2.0 } else { 4.0 };
        let s = per * self.amplitude.abs();
        if self.real_form {
            2.0 * s
        } else {
            s
        }
    }

    /// Bound on `|f(g) − f(h)| / d(g, h)` for nearby `g, h` in the proxy
    /// metric, assembled from the derivative budget of `η` and the torus
    /// phase; generous by a factor two in each term.
    pub fn lipschitz_budget(&self) -> f64 {
        let b = self.smoothness_budget();
        let per = if self.v0 > 1.0 { 2.0 } else { 4.0 };
        let phase = 2.0 * PI * self.n as f64 * b.sup / self.v0.sqrt();
        let s = per * 2.0 * (2.0 * self.v1 * b.du + 2.0 * self.v1 * b.dv + 2.0 * b.dtheta + phase);
        if self.real_form {
            2.0 * s
        } else {
            s
        }
    }

    /// Flat `key=value` serialization.
    pub fn to_kv(&self) -> String {
        format!(
            "n={}\nk={}\nl={}\nv0={}\nv1={}\npower={}\namplitude={}\nreal={}\n",
            self.n, self.k, self.l, self.v0, self.v1, self.power, self.amplitude, self.real_form
        )
    }

    /// Parses the flat `key=value` format; `#` starts a comment.
    pub fn from_kv(text: &str) -> Result<Self> {
        let mut s = TestFunctionSpec::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, val) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("line {}: expected key=value", i + 1)))?;
            let (key, val) = (key.trim(), val.trim());
            let bad = || Error::Parse(format!("line {}: bad value for {key}: {val}", i + 1));
            match key {
                "n" => s.n = val.parse().map_err(|_| bad())?,
                "k" => s.k = val.parse().map_err(|_| bad())?,
                "l" => s.l = val.parse().map_err(|_| bad())?,
                "v0" => s.v0 = val.parse().map_err(|_| bad())?,
                "v1" => s.v1 = val.parse().map_err(|_| bad())?,
                "power" => s.power = val.parse().map_err(|_| bad())?,
                "amplitude" => s.amplitude = val.parse().map_err(|_| bad())?,
                "real" => s.real_form = val.parse().map_err(|_| bad())?,
                _ => return Err(Error::Parse(format!("line {}: unknown key {key}", i + 1))),
            }
        }
        s.validate()?;
        Ok(s)
    }
}

/// A contributing coset: lower row `(c, d)` and the Iwasawa data of `γM`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CosetTerm {
    pub c: i64,
    pub d: i64,
    pub value: Complex64,
}

/// Sum over primitive `(c, d)` with `‖(c,d)M‖ ≤ radius_factor/√v₀`; the
/// factor one is exact because `ρ` vanishes below `v₀`.
pub fn eval_terms(spec: &TestFunctionSpec, xi: [f64; 2], m: &Mat2, radius_factor: f64) -> Vec<CosetTerm> {
    let r = radius_factor / spec.v0.sqrt();
    let r2 = r * r;
    let lo2 = 1.0 / spec.v1;
    let basis = LatticeBasis::from_rows(m);
    let mut out = Vec::new();
    enumerate_box_with(&basis, [0.0, 0.0], [r, r], |p| {
        let n2 = p.x[0] * p.x[0] + p.x[1] * p.x[1];
        if n2 > r2 || n2 < lo2 * (1.0 - 1e-12) {
            return;
        }
        // Z²M with rows (a,b),(c,d): the point k₁(a,b) + k₂(c,d) is the
        // lower row of γM for γ with lower row (k₁, k₂).
        let (c, d) = (p.k[0], p.k[1]);
        if gcd(c, d) != 1 {
            return;
        }
        let v = 1.0 / n2;
        let rho = spec.profile().value(v);
        if rho == 0.0 {
            return;
        }
        let low = p.x;
        // γM's top row can be any completion; u changes by integers only.
        let top = crate::lattice::complete_row(c, d).expect("primitive");
        let top_row = [
            top.a as f64 * m.a + top.b as f64 * m.c,
            top.a as f64 * m.b + top.b as f64 * m.d,
        ];
        let gm = Mat2::new(top_row[0], top_row[1], low[0], low[1]);
        let iw = iwasawa(&gm);
        let phase = e(spec.n as f64 * (d as f64 * xi[0] - c as f64 * xi[1]));
        let val = spec.eta(iw.u, iw.v, iw.theta) * phase;
        out.push(CosetTerm { c, d, value: val });
    });
    out
}

fn finish(spec: &TestFunctionSpec, z: Complex64) -> Complex64 {
    if spec.real_form {
        Complex64::new(2.0 * z.re, 0.0)
    } else {
        z
    }
}

/// `f((1, ξ)M)`.
pub fn eval_xi_m(spec: &TestFunctionSpec, xi: [f64; 2], m: &Mat2) -> Complex64 {
    let s: Complex64 = eval_terms(spec, xi, m, 1.0).iter().map(|t| t.value).sum();
    finish(spec, s)
}

/// `f` at a canonical point.
pub fn eval(spec: &TestFunctionSpec, p: &CanonicalPoint) -> Complex64 {
    eval_xi_m(spec, p.xi, &p.m)
}

/// `f(g)` for an arbitrary group element `g = (M, v)`, using `ξ = vM⁻¹`.
pub fn eval_group(spec: &TestFunctionSpec, g: &GroupElement) -> Complex64 {
    let xi = g.m.inv_sl().row_mul(g.v);
    eval_xi_m(spec, xi, &g.m)
}

/// `f` at the canonical representative of `g`.
pub fn eval_canonical(spec: &TestFunctionSpec, g: &GroupElement) -> Complex64 {
    eval(spec, &canonicalize(g))
}

/// `f(g)` after a plain reduction of `M` into the fundamental domain.
///
/// `f` is `Γ`-invariant, so any reduced representative gives the same value.
/// This skips the boundary tie-breaking of [`canonicalize`] and is the
/// evaluator used inside quadrature loops.
pub fn eval_reduced(spec: &TestFunctionSpec, g: &GroupElement) -> Complex64 {
    let red = reduce_to_fundamental_domain(&g.m);
    let xi0 = g.m.inv_sl().row_mul(g.v);
    let xi = Mat2::from_int(&red.gamma).row_mul(xi0);
    eval_xi_m(spec, [xi[0].rem_euclid(1.0), xi[1].rem_euclid(1.0)], &red.reduced)
}

/// Same as [`eval_xi_m`] with the coset search radius scaled.
pub fn eval_with_radius(spec: &TestFunctionSpec, xi: [f64; 2], m: &Mat2, radius_factor: f64) -> Complex64 {
    let s: Complex64 = eval_terms(spec, xi, m, radius_factor).iter().map(|t| t.value).sum();
    finish(spec, s)
}

/// `∫ f dμ`. Only the `n = 0` mode with `k = l = 0` survives unfolding:
/// `(3/π²)·2π·∫ρ(v)v⁻²dv`.
pub fn mu_average(spec: &TestFunctionSpec) -> Complex64 {
    if spec.n != 0 || spec.k != 0 || spec.l != 0 {
        return Complex64::new(0.0, 0.0);
    }
    let b = spec.profile();
    let r = gauss_legendre_adaptive(|v| Complex64::new(b.value(v) / (v * v), 0.0), spec.v0, spec.v1, 1e-14);
    finish(spec, r.value * (3.0 / (PI * PI)) * (2.0 * PI))
}

/// A torus Fourier coefficient of `f` at fixed `M`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FourierCoefficient {
    pub m: Mat2,
    pub freq: [i64; 2],
    pub value: Complex64,
}

/// `∫_{T²} f((1,ξ)M) e(−m·ξ) dξ` by the trapezoidal rule on a `grid × grid`
/// mesh, which is spectrally accurate for trigonometric polynomials in `ξ`.
pub fn fourier_coeff(spec: &TestFunctionSpec, m: &Mat2, freq: [i64; 2], grid: usize) -> Result<FourierCoefficient> {
    if grid < 8 {
        return Err(Error::InvalidInput("grid must be at least 8".into()));
    }
    let terms = eval_terms(spec, [0.0, 0.0], m, 1.0);
    let h = 1.0 / grid as f64;
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..grid {
        for j in 0..grid {
            let xi = [i as f64 * h, j as f64 * h];
            // Reuse the coset list: only the torus phase depends on ξ.
            let s: Complex64 = terms
                .iter()
                .map(|t| t.value * e(spec.n as f64 * (t.d as f64 * xi[0] - t.c as f64 * xi[1])))
                .sum();
            acc += finish(spec, s) * e(-(freq[0] as f64 * xi[0] + freq[1] as f64 * xi[1]));
        }
    }
    Ok(FourierCoefficient { m: *m, freq, value: acc * (h * h) })
}

/// Torus Fourier coefficient computed from full evaluations at every mesh
/// point (no reuse of the coset list).
pub fn fourier_coeff_direct(spec: &TestFunctionSpec, m: &Mat2, freq: [i64; 2], grid: usize) -> Complex64 {
    let h = 1.0 / grid as f64;
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..grid {
        for j in 0..grid {
            let xi = [i as f64 * h, j as f64 * h];
            let g = compose(&GroupElement::translation(xi), &GroupElement::from_matrix(*m));
            acc += eval_group(spec, &g) * e(-(freq[0] as f64 * xi[0] + freq[1] as f64 * xi[1]));
        }
    }
    acc * (h * h)
}

/// Outcome of [`decay_probe`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayProbeReport {
    pub samples: usize,
    pub support_ok: bool,
    /// Largest ratio of a finite-difference derivative to its budget.
    pub max_budget_ratio: f64,
    pub budget_ok: bool,
}

/// Checks the support of `f̃_n` and that central differences in `u`, `v`,
/// `θ` respect the smoothness budget within a factor two.
pub fn decay_probe(spec: &TestFunctionSpec, samples: usize) -> DecayProbeReport {
    let b = spec.smoothness_budget();
    let h = 1e-5;
    let mut support_ok = true;
    let mut worst: f64 = 0.0;
    let n = (samples as f64).cbrt().ceil() as usize;
    let f = |u: f64, v: f64, t: f64| spec.eta(u, v, t);
    let ratio = |x: f64, budget: f64| if budget > 0.0 { x / budget } else if x > 1e-6 { f64::INFINITY } else { 0.0 };
    let mut count = 0;
    for i in 0..n {
        for j in 0..n {
            for kk in 0..n {
                let u = (i as f64 + 0.5) / n as f64;
                let v = spec.v0 - 0.5 + (spec.v1 - spec.v0 + 1.0) * (j as f64 + 0.5) / n as f64;
                let t = -PI + 2.0 * PI * (kk as f64 + 0.5) / n as f64;
                count += 1;
                let val = f(u, v, t);
                if !(spec.v0..=spec.v1).contains(&v) && val.norm() != 0.0 {
                    support_ok = false;
                }
                let du = (f(u + h, v, t) - f(u - h, v, t)).norm() / (2.0 * h);
                let dv = (f(u, v + h, t) - f(u, v - h, t)).norm() / (2.0 * h);
                let dt = (f(u, v, t + h) - f(u, v, t - h)).norm() / (2.0 * h);
                worst = worst.max(ratio(du, b.du)).max(ratio(dv, b.dv)).max(ratio(dt, b.dtheta));
                worst = worst.max(ratio(val.norm(), b.sup));
            }
        }
    }
    DecayProbeReport { samples: count, support_ok, max_budget_ratio: worst, budget_ok: worst <= 2.0 }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::flow_u;

    #[test]
    fn reduced_matches_canonical() {
        for spec in [TestFunctionSpec::default(), TestFunctionSpec { n: 2, k: 1, l: 1, ..Default::default() }] {
            let g = GroupElement::new(Mat2::new(1.0, 0.0, 0.61, 1.0), [0.27, 0.83]).unwrap();
            for i in 0..400 {
                let h = compose(&g, &flow_u(i as f64 * 0.731));
                let a = eval_reduced(&spec, &h);
                let b = eval_canonical(&spec, &h);
                assert!((a - b).norm() < 1e-9, "t={i}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn worked_example_value() {
        let spec = TestFunctionSpec { k: 1, ..Default::default() };
        let xi = [0.13, 0.71];
        let val = eval_xi_m(&spec, xi, &Mat2::a(3.0));
        let rho3 = spec.profile().value(3.0);
        // only (0, ±1): η has u = 0 and θ ∈ {0, π}, l = 0
        let expect = 2.0 * rho3 * (2.0 * PI * xi[0]).cos();
        assert!((val - Complex64::new(expect, 0.0)).norm() < 1e-13);
        assert_eq!(eval_terms(&spec, xi, &Mat2::a(3.0), 1.0).len(), 2);
    }

    #[test]
    fn below_support_is_zero() {
        let spec = TestFunctionSpec { k: 1, ..Default::default() };
        assert_eq!(eval_xi_m(&spec, [0.3, 0.4], &Mat2::a(1.5)), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn mu_average_cases() {
        assert_eq!(mu_average(&TestFunctionSpec::default()), Complex64::new(0.0, 0.0));
        let s = TestFunctionSpec { n: 0, k: 1, ..Default::default() };
        assert_eq!(mu_average(&s), Complex64::new(0.0, 0.0));
        let s = TestFunctionSpec { n: 0, ..Default::default() };
        // ∫₂⁴ (1 − (v−3)²)⁴ v⁻² dv by an independent composite rule
        let oracle = crate::quadrature::composite_gl(
            |v| Complex64::new((1.0 - (v - 3.0) * (v - 3.0)).powi(4) / (v * v), 0.0),
            2.0,
            4.0,
            64,
            16,
        );
        let expect = 3.0 / (PI * PI) * 2.0 * PI * oracle.re;
        assert!((mu_average(&s).re - expect).abs() < 1e-13);
    }

    #[test]
    fn spec_round_trip() {
        let s = TestFunctionSpec { n: 2, k: -1, l: 3, v0: 1.5, v1: 5.0, power: 5, amplitude: 0.5, real_form: true };
        assert_eq!(TestFunctionSpec::from_kv(&s.to_kv()).unwrap(), s);
        assert!(TestFunctionSpec::from_kv("v0=0.5\nv1=2").is_err());
        assert!(TestFunctionSpec::from_kv("bogus=1").is_err());
    }

    #[test]
    fn probe_derivative_in_u() {
        let spec = TestFunctionSpec { k: 1, ..Default::default() };
        let h = 1e-6;
        let (u, v, t) = (0.3, 3.0, 0.0);
        let fd = (spec.eta(u + h, v, t) - spec.eta(u - h, v, t)) / (2.0 * h);
        let exact = Complex64::new(0.0, 2.0 * PI) * spec.eta(u, v, t);
        assert!((fd - exact).norm() < 1e-6);
        let r = decay_probe(&spec, 1000);
        assert!(r.support_ok && r.budget_ok);
        assert_eq!(spec.eta(0.0, spec.v1 + 0.1, 0.0), Complex64::new(0.0, 0.0));
    }
}

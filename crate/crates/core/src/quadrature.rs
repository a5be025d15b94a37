//! Gauss–Legendre quadrature on panels with doubling error estimates, and
//! polynomial bump profiles with closed-form derivatives and norms.

use std::sync::OnceLock;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Nodes and weights of an `n`-point Gauss–Legendre rule on `[−1, 1]`.
#[derive(Clone, Debug)]
pub struct GlRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GlRule {
    /// Newton iteration on `P_n` from the Chebyshev-like initial guesses.
    pub fn new(n: usize) -> Self {
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let kf = k as f64;
                    let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                    p0 = p1;
                    p1 = p2;
                }
                let pn = if n == 0 { 1.0 } else { p1 };
                let pn1 = if n == 1 { 1.0 } else { p0 };
                dp = nf * (x * pn - pn1) / (x * x - 1.0);
                let dx = pn / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        GlRule { nodes, weights }
    }

    pub fn integrate<F: Fn(f64) -> Complex64>(&self, f: &F, a: f64, b: f64) -> Complex64 {
        let h = 0.5 * (b - a);
        let m = 0.5 * (a + b);
        let mut s = Complex64::new(0.0, 0.0);
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            s += f(m + h * x) * *w;
        }
        s * h
    }
}

/// Shared 12-point rule used by the adaptive integrator.
pub fn rule12() -> &'static GlRule {
    static R: OnceLock<GlRule> = OnceLock::new();
    R.get_or_init(|| GlRule::new(12))
}

/// Integral value with an a posteriori error estimate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadResult {
    pub value: Complex64,
    pub error: f64,
    pub panels: usize,
    pub converged: bool,
}

impl QuadResult {
    pub fn zero() -> Self {
        QuadResult { value: Complex64::new(0.0, 0.0), error: 0.0, panels: 0, converged: true }
    }

    pub fn add(&mut self, o: &QuadResult) {
        self.value += o.value;
        self.error += o.error;
        self.panels += o.panels;
        self.converged &= o.converged;
    }

    /// Judges convergence by the accumulated error estimate against the
    /// total tolerance. Per-piece shares of a tolerance split over many
    /// pieces can fall below rounding even when the total is well within it.
    pub fn settle(&mut self, tol: f64) {
        self.converged = self.error <= tol;
    }
}

/// Maximum panel count per call of [`gauss_legendre_adaptive`].
pub const PANEL_BUDGET: usize = 200_000;

/// Adaptive Gauss–Legendre: a panel is accepted when the 12-point rule on
/// the panel and on its two halves agree to the panel's share of `tol`.
/// The halves' value is kept and the difference is the error estimate. The
/// result counts as converged when the summed estimate is within `tol`.
pub fn gauss_legendre_adaptive<F: Fn(f64) -> Complex64>(f: F, a: f64, b: f64, tol: f64) -> QuadResult {
    let r = rule12();
    let mut out = QuadResult::zero();
    if !(b > a) {
        return out;
    }
    let total = b - a;
    let mut stack = vec![(a, b, r.integrate(&f, a, b), 0u32)];
    while let Some((lo, hi, whole, depth)) = stack.pop() {
        let mid = 0.5 * (lo + hi);
        let left = r.integrate(&f, lo, mid);
        let right = r.integrate(&f, mid, hi);
        let refined = left + right;
        let err = (refined - whole).norm();
        let share = tol * (hi - lo) / total;
        if err <= share || depth >= 40 || out.panels >= PANEL_BUDGET {
            out.value += refined;
            out.error += err;
            out.panels += 2;
        } else {
            stack.push((mid, hi, right, depth + 1));
            stack.push((lo, mid, left, depth + 1));
        }
    }
    out.settle(tol);
    out
}

/// Adaptive integration over consecutive intervals `[p_i, p_{i+1}]` of a
/// sorted breakpoint list; the tolerance is shared in proportion to length.
pub fn integrate_pieces<F: Fn(f64) -> Complex64>(f: &F, points: &[f64], tol: f64) -> QuadResult {
    let mut out = QuadResult::zero();
    if points.len() < 2 {
        return out;
    }
    let total = points[points.len() - 1] - points[0];
    for w in points.windows(2) {
        if w[1] > w[0] {
            let r = gauss_legendre_adaptive(f, w[0], w[1], tol * (w[1] - w[0]) / total);
            out.add(&r);
        }
    }
    out.settle(tol);
    out
}

/// Composite rule with `panels` equal panels of `order` points each.
pub fn composite_gl<F: Fn(f64) -> Complex64>(f: F, a: f64, b: f64, panels: usize, order: usize) -> Complex64 {
    let r = GlRule::new(order);
    let h = (b - a) / panels as f64;
    (0..panels).map(|i| r.integrate(&f, a + i as f64 * h, a + (i + 1) as f64 * h)).sum()
}

/// `A(1 − s²)^p` with `s = (x − center)/half_width`, zero for `|s| ≥ 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolyBump {
    pub center: f64,
    pub half_width: f64,
    pub power: u32,
    pub amplitude: f64,
}

impl PolyBump {
    pub fn new(lo: f64, hi: f64, power: u32, amplitude: f64) -> Self {
        assert!(hi > lo && power >= 3, "bump needs lo < hi and power ≥ 3");
        PolyBump { center: 0.5 * (lo + hi), half_width: 0.5 * (hi - lo), power, amplitude }
    }

    /// The bump on `[−1, 1]` with unit integral.
    pub fn unit_mass(power: u32) -> Self {
        let mut b = PolyBump::new(-1.0, 1.0, power, 1.0);
        b.amplitude = 1.0 / b.l1_norm();
        b
    }

    pub fn lo(&self) -> f64 {
        self.center - self.half_width
    }

    pub fn hi(&self) -> f64 {
        self.center + self.half_width
    }

    fn s(&self, x: f64) -> f64 {
        (x - self.center) / self.half_width
    }

    pub fn value(&self, x: f64) -> f64 {
        let s = self.s(x);
        if s.abs() >= 1.0 {
            0.0
        } else {
            self.amplitude * (1.0 - s * s).powi(self.power as i32)
        }
    }

    pub fn derivative(&self, x: f64) -> f64 {
        let s = self.s(x);
        if s.abs() >= 1.0 {
            return 0.0;
        }
        let p = self.power as i32;
        self.amplitude * (-2.0 * p as f64 * s / self.half_width) * (1.0 - s * s).powi(p - 1)
    }

    pub fn second_derivative(&self, x: f64) -> f64 {
        let s = self.s(x);
        if s.abs() >= 1.0 {
            return 0.0;
        }
        let p = self.power as i32;
        let pf = p as f64;
        let u = 1.0 - s * s;
        self.amplitude / (self.half_width * self.half_width)
            * (-2.0 * pf * u.powi(p - 1) + 4.0 * pf * (pf - 1.0) * s * s * u.powi(p - 2))
    }

    /// `∫_{−1}^{1} (1 − s²)^p ds = 2 Π_{k=1}^{p} 2k/(2k+1)`.
    fn unit_integral(&self) -> f64 {
        (1..=self.power).fold(2.0, |acc, k| acc * (2.0 * k as f64) / (2.0 * k as f64 + 1.0))
    }

    pub fn integral(&self) -> f64 {
        self.amplitude * self.half_width * self.unit_integral()
    }

    pub fn sup(&self) -> f64 {
        self.amplitude.abs()
    }

    /// `sup|g'|`, attained at `s² = 1/(2p − 1)`.
    pub fn sup_derivative(&self) -> f64 {
        let pf = self.power as f64;
        let s2 = 1.0 / (2.0 * pf - 1.0);
        self.amplitude.abs() * 2.0 * pf * s2.sqrt() * (1.0 - s2).powi(self.power as i32 - 1) / self.half_width
    }

    /// `sup|g''|`, attained at `s = 0` for `p ≥ 2`.
    pub fn sup_second_derivative(&self) -> f64 {
        let pf = self.power as f64;
        // Interior extremum at s² = 3/(2p−1) is never larger than the value at 0.
        self.amplitude.abs() * 2.0 * pf / (self.half_width * self.half_width)
    }

    pub fn l1_norm(&self) -> f64 {
        self.integral().abs()
    }

    /// `‖g'‖₁ = 2 sup|g|` for a unimodal bump.
    pub fn derivative_l1(&self) -> f64 {
        2.0 * self.sup()
    }

    /// `‖g''‖₁ = 4 sup|g'|`: `g'` rises to its maximum and returns twice.
    pub fn second_derivative_l1(&self) -> f64 {
        4.0 * self.sup_derivative()
    }

    pub fn w11_norm(&self) -> f64 {
        self.l1_norm() + self.derivative_l1()
    }

    pub fn w21_norm(&self) -> f64 {
        self.w11_norm() + self.second_derivative_l1()
    }

    /// `∫_{−∞}^{x} g`, from the polynomial expansion of `(1 − s²)^p`.
    pub fn cdf(&self, x: f64) -> f64 {
        let s = self.s(x);
        if s <= -1.0 {
            return 0.0;
        }
        if s >= 1.0 {
            return self.integral();
        }
        let p = self.power as u64;
        let mut acc = 0.0;
        let mut binom = 1.0;
        for k in 0..=p {
            let kk = 2 * k + 1;
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            acc += sign * binom * (s.powi(kk as i32) + 1.0) / kk as f64;
            binom = binom * (p - k) as f64 / (k + 1) as f64;
        }
        self.amplitude * self.half_width * acc
    }
}

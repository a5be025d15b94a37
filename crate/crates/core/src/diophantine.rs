//! Continued fractions, distance to the nearest integer and the majorant
//! functions controlling the rate of equidistribution.
//!
//! The central quantity is
//!
//! ```text
//! b_{ξ,L}(y) = max_{q ≥ 1} min(1/q², √y / (L q ⟨qξ₁⟩), √y / (q ⟨qξ₂⟩))
//! ```
//!
//! where an entry with `⟨qξᵢ⟩ = 0` is removed from the minimum.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{GroupElement, Mat2};
use crate::lattice::{enumerate_box_with, LatticeBasis};

/// Threshold below which a floating-point `⟨qξ⟩` counts as zero.
pub const FLOAT_ZERO: f64 = 1e-14;

/// `⟨x⟩`, the distance from `x` to the nearest integer.
pub fn nearest_int_dist(x: f64) -> f64 {
    (x - x.round()).abs()
}

/// A real coordinate, either a float or an exact fraction `num/den`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Coord {
    Float(f64),
    Exact { num: i64, den: i64 },
}

impl Coord {
    pub fn value(&self) -> f64 {
        match *self {
            Coord::Float(x) => x,
            Coord::Exact { num, den } => num as f64 / den as f64,
        }
    }

    /// `⟨q·self⟩` and whether it is zero (exactly, or below [`FLOAT_ZERO`]).
    pub fn dist_mult(&self, q: u64) -> (f64, bool) {
        match *self {
            Coord::Float(x) => {
                let d = nearest_int_dist(q as f64 * x);
                (d, d < FLOAT_ZERO)
            }
            Coord::Exact { num, den } => {
                let den = den.abs() as i128;
                let r = ((q as i128) * (num as i128) * den.signum()).rem_euclid(den);
                let r = r.min(den - r);
                (r as f64 / den as f64, r == 0)
            }
        }
    }

    /// `q·self` reduced modulo one, keeping exactness.
    pub fn mult_mod1(&self, q: u64) -> Coord {
        match *self {
            Coord::Float(x) => Coord::Float(crate::group::frac(q as f64 * x)),
            Coord::Exact { num, den } => {
                let r = ((q as i128) * (num as i128)).rem_euclid(den as i128) as i64;
                Coord::Exact { num: r, den }
            }
        }
    }
}

impl From<f64> for Coord {
    fn from(x: f64) -> Self {
        Coord::Float(x)
    }
}

/// Simple continued fraction of a real number with its convergents.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContinuedFraction {
    pub alpha: f64,
    pub quotients: Vec<i64>,
    pub convergents: Vec<(i64, i64)>,
}

/// Convergents `p_j/q_j` of `alpha` with `q_j ≤ q_max`.
pub fn continued_fraction(alpha: f64, q_max: u64) -> ContinuedFraction {
    let mut quotients = Vec::new();
    let mut convergents = Vec::new();
    let (mut p0, mut q0, mut p1, mut q1) = (1i64, 0i64, 0i64, 1i64);
    let mut x = alpha;
    for _ in 0..64 {
        let a = x.floor();
        if !a.is_finite() || a.abs() > 1e15 {
            break;
        }
        let ai = a as i64;
        let p2 = ai.saturating_mul(p0).saturating_add(p1);
        let q2 = ai.saturating_mul(q0).saturating_add(q1);
        if q2 as u64 > q_max || q2 <= 0 {
            break;
        }
        quotients.push(ai);
        convergents.push((p2, q2));
        (p1, q1, p0, q0) = (p0, q0, p2, q2);
        let f = x - a;
        // Stop once the remaining fractional part is at rounding level.
        if f.abs() < 1e-12 * (1.0 + x.abs()) || (alpha - p2 as f64 / q2 as f64).abs() < 1e-16 {
            break;
        }
        x = 1.0 / f;
    }
    ContinuedFraction { alpha, quotients, convergents }
}

/// Exact continued fraction of `num/den`.
pub fn continued_fraction_exact(num: i64, den: i64, q_max: u64) -> ContinuedFraction {
    let mut quotients = Vec::new();
    let mut convergents = Vec::new();
    let (mut p0, mut q0, mut p1, mut q1) = (1i64, 0i64, 0i64, 1i64);
    let (mut a_num, mut a_den) = if den < 0 { (-num, -den) } else { (num, den) };
    while a_den != 0 {
        let a = a_num.div_euclid(a_den);
        let p2 = a * p0 + p1;
        let q2 = a * q0 + q1;
        if q2 as u64 > q_max {
            break;
        }
        quotients.push(a);
        convergents.push((p2, q2));
        (p1, q1, p0, q0) = (p0, q0, p2, q2);
        let r = a_num - a * a_den;
        (a_num, a_den) = (a_den, r);
    }
    ContinuedFraction { alpha: num as f64 / den as f64, quotients, convergents }
}

fn coord_convergent_denominators(c: &Coord, q_max: u64) -> Vec<u64> {
    let cf = match *c {
        Coord::Float(x) => continued_fraction(x, q_max),
        Coord::Exact { num, den } => continued_fraction_exact(num, den, q_max),
    };
    let mut qs: Vec<u64> = cf.convergents.iter().map(|&(_, q)| q as u64).collect();
    if qs.first() != Some(&1) {
        qs.insert(0, 1);
    }
    qs.dedup();
    qs
}

/// Value and witness of `b_{ξ,L}(y)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MajorantReport {
    pub value: f64,
    pub witness_q: u64,
    /// `(1/q², √y/(Lq⟨qξ₁⟩), √y/(q⟨qξ₂⟩))` at the witness; removed entries are `+∞`.
    pub components: [f64; 3],
    pub removed: [bool; 2],
    /// Set when the special denominators `(q, s)` produced the value.
    pub special_denominators: Option<(u64, u64)>,
    /// A floating-point `⟨qξᵢ⟩` fell below [`FLOAT_ZERO`] and was removed.
    pub float_removal: bool,
}

/// The three entries of the minimum at a given `q`.
pub fn majorant_entries(xi: &[Coord; 2], l: f64, y: f64, q: u64) -> ([f64; 3], [bool; 2], bool) {
    let (d1, r1) = xi[0].dist_mult(q);
    let (d2, r2) = xi[1].dist_mult(q);
    let qf = q as f64;
    let sy = y.sqrt();
    let e1 = 1.0 / (qf * qf);
    let e2 = if r1 { f64::INFINITY } else { sy / (l * qf * d1) };
    let e3 = if r2 { f64::INFINITY } else { sy / (qf * d2) };
    let float_removal = (r1 && matches!(xi[0], Coord::Float(_))) || (r2 && matches!(xi[1], Coord::Float(_)));
    ([e1, e2, e3], [r1, r2], float_removal)
}

fn min3(e: &[f64; 3]) -> f64 {
    e[0].min(e[1]).min(e[2])
}

/// `b_{ξ,L}(y)` by scanning `q = 1, 2, …` until `1/q²` drops below the
/// running maximum. The witness is the smallest maximizing `q`.
pub fn majorant_b_coords(xi: &[Coord; 2], l: f64, y: f64) -> MajorantReport {
    let mut best = MajorantReport {
        value: 0.0,
        witness_q: 0,
        components: [0.0; 3],
        removed: [false; 2],
        special_denominators: None,
        float_removal: false,
    };
    let mut q: u64 = 1;
    loop {
        let qf = q as f64;
        if 1.0 / (qf * qf) <= best.value {
            break;
        }
        let (e, r, fr) = majorant_entries(xi, l, y, q);
        let v = min3(&e);
        if v > best.value {
            best.value = v;
            best.witness_q = q;
            best.components = e;
            best.removed = r;
            best.float_removal = fr;
        }
        q += 1;
    }
    best
}

/// `b_{ξ,L}(y)` for a float vector `ξ`.
pub fn majorant_b(xi: [f64; 2], l: f64, y: f64) -> MajorantReport {
    majorant_b_coords(&[Coord::Float(xi[0]), Coord::Float(xi[1])], l, y)
}

/// `b_{ξ,L}(y)` by exhaustive scan over `q ≤ q_max`; a test oracle.
pub fn majorant_b_brute(xi: &[Coord; 2], l: f64, y: f64, q_max: u64) -> (f64, u64) {
    let mut best = (0.0, 0);
    for q in 1..=q_max {
        let (e, _, _) = majorant_entries(xi, l, y, q);
        let v = min3(&e);
        if v > best.0 {
            best = (v, q);
        }
    }
    best
}

/// `b_{ξ,L}(y)` through special denominators: `q₀ = s·q` with `q` a
/// convergent denominator of `ξ₁` and `s` one of `qξ₂ mod 1`.
///
/// Returns `None` ("not applicable") unless the result exceeds `2y^{1/4}`,
/// in which regime the witness of the scan is always of this form.
pub fn majorant_b_via_special_denominators(xi: &[Coord; 2], l: f64, y: f64) -> Option<MajorantReport> {
    let gate = 2.0 * y.powf(0.25);
    if gate >= 1.0 {
        return None;
    }
    // b > 2y^{1/4} forces 1/q₀² > 2y^{1/4}.
    let q_bound = (1.0 / gate).sqrt().floor() as u64;
    let mut cands: Vec<(u64, u64)> = Vec::new();
    for q in coord_convergent_denominators(&xi[0], q_bound) {
        let shifted = xi[1].mult_mod1(q);
        for s in coord_convergent_denominators(&shifted, q_bound / q) {
            cands.push((q, s));
        }
    }
    cands.sort_by_key(|&(q, s)| (q * s, q));
    cands.dedup_by_key(|c| c.0 * c.1);
    let mut best: Option<MajorantReport> = None;
    for (q, s) in cands {
        let q0 = q * s;
        let (e, r, fr) = majorant_entries(xi, l, y, q0);
        let v = min3(&e);
        if best.as_ref().is_none_or(|b| v > b.value) {
            best = Some(MajorantReport {
                value: v,
                witness_q: q0,
                components: e,
                removed: r,
                special_denominators: Some((q, s)),
                float_removal: fr,
            });
        }
    }
    best.filter(|b| b.value > gate)
}

/// `b̃_{ξ,L}(y) = b_{ξ,L}(y) + y^{1/4}`.
pub fn majorant_b_tilde(xi: [f64; 2], l: f64, y: f64) -> f64 {
    majorant_b(xi, l, y).value + y.powf(0.25)
}

/// `b_g(T)`: the supremum over `q` and points `x` of `(q⁻¹Z²)g` of
/// `min(1/q², 1/(q²T|x₁|), 1/(q²|x₂|))`, zero coordinates removed.
///
/// For each `q` the best point minimizes `max(T|x₁|, |x₂|)`; it is found by
/// enumerating the box that could still beat the running maximum.
pub fn majorant_bg(g: &GroupElement, t: f64) -> f64 {
    majorant_bg_report(g, t).0
}

/// `b_g(T)` together with the witness `q`.
pub fn majorant_bg_report(g: &GroupElement, t: f64) -> (f64, u64) {
    let m = g.m;
    let mut best = 0.0f64;
    let mut witness = 0;
    let mut q: u64 = 1;
    loop {
        let qf = q as f64;
        let inv_q2 = 1.0 / (qf * qf);
        if inv_q2 <= best {
            break;
        }
        let basis = LatticeBasis::from_rows(&Mat2::new(m.a / qf, m.b / qf, m.c / qf, m.d / qf));
        // A candidate only matters if max(1, N) < 1/(q² best).
        let mut radius = if best > 0.0 { inv_q2 / best } else { 1.0 };
        let mut found = f64::INFINITY;
        loop {
            enumerate_box_with(&basis, g.v, [radius / t, radius], |p| {
                let n = (t * p.x[0].abs()).max(p.x[1].abs());
                if n < found {
                    found = n;
                }
            });
            if found.is_finite() || best > 0.0 {
                break;
            }
            radius *= 2.0;
        }
        if found.is_finite() {
            let v = inv_q2 / found.max(1.0);
            if v > best {
                best = v;
                witness = q;
            }
        }
        q += 1;
    }
    (best, witness)
}

/// Riemann zeta for real `s > 1` by Euler–Maclaurin summation.
pub fn zeta(s: f64) -> f64 {
    assert!(s > 1.0, "zeta needs s > 1");
    let n = 20usize;
    let nf = n as f64;
    let mut sum: f64 = (1..n).map(|k| (k as f64).powf(-s)).sum();
    sum += nf.powf(1.0 - s) / (s - 1.0) + 0.5 * nf.powf(-s);
    // Bernoulli corrections B_{2j}/(2j)! · s(s+1)…(s+2j−2) N^{−s−2j+1}.
    let b = [1.0 / 6.0, -1.0 / 30.0, 1.0 / 42.0, -1.0 / 30.0, 5.0 / 66.0, -691.0 / 2730.0];
    let mut rising = s;
    let mut fact = 2.0;
    for (j, bj) in b.iter().enumerate() {
        let k = 2 * j + 1;
        sum += bj / fact * rising * nf.powf(-s - k as f64);
        rising *= (s + k as f64) * (s + k as f64 + 1.0);
        fact *= ((k + 2) * (k + 3)) as f64;
    }
    sum
}

fn check_tol(x: f64, tol: f64) -> Result<()> {
    if !(x > 0.0 && x.is_finite()) {
        return Err(Error::InvalidInput(format!("X must be positive, got {x}")));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidInput("tol must be positive".into()));
    }
    Ok(())
}

/// `𝔐_α(X) = Σ_ℓ min(1/ℓ², 1/(Xℓ⟨ℓα⟩))`.
///
/// For `ℓ ≥ X/2` every term equals `1/ℓ²`, so the sum is `ζ(2)` minus a
/// finite correction; the result carries no truncation error.
pub fn frak_m(alpha: f64, x: f64, tol: f64) -> Result<f64> {
    check_tol(x, tol)?;
    let zeta2 = std::f64::consts::PI.powi(2) / 6.0;
    let mut corr = 0.0;
    let top = (x / 2.0).ceil() as u64;
    for l in 1..top {
        let lf = l as f64;
        let d = nearest_int_dist(lf * alpha);
        let full = 1.0 / (lf * lf);
        let other = if d == 0.0 { f64::INFINITY } else { 1.0 / (x * lf * d) };
        corr += full - full.min(other);
    }
    Ok(zeta2 - corr)
}

/// `𝔐̃_ξ(X) = Σ_k σ(k) min(1/k², 1/(Xk⟨kξ⟩))` with `σ` the divisor count.
pub fn frak_m_tilde(xi1: f64, x: f64, tol: f64) -> Result<f64> {
    check_tol(x, tol)?;
    let zeta2 = std::f64::consts::PI.powi(2) / 6.0;
    let top = (x / 2.0).ceil() as usize;
    let sigma = crate::arith::divisor_counts(top);
    let mut corr = 0.0;
    for k in 1..top {
        let kf = k as f64;
        let d = nearest_int_dist(kf * xi1);
        let full = 1.0 / (kf * kf);
        let other = if d == 0.0 { f64::INFINITY } else { 1.0 / (x * kf * d) };
        corr += sigma[k] as f64 * (full - full.min(other));
    }
    Ok(zeta2 * zeta2 - corr)
}

fn frak_m1_generic(alpha: f64, x: f64, eps: f64) -> f64 {
    let total = x * zeta(2.0 - eps);
    let top = (x / 2.0).ceil() as u64;
    let mut corr = 0.0;
    for n in 1..top {
        let nf = n as f64;
        let d = nearest_int_dist(nf * alpha);
        let full = x / (nf * nf);
        let term = if d == 0.0 || x * d <= nf {
            full
        } else {
            (1.0 / (nf * d)).min(full) * (1.0 + (x * d / nf).ln().max(0.0))
        };
        corr += nf.powf(eps) * (full - term);
    }
    total - corr
}

/// `𝔐¹_α(X) = Σ_n min(X/n², 1/(n⟨nα⟩))(1 + log⁺(X⟨nα⟩/n))`.
pub fn frak_m1(alpha: f64, x: f64, tol: f64) -> Result<f64> {
    check_tol(x, tol)?;
    Ok(frak_m1_generic(alpha, x, 0.0))
}

/// `𝔐^{1,ε}_α(X)`, the same sum with an extra factor `n^ε`; requires
/// `0 ≤ ε ≤ 1/2`.
pub fn frak_m1_eps(alpha: f64, x: f64, eps: f64, tol: f64) -> Result<f64> {
    check_tol(x, tol)?;
    if !(0.0..=0.5).contains(&eps) {
        return Err(Error::InvalidInput(format!("eps must lie in [0, 1/2], got {eps}")));
    }
    Ok(frak_m1_generic(alpha, x, eps))
}

/// Outcome of [`diophantine_type_estimate`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum TypeEstimate {
    /// Fitted exponent `K̂`.
    Finite(f64),
    /// `ξ = m/q` up to rounding; the type is infinite.
    Rational { q: u64 },
}

/// Estimates the Diophantine type `K` from the decay of the best
/// approximation error.
///
/// For every `q ≤ q_max` the distance `‖ξ − m/q‖` (Euclidean, minimized
/// over `m`) is computed; at each `q` that sets a new record minimum the pair
/// `(log q, −log dist)` is kept and `K̂` is the least-squares slope through
/// these records.
pub fn diophantine_type_estimate(xi: &[f64], q_max: u64) -> Result<TypeEstimate> {
    if q_max < 2 || xi.is_empty() {
        return Err(Error::InvalidInput("q_max must be at least 2 and xi nonempty".into()));
    }
    let mut record = f64::INFINITY;
    let mut pts: Vec<(f64, f64)> = Vec::new();
    for q in 1..=q_max {
        let qf = q as f64;
        let d2: f64 = xi.iter().map(|&x| (nearest_int_dist(qf * x) / qf).powi(2)).sum();
        let dist = d2.sqrt();
        if dist < FLOAT_ZERO / qf {
            return Ok(TypeEstimate::Rational { q });
        }
        if dist < record {
            record = dist;
            if q > 1 {
                pts.push((qf.ln(), -dist.ln()));
            }
        }
    }
    if pts.len() < 2 {
        return Ok(TypeEstimate::Finite(f64::NAN));
    }
    Ok(TypeEstimate::Finite(least_squares_slope(&pts)))
}

/// Slope of the least-squares line through `pts`.
pub fn least_squares_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// `ξU^n = (ξ₁, nξ₁ + ξ₂)`.
pub fn shift_xi(xi: [f64; 2], n: i64) -> [f64; 2] {
    [xi[0], n as f64 * xi[0] + xi[1]]
}

/// Two-sided bound of `b_{ξ,L₁}(y₁)` in terms of `b_{ξ,L₂}(y₂)`.
pub fn order_change_bounds(xi: [f64; 2], l1: f64, l2: f64, y1: f64, y2: f64) -> (f64, f64, f64) {
    let b2 = majorant_b(xi, l2, y2).value;
    let b1 = majorant_b(xi, l1, y1).value;
    let r_l = l2 / l1;
    let r_y = (y1 / y2).sqrt();
    (r_l.min(1.0) * r_y.min(1.0) * b2, b1, r_l.max(1.0) * r_y.max(1.0) * b2)
}

/// `Σ_{|n|≤L} b̃_{ξUⁿ,1}(y)^η / (L · b̃_{ξ,L}(y)^η)`.
pub fn shift_sum_ratio(xi: [f64; 2], l: f64, y: f64, eta: f64) -> f64 {
    let nmax = l.floor() as i64;
    let sum: f64 = (-nmax..=nmax)
        .map(|n| majorant_b_tilde(shift_xi(xi, n), 1.0, y).powf(eta))
        .sum();
    sum / (l * majorant_b_tilde(xi, l, y).powf(eta))
}

/// Checks that every `q` whose entry exceeds `2y^{1/4}` is a multiple
/// `m·q₀` of the witness with `⟨qξᵢ⟩ = m⟨q₀ξᵢ⟩`. Returns `None` when
/// `b ≤ 2y^{1/4}` and the statement is vacuous.
pub fn witness_multiples_hold(xi: [f64; 2], l: f64, y: f64) -> Option<bool> {
    let gate = 2.0 * y.powf(0.25);
    let rep = majorant_b(xi, l, y);
    if rep.value <= gate {
        return None;
    }
    let q0 = rep.witness_q;
    let coords = [Coord::Float(xi[0]), Coord::Float(xi[1])];
    let qmax = (1.0 / gate).sqrt().floor() as u64 + 1;
    for q in 1..=qmax {
        let (e, _, _) = majorant_entries(&coords, l, y, q);
        if min3(&e) <= gate {
            continue;
        }
        if q % q0 != 0 {
            return Some(false);
        }
        let m = (q / q0) as f64;
        for x in xi {
            let lhs = nearest_int_dist(q as f64 * x);
            let rhs = m * nearest_int_dist(q0 as f64 * x);
            if (lhs - rhs).abs() > 1e-12 * m.max(1.0) {
                return Some(false);
            }
        }
    }
    Some(true)
}

/// `b_{ξ,L}(y)` as the infimum of `δ` for which no `q ≤ δ^{−1/2}` has a
/// point of `q⁻¹Z² + ξ` in `(√y/(δq²))·([−1/L,1/L] × [−1,1])`, located by
/// bisection in `log δ`.
pub fn majorant_b_lattice_form(xi: [f64; 2], l: f64, y: f64) -> f64 {
    let empty_for = |delta: f64| -> bool {
        let qmax = delta.powf(-0.5).floor() as u64;
        for q in 1..=qmax {
            let qf = q as f64;
            let basis = LatticeBasis::from_rows(&Mat2::new(1.0 / qf, 0.0, 0.0, 1.0 / qf));
            let s = y.sqrt() / (delta * qf * qf);
            let mut hit = false;
            enumerate_box_with(&basis, xi, [s / l, s], |_| hit = true);
            if hit {
                return false;
            }
        }
        true
    };
    // b ≤ 1 always, and the q = 1 entry gives b ≥ min(1, 2√y/L) since
    // ⟨ξᵢ⟩ ≤ 1/2. b ≥ δ iff the predicate fails at δ.
    let floor = (2.0 * y.sqrt() / l).min(1.0) * (1.0 - 1e-12);
    let (mut lo, mut hi) = (floor.ln(), 1.0f64.ln() + 1e-12);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if empty_for(mid.exp()) {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo < 1e-14 {
            break;
        }
    }
    hi.exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nearest_int_examples() {
        assert!((nearest_int_dist(2.3) - 0.3).abs() < 1e-15);
        assert_eq!(nearest_int_dist(-0.5), 0.5);
        assert_eq!(nearest_int_dist(7.0), 0.0);
    }

    #[test]
    fn continued_fraction_examples() {
        let cf = continued_fraction(0.5, 100);
        assert_eq!(cf.convergents, vec![(0, 1), (1, 2)]);
        let cf = continued_fraction(2f64.sqrt(), 20);
        assert_eq!(cf.convergents, vec![(1, 1), (3, 2), (7, 5), (17, 12)]);
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        let cf = continued_fraction(phi, 100);
        let qs: Vec<i64> = cf.convergents.iter().map(|c| c.1).collect();
        assert_eq!(qs, vec![1, 1, 2, 3, 5, 8, 13, 21, 34, 55, 89]);
        let cf = continued_fraction_exact(7, 5, 100);
        assert_eq!(cf.convergents.last(), Some(&(7, 5)));
    }

    #[test]
    fn majorant_examples() {
        let r = majorant_b([0.0, 0.0], 3.0, 0.01);
        assert_eq!((r.value, r.witness_q), (1.0, 1));
        let third = Coord::Exact { num: 1, den: 3 };
        let r = majorant_b_coords(&[third, third], 1.0, 0.01);
        assert!((r.value - 0.3).abs() < 1e-15);
        assert_eq!(r.witness_q, 1);
        let half = [Coord::Exact { num: 0, den: 1 }, Coord::Exact { num: 1, den: 2 }];
        assert!(majorant_b_coords(&half, 5.0, 1e-9).value >= 0.25);
        assert!((majorant_b_tilde([0.0, 0.0], 1.0, 1.0 / 16.0) - 1.5).abs() < 1e-15);
    }

    #[test]
    fn frak_m_half() {
        let z2 = std::f64::consts::PI.powi(2) / 6.0;
        assert!((frak_m(0.5, 2.0, 1e-10).unwrap() - z2).abs() < 1e-8);
        assert!(frak_m1_eps(0.3, 10.0, 0.6, 1e-10).is_err());
    }

    #[test]
    fn zeta_values() {
        assert!((zeta(2.0) - std::f64::consts::PI.powi(2) / 6.0).abs() < 1e-14);
        assert!((zeta(1.5) - 2.612_375_348_685_488).abs() < 1e-12);
    }
}

//! The affine group `G = SL(2,R) ⋉ R²` and its coordinates.
//!
//! Elements are pairs `(M, v)` acting on row vectors from the right,
//! `p · (M, v) = pM + v`, so that `(M, v)(M', v') = (MM', vM' + v')`.
//! The flows `U^t`, `a(y)` and `Φ^t` live in the matrix factor.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{reduce_to_fundamental_domain, IntMat2};

/// Tolerance for the determinant invariant.
pub const DET_TOL: f64 = 1e-12;

/// A real 2×2 matrix `(a, b; c, d)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Mat2 {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2 { a: 1.0, b: 0.0, c: 0.0, d: 1.0 };

    pub const fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        Mat2 { a, b, c, d }
    }

    pub fn det(&self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    pub fn mul(&self, o: &Mat2) -> Mat2 {
        Mat2 {
            a: self.a * o.a + self.b * o.c,
            b: self.a * o.b + self.b * o.d,
            c: self.c * o.a + self.d * o.c,
            d: self.c * o.b + self.d * o.d,
        }
    }

    /// Inverse assuming determinant one.
    pub fn inv_sl(&self) -> Mat2 {
        Mat2 { a: self.d, b: -self.b, c: -self.c, d: self.a }
    }

    pub fn neg(&self) -> Mat2 {
        Mat2 { a: -self.a, b: -self.b, c: -self.c, d: -self.d }
    }

    /// Row vector times matrix.
    pub fn row_mul(&self, p: [f64; 2]) -> [f64; 2] {
        [p[0] * self.a + p[1] * self.c, p[0] * self.b + p[1] * self.d]
    }

    /// Möbius action on the upper half plane, returned as `(Re, Im)`.
    pub fn mobius_i(&self) -> (f64, f64) {
        let den = self.c * self.c + self.d * self.d;
        ((self.a * self.c + self.b * self.d) / den, 1.0 / den)
    }

    pub fn max_abs_diff(&self, o: &Mat2) -> f64 {
        (self.a - o.a)
            .abs()
            .max((self.b - o.b).abs())
            .max((self.c - o.c).abs())
            .max((self.d - o.d).abs())
    }

    /// Rescale so the determinant is exactly one up to rounding.
    fn renormalize(&self) -> Mat2 {
        let det = self.det();
        if (det - 1.0).abs() <= 1e-15 || det <= 0.0 {
            return *self;
        }
        let s = det.sqrt().recip();
        Mat2 { a: self.a * s, b: self.b * s, c: self.c * s, d: self.d * s }
    }

    /// `U^t = (1, t; 0, 1)`.
    pub fn u(t: f64) -> Mat2 {
        Mat2::new(1.0, t, 0.0, 1.0)
    }

    /// `a(y) = diag(√y, 1/√y)`.
    pub fn a(y: f64) -> Mat2 {
        let s = y.sqrt();
        Mat2::new(s, 0.0, 0.0, 1.0 / s)
    }

    /// `k(θ) = (cos θ, −sin θ; sin θ, cos θ)`.
    pub fn k(theta: f64) -> Mat2 {
        let (s, c) = theta.sin_cos();
        Mat2::new(c, -s, s, c)
    }

    pub fn from_int(g: &IntMat2) -> Mat2 {
        Mat2::new(g.a as f64, g.b as f64, g.c as f64, g.d as f64)
    }
}

/// An element `(M, v)` of `G`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupElement {
    pub m: Mat2,
    pub v: [f64; 2],
}

impl GroupElement {
    pub const IDENTITY: GroupElement = GroupElement { m: Mat2::IDENTITY, v: [0.0, 0.0] };

    /// Checked constructor enforcing `|det M − 1| ≤ 1e−12`.
    pub fn new(m: Mat2, v: [f64; 2]) -> Result<Self> {
        let det = m.det();
        if !(det - 1.0).abs().le(&DET_TOL) || !v[0].is_finite() || !v[1].is_finite() {
            return Err(Error::InvalidInput(format!("matrix determinant {det} is not 1")));
        }
        Ok(GroupElement { m, v })
    }

    /// Matrix element with zero translation; the determinant is renormalized.
    pub fn from_matrix(m: Mat2) -> Self {
        GroupElement { m: m.renormalize(), v: [0.0, 0.0] }
    }

    pub fn translation(v: [f64; 2]) -> Self {
        GroupElement { m: Mat2::IDENTITY, v }
    }

    /// Drops the translation part.
    pub fn linear(&self) -> GroupElement {
        GroupElement { m: self.m, v: [0.0, 0.0] }
    }

    pub fn max_abs_diff(&self, o: &GroupElement) -> f64 {
        self.m
            .max_abs_diff(&o.m)
            .max((self.v[0] - o.v[0]).abs())
            .max((self.v[1] - o.v[1]).abs())
    }

    /// 3×3 affine embedding `[[M, 0], [v, 1]]`, row major.
    pub fn affine_matrix(&self) -> [[f64; 3]; 3] {
        [
            [self.m.a, self.m.b, 0.0],
            [self.m.c, self.m.d, 0.0],
            [self.v[0], self.v[1], 1.0],
        ]
    }
}

/// `(M, v)(M', v') = (MM', vM' + v')`, renormalizing the determinant.
pub fn compose(g: &GroupElement, h: &GroupElement) -> GroupElement {
    let m = g.m.mul(&h.m).renormalize();
    let w = h.m.row_mul(g.v);
    GroupElement { m, v: [w[0] + h.v[0], w[1] + h.v[1]] }
}

/// `(M, v)⁻¹ = (M⁻¹, −vM⁻¹)`.
pub fn inverse(g: &GroupElement) -> GroupElement {
    let mi = g.m.inv_sl();
    let w = mi.row_mul(g.v);
    GroupElement { m: mi, v: [-w[0], -w[1]] }
}

pub fn flow_u(t: f64) -> GroupElement {
    GroupElement::from_matrix(Mat2::u(t))
}

/// `a(y) = diag(√y, 1/√y)`; requires `y > 0`.
pub fn flow_a(y: f64) -> GroupElement {
    GroupElement::from_matrix(Mat2::a(y))
}

/// `Φ^t = diag(e^{−t/2}, e^{t/2})`.
pub fn flow_phi(t: f64) -> GroupElement {
    GroupElement::from_matrix(Mat2::new((-t / 2.0).exp(), 0.0, 0.0, (t / 2.0).exp()))
}

/// Affine action `p ↦ pM + v`.
pub fn act_point(p: [f64; 2], g: &GroupElement) -> [f64; 2] {
    let w = g.m.row_mul(p);
    [w[0] + g.v[0], w[1] + g.v[1]]
}

/// Coordinates of `M = n(u) a(v) k(θ)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IwasawaCoords {
    pub u: f64,
    pub v: f64,
    pub theta: f64,
}

/// Maps an angle to `(−π, π]`.
pub fn wrap_angle(theta: f64) -> f64 {
    let mut t = theta % (2.0 * PI);
    if t <= -PI {
        t += 2.0 * PI;
    } else if t > PI {
        t -= 2.0 * PI;
    }
    t
}

/// Iwasawa decomposition of an `SL(2,R)` matrix.
pub fn iwasawa(m: &Mat2) -> IwasawaCoords {
    let den = m.c * m.c + m.d * m.d;
    IwasawaCoords {
        u: (m.a * m.c + m.b * m.d) / den,
        v: 1.0 / den,
        theta: m.c.atan2(m.d),
    }
}

/// Rebuilds `n(u) a(v) k(θ)`.
pub fn iwasawa_compose(c: &IwasawaCoords) -> Mat2 {
    Mat2::u(c.u).mul(&Mat2::a(c.v)).mul(&Mat2::k(c.theta))
}

/// A point `Γ(1, ξ)M` of the quotient with `ξ ∈ [0,1)²` and `M(i)` in the
/// standard fundamental domain.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CanonicalPoint {
    pub xi: [f64; 2],
    pub m: Mat2,
}

impl CanonicalPoint {
    pub fn group_element(&self) -> GroupElement {
        compose(&GroupElement::translation(self.xi), &GroupElement::from_matrix(self.m))
    }
}

/// Reduces into `[0, 1)`.
pub fn frac(x: f64) -> f64 {
    let f = x - x.floor();
    if f >= 1.0 {
        0.0
    } else {
        f
    }
}

const TIE: f64 = 1e-11;

/// All words of length at most three in `S`, `T`, `T⁻¹`.
fn short_words() -> Vec<IntMat2> {
    let letters = [IntMat2::S, IntMat2::T, IntMat2::T.inv()];
    let mut out = vec![IntMat2::IDENTITY];
    let mut frontier = vec![IntMat2::IDENTITY];
    for _ in 0..3 {
        let mut next = Vec::new();
        for w in &frontier {
            for l in &letters {
                next.push(w.mul(l));
            }
        }
        out.extend(next.iter().copied());
        frontier = next;
    }
    out
}

fn in_closed_domain(m: &Mat2) -> bool {
    let (x, y) = m.mobius_i();
    x.abs() <= 0.5 + TIE && x * x + y * y >= 1.0 - TIE
}

fn fold_theta(theta: f64) -> f64 {
    let t = theta.rem_euclid(PI);
    if t > PI - 1e-13 {
        0.0
    } else {
        t
    }
}

/// Rewrites `g = (M, v)` as `(1, ξ)M'` with `ξ = vM⁻¹γ mod 1` and `M = γM'`.
///
/// Boundary ties go to `Re z ≤ 1/2` and, on the unit arc, `Re z ≥ 0`. When
/// `M'(i)` has a nontrivial stabilizer the representative with the smallest
/// angle modulo `π` is chosen, and the sign is fixed by `θ ∈ (−π/2, π/2]`.
pub fn canonicalize(g: &GroupElement) -> CanonicalPoint {
    let red = reduce_to_fundamental_domain(&g.m);
    let mut gamma = red.gamma;
    let mut m = red.reduced;
    // Boundary ties and stabilizers: try short words around the reduced point.
    let mut best: Option<(i32, f64, IntMat2)> = None;
    for w in short_words() {
        // M'' = wM and gamma'' = gamma w⁻¹ keep gamma'' M'' = gamma M.
        let cand = Mat2::from_int(&w).mul(&m);
        if !in_closed_domain(&cand) {
            continue;
        }
        let (x, y) = cand.mobius_i();
        let on_left_edge = x < -0.5 + TIE;
        let on_left_arc = x * x + y * y < 1.0 + TIE && x < -TIE;
        let penalty = 2 * on_left_edge as i32 + on_left_arc as i32;
        let th = fold_theta(iwasawa(&cand).theta);
        let better = match &best {
            None => true,
            Some((p, t, _)) => penalty < *p || (penalty == *p && th < *t - 1e-12),
        };
        if better {
            best = Some((penalty, th, w));
        }
    }
    if let Some((_, _, w)) = best {
        m = Mat2::from_int(&w).mul(&m);
        gamma = gamma.mul(&w.inv());
    }
    let theta = iwasawa(&m).theta;
    if !(theta > -PI / 2.0 && theta <= PI / 2.0) {
        m = m.neg();
        gamma = gamma.neg();
    }
    // g = (1, ξ0) gamma m with ξ0 = v M⁻¹, and (1, ξ0) gamma = gamma (1, ξ0 gamma).
    let xi0 = g.m.inv_sl().row_mul(g.v);
    let xi = Mat2::from_int(&gamma).row_mul(xi0);
    CanonicalPoint { xi: [frac(xi[0]), frac(xi[1])], m }
}

/// Frobenius norm of `g⁻¹h − I` in the 3×3 affine embedding.
pub fn proxy_distance(g: &GroupElement, h: &GroupElement) -> f64 {
    let q = compose(&inverse(g), h).affine_matrix();
    let mut s = 0.0;
    for (i, row) in q.iter().enumerate() {
        for (j, x) in row.iter().enumerate() {
            let e = x - if i == j { 1.0 } else { 0.0 };
            s += e * e;
        }
    }
    s.sqrt()
}

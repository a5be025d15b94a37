//! Two-dimensional lattices: Gauss reduction, shortest vectors, heights and
//! reduction of `SL(2,R)` into the standard fundamental domain of `SL(2,Z)`.

use serde::{Deserialize, Serialize};

use crate::group::{GroupElement, Mat2};

/// An integer 2×2 matrix, used for elements of `SL(2,Z)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IntMat2 {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
}

impl IntMat2 {
    pub const IDENTITY: IntMat2 = IntMat2 { a: 1, b: 0, c: 0, d: 1 };
    pub const S: IntMat2 = IntMat2 { a: 0, b: -1, c: 1, d: 0 };
    pub const T: IntMat2 = IntMat2 { a: 1, b: 1, c: 0, d: 1 };

    pub const fn new(a: i64, b: i64, c: i64, d: i64) -> Self {
        IntMat2 { a, b, c, d }
    }

    pub fn det(&self) -> i64 {
        self.a * self.d - self.b * self.c
    }

    pub fn mul(&self, o: &IntMat2) -> IntMat2 {
        IntMat2 {
            a: self.a * o.a + self.b * o.c,
            b: self.a * o.b + self.b * o.d,
            c: self.c * o.a + self.d * o.c,
            d: self.c * o.b + self.d * o.d,
        }
    }

    /// Inverse of a determinant-one matrix.
    pub fn inv(&self) -> IntMat2 {
        IntMat2 { a: self.d, b: -self.b, c: -self.c, d: self.a }
    }

    pub fn neg(&self) -> IntMat2 {
        IntMat2 { a: -self.a, b: -self.b, c: -self.c, d: -self.d }
    }

    /// `T^n = (1, n; 0, 1)`.
    pub fn t_pow(n: i64) -> IntMat2 {
        IntMat2 { a: 1, b: n, c: 0, d: 1 }
    }

    /// Row vector times matrix.
    pub fn row_mul(&self, p: [f64; 2]) -> [f64; 2] {
        Mat2::from_int(self).row_mul(p)
    }
}

/// Result of reducing `M` into the fundamental domain: `gamma · reduced = M`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReductionResult {
    pub gamma: IntMat2,
    pub reduced: Mat2,
}

/// A lattice basis given by two row vectors.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LatticeBasis {
    pub b1: [f64; 2],
    pub b2: [f64; 2],
}

fn dot(p: [f64; 2], q: [f64; 2]) -> f64 {
    p[0] * q[0] + p[1] * q[1]
}

impl LatticeBasis {
    pub fn from_rows(m: &Mat2) -> Self {
        LatticeBasis { b1: [m.a, m.b], b2: [m.c, m.d] }
    }

    /// Lagrange reduction. Returns the reduced basis and the integer matrix
    /// `U` with `reduced = U · self` (rows).
    pub fn gauss_reduce(&self) -> (LatticeBasis, IntMat2) {
        let (mut b1, mut b2) = (self.b1, self.b2);
        let mut u = IntMat2::IDENTITY;
        if dot(b1, b1) > dot(b2, b2) {
            std::mem::swap(&mut b1, &mut b2);
            u = IntMat2::new(u.c, u.d, u.a, u.b);
        }
        for _ in 0..10_000 {
            let n1 = dot(b1, b1);
            let mu = (dot(b1, b2) / n1).round();
            if mu != 0.0 {
                b2 = [b2[0] - mu * b1[0], b2[1] - mu * b1[1]];
                let m = mu as i64;
                u = IntMat2::new(u.a, u.b, u.c - m * u.a, u.d - m * u.b);
            }
            if dot(b2, b2) < n1 {
                std::mem::swap(&mut b1, &mut b2);
                u = IntMat2::new(u.c, u.d, u.a, u.b);
            } else {
                break;
            }
        }
        (LatticeBasis { b1, b2 }, u)
    }
}

/// Euclidean length of the shortest nonzero vector of `Z²M`.
pub fn shortest_vector_length(m: &Mat2) -> f64 {
    let (r, _) = LatticeBasis::from_rows(m).gauss_reduce();
    dot(r.b1, r.b1).sqrt()
}

/// `ℓ(M)⁻²`, the largest height of a point in the orbit `Γ'M(i)`.
pub fn invariant_height(m: &Mat2) -> f64 {
    let l = shortest_vector_length(m);
    1.0 / (l * l)
}

/// `y_g(T) = T⁻¹ ℓ(D(g) a(T))⁻²` where `D(g)` drops the translation.
pub fn y_g(g: &GroupElement, t: f64) -> f64 {
    let l = shortest_vector_length(&g.m.mul(&Mat2::a(t)));
    1.0 / (t * l * l)
}

/// Finds `gamma ∈ SL(2,Z)` with `gamma · reduced = M` and `reduced(i)` in
/// `|Re z| ≤ 1/2`, `|z| ≥ 1`.
pub fn reduce_to_fundamental_domain(m: &Mat2) -> ReductionResult {
    let mut gamma = IntMat2::IDENTITY;
    let mut r = *m;
    for _ in 0..100_000 {
        let (x, _) = r.mobius_i();
        let n = x.round();
        if n != 0.0 {
            let n = n as i64;
            r = Mat2::from_int(&IntMat2::t_pow(-n)).mul(&r);
            gamma = gamma.mul(&IntMat2::t_pow(n));
        }
        let (x, y) = r.mobius_i();
        if x * x + y * y < 1.0 - 1e-15 {
            r = Mat2::from_int(&IntMat2::S).mul(&r);
            gamma = gamma.mul(&IntMat2::S.inv());
        } else {
            break;
        }
    }
    ReductionResult { gamma, reduced: r }
}

/// A point of an affine lattice `k₁b₁ + k₂b₂ + w` found by [`enumerate_box`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LatticePoint {
    pub k: [i64; 2],
    pub x: [f64; 2],
}

/// All points `k₁b₁ + k₂b₂ + w` with `|x₁| ≤ h₁` and `|x₂| ≤ h₂`.
///
/// The box is first mapped to the unit square, the scaled basis is Gauss
/// reduced and the reduced coordinates are scanned row by row, each row
/// solving the linear constraints for an exact integer interval.
pub fn enumerate_box(basis: &LatticeBasis, w: [f64; 2], h: [f64; 2]) -> Vec<LatticePoint> {
    let mut out = Vec::new();
    enumerate_box_with(basis, w, h, |p| out.push(p));
    out
}

/// Callback form of [`enumerate_box`].
pub fn enumerate_box_with(
    basis: &LatticeBasis,
    w: [f64; 2],
    h: [f64; 2],
    mut visit: impl FnMut(LatticePoint),
) {
    if !(h[0] >= 0.0 && h[1] >= 0.0) {
        return;
    }
    // Zero half-widths are widened slightly; the final filter is exact.
    let sx = 1.0 / h[0].max(1e-100);
    let sy = 1.0 / h[1].max(1e-100);
    let scaled = LatticeBasis {
        b1: [basis.b1[0] * sx, basis.b1[1] * sy],
        b2: [basis.b2[0] * sx, basis.b2[1] * sy],
    };
    let (r, u) = scaled.gauss_reduce();
    let ws = [w[0] * sx, w[1] * sy];
    // j = (p − w) R⁻¹ with R rows r.b1, r.b2.
    let det = r.b1[0] * r.b2[1] - r.b1[1] * r.b2[0];
    let inv = [[r.b2[1] / det, -r.b1[1] / det], [-r.b2[0] / det, r.b1[0] / det]];
    let c1 = -(ws[0] * inv[0][0] + ws[1] * inv[1][0]);
    let rad1 = inv[0][0].abs() + inv[1][0].abs();
    let slack = 1e-9;
    let j1_lo = (c1 - rad1 - slack).ceil() as i64;
    let j1_hi = (c1 + rad1 + slack).floor() as i64;
    for j1 in j1_lo..=j1_hi {
        let base = [j1 as f64 * r.b1[0] + ws[0], j1 as f64 * r.b1[1] + ws[1]];
        let mut lo = f64::NEG_INFINITY;
        let mut hi = f64::INFINITY;
        let mut empty = false;
        for i in 0..2 {
            let bi = r.b2[i];
            if bi.abs() < 1e-300 {
                if base[i].abs() > 1.0 + slack {
                    empty = true;
                }
                continue;
            }
            let a = (-1.0 - base[i]) / bi;
            let b = (1.0 - base[i]) / bi;
            lo = lo.max(a.min(b));
            hi = hi.min(a.max(b));
        }
        if empty || lo > hi + slack {
            continue;
        }
        let j2_lo = (lo - slack).ceil() as i64;
        let j2_hi = (hi + slack).floor() as i64;
        for j2 in j2_lo..=j2_hi {
            let k = [j1 * u.a + j2 * u.c, j1 * u.b + j2 * u.d];
            let x = [
                k[0] as f64 * basis.b1[0] + k[1] as f64 * basis.b2[0] + w[0],
                k[0] as f64 * basis.b1[1] + k[1] as f64 * basis.b2[1] + w[1],
            ];
            if x[0].abs() <= h[0] && x[1].abs() <= h[1] {
                visit(LatticePoint { k, x });
            }
        }
    }
}

/// Greatest common divisor, always nonnegative.
pub fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Returns `(g, x, y)` with `ax + by = g = gcd(a, b) ≥ 0`.
pub fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    let (mut r0, mut r1) = (a, b);
    let (mut s0, mut s1) = (1i64, 0i64);
    let (mut t0, mut t1) = (0i64, 1i64);
    while r1 != 0 {
        let q = r0.div_euclid(r1);
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 < 0 {
        (-r0, -s0, -t0)
    } else {
        (r0, s0, t0)
    }
}

/// Completes a primitive row `(c, d)` to `(a, b; c, d) ∈ SL(2,Z)`.
pub fn complete_row(c: i64, d: i64) -> Option<IntMat2> {
    let (g, x, y) = ext_gcd(c, d);
    if g != 1 {
        return None;
    }
    // c·x + d·y = 1, so a = y, b = −x gives a d − b c = 1.
    Some(IntMat2::new(y, -x, c, d))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shortest_vector_examples() {
        assert!((shortest_vector_length(&Mat2::IDENTITY) - 1.0).abs() < 1e-15);
        assert!((shortest_vector_length(&Mat2::a(4.0)) - 0.5).abs() < 1e-15);
        assert!((shortest_vector_length(&Mat2::new(1.0, 0.0, 0.5, 1.0)) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn height_examples() {
        assert!((invariant_height(&Mat2::a(4.0)) - 4.0).abs() < 1e-13);
        assert!((y_g(&GroupElement::IDENTITY, 10.0) - 1.0).abs() < 1e-12);
        let s = GroupElement::from_matrix(Mat2::new(0.0, -1.0, 1.0, 0.0));
        assert!((y_g(&s, 4.0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn reduction_examples() {
        let r = reduce_to_fundamental_domain(&Mat2::IDENTITY);
        assert_eq!(r.gamma, IntMat2::IDENTITY);
        let r = reduce_to_fundamental_domain(&Mat2::u(3.0));
        assert_eq!(r.gamma, IntMat2::t_pow(3));
        assert!(r.reduced.max_abs_diff(&Mat2::IDENTITY) < 1e-15);
        let m = Mat2::new(1.0, 0.0, 1.0, 1.0);
        let r = reduce_to_fundamental_domain(&m);
        let (x, y) = r.reduced.mobius_i();
        assert!(x.abs() <= 0.5 + 1e-12 && x * x + y * y >= 1.0 - 1e-12);
        assert!(Mat2::from_int(&r.gamma).mul(&r.reduced).max_abs_diff(&m) < 1e-12);
        assert_eq!(r.gamma.det(), 1);
    }

    #[test]
    fn complete_row_is_unimodular() {
        for (c, d) in [(3, 5), (-7, 2), (0, 1), (1, 0), (12, -5)] {
            let g = complete_row(c, d).unwrap();
            assert_eq!(g.det(), 1);
            assert_eq!((g.c, g.d), (c, d));
        }
        assert!(complete_row(4, 6).is_none());
    }

    #[test]
    fn box_enumeration_matches_brute_force() {
        let basis = LatticeBasis { b1: [0.3, 1.7], b2: [-2.1, 0.4] };
        let w = [0.25, -0.6];
        let h = [3.0, 0.8];
        let mut fast: Vec<[i64; 2]> = enumerate_box(&basis, w, h).iter().map(|p| p.k).collect();
        let mut slow = Vec::new();
        for k1 in -40..=40i64 {
            for k2 in -40..=40i64 {
                let x = [
                    k1 as f64 * 0.3 + k2 as f64 * -2.1 + w[0],
                    k1 as f64 * 1.7 + k2 as f64 * 0.4 + w[1],
                ];
                if x[0].abs() <= h[0] && x[1].abs() <= h[1] {
                    slow.push([k1, k2]);
                }
            }
        }
        fast.sort();
        slow.sort();
        assert_eq!(fast, slow);
    }
}

//! Multiplicative functions, Kloosterman and Ramanujan sums, the Weil
//! bound, `φ`-twisted exponential sums and a harness for the Kloosterman
//! cancellation lemma.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{ext_gcd, gcd};
use crate::quadrature::{composite_gl, gauss_legendre_adaptive, PolyBump};

/// `e(x) = exp(2πix)`.
pub fn e(x: f64) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI * x)
}

/// Tables of `μ`, `φ`, `σ` (number of divisors) and `σ₁` on `1..=limit`.
#[derive(Clone, Debug)]
pub struct SieveTable {
    pub limit: usize,
    pub mu: Vec<i8>,
    pub phi: Vec<u64>,
    pub sigma: Vec<u32>,
    pub sigma1: Vec<u64>,
}

impl SieveTable {
    /// Linear sieve for `μ` and `φ`, divisor sieve for `σ` and `σ₁`.
    pub fn new(limit: usize) -> Self {
        let n = limit.max(1);
        let mut mu = vec![0i8; n + 1];
        let mut phi = vec![0u64; n + 1];
        let mut composite = vec![false; n + 1];
        let mut primes: Vec<usize> = Vec::new();
        mu[1] = 1;
        phi[1] = 1;
        for i in 2..=n {
            if !composite[i] {
                primes.push(i);
                mu[i] = -1;
                phi[i] = (i - 1) as u64;
            }
            for &p in &primes {
                let ip = i * p;
                if ip > n {
                    break;
                }
                composite[ip] = true;
                if i % p == 0 {
                    mu[ip] = 0;
                    phi[ip] = phi[i] * p as u64;
                    break;
                }
                mu[ip] = -mu[i];
                phi[ip] = phi[i] * (p as u64 - 1);
            }
        }
        let mut sigma = vec![0u32; n + 1];
        let mut sigma1 = vec![0u64; n + 1];
        for d in 1..=n {
            for m in (d..=n).step_by(d) {
                sigma[m] += 1;
                sigma1[m] += d as u64;
            }
        }
        SieveTable { limit: n, mu, phi, sigma, sigma1 }
    }
}

/// Number of divisors `σ(k)` for `k < len` (index 0 unused).
pub fn divisor_counts(len: usize) -> Vec<u32> {
    let mut s = vec![0u32; len.max(1)];
    for d in 1..len {
        for m in (d..len).step_by(d) {
            s[m] += 1;
        }
    }
    s
}

/// Prime factorization by trial division as `(p, exponent)` pairs.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n.is_multiple_of(p) {
            let mut k = 0;
            while n.is_multiple_of(p) {
                n /= p;
                k += 1;
            }
            out.push((p, k));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn mobius(n: u64) -> i64 {
    let f = factorize(n);
    if f.iter().any(|&(_, k)| k > 1) {
        0
    } else if f.len().is_multiple_of(2) {
        1
    } else {
        -1
    }
}

pub fn euler_phi(n: u64) -> u64 {
    factorize(n).iter().fold(n, |acc, &(p, _)| acc / p * (p - 1))
}

/// Number of divisors.
pub fn num_divisors(n: u64) -> u64 {
    factorize(n).iter().map(|&(_, k)| k as u64 + 1).product()
}

/// Inverse of `d` modulo `c`, assuming `gcd(d, c) = 1`.
pub fn mod_inverse(d: i64, c: i64) -> i64 {
    let (_, x, _) = ext_gcd(d.rem_euclid(c), c);
    x.rem_euclid(c)
}

/// Precomputed units, inverses and roots of unity for a fixed modulus.
#[derive(Clone, Debug)]
pub struct KloostermanTable {
    pub c: u64,
    units: Vec<(u64, u64)>,
    roots: Vec<Complex64>,
}

impl KloostermanTable {
    pub fn new(c: u64) -> Self {
        assert!(c >= 1);
        let ci = c as i64;
        let units = if c == 1 {
            vec![(0, 0)]
        } else {
            (1..c)
                .filter(|&d| gcd(d as i64, ci) == 1)
                .map(|d| (d, mod_inverse(d as i64, ci) as u64))
                .collect()
        };
        let roots = (0..c).map(|r| e(r as f64 / c as f64)).collect();
        KloostermanTable { c, units, roots }
    }

    /// `S(n, m; c) = Σ_{d ∈ (Z/c)^×} e((nd + m d*)/c)`.
    pub fn sum(&self, n: i64, m: i64) -> Complex64 {
        let c = self.c as i64;
        let (nr, mr) = (n.rem_euclid(c) as u64, m.rem_euclid(c) as u64);
        let cu = self.c;
        let mut s = Complex64::new(0.0, 0.0);
        for &(d, di) in &self.units {
            let r = (nr * d + mr * di) % cu;
            s += self.roots[r as usize];
        }
        s
    }
}

/// Kloosterman sum `S(n, m; c)`; `S(·,·;1) = 1`.
pub fn kloosterman(n: i64, m: i64, c: u64) -> Complex64 {
    KloostermanTable::new(c).sum(n, m)
}

/// Ramanujan sum `S(n, 0; c) = μ(c/(c,n)) φ(c)/φ(c/(c,n))`.
pub fn ramanujan(n: i64, c: u64) -> i64 {
    let g = gcd(n, c as i64) as u64;
    let g = if g == 0 { c } else { g };
    let r = c / g;
    mobius(r) * (euler_phi(c) / euler_phi(r)) as i64
}

/// `|S(n,m;c)|` against `σ(c) gcd(n,m,c)^{1/2} √c`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeilCheck {
    pub value: f64,
    pub bound: f64,
    pub ok: bool,
}

pub fn weil_bound(n: i64, m: i64, c: u64) -> f64 {
    let g = gcd(gcd(n, m), c as i64) as f64;
    num_divisors(c) as f64 * g.sqrt() * (c as f64).sqrt()
}

pub fn weil_check(n: i64, m: i64, c: u64) -> Result<WeilCheck> {
    if n == 0 && m == 0 {
        return Err(Error::InvalidInput("weil_check needs n or m nonzero".into()));
    }
    let value = kloosterman(n, m, c).norm();
    let bound = weil_bound(n, m, c);
    Ok(WeilCheck { value, bound, ok: value <= bound + 1e-6 })
}

/// `Σ_{d=1}^{n} d·e(d·j·α)`, by the closed form when `⟨jα⟩` is not tiny.
pub fn geometric_weighted_sum(j: u64, alpha: f64, n: u64) -> Complex64 {
    let x = j as f64 * alpha;
    let fx = x - x.round();
    if fx.abs() < 1e-3 {
        return geometric_weighted_sum_direct(j, alpha, n);
    }
    let nf = n as f64;
    let z = e(fx);
    let num = e((n + 2) as f64 * fx) * nf - e((n + 1) as f64 * fx) * (nf + 1.0) + z;
    let den = (z - 1.0) * (z - 1.0);
    num / den
}

/// Direct summation of `Σ_{d=1}^{n} d·e(d·j·α)`.
pub fn geometric_weighted_sum_direct(j: u64, alpha: f64, n: u64) -> Complex64 {
    let x = j as f64 * alpha;
    let fx = x - x.round();
    (1..=n).map(|d| e(d as f64 * fx) * d as f64).sum()
}

/// Result of [`phi_twisted_sum`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwistedSum {
    pub direct: Complex64,
    pub rearranged: Complex64,
    pub identity_ok: bool,
}

/// `Σ_{1≤k≤X} φ(kq) e(kα)`, directly and through the divisor rearrangement
/// `Σ_{d₂|q} d₂ Σ_{j≤X, (q,j)=1} μ(jq/d₂) Σ_{d₁≤X/j} d₁ e(d₁jα)`.
pub fn phi_twisted_sum(q: u64, alpha: f64, x: f64, sieve: Option<&SieveTable>) -> Result<TwistedSum> {
    if q == 0 || !(x >= 1.0) {
        return Err(Error::InvalidInput("need q ≥ 1 and X ≥ 1".into()));
    }
    let kmax = x.floor() as u64;
    let need = (kmax * q) as usize;
    let owned;
    let sv = match sieve {
        Some(s) if s.limit >= need => s,
        _ => {
            owned = SieveTable::new(need);
            &owned
        }
    };
    let direct: Complex64 = (1..=kmax)
        .map(|k| e(k as f64 * alpha) * sv.phi[(k * q) as usize] as f64)
        .sum();
    let mut rearranged = Complex64::new(0.0, 0.0);
    for d2 in (1..=q).filter(|d| q.is_multiple_of(*d)) {
        let mut inner = Complex64::new(0.0, 0.0);
        for j in 1..=kmax {
            if gcd(q as i64, j as i64) != 1 {
                continue;
            }
            let mu = sv.mu[(j * q / d2) as usize];
            if mu == 0 {
                continue;
            }
            inner += geometric_weighted_sum(j, alpha, kmax / j) * mu as f64;
        }
        rearranged += inner * d2 as f64;
    }
    let identity_ok = (direct - rearranged).norm() <= 1e-8 * direct.norm().max(1.0);
    Ok(TwistedSum { direct, rearranged, identity_ok })
}

/// `|μ(q)| σ₁(q)/φ(q)`.
pub fn sigma1_over_phi(sieve: &SieveTable, q: usize) -> f64 {
    if sieve.mu[q] == 0 {
        0.0
    } else {
        sieve.sigma1[q] as f64 / sieve.phi[q] as f64
    }
}

/// A 1-periodic profile for the second argument of the harness.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum PeriodicProfile {
    Constant(f64),
    /// `e(freq·x)·bump(x mod 1)`; the bump must be supported in `[0, 1]`.
    Modulated { freq: i64, bump: PolyBump },
}

impl PeriodicProfile {
    pub fn value(&self, x: f64) -> Complex64 {
        match *self {
            PeriodicProfile::Constant(c) => Complex64::new(c, 0.0),
            PeriodicProfile::Modulated { freq, bump } => {
                let t = x - x.floor();
                e(freq as f64 * t) * bump.value(t)
            }
        }
    }

    pub fn second_derivative(&self, x: f64) -> Complex64 {
        match *self {
            PeriodicProfile::Constant(_) => Complex64::new(0.0, 0.0),
            PeriodicProfile::Modulated { freq, bump } => {
                let t = x - x.floor();
                let w = 2.0 * PI * freq as f64;
                let b = bump.value(t);
                let b1 = bump.derivative(t);
                let b2 = bump.second_derivative(t);
                e(freq as f64 * t) * Complex64::new(b2 - w * w * b, 2.0 * w * b1)
            }
        }
    }

    pub fn mean(&self) -> Complex64 {
        match *self {
            PeriodicProfile::Constant(c) => Complex64::new(c, 0.0),
            PeriodicProfile::Modulated { .. } => {
                let (lo, hi) = self.support();
                gauss_legendre_adaptive(|x| self.value(x), lo, hi, 1e-13).value
            }
        }
    }

    pub fn l1_norm(&self) -> f64 {
        match *self {
            PeriodicProfile::Constant(c) => c.abs(),
            PeriodicProfile::Modulated { bump, .. } => bump.l1_norm(),
        }
    }

    pub fn second_derivative_l1(&self) -> f64 {
        match *self {
            PeriodicProfile::Constant(_) => 0.0,
            PeriodicProfile::Modulated { .. } => {
                let (lo, hi) = self.support();
                composite_gl(|x| Complex64::new(self.second_derivative(x).norm(), 0.0), lo, hi, 4096, 8).re
            }
        }
    }

    fn support(&self) -> (f64, f64) {
        match *self {
            PeriodicProfile::Constant(_) => (0.0, 1.0),
            PeriodicProfile::Modulated { bump, .. } => {
                ((bump.center - bump.half_width).max(0.0), (bump.center + bump.half_width).min(1.0))
            }
        }
    }
}

/// Set of frequencies `N` kept in the main term.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum FrequencySet {
    Empty,
    /// All `k` with `|k − cα| ≤ radius`.
    Window { radius: f64 },
    List(Vec<i64>),
}

impl FrequencySet {
    fn members(&self, c_alpha: f64) -> Vec<i64> {
        match self {
            FrequencySet::Empty => Vec::new(),
            FrequencySet::Window { radius } => {
                let lo = (c_alpha - radius).ceil() as i64;
                let hi = (c_alpha + radius).floor() as i64;
                (lo..=hi).collect()
            }
            FrequencySet::List(v) => v.clone(),
        }
    }
}

/// Both sides of the Kloosterman cancellation lemma for given profiles.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExpSumReport {
    pub lhs: Complex64,
    pub main_term: Complex64,
    pub residual: Complex64,
    /// `P·‖g₂‖₁·Σ_{k∉N}(c,k)/(1+|k−cα|^{1+η})` and `P·‖g₂″‖₁·σ(c)√c` with
    /// `P = ‖g₁‖_{W^{1,1}}^{1−η} ‖g₁‖_{W^{2,1}}^{η}`.
    pub bound_components: [f64; 2],
    /// `|residual| / (sum of both brackets)`.
    pub measured_constant: f64,
    /// `|residual| / (Weil bracket)`, infinite when that bracket vanishes.
    pub weil_constant: f64,
}

/// Evaluates `Σ_{(c,d)=1} g₁(d/c) e(dα) g₂(d*/c)` exactly and the main term
/// `Σ_{k∈N} (∫g₁(x)e((cα−k)x)dx)(∫g₂) μ(c/(c,k)) φ(c)/φ(c/(c,k))`.
pub fn expsum_harness(
    g1: &PolyBump,
    g2: &PeriodicProfile,
    alpha: f64,
    c: u64,
    n_set: &FrequencySet,
    eta: f64,
) -> Result<ExpSumReport> {
    if c == 0 || !(0.0 < eta && eta < 1.0) {
        return Err(Error::InvalidInput("need c ≥ 1 and 0 < η < 1".into()));
    }
    let ci = c as i64;
    let cf = c as f64;
    let (lo, hi) = (g1.center - g1.half_width, g1.center + g1.half_width);
    let d_lo = (lo * cf).floor() as i64;
    let d_hi = (hi * cf).ceil() as i64;
    let mut lhs = Complex64::new(0.0, 0.0);
    for d in d_lo..=d_hi {
        if gcd(d, ci) != 1 {
            continue;
        }
        let w = g1.value(d as f64 / cf);
        if w == 0.0 {
            continue;
        }
        let dstar = if c == 1 { 0 } else { mod_inverse(d, ci) };
        lhs += e(d as f64 * alpha) * w * g2.value(dstar as f64 / cf);
    }
    let c_alpha = cf * alpha;
    let mean = g2.mean();
    let mut main = Complex64::new(0.0, 0.0);
    let members = n_set.members(c_alpha);
    for &k in &members {
        let beta = c_alpha - k as f64;
        let a_k = gauss_legendre_adaptive(|x| e(beta * x) * g1.value(x), lo, hi, 1e-13).value;
        main += a_k * mean * ramanujan(k, c) as f64;
    }
    let residual = lhs - main;
    let p = g1.w11_norm().powf(1.0 - eta) * g1.w21_norm().powf(eta);
    // Σ over k ∉ N, truncated at |k − cα| ≤ K with the tail bounded by c·2K^{−η}/η.
    let kwin = 100_000i64;
    let center = c_alpha.round() as i64;
    let mut s = 0.0;
    for k in center - kwin..=center + kwin {
        if members.contains(&k) {
            continue;
        }
        let g = gcd(ci, k) as f64;
        s += g / (1.0 + (k as f64 - c_alpha).abs().powf(1.0 + eta));
    }
    s += cf * 2.0 * (kwin as f64 - 1.0).powf(-eta) / eta;
    let b1 = p * g2.l1_norm() * s;
    let b2 = p * g2.second_derivative_l1() * num_divisors(c) as f64 * cf.sqrt();
    let r = residual.norm();
    Ok(ExpSumReport {
        lhs,
        main_term: main,
        residual,
        bound_components: [b1, b2],
        measured_constant: r / (b1 + b2),
        weil_constant: if b2 > 0.0 { r / b2 } else { f64::INFINITY },
    })
}

//! Coefficient model of the pencil
//!
//! ```text
//! Δ(a_{n-1} Δ y_{n-1}) + (q_n + 2λ p_n + λ²) y_n = 0,   n ∈ ℤ,
//! ```
//!
//! the spectral map `λ = 2cos(z/2)` and direct application of the
//! difference expression.
//!
//! Coefficients are stored as a compactly supported perturbation of the
//! free pencil `a ≡ 1, p ≡ q ≡ 0`: outside `[n_min, n_max]` the triple is
//! free, so every decay condition holds for every rate and every series
//! built from the coefficients terminates.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// The sequences `{a_n}, {p_n}, {q_n}` on `[n_min, n_max]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawTriple", into = "RawTriple")]
pub struct CoefficientTriple {
    n_min: i64,
    a: Vec<Complex64>,
    p: Vec<Complex64>,
    q: Vec<Complex64>,
}

#[derive(Serialize, Deserialize)]
struct RawTriple {
    n_min: i64,
    n_max: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    a: Option<Vec<Complex64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    p: Option<Vec<Complex64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    q: Option<Vec<Complex64>>,
}

impl TryFrom<RawTriple> for CoefficientTriple {
    type Error = Error;

    fn try_from(raw: RawTriple) -> Result<Self> {
        if raw.n_max < raw.n_min {
            return Err(Error::contract(format!(
                "n_max = {} < n_min = {}",
                raw.n_max, raw.n_min
            )));
        }
        let len = (raw.n_max - raw.n_min + 1) as usize;
        let fill = |v: Option<Vec<Complex64>>, default: Complex64| v.unwrap_or(vec![default; len]);
        CoefficientTriple::new(raw.n_min, fill(raw.a, ONE), fill(raw.p, ZERO), fill(raw.q, ZERO))
    }
}

impl From<CoefficientTriple> for RawTriple {
    fn from(t: CoefficientTriple) -> Self {
        RawTriple {
            n_min: t.n_min,
            n_max: t.n_max(),
            a: Some(t.a),
            p: Some(t.p),
            q: Some(t.q),
        }
    }
}

impl CoefficientTriple {
    /// Builds a triple whose arrays start at index `n_min`. All three arrays
    /// must have the same nonzero length and every `a_n` must be nonzero.
    pub fn new(
        n_min: i64,
        a: Vec<Complex64>,
        p: Vec<Complex64>,
        q: Vec<Complex64>,
    ) -> Result<Self> {
        if a.is_empty() || a.len() != p.len() || a.len() != q.len() {
            return Err(Error::contract(format!(
                "coefficient arrays must be nonempty and of equal length (a: {}, p: {}, q: {})",
                a.len(),
                p.len(),
                q.len()
            )));
        }
        for (k, v) in a.iter().chain(&p).chain(&q).enumerate() {
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(Error::contract(format!("non-finite coefficient at slot {k}")));
            }
        }
        if let Some(k) = a.iter().position(|v| *v == ZERO) {
            return Err(Error::contract(format!("a_{} = 0", n_min + k as i64)));
        }
        Ok(CoefficientTriple { n_min, a, p, q })
    }

    /// The free pencil `a ≡ 1, p ≡ q ≡ 0`.
    pub fn free() -> Self {
        CoefficientTriple {
            n_min: 0,
            a: vec![ONE],
            p: vec![ZERO],
            q: vec![ZERO],
        }
    }

    /// `q_site = gamma`, everything else free.
    pub fn single_site(site: i64, gamma: Complex64) -> Self {
        CoefficientTriple {
            n_min: site,
            a: vec![ONE],
            p: vec![ZERO],
            q: vec![gamma],
        }
    }

    /// Samples `f(n) = (a_n, p_n, q_n)` on `[n_min, n_max]`.
    pub fn from_fn(
        n_min: i64,
        n_max: i64,
        mut f: impl FnMut(i64) -> (Complex64, Complex64, Complex64),
    ) -> Result<Self> {
        if n_max < n_min {
            return Err(Error::contract("n_max < n_min"));
        }
        let (mut a, mut p, mut q) = (Vec::new(), Vec::new(), Vec::new());
        for n in n_min..=n_max {
            let (an, pn, qn) = f(n);
            a.push(an);
            p.push(pn);
            q.push(qn);
        }
        CoefficientTriple::new(n_min, a, p, q)
    }

    pub fn n_min(&self) -> i64 {
        self.n_min
    }

    pub fn n_max(&self) -> i64 {
        self.n_min + self.a.len() as i64 - 1
    }

    fn slot(&self, n: i64) -> Option<usize> {
        if n < self.n_min || n > self.n_max() {
            None
        } else {
            Some((n - self.n_min) as usize)
        }
    }

    pub fn a(&self, n: i64) -> Complex64 {
        self.slot(n).map_or(ONE, |k| self.a[k])
    }

    pub fn p(&self, n: i64) -> Complex64 {
        self.slot(n).map_or(ZERO, |k| self.p[k])
    }

    pub fn q(&self, n: i64) -> Complex64 {
        self.slot(n).map_or(ZERO, |k| self.q[k])
    }

    /// `h_n = 2 - a_n - a_{n-1} + q_n`.
    pub fn h(&self, n: i64) -> Complex64 {
        2.0 - self.a(n) - self.a(n - 1) + self.q(n)
    }

    pub fn a_values(&self) -> &[Complex64] {
        &self.a
    }

    pub fn p_values(&self) -> &[Complex64] {
        &self.p
    }

    pub fn q_values(&self) -> &[Complex64] {
        &self.q
    }

    pub fn is_free(&self) -> bool {
        self.a.iter().all(|v| *v == ONE)
            && self.p.iter().all(|v| *v == ZERO)
            && self.q.iter().all(|v| *v == ZERO)
    }

    /// Complex-conjugated coefficients.
    pub fn conj(&self) -> Self {
        CoefficientTriple {
            n_min: self.n_min,
            a: self.a.iter().map(|v| v.conj()).collect(),
            p: self.p.iter().map(|v| v.conj()).collect(),
            q: self.q.iter().map(|v| v.conj()).collect(),
        }
    }

    /// `∏_{r} a_r` over the support.
    pub fn a_product(&self) -> Complex64 {
        self.a.iter().product()
    }

    /// Largest index `r` at which the right-hand Jost recursion sees a
    /// perturbation: `h_r ≠ 0`, `p_r ≠ 0` or `a_r ≠ 1`. Falls back to
    /// `n_min - 1` for the free pencil.
    pub fn right_edge(&self) -> i64 {
        (self.n_min..=self.n_max() + 1)
            .rev()
            .find(|&r| self.h(r) != ZERO || self.p(r) != ZERO || self.a(r) != ONE)
            .unwrap_or(self.n_min - 1)
    }

    /// Smallest index `r` with `h_r ≠ 0`, `p_r ≠ 0` or `a_{r-1} ≠ 1`: the
    /// mirror of [`right_edge`](Self::right_edge) for the left-hand recursion.
    pub fn left_edge(&self) -> i64 {
        (self.n_min..=self.n_max() + 1)
            .find(|&r| self.h(r) != ZERO || self.p(r) != ZERO || self.a(r - 1) != ONE)
            .unwrap_or(self.n_max() + 1)
    }
}

/// `h_n` (and the Sturm–Liouville diagonal `b_n`) over `[n_min, n_max + 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct DerivedSequences {
    start: i64,
    h: Vec<Complex64>,
    b: Vec<Complex64>,
}

impl DerivedSequences {
    pub fn start(&self) -> i64 {
        self.start
    }

    pub fn end(&self) -> i64 {
        self.start + self.h.len() as i64 - 1
    }

    /// `h_n`; zero outside the stored range.
    pub fn h(&self, n: i64) -> Complex64 {
        self.get(&self.h, n)
    }

    /// `b_n = 2 + q_n - a_n - a_{n-1}`; zero outside the stored range.
    pub fn b(&self, n: i64) -> Complex64 {
        self.get(&self.b, n)
    }

    fn get(&self, v: &[Complex64], n: i64) -> Complex64 {
        if n < self.start || n > self.end() {
            ZERO
        } else {
            v[(n - self.start) as usize]
        }
    }
}

pub fn derived_sequences(coeffs: &CoefficientTriple) -> DerivedSequences {
    let start = coeffs.n_min();
    let idx = start..=coeffs.n_max() + 1;
    let h = idx
        .clone()
        .map(|n| 2.0 - coeffs.a(n) - coeffs.a(n - 1) + coeffs.q(n))
        .collect();
    let b = idx
        .map(|n| 2.0 + coeffs.q(n) - coeffs.a(n) - coeffs.a(n - 1))
        .collect();
    DerivedSequences { start, h, b }
}

/// A point of the spectral parameter in both coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralPoint {
    pub z: Complex64,
    pub lambda: Complex64,
}

impl SpectralPoint {
    pub fn from_z(z: Complex64) -> Self {
        SpectralPoint {
            z,
            lambda: z_to_lambda(z),
        }
    }

    /// Uses the principal branch of [`lambda_to_z`].
    pub fn from_lambda(lambda: Complex64) -> Self {
        SpectralPoint {
            z: lambda_to_z(lambda),
            lambda,
        }
    }

    /// Both preimages of a real `λ ∈ (-2, 2)` on the closed strip: the
    /// principal one `2 arccos(λ/2) ∈ (0, 2π)` and its mirror `-z`, folded
    /// into `[-π, 3π)`. These are the two edges of the cut `[-2, 2]`.
    /// Any other `λ` has a single preimage.
    pub fn preimages(lambda: Complex64) -> Vec<SpectralPoint> {
        let principal = SpectralPoint::from_lambda(lambda);
        if principal.z.im.abs() > 0.0 || principal.z.re <= 0.0 || principal.z.re >= 2.0 * PI {
            return vec![principal];
        }
        let mirror = Complex64::new(fold_re(-principal.z.re), 0.0);
        vec![principal, SpectralPoint { z: mirror, lambda }]
    }
}

/// `λ = 2cos(z/2)`.
pub fn z_to_lambda(z: Complex64) -> Complex64 {
    2.0 * (z / 2.0).cos()
}

/// Inverse of [`z_to_lambda`] on the half-strip `Re z ∈ [-π, 3π)`,
/// `Im z ≥ 0`.
///
/// With `w = e^{iz/2}` the map is the Joukowski map `λ = w + 1/w`, which is
/// one-to-one from the open unit disc onto `ℂ \ [-2, 2]`. The root with
/// `|w| < 1` is chosen; on the cut both roots have `|w| = 1` and the
/// principal `arccos` root (`arg w ∈ [0, π]`) is taken.
pub fn lambda_to_z(lambda: Complex64) -> Complex64 {
    if lambda.im == 0.0 && lambda.re.abs() <= 2.0 {
        return Complex64::new(2.0 * (lambda.re / 2.0).acos(), 0.0);
    }
    let disc = (lambda * lambda - 4.0).sqrt();
    // The larger root is formed without cancellation; the smaller one
    // follows from w1 * w2 = 1.
    let big = if (lambda + disc).norm() >= (lambda - disc).norm() {
        (lambda + disc) / 2.0
    } else {
        (lambda - disc) / 2.0
    };
    let w = big.inv();
    let mut arg = w.arg();
    if arg < -PI / 2.0 {
        arg += 2.0 * PI;
    }
    Complex64::new(2.0 * arg, -2.0 * w.norm().ln().min(0.0))
}

/// Folds a real part into the fundamental period `[-π, 3π)`.
pub fn fold_re(re: f64) -> f64 {
    let mut x = (re + PI).rem_euclid(4.0 * PI) - PI;
    if x >= 3.0 * PI {
        x -= 4.0 * PI;
    }
    x
}

/// A complex sequence indexed by consecutive integers starting at `start`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IndexedSeq {
    pub start: i64,
    pub values: Vec<Complex64>,
}

impl IndexedSeq {
    pub fn new(start: i64, values: Vec<Complex64>) -> Self {
        IndexedSeq { start, values }
    }

    pub fn from_fn(start: i64, end: i64, f: impl FnMut(i64) -> Complex64) -> Self {
        IndexedSeq {
            start,
            values: (start..=end).map(f).collect(),
        }
    }

    pub fn zeros(start: i64, end: i64) -> Self {
        IndexedSeq::from_fn(start, end, |_| ZERO)
    }

    pub fn end(&self) -> i64 {
        self.start + self.values.len() as i64 - 1
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, n: i64) -> Option<Complex64> {
        if n < self.start || n > self.end() {
            None
        } else {
            Some(self.values[(n - self.start) as usize])
        }
    }

    /// Value at `n`, zero outside the stored range.
    pub fn at(&self, n: i64) -> Complex64 {
        self.get(n).unwrap_or(ZERO)
    }

    pub fn indices(&self) -> std::ops::RangeInclusive<i64> {
        self.start..=self.end()
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(move |(k, v)| (self.start + k as i64, *v))
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn l2_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }
}

/// Residual of the pencil in three-term form,
/// `r_n = a_n y_{n+1} + a_{n-1} y_{n-1} + (h_n + 2λ p_n + λ² - 2) y_n`,
/// on the interior indices of `y`.
pub fn apply_pencil(
    coeffs: &CoefficientTriple,
    lambda: Complex64,
    y: &IndexedSeq,
) -> Result<IndexedSeq> {
    if y.len() < 3 {
        return Err(Error::contract(format!(
            "apply_pencil needs at least three samples, got {}",
            y.len()
        )));
    }
    let lam2 = lambda * lambda;
    Ok(IndexedSeq::from_fn(y.start + 1, y.end() - 1, |n| {
        let diag = coeffs.h(n) + 2.0 * lambda * coeffs.p(n) + lam2 - 2.0;
        coeffs.a(n) * y.at(n + 1) + coeffs.a(n - 1) * y.at(n - 1) + diag * y.at(n)
    }))
}

/// The same residual evaluated in divergence form,
/// `Δ(a_{n-1} Δ y_{n-1}) + (q_n + 2λ p_n + λ²) y_n`.
pub fn apply_pencil_divergence_form(
    coeffs: &CoefficientTriple,
    lambda: Complex64,
    y: &IndexedSeq,
) -> Result<IndexedSeq> {
    if y.len() < 3 {
        return Err(Error::contract("apply_pencil needs at least three samples"));
    }
    Ok(IndexedSeq::from_fn(y.start + 1, y.end() - 1, |n| {
        let forward = coeffs.a(n) * (y.at(n + 1) - y.at(n));
        let backward = coeffs.a(n - 1) * (y.at(n) - y.at(n - 1));
        forward - backward + (coeffs.q(n) + 2.0 * lambda * coeffs.p(n) + lambda * lambda) * y.at(n)
    }))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    /// `Σ |n| (|1 - a_n| + |p_n| + |q_n|) < ∞`.
    pub satisfies_pq: bool,
    pub pq_sum: f64,
    /// `sup_n exp(ε|n|) (|1 - a_n| + |p_n| + |q_n|)`.
    pub condition1_margin: f64,
    /// `sup_n exp(ε|n|^δ) (|1 - a_n| + |p_n| + |q_n|)`.
    pub condition2_margin: f64,
}

pub fn condition_report(coeffs: &CoefficientTriple, eps: f64, delta: f64) -> Result<ConditionReport> {
    if !(eps > 0.0) {
        return Err(Error::contract(format!("eps must be positive, got {eps}")));
    }
    if !(0.5..=1.0).contains(&delta) {
        return Err(Error::contract(format!("delta must lie in [1/2, 1], got {delta}")));
    }
    let mut report = ConditionReport {
        satisfies_pq: true,
        pq_sum: 0.0,
        condition1_margin: 0.0,
        condition2_margin: 0.0,
    };
    for n in coeffs.n_min()..=coeffs.n_max() {
        let size = (ONE - coeffs.a(n)).norm() + coeffs.p(n).norm() + coeffs.q(n).norm();
        let m = n.unsigned_abs() as f64;
        report.pq_sum += m * size;
        report.condition1_margin = report.condition1_margin.max((eps * m).exp() * size);
        report.condition2_margin = report.condition2_margin.max((eps * m.powf(delta)).exp() * size);
    }
    report.satisfies_pq = report.pq_sum.is_finite();
    Ok(report)
}

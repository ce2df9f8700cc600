//! The characteristic function `Φ(z) = W[f^-, f^+]`, scattering data and
//! the location of eigenvalues and spectral singularities.
//!
//! With the alternating tail convention of [`crate::jost`] the free pencil
//! has `Φ(z) = -2i sin z`, and a single site `q_0 = γ` gives
//! `Φ(z) = γ - 2i sin z`.
//!
//! `Φ` is a Laurent polynomial in `w = e^{iz/2}`: `w² Φ = P(w)` with
//! `P(0) = ∏ a_r^{-1}`. It is therefore entire and `4π`-periodic, and its
//! zeros in the upper half-strip stay below an explicit height.

mod roots;

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Mutex, OnceLock};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::jost::{self, jost, JostSolution, Side};
use crate::pencil::{z_to_lambda, CoefficientTriple, ZERO};

pub use roots::{find_zeros, winding_number, Rectangle, Zero};

/// `W[u, v]_n = a_n (u_n v_{n+1} - u_{n+1} v_n)`.
///
/// Both solutions must solve the same equation, i.e. share `λ = 2cos(z/2)`
/// (so `g^-(z) = f^-(-z)` may be paired with `f^+(z)`), and be sampled at
/// `n` and `n + 1`.
pub fn wronskian(u: &JostSolution, v: &JostSolution, coeffs: &CoefficientTriple, n: i64) -> Result<Complex64> {
    let (lu, lv) = (z_to_lambda(u.z()), z_to_lambda(v.z()));
    if (lu - lv).norm() > 1e-12 * (1.0 + lu.norm()) {
        return Err(Error::contract(format!(
            "solutions belong to different equations: z = {} and z = {}",
            u.z(),
            v.z()
        )));
    }
    let sample = |s: &JostSolution, k: i64| {
        s.value(k)
            .ok_or_else(|| Error::contract(format!("solution not sampled at n = {k}")))
    };
    let (u0, u1, v0, v1) = (sample(u, n)?, sample(u, n + 1)?, sample(v, n)?, sample(v, n + 1)?);
    Ok(coeffs.a(n) * (u0 * v1 - u1 * v0))
}

/// `Φ(z) = W[f^-, f^+]`, evaluated at `n = n_min - 1`.
pub fn phi(coeffs: &CoefficientTriple, z: Complex64) -> Complex64 {
    reduced_phi(coeffs, z) / (Complex64::i() * z).exp()
}

/// Derivatives `Φ(z), Φ'(z), ..., Φ^{(order)}(z)` by differentiating the
/// recursion.
pub fn phi_taylor(coeffs: &CoefficientTriple, z: Complex64, order: usize) -> Vec<Complex64> {
    phi_jet(coeffs, z, order).derivatives()
}

/// `w² Φ(z) = σ_{n_min-1} - w⁴ σ_{n_min}` with `σ` the scaled right solution.
fn reduced_phi(coeffs: &CoefficientTriple, z: Complex64) -> Complex64 {
    let (_, s) = jost::plus_scaled(coeffs, z, coeffs.n_min() - 1);
    let w2 = (Complex64::i() * z).exp();
    s[0] - w2 * w2 * s[1]
}

fn phi_jet(coeffs: &CoefficientTriple, z: Complex64, order: usize) -> Jet {
    let (s0, s1, w) = jost::plus_scaled_jets(coeffs, z, order);
    let w2 = &w * &w;
    &(&w2.recip() * &s0) - &(&w2 * &s1)
}

/// `Φ` bound to a coefficient triple, with an evaluation cache.
///
/// The optional Jost scale multiplies `f^-` by `c_minus` and `f^+` by
/// `c_plus`; it changes `Φ` by the constant `c_minus c_plus` and leaves the
/// zero set alone.
#[derive(Debug)]
pub struct CharacteristicFunction {
    coeffs: CoefficientTriple,
    factor: Complex64,
    cache: Mutex<HashMap<(u64, u64), Complex64>>,
    slope_cache: Mutex<HashMap<(u64, u64), (Complex64, Complex64)>>,
    laurent: OnceLock<Vec<Complex64>>,
}

impl Clone for CharacteristicFunction {
    fn clone(&self) -> Self {
        CharacteristicFunction {
            coeffs: self.coeffs.clone(),
            factor: self.factor,
            cache: Mutex::new(HashMap::new()),
            slope_cache: Mutex::new(HashMap::new()),
            laurent: self.laurent.clone(),
        }
    }
}

impl CharacteristicFunction {
    pub fn new(coeffs: &CoefficientTriple) -> Self {
        CharacteristicFunction {
            coeffs: coeffs.clone(),
            factor: Complex64::new(1.0, 0.0),
            cache: Mutex::new(HashMap::new()),
            slope_cache: Mutex::new(HashMap::new()),
            laurent: OnceLock::new(),
        }
    }

    pub fn with_jost_scale(coeffs: &CoefficientTriple, c_minus: Complex64, c_plus: Complex64) -> Result<Self> {
        let factor = c_minus * c_plus;
        if factor == ZERO || !factor.is_finite() {
            return Err(Error::contract("Jost scale factors must be finite and nonzero"));
        }
        let mut phi = Self::new(coeffs);
        phi.factor = factor;
        Ok(phi)
    }

    pub fn coeffs(&self) -> &CoefficientTriple {
        &self.coeffs
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        let key = (z.re.to_bits(), z.im.to_bits());
        if let Some(v) = self.cache.lock().unwrap().get(&key) {
            return *v;
        }
        let v = self.factor * phi(&self.coeffs, z);
        self.cache.lock().unwrap().insert(key, v);
        v
    }

    /// `(Φ(z), Φ'(z))`.
    pub fn eval_with_derivative(&self, z: Complex64) -> (Complex64, Complex64) {
        let key = (z.re.to_bits(), z.im.to_bits());
        if let Some(v) = self.slope_cache.lock().unwrap().get(&key) {
            return *v;
        }
        let jet = self.jet(z, 1);
        let v = (jet.value(), jet.derivative(1));
        self.slope_cache.lock().unwrap().insert(key, v);
        v
    }

    /// `e^{iz} Φ(z)`, a polynomial in `w = e^{iz/2}`; bounded as `Im z → ∞`.
    pub fn eval_reduced(&self, z: Complex64) -> Complex64 {
        self.factor * reduced_phi(&self.coeffs, z)
    }

    pub fn jet(&self, z: Complex64, order: usize) -> Jet {
        phi_jet(&self.coeffs, z, order).scale(self.factor)
    }

    pub fn taylor(&self, z: Complex64, order: usize) -> Vec<Complex64> {
        self.jet(z, order).derivatives()
    }

    /// Coefficients `c_k` of `e^{iz} Φ(z) = Σ c_k w^k`, by a discrete Fourier
    /// transform on `|w| = 1`.
    pub fn laurent_coefficients(&self) -> &[Complex64] {
        self.laurent.get_or_init(|| {
            let degree = 4 * (self.coeffs.right_edge() - self.coeffs.n_min() + 2).max(1) as usize;
            let m = (2 * degree + 8).next_power_of_two();
            let samples: Vec<Complex64> = (0..m)
                .map(|j| self.eval_reduced(Complex64::new(4.0 * PI * j as f64 / m as f64, 0.0)))
                .collect();
            (0..=degree)
                .map(|k| {
                    samples
                        .iter()
                        .enumerate()
                        .map(|(j, s)| s * Complex64::from_polar(1.0, -2.0 * PI * (j * k % m) as f64 / m as f64))
                        .sum::<Complex64>()
                        / m as f64
                })
                .collect()
        })
    }

    /// Upper bound `Σ |c_k| |w|^{k-2}` for `|Φ(z)|`; used as the reference
    /// magnitude for relative tolerances.
    pub fn scale(&self, z: Complex64) -> f64 {
        let r = (-z.im / 2.0).exp();
        let mut acc = 0.0;
        for c in self.laurent_coefficients().iter().rev() {
            acc = acc * r + c.norm();
        }
        acc / (r * r)
    }

    /// Height above which `Φ` has no zeros, plus a margin of 1:
    /// `2 ln(1 + max_{k≥1} |c_k| / |c_0|) + 1`.
    pub fn height_bound(&self) -> f64 {
        let c = self.laurent_coefficients();
        let tail = c[1..].iter().map(|v| v.norm()).fold(0.0, f64::max);
        2.0 * (1.0 + tail / c[0].norm()).ln() + 1.0
    }

    pub fn find_zeros(&self, region: &Rectangle, tol: f64) -> Result<Vec<Zero>> {
        roots::find_zeros_of(self, region, tol)
    }
}

/// Jost solutions on `[n_min - 2, n_max + 2]`.
fn jost_pair(coeffs: &CoefficientTriple, z: Complex64) -> Result<(JostSolution, JostSolution)> {
    let (lo, hi) = (coeffs.n_min() - 2, coeffs.n_max() + 2);
    Ok((jost(coeffs, z, Side::Minus, lo, hi)?, jost(coeffs, z, Side::Plus, lo, hi)?))
}

/// `max_n |W_n - W_{n_min-1}| / |W_{n_min-1}|` over the window
/// `[n_min - 2, n_max + 1]`.
pub fn wronskian_spread(coeffs: &CoefficientTriple, z: Complex64) -> Result<f64> {
    let (fm, fp) = jost_pair(coeffs, z)?;
    let reference = wronskian(&fm, &fp, coeffs, coeffs.n_min() - 1)?;
    let mut spread: f64 = 0.0;
    for n in fm.start()..fm.end() {
        spread = spread.max((wronskian(&fm, &fp, coeffs, n)? - reference).norm());
    }
    Ok(spread / reference.norm())
}

/// `ψ(ζ)` and `μ(ζ)` in `f^+ = ψ f^- + μ g^-` on the real axis.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScatteringPoint {
    pub zeta: f64,
    pub psi: Complex64,
    pub mu: Complex64,
}

/// Scattering data over a grid of `ζ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScatteringData {
    pub zeta: Vec<f64>,
    pub psi: Vec<Complex64>,
    pub mu: Vec<Complex64>,
}

fn check_real_point(zeta: f64) -> Result<()> {
    if !(zeta > -PI && zeta < 3.0 * PI) {
        return Err(Error::contract(format!("zeta = {zeta} outside (-π, 3π)")));
    }
    if zeta.sin().abs() < 1e-10 {
        return Err(Error::Pole(zeta));
    }
    Ok(())
}

/// `ψ = W[f^+, g^-] / W[f^-, g^-]` and `μ = W[f^+, f^-] / W[g^-, f^-]`.
///
/// Here `W[f^-, g^-] = -2i sin ζ`, so `Φ(ζ) = -2i sin ζ · μ(ζ)`.
pub fn scattering_coeffs(coeffs: &CoefficientTriple, zeta: f64) -> Result<ScatteringPoint> {
    check_real_point(zeta)?;
    let z = Complex64::new(zeta, 0.0);
    let (fm, fp) = jost_pair(coeffs, z)?;
    let gm = jost(coeffs, -z, Side::Minus, fm.start(), fm.end())?;
    let n = coeffs.n_min() - 1;
    let psi = wronskian(&fp, &gm, coeffs, n)? / wronskian(&fm, &gm, coeffs, n)?;
    let mu = wronskian(&fp, &fm, coeffs, n)? / wronskian(&gm, &fm, coeffs, n)?;
    Ok(ScatteringPoint { zeta, psi, mu })
}

pub fn scattering_data(coeffs: &CoefficientTriple, zetas: &[f64]) -> Result<ScatteringData> {
    let mut out = ScatteringData {
        zeta: Vec::with_capacity(zetas.len()),
        psi: Vec::with_capacity(zetas.len()),
        mu: Vec::with_capacity(zetas.len()),
    };
    for &zeta in zetas {
        let s = scattering_coeffs(coeffs, zeta)?;
        out.zeta.push(zeta);
        out.psi.push(s.psi);
        out.mu.push(s.mu);
    }
    Ok(out)
}

/// `max_n |f^+_n - ψ f^-_n - μ g^-_n| / max_n |f^+_n|` over `[lo, hi]`.
pub fn scattering_residual(coeffs: &CoefficientTriple, zeta: f64, lo: i64, hi: i64) -> Result<f64> {
    let s = scattering_coeffs(coeffs, zeta)?;
    let z = Complex64::new(zeta, 0.0);
    let fp = jost(coeffs, z, Side::Plus, lo, hi)?;
    let fm = jost(coeffs, z, Side::Minus, lo, hi)?;
    let gm = jost(coeffs, -z, Side::Minus, lo, hi)?;
    let mut worst: f64 = 0.0;
    let mut size: f64 = 0.0;
    for n in lo..=hi {
        let f = fp.value(n).unwrap();
        worst = worst.max((f - s.psi * fm.value(n).unwrap() - s.mu * gm.value(n).unwrap()).norm());
        size = size.max(f.norm());
    }
    Ok(worst / size)
}

/// `Φ(z) e^{iz} ∏ a_r` at `z = re + i y` for each `y` of the ladder.
///
/// As `Im z → ∞` the values tend to 1. For the free pencil the value is
/// `1 - e^{2iz}`.
pub fn phi_asymptotic_probe(coeffs: &CoefficientTriple, re: f64, im_ladder: &[f64]) -> Result<Vec<Complex64>> {
    if im_ladder.iter().any(|y| !(*y >= 0.0)) || im_ladder.windows(2).any(|p| p[1] <= p[0]) {
        return Err(Error::contract("ladder must be increasing and nonnegative"));
    }
    let prod = coeffs.a_product();
    Ok(im_ladder
        .iter()
        .map(|&y| reduced_phi(coeffs, Complex64::new(re, y)) * prod)
        .collect())
}

/// A zero of `Φ` with both coordinates of the spectral parameter.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralZero {
    pub z: Complex64,
    pub lambda: Complex64,
    pub multiplicity: usize,
}

impl SpectralZero {
    fn from_zero(zero: &Zero) -> Self {
        SpectralZero {
            z: zero.z,
            lambda: z_to_lambda(zero.z),
            multiplicity: zero.multiplicity,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub eigenvalues: Vec<SpectralZero>,
    pub spectral_singularities: Vec<SpectralZero>,
    /// Zeros within `1e-6` of `0, π, 2π` or the strip ends `-π, 3π`.
    pub boundary_indeterminate: Vec<SpectralZero>,
    pub continuous_spectrum: [f64; 2],
    pub convention_note: String,
}

pub const CONVENTION_NOTE: &str = "f+_n = (-1)^n exp(inz) for n > n_max, f-_n = (-1)^n exp(-inz) for n < n_min; \
Phi(z) = W[f-, f+] = -2i sin z for the free pencil; lambda = 2cos(z/2); strip Re z in [-pi, 3pi)";

/// Tolerance deciding whether a zero sits on the real axis.
pub fn tol_axis(z: Complex64) -> f64 {
    1e-9 * (1.0 + z.norm())
}

const BOUNDARY_POINTS: [f64; 5] = [-PI, 0.0, PI, 2.0 * PI, 3.0 * PI];

pub fn is_boundary_point(z: Complex64) -> bool {
    BOUNDARY_POINTS.iter().any(|b| (z - b).norm() < 1e-6)
}

/// Partitions a list of zeros into eigenvalues (`Im z > tol_axis`),
/// spectral singularities (on the axis, off the excluded points) and
/// boundary-indeterminate zeros. Zeros below the axis are dropped.
pub fn classify_zeros(zeros: &[Zero]) -> SpectrumReport {
    let mut report = SpectrumReport {
        eigenvalues: Vec::new(),
        spectral_singularities: Vec::new(),
        boundary_indeterminate: Vec::new(),
        continuous_spectrum: [-2.0, 2.0],
        convention_note: CONVENTION_NOTE.to_string(),
    };
    for zero in zeros {
        let tol = tol_axis(zero.z);
        let entry = SpectralZero::from_zero(zero);
        if is_boundary_point(zero.z) {
            report.boundary_indeterminate.push(entry);
        } else if zero.z.im > tol {
            report.eigenvalues.push(entry);
        } else if zero.z.im.abs() <= tol {
            report.spectral_singularities.push(SpectralZero {
                z: Complex64::new(zero.z.re, 0.0),
                lambda: z_to_lambda(Complex64::new(zero.z.re, 0.0)),
                ..entry
            });
        }
    }
    report
}

/// Eigenvalues and spectral singularities over the closed half-strip.
pub fn spectrum_report(coeffs: &CoefficientTriple, tol: f64) -> Result<SpectrumReport> {
    let phi = CharacteristicFunction::new(coeffs);
    let region = Rectangle::strip(&phi);
    Ok(classify_zeros(&phi.find_zeros(&region, tol)?))
}

/// Decay of `|f^+_n(z)|` beyond both support edges, measured over `span`
/// steps: `|f_{n_max+span}| / |f_{n_max+1}|` and
/// `|f_{n_min-span}| / |f_{n_min-1}|`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct L2Witness {
    pub right_ratio: f64,
    pub left_ratio: f64,
}

impl L2Witness {
    pub fn decays(&self) -> bool {
        self.right_ratio < 0.5 && self.left_ratio < 0.5
    }

    /// Neither side decays nor vanishes.
    pub fn bounded_nondecaying(&self) -> bool {
        [self.right_ratio, self.left_ratio].iter().all(|r| *r > 0.5 && *r < 2.0)
    }
}

pub fn l2_witness(coeffs: &CoefficientTriple, z: Complex64, span: i64) -> Result<L2Witness> {
    if span < 1 {
        return Err(Error::contract("span must be positive"));
    }
    let (lo, hi) = (coeffs.n_min() - 1 - span, coeffs.n_max() + 1 + span);
    let f = jost(coeffs, z, Side::Plus, lo, hi)?;
    let v = |n: i64| f.value(n).unwrap().norm();
    Ok(L2Witness {
        right_ratio: v(hi) / v(coeffs.n_max() + 1),
        left_ratio: v(lo) / v(coeffs.n_min() - 1),
    })
}

//! The resolvent `R_λ = L_λ^{-1}` through its Green kernel
//!
//! ```text
//! G_{n,m}(z) = f_m^-(z) f_n^+(z) / Φ(z)   for m < n,
//! G_{n,m}(z) = f_m^+(z) f_n^-(z) / Φ(z)   for m ≥ n,
//! ```
//!
//! defined wherever `Φ(z) ≠ 0`. Products are formed from the scaled Jost
//! samples, so only the bounded factor `e^{i|n-m|z}` is materialized.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jost::{alt, jost_scaled, JostSolution, Side};
use crate::pencil::{CoefficientTriple, IndexedSeq, ZERO};
use crate::spectrum::CharacteristicFunction;

/// Relative size of `|Φ|` below which `z` counts as a spectral point.
const SPECTRAL_LEVEL: f64 = 1e-12;

/// Green kernel on the window `[start, end]²`.
#[derive(Clone, Debug)]
pub struct GreenKernel {
    z: Complex64,
    phi: Complex64,
    plus: JostSolution,
    minus: JostSolution,
}

/// Newton's method from `z` on `Φ`; returns the limit if it settles.
fn nearest_zero(phi: &CharacteristicFunction, z: Complex64) -> Option<Complex64> {
    let mut x = z;
    for _ in 0..50 {
        let (f, df) = phi.eval_with_derivative(x);
        if df.norm() == 0.0 {
            return None;
        }
        let step = f / df;
        x -= step;
        if step.norm() <= 1e-14 * (1.0 + x.norm()) {
            return ((x - z).norm() < 1.0).then_some(x);
        }
    }
    None
}

impl GreenKernel {
    pub fn new(coeffs: &CoefficientTriple, z: Complex64, start: i64, end: i64) -> Result<Self> {
        if end < start {
            return Err(Error::contract(format!("empty window [{start}, {end}]")));
        }
        let chi = CharacteristicFunction::new(coeffs);
        let phi = chi.eval(z);
        if !(phi.norm() > SPECTRAL_LEVEL * chi.scale(z)) {
            return Err(Error::SpectralPoint {
                z,
                phi_abs: phi.norm(),
                nearest: nearest_zero(&chi, z),
            });
        }
        Ok(GreenKernel {
            z,
            phi,
            plus: jost_scaled(coeffs, z, Side::Plus, start, end),
            minus: jost_scaled(coeffs, z, Side::Minus, start, end),
        })
    }

    pub fn z(&self) -> Complex64 {
        self.z
    }

    pub fn phi(&self) -> Complex64 {
        self.phi
    }

    pub fn start(&self) -> i64 {
        self.plus.start()
    }

    pub fn end(&self) -> i64 {
        self.plus.end()
    }

    pub fn get(&self, n: i64, m: i64) -> Result<Complex64> {
        let inside = |k: i64| k >= self.start() && k <= self.end();
        if !inside(n) || !inside(m) {
            return Err(Error::contract(format!(
                "({n}, {m}) outside kernel window [{}, {}]",
                self.start(),
                self.end()
            )));
        }
        let (near, far) = if m < n {
            (self.minus.scaled(m).unwrap(), self.plus.scaled(n).unwrap())
        } else {
            (self.plus.scaled(m).unwrap(), self.minus.scaled(n).unwrap())
        };
        let phase = (Complex64::i() * (n - m).abs() as f64 * self.z).exp();
        Ok(alt(n + m) * phase * near * far / self.phi)
    }

    /// `y_n = Σ_m G_{n,m} φ_m` for every `n` of the window; `rhs` must lie
    /// inside the window.
    pub fn apply(&self, rhs: &IndexedSeq) -> Result<IndexedSeq> {
        if !rhs.is_empty() && (rhs.start < self.start() || rhs.end() > self.end()) {
            return Err(Error::contract("right-hand side leaves the kernel window"));
        }
        let support: Vec<(i64, Complex64)> = rhs.iter().filter(|(_, v)| *v != ZERO).collect();
        Ok(IndexedSeq::from_fn(self.start(), self.end(), |n| {
            support.iter().map(|(m, v)| self.get(n, *m).unwrap() * v).sum()
        }))
    }
}

/// A single kernel entry `G_{n,m}(z)`.
pub fn green_kernel(coeffs: &CoefficientTriple, z: Complex64, n: i64, m: i64) -> Result<Complex64> {
    let lo = n.min(m).min(coeffs.n_min() - 1);
    let hi = n.max(m).max(coeffs.n_max() + 1);
    GreenKernel::new(coeffs, z, lo, hi)?.get(n, m)
}

/// `R_λ φ` on the window spanned by `rhs` and the support, padded by 8.
pub fn apply_resolvent(coeffs: &CoefficientTriple, z: Complex64, rhs: &IndexedSeq) -> Result<IndexedSeq> {
    let lo = rhs.start.min(coeffs.n_min()) - 8;
    let hi = rhs.end().max(coeffs.n_max()) + 8;
    GreenKernel::new(coeffs, z, lo, hi)?.apply(rhs)
}

/// Lower bound for `‖R_λ‖` from the test vector
/// `h_m = conj(f_m^-)` for `m < m0`, `h_m = 0` otherwise.
///
/// On `n ≥ m0` one has `R_λ h = f^+ ‖h‖² / Φ`, so
/// `‖R_λ h‖ / ‖h‖ ≥ ‖h‖ ‖f^+‖_{n ≥ m0} / |Φ|`; both norms include their
/// geometric tails exactly. `shape` divides out the lemma's constant:
/// `shape = lower_bound · |Φ| · √(1 - e^{-2 Im z}) / (‖h‖ e^{-m0 Im z})`,
/// which equals 1 for the free pencil and stays bounded above and below as
/// `Im z → 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormProbe {
    pub z: Complex64,
    pub m0: i64,
    pub phi: Complex64,
    pub h_norm: f64,
    pub f_plus_norm: f64,
    pub lower_bound: f64,
    pub shape: f64,
}

pub fn default_m0(coeffs: &CoefficientTriple) -> i64 {
    coeffs.n_min() - 5
}

pub fn resolvent_norm_probe(coeffs: &CoefficientTriple, z: Complex64, m0: i64) -> Result<NormProbe> {
    if !(z.im > 0.0) {
        return Err(Error::contract("the norm probe needs Im z > 0"));
    }
    let kernel = GreenKernel::new(coeffs, z, m0.min(coeffs.n_min()) - 1, m0.max(coeffs.n_max()) + 1)?;
    let y = z.im;
    let q = (-2.0 * y).exp();
    let weight = |n: i64| (-2.0 * n as f64 * y).exp();

    // ‖h‖²: explicit part on [n_min, m0), geometric tail below n_min.
    let tail_top = m0.min(coeffs.n_min()) - 1;
    let mut h2 = weight(-tail_top) / (1.0 - q);
    for m in coeffs.n_min()..m0 {
        h2 += kernel.minus.scaled(m).unwrap().norm_sqr() * weight(-m);
    }

    // ‖f^+‖² on n ≥ m0: explicit part up to n_max, geometric tail above.
    let mut f2 = weight(m0.max(coeffs.n_max() + 1)) / (1.0 - q);
    for n in m0..=coeffs.n_max() {
        f2 += kernel.plus.scaled(n).unwrap().norm_sqr() * weight(n);
    }

    let (h_norm, f_plus_norm) = (h2.sqrt(), f2.sqrt());
    let lower_bound = h_norm * f_plus_norm / kernel.phi.norm();
    Ok(NormProbe {
        z,
        m0,
        phi: kernel.phi,
        h_norm,
        f_plus_norm,
        lower_bound,
        shape: f_plus_norm * (1.0 - q).sqrt() * (m0 as f64 * y).exp(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pencil::{apply_pencil, z_to_lambda, ONE};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn free_diagonal_entry() {
        let z = c(0.5, 0.5);
        let g = green_kernel(&CoefficientTriple::free(), z, 0, 0).unwrap();
        assert!((g - ONE / (c(0.0, -2.0) * z.sin())).norm() < 1e-14);
    }

    #[test]
    fn kernel_decays_geometrically() {
        let z = c(0.5, 0.5);
        let k = GreenKernel::new(&CoefficientTriple::free(), z, -30, 5).unwrap();
        for m in -30..-1 {
            let ratio = k.get(0, m).unwrap().norm() / k.get(0, m + 1).unwrap().norm();
            assert!((ratio - (-0.5f64).exp()).abs() < 1e-12);
        }
    }

    #[test]
    fn unit_vector_residual() {
        let t = CoefficientTriple::free();
        let z = c(1.0, 0.3);
        let rhs = IndexedSeq::new(0, vec![ONE]);
        let y = apply_resolvent(&t, z, &rhs).unwrap();
        let r = apply_pencil(&t, z_to_lambda(z), &y).unwrap();
        for (n, v) in r.iter() {
            let expected = if n == 0 { ONE } else { ZERO };
            assert!((v - expected).norm() < 1e-12, "n = {n}: {v}");
        }
    }

    #[test]
    fn zero_rhs_gives_zero() {
        let t = CoefficientTriple::single_site(0, c(-3.0, 0.0));
        let y = apply_resolvent(&t, c(0.4, 0.6), &IndexedSeq::zeros(-2, 2)).unwrap();
        assert_eq!(y.max_abs(), 0.0);
    }

    #[test]
    fn spectral_point_is_rejected() {
        let t = CoefficientTriple::single_site(0, c(-3.0, 0.0));
        let z = c(0.0, 1.5f64.asinh());
        match green_kernel(&t, z, 0, 0) {
            Err(Error::SpectralPoint { nearest: Some(w), .. }) => assert!((w - z).norm() < 1e-12),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn probe_matches_resolvent_of_truncated_h() {
        let t = CoefficientTriple::single_site(0, c(-3.0, 0.0));
        let z = c(0.7, 0.4);
        let m0 = default_m0(&t);
        let probe = resolvent_norm_probe(&t, z, m0).unwrap();
        // Truncate h where |h_m|² < 1e-34 relative.
        let lo = m0 - 100;
        let kernel = GreenKernel::new(&t, z, lo, 140).unwrap();
        let h = IndexedSeq::from_fn(lo, m0 - 1, |m| kernel.minus.value(m).unwrap().conj());
        let rh = kernel.apply(&h).unwrap();
        let restricted: f64 = rh.iter().filter(|(n, _)| *n >= m0).map(|(_, v)| v.norm_sqr()).sum::<f64>().sqrt();
        let measured = restricted / h.l2_norm();
        assert!((measured - probe.lower_bound).abs() <= 1e-10 * probe.lower_bound);
    }

    #[test]
    fn probe_grows_toward_the_axis() {
        let t = CoefficientTriple::free();
        let values: Vec<f64> = [0.4, 0.2, 0.1, 0.05]
            .iter()
            .map(|y| resolvent_norm_probe(&t, c(1.0, *y), -5).unwrap().lower_bound)
            .collect();
        assert!(values.windows(2).all(|w| w[1] > w[0]));
        for y in [0.4, 0.1, 0.025] {
            assert!((resolvent_norm_probe(&t, c(1.0, y), -5).unwrap().shape - 1.0).abs() < 1e-12);
        }
        assert!(resolvent_norm_probe(&t, c(1.0, 0.0), -5).is_err());
    }
}

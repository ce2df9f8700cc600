//! Exact rewritings of the pencil: the Jacobi (Sturm–Liouville) form for
//! `p ≡ 0`, the Klein–Gordon substitution `p = -v, q = v²`, and the bridge
//! from a q-difference pencil on `q^ℤ` to an ordinary triple.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jost::{jost, Side};
use crate::pencil::{z_to_lambda, CoefficientTriple, ONE, ZERO};
use crate::spectrum::{spectrum_report, SpectralZero, SpectrumReport};

/// `a_n y_{n+1} + a_{n-1} y_{n-1} + b_n y_n = λ̃ y_n` with `λ̃ = 2 - λ²`.
///
/// `a` lives on `[n_min, n_max]`, `b` on `[n_min, n_max + 1]`; outside,
/// `a = 1` and `b = 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SturmLiouvilleForm {
    pub n_min: i64,
    pub a: Vec<Complex64>,
    pub b: Vec<Complex64>,
}

impl SturmLiouvilleForm {
    pub fn a(&self, n: i64) -> Complex64 {
        slot(self.n_min, &self.a, n).unwrap_or(ONE)
    }

    pub fn b(&self, n: i64) -> Complex64 {
        slot(self.n_min, &self.b, n).unwrap_or(ZERO)
    }

    /// `λ ↦ λ̃ = 2 - λ²`.
    pub fn spectral_map(lambda: Complex64) -> Complex64 {
        2.0 - lambda * lambda
    }
}

fn slot(start: i64, v: &[Complex64], n: i64) -> Option<Complex64> {
    if n < start {
        return None;
    }
    v.get((n - start) as usize).copied()
}

pub fn to_sturm_liouville(coeffs: &CoefficientTriple) -> Result<SturmLiouvilleForm> {
    if let Some(k) = coeffs.p_values().iter().position(|p| *p != ZERO) {
        return Err(Error::contract(format!(
            "Sturm–Liouville form needs p ≡ 0 (p_{} ≠ 0)",
            coeffs.n_min() + k as i64
        )));
    }
    let b = (coeffs.n_min()..=coeffs.n_max() + 1)
        .map(|n| 2.0 + coeffs.q(n) - coeffs.a(n) - coeffs.a(n - 1))
        .collect();
    Ok(SturmLiouvilleForm {
        n_min: coeffs.n_min(),
        a: coeffs.a_values().to_vec(),
        b,
    })
}

/// `q_n = b_n - 2 + a_n + a_{n-1}`, `p ≡ 0`.
pub fn from_sturm_liouville(form: &SturmLiouvilleForm) -> Result<CoefficientTriple> {
    if form.a.is_empty() {
        return Err(Error::contract("empty Sturm–Liouville form"));
    }
    let n_max = form.n_min + form.a.len() as i64 - 1;
    let top = n_max.max(form.n_min + form.b.len() as i64 - 1);
    CoefficientTriple::from_fn(form.n_min, top, |n| {
        (form.a(n), ZERO, form.b(n) - 2.0 + form.a(n) + form.a(n - 1))
    })
}

/// `a` and `v` on `[n_min, n_min + len)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KleinGordonForm {
    pub n_min: i64,
    pub a: Vec<Complex64>,
    pub v: Vec<Complex64>,
}

/// The pencil with `p = -v`, `q = v²`.
pub fn from_klein_gordon(form: &KleinGordonForm) -> Result<CoefficientTriple> {
    if form.a.len() != form.v.len() {
        return Err(Error::contract("a and v must have the same length"));
    }
    CoefficientTriple::new(
        form.n_min,
        form.a.clone(),
        form.v.iter().map(|v| -v).collect(),
        form.v.iter().map(|v| v * v).collect(),
    )
}

/// Samples of `a(t), b(t), c(t)` at `t = q^n`, `n ∈ [n_min, n_max]`.
/// Outside the window the functions take the values that make the hat
/// sequences free (`â = 1`, `b̂ = -2`, `ĉ = 0`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawQPencil", into = "RawQPencil")]
pub struct QPencil {
    q: f64,
    n_min: i64,
    a: Vec<Complex64>,
    b: Vec<Complex64>,
    c: Vec<Complex64>,
}

#[derive(Serialize, Deserialize)]
struct RawQPencil {
    q: f64,
    n_min: i64,
    n_max: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    a: Option<Vec<Complex64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    b: Option<Vec<Complex64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    c: Option<Vec<Complex64>>,
}

impl TryFrom<RawQPencil> for QPencil {
    type Error = Error;

    fn try_from(raw: RawQPencil) -> Result<Self> {
        if raw.n_max < raw.n_min {
            return Err(Error::contract(format!("n_max = {} < n_min = {}", raw.n_max, raw.n_min)));
        }
        let q = raw.q;
        let idx = raw.n_min..=raw.n_max;
        let a = raw.a.unwrap_or_else(|| idx.clone().map(|n| free_a(q, n)).collect());
        let b = match raw.b {
            Some(b) => b,
            None => {
                let a_at = |n: i64| if n < raw.n_min { free_a(q, n) } else { a[(n - raw.n_min) as usize] };
                idx.clone().map(|n| b_from_hat(q, n, -2.0 * ONE, a_at(n), a_at(n - 1))).collect()
            }
        };
        let c = raw.c.unwrap_or_else(|| vec![ZERO; a.len()]);
        QPencil::new(q, raw.n_min, a, b, c)
    }
}

impl From<QPencil> for RawQPencil {
    fn from(p: QPencil) -> Self {
        RawQPencil {
            q: p.q,
            n_min: p.n_min,
            n_max: p.n_max(),
            a: Some(p.a),
            b: Some(p.b),
            c: Some(p.c),
        }
    }
}

/// `a(q^n)` for `â_n = 1`.
fn free_a(q: f64, n: i64) -> Complex64 {
    let t = q.powi(n as i32);
    Complex64::new((q - 1.0).powi(2) * t * t, 0.0)
}

fn hat_a(q: f64, n: i64, a: Complex64) -> Complex64 {
    let t = q.powi(n as i32);
    a / ((q - 1.0).powi(2) * t * t)
}

/// `b(q^n)` from `b̂_n` and the raw `a(q^n), a(q^{n-1})`.
fn b_from_hat(q: f64, n: i64, b_hat: Complex64, a: Complex64, a_prev: Complex64) -> Complex64 {
    let s = q.sqrt();
    s * (b_hat + s * hat_a(q, n, a) + hat_a(q, n - 1, a_prev) / s)
}

impl QPencil {
    pub fn new(q: f64, n_min: i64, a: Vec<Complex64>, b: Vec<Complex64>, c: Vec<Complex64>) -> Result<Self> {
        if !(q > 1.0 && q.is_finite()) {
            return Err(Error::contract(format!("q = {q} must exceed 1")));
        }
        if a.is_empty() || a.len() != b.len() || a.len() != c.len() {
            return Err(Error::contract("a, b, c must be nonempty and of equal length"));
        }
        if let Some(k) = a.iter().position(|v| *v == ZERO) {
            return Err(Error::contract(format!("a(q^{}) = 0", n_min + k as i64)));
        }
        Ok(QPencil { q, n_min, a, b, c })
    }

    /// The q-pencil whose hat triple is `hat`.
    pub fn from_hat(q: f64, hat: &CoefficientTriple) -> Result<Self> {
        if !(q > 1.0 && q.is_finite()) {
            return Err(Error::contract(format!("q = {q} must exceed 1")));
        }
        let (lo, hi) = (hat.n_min(), hat.n_max() + 1);
        let raw_a = |n: i64| hat.a(n) * free_a(q, n);
        let (mut a, mut b, mut c) = (Vec::new(), Vec::new(), Vec::new());
        for n in lo..=hi {
            let b_hat = hat.q(n) - hat.a(n) - hat.a(n - 1);
            a.push(raw_a(n));
            b.push(b_from_hat(q, n, b_hat, raw_a(n), raw_a(n - 1)));
            c.push(q.powf(0.25) * hat.p(n));
        }
        QPencil::new(q, lo, a, b, c)
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn n_min(&self) -> i64 {
        self.n_min
    }

    pub fn n_max(&self) -> i64 {
        self.n_min + self.a.len() as i64 - 1
    }

    pub fn lambda_scale(&self) -> f64 {
        self.q.powf(0.25)
    }

    fn inside(&self, n: i64) -> Option<usize> {
        (n >= self.n_min && n <= self.n_max()).then(|| (n - self.n_min) as usize)
    }

    /// `a(q^n)`, extended freely outside the window.
    pub fn a_at(&self, n: i64) -> Complex64 {
        self.inside(n).map_or_else(|| free_a(self.q, n), |k| self.a[k])
    }

    pub fn b_at(&self, n: i64) -> Complex64 {
        self.inside(n)
            .map_or_else(|| b_from_hat(self.q, n, -2.0 * ONE, self.a_at(n), self.a_at(n - 1)), |k| self.b[k])
    }

    pub fn c_at(&self, n: i64) -> Complex64 {
        self.inside(n).map_or(ZERO, |k| self.c[k])
    }

    pub fn a_hat(&self, n: i64) -> Complex64 {
        hat_a(self.q, n, self.a_at(n))
    }

    pub fn b_hat(&self, n: i64) -> Complex64 {
        let s = self.q.sqrt();
        self.b_at(n) / s - s * self.a_hat(n) - self.a_hat(n - 1) / s
    }

    pub fn c_hat(&self, n: i64) -> Complex64 {
        self.c_at(n) / self.lambda_scale()
    }

    /// Exponent `n` with `t = q^n`, if `t` is on the grid.
    pub fn grid_index(&self, t: f64) -> Result<i64> {
        let x = t.ln() / self.q.ln();
        let n = x.round();
        if !(t > 0.0) || (x - n).abs() > 1e-12 {
            return Err(Error::contract(format!("t = {t} is not a power of q = {}", self.q)));
        }
        Ok(n as i64)
    }
}

/// Hat triple as a pencil: `a = â`, `p = ĉ`, `q_n = b̂_n + â_n + â_{n-1}`,
/// together with `λ = q^{1/4} λ̂`.
pub fn q_to_discrete(qp: &QPencil) -> Result<(CoefficientTriple, f64)> {
    let triple = CoefficientTriple::from_fn(qp.n_min(), qp.n_max() + 1, |n| {
        (qp.a_hat(n), qp.c_hat(n), qp.b_hat(n) + qp.a_hat(n) + qp.a_hat(n - 1))
    })?;
    Ok((triple, qp.lambda_scale()))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QSpectrumReport {
    pub lambda_scale: f64,
    /// In units of the q-pencil's `λ`.
    pub eigenvalues: Vec<SpectralZero>,
    pub spectral_singularities: Vec<SpectralZero>,
    pub boundary_indeterminate: Vec<SpectralZero>,
    pub continuous_spectrum: [f64; 2],
    pub hat: SpectrumReport,
}

pub fn q_spectrum(qp: &QPencil, tol: f64) -> Result<QSpectrumReport> {
    let (triple, scale) = q_to_discrete(qp)?;
    let hat = spectrum_report(&triple, tol)?;
    let lift = |v: &[SpectralZero]| -> Vec<SpectralZero> {
        v.iter()
            .map(|s| SpectralZero {
                lambda: s.lambda * scale,
                ..*s
            })
            .collect()
    };
    Ok(QSpectrumReport {
        lambda_scale: scale,
        eigenvalues: lift(&hat.eigenvalues),
        spectral_singularities: lift(&hat.spectral_singularities),
        boundary_indeterminate: lift(&hat.boundary_indeterminate),
        continuous_spectrum: [-2.0 * scale, 2.0 * scale],
        hat,
    })
}

/// `J^±(t, z) = f̂_n^±(z) / √t` with `t = q^n`.
pub fn q_jost_side(qp: &QPencil, z: Complex64, t: f64, side: Side) -> Result<Complex64> {
    let n = qp.grid_index(t)?;
    let (triple, _) = q_to_discrete(qp)?;
    let f = jost(&triple, z, side, n, n)?;
    Ok(f.value(n).unwrap() / t.sqrt())
}

pub fn q_jost(qp: &QPencil, z: Complex64, t: f64) -> Result<Complex64> {
    q_jost_side(qp, z, t, Side::Plus)
}

/// Relative residual of `(a u^Δ)^{Δρ} + (b + 2λc + λ²) u = 0` at `t = q^n`
/// for `u = J^±(·, z)` and `λ = 2 q^{1/4} cos(z/2)`.
pub fn q_equation_residual(qp: &QPencil, z: Complex64, t: f64, side: Side) -> Result<f64> {
    let n = qp.grid_index(t)?;
    let q = qp.q;
    let (triple, scale) = q_to_discrete(qp)?;
    let f = jost(&triple, z, side, n - 1, n + 1)?;
    let u = |k: i64| f.value(k).unwrap() / q.powi(k as i32).sqrt();
    let lambda = scale * z_to_lambda(z);
    let delta = |k: i64| {
        let tk = q.powi(k as i32);
        qp.a_at(k) * (u(k + 1) - u(k)) / ((q - 1.0) * tk)
    };
    let outer = (delta(n) - delta(n - 1)) / ((q - 1.0) * t / q);
    let potential = (qp.b_at(n) + 2.0 * lambda * qp.c_at(n) + lambda * lambda) * u(n);
    let size = (qp.a_at(n) * (u(n + 1).norm() + u(n).norm()) / ((q - 1.0) * t)).norm()
        + (qp.a_at(n - 1) * (u(n).norm() + u(n - 1).norm()) / ((q - 1.0) * t / q)).norm();
    let size = size / ((q - 1.0) * t / q) + potential.norm();
    Ok((outer + potential).norm() / size)
}

/// `∫_{q^lo}^{q^hi} f(t) Δ_q t = (q - 1) Σ_{n=lo}^{hi-1} q^n f(q^n)`.
pub fn q_integral(q: f64, lo: i64, hi: i64, f: impl Fn(f64) -> Complex64) -> Complex64 {
    (lo..hi)
        .map(|n| {
            let t = q.powi(n as i32);
            t * f(t)
        })
        .sum::<Complex64>()
        * (q - 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jost::alt;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn sturm_liouville_examples() {
        let sl = to_sturm_liouville(&CoefficientTriple::single_site(0, c(-3.0, 0.0))).unwrap();
        assert_eq!(sl.b(0), c(-3.0, 0.0));
        assert_eq!(sl.b(1), ZERO);
        assert_eq!(sl.b(7), ZERO);
        let l = (2.0 + 13f64.sqrt()).sqrt();
        assert!((SturmLiouvilleForm::spectral_map(c(l, 0.0)) + c(13f64.sqrt(), 0.0)).norm() < 1e-14);
        let t = CoefficientTriple::new(0, vec![c(2.0, 0.0)], vec![ZERO], vec![ZERO]).unwrap();
        let sl = to_sturm_liouville(&t).unwrap();
        assert_eq!((sl.b(0), sl.b(1)), (c(-1.0, 0.0), c(-1.0, 0.0)));
        assert!(to_sturm_liouville(&CoefficientTriple::new(0, vec![ONE], vec![ONE], vec![ZERO]).unwrap()).is_err());
    }

    #[test]
    fn sturm_liouville_round_trip() {
        let t = CoefficientTriple::new(-1, vec![c(2.0, 0.5), c(0.7, 0.0)], vec![ZERO; 2], vec![c(0.1, -0.3), c(-1.0, 0.0)])
            .unwrap();
        let back = from_sturm_liouville(&to_sturm_liouville(&t).unwrap()).unwrap();
        for n in -3..4 {
            assert_eq!((back.a(n), back.p(n)), (t.a(n), t.p(n)));
            assert!((back.q(n) - t.q(n)).norm() < 1e-15);
        }
    }

    #[test]
    fn klein_gordon_substitution() {
        let t = from_klein_gordon(&KleinGordonForm {
            n_min: 0,
            a: vec![ONE],
            v: vec![ONE],
        })
        .unwrap();
        assert_eq!((t.p(0), t.q(0)), (-ONE, ONE));
        let zero = from_klein_gordon(&KleinGordonForm {
            n_min: 3,
            a: vec![ONE; 2],
            v: vec![ZERO; 2],
        })
        .unwrap();
        assert!(zero.is_free());
    }

    #[test]
    fn free_hat_pencil() {
        let q = 4.0;
        let qp = QPencil::new(
            q,
            -1,
            (-1..=1).map(|n| free_a(q, n)).collect(),
            vec![c((q.sqrt() - 1.0).powi(2), 0.0); 3],
            vec![ZERO; 3],
        )
        .unwrap();
        let (t, scale) = q_to_discrete(&qp).unwrap();
        assert!(t.a_values().iter().all(|a| (a - ONE).norm() < 1e-14));
        assert!(t.q_values().iter().all(|v| v.norm() < 1e-14));
        assert_eq!(scale, 2f64.sqrt());
        let z = c(0.8, 0.3);
        for n in -3..=3 {
            let tn = q.powi(n);
            let expected = alt(n as i64) * (Complex64::i() * n as f64 * z).exp() / q.powf(n as f64 / 2.0);
            assert!((q_jost(&qp, z, tn).unwrap() - expected).norm() < 1e-13);
        }
        assert!(q_jost(&qp, z, 3.0).is_err());
    }

    #[test]
    fn c_hat_substitution() {
        let q = 3.0;
        let qp = QPencil::from_hat(q, &CoefficientTriple::free()).unwrap();
        let mut raw: RawQPencil = qp.into();
        raw.c = Some(vec![c(q.powf(0.25), 0.0), ZERO]);
        let qp = QPencil::try_from(raw).unwrap();
        assert!((qp.c_hat(0) - ONE).norm() < 1e-15);
    }

    #[test]
    fn hat_round_trip_and_residual() {
        let hat = CoefficientTriple::new(0, vec![c(1.2, 0.1), c(0.9, 0.0)], vec![c(0.1, 0.2), ZERO], vec![c(-0.4, 0.3), c(0.2, 0.0)])
            .unwrap();
        let qp = QPencil::from_hat(2.5, &hat).unwrap();
        let (back, _) = q_to_discrete(&qp).unwrap();
        for n in -3..5 {
            assert!((back.a(n) - hat.a(n)).norm() < 1e-13);
            assert!((back.p(n) - hat.p(n)).norm() < 1e-13);
            assert!((back.q(n) - hat.q(n)).norm() < 1e-12);
        }
        let z = c(1.1, 0.2);
        for n in -3..5 {
            let t = 2.5f64.powi(n);
            for side in [Side::Plus, Side::Minus] {
                assert!(q_equation_residual(&qp, z, t, side).unwrap() <= 1e-9);
            }
        }
    }

    #[test]
    fn q_integral_of_indicator() {
        let q = 1.7;
        let v = q_integral(q, 0, 5, |t| if (1.0..q.powi(5)).contains(&t) { ONE } else { ZERO });
        let expected: f64 = (q - 1.0) * (0..5).map(|n| q.powi(n)).sum::<f64>();
        assert!((v.re - expected).abs() < 1e-12 && v.im == 0.0);
    }

    #[test]
    fn json_defaults_are_free() {
        let qp: QPencil = serde_json::from_str(r#"{"q": 4.0, "n_min": 0, "n_max": 1}"#).unwrap();
        let (t, _) = q_to_discrete(&qp).unwrap();
        assert!(t.q_values().iter().all(|v| v.norm() < 1e-13));
        assert!(serde_json::from_str::<QPencil>(r#"{"q": 1.0, "n_min": 0, "n_max": 1}"#).is_err());
    }
}

//! Truncated Taylor series ("jets") over `Complex64`.
//!
//! A `Jet` of order `k` stores the coefficients `c_0..=c_k` of
//! `f(x0 + t) = sum c_j t^j + O(t^{k+1})`. Arithmetic propagates the
//! coefficients exactly, which lets the difference recursions carry their
//! own derivatives without finite differences.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

#[derive(Clone, Debug, PartialEq)]
pub struct Jet {
    coeffs: Vec<Complex64>,
}

impl Jet {
    pub fn constant(value: Complex64, order: usize) -> Self {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); order + 1];
        coeffs[0] = value;
        Jet { coeffs }
    }

    /// The independent variable `x0 + t`.
    pub fn variable(x0: Complex64, order: usize) -> Self {
        let mut jet = Jet::constant(x0, order);
        if order >= 1 {
            jet.coeffs[1] = Complex64::new(1.0, 0.0);
        }
        jet
    }

    pub fn from_coeffs(coeffs: Vec<Complex64>) -> Self {
        assert!(!coeffs.is_empty(), "a jet needs at least one coefficient");
        Jet { coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn value(&self) -> Complex64 {
        self.coeffs[0]
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeff(&self, j: usize) -> Complex64 {
        self.coeffs.get(j).copied().unwrap_or_default()
    }

    /// `d^j f / dx^j` at `x0`, i.e. `j! * c_j`.
    pub fn derivative(&self, j: usize) -> Complex64 {
        self.coeff(j) * factorial(j)
    }

    pub fn derivatives(&self) -> Vec<Complex64> {
        (0..=self.order()).map(|j| self.derivative(j)).collect()
    }

    pub fn scale(&self, s: Complex64) -> Jet {
        Jet {
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    pub fn add_constant(&self, s: Complex64) -> Jet {
        let mut out = self.clone();
        out.coeffs[0] += s;
        out
    }

    pub fn recip(&self) -> Jet {
        let n = self.coeffs.len();
        let a0 = self.coeffs[0];
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        out[0] = a0.inv();
        for k in 1..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 1..=k {
                acc += self.coeffs[j] * out[k - j];
            }
            out[k] = -acc / a0;
        }
        Jet { coeffs: out }
    }

    pub fn div(&self, rhs: &Jet) -> Jet {
        self * &rhs.recip()
    }

    pub fn exp(&self) -> Jet {
        // f' = a' f  =>  k f_k = sum_{j=1..k} j a_j f_{k-j}
        let n = self.coeffs.len();
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        out[0] = self.coeffs[0].exp();
        for k in 1..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 1..=k {
                acc += self.coeffs[j] * out[k - j] * j as f64;
            }
            out[k] = acc / k as f64;
        }
        Jet { coeffs: out }
    }

    pub fn sin(&self) -> Jet {
        let i = Complex64::i();
        let e_pos = self.scale(i).exp();
        let e_neg = self.scale(-i).exp();
        (&e_pos - &e_neg).scale(Complex64::new(0.0, -0.5))
    }

    pub fn cos(&self) -> Jet {
        let i = Complex64::i();
        let e_pos = self.scale(i).exp();
        let e_neg = self.scale(-i).exp();
        (&e_pos + &e_neg).scale(Complex64::new(0.5, 0.0))
    }

    pub(crate) fn set_coeff(&mut self, k: usize, value: Complex64) {
        self.coeffs[k] = value;
    }
}

pub(crate) fn factorial(j: usize) -> f64 {
    (1..=j).fold(1.0, |acc, v| acc * v as f64)
}

impl Add for &Jet {
    type Output = Jet;
    fn add(self, rhs: &Jet) -> Jet {
        Jet {
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &Jet {
    type Output = Jet;
    fn sub(self, rhs: &Jet) -> Jet {
        Jet {
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl Mul for &Jet {
    type Output = Jet;
    fn mul(self, rhs: &Jet) -> Jet {
        let n = self.coeffs.len().min(rhs.coeffs.len());
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        for (i, a) in self.coeffs.iter().enumerate().take(n) {
            if *a == Complex64::new(0.0, 0.0) {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate().take(n - i) {
                out[i + j] += a * b;
            }
        }
        Jet { coeffs: out }
    }
}

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}

#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;
use qpencil::pencil::{derived_sequences, CoefficientTriple};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn small(rng: &mut StdRng, size: f64) -> Complex64 {
    let r = size * rng.gen::<f64>().sqrt();
    Complex64::from_polar(r, rng.gen_range(0.0..std::f64::consts::TAU))
}

/// Random triple with support width `1..=8` and perturbations of modulus
/// at most `size` around the free values.
pub fn random_triple(rng: &mut StdRng, size: f64, with_p: bool) -> CoefficientTriple {
    let width = rng.gen_range(1..=8usize);
    let n_min = rng.gen_range(-4..=2i64);
    let a = (0..width).map(|_| Complex64::new(1.0, 0.0) + small(rng, size)).collect();
    let p = (0..width)
        .map(|_| if with_p { small(rng, size) } else { Complex64::new(0.0, 0.0) })
        .collect();
    let q = (0..width).map(|_| small(rng, size)).collect();
    CoefficientTriple::new(n_min, a, p, q).unwrap()
}

/// Random triple with real `a` and `q` and `p ≡ 0`.
pub fn random_real_sl(rng: &mut StdRng, size: f64) -> CoefficientTriple {
    let width = rng.gen_range(1..=6usize);
    let a = (0..width).map(|_| c(1.0 + rng.gen_range(-size..size), 0.0)).collect();
    let q = (0..width).map(|_| c(rng.gen_range(-4.0 * size..4.0 * size), 0.0)).collect();
    CoefficientTriple::new(0, a, vec![c(0.0, 0.0); width], q).unwrap()
}

/// Eigenvalues of the truncated Jacobi matrix with diagonal `b_n` and
/// off-diagonal `a_n` on `[-n/2, n/2)`; real coefficients only.
pub fn jacobi_eigenvalues(coeffs: &CoefficientTriple, n: usize) -> Vec<Complex64> {
    let d = derived_sequences(coeffs);
    let lo = -(n as i64) / 2;
    let real = |v: Complex64| {
        assert_eq!(v.im, 0.0, "oracle needs real coefficients");
        v.re
    };
    let m = DMatrix::from_fn(n, n, |i, j| {
        let (ni, nj) = (lo + i as i64, lo + j as i64);
        if i == j {
            real(d.b(ni))
        } else if nj == ni + 1 {
            real(coeffs.a(ni))
        } else if ni == nj + 1 {
            real(coeffs.a(nj))
        } else {
            0.0
        }
    });
    m.symmetric_eigenvalues().iter().map(|v| c(*v, 0.0)).collect()
}

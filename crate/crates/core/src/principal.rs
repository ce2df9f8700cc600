//! Jost solutions as functions of `λ`, the characteristic function
//! `H(λ) = Φ(z(λ))` and principal vectors at its zeros.
//!
//! `F_n^±(λ) = f_n^±(z(λ))` with `λ = 2cos(z/2)`. Derivatives in `λ` come
//! from the recursion differentiated alongside its tail data; the tail
//! `(-1)^n e^{±in z(λ)}` is differentiated through `dz/dλ = -1/sin(z/2)`,
//! which is singular at the branch points `λ = ±2`.
//!
//! At a zero `λ_j` of multiplicity `m_j` the principal vectors are
//! `U^{(r)} = (1/r!) d^r F^+/dλ^r`, `r < m_j`. They satisfy the chain
//!
//! ```text
//! ℓ_λ U^{(r)} + (2p + 2λ) U^{(r-1)} + U^{(r-2)} = 0.
//! ```

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jet::{factorial, Jet};
use crate::jost::{alt, Side};
use crate::pencil::{lambda_to_z, z_to_lambda, CoefficientTriple, IndexedSeq, SpectralPoint, ONE};
use crate::spectrum::{tol_axis, winding_number, CharacteristicFunction, Rectangle};

const MAX_EXPONENT: f64 = 700.0;

/// `F_n, dF_n/dλ, ..., d^rF_n/dλ^r` on a window of `n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LambdaDerivativeStack {
    pub lambda0: Complex64,
    pub z0: Complex64,
    pub order: usize,
    pub side: Side,
    pub start: i64,
    /// `values[n - start][k] = d^k F_n / dλ^k`.
    pub values: Vec<Vec<Complex64>>,
}

impl LambdaDerivativeStack {
    pub fn end(&self) -> i64 {
        self.start + self.values.len() as i64 - 1
    }

    pub fn derivative(&self, n: i64, k: usize) -> Option<Complex64> {
        if n < self.start || n > self.end() || k > self.order {
            return None;
        }
        Some(self.values[(n - self.start) as usize][k])
    }

    /// The layer `d^k F / dλ^k` as a sequence.
    pub fn layer(&self, k: usize) -> IndexedSeq {
        IndexedSeq::new(self.start, self.values.iter().map(|v| v[k]).collect())
    }
}

/// Taylor jet of `z(λ)` at `λ(z0)`, from `z' = -1/sin(z/2)`.
pub(crate) fn z_of_lambda_jet(z0: Complex64, order: usize) -> Result<Jet> {
    if (z0 / 2.0).sin().norm() < 1e-8 {
        return Err(Error::BranchPoint(z_to_lambda(z0)));
    }
    let mut z = Jet::constant(z0, order);
    for k in 0..order {
        // z' to order k only needs z to order k.
        let slope = (z.scale(Complex64::new(0.5, 0.0)).sin()).recip().scale(-ONE);
        z.set_coeff(k + 1, slope.coeff(k) / (k + 1) as f64);
    }
    Ok(z)
}

fn tail_jet(z: &Jet, n: i64, side: Side) -> Jet {
    z.scale(Complex64::i() * side.sign() * n as f64).exp().scale(Complex64::new(alt(n), 0.0))
}

/// Diagonal `h_n - 2 + 2λp_n + λ²` as a jet in `λ`.
fn diagonal_jet(coeffs: &CoefficientTriple, n: i64, lambda0: Complex64, order: usize) -> Jet {
    let mut c = Jet::constant(coeffs.h(n) - 2.0 + 2.0 * lambda0 * coeffs.p(n) + lambda0 * lambda0, order);
    if order >= 1 {
        c.set_coeff(1, 2.0 * coeffs.p(n) + 2.0 * lambda0);
    }
    if order >= 2 {
        c.set_coeff(2, ONE);
    }
    c
}

/// Stack of `λ`-derivatives of `F^±` at the preimage `z0`, on `[lo, hi]`.
pub fn lambda_jost_stack_at(
    coeffs: &CoefficientTriple,
    z0: Complex64,
    order: usize,
    side: Side,
    lo: i64,
    hi: i64,
) -> Result<LambdaDerivativeStack> {
    if hi < lo {
        return Err(Error::contract(format!("empty window [{lo}, {hi}]")));
    }
    let worst = (lo as f64 * z0.im).abs().max((hi as f64 * z0.im).abs());
    if worst > MAX_EXPONENT {
        return Err(Error::NumericRange(format!("|n Im z| reaches {worst:.1} on [{lo}, {hi}]")));
    }
    let z = z_of_lambda_jet(z0, order)?;
    let lambda0 = z_to_lambda(z0);
    let mut jets: Vec<Jet> = Vec::new();
    match side {
        Side::Plus => {
            let top = hi.max(coeffs.n_max() + 2);
            let mut upper = tail_jet(&z, top, side);
            let mut current = tail_jet(&z, top - 1, side);
            let mut rev = vec![upper.clone(), current.clone()];
            for n in (lo + 1..top).rev() {
                let next = if n - 1 > coeffs.n_max() {
                    tail_jet(&z, n - 1, side)
                } else {
                    let sum = &upper.scale(coeffs.a(n)) + &(&diagonal_jet(coeffs, n, lambda0, order) * &current);
                    sum.scale(-coeffs.a(n - 1).inv())
                };
                upper = std::mem::replace(&mut current, next.clone());
                rev.push(next);
            }
            // rev[k] holds n = top - k.
            for n in lo..=hi {
                jets.push(rev[(top - n) as usize].clone());
            }
        }
        Side::Minus => {
            let bottom = lo.min(coeffs.n_min() - 2);
            let mut lower = tail_jet(&z, bottom, side);
            let mut current = tail_jet(&z, bottom + 1, side);
            let mut fwd = vec![lower.clone(), current.clone()];
            for n in bottom + 1..hi {
                let next = if n + 1 < coeffs.n_min() {
                    tail_jet(&z, n + 1, side)
                } else {
                    let sum = &lower.scale(coeffs.a(n - 1)) + &(&diagonal_jet(coeffs, n, lambda0, order) * &current);
                    sum.scale(-coeffs.a(n).inv())
                };
                lower = std::mem::replace(&mut current, next.clone());
                fwd.push(next);
            }
            for n in lo..=hi {
                jets.push(fwd[(n - bottom) as usize].clone());
            }
        }
    }
    Ok(LambdaDerivativeStack {
        lambda0,
        z0,
        order,
        side,
        start: lo,
        values: jets.iter().map(|j| j.derivatives()).collect(),
    })
}

/// Stack at the principal preimage `lambda_to_z(lambda0)` on the window
/// `[n_min - 2, n_max + 2]`.
pub fn lambda_jost_stack(
    coeffs: &CoefficientTriple,
    lambda0: Complex64,
    order: usize,
    side: Side,
) -> Result<LambdaDerivativeStack> {
    lambda_jost_stack_at(coeffs, lambda_to_z(lambda0), order, side, coeffs.n_min() - 2, coeffs.n_max() + 2)
}

/// `H(λ) = Φ(z(λ))` on the principal branch.
pub fn h_function(coeffs: &CoefficientTriple, lambda: Complex64) -> Complex64 {
    crate::spectrum::phi(coeffs, lambda_to_z(lambda))
}

/// The preimage of `λ` on the strip where `|Φ|` (relative to its scale)
/// is smallest, together with that relative size.
pub fn zero_preimage(coeffs: &CoefficientTriple, lambda: Complex64) -> (Complex64, f64) {
    let chi = CharacteristicFunction::new(coeffs);
    SpectralPoint::preimages(lambda)
        .into_iter()
        .map(|p| (p.z, chi.eval(p.z).norm() / chi.scale(p.z)))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("every λ has a preimage")
}

/// Winding number of `Φ` around a small square centred at `z`.
fn local_multiplicity(chi: &CharacteristicFunction, z: Complex64) -> Result<i64> {
    let mut last = None;
    for radius in [1e-3, 7e-4, 1.3e-3, 4e-4, 2e-3] {
        let r = Rectangle::new(z.re - radius, z.re + radius, z.im - radius, z.im + radius)?;
        match winding_number(chi, &r) {
            Ok(w) => return Ok(w),
            Err(e) => last = Some(e),
        }
    }
    Err(last.unwrap())
}

/// `β_0, ..., β_{r_max}` in
/// `d^rF^+/dλ^r = Σ_v C(r, v) β_{r-v} d^vF^-/dλ^v`, fitted order by order
/// by least squares on `[n_min - 2, n_max + 2]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Linkage {
    pub z: Complex64,
    pub beta: Vec<Complex64>,
    /// Relative least-squares residual of each order.
    pub residuals: Vec<f64>,
}

fn binomial(r: usize, v: usize) -> f64 {
    factorial(r) / (factorial(v) * factorial(r - v))
}

fn fit_linkage(plus: &LambdaDerivativeStack, minus: &LambdaDerivativeStack, r_max: usize) -> Result<Linkage> {
    let (lo, hi) = (plus.start, plus.end());
    let base: Vec<Complex64> = (lo..=hi).map(|n| minus.derivative(n, 0).unwrap()).collect();
    let base_norm: f64 = base.iter().map(|v| v.norm_sqr()).sum();
    if !(base_norm > 1e-200) {
        return Err(Error::IllConditioned("F^- vanishes on the overlap window".into()));
    }
    let mut beta = Vec::with_capacity(r_max + 1);
    let mut residuals = Vec::with_capacity(r_max + 1);
    for r in 0..=r_max {
        let rhs: Vec<Complex64> = (lo..=hi)
            .map(|n| {
                let mut v = plus.derivative(n, r).unwrap();
                for s in 1..=r {
                    v -= binomial(r, s) * beta[r - s] * minus.derivative(n, s).unwrap();
                }
                v
            })
            .collect();
        let b: Complex64 = base.iter().zip(&rhs).map(|(f, y)| f.conj() * y).sum::<Complex64>() / base_norm;
        let scale = (lo..=hi).map(|n| plus.derivative(n, r).unwrap().norm()).fold(0.0, f64::max).max(1e-300);
        let res = base.iter().zip(&rhs).map(|(f, y)| (y - b * f).norm()).fold(0.0, f64::max);
        beta.push(b);
        residuals.push(res / scale);
    }
    Ok(Linkage {
        z: plus.z0,
        beta,
        residuals,
    })
}

/// Linkage coefficients at a zero `λ_j` of `H`.
pub fn linkage_coefficients(coeffs: &CoefficientTriple, lambda_j: Complex64, r_max: usize) -> Result<Linkage> {
    let (z, rel) = zero_preimage(coeffs, lambda_j);
    if rel > 1e-8 {
        return Err(Error::contract(format!("λ = {lambda_j} is not a zero of H (|Φ|/scale = {rel:e})")));
    }
    let (lo, hi) = (coeffs.n_min() - 2, coeffs.n_max() + 2);
    let plus = lambda_jost_stack_at(coeffs, z, r_max, Side::Plus, lo, hi)?;
    let minus = lambda_jost_stack_at(coeffs, z, r_max, Side::Minus, lo, hi)?;
    fit_linkage(&plus, &minus, r_max)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightSign {
    Plus,
    Minus,
}

/// `H_p` (sign plus) or `H_{-p}` (sign minus).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightedSpace {
    pub p: u32,
    pub sign: WeightSign,
}

/// Squared weighted norm `Σ_n (1 + |n|)^{±2p} |y_n|²` over the window.
pub fn weighted_norm(y: &IndexedSeq, p: u32, sign: WeightSign) -> f64 {
    let e = match sign {
        WeightSign::Plus => 2.0 * p as f64,
        WeightSign::Minus => -2.0 * p as f64,
    };
    y.iter().map(|(n, v)| (1.0 + n.unsigned_abs() as f64).powf(e) * v.norm_sqr()).sum()
}

/// Growth of a vector far from the origin, measured on the outer third of
/// its window.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "class", rename_all = "snake_case")]
pub enum GrowthClass {
    /// Exponential decay on both sides: in `ℓ²`.
    L2 { decay_rate: f64 },
    /// Polynomial growth of fitted degree `degree`: in `H_{-p}` for the
    /// smallest `p > degree + 1/2`, not in `ℓ²`.
    Weighted { degree: f64, space: WeightedSpace },
    /// Exponential growth on at least one side.
    Exponential { rate: f64 },
}

impl GrowthClass {
    pub fn in_l2(&self) -> bool {
        matches!(self, GrowthClass::L2 { .. })
    }

    pub fn tag(&self) -> String {
        match self {
            GrowthClass::L2 { .. } => "l2".into(),
            GrowthClass::Weighted { space, .. } => format!("H_-{}", space.p),
            GrowthClass::Exponential { .. } => "exponential".into(),
        }
    }
}

/// Slope of the least-squares line through `(x, y)`.
fn slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let (mx, my) = points.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x / n, b + y / n));
    let (sxy, sxx) = points
        .iter()
        .fold((0.0, 0.0), |(a, b), (x, y)| (a + (x - mx) * (y - my), b + (x - mx) * (x - mx)));
    sxy / sxx
}

/// Fits `ln|y_n|` against `|n|` and `ln|n|` on the outer third of each
/// half of the window (block maxima of 4 samples smooth out oscillation).
/// Beyond the support the Jost tails have exactly geometric moduli, so any
/// negative slope below `-1e-10` counts as decay.
pub fn classify_growth(y: &IndexedSeq) -> GrowthClass {
    let reach = y.start.abs().min(y.end().abs());
    let inner = (2 * reach) / 3;
    let mut exp_rates = Vec::new();
    let mut degrees = Vec::new();
    for sign in [-1i64, 1] {
        let mut exp_pts = Vec::new();
        let mut log_pts = Vec::new();
        let mut k = inner;
        while k + 3 <= reach {
            let peak = (k..k + 4).map(|m| y.at(sign * m).norm()).fold(0.0, f64::max);
            let x = (k + 2) as f64;
            if peak > 0.0 {
                exp_pts.push((x, peak.ln()));
                log_pts.push((x.ln(), peak.ln()));
            } else {
                exp_pts.push((x, -745.0));
                log_pts.push((x.ln(), -745.0));
            }
            k += 4;
        }
        if exp_pts.len() < 2 {
            continue;
        }
        exp_rates.push(slope(&exp_pts));
        degrees.push(slope(&log_pts));
    }
    let worst_rate = exp_rates.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if worst_rate < -1e-10 {
        return GrowthClass::L2 { decay_rate: -worst_rate };
    }
    let degree = degrees.iter().copied().fold(f64::NEG_INFINITY, f64::max).max(0.0);
    if worst_rate > 1e-3 && degree > 10.0 {
        return GrowthClass::Exponential { rate: worst_rate };
    }
    let p = (degree + 0.5).floor() as u32 + 1;
    GrowthClass::Weighted {
        degree,
        space: WeightedSpace {
            p,
            sign: WeightSign::Minus,
        },
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ZeroKind {
    Eigenvalue,
    Singularity,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrincipalVectorStack {
    pub lambda_j: Complex64,
    pub z_j: Complex64,
    pub multiplicity: usize,
    /// Winding number of `Φ` around `z_j`.
    pub measured_multiplicity: usize,
    pub kind: ZeroKind,
    /// `U^{(0)}, ..., U^{(m_j - 1)}`.
    pub vectors: Vec<IndexedSeq>,
    pub linkage: Linkage,
    /// `max_n |chain_r| / max_{s ≤ r} max_n |U^{(s)}_n|` for each `r`.
    pub chain_residuals: Vec<f64>,
    pub growth: Vec<GrowthClass>,
}

/// Chain residual `ℓ_λ U^{(r)} + (2p + 2λ) U^{(r-1)} + U^{(r-2)}` on the
/// interior of the window, relative to the largest vector entry involved.
pub fn chain_residual(coeffs: &CoefficientTriple, lambda: Complex64, vectors: &[IndexedSeq], r: usize) -> f64 {
    let u = &vectors[r];
    let mut worst: f64 = 0.0;
    for n in u.start + 1..u.end() {
        let mut v = coeffs.a(n) * u.at(n + 1)
            + coeffs.a(n - 1) * u.at(n - 1)
            + (coeffs.h(n) - 2.0 + 2.0 * lambda * coeffs.p(n) + lambda * lambda) * u.at(n);
        if r >= 1 {
            v += (2.0 * coeffs.p(n) + 2.0 * lambda) * vectors[r - 1].at(n);
        }
        if r >= 2 {
            v += vectors[r - 2].at(n);
        }
        worst = worst.max(v.norm());
    }
    let scale = vectors[..=r].iter().map(|v| v.max_abs()).fold(0.0, f64::max);
    worst / scale
}

/// Default half-width of the window for principal vectors.
pub const DEFAULT_HALF_WIDTH: i64 = 200;

pub fn principal_vectors(coeffs: &CoefficientTriple, lambda_j: Complex64, m_j: usize) -> Result<PrincipalVectorStack> {
    let half = DEFAULT_HALF_WIDTH.max(coeffs.n_min().abs() + 10).max(coeffs.n_max().abs() + 10);
    principal_vectors_on(coeffs, lambda_j, m_j, -half, half)
}

/// Principal vectors on `[lo, hi]`, which must contain
/// `[n_min - 2, n_max + 2]`.
pub fn principal_vectors_on(
    coeffs: &CoefficientTriple,
    lambda_j: Complex64,
    m_j: usize,
    lo: i64,
    hi: i64,
) -> Result<PrincipalVectorStack> {
    if m_j == 0 {
        return Err(Error::contract("m_j must be at least 1"));
    }
    let (olo, ohi) = (coeffs.n_min() - 2, coeffs.n_max() + 2);
    if lo > olo || hi < ohi {
        return Err(Error::contract(format!("window [{lo}, {hi}] must contain [{olo}, {ohi}]")));
    }
    let (z, rel) = zero_preimage(coeffs, lambda_j);
    if rel > 1e-8 {
        return Err(Error::contract(format!("λ = {lambda_j} is not a zero of H (|Φ|/scale = {rel:e})")));
    }
    let chi = CharacteristicFunction::new(coeffs);
    let measured = local_multiplicity(&chi, z)?;
    if measured < m_j as i64 {
        return Err(Error::Multiplicity {
            requested: m_j,
            measured,
        });
    }
    let order = m_j - 1;
    let lambda = z_to_lambda(z);

    let plus_core = lambda_jost_stack_at(coeffs, z, order, Side::Plus, olo, ohi)?;
    let minus_core = lambda_jost_stack_at(coeffs, z, order, Side::Minus, olo, ohi)?;
    let linkage = fit_linkage(&plus_core, &minus_core, order)?;

    let zj = z_of_lambda_jet(z, order)?;
    let vectors: Vec<IndexedSeq> = (0..m_j)
        .map(|r| {
            IndexedSeq::from_fn(lo, hi, |n| {
                let d = if n > ohi {
                    tail_jet(&zj, n, Side::Plus).derivative(r)
                } else if n >= olo {
                    plus_core.derivative(n, r).unwrap()
                } else {
                    let minus = tail_jet(&zj, n, Side::Minus);
                    (0..=r).map(|v| binomial(r, v) * linkage.beta[r - v] * minus.derivative(v)).sum()
                };
                d / factorial(r)
            })
        })
        .collect();

    let chain_residuals = (0..m_j).map(|r| chain_residual(coeffs, lambda, &vectors, r)).collect();
    let growth = vectors.iter().map(classify_growth).collect();
    Ok(PrincipalVectorStack {
        lambda_j: lambda,
        z_j: z,
        multiplicity: m_j,
        measured_multiplicity: measured as usize,
        kind: if z.im > tol_axis(z) { ZeroKind::Eigenvalue } else { ZeroKind::Singularity },
        vectors,
        linkage,
        chain_residuals,
        growth,
    })
}

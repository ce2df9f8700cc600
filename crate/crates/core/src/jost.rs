//! Jost solutions `f^±(z)` of the pencil for `λ = 2cos(z/2)`.
//!
//! Two independent constructions are provided:
//!
//! * **direct** ([`jost`], [`jost_plus_direct`], [`jost_minus_direct`]):
//!   start from the exact free tail beyond the support and run the
//!   three-term recursion across it;
//! * **kernel series** ([`KernelTable`], [`jost_from_kernels`]):
//!   `f_n^+ = α_n^+ e^{inz} (1 + Σ_{m≥1} K_{n,m}^+ e^{imz/2})` with the
//!   kernels generated by coefficient matching.
//!
//! # Normalization
//!
//! Beyond the support the free equation `y_{n+1} + y_{n-1} + (e^{iz} + e^{-iz}) y_n = 0`
//! is solved by `(-1)^n e^{±inz}`, and the matching relation
//! `a_{n-1} α_{n-1}^+ + α_n^+ = 0` forces the same alternating sign on the
//! kernel coefficients. The tail convention used throughout the crate is
//!
//! ```text
//! f_n^+ = (-1)^n e^{inz}   for n > n_max,
//! f_n^- = (-1)^n e^{-inz}  for n < n_min,
//! ```
//!
//! i.e. `α_n^+ = (-1)^n ∏_{r=n}^{n_max} a_r^{-1}`. Zeros of the Wronskian
//! and their multiplicities do not depend on this choice.
//!
//! Internally each solution is stored in scaled form
//! `σ_n = (-1)^n e^{∓inz} f_n`, which stays bounded for large `Im z`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::pencil::{CoefficientTriple, IndexedSeq, ONE, ZERO};

/// Largest `|n Im z|` for which `e^{±inz}` is materialized.
const MAX_EXPONENT: f64 = 700.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Plus,
    Minus,
}

impl Side {
    /// `+1` for the right solution, `-1` for the left one.
    pub fn sign(self) -> f64 {
        match self {
            Side::Plus => 1.0,
            Side::Minus => -1.0,
        }
    }
}

/// Tail convention of a [`JostSolution`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    /// `f_n = (-1)^n e^{±inz}` beyond the corresponding support edge.
    AlternatingTail,
}

impl Normalization {
    pub fn tag(self) -> &'static str {
        match self {
            Normalization::AlternatingTail => "alternating_tail",
        }
    }
}

pub(crate) fn alt(n: i64) -> f64 {
    if n.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Sampled Jost solution on the window `[start, end]`.
#[derive(Clone, Debug, PartialEq)]
pub struct JostSolution {
    side: Side,
    z: Complex64,
    start: i64,
    scaled: Vec<Complex64>,
    normalization: Normalization,
}

impl JostSolution {
    pub fn side(&self) -> Side {
        self.side
    }

    pub fn z(&self) -> Complex64 {
        self.z
    }

    pub fn start(&self) -> i64 {
        self.start
    }

    pub fn end(&self) -> i64 {
        self.start + self.scaled.len() as i64 - 1
    }

    pub fn normalization(&self) -> Normalization {
        self.normalization
    }

    fn slot(&self, n: i64) -> Option<usize> {
        (n >= self.start && n <= self.end()).then(|| (n - self.start) as usize)
    }

    /// `(-1)^n e^{∓inz} f_n`.
    pub fn scaled(&self, n: i64) -> Option<Complex64> {
        self.slot(n).map(|k| self.scaled[k])
    }

    /// `f_n`, or `None` outside the window.
    pub fn value(&self, n: i64) -> Option<Complex64> {
        self.scaled(n)
            .map(|s| alt(n) * (Complex64::i() * self.side.sign() * n as f64 * self.z).exp() * s)
    }

    pub fn values(&self) -> IndexedSeq {
        IndexedSeq::from_fn(self.start, self.end(), |n| self.value(n).unwrap())
    }

    /// Multiplies the solution by a nonzero constant.
    pub fn rescaled(&self, c: Complex64) -> JostSolution {
        JostSolution {
            scaled: self.scaled.iter().map(|s| s * c).collect(),
            ..self.clone()
        }
    }
}

/// `c_n w²` with `w = e^{iz/2}`, where `c_n = h_n + 2λp_n + e^{iz} + e^{-iz}`
/// is the diagonal of the rewritten equation.
fn diag_times_w2(coeffs: &CoefficientTriple, n: i64, w: Complex64, w2: Complex64) -> Complex64 {
    coeffs.h(n) * w2 + 2.0 * coeffs.p(n) * w * (w2 + 1.0) + w2 * w2 + 1.0
}

fn check_range(z: Complex64, lo: i64, hi: i64) -> Result<()> {
    let worst = (lo as f64 * z.im).abs().max((hi as f64 * z.im).abs());
    if worst > MAX_EXPONENT || !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::NumericRange(format!(
            "|n Im z| reaches {worst:.1} on window [{lo}, {hi}] at z = {z}"
        )));
    }
    Ok(())
}

/// Scaled values of `f^+` on `[lo, n_max + 2]` (or just the tail if `lo`
/// lies to the right of the support).
pub(crate) fn plus_scaled(coeffs: &CoefficientTriple, z: Complex64, lo: i64) -> (i64, Vec<Complex64>) {
    let top = coeffs.n_max() + 2;
    let lo = lo.min(top - 1);
    let w = (Complex64::i() * z / 2.0).exp();
    let w2 = w * w;
    let w4 = w2 * w2;
    let len = (top - lo + 1) as usize;
    let mut out = vec![ONE; len];
    // out[k] holds n = lo + k; fill from the top down.
    for n in (lo + 1..=top - 1).rev() {
        let k = (n - lo) as usize;
        let s_n = out[k];
        let s_up = out[k + 1];
        out[k - 1] = (diag_times_w2(coeffs, n, w, w2) * s_n - coeffs.a(n) * w4 * s_up) / coeffs.a(n - 1);
    }
    (lo, out)
}

/// Scaled values of `f^-` on `[n_min - 2, hi]`.
pub(crate) fn minus_scaled(coeffs: &CoefficientTriple, z: Complex64, hi: i64) -> (i64, Vec<Complex64>) {
    let bottom = coeffs.n_min() - 2;
    let hi = hi.max(bottom + 1);
    let w = (Complex64::i() * z / 2.0).exp();
    let w2 = w * w;
    let w4 = w2 * w2;
    let len = (hi - bottom + 1) as usize;
    let mut out = vec![ONE; len];
    for n in bottom + 1..=hi - 1 {
        let k = (n - bottom) as usize;
        out[k + 1] = (diag_times_w2(coeffs, n, w, w2) * out[k] - coeffs.a(n - 1) * w4 * out[k - 1]) / coeffs.a(n);
    }
    (bottom, out)
}

/// Jost solution of the given side on an arbitrary window `[lo, hi]`.
///
/// Values beyond the support edge of `side` are the exact tail; the others
/// come from the three-term recursion started on the tail. Fails with
/// [`Error::NumericRange`] when `e^{±inz}` would leave the `f64` range on
/// the window.
pub fn jost(
    coeffs: &CoefficientTriple,
    z: Complex64,
    side: Side,
    lo: i64,
    hi: i64,
) -> Result<JostSolution> {
    if hi < lo {
        return Err(Error::contract(format!("empty window [{lo}, {hi}]")));
    }
    check_range(z, lo, hi)?;
    Ok(jost_scaled(coeffs, z, side, lo, hi))
}

/// Same as [`jost`] without the range check; only the scaled samples are
/// safe to use.
pub(crate) fn jost_scaled(coeffs: &CoefficientTriple, z: Complex64, side: Side, lo: i64, hi: i64) -> JostSolution {
    let scaled = match side {
        Side::Plus => {
            let (start, s) = plus_scaled(coeffs, z, lo);
            (lo..=hi)
                .map(|n| {
                    if n > coeffs.n_max() {
                        ONE
                    } else {
                        s[(n - start) as usize]
                    }
                })
                .collect()
        }
        Side::Minus => {
            let (start, s) = minus_scaled(coeffs, z, hi);
            (lo..=hi)
                .map(|n| {
                    if n < coeffs.n_min() {
                        ONE
                    } else {
                        s[(n - start) as usize]
                    }
                })
                .collect()
        }
    };
    JostSolution {
        side,
        z,
        start: lo,
        scaled,
        normalization: Normalization::AlternatingTail,
    }
}

/// `f^+` on `[w_min, n_max + 2]`; requires `w_min ≤ n_min - 2`.
pub fn jost_plus_direct(coeffs: &CoefficientTriple, z: Complex64, w_min: i64) -> Result<JostSolution> {
    if w_min > coeffs.n_min() - 2 {
        return Err(Error::contract(format!(
            "w_min = {w_min} must not exceed n_min - 2 = {}",
            coeffs.n_min() - 2
        )));
    }
    jost(coeffs, z, Side::Plus, w_min, coeffs.n_max() + 2)
}

/// `f^-` on `[n_min - 2, w_max]`; requires `w_max ≥ n_max + 2`.
pub fn jost_minus_direct(coeffs: &CoefficientTriple, z: Complex64, w_max: i64) -> Result<JostSolution> {
    if w_max < coeffs.n_max() + 2 {
        return Err(Error::contract(format!(
            "w_max = {w_max} must be at least n_max + 2 = {}",
            coeffs.n_max() + 2
        )));
    }
    jost(coeffs, z, Side::Minus, coeffs.n_min() - 2, w_max)
}

/// `g^±(z) = f^±(-z)`.
pub fn g_solution(
    coeffs: &CoefficientTriple,
    z: Complex64,
    side: Side,
    lo: i64,
    hi: i64,
) -> Result<JostSolution> {
    jost(coeffs, -z, side, lo, hi)
}

/// Taylor jets in `z` of the scaled right solution at `n_min - 1` and
/// `n_min` (the two samples the Wronskian needs), together with the jet of
/// `w = e^{iz/2}`.
pub(crate) fn plus_scaled_jets(coeffs: &CoefficientTriple, z: Complex64, order: usize) -> (Jet, Jet, Jet) {
    let i = Complex64::i();
    let w = Jet::variable(z, order).scale(i * 0.5).exp();
    let w2 = &w * &w;
    let w4 = &w2 * &w2;
    let top = coeffs.n_max() + 2;
    let lo = coeffs.n_min() - 1;
    let mut upper = Jet::constant(ONE, order); // n + 1
    let mut current = Jet::constant(ONE, order); // n
    for n in (lo + 1..=top - 1).rev() {
        let diag = &(&w2.scale(coeffs.h(n)) + &(&w * &w2.add_constant(ONE)).scale(2.0 * coeffs.p(n)))
            + &w4.add_constant(ONE);
        let next = (&(&diag * &current) - &(&w4 * &upper).scale(coeffs.a(n))).scale(coeffs.a(n - 1).inv());
        upper = current;
        current = next;
    }
    // current = σ_{lo}, upper = σ_{lo+1}
    (current, upper, w)
}

/// Coefficients `α_n^±` and kernels `K_{n,m}^±` of the series representation.
#[derive(Clone, Debug, PartialEq)]
pub struct KernelTable {
    side: Side,
    start: i64,
    alpha: Vec<Complex64>,
    /// `kernels[row][k - 1] = K_{n,±k}` for `k = 1..=m_max`.
    kernels: Vec<Vec<Complex64>>,
    m_max: usize,
    edge: i64,
}

/// Kernel table on the default window `[n_min - 2, n_max + 2]`.
pub fn kernel_table(coeffs: &CoefficientTriple, side: Side) -> KernelTable {
    KernelTable::build(coeffs, side, coeffs.n_min() - 2, coeffs.n_max() + 2)
        .expect("default kernel window is nonempty")
}

impl KernelTable {
    /// Builds the rows `n ∈ [lo, hi]`.
    ///
    /// The right kernels are generated from the vanishing tail by
    ///
    /// ```text
    /// K_{n-1,k} - K_{n,k} = K_{n,k-4} - a_n² K_{n+1,k-4} + h_n K_{n,k-2}
    ///                       + 2 p_n (K_{n,k-1} + K_{n,k-3}),
    /// ```
    ///
    /// with `K_{n,0} = 1` and `K_{n,k} = 0` for `k < 0`; for `k ≤ 4` this
    /// reproduces the four explicit tail sums. The left kernels use the
    /// mirrored relation with `a_{n-1}²` and a forward sweep.
    ///
    /// `K_{n,m}^+` vanishes as soon as `n + ⌈m/4⌉ > e⁺` (`e⁺` from
    /// [`CoefficientTriple::right_edge`]), so `m_max = 4(e⁺ - lo)` captures
    /// every nonzero kernel of the window; symmetrically on the left.
    pub fn build(coeffs: &CoefficientTriple, side: Side, lo: i64, hi: i64) -> Result<KernelTable> {
        if hi < lo {
            return Err(Error::contract(format!("empty kernel window [{lo}, {hi}]")));
        }
        match side {
            Side::Plus => Ok(Self::build_plus(coeffs, lo, hi)),
            Side::Minus => Ok(Self::build_minus(coeffs, lo, hi)),
        }
    }

    fn build_plus(coeffs: &CoefficientTriple, lo: i64, hi: i64) -> KernelTable {
        let edge = coeffs.right_edge();
        let m_max = (4 * (edge - lo)).max(4) as usize;
        let rows = (hi - lo + 1) as usize;
        let mut kernels = vec![vec![ZERO; m_max]; rows];

        // Rows at or beyond the edge vanish identically.
        let top = hi.max(edge);
        let mut upper = vec![ZERO; m_max]; // K_{n+1}
        let mut current = vec![ZERO; m_max]; // K_n
        let mut n = top;
        while n > lo {
            let next = step_kernels(&current, &upper, coeffs.a(n) * coeffs.a(n), coeffs.h(n), coeffs.p(n));
            upper = std::mem::replace(&mut current, next);
            n -= 1;
            if n <= hi {
                kernels[(n - lo) as usize].clone_from(&current);
            }
        }

        let mut alpha = vec![ZERO; rows];
        let mut a_n = Complex64::new(alt(coeffs.n_max() + 1), 0.0);
        for m in (lo..=coeffs.n_max().max(hi)).rev() {
            // a_n currently holds α_{m+1}; step to α_m.
            a_n = if m > coeffs.n_max() { Complex64::new(alt(m), 0.0) } else { -a_n / coeffs.a(m) };
            if (lo..=hi).contains(&m) {
                alpha[(m - lo) as usize] = a_n;
            }
        }
        KernelTable {
            side: Side::Plus,
            start: lo,
            alpha,
            kernels,
            m_max,
            edge,
        }
    }

    fn build_minus(coeffs: &CoefficientTriple, lo: i64, hi: i64) -> KernelTable {
        let edge = coeffs.left_edge();
        let m_max = (4 * (hi - edge)).max(4) as usize;
        let rows = (hi - lo + 1) as usize;
        let mut kernels = vec![vec![ZERO; m_max]; rows];

        let bottom = lo.min(edge);
        let mut lower = vec![ZERO; m_max]; // L_{n-1}
        let mut current = vec![ZERO; m_max]; // L_n
        let mut n = bottom;
        while n < hi {
            let next = step_kernels(&current, &lower, coeffs.a(n - 1) * coeffs.a(n - 1), coeffs.h(n), coeffs.p(n));
            lower = std::mem::replace(&mut current, next);
            n += 1;
            if n >= lo {
                kernels[(n - lo) as usize].clone_from(&current);
            }
        }

        let mut alpha = vec![ZERO; rows];
        let mut a_n = Complex64::new(alt(coeffs.n_min() - 1), 0.0);
        for m in coeffs.n_min().min(lo)..=hi {
            a_n = if m < coeffs.n_min() { Complex64::new(alt(m), 0.0) } else { -a_n / coeffs.a(m - 1) };
            if (lo..=hi).contains(&m) {
                alpha[(m - lo) as usize] = a_n;
            }
        }
        KernelTable {
            side: Side::Minus,
            start: lo,
            alpha,
            kernels,
            m_max,
            edge,
        }
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn start(&self) -> i64 {
        self.start
    }

    pub fn end(&self) -> i64 {
        self.start + self.alpha.len() as i64 - 1
    }

    pub fn m_max(&self) -> usize {
        self.m_max
    }

    /// Support edge `e^±` the table was built against.
    pub fn edge(&self) -> i64 {
        self.edge
    }

    fn row(&self, n: i64) -> Result<usize> {
        if n < self.start || n > self.end() {
            return Err(Error::contract(format!(
                "row n = {n} outside kernel window [{}, {}]",
                self.start,
                self.end()
            )));
        }
        Ok((n - self.start) as usize)
    }

    pub fn alpha(&self, n: i64) -> Result<Complex64> {
        Ok(self.alpha[self.row(n)?])
    }

    /// `K_{n,m}`: `m ≥ 1` for the right table, `m ≤ -1` for the left one.
    /// Orders beyond `m_max` are zero.
    pub fn kernel(&self, n: i64, m: i64) -> Result<Complex64> {
        let row = self.row(n)?;
        let k = match self.side {
            Side::Plus if m >= 1 => m as usize,
            Side::Minus if m <= -1 => (-m) as usize,
            _ => return Err(Error::contract(format!("kernel order m = {m} has the wrong sign for {:?}", self.side))),
        };
        Ok(self.kernels[row].get(k - 1).copied().unwrap_or(ZERO))
    }

    /// `true` when `K_{n,m}` is forced to vanish by the support of the
    /// coefficients: `n + ⌈|m|/4⌉ > e⁺` on the right, `n - ⌈|m|/4⌉ < e⁻`
    /// on the left.
    pub fn structurally_zero(&self, n: i64, m: i64) -> bool {
        let reach = (m.unsigned_abs() as i64 + 3) / 4;
        match self.side {
            Side::Plus => n + reach > self.edge,
            Side::Minus => n - reach < self.edge,
        }
    }
}

/// One sweep of the kernel recurrence; `far` is the row on the tail side.
fn step_kernels(
    current: &[Complex64],
    far: &[Complex64],
    a_sq: Complex64,
    h: Complex64,
    p: Complex64,
) -> Vec<Complex64> {
    let m_max = current.len();
    let k_at = |row: &[Complex64], k: i64| -> Complex64 {
        match k {
            0 => ONE,
            k if k < 0 || k as usize > m_max => ZERO,
            k => row[k as usize - 1],
        }
    };
    (1..=m_max as i64)
        .map(|k| {
            let rhs = k_at(current, k - 4) - a_sq * k_at(far, k - 4)
                + h * k_at(current, k - 2)
                + 2.0 * p * (k_at(current, k - 1) + k_at(current, k - 3));
            current[k as usize - 1] + rhs
        })
        .collect()
}

/// Scaled series value `(-1)^n e^{∓inz} f_n = (-1)^n α_n (1 + Σ K_{n,m} w^{|m|})`.
pub fn scaled_from_kernels(table: &KernelTable, z: Complex64, n: i64) -> Result<Complex64> {
    let row = table.row(n)?;
    let w = (Complex64::i() * z / 2.0).exp();
    let mut acc = ZERO;
    for k in table.kernels[row].iter().rev() {
        acc = (acc + k) * w;
    }
    Ok(alt(n) * table.alpha[row] * (ONE + acc))
}

/// Evaluates the series representation of `f_n^±(z)`.
pub fn jost_from_kernels(table: &KernelTable, z: Complex64, n: i64) -> Result<Complex64> {
    check_range(z, n, n)?;
    let s = scaled_from_kernels(table, z, n)?;
    Ok(alt(n) * (Complex64::i() * table.side.sign() * n as f64 * z).exp() * s)
}

/// Measured constant in the bound `|K_{n,m}^±| ≤ c · T(n, m)`, where
/// `T` is the tail sum of `|1 - a_r| + |p_r| + |q_r|` starting at
/// `r = n + ⌊m/2⌋` (right) or ending at `r = n + ⌊m/2⌋ + 1` (left).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KernelBound {
    pub max_ratio: f64,
    /// Entries with `K ≠ 0` whose tail sum is zero.
    pub uncovered: usize,
}

pub fn kernel_bound(table: &KernelTable, coeffs: &CoefficientTriple) -> KernelBound {
    let size = |r: i64| (ONE - coeffs.a(r)).norm() + coeffs.p(r).norm() + coeffs.q(r).norm();
    let mut out = KernelBound {
        max_ratio: 0.0,
        uncovered: 0,
    };
    for n in table.start()..=table.end() {
        for k in 1..=table.m_max() as i64 {
            let m = table.side.sign() as i64 * k;
            let value = table.kernel(n, m).unwrap().norm();
            let pivot = n + m.div_euclid(2);
            let tail: f64 = match table.side {
                Side::Plus => (pivot.max(coeffs.n_min())..=coeffs.n_max()).map(size).sum(),
                Side::Minus => (coeffs.n_min()..=(pivot + 1).min(coeffs.n_max())).map(size).sum(),
            };
            if tail > 0.0 {
                out.max_ratio = out.max_ratio.max(value / tail);
            } else if value > 0.0 {
                out.uncovered += 1;
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pencil::{apply_pencil, z_to_lambda};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn free_pencil_is_the_alternating_exponential() {
        let free = CoefficientTriple::free();
        let z = c(0.7, 0.3);
        let f = jost(&free, z, Side::Plus, -6, 6).unwrap();
        let g = jost(&free, z, Side::Minus, -6, 6).unwrap();
        for n in -6..=6 {
            let e = alt(n) * (Complex64::i() * n as f64 * z).exp();
            assert!((f.value(n).unwrap() - e).norm() < 1e-14 * e.norm());
            let e = alt(n) * (-Complex64::i() * n as f64 * z).exp();
            assert!((g.value(n).unwrap() - e).norm() < 1e-14 * e.norm());
        }
    }

    #[test]
    fn single_site_one_step() {
        let t = CoefficientTriple::single_site(0, c(-3.0, 0.0));
        let z = c(0.4, 0.9);
        let f = jost_plus_direct(&t, z, -3).unwrap();
        let eiz = (Complex64::i() * z).exp();
        assert!((f.value(1).unwrap() + eiz).norm() < 1e-14);
        assert!((f.value(0).unwrap() - ONE).norm() < 1e-14);
        assert!((f.value(-1).unwrap() - (3.0 - eiz.inv())).norm() < 1e-13);
    }

    #[test]
    fn single_site_left_solution_one_step() {
        // f_n = (-1)^n e^{-inz} for n ≤ 0 and f_1 = -(h_0 + e^{iz} + e^{-iz}) f_0 - f_{-1}.
        let t = CoefficientTriple::single_site(0, c(-3.0, 0.0));
        let z = c(-0.2, 0.5);
        let f = jost_minus_direct(&t, z, 3).unwrap();
        let eiz = (Complex64::i() * z).exp();
        assert!((f.value(0).unwrap() - ONE).norm() < 1e-14);
        assert!((f.value(-1).unwrap() + eiz).norm() < 1e-14);
        let expected = -(-3.0 + eiz + eiz.inv()) + eiz;
        assert!((f.value(1).unwrap() - expected).norm() < 1e-13);
    }

    #[test]
    fn window_preconditions() {
        let t = CoefficientTriple::single_site(0, c(-3.0, 0.0));
        assert!(jost_plus_direct(&t, c(0.0, 1.0), -1).is_err());
        assert!(jost_minus_direct(&t, c(0.0, 1.0), 1).is_err());
    }

    #[test]
    fn overflow_is_reported() {
        let t = CoefficientTriple::free();
        assert!(matches!(
            jost(&t, c(0.0, 50.0), Side::Plus, -100, 0),
            Err(Error::NumericRange(_))
        ));
    }

    #[test]
    fn residual_of_direct_solutions() {
        let t = CoefficientTriple::new(
            -1,
            vec![c(1.2, 0.1), c(0.8, -0.3), c(1.0, 0.2)],
            vec![c(0.3, 0.0), c(-0.1, 0.4), ZERO],
            vec![c(0.0, 0.5), c(-1.0, 0.0), c(0.2, 0.2)],
        )
        .unwrap();
        let z = c(1.1, 0.6);
        let lambda = z_to_lambda(z);
        for side in [Side::Plus, Side::Minus] {
            let f = jost(&t, z, side, -7, 7).unwrap();
            let y = f.values();
            let r = apply_pencil(&t, lambda, &y).unwrap();
            assert!(r.max_abs() <= 1e-10 * y.max_abs(), "{side:?}: {}", r.max_abs());
        }
    }

    #[test]
    fn g_is_f_at_minus_z() {
        let t = CoefficientTriple::single_site(0, c(0.0, 2.0));
        let z = c(0.5, -0.25);
        let g = g_solution(&t, z, Side::Plus, -4, 4).unwrap();
        let f = jost(&t, -z, Side::Plus, -4, 4).unwrap();
        assert_eq!(g, f);
        let free = g_solution(&CoefficientTriple::free(), z, Side::Plus, -3, 3).unwrap();
        for n in -3..=3 {
            let e = alt(n) * (-Complex64::i() * n as f64 * z).exp();
            assert!((free.value(n).unwrap() - e).norm() < 1e-14 * e.norm());
        }
    }

    #[test]
    fn free_kernels_vanish() {
        for side in [Side::Plus, Side::Minus] {
            let table = kernel_table(&CoefficientTriple::free(), side);
            for n in table.start()..=table.end() {
                assert_eq!(table.alpha(n).unwrap(), c(alt(n), 0.0));
                for k in 1..=table.m_max() as i64 {
                    assert_eq!(table.kernel(n, side.sign() as i64 * k).unwrap(), ZERO);
                }
            }
        }
    }

    #[test]
    fn single_site_kernels() {
        let t = CoefficientTriple::single_site(0, c(-3.0, 0.0));
        let table = KernelTable::build(&t, Side::Plus, -3, 2).unwrap();
        for n in -3..=2 {
            assert_eq!(table.kernel(n, 1).unwrap(), ZERO);
            let expected = if n <= -1 { c(-3.0, 0.0) } else { ZERO };
            assert_eq!(table.kernel(n, 2).unwrap(), expected);
        }
        // e^{-inz} component of f^+ left of the site appears at order 4|n| - 2.
        assert_eq!(table.kernel(-2, 6).unwrap(), c(-3.0, 0.0));

        let z = c(0.3, 0.8);
        let series = jost_from_kernels(&table, z, -1).unwrap();
        let eiz = (Complex64::i() * z).exp();
        assert!((series - (3.0 - eiz.inv())).norm() < 1e-13);
    }

    #[test]
    fn single_p_kernels() {
        let t = CoefficientTriple::new(0, vec![ONE], vec![ONE], vec![ZERO]).unwrap();
        let table = kernel_table(&t, Side::Plus);
        for n in table.start()..=table.end() {
            let expected = if n <= -1 { c(2.0, 0.0) } else { ZERO };
            assert_eq!(table.kernel(n, 1).unwrap(), expected);
        }
    }

    #[test]
    fn kernel_rows_outside_window_are_rejected() {
        let table = kernel_table(&CoefficientTriple::free(), Side::Plus);
        assert!(table.kernel(table.end() + 1, 1).is_err());
        assert!(table.kernel(0, -1).is_err());
        let z = c(0.0, 1.0);
        assert!(jost_from_kernels(&table, z, table.start() - 1).is_err());
    }

    #[test]
    fn z_jets_match_scalar_recursion() {
        let t = CoefficientTriple::new(0, vec![c(1.3, 0.2), ONE], vec![c(0.2, 0.1), ZERO], vec![c(0.5, -0.5), c(0.1, 0.0)]).unwrap();
        let z = c(0.9, 0.4);
        let (s0, s1, _) = plus_scaled_jets(&t, z, 2);
        let f = jost(&t, z, Side::Plus, -1, 0).unwrap();
        assert!((s0.value() - f.scaled(-1).unwrap()).norm() < 1e-14);
        assert!((s1.value() - f.scaled(0).unwrap()).norm() < 1e-14);
        let h = 1e-6;
        let fp = jost(&t, z + h, Side::Plus, -1, 0).unwrap().scaled(-1).unwrap();
        let fm = jost(&t, z - h, Side::Plus, -1, 0).unwrap().scaled(-1).unwrap();
        assert!((s0.derivative(1) - (fp - fm) / (2.0 * h)).norm() < 1e-8);
    }
}

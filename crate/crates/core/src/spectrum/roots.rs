//! Zeros of `Φ` by the argument principle.
//!
//! The phase of `Φ` is tracked adaptively along the boundary of a
//! rectangle to obtain the number of enclosed zeros. Rectangles are split
//! until each holds one zero (refined by Newton's method) or a cluster
//! small enough to be a single zero of higher multiplicity (refined by
//! Newton's method on `Φ^{(k-1)}`). A contour that runs into a zero is
//! moved slightly and recomputed.
//!
//! Searches that reach the real axis extend a little below it so that
//! real zeros are interior; searches over a whole period are shifted
//! sideways and folded back into `[-π, 3π)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{tol_axis, CharacteristicFunction};
use crate::error::{Error, Result};
use crate::pencil::{fold_re, CoefficientTriple};

/// Closed rectangle `[re_min, re_max] × [im_min, im_max]` in the z-plane.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rectangle {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl Rectangle {
    pub fn new(re_min: f64, re_max: f64, im_min: f64, im_max: f64) -> Result<Self> {
        let r = Rectangle {
            re_min,
            re_max,
            im_min,
            im_max,
        };
        if !(re_min < re_max && im_min < im_max) || ![re_min, re_max, im_min, im_max].iter().all(|v| v.is_finite()) {
            return Err(Error::contract(format!("degenerate rectangle {r:?}")));
        }
        Ok(r)
    }

    /// `[-π, 3π] × [0, height_bound]`.
    pub fn strip(phi: &CharacteristicFunction) -> Self {
        Rectangle {
            re_min: -PI,
            re_max: 3.0 * PI,
            im_min: 0.0,
            im_max: phi.height_bound(),
        }
    }

    fn width(&self) -> f64 {
        self.re_max - self.re_min
    }

    fn height(&self) -> f64 {
        self.im_max - self.im_min
    }

    fn center(&self) -> Complex64 {
        Complex64::new(0.5 * (self.re_min + self.re_max), 0.5 * (self.im_min + self.im_max))
    }

    fn contains(&self, z: Complex64, slack: f64) -> bool {
        z.re >= self.re_min - slack && z.re <= self.re_max + slack && z.im >= self.im_min - slack && z.im <= self.im_max + slack
    }

    fn grown(&self, by: f64) -> Rectangle {
        Rectangle {
            re_min: self.re_min - by,
            re_max: self.re_max + by,
            im_min: self.im_min - by,
            im_max: self.im_max + by,
        }
    }
}

/// A zero of `Φ` with its multiplicity (winding number).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Zero {
    pub z: Complex64,
    pub multiplicity: usize,
}

/// The contour passed (numerically) through a zero.
struct Hit;

const MAX_STEP: f64 = PI / 4.0;
const HIT_LEVEL: f64 = 1e-12;
const CLUSTER_SIZE: f64 = 1e-3;
const SPLITS: [f64; 5] = [0.5, 0.4871, 0.5313, 0.4457, 0.5629];
const SHIFTS: [f64; 6] = [0.0123, -0.0271, 0.0377, -0.0519, 0.0613, -0.0797];
const BELOW_AXIS: [f64; 6] = [0.05, 0.0613, 0.0437, 0.0711, 0.0389, 0.0827];

/// A boundary sample: position, `Φ` and the distance estimate `|Φ/Φ'|`.
#[derive(Clone, Copy)]
struct Sample {
    z: Complex64,
    f: Complex64,
    reach: f64,
}

fn sample(phi: &CharacteristicFunction, z: Complex64) -> Result<Sample, Hit> {
    let (f, df) = phi.eval_with_derivative(z);
    if !f.is_finite() || f.norm() <= HIT_LEVEL * phi.scale(z) {
        return Err(Hit);
    }
    Ok(Sample {
        z,
        f,
        reach: f.norm() / df.norm(),
    })
}

/// Phase increment of `Φ` along the segment `[a, b]`.
///
/// A step is accepted when both half steps turn the phase by less than
/// `π/4` and the step is shorter than `|Φ/Φ'|` at its ends and midpoint,
/// which keeps every zero (of any order) farther away than the step.
fn segment_phase(phi: &CharacteristicFunction, a: Complex64, b: Complex64) -> Result<f64, Hit> {
    let pieces = ((b - a).norm() * 4.0).ceil().max(4.0) as usize;
    let mut total = 0.0;
    let mut left = sample(phi, a)?;
    for k in 1..=pieces {
        let right = sample(phi, a + (b - a) * (k as f64 / pieces as f64))?;
        total += adaptive_phase(phi, left, right)?;
        left = right;
    }
    Ok(total)
}

fn adaptive_phase(phi: &CharacteristicFunction, a: Sample, b: Sample) -> Result<f64, Hit> {
    let mut stack = vec![(a, b)];
    let mut total = 0.0;
    while let Some((a, b)) = stack.pop() {
        let m = sample(phi, 0.5 * (a.z + b.z))?;
        let d1 = (m.f / a.f).arg();
        let d2 = (b.f / m.f).arg();
        let len = (b.z - a.z).norm();
        if d1.abs() < MAX_STEP && d2.abs() < MAX_STEP && len <= a.reach.min(b.reach).min(m.reach) {
            total += d1 + d2;
        } else if len < 1e-11 * (1.0 + a.z.norm()) {
            return Err(Hit);
        } else {
            stack.push((m, b));
            stack.push((a, m));
        }
    }
    Ok(total)
}

fn try_winding(phi: &CharacteristicFunction, r: &Rectangle) -> Result<i64, Hit> {
    let c = [
        Complex64::new(r.re_min, r.im_min),
        Complex64::new(r.re_max, r.im_min),
        Complex64::new(r.re_max, r.im_max),
        Complex64::new(r.re_min, r.im_max),
    ];
    let mut total = 0.0;
    for k in 0..4 {
        total += segment_phase(phi, c[k], c[(k + 1) % 4])?;
    }
    let turns = total / (2.0 * PI);
    let rounded = turns.round();
    if (turns - rounded).abs() > 0.05 {
        return Err(Hit);
    }
    Ok(rounded as i64)
}

/// Number of zeros of `Φ` (with multiplicity) inside the rectangle.
/// Fails when the boundary passes through a zero.
pub fn winding_number(phi: &CharacteristicFunction, r: &Rectangle) -> Result<i64> {
    try_winding(phi, r).map_err(|_| {
        Error::RootFinding(format!("boundary of {r:?} passes through or next to a zero of Φ"))
    })
}

/// Newton's method on `Φ^{(k)}`, kept inside a neighborhood of `r`.
/// The limit is accepted when it lies in `r` and
/// `|Φ| ≤ tol^{1/(k+1)} · scale`.
fn newton(phi: &CharacteristicFunction, r: &Rectangle, k: usize, tol: f64) -> Option<Complex64> {
    let fence = r.grown(0.25 * r.width().max(r.height()));
    let mut z = r.center();
    for _ in 0..100 {
        let jet = phi.jet(z, k + 1);
        let (g, dg) = (jet.derivative(k), jet.derivative(k + 1));
        if dg.norm() == 0.0 || !g.is_finite() {
            return None;
        }
        let step = g / dg;
        z -= step;
        if !fence.contains(z, 0.0) {
            return None;
        }
        if step.norm() <= 4.0 * f64::EPSILON * (1.0 + z.norm()) {
            break;
        }
    }
    let slack = 1e-9 * (1.0 + z.norm());
    let gate = tol.powf(1.0 / (k + 1) as f64) * phi.scale(z);
    (r.contains(z, slack) && phi.eval(z).norm() <= gate).then_some(z)
}

fn split(r: &Rectangle, frac: f64) -> (Rectangle, Rectangle) {
    if r.width() >= r.height() {
        let x = r.re_min + frac * r.width();
        (Rectangle { re_max: x, ..*r }, Rectangle { re_min: x, ..*r })
    } else {
        let y = r.im_min + frac * r.height();
        (Rectangle { im_max: y, ..*r }, Rectangle { im_min: y, ..*r })
    }
}

fn isolate(phi: &CharacteristicFunction, outer: Rectangle, count: i64, tol: f64) -> Result<Vec<Zero>> {
    let mut out = Vec::new();
    let mut work = vec![(outer, count)];
    while let Some((r, n)) = work.pop() {
        if n <= 0 {
            continue;
        }
        let size = r.width().max(r.height());
        let k = n as usize;
        if k == 1 || size < CLUSTER_SIZE {
            if let Some(z) = newton(phi, &r, k - 1, tol) {
                out.push(Zero { z, multiplicity: k });
                continue;
            }
        }
        if size < 1e-10 * (1.0 + r.center().norm()) {
            out.push(Zero {
                z: r.center(),
                multiplicity: k,
            });
            continue;
        }
        let mut done = false;
        for frac in SPLITS {
            let (r1, r2) = split(&r, frac);
            if let (Ok(n1), Ok(n2)) = (try_winding(phi, &r1), try_winding(phi, &r2)) {
                if n1 >= 0 && n2 >= 0 && n1 + n2 == n {
                    work.push((r1, n1));
                    work.push((r2, n2));
                    done = true;
                    break;
                }
            }
        }
        if !done {
            return Err(Error::RootFinding(format!(
                "could not split {r:?} holding {n} zeros into consistent halves"
            )));
        }
    }
    Ok(out)
}

/// All zeros of `Φ` in `region` with their multiplicities, sorted by
/// `Re z` then `Im z`. Each zero is refined until the step stalls at
/// rounding level and must satisfy `|Φ| ≤ tol · scale` (simple zeros).
///
/// Zeros on the real axis are returned when `region.im_min ≤ 0`; a region
/// covering a whole period `[-π, 3π]` reports each zero once, with
/// `Re z ∈ [-π, 3π)`.
pub fn find_zeros(coeffs: &CoefficientTriple, region: &Rectangle, tol: f64) -> Result<Vec<Zero>> {
    find_zeros_of(&CharacteristicFunction::new(coeffs), region, tol)
}

pub(super) fn find_zeros_of(phi: &CharacteristicFunction, region: &Rectangle, tol: f64) -> Result<Vec<Zero>> {
    if !(tol > 0.0) {
        return Err(Error::contract("tol must be positive"));
    }
    Rectangle::new(region.re_min, region.re_max, region.im_min, region.im_max)?;
    if region.re_min < -PI - 1e-12 || region.re_max > 3.0 * PI + 1e-12 || region.im_min < 0.0 {
        return Err(Error::contract(format!("region {region:?} leaves the closed half-strip")));
    }
    let periodic = region.width() >= 4.0 * PI - 1e-9;
    let margin = 1e-3 * region.width().min(region.height()).min(1.0);

    for attempt in 0..SHIFTS.len() {
        let below = if region.im_min == 0.0 { BELOW_AXIS[attempt] } else { margin * (1.0 + attempt as f64 * 0.137) };
        let outer = if periodic {
            Rectangle {
                re_min: -PI + SHIFTS[attempt],
                re_max: 3.0 * PI + SHIFTS[attempt],
                im_min: region.im_min - below,
                im_max: region.im_max,
            }
        } else {
            let m = margin * (1.0 + attempt as f64 * 0.173);
            Rectangle {
                re_min: region.re_min - m,
                re_max: region.re_max + m,
                im_min: region.im_min - below,
                im_max: region.im_max + m,
            }
        };
        let Ok(count) = try_winding(phi, &outer) else {
            continue;
        };
        let found = isolate(phi, outer, count, tol)?;
        return Ok(finish(found, region, periodic));
    }
    Err(Error::RootFinding(format!(
        "winding number around {region:?} did not stabilise after {} contour shifts",
        SHIFTS.len()
    )))
}

fn finish(found: Vec<Zero>, region: &Rectangle, periodic: bool) -> Vec<Zero> {
    let mut zeros: Vec<Zero> = found
        .into_iter()
        .map(|mut zero| {
            if periodic {
                zero.z.re = fold_re(zero.z.re);
                if (zero.z.re - 3.0 * PI).abs() < 1e-9 {
                    zero.z.re = -PI;
                }
            }
            zero
        })
        .filter(|zero| {
            let slack = tol_axis(zero.z);
            zero.z.im >= region.im_min - slack
                && zero.z.im <= region.im_max + slack
                && (periodic || (zero.z.re >= region.re_min - slack && zero.z.re <= region.re_max + slack))
        })
        .collect();
    zeros.sort_by(|x, y| x.z.re.total_cmp(&y.z.re).then(x.z.im.total_cmp(&y.z.im)));
    let mut out: Vec<Zero> = Vec::with_capacity(zeros.len());
    for zero in zeros {
        match out.iter_mut().find(|o| (o.z - zero.z).norm() < 1e-8 * (1.0 + zero.z.norm())) {
            Some(o) => o.multiplicity = o.multiplicity.max(zero.multiplicity),
            None => out.push(zero),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectrum::spectrum_report;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn free_pencil_has_only_boundary_zeros() {
        let free = CoefficientTriple::free();
        let phi = CharacteristicFunction::new(&free);
        let zeros = phi.find_zeros(&Rectangle::strip(&phi), 1e-10).unwrap();
        let re: Vec<f64> = zeros.iter().map(|z| z.z.re).collect();
        assert_eq!(re.len(), 4, "{zeros:?}");
        for (x, e) in re.iter().zip([-PI, 0.0, PI, 2.0 * PI]) {
            assert!((x - e).abs() < 1e-12);
        }
        let report = spectrum_report(&free, 1e-10).unwrap();
        assert!(report.eigenvalues.is_empty() && report.spectral_singularities.is_empty());
        assert_eq!(report.boundary_indeterminate.len(), 4);
    }

    #[test]
    fn single_site_bound_states() {
        let t = CoefficientTriple::single_site(0, c(-3.0, 0.0));
        let zeros = find_zeros(&t, &Rectangle::new(-PI, 3.0 * PI, 0.1, 4.0).unwrap(), 1e-10).unwrap();
        let y = 1.5f64.asinh();
        assert_eq!(zeros.len(), 2);
        assert!((zeros[0].z - c(0.0, y)).norm() < 1e-12);
        assert!((zeros[1].z - c(2.0 * PI, y)).norm() < 1e-12);
        assert!(zeros.iter().all(|z| z.multiplicity == 1));
    }

    #[test]
    fn double_zeros_on_the_axis() {
        let t = CoefficientTriple::single_site(0, c(0.0, 2.0));
        let report = spectrum_report(&t, 1e-10).unwrap();
        assert!(report.eigenvalues.is_empty());
        let s = &report.spectral_singularities;
        assert_eq!(s.len(), 2, "{report:?}");
        assert!((s[0].z.re - PI / 2.0).abs() < 1e-7 && s[0].multiplicity == 2);
        assert!((s[1].z.re - 2.5 * PI).abs() < 1e-7 && s[1].multiplicity == 2);
    }

    #[test]
    fn winding_adds_up() {
        let t = CoefficientTriple::single_site(0, c(-3.0, 0.0));
        let phi = CharacteristicFunction::new(&t);
        let whole = winding_number(&phi, &Rectangle::new(-1.0, 7.0, 0.5, 3.0).unwrap()).unwrap();
        let left = winding_number(&phi, &Rectangle::new(-1.0, 3.0, 0.5, 3.0).unwrap()).unwrap();
        let right = winding_number(&phi, &Rectangle::new(3.0, 7.0, 0.5, 3.0).unwrap()).unwrap();
        assert_eq!((whole, left, right), (2, 1, 1));
    }

    #[test]
    fn region_must_lie_in_strip() {
        let t = CoefficientTriple::free();
        assert!(find_zeros(&t, &Rectangle::new(-4.0, 0.0, 0.0, 1.0).unwrap(), 1e-10).is_err());
        assert!(find_zeros(&t, &Rectangle::new(0.0, 1.0, 0.0, 1.0).unwrap(), 0.0).is_err());
    }
}

mod common;

use std::f64::consts::PI;

use common::{c, random_triple, rng};
use num_complex::Complex64;
use qpencil::jost::{jost, jost_from_kernels, kernel_bound, kernel_table, KernelTable, Side};
use qpencil::pencil::{apply_pencil, z_to_lambda, CoefficientTriple};
use rand::Rng;

/// `n ↦ -n`: `a'_n = a_{-n-1}`, `p'_n = p_{-n}`, `q'_n = q_{-n}`.
fn reflect(t: &CoefficientTriple) -> CoefficientTriple {
    CoefficientTriple::from_fn(-t.n_max() - 1, -t.n_min(), |n| (t.a(-n - 1), t.p(-n), t.q(-n))).unwrap()
}

#[test]
fn reflection_swaps_the_sides() {
    let mut r = rng(31);
    for _ in 0..20 {
        let t = random_triple(&mut r, 0.5, true);
        let m = reflect(&t);
        let z = c(r.gen_range(-PI..3.0 * PI), r.gen_range(0.0..1.5));
        let (lo, hi) = (t.n_min() - 4, t.n_max() + 4);
        let minus = jost(&t, z, Side::Minus, lo, hi).unwrap();
        let plus = jost(&m, z, Side::Plus, -hi, -lo).unwrap();
        for n in lo..=hi {
            let (x, y) = (minus.value(n).unwrap(), plus.value(-n).unwrap());
            assert!((x - y).norm() <= 1e-12 * (1.0 + x.norm()), "{t:?} n = {n}: {x} vs {y}");
        }
    }
}

#[test]
fn direct_solutions_solve_the_pencil() {
    let mut r = rng(32);
    for _ in 0..20 {
        let t = random_triple(&mut r, 0.5, true);
        let z = c(r.gen_range(-PI..3.0 * PI), r.gen_range(0.0..1.5));
        for side in [Side::Plus, Side::Minus] {
            let f = jost(&t, z, side, t.n_min() - 6, t.n_max() + 6).unwrap();
            let y = f.values();
            let res = apply_pencil(&t, z_to_lambda(z), &y).unwrap();
            assert!(res.max_abs() <= 1e-12 * y.max_abs(), "{t:?}");
        }
    }
}

fn check_support(table: &KernelTable) {
    for n in table.start()..=table.end() {
        for k in 1..=table.m_max() as i64 + 4 {
            let m = if table.side() == Side::Plus { k } else { -k };
            if table.structurally_zero(n, m) {
                assert_eq!(table.kernel(n, m).unwrap(), Complex64::default(), "K({n}, {m})");
            }
        }
    }
}

#[test]
fn kernels_vanish_outside_their_support() {
    let mut r = rng(33);
    for _ in 0..20 {
        let t = random_triple(&mut r, 0.5, true);
        for side in [Side::Plus, Side::Minus] {
            check_support(&kernel_table(&t, side));
        }
    }
}

#[test]
fn kernel_series_on_wider_windows() {
    let mut r = rng(34);
    for _ in 0..10 {
        let t = random_triple(&mut r, 0.5, true);
        for side in [Side::Plus, Side::Minus] {
            let table = KernelTable::build(&t, side, t.n_min() - 5, t.n_max() + 5).unwrap();
            let z = c(r.gen_range(-PI..3.0 * PI), r.gen_range(0.0..1.0));
            let f = jost(&t, z, side, table.start(), table.end()).unwrap();
            let size = f.values().max_abs();
            for n in table.start()..=table.end() {
                let k = jost_from_kernels(&table, z, n).unwrap();
                assert!((k - f.value(n).unwrap()).norm() <= 1e-10 * size);
            }
            let bound = kernel_bound(&table, &t);
            assert!(bound.max_ratio.is_finite());
        }
    }
}

mod common;

use common::{c, random_triple, rng};
use qpencil::jost::Side;
use qpencil::pencil::{CoefficientTriple, IndexedSeq};
use qpencil::principal::{
    classify_growth, h_function, lambda_jost_stack, linkage_coefficients, principal_vectors, weighted_norm, WeightSign,
    ZeroKind,
};
use qpencil::spectrum::spectrum_report;
use qpencil::Error;

#[test]
fn chains_hold_at_every_zero_of_random_pencils() {
    let mut r = rng(51);
    let mut checked = 0;
    for _ in 0..12 {
        let t = random_triple(&mut r, 0.5, true);
        let report = spectrum_report(&t, 1e-10).unwrap();
        for zero in report.eigenvalues.iter().chain(&report.spectral_singularities) {
            match principal_vectors(&t, zero.lambda, zero.multiplicity) {
                Ok(stack) => {
                    checked += 1;
                    assert!(stack.chain_residuals.iter().all(|v| *v <= 1e-6), "{t:?}: {:?}", stack.chain_residuals);
                    if stack.kind == ZeroKind::Eigenvalue {
                        assert!(stack.growth[0].in_l2(), "{zero:?}: {:?}", stack.growth[0]);
                    } else {
                        assert!(!stack.growth[0].in_l2());
                    }
                }
                // Zeros next to λ = ±2 have no λ-derivatives.
                Err(Error::BranchPoint(_)) => {}
                Err(e) => panic!("{t:?} at {zero:?}: {e}"),
            }
        }
    }
    assert!(checked > 0);
}

#[test]
fn linkage_at_an_eigenvalue_is_a_scalar_multiple() {
    let t = CoefficientTriple::single_site(0, c(-3.0, 0.0));
    let l = c((2.0 + 13f64.sqrt()).sqrt(), 0.0);
    let link = linkage_coefficients(&t, l, 0).unwrap();
    assert!(link.residuals[0] < 1e-12);
    // By symmetry of the single-site pencil f^+_n = β f^-_{n}, f^±_0 equal.
    assert!((link.beta[0] - 1.0).norm() < 1e-10);
}

#[test]
fn h_function_vanishes_exactly_at_reported_zeros() {
    let mut r = rng(52);
    for _ in 0..8 {
        let t = random_triple(&mut r, 0.5, true);
        for e in spectrum_report(&t, 1e-10).unwrap().eigenvalues {
            assert!(h_function(&t, e.lambda).norm() < 1e-8 * (1.0 + e.z.im.exp()));
        }
    }
}

#[test]
fn stack_layers_are_consistent_between_orders() {
    let t = CoefficientTriple::new(-1, vec![c(1.2, 0.1), c(0.8, 0.0)], vec![c(0.2, 0.0), c(0.0, -0.1)], vec![c(0.3, 0.3), c(-0.5, 0.0)])
        .unwrap();
    let l = c(0.5, 0.7);
    for side in [Side::Plus, Side::Minus] {
        let low = lambda_jost_stack(&t, l, 1, side).unwrap();
        let high = lambda_jost_stack(&t, l, 4, side).unwrap();
        for n in low.start..=low.end() {
            for k in 0..=1 {
                assert!((low.derivative(n, k).unwrap() - high.derivative(n, k).unwrap()).norm() < 1e-12);
            }
        }
    }
}

#[test]
fn weighted_spaces_order_polynomial_growth() {
    let linear = IndexedSeq::from_fn(-300, 300, |n| c(n as f64, 0.0));
    assert_eq!(classify_growth(&linear).tag(), "H_-2");
    assert!(weighted_norm(&linear, 2, WeightSign::Minus) < weighted_norm(&linear, 1, WeightSign::Minus));
    let exploding = IndexedSeq::from_fn(-60, 60, |n| c((0.5 * n.abs() as f64).exp(), 0.0));
    assert!(matches!(classify_growth(&exploding), qpencil::principal::GrowthClass::Exponential { .. }));
}

mod common;

use common::{c, random_triple, rng, small};
use qpencil::jost::Side;
use qpencil::pencil::CoefficientTriple;
use qpencil::spectrum::spectrum_report;
use qpencil::transforms::{
    from_klein_gordon, from_sturm_liouville, q_equation_residual, q_integral, q_jost, q_spectrum, q_to_discrete,
    to_sturm_liouville, KleinGordonForm, QPencil,
};
use rand::Rng;

#[test]
fn sturm_liouville_eigenvalues_map_through_two_minus_lambda_squared() {
    let mut r = rng(61);
    for _ in 0..6 {
        let t = common::random_real_sl(&mut r, 0.5);
        let sl = to_sturm_liouville(&t).unwrap();
        assert_eq!(from_sturm_liouville(&sl).unwrap().q_values().len(), t.q_values().len() + 1);
        let matrix = common::jacobi_eigenvalues(&t, 300);
        for e in spectrum_report(&t, 1e-10).unwrap().eigenvalues {
            let target = 2.0 - e.lambda * e.lambda;
            if target.re.abs() > 2.05 {
                assert!(matrix.iter().any(|m| (m - target).norm() < 1e-4), "{t:?}: {target}");
            }
        }
    }
}

#[test]
fn klein_gordon_matches_direct_entry() {
    let via = from_klein_gordon(&KleinGordonForm {
        n_min: 0,
        a: vec![c(1.0, 0.0)],
        v: vec![c(0.0, 1.0)],
    })
    .unwrap();
    let direct = CoefficientTriple::new(0, vec![c(1.0, 0.0)], vec![c(0.0, -1.0)], vec![c(-1.0, 0.0)]).unwrap();
    assert_eq!(spectrum_report(&via, 1e-10).unwrap(), spectrum_report(&direct, 1e-10).unwrap());
}

#[test]
fn q_spectra_are_scaled_hat_spectra() {
    let mut r = rng(62);
    for _ in 0..6 {
        let hat = random_triple(&mut r, 0.4, true);
        let q = r.gen_range(1.5..6.0);
        let qp = QPencil::from_hat(q, &hat).unwrap();
        let rep = q_spectrum(&qp, 1e-10).unwrap();
        let direct = spectrum_report(&hat, 1e-10).unwrap();
        assert_eq!(rep.eigenvalues.len(), direct.eigenvalues.len());
        for (a, b) in rep.eigenvalues.iter().zip(&direct.eigenvalues) {
            assert!((a.lambda - q.powf(0.25) * b.lambda).norm() < 1e-8);
        }
        assert_eq!(rep.continuous_spectrum, [-2.0 * q.powf(0.25), 2.0 * q.powf(0.25)]);
    }
}

#[test]
fn q_jost_solves_the_q_equation() {
    let mut r = rng(63);
    for _ in 0..6 {
        let hat = random_triple(&mut r, 0.4, true);
        let q = r.gen_range(1.5..4.0);
        let qp = QPencil::from_hat(q, &hat).unwrap();
        let z = small(&mut r, 1.0) + c(2.0, 1.0);
        for n in hat.n_min() - 3..=hat.n_max() + 3 {
            for side in [Side::Plus, Side::Minus] {
                assert!(q_equation_residual(&qp, z, q.powi(n as i32), side).unwrap() <= 1e-9);
            }
        }
        assert_eq!(q_jost(&qp, z, 1.0).unwrap(), {
            let (t, _) = q_to_discrete(&qp).unwrap();
            qpencil::jost::jost(&t, z, Side::Plus, 0, 0).unwrap().value(0).unwrap()
        });
    }
}

#[test]
fn q_pencil_json_round_trip() {
    let qp = QPencil::from_hat(4.0, &CoefficientTriple::single_site(0, c(-3.0, 0.0))).unwrap();
    let text = serde_json::to_string(&qp).unwrap();
    assert_eq!(serde_json::from_str::<QPencil>(&text).unwrap(), qp);
}

#[test]
fn q_integral_definition() {
    for q in [1.5, 2.0, 7.0] {
        for n in 1..6 {
            let v = q_integral(q, 0, n, |_| c(1.0, 0.0));
            let expected: f64 = (q - 1.0) * (0..n).map(|k| q.powi(k as i32)).sum::<f64>();
            assert!((v.re - expected).abs() <= 1e-12 * expected);
        }
    }
}

use matcore::{mat, trigger_constants, LyapunovPair, Mat, MatError, TriggerParams};
use proptest::prelude::*;

fn base() -> (LyapunovPair, Mat, Mat, TriggerParams) {
    let pair = LyapunovPair {
        p: Mat::identity(2, 2),
        q: Mat::identity(2, 2) * 2.0,
    };
    let h = mat(2, 1, &[1.0, 1.0]);
    let b = mat(2, 1, &[0.0, 1.0]);
    let prm = TriggerParams {
        c: 0.5,
        d: 1.0,
        c1: 1.0,
        c2: 1.0,
        eps: 0.5,
        t_d: 0.1,
        psi: 1.0,
    };
    (pair, h, b, prm)
}

#[test]
fn hand_arithmetic() {
    let (pair, h, b, prm) = base();
    let k = trigger_constants(&pair, &h, &b, prm).unwrap();
    assert!((k.alpha - 1.0).abs() < 1e-14);
    assert!((k.beta - 2.0).abs() < 1e-14);
    assert!((k.gamma - 4.0).abs() < 1e-13);
    assert!((k.phi - 0.1).abs() < 1e-15);
    assert!((k.omega - 0.48).abs() < 1e-14);
}

#[test]
fn boundary_errors() {
    let (pair, h, b, mut prm) = base();
    prm.c = 1.0;
    assert!(matches!(
        trigger_constants(&pair, &h, &b, prm),
        Err(MatError::AlphaNonpositive { .. })
    ));
    let (pair, h, b, mut prm) = base();
    prm.eps = 0.01;
    match trigger_constants(&pair, &h, &b, prm) {
        Err(MatError::OmegaNonpositive(w)) => assert!((w + 0.01).abs() < 1e-14),
        other => panic!("{other:?}"),
    }
}

#[test]
fn event_test_arithmetic() {
    let (pair, h, b, prm) = base();
    let k = trigger_constants(&pair, &h, &b, prm).unwrap();
    assert!(!k.fires(0.0, 0.0));
    assert!(k.fires(0.1, 0.01));
    assert!(!k.fires(0.09, 0.01));
}

#[test]
fn miet_arithmetic() {
    let (pair, h, b, prm) = base();
    let k = trigger_constants(&pair, &h, &b, prm).unwrap();
    let tau = k.miet(10.0).unwrap();
    assert!((tau - 0.05 * 0.096f64.sqrt()).abs() < 1e-15);
    assert!((tau - 0.015491933).abs() < 1e-8);
    assert!((k.miet(20.0).unwrap() - tau / 2.0).abs() < 1e-15);
    let mut k4 = k;
    k4.omega *= 4.0;
    assert!((k4.miet(10.0).unwrap() - 2.0 * tau).abs() < 1e-15);
    assert!(k.miet(0.0).is_err());
}

proptest! {
    #[test]
    fn monotone_in_c(c_lo in 0.01f64..0.98, frac in 0.01f64..0.99) {
        let (pair, h, b, mut prm) = base();
        prm.psi = 0.0;
        let c_hi = c_lo + frac * (0.999 - c_lo);
        prm.c = c_lo;
        let lo = trigger_constants(&pair, &h, &b, prm).unwrap();
        prm.c = c_hi;
        let hi = trigger_constants(&pair, &h, &b, prm).unwrap();
        prop_assert!(hi.alpha < lo.alpha);
        prop_assert!(hi.beta < lo.beta);
        prop_assert!(hi.gamma < lo.gamma);
        prop_assert!(lo.alpha > 0.0 && lo.beta > 0.0 && lo.gamma > 0.0 && lo.omega > 0.0);
    }

    #[test]
    fn omega_decreasing_in_phi(psi_lo in 0.0f64..1.5, dpsi in 0.001f64..0.5) {
        let (pair, h, b, mut prm) = base();
        prm.psi = psi_lo;
        let lo = trigger_constants(&pair, &h, &b, prm).unwrap();
        prm.psi = psi_lo + dpsi;
        let hi = trigger_constants(&pair, &h, &b, prm).unwrap();
        prop_assert!(hi.phi > lo.phi);
        prop_assert!(hi.omega < lo.omega);
    }
}

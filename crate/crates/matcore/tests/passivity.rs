use matcore::{check_positive_real, default_grid, log_grid, mat};
use proptest::prelude::*;

#[test]
fn default_grid_shape() {
    let g = default_grid();
    assert_eq!(g.len(), 400);
    assert!((g[0] - 1e-3).abs() < 1e-15 && (g[399] - 1e4).abs() < 1e-9);
    assert!(g.windows(2).all(|w| w[1] > w[0]));
}

#[test]
fn lossless_oscillator_passes_with_boundary_flag() {
    let a = mat(2, 2, &[0.0, 1.0, -1.0, 0.0]);
    let b = mat(2, 1, &[0.0, 1.0]);
    let c = mat(1, 2, &[0.0, 1.0]);
    let cert = check_positive_real(&a, &b, &c, &default_grid()).unwrap();
    assert!(cert.passive);
    assert!(cert.worst_margin.abs() < 1e-9);
    // ω = 1 happens to be an exact grid point (7·171/399 = 3)
    assert!(cert.lossless_boundary);
    assert_eq!(cert.skipped.len(), 1);
    assert!((cert.skipped[0] - 1.0).abs() < 1e-12);
}

#[test]
fn unstable_scalar_rejected() {
    let one = mat(1, 1, &[1.0]);
    let cert = check_positive_real(&one, &one, &one, &default_grid()).unwrap();
    assert!(!cert.passive);
    // Re G(jω) = −1/(1+ω²), worst at the lowest grid frequency
    assert!((cert.worst_margin + 1.0 / (1.0 + 1e-6)).abs() < 1e-12);
    assert!((cert.worst_omega - 1e-3).abs() < 1e-15);
}

#[test]
fn first_order_lag_is_passive() {
    // 1/(s+1): Re = 1/(1+ω²) > 0
    let cert = check_positive_real(
        &mat(1, 1, &[-1.0]),
        &mat(1, 1, &[1.0]),
        &mat(1, 1, &[1.0]),
        &default_grid(),
    )
    .unwrap();
    assert!(cert.passive && !cert.lossless_boundary);
    assert!((cert.worst_omega - 1e4).abs() < 1e-6);
}

#[test]
fn relative_degree_two_fails_at_high_frequency() {
    // 1/(s+1)²: Re = (1−ω²)/(1+ω²)² goes negative past ω = 1
    let a = mat(2, 2, &[-1.0, 1.0, 0.0, -1.0]);
    let b = mat(2, 1, &[0.0, 1.0]);
    let c = mat(1, 2, &[1.0, 0.0]);
    let cert = check_positive_real(&a, &b, &c, &default_grid()).unwrap();
    assert!(!cert.passive);
    // minimum of (1−x)/(1+x)² over x = ω² is −1/8 at ω = √3
    assert!((cert.worst_margin + 0.125).abs() < 1e-3);
    assert!((cert.worst_omega - 3f64.sqrt()).abs() < 0.05);
}

#[test]
fn mimo_diagonal_uses_hermitian_min_eig() {
    // diag(1/(s+1), 1/(s+2))
    let a = mat(2, 2, &[-1.0, 0.0, 0.0, -2.0]);
    let b = mat(2, 2, &[1.0, 0.0, 0.0, 1.0]);
    let c = b.clone();
    let cert = check_positive_real(&a, &b, &c, &[0.0, 1.0, 10.0]).unwrap();
    assert!(cert.passive);
    // smallest value: Re 1/(1+10j) = 1/101
    assert!((cert.worst_margin - 1.0 / 101.0).abs() < 1e-12);
    assert_eq!(cert.worst_omega, 10.0);
}

#[test]
fn rejects_bad_inputs() {
    let one = mat(1, 1, &[1.0]);
    assert!(check_positive_real(&one, &one, &one, &[]).is_err());
    assert!(check_positive_real(&one, &mat(2, 1, &[1.0, 1.0]), &one, &[1.0]).is_err());
}

proptest! {
    #[test]
    fn verdict_independent_of_grid_order(seed in any::<u64>()) {
        let a = mat(2, 2, &[-1.0, 1.0, 0.0, -1.0]);
        let b = mat(2, 1, &[0.0, 1.0]);
        let c = mat(1, 2, &[1.0, 0.0]);
        let grid = log_grid(1e-2, 1e2, 57);
        let mut shuffled = grid.clone();
        let mut s = seed;
        for i in (1..shuffled.len()).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            shuffled.swap(i, (s >> 33) as usize % (i + 1));
        }
        let x = check_positive_real(&a, &b, &c, &grid).unwrap();
        let y = check_positive_real(&a, &b, &c, &shuffled).unwrap();
        prop_assert_eq!(x, y);
    }
}

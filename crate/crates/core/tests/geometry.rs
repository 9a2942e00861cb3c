use esgop_core::metrics::{fit_rate, subspace_distance};
use esgop_core::numkit::{sample_standard_normal_matrix, sym_eigen, thin_svd, DenseMatrix, RngStream};
use proptest::prelude::*;

fn random_orthonormal(seed: u64, d: usize, k: usize) -> DenseMatrix {
    let g = sample_standard_normal_matrix(&mut RngStream::new(seed, 11), d, k);
    thin_svd(&g).unwrap().u
}

fn random_symmetric(seed: u64, d: usize) -> DenseMatrix {
    let g = sample_standard_normal_matrix(&mut RngStream::new(seed, 12), d, d);
    g.add(&g.transpose()).unwrap().scaled(0.5)
}

fn min_singular(a: &DenseMatrix, b: &DenseMatrix) -> f64 {
    let s = thin_svd(&a.t_matmul(b).unwrap()).unwrap().singular_values;
    s.iter().copied().fold(f64::INFINITY, f64::min).min(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn eigen_reconstructs(seed in any::<u64>(), d in 1usize..12) {
        let a = random_symmetric(seed, d);
        let e = sym_eigen(&a).unwrap();
        let err = e.reconstruct().sub(&a).unwrap().max_abs();
        prop_assert!(err < 1e-10 * a.max_abs().max(1.0), "reconstruction {err}");
        prop_assert!(e.eigenvectors.orthonormality_defect() < 1e-10);
        prop_assert!(e.eigenvalues.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn eigen_shift(seed in any::<u64>(), d in 1usize..10, c in -5.0f64..5.0) {
        let a = random_symmetric(seed, d);
        let shifted = a.add(&DenseMatrix::identity(d).scaled(c)).unwrap();
        let (e0, e1) = (sym_eigen(&a).unwrap(), sym_eigen(&shifted).unwrap());
        for (x, y) in e0.eigenvalues.iter().zip(&e1.eigenvalues) {
            prop_assert!((x + c - y).abs() < 1e-10);
        }
    }

    #[test]
    fn distances_match_principal_angle_oracle(seed in any::<u64>(), d in 2usize..16, k in 1usize..5) {
        let k = k.min(d - 1);
        let a = random_orthonormal(seed, d, k);
        let b = random_orthonormal(seed ^ 0xabcdef, d, k);
        let r = subspace_distance(&a, &b).unwrap();
        let s = min_singular(&a, &b);
        prop_assert!((r.procrustes - (2.0 - 2.0 * s).max(0.0).sqrt()).abs() < 1e-8);
        prop_assert!((r.sin_theta - (1.0 - s * s).max(0.0).sqrt()).abs() < 1e-8);
        prop_assert!(r.sin_theta <= r.procrustes + 1e-12);
        prop_assert!(r.procrustes <= 2f64.sqrt() * r.sin_theta + 1e-12);
    }

    #[test]
    fn distances_ignore_basis_rotation(seed in any::<u64>(), d in 2usize..12, k in 1usize..4) {
        let k = k.min(d);
        let a = random_orthonormal(seed, d, k);
        let b = random_orthonormal(seed.wrapping_add(1), d, k);
        let q = random_orthonormal(seed.wrapping_add(2), k, k);
        let base = subspace_distance(&a, &b).unwrap();
        let rot = subspace_distance(&a.matmul(&q).unwrap(), &b).unwrap();
        let rot2 = subspace_distance(&a, &b.matmul(&q).unwrap()).unwrap();
        prop_assert!((base.procrustes - rot.procrustes).abs() < 1e-9);
        prop_assert!((base.sin_theta - rot.sin_theta).abs() < 1e-9);
        prop_assert!((base.procrustes - rot2.procrustes).abs() < 1e-9);
        let same = subspace_distance(&a.matmul(&q).unwrap(), &a).unwrap();
        prop_assert!(same.procrustes < 1e-9 && same.sin_theta < 1e-7);
    }

    #[test]
    fn procrustes_is_a_metric(seed in any::<u64>(), d in 2usize..10, k in 1usize..4) {
        let k = k.min(d);
        let a = random_orthonormal(seed, d, k);
        let b = random_orthonormal(seed.wrapping_add(7), d, k);
        let c = random_orthonormal(seed.wrapping_add(9), d, k);
        let dist = |x: &DenseMatrix, y: &DenseMatrix| subspace_distance(x, y).unwrap().procrustes;
        prop_assert!((dist(&a, &b) - dist(&b, &a)).abs() < 1e-9);
        prop_assert!(dist(&a, &c) <= dist(&a, &b) + dist(&b, &c) + 1e-9);
    }

    #[test]
    fn rate_fit_recovers_power_laws(c in 0.01f64..10.0, slope in -2.0f64..1.0) {
        let pts: Vec<(f64, f64)> = [1e3, 1e4, 3e4, 1e5].iter().map(|&n: &f64| (n, c * n.powf(slope))).collect();
        let fit = fit_rate(&pts).unwrap();
        prop_assert!((fit.slope - slope).abs() < 1e-9);
        prop_assert!((fit.r_squared - 1.0).abs() < 1e-9 || slope.abs() < 1e-12);
    }
}

#[test]
fn full_dimension_has_zero_sine() {
    let a = random_orthonormal(1, 4, 4);
    let b = random_orthonormal(2, 4, 4);
    let r = subspace_distance(&a, &b).unwrap();
    assert_eq!(r.sin_theta, 0.0);
    assert!(r.procrustes < 1e-9);
}

use num_complex::Complex64;
use onebit_core::montecarlo::enumerate_exact;
use onebit_core::scene::{Scene, SceneConfig};
use onebit_core::theory::gaussian_moments;
use onebit_core::ComplexMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_signature(rng: &mut ChaCha8Rng, entries: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(1, entries, |_, _| Complex64::new(rng.random_range(-1.5..1.5), rng.random_range(-1.5..1.5)))
}

fn random_beta(rng: &mut ChaCha8Rng) -> Complex64 {
    let r = rng.random::<f64>().sqrt();
    Complex64::from_polar(r, rng.random_range(0.0..std::f64::consts::TAU))
}

fn assert_moments_agree(z: &ComplexMatrix, beta: Complex64) {
    let approx = gaussian_moments(z, beta).unwrap();
    let exact = enumerate_exact(z, beta).unwrap();
    for i in 0..2 {
        assert!((approx.mean[i] - exact.mean[i]).abs() < 1e-12, "mean {i}: β={beta}");
        for j in 0..2 {
            assert!(
                (approx.covariance[i][j] - exact.covariance[i][j]).abs() < 1e-12,
                "cov {i}{j}: β={beta}"
            );
        }
    }
}

#[test]
fn closed_form_moments_equal_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for entries in 1..=3 {
        for _ in 0..20 {
            let z = random_signature(&mut rng, entries);
            let beta = random_beta(&mut rng);
            assert_moments_agree(&z, beta);
        }
    }
}

#[test]
fn lfm_scenes_agree_with_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for n in 1..=3 {
        let scene = Scene::lfm(SceneConfig::new(1, 1, n, -0.7, Complex64::new(0.0, 0.0)).unwrap()).unwrap();
        for _ in 0..20 {
            assert_moments_agree(scene.signature(), random_beta(&mut rng));
        }
    }
}

#[test]
fn two_entry_worked_example() {
    let z = ComplexMatrix::new(1, 2, vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)]).unwrap();
    assert_moments_agree(&z, Complex64::new(0.3, 0.2));
}

#[test]
fn covariance_departs_from_identity_quadratically() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let z = random_signature(&mut rng, 16);
    let dir = Complex64::new(0.6, -0.8);
    let dev = |s: f64| {
        let c = gaussian_moments(&z, dir * s).unwrap().covariance;
        ((c[0][0] - 1.0).powi(2) + (c[1][1] - 1.0).powi(2) + 2.0 * c[0][1].powi(2)).sqrt()
    };
    let (small, half) = (dev(0.02), dev(0.01));
    assert!(small > 0.0);
    let ratio = small / half;
    assert!((ratio - 4.0).abs() < 0.05, "ratio {ratio}");
}

#[test]
fn null_moments_are_standard() {
    let scene = Scene::lfm(SceneConfig::new(4, 4, 32, -1.0, Complex64::new(0.0, 0.0)).unwrap()).unwrap();
    let g = gaussian_moments(scene.signature(), Complex64::new(0.0, 0.0)).unwrap();
    assert_eq!(g.mean, [0.0, 0.0]);
    assert!((g.covariance[0][0] - 1.0).abs() < 1e-14 && (g.covariance[1][1] - 1.0).abs() < 1e-14);
    assert!(g.covariance[0][1].abs() < 1e-14);
}

use proptest::prelude::*;

use tensor_svd::ensembles::{
    diagonal_core, haar_orthonormal, make_instance, noise_tensor, rescaled_core, CoreKind, InstanceSpec, NoiseKind,
};
use tensor_svd::linalg::{mode_singular_values, signal_strength};
use tensor_svd::tensor::tucker_compose;
use tensor_svd::{Mode, RngStream, Role};

fn variance(v: &[f64]) -> f64 {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)
}

#[test]
fn haar_first_coordinate_is_centred() {
    let stream = RngStream::new(17, 0);
    let mean = (0..2000)
        .map(|i| haar_orthonormal(200, 1, &mut stream.child(i).sampler()).unwrap().matrix().get(0, 0))
        .sum::<f64>()
        / 2000.0;
    assert!(mean.abs() < 4.0 / 2000f64.sqrt(), "{mean}");
}

#[test]
fn haar_edge_cases() {
    let mut rng = RngStream::new(1, 1).sampler();
    let one = haar_orthonormal(1, 1, &mut rng).unwrap();
    assert_eq!(one.matrix().get(0, 0).abs(), 1.0);
    assert!(haar_orthonormal(3, 4, &mut rng).is_err());
    let a = haar_orthonormal(9, 3, &mut RngStream::new(4, 2).sampler()).unwrap();
    let b = haar_orthonormal(9, 3, &mut RngStream::new(4, 2).sampler()).unwrap();
    assert_eq!(a, b);
}

#[test]
fn noise_moments() {
    let mut rng = RngStream::new(2, 0).sampler();
    let g = noise_tensor([50, 40, 50], NoiseKind::standard_gaussian(), &mut rng).unwrap();
    let v = variance(g.as_slice());
    assert!((0.97..=1.03).contains(&v), "{v}");

    let u = noise_tensor([50, 40, 50], NoiseKind::Uniform, &mut rng).unwrap();
    let bound = 3f64.sqrt();
    assert!(u.as_slice().iter().all(|x| x.abs() <= bound));
    let v = variance(u.as_slice());
    assert!((0.97..=1.03).contains(&v), "{v}");
}

#[test]
fn core_examples() {
    let mut rng = RngStream::new(3, 0).role(Role::Core).sampler();
    let scalar = rescaled_core([1, 1, 1], 5.0, &mut rng).unwrap();
    assert!((scalar.get(0, 0, 0).abs() - 5.0).abs() < 1e-12);

    let s = rescaled_core([2, 2, 2], 10.0, &mut rng).unwrap();
    for mode in Mode::ALL {
        assert!(mode_singular_values(&s, mode).unwrap()[1] >= 10.0 - 1e-6);
    }

    let d = diagonal_core(3, 2.0).unwrap();
    assert!((d.frobenius_norm() - 2.0 * 3f64.sqrt()).abs() < 1e-14);
    assert_eq!(signal_strength(&d, [3, 3, 3]).unwrap(), 2.0);
    assert_eq!(diagonal_core(1, 7.0).unwrap().as_slice(), &[7.0]);
}

#[test]
fn tiny_noise_leaves_the_signal() {
    let spec = InstanceSpec {
        dims: [6, 6, 6],
        ranks: [2, 2, 2],
        lambda: 3.0,
        core: CoreKind::RescaledGaussian,
        noise: NoiseKind::Gaussian { sigma: 1e-300 },
    };
    let inst = make_instance(&spec, RngStream::new(9, 0)).unwrap();
    assert!(inst.y.max_abs_diff(&inst.x) < 1e-290);
    let zero = InstanceSpec { noise: NoiseKind::Gaussian { sigma: 0.0 }, ..spec };
    assert!(make_instance(&zero, RngStream::new(9, 0)).is_err());
    let ragged = InstanceSpec { core: CoreKind::Diagonal, ranks: [2, 3, 2], ..spec };
    assert!(make_instance(&ragged, RngStream::new(9, 0)).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn instances_meet_their_strength(
        dims in [3usize..10, 3usize..10, 3usize..10],
        r in 1usize..3,
        lambda in 0.1f64..100.0,
        seed in any::<u64>(),
        diagonal in any::<bool>(),
    ) {
        let spec = InstanceSpec {
            dims,
            ranks: [r, r, r],
            lambda,
            core: if diagonal { CoreKind::Diagonal } else { CoreKind::RescaledGaussian },
            noise: NoiseKind::Uniform,
        };
        let inst = make_instance(&spec, RngStream::new(seed, 5)).unwrap();
        prop_assert!(inst.lambda_actual >= lambda * (1.0 - 1e-8));
        // Strength read off X itself agrees with the core's.
        let full = signal_strength(&inst.x, [r, r, r]).unwrap();
        prop_assert!((full - inst.lambda_actual).abs() <= 1e-8 * lambda);
        let [u1, u2, u3] = &inst.truth.bases;
        let x = tucker_compose(&inst.truth.core, u1.matrix(), u2.matrix(), u3.matrix()).unwrap();
        prop_assert_eq!(&x, &inst.x);

        let again = make_instance(&spec, RngStream::new(seed, 5)).unwrap();
        prop_assert_eq!(again.y, inst.y);
    }
}

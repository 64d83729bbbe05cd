use capture_atlas::cubic::{
    basin_membership, classify_hyperbolic, perturb, BasinConfig, CubicParams, HyperbolicClass,
};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_disk(rng: &mut impl Rng, r: f64) -> Complex64 {
    Complex64::from_polar(r * rng.gen::<f64>().sqrt(), std::f64::consts::TAU * rng.gen::<f64>())
}

#[test]
fn critical_and_fixed_point_residuals() {
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    for _ in 0..10_000 {
        let p = CubicParams::new(random_disk(&mut rng, 10.0), random_disk(&mut rng, 10.0));
        for c in p.critical_points().as_array() {
            // 3c² + 2bc + λ, scaled by its largest term.
            let scale = p.lambda.norm() + 2.0 * p.b.norm() * c.norm() + 3.0 * c.norm_sqr();
            assert!(p.deriv(c).norm() <= 1e-13 * scale.max(1e-300), "{p:?} {c}");
        }
        for fp in p.fixed_points() {
            let z = fp.z;
            let scale = (p.lambda.norm() + 1.0) * z.norm() + p.b.norm() * z.norm_sqr() + z.norm().powi(3);
            assert!((p.eval(z) - z).norm() <= 1e-13 * scale.max(1e-300), "{p:?} {z}");
            assert!((fp.multiplier - p.deriv(z)).norm() == 0.0);
        }
    }
}

proptest! {
    #[test]
    fn perturbation_is_radial(arg in 0.0..std::f64::consts::TAU, r in 0.1f64..2.0, eps in 1e-9f64..0.999) {
        let lambda = Complex64::from_polar(r, arg);
        let q = perturb(&CubicParams::new(lambda, Complex64::new(0.3, -0.2)), eps).unwrap();
        prop_assert_eq!(q.lambda, lambda * (1.0 - eps));
        prop_assert!((q.lambda.arg() - lambda.arg()).abs() < 1e-15);
    }
}

fn coarse() -> BasinConfig {
    BasinConfig { resolution: 120, ..BasinConfig::default() }
}

#[test]
fn symmetric_slice_point_is_principal_for_every_argument() {
    for k in 0..12 {
        let lambda = Complex64::from_polar(0.5, std::f64::consts::TAU * k as f64 / 12.0);
        let r = classify_hyperbolic(&CubicParams::new(lambda, Complex64::new(0.0, 0.0)), &coarse()).unwrap();
        assert_eq!(r.class, HyperbolicClass::Principal, "{lambda}");
    }
}

#[test]
fn classification_is_invariant_under_negation() {
    // f_{λ,−b}(−z) = −f_{λ,b}(z), so the two maps are conjugate.
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..40 {
        let lambda = random_disk(&mut rng, 0.9);
        let b = random_disk(&mut rng, 2.5);
        let p = CubicParams::new(lambda, b);
        let q = CubicParams::new(lambda, -b);
        let (x, y) = (classify_hyperbolic(&p, &coarse()), classify_hyperbolic(&q, &coarse()));
        match (x, y) {
            (Ok(x), Ok(y)) => assert_eq!(x.class, y.class, "{p:?}"),
            (x, y) => assert_eq!(x.is_err(), y.is_err(), "{p:?}"),
        }
        let z = random_disk(&mut rng, 0.5);
        assert_eq!(basin_membership(&p, z, &coarse()).ok(), basin_membership(&q, -z, &coarse()).ok());
    }
}

#[test]
fn certified_disk_is_forward_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for _ in 0..200 {
        let p = CubicParams::new(random_disk(&mut rng, 0.99), random_disk(&mut rng, 5.0));
        let r = p.certified_disk_radius();
        for _ in 0..50 {
            let z = random_disk(&mut rng, r);
            assert!(p.eval(z).norm() <= (1.0 + p.lambda.norm()) / 2.0 * z.norm() * (1.0 + 1e-12));
        }
    }
}

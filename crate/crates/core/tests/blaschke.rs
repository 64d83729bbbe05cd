use capture_atlas::blaschke::{denormalize, normalize, rotation_limit_deviation, GeneralBlaschke, NormalizedBlaschke};
use num_complex::Complex64;
use proptest::prelude::*;

fn disk_point(max: f64) -> impl Strategy<Value = Complex64> {
    (0.0..1.0f64, 0.0..std::f64::consts::TAU).prop_map(move |(r, t)| Complex64::from_polar(max * r.sqrt(), t))
}

proptest! {
    #[test]
    fn contracts_inside_and_expands_outside(a in disk_point(0.999), z in disk_point(0.99), s in 1.01f64..5.0) {
        let q = NormalizedBlaschke::new(a).unwrap();
        if z.norm() > 0.0 {
            prop_assert!(q.eval(z).unwrap().norm() < z.norm());
        }
        let w = z.unscale(z.norm().max(1e-3)) * s;
        if let Ok(v) = q.eval(w) {
            prop_assert!(v.norm() > w.norm());
        }
    }

    #[test]
    fn derivative_matches_central_differences(a in disk_point(0.95), z in disk_point(0.9)) {
        let q = NormalizedBlaschke::new(a).unwrap();
        let h = 1e-6;
        let fd = (q.eval(z + h).unwrap() - q.eval(z - h).unwrap()) / (2.0 * h);
        let d = q.derivative(z).unwrap();
        prop_assert!((fd - d).norm() <= 1e-6 * d.norm().max(1e-3));
    }

    #[test]
    fn critical_point_is_critical(a in disk_point(0.999)) {
        let q = NormalizedBlaschke::new(a).unwrap();
        let c = q.critical_point_in_disk().value;
        prop_assert!(c.norm() < 1.0);
        prop_assert!(q.derivative(c).unwrap().norm() < 1e-12);
    }

    #[test]
    fn normalization_round_trips(b in disk_point(0.99), t in 0.0..std::f64::consts::TAU, z in disk_point(0.9)) {
        prop_assume!(b.norm() > 1e-3);
        let bp = GeneralBlaschke::new(b, Complex64::from_polar(1.0, t)).unwrap();
        let (q, rho) = normalize(&bp);
        let back = denormalize(&q, rho).unwrap();
        prop_assert!((back.eval(z).unwrap() - bp.eval(z).unwrap()).norm() < 1e-12);
        prop_assert!((q.a() - bp.derivative_at_zero()).norm() < 1e-12);
    }
}

#[test]
fn deviation_shrinks_toward_the_rotation() {
    let s = Complex64::from_polar(1.0, 2.0);
    let samples: Vec<Complex64> = (0..64).map(|k| Complex64::from_polar(0.8, k as f64 * 0.1)).collect();
    let devs: Vec<f64> = (1..12)
        .map(|k| rotation_limit_deviation(s * (1.0 - 0.5f64.powi(k)), s, &samples).unwrap())
        .collect();
    assert!(devs.windows(2).all(|w| w[1] < w[0]), "{devs:?}");
    assert!(rotation_limit_deviation(s, s, &samples).unwrap() < 1e-15);
    assert!(rotation_limit_deviation(s, s, &[s]).is_err());
}

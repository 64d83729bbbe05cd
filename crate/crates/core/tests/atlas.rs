use capture_atlas::atlas::{
    annulus_modulus, classify_point, palette_legend, render_slice, Annulus, AtlasConfig, Label, SliceSpec,
    CSV_HEADER, PALETTE,
};
use num_complex::Complex64;
use proptest::prelude::*;

#[test]
fn palette_matches_golden_file() {
    let golden = include_str!("data/palette.txt");
    assert_eq!(palette_legend(), golden);
    let rgb: Vec<String> = PALETTE.iter().map(|c| format!("#{:02x}{:02x}{:02x}", c[0], c[1], c[2])).collect();
    for (line, hex) in golden.lines().zip(&rgb) {
        assert!(line.contains(hex.as_str()));
    }
    let labels = [
        Label::Escape,
        Label::Principal,
        Label::IACapture(1),
        Label::IACapture(8),
        Label::OtherHyperbolic,
        Label::SiegelCaptureCandidate(1),
        Label::SiegelCaptureCandidate(8),
        Label::Unresolved,
    ];
    let idx: Vec<u8> = labels.iter().map(|l| l.palette_index()).collect();
    assert_eq!(idx, [0, 1, 2, 9, 10, 11, 18, 19]);
}

#[test]
fn slice_counts_match_snapshot() {
    let spec = SliceSpec { lambda: Complex64::new(0.5, 0.0), window: [-3.0, 3.0, -3.0, 3.0], width: 256, height: 256 };
    let r = render_slice(&spec, &AtlasConfig::for_slices(), None).unwrap();
    let counts = serde_json::to_string_pretty(&r.counts()).unwrap();
    assert_eq!(counts.trim(), include_str!("data/slice_lambda_0.5_counts.json").trim());
    assert!(r.csv.starts_with(&format!("{CSV_HEADER}\n")));
    assert_eq!(r.csv.lines().count(), 256 * 256 + 1);
    // Row 0 is the top of the window.
    let first = r.csv.lines().nth(1).unwrap();
    assert!(first.starts_with("-2.98828125000000000e0,2.98828125000000000e0,"), "{first}");
    let center = &r.pixels[128 * 256 + 128];
    assert_eq!(center.label, Label::Principal);
}

#[test]
fn superattracting_slice_center_is_principal() {
    let spec = SliceSpec { lambda: Complex64::new(0.0, 0.0), window: [-1.0, 1.0, -1.0, 1.0], width: 3, height: 3 };
    let r = render_slice(&spec, &AtlasConfig::for_slices(), Some(2)).unwrap();
    assert_eq!(r.pixels[4].b, Complex64::new(0.0, 0.0));
    assert_eq!(r.pixels[4].label, Label::Principal);
}

#[test]
fn write_reports_missing_directory() {
    let spec = SliceSpec { lambda: Complex64::new(0.5, 0.0), window: [-1.0, 1.0, -1.0, 1.0], width: 2, height: 2 };
    let r = render_slice(&spec, &AtlasConfig::for_slices(), Some(1)).unwrap();
    let dir = tempfile::tempdir().unwrap();
    r.write(&dir.path().join("ok")).unwrap();
    assert!(dir.path().join("ok.png").exists() && dir.path().join("ok.csv").exists());
    let err = r.write(&dir.path().join("missing/sub/out")).unwrap_err();
    assert!(err.to_string().contains("missing"), "{err}");
}

#[test]
fn classification_is_pure_across_threads() {
    let cfg = AtlasConfig::default();
    let points = [(0.5, 0.0, 0.3, 0.1), (0.2, 0.7, -1.0, 0.8), (0.6, -0.1, 0.0, 2.24), (0.0, 0.0, 1.5, 0.0)];
    let serial: Vec<String> = points
        .iter()
        .map(|&(a, b, c, d)| serde_json::to_string(&classify_point(Complex64::new(a, b), Complex64::new(c, d), &cfg)).unwrap())
        .collect();
    let threaded: Vec<String> = std::thread::scope(|s| {
        let hs: Vec<_> = points
            .iter()
            .map(|&(a, b, c, d)| {
                let cfg = &cfg;
                s.spawn(move || {
                    serde_json::to_string(&classify_point(Complex64::new(a, b), Complex64::new(c, d), cfg)).unwrap()
                })
            })
            .collect();
        hs.into_iter().map(|h| h.join().unwrap()).collect()
    });
    assert_eq!(serial, threaded);
}

#[test]
fn siegel_label_needs_unit_multiplier() {
    let cfg = AtlasConfig::default();
    let theta = (5f64.sqrt() - 1.0) / 2.0;
    let near = Complex64::from_polar(1.0 - 1e-6, std::f64::consts::TAU * theta);
    let c = classify_point(near, Complex64::new(0.1, 0.1), &cfg);
    assert!(!matches!(c.label, Label::SiegelCaptureCandidate(_)));
    let rational = Complex64::from_polar(1.0, std::f64::consts::TAU * 0.25);
    assert_eq!(classify_point(rational, Complex64::new(0.1, 0.1), &cfg).label, Label::Unresolved);
}

proptest! {
    #[test]
    fn nested_round_annuli_have_smaller_modulus(r in 0.01f64..10.0, a in 1.0f64..5.0, b in 1.001f64..5.0, c in 1.0f64..5.0) {
        let inner = Annulus::new(r * a, r * a * b).unwrap();
        let outer = Annulus::new(r, r * a * b * c).unwrap();
        prop_assert!(outer.contains_annulus(&inner));
        prop_assert!(annulus_modulus(&inner) <= annulus_modulus(&outer));
    }

    #[test]
    fn modulus_is_scale_invariant(r in 0.01f64..10.0, ratio in 1.001f64..1e6, k in 1e-6f64..1e6) {
        let m0 = annulus_modulus(&Annulus::new(r, r * ratio).unwrap());
        let m1 = annulus_modulus(&Annulus::new(k * r, k * r * ratio).unwrap());
        prop_assert!((m0 - m1).abs() <= 1e-12 * m0.max(1e-3));
    }
}

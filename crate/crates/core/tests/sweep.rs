use incidence_core::geom::AnalyzerConfig;
use incidence_core::structure::SlopeWindow;
use incidence_core::sweep::*;

fn spec(kind: Kind, alpha: f64, sizes: Vec<u64>, fit_target: FitTarget) -> SweepSpec {
    SweepSpec { kind, alpha, sizes, fit_target, k: 4, window: SlopeWindow::default() }
}

#[test]
fn erdos_incidence_exponent() {
    let s = spec(Kind::Erdos, 0.5, vec![1 << 12, 1 << 15, 1 << 18], FitTarget::Incidence);
    let r = run_sweep(&s, &AnalyzerConfig::default()).unwrap();
    assert!((1.25..=1.42).contains(&r.fit.exponent), "exponent {}", r.fit.exponent);
    assert!((0.0..=1.0).contains(&r.fit.r_squared));
    assert_eq!(r.fit.points.len(), 3);
    assert!(r.sizes.windows(2).all(|p| p[0].n < p[1].n));
}

#[test]
fn elekes_sweep_counts_r_to_the_fourth() {
    let s = spec(Kind::Elekes, 0.4, vec![128, 1024, 8192], FitTarget::Incidence);
    let r = run_sweep(&s, &AnalyzerConfig::default()).unwrap();
    for p in &r.sizes {
        assert_eq!(p.incidences, p.grid.w.pow(4));
    }
}

#[test]
fn failing_size_is_reported() {
    let s = spec(Kind::General, 0.34, vec![8, 64, 512], FitTarget::Incidence);
    let e = run_sweep(&s, &AnalyzerConfig::default()).unwrap_err();
    assert_eq!(e.kind(), "invalid-argument");
    assert!(e.to_string().contains("N = 8"), "{e}");
}

#[test]
fn reports_are_reproducible() {
    let s = spec(Kind::General, 0.4, vec![512, 4096, 32768], FitTarget::FamilySize);
    let cfg = AnalyzerConfig::default();
    let (a, b) = (run_sweep(&s, &cfg).unwrap(), run_sweep(&s, &cfg).unwrap());
    for fmt in ["json", "csv", "svg-loglog"] {
        assert_eq!(emit_report(&a, fmt).unwrap(), emit_report(&b, fmt).unwrap());
    }
    let json: serde_json::Value = serde_json::from_slice(&emit_report(&a, "json").unwrap()).unwrap();
    assert_eq!(json["spec"]["fit_target"], "family_size");
    assert_eq!(json["sizes"].as_array().unwrap().len(), 3);
}

//! Parameter sweeps over construction sizes, log-log exponent fits and
//! report serialization.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::construct::{construct_elekes, construct_erdos, construct_general_alpha, ConstructManifest, Construction};
use crate::error::{Error, Result};
use crate::geom::{AnalyzerConfig, GridSpec};
use crate::structure::{verify_lattice_structure, SlopeWindow, StructureReport};

/// Fits whose `r²` falls below this are refit without the smallest size.
pub const MIN_R_SQUARED: f64 = 0.95;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    General,
    Erdos,
    Elekes,
}

impl FromStr for Kind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Kind> {
        match s {
            "general" => Ok(Kind::General),
            "erdos" => Ok(Kind::Erdos),
            "elekes" => Ok(Kind::Elekes),
            _ => Err(Error::invalid(format!("unknown construction kind {s:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FitTarget {
    Incidence,
    RichSlopes,
    FamilySize,
    Energy,
}

impl FitTarget {
    pub const ALL: [FitTarget; 4] = [FitTarget::Incidence, FitTarget::RichSlopes, FitTarget::FamilySize, FitTarget::Energy];

    pub fn name(self) -> &'static str {
        match self {
            FitTarget::Incidence => "incidence",
            FitTarget::RichSlopes => "rich_slopes",
            FitTarget::FamilySize => "family_size",
            FitTarget::Energy => "energy",
        }
    }
}

impl FromStr for FitTarget {
    type Err = Error;
    fn from_str(s: &str) -> Result<FitTarget> {
        FitTarget::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| Error::invalid(format!("unknown fit target {s:?}")))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepSpec {
    pub kind: Kind,
    pub alpha: f64,
    pub sizes: Vec<u64>,
    pub fit_target: FitTarget,
    pub k: u64,
    pub window: SlopeWindow,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.sizes.len() < 3 {
            return Err(Error::invalid("a sweep needs at least three sizes"));
        }
        if self.sizes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid("sweep sizes must be strictly increasing"));
        }
        if self.sizes[0] < 4 {
            return Err(Error::invalid("sweep sizes must be at least 4"));
        }
        if self.kind == Kind::General && !(self.alpha > 1.0 / 3.0 && self.alpha <= 0.5) {
            return Err(Error::invalid(format!("alpha {} outside (1/3, 1/2]", self.alpha)));
        }
        if self.k == 0 {
            return Err(Error::invalid("properness constant k must be at least 1"));
        }
        Ok(())
    }

    /// Grid realizing the target size: `w = round(N^α)`, `h = max(w, round(N/w))`
    /// (square for the Erdős kind, `[r] × [2r²]` with `r = round((N/2)^{1/3})`
    /// for the Elekes kind).
    pub fn grid_for(&self, n: u64) -> Result<GridSpec> {
        match self.kind {
            Kind::General => {
                let w = ((n as f64).powf(self.alpha).round() as u64).max(1);
                GridSpec::new(w, ((n as f64 / w as f64).round() as u64).max(w))
            }
            Kind::Erdos => {
                let m = ((n as f64).sqrt().round() as u64).max(2);
                GridSpec::new(m, m)
            }
            Kind::Elekes => {
                let r = ((n as f64 / 2.0).cbrt().round() as u64).max(1);
                GridSpec::new(r, 2 * r * r)
            }
        }
    }

    pub fn construct(&self, n: u64) -> Result<Construction> {
        let g = self.grid_for(n)?;
        match self.kind {
            Kind::General => construct_general_alpha(&g, &self.window, self.k, Some(g.n())),
            Kind::Erdos => construct_erdos(g.w, &self.window, self.k, Some(g.n())),
            Kind::Elekes => construct_elekes(g.w),
        }
    }
}

/// Least-squares line through `(log N, log value)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FitResult {
    pub exponent: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub points: Vec<(f64, f64)>,
    /// Sizes left out by the refit rule.
    pub dropped: Vec<u64>,
}

fn least_squares(points: &[(f64, f64)]) -> (f64, f64, f64) {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = points.iter().map(|p| (p.1 - my).powi(2)).sum();
    let slope = if sxx == 0.0 { 0.0 } else { sxy / sxx };
    let intercept = my - slope * mx;
    let r2 = if syy == 0.0 || sxx == 0.0 { 1.0 } else { (sxy * sxy / (sxx * syy)).clamp(0.0, 1.0) };
    (slope, intercept, r2)
}

/// Fits `log value = exponent·log n + intercept`. When `r² < 0.95` the
/// smallest size is dropped once and the fit repeated.
pub fn fit_exponent(ns: &[u64], values: &[f64]) -> Result<FitResult> {
    if ns.len() != values.len() || ns.len() < 2 {
        return Err(Error::invalid("a fit needs at least two (n, value) pairs"));
    }
    for (&n, &v) in ns.iter().zip(values) {
        if !(v > 0.0) || n < 2 {
            return Err(Error::invalid(format!("cannot fit value {v} at n = {n} on a log scale")));
        }
    }
    let points: Vec<(f64, f64)> = ns.iter().zip(values).map(|(&n, &v)| ((n as f64).ln(), v.ln())).collect();
    let (e, c, r2) = least_squares(&points);
    if r2 < MIN_R_SQUARED && points.len() > 2 {
        let (e2, c2, r2b) = least_squares(&points[1..]);
        return Ok(FitResult { exponent: e2, intercept: c2, r_squared: r2b, points, dropped: vec![ns[0]] });
    }
    Ok(FitResult { exponent: e, intercept: c, r_squared: r2, points, dropped: Vec::new() })
}

/// Measurements at one sweep size.
#[derive(Clone, Debug, Serialize)]
pub struct SizePoint {
    pub target_n: u64,
    pub n: u64,
    pub grid: GridSpec,
    pub n_lines: usize,
    pub incidences: u64,
    pub rich_slopes: usize,
    pub median_family_size: usize,
    pub max_parallel: usize,
    pub max_concurrent: usize,
    pub slope_set_match: Option<f64>,
    pub intercepts_within_set: Option<f64>,
    pub slope_mult_energy: u64,
    pub value: f64,
    pub manifest: ConstructManifest,
}

impl SizePoint {
    pub fn metric(&self, target: FitTarget) -> f64 {
        match target {
            FitTarget::Incidence => self.incidences as f64,
            FitTarget::RichSlopes => self.rich_slopes as f64,
            FitTarget::FamilySize => self.median_family_size as f64,
            FitTarget::Energy => self.slope_mult_energy as f64,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepReport {
    pub spec: SweepSpec,
    pub sizes: Vec<SizePoint>,
    pub fit: FitResult,
    /// Fits of every target that has positive values at all sizes.
    pub fits: BTreeMap<String, FitResult>,
}

fn at_size(e: Error, n: u64) -> Error {
    match e {
        Error::InvalidArgument(m) => Error::InvalidArgument(format!("N = {n}: {m}")),
        Error::ResourceLimit(m) => Error::ResourceLimit(format!("N = {n}: {m}")),
        Error::Parse(m) => Error::Parse(format!("N = {n}: {m}")),
        other => other,
    }
}

/// Builds, counts and analyzes one size.
pub fn measure(spec: &SweepSpec, n: u64, cfg: &AnalyzerConfig) -> Result<(SizePoint, StructureReport)> {
    let c = spec.construct(n).map_err(|e| at_size(e, n))?;
    let g = c.manifest.grid;
    let r = verify_lattice_structure(&g, &c.lines, cfg, &spec.window).map_err(|e| at_size(e, n))?;
    let mut point = SizePoint {
        target_n: n,
        n: g.n(),
        grid: g,
        n_lines: c.lines.len(),
        incidences: r.incidences,
        rich_slopes: r.rich_slopes,
        median_family_size: r.median_family_size,
        max_parallel: r.max_parallel,
        max_concurrent: r.max_concurrent,
        slope_set_match: r.slope_set_match,
        intercepts_within_set: r.intercepts_within_set,
        slope_mult_energy: r.slope_mult_energy,
        value: 0.0,
        manifest: c.manifest,
    };
    point.value = point.metric(spec.fit_target);
    Ok((point, r))
}

/// Runs every size (in parallel), then fits each target across sizes.
pub fn run_sweep(spec: &SweepSpec, cfg: &AnalyzerConfig) -> Result<SweepReport> {
    spec.validate()?;
    let cfg = AnalyzerConfig { k: spec.k, ..cfg.clone() };
    let sizes: Vec<SizePoint> = spec
        .sizes
        .par_iter()
        .map(|&n| measure(spec, n, &cfg).map(|(p, _)| p))
        .collect::<Result<_>>()?;
    let ns: Vec<u64> = sizes.iter().map(|p| p.n).collect();
    let mut fits = BTreeMap::new();
    for t in FitTarget::ALL {
        let vals: Vec<f64> = sizes.iter().map(|p| p.metric(t)).collect();
        if let Ok(f) = fit_exponent(&ns, &vals) {
            fits.insert(t.name().to_string(), f);
        }
    }
    let fit = fit_exponent(&ns, &sizes.iter().map(|p| p.value).collect::<Vec<_>>())?;
    Ok(SweepReport { spec: spec.clone(), sizes, fit, fits })
}

/// Deterministic JSON with sorted keys.
pub fn to_sorted_json<T: Serialize>(value: &T) -> Result<String> {
    let v = serde_json::to_value(value).map_err(|e| Error::invalid(format!("serialization failed: {e}")))?;
    let mut s = serde_json::to_string_pretty(&v).map_err(|e| Error::invalid(format!("serialization failed: {e}")))?;
    s.push('\n');
    Ok(s)
}

/// Serializes a sweep as `json`, `csv` (`n,value,log_n,log_value`) or a
/// standalone `svg-loglog` plot of the points and the fitted line.
pub fn emit_report(report: &SweepReport, format: &str) -> Result<Vec<u8>> {
    match format {
        "json" => Ok(to_sorted_json(report)?.into_bytes()),
        "csv" => {
            let mut out = String::from("n,value,log_n,log_value\n");
            for p in &report.sizes {
                let _ = writeln!(out, "{},{},{:.9},{:.9}", p.n, p.value, (p.n as f64).ln(), p.value.ln());
            }
            Ok(out.into_bytes())
        }
        "svg-loglog" => Ok(svg_loglog(report).into_bytes()),
        _ => Err(Error::invalid(format!("unknown report format {format:?}, expected json|csv|svg-loglog"))),
    }
}

fn svg_loglog(report: &SweepReport) -> String {
    const W: f64 = 640.0;
    const H: f64 = 480.0;
    const PAD: f64 = 60.0;
    let pts = &report.fit.points;
    let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for &(x, y) in pts {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    let span = |a: f64, b: f64| if b > a { b - a } else { 1.0 };
    let (sx, sy) = (span(x0, x1), span(y0, y1));
    let px = |x: f64| PAD + (x - x0) / sx * (W - 2.0 * PAD);
    let py = |y: f64| H - PAD - (y - y0) / sy * (H - 2.0 * PAD);
    let f = &report.fit;
    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#);
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<line x1="{PAD}" y1="{}" x2="{}" y2="{}" stroke="black"/>"#,
        H - PAD,
        W - PAD,
        H - PAD
    );
    let _ = writeln!(s, r#"<line x1="{PAD}" y1="{PAD}" x2="{PAD}" y2="{}" stroke="black"/>"#, H - PAD);
    let _ = writeln!(
        s,
        r#"<line class="fit" x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}" stroke="steelblue"/>"#,
        px(x0),
        py(f.exponent * x0 + f.intercept),
        px(x1),
        py(f.exponent * x1 + f.intercept)
    );
    for &(x, y) in pts {
        let _ = writeln!(s, r#"<circle class="point" cx="{:.3}" cy="{:.3}" r="4" fill="crimson"/>"#, px(x), py(y));
    }
    let _ = writeln!(
        s,
        r#"<text x="{PAD}" y="30" font-family="monospace" font-size="14">{}: exponent {:.4}, r2 {:.4}</text>"#,
        report.spec.fit_target.name(),
        f.exponent,
        f.r_squared
    );
    let _ = writeln!(s, r#"<text x="{}" y="{}" font-family="monospace" font-size="12">log N</text>"#, W / 2.0, H - 20.0);
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(sizes: Vec<u64>) -> SweepSpec {
        SweepSpec {
            kind: Kind::General,
            alpha: 0.4,
            sizes,
            fit_target: FitTarget::Incidence,
            k: 4,
            window: SlopeWindow::default(),
        }
    }

    #[test]
    fn exact_power_law_fit() {
        let ns = [8u64, 64, 512, 4096];
        let vals: Vec<f64> = ns.iter().map(|&n| 3.0 * (n as f64).powf(4.0 / 3.0)).collect();
        let f = fit_exponent(&ns, &vals).unwrap();
        assert!((f.exponent - 4.0 / 3.0).abs() < 1e-9);
        assert!((f.intercept - 3f64.ln()).abs() < 1e-9);
        assert!(f.r_squared > 0.999_999);
        assert!(f.dropped.is_empty());
        assert!(fit_exponent(&ns, &[1.0, 0.0, 2.0, 3.0]).is_err());
    }

    #[test]
    fn noisy_first_point_is_dropped() {
        let ns = [10u64, 100, 1000, 10000];
        let vals = [500.0, 100.0, 1000.0, 10000.0];
        let f = fit_exponent(&ns, &vals).unwrap();
        assert_eq!(f.dropped, vec![10]);
        assert!((f.exponent - 1.0).abs() < 1e-9);
    }

    #[test]
    fn spec_validation() {
        assert!(spec(vec![64, 512]).validate().is_err());
        assert!(spec(vec![512, 64, 4096]).validate().is_err());
        assert!(SweepSpec { alpha: 0.7, ..spec(vec![64, 512, 4096]) }.validate().is_err());
        assert!(spec(vec![64, 512, 4096]).validate().is_ok());
    }

    #[test]
    fn small_sweep_reports() {
        let s = SweepSpec { kind: Kind::Erdos, ..spec(vec![256, 1024, 4096]) };
        let r = run_sweep(&s, &AnalyzerConfig::default()).unwrap();
        assert_eq!(r.sizes.len(), 3);
        let json = emit_report(&r, "json").unwrap();
        assert_eq!(json, emit_report(&r, "json").unwrap());
        let csv = String::from_utf8(emit_report(&r, "csv").unwrap()).unwrap();
        assert!(csv.starts_with("n,value,log_n,log_value\n"));
        assert_eq!(csv.lines().count(), 4);
        let svg = String::from_utf8(emit_report(&r, "svg-loglog").unwrap()).unwrap();
        assert_eq!(svg.matches("<circle").count(), 3);
        assert!(emit_report(&r, "pdf").is_err());
    }

    #[test]
    fn sorted_json_keys() {
        #[derive(Serialize)]
        struct T {
            zeta: u8,
            alpha: u8,
        }
        let s = to_sorted_json(&T { zeta: 1, alpha: 2 }).unwrap();
        assert!(s.find("alpha").unwrap() < s.find("zeta").unwrap());
    }
}

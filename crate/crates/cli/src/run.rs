use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use families::{
    blowup_constant, brieskorn_pham_analyze, build_elliptic_model, build_p1_fs, build_p1_fs_with_primes, build_p2_blowup_family,
    elliptic_faltings_height, faltings_height_from_periods, faltings_to_hk, BrieskornPhamSpec, EllipticCurveData, FamilyId,
};
use heightnum::{q_to_f64, HeightValue};
use isect::{
    aubin_i_rel, aubin_j_rel, arakelov_calabi, arakelov_energy, energy_rel, entropy_rel, load_model, model_to_json, modular_height,
    na_calabi, na_scalar_curvature, normalized_df, relative_modular_height, ricci_energy_rel, slope_semistability_test,
    IntersectionModel, ModelPair,
};
use metrics::{load_potential, metric_change_pair, scalar_curvature_l2, FiberGeometry};
use quantized::{
    balanced_iterate, default_grid, dequantization_scan, fs_gram_closed_form, hilbert_samuel_residual,
    hilbert_samuel_residual_without_log, scan_to_csv, tail_fit, VolumeConvention,
};
use serde::Serialize;

use crate::config::{BalancedConfig, BpConfig, ComputeConfig, FaltingsConfig, ScanConfig, ScanKind, Source, ValidateConfig};
use crate::{CliError, Outcome, Report};

/// Latitudes of the grid used for the Fubini–Study archimedean Calabi term.
const ARCH_GRID: usize = 64;

fn finite(name: &str, x: f64) -> Result<f64, CliError> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(CliError::Numeric(format!("NonFinite: {name} evaluated to {x}")))
    }
}

fn finite_height(name: &str, h: HeightValue) -> Result<HeightValue, CliError> {
    finite(name, h.evaluate())?;
    Ok(h)
}

fn csv_string<T: Serialize>(rows: &[T]) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(vec![]);
    for r in rows {
        w.serialize(r).map_err(|e| CliError::Validation(format!("Io: {e}")))?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Validation(format!("Io: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf8"))
}

fn json_string<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("serializes") + "\n"
}

struct Subject {
    label: String,
    family: Option<FamilyId>,
    model: IntersectionModel,
    pair: ModelPair,
    /// the pair has a genuine reference (not the diagonal)
    has_reference: bool,
    /// (1/n²)∫S² ω^n when the archimedean metric is known on a grid
    arch: Option<f64>,
    primes: Vec<u64>,
}

fn fs_arch_term() -> Result<f64, CliError> {
    let g = FiberGeometry::sphere(ARCH_GRID, 2 * ARCH_GRID, 1)?;
    Ok(scalar_curvature_l2(&g, &vec![1.0; g.len()])?)
}

fn with_potential(mut s: Subject, potential: Option<&PathBuf>) -> Result<Subject, CliError> {
    let Some(path) = potential else { return Ok(s) };
    if s.has_reference {
        return Err(CliError::Validation(format!("GeometryMismatch: {} already carries a metric pair; --potential is not accepted", s.label)));
    }
    let phi = load_potential(path)?;
    phi.check_kahler()?;
    let pair = metric_change_pair(&s.model, &phi)?;
    let n2 = (s.model.n * s.model.n) as f64;
    s.arch = Some(scalar_curvature_l2(phi.geometry(), phi.density())? / n2);
    s.model = pair.model.clone();
    s.pair = pair;
    s.has_reference = true;
    Ok(s)
}

fn plain(label: String, family: Option<FamilyId>, model: IntersectionModel, arch: Option<f64>) -> Result<Subject, CliError> {
    let pair = ModelPair::diagonal(&model)?;
    let primes: Vec<u64> = model.fibers.iter().map(|f| f.prime).collect::<BTreeSet<_>>().into_iter().collect();
    Ok(Subject { label, family, model, pair, has_reference: false, arch, primes })
}

fn subject(c: &ComputeConfig) -> Result<Subject, CliError> {
    let s = match &c.source {
        Source::Model(path) => plain(path.display().to_string(), None, load_model(path)?, None)?,
        Source::Family(FamilyId::P1Fs) => {
            let p = match &c.primes {
                Some(ps) => build_p1_fs_with_primes(ps)?,
                None => build_p1_fs(),
            };
            plain("p1-fs".into(), Some(FamilyId::P1Fs), p.model, Some(fs_arch_term()?))?
        }
        Source::Family(FamilyId::Elliptic) => {
            let e = EllipticCurveData::from_coefficients(c.curve)?;
            // flat metric: S = 0
            plain("elliptic".into(), Some(FamilyId::Elliptic), build_elliptic_model(&e, c.degree)?, Some(0.0))?
        }
        Source::Family(FamilyId::P2Blowup) => {
            let primes = c.primes.clone().unwrap_or_else(|| vec![2, 3]);
            let fam = build_p2_blowup_family(&primes)?;
            Subject {
                label: "p2-blowup".into(),
                family: Some(FamilyId::P2Blowup),
                model: fam.blown,
                pair: fam.pair,
                has_reference: true,
                arch: None,
                primes,
            }
        }
        Source::Family(FamilyId::BrieskornPham) => {
            return Err(CliError::Validation(
                "UnsupportedFamily: brieskorn-pham has no intersection model; use `heights bp`".into(),
            ))
        }
    };
    with_potential(s, c.potential.as_ref())
}

pub fn run_compute(c: &ComputeConfig) -> Result<Outcome, CliError> {
    let s = subject(c)?;
    if c.relative_to_base && !s.has_reference {
        return Err(CliError::Validation(format!(
            "NoReference: --relative-to base needs a family pair (p2-blowup) or --potential; {} has neither",
            s.label
        )));
    }
    let mut report = Report::new("compute");
    report.text("source", s.label.clone());
    for f in &c.functionals {
        match f.as_str() {
            "hk" if c.relative_to_base => {
                let d = finite_height("hk_rel", relative_modular_height(&s.pair.model, &s.pair.reference)?)?;
                report.height("hk_rel", &d);
                if s.family == Some(FamilyId::P2Blowup) {
                    match blowup_constant(&d, &s.primes) {
                        Some(k) => report.exact("c", k.to_string(), q_to_f64(&k)),
                        None => report.text("c", "difference is not a multiple of Σ log p"),
                    }
                }
            }
            "hk" => report.height("hk", &finite_height("hk", modular_height(&s.model)?)?),
            "energy" if c.relative_to_base => report.height("energy_rel", &finite_height("energy_rel", energy_rel(&s.pair)?)?),
            "energy" => report.height("energy", &finite_height("energy", arakelov_energy(&s.model)?)?),
            "ricci" => report.height("ricci", &finite_height("ricci", ricci_energy_rel(&s.pair)?)?),
            "entropy" => report.height("entropy", &finite_height("entropy", entropy_rel(&s.pair)?)?),
            "I" => report.height("I", &finite_height("I", aubin_i_rel(&s.pair)?)?),
            "J" => report.height("J", &finite_height("J", aubin_j_rel(&s.pair)?)?),
            "snA" => {
                for p in &s.primes {
                    for (comp, v) in na_scalar_curvature(&s.model, *p)? {
                        report.exact(&format!("snA[{p}:{comp}]"), v.to_string(), q_to_f64(&v));
                    }
                }
            }
            "ndf" => report.height("ndf", &finite_height("ndf", normalized_df(&s.model, c.cover_degree)?)?),
            "calabi" => {
                let na = na_calabi(&s.model, &s.primes)?;
                report.exact("calabi_na", na.to_string(), q_to_f64(&na));
                match s.arch {
                    Some(a) => report.number("calabi", finite("calabi", arakelov_calabi(&s.model, &s.primes, a)?)?),
                    None => report.text("calabi", "no archimedean metric on a grid for this source"),
                }
            }
            "slope" => {
                let r = slope_semistability_test(&s.model)?;
                report.exact("slope_lhs", r.lhs.to_string(), q_to_f64(&r.lhs));
                report.exact("slope_rhs", r.rhs.to_string(), q_to_f64(&r.rhs));
                report.text("slope_verdict", format!("{:?}", r.verdict));
            }
            other => unreachable!("functional {other} passed validation"),
        }
    }
    let files = c.dump_model.iter().map(|p| (p.clone(), model_to_json(&s.model))).collect();
    Ok(Outcome { report, files, stdout_override: None })
}

fn scan_model(source: &Source) -> Result<IntersectionModel, CliError> {
    match source {
        Source::Model(p) => Ok(load_model(p)?),
        Source::Family(FamilyId::P1Fs) => Ok(build_p1_fs().model),
        Source::Family(other) => Err(CliError::Validation(format!("UnsupportedFamily: scans are implemented for p1-fs, not {other:?}"))),
    }
}

fn fit_path(out: &Path) -> PathBuf {
    out.with_extension("fit.json")
}

#[derive(Serialize)]
struct DequantizationFit {
    kind: &'static str,
    m_max: u32,
    constant: f64,
    log_slope: f64,
    inv_m: f64,
    log_over_m: f64,
    hk: f64,
    hk_over_4: f64,
}

#[derive(Serialize)]
struct HsRow {
    m: u32,
    residual: f64,
    residual_over_m: f64,
    residual_without_log: f64,
}

#[derive(Serialize)]
struct HsFit {
    kind: &'static str,
    m_max: u32,
    residual_over_m_at_max: f64,
    tail_monotone: bool,
    /// −s from the tail fit of the residual without m·log m, divided by m
    log_slope: f64,
    fit: [f64; 4],
}

pub fn run_scan(c: &ScanConfig) -> Result<Outcome, CliError> {
    if c.m_max == 0 {
        return Err(CliError::Validation("InvalidArgument: m_max must be positive".into()));
    }
    let model = scan_model(&c.source)?;
    let mut report = Report::new("scan");
    let (csv, fit_json) = match c.kind {
        ScanKind::Dequantization => {
            let res = dequantization_scan(&model, c.m_max)?;
            let hk = finite("hk", modular_height(&model)?.evaluate())?;
            let f = &res.fit;
            for (k, v) in [("constant", f.constant), ("log_slope", f.log_slope), ("inv_m", f.inv_m), ("log_over_m", f.log_over_m)] {
                finite(k, v)?;
            }
            report.number("m_max", c.m_max as f64);
            report.number("constant", f.constant);
            report.number("log_slope", f.log_slope);
            report.number("inv_m", f.inv_m);
            report.number("log_over_m", f.log_over_m);
            report.number("hk_over_4", hk / 4.0);
            let fit = DequantizationFit {
                kind: "dequantization",
                m_max: f.m_max,
                constant: f.constant,
                log_slope: f.log_slope,
                inv_m: f.inv_m,
                log_over_m: f.log_over_m,
                hk,
                hk_over_4: hk / 4.0,
            };
            (scan_to_csv(&res.rows), json_string(&fit))
        }
        ScanKind::HilbertSamuel => {
            let with_log = hilbert_samuel_residual(&model, c.m_max)?;
            let without = hilbert_samuel_residual_without_log(&model, c.m_max)?;
            let rows: Vec<HsRow> = with_log
                .iter()
                .zip(&without)
                .map(|((m, r), (_, r0))| HsRow { m: *m, residual: *r, residual_over_m: r / *m as f64, residual_without_log: *r0 })
                .collect();
            let per_m: Vec<(u32, f64)> = without.iter().map(|(m, v)| (*m, v / *m as f64)).collect();
            let fit = tail_fit(&per_m, c.m_max)?;
            let tail: Vec<f64> = rows.iter().filter(|r| r.m >= c.m_max / 2).map(|r| r.residual_over_m.abs()).collect();
            let tail_monotone = tail.windows(2).all(|w| w[1] <= w[0]);
            let last = finite("residual", rows.last().expect("m_max ≥ 1").residual_over_m)?;
            report.number("m_max", c.m_max as f64);
            report.number("residual_over_m_at_max", last);
            report.text("tail_monotone", tail_monotone.to_string());
            report.number("log_slope", -fit[1]);
            let fit = HsFit { kind: "hilbert-samuel", m_max: c.m_max, residual_over_m_at_max: last, tail_monotone, log_slope: -fit[1], fit };
            (csv_string(&rows)?, json_string(&fit))
        }
    };
    let mut files = Vec::new();
    let mut stdout_override = None;
    match &c.out {
        Some(out) => {
            files.push((out.clone(), csv));
            files.push((c.fit_out.clone().unwrap_or_else(|| fit_path(out)), fit_json));
        }
        None => {
            stdout_override = Some(csv);
            if let Some(p) = &c.fit_out {
                files.push((p.clone(), fit_json));
            }
        }
    }
    Ok(Outcome { report, files, stdout_override })
}

#[derive(Serialize)]
struct BalancedCsvRow {
    iteration: usize,
    distance: Option<f64>,
    ext_chow: f64,
    converged: bool,
}

pub fn run_balanced(c: &BalancedConfig) -> Result<Outcome, CliError> {
    if !(c.tol > 0.0) {
        return Err(CliError::Validation(format!("NonPositiveTolerance: tol = {} must be > 0", c.tol)));
    }
    let base = build_p1_fs().model;
    let mut g0 = fs_gram_closed_form(c.m, VolumeConvention::MOmega);
    let m = c.m as usize;
    g0.gram[(0, 0)] *= 1.0 + c.perturb;
    g0.gram[(m, m)] *= 1.0 + c.perturb;
    let grid = match c.grid {
        Some(n) => FiberGeometry::sphere(n, 2 * n, 1)?,
        None => default_grid(c.m),
    };
    let run = balanced_iterate(&g0, c.tol, c.max_iter, &base, &grid)?;
    let rows: Vec<BalancedCsvRow> = run
        .trace
        .iter()
        .map(|r| BalancedCsvRow {
            iteration: r.iteration,
            distance: r.distance.is_finite().then_some(r.distance),
            ext_chow: r.ext_chow,
            converged: run.converged,
        })
        .collect();
    for r in &rows {
        finite("ext_chow", r.ext_chow)?;
    }
    let first = rows.first().expect("trace has the initial row").ext_chow;
    let last = rows.last().expect("trace has the initial row").ext_chow;
    let monotone = rows.windows(2).all(|w| w[1].ext_chow <= w[0].ext_chow + 1e-12 * w[0].ext_chow.abs().max(1.0));
    let mut report = Report::new("balanced");
    report.number("m", c.m as f64);
    report.number("perturb", c.perturb);
    report.number("iterations", run.iterations as f64);
    report.text("converged", run.converged.to_string());
    if let Some(d) = rows.last().and_then(|r| r.distance) {
        report.number("final_distance", d);
    }
    report.number("ext_chow_initial", first);
    report.number("ext_chow_final", last);
    report.text("ext_chow_non_increasing", monotone.to_string());
    let csv = csv_string(&rows)?;
    let (files, stdout_override) = match &c.out {
        Some(p) => (vec![(p.clone(), csv)], None),
        None => (vec![], Some(csv)),
    };
    Ok(Outcome { report, files, stdout_override })
}

pub fn run_bp(c: &BpConfig) -> Result<Outcome, CliError> {
    let spec = BrieskornPhamSpec::new(c.weights.clone(), c.prime)?;
    let r = brieskorn_pham_analyze(&spec)?;
    let mut report = Report::new("bp");
    let join = |v: &[u32]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
    report.text("weights", join(&r.weights));
    report.number("prime", r.prime as f64);
    report.text("exponents", r.exponents.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","));
    report.text("chart", format!("1/{}({})", r.chart_order, join(&r.chart_weights)));
    report.exact("multiplicity_lower_bound", r.multiplicity_lower_bound.to_string(), q_to_f64(&r.multiplicity_lower_bound));
    report.text("multiplicity_stable", r.multiplicity_stable.to_string());
    report.number("threshold", r.threshold as f64);
    report.text("unstable", r.unstable.to_string());
    report.text("admissible", r.admissible.to_string());
    report.text("log_canonical", r.lc_check.log_canonical.to_string());
    report.text("log_terminal", r.lc_check.log_terminal.to_string());
    if let Some((v, a)) = r.lc_check.discrepancies.iter().min_by(|x, y| x.1.cmp(&y.1)) {
        report.exact("min_discrepancy", a.to_string(), q_to_f64(a));
        report.text("min_discrepancy_at", format!("{v:?}"));
    }
    Ok(Outcome { report, ..Default::default() })
}

pub fn run_faltings(c: &FaltingsConfig) -> Result<Outcome, CliError> {
    let e = EllipticCurveData::from_coefficients(c.curve)?;
    let h_q = finite("h_F", elliptic_faltings_height(&e)?)?;
    let h_p = finite("h_F", faltings_height_from_periods(&e.a)?)?;
    let mut report = Report::new("faltings");
    report.text("curve", e.a.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","));
    report.number("delta_min", e.delta_min as f64);
    report.text("tau", format!("{} + {}i", e.tau.re, e.tau.im));
    report.number("h_F_q_expansion", h_q);
    report.number("h_F_periods", h_p);
    report.number("route_difference", (h_q - h_p).abs());
    report.number("degree", c.degree as f64);
    report.number("h_K", faltings_to_hk(&e, c.degree)?);
    Ok(Outcome { report, ..Default::default() })
}

pub fn run_validate(c: &ValidateConfig) -> Result<Outcome, CliError> {
    let mut report = Report::new("validate");
    let model = match &c.model {
        Some(p) => {
            let m = load_model(p)?;
            report.text("model", p.display().to_string());
            report.number("n", m.n as f64);
            report.number("classes", m.classes.len() as f64);
            let primes: BTreeSet<u64> = m.fibers.iter().map(|f| f.prime).collect();
            report.text("primes", primes.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(","));
            Some(m)
        }
        None => None,
    };
    if let Some(p) = &c.potential {
        let phi = load_potential(p)?;
        phi.check_kahler()?;
        let (rows, cols) = phi.geometry().shape();
        report.text("potential", p.display().to_string());
        report.text("grid", format!("{rows}x{cols}"));
        if let Some(m) = &model {
            metric_change_pair(m, &phi)?;
            report.text("pair", "ok");
        }
    }
    report.text("status", "ok");
    Ok(Outcome { report, ..Default::default() })
}

//! JSON-driven batch runs: a [`JobConfig`] names an algebra, a model, a
//! chart, the points to evaluate, the Laplacian methods and the checks;
//! [`run`] turns it into a [`ReportDocument`].
//!
//! ```json
//! {
//!   "algebra": "heisenberg(1)",
//!   "model": "nil_polarized",
//!   "chart": { "kind": "nil_cylinder", "f1": "cos(u1)", "f2": "sin(u1)" },
//!   "domain": [[0.2, 1.4], [-1, 1]],
//!   "grid": [5, 3],
//!   "methods": ["general", "heisenberg", "numeric_oracle"],
//!   "checks": ["harmonicity", "prop3", "jacobi", "corollary1"]
//! }
//! ```

use std::collections::BTreeMap;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{AlgebraDocument, AlgebraVector, NilpotentAlgebra};
use crate::catalog;
use crate::checks::{self, CentralVerdict, GaussCodazzi};
use crate::error::{GeometryError, Result};
use crate::expr::{parse_expression, Expr};
use crate::group::{CoordinateModel, ModelKind};
use crate::laplacian::{harmonicity, LaplacianReport, Method, SurfacePoint, DEFAULT_HARMONIC_TOL};
use crate::surface::{FdConfig, SurfaceChart};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AlgebraSpec {
    /// `"heisenberg(m)"`, `"nil"` or `"quaternionic_heisenberg"`.
    Named(String),
    Inline(AlgebraDocument),
}

impl AlgebraSpec {
    pub fn build(&self) -> Result<NilpotentAlgebra> {
        match self {
            AlgebraSpec::Inline(doc) => NilpotentAlgebra::from_document(doc),
            AlgebraSpec::Named(name) => {
                let name = name.trim();
                if name == "nil" {
                    return NilpotentAlgebra::heisenberg(1);
                }
                if name == "quaternionic_heisenberg" {
                    return Ok(NilpotentAlgebra::quaternionic_heisenberg());
                }
                if let Some(arg) = name.strip_prefix("heisenberg(").and_then(|s| s.strip_suffix(')')) {
                    let m: usize = arg
                        .trim()
                        .parse()
                        .map_err(|_| GeometryError::Config(format!("bad heisenberg dimension '{arg}'")))?;
                    return NilpotentAlgebra::heisenberg(m);
                }
                Err(GeometryError::Config(format!("unknown algebra '{name}'")))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ChartSpec {
    NilFoliationLeaf {
        #[serde(default)]
        level: f64,
    },
    NilVerticalPlane,
    NilCylinder {
        f1: String,
        f2: String,
    },
    /// Coordinate `axis` (0-based) is `height`; the others are `u1..un`.
    Graph {
        height: String,
        axis: usize,
    },
    /// Seeded random graph; uses the job seed.
    RandomGraph,
    /// One expression per model coordinate.
    Expressions {
        coords: Vec<String>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Check {
    Harmonicity,
    Prop3,
    Corollary1,
    Jacobi,
    GaussCodazzi,
}

impl Check {
    pub fn name(self) -> &'static str {
        match self {
            Check::Harmonicity => "harmonicity",
            Check::Prop3 => "prop3",
            Check::Corollary1 => "corollary1",
            Check::Jacobi => "jacobi",
            Check::GaussCodazzi => "gauss_codazzi",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub harmonic: f64,
    pub oracle_abs: f64,
    pub oracle_rel: f64,
    pub prop3: f64,
    pub jacobi: f64,
    pub corollary1: f64,
    pub gauss_codazzi: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            harmonic: DEFAULT_HARMONIC_TOL,
            oracle_abs: 5e-4,
            oracle_rel: 5e-4,
            prop3: 1e-6,
            jacobi: 5e-4,
            corollary1: 5e-4,
            gauss_codazzi: 5e-4,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobConfig {
    pub algebra: AlgebraSpec,
    /// Defaults to `nil_polarized` for the Nil catalog charts, `exp` otherwise.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<ModelKind>,
    pub chart: ChartSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub orientation: Option<f64>,
    /// Per-axis `[lo, hi]`; each chart kind has a default.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<Vec<(f64, f64)>>,
    /// Points per axis for sweeps.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<Vec<usize>>,
    /// Explicit evaluation points; take precedence over `grid`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<Vec<f64>>>,
    pub methods: Vec<Method>,
    #[serde(default)]
    pub checks: Vec<Check>,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub fd: FdConfig,
    #[serde(default)]
    pub seed: u64,
    /// Direction `v` of the Jacobi field `<G, v>`; defaults to the unit
    /// mean of the Gauss map over the points.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub jacobi_direction: Option<Vec<f64>>,
}

/// A configuration that passed validation, with everything built.
#[derive(Clone, Debug)]
pub struct PreparedJob {
    pub config: JobConfig,
    pub algebra: NilpotentAlgebra,
    pub chart: SurfaceChart,
    pub points: Vec<Vec<f64>>,
}

fn parse_all(texts: &[&str], errors: &mut Vec<String>) -> Option<Vec<Expr>> {
    let mut out = Vec::new();
    for (i, t) in texts.iter().enumerate() {
        match parse_expression(t) {
            Ok(e) => out.push(e),
            Err(e) => errors.push(format!("expression {} ('{t}'): {e}", i + 1)),
        }
    }
    (out.len() == texts.len()).then_some(out)
}

impl JobConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| GeometryError::Config(format!("invalid job configuration: {e}")))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    fn nil_chart(&self) -> bool {
        matches!(
            self.chart,
            ChartSpec::NilFoliationLeaf { .. } | ChartSpec::NilVerticalPlane | ChartSpec::NilCylinder { .. }
        )
    }

    pub fn model_kind(&self) -> ModelKind {
        self.model.unwrap_or(if self.nil_chart() { ModelKind::NilPolarized } else { ModelKind::Exponential })
    }

    /// Builds everything and reports every problem found, before any
    /// geometry is computed.
    pub fn prepare(&self) -> Result<PreparedJob> {
        let mut errors = Vec::new();
        if self.methods.is_empty() {
            errors.push("no methods requested".to_string());
        }
        if let Err(e) = self.fd.validate() {
            errors.push(e.to_string());
        }
        let t = &self.tolerances;
        for (name, v) in [
            ("harmonic", t.harmonic),
            ("oracle_abs", t.oracle_abs),
            ("oracle_rel", t.oracle_rel),
            ("prop3", t.prop3),
            ("jacobi", t.jacobi),
            ("corollary1", t.corollary1),
            ("gauss_codazzi", t.gauss_codazzi),
        ] {
            if !(v.is_finite() && v > 0.0) {
                errors.push(format!("tolerance {name} must be positive, got {v}"));
            }
        }

        let algebra = match self.algebra.build() {
            Ok(a) => {
                let report = a.validate(1e-10);
                for v in &report.violations {
                    errors.push(format!("algebra violates {:?} (magnitude {:.3e})", v.kind, v.magnitude));
                }
                Some(a)
            }
            Err(e) => {
                errors.push(e.to_string());
                None
            }
        };

        let model = algebra.as_ref().and_then(|a| match CoordinateModel::new(self.model_kind(), a.clone()) {
            Ok(m) => Some(m),
            Err(e) => {
                errors.push(e.to_string());
                None
            }
        });
        if self.nil_chart() && self.model_kind() != ModelKind::NilPolarized {
            errors.push("Nil catalog charts live in the nil_polarized model".into());
        }

        if let Some(alg) = &algebra {
            let h_type = alg.is_heisenberg_type(1e-10);
            let one_center = alg.dim_center() == 1;
            if self.methods.contains(&Method::HType) && !h_type {
                errors.push("method h_type needs an algebra of Heisenberg type".into());
            }
            if self.methods.contains(&Method::Heisenberg) && !(h_type && one_center) {
                errors.push("method heisenberg needs a Heisenberg algebra".into());
            }
            if self.checks.contains(&Check::Prop3) && !(h_type && one_center) {
                errors.push("check prop3 needs a Heisenberg algebra".into());
            }
            if self.checks.contains(&Check::GaussCodazzi) && !(alg.dim_total() == 3 && one_center) {
                errors.push("check gauss_codazzi needs a 3-dimensional group".into());
            }
            if let Some(v) = &self.jacobi_direction {
                let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                if v.len() != alg.dim_total() || (norm - 1.0).abs() > 1e-9 {
                    errors.push(format!("jacobi_direction must be a unit vector of length {}", alg.dim_total()));
                }
            }
        }

        let chart = model.and_then(|model| {
            let n = model.dim() - 1;
            let domain = self.domain.clone().unwrap_or_else(|| match self.chart {
                ChartSpec::NilFoliationLeaf { .. } | ChartSpec::NilVerticalPlane => vec![(-3.0, 3.0); 2],
                ChartSpec::NilCylinder { .. } => vec![(0.2, 1.4), (-1.0, 1.0)],
                _ => vec![(-1.0, 1.0); n],
            });
            let built: Option<Result<SurfaceChart>> = match &self.chart {
                ChartSpec::NilFoliationLeaf { level } => Some(catalog::nil_foliation_leaf(*level)),
                ChartSpec::NilVerticalPlane => Some(catalog::nil_vertical_plane()),
                ChartSpec::NilCylinder { f1, f2 } => parse_all(&[f1, f2], &mut errors).map(|e| {
                    if domain.len() != 2 {
                        return Err(GeometryError::DimensionMismatch { expected: 2, found: domain.len() });
                    }
                    catalog::nil_cylinder(&e[0], &e[1], domain[0], domain[1])
                }),
                ChartSpec::Graph { height, axis } => parse_all(&[height], &mut errors)
                    .map(|e| catalog::graph(model.clone(), e[0].clone(), *axis, domain.clone())),
                ChartSpec::RandomGraph => Some(catalog::random_graph(model.algebra(), self.seed).and_then(|c| {
                    if model.kind() != ModelKind::Exponential {
                        return Err(GeometryError::Config("random_graph uses the exp model".into()));
                    }
                    Ok(c)
                })),
                ChartSpec::Expressions { coords } => {
                    let refs: Vec<&str> = coords.iter().map(String::as_str).collect();
                    parse_all(&refs, &mut errors).map(|e| SurfaceChart::new(model.clone(), e, domain.clone()))
                }
            };
            match built {
                Some(Ok(c)) => {
                    let c = match SurfaceChart::new(c.model().clone(), c.coords().to_vec(), domain.clone()) {
                        Ok(r) => r.with_orientation(c.orientation()),
                        Err(e) => {
                            errors.push(format!("domain: {e}"));
                            return None;
                        }
                    };
                    let c = match self.orientation {
                        Some(s) => c.with_orientation(s),
                        None => c,
                    };
                    Some(c.with_fd(self.fd))
                }
                Some(Err(e)) => {
                    errors.push(e.to_string());
                    None
                }
                None => None,
            }
        });

        let mut points = Vec::new();
        if let Some(chart) = &chart {
            let n = chart.param_dim();
            if let Some(pts) = &self.points {
                if pts.is_empty() {
                    errors.push("points list is empty".into());
                }
                for p in pts {
                    if !chart.contains(p) {
                        errors.push(format!("point {p:?} is outside the domain or has the wrong dimension"));
                    }
                }
                points = pts.clone();
            } else {
                let grid = self.grid.clone().unwrap_or_else(|| vec![2; n]);
                if grid.len() != n {
                    errors.push(format!("grid needs {n} entries, got {}", grid.len()));
                } else if grid.iter().any(|&g| g < 2) {
                    errors.push("grid resolution must be at least 2 per axis".into());
                } else {
                    let margins: Vec<(f64, f64)> =
                        chart.domain().iter().map(|(lo, hi)| (lo + 0.05 * (hi - lo), hi - 0.05 * (hi - lo))).collect();
                    points = catalog::grid_points(&margins, &grid, 0.0);
                }
            }
        }

        if !errors.is_empty() {
            return Err(GeometryError::Config(errors.join("; ")));
        }
        Ok(PreparedJob {
            config: self.clone(),
            algebra: algebra.expect("checked"),
            chart: chart.expect("checked"),
            points,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub u: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub position: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gauss_map: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mean_curvature: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub norm_b2: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub defect: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle_gap: Option<f64>,
    #[serde(default)]
    pub methods: BTreeMap<String, LaplacianReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prop3: Option<[f64; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub jacobi_residual: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub jacobi_w: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gauss_codazzi: Option<GaussCodazzi>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub value: f64,
    pub tol: f64,
    pub passed: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub max_defect: f64,
    pub max_oracle_gap: f64,
    pub checks: BTreeMap<String, CheckOutcome>,
    pub all_passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub config_echo: JobConfig,
    pub rows: Vec<ReportRow>,
    pub summary: Summary,
}

impl ReportDocument {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// One line per row: parameters, `H`, `‖B‖²`, defect and the normal
    /// coefficient of each method.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let n = self.rows.first().map_or(0, |r| r.u.len());
        let methods: Vec<Method> = self.config_echo.methods.clone();
        let mut w = csv::Writer::from_writer(out);
        let mut header: Vec<String> = (1..=n).map(|i| format!("u{i}")).collect();
        header.extend(["mean_curvature", "norm_b2", "defect"].map(String::from));
        header.extend(methods.iter().map(|m| format!("normal_{}", m.name())));
        w.write_record(&header)?;
        let cell = |v: Option<f64>| v.map_or(String::new(), |x| format!("{x:?}"));
        for r in &self.rows {
            let mut rec: Vec<String> = r.u.iter().map(|x| format!("{x:?}")).collect();
            rec.push(cell(r.mean_curvature));
            rec.push(cell(r.norm_b2));
            rec.push(cell(r.defect));
            for m in &methods {
                rec.push(cell(r.methods.get(m.name()).map(|rep| rep.normal_coeff)));
            }
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }
}

fn evaluate_row(job: &PreparedJob, u: &[f64], jacobi_v: Option<&AlgebraVector>) -> Result<ReportRow> {
    let cfg = &job.config;
    let chart = &job.chart;
    let sp = SurfacePoint::evaluate(chart, u)?;
    let mut methods = BTreeMap::new();
    for &m in &cfg.methods {
        methods.insert(m.name().to_string(), sp.laplacian(chart, m)?);
    }
    let primary = cfg.methods.iter().find(|m| **m != Method::NumericOracle).or(cfg.methods.first()).copied();
    let defect = primary.map(|m| harmonicity(&methods[m.name()], cfg.tolerances.harmonic).defect);
    let oracle_gap = methods.get(Method::NumericOracle.name()).and_then(|oracle| {
        cfg.methods
            .iter()
            .filter(|m| **m != Method::NumericOracle)
            .map(|m| methods[m.name()].max_gap(oracle))
            .reduce(f64::max)
    });
    let prop3 = if cfg.checks.contains(&Check::Prop3) { Some(checks::prop3_residuals(&sp.shape, &sp.frame)?) } else { None };
    let (jacobi_residual, jacobi_w) = match jacobi_v {
        Some(v) => {
            let (r, w) = checks::jacobi_residual_at(chart, u, v)?;
            (Some(r.abs()), Some(w))
        }
        None => (None, None),
    };
    let gauss_codazzi = if cfg.checks.contains(&Check::GaussCodazzi) {
        Some(checks::gauss_codazzi_residuals(chart, u)?)
    } else {
        None
    };
    Ok(ReportRow {
        u: u.to_vec(),
        error: None,
        position: Some(sp.point.position.clone()),
        gauss_map: Some(sp.point.normal.iter().copied().collect()),
        mean_curvature: Some(sp.shape.mean_curvature),
        norm_b2: Some(sp.shape.norm_b2),
        defect,
        oracle_gap,
        methods,
        prop3,
        jacobi_residual,
        jacobi_w,
        gauss_codazzi,
    })
}

fn outcome(value: f64, tol: f64, note: Option<String>) -> CheckOutcome {
    CheckOutcome { value, tol, passed: value < tol, note }
}

fn fold_max(it: impl Iterator<Item = f64>) -> f64 {
    it.fold(0.0, f64::max)
}

/// Runs a prepared job. Points are evaluated in parallel; rows come back
/// in point order.
pub fn run_prepared(job: &PreparedJob) -> Result<ReportDocument> {
    let cfg = &job.config;
    let tol = &cfg.tolerances;
    let jacobi_v: Option<AlgebraVector> = if cfg.checks.contains(&Check::Jacobi) {
        Some(match &cfg.jacobi_direction {
            Some(v) => AlgebraVector::from_column_slice(v),
            None => checks::mean_direction(&job.chart, &job.points)?,
        })
    } else {
        None
    };
    let rows: Vec<ReportRow> = job
        .points
        .par_iter()
        .map(|u| {
            evaluate_row(job, u, jacobi_v.as_ref()).unwrap_or_else(|e| ReportRow {
                u: u.clone(),
                error: Some(e.to_string()),
                position: None,
                gauss_map: None,
                mean_curvature: None,
                norm_b2: None,
                defect: None,
                oracle_gap: None,
                methods: BTreeMap::new(),
                prop3: None,
                jacobi_residual: None,
                jacobi_w: None,
                gauss_codazzi: None,
            })
        })
        .collect();

    let max_defect = fold_max(rows.iter().filter_map(|r| r.defect));
    let max_oracle_gap = fold_max(rows.iter().filter_map(|r| r.oracle_gap));
    let mut summary = BTreeMap::new();
    let failed_rows = rows.iter().filter(|r| r.error.is_some()).count();
    summary.insert(
        "points".to_string(),
        CheckOutcome {
            value: failed_rows as f64,
            tol: 1.0,
            passed: failed_rows == 0,
            note: Some(format!("{failed_rows} of {} points failed to evaluate", rows.len())),
        },
    );
    if cfg.methods.contains(&Method::NumericOracle) && cfg.methods.len() > 1 {
        let scaled = fold_max(rows.iter().map(|r| {
            let Some(oracle) = r.methods.get(Method::NumericOracle.name()) else { return 0.0 };
            fold_max(
                r.methods
                    .iter()
                    .filter(|(k, _)| k.as_str() != Method::NumericOracle.name())
                    .map(|(_, rep)| rep.scaled_gap(oracle, tol.oracle_abs, tol.oracle_rel)),
            )
        }));
        summary.insert(
            "oracle".to_string(),
            CheckOutcome {
                value: scaled,
                tol: 1.0,
                passed: scaled <= 1.0,
                note: Some("largest gap over max(abs, rel * |oracle|)".into()),
            },
        );
    }
    for check in &cfg.checks {
        let o = match check {
            Check::Harmonicity => outcome(max_defect, tol.harmonic, None),
            Check::Prop3 => outcome(fold_max(rows.iter().filter_map(|r| r.prop3).flatten()), tol.prop3, None),
            Check::Jacobi => {
                let min_w = rows.iter().filter_map(|r| r.jacobi_w).fold(f64::INFINITY, f64::min);
                let note = if min_w.is_finite() { Some(format!("min w = {min_w:?}")) } else { None };
                outcome(fold_max(rows.iter().filter_map(|r| r.jacobi_residual)), tol.jacobi, note)
            }
            Check::GaussCodazzi => {
                let mut skipped = 0;
                let worst = fold_max(rows.iter().filter_map(|r| r.gauss_codazzi.as_ref()).map(|g| match g {
                    GaussCodazzi::Checked { codazzi, gauss, .. } => codazzi.max(*gauss),
                    GaussCodazzi::Skipped { .. } => {
                        skipped += 1;
                        0.0
                    }
                }));
                outcome(worst, tol.gauss_codazzi, Some(format!("{skipped} points skipped")))
            }
            Check::Corollary1 => match checks::corollary1_check(&job.chart, &job.points, tol.harmonic)? {
                CentralVerdict::Checked { max_variation, curves } => {
                    outcome(max_variation, tol.corollary1, Some(format!("{curves} curves")))
                }
                CentralVerdict::Skipped { max_defect } => CheckOutcome {
                    value: 0.0,
                    tol: tol.corollary1,
                    passed: true,
                    note: Some(format!("skipped: Gauss map not harmonic (defect {max_defect:?})")),
                },
            },
        };
        summary.insert(check.name().to_string(), o);
    }
    let all_passed = summary.values().all(|c| c.passed);
    Ok(ReportDocument {
        config_echo: cfg.clone(),
        rows,
        summary: Summary { max_defect, max_oracle_gap, checks: summary, all_passed },
    })
}

pub fn run(config: &JobConfig) -> Result<ReportDocument> {
    run_prepared(&config.prepare()?)
}

/// Names of the built-in jobs.
pub const BUILTIN_JOBS: [&str; 3] = ["nil_foliation_example", "nil_vertical_plane", "nil_circular_cylinder"];

pub fn builtin_job(name: &str) -> Option<JobConfig> {
    let base = |chart: ChartSpec| JobConfig {
        algebra: AlgebraSpec::Named("heisenberg(1)".into()),
        model: Some(ModelKind::NilPolarized),
        chart,
        orientation: None,
        domain: None,
        grid: None,
        points: None,
        methods: vec![Method::General, Method::Heisenberg, Method::NumericOracle],
        checks: Vec::new(),
        tolerances: Tolerances::default(),
        fd: FdConfig::default(),
        seed: 0,
        jacobi_direction: None,
    };
    match name {
        "nil_foliation_example" => Some(JobConfig {
            points: Some(vec![vec![0.0, 0.0], vec![0.5, 0.0], vec![1.0, 0.0], vec![2.0, 0.0]]),
            ..base(ChartSpec::NilFoliationLeaf { level: 0.0 })
        }),
        "nil_vertical_plane" => Some(JobConfig {
            grid: Some(vec![3, 3]),
            checks: vec![Check::Harmonicity, Check::Prop3, Check::Jacobi],
            jacobi_direction: Some(vec![0.0, 1.0, 0.0]),
            ..base(ChartSpec::NilVerticalPlane)
        }),
        "nil_circular_cylinder" => Some(JobConfig {
            grid: Some(vec![5, 3]),
            checks: vec![Check::Harmonicity, Check::Prop3, Check::Jacobi, Check::Corollary1],
            ..base(ChartSpec::NilCylinder { f1: "cos(u1)".into(), f2: "sin(u1)".into() })
        }),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn foliation_example_row_at_origin() {
        let report = run(&builtin_job("nil_foliation_example").unwrap()).unwrap();
        let row = &report.rows[0];
        assert_eq!(row.u, vec![0.0, 0.0]);
        for m in ["general", "heisenberg", "numeric_oracle"] {
            let c = &row.methods[m].coeffs;
            assert!(c[0].abs() < 1e-6 && c[1].abs() < 1e-6 && (c[2] + 1.0).abs() < 1e-6, "{m}: {c:?}");
        }
        assert!(report.summary.all_passed);
    }

    #[test]
    fn vertical_plane_checks_pass() {
        let report = run(&builtin_job("nil_vertical_plane").unwrap()).unwrap();
        assert!(report.summary.all_passed, "{:?}", report.summary);
        for c in ["harmonicity", "prop3", "jacobi"] {
            assert!(report.summary.checks[c].passed);
        }
    }

    #[test]
    fn empty_methods_are_rejected() {
        let mut cfg = builtin_job("nil_vertical_plane").unwrap();
        cfg.methods.clear();
        let err = cfg.prepare().unwrap_err().to_string();
        assert!(err.contains("no methods requested"), "{err}");
    }

    #[test]
    fn validation_lists_every_problem() {
        let text = r#"{
            "algebra": "heisenberg(1)",
            "chart": {"kind": "expressions", "coords": ["u1 +", "u2", "0"]},
            "grid": [1, 3],
            "methods": [],
            "checks": ["prop3"]
        }"#;
        let err = JobConfig::from_json(text).unwrap().prepare().unwrap_err().to_string();
        assert!(err.contains("no methods requested"));
        assert!(err.contains("offset 4"), "{err}");
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let report = run(&builtin_job("nil_foliation_example").unwrap()).unwrap();
        let text = report.to_json().unwrap();
        let back = ReportDocument::from_json(&text).unwrap();
        assert_eq!(back, report);
        assert_eq!(back.to_json().unwrap(), text);
    }
}

//! Subcommand implementations. Each returns a report whose `Display` is the
//! text printed on stdout.

use crate::error::CliError;
use crate::format::{csv_row, sig12};
use crate::measurement_file::{self, MeasurementFile};
use spinpair::info::info_theta;
use spinpair::optimizer::numeric_maximize;
use spinpair::povm::{try_factor_product, CompletenessReport, FeasibilityReport, DEFAULT_COMPLETENESS_TOL};
use spinpair::quadrature::{DEFAULT_ORDER_PHI, DEFAULT_ORDER_THETA};
use spinpair::{
    bound_theta, build_grid, catalog, entanglement_measure, feasibility_check, mutual_information,
    reduce_product_measurement, solve_stationarity, validate_completeness, EnsembleKind, InfoReportF64, Objective,
    OptimizationResultF64, PovmF64, ProductElementF64, ReducedMeasurementF64, SphereGridF64,
};
use std::fmt;
use std::path::Path;

pub const DEFAULT_GRID: (usize, usize) = (DEFAULT_ORDER_THETA, DEFAULT_ORDER_PHI);
/// Largest entanglement measure still classified as a product state.
pub const PRODUCT_TOL: f64 = 1e-12;
/// Allowed gap between the analytic and numeric optimum, in bits.
pub const CROSS_CHECK_BITS: f64 = 1e-3;
/// Allowed deviation of any numeric angle from the analytic one.
pub const CROSS_CHECK_THETA: f64 = 1e-2;

/// Parses `T,P` grid orders.
pub fn parse_grid(s: &str) -> Result<(usize, usize), String> {
    let (t, p) = s.split_once(',').ok_or_else(|| format!("expected T,P but got {s:?}"))?;
    let t = t.trim().parse().map_err(|e| format!("bad theta order {t:?}: {e}"))?;
    let p = p.trim().parse().map_err(|e| format!("bad phi order {p:?}: {e}"))?;
    Ok((t, p))
}

fn grid(orders: (usize, usize)) -> Result<SphereGridF64, CliError> {
    build_grid(orders.0, orders.1).map_err(CliError::invalid)
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|source| CliError::Write {
        path: path.display().to_string(),
        source,
    })
}

/// A measurement resolved from a catalog name or a file path.
#[derive(Debug, Clone)]
pub struct ResolvedMeasurement {
    pub label: String,
    pub povm: PovmF64,
    pub ensemble_hint: Option<EnsembleKind>,
    pub warnings: Vec<String>,
}

/// Catalog names win over paths with the same spelling.
pub fn resolve_measurement(name_or_path: &str) -> Result<ResolvedMeasurement, CliError> {
    if let Some(named) = catalog::by_name::<f64>(name_or_path) {
        let named = named.map_err(CliError::numerical)?;
        return Ok(ResolvedMeasurement {
            label: named.name.to_string(),
            povm: named.povm,
            ensemble_hint: Some(named.ensemble_hint),
            warnings: Vec::new(),
        });
    }
    let path = Path::new(name_or_path);
    if !path.exists() {
        return Err(CliError::Invalid(format!(
            "{name_or_path:?} is neither a catalog name ({}) nor an existing file",
            catalog::CATALOG_NAMES.join(", ")
        )));
    }
    let loaded = measurement_file::load(path)?;
    Ok(ResolvedMeasurement {
        label: path.display().to_string(),
        povm: loaded.povm,
        ensemble_hint: None,
        warnings: loaded.warnings,
    })
}

fn render_completeness(c: &CompletenessReport<f64>) -> String {
    format!(
        "completeness error: {}\nsum of weights: {}",
        sig12(c.max_entry_error),
        sig12(c.weight_sum)
    )
}

fn require_complete(povm: &PovmF64) -> Result<CompletenessReport<f64>, CliError> {
    let c = validate_completeness(povm, DEFAULT_COMPLETENESS_TOL);
    if c.ok {
        Ok(c)
    } else {
        Err(CliError::Invalid(format!(
            "POVM is not complete (tolerance {DEFAULT_COMPLETENESS_TOL:e})\n{}",
            render_completeness(&c)
        )))
    }
}

#[derive(Debug, Clone)]
pub struct EvalReport {
    pub label: String,
    pub ensemble: EnsembleKind,
    pub weights: Vec<f64>,
    pub info: InfoReportF64,
    pub warnings: Vec<String>,
}

impl EvalReport {
    pub fn to_csv(&self) -> String {
        let mut out = csv_row(&["outcome", "weight", "probability", "kl_bits"]);
        for (i, (o, w)) in self.info.per_outcome.iter().zip(&self.weights).enumerate() {
            out.push_str(&csv_row(&[
                i.to_string(),
                sig12(*w),
                sig12(o.probability),
                sig12(o.kl_bits),
            ]));
        }
        out
    }
}

impl fmt::Display for EvalReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (t, p) = self.info.grid_orders;
        writeln!(f, "measurement: {}", self.label)?;
        writeln!(f, "ensemble: {}", self.ensemble.name())?;
        writeln!(f, "grid: {t}x{p}")?;
        writeln!(
            f,
            "mutual information (bits): {}",
            sig12(self.info.mutual_information_bits)
        )?;
        writeln!(f, "error estimate (bits): {}", sig12(self.info.error_estimate))?;
        writeln!(
            f,
            "{:>7}  {:>18}  {:>18}  {:>18}",
            "outcome", "weight", "probability", "kl_bits"
        )?;
        for (i, (o, w)) in self.info.per_outcome.iter().zip(&self.weights).enumerate() {
            let mark = if o.degenerate { "  (degenerate)" } else { "" };
            writeln!(
                f,
                "{i:>7}  {:>18}  {:>18}  {:>18}{mark}",
                sig12(*w),
                sig12(o.probability),
                sig12(o.kl_bits)
            )?;
        }
        Ok(())
    }
}

/// Mutual information of a measurement on one ensemble.
///
/// Without an explicit ensemble the catalog hint is used, falling back to antiparallel.
pub fn eval(
    measurement: &str,
    ensemble: Option<EnsembleKind>,
    orders: (usize, usize),
    out: Option<&Path>,
) -> Result<EvalReport, CliError> {
    let m = resolve_measurement(measurement)?;
    require_complete(&m.povm)?;
    let g = grid(orders)?;
    let kind = ensemble.or(m.ensemble_hint).unwrap_or(EnsembleKind::Antiparallel);
    let info = mutual_information(&m.povm, &g, kind).map_err(CliError::numerical)?;
    let report = EvalReport {
        label: m.label,
        ensemble: kind,
        weights: m.povm.elements().iter().map(|e| e.weight()).collect(),
        info,
        warnings: m.warnings,
    };
    if let Some(path) = out {
        write_file(path, &report.to_csv())?;
    }
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Curves {
    pub info: bool,
    pub bound: bool,
}

impl std::str::FromStr for Curves {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let mut c = Curves {
            info: false,
            bound: false,
        };
        for part in s.split(',').map(str::trim) {
            match part {
                "I" => c.info = true,
                "J" => c.bound = true,
                other => return Err(format!("unknown curve {other:?}; use I, J or I,J")),
            }
        }
        Ok(c)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanRow {
    pub theta: f64,
    pub info_bits: Option<f64>,
    pub bound_bits: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct ScanReport {
    pub curves: Curves,
    pub rows: Vec<ScanRow>,
}

impl ScanReport {
    pub fn to_csv(&self) -> String {
        let mut header = vec!["theta"];
        if self.curves.info {
            header.push("I_bits");
        }
        if self.curves.bound {
            header.push("J_bits");
        }
        let mut out = csv_row(&header);
        for r in &self.rows {
            let mut fields = vec![sig12(r.theta)];
            fields.extend(r.info_bits.map(sig12));
            fields.extend(r.bound_bits.map(sig12));
            out.push_str(&csv_row(&fields));
        }
        out
    }
}

impl fmt::Display for ScanReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} rows over [0, pi]", self.rows.len())
    }
}

/// Tabulates `I(theta)` by quadrature and `J(theta)` in closed form.
pub fn scan(curves: Curves, steps: usize, orders: (usize, usize), out: &Path) -> Result<ScanReport, CliError> {
    if steps < 2 {
        return Err(CliError::Invalid(format!("--steps must be at least 2, got {steps}")));
    }
    if !curves.info && !curves.bound {
        return Err(CliError::Invalid("no curves selected".into()));
    }
    let g = if curves.info { Some(grid(orders)?) } else { None };
    let mut rows = Vec::with_capacity(steps);
    for k in 0..steps {
        let theta = if k == steps - 1 {
            std::f64::consts::PI
        } else {
            std::f64::consts::PI * k as f64 / (steps - 1) as f64
        };
        let info_bits = match &g {
            Some(g) => Some(info_theta(theta, g).map_err(CliError::numerical)?),
            None => None,
        };
        rows.push(ScanRow {
            theta,
            info_bits,
            bound_bits: curves.bound.then(|| bound_theta(theta)),
        });
    }
    let report = ScanReport { curves, rows };
    write_file(out, &report.to_csv())?;
    Ok(report)
}

#[derive(Debug, Clone)]
pub struct OptimizeReport {
    pub analytic: OptimizationResultF64,
    pub numeric: OptimizationResultF64,
    pub seed: u64,
}

impl OptimizeReport {
    pub fn bits_gap(&self) -> f64 {
        (self.analytic.objective_bits - self.numeric.objective_bits).abs()
    }

    pub fn max_theta_gap(&self) -> f64 {
        self.numeric
            .thetas
            .iter()
            .map(|t| (t - self.analytic.theta_opt).abs())
            .fold(0.0, f64::max)
    }
}

fn join(vals: &[f64]) -> String {
    vals.iter().map(|v| sig12(*v)).collect::<Vec<_>>().join(", ")
}

impl fmt::Display for OptimizeReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let a = &self.analytic;
        let n = &self.numeric;
        writeln!(f, "objective: {}  (M = {})", a.objective.symbol(), a.weights.len())?;
        writeln!(f, "theta_opt: {}", sig12(a.theta_opt))?;
        writeln!(f, "objective (bits): {}", sig12(a.objective_bits))?;
        writeln!(f, "hessian diagonal: [{}]", join(&a.hessian_diag))?;
        writeln!(f, "stationarity residual: {}", sig12(a.stationarity_residual))?;
        writeln!(
            f,
            "numeric cross-check (seed {}, {} iterations):",
            self.seed, n.iterations
        )?;
        writeln!(f, "  objective (bits): {}", sig12(n.objective_bits))?;
        writeln!(f, "  weights: [{}]", join(&n.weights))?;
        writeln!(f, "  thetas: [{}]", join(&n.thetas))?;
        writeln!(
            f,
            "  |delta bits| = {}, max |delta theta| = {}: ok",
            sig12(self.bits_gap()),
            sig12(self.max_theta_gap())
        )
    }
}

/// Analytic stationary point, checked against a seeded numeric search.
pub fn optimize(objective: Objective, m: usize, seed: u64, orders: (usize, usize)) -> Result<OptimizeReport, CliError> {
    if m < 4 {
        return Err(CliError::Invalid(format!("--M must be at least 4, got {m}")));
    }
    let g = grid(orders)?;
    let analytic = solve_stationarity(m, objective, &g).map_err(CliError::numerical)?;
    let numeric = numeric_maximize(m, objective, &g, seed).map_err(CliError::numerical)?;
    let report = OptimizeReport {
        analytic,
        numeric,
        seed,
    };
    if report.bits_gap() > CROSS_CHECK_BITS || report.max_theta_gap() > CROSS_CHECK_THETA {
        return Err(CliError::Numerical(format!(
            "numeric optimum diverges from the analytic one: analytic {} bits at theta {}, numeric {} bits with thetas [{}]",
            sig12(report.analytic.objective_bits),
            sig12(report.analytic.theta_opt),
            sig12(report.numeric.objective_bits),
            join(&report.numeric.thetas)
        )));
    }
    Ok(report)
}

#[derive(Debug, Clone)]
pub struct ElementSummary {
    pub weight: f64,
    pub entanglement: f64,
    pub product: Option<ProductElementF64>,
}

#[derive(Debug, Clone)]
pub struct VerifyReport {
    pub completeness: CompletenessReport<f64>,
    pub elements: Vec<ElementSummary>,
    /// Present when every element is a product state.
    pub reduction: Option<(ReducedMeasurementF64, FeasibilityReport<f64>)>,
    pub warnings: Vec<String>,
}

impl VerifyReport {
    pub fn all_product(&self) -> bool {
        self.elements.iter().all(|e| e.product.is_some())
    }

    pub fn entangled_count(&self) -> usize {
        self.elements.iter().filter(|e| e.product.is_none()).count()
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", render_completeness(&self.completeness))?;
        writeln!(f, "{:>7}  {:>18}  {:>18}  class", "element", "weight", "entanglement")?;
        for (i, e) in self.elements.iter().enumerate() {
            let class = if e.product.is_some() { "product" } else { "entangled" };
            writeln!(
                f,
                "{i:>7}  {:>18}  {:>18}  {class}",
                sig12(e.weight),
                sig12(e.entanglement)
            )?;
        }
        if self.all_product() {
            writeln!(f, "classification: all-product")?;
        } else {
            writeln!(f, "classification: {} entangled element(s)", self.entangled_count())?;
        }
        if let Some((m, feas)) = &self.reduction {
            writeln!(f, "reduced measurement:")?;
            writeln!(f, "{:>7}  {:>18}  {:>18}", "element", "c", "theta")?;
            for (i, (c, t)) in m.pairs().iter().enumerate() {
                writeln!(f, "{i:>7}  {:>18}  {:>18}", sig12(*c), sig12(*t))?;
            }
            writeln!(
                f,
                "feasibility: sum c = {}, sum c cos theta = {}: {}",
                sig12(feas.sum_c),
                sig12(feas.sum_c_cos),
                if feas.ok { "ok" } else { "violated" }
            )?;
        }
        Ok(())
    }
}

fn summarize(
    povm: &PovmF64,
) -> (
    Vec<ElementSummary>,
    Option<(ReducedMeasurementF64, FeasibilityReport<f64>)>,
) {
    let elements: Vec<ElementSummary> = povm
        .elements()
        .iter()
        .map(|e| ElementSummary {
            weight: e.weight(),
            entanglement: entanglement_measure(e.state()),
            product: try_factor_product(e.state(), PRODUCT_TOL).map(|(a, b)| ProductElementF64 {
                weight: e.weight(),
                first: a.direction(),
                second: b.direction(),
            }),
        })
        .collect();
    let products: Option<Vec<ProductElementF64>> = elements.iter().map(|e| e.product).collect();
    let reduction = products.map(|p| {
        let m = reduce_product_measurement(&p);
        let feas = feasibility_check(&m);
        (m, feas)
    });
    (elements, reduction)
}

/// Structural report on a measurement file. Incomplete POVMs fail with the full report.
pub fn verify(path: &Path) -> Result<VerifyReport, CliError> {
    let loaded = measurement_file::load(path)?;
    let completeness = validate_completeness(&loaded.povm, DEFAULT_COMPLETENESS_TOL);
    let (elements, reduction) = summarize(&loaded.povm);
    let report = VerifyReport {
        completeness,
        elements,
        reduction,
        warnings: loaded.warnings,
    };
    if !completeness.ok {
        return Err(CliError::Invalid(format!("{report}POVM is not complete")));
    }
    if let Some((_, feas)) = &report.reduction {
        if !feas.ok {
            return Err(CliError::Invalid(format!("{report}reduced measurement is infeasible")));
        }
    }
    Ok(report)
}

/// Writes a measurement in the versioned file format.
pub fn export(measurement: &str, out: &Path) -> Result<String, CliError> {
    let m = resolve_measurement(measurement)?;
    let file = MeasurementFile::from_povm(&m.povm);
    write_file(out, &file.to_toml())?;
    Ok(format!(
        "wrote {} elements of {} to {}\n",
        m.povm.len(),
        m.label,
        out.display()
    ))
}

//! Command plumbing for the `rkhsdiag` binary: argument schema, report
//! documents, grid parsing and the command implementations.
//!
//! All document output is deterministic: grids derive from an explicit seed,
//! maps are ordered, and floats go through either `serde_json` (JSON) or a
//! fixed 17-significant-digit scientific format (CSV), so identical
//! invocations produce byte-identical artifacts.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::Serialize;

use rkhsdiag_core::catalog::{
    get_model, list_models, CatalogError, Frequency, KernelModel, SymbolSpec,
};
use rkhsdiag_core::fiber::{
    commutativity_report, default_xi_grid, default_yv_pairs, FiberError, FiberReport, Verdict,
    VerdictTolerances, DEFAULT_PAIR_COUNT, DEFAULT_SEED,
};
use rkhsdiag_core::quadrature::{QuadSpec, QuadratureError};
use rkhsdiag_core::spectral::{berezin, gamma_matrix, SpectralError, SpectralValue};

/// Version tag of every JSON document; evolution is additive-only.
pub const SCHEMA_VERSION: &str = "1";

/// Exit code: everything verified within tolerance.
pub const EXIT_PASS: i32 = 0;
/// Exit code: a residual exceeded its tolerance.
pub const EXIT_RESIDUAL: i32 = 1;
/// Exit code: malformed invocation (clap uses the same value).
pub const EXIT_USAGE: i32 = 2;
/// Exit code: quadrature failed to converge or to evaluate.
pub const EXIT_NUMERIC: i32 = 3;

/// Environment variable overriding the default quadrature tolerance.
pub const QUAD_TOL_ENV: &str = "RKHSDIAG_QUAD_TOL";

// ---------------------------------------------------------------------------
// Argument schema.
// ---------------------------------------------------------------------------

/// Diagnostics for fiberwise diagonalization of translation-invariant
/// reproducing kernels: verification reports, spectral functions and Berezin
/// transforms for the built-in model catalog.
#[derive(Parser)]
#[command(name = "rkhsdiag", version, about)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// List the built-in kernel model families.
    List {
        /// Emit the catalog as a JSON array instead of a table.
        #[arg(long)]
        json: bool,
    },
    /// Run the commutativity verification report for a model.
    Verify {
        /// Model id, optionally with parameters (e.g. "vertical-poly:n=2").
        model: String,
        /// Residual tolerance for the pass/fail gate (also the allowed
        /// deviation of the numeric fiber dimension).
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        /// Schwarz-residual tolerance feeding the commutativity verdict.
        #[arg(long = "schwarz-tol", default_value_t = 1e-8)]
        schwarz_tol: f64,
        /// Frequencies to verify, comma separated ("a:b" entries on planar
        /// models); defaults to the model's standard grid.
        #[arg(long = "xi-set", allow_hyphen_values = true)]
        xi_set: Option<String>,
        /// Number of stratified (y, v) sample pairs.
        #[arg(long, default_value_t = DEFAULT_PAIR_COUNT)]
        pairs: usize,
        /// Seed for the sample-pair grid.
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Write the JSON report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate the spectral function of a Toeplitz operator on a grid.
    Gamma {
        /// Model id, optionally with parameters.
        model: String,
        /// Symbol: "const:c", "indicator:a,b", "expdecay:alpha" or "power:p".
        #[arg(long)]
        symbol: String,
        /// Explicit frequencies, comma separated.
        #[arg(long = "xi-set", allow_hyphen_values = true)]
        xi_set: Option<String>,
        /// Start of a uniform frequency range (with --xi-max, --samples).
        #[arg(
            long = "xi-min",
            requires = "xi_max",
            conflicts_with = "xi_set",
            allow_hyphen_values = true
        )]
        xi_min: Option<f64>,
        /// End of a uniform frequency range.
        #[arg(
            long = "xi-max",
            requires = "xi_min",
            conflicts_with = "xi_set",
            allow_hyphen_values = true
        )]
        xi_max: Option<f64>,
        /// Number of samples across the uniform range.
        #[arg(long, default_value_t = 9)]
        samples: usize,
        /// Emit JSON instead of CSV.
        #[arg(long, conflicts_with = "csv")]
        json: bool,
        /// Emit CSV (the default).
        #[arg(long)]
        csv: bool,
        /// Write the output here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate the Berezin transform of a Toeplitz operator.
    Berezin {
        /// Model id, optionally with parameters.
        model: String,
        /// Symbol: "const:c", "indicator:a,b", "expdecay:alpha" or "power:p".
        #[arg(long)]
        symbol: String,
        /// Fiber coordinates, comma separated ("a:b" entries on planar
        /// models).
        #[arg(long = "y-set", allow_hyphen_values = true)]
        y_set: String,
        /// Emit JSON instead of CSV.
        #[arg(long, conflicts_with = "csv")]
        json: bool,
        /// Emit CSV (the default).
        #[arg(long)]
        csv: bool,
        /// Write the output here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Detailed diagnostic report for a single frequency.
    Fiber {
        /// Model id, optionally with parameters.
        model: String,
        /// The frequency ("a:b" on planar models).
        #[arg(long, allow_hyphen_values = true)]
        xi: String,
        /// Residual tolerance for the pass/fail gate.
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        /// Schwarz-residual tolerance feeding the commutativity verdict.
        #[arg(long = "schwarz-tol", default_value_t = 1e-8)]
        schwarz_tol: f64,
        /// Number of stratified (y, v) sample pairs.
        #[arg(long, default_value_t = DEFAULT_PAIR_COUNT)]
        pairs: usize,
        /// Seed for the sample-pair grid.
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Write the JSON report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

// ---------------------------------------------------------------------------
// Failure classification.
// ---------------------------------------------------------------------------

/// A command failure carrying its exit code.
#[derive(Debug)]
pub struct Failure {
    /// Message for stderr.
    pub message: String,
    /// Process exit code (2 usage, 3 numeric).
    pub code: i32,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self { message: message.into(), code: EXIT_USAGE }
    }

    fn numeric(message: impl Into<String>) -> Self {
        Self { message: message.into(), code: EXIT_NUMERIC }
    }
}

fn classify_catalog(e: CatalogError) -> Failure {
    match e {
        CatalogError::Quadrature(q) => classify_quadrature(q),
        other => Failure::usage(other.to_string()),
    }
}

fn classify_quadrature(e: QuadratureError) -> Failure {
    Failure::numeric(e.to_string())
}

fn classify_fiber(e: FiberError) -> Failure {
    match e {
        FiberError::Catalog(c) => classify_catalog(c),
        FiberError::Quadrature(q) => classify_quadrature(q),
        FiberError::DegenerateSamples(msg) => Failure::numeric(msg),
    }
}

fn classify_spectral(e: SpectralError) -> Failure {
    match e {
        SpectralError::Catalog(c) => classify_catalog(c),
        SpectralError::Quadrature(q) => classify_quadrature(q),
        SpectralError::Fiber(f) => classify_fiber(f),
        other => Failure::numeric(other.to_string()),
    }
}

// ---------------------------------------------------------------------------
// Report documents.
// ---------------------------------------------------------------------------

/// Top-level JSON artifact of `verify` and `fiber`.
#[derive(Serialize)]
pub struct ReportDocument {
    /// Document schema tag.
    pub schema_version: &'static str,
    /// Canonical model id.
    pub model_id: String,
    /// Model parameters (empty for parameterless families).
    pub params: BTreeMap<&'static str, f64>,
    /// Seed behind the sample grids.
    pub seed: u64,
    /// Tolerances the summary was gated against.
    pub tolerances: ToleranceEcho,
    /// Quadrature configuration in effect.
    pub quad_spec: QuadSpec,
    /// One diagnostic row per frequency.
    pub fiber_reports: Vec<FiberReport>,
    /// Aggregate verdict.
    pub summary: Summary,
}

/// Tolerances echoed into a [`ReportDocument`].
#[derive(Serialize)]
pub struct ToleranceEcho {
    /// Residual gate applied to every report row.
    pub residual: f64,
    /// Allowed deviation of the numeric dimension.
    pub dimension: f64,
    /// Schwarz-residual bound for the commutative verdict.
    pub schwarz: f64,
}

/// Aggregate pass/fail information of a [`ReportDocument`].
#[derive(Serialize)]
pub struct Summary {
    /// Whether every row passed all gates.
    pub all_pass: bool,
    /// Largest residual (or dimension gap) across all rows; null when a row
    /// failed to converge.
    pub worst_residual: f64,
    /// Consensus verdict over the in-support rows.
    pub verdict: String,
}

/// Whether a single report row is internally consistent at the tolerances:
/// converged, residuals within the gate, numeric dimension matching the
/// declared one, and the verdict agreeing with the declared rank.
pub fn row_passes(r: &FiberReport, tol: &ToleranceEcho) -> bool {
    let expected = match r.declared_dimension {
        0 => Verdict::OutsideOmega,
        1 => Verdict::Commutative,
        _ => Verdict::NonCommutative,
    };
    r.converged
        && r.fourier_residual_max <= tol.residual
        && r.repro_residual_max <= tol.residual
        && r.normalization_residual <= tol.residual
        && (r.numeric_dimension - r.declared_dimension as f64).abs() <= tol.dimension
        && r.commutative_verdict == expected
}

fn summarize(reports: &[FiberReport], tol: &ToleranceEcho) -> Summary {
    let all_pass = reports.iter().all(|r| row_passes(r, tol));
    let mut worst = 0.0f64;
    for r in reports {
        for value in [
            r.fourier_residual_max,
            r.repro_residual_max,
            r.normalization_residual,
            (r.numeric_dimension - r.declared_dimension as f64).abs(),
        ] {
            if value.is_nan() {
                worst = f64::NAN;
                break;
            }
            worst = worst.max(value);
        }
        if worst.is_nan() {
            break;
        }
    }
    let verdict = if reports.iter().any(|r| r.commutative_verdict == Verdict::NonCommutative) {
        "non-commutative"
    } else if reports.iter().any(|r| r.commutative_verdict == Verdict::Commutative) {
        "commutative"
    } else {
        "outside-omega"
    };
    Summary { all_pass, worst_residual: worst, verdict: verdict.to_string() }
}

fn document_exit(doc: &ReportDocument) -> i32 {
    if doc.fiber_reports.iter().any(|r| !r.converged) {
        EXIT_NUMERIC
    } else if doc.summary.all_pass {
        EXIT_PASS
    } else {
        EXIT_RESIDUAL
    }
}

// ---------------------------------------------------------------------------
// Parsing helpers.
// ---------------------------------------------------------------------------

/// Parses one frequency token: a number, or colon-joined components for
/// product groups ("0.5:0.25").
pub fn parse_frequency(token: &str) -> Result<Frequency, Failure> {
    let components: Result<Vec<f64>, _> =
        token.split(':').map(|p| p.trim().parse::<f64>()).collect();
    match components {
        Ok(c) if !c.is_empty() => Ok(Frequency::vector(c)),
        _ => Err(Failure::usage(format!("invalid frequency '{token}'"))),
    }
}

/// Parses a comma-separated frequency list.
pub fn parse_frequency_set(text: &str) -> Result<Vec<Frequency>, Failure> {
    let grid: Result<Vec<Frequency>, Failure> =
        text.split(',').map(|t| parse_frequency(t)).collect();
    let grid = grid?;
    if grid.is_empty() {
        return Err(Failure::usage("frequency set is empty"));
    }
    Ok(grid)
}

/// Parses a comma-separated list of fiber coordinates ("a:b" per entry on
/// planar models).
pub fn parse_point_set(text: &str) -> Result<Vec<Vec<f64>>, Failure> {
    text.split(',')
        .map(|token| {
            let point: Result<Vec<f64>, _> =
                token.split(':').map(|p| p.trim().parse::<f64>()).collect();
            match point {
                Ok(p) if !p.is_empty() => Ok(p),
                _ => Err(Failure::usage(format!("invalid coordinate '{token}'"))),
            }
        })
        .collect()
}

/// The quadrature configuration, honoring the `RKHSDIAG_QUAD_TOL` override.
pub fn quad_spec_from_env() -> Result<QuadSpec, Failure> {
    let mut spec = QuadSpec::default();
    if let Ok(text) = std::env::var(QUAD_TOL_ENV) {
        let tol: f64 = text
            .trim()
            .parse()
            .map_err(|_| Failure::usage(format!("{QUAD_TOL_ENV}='{text}' is not a number")))?;
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(Failure::usage(format!(
                "{QUAD_TOL_ENV} must be positive and finite, got {tol}"
            )));
        }
        // Keep the default 100× gap between absolute and relative targets.
        spec.abs_tol = tol;
        spec.rel_tol = (tol * 100.0).min(1e-2);
    }
    Ok(spec)
}

fn load_model(spec_string: &str) -> Result<KernelModel, Failure> {
    get_model(spec_string).map_err(classify_catalog)
}

fn parse_symbol(text: &str) -> Result<SymbolSpec, Failure> {
    SymbolSpec::parse(text).map_err(classify_catalog)
}

/// Floats in CSV output: scientific with 17 significant digits, which
/// round-trips any 64-bit value exactly.
fn csv_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), Failure> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Failure::usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn to_pretty_json<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("report types serialize");
    text.push('\n');
    text
}

// ---------------------------------------------------------------------------
// Commands.
// ---------------------------------------------------------------------------

/// Executes a parsed invocation and returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    let outcome = match cli.command {
        Command::List { json } => cmd_list(json),
        Command::Verify { model, tol, schwarz_tol, xi_set, pairs, seed, out } => {
            cmd_verify(&model, tol, schwarz_tol, xi_set.as_deref(), pairs, seed, out.as_deref())
        }
        Command::Gamma { model, symbol, xi_set, xi_min, xi_max, samples, json, out, .. } => {
            let grid = GammaGrid { xi_set, xi_min, xi_max, samples };
            cmd_gamma(&model, &symbol, &grid, json, out.as_deref())
        }
        Command::Berezin { model, symbol, y_set, json, out, .. } => {
            cmd_berezin(&model, &symbol, &y_set, json, out.as_deref())
        }
        Command::Fiber { model, xi, tol, schwarz_tol, pairs, seed, out } => {
            cmd_fiber(&model, &xi, tol, schwarz_tol, pairs, seed, out.as_deref())
        }
    };
    match outcome {
        Ok(code) => code,
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            failure.code
        }
    }
}

fn cmd_list(json: bool) -> Result<i32, Failure> {
    let models = list_models();
    if json {
        emit(&to_pretty_json(&models), None)?;
        return Ok(EXIT_PASS);
    }
    let mut text = String::new();
    let id_width = models.iter().map(|m| m.id.len()).max().unwrap_or(0);
    let param_width =
        models.iter().map(|m| m.parameters.len().max("params".len())).max().unwrap_or(0);
    let _ = writeln!(text, "{:id_width$}  {:param_width$}  rank  γ-closed  summary", "model", "params");
    for m in &models {
        let _ = writeln!(
            text,
            "{:id_width$}  {:param_width$}  {:4}  {:8}  {}",
            m.id,
            m.parameters,
            m.fiber_rank,
            if m.closed_form_gamma { "yes" } else { "no" },
            m.summary
        );
    }
    emit(&text, None)?;
    Ok(EXIT_PASS)
}

fn build_report(
    model: &KernelModel,
    tol: f64,
    schwarz_tol: f64,
    xi_grid: &[Frequency],
    pairs: usize,
    seed: u64,
    spec: &QuadSpec,
) -> ReportDocument {
    let tolerances = ToleranceEcho { residual: tol, dimension: tol, schwarz: schwarz_tol };
    let verdict_tols = VerdictTolerances { dimension: tol, schwarz: schwarz_tol };
    let yv_pairs = default_yv_pairs(model, pairs, seed);
    let reports = commutativity_report(model, xi_grid, &yv_pairs, spec, &verdict_tols);
    let summary = summarize(&reports, &tolerances);
    ReportDocument {
        schema_version: SCHEMA_VERSION,
        model_id: model.id().to_string(),
        params: model.kind().params().into_iter().collect(),
        seed,
        tolerances,
        quad_spec: *spec,
        fiber_reports: reports,
        summary,
    }
}

fn cmd_verify(
    model_spec: &str,
    tol: f64,
    schwarz_tol: f64,
    xi_set: Option<&str>,
    pairs: usize,
    seed: u64,
    out: Option<&Path>,
) -> Result<i32, Failure> {
    let model = load_model(model_spec)?;
    let spec = quad_spec_from_env()?;
    let xi_grid = match xi_set {
        Some(text) => parse_frequency_set(text)?,
        None => default_xi_grid(&model),
    };
    let doc = build_report(&model, tol, schwarz_tol, &xi_grid, pairs, seed, &spec);
    emit(&to_pretty_json(&doc), out)?;
    Ok(document_exit(&doc))
}

fn cmd_fiber(
    model_spec: &str,
    xi: &str,
    tol: f64,
    schwarz_tol: f64,
    pairs: usize,
    seed: u64,
    out: Option<&Path>,
) -> Result<i32, Failure> {
    let model = load_model(model_spec)?;
    let spec = quad_spec_from_env()?;
    let xi = parse_frequency(xi)?;
    let doc = build_report(&model, tol, schwarz_tol, &[xi], pairs, seed, &spec);
    emit(&to_pretty_json(&doc), out)?;
    Ok(document_exit(&doc))
}

struct GammaGrid {
    xi_set: Option<String>,
    xi_min: Option<f64>,
    xi_max: Option<f64>,
    samples: usize,
}

impl GammaGrid {
    fn build(&self) -> Result<Vec<Frequency>, Failure> {
        if let Some(text) = &self.xi_set {
            return parse_frequency_set(text);
        }
        match (self.xi_min, self.xi_max) {
            (Some(lo), Some(hi)) => {
                if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
                    return Err(Failure::usage(format!("invalid range [{lo}, {hi}]")));
                }
                if self.samples < 2 {
                    return Err(Failure::usage("a frequency range needs --samples >= 2"));
                }
                let n = self.samples;
                Ok((0..n)
                    .map(|i| {
                        Frequency::scalar(lo + (hi - lo) * i as f64 / (n - 1) as f64)
                    })
                    .collect())
            }
            _ => Err(Failure::usage("provide --xi-set or --xi-min/--xi-max")),
        }
    }
}

/// JSON artifact of `gamma`.
#[derive(Serialize)]
struct GammaDocument {
    schema_version: &'static str,
    model_id: String,
    params: BTreeMap<&'static str, f64>,
    symbol: String,
    quad_spec: QuadSpec,
    samples: Vec<GammaRow>,
}

#[derive(Serialize)]
struct GammaRow {
    xi: Frequency,
    d: usize,
    value: rkhsdiag_core::spectral::SpectralValueView,
}

fn cmd_gamma(
    model_spec: &str,
    symbol: &str,
    grid: &GammaGrid,
    json: bool,
    out: Option<&Path>,
) -> Result<i32, Failure> {
    let model = load_model(model_spec)?;
    let psi = parse_symbol(symbol)?;
    let spec = quad_spec_from_env()?;
    let xi_grid = grid.build()?;
    let mut rows = Vec::with_capacity(xi_grid.len());
    for xi in &xi_grid {
        let value = gamma_matrix(&model, &psi, xi, &spec).map_err(classify_spectral)?;
        rows.push((xi.clone(), value));
    }
    let max_d = rows.iter().map(|(_, v)| v.dim()).max().unwrap_or(1);
    let xi_dim = model.group().dim();

    let text = if json {
        let doc = GammaDocument {
            schema_version: SCHEMA_VERSION,
            model_id: model.id().to_string(),
            params: model.kind().params().into_iter().collect(),
            symbol: psi.label().to_string(),
            quad_spec: spec,
            samples: rows
                .into_iter()
                .map(|(xi, v)| GammaRow {
                    xi,
                    d: v.dim(),
                    value: SpectralValue::Matrix(v).view(),
                })
                .collect(),
        };
        to_pretty_json(&doc)
    } else {
        let mut text = String::new();
        let mut header: Vec<String> = (0..xi_dim).map(|j| format!("xi_{}", j + 1)).collect();
        if max_d == 1 {
            header.push("re".into());
            header.push("im".into());
        } else {
            header.push("d".into());
            for j in 1..=max_d {
                for k in 1..=max_d {
                    header.push(format!("re_{j}_{k}"));
                    header.push(format!("im_{j}_{k}"));
                }
            }
        }
        let _ = writeln!(text, "{}", header.join(","));
        for (xi, value) in rows {
            let mut fields: Vec<String> =
                xi.components().iter().map(|&c| csv_float(c)).collect();
            if max_d > 1 {
                fields.push(value.dim().to_string());
            }
            for j in 0..max_d {
                for k in 0..max_d {
                    let entry = if j < value.dim() && k < value.dim() {
                        value.entry(j, k)
                    } else {
                        rkhsdiag_core::Complex64::new(0.0, 0.0)
                    };
                    fields.push(csv_float(entry.re));
                    fields.push(csv_float(entry.im));
                }
            }
            let _ = writeln!(text, "{}", fields.join(","));
        }
        text
    };
    emit(&text, out)?;
    Ok(EXIT_PASS)
}

/// JSON artifact of `berezin`.
#[derive(Serialize)]
struct BerezinDocument {
    schema_version: &'static str,
    model_id: String,
    params: BTreeMap<&'static str, f64>,
    symbol: String,
    quad_spec: QuadSpec,
    values: Vec<BerezinRow>,
}

#[derive(Serialize)]
struct BerezinRow {
    y: Vec<f64>,
    re: f64,
    im: f64,
}

fn cmd_berezin(
    model_spec: &str,
    symbol: &str,
    y_set: &str,
    json: bool,
    out: Option<&Path>,
) -> Result<i32, Failure> {
    let model = load_model(model_spec)?;
    let psi = parse_symbol(symbol)?;
    let spec = quad_spec_from_env()?;
    let points = parse_point_set(y_set)?;
    let mut rows = Vec::with_capacity(points.len());
    for y in points {
        let value = berezin(&model, &psi, &y, &spec).map_err(classify_spectral)?;
        rows.push(BerezinRow { y, re: value.re, im: value.im });
    }
    let y_dim = model.y_dim();
    let text = if json {
        to_pretty_json(&BerezinDocument {
            schema_version: SCHEMA_VERSION,
            model_id: model.id().to_string(),
            params: model.kind().params().into_iter().collect(),
            symbol: psi.label().to_string(),
            quad_spec: spec,
            values: rows,
        })
    } else {
        let mut text = String::new();
        let mut header: Vec<String> = (0..y_dim).map(|j| format!("y_{}", j + 1)).collect();
        header.push("re".into());
        header.push("im".into());
        let _ = writeln!(text, "{}", header.join(","));
        for row in rows {
            let mut fields: Vec<String> = row.y.iter().map(|&c| csv_float(c)).collect();
            fields.push(csv_float(row.re));
            fields.push(csv_float(row.im));
            let _ = writeln!(text, "{}", fields.join(","));
        }
        text
    };
    emit(&text, out)?;
    Ok(EXIT_PASS)
}

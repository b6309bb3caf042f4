use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use thiserror::Error;
use wavinv::analysis::{build_tables, error_series, AnalysisError, Tables};
use wavinv::basis::WaveletFamily;
use wavinv::linalg::GmresOptions;
use wavinv::solver::{run, SolveOutput, SolverConfig, SolverError};

use crate::config::{ConfigError, RunConfig};

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{family} solve failed: {source}")]
    Solver {
        family: WaveletFamily,
        #[source]
        source: SolverError,
    },
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}: {source}", path.display())]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            _ => 2,
        }
    }
}

/// Six significant digits.
fn sci(v: f64) -> String {
    format!("{v:.5e}")
}

pub struct FamilyRun {
    pub family: WaveletFamily,
    pub output: SolveOutput,
    pub seconds: f64,
}

fn solver_config(cfg: &RunConfig, family: WaveletFamily) -> SolverConfig {
    let mut sc =
        SolverConfig::new(cfg.basis(family), cfg.t_end, cfg.steps()).linear_method(cfg.solver);
    sc.dt = cfg.dt;
    if let Some(tol) = cfg.gmres_tol {
        sc.gmres = GmresOptions {
            tol,
            ..GmresOptions::for_dim(sc.basis.dim())
        };
    }
    sc
}

/// Solves for every family in `families`, concurrently when there are
/// several. Results come back in the order requested.
pub fn solve_families(
    cfg: &RunConfig,
    families: &[WaveletFamily],
) -> Result<Vec<FamilyRun>, CliError> {
    let results: Vec<Result<FamilyRun, CliError>> = std::thread::scope(|scope| {
        let handles: Vec<_> = families
            .iter()
            .map(|&family| {
                scope.spawn(move || {
                    let start = Instant::now();
                    let output = run(&cfg.problem, &solver_config(cfg, family))
                        .map_err(|source| CliError::Solver { family, source })?;
                    Ok(FamilyRun {
                        family,
                        output,
                        seconds: start.elapsed().as_secs_f64(),
                    })
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("solver thread panicked"))
            .collect()
    });
    results.into_iter().collect()
}

struct CsvOut {
    path: PathBuf,
    writer: csv::Writer<File>,
}

impl CsvOut {
    fn create(dir: &Path, name: &str, header: &[&str]) -> Result<Self, CliError> {
        let path = dir.join(name);
        let writer = csv::Writer::from_path(&path).map_err(|source| CliError::Csv {
            path: path.clone(),
            source,
        })?;
        let mut out = Self { path, writer };
        out.row(header)?;
        Ok(out)
    }

    fn row<I, S>(&mut self, fields: I) -> Result<(), CliError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        self.writer
            .write_record(fields)
            .map_err(|source| CliError::Csv {
                path: self.path.clone(),
                source,
            })
    }

    fn finish(mut self) -> Result<PathBuf, CliError> {
        self.writer.flush().map_err(|source| CliError::Io {
            path: self.path.clone(),
            source,
        })?;
        Ok(self.path)
    }
}

fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|source| CliError::Io {
        path: dir.to_path_buf(),
        source,
    })
}

#[derive(Debug)]
pub struct RunSummary {
    pub files: Vec<PathBuf>,
    /// `(family, max |y − Y|)` over the report grid, when an exact solution exists.
    pub max_errors: Vec<(WaveletFamily, f64)>,
}

/// Solves and writes the result tables into `output_dir` (or the
/// configured directory).
pub fn run_command(cfg: &RunConfig, output_dir: Option<&Path>) -> Result<RunSummary, CliError> {
    let dir = output_dir.unwrap_or(&cfg.output_dir);
    ensure_dir(dir)?;
    let runs = solve_families(cfg, &cfg.families)?;
    let mut files = Vec::new();
    let mut max_errors = Vec::new();

    if cfg.exact.field.is_some() {
        let tables: Vec<Tables> = runs
            .iter()
            .map(|r| build_tables(&r.output, &cfg.exact, &cfg.report_x, &cfg.report_t))
            .collect::<Result<_, _>>()?;
        let mut sol = CsvOut::create(
            dir,
            "solution_errors.csv",
            &["family", "dt", "t", "x", "abs_error"],
        )?;
        for (r, tab) in runs.iter().zip(&tables) {
            max_errors.push((r.family, tab.max_solution_error()));
            for row in &tab.solution {
                sol.row([
                    r.family.label().to_string(),
                    sci(cfg.dt),
                    sci(row.t),
                    sci(row.x),
                    sci(row.abs_error),
                ])?;
            }
        }
        files.push(sol.finish()?);

        if cfg.exact.control.is_some() {
            let mut ctl = CsvOut::create(
                dir,
                "control_errors.csv",
                &["family", "dt", "t", "exact_X", "abs_error"],
            )?;
            for (r, tab) in runs.iter().zip(&tables) {
                for row in &tab.control {
                    ctl.row([
                        r.family.label().to_string(),
                        sci(cfg.dt),
                        sci(row.t),
                        sci(row.exact),
                        row.abs_error.map(sci).unwrap_or_default(),
                    ])?;
                }
            }
            files.push(ctl.finish()?);
        }

        let mut series = CsvOut::create(dir, "error_series.csv", &["family", "t", "linf", "l2"])?;
        for r in &runs {
            for p in error_series(&r.output, &cfg.exact)? {
                series.row([
                    r.family.label().to_string(),
                    sci(p.t),
                    sci(p.linf),
                    sci(p.l2),
                ])?;
            }
        }
        files.push(series.finish()?);
    } else {
        let mut rec = CsvOut::create(dir, "recovered_control.csv", &["family", "dt", "t", "X"])?;
        for r in &runs {
            for (&t, x) in r.output.times.iter().zip(&r.output.controls) {
                rec.row([
                    r.family.label().to_string(),
                    sci(cfg.dt),
                    sci(t),
                    x.map(sci).unwrap_or_default(),
                ])?;
            }
        }
        files.push(rec.finish()?);
    }

    let mut diag = CsvOut::create(
        dir,
        "diagnostics.csv",
        &["family", "step", "residual", "iterations"],
    )?;
    for r in &runs {
        for d in &r.output.diagnostics {
            diag.row([
                r.family.label().to_string(),
                d.step.to_string(),
                sci(d.residual),
                d.iterations.to_string(),
            ])?;
        }
    }
    files.push(diag.finish()?);

    let timing_path = dir.join("timing.txt");
    let mut timing = String::new();
    for r in &runs {
        timing.push_str(&format!("{} {:.6}\n", r.family.label(), r.seconds));
    }
    File::create(&timing_path)
        .and_then(|mut f| f.write_all(timing.as_bytes()))
        .map_err(|source| CliError::Io {
            path: timing_path.clone(),
            source,
        })?;
    files.push(timing_path);

    Ok(RunSummary { files, max_errors })
}

/// `CWM error / TWM error`, with `0/0` read as 1.
pub fn error_ratio(taylor: f64, chebyshev: f64) -> f64 {
    if taylor == 0.0 && chebyshev == 0.0 {
        1.0
    } else {
        chebyshev / taylor
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioSummary {
    pub max: f64,
    pub median: f64,
}

pub fn summarize_ratios(ratios: &[f64]) -> Option<RatioSummary> {
    if ratios.is_empty() {
        return None;
    }
    let mut sorted = ratios.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let median = if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    };
    Some(RatioSummary {
        max: sorted[n - 1],
        median,
    })
}

#[derive(Debug)]
pub struct CompareSummary {
    pub file: PathBuf,
    pub ratios: RatioSummary,
}

/// Solves with both families and writes `comparison.csv` with the per-point
/// error ratio.
pub fn compare_command(
    cfg: &RunConfig,
    output_dir: Option<&Path>,
) -> Result<CompareSummary, CliError> {
    if cfg.exact.field.is_none() {
        return Err(AnalysisError::UnsupportedReport("solution").into());
    }
    let dir = output_dir.unwrap_or(&cfg.output_dir);
    ensure_dir(dir)?;
    let runs = solve_families(
        cfg,
        &[WaveletFamily::Taylor, WaveletFamily::ChebyshevFirstKind],
    )?;
    let tw = build_tables(&runs[0].output, &cfg.exact, &cfg.report_x, &cfg.report_t)?;
    let cw = build_tables(&runs[1].output, &cfg.exact, &cfg.report_x, &cfg.report_t)?;

    let mut out = CsvOut::create(
        dir,
        "comparison.csv",
        &["t", "x", "twm_error", "cwm_error", "ratio"],
    )?;
    let mut ratios = Vec::with_capacity(tw.solution.len());
    for (a, b) in tw.solution.iter().zip(&cw.solution) {
        let ratio = error_ratio(a.abs_error, b.abs_error);
        ratios.push(ratio);
        out.row([
            sci(a.t),
            sci(a.x),
            sci(a.abs_error),
            sci(b.abs_error),
            sci(ratio),
        ])?;
    }
    let file = out.finish()?;
    let ratios = summarize_ratios(&ratios).ok_or(AnalysisError::Empty)?;
    Ok(CompareSummary { file, ratios })
}

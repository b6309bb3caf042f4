//! `key = value` run configuration.
//!
//! Blank lines and `#` comments are ignored. Lists are comma separated and
//! may be wrapped in brackets. With `problem = custom` the problem data are
//! given inline using the expression keys of [`wavinv::problem::PROBLEM_KEYS`];
//! any other non-example value is read as a path to a file holding them.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use thiserror::Error;
use wavinv::basis::{BasisSpec, WaveletFamily};
use wavinv::linalg::LinearMethod;
use wavinv::problem::{custom_problem, example_one, example_two, ExactReference, PROBLEM_KEYS};
use wavinv::solver::step_count;
use wavinv::InverseProblem;

/// Tolerance for `dt` dividing `t_end` and for report times sitting on the grid.
pub const GRID_TOL: f64 = 1e-12;

const RUN_KEYS: &[&str] = &[
    "problem",
    "family",
    "k",
    "M",
    "dt",
    "t_end",
    "report_x",
    "report_t",
    "solver",
    "gmres_tol",
    "output_dir",
];

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Line { line: usize, message: String },
    #[error("{0}")]
    General(String),
    #[error("cannot read {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

fn at(line: usize, message: impl Into<String>) -> ConfigError {
    ConfigError::Line {
        line,
        message: message.into(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProblemSource {
    Example1,
    Example2,
    Custom,
    File(PathBuf),
}

impl ProblemSource {
    pub fn label(&self) -> String {
        match self {
            ProblemSource::Example1 => "example1".into(),
            ProblemSource::Example2 => "example2".into(),
            ProblemSource::Custom => "custom".into(),
            ProblemSource::File(p) => p.display().to_string(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub source: ProblemSource,
    pub problem: InverseProblem,
    pub exact: ExactReference,
    pub families: Vec<WaveletFamily>,
    pub k: u32,
    pub degrees: usize,
    pub dt: f64,
    pub t_end: f64,
    pub report_x: Vec<f64>,
    pub report_t: Vec<f64>,
    pub solver: LinearMethod,
    pub gmres_tol: Option<f64>,
    pub output_dir: PathBuf,
}

impl RunConfig {
    pub fn steps(&self) -> usize {
        (self.t_end / self.dt).round() as usize
    }

    pub fn basis(&self, family: WaveletFamily) -> BasisSpec {
        BasisSpec::new(family, self.k, self.degrees).expect("resolution validated at parse time")
    }
}

/// Reads a config file; relative problem paths resolve against its directory.
pub fn load_config(path: &Path) -> Result<RunConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let base = path.parent().unwrap_or(Path::new("."));
    parse_config_in(&text, base)
}

/// Parses a config, resolving relative paths against the working directory.
pub fn parse_config(source: &str) -> Result<RunConfig, ConfigError> {
    parse_config_in(source, Path::new("."))
}

struct Entry {
    line: usize,
    value: String,
}

fn split_entries(
    source: &str,
    allowed: impl Fn(&str) -> bool,
) -> Result<BTreeMap<String, Entry>, ConfigError> {
    let mut entries = BTreeMap::new();
    for (i, raw) in source.lines().enumerate() {
        let line = i + 1;
        let text = raw.split('#').next().unwrap_or("").trim();
        if text.is_empty() {
            continue;
        }
        let (key, value) = text
            .split_once('=')
            .ok_or_else(|| at(line, format!("expected 'key = value', found '{text}'")))?;
        let key = key.trim();
        let value = value.trim();
        if !allowed(key) {
            return Err(at(line, format!("unknown key '{key}'")));
        }
        if value.is_empty() {
            return Err(at(line, format!("key '{key}' has no value")));
        }
        if let Some(prev) = entries.insert(
            key.to_string(),
            Entry {
                line,
                value: value.to_string(),
            },
        ) {
            return Err(at(
                line,
                format!("key '{key}' already set on line {}", prev.line),
            ));
        }
    }
    Ok(entries)
}

fn number(entry: &Entry, key: &str) -> Result<f64, ConfigError> {
    let v: f64 = entry.value.parse().map_err(|_| {
        at(
            entry.line,
            format!("{key} must be a number, found '{}'", entry.value),
        )
    })?;
    if !v.is_finite() {
        return Err(at(entry.line, format!("{key} must be finite")));
    }
    Ok(v)
}

fn integer(entry: &Entry, key: &str) -> Result<usize, ConfigError> {
    entry.value.parse().map_err(|_| {
        at(
            entry.line,
            format!("{key} must be a positive integer, found '{}'", entry.value),
        )
    })
}

fn list(entry: &Entry, key: &str) -> Result<Vec<f64>, ConfigError> {
    let inner = entry.value.trim_start_matches('[').trim_end_matches(']');
    let values = inner
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<f64>()
                .map_err(|_| at(entry.line, format!("{key}: '{s}' is not a number")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    if values.is_empty() {
        return Err(at(
            entry.line,
            format!("{key} must list at least one value"),
        ));
    }
    Ok(values)
}

fn problem_error(
    entries: &BTreeMap<String, Entry>,
    e: wavinv::problem::ProblemError,
) -> ConfigError {
    match entries.get(e.key()) {
        Some(entry) => at(entry.line, e.to_string()),
        None => ConfigError::General(e.to_string()),
    }
}

fn load_problem_file(path: &Path) -> Result<(InverseProblem, ExactReference), ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let entries = split_entries(&text, |k| PROBLEM_KEYS.contains(&k)).map_err(|e| match e {
        ConfigError::Line { line, message } => {
            ConfigError::General(format!("{}:{line}: {message}", path.display()))
        }
        other => other,
    })?;
    custom_problem(|k| entries.get(k).map(|e| e.value.as_str())).map_err(|e| {
        match entries.get(e.key()) {
            Some(entry) => ConfigError::General(format!("{}:{}: {e}", path.display(), entry.line)),
            None => ConfigError::General(format!("{}: {e}", path.display())),
        }
    })
}

pub fn parse_config_in(source: &str, base: &Path) -> Result<RunConfig, ConfigError> {
    let entries = split_entries(source, |k| {
        RUN_KEYS.contains(&k) || PROBLEM_KEYS.contains(&k)
    })?;
    let get = |k: &str| entries.get(k);

    let problem_source = match get("problem") {
        None => ProblemSource::Example1,
        Some(e) => match e.value.as_str() {
            "example1" => ProblemSource::Example1,
            "example2" => ProblemSource::Example2,
            "custom" => ProblemSource::Custom,
            path => ProblemSource::File(base.join(path)),
        },
    };
    if problem_source != ProblemSource::Custom {
        if let Some((key, e)) = entries
            .iter()
            .find(|(k, _)| PROBLEM_KEYS.contains(&k.as_str()))
        {
            return Err(at(
                e.line,
                format!("problem key '{key}' needs 'problem = custom'"),
            ));
        }
    }
    let (mut problem, exact) = match &problem_source {
        ProblemSource::Example1 => example_one(),
        ProblemSource::Example2 => example_two(),
        ProblemSource::Custom => custom_problem(|k| get(k).map(|e| e.value.as_str()))
            .map_err(|e| problem_error(&entries, e))?,
        ProblemSource::File(path) => load_problem_file(path)?,
    };

    let families = match get("family") {
        None => vec![WaveletFamily::Taylor],
        Some(e) => match e.value.as_str() {
            "taylor" => vec![WaveletFamily::Taylor],
            "chebyshev" => vec![WaveletFamily::ChebyshevFirstKind],
            "both" => vec![WaveletFamily::Taylor, WaveletFamily::ChebyshevFirstKind],
            other => {
                return Err(at(
                    e.line,
                    format!("family must be taylor, chebyshev or both, found '{other}'"),
                ))
            }
        },
    };

    let k = match get("k") {
        Some(e) => integer(e, "k")?,
        None => 4,
    };
    let degrees = match get("M") {
        Some(e) => integer(e, "M")?,
        None => 4,
    };
    if !(1..=20).contains(&k) {
        return Err(at(
            get("k").map_or(0, |e| e.line),
            format!("k must be between 1 and 20, found {k}"),
        ));
    }
    if degrees < 1 {
        return Err(at(get("M").map_or(0, |e| e.line), "M must be at least 1"));
    }

    let t_end = match get("t_end") {
        Some(e) => {
            let v = number(e, "t_end")?;
            if !(v > 0.0) {
                return Err(at(e.line, "t_end must be positive"));
            }
            v
        }
        None => problem.horizon,
    };
    let dt = match get("dt") {
        Some(e) => number(e, "dt")?,
        None => 1e-3,
    };
    let dt_line = get("dt").or(get("t_end")).map_or(0, |e| e.line);
    if !(dt > 0.0) {
        return Err(at(dt_line, "dt must be positive"));
    }
    let steps = step_count(t_end, dt).map_err(|e| at(dt_line, e.to_string()))?;
    problem.horizon = t_end;

    let report_x = match get("report_x") {
        Some(e) => {
            let xs = list(e, "report_x")?;
            if let Some(x) = xs.iter().find(|x| !(0.0..=1.0).contains(*x)) {
                return Err(at(e.line, format!("report_x value {x} outside [0, 1]")));
            }
            xs
        }
        None => (1..8).map(|i| i as f64 / 8.0).collect(),
    };
    let on_grid = |t: f64| {
        let r = (t / dt).round();
        r >= 0.0 && r <= steps as f64 && (r * dt - t).abs() <= GRID_TOL.max(1e-9 * dt)
    };
    let report_t = match get("report_t") {
        Some(e) => {
            let ts = list(e, "report_t")?;
            if let Some(t) = ts.iter().find(|&&t| !on_grid(t)) {
                return Err(at(
                    e.line,
                    format!("report_t value {t} is not a time step in [0, {t_end}]"),
                ));
            }
            ts
        }
        None => (1..=10)
            .map(|i| ((i as f64 * t_end / 10.0) / dt).round() * dt)
            .collect(),
    };

    let solver = match get("solver") {
        None => LinearMethod::DirectLu,
        Some(e) => match e.value.as_str() {
            "lu" => LinearMethod::DirectLu,
            "gmres" => LinearMethod::RestartedGmres,
            other => {
                return Err(at(
                    e.line,
                    format!("solver must be lu or gmres, found '{other}'"),
                ))
            }
        },
    };
    let gmres_tol = match get("gmres_tol") {
        Some(e) => {
            let v = number(e, "gmres_tol")?;
            if !(v > 0.0) {
                return Err(at(e.line, "gmres_tol must be positive"));
            }
            Some(v)
        }
        None => None,
    };
    let output_dir = get("output_dir").map_or_else(|| base.join("output"), |e| base.join(&e.value));

    Ok(RunConfig {
        source: problem_source,
        problem,
        exact,
        families,
        k: k as u32,
        degrees,
        dt,
        t_end,
        report_x,
        report_t,
        solver,
        gmres_tol,
        output_dir,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_filled() {
        let cfg =
            parse_config("problem = example1\nfamily = taylor\ndt = 1e-3\nt_end = 1.0").unwrap();
        assert_eq!(cfg.k, 4);
        assert_eq!(cfg.degrees, 4);
        assert_eq!(cfg.solver, LinearMethod::DirectLu);
        assert_eq!(
            cfg.report_x,
            vec![0.125, 0.25, 0.375, 0.5, 0.625, 0.75, 0.875]
        );
        assert_eq!(cfg.report_t.len(), 10);
        assert_eq!(cfg.steps(), 1000);
        assert_eq!(cfg.families, vec![WaveletFamily::Taylor]);
    }

    #[test]
    fn non_dividing_step_is_rejected_with_line() {
        match parse_config("dt = 0.3\nt_end = 1.0") {
            Err(ConfigError::Line { line, message }) => {
                assert_eq!(line, 1);
                assert!(message.contains("does not divide"), "{message}");
            }
            other => panic!("expected a line error, got {other:?}"),
        }
    }

    #[test]
    fn both_families_are_scheduled() {
        let cfg = parse_config("family = both").unwrap();
        assert_eq!(cfg.families.len(), 2);
    }

    #[test]
    fn example_two_uses_its_own_horizon() {
        let cfg = parse_config("problem = example2\ndt = 1e-2").unwrap();
        assert_eq!(cfg.t_end, 0.5);
        assert!((cfg.report_t[0] - 0.05).abs() < 1e-15);
        assert!((cfg.report_t[9] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn comments_lists_and_overrides() {
        let cfg = parse_config(
            "# heading\nproblem = example1 # trailing\nreport_x = [0.1, 0.9]\nreport_t = 0.5, 1.0\nsolver = gmres\ngmres_tol = 1e-10\nk = 3\nM = 5\n",
        )
        .unwrap();
        assert_eq!(cfg.report_x, vec![0.1, 0.9]);
        assert_eq!(cfg.report_t, vec![0.5, 1.0]);
        assert_eq!(cfg.solver, LinearMethod::RestartedGmres);
        assert_eq!(cfg.gmres_tol, Some(1e-10));
        assert_eq!((cfg.k, cfg.degrees), (3, 5));
    }

    fn line_of(src: &str) -> usize {
        match parse_config(src) {
            Err(ConfigError::Line { line, .. }) => line,
            other => panic!("expected a line error for {src:?}, got {other:?}"),
        }
    }

    #[test]
    fn errors_point_at_lines() {
        assert_eq!(line_of("k = 4\nbogus = 1"), 2);
        assert_eq!(line_of("family = haar"), 1);
        assert_eq!(line_of("\n\nreport_x = 0.5, 1.5"), 3);
        assert_eq!(line_of("report_t = 0.0005"), 1);
        assert_eq!(line_of("k = 4\nk = 5"), 2);
        assert_eq!(line_of("dt = abc"), 1);
        assert_eq!(line_of("just text"), 1);
        assert_eq!(line_of("A = 1"), 1);
        assert_eq!(line_of("solver = qr"), 1);
    }

    const CUSTOM: &str = "problem = custom
A = 1
B = 2
psi = -(2 + x*t^2)*exp(t)
y0 = x
y0_x = 1
y0_xx = 0
f0 = 0
f0_t = 0
f1 = exp(t)
f1_t = exp(t)
Q = 0.5*exp(t)
Q_t = 0.5*exp(t)
x_in = 0.5
exact_y = x*exp(t)
exact_X = 1 + t^2
dt = 0.01
";

    #[test]
    fn inline_custom_problem() {
        let cfg = parse_config(CUSTOM).unwrap();
        assert_eq!(cfg.source, ProblemSource::Custom);
        assert!(cfg.exact.is_present());
        assert_eq!(cfg.problem.diffusion, 1.0);
        assert!(((cfg.problem.source)(1.0, 1.0) + 3.0 * 1f64.exp()).abs() < 1e-12);
    }

    #[test]
    fn malformed_expression_reports_its_line() {
        let src = CUSTOM.replace("y0_x = 1", "y0_x = 1 +");
        assert_eq!(line_of(&src), 6);
        let src = CUSTOM.replace("f1 = exp(t)", "f1 = exp(x)");
        assert_eq!(line_of(&src), 10);
    }

    #[test]
    fn missing_custom_key_is_a_general_error() {
        let src = CUSTOM.replace("Q_t = 0.5*exp(t)\n", "");
        assert!(matches!(parse_config(&src), Err(ConfigError::General(m)) if m.contains("Q_t")));
    }
}

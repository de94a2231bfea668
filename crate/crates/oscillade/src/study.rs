//! Frequency sweeps, decay-order fits, artifact output and self checks.
//!
//! [`run_study`] measures `max_t ‖u*(t) − U⁽ⁿ⁾(t)‖_Y` for every requested
//! frequency and truncation order, writes the rows as CSV plus a gnuplot
//! script, and [`fit_order`] extracts the empirical decay exponent from
//! the sweep.  [`dump_coefficients`] tabulates the mode coefficients of
//! the built-in examples at sample points, and [`verify_suite`] replays
//! the crate's structural identities as a pass/fail checklist that a
//! deployment can run without the test harness.
//!
//! Workers fan out over frequencies; each owns its problem instance and
//! the merged report is ordered by `(omega, n)` regardless of scheduling,
//! so identical configurations yield bit-identical CSV output.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use ndarray::Array1;
use num_complex::Complex64;

use crate::combinatorics::{
    enumerate_multi_indices, rational_times_i_power, series_coeff, MultiIndex, Rational,
};
use crate::expansion::{Approximant, ExpansionBuilder};
use crate::opcalculus::OperatorCalculus;
use crate::operators::{ad_power, commutator, OperatorMatrix};
use crate::oracle::{duhamel_power, exact_heat_state, exact_transport_states, QuadratureSpec};
use crate::problems::{
    dense_probe_problem, heat_problem, transport_problem, zero_forcing_problem, ProblemSpec,
    HEAT_DEFAULT_MODES, TRANSPORT_DEFAULT_POINTS,
};
use crate::{Error, Result};

/// Which model problem a study sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExampleKind {
    /// Damped heat flow with constant input profile (closed-form oracle).
    Heat,
    /// One-way transport with a chirped cosine profile (characteristic
    /// oracle).
    Transport,
    /// The zero-input canary: every order above zero must be exactly the
    /// free flow.
    Custom,
}

impl ExampleKind {
    /// Stable tag used in filenames and the CLI.
    pub fn tag(&self) -> &'static str {
        match self {
            ExampleKind::Heat => "heat",
            ExampleKind::Transport => "transport",
            ExampleKind::Custom => "custom",
        }
    }
}

impl fmt::Display for ExampleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl std::str::FromStr for ExampleKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "heat" => Ok(ExampleKind::Heat),
            "transport" => Ok(ExampleKind::Transport),
            "custom" => Ok(ExampleKind::Custom),
            other => Err(Error::Config(format!(
                "unknown example '{other}' (expected heat, transport or custom)"
            ))),
        }
    }
}

/// Highest truncation order allowed without the explicit override flag.
pub const DEFAULT_MAX_ORDER: usize = 3;

/// Highest truncation order allowed even with the override flag.
pub const OVERRIDE_MAX_ORDER: usize = 6;

/// Everything a frequency sweep needs.  All fields have defaults; a
/// config file supplies `key = value` lines and CLI flags override both.
#[derive(Debug, Clone, PartialEq)]
pub struct StudyConfig {
    /// Which model problem to sweep.
    pub example: ExampleKind,
    /// Profile parameter of the transport example (ignored elsewhere).
    pub c: f64,
    /// Frequencies to sweep; each must exceed 1.
    pub omegas: Vec<f64>,
    /// Largest truncation order to evaluate.
    pub n_max: usize,
    /// Permit orders above [`DEFAULT_MAX_ORDER`] (up to
    /// [`OVERRIDE_MAX_ORDER`]); the examples are smooth enough, but high
    /// orders are exploration territory, hence the explicit opt-in.
    pub allow_high_order: bool,
    /// Spatial resolution; `None` picks the per-example default.
    pub grid_m: Option<usize>,
    /// Number of equispaced evaluation times on `[0, t*]`.
    pub time_samples: usize,
    /// Directory receiving the CSV and plot script.
    pub output_dir: PathBuf,
}

impl Default for StudyConfig {
    fn default() -> Self {
        StudyConfig {
            example: ExampleKind::Heat,
            c: 1.0,
            omegas: vec![10.0, 31.6, 100.0, 316.0, 1000.0],
            n_max: DEFAULT_MAX_ORDER,
            allow_high_order: false,
            grid_m: None,
            time_samples: 201,
            output_dir: PathBuf::from("study_out"),
        }
    }
}

/// Optional CLI-level overrides applied on top of a parsed config file.
#[derive(Debug, Clone, Default)]
pub struct StudyOverrides {
    pub example: Option<ExampleKind>,
    pub omegas: Option<Vec<f64>>,
    pub n_max: Option<usize>,
    pub output_dir: Option<PathBuf>,
    pub allow_high_order: bool,
}

/// Parse a comma- or whitespace-separated list of frequencies.
pub fn parse_frequency_list(text: &str) -> Result<Vec<f64>> {
    let items: Vec<&str> = text
        .split(|ch: char| ch == ',' || ch.is_whitespace())
        .filter(|s| !s.is_empty())
        .collect();
    if items.is_empty() {
        return Err(Error::Config("empty frequency list".to_string()));
    }
    items
        .into_iter()
        .map(|s| {
            s.parse::<f64>()
                .map_err(|_| Error::Config(format!("'{s}' is not a number")))
        })
        .collect()
}

fn parse_bool(value: &str, key: &str) -> Result<bool> {
    match value.trim().to_ascii_lowercase().as_str() {
        "true" | "yes" | "1" | "on" => Ok(true),
        "false" | "no" | "0" | "off" => Ok(false),
        other => Err(Error::Config(format!("{key}: '{other}' is not a boolean"))),
    }
}

fn parse_count(value: &str, key: &str) -> Result<usize> {
    value
        .trim()
        .parse::<usize>()
        .map_err(|_| Error::Config(format!("{key}: '{value}' is not a count")))
}

impl StudyConfig {
    /// Parse the flat `key = value` config format.  Lines starting with
    /// `#` and blank lines are skipped; every key is optional; unknown
    /// keys are rejected so typos cannot silently fall back to defaults.
    pub fn parse_str(text: &str) -> Result<StudyConfig> {
        let mut config = StudyConfig::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("line {}: expected 'key = value', got '{line}'", idx + 1))
            })?;
            let key = key.trim().to_ascii_lowercase();
            let value = value.trim().trim_matches('"');
            match key.as_str() {
                "example" => config.example = value.parse()?,
                "c" => {
                    config.c = value
                        .parse::<f64>()
                        .map_err(|_| Error::Config(format!("c: '{value}' is not a number")))?;
                }
                "omegas" => config.omegas = parse_frequency_list(value)?,
                "n_max" => config.n_max = parse_count(value, "n_max")?,
                "allow_high_order" => config.allow_high_order = parse_bool(value, "allow_high_order")?,
                "grid_m" => config.grid_m = Some(parse_count(value, "grid_m")?),
                "time_samples" => config.time_samples = parse_count(value, "time_samples")?,
                "output_dir" => config.output_dir = PathBuf::from(value),
                other => {
                    return Err(Error::Config(format!("unknown key '{other}' on line {}", idx + 1)))
                }
            }
        }
        Ok(config)
    }

    /// Read and parse a config file.
    pub fn from_file(path: &Path) -> Result<StudyConfig> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse_str(&text)
    }

    /// Apply CLI-level overrides on top of this configuration.
    pub fn apply_overrides(&mut self, overrides: &StudyOverrides) {
        if let Some(example) = overrides.example {
            self.example = example;
        }
        if let Some(omegas) = &overrides.omegas {
            self.omegas = omegas.clone();
        }
        if let Some(n_max) = overrides.n_max {
            self.n_max = n_max;
        }
        if let Some(dir) = &overrides.output_dir {
            self.output_dir = dir.clone();
        }
        if overrides.allow_high_order {
            self.allow_high_order = true;
        }
    }

    /// Check every documented invariant, returning a config error naming
    /// the first violation.
    pub fn validate(&self) -> Result<()> {
        if self.omegas.is_empty() {
            return Err(Error::Config("at least one frequency is required".to_string()));
        }
        for &w in &self.omegas {
            if !(w > 1.0) || !w.is_finite() {
                return Err(Error::Config(format!("frequencies must exceed 1, got {w}")));
            }
        }
        let cap = if self.allow_high_order { OVERRIDE_MAX_ORDER } else { DEFAULT_MAX_ORDER };
        if self.n_max > cap {
            return Err(Error::Config(format!(
                "n_max = {} exceeds {} (pass allow_high_order for orders up to {})",
                self.n_max, cap, OVERRIDE_MAX_ORDER
            )));
        }
        if self.time_samples < 2 {
            return Err(Error::Config(format!(
                "time_samples must be at least 2, got {}",
                self.time_samples
            )));
        }
        if !self.c.is_finite() {
            return Err(Error::Config(format!("c must be finite, got {}", self.c)));
        }
        if let Some(m) = self.grid_m {
            if m < 4 {
                return Err(Error::Config(format!("grid_m must be at least 4, got {m}")));
            }
        }
        Ok(())
    }

    /// The spatial resolution after applying per-example defaults.
    pub fn grid_points(&self) -> usize {
        self.grid_m.unwrap_or(match self.example {
            ExampleKind::Heat | ExampleKind::Custom => HEAT_DEFAULT_MODES,
            ExampleKind::Transport => TRANSPORT_DEFAULT_POINTS,
        })
    }
}

/// One measured error: the worst Y-norm distance between the reference
/// solution and the order-`n` truncation over the sampled times.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorRow {
    pub omega: f64,
    pub n: usize,
    pub error: f64,
}

/// The assembled sweep, ordered by `(omega, n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorReport {
    rows: Vec<ErrorRow>,
}

impl ErrorReport {
    /// Sort rows into the canonical `(omega, n)` order.
    pub fn new(mut rows: Vec<ErrorRow>) -> Self {
        rows.sort_by(|a, b| a.omega.total_cmp(&b.omega).then(a.n.cmp(&b.n)));
        ErrorReport { rows }
    }

    pub fn rows(&self) -> &[ErrorRow] {
        &self.rows
    }

    /// The error recorded for one `(omega, n)` pair, if present.
    pub fn error_at(&self, omega: f64, n: usize) -> Option<f64> {
        self.rows
            .iter()
            .find(|r| r.omega == omega && r.n == n)
            .map(|r| r.error)
    }

    /// Truncation orders present in the report, ascending.
    pub fn orders(&self) -> Vec<usize> {
        let mut ns: Vec<usize> = self.rows.iter().map(|r| r.n).collect();
        ns.sort_unstable();
        ns.dedup();
        ns
    }

    /// Distinct frequencies present in the report, ascending.
    pub fn frequencies(&self) -> Vec<f64> {
        let mut ws: Vec<f64> = self.rows.iter().map(|r| r.omega).collect();
        ws.sort_by(f64::total_cmp);
        ws.dedup_by(|a, b| a.to_bits() == b.to_bits());
        ws
    }

    /// Serialize with the header `omega,n,error,log10_error`.  Floats use
    /// the shortest round-trippable decimal form, so
    /// `from_csv(to_csv(r)) == r` holds exactly.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("omega,n,error,log10_error\n");
        for row in &self.rows {
            out.push_str(&format!("{},{},{},{}\n", row.omega, row.n, row.error, row.error.log10()));
        }
        out
    }

    /// Parse the CSV produced by [`ErrorReport::to_csv`].
    pub fn from_csv(text: &str) -> Result<ErrorReport> {
        let mut lines = text.lines();
        match lines.next() {
            Some("omega,n,error,log10_error") => {}
            other => {
                return Err(Error::Config(format!(
                    "unexpected CSV header: {:?}",
                    other.unwrap_or("")
                )))
            }
        }
        let mut rows = Vec::new();
        for (idx, line) in lines.enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 4 {
                return Err(Error::Config(format!(
                    "row {}: expected 4 fields, got {}",
                    idx + 2,
                    fields.len()
                )));
            }
            let parse = |s: &str, what: &str| -> Result<f64> {
                s.parse::<f64>()
                    .map_err(|_| Error::Config(format!("row {}: bad {what} '{s}'", idx + 2)))
            };
            let omega = parse(fields[0], "omega")?;
            let n = fields[1].parse::<usize>().map_err(|_| {
                Error::Config(format!("row {}: bad order '{}'", idx + 2, fields[1]))
            })?;
            let error = parse(fields[2], "error")?;
            parse(fields[3], "log10_error")?;
            rows.push(ErrorRow { omega, n, error });
        }
        Ok(ErrorReport::new(rows))
    }

    /// A gnuplot script with the data inlined: one log-log panel of error
    /// versus frequency (a line per order) and one semi-log panel of
    /// error versus order (a line per frequency).
    pub fn plot_script(&self, stem: &str) -> String {
        let mut body = String::new();
        for row in &self.rows {
            body.push_str(&format!("{},{},{}\n", row.omega, row.n, row.error));
        }
        let n_max = self.orders().last().copied().unwrap_or(0);
        let omegas: Vec<String> = self.frequencies().iter().map(|w| format!("{w}")).collect();
        let omega_words = omegas.join(" ");
        format!(
            "# Truncation error decay: {stem}\n\
             # Render with: gnuplot {stem}_errors.gp\n\
             set datafile separator comma\n\
             $rows << EOD\n{body}EOD\n\
             set terminal pngcairo size 960,640\n\
             set key left bottom\n\
             set logscale xy\n\
             set xlabel 'frequency'\n\
             set ylabel 'max error over the time window'\n\
             set output '{stem}_error_vs_omega.png'\n\
             plot for [n=0:{n_max}] $rows using 1:($2 == n ? $3 : 1/0) \\\n\
             \twith linespoints pointtype 7 title sprintf('order %d', n)\n\
             unset logscale x\n\
             set xlabel 'truncation order'\n\
             set xtics 1\n\
             set output '{stem}_error_vs_order.png'\n\
             omegas = \"{omega_words}\"\n\
             plot for [i=1:words(omegas)] $rows \\\n\
             \tusing 2:(abs($1 - real(word(omegas, i))) <= 1e-9 * abs(real(word(omegas, i))) ? $3 : 1/0) \\\n\
             \twith linespoints pointtype 7 title sprintf('omega = %s', word(omegas, i))\n"
        )
    }

    /// Write `<stem>_errors.csv` and `<stem>_errors.gp` under `dir`,
    /// creating the directory if needed.  Returns the two paths.
    pub fn write_artifacts(&self, dir: &Path, stem: &str) -> Result<(PathBuf, PathBuf)> {
        fs::create_dir_all(dir)
            .map_err(|e| Error::Io(format!("creating {}: {e}", dir.display())))?;
        let csv_path = dir.join(format!("{stem}_errors.csv"));
        fs::write(&csv_path, self.to_csv())
            .map_err(|e| Error::Io(format!("writing {}: {e}", csv_path.display())))?;
        let gp_path = dir.join(format!("{stem}_errors.gp"));
        fs::write(&gp_path, self.plot_script(stem))
            .map_err(|e| Error::Io(format!("writing {}: {e}", gp_path.display())))?;
        Ok((csv_path, gp_path))
    }
}

/// Least-squares slope of `log10(error)` against `log10(omega)` for one
/// truncation order.  Requires at least three distinct frequencies with
/// nonzero error; an order-`n` truncation should sit near `-(n+1)`.
pub fn fit_order(report: &ErrorReport, n: usize) -> Result<f64> {
    let points: Vec<(f64, f64)> = report
        .rows
        .iter()
        .filter(|r| r.n == n && r.error > 0.0 && r.error.is_finite())
        .map(|r| (r.omega.log10(), r.error.log10()))
        .collect();
    let mut distinct: Vec<f64> = points.iter().map(|p| p.0).collect();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup_by(|a, b| a.to_bits() == b.to_bits());
    if distinct.len() < 3 {
        return Err(Error::InsufficientData {
            what: "distinct frequencies with nonzero error",
            got: distinct.len(),
            needed: 3,
        });
    }
    let count = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / count;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / count;
    let mut num = 0.0;
    let mut den = 0.0;
    for (x, y) in points {
        num += (x - mean_x) * (y - mean_y);
        den += (x - mean_x) * (x - mean_x);
    }
    Ok(num / den)
}

/// Worker count: `OSCILLADE_THREADS` if set to a positive integer,
/// otherwise the machine's available parallelism, clamped to the number
/// of jobs.
fn thread_budget(jobs: usize) -> usize {
    let available = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1);
    let requested = std::env::var("OSCILLADE_THREADS")
        .ok()
        .and_then(|s| s.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or(available);
    requested.min(jobs).max(1)
}

fn build_problem(config: &StudyConfig, omega: f64) -> Result<ProblemSpec> {
    let m = config.grid_points();
    match config.example {
        ExampleKind::Heat => heat_problem(omega, m),
        ExampleKind::Transport => transport_problem(omega, config.c, m),
        ExampleKind::Custom => zero_forcing_problem(omega, m),
    }
}

/// Errors for one frequency, all orders at once.
fn sweep_one_frequency(
    config: &StudyConfig,
    omega: f64,
    template: Option<&Approximant>,
) -> Result<Vec<ErrorRow>> {
    let prob = build_problem(config, omega)?;
    let approximant = match template {
        Some(t) => t.with_frequency(omega)?,
        None => ExpansionBuilder::for_problem(&prob)?.approximant(config.n_max, omega)?,
    };
    let samples = config.time_samples;
    let times: Vec<f64> =
        (0..samples).map(|j| prob.t_star() * j as f64 / (samples - 1) as f64).collect();
    let references: Vec<Array1<Complex64>> = match config.example {
        ExampleKind::Heat => {
            times.iter().map(|&t| exact_heat_state(prob.grid(), t, omega)).collect()
        }
        ExampleKind::Transport => exact_transport_states(
            prob.grid().points(),
            &times,
            omega,
            config.c,
            &QuadratureSpec::default(),
        )?,
        ExampleKind::Custom => times.iter().map(|&t| prob.flow(t)).collect(),
    };
    let mut worst = vec![0.0f64; config.n_max + 1];
    for (j, &t) in times.iter().enumerate() {
        let sums = approximant.evaluate_partial_sums(t);
        for (n, acc) in worst.iter_mut().enumerate() {
            let diff = &sums[n] - &references[j];
            *acc = acc.max(prob.y_norm(&diff));
        }
    }
    Ok(worst
        .into_iter()
        .enumerate()
        .map(|(n, error)| ErrorRow { omega, n, error })
        .collect())
}

/// The sweep itself, without touching the filesystem.
///
/// `threads` bounds the worker count; the result is identical for every
/// thread count because each frequency is processed in isolation and the
/// merge is ordered.  For the transport example the expansion terms are
/// built once and shared across frequencies (they do not depend on
/// `omega`); the heat and canary examples embed a frequency-dependent
/// phase in their initial data, so those rebuild per frequency.
pub fn run_study_in_memory(config: &StudyConfig, threads: usize) -> Result<ErrorReport> {
    config.validate()?;
    let threads = threads.clamp(1, config.omegas.len());
    let template = if config.example == ExampleKind::Transport {
        let prob = build_problem(config, config.omegas[0])?;
        Some(ExpansionBuilder::for_problem(&prob)?.approximant(config.n_max, config.omegas[0])?)
    } else {
        None
    };
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<(usize, Result<Vec<ErrorRow>>)>> = Mutex::new(Vec::new());
    std::thread::scope(|scope| {
        for _ in 0..threads {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                if i >= config.omegas.len() {
                    break;
                }
                let rows = sweep_one_frequency(config, config.omegas[i], template.as_ref());
                slots.lock().expect("study worker poisoned").push((i, rows));
            });
        }
    });
    let mut slots = slots.into_inner().expect("study worker poisoned");
    slots.sort_by_key(|(i, _)| *i);
    let mut rows = Vec::new();
    for (_, result) in slots {
        rows.extend(result?);
    }
    Ok(ErrorReport::new(rows))
}

/// Run the sweep and write `<example>_errors.csv` and
/// `<example>_errors.gp` into the configured output directory.
pub fn run_study(config: &StudyConfig) -> Result<ErrorReport> {
    let report = run_study_in_memory(config, thread_budget(config.omegas.len()))?;
    report.write_artifacts(&config.output_dir, config.example.tag())?;
    Ok(report)
}

/// On the lowest heat mode every coefficient reduces to a scalar times
/// the flow: `i^{-r} (-1)^{r-s} / (s! (r-s)!)`.
pub(crate) fn heat_mode_scalar(r: usize, s: usize) -> Complex64 {
    let fact = |m: usize| (1..=m).product::<usize>() as f64;
    let sign = if (r - s) % 2 == 0 { 1.0 } else { -1.0 };
    Complex64::new(0.0, -1.0).powu(r as u32) * (sign / (fact(s) * fact(r - s)))
}

/// One sampled coefficient value.
#[derive(Debug, Clone)]
pub struct CoefficientRow {
    pub r: usize,
    pub s: usize,
    pub t: f64,
    pub x: f64,
    /// `p_{r,s}(t)` sampled at `x`.
    pub value: Complex64,
    /// For the heat example: the scalar `p_{r,s}(t) / (e^{tL}u0)(x)`
    /// predicted by the closed form (every commutator vanishes there).
    pub reduced: Option<Complex64>,
}

/// Mode coefficients of one example evaluated at sample points.
#[derive(Debug, Clone)]
pub struct CoefficientTable {
    pub example: ExampleKind,
    pub omega: f64,
    rows: Vec<CoefficientRow>,
}

impl CoefficientTable {
    pub fn rows(&self) -> &[CoefficientRow] {
        &self.rows
    }

    /// The rows for one `(r, s)` channel.
    pub fn channel(&self, r: usize, s: usize) -> Vec<&CoefficientRow> {
        self.rows.iter().filter(|row| row.r == r && row.s == s).collect()
    }
}

impl fmt::Display for CoefficientTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "mode coefficients, example = {}, omega = {} (coefficients themselves are frequency-free; omega only sets the initial phase)",
            self.example, self.omega
        )?;
        writeln!(f, "{:>2} {:>2} {:>6} {:>9}  {:>24}  {}", "r", "s", "t", "x", "p_rs", "reduced scalar")?;
        for row in &self.rows {
            let value = format!("{:+.6}{:+.6}i", row.value.re, row.value.im);
            let reduced = match row.reduced {
                Some(z) => format!("{:+.6}{:+.6}i", z.re, z.im),
                None => "-".to_string(),
            };
            writeln!(
                f,
                "{:>2} {:>2} {:>6.2} {:>9.5}  {:>24}  {}",
                row.r, row.s, row.t, row.x, value, reduced
            )?;
        }
        Ok(())
    }
}

/// Evaluate every `p_{r,s}` with `r ≤ r_max` at a few sample points.
///
/// The frequency is fixed at 100 (the coefficients do not depend on it;
/// for the heat example it only sets the `e^{-i/omega}` phase of the
/// initial data).  `r_max` is capped at [`DEFAULT_MAX_ORDER`].
pub fn dump_coefficients(example: ExampleKind, r_max: usize) -> Result<CoefficientTable> {
    if r_max > DEFAULT_MAX_ORDER {
        return Err(Error::Config(format!(
            "r_max = {r_max} exceeds the supported coefficient table depth {DEFAULT_MAX_ORDER}"
        )));
    }
    let omega = 100.0;
    let (prob, targets): (ProblemSpec, [f64; 3]) = match example {
        ExampleKind::Heat => (heat_problem(omega, 32)?, [0.6, 1.5, 2.4]),
        // 225 points make the spacing 3.5/224 = 1/64 binary-exact.
        ExampleKind::Transport => (transport_problem(omega, 1.0, 225)?, [-0.5, 0.1, 0.7]),
        ExampleKind::Custom => (zero_forcing_problem(omega, 16)?, [0.6, 1.5, 2.4]),
    };
    let points = prob.grid().points();
    let mut indices: Vec<usize> = targets
        .iter()
        .map(|&target| {
            points
                .iter()
                .enumerate()
                .min_by(|a, b| (a.1 - target).abs().total_cmp(&(b.1 - target).abs()))
                .map(|(i, _)| i)
                .expect("grids are never empty")
        })
        .collect();
    indices.dedup();
    let mut builder = ExpansionBuilder::for_problem(&prob)?;
    let mut rows = Vec::new();
    for r in 0..=r_max {
        for s in 0..=r {
            let coeff = builder.mode_coefficient(r, s)?;
            for &t in &[0.5, 1.0] {
                let values = coeff.evaluate(prob.semigroup(), t);
                let reduced = match example {
                    ExampleKind::Heat => Some(heat_mode_scalar(r, s)),
                    _ => None,
                };
                for &idx in &indices {
                    rows.push(CoefficientRow {
                        r,
                        s,
                        t,
                        x: points[idx],
                        value: values[idx],
                        reduced,
                    });
                }
            }
        }
    }
    Ok(CoefficientTable { example, omega, rows })
}

/// Outcome of one named self check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckStatus {
    Pass,
    Fail,
    Skipped,
}

/// One named self check with a human-readable measurement.
#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: &'static str,
    pub status: CheckStatus,
    pub detail: String,
}

/// The checklist produced by [`verify_suite`].
#[derive(Debug, Clone)]
pub struct VerifySummary {
    pub checks: Vec<CheckResult>,
}

impl VerifySummary {
    /// True when no check failed (skipped checks do not count against).
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != CheckStatus::Fail)
    }

    /// The result of a check by name.
    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }
}

impl fmt::Display for VerifySummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for check in &self.checks {
            let tag = match check.status {
                CheckStatus::Pass => "PASS",
                CheckStatus::Fail => "FAIL",
                CheckStatus::Skipped => "SKIP",
            };
            writeln!(f, "[{tag}] {}: {}", check.name, check.detail)?;
        }
        Ok(())
    }
}

/// The exact weight family used when re-deriving structures inside the
/// verify suite.  Injecting a deliberately wrong family must flip the
/// weight-sensitive checks to FAIL; that is tested, so the suite cannot
/// silently degenerate into comparing a value with itself.
pub type SeriesWeightFn<'a> = &'a dyn Fn(usize, usize, &MultiIndex) -> Result<Rational>;

fn run_check(
    name: &'static str,
    body: impl FnOnce() -> Result<(bool, String)>,
) -> CheckResult {
    match body() {
        Ok((true, detail)) => CheckResult { name, status: CheckStatus::Pass, detail },
        Ok((false, detail)) => CheckResult { name, status: CheckStatus::Fail, detail },
        Err(e) => CheckResult { name, status: CheckStatus::Fail, detail: format!("errored: {e}") },
    }
}

fn rel_vec(prob: &ProblemSpec, got: &Array1<Complex64>, want: &Array1<Complex64>) -> f64 {
    prob.y_norm(&(got - want)) / prob.y_norm(want).max(1e-300)
}

fn rel_matrix(got: &OperatorMatrix, want: &OperatorMatrix) -> Result<f64> {
    let scale = got.max_abs().max(want.max_abs()).max(1e-300);
    let diff = got.add_scaled(Complex64::new(-1.0, 0.0), want)?;
    Ok(diff.max_abs() / scale)
}

/// Semigroup conjugation derivative: `d/dt e^{-tL} A e^{tL}` must equal
/// `-e^{-tL} [L, A] e^{tL}`, confirmed by second-order convergence of a
/// centred difference.
fn check_conjugation_derivative() -> Result<(bool, String)> {
    let prob = dense_probe_problem(10.0, 8, 11)?;
    let sg = prob.semigroup();
    let bracket = commutator(prob.l(), prob.alpha())?;
    let v = prob.u0().clone();
    let t0 = 0.4;
    let conjugated = |t: f64| sg.apply(-t, &prob.alpha().apply(&sg.apply(t, &v)));
    let want = sg.apply(-t0, &bracket.apply(&sg.apply(t0, &v))).mapv(|z| -z);
    let err = |h: f64| {
        let diff = (&conjugated(t0 + h) - &conjugated(t0 - h)).mapv(|z| z / (2.0 * h));
        prob.y_norm(&(&diff - &want))
    };
    let e1 = err(0.05);
    let e2 = err(0.025);
    let order = (e1 / e2).log2();
    Ok(((order - 2.0).abs() <= 0.2, format!("centred-difference order {order:.3}")))
}

/// Depth-1 split: one oscillatory Duhamel layer equals its series part
/// plus its remainder part.
fn check_single_layer_split() -> Result<(bool, String)> {
    let prob = dense_probe_problem(10.0, 9, 17)?;
    let quad = QuadratureSpec::default();
    let mut builder = ExpansionBuilder::for_problem(&prob)?;
    let split = builder.decomposition(1, 1, prob.omega(), &quad)?;
    let t = 0.8;
    let want = duhamel_power(&prob, &quad, 1, t)?;
    let got = split.total_at(t)?;
    let rel = rel_vec(&prob, &got, &want);
    Ok((rel < 1e-8, format!("relative defect {rel:.2e}")))
}

/// Regrouping identity, with the left side reassembled from the injected
/// weight family: `U⁽ⁿ⁾(t) = e^{tL}u0 + Σ_r ω^{-r} Σ_s e^{siωt} p_{r,s}`.
fn check_series_regrouping(weights: SeriesWeightFn<'_>) -> Result<(bool, String)> {
    let prob = dense_probe_problem(10.0, 9, 29)?;
    let omega = prob.omega();
    let t = 0.7;
    let n = 3;
    let right = ExpansionBuilder::for_problem(&prob)?.approximant(n, omega)?.evaluate(t);
    let mut calculus = OperatorCalculus::new(prob.l().clone(), prob.alpha().clone())?;
    let sg = prob.semigroup();
    let mut left = prob.flow(t);
    for r in 1..=n {
        for s in 0..=r {
            let mut p = Array1::<Complex64>::zeros(prob.dim());
            for d in s.max(1)..=r {
                for k in enumerate_multi_indices(d, r - d) {
                    let weight = weights(s, d, &k)?;
                    let scalar = rational_times_i_power(&weight, -(r as i64));
                    let word = calculus.nested(&k, d - s + 1, d)?;
                    let boundary = calculus.boundary(d - s, &k)?;
                    let seed = boundary.matrix.apply(prob.u0());
                    let applied = word.matrix.apply(&sg.apply(t, &seed));
                    p.scaled_add(scalar, &applied);
                }
            }
            let channel = Complex64::new(0.0, s as f64 * omega * t).exp();
            left.scaled_add(channel * omega.powi(-(r as i32)), &p);
        }
    }
    let rel = rel_vec(&prob, &left, &right);
    Ok((rel < 1e-10, format!("relative defect {rel:.2e}")))
}

/// Depth-2 split against the independently integrated double layer.
fn check_iterated_split() -> Result<(bool, String)> {
    let prob = dense_probe_problem(10.0, 8, 37)?;
    let quad = QuadratureSpec::default();
    let mut builder = ExpansionBuilder::for_problem(&prob)?;
    let split = builder.decomposition(2, 3, prob.omega(), &quad)?;
    let t = 0.6;
    let want = duhamel_power(&prob, &quad, 2, t)?;
    let got = split.total_at(t)?;
    let rel = rel_vec(&prob, &got, &want);
    Ok((rel < 1e-8, format!("relative defect {rel:.2e}")))
}

/// Rebuild the first two lower-boundary operators from the injected
/// weight family and compare with their hand-written commutator forms.
fn check_boundary_words(weights: SeriesWeightFn<'_>) -> Result<(bool, String)> {
    let prob = dense_probe_problem(10.0, 8, 43)?;
    let l = prob.l();
    let a = prob.alpha();
    let mut calculus = OperatorCalculus::new(l.clone(), a.clone())?;

    // Level 1, depth tuple (2):
    //   rebuilt = -a_1 * ad^2(A);  golden = -ad^2(A).
    let k1 = MultiIndex::new(vec![2]);
    let w = weights(1, 1, &k1)?;
    let rebuilt1 = calculus
        .nested(&k1, 1, 1)?
        .matrix
        .scaled(rational_times_i_power(&w, 0) * Complex64::new(-1.0, 0.0));
    let golden1 = ad_power(l, a, 2)?.scaled(Complex64::new(-1.0, 0.0));
    let rel1 = rel_matrix(&rebuilt1, &golden1)?;

    // Level 2, depth tuple (1, 2):
    //   rebuilt = -(w(2) N(1..2) + w(1) N(2..2) F1),
    //   golden  = -(1/2^{k2+1}) ad^{k2}(A ad^{k1}(A)) + ad^{k2}(A) ad^{k1}(A).
    let k2 = MultiIndex::new(vec![1, 2]);
    let f1 = calculus
        .nested(&k2, 1, 1)?
        .matrix
        .scaled(rational_times_i_power(&weights(1, 1, &k2)?, 0) * Complex64::new(-1.0, 0.0));
    let full = calculus.nested(&k2, 1, 2)?.matrix.clone();
    let top = calculus.nested(&k2, 2, 2)?.matrix.compose(&f1)?;
    let rebuilt2 = full
        .scaled(rational_times_i_power(&weights(2, 2, &k2)?, 0))
        .add_scaled(rational_times_i_power(&weights(1, 2, &k2)?, 0), &top)?
        .scaled(Complex64::new(-1.0, 0.0));
    let ad_k1 = ad_power(l, a, 1)?;
    let ad_k2 = ad_power(l, a, 2)?;
    let nested12 = ad_power(l, &a.compose(&ad_k1)?, 2)?;
    let golden2 = ad_k2
        .compose(&ad_k1)?
        .add_scaled(Complex64::new(-1.0 / 8.0, 0.0), &nested12)?;
    let rel2 = rel_matrix(&rebuilt2, &golden2)?;

    let worst = rel1.max(rel2);
    Ok((worst < 1e-12, format!("worst relative defect {worst:.2e}")))
}

/// Evaluated low-order coefficients against their closed forms: the heat
/// scalars and the transport characteristic expressions.
fn check_coefficient_values() -> Result<(bool, String)> {
    let mut worst = 0.0f64;

    let heat = heat_problem(100.0, 16)?;
    let mut builder = ExpansionBuilder::for_problem(&heat)?;
    let t = 0.5;
    let flow = heat.flow(t);
    for r in 0..=3usize {
        for s in 0..=r {
            let got = builder.mode_coefficient(r, s)?.evaluate(heat.semigroup(), t);
            let want = flow.mapv(|z| z * heat_mode_scalar(r, s));
            worst = worst.max(rel_vec(&heat, &got, &want));
        }
    }
    let heat_ok = worst < 1e-11;

    let tp = transport_problem(10.0, 1.0, 113)?;
    let mut builder = ExpansionBuilder::for_problem(&tp)?;
    let t = 0.4;
    let flow = tp.flow(t);
    let minus_i = Complex64::new(0.0, -1.0);
    let p11 = builder.mode_coefficient(1, 1)?.evaluate(tp.semigroup(), t);
    let want11 = tp.alpha().apply(&flow).mapv(|z| z * minus_i);
    let rel11 = rel_vec(&tp, &p11, &want11);
    let p22 = builder.mode_coefficient(2, 2)?.evaluate(tp.semigroup(), t);
    let want22 = tp.alpha().apply(&tp.alpha().apply(&flow)).mapv(|z| z * Complex64::new(-0.5, 0.0));
    let rel22 = rel_vec(&tp, &p22, &want22);
    let transport_ok = rel11 < 1e-8 && rel22 < 1e-8;

    Ok((
        heat_ok && transport_ok,
        format!("heat defect {worst:.2e}, transport defects {rel11:.2e} / {rel22:.2e}"),
    ))
}

/// A miniature heat sweep whose fitted slopes must sit near the
/// predicted `-(n+1)`; skipped when fewer than three frequencies are
/// supplied.
fn check_decay_order_fit(omegas: &[f64]) -> CheckResult {
    let mut distinct = omegas.to_vec();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup_by(|a, b| a.to_bits() == b.to_bits());
    if distinct.len() < 3 {
        return CheckResult {
            name: "decay_order_fit",
            status: CheckStatus::Skipped,
            detail: format!("insufficient data: {} frequencies, need 3", distinct.len()),
        };
    }
    run_check("decay_order_fit", || {
        let config = StudyConfig {
            example: ExampleKind::Heat,
            omegas: distinct,
            n_max: 1,
            grid_m: Some(16),
            time_samples: 33,
            ..StudyConfig::default()
        };
        let report = run_study_in_memory(&config, 1)?;
        let slope0 = fit_order(&report, 0)?;
        let slope1 = fit_order(&report, 1)?;
        let ok = (-1.5..=-0.5).contains(&slope0) && (-2.5..=-1.5).contains(&slope1);
        Ok((ok, format!("fitted orders {slope0:.3} (n=0), {slope1:.3} (n=1)")))
    })
}

/// Run every structural self check with the given frequency list and
/// weight family.  See [`verify_suite`] for the stock entry point.
pub fn verify_suite_with(omegas: &[f64], weights: SeriesWeightFn<'_>) -> VerifySummary {
    let checks = vec![
        run_check("conjugation_derivative", check_conjugation_derivative),
        run_check("single_layer_split", check_single_layer_split),
        run_check("series_regrouping", || check_series_regrouping(weights)),
        run_check("iterated_duhamel_split", check_iterated_split),
        run_check("boundary_word_forms", || check_boundary_words(weights)),
        run_check("low_order_coefficient_values", check_coefficient_values),
        check_decay_order_fit(omegas),
    ];
    VerifySummary { checks }
}

/// The stock self-check suite: structural identities on random dense
/// setups, coefficient closed forms, and a miniature decay-order fit
/// over `omega ∈ {10, 31.6, 100}`.
pub fn verify_suite() -> VerifySummary {
    verify_suite_with(&[10.0, 31.6, 100.0], &series_coeff)
}

//! Experiment driver: runs the engines on instance files, writes CSV traces,
//! builds Centering-minus-Standard comparison series and summary tables.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::admm::{run_standard, SolveOutcome};
use crate::centering::{run_centering, CenteringConfig};
use crate::error::{Error, Result};
use crate::lifting::Lifting;
use crate::qaplib::{known_optimum, load_instance, QapInstance};
use crate::trace::{read_trace, write_trace, TraceRecord};

/// Gap to the optimum below which a bound counts as reached in tables.
pub const REACHED_GAP: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Standard,
    Centering,
}

impl Method {
    pub const ALL: [Method; 2] = [Method::Standard, Method::Centering];

    pub fn name(self) -> &'static str {
        match self {
            Method::Standard => "standard",
            Method::Centering => "centering",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "standard" => Ok(Method::Standard),
            "centering" => Ok(Method::Centering),
            other => Err(Error::InvalidConfig(format!("unknown method '{other}'"))),
        }
    }
}

/// Runs one engine. The standard engine ignores the barrier settings.
pub fn solve(inst: &QapInstance, lift: &Lifting, method: Method, cfg: &CenteringConfig) -> Result<SolveOutcome> {
    match method {
        Method::Standard => run_standard(inst, lift, &cfg.inner, None),
        Method::Centering => run_centering(inst, lift, cfg),
    }
}

/// Loads `path`, solves with `method` and returns the instance with the
/// outcome. Write the trace with [`write_trace_file`].
pub fn run_experiment(
    path: &Path,
    method: Method,
    cfg: &CenteringConfig,
    allow_large: bool,
) -> Result<(QapInstance, SolveOutcome)> {
    cfg.validate()?;
    let inst = load_instance(path, allow_large)?;
    let lift = Lifting::build(&inst)?;
    let out = solve(&inst, &lift, method, cfg)?;
    Ok((inst, out))
}

/// Writes `contents` to `path` via a temporary file in the same directory.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => PathBuf::from("."),
    };
    std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    let mut tmp = tempfile::NamedTempFile::new_in(&dir).map_err(|e| Error::io(&dir, e))?;
    tmp.write_all(contents).map_err(|e| Error::io(path, e))?;
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}

pub fn write_trace_file(path: &Path, rows: &[TraceRecord]) -> Result<()> {
    let mut buf = Vec::new();
    write_trace(&mut buf, rows)?;
    write_atomic(path, &buf)
}

pub fn read_trace_file(path: &Path) -> Result<Vec<TraceRecord>> {
    let f = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_trace(f)
}

/// `<dir>/<instance>.<method>.csv`.
pub fn trace_path(dir: &Path, instance: &str, method: Method) -> PathBuf {
    dir.join(format!("{instance}.{method}.csv"))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Checkpoint {
    pub iter: usize,
    pub lb_centering: f64,
    pub lb_standard: f64,
    pub diff: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonSeries {
    pub instance: String,
    pub checkpoints: Vec<Checkpoint>,
}

impl ComparisonSeries {
    /// Pairs rows by iteration number. Only iterations present in both
    /// traces are kept; a repeated iteration keeps its last row.
    pub fn align(instance: &str, centering: &[TraceRecord], standard: &[TraceRecord]) -> Self {
        let by_iter = |rows: &[TraceRecord]| rows.iter().map(|r| (r.iter, r.lb)).collect::<BTreeMap<_, _>>();
        let c = by_iter(centering);
        let s = by_iter(standard);
        let checkpoints = c
            .iter()
            .filter_map(|(&iter, &lb_c)| {
                s.get(&iter).map(|&lb_s| Checkpoint {
                    iter,
                    lb_centering: lb_c,
                    lb_standard: lb_s,
                    diff: lb_c - lb_s,
                })
            })
            .collect();
        Self {
            instance: instance.to_string(),
            checkpoints,
        }
    }

    pub fn at(&self, iter: usize) -> Option<&Checkpoint> {
        self.checkpoints.iter().find(|c| c.iter == iter)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("iter,lb_centering,lb_standard,diff\n");
        for c in &self.checkpoints {
            s.push_str(&format!("{},{},{},{}\n", c.iter, c.lb_centering, c.lb_standard, c.diff));
        }
        s
    }
}

#[derive(Debug, Clone)]
pub struct Comparison {
    pub series: ComparisonSeries,
    pub standard: SolveOutcome,
    pub centering: SolveOutcome,
}

/// Runs both engines with the same shared settings on one [`Lifting`].
pub fn compare_methods(inst: &QapInstance, cfg: &CenteringConfig) -> Result<Comparison> {
    cfg.validate()?;
    let lift = Lifting::build(inst)?;
    let standard = solve(inst, &lift, Method::Standard, cfg)?;
    let centering = solve(inst, &lift, Method::Centering, cfg)?;
    let series = ComparisonSeries::align(&inst.name, &centering.trace, &standard.trace);
    Ok(Comparison {
        series,
        standard,
        centering,
    })
}

/// Plain gnuplot script plotting the `diff` column of a series CSV.
pub fn plot_script(series_csv: &str, title: &str) -> String {
    format!(
        "set datafile separator ','\n\
         set key off\n\
         set title '{title}'\n\
         set xlabel 'iteration'\n\
         set ylabel 'LB(centering) - LB(standard)'\n\
         plot '{series_csv}' every ::1 using 1:4 with lines\n"
    )
}

#[derive(Debug, Clone, PartialEq)]
pub enum MethodSummary {
    Missing,
    Unreadable(String),
    Done {
        lb: f64,
        /// First checkpoint with `opt − lb ≤ 0.5`; `None` when never reached
        /// or the optimum is unknown.
        reached_at: Option<usize>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub instance: String,
    pub optimum: Option<f64>,
    pub methods: BTreeMap<Method, MethodSummary>,
}

fn summarize(rows: &[TraceRecord], optimum: Option<f64>) -> MethodSummary {
    let Some(last) = rows.last() else {
        return MethodSummary::Unreadable("empty trace".into());
    };
    let reached_at = optimum.and_then(|opt| rows.iter().find(|r| opt - r.lb <= REACHED_GAP).map(|r| r.iter));
    MethodSummary::Done {
        lb: last.lb,
        reached_at,
    }
}

/// Scans `dir` for `<instance>.<method>.csv` traces and summarizes them one
/// row per instance. A missing directory yields an empty table.
pub fn summary_table(dir: &Path) -> Result<Vec<SummaryRow>> {
    let mut found: BTreeMap<String, BTreeMap<Method, PathBuf>> = BTreeMap::new();
    let entries = match std::fs::read_dir(dir) {
        Ok(e) => e,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Vec::new()),
        Err(e) => return Err(Error::io(dir, e)),
    };
    for entry in entries {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        let Some(file) = path.file_name().and_then(|f| f.to_str()) else { continue };
        let Some(stem) = file.strip_suffix(".csv") else { continue };
        let Some((inst, method)) = stem.rsplit_once('.') else { continue };
        if let Ok(m) = method.parse::<Method>() {
            found.entry(inst.to_string()).or_default().insert(m, path);
        }
    }
    Ok(found
        .into_iter()
        .map(|(instance, paths)| {
            let optimum = known_optimum(&instance);
            let methods = Method::ALL
                .iter()
                .map(|&m| {
                    let s = match paths.get(&m) {
                        None => MethodSummary::Missing,
                        Some(p) => match read_trace_file(p) {
                            Ok(rows) => summarize(&rows, optimum),
                            Err(e) => MethodSummary::Unreadable(e.to_string()),
                        },
                    };
                    (m, s)
                })
                .collect();
            SummaryRow {
                instance,
                optimum,
                methods,
            }
        })
        .collect())
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn render_table(rows: &[SummaryRow]) -> String {
    let mut out = String::from("instance,opt,standard_lb,standard_iter,centering_lb,centering_iter,note\n");
    for row in rows {
        let mut fields = vec![row.instance.clone(), row.optimum.map(|o| o.to_string()).unwrap_or_default()];
        let mut notes = Vec::new();
        for m in Method::ALL {
            match &row.methods[&m] {
                MethodSummary::Missing => {
                    fields.extend([String::new(), String::new()]);
                    notes.push(format!("{m} trace missing"));
                }
                MethodSummary::Unreadable(e) => {
                    fields.extend([String::new(), String::new()]);
                    notes.push(format!("{m} trace unreadable: {e}"));
                }
                MethodSummary::Done { lb, reached_at } => {
                    fields.push(format!("{lb:.6}"));
                    fields.push(reached_at.map(|i| i.to_string()).unwrap_or_default());
                }
            }
        }
        fields.push(notes.join("; "));
        let line: Vec<String> = fields.iter().map(|f| csv_field(f)).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

/// Flat `key = value` settings mirroring the command-line flag names.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub max_iters: Option<usize>,
    pub trace_every: Option<usize>,
    pub rho0: Option<f64>,
    pub mu0: Option<f64>,
    pub mu_shrink: Option<f64>,
    pub mu_floor: Option<f64>,
    pub epsilon_r: Option<f64>,
    pub tol_primal: Option<f64>,
    pub tol_dual: Option<f64>,
    pub clip_y: Option<bool>,
    pub adapt_rho: Option<bool>,
}

pub fn parse_switch(s: &str) -> Result<bool> {
    match s.trim().to_ascii_lowercase().as_str() {
        "on" | "true" | "yes" | "1" => Ok(true),
        "off" | "false" | "no" | "0" => Ok(false),
        other => Err(Error::InvalidConfig(format!("expected on/off, got '{other}'"))),
    }
}

fn parse_value<T: FromStr>(key: &str, v: &str) -> Result<T> {
    v.trim()
        .parse()
        .map_err(|_| Error::InvalidConfig(format!("bad value '{v}' for '{key}'")))
}

impl Overrides {
    /// Parses a config file. Blank lines and `#` comments are ignored; keys
    /// may use `-` or `_`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut o = Self::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(Error::InvalidConfig(format!("line {}: expected key = value", lineno + 1)));
            };
            let key = k.trim().replace('_', "-");
            match key.as_str() {
                "max-iters" => o.max_iters = Some(parse_value(&key, v)?),
                "trace-every" => o.trace_every = Some(parse_value(&key, v)?),
                "rho0" => o.rho0 = Some(parse_value(&key, v)?),
                "mu0" => o.mu0 = Some(parse_value(&key, v)?),
                "mu-shrink" => o.mu_shrink = Some(parse_value(&key, v)?),
                "mu-floor" => o.mu_floor = Some(parse_value(&key, v)?),
                "epsilon-r" => o.epsilon_r = Some(parse_value(&key, v)?),
                "tol-primal" => o.tol_primal = Some(parse_value(&key, v)?),
                "tol-dual" => o.tol_dual = Some(parse_value(&key, v)?),
                "clip-y" => o.clip_y = Some(parse_switch(v)?),
                "adapt-rho" => o.adapt_rho = Some(parse_switch(v)?),
                other => {
                    return Err(Error::InvalidConfig(format!("line {}: unknown key '{other}'", lineno + 1)));
                }
            }
        }
        Ok(o)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    /// Values set in `over` win.
    pub fn merged_with(&self, over: &Overrides) -> Overrides {
        Overrides {
            max_iters: over.max_iters.or(self.max_iters),
            trace_every: over.trace_every.or(self.trace_every),
            rho0: over.rho0.or(self.rho0),
            mu0: over.mu0.or(self.mu0),
            mu_shrink: over.mu_shrink.or(self.mu_shrink),
            mu_floor: over.mu_floor.or(self.mu_floor),
            epsilon_r: over.epsilon_r.or(self.epsilon_r),
            tol_primal: over.tol_primal.or(self.tol_primal),
            tol_dual: over.tol_dual.or(self.tol_dual),
            clip_y: over.clip_y.or(self.clip_y),
            adapt_rho: over.adapt_rho.or(self.adapt_rho),
        }
    }

    /// Defaults with these overrides applied. `clip-y` sets clipping in both
    /// phases.
    pub fn to_config(&self) -> CenteringConfig {
        let mut c = CenteringConfig::default();
        let s = &mut c.inner;
        if let Some(v) = self.max_iters {
            s.max_iters = v;
        }
        if let Some(v) = self.trace_every {
            s.trace_every = v;
        }
        if self.rho0.is_some() {
            s.rho0 = self.rho0;
        }
        if let Some(v) = self.tol_primal {
            s.tol_primal = v;
        }
        if let Some(v) = self.tol_dual {
            s.tol_dual = v;
        }
        if let Some(v) = self.clip_y {
            s.clip_y = v;
            c.clip_y_centering = v;
        }
        if let Some(v) = self.adapt_rho {
            c.inner.adapt_rho = v;
        }
        if let Some(v) = self.mu0 {
            c.mu0 = v;
        }
        if let Some(v) = self.mu_shrink {
            c.mu_shrink = v;
        }
        if let Some(v) = self.mu_floor {
            c.mu_floor = v;
        }
        if let Some(v) = self.epsilon_r {
            c.epsilon_r = v;
        }
        c
    }
}

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use cadmm_core::harness::{
    self, compare_methods, parse_switch, plot_script, render_table, summary_table, trace_path, write_atomic,
    write_trace_file, Method, Overrides,
};
use cadmm_core::qaplib::load_instance;
use cadmm_core::{selftest, CenteringConfig, Error};

#[derive(Parser, Debug)]
#[command(name = "cadmm", version, about = "QAP lower bounds by standard and centering ADMM")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve instances with one engine and write CSV traces.
    Solve {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, default_value = "standard")]
        method: Method,
    },
    /// Run both engines and write the Centering-minus-Standard series.
    Compare {
        #[command(flatten)]
        run: RunArgs,
        /// Also write a gnuplot script next to each series.
        #[arg(long)]
        plot_script: bool,
    },
    /// Summarize a directory of traces.
    Table {
        /// Directory holding `<instance>.<method>.csv` traces.
        dir: PathBuf,
        /// Write the table here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the built-in sanity checks.
    Selftest,
}

#[derive(Args, Debug)]
struct RunArgs {
    /// Instance file in QAPLIB format (repeatable).
    #[arg(long = "instance", required = true)]
    instances: Vec<PathBuf>,
    /// Output directory for traces.
    #[arg(long, default_value = "results")]
    out: PathBuf,
    /// Worker threads; instances run concurrently, each solve stays serial.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Flat key = value file using the flag names below.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Accept instances above the default size limit.
    #[arg(long)]
    allow_large: bool,
    /// Iteration cap across both phases [default: 10000].
    #[arg(long)]
    max_iters: Option<usize>,
    /// Checkpoint spacing in iterations [default: 100].
    #[arg(long)]
    trace_every: Option<usize>,
    /// Initial penalty [default: n].
    #[arg(long)]
    rho0: Option<f64>,
    /// Initial barrier parameter [default: 1].
    #[arg(long)]
    mu0: Option<f64>,
    /// Barrier reduction factor, in (0, 1) [default: 0.75].
    #[arg(long)]
    mu_shrink: Option<f64>,
    /// Barrier value that ends the centering phase [default: 1e-3].
    #[arg(long)]
    mu_floor: Option<f64>,
    /// Residual level below which the barrier shrinks [default: 0.1].
    #[arg(long)]
    epsilon_r: Option<f64>,
    /// Primal residual tolerance [default: 1e-5].
    #[arg(long)]
    tol_primal: Option<f64>,
    /// Dual residual tolerance [default: 1e-5].
    #[arg(long)]
    tol_dual: Option<f64>,
    /// Clamp Y to [0, 1] in both phases: on or off [default: on].
    #[arg(long, value_parser = parse_on_off)]
    clip_y: Option<bool>,
    /// Residual-balancing penalty update: on or off [default: on].
    #[arg(long, value_parser = parse_on_off)]
    adapt_rho: Option<bool>,
}

fn parse_on_off(s: &str) -> Result<bool, String> {
    parse_switch(s).map_err(|e| e.to_string())
}

impl RunArgs {
    fn config(&self) -> Result<CenteringConfig, Error> {
        let file = match &self.config {
            Some(p) => Overrides::load(p)?,
            None => Overrides::default(),
        };
        let cli = Overrides {
            max_iters: self.max_iters,
            trace_every: self.trace_every,
            rho0: self.rho0,
            mu0: self.mu0,
            mu_shrink: self.mu_shrink,
            mu_floor: self.mu_floor,
            epsilon_r: self.epsilon_r,
            tol_primal: self.tol_primal,
            tol_dual: self.tol_dual,
            clip_y: self.clip_y,
            adapt_rho: self.adapt_rho,
        };
        let cfg = file.merged_with(&cli).to_config();
        cfg.validate()?;
        Ok(cfg)
    }

    fn for_each(&self, f: impl Fn(&Path) -> Result<(), Error> + Sync) -> Result<(), Error> {
        if self.jobs == 0 {
            return Err(Error::InvalidConfig("--jobs must be positive".into()));
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(self.jobs)
            .build()
            .map_err(|e| Error::InvalidConfig(e.to_string()))?;
        let results: Vec<Result<(), Error>> = pool.install(|| self.instances.par_iter().map(|p| f(p)).collect());
        // Report every failure, exit with the first one's status.
        let mut first = None;
        for (path, r) in self.instances.iter().zip(results) {
            if let Err(e) = r {
                eprintln!("{}: {e}", path.display());
                first.get_or_insert(e);
            }
        }
        first.map_or(Ok(()), Err)
    }
}

fn solve_cmd(run: &RunArgs, method: Method) -> Result<(), Error> {
    let cfg = run.config()?;
    run.for_each(|path| {
        let (inst, out) = harness::run_experiment(path, method, &cfg, run.allow_large)?;
        let dest = trace_path(&run.out, &inst.name, method);
        write_trace_file(&dest, &out.trace)?;
        let last = out.trace.last().expect("final row always written");
        println!(
            "{} {method}: lb {:.6} after {} iterations{} -> {}",
            inst.name,
            last.lb,
            last.iter,
            if out.converged { " (converged)" } else { "" },
            dest.display()
        );
        Ok(())
    })
}

fn compare_cmd(run: &RunArgs, plot: bool) -> Result<(), Error> {
    let cfg = run.config()?;
    run.for_each(|path| {
        let inst = load_instance(path, run.allow_large)?;
        let cmp = compare_methods(&inst, &cfg)?;
        write_trace_file(&trace_path(&run.out, &inst.name, Method::Standard), &cmp.standard.trace)?;
        write_trace_file(&trace_path(&run.out, &inst.name, Method::Centering), &cmp.centering.trace)?;
        let series = run.out.join(format!("{}.diff.csv", inst.name));
        write_atomic(&series, cmp.series.to_csv().as_bytes())?;
        if plot {
            let script = plot_script(&format!("{}.diff.csv", inst.name), &inst.name);
            write_atomic(&run.out.join(format!("{}.diff.gp", inst.name)), script.as_bytes())?;
        }
        let last = cmp.series.checkpoints.last();
        println!(
            "{}: {} checkpoints, final diff {} -> {}",
            inst.name,
            cmp.series.checkpoints.len(),
            last.map_or("n/a".to_string(), |c| format!("{:.6}", c.diff)),
            series.display()
        );
        Ok(())
    })
}

fn table_cmd(dir: &Path, out: Option<&Path>) -> Result<(), Error> {
    let text = render_table(&summary_table(dir)?);
    match out {
        Some(p) => write_atomic(p, text.as_bytes()),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn selftest_cmd() -> ExitCode {
    let checks = selftest::run();
    for c in &checks {
        println!("{} {}  {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    if checks.iter().all(|c| c.passed) {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match &cli.command {
        Command::Solve { run, method } => solve_cmd(run, *method),
        Command::Compare { run, plot_script } => compare_cmd(run, *plot_script),
        Command::Table { dir, out } => table_cmd(dir, out.as_deref()),
        Command::Selftest => return selftest_cmd(),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

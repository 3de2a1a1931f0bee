//! `qsl-frontier`: staircase data, charging simulations, certificates and the
//! verification suite from the command line.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use qsl_frontier::config::{Tolerances, DEPTH_SAMPLES, MAX_DENSE_QUBITS};
use qsl_frontier::dynamics::{sample_trajectory, Propagator};
use qsl_frontier::frontier::{
    certified_depth, run_verification, staircase_curve, uniform_eta_grid, verify_saturation, VerifyConfig,
};
use qsl_frontier::io::{to_json_string, write_depth_csv, write_staircase_csv, write_trajectory_csv, HamiltonianSpec};
use qsl_frontier::model::{endpoint_states, BatterySpec};
use qsl_frontier::simulation::analyze_orbit;
use rayon::prelude::*;
use serde_json::{json, Value};

const SCHEMA: u32 = 1;

#[derive(Parser, Debug)]
#[command(name = "qsl-frontier", version, about = "Speed–depth frontier for complete quantum battery charging")]
struct Cli {
    #[command(flatten)]
    global: GlobalOpts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct GlobalOpts {
    /// Worker threads (default: all cores).
    #[arg(long, global = true, env = "QSL_FRONTIER_THREADS")]
    threads: Option<usize>,
    /// Complete-charging infidelity threshold.
    #[arg(long, global = true)]
    eps_c: Option<f64>,
    /// Block purity threshold is `1 − eps_p`.
    #[arg(long, global = true)]
    eps_p: Option<f64>,
    /// Relative tolerance for integer snapping of `η⁻²` and `nη²`.
    #[arg(long, global = true)]
    snap_tol: Option<f64>,
    /// Termination tolerance of the cyclic subspace construction.
    #[arg(long, global = true)]
    krylov_tol: Option<f64>,
}

impl GlobalOpts {
    fn tolerances(&self) -> Result<Tolerances> {
        let mut t = Tolerances::default();
        if let Some(v) = self.eps_c {
            t.eps_c = v;
        }
        if let Some(v) = self.eps_p {
            t.eps_p = v;
        }
        if let Some(v) = self.snap_tol {
            t.snap_tol = v;
        }
        if let Some(v) = self.krylov_tol {
            t.krylov_tol = v;
        }
        t.validate()?;
        Ok(t)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Certified depth and smooth bound on a uniform rate grid.
    Staircase {
        #[arg(long)]
        n: usize,
        /// Grid points `i/grid`, `i = 1..=grid`.
        #[arg(long, default_value_t = 2001)]
        grid: usize,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Simulate a charging protocol and report time, rate, depth and certificate.
    Simulate(SimulateArgs),
    /// Depth certified by a rate.
    Certify {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        eta: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the full verification suite; exit 1 on any violation.
    Verify {
        #[arg(long, default_value_t = 8)]
        n_max: usize,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Balanced cluster flips for every `(n, m)` with `n_min ≤ n ≤ n_max`.
    Sweep {
        #[arg(long, default_value_t = 1)]
        n_min: usize,
        #[arg(long)]
        n_max: usize,
        /// Design charging time.
        #[arg(long, default_value_t = 1.0)]
        t: f64,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
struct SimulateArgs {
    /// Balanced cluster-flip Hamiltonian from `--n`, `--m` and `--t`.
    #[arg(long, conflicts_with = "hamiltonian", requires_all = ["n", "m"])]
    cluster_flip: bool,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    /// Design charging time of the cluster flip.
    #[arg(long, default_value_t = 1.0)]
    t: f64,
    /// Hamiltonian spec as JSON.
    #[arg(long, required_unless_present = "cluster_flip")]
    hamiltonian: Option<PathBuf>,
    /// Search window for the first charging time.
    #[arg(long)]
    t_max: Option<f64>,
    /// Write the charging curve (t, fidelity, speed, energy) as CSV.
    #[arg(long)]
    trajectory_csv: Option<PathBuf>,
    #[arg(long, default_value_t = DEPTH_SAMPLES)]
    trajectory_samples: usize,
    /// Write the sampled depth profile (t, depth) as CSV.
    #[arg(long)]
    depth_csv: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn write_output(out: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match out {
        Some(path) => {
            let mut f = File::create(path).with_context(|| format!("cannot write {}", path.display()))?;
            f.write_all(bytes)?;
            f.flush()?;
        }
        None => {
            let mut stdout = io::stdout().lock();
            stdout.write_all(bytes)?;
            stdout.flush()?;
        }
    }
    Ok(())
}

fn json_bytes(value: &Value) -> Result<Vec<u8>> {
    let mut s = to_json_string(value)?;
    s.push('\n');
    Ok(s.into_bytes())
}

fn with_schema(mut value: Value) -> Value {
    if let Value::Object(map) = &mut value {
        map.insert("schema".into(), json!(SCHEMA));
    }
    value
}

fn create_csv(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path).with_context(|| format!("cannot write {}", path.display()))?))
}

fn cmd_staircase(n: usize, grid: usize, format: Format, out: Option<&Path>, tol: &Tolerances) -> Result<()> {
    if n == 0 {
        bail!("n must be at least 1");
    }
    if grid == 0 {
        bail!("grid must have at least one point");
    }
    let points = staircase_curve(n, &uniform_eta_grid::<f64>(grid), tol.snap_tol)?;
    let bytes = match format {
        Format::Csv => {
            let mut buf = Vec::new();
            write_staircase_csv(&mut buf, &points)?;
            buf
        }
        Format::Json => json_bytes(&json!({
            "schema": SCHEMA,
            "n": n,
            "points": points.iter().map(|p| json!({
                "eta": p.eta, "d_cert": p.depth_certified, "smooth_bound": p.smooth_bound,
            })).collect::<Vec<_>>(),
        }))?,
    };
    write_output(out, &bytes)
}

fn cmd_simulate(args: &SimulateArgs, tol: &Tolerances) -> Result<()> {
    let spec = if args.cluster_flip {
        let (n, m) = (args.n.unwrap_or_default(), args.m.unwrap_or_default());
        HamiltonianSpec::ClusterFlip { n, m, g: None, t: Some(args.t) }
    } else {
        let path = args.hamiltonian.as_ref().expect("clap enforces a source");
        let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
        HamiltonianSpec::from_json(&text)?
    };
    let built = spec.build()?;
    let (psi0, up) = endpoint_states::<f64>(built.n)?;
    let prop = Propagator::new(&built.h)?;
    let t_max = match (args.t_max, built.t_design) {
        (Some(t), _) => t,
        (None, Some(t)) => 2.0 * t,
        (None, None) => {
            let (_, delta_h) = prop.orbit(&psi0)?.energy_moments();
            let tau_mt = std::f64::consts::FRAC_PI_2 / delta_h;
            if tau_mt.is_finite() {
                16.0 * tau_mt
            } else {
                1.0
            }
        }
    };
    let report = analyze_orbit(&prop, &psi0, &up, t_max, tol)?;

    if let Some(path) = &args.trajectory_csv {
        let orbit = prop.orbit(&psi0)?;
        let t_end = report.qsl.map_or(t_max, |q| q.t_charge);
        let samples = sample_trajectory(&orbit, &up, &BatterySpec::new(built.n, 1.0)?, t_end, args.trajectory_samples)?;
        let mut w = create_csv(path)?;
        write_trajectory_csv(&mut w, &samples)?;
        w.flush()?;
    }
    if let (Some(path), Some(depth)) = (&args.depth_csv, &report.depth) {
        let mut w = create_csv(path)?;
        write_depth_csv(&mut w, depth)?;
        w.flush()?;
    }

    let doc = json!({
        "schema": SCHEMA,
        "hamiltonian": summarize_spec(&spec),
        "n": built.n,
        "t_max": t_max,
        "charging": report.outcome,
        "qsl_times": report.qsl_times,
        "qsl": report.qsl,
        "depth": report.depth,
        "certificate": report.certificate,
    });
    write_output(args.out.as_deref(), &json_bytes(&doc)?)
}

fn summarize_spec(spec: &HamiltonianSpec) -> Value {
    match spec {
        HamiltonianSpec::CustomDense { n, .. } => json!({ "type": "custom_dense", "n": n }),
        other => serde_json::to_value(other).unwrap_or(Value::Null),
    }
}

fn cmd_certify(n: usize, eta: f64, out: Option<&Path>, tol: &Tolerances) -> Result<()> {
    let cert = certified_depth(n, eta, tol.snap_tol)?;
    write_output(out, &json_bytes(&with_schema(serde_json::to_value(cert)?))?)
}

/// Returns whether every check passed.
fn cmd_verify(n_max: usize, trials: usize, seed: u64, out: Option<&Path>, tol: &Tolerances) -> Result<bool> {
    let summary = run_verification(&VerifyConfig { n_max, trials, seed, tolerances: *tol })?;
    write_output(out, &json_bytes(&serde_json::to_value(&summary)?)?)?;
    Ok(summary.passed)
}

/// Returns whether every `(n, m)` saturated the frontier.
fn cmd_sweep(n_min: usize, n_max: usize, t: f64, format: Format, out: Option<&Path>, tol: &Tolerances) -> Result<bool> {
    if n_min == 0 || n_min > n_max {
        bail!("need 1 ≤ n_min ≤ n_max");
    }
    if n_max > MAX_DENSE_QUBITS {
        bail!("n_max {n_max} exceeds the dense limit of {MAX_DENSE_QUBITS}");
    }
    let cases: Vec<(usize, usize)> = (n_min..=n_max).flat_map(|n| (1..=n).map(move |m| (n, m))).collect();
    let reports =
        cases.par_iter().map(|&(n, m)| verify_saturation(n, m, t, tol)).collect::<qsl_frontier::Result<Vec<_>>>()?;
    let passed = reports.iter().all(|r| r.passed);
    let bytes = match format {
        Format::Csv => {
            let mut text = String::from("n,m,g,eta,ent_u,d_cert,passed\n");
            for r in &reports {
                let opt = |x: Option<usize>| x.map(|v| v.to_string()).unwrap_or_default();
                text.push_str(&format!(
                    "{},{},{},{},{},{},{}\n",
                    r.n,
                    r.m,
                    qsl_frontier::io::fmt17(r.g),
                    r.eta.map(qsl_frontier::io::fmt17).unwrap_or_default(),
                    opt(r.ent_u),
                    opt(r.depth_certified),
                    r.passed
                ));
            }
            text.into_bytes()
        }
        Format::Json => json_bytes(&json!({ "schema": SCHEMA, "passed": passed, "cases": reports }))?,
    };
    write_output(out, &bytes)?;
    Ok(passed)
}

fn run(cli: Cli) -> Result<bool> {
    if let Some(threads) = cli.global.threads {
        rayon::ThreadPoolBuilder::new().num_threads(threads).build_global().context("configuring thread pool")?;
    }
    let tol = cli.global.tolerances()?;
    match &cli.command {
        Command::Staircase { n, grid, format, out } => {
            cmd_staircase(*n, *grid, *format, out.as_deref(), &tol).map(|_| true)
        }
        Command::Simulate(args) => cmd_simulate(args, &tol).map(|_| true),
        Command::Certify { n, eta, out } => cmd_certify(*n, *eta, out.as_deref(), &tol).map(|_| true),
        Command::Verify { n_max, trials, seed, out } => cmd_verify(*n_max, *trials, *seed, out.as_deref(), &tol),
        Command::Sweep { n_min, n_max, t, format, out } => cmd_sweep(*n_min, *n_max, *t, *format, out.as_deref(), &tol),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("error: verification failed; see the report for violating instances");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

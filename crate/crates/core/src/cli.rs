//! Command-line interface.
//!
//! Every subcommand writes JSON to stdout or to `--json-out`. Exit codes:
//! 0 on success, 1 on usage or validation errors, 2 on numerical failures
//! and route disagreements.

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::cache::{Cache, CacheKey};
use crate::edwards::{aggregate_roots, boundary_form, root_of_unity, twisted_counts};
use crate::error::{Error, Result};
use crate::geodesic::{sample_trajectory, solve_parameter, GeodesicFamily, RotationNumber, Trajectory};
use crate::geometry::{export_immersion_csv, jacobi_system};
use crate::pipeline::{compute_index, parse_families, sweep, IndexOptions, Method, DEFAULT_CELLS};
use crate::spectral::{spectrum_below, Boundary, SpectrumRecord, TAU_ZERO};
use crate::verify::verify_family;

#[derive(Debug, Parser)]
#[command(name = "otsuki", version, about = "Morse index and nullity of bipolar surfaces to Otsuki tori")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// Numerator of the rotation number p/q.
    #[arg(long, global = true)]
    p: Option<u32>,
    /// Denominator of the rotation number p/q.
    #[arg(long, global = true)]
    q: Option<u32>,
    /// Geodesic parameter b in (-pi/2, 0), instead of p/q.
    #[arg(long, global = true, allow_negative_numbers = true, conflicts_with_all = ["p", "q"])]
    b: Option<f64>,
    /// Cells per half-period on the coarse mesh.
    #[arg(long, global = true, default_value_t = DEFAULT_CELLS)]
    n: usize,
    /// Route for the l = 1, 2 counts.
    #[arg(long, global = true, value_enum, default_value_t = Method::Both)]
    method: Method,
    /// Zero threshold for extrapolated eigenvalues.
    #[arg(long, global = true, default_value_t = TAU_ZERO)]
    tau: f64,
    /// Write JSON here instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    json_out: Option<PathBuf>,
    /// Cache directory (defaults to $OTSUKI_CACHE, then ./.cache).
    #[arg(long, global = true, value_name = "PATH")]
    cache_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Bc {
    Periodic,
    Antiperiodic,
    Dirichlet,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sample the closed geodesic and its conserved quantities.
    Geodesic {
        /// Also write the immersed surface as CSV rows alpha,t,x1..x5.
        #[arg(long, value_name = "PATH")]
        mesh_csv: Option<PathBuf>,
        /// Grid points in alpha for the CSV mesh.
        #[arg(long, default_value_t = 64)]
        n_alpha: usize,
        /// Grid points in t for the CSV mesh.
        #[arg(long, default_value_t = 256)]
        n_t: usize,
    },
    /// Eigenvalues of one separated Jacobi problem below a cutoff.
    Spectrum {
        #[arg(long, default_value_t = 0)]
        l: u32,
        #[arg(long, value_enum, default_value_t = Bc::Periodic)]
        bc: Bc,
        /// Twist by epsilon^r with epsilon = e^{i pi/q}; overrides --bc.
        #[arg(long)]
        omega_index: Option<u32>,
        /// Length of the interval in half-periods.
        #[arg(long, default_value_t = 1)]
        half_periods: usize,
        #[arg(long, default_value_t = 0.1, allow_negative_numbers = true)]
        cutoff: f64,
    },
    /// Boundary-form data, or twisted counts derived from it.
    Edwards {
        /// Mode (1 or 2); both when omitted.
        #[arg(long)]
        l: Option<u32>,
        /// Counts for the single root epsilon^r.
        #[arg(long, conflicts_with = "aggregate")]
        omega_index: Option<u32>,
        /// Counts summed over all 2q roots.
        #[arg(long)]
        aggregate: bool,
    },
    /// Morse index and nullity of the surface.
    Index {
        /// Skip the confirmation pass at twice the mesh.
        #[arg(long)]
        no_confirm: bool,
        /// Neither read nor write the cache.
        #[arg(long)]
        no_cache: bool,
    },
    /// Run the invariant suite for one family and print a pass/fail table.
    Verify,
    /// Index reports for every p/q listed in FILE, one JSON line each.
    Sweep {
        file: PathBuf,
        #[arg(long)]
        no_confirm: bool,
    },
}

/// Parse `argv` (including the program name), run, and return the exit code.
pub fn run_cli<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).try_init();
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn run(cli: Cli) -> Result<i32> {
    let c = &cli.common;
    match &cli.command {
        Command::Geodesic { mesh_csv, n_alpha, n_t } => {
            let traj = trajectory(c)?;
            if let Some(path) = mesh_csv {
                export_immersion_csv(&traj, *n_alpha, *n_t, BufWriter::new(File::create(path)?))?;
            }
            emit(c, &traj.to_record())?;
        }
        Command::Spectrum { l, bc, omega_index, half_periods, cutoff } => {
            let traj = trajectory(c)?;
            let boundary = match omega_index {
                Some(r) => Boundary::Twisted(root_of_unity(rotation(c, &traj)?.q, *r)),
                None => match bc {
                    Bc::Periodic => Boundary::Periodic,
                    Bc::Antiperiodic => Boundary::Antiperiodic,
                    Bc::Dirichlet => Boundary::Dirichlet,
                },
            };
            let sys = jacobi_system(*l, &traj, boundary, *half_periods)?;
            let summary = spectrum_below(&sys, *cutoff, c.n * half_periods, c.tau)?;
            emit(c, &SpectrumRecord::new(*l, *omega_index, &summary))?;
        }
        Command::Edwards { l, omega_index, aggregate } => {
            let traj = trajectory(c)?;
            let modes = match l {
                Some(l @ (1 | 2)) => vec![*l],
                Some(other) => return Err(Error::Validation(format!("boundary forms are used for l = 1, 2, got {other}"))),
                None => vec![1, 2],
            };
            let forms = modes.iter().map(|&l| boundary_form(l, &traj, c.n, c.tau)).collect::<Result<Vec<_>>>()?;
            if let Some(r) = omega_index {
                let q = rotation(c, &traj)?.q;
                let counts = forms.iter().map(|f| twisted_counts(f, q, *r)).collect::<Result<Vec<_>>>()?;
                emit(c, &counts)?;
            } else if *aggregate {
                let q = rotation(c, &traj)?.q;
                let aggs = forms.iter().map(|f| aggregate_roots(f, q)).collect::<Result<Vec<_>>>()?;
                emit(c, &aggs)?;
            } else {
                emit(c, &forms)?;
            }
        }
        Command::Index { no_confirm, no_cache } => {
            let (p, q) = rational(c)?;
            let opts = IndexOptions { method: c.method, cells: c.n, tau: c.tau, confirm: !no_confirm };
            let cache = (!no_cache).then(|| cache(c));
            let key = CacheKey::new(p, q, c.n);
            let cached = cache.as_ref().and_then(|cache| cache.load(&key)).filter(|r| {
                (r.method == opts.method || r.method == Method::Both) && (!opts.confirm || r.confirmed_at.is_some())
            });
            let report = match cached {
                Some(report) => report,
                None => {
                    let report = compute_index(p, q, &opts)?;
                    if let Some(cache) = &cache {
                        if let Err(e) = cache.store(&key, &report) {
                            log::warn!("could not write cache entry {}: {e}", key.canonical());
                        }
                    }
                    report
                }
            };
            emit(c, &report)?;
        }
        Command::Verify => {
            let (p, q) = rational(c)?;
            let checks = verify_family(p, q, c.n, c.tau)?;
            println!("verify {p}/{q} at n = {}", c.n);
            for check in &checks {
                println!("{check}");
            }
            let failed = checks.iter().filter(|ch| !ch.passed).count();
            println!("{} passed, {failed} failed", checks.len() - failed);
            if let Some(path) = &c.json_out {
                write_json(path, &checks)?;
            }
            return Ok(if failed == 0 { 0 } else { 2 });
        }
        Command::Sweep { file, no_confirm } => {
            let families = parse_families(&fs::read_to_string(file)?)?;
            let opts = IndexOptions { method: c.method, cells: c.n, tau: c.tau, confirm: !no_confirm };
            let results = sweep(&families, &opts);
            let mut out: Box<dyn Write> = match &c.json_out {
                Some(path) => Box::new(BufWriter::new(File::create(path)?)),
                None => Box::new(io::stdout().lock()),
            };
            let mut worst = 0;
            for ((p, q), result) in results {
                let line = match result {
                    Ok(report) => serde_json::to_string(&report)?,
                    Err(e) => {
                        worst = worst.max(e.exit_code());
                        serde_json::json!({ "p": p, "q": q, "error": e.to_string() }).to_string()
                    }
                };
                writeln!(out, "{line}")?;
            }
            out.flush()?;
            return Ok(worst);
        }
    }
    Ok(0)
}

fn family(c: &Common) -> Result<GeodesicFamily> {
    match (c.b, c.p, c.q) {
        (Some(b), _, _) => GeodesicFamily::from_b(b),
        (None, Some(p), Some(q)) => solve_parameter(p, q),
        _ => Err(Error::Validation("give --p and --q, or --b".into())),
    }
}

fn trajectory(c: &Common) -> Result<Trajectory> {
    sample_trajectory(&family(c)?, 4 * c.n)
}

fn rational(c: &Common) -> Result<(u32, u32)> {
    match (c.p, c.q) {
        (Some(p), Some(q)) => RotationNumber::new(p, q).map(|r| (r.p, r.q)),
        _ => Err(Error::Validation("this command needs --p and --q".into())),
    }
}

fn rotation(c: &Common, traj: &Trajectory) -> Result<RotationNumber> {
    traj.family()
        .rotation
        .ok_or_else(|| Error::Validation(format!("roots of unity need --p and --q; got b = {:?}", c.b)))
}

fn cache(c: &Common) -> Cache {
    c.cache_dir.clone().map_or_else(Cache::from_env, Cache::new)
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn emit<T: Serialize>(c: &Common, value: &T) -> Result<()> {
    match &c.json_out {
        Some(path) => write_json(path, value),
        None => {
            let mut out = io::stdout().lock();
            serde_json::to_writer_pretty(&mut out, value)?;
            writeln!(out)?;
            Ok(())
        }
    }
}

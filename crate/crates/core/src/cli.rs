//! Command-line frontend. Exit codes: 0 success, 1 a certification or
//! invariant check failed, 2 usage error.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::bounds::{bound_table, BOUND_NAMES};
use crate::butterfly::{bands, butterfly_export, write_butterfly_csv};
use crate::certify::{certify, CertifyConfig, HOLDER_C};
use crate::format::{g17, ser_g17, ser_vec_g17};
use crate::fractions::{convergents, farey_sequence, reduce_symmetry, Fraction};
use crate::identities::{run_suite, SuiteConfig};
use crate::operator::{build_harper, norm_rational, CornerSign, Twist};
use crate::trial_vectors::optimize_lower;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "amo",
    version,
    about = "Norms, bounds and band spectra of almost Mathieu operators"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
struct ThetaArgs {
    /// Frequency as `p/q` (exact) or a decimal (approximated by a convergent).
    #[arg(long, allow_hyphen_values = true)]
    theta: String,
    /// Denominator cap for decimal input.
    #[arg(long, default_value_t = 1000)]
    qmax: u64,
}

#[derive(Debug, Args)]
struct OutArgs {
    /// Write to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Operator norm at rational θ.
    Norm {
        #[command(flatten)]
        theta: ThetaArgs,
        #[arg(long, default_value_t = 2.0, allow_hyphen_values = true)]
        lambda: f64,
    },
    /// Eigenvalues of one twisted q × q matrix.
    Spectrum {
        #[command(flatten)]
        theta: ThetaArgs,
        #[arg(long, default_value_t = 2.0, allow_hyphen_values = true)]
        lambda: f64,
        /// Diagonal phase offset.
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        phi: f64,
        /// Corner sign, 1 or -1.
        #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
        omega: i32,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Band spectrum at rational θ.
    Bands {
        #[command(flatten)]
        theta: ThetaArgs,
        #[arg(long, default_value_t = 2.0, allow_hyphen_values = true)]
        lambda: f64,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Butterfly data: every band for q ≤ qmax as CSV.
    Butterfly {
        #[arg(long, default_value_t = 50)]
        qmax: u64,
        #[arg(long, default_value_t = 2.0, allow_hyphen_values = true)]
        lambda: f64,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Closed-form bounds at one θ, or curves over [0, 1/2] with --sweep.
    Bounds {
        /// Required unless --sweep is given.
        #[arg(long, allow_hyphen_values = true)]
        theta: Option<String>,
        #[arg(long, default_value_t = 2.0, allow_hyphen_values = true)]
        lambda: f64,
        /// Emit bound curves on a θ grid plus norms at Farey points.
        #[arg(long)]
        sweep: bool,
        /// Grid step of the sweep.
        #[arg(long, default_value_t = 1e-3)]
        step: f64,
        /// Denominator cap: Farey points of the sweep, or decimal θ input.
        #[arg(long, default_value_t = 60)]
        qmax: u64,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Best trial-vector lower bound at real θ ∈ [0, 1] (λ = 2).
    Lower {
        #[arg(long, allow_hyphen_values = true)]
        theta: String,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Randomised eigenvector identity suite.
    Identities {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Residuals cover every p/q with q ≤ qmax.
        #[arg(long, default_value_t = 40)]
        qmax: u64,
        #[arg(long, value_delimiter = ',', default_value = "0.5,1,2,3", allow_hyphen_values = true)]
        lambdas: Vec<f64>,
        /// Random unit vectors per (θ, q) cell.
        #[arg(long, default_value_t = 10_000)]
        vectors: usize,
        /// Number of Farey points in [0, 1/2] for the inequality cells.
        #[arg(long, default_value_t = 50)]
        points: usize,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Sandwich sweep, named constants and Hölder check as a JSON report.
    Certify {
        #[arg(long, default_value_t = 60)]
        qmax: u64,
        #[arg(long, value_delimiter = ',', default_value = "0.5,1,2,3", allow_hyphen_values = true)]
        lambdas: Vec<f64>,
        /// Skip the named-constant reproduction.
        #[arg(long)]
        no_constants: bool,
        /// Hölder-½ constant for neighbouring Farey fractions.
        #[arg(long, default_value_t = HOLDER_C)]
        holder_c: f64,
        /// Also report min ‖H_θ‖² on [0, 1/4] for q ≤ this value.
        #[arg(long)]
        explore: Option<u64>,
        #[command(flatten)]
        out: OutArgs,
    },
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Io(io::Error),
    Failed(String),
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.into())
    }
}

fn usage(e: impl std::fmt::Display) -> CliError {
    CliError::Usage(e.to_string())
}

/// Parses `p/q` exactly, or a decimal via its last convergent with
/// denominator `≤ q_max` (announced on stderr).
fn parse_theta(s: &str, q_max: u64) -> Result<Fraction, CliError> {
    if s.contains('/') {
        return s.parse::<Fraction>().map_err(usage);
    }
    let x: f64 = s.trim().parse().map_err(|_| usage(format!("malformed theta '{s}'")))?;
    if !(0.0..=1.0).contains(&x) {
        return Err(usage(format!("theta {s} outside [0, 1]")));
    }
    if q_max == 0 {
        return Err(usage("qmax must be at least 1"));
    }
    let approx = *convergents(x, q_max).last().expect("0/1 is always a convergent");
    eprintln!(
        "theta {s} approximated by {approx} (|error| = {}); results are for the rational approximant",
        g17((approx.value() - x).abs())
    );
    Ok(approx)
}

fn sink(out: &OutArgs) -> Result<Box<dyn Write>, CliError> {
    Ok(match &out.out {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_json<T: Serialize>(w: &mut dyn Write, v: &T) -> Result<(), CliError> {
    serde_json::to_writer_pretty(&mut *w, v).map_err(io::Error::from)?;
    writeln!(w)?;
    Ok(())
}

#[derive(Serialize)]
struct SpectrumOut {
    theta: String,
    #[serde(serialize_with = "ser_g17")]
    lambda: f64,
    #[serde(serialize_with = "ser_g17")]
    phi: f64,
    omega: i32,
    #[serde(serialize_with = "ser_vec_g17")]
    eigenvalues: Vec<f64>,
}

#[derive(Serialize)]
struct BandOut {
    #[serde(serialize_with = "ser_g17")]
    lo: f64,
    #[serde(serialize_with = "ser_g17")]
    hi: f64,
}

#[derive(Serialize)]
struct BandsOut {
    theta: String,
    #[serde(serialize_with = "ser_g17")]
    lambda: f64,
    band_count: usize,
    fallback: bool,
    bands: Vec<BandOut>,
}

fn cmd_bounds_point(theta: Fraction, lambda: f64, format: Format, w: &mut dyn Write) -> Result<(), CliError> {
    let (t, reflected) = reduce_symmetry(theta);
    if reflected {
        eprintln!("theta {theta} reflected to {t} (norms are symmetric under theta -> 1 - theta)");
    }
    let set = bound_table(t.value(), lambda).map_err(usage)?;
    match format {
        Format::Csv => {
            let mut c = csv::Writer::from_writer(w);
            c.write_record(["bound", "value"])?;
            for (name, v) in set.entries() {
                if let Some(v) = v {
                    c.write_record([name.to_string(), g17(v)])?;
                }
            }
            c.flush()?;
        }
        Format::Json => {
            let m: serde_json::Map<String, serde_json::Value> = set
                .entries()
                .iter()
                .filter_map(|(n, v)| v.map(|v| (n.to_string(), serde_json::from_str(&g17(v)).expect("finite float"))))
                .collect();
            write_json(w, &m)?;
        }
    }
    Ok(())
}

/// Bound curves on a `θ` grid over `[0, 1/2]`, merged with Farey points where
/// the norm column is filled in.
fn cmd_bounds_sweep(lambda: f64, step: f64, q_max: u64, w: &mut dyn Write) -> Result<(), CliError> {
    if !(step > 0.0 && step <= 0.5) {
        return Err(usage("step must lie in (0, 1/2]"));
    }
    let fr = farey_sequence(q_max.max(1), Fraction::ZERO, Fraction::HALF).map_err(usage)?;
    let n = (0.5 / step).round() as usize;
    let mut rows: Vec<(f64, Option<Fraction>)> = (0..=n).map(|i| ((i as f64 * step).min(0.5), None)).collect();
    rows.extend(fr.iter().map(|f| (f.value(), Some(*f))));
    rows.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.is_some().cmp(&b.1.is_some())));

    use rayon::prelude::*;
    let norms: Vec<Option<f64>> = rows
        .par_iter()
        .map(|(_, f)| f.map(|f| norm_rational(f, lambda)).transpose())
        .collect::<Result<_, _>>()
        .map_err(|e| CliError::Failed(e.to_string()))?;

    let mut c = csv::Writer::from_writer(w);
    let mut header = vec!["theta", "p", "q", "norm"];
    header.extend(BOUND_NAMES);
    c.write_record(&header)?;
    for ((theta, f), norm) in rows.iter().zip(norms) {
        let set = bound_table(*theta, lambda).map_err(usage)?;
        let mut rec = vec![
            g17(*theta),
            f.map(|f| f.p().to_string()).unwrap_or_default(),
            f.map(|f| f.q().to_string()).unwrap_or_default(),
            norm.map(g17).unwrap_or_default(),
        ];
        rec.extend(set.entries().iter().map(|(_, v)| v.map(g17).unwrap_or_default()));
        c.write_record(&rec)?;
    }
    c.flush()?;
    Ok(())
}

fn dispatch(cmd: Command) -> Result<(), CliError> {
    match cmd {
        Command::Norm { theta, lambda } => {
            let f = parse_theta(&theta.theta, theta.qmax)?;
            let n = norm_rational(f, lambda).map_err(|e| CliError::Failed(e.to_string()))?;
            println!("{}", g17(n));
        }
        Command::Spectrum {
            theta,
            lambda,
            phi,
            omega,
            format,
            out,
        } => {
            let f = parse_theta(&theta.theta, theta.qmax)?;
            let omega_sign = CornerSign::from_sign(omega).ok_or_else(|| usage("omega must be 1 or -1"))?;
            let s = build_harper(f, lambda, Twist { phi, omega: omega_sign })
                .spectrum()
                .map_err(|e| CliError::Failed(e.to_string()))?;
            let mut w = sink(&out)?;
            match format {
                Format::Csv => {
                    let mut c = csv::Writer::from_writer(&mut w);
                    c.write_record(["index", "eigenvalue"])?;
                    for (i, e) in s.eigenvalues.iter().enumerate() {
                        c.write_record([i.to_string(), g17(*e)])?;
                    }
                    c.flush()?;
                }
                Format::Json => write_json(
                    &mut w,
                    &SpectrumOut {
                        theta: f.to_string(),
                        lambda,
                        phi,
                        omega,
                        eigenvalues: s.eigenvalues,
                    },
                )?,
            }
            w.flush()?;
        }
        Command::Bands {
            theta,
            lambda,
            format,
            out,
        } => {
            let f = parse_theta(&theta.theta, theta.qmax)?;
            let s = bands(f, lambda).map_err(|e| CliError::Failed(e.to_string()))?;
            let mut w = sink(&out)?;
            match format {
                Format::Csv => {
                    let mut c = csv::Writer::from_writer(&mut w);
                    c.write_record(["band_index", "lo", "hi"])?;
                    for (i, b) in s.bands.iter().enumerate() {
                        c.write_record([i.to_string(), g17(b.lo), g17(b.hi)])?;
                    }
                    c.flush()?;
                }
                Format::Json => write_json(
                    &mut w,
                    &BandsOut {
                        theta: f.to_string(),
                        lambda,
                        band_count: s.band_count(),
                        fallback: s.fallback,
                        bands: s.bands.iter().map(|b| BandOut { lo: b.lo, hi: b.hi }).collect(),
                    },
                )?,
            }
            w.flush()?;
        }
        Command::Butterfly { qmax, lambda, out } => {
            if qmax == 0 {
                return Err(usage("qmax must be at least 1"));
            }
            let recs = butterfly_export(qmax, lambda).map_err(|e| CliError::Failed(e.to_string()))?;
            let mut w = sink(&out)?;
            write_butterfly_csv(&recs, &mut w)?;
            w.flush()?;
        }
        Command::Bounds {
            theta,
            lambda,
            sweep,
            step,
            qmax,
            format,
            out,
        } => {
            let mut w = sink(&out)?;
            if sweep {
                cmd_bounds_sweep(lambda, step, qmax, &mut w)?;
            } else {
                let t = theta.ok_or_else(|| usage("--theta is required without --sweep"))?;
                let f = parse_theta(&t, qmax)?;
                cmd_bounds_point(f, lambda, format, &mut w)?;
            }
            w.flush()?;
        }
        Command::Lower { theta, format } => {
            let x = match theta.parse::<Fraction>() {
                Ok(f) => f.value(),
                Err(_) if !theta.contains('/') => theta
                    .trim()
                    .parse::<f64>()
                    .map_err(|_| usage(format!("malformed theta '{theta}'")))?,
                Err(e) => return Err(usage(e)),
            };
            if !(0.0..=1.0).contains(&x) {
                return Err(usage(format!("theta {theta} outside [0, 1]")));
            }
            let t = if x > 0.5 { 1.0 - x } else { x };
            let e = optimize_lower(t).map_err(usage)?;
            let fields = [
                ("theta", g17(t)),
                ("family", e.family.name().to_string()),
                ("value", g17(e.value)),
                ("alpha", g17(e.params.alpha)),
                ("r", g17(e.params.r)),
                ("a", g17(e.params.a)),
                ("b", g17(e.params.b)),
            ];
            let stdout = io::stdout();
            let mut w = stdout.lock();
            match format {
                Format::Csv => {
                    let mut c = csv::Writer::from_writer(&mut w);
                    c.write_record(fields.iter().map(|x| x.0))?;
                    c.write_record(fields.iter().map(|x| x.1.as_str()))?;
                    c.flush()?;
                }
                Format::Json => {
                    let m: serde_json::Map<String, serde_json::Value> = fields
                        .iter()
                        .map(|(k, v)| {
                            let val = if *k == "family" {
                                serde_json::Value::String(v.clone())
                            } else {
                                serde_json::from_str(v).expect("finite float")
                            };
                            (k.to_string(), val)
                        })
                        .collect();
                    write_json(&mut w, &m)?;
                }
            }
        }
        Command::Identities {
            seed,
            qmax,
            lambdas,
            vectors,
            points,
            format,
        } => {
            let cfg = SuiteConfig {
                seed,
                residual_q_max: qmax,
                lambdas,
                inequality_points: points,
                vectors_per_cell: vectors,
                ..SuiteConfig::default()
            };
            let r = run_suite(&cfg).map_err(usage)?;
            let fields = [
                ("eigenpairs", r.eigenpairs.to_string()),
                ("mixed_pairs", r.mixed_pairs.to_string()),
                ("max_residual_sine", g17(r.max_residual_sine)),
                ("max_residual_adjacent", g17(r.max_residual_adjacent)),
                ("max_residual_weighted", g17(r.max_residual_weighted)),
                ("max_residual_energy", g17(r.max_residual_energy)),
                ("inequality_cells", r.inequality_cells.to_string()),
                ("vectors_checked", r.vectors_checked.to_string()),
                ("worst_cosine_sum_gap", g17(r.worst_cosine_sum)),
                ("worst_second_moment_gap", g17(r.worst_second_moment)),
                ("worst_scaled_moment_gap", g17(r.worst_scaled_moment)),
                ("violations", r.violations.to_string()),
                ("pass", r.passed().to_string()),
            ];
            let stdout = io::stdout();
            let mut w = stdout.lock();
            match format {
                Format::Csv => {
                    let mut c = csv::Writer::from_writer(&mut w);
                    c.write_record(["quantity", "value"])?;
                    for (k, v) in &fields {
                        c.write_record([k, v.as_str()])?;
                    }
                    c.flush()?;
                }
                Format::Json => {
                    let m: serde_json::Map<String, serde_json::Value> = fields
                        .iter()
                        .map(|(k, v)| (k.to_string(), serde_json::from_str(v).expect("number or bool")))
                        .collect();
                    write_json(&mut w, &m)?;
                }
            }
            if !r.passed() {
                return Err(CliError::Failed("identity suite reported violations".into()));
            }
        }
        Command::Certify {
            qmax,
            lambdas,
            no_constants,
            holder_c,
            explore,
            out,
        } => {
            if qmax == 0 {
                return Err(usage("qmax must be at least 1"));
            }
            if holder_c <= 0.0 {
                return Err(usage("holder-c must be positive"));
            }
            let cfg = CertifyConfig {
                q_max: qmax,
                lambdas,
                constants: !no_constants,
                holder: Some(holder_c),
                explore,
            };
            let r = certify(&cfg).map_err(|e| CliError::Failed(e.to_string()))?;
            let mut w = sink(&out)?;
            w.write_all(r.to_json().as_bytes())?;
            writeln!(w)?;
            w.flush()?;
            eprintln!(
                "{} records, {} failures, constants {}",
                r.records.len(),
                r.failures.len(),
                match &r.constants {
                    Some(c) if c.passed() => "pass",
                    Some(_) => "FAIL",
                    None => "skipped",
                }
            );
            if !r.passed() {
                return Err(CliError::Failed("certification failed".into()));
            }
        }
    }
    Ok(())
}

/// Caps the global rayon pool from `AMO_THREADS` (unset or `0` = automatic).
pub fn configure_threads() -> Result<(), String> {
    let Ok(v) = std::env::var("AMO_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .map_err(|_| format!("AMO_THREADS='{v}' is not a count"))?;
    if n > 0 {
        // a pool that already exists (e.g. in tests) is fine to keep
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}

/// Parses `args` (including the program name) and runs the subcommand.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return EXIT_USAGE;
    }
    match dispatch(cli.command) {
        Ok(()) => EXIT_OK,
        Err(CliError::Usage(m)) => {
            eprintln!("error: {m}");
            EXIT_USAGE
        }
        Err(CliError::Io(e)) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
        Err(CliError::Failed(m)) => {
            eprintln!("error: {m}");
            EXIT_CHECK_FAILED
        }
    }
}

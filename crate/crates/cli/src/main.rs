use std::fs::File;
use std::io::{self, BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use covrad_core::lonely_runner::{slrc_check, ScanRecord};
use covrad_core::{
    covering_radius_with_stats, grid_oracle, lattice_width, normalize_velocities, parse_rational,
    scan, verify_certificate, Certificate, Error, HPolytope, PolytopeJson, Rational, RatVec,
    SearchConfig, DEFAULT_LBAR_CAP,
};

/// Exact covering radii of rational polytopes and lonely runner tables.
#[derive(Parser)]
#[command(name = "covrad", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Covering radius of a polytope, with a certificate.
    Covrad(CovradArgs),
    /// Lattice width and a minimizing direction.
    Width {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Grid lower bound on the covering radius.
    Oracle {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        denominator: u64,
        /// Maximum number of grid points.
        #[arg(long, default_value_t = 10_000_000)]
        grid_cap: u128,
    },
    /// Covering radius of the hexagon of one velocity triple.
    LrcCheck {
        #[arg(num_args = 3, value_names = ["V1", "V2", "V3"])]
        velocities: Vec<u64>,
        #[arg(long)]
        threads: Option<usize>,
        #[arg(long)]
        json: bool,
    },
    /// Table of all triples up to a velocity sum.
    LrcScan {
        #[arg(long)]
        max_sum: u64,
        #[arg(long, conflicts_with = "json")]
        csv: bool,
        #[arg(long)]
        json: bool,
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Check a certificate against a polytope; exit status 1 when invalid.
    Verify {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        cert: PathBuf,
    },
}

#[derive(Args)]
struct CovradArgs {
    #[arg(long)]
    input: PathBuf,
    /// Upper bound on the covering radius, e.g. 2/3.
    #[arg(long)]
    mu0: Option<String>,
    /// Upper bound on max ‖x‖∞ over the polytope.
    #[arg(long)]
    beta0: Option<String>,
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long)]
    json: bool,
    /// Refuse candidate sets larger than this.
    #[arg(long, default_value_t = DEFAULT_LBAR_CAP)]
    lbar_cap: u128,
    /// Allow dimensions above 3.
    #[arg(long)]
    allow_high_dim: bool,
    /// Use µ0 = 2/w for a centrally symmetric polygon.
    #[arg(long)]
    symmetric: bool,
    /// Tighten µ0 with the general flatness bound.
    #[arg(long)]
    flatness: bool,
}

enum Outcome {
    Ok,
    InvalidCertificate,
}

fn threads(n: Option<usize>) -> anyhow::Result<usize> {
    match n {
        Some(0) => Err(Error::Usage("--threads must be at least 1".into()).into()),
        Some(n) => Ok(n),
        None => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
    }
}

fn read_polytope(path: &Path) -> anyhow::Result<(HPolytope, RatVec)> {
    let file = File::open(path)
        .map_err(|e| Error::Usage(format!("cannot open {}: {e}", path.display())))?;
    let json = PolytopeJson::from_reader(BufReader::new(file))?;
    let out = json.normalize()?;
    Ok(out)
}

fn rational_arg(text: &Option<String>, name: &str) -> anyhow::Result<Option<Rational>> {
    text.as_deref()
        .map(|t| {
            parse_rational(t).map_err(|e| Error::Usage(format!("--{name}: {e}")).into())
        })
        .transpose()
}

fn print_record(out: &mut impl Write, r: &ScanRecord, json: bool) -> anyhow::Result<()> {
    if json {
        serde_json::to_writer_pretty(&mut *out, &r.row())?;
        writeln!(out)?;
        return Ok(());
    }
    writeln!(out, "mu = {} {}", r.mu, r.verdict.to_string().to_uppercase())?;
    writeln!(out, "v = {}", r.v)?;
    writeln!(out, "generators = {}", r.zonotope.matrix_string())?;
    writeln!(out, "width = {}", r.width)?;
    writeln!(out, "spectrum = {}", r.spectrum)?;
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<Outcome> {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match cli.command {
        Command::Covrad(args) => {
            let (p, t) = read_polytope(&args.input)?;
            let cfg = SearchConfig {
                mu0_override: rational_arg(&args.mu0, "mu0")?,
                beta0_override: rational_arg(&args.beta0, "beta0")?,
                worker_count: threads(args.threads)?,
                lbar_cap: args.lbar_cap,
                deterministic: true,
                allow_high_dim: args.allow_high_dim,
                centrally_symmetric: args.symmetric,
                flatness: args.flatness,
            };
            let (cert, stats) = covering_radius_with_stats(&p, &cfg)?;
            log::info!("{stats:?}");
            if args.json {
                cert.write_json(&p, &mut out)?;
            } else {
                writeln!(out, "mu = {}", cert.mu)?;
                writeln!(out, "point = {}", cert.last_covered)?;
                for pair in &cert.pairs {
                    writeln!(out, "pair facet = {} z = {:?}", pair.facet, pair.z)?;
                }
                writeln!(out, "translation = {t}")?;
                writeln!(out, "mu0 = {} beta0 = {}", cert.bounds_used.mu0, cert.bounds_used.beta0)?;
                writeln!(out, "lbar_size = {}", cert.lbar_size)?;
            }
        }
        Command::Width { input, json } => {
            let (p, _) = read_polytope(&input)?;
            let w = lattice_width(&p);
            if json {
                serde_json::to_writer_pretty(&mut out, &w)?;
                writeln!(out)?;
            } else {
                writeln!(out, "width = {}", w.width)?;
                writeln!(out, "direction = {:?}", w.direction)?;
                writeln!(out, "candidates_scanned = {}", w.candidates_scanned)?;
            }
        }
        Command::Oracle {
            input,
            denominator,
            grid_cap,
        } => {
            let (p, _) = read_polytope(&input)?;
            let h = grid_oracle(&p, denominator, grid_cap)?;
            writeln!(out, "h_{denominator} = {h}")?;
        }
        Command::LrcCheck {
            velocities,
            threads: n,
            json,
        } => {
            let v = normalize_velocities(&velocities)?;
            let r = slrc_check(&v, threads(n)?)?;
            print_record(&mut out, &r, json)?;
        }
        Command::LrcScan {
            max_sum,
            csv,
            json,
            threads: n,
        } => {
            let report = scan(max_sum, threads(n)?)?;
            if csv {
                report.write_csv(&mut out)?;
            } else if json {
                serde_json::to_writer_pretty(&mut out, &report.to_json())?;
                writeln!(out)?;
            } else {
                writeln!(
                    out,
                    "{:<12} {:<22} {:>7} {:>5} {:<8} spectrum",
                    "v", "generators", "mu", "width", "verdict"
                )?;
                for r in &report.records {
                    writeln!(
                        out,
                        "{:<12} {:<22} {:>7} {:>5} {:<8} {}",
                        r.v.to_string(),
                        r.zonotope.matrix_string(),
                        r.mu.to_string(),
                        r.width,
                        r.verdict.to_string(),
                        r.spectrum
                    )?;
                }
                let survivors: Vec<String> =
                    report.survivors().iter().map(|v| v.to_string()).collect();
                writeln!(out, "pairwise coprime with sum <= 9: {}", survivors.join(" "))?;
            }
        }
        Command::Verify { input, cert } => {
            let (p, _) = read_polytope(&input)?;
            let file = File::open(&cert)
                .map_err(|e| Error::Usage(format!("cannot open {}: {e}", cert.display())))?;
            let loaded = Certificate::from_reader(BufReader::new(file), &p)?;
            if let Some(recorded) = &loaded.polytope {
                if recorded != &p.to_json() {
                    eprintln!("invalid: certificate was issued for a different polytope");
                    return Ok(Outcome::InvalidCertificate);
                }
            }
            if verify_certificate(&p, &loaded.certificate) {
                writeln!(out, "valid: mu = {}", loaded.certificate.mu)?;
            } else {
                eprintln!("invalid: certificate for mu = {} does not check", loaded.certificate.mu);
                return Ok(Outcome::InvalidCertificate);
            }
        }
    }
    out.flush().context("writing output")?;
    Ok(Outcome::Ok)
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(Error::Usage(_) | Error::Parse(_)) => 2,
        Some(Error::Domain(_)) => 3,
        Some(Error::Resource { .. }) => 4,
        Some(Error::Internal(_)) => 5,
        None => 5,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::InvalidCertificate) => ExitCode::from(1),
        Err(e) => {
            eprintln!("covrad: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

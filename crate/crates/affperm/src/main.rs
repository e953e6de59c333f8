//! Command-line front end: counting, pattern checks, the tuple encoding,
//! sampling, convergence experiments, growth diagnostics, and the
//! self-verification suite.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use affperm::counting;
use affperm::decomposition;
use affperm::error::Error;
use affperm::measures;
use affperm::patterns;
use affperm::sampling::{self, McmcConfig};
use affperm::verify::{self, Level};
use affperm::{AffinePermutation, OrdinaryPermutation};

#[derive(Parser)]
#[command(
    name = "affperm",
    about = "Bounded affine permutations avoiding decreasing patterns: \
             enumeration, encoding, transport distances, and samplers",
    version
)]
struct Cli {
    /// Worker threads for the parallel sweeps (1 = deterministic
    /// sequential reference; default = all cores)
    #[arg(long, global = true)]
    workers: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TotalMethod {
    Brute,
    Formula,
    Asymptotic,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum AvoiderMethod {
    Brute,
    UpperBound,
    Asymptotic,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SampleMethod {
    Exact,
    Mcmc,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum VerifyLevel {
    Quick,
    Full,
}

#[derive(Args)]
struct PatternChoice {
    /// Avoid the decreasing pattern (k+1)k...1
    #[arg(long, conflicts_with = "pattern")]
    k: Option<usize>,
    /// Avoid this pattern (digits like 321, or comma-separated values)
    #[arg(long)]
    pattern: Option<String>,
}

impl PatternChoice {
    fn resolve(&self) -> Result<OrdinaryPermutation, Error> {
        match (&self.k, &self.pattern) {
            (Some(k), None) => Ok(OrdinaryPermutation::decreasing(k + 1)),
            (None, Some(p)) => OrdinaryPermutation::parse(p),
            _ => Err(Error::BadInput(
                "exactly one of --k and --pattern is required".into(),
            )),
        }
    }

    /// The pattern as a decreasing length, required by the closed forms.
    fn resolve_k(&self) -> Result<usize, Error> {
        let tau = self.resolve()?;
        let m = tau.len();
        if m < 2 || !tau.values().iter().enumerate().all(|(i, &v)| v == m - i) {
            return Err(Error::BadInput(format!(
                "this method needs a decreasing pattern, got {tau}"
            )));
        }
        Ok(m - 1)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Count all bounded permutations of a given size
    Total {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum)]
        method: TotalMethod,
    },
    /// Count the avoiders of a pattern at a given size
    Avoiders {
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        pattern: PatternChoice,
        #[arg(long, value_enum)]
        method: AvoiderMethod,
    },
    /// Count centered integer vectors with |d_i| <= n_i (middle
    /// polynomial coefficient for the given part sizes)
    Z {
        /// Comma-separated part sizes, e.g. 3,4,5
        #[arg(long)]
        parts: String,
    },
    /// Print the limit constant for k parts as an exact rational
    Zstar {
        #[arg(long)]
        k: u64,
    },
    /// Test a permutation file for an occurrence of a pattern
    Check {
        /// JSON file {"size": N, "window": [...]}
        #[arg(long)]
        perm: PathBuf,
        #[arg(long)]
        pattern: String,
    },
    /// Encode a block tuple to a permutation, or decode one back
    Psi {
        #[command(subcommand)]
        direction: PsiDirection,
    },
    /// Draw avoiders uniformly (exact at small sizes, Metropolis beyond)
    Sample {
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        pattern: PatternChoice,
        #[arg(long, value_enum)]
        method: SampleMethod,
        #[arg(long, default_value_t = 1)]
        count: usize,
        /// Chain steps after burn-in (default: count * thin)
        #[arg(long)]
        steps: Option<u64>,
        /// Burn-in steps (default: 50 N^2)
        #[arg(long)]
        burnin: Option<u64>,
        /// Thinning interval (default: N^2)
        #[arg(long)]
        thin: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the samples as a JSON array here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Estimate the distance to the limit law over a size sweep
    Converge {
        #[arg(long, default_value_t = 2)]
        k: usize,
        /// Comma-separated sizes, e.g. 4,8,16,32
        #[arg(long, default_value = "4,8,16,32")]
        sizes: String,
        #[arg(long, default_value_t = 40)]
        samples: usize,
        /// Discretization atoms per segment (default: 10 N per size)
        #[arg(long)]
        segments: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the CSV here as well as to stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the per-size root of the avoider count
    Growth {
        #[command(flatten)]
        pattern: PatternChoice,
        #[arg(long, default_value = "2,3,4,5,6")]
        sizes: String,
    },
    /// Run the self-verification suite
    Verify {
        #[arg(long, value_enum, default_value_t = VerifyLevel::Quick)]
        level: VerifyLevel,
    },
}

#[derive(Subcommand)]
enum PsiDirection {
    /// Tuple JSON {"n":[..],"G":[[..],..],"H":[[..],..],"delta":[..]} to
    /// a permutation
    Encode {
        #[arg(long)]
        input: PathBuf,
    },
    /// Permutation JSON back to its canonical tuple
    Decode {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        k: usize,
    },
}

/// One row of a reproducible experiment log; serializes losslessly to
/// JSON and to a flat CSV row (parameters and outputs prefixed).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub command: String,
    pub parameters: BTreeMap<String, String>,
    pub outputs: BTreeMap<String, String>,
    pub seed: u64,
    pub elapsed_seconds: f64,
}

impl ExperimentRecord {
    /// Header + one row; map-valued fields are JSON-encoded cells so the
    /// row stays flat and lossless.
    pub fn to_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(["command", "parameters", "outputs", "seed", "elapsed_seconds"])
            .unwrap();
        w.write_record([
            self.command.clone(),
            serde_json::to_string(&self.parameters).unwrap(),
            serde_json::to_string(&self.outputs).unwrap(),
            self.seed.to_string(),
            sig12(self.elapsed_seconds),
        ])
        .unwrap();
        String::from_utf8(w.into_inner().unwrap()).unwrap()
    }

    pub fn from_csv(text: &str) -> Result<Self, Error> {
        let mut r = csv::Reader::from_reader(text.as_bytes());
        let bad = |e: String| Error::BadInput(format!("invalid record CSV: {e}"));
        let row = r
            .records()
            .next()
            .ok_or_else(|| bad("no data row".into()))?
            .map_err(|e| bad(e.to_string()))?;
        if row.len() != 5 {
            return Err(bad(format!("expected 5 columns, got {}", row.len())));
        }
        Ok(ExperimentRecord {
            command: row[0].to_string(),
            parameters: serde_json::from_str(&row[1]).map_err(|e| bad(e.to_string()))?,
            outputs: serde_json::from_str(&row[2]).map_err(|e| bad(e.to_string()))?,
            seed: row[3].parse().map_err(|_| bad("bad seed".into()))?,
            elapsed_seconds: row[4].parse().map_err(|_| bad("bad elapsed".into()))?,
        })
    }
}

/// Twelve significant digits, plain notation.
fn sig12(x: f64) -> String {
    if x == 0.0 {
        return "0.00000000000".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (11 - magnitude).max(0) as usize;
    format!("{x:.decimals$}")
}

/// Stdout writer that exits quietly instead of panicking when the pipe
/// closes early (e.g. piped through `head`).
fn write_stdout(args: std::fmt::Arguments, newline: bool) {
    let mut out = std::io::stdout();
    let ok = out
        .write_fmt(args)
        .and_then(|_| if newline { out.write_all(b"\n") } else { Ok(()) })
        .is_ok();
    if !ok {
        std::process::exit(0);
    }
}

macro_rules! outln {
    ($($t:tt)*) => { write_stdout(format_args!($($t)*), true) };
}

macro_rules! outp {
    ($($t:tt)*) => { write_stdout(format_args!($($t)*), false) };
}

fn read_json<T: serde::de::DeserializeOwned>(path: &PathBuf) -> Result<T, Error> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::BadInput(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::BadInput(format!("invalid JSON: {e}")))
}

fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<T>, Error> {
    s.split(',')
        .map(|p| {
            p.trim()
                .parse()
                .map_err(|_| Error::BadInput(format!("bad {what} entry {p:?}")))
        })
        .collect()
}

fn run(cli: Cli) -> Result<i32, Error> {
    match cli.command {
        Command::Total { n, method } => {
            match method {
                TotalMethod::Brute => outln!("{}", counting::brute_total(n)?),
                TotalMethod::Formula => outln!("{}", counting::exact_total(n)),
                TotalMethod::Asymptotic => {
                    let est = counting::asymptotic_total(n);
                    outln!("{}", sig12(est.value()));
                }
            }
            Ok(0)
        }
        Command::Avoiders { n, pattern, method } => {
            match method {
                AvoiderMethod::Brute => {
                    let tau = pattern.resolve()?;
                    outln!("{}", counting::brute_avoiders(n, &tau)?);
                }
                AvoiderMethod::UpperBound => {
                    let k = pattern.resolve_k()?;
                    outln!("{}", counting::upper_bound_avoiders(k, n as u64)?);
                }
                AvoiderMethod::Asymptotic => {
                    let k = pattern.resolve_k()?;
                    let est = counting::asymptotic_avoiders(k as u64, n as u64);
                    outln!("{}", sig12(est.value()));
                }
            }
            Ok(0)
        }
        Command::Z { parts } => {
            let parts: Vec<u64> = parse_list(&parts, "part")?;
            if parts.is_empty() || parts.contains(&0) {
                return Err(Error::BadInput("parts must be positive".into()));
            }
            outln!("{}", counting::z_count(&parts));
            Ok(0)
        }
        Command::Zstar { k } => {
            if k == 0 {
                return Err(Error::BadInput("k must be positive".into()));
            }
            let z = counting::z_star(k);
            if z.is_integer() {
                outln!("{}", z.numer());
            } else {
                outln!("{}/{}", z.numer(), z.denom());
            }
            Ok(0)
        }
        Command::Check { perm, pattern } => {
            let sigma: AffinePermutation = read_json(&perm)?;
            let tau = OrdinaryPermutation::parse(&pattern)?;
            match patterns::contains_affine(&sigma, &tau)? {
                Some(occ) => {
                    let positions: Vec<String> =
                        occ.positions.iter().map(|p| p.to_string()).collect();
                    outln!("CONTAINS witness {}", positions.join(" "));
                }
                None => outln!("AVOIDS"),
            }
            Ok(0)
        }
        Command::Psi { direction } => {
            match direction {
                PsiDirection::Encode { input } => {
                    let tuple: decomposition::DecompTuple = read_json(&input)?;
                    let sigma = decomposition::psi(&tuple);
                    outln!("{}", serde_json::to_string_pretty(&sigma).unwrap());
                }
                PsiDirection::Decode { input, k } => {
                    let sigma: AffinePermutation = read_json(&input)?;
                    let tuple = decomposition::psi_inverse(&sigma, k)?;
                    outln!("{}", serde_json::to_string_pretty(&tuple).unwrap());
                }
            }
            Ok(0)
        }
        Command::Sample {
            n,
            pattern,
            method,
            count,
            steps,
            burnin,
            thin,
            seed,
            out,
        } => {
            let tau = pattern.resolve()?;
            let samples = match method {
                SampleMethod::Exact => {
                    use rand::SeedableRng;
                    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
                    (0..count)
                        .map(|_| sampling::sample_exact(n, &tau, &mut rng))
                        .collect::<Result<Vec<_>, _>>()?
                }
                SampleMethod::Mcmc => {
                    let defaults = McmcConfig::defaults(n, 0, seed);
                    let thin = thin.unwrap_or(defaults.thin).max(1);
                    let cfg = McmcConfig {
                        steps: steps.unwrap_or(thin * count as u64),
                        burn_in: burnin.unwrap_or(defaults.burn_in),
                        thin,
                        ..defaults
                    };
                    sampling::mcmc_sample(n, &tau, &cfg)
                }
            };
            let json = serde_json::to_string_pretty(&samples).unwrap();
            match out {
                Some(path) => std::fs::write(&path, json + "\n")
                    .map_err(|e| Error::BadInput(format!("cannot write {}: {e}", path.display())))?,
                None => outln!("{json}"),
            }
            Ok(0)
        }
        Command::Converge {
            k,
            sizes,
            samples,
            segments,
            seed,
            out,
        } => {
            if k < 1 {
                return Err(Error::BadInput("k must be positive".into()));
            }
            let sizes: Vec<usize> = parse_list(&sizes, "size")?;
            let mut csv = String::from("k,N,samples,segments,seed,wass2_estimate,elapsed_seconds\n");
            for (step, &n) in sizes.iter().enumerate() {
                use rand::SeedableRng;
                let started = Instant::now();
                let m = segments.unwrap_or(10 * n);
                let row_seed = seed.wrapping_add(step as u64);
                let mut pool = verify::draw_avoiders(k, n, samples, row_seed)?.into_iter();
                let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(row_seed ^ 0xffff);
                let estimate = measures::wass2_estimate(k, n, samples, m, &mut rng, |_| {
                    Ok(pool.next().expect("pool holds enough draws"))
                })?;
                let elapsed = started.elapsed().as_secs_f64();
                csv.push_str(&format!(
                    "{k},{n},{samples},{m},{row_seed},{},{}\n",
                    sig12(estimate),
                    sig12(elapsed)
                ));
            }
            outp!("{csv}");
            std::io::stdout().flush().ok();
            if let Some(path) = out {
                std::fs::write(&path, &csv)
                    .map_err(|e| Error::BadInput(format!("cannot write {}: {e}", path.display())))?;
            }
            Ok(0)
        }
        Command::Growth { pattern, sizes } => {
            let tau = pattern.resolve()?;
            let sizes: Vec<usize> = parse_list(&sizes, "size")?;
            let roots = counting::growth_rate_diagnostic(&tau, &sizes)?;
            for (n, r) in sizes.iter().zip(roots) {
                outln!("{n} {}", sig12(r));
            }
            Ok(0)
        }
        Command::Verify { level } => {
            let level = match level {
                VerifyLevel::Quick => Level::Quick,
                VerifyLevel::Full => Level::Full,
            };
            let mut all_passed = true;
            for r in verify::run_all(level) {
                all_passed &= r.passed;
                outln!(
                    "[{:2}] {} {}: {}",
                    r.id,
                    if r.passed { "PASS" } else { "FAIL" },
                    r.name,
                    r.detail
                );
            }
            Ok(if all_passed { 0 } else { 1 })
        }
    }
}

fn main() -> std::process::ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap exits 0 for --help/--version and 2 for usage errors
            e.exit();
        }
    };
    #[cfg(feature = "parallel")]
    if let Some(w) = cli.workers {
        rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build_global()
            .ok();
    }
    #[cfg(not(feature = "parallel"))]
    let _ = cli.workers;
    match run(cli) {
        Ok(code) => std::process::ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            std::process::ExitCode::from(1)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn experiment_record_round_trips_json() {
        let record = ExperimentRecord {
            command: "converge".into(),
            parameters: BTreeMap::from([
                ("k".into(), "2".into()),
                ("sizes".into(), "4,8".into()),
            ]),
            outputs: BTreeMap::from([("wass2_estimate".into(), "0.39".into())]),
            seed: 42,
            elapsed_seconds: 1.5,
        };
        let json = serde_json::to_string(&record).unwrap();
        let back: ExperimentRecord = serde_json::from_str(&json).unwrap();
        assert_eq!(back, record);
        let csv_text = record.to_csv();
        assert!(csv_text.ends_with('\n') && !csv_text.contains('\r'));
        assert_eq!(ExperimentRecord::from_csv(&csv_text).unwrap(), record);
    }

    #[test]
    fn sig12_formats() {
        assert_eq!(sig12(0.0), "0.00000000000");
        assert_eq!(sig12(1.0), "1.00000000000");
        assert_eq!(sig12(123.456), "123.456000000");
        assert_eq!(sig12(0.001), "0.00100000000000");
        assert_eq!(sig12(1e15), "1000000000000000");
    }
}

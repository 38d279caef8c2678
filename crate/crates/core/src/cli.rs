//! The `varlp` command line.
//!
//! Every verb prints one JSON document on standard output. Exit status is 0
//! when a computation succeeds or a certificate passes, 1 when a certificate
//! fails (its witness is in the output) and 2 for invalid input.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::json;
use thiserror::Error;

use crate::constructions::{
    aic_refutation, aic_test, build_fpp_basis, build_linfty_copy, check_fk_bound,
    check_premonotone, nakano_basis, separation_ladder, verify_linfty_isometry, BasisFamily,
    CertificateReport, EpsLadder, Gamma, Sampling, CERT_TOL, DEFAULT_SAMPLES,
};
use crate::exponent::{classify, ExponentSeq, ExponentSpec};
use crate::lab::{km_iterate, lipschitz_sample, random_point, sample_domain, Operator};
use crate::modular::{rho, SimpleFunction};
use crate::norm::{luxemburg_norm, DEFAULT_TOL};
use crate::{rng, Error};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CERTIFICATE_FAILED: i32 = 1;
pub const EXIT_INVALID: i32 = 2;

#[derive(Parser, Debug)]
#[command(
    name = "varlp",
    version,
    about = "Variable-exponent Lebesgue space toolkit"
)]
pub struct Cli {
    /// Exponent spec JSON file.
    #[arg(long, global = true, value_name = "FILE")]
    spec: Option<PathBuf>,
    /// Seed for every sampled quantity.
    #[arg(long, global = true, env = "VARLP_SEED", default_value_t = 0)]
    seed: u64,
    /// Tolerance (norm tolerance for `norm`, certificate tolerance otherwise).
    #[arg(long, global = true, env = "VARLP_TOL")]
    tol: Option<f64>,
    /// Samples per certificate check.
    #[arg(long, global = true, env = "VARLP_SAMPLES", default_value_t = DEFAULT_SAMPLES)]
    samples: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Derived scalars and structural predicates of a spec.
    Classify,
    /// Modular of a simple function.
    Rho {
        #[arg(long = "fn", value_name = "FILE")]
        function: PathBuf,
    },
    /// Luxemburg norm of a simple function.
    Norm {
        #[arg(long = "fn", value_name = "FILE")]
        function: PathBuf,
    },
    /// Build a finite basis family.
    Construct(ConstructArgs),
    /// Run certificate checks on a constructed family.
    Certify {
        #[command(flatten)]
        construct: ConstructArgs,
        /// Indices k for the separation and F_k checks (default: 1, 2, 4, … below N).
        #[arg(long, value_delimiter = ',')]
        k: Vec<usize>,
        #[arg(long, value_enum, default_value_t = Check::All)]
        check: Check,
        #[arg(long, default_value_t = 6.0)]
        r0: f64,
    },
    /// Test or refute an asymptotically isometric copy of l1.
    Aic {
        #[command(flatten)]
        construct: ConstructArgs,
        #[arg(long, value_enum, default_value_t = AicMode::Refute)]
        mode: AicMode,
        /// eps_n = c * n^(-q).
        #[arg(long, default_value_t = 0.5)]
        eps_c: f64,
        #[arg(long, default_value_t = 2.0)]
        eps_q: f64,
    },
    /// Krasnoselskii-Mann iteration of a built-in operator. The residual
    /// traces are regression anchors, not reproductions of published runs.
    Iterate {
        #[arg(long, value_name = "FILE")]
        operator: PathBuf,
        /// Starting point; a seeded random point of norm <= 1 when omitted.
        #[arg(long, value_name = "FILE")]
        x0: Option<PathBuf>,
        #[arg(long, default_value_t = 0.5)]
        step: f64,
        #[arg(long, default_value_t = 1000)]
        max_steps: usize,
    },
    /// Empirical Lipschitz constant of a built-in operator.
    Lipschitz {
        #[arg(long, value_name = "FILE")]
        operator: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        radius: f64,
    },
}

#[derive(Args, Debug)]
struct ConstructArgs {
    #[arg(long = "construct", value_enum)]
    kind: Kind,
    /// Number of vectors.
    #[arg(long, default_value_t = 8)]
    n: usize,
    /// Truncation depth of the l-infinity copy.
    #[arg(long, default_value_t = 16)]
    j: usize,
    /// gamma_k = 1 + a * r^k for the FPP basis.
    #[arg(long, default_value_t = 1.0)]
    gamma_a: f64,
    #[arg(long, default_value_t = 0.5)]
    gamma_r: f64,
    /// Exponent sequence JSON for the Nakano basis.
    #[arg(long, default_value = r#"{"kind":"harmonic_approach","a":1,"b":1}"#)]
    p_seq: String,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Kind {
    Linfty,
    Fpp,
    Nakano,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Check {
    All,
    Separation,
    Premonotone,
    Fk,
    Linfty,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum AicMode {
    Test,
    Refute,
}

#[derive(Debug, Error)]
enum CliError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("invalid JSON in {path}: {source}")]
    Json {
        path: String,
        source: serde_json::Error,
    },
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Lib(#[from] Error),
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|source| CliError::Json {
        path: path.display().to_string(),
        source,
    })
}

impl Cli {
    fn spec(&self) -> Result<ExponentSpec, CliError> {
        let path = self
            .spec
            .as_deref()
            .ok_or_else(|| CliError::Usage("this command needs --spec FILE".into()))?;
        read_json(path)
    }

    fn sampling(&self) -> Sampling {
        Sampling {
            samples: self.samples,
            seed: self.seed,
            tol: self.tol.unwrap_or(CERT_TOL),
        }
    }

    fn build(&self, a: &ConstructArgs) -> Result<BasisFamily, CliError> {
        Ok(match a.kind {
            Kind::Linfty => build_linfty_copy(&self.spec()?, a.n, a.j)?,
            Kind::Fpp => {
                let gamma = Gamma::geometric(a.gamma_a, a.gamma_r, a.n)?;
                build_fpp_basis(&self.spec()?, &gamma, a.n)?
            }
            Kind::Nakano => {
                let seq: ExponentSeq =
                    serde_json::from_str(&a.p_seq).map_err(|source| CliError::Json {
                        path: "--p-seq".into(),
                        source,
                    })?;
                nakano_basis(&seq, a.n)?
            }
        })
    }
}

/// Output document and whether it counts as a pass.
struct Outcome {
    doc: serde_json::Value,
    pass: bool,
}

fn computed(v: impl Serialize) -> Outcome {
    Outcome {
        doc: serde_json::to_value(v).expect("reports serialize"),
        pass: true,
    }
}

fn certified(reports: Vec<CertificateReport>) -> Outcome {
    let pass = reports.iter().all(|r| r.pass);
    Outcome {
        doc: json!({ "pass": pass, "reports": reports }),
        pass,
    }
}

fn default_ks(n: usize) -> Vec<usize> {
    std::iter::successors(Some(1usize), |k| Some(k * 2))
        .take_while(|&k| k < n)
        .collect()
}

/// `2, …, n` spaced roughly logarithmically.
fn log_spaced(n: usize) -> Vec<usize> {
    let mut out: Vec<usize> = (0..=40)
        .map(|i| (2f64 * (n as f64 / 2.0).powf(i as f64 / 40.0)).round() as usize)
        .filter(|&m| (2..=n).contains(&m))
        .collect();
    out.dedup();
    out
}

fn execute(cli: &Cli) -> Result<Outcome, CliError> {
    match &cli.command {
        Command::Classify => Ok(computed(classify(&cli.spec()?))),
        Command::Rho { function } => {
            let f: SimpleFunction = read_json(function)?;
            Ok(computed(json!({ "rho": rho(&cli.spec()?, &f)? })))
        }
        Command::Norm { function } => {
            let f: SimpleFunction = read_json(function)?;
            let tol = cli.tol.unwrap_or(DEFAULT_TOL);
            Ok(computed(luxemburg_norm(&cli.spec()?, &f, tol)?))
        }
        Command::Construct(a) => Ok(computed(cli.build(a)?)),
        Command::Certify {
            construct,
            k,
            check,
            r0,
        } => {
            let fam = cli.build(construct)?;
            let opts = cli.sampling();
            let ks = if k.is_empty() {
                default_ks(fam.len())
            } else {
                k.clone()
            };
            let mut reports = Vec::new();
            if construct.kind == Kind::Linfty {
                if matches!(check, Check::All | Check::Linfty) {
                    reports.push(verify_linfty_isometry(&fam, opts.tol)?);
                }
                if matches!(check, Check::All | Check::Premonotone) {
                    reports.push(check_premonotone(&fam, &opts)?);
                }
                if matches!(check, Check::Separation | Check::Fk) {
                    return Err(CliError::Usage(
                        "separation and F_k checks apply to fpp and nakano families".into(),
                    ));
                }
                return Ok(certified(reports));
            }
            if *check == Check::Linfty {
                return Err(CliError::Usage(
                    "the linfty check applies to --construct linfty".into(),
                ));
            }
            if matches!(check, Check::All | Check::Separation) {
                reports.extend(separation_ladder(&fam, &ks, &opts)?.reports);
            }
            if matches!(check, Check::All | Check::Premonotone) {
                reports.push(check_premonotone(&fam, &opts)?);
            }
            if matches!(check, Check::All | Check::Fk) {
                for &kk in &ks {
                    reports.push(check_fk_bound(&fam, kk, *r0, &opts)?);
                }
            }
            Ok(certified(reports))
        }
        Command::Aic {
            construct,
            mode,
            eps_c,
            eps_q,
        } => {
            let fam = cli.build(construct)?;
            let ladder = EpsLadder::power(*eps_c, *eps_q)?;
            let report = match mode {
                AicMode::Test => {
                    let eps: Vec<f64> = (1..=fam.len()).map(|n| ladder.eps(n)).collect();
                    aic_test(&fam.spec, &fam.vectors, &eps, &cli.sampling())?
                }
                AicMode::Refute => aic_refutation(
                    &fam,
                    &log_spaced(fam.len()),
                    &ladder,
                    cli.tol.unwrap_or(CERT_TOL),
                )?,
            };
            Ok(certified(vec![report]))
        }
        Command::Iterate {
            operator,
            x0,
            step,
            max_steps,
        } => {
            let spec = cli.spec()?;
            let op: Operator = read_json(operator)?;
            let start = match x0 {
                Some(p) => read_json(p)?,
                None => {
                    let mut g = rng::stream(cli.seed, rng::POINTS);
                    random_point(&spec, &sample_domain(&spec, &op), 1.0, &mut g)?
                }
            };
            let tol = cli.tol.unwrap_or(DEFAULT_TOL);
            Ok(computed(km_iterate(
                &spec, &op, &start, *step, *max_steps, tol,
            )?))
        }
        Command::Lipschitz { operator, radius } => {
            let op: Operator = read_json(operator)?;
            Ok(computed(lipschitz_sample(
                &cli.spec()?,
                &op,
                cli.samples,
                *radius,
                cli.seed,
            )?))
        }
    }
}

/// Parse `args`, run the command and write JSON to `out` and diagnostics to
/// `err`. Returns the exit status.
pub fn run(
    args: impl IntoIterator<Item = impl Into<OsString> + Clone>,
    out: &mut impl Write,
    err: &mut impl Write,
) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) if e.use_stderr() => {
            let _ = write!(err, "{e}");
            return EXIT_INVALID;
        }
        Err(e) => {
            // --help and --version
            let _ = write!(out, "{e}");
            return EXIT_OK;
        }
    };
    match execute(&cli) {
        Ok(o) => {
            let text = serde_json::to_string_pretty(&o.doc).expect("JSON values serialize");
            let _ = writeln!(out, "{text}");
            if o.pass {
                EXIT_OK
            } else {
                EXIT_CERTIFICATE_FAILED
            }
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_INVALID
        }
    }
}

pub fn main() -> i32 {
    run(
        std::env::args_os(),
        &mut std::io::stdout().lock(),
        &mut std::io::stderr().lock(),
    )
}

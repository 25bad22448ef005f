//! Command line front end: build forms, manage the operator cache, compute
//! Hecke eigenvalues, run the verification suite, and emit eigenvalue tables.
//!
//! Exit codes: 0 success, 2 verification failure (including a failed
//! eigenform check), 3 missing cache, 4 reconstruction failure, 1 anything
//! else.

use clap::{Parser, Subcommand};
use picard_forms::cache_ensure::{ensure_table, EnsureMode};
use picard_forms::catalog::Catalog;
use picard_forms::config::{Config, OutputFormat};
use picard_forms::cyclotomic::Cyc;
use picard_forms::error::Error;
use picard_forms::fj::FjSeries;
use picard_forms::hecke::{eigenvalue, HeckeOp};
use picard_forms::sections::Section;
use picard_forms::textio::parse_eis;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "picard", version, about = "Exact Picard modular form engine")]
struct Cli {
    /// Configuration file (key=value lines); flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Operator cache path.
    #[arg(long, global = true)]
    cache: Option<PathBuf>,
    /// Fourier-Jacobi truncation order.
    #[arg(long, short = 'W', global = true)]
    order: Option<usize>,
    /// Working precision in bits for the analytic bootstrap.
    #[arg(long, global = true)]
    precision: Option<usize>,
    /// Denominator bound for rational reconstruction.
    #[arg(long, global = true)]
    denominator_bound: Option<String>,
    /// Output format.
    #[arg(long, global = true, value_parser = ["human", "delimited"])]
    format: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the Fourier-Jacobi expansion of a named form.
    Build {
        name: String,
        /// Compute missing operator tables instead of failing.
        #[arg(long)]
        compute: bool,
    },
    /// Apply a Hecke operator to a form and report the eigenvalue.
    Hecke {
        form: String,
        /// Operator kind: `T` (split, takes a generator like 1+3r) or `Tm`
        /// (inert, takes the rational prime).
        kind: String,
        /// Operator argument.
        arg: String,
        #[arg(long)]
        compute: bool,
    },
    /// Run verification suites: `all`, an identity id, or `structure`.
    Verify {
        #[arg(default_value = "all")]
        suite: String,
        #[arg(long)]
        compute: bool,
    },
    /// Manage the operator cache.
    Cache {
        /// `list`, `compute`, or `refresh`.
        action: String,
        /// Largest norm of the endomorphism primes to compute.
        #[arg(long)]
        norms_up_to: Option<i64>,
        /// Hecke primes whose averaging matrices are computed.
        #[arg(long, value_delimiter = ',', default_values_t = vec![2i64, 5, 7, 13])]
        hecke_primes: Vec<i64>,
        /// Fail immediately when the cache lock is held.
        #[arg(long)]
        fail_fast: bool,
    },
    /// Print the eigenvalue table for the catalog eigenforms.
    Tables {
        #[arg(long, value_delimiter = ',', default_values_t = vec![2i64, 5, 7, 13])]
        primes: Vec<i64>,
        #[arg(long)]
        compute: bool,
    },
    /// Restrict a scalar form to the modular curve (its q-expansion).
    Restrict {
        name: String,
        #[arg(long)]
        compute: bool,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            eprint!("{e}");
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            let code = match e {
                Error::MissingOperatorTable(_) => 3,
                Error::ReconstructionFailed(_) | Error::PrecisionExhausted(_) => 4,
                Error::NotAnEigenform(_) | Error::ValidationFailed(_) => 2,
                _ => 1,
            };
            ExitCode::from(code)
        }
    }
}

fn effective_config(cli: &Cli) -> Result<Config, Error> {
    let mut cfg = match &cli.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    if let Some(p) = &cli.cache {
        cfg.cache_path = p.clone();
    }
    if let Some(w) = cli.order {
        cfg.truncation = w;
    }
    if let Some(p) = cli.precision {
        cfg.precision_bits = p;
    }
    if let Some(b) = &cli.denominator_bound {
        cfg.denominator_bound = b
            .parse()
            .map_err(|_| Error::Parse(format!("bad denominator bound {b:?}")))?;
    }
    match cli.format.as_deref() {
        Some("human") => cfg.output_format = OutputFormat::Human,
        Some("delimited") => cfg.output_format = OutputFormat::Delimited,
        _ => {}
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    let cfg = effective_config(&cli)?;
    match &cli.command {
        Command::Build { name, compute } => {
            let table = load_table(&cfg, *compute, &[])?;
            let cat = Catalog::new(&table, cfg.truncation);
            let rec = cat.record(name)?;
            print_series(&cfg, name, &rec.last);
            if let Some(scale) = &rec.printed_scale {
                println!("# leading-coefficient scale: {scale}");
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Hecke {
            form,
            kind,
            arg,
            compute,
        } => {
            let op = match kind.as_str() {
                "T" => HeckeOp::nu(parse_eis(arg)?)?,
                "Tm" => HeckeOp::minus_p(
                    arg.parse()
                        .map_err(|_| Error::Parse(format!("bad prime {arg:?}")))?,
                )?,
                _ => return Err(Error::Parse(format!("operator kind {kind:?}"))),
            };
            let table = load_table(&cfg, *compute, &[op.rational_prime()])?;
            let cat = Catalog::new(&table, cfg.truncation);
            let rec = cat.record(form)?;
            let rep = eigenvalue(&rec, &op, &table)?;
            match cfg.output_format {
                OutputFormat::Human => {
                    println!(
                        "{} under {}: eigenvalue {} (coefficients checked: {:?})",
                        rep.form, rep.operator, rep.eigenvalue, rep.coefficients_checked
                    );
                }
                OutputFormat::Delimited => println!("{}", rep.delimited()),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify { suite, compute } => {
            let table = load_table(&cfg, *compute, &[])?;
            let cat = Catalog::new(&table, cfg.truncation);
            let ids: Vec<String> = if suite == "all" {
                Catalog::identity_names().iter().map(|s| s.to_string()).collect()
            } else {
                vec![suite.clone()]
            };
            let mut reports = Vec::new();
            let mut all_ok = true;
            for id in &ids {
                match cat.verify_identity(id) {
                    Ok(r) => reports.push(r),
                    Err(e) => {
                        // failures are report content, not hard errors
                        all_ok = false;
                        match cfg.output_format {
                            OutputFormat::Human => {
                                println!("FAIL {id} [W={}] ({e})", cfg.truncation)
                            }
                            OutputFormat::Delimited => {
                                println!("{id}|{e}|W={}|FAIL", cfg.truncation)
                            }
                        }
                    }
                }
            }
            for r in &reports {
                for (claim, ok, detail) in &r.checks {
                    all_ok &= ok;
                    let status = if *ok { "PASS" } else { "FAIL" };
                    match cfg.output_format {
                        OutputFormat::Human => {
                            let extra = if detail.is_empty() {
                                String::new()
                            } else {
                                format!(" ({detail})")
                            };
                            println!("{status} {claim} [W={}]{extra}", r.w_checked);
                        }
                        OutputFormat::Delimited => {
                            println!("{claim}|{}|W={}|{status}", r.description, r.w_checked);
                        }
                    }
                }
            }
            Ok(if all_ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            })
        }
        Command::Cache {
            action,
            norms_up_to,
            hecke_primes,
            fail_fast,
        } => {
            let wait = if *fail_fast { 0 } else { 60_000 };
            let w = norms_up_to.map(|n| n as usize).unwrap_or(cfg.truncation);
            match action.as_str() {
                "list" => {
                    let table = picard_forms::cache::load(&cfg.cache_path)?;
                    println!(
                        "cache {} precision={} bound={} orientation={}",
                        cfg.cache_path.display(),
                        table.meta.precision,
                        table.meta.denom_bound,
                        if table.meta.orientation_conj { "conj" } else { "std" }
                    );
                    for (alpha, _) in &table.m_prime {
                        println!("m|{alpha}|norm={}", alpha.norm());
                    }
                    for ((alpha, n), mat) in &table.t_mats {
                        println!("t|{alpha}|degree={n}|{}x{}", mat.rows, mat.cols);
                    }
                    Ok(ExitCode::SUCCESS)
                }
                "compute" | "refresh" => {
                    let mode = if action == "refresh" {
                        EnsureMode::Refresh
                    } else {
                        EnsureMode::Compute
                    };
                    let out = ensure_table(&cfg, w, hecke_primes, mode, wait)?;
                    if out.recomputed {
                        println!(
                            "computed tables for order {w}, Hecke primes {hecke_primes:?}"
                        );
                        if let Some(d) = out.diff {
                            println!("diff against previous cache: {d}");
                        }
                    } else {
                        println!("cache already covers the request");
                    }
                    Ok(ExitCode::SUCCESS)
                }
                _ => Err(Error::Parse(format!("cache action {action:?}"))),
            }
        }
        Command::Tables { primes, compute } => {
            let table = load_table(&cfg, *compute, primes)?;
            let cat = Catalog::new(&table, cfg.truncation);
            for name in ["big_phi0", "psi2", "d0", "e33_0", "e33_3"] {
                let rec = cat.record(name)?;
                for &p in primes {
                    let op = match p.rem_euclid(3) {
                        1 => HeckeOp::nu(picard_forms::eisenstein::split_prime(p)?)?,
                        2 => HeckeOp::minus_p(p)?,
                        _ => continue,
                    };
                    match eigenvalue(&rec, &op, &table) {
                        Ok(rep) => println!("{}", rep.delimited()),
                        Err(Error::TruncationTooShallow(_)) | Err(Error::AllCoefficientsZero) => {
                            println!("{name}|{}|{p}|unavailable at this truncation|", op.label());
                        }
                        Err(e) => return Err(e),
                    }
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Restrict { name, compute } => {
            let table = load_table(&cfg, *compute, &[])?;
            let cat = Catalog::new(&table, cfg.truncation);
            let rec = cat.record(name)?;
            let q = rec.last.restrict_to_curve();
            match cfg.output_format {
                OutputFormat::Human => {
                    let terms: Vec<String> = q
                        .iter()
                        .enumerate()
                        .filter(|(_, c)| !c.is_zero())
                        .map(|(n, c)| format!("({c}) q^{n}"))
                        .collect();
                    println!(
                        "{}",
                        if terms.is_empty() {
                            "0".to_string()
                        } else {
                            terms.join(" + ")
                        }
                    );
                }
                OutputFormat::Delimited => {
                    for (n, c) in q.iter().enumerate() {
                        println!("{name}|{n}|{c}");
                    }
                }
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn load_table(
    cfg: &Config,
    compute: bool,
    primes: &[i64],
) -> Result<picard_forms::theta::operators::OperatorTable, Error> {
    let mode = if compute {
        EnsureMode::Compute
    } else {
        EnsureMode::LoadOnly
    };
    Ok(ensure_table(cfg, cfg.truncation, primes, mode, 60_000)?.table)
}

fn print_series(cfg: &Config, name: &str, s: &FjSeries) {
    match cfg.output_format {
        OutputFormat::Human => {
            let mut parts = Vec::new();
            for (n, c) in s.coeffs.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let body = pretty_section(c);
                parts.push(if n == 0 {
                    body
                } else if n == 1 {
                    format!("({body}) w")
                } else {
                    format!("({body}) w^{n}")
                });
            }
            println!(
                "{name} = {} + O(w^{})",
                if parts.is_empty() {
                    "0".into()
                } else {
                    parts.join(" + ")
                },
                s.valid_to() + 1
            );
        }
        OutputFormat::Delimited => {
            for (n, c) in s.coeffs.iter().enumerate() {
                for (m, v) in &c.coeffs {
                    println!("{name}|{n}|{}|{}|{}|{v}", m.0, m.1, m.2);
                }
            }
        }
    }
}

/// Display-style monomial printing: `36*Y^3 + 81*Y^2*Z + 81*Y*Z^2 + 36*Z^3`.
fn pretty_section(s: &Section) -> String {
    if s.is_zero() {
        return "0".into();
    }
    let mut terms: Vec<_> = s.coeffs.iter().collect();
    // X-power ascending, then Y-power descending
    terms.sort_by_key(|(m, _)| (m.0, std::cmp::Reverse(m.1)));
    let mut out = String::new();
    for (i, (m, c)) in terms.into_iter().enumerate() {
        let mut factors = Vec::new();
        for (e, name) in [(m.0 as u16, "X"), (m.1, "Y"), (m.2, "Z")] {
            match e {
                0 => {}
                1 => factors.push(name.to_string()),
                _ => factors.push(format!("{name}^{e}")),
            }
        }
        let mono = factors.join("*");
        // pull a leading minus out of purely rational coefficients
        let (neg, cabs) = if c.is_rational() && c.a < num_rational::BigRational::from_integer(0.into())
        {
            (true, -c.clone())
        } else {
            (false, c.clone())
        };
        let coef = if cabs == Cyc::one() && !mono.is_empty() {
            String::new()
        } else if cabs.is_rational() {
            format!("{cabs}")
        } else {
            format!("({cabs})")
        };
        let body = match (coef.is_empty(), mono.is_empty()) {
            (true, false) => mono,
            (false, true) => coef,
            (false, false) => format!("{coef}*{mono}"),
            (true, true) => "1".into(),
        };
        if i == 0 {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        out.push_str(&body);
    }
    out
}

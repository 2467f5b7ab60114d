//! Argument parsing and subcommand dispatch.
//!
//! Exit codes: 0 when every certificate passes, 1 when one fails or a run
//! cannot complete, 2 for invalid arguments.

use std::ffi::OsString;
use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::config::{Grid, VerifyConfig, WeightRange};
use crate::grid::{polynomial_log_abs, s_log_abs, write_grid};
use crate::pipeline;
use crate::report::{write_json, Header, LemmaSReport};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "periodpoly", version, about = "Zeros of period polynomials of level-one Hecke eigenforms")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Full zero certificate for every eigenform in a weight range.
    Verify(VerifyArgs),
    /// Winding number and boundary minimum of sin 2πz - sin(2π/z) on 4/5 <= |z| <= 5/4.
    LemmaS(LemmaSArgs),
    /// CSV grid of log10 |r_f^-(z)| for one eigenform.
    Plotgrid(PlotArgs),
    /// Roots of the period polynomial of the Bernoulli-number cusp form.
    Bernoulli(BernoulliArgs),
    /// Hecke eigenvalues and q-expansion coefficients.
    Eigenforms(RangeArgs),
    /// Critical L-values with truncation bounds.
    Lvalues(RangeArgs),
}

#[derive(Args, Debug)]
struct RangeArgs {
    /// Even weights `A..B` (inclusive) or a single weight.
    #[arg(long, default_value = "12..32")]
    weights: WeightRange,
    /// Working precision in bits; default max(192, 6k).
    #[arg(long)]
    prec_bits: Option<usize>,
    /// Number of q-expansion coefficients; default max(2k, 64).
    #[arg(long)]
    terms: Option<usize>,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

impl RangeArgs {
    fn config(&self) -> VerifyConfig {
        let mut c = VerifyConfig::new(self.weights, self.out.clone());
        c.prec_bits = self.prec_bits;
        c.n_coeffs = self.terms;
        c
    }
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[command(flatten)]
    range: RangeArgs,
    /// Initial samples per circle for contour checks.
    #[arg(long, default_value_t = 256)]
    samples: usize,
}

#[derive(Args, Debug)]
struct LemmaSArgs {
    #[arg(long, default_value_t = 256)]
    samples: usize,
    /// Also write a CSV grid `XMIN,XMAX,YMIN,YMAX,NX,NY` of log10 |S|.
    #[arg(long, allow_hyphen_values = true)]
    grid: Option<Grid>,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct PlotArgs {
    #[arg(long)]
    weight: u32,
    /// Index of the eigenform within the weight, in output order of `eigenforms`.
    #[arg(long, default_value_t = 0)]
    form: usize,
    #[arg(long, default_value = "-2.5,2.5,-2.5,2.5,501,501", allow_hyphen_values = true)]
    grid: Grid,
    #[arg(long)]
    prec_bits: Option<usize>,
    #[arg(long)]
    terms: Option<usize>,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct BernoulliArgs {
    /// Even index with 0 < n < w.
    #[arg(long)]
    n: usize,
    /// Degree parameter w = k - 2.
    #[arg(long)]
    w: usize,
    #[arg(long, default_value_t = 192)]
    prec_bits: usize,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

/// Parses `args` (program name first), runs the subcommand and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Run(msg)) => {
            eprintln!("error: {msg}");
            EXIT_FAIL
        }
    }
}

enum Failure {
    Usage(String),
    Run(String),
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Run(e.to_string())
    }
}

fn status(passed: bool) -> i32 {
    if passed {
        EXIT_PASS
    } else {
        EXIT_FAIL
    }
}

fn out_file(dir: &Path, name: &str) -> Result<PathBuf, Failure> {
    fs::create_dir_all(dir)?;
    Ok(dir.join(name))
}

fn dispatch(command: Command) -> Result<i32, Failure> {
    match command {
        Command::Verify(a) => {
            if a.samples < 8 {
                return Err(Failure::Usage("--samples must be at least 8".into()));
            }
            let mut config = a.range.config();
            config.contour_samples = a.samples;
            let report = pipeline::verify(&config);
            for w in &report.weights {
                if w.dimension == 0 {
                    println!("k={:<4} {}", w.weight, w.note.as_deref().unwrap_or("no forms"));
                }
                for f in &w.forms {
                    println!(
                        "k={:<4} form {:<2} circle zeros {:>3}/{:<3} max||rho|-1| {:<12.3e} {}",
                        f.weight,
                        f.form_index,
                        f.zeros.n_circle_zeros,
                        f.zeros.expected_circle_zeros,
                        f.zeros.max_modulus_deviation.parse::<f64>().unwrap_or(f64::NAN),
                        if f.passed { "pass" } else { "FAIL" }
                    );
                }
            }
            for e in &report.failures {
                println!("k={:<4} form {:?} error: {}", e.weight, e.form_index, e.error);
            }
            println!(
                "annulus winding {} min|S| {}: {}",
                report.annulus.winding.count,
                report.annulus.boundary_min,
                if report.annulus.passed { "pass" } else { "FAIL" }
            );
            println!("{}/{} forms pass", report.n_passed, report.n_forms);
            write_json(&out_file(&config.out_dir, "verify.json")?, &report)?;
            Ok(status(report.passed))
        }
        Command::LemmaS(a) => {
            if a.samples < 8 {
                return Err(Failure::Usage("--samples must be at least 8".into()));
            }
            let run = pipeline::annulus_certificate(a.samples);
            let grid_csv = match a.grid {
                Some(g) => {
                    let path = out_file(&a.out, "lemma_s_grid.csv")?;
                    write_grid(BufWriter::new(File::create(&path)?), &g, s_log_abs)?;
                    Some("lemma_s_grid.csv".to_string())
                }
                None => None,
            };
            let c = &run.report;
            println!(
                "winding {} (doubled {}), min|S| {}: {}",
                c.winding.count,
                c.winding_doubled.count,
                c.boundary_min,
                if c.passed { "pass" } else { "FAIL" }
            );
            let report = LemmaSReport { header: Header::new("periodpoly.lemma_s"), certificate: run.report, grid_csv };
            write_json(&out_file(&a.out, "lemma_s.json")?, &report)?;
            Ok(status(report.certificate.passed))
        }
        Command::Plotgrid(a) => {
            let weights: WeightRange = a.weight.to_string().parse().map_err(Failure::Usage)?;
            let mut config = VerifyConfig::new(weights, a.out.clone());
            config.prec_bits = a.prec_bits;
            config.n_coeffs = a.terms;
            let r = pipeline::period_polynomial_for(a.weight, a.form, &config).map_err(|e| match e {
                periodpoly_core::Error::NoCuspForms(_) | periodpoly_core::Error::InvalidParameters(_) => {
                    Failure::Usage(e.to_string())
                }
                other => Failure::Run(other.to_string()),
            })?;
            let name = format!("plot_k{}_f{}.csv", a.weight, a.form);
            let path = out_file(&a.out, &name)?;
            write_grid(BufWriter::new(File::create(&path)?), &a.grid, polynomial_log_abs(&r))?;
            println!("wrote {}", path.display());
            Ok(EXIT_PASS)
        }
        Command::Bernoulli(a) => {
            if a.n % 2 == 1 || a.n == 0 || a.n >= a.w {
                return Err(Failure::Usage(format!("need n even with 0 < n < w, got n = {}, w = {}", a.n, a.w)));
            }
            let report = pipeline::bernoulli(a.n, a.w, a.prec_bits).map_err(|e| Failure::Run(e.to_string()))?;
            println!(
                "n={} w={}: {} forced, {} others, {} on the circle, max||rho|-1| {}",
                report.n, report.w, report.n_trivial, report.n_nontrivial, report.n_on_circle, report.max_modulus_deviation
            );
            let name = format!("bernoulli_n{}_w{}.json", a.n, a.w);
            write_json(&out_file(&a.out, &name)?, &report)?;
            Ok(status(report.passed))
        }
        Command::Eigenforms(a) => {
            let config = a.config();
            let report = pipeline::eigenform_listing(&config);
            for w in &report.weights {
                println!("k={:<4} dim {}", w.weight, w.dimension);
            }
            write_json(&out_file(&config.out_dir, "eigenforms.json")?, &report)?;
            Ok(status(report.failures.is_empty()))
        }
        Command::Lvalues(a) => {
            let config = a.config();
            let report = pipeline::lvalue_listing(&config);
            for f in &report.forms {
                println!("k={:<4} form {:<2} {} values", f.weight, f.form_index, f.values.len());
            }
            write_json(&out_file(&config.out_dir, "lvalues.json")?, &report)?;
            Ok(status(report.failures.is_empty()))
        }
    }
}

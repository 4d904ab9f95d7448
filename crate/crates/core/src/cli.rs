//! Command-line front end. Modes are 1-based.
//!
//! Exit codes: 0 success, 1 file or validation error, 2 usage error,
//! 3 inequality violated (a numerical bug), 4 extraction precondition
//! failed, 5 degenerate structure during extraction.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::error::{Error, Result};
use crate::io::{self, InputDigest, ReportFile};
use crate::spectral::{hosvd_with_rank_tol, mode_spectrum, DEFAULT_RANK_TOL};
use crate::vn::{construct_equality_pair, extract_equality_structure, vn_check};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INEQUALITY_VIOLATED: i32 = 3;
pub const EXIT_NOT_EQUALITY: i32 = 4;
pub const EXIT_DEGENERATE: i32 = 5;

/// Environment variable consulted for the seed when `--seed` is absent.
pub const SEED_ENV: &str = "TVN_SEED";

#[derive(Debug, Parser)]
#[command(
    name = "tvn",
    version,
    about = "Dense tensor HOSVD and von Neumann inequality tools"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write the mode-d matricization as a 2-mode tensor file.
    Matricize {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        mode: usize,
        /// Defaults to stdout.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Write core.json, factor_<d>.json and spectra.json.
    Hosvd {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output_dir: PathBuf,
        #[arg(long, default_value_t = DEFAULT_RANK_TOL)]
        rank_tol: f64,
    },
    /// Print the mode-d singular values, one per line.
    Spectrum {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        mode: usize,
    },
    /// Check <X,Y> <= <sigma_d(X), sigma_d(Y)> in every mode.
    Check {
        #[arg(long)]
        x: PathBuf,
        #[arg(long)]
        y: PathBuf,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Build a pair attaining equality from a block-diagonal spec.
    Witness {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        output_dir: PathBuf,
    },
    /// Recover shared factors and block structure from an equality pair.
    Extract {
        #[arg(long)]
        x: PathBuf,
        #[arg(long)]
        y: PathBuf,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long)]
        output_dir: PathBuf,
    },
}

#[derive(serde::Serialize)]
struct SpectraFile<'a> {
    spectra: &'a [Vec<f64>],
    ranks: &'a [usize],
    rank_tol: f64,
}

/// Runs the CLI against process stdout/stderr and the real environment.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    let env_seed = std::env::var(SEED_ENV).ok();
    run_with(
        args,
        env_seed.as_deref(),
        &mut stdout.lock(),
        &mut stderr.lock(),
    )
}

pub fn run_with<I, T>(
    args: I,
    env_seed: Option<&str>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let rendered = e.render().to_string();
            if code == 0 {
                let _ = write!(out, "{rendered}");
                return EXIT_OK;
            }
            let _ = write!(err, "{rendered}");
            return EXIT_USAGE;
        }
    };
    let is_extract = matches!(cli.command, Command::Extract { .. });
    match execute(cli.command, env_seed, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            match e {
                Error::Precondition(_) if is_extract => EXIT_NOT_EQUALITY,
                Error::Degeneracy { .. } | Error::RankMismatch { .. } if is_extract => {
                    EXIT_DEGENERATE
                }
                _ => EXIT_ERROR,
            }
        }
    }
}

fn create_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn emit(out: &mut dyn Write, text: &str) -> Result<()> {
    out.write_all(text.as_bytes())
        .map_err(|e| Error::io("<stdout>", e))
}

fn execute(command: Command, env_seed: Option<&str>, out: &mut dyn Write) -> Result<i32> {
    match command {
        Command::Matricize {
            input,
            mode,
            output,
        } => {
            let m = io::read_tensor(&input)?.matricize(mode)?;
            match output {
                Some(path) => io::write_matrix(&m, path)?,
                None => emit(out, &io::tensor_to_json(&m.to_tensor()))?,
            }
        }
        Command::Hosvd {
            input,
            output_dir,
            rank_tol,
        } => {
            if !(rank_tol >= 0.0 && rank_tol.is_finite()) {
                return Err(Error::Validation(format!(
                    "rank tolerance must be nonnegative, got {rank_tol}"
                )));
            }
            let f = hosvd_with_rank_tol(&io::read_tensor(&input)?, rank_tol);
            create_dir(&output_dir)?;
            io::write_tensor(&f.core, output_dir.join("core.json"))?;
            for (d, u) in f.factors.iter().enumerate() {
                io::write_matrix(u, output_dir.join(format!("factor_{}.json", d + 1)))?;
            }
            let spectra = SpectraFile {
                spectra: &f.spectra,
                ranks: &f.ranks,
                rank_tol,
            };
            let mut s = serde_json::to_string_pretty(&spectra).expect("spectra serialize");
            s.push('\n');
            let path = output_dir.join("spectra.json");
            std::fs::write(&path, s).map_err(|e| Error::io(&path, e))?;
        }
        Command::Spectrum { input, mode } => {
            let sigma = mode_spectrum(&io::read_tensor(&input)?, mode)?;
            let text: String = sigma.iter().map(|s| format!("{s}\n")).collect();
            emit(out, &text)?;
        }
        Command::Check { x, y, tol, report } => {
            let tx = io::read_tensor(&x)?;
            let ty = io::read_tensor(&y)?;
            let r = vn_check(&tx, &ty, tol)?;
            let mut text = format!("lhs {:.17e}\n", r.lhs);
            for (d, ((rhs, gap), eq)) in r
                .rhs_per_mode
                .iter()
                .zip(&r.gap_per_mode)
                .zip(&r.equality_per_mode)
                .enumerate()
            {
                text.push_str(&format!(
                    "mode {} rhs {rhs:.17e} gap {gap:.17e} equality {eq}\n",
                    d + 1
                ));
            }
            text.push_str(&format!(
                "equality_all_modes {}\ninequality_holds {}\n",
                r.equality_all_modes,
                r.inequality_holds()
            ));
            emit(out, &text)?;
            if let Some(path) = report {
                let digests = vec![InputDigest::of_file(&x)?, InputDigest::of_file(&y)?];
                io::write_report(&ReportFile::new(&r, digests), path)?;
            }
            if !r.inequality_holds() {
                return Ok(EXIT_INEQUALITY_VIOLATED);
            }
        }
        Command::Witness {
            spec,
            seed,
            output_dir,
        } => {
            let mut s = io::read_spec(&spec)?;
            let env = env_seed
                .map(|v| {
                    v.trim().parse::<u64>().map_err(|_| {
                        Error::Validation(format!("{SEED_ENV}={v:?} is not an unsigned integer"))
                    })
                })
                .transpose()?;
            if let Some(seed) = seed.or(env) {
                s.seed = seed;
            }
            let (x, y, w) = construct_equality_pair(&s)?;
            create_dir(&output_dir)?;
            io::write_tensor(&x, output_dir.join("x.json"))?;
            io::write_tensor(&y, output_dir.join("y.json"))?;
            io::write_witness(&w, &output_dir)?;
            emit(
                out,
                &format!(
                    "wrote x.json, y.json and witness files to {} (seed {})\n",
                    output_dir.display(),
                    s.seed
                ),
            )?;
        }
        Command::Extract {
            x,
            y,
            tol,
            output_dir,
        } => {
            let tx = io::read_tensor(&x)?;
            let ty = io::read_tensor(&y)?;
            let w = extract_equality_structure(&tx, &ty, tol)?;
            io::write_witness(&w, &output_dir)?;
            let mut text = format!("blocks {}\n", w.ratios.len());
            for (l, (rho, shape)) in w.ratios.iter().zip(&w.block_shapes).enumerate() {
                text.push_str(&format!("block {} ratio {rho} shape {shape:?}\n", l + 1));
            }
            emit(out, &text)?;
        }
    }
    Ok(EXIT_OK)
}

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use horner_mcts::benchgen::{self, RandomExprParams};
use horner_mcts::experiment::{self, SweepConfig, DEFAULT_EPSILON};
use horner_mcts::horner::{self, Direction, Scheme};
use horner_mcts::mcts::{self, Criterion, Schedule, SearchParams, SearchReport};
use horner_mcts::{Error, Expression};

#[derive(Parser)]
#[command(name = "horner-mcts", version, about = "Find cheap Horner schemes for large polynomials")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Apply one scheme and report operation counts at each stage.
    Simplify {
        file: PathBuf,
        /// Comma-separated variables, optionally `;forward`/`;backward`, or `occurrence`.
        #[arg(long, default_value = "occurrence")]
        scheme: String,
        #[arg(long)]
        direction: Option<Direction>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Search for a good scheme with MCTS; prints JSON.
    Search {
        file: PathBuf,
        #[command(flatten)]
        search: SearchArgs,
        #[arg(long, default_value_t = 1)]
        repeats: u64,
        #[arg(long, default_value_t = 1.0)]
        cp: f64,
    },
    /// One single-repeat search per sample with log-uniform C_p.
    Sweep {
        file: PathBuf,
        #[command(flatten)]
        search: SearchArgs,
        #[arg(long, default_value_t = 0.01)]
        cp_min: f64,
        #[arg(long, default_value_t = 10.0)]
        cp_max: f64,
        #[arg(long, default_value_t = 4000)]
        samples: u64,
        /// Write rows here instead of stdout.
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Score every ordering of the variables (at most 8).
    Bruteforce {
        file: PathBuf,
        #[arg(long, default_value_t = Direction::Forward)]
        direction: Direction,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Write a benchmark expression.
    Generate {
        #[command(subcommand)]
        kind: Generate,
        /// Write the expression here instead of stdout.
        #[arg(short, long, global = true)]
        output: Option<PathBuf>,
    },
    /// Region of interest of a sweep CSV.
    Analyze {
        csv: PathBuf,
        #[arg(long, default_value_t = DEFAULT_EPSILON)]
        epsilon: f64,
        /// Bin over this C_p range instead of the one observed.
        #[arg(long, requires = "cp_max")]
        cp_min: Option<f64>,
        #[arg(long, requires = "cp_min")]
        cp_max: Option<f64>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

#[derive(Args)]
struct SearchArgs {
    #[arg(long, default_value_t = 1000)]
    n_updates: u64,
    #[arg(long, default_value_t = Criterion::SaUct)]
    criterion: Criterion,
    /// `linear`, `exp:<halflife>` or `const`.
    #[arg(long, default_value_t = Schedule::Linear)]
    schedule: Schedule,
    #[arg(long, default_value_t = Direction::Forward)]
    direction: Direction,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum Generate {
    /// Resultant of generic polynomials of degrees m and n.
    Resultant { m: u32, n: u32 },
    /// Random polynomial over x1..xN.
    Random {
        #[arg(long)]
        vars: u32,
        #[arg(long)]
        terms: u32,
        #[arg(long, default_value_t = 3)]
        max_exponent: u32,
        #[arg(long, default_value_t = 10)]
        coeff_range: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// A named random preset.
    Preset {
        #[arg(value_parser = clap::builder::PossibleValuesParser::new(benchgen::PRESETS))]
        name: String,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Csv,
    Json,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn read_expr(path: &Path) -> Result<Expression, Error> {
    let text = fs::read_to_string(path).map_err(|e| with_path(e, path))?;
    Ok(Expression::parse(text.trim())?)
}

fn with_path(e: io::Error, path: &Path) -> io::Error {
    io::Error::new(e.kind(), format!("{}: {e}", path.display()))
}

fn output(path: Option<&Path>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|e| with_path(e, p))?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn json_line(value: &impl serde::Serialize) -> Result<(), Error> {
    let text = serde_json::to_string_pretty(value).map_err(io::Error::other)?;
    println!("{text}");
    Ok(())
}

fn run(command: Command) -> Result<(), Error> {
    match command {
        Command::Simplify {
            file,
            scheme,
            direction,
            format,
        } => {
            let e = read_expr(&file)?;
            let mut s = if scheme == "occurrence" {
                horner::occurrence_order(&e)
            } else {
                Scheme::parse(&scheme, &e)?
            };
            if let Some(d) = direction.filter(|_| !scheme.contains(';')) {
                s.direction = d;
            }
            let r = experiment::simplify_report(&e, &s)?;
            if format == Format::Json {
                return json_line(&json!({
                    "scheme": r.scheme.to_text(e.atoms()),
                    "naive": r.naive,
                    "horner": r.horner,
                    "cse": r.cse,
                    "horner_form": r.horner_form,
                    "listing": r.listing,
                }));
            }
            println!("scheme  {}", r.scheme.to_text(e.atoms()));
            println!("naive   {}", r.naive);
            println!("horner  {}", r.horner);
            println!("cse     {}", r.cse);
            println!("form    {}", r.horner_form);
            print!("{}", r.listing);
            Ok(())
        }
        Command::Search {
            file,
            search,
            repeats,
            cp,
        } => {
            let e = read_expr(&file)?;
            let params = SearchParams {
                cp,
                n_updates: search.n_updates,
                repeats,
                criterion: search.criterion,
                schedule: search.schedule,
                direction: search.direction,
                seed: search.seed,
            };
            let r = mcts::repeat_search(&e, &params)?;
            json_line(&SearchReport::new(&e, &params, &r))
        }
        Command::Sweep {
            file,
            search,
            cp_min,
            cp_max,
            samples,
            output: path,
            format,
        } => {
            let e = read_expr(&file)?;
            let config = SweepConfig {
                cp_min,
                cp_max,
                samples,
                n_updates: search.n_updates,
                criterion: search.criterion,
                schedule: search.schedule,
                direction: search.direction,
                base_seed: search.seed,
            };
            let rows = experiment::run_sweep(&e, &config)?;
            let mut out = output(path.as_deref())?;
            if format == Format::Json {
                serde_json::to_writer_pretty(&mut out, &rows).map_err(io::Error::other)?;
                writeln!(out)?;
            } else {
                experiment::write_csv(&rows, &mut out)?;
            }
            out.flush()?;
            Ok(())
        }
        Command::Bruteforce {
            file,
            direction,
            format,
        } => {
            let e = read_expr(&file)?;
            let r = experiment::bruteforce(&e, direction)?;
            if format == Format::Json {
                return json_line(&json!({
                    "best_total": r.best.total(),
                    "best_mul": r.best.mul,
                    "best_add": r.best.add,
                    "scheme": r.scheme.to_text(e.atoms()),
                    "evaluated": r.evaluated,
                }));
            }
            println!("best       {}", r.best);
            println!("scheme     {}", r.scheme.to_text(e.atoms()));
            println!("evaluated  {}", r.evaluated);
            Ok(())
        }
        Command::Generate { kind, output: path } => {
            let e = match kind {
                Generate::Resultant { m, n } => benchgen::resultant_expr(m, n)?,
                Generate::Random {
                    vars,
                    terms,
                    max_exponent,
                    coeff_range,
                    seed,
                } => benchgen::random_expr(&RandomExprParams {
                    n_vars: vars,
                    n_terms: terms,
                    max_exponent,
                    coeff_range,
                    seed,
                })?,
                Generate::Preset { name } => {
                    benchgen::random_expr(&benchgen::preset(&name).expect("validated by clap"))?
                }
            };
            let mut out = output(path.as_deref())?;
            writeln!(out, "{e}")?;
            out.flush()?;
            Ok(())
        }
        Command::Analyze {
            csv,
            epsilon,
            cp_min,
            cp_max,
            format,
        } => {
            if !(epsilon >= 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "epsilon must be non-negative, got {epsilon}"
                )));
            }
            let rows = experiment::read_csv(File::open(&csv).map_err(|e| with_path(e, &csv))?)?;
            if rows.is_empty() {
                return Err(Error::InvalidParameter("sweep CSV has no rows".into()));
            }
            let roi = match (cp_min, cp_max) {
                (Some(lo), Some(hi)) => experiment::roi_in_range(&rows, epsilon, lo, hi),
                _ => experiment::roi(&rows, epsilon),
            };
            if format == Format::Json {
                return json_line(&roi);
            }
            println!("rows        {}", rows.len());
            println!("global min  {}", roi.global_min);
            println!("epsilon     {}", roi.epsilon);
            println!("good bins   {}", roi.good_bins);
            println!("roi width   {:.6}", roi.width);
            if let (Some(lo), Some(hi)) = (roi.lo, roi.hi) {
                println!("roi         [{lo:.6}, {hi:.6}]");
            }
            Ok(())
        }
    }
}

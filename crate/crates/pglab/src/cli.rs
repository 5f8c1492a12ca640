//! Command-line front end.

use std::ffi::OsString;
use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use pglab_core::flow::{self, Request};
use pglab_core::gating::{Strategy, TuningWord};
use pglab_core::library::default_library;
use pglab_core::netlist::generate_multiplier4x4;
use pglab_core::{rail, timing, Circuit, Technology};

use crate::error::CliError;
use crate::netlist_text::{parse_netlist, write_netlist};
use crate::params::{params_path, parse_params};
use crate::report::{emit_report, rail_csv, sta_annotated, sta_csv, sta_json, sweep_csv, sweep_json, AnalysisReport, Format};
use crate::verify::{verify_paper_tables, PaperDataset, Status};

#[derive(Debug, Parser)]
#[command(name = "pglab", version, about = "Power-gating analysis of gate-level netlists")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// Device parameter file (falls back to $PGLAB_PARAMS, then built-in defaults)
    #[arg(long)]
    params: Option<PathBuf>,
    /// Write the result here instead of standard output
    #[arg(short = 'o', long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write the 4x4 array multiplier netlist
    #[command(name = "gen-mult4x4")]
    GenMult4x4 {
        #[arg(short = 'o', long)]
        out: Option<PathBuf>,
    },
    /// Static timing analysis of the ungated circuit
    Sta {
        /// Netlist file, `-` or nothing for standard input
        netlist: Option<PathBuf>,
        /// `net` repeats the netlist with the timing as comment lines
        #[arg(long, value_enum, default_value_t = StaFormat::Net)]
        format: StaFormat,
        #[command(flatten)]
        common: Common,
    },
    /// Apply one power-gating strategy and report delay and power
    Gate {
        netlist: Option<PathBuf>,
        #[arg(long, value_enum)]
        strategy: StrategyArg,
        /// Tunable-cell word, four bits, B3 first
        #[arg(long)]
        word: Option<String>,
        /// Single candidate width in metres
        #[arg(long)]
        w: Option<f64>,
        /// Comma-separated candidate widths in metres
        #[arg(long, value_delimiter = ',')]
        candidates: Option<Vec<f64>>,
        /// Distributed-network row count
        #[arg(long)]
        rows: Option<usize>,
        /// Distributed-network nodes allowed above the drop limit
        #[arg(long)]
        allowed_violations: Option<usize>,
        /// Write the distributed-network tap voltages as CSV
        #[arg(long)]
        rail_out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = FormatArg::Json)]
        format: FormatArg,
        #[command(flatten)]
        common: Common,
    },
    /// Tunable-cell sweep over all sixteen words
    Sweep {
        netlist: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
        format: FormatArg,
        #[command(flatten)]
        common: Common,
    },
    /// Recompute the published reference tables
    #[command(name = "verify-paper")]
    VerifyPaper {
        #[arg(long, value_enum, default_value_t = VerifyFormat::Text)]
        format: VerifyFormat,
        #[arg(short = 'o', long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum StaFormat {
    Net,
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Format {
        match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum VerifyFormat {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum StrategyArg {
    #[value(alias = "conventional")]
    Conv,
    Cbstd,
    Dstn,
    Tunable,
}

impl From<StrategyArg> for Strategy {
    fn from(s: StrategyArg) -> Strategy {
        match s {
            StrategyArg::Conv => Strategy::Conventional,
            StrategyArg::Cbstd => Strategy::Cbstd,
            StrategyArg::Dstn => Strategy::Dstn,
            StrategyArg::Tunable => Strategy::Tunable,
        }
    }
}

struct Io<'a> {
    stdin: &'a mut dyn Read,
    stdout: &'a mut dyn Write,
}

impl Io<'_> {
    fn read_input(&mut self, path: Option<&Path>) -> Result<(PathBuf, String), CliError> {
        match path {
            Some(p) if p != Path::new("-") => {
                let text = fs::read_to_string(p).map_err(|source| CliError::Io {
                    path: p.to_path_buf(),
                    source,
                })?;
                Ok((p.to_path_buf(), text))
            }
            _ => {
                let mut text = String::new();
                let path = PathBuf::from("<stdin>");
                self.stdin.read_to_string(&mut text).map_err(|source| CliError::Io {
                    path: path.clone(),
                    source,
                })?;
                Ok((path, text))
            }
        }
    }

    fn circuit(&mut self, path: Option<&Path>) -> Result<Circuit, CliError> {
        let (path, text) = self.read_input(path)?;
        parse_netlist(&text).map_err(|err| CliError::Parse { path, err })
    }

    fn emit(&mut self, out: Option<&Path>, text: &str) -> Result<(), CliError> {
        match out {
            Some(p) => write_file(p, text),
            None => self.stdout.write_all(text.as_bytes()).map_err(|source| CliError::Io {
                path: PathBuf::from("<stdout>"),
                source,
            }),
        }
    }
}

fn write_file(p: &Path, text: &str) -> Result<(), CliError> {
    fs::write(p, text).map_err(|source| CliError::Io {
        path: p.to_path_buf(),
        source,
    })
}

fn technology(explicit: Option<&Path>) -> Result<Technology, CliError> {
    let Some(path) = params_path(explicit) else {
        return Ok(Technology::default());
    };
    let text = fs::read_to_string(&path).map_err(|source| CliError::Io {
        path: path.clone(),
        source,
    })?;
    let p = parse_params(&text).map_err(|err| CliError::Parse { path, err })?;
    Ok(Technology::default().with_device(p))
}

struct GateArgs {
    strategy: Strategy,
    word: Option<String>,
    w: Option<f64>,
    candidates: Option<Vec<f64>>,
    rows: Option<usize>,
    allowed_violations: Option<usize>,
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn request(a: GateArgs) -> Result<Request, CliError> {
    let s = a.strategy;
    let name = s.name();
    if a.word.is_some() && s != Strategy::Tunable {
        return Err(usage(format!("--word applies to the tunable strategy, not {name}")));
    }
    if (a.rows.is_some() || a.allowed_violations.is_some()) && s != Strategy::Dstn {
        return Err(usage(format!("--rows and --allowed-violations apply to dstn, not {name}")));
    }
    let widths = match (a.w, a.candidates) {
        (Some(_), Some(_)) => return Err(usage("give --w or --candidates, not both")),
        (Some(w), None) => Some(vec![w]),
        (None, c) => c,
    };
    if widths.is_some() && s == Strategy::Tunable {
        return Err(usage("the tunable strategy takes --word, not widths"));
    }
    let mut req = Request::default_for(s);
    match &mut req {
        Request::Conventional { candidates } | Request::Cbstd { candidates, .. } => {
            if let Some(w) = widths {
                *candidates = w;
            }
        }
        Request::Dstn {
            candidates,
            rows,
            allowed_violations,
        } => {
            if let Some(w) = widths {
                *candidates = w;
            }
            if let Some(n) = a.rows {
                *rows = n;
            }
            if let Some(n) = a.allowed_violations {
                *allowed_violations = n;
            }
        }
        Request::Tunable { word } => {
            if let Some(text) = a.word {
                *word = text.parse::<TuningWord>()?;
            }
        }
    }
    Ok(req)
}

fn dispatch(cli: Cli, io: &mut Io<'_>) -> Result<i32, CliError> {
    match cli.command {
        Command::GenMult4x4 { out } => {
            let c = generate_multiplier4x4(&default_library())?;
            io.emit(out.as_deref(), &write_netlist(&c))?;
        }
        Command::Sta { netlist, format, common } => {
            let tech = technology(common.params.as_deref())?;
            let c = io.circuit(netlist.as_deref())?;
            let tr = timing::critical_path(&c, &tech.device, tech.vth_logic)?;
            let text = match format {
                StaFormat::Net => sta_annotated(&c, &tr),
                StaFormat::Csv => sta_csv(&c, &tr),
                StaFormat::Json => sta_json(&c, &tr),
            };
            io.emit(common.out.as_deref(), &text)?;
        }
        Command::Gate {
            netlist,
            strategy,
            word,
            w,
            candidates,
            rows,
            allowed_violations,
            rail_out,
            format,
            common,
        } => {
            let strategy = Strategy::from(strategy);
            if rail_out.is_some() && strategy != Strategy::Dstn {
                return Err(usage("--rail-out applies to dstn only"));
            }
            let req = request(GateArgs {
                strategy,
                word,
                w,
                candidates,
                rows,
                allowed_violations,
            })?;
            let tech = technology(common.params.as_deref())?;
            let c = io.circuit(netlist.as_deref())?;
            let outcome = flow::run(&c, &tech, &req)?;
            let text = emit_report(&AnalysisReport::from_outcome(&outcome), format.into()).map_err(CliError::Report)?;
            if let (Some(path), Request::Dstn { rows, allowed_violations, .. }) = (rail_out, &req) {
                let assignment = flow::dstn_rows(&c, *rows)?;
                let eval = rail::dstn_evaluate(&c, &assignment, outcome.widths[0], &tech, tech.ir_frac, *allowed_violations)?;
                write_file(&path, &rail_csv(&eval.solution, &eval.verdict))?;
            }
            io.emit(common.out.as_deref(), &text)?;
        }
        Command::Sweep { netlist, format, common } => {
            let tech = technology(common.params.as_deref())?;
            let c = io.circuit(netlist.as_deref())?;
            let rows = flow::sweep(&c, &tech)?;
            let text = match format {
                FormatArg::Csv => sweep_csv(&rows),
                FormatArg::Json => sweep_json(&rows),
            };
            io.emit(common.out.as_deref(), &text)?;
        }
        Command::VerifyPaper { format, out } => {
            let v = verify_paper_tables(&PaperDataset::embedded());
            let text = match format {
                VerifyFormat::Text => v.text(),
                VerifyFormat::Json => v.json(),
            };
            io.emit(out.as_deref(), &text)?;
            if v.count(Status::Fail) > 0 {
                return Ok(1);
            }
        }
    }
    Ok(0)
}

/// Runs one command line (program name first) and returns the exit code.
pub fn run<I, T>(args: I, stdin: &mut dyn Read, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = stderr.write_all(text.as_bytes());
                2
            } else {
                let _ = stdout.write_all(text.as_bytes());
                0
            };
        }
    };
    let mut io = Io { stdin, stdout };
    match dispatch(cli, &mut io) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "pglab: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str], input: &str) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("pglab").chain(args.iter().copied());
        let code = run(argv, &mut input.as_bytes(), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(call(&["frobnicate"], "").0, 2);
        assert_eq!(call(&["gate", "--strategy", "cbstd", "--word", "1000"], "").0, 2);
        assert_eq!(call(&["gate", "--strategy", "tunable", "--w", "1e-7"], "").0, 2);
        let (code, _, err) = call(&["sta", "/nonexistent/x.net"], "");
        assert_eq!(code, 2);
        assert!(err.contains("/nonexistent/x.net"), "{err}");
        assert_eq!(call(&["--help"], "").0, 0);
    }

    #[test]
    fn bad_word_is_input_error() {
        let (_, net, _) = call(&["gen-mult4x4"], "");
        assert_eq!(call(&["gate", "--strategy", "tunable", "--word", "10x0"], &net).0, 2);
        assert_eq!(call(&["gate", "--strategy", "tunable", "--word", "0000"], &net).0, 1);
    }

    #[test]
    fn parse_error_names_line() {
        let (code, _, err) = call(&["sta"], "input a\ngate g1 NAND9 a -> y\n");
        assert_eq!(code, 2);
        assert!(err.contains("line 2"), "{err}");
    }

    #[test]
    fn infeasible_width_exits_one() {
        let (_, net, _) = call(&["gen-mult4x4"], "");
        let (code, _, err) = call(&["gate", "--strategy", "conv", "--w", "1e-7"], &net);
        assert_eq!(code, 1, "{err}");
    }
}

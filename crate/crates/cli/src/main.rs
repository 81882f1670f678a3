use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use whcap::choi::{choi_matrix, choi_normalized_branches, ptb_branches, region_flags};
use whcap::generators::{build_generators, GeneratorKind, GeneratorLabel};
use whcap::sdp::QGammaOptions;
use whcap::sweep::{
    evaluate_point, format_g12, parse_quantities, run_sweep, write_csv, Quantity, Range, SweepSpec,
};
use whcap::verify::{run_verify, VerifyLevel};
use whcap::ChannelParams;

mod report;

const EXIT_USAGE: u8 = 2;
const EXIT_IO: u8 = 3;
const EXIT_VERIFY: u8 = 4;

#[derive(Parser)]
#[command(
    name = "whcap",
    version,
    about = "Capacity bounds for noisy Werner-Holevo channels"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Every capacity quantity at one parameter point.
    Point(PointArgs),
    /// Quantities over a rectangular (x, y) grid clipped to x + y <= 1.
    Sweep(SweepArgs),
    /// Run the self-check suites.
    Verify(VerifyArgs),
    /// Print a generator set.
    Generators(GeneratorArgs),
    /// Print a Choi matrix and its spectral data.
    Choi(ChoiArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct SdpFlags {
    /// Solve the Q_Gamma semidefinite program.
    #[arg(long, overrides_with = "no_sdp")]
    sdp: bool,
    #[arg(long)]
    no_sdp: bool,
    /// Drop the R >= 0 constraint from the program.
    #[arg(long = "sdp-drop-R-psd")]
    drop_r_psd: bool,
    /// Solver tolerance.
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
}

impl SdpFlags {
    fn enabled(&self, default: bool) -> bool {
        if self.no_sdp {
            false
        } else {
            self.sdp || default
        }
    }
}

#[derive(Args)]
struct PointArgs {
    #[arg(long)]
    d: usize,
    #[arg(long)]
    x: f64,
    #[arg(long)]
    y: f64,
    /// Comma-separated subset of holevo, classical_upper, ea, q_lower, q_gamma, ppt, omega, map_spectrum.
    #[arg(long)]
    quantities: Option<String>,
    #[command(flatten)]
    sdp: SdpFlags,
    /// Accepted for symmetry with `sweep`; results do not depend on it.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    d: usize,
    /// `min:max:steps`
    #[arg(long = "x-range")]
    x_range: String,
    /// `min:max:steps`
    #[arg(long = "y-range")]
    y_range: String,
    #[arg(long)]
    quantities: Option<String>,
    #[command(flatten)]
    sdp: SdpFlags,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Level {
    Fast,
    Full,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, value_enum, default_value = "fast")]
    level: Level,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct GeneratorArgs {
    #[arg(long)]
    d: usize,
    /// aminus, aplus, azero or aplusfull
    #[arg(long, default_value = "aminus")]
    kind: String,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ChoiArgs {
    #[arg(long)]
    d: usize,
    #[arg(long)]
    x: f64,
    #[arg(long)]
    y: f64,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Failure {
    Usage(String),
    Io(String),
    Verify(String),
}

impl From<whcap::Error> for Failure {
    fn from(e: whcap::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Point(a) => point(a),
        Command::Sweep(a) => sweep(a),
        Command::Verify(a) => verify(a),
        Command::Generators(a) => generators(a),
        Command::Choi(a) => choi(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_IO)
        }
        Err(Failure::Verify(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(EXIT_VERIFY)
        }
    }
}

fn quantities(
    arg: Option<&str>,
    sdp: &SdpFlags,
    sdp_default: bool,
) -> Result<Vec<Quantity>, Failure> {
    let mut q = match arg {
        Some(s) => parse_quantities(s)?,
        None => Quantity::CLOSED_FORM.to_vec(),
    };
    let explicit = q.contains(&Quantity::QGamma);
    q.retain(|&k| k != Quantity::QGamma);
    if !sdp.no_sdp && (explicit || sdp.enabled(sdp_default)) {
        q.push(Quantity::QGamma);
        q.sort();
    }
    Ok(q)
}

fn check_tol(tol: f64) -> Result<(), Failure> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(Failure::Usage(format!(
            "tolerance must be positive, got {tol}"
        )))
    }
}

/// Writes everything produced by `f` to `out`, or to stdout.
fn emit(
    out: Option<&PathBuf>,
    f: impl FnOnce(&mut dyn Write) -> io::Result<()>,
) -> Result<(), Failure> {
    let res = match out {
        Some(path) => {
            let file = File::create(path)
                .map_err(|e| Failure::Io(format!("cannot create {}: {e}", path.display())))?;
            let mut w = BufWriter::new(file);
            f(&mut w).and_then(|_| w.flush())
        }
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            f(&mut w).and_then(|_| w.flush())
        }
    };
    res.map_err(|e| Failure::Io(format!("write failed: {e}")))
}

fn point(a: PointArgs) -> Result<(), Failure> {
    check_tol(a.sdp.tol)?;
    let params = ChannelParams::new(a.d, a.x, a.y)?;
    let qs = quantities(a.quantities.as_deref(), &a.sdp, true)?;
    let opts = QGammaOptions {
        tol: a.sdp.tol,
        drop_r_psd: a.sdp.drop_r_psd,
        ..Default::default()
    };
    let row = evaluate_point(&params, &qs, &opts);
    emit(a.out.as_ref(), |w| match a.format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut *w, &report::row_json(&row, &qs))?;
            writeln!(w)
        }
        Format::Csv => write_csv(std::slice::from_ref(&row), &qs, w),
    })
}

fn sweep(a: SweepArgs) -> Result<(), Failure> {
    check_tol(a.sdp.tol)?;
    let x_range: Range = a.x_range.parse()?;
    let y_range: Range = a.y_range.parse()?;
    let mut spec = SweepSpec::new(a.d, x_range, y_range);
    spec.quantities = quantities(a.quantities.as_deref(), &a.sdp, false)?;
    spec.tol = a.sdp.tol;
    spec.seed = a.seed;
    spec.drop_r_psd = a.sdp.drop_r_psd;
    let out = run_sweep(&spec)?;
    if out.filtered > 0 {
        eprintln!("filtered {} grid points outside x + y <= 1", out.filtered);
    }
    emit(a.out.as_ref(), |w| match a.format {
        Format::Csv => write_csv(&out.rows, &spec.quantities, w),
        Format::Json => {
            let rows: Vec<_> = out
                .rows
                .iter()
                .map(|r| report::row_json(r, &spec.quantities))
                .collect();
            serde_json::to_writer_pretty(&mut *w, &rows)?;
            writeln!(w)
        }
    })
}

fn verify(a: VerifyArgs) -> Result<(), Failure> {
    let level = match a.level {
        Level::Fast => VerifyLevel::Fast,
        Level::Full => VerifyLevel::Full,
    };
    let results = run_verify(level, a.seed);
    for r in &results {
        println!("{r}");
    }
    let failed: Vec<&str> = results
        .iter()
        .filter(|r| !r.passed)
        .map(|r| r.name)
        .collect();
    if failed.is_empty() {
        println!("all {} suites passed", results.len());
        Ok(())
    } else {
        Err(Failure::Verify(format!(
            "failing suites: {}",
            failed.join(", ")
        )))
    }
}

fn generators(a: GeneratorArgs) -> Result<(), Failure> {
    let kind: GeneratorKind = a.kind.parse()?;
    let set = build_generators(a.d, kind)?;
    emit(a.out.as_ref(), |w| match a.format {
        Format::Json => {
            let members: Vec<_> = set
                .iter()
                .map(|(label, m)| {
                    serde_json::json!({
                        "label": label_text(label),
                        "matrix": report::complex_matrix_json(m.matrix()),
                    })
                })
                .collect();
            let doc = serde_json::json!({ "d": a.d, "kind": kind, "members": members });
            serde_json::to_writer_pretty(&mut *w, &doc)?;
            writeln!(w)
        }
        Format::Csv => {
            writeln!(w, "label,row,col,re,im")?;
            for (label, m) in set.iter() {
                let m = m.matrix();
                for r in 0..m.nrows() {
                    for c in 0..m.ncols() {
                        let z = m[(r, c)];
                        if z.norm() != 0.0 {
                            writeln!(
                                w,
                                "{},{r},{c},{},{}",
                                label_text(label),
                                format_g12(z.re),
                                format_g12(z.im)
                            )?;
                        }
                    }
                }
            }
            Ok(())
        }
    })
}

fn label_text(label: &GeneratorLabel) -> String {
    match label {
        GeneratorLabel::Pair(m, n) => format!("{m}{n}"),
        GeneratorLabel::Level(m) => format!("{m}"),
    }
}

fn choi(a: ChoiArgs) -> Result<(), Failure> {
    let params = ChannelParams::new(a.d, a.x, a.y)?;
    let j = choi_matrix(&params);
    emit(a.out.as_ref(), |w| match a.format {
        Format::Json => {
            let doc = serde_json::json!({
                "params": report::params_json(&params),
                "matrix": report::real_matrix_json(j.matrix.matrix()),
                "ptb_branches": report::branches_json(&ptb_branches(&params)),
                "normalized_branches": report::branches_json(&choi_normalized_branches(&params)),
                "flags": region_flags(&params),
            });
            serde_json::to_writer_pretty(&mut *w, &doc)?;
            writeln!(w)
        }
        Format::Csv => {
            writeln!(w, "row,col,value")?;
            let m = j.matrix.matrix();
            for r in 0..m.nrows() {
                for c in 0..m.ncols() {
                    if m[(r, c)].re != 0.0 {
                        writeln!(w, "{r},{c},{}", format_g12(m[(r, c)].re))?;
                    }
                }
            }
            Ok(())
        }
    })
}

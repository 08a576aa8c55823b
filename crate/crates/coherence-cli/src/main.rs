//! `coherence-kit` command line: region queries, channel synthesis,
//! IO-to-SIO conversion, channel verification, and Monte-Carlo sampling.
//!
//! Exit codes: 0 ok/contained, 1 usage error, 2 invalid input,
//! 3 unreachable/not contained, 4 not incoherent, 5 not trace preserving.

use clap::{Args, Parser, Subcommand, ValueEnum};
use coherence_kit::docs::{ChannelDocument, DocumentMetadata};
use coherence_kit::oracle::{analyze_cloud, reachable_cloud};
use coherence_kit::{
    classify, io_region_boundary, io_to_sio, region_contains, synth_cpo, synth_io, synth_pio,
    BlochState, ChannelClass, Error, KrausSet,
};
use serde_json::json;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

const EXIT_OK: u8 = 0;
const EXIT_USAGE: u8 = 1;
const EXIT_INVALID: u8 = 2;
const EXIT_UNREACHABLE: u8 = 3;
const EXIT_NOT_INCOHERENT: u8 = 4;
const EXIT_NOT_TRACE_PRESERVING: u8 = 5;

#[derive(Parser)]
#[command(
    name = "coherence-kit",
    about = "Single-qubit coherence transformations: reachable regions and channel synthesis",
    disable_help_subcommand = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ClassArg {
    Io,
    Sio,
    Pio,
    Cpo,
}

impl From<ClassArg> for ChannelClass {
    fn from(c: ClassArg) -> Self {
        match c {
            ClassArg::Io => ChannelClass::Io,
            ClassArg::Sio => ChannelClass::Sio,
            ClassArg::Pio => ChannelClass::Pio,
            ClassArg::Cpo => ChannelClass::Cpo,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Membership test or boundary enumeration of a transformation region.
    Region(RegionArgs),
    /// Synthesize a channel mapping one state onto another.
    Synth(SynthArgs),
    /// Rewrite an incoherent channel as a strictly incoherent one.
    ConvertSio(ConvertArgs),
    /// Classify a channel document and check trace preservation.
    Verify(VerifyArgs),
    /// Sample random incoherent channels and export the reachable cloud.
    Sample(SampleArgs),
}

#[derive(Args)]
struct RegionArgs {
    /// Operation class: io, sio, pio, or cpo.
    #[arg(long, value_enum)]
    class: ClassArg,
    /// Source state as `z,r` or `z,r,theta`.
    #[arg(long, allow_hyphen_values = true)]
    from: String,
    /// Target state; membership mode.
    #[arg(long, allow_hyphen_values = true)]
    to: Option<String>,
    /// Number of boundary points; enumeration mode.
    #[arg(long)]
    boundary: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: FormatArg,
}

#[derive(Args)]
struct SynthArgs {
    /// Operation class: io, pio, or cpo (sio synthesizes via io).
    #[arg(long, value_enum)]
    class: ClassArg,
    #[arg(long, allow_hyphen_values = true)]
    from: String,
    #[arg(long, allow_hyphen_values = true)]
    to: String,
    /// Output path for the channel document (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ConvertArgs {
    /// Channel document to convert.
    #[arg(long)]
    channel: PathBuf,
    /// State the conversion must preserve the output on.
    #[arg(long, allow_hyphen_values = true)]
    state: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    channel: PathBuf,
}

#[derive(Args)]
struct SampleArgs {
    #[arg(long, allow_hyphen_values = true)]
    from: String,
    /// Number of sampled channels.
    #[arg(long)]
    n: usize,
    /// RNG seed; falls back to COHERENCE_KIT_SEED, then 0.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value = "4")]
    max_kraus: usize,
    /// CSV destination; the JSON summary then goes to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests are not usage errors.
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let code = match cli.command {
        Command::Region(args) => cmd_region(args),
        Command::Synth(args) => cmd_synth(args),
        Command::ConvertSio(args) => cmd_convert_sio(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Sample(args) => cmd_sample(args),
    };
    match code {
        Ok(c) => ExitCode::from(c),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}

fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::InvalidState(_)
        | Error::InvalidMatrix(_)
        | Error::UnsupportedDocument(_)
        | Error::DegenerateRegion
        | Error::NotDiagonalUnitary(_)
        | Error::UnsupportedClass(_)
        | Error::SamplerExhausted(_)
        | Error::NonConvergence(_) => EXIT_INVALID,
        Error::TargetUnreachable { .. } | Error::DegenerateSource => EXIT_UNREACHABLE,
        Error::NotIncoherent(_) => EXIT_NOT_INCOHERENT,
        Error::IncompleteChannel { .. } => EXIT_NOT_TRACE_PRESERVING,
    }
}

fn parse_state(text: &str) -> Result<BlochState, Error> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 2 && parts.len() != 3 {
        return Err(Error::InvalidState(format!(
            "expected `z,r` or `z,r,theta`, got {text:?}"
        )));
    }
    let mut vals = [0.0f64; 3];
    for (i, p) in parts.iter().enumerate() {
        vals[i] = p
            .trim()
            .parse()
            .map_err(|_| Error::InvalidState(format!("not a number: {p:?}")))?;
    }
    BlochState::new(vals[0], vals[1], vals[2])
}

fn state_triple(s: &BlochState) -> [f64; 3] {
    [s.z(), s.r(), s.theta()]
}

/// 17 significant digits, locale independent.
fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

fn write_output(out: &Option<PathBuf>, content: &str) -> Result<(), Error> {
    match out {
        Some(path) => std::fs::write(path, content)
            .map_err(|e| Error::InvalidState(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn read_channel(path: &Path) -> Result<(ChannelDocument, KrausSet), Error> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::UnsupportedDocument(format!("cannot read {}: {e}", path.display())))?;
    let doc = ChannelDocument::from_json_str(&text)?;
    let set = doc.to_kraus_set()?;
    Ok((doc, set))
}

fn cmd_region(args: RegionArgs) -> Result<u8, Error> {
    let from = parse_state(&args.from)?;
    match (&args.to, args.boundary) {
        (Some(to), None) => {
            let to = parse_state(to)?;
            let report = region_contains(args.class.into(), &from, &to)?;
            println!(
                "{}",
                serde_json::to_string_pretty(&report).expect("report serializes")
            );
            Ok(if report.verdict {
                EXIT_OK
            } else {
                EXIT_UNREACHABLE
            })
        }
        (None, Some(n)) => {
            let points = match ChannelClass::from(args.class) {
                ChannelClass::Io | ChannelClass::Sio => io_region_boundary(&from, n)?,
                ChannelClass::Pio => coherence_kit::pio_region_vertices(&from)
                    .vertices()
                    .to_vec(),
                ChannelClass::Cpo => coherence_kit::cpo_orbit(&from),
                _ => unreachable!("clap restricts the class values"),
            };
            let content = match args.format {
                FormatArg::Csv => {
                    let mut s = String::from("z,r\n");
                    for (z, r) in &points {
                        let _ = writeln!(s, "{},{}", fmt17(*z), fmt17(*r));
                    }
                    s
                }
                FormatArg::Json => {
                    let arr: Vec<[f64; 2]> = points.iter().map(|&(z, r)| [z, r]).collect();
                    format!(
                        "{}\n",
                        serde_json::to_string_pretty(&arr).expect("points serialize")
                    )
                }
            };
            write_output(&args.out, &content)?;
            Ok(EXIT_OK)
        }
        _ => {
            eprintln!("error: pass exactly one of --to (membership) or --boundary (enumeration)");
            Ok(EXIT_USAGE)
        }
    }
}

fn cmd_synth(args: SynthArgs) -> Result<u8, Error> {
    let from = parse_state(&args.from)?;
    let to = parse_state(&args.to)?;
    let result = match ChannelClass::from(args.class) {
        ChannelClass::Io | ChannelClass::Sio => synth_io(&from, &to).map(|(set, sol)| {
            ChannelDocument::from_kraus_set(&set).with_metadata(DocumentMetadata {
                label: Some("io-synthesis".into()),
                source: Some(state_triple(&from)),
                target: Some(state_triple(&to)),
                solution: Some(serde_json::to_value(sol).expect("solution serializes")),
            })
        }),
        ChannelClass::Pio => synth_pio(&from, &to).and_then(|mix| {
            Ok(
                ChannelDocument::from_mixture(&mix)?.with_metadata(DocumentMetadata {
                    label: Some("pio-mixture".into()),
                    source: Some(state_triple(&from)),
                    target: Some(state_triple(&to)),
                    solution: None,
                }),
            )
        }),
        ChannelClass::Cpo => synth_cpo(&from, &to).map(|set| {
            ChannelDocument::from_kraus_set(&set).with_metadata(DocumentMetadata {
                label: Some("cpo-permutation".into()),
                source: Some(state_triple(&from)),
                target: Some(state_triple(&to)),
                solution: None,
            })
        }),
        _ => unreachable!("clap restricts the class values"),
    };
    match result {
        Ok(doc) => {
            write_output(&args.out, &format!("{}\n", doc.to_json_pretty()))?;
            Ok(EXIT_OK)
        }
        Err(e @ (Error::TargetUnreachable { .. } | Error::DegenerateSource)) => {
            // A verdict, not a failure: report on stdout, nothing on stderr.
            println!(
                "{}",
                serde_json::to_string_pretty(&json!({
                    "reachable": false,
                    "reason": e.to_string(),
                }))
                .expect("verdict serializes")
            );
            Ok(EXIT_UNREACHABLE)
        }
        Err(e) => Err(e),
    }
}

fn cmd_convert_sio(args: ConvertArgs) -> Result<u8, Error> {
    let state = parse_state(&args.state)?;
    let (_, set) = read_channel(&args.channel)?;
    let (converted, sol) = io_to_sio(&set, &state)?;
    let doc = ChannelDocument::from_kraus_set(&converted).with_metadata(DocumentMetadata {
        label: Some("sio-conversion".into()),
        source: Some(state_triple(&state)),
        target: None,
        solution: Some(json!({
            "a": [sol.a.re, sol.a.im],
            "b": [sol.b.re, sol.b.im],
            "c": [sol.c.re, sol.c.im],
            "d": [sol.d.re, sol.d.im],
            "h1": sol.h1,
            "h2": sol.h2,
        })),
    });
    write_output(&args.out, &format!("{}\n", doc.to_json_pretty()))?;
    Ok(EXIT_OK)
}

fn cmd_verify(args: VerifyArgs) -> Result<u8, Error> {
    let text = std::fs::read_to_string(&args.channel).map_err(|e| {
        Error::UnsupportedDocument(format!("cannot read {}: {e}", args.channel.display()))
    })?;
    let doc = ChannelDocument::from_json_str(&text)?;
    match doc.to_kraus_set() {
        Ok(set) => {
            let cls = classify(&set)?;
            println!(
                "{}",
                serde_json::to_string_pretty(&json!({
                    "trace_preserving": true,
                    "residual": cls.completeness_residual,
                    "class": cls.class.name(),
                    "pio_families": cls.pio_families.iter().map(|f| f.name()).collect::<Vec<_>>(),
                }))
                .expect("report serializes")
            );
            Ok(EXIT_OK)
        }
        Err(Error::IncompleteChannel { residual }) => {
            println!(
                "{}",
                serde_json::to_string_pretty(&json!({
                    "trace_preserving": false,
                    "residual": residual,
                }))
                .expect("report serializes")
            );
            Ok(EXIT_NOT_TRACE_PRESERVING)
        }
        Err(e) => Err(e),
    }
}

fn cmd_sample(args: SampleArgs) -> Result<u8, Error> {
    let from = parse_state(&args.from)?;
    let seed = match args.seed {
        Some(s) => s,
        None => std::env::var("COHERENCE_KIT_SEED")
            .ok()
            .and_then(|v| v.parse().ok())
            .unwrap_or(0),
    };
    let cloud = reachable_cloud(&from, args.n, seed, args.max_kraus)?;
    let mut csv = String::from("z,r\n");
    for (z, r) in &cloud.points {
        let _ = writeln!(csv, "{},{}", fmt17(*z), fmt17(*r));
    }
    let report = analyze_cloud(&cloud)?;
    let summary = serde_json::to_string_pretty(&json!({
        "seed": seed,
        "samples": report.samples,
        "violations": report.violations,
        "coverage": report.coverage,
        "pio_mixture_violations": report.pio_mixture_violations,
    }))
    .expect("summary serializes");
    match &args.out {
        Some(_) => {
            write_output(&args.out, &csv)?;
            println!("{summary}");
        }
        None => {
            print!("{csv}");
            eprintln!("{summary}");
        }
    }
    Ok(EXIT_OK)
}

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use quivertilt_cli::report::{self, Outcome};
use quivertilt_cli::service;
use quivertilt_core::{
    apply_trace, build_normal_form, mutate, parse_quiver, parse_trace, serialize_quiver, serialize_trace, BoundQuiver,
    MutationKind, MutationStep, NormalFormParams,
};

#[derive(Parser)]
#[command(
    name = "quivertilt",
    version,
    about = "Gentle bound quivers: φ, mutations, normal forms, reduction"
)]
struct Cli {
    /// Print the machine-readable report instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check gentleness.
    Validate { file: PathBuf },
    /// Compute the derived invariant φ, one "n m count" line per pair.
    Phi { file: PathBuf },
    /// List permitted and forbidden threads.
    Threads { file: PathBuf },
    /// Apply one tilt or cotilt.
    Mutate {
        file: PathBuf,
        #[arg(long)]
        vertex: String,
        #[arg(long)]
        kind: MutationKind,
        #[arg(short = 'o', long = "out")]
        out: Option<PathBuf>,
    },
    /// Apply a trace file of mutations.
    Trace {
        file: PathBuf,
        tracefile: PathBuf,
        #[arg(short = 'o', long = "out")]
        out: Option<PathBuf>,
    },
    /// Gentleness, cycles, recognizers and classification parameters.
    Classify { file: PathBuf },
    /// Build Ñ_{n1,k1,n2,k2,r} or B_{k,n,t}.
    NormalForm {
        #[arg(
            long,
            num_args = 5,
            value_names = ["N1", "K1", "N2", "K2", "R"],
            allow_negative_numbers = true,
            conflicts_with = "oriented",
            required_unless_present = "oriented"
        )]
        nonoriented: Option<Vec<i64>>,
        #[arg(long, num_args = 3, value_names = ["K", "N", "T"])]
        oriented: Option<Vec<u32>>,
        #[arg(long)]
        m: u32,
        #[arg(short = 'o', long = "out")]
        out: Option<PathBuf>,
    },
    /// Reduce to normal form, reporting each step.
    Reduce {
        file: PathBuf,
        #[arg(short = 'o', long = "out")]
        out: Option<PathBuf>,
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Decide derived equivalence from the classification parameters.
    Equivalent { a: PathBuf, b: PathBuf },
    /// The two normal forms sharing φ at the given m.
    CollisionDemo {
        #[arg(long, default_value_t = 2)]
        m: u32,
    },
    /// Run the session service for the explorer.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
    },
}

fn load(path: &Path) -> anyhow::Result<BoundQuiver> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_quiver(&text).with_context(|| format!("parsing {}", path.display()))
}

fn write(path: &Path, text: &str) -> anyhow::Result<()> {
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

/// Quiver output goes to `out` when given, otherwise into the report.
fn emit_quiver(q: &BoundQuiver, out: Option<&Path>) -> anyhow::Result<Outcome> {
    let mut o = report::quiver(q);
    if let Some(p) = out {
        write(p, &o.text)?;
        o.text = format!("wrote {}\n", p.display());
    }
    Ok(o)
}

fn params(nonoriented: Option<Vec<i64>>, oriented: Option<Vec<u32>>) -> Result<NormalFormParams, String> {
    match (nonoriented, oriented) {
        (Some(v), None) => {
            let u = |i: usize| u32::try_from(v[i]).map_err(|_| format!("parameter {} must be non-negative", v[i]));
            Ok(NormalFormParams::nonoriented(u(0)?, u(1)?, u(2)?, u(3)?, v[4]))
        }
        (None, Some(v)) => Ok(NormalFormParams::oriented(v[0], v[1], v[2])),
        _ => Err("give exactly one of --nonoriented and --oriented".into()),
    }
}

fn run(cmd: Cmd) -> anyhow::Result<Outcome> {
    Ok(match cmd {
        Cmd::Validate { file } => report::validate(&load(&file)?),
        Cmd::Phi { file } => report::phi(&load(&file)?),
        Cmd::Threads { file } => report::threads(&load(&file)?),
        Cmd::Mutate {
            file,
            vertex,
            kind,
            out,
        } => match mutate(&load(&file)?, &MutationStep { vertex, kind }) {
            Ok(q) => emit_quiver(&q, out.as_deref())?,
            Err(e) => Outcome::error(e),
        },
        Cmd::Trace { file, tracefile, out } => {
            let q = load(&file)?;
            let text =
                std::fs::read_to_string(&tracefile).with_context(|| format!("reading {}", tracefile.display()))?;
            let t = parse_trace(&text).with_context(|| format!("parsing {}", tracefile.display()))?;
            match apply_trace(&q, &t) {
                Ok(q) => emit_quiver(&q, out.as_deref())?,
                Err(e) => Outcome::error(e),
            }
        }
        Cmd::Classify { file } => report::classify(&load(&file)?),
        Cmd::NormalForm {
            nonoriented,
            oriented,
            m,
            out,
        } => match params(nonoriented, oriented) {
            Err(e) => Outcome::usage(e),
            Ok(p) => match build_normal_form(&p, m) {
                Ok(q) => emit_quiver(&q, out.as_deref())?,
                Err(e) => Outcome::error(e),
            },
        },
        Cmd::Reduce { file, out, trace } => {
            let (o, r) = report::reduction(&load(&file)?);
            if let Some(r) = r {
                if let Some(p) = out {
                    write(&p, &serialize_quiver(&r.result))?;
                }
                if let Some(p) = trace {
                    write(&p, &serialize_trace(&r.trace))?;
                }
            }
            o
        }
        Cmd::Equivalent { a, b } => report::equivalent(&load(&a)?, &load(&b)?),
        Cmd::CollisionDemo { m } => report::collision(m),
        Cmd::Serve { port } => {
            let port = service::effective_port(port)?;
            tokio::runtime::Runtime::new()?.block_on(service::serve(port))?;
            Outcome::ok(String::new(), serde_json::Value::Null)
        }
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let json = cli.json;
    let o = match run(cli.cmd) {
        Ok(o) => o,
        Err(e) => Outcome::error(format!("{e:#}")),
    };
    // a closed pipe downstream is not an error worth reporting
    let _ = if json {
        writeln!(
            std::io::stdout(),
            "{}",
            serde_json::to_string_pretty(&o.json).unwrap_or_default()
        )
    } else if !o.is_error {
        write!(std::io::stdout(), "{}", o.text)
    } else {
        write!(std::io::stderr(), "{}", o.text)
    };
    ExitCode::from(o.code)
}

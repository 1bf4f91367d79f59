//! Command-line front end. Exit codes: 0 ok, 1 verification failure,
//! 2 construction failure, 64 usage error.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::commands::{
    cmd_demo_chain, cmd_demo_clique, cmd_demo_two_storey, cmd_diverge, cmd_refute, cmd_transfer, cmd_weave, to_dot,
    verify_text, Artifact, EmbeddingChoice, EmbeddingFile, TreeMapChoice,
};
use crate::config::Caps;
use crate::error::Error;
use crate::graph::FamilySpec;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY: i32 = 1;
pub const EXIT_CONSTRUCT: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

#[derive(Parser, Debug)]
#[command(name = "gridweaver", version, about = "Build and check hexagonal-grid subdivisions in infinite graphs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(clap::Args, Debug, Clone)]
pub struct Output {
    /// Artifact JSON path; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write the image subgraph as DOT.
    #[arg(long)]
    pub dot: Option<PathBuf>,
}

#[derive(clap::Args, Debug, Clone)]
pub struct Search {
    /// Scale of the divergence certificate for the starting ray pair.
    #[arg(long, default_value_t = 8)]
    pub scale: usize,
    /// Greedy extension steps allowed in the ray pair search.
    #[arg(long, default_value_t = 10_000)]
    pub effort: usize,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum EmbeddingArg {
    HexInSquare,
    SquareIdentity,
    HexIdentity,
    File,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum TreeQiArg {
    Natural,
    Identity,
    Collapse,
    File,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Weave a rows x cols brick-wall fragment into a graph.
    Weave {
        #[arg(long)]
        graph: String,
        #[arg(long)]
        rows: usize,
        #[arg(long)]
        cols: usize,
        /// Teeth per comb; defaults to 4 * cols.
        #[arg(long)]
        budget: Option<usize>,
        #[command(flatten)]
        search: Search,
        #[command(flatten)]
        output: Output,
    },
    /// Recheck artifact files.
    Verify {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Find a pair of rays with a divergence certificate.
    Diverge {
        #[arg(long)]
        graph: String,
        #[command(flatten)]
        search: Search,
        #[command(flatten)]
        output: Output,
    },
    /// Move a fragment across a coarse embedding and upgrade it to a subdivision.
    Transfer {
        #[arg(long, value_enum)]
        embedding: EmbeddingArg,
        /// Embedding JSON for `--embedding file`.
        #[arg(long)]
        embedding_file: Option<PathBuf>,
        #[arg(long)]
        rows: usize,
        #[arg(long)]
        cols: usize,
        #[arg(long)]
        subdivision_out: Option<PathBuf>,
        #[command(flatten)]
        output: Output,
    },
    /// Refute a family of rays against a map to a tree.
    Refute {
        #[arg(long)]
        graph: String,
        #[arg(long)]
        rays: usize,
        #[arg(long)]
        depth: usize,
        #[arg(long, value_enum)]
        tree_qi: TreeQiArg,
        /// Tree map JSON for `--tree-qi file`.
        #[arg(long)]
        qi_file: Option<PathBuf>,
        #[command(flatten)]
        output: Output,
    },
    /// Fixed demonstration models.
    Demo {
        #[command(subcommand)]
        which: Demo,
    },
}

#[derive(Subcommand, Debug)]
pub enum Demo {
    /// Cylinder piece of circumference m as a minor of circumference n.
    Chain {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        length: usize,
        #[command(flatten)]
        output: Output,
    },
    /// K_n in the cubic lattice.
    Clique {
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        output: Output,
    },
    /// Brick-wall fragment across both storeys.
    TwoStorey {
        #[arg(long)]
        rows: usize,
        #[arg(long)]
        cols: usize,
        #[command(flatten)]
        output: Output,
    },
}

/// Result of a run: exit code plus text for stdout and stderr.
#[derive(Debug, Default, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn fail(code: i32, msg: String) -> Self {
        Outcome {
            code,
            stdout: String::new(),
            stderr: msg,
        }
    }
}

fn usage(msg: impl Into<String>) -> Outcome {
    Outcome::fail(EXIT_USAGE, format!("usage error: {}\n", msg.into()))
}

fn failure(e: &Error) -> Outcome {
    if e.stage().is_none() && matches!(e, Error::InvalidArgument(_)) {
        return usage(e.to_string());
    }
    let stage = e.stage().unwrap_or("setup");
    Outcome::fail(EXIT_CONSTRUCT, format!("stage {stage}: {}\n", e.root_cause()))
}

fn read(path: &Path) -> Result<String, Outcome> {
    std::fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Outcome> {
    std::fs::write(path, text).map_err(|e| Outcome::fail(EXIT_CONSTRUCT, format!("cannot write {}: {e}\n", path.display())))
}

fn spec(text: &str) -> Result<FamilySpec, Outcome> {
    FamilySpec::parse(text).map_err(|e| usage(e.to_string()))
}

fn emit(mut art: Artifact, output: &Output, extra: Option<(&Path, Artifact)>) -> Outcome {
    let mut outs: Vec<String> = output.out.iter().map(|p| p.display().to_string()).collect();
    outs.extend(output.dot.iter().map(|p| p.display().to_string()));
    outs.extend(extra.as_ref().map(|(p, _)| p.display().to_string()));
    art.meta_mut().outputs = outs.clone();
    let mut o = Outcome::default();
    let json = art.to_json();
    match &output.out {
        Some(p) => {
            if let Err(e) = write(p, &json) {
                return e;
            }
        }
        None => o.stdout = json,
    }
    if let Some(p) = &output.dot {
        let Some(dot) = to_dot(&art) else {
            return usage("DOT output is available for subdivisions and minors");
        };
        if let Err(e) = write(p, &dot) {
            return e;
        }
    }
    if let Some((p, mut a)) = extra {
        a.meta_mut().outputs = outs;
        if let Err(e) = write(p, &a.to_json()) {
            return e;
        }
    }
    o
}

fn caps(search: Option<&Search>) -> Result<Caps, Outcome> {
    let mut c = Caps::from_env().map_err(|e| usage(e.to_string()))?;
    if let Some(s) = search {
        c.scale = s.scale;
        c.effort = s.effort;
    }
    Ok(c)
}

fn run_parsed(cli: Cli) -> Result<Outcome, Outcome> {
    Ok(match cli.command {
        Command::Weave {
            graph,
            rows,
            cols,
            budget,
            search,
            output,
        } => {
            let caps = caps(Some(&search))?;
            match cmd_weave(&spec(&graph)?, rows, cols, budget, &caps) {
                Ok(a) => emit(a, &output, None),
                Err(e) => failure(&e),
            }
        }
        Command::Verify { files } => {
            let mut o = Outcome::default();
            for f in &files {
                let text = read(f)?;
                let report = verify_text(&text);
                if !report.ok {
                    o.code = EXIT_VERIFY;
                    for v in &report.violations {
                        o.stderr
                            .push_str(&format!("{}: {} [{}] {}\n", f.display(), v.rule, v.witness.join(" "), v.message));
                    }
                }
                let line = serde_json::json!({ "file": f.display().to_string(), "report": report });
                o.stdout.push_str(&serde_json::to_string(&line).expect("reports serialize"));
                o.stdout.push('\n');
            }
            o
        }
        Command::Diverge { graph, search, output } => {
            let caps = caps(Some(&search))?;
            match cmd_diverge(&spec(&graph)?, &caps) {
                Ok(a) => emit(a, &output, None),
                Err(e) => failure(&e),
            }
        }
        Command::Transfer {
            embedding,
            embedding_file,
            rows,
            cols,
            subdivision_out,
            output,
        } => {
            let choice = match (embedding, &embedding_file) {
                (EmbeddingArg::File, Some(p)) => {
                    let f: EmbeddingFile = serde_json::from_str(&read(p)?).map_err(|e| usage(e.to_string()))?;
                    EmbeddingChoice::File(f)
                }
                (EmbeddingArg::File, None) => return Err(usage("--embedding file needs --embedding-file")),
                (_, Some(_)) => return Err(usage("--embedding-file only goes with --embedding file")),
                (EmbeddingArg::HexInSquare, None) => EmbeddingChoice::HexInSquare,
                (EmbeddingArg::SquareIdentity, None) => EmbeddingChoice::SquareIdentity,
                (EmbeddingArg::HexIdentity, None) => EmbeddingChoice::HexIdentity,
            };
            let caps = caps(None)?;
            match cmd_transfer(&choice, rows, cols, &caps) {
                Ok((minor, sub)) => emit(minor, &output, subdivision_out.as_deref().map(|p| (p, sub))),
                Err(e) => failure(&e),
            }
        }
        Command::Refute {
            graph,
            rays,
            depth,
            tree_qi,
            qi_file,
            output,
        } => {
            let choice = match (tree_qi, &qi_file) {
                (TreeQiArg::File, Some(p)) => {
                    TreeMapChoice::File(serde_json::from_str(&read(p)?).map_err(|e| usage(e.to_string()))?)
                }
                (TreeQiArg::File, None) => return Err(usage("--tree-qi file needs --qi-file")),
                (_, Some(_)) => return Err(usage("--qi-file only goes with --tree-qi file")),
                (TreeQiArg::Natural, None) => TreeMapChoice::Natural,
                (TreeQiArg::Identity, None) => TreeMapChoice::Identity,
                (TreeQiArg::Collapse, None) => TreeMapChoice::Collapse,
            };
            let caps = caps(None)?;
            match cmd_refute(&spec(&graph)?, rays, depth, &choice, &caps) {
                Ok(a) => emit(a, &output, None),
                Err(e) => failure(&e),
            }
        }
        Command::Demo { which } => {
            let caps = caps(None)?;
            let (res, output) = match which {
                Demo::Chain { m, n, length, output } => (cmd_demo_chain(m, n, length, &caps), output),
                Demo::Clique { n, output } => (cmd_demo_clique(n, &caps), output),
                Demo::TwoStorey { rows, cols, output } => (cmd_demo_two_storey(rows, cols, &caps), output),
            };
            match res {
                Ok(a) => emit(a, &output, None),
                Err(e) => failure(&e),
            }
        }
    })
}

/// Parses and runs one invocation without touching the process streams.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            return if code == EXIT_OK {
                Outcome {
                    code,
                    stdout: text,
                    stderr: String::new(),
                }
            } else {
                Outcome::fail(code, text)
            };
        }
    };
    run_parsed(cli).unwrap_or_else(|o| o)
}

//! Command-line surface for the causal-network calculus.
//!
//! Exit codes: 0 on success, 1 on a domain error (validation, cycles,
//! failed preconditions), 2 on a parse error (unreadable or malformed
//! input). Diagnostics go to standard error; results go to standard output
//! or to `--output` when given.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use caunet::diagram::gauge_check;
use caunet::eval::{induced_boundary, total_value, value, BoundaryOrder};
use caunet::io::{self, dot};
use caunet::moves::{apply_moves, decompose, verify_decomposition};
use caunet::nerve::{nerve_apply_moves, NerveError};
use caunet::poset::{network_to_poset, poset_to_network};
use caunet::smc::{format_rational, FreeSmc, MatQ, PermCat};
use caunet::{EdgeId, VertexId};

#[derive(Parser)]
#[command(name = "caunet", version, about = "Causal networks, rewrites, and diagram evaluation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ArtifactKind {
    Network,
    Diagram,
    Functor,
    Moves,
    Poset,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DotKind {
    Network,
    Diagram,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and validate an artifact file.
    Validate {
        #[arg(long, value_enum, default_value = "network")]
        kind: ArtifactKind,
        file: PathBuf,
    },
    /// Decompose a functor into elementary moves and verify the composite.
    Decompose {
        /// Functor file.
        #[arg(long = "from")]
        from: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Apply a move list to a network; emits the result and the composite functor.
    ApplyMove {
        #[arg(long)]
        network: PathBuf,
        #[arg(long)]
        moves: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Evaluate the sub-diagram induced by a vertex subset.
    Evaluate {
        #[arg(long)]
        diagram: PathBuf,
        /// Comma-separated vertex ids.
        #[arg(long)]
        subset: String,
        /// Comma-separated order on the incoming boundary edges.
        #[arg(long, default_value = "")]
        qdom: String,
        /// Comma-separated order on the outgoing boundary edges.
        #[arg(long, default_value = "")]
        qcod: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Evaluate the whole diagram to a unit-to-unit morphism.
    TotalValue {
        #[arg(long)]
        diagram: PathBuf,
    },
    /// Check gauge equivalence of two diagrams via a witness file.
    GaugeCheck {
        #[arg(long)]
        left: PathBuf,
        #[arg(long)]
        right: PathBuf,
        #[arg(long)]
        witness: PathBuf,
    },
    /// Transport a diagram along a functor or an explicit move list.
    Nerve {
        #[arg(long)]
        diagram: PathBuf,
        #[arg(long, conflicts_with = "moves")]
        functor: Option<PathBuf>,
        #[arg(long)]
        moves: Option<PathBuf>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Render a network or diagram as DOT.
    ExportDot {
        #[arg(long, value_enum, default_value = "network")]
        kind: DotKind,
        file: PathBuf,
    },
    /// Build the transitive-closure DAG of a poset.
    Poset2dag { file: PathBuf },
    /// Read off the reachability poset of a network.
    Dag2poset { file: PathBuf },
}

/// Failures split by exit code: parse problems exit 2, domain problems 1.
enum Failure {
    Parse(String),
    Domain(String),
}

impl From<io::IoError> for Failure {
    fn from(e: io::IoError) -> Self {
        match e {
            io::IoError::Parse { .. } => Failure::Parse(e.to_string()),
            io::IoError::Validation(_) => Failure::Domain(e.to_string()),
        }
    }
}

impl From<NerveError> for Failure {
    fn from(e: NerveError) -> Self {
        Failure::Domain(e.to_string())
    }
}

fn read_file(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path)
        .map_err(|e| Failure::Parse(format!("cannot read {}: {e}", path.display())))
}

fn emit(output: Option<&Path>, content: &str) -> Result<(), Failure> {
    match output {
        Some(path) => fs::write(path, content)
            .map_err(|e| Failure::Domain(format!("cannot write {}: {e}", path.display()))),
        None => {
            println!("{content}");
            Ok(())
        }
    }
}

fn split_ids(s: &str) -> Vec<String> {
    s.split(',')
        .map(str::trim)
        .filter(|x| !x.is_empty())
        .map(str::to_owned)
        .collect()
}

/// Runs `body` against the diagram file's tagged instance.
macro_rules! dispatch_smc {
    ($tag:expr, $v:ident, $body:expr) => {{
        match $tag {
            "matq" => {
                type $v = MatQ;
                $body
            }
            "perm" => {
                type $v = PermCat;
                $body
            }
            "free" => {
                type $v = FreeSmc;
                $body
            }
            other => Err(Failure::Domain(format!("unknown smc instance {other:?}"))),
        }
    }};
}

fn validate_cmd(kind: ArtifactKind, file: &Path) -> Result<(), Failure> {
    let content = read_file(file)?;
    match kind {
        ArtifactKind::Network => {
            io::parse_network(&content)?;
        }
        ArtifactKind::Functor => {
            io::parse_functor(&content)?;
        }
        ArtifactKind::Moves => {
            io::parse_moves(&content)?;
        }
        ArtifactKind::Poset => {
            io::parse_poset(&content)?;
        }
        ArtifactKind::Diagram => {
            let tag = io::peek_smc_tag(&content)?;
            dispatch_smc!(tag.as_str(), V, {
                io::parse_diagram::<V>(&content)?;
                Ok(())
            })?;
        }
    }
    eprintln!("ok");
    Ok(())
}

fn decompose_cmd(from: &Path, output: Option<&Path>) -> Result<(), Failure> {
    let f = io::parse_functor(&read_file(from)?)?;
    let moves = decompose(&f).map_err(|e| Failure::Domain(e.to_string()))?;
    let verified = verify_decomposition(&f, &moves);
    let body = format!(
        "{{\n  \"moves\": {},\n  \"verified\": {}\n}}",
        indent_json(&io::serialize_moves(&moves), 2),
        verified
    );
    emit(output, &body)
}

/// Re-indents a pretty-printed JSON fragment for embedding.
fn indent_json(json: &str, by: usize) -> String {
    let pad = " ".repeat(by);
    json.lines()
        .enumerate()
        .map(|(i, l)| if i == 0 { l.to_owned() } else { format!("{pad}{l}") })
        .collect::<Vec<_>>()
        .join("\n")
}

fn apply_move_cmd(network: &Path, moves: &Path, output: Option<&Path>) -> Result<(), Failure> {
    let n = io::parse_network(&read_file(network)?)?;
    let ms = io::parse_moves(&read_file(moves)?)?;
    let (nets, composite) = apply_moves(&n, &ms).map_err(|e| Failure::Domain(e.to_string()))?;
    let body = format!(
        "{{\n  \"network\": {},\n  \"functor\": {}\n}}",
        indent_json(&io::serialize_network(nets.last().expect("nonempty")), 2),
        indent_json(&io::serialize_functor(&composite), 2)
    );
    emit(output, &body)
}

fn evaluate_cmd(
    diagram: &Path,
    subset: &str,
    qdom: &str,
    qcod: &str,
    output: Option<&Path>,
) -> Result<(), Failure> {
    let content = read_file(diagram)?;
    let tag = io::peek_smc_tag(&content)?;
    let subset: BTreeSet<VertexId> = split_ids(subset).into_iter().map(VertexId::from).collect();
    let dom_order: Vec<EdgeId> = split_ids(qdom).into_iter().map(EdgeId::from).collect();
    let cod_order: Vec<EdgeId> = split_ids(qcod).into_iter().map(EdgeId::from).collect();
    dispatch_smc!(tag.as_str(), V, {
        let d = io::parse_diagram::<V>(&content)?;
        let boundary =
            induced_boundary(&d, &subset).map_err(|e| Failure::Domain(e.to_string()))?;
        let q = BoundaryOrder::new(&boundary, dom_order, cod_order)
            .map_err(|e| Failure::Domain(e.to_string()))?;
        let v = value(&d, &subset, &q).map_err(|e| Failure::Domain(e.to_string()))?;
        emit(
            output,
            &serde_json::to_string_pretty(&v).expect("morphisms serialize"),
        )
    })
}

fn total_value_cmd(diagram: &Path) -> Result<(), Failure> {
    let content = read_file(diagram)?;
    let tag = io::peek_smc_tag(&content)?;
    if tag == "matq" {
        let d = io::parse_diagram::<MatQ>(&content)?;
        let v = total_value(&d).map_err(|e| Failure::Domain(e.to_string()))?;
        let scalar = v.scalar().expect("total value of a matq diagram is 1x1");
        println!("{}", format_rational(scalar));
        return Ok(());
    }
    dispatch_smc!(tag.as_str(), V, {
        let d = io::parse_diagram::<V>(&content)?;
        let v = total_value(&d).map_err(|e| Failure::Domain(e.to_string()))?;
        println!("{}", serde_json::to_string_pretty(&v).expect("morphisms serialize"));
        Ok(())
    })
}

fn gauge_check_cmd(left: &Path, right: &Path, witness: &Path) -> Result<(), Failure> {
    let left = read_file(left)?;
    let right = read_file(right)?;
    let witness = read_file(witness)?;
    let tag = io::peek_smc_tag(&left)?;
    dispatch_smc!(tag.as_str(), V, {
        let l = io::parse_diagram::<V>(&left)?;
        let r = io::parse_diagram::<V>(&right)?;
        let w = io::parse_witness::<V>(&witness)?;
        let holds = gauge_check(&l, &r, &w).map_err(|e| Failure::Domain(e.to_string()))?;
        println!("{holds}");
        Ok(())
    })
}

fn nerve_cmd(
    diagram: &Path,
    functor: Option<&Path>,
    moves: Option<&Path>,
    output: Option<&Path>,
) -> Result<(), Failure> {
    let content = read_file(diagram)?;
    let tag = io::peek_smc_tag(&content)?;
    let moves = match (functor, moves) {
        (Some(f), None) => {
            let f = io::parse_functor(&read_file(f)?)?;
            decompose(&f).map_err(|e| Failure::Domain(e.to_string()))?
        }
        (None, Some(m)) => io::parse_moves(&read_file(m)?)?,
        _ => {
            return Err(Failure::Domain(
                "exactly one of --functor or --moves is required".into(),
            ))
        }
    };
    dispatch_smc!(tag.as_str(), V, {
        let d = io::parse_diagram::<V>(&content)?;
        let out = nerve_apply_moves(&d, &moves)?;
        emit(output, &io::serialize_diagram(&out))
    })
}

fn export_dot_cmd(kind: DotKind, file: &Path) -> Result<(), Failure> {
    let content = read_file(file)?;
    match kind {
        DotKind::Network => {
            let n = io::parse_network(&content)?;
            print!("{}", dot::network_to_dot(&n));
            Ok(())
        }
        DotKind::Diagram => {
            let tag = io::peek_smc_tag(&content)?;
            dispatch_smc!(tag.as_str(), V, {
                let d = io::parse_diagram::<V>(&content)?;
                print!("{}", dot::diagram_to_dot(&d));
                Ok(())
            })
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Validate { kind, file } => validate_cmd(kind, &file),
        Command::Decompose { from, output } => decompose_cmd(&from, output.as_deref()),
        Command::ApplyMove {
            network,
            moves,
            output,
        } => apply_move_cmd(&network, &moves, output.as_deref()),
        Command::Evaluate {
            diagram,
            subset,
            qdom,
            qcod,
            output,
        } => evaluate_cmd(&diagram, &subset, &qdom, &qcod, output.as_deref()),
        Command::TotalValue { diagram } => total_value_cmd(&diagram),
        Command::GaugeCheck {
            left,
            right,
            witness,
        } => gauge_check_cmd(&left, &right, &witness),
        Command::Nerve {
            diagram,
            functor,
            moves,
            output,
        } => nerve_cmd(&diagram, functor.as_deref(), moves.as_deref(), output.as_deref()),
        Command::ExportDot { kind, file } => export_dot_cmd(kind, &file),
        Command::Poset2dag { file } => {
            let p = io::parse_poset(&read_file(&file)?)?;
            println!("{}", io::serialize_network(&poset_to_network(&p)));
            Ok(())
        }
        Command::Dag2poset { file } => {
            let n = io::parse_network(&read_file(&file)?)?;
            println!("{}", io::serialize_poset(&network_to_poset(&n)));
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Domain(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Parse(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

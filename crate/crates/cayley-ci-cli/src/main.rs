//! Command-line front end for the `cayley-ci` library.
//!
//! Every subcommand prints a plain-text report to stdout and exits with
//! 0 when every verdict passed, 1 when some verdict failed, and 2 on
//! usage, parse, or IO errors. Pass `--json PATH` to also write the
//! report as JSON; consumers should parse that, not the text. The JSON
//! keys are `title`, `verdicts` (list of `name`, `pass`, `detail`,
//! `millis`), `notes`, and `conclusion`.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use sha2::{Digest, Sha256};

use cayley_ci::autgrp::{aut_group, k_closure};
use cayley_ci::group::{parse_group_file, write_group_file};
use cayley_ci::report::Report;
use cayley_ci::witness::{
    build_witness, ci_check, load_bundle, verify_pair_threads, verify_witness_threads, Mode,
    WitnessSpec,
};
use cayley_ci::z2five;
use cayley_ci::{ColorRelStruct, GroupSpec};

/// Default element budget for conjugacy searches, overridable by the
/// `CAYLEY_CI_BUDGET` environment variable and the `--budget` flag.
const DEFAULT_BUDGET: u64 = 100_000;

#[derive(Parser)]
#[command(name = "cayley-ci", version, about = "Cayley isomorphism witnesses and permutation group utilities", max_term_width = 100)]
struct Cli {
    /// Also write the report as JSON to this path.
    #[arg(long, global = true, value_name = "PATH")]
    json: Option<PathBuf>,

    /// Worker threads for the independent verdicts of a verification.
    #[arg(long, global = true, default_value_t = 1, value_name = "N")]
    threads: usize,

    /// Echoed into the report for provenance; every construction here is
    /// deterministic, so the seed changes nothing else.
    #[arg(long, global = true, default_value_t = 0, value_name = "N")]
    seed: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build or re-verify a witness pair (X, Y) for Z_p x Z_2^d.
    #[command(subcommand)]
    Witness(WitnessCmd),
    /// Automorphism group of a colored relational structure.
    Aut(AutArgs),
    /// k-closure of a permutation group.
    Closure(ClosureArgs),
    /// Nontrivial block systems of a transitive permutation group.
    Blocks(BlocksArgs),
    /// Conjugacy test for a regular subgroup embedded into Aut(X) by phi.
    Cicheck(CicheckArgs),
    /// The order-2048 group on 32 points with two nonconjugate regular
    /// elementary abelian subgroups.
    #[command(name = "z2-5", subcommand)]
    Z2Five(Z2FiveCmd),
}

#[derive(Subcommand)]
enum WitnessCmd {
    /// Construct the pair, run the five verdicts, optionally save a bundle.
    Build(WitnessBuildArgs),
    /// Re-run the verdicts on a saved bundle, from its files alone.
    Verify(WitnessVerifyArgs),
}

#[derive(Args)]
struct WitnessBuildArgs {
    /// Odd prime p dividing 2^d - 1.
    #[arg(long)]
    p: u64,
    /// Rank d of the elementary abelian part, 2 <= d <= 8.
    #[arg(long)]
    d: u32,
    /// "color" keeps the orbit coloring as the anchor, "plain" uses a
    /// single-color rigid digraph instead.
    #[arg(long, default_value = "color")]
    mode: String,
    /// Directory for spec.txt, Z.rs, X.rs, Y.rs, gamma.perm, report.json.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct WitnessVerifyArgs {
    /// Bundle directory written by `witness build --out`.
    #[arg(long, value_name = "DIR")]
    dir: PathBuf,
}

#[derive(Args)]
struct AutArgs {
    /// Structure file: "relstruct n=<n> k=<k>" header, then "<color>: <t1> ... <tk>" lines.
    #[arg(long = "in", value_name = "FILE")]
    input: PathBuf,
    /// Write the automorphism group as a group file.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ClosureArgs {
    /// Group file: "degree <n>" header, then one generator per line in cycle notation.
    #[arg(long = "in", value_name = "FILE")]
    input: PathBuf,
    /// Tuple length k >= 1 of the closure.
    #[arg(long)]
    k: usize,
    /// Write the closure as a group file.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BlocksArgs {
    /// Group file of a transitive permutation group.
    #[arg(long = "in", value_name = "FILE")]
    input: PathBuf,
}

#[derive(Args)]
struct CicheckArgs {
    /// Structure whose automorphism group hosts the conjugacy question.
    #[arg(long, value_name = "FILE")]
    structure: PathBuf,
    /// Abstract group Z_p x Z_2^d as "p,d", for example "5,0" or "1,5".
    #[arg(long, value_name = "P,D")]
    group: String,
    /// Group file with a single generator: the embedding permutation phi.
    #[arg(long, value_name = "FILE")]
    phi: PathBuf,
    /// Element budget for the conjugacy search; defaults to
    /// CAYLEY_CI_BUDGET or 100000.
    #[arg(long, value_name = "N")]
    budget: Option<u64>,
}

#[derive(Subcommand)]
enum Z2FiveCmd {
    /// Run the five verdicts on the built-in generator data.
    Verify(Z2FiveVerifyArgs),
}

#[derive(Args)]
struct Z2FiveVerifyArgs {
    /// Skip the full 32-point automorphism group computation, the one
    /// expensive verdict; the skip is recorded in the report.
    #[arg(long)]
    skip_full_aut: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(report) => {
            print!("{}", report.render_text());
            if let Some(path) = &cli.json {
                let body = match serde_json::to_string_pretty(&report) {
                    Ok(b) => b,
                    Err(e) => return fail(&format!("serializing report: {}", e)),
                };
                if let Err(e) = std::fs::write(path, body + "\n") {
                    return fail(&format!("writing {}: {}", path.display(), e));
                }
            }
            if report.all_pass() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(message) => fail(&message),
    }
}

fn fail(message: &str) -> ExitCode {
    eprintln!("error: {}", message);
    ExitCode::from(2)
}

fn run(cli: &Cli) -> Result<Report, String> {
    let mut report = match &cli.command {
        Command::Witness(WitnessCmd::Build(args)) => witness_build(args, cli)?,
        Command::Witness(WitnessCmd::Verify(args)) => witness_verify(args, cli)?,
        Command::Aut(args) => cmd_aut(args)?,
        Command::Closure(args) => cmd_closure(args)?,
        Command::Blocks(args) => cmd_blocks(args)?,
        Command::Cicheck(args) => cmd_cicheck(args)?,
        Command::Z2Five(Z2FiveCmd::Verify(args)) => {
            z2five::verify_counterexample(args.skip_full_aut).map_err(|e| e.to_string())?
        }
    };
    if !matches!(&cli.command, Command::Witness(WitnessCmd::Build(_))) {
        stamp(&mut report, cli);
    }
    Ok(report)
}

/// Provenance notes every report carries. Identical inputs give identical
/// reports up to the per-verdict timings.
fn stamp(report: &mut Report, cli: &Cli) {
    report.note(format!("command: {}", command_echo()));
    report.note(format!("version: cayley-ci {}", env!("CARGO_PKG_VERSION")));
    report.note(format!("seed: {}", cli.seed));
}

/// The invocation with argv[0] shortened to the program name.
fn command_echo() -> String {
    let args: Vec<String> = std::env::args().collect();
    let mut echo = Vec::with_capacity(args.len());
    match args.first().map(Path::new).and_then(Path::file_name) {
        Some(name) => echo.push(name.to_string_lossy().into_owned()),
        None => echo.push("cayley-ci".to_string()),
    }
    echo.extend(args.iter().skip(1).cloned());
    echo.join(" ")
}

fn read_input(path: &Path) -> Result<String, String> {
    std::fs::read_to_string(path).map_err(|e| format!("reading {}: {}", path.display(), e))
}

fn digest_note(report: &mut Report, path: &Path, text: &str) {
    let hash = Sha256::digest(text.as_bytes());
    let hex: String = hash.iter().map(|b| format!("{:02x}", b)).collect();
    report.note(format!("input sha256 {}: {}", path.display(), hex));
}

fn witness_build(args: &WitnessBuildArgs, cli: &Cli) -> Result<Report, String> {
    let mode = Mode::from_str(&args.mode)?;
    let spec = WitnessSpec::standard(args.p, args.d, mode).map_err(|e| e.to_string())?;
    let bundle = build_witness(spec).map_err(|e| e.to_string())?;
    let mut report = verify_witness_threads(&bundle, cli.threads);
    // Stamp before saving so the bundled report.json matches stdout.
    stamp(&mut report, cli);
    if let Some(dir) = &args.out {
        report.note(format!("bundle written to {}", dir.display()));
        bundle
            .save(dir, &report)
            .map_err(|e| format!("writing bundle to {}: {}", dir.display(), e))?;
    }
    Ok(report)
}

fn witness_verify(args: &WitnessVerifyArgs, cli: &Cli) -> Result<Report, String> {
    let loaded = load_bundle(&args.dir).map_err(|e| e.to_string())?;
    let mut report = verify_pair_threads(&loaded.spec, &loaded.x, &loaded.y, cli.threads);
    // The bundled gamma documents the isomorphism; a sixth verdict keeps a
    // tampered gamma.perm from slipping through the pair checks.
    report.record("bundle-twist-maps-x-to-y", || {
        match loaded.x.apply_perm(&loaded.twist) {
            Ok(image) if image == loaded.y => {
                (true, "the saved twist carries X onto Y".into())
            }
            Ok(_) => (false, "the saved twist does not carry X onto Y".into()),
            Err(e) => (false, format!("the saved twist does not act on X: {}", e)),
        }
    });
    if !report.all_pass() {
        report.conclusion = "WITNESS-INVALID: at least one verdict failed".to_string();
    }
    report.note(format!(
        "anchor: {} edges on {} points",
        loaded.anchor.edge_count(),
        loaded.anchor.vertex_count()
    ));
    for name in ["spec.txt", "Z.rs", "X.rs", "Y.rs", "gamma.perm"] {
        let path = args.dir.join(name);
        let text = read_input(&path)?;
        digest_note(&mut report, &path, &text);
    }
    Ok(report)
}

fn cmd_aut(args: &AutArgs) -> Result<Report, String> {
    let text = read_input(&args.input)?;
    let structure = ColorRelStruct::parse(&text).map_err(|e| e.to_string())?;
    let aut = aut_group(&structure).map_err(|e| e.to_string())?;
    let mut report = Report::new(format!("automorphism group of {}", args.input.display()));
    report.record("automorphism-group-computed", || {
        (
            true,
            format!("order {} with {} generators", aut.order(), aut.generators().len()),
        )
    });
    report.note(format!(
        "structure: {} points, arity {}, {} edges",
        structure.vertex_count(),
        structure.arity(),
        structure.edge_count()
    ));
    digest_note(&mut report, &args.input, &text);
    report.conclusion = format!("automorphism group has order {}", aut.order());
    if let Some(out) = &args.out {
        std::fs::write(out, write_group_file(&aut))
            .map_err(|e| format!("writing {}: {}", out.display(), e))?;
        report.note(format!("group written to {}", out.display()));
    }
    Ok(report)
}

fn cmd_closure(args: &ClosureArgs) -> Result<Report, String> {
    let text = read_input(&args.input)?;
    let group = parse_group_file(&text).map_err(|e| e.to_string())?;
    let closure = k_closure(&group, args.k).map_err(|e| e.to_string())?;
    let mut report = Report::new(format!(
        "{}-closure of {}",
        args.k,
        args.input.display()
    ));
    report.record("closure-computed", || {
        (
            true,
            format!(
                "closure has order {}, input group has order {}",
                closure.order(),
                group.order()
            ),
        )
    });
    report.record("closure-contains-input", || {
        if closure.contains_group(&group) {
            (true, "the closure contains the input group".into())
        } else {
            (false, "the closure is missing input elements".into())
        }
    });
    digest_note(&mut report, &args.input, &text);
    report.conclusion = format!("order {} at k = {}", closure.order(), args.k);
    if let Some(out) = &args.out {
        std::fs::write(out, write_group_file(&closure))
            .map_err(|e| format!("writing {}: {}", out.display(), e))?;
        report.note(format!("group written to {}", out.display()));
    }
    Ok(report)
}

fn cmd_blocks(args: &BlocksArgs) -> Result<Report, String> {
    let text = read_input(&args.input)?;
    let group = parse_group_file(&text).map_err(|e| e.to_string())?;
    let systems = group.all_block_systems().map_err(|e| e.to_string())?;
    let mut report = Report::new(format!("block systems of {}", args.input.display()));
    report.record("block-systems-computed", || {
        (
            true,
            format!("{} nontrivial block systems", systems.len()),
        )
    });
    for system in &systems {
        report.note(format!(
            "{} blocks of size {}: {:?}",
            system.num_blocks(),
            system.block_size(),
            system.blocks()
        ));
    }
    digest_note(&mut report, &args.input, &text);
    report.conclusion = format!("{} nontrivial block systems", systems.len());
    Ok(report)
}

fn cmd_cicheck(args: &CicheckArgs) -> Result<Report, String> {
    let struct_text = read_input(&args.structure)?;
    let structure = ColorRelStruct::parse(&struct_text).map_err(|e| e.to_string())?;
    let spec = parse_group_spec(&args.group)?;
    let phi_text = read_input(&args.phi)?;
    let phi_group = parse_group_file(&phi_text).map_err(|e| e.to_string())?;
    if phi_group.generators().len() != 1 {
        return Err(format!(
            "{}: expected exactly one generator for phi, found {}",
            args.phi.display(),
            phi_group.generators().len()
        ));
    }
    let phi = phi_group.generators()[0].clone();
    let budget = match args.budget {
        Some(b) => b,
        None => budget_from_env()?,
    };
    let conjugator = ci_check(&structure, &spec, &phi, budget).map_err(|e| e.to_string())?;
    let mut report = Report::new(format!(
        "conjugacy of the phi-embedded regular copy of Z_{} x Z_2^{} in Aut({})",
        spec.p(),
        spec.d(),
        args.structure.display()
    ));
    report.record("embedded-copy-conjugate-to-regular-representation", || {
        match &conjugator {
            Some(g) => (true, format!("conjugating automorphism: {}", g.cycle_string())),
            None => (
                false,
                format!(
                    "no conjugating automorphism within a budget of {} elements; \
                     the structure is a CI failure certificate for this phi",
                    budget
                ),
            ),
        }
    });
    digest_note(&mut report, &args.structure, &struct_text);
    digest_note(&mut report, &args.phi, &phi_text);
    report.note(format!("budget: {} elements", budget));
    report.conclusion = match &conjugator {
        Some(_) => "the embedded copy is conjugate to the regular representation".to_string(),
        None => "no conjugator exists within budget".to_string(),
    };
    Ok(report)
}

fn parse_group_spec(text: &str) -> Result<GroupSpec, String> {
    let (p, d) = text
        .split_once(',')
        .ok_or_else(|| format!("expected \"p,d\", got \"{}\"", text))?;
    let p: u64 = p.trim().parse().map_err(|e| format!("bad p in \"{}\": {}", text, e))?;
    let d: u32 = d.trim().parse().map_err(|e| format!("bad d in \"{}\": {}", text, e))?;
    GroupSpec::new(p, d).map_err(|e| e.to_string())
}

fn budget_from_env() -> Result<u64, String> {
    match std::env::var("CAYLEY_CI_BUDGET") {
        Ok(value) => value
            .trim()
            .parse()
            .map_err(|e| format!("CAYLEY_CI_BUDGET=\"{}\": {}", value, e)),
        Err(std::env::VarError::NotPresent) => Ok(DEFAULT_BUDGET),
        Err(e) => Err(format!("CAYLEY_CI_BUDGET: {}", e)),
    }
}

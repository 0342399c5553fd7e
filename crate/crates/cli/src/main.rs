//! `ebforge`: check, translate, simulate and generate proof obligations for
//! Event-B models written in the ASCII surface syntax.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use ebforge_core::parser::SourceFile;
use ebforge_core::pogen::{check_sequent_finite, emit_vc, gen_pos, report_row, Bounds, Verdict};
use ebforge_core::simulate::{self, parse_bindings, ParamSearch, SimConfig, SimError, Termination};
use ebforge_core::translate::{emit_contracts, Grounding, Mode};
use ebforge_core::typecheck::TypedProject;
use ebforge_core::{build_program, load_project};

/// Exit status for a run that stopped on an evaluation error.
const RUNTIME_ERROR: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "ebforge", version, about = "Event-B model checker, translator and simulator")]
struct Cli {
    /// Directory searched for `.ebc`/`.ebm` files when none are given.
    #[arg(long, global = true, default_value = ".")]
    dir: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse, validate and type-check the model files.
    Check {
        files: Vec<PathBuf>,
        /// Print the symbol table as `name : type` lines.
        #[arg(long)]
        dump_types: bool,
    },
    /// Print the symbol table as `name : type` lines.
    Types { files: Vec<PathBuf> },
    /// Translate a machine and print its program layout.
    Translate {
        machine: String,
        files: Vec<PathBuf>,
        #[arg(long, value_enum, default_value_t = ModeArg::Interleaving)]
        mode: ModeArg,
        /// Write the listing here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Simulate a machine and print its trace.
    Run {
        machine: String,
        files: Vec<PathBuf>,
        #[arg(long, value_enum, default_value_t = ModeArg::Interleaving)]
        mode: ModeArg,
        /// Scheduler seed.
        #[arg(long, env = "EBFORGE_SEED", default_value_t = 0)]
        seed: u64,
        /// Maximum number of steps.
        #[arg(long, default_value_t = 1000)]
        steps: usize,
        /// Constant bindings file with `name = expr` lines.
        #[arg(long)]
        bind: Option<PathBuf>,
        /// Search for constant values that satisfy the axioms.
        #[arg(long)]
        solve_constants: bool,
        /// `exhaustive` or `sample:K`.
        #[arg(long, default_value = "exhaustive", value_parser = parse_search)]
        param_search: ParamSearch,
        /// Write the trace as JSON.
        #[arg(long)]
        json_trace: bool,
        /// Write the trace here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        ground: GroundArgs,
    },
    /// Print the pre/postcondition contracts of a machine.
    Contracts {
        machine: String,
        files: Vec<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate proof obligations, optionally checking them on finite domains.
    Po {
        machine: String,
        files: Vec<PathBuf>,
        /// Check each obligation and print a report row per obligation.
        #[arg(long)]
        check: bool,
        /// Directory receiving one `.vc` file per obligation.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        ground: GroundArgs,
    },
}

#[derive(Args, Debug)]
struct GroundArgs {
    /// Carrier size, repeatable: `--carrier D=2`.
    #[arg(long = "carrier", value_name = "NAME=K", value_parser = parse_carrier)]
    carriers: Vec<(String, i64)>,
    /// Range for otherwise unbounded integers.
    #[arg(long = "int", value_name = "LO..HI", value_parser = parse_range, allow_hyphen_values = true)]
    int_range: Option<(i64, i64)>,
}

impl GroundArgs {
    fn apply(&self, g: &mut Grounding) {
        g.carriers.extend(self.carriers.iter().cloned());
        if self.int_range.is_some() {
            g.int_range = self.int_range;
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Sequential,
    Interleaving,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Sequential => Mode::Sequential,
            ModeArg::Interleaving => Mode::Interleaving,
        }
    }
}

fn parse_carrier(s: &str) -> Result<(String, i64), String> {
    let (name, k) = s.split_once('=').ok_or("expected NAME=K")?;
    let k: i64 = k.trim().parse().map_err(|e| format!("size: {e}"))?;
    if k < 0 {
        return Err("size must be non-negative".into());
    }
    Ok((name.trim().to_string(), k))
}

fn parse_range(s: &str) -> Result<(i64, i64), String> {
    let (lo, hi) = s.split_once("..").ok_or("expected LO..HI")?;
    let lo: i64 = lo.trim().parse().map_err(|e| format!("low bound: {e}"))?;
    let hi: i64 = hi.trim().parse().map_err(|e| format!("high bound: {e}"))?;
    Ok((lo, hi))
}

fn parse_search(s: &str) -> Result<ParamSearch, String> {
    match s {
        "exhaustive" => Ok(ParamSearch::Exhaustive),
        _ => match s.strip_prefix("sample:").map(str::parse::<usize>) {
            Some(Ok(k)) if k > 0 => Ok(ParamSearch::Sampled(k)),
            _ => Err("expected `exhaustive` or `sample:K` with K > 0".into()),
        },
    }
}

fn model_files(dir: &Path, files: &[PathBuf]) -> Result<Vec<PathBuf>> {
    if !files.is_empty() {
        return Ok(files.to_vec());
    }
    let mut found: Vec<PathBuf> = fs::read_dir(dir)
        .with_context(|| format!("reading {}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| matches!(p.extension().and_then(|x| x.to_str()), Some("ebc" | "ebm")))
        .collect();
    found.sort();
    if found.is_empty() {
        bail!("no .ebc or .ebm files in {}", dir.display());
    }
    Ok(found)
}

fn load(dir: &Path, files: &[PathBuf]) -> Result<TypedProject> {
    let mut sources = Vec::new();
    for p in model_files(dir, files)? {
        let text = fs::read_to_string(&p).with_context(|| format!("reading {}", p.display()))?;
        sources.push(SourceFile::new(p.display().to_string(), text));
    }
    Ok(load_project(&sources)?)
}

/// A relative path that does not exist is also tried under `dir`.
fn locate(dir: &Path, p: &Path) -> PathBuf {
    if p.is_relative() && !p.exists() && dir.join(p).exists() {
        dir.join(p)
    } else {
        p.to_path_buf()
    }
}

/// Writes to stdout, surfacing a closed pipe as an error instead of a panic.
fn say(text: &str) -> Result<()> {
    io::stdout().lock().write_all(text.as_bytes())?;
    Ok(())
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => say(text),
    }
}

fn types_table(t: &TypedProject) -> String {
    t.table.iter().map(|(n, ty)| format!("{n} : {ty}\n")).collect()
}

fn is_violation(e: &SimError) -> bool {
    matches!(
        e,
        SimError::AxiomViolation(_)
            | SimError::InvariantViolationAtInit(_)
            | SimError::InvariantViolation { .. }
            | SimError::VariantViolation { .. }
    )
}

fn execute(cli: Cli) -> Result<u8> {
    let dir = &cli.dir;
    match cli.command {
        Command::Check { files, dump_types } => {
            let t = load(dir, &files)?;
            if dump_types {
                say(&types_table(&t))?;
            } else {
                say(&format!(
                    "ok: {} contexts, {} machines\n",
                    t.project.contexts.len(),
                    t.project.machines.len()
                ))?;
            }
        }
        Command::Types { files } => say(&types_table(&load(dir, &files)?))?,
        Command::Translate { machine, files, mode, out } => {
            let (_, p) = build_program(&load(dir, &files)?, &machine, mode.into())?;
            emit(&out, &p.to_string())?;
        }
        Command::Contracts { machine, files, out } => {
            let (_, p) = build_program(&load(dir, &files)?, &machine, Mode::default())?;
            emit(&out, &emit_contracts(&p.contracts))?;
        }
        Command::Run {
            machine,
            files,
            mode,
            seed,
            steps,
            bind,
            solve_constants,
            param_search,
            json_trace,
            out,
            ground,
        } => {
            let (_, p) = build_program(&load(dir, &files)?, &machine, mode.into())?;
            let mut cfg = SimConfig {
                mode: mode.into(),
                seed,
                step_limit: steps,
                param_search,
                solve_constants,
                ..SimConfig::default()
            };
            ground.apply(&mut cfg.grounding);
            if let Some(b) = bind {
                let b = locate(dir, &b);
                let text = fs::read_to_string(&b).with_context(|| format!("reading {}", b.display()))?;
                cfg.bindings = parse_bindings(&text)?;
            }
            let r = simulate::run(&p, &cfg);
            let text = if json_trace { r.trace.to_json() + "\n" } else { r.trace.to_text() };
            emit(&out, &text)?;
            if let Some(e) = &r.error {
                eprintln!("error: {e}");
                return Ok(if is_violation(e) { 1 } else { RUNTIME_ERROR });
            }
            if let Some(Termination::Error(msg)) = &r.trace.termination {
                eprintln!("error: {msg}");
                return Ok(RUNTIME_ERROR);
            }
        }
        Command::Po {
            machine,
            files,
            check,
            out,
            ground,
        } => {
            let t = load(dir, &files)?;
            if !t.project.machines.iter().any(|m| m.name == machine) {
                bail!("unknown machine `{machine}`");
            }
            let pos = gen_pos(&t, &machine)?;
            if let Some(d) = &out {
                fs::create_dir_all(d).with_context(|| format!("creating {}", d.display()))?;
                for s in &pos {
                    let file = d.join(format!("{}.vc", s.name.replace('/', ".")));
                    fs::write(&file, emit_vc(s)).with_context(|| format!("writing {}", file.display()))?;
                }
            }
            if !check {
                for s in &pos {
                    say(&format!("{}\n", s.name))?;
                }
                return Ok(0);
            }
            let mut bounds = Bounds::default();
            ground.apply(&mut bounds.grounding);
            let mut failed = 0;
            for s in &pos {
                let r = check_sequent_finite(s, &bounds);
                if !matches!(&r, Ok(c) if c.verdict == Verdict::Valid) {
                    failed += 1;
                }
                say(&format!("{}\n", report_row(s, &r)))?;
            }
            if failed > 0 {
                eprintln!("{failed} of {} obligations not valid", pos.len());
                return Ok(1);
            }
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match execute(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) if e.downcast_ref::<io::Error>().is_some_and(|e| e.kind() == io::ErrorKind::BrokenPipe) => {
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {}", anyhow!(e));
            ExitCode::from(1)
        }
    }
}

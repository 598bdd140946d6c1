use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use relycheck::lang::removal::erase_auxiliary;
use relycheck::lang::validate::validate_program;
use relycheck::lang::Prog;
use relycheck::proof::check::ProofFailure;
use relycheck::proof::{check_proof_tree, Claim, Discharger, Obligation};
use relycheck::sat::{
    check_sat, strongest_relations, Bracket, CheckOptions, CheckReport, SpecifiedProgram, Verdict, Which,
    DEFAULT_BUDGET,
};
use relycheck::semantics::{build_config_graph, initial_states, Environment, Machine, SemError};
use relycheck::syntax::{parse_program_with, parse_source, program_inline, structure_text, ObligationKind, SourceFile};

#[derive(Parser)]
#[command(name = "relycheck", version, about = "Rely/guarantee checker and proof validator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Machine-readable JSON report on stdout.
    #[arg(long, global = true)]
    json: bool,
    /// Maximum number of configurations to explore.
    #[arg(long, global = true, default_value_t = DEFAULT_BUDGET)]
    budget: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether the program satisfies the specification.
    Check {
        file: PathBuf,
        /// Override the file's brackets: `lsp` for (…), `lsps` for […].
        #[arg(long, value_enum)]
        mode: Option<Mode>,
        /// File holding the augmented program (default: the `witness` section).
        #[arg(long)]
        witness: Option<PathBuf>,
    },
    /// Validate the proof tree in the file.
    Prove {
        file: PathBuf,
        /// Write a failed obligation as a standalone file.
        #[arg(long)]
        export_failed: Option<PathBuf>,
    },
    /// Compute the strongest eff-, wait- or guar-condition under (P, R).
    Strongest {
        file: PathBuf,
        #[arg(long, value_enum)]
        what: What,
    },
    /// Remove auxiliary assignments from the witness (or program).
    Erase {
        file: PathBuf,
        /// Comma-separated auxiliary variables (default: the spec's auxiliary set).
        #[arg(long, value_delimiter = ',')]
        aux: Option<Vec<String>>,
    },
    /// Emit the configuration graph.
    Graph {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = Emit::Dot)]
        emit: Emit,
    },
    /// Decide the file's `valid` and `wf` obligations.
    Discharge { file: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Lsp,
    Lsps,
}

#[derive(Clone, Copy, ValueEnum)]
enum What {
    Eff,
    Wait,
    Guar,
}

#[derive(Clone, Copy, ValueEnum)]
enum Emit {
    Dot,
}

thread_local! {
    static OUT: std::cell::RefCell<String> = const { std::cell::RefCell::new(String::new()) };
}

/// Buffered stdout; a closed pipe must not turn a verdict into a panic.
macro_rules! say {
    ($($t:tt)*) => {
        OUT.with(|o| {
            let mut o = o.borrow_mut();
            o.push_str(&format!($($t)*));
            o.push('\n');
        })
    };
}

fn flush() {
    use std::io::Write;
    let text = OUT.with(|o| std::mem::take(&mut *o.borrow_mut()));
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(text.as_bytes()).and_then(|_| out.flush());
}

const VALID: u8 = 0;
const INVALID: u8 = 1;
const INPUT: u8 = 2;
const RESOURCE: u8 = 3;

struct InputError(String);

impl<E: std::fmt::Display> From<E> for InputError {
    fn from(e: E) -> Self {
        InputError(e.to_string())
    }
}

type Res = Result<u8, InputError>;

fn load(path: &Path) -> Result<SourceFile, InputError> {
    let src = std::fs::read_to_string(path).map_err(|e| InputError(format!("{}: {e}", path.display())))?;
    parse_source(&src).map_err(|e| InputError(format!("{}:{e}", path.display())))
}

fn program(f: &SourceFile) -> Result<&Prog, InputError> {
    f.program.as_ref().ok_or_else(|| InputError("the file has no `program` section".into()))
}

fn validated(f: &SourceFile, z: &Prog) -> Result<Vec<String>, InputError> {
    Ok(validate_program(z, &f.structure)?.notes)
}

fn specified(f: &SourceFile) -> Result<SpecifiedProgram, InputError> {
    let spec = f.spec.as_ref().ok_or_else(|| InputError("the file has no `spec` section".into()))?;
    Ok(SpecifiedProgram { program: program(f)?.clone(), spec: spec.spec.clone(), bracket: spec.bracket })
}

fn exit_for(v: Verdict) -> u8 {
    match v {
        Verdict::Valid => VALID,
        Verdict::Invalid => INVALID,
        Verdict::ResourceExceeded => RESOURCE,
    }
}

fn print_check(r: &CheckReport, notes: &[String], json: bool) {
    if json {
        let mut v = serde_json::to_value(r).expect("serialisable report");
        v["notes"] = json!(notes);
        say!("{v}");
        return;
    }
    say!("verdict: {}", r.verdict);
    if let Some(c) = r.clause {
        say!("clause: {c}");
    }
    if let Some(m) = &r.message {
        say!("{m}");
    }
    if let Some(cx) = &r.counterexample {
        say!("counterexample ({} configurations):", cx.steps.len());
        for (i, s) in cx.steps.iter().enumerate() {
            let arrow = match s.label {
                Some(l) => format!("-{l}->"),
                None => "    ".into(),
            };
            let mark = if cx.loop_start == Some(i) { " <- loop" } else { "" };
            say!("  {i:>3} {arrow} <{}, {}>{mark}", s.program, s.state);
        }
    }
    let s = &r.stats;
    say!(
        "explored {} configurations, {} transitions, {} residues from {} initial states",
        s.nodes, s.edges, s.residues, s.initial_states
    );
    for n in notes {
        say!("note: {n}");
    }
}

fn cmd_check(f: &SourceFile, mode: Option<Mode>, witness: Option<&Path>, cli: &Cli) -> Res {
    let mut sp = specified(f)?;
    let mut notes = validated(f, &sp.program)?;
    match mode {
        Some(Mode::Lsp) => sp.bracket = Bracket::Curly,
        Some(Mode::Lsps) => sp.bracket = Bracket::Square,
        None => {}
    }
    let wit = match witness {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| InputError(format!("{}: {e}", p.display())))?;
            Some(parse_program_with(&text, &f.structure).map_err(|e| InputError(format!("{}:{e}", p.display())))?)
        }
        None => f.witness.clone(),
    };
    if let Some(w) = &wit {
        notes.extend(validated(f, w)?);
    }
    let opts = CheckOptions { budget: cli.budget, invariant: f.invariant.clone() };
    let r = check_sat(&f.structure, &sp, wit.as_ref(), &opts)?;
    print_check(&r, &notes, cli.json);
    Ok(exit_for(r.verdict))
}

fn export_obligation(f: &SourceFile, fail: &ProofFailure, path: &Path, cli: &Cli) -> Result<(), InputError> {
    let proof = f.proof.as_ref().expect("proof present");
    let step = proof.step(&fail.step).expect("failing step exists");
    let mut text = structure_text(&f.structure);
    let scope = step.conclusion.spec.scope_names();
    text.push_str(&format!("scope {{{}}};\n", scope.into_iter().collect::<Vec<_>>().join(", ")));
    text.push_str(&format!("// {} at step {}\n", fail.message, fail.step));
    let obligation = fail.message.split(" (").next().unwrap_or_default();
    text.push_str(&format!("{obligation};\n"));
    std::fs::write(path, text)?;
    if !cli.json {
        say!("wrote {}", path.display());
    }
    Ok(())
}

fn cmd_prove(f: &SourceFile, export: Option<&Path>, cli: &Cli) -> Res {
    let proof = f.proof.as_ref().ok_or_else(|| InputError("the file has no `proof` section".into()))?;
    let root = proof.root().ok_or_else(|| InputError("the proof has no steps".into()))?;
    let mut notes = Vec::new();
    if let Some(z) = &f.program {
        notes.extend(validated(f, z)?);
        if root.conclusion.program != *z {
            return Err(InputError(format!("the root step `{}` does not prove the file's program", root.name)));
        }
    }
    if let Some(s) = &f.spec {
        if root.conclusion.spec != s.spec || root.conclusion.bracket != s.bracket {
            return Err(InputError(format!("the root step `{}` does not prove the file's specification", root.name)));
        }
    }
    let mut r = check_proof_tree(&f.structure, proof);
    r.notes.extend(notes);
    if cli.json {
        say!("{}", serde_json::to_value(&r).expect("serialisable report"));
    } else {
        say!("verdict: {}", r.verdict);
        if let Some(fail) = &r.failure {
            say!("failure: {fail}");
        }
        say!("system: {}, depth {}, steps {}, obligations discharged {}", r.system, r.depth, r.steps, r.obligations);
        for n in &r.notes {
            say!("note: {n}");
        }
    }
    if let (Some(path), Some(fail)) = (export, &r.failure) {
        if fail.message.starts_with("valid ") || fail.message.starts_with("wf ") {
            export_obligation(f, fail, path, cli)?;
        }
    }
    Ok(if r.is_valid() { VALID } else { INVALID })
}

fn cmd_strongest(f: &SourceFile, what: What, cli: &Cli) -> Res {
    let z = program(f)?;
    let notes = validated(f, z)?;
    let spec = &f.spec.as_ref().ok_or_else(|| InputError("the file has no `spec` section".into()))?.spec;
    let which = match what {
        What::Eff => Which::Eff,
        What::Wait => Which::Wait,
        What::Guar => Which::Guar,
    };
    let glo = spec.scope_names();
    match strongest_relations(&f.structure, z, &glo, &spec.pre, &spec.rely, which, cli.budget) {
        Ok(s) => {
            let items = s.render(&f.structure);
            if cli.json {
                say!("{}", json!({ "what": which, "size": items.len(), "items": items, "notes": notes }));
            } else {
                for i in &items {
                    say!("{i}");
                }
                say!("{} element(s)", items.len());
                for n in &notes {
                    say!("note: {n}");
                }
            }
            Ok(VALID)
        }
        Err(relycheck::sat::CheckError::Semantics(e @ SemError::Budget { .. })) => {
            report_resource(&e.to_string(), cli.json);
            Ok(RESOURCE)
        }
        Err(e) => Err(e.into()),
    }
}

fn report_resource(msg: &str, json: bool) {
    if json {
        say!("{}", json!({ "verdict": Verdict::ResourceExceeded, "message": msg }));
    } else {
        say!("verdict: {}\n{msg}", Verdict::ResourceExceeded);
    }
}

fn cmd_erase(f: &SourceFile, aux: Option<Vec<String>>, cli: &Cli) -> Res {
    let z = f.witness.as_ref().or(f.program.as_ref()).ok_or_else(|| InputError("nothing to erase".into()))?;
    let aux: BTreeSet<String> = match aux {
        Some(a) => a.into_iter().collect(),
        None => f.spec.as_ref().map(|s| s.spec.aux.clone()).unwrap_or_default(),
    };
    if let Some(v) = aux.iter().find(|v| f.structure.var_id(v).is_none()) {
        return Err(InputError(format!("`{v}` is not a declared variable")));
    }
    let plain = erase_auxiliary(z, &aux)?;
    let text = relycheck::syntax::program_text(&plain, Some(&f.structure));
    if cli.json {
        say!("{}", json!({ "program": program_inline(&plain) }));
    } else {
        say!("{text}");
    }
    if let (Some(p), true) = (&f.program, f.witness.is_some()) {
        if **p != *plain {
            eprintln!("warning: the erased witness differs from the file's program");
            return Ok(INVALID);
        }
    }
    Ok(VALID)
}

fn cmd_graph(f: &SourceFile, cli: &Cli) -> Res {
    let z = program(f)?;
    validated(f, z)?;
    let spec = &f.spec.as_ref().ok_or_else(|| InputError("the file has no `spec` section".into()))?.spec;
    spec.check_shape(&f.structure)?;
    let scope = spec.scope(&f.structure);
    let m = Machine::new(&f.structure, cli.budget);
    let built = initial_states(&f.structure, &scope, &spec.pre)
        .and_then(|init| build_config_graph(&m, z, &init, &Environment { rely: &spec.rely, scope: scope.clone() }));
    match built {
        Ok(g) => {
            let dot = g.to_dot(&f.structure);
            if cli.json {
                say!("{}", json!({ "emit": "dot", "stats": g.stats(), "graph": dot }));
            } else {
                OUT.with(|o| o.borrow_mut().push_str(&dot));
            }
            Ok(VALID)
        }
        Err(e @ SemError::Budget { .. }) => {
            report_resource(&e.to_string(), cli.json);
            Ok(RESOURCE)
        }
        Err(e) => Err(e.into()),
    }
}

fn cmd_discharge(f: &SourceFile, cli: &Cli) -> Res {
    if f.obligations.is_empty() {
        return Err(InputError("the file has no `valid` or `wf` obligations".into()));
    }
    let scope: BTreeSet<String> = match &f.scope {
        Some(s) => s.iter().cloned().collect(),
        None => f.structure.vars().iter().map(|v| v.name.clone()).collect(),
    };
    let d = Discharger::new(&f.structure);
    let mut all = true;
    let mut rows = Vec::new();
    for decl in &f.obligations {
        let claim = match decl.kind {
            ObligationKind::Valid => Claim::Valid(decl.expr.clone()),
            ObligationKind::Wf => Claim::WellFounded(decl.expr.clone()),
        };
        let ob = Obligation { claim, scope: scope.clone(), origin: decl.span.to_string() };
        let out = d.discharge(&ob)?;
        all &= out.holds;
        rows.push((ob, out));
    }
    if cli.json {
        let v: Vec<_> = rows
            .iter()
            .map(|(ob, out)| json!({ "line": ob.origin, "obligation": ob.text(Some(&f.structure)), "holds": out.holds, "witness": out.witness }))
            .collect();
        say!("{}", json!({ "verdict": if all { "valid" } else { "invalid" }, "obligations": v }));
    } else {
        for (ob, out) in &rows {
            let status = if out.holds { "holds" } else { "FAILS" };
            say!("{}: {status}: {}", ob.origin, ob.text(Some(&f.structure)));
            if let Some(w) = &out.witness {
                say!("    witness: {w}");
            }
        }
    }
    Ok(if all { VALID } else { INVALID })
}

fn run(cli: &Cli) -> Res {
    match &cli.command {
        Command::Check { file, mode, witness } => cmd_check(&load(file)?, *mode, witness.as_deref(), cli),
        Command::Prove { file, export_failed } => cmd_prove(&load(file)?, export_failed.as_deref(), cli),
        Command::Strongest { file, what } => cmd_strongest(&load(file)?, *what, cli),
        Command::Erase { file, aux } => cmd_erase(&load(file)?, aux.clone(), cli),
        Command::Graph { file, emit: Emit::Dot } => cmd_graph(&load(file)?, cli),
        Command::Discharge { file } => cmd_discharge(&load(file)?, cli),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { INPUT } else { VALID });
        }
    };
    let code = match run(&cli) {
        Ok(code) => code,
        Err(InputError(m)) => {
            if cli.json {
                say!("{}", json!({ "verdict": "input-error", "message": m }));
            } else {
                eprintln!("error: {m}");
            }
            INPUT
        }
    };
    flush();
    ExitCode::from(code)
}

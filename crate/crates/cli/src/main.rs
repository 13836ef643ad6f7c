use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use delas::model::{validate, Assignment, KripkeModel, PointedModel, RawEventModel, RawModel};
use delas::proof::{Derivation, SchemaId, System};
use delas::reduction::{translate_with, Strategy};
use delas::search::{
    find_countermodel_in, fuzz_schema, Bounds, FuzzReport, ModelClass, ModelSource, Verdict, CAVEAT,
};
use delas::semantics::{eval, explain, product};
use delas::syntax::{parse_formula_in, EventModel, Formula, ParseEnv, Signature};

#[derive(Parser)]
#[command(name = "delas", version, about = "Epistemic logic with assignments: evaluate, update, reduce, prove, falsify")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
enum Format {
    #[default]
    Human,
    Structured,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
enum StrategyArg {
    #[default]
    Compose,
    InnerFirst,
}

#[derive(clap::Args)]
struct Common {
    /// event model file whose name formulas may refer to; repeatable
    #[arg(long = "event", value_name = "FILE")]
    events: Vec<PathBuf>,
    #[arg(long, value_enum, default_value_t)]
    format: Format,
}

#[derive(clap::Args)]
struct SearchArgs {
    /// e.g. worlds=2,domain=2,agents=2,names=2,variables=2
    #[arg(long, default_value = "")]
    bounds: String,
    #[arg(long, default_value = "arbitrary")]
    class: ModelClass,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// sample this many models of exactly the bounded size instead of enumerating
    #[arg(long)]
    samples: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a formula at a world of a model
    Check {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        world: String,
        /// variable binding x=o; repeatable
        #[arg(long = "assign", value_name = "x=o")]
        assign: Vec<String>,
        /// print the clause-by-clause evaluation
        #[arg(long)]
        trace: bool,
        #[command(flatten)]
        common: Common,
        formula: String,
    },
    /// Write the product of a model with an event model
    Update {
        #[arg(long)]
        model: PathBuf,
        #[arg(long = "assign", value_name = "x=o")]
        assign: Vec<String>,
        /// write the product here instead of standard output
        #[arg(long)]
        output: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Translate a formula into an equivalent one without dynamic operators
    Reduce {
        /// print every rewrite step
        #[arg(long)]
        trace: bool,
        #[arg(long, value_enum, default_value_t)]
        strategy: StrategyArg,
        #[command(flatten)]
        common: Common,
        formula: String,
    },
    /// Check a derivation file
    Prove {
        #[command(flatten)]
        common: Common,
        file: PathBuf,
    },
    /// Search the bounded models for a countermodel
    Falsify {
        #[command(flatten)]
        search: SearchArgs,
        /// write the countermodel here
        #[arg(long)]
        output: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
        formula: String,
    },
    /// Search random axiom instances for countermodels
    Fuzz {
        /// proof system; repeatable, all by default
        #[arg(long = "system")]
        systems: Vec<String>,
        #[arg(long, default_value_t = 10)]
        count: usize,
        #[command(flatten)]
        search: SearchArgs,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
}

/// A command's answer: true/valid or false/countermodel.
type Answer = bool;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(true) => ExitCode::from(0),
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cmd: Command) -> Result<Answer> {
    match cmd {
        Command::Check {
            model,
            world,
            assign,
            trace,
            common,
            formula,
        } => cmd_check(&model, &world, &assign, trace, &common, &formula),
        Command::Update {
            model,
            assign,
            output,
            common,
        } => cmd_update(&model, &assign, output.as_deref(), &common),
        Command::Reduce {
            trace,
            strategy,
            common,
            formula,
        } => cmd_reduce(trace, strategy, &common, &formula),
        Command::Prove { common, file } => cmd_prove(&common, &file),
        Command::Falsify {
            search,
            output,
            common,
            formula,
        } => cmd_falsify(&search, output.as_deref(), &common, &formula),
        Command::Fuzz {
            systems,
            count,
            search,
            format,
        } => cmd_fuzz(&systems, count, &search, format),
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn load_model(path: &Path) -> Result<KripkeModel> {
    let text = read(path)?;
    let raw: RawModel = serde_json::from_str(&text).with_context(|| format!("{}: malformed model file", path.display()))?;
    if let Err(violations) = validate(&raw) {
        let list: Vec<String> = violations.iter().map(|v| v.to_string()).collect();
        bail!("{}: invalid model\n  {}", path.display(), list.join("\n  "));
    }
    KripkeModel::from_raw(&raw).with_context(|| path.display().to_string())
}

/// Adds each event file to `env`, in order, so later files may refer to
/// earlier ones.
fn load_events(mut env: ParseEnv, files: &[PathBuf]) -> Result<(ParseEnv, Vec<Arc<EventModel>>)> {
    let mut models = vec![];
    for path in files {
        let raw = RawEventModel::from_json(&read(path)?).with_context(|| path.display().to_string())?;
        let em = Arc::new(raw.build(&env).with_context(|| path.display().to_string())?);
        env = env.with_event_model(em.clone());
        models.push(em);
    }
    Ok((env, models))
}

fn open_env(common: &Common) -> Result<ParseEnv> {
    Ok(load_events(ParseEnv::new(Signature::open()), &common.events)?.0)
}

fn parse(text: &str, env: &ParseEnv) -> Result<Formula> {
    parse_formula_in(text, env).map_err(|e| anyhow!("formula: {e}"))
}

fn print_json(v: &Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("json serializes"));
}

fn model_value(m: &KripkeModel) -> Value {
    serde_json::from_str(&m.to_json()).expect("model json parses")
}

fn cmd_check(model: &Path, world: &str, assign: &[String], trace: bool, common: &Common, text: &str) -> Result<Answer> {
    let m = Arc::new(load_model(model)?);
    let w = m
        .world_index(world)
        .ok_or_else(|| anyhow!("no world `{world}` in {}", model.display()))?;
    let sigma = Assignment::parse_bindings(&m, assign)?;
    let (env, _) = load_events(ParseEnv::new(m.signature()), &common.events)?;
    let f = parse(text, &env)?;
    let value = eval(&PointedModel::new(m.clone(), w, sigma.clone()), &f)?;
    let tree = if trace { Some(explain(&m, w, &sigma, &f)?) } else { None };
    match common.format {
        Format::Human => {
            println!("{value}");
            if let Some(t) = &tree {
                print!("{t}");
            }
        }
        Format::Structured => {
            let mut out = json!({
                "formula": f.to_string(),
                "world": world,
                "assignment": sigma.display(&m).to_string(),
                "value": value,
            });
            if let Some(t) = &tree {
                out["explanation"] = explanation_value(t);
            }
            print_json(&out);
        }
    }
    Ok(value)
}

fn explanation_value(e: &delas::semantics::Explanation) -> Value {
    json!({
        "formula": e.formula,
        "world": e.world,
        "value": e.value,
        "note": e.note,
        "children": e.children.iter().map(explanation_value).collect::<Vec<_>>(),
    })
}

fn cmd_update(model: &Path, assign: &[String], output: Option<&Path>, common: &Common) -> Result<Answer> {
    let m = load_model(model)?;
    let sigma = Assignment::parse_bindings(&m, assign)?;
    let (_, models) = load_events(ParseEnv::new(m.signature()), &common.events)?;
    let [em] = models.as_slice() else {
        bail!("update takes exactly one --event file, got {}", models.len());
    };
    let p = product(&m, &sigma, em)?;
    if p.is_empty() {
        eprintln!("warning: no event is executable at any world; the product is empty");
    }
    let text = p.to_json();
    match output {
        Some(path) => fs::write(path, &text).with_context(|| format!("cannot write {}", path.display()))?,
        None => println!("{text}"),
    }
    if common.format == Format::Human && output.is_some() {
        println!("{} worlds written", p.num_worlds());
    }
    Ok(true)
}

fn cmd_reduce(trace: bool, strategy: StrategyArg, common: &Common, text: &str) -> Result<Answer> {
    let env = open_env(common)?;
    let f = parse(text, &env)?;
    let strategy = match strategy {
        StrategyArg::Compose => Strategy::Compose,
        StrategyArg::InnerFirst => Strategy::InnerFirst,
    };
    let (t, steps) = translate_with(&f, strategy, trace);
    match common.format {
        Format::Human => {
            if trace {
                print!("{steps}");
            }
            println!("{t}");
        }
        Format::Structured => {
            let mut out = json!({ "input": f.to_string(), "output": t.to_string() });
            if trace {
                out["trace"] = serde_json::from_str(&steps.to_json()).expect("trace json parses");
            }
            print_json(&out);
        }
    }
    Ok(true)
}

fn cmd_prove(common: &Common, file: &Path) -> Result<Answer> {
    let text = read(file)?;
    let env = open_env(common)?;
    let result = Derivation::parse(&text, &env).and_then(|d| d.check());
    match (&result, common.format) {
        (Ok(thm), Format::Human) => {
            println!("ok {}: {}", thm.system, thm.conclusion);
            for p in &thm.premises {
                println!("  from premise {p}");
            }
        }
        (Err(e), Format::Human) => println!("rejected: {e}"),
        (Ok(thm), Format::Structured) => print_json(&json!({
            "ok": true,
            "system": thm.system.name(),
            "conclusion": thm.conclusion.to_string(),
            "premises": thm.premises.iter().map(|p| p.to_string()).collect::<Vec<_>>(),
        })),
        (Err(e), Format::Structured) => print_json(&json!({
            "ok": false,
            "line": e.line(),
            "error": e.to_string(),
        })),
    }
    Ok(result.is_ok())
}

fn source(search: &SearchArgs) -> Result<ModelSource> {
    let bounds = Bounds::default().with_class(search.class).parse_overrides(&search.bounds)?;
    Ok(match search.samples {
        Some(count) => ModelSource::Sampled {
            bounds,
            count,
            seed: search.seed,
        },
        None => ModelSource::Exhaustive(bounds),
    })
}

fn cmd_falsify(search: &SearchArgs, output: Option<&Path>, common: &Common, text: &str) -> Result<Answer> {
    let env = open_env(common)?;
    let f = parse(text, &env)?;
    let src = source(search)?;
    let verdict = find_countermodel_in(&f, &src)?;
    if let (Some(path), Some(pm)) = (output, verdict.countermodel()) {
        fs::write(path, pm.model.to_json()).with_context(|| format!("cannot write {}", path.display()))?;
    }
    match (&verdict, common.format) {
        (Verdict::ValidWithinBounds { checked }, Format::Human) => {
            println!("valid within bounds: {checked} pointed models checked ({})", src.bounds());
            println!("{CAVEAT}");
        }
        (Verdict::Countermodel(pm), Format::Human) => println!("countermodel: {pm}"),
        (Verdict::ValidWithinBounds { checked }, Format::Structured) => print_json(&json!({
            "verdict": "valid within bounds",
            "checked": checked,
            "bounds": src.bounds().to_string(),
            "caveat": CAVEAT,
        })),
        (Verdict::Countermodel(pm), Format::Structured) => print_json(&json!({
            "verdict": "countermodel",
            "world": pm.model.world_id(pm.world).to_string(),
            "assignment": pm.assignment.display(&pm.model).to_string(),
            "model": model_value(&pm.model),
        })),
    }
    Ok(verdict.is_valid())
}

fn cmd_fuzz(systems: &[String], count: usize, search: &SearchArgs, format: Format) -> Result<Answer> {
    let systems: Vec<System> = if systems.is_empty() {
        System::ALL.to_vec()
    } else {
        systems.iter().map(|s| s.parse().map_err(|e: String| anyhow!(e))).collect::<Result<_>>()?
    };
    let base = source(search)?;
    let mut epistemic = base.clone();
    match &mut epistemic {
        ModelSource::Exhaustive(b) | ModelSource::Sampled { bounds: b, .. } => b.class = ModelClass::Epistemic,
    }
    let mut report = FuzzReport::default();
    for &system in &systems {
        for schema in system.schemas() {
            let src = if SchemaId::is_s5(schema) { &epistemic } else { &base };
            fuzz_schema(system, schema, count, std::slice::from_ref(src), search.seed, &mut report);
        }
    }
    match format {
        Format::Human => {
            print!("{report}");
            if report.is_clean() {
                println!("{CAVEAT}");
            }
        }
        Format::Structured => {
            let mut out = report.to_json();
            out["caveat"] = json!(CAVEAT);
            print_json(&out);
        }
    }
    Ok(report.is_clean())
}

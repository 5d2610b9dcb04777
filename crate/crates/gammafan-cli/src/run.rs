//! Command driver. Reports go to stdout as JSON, artifacts to files.
//!
//! Exit codes: 0 success, 1 verified negative verdict, 2 engine exhaustion,
//! 3 input error.

use std::path::PathBuf;

use clap::{Parser, Subcommand};
use gammafan::completion::{
    complete_admissible, complete_rational, replay, verify_completion_seeded, EngineConfig, TraceStep,
};
use gammafan::fixtures;
use gammafan::gamma::{finite_type, is_admissible_fan, ValueGroup};
use gammafan::polyhedra::fan::{pullback, Ambient};
use gammafan::reduction::reduce;
use gammafan::toric::{algebra_presentation, dual_complex, semistable_necessary, Necessary};
use gammafan::Error;
use serde_json::{json, Value};

use crate::format::{self, Loaded};
use crate::render::{render, RenderOptions};

pub const OK: i32 = 0;
pub const NEGATIVE: i32 = 1;
pub const EXHAUSTED: i32 = 2;
pub const INPUT_ERROR: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "gammafan", version, about = "Exact fans over ordered value groups")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Seed for the sampling part of completeness checks.
    #[arg(long, global = true, default_value_t = 0x5EED)]
    pub seed: u64,
    /// Maximum number of cones the completion engine may add.
    #[arg(long, global = true, default_value_t = 10_000)]
    pub engine_cap: usize,
    /// Comma-separated strategy order, e.g. `star-join,contact-fill,sliver-fill`.
    #[arg(long, global = true)]
    pub strategy: Option<String>,
    /// Trace file (JSON) to replay instead of running the engine.
    #[arg(long, global = true)]
    pub replay: Option<PathBuf>,
    /// Refinement depth used to place symbolic coordinates in figures.
    #[arg(long, global = true, default_value_t = 24)]
    pub render_depth: u32,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Admissibility, fan axiom, completeness and finite type.
    Check {
        /// Fan document; `-` or nothing reads stdin.
        input: Option<PathBuf>,
        /// Verify the input as a completion of this fan.
        #[arg(long)]
        against: Option<PathBuf>,
    },
    /// Lift to a rational fan whose pullback is the input.
    Reduce {
        input: Option<PathBuf>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Complete the fan; the verified completion is part of the report.
    Complete {
        input: Option<PathBuf>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Dual complex, semistability test, segment models and presentations.
    ToricReport { input: Option<PathBuf> },
    /// Draw Π (or the fan, for a full ambient space) as SVG.
    Render {
        input: Option<PathBuf>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Print a built-in fixture as a fan document.
    Fixture {
        /// dart, dart-lift, dart-completion, badnorm, thm45 or model.
        name: String,
        /// Integer parameters: badnorm N R, model M N GAMMA.
        params: Vec<i64>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::CompletionEngineExhausted { .. } | Error::BracketSearchExhausted(_) | Error::OracleStall(_) => EXHAUSTED,
        Error::ParseError { .. }
        | Error::SemanticError(_)
        | Error::DimensionMismatch { .. }
        | Error::BasisMismatch
        | Error::WrongAmbient
        | Error::DimensionTooLarge(_)
        | Error::TrivialGamma => INPUT_ERROR,
        _ => NEGATIVE,
    }
}

fn error_report(command: &str, e: &Error) -> Value {
    let mut v = json!({
        "command": command,
        "status": match exit_code(e) { EXHAUSTED => "exhausted", INPUT_ERROR => "input-error", _ => "negative" },
        "error": e.to_string(),
    });
    match e {
        Error::CompletionEngineExhausted { steps, reason, trace } => {
            v["steps"] = json!(steps);
            v["reason"] = json!(reason);
            v["trace"] = Value::Array(trace.iter().map(|s| serde_json::from_str(s).unwrap_or(Value::String(s.clone()))).collect());
        }
        Error::BracketSearchExhausted(n) => {
            v["reason"] = json!(format!("reduction could not bracket a ratio of value-group elements after {n} attempts"));
            v["trace"] = json!([]);
        }
        Error::ParseError { line, column, .. } => {
            v["line"] = json!(line);
            v["column"] = json!(column);
        }
        _ => {}
    }
    v
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report serializes");
    s.push('\n');
    s
}

fn io_err(p: &std::path::Path, e: std::io::Error) -> Error {
    Error::SemanticError(format!("{}: {e}", p.display()))
}

struct Driver<'a> {
    cli: &'a Cli,
    stdin: &'a mut dyn FnMut() -> std::io::Result<String>,
}

impl Driver<'_> {
    fn read(&mut self, p: &Option<PathBuf>) -> gammafan::Result<String> {
        match p {
            Some(path) if path.as_os_str() != "-" => std::fs::read_to_string(path).map_err(|e| io_err(path, e)),
            _ => (self.stdin)().map_err(|e| Error::SemanticError(format!("stdin: {e}"))),
        }
    }

    fn load(&mut self, p: &Option<PathBuf>) -> gammafan::Result<Loaded> {
        let text = self.read(p)?;
        format::parse(&text)
    }

    fn engine(&self) -> gammafan::Result<EngineConfig> {
        let mut cfg = EngineConfig { cap: self.cli.engine_cap, ..EngineConfig::default() };
        if let Some(s) = &self.cli.strategy {
            cfg.order = EngineConfig::parse_order(s)?;
        }
        Ok(cfg)
    }

    fn check(&mut self, input: &Option<PathBuf>, against: &Option<PathBuf>) -> gammafan::Result<(i32, Value)> {
        let l = self.load(input)?;
        let axiom = l.fan.check_axiom()?;
        let adm = match is_admissible_fan(&l.fan, &l.gamma) {
            Ok(r) => serde_json::to_value(&r).expect("serializes"),
            Err(e) => json!({ "verdict": false, "error": e.to_string() }),
        };
        let admissible = adm["verdict"].as_bool().unwrap_or(false);
        let completeness = l.fan.completeness_seeded(self.cli.seed);
        let (ft, bad) = finite_type(&l.fan, &l.gamma);
        let mut report = json!({
            "command": "check",
            "status": "ok",
            "admissible": admissible,
            "fan_axiom": axiom.is_none(),
            "complete": completeness.complete,
            "finite_type": ft,
            "maximal_cones": l.fan.maximal().len(),
            "admissibility": adm,
            "completeness": completeness,
            "finite_type_witness": bad.iter().map(|p| p.iter().map(|x| x.to_text()).collect::<Vec<_>>()).collect::<Vec<_>>(),
        });
        if let Some((i, j)) = axiom {
            let name = |k: usize| l.label_of(&l.fan.maximal()[k]).unwrap_or("?").to_string();
            report["fan_axiom_witness"] = json!([name(i), name(j)]);
        }
        let mut negative = axiom.is_some() || !admissible || !ft;
        if let Some(a) = against {
            let base = self.load(&Some(a.clone()))?;
            let v = verify_completion_seeded(&base.fan, &l.fan, self.cli.seed);
            negative |= !v.ok;
            report["completion_of"] = json!(a.display().to_string());
            report["completion_verdict"] = serde_json::to_value(&v).expect("serializes");
        }
        if negative {
            report["status"] = json!("negative");
        }
        Ok((if negative { NEGATIVE } else { OK }, report))
    }

    fn reduce(&mut self, input: &Option<PathBuf>, output: &Option<PathBuf>) -> gammafan::Result<(i32, Value)> {
        let l = self.load(input)?;
        let red = reduce(&l.fan, &l.gamma)?;
        let lifted = Loaded { fan: red.lifted.clone(), gamma: ValueGroup::integers(), named: Vec::new(), metadata: Default::default() };
        let doc = format::emit(&lifted);
        if let Some(p) = output {
            std::fs::write(p, format::to_text(&doc)).map_err(|e| io_err(p, e))?;
        }
        let back = pullback(&red.lifted, &red.gamma_bar)?;
        Ok((
            OK,
            json!({
                "command": "reduce",
                "status": "ok",
                "summary": red.summary(),
                "pullback_equals_input": back.same_as(&l.fan),
                "document": doc,
            }),
        ))
    }

    fn replay_trace(&mut self, l: &Loaded, path: &PathBuf) -> gammafan::Result<(gammafan::polyhedra::fan::Fan, Vec<TraceStep>)> {
        let text = std::fs::read_to_string(path).map_err(|e| io_err(path, e))?;
        let v: Value = serde_json::from_str(&text).map_err(|e| Error::ParseError { line: e.line(), column: e.column(), msg: e.to_string() })?;
        let steps = v.get("trace").cloned().unwrap_or(v);
        let trace: Vec<TraceStep> = serde_json::from_value(steps).map_err(|e| Error::SemanticError(format!("trace: {e}")))?;
        let fan = match l.fan.ambient() {
            Ambient::Full => replay(&l.fan, &trace)?,
            Ambient::HalfSpace => {
                let red = reduce(&l.fan, &l.gamma)?;
                pullback(&replay(&red.lifted, &trace)?, &red.gamma_bar)?
            }
        };
        Ok((fan, trace))
    }

    fn complete(&mut self, input: &Option<PathBuf>, output: &Option<PathBuf>) -> gammafan::Result<(i32, Value)> {
        let l = self.load(input)?;
        let cfg = self.engine()?;
        let (fan, trace, reduction) = if let Some(path) = self.cli.replay.clone() {
            let (fan, trace) = self.replay_trace(&l, &path)?;
            (fan, trace, Value::Null)
        } else {
            match l.fan.ambient() {
                Ambient::Full => {
                    let r = complete_rational(&l.fan, &cfg)?;
                    (r.fan, r.trace, Value::Null)
                }
                Ambient::HalfSpace => {
                    let r = complete_admissible(&l.fan, &l.gamma, &cfg)?;
                    let trace = r.report.map(|x| x.trace).unwrap_or_default();
                    (r.fan, trace, serde_json::to_value(&r.reduction).expect("serializes"))
                }
            }
        };
        let verdict = verify_completion_seeded(&l.fan, &fan, self.cli.seed);
        if !verdict.ok {
            return Err(Error::CompletionEngineExhausted {
                steps: trace.len(),
                reason: format!("output fails verification: {:?}", verdict.witness),
                trace: trace.iter().map(|s| serde_json::to_string(s).unwrap_or_default()).collect(),
            });
        }
        let admissible = l.fan.ambient() == Ambient::Full || is_admissible_fan(&fan, &l.gamma).map(|r| r.verdict).unwrap_or(false);
        let mut out = l.derived(fan, "added");
        out.metadata.notes.push("completion verified: fan axiom, containment, completeness".into());
        let doc = format::emit(&out);
        if let Some(p) = output {
            std::fs::write(p, format::to_text(&doc)).map_err(|e| io_err(p, e))?;
        }
        Ok((
            OK,
            json!({
                "command": "complete",
                "status": "ok",
                "maximal_cones": out.fan.maximal().len(),
                "admissible": admissible,
                "verdict": verdict,
                "reduction": reduction,
                "trace": trace,
                "document": doc,
            }),
        ))
    }

    fn toric(&mut self, input: &Option<PathBuf>) -> gammafan::Result<(i32, Value)> {
        let l = self.load(input)?;
        if l.fan.ambient() != Ambient::HalfSpace {
            return Err(Error::SemanticError("toric-report needs a fan in N x R>=0".into()));
        }
        let dc = dual_complex(&l.fan, &l.gamma);
        let top = dc.faces.iter().map(|f| f.dim + 1).max().unwrap_or(0);
        let counts: Vec<usize> = (0..top).map(|k| dc.count(k)).collect();
        let semi = semistable_necessary(&l.fan, &l.gamma);
        let per_cone: Vec<Value> = l
            .fan
            .maximal()
            .iter()
            .zip(&semi.models)
            .map(|(c, m)| {
                let pres = match algebra_presentation(c, &l.gamma) {
                    Ok(p) => serde_json::to_value(&p).expect("serializes"),
                    Err(e) => json!({ "error": e.to_string() }),
                };
                json!({
                    "name": l.label_of(c).unwrap_or("?"),
                    "segment_model": m,
                    "presentation": pres,
                })
            })
            .collect();
        let fails = semi.verdict == Necessary::FailsNecessary;
        Ok((
            if fails { NEGATIVE } else { OK },
            json!({
                "command": "toric-report",
                "status": if fails { "negative" } else { "ok" },
                "bounded_face_counts": counts,
                "dual_complex": dc,
                "semistability": semi,
                "cones": per_cone,
            }),
        ))
    }

    fn render(&mut self, input: &Option<PathBuf>, output: &Option<PathBuf>) -> gammafan::Result<(i32, Value, Option<String>)> {
        let l = self.load(input)?;
        let svg = render(&l, &RenderOptions { depth: self.cli.render_depth, ..RenderOptions::default() })?;
        match output {
            Some(p) => {
                std::fs::write(p, &svg).map_err(|e| io_err(p, e))?;
                Ok((OK, json!({ "command": "render", "status": "ok", "written": p.display().to_string() }), None))
            }
            None => Ok((OK, Value::Null, Some(svg))),
        }
    }
}

/// Runs one command line; `stdin` is called only when a command reads standard input.
pub fn run(args: &[String], stdin: &mut dyn FnMut() -> std::io::Result<String>) -> Outcome {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { INPUT_ERROR } else { OK };
            let text = e.render().to_string();
            return if code == OK {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            };
        }
    };
    let mut d = Driver { cli: &cli, stdin };
    let (name, result): (&str, gammafan::Result<(i32, Value, Option<String>)>) = match &cli.command {
        Command::Check { input, against } => ("check", d.check(input, against).map(|(c, v)| (c, v, None))),
        Command::Reduce { input, output } => ("reduce", d.reduce(input, output).map(|(c, v)| (c, v, None))),
        Command::Complete { input, output } => ("complete", d.complete(input, output).map(|(c, v)| (c, v, None))),
        Command::ToricReport { input } => ("toric-report", d.toric(input).map(|(c, v)| (c, v, None))),
        Command::Render { input, output } => ("render", d.render(input, output)),
        Command::Fixture { name, params } => (
            "fixture",
            fixtures::by_name(name, params).map(|f| (OK, Value::Null, Some(format::emit_text(&Loaded::from_fixture(&f))))),
        ),
    };
    match result {
        Ok((code, _, Some(raw))) => Outcome { code, stdout: raw, stderr: String::new() },
        Ok((code, v, None)) => Outcome { code, stdout: pretty(&v), stderr: String::new() },
        Err(e) => Outcome { code: exit_code(&e), stdout: pretty(&error_report(name, &e)), stderr: format!("gammafan {name}: {e}\n") },
    }
}

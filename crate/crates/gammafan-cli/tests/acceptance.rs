//! One line per acceptance criterion. Exits nonzero if any fails.

#[path = "../../gammafan/tests/common/mod.rs"]
mod common;

use std::io::Write;
use std::process::{Command, Stdio};
use std::time::Instant;

use gammafan::completion::{complete_admissible, verify_completion, EngineConfig, Strategy};
use gammafan::fixtures::{bad_normalization_fan, dart, dart_basis, dart_completion, dart_lift, z_sqrt2};
use gammafan::gamma::finite_type;
use gammafan::polyhedra::fan::pullback;
use gammafan::reduction::reduce;
use gammafan::toric::{recognize_segment_model, semistable_necessary, Necessary};
use gammafan::{Rat, Scalar};

type Outcome = Result<String, String>;

fn dart_reduction() -> Outcome {
    let d = dart().map_err(|e| e.to_string())?;
    let (_, a, b) = dart_basis().map_err(|e| e.to_string())?;
    let r = reduce(&d.fan, &d.gamma).map_err(|e| e.to_string())?;
    if r.k != 2 || r.gamma_bar != vec![a, b] {
        return Err(format!("k = {}, gamma_bar = {:?}", r.k, r.gamma_bar));
    }
    if !pullback(&r.lifted, &r.gamma_bar).map_err(|e| e.to_string())?.same_as(&d.fan) {
        return Err("pullback of the lifted fan differs from the dart".into());
    }
    let lift = dart_lift().map_err(|e| e.to_string())?;
    if !pullback(&lift.fan, &r.gamma_bar).map_err(|e| e.to_string())?.same_as(&d.fan) {
        return Err("pullback of the fixed lift differs from the dart".into());
    }
    Ok(format!("k = 2, {} lifted maximal cones", r.lifted.maximal().len()))
}

fn dart_completion_verifies() -> Outcome {
    let d = dart().map_err(|e| e.to_string())?;
    let c = dart_completion().map_err(|e| e.to_string())?;
    let v = verify_completion(&d.fan, &c.fan);
    if v.ok {
        Ok(format!("{} maximal cones", c.fan.maximal().len()))
    } else {
        Err(format!("{:?}", v.witness))
    }
}

fn completion_engine() -> Outcome {
    let runs = common::completion_suite(14, 6, 0x5EED);
    let slowest = runs.iter().map(|r| r.seconds).fold(0.0, f64::max);
    if runs.len() < 20 || runs.iter().filter(|r| r.label.starts_with("2d")).count() < 5 {
        return Err(format!("only {} instances", runs.len()));
    }
    for r in &runs {
        if let Some(e) = &r.error {
            return Err(format!("{}: {e}", r.label));
        }
        if r.seconds >= 120.0 {
            return Err(format!("{} took {:.1}s", r.label, r.seconds));
        }
    }
    Ok(format!("{} instances, slowest {slowest:.2}s", runs.len()))
}

fn farkas() -> Outcome {
    let valid = common::farkas_suite(500, 0x5EED)?;
    Ok(format!("500 instances agree with the vertex oracle, {valid} certificates"))
}

fn bad_normalization() -> Outcome {
    let g = z_sqrt2().map_err(|e| e.to_string())?;
    let gamma = Scalar::one();
    let half = Scalar::rational(Rat::new(1.into(), 2.into()));
    for n in 1..=3 {
        let f = bad_normalization_fan(n, 2, &gamma, &g).map_err(|e| e.to_string())?;
        let (ok, witnesses) = finite_type(&f, &g);
        if ok {
            return Err(format!("n = {n}: reported finite type"));
        }
        if !witnesses.iter().any(|v| v.iter().any(|x| *x == half)) {
            return Err(format!("n = {n}: no witness coordinate 1/2"));
        }
    }
    Ok("n = 1, 2, 3 rejected with a 1/2 vertex".into())
}

fn dart_toric() -> Outcome {
    let d = dart().map_err(|e| e.to_string())?;
    let rep = semistable_necessary(&d.fan, &d.gamma);
    if rep.verdict != Necessary::PassesNecessaryInconclusive {
        return Err(format!("verdict {:?}", rep.verdict));
    }
    let orders = [
        vec![Strategy::StarJoin, Strategy::ContactFill, Strategy::SliverFill],
        vec![Strategy::ContactFill, Strategy::StarJoin, Strategy::SliverFill],
        vec![Strategy::SliverFill, Strategy::ContactFill, Strategy::StarJoin],
    ];
    let mut done = 0;
    for order in orders {
        let cfg = EngineConfig { order: order.clone(), ..EngineConfig::default() };
        let Ok(c) = complete_admissible(&d.fan, &d.gamma, &cfg) else { continue };
        done += 1;
        if !c.fan.maximal().iter().any(|m| m.rays().len() > m.dim()) {
            return Err(format!("order {order:?}: every maximal cone is simplicial"));
        }
    }
    if done == 0 {
        return Err("no strategy order completed the dart".into());
    }
    let models = d.cones.iter().filter(|c| recognize_segment_model(c, &d.gamma).is_some()).count();
    if models != 4 {
        return Err(format!("{models} of 4 cones recognized"));
    }
    Ok(format!("{done} completions, each with a non-simplicial cone"))
}

fn thm45_exhausts() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_gammafan");
    let fx = Command::new(bin).args(["fixture", "thm45"]).output().map_err(|e| e.to_string())?;
    if !fx.status.success() {
        return Err(format!("fixture exited {:?}", fx.status.code()));
    }
    let mut child = Command::new(bin)
        .arg("complete")
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .map_err(|e| e.to_string())?;
    child.stdin.take().unwrap().write_all(&fx.stdout).map_err(|e| e.to_string())?;
    let out = child.wait_with_output().map_err(|e| e.to_string())?;
    match out.status.code() {
        Some(2) => Ok("exit 2".into()),
        c => Err(format!("exit {c:?}")),
    }
}

fn ordered_field() -> Outcome {
    common::infinitesimal_sums(1000, 0x5EED)?;
    common::slope_zero_edges(50, 0x5EED)?;
    let cli = thm45_exhausts()?;
    Ok(format!("1000 triples, 50 edges, thm45 complete {cli}"))
}

fn invariant_suites() -> Outcome {
    common::dd_round_trips(200)?;
    common::fan_axiom_checks(200)?;
    common::separation_post_equalities(200)?;
    common::thin_cone_postconditions(200)?;
    common::solvability_agreement(200)?;
    Ok("5 suites x 200 cases".into())
}

fn main() {
    let criteria: [(&str, f64, fn() -> Outcome); 8] = [
        ("dart reduction and pullback", 10.0, dart_reduction),
        ("dart completion verifies", 10.0, dart_completion_verifies),
        ("completion engine on random fans and the dart", 20.0 * 120.0, completion_engine),
        ("farkas certificates", 60.0, farkas),
        ("bad normalization is not of finite type", 5.0, bad_normalization),
        ("dart toric checks", 30.0, dart_toric),
        ("ordered field and slope checks", 30.0, ordered_field),
        ("invariant suites", 120.0, invariant_suites),
    ];
    let mut failed = 0;
    for (i, (name, limit, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let r = f();
        let secs = t.elapsed().as_secs_f64();
        let (tag, msg) = match r {
            Ok(m) if secs < *limit => ("PASS", m),
            Ok(m) => ("FAIL", format!("{m}; over the {limit}s limit")),
            Err(e) => ("FAIL", e),
        };
        if tag == "FAIL" {
            failed += 1;
        }
        println!("criterion {} {tag} [{secs:.2}s / {limit}s] {name}: {msg}", i + 1);
    }
    if failed > 0 {
        eprintln!("{failed} criteria failed");
        std::process::exit(1);
    }
}

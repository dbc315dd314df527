use cantordiff::dimension::{build_automaton, dimension_of, is_finite_type, DEFAULT_STATE_BUDGET};
use cantordiff::full_interval::{analyze, is_full, DeclaredRatio};
use cantordiff::ifs::{generate_ifs, CoverageOptions, LineIfs};
use cantordiff::nonlinear::{
    certificate_smoke_test, interval_certificate, regularly_linked, GalleryExample, LinkRange,
};
use cantordiff::render::{interval_stack, plane_regions};
use cantordiff::renorm::{build_recurrent_set, membership, verify_recurrence};
use cantordiff::scalar::to_f64;
use cantordiff::{Error, Scalar};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::config::{self, RunConfig};
use crate::json::{self, envelope, interval, interval_set, scalar, scalars};
use crate::Command;

pub const BUDGET_ENV: &str = "CANTORDIFF_BUDGET";
const COVER_BUDGET: usize = 200_000;
const MEMBER_BUDGET: usize = 100_000;
const SWEEP_STATE_BUDGET: usize = 2_000;
const SWEEP_DEPTH: usize = 4;
const SWEEP_CLASS_CAP: usize = 2_000_000;
const SMOKE_EXTRA_DEPTH: u32 = 10;

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
    /// Output written to stdout before exiting.
    pub partial: Option<String>,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Budget { .. } | Error::Undecided(_) => 3,
            Error::Invariant(_) => 4,
            _ => 2,
        };
        Failure { code, message: e.to_string(), partial: None }
    }
}

type Outcome = std::result::Result<String, Failure>;

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
    s.push('\n');
    s
}

fn with_partial(code: u8, message: String, v: &Value) -> Failure {
    Failure { code, message, partial: Some(pretty(v)) }
}

/// Explicit flag, else `CANTORDIFF_BUDGET`, else the command default.
fn budget(flag: Option<usize>, default: usize) -> Result<usize, Failure> {
    if let Some(b) = flag {
        return Ok(b);
    }
    match std::env::var(BUDGET_ENV) {
        Ok(text) => text.trim().parse().map_err(|_| {
            Failure::from(Error::Parse(format!("{BUDGET_ENV} must be a positive integer, got '{text}'")))
        }),
        Err(_) => Ok(default),
    }
}

fn ifs_json(ifs: &LineIfs) -> Value {
    let prov = ifs.provenance().map(|p| json!({ "lambda": scalar(&p.lambda), "n0": p.n0, "m0": p.m0 }));
    json!({
        "ratio": scalar(ifs.ratio()),
        "hull": interval(ifs.hull()),
        "maps": ifs.offsets().iter().map(|b| json!({ "ratio": scalar(ifs.ratio()), "offset": scalar(b) })).collect::<Vec<_>>(),
        "expanding_offsets": scalars(&ifs.expanding_offsets()),
        "provenance": prov,
    })
}

pub fn run(command: Command) -> Outcome {
    match command {
        Command::Ifs { pair, lambda } => {
            let cfg = config::load(&pair)?;
            let lambda = cfg.lambda(lambda.as_deref())?;
            let ifs = generate_ifs(&cfg.pair, &lambda)?;
            Ok(pretty(&envelope("ifs", &cfg, json!({ "lambda": scalar(&lambda), "ifs": ifs_json(&ifs) }))))
        }
        Command::Cover { pair, lambda, depth, budget: b } => cover(&config::load(&pair)?, lambda, depth, b),
        Command::Member { pair, t, s, budget: b } => member(&config::load(&pair)?, &t, s, b),
        Command::Full { pair, lambda, ratio, sweep } => full(&config::load(&pair)?, lambda, ratio, sweep),
        Command::Dim { pair, lambda, budget: b, emit } => dim(&config::load(&pair)?, lambda, b, emit),
        Command::Recur { pair, grid } => recur(&config::load(&pair)?, grid),
        Command::Nonlinear { example, pair, samples, seed } => nonlinear(&example, pair, samples, seed),
        Command::Linked { pair, range } => {
            let cfg = config::load(&pair)?;
            let (a, b) = config::split_pair(&range, "--range")?;
            let range = LinkRange::new(cfg.scalar(&a)?, cfg.scalar(&b)?)?;
            let report = regularly_linked(&cfg.pair, &range)?;
            Ok(pretty(&envelope(
                "linked",
                &cfg,
                json!({
                    "range": [scalar(&range.m1), scalar(&range.m2)],
                    "linked": report.linked,
                    "connected": report.connected,
                    "pairs_consistent": report.pairs_consistent,
                    "crossings": scalars(&report.crossings),
                    "disconnected_at": report.disconnected_at.as_ref().map(scalar),
                    "failing_pair": report.failing_pair,
                }),
            )))
        }
        Command::Sweep { pair, from, to, count, budget: b } => {
            let cfg = config::load(&pair)?;
            let xs = config::sample(&cfg.scalar(&from)?, &cfg.scalar(&to)?, count)?;
            sweep(&cfg, &xs, budget(b, SWEEP_STATE_BUDGET)?)
        }
        Command::Render { pair, lambda, depth, plane, out } => render(&config::load(&pair)?, lambda, depth, plane, out),
    }
}

fn cover(cfg: &RunConfig, lambda: Option<String>, depth: usize, b: Option<usize>) -> Outcome {
    let lambda = cfg.lambda(lambda.as_deref())?;
    let ifs = generate_ifs(&cfg.pair, &lambda)?;
    let opts = CoverageOptions { component_budget: budget(b, COVER_BUDGET)?, ..CoverageOptions::default() };
    let body = |r: &cantordiff::ifs::CoverageReport, complete: bool| {
        json!({
            "lambda": scalar(&lambda),
            "complete": complete,
            "depth": r.depth,
            "covered": r.covered,
            "gaps": interval_set(&r.gaps),
            "components": r.union.len(),
            "union_length": scalar(&r.union.total_length()),
            "class_count": r.class_count,
        })
    };
    match ifs.coverage(depth.max(1), &opts) {
        Ok(r) => Ok(pretty(&envelope("cover", cfg, body(&r, true)))),
        Err(e @ Error::Budget { .. }) => {
            // report the deepest level that still fits
            let reached = (1..depth).rev().find_map(|d| ifs.coverage(d, &opts).ok());
            let partial = match &reached {
                Some(r) => envelope("cover", cfg, body(r, false)),
                None => envelope("cover", cfg, json!({ "lambda": scalar(&lambda), "complete": false })),
            };
            Err(with_partial(3, format!("{e} at depth {depth}"), &partial))
        }
        Err(e) => Err(e.into()),
    }
}

fn member(cfg: &RunConfig, t: &str, s: Option<String>, b: Option<usize>) -> Outcome {
    let t = cfg.scalar(t)?;
    let s = cfg.lambda(s.as_deref())?;
    let b = budget(b, MEMBER_BUDGET)?;
    let orbit = membership(&t, &s, &cfg.pair, b, None)?;
    let line = generate_ifs(&cfg.pair, &s).ok().map(|ifs| ifs.attractor_membership(&t, b));
    if let (Some(line), true) = (&line, orbit.is_decided()) {
        if line.is_decided() && line.is_in() != orbit.is_in() {
            let v = json!({ "orbit_search": orbit, "line_system": line });
            return Err(with_partial(4, "the two membership procedures disagree".into(), &envelope("member", cfg, v)));
        }
    }
    let body = json!({
        "t": scalar(&t),
        "s": scalar(&s),
        "orbit_search": orbit,
        "line_system": line,
    });
    let out = envelope("member", cfg, body);
    let decided = orbit.is_decided() || line.as_ref().is_some_and(|m| m.is_decided());
    if decided {
        Ok(pretty(&out))
    } else {
        Err(with_partial(3, format!("membership undecided within a budget of {b}"), &out))
    }
}

fn parse_ratio(cfg: &RunConfig, text: &str) -> Result<DeclaredRatio, Failure> {
    if text == "irrational" {
        return Ok(DeclaredRatio::Irrational);
    }
    let parts: Vec<&str> = text.splitn(3, ':').collect();
    let [n0, m0, gamma] = parts[..] else {
        return Err(Error::Parse(format!("--ratio must be n0:m0:gamma or 'irrational', got '{text}'")).into());
    };
    let int = |s: &str| s.trim().parse::<u32>().map_err(|_| Failure::from(Error::Parse(format!("bad exponent '{s}'"))));
    Ok(DeclaredRatio::Rational { n0: int(n0)?, m0: int(m0)?, gamma: cfg.scalar(gamma)? })
}

fn full(cfg: &RunConfig, lambda: Option<String>, ratio: Option<String>, sweep: Option<String>) -> Outcome {
    let ratio = ratio.map(|r| parse_ratio(cfg, &r)).transpose()?;
    if let Some(spec) = sweep {
        let xs = config::parse_sweep(cfg, &spec)?;
        let rows: Vec<Vec<String>> = xs
            .par_iter()
            .map(|x| match is_full(&cfg.pair, x, ratio.clone()) {
                Ok(v) => {
                    let cert = serde_json::to_value(&v.certificate).expect("serializable");
                    let reason = cert["reason"].as_str().unwrap_or_default().to_string();
                    vec![x.render(), if v.full { "Full" } else { "NotFull" }.into(), reason]
                }
                Err(e) => vec![x.render(), "error".into(), e.to_string()],
            })
            .collect();
        return Ok(csv_text(&["lambda", "verdict", "certificate"], &rows));
    }
    let lambda = cfg.lambda(lambda.as_deref())?;
    let verdict = is_full(&cfg.pair, &lambda, ratio.clone())?;
    let below_thickness = cfg.pair.thickness_product()? < Scalar::one();
    let analysis = if below_thickness {
        let r = match ratio {
            Some(r) => r,
            None => DeclaredRatio::infer(&cfg.pair)?,
        };
        let a = analyze(&cfg.pair, r)?;
        Some(json!({
            "s0": scalar(&a.s0),
            "s1": scalar(&a.s1),
            "gamma": a.gamma().map(scalar),
            "gap": interval(&a.gap),
            "base": a.base.as_ref().map(interval),
            "invariant": interval_set(&a.invariant),
        }))
    } else {
        None
    };
    let body = json!({
        "lambda": scalar(&lambda),
        "verdict": if verdict.full { "Full" } else { "NotFull" },
        "decided_lambda": scalar(&verdict.decided_lambda),
        "certificate": verdict.certificate,
        "analysis": analysis,
    });
    Ok(pretty(&envelope("full", cfg, body)))
}

fn automaton_json(a: &cantordiff::dimension::NeighborAutomaton) -> Value {
    json!({
        "schema": json::SCHEMA,
        "expansion": a.expansion.render(),
        "complete": a.complete,
        "states": a.states.iter().map(|s| s.neighbors.iter().map(|x| x.render()).collect::<Vec<_>>()).collect::<Vec<_>>(),
        "matrix": a.matrix.dense(),
        "start": a.start,
    })
}

fn dim(cfg: &RunConfig, lambda: Option<String>, b: Option<usize>, emit: Option<String>) -> Outcome {
    let lambda = cfg.lambda(lambda.as_deref())?;
    let ifs = generate_ifs(&cfg.pair, &lambda)?;
    let finite = is_finite_type(&ifs);
    let b = budget(b, DEFAULT_STATE_BUDGET)?;
    let automaton = build_automaton(&ifs, b);
    if let Some(path) = &emit {
        std::fs::write(path, pretty(&automaton_json(&automaton)))
            .map_err(|e| Failure { code: 2, message: format!("cannot write {path}: {e}"), partial: None })?;
    }
    let result = dimension_of(&ifs, &automaton)?;
    let mut body = json!({
        "lambda": scalar(&lambda),
        "maps": ifs.len(),
        "finite_type": finite,
    });
    if let (Value::Object(o), Value::Object(r)) = (&mut body, serde_json::to_value(&result).expect("serializable")) {
        o.extend(r);
    }
    let out = envelope("dim", cfg, body);
    if result.complete {
        Ok(pretty(&out))
    } else {
        Err(with_partial(3, format!("automaton state budget of {b} exceeded; hdim is only bounded"), &out))
    }
}

fn recur(cfg: &RunConfig, grid: usize) -> Outcome {
    let region = build_recurrent_set(&cfg.pair)?;
    let report = verify_recurrence(&region, &cfg.pair, grid);
    let body = json!({
        "region": {
            "s_min": scalar(&region.s_min),
            "s_max": scalar(&region.s_max),
            "a": scalar(&region.a),
            "b": scalar(&region.b),
            "epsilon": scalar(&region.epsilon),
            "delta": scalar(&region.delta),
            "s0": scalar(&region.s0),
            "s_split": scalar(&region.s_split),
            "t_split": scalar(&region.t_split),
        },
        "grid": grid,
        "report": report,
    });
    let out = envelope("recur", cfg, body);
    if report.failures == 0 {
        Ok(pretty(&out))
    } else {
        Err(with_partial(4, format!("{} grid points failed to return", report.failures), &out))
    }
}

fn nonlinear(example: &str, pair: Option<String>, samples: usize, seed: u64) -> Outcome {
    let mut setup = GalleryExample::parse(example)?.setup();
    if let Some(p) = pair {
        setup.pair = config::load(&p)?.pair;
    }
    let cert = interval_certificate(&setup.f, &setup.g, &setup.pair, (&setup.base.0, &setup.base.1), &setup.range)?;
    let smoke = certificate_smoke_test(&cert, &setup.f, &setup.g, &setup.pair, samples.max(1), SMOKE_EXTRA_DEPTH, seed)?;
    let (ca, cb) = setup.pair.middles()?;
    let body = json!({
        "schema": json::SCHEMA,
        "command": "nonlinear",
        "example": example,
        "f": setup.f.name(),
        "g": setup.g.name(),
        "pair": { "alpha": ca.alpha().render(), "beta": cb.alpha().render() },
        "base_point": [scalar(&setup.base.0.value(ca)?), scalar(&setup.base.1.value(cb)?)],
        "digits": [&setup.base.0, &setup.base.1],
        "range": [scalar(&cert.range.m1), scalar(&cert.range.m2)],
        "depth": cert.depth,
        "words": cert.words,
        "square": [interval(&cert.square.0), interval(&cert.square.1)],
        "base_ratio": cert.base_ratio,
        "ratio_bounds": cert.ratio_bounds,
        "modulus": cert.modulus,
        "verdict": cert.verdict,
        "smoke": smoke,
    });
    if smoke.passed {
        Ok(pretty(&body))
    } else {
        Err(with_partial(4, "the smoke test found a gap wider than the certificate modulus".into(), &body))
    }
}

fn csv_text(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
}

fn sweep_row(cfg: &RunConfig, lambda: &Scalar, budget: usize) -> Vec<String> {
    let verdict = match is_full(&cfg.pair, lambda, None) {
        Ok(v) if v.full => "Full".to_string(),
        Ok(_) => "NotFull".to_string(),
        Err(e) => format!("error: {e}"),
    };
    let (mut low, mut high) = (String::new(), String::new());
    let counts = match generate_ifs(&cfg.pair, lambda) {
        Ok(ifs) => {
            if is_finite_type(&ifs).is_yes() {
                let automaton = build_automaton(&ifs, budget);
                if automaton.complete {
                    if let Ok(d) = dimension_of(&ifs, &automaton) {
                        low = format!("{:.9}", to_f64(d.hdim.lo()));
                        high = format!("{:.9}", to_f64(d.hdim.hi()));
                    }
                }
            }
            ifs.class_counts(SWEEP_DEPTH, SWEEP_CLASS_CAP)
                .iter()
                .map(|k| k.map_or("-".to_string(), |k| k.to_string()))
                .collect::<Vec<_>>()
                .join(";")
        }
        Err(e) => format!("error: {e}"),
    };
    vec![lambda.render(), verdict, counts, low, high]
}

fn sweep(cfg: &RunConfig, xs: &[Scalar], budget: usize) -> Outcome {
    let rows: Vec<Vec<String>> = xs.par_iter().map(|x| sweep_row(cfg, x, budget)).collect();
    Ok(csv_text(&["lambda", "verdict", "class_count", "dim_low", "dim_high"], &rows))
}

fn render(cfg: &RunConfig, lambda: Option<String>, depth: usize, plane: bool, out: Option<String>) -> Outcome {
    let svg = if plane {
        let region = build_recurrent_set(&cfg.pair).ok();
        plane_regions(&cfg.pair, region.as_ref())?
    } else {
        let lambda = cfg.lambda(lambda.as_deref())?;
        interval_stack(&generate_ifs(&cfg.pair, &lambda)?, depth, COVER_BUDGET)?
    };
    match out {
        None => Ok(svg),
        Some(path) => {
            std::fs::write(&path, &svg)
                .map_err(|e| Failure { code: 2, message: format!("cannot write {path}: {e}"), partial: None })?;
            Ok(pretty(&envelope("render", cfg, json!({ "out": path, "bytes": svg.len() }))))
        }
    }
}

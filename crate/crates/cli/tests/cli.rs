use std::path::PathBuf;
use std::process::{Command, Output};

use cantordiff::{FieldSpec, Scalar};
use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cantordiff"))
        .args(args)
        .env_remove("CANTORDIFF_BUDGET")
        .output()
        .expect("binary runs")
}

fn json_of(args: &[&str]) -> Value {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid json")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("cantordiff-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

/// Every `{exact, approx}` object re-parses to a scalar inside its enclosure.
fn check_scalars(v: &Value, field: Option<&std::sync::Arc<FieldSpec>>, seen: &mut usize) {
    match v {
        Value::Object(map) => {
            if let (Some(Value::String(exact)), Some(Value::Array(approx))) = (map.get("exact"), map.get("approx")) {
                let x = Scalar::parse(exact, field).expect("exact string parses");
                assert_eq!(x.render(), *exact, "render is canonical");
                let (lo, hi) = (approx[0].as_f64().unwrap(), approx[1].as_f64().unwrap());
                let f = x.to_f64();
                assert!(lo <= f && f <= hi, "{exact} outside [{lo}, {hi}]");
                *seen += 1;
            }
            map.values().for_each(|c| check_scalars(c, field, seen));
        }
        Value::Array(items) => items.iter().for_each(|c| check_scalars(c, field, seen)),
        _ => {}
    }
}

#[test]
fn scalars_round_trip() {
    let golden = FieldSpec::golden();
    let cases: [(&[&str], Option<&std::sync::Arc<FieldSpec>>); 4] = [
        (&["ifs", "--pair", "golden", "--lambda", "2/g"], Some(&golden)),
        (&["full", "--pair", "golden", "--lambda", "1"], Some(&golden)),
        (&["cover", "--pair", "quarter", "--lambda", "7/10", "--depth", "4"], None),
        (&["recur", "--pair", "two-fifths", "--grid", "5"], None),
    ];
    for (args, field) in cases {
        let mut seen = 0;
        check_scalars(&json_of(args), field, &mut seen);
        assert!(seen > 0, "{args:?} carries no scalars");
    }
}

#[test]
fn outputs_are_byte_stable() {
    let svg = scratch("stack.svg");
    let svg = svg.to_str().unwrap();
    let commands: [&[&str]; 5] = [
        &["dim", "--pair", "golden", "--lambda", "2/g"],
        &["sweep", "--pair", "quarter", "--from", "1/2", "--to", "2", "--count", "7"],
        &["render", "--pair", "golden", "--lambda", "2/g", "--depth", "3"],
        &["render", "--pair", "two-fifths", "--plane"],
        &["nonlinear", "--example", "sqrt", "--samples", "2000"],
    ];
    for args in commands {
        assert_eq!(run(args).stdout, run(args).stdout, "{args:?}");
    }
    run(&["render", "--pair", "third", "--lambda", "1", "--depth", "4", "--out", svg]);
    let first = std::fs::read(svg).unwrap();
    run(&["render", "--pair", "third", "--lambda", "1", "--depth", "4", "--out", svg]);
    assert_eq!(first, std::fs::read(svg).unwrap());
}

#[test]
fn quarter_pair_verdicts() {
    for (lambda, expected) in [("1/2", "Full"), ("0.7", "NotFull"), ("2", "Full")] {
        let v = json_of(&["full", "--pair", "quarter", "--lambda", lambda]);
        assert_eq!(v["verdict"], expected, "λ = {lambda}");
    }
}

#[test]
fn tiling_cover_has_no_gaps() {
    let v = json_of(&["cover", "--pair", "third", "--lambda", "1", "--depth", "3"]);
    assert_eq!(v["covered"], true);
    assert_eq!(v["gaps"], Value::Array(vec![]));
}

#[test]
fn golden_dimension_json() {
    let path = scratch("automaton.json");
    let v = json_of(&["dim", "--pair", "golden", "--lambda", "2-2g+2g", "--budget", "100"]);
    assert_eq!(v["schema"], "cantordiff/1");
    assert_eq!(v["maps"], 21);
    let v = json_of(&["dim", "--pair", "golden", "--lambda", "2/g", "--emit", path.to_str().unwrap()]);
    let hdim: Vec<f64> = v["hdim"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    assert!(hdim[0] > 0.985 && hdim[1] < 0.9851, "{hdim:?}");
    let auto: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let n = auto["states"].as_array().unwrap().len();
    assert_eq!(n, v["states"].as_u64().unwrap() as usize);
    assert_eq!(auto["matrix"].as_array().unwrap().len(), n);
    assert_eq!(auto["start"].as_array().unwrap().len(), n);
}

#[test]
fn golden_sweep_endpoints() {
    let out = run(&["sweep", "--pair", "golden", "--from", "1", "--to", "2/g", "--count", "11", "--budget", "50"]);
    assert!(out.status.success());
    let mut reader = csv::Reader::from_reader(&out.stdout[..]);
    assert_eq!(
        reader.headers().unwrap().iter().collect::<Vec<_>>(),
        ["lambda", "verdict", "class_count", "dim_low", "dim_high"]
    );
    let rows: Vec<csv::StringRecord> = reader.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 11);
    assert_eq!(&rows[0][1], "Full");
    let last = &rows[10];
    assert_eq!(&last[0], "-2+2g");
    assert_eq!(&last[2], "21;369;6357;109281");
    assert!(last[4].parse::<f64>().unwrap() < 1.0);
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["full", "--pair", "quarter", "--lambda", "1/"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["sweep", "--pair", "quarter", "--from", "1", "--to", "1", "--count", "3"]).status.code(), Some(2));

    let out = run(&["dim", "--pair", "golden", "--lambda", "2/g", "--budget", "3"]);
    assert_eq!(out.status.code(), Some(3));
    let partial: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(partial["complete"], false);

    let out = run(&["cover", "--pair", "golden", "--lambda", "2/g", "--depth", "6", "--budget", "1000"]);
    assert_eq!(out.status.code(), Some(3));
    let partial: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(partial["complete"], false);

    let out = Command::new(env!("CARGO_BIN_EXE_cantordiff"))
        .args(["dim", "--pair", "golden", "--lambda", "2/g"])
        .env("CANTORDIFF_BUDGET", "3")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn pair_files() {
    let toml_path = scratch("golden.toml");
    std::fs::write(&toml_path, "field = \"g^2=g+1\"\nalpha = \"1/g^3\"\nbeta = \"1/g^2\"\nlambda = \"2/g\"\n").unwrap();
    let json_path = scratch("golden.json");
    std::fs::write(&json_path, r#"{"field": "g^2=g+1", "alpha": "1/g^3", "beta": "1/g^2", "lambda": "2/g"}"#).unwrap();
    let a = json_of(&["ifs", "--pair", toml_path.to_str().unwrap()]);
    let b = json_of(&["ifs", "--pair", json_path.to_str().unwrap()]);
    assert_eq!(a["ifs"], b["ifs"]);
    assert_eq!(a["ifs"]["maps"].as_array().unwrap().len(), 21);
    assert_eq!(a["pair"]["alpha"], "1/g^3");

    let bad = scratch("bad.toml");
    std::fs::write(&bad, "alpha = \"1/3\"\nbeta = \"1/3\"\ncolour = \"red\"\n").unwrap();
    assert_eq!(run(&["ifs", "--pair", bad.to_str().unwrap(), "--lambda", "1"]).status.code(), Some(2));
}

#[test]
fn linking_and_membership() {
    let v = json_of(&["linked", "--pair", "third", "--range", "-11/20:-9/20"]);
    assert_eq!(v["linked"], true);
    let v = json_of(&["member", "--pair", "third", "--t", "1/2", "--s", "1"]);
    assert_eq!(v["orbit_search"]["verdict"], "in");
    assert_eq!(v["line_system"]["verdict"], "in");
}

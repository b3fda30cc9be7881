use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn topomu(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_topomu"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn schema_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("schemas")
}

/// Checks the subset of JSON Schema the shipped schemas use: `type`, `enum`,
/// `properties`, `required`, `additionalProperties`, `items`, `minItems`,
/// `maxItems`, `minimum` and file-relative `$ref`.
fn conforms(v: &Value, s: &Value, path: &str) -> Result<(), String> {
    if let Some(r) = s.get("$ref").and_then(Value::as_str) {
        let text = fs::read_to_string(schema_dir().join(r)).map_err(|e| e.to_string())?;
        return conforms(v, &serde_json::from_str(&text).unwrap(), path);
    }
    if let Some(t) = s.get("type") {
        let types: Vec<&str> = match t {
            Value::String(x) => vec![x.as_str()],
            Value::Array(xs) => xs.iter().filter_map(Value::as_str).collect(),
            _ => return Err(format!("bad type keyword at {path}")),
        };
        let ok = types.iter().any(|t| match *t {
            "object" => v.is_object(),
            "array" => v.is_array(),
            "string" => v.is_string(),
            "boolean" => v.is_boolean(),
            "integer" => v.is_u64() || v.is_i64() || v.as_f64().is_some_and(|x| x.fract() == 0.0),
            "number" => v.is_number(),
            "null" => v.is_null(),
            _ => false,
        });
        if !ok {
            return Err(format!("{path}: expected {types:?}, got {v}"));
        }
    }
    if let Some(options) = s.get("enum").and_then(Value::as_array) {
        if !options.contains(v) {
            return Err(format!("{path}: {v} not in {options:?}"));
        }
    }
    if let (Some(min), Some(x)) = (s.get("minimum").and_then(Value::as_f64), v.as_f64()) {
        if x < min {
            return Err(format!("{path}: {x} below {min}"));
        }
    }
    if let Some(obj) = v.as_object() {
        let props = s.get("properties").and_then(Value::as_object);
        for key in s.get("required").and_then(Value::as_array).into_iter().flatten() {
            let key = key.as_str().unwrap();
            if !obj.contains_key(key) {
                return Err(format!("{path}: missing {key}"));
            }
        }
        for (k, x) in obj {
            let sub = format!("{path}.{k}");
            match (props.and_then(|p| p.get(k)), s.get("additionalProperties")) {
                (Some(ps), _) => conforms(x, ps, &sub)?,
                (None, Some(Value::Bool(false))) => return Err(format!("{path}: unexpected key {k}")),
                (None, Some(extra @ Value::Object(_))) => conforms(x, extra, &sub)?,
                _ => {}
            }
        }
    }
    if let Some(items) = v.as_array() {
        let len = items.len() as u64;
        if s.get("minItems").and_then(Value::as_u64).is_some_and(|m| len < m)
            || s.get("maxItems").and_then(Value::as_u64).is_some_and(|m| len > m)
        {
            return Err(format!("{path}: {len} items out of range"));
        }
        if let Some(each) = s.get("items") {
            for (i, x) in items.iter().enumerate() {
                conforms(x, each, &format!("{path}[{i}]"))?;
            }
        }
    }
    Ok(())
}

fn json_output(o: &Output, schema: &str) -> Value {
    let v: Value = serde_json::from_str(&stdout(o)).unwrap_or_else(|e| panic!("{e}: {}", stdout(o)));
    let s: Value = serde_json::from_str(&fs::read_to_string(schema_dir().join(schema)).unwrap()).unwrap();
    if let Err(e) = conforms(&v, &s, "$") {
        panic!("{schema}: {e}");
    }
    v
}

fn write(dir: &TempDir, name: &str, text: &str) -> String {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

const CHAIN: &str = r#"{"worlds":["a","b","c"],"edges":[["a","b"],["b","c"],["c","c"]],"val":{"p":["c"]}}"#;

#[test]
fn validator_rejects_bad_documents() {
    let s: Value =
        serde_json::from_str(&fs::read_to_string(schema_dir().join("check.schema.json")).unwrap()).unwrap();
    let good = serde_json::json!({"formula": "p", "worlds": ["a"]});
    assert!(conforms(&good, &s, "$").is_ok());
    assert!(conforms(&serde_json::json!({"formula": "p"}), &s, "$").is_err());
    assert!(conforms(&serde_json::json!({"formula": "p", "worlds": [1]}), &s, "$").is_err());
    assert!(conforms(
        &serde_json::json!({"formula": "p", "worlds": [], "x": 1}),
        &s,
        "$"
    )
    .is_err());
}

#[test]
fn parse_reports_core_form() {
    let o = topomu(&["--emit", "json", "parse", "--formula", "[]p -> <*>q"]);
    assert_eq!(code(&o), 0);
    let v = json_output(&o, "parse.schema.json");
    assert_eq!(v["freeVars"], serde_json::json!(["p", "q"]));
    assert_eq!(code(&topomu(&["parse", "--formula", "p &"])), 65);
}

#[test]
fn check_lists_worlds() {
    let dir = TempDir::new().unwrap();
    let m = write(&dir, "m.json", CHAIN);
    let o = topomu(&["check", "--model", &m, "--formula", "<>p"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).trim(), "b c");
    let o = topomu(&["--emit", "json", "check", "--model", &m, "--formula", "[*]<>T"]);
    let v = json_output(&o, "check.schema.json");
    assert_eq!(v["worlds"], serde_json::json!(["a", "b", "c"]));
    let bad = write(&dir, "bad.json", r#"{"worlds":["a"],"edges":[["a","z"]]}"#);
    assert_eq!(code(&topomu(&["check", "--model", &bad, "--formula", "p"])), 65);
    assert_eq!(code(&topomu(&["check", "--model", &m, "--formula", "<>X"])), 65);
}

#[test]
fn sat_and_valid_exit_codes() {
    let o = topomu(&[
        "--emit",
        "json",
        "sat",
        "--formula",
        "nu X. <>X",
        "--class",
        "IRR_WK4",
        "--max-worlds",
        "3",
    ]);
    assert_eq!(code(&o), 0);
    let v = json_output(&o, "search.schema.json");
    assert_eq!(v["result"], "satisfiable");
    assert_eq!(v["witness"]["model"]["worlds"].as_array().unwrap().len(), 2);
    let o = topomu(&["--emit", "json", "sat", "--formula", "<>T & []F"]);
    assert_eq!(code(&o), 1);
    assert_eq!(json_output(&o, "search.schema.json")["result"], "noneUpToBound");
    let w = "<><>p -> p | <>p";
    let o = topomu(&["--emit", "json", "valid", "--formula", w, "--class", "WK4"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let o = topomu(&[
        "--emit",
        "json",
        "valid",
        "--formula",
        "[]p -> [][]p",
        "--class",
        "WK4",
    ]);
    assert_eq!(code(&o), 1);
    assert_eq!(json_output(&o, "search.schema.json")["result"], "counterexample");
    let o = topomu(&[
        "--emit",
        "json",
        "sat",
        "--formula",
        "p",
        "--max-worlds",
        "8",
        "--time-budget-ms",
        "0",
    ]);
    assert_eq!(code(&o), 2);
    assert_eq!(json_output(&o, "search.schema.json")["result"], "budgetExceeded");
    assert_eq!(code(&topomu(&["sat", "--formula", "p", "--class", "NOPE"])), 64);
}

#[test]
fn quotient_and_unfold() {
    let dir = TempDir::new().unwrap();
    let twins = r#"{"worlds":["a","b","c"],"edges":[["a","c"],["b","c"]],"val":{"p":["c"]}}"#;
    let m = write(&dir, "m.json", twins);
    let o = topomu(&["--emit", "json", "quotient", "--model", &m]);
    assert_eq!(code(&o), 0);
    let v = json_output(&o, "quotient.schema.json");
    assert_eq!(v["projection"]["a"], "a+b");
    assert_eq!(v["model"]["worlds"].as_array().unwrap().len(), 2);
    let wk4 = r#"{"worlds":["a","b","c"],"edges":[["a","b"],["a","c"],["b","c"],["c","c"]],"val":{}}"#;
    let c = write(&dir, "c.json", wk4);
    let o = topomu(&["--emit", "json", "unfold", "--model", &c]);
    let v = json_output(&o, "unfold.schema.json");
    assert_eq!(
        v["model"]["worlds"],
        serde_json::json!(["a.0", "b.0", "c.0", "c.1"])
    );
    let bad = write(&dir, "bad.json", CHAIN);
    assert_eq!(code(&topomu(&["unfold", "--model", &bad])), 65);
}

#[test]
fn translate_round_trip() {
    let dir = TempDir::new().unwrap();
    let space = write(&dir, "s.json", r#"{"worlds":["x","y"],"preorder":[["x","y"]]}"#);
    let o = topomu(&["translate", "--to", "derivative-frame", "--input", &space]);
    assert_eq!(code(&o), 0);
    let v = json_output(&o, "model.schema.json");
    assert_eq!(v["edges"], serde_json::json!([["x", "y"]]));
    let frame = write(&dir, "f.json", &stdout(&o));
    let o = topomu(&["translate", "--to", "derivative-space", "--input", &frame]);
    let v = json_output(&o, "space.schema.json");
    assert_eq!(
        v["preorder"],
        serde_json::json!([["x", "x"], ["x", "y"], ["y", "y"]])
    );
    let o = topomu(&["translate", "--to", "closure-frame", "--input", &space]);
    let v = json_output(&o, "model.schema.json");
    assert_eq!(v["edges"].as_array().unwrap().len(), 3);
    assert_eq!(
        code(&topomu(&[
            "translate",
            "--to",
            "closure-space",
            "--input",
            &frame
        ])),
        65
    );
}

#[test]
fn spine_outputs() {
    let o = topomu(&["--emit", "json", "spine", "--m", "22", "--size-bound", "3"]);
    assert_eq!(code(&o), 0);
    let v = json_output(&o, "spine.schema.json");
    assert_eq!(v["formulaCount"], 27);
    assert_eq!(v["separatorExtension"], serde_json::json!([23, 24]));
    let o = topomu(&["--emit", "csv", "spine", "--m", "10", "--size-bound", "2"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 1 + 8);
    assert_eq!(code(&topomu(&["spine", "--m", "1"])), 65);
}

#[test]
fn prove_checks_derivations() {
    let dir = TempDir::new().unwrap();
    let good = r#"{"logic":["Taut","K","Fix"],"steps":[
        {"rule":"Axiom","schema":"Fix","formula":"(nu X. <>X) -> <>(nu X. <>X)"},
        {"rule":"Nec","from":0}],
        "conclusion":"[]((nu X. <>X) -> <>(nu Y. <>Y))"}"#;
    let p = write(&dir, "good.json", good);
    let o = topomu(&["--emit", "json", "prove", "--proof", &p]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert_eq!(json_output(&o, "prove.schema.json")["valid"], true);
    let bad = good.replace("\"Fix\",\"formula\"", "\"K\",\"formula\"");
    let p = write(&dir, "bad.json", &bad);
    let o = topomu(&["--emit", "json", "prove", "--proof", &p]);
    assert_eq!(code(&o), 1);
    let v = json_output(&o, "prove.schema.json");
    assert_eq!(v["step"], 0);
    let p = write(
        &dir,
        "junk.json",
        r#"{"logic":["Nope"],"steps":[],"conclusion":"T"}"#,
    );
    assert_eq!(code(&topomu(&["prove", "--proof", &p])), 65);
}

#[test]
fn bound_is_exact_json() {
    let o = topomu(&["bound", "--sigma-size", "1"]);
    assert_eq!(stdout(&o).trim(), r#"{"perDepth":[8],"total":8,"depthBound":0}"#);
    let o = topomu(&["bound", "--sigma-size", "2"]);
    assert_eq!(
        stdout(&o).trim(),
        r#"{"perDepth":[64,1180591620717411303424],"total":1180591620717411303488,"depthBound":1}"#
    );
    json_output(&o, "bound.schema.json");
    let o = topomu(&["bound", "--sigma-size", "40"]);
    assert_eq!(code(&o), 0);
    json_output(&o, "bound.schema.json");
}

#[test]
fn fuzz_reports() {
    let o = topomu(&[
        "--emit",
        "json",
        "--seed",
        "5",
        "fuzz",
        "--trials",
        "200",
        "--max-worlds",
        "4",
    ]);
    assert_eq!(code(&o), 0);
    let v = json_output(&o, "fuzz.schema.json");
    assert_eq!(v["failures"], 0);
    assert_eq!(v["schemas"]["W"]["instances"], 50);
    let o = topomu(&[
        "--emit",
        "json",
        "fuzz",
        "--schemas",
        "FourAx",
        "--trials",
        "300",
        "--max-worlds",
        "5",
    ]);
    assert_eq!(code(&o), 1);
    let v = json_output(&o, "fuzz.schema.json");
    assert!(!v["examples"].as_array().unwrap().is_empty());
    let o = topomu(&[
        "fuzz",
        "--schemas",
        "Taut",
        "--user",
        "Dense=<>p -> <><>p",
        "--class",
        "S4",
        "--trials",
        "50",
    ]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert_eq!(code(&topomu(&["fuzz", "--schemas", "Nope"])), 64);
    assert_eq!(code(&topomu(&["fuzz", "--user", "broken"])), 64);
}

#[test]
fn usage_errors() {
    assert_eq!(code(&topomu(&["frobnicate"])), 64);
    assert_eq!(
        code(&topomu(&["--emit", "csv", "bound", "--sigma-size", "1"])),
        64
    );
    assert_eq!(code(&topomu(&["--jobs", "0", "bound", "--sigma-size", "1"])), 64);
    assert_eq!(code(&topomu(&["--help"])), 0);
    assert_eq!(
        code(&topomu(&[
            "check",
            "--model",
            "/nonexistent/m.json",
            "--formula",
            "p"
        ])),
        65
    );
}

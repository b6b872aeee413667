use std::path::{Path, PathBuf};
use std::process::Command;

use rendezvous::forge::{solve_set_cover_brute, SetCoverInstance};
use rendezvous::Graph;
use serde_json::{json, Value};
use tempfile::TempDir;

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

impl Run {
    fn json(&self) -> Value {
        serde_json::from_str(&self.stdout)
            .unwrap_or_else(|e| panic!("{e}: {:?} / {:?}", self.stdout, self.stderr))
    }
}

fn rendezvous(args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_rendezvous"))
        .args(args)
        .output()
        .unwrap();
    Run {
        code: out.status.code().unwrap(),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

fn schema_check(name: &str, value: &Value) {
    let path = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../schemas")
        .join(name);
    let schema: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    let validator = jsonschema::validator_for(&schema).unwrap();
    let errors: Vec<String> = validator
        .iter_errors(value)
        .map(|e| e.to_string())
        .collect();
    assert!(errors.is_empty(), "{name}: {errors:?} in {value}");
}

struct Files(TempDir);

impl Files {
    fn new() -> Self {
        Files(tempfile::tempdir().unwrap())
    }

    fn write(&self, name: &str, text: &str) -> String {
        let p = self.0.path().join(name);
        std::fs::write(&p, text).unwrap();
        p.to_str().unwrap().to_string()
    }

    fn path(&self, name: &str) -> PathBuf {
        self.0.path().join(name)
    }

    fn instance(&self, name: &str, g: &Graph, s: usize, t: usize, k: usize) -> String {
        self.write(
            name,
            &json!({"n": g.n(), "edges": g.edges(), "s": s, "t": t, "k": k}).to_string(),
        )
    }
}

fn with_k(instance: &str, k: usize) -> String {
    let mut v: Value = serde_json::from_str(instance).unwrap();
    v["k"] = json!(k);
    v.to_string()
}

#[test]
fn solve_p3_divider_survives() {
    let f = Files::new();
    let p = f.instance("p3.json", &Graph::path(3), 0, 2, 1);
    let r = rendezvous(&["solve", "--instance", &p]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let v = r.json();
    schema_check("solve-report.schema.json", &v);
    assert_eq!(v["facilitator_wins"], false);
    assert_eq!(v["method"], "lambda-1");

    let r = rendezvous(&["solve", "--instance", &p, "--mode", "generic"]);
    let v = r.json();
    assert_eq!(
        (v["facilitator_wins"].clone(), v["method"].clone()),
        (json!(false), json!("generic"))
    );
    assert!(v["ell_star"].is_u64());
}

#[test]
fn solve_adjacent_is_trivial() {
    let f = Files::new();
    let p = f.instance("k2.json", &Graph::path(4), 1, 2, 3);
    let v = rendezvous(&["solve", "--instance", &p]).json();
    assert_eq!(v["facilitator_wins"], true);
    assert_eq!(v["method"], "adjacent-or-equal");
    assert_eq!(v["ell_star"], Value::Null);
}

#[test]
fn solve_clique_spider() {
    let f = Files::new();
    let gen = rendezvous(&["gen", "clique-spider", "--p", "4"]);
    assert_eq!(gen.code, 0);
    schema_check("instance.schema.json", &gen.json());
    let two = f.write("cs2.json", &with_k(&gen.stdout, 2));
    let one = f.write("cs1.json", &with_k(&gen.stdout, 1));
    assert_eq!(
        rendezvous(&["solve", "--instance", &two]).json()["facilitator_wins"],
        false
    );
    assert_eq!(
        rendezvous(&["solve", "--instance", &one]).json()["facilitator_wins"],
        true
    );
    let threaded = rendezvous(&[
        "--threads",
        "2",
        "solve",
        "--instance",
        &one,
        "--mode",
        "generic",
    ]);
    assert_eq!(threaded.json()["facilitator_wins"], true);
}

#[test]
fn dnumber_reports() {
    let f = Files::new();
    let spider = rendezvous(&["gen", "path-spider", "--p", "3"]);
    let p = f.write("ps3.json", &spider.stdout);
    let r = rendezvous(&["dnumber", "--graph", &p, "--s", "0", "--t", "1"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let v = r.json();
    schema_check("dnumber-report.schema.json", &v);
    assert_eq!((v["d"].clone(), v["lambda"].clone()), (json!(2), json!(3)));

    let p3 = f.instance("p3.json", &Graph::path(3), 0, 2, 1);
    let v = rendezvous(&["dnumber", "--graph", &p3, "--s", "0", "--t", "2"]).json();
    assert_eq!(v, json!({"d": 1, "lambda": 1, "reason": "lambda-1"}));

    let chordal = Graph::from_edges(4, &[(0, 1), (0, 2), (1, 2), (1, 3), (2, 3)]);
    let c = f.instance("c.json", &chordal, 0, 3, 1);
    let v = rendezvous(&["dnumber", "--graph", &c, "--s", "0", "--t", "3"]).json();
    assert_eq!(v, json!({"d": 2, "lambda": 2, "reason": "chordal"}));

    let v = rendezvous(&["dnumber", "--graph", &p3, "--s", "0", "--t", "1"]).json();
    assert_eq!(
        v,
        json!({"d": "inf", "lambda": "inf", "reason": "adjacent-or-equal"})
    );
}

#[test]
fn dnumber_brackets_when_capped() {
    let f = Files::new();
    let spider = rendezvous(&["gen", "path-spider", "--p", "3"]);
    let p = f.write("ps3.json", &spider.stdout);
    let r = rendezvous(&[
        "dnumber", "--graph", &p, "--s", "0", "--t", "1", "--max-k", "1",
    ]);
    assert_eq!(r.code, 2);
    let v = r.json();
    schema_check("dnumber-report.schema.json", &v);
    assert_eq!(v["d"], json!({"lower": 2, "upper": 3}));
    assert!(r.stderr.contains("budget"));
}

#[test]
fn budget_exhaustion_exits_two() {
    let f = Files::new();
    let p = f.instance("c8.json", &Graph::cycle(8), 0, 4, 2);
    let r = rendezvous(&[
        "solve",
        "--instance",
        &p,
        "--mode",
        "generic",
        "--budget",
        "10",
    ]);
    assert_eq!(r.code, 2);
    schema_check("budget-error.schema.json", &r.json());
    let r = rendezvous(&[
        "solve",
        "--instance",
        &p,
        "--tau",
        "3",
        "--mode",
        "nd-fpt",
        "--budget",
        "0",
    ]);
    assert_eq!(r.code, 2, "{}", r.stderr);
    schema_check("budget-error.schema.json", &r.json());
}

#[test]
fn malformed_input_exits_one() {
    let f = Files::new();
    let cases = [
        f.write(
            "bad.json",
            "{\"n\": 3, \"edges\": [[0, 1], [1, 1]], \"s\": 0, \"t\": 2, \"k\": 1}",
        ),
        f.write("trunc.json", "{\"n\": 3"),
        f.write(
            "disc.json",
            "{\"n\": 3, \"edges\": [[0, 1]], \"s\": 0, \"t\": 2, \"k\": 1}",
        ),
        f.path("missing.json").to_str().unwrap().to_string(),
    ];
    for p in &cases {
        let r = rendezvous(&["solve", "--instance", p]);
        assert_eq!(r.code, 1, "{p}");
        assert!(r.stdout.is_empty());
        assert!(r.stderr.starts_with("error:"), "{}", r.stderr);
    }
    let p3 = f.instance("p3.json", &Graph::path(3), 0, 2, 1);
    assert_eq!(
        rendezvous(&["dnumber", "--graph", &p3, "--s", "0", "--t", "9"]).code,
        1
    );
    assert_eq!(
        rendezvous(&["solve", "--instance", &p3, "--mode", "nd-fpt"]).code,
        1
    );
    assert_eq!(
        rendezvous(&["solve", "--instance", &p3, "--tau", "0"]).code,
        1
    );
    assert_eq!(rendezvous(&["solve"]).code, 1);
    assert_eq!(rendezvous(&["gen", "clique-spider", "--p", "1"]).code, 1);
}

#[test]
fn nd_mode_agrees_with_generic() {
    let f = Files::new();
    for seed in 0..12 {
        let gen = rendezvous(&[
            "gen",
            "random",
            "--n",
            "6",
            "--edge-prob",
            "0.4",
            "--seed",
            &seed.to_string(),
            "--k",
            "1",
        ]);
        let p = f.write(&format!("r{seed}.json"), &gen.stdout);
        for tau in ["1", "2", "3"] {
            let a =
                rendezvous(&["solve", "--instance", &p, "--tau", tau, "--mode", "generic"]).json();
            let b =
                rendezvous(&["solve", "--instance", &p, "--tau", tau, "--mode", "nd-fpt"]).json();
            assert_eq!(
                a["facilitator_wins"], b["facilitator_wins"],
                "seed {seed} tau {tau}"
            );
            if b["method"] != "adjacent-or-equal" {
                assert_eq!(b["method"], "nd-fpt");
            }
        }
    }
}

#[test]
fn certificate_round_trip() {
    let f = Files::new();
    let p = f.instance("c6.json", &Graph::cycle(6), 0, 3, 1);
    let cert = f.path("cert.json");
    let r = rendezvous(&[
        "solve",
        "--instance",
        &p,
        "--tau",
        "1",
        "--certificate",
        cert.to_str().unwrap(),
    ]);
    assert_eq!(r.json()["facilitator_wins"], false);
    let text = std::fs::read_to_string(&cert).unwrap();
    let tree: Value = serde_json::from_str(&text).unwrap();
    schema_check("strategy.schema.json", &tree);
    let r = rendezvous(&[
        "verify",
        "--instance",
        &p,
        "--strategy",
        cert.to_str().unwrap(),
        "--tau",
        "1",
    ]);
    assert_eq!((r.code, r.stdout.as_str()), (0, "valid\n"));

    let mut tampered = tree.clone();
    tampered["children"][0]["d"] = json!([0]);
    let bad = f.write("bad.json", &tampered.to_string());
    let r = rendezvous(&["verify", "--instance", &p, "--strategy", &bad, "--tau", "1"]);
    assert_eq!(r.code, 0);
    assert!(r.stdout.starts_with("invalid: "), "{}", r.stdout);

    // a one-move tree does not certify two moves
    let r = rendezvous(&[
        "verify",
        "--instance",
        &p,
        "--strategy",
        cert.to_str().unwrap(),
        "--tau",
        "2",
    ]);
    assert!(r.stdout.starts_with("invalid: "));
    assert_eq!(
        rendezvous(&["verify", "--instance", &p, "--strategy", &p, "--tau", "1"]).code,
        1
    );
}

#[test]
fn generators_are_deterministic() {
    let v = rendezvous(&["gen", "clique-spider", "--p", "2"]).json();
    assert_eq!(v["n"], 8);
    assert_eq!(v["k"], 2);
    let args = ["gen", "random", "--n", "9", "--seed", "4"];
    let a = rendezvous(&args);
    assert_eq!(a.stdout, rendezvous(&args).stdout);
    schema_check("instance.schema.json", &a.json());
    let c = rendezvous(&["gen", "chordal", "--n", "7", "--seed", "1"]).json();
    schema_check("instance.schema.json", &c);

    let f = Files::new();
    let out = f.path("out.json");
    let r = rendezvous(&[
        "gen",
        "path-spider",
        "--p",
        "2",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(r.stdout.is_empty());
    let written: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(written["s"], 0);
}

#[test]
fn reductions() {
    let f = Files::new();
    for (sets, k) in [
        (json!([[0, 1], [1, 2]]), 1),
        (json!([[0, 1], [1, 2]]), 2),
        (json!([[0, 1, 2], [1]]), 1),
    ] {
        let sc = json!({"n": 3, "sets": sets, "k": k});
        let p = f.write("sc.json", &sc.to_string());
        let r = rendezvous(&["reduce", "set-cover", "--file", &p]);
        assert_eq!(r.code, 0, "{}", r.stderr);
        let inst = r.json();
        schema_check("instance.schema.json", &inst);
        assert_eq!(inst["tau"], 2);
        let ip = f.write("inst.json", &r.stdout);
        let fac = rendezvous(&["solve", "--instance", &ip]).json()["facilitator_wins"]
            .as_bool()
            .unwrap();
        let cover = solve_set_cover_brute(&serde_json::from_value::<SetCoverInstance>(sc).unwrap())
            .unwrap();
        assert_eq!(fac, !cover, "{sets} k={k}");
    }
    let phi = json!({"n": 1, "clauses": [[{"var": 1, "neg": false}, {"var": 2, "neg": true}]]});
    let p = f.write("phi.json", &phi.to_string());
    for sub in ["qbf", "qbf-unbounded"] {
        let r = rendezvous(&["reduce", sub, "--file", &p]);
        assert_eq!(r.code, 0, "{}", r.stderr);
        schema_check("instance.schema.json", &r.json());
    }
    let bad = f.write(
        "badphi.json",
        r#"{"n": 1, "clauses": [[{"var": 7, "neg": false}]]}"#,
    );
    assert_eq!(rendezvous(&["reduce", "qbf", "--file", &bad]).code, 1);
}

#[test]
fn lambda_and_classify() {
    let f = Files::new();
    let p5 = f.instance("p5.json", &Graph::path(5), 0, 4, 1);
    let v = rendezvous(&["lambda", "--graph", &p5, "--s", "0", "--t", "4"]).json();
    schema_check("lambda-report.schema.json", &v);
    assert_eq!(v["lambda"], 1);
    assert_eq!(v["separator"].as_array().unwrap().len(), 1);

    let c4 = f.instance("c4.json", &Graph::cycle(4), 0, 2, 1);
    let v = rendezvous(&["classify", "--graph", &c4, "--s", "0", "--t", "2"]).json();
    schema_check("classify-report.schema.json", &v);
    assert_eq!(v["neighborhood_diversity"], 2);
    assert_eq!(v["chordal"], false);
    assert_eq!(v["p5_free"], true);
    assert_eq!(v["fast_paths"][0], json!({"value": 2, "reason": "p5-free"}));
    let v = rendezvous(&["classify", "--graph", &p5]).json();
    schema_check("classify-report.schema.json", &v);
    assert!(v.get("fast_paths").is_none());
}

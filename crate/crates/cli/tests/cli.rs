use std::io::Write;
use std::process::{Command, Stdio};

use couplings::connections::{rationalize, DEFAULT_MAX_DENOMINATOR};
use couplings::{scenario_from_correlations, Scenario};
use couplings_cli::{ResultDocument, ScenarioDocument};
use serde_json::Value;

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

impl Run {
    fn doc(&self) -> ResultDocument {
        let doc =
            ResultDocument::parse(&self.stdout).unwrap_or_else(|e| panic!("{e}\n{}", self.stdout));
        assert_eq!(doc.to_json() + "\n", self.stdout, "canonical output");
        doc
    }
}

fn couplings(args: &[&str], stdin: &str) -> Run {
    let mut child = Command::new(env!("CARGO_BIN_EXE_couplings"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(stdin.as_bytes())
        .unwrap();
    let out = child.wait_with_output().unwrap();
    Run {
        code: out.status.code().unwrap(),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

fn doc_of(s: &Scenario) -> String {
    ScenarioDocument::from_scenario(s, None).to_json()
}

fn fair() -> String {
    doc_of(&Scenario::fair_coins())
}

fn pr_box() -> String {
    doc_of(&Scenario::pr_box())
}

fn singlet_rational() -> String {
    let r = rationalize(std::f64::consts::FRAC_1_SQRT_2, DEFAULT_MAX_DENOMINATOR);
    doc_of(&scenario_from_correlations(&[r.clone(), r.clone(), r.clone(), -r]).unwrap())
}

fn report<'a>(doc: &'a ResultDocument, path: &[&str]) -> &'a Value {
    let mut v = &doc.reports[path[0]];
    for key in &path[1..] {
        v = &v[*key];
    }
    v
}

#[test]
fn check_classifies_the_reference_documents() {
    let pr = couplings(&["check"], &pr_box());
    assert_eq!(pr.code, 1);
    let d = pr.doc();
    assert!(!d.verdicts["bell"] && !d.verdicts["quantum"] && !d.verdicts["tsirelson"]);
    assert!(d.verdicts["no_signaling"]);

    let coins = couplings(&["check"], &fair());
    assert_eq!(coins.code, 0);
    let d = coins.doc();
    assert!(d.verdicts["bell"] && d.verdicts["quantum"] && d.verdicts["tsirelson"]);

    let singlet = couplings(&["check"], &singlet_rational());
    assert_eq!(singlet.code, 1);
    let d = singlet.doc();
    assert!(!d.verdicts["bell"] && d.verdicts["quantum"] && d.verdicts["tsirelson"]);
}

#[test]
fn check_reads_files_and_restricts_families() {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    file.write_all(singlet_rational().as_bytes()).unwrap();
    let path = file.path().to_str().unwrap();
    let run = couplings(
        &["check", "--input", path, "--family", "quantum,tsirelson"],
        "",
    );
    assert_eq!(run.code, 0, "{}", run.stderr);
    assert!(!run.doc().verdicts["bell"]);
}

#[test]
fn check_rationalizes_float_correlations_and_echoes_them() {
    let run = couplings(&["check", "--correlations", "-0.5,0.5,0.25,0"], "");
    assert_eq!(run.code, 0);
    let d = run.doc();
    let input = d.command.input.clone().unwrap();
    assert_eq!(input.metadata.unwrap()["source_correlations"][0], -0.5);
    assert_eq!(input.pairs["11"].pp, "1/8");
    assert_eq!(report(&d, &["correlations", "exact"])[2], "1/4");
}

#[test]
fn couple_modes() {
    let run = couplings(&["couple", "--identity"], &fair());
    assert_eq!(run.code, 0);
    let d = run.doc();
    assert!(d.verdicts["feasible"]);
    assert!(!d.witnesses["coupling"].masses.is_empty());

    let run = couplings(&["couple", "--identity"], &pr_box());
    assert_eq!(run.code, 1);
    assert!(run.doc().witnesses.is_empty());

    let run = couplings(&["couple", "--range", "A1"], &fair());
    assert_eq!(run.code, 0);
    let d = run.doc();
    assert_eq!(report(&d, &["range", "lo"]), "-1");
    assert_eq!(report(&d, &["range", "hi"]), "1");

    let run = couplings(&["couple", "--connections", "1/2,-1/2,0,0.25"], &fair());
    assert_eq!(run.code, 0);
    let d = run.doc();
    assert_eq!(
        d.witnesses["coupling"].connections.as_ref().unwrap()["B2"],
        "1/4"
    );

    let run = couplings(&["couple"], &pr_box());
    assert_eq!(run.code, 0);
    assert_eq!(report(&run.doc(), &["mode"]), "unconstrained");
}

#[test]
fn couple_refuses_irrational_targets_and_mixed_modes() {
    let run = couplings(&["couple", "--connections", "sqrt(2)/2,1,1,1"], &fair());
    assert_eq!(run.code, 2);
    assert!(run.stderr.contains("rationalize first"), "{}", run.stderr);
    assert!(run.stdout.is_empty());

    let run = couplings(&["couple", "--connections", "2,1,1,1"], &fair());
    assert_eq!(run.code, 2);

    let run = couplings(&["couple", "--identity", "--range", "A1"], &fair());
    assert_eq!(run.code, 2);
}

#[test]
fn connections_roles() {
    let args = [
        "connections",
        "--conn",
        "1,1,1,1",
        "--role",
        "equivalent",
        "--n",
        "100",
    ];
    let run = couplings(&[&args[..], &["--family", "bell"]].concat(), "");
    assert_eq!(run.code, 0, "{}", run.stderr);
    let d = run.doc();
    assert!(d.verdicts["equivalent"]);
    assert_eq!(report(&d, &["set_role", "samples_checked"]), 200);

    let run = couplings(&[&args[..], &["--family", "quantum"]].concat(), "");
    assert_eq!(run.code, 1);
    let d = run.doc();
    assert!(!d.verdicts["equivalent"]);
    assert!(report(&d, &["set_role", "counterexample"]).is_object());

    let run = couplings(
        &[
            "connections",
            "--conn",
            "0,0,0,0",
            "--family",
            "bell",
            "--role",
            "forcing",
            "--n",
            "100",
        ],
        "",
    );
    assert_eq!(run.code, 1);
    let d = run.doc();
    assert!(!d.verdicts["forcing"]);
    assert!(d.witnesses.contains_key("counterexample"));
}

#[test]
fn seeded_runs_are_reproducible() {
    let args = [
        "connections",
        "--conn=-0.5,0.25,1,0",
        "--family",
        "tsirelson",
        "--role",
        "fitting",
        "--n",
        "20",
        "--seed",
        "11",
    ];
    let a = couplings(&args, "");
    let b = couplings(&args, "");
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.code, b.code);
    let fine = ["demo", "fine", "--n", "50", "--seed", "4"];
    assert_eq!(couplings(&fine, "").stdout, couplings(&fine, "").stdout);
}

#[test]
fn conditionalize_builds_and_verifies() {
    let run = couplings(&["conditionalize", "--kind", "simple"], &pr_box());
    assert_eq!(run.code, 0);
    assert!(run.doc().verdicts["verified"]);

    let run = couplings(&["conditionalize", "--kind", "zero"], &fair());
    assert_eq!(run.code, 0);
    let d = run.doc();
    assert_eq!(report(&d, &["table"]).as_object().unwrap().len(), 16);
    assert_eq!(report(&d, &["table", "11:+0-0"]), "1/16");
    assert_eq!(report(&d, &["table", "12:+00-"]), "1/16");

    let run = couplings(
        &[
            "conditionalize",
            "--kind",
            "even",
            "--pi",
            "1/2,1/4,1/8,1/8",
        ],
        &pr_box(),
    );
    assert_eq!(run.code, 0);
    assert_eq!(report(&run.doc(), &["condition_marginal", "21"]), "1/8");

    let run = couplings(&["conditionalize", "--pi", "0/1,1/2,1/4,1/4"], &fair());
    assert_eq!(run.code, 2);
    assert!(run.stderr.contains("nonzero probability"), "{}", run.stderr);
}

#[test]
fn demos() {
    let run = couplings(&["demo", "fine"], "");
    assert_eq!(run.code, 0);
    let d = run.doc();
    assert_eq!(report(&d, &["fine", "agreements"]), 1000);
    assert_eq!(report(&d, &["fine", "samples"]), 1000);

    let run = couplings(&["demo", "tsirelson-tight"], "");
    assert_eq!(run.code, 0);
    let d = run.doc();
    assert!(d.verdicts["tsirelson_tight"] && d.verdicts["quantum_tight"]);
    assert!(!d.verdicts["bell_satisfied"]);

    let run = couplings(&["demo", "uninformative"], "");
    assert_eq!(run.code, 0);
    let d = run.doc();
    assert_eq!(report(&d, &["uninformative", "success_rate"]), 1.0);
    assert_eq!(report(&d, &["uninformative", "attempted"]), 1500);
    assert_eq!(
        report(&d, &["uninformative", "by_stratum"])
            .as_object()
            .unwrap()
            .len(),
        5
    );

    let run = couplings(
        &["demo", "tree", "--p", "1/3", "--q", "3/4", "--pi", "1/2"],
        "",
    );
    assert_eq!(run.code, 0);
    let d = run.doc();
    assert_eq!(report(&d, &["tree", "joint", "a", "c"]), "1/6");
    assert_eq!(report(&d, &["tree", "joint", "b", "d"]), "1/8");
    assert_eq!(report(&d, &["tree", "outcome_marginal", "c"]), "13/24");
    assert!(run.stderr.contains("13/24"));

    assert_eq!(couplings(&["demo", "tree", "--pi", "1"], "").code, 2);
    assert_eq!(couplings(&["demo", "nonsense"], "").code, 2);
}

#[test]
fn malformed_input_exits_with_2() {
    for input in ["", "{", "[]", r#"{"pairs": {}}"#, "not json at all"] {
        let run = couplings(&["check"], input);
        assert_eq!(run.code, 2, "input {input:?}");
        assert!(run.stderr.starts_with("error:"), "{}", run.stderr);
        assert!(!run.stderr.contains("panicked"));
    }
    let bad_cell = fair().replace("\"1/4\"", "\"1/0\"");
    assert_eq!(couplings(&["check"], &bad_cell).code, 2);
    assert_eq!(
        couplings(&["check", "--input", "/nonexistent/x.json"], "").code,
        2
    );
    assert_eq!(
        couplings(
            &[
                "connections",
                "--family",
                "bell",
                "--role",
                "fitting",
                "--n",
                "0"
            ],
            ""
        )
        .code,
        2
    );
    assert_eq!(couplings(&["check", "--tolerance", "nan"], &fair()).code, 2);
    assert_eq!(couplings(&["check", "--correlations", "1,2"], "").code, 2);
    assert_eq!(couplings(&["frobnicate"], "").code, 2);
    assert_eq!(couplings(&["--help"], "").code, 0);
}

#[test]
fn result_documents_round_trip() {
    let runs = [
        couplings(&["couple", "--identity"], &fair()),
        couplings(&["check"], &singlet_rational()),
        couplings(&["conditionalize", "--kind", "even"], &fair()),
        couplings(&["demo", "fine", "--n", "20"], ""),
    ];
    for run in runs {
        let doc = run.doc();
        let text = doc.to_json();
        assert_eq!(ResultDocument::parse(&text).unwrap(), doc);
    }
}

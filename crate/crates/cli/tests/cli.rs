use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "tests", "data", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_toric-sheaves")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).expect("utf-8 output")
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut a = args.to_vec();
    a.extend(["--format", "json"]);
    let o = run(&a);
    let v = serde_json::from_str(&stdout(&o)).unwrap_or_else(|e| panic!("{args:?}: {e}: {}", stdout(&o)));
    (o.status.code().expect("exit code"), v)
}

/// Coefficients of `∏(1 − q^k)^{−e}` by repeated multiplication with
/// `1/(1 − q^k) = 1 + q^k + q^{2k} + …`.
fn inverse_euler_product(e: usize, order: usize) -> Vec<u64> {
    let mut c = vec![0u64; order + 1];
    c[0] = 1;
    for _ in 0..e {
        for k in 1..=order {
            for n in k..=order {
                c[n] += c[n - k];
            }
        }
    }
    c
}

#[test]
fn rank_two_series_on_the_plane() {
    let o = run(&["series", "rank2-p2", "--order", "9"]);
    assert_eq!(o.status.code(), Some(0));
    let expected: String = [0, 1, 9, 48, 203, 729, 2346, 6918, 19062, 49620]
        .iter()
        .enumerate()
        .map(|(k, c)| format!("q^{k}: {c}\n"))
        .collect();
    assert_eq!(stdout(&o), expected);
    let csv = std::env::temp_dir().join(format!("rank2-series-{}.csv", std::process::id()));
    let o = run(&["series", "rank2-p2", "--order", "3", "--csv", csv.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(std::fs::read_to_string(&csv).unwrap(), "k,coefficient\n0,0\n1,1\n2,9\n3,48\n");
    std::fs::remove_file(csv).unwrap();
}

#[test]
fn rank_one_series_matches_product() {
    for (fan, e) in [("p2.json", 3), ("p1xp1.json", 4), ("f1.json", 4)] {
        let (code, v) = json(&["series", "rank1", "--fan", &data(fan), "--order", "8"]);
        assert_eq!(code, 0);
        let got: Vec<u64> = v["coefficients"].as_array().unwrap().iter().map(|c| c.as_str().unwrap().parse().unwrap()).collect();
        assert_eq!(got, inverse_euler_product(e, 8), "{fan}");
    }
}

#[test]
fn stability_verdict_records() {
    let (code, v) = json(&["stability", "mu", "--fan", &data("p2.json"), "--family", &data("tangent.json"), "--ample", &data("h.json")]);
    assert_eq!(code, 0);
    assert_eq!(v["report"]["verdict"], "stable");
    assert_eq!(v["report"]["exhaustive"], true);
    let (code, v) =
        json(&["stability", "gieseker", "--fan", &data("p2.json"), "--family", &data("unstable.json"), "--ample", &data("h.json")]);
    assert_eq!(code, 1);
    assert_eq!(v["report"]["verdict"], "unstable");
    assert!(v["report"]["witness"].is_array());
}

#[test]
fn git_and_gieseker_agree_from_the_command_line() {
    for fam in ["tangent.json", "unstable.json"] {
        let args = |t: &'static str| {
            vec!["stability".to_string(), t.into(), "--fan".into(), data("p2.json"), "--family".into(), data(fam), "--ample".into(), data("h.json")]
        };
        let git = args("git");
        let gs = args("gieseker");
        let (c1, v1) = json(&git.iter().map(String::as_str).collect::<Vec<_>>());
        let (c2, v2) = json(&gs.iter().map(String::as_str).collect::<Vec<_>>());
        assert_eq!(c1, c2);
        assert_eq!(v1["report"]["verdict"], v2["report"]["verdict"], "{fam}");
    }
}

#[test]
fn input_errors_exit_with_two() {
    let o = run(&["series", "rank2-p2", "--bogus"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["family-check", "--fan", &data("p2.json"), "--family", &data("malformed.json")]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("cones[0]"));
    let o = run(&["chern", "--fan", &data("p2.json"), "--family", &data("truncated.json")]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
    let o = run(&["stability", "mu", "--fan", &data("p2.json"), "--family", &data("tangent.json"), "--ample", &data("zero.json")]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["fan-check", "--fan", &data("missing.json")]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn invalid_objects_exit_with_one() {
    let (code, v) = json(&["fan-check", "--fan", &data("bad_fan.json")]);
    assert_eq!(code, 1);
    assert_eq!(v["valid"], false);
    assert_eq!(v["violations"][0]["invariant"], "not-complete");
}

#[test]
fn output_is_deterministic() {
    let fuzz = [
        "stability", "fuzz", "--fan", &data("p2.json"), "--family", &data("tangent.json"), "--ample", &data("h.json"), "--seed", "5",
        "--samples", "200",
    ];
    let calls: Vec<Vec<String>> = vec![
        fuzz.iter().map(|s| s.to_string()).collect(),
        ["weights", "xi", "--fan", &data("p2.json"), "--family", &data("tangent.json"), "--ample", &data("h.json"), "--format", "json"]
            .iter()
            .map(|s| s.to_string())
            .collect(),
    ];
    for c in calls {
        let a = run(&c.iter().map(String::as_str).collect::<Vec<_>>());
        let b = run(&c.iter().map(String::as_str).collect::<Vec<_>>());
        assert_eq!(a.stdout, b.stdout);
        assert_eq!(a.status.code(), Some(0));
    }
}

#[test]
fn surface_invariants_from_fan_check() {
    let (_, v) = json(&["fan-check", "--fan", &data("f1.json")]);
    let table = &v["intersection_table"];
    let diag: Vec<i64> = (0..4).map(|i| table[i][i].as_i64().unwrap()).collect();
    assert_eq!(diag, vec![0, 1, 0, -1]);
    assert_eq!(v["euler_characteristic"], 4);
    for c in v["cones"].as_array().unwrap() {
        assert_eq!(c["alternating_count"], 1);
    }
    let (_, v) = json(&["hilbert", "--fan", &data("p1xp1.json"), "--divisor", &data("p1xp1_f.json"), "--ample", &data("p1xp1_f.json")]);
    assert_eq!(v["lattice_points"], 4);
    assert_eq!(v["chi"], "4");
}

#[test]
fn enumeration_first_rank_two_coefficient() {
    let (code, v) = json(&[
        "enumerate", "--fan", &data("p2.json"), "--rank", "2", "--divisor", &data("c1_h.json"), "--c2-max", "1", "--ample", &data("h.json"),
    ]);
    assert_eq!(code, 0);
    assert_eq!(v["stable_euler_total"], 1);
    let (_, v) = json(&[
        "enumerate", "--fan", &data("p2.json"), "--rank", "1", "--divisor", &data("zero.json"), "--c2-max", "1", "--ample", &data("h.json"),
    ]);
    assert_eq!(v["by_c2"]["0"], 1);
    assert_eq!(v["by_c2"]["1"], 3);
}

/// Each library operation, the subcommand exposing it, and a JSON field
/// its result appears in.
const COVERAGE: &[(&str, &str, &str)] = &[
    ("validate_fan", "fan-check-bad", "/violations"),
    ("star", "fan-check", "/cones/0/star"),
    ("cone_count_identity", "fan-check", "/cones/0/alternating_count"),
    ("euler_characteristic", "fan-check", "/euler_characteristic"),
    ("intersection_table", "fan-check", "/intersection_table"),
    ("todd_and_canonical", "fan-check", "/todd"),
    ("pair", "chern", "/c2"),
    ("lattice_point_count", "hilbert-divisor", "/lattice_points"),
    ("chi_line_bundle", "hilbert-divisor", "/chi"),
    ("reflexive_from_filtrations", "family-check-tangent", "/canonical_family"),
    ("validate_torsion_free", "family-check", "/valid"),
    ("validate_pure", "family-check-pure", "/valid"),
    ("is_reflexive", "family-check", "/reflexive"),
    ("detect_support", "family-check", "/support"),
    ("restrict_to_face", "family-check", "/restriction"),
    ("tensor_line_bundle", "family-check", "/twist"),
    ("characteristic_function", "family-check", "/characteristic_function"),
    ("gauge_fix", "family-check", "/gauge_shift"),
    ("bracket_dims", "chern", "/brackets"),
    ("chern_character", "chern", "/ch2"),
    ("c1_fast", "chern", "/c1"),
    ("hilbert_polynomial", "hilbert", "/polynomial"),
    ("hilbert_data", "hilbert", "/data/slope"),
    ("distinguished_subspaces", "stability-mu", "/distinguished_subspaces"),
    ("mu_test", "stability-mu", "/report/verdict"),
    ("gieseker_test", "stability-gieseker", "/report/verdict"),
    ("mu_weights", "weights-mu", "/weights"),
    ("git_test", "weights-mu", "/report/verdict"),
    ("xi_weights", "weights-xi", "/entries"),
    ("choose_r", "stability-git", "/r"),
    ("rank1_fixed_point_series", "series-rank1", "/coefficients"),
    ("rank2_p2_series", "series-rank2", "/coefficients"),
    ("enumerate_gauge_fixed_chi", "enumerate", "/items"),
];

fn invocation(name: &str) -> Vec<String> {
    let (p2, h, t) = (data("p2.json"), data("h.json"), data("tangent.json"));
    let v: Vec<&str> = match name {
        "fan-check" => vec!["fan-check", "--fan", &p2],
        "fan-check-bad" => return vec!["fan-check".into(), "--fan".into(), data("bad_fan.json")],
        "family-check" => {
            return ["family-check", "--fan", &p2, "--family", &data("ideal_point.json"), "--twist", &data("twist.json"), "--face", "0,1"]
                .iter()
                .map(|s| s.to_string())
                .collect()
        }
        "family-check-tangent" => vec!["family-check", "--fan", &p2, "--family", &t],
        "family-check-pure" => return vec!["family-check".into(), "--fan".into(), p2.clone(), "--family".into(), data("boundary.json")],
        "chern" => vec!["chern", "--fan", &p2, "--family", &t],
        "hilbert" => vec!["hilbert", "--fan", &p2, "--family", &t, "--ample", &h],
        "hilbert-divisor" => vec!["hilbert", "--fan", &p2, "--divisor", &h, "--ample", &h],
        "stability-mu" => vec!["stability", "mu", "--fan", &p2, "--family", &t, "--ample", &h],
        "stability-gieseker" => vec!["stability", "gieseker", "--fan", &p2, "--family", &t, "--ample", &h],
        "stability-git" => vec!["stability", "git", "--fan", &p2, "--family", &t, "--ample", &h],
        "weights-mu" => vec!["weights", "mu", "--fan", &p2, "--family", &t, "--ample", &h],
        "weights-xi" => vec!["weights", "xi", "--fan", &p2, "--family", &t, "--ample", &h],
        "series-rank1" => vec!["series", "rank1", "--fan", &p2, "--order", "4"],
        "series-rank2" => vec!["series", "rank2-p2", "--order", "4"],
        "enumerate" => {
            return ["enumerate", "--fan", &p2, "--rank", "1", "--divisor", &data("zero.json"), "--c2-max", "1", "--ample", &h]
                .iter()
                .map(|s| s.to_string())
                .collect()
        }
        other => panic!("no invocation named {other}"),
    };
    v.into_iter().map(String::from).collect()
}

#[test]
fn every_operation_is_reachable() {
    for (op, name, pointer) in COVERAGE {
        let args = invocation(name);
        let (_, v) = json(&args.iter().map(String::as_str).collect::<Vec<_>>());
        assert!(v.pointer(pointer).is_some_and(|x| !x.is_null()), "{op}: {name} lacks {pointer}: {v}");
    }
}

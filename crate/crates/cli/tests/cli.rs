use serde_json::Value;
use std::path::PathBuf;
use std::process::{Command, Output};

fn tropcount(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tropcount")).args(args).output().expect("binary runs")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("tropcount-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn types_lists_six_line_types() {
    let o = tropcount(&["types", "--degree", r#"{"projective":1}"#]);
    assert!(o.status.success());
    let rows: Vec<Value> = stdout(&o).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(rows.len(), 6);
    for r in &rows {
        assert_eq!(r["codim"], 0);
        assert_eq!(r["dim"], 4);
        assert_eq!(r["exceptional"], false);
        assert_eq!(r["type"]["vertices"], 1);
    }
}

#[test]
fn count_cubic_through_eight_points() {
    let pts = scratch("cubic.json");
    std::fs::write(
        &pts,
        r#"[["0","0"],["13/2","3"],["-7","11"],["29","-5"],["4","17"],["-19","-23"],["31","41"],["-2.5","37"]]"#,
    )
    .unwrap();
    let o = tropcount(&["count", "--degree", "3", "--points", pts.to_str().unwrap()]);
    if o.status.code() == Some(3) {
        // Landed on a wall; a tiny perturbation must recover the count.
        let o = tropcount(&["count", "--degree", "3", "--points", pts.to_str().unwrap(), "--perturb", "1/1000"]);
        assert!(o.status.success());
        let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
        assert_eq!(v["N"], 12);
        return;
    }
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["N"], 12);
    let mults: u64 = v["curves"].as_array().unwrap().iter().map(|c| c["mult"].as_u64().unwrap()).sum();
    assert_eq!(mults, 12);
    assert_eq!(v["general_position"]["verdict"], "general");
}

#[test]
fn count_output_is_byte_identical_across_runs() {
    let out_a = scratch("a.json");
    let out_b = scratch("b.json");
    for out in [&out_a, &out_b] {
        let o = tropcount(&["count", "--degree", "2", "--seed", "17", "--out", out.to_str().unwrap()]);
        assert!(o.status.success());
    }
    assert_eq!(std::fs::read(&out_a).unwrap(), std::fs::read(&out_b).unwrap());
}

#[test]
fn render_line_has_three_rays_and_no_weight_labels() {
    let pts = scratch("line.json");
    std::fs::write(&pts, r#"[["-1","0"],["0","-2"]]"#).unwrap();
    let o = tropcount(&["render", "--degree", "1", "--points", pts.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let svg = stdout(&o);
    assert!(svg.contains(r#"version="1.1""#));
    assert_eq!(svg.matches("<line ").count(), 3);
    assert_eq!(svg.matches("<circle ").count(), 2);
    // Only the multiplicity caption; no weight labels for weight 1.
    assert_eq!(svg.matches("<text ").count(), 1);
}

#[test]
fn render_labels_heavy_edges() {
    // The (−2,0) end has weight 2 on every curve.
    let degree = r#"[{"v":[-2,0],"mult":1},{"v":[0,-1],"mult":2},{"v":[1,1],"mult":2}]"#;
    let args = ["--degree", degree, "--seed", "5", "--perturb", "1/100"];
    let svg = tropcount(&[&["render"][..], &args].concat());
    assert!(svg.status.success(), "{}", String::from_utf8_lossy(&svg.stderr));
    let count = tropcount(&[&["count"][..], &args].concat());
    let v: Value = serde_json::from_str(&stdout(&count)).unwrap();
    let curves = v["curves"].as_array().unwrap();
    let gcd = |a: i64, b: i64| (1..=a.abs().max(b.abs())).rev().find(|d| a % d == 0 && b % d == 0).unwrap_or(1);
    // Each edge of weight > 1 carries one label per flag pair or end.
    let heavy: usize = curves
        .iter()
        .map(|c| {
            let rec = &c["curve"];
            let glue = rec["glue"].as_array().unwrap();
            rec["v"]
                .as_array()
                .unwrap()
                .iter()
                .enumerate()
                .filter(|(f, w)| {
                    let j = glue[*f].as_u64().unwrap() as usize;
                    j >= *f && gcd(w[0].as_i64().unwrap(), w[1].as_i64().unwrap()) > 1
                })
                .count()
        })
        .sum();
    assert!(heavy > 0);
    assert_eq!(stdout(&svg).matches("<text ").count(), curves.len() + heavy);
}

#[test]
fn wrong_point_count_is_a_validation_error() {
    let pts = scratch("three.json");
    std::fs::write(&pts, r#"[["0","0"],["1","2"],["3","5"]]"#).unwrap();
    let o = tropcount(&["count", "--degree", "1", "--points", pts.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let o = tropcount(&["count", "--degree", "not json"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn wall_configuration_needs_perturbation() {
    let pts = scratch("wall.json");
    std::fs::write(&pts, r#"[["0","0"],["3","0"]]"#).unwrap();
    let o = tropcount(&["count", "--degree", "1", "--points", pts.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    let o = tropcount(&["count", "--degree", "1", "--points", pts.to_str().unwrap(), "--perturb", "0.01"]);
    assert!(o.status.success());
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["N"], 1);
}

#[test]
fn invariance_and_wall_checks_pass_for_conics() {
    let o = tropcount(&["invariance", "--degree", "2", "--trials", "4", "--seed", "3"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["N"], 1);
    let o = tropcount(&["wall", "--degree", "1", "--trials", "3"]);
    assert!(o.status.success());
    for line in stdout(&o).lines() {
        let r: Value = serde_json::from_str(line).unwrap();
        for side in r["sides"].as_array().unwrap() {
            assert_eq!(side[0], side[1]);
        }
    }
}

#[test]
fn cache_directory_is_reused() {
    let dir = scratch("cache");
    let args = ["types", "--degree", "2", "--max-codim", "1", "--shapes", "--cache-dir", dir.to_str().unwrap()];
    let first = tropcount(&args);
    assert!(first.status.success());
    assert_eq!(std::fs::read_dir(&dir).unwrap().count(), 1);
    let second = tropcount(&args);
    assert_eq!(first.stdout, second.stdout);
}

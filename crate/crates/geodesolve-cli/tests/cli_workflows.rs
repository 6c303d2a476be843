//! End-to-end drives of the binary: generation across families, the bench
//! grid with resume, and report aggregation with SVG output.

use std::path::Path;
use std::process::Command;

fn geodesolve(dir: &Path, args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_geodesolve"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = geodesolve(dir, args);
    assert!(
        out.status.success(),
        "command {args:?} failed:\n{}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn generate_solve_bench_report_cycle() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();

    // generation across the three families
    ok(
        dir,
        &[
            "generate",
            "--family",
            "euclid",
            "--n",
            "7",
            "--p",
            "0.8",
            "--seed",
            "3",
            "--out",
            "euclid-7.json",
            "--solution-out",
            "witness.json",
            "--udgp-out",
            "euclid-7-u.json",
        ],
    );
    ok(
        dir,
        &[
            "generate",
            "--family",
            "gtype",
            "--graph-type",
            "torus",
            "--n",
            "3",
            "--seed",
            "5",
            "--out",
            "torus-3.json",
        ],
    );
    std::fs::write(
        dir.join("atoms.txt"),
        "C 0 0 0\nC 1.4 0 0\nN 1.4 1.4 0\nO 9 9 9\n",
    )
    .unwrap();
    ok(
        dir,
        &[
            "generate",
            "--family",
            "disk",
            "--coords",
            "atoms.txt",
            "--radius",
            "2.0",
            "--dim",
            "3",
            "--out",
            "disk.json",
        ],
    );
    let disk: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("disk.json")).unwrap()).unwrap();
    assert_eq!(disk["n"], 4);
    assert_eq!(disk["k"], 3);
    assert_eq!(disk["edges"].as_array().unwrap().len(), 3); // outlier isolated

    // a single solve produces a solution file and a report line
    let line = ok(
        dir,
        &[
            "solve",
            "--instance",
            "euclid-7.json",
            "--formulation",
            "quartic",
            "--seed",
            "2",
            "--restarts",
            "8",
            "--out",
            "sol.json",
        ],
    );
    assert!(line.contains("formulation=quartic"));
    assert!(line.contains("status="));
    assert!(dir.join("sol.json").exists());

    // bench grid: 2 instances x 2 formulations, then resume adds nothing
    std::fs::write(
        dir.join("bench.json"),
        serde_json::json!({
            "instances": ["euclid-7.json", "torus-3.json"],
            "formulations": ["quartic", "dualddp_pca_quartic"],
            "time_limit_s": 60.0,
            "seed": 11,
            "restarts": 5,
            "out_csv": "results.csv"
        })
        .to_string(),
    )
    .unwrap();
    ok(dir, &["bench", "--config", "bench.json", "--jobs", "2"]);
    let csv = std::fs::read_to_string(dir.join("results.csv")).unwrap();
    assert_eq!(
        csv.lines().count(),
        1 + 4,
        "header plus one row per grid pair"
    );
    ok(dir, &["bench", "--config", "bench.json", "--jobs", "2"]);
    let csv_again = std::fs::read_to_string(dir.join("results.csv")).unwrap();
    assert_eq!(
        csv.lines().count(),
        csv_again.lines().count(),
        "resume re-ran pairs"
    );

    // report: aggregate by formulation and draw the plot
    let agg = ok(
        dir,
        &[
            "report",
            "--csv",
            "results.csv",
            "--group-by",
            "formulation",
            "--out-csv",
            "agg.csv",
            "--out-svg",
            "plot.svg",
            "--scale-cpu",
        ],
    );
    assert!(agg.starts_with("group,count,mde,lde,cpu_seconds"));
    assert!(agg.contains("quartic,2,"));
    let svg = std::fs::read_to_string(dir.join("plot.svg")).unwrap();
    assert!(svg.starts_with("<svg xmlns"));
    assert!(svg.contains("</svg>"));

    // unknown formulation fails fast with a readable error
    let bad = geodesolve(
        dir,
        &[
            "solve",
            "--instance",
            "euclid-7.json",
            "--formulation",
            "nonsense",
        ],
    );
    assert!(!bad.status.success());
    assert!(String::from_utf8_lossy(&bad.stderr).contains("unknown formulation"));
}

#[test]
fn bench_unassigned_rows_carry_similarity() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    ok(
        dir,
        &[
            "generate",
            "--family",
            "euclid",
            "--n",
            "4",
            "--p",
            "1.0",
            "--seed",
            "21",
            "--out",
            "ref.json",
            "--udgp-out",
            "u.json",
        ],
    );
    std::fs::write(
        dir.join("bench.json"),
        serde_json::json!({
            "instances": ["u.json"],
            "formulations": ["umidualddp_quartic", "uquarticcont"],
            "time_limit_s": 120.0,
            "seed": 2,
            "restarts": 8,
            "out_csv": "u-results.csv",
            "references": {"u.json": "ref.json"}
        })
        .to_string(),
    )
    .unwrap();
    ok(dir, &["bench", "--config", "bench.json", "--jobs", "1"]);
    let csv = std::fs::read_to_string(dir.join("u-results.csv")).unwrap();
    let milp_row = csv
        .lines()
        .find(|l| l.contains("umidualddp_quartic"))
        .expect("cone reconstruction row present");
    let fields: Vec<&str> = milp_row.split(',').collect();
    assert!(!fields[7].is_empty(), "gphsim column empty in: {milp_row}");
    let sim: f64 = fields[7].parse().unwrap();
    assert!((-1.0..=1.0).contains(&sim));
    // grouping by similarity picks the row up
    let agg = ok(
        dir,
        &["report", "--csv", "u-results.csv", "--group-by", "gphsim"],
    );
    assert!(agg.lines().count() >= 2, "no similarity groups in: {agg}");
}

#[test]
fn usolve_with_reference_reports_similarity() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    ok(
        dir,
        &[
            "generate",
            "--family",
            "euclid",
            "--n",
            "4",
            "--p",
            "1.0",
            "--seed",
            "8",
            "--out",
            "ref.json",
            "--udgp-out",
            "u.json",
        ],
    );
    let line = ok(
        dir,
        &[
            "usolve",
            "--instance",
            "u.json",
            "--cone",
            "dualdd",
            "--refine",
            "quartic",
            "--seed",
            "1",
            "--restarts",
            "6",
            "--time-limit",
            "120",
            "--reference",
            "ref.json",
            "--out",
            "usol.json",
        ],
    );
    assert!(line.contains("gphsim="), "missing similarity in: {line}");
    let sol: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("usol.json")).unwrap()).unwrap();
    assert!(sol["assignment"].is_array());
    assert_eq!(sol["coords"].as_array().unwrap().len(), 4);
}

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use lhp_cli::{parse_config, CliError};
use lhp_core::sampling::dump::read_scalar;

fn lhp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lhp"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn out_prefix(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_string()
}

#[test]
fn exit_codes() {
    assert_eq!(lhp(&["crofton", "--lambda", "1.5"]).status.code(), Some(1));
    assert_eq!(lhp(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(lhp(&["crofton", "--n", "many"]).status.code(), Some(1));
    assert_eq!(lhp(&["--help"]).status.code(), Some(0));
    // the limit law needs d ≥ 4
    assert_eq!(lhp(&["limit", "--d", "3"]).status.code(), Some(1));
    let numerical = CliError::Core(lhp_core::Error::NumericalFailure {
        what: "test",
        achieved: 1.0,
        requested: 0.1,
    });
    assert_eq!(numerical.exit_code(), 2);
}

#[test]
fn crofton_sweep() {
    let dir = tempfile::tempdir().unwrap();
    let out = out_prefix(dir.path(), "crofton");
    let run = lhp(&[
        "crofton", "--d", "2,3", "--lambda", "0,0.5,1", "--R", "2", "--n", "400", "--seed", "3",
        "--out", &out,
    ]);
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    let stdout = String::from_utf8(run.stdout).unwrap();
    assert_eq!(stdout.lines().filter(|l| l.contains(" z ")).count(), 6);
    let csv = fs::read_to_string(format!("{out}.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("d,lambda,R,n,mc_mean,analytic_mean,z"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 6);
    for row in rows {
        let z: f64 = row.rsplit(',').next().unwrap().parse().unwrap();
        assert!(z.abs() < 5.0, "{row}");
    }
}

#[test]
fn regimes_include_the_limit_column() {
    let dir = tempfile::tempdir().unwrap();
    let out = out_prefix(dir.path(), "reg");
    let run = lhp(&["regimes", "--d", "4", "--R", "2,3", "--n", "100", "--out", &out]);
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    let csv = fs::read_to_string(format!("{out}.csv")).unwrap();
    let header: Vec<&str> = csv.lines().next().unwrap().split(',').collect();
    let idx = header.iter().position(|h| *h == "ks_limit").unwrap();
    assert_eq!(csv.lines().count(), 3);
    for row in csv.lines().skip(1) {
        let v: f64 = row.split(',').nth(idx).unwrap().parse().unwrap();
        assert!((0.0..=1.0).contains(&v));
    }
}

#[test]
fn render_is_well_formed_and_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let a = out_prefix(dir.path(), "a");
    let b = out_prefix(dir.path(), "b");
    for out in [&a, &b] {
        let run = lhp(&["render", "--d", "2", "--lambda", "1", "--R", "3", "--seed", "5", "--out", out]);
        assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    }
    let svg = fs::read(format!("{a}.svg")).unwrap();
    assert_eq!(svg, fs::read(format!("{b}.svg")).unwrap());
    let text = String::from_utf8(svg).unwrap();
    let doc = roxmltree::Document::parse(&text).unwrap();
    let root = doc.root_element();
    assert_eq!(root.tag_name().name(), "svg");
    assert_eq!(root.attribute("viewBox"), Some("-1.05 -1.05 2.1 2.1"));
    let circles = root.children().filter(|n| n.has_tag_name("circle")).count();
    assert_eq!(circles, 2);
    let lines: Vec<_> = root.children().filter(|n| n.has_tag_name("polyline")).collect();
    assert!(!lines.is_empty());
    for pl in lines {
        let pts: Vec<(f64, f64)> = pl
            .attribute("points")
            .unwrap()
            .split_whitespace()
            .map(|p| {
                let (x, y) = p.split_once(',').unwrap();
                (x.parse().unwrap(), y.parse().unwrap())
            })
            .collect();
        assert!(pts.len() >= 256);
        assert!(pts.iter().all(|(x, y)| x.hypot(*y) < 1.0));
    }
}

#[test]
fn render_rejects_higher_dimensions() {
    assert_eq!(lhp(&["render", "--d", "3"]).status.code(), Some(1));
}

#[test]
fn sample_output_is_independent_of_thread_count() {
    let dir = tempfile::tempdir().unwrap();
    let one = out_prefix(dir.path(), "one");
    let many = out_prefix(dir.path(), "many");
    for (out, threads) in [(&one, "1"), (&many, "4")] {
        let run = lhp(&[
            "sample", "--d", "3", "--lambda", "0.5", "--R", "2.5", "--n", "200", "--seed", "11",
            "--threads", threads, "--out", out,
        ]);
        assert!(run.status.success());
    }
    let a = fs::read(format!("{one}.csv")).unwrap();
    assert_eq!(a, fs::read(format!("{many}.csv")).unwrap());
    assert_eq!(String::from_utf8(a).unwrap().lines().count(), 201);
}

#[test]
fn limit_writes_cf_cdf_and_dump() {
    let dir = tempfile::tempdir().unwrap();
    let out = out_prefix(dir.path(), "z4");
    let dump = dir.path().join("z4.hypf");
    let run = lhp(&[
        "limit", "--d", "4", "--n", "300", "--seed", "2", "--out", &out, "--dump",
        dump.to_str().unwrap(),
    ]);
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    let cf = fs::read_to_string(format!("{out}_cf.csv")).unwrap();
    assert!(cf.starts_with("t,re,im\n"));
    let mid: Vec<f64> = cf.lines().nth(401).unwrap().split(',').map(|v| v.parse().unwrap()).collect();
    assert_eq!(mid[0], 0.0);
    assert!((mid[1] - 1.0).abs() < 1e-15 && mid[2].abs() < 1e-15);
    let cdf = fs::read_to_string(format!("{out}_cdf.csv")).unwrap();
    let fs_: Vec<f64> = cdf
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert!(fs_.windows(2).all(|w| w[0] <= w[1]));
    let (header, draws) = read_scalar(&mut fs::File::open(&dump).unwrap()).unwrap();
    assert_eq!((header.d, header.count, draws.len()), (4, 300, 300));
}

#[test]
fn config_file_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("exp.conf");
    fs::write(&file, "lambda=0.5\nR=3,4,5\n").unwrap();
    let path = file.to_str().unwrap();
    let cfg = parse_config(["lhp", "cumulants", "--config", path, "--R", "6"]).unwrap();
    assert_eq!(cfg.r_list, vec![6.0]);
    assert_eq!(cfg.lambda_list, vec![0.5]);
    let cfg = parse_config(["lhp", "cumulants", "--config", path]).unwrap();
    assert_eq!(cfg.r_list, vec![3.0, 4.0, 5.0]);

    fs::write(&file, "lambda=0.5\nradius=3\n").unwrap();
    let run = lhp(&["cumulants", "--config", path]);
    assert_eq!(run.status.code(), Some(1));
    let err = String::from_utf8(run.stderr).unwrap();
    assert!(err.contains("line 2") && err.contains("valid keys"), "{err}");
}

#[test]
fn cumulant_table_from_the_binary() {
    let dir = tempfile::tempdir().unwrap();
    let out = out_prefix(dir.path(), "cum");
    let run = lhp(&["cumulants", "--d", "3,4", "--R", "2,4", "--k", "2,3", "--out", &out]);
    assert!(run.status.success());
    let csv = fs::read_to_string(format!("{out}.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("d,lambda,R,k,I_value"));
    assert_eq!(csv.lines().count(), 1 + 2 * 2 * 2);
}

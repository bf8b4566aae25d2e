use std::path::Path;
use std::process::{Command, Output};

fn zetalab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zetalab")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn scheme_rows() {
    let o = zetalab(&["scheme", "--T", "1e5", "--threshold", "0.8"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "j,T_j,P_j,range_prime_count");
    assert_eq!(lines.len(), 3);
    assert!(lines[2].starts_with("3,"));
}

#[test]
fn scheme_dumps_nj() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("n3.csv");
    let o = zetalab(&[
        "scheme",
        "--T",
        "1e4",
        "--boundaries",
        "7.5,14,40",
        "--J",
        "3",
        "--c-omega",
        "1",
        "--poly-output",
        path.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("n,re,im\n1,1,0\n"));
}

#[test]
fn moments_single_row() {
    let o = zetalab(&["moments", "--T", "1e4", "--k", "1", "--h", "0", "--target", "zeta"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 2);
    let f: Vec<&str> = lines[1].split(',').collect();
    assert_eq!(&f[..4], &["10000", "1", "0", "zeta"]);
    let ratio: f64 = f[8].parse().unwrap();
    assert!((ratio - 1.0).abs() < 0.15);
}

#[test]
fn eval_near_first_zero() {
    let o = zetalab(&["eval", "--t", "14.134725141734693,20", "--method", "em"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    let z: f64 = out.lines().nth(1).unwrap().split(',').nth(1).unwrap().parse().unwrap();
    assert!(z.abs() < 1e-9);
}

#[test]
fn exit_codes() {
    let o = zetalab(&["moments", "--T", "1e4", "--target", "xi"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).starts_with("error,config,2,"));
    let o = zetalab(&["moments", "--T", "10"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).starts_with("error,regime,3,"));
    let o = zetalab(&["eval", "--t-min", "100", "--t-max", "1e9", "--step", "1"]);
    assert_eq!(o.status.code(), Some(4));
    assert!(stderr(&o).starts_with("error,capacity,4,"));
    let o = zetalab(&["twisted", "--T", "1e5", "--poly", "one", "--method", "contour", "--lemma", "2", "--radii", "paper"]);
    assert_eq!(o.status.code(), Some(3));
    let o = zetalab(&["moments"]);
    assert_eq!(o.status.code(), Some(2));
    let o = zetalab(&["frobnicate"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "T = 1e5\nthreshold = 0.8\n").unwrap();
    let from_file = zetalab(&["scheme", "--config", cfg.to_str().unwrap()]);
    assert!(from_file.status.success());
    assert_eq!(stdout(&from_file).lines().count(), 3);
    let overridden = zetalab(&["scheme", "--config", cfg.to_str().unwrap(), "--threshold", "2.0"]);
    assert!(overridden.status.success());
    assert_eq!(stdout(&overridden).lines().count(), 2);
    std::fs::write(&cfg, "T = 1e5\nnot_a_key = 1\n").unwrap();
    let bad = zetalab(&["scheme", "--config", cfg.to_str().unwrap()]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn inequality_report_and_output_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("ineq.csv");
    let o = zetalab(&[
        "inequality",
        "--boundaries",
        "7.5,14,40",
        "--samples",
        "25",
        "--k",
        "1,2",
        "--seed",
        "3",
        "--output",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = std::fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "t,k,lhs,rhs,margin,pass");
    assert_eq!(lines.len(), 51);
    assert!(lines[1..].iter().all(|l| l.ends_with(",true")));
}

#[test]
fn holder_mode() {
    let o = zetalab(&["inequality", "--holder", "--T", "1e3", "--k", "1,2", "--points-per-gap", "8"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    assert_eq!(out.lines().count(), 7);
    assert!(out.lines().skip(1).all(|l| l.ends_with(",true")));
}

#[test]
fn twisted_contour_rows() {
    let o = zetalab(&[
        "twisted",
        "--T",
        "1e4",
        "--poly",
        "one",
        "--method",
        "contour",
        "--lemma",
        "1",
        "--nodes-per-circle",
        "32",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "T,polynomial_id,method,weight,value,nodes,mesh,ratio");
    assert_eq!(lines.len(), 3);
    assert!(lines[1].starts_with("10000,one,contour,dzeta2,"));
    assert!(lines[2].starts_with("10000,one,contour,dZ2,"));
}

#[test]
fn moments_cache_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let args = ["moments", "--T", "1e3", "--k", "1.5", "--h", "0.5", "--cache-dir", d];
    let first = zetalab(&args);
    assert!(first.status.success(), "{}", stderr(&first));
    let files = std::fs::read_dir(Path::new(d)).unwrap().count();
    assert!(files >= 1);
    let second = zetalab(&args);
    assert_eq!(stdout(&first), stdout(&second));
}

#[test]
fn selftest_is_identical_across_worker_counts() {
    let run = |w: &str| {
        let o = zetalab(&["selftest", "--seed", "11", "--samples", "12", "--workers", w]);
        assert!(o.status.success(), "{}", stderr(&o));
        o.stdout
    };
    let one = run("1");
    assert_eq!(one, run("4"));
    assert_eq!(one, run("8"));
    assert!(String::from_utf8(one).unwrap().starts_with("suite,check,value,tolerance,pass\n"));
}

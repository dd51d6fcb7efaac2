use std::process::{Command, Output};

fn regcomp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_regcomp")).args(args).output().expect("binary runs")
}

fn regcomp_threads(args: &[&str], threads: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_regcomp"))
        .args(args)
        .env("RAYON_NUM_THREADS", threads)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn qmatrix_ewens_one_is_uniform() {
    let o = regcomp(&["qmatrix", "--family", "ewens:theta=1", "--n", "3"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "n  q(n:1..n)\n1  1\n2  1/2 1/2\n3  1/3 1/3 1/3\n");
    let o = regcomp(&["qmatrix", "--family", "ewens:theta=1", "--n", "2", "--csv"]);
    assert_eq!(stdout(&o), "n,m,q\n1,1,1\n2,1,1/2\n2,2,1/2\n");
}

#[test]
fn single_cpf_value() {
    let o = regcomp(&["cpf", "--family", "two-param:alpha=1/2,theta=0", "--n", "3", "--composition", "2,1"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "1/8");
    let o = regcomp(&["ppf", "--family", "ewens:theta=1", "--n", "3", "--partition", "2,1"]);
    assert_eq!(stdout(&o).trim(), "1/2");
}

#[test]
fn float_backend_prints_decimals() {
    let o = regcomp(&["cpf", "--family", "ewens:theta=1", "--n", "3", "--composition", "3", "--backend", "float"]);
    assert!(o.status.success());
    let out = stdout(&o);
    let digits = out.trim().trim_start_matches("0.");
    assert_eq!(digits.len(), 17);
    assert!((out.trim().parse::<f64>().unwrap() - 1.0 / 3.0).abs() < 1e-14);
}

#[test]
fn json_echoes_inputs() {
    let o = regcomp(&["cpf", "--family", "ewens:theta=1", "--n", "2", "--json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["family"], "ewens:theta=1");
    assert_eq!(v["backend"], "exact");
    assert_eq!(v["rows"].as_array().unwrap().len(), 2);
}

#[test]
fn green_compare_closed_columns() {
    let o = regcomp(&["green", "--family", "ewens:theta=1", "--n", "2", "--compare-closed", "--csv"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "n,j,g,closed,diff\n1,1,1,1,0\n2,1,1,1/9,-8/9\n2,2,1/2,2,3/2\n");
}

#[test]
fn usage_errors_exit_two() {
    let o = regcomp(&["cpf", "--family", "ewens:theta=0.5", "--backend", "exact", "--n", "2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("exact backend"));
    let o = regcomp(&["cpf", "--family", "ewens:thta=1", "--n", "2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("family specs:"));
    let o = regcomp(&["check", "--suite", "nope"]);
    assert_eq!(o.status.code(), Some(2));
    let o = regcomp(&["cpf", "--n", "2"]);
    assert_eq!(o.status.code(), Some(2));
    let o = regcomp(&["cpf", "--family", "ewens:theta=1", "--n", "3", "--composition", "1,1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn consistency_check_passes() {
    let o = regcomp(&["check", "--suite", "consistency", "--n-max", "7", "--families", "all"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.ends_with("PASS\n"));
    assert_eq!(out.matches(" PASS ").count(), 9);
}

#[test]
fn blocks_csv_columns_and_reproducibility() {
    let args = ["blocks", "--family", "two-param:alpha=1/2,theta=1/2", "--n", "50,200", "--reps", "300", "--seed", "7", "--csv"];
    let a = regcomp_threads(&args, "1");
    let b = regcomp_threads(&args, "4");
    assert!(a.status.success());
    assert_eq!(stdout(&a), stdout(&b));
    let out = stdout(&a);
    assert!(out.starts_with("n,stat,estimate,se,lo95,hi95,target,ratio\n"));
    assert!(out.contains("\n200,K,"));
    let j = regcomp(&["blocks", "--family", "ewens:theta=1", "--n", "20", "--reps", "50", "--seed", "9", "--json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&j)).unwrap();
    assert_eq!(v["seed"], 9);
    assert_eq!(v["family"], "ewens:theta=1");
}

#[test]
fn sample_stream_is_reproducible() {
    let args = ["sample", "--family", "beta-sb:gamma=2,theta=3", "--kind", "stick-breaking", "--n", "8", "--reps", "20", "--seed", "5"];
    let a = stdout(&regcomp(&args));
    assert_eq!(a, stdout(&regcomp(&args)));
    assert_eq!(a.lines().count(), 20);
    for line in a.lines() {
        let total: usize = line.split(',').map(|p| p.parse::<usize>().unwrap()).sum();
        assert_eq!(total, 8);
    }
    let bits = stdout(&regcomp(&["sample", "--family", "ewens:theta=1", "--n", "5", "--reps", "3", "--bits"]));
    for line in bits.lines() {
        assert_eq!(line.len(), 5);
        assert!(line.starts_with('1'));
    }
}

#[test]
fn arrange_is_a_permutation() {
    let o = regcomp(&["arrange", "--eta", "2", "--k", "7", "--seed", "3"]);
    let mut v: Vec<usize> = stdout(&o).trim().split(',').map(|x| x.parse().unwrap()).collect();
    v.sort();
    assert_eq!(v, (1..=7).collect::<Vec<_>>());
}

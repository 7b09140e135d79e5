use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use gkw::estim::{log_likelihood, Dataset};
use gkw::{cdf, Params};
use serde_json::Value;
use tempfile::TempDir;

fn gkw(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gkw"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_str(&stdout(o)).unwrap()
}

fn eval_one(theta: &str, at: &str, what: &str) -> f64 {
    let o = gkw(&["eval", "--theta", theta, "--at", at, "--what", what]);
    assert!(o.status.success());
    let out = stdout(&o);
    let row = out.lines().nth(1).unwrap();
    row.split('\t').nth(1).unwrap().parse().unwrap()
}

fn read_sample(path: &Path) -> Vec<f64> {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x"));
    lines.map(|l| l.parse().unwrap()).collect()
}

#[test]
fn eval_values() {
    assert_eq!(eval_one("1,1,1,0,1", "0.3", "pdf"), 1.0);
    assert_eq!(eval_one("2,2,1,0,1", "0.5", "cdf"), 0.4375);
    let t: Params = "2,3,1.5,0.5,2".parse().unwrap();
    let med = eval_one("2,3,1.5,0.5,2", "0.5", "quantile");
    assert!((cdf(&t, med) - 0.5).abs() < 1e-11);
    let o = gkw(&["eval", "--theta", "2,3,1.5,0.5,2", "--at", "0.1,0.5,0.9", "--what", "cdf"]);
    assert_eq!(stdout(&o).lines().count(), 4);
}

#[test]
fn eval_rejects_bad_input() {
    for args in [
        vec!["eval", "--theta", "2,3,-1,0.5,2", "--at", "0.5"],
        vec!["eval", "--theta", "2,3,1", "--at", "0.5"],
        vec!["eval", "--theta", "1,1,1,0,1", "--at", "1.5", "--what", "quantile"],
        vec!["eval", "--theta", "1,1,1,0,1", "--at", "abc"],
    ] {
        let o = gkw(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(!o.stderr.is_empty());
    }
}

#[test]
fn sample_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    for p in [&a, &b] {
        let o = gkw(&["sample", "--theta", "2,3,1.5,0.5,2", "--n", "5", "--seed", "7", "--out", p.to_str().unwrap()]);
        assert!(o.status.success());
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    assert_eq!(read_sample(&a).len(), 5);
}

#[test]
fn sample_distribution() {
    let dir = TempDir::new().unwrap();
    let p = dir.path().join("u.csv");
    gkw(&["sample", "--theta", "1,1,1,0,1", "--n", "100000", "--seed", "3", "--out", p.to_str().unwrap()]);
    let u = read_sample(&p);
    let mean = u.iter().sum::<f64>() / u.len() as f64;
    assert!((mean - 0.5).abs() < 0.005, "{mean}");

    let t: Params = "2,3,1.5,0.5,2".parse().unwrap();
    gkw(&["sample", "--theta", "2,3,1.5,0.5,2", "--n", "100000", "--seed", "4", "--out", p.to_str().unwrap()]);
    let mut x = read_sample(&p);
    x.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = x.len() as f64;
    let ks = x
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            let f = cdf(&t, v);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max);
    assert!(ks < 1.628 / n.sqrt(), "{ks}");
}

#[test]
fn sample_unwritable_is_io_error() {
    let o = gkw(&["sample", "--theta", "1,1,1,0,1", "--n", "3", "--out", "/nonexistent-dir/x.csv"]);
    assert_eq!(o.status.code(), Some(3));
    let o = gkw(&["sample", "--theta", "1,1,1,0,1", "--n", "0"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn props_outputs() {
    let v = json(&gkw(&["props", "--theta", "1,1,1,0,1", "--moments", "2", "--deviations"]));
    assert!((v["mu1"].as_f64().unwrap() - 0.5).abs() < 1e-12);
    assert!((v["mu2"].as_f64().unwrap() - 1.0 / 3.0).abs() < 1e-12);
    assert!((v["delta1"].as_f64().unwrap() - 0.25).abs() < 1e-12);
    assert!((v["delta2"].as_f64().unwrap() - 0.25).abs() < 1e-12);
    assert_eq!(v["schema"], "gkw-report/1");
    assert!(v["reports"]["mu1"]["tail_bound"].is_number());

    // log-quadrature oracle (mpmath)
    let v = json(&gkw(&["props", "--theta", "2,3,1.5,0.5,2", "--entropy", "2"]));
    assert!((v["entropy"]["value"].as_f64().unwrap() - -0.699609932350594).abs() < 1e-6, "{v}");

    let o = gkw(&["props", "--theta", "0.5,0.7,0.1,3,4", "--entropy", "2", "--quiet"]);
    assert!(o.stderr.is_empty());
    let v = json(&o);
    assert_eq!(v["entropy"]["divergent"], true);
    assert!(v["entropy"]["value"].is_null());

    let v = json(&gkw(&["props", "--theta", "2,2,1,0,1", "--lmoments", "--series-max-terms", "600"]));
    assert!((v["lmoments"][0].as_f64().unwrap() - 8.0 / 15.0).abs() < 1e-10);
}

fn write_sample(dir: &TempDir, name: &str, theta: &str, n: usize, seed: u64) -> String {
    let p = dir.path().join(name);
    let o = gkw(&["sample", "--theta", theta, "--n", &n.to_string(), "--seed", &seed.to_string(), "--out", p.to_str().unwrap()]);
    assert!(o.status.success());
    p.to_str().unwrap().to_string()
}

fn fit_entry<'a>(report: &'a Value, model: &str) -> &'a Value {
    report["fits"].as_array().unwrap().iter().find(|f| f["model"] == model).unwrap()
}

#[test]
fn fit_recovers_kw() {
    let dir = TempDir::new().unwrap();
    let data = write_sample(&dir, "kw.csv", "2,3,1,0,1", 5000, 11);
    let out = dir.path().join("r.json");
    let plot = dir.path().join("p.tsv");
    let o = gkw(&["fit", "--data", &data, "--models", "gkw,kw", "--out", out.to_str().unwrap(), "--plot", plot.to_str().unwrap(), "--quiet"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let r: Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    let kw = fit_entry(&r, "kw");
    for (k, truth) in [2.0, 3.0].iter().enumerate() {
        let e = &kw["estimates"][k];
        let (v, se) = (e["value"].as_f64().unwrap(), e["se"].as_f64().unwrap());
        assert!((v - truth).abs() < 3.0 * se, "{e}");
        assert!(e["display"].as_str().unwrap().contains('('));
    }
    assert!(fit_entry(&r, "gkw")["loglik"].as_f64().unwrap() >= kw["loglik"].as_f64().unwrap() - 1e-6);
    assert_eq!(r["data"]["n"], 5000);

    // recorded log-likelihoods reproduce
    let values = read_sample(Path::new(&data));
    let ds = Dataset::new(values, "check").unwrap();
    for f in r["fits"].as_array().unwrap() {
        let t: Params = serde_json::from_value(f["theta_hat"].clone()).unwrap();
        assert!((log_likelihood(&t, &ds) - f["loglik"].as_f64().unwrap()).abs() < 1e-6);
    }

    let tsv = fs::read_to_string(&plot).unwrap();
    let mut lines = tsv.lines();
    assert_eq!(lines.next(), Some("bin_left\tbin_right\thist_density\tgkw\tkw"));
    assert_eq!(lines.count(), 512);
}

#[test]
fn fit_report_and_lr() {
    let dir = TempDir::new().unwrap();
    let data = write_sample(&dir, "b.csv", "1,1,2.5,0.3,1", 400, 5);
    let out = dir.path().join("r.json");
    let args = ["fit", "--data", &data, "--models", "gkw,bkw,beta,kw", "--seed", "9", "--quiet"];
    let first = gkw(&args);
    let second = gkw(&args);
    assert!(first.status.success());
    assert_eq!(first.stdout, second.stdout);
    fs::write(&out, &first.stdout).unwrap();
    let r: Value = serde_json::from_slice(&first.stdout).unwrap();
    assert_eq!(r["seed"], 9);
    assert!(!r["lr_tests"].as_array().unwrap().is_empty());

    let rp = out.to_str().unwrap();
    let v = json(&gkw(&["lr", "--report", rp, "--null", "beta", "--alt", "gkw"]));
    assert_eq!(v["df"], 3);
    let p = v["p_value"].as_f64().unwrap();
    assert!((0.0..=1.0).contains(&p));
    let v = json(&gkw(&["lr", "--report", rp, "--null", "bkw", "--alt", "gkw"]));
    assert_eq!(v["df"], 1);
    let v = json(&gkw(&["lr", "--report", rp, "--null", "kw", "--alt", "kw"]));
    assert_eq!((v["w"].as_f64(), v["p_value"].as_f64()), (Some(0.0), Some(1.0)));

    assert_eq!(gkw(&["lr", "--report", rp, "--null", "kw", "--alt", "beta"]).status.code(), Some(2));
    assert_eq!(gkw(&["lr", "--report", rp, "--null", "ekw", "--alt", "gkw"]).status.code(), Some(2));
    assert_eq!(gkw(&["lr", "--report", rp, "--null", "pkw", "--alt", "gkw"]).status.code(), Some(2));
}

#[test]
fn fit_input_errors() {
    let dir = TempDir::new().unwrap();
    let p = dir.path().join("d.csv");
    let ps = p.to_str().unwrap();

    fs::write(&p, "").unwrap();
    assert_eq!(gkw(&["fit", "--data", ps, "--models", "kw"]).status.code(), Some(2));

    fs::write(&p, "x\n0.2\n1.0\n0.4\n0\n").unwrap();
    let o = gkw(&["fit", "--data", ps, "--models", "kw"]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("lines 3, 5"), "{err}");

    let o = gkw(&["fit", "--data", ps, "--models", "kw", "--shrink"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stderr).contains("shrink"));

    fs::write(&p, "# percent\r\n20\r\n35\r\n50\r\n65\r\n").unwrap();
    assert_eq!(gkw(&["fit", "--data", ps, "--models", "kw"]).status.code(), Some(2));
    let v = json(&gkw(&["fit", "--data", ps, "--models", "kw", "--percent"]));
    assert_eq!(v["data"]["n"], 4);

    fs::write(&p, "0.2\nfoo\n0.3\n").unwrap();
    let o = gkw(&["fit", "--data", ps, "--models", "kw"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));

    assert_eq!(gkw(&["fit", "--data", "/nonexistent/d.csv"]).status.code(), Some(3));
    fs::write(&p, "0.2\n0.3\n0.4\n").unwrap();
    assert_eq!(gkw(&["fit", "--data", ps, "--models", "pkw"]).status.code(), Some(2));
}

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use favest::vsh::eval_vsh;
use favest::VectorCoefficients;
use favest_cli::{read_coefficients, read_samples, write_coefficients, write_samples};
use num_complex::Complex;
use tempfile::TempDir;

fn favest(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_favest")).args(args).output().expect("binary runs")
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn gen_gl(dir: &TempDir, t: usize) -> PathBuf {
    let out = dir.path().join(format!("gl{t}.txt"));
    let o = favest(&["quad", "gen-gl", "--exactness", &t.to_string(), "--out", path_str(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    out
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines().map(|l| l.split(',').map(str::to_string).collect()).collect()
}

#[test]
fn gen_gl_rows_and_weights() {
    let dir = TempDir::new().unwrap();
    let f = gen_gl(&dir, 3);
    let text = std::fs::read_to_string(&f).unwrap();
    let rows: Vec<Vec<f64>> = text
        .lines()
        .filter(|l| !l.trim().is_empty() && !l.starts_with('#'))
        .map(|l| l.split_whitespace().map(|x| x.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 8);
    assert!(rows.iter().all(|r| r.len() == 4));
    let total: f64 = rows.iter().map(|r| r[3]).sum();
    assert!((total - 4.0 * std::f64::consts::PI).abs() < 1e-12);

    let one = std::fs::read_to_string(gen_gl(&dir, 0)).unwrap();
    assert_eq!(one.lines().filter(|l| !l.trim().is_empty() && !l.starts_with('#')).count(), 1);

    assert_eq!(favest(&["quad", "gen-gl", "--exactness", "-1"]).status.code(), Some(2));
}

#[test]
fn quad_check_exit_codes() {
    let dir = TempDir::new().unwrap();
    let gl = gen_gl(&dir, 10);
    let ok = favest(&["quad", "check", "--file", path_str(&gl), "--exactness", "10"]);
    assert_eq!(ok.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&ok.stdout).contains("PASS"));

    let random = dir.path().join("random.txt");
    let pts = favest::diagnostics::random_points(40, 3);
    let body: String = pts.iter().map(|p| format!("{:.17e} {:.17e} {:.17e}\n", p.x(), p.y(), p.z())).collect();
    std::fs::write(&random, body).unwrap();
    let fail = favest(&["quad", "check", "--file", path_str(&random), "--exactness", "4"]);
    assert_eq!(fail.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&fail.stdout).contains("FAIL"));

    let junk = dir.path().join("junk.txt");
    std::fs::write(&junk, "1 2\nnot numbers here\n").unwrap();
    assert_eq!(favest(&["quad", "check", "--file", path_str(&junk), "--exactness", "2"]).status.code(), Some(2));
}

#[test]
fn fwd_field_a_is_band_limited() {
    let dir = TempDir::new().unwrap();
    let gl = gen_gl(&dir, 22);
    let out = dir.path().join("a.json");
    let o = favest(&["fwd", "--points", path_str(&gl), "--field", "a", "--degree", "10", "--out", path_str(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let c = read_coefficients(std::fs::File::open(&out).unwrap()).unwrap();
    assert_eq!(c.l_max(), 10);
    let tail = c
        .div()
        .iter()
        .chain(c.curl().iter())
        .filter(|(l, _, _)| *l > 7)
        .fold(0.0f64, |m, (_, _, z)| m.max(z.norm()));
    assert!(tail <= 1e-8, "{tail}");
    assert!(c.div().max_abs() > 1e-3 || c.curl().max_abs() > 1e-3);
}

#[test]
fn fwd_from_zero_samples_file() {
    let dir = TempDir::new().unwrap();
    let gl = gen_gl(&dir, 8);
    let rule = favest::quadrature::load_rule::<f64>(&gl).unwrap();
    let zero = favest::TangentFieldSamples::new(rule.points().to_vec(), vec![Default::default(); rule.len()]).unwrap();
    let samples = dir.path().join("zero.csv");
    write_samples(&zero, std::fs::File::create(&samples).unwrap()).unwrap();
    let out = dir.path().join("z.json");
    let o = favest(&["fwd", "--points", path_str(&gl), "--field", path_str(&samples), "--degree", "3", "--out", path_str(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let c = read_coefficients(std::fs::File::open(&out).unwrap()).unwrap();
    assert_eq!(c, VectorCoefficients::zeros(3).unwrap());

    let missing = dir.path().join("nope.txt");
    let o = favest(&["fwd", "--points", path_str(&missing), "--field", "a", "--degree", "3"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn adj_matches_single_harmonic() {
    let dir = TempDir::new().unwrap();
    let gl = gen_gl(&dir, 6);
    let mut c = VectorCoefficients::zeros(2).unwrap();
    c.set_div(1, 0, Complex::new(1.0, 0.0)).unwrap();
    let coeffs = dir.path().join("c.json");
    write_coefficients(&c, std::fs::File::create(&coeffs).unwrap()).unwrap();
    let out = dir.path().join("s.csv");
    let o = favest(&["adj", "--coeffs", path_str(&coeffs), "--points", path_str(&gl), "--out", path_str(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let s = read_samples(std::fs::File::open(&out).unwrap()).unwrap();
    let rule = favest::quadrature::load_rule::<f64>(&gl).unwrap();
    assert_eq!(s.len(), rule.len());
    for (p, v) in s.points().iter().zip(s.values()) {
        let y = eval_vsh(1, 0, p).unwrap().div;
        for k in 0..3 {
            assert!((y[k] - v[k]).norm() < 1e-12);
        }
    }

    let zero = dir.path().join("zero.json");
    write_coefficients(&VectorCoefficients::zeros(4).unwrap(), std::fs::File::create(&zero).unwrap()).unwrap();
    let o = favest(&["adj", "--coeffs", path_str(&zero), "--points", path_str(&gl)]);
    assert!(o.status.success());
    let s = read_samples(&o.stdout[..]).unwrap();
    assert_eq!(s.max_norm(), 0.0);
}

#[test]
fn roundtrip_table() {
    let o = favest(&["roundtrip", "--field", "a", "--rule", "gl", "--degrees", "10"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = csv_rows(&String::from_utf8(o.stdout).unwrap());
    assert_eq!(rows[0], ["field", "rule", "L", "N", "rel_l2", "max_abs"]);
    assert_eq!(rows.len(), 2);
    assert!(rows[1][4].parse::<f64>().unwrap() <= 1e-9);

    let o = favest(&["roundtrip", "--field", "b", "--rule", "gl", "--degrees", "30"]);
    let rows = csv_rows(&String::from_utf8(o.stdout).unwrap());
    let rel: f64 = rows[1][4].parse().unwrap();
    assert!((1e-3..=1e-2).contains(&rel), "{rel}");

    let o = favest(&["roundtrip", "--field", "a", "--rule", "gl", "--degrees", ""]);
    assert!(o.status.success());
    assert_eq!(csv_rows(&String::from_utf8(o.stdout).unwrap()).len(), 1);
}

#[test]
fn roundtrip_on_design_file() {
    let dir = TempDir::new().unwrap();
    let ico = dir.path().join("ico.txt");
    std::fs::write(&ico, favest::quadrature::ICOSAHEDRON).unwrap();
    let o = favest(&["roundtrip", "--field", "a", "--rule", "design", path_str(&ico), "--degrees", "1,2"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = csv_rows(&String::from_utf8(o.stdout).unwrap());
    assert_eq!(rows.len(), 3);
    assert_eq!(rows[1][1], "design");
    assert_eq!(rows[1][3], "12");
}

#[test]
fn repeat_rows() {
    let o = favest(&["repeat", "--field", "a", "--rule", "gl", "--degree", "12"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = csv_rows(&String::from_utf8(o.stdout).unwrap());
    assert_eq!(rows[0], ["field", "rule", "L", "N", "t1_t0", "t2_t0", "t2_t1", "coeff"]);
    for x in &rows[1][4..] {
        assert!(x.parse::<f64>().unwrap() <= 1e-9);
    }

    let o = favest(&["repeat", "--field", "zero", "--rule", "gl", "--degree", "1"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = csv_rows(&String::from_utf8(o.stdout).unwrap());
    assert!(rows[1][4..].iter().all(|x| x.parse::<f64>().unwrap() == 0.0));
}

#[test]
fn bench_records() {
    let o = favest(&["bench", "--degrees", "8,16,32", "--repetitions", "1"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = csv_rows(&String::from_utf8(o.stdout).unwrap());
    assert_eq!(rows.len(), 4);
    assert_eq!(rows[0][4], "ratio_fwd");
    assert!(rows[1][4].is_empty());
    assert!(rows[2][4].parse::<f64>().unwrap() > 0.0 && rows[3][6].parse::<f64>().unwrap() > 0.0);

    let o = favest(&["bench", "--degrees", "4", "--repetitions", "1", "--path", "direct"]);
    assert_eq!(csv_rows(&String::from_utf8(o.stdout).unwrap()).len(), 2);
}

#[test]
fn stability_trend_and_determinism() {
    let args = ["stability", "--degree", "5", "--n-list", "100,1000,10000", "--seed", "4"];
    let o = favest(&args);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = csv_rows(&String::from_utf8(o.stdout.clone()).unwrap());
    assert_eq!(rows.len(), 4);
    let over_n = |r: &Vec<String>| r[4].parse::<f64>().unwrap();
    assert!(over_n(&rows[3]) < over_n(&rows[2]) && over_n(&rows[2]) < over_n(&rows[1]));
    assert_eq!(favest(&args).stdout, o.stdout);

    let single = favest(&["stability", "--degree", "5", "--n-list", "50"]);
    assert_eq!(csv_rows(&String::from_utf8(single.stdout).unwrap()).len(), 2);
}

#[test]
fn threads_flag_and_env() {
    let o = favest(&["--threads", "2", "repeat", "--field", "a", "--rule", "gl", "--degree", "4"]);
    assert!(o.status.success());
    let env = Command::new(env!("CARGO_BIN_EXE_favest"))
        .env("FAVEST_THREADS", "1")
        .args(["repeat", "--field", "a", "--rule", "gl", "--degree", "4"])
        .output()
        .unwrap();
    assert!(env.status.success());
    assert_eq!(env.stdout, o.stdout);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(favest(&["fwd", "--points"]).status.code(), Some(2));
    assert_eq!(favest(&["roundtrip", "--field", "q", "--degrees", "3"]).status.code(), Some(2));
    assert_eq!(favest(&["roundtrip", "--field", "a", "--rule", "sphere", "--degrees", "3"]).status.code(), Some(2));
}

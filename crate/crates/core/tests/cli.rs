use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn manproj(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_manproj"))
        .args(args)
        .env("MANPROJ_THREADS", "0")
        .output()
        .unwrap()
}

fn code(args: &[&str]) -> i32 {
    manproj(args).status.code().unwrap()
}

fn table(path: &Path) -> (Vec<String>, Vec<Vec<f64>>) {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    (header, rows)
}

struct Scratch(TempDir);

impl Scratch {
    fn new() -> Self {
        Self(tempfile::tempdir().unwrap())
    }

    fn path(&self, name: &str) -> PathBuf {
        self.0.path().join(name)
    }

    fn arg(&self, name: &str) -> String {
        self.path(name).to_string_lossy().into_owned()
    }
}

fn gen_circle(dir: &Scratch, name: &str, n: &str, seed: &str) {
    let out = dir.arg(name);
    let status = code(&[
        "gen", "--manifold", "circle", "--radius", "10", "--n", n, "--sigma", "0.1", "--seed", seed,
        "--out", &out,
    ]);
    assert_eq!(status, 0);
}

#[test]
fn gen_writes_the_annulus() {
    let dir = Scratch::new();
    gen_circle(&dir, "c.csv", "5000", "1");
    let (header, rows) = table(&dir.path("c.csv"));
    assert_eq!(header, ["x0", "x1"]);
    assert_eq!(rows.len(), 5000);
    for r in &rows {
        let rho = (r[0] * r[0] + r[1] * r[1]).sqrt();
        assert!((rho - 10.0).abs() < 0.1);
    }
    let text = std::fs::read_to_string(dir.path("c.csv")).unwrap();
    assert!(text.starts_with("# "));
}

#[test]
fn usage_errors_exit_two() {
    let dir = Scratch::new();
    let out = dir.arg("x.csv");
    assert_eq!(
        code(&["gen", "--manifold", "circle", "--n", "0", "--sigma", "0.1", "--out", &out]),
        2
    );
    gen_circle(&dir, "c.csv", "500", "1");
    let data = dir.arg("c.csv");
    // missing --tau
    assert_eq!(
        code(&["project", "--data", &data, "--queries", &data, "--d", "1", "--sigma", "0.1", "--out", &out]),
        2
    );
    assert_eq!(
        code(&[
            "geodesic", "--data", &data, "--x0", "10,0", "--v0", "0,0", "--d", "1", "--sigma", "0.1",
            "--tau", "10", "--out", &out,
        ]),
        2
    );
    // σ must stay below τ
    assert_eq!(
        code(&[
            "project", "--data", &data, "--queries", &data, "--d", "1", "--sigma", "20", "--tau", "10",
            "--out", &out,
        ]),
        2
    );
    assert_eq!(code(&["rates", "--manifold", "circle", "--ns", "100,200", "--sigma", "0.1", "--out", &out]), 2);
}

#[test]
fn data_errors_exit_one() {
    let dir = Scratch::new();
    let bad = dir.path("bad.csv");
    std::fs::write(&bad, "x0,x1\n1,2\n3,oops\n").unwrap();
    let bad = bad.to_string_lossy().into_owned();
    let out = dir.arg("r.csv");
    let o = manproj(&[
        "project", "--data", &bad, "--queries", &bad, "--d", "1", "--sigma", "0.1", "--tau", "10",
        "--out", &out,
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"));

    gen_circle(&dir, "c.csv", "500", "1");
    let q3 = dir.path("q3.csv");
    std::fs::write(&q3, "1,2,3\n").unwrap();
    let o = code(&[
        "project", "--data", &dir.arg("c.csv"), "--queries", &q3.to_string_lossy(), "--d", "1",
        "--sigma", "0.1", "--tau", "10", "--out", &out,
    ]);
    assert_eq!(o, 1);
    let missing = dir.arg("nope.csv");
    assert_eq!(
        code(&[
            "project", "--data", &missing, "--queries", &missing, "--d", "1", "--sigma", "0.1",
            "--tau", "10", "--out", &out,
        ]),
        1
    );
}

#[test]
fn project_circle_fixture() {
    let dir = Scratch::new();
    gen_circle(&dir, "c.csv", "5000", "2");
    gen_circle(&dir, "q.csv", "40", "3");
    let out = dir.arg("r.csv");
    assert_eq!(
        code(&[
            "project", "--data", &dir.arg("c.csv"), "--queries", &dir.arg("q.csv"), "--d", "1",
            "--sigma", "0.1", "--tau", "10", "--out", &out,
        ]),
        0
    );
    let (header, rows) = table(&dir.path("r.csv"));
    assert_eq!(header, ["p0", "p1", "t0_0", "t1_0", "iterations", "warnings"]);
    assert_eq!(rows.len(), 40);
    let within = rows
        .iter()
        .filter(|r| ((r[0] * r[0] + r[1] * r[1]).sqrt() - 10.0).abs() <= 0.1)
        .count();
    assert!(within as f64 >= 0.95 * 40.0);
}

#[test]
fn project_flat_fixture() {
    let dir = Scratch::new();
    let data = dir.arg("plane.csv");
    assert_eq!(
        code(&[
            "gen", "--manifold", "affine", "--dim", "2", "--ambient", "4", "--half-width", "1",
            "--n", "2000", "--sigma", "1e-6", "--seed", "4", "--spec-seed", "4", "--out", &data,
        ]),
        0
    );
    // queries on the plane itself project onto themselves
    let queries = dir.path("q.csv");
    let (_, pts) = table(&dir.path("plane.csv"));
    let mut text = String::from("x0,x1,x2,x3\n");
    for p in pts.iter().step_by(400) {
        text += &format!("{},{},{},{}\n", p[0], p[1], p[2], p[3]);
    }
    std::fs::write(&queries, text).unwrap();
    let out = dir.arg("r.csv");
    assert_eq!(
        code(&[
            "project", "--data", &data, "--queries", &queries.to_string_lossy(), "--d", "2",
            "--sigma", "1e-6", "--tau", "1e6", "--out", &out,
        ]),
        0
    );
    let (_, rows) = table(&dir.path("r.csv"));
    for (r, q) in rows.iter().zip(pts.iter().step_by(400)) {
        let err: f64 = (0..4).map(|i| (r[i] - q[i]).powi(2)).sum::<f64>().sqrt();
        assert!(err <= 1e-4);
    }
}

#[test]
fn rates_on_a_flat_spec_has_tiny_error() {
    let dir = Scratch::new();
    let out = dir.arg("rates.csv");
    let o = manproj(&[
        "rates", "--manifold", "affine", "--dim", "1", "--ambient", "3", "--ns", "200,400,800,1600",
        "--seeds", "2", "--sigma", "1e-6", "--tau", "1e6", "--queries", "5", "--out", &out,
    ]);
    assert_eq!(o.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.contains("slope_dist="));
    let (header, rows) = table(&dir.path("rates.csv"));
    assert_eq!(header, ["n", "seed", "median_dist", "median_angle"]);
    assert_eq!(rows.len(), 8);
    assert!(rows.iter().all(|r| r[2] <= 1e-4));
}

#[test]
fn geodesic_walks_around_the_circle() {
    let dir = Scratch::new();
    gen_circle(&dir, "c.csv", "5000", "5");
    let out = dir.arg("g.csv");
    assert_eq!(
        code(&[
            "geodesic", "--data", &dir.arg("c.csv"), "--x0", "10,0", "--v0", "0,-1", "--eps", "0.5",
            "--steps", "30", "--d", "1", "--sigma", "0.1", "--tau", "10", "--out", &out,
        ]),
        0
    );
    let (header, rows) = table(&dir.path("g.csv"));
    assert_eq!(header, ["step", "x0", "x1", "t0_0", "t1_0"]);
    assert_eq!(rows.len(), 31);
    for r in &rows {
        assert!(((r[1] * r[1] + r[2] * r[2]).sqrt() - 10.0).abs() <= 0.1);
    }
    // the negative initial velocity walks clockwise
    assert!(rows[5][2] < 0.0);
}

#[test]
fn thread_count_does_not_change_output() {
    let dir = Scratch::new();
    gen_circle(&dir, "c.csv", "3000", "6");
    gen_circle(&dir, "q.csv", "16", "7");
    let run = |threads: &str, name: &str| {
        let out = dir.arg(name);
        let status = Command::new(env!("CARGO_BIN_EXE_manproj"))
            .args([
                "project", "--data", &dir.arg("c.csv"), "--queries", &dir.arg("q.csv"), "--d", "1",
                "--sigma", "0.1", "--tau", "10", "--blocks", "3", "--out", &out,
            ])
            .env("MANPROJ_THREADS", threads)
            .status()
            .unwrap();
        assert!(status.success());
        std::fs::read(dir.path(name)).unwrap()
    };
    assert_eq!(run("1", "a.csv"), run("4", "b.csv"));
}

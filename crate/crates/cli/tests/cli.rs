use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use sha2::{Digest, Sha256};
use tempfile::TempDir;

fn mswt(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mswt")).args(args).arg("--out").arg(dir).output().expect("binary runs")
}

fn write_config(dir: &Path, text: &str) -> PathBuf {
    let p = dir.join("input.toml");
    fs::write(&p, text).unwrap();
    p
}

struct Csv {
    comments: Vec<String>,
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Csv {
    fn read(path: &Path) -> Csv {
        let text = fs::read_to_string(path).unwrap();
        let comments = text.lines().filter(|l| l.starts_with('#')).map(str::to_string).collect();
        let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
        let header = r.headers().unwrap().iter().map(str::to_string).collect();
        let rows = r.records().map(|rec| rec.unwrap().iter().map(str::to_string).collect()).collect();
        Csv { comments, header, rows }
    }

    fn col(&self, name: &str) -> Vec<String> {
        let i = self.header.iter().position(|h| h == name).unwrap_or_else(|| panic!("no column {name}"));
        self.rows.iter().map(|r| r[i].clone()).collect()
    }

    fn f(&self, name: &str) -> Vec<f64> {
        self.col(name).iter().map(|s| s.parse().unwrap()).collect()
    }
}

fn run_ok(dir: &Path, args: &[&str]) {
    let out = mswt(dir, args);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn dimer_var_homogeneous_matches_ground_state() {
    let tmp = TempDir::new().unwrap();
    run_ok(tmp.path(), &["dimer-var"]);
    let csv = Csv::read(&tmp.path().join("dimer-var.csv"));
    assert_eq!(
        csv.header,
        [
            "u_over_t",
            "delta_mu_over_t",
            "theta_star",
            "E_heis",
            "E_ionic",
            "E0_exact",
            "E1_exact",
            "coupling_norm",
            "s2",
            "backend",
            "seed"
        ]
    );
    assert_eq!(csv.rows.len(), 5);
    for (e, e0) in csv.f("E_heis").iter().zip(csv.f("E0_exact")) {
        assert!((e - e0).abs() < 1e-10, "{e} vs {e0}");
    }
    // 17 significant digits on every float
    assert!(csv.col("theta_star").iter().all(|s| s.split('e').next().unwrap().trim_start_matches('-').len() == 18));
}

#[test]
fn tilted_theta_approaches_one_at_large_u() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "[model]\ndelta_mu = 2.0\nu_grid = [10.0, 40.0, 200.0]\n");
    run_ok(tmp.path(), &["dimer-var", "--config", cfg.to_str().unwrap()]);
    let theta = Csv::read(&tmp.path().join("dimer-var.csv")).f("theta_star");
    assert!(theta.windows(2).all(|w| (1.0 - w[1]).abs() < (1.0 - w[0]).abs()), "{theta:?}");
    assert!((1.0 - theta[2]).abs() < 0.05, "{theta:?}");
}

#[test]
fn reruns_are_bit_identical_across_job_counts() {
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    let text = "[model]\nu_grid = [4.0, 8.0]\n[vqe]\nrepetitions = 4\nspsa_iters = 20\n";
    let ca = write_config(a.path(), text);
    let cb = write_config(b.path(), text);
    for cmd in ["dimer-var", "dimer-iter", "vqe"] {
        run_ok(a.path(), &[cmd, "--config", ca.to_str().unwrap(), "--backend", "noisy", "--seed", "11", "--jobs", "1"]);
        run_ok(b.path(), &[cmd, "--config", cb.to_str().unwrap(), "--backend", "noisy", "--seed", "11", "--jobs", "2"]);
        let name = format!("{cmd}.csv");
        assert_eq!(fs::read(a.path().join(&name)).unwrap(), fs::read(b.path().join(&name)).unwrap(), "{cmd}");
    }
}

#[test]
fn snapshot_hash_and_replay() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "seed = 3\n[ring_sweep]\nsizes = [2, 4]\nu_grid = [8.0]\n");
    run_ok(tmp.path(), &["ring-sweep", "--config", cfg.to_str().unwrap()]);
    let snapshot = tmp.path().join("ring-sweep.config.toml");
    let hash = hex::encode(Sha256::digest(fs::read(&snapshot).unwrap()));
    let first = fs::read(tmp.path().join("ring-sweep.csv")).unwrap();
    let csv = Csv::read(&tmp.path().join("ring-sweep.csv"));
    assert!(csv.comments.iter().any(|c| c == &format!("# config_sha256: {hash}")));
    assert_eq!(csv.rows.len(), 4);
    assert_eq!(csv.col("theta_mode"), ["fixed-1", "optimized", "fixed-1", "optimized"]);

    let replay = TempDir::new().unwrap();
    run_ok(replay.path(), &["ring-sweep", "--config", snapshot.to_str().unwrap()]);
    assert_eq!(fs::read(replay.path().join("ring-sweep.csv")).unwrap(), first);
}

#[test]
fn empty_grid_gives_header_only() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "[model]\nu_grid = []\n[ring_sweep]\nsizes = []\n");
    for cmd in ["dimer-var", "dimer-iter", "ring-sweep", "vqe"] {
        run_ok(tmp.path(), &[cmd, "--config", cfg.to_str().unwrap()]);
        let csv = Csv::read(&tmp.path().join(format!("{cmd}.csv")));
        assert!(csv.rows.is_empty(), "{cmd}");
        assert!(!csv.header.is_empty());
    }
}

#[test]
fn config_errors_exit_two() {
    let tmp = TempDir::new().unwrap();
    for (text, extra, needle) in [
        ("[ring_sweep]\nsizes = [12]\n", "ring-sweep", "between 2 and 10"),
        ("[vqe]\nrepetitions = 0\n", "vqe", "repetitions"),
        ("unknown_key = 1\n", "dimer-var", "unknown field"),
        ("[model]\nu_grid = [-1.0]\n", "dimer-var", "positive"),
        ("[dimer_var]\ncost = \"coupling\"\n", "dimer-var --backend statevector", "energy-heis"),
    ] {
        let cfg = write_config(tmp.path(), text);
        let mut args: Vec<&str> = extra.split(' ').collect();
        args.extend(["--config", cfg.to_str().unwrap()]);
        let out = mswt(tmp.path(), &args);
        assert_eq!(out.status.code(), Some(2), "{text}");
        assert!(String::from_utf8_lossy(&out.stderr).contains(needle), "{text}");
    }
    let out = mswt(tmp.path(), &["dimer-var", "--config", tmp.path().join("missing.toml").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let out = mswt(tmp.path(), &["dimer-var", "--jobs", "0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn zero_iterations_is_the_standard_transformation() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(
        tmp.path(),
        "[model]\nu_grid = [4.0]\n[dimer_iter]\nn_iters = 0\n[ring_sweep]\nsizes = [2]\nu_grid = [4.0]\n",
    );
    run_ok(tmp.path(), &["dimer-iter", "--config", cfg.to_str().unwrap()]);
    run_ok(tmp.path(), &["ring-sweep", "--config", cfg.to_str().unwrap()]);
    let it = Csv::read(&tmp.path().join("dimer-iter.csv"));
    let ring = Csv::read(&tmp.path().join("ring-sweep.csv"));
    assert_eq!(it.col("n_iters"), ["0"]);
    let fixed = ring.f("e_theta")[0];
    assert!((it.f("E_heis")[0] - fixed).abs() < 1e-10);
    assert!((it.f("E_heis_trotter")[0] - fixed).abs() < 1e-10);
}

#[test]
fn homogeneous_exchange_changes_sign() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "[model]\nu_grid = [1.0, 2.0, 4.0, 8.0]\n[dimer_iter]\ntrotterized = false\n");
    run_ok(tmp.path(), &["dimer-iter", "--config", cfg.to_str().unwrap()]);
    let csv = Csv::read(&tmp.path().join("dimer-iter.csv"));
    let j = csv.f("J_final");
    assert!(j.iter().any(|&x| x > 0.0) && j.iter().any(|&x| x < 0.0), "{j:?}");
    assert!(csv.col("E_heis_trotter").iter().all(|s| s == "nan"));
    assert!(csv.col("trotterized").iter().all(|s| s == "false"));
}

#[test]
fn noiseless_vqe_matches_exact() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "[model]\nu_grid = [4.0, 8.0]\n");
    for backend in ["exact", "statevector"] {
        run_ok(tmp.path(), &["vqe", "--config", cfg.to_str().unwrap(), "--backend", backend]);
        let csv = Csv::read(&tmp.path().join("vqe.csv"));
        assert_eq!(csv.col("state"), ["heis", "ionic", "heis", "ionic"]);
        for (e, x) in csv.f("E_mean").iter().zip(csv.f("E_exact")) {
            assert!((e - x).abs() < 1e-6, "{backend}: {e} vs {x}");
        }
        assert!(csv.col("shots").iter().all(|s| s == "inf"));
    }
}

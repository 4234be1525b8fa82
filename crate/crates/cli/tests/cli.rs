use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn qvdqc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qvdqc"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

const TINY: &str = r#"
topologies = ["line1d", "grid2d"]
sizes = [4]
error_rates = [0.002, 0.01]
circuits = 4
shots = 100
seed = 9
"#;

/// Drops the trailing runtime column.
fn without_runtime(csv: &str) -> String {
    csv.lines()
        .map(|l| l.rsplit_once(',').map_or(l, |(head, _)| head))
        .collect::<Vec<_>>()
        .join("\n")
}

#[test]
fn predict_writes_a_versioned_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", TINY);
    let out = dir.path().join("p.csv");
    let o = qvdqc(&["predict", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("# qvdqc-csv v1 kind=predict"));
    assert!(lines.next().unwrap().starts_with("device,"));
    // two singles and two hub devices, two error rates each
    assert_eq!(lines.count(), 8);
}

#[test]
fn error_sweep_reruns_identically() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", TINY);
    let a = qvdqc(&["error-sweep", "-c", &cfg]);
    let b = qvdqc(&["error-sweep", "-c", &cfg]);
    assert!(a.status.success());
    let (a, b) = (
        String::from_utf8(a.stdout).unwrap(),
        String::from_utf8(b.stdout).unwrap(),
    );
    assert_eq!(without_runtime(&a), without_runtime(&b));
    let c = qvdqc(&["error-sweep", "-c", &cfg, "--seed", "10"]);
    assert_ne!(
        without_runtime(&a),
        without_runtime(&String::from_utf8(c.stdout).unwrap())
    );
}

#[test]
fn flags_override_the_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", TINY);
    let o = qvdqc(&["size-sweep", "-c", &cfg, "--circuits", "2", "--shots", "50"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    let header: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    let row: Vec<&str> = text.lines().nth(2).unwrap().split(',').collect();
    let col = |name: &str| row[header.iter().position(|h| *h == name).unwrap()];
    assert_eq!(col("circuits"), "2");
    assert_eq!(col("shots"), "50");
    assert_eq!(col("sweep"), "size");
}

#[test]
fn ent_sweep_writes_the_crossover_table() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "c.toml",
        "topologies = [\"line1d\"]\nsizes = [4]\ndqc = [true]\nerror_rates = [0.005]\nentanglement_errors = [0.0, 0.02, 0.05]\ncircuits = 3\nshots = 100\n",
    );
    let out = dir.path().join("ent.csv");
    let o = qvdqc(&["ent-sweep", "-c", &cfg, "-o", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let summary = fs::read_to_string(dir.path().join("ent.crossover.csv")).unwrap();
    assert!(summary.starts_with("# qvdqc-csv v1 kind=crossover\n"));
    assert_eq!(summary.lines().count(), 3);
    // one single-QPU point plus three entanglement points
    assert_eq!(fs::read_to_string(&out).unwrap().lines().count(), 2 + 4);
}

#[test]
fn placement_and_graph_files() {
    let dir = tempfile::tempdir().unwrap();
    let graph = "[[qubits]]\nid = 0\nrole = \"working\"\nqpu = 0\n\n[[qubits]]\nid = 1\nrole = \"working\"\nqpu = 0\n\n[[edges]]\nkind = \"coupling\"\na = 0\nb = 1\n";
    write(dir.path(), "pair.toml", graph);
    let cfg = write(
        dir.path(),
        "c.toml",
        "graph_files = [\"pair.toml\"]\nerror_rates = [0.01]\n",
    );
    let o = qvdqc(&["predict", "-c", &cfg]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.lines().nth(2).unwrap().starts_with("pair,custom,2,false,none,"));

    let cfg = write(
        dir.path(),
        "p.toml",
        "topologies = [\"line1d\"]\nsizes = [8]\nerror_rates = [0.001]\n",
    );
    let o = qvdqc(&["placement", "-c", &cfg]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    let best: Vec<&str> = text.lines().filter(|l| l.ends_with(",true")).collect();
    assert_eq!(best.len(), 1);
    // the middle of each four-qubit line
    assert!(
        best[0].starts_with("line1d,8,1,1,") || best[0].starts_with("line1d,8,1,2,"),
        "{}",
        best[0]
    );
}

#[test]
fn errors_exit_nonzero_with_a_diagnostic() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("none.toml");
    let o = qvdqc(&["predict", "-c", missing.to_str().unwrap()]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("none.toml"));

    let bad = write(
        dir.path(),
        "bad.toml",
        "topologies = [\"line1d\"]\nsizes = [4]\nerror_rates = []\n",
    );
    let o = qvdqc(&["error-sweep", "-c", &bad]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("error_rates"));

    let big = write(
        dir.path(),
        "big.toml",
        "topologies = [\"line1d\"]\nsizes = [24]\ndqc = [false]\nerror_rates = [0.001]\ncircuits = 1\nshots = 1\n",
    );
    let o = qvdqc(&["error-sweep", "-c", &big]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).to_lowercase().contains("qubits"));
    // analytics alone have no capacity limit
    assert!(qvdqc(&["predict", "-c", &big]).status.success());
}

#[test]
fn shipped_configs_load() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let tmp = tempfile::tempdir().unwrap();
    for entry in fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let out = tmp.path().join("out.csv");
        let o = qvdqc(&["predict", "-c", path.to_str().unwrap(), "-o", out.to_str().unwrap()]);
        assert!(
            o.status.success(),
            "{}: {}",
            path.display(),
            String::from_utf8_lossy(&o.stderr)
        );
    }
}

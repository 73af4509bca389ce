use std::path::Path;
use std::process::{Command, Output};

const ONE_D: &str = r#"
seed = 5

[model]
dim = 1
k1 = 1.0
k2 = 1.0
sigma = { kind = "scalar", eps = 1.0 }
b2 = { kind = "bump", height = 1.0, width = 1.0 }

[simulate_flow]
initials = [[0.0], [0.5]]
horizon = 0.2
dt = 0.01

[dispersion]
horizon = 0.5
replicas = 4

[two_point]
x = [0.0]
y = [1.0]
orders = [1.0, 2.0, 4.0]
horizons = [0.5, 1.0, 2.0]
dt = 0.01
replicas = 20
alpha = 1.0

[constants]
varrho_r = [1.0, 2.0]
zvonkin_norms = true

[krylov]
windows = [[0.0, 1.0], [0.0, 2.0]]
replicas = 50

[khasminskii]
replicas = 50

[zvonkin]
lambda = 100.0
domain_radius = 4.0
h = 0.05

[pde_scaling]
lambdas = [10.0, 100.0, 1000.0, 10000.0]
domain_radius = 4.0
h = 0.05

[expansion]
r = 2.0
gamma = 0.5
horizon = 1.0
mesh_resolution = 4
replicas = 4

[pullback]
r = 1.0
depths = [1.0]
mesh_resolution = 4
replicas = 4

[[lemma61.scenarios]]
case = 2
replicas = 50
dt = 0.01
params = { t = 1.0, r = 1.0, big_r = 4.0, gamma = 1.0, norm_b1 = 0.0, k1 = 1.0, k2 = 1.0 }

[example_2_5]
epsilons = [1.0]
horizon = 2.0
dt = 0.01

[case_study]
eps = 0.1
dispersion = { horizon = 0.5, replicas = 4 }
"#;

fn sdeflow(args: &[&str], config: &Path, out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sdeflow"))
        .args(args)
        .arg("--config")
        .arg(config)
        .arg("--out")
        .arg(out)
        .output()
        .unwrap()
}

#[test]
fn every_subcommand_writes_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("one_d.toml");
    std::fs::write(&cfg, ONE_D).unwrap();
    let expect: [(&str, &[&str]); 13] = [
        ("simulate-flow", &["trajectory.csv", "trajectory.bin"]),
        ("dispersion", &["dispersion.csv", "dispersion.svg"]),
        ("two-point", &["two_point.csv"]),
        ("constants", &["constants.csv"]),
        ("krylov-check", &["krylov.csv"]),
        ("khasminskii-check", &["khasminskii.csv"]),
        ("zvonkin-solve", &["zvonkin_certificate.json", "zvonkin_grid.csv", "zvonkin_grid.bin"]),
        ("pde-scaling", &["pde_scaling.csv", "pde_scaling.svg"]),
        ("attractor-pullback", &["pullback.csv"]),
        ("expansion-forward", &["expansion.csv"]),
        ("lemma61", &["lemma61.csv"]),
        ("example-2-5", &["example_2_5.csv"]),
        ("case-study-bounded", &["case_study.csv"]),
    ];
    for (sub, files) in expect {
        let out = tmp.path().join(sub);
        let o = sdeflow(&[sub], &cfg, &out);
        assert!(o.status.success(), "{sub}: {}", String::from_utf8_lossy(&o.stderr));
        for f in files {
            let p = out.join(f);
            assert!(p.is_file(), "{sub}: missing {f}");
            assert!(std::fs::metadata(&p).unwrap().len() > 0, "{sub}: empty {f}");
        }
        // Nothing left behind by the atomic writer.
        assert!(std::fs::read_dir(&out).unwrap().all(|e| !e.unwrap().file_name().to_string_lossy().starts_with('.')));
    }
}

#[test]
fn json_reports_parse() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("one_d.toml");
    std::fs::write(&cfg, ONE_D).unwrap();
    let out = tmp.path().join("out");
    let o = sdeflow(&["constants", "--format", "json"], &cfg, &out);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&std::fs::read(out.join("constants.json")).unwrap()).unwrap();
    assert!(v["bundle"]["gamma"].as_f64().unwrap() >= 1.0);
    assert_eq!(v["varrho"].as_array().unwrap().len(), 2);

    let o = sdeflow(&["zvonkin-solve"], &cfg, &out);
    assert!(o.status.success());
    let cert: serde_json::Value =
        serde_json::from_slice(&std::fs::read(out.join("zvonkin_certificate.json")).unwrap()).unwrap();
    assert_eq!(cert["certified"], serde_json::Value::Bool(true));
}

#[test]
fn seed_flag_changes_output_and_is_reproducible() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("one_d.toml");
    std::fs::write(&cfg, ONE_D).unwrap();
    let run = |seed: &str, name: &str| {
        let out = tmp.path().join(name);
        assert!(sdeflow(&["simulate-flow", "--seed", seed], &cfg, &out).status.success());
        std::fs::read(out.join("trajectory.csv")).unwrap()
    };
    let a = run("1", "a");
    assert_eq!(a, run("1", "b"));
    assert_ne!(a, run("2", "c"));
}

#[test]
fn bad_config_fails_cleanly() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("bad.toml");
    std::fs::write(&cfg, "[model]\ndim = 1\nk1 = 2.0\nk2 = 1.0\nsigma = { kind = \"scalar\", eps = 1.0 }\n").unwrap();
    let o = sdeflow(&["simulate-flow"], &cfg, &tmp.path().join("out"));
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("k1"));

    std::fs::write(&cfg, "bogus_key = 1\n").unwrap();
    let o = sdeflow(&["constants"], &cfg, &tmp.path().join("out"));
    assert!(!o.status.success());
    assert!(!tmp.path().join("out").exists());
}

#[test]
fn shipped_scenarios_load() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios");
    let mut n = 0;
    for entry in std::fs::read_dir(&dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "toml") {
            let cfg = sdeflow::cli::ScenarioConfig::load(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
            if let Some(m) = &cfg.model {
                m.validate().unwrap();
            }
            n += 1;
        }
    }
    assert!(n >= 4);
}

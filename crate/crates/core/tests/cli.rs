use std::path::Path;
use std::process::{Command, Output};

fn cli(args: &[&str], out_dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_singular-mhd"))
        .args(args)
        .env("SINGULAR_MHD_OUT", out_dir)
        .output()
        .expect("spawn cli")
}

fn code(args: &[&str]) -> (i32, String, String) {
    let tmp = tempfile::tempdir().unwrap();
    let out = cli(args, tmp.path());
    (
        out.status.code().unwrap(),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

#[test]
fn help_exits_zero_everywhere() {
    for args in [
        &["--help"][..],
        &["landau", "--help"],
        &["landau", "eval", "--help"],
        &["landau", "solve-a", "--help"],
        &["verify", "--help"],
        &["solve", "--help"],
        &["asymptotics", "--help"],
    ] {
        let tmp = tempfile::tempdir().unwrap();
        let out = cli(args, tmp.path());
        assert_eq!(out.status.code(), Some(0), "{args:?}");
        assert!(String::from_utf8_lossy(&out.stdout).contains("Usage"));
        assert_eq!(
            std::fs::read_dir(tmp.path()).unwrap().count(),
            0,
            "{args:?} wrote files"
        );
    }
}

#[test]
fn landau_commands() {
    let (c, out, _) = code(&["landau", "eval", "--beta", "1", "--point", "0.3,0.2,0.5"]);
    assert_eq!(c, 0);
    let res: f64 = out
        .lines()
        .find(|l| l.starts_with("|res||x|^3"))
        .and_then(|l| l.split_whitespace().last())
        .unwrap()
        .parse()
        .unwrap();
    assert!(res < 1e-8);
    let (c, out, _) = code(&["landau", "solve-a", "--beta", "0"]);
    assert_eq!(c, 0);
    assert_eq!(out.trim(), "a = inf");
    let (c, _, err) = code(&["landau", "eval", "--beta", "1", "--point", "0,0,0"]);
    assert_eq!(c, 3);
    assert!(err.contains("origin"));
    let (c, _, _) = code(&["landau", "eval", "--beta", "x", "--point", "1,0,0"]);
    assert_eq!(c, 2);
    let (c, _, _) = code(&["landau", "eval", "--beta", "1", "--point", "1,0"]);
    assert_eq!(c, 2);
}

#[test]
fn verify_exit_codes() {
    let (c, out, _) = code(&[
        "verify",
        "flux",
        "--field",
        "landau:1",
        "--radii",
        "0.25,0.5,1,1.5",
    ]);
    assert_eq!(c, 0, "{out}");
    assert!(out.starts_with("PASS"));
    let (c, _, _) = code(&[
        "verify",
        "vanishing",
        "--field",
        "swirl:gauss:1",
        "--u",
        "landau:0.5",
    ]);
    assert_eq!(c, 0);
    let (c, _, _) = code(&["verify", "cor2", "--profiles", "20", "--seed", "7"]);
    assert_eq!(c, 0);
    // radii too close together for the deviation to halve
    let (c, out, _) = code(&["verify", "dirac", "--eps", "0.2,0.19"]);
    assert_eq!(c, 4, "{out}");
    assert!(out.starts_with("FAIL"));
    let (c, _, err) = code(&["verify", "energy"]);
    assert_eq!(c, 2);
    assert!(err.contains("energy"));
    let (c, _, err) = code(&["verify", "flux", "--field", "vortex:1"]);
    assert_eq!(c, 2);
    assert!(err.contains("vortex"));
    let (c, _, _) = code(&["verify", "flux", "--radii=-1"]);
    assert_eq!(c, 3);
}

#[test]
fn verify_writes_self_describing_csv() {
    let tmp = tempfile::tempdir().unwrap();
    let out = cli(&["verify", "flux", "--radii", "0.5,1"], tmp.path());
    assert!(out.status.success());
    let text = std::fs::read_to_string(tmp.path().join("verify_flux.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("# command=verify flux"));
    assert!(text.contains("# field=landau:1\n"));
    let header = text.lines().find(|l| !l.starts_with('#')).unwrap();
    assert_eq!(header, "kind,radius,x,y,z,error_estimate,deviation");
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 5);
}

#[test]
fn asymptotics_exit_codes() {
    let (c, out, _) = code(&["asymptotics", "--field", "landau:1"]);
    assert_eq!(c, 0);
    let alpha: f64 = out.split_whitespace().nth(2).unwrap().parse().unwrap();
    assert!((alpha - 1.0).abs() < 0.01);
    let (c, _, _) = code(&["asymptotics", "--field", "landau:1", "--q", "5"]);
    assert_eq!(c, 3);
    let (c, _, _) = code(&["asymptotics", "--field", "missing.csv"]);
    assert_eq!(c, 1);
}

#[test]
fn solve_modes_and_config_errors() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("zero.cfg");
    std::fs::write(&cfg, "mode = zero\nn_rho = 24\nn_phi = 12\nbetas = 0.5\n").unwrap();
    let out = cli(&["solve", "--config", cfg.to_str().unwrap()], tmp.path());
    assert!(out.status.success());
    let summary = std::fs::read_to_string(tmp.path().join("summary.csv")).unwrap();
    let row = summary.lines().last().unwrap();
    assert!(
        row.starts_with("5e-1,") && row.contains(",converged,1,"),
        "{row}"
    );
    let dump = std::fs::read_to_string(tmp.path().join("solution_0.csv")).unwrap();
    assert!(dump
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .all(|l| l.ends_with(",0e0")));

    // the solution dump feeds the asymptotics command
    let dumped = tmp.path().join("solution_0.csv");
    let (c, _, _) = code(&[
        "asymptotics",
        "--field",
        dumped.to_str().unwrap(),
        "--radii",
        "1,0.5,0.25,0.1",
    ]);
    assert_eq!(c, 3, "an identically zero field has no decay exponent");

    let bad = tmp.path().join("bad.cfg");
    std::fs::write(&bad, "n_rho = 24\ncolour = blue\n").unwrap();
    let (c, _, err) = code(&["solve", "--config", bad.to_str().unwrap()]);
    assert_eq!(c, 2);
    assert!(err.contains("colour"));
    std::fs::write(&bad, "n_phi = 3\n").unwrap();
    let (c, _, _) = code(&["solve", "--config", bad.to_str().unwrap()]);
    assert_eq!(c, 3);
}

#[test]
fn manufactured_refinement_table() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("m.cfg");
    std::fs::write(
        &cfg,
        "n_rho = 129\nn_phi = 65\nbetas = 0.25,0.5,1,2\ndump = false\n",
    )
    .unwrap();
    let out = cli(&["solve", "--config", cfg.to_str().unwrap()], tmp.path());
    assert!(out.status.success());
    let table = std::fs::read_to_string(tmp.path().join("refinement.csv")).unwrap();
    let ratios: Vec<f64> = table
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(2)
        .map(|l| l.rsplit(',').next().unwrap().parse().unwrap())
        .collect();
    assert_eq!(ratios.len(), 2);
    assert!(ratios.iter().all(|r| (r - 4.0).abs() < 1.0), "{ratios:?}");
    let summary = std::fs::read_to_string(tmp.path().join("summary.csv")).unwrap();
    let asym: Vec<f64> = summary
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').nth(4).unwrap().parse().unwrap())
        .collect();
    assert!(asym.windows(2).all(|w| w[1] > w[0]), "{asym:?}");
    assert!(!tmp.path().join("solution_0.csv").exists());
}

#[test]
fn repeated_runs_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("run.cfg");
    std::fs::write(&cfg, "n_rho = 40\nn_phi = 20\nmode = localized\nseed = 9\n").unwrap();
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    for d in [&a, &b] {
        assert!(cli(&["solve", "--config", cfg.to_str().unwrap()], d)
            .status
            .success());
        assert!(cli(&["verify", "weak", "--count", "2", "--seed", "9"], d)
            .status
            .success());
    }
    for name in [
        "history.csv",
        "summary.csv",
        "solution_0.csv",
        "verify_weak.csv",
    ] {
        assert_eq!(
            std::fs::read(a.join(name)).unwrap(),
            std::fs::read(b.join(name)).unwrap(),
            "{name}"
        );
    }
}

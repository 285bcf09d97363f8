use std::path::PathBuf;
use std::process::{Command, Output};

use privtrack::boundary::backpropagate_zones;
use privtrack::{IntervalSet, ProblemInstance, Rational};
use serde_json::Value;

fn bin(args: &[&str], out_dir: Option<&PathBuf>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_privtrack"));
    cmd.args(args).env_remove("PRIVTRACK_OUT_DIR");
    if let Some(d) = out_dir {
        cmd.env("PRIVTRACK_OUT_DIR", d);
    }
    cmd.output().unwrap()
}

fn scratch(tag: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("privtrack-cli-{tag}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&d);
    d
}

#[test]
fn exit_codes() {
    let code = |a: &[&str]| bin(a, None).status.code().unwrap();
    assert_eq!(
        code(&["classify", "--rp", "76", "--rt", "101.3", "--delta", "227", "--c", "4"]),
        0
    );
    assert_eq!(
        code(&["classify", "--rp", "abc", "--rt", "1", "--delta", "1", "--c", "1"]),
        1
    );
    assert_eq!(code(&["classify"]), 1);
    assert_eq!(
        code(&["zones", "--rp", "1", "--rt", "2", "--delta", "3", "--c", "3"]),
        2
    );
    assert_eq!(
        code(&[
            "strategy", "--rp", "76", "--rt", "101.3", "--delta", "227", "--c", "4", "--eta0",
            "80.7"
        ]),
        2
    );
    assert_eq!(
        code(&[
            "strategy", "--rp", "1.2", "--rt", "1.4", "--delta", "2", "--c", "2", "--eta0", "1.3"
        ]),
        2
    );
    assert_eq!(
        code(&[
            "oracle", "--rp", "76", "--rt", "101.3", "--delta", "227", "--c", "4", "--cap", "2"
        ]),
        3
    );
    assert_eq!(code(&["power", "--c", "2", "--resolution", "10"]), 1);
}

#[test]
fn artifacts_are_byte_identical() {
    let d1 = scratch("det1");
    let d2 = scratch("det2");
    for d in [&d1, &d2] {
        let o = bin(
            &[
                "map",
                "--c",
                "3",
                "--resolution",
                "60",
                "--csv",
                "m.csv",
                "--svg",
                "sub/m.svg",
            ],
            Some(d),
        );
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    for f in ["m.csv", "sub/m.svg"] {
        let a = std::fs::read(d1.join(f)).unwrap();
        assert!(!a.is_empty());
        assert_eq!(a, std::fs::read(d2.join(f)).unwrap(), "{f}");
    }
    let svg = std::fs::read_to_string(d1.join("sub/m.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.contains(r#"width="800" height="800""#));
    assert_eq!(svg.matches("<rect").count(), 60 * 60 + 1 + 4);
    for colour in ["#5cb85c", "#9e9e9e", "#f4a6c1", "#ffffff"] {
        assert!(svg.contains(colour), "{colour}");
    }
    let v1 = bin(&["verify", "--seed", "9", "--count", "40"], None);
    let v2 = bin(&["verify", "--seed", "9", "--count", "40"], None);
    assert!(v1.status.success());
    assert_eq!(v1.stdout, v2.stdout);
    let _ = std::fs::remove_dir_all(&d1);
    let _ = std::fs::remove_dir_all(&d2);
}

#[test]
fn out_flag_writes_file() {
    let d = scratch("out");
    let o = bin(
        &[
            "rtstar", "--rp", "3", "--delta", "2", "--c", "5", "--out", "r.txt",
        ],
        Some(&d),
    );
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    assert_eq!(std::fs::read_to_string(d.join("r.txt")).unwrap(), "6\n");
    let _ = std::fs::remove_dir_all(&d);
}

#[test]
fn strategy_output_feeds_simulate() {
    let inst = ["--rp", "76", "--rt", "101.3", "--delta", "223", "--c", "4"];
    let p = ProblemInstance::parse("76", "101.3", "223", 4).unwrap();
    let fs: IntervalSet = backpropagate_zones(&p, 100).unwrap().feasible_set.unwrap();
    for part in fs.parts() {
        let mid = &(part.lo() + part.hi()) / &Rational::from(2);
        for x in [part.lo().clone(), mid, part.hi().clone()] {
            let xs = x.to_string();
            let mut a = vec!["strategy"];
            a.extend(inst);
            a.extend(["--eta0", &xs]);
            let o = bin(&a, None);
            assert!(
                o.status.success(),
                "{xs}: {}",
                String::from_utf8_lossy(&o.stderr)
            );
            let word = String::from_utf8(o.stdout).unwrap();
            let mut s = vec!["simulate"];
            s.extend(inst);
            s.extend([
                "--strategy",
                word.trim(),
                "--eta0",
                &xs,
                "--horizon",
                "500",
                "--decimals",
                "3",
            ]);
            let o = bin(&s, None);
            assert!(
                o.status.success(),
                "{xs} {word}: {}",
                String::from_utf8_lossy(&o.stderr)
            );
        }
    }
}

#[test]
fn zones_tau_and_json_shape() {
    let o = bin(
        &[
            "zones", "--rp", "76", "--rt", "101.3", "--delta", "227", "--c", "4", "--tau", "0",
        ],
        None,
    );
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["tau_feasible_set"][0]["lo"], "76");
    assert_eq!(v["tau_feasible_set"][0]["hi"], "1013/10");
    assert_eq!(v["zones"][2]["j"], 2);
    assert_eq!(v["partition"]["p"], 1);
    assert_eq!(v["partition"]["m"], 3);
    assert!(v.get("notes").is_none());
}

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use qmap::pipeline::RunManifest;

fn qmap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qmap"))
        .args(args)
        .output()
        .expect("spawn qmap")
}

fn code(args: &[&str]) -> i32 {
    qmap(args).status.code().expect("exit code")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

const CX02: &str = "OPENQASM 2.0;\nqreg q[3];\ncx q[0],q[2];\n";

#[test]
fn forced_teleport_fixture() {
    let d = tempfile::tempdir().unwrap();
    let c = write(d.path(), "cx02.qasm", CX02);
    let map = d.path().join("map");
    let out = d.path().join("traffic");
    assert_eq!(
        code(&[
            "map",
            &c,
            "--arch",
            "2x2:alltoall/alltoall",
            "--allow-full",
            "--out",
            s(&map)
        ]),
        0
    );
    assert_eq!(
        code(&["analyze", s(&map.join("mapped.qmap")), "--out", s(&out)]),
        0
    );
    let matrix = fs::read_to_string(out.join("core_matrix.csv")).unwrap();
    assert!(matrix.lines().any(|l| l == "0,1,1"), "{matrix}");
    assert_eq!(
        fs::read_to_string(out.join("per_qubit.csv")).unwrap(),
        "vqubit,teleports,intra_ops\n0,1,1\n1,0,0\n2,0,1\n"
    );
    for f in qmap::traffic::CSV_FILES
        .iter()
        .chain(&["report.json", "manifest.json"])
    {
        assert!(out.join(f).is_file(), "{f} missing");
    }
}

#[test]
fn reanalysis_is_byte_identical() {
    let d = tempfile::tempdir().unwrap();
    let c = write(
        d.path(),
        "r.qasm",
        &qmap::gen_random(6, 60, 0.5, 3).unwrap().to_qasm(),
    );
    let map = d.path().join("map");
    assert_eq!(
        code(&["map", &c, "--arch", "2x4:line/line", "--out", s(&map)]),
        0
    );
    let mapped = map.join("mapped.qmap");
    assert_eq!(
        code(&["analyze", s(&mapped), "--out", s(&d.path().join("a"))]),
        0
    );
    assert_eq!(
        code(&["analyze", s(&mapped), "--out", s(&d.path().join("b"))]),
        0
    );
    for f in qmap::traffic::CSV_FILES {
        assert_eq!(
            fs::read(d.path().join("a").join(f)).unwrap(),
            fs::read(d.path().join("b").join(f)).unwrap(),
            "{f}"
        );
    }
}

#[test]
fn single_core_manifest_has_zero_comm_ratio() {
    let d = tempfile::tempdir().unwrap();
    let c = write(d.path(), "q.qasm", &qmap::gen_qft(6).unwrap().to_qasm());
    let map = d.path().join("map");
    assert_eq!(
        code(&[
            "map",
            &c,
            "--arch",
            "1x6:alltoall/alltoall",
            "--out",
            s(&map)
        ]),
        0
    );
    let manifest = RunManifest::load(&map).unwrap();
    assert_eq!(manifest.summary.comm_ratio, 0.0);
    assert_eq!(manifest.command, "map");
    assert_eq!(manifest.outputs[0].path, "mapped.qmap");
}

#[test]
fn manifest_detects_edited_outputs() {
    let d = tempfile::tempdir().unwrap();
    let c = write(d.path(), "cx02.qasm", CX02);
    let map = d.path().join("map");
    assert_eq!(
        code(&[
            "map",
            &c,
            "--arch",
            "2x2:alltoall/alltoall",
            "--allow-full",
            "--out",
            s(&map)
        ]),
        0
    );
    let mapped = map.join("mapped.qmap");
    let text = fs::read_to_string(&mapped).unwrap();
    fs::write(&mapped, text.replace("depth 2", "depth 3")).unwrap();
    assert!(RunManifest::load(&map).is_err());
    // the mapped file itself no longer verifies either
    assert_eq!(
        code(&["analyze", s(&mapped), "--out", s(&d.path().join("t"))]),
        4
    );
    assert!(!d.path().join("t").exists());
}

#[test]
fn tampered_source_is_rejected() {
    let d = tempfile::tempdir().unwrap();
    let c = write(d.path(), "cx02.qasm", CX02);
    let map = d.path().join("map");
    assert_eq!(
        code(&[
            "map",
            &c,
            "--arch",
            "2x2:alltoall/alltoall",
            "--allow-full",
            "--out",
            s(&map)
        ]),
        0
    );
    let mapped = map.join("mapped.qmap");
    let text = fs::read_to_string(&mapped).unwrap();
    fs::write(
        &mapped,
        text.replace("src cx q[0],q[2];", "src cx q[1],q[2];"),
    )
    .unwrap();
    assert_eq!(
        code(&["analyze", s(&mapped), "--out", s(&d.path().join("t"))]),
        4
    );
}

#[test]
fn exit_codes() {
    let d = tempfile::tempdir().unwrap();
    let good = write(d.path(), "good.qasm", CX02);
    let bad = write(d.path(), "bad.qasm", "qreg q[2];\ncx q[0],q[7];\n");
    let tiny = write(d.path(), "tiny.qasm", "qreg q[2];\ncx q[0],q[1];\n");
    let out = d.path().join("o");

    assert_eq!(code(&["--help"]), 0);
    assert_eq!(code(&["--version"]), 0);
    assert_eq!(code(&[]), 1);
    assert_eq!(code(&["map", &good]), 1, "missing --arch");
    assert_eq!(
        code(&[
            "map",
            &good,
            "--arch",
            "2x2:alltoall/alltoall",
            "--arch-file",
            "x.toml"
        ]),
        1
    );
    assert_eq!(
        code(&[
            "map",
            &good,
            "--arch",
            "2x2:bogus/alltoall",
            "--out",
            s(&out)
        ]),
        1
    );
    assert_eq!(
        code(&[
            "map",
            s(&d.path().join("missing.qasm")),
            "--arch",
            "2x2:alltoall/alltoall"
        ]),
        1
    );
    assert_eq!(
        code(&["gen", "random", "--n", "4", "--gates", "4", "--p2", "1.5"]),
        1
    );

    assert_eq!(
        code(&["map", &bad, "--arch", "1x4:line/line", "--out", s(&out)]),
        2
    );
    let arch_file = write(
        d.path(),
        "arch.toml",
        "n_cores = 2\nqubits_per_core = \"many\"\n",
    );
    assert_eq!(
        code(&["map", &good, "--arch-file", &arch_file, "--out", s(&out)]),
        2
    );

    assert_eq!(
        code(&[
            "map",
            &good,
            "--arch",
            "2x2:alltoall/alltoall",
            "--out",
            s(&out)
        ]),
        3,
        "headroom"
    );
    assert_eq!(
        code(&[
            "map",
            &good,
            "--arch",
            "1x2:alltoall/alltoall",
            "--out",
            s(&out)
        ]),
        3
    );

    assert_eq!(
        code(&[
            "map",
            &tiny,
            "--arch",
            "2x1:alltoall/alltoall",
            "--allow-full",
            "--out",
            s(&out)
        ]),
        4
    );

    assert_eq!(
        code(&["oracle", &good, "--arch", "3x3:alltoall/alltoall"]),
        5
    );
    assert!(!out.exists(), "failed runs must not write output");
}

#[test]
fn arch_file_costs_apply() {
    let d = tempfile::tempdir().unwrap();
    let c = write(d.path(), "cx02.qasm", CX02);
    let arch = write(
        d.path(),
        "arch.toml",
        "n_cores = 2\nqubits_per_core = 2\nintra = \"alltoall\"\ninter = \"line\"\n\n[cost]\ndur_teleport = 4\n",
    );
    let map = d.path().join("map");
    assert_eq!(
        code(&[
            "map",
            &c,
            "--arch-file",
            &arch,
            "--allow-full",
            "--out",
            s(&map)
        ]),
        0
    );
    let text = fs::read_to_string(map.join("mapped.qmap")).unwrap();
    assert!(text.contains("t=0 teleport p=0>3 c=0>1 d=4"), "{text}");
    assert!(text.contains("depth 5"));

    // --dur-teleport overrides the file
    assert_eq!(
        code(&[
            "map",
            &c,
            "--arch-file",
            &arch,
            "--allow-full",
            "--dur-teleport",
            "2",
            "--out",
            s(&map)
        ]),
        0
    );
    assert!(fs::read_to_string(map.join("mapped.qmap"))
        .unwrap()
        .contains("depth 3"));
}

#[test]
fn oracle_reports_table() {
    let d = tempfile::tempdir().unwrap();
    let line = write(d.path(), "l.qasm", "qreg q[4];\ncx q[0],q[3];\n");
    let out = qmap(&["oracle", &line, "--arch", "1x4:line/alltoall"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        String::from_utf8_lossy(&out.stdout),
        "heuristic,optimal,ratio\n2,2,1.0000\n"
    );

    let adjacent = write(d.path(), "a.qasm", "qreg q[2];\ncx q[0],q[1];\nh q[0];\n");
    let out = qmap(&["oracle", &adjacent, "--arch", "1x2:alltoall/alltoall"]);
    assert_eq!(
        String::from_utf8_lossy(&out.stdout),
        "heuristic,optimal,ratio\n0,0,1.0000\n"
    );
}

#[test]
fn gen_outputs() {
    let one = qmap(&["gen", "qft", "--n", "1"]);
    assert_eq!(
        String::from_utf8_lossy(&one.stdout),
        "OPENQASM 2.0;\n// circuit: qft1\nqreg q[1];\nh q[0];\n"
    );

    let d = tempfile::tempdir().unwrap();
    let (a, b) = (d.path().join("a.qasm"), d.path().join("b.qasm"));
    for p in [&a, &b] {
        assert_eq!(
            code(&[
                "gen",
                "random",
                "--n",
                "8",
                "--gates",
                "100",
                "--p2",
                "0.5",
                "--seed",
                "42",
                "--out",
                s(p)
            ]),
            0
        );
    }
    let text = fs::read_to_string(&a).unwrap();
    assert_eq!(text, fs::read_to_string(&b).unwrap());
    assert_eq!(text.lines().filter(|l| l.starts_with("cx ")).count(), 50);
    assert_eq!(qmap::parse_circuit(&text).unwrap().len(), 100);

    let m = qmap(&["gen", "qft", "--n", "3", "--measure", "--bit-reversal"]);
    let c = qmap::parse_circuit(&String::from_utf8_lossy(&m.stdout)).unwrap();
    assert_eq!(c.len(), 6 + 1 + 3);
}

use std::io::Write;
use std::path::Path;
use std::process::{Command, Output, Stdio};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_mp-ldpc"))
}

fn run_with_stdin(args: &[&str], stdin: &str) -> Output {
    let mut child = bin()
        .args(args)
        .env_remove("MP_LDPC_THREADS")
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(stdin.as_bytes())
        .unwrap();
    child.wait_with_output().unwrap()
}

fn run(args: &[&str]) -> Output {
    run_with_stdin(args, "")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn decode_majority_example() {
    let o = run_with_stdin(
        &[
            "decode",
            "--code",
            "majority",
            "--decoder",
            "mpxorsat",
            "--theta",
            "-2.1",
            "--eta",
            "0.5",
            "--tau",
            "2",
        ],
        "0.1236 -1.376 0.105\n",
    );
    assert_eq!(o.status.code(), Some(0));
    let line = stdout(&o);
    assert!(line.starts_with("u=000 converged=1 iters="), "{line}");
    let iters: usize = line.trim().rsplit('=').next().unwrap().parse().unwrap();
    assert!(iters <= 5);
}

#[test]
fn decode_noiseless_codeword_every_decoder() {
    for dec in ["mpxorsat", "spa", "gdbf"] {
        let o = run_with_stdin(
            &["decode", "--code", "hamming74", "--decoder", dec],
            "5 5 -5 -5 -5 5 5",
        );
        assert_eq!(stdout(&o).trim(), "u=1100011 converged=1 iters=0", "{dec}");
    }
}

#[test]
fn decode_reads_input_file() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("r.txt");
    std::fs::write(&p, "-1.0\n-0.9\n-1.1\n").unwrap();
    let o = run(&[
        "decode",
        "--code",
        "majority",
        "--input",
        p.to_str().unwrap(),
    ]);
    assert_eq!(stdout(&o).trim(), "u=000 converged=1 iters=0");
}

#[test]
fn decode_arity_mismatch_is_usage_error() {
    let o = run_with_stdin(&["decode", "--code", "hamming74"], "1 1 1 1 1 1");
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("expected 7"));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(run(&["simulate", "--snr", "1"]).status.code(), Some(1));
    assert_eq!(
        run(&["decode", "--code", "majority", "--bogus"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(
        run(&["sweep", "--code", "reg32", "--snr", "5", "--grid", "kappa=1"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        run(&["decode", "--code", "majority", "--tau", "-1"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn runtime_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.alist");
    std::fs::write(&p, "3 2\n1 2\n").unwrap();
    let o = run(&["codes", "--alist", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&[
        "simulate",
        "--code",
        "reg32",
        "--snr",
        "3",
        "--out",
        "/nonexistent-dir/x.csv",
        "--max-frames",
        "10",
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn codes_summaries() {
    let alist = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/ham74.alist");
    let o = run(&["codes", "--alist", alist.to_str().unwrap()]);
    assert_eq!(stdout(&o).trim(), "N=7 M=3 rank=3 rowdeg=4 coldeg=1..3");
    let o = run(&["codes", "--code", "reg32"]);
    assert_eq!(stdout(&o).trim(), "N=32 M=24 rank=24 rowdeg=4 coldeg=3");
    let listing = stdout(&run(&["codes"]));
    for name in ["majority", "hamming74", "reg32"] {
        assert!(listing.contains(name));
    }
}

fn csv_lines(text: &str) -> Vec<&str> {
    text.lines().filter(|l| !l.is_empty()).collect()
}

#[test]
fn simulate_row_count_and_header() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sim.csv");
    let o = run(&[
        "simulate",
        "--code",
        "reg32",
        "--decoder",
        "mpxorsat,spa",
        "--snr",
        "1,2,3,4,5,6,7",
        "--stop-errors",
        "3",
        "--i-max",
        "10",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&out).unwrap();
    let lines = csv_lines(&text);
    assert_eq!(lines.len(), 15);
    assert_eq!(lines[0], mp_ldpc::sim::CSV_HEADER);
    assert!(lines[1].starts_with("mpxorsat,reg32,1,"));
    assert!(lines[14].starts_with("spa,reg32,7,"));
    // spa leaves the MP-only columns empty
    assert!(lines[14].contains(",,,,10,1"));
    assert!(stdout(&o).contains("decoder"));
}

#[test]
fn simulate_high_snr_hits_frame_cap() {
    let o = run(&[
        "simulate",
        "--code",
        "reg32",
        "--stop-errors",
        "5",
        "--snr",
        "20",
        "--max-frames",
        "2000",
    ]);
    let text = stdout(&o);
    let row = csv_lines(&text)[1];
    assert!(row.starts_with("mpxorsat,reg32,20,2000,0,0,"), "{row}");
}

#[test]
fn sweep_gives_one_row_per_grid_point_and_snr() {
    let o = run(&[
        "sweep",
        "--code",
        "reg32",
        "--snr",
        "4,5",
        "--grid",
        "tau=6,12,24,48",
        "--stop-errors",
        "3",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let lines = csv_lines(&text);
    assert_eq!(lines.len(), 1 + 8);
    let taus: Vec<&str> = lines[1..]
        .iter()
        .map(|l| l.split(',').nth(12).unwrap())
        .collect();
    assert_eq!(taus, ["6", "6", "12", "12", "24", "24", "48", "48"]);
}

#[test]
fn ablate_pairs_rows() {
    let o = run(&[
        "ablate",
        "--code",
        "reg32",
        "--snr",
        "1,3,5",
        "--max-frames",
        "50",
        "--stop-errors",
        "1000",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let lines = csv_lines(&text);
    assert_eq!(lines.len(), 7);
    for pair in lines[1..].chunks(2) {
        assert!(pair[0].starts_with("mpxorsat,"));
        assert!(pair[1].starts_with("mpxorsat_nonorm,"));
        let snr = |l: &str| l.split(',').nth(2).unwrap().to_string();
        assert_eq!(snr(pair[0]), snr(pair[1]));
    }
}

#[test]
fn worker_count_does_not_change_output() {
    let args = [
        "simulate",
        "--code",
        "reg32",
        "--decoder",
        "mpxorsat,gdbf",
        "--snr",
        "2,4",
        "--stop-errors",
        "30",
    ];
    let one = run(&[&args[..], &["--workers", "1"]].concat());
    let four = run(&[&args[..], &["--workers", "4"]].concat());
    let env = bin()
        .args(args)
        .env("MP_LDPC_THREADS", "3")
        .output()
        .unwrap();
    assert_eq!(one.stdout, four.stdout);
    assert_eq!(one.stdout, env.stdout);
}

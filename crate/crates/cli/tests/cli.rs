//! End-to-end runs of the `batchsolve` binary.

use std::path::Path;
use std::process::{Command, Output};

use batchsolve::mtx::write_matrix_market_batch;
use batchsolve_core::generate_stencil_batch;

fn batchsolve(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_batchsolve"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

#[test]
fn bench_prints_csv_and_exits_zero_on_convergence() {
    let dir = tempfile::tempdir().unwrap();
    let out = batchsolve(
        &[
            "bench",
            "--solver",
            "cg",
            "--format",
            "csr",
            "--precond",
            "jacobi",
            "--tol",
            "1e-10",
            "--tol-mode",
            "rel",
            "--max-iters",
            "100",
            "--stencil-rows",
            "16,32",
            "--batch",
            "4",
            "--reps",
            "2",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 3, "header + 2 cases: {text}");
    assert!(lines[0].starts_with("solver,format,precond,"));
    assert!(lines[1].starts_with("cg,csr,jacobi,4,16,"));
    assert!(lines[2].starts_with("cg,csr,jacobi,4,32,"));
}

#[test]
fn bench_writes_the_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let csv_path = dir.path().join("results.csv");
    let out = batchsolve(
        &[
            "bench",
            "--stencil-rows",
            "16",
            "--batch",
            "2",
            "--reps",
            "1",
            "--out",
            csv_path.to_str().unwrap(),
        ],
        dir.path(),
    );
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    assert!(stdout(&out).is_empty(), "CSV goes to the file, not stdout");
    let text = std::fs::read_to_string(&csv_path).unwrap();
    assert_eq!(text.lines().count(), 2);
}

#[test]
fn unconverged_solves_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = batchsolve(
        &[
            "bench",
            "--stencil-rows",
            "64",
            "--batch",
            "2",
            "--max-iters",
            "1",
            "--reps",
            "1",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("did not converge"));
    // The CSV still appears so partial results are not lost.
    assert!(stdout(&out).lines().count() == 2);
}

#[test]
fn missing_source_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = batchsolve(&["bench", "--batch", "4"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("--stencil-rows or --mm-dir"));
}

#[test]
fn unknown_flags_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = batchsolve(&["bench", "--no-such-flag"], dir.path());
    // clap's own usage failure code.
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bench_reads_matrix_market_directories() {
    let dir = tempfile::tempdir().unwrap();
    let mm = dir.path().join("mats");
    let batch = generate_stencil_batch(3, 12, 5).unwrap();
    write_matrix_market_batch(&mm, &batch).unwrap();

    let out = batchsolve(
        &[
            "bench",
            "--solver",
            "bicgstab",
            "--mm-dir",
            mm.to_str().unwrap(),
            "--replicate",
            "2",
            "--reps",
            "1",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text
        .lines()
        .nth(1)
        .unwrap()
        .starts_with("bicgstab,csr,none,6,12,"));
}

#[test]
fn device_profile_and_overrides_shape_the_launch_plan() {
    let dir = tempfile::tempdir().unwrap();
    let profile = dir.path().join("dev.profile");
    std::fs::write(&profile, "name = small\nmax_wg = 64\n").unwrap();

    let out = batchsolve(
        &[
            "bench",
            "--stencil-rows",
            "100",
            "--batch",
            "2",
            "--reps",
            "1",
            "--device-profile",
            profile.to_str().unwrap(),
        ],
        dir.path(),
    );
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    // 100 rows exceed the sub-group threshold (sg=32), round up to 128,
    // then cap at the profile's max of 64.
    assert!(stdout(&out).contains("wg=64;sg=32"), "{}", stdout(&out));

    let out = batchsolve(
        &[
            "bench",
            "--stencil-rows",
            "100",
            "--batch",
            "2",
            "--reps",
            "1",
            "--sub-group-size",
            "32",
            "--work-group-size",
            "128",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    assert!(stdout(&out).contains("wg=128;sg=32"), "{}", stdout(&out));
}

#[test]
fn validate_reports_files_and_the_shared_pattern() {
    let dir = tempfile::tempdir().unwrap();
    let mm = dir.path().join("mats");
    let batch = generate_stencil_batch(2, 8, 1).unwrap();
    write_matrix_market_batch(&mm, &batch).unwrap();

    let out = batchsolve(&["validate", "--mm-dir", mm.to_str().unwrap()], dir.path());
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("entry_00000.mtx: 8 x 8, 22 stored, 22 numeric, general"));
    assert!(text.contains("pattern: shared across 2 files, 8 x 8, 22 entries per matrix"));
}

#[test]
fn validate_rejects_mismatched_patterns_with_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let mm = dir.path().join("mats");
    std::fs::create_dir_all(&mm).unwrap();
    std::fs::write(
        mm.join("a.mtx"),
        "%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1.0\n2 2 1.0\n",
    )
    .unwrap();
    std::fs::write(
        mm.join("b.mtx"),
        "%%MatrixMarket matrix coordinate real general\n2 2 2\n1 2 1.0\n2 2 1.0\n",
    )
    .unwrap();

    let out = batchsolve(&["validate", "--mm-dir", mm.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("position 0"), "{}", stderr(&out));
}

#[test]
fn validate_missing_directory_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = batchsolve(&["validate", "--mm-dir", "definitely/not/here"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn largealpha(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_largealpha"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    assert!(
        out.status.success(),
        "exit {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone()).unwrap()
}

/// Header and numeric rows of a CSV table.
fn table(text: &str) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut lines = text.lines();
    let header = lines
        .next()
        .unwrap()
        .split(',')
        .map(str::to_string)
        .collect();
    let rows = lines
        .map(|l| {
            l.split(',')
                .map(|c| c.parse().unwrap_or(f64::NAN))
                .collect()
        })
        .collect();
    (header, rows)
}

fn col(header: &[String], name: &str) -> usize {
    header.iter().position(|h| h == name).unwrap()
}

#[test]
fn classic_zipf_table_has_one_row_per_exponent() {
    let out = largealpha(&["classic-zipf", "--m", "256", "--s-grid", "0.5:1.5:0.5"]);
    let (header, rows) = table(&stdout(&out));
    assert_eq!(
        header,
        ["s", "H", "huffman_avg", "perbit_avg", "twoblock_avg"]
    );
    assert_eq!(rows.len(), 3);
    for r in &rows {
        assert!(r[2] >= r[1] && r[2] < r[1] + 1.0);
        assert!(r[3] >= r[4] - 1e-12);
    }
}

#[test]
fn theory_bounds_mean_is_below_the_bound() {
    let out = largealpha(&[
        "theory-bounds",
        "--d",
        "10",
        "--draws",
        "2000",
        "--seed",
        "7",
    ]);
    let (header, rows) = table(&stdout(&out));
    let r = &rows[0];
    assert!(r[col(&header, "ordered_mean")] <= r[col(&header, "bound")]);
}

#[test]
fn outputs_do_not_depend_on_worker_count() {
    let args = [
        "theory-bounds",
        "--d",
        "6,8",
        "--draws",
        "300",
        "--seed",
        "3",
    ];
    let one = stdout(&largealpha(&[&["--workers", "1"], &args[..]].concat()));
    let four = stdout(&largealpha(&[&["--workers", "4"], &args[..]].concat()));
    assert_eq!(one, four);

    let args = [
        "vq",
        "lattice",
        "--lattice",
        "d4",
        "--n",
        "5000",
        "--steps",
        "3",
    ];
    let one = stdout(&largealpha(&[&["--workers", "1"], &args[..]].concat()));
    let four = stdout(&largealpha(&[&["--workers", "4"], &args[..]].concat()));
    assert_eq!(one, four);
}

fn round_trip(dir: &Path, input: &Path, extra: &[&str]) {
    let packed = dir.join("packed.labc");
    let restored = dir.join("restored");
    let mut args = vec![
        "compress",
        "-i",
        input.to_str().unwrap(),
        "-o",
        packed.to_str().unwrap(),
    ];
    args.extend_from_slice(extra);
    stdout(&largealpha(&args));
    stdout(&largealpha(&[
        "decompress",
        "-i",
        packed.to_str().unwrap(),
        "-o",
        restored.to_str().unwrap(),
    ]));
    assert_eq!(fs::read(input).unwrap(), fs::read(restored).unwrap());
}

#[test]
fn sampled_dump_survives_compression() {
    let dir = tempfile::tempdir().unwrap();
    let dump = dir.path().join("zipf.dump");
    stdout(&largealpha(&[
        "sample",
        "--source",
        "zipf:1.2:4096",
        "--n",
        "20000",
        "--seed",
        "5",
        "--out",
        dump.to_str().unwrap(),
    ]));
    round_trip(dir.path(), &dump, &["--b", "6", "--iters", "4"]);
    let packed = fs::metadata(dir.path().join("packed.labc")).unwrap().len();
    assert!(packed < fs::metadata(&dump).unwrap().len());
}

#[test]
fn arbitrary_bytes_survive_compression() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("text");
    let text = "the quick brown fox jumps over the lazy dog\n".repeat(200);
    fs::write(&input, text).unwrap();
    round_trip(dir.path(), &input, &[]);
    round_trip(dir.path(), &input, &["--iters", "0"]);

    let empty = dir.path().join("empty");
    fs::write(&empty, b"").unwrap();
    round_trip(dir.path(), &empty, &[]);
}

#[test]
fn universal_reports_a_cost_curve() {
    let out = largealpha(&[
        "universal",
        "--source",
        "zipf:1.2:4096",
        "--n",
        "20000",
        "--b",
        "6",
        "--iters",
        "5",
    ]);
    let (header, rows) = table(&stdout(&out));
    assert_eq!(header[0], "iteration");
    assert!(!rows.is_empty() && rows.len() <= 6);
    let bound = col(&header, "bound");
    assert!(rows.windows(2).all(|w| w[1][bound] <= w[0][bound]));
    assert!(String::from_utf8_lossy(&out.stderr).contains("best total"));
}

#[test]
fn ecvq_sweep_has_both_coders() {
    let out = largealpha(&["vq-ecvq", "--n", "300", "--steps", "4", "--m-init", "8"]);
    let (header, rows) = table(&stdout(&out));
    assert_eq!(rows.len(), 4);
    for name in ["distortion", "rate_joint", "rate_marginal", "rd_bound"] {
        col(&header, name);
    }
    let out = largealpha(&[
        "vq",
        "bica-ecvq",
        "--n",
        "300",
        "--steps",
        "2",
        "--m-init",
        "8",
    ]);
    assert_eq!(table(&stdout(&out)).1.len(), 2);
}

#[test]
fn mixture_samples_are_csv_points() {
    let out = largealpha(&["sample", "--source", "mixture:3:2", "--n", "10"]);
    let (header, rows) = table(&stdout(&out));
    assert_eq!(header, ["x0", "x1", "x2"]);
    assert_eq!(rows.len(), 10);
}

#[test]
fn configuration_errors_exit_with_2() {
    for args in [
        &["classic-zipf", "--s-grid", "2:1:0.1"][..],
        &["theory-bounds", "--d", "0"],
        &["vq", "lattice", "--lattice", "q7"],
        &["universal", "--source", "zipf:x:4"],
        &["no-such-command"],
    ] {
        let out = largealpha(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn data_errors_exit_with_3() {
    let dir = tempfile::tempdir().unwrap();
    let junk = dir.path().join("junk");
    fs::write(&junk, b"not a container").unwrap();
    let out = largealpha(&["decompress", "-i", junk.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    let out = largealpha(&[
        "decompress",
        "-i",
        dir.path().join("missing").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3));
}

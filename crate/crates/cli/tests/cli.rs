//! CLI behavior: exit codes, fixture-level stats, synth round trips, and
//! partial-output cleanup.

use std::fs;
use std::io::Write;
use std::path::Path;
use std::process::{Command, Output};

fn threadstats(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_threadstats")).args(args).output().unwrap()
}

fn write_fixture(dir: &Path) -> (String, String) {
    // Five-row fixture: three posts (one deleted author), two comments on
    // t3_b, plus nothing on t3_a and t3_c.
    let posts = dir.join("posts.jsonl");
    let comments = dir.join("comments.jsonl");
    let mut f = fs::File::create(&posts).unwrap();
    writeln!(f, r#"{{"name":"t3_a","author":"[deleted]","created_utc":100,"subreddit":"s"}}"#)
        .unwrap();
    writeln!(f, r#"{{"name":"t3_b","author":"u1","created_utc":110,"subreddit":"s"}}"#).unwrap();
    writeln!(f, r#"{{"name":"t3_c","author":"u2","created_utc":120,"subreddit":"s"}}"#).unwrap();
    let mut f = fs::File::create(&comments).unwrap();
    writeln!(
        f,
        r#"{{"name":"t1_1","author":"u2","created_utc":200,"link_id":"t3_b","parent_id":"t3_b","body":"hi","subreddit":"s"}}"#
    )
    .unwrap();
    writeln!(
        f,
        r#"{{"name":"t1_2","author":"u1","created_utc":210,"link_id":"t3_b","parent_id":"t1_1","body":"yo","subreddit":"s"}}"#
    )
    .unwrap();
    (posts.to_str().unwrap().to_string(), comments.to_str().unwrap().to_string())
}

#[test]
fn unknown_subcommand_exits_2() {
    let out = threadstats(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!String::from_utf8_lossy(&out.stderr).is_empty());
}

#[test]
fn missing_input_file_exits_2() {
    let tmp = tempfile::tempdir().unwrap();
    let out = threadstats(&[
        "stats",
        "--posts",
        "/nonexistent/posts.jsonl",
        "--comments",
        "/nonexistent/comments.jsonl",
        "--window-start",
        "0",
        "--window-end",
        "10",
        "--out",
        tmp.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn empty_window_exits_2() {
    let tmp = tempfile::tempdir().unwrap();
    let (posts, comments) = write_fixture(tmp.path());
    let out = threadstats(&[
        "stats", "--posts", &posts, "--comments", &comments, "--window-start", "10",
        "--window-end", "10", "--out", tmp.path().join("out").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn stats_on_fixture_hand_counted() {
    let tmp = tempfile::tempdir().unwrap();
    let (posts, comments) = write_fixture(tmp.path());
    let out_dir = tmp.path().join("report");
    let out = threadstats(&[
        "stats", "--posts", &posts, "--comments", &comments, "--window-start", "1",
        "--window-end", "1000", "--out", out_dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let stats: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out_dir.join("basic_stats.json")).unwrap())
            .unwrap();
    assert_eq!(stats["n_posts"], 3);
    assert_eq!(stats["n_deleted_author_posts"], 1);
    assert_eq!(stats["n_zero_comment_posts"], 2);
    assert_eq!(stats["n_one_comment_posts"], 0);
    assert_eq!(stats["n_comments"], 2);
    assert_eq!(stats["n_comments_on_period_posts"], 2);
    assert_eq!(stats["n_disconnected_posts"], 0);
    assert_eq!(stats["n_removed_comments"], 0);
}

#[test]
fn synth_rerun_is_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let config = tmp.path().join("config.json");
    fs::write(
        &config,
        r#"{
            "seed": 11,
            "n_posts": 300,
            "subreddits": [],
            "cyborg": {"count": 5, "successful": 2},
            "fast_self_short": {"count": 2, "successful": 1},
            "fast_other": {"count": 2},
            "lifecycle": {"early": 1, "steady": 1, "late": 1, "comments_per_post": 60, "min_comments": 50},
            "limelight": {"count": 5, "hog_same_author": 1},
            "bursty_posts": [],
            "bursty_authors": {"posting": [], "commenting": []},
            "controversial": {"count": 2, "mild_count": 2},
            "orphan_comments": 1,
            "disconnected_comments": 1
        }"#,
    )
    .unwrap();
    let out_a = tmp.path().join("a");
    let out_b = tmp.path().join("b");
    for dir in [&out_a, &out_b] {
        let out = threadstats(&[
            "synth",
            "--config",
            config.to_str().unwrap(),
            "--out",
            dir.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    }
    for name in ["posts.jsonl", "comments.jsonl", "ground_truth.json"] {
        assert_eq!(
            fs::read(out_a.join(name)).unwrap(),
            fs::read(out_b.join(name)).unwrap(),
            "{name} differs between reruns"
        );
    }
}

#[test]
fn invalid_synth_config_exits_2() {
    let tmp = tempfile::tempdir().unwrap();
    let config = tmp.path().join("config.json");
    // Planted counts exceed n_posts.
    fs::write(&config, r#"{"seed": 1, "n_posts": 3, "subreddits": []}"#).unwrap();
    let out = threadstats(&[
        "synth",
        "--config",
        config.to_str().unwrap(),
        "--out",
        tmp.path().join("out").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn io_failure_exits_1_without_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let (posts, _) = write_fixture(tmp.path());
    // Comments path exists at validation time, then fails at read time
    // because it is a directory.
    let bogus_comments = tmp.path().join("not_a_file");
    fs::create_dir(&bogus_comments).unwrap();
    let out_dir = tmp.path().join("partial");
    let out = threadstats(&[
        "all",
        "--posts",
        &posts,
        "--comments",
        bogus_comments.to_str().unwrap(),
        "--window-start",
        "1",
        "--window-end",
        "1000",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    let leftovers: Vec<_> = match fs::read_dir(&out_dir) {
        Ok(entries) => entries.map(|e| e.unwrap().file_name()).collect(),
        Err(_) => Vec::new(),
    };
    assert!(leftovers.is_empty(), "partial outputs left behind: {leftovers:?}");
}

#[test]
fn failed_run_removes_partial_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let (posts, comments) = write_fixture(tmp.path());
    let out_dir = tmp.path().join("partial");
    fs::create_dir_all(&out_dir).unwrap();
    // A directory squatting on a late output name makes the run fail after
    // earlier reports were already written.
    fs::create_dir(out_dir.join("cyborg_report.json")).unwrap();
    let out = threadstats(&[
        "all",
        "--posts",
        &posts,
        "--comments",
        &comments,
        "--window-start",
        "1",
        "--window-end",
        "1000",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    for name in ["basic_stats.json", "tree_metrics.csv", "lifecycle.csv", "cyborg_posts.csv"] {
        assert!(
            !out_dir.join(name).exists(),
            "partial output {name} survived the failed run"
        );
    }
}

#[test]
fn gzip_input_accepted() {
    use flate2::write::GzEncoder;
    use flate2::Compression;

    let tmp = tempfile::tempdir().unwrap();
    let (posts, comments) = write_fixture(tmp.path());
    let gz_posts = tmp.path().join("posts.jsonl.gz");
    let gz_comments = tmp.path().join("comments.jsonl.gz");
    for (plain, gz) in [(&posts, &gz_posts), (&comments, &gz_comments)] {
        let mut enc = GzEncoder::new(fs::File::create(gz).unwrap(), Compression::default());
        enc.write_all(&fs::read(plain).unwrap()).unwrap();
        enc.finish().unwrap();
    }
    let out_dir = tmp.path().join("gz_report");
    let out = threadstats(&[
        "stats",
        "--posts",
        gz_posts.to_str().unwrap(),
        "--comments",
        gz_comments.to_str().unwrap(),
        "--window-start",
        "1",
        "--window-end",
        "1000",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let stats: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out_dir.join("basic_stats.json")).unwrap())
            .unwrap();
    assert_eq!(stats["n_posts"], 3);
    assert_eq!(stats["n_comments"], 2);
}

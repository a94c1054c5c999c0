//! End-to-end tests of the `policyscope` binary: exit codes, stage
//! wiring against an in-process mock archive, and the bundled
//! `mock-archive` server subcommand.

use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

use policyscope::archive::mock::http_get;
use policyscope::archive::{MockArchive, MockCapture, MockOptions};

const BIN: &str = env!("CARGO_BIN_EXE_policyscope");

fn run_cli(args: &[&str]) -> Output {
    Command::new(BIN)
        .args(args)
        .output()
        .expect("spawn policyscope")
}

fn stderr_of(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).into_owned()
}

fn stdout_of(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

fn capture(url: &str, ts: &str, body: &str) -> MockCapture {
    MockCapture {
        url: url.into(),
        timestamp: ts.into(),
        status: 200,
        mime: "text/html".into(),
        digest: String::new(),
        body: body.into(),
        redirect_timestamp: None,
        redirect_url: None,
    }
}

const HOMEPAGE: &str = r#"<html><body>
<p>Welcome to our storefront, where we explain everything about how the
service works and what happens with the information you share with us.</p>
<footer><a href="/privacy">Privacy Policy</a></footer>
</body></html>"#;

const POLICY: &str = r#"<html><body><article>
<h1>Privacy Policy</h1>
<p>We collect personal information such as your email address and usage
logs. We share data with service providers and use cookies for analytics.
You may request deletion of your personal information at any time.</p>
</article></body></html>"#;

/// Labeled documents drawn from two distinct vocabularies, so a small
/// grid separates them cleanly.
fn write_training_set(dir: &Path) -> PathBuf {
    let training = dir.join("training");
    std::fs::create_dir_all(&training).unwrap();
    let mut rows = vec!["path,label".to_string()];
    for i in 0..12 {
        let name = format!("pos_{i}.md");
        let body = format!(
            "# Privacy Policy {i}\n\nWe collect personal information such as your \
email address and usage logs. We share data with service providers and use \
cookies for analytics. You may request deletion of your personal information \
at any time.\n"
        );
        std::fs::write(training.join(&name), body).unwrap();
        rows.push(format!("{name},1"));
    }
    for i in 0..12 {
        let name = format!("neg_{i}.md");
        let body = format!(
            "# Sourdough Notes {i}\n\nMix the flour with water and let the dough \
rest overnight. Bake at high heat until the crust browns. Serve the bread \
warm with butter and a pinch of salt.\n"
        );
        std::fs::write(training.join(&name), body).unwrap();
        rows.push(format!("{name},0"));
    }
    let labels = training.join("labels.csv");
    std::fs::write(&labels, rows.join("\n") + "\n").unwrap();
    labels
}

fn write_config(dir: &Path, endpoint: &str) -> PathBuf {
    let text = format!(
        "archive_endpoint = {endpoint}\n\
         workers = 2\n\
         work_dir = work\n\
         corpus_dir = corpus\n\
         reports_dir = reports\n\
         rank_lists_dir = ranks\n\
         labels_csv = training/labels.csv\n\
         cv_folds = 4\n\
         df_floor = 0.25\n\
         grid_trees = 25\n\
         grid_depth = none\n\
         grid_min_leaf = 1\n\
         grid_l2 = 1.0\n"
    );
    let path = dir.join("pipeline.conf");
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn usage_errors_exit_two() {
    let output = run_cli(&["frobnicate"]);
    assert_eq!(output.status.code(), Some(2));
    let output = run_cli(&[]);
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn missing_prerequisite_exits_one_and_names_the_stage() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "http://127.0.0.1:1");
    let output = run_cli(&["fetch", "--config", config.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(1));
    let stderr = stderr_of(&output);
    assert!(
        stderr.contains("discover") && stderr.contains("manifest"),
        "stderr should name the missing prerequisite: {stderr}"
    );
}

#[test]
fn non_local_endpoint_requires_live_flag() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "https://archive.example.org");
    std::fs::create_dir_all(dir.path().join("ranks")).unwrap();
    std::fs::write(dir.path().join("ranks/2016A.csv"), "1,alpha.com\n").unwrap();
    let output = run_cli(&["discover", "--config", config.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(1));
    assert!(stderr_of(&output).contains("--live"));
}

#[test]
fn bad_config_exits_one_with_reason() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.conf");
    std::fs::write(&path, "worker_count = 3\n").unwrap();
    let output = run_cli(&["discover", "--config", path.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(1));
    assert!(stderr_of(&output).contains("unknown key"));
}

#[test]
fn seed_flag_reaches_the_configuration() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::create_dir_all(dir.path().join("ranks")).unwrap();
    std::fs::write(dir.path().join("ranks/2016A.csv"), "1,alpha.com\n").unwrap();
    let mock = MockArchive::start(Vec::new(), MockOptions::default()).unwrap();
    let config = write_config(dir.path(), &mock.endpoint());
    let config = config.to_str().unwrap();

    let digest_after = |seed: &str| {
        let output = run_cli(&["discover", "--config", config, "--seed", seed]);
        assert_eq!(output.status.code(), Some(0), "{}", stderr_of(&output));
        let manifest: serde_json::Value = serde_json::from_str(
            &std::fs::read_to_string(dir.path().join("work/manifests/discover.json")).unwrap(),
        )
        .unwrap();
        manifest["config_digest"].as_str().unwrap().to_string()
    };

    let seven = digest_after("7");
    let eight = digest_after("8");
    assert_ne!(seven, eight, "seed must be part of the recorded config");
    assert_eq!(seven, digest_after("7"));
}

#[test]
fn mock_archive_serves_fixtures_and_injects_rate_limits() {
    let dir = tempfile::tempdir().unwrap();
    let captures_path = dir.path().join("captures.jsonl");
    std::fs::write(
        &captures_path,
        r#"{"url":"http://example.com/","timestamp":"20160320000000","body":"<html>hi</html>"}"#,
    )
    .unwrap();

    let mut child = Command::new(BIN)
        .args([
            "mock-archive",
            "--captures",
            captures_path.to_str().unwrap(),
            "--rate-limit-first",
            "1",
        ])
        .stdout(Stdio::piped())
        .spawn()
        .expect("spawn mock-archive");
    let mut endpoint = String::new();
    BufReader::new(child.stdout.take().expect("child stdout"))
        .read_line(&mut endpoint)
        .expect("read endpoint line");
    let endpoint = endpoint.trim().to_string();
    assert!(
        endpoint.starts_with("http://127.0.0.1:"),
        "first stdout line should be the endpoint, got {endpoint:?}"
    );

    let result = (|| {
        let (status, body) = http_get(&format!(
            "{endpoint}/cdx/search/cdx?url=http%3A%2F%2Fexample.com%2F&output=json"
        ))?;
        assert_eq!(status, 200);
        assert!(String::from_utf8_lossy(&body).contains("20160320000000"));

        // the first capture request is rate limited, the next succeeds
        let web = format!("{endpoint}/web/20160320000000id_/http://example.com/");
        let (status, _) = http_get(&web)?;
        assert_eq!(status, 429);
        let (status, body) = http_get(&web)?;
        assert_eq!(status, 200);
        assert_eq!(body, b"<html>hi</html>");
        Ok::<(), policyscope::archive::ArchiveError>(())
    })();

    child.kill().expect("kill mock-archive");
    child.wait().expect("reap mock-archive");
    result.expect("requests against the child server");
}

#[test]
fn pipeline_runs_end_to_end_through_the_binary() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::create_dir_all(dir.path().join("ranks")).unwrap();
    std::fs::write(
        dir.path().join("ranks/2016A.csv"),
        "1,alpha.com\n2,beta.com\n",
    )
    .unwrap();
    std::fs::write(
        dir.path().join("ranks/2016B.csv"),
        "1,alpha.com\n2,beta.com\n",
    )
    .unwrap();
    write_training_set(dir.path());

    let mut captures = Vec::new();
    for site in ["alpha.com", "beta.com"] {
        for (home_ts, policy_ts) in [
            ("20160320000000", "20160322000000"),
            ("20160920000000", "20160922000000"),
        ] {
            captures.push(capture(&format!("http://{site}/"), home_ts, HOMEPAGE));
            captures.push(capture(
                &format!("http://{site}/privacy"),
                policy_ts,
                POLICY,
            ));
        }
    }
    let mock = MockArchive::start(captures, MockOptions::default()).unwrap();
    let config_path = write_config(dir.path(), &mock.endpoint());
    let config = config_path.to_str().unwrap();

    for stage in [
        "discover", "fetch", "extract", "train", "classify", "curate", "analyze", "report",
    ] {
        let output = run_cli(&[stage, "--config", config]);
        assert_eq!(
            output.status.code(),
            Some(0),
            "stage {stage} failed: {}",
            stderr_of(&output)
        );
        assert!(
            stdout_of(&output).contains(&format!("{stage} complete")),
            "stage {stage} should print a summary line"
        );
    }

    let lengths = std::fs::read_to_string(dir.path().join("reports/lengths.csv")).unwrap();
    let mut lines = lengths.lines();
    assert_eq!(lines.next(), Some("interval,median_word_count,p5,p95"));
    assert_eq!(lines.clone().count(), 2, "one row per interval: {lengths}");
    assert!(lines.all(|l| l.starts_with("2016A,") || l.starts_with("2016B,")));

    // a second full run through the aggregate subcommand is byte-stable
    let metadata = dir.path().join("corpus/metadata.jsonl");
    let before = std::fs::read(&metadata).unwrap();
    let output = run_cli(&["run", "--config", config]);
    assert_eq!(output.status.code(), Some(0), "{}", stderr_of(&output));
    assert_eq!(std::fs::read(&metadata).unwrap(), before);

    // --corpus redirects document output away from the configured root
    let other = dir.path().join("elsewhere");
    let output = run_cli(&[
        "extract",
        "--config",
        config,
        "--corpus",
        other.to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(0), "{}", stderr_of(&output));
    assert!(other.join("alpha.com/2016A/policy.md").is_file());
}

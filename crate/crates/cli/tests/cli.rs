mod common;

use std::io::{BufRead, BufReader};
use std::path::Path;
use std::process::{Child, Command, Stdio};

use common::{ok, stopcur, tree, zipf_corpus};

fn setup(n: usize) -> (tempfile::TempDir, std::path::PathBuf) {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("corpus.txt");
    std::fs::write(&corpus, zipf_corpus(n, 300, 11, Some("आणि"))).unwrap();
    (dir, corpus)
}

#[test]
fn stages_match_pipeline_byte_for_byte() {
    let (dir, corpus) = setup(2000);
    let c = corpus.to_str().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    ok(
        &a,
        &["pipeline", "--corpus", c, "--chunks", "5", "--k", "100"],
    );
    ok(&b, &["ingest", "--corpus", c]);
    ok(&b, &["chunk", "--chunks", "5"]);
    for i in ["3", "0", "4", "1", "2"] {
        ok(&b, &["score", "--chunk", i, "--k", "100", "--jobs", "1"]);
    }
    ok(&b, &["intersect"]);
    let (ta, tb) = (tree(&a), tree(&b));
    assert_eq!(ta.len(), 1 + 1 + 5 * 3 + 2);
    assert_eq!(ta, tb);
    let inter = std::fs::read_to_string(a.join("intersection.txt")).unwrap();
    assert_eq!(inter.lines().next(), Some("आणि"));
}

#[test]
fn rescoring_a_chunk_is_deterministic() {
    let (dir, corpus) = setup(800);
    let out = dir.path().join("o");
    ok(&out, &["ingest", "--corpus", corpus.to_str().unwrap()]);
    ok(&out, &["chunk", "--chunks", "4"]);
    ok(&out, &["score", "--chunk", "3"]);
    let first = tree(&out);
    ok(&out, &["score", "--chunk", "3"]);
    assert_eq!(first, tree(&out));
    let header = std::fs::read_to_string(out.join("candidates/chunk_03.txt")).unwrap();
    assert!(header.starts_with("# stopcur-candidates v1 chunk=3 first_line=600 last_line=799"));
    assert!(header
        .lines()
        .next()
        .unwrap()
        .contains("k=5000 min_df=0.001 corpus_sha256="));
}

#[test]
fn failures_exit_nonzero_with_stage() {
    let dir = tempfile::tempdir().unwrap();
    let o = stopcur(dir.path(), &["frobnicate"]);
    assert!(!o.status.success());
    let o = stopcur(dir.path(), &["ingest"]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("--corpus"));
    let o = stopcur(dir.path(), &["score"]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("score"));
    let missing = dir.path().join("nope.txt");
    let o = stopcur(
        dir.path(),
        &["pipeline", "--corpus", missing.to_str().unwrap()],
    );
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("ingest"));
    let (dir, corpus) = setup(10);
    let o = stopcur(
        dir.path(),
        &[
            "pipeline",
            "--corpus",
            corpus.to_str().unwrap(),
            "--chunks",
            "11",
        ],
    );
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("chunk"));
}

#[test]
fn remove_filters_each_line() {
    let dir = tempfile::tempdir().unwrap();
    let p = |n: &str| dir.path().join(n);
    std::fs::write(p("stop.txt"), "आणि\nहे\n").unwrap();
    std::fs::write(p("a.txt"), "अ आणि ब.\n\nहे आणि\nMixed CASE आणि\n").unwrap();
    ok(
        dir.path(),
        &[
            "remove",
            "--list",
            p("stop.txt").to_str().unwrap(),
            "--in",
            p("a.txt").to_str().unwrap(),
            "--out",
            p("b.txt").to_str().unwrap(),
        ],
    );
    assert_eq!(
        std::fs::read_to_string(p("b.txt")).unwrap(),
        "अ ब\n\n\nmixed case\n"
    );
}

#[test]
fn eval_reports_json() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("r.json");
    let out = ok(
        dir.path(),
        &[
            "eval",
            "--format",
            "json",
            "--seed",
            "3",
            "--report",
            report.to_str().unwrap(),
        ],
    );
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let r = &v["report"];
    let delta = r["delta"].as_f64().unwrap();
    assert_eq!(
        delta,
        r["acc_without_stopwords"].as_f64().unwrap() - r["acc_with_stopwords"].as_f64().unwrap()
    );
    assert!(delta.abs() <= 0.02);
    assert_eq!(std::fs::read_to_string(&report).unwrap(), out);
    assert_eq!(
        ok(dir.path(), &["eval", "--format", "json", "--seed", "3"]),
        out
    );
}

#[test]
fn eval_on_csv_needs_list() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("d.csv");
    std::fs::write(&csv, "text,label\nक ख,a\nग घ,b\n").unwrap();
    let o = stopcur(dir.path(), &["eval", "--data", csv.to_str().unwrap()]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("--list"));
}

struct Server {
    child: Child,
    url: String,
}

impl Server {
    fn start(out: &Path) -> Server {
        let mut child = Command::new(common::bin())
            .args(["serve", "--addr", "127.0.0.1:0"])
            .env("STOPCUR_OUT_DIR", out)
            .stdout(Stdio::piped())
            .stderr(Stdio::inherit())
            .spawn()
            .unwrap();
        let mut line = String::new();
        BufReader::new(child.stdout.take().unwrap())
            .read_line(&mut line)
            .unwrap();
        let url = line
            .trim()
            .strip_prefix("listening on ")
            .unwrap_or_else(|| panic!("unexpected banner {line:?}"))
            .to_owned();
        Server { child, url }
    }

    fn get(&self, path: &str) -> serde_json::Value {
        let body = ureq::get(&format!("{}{path}", self.url))
            .call()
            .unwrap()
            .body_mut()
            .read_to_string()
            .unwrap();
        serde_json::from_str(&body).unwrap()
    }

    fn vote(&self, session: &str, reviewer: &str, term: &str, judgment: &str) -> u16 {
        let body = serde_json::json!({"reviewer": reviewer, "term": term, "judgment": judgment});
        match ureq::post(&format!("{}/session/{session}/votes", self.url))
            .header("content-type", "application/json")
            .send(body.to_string())
        {
            Ok(r) => r.status().as_u16(),
            Err(ureq::Error::StatusCode(c)) => c,
            Err(e) => panic!("{e}"),
        }
    }

    fn kill(mut self) {
        self.child.kill().unwrap();
        self.child.wait().unwrap();
    }
}

impl Drop for Server {
    fn drop(&mut self) {
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}

#[test]
fn review_flow_survives_kill() {
    let (dir, corpus) = setup(1500);
    let out = dir.path().join("o");
    ok(
        &out,
        &[
            "pipeline",
            "--corpus",
            corpus.to_str().unwrap(),
            "--chunks",
            "3",
            "--k",
            "40",
        ],
    );
    let id = ok(
        &out,
        &["session", "new", "--created-at", "2024-05-01T00:00:00Z"],
    )
    .trim()
    .to_owned();
    let terms: Vec<String> = std::fs::read_to_string(out.join("intersection.txt"))
        .unwrap()
        .lines()
        .map(str::to_owned)
        .collect();
    assert!(terms.len() >= 4, "{terms:?}");

    let server = Server::start(&out);
    let page = server.get(&format!("/session/{id}/candidates?reviewer=r1&limit=2"));
    assert_eq!(page["items"][0]["term"], terms[0]);
    assert!(!page["items"][0]["samples"].as_array().unwrap().is_empty());
    // First term: two altered votes; the rest preserved.
    let judgment = |t: usize, r: usize| {
        if t == 0 && r < 2 {
            "meaning_altered"
        } else {
            "meaning_preserved"
        }
    };
    let half = terms.len() / 2;
    for (t, term) in terms[..half].iter().enumerate() {
        for r in 0..3 {
            assert_eq!(
                server.vote(&id, &format!("r{}", r + 1), term, judgment(t, r)),
                200
            );
        }
    }
    assert_eq!(server.vote(&id, "r9", &terms[0], "meaning_altered"), 400);
    server.kill();

    let server = Server::start(&out);
    let p = server.get(&format!("/session/{id}/progress"));
    for r in p["reviewers"].as_array().unwrap() {
        assert_eq!(r["voted"].as_u64().unwrap() as usize, half);
    }
    for (t, term) in terms.iter().enumerate().skip(half) {
        for r in 0..3 {
            assert_eq!(
                server.vote(&id, &format!("r{}", r + 1), term, judgment(t, r)),
                200
            );
        }
    }
    let res = server.get(&format!("/session/{id}/result"));
    assert_eq!(res["complete"], true);
    assert_eq!(res["non_trivial"], serde_json::json!([terms[0]]));
    server.kill();

    let agg: serde_json::Value =
        serde_json::from_str(&ok(&out, &["aggregate", "--format", "json"])).unwrap();
    assert_eq!(
        agg["aggregate"]["stopwords"].as_array().unwrap().len(),
        terms.len() - 1
    );

    let list = dir.path().join("stop.txt");
    ok(&out, &["list", "export", "--out", list.to_str().unwrap()]);
    let mut expected: Vec<&str> = terms[1..].iter().map(String::as_str).collect();
    expected.sort_unstable();
    assert_eq!(
        std::fs::read_to_string(&list).unwrap(),
        expected.join("\n") + "\n"
    );

    let pos = dir.path().join("pos.tsv");
    std::fs::write(&pos, format!("{}\tCCONJ\n", terms[1])).unwrap();
    let structured = dir.path().join("stop.tsv");
    ok(
        &out,
        &[
            "list",
            "export",
            "--out",
            structured.to_str().unwrap(),
            "--structured",
            "--pos-map",
            pos.to_str().unwrap(),
        ],
    );
    let text = std::fs::read_to_string(&structured).unwrap();
    assert!(text.starts_with("#stopcur-stopwords v1\n#provenance "));
    assert!(text.contains(&id));
    let counts: serde_json::Value = serde_json::from_str(&ok(
        &out,
        &[
            "list",
            "categorize",
            "--list",
            structured.to_str().unwrap(),
            "--pos-map",
            pos.to_str().unwrap(),
            "--format",
            "json",
        ],
    ))
    .unwrap();
    assert_eq!(counts["CCONJ"], 1);
    assert_eq!(
        counts["untagged"].as_u64().unwrap() as usize,
        terms.len() - 2
    );
}

#[test]
fn export_refuses_unresolved_sessions() {
    let (dir, corpus) = setup(300);
    let out = dir.path().join("o");
    ok(
        &out,
        &[
            "pipeline",
            "--corpus",
            corpus.to_str().unwrap(),
            "--chunks",
            "2",
            "--k",
            "20",
        ],
    );
    ok(&out, &["session", "new"]);
    let list = dir.path().join("l.txt");
    let o = stopcur(&out, &["list", "export", "--out", list.to_str().unwrap()]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("unresolved"));
}

use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use iotn_cli::{run, CliError};
use tempfile::TempDir;

const RECORDS: &str = "\
Year,Reporter,Partner,Trade Flow,Commodity Code,Trade Value (US$)
2003,USA,Canada,Import,270900,100
2003,USA,Mexico,Import,270900,50
2003,China,Saudi Arabia,Import,270900,70
2003,China,Russia,Import,270900,70
2003,Japan,Saudi Arabia,Import,270900,10
2003,Japan,\"Other Asia, nes\",Import,270900,10
2003,Germany,Russia,Import,270900,80
2003,Germany,Norway,Import,270900,20
2017,USA,Canada,Import,270900,100
2017,USA,Saudi Arabia,Import,270900,50
2017,China,Saudi Arabia,Import,270900,70
2017,China,Angola,Import,270900,30
2017,Canada,USA,Import,270900,5
2017,Netherlands,Norway,Import,270900,40
2017,Netherlands,Russia,Import,270900,40
2017,Germany,Netherlands,Import,270900,30
2017,India,Iraq,Import,270900,25
2017,India,Saudi Arabia,Import,270900,25
2017,World,USA,Import,270900,30
2017,Spain,Mexico,Import,oops,30
";

struct Fixture {
    dir: TempDir,
}

impl Fixture {
    fn new() -> Self {
        let dir = TempDir::new().unwrap();
        fs::write(dir.path().join("records.csv"), RECORDS).unwrap();
        let f = Fixture { dir };
        f.ok(&[
            "build",
            "--input",
            &f.s("records.csv"),
            "--out",
            &f.s("net"),
        ]);
        f
    }

    fn p(&self, rel: &str) -> PathBuf {
        self.dir.path().join(rel)
    }

    fn s(&self, rel: &str) -> String {
        self.p(rel).display().to_string()
    }

    fn call(&self, args: &[&str]) -> Result<(), CliError> {
        run(std::iter::once("iotn").chain(args.iter().copied()))
    }

    fn ok(&self, args: &[&str]) {
        self.call(args).unwrap_or_else(|e| panic!("{args:?}: {e}"));
    }

    fn read(&self, rel: &str) -> String {
        fs::read_to_string(self.p(rel)).unwrap()
    }

    fn rows(&self, rel: &str) -> usize {
        self.read(rel).lines().count() - 1
    }
}

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_iotn"));
    cmd.env_remove(iotn_cli::CONFIG_ENV);
    cmd
}

fn files_except_manifest(dir: &Path) -> Vec<(PathBuf, Vec<u8>)> {
    let mut out = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in fs::read_dir(d).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else if path.file_name().unwrap() != "manifest.json" {
                out.push((
                    path.strip_prefix(dir).unwrap().to_path_buf(),
                    fs::read(&path).unwrap(),
                ));
            }
        }
    }
    out.sort();
    out
}

#[test]
fn build_writes_one_edge_list_per_year() {
    let f = Fixture::new();
    assert_eq!(
        f.read("net/network_summary.csv"),
        "year,N,edge_count\n2003,9,7\n2017,11,10\n"
    );
    let edges = f.read("net/edges/edges_2017.csv");
    assert!(edges.contains("Saudi Arabia,India\n"));
    assert!(!edges.contains("World"));
    assert!(!f.read("net/edges/edges_2003.csv").contains("nes"));
    assert!(f.p("net/manifest.json").exists());
}

#[test]
fn build_with_only_excluded_partners_gives_empty_networks() {
    let dir = TempDir::new().unwrap();
    let input = dir.path().join("r.csv");
    fs::write(
        &input,
        "Year,Reporter,Partner,Trade Flow,Commodity Code,Trade Value (US$)\n2001,USA,World,Import,270900,5\n",
    )
    .unwrap();
    let out = dir.path().join("o");
    let status = bin()
        .args([
            "build",
            "--input",
            input.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(status.status.success());
    assert!(String::from_utf8_lossy(&status.stderr).contains("warning"));
    assert_eq!(
        fs::read_to_string(out.join("network_summary.csv")).unwrap(),
        "year,N,edge_count\n2001,0,0\n"
    );
}

#[test]
fn missing_column_is_a_data_error() {
    let dir = TempDir::new().unwrap();
    let input = dir.path().join("r.csv");
    fs::write(&input, "Year,Reporter,Trade Flow\n2001,USA,Import\n").unwrap();
    let out = bin()
        .args([
            "build",
            "--input",
            input.to_str().unwrap(),
            "--out",
            dir.path().join("o").to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Partner"));
}

#[test]
fn rank_writes_twelve_score_files_and_top_k() {
    let f = Fixture::new();
    f.ok(&[
        "rank",
        "--input",
        &f.s("net"),
        "--out",
        &f.s("rank"),
        "--years",
        "2017",
    ]);
    let files = fs::read_dir(f.p("rank/scores")).unwrap().count();
    assert_eq!(files, 12);
    assert_eq!(f.rows("rank/scores/pagerank.csv"), 11);
    // 11 economies, so the top-10 view is full for every indicator.
    assert_eq!(f.rows("rank/top_k.csv"), 12 * 10);
    f.ok(&[
        "rank",
        "--input",
        &f.s("net"),
        "--out",
        &f.s("rank3"),
        "--indicators",
        "hubs",
        "--top-k",
        "3",
    ]);
    assert_eq!(f.rows("rank3/top_k.csv"), 2 * 3);
}

#[test]
fn rank_on_empty_network_succeeds_with_empty_tables() {
    let f = Fixture::new();
    fs::create_dir_all(f.p("empty/edges")).unwrap();
    fs::write(f.p("empty/edges/edges_1999.csv"), "").unwrap();
    f.ok(&["rank", "--input", &f.s("empty"), "--out", &f.s("r")]);
    assert_eq!(f.rows("r/scores/indegree.csv"), 0);
    assert_eq!(f.rows("r/top_k.csv"), 0);
}

#[test]
fn attack_cardinality() {
    let f = Fixture::new();
    f.ok(&[
        "attack",
        "--input",
        &f.s("net"),
        "--out",
        &f.s("att"),
        "--years",
        "2003",
        "--strategies",
        "indegree,random",
        "--trials",
        "20",
    ]);
    assert_eq!(fs::read_dir(f.p("att/curves")).unwrap().count(), 2);
    assert_eq!(f.rows("att/robustness.csv"), 2);
    assert_eq!(f.rows("att/curves/2003_random.csv"), 9);
    assert_eq!(
        f.read("att/robustness_matrix.csv").lines().next(),
        Some("year,indegree,random")
    );
    let r: Vec<f64> = f
        .read("att/robustness.csv")
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(2).unwrap().parse().unwrap())
        .collect();
    assert!(r.iter().all(|&r| (0.0..=8.0 / 18.0).contains(&r)));
}

#[test]
fn attack_and_communities_are_byte_identical_across_runs() {
    let f = Fixture::new();
    for out in ["a1", "a2"] {
        f.ok(&[
            "attack",
            "--input",
            &f.s("net"),
            "--out",
            &f.s(out),
            "--trials",
            "15",
            "--seed",
            "9",
        ]);
    }
    for out in ["c1", "c2"] {
        f.ok(&[
            "communities",
            "--input",
            &f.s("net"),
            "--out",
            &f.s(out),
            "--seed",
            "9",
            "--format",
            "json",
        ]);
    }
    let a1 = files_except_manifest(&f.p("a1"));
    assert_eq!(a1.len(), 2 * 13 + 3);
    assert_eq!(a1, files_except_manifest(&f.p("a2")));
    assert_eq!(
        files_except_manifest(&f.p("c1")),
        files_except_manifest(&f.p("c2"))
    );
}

#[test]
fn adaptive_mode_runs() {
    let f = Fixture::new();
    f.ok(&[
        "attack",
        "--input",
        &f.s("net"),
        "--out",
        &f.s("ad"),
        "--mode",
        "adaptive",
        "--strategies",
        "betweenness",
    ]);
    assert_eq!(f.rows("ad/robustness.csv"), 2);
}

#[test]
fn correlate_all_indicators_gives_66_pairs_per_year() {
    let f = Fixture::new();
    f.ok(&[
        "correlate",
        "--input",
        &f.s("net"),
        "--out",
        &f.s("cor"),
        "--years",
        "2017",
    ]);
    let text = f.read("cor/correlations.csv");
    assert_eq!(text.lines().count() - 1, 66);
    assert!(text.starts_with("year,indicator_a,indicator_b,n,rho,p,stars\n"));
}

#[test]
fn orgs_rows_and_gaps() {
    let f = Fixture::new();
    fs::write(
        f.p("orgs.json"),
        r#"[{"name": "G7", "members": [{"id": "USA"}, {"id": "Japan"}, {"id": "Germany"}]},
            {"name": "OPEC", "members": [{"id": "Saudi Arabia"}, {"id": "Iraq"}, {"id": "Angola", "from": 2007}]},
            {"name": "Nobody", "members": [{"id": "Atlantis"}]}]"#,
    )
    .unwrap();
    f.ok(&[
        "orgs",
        "--input",
        &f.s("net"),
        "--out",
        &f.s("o"),
        "--config",
        &f.s("orgs.json"),
    ]);
    // Two present organisations x 12 indicators x 2 years.
    assert_eq!(f.rows("o/organizations.csv"), 2 * 12 * 2);
    let evo = f.read("o/evolution.csv");
    // 3 organisations x 12 indicators x the full 2003..=2017 span.
    assert_eq!(evo.lines().count() - 1, 3 * 12 * 15);
    assert!(evo.contains("G7,pagerank,2010,NA\n"));
}

#[test]
fn orgs_reads_config_from_environment() {
    let f = Fixture::new();
    fs::write(
        f.p("orgs.json"),
        r#"[{"name": "G7", "members": [{"id": "USA"}]}]"#,
    )
    .unwrap();
    let out = bin()
        .env(iotn_cli::CONFIG_ENV, f.p("orgs.json"))
        .args([
            "orgs",
            "--input",
            &f.s("net"),
            "--out",
            &f.s("o"),
            "--indicators",
            "indegree",
        ])
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert_eq!(f.rows("o/organizations.csv"), 2);
}

#[test]
fn exit_codes() {
    let f = Fixture::new();
    let code = |args: &[&str]| bin().args(args).output().unwrap().status.code();
    assert_eq!(
        code(&[
            "rank",
            "--input",
            &f.s("net"),
            "--out",
            &f.s("x"),
            "--indicators",
            "bogus"
        ]),
        Some(1)
    );
    assert_eq!(
        code(&[
            "attack",
            "--input",
            &f.s("net"),
            "--out",
            &f.s("x"),
            "--strategies",
            "nope"
        ]),
        Some(1)
    );
    assert_eq!(
        code(&[
            "attack",
            "--input",
            &f.s("net"),
            "--out",
            &f.s("x"),
            "--mode",
            "sideways"
        ]),
        Some(1)
    );
    assert_eq!(
        code(&["orgs", "--input", &f.s("net"), "--out", &f.s("x")]),
        Some(1)
    );
    assert_eq!(code(&["frobnicate"]), Some(1));
    assert_eq!(
        code(&["rank", "--input", &f.s("missing"), "--out", &f.s("x")]),
        Some(2)
    );
    assert_eq!(code(&["--help"]), Some(0));
    fs::write(f.p("bad.json"), "{not json").unwrap();
    assert_eq!(
        code(&[
            "rank",
            "--input",
            &f.s("net"),
            "--out",
            &f.s("x"),
            "--config",
            &f.s("bad.json")
        ]),
        Some(1)
    );
}

#[test]
fn manifest_records_seeds_and_digests() {
    let f = Fixture::new();
    f.ok(&[
        "communities",
        "--input",
        &f.s("net"),
        "--out",
        &f.s("c"),
        "--seed",
        "5",
    ]);
    let m: serde_json::Value = serde_json::from_str(&f.read("c/manifest.json")).unwrap();
    assert_eq!(m["seeds"]["community"], 5);
    assert_eq!(m["inputs"].as_array().unwrap().len(), 2);
    assert_eq!(m["config_sha256"].as_str().unwrap().len(), 64);
    assert_eq!(m["command"], "communities");
    assert!(m["outputs"]
        .as_array()
        .unwrap()
        .iter()
        .any(|o| o == "partitions.csv"));
}
